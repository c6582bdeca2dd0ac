//! Text file formats: tensors and point sets as JSON objects.
//!
//! Tensor: `{"dims": [2, 3], "data": [..]}`, row-major, `∏ dims` reals.
//! Point set: `{"dim": 3, "points": [[..], ..]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DenseTensor;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    dims: Vec<usize>,
    data: Vec<f64>,
}

/// Parses the tensor JSON format. Errors name the offending field, or the
/// line and column for syntax errors.
pub fn parse_tensor(text: &str) -> Result<DenseTensor> {
    let file: TensorFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("tensor file: {e}")))?;
    DenseTensor::new(file.dims, file.data).map_err(|e| match e {
        Error::Shape(m) | Error::Argument(m) => Error::Parse(format!("tensor file, field `data`/`dims`: {m}")),
        other => other,
    })
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_tensor(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Serializes a tensor; the output re-parses to bit-identical data.
pub fn tensor_to_json(t: &DenseTensor) -> String {
    let file = TensorFile {
        dims: t.dims().to_vec(),
        data: t.data().to_vec(),
    };
    let mut s = serde_json::to_string(&file).expect("tensor serialization cannot fail");
    s.push('\n');
    s
}

pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    fs::write(path, tensor_to_json(t))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointFile {
    dim: usize,
    points: Vec<Vec<f64>>,
}

/// Parses a point set; every point must have `dim` finite coordinates.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let file: PointFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("point file: {e}")))?;
    if file.points.is_empty() {
        return Err(Error::Parse("point file, field `points`: no points".into()));
    }
    for (i, p) in file.points.iter().enumerate() {
        if p.len() != file.dim {
            return Err(Error::Parse(format!(
                "point file, field `points`: point {} has {} coordinates, `dim` is {}",
                i + 1,
                p.len(),
                file.dim
            )));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("point file, field `points`: point {} is not finite", i + 1)));
        }
    }
    Ok(file.points)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    parse_points(&fs::read_to_string(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn points_to_json(points: &[Vec<f64>]) -> String {
    let file = PointFile {
        dim: points.first().map_or(0, Vec::len),
        points: points.to_vec(),
    };
    let mut s = serde_json::to_string(&file).expect("point serialization cannot fail");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_validates() {
        let t = parse_tensor(r#"{"dims":[2,2],"data":[1,0,0,1]}"#).unwrap();
        assert_eq!(t.dims(), &[2, 2]);
        let err = parse_tensor(r#"{"dims":[2,2],"data":[1,0,0]}"#).unwrap_err().to_string();
        assert!(err.contains("data"), "{err}");
        let err = parse_tensor("{\n\"dims\": [2],\n\"data\": [1, oops]}").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = parse_tensor(r#"{"dims":[2]}"#).unwrap_err().to_string();
        assert!(err.contains("data"), "{err}");
    }

    #[test]
    fn point_file() {
        let pts = parse_points(r#"{"dim":2,"points":[[0,1],[1,0]]}"#).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(parse_points(r#"{"dim":2,"points":[[0,1],[1]]}"#).is_err());
        assert_eq!(parse_points(&points_to_json(&pts)).unwrap(), pts);
    }

    proptest! {
        #[test]
        fn json_round_trip_is_bit_exact(dims in prop::collection::vec(1usize..4, 1..4), seed in any::<u64>()) {
            let len: usize = dims.iter().product();
            let mut state = seed | 1;
            let data: Vec<f64> = (0..len).map(|_| {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                f64::from_bits(state >> 2) * if state & 1 == 0 { 1.0 } else { -1.0 }
            }).map(|v| if v.is_finite() { v } else { 0.5 }).collect();
            let t = DenseTensor::new(dims, data).unwrap();
            let back = parse_tensor(&tensor_to_json(&t)).unwrap();
            let a: Vec<u64> = t.data().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = back.data().iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}
