//! Set partitions of the axis set `{1, .., d}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{arg_err, Error, Result};

/// Largest supported tensor order; `Bell(8) = 4140` partitions.
pub const MAX_ORDER: usize = 8;

/// A partition of `{0, .., d-1}` in canonical form: elements ascending inside
/// each block, blocks ordered by their minimum element.
///
/// Displayed and parsed 1-based, e.g. `{1,3}{2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalizes blocks of 0-based axes covering `0..d`.
    pub fn new(d: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if d == 0 || d > MAX_ORDER {
            return arg_err(format!("partition ground set size {d} outside 1..={MAX_ORDER}"));
        }
        let mut seen = vec![false; d];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e >= d {
                    return Err(Error::Index(format!("index {} outside 1..={d}", e + 1)));
                }
                if seen[e] {
                    return Err(Error::Parse(format!("index {} appears twice", e + 1)));
                }
                seen[e] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!("index {} is not covered", missing + 1)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { ground: d, blocks })
    }

    /// `{{1}, .., {d}}`.
    pub fn singletons(d: usize) -> Result<Self> {
        Self::new(d, (0..d).map(|i| vec![i]).collect())
    }

    /// `{[d]}`.
    pub fn whole(d: usize) -> Result<Self> {
        Self::new(d, vec![(0..d).collect()])
    }

    /// Partition from a restricted-growth string: element `i` goes to block `rgs[i]`.
    fn from_rgs(rgs: &[usize]) -> Self {
        let nblocks = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i);
        }
        // an RGS already lists blocks by their minimum element
        Self {
            ground: rgs.len(),
            blocks,
        }
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks, `card 𝒫`.
    pub fn cardinality(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `axis`.
    pub fn block_of(&self, axis: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&axis))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            f.write_str("{")?;
            for (i, e) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", e + 1)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses `{1,3}{2}`; whitespace is ignored and the ground set is
    /// `{1, .., max index}`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty partition string".into()));
        }
        let mut blocks = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .ok_or_else(|| Error::Parse(format!("expected '{{' at {rest:?}")))?;
            let close = body
                .find('}')
                .ok_or_else(|| Error::Parse("unterminated block".into()))?;
            let inner = &body[..close];
            if inner.is_empty() {
                return Err(Error::Parse("empty block".into()));
            }
            let block = inner
                .split(',')
                .map(|tok| match tok.parse::<usize>() {
                    Ok(0) => Err(Error::Parse("indices are 1-based".into())),
                    Ok(v) => Ok(v - 1),
                    Err(_) => Err(Error::Parse(format!("bad index {tok:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
            rest = &body[close + 1..];
        }
        let d = blocks.iter().flatten().max().map_or(0, |m| m + 1);
        Self::new(d, blocks)
    }
}

/// All `Bell(d)` partitions of `{1, .., d}`, ordered lexicographically by
/// restricted-growth string.
pub fn enumerate_partitions(d: usize) -> Result<Vec<Partition>> {
    if d == 0 || d > MAX_ORDER {
        return arg_err(format!("cannot enumerate partitions of {d} elements (supported: 1..={MAX_ORDER})"));
    }
    let mut out = Vec::new();
    let mut rgs = vec![0usize; d];
    // prefix_max[i] = max(rgs[0..=i])
    let mut prefix_max = vec![0usize; d];
    loop {
        out.push(Partition::from_rgs(&rgs));
        // rightmost position that can still be incremented
        let mut i = d - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if rgs[i] <= prefix_max[i - 1] {
                break;
            }
            i -= 1;
        }
        rgs[i] += 1;
        prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
        for j in i + 1..d {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

/// True iff every block of `q` lies inside some block of `p`.
pub fn is_finer(q: &Partition, p: &Partition) -> Result<bool> {
    if q.ground != p.ground {
        return arg_err(format!(
            "partitions of different ground sets ({} vs {})",
            q.ground, p.ground
        ));
    }
    Ok(q
        .blocks
        .iter()
        .all(|qb| p.blocks.iter().any(|pb| qb.iter().all(|e| pb.contains(e)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn parse(s: &str) -> Partition {
        s.parse().unwrap()
    }

    // Bell numbers through the Bell triangle.
    fn bell(n: usize) -> usize {
        let mut row = vec![1usize];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for v in &row {
                let last = *next.last().unwrap();
                next.push(last + v);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn small_enumerations() {
        let one = enumerate_partitions(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].to_string(), "{1}");

        let three: Vec<String> = enumerate_partitions(3).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(three, ["{1,2,3}", "{1,2}{3}", "{1,3}{2}", "{1}{2,3}", "{1}{2}{3}"]);
        assert_eq!(enumerate_partitions(4).unwrap().len(), 15);
    }

    #[test]
    fn counts_match_bell_and_are_distinct() {
        for d in 1..=MAX_ORDER {
            let parts = enumerate_partitions(d).unwrap();
            assert_eq!(parts.len(), bell(d), "d = {d}");
            let distinct: HashSet<_> = parts.iter().collect();
            assert_eq!(distinct.len(), parts.len());
            for p in &parts {
                let reparsed: Partition = p.to_string().parse().unwrap();
                assert_eq!(&reparsed, p);
            }
        }
        assert_eq!(bell(8), 4140);
    }

    #[test]
    fn enumeration_range() {
        assert!(enumerate_partitions(0).is_err());
        assert!(enumerate_partitions(9).is_err());
    }

    #[test]
    fn refinement() {
        assert!(is_finer(&parse("{1}{2}"), &parse("{1,2}")).unwrap());
        assert!(!is_finer(&parse("{1,2}"), &parse("{1}{2}")).unwrap());
        let p = parse("{1,3}{2}");
        assert!(is_finer(&p, &p).unwrap());
        assert!(!is_finer(&parse("{1,2}{3}"), &parse("{1,3}{2}")).unwrap());
        assert!(is_finer(&parse("{1}{2}"), &parse("{1,2,3}")).is_err());
    }

    #[test]
    fn lattice_extremes() {
        for d in 1..=5 {
            let bottom = Partition::singletons(d).unwrap();
            let top = Partition::whole(d).unwrap();
            for p in enumerate_partitions(d).unwrap() {
                assert!(is_finer(&bottom, &p).unwrap());
                assert!(is_finer(&p, &top).unwrap());
            }
        }
    }

    #[test]
    fn parser_canonicalizes() {
        let p = parse(" { 3 , 1 } {2} ");
        assert_eq!(p.to_string(), "{1,3}{2}");
        assert_eq!(parse("{2}{1,3}"), p);
        assert_eq!(p.cardinality(), 2);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1]]);
    }

    #[test]
    fn parser_rejects_malformed() {
        for bad in ["", "{}", "{1,1}", "{1}{3}", "{0}", "{1", "1,2", "{a}", "{1}{1,2}"] {
            assert!(bad.parse::<Partition>().is_err(), "{bad:?} should fail");
        }
    }
}
