//! Dense real tensors on products of Euclidean spaces.
//!
//! A tensor of order `d` with dims `(n_1, .., n_d)` is stored row-major with the
//! last index fastest. Axes are 0-based in this API; the text formats in
//! [`io`] and [`partition`] use 1-based axis labels.

pub mod io;
pub mod partition;

pub use partition::{enumerate_partitions, is_finer, Partition, MAX_ORDER};

use crate::error::{arg_err, shape_err, Error, Result};

/// Dimensions `(n_1, .., n_d)` of the factor spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorShape {
    dims: Vec<usize>,
}

impl TensorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return shape_err("tensor order must be at least 1");
        }
        if dims.len() > MAX_ORDER {
            return shape_err(format!("tensor order {} exceeds {MAX_ORDER}", dims.len()));
        }
        if let Some(pos) = dims.iter().position(|&n| n == 0) {
            return shape_err(format!("dimension of axis {} is zero", pos + 1));
        }
        Ok(Self { dims })
    }

    /// Shape of an order-0 tensor (a scalar), produced by full contractions.
    fn scalar() -> Self {
        Self { dims: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Number of entries, `∏ n_i` (1 for a scalar).
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides, last axis fastest.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Product of the dims over a set of axes.
    pub fn block_len(&self, axes: &[usize]) -> usize {
        axes.iter().map(|&a| self.dims[a]).product()
    }

    pub fn is_square(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] == w[1])
    }
}

/// An order-`d` real tensor with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: TensorShape,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let shape = TensorShape::new(dims)?;
        if data.len() != shape.len() {
            return shape_err(format!(
                "data has {} entries but dims {:?} require {}",
                data.len(),
                shape.dims,
                shape.len()
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return arg_err(format!("entry {pos} is not finite"));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let shape = TensorShape::new(dims)?;
        let data = vec![0.0; shape.len()];
        Ok(Self { shape, data })
    }

    /// Builds a tensor from a function of the 0-based multi-index.
    pub fn from_fn(dims: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let shape = TensorShape::new(dims)?;
        let mut data = Vec::with_capacity(shape.len());
        for_each_index(shape.dims(), |idx| data.push(f(idx)));
        Self::new(shape.dims, data)
    }

    /// Outer product `v_1 ⊗ .. ⊗ v_d` of vectors.
    pub fn outer(vectors: &[Vec<f64>]) -> Result<Self> {
        let dims: Vec<usize> = vectors.iter().map(Vec::len).collect();
        Self::from_fn(dims, |idx| {
            idx.iter().zip(vectors).map(|(&i, v)| v[i]).product()
        })
    }

    fn scalar(value: f64) -> Self {
        Self {
            shape: TensorShape::scalar(),
            data: vec![value],
        }
    }

    pub fn shape(&self) -> &TensorShape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// True for the order-0 result of contracting every axis.
    pub fn is_scalar(&self) -> bool {
        self.shape.order() == 0
    }

    /// The value of an order-0 tensor.
    pub fn scalar_value(&self) -> Option<f64> {
        self.is_scalar().then(|| self.data[0])
    }

    pub fn get(&self, index: &[usize]) -> Option<f64> {
        if index.len() != self.order() || index.iter().zip(self.dims()).any(|(&i, &n)| i >= n) {
            return None;
        }
        let offset: usize = index
            .iter()
            .zip(self.shape.strides())
            .map(|(&i, s)| i * s)
            .sum();
        Some(self.data[offset])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Matrix flattening with the given axes as rows and the remaining axes as
    /// columns, both in increasing axis order. Returns `(rows, cols, data)`
    /// with the matrix stored row-major.
    pub fn flatten(&self, row_axes: &[usize]) -> Result<(usize, usize, Vec<f64>)> {
        let row_axes = normalize_axes(row_axes, self.order())?;
        let col_axes = complement(&row_axes, self.order());
        let layout = BlockLayout::new(&self.shape, &[row_axes.clone(), col_axes.clone()]);
        let rows = self.shape.block_len(&row_axes);
        let cols = self.shape.block_len(&col_axes);
        let mut out = vec![0.0; rows * cols];
        for (flat, &v) in self.data.iter().enumerate() {
            out[layout.offset(0, flat) * cols + layout.offset(1, flat)] = v;
        }
        Ok((rows, cols, out))
    }

    /// Entries with a repeated index (`i_a = i_b` for some `a ≠ b`) set to zero.
    pub fn without_diagonal(&self) -> Self {
        let mut data = self.data.clone();
        let mut flat = 0;
        for_each_index(self.dims(), |idx| {
            let repeated = (0..idx.len()).any(|a| (a + 1..idx.len()).any(|b| idx[a] == idx[b]));
            if repeated {
                data[flat] = 0.0;
            }
            flat += 1;
        });
        Self {
            shape: self.shape.clone(),
            data,
        }
    }

    /// True when some entry with a repeated index is nonzero.
    pub fn has_diagonal_mass(&self) -> bool {
        self.order() >= 2 && self.without_diagonal().data != self.data
    }
}

/// An element of `E_I`: coordinates over a set of axes, row-major over the
/// axes in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorVector {
    block: Vec<usize>,
    dims: Vec<usize>,
    coords: Vec<f64>,
}

impl FactorVector {
    /// `block` holds 0-based axes; `dims` the dimension of each of those axes.
    pub fn new(block: Vec<usize>, dims: Vec<usize>, coords: Vec<f64>) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::Index("factor vector block is empty".into()));
        }
        if block.len() != dims.len() {
            return shape_err("block and dims have different lengths");
        }
        if block.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Index("block axes must be strictly increasing".into()));
        }
        let len: usize = dims.iter().product();
        if coords.len() != len {
            return shape_err(format!(
                "factor vector has {} coordinates, block dims {:?} require {len}",
                coords.len(),
                dims
            ));
        }
        Ok(Self { block, dims, coords })
    }

    /// A vector over `block` sized to match `shape`.
    pub fn for_shape(shape: &TensorShape, block: Vec<usize>, coords: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = block.iter().find(|&&a| a >= shape.order()) {
            return Err(Error::Index(format!(
                "axis {} outside 1..={}",
                bad + 1,
                shape.order()
            )));
        }
        let dims = block.iter().map(|&a| shape.dims()[a]).collect();
        Self::new(block, dims, coords)
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        euclidean_norm(&self.coords)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            coords: self.coords.iter().map(|v| c * v).collect(),
            ..self.clone()
        }
    }

    /// Tensor product `x_I ⊗ y_J` for disjoint blocks, as a vector over `I ∪ J`.
    pub fn tensor(&self, other: &FactorVector) -> Result<FactorVector> {
        if self.block.iter().any(|a| other.block.contains(a)) {
            return Err(Error::Index("tensor product of overlapping blocks".into()));
        }
        let mut axes: Vec<(usize, usize, bool)> = self
            .block
            .iter()
            .zip(&self.dims)
            .map(|(&a, &n)| (a, n, true))
            .chain(other.block.iter().zip(&other.dims).map(|(&a, &n)| (a, n, false)))
            .collect();
        axes.sort_unstable();
        let block: Vec<usize> = axes.iter().map(|t| t.0).collect();
        let dims: Vec<usize> = axes.iter().map(|t| t.1).collect();
        let self_strides = TensorShape { dims: self.dims.clone() }.strides();
        let other_strides = TensorShape { dims: other.dims.clone() }.strides();
        let mut coords = Vec::with_capacity(dims.iter().product());
        for_each_index(&dims, |idx| {
            let (mut i, mut j, mut si, mut sj) = (0, 0, 0, 0);
            for (pos, &(_, _, mine)) in axes.iter().enumerate() {
                if mine {
                    i += idx[pos] * self_strides[si];
                    si += 1;
                } else {
                    j += idx[pos] * other_strides[sj];
                    sj += 1;
                }
            }
            coords.push(self.coords[i] * other.coords[j]);
        });
        Ok(FactorVector { block, dims, coords })
    }
}

/// `⟨A, x⟩`: the image of `x ∈ E_I` under `A` seen as a map `E_I → E_{[d]∖I}`.
///
/// The result lives on the remaining axes in increasing order; contracting
/// every axis returns an order-0 tensor.
pub fn contract(a: &DenseTensor, x: &FactorVector) -> Result<DenseTensor> {
    let block = normalize_axes(x.block(), a.order())?;
    for (&axis, &n) in block.iter().zip(x.dims()) {
        if a.dims()[axis] != n {
            return shape_err(format!(
                "axis {} has dimension {} but the vector expects {n}",
                axis + 1,
                a.dims()[axis]
            ));
        }
    }
    let rest = complement(&block, a.order());
    let layout = BlockLayout::new(a.shape(), &[block, rest.clone()]);
    let out_len = a.shape().block_len(&rest);
    let mut out = vec![0.0; out_len];
    for (flat, &v) in a.data().iter().enumerate() {
        out[layout.offset(1, flat)] += v * x.coords()[layout.offset(0, flat)];
    }
    if rest.is_empty() {
        return Ok(DenseTensor::scalar(out[0]));
    }
    let dims = rest.iter().map(|&r| a.dims()[r]).collect();
    DenseTensor::new(dims, out)
}

/// Precomputed offsets of every entry of a tensor inside each block of a
/// family of disjoint axis sets.
#[derive(Clone, Debug)]
pub(crate) struct BlockLayout {
    offsets: Vec<Vec<usize>>,
    block_lens: Vec<usize>,
}

impl BlockLayout {
    pub(crate) fn new(shape: &TensorShape, blocks: &[Vec<usize>]) -> Self {
        let len = shape.len();
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut block_lens = Vec::with_capacity(blocks.len());
        for block in blocks {
            let block_dims: Vec<usize> = block.iter().map(|&a| shape.dims()[a]).collect();
            let block_strides = TensorShape { dims: block_dims.clone() }.strides();
            let mut offs = Vec::with_capacity(len);
            for_each_index(shape.dims(), |idx| {
                offs.push(block.iter().zip(&block_strides).map(|(&a, s)| idx[a] * s).sum());
            });
            offsets.push(offs);
            block_lens.push(block_dims.iter().product());
        }
        Self { offsets, block_lens }
    }

    #[inline]
    pub(crate) fn offset(&self, block: usize, flat: usize) -> usize {
        self.offsets[block][flat]
    }

    pub(crate) fn block_len(&self, block: usize) -> usize {
        self.block_lens[block]
    }

    pub(crate) fn num_blocks(&self) -> usize {
        self.offsets.len()
    }

    /// `⟨A, x_1 ⊗ .. ⊗ x_k⟩` for one vector per block.
    pub(crate) fn pair(&self, data: &[f64], xs: &[Vec<f64>]) -> f64 {
        data.iter()
            .enumerate()
            .map(|(flat, &v)| {
                let w: f64 = xs
                    .iter()
                    .enumerate()
                    .map(|(b, x)| x[self.offsets[b][flat]])
                    .product();
                v * w
            })
            .sum()
    }

    /// Contraction of `A` against every vector except the one of block `skip`,
    /// written into `out` (length of block `skip`).
    pub(crate) fn contract_except(&self, data: &[f64], xs: &[Vec<f64>], skip: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (flat, &v) in data.iter().enumerate() {
            let mut w = v;
            for (b, x) in xs.iter().enumerate() {
                if b != skip {
                    w *= x[self.offsets[b][flat]];
                }
            }
            out[self.offsets[skip][flat]] += w;
        }
    }
}

/// Sorted, deduplicated-checked copy of a 0-based axis set.
pub(crate) fn normalize_axes(axes: &[usize], order: usize) -> Result<Vec<usize>> {
    if axes.is_empty() {
        return Err(Error::Index("empty axis set".into()));
    }
    let mut sorted = axes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Index("repeated axis".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&a| a >= order) {
        return Err(Error::Index(format!("axis {} outside 1..={order}", bad + 1)));
    }
    Ok(sorted)
}

pub(crate) fn complement(axes: &[usize], order: usize) -> Vec<usize> {
    (0..order).filter(|a| !axes.contains(a)).collect()
}

/// Visits every multi-index of `dims` in row-major order.
pub(crate) fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    if dims.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; dims.len()];
    loop {
        f(&idx);
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
