//! Dense d-dimensional arrays of extended integers.
//!
//! All solvers in this crate operate on [`MDArray`]: a flat, row-major
//! buffer of [`ExtInt`] entries together with its size vector. Dimension 1
//! is the fastest-varying one, which makes the linear layout coincide with
//! the Kronecker order used by the 1-D linearization in
//! [`crate::maxconv::conv_via_linearization`].

use std::fmt;

use crate::error::{Error, Result};

/// A 64-bit integer extended with a distinguished `-inf` element.
///
/// `NegInf` is absorbing for addition and the identity for `max`. Finite
/// arithmetic is checked: anything that would leave the 64-bit range is an
/// [`Error::ArithmeticOverflow`], never a silent wrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtInt {
    NegInf,
    Finite(i64),
}

impl ExtInt {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtInt::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            ExtInt::Finite(v) => Some(v),
            ExtInt::NegInf => None,
        }
    }

    /// `-inf + x = -inf`; finite sums are overflow-checked.
    pub fn checked_add(self, rhs: ExtInt) -> Result<ExtInt> {
        match (self, rhs) {
            (ExtInt::Finite(a), ExtInt::Finite(b)) => a
                .checked_add(b)
                .map(ExtInt::Finite)
                .ok_or(Error::ArithmeticOverflow),
            _ => Ok(ExtInt::NegInf),
        }
    }

    /// Adds a finite constant, leaving `-inf` untouched.
    pub fn checked_add_const(self, c: i64) -> Result<ExtInt> {
        self.checked_add(ExtInt::Finite(c))
    }
}

impl From<i64> for ExtInt {
    fn from(v: i64) -> Self {
        ExtInt::Finite(v)
    }
}

impl fmt::Display for ExtInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtInt::NegInf => write!(f, "-inf"),
            ExtInt::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// A position of an array: one coordinate per dimension, `0 <= v < L`.
pub type Position = Vec<usize>;

/// The size vector `L` of an array. Every component is at least one and
/// the entry count `prod(L)` fits in 64 bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SizeVec(Vec<usize>);

impl SizeVec {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSize("size vector must have d >= 1".into()));
        }
        let mut count: u64 = 1;
        for &d in &dims {
            if d == 0 {
                return Err(Error::InvalidSize(format!(
                    "size component must be positive, got {dims:?}"
                )));
            }
            count = count
                .checked_mul(d as u64)
                .filter(|&c| c <= i64::MAX as u64)
                .ok_or_else(|| Error::InvalidSize("entry count does not fit in 64 bits".into()))?;
        }
        Ok(SizeVec(dims))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    /// Number of dimensions `d`.
    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Number of entries `prod(L)`.
    pub fn count(&self) -> usize {
        self.0.iter().product()
    }

    /// Row-major strides with dimension 1 fastest: `1, L1, L1*L2, ...`.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.0.len());
        let mut acc = 1usize;
        for &d in &self.0 {
            s.push(acc);
            acc *= d;
        }
        s
    }

    pub fn contains(&self, pos: &[usize]) -> bool {
        pos.len() == self.0.len() && pos.iter().zip(&self.0).all(|(&p, &d)| p < d)
    }

    /// All valid positions in increasing [`linear_index`] order.
    pub fn positions(&self) -> Positions {
        Positions {
            size: self.0.clone(),
            next: Some(vec![0; self.0.len()]),
        }
    }
}

impl fmt::Display for SizeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `v_1 + L_1*v_2 + L_1*L_2*v_3 + ...`, a bijection onto `[0, prod(L))`.
pub fn linear_index(pos: &[usize], size: &SizeVec) -> Result<usize> {
    if !size.contains(pos) {
        return Err(Error::InvalidPosition);
    }
    let mut idx = 0usize;
    let mut stride = 1usize;
    for (&p, &d) in pos.iter().zip(size.dims()) {
        idx += p * stride;
        stride *= d;
    }
    Ok(idx)
}

/// Inverse of [`linear_index`].
pub fn position_of(mut idx: usize, size: &SizeVec) -> Position {
    debug_assert!(idx < size.count());
    let mut pos = Vec::with_capacity(size.rank());
    for &d in size.dims() {
        pos.push(idx % d);
        idx /= d;
    }
    pos
}

/// Odometer iterator over all positions, dimension 1 fastest.
pub struct Positions {
    size: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for Positions {
    type Item = Position;

    fn next(&mut self) -> Option<Position> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut done = true;
        for (c, &d) in succ.iter_mut().zip(&self.size) {
            *c += 1;
            if *c < d {
                done = false;
                break;
            }
            *c = 0;
        }
        if !done {
            self.next = Some(succ);
        }
        Some(cur)
    }
}

/// Dense d-dimensional array of [`ExtInt`].
///
/// Values are immutable after construction; build new arrays through
/// [`MDArrayBuilder`] or the constructors below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MDArray {
    size: SizeVec,
    data: Vec<ExtInt>,
}

impl MDArray {
    pub fn filled(size: SizeVec, value: ExtInt) -> Self {
        let n = size.count();
        MDArray {
            size,
            data: vec![value; n],
        }
    }

    /// All `-inf`, the neutral starting point for max-relaxations.
    pub fn neg_inf(size: SizeVec) -> Self {
        Self::filled(size, ExtInt::NegInf)
    }

    pub fn from_vec(size: SizeVec, data: Vec<ExtInt>) -> Result<Self> {
        if data.len() != size.count() {
            return Err(Error::ShapeError(format!(
                "data length {} does not match entry count {}",
                data.len(),
                size.count()
            )));
        }
        Ok(MDArray { size, data })
    }

    pub fn from_fn(size: SizeVec, mut f: impl FnMut(&[usize]) -> ExtInt) -> Self {
        let mut data = Vec::with_capacity(size.count());
        for pos in size.positions() {
            data.push(f(&pos));
        }
        MDArray { size, data }
    }

    pub fn size(&self) -> &SizeVec {
        &self.size
    }

    pub fn data(&self) -> &[ExtInt] {
        &self.data
    }

    pub fn get(&self, pos: &[usize]) -> Result<ExtInt> {
        Ok(self.data[linear_index(pos, &self.size)?])
    }

    pub fn get_linear(&self, idx: usize) -> ExtInt {
        self.data[idx]
    }

    /// Componentwise `v <= u` implies `A_v <= A_u`, checked via the d
    /// single-step comparisons `A_v <= A_{v+e_i}`.
    pub fn monotone_increasing(&self) -> bool {
        let strides = self.size.strides();
        for (dim, (&stride, &len)) in strides.iter().zip(self.size.dims()).enumerate() {
            let _ = dim;
            for idx in 0..self.data.len() {
                if (idx / stride) % len >= 1 && self.data[idx - stride] > self.data[idx] {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_finite(&self) -> Option<i64> {
        self.data.iter().filter_map(|e| e.finite()).max()
    }

    pub fn min_finite(&self) -> Option<i64> {
        self.data.iter().filter_map(|e| e.finite()).min()
    }

    /// Largest absolute finite entry, 0 for an all `-inf` array.
    pub fn max_abs_finite(&self) -> i64 {
        self.data
            .iter()
            .filter_map(|e| e.finite())
            .map(|v| v.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|e| e.is_finite())
    }

    /// Adds a constant to every finite entry.
    pub fn shifted(&self, c: i64) -> Result<MDArray> {
        let data = self
            .data
            .iter()
            .map(|e| e.checked_add_const(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(MDArray {
            size: self.size.clone(),
            data,
        })
    }
}

/// Write access during construction; consumed by [`MDArrayBuilder::build`].
pub struct MDArrayBuilder {
    size: SizeVec,
    data: Vec<ExtInt>,
}

impl MDArrayBuilder {
    pub fn new(size: SizeVec) -> Self {
        let n = size.count();
        MDArrayBuilder {
            size,
            data: vec![ExtInt::NegInf; n],
        }
    }

    pub fn size(&self) -> &SizeVec {
        &self.size
    }

    pub fn set(&mut self, pos: &[usize], value: ExtInt) -> Result<()> {
        let idx = linear_index(pos, &self.size)?;
        self.data[idx] = value;
        Ok(())
    }

    pub fn set_linear(&mut self, idx: usize, value: ExtInt) {
        self.data[idx] = value;
    }

    pub fn get_linear(&self, idx: usize) -> ExtInt {
        self.data[idx]
    }

    pub fn data_mut(&mut self) -> &mut [ExtInt] {
        &mut self.data
    }

    pub fn build(self) -> MDArray {
        MDArray {
            size: self.size,
            data: self.data,
        }
    }
}
