//! Convolution engines and decision checks on extended-integer arrays.
//!
//! `C_v = max_{u <= v} A_u + B_{v-u}` over the (max,+) semiring. The
//! quadratic [`conv_naive`] is the reference oracle for everything else:
//! the Kronecker-style 1-D linearization, the linear-time convolution
//! against a concave sequence, and the naive upper-bound and
//! superadditivity tests.

use crate::error::{Error, Result};
use crate::mdarray::{ExtInt, MDArray, SizeVec};
use crate::smawk::smawk_row_maxima;

/// A convolution problem. The general form allows distinct operand sizes
/// with `out_size <= a.size + b.size - 1` componentwise; the truncated
/// equal-size problem is the `out_size = L` special case.
#[derive(Debug, Clone)]
pub struct ConvRequest {
    a: MDArray,
    b: MDArray,
    out_size: SizeVec,
}

impl ConvRequest {
    pub fn new(a: MDArray, b: MDArray, out_size: SizeVec) -> Result<Self> {
        if a.size().rank() != b.size().rank() || a.size().rank() != out_size.rank() {
            return Err(Error::ShapeError(format!(
                "rank mismatch: {} vs {} vs {}",
                a.size(),
                b.size(),
                out_size
            )));
        }
        for ((&la, &lb), &lo) in a
            .size()
            .dims()
            .iter()
            .zip(b.size().dims())
            .zip(out_size.dims())
        {
            if lo > la + lb - 1 {
                return Err(Error::ShapeError(format!(
                    "out size {lo} exceeds {la} + {lb} - 1"
                )));
            }
        }
        Ok(ConvRequest { a, b, out_size })
    }

    /// The truncated problem: equal input sizes, output cut to the same size.
    pub fn truncated(a: MDArray, b: MDArray) -> Result<Self> {
        if a.size() != b.size() {
            return Err(Error::ShapeError(format!(
                "truncated convolution needs equal sizes, got {} and {}",
                a.size(),
                b.size()
            )));
        }
        let out = a.size().clone();
        ConvRequest::new(a, b, out)
    }

    pub fn a(&self) -> &MDArray {
        &self.a
    }

    pub fn b(&self) -> &MDArray {
        &self.b
    }

    pub fn out_size(&self) -> &SizeVec {
        &self.out_size
    }
}

/// Decision oracle for "is `C` an upper bound of `A (+) B`".
///
/// Implementations must return `true` iff `(A (+) B)_v <= C_v` for every
/// valid position `v`.
pub trait UpperBoundOracle {
    fn upper_bound_holds(&self, a: &MDArray, b: &MDArray, c: &MDArray) -> Result<bool>;
}

/// The quadratic reference oracle.
pub struct NaiveUpperBoundOracle;

impl UpperBoundOracle for NaiveUpperBoundOracle {
    fn upper_bound_holds(&self, a: &MDArray, b: &MDArray, c: &MDArray) -> Result<bool> {
        upper_bound_check_naive(a, b, c)
    }
}

impl<F> UpperBoundOracle for F
where
    F: Fn(&MDArray, &MDArray, &MDArray) -> Result<bool>,
{
    fn upper_bound_holds(&self, a: &MDArray, b: &MDArray, c: &MDArray) -> Result<bool> {
        self(a, b, c)
    }
}

fn finite_entries(a: &MDArray) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    for (pos, &e) in a.size().positions().zip(a.data()) {
        if let ExtInt::Finite(v) = e {
            out.push((pos, v));
        }
    }
    out
}

/// Quadratic reference convolution: iterates all pairs of finite positions.
///
/// Entries of the result are `-inf` exactly where no decomposition with two
/// finite operands exists.
pub fn conv_naive(req: &ConvRequest) -> Result<MDArray> {
    let out_size = req.out_size().clone();
    let out_dims = out_size.dims().to_vec();
    let strides = out_size.strides();
    let mut out = vec![ExtInt::NegInf; out_size.count()];

    let fa = finite_entries(req.a());
    let fb = finite_entries(req.b());
    for (pa, va) in &fa {
        'inner: for (pb, vb) in &fb {
            let mut idx = 0usize;
            for i in 0..pa.len() {
                let c = pa[i] + pb[i];
                if c >= out_dims[i] {
                    continue 'inner;
                }
                idx += c * strides[i];
            }
            let sum = va.checked_add(*vb).ok_or(Error::ArithmeticOverflow)?;
            if out[idx] < ExtInt::Finite(sum) {
                out[idx] = ExtInt::Finite(sum);
            }
        }
    }
    MDArray::from_vec(out_size, out)
}

/// Naive 1-D (max,+) convolution, `out[j] = max_k r[k] + a[j-k]`.
pub fn conv1d_naive(r: &[ExtInt], a: &[ExtInt], out_len: usize) -> Result<Vec<ExtInt>> {
    check_1d_lens(r, a, out_len)?;
    let mut out = vec![ExtInt::NegInf; out_len];
    for (i, ri) in r.iter().enumerate() {
        let ExtInt::Finite(x) = *ri else { continue };
        for (k, ak) in a.iter().enumerate() {
            if i + k >= out_len {
                break;
            }
            let ExtInt::Finite(y) = *ak else { continue };
            let s = x.checked_add(y).ok_or(Error::ArithmeticOverflow)?;
            if out[i + k] < ExtInt::Finite(s) {
                out[i + k] = ExtInt::Finite(s);
            }
        }
    }
    Ok(out)
}

fn check_1d_lens(r: &[ExtInt], a: &[ExtInt], out_len: usize) -> Result<()> {
    if r.is_empty() || a.is_empty() {
        return Err(Error::ShapeError("1-D operands must be non-empty".into()));
    }
    if out_len > r.len() + a.len() - 1 {
        return Err(Error::ShapeError(format!(
            "out_len {out_len} exceeds {} + {} - 1",
            r.len(),
            a.len()
        )));
    }
    Ok(())
}

/// Kronecker strides for size `L`: `1, D(1), D(1)*D(2), ...` with
/// `D(i) = 2*L_i - 1`.
fn kronecker_strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = Vec::with_capacity(dims.len());
    let mut acc = 1usize;
    for &l in dims {
        strides.push(acc);
        acc *= 2 * l - 1;
    }
    strides
}

fn kronecker_index(pos: &[usize], strides: &[usize]) -> usize {
    pos.iter().zip(strides).map(|(&p, &s)| p * s).sum()
}

/// Computes a d-dimensional convolution with any 1-D engine by embedding
/// both operands into 1-D arrays with `-inf` padding.
///
/// The stride in dimension `k+1` is `D(1)*...*D(k)` with `D(i) = 2*L_i - 1`,
/// so sums of valid positions never collide and the embedded length stays
/// below `2^d * prod(L)`. Requires equal operand sizes.
pub fn conv_via_linearization<F>(req: &ConvRequest, engine: F) -> Result<MDArray>
where
    F: Fn(&[ExtInt], &[ExtInt], usize) -> Result<Vec<ExtInt>>,
{
    if req.a().size() != req.b().size() {
        return Err(Error::ShapeError(
            "linearization requires equal operand sizes".into(),
        ));
    }
    let size = req.a().size().clone();
    let strides = kronecker_strides(size.dims());

    let embedded_len = 1 + kronecker_index(
        &size.dims().iter().map(|&l| l - 1).collect::<Vec<_>>(),
        &strides,
    );
    let embed = |arr: &MDArray| -> Vec<ExtInt> {
        let mut flat = vec![ExtInt::NegInf; embedded_len];
        for (pos, &e) in arr.size().positions().zip(arr.data()) {
            flat[kronecker_index(&pos, &strides)] = e;
        }
        flat
    };
    let fa = embed(req.a());
    let fb = embed(req.b());

    let out_size = req.out_size().clone();
    let out_top: Vec<usize> = out_size.dims().iter().map(|&l| l - 1).collect();
    let engine_out_len = 1 + kronecker_index(&out_top, &strides);
    let conv = engine(&fa, &fb, engine_out_len)?;

    let mut out = Vec::with_capacity(out_size.count());
    for pos in out_size.positions() {
        out.push(conv[kronecker_index(&pos, &strides)]);
    }
    MDArray::from_vec(out_size, out)
}

#[cfg(debug_assertions)]
fn validate_concave_support(a: &[ExtInt]) -> Result<()> {
    let first = a.iter().position(|e| e.is_finite());
    let Some(first) = first else { return Ok(()) };
    let last = a.iter().rposition(|e| e.is_finite()).unwrap();
    let support = &a[first..=last];
    if !support.iter().all(|e| e.is_finite()) {
        return Err(Error::NonConcaveInput);
    }
    let vals: Vec<i128> = support
        .iter()
        .map(|e| e.finite().unwrap() as i128)
        .collect();
    for w in vals.windows(3) {
        if w[1] - w[0] < w[2] - w[1] {
            return Err(Error::NonConcaveInput);
        }
    }
    Ok(())
}

/// Surrogate for `-inf` entries of `r` inside the i128 candidate matrix.
const R_NEG_SURROGATE: i128 = -(1i128 << 90);

/// (max,+) convolution of an arbitrary sequence `r` with a concave
/// sequence `a`, in time linear in `out_len + r.len() + a.len()`.
///
/// `a` must be concave on its finite support and may carry `-inf` only as
/// a contiguous prefix and/or suffix (validated in debug builds). `r` is
/// unrestricted. Internally the candidate matrix `M[j][i] = r_i + a_{j-i}`
/// is extended with steeply sloped pads so that it is totally monotone on
/// the whole rectangle, and SMAWK picks each row maximum.
pub fn conv1d_concave(r: &[ExtInt], a: &[ExtInt], out_len: usize) -> Result<Vec<ExtInt>> {
    check_1d_lens(r, a, out_len)?;
    #[cfg(debug_assertions)]
    validate_concave_support(a)?;

    let Some(support_start) = a.iter().position(|e| e.is_finite()) else {
        return Ok(vec![ExtInt::NegInf; out_len]);
    };
    let support_end = a.iter().rposition(|e| e.is_finite()).unwrap();
    let fin: Vec<i64> = a[support_start..=support_end]
        .iter()
        .map(|e| e.finite().expect("contiguous finite support"))
        .collect();
    let m = fin.len();

    // Rows of the candidate matrix are outputs of r (+) fin; row j only
    // matters when it lands inside [support_start, support_start + rows).
    let rows = (r.len() + m - 1).min(out_len.saturating_sub(support_start));
    let mut out = vec![ExtInt::NegInf; out_len];
    if rows == 0 {
        return Ok(out);
    }

    let rbar: Vec<i128> = r
        .iter()
        .map(|e| match e {
            ExtInt::Finite(v) => *v as i128,
            ExtInt::NegInf => R_NEG_SURROGATE,
        })
        .collect();
    let rmax = *rbar.iter().max().unwrap();
    let rmin = *rbar.iter().min().unwrap();
    let amax = *fin.iter().max().unwrap() as i128;
    let amin = *fin.iter().min().unwrap() as i128;
    // One step outside the support must cost more than any value spread.
    let big = (rmax - rmin) + (amax - amin) + 1;

    let value = |j: usize, i: usize| -> i128 {
        let k = j as i128 - i as i128;
        let ak = if k < 0 {
            fin[0] as i128 + k * big
        } else if (k as usize) < m {
            fin[k as usize] as i128
        } else {
            fin[m - 1] as i128 - (k - (m as i128 - 1)) * big
        };
        rbar[i] + ak
    };

    let argmax = smawk_row_maxima(rows, r.len(), &value);
    for (j, &i) in argmax.iter().enumerate() {
        let k = j as i128 - i as i128;
        // A pad or surrogate winner means the row has no finite candidate.
        if k < 0 || k as usize >= m {
            continue;
        }
        let ExtInt::Finite(rv) = r[i] else { continue };
        let sum = rv
            .checked_add(fin[k as usize])
            .ok_or(Error::ArithmeticOverflow)?;
        out[support_start + j] = ExtInt::Finite(sum);
    }
    Ok(out)
}

/// True iff `A_u + B_v <= C_{u+v}` for all valid `u`, `v` with `u+v` valid.
pub fn upper_bound_check_naive(a: &MDArray, b: &MDArray, c: &MDArray) -> Result<bool> {
    if a.size() != b.size() || a.size() != c.size() {
        return Err(Error::ShapeError(
            "upper-bound test requires three equal-size arrays".into(),
        ));
    }
    let size = a.size();
    let dims = size.dims().to_vec();
    let strides = size.strides();
    let fa = finite_entries(a);
    let fb = finite_entries(b);
    for (pa, va) in &fa {
        'inner: for (pb, vb) in &fb {
            let mut idx = 0usize;
            for i in 0..pa.len() {
                let s = pa[i] + pb[i];
                if s >= dims[i] {
                    continue 'inner;
                }
                idx += s * strides[i];
            }
            let sum = *va as i128 + *vb as i128;
            let ok = match c.get_linear(idx) {
                ExtInt::Finite(cv) => sum <= cv as i128,
                ExtInt::NegInf => false,
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff `A_v >= (A (+) A)_v` for all valid `v`.
pub fn superadditive_check_naive(a: &MDArray) -> bool {
    upper_bound_check_naive(a, a, a).expect("equal sizes by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdarray::MDArrayBuilder;

    fn sz(dims: &[usize]) -> SizeVec {
        SizeVec::new(dims.to_vec()).unwrap()
    }

    fn arr1(vals: &[i64]) -> MDArray {
        MDArray::from_vec(
            sz(&[vals.len()]),
            vals.iter().map(|&v| ExtInt::Finite(v)).collect(),
        )
        .unwrap()
    }

    fn fin(vals: &[i64]) -> Vec<ExtInt> {
        vals.iter().map(|&v| ExtInt::Finite(v)).collect()
    }

    fn assert_arr(a: &MDArray, want: &[ExtInt]) {
        assert_eq!(a.data(), want);
    }

    #[test]
    fn conv_naive_examples() {
        let c = conv_naive(&ConvRequest::truncated(arr1(&[0]), arr1(&[0])).unwrap()).unwrap();
        assert_arr(&c, &fin(&[0]));

        let c = conv_naive(&ConvRequest::truncated(arr1(&[0, 1, 5]), arr1(&[0, 2, 3])).unwrap())
            .unwrap();
        assert_arr(&c, &fin(&[0, 2, 5]));

        // A = B with A_{(0,0)}=0, A_{(1,0)}=2, A_{(0,1)}=1, A_{(1,1)}=3.
        let mut b = MDArrayBuilder::new(sz(&[2, 2]));
        b.set(&[0, 0], ExtInt::Finite(0)).unwrap();
        b.set(&[1, 0], ExtInt::Finite(2)).unwrap();
        b.set(&[0, 1], ExtInt::Finite(1)).unwrap();
        b.set(&[1, 1], ExtInt::Finite(3)).unwrap();
        let a = b.build();
        let c = conv_naive(&ConvRequest::truncated(a.clone(), a).unwrap()).unwrap();
        assert_eq!(c.get(&[0, 0]).unwrap(), ExtInt::Finite(0));
        assert_eq!(c.get(&[1, 0]).unwrap(), ExtInt::Finite(2));
        assert_eq!(c.get(&[0, 1]).unwrap(), ExtInt::Finite(1));
        assert_eq!(c.get(&[1, 1]).unwrap(), ExtInt::Finite(3));
    }

    #[test]
    fn conv_naive_neg_inf_entries() {
        let a = MDArray::from_vec(sz(&[2]), vec![ExtInt::NegInf, ExtInt::Finite(1)]).unwrap();
        let b = arr1(&[0, 2]);
        let c = conv_naive(&ConvRequest::truncated(a, b).unwrap()).unwrap();
        // position 0 has only the (-inf, 0) decomposition
        assert_arr(&c, &[ExtInt::NegInf, ExtInt::Finite(1)]);
    }

    #[test]
    fn conv_naive_general_out_size() {
        let req = ConvRequest::new(arr1(&[0, 1]), arr1(&[0, 2]), sz(&[3])).unwrap();
        let c = conv_naive(&req).unwrap();
        assert_arr(&c, &fin(&[0, 2, 3]));
        assert!(ConvRequest::new(arr1(&[0, 1]), arr1(&[0, 2]), sz(&[4])).is_err());
    }

    #[test]
    fn linearization_matches_appendix_layout() {
        let dims = [3usize, 4, 2];
        let strides = kronecker_strides(&dims);
        assert_eq!(strides, vec![1, 5, 35]);
        assert_eq!(kronecker_index(&[2, 3, 1], &strides), 52);
        let embedded = 1 + kronecker_index(&[2, 3, 1], &strides);
        assert_eq!(embedded, 53);
    }

    #[test]
    fn linearization_is_identity_in_1d() {
        let a = arr1(&[3, -1, 4]);
        let b = arr1(&[0, 2, -5]);
        let req = ConvRequest::truncated(a, b).unwrap();
        let via = conv_via_linearization(&req, conv1d_naive).unwrap();
        let naive = conv_naive(&req).unwrap();
        assert_eq!(via, naive);
    }

    #[test]
    fn linearization_matches_naive_3d() {
        let mut state = 7u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let size = sz(&[3, 4, 2]);
        for _ in 0..20 {
            let a = MDArray::from_fn(size.clone(), |_| {
                if next() % 8 == 0 {
                    ExtInt::NegInf
                } else {
                    ExtInt::Finite((next() % 19) as i64 - 9)
                }
            });
            let b = MDArray::from_fn(size.clone(), |_| ExtInt::Finite((next() % 19) as i64 - 9));
            let req = ConvRequest::truncated(a, b).unwrap();
            assert_eq!(
                conv_via_linearization(&req, conv1d_naive).unwrap(),
                conv_naive(&req).unwrap()
            );
        }
    }

    #[test]
    fn concave_conv_examples() {
        let c = conv1d_concave(&fin(&[0, 5, 3]), &fin(&[0, 4, 6]), 3).unwrap();
        assert_eq!(c, fin(&[0, 5, 9]));

        let c = conv1d_concave(&fin(&[7, 1]), &fin(&[2]), 2).unwrap();
        assert_eq!(c, fin(&[9, 3]));
    }

    #[test]
    fn concave_conv_rejects_non_concave_in_debug() {
        let r = fin(&[0, 1]);
        let a = fin(&[0, 1, 3]); // diffs 1, 2: increasing
        assert_eq!(conv1d_concave(&r, &a, 3), Err(Error::NonConcaveInput));

        let holed = vec![ExtInt::Finite(0), ExtInt::NegInf, ExtInt::Finite(0)];
        assert_eq!(conv1d_concave(&r, &holed, 3), Err(Error::NonConcaveInput));
    }

    #[test]
    fn concave_conv_with_neg_inf_ends_and_r_holes() {
        let mut state = 99u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..300 {
            let rlen = 1 + (next() % 15) as usize;
            let r: Vec<ExtInt> = (0..rlen)
                .map(|_| {
                    if next() % 4 == 0 {
                        ExtInt::NegInf
                    } else {
                        ExtInt::Finite((next() % 31) as i64 - 15)
                    }
                })
                .collect();
            let support = 1 + (next() % 10) as usize;
            let prefix = (next() % 3) as usize;
            let suffix = (next() % 3) as usize;
            let mut diffs: Vec<i64> = (0..support.saturating_sub(1))
                .map(|_| (next() % 13) as i64 - 6)
                .collect();
            diffs.sort_unstable_by(|a, b| b.cmp(a));
            let mut a = vec![ExtInt::NegInf; prefix];
            let mut v = (next() % 11) as i64 - 5;
            a.push(ExtInt::Finite(v));
            for d in diffs {
                v += d;
                a.push(ExtInt::Finite(v));
            }
            a.extend(std::iter::repeat_n(ExtInt::NegInf, suffix));
            let out_len = 1 + (next() as usize % (rlen + a.len() - 1));
            let got = conv1d_concave(&r, &a, out_len).unwrap();
            let want = conv1d_naive(&r, &a, out_len).unwrap();
            assert_eq!(got, want, "r={r:?} a={a:?} out_len={out_len}");
        }
    }

    #[test]
    fn concave_conv_all_neg_inf_a() {
        let a = vec![ExtInt::NegInf; 3];
        let got = conv1d_concave(&fin(&[1, 2]), &a, 4).unwrap();
        assert_eq!(got, vec![ExtInt::NegInf; 4]);
    }

    #[test]
    fn upper_bound_examples() {
        let a = arr1(&[0, 1]);
        assert!(upper_bound_check_naive(&a, &a, &arr1(&[0, 1])).unwrap());
        assert!(!upper_bound_check_naive(&a, &a, &arr1(&[0, 0])).unwrap());

        let b = arr1(&[0, 2, 3]);
        let c = conv_naive(&ConvRequest::truncated(arr1(&[0, 1, 5]), b.clone()).unwrap()).unwrap();
        assert!(upper_bound_check_naive(&arr1(&[0, 1, 5]), &b, &c).unwrap());
        assert!(upper_bound_check_naive(&a, &a, &arr1(&[1, 1])).unwrap());
        assert!(upper_bound_check_naive(&a, &b, &b).is_err());
    }

    #[test]
    fn overflow_is_a_checked_error() {
        let big = arr1(&[i64::MAX - 1, i64::MAX - 1]);
        let req = ConvRequest::truncated(big.clone(), big.clone()).unwrap();
        assert_eq!(conv_naive(&req), Err(Error::ArithmeticOverflow));
        // an overflowing maximizer is detected; non-winning pairs may
        // overflow silently since only the argmax is materialized
        assert_eq!(
            conv1d_concave(big.data(), &fin(&[2, 1]), 2),
            Err(Error::ArithmeticOverflow)
        );
        assert_eq!(
            conv1d_concave(big.data(), &fin(&[0, -1]), 2).unwrap(),
            fin(&[i64::MAX - 1, i64::MAX - 1])
        );
        // the decision checks compare in wide arithmetic and never overflow
        assert!(upper_bound_check_naive(&big, &big, &big).is_ok());
    }

    #[test]
    fn huge_values_stay_exact() {
        let a = arr1(&[1 << 61, -(1 << 61), 17]);
        let b = arr1(&[-3, 1 << 60, 0]);
        let req = ConvRequest::truncated(a.clone(), b.clone()).unwrap();
        let naive = conv_naive(&req).unwrap();
        assert_eq!(conv_via_linearization(&req, conv1d_naive).unwrap(), naive);
        // concave sequence with extreme magnitudes
        let c = conv1d_concave(a.data(), &fin(&[0, -(1 << 61)]), 3).unwrap();
        assert_eq!(
            c,
            conv1d_naive(a.data(), &fin(&[0, -(1 << 61)]), 3).unwrap()
        );
    }

    #[test]
    fn superadditive_examples() {
        assert!(superadditive_check_naive(&arr1(&[0, 1])));
        assert!(!superadditive_check_naive(&arr1(&[0, 1, 1])));
        assert!(!superadditive_check_naive(&arr1(&[3, 9])));
    }
}
