//! Constructive reductions between the convolution and knapsack problem
//! families, plus the randomized color-coding solver built on them.
//!
//! Everything here is judged against the naive checks in [`crate::maxconv`]
//! and the exhaustive oracles in [`crate::knapsack`]: the reductions are
//! value-preserving constructions, not proofs. The randomized operations
//! take an explicit [`Rng`]; a fixed seed reproduces the exact trace.

use std::collections::BTreeMap;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::knapsack::{
    to_at_most, Bound, Item, KnapsackInstance, Semantics, SolutionArray, Variant,
};
use crate::maxconv::{conv_naive, ConvRequest, UpperBoundOracle};
use crate::mdarray::{linear_index, ExtInt, MDArray, MDArrayBuilder, Position, SizeVec};

/// Deterministic seeded random generator; identical seeds give identical
/// algorithm traces. Draws come straight from the raw 64-bit stream so
/// outputs do not depend on distribution helpers.
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn from_seed(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Draw in `[0, n)`; modulo bias is irrelevant at these ranges.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    /// Draw in `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// The unbounded knapsack instance produced by [`superadd_to_knapsack`]
/// together with the target profit: the optimum at capacity `2L` equals
/// `threshold` exactly when the source array is superadditive.
#[derive(Debug, Clone)]
pub struct PrimalDualInstance {
    pub instance: KnapsackInstance,
    pub threshold: i64,
}

/// Partition of items into layers `L_j^i`; the level `j` is minimal over
/// the dimensions, ties broken by the smallest dimension.
#[derive(Debug, Clone)]
pub struct LayerPartition {
    /// highest level index
    pub max_level: u32,
    layers: BTreeMap<(usize, u32), Vec<usize>>,
    /// items heavier than the capacity in every dimension; they can never
    /// be packed and carry no layer interval
    pub unplaceable: Vec<usize>,
}

impl LayerPartition {
    pub fn layers(&self) -> impl Iterator<Item = (&(usize, u32), &Vec<usize>)> {
        self.layers.iter()
    }

    pub fn get(&self, dim: usize, level: u32) -> &[usize] {
        self.layers
            .get(&(dim, level))
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn assigned_count(&self) -> usize {
        self.layers.values().map(|v| v.len()).sum()
    }
}

fn checked_mul_i64(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::ArithmeticOverflow)
}

fn checked_add_i64(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::ArithmeticOverflow)
}

/// Rewrites a bounded or unbounded instance as a 0/1 instance with equal
/// optima for every capacity `<= t`, by binary-encoding multiplicities.
/// Copies that cannot fit the capacity in some dimension are dropped.
pub fn bounded_to_zero_one(inst: &KnapsackInstance) -> Result<KnapsackInstance> {
    let t = inst.capacity();
    let mut items = Vec::new();
    let mut push_copy = |weight: &[u64], profit: i64, mult: u64| -> Result<()> {
        let mut w = Vec::with_capacity(weight.len());
        for (&wi, &ti) in weight.iter().zip(t) {
            let scaled = wi.checked_mul(mult).ok_or(Error::ArithmeticOverflow)?;
            if scaled > ti {
                return Ok(()); // cannot fit, irrelevant for any capacity <= t
            }
            w.push(scaled);
        }
        let mult_i = i64::try_from(mult).map_err(|_| Error::ArithmeticOverflow)?;
        items.push(Item::new(
            w,
            checked_mul_i64(profit, mult_i)?,
            Bound::Finite(1),
        ));
        Ok(())
    };

    for item in inst.items() {
        match item.bound {
            Bound::Unbounded => {
                if item.weight.iter().all(|&w| w == 0) {
                    if item.profit > 0 {
                        return Err(Error::ArithmeticOverflow);
                    }
                    continue; // never worth taking
                }
                let mut mult = 1u64;
                loop {
                    let fits = item
                        .weight
                        .iter()
                        .zip(t)
                        .all(|(&w, &ti)| w.checked_mul(mult).is_some_and(|s| s <= ti));
                    if !fits {
                        break;
                    }
                    push_copy(&item.weight, item.profit, mult)?;
                    mult = match mult.checked_mul(2) {
                        Some(m) => m,
                        None => break,
                    };
                }
            }
            Bound::Finite(bound) => {
                // multiplicities 1, 2, 4, ..., remainder cover [0, bound]
                let mut chunk = 1u64;
                let mut rem = bound;
                while rem > 0 {
                    let mult = chunk.min(rem);
                    push_copy(&item.weight, item.profit, mult)?;
                    rem -= mult;
                    chunk = chunk.saturating_mul(2);
                }
            }
        }
    }
    KnapsackInstance::new(items, t.to_vec(), Variant::ZeroOne)
}

/// Rewrites a finite array into a non-negative monotone increasing one with
/// the same superadditivity verdict: `A'_0 = max(0, A_0)` and
/// `A'_v = A_v + c*|v|_1` with `c = 2*max|A| + 1` elsewhere.
pub fn monotonize(a: &MDArray) -> Result<MDArray> {
    if !a.all_finite() {
        return Err(Error::PreconditionViolated(
            "monotonize requires a finite array",
        ));
    }
    let c = checked_add_i64(checked_mul_i64(a.max_abs_finite(), 2)?, 1)?;
    let size = a.size().clone();
    let mut out = Vec::with_capacity(size.count());
    for (pos, &e) in size.positions().zip(a.data()) {
        let v = e.finite().expect("finite checked above");
        let norm1: i64 = pos.iter().map(|&p| p as i64).sum();
        if norm1 == 0 {
            out.push(ExtInt::Finite(v.max(0)));
        } else {
            out.push(ExtInt::Finite(checked_add_i64(
                v,
                checked_mul_i64(c, norm1)?,
            )?));
        }
    }
    MDArray::from_vec(size, out)
}

/// Builds the primal/dual unbounded knapsack instance for a non-negative
/// monotone increasing array: one primal item per nonzero position `v`
/// (weight `v`, profit `A_v`) and one dual item per position (weight
/// `2L - v`, profit `threshold - A_v`), capacity `2L`.
///
/// The threshold is `2*|L|_1*max(A) + 1`: capacity `2L` admits up to
/// `|2L|_1` unit-weight primal items, so a primal-only packing stays
/// strictly below it.
pub fn superadd_to_knapsack(a: &MDArray) -> Result<PrimalDualInstance> {
    debug_assert!(a.all_finite() && a.monotone_increasing());
    debug_assert!(a.min_finite().unwrap_or(0) >= 0);
    let size = a.size();
    let norm1: i64 = size.dims().iter().map(|&l| l as i64).sum();
    let max_a = a.max_finite().unwrap_or(0);
    let threshold = checked_add_i64(checked_mul_i64(2, checked_mul_i64(norm1, max_a)?)?, 1)?;

    let capacity: Vec<u64> = size.dims().iter().map(|&l| 2 * l as u64).collect();
    let mut items = Vec::new();
    for (pos, &e) in size.positions().zip(a.data()) {
        let av = e.finite().expect("finite by precondition");
        if pos.iter().any(|&p| p > 0) {
            items.push(Item::new(
                pos.iter().map(|&p| p as u64).collect(),
                av,
                Bound::Unbounded,
            ));
        }
        let dual_w: Vec<u64> = pos
            .iter()
            .zip(&capacity)
            .map(|(&p, &cap)| cap - p as u64)
            .collect();
        items.push(Item::new(
            dual_w,
            checked_add_i64(threshold, -av)?,
            Bound::Unbounded,
        ));
    }
    Ok(PrimalDualInstance {
        instance: KnapsackInstance::new(items, capacity, Variant::Unbounded)?,
        threshold,
    })
}

/// Full superadditivity decision through the knapsack reduction: rejects
/// `A_0 > 0` up front, monotonizes, builds the primal/dual instance and
/// compares the optimum of the supplied solver against the threshold.
pub fn superadditive_via_knapsack<F>(a: &MDArray, solver: F) -> Result<bool>
where
    F: Fn(&KnapsackInstance) -> Result<SolutionArray>,
{
    if a.get_linear(0).finite().is_some_and(|v| v > 0) {
        return Ok(false);
    }
    let mono = monotonize(a)?;
    let pd = superadd_to_knapsack(&mono)?;
    let sol = solver(&pd.instance)?;
    let best = sol.best();
    debug_assert!(best >= ExtInt::Finite(pd.threshold));
    Ok(best == ExtInt::Finite(pd.threshold))
}

/// Builds the block array `M` of size `(4*L_1, L_2, ..., L_d)` whose
/// superadditivity decides the upper-bound question: block 0 holds 0 at
/// the origin and `-10K` elsewhere, blocks 1..3 hold `K+A`, `4K+B`, `5K+C`
/// at offsets `L_1`, `2*L_1`, `3*L_1` along dimension 1, with
/// `K = 1 + 2*max|entries|`.
pub fn upperbound_to_superadd(a: &MDArray, b: &MDArray, c: &MDArray) -> Result<MDArray> {
    if a.size() != b.size() || a.size() != c.size() {
        return Err(Error::ShapeError(
            "block-array reduction requires equal sizes".into(),
        ));
    }
    if !(a.all_finite() && b.all_finite() && c.all_finite()) {
        return Err(Error::PreconditionViolated(
            "block-array reduction requires finite arrays",
        ));
    }
    let max_abs = a
        .max_abs_finite()
        .max(b.max_abs_finite())
        .max(c.max_abs_finite());
    let k = checked_add_i64(checked_mul_i64(2, max_abs)?, 1)?;

    let l1 = a.size().dims()[0];
    let mut out_dims = a.size().dims().to_vec();
    out_dims[0] = 4 * l1;
    let out_size = SizeVec::new(out_dims)?;

    let mut builder = MDArrayBuilder::new(out_size.clone());
    for pos in out_size.positions() {
        let value = if pos[0] < l1 {
            if pos.iter().all(|&p| p == 0) {
                0
            } else {
                checked_mul_i64(-10, k)?
            }
        } else {
            let block = pos[0] / l1;
            let mut inner = pos.clone();
            inner[0] = pos[0] % l1;
            let (src, offset) = match block {
                1 => (a, k),
                2 => (b, checked_mul_i64(4, k)?),
                3 => (c, checked_mul_i64(5, k)?),
                _ => unreachable!("positions below 4*L_1"),
            };
            checked_add_i64(src.get(&inner)?.finite().expect("finite"), offset)?
        };
        builder.set(&pos, ExtInt::Finite(value))?;
    }
    Ok(builder.build())
}

fn prefix_slice(arr: &MDArray, dim: usize, len: usize) -> MDArray {
    let mut dims = arr.size().dims().to_vec();
    dims[dim] = len;
    let size = SizeVec::new(dims).expect("positive prefix");
    MDArray::from_fn(size, |pos| arr.get(pos).expect("prefix position valid"))
}

/// Finds some position `v` with `C_v < (A (+) B)_v` or reports that none
/// exists, making `O(d log L_max)` oracle calls. Inputs are not mutated;
/// the per-dimension pinning writes a large sentinel into a working copy
/// of `C`.
pub fn find_violating_position<O>(
    a: &MDArray,
    b: &MDArray,
    c: &MDArray,
    oracle: &O,
) -> Result<Option<Position>>
where
    O: UpperBoundOracle + ?Sized,
{
    if a.size() != b.size() || a.size() != c.size() {
        return Err(Error::ShapeError(
            "violation search requires equal sizes".into(),
        ));
    }
    if oracle.upper_bound_holds(a, b, c)? {
        return Ok(None);
    }
    let (Some(amax), Some(bmax)) = (a.max_finite(), b.max_finite()) else {
        // an all -inf operand cannot violate any bound
        return Ok(None);
    };
    // dominates every possible pair sum
    let sentinel = checked_add_i64(checked_add_i64(amax, bmax)?, 1)?;

    let size = a.size().clone();
    let mut pinned_c = c.clone();
    let mut found = Vec::with_capacity(size.rank());
    for dim in 0..size.rank() {
        // invariant: the full-length test fails; the empty prefix passes
        let mut lo = 0usize;
        let mut hi = size.dims()[dim];
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let ok = oracle.upper_bound_holds(
                &prefix_slice(a, dim, mid),
                &prefix_slice(b, dim, mid),
                &prefix_slice(&pinned_c, dim, mid),
            )?;
            if ok {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let coord = hi - 1;
        found.push(coord);

        if dim + 1 < size.rank() {
            let strides = size.strides();
            let dlen = size.dims()[dim];
            let mut data = pinned_c.data().to_vec();
            for (idx, e) in data.iter_mut().enumerate() {
                if (idx / strides[dim]) % dlen != coord {
                    *e = ExtInt::Finite(sentinel);
                }
            }
            pinned_c = MDArray::from_vec(size.clone(), data)?;
        }
    }
    debug_assert!(size.contains(&found));
    Ok(Some(found))
}

/// Computes `A (+) B` using only an upper-bound oracle: shifts both inputs
/// non-negative, then runs one parallel binary search per position over
/// `[0, K]` with `K = max(A') + max(B')`, testing chunk pairs of roughly
/// `sqrt(prod(L))` entries padded with `-K` dummies to a uniform size.
pub fn conv_via_upperbound_oracle<O>(a: &MDArray, b: &MDArray, oracle: &O) -> Result<MDArray>
where
    O: UpperBoundOracle + ?Sized,
{
    if a.size() != b.size() {
        return Err(Error::ShapeError(
            "oracle convolution requires equal sizes".into(),
        ));
    }
    if !(a.all_finite() && b.all_finite()) {
        return Err(Error::PreconditionViolated(
            "oracle convolution requires finite arrays",
        ));
    }
    let size = a.size().clone();
    let shift_a = a.min_finite().unwrap_or(0).min(0);
    let shift_b = b.min_finite().unwrap_or(0).min(0);
    let a_pos = a.shifted(-shift_a)?;
    let b_pos = b.shifted(-shift_b)?;
    let k = checked_add_i64(
        a_pos.max_finite().unwrap_or(0),
        b_pos.max_finite().unwrap_or(0),
    )?;

    // chunk grid with about sqrt(L_i) entries per dimension
    let chunk_dims: Vec<usize> = size
        .dims()
        .iter()
        .map(|&l| {
            let mut s = l.isqrt();
            if s * s < l {
                s += 1;
            }
            s.max(1)
        })
        .collect();
    let chunk_counts: Vec<usize> = size
        .dims()
        .iter()
        .zip(&chunk_dims)
        .map(|(&l, &s)| l.div_ceil(s))
        .collect();
    let window_size = SizeVec::new(chunk_dims.iter().map(|&s| 2 * s - 1).collect())?;

    let chunk_offsets: Vec<Vec<usize>> = SizeVec::new(chunk_counts)?
        .positions()
        .map(|p| p.iter().zip(&chunk_dims).map(|(&c, &s)| c * s).collect())
        .collect();

    // operand chunks stay fixed across binary-search rounds
    let operand_chunk = |arr: &MDArray, offset: &[usize]| -> MDArray {
        MDArray::from_fn(window_size.clone(), |rel| {
            let abs: Vec<usize> = rel.iter().zip(offset).map(|(&r, &o)| r + o).collect();
            let in_data = rel.iter().zip(&chunk_dims).all(|(&r, &s)| r < s) && size.contains(&abs);
            if in_data {
                arr.get(&abs).expect("validated")
            } else {
                ExtInt::Finite(-k)
            }
        })
    };
    let a_chunks: Vec<MDArray> = chunk_offsets
        .iter()
        .map(|o| operand_chunk(&a_pos, o))
        .collect();
    let b_chunks: Vec<MDArray> = chunk_offsets
        .iter()
        .map(|o| operand_chunk(&b_pos, o))
        .collect();

    let n = size.count();
    let mut lo = vec![0i64; n];
    let mut hi = vec![k; n];
    let mut rounds = 0usize;
    while lo.iter().zip(&hi).any(|(l, h)| l < h) {
        rounds += 1;
        assert!(rounds <= 66, "binary search must finish in log(K) rounds");
        let guess: Vec<i64> = lo.iter().zip(&hi).map(|(&l, &h)| l + (h - l) / 2).collect();
        let mut too_low = vec![false; n];

        for (ai, a_off) in chunk_offsets.iter().enumerate() {
            for (bi, b_off) in chunk_offsets.iter().enumerate() {
                let base: Vec<usize> = a_off.iter().zip(b_off).map(|(&x, &y)| x + y).collect();
                let mut window = MDArray::from_fn(window_size.clone(), |rel| {
                    let abs: Vec<usize> = rel.iter().zip(&base).map(|(&r, &o)| r + o).collect();
                    if size.contains(&abs) {
                        ExtInt::Finite(guess[linear_index(&abs, &size).expect("valid")])
                    } else {
                        // outside the real arrays nothing may be flagged
                        ExtInt::Finite(k)
                    }
                });
                while let Some(rel) =
                    find_violating_position(&a_chunks[ai], &b_chunks[bi], &window, oracle)?
                {
                    let abs: Vec<usize> = rel.iter().zip(&base).map(|(&r, &o)| r + o).collect();
                    debug_assert!(size.contains(&abs), "violations only at real positions");
                    too_low[linear_index(&abs, &size)?] = true;
                    let mut data = window.data().to_vec();
                    data[linear_index(&rel, &window_size)?] = ExtInt::Finite(k);
                    window = MDArray::from_vec(window_size.clone(), data)?;
                }
            }
        }

        for v in 0..n {
            if lo[v] < hi[v] {
                if too_low[v] {
                    lo[v] = guess[v] + 1;
                } else {
                    hi[v] = guess[v];
                }
            }
        }
    }

    let unshift = checked_add_i64(shift_a, shift_b)?;
    let data = lo
        .into_iter()
        .map(|v| checked_add_i64(v, unshift).map(ExtInt::Finite))
        .collect::<Result<Vec<_>>>()?;
    MDArray::from_vec(size, data)
}

fn ceil_log2_ratio(l: u64, delta: f64) -> u64 {
    // ceil(log2(l / delta)) for l >= 1, 0 < delta < 1
    ((l as f64 / delta).log2().ceil()) as u64
}

fn zero_solution(t: &[u64]) -> Result<SolutionArray> {
    let size = SizeVec::new(t.iter().map(|&x| x as usize + 1).collect())?;
    Ok(SolutionArray {
        array: MDArray::filled(size, ExtInt::Finite(0)),
        semantics: Semantics::AtMostWeight,
    })
}

/// Color coding over 0/1 items: `ceil(log_{4/3}(1/delta))` rounds, each
/// distributing the items over `k^2` single-item arrays and convolving
/// them truncated at `t + 1`; the positionwise best over all rounds is
/// returned with at-most semantics.
///
/// Soundness is deterministic: every finite entry is achieved by a real
/// subset of the items. For any fixed `Y` with `|Y| <= k`, the result
/// covers all of `Y`'s optima with probability at least `1 - delta`.
pub fn color_coding(
    items: &[Item],
    t: &[u64],
    k: u64,
    delta: f64,
    rng: &mut Rng,
) -> Result<SolutionArray> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::PreconditionViolated("delta must lie in (0, 1)"));
    }
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 1"));
    }
    let size = SizeVec::new(t.iter().map(|&x| x as usize + 1).collect())?;
    let rounds = ((1.0 / delta).ln() / (4.0f64 / 3.0).ln()).ceil().max(1.0) as u32;
    let buckets = (k as usize).saturating_mul(k as usize);

    let mut best = MDArray::neg_inf(size.clone());
    for _ in 0..rounds {
        let mut groups: Vec<Vec<&Item>> = vec![Vec::new(); buckets];
        for item in items {
            groups[rng.below(buckets as u64) as usize].push(item);
        }

        let mut acc_builder = MDArrayBuilder::new(size.clone());
        acc_builder.set_linear(0, ExtInt::Finite(0));
        let mut acc = acc_builder.build();

        for group in groups.iter().filter(|g| !g.is_empty()) {
            let mut z = MDArrayBuilder::new(size.clone());
            z.set_linear(0, ExtInt::Finite(0));
            for item in group {
                if item.weight.iter().zip(t).any(|(&w, &cap)| w > cap) {
                    continue; // can never be packed
                }
                let pos: Vec<usize> = item.weight.iter().map(|&w| w as usize).collect();
                let idx = linear_index(&pos, &size)?;
                if z.get_linear(idx) < ExtInt::Finite(item.profit) {
                    z.set_linear(idx, ExtInt::Finite(item.profit));
                }
            }
            // the origin is the best of "take nothing" and a zero-weight item
            if z.get_linear(0) < ExtInt::Finite(0) {
                z.set_linear(0, ExtInt::Finite(0));
            }
            acc = conv_naive(&ConvRequest::new(acc, z.build(), size.clone())?)?;
        }

        let merged: Vec<ExtInt> = best
            .data()
            .iter()
            .zip(acc.data())
            .map(|(&x, &y)| x.max(y))
            .collect();
        best = MDArray::from_vec(size.clone(), merged)?;
    }

    Ok(to_at_most(&SolutionArray {
        array: best,
        semantics: Semantics::ExactWeight,
    }))
}

/// Assigns each item to the layer `L_j^i` with minimal level `j`, ties
/// broken by the smallest dimension. Levels run `1..=max(1, ceil(log2 n))`;
/// level `j` below the last holds weights with `w_i in (t_i/2^j,
/// t_i/2^(j-1)]`, the last level everything smaller.
pub fn partition_layers(items: &[Item], t: &[u64]) -> LayerPartition {
    let n = items.len() as u64;
    let max_level = if n <= 1 {
        1
    } else {
        (64 - (n - 1).leading_zeros()).max(1) // ceil(log2 n)
    };

    let level_of = |w: u64, cap: u64| -> Option<u32> {
        if w > cap {
            return None;
        }
        if (w as u128) << (max_level - 1) <= cap as u128 {
            return Some(max_level);
        }
        let mut j = 1u32;
        while (w as u128) << j <= cap as u128 {
            j += 1;
        }
        Some(j)
    };

    let mut layers: BTreeMap<(usize, u32), Vec<usize>> = BTreeMap::new();
    let mut unplaceable = Vec::new();
    for (idx, item) in items.iter().enumerate() {
        let mut best: Option<(u32, usize)> = None;
        for (dim, (&w, &cap)) in item.weight.iter().zip(t).enumerate() {
            if let Some(j) = level_of(w, cap) {
                if best.is_none_or(|(bj, _)| j < bj) {
                    best = Some((j, dim));
                }
            }
        }
        match best {
            Some((j, dim)) => layers.entry((dim, j)).or_default().push(idx),
            None => unplaceable.push(idx),
        }
    }
    LayerPartition {
        max_level,
        layers,
        unplaceable,
    }
}

fn conv_at_most(a: &SolutionArray, b: &SolutionArray, t: &[u64]) -> Result<SolutionArray> {
    let out_dims: Vec<usize> = a
        .array
        .size()
        .dims()
        .iter()
        .zip(b.array.size().dims())
        .zip(t)
        .map(|((&sa, &sb), &cap)| (sa + sb - 1).min(cap as usize + 1))
        .collect();
    let req = ConvRequest::new(a.array.clone(), b.array.clone(), SizeVec::new(out_dims)?)?;
    Ok(SolutionArray {
        array: conv_naive(&req)?,
        semantics: Semantics::AtMostWeight,
    })
}

/// Clamp-embeds an at-most array into the full `t + 1` box. Positions past
/// the covered region take the value of the componentwise-clamped corner,
/// which is exact for monotone at-most arrays.
fn embed_at_most(sol: &SolutionArray, t: &[u64]) -> Result<SolutionArray> {
    let target = SizeVec::new(t.iter().map(|&x| x as usize + 1).collect())?;
    if sol.array.size() == &target {
        return Ok(sol.clone());
    }
    let src_dims = sol.array.size().dims().to_vec();
    let arr = MDArray::from_fn(target, |pos| {
        let clamped: Vec<usize> = pos
            .iter()
            .zip(&src_dims)
            .map(|(&p, &s)| p.min(s - 1))
            .collect();
        sol.array.get(&clamped).expect("clamped position valid")
    });
    Ok(SolutionArray {
        array: arr,
        semantics: Semantics::AtMostWeight,
    })
}

/// Solves one layer per the color-coding recursion: small layers go to
/// [`color_coding`] directly, larger ones are split into `m` random groups
/// that are color-coded at capacity `ceil((2*gamma/l) * t)` and combined
/// by a binary tree of truncated convolutions with doubling capacities.
pub fn solve_layer(
    layer_items: &[Item],
    t: &[u64],
    level: u32,
    delta: f64,
    rng: &mut Rng,
) -> Result<SolutionArray> {
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(Error::PreconditionViolated("delta must lie in (0, 1/4]"));
    }
    if layer_items.is_empty() {
        return zero_solution(t);
    }
    let l: u64 = 1u64 << level;
    let log_ld = ceil_log2_ratio(l, delta).max(1);
    if l < log_ld {
        return color_coding(layer_items, t, l, delta, rng);
    }
    let gamma = 6 * log_ld;
    let m = ((l as f64 / log_ld as f64).ceil() as u64)
        .next_power_of_two()
        .max(1);

    let cap: Vec<u64> = t
        .iter()
        .map(|&ti| {
            let scaled = ((2 * gamma) as u128 * ti as u128).div_ceil(l as u128) as u64;
            scaled.min(ti)
        })
        .collect();

    let mut groups: Vec<Vec<Item>> = vec![Vec::new(); m as usize];
    for item in layer_items {
        groups[rng.below(m) as usize].push(item.clone());
    }

    let sub_delta = delta / l as f64;
    let mut arrays: Vec<SolutionArray> = Vec::with_capacity(m as usize);
    for group in &groups {
        arrays.push(color_coding(group, &cap, gamma, sub_delta, rng)?);
    }

    while arrays.len() > 1 {
        let mut next = Vec::with_capacity(arrays.len() / 2);
        for pair in arrays.chunks(2) {
            next.push(conv_at_most(&pair[0], &pair[1], t)?);
        }
        arrays = next;
    }
    embed_at_most(&arrays.pop().expect("at least one group"), t)
}

/// Solves a 0/1 instance for all capacities at once through layer
/// partitioning, per-layer color coding, and a final chain of truncated
/// convolutions. Each position of the result equals the brute-force
/// at-most optimum with probability at least `1 - delta` and never
/// exceeds it.
pub fn knapsack_via_conv(
    inst: &KnapsackInstance,
    delta: f64,
    rng: &mut Rng,
) -> Result<SolutionArray> {
    if inst.variant() != Variant::ZeroOne {
        return Err(Error::PreconditionViolated(
            "the convolution reduction expects a 0/1 instance",
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::PreconditionViolated("delta must lie in (0, 1)"));
    }
    let t = inst.capacity();
    let n = inst.items().len() as u64;
    if n == 0 {
        return zero_solution(t);
    }
    let layer_count = if n <= 1 {
        1
    } else {
        (64 - (n - 1).leading_zeros()) as u64
    };
    let sub_delta = (delta / layer_count as f64).min(0.25);

    let partition = partition_layers(inst.items(), t);
    let mut acc = zero_solution(t)?;
    for (&(_dim, level), indices) in partition.layers() {
        let layer: Vec<Item> = indices.iter().map(|&i| inst.items()[i].clone()).collect();
        let solved = solve_layer(&layer, t, level, sub_delta, rng)?;
        acc = conv_at_most(&acc, &solved, t)?;
    }
    embed_at_most(&acc, t)
}
