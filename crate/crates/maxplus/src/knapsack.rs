//! Multidimensional knapsack: instance model, brute-force and Bellman
//! oracles, and the equivalence-class solver.
//!
//! All solvers produce exact-weight solution arrays of size `t + 1`:
//! entry `v` is the best profit of a packing whose weight vector is
//! exactly `v`, with `-inf` marking unreachable weights. "Capacity"
//! (at-most) semantics are obtained afterwards with [`to_at_most`].
//!
//! The headline solver [`solve_exact_eq`] iterates over the `D` distinct
//! weight vectors and, for each, updates the running solution array along
//! the equivalence classes `{v, v+w, v+2w, ...}` with a single 1-D
//! convolution against the class's concave profit sequence.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::maxconv::conv1d_concave;
use crate::mdarray::{ExtInt, MDArray, SizeVec};

/// Multiplicity bound of an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    Finite(u64),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub weight: Vec<u64>,
    pub profit: i64,
    pub bound: Bound,
}

impl Item {
    pub fn new(weight: Vec<u64>, profit: i64, bound: Bound) -> Self {
        Item {
            weight,
            profit,
            bound,
        }
    }

    fn is_zero_weight(&self) -> bool {
        self.weight.iter().all(|&w| w == 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    ZeroOne,
    Bounded,
    Unbounded,
    ExactEq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    items: Vec<Item>,
    capacity: Vec<u64>,
    variant: Variant,
}

impl KnapsackInstance {
    pub fn new(items: Vec<Item>, capacity: Vec<u64>, variant: Variant) -> Result<Self> {
        if capacity.is_empty() {
            return Err(Error::InvalidSize("capacity must have d >= 1".into()));
        }
        for item in &items {
            if item.weight.len() != capacity.len() {
                return Err(Error::ShapeError(format!(
                    "item weight rank {} does not match capacity rank {}",
                    item.weight.len(),
                    capacity.len()
                )));
            }
            match (variant, item.bound) {
                (Variant::ZeroOne, Bound::Finite(1)) => {}
                (Variant::ZeroOne, _) => {
                    return Err(Error::PreconditionViolated(
                        "0/1 variant requires every bound = 1",
                    ))
                }
                (Variant::Unbounded, Bound::Unbounded) => {}
                (Variant::Unbounded, _) => {
                    return Err(Error::PreconditionViolated(
                        "unbounded variant requires every bound unbounded",
                    ))
                }
                (_, Bound::Finite(0)) => {
                    return Err(Error::PreconditionViolated("finite bound must be positive"))
                }
                _ => {}
            }
        }
        // capacity + 1 must form a valid array size
        let _ = Self::size_of(&capacity)?;
        Ok(KnapsackInstance {
            items,
            capacity,
            variant,
        })
    }

    fn size_of(capacity: &[u64]) -> Result<SizeVec> {
        let dims = capacity
            .iter()
            .map(|&t| {
                usize::try_from(t)
                    .ok()
                    .and_then(|t| t.checked_add(1))
                    .ok_or_else(|| Error::InvalidSize("capacity too large".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        SizeVec::new(dims)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn capacity(&self) -> &[u64] {
        &self.capacity
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn rank(&self) -> usize {
        self.capacity.len()
    }

    /// Size vector `t + 1` of the solution arrays.
    pub fn solution_size(&self) -> SizeVec {
        Self::size_of(&self.capacity).expect("validated at construction")
    }

    /// Largest weight component over all items.
    pub fn delta(&self) -> u64 {
        self.items
            .iter()
            .flat_map(|i| i.weight.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Number of distinct weight vectors.
    pub fn distinct_weight_count(&self) -> usize {
        self.items
            .iter()
            .map(|i| &i.weight)
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }

    /// Copies per item after truncating unbounded items to the largest
    /// multiplicity that fits the capacity. Zero-weight unbounded items
    /// have no geometric fit limit and are reported as `None`.
    fn effective_counts(&self) -> Vec<Option<u64>> {
        self.items
            .iter()
            .map(|item| {
                if item.is_zero_weight() {
                    return match item.bound {
                        Bound::Finite(b) => Some(b),
                        Bound::Unbounded => None,
                    };
                }
                let fit = item
                    .weight
                    .iter()
                    .zip(&self.capacity)
                    .filter(|(&w, _)| w > 0)
                    .map(|(&w, &t)| t / w)
                    .min()
                    .expect("non-zero weight");
                Some(match item.bound {
                    Bound::Finite(b) => b.min(fit),
                    Bound::Unbounded => fit,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    ExactWeight,
    AtMostWeight,
}

/// Optimal profits indexed by weight position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionArray {
    pub array: MDArray,
    pub semantics: Semantics,
}

impl SolutionArray {
    /// Best profit over all positions.
    pub fn best(&self) -> ExtInt {
        self.array
            .data()
            .iter()
            .copied()
            .max()
            .unwrap_or(ExtInt::NegInf)
    }
}

/// Profits of taking exactly `k` items of one weight class, `k = 0..`.
/// Greedy prefix sums of the profits sorted descending, so the sequence
/// starts at 0 and is concave.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfitSequence {
    values: Vec<i64>,
}

impl ProfitSequence {
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn is_concave(&self) -> bool {
        self.values
            .windows(3)
            .all(|w| (w[1] as i128 - w[0] as i128) >= (w[2] as i128 - w[1] as i128))
    }

    fn as_ext(&self) -> Vec<ExtInt> {
        self.values.iter().map(|&v| ExtInt::Finite(v)).collect()
    }
}

/// `f(k)` = sum of the `k` most profitable copies available from items of
/// one weight class, respecting multiplicity bounds, for `k <= k_max`
/// (clamped to the total multiplicity).
pub fn profit_sequence(items_of_one_weight: &[Item], k_max: u64) -> Result<ProfitSequence> {
    debug_assert!(
        items_of_one_weight
            .windows(2)
            .all(|w| w[0].weight == w[1].weight),
        "items must share one weight vector"
    );
    let mut sorted: Vec<&Item> = items_of_one_weight.iter().collect();
    sorted.sort_by_key(|item| std::cmp::Reverse(item.profit));

    let mut values = Vec::with_capacity(k_max as usize + 1);
    values.push(0i64);
    let mut acc = 0i64;
    let mut taken = 0u64;
    'outer: for item in sorted {
        let copies = match item.bound {
            Bound::Finite(b) => b,
            Bound::Unbounded => k_max.saturating_sub(taken),
        };
        for _ in 0..copies {
            if taken == k_max {
                break 'outer;
            }
            acc = acc
                .checked_add(item.profit)
                .ok_or(Error::ArithmeticOverflow)?;
            values.push(acc);
            taken += 1;
        }
    }
    let f = ProfitSequence { values };
    debug_assert!(f.is_concave());
    Ok(f)
}

const BRUTE_FORCE_BUDGET: u128 = 10_000_000;
const BELLMAN_OPS_BUDGET: u128 = 400_000_000;
const SOLUTION_ENTRIES_BUDGET: usize = 40_000_000;

/// Total profit of zero-weight items worth taking (positive profit only,
/// bounds respected). Unbounded positive-profit zero-weight items make the
/// objective diverge, reported as overflow.
fn zero_weight_offset(items: &[Item]) -> Result<i64> {
    let mut offset = 0i64;
    for item in items.iter().filter(|i| i.is_zero_weight()) {
        if item.profit <= 0 {
            continue;
        }
        match item.bound {
            Bound::Unbounded => return Err(Error::ArithmeticOverflow),
            Bound::Finite(b) => {
                let gain = i64::try_from(b)
                    .ok()
                    .and_then(|b| item.profit.checked_mul(b))
                    .ok_or(Error::ArithmeticOverflow)?;
                offset = offset.checked_add(gain).ok_or(Error::ArithmeticOverflow)?;
            }
        }
    }
    Ok(offset)
}

fn apply_offset(data: &mut [ExtInt], offset: i64) -> Result<()> {
    if offset == 0 {
        return Ok(());
    }
    for e in data.iter_mut() {
        *e = e.checked_add_const(offset)?;
    }
    Ok(())
}

fn descend(
    items: &[(&Item, u64)],
    dims: &[usize],
    strides: &[usize],
    depth: usize,
    weight: &mut [u64],
    profit: i64,
    best: &mut [ExtInt],
) -> Result<()> {
    if depth == items.len() {
        let mut idx = 0usize;
        for (i, &w) in weight.iter().enumerate() {
            idx += (w as usize) * strides[i];
        }
        if best[idx] < ExtInt::Finite(profit) {
            best[idx] = ExtInt::Finite(profit);
        }
        return Ok(());
    }
    let (item, count) = items[depth];
    let mut copies = 0u64;
    let mut cur_profit = profit;
    loop {
        descend(items, dims, strides, depth + 1, weight, cur_profit, best)?;
        if copies == count {
            break;
        }
        let fits = item
            .weight
            .iter()
            .enumerate()
            .all(|(i, &w)| weight[i] + w < dims[i] as u64);
        if !fits {
            break;
        }
        for (i, &w) in item.weight.iter().enumerate() {
            weight[i] += w;
        }
        copies += 1;
        cur_profit = cur_profit
            .checked_add(item.profit)
            .ok_or(Error::ArithmeticOverflow)?;
    }
    for (i, &w) in item.weight.iter().enumerate() {
        weight[i] -= w * copies;
    }
    Ok(())
}

/// Exhaustive oracle: enumerates every multiplicity vector within the
/// (capacity-truncated) bounds and records the best profit per exact
/// weight. Kept independent of the production solvers.
pub fn brute_force(inst: &KnapsackInstance) -> Result<SolutionArray> {
    let size = inst.solution_size();
    let counts = inst.effective_counts();

    let mut nonzero: Vec<(&Item, u64)> = Vec::new();
    let mut offset = 0i64;
    for (item, count) in inst.items().iter().zip(&counts) {
        if item.is_zero_weight() {
            if item.profit > 0 {
                match count {
                    None => return Err(Error::ArithmeticOverflow),
                    Some(b) => {
                        let gain = i64::try_from(*b)
                            .ok()
                            .and_then(|b| item.profit.checked_mul(b))
                            .ok_or(Error::ArithmeticOverflow)?;
                        offset = offset.checked_add(gain).ok_or(Error::ArithmeticOverflow)?;
                    }
                }
            }
        } else {
            nonzero.push((item, count.expect("non-zero weight has a fit count")));
        }
    }

    let mut combos: u128 = 1;
    for (_, c) in &nonzero {
        combos = combos.saturating_mul(*c as u128 + 1);
        if combos > BRUTE_FORCE_BUDGET {
            return Err(Error::InstanceTooLarge(format!(
                "brute force would enumerate more than {BRUTE_FORCE_BUDGET} combinations"
            )));
        }
    }

    let strides = size.strides();
    let dims = size.dims().to_vec();
    let mut best = vec![ExtInt::NegInf; size.count()];
    let mut weight = vec![0u64; inst.rank()];
    descend(&nonzero, &dims, &strides, 0, &mut weight, 0, &mut best)?;

    apply_offset(&mut best, offset)?;
    Ok(SolutionArray {
        array: MDArray::from_vec(size, best)?,
        semantics: Semantics::ExactWeight,
    })
}

/// Classic per-item dynamic program, the textbook baseline.
pub fn bellman_dp(inst: &KnapsackInstance) -> Result<SolutionArray> {
    let size = inst.solution_size();
    if size.count() > SOLUTION_ENTRIES_BUDGET {
        return Err(Error::InstanceTooLarge(
            "solution array exceeds the memory budget".into(),
        ));
    }
    let counts = inst.effective_counts();
    let offset = zero_weight_offset(inst.items())?;

    let mut passes: u128 = 0;
    for (item, count) in inst.items().iter().zip(&counts) {
        if item.is_zero_weight() {
            continue;
        }
        passes += match item.bound {
            Bound::Unbounded => 1,
            Bound::Finite(_) => count.unwrap() as u128,
        };
    }
    if passes.saturating_mul(size.count() as u128) > BELLMAN_OPS_BUDGET {
        return Err(Error::InstanceTooLarge(
            "Bellman DP exceeds the operation budget".into(),
        ));
    }

    let strides = size.strides();
    let dims = size.dims().to_vec();
    let mut dp = vec![ExtInt::NegInf; size.count()];
    dp[0] = ExtInt::Finite(0);

    for (item, count) in inst.items().iter().zip(&counts) {
        if item.is_zero_weight() {
            continue;
        }
        let step: usize = item
            .weight
            .iter()
            .zip(&strides)
            .map(|(&w, &s)| w as usize * s)
            .sum();
        // positions where subtracting the weight stays inside the box
        let valid = |idx: usize| {
            item.weight
                .iter()
                .enumerate()
                .all(|(i, &w)| (idx / strides[i]) % dims[i] >= w as usize)
        };
        match item.bound {
            Bound::Unbounded => {
                for idx in 0..dp.len() {
                    if valid(idx) {
                        let cand = dp[idx - step].checked_add_const(item.profit)?;
                        if dp[idx] < cand {
                            dp[idx] = cand;
                        }
                    }
                }
            }
            Bound::Finite(_) => {
                for _ in 0..count.unwrap() {
                    for idx in (0..dp.len()).rev() {
                        if valid(idx) {
                            let cand = dp[idx - step].checked_add_const(item.profit)?;
                            if dp[idx] < cand {
                                dp[idx] = cand;
                            }
                        }
                    }
                }
            }
        }
    }

    apply_offset(&mut dp, offset)?;
    Ok(SolutionArray {
        array: MDArray::from_vec(size, dp)?,
        semantics: Semantics::ExactWeight,
    })
}

/// Equivalence-class solver: one concave 1-D convolution per class and
/// distinct weight vector.
pub fn solve_exact_eq(inst: &KnapsackInstance) -> Result<SolutionArray> {
    let size = inst.solution_size();
    if size.count() > SOLUTION_ENTRIES_BUDGET {
        return Err(Error::InstanceTooLarge(
            "solution array exceeds the memory budget".into(),
        ));
    }
    let offset = zero_weight_offset(inst.items())?;

    let mut classes: BTreeMap<&[u64], Vec<&Item>> = BTreeMap::new();
    for item in inst.items() {
        if !item.is_zero_weight() {
            classes.entry(&item.weight).or_default().push(item);
        }
    }

    let strides = size.strides();
    let dims = size.dims().to_vec();
    let mut dp = vec![ExtInt::NegInf; size.count()];
    dp[0] = ExtInt::Finite(0);

    for (weight, members) in classes {
        let max_chain: u64 = weight
            .iter()
            .zip(&dims)
            .filter(|(&w, _)| w > 0)
            .map(|(&w, &d)| (d as u64 - 1) / w)
            .min()
            .expect("non-zero weight");
        let total: Option<u64> = members.iter().try_fold(0u64, |acc, it| match it.bound {
            Bound::Finite(b) => Some(acc.saturating_add(b)),
            Bound::Unbounded => None,
        });
        let k_max = match total {
            Some(t) => max_chain.min(t),
            None => max_chain,
        };
        let owned: Vec<Item> = members.iter().map(|&i| i.clone()).collect();
        let f = profit_sequence(&owned, k_max)?;
        let fe = f.as_ext();

        let step: usize = weight
            .iter()
            .zip(&strides)
            .map(|(&w, &s)| w as usize * s)
            .sum();

        let mut visited = 0usize;
        let mut chain: Vec<ExtInt> = Vec::new();
        for start in 0..dp.len() {
            // class representative: stepping back by w leaves the box
            let is_rep = weight
                .iter()
                .enumerate()
                .any(|(i, &w)| w > 0 && (start / strides[i]) % dims[i] < w as usize);
            if !is_rep {
                continue;
            }
            let chain_len = 1 + weight
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0)
                .map(|(i, &w)| {
                    let c = (start / strides[i]) % dims[i];
                    (dims[i] - 1 - c) as u64 / w
                })
                .min()
                .expect("non-zero weight") as usize;

            chain.clear();
            let mut idx = start;
            for _ in 0..chain_len {
                chain.push(dp[idx]);
                idx += step;
            }
            let alen = fe.len().min(chain_len);
            let conv = conv1d_concave(&chain, &fe[..alen], chain_len)?;
            let mut idx = start;
            for value in conv {
                dp[idx] = value;
                idx += step;
            }
            visited += chain_len;
        }
        debug_assert_eq!(visited, dp.len(), "classes must partition the positions");
    }

    apply_offset(&mut dp, offset)?;
    Ok(SolutionArray {
        array: MDArray::from_vec(size, dp)?,
        semantics: Semantics::ExactWeight,
    })
}

/// Exact-weight to at-most-weight: d sequential prefix-max sweeps.
pub fn to_at_most(sol: &SolutionArray) -> SolutionArray {
    let size = sol.array.size().clone();
    let strides = size.strides();
    let dims = size.dims().to_vec();
    let mut data = sol.array.data().to_vec();
    for (i, &stride) in strides.iter().enumerate() {
        for idx in 0..data.len() {
            if (idx / stride) % dims[i] >= 1 && data[idx] < data[idx - stride] {
                data[idx] = data[idx - stride];
            }
        }
    }
    SolutionArray {
        array: MDArray::from_vec(size, data).expect("same shape"),
        semantics: Semantics::AtMostWeight,
    }
}
