//! Bounded integer linear programs: `max c.x`, `A x = b`, `l <= x <= u`.
//!
//! Three solvers share one instance model. [`brute_force_ilp`] enumerates
//! the whole box and is the oracle. [`solve_proximity`] rounds an exact
//! LP-relaxation optimum and searches the residual box allowed by the
//! proximity bound, with one concave 1-D convolution per equivalence
//! class and distinct column. [`solve_divide_conquer`] halves the upper
//! bounds and extracts the optimum as a longest path in the layered
//! halving graph (with value-doubling edges between layers).
//!
//! Lower bounds are normalized away at construction (`b - A l`, `u - l`);
//! witnesses are translated back so every reported `x` lives in the
//! original variable space.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::maxconv::conv1d_concave;
use crate::mdarray::{ExtInt, SizeVec};
use crate::simplex::{solve_standard, SimplexStatus, StandardLp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpInstance {
    /// d x n constraint matrix
    matrix: Vec<Vec<i64>>,
    rhs: Vec<i64>,
    profits: Vec<i64>,
    lower: Vec<i64>,
    upper: Vec<i64>,
    /// right side after shifting lower bounds to zero
    rhs_norm: Vec<i64>,
    /// upper bounds after shifting lower bounds to zero
    upper_norm: Vec<i64>,
}

impl IlpInstance {
    pub fn new(
        matrix: Vec<Vec<i64>>,
        rhs: Vec<i64>,
        profits: Vec<i64>,
        lower: Vec<i64>,
        upper: Vec<i64>,
    ) -> Result<Self> {
        let d = matrix.len();
        if d == 0 || rhs.len() != d {
            return Err(Error::ShapeError(
                "matrix must have d >= 1 rows matching the right side".into(),
            ));
        }
        let n = profits.len();
        if matrix.iter().any(|row| row.len() != n) || lower.len() != n || upper.len() != n {
            return Err(Error::ShapeError(
                "profit, bound and matrix column counts must agree".into(),
            ));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::PreconditionViolated(
                "lower bounds must not exceed upper",
            ));
        }

        let mut rhs_norm = Vec::with_capacity(d);
        for (row, &b) in matrix.iter().zip(&rhs) {
            let shift: i128 = row
                .iter()
                .zip(&lower)
                .map(|(&a, &l)| a as i128 * l as i128)
                .sum();
            let v = b as i128 - shift;
            rhs_norm.push(i64::try_from(v).map_err(|_| Error::ArithmeticOverflow)?);
        }
        let upper_norm = lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| u.checked_sub(l).ok_or(Error::ArithmeticOverflow))
            .collect::<Result<Vec<_>>>()?;

        Ok(IlpInstance {
            matrix,
            rhs,
            profits,
            lower,
            upper,
            rhs_norm,
            upper_norm,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.matrix.len(), self.profits.len())
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn rhs(&self) -> &[i64] {
        &self.rhs
    }

    pub fn profits(&self) -> &[i64] {
        &self.profits
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    /// Largest absolute matrix entry.
    pub fn delta(&self) -> i64 {
        self.matrix
            .iter()
            .flat_map(|r| r.iter())
            .map(|&v| v.abs())
            .max()
            .unwrap_or(0)
    }

    fn column(&self, j: usize) -> Vec<i64> {
        self.matrix.iter().map(|row| row[j]).collect()
    }

    /// `A x` for a normalized solution vector.
    fn apply_norm(&self, x: &[i64]) -> Result<Vec<i64>> {
        self.matrix
            .iter()
            .map(|row| {
                let s: i128 = row
                    .iter()
                    .zip(x)
                    .map(|(&a, &v)| a as i128 * v as i128)
                    .sum();
                i64::try_from(s).map_err(|_| Error::ArithmeticOverflow)
            })
            .collect()
    }

    /// Validates an original-space witness and returns its objective value.
    pub fn check_witness(&self, x: &[i64]) -> Result<i64> {
        let (_, n) = self.dims();
        if x.len() != n {
            return Err(Error::ShapeError("witness length mismatch".into()));
        }
        if x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .any(|(&v, (&l, &u))| v < l || v > u)
        {
            return Err(Error::PreconditionViolated(
                "witness violates variable bounds",
            ));
        }
        for (row, &b) in self.matrix.iter().zip(&self.rhs) {
            let s: i128 = row
                .iter()
                .zip(x)
                .map(|(&a, &v)| a as i128 * v as i128)
                .sum();
            if s != b as i128 {
                return Err(Error::PreconditionViolated("witness violates a constraint"));
            }
        }
        let value: i128 = self
            .profits
            .iter()
            .zip(x)
            .map(|(&c, &v)| c as i128 * v as i128)
            .sum();
        i64::try_from(value).map_err(|_| Error::ArithmeticOverflow)
    }

    fn denormalize(&self, x_norm: &[i64]) -> Result<Vec<i64>> {
        x_norm
            .iter()
            .zip(&self.lower)
            .map(|(&x, &l)| x.checked_add(l).ok_or(Error::ArithmeticOverflow))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpResult {
    pub status: IlpStatus,
    pub x: Vec<i64>,
    pub value: i64,
}

impl IlpResult {
    pub fn infeasible() -> Self {
        IlpResult {
            status: IlpStatus::Infeasible,
            x: Vec::new(),
            value: 0,
        }
    }

    fn optimal(inst: &IlpInstance, x: Vec<i64>) -> Result<Self> {
        let value = inst.check_witness(&x)?;
        Ok(IlpResult {
            status: IlpStatus::Optimal,
            x,
            value,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Exact solution of the LP relaxation of the normalized instance
/// (`A x = b - A l`, `0 <= x <= u - l`).
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<BigRational>,
    pub value: BigRational,
}

const BRUTE_FORCE_BUDGET: u128 = 10_000_000;
const BOX_ENTRIES_BUDGET: usize = 20_000_000;
const VERTEX_BUDGET: usize = 5_000_000;

/// Exhaustive oracle over the normalized box.
pub fn brute_force_ilp(inst: &IlpInstance) -> Result<IlpResult> {
    let (_, n) = inst.dims();
    let mut combos: u128 = 1;
    for &u in &inst.upper_norm {
        combos = combos.saturating_mul(u as u128 + 1);
        if combos > BRUTE_FORCE_BUDGET {
            return Err(Error::InstanceTooLarge(format!(
                "brute force would enumerate more than {BRUTE_FORCE_BUDGET} points"
            )));
        }
    }

    let mut best: Option<(i128, Vec<i64>)> = None;
    let mut x = vec![0i64; n];
    loop {
        let residual_ok = inst.matrix.iter().zip(&inst.rhs_norm).all(|(row, &b)| {
            let s: i128 = row
                .iter()
                .zip(&x)
                .map(|(&a, &v)| a as i128 * v as i128)
                .sum();
            s == b as i128
        });
        if residual_ok {
            let value: i128 = inst
                .profits
                .iter()
                .zip(&x)
                .map(|(&c, &v)| c as i128 * v as i128)
                .sum();
            if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
                best = Some((value, x.clone()));
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                break;
            }
            if x[i] < inst.upper_norm[i] {
                x[i] += 1;
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }

    match best {
        None => Ok(IlpResult::infeasible()),
        Some((_, x_norm)) => IlpResult::optimal(inst, inst.denormalize(&x_norm)?),
    }
}

/// Exact-rational two-phase simplex over the normalized relaxation. Upper
/// bounds become explicit slack rows `x_i + s_i = u_i`.
pub fn lp_relax(inst: &IlpInstance) -> LpSolution {
    let (d, n) = inst.dims();
    let rat = |v: i64| BigRational::from_integer(v.into());

    let cols = 2 * n;
    let mut rows = Vec::with_capacity(d + n);
    let mut rhs = Vec::with_capacity(d + n);
    for (row, &b) in inst.matrix.iter().zip(&inst.rhs_norm) {
        let mut r = vec![BigRational::zero(); cols];
        for (j, &a) in row.iter().enumerate() {
            r[j] = rat(a);
        }
        rows.push(r);
        rhs.push(rat(b));
    }
    for (j, &u) in inst.upper_norm.iter().enumerate() {
        let mut r = vec![BigRational::zero(); cols];
        r[j] = rat(1);
        r[n + j] = rat(1);
        rows.push(r);
        rhs.push(rat(u));
    }
    let mut objective = vec![BigRational::zero(); cols];
    for (j, &c) in inst.profits.iter().enumerate() {
        objective[j] = rat(c);
    }

    let out = solve_standard(&StandardLp {
        rows,
        rhs,
        objective,
    });
    let status = match out.status {
        SimplexStatus::Optimal => LpStatus::Optimal,
        SimplexStatus::Infeasible => LpStatus::Infeasible,
        SimplexStatus::Unbounded => LpStatus::Unbounded,
    };
    LpSolution {
        status,
        x: out.x.into_iter().take(n).collect(),
        value: out.value,
    }
}

/// The proximity bound `d*(2*d*delta + 1)^d + d` on the l1 distance
/// between the rounded LP optimum and some integral optimum.
pub fn proximity_radius(d: usize, delta: i64) -> Result<i64> {
    if d == 0 || delta < 0 {
        return Err(Error::PreconditionViolated(
            "d >= 1 and delta >= 0 required",
        ));
    }
    let base = 2i128 * d as i128 * delta as i128 + 1;
    let mut pow: i128 = 1;
    for _ in 0..d {
        pow = pow.checked_mul(base).ok_or(Error::ArithmeticOverflow)?;
        if pow > i64::MAX as i128 {
            return Err(Error::ArithmeticOverflow);
        }
    }
    let l = (d as i128)
        .checked_mul(pow)
        .and_then(|v| v.checked_add(d as i128))
        .ok_or(Error::ArithmeticOverflow)?;
    i64::try_from(l).map_err(|_| Error::ArithmeticOverflow)
}

/// One distinct column of the grouped residual ILP, with its concave
/// deviation-profit function `f` on `[lo, hi]`.
struct Group {
    column: Vec<i64>,
    /// members sorted by (profit, index) descending
    members: Vec<usize>,
    /// rounded LP values per member, same order
    rounded: Vec<i64>,
    lo: i64,
    hi: i64,
    /// f[k - lo] for k in lo..=hi
    f: Vec<i64>,
}

impl Group {
    fn f_at(&self, k: i64) -> Option<i64> {
        if k < self.lo || k > self.hi {
            return None;
        }
        Some(self.f[(k - self.lo) as usize])
    }

    /// Splits a group deviation into per-member deviations, following the
    /// same greedy order that defined `f`.
    fn distribute(&self, k: i64, upper_norm: &[i64]) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        if k > 0 {
            let mut rem = k;
            for (pos, &member) in self.members.iter().enumerate() {
                let cap = upper_norm[member] - self.rounded[pos];
                let take = cap.min(rem);
                if take > 0 {
                    out.push((member, take));
                    rem -= take;
                }
                if rem == 0 {
                    break;
                }
            }
            debug_assert_eq!(rem, 0);
        } else if k < 0 {
            let mut rem = -k;
            for (pos, &member) in self.members.iter().enumerate().rev() {
                let take = self.rounded[pos].min(rem);
                if take > 0 {
                    out.push((member, -take));
                    rem -= take;
                }
                if rem == 0 {
                    break;
                }
            }
            debug_assert_eq!(rem, 0);
        }
        out
    }
}

fn is_concave(f: &[i64]) -> bool {
    f.windows(3)
        .all(|w| (w[1] as i128 - w[0] as i128) >= (w[2] as i128 - w[1] as i128))
}

fn build_groups(inst: &IlpInstance, lp_x: &[BigRational], radius: i64) -> Result<Vec<Group>> {
    use std::collections::BTreeMap;
    let (_, n) = inst.dims();

    let mut by_column: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for j in 0..n {
        by_column.entry(inst.column(j)).or_default().push(j);
    }

    let mut groups = Vec::with_capacity(by_column.len());
    for (column, mut members) in by_column {
        // fill order: larger (profit, index) first
        members.sort_by(|&a, &b| (inst.profits[b], b).cmp(&(inst.profits[a], a)));

        // redistribute the group's LP mass greedily, then round down
        let mut total: BigRational = members.iter().map(|&j| lp_x[j].clone()).sum();
        let mut rounded = Vec::with_capacity(members.len());
        for &j in &members {
            let cap = BigRational::from_integer(inst.upper_norm[j].into());
            let take = if total > cap { cap } else { total.clone() };
            total -= &take;
            let floored = take.floor().to_integer();
            rounded.push(floored.to_i64().ok_or(Error::ArithmeticOverflow)?);
        }
        debug_assert!(total.is_zero(), "upper bounds absorb all LP mass");

        let cap_up: i64 = members
            .iter()
            .zip(&rounded)
            .map(|(&j, &z)| inst.upper_norm[j] - z)
            .sum();
        let cap_down: i64 = rounded.iter().sum();
        let hi = radius.min(cap_up);
        let lo = -(radius.min(cap_down));

        // concave deviation profits: adding units follows the fill order,
        // removing units undoes it from the cheapest picked member
        let mut f = vec![0i64; (hi - lo + 1) as usize];
        let mut acc = 0i64;
        let mut step = 1i64;
        'up: for (pos, &member) in members.iter().enumerate() {
            let avail = inst.upper_norm[member] - rounded[pos];
            for _ in 0..avail {
                if step > hi {
                    break 'up;
                }
                acc = acc
                    .checked_add(inst.profits[member])
                    .ok_or(Error::ArithmeticOverflow)?;
                f[(step - lo) as usize] = acc;
                step += 1;
            }
        }
        acc = 0;
        step = -1;
        'down: for (pos, &member) in members.iter().enumerate().rev() {
            for _ in 0..rounded[pos] {
                if step < lo {
                    break 'down;
                }
                acc = acc
                    .checked_sub(inst.profits[member])
                    .ok_or(Error::ArithmeticOverflow)?;
                f[(step - lo) as usize] = acc;
                step -= 1;
            }
        }
        debug_assert!(is_concave(&f), "greedy rounding keeps f concave");

        groups.push(Group {
            column,
            members,
            rounded,
            lo,
            hi,
            f,
        });
    }
    Ok(groups)
}

/// Proximity solver: exact LP relaxation, greedy rounding per distinct
/// column, then a residual deviation DP over the box allowed by the
/// proximity bound, advanced per equivalence class with one concave 1-D
/// convolution each.
pub fn solve_proximity(inst: &IlpInstance) -> Result<IlpResult> {
    let (d, _) = inst.dims();
    let lp = lp_relax(inst);
    match lp.status {
        LpStatus::Infeasible => return Ok(IlpResult::infeasible()),
        LpStatus::Unbounded => {
            return Err(Error::PreconditionViolated(
                "a box-constrained relaxation cannot be unbounded",
            ))
        }
        LpStatus::Optimal => {}
    }

    let delta = inst.delta();
    let radius_l1 = proximity_radius(d, delta)?;
    let groups = build_groups(inst, &lp.x, radius_l1)?;

    // residual right side after subtracting the rounded solution
    let mut z_full = vec![0i64; inst.profits.len()];
    for g in &groups {
        for (pos, &member) in g.members.iter().enumerate() {
            z_full[member] = g.rounded[pos];
        }
    }
    let az = inst.apply_norm(&z_full)?;
    let b_res: Vec<i64> = inst
        .rhs_norm
        .iter()
        .zip(&az)
        .map(|(&b, &v)| b - v)
        .collect();

    // deviations on zero columns decouple from the constraints
    let mut zero_deviation: Vec<(usize, i64)> = Vec::new();
    let mut dp_groups: Vec<&Group> = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        if g.column.iter().all(|&a| a == 0) {
            let mut best_k = 0i64;
            let mut best = g.f_at(0).expect("0 is always in range");
            for k in g.lo..=g.hi {
                let v = g.f_at(k).expect("k in range");
                if v > best {
                    best = v;
                    best_k = k;
                }
            }
            zero_deviation.push((gi, best_k));
        } else {
            dp_groups.push(g);
        }
    }

    // the reachable deviation range is much tighter than delta * L on
    // small instances; both bounds are valid, take the smaller
    let reach: i128 = dp_groups
        .iter()
        .map(|g| g.hi.max(-g.lo) as i128)
        .sum::<i128>()
        .saturating_mul(delta as i128);
    let radius = (delta as i128 * radius_l1 as i128).min(reach).max(0);
    let radius = i64::try_from(radius).map_err(|_| Error::ArithmeticOverflow)?;

    if b_res.iter().any(|&v| v.abs() > radius) {
        // no deviation within the proximity bound reaches the residual
        return Ok(IlpResult::infeasible());
    }

    let side = 2 * radius as usize + 1;
    let box_size = SizeVec::new(vec![side; d])?;
    if box_size.count() > BOX_ENTRIES_BUDGET {
        return Err(Error::InstanceTooLarge(
            "proximity DP box exceeds the memory budget".into(),
        ));
    }
    let strides = box_size.strides();

    let coord_of =
        |idx: usize, dim: usize| -> i64 { ((idx / strides[dim]) % side) as i64 - radius };

    let mut current = vec![ExtInt::NegInf; box_size.count()];
    let center: usize = strides.iter().map(|s| s * radius as usize).sum();
    current[center] = ExtInt::Finite(0);
    let mut snapshots: Vec<Vec<ExtInt>> = vec![current.clone()];

    for g in &dp_groups {
        let step: i64 = g
            .column
            .iter()
            .enumerate()
            .map(|(dim, &a)| a * strides[dim] as i64)
            .sum();
        let inside_after_back = |idx: usize| -> bool {
            (0..d).all(|dim| {
                let c = coord_of(idx, dim) - g.column[dim];
                c.abs() <= radius
            })
        };

        let mut visited = 0usize;
        let mut chain_idx: Vec<usize> = Vec::new();
        let mut chain_vals: Vec<ExtInt> = Vec::new();
        for start in 0..current.len() {
            if inside_after_back(start) {
                continue; // not a class representative
            }
            chain_idx.clear();
            chain_vals.clear();
            let mut idx = start as i64;
            loop {
                chain_idx.push(idx as usize);
                chain_vals.push(current[idx as usize]);
                let stays =
                    (0..d).all(|dim| (coord_of(idx as usize, dim) + g.column[dim]).abs() <= radius);
                if !stays {
                    break;
                }
                idx += step;
            }
            let s = chain_idx.len();
            let mut shifted_f = vec![ExtInt::NegInf; 2 * s - 1];
            for (jj, slot) in shifted_f.iter_mut().enumerate() {
                let k = jj as i64 - (s as i64 - 1);
                if let Some(v) = g.f_at(k) {
                    *slot = ExtInt::Finite(v);
                }
            }
            let conv = conv1d_concave(&chain_vals, &shifted_f, 2 * s - 1)?;
            for (j, &cell) in chain_idx.iter().enumerate() {
                current[cell] = conv[j + s - 1];
            }
            visited += s;
        }
        debug_assert_eq!(visited, current.len(), "classes partition the box");
        snapshots.push(current.clone());
    }

    let target: usize = (0..d)
        .map(|dim| (b_res[dim] + radius) as usize * strides[dim])
        .sum();
    let ExtInt::Finite(_) = current[target] else {
        return Ok(IlpResult::infeasible());
    };

    // backtrack group deviations through the snapshots
    let mut x_norm = z_full;
    let mut pos_idx = target;
    for (gi, g) in dp_groups.iter().enumerate().rev() {
        let step: i64 = g
            .column
            .iter()
            .enumerate()
            .map(|(dim, &a)| a * strides[dim] as i64)
            .sum();
        let here = snapshots[gi + 1][pos_idx];
        let mut taken = None;
        'scan: for k in g.lo..=g.hi {
            let inside =
                (0..d).all(|dim| (coord_of(pos_idx, dim) - k * g.column[dim]).abs() <= radius);
            if !inside {
                continue;
            }
            let prev_idx = (pos_idx as i64 - k * step) as usize;
            if let ExtInt::Finite(pv) = snapshots[gi][prev_idx] {
                let f_k = g.f_at(k).expect("k in range");
                if ExtInt::Finite(pv + f_k) == here {
                    taken = Some((k, prev_idx));
                    break 'scan;
                }
            }
        }
        let (k, prev_idx) = taken.expect("an optimal transition must exist");
        for (member, dev) in g.distribute(k, &inst.upper_norm) {
            x_norm[member] += dev;
        }
        pos_idx = prev_idx;
    }
    debug_assert_eq!(pos_idx, center, "backtracking must end at zero deviation");

    for (gi, k) in zero_deviation {
        for (member, dev) in groups[gi].distribute(k, &inst.upper_norm) {
            x_norm[member] += dev;
        }
    }

    IlpResult::optimal(inst, inst.denormalize(&x_norm)?)
}

/// `u'_i = floor((u_i - 1)/2)`, clamped at zero, so `u - 2u'` stays in
/// `{0, 1, 2}`.
pub fn halve_upper_bounds(u: &[i64]) -> Vec<i64> {
    debug_assert!(u.iter().all(|&v| v >= 0));
    u.iter()
        .map(|&v| if v == 0 { 0 } else { (v - 1) / 2 })
        .collect()
}

/// Halved copy of a solution together with the verified conclusions of the
/// halving step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub x_prime: Vec<i64>,
    pub halved_bounds: Vec<i64>,
    /// `|2 A x' - b|_inf <= 2 n delta` (assuming `A x = b`)
    pub residual_ok: bool,
    /// `x' <= u'`
    pub bounds_ok: bool,
    /// `0 <= x - 2x' <= u - 2u' <= 2`
    pub steps_ok: bool,
}

/// Applies the halving case split to a solution `0 <= x <= u` and checks
/// the three conclusions against the given constraint system.
pub fn decompose_solution(
    x: &[i64],
    u: &[i64],
    matrix: &[Vec<i64>],
    b: &[i64],
) -> Result<Decomposition> {
    if x.len() != u.len() {
        return Err(Error::ShapeError("x and u lengths differ".into()));
    }
    if x.iter().zip(u).any(|(&xi, &ui)| xi < 0 || xi > ui) {
        return Err(Error::PreconditionViolated("requires 0 <= x <= u"));
    }
    let x_prime: Vec<i64> = x
        .iter()
        .zip(u)
        .map(|(&xi, &ui)| {
            if xi == 0 {
                0
            } else if ui % 2 != 0 {
                xi / 2
            } else {
                (xi - 1) / 2
            }
        })
        .collect();
    let halved = halve_upper_bounds(u);

    let n = x.len() as i128;
    let delta: i128 = matrix
        .iter()
        .flat_map(|r| r.iter())
        .map(|&v| (v as i128).abs())
        .max()
        .unwrap_or(0);
    let residual_ok = matrix.iter().zip(b).all(|(row, &bt)| {
        let twice: i128 = row
            .iter()
            .zip(&x_prime)
            .map(|(&a, &v)| 2 * a as i128 * v as i128)
            .sum();
        (twice - bt as i128).abs() <= 2 * n * delta
    });
    let bounds_ok = x_prime.iter().zip(&halved).all(|(&xp, &up)| xp <= up);
    let steps_ok =
        x.iter()
            .zip(&x_prime)
            .zip(u.iter().zip(&halved))
            .all(|((&xi, &xp), (&ui, &up))| {
                let step = xi - 2 * xp;
                let cap = ui - 2 * up;
                0 <= step && step <= cap && cap <= 2
            });

    Ok(Decomposition {
        x_prime,
        halved_bounds: halved,
        residual_ok,
        bounds_ok,
        steps_ok,
    })
}

/// Size diagnostics of the halving graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivConqStats {
    pub vertices: usize,
    pub halvings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pred {
    None,
    Column { mult: u8 },
    Double,
}

struct GraphLayer {
    lo: Vec<i128>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    dist: Vec<ExtInt>,
    pred: Vec<Pred>,
}

impl GraphLayer {
    fn index_of(&self, b: &[i128]) -> Option<usize> {
        let mut idx = 0usize;
        for (dim, &v) in b.iter().enumerate() {
            let off = v - self.lo[dim];
            if off < 0 || off >= self.dims[dim] as i128 {
                return None;
            }
            idx += off as usize * self.strides[dim];
        }
        Some(idx)
    }

    fn point_of(&self, idx: usize) -> Vec<i128> {
        self.lo
            .iter()
            .enumerate()
            .map(|(dim, &lo)| lo + ((idx / self.strides[dim]) % self.dims[dim]) as i128)
            .collect()
    }
}

/// Divide-and-conquer solver: iteratively halves the upper bounds, builds
/// the layered graph over approximate right sides `b'` with
/// `|b' - b/2^j|_inf <= 2(2n - i) delta` (membership checked by exact
/// cross-multiplied comparison) and takes the longest path, doubling path
/// values across layer boundaries.
pub fn solve_divide_conquer(inst: &IlpInstance) -> Result<IlpResult> {
    solve_divide_conquer_stats(inst).map(|(r, _)| r)
}

pub fn solve_divide_conquer_stats(inst: &IlpInstance) -> Result<(IlpResult, DivConqStats)> {
    let (d, n) = inst.dims();
    let delta = inst.delta();

    // halving chain u^(0), ..., u^(k) = 0
    let mut chain = vec![inst.upper_norm.clone()];
    while chain.last().unwrap().iter().any(|&v| v > 0) {
        let next = halve_upper_bounds(chain.last().unwrap());
        chain.push(next);
        assert!(chain.len() <= 66, "halving must reach zero in 64 steps");
    }
    let k = chain.len() - 1;

    if k == 0 {
        // all upper bounds are zero
        let stats = DivConqStats {
            vertices: 0,
            halvings: 0,
        };
        if inst.rhs_norm.iter().all(|&b| b == 0) {
            let x = inst.denormalize(&vec![0i64; n])?;
            return Ok((IlpResult::optimal(inst, x)?, stats));
        }
        return Ok((IlpResult::infeasible(), stats));
    }

    // layer boxes: |b' - b/2^j|_inf <= 2(2n - i) delta
    let mut layers: Vec<GraphLayer> = Vec::with_capacity(k * (n + 1));
    let mut total_vertices = 0usize;
    for j in 0..k {
        let pow: i128 = 1i128 << j;
        for i in 0..=n {
            let r = 2 * (2 * n as i128 - i as i128) * delta as i128;
            let mut lo = Vec::with_capacity(d);
            let mut dims = Vec::with_capacity(d);
            for t in 0..d {
                let b = inst.rhs_norm[t] as i128;
                let low = Integer::div_ceil(&(b - r * pow), &pow);
                let high = Integer::div_floor(&(b + r * pow), &pow);
                lo.push(low);
                dims.push((high - low + 1).max(0) as usize);
            }
            let count: usize = dims.iter().product();
            total_vertices += count;
            if total_vertices > VERTEX_BUDGET {
                return Err(Error::InstanceTooLarge(
                    "halving graph exceeds the vertex budget".into(),
                ));
            }
            let mut strides = Vec::with_capacity(d);
            let mut acc = 1usize;
            for &dim in &dims {
                strides.push(acc);
                acc *= dim;
            }
            layers.push(GraphLayer {
                lo,
                dims,
                strides,
                dist: vec![ExtInt::NegInf; count],
                pred: vec![Pred::None; count],
            });
        }
    }
    // layers are pushed j-ascending above
    let layer_at = |j: usize, i: usize| -> usize { j * (n + 1) + i };

    let source_point = vec![0i128; d];
    let stats = DivConqStats {
        vertices: total_vertices,
        halvings: k,
    };
    {
        let source = &mut layers[layer_at(k - 1, 0)];
        match source.index_of(&source_point) {
            Some(idx) => source.dist[idx] = ExtInt::Finite(0),
            None => return Ok((IlpResult::infeasible(), stats)),
        }
    }

    // relax in topological order: j descending, i ascending
    for j in (0..k).rev() {
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let from = layer_at(j, i);
            let to = layer_at(j, i + 1);
            let y_max = chain[j][i] - 2 * chain[j + 1][i];
            debug_assert!((0..=2).contains(&y_max));
            let y_max = y_max as u8;
            let col = inst.column(i);
            let (src, dst) = split_two(&mut layers, from, to);
            for idx in 0..src.dist.len() {
                let ExtInt::Finite(base) = src.dist[idx] else {
                    continue;
                };
                let point = src.point_of(idx);
                for y in 0..=y_max {
                    let mut tgt = point.clone();
                    for (t, &a) in col.iter().enumerate() {
                        tgt[t] += y as i128 * a as i128;
                    }
                    let Some(tidx) = dst.index_of(&tgt) else {
                        continue;
                    };
                    let gain = (y as i64)
                        .checked_mul(inst.profits[i])
                        .ok_or(Error::ArithmeticOverflow)?;
                    let cand = base.checked_add(gain).ok_or(Error::ArithmeticOverflow)?;
                    if dst.dist[tidx] < ExtInt::Finite(cand) {
                        dst.dist[tidx] = ExtInt::Finite(cand);
                        dst.pred[tidx] = Pred::Column { mult: y };
                    }
                }
            }
        }
        if j > 0 {
            let from = layer_at(j, n);
            let to = layer_at(j - 1, 0);
            let (src, dst) = split_two(&mut layers, from, to);
            for idx in 0..src.dist.len() {
                let ExtInt::Finite(base) = src.dist[idx] else {
                    continue;
                };
                let doubled = base.checked_mul(2).ok_or(Error::ArithmeticOverflow)?;
                let point: Vec<i128> = src.point_of(idx).iter().map(|&v| 2 * v).collect();
                let Some(tidx) = dst.index_of(&point) else {
                    continue;
                };
                if dst.dist[tidx] < ExtInt::Finite(doubled) {
                    dst.dist[tidx] = ExtInt::Finite(doubled);
                    dst.pred[tidx] = Pred::Double;
                }
            }
        }
    }

    let target_layer = layer_at(0, n);
    let target_point: Vec<i128> = inst.rhs_norm.iter().map(|&b| b as i128).collect();
    let Some(target_idx) = layers[target_layer].index_of(&target_point) else {
        return Ok((IlpResult::infeasible(), stats));
    };
    if !layers[target_layer].dist[target_idx].is_finite() {
        return Ok((IlpResult::infeasible(), stats));
    }

    // backtrack multiplicities; a layer-j edge contributes y * 2^j
    let mut x_acc = vec![0i128; n];
    let mut j = 0usize;
    let mut i = n;
    let mut idx = target_idx;
    while !(j == k - 1 && i == 0) {
        let layer = &layers[layer_at(j, i)];
        match layer.pred[idx] {
            Pred::Column { mult } => {
                let col = inst.column(i - 1);
                x_acc[i - 1] += (mult as i128) << j;
                let mut point = layer.point_of(idx);
                for (t, &a) in col.iter().enumerate() {
                    point[t] -= mult as i128 * a as i128;
                }
                i -= 1;
                idx = layers[layer_at(j, i)]
                    .index_of(&point)
                    .expect("predecessor vertex exists");
            }
            Pred::Double => {
                let point: Vec<i128> = layer.point_of(idx).iter().map(|&v| v / 2).collect();
                j += 1;
                i = n;
                idx = layers[layer_at(j, i)]
                    .index_of(&point)
                    .expect("doubling source exists");
            }
            Pred::None => unreachable!("finite distance implies a predecessor"),
        }
    }

    let x_norm = x_acc
        .into_iter()
        .map(|v| i64::try_from(v).map_err(|_| Error::ArithmeticOverflow))
        .collect::<Result<Vec<_>>>()?;
    Ok((IlpResult::optimal(inst, inst.denormalize(&x_norm)?)?, stats))
}

fn split_two<T>(v: &mut [T], a: usize, b: usize) -> (&T, &mut T) {
    assert!(a != b);
    if a < b {
        let (left, right) = v.split_at_mut(b);
        (&left[a], &mut right[0])
    } else {
        let (left, right) = v.split_at_mut(a);
        (&right[0], &mut left[b])
    }
}
