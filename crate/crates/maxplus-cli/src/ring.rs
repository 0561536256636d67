//! Round-trip verification of every constructive reduction against the
//! naive decision checks and exhaustive oracles.

use maxplus::knapsack::{
    bellman_dp, brute_force, to_at_most, Bound, Item, KnapsackInstance, Variant,
};
use maxplus::maxconv::{
    conv_naive, superadditive_check_naive, upper_bound_check_naive, ConvRequest,
    NaiveUpperBoundOracle,
};
use maxplus::mdarray::{ExtInt, MDArray, SizeVec};
use maxplus::reductions::{
    bounded_to_zero_one, conv_via_upperbound_oracle, find_violating_position, monotonize,
    superadditive_via_knapsack, upperbound_to_superadd, Rng,
};
use maxplus::Result;

#[derive(Debug, Clone)]
pub struct RingOptions {
    pub dims: usize,
    pub max_size: usize,
    pub trials: usize,
    pub seed: u64,
    /// test hook: corrupt one oracle-convolution result to prove the
    /// harness detects planted bugs
    pub inject_fault: bool,
}

impl Default for RingOptions {
    fn default() -> Self {
        RingOptions {
            dims: 2,
            max_size: 64,
            trials: 100,
            seed: 1,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RingRow {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
}

impl RingRow {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone)]
pub struct RingReport {
    pub rows: Vec<RingRow>,
}

impl RingReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.passed())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<22} {:>7} {:>9}  verdict\n",
            "reduction", "trials", "failures"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<22} {:>7} {:>9}  {}\n",
                row.name,
                row.trials,
                row.failures,
                if row.passed() { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Random size with at most `dims` dimensions and about `max_size` entries.
fn random_size(rng: &mut Rng, dims: usize, max_size: usize) -> SizeVec {
    let d = 1 + rng.below(dims as u64) as usize;
    // per-dimension cap so the product stays within max_size
    let mut cap = max_size;
    let mut root = 1usize;
    while (root + 1).pow(d as u32) <= max_size {
        root += 1;
    }
    cap = cap.min(root.max(1));
    SizeVec::new((0..d).map(|_| 1 + rng.below(cap as u64) as usize).collect())
        .expect("positive dims")
}

fn random_array(rng: &mut Rng, size: &SizeVec, lo: i64, hi: i64) -> MDArray {
    MDArray::from_fn(size.clone(), |_| ExtInt::Finite(rng.range_i64(lo, hi)))
}

fn binary_encoding_trial(rng: &mut Rng, dims: usize) -> Result<bool> {
    let d = 1 + rng.below(dims as u64) as usize;
    let t: Vec<u64> = (0..d).map(|_| rng.below(7)).collect();
    let n = 1 + rng.below(4) as usize;
    let items: Vec<Item> = (0..n)
        .map(|_| {
            let w: Vec<u64> = (0..d).map(|_| rng.below(4)).collect();
            let bound = if w.iter().any(|&x| x > 0) && rng.below(2) == 0 {
                Bound::Unbounded
            } else {
                Bound::Finite(1 + rng.below(3))
            };
            Item::new(w, rng.range_i64(0, 9), bound)
        })
        .collect();
    let inst = KnapsackInstance::new(items, t, Variant::Bounded)?;
    let src = to_at_most(&brute_force(&inst)?);
    let encoded = bounded_to_zero_one(&inst)?;
    let dst = to_at_most(&brute_force(&encoded)?);
    Ok(src.array == dst.array)
}

fn monotonize_trial(rng: &mut Rng, dims: usize, max_size: usize) -> Result<bool> {
    let size = random_size(rng, dims, max_size);
    let a = random_array(rng, &size, -9, 9);
    let m = monotonize(&a)?;
    Ok(m.min_finite().unwrap_or(0) >= 0
        && m.monotone_increasing()
        && superadditive_check_naive(&a) == superadditive_check_naive(&m))
}

fn primal_dual_trial(rng: &mut Rng, dims: usize, max_size: usize, case: usize) -> Result<bool> {
    let size = random_size(rng, dims, max_size.min(16));
    let a = if case.is_multiple_of(2) {
        random_array(rng, &size, -5, 5)
    } else {
        // linear profiles are superadditive, exercising the "equals
        // threshold" branch
        let coef: Vec<i64> = (0..size.rank()).map(|_| rng.range_i64(0, 4)).collect();
        MDArray::from_fn(size.clone(), |pos| {
            ExtInt::Finite(pos.iter().zip(&coef).map(|(&p, &c)| p as i64 * c).sum())
        })
    };
    let via = superadditive_via_knapsack(&a, bellman_dp)?;
    Ok(via == superadditive_check_naive(&a))
}

fn block_array_trial(rng: &mut Rng, dims: usize, max_size: usize, case: usize) -> Result<bool> {
    let size = random_size(rng, dims, max_size);
    let a = random_array(rng, &size, -6, 6);
    let b = random_array(rng, &size, -6, 6);
    let c = match case % 3 {
        0 => random_array(rng, &size, -6, 12),
        1 => conv_naive(&ConvRequest::truncated(a.clone(), b.clone())?)?,
        _ => {
            // tight bound with one entry pushed below the convolution
            let conv = conv_naive(&ConvRequest::truncated(a.clone(), b.clone())?)?;
            let mut data = conv.data().to_vec();
            let idx = rng.below(data.len() as u64) as usize;
            if let ExtInt::Finite(v) = data[idx] {
                data[idx] = ExtInt::Finite(v - 1);
            }
            MDArray::from_vec(size.clone(), data)?
        }
    };
    let m = upperbound_to_superadd(&a, &b, &c)?;
    Ok(superadditive_check_naive(&m) == upper_bound_check_naive(&a, &b, &c)?)
}

fn oracle_conv_trial(rng: &mut Rng, dims: usize, max_size: usize, corrupt: bool) -> Result<bool> {
    let size = random_size(rng, dims, max_size);
    let a = random_array(rng, &size, -9, 9);
    let b = random_array(rng, &size, -9, 9);
    let want = conv_naive(&ConvRequest::truncated(a.clone(), b.clone())?)?;
    let got = conv_via_upperbound_oracle(&a, &b, &NaiveUpperBoundOracle)?;

    // the composed conflict finder must agree with the convolution as well
    let none = find_violating_position(&a, &b, &want, &NaiveUpperBoundOracle)?;
    if none.is_some() {
        return Ok(false);
    }

    let got = if corrupt {
        let mut data = got.data().to_vec();
        if let ExtInt::Finite(v) = data[0] {
            data[0] = ExtInt::Finite(v + 1);
        }
        MDArray::from_vec(size, data)?
    } else {
        got
    };
    Ok(got == want)
}

pub fn verify_ring(opts: &RingOptions) -> Result<RingReport> {
    let mut rows = Vec::new();
    let run = |name: &'static str,
               f: &mut dyn FnMut(&mut Rng, usize) -> Result<bool>|
     -> Result<RingRow> {
        let mut rng = Rng::from_seed(opts.seed);
        let mut failures = 0usize;
        for case in 0..opts.trials {
            if !f(&mut rng, case)? {
                failures += 1;
            }
        }
        Ok(RingRow {
            name,
            trials: opts.trials,
            failures,
        })
    };

    rows.push(run("binary-encoding", &mut |rng, _| {
        binary_encoding_trial(rng, opts.dims)
    })?);
    rows.push(run("monotonize", &mut |rng, _| {
        monotonize_trial(rng, opts.dims, opts.max_size)
    })?);
    rows.push(run("primal-dual", &mut |rng, case| {
        primal_dual_trial(rng, opts.dims, opts.max_size, case)
    })?);
    rows.push(run("block-array", &mut |rng, case| {
        block_array_trial(rng, opts.dims, opts.max_size, case)
    })?);
    let inject = opts.inject_fault;
    rows.push(run("oracle-convolution", &mut |rng, case| {
        oracle_conv_trial(rng, opts.dims, opts.max_size, inject && case == 0)
    })?);

    Ok(RingReport { rows })
}
