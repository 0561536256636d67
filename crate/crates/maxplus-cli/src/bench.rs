//! Micro-benchmark suites backing the `bench` subcommand. Instances are
//! generated from fixed seeds so runs are comparable.

use std::time::Instant;

use maxplus::ilp::{solve_divide_conquer_stats, IlpInstance};
use maxplus::knapsack::{bellman_dp, solve_exact_eq, Bound, Item, KnapsackInstance, Variant};
use maxplus::maxconv::{conv1d_naive, conv_naive, conv_via_linearization, ConvRequest};
use maxplus::mdarray::{ExtInt, MDArray, SizeVec};
use maxplus::reductions::Rng;
use maxplus::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Conv,
    Knapsack,
    Ilp,
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub suite: &'static str,
    pub params: String,
    pub solver: &'static str,
    pub wall_ns: u128,
    pub entries: u64,
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("suite,params,solver,wall_ns,entries\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.suite, r.params, r.solver, r.wall_ns, r.entries
        ));
    }
    out
}

fn time_best_of<T>(reps: u32, mut f: impl FnMut() -> Result<T>) -> Result<u128> {
    let mut best = u128::MAX;
    for _ in 0..reps {
        let start = Instant::now();
        let out = f()?;
        let ns = start.elapsed().as_nanos();
        drop(out);
        best = best.min(ns.max(1));
    }
    Ok(best)
}

fn conv_suite(sizes: &[u64]) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &len in sizes {
        let mut rng = Rng::from_seed(0xc0_11 ^ len);
        let size = SizeVec::new(vec![len as usize])?;
        let a = MDArray::from_fn(size.clone(), |_| ExtInt::Finite(rng.range_i64(-50, 50)));
        let b = MDArray::from_fn(size.clone(), |_| ExtInt::Finite(rng.range_i64(-50, 50)));
        let req = ConvRequest::truncated(a, b)?;
        let params = format!("d=1;L={len}");
        let naive_ns = time_best_of(3, || conv_naive(&req))?;
        rows.push(BenchRow {
            suite: "conv",
            params: params.clone(),
            solver: "naive",
            wall_ns: naive_ns,
            entries: len,
        });
        let lin_ns = time_best_of(3, || conv_via_linearization(&req, conv1d_naive))?;
        rows.push(BenchRow {
            suite: "conv",
            params,
            solver: "linearized",
            wall_ns: lin_ns,
            entries: len,
        });
    }
    Ok(rows)
}

/// Fixed capacity and distinct-weight count; the varying `sizes` are the
/// total item multiplicities. The class solver's work depends on `D` and
/// the capacity box only, the Bellman baseline scales with the bounds.
pub const KNAPSACK_BENCH_CAPACITY: u64 = 200_000;
const KNAPSACK_WEIGHTS: [u64; 4] = [3, 5, 7, 11];

pub fn knapsack_bench_instance(total_multiplicity: u64) -> KnapsackInstance {
    let per_item = (total_multiplicity / KNAPSACK_WEIGHTS.len() as u64).max(1);
    let items = KNAPSACK_WEIGHTS
        .iter()
        .enumerate()
        .map(|(i, &w)| Item::new(vec![w], 10 + i as i64, Bound::Finite(per_item)))
        .collect();
    KnapsackInstance::new(items, vec![KNAPSACK_BENCH_CAPACITY], Variant::Bounded)
        .expect("valid bench instance")
}

fn knapsack_suite(sizes: &[u64]) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &total in sizes {
        let inst = knapsack_bench_instance(total);
        let params = format!(
            "t={};D={};sum_bounds={total}",
            KNAPSACK_BENCH_CAPACITY,
            KNAPSACK_WEIGHTS.len()
        );
        let entries = KNAPSACK_BENCH_CAPACITY + 1;
        let class_ns = time_best_of(3, || solve_exact_eq(&inst))?;
        rows.push(BenchRow {
            suite: "knapsack",
            params: params.clone(),
            solver: "classconv",
            wall_ns: class_ns,
            entries,
        });
        let bellman_ns = time_best_of(3, || bellman_dp(&inst))?;
        rows.push(BenchRow {
            suite: "knapsack",
            params,
            solver: "bellman",
            wall_ns: bellman_ns,
            entries,
        });
    }
    Ok(rows)
}

fn ilp_suite(sizes: &[u64]) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in sizes {
        let n = n as usize;
        let mut rng = Rng::from_seed(0x0179 ^ n as u64);
        let d = 2usize;
        let matrix: Vec<Vec<i64>> = (0..d)
            .map(|_| (0..n).map(|_| rng.range_i64(-2, 2)).collect())
            .collect();
        let upper: Vec<i64> = (0..n).map(|_| rng.range_i64(0, 3)).collect();
        let x0: Vec<i64> = upper.iter().map(|&u| rng.range_i64(0, u)).collect();
        let rhs: Vec<i64> = matrix
            .iter()
            .map(|row| row.iter().zip(&x0).map(|(&a, &v)| a * v).sum())
            .collect();
        let profits: Vec<i64> = (0..n).map(|_| rng.range_i64(-4, 4)).collect();
        let inst = IlpInstance::new(matrix, rhs, profits, vec![0; n], upper)
            .expect("valid bench instance");

        let start = Instant::now();
        let (_, stats) = solve_divide_conquer_stats(&inst)?;
        let wall = start.elapsed().as_nanos().max(1);
        rows.push(BenchRow {
            suite: "ilp",
            params: format!("d={d};n={n};delta=2"),
            solver: "divconq",
            wall_ns: wall,
            entries: stats.vertices as u64,
        });
    }
    Ok(rows)
}

pub fn run_suite(suite: Suite, sizes: &[u64]) -> Result<Vec<BenchRow>> {
    match suite {
        Suite::Conv => conv_suite(sizes),
        Suite::Knapsack => knapsack_suite(sizes),
        Suite::Ilp => ilp_suite(sizes),
    }
}

pub fn default_sizes(suite: Suite) -> Vec<u64> {
    match suite {
        Suite::Conv => vec![16, 32, 64, 128, 256],
        Suite::Knapsack => vec![100, 1000],
        Suite::Ilp => vec![2, 3, 4, 5],
    }
}
