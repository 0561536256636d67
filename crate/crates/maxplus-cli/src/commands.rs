//! Implementations behind the CLI subcommands. Commands return structured
//! reports; printing and exit codes live in `main`.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use maxplus::ilp::{brute_force_ilp, solve_divide_conquer, solve_proximity, IlpResult, IlpStatus};
use maxplus::knapsack::{
    bellman_dp, brute_force, solve_exact_eq, to_at_most, SolutionArray, Variant,
};
use maxplus::maxconv::{
    conv1d_concave, conv1d_naive, conv_naive, conv_via_linearization, ConvRequest,
};
use maxplus::mdarray::{ExtInt, MDArray, SizeVec};
use maxplus::reductions::{
    bounded_to_zero_one, knapsack_via_conv, monotonize, superadd_to_knapsack,
    upperbound_to_superadd, Rng,
};

use crate::format::{digest, InstanceFile, ItemFile, VariantTag};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvEngine {
    Naive,
    Linearized,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnapsackSolver {
    Classconv,
    Bellman,
    Brute,
    Colorcoding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IlpSolver {
    Proximity,
    Divconq,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemanticsArg {
    Exact,
    Atmost,
}

/// One line of JSON per run: what ran, how long, and a stable hash of the
/// produced result.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub solver: String,
    pub wall_ns: u128,
    pub digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn finite_support_concave(seq: &[ExtInt]) -> bool {
    let Some(first) = seq.iter().position(|e| e.is_finite()) else {
        return true;
    };
    let last = seq.iter().rposition(|e| e.is_finite()).unwrap();
    let support = &seq[first..=last];
    if !support.iter().all(|e| e.is_finite()) {
        return false;
    }
    support.windows(3).all(|w| {
        let (a, b, c) = (
            w[0].finite().unwrap() as i128,
            w[1].finite().unwrap() as i128,
            w[2].finite().unwrap() as i128,
        );
        b - a >= c - b
    })
}

pub fn cmd_conv(input: &Path, engine: ConvEngine, out: &Path) -> Result<RunReport, CliError> {
    let (a, b) = InstanceFile::load(input)?.as_conv()?;
    let req = ConvRequest::truncated(a.clone(), b.clone()).map_err(CliError::schema)?;
    let start = Instant::now();
    let result: MDArray = match engine {
        ConvEngine::Naive => conv_naive(&req)?,
        ConvEngine::Linearized => conv_via_linearization(&req, conv1d_naive)?,
        ConvEngine::Concave => {
            if a.size().rank() != 1 {
                return Err(CliError::Input(
                    "the concave engine handles 1-D arrays only".into(),
                ));
            }
            if !finite_support_concave(b.data()) {
                return Err(CliError::Solver(maxplus::Error::NonConcaveInput));
            }
            let out_len = a.size().count();
            let data = conv1d_concave(a.data(), b.data(), out_len)?;
            MDArray::from_vec(SizeVec::new(vec![out_len]).map_err(CliError::schema)?, data)
                .map_err(CliError::schema)?
        }
    };
    let wall_ns = start.elapsed().as_nanos();

    let file = InstanceFile::from_array(&result);
    file.save(out)?;
    Ok(RunReport {
        solver: format!("conv-{}", engine_name(engine)),
        wall_ns,
        digest: digest(&file.to_json()),
        verify: None,
        note: None,
    })
}

fn engine_name(engine: ConvEngine) -> &'static str {
    match engine {
        ConvEngine::Naive => "naive",
        ConvEngine::Linearized => "linearized",
        ConvEngine::Concave => "concave",
    }
}

#[derive(Debug)]
pub struct KnapsackRun {
    pub report: RunReport,
    pub verify_failed: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_knapsack(
    input: &Path,
    solver: KnapsackSolver,
    delta: Option<f64>,
    seed: Option<u64>,
    semantics: Option<SemanticsArg>,
    verify: bool,
    out: &Path,
) -> Result<KnapsackRun, CliError> {
    let inst = InstanceFile::load(input)?.as_knapsack()?;

    let effective_semantics = match (solver, semantics) {
        (KnapsackSolver::Colorcoding, Some(SemanticsArg::Exact)) => {
            return Err(CliError::Input(
                "the color-coding solver produces at-most semantics only".into(),
            ));
        }
        (KnapsackSolver::Colorcoding, _) => SemanticsArg::Atmost,
        (_, Some(s)) => s,
        (_, None) => SemanticsArg::Exact,
    };

    let start = Instant::now();
    let solution: SolutionArray = match solver {
        KnapsackSolver::Classconv => solve_exact_eq(&inst)?,
        KnapsackSolver::Bellman => bellman_dp(&inst)?,
        KnapsackSolver::Brute => brute_force(&inst)?,
        KnapsackSolver::Colorcoding => {
            let delta = delta
                .ok_or_else(|| CliError::Input("--solver colorcoding requires --delta".into()))?;
            let seed =
                seed.ok_or_else(|| CliError::Input("--solver colorcoding requires --seed".into()))?;
            if inst.variant() != Variant::ZeroOne {
                return Err(CliError::Input(
                    "color coding expects a ZERO_ONE instance".into(),
                ));
            }
            knapsack_via_conv(&inst, delta, &mut Rng::from_seed(seed))?
        }
    };
    let solution = match effective_semantics {
        SemanticsArg::Exact => solution,
        SemanticsArg::Atmost => to_at_most(&solution),
    };
    let wall_ns = start.elapsed().as_nanos();

    let file = InstanceFile::from_solution(&solution);
    file.save(out)?;

    let mut verdict = None;
    let mut verify_failed = false;
    if verify {
        let oracle = brute_force(&inst)?;
        let oracle = match effective_semantics {
            SemanticsArg::Exact => oracle,
            SemanticsArg::Atmost => to_at_most(&oracle),
        };
        if oracle.array == solution.array {
            verdict = Some("match".to_string());
        } else {
            verdict = Some("mismatch".to_string());
            verify_failed = true;
        }
    }

    Ok(KnapsackRun {
        report: RunReport {
            solver: knapsack_solver_name(solver).to_string(),
            wall_ns,
            digest: digest(&file.to_json()),
            verify: verdict,
            note: None,
        },
        verify_failed,
    })
}

fn knapsack_solver_name(solver: KnapsackSolver) -> &'static str {
    match solver {
        KnapsackSolver::Classconv => "classconv",
        KnapsackSolver::Bellman => "bellman",
        KnapsackSolver::Brute => "brute",
        KnapsackSolver::Colorcoding => "colorcoding",
    }
}

#[derive(Debug)]
pub struct IlpRun {
    pub result: IlpResult,
    pub report: RunReport,
    pub verify_failed: bool,
}

pub fn cmd_ilp(input: &Path, solver: IlpSolver, verify: bool) -> Result<IlpRun, CliError> {
    let inst = InstanceFile::load(input)?.as_ilp()?;
    let start = Instant::now();
    let result = match solver {
        IlpSolver::Proximity => solve_proximity(&inst)?,
        IlpSolver::Divconq => solve_divide_conquer(&inst)?,
        IlpSolver::Brute => brute_force_ilp(&inst)?,
    };
    let wall_ns = start.elapsed().as_nanos();

    let mut verdict = None;
    let mut verify_failed = false;
    if verify {
        let oracle = brute_force_ilp(&inst)?;
        let matches = oracle.status == result.status
            && (result.status != IlpStatus::Optimal
                || (oracle.value == result.value && inst.check_witness(&result.x).is_ok()));
        if matches {
            verdict = Some("match".to_string());
        } else {
            verdict = Some("mismatch".to_string());
            verify_failed = true;
        }
    }

    let canonical = serde_json::json!({
        "status": match result.status {
            IlpStatus::Optimal => "OPTIMAL",
            IlpStatus::Infeasible => "INFEASIBLE",
        },
        "value": result.value,
        "x": result.x,
    })
    .to_string();

    Ok(IlpRun {
        report: RunReport {
            solver: ilp_solver_name(solver).to_string(),
            wall_ns,
            digest: digest(&canonical),
            verify: verdict,
            note: None,
        },
        result,
        verify_failed,
    })
}

fn ilp_solver_name(solver: IlpSolver) -> &'static str {
    match solver {
        IlpSolver::Proximity => "proximity",
        IlpSolver::Divconq => "divconq",
        IlpSolver::Brute => "brute",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// bounded/unbounded knapsack file -> 0/1 knapsack file
    BinaryEncoding,
    /// array file -> non-negative monotone array file, same verdict
    Monotonize,
    /// array file -> primal/dual unbounded knapsack file (monotonizing
    /// first when needed); the target profit is reported as a note
    SuperaddToKnapsack,
    /// conv file with arrays a, b, c -> block array whose superadditivity
    /// decides the upper-bound question
    UpperboundToSuperadd,
}

fn reduction_name(r: Reduction) -> &'static str {
    match r {
        Reduction::BinaryEncoding => "binary-encoding",
        Reduction::Monotonize => "monotonize",
        Reduction::SuperaddToKnapsack => "superadd-to-knapsack",
        Reduction::UpperboundToSuperadd => "upperbound-to-superadd",
    }
}

/// Applies one constructive reduction to an instance file and writes the
/// transformed instance.
pub fn cmd_reduce(input: &Path, reduction: Reduction, out: &Path) -> Result<RunReport, CliError> {
    let file = InstanceFile::load(input)?;
    let start = Instant::now();
    let mut note = None;
    let produced: InstanceFile = match reduction {
        Reduction::BinaryEncoding => {
            let inst = file.as_knapsack()?;
            let encoded = bounded_to_zero_one(&inst)?;
            InstanceFile::Knapsack {
                d: encoded.rank(),
                t: encoded.capacity().to_vec(),
                variant: VariantTag::ZeroOne,
                items: encoded
                    .items()
                    .iter()
                    .map(|i| ItemFile {
                        w: i.weight.clone(),
                        p: i.profit,
                        bound: Some(1),
                    })
                    .collect(),
            }
        }
        Reduction::Monotonize => {
            let InstanceFile::Array { size, data, .. } = &file else {
                return Err(CliError::Input("expected an \"array\" file".into()));
            };
            let arr = crate::format::ArrayData {
                size: size.clone(),
                data: data.clone(),
            }
            .to_mdarray()?;
            InstanceFile::from_array(&monotonize(&arr)?)
        }
        Reduction::SuperaddToKnapsack => {
            let InstanceFile::Array { size, data, .. } = &file else {
                return Err(CliError::Input("expected an \"array\" file".into()));
            };
            let arr = crate::format::ArrayData {
                size: size.clone(),
                data: data.clone(),
            }
            .to_mdarray()?;
            // arrays already in the required form skip the rewrite
            let prepared = if arr.all_finite()
                && arr.min_finite().unwrap_or(0) >= 0
                && arr.monotone_increasing()
            {
                arr
            } else {
                monotonize(&arr)?
            };
            let pd = superadd_to_knapsack(&prepared)?;
            note = Some(format!("threshold={}", pd.threshold));
            InstanceFile::Knapsack {
                d: pd.instance.rank(),
                t: pd.instance.capacity().to_vec(),
                variant: VariantTag::Unbounded,
                items: pd
                    .instance
                    .items()
                    .iter()
                    .map(|i| ItemFile {
                        w: i.weight.clone(),
                        p: i.profit,
                        bound: None,
                    })
                    .collect(),
            }
        }
        Reduction::UpperboundToSuperadd => {
            let (a, b, c) = file.as_conv_triple()?;
            InstanceFile::from_array(&upperbound_to_superadd(&a, &b, &c)?)
        }
    };
    let wall_ns = start.elapsed().as_nanos();
    produced.save(out)?;
    Ok(RunReport {
        solver: format!("reduce-{}", reduction_name(reduction)),
        wall_ns,
        digest: digest(&produced.to_json()),
        verify: None,
        note,
    })
}
