//! Seed-deterministic random instance generation.

use maxplus::reductions::Rng;

use crate::format::{ArrayData, InstanceFile, ItemFile, VariantTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Conv,
    Knapsack,
    Ilp,
}

#[derive(Debug, Clone)]
pub struct GenOptions {
    pub kind: GenKind,
    pub dims: usize,
    pub n: usize,
    pub tmax: u64,
    pub delta_max: i64,
    pub seed: u64,
    pub variant: VariantTag,
}

fn random_array(rng: &mut Rng, size: &[usize]) -> ArrayData {
    let count: usize = size.iter().product();
    let data = (0..count)
        .map(|_| {
            if rng.below(10) == 0 {
                None
            } else {
                Some(rng.range_i64(-50, 50))
            }
        })
        .collect();
    ArrayData {
        size: size.to_vec(),
        data,
    }
}

pub fn generate(opts: &GenOptions) -> InstanceFile {
    let mut rng = Rng::from_seed(opts.seed);
    match opts.kind {
        GenKind::Conv => {
            let size: Vec<usize> = (0..opts.dims)
                .map(|_| 1 + rng.below(opts.tmax.max(1)) as usize)
                .collect();
            let a = random_array(&mut rng, &size);
            let b = random_array(&mut rng, &size);
            InstanceFile::Conv { a, b, c: None }
        }
        GenKind::Knapsack => {
            let t: Vec<u64> = (0..opts.dims).map(|_| rng.below(opts.tmax + 1)).collect();
            let wmax = opts.delta_max.max(0) as u64;
            let items = (0..opts.n)
                .map(|_| {
                    let mut w: Vec<u64> = (0..opts.dims).map(|_| rng.below(wmax + 1)).collect();
                    if opts.variant == VariantTag::Unbounded && w.iter().all(|&x| x == 0) {
                        // avoid diverging zero-weight unbounded items
                        w[rng.below(opts.dims as u64) as usize] = 1 + rng.below(wmax.max(1));
                    }
                    let p = match opts.variant {
                        VariantTag::ExactEq => rng.range_i64(-5, 20),
                        _ => rng.range_i64(0, 20),
                    };
                    let bound = match opts.variant {
                        VariantTag::ZeroOne => Some(1),
                        VariantTag::Unbounded => None,
                        _ => Some(1 + rng.below(3)),
                    };
                    ItemFile { w, p, bound }
                })
                .collect();
            InstanceFile::Knapsack {
                d: opts.dims,
                t,
                variant: opts.variant,
                items,
            }
        }
        GenKind::Ilp => {
            let dm = opts.delta_max.max(0);
            let a: Vec<Vec<i64>> = (0..opts.dims)
                .map(|_| (0..opts.n).map(|_| rng.range_i64(-dm, dm)).collect())
                .collect();
            let l: Vec<i64> = (0..opts.n).map(|_| rng.range_i64(-1, 1)).collect();
            let u: Vec<i64> = l.iter().map(|&lo| lo + rng.range_i64(0, 3)).collect();
            let c: Vec<i64> = (0..opts.n).map(|_| rng.range_i64(-5, 5)).collect();
            let b: Vec<i64> = if rng.below(2) == 0 {
                // feasible by construction
                let x: Vec<i64> = l
                    .iter()
                    .zip(&u)
                    .map(|(&lo, &hi)| rng.range_i64(lo, hi))
                    .collect();
                a.iter()
                    .map(|row| row.iter().zip(&x).map(|(&v, &xi)| v * xi).sum())
                    .collect()
            } else {
                (0..opts.dims).map(|_| rng.range_i64(-8, 8)).collect()
            };
            InstanceFile::Ilp { a, b, c, l, u }
        }
    }
}
