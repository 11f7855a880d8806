//! The reduced body: all cancelling-tuple-free baskets with a given δ.
//!
//! Write `x = w⁺ − w⁻` on `Z⟨Res⁺(ℓ)⟩`. Reduced `x` are exactly the minimal
//! nonnegative solutions of `[Φ | −Φ | −δ]·(w⁺, w⁻, 1) = 0`, since any mixed
//! coordinate dominates the kernel vector `e⁺_i + e⁻_i`. These are found by a
//! Contejean–Devie completion started from the homogenizing unit vector,
//! pruned by the known conformally minimal kernel vectors.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactalg::{int_solve, Rational};
use crate::hilbert::DeltaVector;
use crate::quiver::{residual_system, ResidualSystem, DEFAULT_SEARCH_BUDGET};

use super::{ReducedBodyResult, SignedBasketVector};

pub const DEFAULT_MAX_MU: u64 = 5000;

#[derive(Clone, Debug)]
pub struct EnumerationConfig {
    /// Ceiling on completion depth, i.e. on basket size.
    pub max_mu: u64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Node budget for the completion and for each reducedness check.
    pub search_budget: u64,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { max_mu: DEFAULT_MAX_MU, jobs: None, search_budget: DEFAULT_SEARCH_BUDGET }
    }
}

pub fn enumerate_reduced_baskets(ell: u64, delta: &DeltaVector) -> Result<ReducedBodyResult> {
    enumerate_reduced_baskets_with(ell, delta, &EnumerationConfig::default())
}

pub fn enumerate_reduced_baskets_with(
    ell: u64,
    delta: &DeltaVector,
    cfg: &EnumerationConfig,
) -> Result<ReducedBodyResult> {
    if delta.local_index() != ell {
        return Err(Error::MixedIndex { expected: ell, found: delta.local_index() });
    }
    if ell <= 2 {
        return Ok(ReducedBodyResult::trivial(ell, delta.clone(), Vec::new()));
    }
    let sys = residual_system(ell)?;
    let rhs: Vec<BigInt> = delta.entries().iter().map(|&d| BigInt::from(d)).collect();
    let Some(part) = int_solve(&sys.phi_plus, &rhs) else {
        return Ok(ReducedBodyResult::not_realizable(ell, delta.clone(), sys.kernel.clone()));
    };
    let part: Vec<i64> = part.iter().map(|v| v.to_i64().expect("particular solution fits i64")).collect();

    // shift bound: the coverage of any reduced x is T₀ + μ·cycle with μ ≤ mu_max
    let c = sys.coverage(&part);
    let shift = c.iter().zip(&sys.cycle).map(|(a, v)| a / v).min().unwrap_or(0);
    let t0_size: i64 = c.iter().zip(&sys.cycle).map(|(a, v)| a - shift * v).sum();
    let mu_max = (1 + t0_size as u64) * (ell + 1);

    let run = || completion(&sys, delta.entries(), cfg);
    let xs = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::Infeasible(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let mut reduced = Vec::with_capacity(xs.len());
    for x in xs {
        debug_assert_eq!(sys.delta_of(&x), *delta);
        if sys.cancelling_kernel_vector(&x, cfg.search_budget)?.is_none() {
            reduced.push(x);
        }
    }

    let mut rows: Vec<_> = reduced.into_iter().map(|x| (sys.interpret(&x), x)).collect();
    rows.sort();
    let vectors: Vec<SignedBasketVector> =
        rows.iter().map(|(_, x)| SignedBasketVector { ell, coords: x.clone() }).collect();
    let rk2: Vec<Rational> = rows.iter().map(|(_, x)| sys.degree_of(x)).collect();
    Ok(ReducedBodyResult {
        ell,
        delta: delta.clone(),
        realizable: true,
        particular: Some(SignedBasketVector { ell, coords: part }),
        kernel_basis: sys.kernel.clone(),
        baskets: rows.into_iter().map(|(b, _)| b).collect(),
        vectors,
        rk2,
        mu_max,
    })
}

fn dominates(q: &[u32], m: &[u32]) -> bool {
    q.iter().zip(m).all(|(a, b)| a >= b)
}

/// Minimal nonnegative solutions of `[Φ | −Φ] w = δ`, returned as signed `x`, sorted.
fn completion(sys: &ResidualSystem, delta: &[i64], cfg: &EnumerationConfig) -> Result<Vec<Vec<i64>>> {
    let n = sys.dim();
    // δ-vectors are palindromic, so the first half of the rows suffices
    let h = delta.len().div_ceil(2);
    let mut cols: Vec<Vec<i64>> = (0..n).map(|i| sys.positive(i).delta.entries()[..h].to_vec()).collect();
    for i in 0..n {
        let c: Vec<i64> = cols[i].iter().map(|v| -v).collect();
        cols.push(c);
    }
    cols.push(delta[..h].iter().map(|v| -v).collect());
    let t = 2 * n;
    let width = cols.len();

    let lift = |x: &[i64]| -> Vec<u32> {
        let mut w = vec![0u32; width];
        for (i, &v) in x.iter().enumerate() {
            w[if v >= 0 { i } else { n + i }] = v.unsigned_abs() as u32;
        }
        w
    };
    let mut kernel: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let mut w = vec![0u32; width];
            w[i] = 1;
            w[n + i] = 1;
            w
        })
        .collect();
    kernel.extend(sys.cycle_tuples().iter().map(|g| lift(g)));

    let mut found: Vec<Vec<u32>> = Vec::new();
    let mut start = vec![0u32; width];
    start[t] = 1;
    let mut frontier: Vec<(Vec<u32>, Vec<i64>)> = vec![(start, cols[t].clone())];
    let mut nodes = 0u64;
    let mut depth = 0u64;
    while !frontier.is_empty() {
        depth += 1;
        if depth > cfg.max_mu + 1 {
            return Err(Error::CapacityExceeded { what: "completion depth".into(), attained: depth - 1 });
        }
        let (done, open): (Vec<_>, Vec<_>) = frontier.into_iter().partition(|(_, img)| img.iter().all(|&v| v == 0));
        found.extend(done.into_iter().map(|(w, _)| w));
        // No frontier vector dominates a known one, so `p + e_j` can only
        // dominate some `m` with `m_j = p_j + 1`.
        let mut by_col: Vec<Vec<&[u32]>> = vec![Vec::new(); width];
        for m in kernel.iter().chain(found.iter()) {
            for (j, &v) in m.iter().enumerate() {
                if v > 0 {
                    by_col[j].push(m);
                }
            }
        }
        let steps: Vec<(Vec<u32>, Vec<i64>)> = open
            .par_iter()
            .flat_map_iter(|(w, img)| {
                let (by_col, cols) = (&by_col, &cols);
                (0..t).filter_map(move |j| {
                    let d: i64 = img.iter().zip(&cols[j]).map(|(a, b)| a * b).sum();
                    if d >= 0 {
                        return None;
                    }
                    let mut q = w.clone();
                    q[j] += 1;
                    if by_col[j].iter().any(|m| m[j] == q[j] && dominates(&q, m)) {
                        return None;
                    }
                    let im = img.iter().zip(&cols[j]).map(|(a, b)| a + b).collect();
                    Some((q, im))
                })
            })
            .collect();
        let mut next: HashMap<Vec<u32>, Vec<i64>> = HashMap::with_capacity(steps.len());
        for (q, im) in steps {
            next.entry(q).or_insert(im);
        }
        nodes += next.len() as u64;
        if nodes > cfg.search_budget {
            return Err(Error::CapacityExceeded { what: "completion nodes".into(), attained: nodes });
        }
        frontier = next.into_iter().collect();
    }
    let mut out: Vec<Vec<i64>> = found
        .into_iter()
        .map(|w| (0..n).map(|i| w[i] as i64 - w[n + i] as i64).collect())
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance() {
        assert!(dominates(&[2, 1, 0], &[1, 1, 0]));
        assert!(!dominates(&[2, 0, 0], &[1, 1, 0]));
    }

    #[test]
    fn completion_small() {
        let sys = residual_system(5).unwrap();
        let xs = completion(&sys, &[2, 1, 2], &EnumerationConfig::default()).unwrap();
        assert_eq!(xs, vec![vec![0, 0, 1, -1], vec![0, 1, 0, 0], vec![1, -1, 1, 0], vec![1, 0, 0, 1]]);
        assert_eq!(completion(&sys, &[0, 0, 0], &EnumerationConfig::default()).unwrap(), vec![vec![0; 4]]);
    }
}
