//! Nelder–Mead simplex ascent with deterministic seeded restarts.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Restart and budget knobs. A fixed seed makes the whole search — restart
/// start points included — bit-for-bit reproducible.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    restarts: usize,
    max_evals_per_restart: usize,
    ftol: f64,
    seed: u64,
}

impl OptimizerConfig {
    pub fn new(
        restarts: usize,
        max_evals_per_restart: usize,
        ftol: f64,
        seed: u64,
    ) -> Result<Self> {
        if restarts == 0 || max_evals_per_restart == 0 {
            return Err(Error::InvalidArgument(
                "optimizer needs at least one restart and one evaluation".into(),
            ));
        }
        if !ftol.is_finite() || ftol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "ftol must be a positive real, got {ftol}"
            )));
        }
        Ok(Self { restarts, max_evals_per_restart, ftol, seed })
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    pub fn max_evals_per_restart(&self) -> usize {
        self.max_evals_per_restart
    }

    pub fn ftol(&self) -> f64 {
        self.ftol
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Outcome of a multi-restart search. `best_value` is the maximum of
/// `restart_values`; ties keep the earliest restart's parameters.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationReport {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evals_used: usize,
    pub restart_values: Vec<f64>,
    /// Named decoding of `best_params`, as a JSON object.
    pub params_json: String,
    /// How infeasible candidates were rejected, for the record.
    pub constraint_convention: String,
}

/// Start points for `total` restarts: the structured seeds first, then
/// pseudo-random perturbations of `random_base`. Each perturbation draws
/// from its own stream keyed by (seed, restart index), so inserting or
/// removing structured seeds never shifts the random ones; widths cycle
/// {0.4, 0.75, 1.1} and double each cycle so late restarts scan farther
/// out. Draws are clamped to [-π, π] per coordinate — every objective in
/// this crate either rejects outside that box or is periodic across it.
pub(crate) fn seeded_starts(
    structured: &[Vec<f64>],
    random_base: &[f64],
    total: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    const WIDTHS: [f64; 3] = [0.4, 0.75, 1.1];
    let mut starts: Vec<Vec<f64>> = structured.iter().take(total).cloned().collect();
    for r in starts.len()..total {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let w = WIDTHS[(r - 1) % 3] * (1u64 << ((r - 1) / 3).min(20)) as f64;
        starts.push(
            random_base
                .iter()
                .map(|&v| {
                    (v + rng.gen_range(-w..w)).clamp(-std::f64::consts::PI, std::f64::consts::PI)
                })
                .collect(),
        );
    }
    starts
}

/// One Nelder–Mead ascent (coefficients 1, 2, 0.5, 0.5). Stops when the
/// value spread across the simplex drops to `ftol` or the budget runs out.
/// Returns (best point, best value, evaluations spent). Infeasible values
/// (−∞ or NaN) order below everything, so the simplex walks away from them.
fn ascend(
    objective: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    max_evals: usize,
    ftol: f64,
) -> (Vec<f64>, f64, usize) {
    let n = start.len();
    let mut evals = 0usize;
    let eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    const STEP: f64 = 0.25;
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(start, &mut evals);
    simplex.push((start.to_vec(), f0));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += STEP;
        let f = eval(&v, &mut evals);
        simplex.push((v, f));
    }

    while evals < max_evals {
        // best first
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let spread = simplex[0].1 - simplex[n].1;
        if spread.is_finite() && spread <= ftol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].0.clone();
        let shifted = |coef: f64| -> Vec<f64> {
            (0..n).map(|d| centroid[d] + coef * (centroid[d] - worst[d])).collect()
        };

        let xr = shifted(1.0);
        let fr = eval(&xr, &mut evals);
        if fr > simplex[0].1 {
            let xe = shifted(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[n] = if fe > fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr > simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        // contraction: outside if the reflection at least beat the worst
        let (xc, threshold) =
            if fr > simplex[n].1 { (shifted(0.5), fr) } else { (shifted(-0.5), simplex[n].1) };
        let fc = eval(&xc, &mut evals);
        if fc >= threshold {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for d in 0..n {
                vertex.0[d] = best[d] + 0.5 * (vertex.0[d] - best[d]);
            }
            vertex.1 = eval(&vertex.0, &mut evals);
            if evals >= max_evals {
                break;
            }
        }
    }

    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, f) = simplex.swap_remove(0);
    (x, f, evals)
}

/// Run one ascent per start point and merge. The merge is deterministic:
/// restarts in order, strict improvement wins, ties keep the earlier index.
pub(crate) fn simplex_maximize_seeded(
    objective: &dyn Fn(&[f64]) -> f64,
    starts: &[Vec<f64>],
    config: &OptimizerConfig,
) -> OptimizationReport {
    let mut best_params = starts[0].clone();
    let mut best_value = f64::NEG_INFINITY;
    let mut restart_values = Vec::with_capacity(starts.len());
    let mut evals_used = 0usize;
    for start in starts {
        let (x, f, e) = ascend(objective, start, config.max_evals_per_restart(), config.ftol());
        evals_used += e;
        restart_values.push(f);
        if f > best_value {
            best_value = f;
            best_params = x;
        }
    }
    let params_json = serde_json::json!({ "x": best_params }).to_string();
    OptimizationReport {
        best_params,
        best_value,
        evals_used,
        restart_values,
        params_json,
        constraint_convention: "unconstrained".into(),
    }
}

/// Maximize `objective` from `x0` plus seeded perturbations of it.
pub fn simplex_maximize(
    objective: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    config: &OptimizerConfig,
) -> OptimizationReport {
    let starts = seeded_starts(
        std::slice::from_ref(&x0.to_vec()),
        x0,
        config.restarts(),
        config.seed(),
    );
    simplex_maximize_seeded(&objective, &starts, config)
}
