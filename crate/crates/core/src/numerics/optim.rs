use super::RngSeed;
use crate::error::{Error, Result};

/// Settings shared by the model fitters.
#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    /// Number of optimizer starts; the first is the deterministic initial
    /// guess, the rest are jittered around it.
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Drives the restart jitter.
    pub seed: RngSeed,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            tol: 1e-8,
            max_iter: 5000,
            seed: RngSeed::new(0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimResult {
    pub argmin: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after each iteration.
    pub trace: Vec<f64>,
}

/// Nelder-Mead simplex minimizer with the standard coefficients
/// (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
///
/// Non-finite objective values are treated as `+inf`, which lets callers
/// reject infeasible points by returning `f64::INFINITY`.
#[derive(Clone, Debug)]
pub struct NelderMead {
    pub tol: f64,
    pub max_iter: usize,
    /// Offset of the initial simplex vertices from the start point.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            initial_step: 0.1,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

impl NelderMead {
    pub fn minimize<F>(&self, mut objective: F, x0: &[f64]) -> Result<OptimResult>
    where
        F: FnMut(&[f64]) -> f64,
    {
        let mut f = |x: &[f64]| {
            let v = objective(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let dim = x0.len();
        let f0 = f(x0);
        if !f0.is_finite() {
            return Err(Error::NonFiniteObjective);
        }
        if dim == 0 {
            return Ok(OptimResult {
                argmin: Vec::new(),
                objective_value: f0,
                iterations: 0,
                converged: true,
                trace: Vec::new(),
            });
        }

        let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
        let mut values = Vec::with_capacity(dim + 1);
        simplex.push(x0.to_vec());
        values.push(f0);
        for i in 0..dim {
            let mut v = x0.to_vec();
            v[i] += self.initial_step;
            values.push(f(&v));
            simplex.push(v);
        }

        let mut order: Vec<usize> = (0..=dim).collect();
        let mut trace = Vec::new();
        let mut centroid = vec![0.0; dim];
        let mut iterations = 0;
        let mut converged = false;

        while iterations < self.max_iter {
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let best = order[0];
            let worst = order[dim];
            let second_worst = order[dim - 1];

            let diameter = simplex
                .iter()
                .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            let spread = values[worst] - values[best];
            if diameter < self.tol && spread < self.tol {
                converged = true;
                break;
            }
            iterations += 1;

            centroid.iter_mut().for_each(|c| *c = 0.0);
            for &idx in &order[..dim] {
                for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                    *c += x;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= dim as f64);

            let along = |coef: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[worst])
                    .map(|(c, w)| c + coef * (c - w))
                    .collect()
            };

            let reflected = along(REFLECT);
            let fr = f(&reflected);
            if fr < values[best] {
                let expanded = along(EXPAND);
                let fe = f(&expanded);
                if fe < fr {
                    simplex[worst] = expanded;
                    values[worst] = fe;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                }
            } else if fr < values[second_worst] {
                simplex[worst] = reflected;
                values[worst] = fr;
            } else {
                let (candidate, fc) = if fr < values[worst] {
                    let c = along(REFLECT * CONTRACT);
                    let fc = f(&c);
                    (c, fc)
                } else {
                    let c = along(-CONTRACT);
                    let fc = f(&c);
                    (c, fc)
                };
                if fc < values[worst].min(fr) {
                    simplex[worst] = candidate;
                    values[worst] = fc;
                } else {
                    let anchor = simplex[best].clone();
                    for &idx in &order[1..] {
                        for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                            *x = a + SHRINK * (*x - a);
                        }
                        values[idx] = f(&simplex[idx]);
                    }
                }
            }
            trace.push(values.iter().copied().fold(f64::INFINITY, f64::min));
        }

        let best = (0..=dim)
            .min_by(|&a, &b| values[a].total_cmp(&values[b]))
            .expect("simplex is non-empty");
        Ok(OptimResult {
            argmin: simplex[best].clone(),
            objective_value: values[best],
            iterations,
            converged,
            trace,
        })
    }
}

/// Minimizes `objective` from `x0` with default simplex size.
pub fn nelder_mead<F>(objective: F, x0: &[f64], tol: f64, max_iter: usize) -> Result<OptimResult>
where
    F: FnMut(&[f64]) -> f64,
{
    NelderMead {
        tol,
        max_iter,
        ..NelderMead::default()
    }
    .minimize(objective, x0)
}
