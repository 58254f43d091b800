//! Quasi-Newton minimization with central-difference gradients.
//!
//! BFGS inverse-Hessian updates with an Armijo backtracking line search.
//! Restarts run in parallel from seeded starting points; the best result is
//! returned and ties go to the lower restart index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Central-difference step in radians.
    pub gradient_step: f64,
    pub gradient_tolerance: f64,
    /// Relative objective change that counts as stalled.
    pub objective_tolerance: f64,
    pub max_iterations: usize,
    /// Number of starting points; the first is always the zero vector.
    pub restarts: usize,
    pub seed: u64,
    /// Random starts are drawn uniformly from `[-init_scale, init_scale]`.
    pub init_scale: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            gradient_step: 1e-6,
            gradient_tolerance: 1e-8,
            objective_tolerance: 1e-10,
            max_iterations: 2000,
            restarts: 8,
            seed: 0,
            init_scale: 0.1,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("gradient_step", self.gradient_step),
            ("gradient_tolerance", self.gradient_tolerance),
            ("objective_tolerance", self.objective_tolerance),
            ("init_scale", self.init_scale),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 || self.restarts == 0 {
            return Err(Error::Config(
                "max_iterations and restarts must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub gradient_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// Gradient norm within tolerance, or within the finite-difference
    /// noise floor when that is larger.
    pub converged: bool,
    pub restart: usize,
    pub trace: Vec<TraceEntry>,
}

pub fn numerical_gradient<F>(f: &F, x: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + step;
            let up = f(&probe);
            probe[i] = orig - step;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * step)
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;
/// Upper bound on the length of a trial step, in radians.
const MAX_STEP: f64 = 1.0;
const STALL_ITERATIONS: usize = 3;
/// Relative objective difference below which two restarts tie.
const TIE_TOLERANCE: f64 = 1e-12;

/// Gradient norm that central differences cannot resolve below: rounding in
/// `f` of order `ε·|f|` divided by the step, summed over `n` components with
/// a factor of 40 for rounding accumulated over one evaluation.
pub fn gradient_noise_floor(n: usize, value: f64, step: f64) -> f64 {
    40.0 * (n as f64).sqrt() * f64::EPSILON * (1.0 + value.abs()) / step
}

fn gradient_met(gnorm: f64, n: usize, value: f64, config: &OptimizerConfig) -> bool {
    gnorm <= config.gradient_tolerance.max(gradient_noise_floor(n, value, config.gradient_step))
}

/// Rounding noise of `f` near `x`, measured from perturbations far too small
/// to change the true value.
fn measured_noise<F>(f: &F, x: &[f64], fx: f64) -> f64
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let mut probe = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len().min(16) {
        let orig = probe[i];
        probe[i] = orig + 1e-11 * (1.0 + orig.abs());
        let v = f(&probe);
        if v.is_finite() {
            worst = worst.max((v - fx).abs());
        }
        probe[i] = orig;
    }
    worst
}

/// Single BFGS run from `x0`.
pub fn bfgs<F>(f: &F, x0: &[f64], config: &OptimizerConfig) -> Minimum
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x);
    if n == 0 {
        return Minimum {
            params: x,
            value: fx,
            gradient_norm: 0.0,
            iterations: 0,
            converged: true,
            restart: 0,
            trace: vec![TraceEntry {
                iteration: 0,
                objective: fx,
                gradient_norm: 0.0,
            }],
        };
    }
    let mut g = numerical_gradient(f, &x, config.gradient_step);
    let mut h_inv = identity(n);
    let mut fresh_hessian = true;
    let mut trace = vec![TraceEntry {
        iteration: 0,
        objective: fx,
        gradient_norm: norm(&g),
    }];
    let mut stalled = 0;
    let mut iterations = 0;

    while iterations < config.max_iterations {
        let gnorm = norm(&g);
        if gradient_met(gnorm, n, fx, config) {
            break;
        }
        let mut p: Vec<f64> = h_inv.iter().map(|row| -dot(row, &g)).collect();
        let mut slope = dot(&g, &p);
        if !(slope < 0.0) {
            h_inv = identity(n);
            fresh_hessian = true;
            p = g.iter().map(|v| -v).collect();
            slope = -gnorm * gnorm;
        }
        let pnorm = norm(&p);
        let mut alpha = if pnorm > MAX_STEP { MAX_STEP / pnorm } else { 1.0 };

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = x.iter().zip(&p).map(|(xi, pi)| xi + alpha * pi).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + ARMIJO_C1 * alpha * slope {
                accepted = Some((trial, ft));
                break;
            }
            alpha *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if fresh_hessian {
                break;
            }
            h_inv = identity(n);
            fresh_hessian = true;
            continue;
        };
        iterations += 1;

        let g_new = numerical_gradient(f, &x_new, config.gradient_step);
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if fresh_hessian {
                let scale = sy / dot(&y, &y);
                for (i, row) in h_inv.iter_mut().enumerate() {
                    row.iter_mut().for_each(|v| *v = 0.0);
                    row[i] = scale;
                }
                fresh_hessian = false;
            }
            bfgs_update(&mut h_inv, &s, &y, sy);
        }

        let change = (fx - f_new).abs();
        x = x_new;
        g = g_new;
        let previous = fx;
        fx = f_new;
        trace.push(TraceEntry {
            iteration: iterations,
            objective: fx,
            gradient_norm: norm(&g),
        });
        if change <= config.objective_tolerance * (1.0 + previous.abs()) {
            stalled += 1;
            if stalled >= STALL_ITERATIONS {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let gradient_norm = norm(&g);
    // Central differences resolve the gradient only to about
    // √n·noise/step; a stalled run at that level counts as converged.
    let converged = gradient_met(gradient_norm, n, fx, config)
        || gradient_norm <= 4.0 * (n as f64).sqrt() * measured_noise(f, &x, fx) / config.gradient_step;
    Minimum {
        params: x,
        value: fx,
        gradient_norm,
        iterations,
        converged,
        restart: 0,
        trace,
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = h.iter().map(|row| dot(row, y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Deterministic starting points: the zero vector, then seeded uniform draws.
pub fn starting_points(dim: usize, config: &OptimizerConfig) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.restarts)
        .map(|r| {
            if r == 0 {
                vec![0.0; dim]
            } else {
                (0..dim)
                    .map(|_| rng.gen_range(-config.init_scale..=config.init_scale))
                    .collect()
            }
        })
        .collect()
}

/// Runs [`bfgs`] from every starting point and returns the lowest minimum;
/// restarts that tie within rounding go to the lower index.
pub fn minimize<F>(f: &F, dim: usize, config: &OptimizerConfig) -> Minimum
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let starts = starting_points(dim, config);
    let runs: Vec<Minimum> = starts
        .par_iter()
        .enumerate()
        .map(|(r, x0)| {
            let mut m = bfgs(f, x0, config);
            m.restart = r;
            m
        })
        .collect();
    let lowest = runs.iter().map(|m| m.value).fold(f64::INFINITY, f64::min);
    if !lowest.is_finite() {
        return runs.into_iter().next().expect("at least one restart");
    }
    // Values this close are the same minimum up to rounding; the lower
    // restart index wins.
    let tie = TIE_TOLERANCE * (1.0 + lowest.abs());
    runs.into_iter()
        .find(|m| m.value <= lowest + tie)
        .expect("the lowest run qualifies")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 0.5).powi(2)).sum::<f64>();
        let m = bfgs(&f, &[0.0; 5], &OptimizerConfig::default());
        assert!(m.converged);
        assert!(m.params.iter().all(|v| (v - 0.5).abs() < 1e-7));
    }

    #[test]
    fn rosenbrock_valley() {
        let config = OptimizerConfig {
            gradient_tolerance: 1e-7,
            ..OptimizerConfig::default()
        };
        let m = bfgs(&rosenbrock, &[-1.2, 1.0], &config);
        assert!((m.params[0] - 1.0).abs() < 1e-5, "{:?}", m.params);
        assert!((m.params[1] - 1.0).abs() < 1e-5);
        assert!(m.trace.windows(2).all(|w| w[1].objective <= w[0].objective));
    }

    #[test]
    fn gradient_matches_finer_step() {
        let f = |x: &[f64]| (x[0] * 1.3).sin() * (x[1] - 0.2).cos() + x[0] * x[1];
        let x = [0.4, -0.7];
        let g1 = numerical_gradient(&f, &x, 1e-6);
        let g2 = numerical_gradient(&f, &x, 1e-7);
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() <= 1e-4 * b.abs().max(1e-8));
        }
    }

    #[test]
    fn restarts_are_deterministic() {
        let config = OptimizerConfig {
            seed: 42,
            restarts: 4,
            ..OptimizerConfig::default()
        };
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] * 3.0).cos();
        let a = minimize(&f, 2, &config);
        let b = minimize(&f, 2, &config);
        assert_eq!(a.params, b.params);
        assert_eq!(a.restart, b.restart);
        let starts = starting_points(3, &config);
        assert_eq!(starts[0], vec![0.0; 3]);
        assert!(starts[1..].iter().flatten().all(|v| v.abs() <= 0.1));
    }

    #[test]
    fn near_ties_go_to_lower_restart() {
        // Every start reaches the same minimum; only rounding differs.
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() - 1.0;
        let m = minimize(&f, 3, &OptimizerConfig::default());
        assert_eq!(m.restart, 0);
        // A genuinely lower minimum still wins.
        let g = |x: &[f64]| (x[0] - 0.05).powi(2) * (x[0] + 0.05).powi(2) + 0.01 * x[0];
        let config = OptimizerConfig { seed: 7, ..OptimizerConfig::default() };
        let m = minimize(&g, 1, &config);
        assert!(m.params[0] < 0.0, "{:?}", m.params);
    }

    #[test]
    fn empty_parameter_vector() {
        let m = bfgs(&|_: &[f64]| 2.5, &[], &OptimizerConfig::default());
        assert!(m.converged);
        assert_eq!(m.value, 2.5);
    }

    #[test]
    fn noise_floor_scales_with_dimension_and_value() {
        let a = gradient_noise_floor(1, 0.0, 1e-6);
        assert!((gradient_noise_floor(4, 0.0, 1e-6) - 2.0 * a).abs() < 1e-24);
        assert!(gradient_noise_floor(1, 3.0, 1e-6) > 3.9 * a);
        // Below the default tolerance for a single parameter near zero.
        assert!(gradient_noise_floor(1, 0.0, 1e-6) < 1e-8);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig {
            gradient_step: 0.0,
            ..OptimizerConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
