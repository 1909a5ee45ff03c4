//! Numerical minimization of `π_ME` over normalized pure states.
//!
//! Points are raw vectors of `2^(n+1)` reals holding interleaved real and
//! imaginary parts of the amplitudes. The objective normalizes internally,
//! which makes it homogeneous of degree zero: no sphere chart is needed, and
//! the gradient at a unit vector is automatically tangent to the sphere.
//!
//! Writing `P(ψ)` for the mean of `Tr ρ_A²` over balanced subsets evaluated
//! on the unnormalized vector, `P` is a quartic and the objective is
//! `f(x) = P(ψ) / ‖ψ‖⁴`. With `ρ_A = M_A M_A†` for the reshaped amplitude
//! matrix `M_A`, the real gradient of `Tr ρ_A²` packed as a complex number is
//! `4 ρ_A M_A`, hence
//!
//! ```text
//! ∇f = ∇P / ‖ψ‖⁴ − 4 P ψ / ‖ψ‖⁶
//! ```

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{make_state, NormalizePolicy, PureState};
use crate::reduction::{balanced_subsets, frobenius_sqr, Split};

/// Largest register the minimizer accepts.
pub const MAX_SEARCH_QUBITS: usize = 10;

const ARMIJO: f64 = 1e-4;
const SHRINK: f64 = 0.5;
const INITIAL_STEP: f64 = 1.0;

/// `π_ME` as a function of an unconstrained real vector, with cached index
/// maps for a fixed register size.
#[derive(Debug, Clone)]
pub struct PotentialObjective {
    n_qubits: usize,
    splits: Vec<Split>,
}

impl PotentialObjective {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::Arity {
                min: 2,
                found: n_qubits,
            });
        }
        if n_qubits > MAX_SEARCH_QUBITS {
            return Err(Error::Config(format!(
                "at most {MAX_SEARCH_QUBITS} qubits supported, got {n_qubits}"
            )));
        }
        let splits = balanced_subsets(n_qubits)
            .iter()
            .map(|keep| Split::new(n_qubits, keep))
            .collect::<Result<_>>()?;
        Ok(PotentialObjective { n_qubits, splits })
    }

    /// Objective for a point of length `2^(n+1)`, inferring `n`.
    pub fn for_point(point: &[f64]) -> Result<Self> {
        let len = point.len();
        if len < 8 || !len.is_power_of_two() {
            return Err(Error::Dimension {
                n_qubits: (len.max(2).ilog2() as usize).saturating_sub(1),
                expected: len.max(8).next_power_of_two(),
                found: len,
            });
        }
        Self::new(len.ilog2() as usize - 1)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        2 << self.n_qubits
    }

    fn amplitudes(&self, point: &[f64]) -> Result<(Vec<Complex64>, f64)> {
        if point.len() != self.dim() {
            return Err(Error::Dimension {
                n_qubits: self.n_qubits,
                expected: self.dim(),
                found: point.len(),
            });
        }
        let r2: f64 = point.iter().map(|x| x * x).sum();
        if !(r2 > 0.0) || !r2.is_finite() {
            return Err(Error::DegeneratePoint);
        }
        let amps = point
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Ok((amps, r2))
    }

    /// `π_ME` of `point / ‖point‖`.
    pub fn value(&self, point: &[f64]) -> Result<f64> {
        let (amps, r2) = self.amplitudes(point)?;
        let inv = 1.0 / r2.sqrt();
        let amps: Vec<Complex64> = amps.into_iter().map(|a| a * inv).collect();
        let total: f64 = self.splits.iter().map(|s| frobenius_sqr(&s.reduce(&amps))).sum();
        Ok(total / self.splits.len() as f64)
    }

    /// Objective value and exact gradient.
    pub fn value_and_gradient(&self, point: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (amps, r2) = self.amplitudes(point)?;
        let count = self.splits.len() as f64;
        let mut p = 0.0;
        let mut grad_p = vec![Complex64::new(0.0, 0.0); amps.len()];
        for split in &self.splits {
            let m = split.reshape(&amps);
            let rho = split.reduce(&amps);
            p += frobenius_sqr(&rho);
            let (rows, cols) = (split.rows(), split.cols());
            for (i, g) in grad_p.iter_mut().enumerate() {
                let (x, z) = (split.row_of(i), split.col_of(i));
                let rho_m: Complex64 = (0..rows).map(|y| rho[x * rows + y] * m[y * cols + z]).sum();
                *g += 4.0 * rho_m;
            }
        }
        p /= count;
        let r4 = r2 * r2;
        let value = p / r4;
        let mut grad = Vec::with_capacity(point.len());
        for (g, a) in grad_p.iter().zip(&amps) {
            let v = g / (count * r4) - a * (4.0 * p / (r4 * r2));
            grad.push(v.re);
            grad.push(v.im);
        }
        Ok((value, grad))
    }
}

/// `π_ME` of the normalized state encoded by `point`.
pub fn objective(point: &[f64]) -> Result<f64> {
    PotentialObjective::for_point(point)?.value(point)
}

/// Exact gradient of [`objective`].
pub fn gradient(point: &[f64]) -> Result<Vec<f64>> {
    Ok(PotentialObjective::for_point(point)?.value_and_gradient(point)?.1)
}

/// Interleaved `[re0, im0, re1, im1, ...]` encoding of a state.
pub fn encode(state: &PureState) -> Vec<f64> {
    state.amplitudes().iter().flat_map(|a| [a.re, a.im]).collect()
}

/// State of `point / ‖point‖`.
pub fn decode(point: &[f64]) -> Result<PureState> {
    let amps: Vec<Complex64> = point
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect();
    if amps.is_empty() || !amps.len().is_power_of_two() || !point.len().is_multiple_of(2) {
        return Err(Error::Dimension {
            n_qubits: 0,
            expected: point.len().next_power_of_two(),
            found: point.len(),
        });
    }
    let n = amps.len().trailing_zeros() as usize;
    make_state(n, amps, NormalizePolicy::Renormalize).map_err(|e| match e {
        Error::DegenerateState | Error::Normalization { .. } => Error::DegeneratePoint,
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    ProjectedGradient,
    AnnealThenPolish,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projected_gradient" => Ok(Method::ProjectedGradient),
            "anneal_then_polish" => Ok(Method::AnnealThenPolish),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub n_qubits: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once an accepted step moves less than this.
    pub step_tol: f64,
    /// Stop once an accepted step lowers the objective by less than this.
    pub objective_tol: f64,
    /// Stop once the tangential gradient norm falls below this.
    pub grad_tol: f64,
    pub seed: u64,
    pub method: Method,
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        MinimizeConfig {
            n_qubits: 4,
            restarts: 20,
            max_iters: 5000,
            step_tol: 1e-10,
            objective_tol: 1e-12,
            grad_tol: 1e-9,
            seed: 0,
            method: Method::ProjectedGradient,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::Arity {
                min: 2,
                found: self.n_qubits,
            });
        }
        if self.n_qubits > MAX_SEARCH_QUBITS {
            return Err(Error::Config(format!(
                "n_qubits = {} exceeds {MAX_SEARCH_QUBITS}",
                self.n_qubits
            )));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        for (name, v) in [
            ("step_tol", self.step_tol),
            ("objective_tol", self.objective_tol),
            ("grad_tol", self.grad_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub iteration: usize,
    pub value: f64,
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub restart: usize,
    pub final_value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<TraceSample>,
    #[serde(skip)]
    pub state: Option<PureState>,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub best_state: PureState,
    pub best_value: f64,
    pub best_restart: usize,
    pub seed: u64,
    pub restarts: Vec<RestartOutcome>,
}

impl MinimizeResult {
    /// Write the trace as CSV with header `iteration,restart,value`.
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iteration,restart,value")?;
        for r in &self.restarts {
            for s in &r.trace {
                writeln!(out, "{},{},{:?}", s.iteration, r.restart, s.value)?;
            }
        }
        Ok(())
    }
}

/// Independent random stream for one restart.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn normalize(x: &mut [f64]) {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= r);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn random_point(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if dot(&x, &x) > 0.0 {
            normalize(&mut x);
            return x;
        }
    }
}

struct Descent {
    x: Vec<f64>,
    converged: bool,
    iterations: usize,
}

/// Projected gradient descent with Armijo backtracking from the unit vector
/// `x`. Appends one trace sample per accepted step.
fn projected_gradient(
    obj: &PotentialObjective,
    cfg: &MinimizeConfig,
    mut x: Vec<f64>,
    trace: &mut Vec<TraceSample>,
    iter_offset: usize,
) -> Result<Descent> {
    let (mut value, mut g) = obj.value_and_gradient(&x)?;
    trace.push(TraceSample {
        iteration: iter_offset,
        value,
    });
    let mut trial = vec![0.0; x.len()];
    for iter in 1..=cfg.max_iters {
        // Remove the radial component left by rounding.
        let radial = dot(&g, &x);
        g.iter_mut().zip(&x).for_each(|(gi, xi)| *gi -= radial * xi);
        let gnorm2 = dot(&g, &g);
        if gnorm2.sqrt() < cfg.grad_tol {
            return Ok(Descent {
                x,
                converged: true,
                iterations: iter - 1,
            });
        }
        let mut step = INITIAL_STEP;
        let accepted = loop {
            if step * gnorm2.sqrt() < cfg.step_tol {
                break None;
            }
            trial
                .iter_mut()
                .zip(x.iter().zip(&g))
                .for_each(|(t, (xi, gi))| *t = xi - step * gi);
            normalize(&mut trial);
            let f = obj.value(&trial)?;
            if f <= value - ARMIJO * step * gnorm2 {
                break Some(f);
            }
            step *= SHRINK;
        };
        let Some(f) = accepted else {
            return Ok(Descent {
                x,
                converged: true,
                iterations: iter - 1,
            });
        };
        let decrease = value - f;
        std::mem::swap(&mut x, &mut trial);
        let (v, grad) = obj.value_and_gradient(&x)?;
        value = v;
        g = grad;
        trace.push(TraceSample {
            iteration: iter_offset + iter,
            value,
        });
        if decrease < cfg.objective_tol {
            return Ok(Descent {
                x,
                converged: true,
                iterations: iter,
            });
        }
    }
    Ok(Descent {
        x,
        converged: false,
        iterations: cfg.max_iters,
    })
}

/// Temperature ladder for the annealing phase: geometric from `T_HOT` to
/// `T_COLD`, `SWEEPS` proposals per rung.
const T_HOT: f64 = 0.05;
const T_COLD: f64 = 1e-4;
const RUNGS: usize = 30;
const SWEEPS: usize = 100;

/// Metropolis random walk on the unit sphere; returns the best point seen.
fn anneal(
    obj: &PotentialObjective,
    mut x: Vec<f64>,
    rng: &mut ChaCha8Rng,
    trace: &mut Vec<TraceSample>,
) -> Result<(Vec<f64>, usize)> {
    let mut value = obj.value(&x)?;
    let mut best = (x.clone(), value);
    let ratio = (T_COLD / T_HOT).powf(1.0 / (RUNGS - 1) as f64);
    let mut temp = T_HOT;
    let mut iteration = 0;
    let mut proposal = vec![0.0; x.len()];
    trace.push(TraceSample {
        iteration,
        value,
    });
    for _ in 0..RUNGS {
        // Proposal width shrinks with temperature.
        let sigma = 0.5 * temp.sqrt();
        for _ in 0..SWEEPS {
            iteration += 1;
            for (p, xi) in proposal.iter_mut().zip(&x) {
                let noise: f64 = rng.sample(StandardNormal);
                *p = xi + sigma * noise;
            }
            normalize(&mut proposal);
            let f = obj.value(&proposal)?;
            let accept = f <= value || rng.random::<f64>() < ((value - f) / temp).exp();
            if accept {
                std::mem::swap(&mut x, &mut proposal);
                value = f;
                if value < best.1 {
                    best = (x.clone(), value);
                }
            }
            trace.push(TraceSample { iteration, value });
        }
        temp *= ratio;
    }
    Ok((best.0, iteration))
}

fn run_restart(obj: &PotentialObjective, cfg: &MinimizeConfig, restart: usize) -> Result<RestartOutcome> {
    let mut rng = restart_rng(cfg.seed, restart);
    let start = random_point(obj.dim(), &mut rng);
    let mut trace = Vec::new();
    let descent = match cfg.method {
        Method::ProjectedGradient => projected_gradient(obj, cfg, start, &mut trace, 0)?,
        Method::AnnealThenPolish => {
            let (x, offset) = anneal(obj, start, &mut rng, &mut trace)?;
            let mut d = projected_gradient(obj, cfg, x, &mut trace, offset + 1)?;
            d.iterations += offset;
            d
        }
    };
    let state = decode(&descent.x)?;
    // Recomputed on the stored state so `best_value == pi_me(best_state)` exactly.
    let final_value = crate::potential::pi_me(&state)?;
    Ok(RestartOutcome {
        restart,
        final_value,
        converged: descent.converged,
        iterations: descent.iterations,
        trace,
        state: Some(state),
    })
}

/// Multi-start minimization of `π_ME`. Restarts run in parallel; the result
/// depends only on `cfg`.
pub fn minimize_potential(cfg: &MinimizeConfig) -> Result<MinimizeResult> {
    cfg.validate()?;
    let obj = PotentialObjective::new(cfg.n_qubits)?;
    let restarts: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&obj, cfg, r))
        .collect::<Result<_>>()?;
    let best = restarts
        .iter()
        .min_by(|a, b| a.final_value.total_cmp(&b.final_value).then(a.restart.cmp(&b.restart)))
        .expect("at least one restart");
    Ok(MinimizeResult {
        best_state: best.state.clone().expect("restart state present"),
        best_value: best.final_value,
        best_restart: best.restart,
        seed: cfg.seed,
        restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::catalog_lookup;

    /// Central differences, independent of the analytic route.
    fn fd_gradient(point: &[f64], h: f64) -> Vec<f64> {
        let mut x = point.to_vec();
        (0..point.len())
            .map(|k| {
                let orig = x[k];
                x[k] = orig + h;
                let fp = objective(&x).unwrap();
                x[k] = orig - h;
                let fm = objective(&x).unwrap();
                x[k] = orig;
                (fp - fm) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn objective_examples() {
        let mut e0 = vec![0.0; 32];
        e0[0] = 1.0;
        assert_eq!(objective(&e0).unwrap(), 1.0);
        let hs = encode(&catalog_lookup("hs/omega").unwrap());
        assert!((objective(&hs).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let hs2: Vec<f64> = hs.iter().map(|v| 2.0 * v).collect();
        assert!((objective(&hs2).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn objective_errors() {
        assert!(matches!(objective(&[0.0; 32]), Err(Error::DegeneratePoint)));
        assert!(matches!(objective(&[f64::NAN; 32]), Err(Error::DegeneratePoint)));
        assert!(matches!(objective(&[1.0; 4]), Err(Error::Dimension { .. })));
        assert!(matches!(objective(&[1.0; 12]), Err(Error::Dimension { .. })));
        assert!(matches!(gradient(&[0.0; 8]), Err(Error::DegeneratePoint)));
    }

    #[test]
    fn gradient_is_tangent_at_basis_state() {
        let mut e0 = vec![0.0; 32];
        e0[0] = 1.0;
        let g = gradient(&e0).unwrap();
        assert!(dot(&g, &e0).abs() < 1e-15);
    }

    #[test]
    fn gradient_vanishes_at_hs() {
        let hs = encode(&catalog_lookup("hs/omega").unwrap());
        let g = gradient(&hs).unwrap();
        assert!(dot(&g, &g).sqrt() < 1e-8);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for n in 2..=5 {
            let mut rng = restart_rng(100 + n as u64, 0);
            for _ in 0..10 {
                let x: Vec<f64> = (0..2 << n).map(|_| rng.sample(StandardNormal)).collect();
                let g = gradient(&x).unwrap();
                let fd = fd_gradient(&x, 1e-5);
                let err = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let scale = dot(&fd, &fd).sqrt();
                assert!(err <= 1e-5 * scale, "n={n}: {err} vs {scale}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let ok = MinimizeConfig::default();
        assert!(ok.validate().is_ok());
        let bad = [
            MinimizeConfig { n_qubits: 1, ..ok.clone() },
            MinimizeConfig { n_qubits: 11, ..ok.clone() },
            MinimizeConfig { restarts: 0, ..ok.clone() },
            MinimizeConfig { max_iters: 0, ..ok.clone() },
            MinimizeConfig { step_tol: 0.0, ..ok.clone() },
            MinimizeConfig { objective_tol: -1.0, ..ok.clone() },
            MinimizeConfig { grad_tol: f64::NAN, ..ok.clone() },
        ];
        for cfg in bad {
            assert!(minimize_potential(&cfg).is_err(), "{cfg:?}");
        }
        assert!("nope".parse::<Method>().is_err());
        assert_eq!("anneal_then_polish".parse::<Method>().unwrap(), Method::AnnealThenPolish);
    }

    #[test]
    fn two_qubits_reach_bell_value() {
        let cfg = MinimizeConfig {
            n_qubits: 2,
            restarts: 5,
            seed: 1,
            ..Default::default()
        };
        let r = minimize_potential(&cfg).unwrap();
        assert!((r.best_value - 0.5).abs() < 1e-9, "{}", r.best_value);
    }

    #[test]
    fn three_qubits_reach_ghz_value() {
        let cfg = MinimizeConfig {
            n_qubits: 3,
            restarts: 10,
            seed: 2,
            ..Default::default()
        };
        let r = minimize_potential(&cfg).unwrap();
        assert!((r.best_value - 0.5).abs() < 1e-6, "{}", r.best_value);
    }

    #[test]
    fn deterministic_and_monotone() {
        let cfg = MinimizeConfig {
            n_qubits: 3,
            restarts: 4,
            max_iters: 200,
            seed: 77,
            ..Default::default()
        };
        let a = minimize_potential(&cfg).unwrap();
        let b = minimize_potential(&cfg).unwrap();
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.restarts, b.restarts);
        for r in &a.restarts {
            for w in r.trace.windows(2) {
                assert!(w[1].value <= w[0].value, "restart {}", r.restart);
            }
            assert!(a.best_value <= r.final_value);
        }
        assert!((a.best_state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn anneal_then_polish_runs() {
        let cfg = MinimizeConfig {
            n_qubits: 2,
            restarts: 2,
            seed: 5,
            method: Method::AnnealThenPolish,
            ..Default::default()
        };
        let r = minimize_potential(&cfg).unwrap();
        assert!((r.best_value - 0.5).abs() < 1e-9);
        let again = minimize_potential(&cfg).unwrap();
        assert_eq!(r.restarts, again.restarts);
    }

    #[test]
    fn trace_csv() {
        let cfg = MinimizeConfig {
            n_qubits: 2,
            restarts: 2,
            max_iters: 3,
            ..Default::default()
        };
        let r = minimize_potential(&cfg).unwrap();
        let mut buf = Vec::new();
        r.write_trace_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("iteration,restart,value"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), r.restarts.iter().map(|r| r.trace.len()).sum::<usize>());
        assert!(rows[0].starts_with("0,0,"));
    }
}
