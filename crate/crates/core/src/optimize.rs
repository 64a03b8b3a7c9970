//! Maximizing η over amplitudes restricted to a support pattern.
//!
//! The search runs a multi-start Nelder–Mead simplex over the raw real and
//! imaginary parts of the support amplitudes. During the ascent the objective
//! is the mean single-particle entropy without η's zero branch, so the
//! simplex still sees a signal on separable boundaries; the reported value is
//! the strict η of the final state.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::entropy::{eta_measure, partial_entropy, EPS_ZERO};
use crate::error::{Error, Result};
use crate::reduction::SubsetMask;
use crate::state::{PureState, SupportPattern};

pub const DEFAULT_RESTARTS: usize = 16;
pub const DEFAULT_MAX_ITERS: usize = 2000;
/// Simplex diameter below which a run counts as converged.
pub const SIMPLEX_TOL: f64 = 1e-10;

const INITIAL_STEP: f64 = 0.1;
const HISTORY_STRIDE: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best_state: PureState,
    pub best_eta: f64,
    pub restarts_used: usize,
    pub converged: bool,
    /// `(iteration, best value so far)` across all restarts in index order;
    /// iterations are cumulative over restarts.
    pub history: Vec<(usize, f64)>,
}

/// Normalized state for raw parameters `[re_0, im_0, re_1, im_1, …]`, with
/// the first amplitude rotated to be real and nonnegative.
pub fn params_to_state(raw: &[f64], pattern: &SupportPattern) -> Result<PureState> {
    if raw.len() != 2 * pattern.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters for a support of size {}",
            raw.len(),
            pattern.len()
        )));
    }
    let mut values: Vec<Complex64> = raw.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    if let Some(first) = values.first().copied() {
        if first.norm() > 0.0 {
            let phase = first.conj() / first.norm();
            values.iter_mut().for_each(|v| *v *= phase);
        }
    }
    pattern.state_from_values(&values)
}

/// Strict η of the state encoded by `raw`.
pub fn eta_objective(raw: &[f64], pattern: &SupportPattern) -> Result<f64> {
    eta_measure(&params_to_state(raw, pattern)?)
}

/// Mean single-particle entropy, the ascent signal.
fn mean_single_entropy(state: &PureState) -> Result<f64> {
    let n = state.n_particles();
    let mut total = 0.0;
    for p in 1..=n {
        total += partial_entropy(state, &SubsetMask::from_particles(n, &[p])?)?;
    }
    Ok(total / n as f64)
}

struct SimplexRun {
    best: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
    history: Vec<(usize, f64)>,
}

/// Nelder–Mead minimization of `f` from `start`.
fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    step: f64,
    max_iters: usize,
) -> SimplexRun {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let along = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if iterations % HISTORY_STRIDE == 0 {
            history.push((iterations, -values[0]));
        }
        if diameter < SIMPLEX_TOL {
            converged = true;
            break;
        }
        if iterations >= max_iters {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for v in &simplex[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let reflected = along(&centroid, &worst, -REFLECT);
        let f_reflected = f(&reflected);

        if f_reflected < values[0] {
            let expanded = along(&centroid, &worst, -EXPAND);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                simplex[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_reflected;
            }
        } else if f_reflected < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_reflected;
        } else {
            let (candidate, f_candidate) = if f_reflected < values[dim] {
                let outside = along(&centroid, &reflected, CONTRACT);
                let fo = f(&outside);
                (outside, fo)
            } else {
                let inside = along(&centroid, &worst, CONTRACT);
                let fi = f(&inside);
                (inside, fi)
            };
            if f_candidate < values[dim].min(f_reflected) {
                simplex[dim] = candidate;
                values[dim] = f_candidate;
            } else {
                let best = simplex[0].clone();
                for i in 1..=dim {
                    simplex[i] = along(&best, &simplex[i], SHRINK);
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    history.push((iterations, -values[0]));
    SimplexRun {
        best: simplex[0].clone(),
        value: values[0],
        iterations,
        converged,
        history,
    }
}

/// Multi-start maximization of η on `pattern`.
///
/// Restarts run concurrently; each draws its starting point from its own
/// seed derived from `seed`, so the result does not depend on scheduling.
/// Ties on η go to the lowest restart index.
pub fn maximize_eta(
    pattern: &SupportPattern,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<OptimizationResult> {
    if restarts == 0 {
        return Err(Error::Infeasible("at least one restart is required".into()));
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..restarts).map(|_| seeder.gen()).collect();

    let objective = |x: &[f64]| -> f64 {
        params_to_state(x, pattern)
            .and_then(|s| mean_single_entropy(&s))
            .map_or(f64::INFINITY, |v| -v)
    };

    let runs: Vec<(SimplexRun, PureState, f64)> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let start: Vec<f64> = (0..2 * pattern.len())
                .map(|_| rng.sample(StandardNormal))
                .collect();
            let run = nelder_mead(objective, &start, INITIAL_STEP, max_iters);
            let state = params_to_state(&run.best, pattern)?;
            let eta = eta_measure(&state)?;
            Ok((run, state, eta))
        })
        .collect::<Result<_>>()?;

    let mut history = Vec::new();
    let mut envelope = f64::NEG_INFINITY;
    let mut offset = 0;
    for (run, _, _) in &runs {
        for &(it, v) in &run.history {
            envelope = envelope.max(v);
            history.push((offset + it, envelope));
        }
        offset += run.iterations;
    }

    let mut best = 0;
    for (i, (_, _, eta)) in runs.iter().enumerate() {
        if *eta > runs[best].2 {
            best = i;
        }
    }
    let (run, state, eta) = &runs[best];
    if *eta <= EPS_ZERO {
        return Err(Error::Infeasible(format!(
            "η vanishes at every optimum found on support {:?}; the pattern forces separability",
            pattern.bitstrings()
        )));
    }
    debug_assert!(run.value.is_finite());
    Ok(OptimizationResult {
        best_state: state.clone(),
        best_eta: *eta,
        restarts_used: restarts,
        converged: run.converged,
        history,
    })
}
