//! Partial von Neumann entropies, the genuine-entanglement measure η, and
//! classification of a pure state by its finest separable partition.
//!
//! η is the mean single-particle entropy when every proper-subset entropy is
//! nonzero, and zero otherwise. A second, independent route to separability
//! is the rank of the amplitude tensor across a cut ([`factorization_oracle`]).

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::reduction::{
    self, cut_matrix, partial_trace, DensityMatrix, ReductionScope, SubsetMask,
};
use crate::state::{embed_product, PureState};

/// Entropies (in bits) at or below this count as zero.
pub const EPS_ZERO: f64 = 1e-9;

/// Slack on entropy bounds and complement equality.
pub const EPS_S: f64 = 1e-9;

/// Tensor-product reconstruction tolerance for extracted factors.
pub const FACTOR_TOL: f64 = 1e-8;

/// Numerical knobs for the measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    /// Zero threshold for entropies and relative second singular values.
    pub zero_tol: f64,
    pub scope: ReductionScope,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self {
            zero_tol: EPS_ZERO,
            scope: ReductionScope::SymmetryCompleted,
        }
    }
}

/// −Σ λ log₂ λ with 0·log 0 = 0.
pub fn entropy_from_spectrum(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum();
    s.clamp(0.0, (spectrum.len().max(1) as f64).log2())
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_from_spectrum(&rho.spectrum()?))
}

/// Entropy of the reduction of `state` onto `kept`.
pub fn partial_entropy(state: &PureState, kept: &SubsetMask) -> Result<f64> {
    von_neumann_entropy(&partial_trace(state, kept)?)
}

/// Partial entropies of every proper subset, in series order: all
/// (N−1)-particle reductions first, lexicographic within each size.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    n: usize,
    entries: Vec<(SubsetMask, f64)>,
}

impl EntropyReport {
    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(SubsetMask, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, kept: &SubsetMask) -> Option<f64> {
        self.entries
            .iter()
            .find(|(m, _)| m == kept)
            .map(|&(_, s)| s)
    }

    /// Entropy of the subset given as a particle list.
    pub fn get_particles(&self, particles: &[usize]) -> Option<f64> {
        SubsetMask::from_particles(self.n, particles)
            .ok()
            .and_then(|m| self.get(&m))
    }

    /// S_(i) for i = 1..=N.
    pub fn single_particle(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|p| self.get_particles(&[p]).expect("report covers singletons"))
            .collect()
    }

    pub fn min_entropy(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, s)| s)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn full_report(state: &PureState) -> Result<EntropyReport> {
    full_report_with(state, ReductionScope::default())
}

pub fn full_report_with(state: &PureState, scope: ReductionScope) -> Result<EntropyReport> {
    let n = state.n_particles();
    if n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "entropy report needs at least 2 particles, got {n}"
        )));
    }
    let masks = reduction::enumerate_all(n)?;
    let explicit = |m: &SubsetMask| match scope {
        ReductionScope::AllProper => true,
        ReductionScope::SymmetryCompleted => 2 * m.len() <= n,
    };
    let computed: Vec<Option<f64>> = masks
        .par_iter()
        .map(|m| explicit(m).then(|| partial_entropy(state, m)).transpose())
        .collect::<Result<_>>()?;
    let entries = masks
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let s = computed[i].unwrap_or_else(|| {
                let j = masks
                    .iter()
                    .position(|c| *c == m.complement())
                    .expect("complement enumerated");
                computed[j].expect("complement computed explicitly")
            });
            (*m, s)
        })
        .collect();
    Ok(EntropyReport { n, entries })
}

/// η from a precomputed report.
pub fn eta_from_report(report: &EntropyReport, zero_tol: f64) -> f64 {
    if report.min_entropy() <= zero_tol {
        return 0.0;
    }
    let singles = report.single_particle();
    (singles.iter().sum::<f64>() / singles.len() as f64).clamp(0.0, 1.0)
}

pub fn eta_measure(state: &PureState) -> Result<f64> {
    eta_measure_with(state, &MeasureOptions::default())
}

pub fn eta_measure_with(state: &PureState, opts: &MeasureOptions) -> Result<f64> {
    Ok(eta_from_report(
        &full_report_with(state, opts.scope)?,
        opts.zero_tol,
    ))
}

/// Whether the amplitude tensor has numerical rank one across the
/// `block | complement` cut, i.e. the state factorizes there.
pub fn factorization_oracle(state: &PureState, block: &SubsetMask) -> Result<bool> {
    factorization_oracle_with(state, block, EPS_ZERO)
}

pub fn factorization_oracle_with(
    state: &PureState,
    block: &SubsetMask,
    zero_tol: f64,
) -> Result<bool> {
    let (rows, cols, data) = cut_matrix(state, block)?;
    let sv = linalg::singular_values(rows, cols, &data)?;
    Ok(sv.len() < 2 || sv[1] <= zero_tol * sv[0])
}

/// Splits a state that factorizes across `block | complement` into its two
/// normalized factors, block first. Each factor orders its particles as in
/// the original state.
pub fn extract_factors(state: &PureState, block: &SubsetMask) -> Result<(PureState, PureState)> {
    extract_factors_with(state, block, FACTOR_TOL)
}

/// [`extract_factors`] with an explicit bound on the reconstruction residual.
pub fn extract_factors_with(
    state: &PureState,
    block: &SubsetMask,
    tol: f64,
) -> Result<(PureState, PureState)> {
    let (rows, cols, m) = cut_matrix(state, block)?;
    let best_col = (0..cols)
        .map(|c| {
            (
                c,
                (0..rows).map(|r| m[r * cols + c].norm_sqr()).sum::<f64>(),
            )
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(c, _)| c)
        .expect("at least one column");
    let left: Vec<_> = (0..rows).map(|r| m[r * cols + best_col]).collect();
    let left_norm = left.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let left: Vec<_> = left.iter().map(|z| z / left_norm).collect();
    let right: Vec<_> = (0..cols)
        .map(|c| (0..rows).map(|r| left[r].conj() * m[r * cols + c]).sum())
        .collect();

    let fail = |e: Error| Error::FactorExtractionFailure(e.to_string());
    let a = PureState::from_amplitudes(block.len(), left).map_err(fail)?;
    let b = PureState::from_amplitudes(state.n_particles() - block.len(), right).map_err(fail)?;
    let rebuilt = embed_product(
        state.n_particles(),
        &[(block.particles(), a.clone()), (block.traced(), b.clone())],
    )?;
    let residual = rebuilt.distance_up_to_phase(state);
    if residual > tol {
        return Err(Error::FactorExtractionFailure(format!(
            "state does not factor across {block}: reconstruction residual {residual:e}"
        )));
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    FullySeparable,
    PartiallyEntangled,
    GenuinelyEntangled,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::FullySeparable => "FullySeparable",
            Verdict::PartiallyEntangled => "PartiallyEntangled",
            Verdict::GenuinelyEntangled => "GenuinelyEntangled",
        })
    }
}

/// A partition block together with its factor state.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    /// 1-based particles, ascending.
    pub particles: Vec<usize>,
    pub factor: PureState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub eta: f64,
    /// Finest separable partition, blocks ordered by their smallest particle.
    pub partition: Vec<Vec<usize>>,
    pub factors: Vec<Block>,
    pub report: EntropyReport,
}

/// First zero-entropy cut, smallest side first and lexicographic within a size.
/// Only subsets of at most half the particles are tried; a cut and its
/// complement are the same split.
fn find_zero_cut(
    n: usize,
    zero_tol: f64,
    mut entropy_of: impl FnMut(&SubsetMask) -> Result<f64>,
) -> Result<Option<SubsetMask>> {
    for size in 1..=n / 2 {
        for mask in reduction::enumerate_subsets(n, n - size)? {
            if entropy_of(&mask)? <= zero_tol {
                return Ok(Some(mask));
            }
        }
    }
    Ok(None)
}

/// Reconstruction bound matching an entropy threshold. A cut with entropy at
/// most `zero_tol` has second Schmidt weight at most `zero_tol`, so the
/// product approximation is off by at most about its square root.
pub fn factor_tolerance(zero_tol: f64) -> f64 {
    if zero_tol <= EPS_ZERO {
        FACTOR_TOL
    } else {
        FACTOR_TOL.max(2.0 * zero_tol.sqrt())
    }
}

fn split_recursive(
    state: PureState,
    labels: Vec<usize>,
    zero_tol: f64,
    top: Option<&EntropyReport>,
    out: &mut Vec<Block>,
) -> Result<()> {
    let n = state.n_particles();
    if n == 1 {
        out.push(Block {
            particles: labels,
            factor: state,
        });
        return Ok(());
    }
    let cut = match top {
        Some(report) => find_zero_cut(n, zero_tol, |m| {
            report
                .get(m)
                .ok_or_else(|| Error::DimensionMismatch(format!("report lacks {m}")))
        })?,
        None => find_zero_cut(n, zero_tol, |m| partial_entropy(&state, m))?,
    };
    let Some(cut) = cut else {
        out.push(Block {
            particles: labels,
            factor: state,
        });
        return Ok(());
    };
    let (inside, outside) = extract_factors_with(&state, &cut, factor_tolerance(zero_tol))?;
    let relabel = |ps: Vec<usize>| ps.into_iter().map(|p| labels[p - 1]).collect::<Vec<_>>();
    split_recursive(inside, relabel(cut.particles()), zero_tol, None, out)?;
    split_recursive(outside, relabel(cut.traced()), zero_tol, None, out)
}

pub fn classify(state: &PureState) -> Result<Classification> {
    classify_with(state, &MeasureOptions::default())
}

pub fn classify_with(state: &PureState, opts: &MeasureOptions) -> Result<Classification> {
    let report = full_report_with(state, opts.scope)?;
    let eta = eta_from_report(&report, opts.zero_tol);
    let n = state.n_particles();

    let mut factors = Vec::new();
    split_recursive(
        state.clone(),
        (1..=n).collect(),
        opts.zero_tol,
        Some(&report),
        &mut factors,
    )?;
    factors.sort_by_key(|b| b.particles[0]);
    let partition: Vec<Vec<usize>> = factors.iter().map(|b| b.particles.clone()).collect();

    let verdict = if partition.len() == 1 {
        Verdict::GenuinelyEntangled
    } else if partition.iter().all(|b| b.len() == 1) {
        Verdict::FullySeparable
    } else {
        Verdict::PartiallyEntangled
    };
    if (verdict == Verdict::GenuinelyEntangled) != (eta > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "partition {partition:?} inconsistent with eta {eta}"
        )));
    }
    Ok(Classification {
        verdict,
        eta,
        partition,
        factors,
        report,
    })
}
