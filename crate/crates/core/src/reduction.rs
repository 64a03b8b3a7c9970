//! Particle subsets and reduced density matrices.
//!
//! Each reduction is indexed by the set of particles that are *kept*. A
//! subset mask stores particle `i` (1-based) in bit `i - 1`; this is
//! independent of the basis-index convention in [`crate::state`].

use std::fmt;

use itertools::Itertools;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, SquareMatrix};
use crate::state::{particle_bit, PureState, EPS_NORM};

/// Hermiticity tolerance.
pub const EPS_HERM: f64 = 1e-10;
/// Eigenvalues in `(-EPS_EIG, 0)` are rounded to zero; anything lower is a failure.
pub const EPS_EIG: f64 = 1e-9;

/// A proper, nonempty set of kept particles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    n: usize,
    kept: u32,
}

impl SubsetMask {
    pub fn new(n: usize, kept: u32) -> Result<Self> {
        let size = kept.count_ones() as usize;
        if n == 0 || n > 31 || kept >> n != 0 || size == 0 || size >= n {
            return Err(Error::DimensionMismatch(format!(
                "mask {kept:#b} is not a proper nonempty subset of {n} particles"
            )));
        }
        Ok(Self { n, kept })
    }

    /// Mask keeping the listed 1-based particles.
    pub fn from_particles(n: usize, particles: &[usize]) -> Result<Self> {
        let mut kept = 0u32;
        for &p in particles {
            if p == 0 || p > n || p > 31 {
                return Err(Error::DimensionMismatch(format!(
                    "particle {p} outside 1..={n}"
                )));
            }
            kept |= 1 << (p - 1);
        }
        Self::new(n, kept)
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.kept
    }

    /// Number of kept particles.
    pub fn len(&self) -> usize {
        self.kept.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.kept == 0
    }

    pub fn contains(&self, particle: usize) -> bool {
        particle >= 1 && particle <= self.n && self.kept & (1 << (particle - 1)) != 0
    }

    /// Kept particles, ascending.
    pub fn particles(&self) -> Vec<usize> {
        (1..=self.n).filter(|&p| self.contains(p)).collect()
    }

    /// Traced-out particles, ascending.
    pub fn traced(&self) -> Vec<usize> {
        (1..=self.n).filter(|&p| !self.contains(p)).collect()
    }

    pub fn complement(&self) -> SubsetMask {
        SubsetMask {
            n: self.n,
            kept: !self.kept & ((1u32 << self.n) - 1),
        }
    }

    /// Comma-separated particle list, e.g. `"1,3"`.
    pub fn label(&self) -> String {
        self.particles().iter().join(",")
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

/// Which subsets to evaluate explicitly when building a full entropy report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReductionScope {
    /// Diagonalize every proper subset.
    AllProper,
    /// Diagonalize subsets of size at most ⌊N/2⌋ (both halves when N is even)
    /// and fill in the rest from the complement, which is exact for pure states.
    #[default]
    SymmetryCompleted,
}

/// All masks keeping `n - k` of `n` particles (`k` traced out), lexicographic
/// in the kept particle list.
pub fn enumerate_subsets(n: usize, k: usize) -> Result<Vec<SubsetMask>> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::DimensionMismatch(format!(
            "cannot trace out {k} of {n} particles"
        )));
    }
    (1..=n)
        .combinations(n - k)
        .map(|ps| SubsetMask::from_particles(n, &ps))
        .collect()
}

/// Every proper subset, grouped by `k = 1..n-1` traced particles.
pub fn enumerate_all(n: usize) -> Result<Vec<SubsetMask>> {
    let mut out = Vec::new();
    for k in 1..n {
        out.extend(enumerate_subsets(n, k)?);
    }
    Ok(out)
}

/// Offsets contributed by each configuration of `particles` to a basis index
/// of an `n`-particle register; the first listed particle is the most
/// significant bit of the configuration.
fn configuration_offsets(n: usize, particles: &[usize]) -> Vec<usize> {
    let m = particles.len();
    (0..1usize << m)
        .map(|x| {
            particles
                .iter()
                .enumerate()
                .filter(|(j, _)| x & (1 << (m - 1 - j)) != 0)
                .map(|(_, &p)| particle_bit(n, p))
                .sum()
        })
        .collect()
}

/// The amplitude tensor reshaped along the (kept, traced) cut:
/// `rows = 2^|kept|`, `cols = 2^|traced|`, row-major.
pub fn cut_matrix(state: &PureState, kept: &SubsetMask) -> Result<(usize, usize, Vec<Complex64>)> {
    let n = state.n_particles();
    if kept.n_particles() != n {
        return Err(Error::DimensionMismatch(format!(
            "mask over {} particles applied to a {n}-particle state",
            kept.n_particles()
        )));
    }
    let rows = configuration_offsets(n, &kept.particles());
    let cols = configuration_offsets(n, &kept.traced());
    let amps = state.amplitudes();
    let data = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| amps[r | c]))
        .collect();
    Ok((rows.len(), cols.len(), data))
}

/// A Hermitian, positive semidefinite, unit-trace matrix on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: SquareMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity and trace.
    pub fn new(matrix: SquareMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix dimension {dim} is not a power of two"
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > EPS_HERM {
            return Err(Error::NumericalFailure(format!(
                "matrix is not Hermitian (defect {defect:e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - 1.0).norm() > 1e3 * EPS_NORM {
            return Err(Error::NumericalFailure(format!("trace {trace} is not 1")));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    /// |ψ⟩⟨ψ|.
    pub fn from_pure(state: &PureState) -> Self {
        let amps = state.amplitudes();
        let dim = amps.len();
        let data = amps
            .iter()
            .flat_map(|a| amps.iter().map(move |b| a * b.conj()))
            .collect();
        Self {
            n_qubits: state.n_particles(),
            matrix: SquareMatrix::from_row_major(dim, data).expect("square by construction"),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Ascending eigenvalues, negatives above `-EPS_EIG` rounded to zero and
    /// the rest clamped to at most one.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let values = linalg::hermitian_eigenvalues(&self.matrix)?;
        if let Some(&low) = values.first() {
            if low < -EPS_EIG {
                return Err(Error::NumericalFailure(format!(
                    "eigenvalue {low:e} below -{EPS_EIG:e}"
                )));
            }
        }
        Ok(values.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
    }

    /// Further partial trace keeping `kept` among this matrix's own qubits.
    pub fn reduce(&self, kept: &SubsetMask) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if kept.n_particles() != n {
            return Err(Error::DimensionMismatch(format!(
                "mask over {} particles applied to a {n}-qubit density matrix",
                kept.n_particles()
            )));
        }
        let rows = configuration_offsets(n, &kept.particles());
        let envs = configuration_offsets(n, &kept.traced());
        let dim = rows.len();
        let mut out = SquareMatrix::zeros(dim);
        for (x, &rx) in rows.iter().enumerate() {
            for (y, &ry) in rows.iter().enumerate() {
                out[(x, y)] = envs.iter().map(|&z| self.matrix[(rx | z, ry | z)]).sum();
            }
        }
        Ok(Self {
            n_qubits: kept.len(),
            matrix: out,
        })
    }
}

/// ρ_kept = Tr_traced |ψ⟩⟨ψ|.
pub fn partial_trace(state: &PureState, kept: &SubsetMask) -> Result<DensityMatrix> {
    let (rows, cols, m) = cut_matrix(state, kept)?;
    let mut rho = SquareMatrix::zeros(rows);
    for x in 0..rows {
        let rx = &m[x * cols..(x + 1) * cols];
        for y in x..rows {
            let ry = &m[y * cols..(y + 1) * cols];
            let v: Complex64 = rx.iter().zip(ry).map(|(a, b)| a * b.conj()).sum();
            rho[(x, y)] = v;
            rho[(y, x)] = v.conj();
        }
        rho[(x, x)].im = 0.0;
    }
    Ok(DensityMatrix {
        n_qubits: kept.len(),
        matrix: rho,
    })
}

/// Ascending spectrum of the reduced density matrix on `kept`.
pub fn reduced_spectrum(state: &PureState, kept: &SubsetMask) -> Result<Vec<f64>> {
    partial_trace(state, kept)?.spectrum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{build_state, ghz_state, random_state, BasisTerm};
    use approx::assert_abs_diff_eq;

    fn mask(n: usize, ps: &[usize]) -> SubsetMask {
        SubsetMask::from_particles(n, ps).unwrap()
    }

    #[test]
    fn three_particle_series() {
        let pairs = enumerate_subsets(3, 1).unwrap();
        let lists: Vec<Vec<usize>> = pairs.iter().map(|m| m.particles()).collect();
        assert_eq!(lists, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let singles = enumerate_subsets(3, 2).unwrap();
        let lists: Vec<Vec<usize>> = singles.iter().map(|m| m.particles()).collect();
        assert_eq!(lists, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(enumerate_subsets(2, 1).unwrap().len(), 2);
        assert_eq!(enumerate_all(4).unwrap().len(), 14);
    }

    #[test]
    fn subset_range_checked() {
        assert!(enumerate_subsets(3, 0).is_err());
        assert!(enumerate_subsets(3, 3).is_err());
        assert!(SubsetMask::new(3, 0).is_err());
        assert!(SubsetMask::new(3, 0b111).is_err());
        assert!(SubsetMask::new(3, 0b1000).is_err());
        assert!(SubsetMask::from_particles(3, &[4]).is_err());
    }

    #[test]
    fn mask_helpers() {
        let m = mask(4, &[1, 3]);
        assert_eq!(m.bits(), 0b0101);
        assert_eq!(m.complement().particles(), vec![2, 4]);
        assert_eq!(m.traced(), vec![2, 4]);
        assert_eq!(m.label(), "1,3");
        assert_eq!(m.to_string(), "(1,3)");
    }

    #[test]
    fn product_state_reduction() {
        let s = build_state(&[BasisTerm::real("00", 1.0)], 2).unwrap();
        let rho = partial_trace(&s, &mask(2, &[1])).unwrap();
        assert_eq!(rho.matrix(), &SquareMatrix::diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn ghz2_marginal_is_maximally_mixed() {
        let rho = partial_trace(&ghz_state(2).unwrap(), &mask(2, &[1])).unwrap();
        let expected = SquareMatrix::diagonal(&[0.5, 0.5]);
        for (a, b) in rho.matrix().as_slice().iter().zip(expected.as_slice()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn kept_order_follows_particle_order() {
        // |01⟩ keeping particle 2 gives |1⟩⟨1|.
        let s = build_state(&[BasisTerm::real("01", 1.0)], 2).unwrap();
        let rho = partial_trace(&s, &mask(2, &[2])).unwrap();
        assert_eq!(rho.matrix(), &SquareMatrix::diagonal(&[0.0, 1.0]));
        // |011⟩ keeping {1,3}: configuration "01" = row 1.
        let s = build_state(&[BasisTerm::real("011", 1.0)], 3).unwrap();
        let rho = partial_trace(&s, &mask(3, &[1, 3])).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 1.0);
    }

    #[test]
    fn product_state_spectrum_is_pure() {
        let s = build_state(&[BasisTerm::real("000", 1.0)], 3).unwrap();
        for m in enumerate_all(3).unwrap() {
            let eigs = reduced_spectrum(&s, &m).unwrap();
            assert_eq!(*eigs.last().unwrap(), 1.0);
            assert!(eigs[..eigs.len() - 1].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn equal_weight_123_single_marginal() {
        // Independent route: diagonalize the full projector reduced by hand.
        let w = crate::state::w_family_state(3).unwrap();
        let eigs = reduced_spectrum(&w, &mask(3, &[1])).unwrap();
        assert_abs_diff_eq!(eigs[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eigs[1], 2.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn full_projector_reduction_matches_direct_trace() {
        let s = random_state(4, 5).unwrap();
        let full = DensityMatrix::from_pure(&s);
        for m in enumerate_all(4).unwrap() {
            let a = partial_trace(&s, &m).unwrap();
            let b = full.reduce(&m).unwrap();
            for (x, y) in a.matrix().as_slice().iter().zip(b.matrix().as_slice()) {
                assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(SquareMatrix::diagonal(&[0.5, 0.5])).is_ok());
        assert!(DensityMatrix::new(SquareMatrix::diagonal(&[0.5, 0.4])).is_err());
        assert!(DensityMatrix::new(SquareMatrix::diagonal(&[0.5, 0.25, 0.25])).is_err());
        let skew = SquareMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(DensityMatrix::new(skew).is_err());
        let negative = DensityMatrix::new(SquareMatrix::diagonal(&[1.5, -0.5])).unwrap();
        assert!(matches!(
            negative.spectrum(),
            Err(Error::NumericalFailure(_))
        ));
    }

    #[test]
    fn mask_state_mismatch() {
        let s = random_state(3, 1).unwrap();
        assert!(partial_trace(&s, &mask(4, &[1])).is_err());
    }
}
