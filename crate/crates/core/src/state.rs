//! N-qubit pure states.
//!
//! Amplitudes are stored densely over the 2^N computational basis. Particle 1
//! is the most significant bit of a basis index, so the bitstring `"011"`
//! is index 3 and its first character belongs to particle 1.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Largest supported particle count.
pub const N_MAX: usize = 16;

/// Normalization tolerance.
pub const EPS_NORM: f64 = 1e-12;

/// Amplitudes with modulus at or below this are treated as absent.
pub const AMPLITUDE_CUTOFF: f64 = 1e-12;

const MAX_REJECTION_DRAWS: usize = 1_000_000;

/// Bit of a basis index that carries particle `particle` (1-based) among `n`.
#[inline]
pub fn particle_bit(n: usize, particle: usize) -> usize {
    1 << (n - particle)
}

/// Renders basis index `index` as an `n`-character bitstring.
pub fn index_to_bitstring(index: usize, n: usize) -> String {
    (1..=n)
        .map(|p| {
            if index & particle_bit(n, p) != 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parses an `n`-character bitstring into a basis index.
pub fn bitstring_to_index(bits: &str, n: usize) -> Result<usize> {
    if bits.chars().count() != n {
        return Err(Error::DimensionMismatch(format!(
            "bitstring {bits:?} has length {} but the state has {n} particles",
            bits.chars().count()
        )));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::Parse(format!(
            "invalid character {other:?} in bitstring {bits:?}"
        ))),
    })
}

fn check_particle_count(n: usize) -> Result<()> {
    if n == 0 || n > N_MAX {
        return Err(Error::DimensionMismatch(format!(
            "particle count {n} outside 1..={N_MAX}"
        )));
    }
    Ok(())
}

/// One computational-basis term of a state expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTerm {
    pub bitstring: String,
    pub amplitude: Complex64,
}

impl BasisTerm {
    pub fn new(bitstring: impl Into<String>, amplitude: Complex64) -> Self {
        Self {
            bitstring: bitstring.into(),
            amplitude,
        }
    }

    pub fn real(bitstring: impl Into<String>, amplitude: f64) -> Self {
        Self::new(bitstring, Complex64::new(amplitude, 0.0))
    }
}

/// A normalized pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from a full amplitude vector, normalizing it.
    pub fn from_amplitudes(n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_particle_count(n)?;
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes for {n} particles, got {}",
                1usize << n,
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::Parse("non-finite amplitude".into()));
        }
        for a in amplitudes.iter_mut() {
            if a.norm() <= AMPLITUDE_CUTOFF {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::EmptyState);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amplitudes })
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, bits: &str) -> Result<Complex64> {
        Ok(self.amplitudes[bitstring_to_index(bits, self.n)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Nonzero terms in ascending basis order.
    pub fn to_terms(&self) -> Vec<BasisTerm> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(i, &a)| BasisTerm::new(index_to_bitstring(i, self.n), a))
            .collect()
    }

    /// Basis indices carrying a nonzero amplitude.
    pub fn support(&self) -> Vec<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Tensor product `self ⊗ other`; particles of `other` follow those of `self`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let n = self.n + other.n;
        check_particle_count(n)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        PureState::from_amplitudes(n, amplitudes)
    }

    /// Applies a 2×2 matrix `u` (row-major) to particle `particle` (1-based).
    pub fn apply_single_particle(
        &self,
        particle: usize,
        u: &[[Complex64; 2]; 2],
    ) -> Result<PureState> {
        if particle == 0 || particle > self.n {
            return Err(Error::DimensionMismatch(format!(
                "particle {particle} outside 1..={}",
                self.n
            )));
        }
        let bit = particle_bit(self.n, particle);
        let mut out = self.amplitudes.clone();
        for i in (0..self.dim()).filter(|i| i & bit == 0) {
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
            out[i] = u[0][0] * a0 + u[0][1] * a1;
            out[i | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
        PureState::from_amplitudes(self.n, out)
    }

    /// Largest entrywise difference to `other` after removing the relative global phase.
    pub fn distance_up_to_phase(&self, other: &PureState) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let overlap: Complex64 = other
            .amplitudes
            .iter()
            .zip(&self.amplitudes)
            .map(|(b, a)| b.conj() * a)
            .sum();
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max)
    }
}

/// Assembles an `n`-particle state from factors living on disjoint particle blocks.
///
/// Each block lists its particles (1-based) in increasing order; the factor's
/// first particle is the first listed. Blocks must cover `1..=n` exactly once.
pub fn embed_product(n: usize, blocks: &[(Vec<usize>, PureState)]) -> Result<PureState> {
    check_particle_count(n)?;
    let mut seen = vec![false; n + 1];
    for (particles, factor) in blocks {
        if particles.len() != factor.n_particles() {
            return Err(Error::DimensionMismatch(format!(
                "block {particles:?} does not match a {}-particle factor",
                factor.n_particles()
            )));
        }
        for &p in particles {
            if p == 0 || p > n || seen[p] {
                return Err(Error::DimensionMismatch(format!(
                    "particle {p} repeated or outside 1..={n}"
                )));
            }
            seen[p] = true;
        }
    }
    if seen[1..].iter().any(|s| !s) {
        return Err(Error::DimensionMismatch(
            "blocks do not cover every particle".into(),
        ));
    }
    let amplitudes = (0..1usize << n)
        .map(|index| {
            blocks
                .iter()
                .map(|(particles, factor)| {
                    let sub = particles.iter().fold(0usize, |acc, &p| {
                        (acc << 1) | usize::from(index & particle_bit(n, p) != 0)
                    });
                    factor.amplitudes()[sub]
                })
                .product()
        })
        .collect();
    PureState::from_amplitudes(n, amplitudes)
}

/// Set of basis indices required to carry nonzero amplitude.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportPattern {
    n: usize,
    indices: Vec<usize>,
}

impl SupportPattern {
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_particle_count(n)?;
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = indices.iter().find(|&&i| i >= 1 << n) {
            return Err(Error::DimensionMismatch(format!(
                "basis index {bad} out of range for {n} particles"
            )));
        }
        indices.sort_unstable();
        let len = indices.len();
        indices.dedup();
        if indices.len() != len {
            return Err(Error::Parse(
                "support pattern repeats a basis vector".into(),
            ));
        }
        if indices.is_empty() {
            return Err(Error::EmptyState);
        }
        Ok(Self { n, indices })
    }

    /// Builds a pattern from bitstrings; the particle count is taken from their length.
    pub fn from_bitstrings<S: AsRef<str>>(bits: &[S]) -> Result<Self> {
        let n = bits
            .first()
            .map(|b| b.as_ref().chars().count())
            .ok_or(Error::EmptyState)?;
        let indices = bits
            .iter()
            .map(|b| bitstring_to_index(b.as_ref(), n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, indices)
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn bitstrings(&self) -> Vec<String> {
        self.indices
            .iter()
            .map(|&i| index_to_bitstring(i, self.n))
            .collect()
    }

    /// Places `values` (one per support index, in order) into a full state.
    pub fn state_from_values(&self, values: &[Complex64]) -> Result<PureState> {
        if values.len() != self.indices.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a support of size {}",
                values.len(),
                self.indices.len()
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        for (&i, &v) in self.indices.iter().zip(values) {
            amplitudes[i] = v;
        }
        PureState::from_amplitudes(self.n, amplitudes)
    }
}

/// Builds a normalized state from a list of terms; repeated bitstrings add up.
pub fn build_state(terms: &[BasisTerm], n: usize) -> Result<PureState> {
    check_particle_count(n)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    for term in terms {
        amplitudes[bitstring_to_index(&term.bitstring, n)?] += term.amplitude;
    }
    PureState::from_amplitudes(n, amplitudes)
}

/// (|0…0⟩ + |1…1⟩)/√2.
pub fn ghz_state(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "GHZ state needs at least 2 particles, got {n}"
        )));
    }
    check_particle_count(n)?;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
    amplitudes[0] = Complex64::new(1.0, 0.0);
    amplitudes[(1 << n) - 1] = Complex64::new(1.0, 0.0);
    PureState::from_amplitudes(n, amplitudes)
}

/// (|000⟩ + |110⟩ + |101⟩)/√3, the equal-weight three-term W-family state.
pub fn w_family_state(n: usize) -> Result<PureState> {
    if n != 3 {
        return Err(Error::Unsupported(format!(
            "W-family state is only provided for 3 particles, got {n}"
        )));
    }
    build_state(
        &[
            BasisTerm::real("000", 1.0),
            BasisTerm::real("110", 1.0),
            BasisTerm::real("101", 1.0),
        ],
        3,
    )
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random state, reproducible for a given seed.
pub fn random_state(n: usize, seed: u64) -> Result<PureState> {
    check_particle_count(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amplitudes = (0..1usize << n)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    PureState::from_amplitudes(n, amplitudes)
}

/// Random state supported exactly on `pattern`, every amplitude of modulus
/// at least `min_magnitude`.
pub fn random_on_support(
    pattern: &SupportPattern,
    min_magnitude: f64,
    seed: u64,
) -> Result<PureState> {
    let bound = 1.0 / (pattern.len() as f64).sqrt();
    if !(min_magnitude > 0.0 && min_magnitude < bound) {
        return Err(Error::Infeasible(format!(
            "min magnitude {min_magnitude} must lie in (0, {bound})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTION_DRAWS {
        let values: Vec<Complex64> = (0..pattern.len())
            .map(|_| complex_gaussian(&mut rng))
            .collect();
        let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 && values.iter().all(|v| v.norm() / norm >= min_magnitude) {
            return pattern.state_from_values(&values);
        }
    }
    Err(Error::Infeasible(format!(
        "no draw met min magnitude {min_magnitude} after {MAX_REJECTION_DRAWS} attempts"
    )))
}
