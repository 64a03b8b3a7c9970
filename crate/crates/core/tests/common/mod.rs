#![allow(dead_code)]

use etameasure::{embed_product, random_state, PureState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random element of U(2).
pub fn random_unitary(rng: &mut ChaCha8Rng) -> [[Complex64; 2]; 2] {
    let mut g = || Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let (a, b) = (g(), g());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    [
        [a * phase, -b.conj() * phase],
        [b * phase, a.conj() * phase],
    ]
}

pub fn apply_local_unitaries(state: &PureState, rng: &mut ChaCha8Rng) -> PureState {
    (1..=state.n_particles()).fold(state.clone(), |s, p| {
        s.apply_single_particle(p, &random_unitary(rng)).unwrap()
    })
}

/// A state that is either Haar-random or a product of Haar-random factors on
/// a random partition of the particles.
pub fn mixed_construction(n: usize, rng: &mut ChaCha8Rng) -> PureState {
    if rng.gen_bool(0.4) {
        return random_state(n, rng.gen()).unwrap();
    }
    let groups = rng.gen_range(1..=n);
    let owner: Vec<usize> = (0..n).map(|_| rng.gen_range(0..groups)).collect();
    let blocks: Vec<Vec<usize>> = (0..groups)
        .map(|g| (1..=n).filter(|&p| owner[p - 1] == g).collect::<Vec<_>>())
        .filter(|b| !b.is_empty())
        .collect();
    let factors: Vec<(Vec<usize>, PureState)> = blocks
        .into_iter()
        .map(|b| {
            let f = random_state(b.len(), rng.gen()).unwrap();
            (b, f)
        })
        .collect();
    embed_product(n, &factors).unwrap()
}

/// Gaussian integer with exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussInt {
    pub re: i128,
    pub im: i128,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };

    pub fn new(re: i128, im: i128) -> Self {
        Self { re, im }
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }

    pub fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }

    pub fn norm_sqr(self) -> i128 {
        self.re * self.re + self.im * self.im
    }
}

/// Exact determinant by cofactor expansion.
pub fn det_exact(m: &[Vec<GaussInt>]) -> GaussInt {
    let n = m.len();
    match n {
        0 => GaussInt::new(1, 0),
        1 => m[0][0],
        _ => {
            let mut total = GaussInt::ZERO;
            for col in 0..n {
                let minor: Vec<Vec<GaussInt>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let term = m[0][col].mul(det_exact(&minor));
                total = if col % 2 == 0 {
                    total.add(term)
                } else {
                    total.sub(term)
                };
            }
            total
        }
    }
}

/// Coefficients e_1..e_n of det(λI − H) = λ^n − e_1 λ^{n−1} + e_2 λ^{n−2} − …,
/// where e_k is the sum of the k×k principal minors. Exact for Hermitian H.
pub fn characteristic_coefficients(h: &[Vec<GaussInt>]) -> Vec<i128> {
    let n = h.len();
    let mut e = vec![0i128; n + 1];
    e[0] = 1;
    for subset in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| subset & (1 << i) != 0).collect();
        let minor: Vec<Vec<GaussInt>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| h[i][j]).collect())
            .collect();
        let d = det_exact(&minor);
        assert_eq!(d.im, 0, "principal minors of a Hermitian matrix are real");
        e[idx.len()] += d.re;
    }
    e
}

/// Real roots, ascending, of λ^n − e_1 λ^{n−1} + … ± e_n whose roots are known
/// to be real and nonnegative. Exact zero roots are split off first; the rest
/// come from Durand–Kerner iteration polished by Newton steps.
pub fn characteristic_roots(e: &[i128]) -> Vec<f64> {
    let n = e.len() - 1;
    let mut zeros = 0;
    while zeros < n && e[n - zeros] == 0 {
        zeros += 1;
    }
    let degree = n - zeros;
    // Monic coefficients c_0..c_degree of the deflated polynomial, highest first.
    let coeffs: Vec<f64> = (0..=degree)
        .map(|k| {
            if k % 2 == 0 {
                e[k] as f64
            } else {
                -(e[k] as f64)
            }
        })
        .collect();
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let eval_d = |z: Complex64| {
        coeffs[..degree]
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| {
                acc * z + c * (degree - k) as f64
            })
    };
    // Nonnegative real roots are bounded by their sum, e_1.
    let scale = (e[1] as f64).max(1.0);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32) * scale).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * scale {
            break;
        }
    }
    let mut real: Vec<f64> = roots
        .into_iter()
        .map(|z| {
            let mut x = Complex64::new(z.re, 0.0);
            for _ in 0..5 {
                let d = eval_d(x);
                if d.norm() == 0.0 {
                    break;
                }
                x -= eval(x) / d;
            }
            x.re
        })
        .collect();
    real.extend(std::iter::repeat_n(0.0, zeros));
    real.sort_by(f64::total_cmp);
    real
}
