//! Dense complex kernels: cyclic Jacobi diagonalization of Hermitian matrices
//! and one-sided Jacobi singular values.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sweep cap for both Jacobi iterations.
pub const MAX_SWEEPS: usize = 100;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, data)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    fn off_diagonal_sqr(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s
    }
}

impl std::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Eigenvalues in ascending order with matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector for `values[k]`.
    pub vectors: Vec<Vec<Complex64>>,
}

/// Real Jacobi rotation `(c, s)` annihilating the off-diagonal of
/// `[[app, g], [g, aqq]]` for real `g > 0`.
#[inline]
fn rotation(app: f64, aqq: f64, g: f64) -> (f64, f64, f64) {
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c, t)
}

fn jacobi_diagonalize(
    matrix: &SquareMatrix,
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<SquareMatrix>)> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    // Force exact Hermiticity; the caller has vouched for it within tolerance.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = want_vectors.then(|| SquareMatrix::identity(n));
    let scale = a.frobenius_sqr();
    if n <= 1 || scale == 0.0 {
        return Ok(((0..n).map(|i| a[(i, i)].re).collect(), v));
    }
    let target = scale * f64::EPSILON * f64::EPSILON;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if a.off_diagonal_sqr() <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = a[(p, q)];
                let g = b.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Entries this small cannot lift the off-diagonal norm above the target.
                if g * g * ((n * n) as f64) <= target {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                // Phase e^{-iφ} on index q makes the pivot real and positive.
                let phase = (b / g).conj();
                let (c, s, t) = rotation(app, aqq, g);
                // Rows p and q are contiguous: a'_pk = c a_pk - s e^{iφ} a_qk and
                // a'_qk = s a_pk + c e^{iφ} a_qk. Columns follow by Hermiticity.
                let back = phase.conj();
                {
                    let (head, tail) = a.data.split_at_mut(q * n);
                    let row_p = &mut head[p * n..(p + 1) * n];
                    let row_q = &mut tail[..n];
                    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
                        let apk = *x;
                        let aqk = *y * back;
                        *x = apk * c - aqk * s;
                        *y = apk * s + aqk * c;
                    }
                }
                for k in 0..n {
                    if k != p && k != q {
                        a.data[k * n + p] = a.data[p * n + k].conj();
                        a.data[k * n + q] = a.data[q * n + k].conj();
                    }
                }
                a[(p, p)] = Complex64::new(app - t * g, 0.0);
                a[(q, q)] = Complex64::new(aqq + t * g, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)] * phase;
                        v[(k, p)] = vkp * c - vkq * s;
                        v[(k, q)] = vkp * s + vkq * c;
                    }
                }
            }
        }
    }
    if !converged && a.off_diagonal_sqr() > target {
        return Err(Error::NumericalFailure(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (dim {n})"
        )));
    }
    Ok(((0..n).map(|i| a[(i, i)].re).collect(), v))
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(matrix: &SquareMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi_diagonalize(matrix, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Full eigendecomposition of a Hermitian matrix, ascending.
pub fn hermitian_eigen(matrix: &SquareMatrix) -> Result<HermitianEigen> {
    let (values, v) = jacobi_diagonalize(matrix, true)?;
    let v = v.expect("eigenvectors requested");
    let n = matrix.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Ok(HermitianEigen {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| (0..n).map(|i| v[(i, k)]).collect())
            .collect(),
    })
}

/// Singular values, descending, of a `rows × cols` row-major complex matrix,
/// by one-sided (Hestenes) Jacobi orthogonalization.
pub fn singular_values(rows: usize, cols: usize, data: &[Complex64]) -> Result<Vec<f64>> {
    if data.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for a {rows}x{cols} matrix",
            data.len()
        )));
    }
    // Orthogonalize along the shorter side; store each vector contiguously.
    let (count, len) = if cols <= rows {
        (cols, rows)
    } else {
        (rows, cols)
    };
    let mut vecs: Vec<Vec<Complex64>> = if cols <= rows {
        (0..cols)
            .map(|j| (0..rows).map(|i| data[i * cols + j]).collect())
            .collect()
    } else {
        (0..rows)
            .map(|i| data[i * cols..(i + 1) * cols].to_vec())
            .collect()
    };
    let tol = f64::EPSILON;

    let mut converged = count <= 1;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for i in 0..count.saturating_sub(1) {
            for j in i + 1..count {
                let (head, tail) = vecs.split_at_mut(j);
                let (vi, vj) = (&mut head[i], &mut tail[0]);
                let alpha: f64 = vi.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = vj.iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = vi.iter().zip(vj.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let (c, s, _) = rotation(alpha, beta, g);
                for k in 0..len {
                    let x = vi[k];
                    let y = vj[k] * phase;
                    vi[k] = x * c - y * s;
                    vj[k] = x * s + y * c;
                }
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::NumericalFailure(format!(
            "one-sided Jacobi SVD did not converge in {MAX_SWEEPS} sweeps ({rows}x{cols})"
        )));
    }
    let mut sv: Vec<f64> = vecs
        .iter()
        .map(|v| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(dim: usize, seed: u64) -> SquareMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = SquareMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn diagonal_input() {
        let m = SquareMatrix::diagonal(&[0.7, 0.3]);
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![0.3, 0.7]);
    }

    #[test]
    fn rank_one_projector() {
        let m = SquareMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(ev[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn complex_two_by_two_closed_form() {
        // [[a, b], [b*, d]] has eigenvalues (a+d)/2 ± sqrt(((a-d)/2)^2 + |b|^2).
        let (a, d, b) = (0.2, -0.4, Complex64::new(0.3, -0.7));
        let mut m = SquareMatrix::zeros(2);
        m[(0, 0)] = Complex64::new(a, 0.0);
        m[(1, 1)] = Complex64::new(d, 0.0);
        m[(0, 1)] = b;
        m[(1, 0)] = b.conj();
        let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(ev[0], (a + d) / 2.0 - r, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], (a + d) / 2.0 + r, epsilon = 1e-14);
    }

    #[test]
    fn eigenpair_residuals_are_small() {
        for (dim, seed) in [(3, 1), (8, 2), (17, 3), (64, 4)] {
            let m = random_hermitian(dim, seed);
            let eig = hermitian_eigen(&m).unwrap();
            let trace: f64 = eig.values.iter().sum();
            assert_abs_diff_eq!(trace, m.trace().re, epsilon = 1e-10);
            for (lambda, v) in eig.values.iter().zip(&eig.vectors) {
                let mv = m.mul_vec(v);
                let residual = mv
                    .iter()
                    .zip(v)
                    .map(|(x, y)| (x - y * lambda).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(
                    residual <= 1e-9 * dim as f64,
                    "dim {dim}: residual {residual}"
                );
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            }
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let m = SquareMatrix::identity(5);
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![1.0; 5]);
        assert_eq!(
            hermitian_eigenvalues(&SquareMatrix::zeros(3)).unwrap(),
            vec![0.0; 3]
        );
    }

    #[test]
    fn singular_values_of_rank_one_outer_product() {
        let u = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let w = [
            Complex64::new(0.5, 0.5),
            Complex64::new(0.5, -0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let data: Vec<Complex64> = u
            .iter()
            .flat_map(|a| w.iter().map(move |b| a * b))
            .collect();
        let sv = singular_values(2, 4, &data).unwrap();
        assert_abs_diff_eq!(sv[0], 1.0, epsilon = 1e-14);
        assert!(sv[1] < 1e-15);
    }

    #[test]
    fn singular_values_match_gram_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (rows, cols) = (4, 6);
        let data: Vec<Complex64> = (0..rows * cols)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let sv = singular_values(rows, cols, &data).unwrap();
        let mut gram = SquareMatrix::zeros(rows);
        for i in 0..rows {
            for j in 0..rows {
                gram[(i, j)] = (0..cols)
                    .map(|k| data[i * cols + k] * data[j * cols + k].conj())
                    .sum();
            }
        }
        let mut ev = hermitian_eigenvalues(&gram).unwrap();
        ev.reverse();
        for (s, l) in sv.iter().zip(ev) {
            assert_abs_diff_eq!(s * s, l, epsilon = 1e-12);
        }
        // Transposed layout gives the same values.
        let transposed: Vec<Complex64> = (0..cols)
            .flat_map(|j| (0..rows).map(move |i| (i, j)))
            .map(|(i, j)| data[i * cols + j])
            .collect();
        let st = singular_values(cols, rows, &transposed).unwrap();
        for (a, b) in sv.iter().zip(&st) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }
}
