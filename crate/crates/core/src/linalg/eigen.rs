//! Hermitian eigendecomposition: Householder reduction to a Hermitian
//! tridiagonal matrix, a diagonal phase change that makes the tridiagonal
//! real symmetric, then implicit QL with Wilkinson-type shifts.

use super::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Tolerance (relative to the Frobenius norm) for accepting an input as Hermitian.
pub const HERMITIAN_INPUT_TOL: f64 = 1e-10;

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianSpectrum {
    /// V diag(f(λ)) V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fv: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += v[(i, k)] * fv[k] * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| C64::new(l, 0.0))
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

fn check_input(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let residual = m.hermiticity_residual();
    let tolerance = HERMITIAN_INPUT_TOL * m.frobenius_norm();
    if residual > tolerance {
        return Err(Error::NonHermitianInput { residual, tolerance });
    }
    Ok(())
}

pub fn hermitian_eigendecompose(m: &ComplexMatrix) -> Result<HermitianSpectrum> {
    check_input(m)?;
    let (d, e, q) = tridiagonalize(&m.hermitian_part(), true);
    let mut z = q.expect("vectors requested");
    let (mut d, mut e) = (d, e);
    implicit_ql(&mut d, &mut e, Some(&mut z))?;
    Ok(sort_spectrum(d, z))
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_input(m)?;
    let (mut d, mut e, _) = tridiagonalize(&m.hermitian_part(), false);
    implicit_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

fn sort_spectrum(d: Vec<f64>, z: ComplexMatrix) -> HermitianSpectrum {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| z[(i, order[j])]);
    HermitianSpectrum { eigenvalues, eigenvectors }
}

/// Reduces Hermitian `a` to real symmetric tridiagonal form.
///
/// Returns the diagonal, the subdiagonal (`e[i]` couples `i` and `i+1`,
/// last entry zero) and optionally the unitary `Q` with `a = Q T Q†`,
/// where `T` is the real tridiagonal matrix.
fn tridiagonalize(a: &ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Vec<f64>, Option<ComplexMatrix>) {
    let n = a.rows();
    let mut a = a.clone();
    let mut q = want_vectors.then(|| ComplexMatrix::identity(n));

    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // a <- P a P with P = I - 2 v v† acting on indices k+1..n.
        let m = n - k - 1;
        let off = k + 1;
        // p = A_sub v over all rows (full columns k+1..n of a).
        let p: Vec<C64> = (0..n).map(|i| (0..m).map(|j| a[(i, off + j)] * v[j]).sum()).collect();
        // a <- a - 2 p v†  (right multiplication by P)
        for i in 0..n {
            for j in 0..m {
                a[(i, off + j)] -= 2.0 * p[i] * v[j].conj();
            }
        }
        // a <- P a  (left multiplication): a -= 2 v (v† a)
        let w: Vec<C64> = (0..n).map(|j| (0..m).map(|i| v[i].conj() * a[(off + i, j)]).sum()).collect();
        for i in 0..m {
            for j in 0..n {
                a[(off + i, j)] -= 2.0 * v[i] * w[j];
            }
        }
        if let Some(q) = q.as_mut() {
            // Q <- Q P
            let qp: Vec<C64> = (0..n).map(|i| (0..m).map(|j| q[(i, off + j)] * v[j]).sum()).collect();
            for i in 0..n {
                for j in 0..m {
                    q[(i, off + j)] -= 2.0 * qp[i] * v[j].conj();
                }
            }
        }
    }

    // Complex Hermitian tridiagonal -> real symmetric via diagonal phases.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut phase = vec![ONE; n];
    for i in 0..n {
        d[i] = a[(i, i)].re;
        if i + 1 < n {
            let s = a[(i + 1, i)];
            let r = s.norm();
            e[i] = r;
            phase[i + 1] = if r > 0.0 { phase[i] * (s / r) } else { phase[i] };
        }
    }
    if let Some(q) = q.as_mut() {
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] *= phase[j];
            }
        }
    }
    (d, e, q)
}

/// Implicit QL iteration on a real symmetric tridiagonal matrix.
/// Rotations are accumulated into the columns of `z` when given.
fn implicit_ql(d: &mut [f64], e: &mut [f64], mut z: Option<&mut ComplexMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence(format!(
                    "QL iteration exceeded {MAX_QL_ITERATIONS} sweeps at index {l}"
                )));
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[(k, i + 1)];
                        let zi = z[(k, i)];
                        z[(k, i + 1)] = zi * s + f * c;
                        z[(k, i)] = zi * c - f * s;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_hermitian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel_reconstruction_error(m: &ComplexMatrix, s: &HermitianSpectrum) -> f64 {
        (&s.reconstruct() - m).frobenius_norm() / m.frobenius_norm()
    }

    fn orthonormality_error(v: &ComplexMatrix) -> f64 {
        (&v.adjoint().matmul(v) - &ComplexMatrix::identity(v.rows())).max_abs()
    }

    #[test]
    fn identity_case() {
        let s = hermitian_eigendecompose(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
        assert!(orthonormality_error(&s.eigenvectors) < 1e-15);
    }

    #[test]
    fn pauli_z_sorted() {
        let sz = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let s = hermitian_eigendecompose(&sz).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);
        // eigenvector for -1 is e2, for +1 is e1 (up to phase)
        assert!((s.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((s.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 6, 17, 40] {
            let m = random_hermitian(&mut rng, n);
            let s = hermitian_eigendecompose(&m).unwrap();
            assert!(rel_reconstruction_error(&m, &s) < 1e-12, "n={n}");
            assert!(orthonormality_error(&s.eigenvectors) < 1e-12, "n={n}");
            assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eigendecompose(&m), Err(Error::NonHermitianInput { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigendecompose(&r), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn degenerate_and_block_diagonal() {
        let m = ComplexMatrix::from_real(&[
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 1.0],
            &[0.0, 0.0, 1.0, 1.0],
        ]);
        let s = hermitian_eigendecompose(&m).unwrap();
        let expected = [0.0, 2.0, 2.0, 2.0];
        for (a, b) in s.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(rel_reconstruction_error(&m, &s) < 1e-14);
    }
}
