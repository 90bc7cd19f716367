//! Dense complex linear algebra: matrices, Hermitian spectra, exponentials,
//! tensor products, partial traces, Choi matrices and distances.

pub mod eigen;
pub mod expm;
pub mod matrix;
pub mod random;

pub use eigen::{hermitian_eigendecompose, hermitian_eigenvalues, HermitianSpectrum};
pub use expm::{expm_pade, lu_solve, matrix_exponential};
pub use matrix::{ComplexMatrix, RealMatrix, C64, I, ONE, ZERO};

use crate::error::{Error, Result};

/// Kronecker product a ⊗ b.
pub fn kron_compose(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Reduced matrix on subsystem `keep` of a multipartite operator with
/// subsystem dimensions `dims` (first factor is the most significant index).
pub fn partial_trace(total: &ComplexMatrix, dims: &[usize], keep: usize) -> Result<ComplexMatrix> {
    let n: usize = dims.iter().product();
    if !total.is_square() || total.rows() != n || dims.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "partial trace: dims {:?} do not match a {}x{} operator",
            dims,
            total.rows(),
            total.cols()
        )));
    }
    if keep >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "partial trace: subsystem {keep} out of range for {} factors",
            dims.len()
        )));
    }
    let dk = dims[keep];
    let outer: usize = dims[..keep].iter().product();
    let inner: usize = dims[keep + 1..].iter().product();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = ZERO;
            for o in 0..outer {
                for r in 0..inner {
                    let row = (o * dk + i) * inner + r;
                    let col = (o * dk + j) * inner + r;
                    acc += total[(row, col)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Column-stacking vectorization.
pub fn vectorize(m: &ComplexMatrix) -> Vec<C64> {
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            v.push(m[(i, j)]);
        }
    }
    v
}

/// Inverse of [`vectorize`] for a d×d matrix.
pub fn unvectorize(v: &[C64], d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch(format!("cannot reshape {} entries into {d}x{d}", v.len())));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[j * d + i]))
}

/// Choi matrix J = Σ_ij E_ij ⊗ Φ(E_ij) of a map on d×d matrices.
pub fn choi_matrix(d: usize, mut map: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let mut e = ComplexMatrix::zeros(d, d);
            e[(i, j)] = ONE;
            let img = map(&e)?;
            if img.rows() != d || img.cols() != d {
                return Err(Error::DimensionMismatch("map must send d x d matrices to d x d matrices".into()));
            }
            for k in 0..d {
                for l in 0..d {
                    out[(i * d + k, j * d + l)] = img[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Choi matrix of a d²×d² superoperator acting on column-stacked matrices.
pub fn choi_of_superoperator(sop: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = sop.rows();
    let d = (n as f64).sqrt().round() as usize;
    if !sop.is_square() || d * d != n {
        return Err(Error::DimensionMismatch(format!(
            "superoperator of size {}x{} is not d^2 x d^2",
            sop.rows(),
            sop.cols()
        )));
    }
    // Φ(E_ij) is column j*d+i of the superoperator, unvectorized.
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let c = j * d + i;
            for k in 0..d {
                for l in 0..d {
                    out[(i * d + k, j * d + l)] = sop[(l * d + k, c)];
                }
            }
        }
    }
    Ok(out)
}

/// Partial trace of a Choi matrix over the output factor; equals I for a
/// trace-preserving map.
pub fn choi_output_trace(choi: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    partial_trace(choi, &[d, d], 0)
}

/// Half the trace norm of a − b.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch("trace distance shapes differ".into()));
    }
    let diff = a - b;
    let ev = hermitian_eigenvalues(&diff.hermitian_part_checked()?)?;
    Ok(0.5 * ev.iter().map(|x| x.abs()).sum::<f64>())
}

impl ComplexMatrix {
    /// Hermitian part after checking the antihermitian residual is small.
    fn hermitian_part_checked(&self) -> Result<ComplexMatrix> {
        let r = self.hermiticity_residual();
        let scale = self.frobenius_norm().max(1e-300);
        if r > eigen::HERMITIAN_INPUT_TOL * scale.max(1.0) {
            return Err(Error::NonHermitianInput { residual: r, tolerance: eigen::HERMITIAN_INPUT_TOL });
        }
        Ok(self.hermitian_part())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_complex, random_density_matrix};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn kron_identities() {
        let k = kron_compose(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(k, ComplexMatrix::identity(4));
        let k = kron_compose(&sx(), &ComplexMatrix::identity(2));
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i + 2) % 4 == j { 1.0 } else { 0.0 };
                assert_eq!(k[(i, j)].re, want);
            }
        }
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_complex(&mut rng, 2, 2);
        let b = random_complex(&mut rng, 3, 3);
        let c = random_complex(&mut rng, 2, 2);
        let d = random_complex(&mut rng, 3, 3);
        let lhs = kron_compose(&a, &b).matmul(&kron_compose(&c, &d));
        let rhs = kron_compose(&a.matmul(&c), &b.matmul(&d));
        assert!((&lhs - &rhs).max_abs() < 1e-13);
    }

    #[test]
    fn partial_trace_product_and_bell() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rs = random_density_matrix(&mut rng, 2);
        let rb = random_density_matrix(&mut rng, 3).scale_real(2.0);
        let tot = kron_compose(&rs, &rb);
        let red = partial_trace(&tot, &[2, 3], 0).unwrap();
        assert!((&red - &rs.scale_real(2.0)).max_abs() < 1e-14);
        let red_b = partial_trace(&tot, &[2, 3], 1).unwrap();
        assert!((&red_b - &rb).max_abs() < 1e-14);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        for keep in 0..2 {
            let r = partial_trace(&bell, &[2, 2], keep).unwrap();
            assert!((&r - &ComplexMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_matches_index_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density_matrix(&mut rng, 6);
        let a = partial_trace(&rho, &[2, 3], 0).unwrap();
        let b = partial_trace(&rho, &[2, 3], 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut s = ZERO;
                for k in 0..3 {
                    s += rho[(i * 3 + k, j * 3 + k)];
                }
                assert!((s - a[(i, j)]).norm() < 1e-13);
            }
        }
        for k in 0..3 {
            for l in 0..3 {
                let mut s = ZERO;
                for i in 0..2 {
                    s += rho[(i * 3 + k, i * 3 + l)];
                }
                assert!((s - b[(k, l)]).norm() < 1e-13);
            }
        }
        assert!((a.trace() - rho.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = ComplexMatrix::identity(6);
        assert!(partial_trace(&m, &[2, 2], 0).is_err());
        assert!(partial_trace(&m, &[2, 3], 2).is_err());
    }

    #[test]
    fn choi_identity_transpose_depolarizing() {
        let id = choi_matrix(2, |x| Ok(x.clone())).unwrap();
        let ev = hermitian_eigenvalues(&id).unwrap();
        assert!((id.trace().re - 2.0).abs() < 1e-15);
        assert!((ev[3] - 2.0).abs() < 1e-12 && ev[..3].iter().all(|e| e.abs() < 1e-12));

        let tr = choi_matrix(2, |x| Ok(x.transpose())).unwrap();
        let ev = hermitian_eigenvalues(&tr).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-12);

        let dep = choi_matrix(2, |x| Ok(ComplexMatrix::identity(2).scale(x.trace() * 0.5))).unwrap();
        assert!((&dep - &ComplexMatrix::identity(4).scale_real(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn choi_of_superoperator_agrees_with_map_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let k = random_complex(&mut rng, 3, 3);
        // superoperator of X -> K X K† is conj(K) ⊗ K under column stacking
        let sop = kron_compose(&k.conj(), &k);
        let j1 = choi_of_superoperator(&sop).unwrap();
        let j2 = choi_matrix(3, |x| Ok(k.matmul(x).matmul(&k.adjoint()))).unwrap();
        assert!((&j1 - &j2).max_abs() < 1e-13);
        let v = vectorize(&k);
        assert_eq!(unvectorize(&v, 3).unwrap(), k);
    }

    #[test]
    fn trace_distance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let r = random_density_matrix(&mut rng, 3);
        assert!(trace_distance(&r, &r).unwrap().abs() < 1e-15);
        let p0 = ComplexMatrix::diagonal(&[ONE, ZERO]);
        let p1 = ComplexMatrix::diagonal(&[ZERO, ONE]);
        assert!((trace_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-14);
        let a = ComplexMatrix::from_real(&[&[0.7, 0.0], &[0.0, 0.3]]);
        let b = ComplexMatrix::from_real(&[&[0.5, 0.0], &[0.0, 0.5]]);
        assert!((trace_distance(&a, &b).unwrap() - 0.2).abs() < 1e-14);
        let bad = random_complex(&mut rng, 2, 2);
        assert!(matches!(trace_distance(&bad, &p0), Err(Error::NonHermitianInput { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn trace_distance_triangle(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_density_matrix(&mut rng, 3);
            let b = random_density_matrix(&mut rng, 3);
            let c = random_density_matrix(&mut rng, 3);
            let ab = trace_distance(&a, &b).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
        }

        #[test]
        fn partial_trace_linear(seed in any::<u64>(), s in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_complex(&mut rng, 6, 6);
            let y = random_complex(&mut rng, 6, 6);
            let lhs = partial_trace(&(&x + &y.scale_real(s)), &[3, 2], 1).unwrap();
            let rhs = &partial_trace(&x, &[3, 2], 1).unwrap()
                + &partial_trace(&y, &[3, 2], 1).unwrap().scale_real(s);
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }
}
