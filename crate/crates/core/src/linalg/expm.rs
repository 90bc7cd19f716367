//! Matrix exponentials: scaling-and-squaring with a degree-13 Padé
//! approximant for general matrices, and spectral exponentiation for
//! Hermitian ones.

use super::eigen::{hermitian_eigendecompose, HERMITIAN_INPUT_TOL};
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// exp(scale * m). Hermitian inputs are exponentiated through their
/// eigendecomposition; everything else goes through Padé scaling-and-squaring.
pub fn matrix_exponential(m: &ComplexMatrix, scale: C64) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.is_hermitian(HERMITIAN_INPUT_TOL) {
        let spec = hermitian_eigendecompose(m)?;
        return Ok(spec.reconstruct_with(|l| (scale * l).exp()));
    }
    expm_pade(&m.scale(scale))
}

/// exp(a) by scaling-and-squaring with the [13/13] Padé approximant.
pub fn expm_pade(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("matrix exponential needs a square matrix".into()));
    }
    let n = a.rows();
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil().max(0.0) as i32 } else { 0 };
    let a = a.scale_real(0.5_f64.powi(s));
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let b = &PADE13;

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| -> ComplexMatrix {
        let mut out = a6.scale_real(c6);
        out += &a4.scale_real(c4);
        out += &a2.scale_real(c2);
        out += &id.scale_real(c0);
        out
    };

    let u_inner = {
        let mut t = a6.matmul(&lin(b[13], b[11], b[9], 0.0));
        t += &lin(b[7], b[5], b[3], b[1]);
        t
    };
    let u = a.matmul(&u_inner);
    let v = {
        let mut t = a6.matmul(&lin(b[12], b[10], b[8], 0.0));
        t += &lin(b[6], b[4], b[2], b[0]);
        t
    };
    let p = &v + &u;
    let q = &v - &u;
    let mut r = lu_solve(&q, &p)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

/// Solves A X = B by LU decomposition with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::DimensionMismatch("lu_solve shapes".into()));
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (piv, pmax) =
            (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax == 0.0 {
            return Err(Error::Singular(format!("zero pivot in column {k}")));
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..m {
                let t = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            if f == ZERO {
                continue;
            }
            lu[(i, k)] = f;
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
            for j in 0..m {
                let t = x[(k, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    for j in 0..m {
        for i in (0..n).rev() {
            let mut acc = x[(i, j)];
            for k in i + 1..n {
                acc -= lu[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = acc / lu[(i, i)];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::I;
    use crate::linalg::random::{random_complex, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Truncated Taylor series summed until the terms stop changing the sum.
    fn taylor_oracle(a: &ComplexMatrix) -> ComplexMatrix {
        // square-free: only used on modest norms
        let n = a.rows();
        let mut sum = ComplexMatrix::identity(n);
        let mut term = ComplexMatrix::identity(n);
        for k in 1..200 {
            term = term.matmul(a).scale_real(1.0 / k as f64);
            sum += &term;
            if term.frobenius_norm() < 1e-18 * sum.frobenius_norm() {
                break;
            }
        }
        sum
    }

    #[test]
    fn zero_scale_gives_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_complex(&mut rng, 3, 3);
        let e = matrix_exponential(&m, C64::new(0.0, 0.0)).unwrap();
        assert!((&e - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn diagonal_pauli_z() {
        let sz = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let e = matrix_exponential(&sz, -I * (PI / 2.0)).unwrap();
        assert!((e[(0, 0)] - (-I * PI / 2.0).exp()).norm() < 1e-15);
        assert!((e[(1, 1)] - (I * PI / 2.0).exp()).norm() < 1e-15);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn hermitian_route_matches_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, 4);
            let t = 0.7;
            let e = matrix_exponential(&h, -I * t).unwrap();
            let oracle = taylor_oracle(&h.scale(-I * t));
            assert!((&e - &oracle).max_abs() < 1e-11);
            assert!(e.is_unitary(1e-10));
            // Padé route on the same anti-Hermitian matrix
            let p = expm_pade(&h.scale(-I * t)).unwrap();
            assert!((&p - &oracle).max_abs() < 1e-11);
        }
    }

    #[test]
    fn pade_general_matrix_against_taylor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for scale in [0.1, 1.0, 3.0] {
            let a = random_complex(&mut rng, 5, 5).scale_real(scale / 5.0);
            let e = expm_pade(&a).unwrap();
            let o = taylor_oracle(&a);
            assert!((&e - &o).frobenius_norm() / o.frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_hermitian(&mut rng, 5);
        let x = h.scale_real(1.0 / h.frobenius_norm());
        let (s, t) = (0.37, 1.9);
        let lhs = matrix_exponential(&x, C64::new(s + t, 0.0)).unwrap();
        let rhs = matrix_exponential(&x, C64::new(s, 0.0))
            .unwrap()
            .matmul(&matrix_exponential(&x, C64::new(t, 0.0)).unwrap());
        assert!((&lhs - &rhs).frobenius_norm() < 1e-10);
    }

    #[test]
    fn rejects_rectangular() {
        let m = ComplexMatrix::zeros(2, 3);
        assert!(matches!(matrix_exponential(&m, C64::new(1.0, 0.0)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_complex(&mut rng, 6, 6);
        let x = random_complex(&mut rng, 6, 2);
        let b = a.matmul(&x);
        let y = lu_solve(&a, &b).unwrap();
        assert!((&y - &x).max_abs() < 1e-11);
    }
}
