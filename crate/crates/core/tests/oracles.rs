use cglindblad::bath::{BathKind, BathSpec, Mode};
use cglindblad::cg::{
    compute_cg_filter_route, kossakowski_check_matrix, secular_limit_coefficients, window_coefficients, QuadratureSpec,
};
use cglindblad::linalg::{hermitian_eigenvalues, ComplexMatrix, C64};
use cglindblad::system::{default_basis, driven_qubit, qutrit_model};

fn single_mode_bath(frequency: f64, coupling: f64) -> BathSpec {
    let modes = vec![Mode { frequency, coupling, occupation: 0.0 }];
    BathSpec::diagonal(BathKind::DiscreteModes { modes, broadening: 1e-3 }, 1).unwrap()
}

/// Midpoint double sum of the defining integrals for a qubit H = (ω/2)σz
/// coupled through σx, using σx(t) = cos(ωt)σx − sin(ωt)σy written out by hand.
#[test]
fn riemann_double_sum_matches_coefficients() {
    let (omega, wb, gb, delta, lambda) = (1.0, 1.3, 0.4, 2.0, 0.2);
    let model = driven_qubit(omega);
    let basis = default_basis(&model);
    let bath = single_mode_bath(wb, gb);
    let c = window_coefficients(&model, &basis, &bath, 0.0, delta, lambda, &QuadratureSpec::default()).unwrap();

    let n = 400;
    let h = delta / n as f64;
    let r2 = std::f64::consts::SQRT_2;
    // basis order I, X, Y, Z
    let u = |t: f64| [0.0, r2 * (omega * t).cos(), -r2 * (omega * t).sin(), 0.0];
    let g = |tau: f64| C64::from_polar(gb * gb, -wb * tau);
    let mut cm = [[C64::new(0.0, 0.0); 4]; 4];
    let mut hm = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..n {
        let t1 = (i as f64 + 0.5) * h;
        let u1 = u(t1);
        for j in 0..n {
            let t2 = (j as f64 + 0.5) * h;
            let u2 = u(t2);
            let gv = g(t1 - t2);
            let sign = (t1 - t2).signum() * if i == j { 0.0 } else { 1.0 };
            for a in 0..4 {
                for b in 0..4 {
                    let w = gv * (u1[a] * u2[b] * h * h);
                    cm[a][b] += w;
                    hm[a][b] += w * sign;
                }
            }
        }
    }
    let l2 = lambda * lambda / delta;
    let scale = c.c_matrix.max_abs();
    for a in 0..4 {
        for b in 0..4 {
            let want_c = cm[a][b] * l2;
            let want_h = hm[a][b] * C64::new(0.0, -0.5 * l2);
            assert!((c.c_matrix[(a, b)] - want_c).norm() < 1e-4 * scale, "C[{a}{b}]");
            assert!((c.h_matrix[(a, b)] - want_h).norm() < 1e-4 * scale, "H[{a}{b}]");
        }
    }
}

/// Trigonometric roots of the characteristic cubic of a real symmetric 3x3.
fn cubic_eigenvalues(m: [[f64; 3]; 3]) -> [f64; 3] {
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| (m[i][j] - if i == j { q } else { 0.0 }) / p;
    let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let mut e = [e1, 3.0 * q - e1 - e3, e3];
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn eigen_solver_matches_cubic_roots() {
    let m = [[2.0, -0.7, 0.3], [-0.7, 1.1, 0.45], [0.3, 0.45, -0.4]];
    let cm = ComplexMatrix::from_fn(3, 3, |i, j| C64::new(m[i][j], 0.0));
    let mut got = hermitian_eigenvalues(&cm).unwrap();
    got.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(cubic_eigenvalues(m)) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn kossakowski_check_zero_and_corrupted() {
    let zero = kossakowski_check_matrix(&ComplexMatrix::zeros(3, 3));
    assert!(zero.passed && zero.min == 0.0 && zero.max == 0.0);
    let model = driven_qubit(1.0);
    let bath = BathSpec::diagonal(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: 1.0 }, 1).unwrap();
    let c =
        window_coefficients(&model, &default_basis(&model), &bath, 0.0, 2.0, 0.1, &QuadratureSpec::default()).unwrap();
    assert!(kossakowski_check_matrix(&c.c_matrix).passed);
    let mut bad = c.c_matrix.clone();
    bad[(3, 3)] -= C64::new(0.1 * c.c_matrix.max_abs(), 0.0);
    let r = kossakowski_check_matrix(&bad);
    assert!(!r.passed && r.min < 0.0);
}

#[test]
fn coefficients_scale_as_lambda_squared() {
    let model = qutrit_model();
    let basis = default_basis(&model);
    let bath = BathSpec::shared(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: 0.5 }, 2).unwrap();
    let q = QuadratureSpec::default();
    let a = window_coefficients(&model, &basis, &bath, 0.0, 1.5, 0.1, &q).unwrap();
    let b = window_coefficients(&model, &basis, &bath, 0.0, 1.5, 0.2, &q).unwrap();
    assert!((&b.c_matrix - &a.c_matrix.scale_real(4.0)).max_abs() < 1e-12 * b.c_matrix.max_abs());
    assert!((&b.h_matrix - &a.h_matrix.scale_real(4.0)).max_abs() < 1e-12 * b.c_matrix.max_abs());
}

#[test]
fn filter_route_approaches_secular_limit() {
    let model = driven_qubit(1.0);
    let bath = BathSpec::diagonal(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: 1.0 }, 1).unwrap();
    let sec = secular_limit_coefficients(&model, &bath, 0.1).unwrap();
    let f = compute_cg_filter_route(&model, &bath, 1000.0, 0.1).unwrap();
    assert_eq!(f.frequencies, sec.frequencies);
    for j in 0..2 {
        let (got, want) = (f.c_matrix[(j, j)].re, sec.c_matrix[(j, j)].re);
        assert!((got - want).abs() < 1e-3 * want, "{got} vs {want}");
    }
    // cross-sector weight falls off like 1/Δ
    assert!(f.c_matrix[(0, 1)].norm() * 1000.0 < 0.05);
}
