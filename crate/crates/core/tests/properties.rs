use cglindblad::bath::{BathKind, BathSpec};
use cglindblad::cg::{assemble_lindbladian, kossakowski_check, window_coefficients, QuadratureSpec};
use cglindblad::evolution::{propagate, DensityMatrix};
use cglindblad::linalg::C64;
use cglindblad::system::{default_basis, qutrit_model};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generators_are_positive_and_trace_preserving(
        delta in 0.3f64..15.0,
        temperature in 0.0f64..2.0,
        corr in -0.9f64..0.9,
        t0 in 0.0f64..10.0,
    ) {
        let model = qutrit_model();
        let basis = default_basis(&model);
        let cross = cglindblad::linalg::ComplexMatrix::from_fn(2, 2, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(corr, 0.0) });
        let bath = BathSpec::new(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature }, cross).unwrap();
        let c = window_coefficients(&model, &basis, &bath, t0, delta, 0.1, &QuadratureSpec::default()).unwrap();
        let k = kossakowski_check(&c);
        prop_assert!(k.passed, "min {} max {}", k.min, k.max);
        let l = assemble_lindbladian(&model, &c).unwrap();
        prop_assert!(l.trace_residual() < 1e-12);
        let traj = propagate(&l, &DensityMatrix::maximally_mixed(3), &[0.0, 50.0, 500.0]).unwrap();
        prop_assert!(traj.max_trace_error() < 1e-10);
        prop_assert!(traj.min_eigenvalue() > -1e-10);
    }
}
