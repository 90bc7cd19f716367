//! Special functions needed by the bath models.

use crate::linalg::C64;

const ASYMPTOTIC_RADIUS: f64 = 15.0;

/// Trigamma function ψ'(z) for complex z with Re z > 0.
///
/// Shifts z upward with ψ'(z) = ψ'(z+1) + 1/z² until |z| is large, then
/// sums the Bernoulli asymptotic series.
pub fn trigamma(z: C64) -> C64 {
    let mut z = z;
    let mut acc = C64::new(0.0, 0.0);
    while z.norm() < ASYMPTOTIC_RADIUS {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let w = 1.0 / z;
    let w2 = w * w;
    // 1/z + 1/(2z²) + Σ B_{2k} / z^{2k+1}
    let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];
    let mut series = C64::new(0.0, 0.0);
    let mut p = w * w2;
    for c in b {
        series += p * c;
        p *= w2;
    }
    acc + w + 0.5 * w2 + series
}

/// sinc(x) = sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// ∫_0^L e^{i x s} ds.
pub fn phase_window(x: f64, len: f64) -> C64 {
    let half = 0.5 * x * len;
    C64::from_polar(len * sinc(half), half)
}

/// x / (1 − e^{−x/t}), continuous through x = 0 where it equals t.
pub fn bose_weight(x: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return if x > 0.0 { x } else { 0.0 };
    }
    let r = x / t;
    if r.abs() < 1e-12 {
        return t * (1.0 + 0.5 * r);
    }
    // 1 − e^{−r} = −expm1(−r)
    x / -(-r).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trigamma_known_values() {
        // ψ'(1) = π²/6, ψ'(1/2) = π²/2
        assert!((trigamma(C64::new(1.0, 0.0)).re - PI * PI / 6.0).abs() < 1e-14);
        assert!((trigamma(C64::new(0.5, 0.0)).re - PI * PI / 2.0).abs() < 1e-13);
        // reflection-free check against a direct series Σ 1/(z+n)²
        let z = C64::new(0.3, 2.7);
        let mut direct = C64::new(0.0, 0.0);
        for n in 0..2_000_000 {
            direct += 1.0 / ((z + n as f64) * (z + n as f64));
        }
        // tail ≈ 1/(z+N)
        direct += 1.0 / (z + 2e6) + 0.5 / ((z + 2e6) * (z + 2e6));
        assert!((trigamma(z) - direct).norm() < 1e-10);
    }

    #[test]
    fn trigamma_conjugate_symmetry() {
        let z = C64::new(0.02, 13.0);
        assert!((trigamma(z.conj()) - trigamma(z).conj()).norm() < 1e-16);
    }

    #[test]
    fn window_and_bose() {
        let w = phase_window(2.0, 3.0);
        let exact = (C64::new(0.0, 6.0).exp() - 1.0) / C64::new(0.0, 2.0);
        assert!((w - exact).norm() < 1e-14);
        assert!((phase_window(0.0, 3.0) - C64::new(3.0, 0.0)).norm() < 1e-15);
        assert!((bose_weight(0.0, 2.0) - 2.0).abs() < 1e-15);
        assert!((bose_weight(1.0, 1.0) - 1.0 / (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(bose_weight(-1.0, 0.0), 0.0);
    }
}
