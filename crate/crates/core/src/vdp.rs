//! Renormalization-group treatment of the weakly damped van der Pol
//! oscillator x'' + x = ε(1 − x²)x'.

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::ode::{integrate, GbsOptions};

/// How the amplitude A relates to the reference initial data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Matching {
    /// x(0) = 2 Re A, x'(0) = −2 Im A, read off the ε = 0 solution.
    #[default]
    LeadingOrder,
    /// Also absorbs the O(ε) velocity of the resonant correction:
    /// x'(0) = −2 Im A + ε Re[A(1 − |A|²)].
    FirstOrder,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VdpConfig {
    pub epsilon: f64,
    pub a0: C64,
    pub horizon: f64,
    pub tolerance: f64,
    pub matching: Matching,
}

impl VdpConfig {
    pub fn new(epsilon: f64, a0: C64) -> Self {
        let horizon = if epsilon > 0.0 { 3.0 / epsilon } else { 30.0 };
        Self { epsilon, a0, horizon, tolerance: 1e-12, matching: Matching::LeadingOrder }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) {
            return Err(Error::Validation { path: "epsilon".into(), reason: "must be non-negative".into() });
        }
        if self.horizon > 100.0 / self.epsilon.max(1e-6) {
            return Err(Error::Validation {
                path: "horizon".into(),
                reason: "exceeds 100/epsilon, outside the first-order regime".into(),
            });
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation { path: "tolerance".into(), reason: "must be positive".into() });
        }
        Ok(())
    }

    /// Reference initial data (x(0), x'(0)) for the amplitude A.
    pub fn initial_data(&self) -> (f64, f64) {
        let a = self.a0;
        let v = -2.0 * a.im;
        match self.matching {
            Matching::LeadingOrder => (2.0 * a.re, v),
            Matching::FirstOrder => (2.0 * a.re, v + self.epsilon * (a * (1.0 - a.norm_sqr())).re),
        }
    }

    fn options(&self) -> GbsOptions {
        GbsOptions { rtol: self.tolerance, atol: self.tolerance, ..GbsOptions::default() }
    }
}

pub fn amplitude_from_initial(x0: f64, v0: f64) -> C64 {
    C64::new(0.5 * x0, -0.5 * v0)
}

#[derive(Clone, Debug)]
pub struct SampledSolution {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    /// (x² + v²)/2
    pub energy: Vec<f64>,
}

pub fn vdp_reference(cfg: &VdpConfig, x0: f64, v0: f64, times: &[f64]) -> Result<SampledSolution> {
    let eps = cfg.epsilon;
    let f = |_: f64, y: &[f64], d: &mut [f64]| {
        d[0] = y[1];
        d[1] = -y[0] + eps * (1.0 - y[0] * y[0]) * y[1];
    };
    let ys = integrate(f, 0.0, &[x0, v0], times, &cfg.options())?;
    let x: Vec<f64> = ys.iter().map(|y| y[0]).collect();
    let v: Vec<f64> = ys.iter().map(|y| y[1]).collect();
    let energy = x.iter().zip(&v).map(|(a, b)| 0.5 * (a * a + b * b)).collect();
    Ok(SampledSolution { times: times.to_vec(), x, v, energy })
}

/// A e^{it} + ε(t/2) A(1 − |A|²) e^{it} + c.c., resonant terms only.
pub fn vdp_naive(cfg: &VdpConfig, t: f64) -> f64 {
    let a = cfg.a0;
    let secular = a * (cfg.epsilon * 0.5 * t * (1.0 - a.norm_sqr()));
    2.0 * ((a + secular) * C64::from_polar(1.0, t)).re
}

/// A(t) from dA/dt = (ε/2) A (1 − |A|²).
pub fn rg_amplitude(cfg: &VdpConfig, times: &[f64]) -> Result<Vec<C64>> {
    let eps = cfg.epsilon;
    let f = |_: f64, y: &[f64], d: &mut [f64]| {
        let g = 0.5 * eps * (1.0 - y[0] * y[0] - y[1] * y[1]);
        d[0] = g * y[0];
        d[1] = g * y[1];
    };
    let ys = integrate(f, 0.0, &[cfg.a0.re, cfg.a0.im], times, &cfg.options())?;
    Ok(ys.into_iter().map(|y| C64::new(y[0], y[1])).collect())
}

/// |A(t)|² = 1 / (1 + (1/|A₀|² − 1) e^{−εt}).
pub fn rg_amplitude_closed_form(epsilon: f64, a0_abs: f64, t: f64) -> f64 {
    if a0_abs == 0.0 {
        return 0.0;
    }
    (1.0 / (1.0 + (1.0 / (a0_abs * a0_abs) - 1.0) * (-epsilon * t).exp())).sqrt()
}

pub fn vdp_rg(cfg: &VdpConfig, times: &[f64]) -> Result<Vec<f64>> {
    let amps = rg_amplitude(cfg, times)?;
    Ok(amps.iter().zip(times).map(|(a, &t)| 2.0 * (a * C64::from_polar(1.0, t)).re).collect())
}

#[derive(Clone, Debug)]
pub struct VdpErrorReport {
    pub times: Vec<f64>,
    pub x_ref: Vec<f64>,
    pub x_naive: Vec<f64>,
    pub x_rg: Vec<f64>,
    pub e_naive: Vec<f64>,
    pub e_rg: Vec<f64>,
    pub max_e_naive: f64,
    pub max_e_rg: f64,
    /// e_naive / e_rg at t = 1/ε (NaN when ε = 0).
    pub ratio_at_inverse_epsilon: f64,
    pub e_naive_at_inverse_epsilon: f64,
    pub e_rg_at_inverse_epsilon: f64,
}

pub const REPORT_SAMPLES: usize = 1201;

/// Errors of the naive and RG solutions against the reference on a uniform
/// grid over [0, horizon] that contains t = 1/ε.
pub fn vdp_error_report(cfg: &VdpConfig) -> Result<VdpErrorReport> {
    cfg.validate()?;
    let mut times: Vec<f64> =
        (0..REPORT_SAMPLES).map(|k| cfg.horizon * k as f64 / (REPORT_SAMPLES - 1) as f64).collect();
    let marker = if cfg.epsilon > 0.0 { Some(1.0 / cfg.epsilon) } else { None };
    if let Some(m) = marker {
        if m <= cfg.horizon && !times.iter().any(|&t| t == m) {
            times.push(m);
            times.sort_by(f64::total_cmp);
        }
    }
    let (x0, v0) = cfg.initial_data();
    let reference = vdp_reference(cfg, x0, v0, &times)?;
    let x_rg = vdp_rg(cfg, &times)?;
    let x_naive: Vec<f64> = times.iter().map(|&t| vdp_naive(cfg, t)).collect();
    let e_naive: Vec<f64> = x_naive.iter().zip(&reference.x).map(|(a, b)| (a - b).abs()).collect();
    let e_rg: Vec<f64> = x_rg.iter().zip(&reference.x).map(|(a, b)| (a - b).abs()).collect();
    let (mut en, mut er) = (f64::NAN, f64::NAN);
    if let Some(m) = marker {
        if let Some(k) = times.iter().position(|&t| t == m) {
            en = e_naive[k];
            er = e_rg[k];
        }
    }
    Ok(VdpErrorReport {
        max_e_naive: e_naive.iter().cloned().fold(0.0, f64::max),
        max_e_rg: e_rg.iter().cloned().fold(0.0, f64::max),
        ratio_at_inverse_epsilon: en / er,
        e_naive_at_inverse_epsilon: en,
        e_rg_at_inverse_epsilon: er,
        times,
        x_ref: reference.x,
        x_naive,
        x_rg,
        e_naive,
        e_rg,
    })
}

/// max |x| over the last `cycles` periods of a long reference run.
pub fn limit_cycle_amplitude(epsilon: f64, x0: f64, v0: f64, horizon: f64, cycles: f64) -> Result<f64> {
    let cfg = VdpConfig { horizon, ..VdpConfig::new(epsilon, amplitude_from_initial(x0, v0)) };
    let start = horizon - cycles * 2.0 * std::f64::consts::PI;
    let times: Vec<f64> = (0..=2000).map(|k| start + (horizon - start) * k as f64 / 2000.0).collect();
    let sol = vdp_reference(&cfg, x0, v0, &times)?;
    Ok(sol.x.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_limit_is_exact() {
        let cfg = VdpConfig::new(0.0, C64::new(0.4, 0.1));
        let (x0, v0) = cfg.initial_data();
        let tp = 2.0 * std::f64::consts::PI;
        let s = vdp_reference(&cfg, x0, v0, &[tp]).unwrap();
        assert!((s.x[0] - x0).abs() < 1e-10);
        let r = vdp_error_report(&cfg).unwrap();
        assert!(r.max_e_naive < 1e-10 && r.max_e_rg < 1e-10);
    }

    #[test]
    fn naive_matches_initial_data() {
        let cfg = VdpConfig::new(0.1, C64::new(0.3, -0.2));
        assert!((vdp_naive(&cfg, 0.0) - cfg.initial_data().0).abs() < 1e-15);
    }

    #[test]
    fn rg_flow_closed_form() {
        let cfg = VdpConfig::new(0.1, C64::new(0.1, 0.0));
        let times = [0.0, 5.0, 17.0, 30.0];
        let a = rg_amplitude(&cfg, &times).unwrap();
        for (z, &t) in a.iter().zip(&times) {
            assert!((z.norm() - rg_amplitude_closed_form(0.1, 0.1, t)).abs() < 1e-9);
        }
    }

    #[test]
    fn rg_fixed_points_and_phase() {
        let zero = VdpConfig::new(0.1, C64::new(0.0, 0.0));
        assert!(rg_amplitude(&zero, &[20.0]).unwrap()[0].norm() == 0.0);
        let a0 = C64::from_polar(1.0, 0.7);
        let unit = VdpConfig::new(0.1, a0);
        let a = rg_amplitude(&unit, &[10.0, 30.0]).unwrap();
        for z in a {
            assert!((z.norm() - 1.0).abs() < 1e-10 && (z.arg() - 0.7).abs() < 1e-10);
        }
    }

    #[test]
    fn first_order_matching_removes_the_phase_offset() {
        let lead = vdp_error_report(&VdpConfig::new(0.1, C64::new(0.25, 0.0))).unwrap();
        let cfg = VdpConfig { matching: Matching::FirstOrder, ..VdpConfig::new(0.1, C64::new(0.25, 0.0)) };
        let first = vdp_error_report(&cfg).unwrap();
        assert!(first.e_rg_at_inverse_epsilon < 0.5 * lead.e_rg_at_inverse_epsilon);
    }

    #[test]
    fn secular_breakdown_size() {
        // ε (t/2) |A| (1 − |A|²) at t = 1/ε
        let a = 0.5f64;
        assert!((0.1 * 5.0 * a * (1.0 - a * a) - 0.1875).abs() < 1e-15);
    }
}
