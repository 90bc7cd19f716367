//! Bath two-point functions G(τ) = ⟨Φ(τ)Φ(0)⟩ and their Fourier forms.
//!
//! Every built-in bath is a scalar function g(τ) times a Hermitian cross
//! structure S over coupling labels: G_{A1A2}(τ) = S_{A1A2} g(τ).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::quadrature::{adaptive_scalar, graded_breaks};
use crate::special::{bose_weight, trigamma};

/// Absolute default for the Wightman iε regulator.
pub const DEFAULT_WIGHTMAN_EPSILON: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub frequency: f64,
    pub coupling: f64,
    pub occupation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Trajectory {
    Inertial,
    Accelerated { acceleration: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum BathKind {
    /// G(τ) = γ₀ δ(τ).
    DeltaCorrelated { gamma0: f64 },
    /// Ohmic field with exponential cutoff at temperature T (T = 0 allowed).
    OhmicThermal { eta: f64, cutoff: f64, temperature: f64 },
    /// Finite set of oscillators; `broadening` is the Lorentzian width used
    /// only for frequency-domain quantities.
    DiscreteModes { modes: Vec<Mode>, broadening: f64 },
    /// Massless field Wightman function along a detector trajectory.
    VacuumWightman { trajectory: Trajectory, epsilon: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BathSpec {
    pub kind: BathKind,
    cross: ComplexMatrix,
}

impl BathSpec {
    pub fn new(kind: BathKind, cross: ComplexMatrix) -> Result<Self> {
        if !cross.is_square() {
            return Err(Error::DimensionMismatch("cross structure must be square".into()));
        }
        if cross.hermiticity_residual() > 1e-12 * cross.frobenius_norm().max(1.0) {
            return Err(Error::Validation { path: "bath.cross_structure".into(), reason: "not Hermitian".into() });
        }
        validate_kind(&kind)?;
        Ok(Self { kind, cross: cross.hermitian_part() })
    }

    /// Identical, uncorrelated baths on each of `n` couplings.
    pub fn diagonal(kind: BathKind, n: usize) -> Result<Self> {
        Self::new(kind, ComplexMatrix::identity(n))
    }

    /// One shared field for all `n` couplings (all-ones structure).
    pub fn shared(kind: BathKind, n: usize) -> Result<Self> {
        Self::new(kind, ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0)))
    }

    pub fn cross_structure(&self) -> &ComplexMatrix {
        &self.cross
    }

    pub fn n_couplings(&self) -> usize {
        self.cross.rows()
    }

    pub fn is_delta(&self) -> bool {
        matches!(self.kind, BathKind::DeltaCorrelated { .. })
    }

    pub fn delta_strength(&self) -> Option<f64> {
        match self.kind {
            BathKind::DeltaCorrelated { gamma0 } => Some(gamma0),
            _ => None,
        }
    }

    /// Width of the peak of |g(τ)| around τ = 0, used to grade quadrature
    /// panels. `None` for non-decaying or delta baths.
    pub fn peak_width(&self) -> Option<f64> {
        match &self.kind {
            BathKind::OhmicThermal { cutoff, .. } => Some(1.0 / cutoff),
            BathKind::VacuumWightman { epsilon, .. } => Some(*epsilon),
            _ => None,
        }
    }

    /// Highest oscillation frequency present in g(τ) away from τ = 0.
    pub fn oscillation_scale(&self) -> f64 {
        match &self.kind {
            BathKind::DiscreteModes { modes, .. } => modes.iter().fold(0.0f64, |m, k| m.max(k.frequency.abs())),
            BathKind::OhmicThermal { temperature, .. } => 2.0 * PI * temperature,
            BathKind::VacuumWightman { trajectory: Trajectory::Accelerated { acceleration }, .. } => *acceleration,
            _ => 0.0,
        }
    }

    /// Scalar correlation g(τ).
    pub fn scalar_correlation(&self, tau: f64) -> Result<C64> {
        match &self.kind {
            BathKind::DeltaCorrelated { .. } => {
                Err(Error::UnsupportedKind("delta-correlated bath has no pointwise correlation".into()))
            }
            BathKind::OhmicThermal { eta, cutoff, temperature } => {
                Ok(ohmic_correlation(*eta, *cutoff, *temperature, tau))
            }
            BathKind::DiscreteModes { modes, .. } => Ok(modes
                .iter()
                .map(|m| {
                    let g2 = m.coupling * m.coupling;
                    let ph = C64::from_polar(1.0, -m.frequency * tau);
                    g2 * ((m.occupation + 1.0) * ph + m.occupation * ph.conj())
                })
                .sum()),
            BathKind::VacuumWightman { trajectory, epsilon } => {
                let z = C64::new(tau, -epsilon);
                Ok(match trajectory {
                    Trajectory::Inertial => -1.0 / (4.0 * PI * PI * z * z),
                    Trajectory::Accelerated { acceleration: a } => {
                        let s = (0.5 * a * z).sinh();
                        -(a * a) / (16.0 * PI * PI * s * s)
                    }
                })
            }
        }
    }

    /// Matrix correlation G_{A1A2}(τ) = S_{A1A2} g(τ).
    pub fn correlation(&self, tau: f64) -> Result<ComplexMatrix> {
        Ok(self.cross.scale(self.scalar_correlation(tau)?))
    }

    /// Scalar spectral density γ(ω) = ∫ e^{iωτ} g(τ) dτ.
    pub fn scalar_spectral_density(&self, omega: f64) -> f64 {
        match &self.kind {
            BathKind::DeltaCorrelated { gamma0 } => *gamma0,
            BathKind::OhmicThermal { eta, cutoff, temperature } => {
                2.0 * eta * bose_weight(omega, *temperature) * (-omega.abs() / cutoff).exp()
            }
            BathKind::DiscreteModes { modes, broadening } => {
                let w = *broadening;
                let lor = |x: f64| 2.0 * w / (x * x + w * w);
                modes
                    .iter()
                    .map(|m| {
                        let g2 = m.coupling * m.coupling;
                        g2 * ((m.occupation + 1.0) * lor(omega - m.frequency) + m.occupation * lor(omega + m.frequency))
                    })
                    .sum()
            }
            BathKind::VacuumWightman { trajectory, epsilon } => {
                let reg = (-epsilon * omega).exp() / (2.0 * PI);
                match trajectory {
                    Trajectory::Inertial => {
                        if omega > 0.0 {
                            omega * reg
                        } else {
                            0.0
                        }
                    }
                    Trajectory::Accelerated { acceleration: a } => {
                        // ω/(1 − e^{−2πω/a}) is the Bose weight at temperature a/2π
                        bose_weight(omega, a / (2.0 * PI)) * reg
                    }
                }
            }
        }
    }

    pub fn spectral_density(&self, omega: f64) -> ComplexMatrix {
        self.cross.scale_real(self.scalar_spectral_density(omega))
    }

    /// Interval outside which γ is negligible (relative e^{−40}).
    pub fn spectral_support(&self) -> (f64, f64) {
        match &self.kind {
            BathKind::DeltaCorrelated { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            BathKind::OhmicThermal { cutoff, .. } => (-40.0 * cutoff, 40.0 * cutoff),
            BathKind::DiscreteModes { modes, broadening } => {
                let m = modes.iter().fold(0.0f64, |m, k| m.max(k.frequency.abs()));
                (-m - 1e6 * broadening, m + 1e6 * broadening)
            }
            BathKind::VacuumWightman { trajectory, epsilon } => {
                let hi = 40.0 / epsilon;
                let lo = match trajectory {
                    Trajectory::Inertial => 0.0,
                    Trajectory::Accelerated { acceleration: a } => -40.0 / (2.0 * PI / a + epsilon),
                };
                (lo, hi)
            }
        }
    }

    /// Frequencies where γ has kinks or sharp features.
    fn spectral_breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            BathKind::DiscreteModes { modes, .. } => modes.iter().flat_map(|m| [m.frequency, -m.frequency]).collect(),
            _ => vec![0.0],
        }
    }

    /// Smallest frequency scale of γ (used for panel widths).
    pub fn spectral_feature_scale(&self) -> f64 {
        match &self.kind {
            BathKind::DeltaCorrelated { .. } => f64::INFINITY,
            BathKind::OhmicThermal { cutoff, temperature, .. } => {
                if *temperature > 0.0 {
                    cutoff.min(*temperature)
                } else {
                    *cutoff
                }
            }
            BathKind::DiscreteModes { broadening, .. } => *broadening,
            BathKind::VacuumWightman { trajectory, epsilon } => match trajectory {
                Trajectory::Inertial => 1.0 / epsilon,
                Trajectory::Accelerated { acceleration: a } => (a / (2.0 * PI)).min(1.0 / epsilon),
            },
        }
    }

    /// Scalar half-range transform Γ(ω) = ∫_0^∞ e^{iωτ} g(τ) dτ
    /// = γ(ω)/2 + (i/2π) PV∫ γ(ν)/(ω − ν) dν.
    pub fn scalar_half_range(&self, omega: f64) -> Result<C64> {
        match &self.kind {
            BathKind::DeltaCorrelated { gamma0 } => Ok(C64::new(0.5 * gamma0, 0.0)),
            BathKind::DiscreteModes { modes, broadening } => {
                let w = *broadening;
                Ok(modes
                    .iter()
                    .map(|m| {
                        let g2 = m.coupling * m.coupling;
                        g2 * ((m.occupation + 1.0) / C64::new(w, -(omega - m.frequency))
                            + m.occupation / C64::new(w, -(omega + m.frequency)))
                    })
                    .sum())
            }
            _ => {
                let pv = self.principal_value(omega)?;
                Ok(C64::new(0.5 * self.scalar_spectral_density(omega), pv / (2.0 * PI)))
            }
        }
    }

    pub fn half_range_transform(&self, omega: f64) -> Result<ComplexMatrix> {
        Ok(self.cross.scale(self.scalar_half_range(omega)?))
    }

    /// PV∫ γ(ν)/(ω − ν) dν by singularity subtraction on [ω−R, ω+R].
    fn principal_value(&self, omega: f64) -> Result<f64> {
        let (lo, hi) = self.spectral_support();
        let scale = self.spectral_feature_scale();
        let r = scale.min(1.0 + omega.abs());
        let g0 = self.scalar_spectral_density(omega);
        let mut total = 0.0;
        let (a, b) = (omega - r, omega + r);
        let mut inner = vec![a, omega, b];
        inner.extend(self.spectral_breakpoints().into_iter().filter(|&x| x > a && x < b));
        inner.sort_by(f64::total_cmp);
        total += adaptive_scalar(
            |nu| {
                let d = omega - nu;
                if d == 0.0 {
                    0.0
                } else {
                    (self.scalar_spectral_density(nu) - g0) / d
                }
            },
            &inner,
            1e-11,
            1e-15,
        )?;
        // geometric panels moving away from the singularity at ω
        let outer = |from: f64, to: f64, upward: bool| -> Result<f64> {
            if to <= from {
                return Ok(0.0);
            }
            let mut br = vec![from, to];
            let mut h = r;
            let mut x = if upward { from } else { to };
            loop {
                x = if upward { x + h } else { x - h };
                if x <= from || x >= to {
                    break;
                }
                br.push(x);
                h *= 2.0;
            }
            br.extend(self.spectral_breakpoints().into_iter().filter(|&x| x > from && x < to));
            br.sort_by(f64::total_cmp);
            br.dedup();
            adaptive_scalar(|nu| self.scalar_spectral_density(nu) / (omega - nu), &br, 1e-11, 1e-15)
        };
        total += outer(b, hi, true)?;
        total += outer(lo, a, false)?;
        Ok(total)
    }
}

fn validate_kind(kind: &BathKind) -> Result<()> {
    let bad = |path: &str, reason: &str| Err(Error::Validation { path: format!("bath.{path}"), reason: reason.into() });
    match kind {
        BathKind::DeltaCorrelated { gamma0 } if !(*gamma0 >= 0.0) => bad("gamma0", "must be >= 0"),
        BathKind::OhmicThermal { eta, cutoff, temperature } => {
            if !(*eta >= 0.0) {
                bad("eta", "must be >= 0")
            } else if !(*cutoff > 0.0) {
                bad("cutoff", "must be > 0")
            } else if !(*temperature >= 0.0) {
                bad("temperature", "must be >= 0")
            } else {
                Ok(())
            }
        }
        BathKind::DiscreteModes { modes, broadening } => {
            if modes.is_empty() {
                return bad("modes", "at least one mode is required");
            }
            if !(*broadening > 0.0) {
                return bad("broadening", "must be > 0");
            }
            if modes.iter().any(|m| !(m.occupation >= 0.0) || !m.frequency.is_finite()) {
                return bad("modes", "occupations must be >= 0 and frequencies finite");
            }
            Ok(())
        }
        BathKind::VacuumWightman { trajectory, epsilon } => {
            if !(*epsilon > 0.0) {
                return bad("epsilon", "must be > 0");
            }
            if let Trajectory::Accelerated { acceleration } = trajectory {
                if !(*acceleration > 0.0) {
                    return bad("acceleration", "must be > 0");
                }
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Closed form of (1/π)∫₀^∞ η ν e^{−ν/ν_c}[coth(ν/2T) cos ντ − i sin ντ] dν
/// through the trigamma function.
pub fn ohmic_correlation(eta: f64, cutoff: f64, temperature: f64, tau: f64) -> C64 {
    let b0 = 1.0 / cutoff;
    let zp = C64::new(b0, tau);
    let zero_t = 1.0 / (zp * zp);
    if temperature <= 0.0 {
        return eta / PI * zero_t;
    }
    let t = temperature;
    let zm = C64::new(b0, -tau);
    let thermal = t * t * (trigamma(t * zp) + trigamma(t * zm)) - 1.0 / (zm * zm);
    eta / PI * thermal
}

/// The same Ohmic correlation evaluated by adaptive quadrature of its
/// defining frequency integral. Slow; kept as an independent check.
pub fn ohmic_correlation_quadrature(eta: f64, cutoff: f64, temperature: f64, tau: f64) -> Result<C64> {
    let coth = |nu: f64| {
        if temperature <= 0.0 {
            1.0
        } else {
            1.0 / (nu / (2.0 * temperature)).tanh()
        }
    };
    let upper = 60.0 * cutoff;
    let period = if tau.abs() > 0.0 { 2.0 * PI / tau.abs() } else { upper };
    let h0 = (cutoff.min(period) * 1e-3).max(1e-12);
    let breaks = graded_breaks(upper, h0, period.min(cutoff));
    let re = adaptive_scalar(
        |nu| if nu == 0.0 { 2.0 * temperature } else { nu * (-nu / cutoff).exp() * coth(nu) * (nu * tau).cos() },
        &breaks,
        1e-10,
        1e-14,
    )?;
    let im = adaptive_scalar(|nu| -nu * (-nu / cutoff).exp() * (nu * tau).sin(), &breaks, 1e-10, 1e-14)?;
    Ok(C64::new(re, im) * (eta / PI))
}

/// Findings of [`validate_bath`].
#[derive(Clone, Debug)]
pub struct BathReport {
    pub hermiticity_residual: f64,
    pub min_spectral_ratio: f64,
    pub positivity_ok: bool,
    /// First grid τ with |G(τ)| < 0.01 |G(0)|; `None` means no decay seen.
    pub correlation_time: Option<f64>,
    /// Set when no decay was detected on the grid.
    pub no_decay_flag: bool,
    /// Zero one-point function holds for all built-in Gaussian baths.
    pub one_point_structural: bool,
    pub passed: bool,
}

/// Hermiticity G(−τ) = G(τ)†, spectral positivity and decay-time report.
pub fn validate_bath(bath: &BathSpec, tau_grid: &[f64]) -> BathReport {
    let mut herm = 0.0f64;
    let mut t_b = None;
    if !bath.is_delta() {
        let g0 = bath.scalar_correlation(0.0).map(|g| g.norm()).unwrap_or(0.0);
        for &tau in tau_grid {
            let (Ok(plus), Ok(minus)) = (bath.correlation(tau), bath.correlation(-tau)) else {
                continue;
            };
            let scale = plus.max_abs().max(f64::MIN_POSITIVE);
            herm = herm.max((&minus - &plus.adjoint()).max_abs() / scale);
            if t_b.is_none() && tau > 0.0 {
                if let Ok(g) = bath.scalar_correlation(tau) {
                    if g.norm() < 0.01 * g0 {
                        t_b = Some(tau);
                    }
                }
            }
        }
    }
    let scale = match &bath.kind {
        BathKind::DeltaCorrelated { .. } => 1.0,
        BathKind::OhmicThermal { cutoff, .. } => *cutoff,
        BathKind::DiscreteModes { .. } => 2.0 * bath.oscillation_scale().max(1.0),
        BathKind::VacuumWightman { epsilon, .. } => 0.1 / epsilon,
    };
    let grid: Vec<f64> = (0..=400).map(|k| -5.0 * scale + 10.0 * scale * k as f64 / 400.0).collect();
    let vals: Vec<f64> = grid.iter().map(|&w| bath.scalar_spectral_density(w)).collect();
    let max = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = vals.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let min_ratio = if max > 0.0 { min / max } else { 0.0 };
    let positivity_ok = min_ratio >= -1e-8;
    let no_decay_flag = !bath.is_delta() && t_b.is_none();
    BathReport {
        hermiticity_residual: herm,
        min_spectral_ratio: min_ratio,
        positivity_ok,
        correlation_time: t_b,
        no_decay_flag,
        one_point_structural: true,
        passed: herm < 1e-8 && positivity_ok,
    }
}

/// Largest relative deviation from γ(−ω) = e^{−ω/T} γ(ω) on the given
/// frequencies; `None` for baths without a temperature.
pub fn kms_residual(bath: &BathSpec, omegas: &[f64]) -> Option<f64> {
    let t = match &bath.kind {
        BathKind::OhmicThermal { temperature, .. } if *temperature > 0.0 => *temperature,
        BathKind::VacuumWightman { trajectory: Trajectory::Accelerated { acceleration }, .. } => {
            acceleration / (2.0 * PI)
        }
        _ => return None,
    };
    let mut worst = 0.0f64;
    for &w in omegas {
        let plus = bath.scalar_spectral_density(w);
        let minus = bath.scalar_spectral_density(-w);
        let want = (-w / t).exp() * plus;
        // the Wightman regulator breaks KMS by e^{2εω}; compare without it
        let want = match &bath.kind {
            BathKind::VacuumWightman { epsilon, .. } => want * (2.0 * epsilon * w).exp(),
            _ => want,
        };
        let scale = want.abs().max(minus.abs());
        if scale > 0.0 {
            worst = worst.max((minus - want).abs() / scale);
        }
    }
    Some(worst)
}

/// Time-domain check of Γ(ω) = ∫_0^L e^{iωτ} g(τ) dτ truncated at L.
pub fn half_range_time_domain(bath: &BathSpec, omega: f64, cutoff_time: f64) -> Result<C64> {
    let width = bath.peak_width().unwrap_or(1.0);
    let osc = (omega.abs() + bath.oscillation_scale()).max(1e-3);
    let breaks = graded_breaks(cutoff_time, width / 4.0, (1.0 / osc).min(width * 64.0).max(width));
    let f = |part: usize| {
        move |tau: f64| {
            let g = bath.scalar_correlation(tau).unwrap_or(ZERO) * C64::from_polar(1.0, omega * tau);
            if part == 0 {
                g.re
            } else {
                g.im
            }
        }
    };
    let re = adaptive_scalar(f(0), &breaks, 1e-11, 1e-14)?;
    let im = adaptive_scalar(f(1), &breaks, 1e-11, 1e-14)?;
    Ok(C64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ohmic_closed_form_matches_quadrature() {
        for &(t, tau) in &[(0.0, 0.0), (0.0, 0.37), (1.0, 0.0), (1.0, 0.8), (0.3, 2.5)] {
            let a = ohmic_correlation(0.7, 5.0, t, tau);
            let b = ohmic_correlation_quadrature(0.7, 5.0, t, tau).unwrap();
            assert!((a - b).norm() < 1e-8 * a.norm().max(1e-3), "T={t} tau={tau}: {a} vs {b}");
        }
    }
}
