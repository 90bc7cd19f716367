//! Coarse-grained coefficients H^Δ and C^Δ, the Kossakowski audit, GKLS
//! assembly and the secular (Δ → ∞) limit.
//!
//! Labeling: coefficients are attached to a list of jump operators X_j. In
//! the basis labeling X_j = σ_B (Hermitian); in the eigenoperator labeling
//! X_j = A(ω). The generator is always
//!   D[ρ] = −i[Σ H_jk X_j† X_k, ρ] + Σ C_jk (X_k ρ X_j† − ½{X_j† X_k, ρ}).

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bath::{BathKind, BathSpec};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, kron_compose, ComplexMatrix, C64, I, ZERO};
use crate::quadrature::{adaptive_gk, composite_nodes, gl16, graded_breaks, uniform_breaks};
use crate::special::phase_window;
use crate::system::{eigenoperator_decompose, HeisenbergTable, OperatorBasis, SystemModel};

/// Relative threshold below which a negative Kossakowski eigenvalue is fatal.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureScheme {
    GaussLegendreTensor,
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: QuadratureScheme,
    pub points_per_axis: usize,
    pub target_rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { scheme: QuadratureScheme::GaussLegendreTensor, points_per_axis: 64, target_rel_tol: 1e-8 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.scheme == QuadratureScheme::GaussLegendreTensor && self.points_per_axis < 8 {
            return Err(Error::Validation {
                path: "quadrature.points_per_axis".into(),
                reason: "must be at least 8 for the tensor scheme".into(),
            });
        }
        if !(self.target_rel_tol > 0.0) {
            return Err(Error::Validation {
                path: "quadrature.target_rel_tol".into(),
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Labeling {
    Basis,
    Eigen,
}

/// Coarse-grained GKLS data over a list of jump operators.
#[derive(Clone, Debug)]
pub struct CGCoefficients {
    pub delta: f64,
    pub lambda: f64,
    pub h_matrix: ComplexMatrix,
    pub c_matrix: ComplexMatrix,
    pub operators: Vec<ComplexMatrix>,
    pub labels: Vec<String>,
    pub labeling: Labeling,
    /// Bohr frequency of each operator in the eigenoperator labeling.
    pub frequencies: Option<Vec<f64>>,
    /// Estimated quadrature error relative to the largest coefficient.
    pub error_estimate: f64,
    /// Smallest Kossakowski eigenvalue when it is negative but tolerated.
    pub positivity_warning: Option<f64>,
}

impl CGCoefficients {
    pub fn dimension(&self) -> usize {
        self.operators[0].rows()
    }

    /// H^Δ_12 = Σ H_jk X_j† X_k.
    pub fn hamiltonian_shift(&self) -> ComplexMatrix {
        let d = self.dimension();
        let n = self.operators.len();
        let mut out = ComplexMatrix::zeros(d, d);
        for k in 0..n {
            let mut col = ComplexMatrix::zeros(d, d);
            let mut any = false;
            for j in 0..n {
                let h = self.h_matrix[(j, k)];
                if h != ZERO {
                    col += &self.operators[j].adjoint().scale(h);
                    any = true;
                }
            }
            if any {
                out += &col.matmul(&self.operators[k]);
            }
        }
        out
    }

    /// Coefficients re-expressed on an orthonormal Hermitian basis through
    /// A_jB = Tr(σ_B X_j): C_basis = A† C A, likewise for H.
    pub fn to_basis(&self, basis: &OperatorBasis) -> CGCoefficients {
        let n = self.operators.len();
        let m = basis.len();
        let a = ComplexMatrix::from_fn(n, m, |j, b| basis.elements()[b].hs_inner(&self.operators[j]));
        let ad = a.adjoint();
        CGCoefficients {
            delta: self.delta,
            lambda: self.lambda,
            h_matrix: ad.matmul(&self.h_matrix).matmul(&a),
            c_matrix: ad.matmul(&self.c_matrix).matmul(&a),
            operators: basis.elements().to_vec(),
            labels: basis.labels().to_vec(),
            labeling: Labeling::Basis,
            frequencies: None,
            error_estimate: self.error_estimate,
            positivity_warning: self.positivity_warning,
        }
    }

    /// System relaxation time estimate 1/‖C‖.
    pub fn relaxation_time(&self) -> f64 {
        let n = self.c_matrix.frobenius_norm();
        if n > 0.0 {
            1.0 / n
        } else {
            f64::INFINITY
        }
    }
}

/// Internal record of the λ-free, window-dependent integrals.
struct WindowIntegrals {
    c: ComplexMatrix,
    h: ComplexMatrix,
}

/// Bohr-phase data for the closed-form inner integral
/// Q(τ)_{B1B2} = Σ S_{A1A2} ∫_0^{Δ−τ} u_{A1B1}(t0+s+τ) u_{A2B2}(t0+s) ds.
struct PhaseKernel {
    n_a: usize,
    n_b: usize,
    freqs: Vec<f64>,
    /// Σ_{A1} S_{A1A2} c_{A1B1,k} at [(b1*n_a + a2)*nf + k]
    left: Vec<C64>,
    /// c_{A2B2,l} e^{iω_l t0} at [(a2*n_b + b2)*nf + l]
    right: Vec<C64>,
    active: Vec<usize>,
}

impl PhaseKernel {
    fn new(table: &HeisenbergTable, coeffs: &[C64], cross: &ComplexMatrix, t0: f64) -> Self {
        let n_a = table.n_ops();
        let n_b = table.n_basis();
        let freqs = table.frequencies().to_vec();
        let nf = freqs.len();
        let at = |a: usize, b: usize, k: usize| coeffs[(a * n_b + b) * nf + k];
        let mut left = vec![ZERO; n_b * n_a * nf];
        let mut right = vec![ZERO; n_a * n_b * nf];
        for b in 0..n_b {
            for a2 in 0..n_a {
                for k in 0..nf {
                    let mut acc = ZERO;
                    for a1 in 0..n_a {
                        acc += cross[(a1, a2)] * at(a1, b, k);
                    }
                    left[(b * n_a + a2) * nf + k] = acc;
                }
            }
        }
        for a in 0..n_a {
            for b in 0..n_b {
                for (l, w) in freqs.iter().enumerate() {
                    right[(a * n_b + b) * nf + l] = at(a, b, l) * C64::from_polar(1.0, w * t0);
                }
            }
        }
        let active = (0..n_b).filter(|&b| (0..n_a).any(|a| (0..nf).any(|k| at(a, b, k).norm() > 0.0))).collect();
        let mut out = Self { n_a, n_b, freqs, left, right, active };
        out.shift_left(t0);
        out
    }

    fn shift_left(&mut self, t0: f64) {
        let nf = self.freqs.len();
        for (idx, v) in self.left.iter_mut().enumerate() {
            *v *= C64::from_polar(1.0, self.freqs[idx % nf] * t0);
        }
    }

    fn q(&self, tau: f64, len: f64) -> ComplexMatrix {
        let nf = self.freqs.len();
        let (n_a, n_b) = (self.n_a, self.n_b);
        let phase: Vec<C64> = self.freqs.iter().map(|w| C64::from_polar(1.0, w * tau)).collect();
        let mut e = vec![ZERO; nf * nf];
        for k in 0..nf {
            for l in 0..nf {
                e[k * nf + l] = phase[k] * phase_window(self.freqs[k] + self.freqs[l], len);
            }
        }
        let mut q = ComplexMatrix::zeros(n_b, n_b);
        let mut z = vec![ZERO; n_a * nf];
        for &b1 in &self.active {
            for a2 in 0..n_a {
                let lrow = &self.left[(b1 * n_a + a2) * nf..(b1 * n_a + a2 + 1) * nf];
                for l in 0..nf {
                    let mut acc = ZERO;
                    for k in 0..nf {
                        acc += lrow[k] * e[k * nf + l];
                    }
                    z[a2 * nf + l] = acc;
                }
            }
            for &b2 in &self.active {
                let mut acc = ZERO;
                for a2 in 0..n_a {
                    let r = &self.right[(a2 * n_b + b2) * nf..(a2 * n_b + b2 + 1) * nf];
                    for l in 0..nf {
                        acc += z[a2 * nf + l] * r[l];
                    }
                }
                q[(b1, b2)] = acc;
            }
        }
        q
    }
}

/// Resolution for the outer τ integral at refinement `level`.
fn tau_breaks(model: &SystemModel, bath: &BathSpec, delta: f64, quad: &QuadratureSpec, level: u32) -> Vec<f64> {
    let osc = 2.0 * model.max_bohr_frequency() + bath.oscillation_scale();
    let refine = 2f64.powi(level as i32);
    let mut hmax = if osc > 0.0 { PI / osc } else { delta };
    hmax = hmax.min(delta / (quad.points_per_axis as f64 / 16.0).ceil().max(1.0)) / refine;
    match bath.peak_width() {
        Some(w) if w / 4.0 < hmax => graded_breaks(delta, w / (4.0 * refine), hmax),
        _ => uniform_breaks(0.0, delta, (delta / hmax).ceil() as usize),
    }
}

fn integrate_window_fixed(
    kernel: &PhaseKernel,
    bath: &BathSpec,
    delta: f64,
    breaks: &[f64],
) -> Result<WindowIntegrals> {
    let (xs, ws) = composite_nodes(breaks, gl16());
    let parts: Vec<Result<(ComplexMatrix, ComplexMatrix)>> = xs
        .par_iter()
        .zip(ws.par_iter())
        .map(|(&tau, &w)| {
            let g = bath.scalar_correlation(tau)?;
            let q = kernel.q(tau, delta - tau);
            let qd = q.adjoint();
            let a = q.scale(g * w);
            let b = qd.scale(g.conj() * w);
            Ok((&a + &b, &a - &b))
        })
        .collect();
    let n = kernel.n_b;
    let mut c = ComplexMatrix::zeros(n, n);
    let mut h = ComplexMatrix::zeros(n, n);
    for p in parts {
        let (pc, ph) = p?;
        c += &pc;
        h += &ph;
    }
    Ok(WindowIntegrals { c, h })
}

fn integrate_window_adaptive(
    kernel: &PhaseKernel,
    bath: &BathSpec,
    delta: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<(WindowIntegrals, f64)> {
    let n = kernel.n_b;
    let f = |tau: f64| -> Vec<f64> {
        let g = bath.scalar_correlation(tau).unwrap_or(ZERO);
        let q = kernel.q(tau, delta - tau);
        let mut out = Vec::with_capacity(4 * n * n);
        for i in 0..n {
            for j in 0..n {
                let a = g * q[(i, j)];
                let b = g.conj() * q[(j, i)].conj();
                let (s, d) = (a + b, a - b);
                out.extend_from_slice(&[s.re, s.im, d.re, d.im]);
            }
        }
        out
    };
    let r = adaptive_gk(f, breaks, tol, 0.0, 100_000)?;
    let mut c = ComplexMatrix::zeros(n, n);
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let o = 4 * (i * n + j);
            c[(i, j)] = C64::new(r.value[o], r.value[o + 1]);
            h[(i, j)] = C64::new(r.value[o + 2], r.value[o + 3]);
        }
    }
    let scale = r.value.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    Ok((WindowIntegrals { c, h }, r.error / scale))
}

fn rel_diff(a: &WindowIntegrals, b: &WindowIntegrals) -> f64 {
    let scale = a.c.max_abs().max(a.h.max_abs());
    if scale == 0.0 {
        return 0.0;
    }
    (&a.c - &b.c).max_abs().max((&a.h - &b.h).max_abs()) / scale
}

/// Coefficients on the window [t0, t0 + Δ] in the basis labeling, without
/// the positivity gate.
pub fn window_coefficients(
    model: &SystemModel,
    basis: &OperatorBasis,
    bath: &BathSpec,
    t0: f64,
    delta: f64,
    lambda: f64,
    quad: &QuadratureSpec,
) -> Result<CGCoefficients> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!("coarse-graining time must be positive, got {delta}")));
    }
    if bath.n_couplings() != model.couplings().len() {
        return Err(Error::DimensionMismatch(format!(
            "bath cross structure is {}x{} but the model has {} couplings",
            bath.n_couplings(),
            bath.n_couplings(),
            model.couplings().len()
        )));
    }
    if basis.dimension() != model.dimension() {
        return Err(Error::DimensionMismatch("basis and model dimensions differ".into()));
    }
    quad.validate()?;
    let table = HeisenbergTable::new(model, basis);
    let kernel = PhaseKernel::new(&table, table.coefficients(), bath.cross_structure(), t0);
    let l2 = lambda * lambda;

    let (ints, err) = if let Some(gamma0) = bath.delta_strength() {
        // G = γ₀ δ(τ): the τ integral collapses onto τ = 0, half weight per side.
        let q = kernel.q(0.0, delta);
        let c = q.hermitian_part().scale_real(gamma0);
        let n = c.rows();
        (WindowIntegrals { c, h: ComplexMatrix::zeros(n, n) }, 0.0)
    } else {
        match quad.scheme {
            QuadratureScheme::GaussLegendreTensor => {
                let mut prev = integrate_window_fixed(&kernel, bath, delta, &tau_breaks(model, bath, delta, quad, 0))?;
                let mut level = 1;
                loop {
                    let next =
                        integrate_window_fixed(&kernel, bath, delta, &tau_breaks(model, bath, delta, quad, level))?;
                    let diff = rel_diff(&next, &prev);
                    if diff <= quad.target_rel_tol {
                        break (next, diff);
                    }
                    if level >= 6 {
                        return Err(Error::QuadratureFailure(format!(
                            "tensor Gauss-Legendre did not reach {:.1e} (last change {diff:.3e})",
                            quad.target_rel_tol
                        )));
                    }
                    prev = next;
                    level += 1;
                }
            }
            QuadratureScheme::Adaptive => {
                let br = tau_breaks(model, bath, delta, quad, 0);
                integrate_window_adaptive(&kernel, bath, delta, &br, quad.target_rel_tol * 0.1)?
            }
        }
    };

    let c_matrix = ints.c.scale_real(l2 / delta).hermitian_part();
    let h_matrix = ints.h.scale(-I * (l2 / (2.0 * delta))).hermitian_part();
    Ok(CGCoefficients {
        delta,
        lambda,
        h_matrix,
        c_matrix,
        operators: basis.elements().to_vec(),
        labels: basis.labels().to_vec(),
        labeling: Labeling::Basis,
        frequencies: None,
        error_estimate: err,
        positivity_warning: None,
    })
}

/// Time-domain coefficients H^Δ_{B1B2} and C^Δ_{B1B2} on [0, Δ] with
/// positivity gate.
pub fn compute_cg_coefficients(
    model: &SystemModel,
    basis: &OperatorBasis,
    bath: &BathSpec,
    delta: f64,
    lambda: f64,
    quad: &QuadratureSpec,
) -> Result<CGCoefficients> {
    let mut coeffs = window_coefficients(model, basis, bath, 0.0, delta, lambda, quad)?;
    let report = kossakowski_check(&coeffs);
    if !report.passed {
        return Err(Error::PositivityViolation { min: report.min, max: report.max });
    }
    if report.min < 0.0 {
        coeffs.positivity_warning = Some(report.min);
    }
    Ok(coeffs)
}

/// Frequency-domain evaluation through Bohr-frequency eigenoperators:
/// K_jk = (λ²/Δ) S (1/2π) ∫ γ(ν) W(ν−ω_j) W*(ν−ω_k) dν with
/// W(x) = ∫_0^Δ e^{−ixs} ds. The Hamiltonian part uses the τ form with the
/// s-window integrated in closed form. Returns the eigenoperator labeling.
pub fn compute_cg_filter_route(
    model: &SystemModel,
    bath: &BathSpec,
    delta: f64,
    lambda: f64,
) -> Result<CGCoefficients> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput("coarse-graining time must be positive".into()));
    }
    if let BathKind::VacuumWightman { .. } = bath.kind {
        return Err(Error::UnsupportedKind("filter route needs a spectral density with bounded support".into()));
    }
    if bath.n_couplings() != model.couplings().len() {
        return Err(Error::DimensionMismatch("bath cross structure vs couplings".into()));
    }
    let set = eigenoperator_decompose(model);
    let n = set.sectors.len();
    let omegas: Vec<f64> = set.sectors.iter().map(|s| s.frequency).collect();
    let cross = bath.cross_structure();
    let s_of = |j: usize, k: usize| cross[(set.sectors[j].coupling, set.sectors[k].coupling)];
    let l2 = lambda * lambda;

    let f = filter_integrals(bath, &omegas, delta)?;
    let k_matrix = ComplexMatrix::from_fn(n, n, |j, k| s_of(j, k) * f[(j, k)] * (l2 / delta));

    let h_matrix = if bath.is_delta() {
        ComplexMatrix::zeros(n, n)
    } else {
        let hk = filter_hamiltonian(model, bath, &omegas, delta)?;
        ComplexMatrix::from_fn(n, n, |j, k| s_of(j, k) * hk[(j, k)] * (-I * (l2 / (2.0 * delta))))
    };

    Ok(CGCoefficients {
        delta,
        lambda,
        h_matrix: h_matrix.hermitian_part(),
        c_matrix: k_matrix.hermitian_part(),
        operators: set.sectors.iter().map(|s| s.operator.clone()).collect(),
        labels: set.sectors.iter().map(|s| format!("{}({:+.6})", model.labels()[s.coupling], s.frequency)).collect(),
        labeling: Labeling::Eigen,
        frequencies: Some(omegas),
        error_estimate: 0.0,
        positivity_warning: None,
    })
}

fn window(x: f64, delta: f64) -> C64 {
    // W(x) = ∫_0^Δ e^{−ixs} ds
    phase_window(-x, delta)
}

/// F_jk = (1/2π) ∫ γ(ν) W(ν−ω_j) W*(ν−ω_k) dν (λ- and S-free).
fn filter_integrals(bath: &BathSpec, omegas: &[f64], delta: f64) -> Result<ComplexMatrix> {
    let n = omegas.len();
    match &bath.kind {
        BathKind::DeltaCorrelated { gamma0 } => {
            Ok(ComplexMatrix::from_fn(n, n, |j, k| phase_window(omegas[j] - omegas[k], delta) * *gamma0))
        }
        BathKind::DiscreteModes { modes, .. } => Ok(ComplexMatrix::from_fn(n, n, |j, k| {
            let mut acc = ZERO;
            for m in modes {
                let g2 = m.coupling * m.coupling;
                let (wj, wk) = (omegas[j], omegas[k]);
                acc += g2
                    * (m.occupation + 1.0)
                    * window(m.frequency - wj, delta)
                    * window(m.frequency - wk, delta).conj();
                acc += g2 * m.occupation * window(-m.frequency - wj, delta) * window(-m.frequency - wk, delta).conj();
            }
            acc
        })),
        _ => {
            let coarse = filter_frequency_integral(bath, omegas, delta, 0)?;
            let fine = filter_frequency_integral(bath, omegas, delta, 1)?;
            let scale = fine.max_abs().max(f64::MIN_POSITIVE);
            let diff = (&fine - &coarse).max_abs() / scale;
            if diff > 1e-9 {
                return Err(Error::QuadratureFailure(format!(
                    "filter-route frequency integral unresolved (change {diff:.3e})"
                )));
            }
            Ok(fine)
        }
    }
}

fn filter_frequency_integral(bath: &BathSpec, omegas: &[f64], delta: f64, level: u32) -> Result<ComplexMatrix> {
    let (lo, hi) = bath.spectral_support();
    let feature = bath.spectral_feature_scale();
    let h = (2.0 * PI / delta).min(0.5 * feature) / 2f64.powi(level as i32);
    let mut breaks = vec![lo, hi];
    let mut anchors = vec![0.0];
    anchors.extend_from_slice(omegas);
    for &a in &anchors {
        if a > lo && a < hi {
            breaks.push(a);
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut fine = Vec::new();
    for p in breaks.windows(2) {
        let m = ((p[1] - p[0]) / h).ceil().max(1.0) as usize;
        let seg = uniform_breaks(p[0], p[1], m);
        if fine.is_empty() {
            fine.extend(seg);
        } else {
            fine.extend(seg.into_iter().skip(1));
        }
    }
    let (xs, ws) = composite_nodes(&fine, gl16());
    let n = omegas.len();
    let chunk = 4096;
    let partials: Vec<Vec<C64>> = xs
        .par_chunks(chunk)
        .zip(ws.par_chunks(chunk))
        .map(|(xc, wc)| {
            let mut acc = vec![ZERO; n * n];
            let mut wv = vec![ZERO; n];
            for (&nu, &w) in xc.iter().zip(wc) {
                let g = bath.scalar_spectral_density(nu) * w;
                if g == 0.0 {
                    continue;
                }
                for (j, o) in omegas.iter().enumerate() {
                    wv[j] = window(nu - o, delta);
                }
                for j in 0..n {
                    let a = wv[j] * g;
                    for k in 0..n {
                        acc[j * n + k] += a * wv[k].conj();
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![ZERO; n * n];
    for p in partials {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |j, k| total[j * n + k] / (2.0 * PI)))
}

/// ∫_0^Δ dτ [g(τ) e^{iω_jτ} − g(−τ) e^{−iω_kτ}] ∫_0^{Δ−τ} e^{i(ω_j−ω_k)s} ds.
fn filter_hamiltonian(model: &SystemModel, bath: &BathSpec, omegas: &[f64], delta: f64) -> Result<ComplexMatrix> {
    let n = omegas.len();
    let quad = QuadratureSpec::default();
    let eval = |level: u32| -> Result<ComplexMatrix> {
        let br = tau_breaks(model, bath, delta, &quad, level);
        let (xs, ws) = composite_nodes(&br, gl16());
        let mut acc = ComplexMatrix::zeros(n, n);
        for (&tau, &w) in xs.iter().zip(&ws) {
            let gp = bath.scalar_correlation(tau)?;
            let gm = bath.scalar_correlation(-tau)?;
            for j in 0..n {
                for k in 0..n {
                    let e = phase_window(omegas[j] - omegas[k], delta - tau);
                    let v = gp * C64::from_polar(1.0, omegas[j] * tau) - gm * C64::from_polar(1.0, -omegas[k] * tau);
                    acc[(j, k)] += v * e * w;
                }
            }
        }
        Ok(acc)
    };
    let mut prev = eval(0)?;
    for level in 1..=6 {
        let next = eval(level)?;
        let scale = next.max_abs().max(f64::MIN_POSITIVE);
        if (&next - &prev).max_abs() / scale < 1e-10 {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureFailure("filter-route Hamiltonian integral unresolved".into()))
}

/// Secular GKLS data: same-frequency pairs get λ² S γ(ω) (dissipative) and
/// λ² S Im Γ(ω) (Lamb shift); cross-frequency pairs vanish.
pub fn secular_limit_coefficients(model: &SystemModel, bath: &BathSpec, lambda: f64) -> Result<CGCoefficients> {
    let set = eigenoperator_decompose(model);
    let n = set.sectors.len();
    let cross = bath.cross_structure();
    let l2 = lambda * lambda;
    let mut c = ComplexMatrix::zeros(n, n);
    let mut h = ComplexMatrix::zeros(n, n);
    let mut cache: Vec<(f64, f64, f64)> = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let (sj, sk) = (&set.sectors[j], &set.sectors[k]);
            if sj.frequency != sk.frequency {
                continue;
            }
            let w = sj.frequency;
            let (gamma, lamb) = match cache.iter().find(|e| e.0 == w) {
                Some(e) => (e.1, e.2),
                None => {
                    let g = bath.scalar_spectral_density(w);
                    let l = bath.scalar_half_range(w)?.im;
                    cache.push((w, g, l));
                    (g, l)
                }
            };
            let s = cross[(sj.coupling, sk.coupling)];
            c[(j, k)] = s * (l2 * gamma);
            h[(j, k)] = s * (l2 * lamb);
        }
    }
    Ok(CGCoefficients {
        delta: f64::INFINITY,
        lambda,
        h_matrix: h.hermitian_part(),
        c_matrix: c.hermitian_part(),
        operators: set.sectors.iter().map(|s| s.operator.clone()).collect(),
        labels: set.sectors.iter().map(|s| format!("{}({:+.6})", model.labels()[s.coupling], s.frequency)).collect(),
        labeling: Labeling::Eigen,
        frequencies: Some(set.sectors.iter().map(|s| s.frequency).collect()),
        error_estimate: 0.0,
        positivity_warning: None,
    })
}

/// Spectrum audit of the Kossakowski matrix.
#[derive(Clone, Debug)]
pub struct KossakowskiReport {
    pub eigenvalues: Vec<f64>,
    pub min: f64,
    pub max: f64,
    pub hermiticity_residual: f64,
    pub passed: bool,
}

pub fn kossakowski_check(coeffs: &CGCoefficients) -> KossakowskiReport {
    kossakowski_check_matrix(&coeffs.c_matrix)
}

pub fn kossakowski_check_matrix(c: &ComplexMatrix) -> KossakowskiReport {
    let herm = c.hermiticity_residual();
    let eigenvalues = hermitian_eigenvalues(&c.hermitian_part()).unwrap_or_else(|_| vec![f64::NAN]);
    let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let passed = min.is_finite() && min >= -POSITIVITY_TOL * max.max(0.0);
    KossakowskiReport { eigenvalues, min, max, hermiticity_residual: herm, passed }
}

/// GKLS generator on column-stacked density matrices.
#[derive(Clone, Debug)]
pub struct LiouvillianSuperop {
    pub dimension: usize,
    pub matrix: ComplexMatrix,
}

impl LiouvillianSuperop {
    /// Largest |Σ_i L[(i,i), :]|: the trace functional must annihilate L.
    pub fn trace_residual(&self) -> f64 {
        let d = self.dimension;
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let mut acc = ZERO;
            for i in 0..d {
                acc += self.matrix[(i * d + i, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}

/// Superoperator of ρ ↦ −i[H, ρ].
pub fn commutator_superop(h: &ComplexMatrix) -> ComplexMatrix {
    let d = h.rows();
    let id = ComplexMatrix::identity(d);
    (&kron_compose(&id, h) - &kron_compose(&h.transpose(), &id)).scale(-I)
}

/// Superoperator of the bath-induced part D₁ (shift Hamiltonian plus
/// dissipator), without the free Hamiltonian.
pub fn dissipator_superop(coeffs: &CGCoefficients) -> ComplexMatrix {
    let d = coeffs.dimension();
    let n = coeffs.operators.len();
    let id = ComplexMatrix::identity(d);
    let mut out = commutator_superop(&coeffs.hamiltonian_shift());
    // Σ_jk C_jk X_j† X_k, and Σ_j conj(X_j) ⊗ (Σ_k C_jk X_k)
    let mut anti = ComplexMatrix::zeros(d, d);
    for j in 0..n {
        let mut y = ComplexMatrix::zeros(d, d);
        let mut any = false;
        for k in 0..n {
            let c = coeffs.c_matrix[(j, k)];
            if c != ZERO {
                y += &coeffs.operators[k].scale(c);
                any = true;
            }
        }
        if !any {
            continue;
        }
        let xj = &coeffs.operators[j];
        out += &kron_compose(&xj.conj(), &y);
        anti += &xj.adjoint().matmul(&y);
    }
    out -= &kron_compose(&id, &anti).scale_real(0.5);
    out -= &kron_compose(&anti.transpose(), &id).scale_real(0.5);
    out
}

/// L[ρ] = −i[H₀ + H^Δ_12, ρ] + Σ C_jk (X_k ρ X_j† − ½{X_j† X_k, ρ}).
pub fn assemble_lindbladian(model: &SystemModel, coeffs: &CGCoefficients) -> Result<LiouvillianSuperop> {
    if coeffs.dimension() != model.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "coefficients act on dimension {}, model has {}",
            coeffs.dimension(),
            model.dimension()
        )));
    }
    let mut m = commutator_superop(model.hamiltonian());
    m += &dissipator_superop(coeffs);
    Ok(LiouvillianSuperop { dimension: model.dimension(), matrix: m })
}

/// Generator from an explicit Hamiltonian and coefficients, for tests and
/// interaction-picture use.
pub fn assemble_generator(hamiltonian: &ComplexMatrix, coeffs: &CGCoefficients) -> LiouvillianSuperop {
    let mut m = commutator_superop(hamiltonian);
    m += &dissipator_superop(coeffs);
    LiouvillianSuperop { dimension: hamiltonian.rows(), matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::Mode;
    use crate::system::{default_basis, driven_qubit, qutrit_model, static_qubit};

    fn ohmic(n: usize, t: f64) -> BathSpec {
        BathSpec::diagonal(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: t }, n).unwrap()
    }

    #[test]
    fn delta_bath_static_qubit_closed_form() {
        let m = static_qubit();
        let b = default_basis(&m);
        let bath = BathSpec::diagonal(BathKind::DeltaCorrelated { gamma0: 0.5 }, 1).unwrap();
        let c = compute_cg_coefficients(&m, &b, &bath, 2.0, 0.1, &QuadratureSpec::default()).unwrap();
        // σ_x/√2 carries u = √2, so C_xx = 2 λ² γ₀ on the normalized basis
        assert!((c.c_matrix[(1, 1)].re - 2.0 * 0.01 * 0.5).abs() < 1e-14);
        assert!(c.h_matrix.max_abs() == 0.0);
    }

    #[test]
    fn time_and_filter_routes_agree() {
        for (m, bath) in [
            (driven_qubit(1.0), ohmic(1, 1.0)),
            (qutrit_model(), ohmic(2, 0.0)),
            (
                driven_qubit(1.0),
                BathSpec::diagonal(
                    BathKind::DiscreteModes {
                        modes: vec![Mode { frequency: 0.8, coupling: 0.2, occupation: 0.5 }],
                        broadening: 1e-3,
                    },
                    1,
                )
                .unwrap(),
            ),
        ] {
            let b = default_basis(&m);
            for delta in [0.5, 5.0] {
                let t = compute_cg_coefficients(&m, &b, &bath, delta, 0.1, &QuadratureSpec::default()).unwrap();
                let f = compute_cg_filter_route(&m, &bath, delta, 0.1).unwrap().to_basis(&b);
                let sc = t.c_matrix.max_abs();
                assert!((&t.c_matrix - &f.c_matrix).max_abs() / sc < 1e-8, "C at {delta}");
                assert!((&t.h_matrix - &f.h_matrix).max_abs() / sc < 1e-8, "H at {delta}");
            }
        }
    }

    #[test]
    fn adaptive_matches_tensor() {
        let m = qutrit_model();
        let b = default_basis(&m);
        let bath = ohmic(2, 1.0);
        let t = compute_cg_coefficients(&m, &b, &bath, 3.0, 0.1, &QuadratureSpec::default()).unwrap();
        let q = QuadratureSpec { scheme: QuadratureScheme::Adaptive, ..Default::default() };
        let a = compute_cg_coefficients(&m, &b, &bath, 3.0, 0.1, &q).unwrap();
        assert!((&t.c_matrix - &a.c_matrix).max_abs() / t.c_matrix.max_abs() < 1e-8);
    }

    #[test]
    fn lindbladian_preserves_trace_and_hermiticity() {
        let m = qutrit_model();
        let b = default_basis(&m);
        let c = compute_cg_coefficients(&m, &b, &ohmic(2, 1.0), 1.0, 0.3, &QuadratureSpec::default()).unwrap();
        let l = assemble_lindbladian(&m, &c).unwrap();
        assert!(l.trace_residual() < 1e-13);
        let rho = crate::linalg::random::random_density_matrix(&mut rand::thread_rng(), 3);
        let out = crate::linalg::unvectorize(&l.matrix.mul_vec(&crate::linalg::vectorize(&rho)), 3).unwrap();
        assert!(out.hermiticity_residual() < 1e-13);
    }

    #[test]
    fn shifted_window_is_covariant() {
        let m = qutrit_model();
        let b = default_basis(&m);
        let bath = ohmic(2, 1.0);
        let q = QuadratureSpec::default();
        let g0 = window_coefficients(&m, &b, &bath, 0.0, 2.0, 0.2, &q).unwrap();
        let g1 = window_coefficients(&m, &b, &bath, 0.7, 2.0, 0.2, &q).unwrap();
        let u = m.free_propagator(0.7);
        let h0 = u.matmul(&g0.hamiltonian_shift()).matmul(&u.adjoint());
        assert!((&h0 - &g1.hamiltonian_shift()).max_abs() < 1e-9);
        let d0 = dissipator_superop(&g0);
        let d1 = dissipator_superop(&g1);
        let uu = kron_compose(&u.conj(), &u);
        let rot = uu.matmul(&d0).matmul(&uu.adjoint());
        assert!((&rot - &d1).max_abs() < 1e-9);
    }

    #[test]
    fn secular_limit_diagonal_in_frequency() {
        let m = driven_qubit(1.0);
        let s = secular_limit_coefficients(&m, &ohmic(1, 0.0), 0.1).unwrap();
        let w = s.frequencies.as_ref().unwrap();
        for j in 0..w.len() {
            for k in 0..w.len() {
                if w[j] != w[k] {
                    assert_eq!(s.c_matrix[(j, k)], ZERO);
                }
            }
        }
        assert!(kossakowski_check(&s).passed);
    }
}
