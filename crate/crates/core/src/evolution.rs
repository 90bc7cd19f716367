//! Propagation under GKLS generators, the discrete RG trajectory, the naive
//! one-step increment and CPTP / semigroup audits.

use crate::bath::BathSpec;
use crate::cg::{dissipator_superop, window_coefficients, CGCoefficients, LiouvillianSuperop, QuadratureSpec};
use crate::error::{Error, Result};
use crate::linalg::{
    choi_of_superoperator, choi_output_trace, expm_pade, hermitian_eigenvalues, kron_compose, unvectorize, vectorize,
    ComplexMatrix, C64, ONE, ZERO,
};
use crate::quadrature::{composite_nodes, gl16, graded_breaks, uniform_breaks};
use crate::system::{OperatorBasis, SystemModel};

pub const TRACE_AUDIT_TOL: f64 = 1e-8;
pub const NEGATIVITY_FAIL: f64 = -1e-6;
pub const NEGATIVITY_WARN: f64 = -1e-8;

/// A validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("density matrix must be square".into()));
        }
        let r = matrix.hermiticity_residual();
        if r > 1e-10 {
            return Err(Error::NonHermitianInput { residual: r, tolerance: 1e-10 });
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-10 {
            return Err(Error::InvalidInput(format!("density matrix trace is {tr}")));
        }
        let min = hermitian_eigenvalues(&matrix.hermitian_part())?.into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-8 {
            return Err(Error::InvalidInput(format!("density matrix has eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidInput("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|c| c / n).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.matrix.rows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateAudit {
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
}

pub fn audit_state(rho: &ComplexMatrix) -> StateAudit {
    let trace_error = (rho.trace() - ONE).norm();
    let min_eigenvalue = hermitian_eigenvalues(&rho.hermitian_part())
        .map(|e| e.into_iter().fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NAN);
    let purity = rho.matmul(rho).trace().re;
    StateAudit { trace_error, min_eigenvalue, purity }
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub times: Vec<f64>,
    pub states: Vec<ComplexMatrix>,
    pub audits: Vec<StateAudit>,
    /// Most negative eigenvalue seen when it lies in the tolerated band.
    pub positivity_warning: Option<f64>,
}

impl EvolutionResult {
    fn from_states(times: Vec<f64>, states: Vec<ComplexMatrix>, negativity_floor: f64) -> Result<Self> {
        let audits: Vec<StateAudit> = states.iter().map(audit_state).collect();
        let mut warning = None;
        for (t, a) in times.iter().zip(&audits) {
            if a.trace_error > TRACE_AUDIT_TOL {
                return Err(Error::AuditFailure(format!("trace error {:.3e} at t = {t}", a.trace_error)));
            }
            if !(a.min_eigenvalue >= negativity_floor) {
                return Err(Error::AuditFailure(format!(
                    "eigenvalue {:.3e} at t = {t} is below {negativity_floor:.1e}",
                    a.min_eigenvalue
                )));
            }
            if a.min_eigenvalue < NEGATIVITY_WARN {
                warning = Some(warning.map_or(a.min_eigenvalue, |w: f64| w.min(a.min_eigenvalue)));
            }
        }
        Ok(Self { times, states, audits, positivity_warning: warning })
    }

    pub fn max_trace_error(&self) -> f64 {
        self.audits.iter().fold(0.0, |m, a| m.max(a.trace_error))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.audits.iter().fold(f64::INFINITY, |m, a| m.min(a.min_eigenvalue))
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first().is_some_and(|&t| t < 0.0) || times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidInput("times must be ascending and non-negative".into()));
    }
    Ok(())
}

/// e^{L t}.
pub fn superop_exponential(l: &LiouvillianSuperop, t: f64) -> Result<ComplexMatrix> {
    expm_pade(&l.matrix.scale_real(t))
}

fn uniform_step(times: &[f64]) -> Option<f64> {
    if times.len() < 3 || times[0] != 0.0 {
        return None;
    }
    let h = times[1];
    let ok = times.iter().enumerate().all(|(k, &t)| (t - k as f64 * h).abs() <= 1e-12 * t.abs().max(1.0));
    ok.then_some(h)
}

/// ρ(t_k) = unvec(e^{L t_k} vec ρ₀).
pub fn propagate(l: &LiouvillianSuperop, rho0: &DensityMatrix, times: &[f64]) -> Result<EvolutionResult> {
    check_times(times)?;
    if rho0.dimension() != l.dimension {
        return Err(Error::DimensionMismatch("state and generator dimensions differ".into()));
    }
    let d = l.dimension;
    let v0 = vectorize(rho0.matrix());
    let mut states = Vec::with_capacity(times.len());
    if let Some(h) = uniform_step(times) {
        let step = superop_exponential(l, h)?;
        let mut v = v0;
        for k in 0..times.len() {
            if k > 0 {
                v = step.mul_vec(&v);
            }
            states.push(unvectorize(&v, d)?);
        }
    } else {
        for &t in times {
            if t == 0.0 {
                states.push(rho0.matrix().clone());
            } else {
                states.push(unvectorize(&superop_exponential(l, t)?.mul_vec(&v0), d)?);
            }
        }
    }
    EvolutionResult::from_states(times.to_vec(), states, NEGATIVITY_FAIL)
}

/// Classical RK4 with `substeps` steps between consecutive sample times.
pub fn propagate_rk4(
    l: &LiouvillianSuperop,
    rho0: &DensityMatrix,
    times: &[f64],
    substeps: usize,
) -> Result<EvolutionResult> {
    check_times(times)?;
    let d = l.dimension;
    let f = |v: &[C64]| l.matrix.mul_vec(v);
    let mut v = vectorize(rho0.matrix());
    let mut t = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &target in times {
        let n = substeps.max(1);
        let h = (target - t) / n as f64;
        if h > 0.0 {
            for _ in 0..n {
                let k1 = f(&v);
                let k2 = f(&axpy(&v, &k1, 0.5 * h));
                let k3 = f(&axpy(&v, &k2, 0.5 * h));
                let k4 = f(&axpy(&v, &k3, h));
                for i in 0..v.len() {
                    v[i] += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0);
                }
            }
        }
        t = target;
        states.push(unvectorize(&v, d)?);
    }
    EvolutionResult::from_states(times.to_vec(), states, NEGATIVITY_FAIL)
}

fn axpy(x: &[C64], y: &[C64], a: f64) -> Vec<C64> {
    x.iter().zip(y).map(|(p, q)| p + q * a).collect()
}

/// Superoperator of ρ ↦ U ρ U†.
pub fn conjugation_superop(u: &ComplexMatrix) -> ComplexMatrix {
    kron_compose(&u.conj(), u)
}

/// Interaction- and Schrödinger-picture states of the discrete RG recursion.
#[derive(Clone, Debug)]
pub struct RgTrajectory {
    pub interaction: EvolutionResult,
    pub schrodinger: EvolutionResult,
}

/// ρ̃_n = ρ̃_{n−1} + Δ · 𝒰_{n−1} D₁ 𝒰_{n−1}⁻¹ [ρ̃_{n−1}], where 𝒰_n conjugates
/// by e^{iH₀ nΔ} and D₁ is the λ²-weighted interaction generator of the
/// first window.
pub fn discrete_rg_trajectory(
    model: &SystemModel,
    coeffs: &CGCoefficients,
    rho0: &DensityMatrix,
    n_steps: usize,
) -> Result<RgTrajectory> {
    if n_steps == 0 {
        return Err(Error::InvalidInput("n_steps must be at least 1".into()));
    }
    let d = model.dimension();
    if rho0.dimension() != d || coeffs.dimension() != d {
        return Err(Error::DimensionMismatch("state, model and coefficients must agree".into()));
    }
    let delta = coeffs.delta;
    let g = dissipator_superop(coeffs);
    let floor = NEGATIVITY_FAIL.min(-10.0 * (delta * g.frobenius_norm()).powi(2));
    let mut rho = rho0.matrix().clone();
    let mut times = vec![0.0];
    let mut inter = vec![rho.clone()];
    let mut schro = vec![rho.clone()];
    for n in 1..=n_steps {
        let u = model.free_propagator((n - 1) as f64 * delta);
        let back = u.adjoint();
        let inner = back.matmul(&rho).matmul(&u);
        let kicked = unvectorize(&g.mul_vec(&vectorize(&inner)), d)?;
        rho = &rho + &u.matmul(&kicked).matmul(&back).scale_real(delta);
        let t = n as f64 * delta;
        let w = model.free_propagator(t);
        times.push(t);
        schro.push(w.adjoint().matmul(&rho).matmul(&w));
        inter.push(rho.clone());
    }
    Ok(RgTrajectory {
        interaction: EvolutionResult::from_states(times.clone(), inter, floor)?,
        schrodinger: EvolutionResult::from_states(times, schro, floor)?,
    })
}

/// M_k = I + kΔ 𝒢^{(kΔ)}, the one-window interaction-picture map over [0, kΔ].
pub fn rg_map(
    model: &SystemModel,
    basis: &OperatorBasis,
    bath: &BathSpec,
    lambda: f64,
    window: f64,
    quad: &QuadratureSpec,
) -> Result<ComplexMatrix> {
    let c = window_coefficients(model, basis, bath, 0.0, window, lambda, quad)?;
    let g = dissipator_superop(&c);
    let d2 = g.rows();
    Ok(&ComplexMatrix::identity(d2) + &g.scale_real(window))
}

#[derive(Clone, Copy, Debug)]
pub struct CompositionDefect {
    /// ‖R_{k2−k1} M_{k1} − M_{k2}‖_F
    pub absolute: f64,
    /// absolute / ‖M_{k2} − I‖_F
    pub relative: f64,
}

/// Composition defect of the renormalization maps with
/// R_{k2−k1} = I + M_{k2} − M_{k1}.
#[allow(clippy::too_many_arguments)]
pub fn composition_defect(
    model: &SystemModel,
    basis: &OperatorBasis,
    bath: &BathSpec,
    lambda: f64,
    delta: f64,
    k1: usize,
    k2: usize,
    quad: &QuadratureSpec,
) -> Result<CompositionDefect> {
    if !(k2 > k1 && k1 >= 1) {
        return Err(Error::InvalidInput("need 1 <= k1 < k2".into()));
    }
    let m1 = rg_map(model, basis, bath, lambda, k1 as f64 * delta, quad)?;
    let m2 = rg_map(model, basis, bath, lambda, k2 as f64 * delta, quad)?;
    let id = ComplexMatrix::identity(m1.rows());
    let r = &(&id + &m2) - &m1;
    let absolute = (&r.matmul(&m1) - &m2).frobenius_norm();
    let scale = (&m2 - &id).frobenius_norm();
    Ok(CompositionDefect { absolute, relative: if scale > 0.0 { absolute / scale } else { 0.0 } })
}

/// Second-order Dyson increment over [t0, t0+dt] evaluated directly on
/// operators:
///   ρ̃ − ρ₀ = −λ² ∫∫_{t2<t1} Σ G_{A1A2}(t1−t2)(σ₁σ₂ρ₀ − σ₂ρ₀σ₁) + h.c.
/// with σ₁ = σ_{A1}(t1), σ₂ = σ_{A2}(t2) in the interaction picture.
pub fn naive_increment(
    model: &SystemModel,
    bath: &BathSpec,
    rho0: &DensityMatrix,
    t0: f64,
    dt: f64,
    lambda: f64,
    quad: &QuadratureSpec,
) -> Result<DensityMatrix> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("dt must be positive".into()));
    }
    if bath.n_couplings() != model.couplings().len() {
        return Err(Error::DimensionMismatch("bath cross structure vs couplings".into()));
    }
    let rho = rho0.matrix();
    let s_mat = bath.cross_structure().clone();
    let n_a = model.couplings().len();
    let sigma = |t: f64| -> Vec<ComplexMatrix> { model.couplings().iter().map(|c| model.heisenberg(c, t)).collect() };
    // Σ_{A1A2} w (σ₁σ₂ρ − σ₂ρσ₁), the h.c. is added at the end
    let term = |w: &ComplexMatrix, s1: &[ComplexMatrix], s2: &[ComplexMatrix]| -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(rho.rows(), rho.rows());
        for a2 in 0..n_a {
            let mut y = ComplexMatrix::zeros(rho.rows(), rho.rows());
            for a1 in 0..n_a {
                if w[(a1, a2)] != ZERO {
                    y += &s1[a1].scale(w[(a1, a2)]);
                }
            }
            let s2r = s2[a2].matmul(rho);
            acc += &y.matmul(&s2r);
            acc -= &s2r.matmul(&y);
        }
        acc
    };

    let inc = if let Some(gamma0) = bath.delta_strength() {
        // collapse onto t1 = t2 with half weight
        let w = s_mat.scale_real(0.5 * gamma0);
        let eval = |level: u32| -> ComplexMatrix {
            let panels = ((quad.points_per_axis / 16).max(1) << level) as usize;
            let (xs, ws) = composite_nodes(&uniform_breaks(0.0, dt, panels), gl16());
            let mut acc = ComplexMatrix::zeros(rho.rows(), rho.rows());
            for (&s, &wt) in xs.iter().zip(&ws) {
                let sg = sigma(t0 + s);
                acc += &term(&w, &sg, &sg).scale_real(wt);
            }
            acc
        };
        doubled(eval, quad.target_rel_tol)?
    } else {
        let osc = 2.0 * model.max_bohr_frequency() + bath.oscillation_scale();
        let eval = |level: u32| -> Result<ComplexMatrix> {
            let refine = 2f64.powi(level as i32);
            let mut hmax = if osc > 0.0 { std::f64::consts::PI / osc } else { dt };
            hmax = hmax.min(dt / (quad.points_per_axis as f64 / 16.0).ceil().max(1.0)) / refine;
            let tb = match bath.peak_width() {
                Some(pw) if pw / 4.0 < hmax => graded_breaks(dt, pw / (4.0 * refine), hmax),
                _ => uniform_breaks(0.0, dt, (dt / hmax).ceil() as usize),
            };
            let (taus, tws) = composite_nodes(&tb, gl16());
            let mut acc = ComplexMatrix::zeros(rho.rows(), rho.rows());
            for (&tau, &tw) in taus.iter().zip(&tws) {
                let len = dt - tau;
                if len <= 0.0 {
                    continue;
                }
                let w = s_mat.scale(bath.scalar_correlation(tau)? * tw);
                let panels = (len / hmax).ceil().max(1.0) as usize;
                let (ss, sw) = composite_nodes(&uniform_breaks(0.0, len, panels), gl16());
                for (&s, &swt) in ss.iter().zip(&sw) {
                    let s1 = sigma(t0 + s + tau);
                    let s2 = sigma(t0 + s);
                    acc += &term(&w, &s1, &s2).scale_real(swt);
                }
            }
            Ok(acc)
        };
        let mut prev = eval(0)?;
        let mut level = 1;
        loop {
            let next = eval(level)?;
            let scale = next.max_abs().max(f64::MIN_POSITIVE);
            if (&next - &prev).max_abs() / scale <= quad.target_rel_tol {
                break next;
            }
            if level >= 4 {
                return Err(Error::QuadratureFailure("naive increment did not converge".into()));
            }
            prev = next;
            level += 1;
        }
    };
    let total = (&inc + &inc.adjoint()).scale_real(-lambda * lambda);
    let out = rho + &total;
    Ok(DensityMatrix { matrix: out })
}

fn doubled(eval: impl Fn(u32) -> ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let mut prev = eval(0);
    for level in 1..=6 {
        let next = eval(level);
        let scale = next.max_abs().max(f64::MIN_POSITIVE);
        if (&next - &prev).max_abs() / scale <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureFailure("refinement did not converge".into()))
}

/// ρ₀ + Δ·D₁[ρ₀] from coarse-grained coefficients (interaction picture).
pub fn cg_one_step(coeffs: &CGCoefficients, rho0: &DensityMatrix) -> Result<ComplexMatrix> {
    let g = dissipator_superop(coeffs);
    let d = rho0.dimension();
    let kick = unvectorize(&g.mul_vec(&vectorize(rho0.matrix())), d)?;
    Ok(rho0.matrix() + &kick.scale_real(coeffs.delta))
}

#[derive(Clone, Copy, Debug)]
pub struct CptpEntry {
    pub time: f64,
    pub min_choi_eigenvalue: f64,
    pub choi_trace: f64,
    pub trace_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct CptpReport {
    pub entries: Vec<CptpEntry>,
    pub passed: bool,
}

pub fn cptp_audit(l: &LiouvillianSuperop, times: &[f64]) -> Result<CptpReport> {
    let d = l.dimension;
    let mut entries = Vec::with_capacity(times.len());
    for &t in times {
        if t < 0.0 {
            return Err(Error::InvalidInput("audit times must be non-negative".into()));
        }
        let e = superop_exponential(l, t)?;
        let choi = choi_of_superoperator(&e)?;
        let eig = hermitian_eigenvalues(&choi.hermitian_part())?;
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let tr = choi.trace().re;
        let residual = (&choi_output_trace(&choi, d)? - &ComplexMatrix::identity(d)).max_abs();
        let passed = min >= -1e-8 * (tr / d as f64) && residual < 1e-10;
        entries.push(CptpEntry { time: t, min_choi_eigenvalue: min, choi_trace: tr, trace_residual: residual, passed });
    }
    let passed = entries.iter().all(|e| e.passed);
    Ok(CptpReport { entries, passed })
}

#[derive(Clone, Copy, Debug)]
pub struct SemigroupReport {
    pub defect: f64,
    pub passed: bool,
}

pub fn semigroup_audit(l: &LiouvillianSuperop, t1: f64, t2: f64) -> Result<SemigroupReport> {
    if t1 < 0.0 || t2 < 0.0 {
        return Err(Error::InvalidInput("semigroup times must be non-negative".into()));
    }
    let whole = superop_exponential(l, t1 + t2)?;
    let parts = superop_exponential(l, t2)?.matmul(&superop_exponential(l, t1)?);
    let scale = whole.frobenius_norm();
    let defect = if scale > 0.0 { (&whole - &parts).frobenius_norm() / scale } else { 0.0 };
    Ok(SemigroupReport { defect, passed: defect < 1e-9 })
}

/// −i[H, ·] as a generator with no dissipation.
pub fn unitary_generator(h: &ComplexMatrix) -> LiouvillianSuperop {
    LiouvillianSuperop { dimension: h.rows(), matrix: crate::cg::commutator_superop(h) }
}

/// Schrödinger picture to interaction picture at time t: e^{iHt} ρ e^{−iHt}.
pub fn to_interaction(model: &SystemModel, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let u = model.free_propagator(t);
    u.matmul(rho).matmul(&u.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cg::{assemble_generator, Labeling};
    use crate::linalg::random::random_density_matrix;
    use crate::linalg::I;
    use crate::system::pauli;
    use rand::SeedableRng;

    fn dephasing(c: f64) -> LiouvillianSuperop {
        let [_, _, z] = pauli();
        let coeffs = CGCoefficients {
            delta: 1.0,
            lambda: 1.0,
            h_matrix: ComplexMatrix::zeros(1, 1),
            c_matrix: ComplexMatrix::from_real(&[&[c]]),
            operators: vec![z],
            labels: vec!["z".into()],
            labeling: Labeling::Basis,
            frequencies: None,
            error_estimate: 0.0,
            positivity_warning: None,
        };
        assemble_generator(&ComplexMatrix::zeros(2, 2), &coeffs)
    }

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn dephasing_closed_form() {
        let l = dephasing(0.3);
        let times: Vec<f64> = (0..11).map(|k| 0.5 * k as f64).collect();
        let r = propagate(&l, &plus(), &times).unwrap();
        for (t, s) in times.iter().zip(&r.states) {
            assert!((s[(0, 1)].re - 0.5 * (-0.6 * t).exp()).abs() < 1e-12);
            assert!((s[(0, 0)].re - 0.5).abs() < 1e-13);
        }
        assert_eq!(r.states[0], *plus().matrix());
    }

    #[test]
    fn bloch_rotation() {
        let [_, _, z] = pauli();
        let l = unitary_generator(&z.scale_real(0.5 * 1.3));
        let times = [0.0, 0.4, 1.7, 3.0];
        let r = propagate(&l, &plus(), &times).unwrap();
        for (t, s) in times.iter().zip(&r.states) {
            // ρ01 = ½ e^{−iωt} for H = (ω/2)σz
            let want = C64::from_polar(0.5, -1.3 * t);
            assert!((s[(0, 1)] - want).norm() < 1e-12);
            assert!((r.audits[0].purity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_agrees_with_exponential() {
        let l = dephasing(0.2);
        let times = [0.0, 1.0, 2.5];
        let a = propagate(&l, &plus(), &times).unwrap();
        let b = propagate_rk4(&l, &plus(), &times, 200).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x - y).max_abs() < 1e-10);
        }
    }

    #[test]
    fn audits_on_dephasing() {
        let l = dephasing(0.2);
        assert!(cptp_audit(&l, &[0.0, 0.1, 10.0]).unwrap().passed);
        let s = semigroup_audit(&l, 1.0, 1.0).unwrap();
        assert!(s.passed);
        assert_eq!(semigroup_audit(&l, 0.0, 2.0).unwrap().defect < 1e-15, true);
    }

    #[test]
    fn injected_negative_rate_breaks_complete_positivity() {
        let l = dephasing(-0.1);
        let r = cptp_audit(&l, &[0.01, 0.02]).unwrap();
        assert!(!r.passed);
        let (a, b) = (r.entries[0].min_choi_eigenvalue, r.entries[1].min_choi_eigenvalue);
        assert!(a < 0.0 && (b / a - 2.0).abs() < 0.05);
    }

    #[test]
    fn density_matrix_validation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let r = random_density_matrix(&mut rng, 3);
        assert!(DensityMatrix::new(r.clone()).is_ok());
        assert!(DensityMatrix::new(r.scale_real(2.0)).is_err());
        let bad = &r + &ComplexMatrix::from_fn(3, 3, |i, j| if i == 0 && j == 1 { I } else { ZERO });
        assert!(DensityMatrix::new(bad).is_err());
    }

    #[test]
    fn naive_increment_matches_one_cg_step() {
        use crate::bath::BathKind;
        use crate::cg::compute_cg_coefficients;
        use crate::system::{default_basis, qutrit_model};
        let m = qutrit_model();
        let b = default_basis(&m);
        let q = QuadratureSpec::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for kind in [
            BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: 1.0 },
            BathKind::DeltaCorrelated { gamma0: 0.5 },
        ] {
            let bath = BathSpec::diagonal(kind, 2).unwrap();
            let c = compute_cg_coefficients(&m, &b, &bath, 1.0, 0.2, &q).unwrap();
            let rho = DensityMatrix::new(random_density_matrix(&mut rng, 3)).unwrap();
            let naive = naive_increment(&m, &bath, &rho, 0.0, 1.0, 0.2, &q).unwrap();
            let cg = cg_one_step(&c, &rho).unwrap();
            let change = (&cg - rho.matrix()).max_abs();
            assert!((naive.matrix() - &cg).max_abs() < 1e-8 * change.max(1e-300) + 1e-14);
            let traj = discrete_rg_trajectory(&m, &c, &rho, 1).unwrap();
            assert!((&traj.interaction.states[1] - &cg).max_abs() < 1e-15);
        }
    }

    #[test]
    fn composition_defect_scales_as_lambda_squared_relative() {
        use crate::bath::BathKind;
        use crate::system::{default_basis, driven_qubit};
        let m = driven_qubit(1.0);
        let b = default_basis(&m);
        let bath = BathSpec::diagonal(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: 1.0 }, 1).unwrap();
        let q = QuadratureSpec::default();
        let a = composition_defect(&m, &b, &bath, 0.2, 1.0, 2, 5, &q).unwrap();
        let h = composition_defect(&m, &b, &bath, 0.1, 1.0, 2, 5, &q).unwrap();
        let ratio = a.relative / h.relative;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}
