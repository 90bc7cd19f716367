//! Exact unitary dynamics of the system coupled to a truncated set of bosonic
//! modes, reduced by partial trace. Ground truth for weak-coupling checks.

use std::f64::consts::PI;

use crate::bath::{BathKind, BathSpec, Mode};
use crate::cg::{assemble_lindbladian, CGCoefficients};
use crate::error::{Error, Result};
use crate::evolution::{propagate, DensityMatrix, EvolutionResult, StateAudit};
use crate::linalg::{
    hermitian_eigendecompose, hermitian_eigenvalues, kron_compose, trace_distance, ComplexMatrix, C64, ONE, ZERO,
};
use crate::system::SystemModel;

pub const DEFAULT_DIMENSION_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleMode {
    pub frequency: f64,
    pub coupling: f64,
    pub fock_cutoff: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BathState {
    Vacuum,
    Thermal(f64),
}

#[derive(Clone, Debug)]
pub struct CompositeModel {
    pub system: SystemModel,
    pub modes: Vec<OracleMode>,
    pub lambda: f64,
    pub bath_state: BathState,
    pub dimension_cap: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleConfig {
    pub horizon: f64,
    pub sample_count: usize,
    pub recurrence_guard: bool,
}

impl CompositeModel {
    pub fn new(system: SystemModel, modes: Vec<OracleMode>, lambda: f64, bath_state: BathState) -> Self {
        Self { system, modes, lambda, bath_state, dimension_cap: DEFAULT_DIMENSION_CAP }
    }

    /// `count` modes spread uniformly over [lo, hi] with a common coupling.
    pub fn uniform_comb(
        system: SystemModel,
        count: usize,
        lo: f64,
        hi: f64,
        coupling: f64,
        fock_cutoff: usize,
        lambda: f64,
    ) -> Self {
        let modes = (0..count)
            .map(|k| {
                let frequency = if count == 1 { lo } else { lo + (hi - lo) * k as f64 / (count - 1) as f64 };
                OracleMode { frequency, coupling, fock_cutoff }
            })
            .collect();
        Self::new(system, modes, lambda, BathState::Vacuum)
    }

    pub fn bath_dimension(&self) -> usize {
        self.modes.iter().map(|m| m.fock_cutoff + 1).product()
    }

    pub fn dimension(&self) -> usize {
        self.system.dimension() * self.bath_dimension()
    }

    fn check_cap(&self) -> Result<()> {
        // guard the product against overflow before comparing
        let mut dim = self.system.dimension() as u128;
        for m in &self.modes {
            dim = dim.saturating_mul(m.fock_cutoff as u128 + 1);
        }
        if dim > self.dimension_cap as u128 {
            return Err(Error::DimensionCapExceeded {
                dimension: dim.min(usize::MAX as u128) as usize,
                cap: self.dimension_cap,
            });
        }
        Ok(())
    }

    pub fn with_cutoff_shift(&self, extra: usize) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            m.fock_cutoff += extra;
        }
        out
    }

    pub fn occupation(&self, frequency: f64) -> f64 {
        match self.bath_state {
            BathState::Vacuum => 0.0,
            BathState::Thermal(t) if t <= 0.0 => 0.0,
            BathState::Thermal(t) => 1.0 / (frequency / t).exp_m1(),
        }
    }

    /// 2π / smallest mode spacing; infinite for fewer than two modes.
    pub fn recurrence_guard(&self) -> f64 {
        let mut f: Vec<f64> = self.modes.iter().map(|m| m.frequency).collect();
        f.sort_by(f64::total_cmp);
        let spacing = f.windows(2).map(|w| w[1] - w[0]).filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
        2.0 * PI / spacing
    }

    /// Discrete-mode bath with the same modes and occupations, every coupling
    /// operator seeing the one shared field.
    pub fn matching_bath(&self, broadening: f64) -> Result<BathSpec> {
        let modes = self
            .modes
            .iter()
            .map(|m| Mode { frequency: m.frequency, coupling: m.coupling, occupation: self.occupation(m.frequency) })
            .collect();
        BathSpec::shared(BathKind::DiscreteModes { modes, broadening }, self.system.couplings().len())
    }
}

fn ladder(n_max: usize) -> ComplexMatrix {
    // a|n⟩ = √n |n−1⟩
    ComplexMatrix::from_fn(
        n_max + 1,
        n_max + 1,
        |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { ZERO },
    )
}

fn mode_operator(cm: &CompositeModel, k: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for (j, m) in cm.modes.iter().enumerate() {
        let f = if j == k { op.clone() } else { ComplexMatrix::identity(m.fock_cutoff + 1) };
        out = kron_compose(&out, &f);
    }
    out
}

/// Field Φ = Σ_k g_k (a_k + a_k†) on the bath factor.
pub fn bath_field(cm: &CompositeModel) -> ComplexMatrix {
    let db = cm.bath_dimension();
    let mut phi = ComplexMatrix::zeros(db, db);
    for (k, m) in cm.modes.iter().enumerate() {
        let a = ladder(m.fock_cutoff);
        let x = &a + &a.adjoint();
        phi += &mode_operator(cm, k, &x).scale_real(m.coupling);
    }
    phi
}

/// Σ_k ν_k a_k† a_k.
pub fn bath_hamiltonian(cm: &CompositeModel) -> ComplexMatrix {
    let db = cm.bath_dimension();
    let mut h = ComplexMatrix::zeros(db, db);
    for (k, m) in cm.modes.iter().enumerate() {
        let a = ladder(m.fock_cutoff);
        h += &mode_operator(cm, k, &a.adjoint().matmul(&a)).scale_real(m.frequency);
    }
    h
}

/// Gibbs state of the free truncated modes (vacuum projector at T = 0).
pub fn bath_state(cm: &CompositeModel) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for m in &cm.modes {
        let n = m.fock_cutoff + 1;
        let w: Vec<f64> = match cm.bath_state {
            BathState::Thermal(t) if t > 0.0 => (0..n).map(|j| (-(j as f64) * m.frequency / t).exp()).collect(),
            _ => (0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect(),
        };
        let z: f64 = w.iter().sum();
        let rho = ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::new(w[i] / z, 0.0) } else { ZERO });
        out = kron_compose(&out, &rho);
    }
    out
}

/// Dense H_total = H_S⊗I + I⊗H_B + λ Σ_A σ_A ⊗ Φ, and the bath state.
pub fn build_composite(cm: &CompositeModel) -> Result<(ComplexMatrix, ComplexMatrix)> {
    cm.check_cap()?;
    let db = cm.bath_dimension();
    let ds = cm.system.dimension();
    let mut h = kron_compose(cm.system.hamiltonian(), &ComplexMatrix::identity(db));
    h += &kron_compose(&ComplexMatrix::identity(ds), &bath_hamiltonian(cm));
    let coupling = coupling_sum(cm);
    h += &kron_compose(&coupling, &bath_field(cm)).scale_real(cm.lambda);
    Ok((h, bath_state(cm)))
}

fn coupling_sum(cm: &CompositeModel) -> ComplexMatrix {
    let ds = cm.system.dimension();
    cm.system.couplings().iter().fold(ComplexMatrix::zeros(ds, ds), |acc, c| &acc + c)
}

/// Matrix-free H_total acting on system ⊗ mode₁ ⊗ … ⊗ mode_K vectors.
struct CompositeOperator {
    ds: usize,
    db: usize,
    hs: ComplexMatrix,
    coupling: ComplexMatrix,
    bath_diag: Vec<f64>,
    /// (from, to, amplitude) for λ Φ in the bath factor
    field: Vec<(usize, usize, f64)>,
    norm_bound: f64,
}

impl CompositeOperator {
    fn new(cm: &CompositeModel) -> Result<Self> {
        cm.check_cap()?;
        let ds = cm.system.dimension();
        let db = cm.bath_dimension();
        let dims: Vec<usize> = cm.modes.iter().map(|m| m.fock_cutoff + 1).collect();
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let mut bath_diag = vec![0.0; db];
        let mut field = Vec::new();
        for (idx, e) in bath_diag.iter_mut().enumerate() {
            for (k, m) in cm.modes.iter().enumerate() {
                let n = (idx / strides[k]) % dims[k];
                *e += m.frequency * n as f64;
                if n + 1 < dims[k] {
                    // a† raises n → n+1 with √(n+1), a lowers the reverse
                    let amp = cm.lambda * m.coupling * ((n + 1) as f64).sqrt();
                    field.push((idx, idx + strides[k], amp));
                    field.push((idx + strides[k], idx, amp));
                }
            }
        }
        let coupling = coupling_sum(cm);
        let hs_norm = hermitian_eigenvalues(cm.system.hamiltonian())?.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let c_norm = hermitian_eigenvalues(&coupling)?.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let bath_max = bath_diag.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        let field_bound: f64 =
            cm.modes.iter().map(|m| 2.0 * (cm.lambda * m.coupling).abs() * (m.fock_cutoff as f64).sqrt()).sum();
        Ok(Self {
            ds,
            db,
            hs: cm.system.hamiltonian().clone(),
            coupling,
            bath_diag,
            field,
            norm_bound: hs_norm + bath_max + c_norm * field_bound,
        })
    }

    fn apply(&self, v: &[C64], out: &mut [C64]) {
        let (ds, db) = (self.ds, self.db);
        for o in out.iter_mut() {
            *o = ZERO;
        }
        for s in 0..ds {
            for t in 0..ds {
                let h = self.hs[(s, t)];
                let c = self.coupling[(s, t)];
                let (src, dst) = (t * db, s * db);
                if h != ZERO {
                    for b in 0..db {
                        out[dst + b] += h * v[src + b];
                    }
                }
                if c != ZERO {
                    for &(from, to, amp) in &self.field {
                        out[dst + to] += c * (v[src + from] * amp);
                    }
                }
            }
            for b in 0..db {
                out[s * db + b] += v[s * db + b] * self.bath_diag[b];
            }
        }
    }

    /// ψ ← e^{−iHδ} ψ by Taylor series, |δ|·‖H‖ ≤ 1.
    fn step(&self, psi: &mut [C64], delta: f64, scratch: &mut [C64], term: &mut Vec<C64>) {
        term.clear();
        term.extend_from_slice(psi);
        let base: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for k in 1..60 {
            self.apply(term, scratch);
            let f = C64::new(0.0, -delta / k as f64);
            let mut norm = 0.0;
            for (t, s) in term.iter_mut().zip(scratch.iter()) {
                *t = s * f;
                norm += t.norm_sqr();
            }
            for (p, t) in psi.iter_mut().zip(term.iter()) {
                *p += t;
            }
            if norm.sqrt() <= 1e-17 * base {
                break;
            }
        }
    }

    fn evolve(&self, psi: &mut [C64], duration: f64, scratch: &mut [C64], term: &mut Vec<C64>) {
        if duration <= 0.0 {
            return;
        }
        let n = (duration * self.norm_bound).ceil().max(1.0) as usize;
        let h = duration / n as f64;
        for _ in 0..n {
            self.step(psi, h, scratch, term);
        }
    }
}

fn reduce(psi: &[C64], ds: usize, db: usize, weight: f64, into: &mut ComplexMatrix) {
    for i in 0..ds {
        for j in 0..ds {
            let mut acc = ZERO;
            for b in 0..db {
                acc += psi[i * db + b] * psi[j * db + b].conj();
            }
            into[(i, j)] += acc * weight;
        }
    }
}

pub fn sample_times(cfg: &OracleConfig) -> Vec<f64> {
    let n = cfg.sample_count.max(2);
    (0..n).map(|k| cfg.horizon * k as f64 / (n - 1) as f64).collect()
}

/// Exact reduced trajectory Tr_B[e^{−iHt}(ρ₀⊗ρ_B)e^{iHt}] at the sample times.
pub fn exact_reduced_trajectory(
    cm: &CompositeModel,
    rho0: &DensityMatrix,
    cfg: &OracleConfig,
) -> Result<EvolutionResult> {
    cm.check_cap()?;
    if cfg.recurrence_guard {
        let guard = cm.recurrence_guard();
        if cfg.horizon >= guard {
            return Err(Error::RecurrenceHorizonExceeded { horizon: cfg.horizon, guard });
        }
    }
    let ds = cm.system.dimension();
    if rho0.dimension() != ds {
        return Err(Error::DimensionMismatch("initial state vs system".into()));
    }
    let op = CompositeOperator::new(cm)?;
    let db = op.db;
    let times = sample_times(cfg);
    let sys = hermitian_eigendecompose(rho0.matrix())?;
    // bath Gibbs states are diagonal in the Fock product basis
    let rho_b = bath_state(cm);
    let mut components = Vec::new();
    for (p, col) in sys.eigenvalues.iter().zip(0..ds) {
        if *p <= 1e-15 {
            continue;
        }
        for b in 0..db {
            let q = rho_b[(b, b)].re;
            if q <= 1e-15 {
                continue;
            }
            let mut psi = vec![ZERO; ds * db];
            for s in 0..ds {
                psi[s * db + b] = sys.eigenvectors[(s, col)];
            }
            components.push((p * q, psi));
        }
    }
    let mut states = vec![ComplexMatrix::zeros(ds, ds); times.len()];
    let mut scratch = vec![ZERO; ds * db];
    let mut term = Vec::with_capacity(ds * db);
    for (w, mut psi) in components {
        let mut t = 0.0;
        for (k, &target) in times.iter().enumerate() {
            op.evolve(&mut psi, target - t, &mut scratch, &mut term);
            t = target;
            reduce(&psi, ds, db, w, &mut states[k]);
        }
    }
    let audits: Vec<StateAudit> = states.iter().map(crate::evolution::audit_state).collect();
    for (t, a) in times.iter().zip(&audits) {
        if a.trace_error > 1e-10 || a.min_eigenvalue < -1e-10 {
            return Err(Error::AuditFailure(format!(
                "exact reduced state at t = {t}: trace error {:.2e}, min eigenvalue {:.2e}",
                a.trace_error, a.min_eigenvalue
            )));
        }
    }
    Ok(EvolutionResult { times, states, audits, positivity_warning: None })
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub horizon: f64,
    pub recurrence_guard: f64,
    pub beyond_guard: bool,
}

/// Trace distance between exact reduced dynamics and the CG master equation.
pub fn oracle_compare(
    cm: &CompositeModel,
    coeffs: &CGCoefficients,
    rho0: &DensityMatrix,
    cfg: &OracleConfig,
) -> Result<OracleReport> {
    let exact = exact_reduced_trajectory(cm, rho0, cfg)?;
    let l = assemble_lindbladian(&cm.system, coeffs)?;
    let cg = propagate(&l, rho0, &exact.times)?;
    let distances =
        exact.states.iter().zip(&cg.states).map(|(a, b)| trace_distance(a, b)).collect::<Result<Vec<f64>>>()?;
    let max_distance = distances.iter().cloned().fold(0.0, f64::max);
    let guard = cm.recurrence_guard();
    Ok(OracleReport {
        times: exact.times,
        distances,
        max_distance,
        horizon: cfg.horizon,
        recurrence_guard: guard,
        beyond_guard: cfg.horizon >= guard,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct FockAuditReport {
    pub max_shift: f64,
    pub passed: bool,
}

/// Re-run with every cutoff raised by one; the reduced trajectory must not
/// move by more than 1e-6 in trace distance.
pub fn fock_audit(cm: &CompositeModel, rho0: &DensityMatrix, cfg: &OracleConfig) -> Result<FockAuditReport> {
    let a = exact_reduced_trajectory(cm, rho0, cfg)?;
    let b = exact_reduced_trajectory(&cm.with_cutoff_shift(1), rho0, cfg)?;
    let mut max_shift = 0.0f64;
    for (x, y) in a.states.iter().zip(&b.states) {
        max_shift = max_shift.max(trace_distance(x, y)?);
    }
    Ok(FockAuditReport { max_shift, passed: max_shift < 1e-6 })
}

#[derive(Clone, Copy, Debug)]
pub struct OnePointReport {
    pub max_abs: f64,
    pub passed: bool,
}

/// ⟨Φ(t)⟩ for an arbitrary bath state under free bath evolution.
pub fn one_point_for_state(cm: &CompositeModel, rho_b: &ComplexMatrix, times: &[f64]) -> Result<OnePointReport> {
    let phi = bath_field(cm);
    let hb = bath_hamiltonian(cm);
    let mut max_abs = 0.0f64;
    for &t in times {
        // H_B is diagonal, so e^{iH_B t} Φ e^{−iH_B t} is a phase pattern
        let rotated = ComplexMatrix::from_fn(phi.rows(), phi.cols(), |i, j| {
            phi[(i, j)] * C64::from_polar(1.0, (hb[(i, i)].re - hb[(j, j)].re) * t)
        });
        max_abs = max_abs.max(rotated.matmul(rho_b).trace().norm());
    }
    Ok(OnePointReport { max_abs, passed: max_abs < 1e-12 })
}

pub fn one_point_check(cm: &CompositeModel, times: &[f64]) -> Result<OnePointReport> {
    cm.check_cap()?;
    one_point_for_state(cm, &bath_state(cm), times)
}

/// Product of truncated coherent states with amplitudes `alphas`.
pub fn coherent_bath_state(cm: &CompositeModel, alphas: &[C64]) -> Result<ComplexMatrix> {
    if alphas.len() != cm.modes.len() {
        return Err(Error::DimensionMismatch("one amplitude per mode".into()));
    }
    let mut psi = vec![ONE];
    for (m, &alpha) in cm.modes.iter().zip(alphas) {
        let n = m.fock_cutoff + 1;
        let mut amp = Vec::with_capacity(n);
        let mut c = ONE;
        for j in 0..n {
            if j > 0 {
                c = c * alpha / (j as f64).sqrt();
            }
            amp.push(c);
        }
        let norm: f64 = amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut next = Vec::with_capacity(psi.len() * n);
        for p in &psi {
            for a in &amp {
                next.push(p * a / norm);
            }
        }
        psi = next;
    }
    Ok(ComplexMatrix::outer(&psi, &psi))
}

/// Tr(Φ(τ)Φ(0)ρ_B) in the truncated space.
pub fn oracle_correlation(cm: &CompositeModel, tau: f64) -> Result<C64> {
    cm.check_cap()?;
    let phi = bath_field(cm);
    let hb = bath_hamiltonian(cm);
    let rho = bath_state(cm);
    let rotated = ComplexMatrix::from_fn(phi.rows(), phi.cols(), |i, j| {
        phi[(i, j)] * C64::from_polar(1.0, (hb[(i, i)].re - hb[(j, j)].re) * tau)
    });
    Ok(rotated.matmul(&phi).matmul(&rho).trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_exponential;
    use crate::linalg::partial_trace;
    use crate::system::driven_qubit;

    fn excited() -> DensityMatrix {
        DensityMatrix::pure(&[ONE, ZERO]).unwrap()
    }

    #[test]
    fn decoupled_spectrum() {
        let cm = CompositeModel::new(
            driven_qubit(1.0),
            vec![OracleMode { frequency: 0.7, coupling: 0.3, fock_cutoff: 1 }],
            0.0,
            BathState::Vacuum,
        );
        let (h, rho_b) = build_composite(&cm).unwrap();
        let mut e = hermitian_eigenvalues(&h).unwrap();
        e.sort_by(f64::total_cmp);
        let want = [-0.5, 0.2, 0.5, 1.2];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(rho_b[(0, 0)], ONE);
    }

    #[test]
    fn zero_temperature_thermal_is_vacuum() {
        let mut cm = CompositeModel::uniform_comb(driven_qubit(1.0), 2, 0.5, 1.5, 0.2, 2, 0.1);
        let vac = bath_state(&cm);
        cm.bath_state = BathState::Thermal(1e-4);
        assert!((&bath_state(&cm) - &vac).max_abs() < 1e-12);
    }

    #[test]
    fn taylor_matches_dense_exponential() {
        let mut cm = CompositeModel::uniform_comb(driven_qubit(1.0), 2, 0.5, 1.5, 0.4, 2, 0.3);
        cm.bath_state = BathState::Thermal(0.8);
        let rho0 = excited();
        let cfg = OracleConfig { horizon: 3.0, sample_count: 4, recurrence_guard: false };
        let traj = exact_reduced_trajectory(&cm, &rho0, &cfg).unwrap();
        let (h, rho_b) = build_composite(&cm).unwrap();
        let total = kron_compose(rho0.matrix(), &rho_b);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let u = matrix_exponential(&h, C64::new(0.0, -t)).unwrap();
            let evolved = u.matmul(&total).matmul(&u.adjoint());
            let red = partial_trace(&evolved, &[2, cm.bath_dimension()], 0).unwrap();
            assert!((&red - s).max_abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_matches_bath_model() {
        let mut cm = CompositeModel::uniform_comb(driven_qubit(1.0), 2, 0.6, 1.1, 0.3, 2, 0.1);
        let bath = cm.matching_bath(1e-3).unwrap();
        for tau in [0.0, 0.7, 3.1] {
            let a = oracle_correlation(&cm, tau).unwrap();
            let b = bath.scalar_correlation(tau).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1e-300));
        }
        cm.bath_state = BathState::Thermal(0.05);
        let cm = cm.with_cutoff_shift(8);
        let bath = cm.matching_bath(1e-3).unwrap();
        for tau in [0.0, 1.3] {
            let a = oracle_correlation(&cm, tau).unwrap();
            let b = bath.scalar_correlation(tau).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm());
        }
    }

    #[test]
    fn one_point_function() {
        let cm = CompositeModel::uniform_comb(driven_qubit(1.0), 2, 0.5, 1.5, 0.2, 6, 0.1);
        assert!(one_point_check(&cm, &[0.0, 1.0, 5.0]).unwrap().passed);
        let alpha = C64::new(0.1, 0.0);
        let rho = coherent_bath_state(&cm, &[alpha, ZERO]).unwrap();
        let r = one_point_for_state(&cm, &rho, &[0.0]).unwrap();
        assert!(!r.passed);
        // ⟨g(a + a†)⟩ = 2 g Re α up to truncation
        assert!((r.max_abs - 2.0 * 0.2 * 0.1).abs() < 1e-8);
    }

    #[test]
    fn dimension_cap_and_recurrence_guard() {
        let cm = CompositeModel::uniform_comb(driven_qubit(1.0), 12, 0.5, 1.5, 0.2, 2, 0.1);
        assert!(matches!(build_composite(&cm), Err(Error::DimensionCapExceeded { .. })));
        let cm = CompositeModel::uniform_comb(driven_qubit(1.0), 3, 0.5, 1.5, 0.2, 1, 0.1);
        let cfg = OracleConfig { horizon: 20.0, sample_count: 3, recurrence_guard: true };
        assert!(matches!(
            exact_reduced_trajectory(&cm, &excited(), &cfg),
            Err(Error::RecurrenceHorizonExceeded { .. })
        ));
    }

    #[test]
    fn zero_coupling_is_free_evolution() {
        let cm = CompositeModel::uniform_comb(driven_qubit(1.0), 2, 0.5, 1.5, 0.2, 1, 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho0 = DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
        let cfg = OracleConfig { horizon: 5.0, sample_count: 6, recurrence_guard: true };
        let traj = exact_reduced_trajectory(&cm, &rho0, &cfg).unwrap();
        for (t, st) in traj.times.iter().zip(&traj.states) {
            let u = cm.system.free_propagator(*t).adjoint();
            let want = u.matmul(rho0.matrix()).matmul(&u.adjoint());
            assert!((&want - st).max_abs() < 1e-12);
        }
    }
}
