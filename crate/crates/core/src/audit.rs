//! Invariant suite over the standard grid of models, baths and coarse-graining
//! times, organized as numbered criteria.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bath::{kms_residual, validate_bath, BathKind, BathSpec, Mode, Trajectory, DEFAULT_WIGHTMAN_EPSILON};
use crate::cg::{
    assemble_lindbladian, compute_cg_filter_route, dissipator_superop, kossakowski_check, secular_limit_coefficients,
    window_coefficients, CGCoefficients, KossakowskiReport, LiouvillianSuperop, QuadratureSpec,
};
use crate::error::Result;
use crate::evolution::{
    cg_one_step, composition_defect, conjugation_superop, cptp_audit, naive_increment, propagate, semigroup_audit,
    DensityMatrix,
};
use crate::linalg::random::random_density_matrix;
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, RealMatrix, C64, ONE, ZERO};
use crate::oracle::{fock_audit, oracle_compare, CompositeModel, OracleConfig};
use crate::system::{
    basis_propagator, default_basis, driven_qubit, qutrit_model, static_qubit, OperatorBasis, SystemModel,
};
use crate::vdp::{limit_cycle_amplitude, vdp_error_report, VdpConfig};

pub const GRID_DELTAS: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 20.0, 100.0];
pub const GRID_LAMBDA: f64 = 0.1;
pub const OMEGA0: f64 = 1.0;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub summary: String,
    pub details: Vec<String>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.1} s of {} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.summary,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

pub fn standard_models() -> Vec<(&'static str, SystemModel)> {
    vec![("static qubit", static_qubit()), ("driven qubit", driven_qubit(OMEGA0)), ("qutrit", qutrit_model())]
}

fn cross_for(n: usize) -> ComplexMatrix {
    if n == 1 {
        ComplexMatrix::identity(1)
    } else {
        // correlated fields on the two qutrit couplings
        ComplexMatrix::from_fn(n, n, |i, j| if i == j { ONE } else { C64::new(0.4, 0.0) })
    }
}

pub fn five_mode_comb() -> Vec<Mode> {
    (0..5).map(|k| Mode { frequency: 0.5 + 0.25 * k as f64, coupling: 0.2, occupation: 0.0 }).collect()
}

pub fn standard_bath_kinds() -> Vec<(&'static str, BathKind)> {
    vec![
        ("delta", BathKind::DeltaCorrelated { gamma0: 0.5 }),
        ("ohmic T=0", BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: 0.0 }),
        ("ohmic T=1", BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: OMEGA0 }),
        ("discrete 5-mode", BathKind::DiscreteModes { modes: five_mode_comb(), broadening: 1e-3 }),
        (
            "wightman inertial",
            BathKind::VacuumWightman { trajectory: Trajectory::Inertial, epsilon: DEFAULT_WIGHTMAN_EPSILON },
        ),
    ]
}

pub struct GridPoint {
    pub model_name: &'static str,
    pub bath_name: &'static str,
    pub model: SystemModel,
    pub basis: OperatorBasis,
    pub bath: BathSpec,
    pub delta: f64,
    pub coeffs: Result<CGCoefficients>,
}

impl GridPoint {
    pub fn label(&self) -> String {
        format!("{} / {} / delta={}", self.model_name, self.bath_name, self.delta)
    }
}

pub struct StandardGrid {
    pub points: Vec<GridPoint>,
    pub elapsed: Duration,
}

impl StandardGrid {
    pub fn compute(quad: &QuadratureSpec) -> Self {
        let start = Instant::now();
        let mut jobs = Vec::new();
        for (mn, model) in standard_models() {
            for (bn, kind) in standard_bath_kinds() {
                let n = model.couplings().len();
                let bath = BathSpec::new(kind.clone(), cross_for(n)).expect("standard bath");
                for &delta in &GRID_DELTAS {
                    jobs.push((mn, bn, model.clone(), bath.clone(), delta));
                }
            }
        }
        let points = jobs
            .into_par_iter()
            .map(|(model_name, bath_name, model, bath, delta)| {
                let basis = default_basis(&model);
                let coeffs = window_coefficients(&model, &basis, &bath, 0.0, delta, GRID_LAMBDA, quad);
                GridPoint { model_name, bath_name, model, basis, bath, delta, coeffs }
            })
            .collect();
        Self { points, elapsed: start.elapsed() }
    }

    fn ok_points(&self) -> impl Iterator<Item = (&GridPoint, &CGCoefficients)> {
        self.points.iter().filter_map(|p| p.coeffs.as_ref().ok().map(|c| (p, c)))
    }

    fn errors(&self) -> Vec<String> {
        self.points.iter().filter_map(|p| p.coeffs.as_ref().err().map(|e| format!("{}: {e}", p.label()))).collect()
    }
}

fn finish(
    id: u8,
    title: &'static str,
    passed: bool,
    summary: String,
    details: Vec<String>,
    start: Instant,
    extra: Duration,
    budget_s: u64,
) -> CriterionResult {
    let elapsed = start.elapsed() + extra;
    let budget = Duration::from_secs(budget_s);
    let mut details = details;
    let in_time = elapsed <= budget;
    if !in_time {
        details.push(format!("runtime {:.1} s exceeds the {budget_s} s budget", elapsed.as_secs_f64()));
    }
    CriterionResult { id, title, passed: passed && in_time, summary, details, elapsed, budget }
}

/// 1: Kossakowski positivity over the grid.
pub fn criterion_positivity(grid: &StandardGrid) -> CriterionResult {
    let start = Instant::now();
    let mut details = grid.errors();
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for (p, c) in grid.ok_points() {
        let r: KossakowskiReport = kossakowski_check(c);
        count += 1;
        let ratio = if r.max > 0.0 { r.min / r.max } else { 0.0 };
        worst = worst.min(ratio);
        if !r.passed {
            details.push(format!("{}: min {:.3e}, max {:.3e}", p.label(), r.min, r.max));
        }
    }
    let passed = details.is_empty() && count == grid.points.len();
    let summary = format!("{count}/{} grid points, worst min/max eigenvalue ratio {worst:.2e}", grid.points.len());
    finish(1, "Kossakowski positivity", passed, summary, details, start, grid.elapsed, 60)
}

fn generators(grid: &StandardGrid) -> Vec<(&GridPoint, LiouvillianSuperop)> {
    grid.ok_points().filter_map(|(p, c)| assemble_lindbladian(&p.model, c).ok().map(|l| (p, l))).collect()
}

/// 2: complete positivity and trace preservation of e^{Lt}.
pub fn criterion_cptp(grid: &StandardGrid) -> CriterionResult {
    let start = Instant::now();
    let l2 = GRID_LAMBDA * GRID_LAMBDA;
    let times = [0.1 / l2, 1.0 / l2, 10.0 / l2];
    let gens = generators(grid);
    let reports: Vec<(String, Result<crate::evolution::CptpReport>)> =
        gens.par_iter().map(|(p, l)| (p.label(), cptp_audit(l, &times))).collect();
    let mut details = grid.errors();
    let (mut min_rel, mut max_res) = (f64::INFINITY, 0.0f64);
    for (label, r) in reports {
        match r {
            Ok(r) => {
                for e in &r.entries {
                    min_rel = min_rel.min(e.min_choi_eigenvalue / (e.choi_trace / 2.0f64.max(1.0)));
                    max_res = max_res.max(e.trace_residual);
                }
                if !r.passed {
                    details.push(format!("{label}: {:?}", r.entries.iter().find(|e| !e.passed)));
                }
            }
            Err(e) => details.push(format!("{label}: {e}")),
        }
    }
    let passed = details.is_empty() && gens.len() == grid.points.len();
    let summary = format!(
        "{} generators at t = {{0.1, 1, 10}}/lambda^2, min Choi eigenvalue {min_rel:.2e}, max trace residual {max_res:.2e}",
        gens.len()
    );
    finish(2, "CPTP of the coarse-grained map", passed, summary, details, start, Duration::ZERO, 30)
}

/// 3: semigroup law and the λ-scaling of the RG map composition defect.
pub fn criterion_semigroup(grid: &StandardGrid) -> CriterionResult {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (p, l) in generators(grid).iter().filter(|(p, _)| p.delta == 1.0 || p.delta == 20.0) {
        match semigroup_audit(l, 1.0, 2.5) {
            Ok(r) => {
                worst = worst.max(r.defect);
                if !r.passed {
                    details.push(format!("{}: defect {:.2e}", p.label(), r.defect));
                }
            }
            Err(e) => details.push(format!("{}: {e}", p.label())),
        }
    }
    let quad = QuadratureSpec::default();
    let mut ratios = Vec::new();
    for (name, model) in [("driven qubit", driven_qubit(OMEGA0)), ("qutrit", qutrit_model())] {
        let basis = default_basis(&model);
        let n = model.couplings().len();
        let bath = BathSpec::new(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: OMEGA0 }, cross_for(n))
            .expect("bath");
        let big = composition_defect(&model, &basis, &bath, 0.2, 1.0, 2, 5, &quad);
        let small = composition_defect(&model, &basis, &bath, 0.1, 1.0, 2, 5, &quad);
        match (big, small) {
            (Ok(a), Ok(b)) => {
                let r = a.relative / b.relative;
                ratios.push(r);
                if !(3.5..=4.5).contains(&r) {
                    details.push(format!("{name}: halving lambda changed the defect by {r:.3}"));
                }
            }
            (Err(e), _) | (_, Err(e)) => details.push(format!("{name}: {e}")),
        }
    }
    let passed = details.is_empty();
    let summary = format!(
        "max exp-composition defect {worst:.2e}; RG defect reduction under lambda halving {}",
        ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
    );
    finish(3, "semigroup composition", passed, summary, details, start, Duration::ZERO, 10)
}

fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let s = a.max_abs().max(b.max_abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).max_abs() / s
    }
}

/// 4: time-domain and filter routes agree; the white-noise closed form holds.
pub fn criterion_routes(grid: &StandardGrid) -> CriterionResult {
    let start = Instant::now();
    let applicable: Vec<(&GridPoint, &CGCoefficients)> =
        grid.ok_points().filter(|(p, _)| !matches!(p.bath.kind, BathKind::VacuumWightman { .. })).collect();
    let diffs: Vec<(String, Result<f64>)> = applicable
        .par_iter()
        .map(|(p, c)| {
            let r = compute_cg_filter_route(&p.model, &p.bath, p.delta, GRID_LAMBDA).map(|f| {
                let f = f.to_basis(&p.basis);
                let scale = c.c_matrix.max_abs().max(f.c_matrix.max_abs());
                let dc = rel_diff(&c.c_matrix, &f.c_matrix);
                let dh = if scale > 0.0 { (&c.h_matrix - &f.h_matrix).max_abs() / scale } else { 0.0 };
                dc.max(dh)
            });
            (p.label(), r)
        })
        .collect();
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    for (label, r) in &diffs {
        match r {
            Ok(d) => {
                worst = worst.max(*d);
                if *d > 1e-6 {
                    details.push(format!("{label}: relative difference {d:.2e}"));
                }
            }
            Err(e) => details.push(format!("{label}: {e}")),
        }
    }
    // σ_x coupling, H = 0: C_xx = λ² γ₀ on the Pauli operator σ_x
    let gamma0 = 0.5;
    let mut closed_worst = 0.0f64;
    for (p, c) in grid.ok_points().filter(|(p, _)| p.model_name == "static qubit" && p.bath.is_delta()) {
        let x = p.basis.labels().iter().position(|l| l == "X").expect("X label");
        let pauli_value = 0.5 * c.c_matrix[(x, x)].re;
        let want = GRID_LAMBDA * GRID_LAMBDA * gamma0;
        let others = c.c_matrix.max_abs().max(0.0);
        let err = (pauli_value - want).abs() / want;
        closed_worst = closed_worst.max(err);
        if err > 1e-8 || (others - 2.0 * want).abs() > 1e-8 * want || c.h_matrix.max_abs() != 0.0 {
            details.push(format!("{}: closed form off by {err:.2e}", p.label()));
        }
    }
    let passed = details.is_empty() && diffs.len() == 12 * GRID_DELTAS.len();
    let summary = format!(
        "{} route comparisons, worst relative difference {worst:.2e}; white-noise closed form error {closed_worst:.2e}",
        diffs.len()
    );
    finish(4, "route equivalence", passed, summary, details, start, Duration::ZERO, 30)
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

pub struct SecularScan {
    pub deltas: Vec<f64>,
    pub cross_max: Vec<f64>,
    /// (frequency, filter-route value, secular value) at the last Δ
    pub diagonal: Vec<(f64, f64, f64)>,
    pub slope: f64,
}

pub fn secular_scan(model: &SystemModel, bath: &BathSpec, lambda: f64, deltas: &[f64]) -> Result<SecularScan> {
    let sec = secular_limit_coefficients(model, bath, lambda)?;
    let mut cross_max = Vec::new();
    let mut diagonal = Vec::new();
    for (i, &delta) in deltas.iter().enumerate() {
        let f = compute_cg_filter_route(model, bath, delta, lambda)?;
        let w = f.frequencies.clone().unwrap_or_default();
        let mut cm = 0.0f64;
        for j in 0..w.len() {
            for k in 0..w.len() {
                if w[j] != w[k] {
                    cm = cm.max(f.c_matrix[(j, k)].norm());
                }
            }
        }
        cross_max.push(cm);
        if i + 1 == deltas.len() {
            diagonal = (0..w.len()).map(|j| (w[j], f.c_matrix[(j, j)].re, sec.c_matrix[(j, j)].re)).collect();
        }
    }
    let slope = log_slope(deltas, &cross_max);
    Ok(SecularScan { deltas: deltas.to_vec(), cross_max, diagonal, slope })
}

/// 5: approach to the secular generator as Δ grows.
pub fn criterion_secular() -> CriterionResult {
    let start = Instant::now();
    let model = driven_qubit(OMEGA0);
    let bath =
        BathSpec::diagonal(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: OMEGA0 }, 1).expect("bath");
    let mut details = Vec::new();
    let summary = match secular_scan(&model, &bath, GRID_LAMBDA, &[10.0, 30.0, 100.0, 300.0]) {
        Ok(s) => {
            if s.slope > -0.9 {
                details.push(format!("cross-sector slope {:.3}", s.slope));
            }
            let mut worst = 0.0f64;
            for &(w, got, want) in &s.diagonal {
                if w == 0.0 {
                    continue;
                }
                let err = (got - want).abs() / want.abs();
                worst = worst.max(err);
                if err > 0.01 {
                    details.push(format!("sector {w:+}: {got:.6e} vs {want:.6e}"));
                }
            }
            let bound = s.deltas.iter().zip(&s.cross_max).map(|(d, c)| d * c).fold(0.0, f64::max);
            format!(
                "cross-sector log-log slope {:.3}, max delta*cross {bound:.3e}, diagonal error at delta=300 {:.2e}",
                s.slope, worst
            )
        }
        Err(e) => {
            details.push(e.to_string());
            "scan failed".into()
        }
    };
    finish(5, "secular limit", details.is_empty(), summary, details, start, Duration::ZERO, 60)
}

pub struct OracleScan {
    pub lambdas: Vec<f64>,
    pub max_distance: Vec<f64>,
    pub fock_shift: Vec<f64>,
    pub correlation_time: Option<f64>,
    pub horizon: f64,
    pub guard: f64,
    pub delta: f64,
    pub window_ok: bool,
}

/// Default oracle comparison: driven qubit, 5 vacuum modes on [0.5, 1.5],
/// n_max = 2, horizon 0.8 of the recurrence guard.
pub fn oracle_scan(lambdas: &[f64]) -> Result<OracleScan> {
    let system = driven_qubit(OMEGA0);
    let probe = CompositeModel::uniform_comb(system.clone(), 5, 0.5, 1.5, 0.2, 2, lambdas[0]);
    let guard = probe.recurrence_guard();
    let horizon = 0.8 * guard;
    let bath = probe.matching_bath(1e-3)?;
    let grid: Vec<f64> = (0..=4000).map(|k| horizon * k as f64 / 4000.0).collect();
    let t_b = validate_bath(&bath, &grid).correlation_time;
    let upper = horizon / 10.0;
    let (delta, window_ok) = match t_b {
        Some(tb) if tb < upper => ((tb * upper).sqrt(), true),
        _ => (upper, false),
    };
    let cfg = OracleConfig { horizon, sample_count: 201, recurrence_guard: true };
    let rho0 = DensityMatrix::pure(&[ONE, ZERO])?;
    let basis = default_basis(&system);
    let quad = QuadratureSpec::default();
    let mut max_distance = Vec::new();
    let mut fock_shift = Vec::new();
    for &lambda in lambdas {
        let cm = CompositeModel::uniform_comb(system.clone(), 5, 0.5, 1.5, 0.2, 2, lambda);
        let coeffs = window_coefficients(&system, &basis, &bath, 0.0, delta, lambda, &quad)?;
        max_distance.push(oracle_compare(&cm, &coeffs, &rho0, &cfg)?.max_distance);
        fock_shift.push(fock_audit(&cm, &rho0, &cfg)?.max_shift);
    }
    Ok(OracleScan {
        lambdas: lambdas.to_vec(),
        max_distance,
        fock_shift,
        correlation_time: t_b,
        horizon,
        guard,
        delta,
        window_ok,
    })
}

/// 6: weak-coupling agreement with the exact oracle.
pub fn criterion_oracle() -> CriterionResult {
    let start = Instant::now();
    let mut details = Vec::new();
    let summary = match oracle_scan(&[0.2, 0.1, 0.05]) {
        Ok(s) => {
            if !s.window_ok {
                details.push(format!(
                    "no delta satisfies t_B < delta < horizon/10: t_B = {}, horizon/10 = {:.3}",
                    s.correlation_time.map_or("none".into(), |t| format!("{t:.3}")),
                    s.horizon / 10.0
                ));
            }
            if !s.max_distance.windows(2).all(|w| w[1] < w[0]) {
                details.push("distance is not monotone in lambda".into());
            }
            if !(s.max_distance[2] < 0.05) {
                details.push(format!("distance at lambda=0.05 is {:.3e}", s.max_distance[2]));
            }
            for (l, f) in s.lambdas.iter().zip(&s.fock_shift) {
                if !(*f < 1e-6) {
                    details.push(format!("Fock cutoff shift {f:.2e} at lambda={l}"));
                }
            }
            format!(
                "delta={:.3}, max distances {} for lambda 0.2/0.1/0.05, Fock shifts {}",
                s.delta,
                s.max_distance.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>().join("/"),
                s.fock_shift.iter().map(|d| format!("{d:.1e}")).collect::<Vec<_>>().join("/")
            )
        }
        Err(e) => {
            details.push(e.to_string());
            "oracle scan failed".into()
        }
    };
    finish(6, "weak-coupling oracle agreement", details.is_empty(), summary, details, start, Duration::ZERO, 180)
}

/// 7: the naive increment over one window equals one coarse-grained step.
pub fn criterion_one_step() -> CriterionResult {
    let start = Instant::now();
    let quad = QuadratureSpec::default();
    let model = qutrit_model();
    let basis = default_basis(&model);
    let bath = BathSpec::new(BathKind::OhmicThermal { eta: 1.0, cutoff: 5.0, temperature: OMEGA0 }, cross_for(2))
        .expect("bath");
    let (delta, lambda) = (1.0, GRID_LAMBDA);
    let mut details = Vec::new();
    let mut worst = 0.0f64;
    match window_coefficients(&model, &basis, &bath, 0.0, delta, lambda, &quad) {
        Ok(c) => {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for k in 0..10 {
                let rho = DensityMatrix::new(random_density_matrix(&mut rng, 3)).expect("random state");
                match (naive_increment(&model, &bath, &rho, 0.0, delta, lambda, &quad), cg_one_step(&c, &rho)) {
                    (Ok(n), Ok(s)) => {
                        let d = (n.matrix() - &s).max_abs();
                        worst = worst.max(d);
                        if d > 1e-8 {
                            details.push(format!("state {k}: difference {d:.2e}"));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => details.push(format!("state {k}: {e}")),
                }
            }
        }
        Err(e) => details.push(e.to_string()),
    }
    let summary = format!("10 random qutrit states, max entry difference {worst:.2e}");
    finish(7, "one-step consistency", details.is_empty(), summary, details, start, Duration::ZERO, 10)
}

/// 8: van der Pol renormalization-group demonstration.
pub fn criterion_vdp() -> CriterionResult {
    let start = Instant::now();
    let mut details = Vec::new();
    let a0 = C64::new(0.25, 0.0);
    let r1 = vdp_error_report(&VdpConfig::new(0.1, a0));
    let r2 = vdp_error_report(&VdpConfig::new(0.05, a0));
    let amp = limit_cycle_amplitude(0.1, 2.0 * a0.re, -2.0 * a0.im, 300.0, 5.0);
    let summary = match (r1, r2, amp) {
        (Ok(a), Ok(b), Ok(amp)) => {
            let reduction = a.max_e_rg / b.max_e_rg;
            if !(a.ratio_at_inverse_epsilon >= 5.0) {
                details.push(format!(
                    "e_naive/e_rg at t=1/eps is {:.3} (e_naive {:.3e}, e_rg {:.3e})",
                    a.ratio_at_inverse_epsilon, a.e_naive_at_inverse_epsilon, a.e_rg_at_inverse_epsilon
                ));
            }
            if !(1.5..=3.0).contains(&reduction) {
                details.push(format!("max e_rg reduction {reduction:.3}"));
            }
            if !(1.95..=2.05).contains(&amp) {
                details.push(format!("limit cycle amplitude {amp:.4}"));
            }
            format!(
                "ratio at 1/eps {:.3}, max e_rg {:.3e} -> {:.3e} (factor {reduction:.3}), limit cycle {amp:.4}",
                a.ratio_at_inverse_epsilon, a.max_e_rg, b.max_e_rg
            )
        }
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
            details.push(e.to_string());
            "demo failed".into()
        }
    };
    finish(8, "van der Pol RG demo", details.is_empty(), summary, details, start, Duration::ZERO, 10)
}

fn real_max_abs_diff(a: &RealMatrix, b: &RealMatrix) -> f64 {
    a.max_abs_diff(b)
}

/// 9: structural invariants on the grid.
pub fn criterion_structure(grid: &StandardGrid) -> CriterionResult {
    let start = Instant::now();
    let mut details = grid.errors();
    let (mut herm_c, mut herm_h) = (0.0f64, 0.0f64);
    for (p, c) in grid.ok_points() {
        let hc = c.c_matrix.hermiticity_residual();
        let hh = c.hamiltonian_shift().hermiticity_residual();
        herm_c = herm_c.max(hc);
        herm_h = herm_h.max(hh);
        if hc >= 1e-10 || hh >= 1e-10 {
            details.push(format!("{}: Hermiticity residuals {hc:.2e}, {hh:.2e}", p.label()));
        }
    }

    let times: Vec<f64> = (0..=20).map(|k| 5.0 * k as f64).collect();
    let traces: Vec<(String, Result<f64>)> = generators(grid)
        .par_iter()
        .map(|(p, l)| {
            let d = p.model.dimension();
            let rho0 = DensityMatrix::pure(&(0..d).map(|k| C64::new(1.0 + k as f64, 0.5)).collect::<Vec<_>>());
            let r = rho0.and_then(|r| propagate(l, &r, &times)).map(|e| e.max_trace_error());
            (p.label(), r)
        })
        .collect();
    let mut trace_worst = 0.0f64;
    for (label, r) in traces {
        match r {
            Ok(t) => {
                trace_worst = trace_worst.max(t);
                if t >= 1e-10 {
                    details.push(format!("{label}: trace error {t:.2e}"));
                }
            }
            Err(e) => details.push(format!("{label}: {e}")),
        }
    }

    let mut group_worst = 0.0f64;
    for (name, model) in standard_models() {
        let basis = default_basis(&model);
        let parts = (basis_propagator(&model, &basis, 0.7), basis_propagator(&model, &basis, 1.9));
        let whole = basis_propagator(&model, &basis, 2.6);
        match (parts, whole) {
            ((Ok(a), Ok(b)), Ok(w)) => {
                let g = real_max_abs_diff(&b.matmul(&a), &w);
                let o = real_max_abs_diff(&w.matmul(&w.transpose()), &RealMatrix::identity(basis.len()));
                group_worst = group_worst.max(g).max(o);
                if g >= 1e-10 || o >= 1e-10 {
                    details.push(format!("{name}: u group {g:.2e}, orthogonality {o:.2e}"));
                }
            }
            _ => details.push(format!("{name}: u matrix failed")),
        }
    }

    let quad = QuadratureSpec::default();
    let mut cov_worst = 0.0f64;
    for (p, _) in grid.ok_points().filter(|(p, _)| p.delta == 2.0 && p.model_name != "static qubit") {
        let t0 = 3.0 * p.delta;
        let shifted = window_coefficients(&p.model, &p.basis, &p.bath, t0, p.delta, GRID_LAMBDA, &quad);
        let first = p.coeffs.as_ref().expect("filtered to ok points");
        match shifted {
            Ok(s) => {
                let u = conjugation_superop(&p.model.free_propagator(t0));
                let want = u.matmul(&dissipator_superop(first)).matmul(&u.adjoint());
                let d = (&want - &dissipator_superop(&s)).max_abs();
                cov_worst = cov_worst.max(d);
                if d >= 1e-9 {
                    details.push(format!("{}: covariance defect {d:.2e}", p.label()));
                }
            }
            Err(e) => details.push(format!("{}: {e}", p.label())),
        }
    }

    let tau_grid: Vec<f64> = (0..=200).map(|k| 0.05 * k as f64).collect();
    let mut bath_worst = 0.0f64;
    for (name, kind) in standard_bath_kinds().into_iter().chain([(
        "wightman accelerated",
        BathKind::VacuumWightman { trajectory: Trajectory::Accelerated { acceleration: 2.0 }, epsilon: 1e-3 },
    )]) {
        let bath = BathSpec::diagonal(kind, 1).expect("bath");
        let r = validate_bath(&bath, &tau_grid);
        bath_worst = bath_worst.max(r.hermiticity_residual);
        if !r.passed {
            details.push(format!("{name}: bath validation failed ({:.2e})", r.hermiticity_residual));
        }
        if let Some(k) = kms_residual(&bath, &[0.3, 1.0, 2.5]) {
            if k > 1e-10 {
                details.push(format!("{name}: KMS residual {k:.2e}"));
            }
        }
    }
    let summary = format!(
        "Hermiticity {herm_c:.1e}/{herm_h:.1e}, trajectory trace {trace_worst:.1e}, u group {group_worst:.1e}, covariance {cov_worst:.1e}, bath {bath_worst:.1e}"
    );
    finish(9, "structural invariants", details.is_empty(), summary, details, start, Duration::ZERO, 60)
}

/// Every criterion in order, sharing one grid computation.
pub fn run_all() -> Vec<CriterionResult> {
    let grid = StandardGrid::compute(&QuadratureSpec::default());
    vec![
        criterion_positivity(&grid),
        criterion_cptp(&grid),
        criterion_semigroup(&grid),
        criterion_routes(&grid),
        criterion_secular(),
        criterion_oracle(),
        criterion_one_step(),
        criterion_vdp(),
        criterion_structure(&grid),
    ]
}

/// Smallest eigenvalue of a Hermitian matrix, for reports.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).map(|e| e.into_iter().fold(f64::INFINITY, f64::min)).unwrap_or(f64::NAN)
}
