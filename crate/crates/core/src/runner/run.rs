//! Scenario execution: turns a validated configuration into an output record.

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{RunConfig, Scenario};
use crate::audit::{run_all, secular_scan};
use crate::bath::{validate_bath, BathKind, BathSpec};
use crate::cg::{
    assemble_lindbladian, compute_cg_coefficients, compute_cg_filter_route, kossakowski_check, window_coefficients,
    CGCoefficients, QuadratureSpec,
};
use crate::error::{Error, Result};
use crate::evolution::{cptp_audit, propagate, semigroup_audit, DensityMatrix};
use crate::linalg::ComplexMatrix;
use crate::oracle::{fock_audit, oracle_compare};
use crate::system::{default_basis, SystemModel};
use crate::vdp::{limit_cycle_amplitude, vdp_error_report};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

const SECULAR_DELTAS: [f64; 4] = [10.0, 30.0, 100.0, 300.0];

/// A named numeric table destined for CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputRecord {
    pub scenario: String,
    pub config_hash: String,
    pub artifact_version: String,
    pub passed: bool,
    pub failures: Vec<String>,
    pub payload: Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.rows()).map(|i| json!((0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>())).collect(),
    )
}

fn correlation_time(bath: &BathSpec, scale: f64) -> Option<f64> {
    if bath.is_delta() {
        return None;
    }
    let grid: Vec<f64> = (0..=2000).map(|k| scale * k as f64 / 2000.0).collect();
    validate_bath(bath, &grid).correlation_time
}

fn coefficients_entry(model: &SystemModel, bath: &BathSpec, c: &CGCoefficients, failures: &mut Vec<String>) -> Value {
    let k = kossakowski_check(c);
    if !k.passed {
        failures.push(format!(
            "delta={} lambda={}: Kossakowski matrix not positive (min {:.3e}, max {:.3e})",
            c.delta, c.lambda, k.min, k.max
        ));
    }
    let route = match compute_cg_filter_route(model, bath, c.delta, c.lambda) {
        Ok(f) => {
            let f = f.to_basis(&default_basis(model));
            let scale = c.c_matrix.max_abs().max(f.c_matrix.max_abs()).max(f64::MIN_POSITIVE);
            let d = (&c.c_matrix - &f.c_matrix).max_abs().max((&c.h_matrix - &f.h_matrix).max_abs()) / scale;
            if d > 1e-6 {
                failures.push(format!("delta={} lambda={}: routes differ by {d:.3e}", c.delta, c.lambda));
            }
            Some(d)
        }
        Err(Error::UnsupportedKind(_)) => None,
        Err(e) => {
            failures.push(format!("delta={} lambda={}: filter route failed: {e}", c.delta, c.lambda));
            None
        }
    };
    json!({
        "delta": c.delta,
        "lambda": c.lambda,
        "basis_labels": c.labels,
        "h_matrix": matrix_json(&c.h_matrix),
        "c_matrix": matrix_json(&c.c_matrix),
        "eigenvalues": k.eigenvalues,
        "audit": {
            "kossakowski_min": k.min,
            "kossakowski_max": k.max,
            "hermiticity_residual": k.hermiticity_residual,
            "positivity_passed": k.passed,
            "positivity_warning": c.positivity_warning,
            "route_difference": route,
            "quadrature_error_estimate": c.error_estimate,
        },
        "t_B": correlation_time(bath, 50.0 * c.delta.max(1.0)),
        "t_S": c.relaxation_time(),
    })
}

fn run_coefficients(cfg: &RunConfig, quad: &QuadratureSpec, failures: &mut Vec<String>) -> Result<(Value, Vec<Table>)> {
    let model = cfg.system_model()?;
    let bath = cfg.bath_spec(&model)?;
    let basis = default_basis(&model);
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for lambda in cfg.lambdas()? {
        for delta in cfg.deltas()? {
            let c = window_coefficients(&model, &basis, &bath, 0.0, delta, lambda, quad)?;
            entries.push(coefficients_entry(&model, &bath, &c, failures));
            let n = c.c_matrix.rows();
            for i in 0..n {
                for j in 0..n {
                    let (cc, hh) = (c.c_matrix[(i, j)], c.h_matrix[(i, j)]);
                    rows.push(vec![delta, lambda, i as f64, j as f64, cc.re, cc.im, hh.re, hh.im]);
                }
            }
        }
    }
    let header = ["delta", "lambda", "i", "j", "c_re", "c_im", "h_re", "h_im"].map(String::from).to_vec();
    Ok((json!({ "entries": entries }), vec![Table { name: "coefficients".into(), header, rows }]))
}

fn run_evolve(cfg: &RunConfig, quad: &QuadratureSpec, failures: &mut Vec<String>) -> Result<(Value, Vec<Table>)> {
    let model = cfg.system_model()?;
    let bath = cfg.bath_spec(&model)?;
    let basis = default_basis(&model);
    let section = cfg
        .evolution
        .as_ref()
        .ok_or_else(|| Error::Validation { path: "evolution".into(), reason: "required for this scenario".into() })?;
    let times = section.sample_times()?;
    let rho0 = section.initial_state.build(model.dimension())?;
    let (delta, lambda) = (cfg.delta()?, cfg.lambda()?);
    let coeffs = compute_cg_coefficients(&model, &basis, &bath, delta, lambda, quad)?;
    let l = assemble_lindbladian(&model, &coeffs)?;
    let traj = propagate(&l, &rho0, &times)?;
    let t_end = *times.last().expect("non-empty times");
    let cptp = cptp_audit(&l, &[0.5 * t_end, t_end])?;
    let semi = semigroup_audit(&l, t_end / 3.0, t_end / 2.0)?;
    if !cptp.passed {
        failures.push("evolution map is not CPTP at the audit times".into());
    }
    if !semi.passed {
        failures.push(format!("semigroup defect {:.3e}", semi.defect));
    }
    if l.trace_residual() > 1e-10 {
        failures.push(format!("generator trace residual {:.3e}", l.trace_residual()));
    }
    let d = model.dimension();
    let mut header = vec!["time".to_string()];
    for i in 0..d {
        for j in 0..d {
            header.push(format!("rho_{i}{j}_re"));
            header.push(format!("rho_{i}{j}_im"));
        }
    }
    header.extend(["trace_error", "min_eig", "purity"].map(String::from));
    let rows = traj
        .times
        .iter()
        .zip(&traj.states)
        .zip(&traj.audits)
        .map(|((t, s), a)| {
            let mut row = vec![*t];
            for z in s.data() {
                row.push(z.re);
                row.push(z.im);
            }
            row.extend([a.trace_error, a.min_eigenvalue, a.purity]);
            row
        })
        .collect();
    let payload = json!({
        "delta": delta,
        "lambda": lambda,
        "sample_count": times.len(),
        "final_state": matrix_json(traj.states.last().expect("non-empty trajectory")),
        "max_trace_error": traj.max_trace_error(),
        "min_eigenvalue": traj.min_eigenvalue(),
        "positivity_warning": traj.positivity_warning,
        "audit": {
            "cptp": cptp.entries.iter().map(|e| json!({
                "time": e.time,
                "min_choi_eigenvalue": e.min_choi_eigenvalue,
                "trace_residual": e.trace_residual,
                "passed": e.passed,
            })).collect::<Vec<_>>(),
            "semigroup_defect": semi.defect,
            "generator_trace_residual": l.trace_residual(),
        },
    });
    Ok((payload, vec![Table { name: "trajectory".into(), header, rows }]))
}

fn run_oracle(cfg: &RunConfig, quad: &QuadratureSpec, failures: &mut Vec<String>) -> Result<(Value, Vec<Table>)> {
    let model = cfg.system_model()?;
    let basis = default_basis(&model);
    let section = cfg.oracle.clone().unwrap_or_default();
    let delta = cfg.delta()?;
    let rho0 = match &cfg.evolution {
        Some(e) => e.initial_state.build(model.dimension())?,
        None => DensityMatrix::pure(
            &(0..model.dimension())
                .map(|i| if i == 0 { crate::linalg::ONE } else { crate::linalg::ZERO })
                .collect::<Vec<_>>(),
        )?,
    };
    let mut results = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut times = Vec::new();
    let mut header = vec!["time".to_string()];
    for lambda in cfg.lambdas()? {
        let cm = section.composite(&model, lambda)?;
        let ocfg = section.config(&cm)?;
        let bath = cm.matching_bath(section.broadening)?;
        let coeffs = window_coefficients(&model, &basis, &bath, 0.0, delta, lambda, quad)?;
        let report = oracle_compare(&cm, &coeffs, &rho0, &ocfg)?;
        let fock = fock_audit(&cm, &rho0, &ocfg)?;
        if !fock.passed {
            failures.push(format!("lambda={lambda}: Fock cutoff shift {:.3e} exceeds 1e-6", fock.max_shift));
        }
        let t_b = correlation_time(&bath, ocfg.horizon);
        if t_b.is_some_and(|t| !(t < delta && delta < ocfg.horizon / 10.0)) {
            failures.push(format!("lambda={lambda}: delta={delta} is outside (t_B, horizon/10)"));
        }
        results.push(json!({
            "lambda": lambda,
            "max_distance": report.max_distance,
            "fock_shift": fock.max_shift,
            "horizon": report.horizon,
            "recurrence_guard": report.recurrence_guard,
            "t_B": t_b,
            "composite_dimension": cm.dimension(),
        }));
        header.push(format!("distance_lambda_{lambda}"));
        times = report.times;
        columns.push(report.distances);
    }
    let rows = times
        .iter()
        .enumerate()
        .map(|(k, t)| std::iter::once(*t).chain(columns.iter().map(|c| c[k])).collect())
        .collect();
    let maxima: Vec<f64> = results.iter().map(|r| r["max_distance"].as_f64().unwrap_or(f64::NAN)).collect();
    Ok((
        json!({ "delta": delta, "results": results, "monotone_in_lambda": maxima.windows(2).all(|w| w[1] <= w[0]) }),
        vec![Table { name: "oracle".into(), header, rows }],
    ))
}

fn run_secular(cfg: &RunConfig, failures: &mut Vec<String>) -> Result<(Value, Vec<Table>)> {
    let model = cfg.system_model()?;
    let bath = cfg.bath_spec(&model)?;
    if matches!(bath.kind, BathKind::VacuumWightman { .. }) {
        return Err(Error::UnsupportedKind("secular comparison needs a bath with a frequency-domain form".into()));
    }
    let deltas = cfg.sweep.as_ref().and_then(|s| s.deltas.clone()).unwrap_or_else(|| SECULAR_DELTAS.to_vec());
    let scan = secular_scan(&model, &bath, cfg.lambda()?, &deltas)?;
    if !(scan.slope <= -0.9) {
        failures.push(format!("cross-sector log-log slope {:.3} is above -0.9", scan.slope));
    }
    let mut diag = Vec::new();
    for &(w, got, want) in &scan.diagonal {
        let rel = if want != 0.0 { (got - want).abs() / want.abs() } else { (got - want).abs() };
        if w != 0.0 && rel > 0.01 {
            failures.push(format!("sector {w}: {got:.6e} differs from the secular value {want:.6e}"));
        }
        diag.push(json!({ "frequency": w, "coarse_grained": got, "secular": want, "relative_error": rel }));
    }
    let rows = deltas.iter().zip(&scan.cross_max).map(|(d, c)| vec![*d, *c]).collect();
    Ok((
        json!({ "deltas": deltas, "cross_max": scan.cross_max, "slope": scan.slope, "diagonal": diag }),
        vec![Table { name: "secular".into(), header: vec!["delta".into(), "cross_max".into()], rows }],
    ))
}

fn run_rg_demo(cfg: &RunConfig) -> Result<(Value, Vec<Table>)> {
    let section = cfg
        .vdp
        .as_ref()
        .ok_or_else(|| Error::Validation { path: "vdp".into(), reason: "required for this scenario".into() })?;
    let vcfg = section.build()?;
    let r = vdp_error_report(&vcfg)?;
    let (x0, v0) = vcfg.initial_data();
    let amplitude = if vcfg.epsilon > 0.0 {
        Some(limit_cycle_amplitude(vcfg.epsilon, x0, v0, 30.0 / vcfg.epsilon, 5.0)?)
    } else {
        None
    };
    let rows = (0..r.times.len())
        .map(|k| vec![r.times[k], r.x_ref[k], r.x_naive[k], r.x_rg[k], r.e_naive[k], r.e_rg[k]])
        .collect();
    let header = ["t", "x_ref", "x_naive", "x_rg", "e_naive", "e_rg"].map(String::from).to_vec();
    Ok((
        json!({
            "epsilon": vcfg.epsilon,
            "horizon": vcfg.horizon,
            "max_e_naive": r.max_e_naive,
            "max_e_rg": r.max_e_rg,
            "e_naive_at_inverse_epsilon": r.e_naive_at_inverse_epsilon,
            "e_rg_at_inverse_epsilon": r.e_rg_at_inverse_epsilon,
            "ratio_at_inverse_epsilon": r.ratio_at_inverse_epsilon,
            "limit_cycle_amplitude": amplitude,
        }),
        vec![Table { name: "vdp".into(), header, rows }],
    ))
}

fn run_audit(failures: &mut Vec<String>) -> Value {
    let results = run_all();
    for r in results.iter().filter(|r| !r.passed) {
        failures.push(format!("criterion {}: {}", r.id, r.summary));
    }
    Value::Array(
        results
            .iter()
            .map(|r| json!({ "id": r.id, "title": r.title, "passed": r.passed, "summary": r.summary, "details": r.details }))
            .collect(),
    )
}

/// Validates and executes the configured scenario. Audit failures are
/// reported in the record; configuration problems are returned as errors.
pub fn run_scenario(cfg: &RunConfig) -> Result<OutputRecord> {
    cfg.validate()?;
    let quad = cfg.quadrature.build()?;
    let mut failures = Vec::new();
    let (payload, tables) = match cfg.scenario {
        Scenario::Coefficients => run_coefficients(cfg, &quad, &mut failures)?,
        Scenario::Evolve => run_evolve(cfg, &quad, &mut failures)?,
        Scenario::OracleCompare => run_oracle(cfg, &quad, &mut failures)?,
        Scenario::SecularCompare => run_secular(cfg, &mut failures)?,
        Scenario::RgDemo => run_rg_demo(cfg)?,
        Scenario::Audit => (run_audit(&mut failures), Vec::new()),
    };
    Ok(OutputRecord {
        scenario: cfg.scenario.name().to_string(),
        config_hash: cfg.canonical_hash(),
        artifact_version: ARTIFACT_VERSION.to_string(),
        passed: failures.is_empty(),
        failures,
        payload,
        tables,
    })
}
