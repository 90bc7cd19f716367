//! Gragg–Bulirsch–Stoer extrapolation integrator with adaptive steps.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct GbsOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for GbsOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-12, initial_step: 0.1, max_steps: 1_000_000 }
    }
}

const MAX_COLUMNS: usize = 10;

/// Integrates y' = f(t, y) from (t0, y0) and returns y at each of `times`,
/// which must be monotone in one direction away from t0.
pub fn integrate<F>(mut f: F, t0: f64, y0: &[f64], times: &[f64], opts: &GbsOptions) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h = opts.initial_step.abs();
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(times.len());
    let mut scratch = Scratch::new(n);
    for &target in times {
        let dir = if target >= t { 1.0 } else { -1.0 };
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepFailure(format!("step budget exhausted at t = {t}")));
            }
            let remaining = (target - t).abs();
            let last = h >= remaining;
            let step = if last { remaining } else { h } * dir;
            match attempt(&mut f, t, &y, step, opts, &mut scratch) {
                Some((factor, next)) => {
                    y = next;
                    t = if last { target } else { t + step };
                    h = (step.abs() * factor).max(1e-14 * t.abs().max(1.0));
                }
                None => {
                    h = step.abs() * 0.3;
                    if h < 1e-14 * t.abs().max(1.0) {
                        return Err(Error::StepFailure(format!("step size underflow at t = {t}")));
                    }
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
    d: Vec<f64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self { a: vec![0.0; n], b: vec![0.0; n], d: vec![0.0; n] }
    }
}

fn substeps(j: usize) -> usize {
    2 * (j + 1)
}

/// Modified-midpoint sequence with Neville extrapolation in h². Returns the
/// step growth factor and the extrapolated state.
fn attempt<F>(f: &mut F, t: f64, y: &[f64], big: f64, opts: &GbsOptions, s: &mut Scratch) -> Option<(f64, Vec<f64>)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut prev_row: Vec<Vec<f64>> = Vec::new();
    for k in 0..MAX_COLUMNS {
        let m = substeps(k);
        let h = big / m as f64;
        f(t, y, &mut s.d);
        for i in 0..n {
            s.a[i] = y[i];
            s.b[i] = y[i] + h * s.d[i];
        }
        for step in 1..m {
            f(t + step as f64 * h, &s.b, &mut s.d);
            for i in 0..n {
                let next = s.a[i] + 2.0 * h * s.d[i];
                s.a[i] = s.b[i];
                s.b[i] = next;
            }
        }
        f(t + big, &s.b, &mut s.d);
        let mut row = Vec::with_capacity(k + 1);
        row.push((0..n).map(|i| 0.5 * (s.a[i] + s.b[i] + h * s.d[i])).collect::<Vec<f64>>());
        for j in 1..=k {
            let ratio = (substeps(k) as f64 / substeps(k - j) as f64).powi(2);
            let cur = &row[j - 1];
            let old = &prev_row[j - 1];
            let next: Vec<f64> = (0..n).map(|i| cur[i] + (cur[i] - old[i]) / (ratio - 1.0)).collect();
            row.push(next);
        }
        if k >= 2 {
            let (best, second) = (&row[k], &row[k - 1]);
            let mut acc = 0.0;
            for i in 0..n {
                let sc = opts.atol + opts.rtol * y[i].abs().max(best[i].abs());
                acc += ((best[i] - second[i]) / sc).powi(2);
            }
            let err = (acc / n as f64).sqrt();
            if err <= 1.0 {
                let order = (2 * k + 1) as f64;
                let mut factor = if err == 0.0 { 4.0 } else { (0.94 * (0.65 / err).powf(1.0 / order)).clamp(0.2, 4.0) };
                if k <= 4 {
                    factor = factor.max(1.5);
                } else if k >= MAX_COLUMNS - 2 {
                    factor = factor.min(0.7);
                }
                return Some((factor, row.pop().unwrap()));
            }
        }
        prev_row = row;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let out = integrate(|_, y, d| d[0] = -y[0], 0.0, &[1.0], &[1.0, 5.0], &GbsOptions::default()).unwrap();
        assert!((out[0][0] - (-1.0f64).exp()).abs() < 1e-12);
        assert!((out[1][0] - (-5.0f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn harmonic_oscillator_period_and_reversal() {
        let f = |_: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
        };
        let tp = 2.0 * std::f64::consts::PI;
        let fwd = integrate(f, 0.0, &[0.3, -0.7], &[tp], &GbsOptions::default()).unwrap();
        assert!((fwd[0][0] - 0.3).abs() < 1e-10 && (fwd[0][1] + 0.7).abs() < 1e-10);
        let back = integrate(
            f,
            3.0,
            &integrate(f, 0.0, &[0.3, -0.7], &[3.0], &GbsOptions::default()).unwrap()[0],
            &[0.0],
            &GbsOptions::default(),
        )
        .unwrap();
        assert!((back[0][0] - 0.3).abs() < 1e-10 && (back[0][1] + 0.7).abs() < 1e-10);
    }
}
