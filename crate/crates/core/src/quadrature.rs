//! Gauss–Legendre rules, composite panels and a vector-valued adaptive
//! Gauss–Kronrod integrator.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cached 16-point rule, the workhorse panel rule.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Nodes and weights of a composite rule: `rule` mapped onto each panel
/// [breaks[k], breaks[k+1]].
pub fn composite_nodes(breaks: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> (Vec<f64>, Vec<f64>) {
    let (rx, rw) = rule;
    let mut xs = Vec::with_capacity(rx.len() * breaks.len());
    let mut ws = Vec::with_capacity(rx.len() * breaks.len());
    for p in breaks.windows(2) {
        let (a, b) = (p[0], p[1]);
        if b <= a {
            continue;
        }
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for (x, w) in rx.iter().zip(rw) {
            xs.push(c + h * x);
            ws.push(h * w);
        }
    }
    (xs, ws)
}

/// Splits [a, b] into `n` equal panels.
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
}

/// Breakpoints on [0, len] graded geometrically towards 0: panels start at
/// width `h0` and double until they reach `hmax`, then stay uniform.
pub fn graded_breaks(len: f64, h0: f64, hmax: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    if len <= 0.0 {
        return out;
    }
    let hmax = hmax.max(h0).min(len);
    let mut h = h0.min(hmax);
    let mut x = 0.0;
    while x + h < len {
        x += h;
        out.push(x);
        if h < hmax {
            h = (2.0 * h).min(hmax);
        }
    }
    if len - x < 0.25 * h && out.len() > 1 {
        out.pop();
    }
    out.push(len);
    out
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: FnMut(f64) -> Vec<f64>>(f: &mut F, a: f64, b: f64) -> (Vec<f64>, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let n = fc.len();
    let mut k: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut g: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..n {
            let s = f1[i] + f2[i];
            k[i] += WGK[j] * s;
            if j % 2 == 1 {
                g[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for i in 0..n {
        k[i] *= h;
        g[i] *= h;
        err = err.max((k[i] - g[i]).abs());
    }
    (k, err)
}

/// Result of an adaptive integration.
#[derive(Clone, Debug)]
pub struct AdaptiveResult {
    pub value: Vec<f64>,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of a vector-valued
/// function over the panels given by `breaks`. The error is measured in the
/// max norm across components; convergence requires
/// error <= max(abs_tol, rel_tol * max|value|).
pub fn adaptive_gk<F: FnMut(f64) -> Vec<f64>>(
    mut f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<AdaptiveResult> {
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    for p in breaks.windows(2) {
        if p[1] > p[0] {
            let (value, err) = gk15(&mut f, p[0], p[1]);
            evals += 15;
            heap.push(Segment { a: p[0], b: p[1], value, err });
        }
    }
    if heap.is_empty() {
        return Err(Error::QuadratureFailure("empty integration range".into()));
    }
    loop {
        let mut total: Vec<f64> = Vec::new();
        let mut err = 0.0;
        for s in heap.iter() {
            if total.is_empty() {
                total = vec![0.0; s.value.len()];
            }
            for (t, v) in total.iter_mut().zip(&s.value) {
                *t += v;
            }
            err += s.err;
        }
        let scale = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok(AdaptiveResult { value: total, error: err, evaluations: evals });
        }
        if heap.len() >= max_segments {
            return Err(Error::QuadratureFailure(format!(
                "adaptive Gauss-Kronrod: error {err:.3e} above tolerance after {} segments",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evals += 30;
        heap.push(Segment { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, err: e2 });
    }
}

/// Scalar convenience wrapper around [`adaptive_gk`].
pub fn adaptive_scalar<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> Result<f64> {
    adaptive_gk(|x| vec![f(x)], breaks, rel_tol, abs_tol, 20_000).map(|r| r.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            // highest even power integrated exactly: ∫ x^{2n-2} = 2/(2n-1)
            let p = 2 * n - 2;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
            assert!((got - 2.0 / (p + 1) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn composite_integrates_cosine() {
        let (x, w) = composite_nodes(&uniform_breaks(0.0, 10.0, 7), gl16());
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.cos()).sum();
        assert!((s - 10f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn graded_breaks_cover_interval() {
        let b = graded_breaks(5.0, 1e-3, 0.5);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), 5.0);
        assert!(b.windows(2).all(|p| p[1] > p[0]));
        assert!((b[1] - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let eps = 1e-3;
        let r = adaptive_scalar(|x| eps / (x * x + eps * eps), &[-1.0, 0.0, 1.0], 1e-12, 0.0).unwrap();
        assert!((r - 2.0 * (1.0 / eps).atan()).abs() < 1e-10);
    }

    #[test]
    fn adaptive_reports_failure() {
        let r = adaptive_gk(|x| vec![1.0 / x.abs().sqrt().max(1e-300)], &[-1.0, 1.0], 1e-14, 0.0, 8);
        assert!(matches!(r, Err(Error::QuadratureFailure(_))));
    }
}
