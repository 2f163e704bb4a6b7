//! Composite Gauss-Legendre quadrature: cached reference rules, panel meshes
//! with geometric endpoint grading, and doubling-based adaptive integration.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::orthopoly::tridiag::eigen_tridiagonal;

/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(order: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("legendre cache poisoned");
    map.entry(order)
        .or_insert_with(|| Arc::new(legendre_rule(order)))
        .clone()
}

fn legendre_rule(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let diag = vec![0.0; order];
    let off: Vec<f64> = (1..order)
        .map(|k| {
            let k = k as f64;
            (k * k / ((2.0 * k - 1.0) * (2.0 * k + 1.0))).sqrt()
        })
        .collect();
    let eig = eigen_tridiagonal(&diag, &off).expect("legendre eigenproblem");
    let weights = eig.first_row.iter().map(|z| 2.0 * z * z).collect();
    (eig.values, weights)
}

/// One integration panel [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
}

impl Panel {
    pub fn new(lo: f64, hi: f64) -> Self {
        Panel { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    fn split(&self) -> (Panel, Panel) {
        let mid = 0.5 * (self.lo + self.hi);
        (Panel::new(self.lo, mid), Panel::new(mid, self.hi))
    }
}

/// Uniform mesh of `count` panels over [lo, hi], with optional geometric
/// grading toward either endpoint (`depth` halvings of the boundary panel).
/// Grading keeps composite rules accurate for integrable endpoint
/// singularities and kinks.
pub fn panel_mesh(
    lo: f64,
    hi: f64,
    count: usize,
    grade_lo: bool,
    grade_hi: bool,
    depth: usize,
) -> Vec<Panel> {
    assert!(hi > lo && count >= 1);
    let h = (hi - lo) / count as f64;
    let mut panels = Vec::with_capacity(count + 2 * depth);
    for j in 0..count {
        let a = lo + h * j as f64;
        let b = if j + 1 == count { hi } else { lo + h * (j + 1) as f64 };
        let first = j == 0 && grade_lo;
        let last = j + 1 == count && grade_hi;
        if first && last && count == 1 {
            let mid = 0.5 * (a + b);
            grade_panel_left(a, mid, depth, &mut panels);
            grade_panel_right(mid, b, depth, &mut panels);
        } else if first {
            grade_panel_left(a, b, depth, &mut panels);
        } else if last {
            grade_panel_right(a, b, depth, &mut panels);
        } else {
            panels.push(Panel::new(a, b));
        }
    }
    panels
}

fn grade_panel_left(a: f64, b: f64, depth: usize, out: &mut Vec<Panel>) {
    let mut edges = Vec::with_capacity(depth + 2);
    edges.push(a);
    for k in (1..=depth).rev() {
        edges.push(a + (b - a) * 0.5f64.powi(k as i32));
    }
    edges.push(b);
    for w in edges.windows(2) {
        if w[1] > w[0] {
            out.push(Panel::new(w[0], w[1]));
        }
    }
}

fn grade_panel_right(a: f64, b: f64, depth: usize, out: &mut Vec<Panel>) {
    let mut edges = Vec::with_capacity(depth + 2);
    edges.push(a);
    for k in 1..=depth {
        edges.push(b - (b - a) * 0.5f64.powi(k as i32));
    }
    edges.push(b);
    for w in edges.windows(2) {
        if w[1] > w[0] {
            out.push(Panel::new(w[0], w[1]));
        }
    }
}

/// Composite Gauss-Legendre sum of `f` over `panels`.
pub fn integrate_panels<F: FnMut(f64) -> f64>(mut f: F, panels: &[Panel], order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mut acc = 0.0;
    for p in panels {
        let c = 0.5 * (p.lo + p.hi);
        let hl = 0.5 * (p.hi - p.lo);
        let mut local = 0.0;
        for (t, w) in nodes.iter().zip(weights) {
            local += w * f(c + hl * t);
        }
        acc += hl * local;
    }
    acc
}

/// Complex-valued variant of [`integrate_panels`].
pub fn integrate_panels_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    panels: &[Panel],
    order: usize,
) -> Complex64 {
    let rule = gauss_legendre(order);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in panels {
        let c = 0.5 * (p.lo + p.hi);
        let hl = 0.5 * (p.hi - p.lo);
        let mut local = Complex64::new(0.0, 0.0);
        for (t, w) in nodes.iter().zip(weights) {
            local += f(c + hl * t) * *w;
        }
        acc += local * hl;
    }
    acc
}

/// Controls for the doubling-based adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveSpec {
    pub rel_tol: f64,
    pub max_refinements: u32,
}

impl Default for AdaptiveSpec {
    fn default() -> Self {
        AdaptiveSpec {
            rel_tol: 1e-10,
            max_refinements: 14,
        }
    }
}

fn halve(panels: &[Panel]) -> Vec<Panel> {
    let mut out = Vec::with_capacity(panels.len() * 2);
    for p in panels {
        let (a, b) = p.split();
        out.push(a);
        out.push(b);
    }
    out
}

/// Integrates `f` over `panels`, halving every panel until two successive
/// composite values agree to `spec.rel_tol`. Returns the value and the last
/// between-level difference as an error estimate.
pub fn adaptive_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    panels: &[Panel],
    order: usize,
    spec: &AdaptiveSpec,
) -> Result<(Complex64, f64)> {
    let mut mesh = panels.to_vec();
    let mut prev = integrate_panels_complex(&mut f, &mesh, order);
    let mut last_err = f64::INFINITY;
    for _ in 0..spec.max_refinements {
        mesh = halve(&mesh);
        let cur = integrate_panels_complex(&mut f, &mesh, order);
        last_err = (cur - prev).norm();
        if last_err <= spec.rel_tol * (1.0 + cur.norm()) {
            return Ok((cur, last_err));
        }
        prev = cur;
    }
    Err(CoreError::QuadratureNonConvergence {
        estimate: last_err,
        tolerance: spec.rel_tol * (1.0 + prev.norm()),
    })
}

/// Real-valued variant of [`adaptive_complex`].
pub fn adaptive_real<F: FnMut(f64) -> f64>(
    mut f: F,
    panels: &[Panel],
    order: usize,
    spec: &AdaptiveSpec,
) -> Result<(f64, f64)> {
    let (v, e) = adaptive_complex(|y| Complex64::new(f(y), 0.0), panels, order, spec)?;
    Ok((v.re, e))
}

/// Scans outward along a geometric ladder and returns the abscissa beyond
/// which `m` stays below `floor_ratio` times its running maximum. `start`
/// anchors the ladder (the scan covers start + 10^(k/8), k = -48..=72).
/// Returns None when no such cutoff exists inside the ladder.
pub fn decay_cutoff<F: FnMut(f64) -> f64>(mut m: F, start: f64, floor_ratio: f64) -> Option<f64> {
    let mut best = 0.0f64;
    let mut samples = Vec::with_capacity(121);
    for k in -48..=72 {
        let s = 10f64.powf(k as f64 / 8.0);
        let v = m(start + s).abs();
        if v.is_finite() && v > best {
            best = v;
        }
        samples.push((s, v));
    }
    if best == 0.0 {
        return Some(start + samples[0].0);
    }
    // A single sub-floor sample may be an isolated zero of the integrand
    // (wavelet kernels vanish once); only a sustained run counts as decay.
    let mut peak_seen = false;
    let mut run_start: Option<f64> = None;
    let mut run_len = 0;
    for (s, v) in &samples {
        if *v >= best {
            peak_seen = true;
        }
        if peak_seen && *v < floor_ratio * best {
            if run_start.is_none() {
                run_start = Some(*s);
            }
            run_len += 1;
            if run_len >= 4 {
                return Some(start + run_start.expect("run has a first sample"));
            }
        } else {
            run_start = None;
            run_len = 0;
        }
    }
    None
}
