//! Discretized Stieltjes procedure: recurrence coefficients for generic
//! weights via orthonormalization against a refined composite quadrature.

use crate::error::{CoreError, Result};
use crate::orthopoly::{Recurrence, WeightSpec};
use crate::quad::{decay_cutoff, gauss_legendre, panel_mesh};

/// Refinement controls for the discretized measure.
#[derive(Debug, Clone, Copy)]
pub struct Discretization {
    pub initial_panels: usize,
    pub order: usize,
    pub rel_tol: f64,
    pub max_refinements: u32,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization {
            initial_panels: 32,
            order: 24,
            rel_tol: 1e-10,
            max_refinements: 10,
        }
    }
}

/// Truncates infinite interval ends so that all moments up to
/// `moment_degree` are captured: the cut sits where w(y)*max(1,|y|)^degree
/// drops below 1e-16 of its maximum along a geometric ladder.
pub fn truncated_support(w: &WeightSpec, moment_degree: usize) -> Result<(f64, f64)> {
    let iv = w.interval;
    let deg = moment_degree as i32;
    let lo = if iv.lo.is_finite() {
        iv.lo
    } else {
        let anchor = if iv.hi.is_finite() { iv.hi } else { 0.0 };
        let m = |s: f64| {
            let y = anchor - s;
            w.eval(y) * y.abs().max(1.0).powi(deg)
        };
        match decay_cutoff(m, 0.0, 1e-16) {
            Some(s) => anchor - s,
            None => {
                return Err(CoreError::MomentDivergence(format!(
                    "no decay of moment integrand of degree {moment_degree} toward -inf"
                )))
            }
        }
    };
    let hi = if iv.hi.is_finite() {
        iv.hi
    } else {
        let anchor = if iv.lo.is_finite() { iv.lo } else { 0.0 };
        let m = |s: f64| {
            let y = anchor + s;
            w.eval(y) * y.abs().max(1.0).powi(deg)
        };
        match decay_cutoff(m, 0.0, 1e-16) {
            Some(s) => anchor + s,
            None => {
                return Err(CoreError::MomentDivergence(format!(
                    "no decay of moment integrand of degree {moment_degree} toward +inf"
                )))
            }
        }
    };
    if !(lo < hi) {
        return Err(CoreError::MomentDivergence(format!(
            "degenerate truncated support ({lo}, {hi})"
        )));
    }
    Ok((lo, hi))
}

/// Discrete Stieltjes orthonormalization over a point measure.
/// Returns `pairs` coefficient pairs (alpha_k, beta_k), beta_0 = total mass.
pub fn stieltjes_from_discrete(
    nodes: &[f64],
    weights: &[f64],
    pairs: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if nodes.len() != weights.len() || nodes.len() < pairs {
        return Err(CoreError::ParameterOutOfRange(format!(
            "discrete measure with {} points cannot support {} recurrence pairs",
            nodes.len(),
            pairs
        )));
    }
    if pairs == 0 {
        return Err(CoreError::ParameterOutOfRange(
            "at least one recurrence pair is required".into(),
        ));
    }
    let mass: f64 = weights.iter().sum();
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(CoreError::MomentDivergence(format!(
            "discrete measure has nonpositive or non-finite mass {mass}"
        )));
    }
    let n = nodes.len();
    let mut alpha = Vec::with_capacity(pairs);
    let mut beta = Vec::with_capacity(pairs);
    beta.push(mass);
    let mut prev = vec![0.0f64; n];
    let mut cur = vec![1.0 / mass.sqrt(); n];
    let mut scratch = vec![0.0f64; n];
    for k in 0..pairs {
        let mut a = 0.0;
        for i in 0..n {
            a += weights[i] * nodes[i] * cur[i] * cur[i];
        }
        alpha.push(a);
        if k + 1 == pairs {
            break;
        }
        let sq_bk = beta[k].sqrt();
        for i in 0..n {
            scratch[i] = (nodes[i] - a) * cur[i] - if k == 0 { 0.0 } else { sq_bk * prev[i] };
        }
        let mut b_next = 0.0;
        for i in 0..n {
            b_next += weights[i] * scratch[i] * scratch[i];
        }
        if !(b_next > 0.0) || !b_next.is_finite() {
            return Err(CoreError::StieltjesUnstable {
                refinements: 0,
                last_change: b_next,
            });
        }
        beta.push(b_next);
        let inv = 1.0 / b_next.sqrt();
        for i in 0..n {
            prev[i] = cur[i];
            cur[i] = scratch[i] * inv;
        }
    }
    Ok((alpha, beta))
}

/// Recurrence coefficients for an arbitrary weight by discretization,
/// refined until the coefficients stabilize under panel doubling.
pub fn stieltjes_recurrence(
    w: &WeightSpec,
    n_max: usize,
    disc: &Discretization,
) -> Result<Recurrence> {
    let pairs = n_max + 1;
    let (lo, hi) = truncated_support(w, 2 * n_max + 2)?;
    let grade_lo = w.interval.lo.is_finite();
    let grade_hi = w.interval.hi.is_finite();

    let mut previous: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut panels = disc.initial_panels.max(1);
    let mut last_change = f64::INFINITY;
    for level in 0..=disc.max_refinements {
        let mesh = panel_mesh(lo, hi, panels, grade_lo, grade_hi, 40);
        let rule = gauss_legendre(disc.order);
        let mut nodes = Vec::with_capacity(mesh.len() * disc.order);
        let mut weights = Vec::with_capacity(mesh.len() * disc.order);
        for p in &mesh {
            let c = 0.5 * (p.lo + p.hi);
            let hl = 0.5 * (p.hi - p.lo);
            for (t, wq) in rule.0.iter().zip(&rule.1) {
                let y = c + hl * t;
                let wv = w.eval(y);
                if wv.is_finite() && wv > 0.0 {
                    nodes.push(y);
                    weights.push(hl * wq * wv);
                }
            }
        }
        let (alpha, beta) = stieltjes_from_discrete(&nodes, &weights, pairs)?;
        if let Some((pa, pb)) = &previous {
            last_change = coefficient_change(pa, pb, &alpha, &beta);
            if last_change <= disc.rel_tol {
                return Recurrence::new(alpha, beta, w.interval);
            }
        }
        previous = Some((alpha, beta));
        if level < disc.max_refinements {
            panels *= 2;
        }
    }
    Err(CoreError::StieltjesUnstable {
        refinements: disc.max_refinements,
        last_change,
    })
}

fn coefficient_change(pa: &[f64], pb: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..a.len() {
        let scale = a[k].abs().max(b[k].sqrt()).max(1e-12);
        worst = worst.max((a[k] - pa[k]).abs() / scale);
        worst = worst.max((b[k] - pb[k]).abs() / b[k]);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::{classical_recurrence, Interval};
    use crate::special::gamma;

    #[test]
    fn matches_closed_form_laguerre() {
        let w = WeightSpec::generic(Interval::half_line(), |y: f64| (-y).exp());
        let rec = stieltjes_recurrence(&w, 20, &Discretization::default()).unwrap();
        let exact = classical_recurrence(&WeightSpec::laguerre(0.0).unwrap(), 20).unwrap();
        for k in 0..=20 {
            let da = (rec.alphas()[k] - exact.alphas()[k]).abs() / exact.alphas()[k].abs();
            let db = (rec.betas()[k] - exact.betas()[k]).abs() / exact.betas()[k];
            assert!(da < 1e-9 && db < 1e-9, "k={k}: {da} {db}");
        }
    }

    #[test]
    fn matches_closed_form_hermite() {
        let w = WeightSpec::generic(Interval::real_line(), |y: f64| (-y * y).exp());
        let rec = stieltjes_recurrence(&w, 16, &Discretization::default()).unwrap();
        let exact = classical_recurrence(&WeightSpec::hermite(), 16).unwrap();
        for k in 0..=16 {
            assert!(rec.alphas()[k].abs() < 1e-10);
            let db = (rec.betas()[k] - exact.betas()[k]).abs() / exact.betas()[k];
            assert!(db < 1e-9, "k={k}: {db}");
        }
    }

    #[test]
    fn freud_quartic_frozen_coefficients() {
        // For w = exp(-y^4): beta_0 = Gamma(1/4)/2, beta_1 = Gamma(3/4)/Gamma(1/4),
        // and the string relation 4 b_k (b_{k+1} + b_k + b_{k-1}) = k fixes the rest.
        let rec = stieltjes_recurrence(&WeightSpec::freud(4).unwrap(), 12, &Discretization::default())
            .unwrap();
        let b0 = gamma(0.25) / 2.0;
        let b1 = gamma(0.75) / gamma(0.25);
        assert!((rec.betas()[0] - b0).abs() < 1e-10 * b0);
        assert!((rec.betas()[1] - b1).abs() < 1e-9 * b1);
        for k in 1..=10 {
            let prev = if k == 1 { 0.0 } else { rec.betas()[k - 1] };
            let lhs = 4.0 * rec.betas()[k] * (rec.betas()[k + 1] + rec.betas()[k] + prev);
            assert!((lhs - k as f64).abs() < 1e-7 * k as f64, "string relation at {k}: {lhs}");
        }
        assert!(rec.alphas().iter().all(|a| a.abs() < 1e-9));
    }

    #[test]
    fn jacobi_generic_discretization() {
        let w = WeightSpec::generic(Interval::new(-1.0, 1.0).unwrap(), |y: f64| {
            (1.0 - y).sqrt() * (1.0 + y).sqrt()
        });
        let rec = stieltjes_recurrence(&w, 10, &Discretization::default()).unwrap();
        let exact = classical_recurrence(&WeightSpec::jacobi(0.5, 0.5).unwrap(), 10).unwrap();
        for k in 0..=10 {
            let db = (rec.betas()[k] - exact.betas()[k]).abs() / exact.betas()[k];
            assert!(db < 1e-9, "k={k}: {db}");
        }
    }

    #[test]
    fn divergent_weight_is_rejected() {
        let w = WeightSpec::generic(Interval::half_line(), |y: f64| 1.0 / (1.0 + y * y));
        let r = stieltjes_recurrence(&w, 6, &Discretization::default());
        assert!(matches!(r, Err(CoreError::MomentDivergence(_))));
    }

    #[test]
    fn discrete_measure_too_small_is_rejected() {
        let r = stieltjes_from_discrete(&[0.0, 1.0], &[0.5, 0.5], 3);
        assert!(matches!(r, Err(CoreError::ParameterOutOfRange(_))));
    }

    #[test]
    fn discrete_two_point_recurrence() {
        // Symmetric two-point measure at +-1: alpha_0 = 0, beta_1 = 1.
        let (a, b) = stieltjes_from_discrete(&[-1.0, 1.0], &[0.5, 0.5], 2).unwrap();
        assert!(a[0].abs() < 1e-15);
        assert!((b[0] - 1.0).abs() < 1e-15);
        assert!((b[1] - 1.0).abs() < 1e-15);
    }
}
