//! Orthonormal polynomial systems: weight descriptions, three-term
//! recurrences (closed-form and discretized), Gauss rules, and the
//! Christoffel-sum diagnostics.

pub mod stieltjes;
pub mod tridiag;

use std::fmt;
use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::special::gamma;

/// Open interval with optionally infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(CoreError::ParameterOutOfRange(format!(
                "invalid interval ({lo}, {hi})"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn half_line() -> Self {
        Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        y > self.lo && y < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Weight family over its canonical interval.
#[derive(Clone)]
pub enum Family {
    /// exp(-y^2) on the real line.
    Hermite,
    /// y^alpha exp(-y) on (0, inf).
    Laguerre { alpha: f64 },
    /// (1-y)^alpha (1+y)^beta on (-1, 1).
    Jacobi { alpha: f64, beta: f64 },
    /// exp(-y^exponent) on the real line, even exponent.
    Freud { exponent: u32 },
    /// y^alpha exp(-scale*y) on (0, inf).
    ScaledLaguerre { alpha: f64, scale: f64 },
    /// Caller-supplied evaluator.
    Generic {
        eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Hermite => write!(f, "Hermite"),
            Family::Laguerre { alpha } => write!(f, "Laguerre {{ alpha: {alpha} }}"),
            Family::Jacobi { alpha, beta } => {
                write!(f, "Jacobi {{ alpha: {alpha}, beta: {beta} }}")
            }
            Family::Freud { exponent } => write!(f, "Freud {{ exponent: {exponent} }}"),
            Family::ScaledLaguerre { alpha, scale } => {
                write!(f, "ScaledLaguerre {{ alpha: {alpha}, scale: {scale} }}")
            }
            Family::Generic { .. } => write!(f, "Generic"),
        }
    }
}

/// A weight function together with its support interval.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub family: Family,
    pub interval: Interval,
}

impl WeightSpec {
    pub fn hermite() -> Self {
        WeightSpec {
            family: Family::Hermite,
            interval: Interval::real_line(),
        }
    }

    pub fn laguerre(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(CoreError::ParameterOutOfRange(format!(
                "Laguerre exponent must exceed -1, got {alpha}"
            )));
        }
        Ok(WeightSpec {
            family: Family::Laguerre { alpha },
            interval: Interval::half_line(),
        })
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) || !(beta > -1.0) {
            return Err(CoreError::ParameterOutOfRange(format!(
                "Jacobi exponents must exceed -1, got ({alpha}, {beta})"
            )));
        }
        Ok(WeightSpec {
            family: Family::Jacobi { alpha, beta },
            interval: Interval::new(-1.0, 1.0)?,
        })
    }

    pub fn freud(exponent: u32) -> Result<Self> {
        if exponent < 2 || exponent % 2 != 0 {
            return Err(CoreError::ParameterOutOfRange(format!(
                "Freud exponent must be even and at least 2, got {exponent}"
            )));
        }
        Ok(WeightSpec {
            family: Family::Freud { exponent },
            interval: Interval::real_line(),
        })
    }

    pub fn scaled_laguerre(alpha: f64, scale: f64) -> Result<Self> {
        if !(alpha > -1.0) || !(scale > 0.0) {
            return Err(CoreError::ParameterOutOfRange(format!(
                "scaled Laguerre needs alpha > -1 and scale > 0, got ({alpha}, {scale})"
            )));
        }
        Ok(WeightSpec {
            family: Family::ScaledLaguerre { alpha, scale },
            interval: Interval::half_line(),
        })
    }

    pub fn generic<F>(interval: Interval, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WeightSpec {
            family: Family::Generic {
                eval: Arc::new(eval),
            },
            interval,
        }
    }

    /// Weight value at `y`; zero outside the support interval.
    pub fn eval(&self, y: f64) -> f64 {
        if !self.interval.contains(y) {
            return 0.0;
        }
        match &self.family {
            Family::Hermite => (-y * y).exp(),
            Family::Laguerre { alpha } => y.powf(*alpha) * (-y).exp(),
            Family::Jacobi { alpha, beta } => (1.0 - y).powf(*alpha) * (1.0 + y).powf(*beta),
            Family::Freud { exponent } => (-y.powi(*exponent as i32)).exp(),
            Family::ScaledLaguerre { alpha, scale } => y.powf(*alpha) * (-scale * y).exp(),
            Family::Generic { eval } => eval(y),
        }
    }
}

/// Three-term recurrence of an orthonormal polynomial system, stored as the
/// monic coefficient pairs (alpha_k, beta_k) with beta_0 equal to the total
/// mass of the weight.
#[derive(Debug, Clone)]
pub struct Recurrence {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    interval: Interval,
}

impl Recurrence {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>, interval: Interval) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(CoreError::ParameterOutOfRange(format!(
                "recurrence needs matching nonempty coefficient vectors, got {} and {}",
                alpha.len(),
                beta.len()
            )));
        }
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(CoreError::ParameterOutOfRange(
                "recurrence alpha coefficients must be finite".into(),
            ));
        }
        if beta.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
            return Err(CoreError::ParameterOutOfRange(
                "recurrence beta coefficients must be positive and finite".into(),
            ));
        }
        Ok(Recurrence {
            alpha,
            beta,
            interval,
        })
    }

    /// Recurrence of the Gaussian weight c*exp(-rate^2 (y-center)^2).
    pub fn gaussian(amplitude: f64, rate: f64, center: f64, pairs: usize) -> Result<Self> {
        if !(amplitude > 0.0) || !(rate > 0.0) || pairs == 0 {
            return Err(CoreError::ParameterOutOfRange(
                "gaussian recurrence needs positive amplitude, rate, pairs".into(),
            ));
        }
        let alpha = vec![center; pairs];
        let mut beta = Vec::with_capacity(pairs);
        beta.push(amplitude * std::f64::consts::PI.sqrt() / rate);
        for k in 1..pairs {
            beta.push(k as f64 / (2.0 * rate * rate));
        }
        Recurrence::new(alpha, beta, Interval::real_line())
    }

    pub fn pairs(&self) -> usize {
        self.alpha.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[f64] {
        &self.beta
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Total mass of the underlying weight.
    pub fn mass(&self) -> f64 {
        self.beta[0]
    }

    /// Same polynomials against the weight multiplied by `factor`.
    pub fn with_scaled_mass(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(CoreError::ParameterOutOfRange(format!(
                "mass scale must be positive and finite, got {factor}"
            )));
        }
        let mut beta = self.beta.clone();
        beta[0] *= factor;
        Recurrence::new(self.alpha.clone(), beta, self.interval)
    }

    /// Values p_0(y), ..., p_n(y) of the orthonormal polynomials.
    pub fn eval_orthonormal(&self, n: usize, y: f64) -> Result<Vec<f64>> {
        if n >= self.pairs() {
            return Err(CoreError::DegreeOutOfRange {
                requested: n,
                available: self.pairs(),
            });
        }
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = 0.0f64;
        let mut cur = 1.0 / self.beta[0].sqrt();
        out.push(cur);
        for k in 0..n {
            let next =
                ((y - self.alpha[k]) * cur - self.beta[k].sqrt() * prev) / self.beta[k + 1].sqrt();
            prev = cur;
            cur = next;
            out.push(cur);
        }
        Ok(out)
    }

    /// Ratio of leading coefficients gamma_k / gamma_{k+1}.
    pub fn leading_ratio(&self, k: usize) -> Result<f64> {
        if k + 1 >= self.pairs() {
            return Err(CoreError::DegreeOutOfRange {
                requested: k + 1,
                available: self.pairs(),
            });
        }
        Ok(self.beta[k + 1].sqrt())
    }

    /// n-point Gauss rule for the underlying weight.
    pub fn gauss_rule(&self, n: usize) -> Result<QuadratureRule> {
        if n == 0 || n > self.pairs() {
            return Err(CoreError::DegreeOutOfRange {
                requested: n,
                available: self.pairs(),
            });
        }
        let diag = &self.alpha[..n];
        let off: Vec<f64> = self.beta[1..n].iter().map(|b| b.sqrt()).collect();
        let eig = tridiag::eigen_tridiagonal(diag, &off)?;
        let weights: Vec<f64> = eig
            .first_row
            .iter()
            .map(|z| self.beta[0] * z * z)
            .collect();
        QuadratureRule::new(eig.values, weights, self.interval)
    }

    /// Power moments of the underlying weight, computed from the Jacobi
    /// matrix. Exact (up to roundoff) for orders below twice the stored
    /// pair count.
    pub fn moments(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if count > 2 * self.pairs() {
            return Err(CoreError::DegreeOutOfRange {
                requested: count,
                available: 2 * self.pairs(),
            });
        }
        let n = self.pairs();
        let mut v = vec![0.0f64; n];
        v[0] = 1.0;
        let mut out = Vec::with_capacity(count);
        out.push(self.beta[0]);
        let mut next = vec![0.0f64; n];
        for _ in 1..count {
            for i in 0..n {
                let mut acc = self.alpha[i] * v[i];
                if i > 0 {
                    acc += self.beta[i].sqrt() * v[i - 1];
                }
                if i + 1 < n {
                    acc += self.beta[i + 1].sqrt() * v[i + 1];
                }
                next[i] = acc;
            }
            std::mem::swap(&mut v, &mut next);
            out.push(self.beta[0] * v[0]);
        }
        Ok(out)
    }
}

/// Gauss quadrature rule: ascending nodes with positive weights.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: Interval,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, interval: Interval) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(CoreError::ParameterOutOfRange(
                "quadrature rule needs matching nonempty node and weight vectors".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CoreError::ParameterOutOfRange(
                "quadrature nodes must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(CoreError::ParameterOutOfRange(
                "quadrature weights must be nonnegative".into(),
            ));
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            interval,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(y, w)| w * f(*y))
            .sum()
    }
}

/// Closed-form recurrence coefficients for the classical families.
pub fn classical_recurrence(w: &WeightSpec, n_max: usize) -> Result<Recurrence> {
    let pairs = n_max + 1;
    let (alpha, beta) = match &w.family {
        Family::Hermite => {
            let alpha = vec![0.0; pairs];
            let mut beta = Vec::with_capacity(pairs);
            beta.push(std::f64::consts::PI.sqrt());
            for k in 1..pairs {
                beta.push(k as f64 / 2.0);
            }
            (alpha, beta)
        }
        Family::Laguerre { alpha: a } => laguerre_coeffs(*a, 1.0, pairs),
        Family::ScaledLaguerre { alpha: a, scale } => laguerre_coeffs(*a, *scale, pairs),
        Family::Jacobi { alpha: a, beta: b } => jacobi_coeffs(*a, *b, pairs),
        Family::Freud { .. } | Family::Generic { .. } => {
            return Err(CoreError::ParameterOutOfRange(
                "no closed-form recurrence for this family; use the discretized path".into(),
            ))
        }
    };
    Recurrence::new(alpha, beta, w.interval)
}

fn laguerre_coeffs(a: f64, s: f64, pairs: usize) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = Vec::with_capacity(pairs);
    let mut beta = Vec::with_capacity(pairs);
    for k in 0..pairs {
        let kf = k as f64;
        alpha.push((2.0 * kf + a + 1.0) / s);
        if k == 0 {
            beta.push(gamma(a + 1.0) / s.powf(a + 1.0));
        } else {
            beta.push(kf * (kf + a) / (s * s));
        }
    }
    (alpha, beta)
}

fn jacobi_coeffs(a: f64, b: f64, pairs: usize) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = Vec::with_capacity(pairs);
    let mut beta = Vec::with_capacity(pairs);
    for k in 0..pairs {
        let kf = k as f64;
        if k == 0 {
            alpha.push((b - a) / (a + b + 2.0));
            beta.push(2f64.powf(a + b + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0));
        } else {
            let s = 2.0 * kf + a + b;
            alpha.push((b * b - a * a) / (s * (s + 2.0)));
            if k == 1 {
                beta.push(4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b)));
            } else {
                beta.push(
                    4.0 * kf * (kf + a) * (kf + b) * (kf + a + b)
                        / (s * s * (s + 1.0) * (s - 1.0)),
                );
            }
        }
    }
    (alpha, beta)
}

/// Lemma-style diagnostic pair: Gamma_n (max leading-coefficient ratio) and
/// Lambda_n (sup of the rho-damped Christoffel sum on the grid).
#[derive(Debug, Clone, Copy)]
pub struct GammaLambda {
    pub gamma: f64,
    pub lambda: f64,
    pub ratio: f64,
}

/// Computes the diagnostic pair for degree `n`. The grid must resolve the
/// sup: if the Christoffel sum varies more than 10% between the maximizing
/// grid point and its neighbors the grid is rejected.
pub fn gamma_lambda<W, R>(
    rec: &Recurrence,
    w: W,
    rho: R,
    n: usize,
    grid: &[f64],
) -> Result<GammaLambda>
where
    W: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    if grid.len() < 3 {
        return Err(CoreError::ParameterOutOfRange(
            "gamma_lambda needs at least 3 grid points".into(),
        ));
    }
    if n + 2 > rec.pairs() {
        return Err(CoreError::DegreeOutOfRange {
            requested: n,
            available: rec.pairs(),
        });
    }
    let mut gamma_max = 0.0f64;
    for k in 0..=n {
        gamma_max = gamma_max.max(rec.leading_ratio(k)?);
    }
    let mut vals = Vec::with_capacity(grid.len());
    for &x in grid {
        let p = rec.eval_orthonormal(n, x)?;
        let christoffel: f64 = p.iter().map(|v| v * v).sum();
        vals.push(w(x) * rho(x) * christoffel);
    }
    let (imax, &lambda) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    let mut variation = 0.0f64;
    if imax > 0 {
        variation = variation.max((lambda - vals[imax - 1]).abs() / lambda.max(1e-300));
    }
    if imax + 1 < vals.len() {
        variation = variation.max((lambda - vals[imax + 1]).abs() / lambda.max(1e-300));
    }
    if variation > 0.10 {
        return Err(CoreError::GridTooCoarse {
            variation: variation * 100.0,
        });
    }
    Ok(GammaLambda {
        gamma: gamma_max,
        lambda,
        ratio: gamma_max * lambda / (n.max(1) as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre() -> Recurrence {
        classical_recurrence(&WeightSpec::jacobi(0.0, 0.0).unwrap(), 24).unwrap()
    }

    #[test]
    fn legendre_recurrence_values() {
        let rec = legendre();
        assert!((rec.mass() - 2.0).abs() < 1e-14);
        assert!((rec.betas()[1] - 1.0 / 3.0).abs() < 1e-14);
        assert!((rec.betas()[2] - 4.0 / 15.0).abs() < 1e-14);
        assert!(rec.alphas().iter().all(|a| a.abs() < 1e-14));
    }

    #[test]
    fn legendre_orthonormal_value() {
        // P_2(y) = (3y^2-1)/2, norm^2 = 2/5, so p_2(0.5) = -0.125*sqrt(5/2).
        let rec = legendre();
        let p = rec.eval_orthonormal(2, 0.5).unwrap();
        let want = -0.125 * (2.5f64).sqrt();
        assert!((p[2] - want).abs() < 1e-14, "got {} want {want}", p[2]);
        assert!((p[0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hermite_orthonormal_matches_normalized_hermite() {
        let rec = classical_recurrence(&WeightSpec::hermite(), 6).unwrap();
        // p_1(y) = sqrt(2) y / pi^{1/4}
        let p = rec.eval_orthonormal(1, 0.7).unwrap();
        let want = 2f64.sqrt() * 0.7 / std::f64::consts::PI.powf(0.25);
        assert!((p[1] - want).abs() < 1e-14);
    }

    #[test]
    fn chebyshev_u_mass_is_half_pi() {
        let rec = classical_recurrence(&WeightSpec::jacobi(0.5, 0.5).unwrap(), 10).unwrap();
        assert!((rec.mass() - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
        for k in 1..=10 {
            assert!((rec.betas()[k] - 0.25).abs() < 1e-13);
        }
    }

    #[test]
    fn gauss_laguerre_two_point_table() {
        let rec = classical_recurrence(&WeightSpec::laguerre(0.0).unwrap(), 4).unwrap();
        let rule = rec.gauss_rule(2).unwrap();
        let s2 = 2f64.sqrt();
        assert!((rule.nodes[0] - (2.0 - s2)).abs() < 1e-13);
        assert!((rule.nodes[1] - (2.0 + s2)).abs() < 1e-13);
        assert!((rule.weights[0] - (2.0 + s2) / 4.0).abs() < 1e-13);
        assert!((rule.weights[1] - (2.0 - s2) / 4.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_hermite_two_point_table() {
        let rec = classical_recurrence(&WeightSpec::hermite(), 4).unwrap();
        let rule = rec.gauss_rule(2).unwrap();
        let x = std::f64::consts::FRAC_1_SQRT_2;
        let w = std::f64::consts::PI.sqrt() / 2.0;
        assert!((rule.nodes[0] + x).abs() < 1e-14);
        assert!((rule.nodes[1] - x).abs() < 1e-14);
        assert!((rule.weights[0] - w).abs() < 1e-14);
        assert!((rule.weights[1] - w).abs() < 1e-14);
    }

    #[test]
    fn scaled_laguerre_matches_substitution() {
        // For w = e^{-3y}: mass 1/3, int y w = 1/9.
        let rec =
            classical_recurrence(&WeightSpec::scaled_laguerre(0.0, 3.0).unwrap(), 6).unwrap();
        let m = rec.moments(4).unwrap();
        assert!((m[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((m[1] - 1.0 / 9.0).abs() < 1e-14);
        assert!((m[2] - 2.0 / 27.0).abs() < 1e-14);
    }

    #[test]
    fn moments_match_analytic_hermite() {
        let rec = classical_recurrence(&WeightSpec::hermite(), 8).unwrap();
        let m = rec.moments(7).unwrap();
        let spi = std::f64::consts::PI.sqrt();
        let want = [spi, 0.0, spi / 2.0, 0.0, 0.75 * spi, 0.0, 1.875 * spi];
        for (got, want) in m.iter().zip(want) {
            assert!((got - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn gauss_rule_integrates_moments_exactly() {
        let rec = classical_recurrence(&WeightSpec::laguerre(1.5).unwrap(), 12).unwrap();
        let rule = rec.gauss_rule(8).unwrap();
        let m = rec.moments(16).unwrap();
        for (j, want) in m.iter().enumerate() {
            let got = rule.integrate(|y| y.powi(j as i32));
            assert!(
                (got - want).abs() < 1e-10 * want.abs().max(1.0),
                "moment {j}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn gaussian_recurrence_shifted_center() {
        // w = exp(-2(y-1)^2): mass sqrt(pi/2), centered moments scale as k/4.
        let rec = Recurrence::gaussian(1.0, 2f64.sqrt(), 1.0, 6).unwrap();
        assert!((rec.mass() - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-14);
        let m = rec.moments(2).unwrap();
        assert!((m[1] / m[0] - 1.0).abs() < 1e-13);
        let rule = rec.gauss_rule(6).unwrap();
        let got = rule.integrate(|y| (y - 1.0).powi(2));
        assert!((got / rec.mass() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn orthonormality_under_own_gauss_rule() {
        let rec = classical_recurrence(&WeightSpec::jacobi(0.5, 0.5).unwrap(), 20).unwrap();
        let rule = rec.gauss_rule(20).unwrap();
        for i in 0..=9 {
            for j in 0..=9 {
                let mut acc = 0.0;
                for (y, w) in rule.nodes.iter().zip(&rule.weights) {
                    let p = rec.eval_orthonormal(9, *y).unwrap();
                    acc += w * p[i] * p[j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((acc - want).abs() < 1e-12, "({i},{j}) -> {acc}");
            }
        }
    }

    #[test]
    fn degree_errors_are_reported() {
        let rec = classical_recurrence(&WeightSpec::hermite(), 3).unwrap();
        assert!(matches!(
            rec.eval_orthonormal(4, 0.0),
            Err(CoreError::DegreeOutOfRange { .. })
        ));
        assert!(matches!(
            rec.gauss_rule(5),
            Err(CoreError::DegreeOutOfRange { .. })
        ));
    }

    #[test]
    fn gamma_lambda_legendre_diagnostic() {
        // Damping rho = sqrt(1-x^2) keeps the Christoffel sum flat.
        let rec = legendre();
        let grid: Vec<f64> = (0..=4000).map(|i| -0.999 + 1.998 * i as f64 / 4000.0).collect();
        let gl = gamma_lambda(&rec, |_| 1.0, |x| (1.0 - x * x).sqrt(), 12, &grid).unwrap();
        assert!(gl.gamma > 0.0 && gl.lambda > 0.0);
        assert!(gl.ratio < 1.0, "ratio {}", gl.ratio);
    }

    #[test]
    fn gamma_lambda_rejects_coarse_grid() {
        let rec = legendre();
        // Without damping the sum blows up near the endpoints and a coarse
        // grid cannot resolve the sup.
        let grid: Vec<f64> = (0..=8).map(|i| -0.9999 + 1.9998 * i as f64 / 8.0).collect();
        let r = gamma_lambda(&rec, |_| 1.0, |_| 1.0, 16, &grid);
        assert!(matches!(r, Err(CoreError::GridTooCoarse { .. })));
    }

    #[test]
    fn gamma_frozen_values_for_the_gaussian_weight() {
        let rec = classical_recurrence(&WeightSpec::hermite(), 8).unwrap();
        let grid: Vec<f64> = (0..=2000).map(|i| -7.0 + 14.0 * i as f64 / 2000.0).collect();
        let w = |y: f64| (-y * y).exp();
        let gl = gamma_lambda(&rec, w, |_| 1.0, 3, &grid).unwrap();
        assert!((gl.gamma - 2f64.sqrt()).abs() < 1e-12, "gamma {}", gl.gamma);
        let gl0 = gamma_lambda(&rec, w, |_| 1.0, 0, &grid).unwrap();
        assert!((gl0.gamma - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn jacobi_damped_ratio_stays_bounded_in_degree() {
        let rec = classical_recurrence(&WeightSpec::jacobi(0.0, 0.0).unwrap(), 66).unwrap();
        // Arccos-spaced grid: the damped sum oscillates on a uniform angular
        // scale, so uniform x spacing under-resolves it near the endpoints.
        let grid: Vec<f64> = (0..=6000)
            .map(|i| (0.04 + (std::f64::consts::PI - 0.08) * i as f64 / 6000.0).cos())
            .collect();
        for n in [4usize, 8, 16, 32, 64] {
            let gl = gamma_lambda(&rec, |_| 1.0, |x| (1.0 - x * x).sqrt(), n, &grid).unwrap();
            assert!(gl.ratio < 1.0, "n = {n}: ratio {}", gl.ratio);
        }
    }
}
