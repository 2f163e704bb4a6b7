//! Summability means, weighted norms, best-approximation proxies, and the
//! convergence experiment harness.

use std::time::Instant;

use num_complex::Complex64;

use crate::chromatic::ChromaticBasis;
use crate::dyadic::DyadicGrid;
use crate::error::{CoreError, Result};
use crate::kernels::{transform, Kernel, Point, QuadSpec};
use crate::orthopoly::stieltjes::stieltjes_from_discrete;
use crate::orthopoly::{Interval, Recurrence, WeightSpec};
use crate::quad::{gauss_legendre, panel_mesh, AdaptiveSpec, Panel};

/// Summability scheme for truncating an orthogonal series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummMode {
    /// Plain partial sum through degree n.
    Partial,
    /// Cesaro mean of the first n partial sums.
    Cesaro,
    /// de la Vallee Poussin mean 2*sigma_{2n} - sigma_n.
    Dvp,
}

/// Multipliers mu_j applied to coefficients c_j; entries beyond the vector
/// are zero. Partial: ones through n. Cesaro: (n-j)/n for j < n.
/// Dvp: 1 for j <= n, (2n-j)/n for n < j <= 2n-1.
pub fn summability_multipliers(n: usize, mode: SummMode) -> Result<Vec<f64>> {
    match mode {
        SummMode::Partial => Ok(vec![1.0; n + 1]),
        SummMode::Cesaro => {
            if n == 0 {
                return Err(CoreError::ParameterOutOfRange(
                    "cesaro mean needs n >= 1".into(),
                ));
            }
            Ok((0..n).map(|j| (n - j) as f64 / n as f64).collect())
        }
        SummMode::Dvp => {
            if n == 0 {
                return Err(CoreError::ParameterOutOfRange(
                    "de la Vallee Poussin mean needs n >= 1".into(),
                ));
            }
            let mut mu = vec![1.0; 2 * n];
            for (j, slot) in mu.iter_mut().enumerate().take(2 * n).skip(n + 1) {
                *slot = (2 * n - j) as f64 / n as f64;
            }
            Ok(mu)
        }
    }
}

/// Quadrature window for x- or y-side norms: `panels` composite
/// Gauss-Legendre panels of `order` points, with optional geometric grading
/// toward either end (for integrable endpoint singularities).
#[derive(Debug, Clone, Copy)]
pub struct NormGrid {
    pub lo: f64,
    pub hi: f64,
    pub panels: usize,
    pub order: usize,
    pub grade_lo: bool,
    pub grade_hi: bool,
}

impl NormGrid {
    pub fn plain(lo: f64, hi: f64, panels: usize, order: usize) -> Self {
        NormGrid {
            lo,
            hi,
            panels,
            order,
            grade_lo: false,
            grade_hi: false,
        }
    }

    pub fn mesh(&self) -> Vec<Panel> {
        panel_mesh(
            self.lo,
            self.hi,
            self.panels,
            self.grade_lo,
            self.grade_hi,
            40,
        )
    }

    /// Quadrature nodes and weights of the composite rule.
    pub fn nodes_weights(&self) -> (Vec<f64>, Vec<f64>) {
        let rule = gauss_legendre(self.order);
        let mesh = self.mesh();
        let mut nodes = Vec::with_capacity(mesh.len() * self.order);
        let mut weights = Vec::with_capacity(mesh.len() * self.order);
        for p in &mesh {
            let c = 0.5 * (p.lo + p.hi);
            let hl = 0.5 * (p.hi - p.lo);
            for (t, w) in rule.0.iter().zip(&rule.1) {
                nodes.push(c + hl * t);
                weights.push(hl * w);
            }
        }
        (nodes, weights)
    }
}

/// Weighted L^p norm with the weight as a density:
/// (int |h|^p weight)^(1/p); for p = infinity the weighted sup
/// sup |h|*weight over the grid nodes.
pub fn weighted_norm<H, W>(h: H, weight: W, p: f64, grid: &NormGrid) -> Result<f64>
where
    H: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    check_exponent(p)?;
    let (nodes, weights) = grid.nodes_weights();
    if p.is_infinite() {
        let mut sup = 0.0f64;
        for y in nodes {
            sup = sup.max(h(y).abs() * weight(y));
        }
        for panel in grid.mesh() {
            for y in [panel.lo, panel.hi] {
                let v = h(y).abs() * weight(y);
                if v.is_finite() {
                    sup = sup.max(v);
                }
            }
        }
        return Ok(sup);
    }
    let mut acc = 0.0;
    for (y, w) in nodes.iter().zip(&weights) {
        acc += w * h(*y).abs().powf(p) * weight(*y);
    }
    Ok(acc.max(0.0).powf(1.0 / p))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(CoreError::ParameterOutOfRange(format!(
            "exponent must lie in [1, inf], got {p}"
        )));
    }
    Ok(())
}

/// Polynomial in an orthonormal basis attached to a discrete measure. The
/// representation stays well conditioned at degrees where a monomial basis
/// would not.
#[derive(Debug, Clone)]
pub struct DiscretePoly {
    rec: Recurrence,
    coeffs: Vec<f64>,
}

impl DiscretePoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients against the internal orthonormal basis.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        let p = self.rec.eval_orthonormal(self.degree(), y)?;
        Ok(p.iter().zip(&self.coeffs).map(|(a, c)| a * c).sum())
    }
}

/// Near-best approximation result: the error value, the polynomial that
/// attains it, and whether the iteration met its tolerance. A false flag
/// reports the last iterate instead of failing.
#[derive(Debug, Clone)]
pub struct EnProxy {
    pub value: f64,
    pub poly: DiscretePoly,
    pub converged: bool,
}

/// Best-approximation error of degree n with the weight multiplying the
/// error: inf over polynomials P of ||(g - P) * weight||_p. p = 2 solves
/// the least-squares problem directly; other exponents run iteratively
/// reweighted least squares on the grid (Lawson's variant for p = inf).
/// The grid is densified if it carries fewer than 10(n+1) nodes.
pub fn en_proxy<G, W>(g: G, weight: W, p: f64, n: usize, grid: &NormGrid) -> Result<EnProxy>
where
    G: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let mut grid = *grid;
    while grid.panels * grid.order < 10 * (n + 1) {
        grid.panels *= 2;
    }
    let (nodes, weights) = grid.nodes_weights();
    en_proxy_on_nodes(&g, &weight, p, n, &nodes, &weights)
}

/// `en_proxy` on an explicit quadrature (nodes, weights) pair, for measures
/// that are not panel meshes (dyadic cells in particular).
pub fn en_proxy_on_nodes<G, W>(
    g: &G,
    weight: &W,
    p: f64,
    n: usize,
    nodes: &[f64],
    quad_weights: &[f64],
) -> Result<EnProxy>
where
    G: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    check_exponent(p)?;
    if nodes.len() != quad_weights.len() {
        return Err(CoreError::ParameterOutOfRange(format!(
            "{} nodes against {} quadrature weights",
            nodes.len(),
            quad_weights.len()
        )));
    }
    if nodes.len() < 10 * (n + 1) {
        return Err(CoreError::ParameterOutOfRange(format!(
            "degree {n} needs at least {} grid points, got {}",
            10 * (n + 1),
            nodes.len()
        )));
    }
    let gv: Vec<f64> = nodes.iter().map(|y| g(*y)).collect();
    let wv: Vec<f64> = nodes.iter().map(|y| weight(*y)).collect();
    if gv.iter().chain(&wv).any(|v| !v.is_finite()) {
        return Err(CoreError::DomainViolation(
            "g or weight is not finite on the approximation grid".into(),
        ));
    }
    if wv.iter().any(|v| *v < 0.0) {
        return Err(CoreError::ParameterOutOfRange(
            "approximation weight must be nonnegative".into(),
        ));
    }

    let objective = |resid: &[f64]| -> f64 {
        if p.is_infinite() {
            resid
                .iter()
                .zip(&wv)
                .fold(0.0f64, |m, (r, w)| m.max(r.abs() * w))
        } else {
            let acc: f64 = resid
                .iter()
                .zip(&wv)
                .zip(quad_weights)
                .map(|((r, w), q)| q * (r.abs() * w).powf(p))
                .sum();
            acc.max(0.0).powf(1.0 / p)
        }
    };

    let scale = gv
        .iter()
        .zip(&wv)
        .fold(0.0f64, |m, (g, w)| m.max((g * w).abs()))
        + f64::MIN_POSITIVE;
    let rfloor = 1e-14 * scale;

    // Lawson multipliers for p = inf; untouched otherwise.
    let mut lawson: Vec<f64> = quad_weights.to_vec();
    let mut u = vec![0.0f64; nodes.len()];
    let seed_u = |u: &mut Vec<f64>| {
        for i in 0..nodes.len() {
            let wp = if p.is_infinite() {
                wv[i] * wv[i]
            } else {
                wv[i].powf(p)
            };
            u[i] = quad_weights[i] * wp;
        }
    };
    seed_u(&mut u);

    let max_iter = if (p - 2.0).abs() < 1e-15 { 1 } else { 50 };
    let mut last: Option<(DiscretePoly, f64)> = None;
    let mut converged = false;
    for iter in 0..max_iter {
        let solved = weighted_ls(nodes, &u, &gv, n);
        let (poly, resid) = match solved {
            Ok(v) => v,
            Err(e) => {
                // A collapsed reweighting measure reports the last iterate.
                if let Some((poly, value)) = last {
                    return Ok(EnProxy {
                        value,
                        poly,
                        converged: false,
                    });
                }
                return Err(e);
            }
        };
        let value = objective(&resid);
        if let Some((_, prev)) = &last {
            if (value - prev).abs() <= 1e-10 * (1.0 + value.abs()) {
                last = Some((poly, value));
                converged = true;
                break;
            }
        }
        last = Some((poly, value));
        if iter + 1 == max_iter {
            break;
        }
        if p.is_infinite() {
            let mut mass = 0.0;
            for i in 0..nodes.len() {
                lawson[i] *= (resid[i].abs() * wv[i]).max(1e-300);
                mass += lawson[i];
            }
            if !(mass > 0.0) {
                break;
            }
            for i in 0..nodes.len() {
                lawson[i] /= mass;
                u[i] = lawson[i] * wv[i] * wv[i];
            }
        } else {
            for i in 0..nodes.len() {
                u[i] = quad_weights[i] * wv[i].powf(p) * resid[i].abs().max(rfloor).powf(p - 2.0);
            }
        }
    }
    let (poly, value) = last.expect("at least one solve ran");
    Ok(EnProxy {
        value,
        poly,
        converged: converged || max_iter == 1,
    })
}

/// Least-squares fit of degree n under the discrete measure u: orthonormal
/// basis by the discrete Stieltjes pass, coefficients by projection.
/// Returns the polynomial and the per-node residual g - P.
fn weighted_ls(
    nodes: &[f64],
    u: &[f64],
    gv: &[f64],
    n: usize,
) -> Result<(DiscretePoly, Vec<f64>)> {
    let (alpha, beta) = stieltjes_from_discrete(nodes, u, n + 2)?;
    let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let rec = Recurrence::new(alpha, beta, Interval::new(lo - 1.0, hi + 1.0)?)?;
    let mut coeffs = vec![0.0f64; n + 1];
    let mut table = Vec::with_capacity(nodes.len());
    for (i, y) in nodes.iter().enumerate() {
        let pv = rec.eval_orthonormal(n, *y)?;
        for (c, p) in coeffs.iter_mut().zip(&pv) {
            *c += u[i] * gv[i] * p;
        }
        table.push(pv);
    }
    let resid: Vec<f64> = table
        .iter()
        .zip(gv)
        .map(|(pv, g)| g - pv.iter().zip(&coeffs).map(|(p, c)| p * c).sum::<f64>())
        .collect();
    Ok((DiscretePoly { rec, coeffs }, resid))
}

/// Auxiliary weight factors appearing in the error norms: closed family
/// instead of arbitrary closures so configs stay printable and comparable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuxWeight {
    One,
    /// (s y / (1 + s y))^a * (1 + s y)^b
    BoundedRatio { a: f64, b: f64, scale: f64 },
    /// (s y)^a
    PowerScaled { a: f64, scale: f64 },
    /// (1 + x)^c * x^d
    PowerTail { c: f64, d: f64 },
    /// (1 - y^2)^e, zero outside (-1, 1)
    JacobiFactor { e: f64 },
}

impl AuxWeight {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            AuxWeight::One => 1.0,
            AuxWeight::BoundedRatio { a, b, scale } => {
                let s = scale * t;
                (s / (1.0 + s)).powf(*a) * (1.0 + s).powf(*b)
            }
            AuxWeight::PowerScaled { a, scale } => (scale * t).powf(*a),
            AuxWeight::PowerTail { c, d } => (1.0 + t).powf(*c) * t.powf(*d),
            AuxWeight::JacobiFactor { e } => {
                let v = 1.0 - t * t;
                if v <= 0.0 {
                    0.0
                } else {
                    v.powf(*e)
                }
            }
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            AuxWeight::One => true,
            AuxWeight::BoundedRatio { a, b, .. } => *a == 0.0 && *b == 0.0,
            AuxWeight::PowerScaled { a, .. } => *a == 0.0,
            AuxWeight::PowerTail { c, d } => *c == 0.0 && *d == 0.0,
            AuxWeight::JacobiFactor { e } => *e == 0.0,
        }
    }
}

/// Free parameters of the weighted-norm inequalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremParams {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl Default for TheoremParams {
    fn default() -> Self {
        TheoremParams {
            a: 0.0,
            b: 0.0,
            delta: 0.01,
            epsilon: 0.02,
        }
    }
}

/// Weight pair (omega on the transform side, rho on the x side) for the
/// bounded-ratio family over the half line. Needs 0 <= b <= a < 1/p'; the
/// q < p branch additionally needs 0 < delta < epsilon.
pub fn theorem3_weights(
    p: f64,
    q: f64,
    x0: f64,
    tp: &TheoremParams,
) -> Result<(AuxWeight, AuxWeight)> {
    check_exponent(p)?;
    check_exponent(q)?;
    let inv_pp = 1.0 - 1.0 / p;
    if !(0.0 <= tp.b && tp.b <= tp.a && tp.a < inv_pp) {
        return Err(CoreError::ParameterInfeasible(format!(
            "need 0 <= b <= a < 1/p' = {inv_pp}, got a = {}, b = {}",
            tp.a, tp.b
        )));
    }
    let omega = AuxWeight::BoundedRatio {
        a: tp.a,
        b: tp.b,
        scale: 2.0 * x0 + 1.0,
    };
    let rho = if p <= q {
        AuxWeight::PowerTail {
            c: -(tp.a - tp.b) * q,
            d: q * (inv_pp - tp.b) - 1.0,
        }
    } else {
        if !(0.0 < tp.delta && tp.delta < tp.epsilon) {
            return Err(CoreError::ParameterInfeasible(format!(
                "the q < p branch needs 0 < delta < epsilon, got delta = {}, epsilon = {}",
                tp.delta, tp.epsilon
            )));
        }
        AuxWeight::PowerTail {
            c: -(tp.a - tp.b) * q - tp.epsilon,
            d: (tp.a - tp.b) * q - (tp.a * q + 1.0) / p + tp.delta,
        }
    };
    Ok((omega, rho))
}

/// Weight pair for the pure-power family over the half line. The p <= q
/// branch needs b = a in [0, 1/p'); the q < p branch needs
/// 1/q' <= a < 1/p' with b >= 0 and delta > 0.
pub fn theorem4_weights(
    p: f64,
    q: f64,
    x0: f64,
    tp: &TheoremParams,
) -> Result<(AuxWeight, AuxWeight)> {
    check_exponent(p)?;
    check_exponent(q)?;
    let inv_pp = 1.0 - 1.0 / p;
    let scale = 2.0 * x0 + 1.0;
    if p <= q {
        if !(tp.a == tp.b && 0.0 <= tp.a && tp.a < inv_pp) {
            return Err(CoreError::ParameterInfeasible(format!(
                "the p <= q branch needs b = a in [0, 1/p'), got a = {}, b = {}",
                tp.a, tp.b
            )));
        }
        Ok((
            AuxWeight::PowerScaled { a: tp.a, scale },
            AuxWeight::PowerTail {
                c: 0.0,
                d: q * (inv_pp - tp.a) - 1.0,
            },
        ))
    } else {
        let inv_qp = 1.0 - 1.0 / q;
        if !(inv_qp <= tp.a && tp.a < inv_pp && tp.b >= 0.0) {
            return Err(CoreError::ParameterInfeasible(format!(
                "the q < p branch needs 1/q' <= a < 1/p' and b >= 0, got a = {}, b = {}",
                tp.a, tp.b
            )));
        }
        if !(tp.delta > 0.0) {
            return Err(CoreError::ParameterInfeasible(
                "the q < p branch needs delta > 0".into(),
            ));
        }
        Ok((
            AuxWeight::BoundedRatio {
                a: tp.a,
                b: tp.b,
                scale,
            },
            AuxWeight::PowerTail {
                c: 0.0,
                d: ((tp.a - tp.b) * p * q - tp.a * q - 1.0) / p - tp.delta,
            },
        ))
    }
}

/// Closed catalog of transform-side data functions.
#[derive(Debug, Clone, PartialEq)]
pub enum FhatSpec {
    /// e^(-rate y)
    ExpDecay { rate: f64 },
    /// e^(-(y/sigma)^2 / 2)
    Gaussian { sigma: f64 },
    /// Characteristic function of (lo, hi)
    Indicator { lo: f64, hi: f64 },
    /// Power-basis polynomial, lowest degree first
    Poly { coeffs: Vec<f64> },
    /// Polynomial times e^(-rate y)
    PolyExp { coeffs: Vec<f64>, rate: f64 },
    /// Piecewise-linear table, zero outside the abscissa range
    Samples { ys: Vec<f64>, values: Vec<f64> },
}

impl FhatSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FhatSpec::ExpDecay { rate } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return Err(CoreError::ParameterOutOfRange(format!(
                        "decay rate must be positive, got {rate}"
                    )));
                }
            }
            FhatSpec::Gaussian { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(CoreError::ParameterOutOfRange(format!(
                        "gaussian width must be positive, got {sigma}"
                    )));
                }
            }
            FhatSpec::Indicator { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(CoreError::ParameterOutOfRange(format!(
                        "indicator needs finite lo < hi, got ({lo}, {hi})"
                    )));
                }
            }
            FhatSpec::Poly { coeffs } | FhatSpec::PolyExp { coeffs, .. } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(CoreError::ParameterOutOfRange(
                        "polynomial coefficients must be nonempty and finite".into(),
                    ));
                }
                if let FhatSpec::PolyExp { rate, .. } = self {
                    if !(rate.is_finite() && *rate > 0.0) {
                        return Err(CoreError::ParameterOutOfRange(format!(
                            "decay rate must be positive, got {rate}"
                        )));
                    }
                }
            }
            FhatSpec::Samples { ys, values } => {
                if ys.len() != values.len() || ys.len() < 2 {
                    return Err(CoreError::ParameterOutOfRange(
                        "sample table needs matching lengths of at least 2".into(),
                    ));
                }
                if ys.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(CoreError::ParameterOutOfRange(
                        "sample abscissae must increase strictly".into(),
                    ));
                }
                if ys.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(CoreError::ParameterOutOfRange(
                        "sample table entries must be finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            FhatSpec::ExpDecay { rate } => (-rate * y).exp(),
            FhatSpec::Gaussian { sigma } => {
                let t = y / sigma;
                (-0.5 * t * t).exp()
            }
            FhatSpec::Indicator { lo, hi } => {
                if y >= *lo && y < *hi {
                    1.0
                } else {
                    0.0
                }
            }
            FhatSpec::Poly { coeffs } => horner(coeffs, y),
            FhatSpec::PolyExp { coeffs, rate } => horner(coeffs, y) * (-rate * y).exp(),
            FhatSpec::Samples { ys, values } => {
                if y < ys[0] || y > *ys.last().expect("validated nonempty") {
                    return 0.0;
                }
                let idx = match ys.binary_search_by(|v| v.total_cmp(&y)) {
                    Ok(i) => return values[i],
                    Err(i) => i,
                };
                let (y0, y1) = (ys[idx - 1], ys[idx]);
                let t = (y - y0) / (y1 - y0);
                values[idx - 1] * (1.0 - t) + values[idx] * t
            }
        }
    }
}

fn horner(coeffs: &[f64], y: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
}

/// One convergence sweep: kernel, base weight, expansion point, data
/// function, summability mode, exponents (p for the proxy inequality,
/// q for the x-side norm, s for the proxy norm itself), the auxiliary
/// weights, and the norm grids.
#[derive(Debug, Clone)]
pub struct ConvergenceConfig {
    pub kernel: Kernel,
    pub base_weight: WeightSpec,
    pub x0: Point,
    pub fhat: FhatSpec,
    pub degrees: Vec<usize>,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    /// Transform-side factor multiplying sqrt(w_x0) in the proxy weight.
    pub omega: AuxWeight,
    /// x-side density in the L^q error norm.
    pub rho_x: AuxWeight,
    pub mode: SummMode,
    /// None selects the automatic truncation point where rho * |f|^q
    /// falls below 1e-16 of its peak.
    pub x_window: Option<(f64, f64)>,
    pub x_panels: usize,
    pub x_order: usize,
    /// Transform-side grid for the proxy norm (ignored for the dyadic
    /// kernel, whose cells are fixed by the grid parameters).
    pub y_grid: NormGrid,
}

impl ConvergenceConfig {
    pub fn new(
        kernel: Kernel,
        base_weight: WeightSpec,
        x0: Point,
        fhat: FhatSpec,
        degrees: Vec<usize>,
        y_grid: NormGrid,
    ) -> Self {
        ConvergenceConfig {
            kernel,
            base_weight,
            x0,
            fhat,
            degrees,
            p: 2.0,
            q: 2.0,
            s: 2.0,
            omega: AuxWeight::One,
            rho_x: AuxWeight::One,
            mode: SummMode::Dvp,
            x_window: None,
            x_panels: 64,
            x_order: 8,
            y_grid,
        }
    }

    pub fn with_exponents(mut self, p: f64, q: f64, s: f64) -> Self {
        self.p = p;
        self.q = q;
        self.s = s;
        self
    }

    pub fn with_weights(mut self, omega: AuxWeight, rho_x: AuxWeight) -> Self {
        self.omega = omega;
        self.rho_x = rho_x;
        self
    }

    pub fn with_x_window(mut self, lo: f64, hi: f64) -> Self {
        self.x_window = Some((lo, hi));
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent(self.p)?;
        check_exponent(self.q)?;
        check_exponent(self.s)?;
        self.fhat.validate()?;
        if self.degrees.is_empty() {
            return Err(CoreError::ParameterOutOfRange(
                "degree list must not be empty".into(),
            ));
        }
        if self.degrees[0] == 0 {
            return Err(CoreError::ParameterOutOfRange(
                "summability means need degrees of at least 1".into(),
            ));
        }
        if self.degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::ParameterOutOfRange(
                "degree list must increase strictly".into(),
            ));
        }
        if let Some((lo, hi)) = self.x_window {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(CoreError::ParameterOutOfRange(format!(
                    "x window needs finite lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        if self.x_panels == 0 || self.x_order == 0 || self.x_order > 32 {
            return Err(CoreError::ParameterOutOfRange(
                "x resolution needs panels >= 1 and order in 1..=32".into(),
            ));
        }
        if matches!(self.kernel, Kernel::PoissonWavelet { .. }) {
            return Err(CoreError::ParameterInfeasible(
                "half-plane kernels run through the wavelet window sweep, not this harness"
                    .into(),
            ));
        }
        Ok(())
    }

    fn degree_cap(&self) -> usize {
        let top = *self.degrees.last().expect("validated nonempty");
        match self.mode {
            SummMode::Partial => top,
            SummMode::Cesaro => top.saturating_sub(1),
            SummMode::Dvp => 2 * top - 1,
        }
    }
}

/// One degree of the sweep. Wall time is informational and never written
/// to data files.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub n: usize,
    pub lhs_norm: f64,
    pub en_proxy: f64,
    pub ratio: f64,
    pub wall_time_s: f64,
    pub en_converged: bool,
}

/// Sweep result: rows sorted by degree plus the resolved configuration.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub config: ConvergenceConfig,
}

/// Runs the reconstruction-error sweep. For each degree n the summed
/// expansion v_n is compared with the transform of fhat in the weighted
/// L^q norm on the x side, and the best-approximation proxy of
/// fhat / sqrt(w_x0) under the weight sqrt(w_x0) * omega in L^s is
/// recorded alongside, with the ratio of the two.
///
/// The x-side norm is computed three ways: exactly on the dual grid for
/// the dyadic kernel (the transform is an isometry between step
/// functions), on the transform side for the unitary kernel when q = 2
/// and rho is trivial, and by windowed quadrature against reference
/// transform values otherwise.
pub fn convergence_experiment(cfg: &ConvergenceConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let n_cap = cfg.degree_cap();
    let basis = ChromaticBasis::build(
        cfg.kernel,
        std::slice::from_ref(&cfg.base_weight),
        cfg.x0,
        n_cap,
    )?;
    let fhat = cfg.fhat.clone();
    let coeffs = basis.coefficients(|y| Complex64::new(fhat.eval(y), 0.0), n_cap)?;

    let mut rows = Vec::with_capacity(cfg.degrees.len());
    match cfg.kernel {
        Kernel::Walsh { m_int, m_frac } => {
            let lane = WalshLane::prepare(cfg, &basis, &coeffs, m_int, m_frac)?;
            for &n in &cfg.degrees {
                let clock = Instant::now();
                let lhs = lane.lhs(cfg, n)?;
                let en = lane.en(cfg, n)?;
                rows.push(finish_row(n, lhs, en, clock));
            }
        }
        Kernel::Fourier if cfg.q == 2.0 && cfg.rho_x.is_one() => {
            let lane = TransformSideLane::prepare(cfg, &basis, &coeffs)?;
            for &n in &cfg.degrees {
                let clock = Instant::now();
                let lhs = lane.lhs(n)?;
                let en = proxy_for(cfg, &basis, n)?;
                rows.push(finish_row(n, lhs, en, clock));
            }
        }
        _ => {
            let lane = XSideLane::prepare(cfg)?;
            for &n in &cfg.degrees {
                let clock = Instant::now();
                let lhs = lane.lhs(cfg, &basis, &coeffs, n)?;
                let en = proxy_for(cfg, &basis, n)?;
                rows.push(finish_row(n, lhs, en, clock));
            }
        }
    }
    Ok(ConvergenceReport {
        rows,
        config: cfg.clone(),
    })
}

fn finish_row(n: usize, lhs: f64, en: EnProxy, clock: Instant) -> ConvergenceRow {
    ConvergenceRow {
        n,
        lhs_norm: lhs,
        en_proxy: en.value,
        ratio: lhs / en.value.max(f64::MIN_POSITIVE),
        wall_time_s: clock.elapsed().as_secs_f64(),
        en_converged: en.converged,
    }
}

/// Proxy of g = fhat / sqrt(w_x0) under sqrt(w_x0) * omega on the
/// configured transform-side grid.
fn proxy_for(cfg: &ConvergenceConfig, basis: &ChromaticBasis, n: usize) -> Result<EnProxy> {
    let seg = &basis.segments()[0];
    let w = seg.weight.clone();
    let omega = cfg.omega;
    let fhat = cfg.fhat.clone();
    en_proxy(
        move |y| {
            let sw = w.eval(y).max(0.0).sqrt();
            fhat.eval(y) / sw
        },
        {
            let w = seg.weight.clone();
            move |y| w.eval(y).max(0.0).sqrt() * omega.eval(y)
        },
        cfg.s,
        n,
        &cfg.y_grid,
    )
}

/// Per-degree data shared by the dyadic lane: cell tables of the
/// orthonormal system, the data function, and the proxy measure.
struct WalshLane {
    grid: DyadicGrid,
    /// p_m(mid) * sqrt(base(mid)) tables, cell-major.
    basis_cells: Vec<Vec<f64>>,
    fhat_cells: Vec<f64>,
    signed_coeffs: Vec<Complex64>,
    weight: WeightSpec,
    mids: Vec<f64>,
    widths: Vec<f64>,
}

impl WalshLane {
    fn prepare(
        cfg: &ConvergenceConfig,
        basis: &ChromaticBasis,
        coeffs: &crate::chromatic::ChromaticCoefficients,
        m_int: u32,
        m_frac: u32,
    ) -> Result<Self> {
        if basis.segments().len() != 1 {
            return Err(CoreError::ParameterInfeasible(
                "dyadic sweeps need a single-segment expansion point".into(),
            ));
        }
        let seg = &basis.segments()[0];
        let grid = DyadicGrid::new(m_int, m_frac)?;
        let n_cap = cfg.degree_cap();
        let mut basis_cells = Vec::with_capacity(seg.quad.nodes.len());
        let mut fhat_cells = Vec::with_capacity(seg.quad.nodes.len());
        let mut mids = Vec::with_capacity(seg.quad.nodes.len());
        let mut widths = Vec::with_capacity(seg.quad.nodes.len());
        for (y, w) in seg.quad.nodes.iter().zip(&seg.quad.weights) {
            let base = seg.base_weight.eval(*y);
            let width = if base > 0.0 {
                w / base
            } else {
                grid.cell_width()
            };
            let sb = base.max(0.0).sqrt();
            let pv = seg.rec.eval_orthonormal(n_cap, *y)?;
            basis_cells.push(pv.iter().map(|p| p * sb).collect());
            fhat_cells.push(cfg.fhat.eval(*y));
            mids.push(*y);
            widths.push(width);
        }
        let signed: Vec<Complex64> = coeffs.per_segment[0]
            .iter()
            .map(|c| c * seg.sign)
            .collect();
        Ok(WalshLane {
            grid,
            basis_cells,
            fhat_cells,
            signed_coeffs: signed,
            weight: seg.weight.clone(),
            mids,
            widths,
        })
    }

    /// Exact L^q norm of v_n - f on the dual grid: the cell-residual
    /// transform is a step function integrated cell by cell.
    fn lhs(&self, cfg: &ConvergenceConfig, n: usize) -> Result<f64> {
        let mu = summability_multipliers(n, cfg.mode)?;
        let resid: Vec<f64> = self
            .basis_cells
            .iter()
            .zip(&self.fhat_cells)
            .map(|(pv, f)| {
                let v: Complex64 = mu
                    .iter()
                    .zip(&self.signed_coeffs)
                    .zip(pv)
                    .map(|((m, c), p)| c * (m * p))
                    .sum();
                v.re - f
            })
            .collect();
        let dual = self.grid.transform_all(&resid)?;
        let cell = (-(self.grid.m_int as f64)).exp2();
        let window = cfg.x_window.unwrap_or((0.0, f64::INFINITY));
        if cfg.q.is_infinite() {
            let mut sup = 0.0f64;
            for (j, v) in dual.iter().enumerate() {
                let t = j as f64 * cell;
                if t >= window.0 && t < window.1 {
                    sup = sup.max(v.abs() * cfg.rho_x.eval(t));
                }
            }
            return Ok(sup);
        }
        let mut acc = 0.0;
        for (j, v) in dual.iter().enumerate() {
            let t = j as f64 * cell;
            if t >= window.0 && t < window.1 {
                acc += v.abs().powf(cfg.q) * cfg.rho_x.eval(t) * cell;
            }
        }
        Ok(acc.max(0.0).powf(1.0 / cfg.q))
    }

    /// Proxy on the same cells the expansion itself uses.
    fn en(&self, cfg: &ConvergenceConfig, n: usize) -> Result<EnProxy> {
        let omega = cfg.omega;
        let fhat = cfg.fhat.clone();
        let w = self.weight.clone();
        let g = {
            let w = w.clone();
            move |y: f64| fhat.eval(y) / w.eval(y).max(0.0).sqrt()
        };
        let wfun = move |y: f64| w.eval(y).max(0.0).sqrt() * omega.eval(y);
        en_proxy_on_nodes(&g, &wfun, cfg.s, n, &self.mids, &self.widths)
    }
}

/// Unitary-kernel shortcut: the x-side L^2 distance equals the
/// transform-side L^2 distance of the weighted polynomial sum from the
/// data, so no oscillatory x integrals are needed.
struct TransformSideLane {
    /// p_m(y) tables at the norm-grid nodes.
    basis_table: Vec<Vec<f64>>,
    sqrt_w: Vec<f64>,
    fhat_vals: Vec<f64>,
    signed_coeffs: Vec<Complex64>,
    quad_weights: Vec<f64>,
    mode: SummMode,
}

impl TransformSideLane {
    fn prepare(
        cfg: &ConvergenceConfig,
        basis: &ChromaticBasis,
        coeffs: &crate::chromatic::ChromaticCoefficients,
    ) -> Result<Self> {
        if basis.segments().len() != 1 {
            return Err(CoreError::ParameterInfeasible(
                "the transform-side shortcut needs a single segment".into(),
            ));
        }
        let seg = &basis.segments()[0];
        let n_cap = cfg.degree_cap();
        let (nodes, quad_weights) = cfg.y_grid.nodes_weights();
        let mut basis_table = Vec::with_capacity(nodes.len());
        let mut sqrt_w = Vec::with_capacity(nodes.len());
        let mut fhat_vals = Vec::with_capacity(nodes.len());
        for y in &nodes {
            basis_table.push(seg.rec.eval_orthonormal(n_cap, *y)?);
            sqrt_w.push(seg.weight.eval(*y).max(0.0).sqrt());
            fhat_vals.push(cfg.fhat.eval(*y));
        }
        let signed: Vec<Complex64> = coeffs.per_segment[0]
            .iter()
            .map(|c| c * seg.sign)
            .collect();
        Ok(TransformSideLane {
            basis_table,
            sqrt_w,
            fhat_vals,
            signed_coeffs: signed,
            quad_weights,
            mode: cfg.mode,
        })
    }

    fn lhs(&self, n: usize) -> Result<f64> {
        let mu = summability_multipliers(n, self.mode)?;
        let mut acc = 0.0;
        for i in 0..self.basis_table.len() {
            let v: Complex64 = mu
                .iter()
                .zip(&self.signed_coeffs)
                .zip(&self.basis_table[i])
                .map(|((m, c), p)| c * (m * p))
                .sum();
            let resid = v * self.sqrt_w[i] - self.fhat_vals[i];
            acc += self.quad_weights[i] * resid.norm_sqr();
        }
        Ok(acc.max(0.0).sqrt())
    }
}

/// Windowed x-side norm against reference transform values.
struct XSideLane {
    x_nodes: Vec<f64>,
    x_weights: Vec<f64>,
    reference: Vec<Complex64>,
    rho_vals: Vec<f64>,
}

impl XSideLane {
    fn prepare(cfg: &ConvergenceConfig) -> Result<Self> {
        let fhat = cfg.fhat.clone();
        let spec = QuadSpec::Adaptive(AdaptiveSpec {
            rel_tol: 1e-9,
            max_refinements: 12,
        });
        let reference_at = |x: f64| -> Result<Complex64> {
            Ok(transform(
                &cfg.kernel,
                |y| Complex64::new(fhat.eval(y), 0.0),
                &Point::Real(x),
                &spec,
            )?
            .value)
        };
        let window = match cfg.x_window {
            Some(w) => w,
            None => auto_window(cfg, &reference_at)?,
        };
        let grid = NormGrid {
            lo: window.0,
            hi: window.1,
            panels: cfg.x_panels,
            order: cfg.x_order,
            grade_lo: true,
            grade_hi: false,
        };
        let (x_nodes, x_weights) = grid.nodes_weights();
        let mut reference = Vec::with_capacity(x_nodes.len());
        let mut rho_vals = Vec::with_capacity(x_nodes.len());
        for x in &x_nodes {
            reference.push(reference_at(*x)?);
            rho_vals.push(cfg.rho_x.eval(*x));
        }
        Ok(XSideLane {
            x_nodes,
            x_weights,
            reference,
            rho_vals,
        })
    }

    fn lhs(
        &self,
        cfg: &ConvergenceConfig,
        basis: &ChromaticBasis,
        coeffs: &crate::chromatic::ChromaticCoefficients,
        n: usize,
    ) -> Result<f64> {
        if cfg.q.is_infinite() {
            let mut sup = 0.0f64;
            for (i, x) in self.x_nodes.iter().enumerate() {
                let v = basis.reconstruct(coeffs, &Point::Real(*x), n, cfg.mode)?;
                sup = sup.max((v - self.reference[i]).norm() * self.rho_vals[i]);
            }
            return Ok(sup);
        }
        let mut acc = 0.0;
        for (i, x) in self.x_nodes.iter().enumerate() {
            let v = basis.reconstruct(coeffs, &Point::Real(*x), n, cfg.mode)?;
            acc += self.x_weights[i] * self.rho_vals[i] * (v - self.reference[i]).norm().powf(cfg.q);
        }
        Ok(acc.max(0.0).powf(1.0 / cfg.q))
    }
}

/// Truncation point of the x-side window: the first log-grid abscissa past
/// the peak where rho * |f|^q stays below 1e-16 of the peak value.
fn auto_window<R>(cfg: &ConvergenceConfig, reference_at: &R) -> Result<(f64, f64)>
where
    R: Fn(f64) -> Result<Complex64>,
{
    let interval = cfg.kernel.support_at(&Point::Real(0.0)).map(|iv| iv.lo);
    let halfline = matches!(interval, Ok(lo) if lo >= 0.0);
    if !halfline {
        return Err(CoreError::ParameterInfeasible(
            "automatic x windows cover half-line kernels; set x_window explicitly".into(),
        ));
    }
    let mut samples = Vec::with_capacity(73);
    for k in -24..=48 {
        let x = 10f64.powf(k as f64 / 4.0);
        let f = reference_at(x)?.norm();
        let dens = if cfg.q.is_infinite() {
            cfg.rho_x.eval(x) * f
        } else {
            cfg.rho_x.eval(x) * f.powf(cfg.q)
        };
        samples.push((x, dens));
    }
    let peak = samples.iter().fold(0.0f64, |m, (_, d)| m.max(*d));
    if !(peak > 0.0) {
        return Ok((0.0, 1.0));
    }
    let ipeak = samples
        .iter()
        .position(|(_, d)| *d == peak)
        .unwrap_or(0);
    let mut hi = samples.last().expect("nonempty").0;
    for (x, d) in samples.iter().skip(ipeak + 1) {
        if *d < 1e-16 * peak {
            hi = *x;
            break;
        }
    }
    Ok((0.0, hi))
}


#[cfg(test)]
mod en_proxy_tests {
    use super::*;

    #[test]
    fn constant_fit_to_linear_data() {
        // min over c of int (y-c)^2 e^-y dy is 1 at c = 1
        let grid = NormGrid::plain(0.0, 60.0, 64, 8);
        let r = en_proxy(|y| y, |y: f64| (-y / 2.0).exp(), 2.0, 0, &grid).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-9, "value {}", r.value);
        assert!((r.poly.eval(0.3).unwrap() - 1.0).abs() < 1e-9);
        assert!((r.poly.eval(7.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn polynomial_data_fits_exactly() {
        let grid = NormGrid::plain(0.0, 60.0, 64, 8);
        let g = |y: f64| 2.0 * y * y - y + 0.5;
        let w = |y: f64| (-y / 2.0).exp();
        let r2 = en_proxy(g, w, 2.0, 2, &grid).unwrap();
        assert!(r2.value < 1e-10, "p=2 residual {}", r2.value);
        let r35 = en_proxy(g, w, 3.5, 2, &grid).unwrap();
        assert!(r35.value < 1e-8, "p=3.5 residual {}", r35.value);
    }

    #[test]
    fn minimax_constant_is_the_midpoint() {
        let grid = NormGrid::plain(0.0, 2.0, 64, 8);
        let r = en_proxy(|y: f64| (y - 1.0).abs(), |_| 1.0, f64::INFINITY, 0, &grid).unwrap();
        assert!((r.value - 0.5).abs() < 5e-3, "value {}", r.value);
        assert!((r.poly.eval(0.7).unwrap() - 0.5).abs() < 5e-3);
    }

    #[test]
    fn least_deviation_constant_is_the_median() {
        let grid = NormGrid::plain(0.0, 2.0, 64, 8);
        let r = en_proxy(|y| y, |_| 1.0, 1.0, 0, &grid).unwrap();
        assert!((r.value - 1.0).abs() < 5e-3, "value {}", r.value);
        assert!((r.poly.eval(0.1).unwrap() - 1.0).abs() < 5e-3);
    }

    #[test]
    fn proxy_is_monotone_in_degree() {
        let grid = NormGrid::plain(-4.0, 4.0, 64, 8);
        let g = |y: f64| 1.0 / (1.0 + y * y);
        let mut prev = f64::INFINITY;
        for n in 0..=8 {
            let r = en_proxy(g, |_| 1.0, 2.0, n, &grid).unwrap();
            assert!(r.value <= prev + 1e-12, "n = {n}: {} > {prev}", r.value);
            prev = r.value;
        }
        let mut prev = f64::INFINITY;
        for n in 0..=6 {
            let r = en_proxy(g, |_| 1.0, 3.0, n, &grid).unwrap();
            assert!(r.value <= prev + 1e-8, "p=3 n = {n}: {} > {prev}", r.value);
            prev = r.value;
        }
    }

    #[test]
    fn grid_shorter_than_degree_rule_is_rejected() {
        let nodes: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        let weights = vec![0.05; 20];
        let r = en_proxy_on_nodes(&|y| y, &|_| 1.0, 2.0, 3, &nodes, &weights);
        assert!(matches!(r, Err(CoreError::ParameterOutOfRange(_))));
    }
}

#[cfg(test)]
mod theorem_weight_tests {
    use super::*;

    #[test]
    fn bounded_ratio_family_feasibility() {
        let tp = TheoremParams {
            a: 0.6,
            ..TheoremParams::default()
        };
        assert!(matches!(
            theorem3_weights(2.0, 2.0, 1.0, &tp),
            Err(CoreError::ParameterInfeasible(_))
        ));
        let tp = TheoremParams {
            a: 0.2,
            b: 0.3,
            ..TheoremParams::default()
        };
        assert!(theorem3_weights(2.0, 2.0, 1.0, &tp).is_err());
        let tp = TheoremParams {
            a: 0.4,
            b: 0.2,
            delta: 0.05,
            epsilon: 0.01,
        };
        assert!(theorem3_weights(2.0, 1.5, 1.0, &tp).is_err());
    }

    #[test]
    fn trivial_parameters_give_unit_weights() {
        let (omega, rho) = theorem3_weights(2.0, 2.0, 1.0, &TheoremParams::default()).unwrap();
        for t in [0.1, 1.0, 7.3] {
            assert!((omega.eval(t) - 1.0).abs() < 1e-15);
            assert!((rho.eval(t) - 1.0).abs() < 1e-15);
        }
        assert!(omega.is_one() && rho.is_one());
    }

    #[test]
    fn pure_power_family_feasibility() {
        let tp = TheoremParams {
            a: 0.2,
            b: 0.1,
            ..TheoremParams::default()
        };
        assert!(theorem4_weights(2.0, 3.0, 1.0, &tp).is_err());
        let tp = TheoremParams {
            a: 0.2,
            b: 0.2,
            ..TheoremParams::default()
        };
        let (omega, rho) = theorem4_weights(2.0, 3.0, 0.0, &tp).unwrap();
        assert!((omega.eval(2.0) - 2f64.powf(0.2)).abs() < 1e-14);
        // d = 3 (0.5 - 0.2) - 1 = -0.1
        assert!((rho.eval(2.0) - 2f64.powf(-0.1)).abs() < 1e-14);
        let tp = TheoremParams {
            a: 0.2,
            b: 0.0,
            ..TheoremParams::default()
        };
        assert!(matches!(
            theorem4_weights(2.0, 1.5, 1.0, &tp),
            Err(CoreError::ParameterInfeasible(_))
        ));
    }

    #[test]
    fn fhat_catalog_evaluation() {
        let f = FhatSpec::Samples {
            ys: vec![0.0, 1.0, 3.0],
            values: vec![0.0, 2.0, 0.0],
        };
        f.validate().unwrap();
        assert_eq!(f.eval(1.0), 2.0);
        assert!((f.eval(0.5) - 1.0).abs() < 1e-15);
        assert!((f.eval(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(f.eval(-0.1), 0.0);
        assert_eq!(f.eval(3.5), 0.0);

        let bad = FhatSpec::Samples {
            ys: vec![0.0, 0.0],
            values: vec![1.0, 1.0],
        };
        assert!(bad.validate().is_err());
        assert!(FhatSpec::ExpDecay { rate: -1.0 }.validate().is_err());
        let p = FhatSpec::Poly {
            coeffs: vec![1.0, 0.0, -1.0],
        };
        assert!((p.eval(0.5) - 0.75).abs() < 1e-15);
    }
}
