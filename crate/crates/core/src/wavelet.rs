//! Poisson wavelet family and the (a,b)-plane machinery.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::approx::SummMode;
use crate::chromatic::ChromaticBasis;
use crate::error::{CoreError, Result};
use crate::kernels::{transform, Kernel, Point, QuadSpec, TransformValue};
use crate::orthopoly::{Interval, WeightSpec};
use crate::quad::{gauss_legendre, panel_mesh, AdaptiveSpec, Panel};
use crate::special::binomial;

/// Point of the scale-shift half-plane, scale a nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletPoint {
    pub a: f64,
    pub b: f64,
}

impl WaveletPoint {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a == 0.0 {
            return Err(CoreError::ParameterOutOfRange(format!(
                "wavelet point needs finite (a, b) with a != 0, got ({a}, {b})"
            )));
        }
        Ok(WaveletPoint { a, b })
    }
}

fn check_order(n: u32) -> Result<()> {
    if n == 0 || n > 40 {
        return Err(CoreError::ParameterOutOfRange(format!(
            "wavelet order must be in [1, 40], got {n}"
        )));
    }
    Ok(())
}

/// Half-line bump q_n(y) = y^n e^{-y} / n!, zero for negative y.
pub fn poisson_q(n: u32, y: f64) -> Result<f64> {
    check_order(n)?;
    if y < 0.0 {
        return Ok(0.0);
    }
    let mut acc = (-y).exp();
    for k in 1..=n {
        acc *= y / k as f64;
    }
    Ok(acc)
}

/// Poisson wavelet Psi_n = -q_n': (y - n) y^(n-1) e^(-y) / n!, zero for
/// negative y. One sign change, at y = n.
pub fn poisson_psi(n: u32, y: f64) -> Result<f64> {
    check_order(n)?;
    if y < 0.0 {
        return Ok(0.0);
    }
    let mut acc = (-y).exp() / n as f64;
    for k in 1..n {
        acc *= y / k as f64;
    }
    Ok((y - n as f64) * acc)
}

/// Scaled translate u_n(a,b; y) = Psi_n((y-b)/a) / sqrt(|a|).
pub fn u_kernel(n: u32, pt: &WaveletPoint, y: f64) -> Result<f64> {
    Ok(poisson_psi(n, (y - pt.b) / pt.a)? / pt.a.abs().sqrt())
}

/// Rectangle of the (a,b) half-plane with per-axis Gauss sizes, carrying
/// the measure n db da/a^2.
#[derive(Debug, Clone, Copy)]
pub struct WaveletWindow {
    pub a_range: Interval,
    pub b_range: Interval,
    pub a_points: usize,
    pub b_points: usize,
}

impl WaveletWindow {
    pub fn new(
        a_range: Interval,
        b_range: Interval,
        a_points: usize,
        b_points: usize,
    ) -> Result<Self> {
        if !a_range.is_bounded() || !b_range.is_bounded() {
            return Err(CoreError::ParameterOutOfRange(
                "wavelet window must be bounded".into(),
            ));
        }
        if a_range.lo <= 0.0 && a_range.hi >= 0.0 {
            return Err(CoreError::ParameterOutOfRange(format!(
                "scale range [{}, {}] must exclude 0",
                a_range.lo, a_range.hi
            )));
        }
        if a_points == 0 || b_points == 0 {
            return Err(CoreError::ParameterOutOfRange(
                "window needs at least one quadrature point per axis".into(),
            ));
        }
        Ok(WaveletWindow {
            a_range,
            b_range,
            a_points,
            b_points,
        })
    }
}

/// Scale-shift transform (W f)(a,b) = integral of f(y) u_n(a,b; y) dy.
pub fn wavelet_transform<F>(
    f: F,
    n: u32,
    pt: &WaveletPoint,
    quad: &QuadSpec,
) -> Result<TransformValue>
where
    F: Fn(f64) -> f64,
{
    check_order(n)?;
    transform(
        &Kernel::PoissonWavelet { n },
        |y| Complex64::new(f(y), 0.0),
        &Point::Plane(*pt),
        quad,
    )
}

/// Numeric admissibility constant: integral of |F Psi_n(xi)|^2 / |xi| over
/// the line, with F the plain e^(-i xi y) transform. Converges to 1/n.
pub fn admissibility_numeric(n: u32) -> Result<f64> {
    check_order(n)?;
    let inner = AdaptiveSpec {
        rel_tol: 1e-8,
        max_refinements: 12,
    };
    let density = |xi: f64| -> Result<f64> {
        let t = transform(
            &Kernel::Fourier,
            |y| Complex64::new(poisson_psi(n, y).unwrap_or(0.0), 0.0),
            &Point::Real(xi),
            &QuadSpec::Adaptive(inner),
        )?;
        Ok(2.0 * PI * t.value.norm_sqr() / xi)
    };
    // |F Psi_n|^2 ~ xi^(-2n) at infinity; the cutoff keeps the dropped
    // two-sided tail below 2e-5.
    let cutoff = (1e-5 * n as f64)
        .powf(-1.0 / (2.0 * n as f64))
        .clamp(20.0, 250.0);
    let level = |mesh: &[Panel]| -> Result<f64> {
        let rule = gauss_legendre(16);
        let mut acc = 0.0;
        for p in mesh {
            let c = 0.5 * (p.lo + p.hi);
            let hl = 0.5 * (p.hi - p.lo);
            for (t, w) in rule.0.iter().zip(&rule.1) {
                acc += density(c + hl * t)? * w * hl;
            }
        }
        Ok(acc)
    };
    let mut mesh = panel_mesh(0.0, cutoff, 16, true, false, 20);
    let mut prev = level(&mesh)?;
    let mut last_diff = f64::INFINITY;
    for _ in 0..3 {
        mesh = mesh
            .iter()
            .flat_map(|p| {
                let mid = 0.5 * (p.lo + p.hi);
                [Panel::new(p.lo, mid), Panel::new(mid, p.hi)]
            })
            .collect();
        let cur = level(&mesh)?;
        last_diff = (cur - prev).abs();
        if last_diff <= 1e-6 * (1.0 + cur.abs()) {
            return Ok(2.0 * cur);
        }
        prev = cur;
    }
    Err(CoreError::QuadratureNonConvergence {
        estimate: last_diff,
        tolerance: 1e-6,
    })
}

/// Chromatic basis split at the kernel zero b0 + a0 n, with segment weights
/// w^(i) * u_n(a0,b0; .)^2.
pub fn split_basis(
    n: u32,
    a0: f64,
    b0: f64,
    w1: WeightSpec,
    w2: WeightSpec,
    n_max: usize,
) -> Result<ChromaticBasis> {
    check_order(n)?;
    let anchor = WaveletPoint::new(a0, b0)?;
    ChromaticBasis::build(
        Kernel::PoissonWavelet { n },
        &[w1, w2],
        Point::Plane(anchor),
        n_max,
    )
}

/// Partial sum S_N(a,b) of the split expansion of (W f)(a,b).
pub fn wavelet_partial_sum<F>(
    basis: &ChromaticBasis,
    f: F,
    n_terms: usize,
    pt: &WaveletPoint,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let coeffs = basis.coefficients(|y| Complex64::new(f(y), 0.0), n_terms)?;
    let value = basis.reconstruct(&coeffs, &Point::Plane(*pt), n_terms, SummMode::Partial)?;
    Ok(value.re)
}

/// Weighted norm sqrt(n * double integral of |h(a,b)|^2 db da/a^2) over the
/// window, by tensor Gauss rules.
pub fn wavelet_domain_norm<H>(h: H, n: u32, window: &WaveletWindow) -> Result<f64>
where
    H: Fn(f64, f64) -> f64,
{
    check_order(n)?;
    let a_rule = gauss_legendre(window.a_points);
    let b_rule = gauss_legendre(window.b_points);
    let (alo, ahi) = (window.a_range.lo, window.a_range.hi);
    let (blo, bhi) = (window.b_range.lo, window.b_range.hi);
    let (ac, ah) = (0.5 * (alo + ahi), 0.5 * (ahi - alo));
    let (bc, bh) = (0.5 * (blo + bhi), 0.5 * (bhi - blo));
    let mut acc = 0.0;
    for (ta, wa) in a_rule.0.iter().zip(&a_rule.1) {
        let a = ac + ah * ta;
        for (tb, wb) in b_rule.0.iter().zip(&b_rule.1) {
            let b = bc + bh * tb;
            let v = h(a, b);
            acc += v * v / (a * a) * wa * wb;
        }
    }
    Ok((n as f64 * acc * ah * bh).max(0.0).sqrt())
}

/// Exact-polynomial residual of the vanishing binomial derivative sum and,
/// for order 1, a finite-difference residual of the scale-shift operator
/// identity D u = y u.
pub fn identity_residuals(
    n: u32,
    pt: &WaveletPoint,
    y: f64,
) -> Result<(f64, Option<f64>)> {
    check_order(n)?;
    if !(y >= 1e-3) {
        return Err(CoreError::ParameterOutOfRange(format!(
            "identity residuals need y >= 1e-3, got {y}"
        )));
    }
    let binres = binomial_identity_residual(n, y);
    let opres = if n == 1 {
        Some(operator_identity_residual(pt, y)?)
    } else {
        None
    };
    Ok((binres, opres))
}

/// |sum_k C(n+1,k) Psi_n^(k)(y)|, with derivatives via exact coefficient
/// recursion on the polynomial factor of Psi_n = P(y) e^(-y).
fn binomial_identity_residual(n: u32, y: f64) -> f64 {
    let nf = n as usize;
    let mut fact = 1.0;
    for k in 2..=nf {
        fact *= k as f64;
    }
    let mut poly = vec![0.0; nf + 1];
    poly[nf] = 1.0 / fact;
    poly[nf - 1] = -(n as f64) / fact;
    let mut acc = 0.0;
    for k in 0..=(n + 1) {
        let val: f64 = poly.iter().rev().fold(0.0, |s, c| s * y + c);
        acc += binomial(n + 1, k) * val;
        // (P e^-y)' = (P' - P) e^-y
        let mut next = vec![0.0; poly.len()];
        for (j, c) in poly.iter().enumerate() {
            next[j] -= c;
            if j > 0 {
                next[j - 1] += j as f64 * c;
            }
        }
        poly = next;
    }
    (acc * (-y).exp()).abs()
}

fn operator_identity_residual(pt: &WaveletPoint, y: f64) -> Result<f64> {
    let h = 1e-4;
    let g = |a: f64, b: f64| -> Result<f64> {
        u_kernel(1, &WaveletPoint::new(a, b)?, y)
    };
    let (a, b) = (pt.a, pt.b);
    let u = g(a, b)?;
    let u_a = (g(a + h, b)? - g(a - h, b)?) / (2.0 * h);
    let u_b = (g(a, b + h)? - g(a, b - h)?) / (2.0 * h);
    let u_ab = (g(a + h, b + h)? - g(a + h, b - h)? - g(a - h, b + h)? + g(a - h, b - h)?)
        / (4.0 * h * h);
    let applied = 2.0 * a * (a * u_a + 0.5 * u) - a * a * (a * u_ab + 1.5 * u_b) + b * u;
    Ok((applied - y * u).abs())
}
