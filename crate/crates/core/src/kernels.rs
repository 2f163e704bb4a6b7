//! Transform kernels Psi(x, y), their sign structure at expansion points,
//! and numerical evaluation of the inverse-transform integral.
//!
//! All kernels integrate against Lebesgue measure on their y-domain. The
//! Fourier convention is Psi(x,y) = e^(-ixy)/sqrt(2 pi), so transforms use
//! conj(Psi) = e^(ixy)/sqrt(2 pi).

use num_complex::Complex64;

use crate::approx::{weighted_norm, NormGrid};
use crate::dyadic::{walsh_eval, walsh_transform, DyadicRational, DEFAULT_M_FRAC, DEFAULT_M_INT};
use crate::error::{CoreError, Result};
use crate::orthopoly::{Interval, QuadratureRule};
use crate::quad::{adaptive_complex, decay_cutoff, panel_mesh, AdaptiveSpec, Panel};
use crate::wavelet::{u_kernel, WaveletPoint};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// The five transform kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    /// e^(-ixy)/sqrt(2 pi) on R x R. Operator note: L_x = -i d/dx.
    Fourier,
    /// e^(-xy) on [0, inf) x (0, inf). Operator note: L_x = -d/dx.
    Laplace,
    /// One-dimensional Bargmann kernel
    /// pi^(-1/4) e^(-(z^2 + zeta^2)/2 + sqrt(2) z zeta) restricted to real z.
    /// Operator note: L = (d/dz + z)/sqrt(2).
    Bargmann,
    /// Generalized Walsh character (-1)^(pi_-1(x*y)) on the dyadic grid
    /// [0, 2^m_int) with fractional resolution 2^-m_frac.
    /// Operator note: L = dyadic differentiation.
    Walsh { m_int: u32, m_frac: u32 },
    /// Poisson wavelet translates Psi_n((y-b)/a)/sqrt(|a|) indexed by the
    /// half-plane point (a, b). Operator note: L = y * identity under the
    /// scale-shift generator combination.
    PoissonWavelet { n: u32 },
}

impl Kernel {
    pub fn walsh_default() -> Self {
        Kernel::Walsh {
            m_int: DEFAULT_M_INT,
            m_frac: DEFAULT_M_FRAC,
        }
    }

    /// True when the kernel takes only real values.
    pub fn is_real(&self) -> bool {
        !matches!(self, Kernel::Fourier)
    }

    /// Short description of the differential/difference operator whose
    /// iterates the chromatic derivatives generalize. Metadata only.
    pub fn operator_note(&self) -> &'static str {
        match self {
            Kernel::Fourier => "L = -i d/dx; kernel eigenvalue y",
            Kernel::Laplace => "L = -d/dx; kernel eigenvalue y",
            Kernel::Bargmann => "L = (d/dz + z)/sqrt(2); kernel eigenvalue zeta",
            Kernel::Walsh { .. } => "L = dyadic derivative; character eigenvalue |y|",
            Kernel::PoissonWavelet { .. } => {
                "L = scale-shift combination with multiplication eigenvalue y"
            }
        }
    }

    /// Strategy tag used by `transform`.
    pub fn quadrature_hint(&self) -> QuadratureHint {
        match self {
            Kernel::Fourier => QuadratureHint::Oscillatory,
            Kernel::Walsh { .. } => QuadratureHint::DyadicGrid,
            _ => QuadratureHint::Decaying,
        }
    }

    /// y-side support interval given the evaluation point.
    pub fn support_at(&self, x: &Point) -> Result<Interval> {
        match (self, x) {
            (Kernel::Fourier, Point::Real(_)) | (Kernel::Bargmann, Point::Real(_)) => {
                Ok(Interval::real_line())
            }
            (Kernel::Laplace, Point::Real(x)) => {
                if *x < 0.0 {
                    Err(CoreError::DomainViolation(format!(
                        "Laplace kernel needs x >= 0, got {x}"
                    )))
                } else {
                    Ok(Interval::half_line())
                }
            }
            (Kernel::Walsh { m_int, .. }, Point::Real(x)) => {
                if *x < 0.0 {
                    Err(CoreError::DomainViolation(format!(
                        "Walsh kernel needs x >= 0, got {x}"
                    )))
                } else {
                    Interval::new(0.0, (*m_int as f64).exp2())
                }
            }
            (Kernel::PoissonWavelet { .. }, Point::Plane(pt)) => {
                if pt.a > 0.0 {
                    Interval::new(pt.b, f64::INFINITY)
                } else {
                    Interval::new(f64::NEG_INFINITY, pt.b)
                }
            }
            _ => Err(self.point_mismatch(x)),
        }
    }

    fn point_mismatch(&self, x: &Point) -> CoreError {
        CoreError::KernelMismatch(format!(
            "{self:?} cannot be evaluated at {x:?}; Poisson wavelets take plane points, all others real points"
        ))
    }

    /// Closed-form kernel value Psi(x, y).
    pub fn eval(&self, x: &Point, y: f64) -> Result<Complex64> {
        match (self, x) {
            (Kernel::Fourier, Point::Real(x)) => {
                Ok(Complex64::from_polar(1.0 / SQRT_2PI, -x * y))
            }
            (Kernel::Laplace, Point::Real(x)) => {
                if *x < 0.0 {
                    return Err(CoreError::DomainViolation(format!(
                        "Laplace kernel needs x >= 0, got {x}"
                    )));
                }
                if y <= 0.0 {
                    return Err(CoreError::DomainViolation(format!(
                        "Laplace kernel lives on y > 0, got {y}"
                    )));
                }
                Ok(Complex64::new((-x * y).exp(), 0.0))
            }
            (Kernel::Bargmann, Point::Real(z)) => {
                let v = std::f64::consts::PI.powf(-0.25)
                    * (-(z * z + y * y) / 2.0 + 2f64.sqrt() * z * y).exp();
                Ok(Complex64::new(v, 0.0))
            }
            (Kernel::Walsh { m_int, m_frac }, Point::Real(x)) => {
                let t = DyadicRational::from_real(*x, *m_int, *m_frac)?;
                let yy = DyadicRational::from_real(y, *m_int, *m_frac)?;
                Ok(Complex64::new(walsh_eval(&t, &yy), 0.0))
            }
            (Kernel::PoissonWavelet { n }, Point::Plane(pt)) => {
                Ok(Complex64::new(u_kernel(*n, pt, y)?, 0.0))
            }
            _ => Err(self.point_mismatch(x)),
        }
    }

    /// Zeros of y -> Psi(x0, y) interior to the support, sorted. Positive
    /// kernels return an empty vector; oscillatory kernels are only
    /// supported at their constant-sign point x0 = 0.
    pub fn sign_changes(&self, x0: &Point) -> Result<Vec<f64>> {
        match (self, x0) {
            (Kernel::Fourier, Point::Real(x)) => {
                if *x == 0.0 {
                    Ok(vec![])
                } else {
                    Err(CoreError::UnsupportedPoint(format!(
                        "Fourier kernel phase varies at x0 = {x}; only x0 = 0 is admissible"
                    )))
                }
            }
            (Kernel::Walsh { .. }, Point::Real(x)) => {
                if *x == 0.0 {
                    Ok(vec![])
                } else {
                    Err(CoreError::UnsupportedPoint(format!(
                        "Walsh characters alternate sign at x0 = {x}; only x0 = 0 is admissible"
                    )))
                }
            }
            (Kernel::Laplace, Point::Real(x)) => {
                if *x < 0.0 {
                    Err(CoreError::DomainViolation(format!(
                        "Laplace kernel needs x0 >= 0, got {x}"
                    )))
                } else {
                    Ok(vec![])
                }
            }
            (Kernel::Bargmann, Point::Real(_)) => Ok(vec![]),
            (Kernel::PoissonWavelet { n }, Point::Plane(pt)) => {
                Ok(vec![pt.b + pt.a * *n as f64])
            }
            _ => Err(self.point_mismatch(x0)),
        }
    }
}

/// Evaluation point: real axis or the wavelet half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Real(f64),
    Plane(WaveletPoint),
}

impl Point {
    pub fn real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            Point::Plane(_) => None,
        }
    }
}

/// Quadrature strategy tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureHint {
    Oscillatory,
    Decaying,
    DyadicGrid,
}

/// How `transform` should integrate.
pub enum QuadSpec<'a> {
    /// Fixed rule whose weights already represent the y-measure.
    Rule(&'a QuadratureRule),
    /// Panel-doubling adaptive integration to the given tolerance.
    Adaptive(AdaptiveSpec),
}

/// Transform value with the between-refinement error estimate (None for
/// fixed rules, tail estimate for the dyadic grid).
#[derive(Debug, Clone, Copy)]
pub struct TransformValue {
    pub value: Complex64,
    pub error_estimate: Option<f64>,
}

/// Numerical inverse transform: integral of fhat(y) * conj(Psi(x, y)) over
/// the kernel's y-domain.
pub fn transform<F>(kernel: &Kernel, fhat: F, x: &Point, quad: &QuadSpec) -> Result<TransformValue>
where
    F: Fn(f64) -> Complex64,
{
    if let QuadSpec::Rule(rule) = quad {
        let mut acc = Complex64::new(0.0, 0.0);
        for (y, w) in rule.nodes.iter().zip(&rule.weights) {
            acc += fhat(*y) * kernel.eval(x, *y)?.conj() * *w;
        }
        return Ok(TransformValue {
            value: acc,
            error_estimate: None,
        });
    }
    let spec = match quad {
        QuadSpec::Adaptive(s) => *s,
        QuadSpec::Rule(_) => unreachable!(),
    };
    match kernel {
        Kernel::Walsh { m_int, m_frac } => {
            let xv = x.real().ok_or_else(|| kernel.point_mismatch(x))?;
            let t = DyadicRational::from_real(xv, *m_int, *m_frac)?;
            let re = walsh_transform(|y| fhat(y).re, &t, *m_int, *m_frac, 1e-6)?;
            let im = walsh_transform(|y| fhat(y).im, &t, *m_int, *m_frac, 1e-6)?;
            Ok(TransformValue {
                value: Complex64::new(re.value, im.value),
                error_estimate: Some(re.tail_estimate + im.tail_estimate),
            })
        }
        Kernel::Fourier => {
            let xv = x.real().ok_or_else(|| kernel.point_mismatch(x))?;
            let support = oscillatory_support(&fhat, spec.rel_tol)?;
            let len = std::f64::consts::PI / (1.0 + xv.abs());
            let count = (((support.1 - support.0) / len).ceil() as usize).clamp(1, 40_000);
            let mesh = panel_mesh(support.0, support.1, count, false, false, 0);
            let integrand = |y: f64| fhat(y) * Complex64::from_polar(1.0 / SQRT_2PI, xv * y);
            let (value, err) = adaptive_complex(integrand, &mesh, 16, &spec)?;
            Ok(TransformValue {
                value,
                error_estimate: Some(err),
            })
        }
        _ => {
            let support = kernel.support_at(x)?;
            let mesh = decaying_mesh(kernel, &fhat, x, support, spec.rel_tol)?;
            let integrand = |y: f64| fhat(y) * kernel.eval(x, y).map(|v| v.conj()).unwrap_or_default();
            let (value, err) = adaptive_complex(integrand, &mesh, 16, &spec)?;
            Ok(TransformValue {
                value,
                error_estimate: Some(err),
            })
        }
    }
}

fn oscillatory_support<F>(fhat: &F, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let floor = (tol * 1e-4).min(1e-16);
    let hi = decay_cutoff(|s| fhat(s).norm(), 0.0, floor);
    let lo = decay_cutoff(|s| fhat(-s).norm(), 0.0, floor);
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((-lo, hi)),
        _ => Err(CoreError::QuadratureNonConvergence {
            estimate: f64::INFINITY,
            tolerance: tol,
        }),
    }
}

fn decaying_mesh<F>(
    kernel: &Kernel,
    fhat: &F,
    x: &Point,
    support: Interval,
    tol: f64,
) -> Result<Vec<Panel>>
where
    F: Fn(f64) -> Complex64,
{
    let floor = (tol * 1e-4).min(1e-16);
    let magnitude = |y: f64| {
        let k = kernel.eval(x, y).map(|v| v.norm()).unwrap_or(0.0);
        fhat(y).norm() * k
    };
    let nonconv = || CoreError::QuadratureNonConvergence {
        estimate: f64::INFINITY,
        tolerance: tol,
    };
    match (support.lo.is_finite(), support.hi.is_finite()) {
        (true, true) => Ok(panel_mesh(support.lo, support.hi, 32, true, true, 40)),
        (true, false) => {
            let lo = support.lo;
            let hi = lo + decay_cutoff(|s| magnitude(lo + s), 0.0, floor).ok_or_else(nonconv)?;
            Ok(panel_mesh(lo, hi, 32, true, false, 40))
        }
        (false, true) => {
            let hi = support.hi;
            let lo = hi - decay_cutoff(|s| magnitude(hi - s), 0.0, floor).ok_or_else(nonconv)?;
            Ok(panel_mesh(lo, hi, 32, false, true, 40))
        }
        (false, false) => {
            let hi = decay_cutoff(|s| magnitude(s), 0.0, floor).ok_or_else(nonconv)?;
            let lo = decay_cutoff(|s| magnitude(-s), 0.0, floor).ok_or_else(nonconv)?;
            Ok(panel_mesh(-lo, hi, 32, false, false, 0))
        }
    }
}

/// Windows for the two quadratures in the Young bound.
#[derive(Debug, Clone, Copy)]
pub struct YoungGrids {
    pub zeta: NormGrid,
    pub z: NormGrid,
}

impl Default for YoungGrids {
    fn default() -> Self {
        YoungGrids {
            zeta: NormGrid::plain(-10.0, 10.0, 80, 12),
            z: NormGrid::plain(-10.0, 10.0, 80, 12),
        }
    }
}

/// Young-inequality check for the Bargmann transform restricted to the real
/// slice: returns (lhs, rhs) with
/// lhs = || pi^(-1/2) F(z) e^(-z^2/2) ||_r,
/// rhs = 2^(-1/(2r)) pi^(-1/2) ||f||_p ||g||_q,
/// g(u) = (4/pi)^(1/4) e^(-u^2/2) and 1/r = 1/p + 1/q - 1.
pub fn bargmann_young_bound<F>(f: F, p: f64, q: f64, grids: &YoungGrids) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    crate::approx::check_exponent(p)?;
    crate::approx::check_exponent(q)?;
    let inv_r = inv_exp(p) + inv_exp(q) - 1.0;
    if inv_r < -1e-12 {
        return Err(CoreError::ParameterInfeasible(format!(
            "Young exponents need 1/p + 1/q >= 1, got p = {p}, q = {q}"
        )));
    }
    let inv_r = inv_r.max(0.0);
    let r = if inv_r == 0.0 { f64::INFINITY } else { 1.0 / inv_r };

    // Norm-level comparison; jump discontinuities in f gain only one bit
    // per refinement, so a tight tolerance would be ruinously slow.
    let spec = AdaptiveSpec {
        rel_tol: 1e-5,
        max_refinements: 16,
    };
    let kernel = Kernel::Bargmann;
    let fz = |z: f64| -> Result<f64> {
        let tv = transform(
            &kernel,
            |y| Complex64::new(f(y), 0.0),
            &Point::Real(z),
            &QuadSpec::Adaptive(spec),
        )?;
        Ok(tv.value.re)
    };
    // Precompute F on the z-grid nodes through a cache to keep the norm
    // evaluator pure.
    let (z_nodes, _) = grids.z.nodes_weights();
    let mut cache = std::collections::HashMap::new();
    for &z in &z_nodes {
        cache.insert(z.to_bits(), fz(z)?);
    }
    if r.is_infinite() {
        for panel in grids.z.mesh() {
            for z in [panel.lo, panel.hi] {
                cache.insert(z.to_bits(), fz(z)?);
            }
        }
    }
    let pi_fac = std::f64::consts::PI.powf(-0.5);
    let lhs = weighted_norm(
        |z| {
            let fv = cache.get(&z.to_bits()).copied().unwrap_or(0.0);
            pi_fac * fv * (-z * z / 2.0).exp()
        },
        |_| 1.0,
        r,
        &grids.z,
    )?;

    let f_norm = weighted_norm(&f, |_| 1.0, p, &grids.zeta)?;
    let g_norm = if q.is_infinite() {
        (4.0 / std::f64::consts::PI).powf(0.25)
    } else {
        (4.0 / std::f64::consts::PI).powf(0.25)
            * (2.0 * std::f64::consts::PI / q).powf(1.0 / (2.0 * q))
    };
    let rhs = 2f64.powf(-inv_r / 2.0) * pi_fac * f_norm * g_norm;
    Ok((lhs, rhs))
}

fn inv_exp(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::hermite_poly;
    use crate::wavelet::poisson_psi;

    #[test]
    fn kernel_values_at_origin() {
        let f = Kernel::Fourier.eval(&Point::Real(0.0), 3.7).unwrap();
        assert!((f.re - 1.0 / SQRT_2PI).abs() < 1e-16 && f.im == 0.0);
        let l = Kernel::Laplace.eval(&Point::Real(0.0), 5.0).unwrap();
        assert_eq!(l.re, 1.0);
        let b = Kernel::Bargmann.eval(&Point::Real(0.0), 0.0).unwrap();
        assert!((b.re - std::f64::consts::PI.powf(-0.25)).abs() < 1e-15);
    }

    #[test]
    fn fourier_unit_modulus() {
        for (x, y) in [(0.3, 1.0), (-2.0, 4.5), (7.7, -0.2)] {
            let v = Kernel::Fourier.eval(&Point::Real(x), y).unwrap();
            assert!((v.norm() - 1.0 / SQRT_2PI).abs() < 1e-15);
        }
    }

    #[test]
    fn laplace_positive_and_domain_checked() {
        assert!(Kernel::Laplace.eval(&Point::Real(-1.0), 1.0).is_err());
        assert!(Kernel::Laplace.eval(&Point::Real(1.0), -1.0).is_err());
        let v = Kernel::Laplace.eval(&Point::Real(2.0), 3.0).unwrap();
        assert!((v.re - (-6.0f64).exp()).abs() < 1e-18);
    }

    #[test]
    fn sign_change_catalog() {
        assert!(Kernel::Laplace.sign_changes(&Point::Real(1.0)).unwrap().is_empty());
        assert!(Kernel::Bargmann.sign_changes(&Point::Real(0.7)).unwrap().is_empty());
        assert!(Kernel::Fourier.sign_changes(&Point::Real(0.0)).unwrap().is_empty());
        assert!(matches!(
            Kernel::Fourier.sign_changes(&Point::Real(0.3)),
            Err(CoreError::UnsupportedPoint(_))
        ));
        assert!(matches!(
            Kernel::walsh_default().sign_changes(&Point::Real(1.0)),
            Err(CoreError::UnsupportedPoint(_))
        ));
        let pt = Point::Plane(WaveletPoint::new(1.0, 3.0).unwrap());
        let sc = Kernel::PoissonWavelet { n: 2 }.sign_changes(&pt).unwrap();
        assert_eq!(sc, vec![5.0]);
        let neg = Point::Plane(WaveletPoint::new(-0.5, 1.0).unwrap());
        let sc = Kernel::PoissonWavelet { n: 2 }.sign_changes(&neg).unwrap();
        assert_eq!(sc, vec![0.0]);
    }

    #[test]
    fn wavelet_sign_change_matches_kernel_zero() {
        let n = 3u32;
        let pt = WaveletPoint::new(0.7, -1.2).unwrap();
        let z = Kernel::PoissonWavelet { n }
            .sign_changes(&Point::Plane(pt))
            .unwrap()[0];
        let v = u_kernel(n, &pt, z).unwrap();
        assert!(v.abs() < 1e-15);
        assert!(poisson_psi(n, (z - pt.b) / pt.a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn laplace_transform_example() {
        let tv = transform(
            &Kernel::Laplace,
            |y| Complex64::new((-y / 2.0).exp(), 0.0),
            &Point::Real(0.5),
            &QuadSpec::Adaptive(AdaptiveSpec::default()),
        )
        .unwrap();
        assert!((tv.value.re - 1.0).abs() < 1e-10, "got {}", tv.value.re);
        assert!(tv.value.im.abs() < 1e-14);
        assert!(tv.error_estimate.unwrap() < 1e-9);
    }

    #[test]
    fn fourier_gaussian_self_transform() {
        for x in [0.0, 0.8, -1.7, 3.0] {
            let tv = transform(
                &Kernel::Fourier,
                |y| Complex64::new((-y * y / 2.0).exp(), 0.0),
                &Point::Real(x),
                &QuadSpec::Adaptive(AdaptiveSpec::default()),
            )
            .unwrap();
            let want = (-x * x / 2.0).exp();
            assert!((tv.value.re - want).abs() < 1e-10, "x={x}: {}", tv.value.re);
            assert!(tv.value.im.abs() < 1e-10);
        }
    }

    #[test]
    fn bargmann_reproducing_value() {
        let k0 = |y: f64| Complex64::new(Kernel::Bargmann.eval(&Point::Real(0.0), y).unwrap().re, 0.0);
        let tv = transform(
            &Kernel::Bargmann,
            k0,
            &Point::Real(1.0),
            &QuadSpec::Adaptive(AdaptiveSpec::default()),
        )
        .unwrap();
        assert!((tv.value.re - 1.0).abs() < 1e-9, "got {}", tv.value.re);
    }

    #[test]
    fn hermite_eigenrelation_spot() {
        let n = 3u32;
        let fhat = |y: f64| Complex64::new(hermite_poly(n, y) * (-y * y / 2.0).exp(), 0.0);
        let x = 1.3;
        let tv = transform(
            &Kernel::Fourier,
            fhat,
            &Point::Real(x),
            &QuadSpec::Adaptive(AdaptiveSpec::default()),
        )
        .unwrap();
        // i^3 = -i: value should be -i * h_3(x) e^(-x^2/2)
        let want = hermite_poly(n, x) * (-x * x / 2.0).exp();
        assert!(tv.value.re.abs() < 1e-9);
        assert!((tv.value.im + want).abs() < 1e-9, "{} vs {want}", tv.value.im);
    }

    #[test]
    fn transform_with_fixed_rule() {
        use crate::orthopoly::{classical_recurrence, WeightSpec};
        let rec = classical_recurrence(&WeightSpec::laguerre(0.0).unwrap(), 20).unwrap();
        let rule = rec.gauss_rule(20).unwrap();
        // rule weights carry e^-y, so this is the integral of e^-(1+1)y
        let tv = transform(
            &Kernel::Laplace,
            |_| Complex64::new(1.0, 0.0),
            &Point::Real(1.0),
            &QuadSpec::Rule(&rule),
        )
        .unwrap();
        assert!((tv.value.re - 0.5).abs() < 1e-12);
        assert!(tv.error_estimate.is_none());
    }

    #[test]
    fn transform_linearity() {
        let spec = QuadSpec::Adaptive(AdaptiveSpec::default());
        let f1 = |y: f64| Complex64::new((-y).exp(), 0.0);
        let f2 = |y: f64| Complex64::new(y * (-y * 1.5).exp(), 0.0);
        let x = Point::Real(0.7);
        let a = transform(&Kernel::Laplace, f1, &x, &spec).unwrap().value;
        let b = transform(&Kernel::Laplace, f2, &x, &spec).unwrap().value;
        let combo = transform(
            &Kernel::Laplace,
            |y| f1(y) * 2.0 - f2(y) * 3.0,
            &x,
            &spec,
        )
        .unwrap()
        .value;
        assert!((combo - (a * 2.0 - b * 3.0)).norm() < 1e-9);
    }

    #[test]
    fn walsh_transform_indicator_fixed_point() {
        let k = Kernel::Walsh { m_int: 3, m_frac: 3 };
        let ind = |y: f64| {
            Complex64::new(if (0.0..1.0).contains(&y) { 1.0 } else { 0.0 }, 0.0)
        };
        let inside = transform(
            &k,
            ind,
            &Point::Real(0.75),
            &QuadSpec::Adaptive(AdaptiveSpec::default()),
        )
        .unwrap();
        assert!((inside.value.re - 1.0).abs() < 1e-14);
        let outside = transform(
            &k,
            ind,
            &Point::Real(4.25),
            &QuadSpec::Adaptive(AdaptiveSpec::default()),
        )
        .unwrap();
        assert!(outside.value.re.abs() < 1e-14);
    }

    #[test]
    fn young_bound_examples() {
        let grids = YoungGrids::default();
        let (lhs, rhs) = bargmann_young_bound(|y| (-y * y).exp(), 2.0, 1.0, &grids).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-9), "{lhs} vs {rhs}");
        assert!(lhs > 0.1 * rhs, "bound should not be vacuous: {lhs} vs {rhs}");

        let ind = |y: f64| if (0.0..=1.0).contains(&y) { 1.0 } else { 0.0 };
        let (lhs, rhs) = bargmann_young_bound(ind, 1.0, 2.0, &grids).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-9), "{lhs} vs {rhs}");

        let (lhs, rhs) = bargmann_young_bound(|_| 0.0, 2.0, 2.0, &grids).unwrap();
        assert_eq!((lhs, rhs), (0.0, 0.0));

        assert!(matches!(
            bargmann_young_bound(|_| 1.0, 3.0, 3.0, &grids),
            Err(CoreError::ParameterInfeasible(_))
        ));
    }
}
