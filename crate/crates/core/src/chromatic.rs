//! Expansions around a point x0 with the point-dependent weight
//! w_x0 = w * Psi(x0, .)^2: per-segment orthonormal systems, expansion
//! coefficients, basis functions, reconstruction, and kernel-expansion
//! residuals.
//!
//! Kernels whose sign alternates at x0 are split at the sign-change points
//! into segments. Coefficients carry the segment sign and `reconstruct`
//! applies it a second time, so the two factors cancel in the sum.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::approx::{summability_multipliers, SummMode};
use crate::dyadic::{walsh_eval, DyadicGrid, DyadicRational};
use crate::error::{CoreError, Result};
use crate::kernels::{Kernel, Point};
use crate::orthopoly::stieltjes::{
    stieltjes_from_discrete, stieltjes_recurrence, truncated_support, Discretization,
};
use crate::orthopoly::tridiag::symmetric_eigenvalues;
use crate::orthopoly::{
    classical_recurrence, Family, Interval, QuadratureRule, Recurrence, WeightSpec,
};
use crate::quad::{gauss_legendre, panel_mesh, AdaptiveSpec, Panel};
use crate::special::gamma;

const MAX_DEGREE: usize = 64;

/// One maximal interval on which Psi(x0, .) keeps its sign, together with
/// the orthonormal system for the local weight.
pub struct Segment {
    pub interval: Interval,
    pub sign: f64,
    /// w_x0 on this segment: base weight times Psi(x0, .)^2.
    pub weight: WeightSpec,
    pub base_weight: WeightSpec,
    pub rec: Recurrence,
    pub quad: QuadratureRule,
    mesh: Vec<Panel>,
}

/// Per-segment basis-function values phi_0(x), ..., phi_nmax(x) at one x.
pub struct BasisColumns {
    pub per_segment: Vec<Vec<Complex64>>,
    pub error_estimate: f64,
}

/// Per-segment expansion coefficients.
#[derive(Debug, Clone)]
pub struct ChromaticCoefficients {
    pub per_segment: Vec<Vec<Complex64>>,
}

impl ChromaticCoefficients {
    pub fn segment(&self, i: usize) -> &[Complex64] {
        &self.per_segment[i]
    }

    /// Coefficients of a single-segment basis.
    pub fn single(&self) -> &[Complex64] {
        assert_eq!(self.per_segment.len(), 1, "basis has multiple segments");
        &self.per_segment[0]
    }
}

/// Orthonormal expansion data around the point x0 for one kernel.
pub struct ChromaticBasis {
    kernel: Kernel,
    x0: Point,
    segments: Vec<Segment>,
    n_max: usize,
    quad_spec: AdaptiveSpec,
    cache: RwLock<HashMap<(u64, u64), Arc<BasisColumns>>>,
}

impl ChromaticBasis {
    /// Builds the per-segment weights, recurrences and quadratures for
    /// degrees 0..=n_max. `base_weights` holds either one weight shared by
    /// all segments or one entry per segment.
    pub fn build(
        kernel: Kernel,
        base_weights: &[WeightSpec],
        x0: Point,
        n_max: usize,
    ) -> Result<Self> {
        if n_max > MAX_DEGREE {
            return Err(CoreError::ParameterOutOfRange(format!(
                "expansion degree {n_max} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let zeros = kernel.sign_changes(&x0)?;
        let support = kernel.support_at(&x0)?;
        let mut edges = Vec::with_capacity(zeros.len() + 2);
        edges.push(support.lo);
        edges.extend(zeros.iter().copied());
        edges.push(support.hi);
        let count = edges.len() - 1;
        if base_weights.is_empty() || (base_weights.len() != 1 && base_weights.len() != count) {
            return Err(CoreError::ParameterOutOfRange(format!(
                "need 1 or {count} base weights, got {}",
                base_weights.len()
            )));
        }
        let mut segments = Vec::with_capacity(count);
        for i in 0..count {
            let iv = Interval::new(edges[i], edges[i + 1])?;
            let base = if base_weights.len() == 1 {
                base_weights[0].clone()
            } else {
                base_weights[i].clone()
            };
            segments.push(build_segment(&kernel, &x0, iv, base, n_max)?);
        }
        Ok(ChromaticBasis {
            kernel,
            x0,
            segments,
            n_max,
            quad_spec: AdaptiveSpec::default(),
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn x0(&self) -> &Point {
        &self.x0
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Expansion coefficients c^(i)_m = sign_i * integral of
    /// fhat * p_m * sqrt(w_x0) over segment i, for m = 0..=n.
    pub fn coefficients<F>(&self, fhat: F, n: usize) -> Result<ChromaticCoefficients>
    where
        F: Fn(f64) -> Complex64,
    {
        self.check_degree(n)?;
        let mut per_segment = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            let mut vals = if let Kernel::Walsh { .. } = self.kernel {
                walsh_cells(seg, n, |y, p, sb| fhat(y) * (p * sb))
            } else {
                let root = |y: f64| seg.weight.eval(y).max(0.0).sqrt();
                self.integrate_columns(seg, n, &root, &|y| fhat(y), MeshTweak::None)?
                    .0
            };
            for v in &mut vals {
                *v *= seg.sign;
            }
            per_segment.push(vals);
        }
        Ok(ChromaticCoefficients { per_segment })
    }

    /// Derivative value of order m at x: the sum over segments of
    /// integral of fhat * p_m * sqrt(base) * conj(Psi(x, .)).
    pub fn derivative_at<F>(&self, fhat: F, m: usize, x: &Point) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
    {
        self.check_degree(m)?;
        self.kernel.support_at(x)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for seg in &self.segments {
            if let Kernel::Walsh { m_int, m_frac } = self.kernel {
                let xv = x.real().ok_or_else(|| kernel_point_error(&self.kernel, x))?;
                let t = DyadicRational::from_real(xv, m_int, m_frac)?;
                let vals = walsh_cells_character(seg, m, &t, |y, p, sb| fhat(y) * (p * sb));
                acc += vals[m];
            } else {
                let root = |y: f64| seg.base_weight.eval(y).max(0.0).sqrt();
                let factor = |y: f64| {
                    let k = self.kernel.eval(x, y).map(|v| v.conj()).unwrap_or_default();
                    fhat(y) * k
                };
                let tweak = self.mesh_tweak(x);
                let (vals, _) = self.integrate_columns(seg, m, &root, &factor, tweak)?;
                acc += vals[m];
            }
        }
        Ok(acc)
    }

    /// phi_m(x) summed over segments.
    pub fn basis_function(&self, m: usize, x: &Point) -> Result<Complex64> {
        self.check_degree(m)?;
        let cols = self.basis_columns(x)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for seg in &cols.per_segment {
            acc += seg[m];
        }
        Ok(acc)
    }

    /// All basis-function values at x, per segment, memoized.
    pub fn basis_columns(&self, x: &Point) -> Result<Arc<BasisColumns>> {
        self.kernel.support_at(x)?;
        let key = point_key(x);
        if let Ok(guard) = self.cache.read() {
            if let Some(hit) = guard.get(&key) {
                return Ok(hit.clone());
            }
        }
        let cols = Arc::new(self.compute_columns(x)?);
        if let Ok(mut guard) = self.cache.write() {
            return Ok(guard.entry(key).or_insert_with(|| cols.clone()).clone());
        }
        Ok(cols)
    }

    fn compute_columns(&self, x: &Point) -> Result<BasisColumns> {
        let mut per_segment = Vec::with_capacity(self.segments.len());
        let mut err = 0.0f64;
        for seg in &self.segments {
            if let Kernel::Walsh { m_int, m_frac } = self.kernel {
                let xv = x.real().ok_or_else(|| kernel_point_error(&self.kernel, x))?;
                let t = DyadicRational::from_real(xv, m_int, m_frac)?;
                let vals = walsh_cells_character(seg, self.n_max, &t, |_, p, sb| {
                    Complex64::new(p * sb, 0.0)
                });
                per_segment.push(vals);
            } else {
                let root = |y: f64| seg.weight.eval(y).max(0.0).sqrt();
                let factor = |y: f64| self.kernel.eval(x, y).map(|v| v.conj()).unwrap_or_default();
                let tweak = self.mesh_tweak(x);
                let (vals, e) = self.integrate_columns(seg, self.n_max, &root, &factor, tweak)?;
                err = err.max(e);
                per_segment.push(vals);
            }
        }
        Ok(BasisColumns {
            per_segment,
            error_estimate: err,
        })
    }

    /// Summed expansion: sum over segments i of sign_i times
    /// sum_m mu_m c^(i)_m phi^(i)_m(x), with multipliers from `mode`.
    pub fn reconstruct(
        &self,
        coeffs: &ChromaticCoefficients,
        x: &Point,
        n: usize,
        mode: SummMode,
    ) -> Result<Complex64> {
        if coeffs.per_segment.len() != self.segments.len() {
            return Err(CoreError::ParameterOutOfRange(format!(
                "coefficients carry {} segments, basis has {}",
                coeffs.per_segment.len(),
                self.segments.len()
            )));
        }
        let mu = summability_multipliers(n, mode)?;
        self.check_degree(mu.len() - 1)?;
        for c in &coeffs.per_segment {
            if c.len() < mu.len() {
                return Err(CoreError::DegreeOutOfRange {
                    requested: mu.len() - 1,
                    available: c.len(),
                });
            }
        }
        let cols = self.basis_columns(x)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, seg) in self.segments.iter().enumerate() {
            let mut seg_sum = Complex64::new(0.0, 0.0);
            for (j, m) in mu.iter().enumerate() {
                seg_sum += coeffs.per_segment[i][j] * cols.per_segment[i][j] * *m;
            }
            acc += seg_sum * seg.sign;
        }
        Ok(acc)
    }

    /// | conj(Psi(x,y)) - sum_i sum_{m<=n} phi^(i)_m(x) p^(i)_m(y)
    /// sqrt(w^(i)_x0(y)) |. Only the segment containing y contributes, the
    /// other weights vanish there.
    pub fn kernel_expansion_residual(&self, x: &Point, y: f64, n: usize) -> Result<f64> {
        self.check_degree(n)?;
        let idx = self
            .segments
            .iter()
            .position(|s| s.interval.contains(y))
            .ok_or_else(|| {
                CoreError::DomainViolation(format!(
                    "y = {y} lies outside every segment interior"
                ))
            })?;
        let cols = self.basis_columns(x)?;
        let seg = &self.segments[idx];
        let p = seg.rec.eval_orthonormal(n, y)?;
        let sw = seg.weight.eval(y).max(0.0).sqrt();
        let mut acc = self.kernel.eval(x, y)?.conj();
        for m in 0..=n {
            acc -= cols.per_segment[idx][m] * (p[m] * sw);
        }
        Ok(acc.norm())
    }

    /// Closed-form basis function for the Laplace kernel over a
    /// Laguerre-type base weight y^alpha e^(-s y):
    /// sum_k a_k Gamma(alpha/2 + k + 1) / (x + x0 + s/2)^(alpha/2 + k + 1)
    /// with a_k the power coefficients of p_m.
    pub fn laplace_closed_form(&self, m: usize, x: f64) -> Result<f64> {
        if !matches!(self.kernel, Kernel::Laplace) {
            return Err(CoreError::KernelMismatch(format!(
                "closed-form basis functions exist for the Laplace kernel, not {:?}",
                self.kernel
            )));
        }
        self.check_degree(m)?;
        let seg = &self.segments[0];
        let (alpha, scale) = match &seg.base_weight.family {
            Family::Laguerre { alpha } => (*alpha, 1.0),
            Family::ScaledLaguerre { alpha, scale } => (*alpha, *scale),
            other => {
                return Err(CoreError::KernelMismatch(format!(
                    "closed form needs a Laguerre-type base weight, got {other:?}"
                )))
            }
        };
        let x0 = self.x0.real().expect("Laplace expansion point is real");
        let coeffs = power_coefficients(&seg.rec, m)?;
        let pole = x + x0 + scale / 2.0;
        let mut acc = 0.0;
        for (k, a) in coeffs.iter().enumerate() {
            let e = alpha / 2.0 + k as f64 + 1.0;
            acc += a * gamma(e) / pole.powf(e);
        }
        Ok(acc)
    }

    /// Condition number of the Gram matrix of p_0..p_upto under the segment
    /// quadrature. Near 1 when quadrature and recurrence agree.
    pub fn gram_condition(&self, segment: usize, upto: usize) -> Result<f64> {
        if segment >= self.segments.len() {
            return Err(CoreError::ParameterOutOfRange(format!(
                "segment index {segment} out of range ({} segments)",
                self.segments.len()
            )));
        }
        self.check_degree(upto)?;
        let seg = &self.segments[segment];
        let dim = upto + 1;
        let mut g = vec![vec![0.0f64; dim]; dim];
        for (y, w) in seg.quad.nodes.iter().zip(&seg.quad.weights) {
            let p = seg.rec.eval_orthonormal(upto, *y)?;
            for a in 0..dim {
                for b in a..dim {
                    g[a][b] += w * p[a] * p[b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                g[a][b] = g[b][a];
            }
        }
        let eigs = symmetric_eigenvalues(&g)?;
        let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
        let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
        if !(min > 0.0) {
            return Ok(f64::INFINITY);
        }
        Ok(max / min)
    }

    fn check_degree(&self, m: usize) -> Result<()> {
        if m > self.n_max {
            return Err(CoreError::DegreeOutOfRange {
                requested: m,
                available: self.n_max,
            });
        }
        Ok(())
    }

    fn mesh_tweak(&self, x: &Point) -> MeshTweak {
        match (&self.kernel, x) {
            (Kernel::Fourier, Point::Real(v)) => MeshTweak::Oscillatory(*v),
            // The kernel switches on at the point's offset; a panel edge must
            // sit there or panel halving stalls on the jump.
            (Kernel::PoissonWavelet { .. }, Point::Plane(pt)) => MeshTweak::SplitAt(pt.b),
            _ => MeshTweak::None,
        }
    }

    /// Composite integration of p_m(y) * root(y) * factor(y) for all
    /// m = 0..=n_upto at once, with panel doubling until the worst column
    /// stabilizes.
    fn integrate_columns(
        &self,
        seg: &Segment,
        n_upto: usize,
        root: &dyn Fn(f64) -> f64,
        factor: &dyn Fn(f64) -> Complex64,
        tweak: MeshTweak,
    ) -> Result<(Vec<Complex64>, f64)> {
        let order = 16;
        let mut mesh = match tweak {
            MeshTweak::Oscillatory(x) => osc_refine(&seg.mesh, x),
            MeshTweak::SplitAt(point) => split_mesh(&seg.mesh, point),
            MeshTweak::None => seg.mesh.clone(),
        };
        let level = |mesh: &[Panel]| -> Result<Vec<Complex64>> {
            let rule = gauss_legendre(order);
            let mut acc = vec![Complex64::new(0.0, 0.0); n_upto + 1];
            for panel in mesh {
                let c = 0.5 * (panel.lo + panel.hi);
                let hl = 0.5 * (panel.hi - panel.lo);
                for (t, w) in rule.0.iter().zip(&rule.1) {
                    let y = c + hl * t;
                    let scale = factor(y) * (root(y) * w * hl);
                    if scale == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let p = seg.rec.eval_orthonormal(n_upto, y)?;
                    for (m, pv) in p.iter().enumerate() {
                        acc[m] += scale * *pv;
                    }
                }
            }
            Ok(acc)
        };
        let mut prev = level(&mesh)?;
        let mut last_err = f64::INFINITY;
        for _ in 0..self.quad_spec.max_refinements {
            mesh = mesh
                .iter()
                .flat_map(|p| {
                    let mid = 0.5 * (p.lo + p.hi);
                    [Panel::new(p.lo, mid), Panel::new(mid, p.hi)]
                })
                .collect();
            let cur = level(&mesh)?;
            let scale = cur.iter().map(|v| v.norm()).fold(0.0, f64::max);
            last_err = cur
                .iter()
                .zip(&prev)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if last_err <= self.quad_spec.rel_tol * (1.0 + scale) {
                return Ok((cur, last_err));
            }
            prev = cur;
        }
        Err(CoreError::QuadratureNonConvergence {
            estimate: last_err,
            tolerance: self.quad_spec.rel_tol,
        })
    }
}

fn kernel_point_error(kernel: &Kernel, x: &Point) -> CoreError {
    CoreError::KernelMismatch(format!("{kernel:?} cannot be evaluated at {x:?}"))
}

fn point_key(x: &Point) -> (u64, u64) {
    match x {
        Point::Real(v) => (0, v.to_bits()),
        Point::Plane(p) => (p.a.to_bits(), p.b.to_bits()),
    }
}

/// Exact cell sums over the dyadic grid: sum over cells of
/// term(midpoint, p_m(midpoint), sqrt(base(midpoint))) * width.
fn walsh_cells<T>(seg: &Segment, n_upto: usize, term: T) -> Vec<Complex64>
where
    T: Fn(f64, f64, f64) -> Complex64,
{
    let mut acc = vec![Complex64::new(0.0, 0.0); n_upto + 1];
    for (y, w) in seg.quad.nodes.iter().zip(&seg.quad.weights) {
        // quad weights carry base * width; the sqrt(base) factor inside
        // `term` wants the bare cell width alongside.
        let base = seg.base_weight.eval(*y);
        if base <= 0.0 {
            continue;
        }
        let width = w / base;
        let p = seg
            .rec
            .eval_orthonormal(n_upto, *y)
            .expect("degree checked on entry");
        let sb = base.sqrt();
        for (m, pv) in p.iter().enumerate() {
            acc[m] += term(*y, *pv, sb) * width;
        }
    }
    acc
}

fn walsh_cells_character<T>(
    seg: &Segment,
    n_upto: usize,
    t: &DyadicRational,
    term: T,
) -> Vec<Complex64>
where
    T: Fn(f64, f64, f64) -> Complex64,
{
    let grid = DyadicGrid {
        m_int: t.m_int(),
        m_frac: t.m_frac(),
    };
    let mut acc = vec![Complex64::new(0.0, 0.0); n_upto + 1];
    for (r, (y, w)) in seg.quad.nodes.iter().zip(&seg.quad.weights).enumerate() {
        let base = seg.base_weight.eval(*y);
        if base <= 0.0 {
            continue;
        }
        let width = w / base;
        let left = grid.left_point(r).expect("cell index within grid");
        let chi = walsh_eval(t, &left);
        let p = seg
            .rec
            .eval_orthonormal(n_upto, *y)
            .expect("degree checked on entry");
        let sb = base.sqrt();
        for (m, pv) in p.iter().enumerate() {
            acc[m] += term(*y, *pv, sb) * (chi * width);
        }
    }
    acc
}

#[derive(Clone, Copy)]
enum MeshTweak {
    None,
    Oscillatory(f64),
    SplitAt(f64),
}

fn split_mesh(mesh: &[Panel], point: f64) -> Vec<Panel> {
    let mut out = Vec::with_capacity(mesh.len() + 1);
    for p in mesh {
        if point > p.lo && point < p.hi {
            out.push(Panel::new(p.lo, point));
            out.push(Panel::new(point, p.hi));
        } else {
            out.push(*p);
        }
    }
    out
}

fn osc_refine(mesh: &[Panel], x: f64) -> Vec<Panel> {
    let cap = PI / (1.0 + x.abs());
    let mut out = Vec::with_capacity(mesh.len());
    for p in mesh {
        let pieces = ((p.len() / cap).ceil() as usize).clamp(1, 4096);
        let h = p.len() / pieces as f64;
        for j in 0..pieces {
            let a = p.lo + h * j as f64;
            let b = if j + 1 == pieces { p.hi } else { p.lo + h * (j + 1) as f64 };
            out.push(Panel::new(a, b));
        }
    }
    out
}

fn build_segment(
    kernel: &Kernel,
    x0: &Point,
    iv: Interval,
    base: WeightSpec,
    n_max: usize,
) -> Result<Segment> {
    let quad_size = 2 * n_max + 4;
    let probe = if iv.is_bounded() {
        0.5 * (iv.lo + iv.hi)
    } else if iv.lo.is_finite() {
        iv.lo + 1.0
    } else if iv.hi.is_finite() {
        iv.hi - 1.0
    } else {
        0.0
    };
    let sign = kernel.eval(x0, probe)?.re.signum();
    if sign == 0.0 {
        return Err(CoreError::DomainViolation(format!(
            "kernel vanishes at the segment probe point {probe}"
        )));
    }

    if let Kernel::Walsh { m_int, m_frac } = kernel {
        let grid = DyadicGrid::new(*m_int, *m_frac)?;
        let width = grid.cell_width();
        let cells = grid.cell_count();
        let mut nodes = Vec::with_capacity(cells as usize);
        let mut weights = Vec::with_capacity(cells as usize);
        for r in 0..cells {
            let mid = grid.midpoint(r);
            nodes.push(mid);
            weights.push(base.eval(mid) * width);
        }
        let (alpha, beta) = stieltjes_from_discrete(&nodes, &weights, quad_size + 1)?;
        let rec = Recurrence::new(alpha, beta, iv)?;
        let quad = QuadratureRule::new(nodes, weights, iv)?;
        let b = base.clone();
        let weight = WeightSpec::generic(iv, move |y| b.eval(y));
        return Ok(Segment {
            interval: iv,
            sign,
            weight,
            base_weight: base,
            rec,
            quad,
            mesh: Vec::new(),
        });
    }

    let (weight, rec) = segment_system(kernel, x0, iv, &base, quad_size)?;
    let quad = rec.gauss_rule(quad_size)?;
    for &y in &quad.nodes {
        let v = kernel.eval(x0, y)?.re;
        if !(sign * v > 0.0) {
            return Err(CoreError::DomainViolation(format!(
                "kernel sign flips inside a segment at y = {y}"
            )));
        }
    }
    // Column integrands carry sqrt(w_x0), which decays at half the rate of
    // w_x0 itself, so the truncation window must come from the square root.
    let w = weight.clone();
    let root_weight = WeightSpec::generic(iv, move |y| w.eval(y).max(0.0).sqrt());
    let (tlo, thi) = truncated_support(&root_weight, 2 * n_max + 2)?;
    let mesh = panel_mesh(tlo, thi, 32, iv.lo.is_finite(), iv.hi.is_finite(), 40);
    Ok(Segment {
        interval: iv,
        sign,
        weight,
        base_weight: base,
        rec,
        quad,
        mesh,
    })
}

/// Picks a closed-form recurrence for w_x0 when one exists, otherwise
/// falls back to discretized orthonormalization.
fn segment_system(
    kernel: &Kernel,
    x0: &Point,
    iv: Interval,
    base: &WeightSpec,
    quad_size: usize,
) -> Result<(WeightSpec, Recurrence)> {
    match (kernel, x0, &base.family) {
        (Kernel::Laplace, Point::Real(xv), Family::Laguerre { alpha }) => {
            let w = WeightSpec::scaled_laguerre(*alpha, 1.0 + 2.0 * xv)?;
            let rec = classical_recurrence(&w, quad_size)?;
            Ok((w, rec))
        }
        (Kernel::Laplace, Point::Real(xv), Family::ScaledLaguerre { alpha, scale }) => {
            let w = WeightSpec::scaled_laguerre(*alpha, scale + 2.0 * xv)?;
            let rec = classical_recurrence(&w, quad_size)?;
            Ok((w, rec))
        }
        (
            Kernel::Fourier,
            Point::Real(_),
            Family::Hermite
            | Family::Laguerre { .. }
            | Family::Jacobi { .. }
            | Family::ScaledLaguerre { .. },
        ) => {
            let rec = classical_recurrence(base, quad_size)?.with_scaled_mass(1.0 / (2.0 * PI))?;
            let b = base.clone();
            let w = WeightSpec::generic(iv, move |y| b.eval(y) / (2.0 * PI));
            Ok((w, rec))
        }
        (Kernel::Bargmann, Point::Real(z0), Family::Hermite) => {
            let rate = 2f64.sqrt();
            let center = z0 / rate;
            let amp = 1.0 / PI.sqrt();
            let rec = Recurrence::gaussian(amp, rate, center, quad_size + 1)?;
            let w = WeightSpec::generic(iv, move |y| {
                amp * (-2.0 * (y - center) * (y - center)).exp()
            });
            Ok((w, rec))
        }
        _ => {
            let k = *kernel;
            let x0c = *x0;
            let b = base.clone();
            let w = WeightSpec::generic(iv, move |y| {
                let psi2 = k.eval(&x0c, y).map(|v| v.norm_sqr()).unwrap_or(0.0);
                b.eval(y) * psi2
            });
            let rec = stieltjes_recurrence(&w, quad_size, &Discretization::default())?;
            Ok((w, rec))
        }
    }
}

/// Power-basis coefficients of the orthonormal polynomial p_m.
fn power_coefficients(rec: &Recurrence, m: usize) -> Result<Vec<f64>> {
    if m >= rec.pairs() {
        return Err(CoreError::DegreeOutOfRange {
            requested: m,
            available: rec.pairs(),
        });
    }
    let beta = rec.betas();
    let alpha = rec.alphas();
    let mut prev: Vec<f64> = Vec::new();
    let mut cur = vec![1.0 / beta[0].sqrt()];
    for k in 0..m {
        let mut next = vec![0.0; cur.len() + 1];
        for (j, c) in cur.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= alpha[k] * c;
        }
        let sb = beta[k].sqrt();
        for (j, c) in prev.iter().enumerate() {
            next[j] -= sb * c;
        }
        let inv = 1.0 / beta[k + 1].sqrt();
        for v in &mut next {
            *v *= inv;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}
