//! One body per command. Each returns the fixed CSV header plus the data
//! rows; artifact writing and exit-code mapping live in main.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chromax_core::approx::{convergence_experiment, ConvergenceConfig};
use chromax_core::chromatic::ChromaticBasis;
use chromax_core::dyadic::{
    dyadic_add, dyadic_derivative_partial, walsh_eval, DyadicGrid, DyadicRational,
};
use chromax_core::kernels::{Point, QuadSpec};
use chromax_core::orthopoly::stieltjes::stieltjes_recurrence;
use chromax_core::orthopoly::{classical_recurrence, gamma_lambda, Recurrence, WeightSpec};
use chromax_core::wavelet::{
    admissibility_numeric, identity_residuals, split_basis, wavelet_domain_norm,
    wavelet_partial_sum, wavelet_transform, WaveletPoint,
};

use crate::config::{CommandKind, KernelCfg, ModeCfg, RunConfig};
use crate::output::float_cell;
use crate::CliError;

pub fn execute(
    command: CommandKind,
    cfg: &RunConfig,
) -> Result<(&'static str, Vec<String>), CliError> {
    match command {
        CommandKind::Recur => recur(cfg),
        CommandKind::Quad => quad(cfg),
        CommandKind::Basis => basis(cfg),
        CommandKind::Expand => expand(cfg),
        CommandKind::Reconstruct => reconstruct(cfg),
        CommandKind::Converge => converge(cfg),
        CommandKind::Wavelet => wavelet(cfg),
        CommandKind::Walsh => walsh(cfg),
        CommandKind::Diag => diag(cfg),
    }
}

fn base_recurrence(cfg: &RunConfig, w: &WeightSpec, n_max: usize) -> Result<Recurrence, CliError> {
    match classical_recurrence(w, n_max) {
        Ok(rec) => Ok(rec),
        Err(_) => Ok(stieltjes_recurrence(w, n_max, &cfg.discretization())?),
    }
}

fn build_basis(cfg: &RunConfig) -> Result<ChromaticBasis, CliError> {
    let kernel = cfg.kernel()?;
    let weights = cfg.segment_weights()?;
    let point = cfg.point()?;
    Ok(ChromaticBasis::build(kernel, &weights, point, cfg.n_max())?)
}

/// Segment recurrences of the configured basis, or the plain recurrence of
/// the base weight when no kernel is selected.
fn segment_recurrences(cfg: &RunConfig) -> Result<Vec<Recurrence>, CliError> {
    if cfg.kernel.is_some() {
        let basis = build_basis(cfg)?;
        Ok(basis.segments().iter().map(|s| s.rec.clone()).collect())
    } else {
        let w = cfg.weight()?;
        Ok(vec![base_recurrence(cfg, &w, cfg.n_max())?])
    }
}

fn recur(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let mut rows = Vec::new();
    for (s, rec) in segment_recurrences(cfg)?.iter().enumerate() {
        for k in 0..rec.pairs() {
            rows.push(format!(
                "{s},{k},{},{}",
                float_cell(rec.alphas()[k]),
                float_cell(rec.betas()[k])
            ));
        }
    }
    Ok(("segment,k,alpha,beta", rows))
}

fn quad(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let mut rows = Vec::new();
    for (s, rec) in segment_recurrences(cfg)?.iter().enumerate() {
        let rule = rec.gauss_rule(cfg.n_max())?;
        for (i, (node, weight)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            rows.push(format!(
                "{s},{i},{},{}",
                float_cell(*node),
                float_cell(*weight)
            ));
        }
    }
    Ok(("segment,index,node,weight", rows))
}

fn basis(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let grid = cfg
        .eval_grid
        .expect("validated by resolve")
        .to_points()?;
    let basis = build_basis(cfg)?;
    let mut rows = Vec::new();
    for m in 0..=cfg.n_max() {
        for &x in &grid {
            let v = basis.basis_function(m, &Point::Real(x))?;
            rows.push(format!(
                "{m},{},{},{}",
                float_cell(x),
                float_cell(v.re),
                float_cell(v.im)
            ));
        }
    }
    Ok(("m,x,re,im", rows))
}

fn expand(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let spec = cfg.fhat()?;
    let basis = build_basis(cfg)?;
    let coeffs = basis.coefficients(|y| Complex64::new(spec.eval(y), 0.0), cfg.n_max())?;
    let mut rows = Vec::new();
    for (s, segment) in coeffs.per_segment.iter().enumerate() {
        for (m, c) in segment.iter().enumerate() {
            rows.push(format!(
                "{s},{m},{},{}",
                float_cell(c.re),
                float_cell(c.im)
            ));
        }
    }
    Ok(("segment,m,re,im", rows))
}

fn reconstruct(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let grid = cfg
        .eval_grid
        .expect("validated by resolve")
        .to_points()?;
    let degrees = cfg.degrees()?.to_vec();
    let mode = cfg.mode.unwrap_or(ModeCfg::Dvp);
    let top = *degrees.last().expect("validated non-empty");
    let needed = match mode {
        ModeCfg::Dvp => 2 * top - 1,
        _ => top,
    };
    let kernel = cfg.kernel()?;
    let weights = cfg.segment_weights()?;
    let point = cfg.point()?;
    let basis = ChromaticBasis::build(kernel, &weights, point, needed)?;
    let spec = cfg.fhat()?;
    let coeffs = basis.coefficients(|y| Complex64::new(spec.eval(y), 0.0), needed)?;
    let mut rows = Vec::new();
    for &n in &degrees {
        for &x in &grid {
            let v = basis.reconstruct(&coeffs, &Point::Real(x), n, mode.to_mode())?;
            rows.push(format!(
                "{n},{},{},{}",
                float_cell(x),
                float_cell(v.re),
                float_cell(v.im)
            ));
        }
    }
    Ok(("n,x,re,im", rows))
}

fn converge(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let ex = cfg.exponents;
    let (omega, rho_x) = cfg.aux_weights()?;
    let mut spec = ConvergenceConfig::new(
        cfg.kernel()?,
        cfg.weight()?,
        cfg.point()?,
        cfg.fhat()?,
        cfg.degrees()?.to_vec(),
        cfg.norm_grid.expect("validated by resolve").to_grid(),
    )
    .with_exponents(ex.p, ex.q, ex.s)
    .with_weights(omega, rho_x);
    if let Some([lo, hi]) = cfg.x_window {
        spec = spec.with_x_window(lo, hi);
    }
    if let Some(mode) = cfg.mode {
        spec.mode = mode.to_mode();
    }
    let report = convergence_experiment(&spec)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{}",
                r.n,
                float_cell(r.lhs_norm),
                float_cell(r.en_proxy),
                float_cell(r.ratio)
            )
        })
        .collect();
    Ok(("n,lhs_norm,en_proxy,ratio", rows))
}

fn wavelet(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let Some(KernelCfg::Poisson { n }) = cfg.kernel else {
        unreachable!("validated by resolve");
    };
    let anchor = cfg.anchor.expect("validated by resolve");
    let pt = WaveletPoint::new(anchor.a, anchor.b)
        .map_err(|e| CliError::config(format!("anchor: {e}")))?;
    let spec = cfg.fhat()?;
    let f = move |y: f64| spec.eval(y);
    let weights = cfg.segment_weights()?;
    let degrees = cfg.degrees()?.to_vec();
    let window = cfg.window.expect("validated by resolve").to_window()?;
    let top = *degrees.last().expect("validated non-empty");
    let basis = split_basis(
        n,
        anchor.a,
        anchor.b,
        weights[0].clone(),
        weights[1].clone(),
        top,
    )?;
    let quad = QuadSpec::Adaptive(cfg.adaptive());
    let direct_anchor = wavelet_transform(&f, n, &pt, &quad)?.value.re;
    let mut rows = Vec::new();
    for &n_terms in &degrees {
        let window_error = wavelet_domain_norm(
            |a, b| {
                let at = WaveletPoint::new(a, b).expect("window excludes a = 0");
                let direct = wavelet_transform(&f, n, &at, &quad)
                    .expect("transform over the window")
                    .value
                    .re;
                wavelet_partial_sum(&basis, &f, n_terms, &at)
                    .expect("partial sum over the window")
                    - direct
            },
            n,
            &window,
        )?;
        let anchor_error =
            (wavelet_partial_sum(&basis, &f, n_terms, &pt)? - direct_anchor).abs();
        rows.push(format!(
            "{n_terms},{},{}",
            float_cell(window_error),
            float_cell(anchor_error)
        ));
    }
    Ok(("n_terms,window_error,anchor_error", rows))
}

fn walsh(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let Some(KernelCfg::Walsh { m_int, m_frac }) = cfg.kernel else {
        unreachable!("validated by resolve");
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let draw = |rng: &mut ChaCha8Rng| -> DyadicRational {
        let count = rng.gen_range(0..7);
        let idx: Vec<i32> = (0..count)
            .map(|_| rng.gen_range(-(m_int as i32)..m_frac as i32))
            .collect();
        DyadicRational::from_indices(&idx, m_int, m_frac).expect("indices within caps")
    };
    let mut rows = Vec::new();

    let mut character = 0.0f64;
    for _ in 0..1000 {
        let y = draw(&mut rng);
        let t1 = draw(&mut rng);
        let t2 = draw(&mut rng);
        let lhs = walsh_eval(&y, &dyadic_add(&t1, &t2));
        let rhs = walsh_eval(&y, &t1) * walsh_eval(&y, &t2);
        character = character.max((lhs - rhs).abs());
    }
    rows.push(format!(
        "character_identity_max_abs_residual,{}",
        float_cell(character)
    ));

    let grid = DyadicGrid::new(m_int, m_frac)?;
    let cells: Vec<f64> = (0..grid.cell_count())
        .map(|r| if grid.midpoint(r) < 1.0 { 1.0 } else { 0.0 })
        .collect();
    let dual = grid.transform_all(&cells)?;
    let mut indicator = 0.0f64;
    for (j, v) in dual.iter().enumerate() {
        let x = grid.dual_point(j)?.value();
        let want = if x < 1.0 { 1.0 } else { 0.0 };
        indicator = indicator.max((v - want).abs());
    }
    rows.push(format!(
        "indicator_transform_max_abs_residual,{}",
        float_cell(indicator)
    ));

    let mut eigen = 0.0f64;
    for _ in 0..50 {
        let order = rng.gen_range(1..=8.min(m_int));
        let count = rng.gen_range(1..=order);
        let idx: Vec<i32> = (0..count)
            .map(|_| -1 - rng.gen_range(0..order as i32))
            .collect();
        let y = DyadicRational::from_indices(&idx, m_int, m_frac)?;
        let xidx: Vec<i32> = (0..rng.gen_range(0..5))
            .map(|_| rng.gen_range(-(m_int as i32)..m_frac as i32))
            .collect();
        let x = DyadicRational::from_indices(&xidx, m_int, m_frac)?;
        let d = dyadic_derivative_partial(|t| walsh_eval(&y, t), &x, order)?;
        eigen = eigen.max((d - y.value() * walsh_eval(&y, &x)).abs());
    }
    rows.push(format!(
        "eigenvalue_identity_max_abs_residual,{}",
        float_cell(eigen)
    ));

    let functions: Vec<(&str, Vec<f64>)> = vec![
        (
            "exp",
            (0..grid.cell_count())
                .map(|r| (-grid.midpoint(r)).exp())
                .collect(),
        ),
        (
            "indicator",
            (0..grid.cell_count())
                .map(|r| if grid.midpoint(r) < 1.0 { 1.0 } else { 0.0 })
                .collect(),
        ),
        (
            "tent",
            (0..grid.cell_count())
                .map(|r| (1.0 - (grid.midpoint(r) - 2.0).abs()).max(0.0))
                .collect(),
        ),
        (
            "ramp_exp",
            (0..grid.cell_count())
                .map(|r| grid.midpoint(r) * (-grid.midpoint(r)).exp())
                .collect(),
        ),
        (
            "random_signs",
            (0..grid.cell_count())
                .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect(),
        ),
    ];
    let dual_width = (-(m_int as f64)).exp2();
    for p in [1.0, 2.0] {
        let mut margin = f64::INFINITY;
        for (_, cells) in &functions {
            let transformed = grid.transform_all(cells)?;
            let fnorm = cells
                .iter()
                .map(|v| v.abs().powf(p) * grid.cell_width())
                .sum::<f64>()
                .powf(1.0 / p);
            let dnorm = if p == 1.0 {
                transformed.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            } else {
                transformed
                    .iter()
                    .map(|v| v * v * dual_width)
                    .sum::<f64>()
                    .sqrt()
            };
            margin = margin.min(fnorm - dnorm);
        }
        rows.push(format!(
            "hausdorff_young_min_margin_p{},{}",
            p as u32,
            float_cell(margin)
        ));
    }
    Ok(("check,value", rows))
}

fn diag(cfg: &RunConfig) -> Result<(&'static str, Vec<String>), CliError> {
    let mut rows = Vec::new();
    if let Some(KernelCfg::Poisson { n }) = cfg.kernel {
        let anchor = cfg.anchor.expect("validated by resolve");
        let pt = WaveletPoint::new(anchor.a, anchor.b)
            .map_err(|e| CliError::config(format!("anchor: {e}")))?;
        rows.push(format!(
            "admissibility,{}",
            float_cell(admissibility_numeric(n)?)
        ));
        let probe = n as f64 + 0.3;
        let (binomial, operator) = identity_residuals(n, &pt, probe)?;
        rows.push(format!("binomial_residual,{}", float_cell(binomial)));
        if let Some(op) = operator {
            rows.push(format!("operator_residual,{}", float_cell(op)));
        }
        return Ok(("check,value", rows));
    }
    let w = cfg.weight()?;
    let degrees = cfg.degrees()?.to_vec();
    let top = *degrees.last().expect("validated non-empty");
    let rec = base_recurrence(cfg, &w, top)?;
    let grid = diag_grid(cfg, &rec)?;
    for &n in &degrees {
        let gl = gamma_lambda(&rec, |y| w.eval(y), |_| 1.0, n, &grid)?;
        rows.push(format!("gamma[{n}],{}", float_cell(gl.gamma)));
        rows.push(format!("lambda[{n}],{}", float_cell(gl.lambda)));
        rows.push(format!("ratio[{n}],{}", float_cell(gl.ratio)));
    }
    Ok(("check,value", rows))
}

/// Bounded supports get an arccos-spaced grid: the Christoffel sums these
/// diagnostics maximize oscillate on a uniform angular scale, so uniform x
/// spacing under-resolves them near the endpoints.
fn diag_grid(cfg: &RunConfig, rec: &Recurrence) -> Result<Vec<f64>, CliError> {
    let points = 4001usize;
    let iv = rec.interval();
    if iv.is_bounded() {
        let c = 0.5 * (iv.lo + iv.hi);
        let r = 0.5 * (iv.hi - iv.lo);
        let (th_lo, th_hi) = (0.04, std::f64::consts::PI - 0.04);
        return Ok((0..points)
            .map(|i| {
                let th = th_lo + (th_hi - th_lo) * i as f64 / (points - 1) as f64;
                c + r * th.cos()
            })
            .collect());
    }
    let Some(ng) = cfg.norm_grid else {
        return Err(CliError::config(
            "diag over an unbounded weight needs a norm_grid block for the sup range",
        ));
    };
    let step = (ng.hi - ng.lo) / (points - 1) as f64;
    Ok((0..points).map(|i| ng.lo + step * i as f64).collect())
}
