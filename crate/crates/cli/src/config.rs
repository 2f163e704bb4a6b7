//! Run configuration: JSON schema, command-line overrides, and resolution
//! into library types. Everything here is schema work; the first numerical
//! step happens in the command bodies.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use chromax_core::approx::{AuxWeight, FhatSpec, NormGrid, SummMode, TheoremParams};
use chromax_core::kernels::{Kernel, Point};
use chromax_core::orthopoly::stieltjes::Discretization;
use chromax_core::orthopoly::{Interval, WeightSpec};
use chromax_core::quad::AdaptiveSpec;
use chromax_core::wavelet::{WaveletPoint, WaveletWindow};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Recur,
    Quad,
    Basis,
    Expand,
    Reconstruct,
    Converge,
    Wavelet,
    Walsh,
    Diag,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Recur => "recur",
            CommandKind::Quad => "quad",
            CommandKind::Basis => "basis",
            CommandKind::Expand => "expand",
            CommandKind::Reconstruct => "reconstruct",
            CommandKind::Converge => "converge",
            CommandKind::Wavelet => "wavelet",
            CommandKind::Walsh => "walsh",
            CommandKind::Diag => "diag",
        }
    }
}

/// Values passed on the command line; they win over the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub degrees: Option<Vec<usize>>,
    pub kernel: Option<String>,
    pub n: Option<u32>,
    pub x0: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelCfg {
    Fourier,
    Laplace,
    Bargmann,
    Walsh { m_int: u32, m_frac: u32 },
    Poisson { n: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightCfg {
    Hermite,
    Laguerre { alpha: f64 },
    Jacobi { alpha: f64, beta: f64 },
    Freud { exponent: u32 },
    ScaledLaguerre { alpha: f64, scale: f64 },
    /// Flat density on the half line; the usual choice for wavelet segments.
    Unit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FhatCfg {
    ExpDecay { rate: f64 },
    Gaussian { sigma: f64 },
    Indicator { lo: f64, hi: f64 },
    Poly { coeffs: Vec<f64> },
    Samples { path: PathBuf },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AuxCfg {
    None,
    Theorem3,
    Theorem4,
    JacobiFactor { e: f64 },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeCfg {
    Partial,
    Cesaro,
    Dvp,
}

impl ModeCfg {
    pub fn to_mode(self) -> SummMode {
        match self {
            ModeCfg::Partial => SummMode::Partial,
            ModeCfg::Cesaro => SummMode::Cesaro,
            ModeCfg::Dvp => SummMode::Dvp,
        }
    }
}

/// Exponent block (p, q, s) plus the Theorem 3/4 shape parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExponentsCfg {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl Default for ExponentsCfg {
    fn default() -> Self {
        let th = TheoremParams::default();
        ExponentsCfg {
            p: 2.0,
            q: 2.0,
            s: 2.0,
            a: th.a,
            b: th.b,
            delta: th.delta,
            epsilon: th.epsilon,
        }
    }
}

/// Knobs the commands pass to the library where its interfaces accept them:
/// adaptive transform quadrature and the discretized recurrence builder.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesCfg {
    pub quad_rel_tol: f64,
    pub quad_max_refinements: u32,
    pub stieltjes_panels: usize,
    pub stieltjes_order: usize,
    pub stieltjes_rel_tol: f64,
    pub stieltjes_max_refinements: u32,
}

impl Default for TolerancesCfg {
    fn default() -> Self {
        let quad = AdaptiveSpec::default();
        let disc = Discretization::default();
        TolerancesCfg {
            quad_rel_tol: quad.rel_tol,
            quad_max_refinements: quad.max_refinements,
            stieltjes_panels: disc.initial_panels,
            stieltjes_order: disc.order,
            stieltjes_rel_tol: disc.rel_tol,
            stieltjes_max_refinements: disc.max_refinements,
        }
    }
}

fn default_panels() -> usize {
    32
}

fn default_order() -> usize {
    8
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormGridCfg {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub grade_lo: bool,
    #[serde(default)]
    pub grade_hi: bool,
}

impl NormGridCfg {
    pub fn to_grid(self) -> NormGrid {
        NormGrid {
            lo: self.lo,
            hi: self.hi,
            panels: self.panels,
            order: self.order,
            grade_lo: self.grade_lo,
            grade_hi: self.grade_hi,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalGridCfg {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl EvalGridCfg {
    pub fn to_points(self) -> Result<Vec<f64>, CliError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(CliError::config(format!(
                "eval_grid needs finite lo < hi, got ({}, {})",
                self.lo, self.hi
            )));
        }
        if self.points < 2 {
            return Err(CliError::config("eval_grid needs at least 2 points"));
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.lo + step * i as f64).collect())
    }
}

fn default_window_points() -> usize {
    6
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowCfg {
    pub a_lo: f64,
    pub a_hi: f64,
    pub b_lo: f64,
    pub b_hi: f64,
    #[serde(default = "default_window_points")]
    pub a_points: usize,
    #[serde(default = "default_window_points")]
    pub b_points: usize,
}

impl WindowCfg {
    pub fn to_window(self) -> Result<WaveletWindow, CliError> {
        let a = Interval::new(self.a_lo, self.a_hi)
            .map_err(|e| CliError::config(format!("window a-range: {e}")))?;
        let b = Interval::new(self.b_lo, self.b_hi)
            .map_err(|e| CliError::config(format!("window b-range: {e}")))?;
        WaveletWindow::new(a, b, self.a_points, self.b_points)
            .map_err(|e| CliError::config(format!("window: {e}")))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorCfg {
    pub a: f64,
    pub b: f64,
}

/// The full run configuration. Every field the run actually used is echoed
/// into the manifest after defaults and overrides are applied.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Optional tag; when present it must match the invoked command.
    pub command: Option<String>,
    pub kernel: Option<KernelCfg>,
    pub weight: Option<WeightCfg>,
    /// Second segment weight for the wavelet kernel; defaults to `weight`.
    pub weight2: Option<WeightCfg>,
    pub x0: Option<f64>,
    pub anchor: Option<AnchorCfg>,
    pub degrees: Option<Vec<usize>>,
    pub n_max: Option<usize>,
    pub fhat: Option<FhatCfg>,
    pub exponents: ExponentsCfg,
    pub weights: Option<AuxCfg>,
    pub mode: Option<ModeCfg>,
    pub norm_grid: Option<NormGridCfg>,
    pub eval_grid: Option<EvalGridCfg>,
    pub x_window: Option<[f64; 2]>,
    pub window: Option<WindowCfg>,
    pub tolerances: TolerancesCfg,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))
    }

    pub fn apply_overrides(&mut self, ov: Overrides) -> Result<(), CliError> {
        if let Some(out) = ov.out {
            self.out = Some(out);
        }
        if let Some(seed) = ov.seed {
            self.seed = Some(seed);
        }
        if let Some(degrees) = ov.degrees {
            self.degrees = Some(degrees);
        }
        if let Some(name) = &ov.kernel {
            self.kernel = Some(match name.as_str() {
                "fourier" => KernelCfg::Fourier,
                "laplace" => KernelCfg::Laplace,
                "bargmann" => KernelCfg::Bargmann,
                "walsh" => match self.kernel {
                    Some(KernelCfg::Walsh { m_int, m_frac }) => {
                        KernelCfg::Walsh { m_int, m_frac }
                    }
                    _ => KernelCfg::Walsh {
                        m_int: 4,
                        m_frac: 6,
                    },
                },
                "poisson" => {
                    let n = ov.n.unwrap_or(match self.kernel {
                        Some(KernelCfg::Poisson { n }) => n,
                        _ => 1,
                    });
                    KernelCfg::Poisson { n }
                }
                other => {
                    return Err(CliError::config(format!(
                        "unknown kernel '{other}'; expected fourier, laplace, bargmann, walsh, or poisson"
                    )))
                }
            });
        }
        if let Some(n) = ov.n {
            match &mut self.kernel {
                Some(KernelCfg::Poisson { n: slot }) => *slot = n,
                _ => {
                    return Err(CliError::config(
                        "the --n flag sets the poisson wavelet order; pick --kernel poisson",
                    ))
                }
            }
        }
        if let Some(x0) = ov.x0 {
            self.x0 = Some(x0);
        }
        Ok(())
    }

    /// Fills command-specific defaults in place so the manifest echoes the
    /// values the run actually used, then checks the schema-level rules.
    pub fn resolve(&mut self, command: CommandKind) -> Result<(), CliError> {
        if let Some(tag) = &self.command {
            if tag != command.name() {
                return Err(CliError::config(format!(
                    "config command tag '{tag}' does not match invoked command '{}'",
                    command.name()
                )));
            }
        }
        self.command = Some(command.name().to_string());
        if command == CommandKind::Walsh && self.kernel.is_none() {
            self.kernel = Some(KernelCfg::Walsh {
                m_int: 4,
                m_frac: 6,
            });
        }
        if command == CommandKind::Wavelet && self.kernel.is_none() {
            self.kernel = Some(KernelCfg::Poisson { n: 1 });
        }
        if matches!(self.kernel, Some(KernelCfg::Poisson { .. })) {
            if self.anchor.is_none() {
                self.anchor = Some(AnchorCfg { a: 1.0, b: 0.0 });
            }
            if self.weight.is_none() {
                self.weight = Some(WeightCfg::Unit);
            }
            if self.weight2.is_none() {
                self.weight2 = self.weight.clone();
            }
        } else if self.kernel.is_some() && self.x0.is_none() {
            self.x0 = Some(0.0);
        }
        if self.degrees.is_none()
            && matches!(
                command,
                CommandKind::Converge
                    | CommandKind::Reconstruct
                    | CommandKind::Wavelet
                    | CommandKind::Diag
            )
        {
            self.degrees = Some(vec![2, 4, 8, 16]);
        }
        if self.n_max.is_none() {
            self.n_max = Some(16);
        }
        if command == CommandKind::Wavelet && self.window.is_none() {
            self.window = Some(WindowCfg {
                a_lo: 0.6,
                a_hi: 1.4,
                b_lo: 0.0,
                b_hi: 0.6,
                a_points: 6,
                b_points: 6,
            });
        }
        if self.seed.is_none() {
            self.seed = Some(7);
        }
        if self.out.is_none() {
            self.out = Some(PathBuf::from("chromax_out"));
        }
        if self.mode.is_none()
            && matches!(command, CommandKind::Converge | CommandKind::Reconstruct)
        {
            self.mode = Some(ModeCfg::Dvp);
        }
        self.validate(command)
    }

    fn validate(&self, command: CommandKind) -> Result<(), CliError> {
        if let Some(degrees) = &self.degrees {
            if degrees.is_empty() {
                return Err(CliError::config("degree list must not be empty"));
            }
            if degrees[0] == 0 {
                return Err(CliError::config("degrees must be at least 1"));
            }
            if degrees.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::config("degree list must increase strictly"));
            }
        }
        if self.n_max == Some(0) {
            return Err(CliError::config("n_max must be at least 1"));
        }
        if let Some(KernelCfg::Walsh { m_int, m_frac }) = self.kernel {
            if m_int + m_frac == 0 || m_int + m_frac > 22 {
                return Err(CliError::config(
                    "walsh kernel needs 1 <= m_int + m_frac <= 22",
                ));
            }
        }
        match command {
            CommandKind::Basis | CommandKind::Reconstruct => {
                if matches!(self.kernel, Some(KernelCfg::Poisson { .. })) {
                    return Err(CliError::config(
                        "half-plane kernels run through the wavelet command",
                    ));
                }
                if self.eval_grid.is_none() {
                    return Err(CliError::config(format!(
                        "{} needs an eval_grid block",
                        command.name()
                    )));
                }
            }
            CommandKind::Converge => {
                if matches!(self.kernel, Some(KernelCfg::Poisson { .. })) {
                    return Err(CliError::config(
                        "half-plane kernels run through the wavelet command",
                    ));
                }
                if self.norm_grid.is_none() {
                    return Err(CliError::config("converge needs a norm_grid block"));
                }
            }
            CommandKind::Wavelet => {
                if !matches!(self.kernel, Some(KernelCfg::Poisson { .. })) {
                    return Err(CliError::config("wavelet needs the poisson kernel"));
                }
            }
            CommandKind::Walsh => {
                let Some(KernelCfg::Walsh { m_int, m_frac }) = self.kernel else {
                    return Err(CliError::config("walsh needs the walsh kernel"));
                };
                if m_int == 0 || m_frac == 0 {
                    return Err(CliError::config(
                        "the walsh suite needs m_int >= 1 and m_frac >= 1",
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel, CliError> {
        match &self.kernel {
            Some(KernelCfg::Fourier) => Ok(Kernel::Fourier),
            Some(KernelCfg::Laplace) => Ok(Kernel::Laplace),
            Some(KernelCfg::Bargmann) => Ok(Kernel::Bargmann),
            Some(KernelCfg::Walsh { m_int, m_frac }) => Ok(Kernel::Walsh {
                m_int: *m_int,
                m_frac: *m_frac,
            }),
            Some(KernelCfg::Poisson { n }) => Ok(Kernel::PoissonWavelet { n: *n }),
            None => Err(CliError::config("this command needs a kernel block")),
        }
    }

    pub fn point(&self) -> Result<Point, CliError> {
        if matches!(self.kernel, Some(KernelCfg::Poisson { .. })) {
            let anchor = self.anchor.ok_or_else(|| {
                CliError::config("the poisson kernel needs an anchor block")
            })?;
            let pt = WaveletPoint::new(anchor.a, anchor.b)
                .map_err(|e| CliError::config(format!("anchor: {e}")))?;
            Ok(Point::Plane(pt))
        } else {
            Ok(Point::Real(self.x0.unwrap_or(0.0)))
        }
    }

    pub fn weight(&self) -> Result<WeightSpec, CliError> {
        match &self.weight {
            Some(cfg) => build_weight(cfg),
            None => Err(CliError::config("this command needs a weight block")),
        }
    }

    /// Segment weight list: one entry for line kernels, two for the wavelet.
    pub fn segment_weights(&self) -> Result<Vec<WeightSpec>, CliError> {
        let first = self.weight()?;
        if matches!(self.kernel, Some(KernelCfg::Poisson { .. })) {
            let second = match &self.weight2 {
                Some(cfg) => build_weight(cfg)?,
                None => self.weight()?,
            };
            Ok(vec![first, second])
        } else {
            Ok(vec![first])
        }
    }

    pub fn fhat(&self) -> Result<FhatSpec, CliError> {
        let Some(cfg) = &self.fhat else {
            return Err(CliError::config("this command needs an fhat block"));
        };
        let spec = match cfg {
            FhatCfg::ExpDecay { rate } => FhatSpec::ExpDecay { rate: *rate },
            FhatCfg::Gaussian { sigma } => FhatSpec::Gaussian { sigma: *sigma },
            FhatCfg::Indicator { lo, hi } => FhatSpec::Indicator { lo: *lo, hi: *hi },
            FhatCfg::Poly { coeffs } => FhatSpec::Poly {
                coeffs: coeffs.clone(),
            },
            FhatCfg::Samples { path } => load_samples(path)?,
        };
        spec.validate()
            .map_err(|e| CliError::config(format!("fhat: {e}")))?;
        Ok(spec)
    }

    pub fn aux_weights(&self) -> Result<(AuxWeight, AuxWeight), CliError> {
        let recipe = self.weights.as_ref().unwrap_or(&AuxCfg::None);
        match recipe {
            AuxCfg::None => Ok((AuxWeight::One, AuxWeight::One)),
            AuxCfg::JacobiFactor { e } => {
                Ok((AuxWeight::JacobiFactor { e: *e }, AuxWeight::One))
            }
            AuxCfg::Theorem3 | AuxCfg::Theorem4 => {
                let Some(Point::Real(x0)) = self.point().ok() else {
                    return Err(CliError::config(
                        "theorem weight recipes need a real expansion point",
                    ));
                };
                let ex = &self.exponents;
                let params = TheoremParams {
                    a: ex.a,
                    b: ex.b,
                    delta: ex.delta,
                    epsilon: ex.epsilon,
                };
                let built = match recipe {
                    AuxCfg::Theorem3 => {
                        chromax_core::approx::theorem3_weights(ex.p, ex.q, x0, &params)
                    }
                    _ => chromax_core::approx::theorem4_weights(ex.p, ex.q, x0, &params),
                };
                built.map_err(|e| CliError::config(format!("weights: {e}")))
            }
        }
    }

    pub fn discretization(&self) -> Discretization {
        Discretization {
            initial_panels: self.tolerances.stieltjes_panels,
            order: self.tolerances.stieltjes_order,
            rel_tol: self.tolerances.stieltjes_rel_tol,
            max_refinements: self.tolerances.stieltjes_max_refinements,
        }
    }

    pub fn adaptive(&self) -> AdaptiveSpec {
        AdaptiveSpec {
            rel_tol: self.tolerances.quad_rel_tol,
            max_refinements: self.tolerances.quad_max_refinements,
        }
    }

    pub fn degrees(&self) -> Result<&[usize], CliError> {
        self.degrees
            .as_deref()
            .ok_or_else(|| CliError::config("this command needs a degree list"))
    }

    pub fn n_max(&self) -> usize {
        self.n_max.unwrap_or(16)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(7)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("chromax_out"))
    }
}

fn build_weight(cfg: &WeightCfg) -> Result<WeightSpec, CliError> {
    let built = match cfg {
        WeightCfg::Hermite => Ok(WeightSpec::hermite()),
        WeightCfg::Laguerre { alpha } => WeightSpec::laguerre(*alpha),
        WeightCfg::Jacobi { alpha, beta } => WeightSpec::jacobi(*alpha, *beta),
        WeightCfg::Freud { exponent } => WeightSpec::freud(*exponent),
        WeightCfg::ScaledLaguerre { alpha, scale } => {
            WeightSpec::scaled_laguerre(*alpha, *scale)
        }
        WeightCfg::Unit => Ok(WeightSpec::generic(Interval::half_line(), |_| 1.0)),
    };
    built.map_err(|e| CliError::config(format!("weight: {e}")))
}

fn load_samples(path: &Path) -> Result<FhatSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::config(format!("cannot read samples {}: {e}", path.display()))
    })?;
    let mut ys = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(|c: char| c == ',' || c.is_whitespace());
        let mut next = |what: &str| -> Result<f64, CliError> {
            parts
                .by_ref()
                .find(|p| !p.is_empty())
                .ok_or_else(|| {
                    CliError::config(format!(
                        "samples {} line {}: missing {what}",
                        path.display(),
                        lineno + 1
                    ))
                })?
                .parse()
                .map_err(|e| {
                    CliError::config(format!(
                        "samples {} line {}: {e}",
                        path.display(),
                        lineno + 1
                    ))
                })
        };
        ys.push(next("abscissa")?);
        values.push(next("value")?);
    }
    Ok(FhatSpec::Samples { ys, values })
}
