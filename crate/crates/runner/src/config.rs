//! Scenario configuration: strict JSON, materialized defaults, validation.
//!
//! Parsing runs in two stages: the common blocks are deserialized with
//! unknown keys rejected, then the `study` block is read against the
//! schema selected by `kind`. Every default is written back into the
//! returned value, so [`ScenarioConfig::to_canonical_json`] shows exactly
//! what a run will use.

use std::fmt;
use std::path::PathBuf;

use b4nl::analysis::{geomspace, IllPosedParams};
use b4nl::evolution::EvolveConfig;
use b4nl::grid::DEFAULT_MAX_POINTS;
use b4nl::initial::InitialData;
use b4nl::observables::ObservableKind;
use b4nl::{Convention, EquationParams, Exponent, Grid, NormSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{RunError, RunResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Evolve,
    Smalldisp,
    Decay,
    Scaling,
    Illposed,
    Scatter,
    Inequality,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Evolve,
        ScenarioKind::Smalldisp,
        ScenarioKind::Decay,
        ScenarioKind::Scaling,
        ScenarioKind::Illposed,
        ScenarioKind::Scatter,
        ScenarioKind::Inequality,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Evolve => "evolve",
            ScenarioKind::Smalldisp => "smalldisp",
            ScenarioKind::Decay => "decay",
            ScenarioKind::Scaling => "scaling",
            ScenarioKind::Illposed => "illposed",
            ScenarioKind::Scatter => "scatter",
            ScenarioKind::Inequality => "inequality",
        }
    }

    fn needs_grid(self) -> bool {
        self != ScenarioKind::Illposed
    }

    fn needs_integrator(self) -> bool {
        matches!(self, ScenarioKind::Evolve | ScenarioKind::Smalldisp | ScenarioKind::Scatter)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Filled from `extents` when omitted.
    #[serde(default)]
    pub dim: Option<usize>,
    pub extents: Vec<f64>,
    pub points: Vec<usize>,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

fn default_max_points() -> usize {
    DEFAULT_MAX_POINTS
}

impl GridConfig {
    pub fn build(&self) -> RunResult<Grid> {
        Grid::with_options(&self.extents, &self.points, self.convention, self.max_points)
            .map_err(|e| RunError::invalid("grid.points", e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "default_ceiling")]
    pub amplitude_ceiling: f64,
}

fn yes() -> bool {
    true
}

fn default_ceiling() -> f64 {
    1e6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Used when the command line gives no `--out`.
    #[serde(default)]
    pub directory: Option<PathBuf>,
    #[serde(default = "one")]
    pub record_every: usize,
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    #[serde(default = "yes")]
    pub final_snapshot: bool,
}

fn one() -> usize {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: None, record_every: 1, snapshot_every: None, final_snapshot: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveStudy {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmalldispStudy {
    #[serde(default = "SmalldispStudy::default_nu")]
    pub nu: Vec<f64>,
    /// Sobolev order `k` of the error norm.
    #[serde(default = "SmalldispStudy::default_order")]
    pub sobolev_order: f64,
    /// Times at which the growth of `‖w⁰(t)‖_{Ḣ²}` is fitted.
    #[serde(default = "SmalldispStudy::default_growth")]
    pub growth_times: Vec<f64>,
}

impl SmalldispStudy {
    fn default_nu() -> Vec<f64> {
        vec![0.2, 0.1, 0.05]
    }
    fn default_order() -> f64 {
        2.0
    }
    fn default_growth() -> Vec<f64> {
        geomspace(10.0, 1000.0, 8)
    }
}

impl Default for SmalldispStudy {
    fn default() -> Self {
        Self { nu: Self::default_nu(), sobolev_order: Self::default_order(), growth_times: Self::default_growth() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayStudy {
    #[serde(default = "DecayStudy::default_times")]
    pub times: Vec<f64>,
}

impl DecayStudy {
    fn default_times() -> Vec<f64> {
        geomspace(5.0, 50.0, 10)
    }
}

impl Default for DecayStudy {
    fn default() -> Self {
        Self { times: Self::default_times() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingStudy {
    /// Dimension for the exact exponents.
    #[serde(default = "ScalingStudy::default_dimension")]
    pub dimension: u32,
    #[serde(default = "ScalingStudy::default_norms")]
    pub norms: Vec<NormSpec>,
    /// Dilation factors (powers of two) for the measured ratios.
    #[serde(default = "ScalingStudy::default_h")]
    pub h: Vec<f64>,
    #[serde(default)]
    pub x0: Vec<f64>,
}

impl ScalingStudy {
    fn default_dimension() -> u32 {
        8
    }
    fn default_norms() -> Vec<NormSpec> {
        ["Hdot^2", "Z", "W", "M", "N", "S^2", "L^2", "L^4"].iter().map(|s| s.parse().expect("valid norm")).collect()
    }
    fn default_h() -> Vec<f64> {
        vec![2.0, 4.0]
    }
}

impl Default for ScalingStudy {
    fn default() -> Self {
        Self { dimension: 8, norms: Self::default_norms(), h: Self::default_h(), x0: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IllposedStudy {
    #[serde(default = "IllposedStudy::default_dimensions")]
    pub dimensions: Vec<u32>,
    /// Exact decimals or fractions, e.g. `"1e-2"` or `"1/100"`.
    #[serde(default = "IllposedStudy::default_epsilon")]
    pub epsilon: Vec<String>,
    #[serde(default = "IllposedStudy::default_nu")]
    pub nu: Vec<String>,
    #[serde(default = "IllposedStudy::default_t_nu")]
    pub t_nu: String,
}

impl IllposedStudy {
    fn default_dimensions() -> Vec<u32> {
        vec![9, 10, 12]
    }
    fn default_epsilon() -> Vec<String> {
        vec!["1e-1".into(), "1e-2".into()]
    }
    fn default_nu() -> Vec<String> {
        vec!["1e-2".into(), "1e-3".into()]
    }
    fn default_t_nu() -> String {
        "100".into()
    }
}

impl Default for IllposedStudy {
    fn default() -> Self {
        Self {
            dimensions: Self::default_dimensions(),
            epsilon: Self::default_epsilon(),
            nu: Self::default_nu(),
            t_nu: Self::default_t_nu(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterStudy {
    /// Windows `[0, T]` for the wave limit; the largest must equal `integrator.t_end`.
    #[serde(default)]
    pub horizons: Vec<f64>,
    #[serde(default)]
    pub defect_pairs: Vec<[f64; 2]>,
    #[serde(default = "yes")]
    pub round_trip: bool,
    /// The inverse wave operator iterates on `[fraction · T, T]`.
    #[serde(default = "ScatterStudy::default_fraction")]
    pub inverse_start_fraction: f64,
    #[serde(default = "ScatterStudy::default_frames")]
    pub inverse_frames: usize,
    #[serde(default = "ScatterStudy::default_tol")]
    pub inverse_tol: f64,
    #[serde(default = "ScatterStudy::default_iters")]
    pub inverse_max_iters: usize,
}

impl ScatterStudy {
    fn default_fraction() -> f64 {
        0.5
    }
    fn default_frames() -> usize {
        201
    }
    fn default_tol() -> f64 {
        1e-12
    }
    fn default_iters() -> usize {
        50
    }
}

impl Default for ScatterStudy {
    fn default() -> Self {
        Self {
            horizons: Vec::new(),
            defect_pairs: Vec::new(),
            round_trip: true,
            inverse_start_fraction: Self::default_fraction(),
            inverse_frames: Self::default_frames(),
            inverse_tol: Self::default_tol(),
            inverse_max_iters: Self::default_iters(),
        }
    }
}

/// Ratio measured over the ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InequalityTest {
    /// `‖|∇|^{2/q} e^{itΔ²}u₀‖_{L^q L^r} / ‖u₀‖_{L²}`.
    StrichartzGain {
        #[serde(default = "InequalityTest::default_q")]
        q: Exponent,
        #[serde(default = "InequalityTest::default_r")]
        r: Exponent,
        #[serde(default = "InequalityTest::default_window")]
        window: f64,
        #[serde(default = "InequalityTest::default_samples")]
        samples: usize,
    },
    /// `|M^i| / (‖u‖²_{L²} ‖u‖²_{Ḣ^{1/2}})`.
    InteractionMorawetz {},
    /// `‖S_σ f‖_{L⁴} / ‖|∇|^{−σ} f‖_{L⁴}`.
    SquareFunction {
        #[serde(default = "InequalityTest::default_sigma")]
        sigma: f64,
    },
}

impl InequalityTest {
    fn default_q() -> Exponent {
        Exponent::from_integer(4)
    }
    fn default_r() -> Exponent {
        Exponent::Infinite
    }
    fn default_window() -> f64 {
        1.0
    }
    fn default_samples() -> usize {
        65
    }
    fn default_sigma() -> f64 {
        1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityStudy {
    #[serde(default = "InequalityStudy::default_size")]
    pub ensemble_size: usize,
    #[serde(default = "InequalityStudy::default_test")]
    pub test: InequalityTest,
}

impl InequalityStudy {
    fn default_size() -> usize {
        20
    }
    fn default_test() -> InequalityTest {
        InequalityTest::StrichartzGain {
            q: InequalityTest::default_q(),
            r: InequalityTest::default_r(),
            window: InequalityTest::default_window(),
            samples: InequalityTest::default_samples(),
        }
    }
}

impl Default for InequalityStudy {
    fn default() -> Self {
        Self { ensemble_size: Self::default_size(), test: Self::default_test() }
    }
}

/// Study parameters; the variant always matches the scenario kind.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Study {
    Evolve(EvolveStudy),
    Smalldisp(SmalldispStudy),
    Decay(DecayStudy),
    Scaling(ScalingStudy),
    Illposed(IllposedStudy),
    Scatter(ScatterStudy),
    Inequality(InequalityStudy),
}

impl Study {
    fn default_for(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::Evolve => Study::Evolve(EvolveStudy::default()),
            ScenarioKind::Smalldisp => Study::Smalldisp(SmalldispStudy::default()),
            ScenarioKind::Decay => Study::Decay(DecayStudy::default()),
            ScenarioKind::Scaling => Study::Scaling(ScalingStudy::default()),
            ScenarioKind::Illposed => Study::Illposed(IllposedStudy::default()),
            ScenarioKind::Scatter => Study::Scatter(ScatterStudy::default()),
            ScenarioKind::Inequality => Study::Inequality(InequalityStudy::default()),
        }
    }

    fn parse(kind: ScenarioKind, value: serde_json::Value) -> RunResult<Self> {
        fn read<T: DeserializeOwned>(value: serde_json::Value) -> RunResult<T> {
            serde_path_to_error::deserialize(value).map_err(|e| schema_error("study", e))
        }
        Ok(match kind {
            ScenarioKind::Evolve => Study::Evolve(read(value)?),
            ScenarioKind::Smalldisp => Study::Smalldisp(read(value)?),
            ScenarioKind::Decay => Study::Decay(read(value)?),
            ScenarioKind::Scaling => Study::Scaling(read(value)?),
            ScenarioKind::Illposed => Study::Illposed(read(value)?),
            ScenarioKind::Scatter => Study::Scatter(read(value)?),
            ScenarioKind::Inequality => Study::Inequality(read(value)?),
        })
    }
}

fn default_observables() -> Vec<ObservableKind> {
    ObservableKind::defaults()
}

/// Document layout before the study block is resolved.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: ScenarioKind,
    #[serde(default)]
    grid: Option<GridConfig>,
    #[serde(default)]
    equation: EquationParams,
    #[serde(default)]
    integrator: Option<IntegratorConfig>,
    #[serde(default)]
    initial: InitialData,
    #[serde(default = "default_observables")]
    observables: Vec<ObservableKind>,
    #[serde(default)]
    output: OutputConfig,
    #[serde(default)]
    study: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub grid: Option<GridConfig>,
    pub equation: EquationParams,
    pub integrator: Option<IntegratorConfig>,
    pub initial: InitialData,
    pub observables: Vec<ObservableKind>,
    pub output: OutputConfig,
    pub study: Study,
}

fn schema_error(prefix: &str, e: serde_path_to_error::Error<serde_json::Error>) -> RunError {
    let path = e.path().to_string();
    let key = match (prefix, path.as_str()) {
        ("", p) => p.to_string(),
        (pre, ".") => pre.to_string(),
        (pre, p) => format!("{pre}.{p}"),
    };
    let inner = e.into_inner();
    if inner.is_syntax() || inner.is_eof() {
        RunError::Syntax { line: inner.line(), column: inner.column(), message: inner.to_string() }
    } else {
        RunError::Schema { key, message: inner.to_string() }
    }
}

/// Strict parse: unknown keys rejected, defaults materialized, ranges validated.
pub fn parse_config(text: &str) -> RunResult<ScenarioConfig> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| RunError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let raw: RawConfig = serde_path_to_error::deserialize(value).map_err(|e| schema_error("", e))?;
    let study = match raw.study {
        Some(v) => Study::parse(raw.kind, v)?,
        None => Study::default_for(raw.kind),
    };
    let mut cfg = ScenarioConfig {
        kind: raw.kind,
        grid: raw.grid,
        equation: raw.equation,
        integrator: raw.integrator,
        initial: raw.initial,
        observables: raw.observables,
        output: raw.output,
        study,
    };
    cfg.materialize();
    cfg.validate()?;
    Ok(cfg)
}

fn pad(v: &mut Vec<f64>, dim: usize) {
    if v.is_empty() {
        *v = vec![0.0; dim];
    }
}

impl ScenarioConfig {
    fn materialize(&mut self) {
        let Some(grid) = self.grid.as_mut() else { return };
        let dim = *grid.dim.get_or_insert(grid.extents.len());
        let spacing = grid
            .extents
            .iter()
            .zip(&grid.points)
            .map(|(l, &n)| l / n.max(1) as f64)
            .fold(f64::INFINITY, f64::min);
        match &mut self.initial {
            InitialData::Gaussian(g) | InitialData::Annulus { base: g, .. } => {
                pad(&mut g.center, dim);
                pad(&mut g.phase_velocity, dim);
            }
            InitialData::Broadband(b) => pad(&mut b.center, dim),
            _ => {}
        }
        for obs in &mut self.observables {
            if let ObservableKind::Morawetz { delta, center } = obs {
                delta.get_or_insert(spacing);
                pad(center, dim);
            }
        }
        if let Study::Scaling(s) = &mut self.study {
            pad(&mut s.x0, dim);
        }
        if let (Study::Scatter(s), Some(integ)) = (&mut self.study, &self.integrator) {
            if s.horizons.is_empty() {
                s.horizons = vec![integ.t_end];
            }
        }
    }

    /// Checks every range a module would reject, naming the config key.
    pub fn validate(&self) -> RunResult<()> {
        let grid = match (&self.grid, self.kind.needs_grid()) {
            (Some(g), _) => {
                if g.dim != Some(g.extents.len()) || g.points.len() != g.extents.len() {
                    return Err(RunError::invalid(
                        "grid.dim",
                        format!(
                            "dim = {:?} but {} extents and {} point counts were given",
                            g.dim,
                            g.extents.len(),
                            g.points.len()
                        ),
                    ));
                }
                if let Some(axis) = g.points.iter().position(|&n| n < 4 || n % 2 != 0) {
                    return Err(RunError::invalid(
                        "grid.points",
                        format!("axis {axis} has {} points; need an even count ≥ 4", g.points[axis]),
                    ));
                }
                if let Some(axis) = g.extents.iter().position(|&l| !(l.is_finite() && l > 0.0)) {
                    return Err(RunError::invalid("grid.extents", format!("axis {axis} has extent {}", g.extents[axis])));
                }
                Some(g.build()?)
            }
            (None, true) => return Err(RunError::invalid("grid", format!("required for kind {}", self.kind))),
            (None, false) => None,
        };
        self.equation.validate().map_err(|e| RunError::invalid("equation", e.to_string()))?;
        if self.output.record_every == 0 {
            return Err(RunError::invalid("output.record_every", "must be ≥ 1"));
        }
        if self.output.snapshot_every == Some(0) {
            return Err(RunError::invalid("output.snapshot_every", "must be ≥ 1"));
        }
        if self.kind.needs_integrator() {
            self.evolve_config()?;
        }
        if let Some(grid) = &grid {
            self.initial.validate(grid).map_err(|e| RunError::invalid("initial", e.to_string()))?;
            if let InitialData::Snapshot { path } = &self.initial {
                if !path.is_file() {
                    return Err(RunError::invalid("initial.snapshot.path", format!("{} does not exist", path.display())));
                }
            }
            for (i, obs) in self.observables.iter().enumerate() {
                let key = format!("observables[{i}]");
                obs.validate(grid.dim()).map_err(|e| RunError::invalid(&key, e.to_string()))?;
                if let ObservableKind::LocalMass { radius, .. } = obs {
                    if let Some(l) = grid.extents().iter().find(|&&l| 2.0 * radius > 0.5 * l) {
                        return Err(RunError::invalid(
                            &key,
                            format!("ball of radius 2R = {} exceeds the box half-extent {}", 2.0 * radius, 0.5 * l),
                        ));
                    }
                }
            }
        }
        self.validate_study(grid.as_ref())
    }

    fn validate_study(&self, grid: Option<&Grid>) -> RunResult<()> {
        match &self.study {
            Study::Evolve(_) => {}
            Study::Smalldisp(s) => {
                if s.nu.len() < 2 {
                    return Err(RunError::invalid("study.nu", "need at least two values for the fit"));
                }
                if let Some(nu) = s.nu.iter().find(|&&nu| !(nu > 0.0 && nu < 1.0)) {
                    return Err(RunError::invalid("study.nu", format!("ν = {nu} outside (0, 1)")));
                }
                let dim = grid.map_or(1, |g| g.dim()) as f64;
                if !(s.sobolev_order > dim / 2.0) {
                    return Err(RunError::invalid(
                        "study.sobolev_order",
                        format!("k = {} must exceed n/2 = {}", s.sobolev_order, dim / 2.0),
                    ));
                }
                if s.growth_times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                    return Err(RunError::invalid("study.growth_times", "times must be positive"));
                }
            }
            Study::Decay(d) => {
                if d.times.len() < 2 || d.times.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
                    return Err(RunError::invalid("study.times", "need at least two positive times"));
                }
            }
            Study::Scaling(s) => {
                if s.h.is_empty() {
                    return Err(RunError::invalid("study.h", "need at least one dilation factor"));
                }
                for &h in &s.h {
                    b4nl::littlewood_paley::DyadicScale::from_value(h)
                        .map_err(|e| RunError::invalid("study.h", e.to_string()))?;
                }
                if let Some(g) = grid {
                    if s.x0.len() != g.dim() {
                        return Err(RunError::invalid("study.x0", format!("needs {} components", g.dim())));
                    }
                }
                for (i, norm) in s.norms.iter().enumerate() {
                    b4nl::analysis::scaling_exponent(norm, s.dimension)
                        .map_err(|e| RunError::invalid(&format!("study.norms[{i}]"), e.to_string()))?;
                }
            }
            Study::Illposed(s) => {
                if let Some(n) = s.dimensions.iter().find(|&&n| n <= 8) {
                    return Err(RunError::invalid("study.dimensions", format!("n = {n}; the algebra needs n ≥ 9")));
                }
                for eps in &s.epsilon {
                    for nu in &s.nu {
                        IllPosedParams::parse(9, eps, nu, &s.t_nu)
                            .map_err(|e| RunError::invalid("study", format!("ε = {eps}, ν = {nu}: {e}")))?;
                    }
                }
            }
            Study::Scatter(s) => {
                let integ = self.integrator.as_ref().expect("checked by needs_integrator");
                let stride = self
                    .output
                    .snapshot_every
                    .ok_or_else(|| RunError::invalid("output.snapshot_every", "required for kind scatter"))?;
                let spacing = stride as f64 * integ.dt;
                let last = s.horizons.iter().cloned().fold(0.0, f64::max);
                if (last - integ.t_end).abs() > 1e-9 * integ.t_end {
                    return Err(RunError::invalid("study.horizons", "the largest horizon must equal integrator.t_end"));
                }
                for &h in &s.horizons {
                    let m = (h / spacing).round();
                    if !(h > 0.0) || (m * spacing - h).abs() > 1e-9 * h || (m as usize) < 4 {
                        return Err(RunError::invalid(
                            "study.horizons",
                            format!("horizon {h} must be at least four stored-field spacings ({spacing}) and a multiple of it"),
                        ));
                    }
                }
                for pair in &s.defect_pairs {
                    if pair.iter().any(|&t| !(0.0..=integ.t_end).contains(&t)) {
                        return Err(RunError::invalid("study.defect_pairs", format!("{pair:?} outside [0, t_end]")));
                    }
                }
                if !(s.inverse_start_fraction >= 0.0 && s.inverse_start_fraction < 1.0) {
                    return Err(RunError::invalid("study.inverse_start_fraction", "must lie in [0, 1)"));
                }
                if s.inverse_frames < 3 || s.inverse_max_iters == 0 || !(s.inverse_tol > 0.0) {
                    return Err(RunError::invalid("study", "inverse operator needs frames ≥ 3, max_iters ≥ 1, tol > 0"));
                }
            }
            Study::Inequality(s) => {
                if s.ensemble_size == 0 {
                    return Err(RunError::invalid("study.ensemble_size", "must be ≥ 1"));
                }
                if !matches!(self.initial, InitialData::Random(_)) {
                    return Err(RunError::invalid("initial", "kind inequality draws its ensemble from initial.random"));
                }
                match &s.test {
                    InequalityTest::StrichartzGain { q, r, window, samples } => {
                        let n = grid.map_or(1, |g| g.dim()) as u32;
                        if !b4nl::norms::is_admissible(*q, *r, n) {
                            return Err(RunError::invalid("study.test", format!("({q}, {r}) is not admissible in n = {n}")));
                        }
                        if !(*window > 0.0) || *samples < 2 {
                            return Err(RunError::invalid("study.test", "need window > 0 and samples ≥ 2"));
                        }
                    }
                    InequalityTest::SquareFunction { sigma } if !sigma.is_finite() => {
                        return Err(RunError::invalid("study.test.sigma", "must be finite"));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Integrator settings combined with the output strides.
    pub fn evolve_config(&self) -> RunResult<EvolveConfig> {
        let integ = self
            .integrator
            .as_ref()
            .ok_or_else(|| RunError::invalid("integrator", format!("required for kind {}", self.kind)))?;
        let cfg = EvolveConfig {
            params: self.equation,
            dt: integ.dt,
            t_end: integ.t_end,
            dealias: integ.dealias,
            record_every: self.output.record_every,
            snapshot_every: self.output.snapshot_every,
            amplitude_ceiling: integ.amplitude_ceiling,
        };
        cfg.validate().map_err(|e| RunError::invalid("integrator", e.to_string()))?;
        Ok(cfg)
    }

    pub fn build_grid(&self) -> RunResult<Option<Grid>> {
        self.grid.as_ref().map(GridConfig::build).transpose()
    }

    /// Canonical serialization: fixed key order, two-space indent, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }

    /// Replaces the seed of random initial data.
    pub fn override_seed(&mut self, seed: u64) {
        if let InitialData::Random(r) = &mut self.initial {
            r.seed = seed;
        }
    }

    /// Seeds that determine the run, in use order.
    pub fn seeds(&self) -> Vec<u64> {
        match (&self.initial, &self.study) {
            (InitialData::Random(r), Study::Inequality(s)) => {
                (0..s.ensemble_size as u64).map(|i| r.seed.wrapping_add(i)).collect()
            }
            (InitialData::Random(r), _) => vec![r.seed],
            _ => Vec::new(),
        }
    }
}
