//! Experiment configuration files.
//!
//! The format is TOML: an optional top-level `command`, then flat sections
//! in square brackets with `key = value` lines. Lists are comma-separated
//! inside brackets. Unknown keys are errors.
//!
//! ```toml
//! command = "sweep"            # solve | sweep | uniqueness | consistency | duhamel | diagnose
//!
//! [domain]
//! a = -1.0
//! b = 1.0
//! n = 401
//! boundary = "dirichlet"       # dirichlet | periodic
//! face_average = "arithmetic"  # arithmetic | harmonic
//!
//! [coefficient]
//! background = "constant"      # constant (value) | affine (intercept, slope)
//! value = 1.0                  # | sinusoid (mean, amplitude, wavenumber, phase)
//! floor = 1.0                  # h0; defaults to the background minimum where known
//! atoms = [{ kind = "delta", location = 0.0, weight = 1.0 }]
//! # kinds: delta, delta2, jump (with left, right)
//!
//! [initial_data]
//! kind = "gaussian"            # gaussian (center, width) | mollified-step (center,
//! center = 0.2                 # half_width) | fourier-mode (mode) | file (path)
//! width = 0.2
//! amplitude = 1.0
//! regularize = true
//!
//! [time]
//! T = 0.1
//! dt = 0.001
//! scheme = "implicit-euler"    # implicit-euler | crank-nicolson
//! snapshots = 50
//!
//! [sweep]
//! ladder = [0.2, 0.1, 0.05, 0.025]
//!
//! [perturbation]               # uniqueness and duhamel
//! kind = "power-law"           # power-law (order) | superpolynomial | family
//! order = 3.0
//! target = "coefficient"       # coefficient | data | both
//! magnitude = 1.0
//! center = 0.5
//! width = 0.2
//!
//! [run]
//! epsilon = 0.1                # solve and duhamel
//! nodes = 16                   # duhamel quadrature nodes
//! fine_reference = false       # consistency against a 4x finer grid
//! seed = 0                     # random fields of diagnose
//!
//! [output]
//! dir = "out"
//! ```

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::coefficients::{validate_ladder, AtomKind};
use crate::experiments::{PerturbationKind, PerturbationSpec, PerturbationTarget};
use crate::grid::{Boundary, FaceAverage};
use crate::solver::Scheme;
use crate::{Background, Grid, SingularAtom, SingularCoefficient, SolveConfig};

/// Ladder used when `[sweep]` is absent.
pub const DEFAULT_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const DEFAULT_SNAPSHOTS: usize = 50;
pub const DEFAULT_NODES: usize = 16;
/// Largest grid accepted by the duhamel command.
pub const DUHAMEL_MAX_N: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Sweep,
    Uniqueness,
    Consistency,
    Duhamel,
    Diagnose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Uniqueness => "uniqueness",
            Command::Consistency => "consistency",
            Command::Duhamel => "duhamel",
            Command::Diagnose => "diagnose",
        }
    }

    fn uses_ladder(self) -> bool {
        matches!(
            self,
            Command::Sweep | Command::Uniqueness | Command::Consistency
        )
    }

    fn uses_epsilon(self) -> bool {
        matches!(self, Command::Solve | Command::Duhamel)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainConfig {
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub boundary: Boundary,
    pub face_average: FaceAverage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientConfig {
    pub background: Background,
    pub floor: f64,
    pub atoms: Vec<SingularAtom>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialDataKind {
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    MollifiedStep {
        center: f64,
        half_width: f64,
        amplitude: f64,
    },
    FourierMode {
        mode: u32,
        amplitude: f64,
    },
    /// Whitespace-separated nodal values, one per stored grid node.
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialDataConfig {
    pub kind: InitialDataKind,
    pub regularize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub final_time: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub snapshots: usize,
}

impl TimeConfig {
    pub fn solve_config(&self) -> crate::Result<SolveConfig> {
        SolveConfig::uniform(self.final_time, self.dt, self.scheme, self.snapshots)
    }
}

/// Either one perturbation or the family `k = 1, 2, 3, 4` plus a
/// superpolynomial case sharing target, magnitude and placement.
#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationConfig {
    Single(PerturbationSpec),
    Family {
        target: PerturbationTarget,
        magnitude: f64,
        center: f64,
        width: f64,
    },
}

/// Orders exercised by [`PerturbationConfig::Family`].
pub const FAMILY_ORDERS: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

impl PerturbationConfig {
    /// The perturbations to run, each with a short label.
    pub fn cases(&self) -> Vec<(String, PerturbationSpec)> {
        let label = |kind: PerturbationKind| match kind {
            PerturbationKind::PowerLaw { order } => format!("power-law-{order}"),
            PerturbationKind::Superpolynomial => "superpolynomial".to_string(),
        };
        match *self {
            PerturbationConfig::Single(spec) => vec![(label(spec.kind), spec)],
            PerturbationConfig::Family {
                target,
                magnitude,
                center,
                width,
            } => FAMILY_ORDERS
                .iter()
                .map(|&order| PerturbationKind::PowerLaw { order })
                .chain(std::iter::once(PerturbationKind::Superpolynomial))
                .map(|kind| {
                    (
                        label(kind),
                        PerturbationSpec {
                            kind,
                            target,
                            magnitude,
                            center,
                            width,
                        },
                    )
                })
                .collect(),
        }
    }
}

/// A fully validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub domain: DomainConfig,
    pub coefficient: CoefficientConfig,
    pub initial_data: InitialDataConfig,
    pub time: TimeConfig,
    pub ladder: Vec<f64>,
    pub perturbation: Option<PerturbationConfig>,
    pub epsilon: Option<f64>,
    pub nodes: usize,
    pub fine_reference: bool,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn grid(&self) -> crate::Result<Grid> {
        Grid::new(
            self.domain.a,
            self.domain.b,
            self.domain.n,
            self.domain.boundary,
        )
    }

    pub fn singular_coefficient(&self) -> crate::Result<SingularCoefficient> {
        let c = &self.coefficient;
        SingularCoefficient::new(c.background, c.floor, c.atoms.clone())
    }

    /// The built-in self-test problem: `h = 1`, `u0 = sin(pi x)` on the
    /// periodic interval `[-1, 1]`, Crank-Nicolson up to `T = 0.1`.
    pub fn diagnose_default() -> Self {
        Self {
            command: Command::Diagnose,
            domain: DomainConfig {
                a: -1.0,
                b: 1.0,
                n: 257,
                boundary: Boundary::Periodic,
                face_average: FaceAverage::Arithmetic,
            },
            coefficient: CoefficientConfig {
                background: Background::Constant { value: 1.0 },
                floor: 1.0,
                atoms: Vec::new(),
            },
            initial_data: InitialDataConfig {
                kind: InitialDataKind::FourierMode {
                    mode: 1,
                    amplitude: 1.0,
                },
                regularize: false,
            },
            time: TimeConfig {
                final_time: 0.1,
                dt: 1e-3,
                scheme: Scheme::CrankNicolson,
                snapshots: DEFAULT_SNAPSHOTS,
            },
            ladder: DEFAULT_LADDER.to_vec(),
            perturbation: None,
            epsilon: Some(0.1),
            nodes: DEFAULT_NODES,
            fine_reference: false,
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }

    /// TOML text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let raw = RawConfig::from(self);
        toml::to_string(&raw).expect("configuration values are always representable")
    }
}

/// Human-readable problems found while reading a configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub errors: Vec<String>,
}

impl ConfigError {
    fn one(msg: impl Into<String>) -> Self {
        Self {
            errors: vec![msg.into()],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.errors.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "config error: {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Formats `v` with three significant digits, without trailing zeros.
pub fn sig3(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let digits = 2 - v.abs().log10().floor() as i32;
    if digits >= 0 {
        let s = format!("{:.*}", digits as usize, v);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let scale = 10f64.powi(-digits);
        format!("{}", (v / scale).round() * scale)
    }
}

// ---------------------------------------------------------------------------
// Raw, serde-facing layout. Every field is optional so that defaults and
// "missing key" errors are handled in one place.

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain: Option<RawDomain>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficient: Option<RawCoefficient>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_data: Option<RawInitialData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    time: Option<RawTime>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    perturbation: Option<RawPerturbation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<RawRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<RawOutput>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    a: Option<f64>,
    b: Option<f64>,
    n: Option<i64>,
    boundary: Option<String>,
    face_average: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficient {
    background: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wavenumber: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase: Option<f64>,
    floor: Option<f64>,
    #[serde(default)]
    atoms: Vec<RawAtom>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    kind: String,
    location: f64,
    weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    left: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    right: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitialData {
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    center: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    regularize: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTime {
    #[serde(rename = "T")]
    final_time: Option<f64>,
    dt: Option<f64>,
    scheme: Option<String>,
    snapshots: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    ladder: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturbation {
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<f64>,
    target: Option<String>,
    magnitude: Option<f64>,
    center: Option<f64>,
    width: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    nodes: Option<i64>,
    fine_reference: Option<bool>,
    seed: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::DirichletZero => "dirichlet",
        Boundary::Periodic => "periodic",
    }
}

fn average_name(f: FaceAverage) -> &'static str {
    match f {
        FaceAverage::Arithmetic => "arithmetic",
        FaceAverage::Harmonic => "harmonic",
    }
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::ImplicitEuler => "implicit-euler",
        Scheme::CrankNicolson => "crank-nicolson",
    }
}

fn target_name(t: PerturbationTarget) -> &'static str {
    match t {
        PerturbationTarget::Coefficient => "coefficient",
        PerturbationTarget::Data => "data",
        PerturbationTarget::Both => "both",
    }
}

impl From<&ExperimentConfig> for RawConfig {
    fn from(c: &ExperimentConfig) -> Self {
        let mut coefficient = RawCoefficient {
            floor: Some(c.coefficient.floor),
            ..Default::default()
        };
        match c.coefficient.background {
            Background::Constant { value } => {
                coefficient.background = Some("constant".into());
                coefficient.value = Some(value);
            }
            Background::Affine { intercept, slope } => {
                coefficient.background = Some("affine".into());
                coefficient.intercept = Some(intercept);
                coefficient.slope = Some(slope);
            }
            Background::Sinusoid {
                mean,
                amplitude,
                wavenumber,
                phase,
            } => {
                coefficient.background = Some("sinusoid".into());
                coefficient.mean = Some(mean);
                coefficient.amplitude = Some(amplitude);
                coefficient.wavenumber = Some(wavenumber);
                coefficient.phase = Some(phase);
            }
        }
        coefficient.atoms = c
            .coefficient
            .atoms
            .iter()
            .map(|a| {
                let (kind, left, right) = match a.kind() {
                    AtomKind::DiracDelta => ("delta", None, None),
                    AtomKind::DiracDeltaSquared => ("delta2", None, None),
                    AtomKind::Jump { left, right } => ("jump", Some(left), Some(right)),
                };
                RawAtom {
                    kind: kind.into(),
                    location: a.location(),
                    weight: a.weight(),
                    left,
                    right,
                }
            })
            .collect();

        let mut initial_data = RawInitialData {
            regularize: Some(c.initial_data.regularize),
            ..Default::default()
        };
        match &c.initial_data.kind {
            InitialDataKind::Gaussian {
                center,
                width,
                amplitude,
            } => {
                initial_data.kind = Some("gaussian".into());
                initial_data.center = Some(*center);
                initial_data.width = Some(*width);
                initial_data.amplitude = Some(*amplitude);
            }
            InitialDataKind::MollifiedStep {
                center,
                half_width,
                amplitude,
            } => {
                initial_data.kind = Some("mollified-step".into());
                initial_data.center = Some(*center);
                initial_data.half_width = Some(*half_width);
                initial_data.amplitude = Some(*amplitude);
            }
            InitialDataKind::FourierMode { mode, amplitude } => {
                initial_data.kind = Some("fourier-mode".into());
                initial_data.mode = Some(i64::from(*mode));
                initial_data.amplitude = Some(*amplitude);
            }
            InitialDataKind::File { path } => {
                initial_data.kind = Some("file".into());
                initial_data.path = Some(path.to_string_lossy().into_owned());
            }
        }

        let perturbation = c.perturbation.as_ref().map(|p| match *p {
            PerturbationConfig::Single(spec) => RawPerturbation {
                kind: Some(
                    match spec.kind {
                        PerturbationKind::PowerLaw { .. } => "power-law",
                        PerturbationKind::Superpolynomial => "superpolynomial",
                    }
                    .into(),
                ),
                order: match spec.kind {
                    PerturbationKind::PowerLaw { order } => Some(order),
                    PerturbationKind::Superpolynomial => None,
                },
                target: Some(target_name(spec.target).into()),
                magnitude: Some(spec.magnitude),
                center: Some(spec.center),
                width: Some(spec.width),
            },
            PerturbationConfig::Family {
                target,
                magnitude,
                center,
                width,
            } => RawPerturbation {
                kind: Some("family".into()),
                order: None,
                target: Some(target_name(target).into()),
                magnitude: Some(magnitude),
                center: Some(center),
                width: Some(width),
            },
        });

        RawConfig {
            command: Some(c.command),
            domain: Some(RawDomain {
                a: Some(c.domain.a),
                b: Some(c.domain.b),
                n: Some(c.domain.n as i64),
                boundary: Some(boundary_name(c.domain.boundary).into()),
                face_average: Some(average_name(c.domain.face_average).into()),
            }),
            coefficient: Some(coefficient),
            initial_data: Some(initial_data),
            time: Some(RawTime {
                final_time: Some(c.time.final_time),
                dt: Some(c.time.dt),
                scheme: Some(scheme_name(c.time.scheme).into()),
                snapshots: Some(c.time.snapshots as i64),
            }),
            sweep: Some(RawSweep {
                ladder: Some(c.ladder.clone()),
            }),
            perturbation,
            run: Some(RawRun {
                epsilon: c.epsilon,
                nodes: Some(c.nodes as i64),
                fine_reference: Some(c.fine_reference),
                seed: Some(c.seed as i64),
            }),
            output: Some(RawOutput {
                dir: Some(c.output_dir.to_string_lossy().into_owned()),
            }),
        }
    }
}

/// Accumulates errors while converting the raw layout.
struct Reader {
    errors: Vec<String>,
}

impl Reader {
    fn fail(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn required<V>(&mut self, value: Option<V>, key: &str) -> Option<V> {
        if value.is_none() {
            self.fail(format!("missing required key {key}"));
        }
        value
    }

    /// Rejects a key that does not apply to the selected variant.
    fn unused<V>(&mut self, value: &Option<V>, key: &str, variant: &str) {
        if value.is_some() {
            self.fail(format!("key {key} does not apply to {variant}"));
        }
    }

    fn choice<V: Copy>(
        &mut self,
        value: Option<&str>,
        key: &str,
        options: &[(&str, V)],
        default: Option<V>,
    ) -> Option<V> {
        match value {
            None if default.is_some() => default,
            None => {
                self.fail(format!("missing required key {key}"));
                None
            }
            Some(s) => match options.iter().find(|(name, _)| *name == s) {
                Some((_, v)) => Some(*v),
                None => {
                    let names: Vec<&str> = options.iter().map(|o| o.0).collect();
                    self.fail(format!(
                        "{key} = \"{s}\" is not one of {}",
                        names.join(", ")
                    ));
                    None
                }
            },
        }
    }

    fn count(&mut self, value: Option<i64>, key: &str, min: i64) -> Option<usize> {
        let v = value?;
        if v < min {
            self.fail(format!("{key} = {v} must be at least {min}"));
            return None;
        }
        usize::try_from(v).ok()
    }

    fn positive(&mut self, value: Option<f64>, key: &str) -> Option<f64> {
        let v = value?;
        if !(v > 0.0) || !v.is_finite() {
            self.fail(format!("{key} = {v} must be positive"));
            return None;
        }
        Some(v)
    }

    fn finite(&mut self, value: Option<f64>, key: &str) -> Option<f64> {
        let v = value?;
        if !v.is_finite() {
            self.fail(format!("{key} = {v} must be finite"));
            return None;
        }
        Some(v)
    }
}

/// Parses and validates a configuration. `command` overrides the file's
/// `command` key; one of the two must be present.
pub fn parse_config_for(
    text: &str,
    command: Option<Command>,
) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| ConfigError::one(e.message().to_string()))?;
    let command = match (command, raw.command) {
        (Some(c), Some(f)) if c != f => {
            return Err(ConfigError::one(format!(
                "command {c} on the command line disagrees with command = \"{f}\" in the file"
            )))
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(ConfigError::one("missing required key command")),
    };
    let mut r = Reader { errors: Vec::new() };
    let config = build(&mut r, raw, command);
    match (config, r.errors.is_empty()) {
        (Some(c), true) => Ok(c),
        _ => Err(ConfigError { errors: r.errors }),
    }
}

/// Parses and validates a configuration whose `command` key is required.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_for(text, None)
}

fn build(r: &mut Reader, raw: RawConfig, command: Command) -> Option<ExperimentConfig> {
    let diagnose = command == Command::Diagnose;
    let defaults = ExperimentConfig::diagnose_default();

    let domain = match raw.domain {
        Some(d) => read_domain(r, d),
        None if diagnose => Some(defaults.domain.clone()),
        None => {
            r.fail("missing required section [domain]".into());
            None
        }
    };
    let coefficient = match raw.coefficient {
        Some(c) => read_coefficient(r, c),
        None if diagnose => Some(defaults.coefficient.clone()),
        None => {
            r.fail("missing required section [coefficient]".into());
            None
        }
    };
    let initial_data = match raw.initial_data {
        Some(d) => read_initial_data(r, d),
        None if diagnose => Some(defaults.initial_data.clone()),
        None => {
            r.fail("missing required section [initial_data]".into());
            None
        }
    };
    let time = match raw.time {
        Some(t) => read_time(r, t),
        None if diagnose => Some(defaults.time.clone()),
        None => {
            r.fail("missing required section [time]".into());
            None
        }
    };
    let ladder = match raw.sweep.and_then(|s| s.ladder) {
        Some(l) => l,
        None => DEFAULT_LADDER.to_vec(),
    };
    let perturbation = raw.perturbation.and_then(|p| read_perturbation(r, p));
    let (epsilon, nodes, fine_reference, seed) = match raw.run {
        Some(run) => {
            let epsilon = r.finite(run.epsilon, "run.epsilon");
            let nodes = r.count(run.nodes, "run.nodes", 2).unwrap_or(DEFAULT_NODES);
            let seed = match run.seed {
                Some(s) if s < 0 => {
                    r.fail(format!("run.seed = {s} must be nonnegative"));
                    0
                }
                Some(s) => s as u64,
                None => 0,
            };
            (epsilon, nodes, run.fine_reference.unwrap_or(false), seed)
        }
        None => (None, DEFAULT_NODES, false, 0),
    };
    let epsilon = epsilon.or(if diagnose { defaults.epsilon } else { None });
    let output_dir = raw
        .output
        .and_then(|o| o.dir)
        .map(PathBuf::from)
        .unwrap_or_else(|| defaults.output_dir.clone());

    let config = ExperimentConfig {
        command,
        domain: domain?,
        coefficient: coefficient?,
        initial_data: initial_data?,
        time: time?,
        ladder,
        perturbation,
        epsilon,
        nodes,
        fine_reference,
        seed,
        output_dir,
    };
    cross_validate(r, &config);
    Some(config)
}

fn read_domain(r: &mut Reader, d: RawDomain) -> Option<DomainConfig> {
    let a = r.required(d.a, "domain.a");
    let a = r.finite(a, "domain.a");
    let b = r.required(d.b, "domain.b");
    let b = r.finite(b, "domain.b");
    let n = r.required(d.n, "domain.n");
    let n = r.count(n, "domain.n", 8);
    let boundary = r.choice(
        d.boundary.as_deref(),
        "domain.boundary",
        &[
            ("dirichlet", Boundary::DirichletZero),
            ("periodic", Boundary::Periodic),
        ],
        Some(Boundary::DirichletZero),
    );
    let face_average = r.choice(
        d.face_average.as_deref(),
        "domain.face_average",
        &[
            ("arithmetic", FaceAverage::Arithmetic),
            ("harmonic", FaceAverage::Harmonic),
        ],
        Some(FaceAverage::Arithmetic),
    );
    let (a, b) = (a?, b?);
    if !(b > a) {
        r.fail(format!("domain.b = {b} must exceed domain.a = {a}"));
        return None;
    }
    Some(DomainConfig {
        a,
        b,
        n: n?,
        boundary: boundary?,
        face_average: face_average?,
    })
}

fn read_coefficient(r: &mut Reader, c: RawCoefficient) -> Option<CoefficientConfig> {
    let kind = r.choice(
        c.background.as_deref(),
        "coefficient.background",
        &[("constant", 0), ("affine", 1), ("sinusoid", 2)],
        None,
    )?;
    let background = match kind {
        0 => {
            for (v, k) in [
                (&c.intercept, "coefficient.intercept"),
                (&c.slope, "coefficient.slope"),
                (&c.mean, "coefficient.mean"),
                (&c.amplitude, "coefficient.amplitude"),
                (&c.wavenumber, "coefficient.wavenumber"),
                (&c.phase, "coefficient.phase"),
            ] {
                r.unused(v, k, "background constant");
            }
            let value = r.required(c.value, "coefficient.value");
            Background::Constant {
                value: r.positive(value, "coefficient.value")?,
            }
        }
        1 => {
            for (v, k) in [
                (&c.value, "coefficient.value"),
                (&c.mean, "coefficient.mean"),
                (&c.amplitude, "coefficient.amplitude"),
                (&c.wavenumber, "coefficient.wavenumber"),
                (&c.phase, "coefficient.phase"),
            ] {
                r.unused(v, k, "background affine");
            }
            let intercept = r.required(c.intercept, "coefficient.intercept");
            let slope = r.required(c.slope, "coefficient.slope");
            Background::Affine {
                intercept: r.finite(intercept, "coefficient.intercept")?,
                slope: r.finite(slope, "coefficient.slope")?,
            }
        }
        _ => {
            for (v, k) in [
                (&c.value, "coefficient.value"),
                (&c.intercept, "coefficient.intercept"),
                (&c.slope, "coefficient.slope"),
            ] {
                r.unused(v, k, "background sinusoid");
            }
            let mean = r.required(c.mean, "coefficient.mean");
            let amplitude = r.required(c.amplitude, "coefficient.amplitude");
            Background::Sinusoid {
                mean: r.finite(mean, "coefficient.mean")?,
                amplitude: r.finite(amplitude, "coefficient.amplitude")?,
                wavenumber: r
                    .finite(Some(c.wavenumber.unwrap_or(1.0)), "coefficient.wavenumber")?,
                phase: r.finite(Some(c.phase.unwrap_or(0.0)), "coefficient.phase")?,
            }
        }
    };
    let floor = match (c.floor, background) {
        (Some(f), _) => r.positive(Some(f), "coefficient.floor")?,
        (None, Background::Constant { value }) => value,
        (
            None,
            Background::Sinusoid {
                mean, amplitude, ..
            },
        ) => mean - amplitude.abs(),
        (None, Background::Affine { .. }) => {
            r.fail(
                "missing required key coefficient.floor (needed for an affine background)".into(),
            );
            return None;
        }
    };
    let mut atoms = Vec::new();
    for (i, a) in c.atoms.into_iter().enumerate() {
        let key = format!("coefficient.atoms[{i}]");
        let kind = match a.kind.as_str() {
            "delta" | "delta2" => {
                r.unused(&a.left, &format!("{key}.left"), &a.kind);
                r.unused(&a.right, &format!("{key}.right"), &a.kind);
                if a.kind == "delta" {
                    AtomKind::DiracDelta
                } else {
                    AtomKind::DiracDeltaSquared
                }
            }
            "jump" => {
                let (Some(left), Some(right)) = (
                    r.required(a.left, &format!("{key}.left")),
                    r.required(a.right, &format!("{key}.right")),
                ) else {
                    continue;
                };
                AtomKind::Jump { left, right }
            }
            other => {
                r.fail(format!(
                    "{key}.kind = \"{other}\" is not one of delta, delta2, jump"
                ));
                continue;
            }
        };
        match SingularAtom::new(a.location, a.weight, kind) {
            Ok(atom) => atoms.push(atom),
            Err(e) => r.fail(format!("{key}: {e}")),
        }
    }
    if let Err(e) = SingularCoefficient::new(background, floor, atoms.clone()) {
        r.fail(format!("coefficient: {e}"));
        return None;
    }
    Some(CoefficientConfig {
        background,
        floor,
        atoms,
    })
}

fn read_initial_data(r: &mut Reader, d: RawInitialData) -> Option<InitialDataConfig> {
    let kind = r.choice(
        d.kind.as_deref(),
        "initial_data.kind",
        &[
            ("gaussian", 0),
            ("mollified-step", 1),
            ("fourier-mode", 2),
            ("file", 3),
        ],
        None,
    )?;
    let amplitude = d.amplitude.unwrap_or(1.0);
    let kind = match kind {
        0 => {
            r.unused(&d.half_width, "initial_data.half_width", "kind gaussian");
            r.unused(&d.mode, "initial_data.mode", "kind gaussian");
            r.unused(&d.path, "initial_data.path", "kind gaussian");
            let center = r.required(d.center, "initial_data.center");
            let width = r.required(d.width, "initial_data.width");
            InitialDataKind::Gaussian {
                center: r.finite(center, "initial_data.center")?,
                width: r.positive(width, "initial_data.width")?,
                amplitude: r.finite(Some(amplitude), "initial_data.amplitude")?,
            }
        }
        1 => {
            r.unused(&d.width, "initial_data.width", "kind mollified-step");
            r.unused(&d.mode, "initial_data.mode", "kind mollified-step");
            r.unused(&d.path, "initial_data.path", "kind mollified-step");
            let center = r.required(d.center, "initial_data.center");
            let half_width = r.required(d.half_width, "initial_data.half_width");
            InitialDataKind::MollifiedStep {
                center: r.finite(center, "initial_data.center")?,
                half_width: r.positive(half_width, "initial_data.half_width")?,
                amplitude: r.finite(Some(amplitude), "initial_data.amplitude")?,
            }
        }
        2 => {
            r.unused(&d.center, "initial_data.center", "kind fourier-mode");
            r.unused(&d.width, "initial_data.width", "kind fourier-mode");
            r.unused(
                &d.half_width,
                "initial_data.half_width",
                "kind fourier-mode",
            );
            r.unused(&d.path, "initial_data.path", "kind fourier-mode");
            let mode = r.required(d.mode, "initial_data.mode")?;
            let Ok(mode) = u32::try_from(mode) else {
                r.fail(format!(
                    "initial_data.mode = {mode} must be a nonnegative integer"
                ));
                return None;
            };
            InitialDataKind::FourierMode {
                mode,
                amplitude: r.finite(Some(amplitude), "initial_data.amplitude")?,
            }
        }
        _ => {
            for (v, k) in [
                (&d.center, "initial_data.center"),
                (&d.width, "initial_data.width"),
                (&d.half_width, "initial_data.half_width"),
                (&d.amplitude, "initial_data.amplitude"),
            ] {
                r.unused(v, k, "kind file");
            }
            r.unused(&d.mode, "initial_data.mode", "kind file");
            InitialDataKind::File {
                path: PathBuf::from(r.required(d.path, "initial_data.path")?),
            }
        }
    };
    Some(InitialDataConfig {
        kind,
        regularize: d.regularize.unwrap_or(true),
    })
}

fn read_time(r: &mut Reader, t: RawTime) -> Option<TimeConfig> {
    let final_time = r.required(t.final_time, "time.T");
    let final_time = r.positive(final_time, "time.T");
    let dt = r.required(t.dt, "time.dt");
    let dt = r.positive(dt, "time.dt");
    let scheme = r.choice(
        t.scheme.as_deref(),
        "time.scheme",
        &[
            ("implicit-euler", Scheme::ImplicitEuler),
            ("crank-nicolson", Scheme::CrankNicolson),
        ],
        Some(Scheme::ImplicitEuler),
    );
    let snapshots = match t.snapshots {
        Some(s) => r.count(Some(s), "time.snapshots", 2),
        None => Some(DEFAULT_SNAPSHOTS),
    };
    let (final_time, dt) = (final_time?, dt?);
    if dt > final_time {
        r.fail(format!("time.dt = {dt} exceeds time.T = {final_time}"));
        return None;
    }
    let time = TimeConfig {
        final_time,
        dt,
        scheme: scheme?,
        snapshots: snapshots?,
    };
    let steps = SolveConfig::new(final_time, dt, time.scheme, Vec::new())
        .map(|c| c.steps())
        .unwrap_or(0);
    if time.snapshots > steps {
        r.fail(format!(
            "time.snapshots = {} exceeds the {steps} time steps",
            time.snapshots
        ));
        return None;
    }
    Some(time)
}

fn read_perturbation(r: &mut Reader, p: RawPerturbation) -> Option<PerturbationConfig> {
    let kind = r.choice(
        p.kind.as_deref(),
        "perturbation.kind",
        &[("power-law", 0), ("superpolynomial", 1), ("family", 2)],
        None,
    );
    let target = r.choice(
        p.target.as_deref(),
        "perturbation.target",
        &[
            ("coefficient", PerturbationTarget::Coefficient),
            ("data", PerturbationTarget::Data),
            ("both", PerturbationTarget::Both),
        ],
        Some(PerturbationTarget::Coefficient),
    );
    let magnitude = r.finite(Some(p.magnitude.unwrap_or(1.0)), "perturbation.magnitude");
    let center = r.required(p.center, "perturbation.center");
    let center = r.finite(center, "perturbation.center");
    let width = r.required(p.width, "perturbation.width");
    let width = r.positive(width, "perturbation.width");
    let kind = kind?;
    if kind != 0 {
        r.unused(&p.order, "perturbation.order", "this kind");
    }
    let (target, magnitude, center, width) = (target?, magnitude?, center?, width?);
    let spec = |kind| {
        PerturbationConfig::Single(PerturbationSpec {
            kind,
            target,
            magnitude,
            center,
            width,
        })
    };
    Some(match kind {
        0 => {
            let order = r.required(p.order, "perturbation.order")?;
            let order = r.finite(Some(order), "perturbation.order")?;
            if order < 0.0 {
                r.fail(format!("perturbation.order = {order} must be nonnegative"));
                return None;
            }
            spec(PerturbationKind::PowerLaw { order })
        }
        1 => spec(PerturbationKind::Superpolynomial),
        _ => PerturbationConfig::Family {
            target,
            magnitude,
            center,
            width,
        },
    })
}

/// Checks that need several sections at once.
fn cross_validate(r: &mut Reader, c: &ExperimentConfig) {
    let grid = match c.grid() {
        Ok(g) => g,
        Err(e) => {
            r.fail(format!("domain: {e}"));
            return;
        }
    };
    let four_dx = 4.0 * grid.dx();
    let check_eps = |r: &mut Reader, key: &str, eps: f64| {
        if !(eps > 0.0) || eps > 1.0 {
            r.fail(format!("{key}: epsilon {eps} must lie in (0, 1]"));
        } else if eps < four_dx {
            r.fail(format!("{key}: epsilon {eps} < 4*dx {}", sig3(four_dx)));
        } else if 2.0 * eps > grid.length() {
            r.fail(format!(
                "{key}: kernel width 2*epsilon {} exceeds domain length {}",
                sig3(2.0 * eps),
                sig3(grid.length())
            ));
        }
    };
    let mut eps_max = None;
    if c.command.uses_ladder() {
        if let Err(e) = validate_ladder(&c.ladder, 4) {
            r.fail(format!("sweep.ladder: {e}"));
        }
        for &eps in &c.ladder {
            check_eps(r, "sweep.ladder", eps);
        }
        eps_max = c.ladder.iter().copied().reduce(f64::max);
    }
    if c.command.uses_epsilon() {
        match c.epsilon {
            Some(eps) => {
                check_eps(r, "run.epsilon", eps);
                eps_max = Some(eps);
            }
            None => r.fail(format!(
                "missing required key run.epsilon for command {}",
                c.command
            )),
        }
    }
    if let (Some(eps), Ok(coeff)) = (eps_max, c.singular_coefficient()) {
        if let Err(e) = coeff.check_placement(&grid, eps) {
            r.fail(format!("coefficient.atoms: {e}"));
        }
    }
    match c.command {
        Command::Uniqueness | Command::Duhamel if c.perturbation.is_none() => {
            r.fail(format!(
                "missing required section [perturbation] for command {}",
                c.command
            ));
        }
        Command::Duhamel => {
            if c.domain.n > DUHAMEL_MAX_N {
                r.fail(format!(
                    "domain.n = {} exceeds {DUHAMEL_MAX_N} for command duhamel",
                    c.domain.n
                ));
            }
            if matches!(c.perturbation, Some(PerturbationConfig::Family { .. })) {
                r.fail("perturbation.kind = \"family\" is not supported by command duhamel".into());
            }
        }
        Command::Consistency => {
            if !c.coefficient.atoms.is_empty() {
                r.fail(
                    "coefficient.atoms: consistency requires a coefficient without singular atoms"
                        .into(),
                );
            }
            if c.fine_reference && matches!(c.initial_data.kind, InitialDataKind::File { .. }) {
                r.fail("run.fine_reference needs closed-form initial data".into());
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
command = "solve"

[domain]
a = -1.0
b = 1.0
n = 101

[coefficient]
background = "constant"
value = 1.0

[initial_data]
kind = "gaussian"
center = 0.0
width = 0.2

[time]
T = 0.1
dt = 0.001

[run]
epsilon = 0.1
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.command, Command::Solve);
        assert_eq!(c.time.scheme, Scheme::ImplicitEuler);
        assert_eq!(c.time.snapshots, 50);
        assert_eq!(c.domain.boundary, Boundary::DirichletZero);
        assert_eq!(c.coefficient.floor, 1.0);
        assert!(c.initial_data.regularize);
        assert_eq!(c.ladder, DEFAULT_LADDER.to_vec());
    }

    #[test]
    fn round_trip_is_identity() {
        let c = parse_config(MINIMAL).unwrap();
        let again = parse_config(&c.to_text()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.to_text(), again.to_text());
    }

    #[test]
    fn unresolved_epsilon_names_both_values() {
        let text = MINIMAL
            .replace("n = 101", "n = 100")
            .replace("epsilon = 0.1", "epsilon = 0.001");
        let err = parse_config(&text).unwrap_err();
        assert!(
            err.errors
                .iter()
                .any(|e| e.contains("epsilon 0.001 < 4*dx 0.0808")),
            "{err}"
        );
    }

    #[test]
    fn unknown_key_is_an_error() {
        let text = MINIMAL.replace("dt = 0.001", "dt = 0.001\nstep = 2");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("step"), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = MINIMAL.replace("width = 0.2", "");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("initial_data.width"), "{err}");
    }

    #[test]
    fn key_of_another_variant_is_rejected() {
        let text = MINIMAL.replace("value = 1.0", "value = 1.0\nslope = 2.0");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn diagnose_needs_only_the_command() {
        let c = parse_config("command = \"diagnose\"").unwrap();
        assert_eq!(c, ExperimentConfig::diagnose_default());
    }

    #[test]
    fn command_line_and_file_must_agree() {
        assert!(parse_config_for(MINIMAL, Some(Command::Sweep)).is_err());
        assert!(parse_config_for(MINIMAL, Some(Command::Solve)).is_ok());
    }

    #[test]
    fn three_significant_digits() {
        assert_eq!(sig3(4.0 * 2.0 / 99.0), "0.0808");
        assert_eq!(sig3(0.031372549), "0.0314");
        assert_eq!(sig3(12.345), "12.3");
        assert_eq!(sig3(1234.5), "1230");
        assert_eq!(sig3(0.5), "0.5");
    }
}
