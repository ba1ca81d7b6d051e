//! Command-line runner: turns an [`ExperimentConfig`] into CSV files and a
//! summary with one PASS/FAIL line per check.
//!
//! Every file is assembled in memory and written once all computation has
//! finished. Numbers are printed with 17 significant digits, so identical
//! configurations give byte-identical outputs.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coefficients::{sobolev_norms, w1inf_norm};
use crate::energy::energy_report;
use crate::error::{Error, Result};
use crate::experiments::{
    consistency_experiment, duhamel_study, existence_sweep, uniqueness_experiment, Check,
    ConvergenceReport, InitialData, Problem,
};
use crate::grid::Boundary;
use crate::{Background, DiffusionOperator, EnergyReport, GridField, Trajectory};

pub use config::{
    parse_config, parse_config_for, Command, ConfigError, ExperimentConfig, InitialDataKind,
};

/// All checks passed.
pub const EXIT_PASS: i32 = 0;
/// Configuration or runtime error.
pub const EXIT_ERROR: i32 = 1;
/// At least one check failed.
pub const EXIT_FAIL: i32 = 2;

/// Files and checks produced by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    pub fn summary(&self) -> &str {
        self.file("summary.txt").unwrap_or("")
    }

    /// Writes every file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        self.files
            .iter()
            .map(|(name, contents)| {
                let path = dir.join(name);
                std::fs::write(&path, contents).map_err(|e| io_error(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

struct Csv(csv::Writer<Vec<u8>>);

impl Csv {
    fn new(header: &[&str]) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Csv(w)
    }

    fn row(&mut self, fields: &[String]) {
        self.0.write_record(fields).expect("in-memory write");
    }

    fn finish(self) -> String {
        let bytes = self.0.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("CSV of ASCII fields")
    }
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut csv = Csv::new(&["t", "x", "u"]);
    let xs = traj.grid.coordinates();
    for s in &traj.snapshots {
        for (x, u) in xs.iter().zip(s.field.values()) {
            csv.row(&[num(s.time), num(*x), num(*u)]);
        }
    }
    csv.finish()
}

fn energy_rows(csv: &mut Csv, epsilon: f64, report: &EnergyReport) {
    for (m, &t) in report.times.iter().enumerate() {
        let residual = if m == 0 {
            String::new()
        } else {
            num(report.residual_energy2[m - 1])
        };
        csv.row(&[
            num(epsilon),
            num(t),
            num(report.energy[m]),
            num(report.l2[m]),
            num(report.weighted_h1[m]),
            residual,
        ]);
    }
}

const ENERGY_HEADER: [&str; 6] = ["epsilon", "t", "E", "l2", "weighted_h1", "residual"];
const SWEEP_HEADER: [&str; 8] = [
    "case",
    "epsilon",
    "h2_sup",
    "coeff_w1inf",
    "coeff_h2",
    "data_h2",
    "error_sup",
    "error_final",
];

/// One row of `sweep.csv`; absent quantities are left empty.
#[derive(Default)]
struct SweepRow {
    case: String,
    epsilon: f64,
    h2_sup: Option<f64>,
    coeff_w1inf: Option<f64>,
    coeff_h2: Option<f64>,
    data_h2: Option<f64>,
    error_sup: Option<f64>,
    error_final: Option<f64>,
}

impl SweepRow {
    fn fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        vec![
            self.case.clone(),
            num(self.epsilon),
            opt(self.h2_sup),
            opt(self.coeff_w1inf),
            opt(self.coeff_h2),
            opt(self.data_h2),
            opt(self.error_sup),
            opt(self.error_final),
        ]
    }
}

/// Text report under construction.
struct Summary {
    text: String,
    checks: Vec<Check>,
}

impl Summary {
    fn new(config: &ExperimentConfig, digest: &str) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "command: {}", config.command);
        let _ = writeln!(text, "inputs_digest: {digest}");
        Self {
            text,
            checks: Vec::new(),
        }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn bound_table(&mut self, epsilon: f64, report: &EnergyReport) {
        self.line(format!("bound checks at epsilon = {}:", num(epsilon)));
        self.line(format!(
            "  {:<20} {:>24} {:>24} {:>12} {:>12} {:>14}",
            "estimate", "lhs_max", "rhs", "ratio", "envelope", "monotone"
        ));
        for b in &report.bound_checks {
            self.line(format!(
                "  {:<20} {:>24} {:>24} {:>12.4e} {:>12} {:>14}",
                b.name,
                num(b.lhs_max),
                num(b.rhs),
                b.ratio,
                b.envelope,
                if b.lhs_monotone {
                    "yes"
                } else if b.monotone_required {
                    "NO"
                } else {
                    "no (reported)"
                }
            ));
        }
        self.line(format!(
            "  max residual (energy identity 2): {}",
            num(report.max_residual_energy2)
        ));
        self.line(format!(
            "  max residual (energy identity 1): {}",
            num(report.max_residual_energy1)
        ));
    }

    fn checks(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    fn finish(mut self) -> (String, Vec<Check>) {
        self.line("");
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(self.text, "{tag} {}: {}", c.name, c.detail);
        }
        let overall = if self.checks.iter().all(|c| c.passed) {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(self.text, "{overall} overall");
        (self.text, self.checks)
    }
}

fn energy_checks(report: &EnergyReport, epsilon: f64) -> Vec<Check> {
    let mut out = vec![
        Check {
            name: "energy_monotone",
            passed: report.energy_monotone(),
            detail: match report.energy_increase {
                None => format!("E non-increasing at epsilon {}", num(epsilon)),
                Some(m) => format!("E grows on interval {m} at epsilon {}", num(epsilon)),
            },
        },
        Check {
            name: "weighted_h1_monotone",
            passed: report.weighted_h1_monotone,
            detail: format!(
                "||h^(1/2) u_x||^2 non-increasing at epsilon {}",
                num(epsilon)
            ),
        },
    ];
    out.extend(report.bound_checks.iter().map(|b| Check {
        name: b.name,
        passed: b.passed(),
        detail: format!("ratio {:.4e} <= envelope {}", b.ratio, b.envelope),
    }));
    out
}

/// Reads whitespace-separated values for file-based initial data.
fn load_samples(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Io(format!("{}: cannot parse value {tok:?}", path.display())))
        })
        .collect()
}

/// Builds the experiment problem of a configuration.
pub fn build_problem(config: &ExperimentConfig) -> Result<Problem> {
    let grid = config.grid()?;
    let coefficient = config.singular_coefficient()?;
    let initial_data = match &config.initial_data.kind {
        InitialDataKind::Gaussian {
            center,
            width,
            amplitude,
        } => InitialData::Gaussian {
            center: *center,
            width: *width,
            amplitude: *amplitude,
        },
        InitialDataKind::MollifiedStep {
            center,
            half_width,
            amplitude,
        } => InitialData::MollifiedStep {
            center: *center,
            half_width: *half_width,
            amplitude: *amplitude,
        },
        InitialDataKind::FourierMode { mode, amplitude } => InitialData::FourierMode {
            mode: *mode,
            amplitude: *amplitude,
        },
        InitialDataKind::File { path } => InitialData::Samples(load_samples(path)?),
    };
    let mut problem = Problem::new(grid, coefficient, initial_data, config.time.solve_config()?);
    problem.face_average = config.domain.face_average;
    problem.regularize_data = config.initial_data.regularize;
    Ok(problem)
}

/// Runs the configured experiment. Nothing is written to disk.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let problem = build_problem(config)?;
    // Where results go is not an input.
    let mut inputs = config.clone();
    inputs.output_dir = PathBuf::new();
    let digest = crate::experiments::inputs_digest(&(inputs, &problem));
    let mut summary = Summary::new(config, &digest);
    let mut files = Vec::new();
    match config.command {
        Command::Solve => run_solve(config, &problem, &mut summary, &mut files)?,
        Command::Sweep => run_sweep(config, &problem, &mut summary, &mut files)?,
        Command::Uniqueness => run_uniqueness(config, &problem, &mut summary, &mut files)?,
        Command::Consistency => run_consistency(config, &problem, &mut summary, &mut files)?,
        Command::Duhamel => run_duhamel(config, &problem, &mut summary, &mut files)?,
        Command::Diagnose => run_diagnose(config, &problem, &mut summary, &mut files)?,
    }
    let (text, checks) = summary.finish();
    files.push(("summary.txt".into(), text));
    Ok(Outcome {
        command: config.command,
        files,
        checks,
    })
}

fn required_epsilon(config: &ExperimentConfig) -> Result<f64> {
    config.epsilon.ok_or(Error::InvalidParameter {
        name: "run.epsilon",
        value: f64::NAN,
        reason: "required by this command",
    })
}

/// Solves one member and records trajectory, energy and norms.
fn single_member(
    problem: &Problem,
    epsilon: f64,
    summary: &mut Summary,
    files: &mut Vec<(String, String)>,
) -> Result<(Trajectory, SweepRow)> {
    let (h, u0, traj) = problem.solve_member(epsilon)?;
    let report = energy_report(&traj, &h)?;
    let mut energy = Csv::new(&ENERGY_HEADER);
    energy_rows(&mut energy, epsilon, &report);
    files.push(("trajectory_0.csv".into(), trajectory_csv(&traj)));
    files.push(("energy.csv".into(), energy.finish()));
    summary.bound_table(epsilon, &report);
    summary.checks(energy_checks(&report, epsilon));
    let row = SweepRow {
        case: String::new(),
        epsilon,
        h2_sup: Some(traj.snapshot_sup(|u| sobolev_norms(u).h2).0),
        coeff_w1inf: Some(w1inf_norm(&h)),
        coeff_h2: Some(sobolev_norms(&h).h2),
        data_h2: Some(sobolev_norms(&u0).h2),
        ..Default::default()
    };
    Ok((traj, row))
}

fn run_solve(
    config: &ExperimentConfig,
    problem: &Problem,
    summary: &mut Summary,
    files: &mut Vec<(String, String)>,
) -> Result<()> {
    let epsilon = required_epsilon(config)?;
    let (_, mut row) = single_member(problem, epsilon, summary, files)?;
    row.case = "solve".into();
    let mut sweep = Csv::new(&SWEEP_HEADER);
    sweep.row(&row.fields());
    files.push(("sweep.csv".into(), sweep.finish()));
    Ok(())
}

fn run_sweep(
    config: &ExperimentConfig,
    problem: &Problem,
    summary: &mut Summary,
    files: &mut Vec<(String, String)>,
) -> Result<()> {
    let report = existence_sweep(problem, &config.ladder)?;
    let mut energy = Csv::new(&ENERGY_HEADER);
    let mut sweep = Csv::new(&SWEEP_HEADER);
    for (k, e) in report.per_eps.iter().enumerate() {
        files.push((format!("trajectory_{k}.csv"), trajectory_csv(&e.trajectory)));
        energy_rows(&mut energy, e.epsilon, &e.energy);
        sweep.row(
            &SweepRow {
                case: "existence".into(),
                epsilon: e.epsilon,
                h2_sup: Some(e.h2_sup),
                coeff_w1inf: Some(e.coeff_w1inf),
                coeff_h2: Some(e.coeff_h2),
                data_h2: Some(e.data_h2),
                ..Default::default()
            }
            .fields(),
        );
    }
    files.push(("energy.csv".into(), energy.finish()));
    files.push(("sweep.csv".into(), sweep.finish()));
    summary.line(format!("fit epsilons: {:?}", report.fit_epsilons));
    summary.line(format!(
        "fitted N0 (coefficient W1inf exponent): {:.4}",
        report.fitted_coefficient_exponent
    ));
    summary.line(format!(
        "fitted N1 (data H2 exponent): {:.4}",
        report.fitted_data_exponent
    ));
    summary.line(format!(
        "fitted solution exponent N (sup_t H2 of u_eps): {:.4}",
        report.fitted_solution_exponent
    ));
    for e in &report.per_eps {
        if e.h2_sup_index != 0 {
            summary.line(format!(
                "note: sup_t H2 at epsilon {} attained at snapshot {} (not t = 0)",
                num(e.epsilon),
                e.h2_sup_index
            ));
        }
    }
    if let Some(last) = report.per_eps.last() {
        summary.bound_table(last.epsilon, &last.energy);
    }
    summary.checks(report.checks);
    Ok(())
}

/// Norm rows for convergence-type reports.
fn convergence_rows(
    problem: &Problem,
    case: &str,
    report: &ConvergenceReport,
    sweep: &mut Csv,
) -> Result<()> {
    for (k, traj) in report.trajectories.iter().enumerate() {
        let eps = report.epsilons[k];
        let h = problem.coefficient_at(eps)?;
        let u0 = traj.initial();
        sweep.row(
            &SweepRow {
                case: case.into(),
                epsilon: eps,
                h2_sup: Some(traj.snapshot_sup(|u| sobolev_norms(u).h2).0),
                coeff_w1inf: Some(w1inf_norm(&h)),
                coeff_h2: Some(sobolev_norms(&h).h2),
                data_h2: Some(sobolev_norms(u0).h2),
                error_sup: Some(report.errors[k]),
                error_final: Some(report.final_errors[k]),
            }
            .fields(),
        );
    }
    Ok(())
}

fn member_files(
    problem: &Problem,
    report: &ConvergenceReport,
    files: &mut Vec<(String, String)>,
) -> Result<Vec<(f64, EnergyReport)>> {
    let mut energy = Csv::new(&ENERGY_HEADER);
    let mut reports = Vec::new();
    for (k, traj) in report.trajectories.iter().enumerate() {
        let eps = report.epsilons[k];
        let h = problem.coefficient_at(eps)?;
        let e = energy_report(traj, &h)?;
        energy_rows(&mut energy, eps, &e);
        files.push((format!("trajectory_{k}.csv"), trajectory_csv(traj)));
        reports.push((eps, e));
    }
    files.push(("energy.csv".into(), energy.finish()));
    Ok(reports)
}

fn run_uniqueness(
    config: &ExperimentConfig,
    problem: &Problem,
    summary: &mut Summary,
    files: &mut Vec<(String, String)>,
) -> Result<()> {
    let cases = config
        .perturbation
        .as_ref()
        .map(|p| p.cases())
        .unwrap_or_default();
    let mut sweep = Csv::new(&SWEEP_HEADER);
    let labels: Vec<&str> = cases.iter().map(|c| c.0.as_str()).collect();
    summary.line(format!("perturbations exercised: {}", labels.join(", ")));
    for (i, (label, spec)) in cases.iter().enumerate() {
        let report = uniqueness_experiment(problem, spec, &config.ladder)?;
        if i == 0 {
            let energies = member_files(problem, &report, files)?;
            for (eps, e) in &energies {
                summary.checks(energy_checks(e, *eps));
            }
        }
        convergence_rows(problem, label, &report, &mut sweep)?;
        summary.line(format!(
            "{label}: fitted decay rate {:.4}, solution exponent N {:.4}",
            report.fitted_rate,
            report.solution_exponent.unwrap_or(f64::NAN)
        ));
        summary.checks(report.checks.into_iter().map(|mut c| {
            c.detail = format!("[{label}] {}", c.detail);
            c
        }));
    }
    files.push(("sweep.csv".into(), sweep.finish()));
    Ok(())
}

fn run_consistency(
    config: &ExperimentConfig,
    problem: &Problem,
    summary: &mut Summary,
    files: &mut Vec<(String, String)>,
) -> Result<()> {
    let report = consistency_experiment(problem, &config.ladder, config.fine_reference)?;
    let energies = member_files(problem, &report, files)?;
    for (eps, e) in &energies {
        summary.checks(energy_checks(e, *eps));
    }
    let mut sweep = Csv::new(&SWEEP_HEADER);
    convergence_rows(problem, "consistency", &report, &mut sweep)?;
    files.push(("sweep.csv".into(), sweep.finish()));
    summary.line(format!("reference: {}", report.reference_kind.name()));
    summary.line(format!("fitted rate: {:.4}", report.fitted_rate));
    if !report.data_errors.is_empty() {
        let list: Vec<String> = report.data_errors.iter().map(|e| num(*e)).collect();
        summary.line(format!("||u0_eps - u0||: {}", list.join(", ")));
    }
    summary.checks(report.checks);
    Ok(())
}

fn run_duhamel(
    config: &ExperimentConfig,
    problem: &Problem,
    summary: &mut Summary,
    files: &mut Vec<(String, String)>,
) -> Result<()> {
    let epsilon = required_epsilon(config)?;
    let Some((label, spec)) = config
        .perturbation
        .as_ref()
        .and_then(|p| p.cases().into_iter().next())
    else {
        return Err(Error::InvalidParameter {
            name: "perturbation",
            value: f64::NAN,
            reason: "required by duhamel",
        });
    };
    let (_, mut row) = single_member(problem, epsilon, summary, files)?;
    let study = duhamel_study(problem, &spec, epsilon, config.nodes)?;
    row.case = label.clone();
    let mut sweep = Csv::new(&SWEEP_HEADER);
    sweep.row(&row.fields());
    files.push(("sweep.csv".into(), sweep.finish()));
    let mut csv = Csv::new(&[
        "nodes",
        "residual",
        "difference_norm",
        "relative_residual",
        "forced_residual",
    ]);
    for r in [&study.coarse, &study.fine] {
        csv.row(&[
            r.nodes.to_string(),
            num(r.residual),
            num(r.difference_norm),
            num(r.relative_residual),
            num(r.forced_residual),
        ]);
    }
    files.push(("duhamel.csv".into(), csv.finish()));
    summary.line(format!("perturbation: {label}"));
    summary.line(format!(
        "relative residual: {:.6e} ({} nodes), {:.6e} ({} nodes); ratio {:.4}",
        study.coarse.relative_residual,
        study.coarse.nodes,
        study.fine.relative_residual,
        study.fine.nodes,
        study.refinement_ratio
    ));
    summary.checks(study.checks);
    Ok(())
}

/// Relative `L^2` tolerance of the diagnose comparison against the exact
/// Fourier-mode solution.
pub const DIAGNOSE_EXACT_TOLERANCE: f64 = 1e-3;
/// Random fields drawn by diagnose.
pub const DIAGNOSE_RANDOM_FIELDS: usize = 20;

fn run_diagnose(
    config: &ExperimentConfig,
    problem: &Problem,
    summary: &mut Summary,
    files: &mut Vec<(String, String)>,
) -> Result<()> {
    let epsilon = required_epsilon(config)?;
    let (traj, mut row) = single_member(problem, epsilon, summary, files)?;
    row.case = "diagnose".into();

    // Exact solution for a constant conductivity and a single Fourier mode.
    if let (Background::Constant { value }, InitialData::FourierMode { mode, amplitude }, false) = (
        problem.coefficient.background(),
        &problem.initial_data,
        problem.coefficient.has_atoms(),
    ) {
        let g = problem.grid;
        let base = f64::from(*mode) * std::f64::consts::PI / g.length();
        let k = match g.boundary() {
            Boundary::DirichletZero => base,
            Boundary::Periodic => 2.0 * base,
        };
        let u0 = problem.data_at(epsilon)?;
        let mut worst: f64 = 0.0;
        for s in &traj.snapshots {
            let decay = (-value * k * k * s.time).exp();
            let exact = u0.scale(decay);
            let scale = exact.l2_norm().max(f64::MIN_POSITIVE);
            worst = worst.max(s.field.sub(&exact).l2_norm() / scale);
        }
        let _ = amplitude;
        row.error_sup = Some(worst);
        summary.checks([Check {
            name: "exact_solution",
            passed: worst <= DIAGNOSE_EXACT_TOLERANCE,
            detail: format!(
                "relative L2 error {worst:.6e} <= {DIAGNOSE_EXACT_TOLERANCE:.0e} against exp(-h k^2 t) u0"
            ),
        }]);
    }

    // Operator identities on random fields.
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let g = problem.grid;
    let m = g.storage_len();
    let (mut ibp, mut sym): (f64, f64) = (0.0, 0.0);
    for _ in 0..DIAGNOSE_RANDOM_FIELDS {
        let h = GridField::new(g, (0..m).map(|_| rng.gen_range(0.5..3.0)).collect())?;
        let v = GridField::new(g, (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        let w = GridField::new(g, (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        let op = DiffusionOperator::build(&h)?;
        let form = op.dirichlet_form(&v);
        ibp = ibp.max((op.apply(&v).inner(&v) + form).abs() / form.abs().max(f64::MIN_POSITIVE));
        let a = op.apply(&v).inner(&w);
        let b = v.inner(&op.apply(&w));
        sym = sym.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
    }
    summary.checks([
        Check {
            name: "integration_by_parts",
            passed: ibp <= 1e-12,
            detail: format!(
                "max relative defect {ibp:.3e} <= 1e-12 over {DIAGNOSE_RANDOM_FIELDS} random fields (seed {})",
                config.seed
            ),
        },
        Check {
            name: "operator_symmetry",
            passed: sym <= 1e-12,
            detail: format!("max relative asymmetry {sym:.3e} <= 1e-12"),
        },
    ]);

    let mut sweep = Csv::new(&SWEEP_HEADER);
    sweep.row(&row.fields());
    files.push(("sweep.csv".into(), sweep.finish()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagnose_passes_on_the_builtin_problem() {
        let out = run(&ExperimentConfig::diagnose_default()).unwrap();
        assert!(out.passed(), "{}", out.summary());
        assert_eq!(out.exit_code(), EXIT_PASS);
        assert!(out.summary().contains("max residual (energy identity 2)"));
        assert!(out.summary().contains("PASS exact_solution"));
    }

    #[test]
    fn numbers_have_seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
    }

    #[test]
    fn trajectory_csv_lists_every_node() {
        let out = run(&ExperimentConfig::diagnose_default()).unwrap();
        let csv = out.file("trajectory_0.csv").unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x,u"));
        assert_eq!(lines.count(), 51 * 256);
    }
}
