//! The subcommands. Each computes its artifacts in memory; [`execute`] writes
//! them under the output directory.

use std::path::{Path, PathBuf};

use fluxknot_core::assembly::{sweep_row, sweep_spreads, sweep_verdict, total_helicity, validate_assembly, SweepVerdict};
use fluxknot_core::blocks::{sew_lutz, BoundaryJet};
use fluxknot_core::flux::{FiberSurface, MeasureSpec};
use fluxknot_core::invariants::{check_inequalities, CohomologyClass, Normalization, Numerics};
use fluxknot_core::math::RngStream;
use rayon::prelude::*;

use crate::assembly_io::AssemblySpec;
use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_f64, write_artifacts, Artifact, Table};
use crate::parallel;
use crate::verify::{self, VerifyOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0:#}")]
    Compute(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl From<fluxknot_core::Error> for CliError {
    fn from(e: fluxknot_core::Error) -> Self {
        CliError::Compute(e.into())
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Compute(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Invariants,
    Flux,
    Sweep,
    Sew,
    Verify,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// Replaces the verify suite's quadrature by a single-panel rule at this
    /// tolerance (mutation check).
    pub quad_tol: Option<f64>,
}

/// Files to write, lines to print, and an optional failure that still lets
/// the files be written (exit code 1).
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub messages: Vec<String>,
    pub failure: Option<String>,
}

impl Outcome {
    fn with_report(mut self, lines: Vec<String>) -> Self {
        self.artifacts.push(Artifact::text("report.txt", &lines));
        self
    }
}

fn missing(section: &str) -> CliError {
    CliError::Config(ConfigError::Invalid { field: section.into(), message: "section is required for this command".into() })
}

pub fn cmd_invariants(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let numerics = Numerics::default();
    let norm: Normalization = config.normalization.into();
    let mut table = Table::new([
        "profile_id",
        "normalization",
        "winding",
        "wrappingness",
        "trunkenness",
        "helicity",
        "gap",
        "tangency_count",
    ]);
    let mut lines = vec![format!("invariants ({} normalization)", norm.as_str())];
    for (name, spec) in &config.profiles {
        let profile = spec.build().map_err(|e| CliError::Compute(anyhow::anyhow!("profile {name}: {e}")))?;
        let r = numerics
            .report(&profile, &spec.beta(), &spec.correction(), norm)
            .map_err(|e| CliError::Compute(anyhow::anyhow!("profile {name}: {e}")))?;
        table.push(vec![
            name.clone(),
            norm.as_str().into(),
            fmt_f64(r.winding),
            fmt_f64(r.wrappingness),
            fmt_f64(r.trunkenness),
            fmt_f64(r.helicity),
            fmt_f64(r.gap),
            r.tangency_count.to_string(),
        ]);
        let ineq = check_inequalities(&r, 1e-9);
        lines.push(format!(
            "{name}: winding {:.12}, wrappingness {:.12}, trunkenness {:.12}, helicity {:.12}, gap {:.3e}, \
             {} tangent orbit(s), inequalities {}",
            r.winding,
            r.wrappingness,
            r.trunkenness,
            r.helicity,
            r.gap,
            r.tangency_count,
            if ineq.passed { "hold" } else { "VIOLATED" }
        ));
    }
    let mut outcome = Outcome { artifacts: vec![Artifact::csv("invariants.csv", &table)], ..Outcome::default() };
    if let Some(spec) = &config.assembly {
        let assembly = spec.build(&config.profiles)?;
        match validate_assembly(&assembly) {
            Ok(summary) => {
                let external: Vec<String> = summary.external.iter().map(ToString::to_string).collect();
                lines.push(format!(
                    "assembly: {} blocks, {} gluings, external tori [{}], euler characteristic {}",
                    summary.block_count,
                    summary.gluing_count,
                    external.join(", "),
                    summary.euler_characteristic
                ));
                match total_helicity(&assembly) {
                    Ok(h) => lines.push(format!("assembly total helicity {h:.12}")),
                    Err(e) => lines.push(format!("assembly total helicity unavailable: {e}")),
                }
            }
            Err(violations) => {
                for v in &violations {
                    lines.push(format!("assembly violation: {v:?}"));
                }
                outcome.failure = Some(format!("assembly has {} violation(s)", violations.len()));
            }
        }
        if let Some(explicit) = AssemblySpec::from_assembly(&assembly) {
            outcome.artifacts.push(Artifact { name: "assembly.toml".into(), bytes: explicit.to_toml()?.into_bytes() });
        }
    }
    outcome.messages = lines.clone();
    Ok(outcome.with_report(lines))
}

pub fn cmd_flux(config: &ExperimentConfig, seed: Option<u64>) -> Result<Outcome, CliError> {
    let mc = config.mc.as_ref().ok_or_else(|| missing("mc"))?;
    let seed = seed.unwrap_or(mc.seed);
    let measure = config.measure.build()?;
    let numerics = Numerics::default();
    let mut outcome = Outcome::default();
    let mut lines = Vec::new();
    for name in config.mc_profiles() {
        let profile = config.profiles[&name].build().map_err(|e| CliError::Compute(anyhow::anyhow!("profile {name}: {e}")))?;
        let sweep = parallel::fiber_sweep(&profile, &measure, mc.theta_grid, mc.epsilon, mc.n, seed)?;
        let mut table = Table::new(["theta", "value", "stderr", "n", "epsilon", "seed"]);
        for (theta, e) in &sweep.rows {
            table.push(vec![
                fmt_f64(*theta),
                fmt_f64(e.value),
                fmt_f64(e.stderr),
                e.n_samples.to_string(),
                fmt_f64(e.epsilon),
                e.seed.to_string(),
            ]);
        }
        outcome.artifacts.push(Artifact::csv(format!("flux_{name}.csv"), &table));

        let ns = mc.convergence_n.clone().unwrap_or_else(|| vec![mc.n]);
        let grid: Vec<(usize, f64, u64)> = mc
            .convergence_epsilons
            .iter()
            .flat_map(|&e| ns.iter().map(move |&n| (e, n)))
            .enumerate()
            .map(|(i, (e, n))| (i, e, n))
            .collect();
        let surface = FiberSurface::new(mc.theta);
        let conv = grid
            .par_iter()
            .map(|&(i, e, n)| parallel::estimate(&profile, &measure, &surface, e, n, RngStream::new(seed, i as u64)))
            .collect::<fluxknot_core::Result<Vec<_>>>()?;
        let mut ctable = Table::new(["epsilon", "n", "value", "stderr"]);
        for ((_, e, n), est) in grid.iter().zip(&conv) {
            ctable.push(vec![fmt_f64(*e), n.to_string(), fmt_f64(est.value), fmt_f64(est.stderr)]);
        }
        outcome.artifacts.push(Artifact::csv(format!("flux_{name}_convergence.csv"), &ctable));

        match &measure {
            MeasureSpec::DiracOrbit(orbit) => {
                let counts: Vec<u64> = sweep.rows.iter().map(|r| r.1.hits).collect();
                let uniform = counts.windows(2).all(|w| w[0] == w[1]);
                if uniform {
                    lines.push(format!("{name}: crossings = {} (exact)", counts[0]));
                } else {
                    lines.push(format!("{name}: crossings range {:?} (exact)", counts));
                }
                let _ = orbit;
            }
            MeasureSpec::Volume(norm) => {
                let exact = numerics.fiber_flux(&profile, *norm)?;
                let within = sweep.rows.iter().filter(|r| (r.1.value - exact).abs() <= 3.0 * r.1.stderr).count();
                lines.push(format!(
                    "{name}: fiber flux over {} fibers min {:.6} max {:.6} (fixed-fibration estimates: the max is an upper \
                     bound for the infimum, the min is not certified); analytic {exact:.6}, {within}/{} within 3 sigma",
                    sweep.rows.len(),
                    sweep.empirical_min,
                    sweep.empirical_max,
                    sweep.rows.len()
                ));
                let low = sweep.rows.iter().filter(|r| r.1.low_hit_count).count();
                if low > 0 {
                    lines.push(format!("{name}: warning: {low} estimate(s) rest on fewer than 100 hits"));
                }
            }
        }
    }
    outcome.messages = lines.clone();
    Ok(outcome.with_report(lines))
}

pub fn cmd_sweep(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = config.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
    let corr = CohomologyClass::new(s.correction[0], s.correction[1]);
    let rows = s.q.par_iter().map(|&q| sweep_row(s.a, s.b, q, &corr)).collect::<fluxknot_core::Result<Vec<_>>>()?;
    let mut table = Table::new([
        "q",
        "helicity",
        "winding",
        "wrappingness",
        "trunkenness",
        "outside_constraint",
        "printed_helicity",
    ]);
    for r in &rows {
        table.push(vec![
            fmt_f64(r.q),
            fmt_f64(r.helicity),
            fmt_f64(r.winding),
            fmt_f64(r.wrappingness),
            fmt_f64(r.trunkenness),
            r.outside_constraint.to_string(),
            fmt_f64(fluxknot_core::invariants::printed_sine_example_helicity(s.a, s.b, r.q, &corr)),
        ]);
    }
    let verdict = sweep_verdict(&rows);
    let mut lines = vec![format!("sweep a = {}, b = {}, {} value(s) of Q: {}", s.a, s.b, rows.len(), verdict.as_str())];
    if let Some(sp) = sweep_spreads(&rows) {
        lines.push(format!(
            "ranges over admissible rows: winding {:.3e}, wrappingness {:.3e}, trunkenness {:.3e}, helicity {:.6}",
            sp.winding, sp.wrappingness, sp.trunkenness, sp.helicity
        ));
    }
    let flagged = rows.iter().filter(|r| r.outside_constraint).count();
    if flagged > 0 {
        lines.push(format!("{flagged} row(s) violate |a| < |b| - |Q|"));
    }
    let failure = match verdict {
        SweepVerdict::AllRowsFlagged => Some("every row violates |a| < |b| - |Q|".into()),
        SweepVerdict::InsufficientVariation => {
            lines.push("warning: a single admissible Q value cannot show variation".into());
            None
        }
        _ => None,
    };
    let outcome = Outcome { artifacts: vec![Artifact::csv("sweep.csv", &table)], messages: lines.clone(), failure };
    Ok(outcome.with_report(lines))
}

pub fn cmd_sew(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let s = config.sew.as_ref().ok_or_else(|| missing("sew"))?;
    let jet = |j: [f64; 4]| BoundaryJet::new(j[0], j[1], j[2], j[3]);
    let sewing = sew_lutz(&jet(s.left), &jet(s.right), s.extra_turns)?;
    let report = fluxknot_core::blocks::lutz_valid(&sewing.pair);
    let mut table = Table::new(["t", "p", "q", "dp", "dq", "wronskian", "radius", "angle"]);
    for i in 0..s.samples {
        let t = i as f64 / (s.samples - 1) as f64;
        let j = BoundaryJet::of_pair(&sewing.pair, t);
        let radius = sewing.curve.log_radius.eval(t).0.exp();
        let angle = sewing.curve.angle.eval(t).0;
        table.push(vec![
            fmt_f64(t),
            fmt_f64(j.p),
            fmt_f64(j.q),
            fmt_f64(j.dp),
            fmt_f64(j.dq),
            fmt_f64(j.wronskian()),
            fmt_f64(radius),
            fmt_f64(angle),
        ]);
    }
    let lines = vec![format!(
        "sewn with {} extra turn(s): angle {:.6} -> {:.6}; Lutz-valid {} (min |W| {:.3e}, sign {:?})",
        sewing.turns, sewing.angle_start, sewing.angle_end, report.is_valid, report.min_abs_wronskian, report.sign
    )];
    let outcome = Outcome { artifacts: vec![Artifact::csv("sew.csv", &table)], messages: lines.clone(), failure: None };
    Ok(outcome.with_report(lines))
}

/// Runs criteria 1 to 9 on the current pool, then reruns them on a pool of a
/// different size to check criterion 10.
pub fn cmd_verify(opts: &RunOptions) -> Result<Outcome, CliError> {
    let mut vopts = VerifyOptions { seed: opts.seed.unwrap_or(verify::DEFAULT_SEED), ..VerifyOptions::default() };
    if let Some(tol) = opts.quad_tol {
        vopts = vopts.corrupted(tol);
    }
    let results = verify::run_checks(&vopts);
    let current = rayon::current_num_threads();
    let alt = if current == 1 { 4 } else { 1 };
    let det = verify::determinism(&results, &vopts, alt);
    let mut messages: Vec<String> = results.iter().map(|r| r.line()).collect();
    messages.push(det.line());
    let mut report: Vec<String> = results
        .iter()
        .chain(std::iter::once(&det))
        .map(|r| format!("criterion {} {}: {}: {}", r.id, r.name, if r.passed { "PASS" } else { "FAIL" }, r.detail))
        .collect();
    let failed: Vec<String> =
        results.iter().chain(std::iter::once(&det)).filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    report.push(if failed.is_empty() { "all criteria passed".into() } else { format!("failed: {}", failed.join(", ")) });
    let outcome = Outcome {
        artifacts: verify::artifacts(&results),
        messages,
        failure: (!failed.is_empty()).then(|| format!("criteria failed: {}", failed.join(", "))),
    };
    Ok(outcome.with_report(report))
}

/// Output directory: the flag, then the config, then `out`.
pub fn output_dir(config: Option<&ExperimentConfig>, opts: &RunOptions) -> PathBuf {
    opts.out.clone().or_else(|| config.and_then(|c| c.output.clone())).unwrap_or_else(|| PathBuf::from("out"))
}

/// Loads the config (when the command needs one), runs the command on a pool
/// of the requested size and writes its files.
pub fn execute(command: &Command, config_path: Option<&Path>, opts: &RunOptions) -> Result<(Outcome, PathBuf), CliError> {
    let config = match (command, config_path) {
        (Command::Verify, _) => None,
        (_, Some(path)) => Some(ExperimentConfig::load(path)?),
        (_, None) => {
            return Err(CliError::Config(ConfigError::Invalid {
                field: "--config".into(),
                message: "this command needs a config file".into(),
            }))
        }
    };
    let pool = parallel::pool(opts.threads)?;
    let outcome = pool.install(|| match command {
        Command::Invariants => cmd_invariants(config.as_ref().expect("loaded")),
        Command::Flux => cmd_flux(config.as_ref().expect("loaded"), opts.seed),
        Command::Sweep => cmd_sweep(config.as_ref().expect("loaded")),
        Command::Sew => cmd_sew(config.as_ref().expect("loaded")),
        Command::Verify => cmd_verify(opts),
    })?;
    let dir = output_dir(config.as_ref(), opts);
    write_artifacts(&dir, &outcome.artifacts)?;
    Ok((outcome, dir))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn invariants_of_constant_profile() {
        let c = parse(
            "normalization = \"lebesgue\"\n[profiles.const_2_3]\nf = { family = \"constant\", value = 2.0 }\n\
             g = { family = \"constant\", value = 3.0 }\n",
        );
        let out = cmd_invariants(&c).unwrap();
        let csv = String::from_utf8(out.artifacts[0].bytes.clone()).unwrap();
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "const_2_3");
        let tks: f64 = row[4].parse().unwrap();
        assert!((tks - 8.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn empty_profile_list_gives_header_only() {
        let out = cmd_invariants(&parse("")).unwrap();
        assert_eq!(
            out.artifacts[0].bytes,
            b"profile_id,normalization,winding,wrappingness,trunkenness,helicity,gap,tangency_count\n"
        );
    }

    #[test]
    fn vanishing_profile_reports_t() {
        let c = parse("[profiles.bad]\nf = { family = \"affine\", slope = 1.0, intercept = -0.5 }\ng = { family = \"constant\", value = 0.0 }\n");
        let err = cmd_invariants(&c).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("t = 0.5"), "{err}");
    }

    #[test]
    fn sweep_verdicts() {
        let c = parse("[sweep]\na = 1.0\nb = 4.0\nq = [-2.0, -1.0, 0.0, 1.0, 2.0]\n");
        let out = cmd_sweep(&c).unwrap();
        assert!(out.failure.is_none());
        assert!(out.messages[0].contains("independence demonstrated"), "{:?}", out.messages);
        let c = parse("[sweep]\na = 3.0\nb = 4.0\nq = [2.0]\n");
        assert!(cmd_sweep(&c).unwrap().failure.is_some());
        let c = parse("[sweep]\na = 1.0\nb = 4.0\nq = [1.0]\n");
        let out = cmd_sweep(&c).unwrap();
        assert!(out.failure.is_none());
        assert!(out.messages[0].contains("insufficient variation"));
    }

    #[test]
    fn dirac_flux_summary() {
        let c = parse(
            "[profiles.unit]\nf = { family = \"constant\", value = 1.0 }\ng = { family = \"constant\", value = 0.0 }\n\
             [measure]\nkind = \"dirac\"\np = 2\nq = 3\n[mc]\nepsilon = 1e-3\nn = 1000\n",
        );
        let out = cmd_flux(&c, None).unwrap();
        assert!(out.messages[0].contains("crossings = 2 (exact)"), "{:?}", out.messages);
    }

    #[test]
    fn sew_demo() {
        let c = parse("[sew]\nleft = [1.0, 0.0, 0.0, 1.0]\nright = [0.0, 1.0, -1.0, 0.0]\nsamples = 11\n");
        let out = cmd_sew(&c).unwrap();
        let csv = String::from_utf8(out.artifacts[0].bytes.clone()).unwrap();
        assert_eq!(csv.lines().count(), 12);
        assert!(out.messages[0].contains("Lutz-valid true"));
    }

    #[test]
    fn missing_sections_are_config_errors() {
        assert_eq!(cmd_sweep(&parse("")).unwrap_err().exit_code(), 2);
        assert_eq!(cmd_flux(&parse(""), None).unwrap_err().exit_code(), 2);
    }
}
