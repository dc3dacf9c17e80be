//! Command dispatch and reporting for the `ordhull` binary.
//!
//! Every command emits a sequence of [`Record`]s. The `jsonl` format writes
//! one JSON object per line; the `human` format renders the same records as
//! text. Exit codes: 0 success, 1 a statement failed or the hunt found
//! something, 2 invalid input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ordhull::action::Action;
use ordhull::demo::{self, DemoConfig, DemoRow, RealFunction, RealKind, RealModel, RealOrbit};
use ordhull::envelope::{
    classify, envelope, membership_witness, regularized_majorant, regularized_minorant, Algorithm, ClassSpec, Side,
};
use ordhull::instance::{FunctionTable, Instance, InstanceFlags};
use ordhull::io::{InstanceFile, LoadedInstance};
use ordhull::statements::{Checker, EnvelopeMode, Hypothesis, StatementId, StatementReport, Verdict};
use ordhull::verifier::{
    self, Bounds, Constraints, FMode, FamilyMode, FindingRecord, InstanceFamily, EXHAUSTIVE_LIMIT,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FINDING: u8 = 1;
pub const EXIT_INVALID: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ordhull", version, about = "Envelopes of homogeneous functions on finite ordered sets")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Human)]
    pub format: Format,
    /// Append a wall-clock timing record (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Jsonl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate an instance file.
    Validate { path: PathBuf },
    /// Print the lower or upper envelope of a named function.
    Envelope(EnvelopeArgs),
    /// Print the regularized minorant and/or majorant of a named function.
    Regularize {
        path: PathBuf,
        #[arg(long)]
        function: String,
        #[arg(long, value_enum, default_value_t = RegSide::Both)]
        side: RegSide,
    },
    /// Orbits, stabilizers and stationary points of both actions.
    Orbits { path: PathBuf },
    /// Class membership of named functions.
    Classify {
        path: PathBuf,
        /// Comma-separated names, or `all`.
        #[arg(long, default_value = "all")]
        functions: String,
    },
    /// Evaluate statements on the named functions.
    Check(CheckArgs),
    /// Search instance families for statement failures.
    Hunt(HuntArgs),
    /// Truncated numeric regularization over the reals.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    pub path: PathBuf,
    #[arg(long)]
    pub function: String,
    #[arg(long)]
    pub class: ClassSpec,
    #[arg(long, default_value = "lower")]
    pub side: Side,
    #[arg(long, default_value = "oracle")]
    pub algorithm: Algorithm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegSide {
    Min,
    Max,
    Both,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub path: PathBuf,
    /// Comma-separated statement ids, or `all`.
    #[arg(long, default_value = "all")]
    pub statements: String,
    /// Comma-separated function names, or `all`.
    #[arg(long, default_value = "all")]
    pub functions: String,
    /// Evaluate on every function table instead of the named ones.
    #[arg(long, conflicts_with = "functions")]
    pub tables: bool,
    /// Compute every envelope by brute force.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, env = "ORDHULL_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct HuntArgs {
    #[arg(long, default_value_t = 2)]
    pub max_h: usize,
    #[arg(long, default_value_t = 3)]
    pub max_x: usize,
    #[arg(long, default_value_t = 4)]
    pub max_s: usize,
    /// Only semigroups `H` that are not groups.
    #[arg(long, conflicts_with = "groups")]
    pub semigroup_only: bool,
    /// Only `H` and `T` groups.
    #[arg(long)]
    pub groups: bool,
    /// Only instances whose `T` is a group.
    #[arg(long)]
    pub t_group: bool,
    /// Only actions on `X` that are not free.
    #[arg(long)]
    pub non_free: bool,
    /// Comma-separated statement ids, or `all`.
    #[arg(long)]
    pub targets: String,
    /// Number of instances to examine.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    /// Also search instances outside the hypotheses shared by the targets.
    #[arg(long)]
    pub outside_hypotheses: bool,
    /// Sample instances at random even when the bounds allow enumeration.
    #[arg(long)]
    pub random: bool,
    #[arg(long, env = "ORDHULL_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Directory for finding files and `findings.jsonl`.
    #[arg(long, default_value = "findings")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Instance file with a `demo` block; overrides `--preset`.
    pub path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Preset::PosSquare)]
    pub preset: Preset,
    /// Acting sample is `{2^n : |n| <= n_max}`.
    #[arg(long, default_value_t = 10)]
    pub n_max: i32,
    /// Number of log-spaced evaluation points.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// `f(x) = x`, degree 1.
    PosIdentity,
    /// `f(x) = x^2`, degree 1.
    PosSquare,
    /// `x (1 + sin(2 pi log2 x) / 4)` under powers of 2.
    BoundedWavy,
    /// `e^(2t)` under translations by multiples of `ln 2`.
    ExpSquare,
    /// Orbit labels of a probe set of extended reals.
    Orbits,
}

/// One unit of command output.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    Command { command: String, args: Vec<String> },
    Instance { digest: String, h: usize, t: usize, x: usize, s: usize, completed: usize, flags: InstanceFlags },
    Table { kind: String, function: String, values: Vec<(String, String)> },
    Orbit { space: String, members: Vec<String>, stabilizers: Vec<Vec<String>>, stationary: bool },
    Classes { function: String, classes: Vec<ClassSpec>, witnesses: Vec<(ClassSpec, String)> },
    Verdict(StatementReport),
    Finding(FindingRecord),
    DemoRow(DemoRow),
    RealOrbit { value: String, orbit: RealOrbit, stationary: bool },
    Summary { status: String, detail: String },
    Error { message: String },
    Timing { millis: u128 },
}

fn render(r: &Record) -> String {
    match r {
        Record::Command { args, .. } => format!("$ ordhull {}", args.join(" ")),
        Record::Instance { digest, h, t, x, s, completed, flags } => format!(
            "instance {}: |H|={h} |T|={t} |X|={x} |S|={s} (completed {completed})\n  {flags}",
            &digest[..16]
        ),
        Record::Table { kind, function, values } => {
            let cells: Vec<String> = values.iter().map(|(x, v)| format!("{x}={v}")).collect();
            format!("{kind} of {function}: {}", cells.join(" "))
        }
        Record::Orbit { space, members, stabilizers, stationary } => {
            let stabs: Vec<String> = stabilizers.iter().map(|s| format!("{{{}}}", s.join(","))).collect();
            format!(
                "{space} orbit {{{}}}{} stabilizers {}",
                members.join(","),
                if *stationary { " (stationary)" } else { "" },
                stabs.join(" ")
            )
        }
        Record::Classes { function, classes, witnesses } => {
            let cs: Vec<&str> = classes.iter().map(|c| c.as_str()).collect();
            let ws: Vec<String> = witnesses.iter().map(|(c, w)| format!("not {c} at {w}")).collect();
            format!("{function}: {{{}}}{}{}", cs.join(","), if ws.is_empty() { "" } else { "; " }, ws.join("; "))
        }
        Record::Verdict(rep) => {
            let f = rep.function.as_deref().map(|f| format!(" [{f}]")).unwrap_or_default();
            let hyp = if rep.hypotheses_met { "" } else { " (hypotheses not met)" };
            match &rep.verdict {
                Verdict::Holds => format!("{}{f}: holds{hyp}", rep.stmt),
                Verdict::Skipped { reason } => format!("{}{f}: skipped, {reason}", rep.stmt),
                Verdict::Fails(w) => format!(
                    "{}{f}: FAILS{hyp} part {}{}{}: {}",
                    rep.stmt,
                    w.part,
                    w.point.as_deref().map(|p| format!(" at {p}")).unwrap_or_default(),
                    if w.hypotheses_met { "" } else { " (part hypotheses not met)" },
                    w.detail
                ),
            }
        }
        Record::Finding(f) => format!(
            "finding {} {} [{}] part {}{}: {} -> {}{}",
            f.instance_index,
            f.stmt,
            f.function,
            f.witness.part,
            if f.witness.hypotheses_met { "" } else { " (hypotheses not met)" },
            f.witness.detail,
            f.file,
            if f.oracle_confirmed { " (oracle-confirmed)" } else { "" }
        ),
        Record::DemoRow(r) => format!("{}\t{}\t{}\t{}", r.x, r.f, r.f_min, r.f_max),
        Record::RealOrbit { value, orbit, stationary } => {
            format!("{value}\t{orbit}{}", if *stationary { "\tstationary" } else { "" })
        }
        Record::Summary { status, detail } => format!("{status}: {detail}"),
        Record::Error { message } => format!("error: {message}"),
        Record::Timing { millis } => format!("elapsed {millis} ms"),
    }
}

/// Writes records as they are produced.
pub struct Reporter<'w> {
    format: Format,
    out: &'w mut dyn Write,
}

impl<'w> Reporter<'w> {
    pub fn new(format: Format, out: &'w mut dyn Write) -> Self {
        Reporter { format, out }
    }

    pub fn emit(&mut self, r: Record) -> Result<()> {
        let line = match self.format {
            Format::Jsonl => serde_json::to_string(&r)?,
            Format::Human => render(&r),
        };
        writeln!(self.out, "{line}")?;
        Ok(())
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli, args: &[String], out: &mut dyn Write) -> u8 {
    let start = Instant::now();
    let mut rep = Reporter::new(cli.format, out);
    let name = command_name(&cli.command);
    let code = rep
        .emit(Record::Command { command: name.to_string(), args: args.to_vec() })
        .and_then(|()| dispatch(&cli.command, &mut rep));
    let code = match code {
        Ok(c) => c,
        Err(e) => {
            let message = format!("{e:#}");
            let _ = rep.emit(Record::Error { message });
            EXIT_INVALID
        }
    };
    if cli.timing {
        let _ = rep.emit(Record::Timing { millis: start.elapsed().as_millis() });
    }
    code
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Envelope(_) => "envelope",
        Command::Regularize { .. } => "regularize",
        Command::Orbits { .. } => "orbits",
        Command::Classify { .. } => "classify",
        Command::Check(_) => "check",
        Command::Hunt(_) => "hunt",
        Command::Demo(_) => "demo",
    }
}

fn dispatch(c: &Command, rep: &mut Reporter) -> Result<u8> {
    match c {
        Command::Validate { path } => {
            let (_, file) = load(path, rep)?;
            let n = file.functions.len();
            rep.emit(Record::Summary { status: "valid".into(), detail: format!("{n} function(s)") })?;
            Ok(EXIT_OK)
        }
        Command::Envelope(a) => cmd_envelope(a, rep),
        Command::Regularize { path, function, side } => cmd_regularize(path, function, *side, rep),
        Command::Orbits { path } => cmd_orbits(path, rep),
        Command::Classify { path, functions } => cmd_classify(path, functions, rep),
        Command::Check(a) => cmd_check(a, rep),
        Command::Hunt(a) => cmd_hunt(a, rep),
        Command::Demo(a) => cmd_demo(a, rep),
    }
}

fn load(path: &Path, rep: &mut Reporter) -> Result<(LoadedInstance, InstanceFile)> {
    let file = InstanceFile::read(path)?;
    let loaded = file.load()?;
    let inst = &loaded.instance;
    rep.emit(Record::Instance {
        digest: file.digest(),
        h: inst.nh(),
        t: inst.t().len(),
        x: inst.nx(),
        s: inst.poset().base().len(),
        completed: inst.nc(),
        flags: inst.flags(),
    })?;
    Ok((loaded, file))
}

fn named<'a>(loaded: &'a LoadedInstance, name: &str) -> Result<&'a FunctionTable> {
    loaded.function(name).ok_or_else(|| anyhow!("no function named `{name}`"))
}

fn select<'a>(loaded: &'a LoadedInstance, list: &str) -> Result<Vec<(String, &'a FunctionTable)>> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(loaded.functions.iter().map(|(n, f)| (n.clone(), f)).collect());
    }
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|n| Ok((n.trim().to_string(), named(loaded, n.trim())?)))
        .collect()
}

fn table(inst: &Instance, kind: String, function: &str, f: &FunctionTable) -> Record {
    Record::Table { kind, function: function.to_string(), values: inst.render_function(f) }
}

fn cmd_envelope(a: &EnvelopeArgs, rep: &mut Reporter) -> Result<u8> {
    let (loaded, _) = load(&a.path, rep)?;
    let inst = &loaded.instance;
    let f = named(&loaded, &a.function)?;
    let e = envelope(inst, f, a.class, a.side, a.algorithm)?;
    let alg = match a.algorithm {
        Algorithm::BruteForce => "oracle",
        Algorithm::Orbitwise => "orbitwise",
    };
    rep.emit(table(inst, format!("{} {} envelope ({alg})", a.side.as_str(), a.class), &a.function, &e))?;
    Ok(EXIT_OK)
}

fn cmd_regularize(path: &Path, function: &str, side: RegSide, rep: &mut Reporter) -> Result<u8> {
    let (loaded, _) = load(path, rep)?;
    let inst = &loaded.instance;
    let f = named(&loaded, function)?;
    if side != RegSide::Max {
        let g = regularized_minorant(inst, f)?;
        rep.emit(table(inst, "regularized minorant".into(), function, &g))?;
    }
    if side != RegSide::Min {
        let g = regularized_majorant(inst, f)?;
        rep.emit(table(inst, "regularized majorant".into(), function, &g))?;
    }
    Ok(EXIT_OK)
}

fn orbit_records<A: Action>(space: &str, action: &A, rep: &mut Reporter) -> Result<()> {
    let acting = action.acting();
    let label = |xs: &mut dyn Iterator<Item = usize>| -> Vec<String> { xs.map(|x| action.point_label(x).to_string()).collect() };
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for x in 0..action.point_count() {
        let mut orbit: Vec<usize> = action.orbit(x).into_iter().collect();
        if acting.is_group() {
            if seen.iter().any(|o| o.contains(&x)) {
                continue;
            }
        } else {
            // Semigroup orbits need not partition; list each point's orbit
            // together with the point.
            if !orbit.contains(&x) {
                orbit.insert(0, x);
            }
        }
        let stabilizers = orbit
            .iter()
            .map(|&y| action.stabilizer(y).into_iter().map(|h| acting.name(h).to_string()).collect())
            .collect();
        let stationary = (0..acting.len()).all(|h| action.act(h, x) == x);
        rep.emit(Record::Orbit {
            space: space.to_string(),
            members: label(&mut orbit.iter().copied()),
            stabilizers,
            stationary,
        })?;
        seen.push(orbit);
    }
    Ok(())
}

fn cmd_orbits(path: &Path, rep: &mut Reporter) -> Result<u8> {
    let (loaded, _) = load(path, rep)?;
    let inst = &loaded.instance;
    orbit_records("X", inst.carrier(), rep)?;
    orbit_records("S", inst.codomain(), rep)?;
    Ok(EXIT_OK)
}

fn cmd_classify(path: &Path, functions: &str, rep: &mut Reporter) -> Result<u8> {
    let (loaded, _) = load(path, rep)?;
    let inst = &loaded.instance;
    for (name, f) in select(&loaded, functions)? {
        let classes: Vec<ClassSpec> = classify(inst, f).into_iter().collect();
        let witnesses = ClassSpec::ALL
            .into_iter()
            .filter_map(|c| {
                membership_witness(inst, f, c).map(|(h, x)| {
                    let x = inst.carrier().point_label(x);
                    (c, h.map_or_else(|| format!("x={x}"), |h| format!("h={}, x={x}", inst.h().name(h))))
                })
            })
            .collect();
        rep.emit(Record::Classes { function: name, classes, witnesses })?;
    }
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs, rep: &mut Reporter) -> Result<u8> {
    let stmts = StatementId::parse_list(&a.statements)?;
    if stmts.is_empty() {
        bail!("no statements given");
    }
    let (loaded, _) = load(&a.path, rep)?;
    let inst = &loaded.instance;
    let mode = if a.oracle { EnvelopeMode::Oracle } else { EnvelopeMode::Fast };
    let checker = Checker::new(inst, mode, a.seed);
    let mut reports = checker.check_global(&stmts);
    let owned: Vec<(String, FunctionTable)> = if a.tables {
        verifier::suite_functions(inst, FMode::All, a.seed)
    } else {
        select(&loaded, &a.functions)?.into_iter().map(|(n, f)| (n, f.clone())).collect()
    };
    if owned.is_empty() && stmts.iter().any(|s| s.needs_function()) {
        bail!("no functions to check");
    }
    for (name, f) in &owned {
        reports.extend(checker.check_function(name, f, &stmts));
    }
    let failed = reports.iter().filter(|r| r.verdict.is_failure()).count();
    let total = reports.len();
    for r in reports {
        rep.emit(Record::Verdict(r))?;
    }
    let (status, code) = if failed == 0 { ("ok", EXIT_OK) } else { ("fails", EXIT_FINDING) };
    rep.emit(Record::Summary { status: status.into(), detail: format!("{failed} of {total} report(s) failed") })?;
    Ok(code)
}

fn cmd_hunt(a: &HuntArgs, rep: &mut Reporter) -> Result<u8> {
    let targets = StatementId::parse_list(&a.targets)?;
    let bounds = Bounds::new(a.max_h, a.max_x, a.max_s);
    let mut constraints = if a.outside_hypotheses { Constraints::default() } else { common_hypotheses(&targets) };
    if a.groups {
        constraints.h_group = Some(true);
        constraints.t_group = Some(true);
    }
    if a.semigroup_only {
        if constraints.h_group == Some(true) {
            bail!("--semigroup-only excludes the targets' hypotheses; add --outside-hypotheses");
        }
        constraints.h_group = Some(false);
    }
    if a.t_group {
        constraints.t_group = Some(true);
    }
    if a.non_free {
        constraints.free = Some(false);
    }
    let exhaustive = !a.random
        && bounds.max_h <= EXHAUSTIVE_LIMIT.max_h
        && bounds.max_x <= EXHAUSTIVE_LIMIT.max_x
        && bounds.max_s <= EXHAUSTIVE_LIMIT.max_s;
    let mode = if exhaustive { FamilyMode::Exhaustive } else { FamilyMode::Random { seed: a.seed, count: a.budget } };
    let family = InstanceFamily { bounds, mode, constraints };
    let outcome = verifier::hunt(&family, &targets, a.budget, a.seed)?;
    if outcome.findings.is_empty() {
        rep.emit(Record::Summary {
            status: "none".into(),
            detail: format!("{} instance(s) examined, no confirmed failure", outcome.examined),
        })?;
        return Ok(EXIT_OK);
    }
    verifier::write_findings(&outcome, &a.out).with_context(|| format!("writing findings to {}", a.out.display()))?;
    let index = std::fs::read_to_string(a.out.join("findings.jsonl"))?;
    for line in index.lines() {
        rep.emit(Record::Finding(serde_json::from_str(line)?))?;
    }
    rep.emit(Record::Summary {
        status: "findings".into(),
        detail: format!(
            "{} confirmed finding(s) in {} instance(s), {} unconfirmed, written to {}",
            outcome.findings.len(),
            outcome.examined,
            outcome.unconfirmed,
            a.out.display()
        ),
    })?;
    Ok(EXIT_FINDING)
}

/// Flag requirements shared by the hypotheses of every target.
pub fn common_hypotheses(targets: &[StatementId]) -> Constraints {
    let shared = |h: Hypothesis| !targets.is_empty() && targets.iter().all(|t| t.requires().contains(&h));
    let need = |h| shared(h).then_some(true);
    Constraints {
        h_group: need(Hypothesis::HGroup),
        h_monoid: need(Hypothesis::HMonoid),
        t_group: need(Hypothesis::TGroup),
        t_commutative: need(Hypothesis::TCommutative),
        free: None,
    }
}

/// The configuration a preset stands for; `None` for the orbit probe.
pub fn preset_config(p: Preset, n_max: i32, points: usize) -> Result<Option<DemoConfig>> {
    let hs = demo::dyadic(n_max);
    let (kind, sample_h, sample_x, function) = match p {
        Preset::Orbits => return Ok(None),
        Preset::PosIdentity => (
            RealKind::PosHomog { p: 1.0 },
            hs,
            demo::log_spaced(0.01, 100.0, points),
            RealFunction::Power { coef: 1.0, exponent: 1.0 },
        ),
        Preset::PosSquare => (
            RealKind::PosHomog { p: 1.0 },
            hs,
            demo::log_spaced(0.01, 100.0, points),
            RealFunction::Power { coef: 1.0, exponent: 2.0 },
        ),
        Preset::BoundedWavy => (
            RealKind::BoundedHomog { r0: 2.0, p: 1 },
            hs,
            demo::log_spaced(0.5, 8.0, points),
            RealFunction::LogPeriodic { exponent: 1.0, amplitude: 0.25, base: 2.0 },
        ),
        Preset::ExpSquare => (
            RealKind::ExpHomog { p: 1.0 },
            hs.iter().map(|h| h.ln()).collect(),
            demo::log_spaced(0.01, 100.0, points).iter().map(|x| x.ln()).collect(),
            RealFunction::Exp { coef: 1.0, rate: 2.0 },
        ),
    };
    let model = RealModel::new(kind, sample_h, sample_x)?;
    Ok(Some(DemoConfig { model, function }))
}

/// The probe set of the orbit preset.
pub const ORBIT_PROBES: [f64; 9] = [f64::NEG_INFINITY, -1e300, -3.5, -0.0, 0.0, 1e-300, 2.0, 1e300, f64::INFINITY];

fn cmd_demo(a: &DemoArgs, rep: &mut Reporter) -> Result<u8> {
    let cfg = match &a.path {
        Some(path) => {
            let (loaded, _) = load(path, rep)?;
            Some(loaded.demo.ok_or_else(|| anyhow!("{} has no demo block", path.display()))?)
        }
        None => preset_config(a.preset, a.n_max, a.points)?,
    };
    let Some(cfg) = cfg else {
        for x in ORBIT_PROBES {
            let orbit = demo::classify_real_orbit(x).expect("probes are not NaN");
            rep.emit(Record::RealOrbit { value: format!("{x:?}"), orbit, stationary: orbit.is_stationary() })?;
        }
        return Ok(EXIT_OK);
    };
    for row in demo::demo_table(&cfg)? {
        rep.emit(Record::DemoRow(row))?;
    }
    Ok(EXIT_OK)
}
