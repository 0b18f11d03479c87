//! Command-line front end: problem files, reports and the `ub` subcommands.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds_classic::{dc_bound, gk_bound, kat_bound, yat2_bound, BoundKind};
use crate::bounds_new::{lnew3, lnew4, unew4, unew5, Mode};
use crate::error::Error;
use crate::linalg_lp::{optimal_inclass_bound, BoundSense, INCLASS_MAX_EVENTS};
use crate::space::{
    check_atom_cap, derive_partial_info, exact_union, generate_random_space, EventSpace,
    PartialInfo, SpaceModel, WeightVector,
};
use crate::weights::{
    compare_all, gk_clipped, BoundFamily, BoundReport, OrderingFlag, ReportEntry, SearchConfig,
    SearchSummary, Strategy,
};

pub const PROBLEM_SCHEMA: &str = "ub-v1";
pub const REPORT_SCHEMA: &str = "ub-report-v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;

/// An error with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_inconsistency() {
            EXIT_INCONSISTENT
        } else if matches!(e, Error::Numerical(_)) {
            EXIT_FAILURE
        } else {
            EXIT_INVALID
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomsForm {
    pub n: usize,
    /// Decimal bitmask → probability; bit `i` set means event `i` occurs.
    pub probs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialForm {
    pub alpha: Vec<f64>,
    pub pairwise: Vec<Vec<f64>>,
}

/// On-disk problem: exactly one of `atoms` or `partial`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<AtomsForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial: Option<PartialForm>,
}

/// A parsed and validated problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub label: Option<String>,
    pub space: Option<EventSpace>,
    pub info: PartialInfo,
}

impl ProblemFile {
    pub fn from_space(space: &EventSpace, label: Option<String>) -> Self {
        let probs = space
            .atoms()
            .iter()
            .map(|&(mask, p)| (mask.to_string(), p))
            .collect();
        Self {
            schema: PROBLEM_SCHEMA.into(),
            label,
            atoms: Some(AtomsForm {
                n: space.n(),
                probs,
            }),
            partial: None,
        }
    }

    pub fn from_info(info: &PartialInfo, label: Option<String>) -> Self {
        Self {
            schema: PROBLEM_SCHEMA.into(),
            label,
            atoms: None,
            partial: Some(PartialForm {
                alpha: info.alpha().to_vec(),
                pairwise: info.pairwise().to_rows(),
            }),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::invalid(format!("malformed problem file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("problem files serialize");
        s.push('\n');
        s
    }

    pub fn into_problem(self) -> CliResult<Problem> {
        if self.schema != PROBLEM_SCHEMA {
            return Err(CliError::invalid(format!(
                "unsupported schema {:?}, expected {PROBLEM_SCHEMA:?}",
                self.schema
            )));
        }
        match (self.atoms, self.partial) {
            (Some(atoms), None) => {
                check_atom_cap(atoms.n)?;
                let mut parsed = Vec::with_capacity(atoms.probs.len());
                for (key, &p) in &atoms.probs {
                    let mask: u64 = key.trim().parse().map_err(|_| {
                        CliError::invalid(format!("atoms.probs: key {key:?} is not a decimal bitmask"))
                    })?;
                    parsed.push((mask, p));
                }
                let space = EventSpace::new(atoms.n, parsed)?;
                let info = derive_partial_info(&space);
                Ok(Problem {
                    label: self.label,
                    space: Some(space),
                    info,
                })
            }
            (None, Some(partial)) => {
                let info = PartialInfo::from_rows(partial.alpha, &partial.pairwise)?;
                Ok(Problem {
                    label: self.label,
                    space: None,
                    info,
                })
            }
            (Some(_), Some(_)) => Err(CliError::invalid(
                "problem file has both `atoms` and `partial`; give exactly one",
            )),
            (None, None) => Err(CliError::invalid(
                "problem file needs one of `atoms` or `partial`",
            )),
        }
    }
}

pub fn load_problem(path: &Path) -> CliResult<Problem> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    ProblemFile::parse(&text)?.into_problem()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub path: String,
    pub form: String,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Settings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_clip: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fptas_eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
}

/// Everything a command reports. Machine output never carries timing so
/// that repeated runs are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub label: Option<String>,
    pub input: InputEcho,
    pub settings: Settings,
    pub skipped: Vec<String>,
    pub result: BoundReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    schema: String,
    command: String,
    label: Option<String>,
    input: InputEcho,
    settings: Settings,
    skipped: Vec<String>,
    n: usize,
    exact_union: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum ReportLine {
    Header(Header),
    Bound(ReportEntry),
    Search(SearchSummary),
    Ordering(OrderingFlag),
}

impl Report {
    /// One JSON object per line: a header, then bounds, searches and
    /// ordering flags.
    pub fn to_json_lines(&self) -> String {
        let header = ReportLine::Header(Header {
            schema: self.schema.clone(),
            command: self.command.clone(),
            label: self.label.clone(),
            input: self.input.clone(),
            settings: self.settings.clone(),
            skipped: self.skipped.clone(),
            n: self.result.n,
            exact_union: self.result.exact_union,
        });
        let lines = std::iter::once(header)
            .chain(self.result.entries.iter().cloned().map(ReportLine::Bound))
            .chain(self.result.searches.iter().cloned().map(ReportLine::Search))
            .chain(self.result.ordering.iter().cloned().map(ReportLine::Ordering));
        let mut out = String::new();
        for line in lines {
            out.push_str(&serde_json::to_string(&line).expect("reports serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(text: &str) -> CliResult<Self> {
        let mut header = None;
        let mut result = BoundReport::default();
        for (k, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let parsed: ReportLine = serde_json::from_str(line)
                .map_err(|e| CliError::invalid(format!("report line {}: {e}", k + 1)))?;
            match parsed {
                ReportLine::Header(h) => header = Some(h),
                ReportLine::Bound(e) => result.entries.push(e),
                ReportLine::Search(s) => result.searches.push(s),
                ReportLine::Ordering(f) => result.ordering.push(f),
            }
        }
        let h = header.ok_or_else(|| CliError::invalid("report has no header line"))?;
        result.n = h.n;
        result.exact_union = h.exact_union;
        Ok(Self {
            schema: h.schema,
            command: h.command,
            label: h.label,
            input: h.input,
            settings: h.settings,
            skipped: h.skipped,
            result,
            elapsed_ms: None,
        })
    }

    /// Human-readable layout: lower bounds descending, the exact union as a
    /// separator, upper bounds ascending, then search statistics.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let r = &self.result;
        let title = self.label.as_deref().unwrap_or(&self.input.path);
        let _ = writeln!(out, "{} ({}, n = {})", title, self.command, r.n);
        let mut lower: Vec<&ReportEntry> =
            r.entries.iter().filter(|e| e.kind == BoundKind::Lower).collect();
        let mut upper: Vec<&ReportEntry> =
            r.entries.iter().filter(|e| e.kind == BoundKind::Upper).collect();
        lower.sort_by(|a, b| b.value.total_cmp(&a.value));
        upper.sort_by(|a, b| a.value.total_cmp(&b.value));
        let width = r
            .entries
            .iter()
            .map(|e| e.name.len())
            .max()
            .unwrap_or(0)
            .max(11);
        let row = |out: &mut String, e: &ReportEntry| {
            let valid = match e.valid {
                Some(true) => "  ok",
                Some(false) => "  VIOLATED",
                None => "",
            };
            let _ = writeln!(out, "  {:<width$}  {:>12}{valid}", e.name, format_sig(e.value));
        };
        let _ = writeln!(out, "  {:<width$}  {:>12}", "bound", "value");
        for e in lower {
            row(&mut out, e);
        }
        match r.exact_union {
            Some(u) => {
                let _ = writeln!(out, "  {:<width$}  {:>12}", "exact union", format_sig(u));
            }
            None => {
                let _ = writeln!(out, "  {}", "-".repeat(width + 14));
            }
        }
        for e in upper {
            row(&mut out, e);
        }
        if !r.searches.is_empty() {
            let _ = writeln!(out, "\nsearches");
            for s in &r.searches {
                let best = s.best_value.map(format_sig).unwrap_or_else(|| "-".into());
                let _ = write!(
                    out,
                    "  {:<8} evaluations {:>6}  skipped {:>4}  best {}",
                    strategy_name(&s.strategy),
                    s.evaluations,
                    s.skipped,
                    best
                );
                if let Some(st) = &s.stats {
                    let ratio = st.mean_ratio.map(format_sig).unwrap_or_else(|| "-".into());
                    let _ = write!(
                        out,
                        "  lnew4>lnew3 {:.2}%  mean lnew4/lnew3 {ratio}",
                        st.lnew4_gt_lnew3_percent
                    );
                }
                out.push('\n');
            }
        }
        if !r.ordering.is_empty() {
            let _ = writeln!(out, "\nordering");
            for f in &r.ordering {
                let _ = writeln!(out, "  {:<36} {}", f.relation, if f.holds { "holds" } else { "FAILS" });
            }
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out, "\nskipped");
            for s in &self.skipped {
                let _ = writeln!(out, "  {s}");
            }
        }
        if let Some(ms) = self.elapsed_ms {
            let _ = writeln!(out, "\nelapsed {ms:.1} ms");
        }
        out
    }
}

fn strategy_name(s: &Strategy) -> String {
    s.label().to_string()
}

/// Six significant digits, switching to scientific notation for very large
/// or very small magnitudes.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        return format!("{v:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    JsonLines,
}

#[derive(Debug, Parser)]
#[command(name = "ub", version, about = "Bounds on the probability of a union of events")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate selected bounds at one weight vector.
    Compute {
        #[arg(long)]
        input: PathBuf,
        /// `all` or a comma list of dc,gk,kat,yat2,lnew3,lnew4,unew4,unew5,opt.
        #[arg(long, default_value = "all")]
        bounds: String,
        /// ones, gk, gk+ or file:PATH (a JSON array of weights).
        #[arg(long, default_value = "ones")]
        weights: String,
        #[arg(long, default_value_t = 1e-6)]
        eps_clip: f64,
        /// 0 selects exact subset selection.
        #[arg(long, default_value_t = 0.0)]
        fptas_eps: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every bound plus the GK, clipped-GK, kappa-line and random searches.
    Compare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-1:1:0.005", allow_hyphen_values = true)]
        kappa: String,
        #[arg(long, default_value_t = 1e-6)]
        eps_clip: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded random atoms-form problem file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// dirichlet or sparse:K.
        #[arg(long, default_value = "dirichlet")]
        model: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

const ALL_BOUNDS: [&str; 9] = ["dc", "gk", "kat", "yat2", "lnew3", "lnew4", "unew4", "unew5", "opt"];

fn parse_bounds(spec: &str) -> CliResult<(Vec<&'static str>, bool)> {
    if spec.trim() == "all" {
        return Ok((ALL_BOUNDS.to_vec(), true));
    }
    let mut chosen = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let name = ALL_BOUNDS
            .iter()
            .find(|&&b| b == part)
            .ok_or_else(|| CliError::invalid(format!("unknown bound {part:?} in --bounds")))?;
        if !chosen.contains(name) {
            chosen.push(*name);
        }
    }
    if chosen.is_empty() {
        return Err(CliError::invalid("--bounds selects nothing"));
    }
    Ok((chosen, false))
}

fn parse_model(spec: &str) -> CliResult<SpaceModel> {
    match spec.split_once(':') {
        None if spec == "dirichlet" => Ok(SpaceModel::Dirichlet),
        Some(("sparse", k)) => k
            .parse()
            .map(SpaceModel::Sparse)
            .map_err(|_| CliError::invalid(format!("bad sparse atom count {k:?}"))),
        _ => Err(CliError::invalid(format!(
            "unknown model {spec:?}, expected dirichlet or sparse:K"
        ))),
    }
}

/// Parses `lo:hi:step`.
pub fn parse_kappa(spec: &str) -> CliResult<(f64, f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::invalid(format!("--kappa expects lo:hi:step, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.trim().parse().map_err(|_| bad())?;
    }
    Ok((v[0], v[1], v[2]))
}

fn load_weights(spec: &str, info: &PartialInfo, eps_clip: f64) -> CliResult<WeightVector> {
    let w = match spec {
        "ones" => WeightVector::ones(info.n()),
        "gk" => gk_bound(info)?.1,
        "gk+" => gk_clipped(info, eps_clip)?,
        other => {
            let path = other.strip_prefix("file:").ok_or_else(|| {
                CliError::invalid(format!("unknown weights source {other:?}"))
            })?;
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::invalid(format!("cannot read weights {path}: {e}")))?;
            let c: Vec<f64> = serde_json::from_str(&text)
                .map_err(|e| CliError::invalid(format!("weights file {path}: {e}")))?;
            WeightVector::new(c)?
        }
    };
    if w.len() != info.n() {
        return Err(CliError::invalid(format!(
            "{} weights for {} events",
            w.len(),
            info.n()
        )));
    }
    Ok(w)
}

fn compute_report(
    problem: &Problem,
    bounds: &str,
    weights: &str,
    eps_clip: f64,
    fptas_eps: f64,
) -> CliResult<(BoundReport, Vec<String>)> {
    let (selected, lenient) = parse_bounds(bounds)?;
    let mode = if fptas_eps == 0.0 {
        Mode::Exact
    } else if fptas_eps > 0.0 && fptas_eps < 1.0 {
        Mode::Fptas { epsilon: fptas_eps }
    } else {
        return Err(CliError::invalid(format!("--fptas-eps must lie in [0, 1), got {fptas_eps}")));
    };
    let info = &problem.info;
    let w = load_weights(weights, info, eps_clip)?;
    let mut report = BoundReport::new(info.n());
    let mut skipped = Vec::new();
    for name in selected {
        let outcome: Result<Vec<ReportEntry>, Error> = (|| {
            Ok(match name {
                "dc" => vec![ReportEntry::from_bound(name, &dc_bound(info))],
                "gk" => vec![ReportEntry::from_bound(name, &gk_bound(info)?.0)],
                "kat" => vec![ReportEntry::from_bound(name, &kat_bound(info)?)],
                "yat2" => vec![ReportEntry::from_bound(name, &yat2_bound(info)?)],
                "lnew3" => vec![ReportEntry::from_bound(name, &lnew3(info, &w, mode)?)],
                "lnew4" => vec![ReportEntry::from_bound(name, &lnew4(info, &w, mode)?)],
                "unew4" => vec![ReportEntry::from_bound(name, &unew4(info, &w)?)],
                "unew5" => vec![ReportEntry::from_bound(name, &unew5(info, &w)?)],
                "opt" => {
                    if info.n() > INCLASS_MAX_EVENTS {
                        return Err(Error::TooManyEvents {
                            n: info.n(),
                            max: INCLASS_MAX_EVENTS,
                        });
                    }
                    let lo = optimal_inclass_bound(info, &w, BoundSense::Lower)?;
                    let hi = optimal_inclass_bound(info, &w, BoundSense::Upper)?;
                    let entry = |n: &str, value, kind| ReportEntry {
                        name: n.into(),
                        value,
                        kind,
                        weights: Some(w.c().to_vec()),
                        valid: None,
                        notes: vec!["linear program".into()],
                    };
                    vec![
                        entry("opt_lower", lo, BoundKind::Lower),
                        entry("opt_upper", hi, BoundKind::Upper),
                    ]
                }
                _ => unreachable!("selector names are checked"),
            })
        })();
        match outcome {
            Ok(entries) => entries.into_iter().for_each(|e| report.push(e)),
            // under `all`, bounds whose preconditions fail are listed, not fatal
            Err(e) if lenient && !e.is_inconsistency() => skipped.push(format!("{name}: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(space) = &problem.space {
        report.annotate(exact_union(space));
    }
    Ok((report, skipped))
}

fn echo(path: &Path, problem: &Problem) -> InputEcho {
    InputEcho {
        path: path.display().to_string(),
        form: if problem.space.is_some() { "atoms" } else { "partial" }.into(),
        n: problem.info.n(),
    }
}

fn emit(report: &mut Report, format: Format, out: Option<&Path>, started: Instant) -> CliResult<String> {
    let text = match format {
        Format::Table => {
            report.elapsed_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            report.to_table()
        }
        Format::JsonLines => report.to_json_lines(),
    };
    match out {
        Some(path) => {
            fs::write(path, &text)
                .map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Runs a parsed command and returns what should go to standard output.
pub fn execute(cli: Cli) -> CliResult<String> {
    let started = Instant::now();
    match cli.command {
        Command::Compute {
            input,
            bounds,
            weights,
            eps_clip,
            fptas_eps,
            format,
            out,
        } => {
            let problem = load_problem(&input)?;
            let (result, skipped) = compute_report(&problem, &bounds, &weights, eps_clip, fptas_eps)?;
            let mut report = Report {
                schema: REPORT_SCHEMA.into(),
                command: "compute".into(),
                label: problem.label.clone(),
                input: echo(&input, &problem),
                settings: Settings {
                    bounds: Some(bounds),
                    weights: Some(weights),
                    eps_clip: Some(eps_clip),
                    fptas_eps: Some(fptas_eps),
                    ..Settings::default()
                },
                skipped,
                result,
                elapsed_ms: None,
            };
            emit(&mut report, format, out.as_deref(), started)
        }
        Command::Compare {
            input,
            trials,
            seed,
            kappa,
            eps_clip,
            format,
            out,
        } => {
            let (lo, hi, step) = parse_kappa(&kappa)?;
            let problem = load_problem(&input)?;
            let configs = [
                SearchConfig::new(Strategy::GkExact, BoundFamily::Both)?,
                SearchConfig::new(Strategy::GkClipped { eps: eps_clip }, BoundFamily::Both)?,
                SearchConfig::new(Strategy::KappaLine { lo, hi, step }, BoundFamily::Lnew3)?,
                SearchConfig::new(
                    Strategy::RandomPositive {
                        trials: trials as usize,
                        seed,
                    },
                    BoundFamily::Both,
                )?,
            ];
            let result = compare_all(&problem.info, &configs, problem.space.as_ref())?;
            let mut report = Report {
                schema: REPORT_SCHEMA.into(),
                command: "compare".into(),
                label: problem.label.clone(),
                input: echo(&input, &problem),
                settings: Settings {
                    eps_clip: Some(eps_clip),
                    trials: Some(trials as usize),
                    seed: Some(seed),
                    kappa: Some(kappa),
                    ..Settings::default()
                },
                skipped: Vec::new(),
                result,
                elapsed_ms: None,
            };
            emit(&mut report, format, out.as_deref(), started)
        }
        Command::Gen { n, seed, model, out } => {
            let model = parse_model(&model)?;
            let space = generate_random_space(n, seed, model)?;
            let text = ProblemFile::from_space(&space, Some(format!("random n={n} seed={seed}"))).to_json();
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| {
                        CliError::invalid(format!("cannot write {}: {e}", path.display()))
                    })?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
    }
}

/// Entry point shared by the binary: parses arguments, runs, prints, and
/// returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("ub: {}", e.message);
            e.code
        }
    }
}
