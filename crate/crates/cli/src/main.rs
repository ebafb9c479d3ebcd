//! `semiosis`: validate sign-system files, check morphisms and laws, run
//! life-cycle simulations and analyse their traces.
//!
//! Exit codes: 0 success, 1 a checked property fails, 2 parse or validation
//! error, 3 internal or output failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::json;
use semiosis_core::dsl::{load_file, Block, BlockList, Diagnostic};
use semiosis_core::morphism::validate_morphism;
use semiosis_core::semiosis::check_laws;
use semiosis_core::sim::{
    cluster_agents, interaction_trend, parse_jsonl, run, write_jsonl, write_summary_csv, Scenario,
    SimTrace, Verdict, DEFAULT_TAU, DEFAULT_WINDOW,
};

#[derive(Parser)]
#[command(name = "semiosis", version, about)]
struct Cli {
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and check files; silent and 0 when clean.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Check one morphism's preservation conditions.
    MorphCheck {
        file: PathBuf,
        #[arg(long)]
        morphism: String,
    },
    /// Check both laws on a sequence.
    Laws {
        file: PathBuf,
        sequence: String,
        /// Configuration to start the first stage from, instead of the
        /// component's own source.
        #[arg(long)]
        config: Option<String>,
    },
    /// Run a scenario and write its trace as JSON Lines.
    Simulate {
        file: PathBuf,
        /// Needed when the file holds more than one scenario.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = 256)]
        horizon: u64,
        /// Trace destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-product CSV summary.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Smoothing window for the summary trends.
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
    },
    /// Fit the interaction trend of one product; 0 iff decreasing.
    Trend {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        product: String,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
    },
    /// Leader-cluster the products of a trace by their mean event rates.
    Clusters {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
    },
}

/// Like `println!`, but a closed stdout (say, piped into `head`) is not an
/// error worth a panic.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout(), $($arg)*);
    }};
}

const PROPERTY_FAILS: u8 = 1;
const INVALID: u8 = 2;
const INTERNAL: u8 = 3;

/// Early exit carrying the code; the message is already on stderr.
struct Exit(u8);

fn fail(code: u8, msg: impl std::fmt::Display) -> Exit {
    eprintln!("error: {msg}");
    Exit(code)
}

fn show(d: &Diagnostic) {
    eprintln!("{d}");
}

/// Loads a file; errors are fatal, warnings are only reported.
fn load(path: &Path) -> Result<Vec<Block>, Exit> {
    let (blocks, diags) = load_file(path);
    diags.iter().for_each(show);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(Exit(INVALID));
    }
    Ok(blocks)
}

fn read_trace(path: &Path) -> Result<SimTrace, Exit> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(INVALID, format_args!("cannot read `{}`: {e}", path.display())))?;
    parse_jsonl(&text).map_err(|e| fail(INVALID, format_args!("{}: {}[{}]", path.display(), e, e.code())))
}

fn print_json(v: &serde_json::Value) {
    out!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialise"));
}

fn validate(cli: &Cli, files: &[PathBuf]) -> Result<u8, Exit> {
    let mut all = Vec::new();
    for f in files {
        let (_, diags) = load_file(f);
        diags.iter().for_each(show);
        all.extend(diags);
    }
    if cli.json {
        print_json(&json!({ "diagnostics": all }));
    }
    Ok(if all.is_empty() { 0 } else { INVALID })
}

fn morph_check(cli: &Cli, file: &Path, name: &str) -> Result<u8, Exit> {
    let blocks = load(file)?;
    let m = blocks
        .morphism(name)
        .ok_or_else(|| fail(INVALID, format_args!("no morphism `{name}` in {}", file.display())))?;
    let r = validate_morphism(m);
    if cli.json {
        let diags: Vec<_> = r
            .diagnostics
            .iter()
            .map(|d| json!({ "code": d.code.as_str(), "message": d.message }))
            .collect();
        print_json(&json!({
            "morphism": m.name(),
            "source": m.source().name(),
            "target": m.target().name(),
            "valid": r.valid,
            "is_isomorphism": r.is_isomorphism,
            "is_level_preserving": r.is_level_preserving,
            "diagnostics": diags,
        }));
    } else {
        let yn = |b: bool| if b { "yes" } else { "no" };
        out!("morphism {}: {} -> {}", m.name(), m.source().name(), m.target().name());
        out!("valid: {}", yn(r.valid));
        for d in &r.diagnostics {
            out!("  {}: {}", d.code, d.message);
        }
        out!("isomorphism: {}", yn(r.is_isomorphism));
        out!("level-preserving: {}", yn(r.is_level_preserving));
    }
    Ok(if r.valid { 0 } else { PROPERTY_FAILS })
}

fn laws(cli: &Cli, file: &Path, name: &str, config: Option<&str>) -> Result<u8, Exit> {
    let blocks = load(file)?;
    let seq = blocks
        .sequence(name)
        .ok_or_else(|| fail(INVALID, format_args!("no sequence `{name}` in {}", file.display())))?;
    let mut designated = seq.designated_configs();
    if let Some(c) = config {
        let cfg = blocks
            .config(c)
            .ok_or_else(|| fail(INVALID, format_args!("no config `{c}` in {}", file.display())))?;
        match designated.first_mut() {
            Some(first) if **first.system() == **cfg.system() => *first = (**cfg).clone(),
            _ => {
                return Err(fail(
                    INVALID,
                    format_args!("config `{c}` is not over the first stage's system"),
                ))
            }
        }
    }
    let report = check_laws(seq, &designated).map_err(|e| fail(INVALID, format_args!("{e} [{}]", e.code())))?;
    let holds = report.law1_holds && report.all_natural();
    if cli.json {
        print_json(&json!({ "sequence": seq.name(), "report": report, "holds": holds }));
    } else {
        out!("sequence {}: {} component(s)", seq.name(), seq.len());
        out!("law I: {}", if report.law1_holds { "holds" } else { "fails" });
        match report.well_defined_witness {
            Some(n) => out!("  well-defined component: {n}"),
            None => out!("  well-defined component: none"),
        }
        match report.level_break_witness {
            Some((n, k)) => out!("  level-breaking branch: component {n}, branch {k}"),
            None => out!("  level-breaking branch: none"),
        }
        out!("law II: {}", if report.all_natural() { "holds" } else { "fails" });
        for v in &report.law2_verdicts {
            out!(
                "  component {} branch {}: epsilon {} -> {} {}",
                v.component,
                v.branch,
                v.epsilon_before,
                v.epsilon_after,
                if v.natural { "natural" } else { "not natural" }
            );
        }
    }
    Ok(if holds { 0 } else { PROPERTY_FAILS })
}

fn pick_scenario(blocks: &[Block], file: &Path, name: Option<&str>) -> Result<Arc<Scenario>, Exit> {
    if let Some(n) = name {
        return blocks
            .scenario(n)
            .cloned()
            .ok_or_else(|| fail(INVALID, format_args!("no scenario `{n}` in {}", file.display())));
    }
    match blocks.scenarios().as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(fail(INVALID, format_args!("no scenario in {}", file.display()))),
        _ => Err(fail(INVALID, "several scenarios; choose one with --scenario")),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Exit> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| fail(INTERNAL, format_args!("cannot create `{}`: {e}", path.display())))
}

fn io_fail(path: &str, e: impl std::fmt::Display) -> Exit {
    fail(INTERNAL, format_args!("writing {path}: {e}"))
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    cli: &Cli,
    file: &Path,
    scenario: Option<&str>,
    horizon: u64,
    out: Option<&Path>,
    summary: Option<&Path>,
    window: usize,
) -> Result<u8, Exit> {
    let blocks = load(file)?;
    let s = pick_scenario(&blocks, file, scenario)?;
    let trace = run(&s, horizon, cli.seed).map_err(|e| fail(INVALID, format_args!("{e} [{}]", e.code())))?;
    match out {
        Some(p) => {
            let mut w = create(p)?;
            write_jsonl(&trace, &mut w)
                .and_then(|_| w.flush())
                .map_err(|e| io_fail(&p.display().to_string(), e))?;
        }
        None => {
            let mut w = io::stdout().lock();
            write_jsonl(&trace, &mut w).map_err(|e| io_fail("stdout", e))?;
        }
    }
    if let Some(p) = summary {
        let w = create(p)?;
        write_summary_csv(&trace, window, w).map_err(|e| io_fail(&p.display().to_string(), e))?;
    }
    if out.is_some() {
        let n = trace.events.len() + trace.violations.len() + trace.cluster_history.len();
        if cli.json {
            print_json(&json!({
                "scenario": s.name,
                "seed": cli.seed,
                "horizon": horizon,
                "records": n,
                "final_epsilon": trace.epsilon_series.iter()
                    .map(|(p, e)| (p.clone(), e.last().copied()))
                    .collect::<std::collections::BTreeMap<_, _>>(),
            }));
        } else {
            out!("scenario {}: {horizon} tick(s), seed {}, {n} record(s)", s.name, cli.seed);
        }
    }
    Ok(0)
}

fn trend(cli: &Cli, path: &Path, product: &str, window: usize) -> Result<u8, Exit> {
    let trace = read_trace(path)?;
    let t = interaction_trend(&trace, product, window)
        .map_err(|e| fail(INVALID, format_args!("{e} [{}]", e.code())))?;
    if cli.json {
        print_json(&json!({ "product": product, "window": window, "slope": t.slope, "verdict": t.verdict }));
    } else {
        out!("{product}: slope {:.6} per tick, {}", t.slope, t.verdict.as_str());
    }
    Ok(if t.verdict == Verdict::Successful { 0 } else { PROPERTY_FAILS })
}

fn clusters(cli: &Cli, path: &Path, tau: f64) -> Result<u8, Exit> {
    let trace = read_trace(path)?;
    let agents: Vec<(String, Vec<f64>)> = trace
        .mean_rates()
        .into_iter()
        .map(|(p, rates)| (p, rates.into_values().collect()))
        .collect();
    let c = cluster_agents(&agents, tau).map_err(|e| fail(INVALID, format_args!("{e} [{}]", e.code())))?;
    if cli.json {
        print_json(&json!({ "tau": tau, "count": c.len(), "clustering": c }));
    } else {
        out!("{} cluster(s) at tau {tau}", c.len());
        for (p, k) in &c.assignments {
            out!("{p} {k}");
        }
    }
    Ok(0)
}

fn dispatch(cli: &Cli) -> Result<u8, Exit> {
    match &cli.cmd {
        Cmd::Validate { files } => validate(cli, files),
        Cmd::MorphCheck { file, morphism } => morph_check(cli, file, morphism),
        Cmd::Laws { file, sequence, config } => laws(cli, file, sequence, config.as_deref()),
        Cmd::Simulate {
            file,
            scenario,
            horizon,
            out,
            summary,
            window,
        } => simulate(
            cli,
            file,
            scenario.as_deref(),
            *horizon,
            out.as_deref(),
            summary.as_deref(),
            *window,
        ),
        Cmd::Trend { trace, product, window } => trend(cli, trace, product, *window),
        Cmd::Clusters { trace, tau } => clusters(cli, trace, *tau),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Anything unexpected is an internal error, never a silent success.
    match std::panic::catch_unwind(|| dispatch(&cli)) {
        Ok(Ok(code)) | Ok(Err(Exit(code))) => ExitCode::from(code),
        Err(_) => ExitCode::from(INTERNAL),
    }
}
