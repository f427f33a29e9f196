//! `rslab` — command-line surface of the Reed-Solomon repair laboratory.
//!
//! Verbs: `code` (describe or dump constructions), `search` (exhaustive and
//! staged scheme searches), `profiles` (the four-point census and per-subset
//! optima), `tables` (bandwidth table rows under a compute budget),
//! `compile` (scheme file → binary lookup tables), `bench` (trace repair vs
//! the naive baseline), and `verify` (re-check scheme and table files).
//!
//! Configuration resolves flags first, then environment (`RSLAB_WORKERS`,
//! `RSLAB_CHECKPOINT_DIR`), then defaults; every run echoes its effective
//! config so results are reproducible from the log alone. Output files are
//! written to a temporary sibling and renamed into place.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rslab_core::codec::{self, BenchConfig, Erasure};
use rslab_core::galois::FieldId;
use rslab_core::grs::{self, GeneratorMatrix, GrsCode};
use rslab_core::scheme::{format_scheme_file, lift_canonical, parse_scheme_file, RepairScheme};
use rslab_core::search::{
    build_rank_profile_table, degree_four_search, exhaustive_search, optimal_profiles,
    published_best_bits, SearchConfig, SearchError, SearchResult,
};

#[derive(Parser)]
#[command(
    name = "rslab",
    version,
    about = "Laboratory for low-bandwidth repair of Reed-Solomon codes over GF(256)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe or dump a code construction.
    Code(CodeArgs),
    /// Search for repair schemes (exhaustive or staged degree-4).
    Search(SearchArgs),
    /// Four-point census and optimal bandwidth profiles per point set.
    Profiles(ProfilesArgs),
    /// Regenerate bandwidth table rows achievable under a compute budget.
    Tables(TablesArgs),
    /// Compile a scheme file into binary lookup tables.
    Compile(CompileArgs),
    /// Stream codewords through trace repair and the naive baseline.
    Bench(BenchArgs),
    /// Re-verify a scheme file, optionally against compiled tables.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CodeAction {
    Describe,
    Dump,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Classical,
    Cauchy,
    Backblaze,
    Genpoly,
    VandSystematic,
}

impl Construction {
    fn name(self) -> &'static str {
        match self {
            Construction::Classical => "classical",
            Construction::Cauchy => "cauchy",
            Construction::Backblaze => "backblaze",
            Construction::Genpoly => "genpoly",
            Construction::VandSystematic => "vand-systematic",
        }
    }
}

#[derive(Args)]
struct CodeArgs {
    /// What to do with the construction.
    action: CodeAction,
    /// Which construction to build.
    construction: Construction,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Also report whether the code is MDS.
    #[arg(long)]
    mds: bool,
    /// Check row-space equivalence against the classical code (backblaze).
    #[arg(long)]
    check_equiv: bool,
    /// Output file for `dump` (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchMode {
    Exhaustive,
    Deg4,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Isal,
    F16,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Isal => "isal",
            Family::F16 => "f16",
        }
    }

    fn code(self, n: usize, k: usize) -> Result<GrsCode, String> {
        match self {
            Family::Isal => grs::isal_code(n, k).map_err(|e| e.to_string()),
            Family::F16 => grs::f16_code(n, k).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    mode: SearchMode,
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    /// Stage-1 pair threshold in bits (deg4).
    #[arg(long)]
    theta2: Option<u32>,
    /// Stage-2 quadruple threshold in bits (deg4).
    #[arg(long)]
    theta4: Option<u32>,
    /// Worker threads (default: RSLAB_WORKERS, else the global pool).
    #[arg(long)]
    workers: Option<usize>,
    /// Checkpoint file (default under RSLAB_CHECKPOINT_DIR when set).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Require an existing checkpoint and resume from it.
    #[arg(long)]
    resume: bool,
    /// Stop once every position repairs within this many bits.
    #[arg(long)]
    target_bandwidth: Option<u32>,
    /// Stop after roughly this many candidate sets (exhaustive).
    #[arg(long)]
    candidate_cap: Option<u64>,
    /// Sets between periodic checkpoint writes.
    #[arg(long, default_value_t = 5_000_000)]
    checkpoint_interval: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the scheme files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ProfilesArgs {
    /// Point-set size (4 ..= 16).
    #[arg(long)]
    n: usize,
    /// CSV output path (default profiles-n<N>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TablesArgs {
    /// Redundancy of the table (2, 3, or 4).
    #[arg(long)]
    r: usize,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Cumulative search budget in seconds; rows past it are skipped.
    #[arg(long, default_value_t = 120)]
    budget_secs: u64,
    /// Do not early-stop searches at the recorded best values.
    #[arg(long)]
    no_target: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output path (default tables-r<R>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Scheme file holding one verified scheme per position.
    #[arg(long)]
    scheme: PathBuf,
    /// Output path for the binary tables.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Scheme file (defines the code and, absent --tables, the tables).
    #[arg(long)]
    scheme: PathBuf,
    /// Compiled table file; must match the scheme file.
    #[arg(long)]
    tables: Option<PathBuf>,
    #[arg(long)]
    codewords: u64,
    /// `random` or a fixed position index.
    #[arg(long, default_value = "random")]
    erasure: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallel throughput mode (timing is single-threaded by default).
    #[arg(long)]
    parallel: bool,
    /// Also write the CSV report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    scheme: PathBuf,
    /// Compiled tables to check against the scheme file.
    #[arg(long)]
    tables: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Code(args) => cmd_code(args),
        Command::Search(args) => cmd_search(args),
        Command::Profiles(args) => cmd_profiles(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Compile(args) => cmd_compile(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

/// Write `contents` to `path` via a sibling temporary file and a rename, so
/// a failed run never leaves a partially written output.
fn write_atomic(path: &Path, contents: &str) -> Result<(), String> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| format!("writing {}: {e}", tmp.display()))?;
    fs::rename(&tmp, path).map_err(|e| format!("renaming into {}: {e}", path.display()))?;
    Ok(())
}

/// Resolve the worker count: flag, then RSLAB_WORKERS, then the pool
/// default. Returns the count plus a provenance label for the config echo.
fn resolve_workers(flag: Option<usize>) -> Result<(usize, &'static str), String> {
    if let Some(w) = flag {
        return Ok((w, "flag"));
    }
    match std::env::var("RSLAB_WORKERS") {
        Ok(v) => {
            let w: usize = v
                .parse()
                .map_err(|_| format!("RSLAB_WORKERS must be an integer, got {v:?}"))?;
            Ok((w, "env"))
        }
        Err(_) => Ok((0, "default")),
    }
}

fn matrix_text(m: &grs::Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|e| e.value().to_string()).collect();
        let _ = writeln!(out, "  {}", row.join(" "));
    }
    out
}

fn classical_points(n: usize) -> Vec<rslab_core::Element> {
    (0..n).map(|v| FieldId::Gf256.elem(v as u8)).collect()
}

fn describe_grs(name: &str, code: &GrsCode) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", grs::format_descriptor(name, code));
    let dual = code.dual();
    let gamma: Vec<String> = dual.multipliers().iter().map(|e| e.value().to_string()).collect();
    let _ = writeln!(out, "dual: r={} gamma=[{}]", code.r(), gamma.join(","));
    let _ = writeln!(out, "generator ({}x{}):", code.k(), code.n());
    out.push_str(&matrix_text(code.generator().matrix()));
    out
}

fn describe_generator(label: &str, g: &GeneratorMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{label} generator ({}x{}):", g.k(), g.n());
    out.push_str(&matrix_text(g.matrix()));
    out
}

fn cmd_code(args: CodeArgs) -> Result<(), String> {
    let (n, k) = (args.n, args.k);
    println!(
        "config: code {} {} n={n} k={k} mds={} check-equiv={}",
        match args.action {
            CodeAction::Describe => "describe",
            CodeAction::Dump => "dump",
        },
        args.construction.name(),
        args.mds,
        args.check_equiv
    );

    let err = |e: grs::GrsError| e.to_string();
    let mut body = String::new();
    // The generator used for MDS checks and dumps.
    let generator: GeneratorMatrix = match args.construction {
        Construction::Classical => {
            let code = grs::classical_rs(FieldId::Gf256, classical_points(n), k).map_err(err)?;
            body.push_str(&describe_grs("classical", &code));
            code.generator()
        }
        Construction::Cauchy => {
            let sys = grs::cauchy_systematic(n, k).map_err(err)?;
            body.push_str(&describe_generator("cauchy systematic", &sys));
            let code = grs::cauchy_to_grs(n, k).map_err(err)?;
            body.push_str(&describe_grs("cauchy-grs", &code));
            sys
        }
        Construction::Backblaze => {
            let g = grs::backblaze_code(n, k).map_err(err)?;
            body.push_str(&describe_generator("backblaze", &g));
            g
        }
        Construction::Genpoly => {
            if k >= n {
                return Err(format!("need k < n, got n={n} k={k}"));
            }
            let code = grs::genpoly_code(n, n - k).map_err(err)?;
            body.push_str(&describe_grs("genpoly", &code));
            code.generator()
        }
        Construction::VandSystematic => {
            let g = grs::vandermonde_systematic(n, k).map_err(err)?;
            body.push_str(&describe_generator("vand-systematic", &g));
            g
        }
    };

    if args.check_equiv {
        let classical = grs::classical_rs(FieldId::Gf256, classical_points(n), k)
            .map_err(err)?
            .generator();
        let equal = generator.matrix().same_row_space(classical.matrix());
        let _ = writeln!(body, "equivalent to RS([0,{}],{k}): {equal}", n - 1);
    }
    if args.mds {
        let _ = writeln!(body, "mds: {}", grs::is_mds(&generator));
    }

    match (args.action, &args.out) {
        (CodeAction::Describe, _) => print!("{body}"),
        (CodeAction::Dump, Some(path)) => {
            write_atomic(path, &body)?;
            println!("wrote {}", path.display());
        }
        (CodeAction::Dump, None) => print!("{body}"),
    }
    Ok(())
}

/// Format the standard table row `n,default_bits,found_bits,reduction%`.
fn table_row(n: usize, k: usize, found_bits: u32) -> String {
    let default_bits = 8 * k as u32;
    let red = 100.0 * (1.0 - f64::from(found_bits) / f64::from(default_bits));
    format!("{n},{default_bits},{found_bits},{:.1}%", -red)
}

fn covered_schemes(result: &SearchResult) -> Vec<RepairScheme> {
    result.bests().iter().filter_map(|b| b.clone()).collect()
}

fn report_search(result: &SearchResult) {
    println!(
        "sets examined: {}, passing: {}, elapsed: {:.2}s, exhausted: {}, target met: {}",
        result.sets_examined(),
        result.sets_passing(),
        result.elapsed().as_secs_f64(),
        result.exhausted(),
        result.target_met()
    );
    match result.profile() {
        Some(profile) => println!(
            "bandwidth profile (bits): [{}], max {}",
            profile.0.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","),
            result.max_bits().expect("profile implies max")
        ),
        None => {
            let holes: Vec<String> = result
                .bests()
                .iter()
                .enumerate()
                .filter(|(_, b)| b.is_none())
                .map(|(j, _)| j.to_string())
                .collect();
            println!("positions without schemes yet: [{}]", holes.join(","));
        }
    }
}

fn cmd_search(args: SearchArgs) -> Result<(), String> {
    let (workers, workers_from) = resolve_workers(args.workers)?;
    let mode_name = match args.mode {
        SearchMode::Exhaustive => "exhaustive",
        SearchMode::Deg4 => "deg4",
    };
    let name = format!("{}-n{}-k{}-{}", args.family.name(), args.n, args.k, mode_name);

    // Checkpoints apply to the exhaustive walk only.
    let (checkpoint, checkpoint_from) = match (&args.checkpoint, args.mode) {
        (Some(p), SearchMode::Exhaustive) => (Some(p.clone()), "flag"),
        (Some(_), SearchMode::Deg4) => {
            eprintln!("warning: checkpoints apply to exhaustive mode only; ignoring");
            (None, "ignored")
        }
        (None, SearchMode::Exhaustive) => match std::env::var("RSLAB_CHECKPOINT_DIR") {
            Ok(dir) => (Some(PathBuf::from(dir).join(format!("{name}.ckpt"))), "env"),
            Err(_) => (None, "none"),
        },
        (None, SearchMode::Deg4) => (None, "none"),
    };
    println!(
        "config: search {mode_name} family={} n={} k={} theta2={:?} theta4={:?} \
         target-bandwidth={:?} candidate-cap={:?} workers={workers} ({workers_from}) \
         checkpoint={} ({checkpoint_from}) resume={} seed={} out-dir={}",
        args.family.name(),
        args.n,
        args.k,
        args.theta2,
        args.theta4,
        args.target_bandwidth,
        args.candidate_cap,
        checkpoint.as_deref().map_or_else(|| "-".into(), |p| p.display().to_string()),
        args.resume,
        args.seed,
        args.out_dir.display()
    );

    if let Some(path) = &checkpoint {
        if args.resume && !path.exists() {
            return Err(format!(
                "--resume requires an existing checkpoint at {}",
                path.display()
            ));
        }
        if !args.resume && path.exists() {
            fs::remove_file(path).map_err(|e| format!("removing stale checkpoint: {e}"))?;
            println!("removed stale checkpoint {} (pass --resume to continue it)", path.display());
        }
    } else if args.resume {
        return Err("--resume needs --checkpoint or RSLAB_CHECKPOINT_DIR".into());
    }

    let code = args.family.code(args.n, args.k)?;
    let mut cfg = SearchConfig::new(code, FieldId::Gf2);
    cfg.theta2_bits = args.theta2;
    cfg.theta4_bits = args.theta4;
    cfg.target_bits = args.target_bandwidth;
    cfg.candidate_cap = args.candidate_cap;
    cfg.workers = workers;
    cfg.checkpoint_path = checkpoint;
    cfg.checkpoint_interval = args.checkpoint_interval;
    cfg.seed = args.seed;

    let result = match args.mode {
        SearchMode::Exhaustive => exhaustive_search(&cfg),
        SearchMode::Deg4 => degree_four_search(&cfg),
    };
    let result = match result {
        Ok(r) => r,
        Err(SearchError::ThresholdsInfeasible { uncovered, partial }) => {
            report_search(&partial);
            return Err(format!(
                "thresholds leave positions {uncovered:?} uncovered; raise --theta2/--theta4"
            ));
        }
        Err(SearchError::InterruptedWithoutCheckpoint { partial }) => {
            report_search(&partial);
            return Err(
                "candidate cap reached with no checkpoint configured; \
                 pass --checkpoint to make the run resumable"
                    .into(),
            );
        }
        Err(e) => return Err(e.to_string()),
    };

    report_search(&result);
    if args.target_bandwidth.is_some() && !result.target_met() {
        eprintln!(
            "warning: target bandwidth not met{}",
            if result.exhausted() { " (space exhausted)" } else { " (run stopped early)" }
        );
    }

    let schemes = covered_schemes(&result);
    if schemes.is_empty() {
        return Err("no position has a scheme; nothing to write".into());
    }
    if schemes.len() < args.n {
        eprintln!(
            "warning: only {} of {} positions covered; writing the covered ones",
            schemes.len(),
            args.n
        );
    }

    fs::create_dir_all(&args.out_dir).map_err(|e| format!("creating out dir: {e}"))?;
    let scheme_path = args.out_dir.join(format!("{name}.scheme"));
    write_atomic(&scheme_path, &format_scheme_file(&name, &cfg.code, &schemes))?;
    println!("wrote {}", scheme_path.display());

    if let Some(max) = result.max_bits() {
        match args.family {
            Family::F16 => {
                println!("max bandwidth {max} (pre-lift, over {})", cfg.code.field().name());
                let lifted: Vec<RepairScheme> = schemes
                    .iter()
                    .map(|s| lift_canonical(s, FieldId::Gf256).map_err(|e| e.to_string()))
                    .collect::<Result<_, _>>()?;
                let lifted_name = format!("{name}-lifted");
                let lifted_path = args.out_dir.join(format!("{lifted_name}.scheme"));
                write_atomic(
                    &lifted_path,
                    &format_scheme_file(&lifted_name, lifted[0].code(), &lifted),
                )?;
                println!("wrote {}", lifted_path.display());
                let lifted_max =
                    lifted.iter().map(RepairScheme::bandwidth_bits).max().expect("nonempty");
                println!("max bandwidth {lifted_max} lifted to gf256");
                println!("table-row: {}", table_row(args.n, args.k, lifted_max));
            }
            Family::Isal => {
                println!("max bandwidth {max} over {}", cfg.code.field().name());
                println!("table-row: {}", table_row(args.n, args.k, max));
            }
        }
    }
    Ok(())
}

fn cmd_profiles(args: ProfilesArgs) -> Result<(), String> {
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("profiles-n{}.csv", args.n)));
    println!("config: profiles n={} out={}", args.n, out.display());

    let t0 = Instant::now();
    let table = build_rank_profile_table();
    println!(
        "census: {} candidate sets enumerated, {} retained, {} distinct profiles ({:.2}s)",
        table.total_enumerated,
        table.retained,
        table.distinct.len(),
        t0.elapsed().as_secs_f64()
    );

    let profiles = optimal_profiles(&table, args.n).map_err(|e| e.to_string())?;
    let mut csv = String::from("n,A,profile\n");
    let mut classes: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for (points, profile) in &profiles {
        let a: Vec<String> = points.iter().map(|p| p.to_string()).collect();
        let b: Vec<String> = profile.0.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(csv, "{},{},{}", args.n, a.join(";"), b.join(";"));
        let mut class = profile.0.clone();
        class.sort_unstable();
        *classes.entry(class).or_insert(0) += 1;
    }
    write_atomic(&out, &csv)?;
    println!("wrote {} ({} point sets)", out.display(), profiles.len());

    println!("profile classes (sorted profile: count):");
    for (class, count) in &classes {
        let c: Vec<String> = class.iter().map(|x| x.to_string()).collect();
        println!("  ({}): {count}", c.join(","));
    }
    Ok(())
}

fn cmd_tables(args: TablesArgs) -> Result<(), String> {
    if !(2..=4).contains(&args.r) {
        return Err(format!("--r must be 2, 3, or 4, got {}", args.r));
    }
    let (workers, workers_from) = resolve_workers(args.workers)?;
    let first_n = if args.r == 4 { 5 } else { 4 };
    let n_min = args.n_min.unwrap_or(first_n).max(args.r + 1);
    let n_max = args.n_max.unwrap_or(match args.r {
        2 => 8,
        3 => 6,
        _ => 16,
    });
    let out =
        args.out.clone().unwrap_or_else(|| PathBuf::from(format!("tables-r{}.csv", args.r)));
    println!(
        "config: tables r={} n={n_min}..={n_max} budget-secs={} no-target={} \
         workers={workers} ({workers_from}) out={}",
        args.r,
        args.budget_secs,
        args.no_target,
        out.display()
    );

    let clock = Instant::now();
    let mut csv = String::from("n,default_bits,heuristic_bits,reduction_pct\n");
    let mut rows = 0usize;
    for n in n_min..=n_max {
        if clock.elapsed().as_secs() > args.budget_secs {
            eprintln!("warning: budget exhausted; rows for n >= {n} skipped");
            break;
        }
        let k = n - args.r;
        let found_bits = if args.r == 4 {
            // Staged degree-4 search on the Cauchy-family code.
            let mut cfg = SearchConfig::new(grs::isal_code(n, k).map_err(|e| e.to_string())?, FieldId::Gf2);
            cfg.workers = workers;
            if !args.no_target {
                cfg.theta4_bits = published_best_bits(n, args.r, false);
            }
            match degree_four_search(&cfg) {
                Ok(r) => r.max_bits().expect("covered result has a profile"),
                Err(SearchError::ThresholdsInfeasible { uncovered, .. }) => {
                    eprintln!(
                        "warning: n={n}: thresholds leave {uncovered:?} uncovered; skipping row"
                    );
                    continue;
                }
                Err(e) => return Err(e.to_string()),
            }
        } else {
            // Exhaustive search over the 16-point family, lifted to bytes.
            let mut cfg = SearchConfig::new(grs::f16_code(n, k).map_err(|e| e.to_string())?, FieldId::Gf2);
            cfg.workers = workers;
            if !args.no_target {
                cfg.target_bits = published_best_bits(n, args.r, true).map(|b| b / 2);
            }
            let r = exhaustive_search(&cfg).map_err(|e| e.to_string())?;
            2 * r.max_bits().ok_or_else(|| format!("n={n}: search left positions uncovered"))?
        };
        let row = table_row(n, k, found_bits);
        println!("table-row: {row}");
        let _ = writeln!(csv, "{row}");
        rows += 1;
    }
    write_atomic(&out, &csv)?;
    println!("wrote {} ({rows} rows, {:.2}s)", out.display(), clock.elapsed().as_secs_f64());
    Ok(())
}

/// Parse a scheme file and arrange one verified scheme per position.
fn load_scheme_set(path: &Path) -> Result<(String, GrsCode, Vec<RepairScheme>), String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    let (name, code, schemes) = parse_scheme_file(&text).map_err(|e| e.to_string())?;
    let n = code.n();
    let mut per_target: Vec<Option<RepairScheme>> = vec![None; n];
    for s in schemes {
        let j = s.target();
        if per_target[j].is_some() {
            return Err(format!("scheme file has two schemes for position {j}"));
        }
        per_target[j] = Some(s);
    }
    let missing: Vec<String> = per_target
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_none())
        .map(|(j, _)| j.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(format!("scheme file covers no position(s) {}", missing.join(",")));
    }
    Ok((name, code, per_target.into_iter().map(|s| s.expect("checked")).collect()))
}

fn cmd_compile(args: CompileArgs) -> Result<(), String> {
    println!("config: compile scheme={} out={}", args.scheme.display(), args.out.display());
    let (name, code, schemes) = load_scheme_set(&args.scheme)?;
    let tables = codec::compile_tables(&schemes).map_err(|e| e.to_string())?;
    codec::write_tables(&args.out, &tables).map_err(|e| e.to_string())?;
    let bits: Vec<String> =
        (0..code.n()).map(|j| tables.repair_bits(j).to_string()).collect();
    println!(
        "compiled {name}: n={} k={} field={}, repair bits per position [{}]",
        code.n(),
        code.k(),
        code.field().name(),
        bits.join(",")
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), String> {
    let erasure = if args.erasure == "random" {
        Erasure::Random
    } else {
        let j: usize = args
            .erasure
            .parse()
            .map_err(|_| format!("--erasure must be `random` or an index, got {:?}", args.erasure))?;
        Erasure::Fixed(j)
    };
    println!(
        "config: bench scheme={} tables={} codewords={} erasure={} seed={} parallel={} out={}",
        args.scheme.display(),
        args.tables.as_deref().map_or_else(|| "(compile in-process)".into(), |p| p.display().to_string()),
        args.codewords,
        args.erasure,
        args.seed,
        args.parallel,
        args.out.as_deref().map_or_else(|| "-".into(), |p| p.display().to_string())
    );

    let (_, code, schemes) = load_scheme_set(&args.scheme)?;
    let compiled = codec::compile_tables(&schemes).map_err(|e| e.to_string())?;
    let tables = match &args.tables {
        Some(path) => {
            let loaded = codec::read_tables(path).map_err(|e| e.to_string())?;
            if loaded != compiled {
                return Err(format!(
                    "{} does not match the tables compiled from {}",
                    path.display(),
                    args.scheme.display()
                ));
            }
            loaded
        }
        None => compiled,
    };

    let mut cfg = BenchConfig::new(args.codewords, erasure);
    cfg.seed = args.seed;
    cfg.parallel = args.parallel;
    let report = codec::bench(&code, &tables, &cfg).map_err(|e| e.to_string())?;
    let csv = report.to_csv();
    print!("{csv}");
    if let Some(path) = &args.out {
        write_atomic(path, &csv)?;
        println!("wrote {}", path.display());
    }
    if let (Some(trace), Some(naive)) =
        (report.row("trace", "total"), report.row("naive", "total"))
    {
        println!(
            "total time ratio trace/naive: {:.2}",
            trace.seconds / naive.seconds.max(f64::MIN_POSITIVE)
        );
        let red = 100.0
            * (1.0 - trace.bits_transferred as f64 / naive.bits_transferred.max(1) as f64);
        println!("transfer reduction: {red:.1}%");
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), String> {
    println!(
        "config: verify scheme={} tables={}",
        args.scheme.display(),
        args.tables.as_deref().map_or_else(|| "-".into(), |p| p.display().to_string())
    );
    // Parsing re-runs the full-rank check and the bandwidth accounting.
    let (name, code, schemes) = load_scheme_set(&args.scheme)?;
    for s in &schemes {
        println!(
            "target {}: base {}, bandwidth {} bits, profile [{}]",
            s.target(),
            s.base().name(),
            s.bandwidth_bits(),
            s.profile().0.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
        );
    }
    println!("scheme file OK: {name} ({} positions of n={})", schemes.len(), code.n());

    if let Some(path) = &args.tables {
        let loaded = codec::read_tables(path).map_err(|e| e.to_string())?;
        let compiled = codec::compile_tables(&schemes).map_err(|e| e.to_string())?;
        if loaded != compiled {
            return Err(format!(
                "{} does not match tables recompiled from {}",
                path.display(),
                args.scheme.display()
            ));
        }
        println!("tables file OK: byte-identical to a fresh compile");
    }
    Ok(())
}
