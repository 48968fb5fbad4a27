//! `dualgame` — drive the duality-game numerics from the command line.
//!
//! Subcommands: `region` (boundary traces + sampled points as CSV/JSON),
//! `bound-check` (random-configuration bound sweep), `symmetric`
//! (constant-overlap family sweep), `game` (seeded Monte Carlo play),
//! `verify` (invariant suites).
//!
//! Exit codes: 0 success; 1 invariant-suite failure; 2 I/O, parse, or
//! invalid-configuration error; 3 bound violation; 4 statistical
//! inconsistency. Violating a proven bound is a hard failure by design —
//! it means the artifact, not the theorem, is wrong.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dualgame_core::duality::{
    region_rows, sample_config, soundness_sweep, symmetric_rows, theorem1_bound, union_excess,
    DualityPoint, PointSource,
};
use dualgame_core::game::{cheat_unrestricted, run_combined, GameConfig, GameStats};
use dualgame_core::interferometer::canonical_phases;
use dualgame_core::serial::{
    game_stats_json, game_stats_text, region_csv, symmetric_csv, GameConfigRecord,
};
use dualgame_core::verify::run_all;
use dualgame_core::{Error, Result};

/// Tolerance for sweep-level bound checks (exit code 3 beyond this).
const BOUND_TOL: f64 = 1e-8;
/// Tolerance for the attainment identity at the optimal overlap.
const ATTAIN_TOL: f64 = 1e-9;

const EXIT_SUITE_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BOUND_VIOLATION: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "dualgame",
    version,
    about = "Wave-particle duality games on an n-port interferometer: \
             regions, bounds, discrimination solvers, Monte Carlo play"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Emit region data: boundary traces (ellipse/circle arc, triangle
    /// hypotenuse) plus sampled random configuration points
    Region(RegionArgs),
    /// Sample random configurations and check the trade-off bound and
    /// region membership; exit 3 on any violation
    BoundCheck(BoundCheckArgs),
    /// Sweep the maximally-coherent constant-overlap family over the
    /// overlap and emit its boundary trace
    Symmetric(SymmetricArgs),
    /// Play the combined ways/phases game and report statistics
    Game(GameArgs),
    /// Run the invariant suites and report each check
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RegionArgs {
    /// Number of interferometer arms
    #[arg(long)]
    n: usize,
    /// Boundary parameter resolution
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Number of random configuration points
    #[arg(long, default_value_t = 200)]
    samples: u64,
    /// RNG seed (falls back to DUALITY_SEED, then a fixed default)
    #[arg(long, env = "DUALITY_SEED", default_value_t = 7)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct BoundCheckArgs {
    /// Number of interferometer arms
    #[arg(long)]
    n: usize,
    /// Number of random configurations to sample
    #[arg(long, default_value_t = 10_000)]
    count: u64,
    /// RNG seed (falls back to DUALITY_SEED, then a fixed default)
    #[arg(long, env = "DUALITY_SEED", default_value_t = 7)]
    seed: u64,
    /// Output file for the report (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Self-test hook: corrupt the computed bound values by +0.1 to prove
    /// violations are detected and exit 3
    #[arg(long, hide = true)]
    corrupt_lhs: bool,
}

#[derive(Args)]
struct SymmetricArgs {
    /// Number of interferometer arms
    #[arg(long)]
    n: usize,
    /// Number of overlap grid points
    #[arg(long, default_value_t = 101)]
    grid: usize,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GameArgs {
    /// Configuration file (flat key/value record, schema 1)
    #[arg(long, conflicts_with = "n")]
    config: Option<PathBuf>,
    /// Build the boundary-attaining configuration for this n instead of
    /// reading a file
    #[arg(long)]
    n: Option<usize>,
    /// Number of rounds (overrides the configuration file)
    #[arg(long)]
    trials: Option<u64>,
    /// RNG seed (overrides the configuration file; falls back to
    /// DUALITY_SEED, then a fixed default)
    #[arg(long, env = "DUALITY_SEED")]
    seed: Option<u64>,
    /// Play the unrestricted-Bob cheating protocol instead of the honest
    /// game
    #[arg(long)]
    cheat: bool,
    /// Output file for the statistics record (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv emits the flat key/value record, json a JSON object
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// RNG seed for the randomized checks
    #[arg(long, env = "DUALITY_SEED", default_value_t = 7)]
    seed: u64,
    /// Run a single suite (numerics, interferometer, discrimination,
    /// duality, game)
    #[arg(long)]
    only: Option<String>,
    /// Also parse and validate this configuration file as part of the run
    #[arg(long)]
    config: Option<PathBuf>,
    /// csv emits one line per check, json a JSON array
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Single writer for all file/stdout output.
fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(Error::from),
    }
}

fn cmd_region(args: &RegionArgs) -> Result<u8> {
    let rows = region_rows(args.n, args.grid, args.samples, args.seed)?;
    let text = match args.format {
        Format::Csv => region_csv(&rows),
        Format::Json => {
            let mut t = serde_json::to_string_pretty(&rows).map_err(|e| Error::Parse {
                detail: format!("region encode: {e}"),
            })?;
            t.push('\n');
            t
        }
    };
    write_output(args.out.as_deref(), &text)?;
    // Boundary rows are traces; the sampled configuration points must lie
    // inside the physical region.
    let boundary_len = rows.len() - args.samples as usize;
    for (i, row) in rows.iter().enumerate().skip(boundary_len) {
        let point = DualityPoint::new(row.x, row.y, args.n, PointSource::Coherence)?;
        let excess = union_excess(&point);
        if excess > BOUND_TOL {
            eprintln!(
                "sampled point {} at ({}, {}) lies outside the region by {excess:.3e}",
                i - boundary_len,
                row.x,
                row.y
            );
            return Ok(EXIT_BOUND_VIOLATION);
        }
    }
    Ok(0)
}

fn offender_record(n: usize, seed: u64, index: u64) -> Result<String> {
    let (rho, s) = sample_config(n, seed, index);
    let cfg = GameConfig::new(rho, s, canonical_phases(n)?, 1, seed, 0.5)?;
    GameConfigRecord::from_config(&cfg).to_toml()
}

fn cmd_bound_check(args: &BoundCheckArgs) -> Result<u8> {
    if args.count == 0 {
        return Err(Error::OutOfRange {
            name: "count",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    let report = soundness_sweep(args.n, args.count, args.seed, false)?;
    let corruption = if args.corrupt_lhs { 0.1 } else { 0.0 };
    let max_lhs = report.max_lemma_lhs + corruption;
    let max_excess = report.max_excess + corruption;
    let text = format!(
        "n = {}\nconfigs = {}\nseed = {}\nmax_lemma_lhs = {:e}\nmax_region_excess = {:e}\n",
        report.n, report.configs, report.seed, max_lhs, max_excess,
    );
    write_output(args.out.as_deref(), &text)?;
    if max_lhs > BOUND_TOL || max_excess > BOUND_TOL {
        eprintln!(
            "bound violated (max LHS {max_lhs:.3e}, max excess {max_excess:.3e}); \
             offending configuration {}:",
            report.worst_index
        );
        eprintln!("{}", offender_record(args.n, args.seed, report.worst_index)?);
        return Ok(EXIT_BOUND_VIOLATION);
    }
    Ok(0)
}

fn cmd_symmetric(args: &SymmetricArgs) -> Result<u8> {
    let rows = symmetric_rows(args.n, args.grid)?;
    let text = match args.format {
        Format::Csv => symmetric_csv(&rows),
        Format::Json => {
            let mut t = serde_json::to_string_pretty(&rows).map_err(|e| Error::Parse {
                detail: format!("sweep encode: {e}"),
            })?;
            t.push('\n');
            t
        }
    };
    write_output(args.out.as_deref(), &text)?;
    for row in &rows {
        if row.lemma1_lhs.abs() > BOUND_TOL {
            eprintln!(
                "attainment family misses the bound at s = {}: residual {:.3e}",
                row.s, row.lemma1_lhs
            );
            return Ok(EXIT_BOUND_VIOLATION);
        }
    }
    // The inserted row at the optimal overlap must hit the ceiling: the
    // fair-coin win probability (P_d + X + 1/n)/2 equals 1/2 + 1/(2√n).
    let bound = theorem1_bound(args.n)?;
    let star = dualgame_core::duality::optimal_overlap(args.n)?;
    let star_row = rows
        .iter()
        .min_by(|a, b| {
            (a.s - star)
                .abs()
                .partial_cmp(&(b.s - star).abs())
                .expect("finite overlaps")
        })
        .expect("non-empty sweep");
    let p_win = 0.5 * star_row.p_d + 0.5 * (star_row.x_coh + 1.0 / args.n as f64);
    eprintln!(
        "optimal overlap {:.12}: P_win = {:.12} (ceiling {:.12})",
        star_row.s, p_win, bound
    );
    if (p_win - bound).abs() > ATTAIN_TOL {
        eprintln!("attainment identity violated by {:.3e}", (p_win - bound).abs());
        return Ok(EXIT_BOUND_VIOLATION);
    }
    Ok(0)
}

fn load_game_config(args: &GameArgs) -> Result<GameConfig> {
    let mut cfg = match (&args.config, args.n) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)?;
            GameConfigRecord::from_toml(&text)?.to_config()?
        }
        (None, Some(n)) => GameConfig::theorem1(
            n,
            args.trials.unwrap_or(100_000),
            args.seed.unwrap_or(7),
        )?,
        _ => {
            return Err(Error::UnsupportedInput {
                detail: "exactly one of --config or --n is required".into(),
            })
        }
    };
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if cfg.trials == 0 {
        return Err(Error::OutOfRange {
            name: "trials",
            value: 0.0,
            lo: 1.0,
            hi: f64::INFINITY,
        });
    }
    Ok(cfg)
}

fn cmd_game(args: &GameArgs) -> Result<u8> {
    let cfg = load_game_config(args)?;
    let stats: GameStats = if args.cheat {
        cheat_unrestricted(&cfg)?
    } else {
        run_combined(&cfg)?
    };
    let text = match args.format {
        Format::Csv => game_stats_text(&stats),
        Format::Json => {
            let mut t = game_stats_json(&stats)?;
            t.push('\n');
            t
        }
    };
    write_output(args.out.as_deref(), &text)?;
    if !stats.consistent() {
        eprintln!(
            "empirical win rate {:.6} deviates from analytic {:.6} by more than 4 stderr ({:.2e})",
            stats.empirical_pwin,
            stats.analytic_pwin,
            4.0 * stats.stderr
        );
        return Ok(EXIT_INCONSISTENT);
    }
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        let cfg = GameConfigRecord::from_toml(&text)?.to_config()?;
        eprintln!(
            "configuration file valid: n = {}, trials = {}, seed = {}",
            cfg.n, cfg.trials, cfg.seed
        );
    }
    let results = run_all(args.seed, args.only.as_deref())?;
    match args.format {
        Format::Csv => {
            let mut text = String::new();
            for r in &results {
                text.push_str(&format!(
                    "{} [{}] {} — {}\n",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.suite,
                    r.name,
                    r.detail
                ));
            }
            write_output(None, &text)?;
        }
        Format::Json => {
            let mut t = serde_json::to_string_pretty(&results).map_err(|e| Error::Parse {
                detail: format!("results encode: {e}"),
            })?;
            t.push('\n');
            write_output(None, &t)?;
        }
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", results.len());
        return Ok(EXIT_SUITE_FAILURE);
    }
    eprintln!("all {} checks passed", results.len());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Region(args) => cmd_region(args),
        Command::BoundCheck(args) => cmd_bound_check(args),
        Command::Symmetric(args) => cmd_symmetric(args),
        Command::Game(args) => cmd_game(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
