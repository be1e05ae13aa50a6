//! Command implementations behind the `cyclespec` binary: generate,
//! spectrum, oracle, verify, bench.
//!
//! Exit codes: 0 ok, 2 input error, 3 verification failure, 4 resource cap.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::engine::{full_spectrum, EngineConfig};
use crate::error::Error;
use crate::graph::{load_instance, HamGraph};
use crate::report::{verify_report, write_lengths_csv, write_report};
use crate::testbed::{gen_instance, oracle_cycle_spectrum, GenSpec, OracleLimits};

#[derive(Parser, Debug)]
#[command(name = "cyclespec", about = "Cycle-spectrum toolkit for Hamiltonian graphs", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated instance to a file.
    Generate(GenerateArgs),
    /// Run the spectrum engine and write a witness report (and optional CSV).
    Spectrum(SpectrumArgs),
    /// Print the exact cycle spectrum via exhaustive search.
    Oracle(OracleArgs),
    /// Re-realize every witness of a report against its instance.
    Verify(VerifyArgs),
    /// Sweep (family, n, seed) combinations and write a CSV of results.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Instance family: chain | mindeg3 | regular.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub n: u32,
    /// Regularity / block parameter (chain, regular).
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    /// Extra chords beyond the degree floor (mindeg3).
    #[arg(long, default_value_t = 0)]
    pub extra: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// key=value engine configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub report: PathBuf,
    /// Optional lengths-only CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Caps as `max_vertices,max_steps,time_budget_ms`.
    #[arg(long)]
    pub limits: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Instance family: mindeg3 | regular.
    #[arg(long, default_value = "regular")]
    pub family: String,
    /// Comma-separated vertex counts.
    #[arg(long = "n-list")]
    pub n_list: String,
    /// Comma-separated seeds.
    #[arg(long)]
    pub seeds: String,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub extra: u32,
    #[arg(long)]
    pub csv: PathBuf,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Machine-parsable failure: one line on stderr plus a process exit code.
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

pub type CliResult = std::result::Result<(), CliFailure>;

fn fail(code: i32, message: impl Into<String>) -> CliFailure {
    CliFailure { code, message: message.into() }
}

fn input_err(e: Error) -> CliFailure {
    match e {
        Error::CapExceeded(_) => fail(4, format!("error: {e}")),
        _ => fail(2, format!("error: {e}")),
    }
}

fn read_file(path: &Path) -> std::result::Result<String, CliFailure> {
    std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("error: cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> CliResult {
    std::fs::write(path, content)
        .map_err(|e| fail(2, format!("error: cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> std::result::Result<HamGraph, CliFailure> {
    load_instance(&read_file(path)?).map_err(input_err)
}

fn load_config(path: &Option<PathBuf>) -> std::result::Result<EngineConfig, CliFailure> {
    match path {
        None => Ok(EngineConfig::default()),
        Some(p) => EngineConfig::parse(&read_file(p)?).map_err(input_err),
    }
}

fn parse_family(args_family: &str, n: u32, k: u32, extra: u32, seed: u64) -> std::result::Result<GenSpec, CliFailure> {
    match args_family {
        "chain" => Ok(GenSpec::ChainExtremal { n, k }),
        "mindeg3" => Ok(GenSpec::RandomMinDeg3 { n, extra_chords: extra, seed }),
        "regular" => Ok(GenSpec::RandomRegularHam { n, k, seed }),
        other => Err(fail(2, format!("error: unknown family '{other}'"))),
    }
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate(a) => {
            let spec = parse_family(&a.family, a.n, a.k, a.extra, a.seed)?;
            let g = gen_instance(spec).map_err(input_err)?;
            write_file(&a.out, &g.serialize())?;
            println!("wrote {} (n={}, chords={})", a.out.display(), g.n(), g.chord_count());
            Ok(())
        }
        Command::Spectrum(a) => {
            if a.input == a.report {
                return Err(fail(2, "error: --in and --report must differ"));
            }
            let g = load_graph(&a.input)?;
            let cfg = load_config(&a.config)?;
            let rep = full_spectrum(&g, &cfg).map_err(input_err)?;
            write_file(&a.report, &write_report(&rep, &g))?;
            if let Some(csv) = &a.csv {
                write_file(csv, &write_lengths_csv(&rep))?;
            }
            println!(
                "spectrum size {} (n={}, blocks {}/{})",
                rep.lengths.len(),
                g.n(),
                rep.stats.blocks_selected,
                rep.stats.blocks
            );
            Ok(())
        }
        Command::Oracle(a) => {
            let g = load_graph(&a.input)?;
            let lim = parse_limits(&a.limits)?;
            let spectrum = oracle_cycle_spectrum(&g, &lim).map_err(input_err)?;
            let words: Vec<String> = spectrum.iter().map(|l| l.to_string()).collect();
            println!("{}", words.join(" "));
            Ok(())
        }
        Command::Verify(a) => {
            let g = load_graph(&a.input)?;
            let text = read_file(&a.report)?;
            match verify_report(&g, &text) {
                Ok(count) => {
                    println!("verified {count} witnesses");
                    Ok(())
                }
                Err(e @ (Error::Parse { .. } | Error::Validation(_))) => Err(input_err(e)),
                Err(e) => Err(fail(3, format!("verification failed: {e}"))),
            }
        }
        Command::Bench(a) => bench(a),
    }
}

fn parse_limits(spec: &Option<String>) -> std::result::Result<OracleLimits, CliFailure> {
    let mut lim = OracleLimits::default();
    if let Some(s) = spec {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(fail(2, "error: --limits expects max_vertices,max_steps,time_budget_ms"));
        }
        lim.max_vertices = parts[0].trim().parse().map_err(|_| fail(2, "error: bad max_vertices"))?;
        lim.max_steps = parts[1].trim().parse().map_err(|_| fail(2, "error: bad max_steps"))?;
        let ms: u64 = parts[2].trim().parse().map_err(|_| fail(2, "error: bad time_budget_ms"))?;
        lim.time_budget = std::time::Duration::from_millis(ms);
    }
    Ok(lim)
}

/// One bench row; the column set is fixed:
/// `family,n,k,seed,spectrum,wall_ms,heavy,ell,good,blocks_selected,status`.
pub const BENCH_CSV_HEADER: &str =
    "family,n,k,seed,spectrum,wall_ms,heavy,ell,good,blocks_selected,status";

fn bench(a: BenchArgs) -> CliResult {
    if !matches!(a.family.as_str(), "regular" | "mindeg3") {
        return Err(fail(2, format!("error: unknown bench family '{}'", a.family)));
    }
    let ns: Vec<u32> = a
        .n_list
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| fail(2, format!("error: bad n '{t}'"))))
        .collect::<std::result::Result<_, _>>()?;
    let seeds: Vec<u64> = a
        .seeds
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| fail(2, format!("error: bad seed '{t}'"))))
        .collect::<std::result::Result<_, _>>()?;
    let cfg = load_config(&a.config)?;
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1))
        .max(1);

    let mut tasks: Vec<(u32, u64)> = Vec::new();
    for &n in &ns {
        for &seed in &seeds {
            tasks.push((n, seed));
        }
    }
    let results = std::sync::Mutex::new(Vec::<(u32, u64, String)>::new());
    let next = std::sync::atomic::AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(tasks.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                let (n, seed) = tasks[i];
                let row = bench_one(&a.family, n, a.k, a.extra, seed, &cfg);
                results.lock().unwrap().push((n, seed, row));
            });
        }
    });
    let mut rows = results.into_inner().unwrap();
    rows.sort();
    let mut csv = String::from(BENCH_CSV_HEADER);
    csv.push('\n');
    for (_, _, row) in rows {
        csv.push_str(&row);
        csv.push('\n');
    }
    write_file(&a.csv, &csv)?;
    println!("wrote {}", a.csv.display());
    Ok(())
}

fn bench_one(family: &str, n: u32, k: u32, extra: u32, seed: u64, cfg: &EngineConfig) -> String {
    let spec = match family {
        "mindeg3" => GenSpec::RandomMinDeg3 { n, extra_chords: extra, seed },
        _ => GenSpec::RandomRegularHam { n, k, seed },
    };
    let start = Instant::now();
    let outcome = gen_instance(spec).and_then(|g| full_spectrum(&g, cfg));
    let wall_ms = start.elapsed().as_millis();
    match outcome {
        Ok(rep) => format!(
            "{family},{n},{k},{seed},{},{wall_ms},{},{},{},{},ok",
            rep.lengths.len(),
            rep.stats.heavy,
            rep.stats.ell,
            rep.stats.good,
            rep.stats.blocks_selected
        ),
        Err(e) => format!(
            "{family},{n},{k},{seed},0,{wall_ms},0,0,0,0,err:{}",
            e.to_string().replace(',', ";")
        ),
    }
}
