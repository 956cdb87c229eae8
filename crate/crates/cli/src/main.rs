//! Command-line front door. Subcommands: gen, pald, pannld, verify,
//! compare, export. Exit codes: 0 success, 2 malformed input, 3 degree cap
//! exceeded, 4 axiom violation, 1 other failures (including verification
//! checks that did not pass). Value flags can also be set through
//! environment variables with the PANNLD_ prefix.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pannld_cli::{
    compare_pipelines, exit_code_for, parse_generator_spec, run, InputSpec, Pipeline, RunConfig,
};
use pannld_core::error::{Error, Result};
use pannld_core::io::{self, IdMap};
use pannld_core::lab;
use pannld_core::neighbors::{build_friend_sets, KSpec, NeighborGraph};
use pannld_core::pannld::{run_pannld, PannldParams};
use pannld_core::ranking::{gen_euclidean, sample_uniform_points, DatasetSpec};
use pannld_core::PhiMode;

#[derive(Parser)]
#[command(
    name = "pannld",
    version,
    about = "Comparison-based clustering via partitioned local depth, exact or K-nearest-neighbor approximate"
)]
struct Cli {
    /// Worker-thread budget for the whole process (default: all cores).
    #[arg(long, global = true, env = "PANNLD_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Points CSV with header id,c1,...,cd.
    #[arg(long, value_name = "PATH")]
    points: Option<PathBuf>,

    /// Headerless n x n dissimilarity matrix CSV (row i = view from i).
    #[arg(long, value_name = "PATH")]
    distances: Option<PathBuf>,

    /// Rank tables CSV with header base,member,rank.
    #[arg(long, value_name = "PATH")]
    ranks: Option<PathBuf>,

    /// Generator spec: euclidean:n=..,dim=..,seed=.. | star:leaves=.. |
    /// tournament:n=..,seed=..
    #[arg(long = "gen", value_name = "SPEC")]
    generator: Option<String>,
}

impl InputArgs {
    fn to_spec(&self) -> Result<InputSpec> {
        let mut specs = Vec::new();
        if let Some(path) = &self.points {
            specs.push(InputSpec::Points { path: path.clone() });
        }
        if let Some(path) = &self.distances {
            specs.push(InputSpec::Distances { path: path.clone() });
        }
        if let Some(path) = &self.ranks {
            specs.push(InputSpec::Ranks { path: path.clone() });
        }
        if let Some(text) = &self.generator {
            specs.push(InputSpec::Generator {
                spec: parse_generator_spec(text)?,
            });
        }
        match specs.len() {
            1 => Ok(specs.pop().unwrap()),
            0 => Err(Error::InvalidInput(
                "no input: pass one of --points, --distances, --ranks, --gen".into(),
            )),
            _ => Err(Error::InvalidInput(
                "more than one input source given; pass exactly one".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    Auto,
    Points,
    Ranks,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Binomial,
    Means,
    Concentration,
    Semantics,
    Limit,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportKind {
    Ranks,
    Arcs,
    Promoted,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset and write it as points or rank tables.
    Gen {
        /// Generator spec, e.g. euclidean:n=400,dim=2,seed=7.
        #[arg(long, value_name = "SPEC")]
        spec: String,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// points needs coordinates, so it only suits euclidean specs.
        #[arg(long, value_enum, default_value_t = GenFormat::Auto)]
        format: GenFormat,
    },

    /// Exact cubic-time pipeline.
    Pald {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_name = "DIR", default_value = "pald-out")]
        out_dir: PathBuf,
        /// Refuse inputs larger than this without --force.
        #[arg(long, default_value_t = pannld_core::pald::DEFAULT_MAX_EXACT_N, env = "PANNLD_PALD_CAP")]
        cap: usize,
        #[arg(long)]
        force: bool,
        /// Re-run a persisted config.json instead of the flags above.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },

    /// Approximate pipeline on the K-nearest-neighbor digraph.
    Pannld {
        #[command(flatten)]
        input: InputArgs,
        /// Friend-set size (1 < K < n-1).
        #[arg(long, env = "PANNLD_K")]
        k: Option<usize>,
        #[arg(long, default_value = "exact", env = "PANNLD_PHI_MODE")]
        phi_mode: String,
        /// Abort if any promoted degree exceeds this (default: adaptive).
        #[arg(long, env = "PANNLD_DEGREE_CAP")]
        degree_cap: Option<usize>,
        #[arg(long, value_name = "DIR", default_value = "pannld-out")]
        out_dir: PathBuf,
        /// Re-run a persisted config.json instead of the flags above.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },

    /// Monte Carlo verification suites; prints machine-readable reports.
    Verify {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long, default_value_t = 10_000, env = "PANNLD_TRIALS")]
        trials: u64,
        /// Deviation parameter (also the pinned 1-η level for `binomial`).
        #[arg(long, default_value_t = 0.5, env = "PANNLD_THETA")]
        theta: f64,
        #[arg(long, default_value_t = 1, env = "PANNLD_SEED")]
        seed: u64,
        /// Synthetic instance size (check-specific default otherwise).
        #[arg(long)]
        n: Option<usize>,
        /// Friend-set size for graph-based checks.
        #[arg(long)]
        k: Option<usize>,
        /// Also write the JSON reports here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },

    /// Run both pipelines on one input and report their agreement.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, env = "PANNLD_K")]
        k: usize,
        #[arg(long, default_value = "exact", env = "PANNLD_PHI_MODE")]
        phi_mode: String,
        #[arg(long, env = "PANNLD_DEGREE_CAP")]
        degree_cap: Option<usize>,
        #[arg(long, default_value_t = pannld_core::pald::DEFAULT_MAX_EXACT_N, env = "PANNLD_PALD_CAP")]
        cap: usize,
        /// Also write the JSON report here.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },

    /// Export derived structures (rank tables, digraph arcs, promoted pairs).
    Export {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        what: ExportKind,
        /// Friend-set size; needed for arcs and promoted exports.
        #[arg(long, env = "PANNLD_K")]
        k: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Gen { spec, out, format } => {
            let spec = parse_generator_spec(&spec)?;
            gen_dataset(&spec, &out, format)?;
            eprintln!("wrote {}", out.display());
            Ok(0)
        }
        Command::Pald {
            input,
            out_dir,
            cap,
            force,
            config,
        } => {
            let config = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig {
                    input: input.to_spec()?,
                    pipeline: Pipeline::Pald,
                    k: None,
                    phi_mode: PhiMode::Exact,
                    seed: 0,
                    out_dir,
                    degree_cap: None,
                    threads: None,
                    pald_cap: cap,
                    force,
                },
            };
            let summary = run(&config)?;
            eprintln!(
                "n = {}, tau = {:.6}, components = {:?}",
                summary.n, summary.tau, summary.component_sizes
            );
            Ok(0)
        }
        Command::Pannld {
            input,
            k,
            phi_mode,
            degree_cap,
            out_dir,
            config,
        } => {
            let config = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig {
                    input: input.to_spec()?,
                    pipeline: Pipeline::Pannld,
                    k,
                    phi_mode: phi_mode.parse()?,
                    seed: 0,
                    out_dir,
                    degree_cap,
                    threads: None,
                    pald_cap: pannld_core::pald::DEFAULT_MAX_EXACT_N,
                    force: false,
                },
            };
            let summary = run(&config)?;
            eprintln!(
                "n = {}, K = {:?}, tau = {:.6} (P {:.6} + R {:.6}), components = {:?}",
                summary.n,
                summary.k,
                summary.tau,
                summary.tau_p.unwrap_or(f64::NAN),
                summary.tau_r.unwrap_or(f64::NAN),
                summary.component_sizes
            );
            Ok(0)
        }
        Command::Verify {
            check,
            trials,
            theta,
            seed,
            n,
            k,
            out,
        } => {
            let reports = run_verify(check, trials, theta, seed, n, k)?;
            let text = serde_json::to_string_pretty(&reports)
                .map_err(|e| Error::Inconsistency(format!("report serialization: {e}")))?;
            println!("{text}");
            if let Some(path) = out {
                std::fs::write(path, &text)?;
            }
            Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
        }
        Command::Compare {
            input,
            k,
            phi_mode,
            degree_cap,
            cap,
            out,
        } => {
            let report = compare_pipelines(
                &input.to_spec()?,
                k,
                phi_mode.parse()?,
                degree_cap,
                cap,
            )?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::Inconsistency(format!("report serialization: {e}")))?;
            println!("{text}");
            if let Some(path) = out {
                std::fs::write(path, &text)?;
            }
            Ok(0)
        }
        Command::Export {
            input,
            what,
            k,
            out,
        } => {
            export(&input.to_spec()?, what, k, &out)?;
            eprintln!("wrote {}", out.display());
            Ok(0)
        }
    }
}

fn gen_dataset(spec: &DatasetSpec, out: &Path, format: GenFormat) -> Result<()> {
    let as_points = match (format, spec) {
        (GenFormat::Points, DatasetSpec::Euclidean { .. }) => true,
        (GenFormat::Auto, DatasetSpec::Euclidean { .. }) => true,
        (GenFormat::Points, _) => {
            return Err(Error::InvalidInput(
                "only euclidean specs have coordinates; use --format ranks".into(),
            ))
        }
        _ => false,
    };
    if as_points {
        if let DatasetSpec::Euclidean { n, dim, seed } = spec {
            let coords = sample_uniform_points(*n, *dim, *seed);
            let ids = IdMap::numbered(*n);
            return io::write_points_csv(out, &ids, &coords);
        }
    }
    let rs = spec.build()?;
    let ids = IdMap::numbered(rs.n());
    io::write_rank_tables_csv(out, &ids, &rs.full_tables()?)
}

fn export(input: &InputSpec, what: ExportKind, k: Option<usize>, out: &Path) -> Result<()> {
    let (ids, rs) = input.load()?;
    match what {
        ExportKind::Ranks => io::write_rank_tables_csv(out, &ids, &rs.full_tables()?),
        ExportKind::Arcs | ExportKind::Promoted => {
            let k = k.ok_or_else(|| {
                Error::InvalidInput("this export needs --k for the friend sets".into())
            })?;
            let friends = build_friend_sets(&rs, &KSpec::Uniform(k))?;
            let g = NeighborGraph::from_friend_sets(friends)?;
            match what {
                ExportKind::Arcs => io::write_arcs_csv(out, &ids, g.arcs()),
                _ => io::write_promoted_csv(out, &ids, &g.promoted_edges()),
            }
        }
    }
}

fn run_verify(
    check: Check,
    trials: u64,
    theta: f64,
    seed: u64,
    n: Option<usize>,
    k: Option<usize>,
) -> Result<Vec<lab::McReport>> {
    match check {
        Check::Binomial => {
            let n = n.unwrap_or(30);
            let k = k.unwrap_or(5);
            let rs = gen_euclidean(n, 2, seed)?;
            let out = run_pannld(&rs, &PannldParams::new(k))?;
            let pair = first_relegated_pair(&out.graph)?;
            let report =
                lab::mc_binomial_gof(&out.graph, pair, theta, trials, seed, 0.01)?;
            Ok(vec![report])
        }
        Check::Means => {
            let n = n.unwrap_or(20);
            let k = k.unwrap_or(4);
            let rs = gen_euclidean(n, 2, seed)?;
            let out = run_pannld(&rs, &PannldParams::new(k))?;
            lab::mc_mean_checks(
                &out.graph,
                &out.restricted,
                &out.foci,
                &out.g_x,
                &out.g_xv,
                &out.phi,
                trials,
                seed,
            )
        }
        Check::Concentration => {
            let n = n.unwrap_or(30);
            let k = k.unwrap_or(5);
            let rs = gen_euclidean(n, 2, seed)?;
            let out = run_pannld(&rs, &PannldParams::new(k))?;
            lab::mc_concentration(
                &out.graph,
                &out.restricted,
                &out.g_x,
                &out.g_xv,
                trials,
                theta,
                seed,
            )
        }
        Check::Semantics => {
            let n = n.unwrap_or(18);
            let rs = gen_euclidean(n, 2, seed)?;
            let tables = rs.full_tables()?;
            let out = lab::mc_pald_semantics(&tables, trials, seed)?;
            Ok(out.reports)
        }
        Check::Limit => {
            let n = n.unwrap_or(2000);
            lab::mc_limit(n, n / 2, trials, seed, 0.05)
        }
    }
}

fn first_relegated_pair(g: &NeighborGraph) -> Result<(usize, usize)> {
    for x in 0..g.n() {
        for y in (x + 1)..g.n() {
            if !g.is_promoted(x, y) {
                return Ok((x, y));
            }
        }
    }
    Err(Error::InvalidInput(
        "instance has no relegated pairs; increase n or decrease K".into(),
    ))
}
