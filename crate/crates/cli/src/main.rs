use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cones::algorithms::{make_policy, LspEps};
use cones::harness::figures::reproduce;
use cones::harness::{emit_csv, emit_json, fit_loglog_slope, run, sweep_t, PolicySpec, Tabular};
use cones::instances::build_family;
use cones::verify::{run_suite, VerifyOptions};

/// Online convex optimization over nested feasible sets: run policies on
/// instance families and write traces, sweeps and figure data.
#[derive(Parser, Debug)]
#[command(name = "cones", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play one policy on one instance and write its trace.
    Run(RunArgs),
    /// Final regret and movement over a list of horizons.
    Sweep(SweepArgs),
    /// Write the CSV bundle for one of the simulation figures.
    Reproduce(ReproduceArgs),
    /// Run invariant suites and print one line per check.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// greedy, frugal, lsp, gap_frugal or ab.
    #[arg(long)]
    policy: String,
    /// sc_lb, convex_lb, directional, frozen, sharp_adv, sc_adv or random_1d.
    #[arg(long)]
    family: String,
    /// Family parameter as key=value; repeatable. Defaults: sc_lb r0=1 D=4;
    /// convex_lb D=4 a=D/(2√2) k=D/(4√2); directional D=max(10,T);
    /// frozen T_freeze=7 r0=1 D=4; sharp_adv a=0.75 b=1.5 B=1 c=1 eps=0.23;
    /// sc_adv a=0.75 b=1.5 B=1 eps=0.23 c_R=1 lambda=0.5; random_1d sharp=0 fixed_objective=0.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Seed for random families.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// LSP tolerance eps = T^(-beta).
    #[arg(long, default_value_t = 0.5, conflicts_with = "lsp_eps")]
    lsp_beta: f64,
    /// Fixed LSP tolerance.
    #[arg(long)]
    lsp_eps: Option<f64>,
    /// Output directory; the CONES_OUT environment variable takes precedence.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl Common {
    fn spec(&self) -> PolicySpec<'_> {
        PolicySpec {
            name: &self.policy,
            lsp_eps: match self.lsp_eps {
                Some(e) => LspEps::Fixed(e),
                None => LspEps::HorizonPower(self.lsp_beta),
            },
        }
    }

    fn params(&self) -> BTreeMap<String, f64> {
        self.params.iter().cloned().collect()
    }

    fn out_dir(&self) -> Result<PathBuf> {
        prepare_out(&self.out_dir)
    }

    fn ext(&self) -> &'static str {
        match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    fn write<T: Tabular>(&self, data: &T, path: &Path) -> Result<()> {
        match self.format {
            Format::Csv => emit_csv(data, path),
            Format::Json => emit_json(data, path),
        }
        .with_context(|| format!("writing {}", path.display()))
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Horizon.
    #[arg(long = "T")]
    horizon: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Horizons: comma-separated values or inclusive ranges such as 1..200.
    #[arg(long = "T-list", value_delimiter = ',', required = true)]
    horizons: Vec<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Figure {
    Fig3,
    Fig4,
    Fig5,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(value_enum)]
    name: Figure,
    /// Output directory; the CONES_OUT environment variable takes precedence.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Geometry,
    Solvers,
    Algorithms,
    Instances,
    Oracle,
    All,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable Frugal's jump branch to check that the suites notice.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("bad value for {k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_horizons(items: &[String]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in items {
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
                if a > b {
                    bail!("empty range {item}");
                }
                out.extend(a..=b);
            }
            None => out.push(item.trim().parse().with_context(|| format!("bad horizon `{item}`"))?),
        }
    }
    Ok(out)
}

fn prepare_out(flag: &Path) -> Result<PathBuf> {
    let dir = match std::env::var_os("CONES_OUT") {
        Some(env) if !env.is_empty() => PathBuf::from(env),
        _ => flag.to_path_buf(),
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let c = &args.common;
    let inst = build_family(&c.family, args.horizon, &c.params(), c.seed)?;
    let spec = c.spec();
    let mut policy = make_policy(spec.name, spec.lsp_eps, args.horizon)?;
    let trace = run(policy.as_mut(), &inst)?;
    let path = c
        .out_dir()?
        .join(format!("{}_{}_{}.{}", spec.label(), c.family, args.horizon, c.ext()));
    c.write(&trace, &path)?;
    println!(
        "policy={} family={} T={} regret_final={:.6e} move_final={:.6e} jumps={:?} -> {}",
        spec.label(),
        c.family,
        args.horizon,
        trace.regret_final(),
        trace.move_final(),
        trace.jump_times,
        path.display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let c = &args.common;
    let horizons = parse_horizons(&args.horizons)?;
    let spec = c.spec();
    let table = sweep_t(spec, &c.family, &horizons, &c.params(), c.seed)?;
    let path = c
        .out_dir()?
        .join(format!("{}_{}_sweep.{}", spec.label(), c.family, c.ext()));
    c.write(&table, &path)?;
    for r in &table.rows {
        println!(
            "T={} regret_final={:.6e} move_final={:.6e} jumps={}",
            r.horizon, r.regret_final, r.move_final, r.jumps
        );
    }
    match fit_loglog_slope(&table, "move_final") {
        Ok(s) => println!("loglog slope of move_final: {s:.4}"),
        Err(e) => println!("loglog slope of move_final: n/a ({e})"),
    }
    println!("-> {}", path.display());
    Ok(())
}

fn cmd_reproduce(args: ReproduceArgs) -> Result<()> {
    let out = prepare_out(&args.out_dir)?;
    let name = match args.name {
        Figure::Fig3 => "fig3",
        Figure::Fig4 => "fig4",
        Figure::Fig5 => "fig5",
    };
    for f in reproduce(name, &out)? {
        println!("{}", f.display());
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let suite = args.suite.to_possible_value().expect("no skipped variants");
    let results = run_suite(
        suite.get_name(),
        VerifyOptions {
            seed: args.seed,
            inject_fault: args.inject_fault,
        },
    )?;
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", results.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Sweep(a) => cmd_sweep(a).map(|_| true),
        Command::Reproduce(a) => cmd_reproduce(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
