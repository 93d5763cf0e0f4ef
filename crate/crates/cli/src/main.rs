// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rankprice_core::exact::{brute_force, export_single_level, DEFAULT_ENUMERATION_CAP};
use rankprice_core::experiment::{
    generate_instance, run_experiment, summarize, ExperimentConfig, ParamsConfig, StopConfig,
};
use rankprice_core::{assign_prices, build_grid, DisplayPrices, InitKind, Instance, Method, Money, Pipeline};

#[derive(Parser)]
#[command(name = "rankprice", version, about = "Revenue-maximizing prices for unit-demand customers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One seeded search run
    Solve(SolveArgs),
    /// Many seeded runs of a JSON experiment config
    Bench(BenchArgs),
    /// Write a random instance
    Gen(GenArgs),
    /// Enumerate every grid price vector
    Exact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Write the single-level model in LP format
    ExportLp {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the purchases and revenue at the given prices
    Eval {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated, one per product
        #[arg(long)]
        prices: String,
    },
}

#[derive(Args)]
#[group(id = "stop", multiple = false)]
struct StopArgs {
    /// Stop once this many points were evaluated [default: 24000]
    #[arg(long, group = "stop")]
    max_points: Option<u64>,
    /// Stop after this many seconds, checked once per batch
    #[arg(long, group = "stop")]
    time_limit: Option<f64>,
    /// Stop after this many iterations
    #[arg(long, group = "stop")]
    iterations: Option<u64>,
}

impl StopArgs {
    fn config(&self) -> StopConfig {
        match (self.max_points, self.time_limit, self.iterations) {
            (_, Some(s), _) => StopConfig::TimeLimitSecs(s),
            (_, _, Some(n)) => StopConfig::Iterations(n),
            (Some(n), _, _) => StopConfig::MaxPoints(n),
            _ => StopConfig::default(),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// naive, vns or genetic
    #[arg(long, default_value = "vns")]
    method: Method,
    /// random or greedy
    #[arg(long, default_value = "random")]
    init: InitKind,
    /// Local-search letters: s slack, f fill, r reassignment, c conditional, o coordinate scan
    #[arg(long, default_value = "none")]
    local_search: Pipeline,
    #[arg(long, default_value_t = 1000)]
    l0: usize,
    /// Elite size [default: 100 for vns, 1000 for genetic]
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 500)]
    t: usize,
    #[command(flatten)]
    stop: StopArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for summary.csv, trace.csv and percentiles.csv
    #[arg(long)]
    out: PathBuf,
    /// Reset the VNS radius after an improving batch
    #[arg(long)]
    vns_reset_radius: bool,
    /// Skip already evaluated vectors
    #[arg(long)]
    dedup: bool,
    /// Let both genetic parents be the same elite
    #[arg(long)]
    parents_with_replacement: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Overrides the config's instance
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's run count
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the config's output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Known optimum, for hit rates and ratios
    #[arg(long)]
    reference: Option<Money>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    products: usize,
    #[arg(long)]
    customers: usize,
    #[arg(long, default_value_t = 1)]
    budget_lo: u64,
    #[arg(long, default_value_t = 100)]
    budget_hi: u64,
    /// Probability that a customer can buy a given product
    #[arg(long, default_value_t = 1.0)]
    avail: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn load(path: &PathBuf) -> Result<Instance> {
    Instance::load(path).with_context(|| format!("reading {}", path.display()))
}

fn solve(args: SolveArgs) -> Result<()> {
    let config = ExperimentConfig {
        instance_path: args.instance,
        method: args.method,
        init: args.init,
        pipeline: args.local_search.to_string(),
        params: ParamsConfig {
            l0: Some(args.l0),
            q: args.q,
            t: Some(args.t),
            stop: args.stop.config(),
            dedup: args.dedup,
            reset_radius: args.vns_reset_radius,
            parents_with_replacement: args.parents_with_replacement,
        },
        runs: 1,
        base_seed: args.seed,
        out_dir: args.out,
        workers: Some(1),
    };
    let report = run_experiment(&config)?;
    let run = &report.runs[0];
    let prices: Vec<String> = run.best_prices.iter().map(Money::to_string).collect();
    println!("best {} at ({})", run.best_value, prices.join(", "));
    println!("evaluations {}, iterations {}, {:.1} ms", run.evals, run.iterations, run.elapsed_ms());
    if run.local_search.evaluations > 0 {
        println!(
            "local search: {} evaluations, {} reverts",
            run.local_search.evaluations,
            run.local_search.reverts()
        );
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut config = ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(p) = args.instance {
        config.instance_path = p;
    }
    if let Some(n) = args.runs {
        config.runs = n;
    }
    if let Some(w) = args.workers {
        config.workers = Some(w);
    }
    if let Some(o) = args.out {
        config.out_dir = o;
    }
    let report = run_experiment(&config)?;
    let d = summarize(&report.best_values(), args.reference)?;
    println!("runs {}", d.count);
    println!("min {} q1 {} median {} q3 {} max {}", d.min, d.q1, d.median, d.q3, d.max);
    println!("mean {:.3} variance {:.3}", d.mean, d.variance);
    if let (Some(r), Some(h)) = (d.reference, d.hit_rate) {
        let worst = d.ratios.iter().copied().fold(f64::INFINITY, f64::min);
        println!("reference {r}: hit rate {h:.3}, worst ratio {worst:.4}");
    }
    println!("reports in {}", config.out_dir.display());
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::Gen(g) => {
            let inst = generate_instance(g.products, g.customers, g.budget_lo, g.budget_hi, g.avail, g.seed)?;
            inst.save(&g.out).with_context(|| format!("writing {}", g.out.display()))?;
            let grid = build_grid(&inst);
            println!("{} customers, {} products, {} distinct budgets", g.customers, g.products, grid.len());
            Ok(())
        }
        Command::Exact { instance, cap } => {
            let inst = load(&instance)?;
            let grid = build_grid(&inst);
            let bf = brute_force(&inst, &grid, cap)?;
            println!("optimum {} over {} vectors", bf.optimum, bf.evaluated);
            for p in &bf.optima {
                println!("{}", DisplayPrices(p, &grid));
            }
            Ok(())
        }
        Command::ExportLp { instance, out } => {
            let inst = load(&instance)?;
            let text = export_single_level(&inst, &build_grid(&inst));
            fs::write(&out, text).with_context(|| format!("writing {}", out.display()))
        }
        Command::Eval { instance, prices } => {
            let inst = load(&instance)?;
            let prices: Vec<Money> = prices
                .split(',')
                .map(|s| s.trim().parse().with_context(|| format!("bad price {s:?}")))
                .collect::<Result<_>>()?;
            if prices.len() != inst.num_products() {
                bail!("expected {} prices, got {}", inst.num_products(), prices.len());
            }
            let a = assign_prices(&inst, &prices);
            for (k, choice) in a.chosen.iter().enumerate() {
                match choice {
                    Some(i) => println!("customer {} buys product {} at {}", k + 1, i + 1, prices[*i]),
                    None => println!("customer {} buys nothing", k + 1),
                }
            }
            println!("revenue {}", a.revenue);
            Ok(())
        }
    }
}
