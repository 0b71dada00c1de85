use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand as ClapSubcommand};
use hyperthin::report::{run, GraphSource, Outcome, Report, RunConfig, Subcommand};
use hyperthin::space::Generator;
use hyperthin::Error;

#[derive(Parser)]
#[command(
    name = "hyperthin",
    version,
    about = "Thin-triangle diagnostics for metric graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Graph file in the `metricgraph v1` format.
    #[arg(long, global = true, conflicts_with = "gen")]
    input: Option<PathBuf>,
    /// Generator spec, e.g. `grid_plane:40` or `hyperbolic_tessellation:6`.
    #[arg(long, global = true)]
    gen: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Random sample budget.
    #[arg(long, global = true, default_value_t = 20_000)]
    samples: usize,
    /// Enumerate every tuple instead of sampling.
    #[arg(long, global = true)]
    exhaustive: bool,
    /// Subdivide edges to at most this length first.
    #[arg(long, global = true)]
    resolution: Option<f64>,
    /// Start of the classification tail (default: half the largest perimeter).
    #[arg(long, global = true)]
    t_min: Option<f64>,
    #[arg(
        long,
        global = true,
        env = "HYPERTHIN_OUT",
        default_value = "hyperthin-out"
    )]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 1.0 / 32.0)]
    hyperbolic_threshold: f64,
    #[arg(long, global = true, default_value_t = 1.0 / 32.0)]
    tree_threshold: f64,
    #[arg(long, global = true, default_value_t = 30.0)]
    detour_threshold: f64,
    #[arg(long, global = true, default_value_t = 10)]
    min_tail_samples: usize,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Scale profile of triangle thinness and its classification.
    Analyze {
        #[arg(long, default_value_t = 64)]
        buckets: usize,
        /// Geodesics tried per triangle side.
        #[arg(long, default_value_t = 1)]
        geodesics: usize,
    },
    /// Detour growth profile and verdict.
    Detour {
        /// Comma-separated scales (default: four scales derived from the diameter).
        #[arg(long = "t", value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Numerical check of the Euclidean thinness constant.
    Euclid {
        #[arg(long, default_value_t = 200)]
        grid_resolution: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Builds the tower over the input graph and compares thinness ratios.
    Tower {
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
        #[arg(long, default_value_t = 0.25)]
        spine_step: f64,
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
    },
    /// Rescaled four-point defect curve.
    Cone {
        /// Comma-separated increasing scales (default: six from the edge length to half the diameter).
        #[arg(long, value_delimiter = ',')]
        scales: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        window: f64,
    },
}

fn config(cli: Cli) -> Result<RunConfig, Error> {
    let c = cli.common;
    let sub = match cli.command {
        Command::Analyze { .. } => Subcommand::Analyze,
        Command::Detour { .. } => Subcommand::Detour,
        Command::Euclid { .. } => Subcommand::Euclid,
        Command::Tower { .. } => Subcommand::Tower,
        Command::Cone { .. } => Subcommand::Cone,
    };
    let mut cfg = RunConfig::new(sub, c.out);
    cfg.source = match (c.input, c.gen) {
        (Some(path), _) => Some(GraphSource::File { path }),
        (None, Some(spec)) => Some(GraphSource::Generator {
            spec: spec.parse::<Generator>()?,
        }),
        (None, None) => None,
    };
    cfg.seed = c.seed;
    cfg.samples = (!c.exhaustive).then_some(c.samples);
    cfg.resolution = c.resolution;
    cfg.t_min = c.t_min;
    cfg.thresholds.hyperbolic = c.hyperbolic_threshold;
    cfg.thresholds.tree = c.tree_threshold;
    cfg.thresholds.detour = c.detour_threshold;
    cfg.thresholds.min_tail_samples = c.min_tail_samples;
    match cli.command {
        Command::Analyze { buckets, geodesics } => {
            cfg.buckets = buckets;
            cfg.geodesic_choices = geodesics;
        }
        Command::Detour { t } => cfg.t_grid = t,
        Command::Euclid {
            grid_resolution,
            tol,
        } => {
            cfg.grid_resolution = grid_resolution;
            cfg.tol = tol;
        }
        Command::Tower {
            levels,
            basepoint,
            spine_step,
            tolerance,
        } => {
            cfg.levels = levels;
            cfg.basepoint = basepoint;
            cfg.spine_step = spine_step;
            cfg.tower_tolerance = tolerance;
        }
        Command::Cone { scales, window } => {
            cfg.scales = scales;
            cfg.window = window;
        }
    }
    Ok(cfg)
}

fn summary(r: &Report) -> String {
    match &r.result {
        Outcome::Analyze { verdict, .. } => format!(
            "band {} ratio_sup {:.6} slope_tail {}",
            verdict.band,
            verdict.ratio_sup,
            verdict
                .slope_tail
                .map_or("n/a".into(), |s| format!("{s:.6}"))
        ),
        Outcome::Detour { verdict, .. } => format!(
            "band {} tail_min_ratio {}",
            verdict.band, verdict.tail_min_ratio
        ),
        Outcome::Euclid(e) => format!("eta0 {:.9} sup_found {:.9}", e.eta0, e.sup_found),
        Outcome::Tower(t) => format!(
            "sup_tower {:.6} sup_base {:.6} contract {}",
            t.ratio.sup_tower,
            t.ratio.sup_base,
            if t.contract_holds {
                "holds"
            } else {
                "violated"
            }
        ),
        Outcome::Cone { curve } => {
            let parts: Vec<String> = curve
                .scales
                .iter()
                .zip(&curve.defects)
                .map(|(s, d)| match d {
                    Some(d) => format!("{s:.3}:{d:.4}"),
                    None => format!("{s:.3}:-"),
                })
                .collect();
            format!("defects {}", parts.join(" "))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = match cli.command {
        Command::Analyze { .. } => "analyze",
        Command::Detour { .. } => "detour",
        Command::Euclid { .. } => "euclid",
        Command::Tower { .. } => "tower",
        Command::Cone { .. } => "cone",
    };
    let started = std::time::Instant::now();
    match config(cli).and_then(|cfg| run(&cfg).map(|r| (cfg, r))) {
        Ok((cfg, report)) => {
            println!("{}", summary(&report));
            println!(
                "report written to {}",
                cfg.out_dir.join("report.json").display()
            );
            eprintln!("{name}: {:.2}s", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hyperthin {name}: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
