use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use interleave::cloud::{h0_barcode, jump_discontinuities, union_jump_sets, Metric};
use interleave::interval::{act_barcode, width};
use interleave::io;
use interleave::linalg::PrimeField;
use interleave::matching::{bottleneck_distance, format_matching_report};
use interleave::quiver::{interleaving_distance_bruteforce, Rep, DEFAULT_CAP};
use interleave::rational::{format_rational, parse_rational};
use interleave::refinement::{
    counterexample_from_irregularity, first_irregularity, irregular_witnesses, limit_experiment, shift_poset,
    shifted_distance, RefinementSchedule,
};
use interleave::{Barcode, Error, Rational, WeightedPoset};

#[derive(Parser)]
#[command(name = "interleave", version, about = "Interleaving and bottleneck distances over weighted finite posets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct PairArgs {
    /// Poset file: optional `b <weight>` line, then one point per line.
    #[arg(long)]
    poset: PathBuf,
    /// Barcode file with lines `lo hi [multiplicity]`.
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Linf,
    L1,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two barcodes: bottleneck, or the brute-force
    /// interleaving distance over F_2 with --exact-oracle.
    Dist {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        exact_oracle: bool,
        /// Largest number of candidate morphism pairs the oracle may enumerate.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u128,
    },
    /// Optimal matching between two barcodes, bar by bar.
    Bottleneck {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Width of every bar of a barcode.
    Width {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        bars: PathBuf,
    },
    /// Barcode acted on by the maximal translation of height at most --eps.
    Act {
        #[arg(long)]
        poset: PathBuf,
        #[arg(long)]
        bars: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Prints the shift refinement of a poset.
    Shift {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Bottleneck distance of the inflations to the shift refinement.
    ShiftedDist {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Reports the first irregularity, or REGULAR.
    Regular {
        #[arg(long)]
        poset: PathBuf,
        /// List every witness instead of the first.
        #[arg(long)]
        all: bool,
    },
    /// Builds an interleaving whose induced matching is taller than it.
    Counterexample {
        #[arg(long)]
        poset: PathBuf,
    },
    /// Distances along a halving schedule of refinements of the endpoint set.
    Limit {
        /// Continuous barcode file with lines `r R [multiplicity]`.
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        /// Suspension weight; defaults to 2(max − min) + 1 of the endpoints.
        #[arg(long)]
        b: Option<String>,
    },
    /// Degree-zero barcode of a point cloud.
    H0 {
        #[arg(long)]
        cloud: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Linf)]
        metric: MetricArg,
        /// Use squared Euclidean distances. This reparameterizes the scale.
        #[arg(long, conflicts_with = "metric")]
        squared_euclidean: bool,
    },
    /// Union of the jump sets of one or more point clouds.
    Jumps {
        #[arg(long, required = true, num_args = 1..)]
        cloud: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = MetricArg::Linf)]
        metric: MetricArg,
        #[arg(long, conflicts_with = "metric")]
        squared_euclidean: bool,
    },
}

enum Failure {
    Read(PathBuf, std::io::Error),
    Input(PathBuf, Error),
    Run(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Run(Error::CapExceeded { .. }) => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Read(p, e) => format!("{}: {e}", p.display()),
            Failure::Input(p, e) => format!("{}: {e}", p.display()),
            Failure::Run(e) => e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn load<T>(path: &Path, parse: impl FnOnce(&str) -> interleave::Result<T>) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Read(path.to_path_buf(), e))?;
    parse(&text).map_err(|e| Failure::Input(path.to_path_buf(), e))
}

fn load_pair(args: &PairArgs) -> Result<(WeightedPoset, Barcode, Barcode), Failure> {
    let poset = load(&args.poset, io::parse_poset)?;
    let left = load(&args.left, |t| io::parse_barcode(t, &poset))?;
    let right = load(&args.right, |t| io::parse_barcode(t, &poset))?;
    Ok((poset, left, right))
}

fn rational_arg(text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(Failure::Run)
}

fn metric(arg: MetricArg, squared: bool) -> Metric {
    match (squared, arg) {
        (true, _) => Metric::SquaredEuclidean,
        (false, MetricArg::Linf) => Metric::LInfinity,
        (false, MetricArg::L1) => Metric::L1,
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Dist { pair, exact_oracle, cap } => {
            let (poset, left, right) = load_pair(&pair)?;
            let d = if exact_oracle {
                let i = Rep::from_barcode(PrimeField::TWO, &poset, &left)?;
                let m = Rep::from_barcode(PrimeField::TWO, &poset, &right)?;
                interleaving_distance_bruteforce(&poset, &i, &m, cap)?
            } else {
                bottleneck_distance(&poset, &left, &right).0
            };
            Ok(format!("{}\n", format_rational(&d)))
        }
        Command::Bottleneck { pair } => {
            let (poset, left, right) = load_pair(&pair)?;
            let (_, m) = bottleneck_distance(&poset, &left, &right);
            Ok(format_matching_report(&poset, &m, &left.expanded(), &right.expanded()))
        }
        Command::Width { poset, bars } => {
            let poset = load(&poset, io::parse_poset)?;
            let bars = load(&bars, |t| io::parse_barcode(t, &poset))?;
            let x = poset.points();
            Ok(bars
                .entries()
                .iter()
                .map(|&(bar, _)| {
                    format!(
                        "{} {} {}\n",
                        format_rational(&x[bar.lo()]),
                        format_rational(&x[bar.hi()]),
                        format_rational(&width(&poset, bar))
                    )
                })
                .collect())
        }
        Command::Act { poset, bars, eps } => {
            let poset = load(&poset, io::parse_poset)?;
            let bars = load(&bars, |t| io::parse_barcode(t, &poset))?;
            let t = poset.maximal_translation(&rational_arg(&eps)?);
            Ok(io::format_barcode(&poset, &act_barcode(&poset, &bars, &t)))
        }
        Command::Shift { poset } => {
            let poset = load(&poset, io::parse_poset)?;
            Ok(io::format_poset(&shift_poset(&poset)?))
        }
        Command::ShiftedDist { pair } => {
            let (poset, left, right) = load_pair(&pair)?;
            Ok(format!("{}\n", format_rational(&shifted_distance(&poset, &left, &right)?)))
        }
        Command::Regular { poset, all } => {
            let poset = load(&poset, io::parse_poset)?;
            let witnesses = if all {
                irregular_witnesses(&poset)
            } else {
                first_irregularity(&poset).into_iter().collect()
            };
            if witnesses.is_empty() {
                return Ok("REGULAR\n".into());
            }
            Ok(witnesses
                .iter()
                .map(|w| {
                    let c = if w.condition_c { "" } else { " (no condition c)" };
                    format!("IRREGULAR at {w}{c}\n")
                })
                .collect())
        }
        Command::Counterexample { poset } => {
            let poset = load(&poset, io::parse_poset)?;
            let witness = irregular_witnesses(&poset)
                .into_iter()
                .find(|w| w.condition_c)
                .ok_or_else(|| Error::InvalidWitness("no irregularity satisfies condition (c)".into()))?;
            let ce = counterexample_from_irregularity(&poset, witness)?;
            let x = poset.points();
            let coords = |b: interleave::Interval| format!("{},{}", format_rational(&x[b.lo()]), format_rational(&x[b.hi()]));
            let mut out = format!("WITNESS {witness}\nEPS {}\n", format_rational(&ce.eps));
            out.push_str(&format!("A {}\nC {}\nD {}\n", coords(ce.a), coords(ce.c), coords(ce.d)));
            out.push_str(&format_matching_report(&poset, &ce.matching, &[ce.a], &[ce.c, ce.d]));
            Ok(out)
        }
        Command::Limit { left, right, steps, b } => {
            let left = load(&left, io::parse_continuous)?;
            let right = load(&right, io::parse_continuous)?;
            let base: Vec<Rational> = left
                .entries()
                .iter()
                .chain(right.entries())
                .flat_map(|(bar, _)| std::iter::once(bar.birth().clone()).chain(bar.death().cloned()))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            if base.is_empty() {
                return Err(Error::Validation("both barcodes are empty".into()).into());
            }
            let weight = match b {
                Some(b) => rational_arg(&b)?,
                None => WeightedPoset::default_weight(&base[0], &base[base.len() - 1]),
            };
            let schedule = RefinementSchedule::halving(base, steps)?;
            Ok(io::format_limit_table(&limit_experiment(&left, &right, &schedule, &weight)?))
        }
        Command::H0 { cloud, metric: m, squared_euclidean } => {
            let cloud = load(&cloud, io::parse_cloud)?;
            Ok(io::format_continuous(&h0_barcode(&cloud, metric(m, squared_euclidean))))
        }
        Command::Jumps { cloud, metric: m, squared_euclidean } => {
            let m = metric(m, squared_euclidean);
            let sets = cloud
                .iter()
                .map(|p| load(p, io::parse_cloud).map(|c| jump_discontinuities(&c, m)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(io::format_values(&union_jump_sets(sets.iter().map(Vec::as_slice))))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
