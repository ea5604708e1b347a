//! Command-line surface: epsilon tables, admitting algebras, linked-pair
//! counts, intersection totals, explicit orders, verification suites, and
//! batch processing.

mod batch;
mod render;
mod verify;

use clap::{Parser, Subcommand, ValueEnum};

use linkcount::arith::Int;
use linkcount::error::Result;
use linkcount::intersection::{intersection_angle, total_intersection};
use linkcount::linking::{
    build_profile, candidate_orders, classify_discs, count_linked, count_linked_level,
    count_oriented_positive, epsilon, sign_split, CountQuery,
};
use linkcount::orders::{appendix_lattice, generated_order, generated_order_level, standard_xlinked_pair};
use linkcount::quadclass::make_discriminant;

pub const SCHEMA: &str = "linkcount/1";

#[derive(Parser)]
#[command(
    name = "linkcount",
    about = "Exact arithmetic of x-linked optimal embeddings into Eichler orders of rational quaternion algebras",
    long_about = None,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Epsilon values at primes up to a bound; undefined entries print as
    /// a dot.
    Epsilon {
        #[arg(long)]
        d1: Int,
        #[arg(long)]
        d2: Int,
        #[arg(long, default_value_t = 100)]
        bound: Int,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Quaternion algebras admitting nontrivial linkings of a discriminant
    /// pair, grouped by ramification class.
    #[command(after_help = "TSV columns: x, nice, ramified (comma-joined primes, '-' if none), \
levels (admissible Eichler levels for nice triples, '-' otherwise).")]
    Algebras {
        #[arg(long)]
        d1: Int,
        #[arg(long)]
        d2: Int,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Linked embedding-pair counts for one x into an Eichler order of the
    /// given discriminant and level.
    Count {
        #[arg(long)]
        d1: Int,
        #[arg(long)]
        d2: Int,
        #[arg(long)]
        x: Int,
        #[arg(long)]
        disc: Int,
        #[arg(long, default_value_t = 1)]
        level: Int,
        /// Restrict to one intersection level.
        #[arg(long, conflicts_with = "all_levels")]
        ell: Option<Int>,
        /// Sweep every admissible intersection level.
        #[arg(long)]
        all_levels: bool,
        /// Count per orientation pair instead of in total.
        #[arg(long)]
        oriented: bool,
        /// Positive intersection sign only (requires --oriented and a
        /// transversal x).
        #[arg(long, requires = "oriented")]
        positive: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Total intersection data of a discriminant pair over all x.
    Intersect {
        #[arg(long)]
        d1: Int,
        #[arg(long)]
        d2: Int,
        #[arg(long)]
        disc: Int,
        #[arg(long, default_value_t = 1)]
        level: Int,
        /// Report the q-weighted aggregate at this prime.
        #[arg(long)]
        q: Option<Int>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// The explicit order generated by the standard x-linked pair, as
    /// JSON, with its reduced discriminant and determinants.
    Order {
        #[arg(long)]
        d1: Int,
        #[arg(long)]
        d2: Int,
        #[arg(long)]
        x: Int,
        #[arg(long)]
        ell: Option<Int>,
    },
    /// Exact intersection angle of the geodesics linked at x.
    Angle {
        #[arg(long)]
        d1: Int,
        #[arg(long)]
        d2: Int,
        #[arg(long)]
        x: Int,
        /// Also print a floating-point approximation.
        #[arg(long)]
        approx: bool,
    },
    /// Self-verification suites with counterexample dumps.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
    /// Process whitespace-separated rows "D1 D2 [x]" from a file or stdin.
    /// '#' starts a comment; blank lines are skipped; malformed rows are
    /// reported with their line number and never abort the batch. Exit
    /// code is 0 iff every row succeeded.
    #[command(after_help = "TSV columns: line number, 'ok' or 'error[CODE]', then the row \
summary as canonical JSON (keys sorted). Row semantics: 'D1 D2' summarizes the admitting \
algebras, or the total intersection when --disc is given; 'D1 D2 x' reports the ramified \
set, or the linked-pair count when --disc is given.")]
    Batch {
        /// Input path; "-" reads stdin.
        #[arg(long, default_value = "-")]
        file: String,
        #[arg(long)]
        disc: Option<Int>,
        #[arg(long, default_value_t = 1)]
        level: Int,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Worker threads; defaults to LINKCOUNT_JOBS or 1.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Epsilon { d1, d2, bound, format } => {
            let d1 = make_discriminant(d1)?;
            let d2 = make_discriminant(d2)?;
            let mut rows: Vec<(Int, Option<i32>)> = Vec::new();
            let mut p: Int = 2;
            while p <= bound {
                if linkcount::arith::is_prime(p) {
                    rows.push((p, epsilon(p, &d1, &d2)?));
                }
                p += 1;
            }
            render::epsilon_table(&rows, format);
            Ok(0)
        }
        Command::Algebras { d1, d2, format } => {
            let d1 = make_discriminant(d1)?;
            let d2 = make_discriminant(d2)?;
            let cands = candidate_orders(&d1, &d2)?;
            render::algebras_table(&cands, format);
            Ok(0)
        }
        Command::Count {
            d1,
            d2,
            x,
            disc,
            level,
            ell,
            all_levels,
            oriented,
            positive,
            format,
        } => {
            let d1 = make_discriminant(d1)?;
            let d2 = make_discriminant(d2)?;
            let t = classify_discs(&d1, &d2, x)?;
            let profile = build_profile(&t)?;
            let ells: Vec<Option<Int>> = if all_levels {
                let q = CountQuery::new(disc, level, None)?;
                linkcount::intersection::admissible_levels(&profile, &q)?
                    .into_iter()
                    .map(Some)
                    .collect()
            } else {
                vec![ell]
            };
            if oriented && ells.iter().any(|e| e.is_none()) {
                return Err(linkcount::Error::InvalidArgument(
                    "oriented counts are per intersection level; pass --ell or --all-levels".into(),
                ));
            }
            let mut rows: Vec<(Option<Int>, Int)> = Vec::new();
            for e in ells {
                let q = CountQuery::new(disc, level, e)?;
                let n = match (e, oriented) {
                    (None, false) => count_linked(&profile, &q)?,
                    (Some(_), false) => count_linked_level(&profile, &q)?,
                    (_, true) => {
                        let per_orientation = count_oriented_positive(&profile, &q)?;
                        if positive {
                            if !t.is_transversal() {
                                return Err(linkcount::Error::NoSignDefined);
                            }
                            per_orientation
                        } else if t.is_transversal() {
                            // Unsigned: the two signs split evenly, so the
                            // total per orientation pair doubles.
                            let (pos, neg) = sign_split(2 * per_orientation, &t)?;
                            pos + neg
                        } else {
                            per_orientation
                        }
                    }
                };
                rows.push((e, n));
            }
            render::count_table(&rows, format);
            Ok(0)
        }
        Command::Intersect { d1, d2, disc, level, q, format } => {
            let d1 = make_discriminant(d1)?;
            let d2 = make_discriminant(d2)?;
            let query = CountQuery::new(disc, level, None)?;
            let report = total_intersection(&d1, &d2, &query)?;
            render::intersect_report(&report, q, format);
            Ok(0)
        }
        Command::Order { d1, d2, x, ell } => {
            let d1 = make_discriminant(d1)?;
            let d2 = make_discriminant(d2)?;
            let pair = standard_xlinked_pair(&d1, &d2, x)?;
            let t = classify_discs(&d1, &d2, x)?;
            let (lat, frame_det) = match ell {
                Some(l) => (
                    generated_order_level(&pair, l)?,
                    Some(appendix_lattice(&t, l)?.determinant()?),
                ),
                None => (generated_order(&pair)?, None),
            };
            render::order_json(&lat, frame_det)?;
            Ok(0)
        }
        Command::Angle { d1, d2, x, approx } => {
            let d1 = make_discriminant(d1)?;
            let d2 = make_discriminant(d2)?;
            let t = classify_discs(&d1, &d2, x)?;
            let a = intersection_angle(&t)?;
            println!("tan(theta) = sqrt({})/{}", a.tan_radicand, a.tan_denominator);
            if approx {
                println!("theta ~ {:.12}", a.radians_approx());
            }
            Ok(0)
        }
        Command::Verify { suite } => Ok(verify::run(suite)),
        Command::Batch { file, disc, level, format, jobs } => {
            let jobs = jobs
                .or_else(|| {
                    std::env::var("LINKCOUNT_JOBS")
                        .ok()
                        .and_then(|v| v.parse().ok())
                })
                .unwrap_or(1)
                .max(1);
            batch::run(&file, disc, level, format, jobs)
        }
    }
}
