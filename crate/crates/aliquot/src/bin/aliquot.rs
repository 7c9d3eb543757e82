//! Command-line front end: cycle/sequence searches, conjectural constants,
//! predictions against actual counts, trace-determinant graphs, and the
//! brute-force verification suites.

use aliquot::constants::{self, Flavor};
use aliquot::cycle_search::{self, SearchReport};
use aliquot::error::{Error, Result};
use aliquot::ff_curve::RationalCurveModel;
use aliquot::galois_models::{self, GaloisImageSpec};
use aliquot::verify;
use clap::{Parser, Subcommand, ValueEnum};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "aliquot",
    about = "Aliquot cycles of elliptic curves: search, constants, predictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Find normalized aliquot cycles (p_1 minimal) with p_1 <= x.
    Search {
        /// Curve as [a1,a2,a3,a4,a6]
        #[arg(long)]
        curve: String,
        /// Cycle length
        #[arg(long = "L")]
        l: u32,
        /// Search bound for p_1; scientific notation accepted (1e8)
        #[arg(long, value_parser = parse_bound)]
        x: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Find aliquot sequences (no closing condition) with p_1 <= x.
    Sequences {
        #[arg(long)]
        curve: String,
        #[arg(long = "L")]
        l: u32,
        #[arg(long, value_parser = parse_bound)]
        x: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compute the conjectural constant C for a Galois-image model.
    Constant {
        /// full | serre | file:PATH
        #[arg(long, default_value = "full")]
        model: String,
        /// Squarefree discriminant for --model serre
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        #[arg(long = "L")]
        l: u32,
        #[arg(long, value_enum, default_value_t = Flavor::Cycle)]
        flavor: Flavor,
        /// Euler-product truncation; default depends on closed-form coverage
        #[arg(long)]
        ell_max: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Predicted count C * integral at a bound x.
    Predict {
        #[arg(long, default_value = "full")]
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        #[arg(long = "L")]
        l: u32,
        /// Bound, e.g. 1e13
        #[arg(long)]
        x: f64,
        #[arg(long, value_enum, default_value_t = Flavor::Cycle)]
        flavor: Flavor,
    },
    /// Search and compare the actual count against the prediction.
    Compare {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value = "full")]
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        #[arg(long = "L")]
        l: u32,
        #[arg(long, value_parser = parse_bound)]
        x: u64,
    },
    /// Emit the trace-determinant graph in DOT form plus a walk report.
    Graph {
        #[arg(long, default_value = "full")]
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
        /// Level for --model full (the graph is taken mod this level)
        #[arg(long, default_value_t = 2)]
        level: u64,
        /// Report closed walks for L = 1..=l-max
        #[arg(long, default_value_t = 12)]
        l_max: u64,
    },
    /// Run brute-force oracle suites against the fast pipelines.
    Verify {
        /// Suite names (default: all)
        #[arg(long)]
        suite: Vec<String>,
        /// Include long-running enumerations (GL2(Z/74))
        #[arg(long)]
        extended: bool,
    },
}

/// Accepts 100000000, 1e8, 2.5e6.
fn parse_bound(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let f: f64 = s.parse().map_err(|_| format!("bad bound {s}"))?;
    if !f.is_finite() || f < 0.0 || f > 9e15 || f.fract() != 0.0 {
        return Err(format!("bound {s} is not a representable integer"));
    }
    Ok(f as u64)
}

fn parse_model(model: &str, delta: Option<i64>) -> Result<GaloisImageSpec> {
    match model {
        "full" => Ok(GaloisImageSpec::FullGL2),
        "serre" => {
            let d = delta.ok_or_else(|| {
                Error::InvalidParameter("--model serre requires --delta".into())
            })?;
            galois_models::serre_curve(d)
        }
        other => {
            if let Some(path) = other.strip_prefix("file:") {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
                galois_models::subgroup_from_json(&text)
            } else {
                Err(Error::InvalidParameter(format!(
                    "unknown model {other}; expected full | serre | file:PATH"
                )))
            }
        }
    }
}

fn print_search(report: &SearchReport, kind: &str, format: Format) {
    match format {
        Format::Csv => {
            for c in &report.cycles {
                let row: Vec<String> = c.primes.iter().map(u64::to_string).collect();
                println!("{}", row.join(","));
            }
        }
        Format::Json => {
            let cycles: Vec<Vec<u64>> = report.cycles.iter().map(|c| c.primes.clone()).collect();
            let j = serde_json::json!({
                "kind": kind,
                "curve": report.cycles.first().map(|c| c.curve.clone()),
                "x": report.x,
                "L": report.l,
                "count": report.count,
                "cycles": cycles,
                "primes_scanned": report.primes_scanned,
                "wall_ms": report.wall_time.as_millis() as u64,
            });
            println!("{j}");
        }
        Format::Text => {
            for c in &report.cycles {
                let row: Vec<String> = c.primes.iter().map(u64::to_string).collect();
                println!("({})", row.join(","));
            }
            println!(
                "{}s of length {} with p_1 <= {}: {} ({} primes scanned, {:.2?})",
                kind, report.l, report.x, report.count, report.primes_scanned, report.wall_time
            );
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Search { curve, l, x, format } => {
            let model = RationalCurveModel::parse(&curve)?;
            let report = cycle_search::find_cycles(&model, l, x)?;
            print_search(&report, "cycle", format);
        }
        Command::Sequences { curve, l, x, format } => {
            let model = RationalCurveModel::parse(&curve)?;
            let report = cycle_search::find_sequences(&model, l, x)?;
            print_search(&report, "sequence", format);
        }
        Command::Constant {
            model,
            delta,
            l,
            flavor,
            ell_max,
            format,
        } => {
            let spec = parse_model(&model, delta)?;
            let report = match ell_max {
                Some(m) => constants::constant_with_ell_max(&spec, l, flavor, m)?,
                None => constants::constant(&spec, l, flavor)?,
            };
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => println!(
                    "{},{},{},{:.15e},{},{:.15e}",
                    report.spec, report.l, report.flavor, report.phi_l_0, report.finite_part,
                    report.c
                ),
                Format::Text => {
                    println!("model: {}", report.spec);
                    println!("L = {}, flavor = {}", report.l, report.flavor);
                    println!("phi_L(0) = {:.15}", report.phi_l_0);
                    println!("finite part = {}", report.finite_part);
                    println!(
                        "Euler product to {} = {:.15} (tail bound {:.2e})",
                        report.euler_truncation, report.euler_value, report.tail_bound
                    );
                    println!("C = {:.15}", report.c);
                }
            }
        }
        Command::Predict {
            model,
            delta,
            l,
            x,
            flavor,
        } => {
            let spec = parse_model(&model, delta)?;
            let predicted = constants::predict(&spec, l, x, flavor)?;
            if predicted == 0.0 {
                println!("predicted 0; conjecturally finite");
            } else {
                println!("{predicted:.4}");
            }
        }
        Command::Compare {
            curve,
            model,
            delta,
            l,
            x,
        } => {
            let curve_model = RationalCurveModel::parse(&curve)?;
            let spec = parse_model(&model, delta)?;
            let predicted = constants::predict(&spec, l, x as f64, Flavor::Cycle)?;
            let report = cycle_search::find_cycles(&curve_model, l, x)?;
            let actual = report.count as f64;
            if predicted == 0.0 {
                println!("predicted 0; conjecturally finite (actual {})", report.count);
            } else {
                let err = (predicted - actual) / predicted;
                println!(
                    "predicted {predicted:.4}, actual {}, error {:.2}%",
                    report.count,
                    100.0 * err
                );
            }
        }
        Command::Graph {
            model,
            delta,
            level,
            l_max,
        } => {
            let spec = parse_model(&model, delta)?;
            let table = match &spec {
                // The full image is level-free; graph it at the requested level.
                GaloisImageSpec::FullGL2 => galois_models::full_image_table(level)?,
                _ => galois_models::finite_part_table(&spec)?,
            };
            let graph = galois_models::build_graph(&table);
            print!("{}", graph.to_dot());
            let closed: Vec<u64> = (1..=l_max).filter(|&l| graph.has_closed_walk(l)).collect();
            if closed.is_empty() {
                println!("no closed walk for any L <= {l_max}");
            } else {
                let s: Vec<String> = closed.iter().map(u64::to_string).collect();
                println!("closed walks at L = {}", s.join(","));
            }
        }
        Command::Verify { suite, extended } => {
            let outcomes = if suite.is_empty() {
                verify::run_all(extended)
            } else {
                let mut out = Vec::new();
                for name in &suite {
                    out.push(verify::run_suite(name, extended)?);
                }
                out
            };
            let mut failed = false;
            for o in &outcomes {
                println!("{o}");
                failed |= !o.passed;
            }
            if failed {
                return Err(Error::InvalidParameter("verification failed".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
