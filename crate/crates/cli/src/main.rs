//! Command-line front end: graph and matrix files in, approximations,
//! reports and measurements out. All numeric output is `%.17g` and every
//! run is byte-identical given the same flags and seed.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use walkspace::expander::{build_family, FamilyConfig, FamilyMode};
use walkspace::graph::EdgeSlot;
use walkspace::matrix::{Matrix, SymmetricMatrix};
use walkspace::spectral::{measure_dir_approx, measure_sym_approx};
use walkspace::stats::{self, PolySpec, VertexSet};
use walkspace::textio::{self, g17};
use walkspace::walk::{approx_power, bit_schedule, certified_bound, PowerParams, Step};
use walkspace::{Error, LabeledMultigraph, Result};

#[derive(Parser)]
#[command(name = "walkspace", version, about = "Spectral approximation of random-walk powers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Random,
    Explicit,
}

impl From<ModeArg> for FamilyMode {
    fn from(m: ModeArg) -> FamilyMode {
        match m {
            ModeArg::Random => FamilyMode::VerifiedRandom,
            ModeArg::Explicit => FamilyMode::Explicit,
        }
    }
}

#[derive(Args)]
struct PowerArgs {
    /// Input graph file.
    #[arg(long)]
    graph: PathBuf,
    /// Walk length.
    #[arg(long)]
    r: u64,
    /// Target approximation quality in (0, 1).
    #[arg(long)]
    eps: f64,
    /// Relaxed family quality; omitting it selects the strict parameterization.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value = "random")]
    mode: ModeArg,
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Slot budget for materializing commands.
    #[arg(long, default_value = "10000000")]
    max_slots: u64,
}

impl PowerArgs {
    fn params(&self) -> PowerParams {
        let mut p = PowerParams::new(self.r, self.eps).seeded(self.seed);
        p.mode = self.mode.into();
        if let Some(lambda) = self.lambda {
            p = p.relaxed(lambda);
        }
        p.family_config = family_config();
        p.cert_budget = self.max_slots.max(1_000_000) * 16;
        p
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the walk-power oracle and print its certified error ledger.
    Power {
        #[command(flatten)]
        args: PowerArgs,
        /// Materialize the output graph to this path.
        #[arg(long)]
        materialize: Option<PathBuf>,
        /// Evaluate one rotation `v:label` of the output graph.
        #[arg(long)]
        rot: Option<String>,
    },
    /// Evaluate the rotation map of an explicit graph file.
    Rot {
        #[arg(long)]
        graph: PathBuf,
        /// Slot `v:label`.
        #[arg(long)]
        slot: String,
    },
    /// Materialize the walk-power output graph to a file.
    Materialize {
        #[command(flatten)]
        args: PowerArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure spectral approximation between two matrix files.
    Check {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Use the directed measure.
        #[arg(long)]
        dir: bool,
    },
    /// Spectral gap quality of a regular graph.
    Lambda {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Emit or verify expander family members.
    Expander {
        #[command(subcommand)]
        action: ExpanderAction,
    },
    /// Conductance of a vertex set under the r-step walk.
    Conductance {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated 1-indexed vertex ids.
        #[arg(long)]
        set: String,
        #[arg(long)]
        r: u64,
        /// Exact dense evaluation instead of the pipeline estimate.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_enum, default_value = "random")]
        mode: ModeArg,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, default_value = "10000000")]
        max_slots: u64,
    },
    /// Random-walk matrix polynomial, exact or approximated.
    Poly {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated coefficients summing to 1.
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_enum, default_value = "random")]
        mode: ModeArg,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, default_value = "10000000")]
        max_slots: u64,
        /// Write the matrix here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized odd-step sparsifier with a per-seed pass-rate report.
    OddStep {
        #[arg(long)]
        graph: PathBuf,
        /// Even-walk approximation (graph file, or weighted `u v w` file).
        #[arg(long)]
        even_approx: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, default_value = "100")]
        trials: u64,
        /// Odd walk length the output approximates.
        #[arg(long, default_value = "3")]
        r: u64,
        /// Write the first trial's weighted output graph here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the square / plus-one schedule for a walk length.
    Schedule {
        #[arg(long)]
        r: u64,
    },
    /// Replay the certified error bound for given parameters.
    Bound {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        mu: f64,
        /// Forward quality of the base graph against the two-step walk.
        #[arg(long)]
        eps0: f64,
    },
}

#[derive(Subcommand)]
enum ExpanderAction {
    /// Materialize a family member to a graph file.
    Emit {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "random")]
        mode: ModeArg,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "10000000")]
        max_slots: u64,
    },
    /// Re-verify a family member and print its measured quality.
    Verify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "random")]
        mode: ModeArg,
        #[arg(long, default_value = "0")]
        seed: u64,
    },
}

fn family_config() -> FamilyConfig {
    let dir = std::env::var_os("WALKSPACE_CACHE")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("cache"));
    FamilyConfig { cache_dir: Some(dir), ..FamilyConfig::default() }
}

fn read_graph(path: &PathBuf) -> Result<LabeledMultigraph> {
    textio::parse_graph(&std::fs::read_to_string(path)?)
}

fn parse_slot(text: &str) -> Result<EdgeSlot> {
    let (v, l) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("slot {text:?} must be v:label")))?;
    Ok(EdgeSlot::new(
        v.trim().parse().map_err(|e| Error::Parse(format!("slot vertex: {e}")))?,
        l.trim().parse().map_err(|e| Error::Parse(format!("slot label: {e}")))?,
    ))
}

/// Accept matrices that are symmetric up to floating-point dust (files
/// written by other tools often carry a last-ulp asymmetry); anything
/// beyond the tolerance is a genuine shape error.
fn symmetric_within_tol(m: Matrix<f64>) -> Result<SymmetricMatrix<f64>> {
    let tol = 1e-9 * m.max_abs().max(1.0);
    let asym = m.asymmetry();
    if asym > tol {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(m.symmetrized())
}

fn print_ledger(ledger: &walkspace::walk::ErrorLedger) {
    for (i, (_step, bound)) in ledger.per_step.iter().enumerate() {
        println!("step {}: bound={}", i + 1, g17(*bound));
    }
    println!("eps_total={}", g17(ledger.eps_total));
}

/// Weighted or unweighted even-approximation file -> adjacency matrix.
fn read_even_adjacency(path: &PathBuf) -> Result<SymmetricMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty even-approx file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse("even-approx header must be `n m`".into()));
    }
    let weighted = lines.next().map(|l| l.split_whitespace().count() == 3).unwrap_or(false);
    if weighted {
        let (n, edges) = textio::parse_weighted_graph(&text)?;
        let mut a = Matrix::zeros(n);
        for (u, v, w) in edges {
            if u < 1 || u > n || v < 1 || v > n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
            if u == v {
                a[(u - 1, u - 1)] += w;
            } else {
                a[(u - 1, v - 1)] += w;
                a[(v - 1, u - 1)] += w;
            }
        }
        SymmetricMatrix::try_new(a)
    } else {
        Ok(textio::parse_graph(&text)?.adjacency())
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Power { args, materialize, rot } => {
            let g = Arc::new(read_graph(&args.graph)?);
            let oracle = approx_power(g, &args.params())?;
            print_ledger(&oracle.ledger);
            println!("peak_state_bytes={}", oracle.peak_state_bytes());
            if let Some(cert) = oracle.psd_certificate {
                println!("psd_certificate={}", g17(cert));
            }
            if let Some(slot) = rot {
                let s = parse_slot(&slot)?;
                let t = oracle.rot(s)?;
                println!("rot {}:{} -> {}:{}", s.vertex, s.label, t.vertex, t.label);
            }
            if let Some(out) = materialize {
                let mat = oracle.materialize(args.max_slots)?;
                std::fs::write(&out, textio::write_graph(&mat))?;
                println!("slots={}", mat.total_slot_count());
            }
            Ok(())
        }
        Command::Rot { graph, slot } => {
            let g = read_graph(&graph)?;
            let s = parse_slot(&slot)?;
            let t = g.rot(s)?;
            println!("rot {}:{} -> {}:{}", s.vertex, s.label, t.vertex, t.label);
            Ok(())
        }
        Command::Materialize { args, out } => {
            let g = Arc::new(read_graph(&args.graph)?);
            let oracle = approx_power(g, &args.params())?;
            let mat = oracle.materialize(args.max_slots)?;
            std::fs::write(&out, textio::write_graph(&mat))?;
            print_ledger(&oracle.ledger);
            println!("slots={}", mat.total_slot_count());
            Ok(())
        }
        Command::Check { a, b, dir } => {
            let ma = textio::parse_matrix(&std::fs::read_to_string(a)?)?;
            let mb = textio::parse_matrix(&std::fs::read_to_string(b)?)?;
            let report = if dir {
                measure_dir_approx(&ma, &mb)?
            } else {
                measure_sym_approx(&symmetric_within_tol(ma)?, &symmetric_within_tol(mb)?)?
            };
            println!("{report}");
            Ok(())
        }
        Command::Lambda { graph } => {
            let g = read_graph(&graph)?;
            println!("{}", g17(walkspace::spectral::lambda_of::<f64>(&g)?));
            Ok(())
        }
        Command::Expander { action } => match action {
            ExpanderAction::Emit { n, lambda, mode, seed, out, max_slots } => {
                let family = build_family(lambda, mode.into(), seed, family_config())?;
                let member = family.member(n)?;
                let mat = walkspace::rotgraph::materialize(&*member, max_slots)?;
                std::fs::write(&out, textio::write_graph(&mat))?;
                println!("degree={} lambda_bound={}", family.degree(), g17(family.lambda_bound()));
                Ok(())
            }
            ExpanderAction::Verify { n, lambda, mode, seed } => {
                let family = build_family(lambda, mode.into(), seed, family_config())?;
                let measured = family.verify_member(n)?;
                println!(
                    "lambda={} bound={} degree={} provenance={}",
                    g17(measured),
                    g17(family.lambda_bound()),
                    family.degree(),
                    family.provenance()
                );
                Ok(())
            }
        },
        Command::Conductance { graph, set, r, exact, eps, lambda, mode, seed, max_slots } => {
            let g = Arc::new(read_graph(&graph)?);
            let s = VertexSet::parse(&set, &g)?;
            if exact {
                println!("{}", g17(stats::conductance_exact(&g, &s, r)));
            } else {
                let eps = eps.ok_or_else(|| Error::invalid("--eps required without --exact"))?;
                let mut params = PowerParams::new(r, eps).seeded(seed);
                params.mode = mode.into();
                params.family_config = family_config();
                if let Some(lambda) = lambda {
                    params = params.relaxed(lambda);
                }
                let (estimate, ledger) = stats::conductance_estimate(g, &s, &params, max_slots)?;
                println!("{}", g17(estimate));
                println!("eps_total={}", g17(ledger.eps_total));
            }
            Ok(())
        }
        Command::Poly { graph, alpha, exact, eps, lambda, mode, seed, max_slots, out } => {
            let g = Arc::new(read_graph(&graph)?);
            let poly = PolySpec::parse(&alpha)?;
            let m = if exact {
                stats::rw_poly_exact(&g, &poly)
            } else {
                let eps = eps.ok_or_else(|| Error::invalid("--eps required without --exact"))?;
                let mut params = PowerParams::new(1, eps).seeded(seed);
                params.mode = mode.into();
                params.family_config = family_config();
                if let Some(lambda) = lambda {
                    params = params.relaxed(lambda);
                }
                stats::rw_poly_approx(g.clone(), &poly, &params, max_slots)?.laplacian
            };
            let text = textio::write_matrix(m.as_matrix());
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::OddStep { graph, even_approx, eps, seed, trials, r, out } => {
            if r % 2 == 0 {
                return Err(Error::invalid("odd-step needs odd r"));
            }
            let g = read_graph(&graph)?;
            let a_even = read_even_adjacency(&even_approx)?;
            let n = g.vertex_count();

            // Upstream contract: the even approximation must sit within
            // eps/8 of I - M^{r-1}.
            let row_sums = a_even.row_sums();
            let k = (row_sums[0] / g.degree_of(1) as f64).round();
            let m = g.normalized_adjacency::<f64>();
            let inv: Vec<f64> =
                (1..=n).map(|v| 1.0 / ((k * g.degree_of(v) as f64).sqrt())).collect();
            let m_even = SymmetricMatrix::from_fn_upper(n, |i, j| a_even[(i, j)] * inv[i] * inv[j]);
            let l_even_true = Matrix::identity(n).sub(&m.as_matrix().pow(r - 1)).symmetrized();
            let l_even = SymmetricMatrix::identity(n).sub(&m_even);
            let upstream = measure_sym_approx(&l_even_true, &l_even)?;
            if !upstream.kernel_ok || upstream.epsilon > eps / 8.0 + 1e-12 {
                return Err(Error::invalid(format!(
                    "upstream approximation too loose: measured {} > eps/8 = {}",
                    g17(upstream.epsilon),
                    g17(eps / 8.0)
                )));
            }

            let l_true = Matrix::identity(n).sub(&m.as_matrix().pow(r)).symmetrized();
            let mut passes = 0u64;
            let mut first_output = None;
            for t in 0..trials {
                let outcome = walkspace::sparsify::odd_step(
                    &g,
                    &a_even,
                    eps,
                    seed.wrapping_add(t),
                    walkspace::sparsify::DEFAULT_C_FACTOR,
                    walkspace::sparsify::DEFAULT_C_FINAL,
                )?;
                if let Ok(report) = measure_sym_approx(&l_true, &outcome.normalized) {
                    if report.kernel_ok && report.epsilon <= eps {
                        passes += 1;
                    }
                }
                if t == 0 {
                    first_output = Some(outcome);
                }
            }
            println!(
                "trials={} passes={} rate={}",
                trials,
                passes,
                g17(passes as f64 / trials as f64)
            );
            if let (Some(path), Some(outcome)) = (out, first_output) {
                let l = &outcome.normalized;
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u..n {
                        let w = if u == v { l[(u, v)] } else { -l[(u, v)] };
                        if w != 0.0 {
                            edges.push((u + 1, v + 1, w));
                        }
                    }
                }
                std::fs::write(path, textio::write_weighted_graph(n, &edges))?;
            }
            Ok(())
        }
        Command::Schedule { r } => {
            let schedule = bit_schedule(r, 0.0, 0.5)?;
            let words: Vec<String> = schedule.steps.iter().map(Step::to_string).collect();
            println!("{}", words.join(" "));
            Ok(())
        }
        Command::Bound { r, mu, eps0 } => {
            let schedule = bit_schedule(r, mu, 0.5)?;
            let ledger = certified_bound(&schedule, mu, eps0)?;
            print_ledger(&ledger);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
