use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use liniso_core::format::{parse_rational, read_truth_table, write_truth_table};
use liniso_core::gf2::GF2Vector;
use liniso_core::lindist::affine_distance;
use liniso_core::phimap::{ExactOracle, LinIsoOracle, ProtocolOracle};
use liniso_core::{
    approx_spectral_norm, canonical_form, construct_phi, generate, linear_distance,
    reduce_equ, spectral_norm, verify_phi, wht, BooleanFunction, FunctionFamily, Limits,
    PhiConstruction, Protocol, Rational,
};

mod experiment;
mod run;

#[derive(Parser)]
#[command(name = "liniso", version, about = "Linear isomorphism of Boolean functions: exact tools and protocol simulators")]
struct Cli {
    /// Base seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest n swept exhaustively over GL_n(F2).
    #[arg(long = "guard-n", global = true, default_value_t = Limits::default().gl_max_n)]
    guard_n: usize,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact spectral norm, and the gamma-approximate norm with --gamma.
    Norm {
        path: PathBuf,
        #[arg(long, value_parser = rational)]
        gamma: Option<Rational>,
    },
    /// Fourier coefficients, one `alpha coefficient` pair per line.
    Wht { path: PathBuf },
    /// Writes a member of a function family as a truth-table file.
    Gen {
        /// uniform-random, parity:<hex>, and-all, bent-ip, planted-junta:<r>
        #[arg(long, value_parser = family)]
        family: FunctionFamily,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lexicographically minimal table in the GL orbit, with its matrix.
    Canon {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact linear (or affine) distance and a minimizing matrix.
    Lindist {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        affine: bool,
    },
    /// Deterministic protocol.
    RunDet(run::RunArgs),
    /// Private-coin protocol (epsilon = 0).
    RunRand(run::RunArgs),
    /// Public-coin canonical-form equality protocol (epsilon = 0).
    RunPublic(run::RunArgs),
    /// Greedy Φ-map construction.
    Phimap {
        #[command(flatten)]
        phi: PhiArgs,
        #[arg(long)]
        verify: bool,
    },
    /// Decides EQU through a Φ-map and a linear isomorphism oracle.
    ReduceEqu {
        #[command(flatten)]
        phi: PhiArgs,
        /// Inputs as hex integers; all pairs when omitted.
        #[arg(long, value_parser = hex_u32)]
        a: Option<u32>,
        #[arg(long, value_parser = hex_u32)]
        b: Option<u32>,
        #[arg(long, default_value = "exact")]
        oracle: String,
        /// Rounds of the public-coin oracle.
        #[arg(long, default_value_t = 7)]
        rounds: usize,
    },
    /// Batch sweep over arities, omegas, and near/far instances; writes CSV.
    Experiment(experiment::ExperimentArgs),
}

#[derive(Args)]
struct PhiArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    ell: usize,
    #[arg(long, value_parser = rational)]
    omega: Rational,
}

pub(crate) fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn family(s: &str) -> Result<FunctionFamily, String> {
    s.parse().map_err(|e: liniso_core::Error| e.to_string())
}

fn hex_u32(s: &str) -> Result<u32, String> {
    u32::from_str_radix(s.trim_start_matches("0x"), 16).map_err(|e| e.to_string())
}

pub(crate) fn load(path: &Path) -> Result<BooleanFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_truth_table(&text).with_context(|| format!("{}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let limits = Limits::default().with_gl_max_n(cli.guard_n);
    let json = cli.json;
    match cli.command {
        Command::Norm { path, gamma } => {
            let f = load(&path)?;
            let norm = spectral_norm(&f);
            let approx = gamma
                .map(|g| approx_spectral_norm(&f, &g, &limits))
                .transpose()?;
            if json {
                let mut v = json!({"n": f.arity(), "spectral_norm": norm.to_string()});
                if let Some(w) = &approx {
                    v["gamma"] = json!(w.gamma.to_string());
                    v["approx"] = json!(w.value.to_string());
                    v["approx_f64"] = json!(w.value_f64());
                    v["ceiling"] = json!(w.ceiling());
                    v["exact_lp"] = json!(w.exact);
                    v["pivots"] = json!(w.pivots);
                }
                println!("{v}");
            } else {
                println!("spectral_norm = {norm}");
                if let Some(w) = &approx {
                    println!("approx = {} (~{:.9})", w.value, w.value_f64());
                    println!("ceiling = {}", w.ceiling());
                    println!(
                        "witness: {} nonzero coefficients, {} pivots, {} arithmetic",
                        w.spectrum().support().len(),
                        w.pivots,
                        if w.exact { "exact" } else { "f64" }
                    );
                }
            }
        }
        Command::Wht { path } => {
            let s = wht(&load(&path)?);
            if json {
                let coeffs: Vec<String> = s.coeffs().iter().map(|c| c.to_string()).collect();
                println!("{}", json!({"n": s.arity(), "coefficients": coeffs}));
            } else {
                for (alpha, c) in s.coeffs().iter().enumerate() {
                    println!("{alpha:x} {c}");
                }
            }
        }
        Command::Gen { family, n, out } => {
            let f = generate(&family, n, cli.seed)?;
            emit(out.as_deref(), &write_truth_table(&f))?;
        }
        Command::Canon { path, out } => {
            let (c, m) = canonical_form(&load(&path)?, &limits)?;
            if json {
                println!(
                    "{}",
                    json!({"table": write_truth_table(&c), "matrix": m.to_text()})
                );
            } else {
                emit(out.as_deref(), &write_truth_table(&c))?;
                if out.is_some() {
                    print!("{}", m.to_text());
                } else {
                    eprint!("witness matrix:\n{}", m.to_text());
                }
            }
        }
        Command::Lindist { f, g, affine } => {
            let (f, g) = (load(&f)?, load(&g)?);
            let (value, matrix, shift) = if affine {
                let r = affine_distance(&f, &g, &limits)?;
                (r.value, r.matrix, Some(r.shift))
            } else {
                let r = linear_distance(&f, &g, &limits)?;
                (r.value, r.witness, None)
            };
            if json {
                let mut v = json!({"value": value.to_string(), "matrix": matrix.to_text()});
                if let Some(a) = &shift {
                    v["shift"] = json!(a.to_string());
                }
                println!("{v}");
            } else {
                println!("value = {value}");
                print!("{}", matrix.to_text());
                if let Some(a) = shift {
                    println!("shift = {a}");
                }
            }
        }
        Command::RunDet(args) => run::run(Protocol::Deterministic, &args, &limits, json)?,
        Command::RunRand(args) => run::run(
            Protocol::PrivateCoin {
                seed_a: args.seed_a.unwrap_or(cli.seed),
                seed_b: args.seed_b.unwrap_or(cli.seed.wrapping_add(1)),
            },
            &args,
            &limits,
            json,
        )?,
        Command::RunPublic(args) => run::run(
            Protocol::PublicCoin {
                seed: cli.seed,
                rounds: args.rounds,
            },
            &args,
            &limits,
            json,
        )?,
        Command::Phimap { phi, verify } => {
            let map = build_phi(&phi, &limits)?;
            print!("{}", map.to_text());
            if verify {
                print!("{}", verify_phi(&map, &limits)?);
            }
        }
        Command::ReduceEqu {
            phi,
            a,
            b,
            oracle,
            rounds,
        } => {
            let map = build_phi(&phi, &limits)?;
            let mut oracle: Box<dyn LinIsoOracle> = match oracle.as_str() {
                "exact" => Box::new(ExactOracle { limits }),
                "det" => Box::new(ProtocolOracle {
                    protocol: Protocol::Deterministic,
                    limits,
                }),
                "rand" => Box::new(ProtocolOracle {
                    protocol: Protocol::PrivateCoin {
                        seed_a: cli.seed,
                        seed_b: cli.seed.wrapping_add(1),
                    },
                    limits,
                }),
                "public" => Box::new(ProtocolOracle {
                    protocol: Protocol::PublicCoin {
                        seed: cli.seed,
                        rounds,
                    },
                    limits,
                }),
                other => bail!("unknown oracle {other:?}; expected exact, public, det, or rand"),
            };
            let inputs = 1u32 << phi.n;
            let pairs: Vec<(u32, u32)> = match (a, b) {
                (Some(a), Some(b)) => vec![(a, b)],
                (None, None) => (0..inputs).flat_map(|a| (0..inputs).map(move |b| (a, b))).collect(),
                _ => bail!("give both --a and --b, or neither"),
            };
            let mut agree = 0;
            for &(a, b) in &pairs {
                let (va, vb) = (GF2Vector::new(phi.n, a)?, GF2Vector::new(phi.n, b)?);
                let equal = reduce_equ(&va, &vb, &map, oracle.as_mut())?;
                agree += usize::from(equal == (a == b));
                println!("{a:x} {b:x} {}", if equal { "equal" } else { "different" });
            }
            println!("agreement = {agree}/{}", pairs.len());
        }
        Command::Experiment(args) => experiment::run(&args, cli.seed, &limits)?,
    }
    Ok(())
}

fn build_phi(args: &PhiArgs, limits: &Limits) -> Result<liniso_core::PhiMap> {
    match construct_phi(args.n, args.ell, &args.omega, limits)? {
        PhiConstruction::Success(map) => Ok(map),
        PhiConstruction::Fail { assigned } => bail!(
            "construction failed: admissible tables ran out after {assigned} of {} inputs",
            1u64 << args.n
        ),
    }
}
