//! Batch sweeps: for every (n, omega) cell, `trials` certified near and far
//! instances are run through one protocol and summarized as a CSV row.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use liniso_core::boolfn::generate_with;
use liniso_core::gf2::random_nonsingular_with;
use liniso_core::protocol::run_local;
use liniso_core::{FunctionFamily, GroundTruth, Limits, PromiseInstance, Protocol, Rational};

use crate::rational;

pub const HEADER: [&str; 8] = [
    "n",
    "family",
    "omega",
    "t_ceiling",
    "correct_frac",
    "mean_bits",
    "max_bits",
    "wall_ms",
];

/// Far instances are redrawn at most this many times per trial.
const FAR_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    Det,
    Rand,
    Public,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolKind,
    #[arg(long, value_parser = crate::family)]
    family: FunctionFamily,
    /// Arity range `a..b` (inclusive) or a single arity.
    #[arg(long, value_parser = n_range)]
    n: (usize, usize),
    /// Comma-separated p/q values.
    #[arg(long, value_parser = rational, value_delimiter = ',', required = true)]
    omega: Vec<Rational>,
    #[arg(long, value_parser = rational, default_value = "0")]
    eps: Rational,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Rounds of the public-coin protocol.
    #[arg(long, default_value_t = 7)]
    rounds: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write 0 in the wall_ms column so repeated runs are byte-identical.
    #[arg(long)]
    omit_timing: bool,
}

fn n_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => (parse(s)?, parse(s)?),
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Near,
    Far,
}

struct Cell {
    index: usize,
    n: usize,
    omega: Rational,
    side: Side,
}

#[derive(Debug, Default)]
struct Row {
    fields: Vec<String>,
    skipped: Option<String>,
}

fn validate(args: &ExperimentArgs, limits: &Limits) -> Result<()> {
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if args.protocol != ProtocolKind::Det && args.eps != Rational::from_integer(0.into()) {
        bail!("the rand and public protocols need --eps 0");
    }
    for n in args.n.0..=args.n.1 {
        if n > limits.gl_max_n {
            bail!(
                "n = {n} exceeds the GL guard {}; instances could not be certified",
                limits.gl_max_n
            );
        }
        if args.protocol != ProtocolKind::Public && n > limits.lp_max_n {
            bail!("n = {n} exceeds the LP guard {}", limits.lp_max_n);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        generate_with(&args.family, n, &mut rng)
            .with_context(|| format!("family {} at n = {n}", args.family))?;
    }
    for omega in &args.omega {
        if *omega <= Rational::from_integer(0.into()) || *omega >= Rational::from_integer(1.into()) {
            bail!("omega must lie in (0, 1), got {omega}");
        }
    }
    Ok(())
}

pub fn run(args: &ExperimentArgs, seed: u64, limits: &Limits) -> Result<()> {
    validate(args, limits)?;
    let mut cells = Vec::new();
    for n in args.n.0..=args.n.1 {
        for omega in &args.omega {
            for side in [Side::Near, Side::Far] {
                cells.push(Cell {
                    index: cells.len(),
                    n,
                    omega: omega.clone(),
                    side,
                });
            }
        }
    }
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|cell| run_cell(args, cell, seed, limits))
        .collect::<Result<_>>()?;

    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HEADER)?;
    for row in &rows {
        if let Some(reason) = &row.skipped {
            eprintln!("skipped cell {}: {reason}", row.fields[..3].join(","));
        }
        w.write_record(&row.fields)?;
    }
    w.flush()?;
    Ok(())
}

fn run_cell(args: &ExperimentArgs, cell: &Cell, seed: u64, limits: &Limits) -> Result<Row> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell.index as u64);
    let label = format!(
        "{}:{}",
        args.family,
        if cell.side == Side::Near { "near" } else { "far" }
    );
    let mut fields = vec![cell.n.to_string(), label, cell.omega.to_string()];

    let mut correct = 0usize;
    let mut bits = Vec::with_capacity(args.trials);
    let mut ceiling: Option<u64> = None;
    for _ in 0..args.trials {
        let Some(instance) = draw_instance(args, cell, &mut rng, limits)? else {
            fields.extend(["", "", "", "", ""].map(String::from));
            return Ok(Row {
                fields,
                skipped: Some(format!("no far instance in {FAR_ATTEMPTS} draws")),
            });
        };
        let protocol = match args.protocol {
            ProtocolKind::Det => Protocol::Deterministic,
            ProtocolKind::Rand => Protocol::PrivateCoin {
                seed_a: rng.random(),
                seed_b: rng.random(),
            },
            ProtocolKind::Public => Protocol::PublicCoin {
                seed: rng.random(),
                rounds: args.rounds,
            },
        };
        let t = run_local(&protocol, &instance, limits)?;
        if let Some(fault) = &t.fault {
            bail!("protocol fault in cell {}: {fault}", cell.index);
        }
        if t.total_bits() != t.bits_a_to_b() + t.bits_b_to_a() {
            bail!("bit counters disagree in cell {}", cell.index);
        }
        correct += usize::from(t.outcome.is_some() && t.outcome == instance.expected());
        bits.push(t.total_bits());
        for c in [t.stats.ceiling_a, t.stats.ceiling_b].into_iter().flatten() {
            ceiling = Some(ceiling.map_or(c, |m| m.max(c)));
        }
    }
    let trials = args.trials as f64;
    fields.push(ceiling.map(|c| c.to_string()).unwrap_or_default());
    fields.push(format!("{:.4}", correct as f64 / trials));
    fields.push(format!("{:.2}", bits.iter().sum::<u64>() as f64 / trials));
    fields.push(bits.iter().max().copied().unwrap_or(0).to_string());
    let wall = if args.omit_timing {
        0
    } else {
        start.elapsed().as_millis()
    };
    fields.push(wall.to_string());
    Ok(Row {
        fields,
        skipped: None,
    })
}

fn draw_instance(
    args: &ExperimentArgs,
    cell: &Cell,
    rng: &mut ChaCha8Rng,
    limits: &Limits,
) -> Result<Option<PromiseInstance>> {
    let f = generate_with(&args.family, cell.n, rng)?;
    match cell.side {
        Side::Near => {
            let g = f.compose_linear(&random_nonsingular_with(cell.n, rng))?;
            let inst = PromiseInstance::new(f, g, args.eps.clone(), cell.omega.clone(), limits)?;
            debug_assert_eq!(inst.ground_truth, GroundTruth::Near);
            Ok(Some(inst))
        }
        Side::Far => {
            for _ in 0..FAR_ATTEMPTS {
                let g = generate_with(&args.family, cell.n, rng)?;
                let inst =
                    PromiseInstance::new(f.clone(), g, args.eps.clone(), cell.omega.clone(), limits)?;
                if inst.ground_truth == GroundTruth::Far {
                    return Ok(Some(inst));
                }
            }
            Ok(None)
        }
    }
}
