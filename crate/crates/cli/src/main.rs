use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use quadlat::fp::field::is_prime;
use quadlat::fp::{
    quadric_line_count, FpQuadSpace, WittType, DEFAULT_MAX_ELEMENTS, DEFAULT_MAX_POINTS,
};
use quadlat::hecke::{grow_unique, k3_isogeny, shrink_fiber};
use quadlat::io;
use quadlat::lattice::{inertia, standard_lattice};
use quadlat::padic::{enumerate_neighbors_with_precision, DEFAULT_PRECISION};
use quadlat::verify::{self, Suite, VerifyParams};
use quadlat::{Error, QuadLattice};

#[derive(Parser)]
#[command(
    name = "quadlat",
    version,
    about = "Exact quadratic lattices, p-neighbors and verification suites"
)]
struct Cli {
    /// Guard on the number of projective points enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: u64,
    /// Guard on the number of group elements enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ELEMENTS)]
    max_elements: u64,
    /// Working p-adic precision for Hensel lifts.
    #[arg(long, global = true, env = "QUADLAT_PRECISION", default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice invariants and construction.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Isotropic lines of a quadratic space over F_p.
    Quadric {
        #[command(subcommand)]
        command: QuadricCommand,
    },
    /// Self-dual p-neighbors of a lattice, one per isotropic line.
    Neighbors {
        lattice: String,
        #[arg(long)]
        p: u64,
    },
    /// Self-dual neighbors of N meeting the image of Λ in the image of Λ̃.
    Shrink {
        lattice: String,
        embedding: String,
        pair: String,
        #[arg(long)]
        p: u64,
    },
    /// The unique self-dual neighbor of Ñ containing the image of Λ.
    Grow {
        ntilde: String,
        embedding: String,
        pair: String,
        #[arg(long)]
        p: u64,
    },
    /// Polarized lattice of degree p²d isogenous to (K3, e + d·f).
    K3Isogeny {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        p: u64,
    },
    /// Run a named verification suite.
    Verify {
        suite: String,
        /// Primes to test, comma separated.
        #[arg(long, value_delimiter = ',')]
        p: Vec<u64>,
        #[arg(long)]
        max_rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Rank, signature, determinant, discriminant group, self-dual primes.
    Info {
        lattice: String,
        /// Largest prime tested for self-duality.
        #[arg(long, default_value_t = 100)]
        bound: u64,
    },
    /// Serialize a standard lattice such as `H+H+E8(-1)`.
    Standard { expr: String },
}

#[derive(Subcommand)]
enum QuadricCommand {
    /// Enumerate the isotropic lines.
    Lines {
        space: String,
        #[arg(long)]
        p: u64,
    },
}

enum Failure {
    Input(Error),
    Verification(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

/// A file path if one exists, otherwise the argument itself.
fn read_arg(arg: &str) -> Result<String, Error> {
    if Path::new(arg).is_file() {
        fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn load_lattice(arg: &str) -> Result<QuadLattice, Error> {
    io::parse_lattice(&read_arg(arg)?)
}

fn load_json(arg: &str) -> Result<Value, Error> {
    io::parse(&read_arg(arg)?)
}

fn witt_name(w: WittType) -> &'static str {
    match w {
        WittType::Split => "split",
        WittType::NonSplit => "non-split",
        WittType::Odd => "odd",
    }
}

fn lattice_info(l: &QuadLattice, bound: u64) -> Result<Value, Error> {
    let (pos, neg, zero) = inertia(&l.gram());
    let disc = l.discriminant_group()?;
    let self_dual: Vec<u64> = (2..=bound)
        .filter(|&p| is_prime(p) && l.is_self_dual_at(p))
        .collect();
    Ok(json!({
        "lattice": io::lattice_to_json(l),
        "rank": l.rank(),
        "signature": { "positive": pos, "negative": neg, "null": zero },
        "det": io::int_to_json(&l.det()),
        "discriminant_group": {
            "free_rank": disc.free_rank,
            "torsion": disc.torsion.iter().map(io::int_to_json).collect::<Vec<_>>(),
        },
        "self_dual_primes": { "bound": bound, "primes": self_dual },
    }))
}

fn quadric_lines(arg: &str, p: u64, max_points: u64) -> Result<Value, Error> {
    let text = read_arg(arg)?;
    let space = match io::parse(&text) {
        Ok(v) if v.get("dim").is_some() => {
            let s = io::space_from_json(&v)?;
            if s.p() != p {
                return Err(Error::InvalidParameter(format!(
                    "space is over F_{}, not F_{p}",
                    s.p()
                )));
            }
            s
        }
        _ => FpQuadSpace::reduction(&io::parse_lattice(&text)?, p)?,
    };
    let lines = space.enumerate_isotropic_lines(max_points)?;
    let kind = if space.is_nondegenerate() {
        Some(space.witt_type()?)
    } else {
        None
    };
    Ok(json!({
        "space": io::space_to_json(&space),
        "nondegenerate": space.is_nondegenerate(),
        "witt_type": kind.map(witt_name),
        "closed_form_count": kind.map(|k| quadric_line_count(p, space.dim(), k).to_string()),
        "count": lines.len(),
        "lines": lines.iter().map(|l| l.generator().to_vec()).collect::<Vec<_>>(),
    }))
}

fn run(cli: Cli) -> Result<Value, Failure> {
    match cli.command {
        Command::Lattice {
            command: LatticeCommand::Info { lattice, bound },
        } => Ok(lattice_info(&load_lattice(&lattice)?, bound)?),
        Command::Lattice {
            command: LatticeCommand::Standard { expr },
        } => Ok(io::lattice_to_json(&standard_lattice(&expr)?)),
        Command::Quadric {
            command: QuadricCommand::Lines { space, p },
        } => Ok(quadric_lines(&space, p, cli.max_points)?),
        Command::Neighbors { lattice, p } => {
            let n = load_lattice(&lattice)?;
            let nbs = enumerate_neighbors_with_precision(&n, p, cli.max_points, cli.precision)?;
            Ok(json!({
                "lattice": io::lattice_to_json(&n),
                "p": p,
                "count": nbs.len(),
                "neighbors": nbs.iter().map(|nb| json!({
                    "line": nb.line.generator(),
                    "neighbor": io::plattice_to_json(&nb.lattice),
                })).collect::<Vec<_>>(),
            }))
        }
        Command::Shrink {
            lattice,
            embedding,
            pair,
            p,
        } => {
            let n = load_lattice(&lattice)?;
            let e = io::embedding_from_json(&load_json(&embedding)?)?;
            let pair = io::minimal_pair_from_json(&load_json(&pair)?, Some(p))?;
            if pair.p() != p {
                return Err(Error::InvalidParameter("pair prime differs from --p".into()).into());
            }
            let fiber = shrink_fiber(&n, &e, &pair, cli.max_points)?;
            Ok(json!({
                "p": p,
                "count": fiber.len(),
                "fiber": fiber.iter().map(io::plattice_to_json).collect::<Vec<_>>(),
            }))
        }
        Command::Grow {
            ntilde,
            embedding,
            pair,
            p,
        } => {
            let nt = io::plattice_from_json(&load_json(&ntilde)?)?;
            let e = io::embedding_from_json(&load_json(&embedding)?)?;
            let pair = io::minimal_pair_from_json(&load_json(&pair)?, Some(p))?;
            if pair.p() != p || nt.p() != p {
                return Err(Error::InvalidParameter("input primes differ from --p".into()).into());
            }
            let grown = grow_unique(&nt, &e, &pair, cli.max_points).map_err(|err| match err {
                Error::InvariantViolation(msg) => {
                    Failure::Verification(json!({ "p": p, "error": msg }))
                }
                other => Failure::Input(other),
            })?;
            Ok(json!({ "p": p, "lattice": io::plattice_to_json(&grown) }))
        }
        Command::K3Isogeny { d, p } => {
            let k = k3_isogeny(d, p)?;
            let mut doc = io::k3_to_json(&k);
            doc["d"] = json!(d);
            doc["p"] = json!(p);
            doc["q_xi"] = io::int_to_json(&k.degree());
            Ok(doc)
        }
        Command::Verify {
            suite,
            p,
            max_rank,
            seed,
        } => {
            let suite: Suite = suite.parse()?;
            let params = VerifyParams {
                primes: (!p.is_empty()).then_some(p),
                max_rank,
                seed,
                max_points: cli.max_points,
                max_elements: cli.max_elements,
            };
            let report = verify::run(suite, &params)?;
            if report.passed() {
                Ok(report.to_json())
            } else {
                Err(Failure::Verification(report.to_json()))
            }
        }
    }
}

fn print(doc: &Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(doc).expect("serializable")
    );
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(doc) => {
            print(&doc);
            ExitCode::SUCCESS
        }
        Err(Failure::Verification(doc)) => {
            print(&doc);
            eprintln!("quadlat: verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("quadlat: {e}");
            ExitCode::from(2)
        }
    }
}
