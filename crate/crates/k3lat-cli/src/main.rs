//! `k3lat`: lattices, discriminant forms, root systems, Niemeier lattices and the table verifier.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use k3lat::degen::{genus_lookup, load_tables, verify_all, DegenerationRecord, VerifyOptions};
use k3lat::niemeier::{build_niemeier_from, complement_report, load_glue, load_jmap, parse_vectors};
use k3lat::qforms::{
    brute_force_isomorphic, lattice_symbol, parse_symbol, symbols_equivalent, FiniteQuadraticForm, GenusSymbol,
};
use k3lat::roots::classify_root_system;
use k3lat::Lattice;

#[derive(Parser)]
#[command(name = "k3lat", version, about = "Even lattices, genus symbols and K3 degeneration tables")]
struct Cli {
    /// Directory with the table transcriptions, glue.txt and jmap.txt.
    #[arg(long, global = true, env = "K3LAT_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Largest group order handed to the brute-force isomorphism oracle.
    #[arg(long, global = true, default_value_t = 1 << 12, value_parser = clap::value_parser!(u64).range(4..))]
    oracle_bound: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,
    /// Also consider rows flagged as old cases.
    #[arg(long, global = true)]
    include_old: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, determinant, signature and discriminant form of a lattice file.
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    Qform {
        #[command(subcommand)]
        cmd: QformCmd,
    },
    Roots {
        #[command(subcommand)]
        cmd: RootsCmd,
    },
    Niemeier {
        #[command(subcommand)]
        cmd: NiemeierCmd,
    },
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
    /// Table rows whose S has the given rank and an equivalent discriminant form.
    Lookup { rank: usize, symbol: String },
}

#[derive(Subcommand)]
enum LatticeCmd {
    Info { file: PathBuf },
}

#[derive(Subcommand)]
enum QformCmd {
    /// Genus symbol of the discriminant form of a lattice file.
    Symbol { file: PathBuf },
    /// Orthogonal sum of two symbols.
    Sum { a: String, b: String },
    /// Whether two symbols denote isomorphic forms.
    Eq { a: String, b: String },
}

#[derive(Subcommand)]
enum RootsCmd {
    Classify { file: PathBuf },
}

#[derive(Subcommand)]
enum NiemeierCmd {
    /// Builds the Niemeier lattice with the given root system, e.g. `A11+D7+E6`.
    Build { root_system: String },
    /// S = primitive closure of the given vectors and its complement.
    /// Vectors are in simple-root coordinates of the root sublattice, one per line.
    Complement { root_system: String, vectors: PathBuf },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Tables {
        #[arg(long, value_parser = ["d6", "c4", "codim1"])]
        only: Option<String>,
    },
}

/// Ordered fields of one output object.
type Fields = Vec<(&'static str, Value)>;

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(text_value).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Prints one object: JSON on one line, or bare value / `key: value` lines as text.
fn emit(out: Output, fields: &Fields) {
    match out {
        Output::Json => {
            let m: Map<String, Value> = fields.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
            println!("{}", Value::Object(m));
        }
        Output::Text if fields.len() == 1 => println!("{}", text_value(&fields[0].1)),
        Output::Text => {
            for (k, v) in fields {
                println!("{k}: {}", text_value(v));
            }
        }
    }
}

fn symbol(text: &str) -> Result<GenusSymbol> {
    if text == "1" {
        return Ok(GenusSymbol::empty());
    }
    parse_symbol(text).with_context(|| format!("bad symbol {text:?}"))
}

fn read_lattice(path: &Path) -> Result<Lattice> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Lattice::from_json(&text).with_context(|| format!("{}", path.display()))
}

fn data_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli.data_dir.clone().unwrap_or_else(k3lat::default_data_dir);
    if !dir.is_dir() {
        bail!("data directory {} does not exist", dir.display());
    }
    Ok(dir)
}

fn roots_text(roots: &[Vec<i64>]) -> Value {
    Value::Array(
        roots.iter().map(|r| Value::String(r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))).collect(),
    )
}

fn record_fields(r: &DegenerationRecord) -> Fields {
    vec![
        ("key", json!(r.key())),
        ("table", json!(r.table)),
        ("group", json!(format!("n={} {}", r.group_n, r.group_name))),
        ("degeneration", json!(r.deg.as_ref().map_or("-".to_string(), |d| d.to_string()))),
        ("rk_s", json!(r.rk_s)),
        ("q_s", json!(r.q_s.to_string())),
        ("unique", json!(r.unique_flag)),
        ("old", json!(r.old_flag)),
        ("source", json!(format!("{}:{}", r.source.file, r.source.line))),
    ]
}

fn run(cli: &Cli) -> Result<bool> {
    let out = cli.output;
    match &cli.command {
        Command::Lattice { cmd: LatticeCmd::Info { file } } => {
            let l = read_lattice(file)?;
            let (pos, neg) = l.signature()?;
            let orders: Vec<Value> = l.discriminant_group().orders.iter().map(|o| json!(o.to_string())).collect();
            let sym = if l.is_even() { lattice_symbol(&l)?.to_string() } else { "-".to_string() };
            emit(
                out,
                &vec![
                    ("name", json!(l.name().unwrap_or("-"))),
                    ("rank", json!(l.rank())),
                    ("determinant", json!(l.determinant().to_string())),
                    ("signature", json!(format!("({pos},{neg})"))),
                    ("even", json!(l.is_even())),
                    ("discriminant_group", Value::Array(orders)),
                    ("qform", json!(sym)),
                ],
            );
        }
        Command::Qform { cmd } => match cmd {
            QformCmd::Symbol { file } => {
                let s = lattice_symbol(&read_lattice(file)?)?;
                emit(out, &vec![("symbol", json!(s.to_string()))]);
            }
            QformCmd::Sum { a, b } => {
                emit(out, &vec![("sum", json!(symbol(a)?.sum(&symbol(b)?).to_string()))]);
            }
            QformCmd::Eq { a, b } => {
                let (a, b) = (symbol(a)?, symbol(b)?);
                let eq = symbols_equivalent(&a, &b);
                // Cross-check against the oracle when both forms are small enough.
                let small = |s: &GenusSymbol| s.group_order().is_some_and(|o| o <= u128::from(cli.oracle_bound));
                if small(&a) && small(&b) {
                    let (qa, qb) = (FiniteQuadraticForm::from_symbol(&a)?, FiniteQuadraticForm::from_symbol(&b)?);
                    if brute_force_isomorphic(&qa, &qb, cli.oracle_bound)? != eq {
                        bail!("oracle disagrees with symbol comparison for {a} and {b}");
                    }
                }
                emit(out, &vec![("equivalent", json!(eq))]);
            }
        },
        Command::Roots { cmd: RootsCmd::Classify { file } } => {
            let rs = classify_root_system(&read_lattice(file)?)?;
            emit(
                out,
                &vec![
                    ("root_type", json!(rs.root_type.to_string())),
                    ("roots", json!(rs.roots.len())),
                    ("simple_roots", roots_text(&rs.simple_roots)),
                ],
            );
        }
        Command::Niemeier { cmd } => {
            let glue = load_glue(&data_dir(cli)?)?;
            match cmd {
                NiemeierCmd::Build { root_system } => {
                    let n = build_niemeier_from(&glue, root_system)?;
                    emit(
                        out,
                        &vec![
                            ("name", json!(n.name())),
                            ("rank", json!(n.lattice.rank())),
                            ("determinant", json!(n.lattice.determinant().to_string())),
                            ("even", json!(n.lattice.is_even())),
                            ("roots", json!(n.roots().len())),
                            ("glue_code_size", json!(n.code_size)),
                        ],
                    );
                }
                NiemeierCmd::Complement { root_system, vectors } => {
                    let n = build_niemeier_from(&glue, root_system)?;
                    let text = std::fs::read_to_string(vectors)
                        .with_context(|| format!("reading {}", vectors.display()))?;
                    let gens = parse_vectors(&text)?
                        .iter()
                        .map(|v| n.from_root_coords(v))
                        .collect::<k3lat::Result<Vec<_>>>()?;
                    let rep = complement_report(&n, &gens)?;
                    emit(
                        out,
                        &vec![
                            ("s_rank", json!(rep.s_rank)),
                            ("s_qform", json!(rep.s_qsymbol.to_string())),
                            ("t_rank", json!(rep.t_rank)),
                            ("t_qform", json!(rep.t_qsymbol.to_string())),
                            ("t_root_type", json!(rep.t_root_type.to_string())),
                            ("ranks_add_up", json!(rep.ranks_add_up)),
                            ("forms_dual", json!(rep.forms_dual)),
                        ],
                    );
                    return Ok(rep.consistent());
                }
            }
        }
        Command::Verify { cmd: VerifyCmd::Tables { only } } => {
            let dir = data_dir(cli)?;
            let tables = load_tables(&dir)?;
            let opts = VerifyOptions { only: only.clone(), include_old: cli.include_old, jmap: Some(load_jmap(&dir)?) };
            let lines = verify_all(&tables, &opts)?;
            for l in &lines {
                match out {
                    Output::Json => println!("{}", l.to_json()),
                    Output::Text => println!("{}", l.to_text()),
                }
            }
            let failed = lines.iter().filter(|l| l.is_failure()).count();
            let warned = lines.iter().filter(|l| !l.pass && l.advisory).count();
            eprintln!("{} checks, {failed} failed, {warned} advisory warnings", lines.len());
            return Ok(failed == 0);
        }
        Command::Lookup { rank, symbol: s } => {
            let tables = load_tables(&data_dir(cli)?)?;
            let found = genus_lookup(&tables, *rank, &symbol(s)?, cli.include_old);
            if found.is_empty() {
                eprintln!("no match");
            }
            for r in found {
                let f = record_fields(r);
                match out {
                    Output::Json => emit(out, &f),
                    Output::Text => println!("{}", f.iter().map(|(_, v)| text_value(v)).collect::<Vec<_>>().join("\t")),
                }
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
