use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use smooth_mw::fibration::{self, Base, FibrationDescription};
use smooth_mw::json::matrix_to_value;
use smooth_mw::lattice::{
    classify_even_unimodular_indefinite, dynkin_components, eichler, make_standard, roots, simple_roots,
    IsotropicQuotient,
};
use smooth_mw::mapclass::{word_report, ModPiWord};
use smooth_mw::monodromy::{classify_sl2, find_equinodal_pairs, product_monodromy, CycleTuple};
use smooth_mw::reproduce;
use smooth_mw::unipotent::{find_primitive_isotropic_fixed, is_unipotent, parse_generator_word, parse_vector};
use smooth_mw::{Error, Lattice};

#[derive(Parser, Debug)]
#[command(name = "smooth-mw", version, about = "Smooth Mordell-Weil groups of nodal genus-one fibrations")]
struct Cli {
    /// Pretty-print JSON; `reproduce` prints a table instead.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mordell-Weil groups of a fibration description.
    #[command(subcommand)]
    Mw(MwCommand),
    /// Lattice constructions and invariants.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Eichler transformations.
    #[command(subcommand)]
    Eichler(EichlerCommand),
    /// The mapping class group of the equinodal disk.
    #[command(subcommand)]
    Modpi(ModpiCommand),
    /// Monodromy of a cycle tuple.
    #[command(subcommand)]
    Monodromy(MonodromyCommand),
    /// Unipotent isometries.
    #[command(subcommand)]
    Unipotent(UnipotentCommand),
    /// Run the acceptance checks.
    Reproduce,
}

#[derive(Subcommand, Debug)]
enum MwCommand {
    Disk { file: PathBuf },
    Sphere { file: PathBuf },
    Glue { first: PathBuf, second: PathBuf },
}

#[derive(Subcommand, Debug)]
enum LatticeCommand {
    /// Build a lattice from an expression such as "U ⊥ 2E8(-1)" or "Lambda(2)".
    Make { expr: String },
    Quotient {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        e: Option<String>,
    },
    Classify { file: PathBuf },
    Roots {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "-2")]
        norm: BigInt,
    },
}

#[derive(Subcommand, Debug)]
enum EichlerCommand {
    Apply {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        e: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum ModpiCommand {
    /// Evaluate a word over F, F', t, t' (primes are inverses).
    Eval { word: String },
}

#[derive(Subcommand, Debug)]
enum MonodromyCommand {
    Product { file: PathBuf },
    Classify { file: PathBuf },
    /// Search for adjacent equinodal cycles up to a number of Hurwitz moves.
    Hurwitz {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        moves: usize,
    },
}

#[derive(Subcommand, Debug)]
enum UnipotentCommand {
    /// Find a primitive isotropic vector fixed by a unipotent isometry.
    Fix {
        /// Construction expression, or a path to a lattice JSON file.
        #[arg(long)]
        lattice: String,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 4)]
        bound: u32,
    },
}

/// What a command produces: a JSON document and an exit code.
struct Output {
    code: u8,
    body: Value,
}

impl Output {
    fn ok(body: Value) -> Self {
        Output { code: 0, body }
    }

    fn not_found(message: &str, detail: Value) -> Self {
        Output { code: 3, body: json!({"error": {"kind": "not_found", "message": message}, "search": detail}) }
    }

    fn failure(kind: &str, message: String, extra: Option<Value>) -> Self {
        let mut error = json!({"kind": kind, "message": message});
        if let Some(extra) = extra {
            error["details"] = extra;
        }
        Output { code: 2, body: json!({ "error": error }) }
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

/// A description file, or a bare array of cycles for the given base.
fn read_description(path: &Path, base: Option<Base>) -> Result<FibrationDescription> {
    let value = read_json(path)?;
    let value = match (&value, base) {
        (Value::Array(_), Some(base)) => json!({"base": base.name(), "cycles": value}),
        (Value::Array(_), None) => json!({"base": "disk", "cycles": value}),
        _ => value,
    };
    Ok(FibrationDescription::from_json(&value)?)
}

fn read_lattice(path: &Path) -> Result<Lattice> {
    Ok(Lattice::from_json(&read_json(path)?)?)
}

fn lattice_arg(spec: &str) -> Result<Lattice> {
    let path = Path::new(spec);
    if path.is_file() {
        read_lattice(path)
    } else {
        Ok(make_standard(spec)?)
    }
}

fn marked_or(lattice: &Lattice, given: Option<&str>) -> Result<smooth_mw::LatticeVector> {
    match given {
        Some(text) => Ok(parse_vector(lattice, text)?),
        None => lattice
            .fiber_class()
            .cloned()
            .ok_or_else(|| Error::Precondition("no --e given and the lattice has no marked vector e".into()).into()),
    }
}

fn validated(f: FibrationDescription) -> Result<FibrationDescription> {
    let v = fibration::validate(&f);
    if v.is_ok() {
        Ok(f)
    } else {
        Err(Error::InvalidDescription(v.violations).into())
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn execute(command: Command) -> Result<Output> {
    Ok(match command {
        Command::Mw(MwCommand::Disk { file }) => {
            let f = validated(read_description(&file, Some(Base::Disk))?)?;
            Output::ok(to_value(&fibration::mw_report(&f)?))
        }
        Command::Mw(MwCommand::Sphere { file }) => {
            let f = validated(read_description(&file, Some(Base::Sphere))?)?;
            Output::ok(to_value(&fibration::mw_report(&f)?))
        }
        Command::Mw(MwCommand::Glue { first, second }) => {
            let a = read_description(&first, Some(Base::Sphere))?;
            let b = read_description(&second, Some(Base::Sphere))?;
            let glued = fibration::fiber_connected_sum(&a, &b)?;
            let ranks = [&a, &b, &glued].map(|f| fibration::mw_sphere_group(f).map(|g| g.free_rank));
            let [ra, rb, rg] = ranks;
            Output::ok(json!({
                "description": glued.to_json(),
                "report": to_value(&fibration::mw_report(&glued)?),
                "ranks": {"first": ra?, "second": rb?, "glued": rg?},
            }))
        }
        Command::Lattice(LatticeCommand::Make { expr }) => Output::ok(make_standard(&expr)?.to_json()),
        Command::Lattice(LatticeCommand::Quotient { file, e }) => {
            let l = read_lattice(&file)?;
            let e = marked_or(&l, e.as_deref())?;
            let q = IsotropicQuotient::new(&l, &e)?;
            Output::ok(json!({
                "quotient": q.quotient.to_json(),
                "perp_basis": matrix_to_value(&q.perp_basis),
                "lift": matrix_to_value(&q.lift),
                "project": matrix_to_value(&q.project),
            }))
        }
        Command::Lattice(LatticeCommand::Classify { file }) => {
            let l = read_lattice(&file)?;
            let (pos, neg) = l.signature()?;
            Output::ok(json!({
                "rank": l.rank(),
                "signature": [pos, neg],
                "even": l.is_even(),
                "unimodular": l.is_unimodular(),
                "label": classify_even_unimodular_indefinite(&l)?,
            }))
        }
        Command::Lattice(LatticeCommand::Roots { file, norm }) => {
            let l = read_lattice(&file)?;
            let found = roots(&l, &norm)?;
            let mut body = json!({"norm": norm.to_string(), "count": found.len(), "roots": to_value(&found)});
            if norm == BigInt::from(-2) {
                body["dynkin"] = to_value(&dynkin_components(&l, &simple_roots(&found)));
            }
            Output::ok(body)
        }
        Command::Eichler(EichlerCommand::Apply { file, e, c, x }) => {
            let l = read_lattice(&file)?;
            let e = marked_or(&l, e.as_deref())?;
            let c = parse_vector(&l, &c)?;
            let g = eichler(&l, &e, &c)?;
            let mut body = json!({"matrix": matrix_to_value(g.matrix())});
            if let Some(x) = x {
                body["image"] = to_value(&g.apply(&parse_vector(&l, &x)?));
            }
            Output::ok(body)
        }
        Command::Modpi(ModpiCommand::Eval { word }) => Output::ok(to_value(&word_report(ModPiWord::parse(&word)?))),
        Command::Monodromy(cmd) => monodromy(cmd)?,
        Command::Unipotent(UnipotentCommand::Fix { lattice, word, bound }) => {
            let l = lattice_arg(&lattice)?;
            let g = parse_generator_word(&l, &word)?;
            let certificate = is_unipotent(&g).ok_or(Error::NotUnipotent)?;
            let search = find_primitive_isotropic_fixed(&l, &g, bound)?;
            let body = json!({"certificate": to_value(&certificate), "search": to_value(&search), "bound": bound});
            if search.found.is_some() {
                Output::ok(body)
            } else {
                Output::not_found(&format!("no primitive isotropic fixed vector with coefficients up to {bound}"), body)
            }
        }
        Command::Reproduce => {
            let results = reproduce::run_all();
            let passed = results.iter().filter(|r| r.passed).count();
            Output {
                code: 0,
                body: json!({"seed": reproduce::SEED, "passed": passed, "total": results.len(), "criteria": to_value(&results)}),
            }
        }
    })
}

fn cycles_of(path: &Path) -> Result<CycleTuple> {
    Ok(read_description(path, None)?.cycles)
}

fn monodromy(cmd: MonodromyCommand) -> Result<Output> {
    Ok(match cmd {
        MonodromyCommand::Product { file } => {
            let a = product_monodromy(&cycles_of(&file)?);
            Output::ok(json!({"product": to_value(&a), "trace": a.trace().to_string()}))
        }
        MonodromyCommand::Classify { file } => {
            let a = product_monodromy(&cycles_of(&file)?);
            Output::ok(json!({"product": to_value(&a), "class": to_value(&classify_sl2(&a))}))
        }
        MonodromyCommand::Hurwitz { file, moves } => {
            let search = find_equinodal_pairs(&cycles_of(&file)?, moves);
            if search.hits.is_empty() {
                Output::not_found(&format!("no adjacent equinodal pair within {moves} moves"), to_value(&search))
            } else {
                Output::ok(to_value(&search))
            }
        }
    })
}

fn table(body: &Value) -> String {
    let mut out = String::new();
    for row in body["criteria"].as_array().into_iter().flatten() {
        let verdict = if row["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:>2}  {}: {verdict}\n", row["id"].as_u64().unwrap_or_default(), row["statement"].as_str().unwrap_or_default()));
        out.push_str(&format!("    {}\n", row["detail"].as_str().unwrap_or_default()));
        for note in row["notes"].as_array().into_iter().flatten() {
            out.push_str(&format!("    note: {}\n", note.as_str().unwrap_or_default()));
        }
    }
    out.push_str(&format!("{}/{} criteria passed\n", body["passed"], body["total"]));
    out
}

fn diagnose(err: anyhow::Error) -> Output {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidDescription(violations)) => {
            Output::failure("invalid_description", err.to_string(), Some(to_value(violations)))
        }
        Some(e) => Output::failure(e.kind(), e.to_string(), None),
        None => {
            let kind = if err.downcast_ref::<std::io::Error>().is_some() { "io" } else { "internal" };
            Output::failure(kind, format!("{err:#}"), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.render().to_string();
            let out = Output::failure("usage", message.trim().to_string(), None);
            println!("{}", out.body);
            return ExitCode::from(out.code);
        }
    };
    let is_reproduce = matches!(cli.command, Command::Reproduce);
    let out = execute(cli.command).unwrap_or_else(diagnose);
    if cli.pretty && is_reproduce && out.code == 0 {
        print!("{}", table(&out.body));
    } else if cli.pretty {
        println!("{}", serde_json::to_string_pretty(&out.body).expect("json"));
    } else {
        println!("{}", out.body);
    }
    ExitCode::from(out.code)
}
