use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use bellforge::catalog::{self, Provenance};
use bellforge::equivalence;
use bellforge::lift::{self, Verification};
use bellforge::model::json::{self, AnyInequality, InequalityDocument};
use bellforge::model::rational;
use bellforge::polytope;
use bellforge::quantum::{self, OptimizeOptions};
use bellforge::reproduce;
use bellforge::{FullCorrelationInequality, GeneralInequality, Limits, Scenario};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Correlation Bell inequalities: bounds, facets, lifts, equivalence and GHZ
/// violations. Setting and party indices on the command line are 1-based.
#[derive(Parser)]
#[command(name = "bellforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local-realistic and algebraic bounds.
    Bound { file: PathBuf },
    /// Face and facet certificate.
    Tight { file: PathBuf },
    /// All facets of a tiny polytope, e.g. --scenario 2,2.
    Facets {
        #[arg(long, value_delimiter = ',', required = true)]
        scenario: Vec<usize>,
    },
    /// Builds a new inequality from faces.
    Extend {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// Two term indices (in document order) whose signs flip.
        #[arg(long, value_delimiter = ',')]
        flip: Option<Vec<usize>>,
        #[arg(long)]
        verify: bool,
    },
    /// Splits an inequality along one party.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        party: usize,
    },
    Canonical { file: PathBuf },
    Equivalent { a: PathBuf, b: PathBuf },
    /// Replaces observables by +1, e.g. --fix 1=2,3=1.
    Dehomogenize {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        fix: Vec<String>,
    },
    Homogenize { file: PathBuf },
    /// Maximizes the GHZ violation over measurement angles.
    Optimize {
        file: PathBuf,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Critical visibility for a given quantum value.
    Vcrit {
        file: PathBuf,
        #[arg(long)]
        quantum_value: f64,
    },
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Runs every acceptance criterion.
    ReproducePaper,
}

#[derive(Subcommand)]
enum CatalogCommand {
    List,
    Get { name: String },
    Check { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Chsh,
    General,
    FourTerm,
}

/// A payload plus whether the command's own checks passed.
struct Output {
    payload: Value,
    failure: Option<String>,
}

impl From<Value> for Output {
    fn from(payload: Value) -> Self {
        Output { payload, failure: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Limits::from_env()
        .map_err(anyhow::Error::from)
        .and_then(|limits| run(cli.command, &limits));
    match result {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&round_reals(out.payload)).expect("json");
            // a closed pipe is not an error
            let _ = writeln!(std::io::stdout().lock(), "{}", text);
            match out.failure {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("bellforge: {}", msg);
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("bellforge: {:#}", e);
            let refused = e
                .chain()
                .any(|c| c.downcast_ref::<bellforge::Error>().is_some_and(|e| e.is_refusal()));
            ExitCode::from(if refused { 2 } else { 1 })
        }
    }
}

/// Rounds every float to 12 significant digits.
fn round_reals(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x: f64 = format!("{:.11e}", n.as_f64().expect("f64")).parse().expect("float");
            json!(x)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_reals).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_reals(v))).collect()),
        v => v,
    }
}

fn read(path: &Path) -> anyhow::Result<AnyInequality> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    json::parse(&text).with_context(|| format!("{}", path.display()))
}

fn read_full(path: &Path) -> anyhow::Result<FullCorrelationInequality> {
    match read(path)? {
        AnyInequality::Full(f) => Ok(f),
        AnyInequality::General(_) => bail!("{}: expected kind `full`", path.display()),
    }
}

fn read_general(path: &Path) -> anyhow::Result<GeneralInequality> {
    match read(path)? {
        AnyInequality::General(g) => Ok(g),
        AnyInequality::Full(f) => Ok(f.to_general()),
    }
}

fn r(x: &bellforge::Rational) -> Value {
    Value::String(rational::format(x))
}

fn one_based(i: usize, what: &str) -> anyhow::Result<usize> {
    i.checked_sub(1).ok_or_else(|| anyhow!("{} indices are 1-based, got 0", what))
}

fn verification(ineq: &FullCorrelationInequality, verify: bool, limits: &Limits) -> anyhow::Result<Verification> {
    if !verify {
        return Ok(Verification::NotRequested);
    }
    Ok(match polytope::tightness(ineq, limits) {
        Ok(report) => Verification::Verified { report },
        Err(e) if e.is_refusal() => Verification::Unverified { reason: e.to_string() },
        Err(e) => return Err(e.into()),
    })
}

fn run(command: Command, limits: &Limits) -> anyhow::Result<Output> {
    let value = match command {
        Command::Bound { file } => {
            let ineq = read_full(&file)?;
            let lr = polytope::lr_bound(&ineq, limits)?;
            json!({
                "lr_bound": r(&(lr * ineq.scale())),
                "algebraic_bound": r(&(ineq.algebraic_bound() * ineq.scale())),
                "normalized_lr_bound": r(&lr),
                "bound": r(&ineq.bound()),
            })
        }
        Command::Tight { file } => serde_json::to_value(polytope::tightness(&read_full(&file)?, limits)?)?,
        Command::Facets { scenario } => {
            let s = Scenario::new(scenario)?;
            let list = polytope::enumerate_facets(&s, limits)?;
            let mut v = serde_json::to_value(&list)?;
            v["class_count"] = json!(list.orbit_classes.len());
            v["nontrivial_classes"] = json!(list.nontrivial_classes());
            v
        }
        Command::Extend { mode, inputs, flip, verify } => extend(mode, &inputs, flip, verify, limits)?,
        Command::Decompose { file, party } => {
            let ineq = read_full(&file)?;
            let d = lift::decompose(&ineq, one_based(party, "party")?)?;
            json!({
                "party": party,
                "components": d.components.iter().map(json::to_value).collect::<Vec<_>>(),
                "structure_values": lift::structure_values(&d).iter().map(json::to_value).collect::<Vec<_>>(),
            })
        }
        Command::Canonical { file } => {
            let canon = equivalence::canonical_form(&read_full(&file)?, limits)?;
            serde_json::to_value(InequalityDocument::from_full(&canon).canonical())?
        }
        Command::Equivalent { a, b } => {
            json!({ "equivalent": equivalence::equivalent(&read_full(&a)?, &read_full(&b)?, limits)? })
        }
        Command::Dehomogenize { file, fix } => {
            let ineq = read_full(&file)?;
            let fixed = fix
                .iter()
                .map(|f| {
                    let (p, i) = f.split_once('=').ok_or_else(|| anyhow!("--fix expects p=i, got `{}`", f))?;
                    let p: usize = p.trim().parse().with_context(|| format!("--fix party `{}`", p))?;
                    let i: usize = i.trim().parse().with_context(|| format!("--fix setting `{}`", i))?;
                    Ok((one_based(p, "party")?, one_based(i, "setting")?))
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            serde_json::to_value(InequalityDocument::from_general(&equivalence::dehomogenize(&ineq, &fixed)?))?
        }
        Command::Homogenize { file } => json::to_value(&equivalence::homogenize(&read_general(&file)?)?),
        Command::Optimize { file, restarts, seed } => {
            let options = OptimizeOptions { restarts, seed, ..OptimizeOptions::default() };
            serde_json::to_value(quantum::maximize_ghz_violation(&read_full(&file)?, &options, limits)?)?
        }
        Command::Vcrit { file, quantum_value } => {
            let c = quantum::critical_visibility(&read_full(&file)?, quantum_value, limits)?;
            json!({ "v_crit": c.value, "violation": c.violation })
        }
        Command::Catalog(c) => return catalog_command(c, limits),
        Command::ReproducePaper => {
            let outcomes = reproduce::run_all(limits)?;
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            let payload = json!({
                "pass": failed == 0,
                "criteria": serde_json::to_value(&outcomes)?,
            });
            return Ok(Output {
                payload,
                failure: (failed > 0).then(|| format!("{} of {} criteria failed", failed, outcomes.len())),
            });
        }
    };
    Ok(value.into())
}

fn extend(
    mode: Mode,
    inputs: &[PathBuf],
    flip: Option<Vec<usize>>,
    verify: bool,
    limits: &Limits,
) -> anyhow::Result<Value> {
    let faces = inputs.iter().map(|p| read_full(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let (ineq, extra) = match mode {
        Mode::Chsh | Mode::General => {
            if matches!(mode, Mode::Chsh) && faces.len() != 2 {
                bail!("--mode chsh takes exactly two inputs, got {}", faces.len());
            }
            (lift::compose_lift(&faces, false, limits)?.inequality, Value::Null)
        }
        Mode::FourTerm => {
            let [ineq] = faces.as_slice() else {
                bail!("--mode four-term takes one input, got {}", faces.len());
            };
            let keys: Vec<_> = ineq.terms().keys().cloned().collect();
            let (out, pair) = match flip {
                Some(f) => {
                    if f.len() != 2 {
                        bail!("--flip takes two term indices, got {}", f.len());
                    }
                    let pair = f
                        .iter()
                        .map(|&i| {
                            let k = one_based(i, "term")?;
                            keys.get(k).cloned().ok_or_else(|| anyhow!("term {} out of range (1..{})", i, keys.len()))
                        })
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    (lift::four_term_extend(ineq, &pair, limits)?, pair)
                }
                None => {
                    let mut found = None;
                    for pair in lift::flip_pairs(ineq) {
                        match lift::four_term_extend(ineq, &pair, limits) {
                            Ok(out) => {
                                found = Some((out, pair.to_vec()));
                                break;
                            }
                            Err(bellforge::Error::NotAFace(_)) => continue,
                            Err(e) => return Err(e.into()),
                        }
                    }
                    found.ok_or_else(|| anyhow!("no flip pair yields a face"))?
                }
            };
            let flipped: Vec<usize> = pair
                .iter()
                .map(|t| keys.iter().position(|k| k == t).expect("key exists") + 1)
                .collect();
            (out, json!(flipped))
        }
    };
    let mut v = json!({
        "inequality": json::to_value(&ineq),
        "verification": verification(&ineq, verify, limits)?,
    });
    if !extra.is_null() {
        v["flip"] = extra;
    }
    Ok(v)
}

fn catalog_command(c: CatalogCommand, limits: &Limits) -> anyhow::Result<Output> {
    Ok(match c {
        CatalogCommand::List => {
            let mut entries = Vec::new();
            for name in catalog::list() {
                let e = catalog::get(name)?;
                entries.push(json!({
                    "name": name,
                    "settings": e.inequality.scenario().settings_per_party(),
                    "terms": e.inequality.term_count(),
                    "provenance": e.provenance,
                }));
            }
            json!({ "data_version": catalog::DATA_VERSION, "entries": entries }).into()
        }
        CatalogCommand::Get { name } => {
            let e = catalog::get(&name)?;
            json!({
                "name": e.name,
                "inequality": json::to_value(&e.inequality),
                "expected": e.expected,
                "recipe": e.recipe.as_ref().map(|r| r.describe()),
                "provenance": e.provenance,
            })
            .into()
        }
        CatalogCommand::Check { name } => {
            let e = catalog::get(&name)?;
            let report = catalog::check(&e, &OptimizeOptions::default(), limits)?;
            let failure = (!report.pass).then(|| format!("{}: some expected properties do not hold", name));
            let mut payload = serde_json::to_value(&report)?;
            if e.provenance == Provenance::ExternalStandard {
                payload["note"] = json!("external-standard entry, not part of the acceptance claims");
            }
            Output { payload, failure }
        }
    })
}
