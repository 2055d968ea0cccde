use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mumford_core::algebra::parse_rational;
use mumford_core::checks::{run_suite, Suite};
use mumford_core::{
    conjugate_times, dimension, is_stable, laplace_to_volume, mumford_decompose, wp_volume,
    Coefficient, Engine, Error, Generator, Preset, Rational, SpectralCurve,
};
use serde_json::{json, Value};

/// Exact topological recursion, Mumford volumes and kappa/psi intersection numbers.
#[derive(Parser)]
#[command(name = "mumford", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlator W_{g,n} as coefficients of prod dz_i / z_i^{2 d_i + 2}.
    Wgn {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Volume polynomial V_{g,n}(P), the inverse Laplace transform of W_{g,n}.
    Volume {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Free energy F_g for g >= 2.
    Fg {
        #[arg(long)]
        g: u32,
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Conjugated times t~_b for 1 <= b <= order.
    Conjugate {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Mixed kappa/psi intersection numbers on M_{g,n}.
    Intersect {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Weil-Petersson volume as a polynomial in u = pi^2 and P_i^2.
    Wp {
        #[command(flatten)]
        target: Target,
        /// Replace u = pi^2 by a rational.
        #[arg(long = "assign", value_name = "NAME=VALUE")]
        assign: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run self-consistency suites.
    Check {
        /// identities, dilaton, roundtrips, oracle, structure or all
        #[arg(long, default_value = "all")]
        suite: String,
        /// Largest 2g - 2 + n covered.
        #[arg(long, default_value_t = 3)]
        budget: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    n: u32,
}

#[derive(Args)]
struct CurveArgs {
    /// Preset (airy, wp, formal, kappa2:<v>[@<t3>], discrete:<lambda>) or a curve file.
    #[arg(long, default_value = "formal")]
    curve: String,
    /// Number of times t5, t7, ... generated for presets.
    #[arg(long)]
    order: Option<u32>,
    /// Replace a generator by a rational in the output.
    #[arg(long = "assign", value_name = "NAME=VALUE")]
    assign: Vec<String>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

enum Failure {
    Engine(Error),
    Io(String),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Engine(
                Error::Parse(_) | Error::InvalidInput(_) | Error::MissingGenerator(_),
            ) => 2,
            Failure::Engine(Error::DegenerateCurve) => 3,
            Failure::Engine(Error::UnstablePair { .. } | Error::InvalidGenus(_)) => 4,
            Failure::Engine(Error::UnknownPreset(_)) => 5,
            _ => 1,
        }
    }

    fn reason(&self) -> String {
        match self {
            Failure::Engine(e) => e.to_string(),
            Failure::Io(e) => e.clone(),
            Failure::ChecksFailed => "one or more checks failed".into(),
        }
    }
}

type Assignment = BTreeMap<Generator, Rational>;

fn parse_assignments(items: &[String]) -> Result<Assignment, Error> {
    items
        .iter()
        .map(|item| {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("assignment `{item}` is not NAME=VALUE")))?;
            Ok((Generator::new(name.trim())?, parse_rational(value.trim())?))
        })
        .collect()
}

fn load_curve(source: &str, order: u32) -> Result<SpectralCurve, Failure> {
    let path = Path::new(source);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{source}: {e}")))?;
        let doc: Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{source}: {e}")))?;
        return Ok(SpectralCurve::from_json(&doc)?);
    }
    let preset: Preset = source.parse()?;
    Ok(SpectralCurve::preset(&preset, order)?)
}

fn require_stable(g: u32, n: u32) -> Result<(), Error> {
    if is_stable(g, n) {
        Ok(())
    } else {
        Err(Error::UnstablePair { g, n })
    }
}

fn specialize_all<'a>(values: impl Iterator<Item = &'a mut Coefficient>, assignment: &Assignment) {
    if assignment.is_empty() {
        return;
    }
    for c in values {
        *c = c.specialize(assignment);
    }
}

struct Document {
    json: Value,
    text: String,
}

fn run(command: Command) -> Result<(Document, OutputArgs, bool), Failure> {
    match command {
        Command::Wgn { target, curve, out } => {
            let (g, n) = (target.g, target.n);
            require_stable(g, n)?;
            let assignment = parse_assignments(&curve.assign)?;
            let order = curve.order.unwrap_or(dimension(g, n).max(1) as u32);
            let engine = Engine::new(load_curve(&curve.curve, order)?)?;
            let mut w = (*engine.correlator(g, n)?).clone();
            specialize_all(w.terms.values_mut(), &assignment);
            w.terms.retain(|_, c| !c.is_zero());
            let text = w.to_string().trim_end().to_string();
            Ok((
                Document {
                    json: w.to_json(),
                    text,
                },
                out,
                true,
            ))
        }
        Command::Volume { target, curve, out } => {
            let (g, n) = (target.g, target.n);
            require_stable(g, n)?;
            let assignment = parse_assignments(&curve.assign)?;
            let order = curve.order.unwrap_or(dimension(g, n).max(1) as u32);
            let engine = Engine::new(load_curve(&curve.curve, order)?)?;
            let w = engine.correlator(g, n)?;
            let mut v = laplace_to_volume(&w);
            specialize_all(v.terms.values_mut(), &assignment);
            v.terms.retain(|_, c| !c.is_zero());
            Ok((
                Document {
                    json: v.to_json(),
                    text: v.to_string(),
                },
                out,
                true,
            ))
        }
        Command::Fg { g, curve, out } => {
            if g < 2 {
                return Err(Error::InvalidGenus(g).into());
            }
            let assignment = parse_assignments(&curve.assign)?;
            let order = curve.order.unwrap_or(dimension(g, 1) as u32);
            let engine = Engine::new(load_curve(&curve.curve, order)?)?;
            let value = engine.free_energy(g)?.value.specialize(&assignment);
            Ok((
                Document {
                    json: json!({"g": g, "value": value.to_string()}),
                    text: format!("F_{g} = {value}"),
                },
                out,
                true,
            ))
        }
        Command::Conjugate { curve, out } => {
            let assignment = parse_assignments(&curve.assign)?;
            let order = curve.order.unwrap_or(3);
            let c = load_curve(&curve.curve, order)?;
            let mut ct = conjugate_times(&c, order)?;
            specialize_all(ct.tilde.values_mut(), &assignment);
            ct.tilde.retain(|_, c| !c.is_zero());
            let text = (1..=ct.max_order)
                .map(|b| format!("t~{b} = {}", ct.get(b).unwrap_or_default()))
                .collect::<Vec<_>>()
                .join("\n");
            Ok((
                Document {
                    json: ct.to_json(),
                    text,
                },
                out,
                true,
            ))
        }
        Command::Intersect { target, out } => {
            let (g, n) = (target.g, target.n);
            require_stable(g, n)?;
            let curve = SpectralCurve::formal(dimension(g, n).max(1) as u32);
            let engine = Engine::new(curve.clone())?;
            let w = engine.correlator(g, n)?;
            let table = mumford_decompose(&w, &curve)?;
            let text = table.to_string().trim_end().to_string();
            Ok((
                Document {
                    json: table.to_json(),
                    text,
                },
                out,
                true,
            ))
        }
        Command::Wp {
            target,
            assign,
            out,
        } => {
            let (g, n) = (target.g, target.n);
            require_stable(g, n)?;
            let assignment = parse_assignments(&assign)?;
            let mut v = wp_volume(g, n, dimension(g, n).max(1) as u32)?;
            specialize_all(v.terms.values_mut(), &assignment);
            v.terms.retain(|_, c| !c.is_zero());
            Ok((
                Document {
                    json: v.to_json(),
                    text: v.to_string(),
                },
                out,
                true,
            ))
        }
        Command::Check { suite, budget, out } => {
            let suites = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse::<Suite>()?]
            };
            let reports = suites
                .into_iter()
                .map(|s| run_suite(s, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().all(|r| r.passed());
            let json = Value::Array(reports.iter().map(|r| r.to_json()).collect());
            let text = reports
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            Ok((Document { json, text }, out, passed))
        }
    }
}

fn emit(doc: &Document, out: &OutputArgs) -> Result<(), Failure> {
    let body = match out.format {
        Format::Json => doc.json.to_string(),
        Format::Text => doc.text.clone(),
    };
    match &out.output {
        Some(path) => fs::write(path, body + "\n")
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(cli.command).and_then(|(doc, out, passed)| {
        emit(&doc, &out)?;
        if passed {
            Ok(())
        } else {
            Err(Failure::ChecksFailed)
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.reason());
            ExitCode::from(failure.exit_code())
        }
    }
}
