use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use robust_vdp::dp::{ControlledProblem, ValueSet};
use robust_vdp::error::{Error, Result};
use robust_vdp::io;
use robust_vdp::rectangular::{check_preorder_rectangularity, random_test_vectors};
use robust_vdp::vsup::{SupRegistry, SupStatus};

const DEFAULT_RANDOM_VECTORS: usize = 100;

#[derive(Parser)]
#[command(name = "robust-vdp", version, about = "Set-valued robust dynamic programming on scenario trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Value sets with per-model expectation tables.
    Solve(Common),
    /// Weak, strong and equality Bellman relations at every time.
    CheckBellman(Common),
    /// Rectangularity of the model family.
    Rect(RectArgs),
    /// Supremum of a finite set of points under a cone.
    Vsup(VsupArgs),
    /// Pareto generators of the upper images and their one-step recursion.
    Pareto(Common),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    time: Option<usize>,
    #[arg(long)]
    prune: bool,
    #[arg(long, env = "ROBUST_VDP_BUDGET")]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Supremum method: auto, componentwise, dual-li or general.
    #[arg(long)]
    sup: Option<String>,
}

#[derive(Args)]
struct RectArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, conflicts_with = "random")]
    test_vectors: Option<PathBuf>,
    #[arg(long)]
    random: Option<usize>,
}

#[derive(Args)]
struct VsupArgs {
    #[arg(long)]
    cone: PathBuf,
    #[arg(long)]
    points: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    sup: Option<String>,
}

enum Outcome {
    Pass,
    Fail,
    NoSupremum,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DeskScaleExceeded { .. } | Error::SupNotExists { .. } => 3,
        _ => 2,
    }
}

fn load(c: &Common) -> Result<ControlledProblem> {
    let mut p = io::load_instance(&c.instance)?;
    if let Some(b) = c.budget {
        p.options.budget = b;
    }
    if c.prune {
        p.options.prune = true;
    }
    if c.seed.is_some() {
        p.options.seed = c.seed;
    }
    if let Some(s) = &c.sup {
        p.sup = SupRegistry::default().get(s)?;
    }
    if let Some(t) = c.time {
        if t > p.horizon() {
            return Err(Error::TimeOutOfRange {
                time: t,
                horizon: p.horizon(),
            });
        }
    }
    Ok(p)
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values always serialize"));
}

fn at_time(sets: &[ValueSet], t: Option<usize>) -> Vec<ValueSet> {
    sets.iter().filter(|s| t.is_none_or(|t| s.time == t)).cloned().collect()
}

fn solve(c: &Common) -> Result<Outcome> {
    let p = load(c)?;
    let report = p.check_bellman()?;
    match (c.format, c.time) {
        (Format::Text, None) => print!("{}", io::emit_tables(&p, &report)?),
        (Format::Text, Some(t)) => {
            print!("{}", io::value_set_lines(&p, "V", &at_time(&report.v, Some(t))));
            print!("{}", io::value_set_lines(&p, "B", &at_time(&report.b, Some(t))));
        }
        (Format::Json, t) => {
            let mut v = io::bellman_json(&p, &report);
            let obj = v.as_object_mut().expect("object");
            obj.remove("checks");
            for key in ["V", "R", "B"] {
                let filtered: Vec<serde_json::Value> = obj[key]
                    .as_array()
                    .expect("array")
                    .iter()
                    .filter(|s| t.is_none_or(|t| s["time"] == t))
                    .cloned()
                    .collect();
                obj.insert(key.into(), filtered.into());
            }
            print_json(&v);
        }
    }
    Ok(Outcome::Pass)
}

fn check_bellman(c: &Common) -> Result<Outcome> {
    let p = load(c)?;
    let report = p.check_bellman()?;
    match c.format {
        Format::Text => print!("{}", io::bellman_text(&p, &report)),
        Format::Json => print_json(&io::bellman_json(&p, &report)),
    }
    Ok(if report.all_pass() { Outcome::Pass } else { Outcome::Fail })
}

fn rect(a: &RectArgs) -> Result<Outcome> {
    let p = load(&a.common)?;
    let (vectors, seed) = match &a.test_vectors {
        Some(path) => (io::parse_test_vectors(&io::read_file(path)?, &p.tree, p.dim())?, None),
        None => {
            let seed = p.options.seed.unwrap_or(0);
            let n = a.random.unwrap_or(DEFAULT_RANDOM_VECTORS);
            (random_test_vectors(&p.tree, p.dim(), n, seed), Some(seed))
        }
    };
    let mut report = check_preorder_rectangularity(p.sup.as_ref(), &p.cone, &p.tree, &p.family, &vectors)?;
    report.seed = seed;
    match a.common.format {
        Format::Text => print!("{}", io::rect_text(&p, &report)),
        Format::Json => print_json(&io::rect_json(&p, &report)),
    }
    Ok(if report.forward_counterexamples() == 0 {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn vsup(a: &VsupArgs) -> Result<Outcome> {
    let cone = io::parse_cone_file(&io::read_file(&a.cone)?)?;
    let points = io::parse_points(&io::read_file(&a.points)?, cone.dim())?;
    let method = SupRegistry::default().get(a.sup.as_deref().unwrap_or("auto"))?;
    let r = method.supremum(&cone, &points)?;
    match a.format {
        Format::Text => print!("{r}"),
        Format::Json => print_json(&io::sup_json(&r)),
    }
    Ok(match r.status {
        SupStatus::NotExists => Outcome::NoSupremum,
        _ => Outcome::Pass,
    })
}

fn pareto(c: &Common) -> Result<Outcome> {
    let p = load(c)?;
    let report = p.check_upper_image_recursion()?;
    match c.format {
        Format::Text => print!("{}", io::pareto_text(&p, &report, c.time)),
        Format::Json => print_json(&io::pareto_json(&p, &report, c.time)),
    }
    Ok(if report.inclusion_holds() && report.reverse_holds() != Some(false) {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(c) => solve(c),
        Command::CheckBellman(c) => check_bellman(c),
        Command::Rect(a) => rect(a),
        Command::Vsup(a) => vsup(a),
        Command::Pareto(c) => pareto(c),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Ok(Outcome::NoSupremum) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
