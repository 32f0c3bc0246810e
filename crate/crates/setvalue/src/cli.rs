//! Argument parsing and command dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use setvalue_core::dpp::{self, PsiClass, Variant};
use setvalue_core::duality::{self, nodal_set, scalar_hjb, solve_w, ScalarHjbConfig};
use setvalue_core::equilibrium::{
    pareto_filter, set_value_bruteforce, set_value_dpp, strong_pareto_filter, witnesses_bruteforce, Caps, ValueSet,
};
use setvalue_core::game::{Game, GameSpec, NodeId, StoppingTime};
use setvalue_core::planner::{planner_optimum, time_inconsistency_probe, Scalarization};
use setvalue_core::random::{random_spec, KernelMode, RandomConfig};
use setvalue_core::rational::{self, Rational};

use crate::error::{CliError, CliResult};
use crate::pde_file::{nodal_csv, write_field, PdeConfigFile};
use crate::spec_file::{read_spec, spec_to_json};
use crate::{examples, report};

#[derive(Debug, Parser)]
#[command(name = "setvalue", version, about = "Set values of multi-player stochastic games")]
pub struct Cli {
    /// Worker threads. Computations currently run on one thread; the value
    /// is validated and recorded.
    #[arg(long, global = true, env = "SETVALUE_THREADS", default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Set value of a game at one prefix.
    Setvalue(SetValueArgs),
    /// Compare a set value with its dynamic programming decomposition.
    VerifyDpp(VerifyArgs),
    /// Planner optimum over the set value and the time-consistency probe.
    Planner(PlannerArgs),
    /// Solve the duality PDE and read off a nodal set.
    SolvePde(PdeArgs),
    /// Named example games.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
    /// Write a seeded random game spec.
    RandomSpec(RandomArgs),
}

#[derive(Debug, Subcommand)]
pub enum ExamplesAction {
    /// Print the example names.
    List,
    /// Print one example as a spec file.
    Show { name: String },
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// Game spec file.
    #[arg(long, conflicts_with = "example")]
    pub spec: Option<PathBuf>,
    /// Shipped example, see `examples list`.
    #[arg(long)]
    pub example: Option<String>,
    /// Comma-separated state labels from time 0; defaults to the first
    /// initial state.
    #[arg(long)]
    pub prefix: Option<String>,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_policies: u128,
    #[arg(long, default_value_t = 100_000)]
    pub max_selections: u128,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    State,
    Symmetric,
    Pareto,
    StrongPareto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Brute,
    Dpp,
}

#[derive(Debug, Args)]
pub struct SetValueArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    pub variant: VariantArg,
    /// Equilibrium tolerance as `p/q`.
    #[arg(long, default_value = "0")]
    pub eps: String,
    #[arg(long, value_enum, default_value_t = Engine::Brute)]
    pub engine: Engine,
    /// Include one equilibrium per value (brute force only).
    #[arg(long)]
    pub witnesses: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DppExample {
    Path,
    Psistate,
    State,
    Pareto,
    Openloop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PsiArg {
    Path,
    State,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "example")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub example: Option<DppExample>,
    #[arg(long)]
    pub prefix: Option<String>,
    /// Stop at this time on every path.
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long, value_enum)]
    pub psi: Option<PsiArg>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Perturbation of the Pareto example, `0 < eps < 1/3`.
    #[arg(long, default_value = "1/100")]
    pub eps: String,
    /// Noise level of the open-loop example.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_policies: u128,
    #[arg(long, default_value_t = 100_000)]
    pub max_selections: u128,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlannerArgs {
    #[command(flatten)]
    pub game: GameArgs,
    /// Comma-separated weights as `p/q`; equal weights when absent.
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Debug, Args)]
pub struct PdeArgs {
    /// single-player, static, zero-sum or zero-sum-swapped.
    #[arg(long)]
    pub preset: Option<String>,
    /// Solver config file; its preset is overridden by `--preset`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Binary field output.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Nodal points as CSV.
    #[arg(long)]
    pub nodal: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long)]
    pub seed: u64,
    /// Draw rows with zero entries instead of strictly positive ones.
    #[arg(long)]
    pub zeros: bool,
    /// Key the data by current state instead of by prefix.
    #[arg(long)]
    pub state_keyed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: &Cli) -> CliResult<()> {
    if cli.threads == 0 {
        return Err(CliError::Validation("--threads must be at least 1".into()));
    }
    match &cli.command {
        Command::Setvalue(a) => {
            let v = cmd_setvalue(a)?;
            emit(&a.game.out, &pretty(&v))
        }
        Command::VerifyDpp(a) => emit(&a.out, &pretty(&cmd_verify_dpp(a)?)),
        Command::Planner(a) => emit(&a.game.out, &pretty(&cmd_planner(a)?)),
        Command::SolvePde(a) => {
            let v = cmd_solve_pde(a)?;
            emit(&a.out, &pretty(&v))
        }
        Command::Examples { action } => match action {
            ExamplesAction::List => {
                let mut text = String::new();
                for n in examples::names() {
                    text.push_str(n);
                    text.push('\n');
                }
                for n in duality::presets::NAMES {
                    text.push_str(&format!("pde:{n}\n"));
                }
                emit(&None, &text)
            }
            ExamplesAction::Show { name } => emit(&None, &spec_to_json(&examples::load(name)?)),
        },
        Command::RandomSpec(a) => {
            let cfg = RandomConfig {
                kernel: if a.zeros { KernelMode::WithZeros } else { KernelMode::Positive },
                path_dependent: !a.state_keyed,
                ..RandomConfig::default()
            };
            emit(&a.out, &spec_to_json(&random_spec(a.seed, &cfg)))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_rational(text: &str, what: &str) -> CliResult<Rational> {
    rational::parse(text).map_err(|_| CliError::Validation(format!("{what}: not a rational: {text:?}")))
}

fn load_game(spec: &Option<PathBuf>, example: &Option<String>) -> CliResult<GameSpec> {
    match (spec, example) {
        (Some(path), _) => read_spec(path),
        (None, Some(name)) => examples::load(name),
        (None, None) => Err(CliError::Validation("give --spec or --example".into())),
    }
}

fn node_of(spec: &GameSpec, game: &Game, prefix: &Option<String>) -> CliResult<NodeId> {
    let Some(text) = prefix else { return Ok(0) };
    let labels: Vec<&str> = text.split(',').map(str::trim).collect();
    let idx = labels
        .iter()
        .enumerate()
        .map(|(t, l)| {
            spec.state_index(t, l)
                .ok_or_else(|| CliError::Validation(format!("unknown state {l:?} at time {t}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    game.tree()
        .node_of(&idx)
        .ok_or_else(|| CliError::Validation(format!("prefix {text:?} is not in the game")))
}

fn caps(policies: u128, selections: u128) -> Caps {
    Caps { policies, selections }
}

fn variant_of(v: VariantArg) -> Variant {
    match v {
        VariantArg::Full | VariantArg::StrongPareto => Variant::Full,
        VariantArg::State => Variant::State,
        VariantArg::Symmetric => Variant::Symmetric,
        VariantArg::Pareto => Variant::Pareto,
    }
}

fn variant_name(v: VariantArg) -> &'static str {
    match v {
        VariantArg::StrongPareto => "strong_pareto",
        other => variant_of(other).name(),
    }
}

pub fn cmd_setvalue(a: &SetValueArgs) -> CliResult<Value> {
    let spec = load_game(&a.game.spec, &a.game.example)?;
    let game = Game::new(&spec)?;
    let node = node_of(&spec, &game, &a.game.prefix)?;
    let caps = caps(a.game.max_policies, a.game.max_selections);
    let eps = parse_rational(&a.eps, "--eps")?;
    if eps < Rational::from_integer(0) {
        return Err(CliError::Validation("--eps must be nonnegative".into()));
    }
    let class = variant_of(a.variant).class();
    let (all, witnesses) = match a.engine {
        Engine::Dpp => {
            if a.variant != VariantArg::Full || eps != Rational::from_integer(0) || a.witnesses {
                return Err(CliError::Validation(
                    "the dpp engine computes the exact full set value only, without witnesses".into(),
                ));
            }
            (set_value_dpp(&game, node, &caps)?, None)
        }
        Engine::Brute if a.witnesses => {
            let (vs, records) = witnesses_bruteforce(&game, node, &eps, class, &caps)?;
            (vs, Some(records))
        }
        Engine::Brute => (set_value_bruteforce(&game, node, &eps, class, &caps)?, None),
    };
    let vs: ValueSet = match a.variant {
        VariantArg::Pareto => pareto_filter(&all),
        VariantArg::StrongPareto => strong_pareto_filter(&game, node, &all, &caps)?,
        _ => all,
    };
    let mut out = json!({
        "time": game.tree().time(node),
        "prefix": report::prefix_labels(&spec, &game, node),
        "variant": variant_name(a.variant),
        "value_set": report::value_set(&vs),
    });
    if let Some(records) = witnesses {
        let kept: Vec<Value> = records
            .iter()
            .filter(|r| vs.has_point(&r.value))
            .map(|r| report::equilibrium(&spec, &game, node, r))
            .collect();
        out["witnesses"] = Value::Array(kept);
    }
    Ok(out)
}

pub fn cmd_verify_dpp(a: &VerifyArgs) -> CliResult<Value> {
    let caps = caps(a.max_policies, a.max_selections);
    let (spec, tau_default, psi_default, variant_default) = match a.example {
        Some(DppExample::Openloop) => {
            let demo = dpp::open_loop_lq_demo(a.sigma)?;
            let mut v = report::lq(a.sigma, &demo, dpp::open_loop_lq_formulas(a.sigma));
            v["example"] = json!("openloop");
            return Ok(v);
        }
        Some(DppExample::Pareto) => {
            let eps = parse_rational(&a.eps, "--eps")?;
            let r = dpp::pareto_dpp_counterexample(eps, &caps)?;
            let mut v = report::dpp(&r);
            v["example"] = json!("pareto");
            v["eps"] = json!(rational::format(&eps));
            return Ok(v);
        }
        Some(DppExample::Path) => (examples::load("example_path")?, 1, PsiArg::Path, VariantArg::Full),
        Some(DppExample::Psistate) => (examples::load("example_path")?, 2, PsiArg::State, VariantArg::Full),
        Some(DppExample::State) => (examples::load("example_state")?, 1, PsiArg::State, VariantArg::State),
        None => match &a.spec {
            Some(path) => (read_spec(path)?, 1, PsiArg::Path, VariantArg::Full),
            None => return Err(CliError::Validation("give --spec or --example".into())),
        },
    };
    let variant = a.variant.unwrap_or(variant_default);
    if variant == VariantArg::StrongPareto {
        return Err(CliError::Validation("verify-dpp has no strong Pareto variant".into()));
    }
    let psi = match a.psi.unwrap_or(psi_default) {
        PsiArg::Path => PsiClass::Path,
        PsiArg::State => PsiClass::State,
    };
    let game = Game::new(&spec)?;
    let node = node_of(&spec, &game, &a.prefix)?;
    let t = a.tau.unwrap_or(tau_default);
    if t <= game.tree().time(node) || t > game.tree().horizon() {
        return Err(CliError::Validation(format!("--tau {t} must lie after the prefix and within the horizon")));
    }
    let tau = StoppingTime::constant(game.tree(), t);
    let r = dpp::verify_dpp(&game, node, &tau, psi, variant_of(variant), &caps)?;
    let mut v = report::dpp(&r);
    v["prefix"] = json!(report::prefix_labels(&spec, &game, node));
    v["tau"] = json!(t);
    v["psi"] = json!(if psi == PsiClass::Path { "path" } else { "state" });
    v["variant"] = json!(variant_name(variant));
    if let Some(e) = a.example {
        v["example"] = json!(format!("{e:?}").to_lowercase());
    }
    Ok(v)
}

pub fn cmd_planner(a: &PlannerArgs) -> CliResult<Value> {
    let spec = load_game(&a.game.spec, &a.game.example)?;
    let game = Game::new(&spec)?;
    let node = node_of(&spec, &game, &a.game.prefix)?;
    let caps = caps(a.game.max_policies, a.game.max_selections);
    let lam = match &a.lambda {
        None => Scalarization::uniform(game.players()),
        Some(text) => {
            let w = text
                .split(',')
                .map(|s| parse_rational(s, "--lambda"))
                .collect::<CliResult<Vec<_>>>()?;
            if w.len() != game.players() {
                return Err(CliError::Validation(format!("--lambda needs {} weights", game.players())));
            }
            Scalarization::new(w)?
        }
    };
    let probe = time_inconsistency_probe(&game, node, &lam, &caps)?;
    let vs = set_value_bruteforce(&game, node, &Rational::from_integer(0), Variant::Full.class(), &caps)?;
    let optimum = planner_optimum(&vs, &lam)?;
    Ok(json!({
        "weights": report::point(lam.weights()),
        "value_set": report::value_set(&vs),
        "planner": report::planner_outcome(&optimum),
        "probe": report::probe(&spec, &game, &probe),
    }))
}

pub fn cmd_solve_pde(a: &PdeArgs) -> CliResult<Value> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            PdeConfigFile::from_json(&text)?
        }
        None => PdeConfigFile::default(),
    };
    if let Some(p) = &a.preset {
        cfg.preset = p.replace('-', "_");
    }
    let spec = duality::presets::by_name(&cfg.preset.replace('-', "_")).ok_or_else(|| {
        CliError::Validation(format!(
            "unknown preset {:?}; known: {}",
            cfg.preset,
            duality::presets::NAMES.join(", ")
        ))
    })?;
    let grid = cfg.grid()?;
    let field = solve_w(&spec, &grid)?;
    let nodal = nodal_set(&field, cfg.t, cfg.x, cfg.delta)?;
    if let Some(path) = &a.field {
        let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut w = std::io::BufWriter::new(file);
        write_field(&mut w, &field).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &a.nodal {
        std::fs::write(path, nodal_csv(&nodal)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let clusters: Vec<Value> = nodal
        .clusters
        .iter()
        .map(|c| json!({ "centroid": c.centroid, "diameter": c.diameter, "size": c.points.len() }))
        .collect();
    let mut out = json!({
        "preset": cfg.preset,
        "grid": {
            "hx": field.hx, "hy": field.hy, "ht": field.ht, "steps": field.steps,
            "stencil": grid.stencil_cells(), "nx": field.x.len(), "ny": field.y.len(),
        },
        "min_value": field.min_value,
        "terminal_error": field.terminal_error(&spec),
        "nodal": {
            "t": nodal.t, "x": nodal.x, "delta": nodal.delta,
            "min_value": nodal.min_value, "argmin": nodal.argmin,
            "points": nodal.points.len(), "clusters": clusters,
        },
    });
    if cfg.preset == "single_player" {
        let (xs, v) = scalar_hjb(spec.horizon, &spec.action_grids[0], |_| 0.0, |x| spec.terminal_cost(x, 0), &ScalarHjbConfig::default())?;
        let value = interpolate(&xs, &v, nodal.x);
        let tolerance = 5.0 * (field.hx + field.hy);
        let centroid = nodal.clusters.first().map(|c| c.centroid[0]);
        out["oracle"] = json!({
            "value": value,
            "centroid_error": centroid.map(|c| (c - value).abs()),
            "tolerance": tolerance,
            "within_tolerance": centroid.is_some_and(|c| (c - value).abs() <= tolerance),
        });
    }
    Ok(out)
}

fn interpolate(xs: &[f64], v: &[f64], x: f64) -> f64 {
    let h = xs[1] - xs[0];
    let s = ((x - xs[0]) / h).clamp(0.0, (xs.len() - 1) as f64);
    let k = (s.floor() as usize).min(xs.len() - 2);
    let w = s - k as f64;
    (1.0 - w) * v[k] + w * v[k + 1]
}
