//! JSON renderings of results. Rationals are `"p/q"` strings.

use serde_json::{json, Value};
use setvalue_core::dpp::{DppReport, LqDemo};
use setvalue_core::equilibrium::{EquilibriumRecord, ValueSet};
use setvalue_core::game::{Game, GameSpec, NodeId};
use setvalue_core::planner::{PlannerOutcome, ProbeReport};
use setvalue_core::rational::{self, Rational};

pub fn point(p: &[Rational]) -> Value {
    Value::Array(p.iter().map(|v| Value::String(rational::format(v))).collect())
}

pub fn points(ps: &[Vec<Rational>]) -> Value {
    Value::Array(ps.iter().map(|p| point(p)).collect())
}

pub fn value_set(vs: &ValueSet) -> Value {
    json!({
        "epsilon": rational::format(vs.epsilon()),
        "points": points(vs.points()),
    })
}

pub fn prefix_labels(spec: &GameSpec, game: &Game, node: NodeId) -> Vec<String> {
    game.tree()
        .prefix(node)
        .iter()
        .enumerate()
        .map(|(t, &s)| spec.states[t][s].clone())
        .collect()
}

/// Actions of `record` at every decision node below `root`.
pub fn equilibrium(spec: &GameSpec, game: &Game, root: NodeId, record: &EquilibriumRecord) -> Value {
    let joint = game.joint();
    let policy: Vec<Value> = game
        .live_nodes(root)
        .into_iter()
        .map(|node| {
            let j = record.policy.joint_action(node);
            let actions: Vec<&str> = (0..joint.players())
                .map(|i| spec.actions[i][joint.action(j, i)].as_str())
                .collect();
            json!({ "prefix": prefix_labels(spec, game, node), "actions": actions })
        })
        .collect();
    json!({
        "value": point(&record.value),
        "slack": point(&record.slack),
        "policy": policy,
    })
}

pub fn dpp(report: &DppReport) -> Value {
    json!({
        "relation": report.relation.name(),
        "lhs": value_set(&report.lhs),
        "rhs": value_set(&report.rhs),
        "lhs_only": points(&report.lhs_only),
        "rhs_only": points(&report.rhs_only),
    })
}

pub fn lq(sigma: f64, demo: &LqDemo, formulas: (f64, f64)) -> Value {
    json!({
        "sigma": sigma,
        "v_closed": demo.v_closed,
        "v_composed": demo.v_composed,
        "formula_closed": formulas.0,
        "formula_composed": formulas.1,
        "first_order_residual": demo.residual,
    })
}

pub fn planner_outcome(outcome: &PlannerOutcome) -> Value {
    match outcome {
        PlannerOutcome::NoEquilibrium => json!({ "status": "no_equilibrium" }),
        PlannerOutcome::Optimum { value, argmin } => json!({
            "status": "optimum",
            "value": rational::format(value),
            "argmin": points(argmin),
        }),
    }
}

pub fn probe(spec: &GameSpec, game: &Game, report: &ProbeReport) -> Value {
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "time": e.time,
                "prefix": prefix_labels(spec, game, e.node),
                "planner": planner_outcome(&e.planner),
                "continuation": point(&e.continuation),
                "continuation_score": rational::format(&e.continuation_score),
                "consistent": e.consistent,
            })
        })
        .collect();
    json!({
        "prefix": prefix_labels(spec, game, report.root),
        "optimum": planner_outcome(&report.optimum),
        "selected": report.selected.as_ref().map(|r| equilibrium(spec, game, report.root, r)),
        "entries": entries,
        "first_inconsistency": report.first_inconsistency,
        "dictatorship": rational::format(&report.dictatorship),
    })
}
