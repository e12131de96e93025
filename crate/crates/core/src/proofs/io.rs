//! JSON form of sequents and proofs.
//!
//! Formulae are written in the text grammar. Free eigenvariables and
//! metavariables get stable names of the form `x_1`; when a proof is read
//! back, names listed by goal reductions on the right become
//! eigenvariables again and any other free name reads as a constant.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{ProofNode, Rule, Side};
use crate::normalize::{foll_to_forum, formula_to_goal, NormalizeError};
use crate::sequent::{Contexts, GSequent};
use crate::syntax::{
    print_atom, print_goal, print_term, Atom, Clause, Goal, Namer, ParseError, Parser, Term, Var,
    VarRole,
};

#[derive(Debug, Error)]
pub enum ProofIoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error("{0}")]
    Format(String),
}

#[derive(Serialize, Deserialize)]
struct SequentJson {
    #[serde(default)]
    psi: Vec<String>,
    #[serde(default)]
    gamma: Vec<String>,
    #[serde(default)]
    focus: Option<String>,
    #[serde(default)]
    lambda: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    rule: String,
    conclusion: SequentJson,
    #[serde(default)]
    payload: Value,
    #[serde(default)]
    children: Vec<NodeJson>,
}

#[derive(Deserialize)]
struct GrPayload {
    #[serde(default)]
    eigen: Vec<String>,
}

#[derive(Deserialize)]
struct GlPayload {
    side: String,
    goal: String,
    clause: usize,
    #[serde(default)]
    sigma: Vec<String>,
}

#[derive(Deserialize)]
struct CutPayload {
    cut: String,
    #[serde(default = "one")]
    copies: usize,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
struct ContractPayload {
    goal: String,
}

fn term_vars(t: &Term, out: &mut Vec<Var>) {
    match t {
        Term::Var(v) => out.push(v.clone()),
        Term::App(_, args) => args.iter().for_each(|a| term_vars(a, out)),
    }
}

fn atom_vars(a: &Atom, out: &mut Vec<Var>) {
    a.args.iter().for_each(|t| term_vars(t, out));
}

fn goal_vars(g: &Goal, out: &mut Vec<Var>) {
    g.clauses.iter().for_each(|c| clause_vars(c, out));
}

fn clause_vars(c: &Clause, out: &mut Vec<Var>) {
    c.cp.iter().chain(&c.lp).for_each(|g| goal_vars(g, out));
    c.head.iter().for_each(|a| atom_vars(a, out));
}

fn sequent_parts(s: &GSequent, out: &mut Vec<Var>, syms: &mut BTreeSet<Arc<str>>) {
    for g in s.ctx.psi.iter().chain(&s.ctx.gamma).chain(&s.focus) {
        goal_vars(g, out);
        g.symbols(syms);
    }
    for a in &s.ctx.lambda {
        atom_vars(a, out);
        a.symbols(syms);
    }
}

/// Names every eigenvariable and metavariable of the given sequents and
/// proof payloads, in order of first appearance.
fn namer_for(vars: &[Var], syms: &BTreeSet<Arc<str>>) -> Namer {
    let mut namer = Namer::new();
    let mut used: HashSet<String> = syms.iter().map(|s| s.to_string()).collect();
    let mut next: HashMap<String, usize> = HashMap::new();
    for v in vars {
        if matches!(v.role, VarRole::Bound) || namer.contains(v.id) {
            continue;
        }
        let base = v
            .name
            .trim_end_matches(|c: char| c.is_ascii_digit() || c == '_' || c == '\'');
        let base = if base.is_empty() { "v" } else { base };
        loop {
            let n = next.entry(base.to_string()).or_insert(0);
            *n += 1;
            let name = format!("{base}_{n}");
            if used.insert(name.clone()) {
                namer.set(v.id, name);
                break;
            }
        }
    }
    namer
}

fn sorted(mut xs: Vec<String>) -> Vec<String> {
    xs.sort();
    xs
}

fn sequent_json(s: &GSequent, namer: &Namer) -> SequentJson {
    SequentJson {
        psi: sorted(s.ctx.psi.iter().map(|g| print_goal(g, namer)).collect()),
        gamma: sorted(s.ctx.gamma.iter().map(|g| print_goal(g, namer)).collect()),
        focus: s.focus.as_ref().map(|g| print_goal(g, namer)),
        lambda: sorted(s.ctx.lambda.iter().map(|a| print_atom(a, namer)).collect()),
    }
}

/// Writes a sequent with canonically ordered contexts.
pub fn sequent_to_json(s: &GSequent) -> Value {
    let mut vars = Vec::new();
    let mut syms = BTreeSet::new();
    sequent_parts(s, &mut vars, &mut syms);
    serde_json::to_value(sequent_json(s, &namer_for(&vars, &syms))).expect("serializable")
}

fn lenient_goal(parser: &mut Parser, text: &str) -> Result<Goal, ProofIoError> {
    let f = parser.formula(text)?;
    if let Some(g) = Goal::from_formula(&f) {
        return Ok(g);
    }
    Ok(formula_to_goal(&foll_to_forum(&f))?)
}

/// Reads a sequent. Formulae that are not goals are translated into
/// equivalent goals.
pub fn sequent_from_json(text: &str) -> Result<GSequent, ProofIoError> {
    let raw: SequentJson = serde_json::from_str(text)?;
    let mut parser = Parser::new();
    let goals = |xs: &[String], p: &mut Parser| -> Result<Vec<Goal>, ProofIoError> {
        xs.iter().map(|s| lenient_goal(p, s)).collect()
    };
    let psi = goals(&raw.psi, &mut parser)?;
    let gamma = goals(&raw.gamma, &mut parser)?;
    let focus = raw
        .focus
        .as_deref()
        .map(|s| lenient_goal(&mut parser, s))
        .transpose()?;
    let lambda = raw
        .lambda
        .iter()
        .map(|s| parser.atom(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GSequent {
        ctx: Contexts { psi, gamma, lambda },
        focus,
    })
}

fn collect(p: &ProofNode, vars: &mut Vec<Var>, syms: &mut BTreeSet<Arc<str>>) {
    sequent_parts(&p.conclusion, vars, syms);
    match &p.rule {
        Rule::GoalRight { eigen } => vars.extend(eigen.iter().cloned()),
        Rule::GoalLeft { goal, sigma, .. } => {
            goal_vars(goal, vars);
            goal.symbols(syms);
            for t in sigma {
                term_vars(t, vars);
                t.symbols(syms);
            }
        }
        Rule::CutLinear { cut: g }
        | Rule::GenCutClassical { cut: g, .. }
        | Rule::Contract { goal: g } => {
            goal_vars(g, vars);
            g.symbols(syms);
        }
    }
    p.children.iter().for_each(|c| collect(c, vars, syms));
}

fn node_json(p: &ProofNode, namer: &Namer) -> NodeJson {
    let payload = match &p.rule {
        Rule::GoalRight { eigen } => json!({
            "eigen": eigen.iter().map(|v| print_term(&Term::Var(v.clone()), namer)).collect::<Vec<_>>()
        }),
        Rule::GoalLeft {
            side,
            goal,
            clause,
            sigma,
        } => json!({
            "side": side.name(),
            "goal": print_goal(goal, namer),
            "clause": clause + 1,
            "sigma": sigma.iter().map(|t| print_term(t, namer)).collect::<Vec<_>>(),
        }),
        Rule::CutLinear { cut } => json!({ "cut": print_goal(cut, namer) }),
        Rule::GenCutClassical { cut, copies } => {
            json!({ "cut": print_goal(cut, namer), "copies": copies })
        }
        Rule::Contract { goal } => json!({ "goal": print_goal(goal, namer) }),
    };
    NodeJson {
        rule: p.rule.name().to_string(),
        conclusion: sequent_json(&p.conclusion, namer),
        payload,
        children: p.children.iter().map(|c| node_json(c, namer)).collect(),
    }
}

/// Writes a proof as a JSON tree.
pub fn proof_to_json(p: &ProofNode) -> Value {
    let mut vars = Vec::new();
    let mut syms = BTreeSet::new();
    collect(p, &mut vars, &mut syms);
    let namer = namer_for(&vars, &syms);
    serde_json::to_value(node_json(p, &namer)).expect("serializable")
}

fn eigen_names(n: &NodeJson, out: &mut BTreeSet<String>) -> Result<(), ProofIoError> {
    if n.rule == "GR" {
        let payload: GrPayload = serde_json::from_value(n.payload.clone())?;
        out.extend(payload.eigen);
    }
    n.children.iter().try_for_each(|c| eigen_names(c, out))
}

fn payload<T: serde::de::DeserializeOwned>(n: &NodeJson) -> Result<T, ProofIoError> {
    serde_json::from_value(n.payload.clone())
        .map_err(|e| ProofIoError::Format(format!("bad {} payload: {e}", n.rule)))
}

fn read_node(n: &NodeJson, parser: &mut Parser) -> Result<ProofNode, ProofIoError> {
    let c = &n.conclusion;
    let goals = |xs: &[String], p: &mut Parser| -> Result<Vec<Goal>, ProofIoError> {
        xs.iter().map(|s| Ok(p.goal(s)?)).collect()
    };
    let psi = goals(&c.psi, parser)?;
    let gamma = goals(&c.gamma, parser)?;
    let focus = c.focus.as_deref().map(|s| parser.goal(s)).transpose()?;
    let lambda = c
        .lambda
        .iter()
        .map(|s| parser.atom(s))
        .collect::<Result<Vec<_>, _>>()?;
    let conclusion = GSequent {
        ctx: Contexts { psi, gamma, lambda },
        focus,
    };
    let rule = match n.rule.as_str() {
        "GR" => {
            let p: GrPayload = payload(n)?;
            let eigen = p
                .eigen
                .iter()
                .map(|name| parser.env[name].clone())
                .collect();
            Rule::GoalRight { eigen }
        }
        "GL" => {
            let p: GlPayload = payload(n)?;
            let side = match p.side.as_str() {
                "psi" => Side::Psi,
                "gamma" => Side::Gamma,
                other => return Err(ProofIoError::Format(format!("unknown side {other:?}"))),
            };
            if p.clause == 0 {
                return Err(ProofIoError::Format("clause numbers start at 1".into()));
            }
            let sigma = p
                .sigma
                .iter()
                .map(|t| parser.term(t))
                .collect::<Result<Vec<_>, _>>()?;
            Rule::GoalLeft {
                side,
                goal: parser.goal(&p.goal)?,
                clause: p.clause - 1,
                sigma,
            }
        }
        "CutLinear" => {
            let p: CutPayload = payload(n)?;
            Rule::CutLinear {
                cut: parser.goal(&p.cut)?,
            }
        }
        "GenCutClassical" => {
            let p: CutPayload = payload(n)?;
            Rule::GenCutClassical {
                cut: parser.goal(&p.cut)?,
                copies: p.copies,
            }
        }
        "CutClassical" => {
            let p: CutPayload = payload(n)?;
            Rule::GenCutClassical {
                cut: parser.goal(&p.cut)?,
                copies: 1,
            }
        }
        "Contract" => {
            let p: ContractPayload = payload(n)?;
            Rule::Contract {
                goal: parser.goal(&p.goal)?,
            }
        }
        other => return Err(ProofIoError::Format(format!("unknown rule {other:?}"))),
    };
    let children = n
        .children
        .iter()
        .map(|c| read_node(c, parser))
        .collect::<Result<_, _>>()?;
    Ok(ProofNode {
        rule,
        conclusion,
        children,
    })
}

/// Reads a proof written by [`proof_to_json`] or by hand.
pub fn proof_from_json(text: &str) -> Result<ProofNode, ProofIoError> {
    let raw: NodeJson = serde_json::from_str(text)?;
    let mut names = BTreeSet::new();
    eigen_names(&raw, &mut names)?;
    let mut parser = Parser::new();
    for name in names {
        parser.env.insert(name.clone(), Var::eigen(&name, 0));
    }
    read_node(&raw, &mut parser)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::check;
    use crate::sequent::seq_eq;

    #[test]
    fn sequent_round_trip_and_lenient_reading() {
        let s = sequent_from_json(
            r#"{"psi":["a"],"gamma":["b * c","a -o b"],"focus":null,"lambda":["b"]}"#,
        )
        .unwrap();
        assert!(s.ctx.gamma[0].to_formula().is_forum());
        let back = sequent_from_json(&sequent_to_json(&s).to_string()).unwrap();
        assert!(seq_eq(&s, &back));
    }

    #[test]
    fn proof_round_trip() {
        let text = r#"{
          "rule": "GL",
          "conclusion": {"psi": [], "gamma": ["forall x. (p(x) -o q)"], "focus": null, "lambda": ["q"]},
          "payload": {"side": "gamma", "goal": "forall x. (p(x) -o q)", "clause": 1, "sigma": ["c"]},
          "children": [{
            "rule": "GR",
            "conclusion": {"psi": [], "gamma": [], "focus": "p(c)", "lambda": []},
            "payload": {"eigen": []},
            "children": [{
              "rule": "GL",
              "conclusion": {"psi": [], "gamma": [], "focus": null, "lambda": ["p(c)"]},
              "payload": {"side": "psi", "goal": "p(c)", "clause": 1, "sigma": []},
              "children": []
            }]
          }]
        }"#;
        let p = proof_from_json(text).unwrap();
        let e = check(&p).unwrap_err();
        assert_eq!(e.path, vec![0, 0]);
        let again = proof_from_json(&proof_to_json(&p).to_string()).unwrap();
        assert_eq!(proof_to_json(&again), proof_to_json(&p));
    }

    #[test]
    fn eigenvariables_survive() {
        let text = r#"{
          "rule": "GR",
          "conclusion": {"psi": [], "gamma": [], "focus": "forall x. top", "lambda": []},
          "payload": {"eigen": ["x_1"]},
          "children": []
        }"#;
        let p = proof_from_json(text).unwrap();
        check(&p).unwrap();
        let Rule::GoalRight { eigen } = &p.rule else {
            panic!()
        };
        assert!(eigen[0].is_eigen());
        let out = proof_to_json(&p);
        assert_eq!(out["payload"]["eigen"][0], "x_1");
    }
}
