use thiserror::Error;

use super::{check_derivation, forum_seq_eq, Derivation, ForumRule, ForumSequent, Right};
use crate::proofs::{ProofNode, Rule, Side};
use crate::sequent::{mset_diff, mset_remove};
use crate::syntax::{goal_to_formula, BinOp, Formula, Quant, Subst, Term, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("macro expansion mismatch: {0}")]
pub struct ExpansionMismatch(pub String);

fn mismatch<T>(msg: impl Into<String>) -> Result<T, ExpansionMismatch> {
    Err(ExpansionMismatch(msg.into()))
}

/// The elementary derivation forced by a goal reduction node, with the
/// node's premises as open leaves. Every step is checked, and the open
/// leaves must be exactly the node's premises.
pub fn expand_macro(node: &ProofNode) -> Result<Derivation, ExpansionMismatch> {
    let root = ForumSequent::from_gsequent(&node.conclusion);
    let d = match &node.rule {
        Rule::GoalRight { eigen } => {
            if node.conclusion.focus.is_none() {
                return mismatch("goal reduction on the right of a state sequent");
            }
            let mut eigen = eigen.iter();
            let d = expand_right(root.clone(), &mut eigen)?;
            if eigen.next().is_some() {
                return mismatch("more eigenvariables than binders");
            }
            d
        }
        Rule::GoalLeft {
            side,
            goal,
            clause,
            sigma,
        } => {
            if node.conclusion.focus.is_some() {
                return mismatch("goal reduction on the left of a focused sequent");
            }
            expand_left(
                node,
                root.clone(),
                *side,
                &goal_to_formula(goal),
                goal.clauses.len(),
                *clause,
                sigma,
            )?
        }
        r => return mismatch(format!("{} is not a macro rule", r.name())),
    };
    if !forum_seq_eq(&d.conclusion, &root) {
        return mismatch("root differs from the conclusion");
    }
    let leaves = d.premises();
    if leaves.len() != node.children.len() {
        return mismatch(format!(
            "{} open leaves for {} premises",
            leaves.len(),
            node.children.len()
        ));
    }
    for (i, (leaf, child)) in leaves.iter().zip(&node.children).enumerate() {
        let want = ForumSequent::from_gsequent(&child.conclusion);
        if !forum_seq_eq(leaf, &want) {
            return mismatch(format!("open leaf {i} is {leaf}, premise is {want}"));
        }
    }
    check_derivation(&d).map_err(ExpansionMismatch)?;
    Ok(d)
}

fn expand_right<'a>(
    s: ForumSequent,
    eigen: &mut impl Iterator<Item = &'a Var>,
) -> Result<Derivation, ExpansionMismatch> {
    let xs = match &s.right {
        Right::Xi(xs) if xs.is_empty() => return Ok(Derivation::open(s)),
        Right::Xi(xs) => xs.clone(),
        Right::Focus(_) => return mismatch("left focus during right expansion"),
    };
    let rest = xs[1..].to_vec();
    let with = |xi: Vec<Formula>| ForumSequent {
        right: Right::Xi(xi),
        ..s.clone()
    };
    let (rule, premise) = match &xs[0] {
        Formula::Top => return Ok(Derivation::new(ForumRule::TopR, s, vec![])),
        Formula::Atom(a) => {
            let mut p = with(rest);
            p.lambda.push(a.clone());
            (ForumRule::Atom, p)
        }
        Formula::Bot => (ForumRule::BotR, with(rest)),
        Formula::Bin(BinOp::Par, a, b) => (
            ForumRule::ParR,
            with([vec![(**a).clone(), (**b).clone()], rest].concat()),
        ),
        Formula::Bin(BinOp::With, a, b) => {
            let l = expand_right(with([vec![(**a).clone()], rest.clone()].concat()), eigen)?;
            let r = expand_right(with([vec![(**b).clone()], rest].concat()), eigen)?;
            return Ok(Derivation::new(ForumRule::WithR, s, vec![l, r]));
        }
        Formula::Bin(BinOp::Lolli, a, b) => {
            let mut p = with([vec![(**b).clone()], rest].concat());
            p.gamma.push((**a).clone());
            (ForumRule::LolliR, p)
        }
        Formula::Bin(BinOp::Imp, a, b) => {
            let mut p = with([vec![(**b).clone()], rest].concat());
            p.psi.push((**a).clone());
            (ForumRule::ImpR, p)
        }
        Formula::Quant(Quant::Forall, v, body) => {
            let Some(y) = eigen.next() else {
                return mismatch("fewer eigenvariables than binders");
            };
            let y = Term::Var(y.clone());
            let inst = Subst::single(v, y.clone()).formula(body);
            let child = expand_right(with([vec![inst], rest].concat()), eigen)?;
            let mut d = Derivation::new(ForumRule::ForallR, s, vec![child]);
            d.witness = Some(y);
            return Ok(d);
        }
        f => return mismatch(format!("{f:?} is outside the Forum fragment")),
    };
    let child = expand_right(premise, eigen)?;
    Ok(Derivation::new(rule, s, vec![child]))
}

fn focused(s: &ForumSequent, f: Formula) -> ForumSequent {
    ForumSequent {
        right: Right::Focus(f),
        ..s.clone()
    }
}

fn expand_left(
    node: &ProofNode,
    root: ForumSequent,
    side: Side,
    goal: &Formula,
    clauses: usize,
    l: usize,
    sigma: &[Term],
) -> Result<Derivation, ExpansionMismatch> {
    let (rule, inner) = match side {
        Side::Gamma => {
            let mut gamma = root.gamma.clone();
            if !mset_remove(&mut gamma, goal) {
                return mismatch("selected goal is not in the linear program");
            }
            (
                ForumRule::DecideLinear,
                ForumSequent {
                    gamma,
                    right: Right::Focus(goal.clone()),
                    ..root.clone()
                },
            )
        }
        Side::Psi => (ForumRule::DecideClassical, focused(&root, goal.clone())),
    };
    let child = instantiate(node, inner, sigma, clauses, l)?;
    Ok(Derivation::new(rule, root, vec![child]))
}

fn instantiate(
    node: &ProofNode,
    s: ForumSequent,
    sigma: &[Term],
    clauses: usize,
    l: usize,
) -> Result<Derivation, ExpansionMismatch> {
    let Right::Focus(f) = &s.right else {
        unreachable!()
    };
    if let Some((t, rest)) = sigma.split_first() {
        let Formula::Quant(Quant::Forall, v, body) = f else {
            return mismatch("more terms than binders");
        };
        let inst = Subst::single(v, t.clone()).formula(body);
        let child = instantiate(node, focused(&s, inst), rest, clauses, l)?;
        let mut d = Derivation::new(ForumRule::ForallL, s, vec![child]);
        d.witness = Some(t.clone());
        return Ok(d);
    }
    if matches!(f, Formula::Quant(..)) {
        return mismatch("fewer terms than binders");
    }
    select(node, s, clauses, l)
}

fn select(
    node: &ProofNode,
    s: ForumSequent,
    h: usize,
    l: usize,
) -> Result<Derivation, ExpansionMismatch> {
    if h <= 1 {
        return clause(node, s, 0);
    }
    let Right::Focus(Formula::Bin(BinOp::With, a, b)) = &s.right else {
        return mismatch("expected a with");
    };
    let (rule, child) = if l == h - 1 {
        (
            ForumRule::WithLR,
            clause(node, focused(&s, (**b).clone()), 0)?,
        )
    } else {
        (
            ForumRule::WithLL,
            select(node, focused(&s, (**a).clone()), h - 1, l)?,
        )
    };
    Ok(Derivation::new(rule, s, vec![child]))
}

/// Premises of the clause, in order; `next` counts those already used.
fn clause(node: &ProofNode, s: ForumSequent, next: usize) -> Result<Derivation, ExpansionMismatch> {
    let Right::Focus(f) = &s.right else {
        unreachable!()
    };
    match f {
        Formula::Bin(BinOp::Imp, a, b) => {
            let left = Derivation::open(ForumSequent::unfocused(
                s.psi.clone(),
                vec![],
                vec![(**a).clone()],
                vec![],
            ));
            let right = clause(node, focused(&s, (**b).clone()), next + 1)?;
            Ok(Derivation::new(ForumRule::ImpL, s, vec![left, right]))
        }
        Formula::Bin(BinOp::Lolli, a, b) => {
            let Some(child) = node.children.get(next) else {
                return mismatch("missing linear premise");
            };
            let part = ForumSequent::from_gsequent(&child.conclusion);
            let gamma = mset_diff(&s.gamma, &part.gamma)
                .or_else(|e| mismatch(format!("linear program: {e}")))?;
            let lambda = mset_diff(&s.lambda, &part.lambda)
                .or_else(|e| mismatch(format!("atomic context: {e}")))?;
            let left = Derivation::open(ForumSequent::unfocused(
                s.psi.clone(),
                part.gamma,
                vec![(**a).clone()],
                part.lambda,
            ));
            let rest = ForumSequent {
                gamma,
                lambda,
                right: Right::Focus((**b).clone()),
                psi: s.psi.clone(),
            };
            let right = clause(node, rest, next + 1)?;
            Ok(Derivation::new(ForumRule::LolliL, s, vec![left, right]))
        }
        _ => head(s),
    }
}

fn head(s: ForumSequent) -> Result<Derivation, ExpansionMismatch> {
    let Right::Focus(f) = &s.right else {
        unreachable!()
    };
    match f {
        Formula::Bot => Ok(Derivation::new(ForumRule::BotL, s, vec![])),
        Formula::Atom(_) => Ok(Derivation::new(ForumRule::Init, s, vec![])),
        Formula::Bin(BinOp::Par, a, b) => {
            let Formula::Atom(last) = &**b else {
                return mismatch("head is not a par of atoms");
            };
            let lambda = mset_diff(&s.lambda, std::slice::from_ref(last))
                .or_else(|e| mismatch(format!("head atom not available: {e}")))?;
            let left = head(ForumSequent {
                lambda,
                right: Right::Focus((**a).clone()),
                ..s.clone()
            })?;
            let right = head(ForumSequent {
                gamma: vec![],
                lambda: vec![last.clone()],
                right: Right::Focus((**b).clone()),
                psi: s.psi.clone(),
            })?;
            Ok(Derivation::new(ForumRule::ParL, s, vec![left, right]))
        }
        f => mismatch(format!("unexpected head {f:?}")),
    }
}

/// Expands every goal reduction of a proof; returns how many there were.
pub fn expand_all(p: &ProofNode) -> Result<usize, ExpansionMismatch> {
    let mut n = 0;
    for node in p.nodes() {
        if matches!(node.rule, Rule::GoalRight { .. } | Rule::GoalLeft { .. }) {
            expand_macro(node)?;
            n += 1;
        }
    }
    Ok(n)
}
