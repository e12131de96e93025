use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{sequent_vars, ProofNode, Rule, Side};
use crate::sequent::{mset_count, mset_diff, mset_eq, mset_member, Contexts, GSequent, Member};
use crate::syntax::{alpha_eq_goal, Goal, Namer, Subst, VarId};

/// The first node, in pre-order, that is not an instance of its rule.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct CheckError {
    /// Child indices from the root.
    pub path: Vec<usize>,
    pub reason: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(usize::to_string).collect();
        write!(f, "at /{}: {}", path.join("/"), self.reason)
    }
}

type Res = Result<(), String>;

fn show<T: Member>(xs: &[T]) -> String {
    let n = Namer::default();
    let items: Vec<String> = xs.iter().map(|x| x.show(&n)).collect();
    format!("{{{}}}", items.join(", "))
}

fn same<T: Member>(what: &str, got: &[T], want: &[T]) -> Res {
    if mset_eq(got, want) {
        Ok(())
    } else {
        Err(format!(
            "{what} is {} but should be {}",
            show(got),
            show(want)
        ))
    }
}

fn same_ctx(what: &str, got: &Contexts, want: &Contexts) -> Res {
    same(&format!("{what} classical program"), &got.psi, &want.psi)?;
    same(&format!("{what} linear program"), &got.gamma, &want.gamma)?;
    same(&format!("{what} atomic context"), &got.lambda, &want.lambda)
}

fn same_focus(what: &str, got: &Option<Goal>, want: &Option<Goal>) -> Res {
    let ok = match (got, want) {
        (None, None) => true,
        (Some(g), Some(h)) => alpha_eq_goal(g, h),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        let show = |g: &Option<Goal>| {
            g.as_ref()
                .map(|g| g.to_string())
                .unwrap_or("nothing".into())
        };
        Err(format!(
            "{what} focus is {} but should be {}",
            show(got),
            show(want)
        ))
    }
}

fn focus_of<'a>(what: &str, s: &'a GSequent) -> Result<&'a Goal, String> {
    s.focus
        .as_ref()
        .ok_or_else(|| format!("{what} has no focused goal"))
}

fn arity(p: &ProofNode, n: usize) -> Res {
    if p.children.len() == n {
        Ok(())
    } else {
        Err(format!(
            "{} expects {n} premises, found {}",
            p.rule.name(),
            p.children.len()
        ))
    }
}

fn check_gr(p: &ProofNode, eigen: &[crate::syntax::Var]) -> Res {
    let goal = focus_of("conclusion", &p.conclusion)?;
    if eigen.len() != goal.binder.len() {
        return Err(format!(
            "renaming has {} eigenvariables for a binder of length {}",
            eigen.len(),
            goal.binder.len()
        ));
    }
    let free = sequent_vars(&p.conclusion);
    let mut seen = BTreeSet::<VarId>::new();
    for v in eigen {
        if !v.is_eigen() {
            return Err(format!("{} is not an eigenvariable", v.name));
        }
        if !seen.insert(v.id) {
            return Err(format!("eigenvariable {} used twice", v.name));
        }
        if free.contains(&v.id) {
            return Err(format!("eigenvariable {} occurs in the conclusion", v.name));
        }
    }
    arity(p, goal.clauses.len())?;
    let terms: Vec<_> = eigen
        .iter()
        .cloned()
        .map(crate::syntax::Term::Var)
        .collect();
    let rho = Subst::zip(&goal.binder, &terms);
    let ctx = &p.conclusion.ctx;
    for (i, (clause, child)) in goal.clauses.iter().zip(&p.children).enumerate() {
        let d = rho.clause(clause);
        let want = Contexts {
            psi: [ctx.psi.clone(), d.cp].concat(),
            gamma: [ctx.gamma.clone(), d.lp].concat(),
            lambda: [ctx.lambda.clone(), d.head].concat(),
        };
        let what = format!("premise {i}");
        same_focus(&what, &child.conclusion.focus, &None)?;
        same_ctx(&what, &child.conclusion.ctx, &want)?;
    }
    Ok(())
}

fn check_gl(
    p: &ProofNode,
    side: Side,
    goal: &Goal,
    l: usize,
    sigma: &[crate::syntax::Term],
) -> Res {
    let c = &p.conclusion;
    if c.focus.is_some() {
        return Err("goal reduction left needs a state sequent".into());
    }
    if goal.is_top() {
        return Err("a goal without clauses cannot be selected".into());
    }
    let gamma = match side {
        Side::Psi if mset_member(goal, &c.ctx.psi) => c.ctx.gamma.clone(),
        Side::Gamma => mset_diff(&c.ctx.gamma, std::slice::from_ref(goal))
            .map_err(|_| format!("selected goal {goal} is not in the linear program"))?,
        Side::Psi => {
            return Err(format!(
                "selected goal {goal} is not in the classical program"
            ))
        }
    };
    let clause = goal
        .clauses
        .get(l)
        .ok_or_else(|| format!("clause {} out of range 1..{}", l + 1, goal.clauses.len()))?;
    if sigma.len() != goal.binder.len() {
        return Err(format!(
            "substitution has {} terms for a binder of length {}",
            sigma.len(),
            goal.binder.len()
        ));
    }
    let d = Subst::zip(&goal.binder, sigma).clause(clause);
    let lambda = mset_diff(&c.ctx.lambda, &d.head)
        .map_err(|e| format!("head does not match the atomic context: {}", e.0))?;
    arity(p, d.cp.len() + d.lp.len())?;
    let (classical, linear) = p.children.split_at(d.cp.len());
    for (j, (g, child)) in d.cp.iter().zip(classical).enumerate() {
        let what = format!("classical premise {j}");
        same_focus(&what, &child.conclusion.focus, &Some(g.clone()))?;
        same_ctx(
            &what,
            &child.conclusion.ctx,
            &Contexts::classical(c.ctx.psi.clone()),
        )?;
    }
    let mut gammas = Vec::new();
    let mut lambdas = Vec::new();
    for (i, (h, child)) in d.lp.iter().zip(linear).enumerate() {
        let what = format!("linear premise {i}");
        same_focus(&what, &child.conclusion.focus, &Some(h.clone()))?;
        same(
            &format!("{what} classical program"),
            &child.conclusion.ctx.psi,
            &c.ctx.psi,
        )?;
        gammas.extend(child.conclusion.ctx.gamma.iter().cloned());
        lambdas.extend(child.conclusion.ctx.lambda.iter().cloned());
    }
    same("union of the premises' linear programs", &gammas, &gamma)?;
    same("union of the premises' atomic contexts", &lambdas, &lambda)
}

fn check_cut_linear(p: &ProofNode, cut: &Goal) -> Res {
    arity(p, 2)?;
    let (l, r) = (&p.children[0].conclusion, &p.children[1].conclusion);
    same_focus("left premise", &l.focus, &Some(cut.clone()))?;
    let r_gamma = mset_diff(&r.ctx.gamma, std::slice::from_ref(cut))
        .map_err(|_| format!("cut goal {cut} is not in the right premise's linear program"))?;
    let want = Contexts {
        psi: [l.ctx.psi.clone(), r.ctx.psi.clone()].concat(),
        gamma: [l.ctx.gamma.clone(), r_gamma].concat(),
        lambda: [l.ctx.lambda.clone(), r.ctx.lambda.clone()].concat(),
    };
    same_focus("conclusion", &p.conclusion.focus, &r.focus)?;
    same_ctx("conclusion", &p.conclusion.ctx, &want)
}

fn check_gen_cut(p: &ProofNode, cut: &Goal, copies: usize) -> Res {
    arity(p, 2)?;
    let (l, r) = (&p.children[0].conclusion, &p.children[1].conclusion);
    same_focus("left premise", &l.focus, &Some(cut.clone()))?;
    if !l.ctx.is_linear_empty() {
        return Err("left premise of a classical cut must have empty linear contexts".into());
    }
    if mset_count(cut, &r.ctx.psi) < copies {
        return Err(format!(
            "right premise has fewer than {copies} copies of {cut}"
        ));
    }
    let cuts = vec![cut.clone(); copies];
    let r_psi = mset_diff(&r.ctx.psi, &cuts).map_err(|e| e.to_string())?;
    let want = Contexts {
        psi: [l.ctx.psi.clone(), r_psi].concat(),
        gamma: r.ctx.gamma.clone(),
        lambda: r.ctx.lambda.clone(),
    };
    same_focus("conclusion", &p.conclusion.focus, &r.focus)?;
    same_ctx("conclusion", &p.conclusion.ctx, &want)
}

fn check_contract(p: &ProofNode, goal: &Goal) -> Res {
    arity(p, 1)?;
    let c = &p.conclusion;
    if !mset_member(goal, &c.ctx.psi) {
        return Err(format!(
            "contracted goal {goal} is not in the classical program"
        ));
    }
    let premise = &p.children[0].conclusion;
    let want = Contexts {
        psi: [c.ctx.psi.clone(), vec![goal.clone()]].concat(),
        gamma: c.ctx.gamma.clone(),
        lambda: c.ctx.lambda.clone(),
    };
    same_focus("premise", &premise.focus, &c.focus)?;
    same_ctx("premise", &premise.ctx, &want)
}

fn check_node(p: &ProofNode) -> Res {
    match &p.rule {
        Rule::GoalRight { eigen } => check_gr(p, eigen),
        Rule::GoalLeft {
            side,
            goal,
            clause,
            sigma,
        } => check_gl(p, *side, goal, *clause, sigma),
        Rule::CutLinear { cut } => check_cut_linear(p, cut),
        Rule::GenCutClassical { cut, copies } => check_gen_cut(p, cut, *copies),
        Rule::Contract { goal } => check_contract(p, goal),
    }
}

/// Re-derives every rule instance of the proof.
pub fn check(p: &ProofNode) -> Result<(), CheckError> {
    let mut path = Vec::new();
    walk(p, &mut path)
}

fn walk(p: &ProofNode, path: &mut Vec<usize>) -> Result<(), CheckError> {
    check_node(p).map_err(|reason| CheckError {
        path: path.clone(),
        reason,
    })?;
    for (i, c) in p.children.iter().enumerate() {
        path.push(i);
        walk(c, path)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_goal, Atom, Term, Var};

    fn g(s: &str) -> Goal {
        parse_goal(s).unwrap()
    }

    fn at(s: &str) -> Atom {
        parse_atom(s).unwrap()
    }

    fn state(psi: &[&str], gamma: &[&str], lambda: &[&str]) -> GSequent {
        GSequent::state(Contexts {
            psi: psi.iter().map(|s| g(s)).collect(),
            gamma: gamma.iter().map(|s| g(s)).collect(),
            lambda: lambda.iter().map(|s| at(s)).collect(),
        })
    }

    /// [;a, a -o b |- b] through a -o b, then a.
    fn sample() -> ProofNode {
        let gr_a = ProofNode::new(
            Rule::GoalRight { eigen: vec![] },
            GSequent::focused(Contexts::new(vec![], vec![g("a")], vec![]), g("a")),
            vec![ProofNode::new(
                Rule::GoalLeft {
                    side: Side::Gamma,
                    goal: g("a"),
                    clause: 0,
                    sigma: vec![],
                },
                state(&[], &["a"], &["a"]),
                vec![],
            )],
        );
        ProofNode::new(
            Rule::GoalLeft {
                side: Side::Gamma,
                goal: g("a -o b"),
                clause: 0,
                sigma: vec![],
            },
            state(&[], &["a", "a -o b"], &["b"]),
            vec![gr_a],
        )
    }

    #[test]
    fn accepts_valid_proof() {
        check(&sample()).unwrap();
    }

    #[test]
    fn deleted_atom_is_reported_at_its_node() {
        let mut p = sample();
        p.children[0].children[0].conclusion.ctx.lambda.clear();
        let e = check(&p).unwrap_err();
        assert_eq!(e.path, vec![0]);
    }

    #[test]
    fn eigenvariable_must_be_fresh() {
        let x = Var::eigen("x", 1);
        let goal = g("forall y. top");
        let mut ctx = Contexts::default();
        ctx.lambda.push(Atom::new("p", vec![Term::Var(x.clone())]));
        let p = ProofNode::new(
            Rule::GoalRight { eigen: vec![x] },
            GSequent::focused(ctx, goal),
            vec![],
        );
        let e = check(&p).unwrap_err();
        assert!(e.reason.contains("occurs in the conclusion"), "{e}");
        let fresh = Var::eigen("z", 1);
        let ok = ProofNode::new(
            Rule::GoalRight { eigen: vec![fresh] },
            GSequent::focused(Contexts::default(), g("forall y. top")),
            vec![],
        );
        check(&ok).unwrap();
    }

    #[test]
    fn classical_selection_keeps_goal() {
        let p = ProofNode::new(
            Rule::GoalLeft {
                side: Side::Psi,
                goal: g("a"),
                clause: 0,
                sigma: vec![],
            },
            state(&["a"], &[], &["a"]),
            vec![],
        );
        check(&p).unwrap();
        let mut q = p.clone();
        q.rule = Rule::GoalLeft {
            side: Side::Gamma,
            goal: g("a"),
            clause: 0,
            sigma: vec![],
        };
        assert!(check(&q).is_err());
    }

    #[test]
    fn cuts_and_contraction() {
        let left = ProofNode::new(
            Rule::GoalRight { eigen: vec![] },
            GSequent::focused(Contexts::default(), g("top")),
            vec![],
        );
        let right = ProofNode::new(
            Rule::GoalRight { eigen: vec![] },
            GSequent::focused(
                Contexts::new(vec![g("top"), g("top")], vec![], vec![]),
                g("top"),
            ),
            vec![],
        );
        let cut = ProofNode::new(
            Rule::GenCutClassical {
                cut: g("top"),
                copies: 2,
            },
            GSequent::focused(Contexts::default(), g("top")),
            vec![left.clone(), right.clone()],
        );
        check(&cut).unwrap();
        let mut bad = cut.clone();
        bad.rule = Rule::GenCutClassical {
            cut: g("top"),
            copies: 1,
        };
        assert!(check(&bad).is_err());
        let contract = ProofNode::new(
            Rule::Contract { goal: g("top") },
            GSequent::focused(Contexts::new(vec![g("top")], vec![], vec![]), g("top")),
            vec![right],
        );
        check(&contract).unwrap();
    }
}
