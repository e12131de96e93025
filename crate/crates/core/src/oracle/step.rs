use super::{forum_seq_eq, Derivation, ForumRule, ForumSequent, Right};
use crate::sequent::{mset_eq, mset_member, mset_union};
use crate::syntax::{alpha_eq_formula, BinOp, Formula, Quant, Subst, Term};

type Res = Result<(), String>;

fn arity(d: &Derivation, n: usize) -> Res {
    if d.children.len() != n {
        return Err(format!(
            "{} expects {n} premises, found {}",
            d.rule.name(),
            d.children.len()
        ));
    }
    Ok(())
}

fn expect(ok: bool, what: &str) -> Res {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn premise(d: &Derivation, i: usize) -> &ForumSequent {
    &d.children[i].conclusion
}

fn xi(s: &ForumSequent) -> Option<&[Formula]> {
    match &s.right {
        Right::Xi(xs) => Some(xs),
        Right::Focus(_) => None,
    }
}

fn focus(s: &ForumSequent) -> Option<&Formula> {
    match &s.right {
        Right::Focus(f) => Some(f),
        Right::Xi(_) => None,
    }
}

/// Premise equal to the conclusion except for the listed changes.
fn same_except(
    c: &ForumSequent,
    p: &ForumSequent,
    psi: &[Formula],
    gamma: &[Formula],
    right: Right,
    lambda: &[crate::syntax::Atom],
) -> Res {
    let want = ForumSequent {
        psi: mset_union(&c.psi, psi),
        gamma: mset_union(&c.gamma, gamma),
        right,
        lambda: mset_union(&c.lambda, lambda),
    };
    expect(
        forum_seq_eq(&want, p),
        &format!("premise {p} does not match the expected {want}"),
    )
}

fn split_ok(c: &ForumSequent, a: &ForumSequent, b: &ForumSequent) -> Res {
    expect(
        mset_eq(&c.psi, &a.psi) && mset_eq(&c.psi, &b.psi),
        "premises must keep the classical context",
    )?;
    expect(
        mset_eq(&mset_union(&a.gamma, &b.gamma), &c.gamma),
        "premises do not split the linear context",
    )?;
    expect(
        mset_eq(&mset_union(&a.lambda, &b.lambda), &c.lambda),
        "premises do not split the atomic context",
    )
}

fn instance(body: &Formula, v: &crate::syntax::Var, t: &Term) -> Formula {
    Subst::single(v, t.clone()).formula(body)
}

/// Checks one rule application against its premises.
pub fn check_step(d: &Derivation) -> Res {
    let c = &d.conclusion;
    let bin = |f: Option<&Formula>, op: BinOp| match f {
        Some(Formula::Bin(o, a, b)) if *o == op => Some(((**a).clone(), (**b).clone())),
        _ => None,
    };
    let head = xi(c).and_then(|xs| xs.first().map(|f| (f, xs[1..].to_vec())));
    let name = d.rule.name();
    let bad = || format!("{name} does not apply to {c}");
    match d.rule {
        ForumRule::Open => arity(d, 0),
        ForumRule::Init => {
            arity(d, 0)?;
            match focus(c) {
                Some(Formula::Atom(a)) => expect(
                    c.gamma.is_empty() && mset_eq(&c.lambda, std::slice::from_ref(a)),
                    &bad(),
                ),
                _ => Err(bad()),
            }
        }
        ForumRule::DecideLinear | ForumRule::DecideClassical => {
            arity(d, 1)?;
            expect(c.is_state(), &bad())?;
            let p = premise(d, 0);
            let a = focus(p).ok_or_else(bad)?;
            if d.rule == ForumRule::DecideLinear {
                expect(
                    mset_member(a, &c.gamma),
                    "decided formula is not in the linear context",
                )?;
                let gamma = mset_union(&p.gamma, std::slice::from_ref(a));
                expect(mset_eq(&gamma, &c.gamma), "linear context changed")?;
            } else {
                expect(
                    mset_member(a, &c.psi),
                    "decided formula is not in the classical context",
                )?;
                expect(mset_eq(&p.gamma, &c.gamma), "linear context changed")?;
            }
            expect(
                mset_eq(&p.psi, &c.psi) && mset_eq(&p.lambda, &c.lambda),
                "context changed",
            )
        }
        ForumRule::Atom => {
            arity(d, 1)?;
            match head {
                Some((Formula::Atom(a), rest)) => same_except(
                    c,
                    premise(d, 0),
                    &[],
                    &[],
                    Right::Xi(rest),
                    std::slice::from_ref(a),
                ),
                _ => Err(bad()),
            }
        }
        ForumRule::BotL => {
            arity(d, 0)?;
            expect(
                matches!(focus(c), Some(Formula::Bot)) && c.gamma.is_empty() && c.lambda.is_empty(),
                &bad(),
            )
        }
        ForumRule::BotR => {
            arity(d, 1)?;
            match head {
                Some((Formula::Bot, rest)) => {
                    same_except(c, premise(d, 0), &[], &[], Right::Xi(rest), &[])
                }
                _ => Err(bad()),
            }
        }
        ForumRule::TopR => {
            arity(d, 0)?;
            expect(matches!(head, Some((Formula::Top, _))), &bad())
        }
        ForumRule::ParL => {
            arity(d, 2)?;
            let (a, b) = bin(focus(c), BinOp::Par).ok_or_else(bad)?;
            let (p, q) = (premise(d, 0), premise(d, 1));
            expect(
                focus(p).is_some_and(|f| alpha_eq_formula(f, &a)),
                "left premise must focus the left component",
            )?;
            expect(
                focus(q).is_some_and(|f| alpha_eq_formula(f, &b)),
                "right premise must focus the right component",
            )?;
            split_ok(c, p, q)
        }
        ForumRule::ParR => {
            arity(d, 1)?;
            let (f, rest) = head.ok_or_else(bad)?;
            let (a, b) = bin(Some(f), BinOp::Par).ok_or_else(bad)?;
            same_except(
                c,
                premise(d, 0),
                &[],
                &[],
                Right::Xi([vec![a, b], rest].concat()),
                &[],
            )
        }
        ForumRule::WithLL | ForumRule::WithLR => {
            arity(d, 1)?;
            let (a, b) = bin(focus(c), BinOp::With).ok_or_else(bad)?;
            let pick = if d.rule == ForumRule::WithLL { a } else { b };
            same_except(c, premise(d, 0), &[], &[], Right::Focus(pick), &[])
        }
        ForumRule::WithR => {
            arity(d, 2)?;
            let (f, rest) = head.ok_or_else(bad)?;
            let (a, b) = bin(Some(f), BinOp::With).ok_or_else(bad)?;
            same_except(
                c,
                premise(d, 0),
                &[],
                &[],
                Right::Xi([vec![a], rest.clone()].concat()),
                &[],
            )?;
            same_except(
                c,
                premise(d, 1),
                &[],
                &[],
                Right::Xi([vec![b], rest].concat()),
                &[],
            )
        }
        ForumRule::LolliL => {
            arity(d, 2)?;
            let (a, b) = bin(focus(c), BinOp::Lolli).ok_or_else(bad)?;
            let (p, q) = (premise(d, 0), premise(d, 1));
            expect(
                xi(p).is_some_and(|xs| xs.len() == 1 && alpha_eq_formula(&xs[0], &a)),
                "left premise must have the antecedent on the right",
            )?;
            expect(
                focus(q).is_some_and(|f| alpha_eq_formula(f, &b)),
                "right premise must focus the consequent",
            )?;
            split_ok(c, p, q)
        }
        ForumRule::LolliR => {
            arity(d, 1)?;
            let (f, rest) = head.ok_or_else(bad)?;
            let (a, b) = bin(Some(f), BinOp::Lolli).ok_or_else(bad)?;
            same_except(
                c,
                premise(d, 0),
                &[],
                &[a],
                Right::Xi([vec![b], rest].concat()),
                &[],
            )
        }
        ForumRule::ImpL => {
            arity(d, 2)?;
            let (a, b) = bin(focus(c), BinOp::Imp).ok_or_else(bad)?;
            let p = premise(d, 0);
            let want = ForumSequent::unfocused(c.psi.clone(), vec![], vec![a], vec![]);
            expect(
                forum_seq_eq(&want, p),
                "classical premise must have empty linear contexts",
            )?;
            same_except(c, premise(d, 1), &[], &[], Right::Focus(b), &[])
        }
        ForumRule::ImpR => {
            arity(d, 1)?;
            let (f, rest) = head.ok_or_else(bad)?;
            let (a, b) = bin(Some(f), BinOp::Imp).ok_or_else(bad)?;
            same_except(
                c,
                premise(d, 0),
                &[a],
                &[],
                Right::Xi([vec![b], rest].concat()),
                &[],
            )
        }
        ForumRule::ForallL => {
            arity(d, 1)?;
            let t = d.witness.as_ref().ok_or("missing instance")?;
            match focus(c) {
                Some(Formula::Quant(Quant::Forall, v, body)) => same_except(
                    c,
                    premise(d, 0),
                    &[],
                    &[],
                    Right::Focus(instance(body, v, t)),
                    &[],
                ),
                _ => Err(bad()),
            }
        }
        ForumRule::ForallR => {
            arity(d, 1)?;
            let y = match &d.witness {
                Some(Term::Var(y)) if y.is_eigen() => y,
                _ => return Err("right quantifier needs an eigenvariable".into()),
            };
            match head {
                Some((Formula::Quant(Quant::Forall, v, body), rest)) => {
                    expect(
                        !super::forum_vars(c).contains(&y.id),
                        "eigenvariable is free in the conclusion",
                    )?;
                    let inst = instance(body, v, &Term::Var(y.clone()));
                    same_except(
                        c,
                        premise(d, 0),
                        &[],
                        &[],
                        Right::Xi([vec![inst], rest].concat()),
                        &[],
                    )
                }
                _ => Err(bad()),
            }
        }
    }
}

/// Checks every step; the error names the path of child indices.
pub fn check_derivation(d: &Derivation) -> Res {
    fn go(d: &Derivation, path: &mut Vec<usize>) -> Res {
        check_step(d).map_err(|e| {
            format!(
                "at /{}: {e}",
                path.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join("/")
            )
        })?;
        for (i, c) in d.children.iter().enumerate() {
            path.push(i);
            go(c, path)?;
            path.pop();
        }
        Ok(())
    }
    go(d, &mut Vec::new())
}
