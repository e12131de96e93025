//! Translations from full linear logic into the Forum fragment, and from
//! Forum formulae into goals and clauses.

use thiserror::Error;

use crate::syntax::{BinOp, Clause, Formula, Goal, Quant, Subst, Term, UnOp, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("not in the Forum fragment: {0}")]
    NotForumFragment(String),
}

fn neg(f: Formula) -> Formula {
    Formula::lolli(f, Formula::Bot)
}

/// Rewrites every connective outside the Forum fragment, children first.
pub fn foll_to_forum(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Bot | Formula::Top => f.clone(),
        Formula::One => neg(Formula::Bot),
        Formula::Zero => neg(Formula::Top),
        Formula::Bin(op, l, r) => {
            let (l, r) = (foll_to_forum(l), foll_to_forum(r));
            match op {
                BinOp::Tensor => neg(Formula::par(neg(l), neg(r))),
                BinOp::Plus => neg(Formula::with(neg(l), neg(r))),
                _ => Formula::bin(*op, l, r),
            }
        }
        Formula::Un(op, g) => {
            let g = foll_to_forum(g);
            match op {
                UnOp::Neg => neg(g),
                UnOp::OfCourse => neg(Formula::imp(g, Formula::Bot)),
                UnOp::WhyNot => Formula::imp(neg(g), Formula::Bot),
            }
        }
        Formula::Quant(Quant::Forall, v, g) => Formula::forall(v.clone(), foll_to_forum(g)),
        Formula::Quant(Quant::Exists, v, g) => {
            neg(Formula::forall(v.clone(), neg(foll_to_forum(g))))
        }
    }
}

fn not_forum(f: &Formula) -> NormalizeError {
    NormalizeError::NotForumFragment(f.to_string())
}

/// Gives the binder of `g` fresh identities so that it can be merged with
/// another binder.
fn freshen_binder(g: Goal) -> Goal {
    if g.binder.is_empty() {
        return g;
    }
    let fresh: Vec<Var> = g.binder.iter().map(Var::renamed).collect();
    let terms: Vec<Term> = fresh.iter().cloned().map(Term::Var).collect();
    let s = Subst::zip(&g.binder, &terms);
    let body = Goal {
        binder: Vec::new(),
        clauses: g.clauses,
    };
    Goal {
        binder: fresh,
        clauses: s.goal(&body).clauses,
    }
}

fn merge(d: &Clause, e: &Clause) -> Clause {
    Clause {
        cp: d.cp.iter().chain(&e.cp).cloned().collect(),
        lp: d.lp.iter().chain(&e.lp).cloned().collect(),
        head: d.head.iter().chain(&e.head).cloned().collect(),
    }
}

/// An equivalent goal for a Forum formula, using only connectives of the
/// input.
pub fn formula_to_goal(f: &Formula) -> Result<Goal, NormalizeError> {
    match f {
        Formula::Atom(a) => Ok(Goal::atom(a.clone())),
        Formula::Bot => Ok(Goal::clause(Clause::bot())),
        Formula::Top => Ok(Goal::top()),
        Formula::Bin(BinOp::Par, l, r) => {
            let g = freshen_binder(formula_to_goal(l)?);
            let h = freshen_binder(formula_to_goal(r)?);
            let binder = [g.binder, h.binder].concat();
            if g.clauses.is_empty() || h.clauses.is_empty() {
                return Ok(Goal::new(binder, Vec::new()));
            }
            let mut clauses = Vec::with_capacity(g.clauses.len() * h.clauses.len());
            for e in &h.clauses {
                for d in &g.clauses {
                    clauses.push(merge(d, e));
                }
            }
            Ok(Goal::new(binder, clauses))
        }
        Formula::Bin(BinOp::With, l, r) => {
            let g = freshen_binder(formula_to_goal(l)?);
            let h = freshen_binder(formula_to_goal(r)?);
            Ok(Goal::new(
                [g.binder, h.binder].concat(),
                [g.clauses, h.clauses].concat(),
            ))
        }
        Formula::Bin(op @ (BinOp::Lolli | BinOp::Imp), l, r) => {
            let premise = formula_to_goal(l)?;
            let h = freshen_binder(formula_to_goal(r)?);
            let clauses = h
                .clauses
                .into_iter()
                .map(|mut c| {
                    let slot = if *op == BinOp::Lolli {
                        &mut c.lp
                    } else {
                        &mut c.cp
                    };
                    slot.insert(0, premise.clone());
                    c
                })
                .collect();
            Ok(Goal::new(h.binder, clauses))
        }
        Formula::Quant(Quant::Forall, v, body) => {
            let g = formula_to_goal(body)?;
            let mut binder = vec![v.clone()];
            binder.extend(g.binder);
            Ok(freshen_binder(Goal::new(binder, g.clauses)))
        }
        _ => Err(not_forum(f)),
    }
}

/// `(g -o bot) -o bot`.
pub fn goal_double_negate(g: &Goal) -> Clause {
    let inner = Clause {
        cp: Vec::new(),
        lp: vec![g.clone()],
        head: Vec::new(),
    };
    Clause {
        cp: Vec::new(),
        lp: vec![Goal::clause(inner)],
        head: Vec::new(),
    }
}

/// An equivalent clause for a Forum formula, by double negation.
pub fn formula_to_clause(f: &Formula) -> Result<Clause, NormalizeError> {
    match f {
        Formula::Atom(a) => Ok(Clause::fact(a.clone())),
        Formula::Bot => Ok(Clause::bot()),
        Formula::Top => Ok(goal_double_negate(&Goal::top())),
        Formula::Bin(BinOp::Par, l, r) => Ok(merge(&formula_to_clause(l)?, &formula_to_clause(r)?)),
        Formula::Bin(BinOp::With, l, r) => {
            let g = Goal::new(
                Vec::new(),
                vec![formula_to_clause(l)?, formula_to_clause(r)?],
            );
            Ok(goal_double_negate(&g))
        }
        Formula::Bin(op @ (BinOp::Lolli | BinOp::Imp), l, r) => {
            let premise = Goal::clause(formula_to_clause(l)?);
            let mut c = formula_to_clause(r)?;
            let slot = if *op == BinOp::Lolli {
                &mut c.lp
            } else {
                &mut c.cp
            };
            slot.insert(0, premise);
            Ok(c)
        }
        Formula::Quant(Quant::Forall, ..) => {
            let mut binder = Vec::new();
            let mut body = f;
            while let Formula::Quant(Quant::Forall, v, inner) = body {
                binder.push(v.clone());
                body = inner;
            }
            let g = Goal::new(binder, vec![formula_to_clause(body)?]);
            Ok(goal_double_negate(&freshen_binder(g)))
        }
        _ => Err(not_forum(f)),
    }
}

/// Number of clauses with head `bot`, at any nesting depth.
pub fn degenerate_heads(g: &Goal) -> usize {
    g.clauses.iter().map(degenerate_heads_clause).sum()
}

pub fn degenerate_heads_clause(c: &Clause) -> usize {
    usize::from(c.head.is_empty())
        + c.cp
            .iter()
            .chain(&c.lp)
            .map(degenerate_heads)
            .sum::<usize>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq_formula, alpha_eq_goal, parse_formula, parse_goal, Atom};

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn forum(s: &str) -> Formula {
        foll_to_forum(&p(s))
    }

    #[test]
    fn equivalence_table() {
        assert_eq!(forum("1"), p("bot -o bot"));
        assert_eq!(forum("0"), p("top -o bot"));
        assert_eq!(forum("a * b"), p("((a -o bot) par (b -o bot)) -o bot"));
        assert_eq!(forum("a + b"), p("((a -o bot) & (b -o bot)) -o bot"));
        assert_eq!(forum("!a"), p("(a => bot) -o bot"));
        assert_eq!(
            forum("?(a * b)"),
            p("((((a -o bot) par (b -o bot)) -o bot) -o bot) => bot")
        );
        assert_eq!(forum("~a"), p("a -o bot"));
        assert!(alpha_eq_formula(
            &forum("exists x. q(x)"),
            &p("(forall x. (q(x) -o bot)) -o bot")
        ));
    }

    #[test]
    fn translation_lands_in_forum() {
        for s in [
            "!forall x. ~a -o b & (c par d) => e",
            "?(1 + 0) * exists y. p(y)",
            "a",
        ] {
            assert!(forum(s).is_forum(), "{s}");
        }
    }

    #[test]
    fn par_distributes_over_with() {
        let g = formula_to_goal(&p("a par (b & c)")).unwrap();
        assert!(alpha_eq_goal(
            &g,
            &parse_goal("(a par b) & (a par c)").unwrap()
        ));
    }

    #[test]
    fn par_order_is_outer_right() {
        let g = formula_to_goal(&p("(a & b) par (c & d)")).unwrap();
        let want = parse_goal("(a par c) & (b par c) & (a par d) & (b par d)").unwrap();
        assert!(alpha_eq_goal(&g, &want));
    }

    #[test]
    fn basis_and_clause_shapes() {
        assert_eq!(formula_to_goal(&Formula::Top).unwrap(), Goal::top());
        let g = formula_to_goal(&p("a -o b")).unwrap();
        assert_eq!(g.clauses.len(), 1);
        assert_eq!(g.clauses[0].lp, vec![Goal::atom(Atom::prop("a"))]);
        assert_eq!(g.clauses[0].head, vec![Atom::prop("b")]);
    }

    #[test]
    fn absorption() {
        assert!(formula_to_goal(&p("a par top")).unwrap().is_top());
        let g = formula_to_goal(&p("a & top")).unwrap();
        assert!(alpha_eq_goal(&g, &parse_goal("a").unwrap()));
        let g = formula_to_goal(&p("a par bot")).unwrap();
        assert_eq!(g.clauses[0].head, vec![Atom::prop("a")]);
        assert!(formula_to_goal(&p("a -o top")).unwrap().is_top());
    }

    #[test]
    fn quantifiers_are_prenexed() {
        let g = formula_to_goal(&p("(forall x. p(x)) par (forall y. q(y))")).unwrap();
        assert_eq!(g.binder.len(), 2);
        assert_ne!(g.binder[0].id, g.binder[1].id);
        assert!(alpha_eq_goal(
            &g,
            &parse_goal("forall x. forall y. (p(x) par q(y))").unwrap()
        ));
        let g = formula_to_goal(&p("a -o forall y. q(y)")).unwrap();
        assert!(alpha_eq_goal(
            &g,
            &parse_goal("forall y. (a -o q(y))").unwrap()
        ));
    }

    #[test]
    fn idempotent_on_goal_shapes() {
        for s in [
            "a",
            "top",
            "forall x. (p(x) & (r => q(x) -o bot))",
            "(a => b) -o c par d",
        ] {
            let g = parse_goal(s).unwrap();
            let back = formula_to_goal(&g.to_formula()).unwrap();
            assert!(alpha_eq_goal(&g, &back), "{s}");
        }
    }

    #[test]
    fn connectives_do_not_grow() {
        for s in [
            "a par (b & c)",
            "(a -o b) & top",
            "forall x. (p(x) => bot) par q",
        ] {
            let f = p(s);
            let g = formula_to_goal(&f).unwrap().to_formula();
            assert!(g.connectives().is_subset(&f.connectives()), "{s}: {g}");
        }
    }

    #[test]
    fn clause_translation() {
        assert_eq!(clause_to("top"), p("(top -o bot) -o bot"));
        assert_eq!(clause_to("b & c"), p("((b & c) -o bot) -o bot"));
        assert_eq!(clause_to("a"), p("a"));
        assert_eq!(clause_to("a -o b => c"), p("b => a -o c"));
        assert_eq!(clause_to("(a => c) par b"), p("a => c par b"));
        assert!(alpha_eq_formula(
            &clause_to("forall x. forall y. p(x, y)"),
            &p("(forall x. forall y. p(x, y) -o bot) -o bot")
        ));
    }

    fn clause_to(s: &str) -> Formula {
        formula_to_clause(&p(s)).unwrap().to_formula()
    }

    #[test]
    fn double_negation_shape() {
        let c = goal_double_negate(&Goal::atom(Atom::prop("a")));
        assert_eq!(c.to_formula(), p("(a -o bot) -o bot"));
        assert!(c.head.is_empty() && c.cp.is_empty() && c.lp.len() == 1);
        let t = parse_goal("forall x. top").unwrap();
        assert!(alpha_eq_formula(
            &goal_double_negate(&t).to_formula(),
            &p("((forall x. top) -o bot) -o bot")
        ));
    }

    #[test]
    fn rejects_non_forum() {
        assert!(matches!(
            formula_to_goal(&p("a * b")),
            Err(NormalizeError::NotForumFragment(_))
        ));
        assert!(formula_to_clause(&p("exists x. p(x)")).is_err());
    }

    #[test]
    fn degenerate_head_count() {
        assert_eq!(
            degenerate_heads(&parse_goal("(a -o bot) -o bot").unwrap()),
            2
        );
        assert_eq!(degenerate_heads(&parse_goal("a & b").unwrap()), 0);
    }
}
