use super::{Atom, Clause, Formula, Goal, Term, VarId};

/// Pairs of variables bound at the same position on both sides, innermost last.
type Env = Vec<(VarId, VarId)>;

fn var_eq(env: &Env, a: VarId, b: VarId) -> bool {
    for &(l, r) in env.iter().rev() {
        if l == a || r == b {
            return l == a && r == b;
        }
    }
    a == b
}

fn term_eq(env: &Env, s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Var(a), Term::Var(b)) => var_eq(env, a.id, b.id),
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_eq(env, x, y))
        }
        _ => false,
    }
}

fn atom_eq(env: &Env, a: &Atom, b: &Atom) -> bool {
    a.pred == b.pred
        && a.args.len() == b.args.len()
        && a.args.iter().zip(&b.args).all(|(x, y)| term_eq(env, x, y))
}

fn formula_eq(env: &mut Env, f: &Formula, g: &Formula) -> bool {
    match (f, g) {
        (Formula::Atom(a), Formula::Atom(b)) => atom_eq(env, a, b),
        (Formula::One, Formula::One)
        | (Formula::Bot, Formula::Bot)
        | (Formula::Top, Formula::Top)
        | (Formula::Zero, Formula::Zero) => true,
        (Formula::Bin(o1, l1, r1), Formula::Bin(o2, l2, r2)) => {
            o1 == o2 && formula_eq(env, l1, l2) && formula_eq(env, r1, r2)
        }
        (Formula::Un(o1, a), Formula::Un(o2, b)) => o1 == o2 && formula_eq(env, a, b),
        (Formula::Quant(q1, x, a), Formula::Quant(q2, y, b)) => {
            if q1 != q2 {
                return false;
            }
            env.push((x.id, y.id));
            let ok = formula_eq(env, a, b);
            env.pop();
            ok
        }
        _ => false,
    }
}

fn goal_eq(env: &mut Env, g: &Goal, h: &Goal) -> bool {
    if g.binder.len() != h.binder.len() || g.clauses.len() != h.clauses.len() {
        return false;
    }
    let n = env.len();
    env.extend(g.binder.iter().zip(&h.binder).map(|(x, y)| (x.id, y.id)));
    let ok = g
        .clauses
        .iter()
        .zip(&h.clauses)
        .all(|(c, d)| clause_eq(env, c, d));
    env.truncate(n);
    ok
}

fn clause_eq(env: &mut Env, c: &Clause, d: &Clause) -> bool {
    c.cp.len() == d.cp.len()
        && c.lp.len() == d.lp.len()
        && c.head.len() == d.head.len()
        && c.cp.iter().zip(&d.cp).all(|(a, b)| goal_eq(env, a, b))
        && c.lp.iter().zip(&d.lp).all(|(a, b)| goal_eq(env, a, b))
        && c.head.iter().zip(&d.head).all(|(a, b)| atom_eq(env, a, b))
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq_formula(f: &Formula, g: &Formula) -> bool {
    formula_eq(&mut Vec::new(), f, g)
}

/// Equality of goals up to renaming of bound variables. Clause order,
/// premise order and head order are significant.
pub fn alpha_eq_goal(g: &Goal, h: &Goal) -> bool {
    goal_eq(&mut Vec::new(), g, h)
}

pub fn alpha_eq_clause(c: &Clause, d: &Clause) -> bool {
    clause_eq(&mut Vec::new(), c, d)
}

pub fn alpha_eq_atom(a: &Atom, b: &Atom) -> bool {
    atom_eq(&Vec::new(), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn eq(a: &str, b: &str) -> bool {
        alpha_eq_formula(&parse_formula(a).unwrap(), &parse_formula(b).unwrap())
    }

    #[test]
    fn renaming() {
        assert!(eq("forall x. a(x)", "forall y. a(y)"));
        assert!(!eq("forall x. a(x)", "forall x. b(x)"));
        assert!(eq(
            "forall x. forall y. a(x, y)",
            "forall y. forall x. a(y, x)"
        ));
        assert!(!eq(
            "forall x. forall y. a(x, y)",
            "forall x. forall y. a(y, x)"
        ));
    }

    #[test]
    fn shadowing() {
        assert!(eq("forall x. forall x. a(x)", "forall y. forall z. a(z)"));
        assert!(!eq("forall x. forall x. a(x)", "forall y. forall z. a(y)"));
    }

    #[test]
    fn free_variables_must_match_exactly() {
        let f = parse_formula("forall x. p(x)").unwrap();
        let Formula::Quant(_, x, body) = &f else {
            unreachable!()
        };
        let other = crate::syntax::Var::bound("x");
        let g = crate::syntax::Subst::single(x, Term::Var(other)).formula(body);
        assert!(!alpha_eq_formula(body, &g));
        assert!(alpha_eq_formula(body, body));
    }
}
