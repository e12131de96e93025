use super::*;
use crate::engine::{prove, SearchConfig};
use crate::proofs::{ProofNode, Rule};
use crate::sequent::Contexts;
use crate::syntax::{parse_atom, parse_formula, parse_goal, Goal};

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn a(s: &str) -> Atom {
    parse_atom(s).unwrap()
}

fn g(s: &str) -> Goal {
    parse_goal(s).unwrap()
}

fn decide(s: &ForumSequent) -> Verdict {
    let r = prove_forum(s, &OracleConfig::default());
    if let Verdict::Provable(d) = &r.verdict {
        check_derivation(d).unwrap();
        assert!(d.is_proof());
        assert!(d.is_uniform());
        assert!(forum_seq_eq(&d.conclusion, s));
    }
    r.verdict
}

#[test]
fn par_head_needs_identities() {
    let s = ForumSequent::focused(
        vec![],
        vec![],
        f("a par (b par a)"),
        vec![a("a"), a("a"), a("b")],
    );
    let v = decide(&s);
    let d = v.derivation().unwrap();
    assert_eq!(
        d.rules().iter().filter(|r| **r == ForumRule::Init).count(),
        3
    );
    assert_eq!(
        d.rules().iter().filter(|r| **r == ForumRule::ParL).count(),
        2
    );
}

#[test]
fn identity_under_classical_context() {
    let s = ForumSequent::focused(vec![f("b")], vec![], f("a"), vec![a("a")]);
    let v = decide(&s);
    assert_eq!(v.derivation().unwrap().rule, ForumRule::Init);
}

#[test]
fn linear_atom_not_duplicated() {
    let s = ForumSequent::unfocused(vec![], vec![f("a")], vec![], vec![a("a"), a("a")]);
    assert_eq!(decide(&s), Verdict::NotProvable);
}

#[test]
fn classical_loop_terminates() {
    let s = ForumSequent::unfocused(vec![f("a -o a"), f("b => a")], vec![], vec![], vec![a("a")]);
    assert!(decide(&s).derivation().is_none());
    let s = ForumSequent::of_formula(f("(a => a) => a"));
    assert_eq!(decide(&s), Verdict::NotProvable);
}

#[test]
fn classic_tautologies() {
    for (src, provable) in [
        ("a -o a", true),
        ("(a -o bot) -o a -o bot", true),
        ("a par (a -o bot)", true),
        ("top", true),
        ("a & b -o b & a", true),
        ("a -o a & a", true),
        ("a -o a par a", false),
        ("(a & b) -o a", true),
        ("a => a par a", false),
        ("(a => bot) -o bot", false),
        ("forall x. (p(x) -o p(x))", true),
        ("(forall x. p(x)) -o p(c)", true),
        ("(forall x. p(x)) -o forall y. p(y)", true),
        ("p(c) -o forall y. p(y)", false),
    ] {
        let v = decide(&ForumSequent::of_formula(f(src)));
        assert_eq!(v.derivation().is_some(), provable, "{src}: {}", v.label());
        assert_ne!(v, Verdict::Unknown, "{src}");
    }
}

#[test]
fn agrees_with_engine_on_examples() {
    let cases = [
        (vec![], vec!["a", "a -o b"], vec!["b"]),
        (vec![], vec!["a"], vec!["a", "a"]),
        (vec!["a"], vec!["a -o a -o c"], vec!["c"]),
        (vec![], vec!["top -o a", "b"], vec!["a", "c"]),
        (vec![], vec!["(a & b) -o c", "a"], vec!["c"]),
    ];
    for (psi, gamma, lambda) in cases {
        let s = GSequent::state(Contexts::new(
            psi.iter().map(|x| g(x)).collect(),
            gamma.iter().map(|x| g(x)).collect(),
            lambda.iter().map(|x| a(x)).collect(),
        ));
        let e = prove(&s, &SearchConfig::default()).outcome;
        let o = decide(&ForumSequent::from_gsequent(&s));
        assert_eq!(e.proof().is_some(), o.derivation().is_some(), "{s}");
        if let Some(p) = e.proof() {
            expand_all(p).unwrap();
        }
    }
}

fn engine_proof(s: GSequent) -> ProofNode {
    *match prove(&s, &SearchConfig::default()).outcome {
        crate::engine::Outcome::Proved(p) => p,
        o => panic!("{}", o.label()),
    }
}

#[test]
fn right_expansion_shapes() {
    let top = engine_proof(GSequent::focused(Contexts::default(), g("forall x. top")));
    let d = expand_macro(&top).unwrap();
    assert_eq!(d.rules(), vec![ForumRule::ForallR, ForumRule::TopR]);

    use ForumRule::*;
    let p = engine_proof(GSequent::focused(Contexts::default(), g("b => a -o a")));
    assert_eq!(
        expand_macro(&p).unwrap().rules(),
        vec![ImpR, LolliR, Atom, Open]
    );

    let s = GSequent::focused(
        Contexts::new(vec![], vec![g("a par b")], vec![]),
        g("a par b"),
    );
    let p = engine_proof(s);
    assert_eq!(
        expand_macro(&p).unwrap().rules(),
        vec![ParR, Atom, Atom, Open]
    );
}

#[test]
fn left_expansion_and_mismatch() {
    let s = GSequent::state(Contexts::new(
        vec![],
        vec![g("a par b")],
        vec![a("a"), a("b")],
    ));
    let p = engine_proof(s);
    assert_eq!(expand_all(&p).unwrap(), p.size());
    assert_eq!(p.size(), 1);
    let node = p
        .nodes()
        .into_iter()
        .find(|n| matches!(&n.rule, Rule::GoalLeft { goal, .. } if goal.clauses[0].head.len() == 2))
        .unwrap();
    let d = expand_macro(node).unwrap();
    assert!(d.rules().contains(&ForumRule::ParL));
    let mut bad = node.clone();
    bad.conclusion.ctx.lambda.push(a("z"));
    assert!(expand_macro(&bad).is_err());
    let mut bad = node.clone();
    if let Rule::GoalLeft { side, .. } = &mut bad.rule {
        *side = crate::proofs::Side::Psi;
    }
    assert!(expand_macro(&bad).is_err());
}

#[test]
fn classical_premise_expansion() {
    let s = GSequent::state(Contexts::new(vec![g("b")], vec![g("b => a")], vec![]));
    let s = GSequent::state(Contexts {
        lambda: vec![a("a")],
        ..s.ctx
    });
    let p = engine_proof(s);
    expand_all(&p).unwrap();
    let d = expand_macro(&p).unwrap();
    assert!(d.rules().contains(&ForumRule::ImpL));
}

#[test]
fn quantified_left_expansion() {
    let s = GSequent::state(Contexts::new(
        vec![g("forall x. (p(x) -o q(x))")],
        vec![g("p(c)")],
        vec![a("q(c)")],
    ));
    let p = engine_proof(s);
    let d = expand_macro(&p).unwrap();
    assert_eq!(
        d.rules()[..2],
        [ForumRule::DecideClassical, ForumRule::ForallL]
    );
}
