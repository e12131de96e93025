use std::collections::{BTreeSet, HashMap};

use super::{Derivation, ForumRule, ForumSequent, Right};
use crate::syntax::{
    print_atom, print_formula, Atom, BinOp, Formula, Namer, Quant, Subst, Term, Var,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest derivation height explored.
    pub step_bound: usize,
    /// Sequents visited before giving up.
    pub node_limit: usize,
}

impl Default for OracleConfig {
    fn default() -> OracleConfig {
        OracleConfig {
            step_bound: 200,
            node_limit: 300_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Provable(Box<Derivation>),
    /// The whole space was explored; only given for problems without
    /// function symbols.
    NotProvable,
    Unknown,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Provable(_) => "provable",
            Verdict::NotProvable => "not-provable",
            Verdict::Unknown => "unknown",
        }
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            Verdict::Provable(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub verdict: Verdict,
    pub nodes: usize,
}

#[derive(Clone, Copy, Debug, Default)]
struct Fail {
    /// Some branch ran out of height.
    bound: bool,
    /// Some branch was cut by the loop check, so the failure depends on
    /// the ancestors.
    looped: bool,
}

impl Fail {
    fn join(self, o: Fail) -> Fail {
        Fail {
            bound: self.bound || o.bound,
            looped: self.looped || o.looped,
        }
    }
}

enum Memo {
    Proved(Derivation),
    Failed,
    FailedBelow(usize),
}

type R = Result<Derivation, Fail>;

struct StateKey {
    psi: BTreeSet<String>,
    linear: String,
}

struct Prover {
    memo: HashMap<String, Memo>,
    nodes: usize,
    limit: usize,
    aborted: bool,
    constants: Vec<Term>,
    stack: Vec<StateKey>,
    namer: Namer,
}

/// Decides a Forum sequent by exhaustive search, deepening the height
/// bound up to `cfg.step_bound`.
pub fn prove_forum(s: &ForumSequent, cfg: &OracleConfig) -> OracleReport {
    let mut sig = Sig::default();
    sig.sequent(s);
    let mut p = Prover {
        memo: HashMap::new(),
        nodes: 0,
        limit: cfg.node_limit,
        aborted: false,
        constants: sig
            .constants
            .into_iter()
            .map(|c| Term::constant(&c))
            .collect(),
        stack: Vec::new(),
        namer: Namer::new(),
    };
    let mut h = cfg.step_bound.min(8);
    loop {
        match p.prove(s.clone(), h) {
            Ok(d) => {
                return OracleReport {
                    verdict: Verdict::Provable(Box::new(d)),
                    nodes: p.nodes,
                }
            }
            Err(f) => {
                let verdict = if p.aborted || (f.bound && h >= cfg.step_bound) {
                    Verdict::Unknown
                } else if f.bound {
                    h = (h * 2).min(cfg.step_bound);
                    continue;
                } else if sig.functions {
                    Verdict::Unknown
                } else {
                    Verdict::NotProvable
                };
                return OracleReport {
                    verdict,
                    nodes: p.nodes,
                };
            }
        }
    }
}

#[derive(Default)]
struct Sig {
    constants: BTreeSet<String>,
    functions: bool,
}

impl Sig {
    fn term(&mut self, t: &Term) {
        if let Term::App(f, args) = t {
            if args.is_empty() {
                self.constants.insert(f.to_string());
            } else {
                self.functions = true;
                args.iter().for_each(|a| self.term(a));
            }
        }
    }

    fn atom(&mut self, a: &Atom) {
        a.args.iter().for_each(|t| self.term(t));
    }

    fn formula(&mut self, f: &Formula) {
        match f {
            Formula::Atom(a) => self.atom(a),
            Formula::Bin(_, l, r) => {
                self.formula(l);
                self.formula(r);
            }
            Formula::Un(_, g) | Formula::Quant(_, _, g) => self.formula(g),
            _ => {}
        }
    }

    fn sequent(&mut self, s: &ForumSequent) {
        s.psi.iter().chain(&s.gamma).for_each(|f| self.formula(f));
        match &s.right {
            Right::Focus(f) => self.formula(f),
            Right::Xi(xs) => xs.iter().for_each(|f| self.formula(f)),
        }
        s.lambda.iter().for_each(|a| self.atom(a));
    }
}

fn eigens_of_term(t: &Term, out: &mut Vec<Var>) {
    match t {
        Term::Var(v) if v.is_eigen() => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::Var(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| eigens_of_term(a, out)),
    }
}

fn eigens_of_formula(f: &Formula, out: &mut Vec<Var>) {
    match f {
        Formula::Atom(a) => a.args.iter().for_each(|t| eigens_of_term(t, out)),
        Formula::Bin(_, l, r) => {
            eigens_of_formula(l, out);
            eigens_of_formula(r, out);
        }
        Formula::Un(_, g) | Formula::Quant(_, _, g) => eigens_of_formula(g, out),
        _ => {}
    }
}

/// Ways of cutting a multiset in two, identical elements counted once.
fn splits<T: Clone>(items: &[T], key: impl Fn(&T) -> String) -> Vec<(Vec<T>, Vec<T>)> {
    let mut groups: Vec<(String, Vec<T>)> = Vec::new();
    for x in items {
        let k = key(x);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, v)) => v.push(x.clone()),
            None => groups.push((k, vec![x.clone()])),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for (_, members) in &groups {
        let mut next = Vec::new();
        for (l, r) in &out {
            for n in 0..=members.len() {
                let mut l2: Vec<T> = l.clone();
                let mut r2: Vec<T> = r.clone();
                l2.extend(members[..n].iter().cloned());
                r2.extend(members[n..].iter().cloned());
                next.push((l2, r2));
            }
        }
        out = next;
    }
    out
}

impl Prover {
    fn show(&self, f: &Formula) -> String {
        print_formula(f, &self.namer)
    }

    fn key(&self, s: &ForumSequent) -> String {
        let mut psi: Vec<String> = s.psi.iter().map(|f| self.show(f)).collect();
        psi.sort();
        let mut gamma: Vec<String> = s.gamma.iter().map(|f| self.show(f)).collect();
        gamma.sort();
        let mut lambda: Vec<String> = s
            .lambda
            .iter()
            .map(|a| print_atom(a, &self.namer))
            .collect();
        lambda.sort();
        let right = match &s.right {
            Right::Focus(f) => format!("F {}", self.show(f)),
            Right::Xi(xs) => format!(
                "X {}",
                xs.iter()
                    .map(|f| self.show(f))
                    .collect::<Vec<_>>()
                    .join(" ;; ")
            ),
        };
        format!(
            "{} || {} || {} || {}",
            psi.join(" ;; "),
            gamma.join(" ;; "),
            right,
            lambda.join(" ;; ")
        )
    }

    fn prove(&mut self, s: ForumSequent, h: usize) -> R {
        if self.aborted {
            return Err(Fail {
                bound: true,
                looped: false,
            });
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return Err(Fail {
                bound: true,
                looped: false,
            });
        }
        let key = self.key(&s);
        match self.memo.get(&key) {
            Some(Memo::Proved(d)) => return Ok(d.clone()),
            Some(Memo::Failed) => return Err(Fail::default()),
            Some(Memo::FailedBelow(h0)) if h <= *h0 => {
                return Err(Fail {
                    bound: true,
                    looped: false,
                })
            }
            _ => {}
        }
        if h == 0 {
            return Err(Fail {
                bound: true,
                looped: false,
            });
        }
        let r = match &s.right {
            Right::Xi(xs) if xs.is_empty() => self.decide(s, h),
            Right::Xi(_) => self.right(s, h),
            Right::Focus(_) => self.left(s, h),
        };
        match &r {
            Ok(d) => {
                self.memo.insert(key, Memo::Proved(d.clone()));
            }
            Err(f) if !f.looped && !self.aborted => {
                let m = if f.bound {
                    Memo::FailedBelow(h)
                } else {
                    Memo::Failed
                };
                self.memo.insert(key, m);
            }
            Err(_) => {}
        }
        r
    }

    fn right(&mut self, s: ForumSequent, h: usize) -> R {
        let Right::Xi(xs) = &s.right else {
            unreachable!()
        };
        let first = xs[0].clone();
        let rest = xs[1..].to_vec();
        let with = |xi: Vec<Formula>| ForumSequent {
            right: Right::Xi(xi),
            ..s.clone()
        };
        let (rule, premise) = match &first {
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
                let l = self.prove(with([vec![(**a).clone()], rest.clone()].concat()), h - 1)?;
                let r = self.prove(with([vec![(**b).clone()], rest].concat()), h - 1)?;
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
                let y = Var::eigen(&v.name, 0);
                let inst = Subst::single(v, Term::Var(y.clone())).formula(body);
                let child = self.prove(with([vec![inst], rest].concat()), h - 1)?;
                let mut d = Derivation::new(ForumRule::ForallR, s, vec![child]);
                d.witness = Some(Term::Var(y));
                return Ok(d);
            }
            _ => return Err(Fail::default()),
        };
        let child = self.prove(premise, h - 1)?;
        Ok(Derivation::new(rule, s, vec![child]))
    }

    fn decide(&mut self, s: ForumSequent, h: usize) -> R {
        let psi: BTreeSet<String> = s.psi.iter().map(|f| self.show(f)).collect();
        let linear = {
            let mut k = self.key(&ForumSequent {
                psi: vec![],
                ..s.clone()
            });
            k.push('|');
            k
        };
        if self
            .stack
            .iter()
            .any(|a| a.linear == linear && psi.is_subset(&a.psi))
        {
            return Err(Fail {
                bound: false,
                looped: true,
            });
        }
        self.stack.push(StateKey { psi, linear });
        let r = self.decide_inner(&s, h);
        self.stack.pop();
        r
    }

    fn decide_inner(&mut self, s: &ForumSequent, h: usize) -> R {
        let mut fail = Fail::default();
        let mut seen: Vec<String> = Vec::new();
        for i in 0..s.gamma.len() {
            let f = &s.gamma[i];
            let k = self.show(f);
            if matches!(f, Formula::Top) || seen.contains(&k) {
                continue;
            }
            seen.push(k);
            let mut gamma = s.gamma.clone();
            let a = gamma.remove(i);
            let p = ForumSequent {
                gamma,
                right: Right::Focus(a),
                ..s.clone()
            };
            match self.prove(p, h - 1) {
                Ok(d) => return Ok(Derivation::new(ForumRule::DecideLinear, s.clone(), vec![d])),
                Err(e) => fail = fail.join(e),
            }
        }
        seen.clear();
        for f in &s.psi {
            let k = self.show(f);
            if matches!(f, Formula::Top) || seen.contains(&k) {
                continue;
            }
            seen.push(k);
            let p = ForumSequent {
                right: Right::Focus(f.clone()),
                ..s.clone()
            };
            match self.prove(p, h - 1) {
                Ok(d) => {
                    return Ok(Derivation::new(
                        ForumRule::DecideClassical,
                        s.clone(),
                        vec![d],
                    ))
                }
                Err(e) => fail = fail.join(e),
            }
        }
        Err(fail)
    }

    fn left(&mut self, s: ForumSequent, h: usize) -> R {
        let Right::Focus(f) = &s.right else {
            unreachable!()
        };
        let f = f.clone();
        let focus =
            |p: &ForumSequent, g: Formula, gamma: Vec<Formula>, lambda: Vec<Atom>| ForumSequent {
                psi: p.psi.clone(),
                gamma,
                right: Right::Focus(g),
                lambda,
            };
        match &f {
            Formula::Atom(a) => {
                if s.gamma.is_empty() && s.lambda.len() == 1 && s.lambda[0] == *a {
                    Ok(Derivation::new(ForumRule::Init, s, vec![]))
                } else {
                    Err(Fail::default())
                }
            }
            Formula::Bot => {
                if s.gamma.is_empty() && s.lambda.is_empty() {
                    Ok(Derivation::new(ForumRule::BotL, s, vec![]))
                } else {
                    Err(Fail::default())
                }
            }
            Formula::Bin(BinOp::With, a, b) => {
                let mut fail = Fail::default();
                for (rule, g) in [(ForumRule::WithLL, a), (ForumRule::WithLR, b)] {
                    let p = focus(&s, (**g).clone(), s.gamma.clone(), s.lambda.clone());
                    match self.prove(p, h - 1) {
                        Ok(d) => return Ok(Derivation::new(rule, s, vec![d])),
                        Err(e) => fail = fail.join(e),
                    }
                }
                Err(fail)
            }
            Formula::Bin(BinOp::Imp, a, b) => {
                let l = ForumSequent::unfocused(s.psi.clone(), vec![], vec![(**a).clone()], vec![]);
                let l = self.prove(l, h - 1)?;
                let r = self.prove(
                    focus(&s, (**b).clone(), s.gamma.clone(), s.lambda.clone()),
                    h - 1,
                )?;
                Ok(Derivation::new(ForumRule::ImpL, s, vec![l, r]))
            }
            Formula::Bin(op @ (BinOp::Par | BinOp::Lolli), a, b) => {
                let rule = if *op == BinOp::Par {
                    ForumRule::ParL
                } else {
                    ForumRule::LolliL
                };
                let namer = self.namer.clone();
                let gs = splits(&s.gamma, |f| print_formula(f, &namer));
                let ls = splits(&s.lambda, |a| print_atom(a, &namer));
                let mut fail = Fail::default();
                for (g1, g2) in &gs {
                    for (l1, l2) in &ls {
                        let first = if rule == ForumRule::ParL {
                            focus(&s, (**a).clone(), g1.clone(), l1.clone())
                        } else {
                            ForumSequent::unfocused(
                                s.psi.clone(),
                                g1.clone(),
                                vec![(**a).clone()],
                                l1.clone(),
                            )
                        };
                        let d1 = match self.prove(first, h - 1) {
                            Ok(d) => d,
                            Err(e) => {
                                fail = fail.join(e);
                                continue;
                            }
                        };
                        match self.prove(focus(&s, (**b).clone(), g2.clone(), l2.clone()), h - 1) {
                            Ok(d2) => return Ok(Derivation::new(rule, s, vec![d1, d2])),
                            Err(e) => fail = fail.join(e),
                        }
                        if self.aborted {
                            return Err(fail);
                        }
                    }
                }
                Err(fail)
            }
            Formula::Quant(Quant::Forall, v, body) => {
                let mut universe = self.constants.clone();
                let mut eig = Vec::new();
                s.psi
                    .iter()
                    .chain(&s.gamma)
                    .for_each(|g| eigens_of_formula(g, &mut eig));
                eigens_of_formula(&f, &mut eig);
                s.lambda
                    .iter()
                    .for_each(|a| a.args.iter().for_each(|t| eigens_of_term(t, &mut eig)));
                universe.extend(eig.into_iter().map(Term::Var));
                if universe.is_empty() {
                    universe.push(Term::constant("c0"));
                }
                let mut fail = Fail::default();
                for t in universe {
                    let inst = Subst::single(v, t.clone()).formula(body);
                    match self.prove(focus(&s, inst, s.gamma.clone(), s.lambda.clone()), h - 1) {
                        Ok(d) => {
                            let mut out = Derivation::new(ForumRule::ForallL, s, vec![d]);
                            out.witness = Some(t);
                            return Ok(out);
                        }
                        Err(e) => fail = fail.join(e),
                    }
                }
                Err(fail)
            }
            _ => Err(Fail::default()),
        }
    }
}
