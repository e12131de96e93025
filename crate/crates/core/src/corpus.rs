//! Seeded generators of test material: ground sequents, propositional
//! formulae of full linear logic, and proofs with cuts built from engine
//! proofs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cutelim::{cut_linear, gen_cut};
use crate::engine::{prove, Outcome, SearchConfig};
use crate::proofs::ProofNode;
use crate::sequent::{mset_remove, Contexts, GSequent};
use crate::syntax::{Atom, BinOp, Clause, Formula, Goal, Term, UnOp, Var};

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    /// Number of predicate symbols, at most three.
    pub atoms: usize,
    /// Nesting depth of goals.
    pub depth: usize,
    /// Clauses per goal.
    pub clauses: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 0,
            count: 200,
            atoms: 3,
            depth: 3,
            clauses: 2,
        }
    }
}

const PREDICATES: [&str; 3] = ["a", "b", "p"];
const CONSTANTS: [&str; 2] = ["k", "m"];

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a CorpusConfig,
}

impl Gen<'_> {
    /// An atom over the configured symbols; `p` is unary, the rest are
    /// propositional.
    fn atom(&mut self, scope: &[Var]) -> Atom {
        let n = self.cfg.atoms.clamp(1, PREDICATES.len());
        let pred = PREDICATES[self.rng.gen_range(0..n)];
        if pred != "p" {
            return Atom::prop(pred);
        }
        let arg = match scope.choose(&mut self.rng) {
            Some(v) if self.rng.gen_bool(0.7) => Term::Var(v.clone()),
            _ => Term::constant(CONSTANTS.choose(&mut self.rng).unwrap()),
        };
        Atom::new(pred, vec![arg])
    }

    fn goal(&mut self, depth: usize, scope: &[Var]) -> Goal {
        let mut scope = scope.to_vec();
        let mut binder = Vec::new();
        if self.cfg.atoms >= 3 && self.rng.gen_bool(0.15) {
            let x = Var::bound("x");
            binder.push(x.clone());
            scope.push(x);
        }
        let h = match self.rng.gen_range(0..10) {
            0 => 0,
            1..=6 => 1,
            _ => 2,
        }
        .min(self.cfg.clauses);
        let clauses: Vec<Clause> = (0..h).map(|_| self.clause(depth, &scope)).collect();
        // Only quantify a variable that occurs.
        binder.retain(|x| clauses.iter().any(|c| c.free_vars().contains(&x.id)));
        Goal::new(binder, clauses)
    }

    fn clause(&mut self, depth: usize, scope: &[Var]) -> Clause {
        let mut cp = Vec::new();
        let mut lp = Vec::new();
        if depth > 1 {
            if self.rng.gen_bool(0.12) {
                cp.push(self.goal(depth - 1, scope));
            }
            if self.rng.gen_bool(0.4) {
                lp.push(self.goal(depth - 1, scope));
            }
        }
        let k = match self.rng.gen_range(0..10) {
            0 => 0,
            1..=7 => 1,
            _ => 2,
        };
        let head = (0..k).map(|_| self.atom(scope)).collect();
        Clause::new(cp, lp, head)
    }

    fn sequent(&mut self) -> GSequent {
        let depth = self.cfg.depth.max(1);
        let mut ctx = Contexts::default();
        for _ in 0..self.rng.gen_range(0..=3) {
            ctx.lambda.push(self.atom(&[]));
        }
        for _ in 0..self.rng.gen_range(1..=3) {
            ctx.gamma.push(self.goal(depth, &[]));
        }
        if self.rng.gen_bool(0.2) {
            let g = self.goal(depth - 1, &[]);
            // A classical goal with an empty head is always selectable.
            if g.clauses.iter().all(|c| !c.head.is_empty()) {
                ctx.psi.push(g);
            }
        }
        if self.rng.gen_bool(0.25) {
            GSequent::focused(ctx, self.goal(depth, &[]))
        } else {
            GSequent::state(ctx)
        }
    }
}

/// Ground sequents; most are states, some have a focused goal.
pub fn ground_sequents(cfg: &CorpusConfig) -> Vec<GSequent> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg,
    };
    (0..cfg.count).map(|_| g.sequent()).collect()
}

/// Propositional formulae of full linear logic with at most `max_size`
/// connectives and atoms.
pub fn foll_formulas(seed: u64, count: usize, max_size: usize) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=max_size.max(1));
            formula(&mut rng, size)
        })
        .collect()
}

fn formula(rng: &mut ChaCha8Rng, size: usize) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..10) {
            0 => Formula::One,
            1 => Formula::Bot,
            2 => Formula::Top,
            3 => Formula::Zero,
            4..=6 => Formula::atom(Atom::prop("a")),
            _ => Formula::atom(Atom::prop("b")),
        };
    }
    if size == 2 || rng.gen_bool(0.25) {
        let op = *[UnOp::OfCourse, UnOp::WhyNot, UnOp::Neg]
            .choose(rng)
            .unwrap();
        return Formula::un(op, formula(rng, size - 1));
    }
    let ops = [
        BinOp::Tensor,
        BinOp::Par,
        BinOp::With,
        BinOp::Plus,
        BinOp::Lolli,
        BinOp::Imp,
    ];
    let op = *ops.choose(rng).unwrap();
    let left = rng.gen_range(1..size - 1);
    Formula::bin(op, formula(rng, left), formula(rng, size - 1 - left))
}

fn engine_proof(s: &GSequent) -> Option<ProofNode> {
    match prove(s, &SearchConfig::default()).outcome {
        Outcome::Proved(p) => Some(*p),
        _ => None,
    }
}

/// A classical program proving `g` with no linear resources, without
/// containing `g`: a fact `b` and every clause of `g` guarded by `b`.
fn backing(g: &Goal) -> Vec<Goal> {
    let b = Atom::prop("b");
    let guarded = g
        .clauses
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.cp.insert(0, Goal::atom(b.clone()));
            c
        })
        .collect();
    vec![Goal::atom(b), Goal::new(g.binder.clone(), guarded)]
}

/// A proof of `[psi ; gamma |- g ; ]` for a goal of the program: either
/// the identity on `g` or a classical backing of it.
fn prover_of(rng: &mut ChaCha8Rng, g: &Goal, linear: bool) -> Option<ProofNode> {
    let ctx = if linear && rng.gen_bool(0.5) {
        Contexts::new(vec![], vec![g.clone()], vec![])
    } else if rng.gen_bool(0.8) {
        Contexts::classical(backing(g))
    } else {
        Contexts::classical(vec![g.clone()])
    };
    engine_proof(&GSequent::focused(ctx, g.clone()))
}

/// Proofs with linear cuts and generalized classical cuts of 0, 1 and 2
/// copies, each premise proved by the engine.
pub fn cut_proofs(seed: u64, count: usize) -> Vec<ProofNode> {
    let cfg = CorpusConfig {
        seed,
        count: usize::MAX,
        depth: 2,
        ..CorpusConfig::default()
    };
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        cfg: &cfg,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count && attempts < count * 200 {
        attempts += 1;
        let s = g.sequent();
        let usable: Vec<Goal> = s
            .ctx
            .gamma
            .iter()
            .filter(|x| !x.is_top())
            .cloned()
            .collect();
        let Some(cut) = usable.choose(&mut rng).cloned() else {
            continue;
        };
        let kind = out.len() % 5;
        let p = match kind {
            0 | 4 => {
                let Some(right) = engine_proof(&s) else {
                    continue;
                };
                let Some(left) = prover_of(&mut rng, &cut, true) else {
                    continue;
                };
                let p = cut_linear(cut, left, right);
                if kind == 4 {
                    let Some(p) = stack_classical(&mut rng, p) else {
                        continue;
                    };
                    p
                } else {
                    p
                }
            }
            copies => {
                let copies = copies - 1;
                let mut s = s;
                if copies > 0 {
                    mset_remove(&mut s.ctx.gamma, &cut);
                    s.ctx.psi.extend(std::iter::repeat_n(cut.clone(), copies));
                }
                let Some(right) = engine_proof(&s) else {
                    continue;
                };
                let Some(left) = prover_of(&mut rng, &cut, false) else {
                    continue;
                };
                gen_cut(cut, copies, left, right)
            }
        };
        out.push(p);
    }
    out
}

/// Cuts one classical goal of the conclusion of `p` against a backing
/// proof of it.
fn stack_classical(rng: &mut ChaCha8Rng, p: ProofNode) -> Option<ProofNode> {
    let goal = p.conclusion.ctx.psi.choose(rng).cloned()?;
    let left = engine_proof(&GSequent::focused(
        Contexts::classical(backing(&goal)),
        goal.clone(),
    ))?;
    Some(gen_cut(goal, 1, left, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::check;

    #[test]
    fn sequents_are_ground_and_reproducible() {
        let cfg = CorpusConfig {
            count: 50,
            ..CorpusConfig::default()
        };
        let a = ground_sequents(&cfg);
        let b = ground_sequents(&cfg);
        assert_eq!(a.len(), 50);
        for (s, t) in a.iter().zip(&b) {
            assert_eq!(s.to_string(), t.to_string());
            assert!(crate::proofs::sequent_vars(s).is_empty(), "{s}");
        }
    }

    #[test]
    fn formulas_respect_the_size_bound() {
        for f in foll_formulas(3, 200, 8) {
            assert!(f.size() <= 8, "{f}");
        }
    }

    #[test]
    fn cut_proofs_are_valid() {
        let ps = cut_proofs(1, 10);
        assert_eq!(ps.len(), 10);
        for p in &ps {
            check(p).unwrap();
            assert!(!p.is_cut_free());
        }
    }
}
