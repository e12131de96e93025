//! Bounded backtracking proof search for G-Forum sequents.

mod search;
mod store;

use crate::proofs::{ProofNode, Side};
use crate::sequent::{mset_diff, Contexts, GSequent};
use crate::syntax::{alpha_eq_goal, Atom, Goal, Subst, Term, Var};

pub use store::{BindingStore, Mark};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Most goal reductions on the left along any branch.
    pub max_gl_depth: u32,
    /// Try every depth from 1 up to `max_gl_depth` in turn.
    pub iterative_deepening: bool,
    /// Zero keeps the natural order of choices; anything else shuffles them.
    pub rng_seed: u64,
    pub trace: bool,
    /// Left reductions attempted before the search gives up with `Unknown`.
    pub max_steps: u64,
    /// Split linear contexts by enumeration instead of threading.
    pub eager_split: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            max_gl_depth: 6,
            iterative_deepening: true,
            rng_seed: 0,
            trace: false,
            max_steps: 200_000,
            eager_split: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Proved(Box<ProofNode>),
    /// Every branch failed without reaching the depth bound.
    NoProof,
    /// The depth bound or the step budget cut the search short.
    Unknown,
}

impl Outcome {
    pub fn proof(&self) -> Option<&ProofNode> {
        match self {
            Outcome::Proved(p) => Some(p),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Proved(_) => "proved",
            Outcome::NoProof => "no-proof",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub outcome: Outcome,
    pub trace: Vec<String>,
    pub steps: u64,
    /// Depth of the last pass.
    pub depth: u32,
}

pub fn prove(s: &GSequent, cfg: &SearchConfig) -> SearchReport {
    let first = if cfg.iterative_deepening {
        1.min(cfg.max_gl_depth)
    } else {
        cfg.max_gl_depth
    };
    let mut steps = 0;
    let mut report = SearchReport {
        outcome: Outcome::Unknown,
        trace: vec![],
        steps: 0,
        depth: first,
    };
    for depth in first..=cfg.max_gl_depth {
        let mut search = search::Search::new(cfg, cfg.max_steps.saturating_sub(steps));
        let proof = search.run(s, depth);
        steps += search.steps;
        report = SearchReport {
            outcome: Outcome::Unknown,
            trace: search.trace,
            steps,
            depth,
        };
        if let Some(p) = proof {
            report.outcome = Outcome::Proved(Box::new(p));
            return report;
        }
        if search.aborted {
            return report;
        }
        if !search.bound_hit {
            report.outcome = Outcome::NoProof;
            return report;
        }
    }
    report
}

/// The premises of a goal reduction on the right of a focused sequent.
pub fn reduce_right(s: &GSequent, store: &mut BindingStore) -> Vec<GSequent> {
    let goal = s
        .focus
        .as_ref()
        .expect("reduce_right needs a focused sequent");
    let level = store.next_level();
    let eigen: Vec<Term> = goal
        .binder
        .iter()
        .map(|v| Term::Var(Var::eigen(&v.name, level)))
        .collect();
    let rho = Subst::zip(&goal.binder, &eigen);
    goal.clauses
        .iter()
        .map(|c| {
            let d = rho.clause(c);
            GSequent::state(Contexts {
                psi: [s.ctx.psi.clone(), d.cp].concat(),
                gamma: [s.ctx.gamma.clone(), d.lp].concat(),
                lambda: [s.ctx.lambda.clone(), d.head].concat(),
            })
        })
        .collect()
}

/// One way of matching a clause head against an atomic context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadMatch {
    /// Position in the context matched by each head atom.
    pub assignment: Vec<usize>,
    /// The context minus the matched atoms, under the unifier.
    pub residual: Vec<Atom>,
    /// The head under the unifier.
    pub head: Vec<Atom>,
}

pub(crate) trait HasStore {
    fn store(&mut self) -> &mut BindingStore;
}

impl HasStore for BindingStore {
    fn store(&mut self) -> &mut BindingStore {
        self
    }
}

/// Enumerates injective unifying assignments of `head` into `avail`,
/// skipping assignments that differ only by swapping equal atoms. The
/// continuation runs with the bindings in place; returning true stops.
pub(crate) fn enum_matches<S: HasStore>(
    s: &mut S,
    head: &[Atom],
    avail: &[Atom],
    k: &mut dyn FnMut(&mut S, &[usize]) -> bool,
) -> bool {
    let st = s.store();
    let resolved: Vec<Atom> = head.iter().map(|a| st.resolve_atom(a)).collect();
    let same_as_prev: Vec<bool> = (0..head.len())
        .map(|i| i > 0 && resolved[i] == resolved[i - 1])
        .collect();
    let mut used = Vec::with_capacity(head.len());
    match_from(s, head, avail, &same_as_prev, &mut used, k)
}

fn match_from<S: HasStore>(
    s: &mut S,
    head: &[Atom],
    avail: &[Atom],
    same_as_prev: &[bool],
    used: &mut Vec<usize>,
    k: &mut dyn FnMut(&mut S, &[usize]) -> bool,
) -> bool {
    let i = used.len();
    if i == head.len() {
        return k(s, used);
    }
    let start = if same_as_prev[i] { used[i - 1] + 1 } else { 0 };
    let mut tried: Vec<Atom> = Vec::new();
    for j in start..avail.len() {
        let b = &avail[j];
        if used.contains(&j) || b.pred != head[i].pred || b.args.len() != head[i].args.len() {
            continue;
        }
        let rb = s.store().resolve_atom(b);
        if tried.contains(&rb) {
            continue;
        }
        tried.push(rb);
        let mark = s.store().mark();
        if s.store().unify_atoms(&head[i], b) {
            used.push(j);
            if match_from(s, head, avail, same_as_prev, used, k) {
                return true;
            }
            used.pop();
        }
        s.store().undo(mark);
    }
    false
}

/// Every head matching of `head` into `lambda`, each reported under its
/// own unifier; the store is left as it was.
pub fn match_head(head: &[Atom], lambda: &[Atom], store: &mut BindingStore) -> Vec<HeadMatch> {
    let mut out = Vec::new();
    enum_matches(store, head, lambda, &mut |st, used| {
        let residual = (0..lambda.len())
            .filter(|j| !used.contains(j))
            .map(|j| st.resolve_atom(&lambda[j]))
            .collect();
        out.push(HeadMatch {
            assignment: used.to_vec(),
            residual,
            head: head.iter().map(|a| st.resolve_atom(a)).collect(),
        });
        false
    });
    out
}

/// One instance of a goal reduction on the left, before the linear
/// contexts are divided between the linear premises.
#[derive(Clone, Debug)]
pub struct GlInstance {
    pub side: Side,
    pub goal: Goal,
    /// Zero-based.
    pub clause: usize,
    pub sigma: Vec<Term>,
    /// Focused sequents with empty linear contexts.
    pub classical: Vec<GSequent>,
    /// Goals of the linear premises.
    pub linear: Vec<Goal>,
    /// Linear program to be shared by the linear premises.
    pub gamma_rest: Vec<Goal>,
    /// Atomic context to be shared by the linear premises.
    pub lambda_rest: Vec<Atom>,
}

/// Every goal reduction on the left applicable to a state sequent, with
/// the clause binder instantiated by fresh metavariables and resolved by
/// head matching. The store is left as it was.
pub fn expand_state(s: &GSequent, store: &mut BindingStore) -> Vec<GlInstance> {
    assert!(s.is_state(), "expand_state needs a state sequent");
    let mut cands: Vec<(Side, &Goal)> = Vec::new();
    for (side, list) in [(Side::Gamma, &s.ctx.gamma), (Side::Psi, &s.ctx.psi)] {
        for g in list.iter() {
            if g.is_top()
                || cands
                    .iter()
                    .any(|(sd, h)| *sd == side && alpha_eq_goal(g, h))
            {
                continue;
            }
            cands.push((side, g));
        }
    }
    let mut out = Vec::new();
    for (side, goal) in cands {
        let gamma = match side {
            Side::Gamma => {
                mset_diff(&s.ctx.gamma, std::slice::from_ref(goal)).expect("selected goal")
            }
            Side::Psi => s.ctx.gamma.clone(),
        };
        for (l, clause) in goal.clauses.iter().enumerate() {
            let metas: Vec<Term> = goal
                .binder
                .iter()
                .map(|v| Term::Var(store.fresh_meta(&v.name)))
                .collect();
            let d = Subst::zip(&goal.binder, &metas).clause(clause);
            for m in match_head(&d.head, &s.ctx.lambda, store) {
                let mark = store.mark();
                for (i, j) in m.assignment.iter().enumerate() {
                    store.unify_atoms(&d.head[i], &s.ctx.lambda[*j]);
                }
                let classical =
                    d.cp.iter()
                        .map(|g| {
                            GSequent::focused(
                                Contexts::classical(s.ctx.psi.clone()),
                                store.resolve_goal(g),
                            )
                        })
                        .collect();
                out.push(GlInstance {
                    side,
                    goal: goal.clone(),
                    clause: l,
                    sigma: metas.iter().map(|t| store.resolve(t)).collect(),
                    classical,
                    linear: d.lp.iter().map(|g| store.resolve_goal(g)).collect(),
                    gamma_rest: gamma.iter().map(|g| store.resolve_goal(g)).collect(),
                    lambda_rest: m.residual,
                });
                store.undo(mark);
            }
        }
    }
    out
}
