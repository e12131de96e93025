//! Proof trees over G-Forum sequents, their checker and measures.

mod check;
mod io;

use std::collections::BTreeSet;

use crate::sequent::GSequent;
use crate::syntax::{Clause, Goal, Subst, Term, Var, VarId};

pub use check::{check, CheckError};
pub use io::{proof_from_json, proof_to_json, sequent_from_json, sequent_to_json, ProofIoError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Psi,
    Gamma,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Psi => "psi",
            Side::Gamma => "gamma",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Reduction of the focused goal; `eigen` replaces its binder.
    GoalRight { eigen: Vec<Var> },
    /// Reduction of `goal`, selected from `side`, through its clause number
    /// `clause` (zero-based) instantiated by `sigma`. Children are the
    /// classical premises followed by the linear ones.
    GoalLeft {
        side: Side,
        goal: Goal,
        clause: usize,
        sigma: Vec<Term>,
    },
    /// Left child proves `cut` on the right; the right child uses it in its
    /// linear program.
    CutLinear { cut: Goal },
    /// Left child proves `cut` with empty linear contexts; the right child
    /// has `copies` of it in its classical program.
    GenCutClassical { cut: Goal, copies: usize },
    /// The child has one more copy of `goal` in its classical program.
    Contract { goal: Goal },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::GoalRight { .. } => "GR",
            Rule::GoalLeft { .. } => "GL",
            Rule::CutLinear { .. } => "CutLinear",
            Rule::GenCutClassical { .. } => "GenCutClassical",
            Rule::Contract { .. } => "Contract",
        }
    }

    pub fn is_cut(&self) -> bool {
        matches!(self, Rule::CutLinear { .. } | Rule::GenCutClassical { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: Rule,
    pub conclusion: GSequent,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn new(rule: Rule, conclusion: GSequent, children: Vec<ProofNode>) -> ProofNode {
        ProofNode {
            rule,
            conclusion,
            children,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }

    /// Pre-order traversal.
    pub fn nodes(&self) -> Vec<&ProofNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    pub fn count(&self, pred: impl Fn(&Rule) -> bool + Copy) -> usize {
        usize::from(pred(&self.rule)) + self.children.iter().map(|c| c.count(pred)).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.count(Rule::is_cut) == 0
    }

    pub fn is_contraction_free(&self) -> bool {
        self.count(|r| matches!(r, Rule::Contract { .. })) == 0
    }

    /// Applies `s` to every sequent and payload, giving every eigenvariable
    /// introduced by a goal reduction a fresh identity.
    pub fn subst(&self, s: &Subst) -> ProofNode {
        let conclusion = subst_sequent(&self.conclusion, s);
        match &self.rule {
            Rule::GoalRight { eigen } => {
                let fresh: Vec<Var> = eigen.iter().map(Var::renamed).collect();
                let mut inner = s.clone();
                for (old, new) in eigen.iter().zip(&fresh) {
                    inner.insert(old, Term::Var(new.clone()));
                }
                ProofNode {
                    rule: Rule::GoalRight { eigen: fresh },
                    conclusion,
                    children: self.children.iter().map(|c| c.subst(&inner)).collect(),
                }
            }
            rule => ProofNode {
                rule: subst_rule(rule, s),
                conclusion,
                children: self.children.iter().map(|c| c.subst(s)).collect(),
            },
        }
    }

    /// Free variables of every conclusion and payload in the tree.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for n in self.nodes() {
            out.extend(sequent_vars(&n.conclusion));
            if let Rule::GoalRight { eigen } = &n.rule {
                out.extend(eigen.iter().map(|v| v.id));
            }
        }
        out
    }
}

fn subst_rule(rule: &Rule, s: &Subst) -> Rule {
    match rule {
        Rule::GoalRight { eigen } => Rule::GoalRight {
            eigen: eigen.clone(),
        },
        Rule::GoalLeft {
            side,
            goal,
            clause,
            sigma,
        } => Rule::GoalLeft {
            side: *side,
            goal: s.goal(goal),
            clause: *clause,
            sigma: sigma.iter().map(|t| s.term(t)).collect(),
        },
        Rule::CutLinear { cut } => Rule::CutLinear { cut: s.goal(cut) },
        Rule::GenCutClassical { cut, copies } => Rule::GenCutClassical {
            cut: s.goal(cut),
            copies: *copies,
        },
        Rule::Contract { goal } => Rule::Contract { goal: s.goal(goal) },
    }
}

pub fn subst_sequent(q: &GSequent, s: &Subst) -> GSequent {
    if s.is_empty() {
        return q.clone();
    }
    let mut out = q.clone();
    for g in out.ctx.psi.iter_mut().chain(out.ctx.gamma.iter_mut()) {
        *g = s.goal(g);
    }
    for a in out.ctx.lambda.iter_mut() {
        *a = s.atom(a);
    }
    out.focus = q.focus.as_ref().map(|g| s.goal(g));
    out
}

pub fn sequent_vars(q: &GSequent) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    for g in q.ctx.psi.iter().chain(&q.ctx.gamma).chain(&q.focus) {
        out.extend(g.free_vars());
    }
    for a in &q.ctx.lambda {
        a.free_vars(&mut out);
    }
    out
}

/// Cut-rank of a goal.
pub fn cut_rank_goal(g: &Goal) -> usize {
    g.clauses.iter().map(cut_rank_clause).max().unwrap_or(0) + 1
}

/// Cut-rank of a clause.
pub fn cut_rank_clause(c: &Clause) -> usize {
    c.cp.iter()
        .chain(&c.lp)
        .map(cut_rank_goal)
        .max()
        .unwrap_or(0)
        + 1
}

/// Largest cut-rank of a cut in the proof; zero for cut-free proofs.
pub fn cut_rank_proof(p: &ProofNode) -> usize {
    let own = match &p.rule {
        Rule::CutLinear { cut } | Rule::GenCutClassical { cut, .. } => cut_rank_goal(cut),
        _ => 0,
    };
    p.children.iter().map(cut_rank_proof).fold(own, usize::max)
}

/// Height of the tree, counting a leaf as one.
pub fn depth(p: &ProofNode) -> usize {
    p.children.iter().map(depth).max().unwrap_or(0) + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequent::Contexts;
    use crate::syntax::parse_goal;

    fn g(s: &str) -> Goal {
        parse_goal(s).unwrap()
    }

    /// Straight transcription of the cut-rank definition over formulas.
    fn rank_oracle(f: &crate::syntax::Formula) -> usize {
        let g = Goal::from_formula(f).unwrap();
        1 + g
            .clauses
            .iter()
            .map(|c| {
                1 + c
                    .cp
                    .iter()
                    .chain(&c.lp)
                    .map(|h| rank_oracle(&h.to_formula()))
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn goal_ranks() {
        assert_eq!(cut_rank_goal(&g("forall x. top")), 1);
        assert_eq!(cut_rank_goal(&g("a")), 2);
        assert_eq!(cut_rank_goal(&g("(forall x. top) -o bot")), 3);
        for s in [
            "a",
            "(a -o b) & c",
            "((a => b) -o c) -o d",
            "forall x. top",
            "bot",
        ] {
            assert_eq!(cut_rank_goal(&g(s)), rank_oracle(&g(s).to_formula()), "{s}");
        }
    }

    fn top_leaf() -> ProofNode {
        ProofNode::new(
            Rule::GoalRight { eigen: vec![] },
            GSequent::focused(Contexts::default(), Goal::top()),
            vec![],
        )
    }

    #[test]
    fn proof_measures() {
        let leaf = top_leaf();
        assert_eq!(depth(&leaf), 1);
        assert_eq!(cut_rank_proof(&leaf), 0);
        let cut = |goal: &str, l: ProofNode, r: ProofNode| {
            ProofNode::new(
                Rule::CutLinear { cut: g(goal) },
                GSequent::default(),
                vec![l, r],
            )
        };
        let inner = cut("a", leaf.clone(), leaf.clone());
        assert_eq!(cut_rank_proof(&inner), 2);
        let outer = cut("a -o b", inner, leaf.clone());
        assert_eq!(cut_rank_proof(&outer), 4);
        assert_eq!(depth(&outer), 3);
        assert!(!outer.is_cut_free());
        let chain = ProofNode::new(
            Rule::Contract { goal: g("a") },
            GSequent::default(),
            vec![ProofNode::new(
                Rule::Contract { goal: g("a") },
                GSequent::default(),
                vec![leaf],
            )],
        );
        assert_eq!(depth(&chain), 3);
        assert_eq!(cut_rank_proof(&chain), 0);
    }
}
