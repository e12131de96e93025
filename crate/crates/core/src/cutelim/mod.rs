//! Cut elimination: generalized classical cuts first, then linear cuts by
//! decreasing rank, then contraction. Every transformation keeps the
//! conclusion.

mod contract;
mod gencut;
mod lincut;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::proofs::{
    check, cut_rank_goal, cut_rank_proof, sequent_vars, CheckError, ProofNode, Rule,
};
use crate::sequent::{mset_remove, Contexts, GSequent};
use crate::syntax::{Goal, Subst, Term, Var, VarId};

#[derive(Clone, Debug)]
pub struct CutElimConfig {
    /// Re-check the whole proof after every replaced redex.
    pub check_steps: bool,
    /// Bound on applied cases before giving up.
    pub max_steps: usize,
}

impl Default for CutElimConfig {
    fn default() -> Self {
        CutElimConfig {
            check_steps: false,
            max_steps: 1_000_000,
        }
    }
}

/// One applied case of a transformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub lemma: &'static str,
    pub case: &'static str,
    pub rank_before: usize,
    pub rank_after: usize,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} -> {}",
            self.lemma, self.case, self.rank_before, self.rank_after
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub steps: Vec<Step>,
    /// Proof cut-rank before and after each classical cut elimination pass.
    pub gen_cut_ranks: Vec<(usize, usize)>,
    /// Largest linear cut-rank when the linear phase starts and after each
    /// of its rounds.
    pub linear_ranks: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum CutElimError {
    #[error("invalid input proof: {0}")]
    InvalidProof(CheckError),
    #[error("{0}")]
    Unexpected(String),
    #[error("rank discipline violated: {0}")]
    RankViolation(String),
    #[error("invalid proof after {lemma} {case}: {error}")]
    InvalidStep {
        lemma: &'static str,
        case: &'static str,
        error: CheckError,
    },
    #[error("gave up after {steps} steps on a cut with conclusion {}", .proof.conclusion)]
    NonTermination { steps: usize, proof: Box<ProofNode> },
}

pub type Result<T> = std::result::Result<T, CutElimError>;

pub(crate) struct Normalizer {
    config: CutElimConfig,
    report: Report,
}

impl Normalizer {
    fn new(config: &CutElimConfig) -> Normalizer {
        Normalizer {
            config: config.clone(),
            report: Report::default(),
        }
    }

    /// Reserves the log line of a case applied now and finished later, so
    /// that the log lists outer cases before the ones they trigger.
    fn open(&mut self, lemma: &'static str) -> usize {
        self.report.steps.push(Step {
            lemma,
            case: "",
            rank_before: 0,
            rank_after: 0,
        });
        self.report.steps.len() - 1
    }

    fn close(&mut self, slot: usize, case: &'static str, before: usize, after: usize) {
        let step = &mut self.report.steps[slot];
        step.case = case;
        step.rank_before = before;
        step.rank_after = after;
    }

    fn budget(&self, redex: impl FnOnce() -> ProofNode) -> Result<()> {
        if self.report.steps.len() >= self.config.max_steps {
            return Err(CutElimError::NonTermination {
                steps: self.report.steps.len(),
                proof: Box::new(redex()),
            });
        }
        Ok(())
    }

    fn verify(&self, p: &ProofNode, lemma: &'static str, case: &'static str) -> Result<()> {
        if self.config.check_steps {
            check(p).map_err(|error| CutElimError::InvalidStep { lemma, case, error })?;
        }
        Ok(())
    }

    /// Classical cut elimination with its rank assertion.
    fn gen_cut_pass(&mut self, p: &ProofNode) -> Result<ProofNode> {
        let before = cut_rank_proof(p);
        let out = self.gen_cuts(p)?;
        let after = cut_rank_proof(&out);
        self.report.gen_cut_ranks.push((before, after));
        if after > before {
            return Err(CutElimError::RankViolation(format!(
                "classical cut elimination raised the cut-rank from {before} to {after}"
            )));
        }
        self.verify(&out, "gen-cut", "pass")?;
        Ok(out)
    }
}

/// Adds `extra` to the classical program of the conclusion, following one
/// premise of each cut and every premise of other rules.
pub fn weaken_classical(p: &ProofNode, extra: &[Goal]) -> ProofNode {
    if extra.is_empty() {
        return p.clone();
    }
    let avoid: BTreeSet<VarId> = extra.iter().flat_map(Goal::free_vars).collect();
    weaken(p, extra, &avoid)
}

fn weaken(p: &ProofNode, extra: &[Goal], avoid: &BTreeSet<VarId>) -> ProofNode {
    let p = freshen(p, avoid);
    let mut conclusion = p.conclusion.clone();
    conclusion.ctx.psi.extend(extra.iter().cloned());
    let children = match &p.rule {
        Rule::CutLinear { .. } | Rule::GenCutClassical { .. } => {
            vec![p.children[0].clone(), weaken(&p.children[1], extra, avoid)]
        }
        _ => p.children.iter().map(|c| weaken(c, extra, avoid)).collect(),
    };
    ProofNode::new(p.rule.clone(), conclusion, children)
}

/// Renames the eigenvariables of a goal reduction at the root that clash
/// with `avoid`.
fn freshen(p: &ProofNode, avoid: &BTreeSet<VarId>) -> ProofNode {
    let Rule::GoalRight { eigen } = &p.rule else {
        return p.clone();
    };
    if eigen.iter().all(|v| !avoid.contains(&v.id)) {
        return p.clone();
    }
    let fresh: Vec<Var> = eigen.iter().map(Var::renamed).collect();
    let terms: Vec<Term> = fresh.iter().cloned().map(Term::Var).collect();
    let s = Subst::zip(eigen, &terms);
    ProofNode::new(
        Rule::GoalRight { eigen: fresh },
        p.conclusion.clone(),
        p.children.iter().map(|c| c.subst(&s)).collect(),
    )
}

fn vars_of(s: &GSequent) -> BTreeSet<VarId> {
    sequent_vars(s)
}

/// Linear cut of `left`'s focused goal against an occurrence in `right`.
pub(crate) fn cut_linear(cut: Goal, left: ProofNode, right: ProofNode) -> ProofNode {
    let (l, r) = (&left.conclusion, &right.conclusion);
    let mut gamma = r.ctx.gamma.clone();
    mset_remove(&mut gamma, &cut);
    let conclusion = GSequent {
        ctx: Contexts {
            psi: [l.ctx.psi.clone(), r.ctx.psi.clone()].concat(),
            gamma: [l.ctx.gamma.clone(), gamma].concat(),
            lambda: [l.ctx.lambda.clone(), r.ctx.lambda.clone()].concat(),
        },
        focus: r.focus.clone(),
    };
    ProofNode::new(Rule::CutLinear { cut }, conclusion, vec![left, right])
}

pub(crate) fn gen_cut(cut: Goal, copies: usize, left: ProofNode, right: ProofNode) -> ProofNode {
    let mut psi = right.conclusion.ctx.psi.clone();
    for _ in 0..copies {
        mset_remove(&mut psi, &cut);
    }
    let mut conclusion = right.conclusion.clone();
    conclusion.ctx.psi = [left.conclusion.ctx.psi.clone(), psi].concat();
    ProofNode::new(
        Rule::GenCutClassical { cut, copies },
        conclusion,
        vec![left, right],
    )
}

/// Contracts one copy of each goal of `goals`, innermost first.
fn contract_all(mut p: ProofNode, goals: &[Goal]) -> ProofNode {
    for g in goals {
        let mut conclusion = p.conclusion.clone();
        mset_remove(&mut conclusion.ctx.psi, g);
        p = ProofNode::new(Rule::Contract { goal: g.clone() }, conclusion, vec![p]);
    }
    p
}

fn with_conclusion(p: &ProofNode, conclusion: GSequent, children: Vec<ProofNode>) -> ProofNode {
    ProofNode::new(p.rule.clone(), conclusion, children)
}

fn rank_of(cut: &Goal, a: &ProofNode, b: &ProofNode) -> usize {
    cut_rank_goal(cut)
        .max(cut_rank_proof(a))
        .max(cut_rank_proof(b))
}

fn has_rule(p: &ProofNode, pred: impl Fn(&Rule) -> bool + Copy) -> bool {
    p.count(pred) > 0
}

/// Removes every generalized classical cut; the cut-rank does not grow.
pub fn eliminate_gen_cut_classical(p: &ProofNode) -> Result<ProofNode> {
    check(p).map_err(CutElimError::InvalidProof)?;
    Normalizer::new(&CutElimConfig::default()).gen_cut_pass(p)
}

/// Removes every linear cut from a proof without classical cuts.
pub fn eliminate_cut_linear(p: &ProofNode) -> Result<ProofNode> {
    check(p).map_err(CutElimError::InvalidProof)?;
    Normalizer::new(&CutElimConfig::default()).linear_cuts(p.clone())
}

/// Removes every contraction from a cut-free proof.
pub fn eliminate_contraction(p: &ProofNode) -> Result<ProofNode> {
    check(p).map_err(CutElimError::InvalidProof)?;
    Normalizer::new(&CutElimConfig::default()).contractions(p)
}

pub fn cut_eliminate(p: &ProofNode) -> Result<ProofNode> {
    cut_eliminate_with(p, &CutElimConfig::default()).map(|(q, _)| q)
}

/// The whole pipeline, with its step log.
pub fn cut_eliminate_with(p: &ProofNode, config: &CutElimConfig) -> Result<(ProofNode, Report)> {
    check(p).map_err(CutElimError::InvalidProof)?;
    let mut n = Normalizer::new(config);
    let q = n.gen_cut_pass(p)?;
    let q = n.linear_cuts(q)?;
    let q = n.contractions(&q)?;
    n.verify(&q, "contraction", "pass")?;
    Ok((q, n.report))
}
