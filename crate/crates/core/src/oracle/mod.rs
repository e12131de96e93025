//! A small-step prover for the Forum fragment, used to cross-check the
//! engine and to expand its macro rules into elementary steps.

mod expand;
mod prover;
mod step;

use std::collections::BTreeSet;
use std::fmt;

use crate::sequent::{mset_eq, GSequent};
use crate::syntax::{
    alpha_eq_formula, goal_to_formula, print_atom, print_formula, Atom, Formula, Namer, Term, VarId,
};

pub use expand::{expand_all, expand_macro, ExpansionMismatch};
pub use prover::{prove_forum, OracleConfig, OracleReport, Verdict};
pub use step::{check_derivation, check_step};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Right {
    /// A formula focused on the left; the right holds atoms only.
    Focus(Formula),
    /// Formulas still to be decomposed on the right, in order.
    Xi(Vec<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForumSequent {
    pub psi: Vec<Formula>,
    pub gamma: Vec<Formula>,
    pub right: Right,
    pub lambda: Vec<Atom>,
}

impl ForumSequent {
    pub fn unfocused(
        psi: Vec<Formula>,
        gamma: Vec<Formula>,
        xi: Vec<Formula>,
        lambda: Vec<Atom>,
    ) -> ForumSequent {
        ForumSequent {
            psi,
            gamma,
            right: Right::Xi(xi),
            lambda,
        }
    }

    pub fn focused(
        psi: Vec<Formula>,
        gamma: Vec<Formula>,
        f: Formula,
        lambda: Vec<Atom>,
    ) -> ForumSequent {
        ForumSequent {
            psi,
            gamma,
            right: Right::Focus(f),
            lambda,
        }
    }

    /// `[] |- [f]`.
    pub fn of_formula(f: Formula) -> ForumSequent {
        ForumSequent::unfocused(vec![], vec![], vec![f], vec![])
    }

    /// The Forum reading of a G-Forum sequent: goals become formulas and
    /// a right-focused goal becomes the only element of the right context.
    pub fn from_gsequent(s: &GSequent) -> ForumSequent {
        ForumSequent::unfocused(
            s.ctx.psi.iter().map(goal_to_formula).collect(),
            s.ctx.gamma.iter().map(goal_to_formula).collect(),
            s.focus.iter().map(goal_to_formula).collect(),
            s.ctx.lambda.clone(),
        )
    }

    pub fn is_state(&self) -> bool {
        matches!(&self.right, Right::Xi(xi) if xi.is_empty())
    }

    pub fn show(&self, namer: &Namer) -> String {
        let list = |xs: &[Formula]| {
            xs.iter()
                .map(|f| print_formula(f, namer))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let lambda = self
            .lambda
            .iter()
            .map(|a| print_atom(a, namer))
            .collect::<Vec<_>>()
            .join(", ");
        match &self.right {
            Right::Focus(f) => format!(
                "[{} ; {}] {} |- [ ; {}]",
                list(&self.psi),
                list(&self.gamma),
                print_formula(f, namer),
                lambda
            ),
            Right::Xi(xi) => format!(
                "[{} ; {}] |- [{} ; {}]",
                list(&self.psi),
                list(&self.gamma),
                list(xi),
                lambda
            ),
        }
    }
}

impl fmt::Display for ForumSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.show(&Namer::default()))
    }
}

/// Equality with contexts as multisets and formulas up to bound renaming.
pub fn forum_seq_eq(s: &ForumSequent, t: &ForumSequent) -> bool {
    let right = match (&s.right, &t.right) {
        (Right::Focus(f), Right::Focus(g)) => alpha_eq_formula(f, g),
        (Right::Xi(xs), Right::Xi(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(f, g)| alpha_eq_formula(f, g))
        }
        _ => false,
    };
    right && mset_eq(&s.psi, &t.psi) && mset_eq(&s.gamma, &t.gamma) && mset_eq(&s.lambda, &t.lambda)
}

/// Free variables of every formula and atom of the sequent.
pub fn forum_vars(s: &ForumSequent) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    let right: Vec<&Formula> = match &s.right {
        Right::Focus(f) => vec![f],
        Right::Xi(xs) => xs.iter().collect(),
    };
    for f in s.psi.iter().chain(&s.gamma).chain(right) {
        out.extend(f.free_vars());
    }
    for a in &s.lambda {
        a.free_vars(&mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ForumRule {
    Init,
    DecideLinear,
    DecideClassical,
    Atom,
    BotL,
    BotR,
    TopR,
    ParL,
    ParR,
    WithLL,
    WithLR,
    WithR,
    LolliL,
    LolliR,
    ImpL,
    ImpR,
    ForallL,
    ForallR,
    /// Not a rule: an unproved leaf of a derivation.
    Open,
}

impl ForumRule {
    pub fn name(self) -> &'static str {
        match self {
            ForumRule::Init => "i",
            ForumRule::DecideLinear => "d_L",
            ForumRule::DecideClassical => "d_C",
            ForumRule::Atom => "a",
            ForumRule::BotL => "bot_L",
            ForumRule::BotR => "bot_R",
            ForumRule::TopR => "top_R",
            ForumRule::ParL => "par_L",
            ForumRule::ParR => "par_R",
            ForumRule::WithLL => "with_LL",
            ForumRule::WithLR => "with_LR",
            ForumRule::WithR => "with_R",
            ForumRule::LolliL => "lolli_L",
            ForumRule::LolliR => "lolli_R",
            ForumRule::ImpL => "imp_L",
            ForumRule::ImpR => "imp_R",
            ForumRule::ForallL => "forall_L",
            ForumRule::ForallR => "forall_R",
            ForumRule::Open => "open",
        }
    }

    pub fn is_left(self) -> bool {
        matches!(
            self,
            ForumRule::Init
                | ForumRule::BotL
                | ForumRule::ParL
                | ForumRule::WithLL
                | ForumRule::WithLR
                | ForumRule::LolliL
                | ForumRule::ImpL
                | ForumRule::ForallL
        )
    }
}

/// A derivation in the small-step system; `Open` leaves are premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: ForumRule,
    pub conclusion: ForumSequent,
    /// Instantiating term of a left quantifier step, or the eigenvariable
    /// of a right one.
    pub witness: Option<Term>,
    pub children: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: ForumRule, conclusion: ForumSequent, children: Vec<Derivation>) -> Derivation {
        Derivation {
            rule,
            conclusion,
            witness: None,
            children,
        }
    }

    pub fn open(conclusion: ForumSequent) -> Derivation {
        Derivation::new(ForumRule::Open, conclusion, vec![])
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(Derivation::height)
            .max()
            .unwrap_or(0)
    }

    /// Open leaves, left to right.
    pub fn premises(&self) -> Vec<&ForumSequent> {
        if self.rule == ForumRule::Open {
            return vec![&self.conclusion];
        }
        self.children
            .iter()
            .flat_map(Derivation::premises)
            .collect()
    }

    pub fn rules(&self) -> Vec<ForumRule> {
        let mut out = vec![self.rule];
        for c in &self.children {
            out.extend(c.rules());
        }
        out
    }

    pub fn is_proof(&self) -> bool {
        self.premises().is_empty()
    }

    /// Whether no left rule is applied to a sequent with formulas left on
    /// the right.
    pub fn is_uniform(&self) -> bool {
        let here = match self.rule {
            r if r.is_left() => matches!(self.conclusion.right, Right::Focus(_)),
            ForumRule::DecideLinear | ForumRule::DecideClassical => self.conclusion.is_state(),
            _ => true,
        };
        here && self.children.iter().all(Derivation::is_uniform)
    }
}

#[cfg(test)]
mod tests;
