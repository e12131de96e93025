use super::*;
use crate::proofs::Side;
use crate::sequent::mset_member;
use crate::syntax::alpha_eq_goal;

impl Normalizer {
    /// Pushes every contraction up to the leaves, where it disappears.
    pub(super) fn contractions(&mut self, p: &ProofNode) -> Result<ProofNode> {
        let children = p
            .children
            .iter()
            .map(|c| self.contractions(c))
            .collect::<Result<Vec<_>>>()?;
        match &p.rule {
            Rule::Contract { goal } => self.remove_copy(&children[0], goal),
            r if r.is_cut() => Err(CutElimError::Unexpected(
                "cut in the contraction phase".into(),
            )),
            _ => Ok(with_conclusion(p, p.conclusion.clone(), children)),
        }
    }

    /// Drops one of at least two copies of `goal` from the classical
    /// program of a contraction-free proof.
    fn remove_copy(&mut self, p: &ProofNode, goal: &Goal) -> Result<ProofNode> {
        self.budget(|| contract_all(p.clone(), std::slice::from_ref(goal)))?;
        let slot = self.open("contraction");
        let mut conclusion = p.conclusion.clone();
        if !mset_remove(&mut conclusion.ctx.psi, goal) || !mset_member(goal, &conclusion.ctx.psi) {
            return Err(CutElimError::Unexpected(format!(
                "fewer than two copies of {goal} to contract"
            )));
        }
        let case = match &p.rule {
            _ if p.children.is_empty() => "leaf",
            Rule::GoalRight { .. } => "gr",
            // Both copies are available above a classical selection, so
            // the surviving one serves.
            Rule::GoalLeft {
                side: Side::Psi,
                goal: g,
                ..
            } if alpha_eq_goal(g, goal) => "gl-selected",
            Rule::GoalLeft { .. } => "gl",
            r => {
                return Err(CutElimError::Unexpected(format!(
                    "{} in the contraction phase",
                    r.name()
                )))
            }
        };
        let children = p
            .children
            .iter()
            .map(|c| self.remove_copy(c, goal))
            .collect::<Result<Vec<_>>>()?;
        self.close(slot, case, 0, 0);
        Ok(with_conclusion(p, conclusion, children))
    }
}
