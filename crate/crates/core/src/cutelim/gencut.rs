use super::*;
use crate::proofs::Side;
use crate::sequent::{mset_count, mset_diff, mset_member};
use crate::syntax::alpha_eq_goal;

impl Normalizer {
    /// Removes generalized classical cuts bottom-up, so that both premises
    /// of the cut being removed are already free of them.
    pub(super) fn gen_cuts(&mut self, p: &ProofNode) -> Result<ProofNode> {
        let children = p
            .children
            .iter()
            .map(|c| self.gen_cuts(c))
            .collect::<Result<Vec<_>>>()?;
        match &p.rule {
            Rule::GenCutClassical { cut, copies } => {
                self.gen_cut(&children[0], &children[1], cut, *copies)
            }
            _ => Ok(with_conclusion(p, p.conclusion.clone(), children)),
        }
    }

    /// `left` proves `cut` from a classical program alone; `copies` of it
    /// are removed from the classical program of `right`. Recursion is on
    /// the height of `right`.
    fn gen_cut(
        &mut self,
        left: &ProofNode,
        right: &ProofNode,
        cut: &Goal,
        copies: usize,
    ) -> Result<ProofNode> {
        self.budget(|| gen_cut(cut.clone(), copies, left.clone(), right.clone()))?;
        let slot = self.open("gen-cut");
        let before = rank_of(cut, left, right);
        let psi = &left.conclusion.ctx.psi;
        let rc = &right.conclusion;
        let rest = mset_diff(&rc.ctx.psi, &vec![cut.clone(); copies])
            .map_err(|e| CutElimError::Unexpected(format!("classical cut: {e}")))?;
        let mut conclusion = rc.clone();
        conclusion.ctx.psi = [psi.clone(), rest.clone()].concat();

        let (case, out) = if copies == 0 {
            ("unused", weaken_classical(right, psi))
        } else {
            match &right.rule {
                Rule::GoalRight { .. } => {
                    let right = freshen(right, &vars_of(&left.conclusion));
                    let children = right
                        .children
                        .iter()
                        .map(|c| self.gen_cut(left, c, cut, copies))
                        .collect::<Result<Vec<_>>>()?;
                    ("gr", with_conclusion(&right, conclusion, children))
                }
                Rule::GoalLeft {
                    side,
                    goal,
                    clause,
                    sigma,
                } => {
                    let children = right
                        .children
                        .iter()
                        .map(|c| self.gen_cut(left, c, cut, copies))
                        .collect::<Result<Vec<_>>>()?;
                    let kept = *side == Side::Gamma
                        || !alpha_eq_goal(goal, cut)
                        || mset_member(goal, &conclusion.ctx.psi);
                    if kept {
                        ("gl-other", with_conclusion(right, conclusion, children))
                    } else {
                        // The cut goal itself was selected and no other copy
                        // survives: select it from the linear program instead
                        // and cut it linearly.
                        let rule = Rule::GoalLeft {
                            side: Side::Gamma,
                            goal: goal.clone(),
                            clause: *clause,
                            sigma: sigma.clone(),
                        };
                        let mut top = rc.clone();
                        top.ctx.gamma.push(goal.clone());
                        if children.is_empty() {
                            top.ctx.psi = rest;
                            let leaf = ProofNode::new(rule, top, vec![]);
                            ("gl-selected", cut_linear(cut.clone(), left.clone(), leaf))
                        } else {
                            // Inferred rewiring: the premises now carry the
                            // left program too, so it is contracted once.
                            top.ctx.psi = conclusion.ctx.psi.clone();
                            let node = ProofNode::new(rule, top, children);
                            let joined = cut_linear(cut.clone(), left.clone(), node);
                            ("gl-selected", contract_all(joined, psi))
                        }
                    }
                }
                Rule::CutLinear { cut: h } => {
                    let (r1, r2) = (&right.children[0], &right.children[1]);
                    let l1 = copies.min(mset_count(cut, &r1.conclusion.ctx.psi));
                    let l2 = copies - l1;
                    let n1 = if l1 > 0 {
                        self.gen_cut(left, r1, cut, l1)?
                    } else {
                        r1.clone()
                    };
                    let n2 = if l2 > 0 {
                        self.gen_cut(left, r2, cut, l2)?
                    } else {
                        r2.clone()
                    };
                    let joined = cut_linear(h.clone(), n1, n2);
                    if l1 > 0 && l2 > 0 {
                        ("linear-cut-both", contract_all(joined, psi))
                    } else {
                        ("linear-cut", joined)
                    }
                }
                Rule::Contract { goal } if alpha_eq_goal(goal, cut) => (
                    "contract-principal",
                    self.gen_cut(left, &right.children[0], cut, copies + 1)?,
                ),
                Rule::Contract { .. } => {
                    let child = self.gen_cut(left, &right.children[0], cut, copies)?;
                    (
                        "contract-other",
                        with_conclusion(right, conclusion, vec![child]),
                    )
                }
                Rule::GenCutClassical { .. } => {
                    return Err(CutElimError::Unexpected(
                        "classical cut above the one being removed".into(),
                    ))
                }
            }
        };
        self.close(slot, case, before, cut_rank_proof(&out));
        Ok(out)
    }
}
