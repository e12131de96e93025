use super::*;
use crate::proofs::Side;
use crate::sequent::mset_member;
use crate::syntax::alpha_eq_goal;

/// Path to the leftmost linear cut of rank `r` with no such cut above it.
fn topmost(p: &ProofNode, r: usize, path: &mut Vec<usize>) -> Option<Vec<usize>> {
    for (i, c) in p.children.iter().enumerate() {
        path.push(i);
        if let Some(found) = topmost(c, r, path) {
            return Some(found);
        }
        path.pop();
    }
    match &p.rule {
        Rule::CutLinear { cut } if cut_rank_goal(cut) == r => Some(path.clone()),
        _ => None,
    }
}

fn at<'a>(p: &'a ProofNode, path: &[usize]) -> &'a ProofNode {
    path.iter().fold(p, |n, &i| &n.children[i])
}

fn replace(p: &mut ProofNode, path: &[usize], new: ProofNode) {
    let slot = path.iter().fold(p, |n, &i| &mut n.children[i]);
    *slot = new;
}

/// Whether `right` is a reduction of the cut occurrence itself.
fn principal(right: &ProofNode, cut: &Goal) -> bool {
    matches!(&right.rule, Rule::GoalLeft { side: Side::Gamma, goal, .. } if alpha_eq_goal(goal, cut))
}

impl Normalizer {
    /// Replaces linear cuts of the largest rank, topmost first, until none
    /// remain; each round must lower the largest rank.
    pub(super) fn linear_cuts(&mut self, mut p: ProofNode) -> Result<ProofNode> {
        if has_rule(&p, |r| matches!(r, Rule::GenCutClassical { .. })) {
            return Err(CutElimError::Unexpected(
                "classical cut in the linear phase".into(),
            ));
        }
        let mut r = cut_rank_proof(&p);
        self.report.linear_ranks.push(r);
        while r > 0 {
            while let Some(path) = topmost(&p, r, &mut Vec::new()) {
                let node = at(&p, &path);
                let Rule::CutLinear { cut } = &node.rule else {
                    unreachable!()
                };
                let new = self.lin_cut(&node.children[0], &node.children[1], cut)?;
                let after = cut_rank_proof(&new);
                if after >= r {
                    return Err(CutElimError::RankViolation(format!(
                        "replacing a cut of rank {r} left a proof of rank {after}"
                    )));
                }
                replace(&mut p, &path, new);
                self.verify(&p, "linear-cut", "round")?;
            }
            let next = cut_rank_proof(&p);
            self.report.linear_ranks.push(next);
            if next >= r {
                return Err(CutElimError::RankViolation(format!(
                    "linear cut-rank went from {r} to {next}"
                )));
            }
            r = next;
        }
        Ok(p)
    }

    /// `left` proves the cut goal, `right` has it in its linear program.
    /// Recursion is on the sum of their heights; the key case builds cuts
    /// of smaller rank instead of recursing.
    fn lin_cut(&mut self, left: &ProofNode, right: &ProofNode, cut: &Goal) -> Result<ProofNode> {
        self.budget(|| cut_linear(cut.clone(), left.clone(), right.clone()))?;
        let slot = self.open("linear-cut");
        let before = rank_of(cut, left, right);
        let conclusion = cut_linear(cut.clone(), left.clone(), right.clone()).conclusion;
        let (case, out) = if principal(right, cut) {
            match &left.rule {
                Rule::GoalRight { eigen } => ("principal", self.key_case(left, eigen, right)?),
                Rule::CutLinear { cut: g } => {
                    // Inferred rewiring: the lower cut moves into the
                    // premise that proves the cut goal.
                    let n = self.lin_cut(&left.children[1], right, cut)?;
                    (
                        "cut-above",
                        cut_linear(g.clone(), left.children[0].clone(), n),
                    )
                }
                Rule::Contract { .. } => {
                    let n = self.lin_cut(&left.children[0], right, cut)?;
                    ("contract-above", with_conclusion(left, conclusion, vec![n]))
                }
                r => {
                    return Err(CutElimError::Unexpected(format!(
                        "{} proving the cut goal",
                        r.name()
                    )))
                }
            }
        } else {
            match &right.rule {
                Rule::GoalLeft {
                    goal,
                    clause,
                    sigma,
                    ..
                } => {
                    let d = Subst::zip(&goal.binder, sigma).clause(&goal.clauses[*clause]);
                    let psi = &left.conclusion.ctx.psi;
                    let mut used = false;
                    let mut children = Vec::new();
                    for (i, c) in right.children.iter().enumerate() {
                        if !used && i >= d.cp.len() && mset_member(cut, &c.conclusion.ctx.gamma) {
                            used = true;
                            children.push(self.lin_cut(left, c, cut)?);
                        } else {
                            children.push(weaken_classical(c, psi));
                        }
                    }
                    if !used {
                        return Err(CutElimError::Unexpected(format!(
                            "no premise receives the cut goal {cut}"
                        )));
                    }
                    ("gl", with_conclusion(right, conclusion, children))
                }
                Rule::GoalRight { .. } => {
                    let right = freshen(right, &vars_of(&left.conclusion));
                    let children = right
                        .children
                        .iter()
                        .map(|c| self.lin_cut(left, c, cut))
                        .collect::<Result<Vec<_>>>()?;
                    let case = if children.is_empty() { "top" } else { "gr" };
                    (case, with_conclusion(&right, conclusion, children))
                }
                Rule::CutLinear { cut: h } => {
                    let (r1, r2) = (&right.children[0], &right.children[1]);
                    if mset_member(cut, &r1.conclusion.ctx.gamma) {
                        let n1 = self.lin_cut(left, r1, cut)?;
                        ("cut-left", cut_linear(h.clone(), n1, r2.clone()))
                    } else {
                        let n2 = self.lin_cut(left, r2, cut)?;
                        ("cut-right", cut_linear(h.clone(), r1.clone(), n2))
                    }
                }
                Rule::Contract { .. } => {
                    let n = self.lin_cut(left, &right.children[0], cut)?;
                    ("contract", with_conclusion(right, conclusion, vec![n]))
                }
                Rule::GenCutClassical { .. } => {
                    return Err(CutElimError::Unexpected(
                        "classical cut in the linear phase".into(),
                    ))
                }
            }
        };
        self.close(slot, case, before, cut_rank_proof(&out));
        Ok(out)
    }

    /// The cut goal is reduced on the right by `left` and selected by
    /// `right`: the chosen clause's premise of `left`, instantiated, is cut
    /// against the premises of `right`.
    fn key_case(
        &mut self,
        left: &ProofNode,
        eigen: &[Var],
        right: &ProofNode,
    ) -> Result<ProofNode> {
        let Rule::GoalLeft {
            goal,
            clause,
            sigma,
            ..
        } = &right.rule
        else {
            unreachable!()
        };
        let inst = Subst::zip(eigen, sigma);
        let mut y = left.children[*clause].subst(&inst);
        let d = Subst::zip(&goal.binder, sigma).clause(&goal.clauses[*clause]);
        let (classical, linear) = right.children.split_at(d.cp.len());
        for (h, p) in d.lp.iter().zip(linear) {
            y = cut_linear(h.clone(), p.clone(), y);
        }
        for (g, p) in d.cp.iter().zip(classical) {
            y = gen_cut(g.clone(), 1, p.clone(), y);
        }
        let program = &right.conclusion.ctx.psi;
        let n = d.cp.len() + d.lp.len();
        // Each premise of `right` brought its own copy of the program.
        let y = if n == 0 {
            weaken_classical(&y, program)
        } else {
            let extra: Vec<Goal> = (1..n).flat_map(|_| program.iter().cloned()).collect();
            contract_all(y, &extra)
        };
        self.gen_cut_pass(&y)
    }
}
