use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{enum_matches, BindingStore, HasStore, SearchConfig};
use crate::proofs::{ProofNode, Rule, Side};
use crate::sequent::{Contexts, GSequent};
use crate::syntax::{alpha_eq_goal, print_term, Atom, Clause, Goal, Namer, Subst, Term, Var};

type Token = u32;

#[derive(Clone, Debug)]
enum Res {
    Goal(Rc<Goal>),
    Atom(Atom),
}

/// Linear resources available to a subproof, sorted by token.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Pool(Vec<Token>);

impl Pool {
    fn insert(&mut self, t: Token) {
        if let Err(i) = self.0.binary_search(&t) {
            self.0.insert(i, t);
        }
    }

    fn without(&self, ts: &[Token]) -> Pool {
        Pool(self.0.iter().copied().filter(|t| !ts.contains(t)).collect())
    }

    fn minus(&self, other: &Pool) -> Pool {
        Pool(
            self.0
                .iter()
                .copied()
                .filter(|t| other.0.binary_search(t).is_err())
                .collect(),
        )
    }

    fn meet(&self, other: &Pool) -> Pool {
        Pool(
            self.0
                .iter()
                .copied()
                .filter(|t| other.0.binary_search(t).is_ok())
                .collect(),
        )
    }

    fn subset_of(&self, other: &Pool) -> bool {
        self.0.iter().all(|t| other.0.binary_search(t).is_ok())
    }

    fn touches(&self, ts: &[Token]) -> bool {
        ts.iter().any(|t| self.0.binary_search(t).is_ok())
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
struct PsiEntry {
    id: u32,
    goal: Rc<Goal>,
}

type Psi = Rc<Vec<PsiEntry>>;

/// Skeleton of a found derivation; contexts are rebuilt afterwards.
#[derive(Debug)]
enum Raw {
    Focus {
        goal: Rc<Goal>,
        eigen: Vec<Var>,
        branches: Vec<Branch>,
    },
    State {
        gl: Rc<GlInfo>,
        classical: Vec<Rc<Raw>>,
        linear: Vec<Rc<Raw>>,
    },
}

#[derive(Clone, Debug)]
struct Branch {
    cp: Vec<Goal>,
    new: Vec<Token>,
    state: Rc<Raw>,
}

#[derive(Clone, Debug)]
struct GlInfo {
    side: Side,
    goal: Rc<Goal>,
    clause: usize,
    sigma: Vec<Term>,
    selected: Option<Token>,
    head: Vec<Token>,
    inst: Clause,
}

struct Cand {
    side: Side,
    token: Option<Token>,
    id: u32,
    goal: Rc<Goal>,
}

type K<'a> = dyn FnMut(&mut Search, Pool, bool, Rc<Raw>) -> bool + 'a;

pub(super) struct Search {
    store: BindingStore,
    eager: bool,
    tracing: bool,
    budget: u64,
    rng: Option<ChaCha8Rng>,
    next_token: Token,
    registry: HashMap<Token, Res>,
    namer: Namer,
    names: u32,
    pub(super) steps: u64,
    pub(super) aborted: bool,
    pub(super) bound_hit: bool,
    pub(super) trace: Vec<String>,
}

impl HasStore for Search {
    fn store(&mut self) -> &mut BindingStore {
        &mut self.store
    }
}

impl Search {
    pub(super) fn new(cfg: &SearchConfig, budget: u64) -> Search {
        Search {
            store: BindingStore::new(),
            eager: cfg.eager_split,
            tracing: cfg.trace,
            budget,
            rng: (cfg.rng_seed != 0).then(|| ChaCha8Rng::seed_from_u64(cfg.rng_seed)),
            next_token: 0,
            registry: HashMap::new(),
            namer: Namer::new(),
            names: 0,
            steps: 0,
            aborted: false,
            bound_hit: false,
            trace: Vec::new(),
        }
    }

    pub(super) fn run(&mut self, s: &GSequent, depth: u32) -> Option<ProofNode> {
        let psi: Psi = Rc::new(
            s.ctx
                .psi
                .iter()
                .map(|g| PsiEntry {
                    id: self.alloc_id(),
                    goal: Rc::new(g.clone()),
                })
                .collect(),
        );
        let mut pool = Pool::default();
        for g in &s.ctx.gamma {
            pool.insert(self.alloc(Res::Goal(Rc::new(g.clone()))));
        }
        for a in &s.ctx.lambda {
            pool.insert(self.alloc(Res::Atom(a.clone())));
        }
        let psi_goals = s.ctx.psi.clone();
        let mut result = None;
        let mut done = |me: &mut Search, out: Pool, slack: bool, raw: Rc<Raw>| {
            if !slack && !out.is_empty() {
                return false;
            }
            result = Some(match &*raw {
                Raw::Focus { .. } => me.build_focus(&raw, &psi_goals, &pool.0),
                Raw::State { .. } => me.build_state(&raw, &psi_goals, &pool.0),
            });
            true
        };
        match &s.focus {
            Some(g) => self.solve_focus(&psi, pool.clone(), Rc::new(g.clone()), depth, &mut done),
            None => self.solve_state(&psi, pool.clone(), depth, &mut done),
        };
        result
    }

    fn alloc_id(&mut self) -> u32 {
        self.next_token += 1;
        self.next_token
    }

    fn alloc(&mut self, r: Res) -> Token {
        let t = self.alloc_id();
        self.registry.insert(t, r);
        t
    }

    fn name(&mut self, v: &Var, prefix: &str) {
        if self.tracing {
            self.names += 1;
            self.namer
                .set(v.id, format!("{prefix}{}{}", v.name, self.names));
        }
    }

    fn shuffle<T>(&mut self, xs: &mut [T]) {
        if let Some(rng) = self.rng.as_mut() {
            xs.shuffle(rng);
        }
    }

    fn solve_focus(
        &mut self,
        psi: &Psi,
        pool: Pool,
        goal: Rc<Goal>,
        depth: u32,
        k: &mut K<'_>,
    ) -> bool {
        let level = self.store.next_level();
        let eigen: Vec<Var> = goal
            .binder
            .iter()
            .map(|v| Var::eigen(&v.name, level))
            .collect();
        for e in &eigen {
            self.name(e, "!");
        }
        if self.tracing {
            let id = self.alloc_id();
            self.trace
                .push(format!("GR goal={id} branches={}", goal.clauses.len()));
        }
        if goal.clauses.is_empty() {
            return k(
                self,
                pool,
                true,
                Rc::new(Raw::Focus {
                    goal,
                    eigen,
                    branches: vec![],
                }),
            );
        }
        let terms: Vec<Term> = eigen.iter().cloned().map(Term::Var).collect();
        let rho = Subst::zip(&goal.binder, &terms);
        let clauses: Vec<Clause> = goal.clauses.iter().map(|c| rho.clause(c)).collect();
        let fx = FocusCtx {
            psi: psi.clone(),
            goal,
            eigen,
            clauses,
            pool,
        };
        self.branch(&fx, 0, None, Vec::new(), depth, k)
    }

    fn branch(
        &mut self,
        fx: &FocusCtx,
        i: usize,
        acc: Option<(Pool, bool)>,
        done: Vec<Branch>,
        depth: u32,
        k: &mut K<'_>,
    ) -> bool {
        if i == fx.clauses.len() {
            let (out, slack) = acc.expect("at least one branch");
            let raw = Raw::Focus {
                goal: fx.goal.clone(),
                eigen: fx.eigen.clone(),
                branches: done,
            };
            return k(self, out, slack, Rc::new(raw));
        }
        let c = &fx.clauses[i];
        let mut input = match &acc {
            Some((o, false)) => fx.pool.minus(o),
            _ => fx.pool.clone(),
        };
        let mut new = Vec::new();
        for g in &c.lp {
            new.push(self.alloc(Res::Goal(Rc::new(g.clone()))));
        }
        for a in &c.head {
            new.push(self.alloc(Res::Atom(a.clone())));
        }
        for t in &new {
            input.insert(*t);
        }
        let mut psi = (*fx.psi).clone();
        for g in &c.cp {
            psi.push(PsiEntry {
                id: self.alloc_id(),
                goal: Rc::new(g.clone()),
            });
        }
        let psi = Rc::new(psi);
        self.solve_state(&psi, input, depth, &mut |me, out, slack, raw| {
            if !slack && out.touches(&new) {
                return false;
            }
            let out = out.without(&new);
            let next = match &acc {
                None => (out, slack),
                Some((o, false)) => {
                    if !slack && !out.is_empty() {
                        return false;
                    }
                    (o.clone(), false)
                }
                Some((o, true)) => {
                    if slack {
                        (o.meet(&out), true)
                    } else if out.subset_of(o) {
                        (out, false)
                    } else {
                        return false;
                    }
                }
            };
            let mut done = done.clone();
            done.push(Branch {
                cp: c.cp.clone(),
                new: new.clone(),
                state: raw,
            });
            me.branch(fx, i + 1, Some(next), done, depth, &mut *k)
        })
    }

    fn candidates(&mut self, psi: &Psi, pool: &Pool) -> Vec<Cand> {
        let mut out: Vec<Cand> = Vec::new();
        let mut seen: Vec<(Side, Goal)> = Vec::new();
        let mut consider = |side, token, id, goal: &Rc<Goal>, store: &BindingStore| {
            if goal.is_top() {
                return;
            }
            let r = store.resolve_goal(goal);
            if seen.iter().any(|(s, g)| *s == side && alpha_eq_goal(g, &r)) {
                return;
            }
            seen.push((side, r));
            out.push(Cand {
                side,
                token,
                id,
                goal: goal.clone(),
            });
        };
        for t in &pool.0 {
            if let Some(Res::Goal(g)) = self.registry.get(t) {
                consider(Side::Gamma, Some(*t), *t, g, &self.store);
            }
        }
        for e in psi.iter() {
            consider(Side::Psi, None, e.id, &e.goal, &self.store);
        }
        out
    }

    /// Whether the pool holds enough atoms of each predicate for `head`.
    fn heads_available(&self, head: &[Atom], pool: &Pool) -> bool {
        let mut need: HashMap<(&str, usize), usize> = HashMap::new();
        for a in head {
            *need.entry((&a.pred, a.args.len())).or_default() += 1;
        }
        for t in &pool.0 {
            if let Some(Res::Atom(a)) = self.registry.get(t) {
                if let Some(n) = need.get_mut(&(&*a.pred, a.args.len())) {
                    *n = n.saturating_sub(1);
                }
            }
        }
        need.values().all(|n| *n == 0)
    }

    fn solve_state(&mut self, psi: &Psi, pool: Pool, depth: u32, k: &mut K<'_>) -> bool {
        if self.aborted {
            return false;
        }
        let mut cands = self.candidates(psi, &pool);
        if cands.is_empty() {
            return false;
        }
        if depth == 0 {
            self.bound_hit = true;
            return false;
        }
        self.shuffle(&mut cands);
        for cand in cands {
            let mut order: Vec<usize> = (0..cand.goal.clauses.len()).collect();
            self.shuffle(&mut order);
            for l in order {
                self.steps += 1;
                if self.steps > self.budget {
                    self.aborted = true;
                    return false;
                }
                let metas: Vec<Var> = cand
                    .goal
                    .binder
                    .iter()
                    .map(|v| self.store.fresh_meta(&v.name))
                    .collect();
                for m in &metas {
                    self.name(m, "?");
                }
                let sigma: Vec<Term> = metas.into_iter().map(Term::Var).collect();
                let inst = Subst::zip(&cand.goal.binder, &sigma).clause(&cand.goal.clauses[l]);
                let rest = match cand.token {
                    Some(t) => pool.without(&[t]),
                    None => pool.clone(),
                };
                if !self.heads_available(&inst.head, &rest) {
                    continue;
                }
                let atoms: Vec<(Token, Atom)> = rest
                    .0
                    .iter()
                    .filter_map(|t| match self.registry.get(t) {
                        Some(Res::Atom(a)) => Some((*t, a.clone())),
                        _ => None,
                    })
                    .collect();
                let avail: Vec<Atom> = atoms.iter().map(|(_, a)| a.clone()).collect();
                let mark = self.store.mark();
                let head = inst.head.clone();
                let base = GlInfo {
                    side: cand.side,
                    goal: cand.goal.clone(),
                    clause: l,
                    sigma,
                    selected: cand.token,
                    head: vec![],
                    inst,
                };
                let found = enum_matches(self, &head, &avail, &mut |me, used| {
                    let mut info = base.clone();
                    let head_tokens: Vec<Token> = used.iter().map(|j| atoms[*j].0).collect();
                    info.head = head_tokens.clone();
                    if me.tracing {
                        let sig: Vec<String> = info
                            .goal
                            .binder
                            .iter()
                            .zip(&info.sigma)
                            .map(|(v, t)| {
                                format!(
                                    "{}:={}",
                                    v.name,
                                    print_term(&me.store.resolve(t), &me.namer)
                                )
                            })
                            .collect();
                        me.trace.push(format!(
                            "GL sel={} goal={} clause={} sigma=[{}]",
                            info.side.name(),
                            cand.id,
                            info.clause + 1,
                            sig.join(",")
                        ));
                    }
                    me.premises(
                        psi,
                        &Rc::new(info),
                        rest.without(&head_tokens),
                        depth - 1,
                        &mut *k,
                    )
                });
                if found {
                    return true;
                }
                self.store.undo(mark);
                if self.aborted {
                    return false;
                }
            }
        }
        false
    }

    fn premises(
        &mut self,
        psi: &Psi,
        gl: &Rc<GlInfo>,
        pool: Pool,
        depth: u32,
        k: &mut K<'_>,
    ) -> bool {
        if self.eager {
            let tokens = pool.0.clone();
            let n = gl.inst.lp.len();
            if n == 0 && !tokens.is_empty() {
                return false;
            }
            let mut parts = vec![Pool::default(); n];
            self.split(psi, gl, &tokens, &mut parts, depth, k)
        } else {
            self.linear(psi, gl, 0, pool, false, Vec::new(), None, depth, k)
        }
    }

    fn split(
        &mut self,
        psi: &Psi,
        gl: &Rc<GlInfo>,
        tokens: &[Token],
        parts: &mut Vec<Pool>,
        depth: u32,
        k: &mut K<'_>,
    ) -> bool {
        match tokens.split_first() {
            None => {
                let parts = Rc::new(parts.clone());
                self.linear(
                    psi,
                    gl,
                    0,
                    Pool::default(),
                    false,
                    Vec::new(),
                    Some(parts),
                    depth,
                    k,
                )
            }
            Some((t, rest)) => {
                for i in 0..parts.len() {
                    parts[i].insert(*t);
                    if self.split(psi, gl, rest, parts, depth, k) {
                        return true;
                    }
                    parts[i] = parts[i].without(&[*t]);
                    if self.aborted {
                        return false;
                    }
                }
                false
            }
        }
    }

    /// Linear premises in order, each fed the leftovers of the previous
    /// one, or its own part when the split is fixed in advance.
    #[allow(clippy::too_many_arguments)]
    fn linear(
        &mut self,
        psi: &Psi,
        gl: &Rc<GlInfo>,
        i: usize,
        pool: Pool,
        slack: bool,
        done: Vec<Rc<Raw>>,
        parts: Option<Rc<Vec<Pool>>>,
        depth: u32,
        k: &mut K<'_>,
    ) -> bool {
        if i == gl.inst.lp.len() {
            return self.classical(psi, gl, 0, pool, slack, done, Vec::new(), depth, k);
        }
        let goal = Rc::new(gl.inst.lp[i].clone());
        let input = match &parts {
            Some(ps) => ps[i].clone(),
            None => pool,
        };
        self.solve_focus(psi, input, goal, depth, &mut |me, out, s, raw| {
            let out = match &parts {
                Some(_) if !s && !out.is_empty() => return false,
                Some(_) => Pool::default(),
                None => out,
            };
            let mut done = done.clone();
            done.push(raw);
            me.linear(
                psi,
                gl,
                i + 1,
                out,
                slack || s,
                done,
                parts.clone(),
                depth,
                &mut *k,
            )
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn classical(
        &mut self,
        psi: &Psi,
        gl: &Rc<GlInfo>,
        j: usize,
        out: Pool,
        slack: bool,
        linear: Vec<Rc<Raw>>,
        classical: Vec<Rc<Raw>>,
        depth: u32,
        k: &mut K<'_>,
    ) -> bool {
        if j == gl.inst.cp.len() {
            let raw = Raw::State {
                gl: gl.clone(),
                classical,
                linear,
            };
            return k(self, out, slack, Rc::new(raw));
        }
        let goal = Rc::new(gl.inst.cp[j].clone());
        self.solve_focus(psi, Pool::default(), goal, depth, &mut |me, _, _, raw| {
            let mut classical = classical.clone();
            classical.push(raw);
            me.classical(
                psi,
                gl,
                j + 1,
                out.clone(),
                slack,
                linear.clone(),
                classical,
                depth,
                &mut *k,
            )
        })
    }

    fn hard(&self, raw: &Raw, out: &mut BTreeSet<Token>) {
        match raw {
            Raw::Focus { branches, .. } => {
                for b in branches {
                    self.hard(&b.state, out);
                }
            }
            Raw::State {
                gl,
                classical,
                linear,
            } => {
                out.extend(gl.selected);
                out.extend(gl.head.iter().copied());
                for r in classical.iter().chain(linear) {
                    self.hard(r, out);
                }
            }
        }
    }

    fn contexts(&self, psi: &[Goal], avail: &[Token]) -> Contexts {
        let mut ctx = Contexts::classical(psi.iter().map(|g| self.store.resolve_goal(g)).collect());
        for t in avail {
            match &self.registry[t] {
                Res::Goal(g) => ctx.gamma.push(self.store.resolve_goal(g)),
                Res::Atom(a) => ctx.lambda.push(self.store.resolve_atom(a)),
            }
        }
        ctx
    }

    fn build_focus(&self, raw: &Raw, psi: &[Goal], avail: &[Token]) -> ProofNode {
        let Raw::Focus {
            goal,
            eigen,
            branches,
        } = raw
        else {
            unreachable!("focused skeleton")
        };
        let conclusion =
            GSequent::focused(self.contexts(psi, avail), self.store.resolve_goal(goal));
        let children = branches
            .iter()
            .map(|b| {
                let psi = [psi, &b.cp[..]].concat();
                let mut inner: Vec<Token> = avail.to_vec();
                inner.extend(&b.new);
                self.build_state(&b.state, &psi, &inner)
            })
            .collect();
        ProofNode::new(
            Rule::GoalRight {
                eigen: eigen.clone(),
            },
            conclusion,
            children,
        )
    }

    fn build_state(&self, raw: &Raw, psi: &[Goal], avail: &[Token]) -> ProofNode {
        let Raw::State {
            gl,
            classical,
            linear,
        } = raw
        else {
            unreachable!("state skeleton")
        };
        let conclusion = GSequent::state(self.contexts(psi, avail));
        let rest: Vec<Token> = avail
            .iter()
            .copied()
            .filter(|t| Some(*t) != gl.selected && !gl.head.contains(t))
            .collect();
        let mut parts: Vec<Vec<Token>> = linear
            .iter()
            .map(|r| {
                let mut h = BTreeSet::new();
                self.hard(r, &mut h);
                rest.iter().copied().filter(|t| h.contains(t)).collect()
            })
            .collect();
        let extras: Vec<Token> = rest
            .iter()
            .copied()
            .filter(|t| !parts.iter().any(|p| p.contains(t)))
            .collect();
        if !extras.is_empty() {
            let j = linear
                .iter()
                .position(|r| absorbs(r))
                .expect("leftovers need an absorbing premise");
            parts[j].extend(extras);
        }
        let mut children: Vec<ProofNode> = classical
            .iter()
            .map(|r| self.build_focus(r, psi, &[]))
            .collect();
        children.extend(
            linear
                .iter()
                .zip(&parts)
                .map(|(r, p)| self.build_focus(r, psi, p)),
        );
        let rule = Rule::GoalLeft {
            side: gl.side,
            goal: self.store.resolve_goal(&gl.goal),
            clause: gl.clause,
            sigma: gl.sigma.iter().map(|t| self.store.resolve(t)).collect(),
        };
        ProofNode::new(rule, conclusion, children)
    }
}

struct FocusCtx {
    psi: Psi,
    goal: Rc<Goal>,
    eigen: Vec<Var>,
    clauses: Vec<Clause>,
    pool: Pool,
}

/// Whether the subproof closes a branch with a goal without clauses and
/// so can take any leftover resources.
fn absorbs(raw: &Raw) -> bool {
    match raw {
        Raw::Focus { branches, .. } => branches.iter().all(|b| absorbs(&b.state)),
        Raw::State { linear, .. } => linear.iter().any(|r| absorbs(r)),
    }
}
