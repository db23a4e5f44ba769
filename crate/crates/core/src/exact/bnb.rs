//! Depth-first branch and bound for unweighted MAX 2-SAT.
//!
//! * The formula is split into connected components (variables linked by a
//!   clause); their optima add up.
//! * A seeded WalkSAT pass provides the initial upper bound.
//! * Each node applies the pure-literal and dominating-unit rules to a
//!   fixpoint, then bounds with violations-so-far plus the number of
//!   disjoint inconsistent subsets found by unit propagation on the residual
//!   formula. Two complementary unit clauses are the smallest such subset.
//! * Branching takes the unassigned variable with most residual
//!   occurrences (lowest index on ties), polarity with more occurrences
//!   first (TRUE on ties).
//!
//! Node order is fully deterministic, so `nodes_expanded` is reproducible.

use std::time::{Duration, Instant};

use rand::Rng as _;

use super::SolveResult;
use crate::formula::{Assignment, Formula};
use crate::seed;

const NONE: usize = usize::MAX;
const UNASSIGNED: i8 = -1;
const LOCAL_SEARCH_SEED: u64 = 0x00b0_0b5e_ed00;

#[derive(Debug, Clone, Default)]
pub struct BnbConfig {
    /// Wall-clock budget for the whole solve.
    pub budget: Option<Duration>,
    /// Cap on expanded nodes, a deterministic alternative to `budget`.
    pub node_limit: Option<u64>,
    /// Skip the WalkSAT warm start (the first leaf then sets the bound).
    pub no_local_search: bool,
}

/// Exact optimum, or best-so-far flagged `optimal: false` if `budget` ran out.
pub fn branch_and_bound(f: &Formula, budget: Option<Duration>) -> SolveResult {
    branch_and_bound_with(
        f,
        &BnbConfig {
            budget,
            ..BnbConfig::default()
        },
    )
}

pub fn branch_and_bound_with(f: &Formula, cfg: &BnbConfig) -> SolveResult {
    let start = Instant::now();
    let deadline = cfg.budget.map(|b| start + b);
    let mut assignment = Assignment::all_true(f.n_declared());
    let mut optimum = 0;
    let mut nodes = 0;
    let mut optimal = true;

    for comp in components(f) {
        let mut search = Search::new(comp.n_vars(), &comp.clauses);
        search.deadline = deadline;
        search.node_limit = cfg.node_limit.map(|l| l.saturating_sub(nodes));
        search.start_bound(!cfg.no_local_search);
        search.dfs();
        optimum += search.ub;
        nodes += search.nodes;
        optimal &= !search.aborted;
        for (local, &var) in comp.vars.iter().enumerate() {
            assignment.set(var, search.best[local]);
        }
    }

    SolveResult {
        optimum,
        assignment,
        nodes_expanded: nodes,
        elapsed: start.elapsed(),
        optimal,
    }
}

/// Violations fixed by `partial` plus the unit-propagation bound on the
/// residual formula. Never exceeds the best completion of `partial`.
pub fn node_lower_bound(f: &Formula, partial: &[Option<bool>]) -> usize {
    assert_eq!(partial.len(), f.n_declared());
    let clauses: Vec<[usize; 2]> = f.clauses().iter().map(|c| [c.first().code(), c.second().code()]).collect();
    let mut search = Search::new(f.n_declared(), &clauses);
    for (v, value) in partial.iter().enumerate() {
        if let Some(value) = value {
            search.assign(v, *value);
        }
    }
    search.scan();
    search.violated + search.up_lower_bound(usize::MAX)
}

struct Component {
    vars: Vec<usize>,
    /// Clauses as local literal codes.
    clauses: Vec<[usize; 2]>,
}

impl Component {
    fn n_vars(&self) -> usize {
        self.vars.len()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Connected components of the variable interaction graph, ordered by their
/// smallest variable.
fn components(f: &Formula) -> Vec<Component> {
    let n = f.n_declared();
    let mut parent: Vec<usize> = (0..n).collect();
    for c in f.clauses() {
        let (a, b) = (find(&mut parent, c.first().var()), find(&mut parent, c.second().var()));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let used = f.used_variables();
    let mut comp_of_root = vec![NONE; n];
    let mut local = vec![NONE; n];
    let mut comps: Vec<Component> = Vec::new();
    for v in 0..n {
        if !used[v] {
            continue;
        }
        let root = find(&mut parent, v);
        if comp_of_root[root] == NONE {
            comp_of_root[root] = comps.len();
            comps.push(Component {
                vars: Vec::new(),
                clauses: Vec::new(),
            });
        }
        let comp = &mut comps[comp_of_root[root]];
        local[v] = comp.vars.len();
        comp.vars.push(v);
    }
    for c in f.clauses() {
        let comp = &mut comps[comp_of_root[find(&mut parent, c.first().var())]];
        let code = |lit: crate::formula::Literal| 2 * local[lit.var()] + lit.is_negated() as usize;
        comp.clauses.push([code(c.first()), code(c.second())]);
    }
    comps
}

struct Search {
    n: usize,
    clauses: Vec<[usize; 2]>,
    /// Clause ids per literal code.
    occ: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<usize>,
    violated: usize,
    ub: usize,
    best: Vec<bool>,
    nodes: u64,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    aborted: bool,

    // residual of the last scan
    occ_count: Vec<u32>,
    unit_count: Vec<u32>,
    units: Vec<(usize, usize)>,
    binaries: Vec<usize>,

    // unit-propagation scratch, reset by bumping stamps
    clause_used: Vec<u32>,
    used_stamp: u32,
    temp_value: Vec<bool>,
    temp_stamp: Vec<u32>,
    round_stamp: u32,
    reason: Vec<usize>,
    queue: Vec<usize>,
}

impl Search {
    fn new(n: usize, clauses: &[[usize; 2]]) -> Self {
        let mut occ = vec![Vec::new(); 2 * n];
        for (k, c) in clauses.iter().enumerate() {
            occ[c[0]].push(k);
            occ[c[1]].push(k);
        }
        Search {
            n,
            clauses: clauses.to_vec(),
            occ,
            value: vec![UNASSIGNED; n],
            trail: Vec::with_capacity(n),
            violated: 0,
            ub: clauses.len(),
            best: vec![true; n],
            nodes: 0,
            deadline: None,
            node_limit: None,
            aborted: false,
            occ_count: vec![0; 2 * n],
            unit_count: vec![0; 2 * n],
            units: Vec::new(),
            binaries: Vec::new(),
            clause_used: vec![0; clauses.len()],
            used_stamp: 0,
            temp_value: vec![false; n],
            temp_stamp: vec![0; n],
            round_stamp: 0,
            reason: vec![NONE; n],
            queue: Vec::new(),
        }
    }

    /// 1 true, 0 false, -1 unassigned.
    #[inline]
    fn lit_state(&self, code: usize) -> i8 {
        let v = self.value[code >> 1];
        if v == UNASSIGNED {
            UNASSIGNED
        } else {
            // positive literal (even code) is true when the variable is TRUE (1)
            (v ^ (code & 1) as i8) & 1
        }
    }

    fn assign(&mut self, var: usize, value: bool) {
        debug_assert_eq!(self.value[var], UNASSIGNED);
        self.value[var] = value as i8;
        self.trail.push(var);
        let falsified = 2 * var + value as usize;
        for i in 0..self.occ[falsified].len() {
            let k = self.occ[falsified][i];
            let [a, b] = self.clauses[k];
            let other = if a == falsified { b } else { a };
            if self.lit_state(other) == 0 {
                self.violated += 1;
            }
        }
    }

    fn unassign_last(&mut self) {
        let var = self.trail.pop().expect("trail is not empty");
        let falsified = 2 * var + self.value[var] as usize;
        for i in 0..self.occ[falsified].len() {
            let k = self.occ[falsified][i];
            let [a, b] = self.clauses[k];
            let other = if a == falsified { b } else { a };
            if self.lit_state(other) == 0 {
                self.violated -= 1;
            }
        }
        self.value[var] = UNASSIGNED;
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            self.unassign_last();
        }
    }

    fn cost_of(&self, values: &[bool]) -> usize {
        let holds = |code: usize| values[code >> 1] != (code & 1 == 1);
        self.clauses.iter().filter(|&&[a, b]| !holds(a) && !holds(b)).count()
    }

    /// Sets the incumbent from all-TRUE, then improves it with WalkSAT.
    fn start_bound(&mut self, local_search: bool) {
        self.best = vec![true; self.n];
        self.ub = self.cost_of(&self.best);
        if local_search && self.ub > 0 {
            self.walksat();
        }
    }

    fn walksat(&mut self) {
        let mut rng = seed::rng(LOCAL_SEARCH_SEED);
        let mut values = self.best.clone();
        let holds = |values: &[bool], code: usize| values[code >> 1] != (code & 1 == 1);
        let mut true_count: Vec<u8> = self
            .clauses
            .iter()
            .map(|&[a, b]| holds(&values, a) as u8 + holds(&values, b) as u8)
            .collect();
        let mut unsat: Vec<usize> = (0..self.clauses.len()).filter(|&k| true_count[k] == 0).collect();
        let mut pos = vec![NONE; self.clauses.len()];
        for (i, &k) in unsat.iter().enumerate() {
            pos[k] = i;
        }
        let steps = 100 * self.n + 1000;
        for _ in 0..steps {
            if unsat.is_empty() {
                break;
            }
            let k = unsat[rng.random_range(0..unsat.len())];
            let breaks = |values: &[bool], true_count: &[u8], var: usize| {
                let lit = 2 * var + (!values[var]) as usize;
                self.occ[lit].iter().filter(|&&c| true_count[c] == 1).count()
            };
            let [a, b] = self.clauses[k];
            let (va, vb) = (a >> 1, b >> 1);
            let (ba, bb) = (breaks(&values, &true_count, va), breaks(&values, &true_count, vb));
            let var = if ba == 0 {
                va
            } else if bb == 0 {
                vb
            } else if rng.random_bool(0.5) {
                if rng.random_bool(0.5) {
                    va
                } else {
                    vb
                }
            } else if ba <= bb {
                va
            } else {
                vb
            };
            // flip var: its currently true literal becomes false and vice versa
            let was_true = 2 * var + (!values[var]) as usize;
            let now_true = was_true ^ 1;
            values[var] = !values[var];
            for &c in &self.occ[was_true] {
                true_count[c] -= 1;
                if true_count[c] == 0 {
                    pos[c] = unsat.len();
                    unsat.push(c);
                }
            }
            for &c in &self.occ[now_true] {
                if true_count[c] == 0 {
                    let i = pos[c];
                    let last = *unsat.last().expect("clause is listed");
                    unsat.swap_remove(i);
                    if last != c {
                        pos[last] = i;
                    }
                    pos[c] = NONE;
                }
                true_count[c] += 1;
            }
            if unsat.len() < self.ub {
                self.ub = unsat.len();
                self.best.copy_from_slice(&values);
            }
        }
    }

    fn out_of_budget(&mut self) -> bool {
        if let Some(limit) = self.node_limit {
            if self.nodes > limit {
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if self.nodes % 256 == 1 && Instant::now() >= deadline {
                return true;
            }
        }
        false
    }

    /// Recomputes residual units, binaries and literal counts.
    fn scan(&mut self) {
        self.occ_count.iter_mut().for_each(|c| *c = 0);
        self.unit_count.iter_mut().for_each(|c| *c = 0);
        self.units.clear();
        self.binaries.clear();
        for k in 0..self.clauses.len() {
            let [a, b] = self.clauses[k];
            let (sa, sb) = (self.lit_state(a), self.lit_state(b));
            if sa == 1 || sb == 1 || (sa == 0 && sb == 0) {
                continue;
            }
            if sa == UNASSIGNED && sb == UNASSIGNED {
                self.occ_count[a] += 1;
                self.occ_count[b] += 1;
                self.binaries.push(k);
            } else {
                let u = if sa == UNASSIGNED { a } else { b };
                self.occ_count[u] += 1;
                self.unit_count[u] += 1;
                self.units.push((u, k));
            }
        }
    }

    /// Pure-literal and dominating-unit fixes from the last scan. Each rule
    /// stays valid after the others fire, so they are applied as a batch.
    fn apply_fixes(&mut self) -> bool {
        let mut changed = false;
        for v in 0..self.n {
            if self.value[v] != UNASSIGNED {
                continue;
            }
            let (pos, neg) = (2 * v, 2 * v + 1);
            let (p, q) = (self.occ_count[pos], self.occ_count[neg]);
            if p == 0 && q == 0 {
                continue;
            }
            let fix = if q == 0 || self.unit_count[pos] >= q {
                Some(true)
            } else if p == 0 || self.unit_count[neg] >= p {
                Some(false)
            } else {
                None
            };
            if let Some(value) = fix {
                self.assign(v, value);
                changed = true;
            }
        }
        changed
    }

    /// Counts disjoint inconsistent subsets of the residual formula found by
    /// unit propagation, stopping once `limit` is reached.
    fn up_lower_bound(&mut self, limit: usize) -> usize {
        self.used_stamp = self.used_stamp.wrapping_add(1);
        if self.used_stamp == 0 {
            self.clause_used.iter_mut().for_each(|s| *s = 0);
            self.used_stamp = 1;
        }
        let mut lb = 0;
        while lb < limit {
            match self.propagate_round() {
                Some(conflict) => {
                    self.mark_conflict(conflict);
                    lb += 1;
                }
                None => break,
            }
        }
        lb
    }

    #[inline]
    fn temp_lit(&self, code: usize) -> i8 {
        let v = code >> 1;
        if self.temp_stamp[v] != self.round_stamp {
            UNASSIGNED
        } else {
            (self.temp_value[v] != (code & 1 == 1)) as i8
        }
    }

    fn set_temp(&mut self, code: usize, reason: usize) {
        let v = code >> 1;
        self.temp_stamp[v] = self.round_stamp;
        self.temp_value[v] = code & 1 == 0;
        self.reason[v] = reason;
        self.queue.push(code);
    }

    fn new_round(&mut self) {
        self.round_stamp = self.round_stamp.wrapping_add(1);
        if self.round_stamp == 0 {
            self.temp_stamp.iter_mut().for_each(|s| *s = 0);
            self.round_stamp = 1;
        }
        self.queue.clear();
    }

    /// One propagation pass over unused residual clauses; returns a clause
    /// falsified by the propagated literals, if any.
    fn propagate_round(&mut self) -> Option<usize> {
        self.new_round();
        for i in 0..self.units.len() {
            let (lit, k) = self.units[i];
            if self.clause_used[k] == self.used_stamp {
                continue;
            }
            match self.temp_lit(lit) {
                UNASSIGNED => self.set_temp(lit, k),
                0 => return Some(k),
                _ => {}
            }
        }
        let mut head = 0;
        while head < self.queue.len() {
            let lit = self.queue[head];
            head += 1;
            let falsified = lit ^ 1;
            for i in 0..self.occ[falsified].len() {
                let k = self.occ[falsified][i];
                if self.clause_used[k] == self.used_stamp {
                    continue;
                }
                let [a, b] = self.clauses[k];
                let other = if a == falsified { b } else { a };
                // residual binaries only; units were seeded above
                if self.lit_state(other) != UNASSIGNED {
                    continue;
                }
                match self.temp_lit(other) {
                    UNASSIGNED => self.set_temp(other, k),
                    0 => return Some(k),
                    _ => {}
                }
            }
        }
        None
    }

    /// Marks the conflict clause and every reason it depends on as used.
    fn mark_conflict(&mut self, conflict: usize) {
        let mut stack = vec![conflict];
        self.clause_used[conflict] = self.used_stamp;
        while let Some(k) = stack.pop() {
            for lit in self.clauses[k] {
                if self.lit_state(lit) != UNASSIGNED || self.temp_lit(lit) != 0 {
                    continue;
                }
                let r = self.reason[lit >> 1];
                if r != NONE && self.clause_used[r] != self.used_stamp {
                    self.clause_used[r] = self.used_stamp;
                    stack.push(r);
                }
            }
        }
    }

    fn dfs(&mut self) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.out_of_budget() {
            self.aborted = true;
            return;
        }
        if self.violated >= self.ub {
            return;
        }
        let mark = self.trail.len();
        loop {
            self.scan();
            if self.violated >= self.ub {
                self.undo_to(mark);
                return;
            }
            if !self.apply_fixes() {
                break;
            }
        }
        if self.units.is_empty() && self.binaries.is_empty() {
            if self.violated < self.ub {
                self.ub = self.violated;
                for v in 0..self.n {
                    self.best[v] = self.value[v] != 0;
                }
            }
            self.undo_to(mark);
            return;
        }
        let gap = self.ub - self.violated;
        let lb = self.up_lower_bound(gap);
        if lb >= gap {
            self.undo_to(mark);
            return;
        }

        let mut var = NONE;
        let mut best_occ = 0;
        for v in 0..self.n {
            if self.value[v] == UNASSIGNED {
                let occ = self.occ_count[2 * v] + self.occ_count[2 * v + 1];
                if occ > best_occ {
                    best_occ = occ;
                    var = v;
                }
            }
        }
        debug_assert!(var != NONE);
        let first = self.occ_count[2 * var] >= self.occ_count[2 * var + 1];
        for value in [first, !first] {
            self.assign(var, value);
            self.dfs();
            self.unassign_last();
            if self.aborted || self.violated + lb >= self.ub {
                break;
            }
        }
        self.undo_to(mark);
    }
}
