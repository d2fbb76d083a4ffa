//! Exact and heuristic optimizers: maximum-weight feasible gadget traces,
//! exhaustive `m(n)` for tiny ground sets, and the exhaustive cover sweep
//! over the step-10 graphs.
//!
//! The exact searches are branch-and-bound over slot in/out decisions,
//! branching on the highest-weight undecided slot, with the additive upper
//! bound `current + Σ undecided` and unit propagation on forbidden triples
//! with two chosen members. Parallel runs split the tree at a fixed depth
//! into independent subtree tasks and never share bounds mid-flight, so
//! results are identical for any worker count.

use crate::binomial::binom;
use crate::constructions::kleitman_family;
use crate::flow::min_weight_vertex_cover;
use crate::gadgets::{step10_graph, ConstraintSet, Gadget};
use crate::{ratio, Error, Family, Ratio, Result};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub budget_seconds: Option<u64>,
    pub seed: u64,
    pub thread_count: usize,
    pub witness_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { budget_seconds: None, seed: 0, thread_count: 1, witness_limit: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub optimum: Ratio,
    /// Best known upper bound when the run was cut short; `None` on proved
    /// runs (the optimum itself is exact).
    pub upper_bound: Option<Ratio>,
    /// Sorted chosen-slot id lists (set masks for `exact_mn`).
    pub witnesses: Vec<Vec<u64>>,
    /// Exact number of optimal assignments, where counted.
    pub optima_count: Option<u64>,
    pub nodes_explored: u64,
    pub proved: bool,
    pub seed: u64,
    pub elapsed_ms: u128,
}

/// Shared problem form: maximize Σ chosen weights subject to never choosing
/// all three slots of any triple.
struct Problem {
    weights: Vec<Ratio>,
    /// Slot ids in branching order: descending weight, id tie-break.
    order: Vec<usize>,
    triples: Vec<[usize; 3]>,
    slot_triples: Vec<Vec<usize>>,
}

impl Problem {
    fn new(weights: Vec<Ratio>, triples: Vec<[usize; 3]>) -> Self {
        let mut order: Vec<usize> = (0..weights.len()).collect();
        order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
        let mut slot_triples = vec![Vec::new(); weights.len()];
        for (ti, tr) in triples.iter().enumerate() {
            for &s in tr {
                slot_triples[s].push(ti);
            }
        }
        Problem { weights, order, triples, slot_triples }
    }

    fn total_weight(&self) -> Ratio {
        self.weights.iter().sum()
    }

    /// Deterministic greedy incumbent: walk the branching order, keep every
    /// slot that does not complete a triple.
    fn greedy_weight(&self) -> Ratio {
        let mut chosen = vec![false; self.weights.len()];
        let mut count = vec![0u8; self.triples.len()];
        let mut w = Ratio::zero();
        for &s in &self.order {
            if self.slot_triples[s].iter().any(|&t| count[t] == 2) {
                continue;
            }
            chosen[s] = true;
            w += &self.weights[s];
            for &t in &self.slot_triples[s] {
                count[t] += 1;
            }
        }
        w
    }
}

const UNDECIDED: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

struct Dfs<'p> {
    p: &'p Problem,
    state: Vec<u8>,
    tcount: Vec<u8>,
    current: Ratio,
    potential: Ratio,
    best: Ratio,
    witnesses: Vec<Vec<u64>>,
    witness_limit: usize,
    count_optima: bool,
    optima: u64,
    nodes: u64,
    deadline: Option<Instant>,
    budget_hit: bool,
    abandoned: Option<Ratio>,
    split_depth: usize,
    pattern: u64,
}

impl<'p> Dfs<'p> {
    fn new(p: &'p Problem, incumbent: Ratio, cfg: &SearchConfig, count_optima: bool) -> Self {
        Dfs {
            p,
            state: vec![UNDECIDED; p.weights.len()],
            tcount: vec![0; p.triples.len()],
            current: Ratio::zero(),
            potential: p.total_weight(),
            best: incumbent,
            witnesses: Vec::new(),
            witness_limit: cfg.witness_limit,
            count_optima,
            optima: 0,
            nodes: 0,
            deadline: cfg
                .budget_seconds
                .map(|s| Instant::now() + std::time::Duration::from_secs(s)),
            budget_hit: false,
            abandoned: None,
            split_depth: 0,
            pattern: 0,
        }
    }

    fn include(&mut self, s: usize, forced: &mut Vec<usize>) {
        self.state[s] = IN;
        self.current += &self.p.weights[s];
        for &t in &self.p.slot_triples[s] {
            self.tcount[t] += 1;
            if self.tcount[t] == 2 {
                for &o in &self.p.triples[t] {
                    if self.state[o] == UNDECIDED {
                        self.state[o] = OUT;
                        self.potential -= &self.p.weights[o];
                        forced.push(o);
                    }
                }
            }
        }
    }

    fn undo_include(&mut self, s: usize, forced: &[usize]) {
        for &o in forced.iter().rev() {
            self.state[o] = UNDECIDED;
            self.potential += &self.p.weights[o];
        }
        for &t in &self.p.slot_triples[s] {
            self.tcount[t] -= 1;
        }
        self.current -= &self.p.weights[s];
        self.state[s] = UNDECIDED;
    }

    fn leaf(&mut self) {
        debug_assert_eq!(self.current, self.potential);
        if self.current > self.best {
            self.best = self.current.clone();
            self.witnesses.clear();
            self.optima = 0;
        }
        if self.current == self.best {
            self.optima += 1;
            if self.witnesses.len() < self.witness_limit {
                let w: Vec<u64> = (0..self.state.len())
                    .filter(|&i| self.state[i] == IN)
                    .map(|i| i as u64)
                    .collect();
                self.witnesses.push(w);
            }
        }
    }

    fn run(&mut self, pos: usize) {
        self.nodes += 1;
        if self.budget_hit
            || (self.nodes % 1024 == 0
                && self.deadline.is_some_and(|d| Instant::now() > d))
        {
            self.budget_hit = true;
            if self.abandoned.as_ref().is_none_or(|a| self.potential > *a) {
                self.abandoned = Some(self.potential.clone());
            }
            return;
        }
        if self.potential < self.best {
            return;
        }
        if self.potential == self.best
            && !self.count_optima
            && self.witnesses.len() >= self.witness_limit
        {
            return;
        }
        let mut pos = pos;
        let s = loop {
            if pos == self.p.order.len() {
                self.leaf();
                return;
            }
            let s = self.p.order[pos];
            match self.state[s] {
                UNDECIDED => break s,
                st => {
                    // A slot decided by propagation must agree with the
                    // task's pattern; otherwise this leaf belongs to a
                    // sibling task.
                    if pos < self.split_depth
                        && (self.pattern >> pos) & 1 != u64::from(st == IN)
                    {
                        return;
                    }
                    pos += 1;
                }
            }
        };
        let want_in = pos >= self.split_depth || (self.pattern >> pos) & 1 == 1;
        let want_out = pos >= self.split_depth || (self.pattern >> pos) & 1 == 0;
        if want_in {
            let mut forced = Vec::new();
            self.include(s, &mut forced);
            self.run(pos + 1);
            self.undo_include(s, &forced);
        }
        if want_out {
            self.state[s] = OUT;
            self.potential -= &self.p.weights[s];
            self.run(pos + 1);
            self.potential += &self.p.weights[s];
            self.state[s] = UNDECIDED;
        }
    }
}

struct TaskOutcome {
    best: Ratio,
    witnesses: Vec<Vec<u64>>,
    optima: u64,
    nodes: u64,
    budget_hit: bool,
    abandoned: Option<Ratio>,
}

/// Runs the task decomposition (fixed split depth, independent subtrees,
/// results merged in task order) and assembles a `SearchResult`.
fn solve(
    p: &Problem,
    incumbent: Ratio,
    cfg: &SearchConfig,
    count_optima: bool,
    split_depth: usize,
) -> SearchResult {
    let start = Instant::now();
    let split_depth = split_depth.min(p.weights.len()).min(20);
    let tasks: u64 = 1 << split_depth;
    let workers = cfg.thread_count.max(1).min(tasks as usize);

    let run_task = |pattern: u64| -> TaskOutcome {
        let mut dfs = Dfs::new(p, incumbent.clone(), cfg, count_optima);
        dfs.split_depth = split_depth;
        dfs.pattern = pattern;
        dfs.run(0);
        TaskOutcome {
            best: dfs.best,
            witnesses: dfs.witnesses,
            optima: dfs.optima,
            nodes: dfs.nodes,
            budget_hit: dfs.budget_hit,
            abandoned: dfs.abandoned,
        }
    };

    let outcomes: Vec<(u64, TaskOutcome)> = if workers == 1 {
        (0..tasks).map(|t| (t, run_task(t))).collect()
    } else {
        let mut collected = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let run_task = &run_task;
                    scope.spawn(move || {
                        (w as u64..tasks)
                            .step_by(workers)
                            .map(|t| (t, run_task(t)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("search worker panicked"))
                .collect::<Vec<_>>()
        });
        collected.sort_by_key(|&(t, _)| t);
        collected
    };

    let mut best = incumbent;
    let mut witnesses: Vec<Vec<u64>> = Vec::new();
    let mut optima = 0u64;
    let mut nodes = 0u64;
    let mut budget_hit = false;
    let mut abandoned: Option<Ratio> = None;
    for (_, o) in outcomes {
        nodes += o.nodes;
        budget_hit |= o.budget_hit;
        if let Some(a) = o.abandoned {
            if abandoned.as_ref().is_none_or(|cur| a > *cur) {
                abandoned = Some(a);
            }
        }
        if o.best > best {
            best = o.best.clone();
            witnesses.clear();
            optima = 0;
        }
        if o.best == best {
            optima += o.optima;
            for w in o.witnesses {
                if witnesses.len() < cfg.witness_limit {
                    witnesses.push(w);
                }
            }
        }
    }
    let proved = !budget_hit;
    let upper_bound = if proved {
        None
    } else {
        let ub = match abandoned {
            Some(a) if a > best => a,
            _ => best.clone(),
        };
        Some(ub)
    };
    SearchResult {
        optimum: best,
        upper_bound,
        witnesses,
        optima_count: if proved && count_optima { Some(optima) } else { None },
        nodes_explored: nodes,
        proved,
        seed: cfg.seed,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn trace_problem(g: &Gadget, cs: &ConstraintSet) -> Problem {
    Problem::new(g.slots.iter().map(|s| s.weight.clone()).collect(), cs.triples.clone())
}

/// Maximum feasible trace weight by branch and bound. Proved completion is
/// guaranteed only at gadget scales with ≤ 64 slots; larger instances run
/// until the budget and report `proved = false`.
pub fn exact_max_trace(g: &Gadget, cs: &ConstraintSet, cfg: &SearchConfig) -> SearchResult {
    let p = trace_problem(g, cs);
    let incumbent = p.greedy_weight();
    solve(&p, incumbent, cfg, false, 10)
}

/// Independent oracle: plain enumeration of all 2^k slot assignments.
pub fn enumerate_max_trace(g: &Gadget, cs: &ConstraintSet) -> Result<SearchResult> {
    let k = g.slots.len();
    if k > 25 {
        return Err(Error::Precondition(format!("enumeration over {k} > 25 slots refused")));
    }
    let start = Instant::now();
    let weights: Vec<Ratio> = g.slots.iter().map(|s| s.weight.clone()).collect();
    let mut best = Ratio::zero();
    let mut witnesses: Vec<Vec<u64>> = Vec::new();
    for mask in 0u64..(1 << k) {
        if cs
            .triples
            .iter()
            .any(|tr| tr.iter().all(|&s| mask & (1 << s) != 0))
        {
            continue;
        }
        let w: Ratio = (0..k).filter(|&s| mask & (1 << s) != 0).map(|s| weights[s].clone()).sum();
        if w > best {
            best = w;
            witnesses = vec![(0..k as u64).filter(|&s| mask & (1 << s) != 0).collect()];
        }
    }
    Ok(SearchResult {
        optimum: best,
        upper_bound: None,
        witnesses,
        optima_count: None,
        nodes_explored: 1 << k,
        proved: true,
        seed: 0,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Seeded multi-restart local search with add/remove/swap moves and triple
/// repair. One restart is seeded with the symmetric band trace when the
/// ground set is small enough to enumerate; `proved` is always false.
pub fn heuristic_max_trace(
    g: &Gadget,
    cs: &ConstraintSet,
    iterations: u64,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    let start = Instant::now();
    let nslots = g.slots.len();
    let weights: Vec<Ratio> = g.slots.iter().map(|s| s.weight.clone()).collect();
    let mut slot_triples = vec![Vec::new(); nslots];
    for (ti, tr) in cs.triples.iter().enumerate() {
        for &s in tr {
            slot_triples[s].push(ti);
        }
    }

    // The symmetric band families seed restart 0 with a strong, feasible
    // starting trace.
    let band_seed: Option<Vec<bool>> = if g.n <= 24 {
        let k = kleitman_family(g.n)?;
        let fams: Vec<&Family> = std::iter::repeat_n(&k, g.family_count()).collect();
        Some(crate::gadgets::trace_of(g, &fams)?.chosen)
    } else {
        None
    };

    const RESTARTS: u64 = 8;
    let per_restart = iterations / RESTARTS;
    let mut best = Ratio::zero();
    let mut best_chosen: Vec<bool> = vec![false; nslots];

    for restart in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(restart);
        let mut chosen = match (&band_seed, restart) {
            (Some(seed), 0) => seed.clone(),
            _ => vec![false; nslots],
        };
        let mut tcount = vec![0u8; cs.triples.len()];
        let mut current = Ratio::zero();
        for (s, &ch) in chosen.iter().enumerate() {
            if ch {
                current += &weights[s];
                for &t in &slot_triples[s] {
                    tcount[t] += 1;
                }
            }
        }
        debug_assert!(tcount.iter().all(|&c| c < 3), "seed trace must be feasible");
        if current > best {
            best = current.clone();
            best_chosen = chosen.clone();
        }

        let add = |s: usize,
                       chosen: &mut Vec<bool>,
                       tcount: &mut Vec<u8>,
                       current: &mut Ratio,
                       rng: &mut ChaCha8Rng| {
            if chosen[s] {
                return;
            }
            chosen[s] = true;
            *current += &weights[s];
            for &t in &slot_triples[s] {
                tcount[t] += 1;
            }
            // Repair: only triples through `s` can have become violated,
            // and removals never create new violations.
            for ti in 0..slot_triples[s].len() {
                let t = slot_triples[s][ti];
                if tcount[t] < 3 {
                    continue;
                }
                let others: Vec<usize> =
                    cs.triples[t].iter().copied().filter(|&o| o != s).collect();
                let victim = others[rng.gen_range(0..others.len())];
                chosen[victim] = false;
                *current -= &weights[victim];
                for &t2 in &slot_triples[victim] {
                    tcount[t2] -= 1;
                }
            }
        };

        for _ in 0..per_restart {
            match rng.gen_range(0..3u32) {
                0 => {
                    let s = rng.gen_range(0..nslots);
                    add(s, &mut chosen, &mut tcount, &mut current, &mut rng);
                }
                1 => {
                    let s = rng.gen_range(0..nslots);
                    if chosen[s] {
                        chosen[s] = false;
                        current -= &weights[s];
                        for &t in &slot_triples[s] {
                            tcount[t] -= 1;
                        }
                    }
                }
                _ => {
                    let out = rng.gen_range(0..nslots);
                    if chosen[out] {
                        chosen[out] = false;
                        current -= &weights[out];
                        for &t in &slot_triples[out] {
                            tcount[t] -= 1;
                        }
                    }
                    let s = rng.gen_range(0..nslots);
                    add(s, &mut chosen, &mut tcount, &mut current, &mut rng);
                }
            }
            if current > best {
                best = current.clone();
                best_chosen = chosen.clone();
            }
        }
    }

    let witness: Vec<u64> = best_chosen
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(i, _)| i as u64)
        .collect();
    Ok(SearchResult {
        optimum: best,
        upper_bound: None,
        witnesses: vec![witness],
        optima_count: None,
        nodes_explored: iterations,
        proved: false,
        seed: cfg.seed,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Exhaustive maximum size of a partition-free family over `[n]` (literal
/// quantifier semantics: the empty set alone already violates), by branch
/// and bound over all 2^n − 1 nonempty sets. Also counts the optimal
/// families exactly.
pub fn exact_mn(n: u32, cfg: &SearchConfig) -> Result<SearchResult> {
    if !(2..=9).contains(&n) {
        return Err(Error::Precondition(format!("exact_mn supports 2 ≤ n ≤ 9, got {n}")));
    }
    // The empty set is excluded up front: ∅ = ∅ ⊔ ∅ violates on its own.
    let full: u64 = (1 << n) - 1;
    let masks: Vec<u64> = (1..=full).collect();
    let mut triples = Vec::new();
    for a in 1..=full {
        for b in a + 1..=full {
            if a & b == 0 {
                let u = a | b;
                triples.push([a as usize - 1, b as usize - 1, u as usize - 1]);
            }
        }
    }
    let p = Problem::new(vec![ratio(1, 1); masks.len()], triples);
    let incumbent = Ratio::from_integer(kleitman_family(n)?.len().into());
    let mut res = solve(&p, incumbent, cfg, true, 0);
    for w in &mut res.witnesses {
        for id in w.iter_mut() {
            *id += 1; // slot id → set mask
        }
    }
    Ok(res)
}

/// One line of the exhaustive cover sweep.
#[derive(Clone, Debug)]
pub struct LembpReport {
    pub m: i64,
    pub checked: u64,
    pub all_pass: bool,
    pub min_slack: Ratio,
    pub min_slack_a: Vec<u32>,
    pub failures: Vec<Vec<u32>>,
}

/// Sweeps every valid charge set `A` (at most one position per orbit
/// `{x, x+m, x+2m}`, nonempty — 4^m − 1 candidates), builds the step-10
/// graph and checks min-cover weight ≥ a·C(3m, m).
pub fn lembp_exhaustive(m: i64) -> Result<LembpReport> {
    if !(2..=8).contains(&m) {
        return Err(Error::Precondition(format!("lembp sweep supports 2 ≤ m ≤ 8, got {m}")));
    }
    let n = (3 * m) as u32;
    let target_per_a = Ratio::from_integer(binom(n, m));
    let mut checked = 0u64;
    let mut min_slack: Option<Ratio> = None;
    let mut min_slack_a = Vec::new();
    let mut failures = Vec::new();
    let total: u64 = 4u64.pow(m as u32);
    for code in 1..total {
        let mut a = Vec::new();
        let mut c = code;
        for x in 1..=m as u32 {
            match c % 4 {
                1 => a.push(x),
                2 => a.push(x + m as u32),
                3 => a.push(x + 2 * m as u32),
                _ => {}
            }
            c /= 4;
        }
        if a.is_empty() {
            continue;
        }
        let graph = step10_graph(m, &a)?;
        let (w, _) = min_weight_vertex_cover(&graph.graph)?;
        let slack = w - target_per_a.clone() * ratio(a.len() as i64, 1);
        if slack < Ratio::zero() {
            failures.push(a.clone());
        }
        if min_slack.as_ref().is_none_or(|s| slack < *s) {
            min_slack = Some(slack);
            min_slack_a = a;
        }
        checked += 1;
    }
    Ok(LembpReport {
        m,
        checked,
        all_pass: failures.is_empty(),
        min_slack: min_slack.unwrap(),
        min_slack_a,
        failures,
    })
}
