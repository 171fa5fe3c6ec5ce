//! Exhaustive backtracking search for certificates `(T0, T1)` over a given
//! abelian group of order `n^2+n+1`.
//!
//! `|H|` is odd, so every non-identity element has a distinct inverse and an
//! inverse-closed set is `{e}` or nothing plus a union of pairs `{g, g^-1}`.
//! The search picks pairs in rank order, completing `T0` before `T1`, and
//! keeps running coefficient tables of `T0 T1`, `T0^2`, `T1^2`, `T0^(2)`,
//! `T1^(2)` and `T0^(3)` so that each violated necessary condition is seen
//! as soon as the pair that causes it is placed. All the conditions are
//! monotone in the sets, so it suffices to check the positions a new pair
//! touches.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{enumerate_abelian_groups, gcd, FiniteAbelianGroup};
use crate::certificate::{verify_certificate, Certificate};

pub const DEFAULT_WORK_BUDGET: u64 = 1_000_000_000;

/// Smallest `n` for which an explicit budget is required.
pub const EXPLICIT_BUDGET_FROM: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("n = {0} needs an explicit work budget")]
    BudgetRequired(u64),
    #[error("work budget must be positive")]
    ZeroBudget,
    #[error("group of order {order} does not match n = {n}")]
    OrderMismatch { order: u64, n: u64 },
    #[error("n must be positive")]
    ZeroDimension,
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub n: u64,
    /// Maximum number of search nodes; `None` means the default, which is
    /// only allowed for `n < 8`.
    pub work_budget: Option<u64>,
    pub dedupe_by_automorphism: bool,
    /// Worker count; `None` uses the global pool.
    pub parallel_width: Option<usize>,
    /// Disables every cut except the final verification.
    pub pruning: bool,
}

impl SearchConfig {
    pub fn new(n: u64) -> Self {
        Self {
            n,
            work_budget: None,
            dedupe_by_automorphism: false,
            parallel_width: None,
            pruning: true,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.work_budget = Some(budget);
        self
    }

    pub fn budget(&self) -> Result<u64, SearchError> {
        match self.work_budget {
            Some(0) => Err(SearchError::ZeroBudget),
            Some(b) => Ok(b),
            None if self.n >= EXPLICIT_BUDGET_FROM => Err(SearchError::BudgetRequired(self.n)),
            None => Ok(DEFAULT_WORK_BUDGET),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub group: FiniteAbelianGroup,
    #[serde(skip)]
    pub certificates: Vec<Certificate>,
    /// The whole space was covered; only then is an empty result a proof of
    /// absence.
    pub exhausted: bool,
    pub nodes_visited: u64,
}

struct Engine<'a> {
    group: &'a Arc<FiniteAbelianGroup>,
    n: u64,
    pairs: &'a [(usize, usize)],
    pair_of: &'a [usize],
    double: &'a [usize],
    triple: &'a [usize],
    pruning: bool,

    in_t0: Vec<bool>,
    in_t1: Vec<bool>,
    t0: Vec<usize>,
    t1: Vec<usize>,
    prod: Vec<u32>,
    sq0: Vec<u32>,
    sq1: Vec<u32>,
    p2_0: Vec<u32>,
    p2_1: Vec<u32>,
    c3_0: Vec<u32>,

    nodes: u64,
    limit: u64,
    aborted: bool,
    found: Vec<Certificate>,
}

impl<'a> Engine<'a> {
    fn new(tables: &'a Tables, n: u64, pruning: bool, limit: u64) -> Self {
        let len = tables.group.len();
        let mut e = Self {
            group: &tables.group,
            n,
            pairs: &tables.pairs,
            pair_of: &tables.pair_of,
            double: &tables.double,
            triple: &tables.triple,
            pruning,
            in_t0: vec![false; len],
            in_t1: vec![false; len],
            t0: Vec::new(),
            t1: Vec::new(),
            prod: vec![0; len],
            sq0: vec![0; len],
            sq1: vec![0; len],
            p2_0: vec![0; len],
            p2_1: vec![0; len],
            c3_0: vec![0; len],
            nodes: 0,
            limit,
            aborted: false,
            found: Vec::new(),
        };
        e.add_t0(0);
        e
    }

    /// Off the identity, `T0^2 + T1^2 + T0^(2) + T1^(2)` must equal `2H`, and
    /// `T0^2`, `T1^2` share no element.
    fn square_ok(&self, x: usize) -> bool {
        x == 0
            || (self.sq0[x] + self.sq1[x] + self.p2_0[x] + self.p2_1[x] <= 2
                && (self.sq0[x] == 0 || self.sq1[x] == 0))
    }

    fn add_t0(&mut self, a: usize) -> bool {
        let g = self.group;
        let mut ok = true;
        self.in_t0[a] = true;
        for i in 0..self.t0.len() {
            let x = g.add_ranks(a, self.t0[i]);
            self.sq0[x] += 2;
            ok &= self.square_ok(x);
        }
        let d = self.double[a];
        self.sq0[d] += 1;
        self.p2_0[d] += 1;
        ok &= self.square_ok(d) && self.p2_1[d] == 0 && (d == 0 || !self.in_t0[d]);
        ok &= a == 0 || (self.p2_0[a] == 0 && self.p2_1[a] == 0);
        let c = self.triple[a];
        self.c3_0[c] += 1;
        ok &= (c == 0 || !self.in_t0[c]) && (a == 0 || self.c3_0[a] == 0);
        for i in 0..self.t1.len() {
            let x = g.add_ranks(a, self.t1[i]);
            self.prod[x] += 1;
            ok &= self.prod[x] <= 1;
        }
        self.t0.push(a);
        ok
    }

    fn remove_t0(&mut self) {
        let g = self.group;
        let a = self.t0.pop().unwrap();
        for i in 0..self.t1.len() {
            self.prod[g.add_ranks(a, self.t1[i])] -= 1;
        }
        self.c3_0[self.triple[a]] -= 1;
        let d = self.double[a];
        self.sq0[d] -= 1;
        self.p2_0[d] -= 1;
        for i in 0..self.t0.len() {
            self.sq0[g.add_ranks(a, self.t0[i])] -= 2;
        }
        self.in_t0[a] = false;
    }

    fn add_t1(&mut self, b: usize) -> bool {
        let g = self.group;
        let mut ok = true;
        self.in_t1[b] = true;
        for i in 0..self.t1.len() {
            let x = g.add_ranks(b, self.t1[i]);
            self.sq1[x] += 2;
            ok &= self.square_ok(x);
        }
        let d = self.double[b];
        self.sq1[d] += 1;
        self.p2_1[d] += 1;
        ok &= self.square_ok(d) && self.p2_0[d] == 0 && !self.in_t0[d];
        for i in 0..self.t0.len() {
            let x = g.add_ranks(b, self.t0[i]);
            self.prod[x] += 1;
            ok &= self.prod[x] <= 1;
        }
        self.t1.push(b);
        ok
    }

    fn remove_t1(&mut self) {
        let g = self.group;
        let b = self.t1.pop().unwrap();
        for i in 0..self.t0.len() {
            self.prod[g.add_ranks(b, self.t0[i])] -= 1;
        }
        let d = self.double[b];
        self.sq1[d] -= 1;
        self.p2_1[d] -= 1;
        for i in 0..self.t1.len() {
            self.sq1[g.add_ranks(b, self.t1[i])] -= 2;
        }
        self.in_t1[b] = false;
    }

    fn add_pair_t0(&mut self, i: usize) -> bool {
        let (a, b) = self.pairs[i];
        let ok = self.add_t0(a);
        self.add_t0(b) && ok
    }

    fn remove_pair_t0(&mut self) {
        self.remove_t0();
        self.remove_t0();
    }

    fn add_pair_t1(&mut self, i: usize) -> bool {
        let (a, b) = self.pairs[i];
        let ok = self.add_t1(a);
        self.add_t1(b) && ok
    }

    fn remove_pair_t1(&mut self) {
        self.remove_t1();
        self.remove_t1();
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
        }
        !self.aborted
    }

    fn dfs_t0(&mut self, next: usize, remaining: usize, t1_pairs: usize) {
        if !self.tick() {
            return;
        }
        if remaining == 0 {
            self.dfs_t1(0, t1_pairs);
            return;
        }
        for i in next..=self.pairs.len() - remaining {
            let ok = self.add_pair_t0(i);
            if ok || !self.pruning {
                self.dfs_t0(i + 1, remaining - 1, t1_pairs);
            }
            self.remove_pair_t0();
            if self.aborted {
                return;
            }
        }
    }

    /// The lowest element not yet covered by `T0 T1` must be reachable by a
    /// pair not yet considered.
    fn coverable(&self, next: usize) -> bool {
        let g = self.group;
        let Some(x) = (1..self.prod.len()).find(|&x| self.prod[x] == 0) else {
            return false;
        };
        self.t0.iter().any(|&t| {
            let b = g.sub_ranks(x, t);
            !self.in_t0[b] && self.pair_of[b] >= next
        })
    }

    fn dfs_t1(&mut self, next: usize, remaining: usize) {
        if !self.tick() {
            return;
        }
        if remaining == 0 {
            self.leaf();
            return;
        }
        if self.pruning && !self.coverable(next) {
            return;
        }
        for i in next..self.pairs.len() {
            if self.in_t0[self.pairs[i].0] {
                continue;
            }
            let ok = self.add_pair_t1(i);
            if ok || !self.pruning {
                self.dfs_t1(i + 1, remaining - 1);
            }
            self.remove_pair_t1();
            if self.aborted {
                return;
            }
        }
    }

    fn leaf(&mut self) {
        let c = Certificate::from_ranks(Arc::clone(self.group), self.n, self.t0.clone(), self.t1.clone())
            .expect("search sets are distinct");
        if verify_certificate(&c).passed() {
            self.found.push(c);
        }
    }
}

/// Per-group lookup tables shared by all workers.
struct Tables {
    group: Arc<FiniteAbelianGroup>,
    pairs: Vec<(usize, usize)>,
    pair_of: Vec<usize>,
    double: Vec<usize>,
    triple: Vec<usize>,
}

impl Tables {
    fn new(group: Arc<FiniteAbelianGroup>) -> Self {
        let len = group.len();
        let mut pairs = Vec::new();
        let mut pair_of = vec![usize::MAX; len];
        for r in 1..len {
            let s = group.neg_rank(r);
            if r < s {
                pair_of[r] = pairs.len();
                pair_of[s] = pairs.len();
                pairs.push((r, s));
            }
        }
        let double = (0..len).map(|r| group.pow_rank(r, 2)).collect();
        let triple = (0..len).map(|r| group.pow_rank(r, 3)).collect();
        Self {
            group,
            pairs,
            pair_of,
            double,
            triple,
        }
    }
}

/// Number of inverse pairs in `T0` and in `T1`.
fn pair_counts(n: u64) -> (usize, usize) {
    let n = n as usize;
    if n % 2 == 1 {
        ((n - 1) / 2, (n + 1) / 2)
    } else {
        (n / 2, n / 2)
    }
}

struct RootResult {
    found: Vec<Certificate>,
    nodes: u64,
}

fn run_root(tables: &Tables, n: u64, pruning: bool, limit: u64, root: usize) -> RootResult {
    let (p0, p1) = pair_counts(n);
    let mut e = Engine::new(tables, n, pruning, limit);
    if p0 > 0 {
        let ok = e.add_pair_t0(root);
        if ok || !pruning {
            e.dfs_t0(root + 1, p0 - 1, p1);
        }
    } else {
        let ok = e.add_pair_t1(root);
        if ok || !pruning {
            e.dfs_t1(root + 1, p1 - 1);
        }
    }
    RootResult {
        found: e.found,
        nodes: e.nodes.min(limit),
    }
}

/// All certificates `(T0, T1)` in `group` with `e in T0`, found by
/// exhaustive search up to the work budget.
pub fn enumerate_certificates(
    group: &FiniteAbelianGroup,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let n = cfg.n;
    if n == 0 {
        return Err(SearchError::ZeroDimension);
    }
    let budget = cfg.budget()?;
    if group.order() != n * n + n + 1 {
        return Err(SearchError::OrderMismatch { order: group.order(), n });
    }
    let tables = Tables::new(Arc::new(group.clone()));
    let (p0, p1) = pair_counts(n);
    let first = if p0 > 0 { p0 } else { p1 };
    let roots: Vec<usize> = (0..=tables.pairs.len().saturating_sub(first)).collect();
    // Roots run in waves of one per worker. Each wave gets what is left of
    // the budget plus one node, which is enough to locate the cut: a root can
    // only be truncated if the cumulative count passes the budget at or
    // before it, so the result does not depend on the wave width.
    let run = || -> (Vec<Certificate>, u64, bool) {
        let width = rayon::current_num_threads().max(1);
        let mut certificates = Vec::new();
        let mut nodes = 0u64;
        for wave in roots.chunks(width) {
            let limit = (budget - nodes).saturating_add(1);
            let results: Vec<RootResult> = wave
                .par_iter()
                .map(|&r| run_root(&tables, n, cfg.pruning, limit, r))
                .collect();
            for r in results {
                nodes += r.nodes;
                if nodes > budget {
                    return (certificates, budget, false);
                }
                certificates.extend(r.found);
            }
        }
        (certificates, nodes, true)
    };
    let (mut certificates, nodes, exhausted) = match cfg.parallel_width {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| SearchError::Pool(e.to_string()))?
            .install(run),
        None => run(),
    };
    if cfg.dedupe_by_automorphism {
        certificates = dedupe(certificates);
    }
    Ok(SearchOutcome {
        group: group.clone(),
        certificates,
        exhausted,
        nodes_visited: nodes,
    })
}

/// Lexicographically least image of `(T0, T1)` under the power maps
/// `g -> g^t`, `gcd(t, |H|) = 1`.
pub fn canonical_form(c: &Certificate) -> (Vec<usize>, Vec<usize>) {
    let g = c.group();
    let order = g.order();
    (1..order.max(2))
        .filter(|&t| gcd(t, order) == 1)
        .map(|t| {
            let image = |set: &[usize]| {
                let mut v: Vec<usize> = set.iter().map(|&r| g.pow_rank(r, t as i64)).collect();
                v.sort_unstable();
                v
            };
            (image(c.t0_ranks()), image(c.t1_ranks()))
        })
        .min()
        .expect("t = 1 is always admissible")
}

/// Keeps the first certificate of each orbit under power automorphisms.
pub fn dedupe(certificates: Vec<Certificate>) -> Vec<Certificate> {
    let mut seen = std::collections::HashSet::new();
    certificates
        .into_iter()
        .filter(|c| seen.insert(canonical_form(c)))
        .collect()
}

/// Runs [`enumerate_certificates`] on every abelian group of order
/// `n^2+n+1`, in invariant-factor enumeration order.
pub fn search_dimension(cfg: &SearchConfig) -> Result<Vec<SearchOutcome>, SearchError> {
    if cfg.n == 0 {
        return Err(SearchError::ZeroDimension);
    }
    cfg.budget()?;
    let n = cfg.n;
    enumerate_abelian_groups(n * n + n + 1)
        .iter()
        .map(|g| enumerate_certificates(g, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: u64) -> SearchOutcome {
        let order = n * n + n + 1;
        enumerate_certificates(&FiniteAbelianGroup::cyclic(order), &SearchConfig::new(n)).unwrap()
    }

    #[test]
    fn n1_finds_the_unique_certificate() {
        let out = run(1);
        assert!(out.exhausted);
        assert_eq!(out.certificates.len(), 1);
        assert_eq!(out.certificates[0].to_string(), "group: 3\nn: 1\nT0: 0\nT1: 1;2\n");
    }

    #[test]
    fn n2_finds_the_example_up_to_automorphism() {
        let out = run(2);
        assert!(out.exhausted);
        assert!(!out.certificates.is_empty());
        let example: Certificate = "group: 7\nn: 2\nT0: 0;1;6\nT1: 2;5\n".parse().unwrap();
        let target = canonical_form(&example);
        assert!(out.certificates.iter().any(|c| canonical_form(c) == target));
        for c in &out.certificates {
            assert_eq!((c.k0(), c.k1()), (3, 2));
        }
    }

    #[test]
    fn n3_and_n4_have_none() {
        for n in [3, 4] {
            let out = run(n);
            assert!(out.exhausted, "n={n}");
            assert!(out.certificates.is_empty(), "n={n}");
        }
    }

    #[test]
    fn pruning_preserves_results() {
        for n in 1..=4 {
            let order = n * n + n + 1;
            let g = FiniteAbelianGroup::cyclic(order);
            let pruned = enumerate_certificates(&g, &SearchConfig::new(n)).unwrap();
            let mut cfg = SearchConfig::new(n);
            cfg.pruning = false;
            let full = enumerate_certificates(&g, &cfg).unwrap();
            assert_eq!(pruned.certificates, full.certificates, "n={n}");
            assert!(pruned.nodes_visited <= full.nodes_visited);
        }
    }

    #[test]
    fn budget_cut_is_deterministic() {
        let g = FiniteAbelianGroup::cyclic(31);
        let full = enumerate_certificates(&g, &SearchConfig::new(5)).unwrap();
        assert!(full.exhausted);
        let budget = full.nodes_visited / 2;
        let mut outcomes = Vec::new();
        for jobs in [1, 2, 4] {
            let mut cfg = SearchConfig::new(5).with_budget(budget);
            cfg.parallel_width = Some(jobs);
            outcomes.push(enumerate_certificates(&g, &cfg).unwrap());
        }
        assert!(outcomes.iter().all(|o| !o.exhausted && o.nodes_visited == budget));
        assert!(outcomes.windows(2).all(|w| w[0] == w[1]));
        let exact = enumerate_certificates(&g, &SearchConfig::new(5).with_budget(full.nodes_visited)).unwrap();
        assert!(exact.exhausted);
    }

    #[test]
    fn config_validation() {
        assert_eq!(SearchConfig::new(8).budget(), Err(SearchError::BudgetRequired(8)));
        assert_eq!(SearchConfig::new(8).with_budget(5).budget(), Ok(5));
        assert_eq!(SearchConfig::new(3).with_budget(0).budget(), Err(SearchError::ZeroBudget));
        assert_eq!(SearchConfig::new(3).budget(), Ok(DEFAULT_WORK_BUDGET));
        let g = FiniteAbelianGroup::cyclic(7);
        assert_eq!(
            enumerate_certificates(&g, &SearchConfig::new(3)),
            Err(SearchError::OrderMismatch { order: 7, n: 3 })
        );
    }

    #[test]
    fn dedupe_keeps_one_per_orbit() {
        let out = run(2);
        let deduped = dedupe(out.certificates.clone());
        assert_eq!(deduped.len(), 1);
        assert_eq!(deduped[0], out.certificates[0]);
    }
}
