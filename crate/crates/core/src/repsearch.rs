//! Bounded search for faithful, operation-preserving representations.
//!
//! The state is one pair of bitmasks per element (`known true` / `known
//! false` over the k² base pairs), so a base of up to 8 points fits in a
//! `u64` per element. Branching is binary on membership literals, except
//! for composition witnesses, which branch k-way over the candidate
//! witness points, smallest first. Every deduction rule is sound (it only
//! asserts forced facts), a full leaf is checked exactly with
//! [`Representation::verify`], and a found representation is re-verified
//! before it is returned; "not found up to k" is therefore exhaustive for
//! the bound.
//!
//! Symmetry breaking restricts witness candidates to the points already
//! touched by the current assignment plus the least untouched one; any
//! solution can be relabelled to one the restricted search reaches.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::relations::{Complementation, Relation};
use crate::representation::{Representation, VerifyOptions};
use crate::signature::{SigSymbol, Signature};

/// Hard cap on the searchable base size (k² pair bits must fit in a u64).
pub const MAX_SEARCH_BASE: usize = 8;

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Base sizes 1..=max_base are tried in order.
    pub max_base: usize,
    pub semantics: Complementation,
    /// Demand `h(⊤)` be an equivalence relation on its field.
    pub require_top_equiv: bool,
    /// Total budget of branch decisions across all base sizes.
    pub node_limit: u64,
    pub symmetry_breaking: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_base: 4,
            semantics: Complementation::Universal,
            require_top_equiv: false,
            node_limit: 5_000_000,
            symmetry_breaking: true,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SearchStatus {
    Found(Representation),
    NotFoundUpTo(usize),
    ResourceExhausted { nodes: u64 },
}

#[derive(Debug, Clone)]
pub struct SearchStats {
    /// Branch decisions taken; deterministic for fixed input and config.
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&Representation> {
        match &self.status {
            SearchStatus::Found(rep) => Some(rep),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("config: max_base and node_limit must be at least 1")]
    BadConfig,
    #[error("config: max_base {0} exceeds the search cap of {MAX_SEARCH_BASE}")]
    BaseTooLarge(usize),
    #[error("algebra does not carry the tables for `{0}`")]
    MissingTable(SigSymbol),
    #[error("algebra fails validation for the signature ({count} violations, first: {first})")]
    InvalidAlgebra { count: usize, first: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle caps exceeded: n ≤ 4 and base ≤ 2, got n={n}, base={base}")]
    CapExceeded { n: usize, base: usize },
}

/// Searches base sizes `1..=cfg.max_base` for a faithful representation
/// respecting `sig`; validates the algebra first.
pub fn search_representation(
    alg: &FiniteAlgebra,
    sig: &Signature,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    if cfg.max_base == 0 || cfg.node_limit == 0 {
        return Err(SearchError::BadConfig);
    }
    if cfg.max_base > MAX_SEARCH_BASE {
        return Err(SearchError::BaseTooLarge(cfg.max_base));
    }
    let violations = alg.validate(sig).map_err(|e| match e {
        crate::algebra::AlgebraError::MissingTable(sym) => SearchError::MissingTable(sym),
        other => SearchError::InvalidAlgebra {
            count: 1,
            first: other.to_string(),
        },
    })?;
    if !violations.is_empty() {
        return Err(SearchError::InvalidAlgebra {
            count: violations.len(),
            first: violations[0].to_string(),
        });
    }

    let start = Instant::now();
    let mut nodes: u64 = 0;
    for k in 1..=cfg.max_base {
        let mut solver = Solver::new(alg, sig, cfg, k, cfg.node_limit, nodes);
        match solver.run() {
            SolveResult::Found(rep) => {
                nodes = solver.nodes;
                let report = rep.verify(&VerifyOptions {
                    require_top_equiv: cfg.require_top_equiv,
                    ..VerifyOptions::default()
                });
                assert!(
                    report.passed(),
                    "solver returned an unverifiable representation: {:?}",
                    report.failures
                );
                return Ok(SearchOutcome {
                    status: SearchStatus::Found(rep),
                    stats: SearchStats {
                        nodes,
                        elapsed: start.elapsed(),
                    },
                });
            }
            SolveResult::Unsat => {
                nodes = solver.nodes;
            }
            SolveResult::OutOfBudget => {
                nodes = solver.nodes;
                return Ok(SearchOutcome {
                    status: SearchStatus::ResourceExhausted { nodes },
                    stats: SearchStats {
                        nodes,
                        elapsed: start.elapsed(),
                    },
                });
            }
        }
    }
    Ok(SearchOutcome {
        status: SearchStatus::NotFoundUpTo(cfg.max_base),
        stats: SearchStats {
            nodes,
            elapsed: start.elapsed(),
        },
    })
}

/// Enumerates every map from elements to relations over `base_size`
/// points and keeps those that verify; the independent completeness
/// oracle for tiny instances.
pub fn exhaustive_oracle(
    alg: &FiniteAlgebra,
    sig: &Signature,
    base_size: usize,
    semantics: Complementation,
    require_top_equiv: bool,
) -> Result<Vec<Representation>, OracleError> {
    let n = alg.n();
    if n > 4 || base_size > 2 || base_size == 0 {
        return Err(OracleError::CapExceeded { n, base: base_size });
    }
    let relations_per_element = 1u64 << (base_size * base_size);
    let universe: Vec<Relation> = (0..relations_per_element)
        .map(|mask| relation_from_mask(base_size, mask))
        .collect();
    let options = VerifyOptions {
        require_top_equiv,
        ..VerifyOptions::default()
    };
    let mut out = Vec::new();
    let mut counters = vec![0u64; n];
    loop {
        let map: Vec<Relation> = counters
            .iter()
            .map(|&c| universe[c as usize].clone())
            .collect();
        if let Ok(rep) = Representation::new(alg.clone(), base_size, map, sig.clone(), semantics) {
            if rep.verify(&options).passed() {
                out.push(rep);
            }
        }
        let mut digit = 0;
        loop {
            if digit == n {
                return Ok(out);
            }
            counters[digit] += 1;
            if counters[digit] < relations_per_element {
                break;
            }
            counters[digit] = 0;
            digit += 1;
        }
    }
}

fn relation_from_mask(base: usize, mask: u64) -> Relation {
    let pairs: Vec<(usize, usize)> = (0..base * base)
        .filter(|p| mask >> p & 1 == 1)
        .map(|p| (p / base, p % base))
        .collect();
    Relation::from_pairs(base, &pairs).unwrap()
}

enum SolveResult {
    Found(Representation),
    Unsat,
    OutOfBudget,
}

#[derive(Clone, Copy)]
enum Alt {
    /// Assign one membership literal.
    Lit { elem: usize, pair: usize, value: bool },
    /// Assert both legs of a composition witness.
    Legs {
        a: usize,
        leg_a: usize,
        b: usize,
        leg_b: usize,
    },
}

struct Frame {
    trail_len: usize,
    touched: u64,
    alts: Vec<Alt>,
    next: usize,
}

struct Solver<'a> {
    alg: &'a FiniteAlgebra,
    cfg: &'a SearchConfig,
    k: usize,
    pair_mask: u64,
    row_mask: u64,
    t: Vec<u64>,
    f: Vec<u64>,
    trail: Vec<(usize, u64, bool)>,
    touched: u64,
    nodes: u64,
    budget: u64,
    // constraint structure
    sig: Signature,
    products: Vec<(usize, usize, usize)>,
    meets: Vec<(usize, usize, usize)>,
    joins: Vec<(usize, usize, usize)>,
    complements: Vec<(usize, usize)>,
    le_pairs: Vec<(usize, usize)>,
    nle_pairs: Vec<(usize, usize)>,
    neq_pairs: Vec<(usize, usize)>,
    top: Option<usize>,
    elem_order: Vec<usize>,
    conflict: bool,
}

impl<'a> Solver<'a> {
    fn new(
        alg: &'a FiniteAlgebra,
        sig: &Signature,
        cfg: &'a SearchConfig,
        k: usize,
        budget: u64,
        starting_nodes: u64,
    ) -> Self {
        let n = alg.n();
        let pair_count = k * k;
        let pair_mask = if pair_count == 64 {
            !0
        } else {
            (1u64 << pair_count) - 1
        };
        let row_mask = if k == 64 { !0 } else { (1u64 << k) - 1 };

        let mut products = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                products.push((a, b, alg.compose(a, b)));
            }
        }
        let mut meets = Vec::new();
        if sig.contains(SigSymbol::Meet) {
            for a in 0..n {
                for b in 0..n {
                    meets.push((a, b, alg.meet(a, b).unwrap()));
                }
            }
        }
        let mut joins = Vec::new();
        if sig.contains(SigSymbol::Join) {
            for a in 0..n {
                for b in 0..n {
                    joins.push((a, b, alg.join(a, b).unwrap()));
                }
            }
        }
        let mut complements = Vec::new();
        if sig.contains(SigSymbol::Complement) {
            for a in 0..n {
                complements.push((a, alg.complement(a).unwrap()));
            }
        }
        let mut le_pairs = Vec::new();
        let mut nle_pairs = Vec::new();
        if sig.contains(SigSymbol::Order) {
            for a in 0..n {
                for b in 0..n {
                    if a == b {
                        continue;
                    }
                    if alg.le(a, b).unwrap() {
                        le_pairs.push((a, b));
                    } else {
                        nle_pairs.push((a, b));
                    }
                }
            }
        }
        let mut neq_pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                neq_pairs.push((a, b));
            }
        }
        let top = if sig.contains(SigSymbol::ConstTop) {
            Some(alg.const_top().unwrap())
        } else {
            None
        };

        // branch order: constants first, then elements that occur often as
        // products (their witness constraints propagate most), then index
        let mut degree = vec![0usize; n];
        for &(_, _, c) in &products {
            degree[c] += 1;
        }
        let constants = [alg.constants().e, alg.constants().zero, alg.constants().top];
        let mut elem_order: Vec<usize> = (0..n).collect();
        elem_order.sort_by_key(|&a| {
            let is_const = constants.contains(&Some(a));
            (std::cmp::Reverse(is_const), std::cmp::Reverse(degree[a]), a)
        });

        Solver {
            alg,
            cfg,
            k,
            pair_mask,
            row_mask,
            t: vec![0; n],
            f: vec![0; n],
            trail: Vec::new(),
            touched: 0,
            nodes: starting_nodes,
            budget,
            sig: sig.clone(),
            products,
            meets,
            joins,
            complements,
            le_pairs,
            nle_pairs,
            neq_pairs,
            top,
            elem_order,
            conflict: false,
        }
    }

    fn touch_mask(&self, bits: u64) -> u64 {
        let mut touched = 0u64;
        let mut rest = bits;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            touched |= 1 << (p / self.k);
            touched |= 1 << (p % self.k);
            rest &= rest - 1;
        }
        touched
    }

    fn assign_true(&mut self, elem: usize, bits: u64) {
        let new = bits & !self.t[elem] & self.pair_mask;
        if new == 0 {
            return;
        }
        if new & self.f[elem] != 0 {
            self.conflict = true;
            return;
        }
        self.t[elem] |= new;
        self.touched |= self.touch_mask(new);
        self.trail.push((elem, new, true));
    }

    fn assign_false(&mut self, elem: usize, bits: u64) {
        let new = bits & !self.f[elem] & self.pair_mask;
        if new == 0 {
            return;
        }
        if new & self.t[elem] != 0 {
            self.conflict = true;
            return;
        }
        self.f[elem] |= new;
        self.touched |= self.touch_mask(new);
        self.trail.push((elem, new, false));
    }

    fn undo_to(&mut self, trail_len: usize, touched: u64) {
        while self.trail.len() > trail_len {
            let (elem, bits, value) = self.trail.pop().unwrap();
            if value {
                self.t[elem] &= !bits;
            } else {
                self.f[elem] &= !bits;
            }
        }
        self.touched = touched;
        self.conflict = false;
    }

    /// Pairs (x,y) with a z such that `ta` holds (x,z) and `tb` holds (z,y).
    fn compose_mask(&self, ta: u64, tb: u64) -> u64 {
        let mut out = 0u64;
        for x in 0..self.k {
            let mids = ta >> (x * self.k) & self.row_mask;
            let mut rest = mids;
            let mut acc = 0u64;
            while rest != 0 {
                let z = rest.trailing_zeros() as usize;
                acc |= tb >> (z * self.k) & self.row_mask;
                rest &= rest - 1;
            }
            out |= acc << (x * self.k);
        }
        out
    }

    fn transpose_mask(&self, bits: u64) -> u64 {
        let mut out = 0u64;
        let mut rest = bits;
        while rest != 0 {
            let p = rest.trailing_zeros() as usize;
            out |= 1 << ((p % self.k) * self.k + p / self.k);
            rest &= rest - 1;
        }
        out
    }

    fn column(&self, bits: u64, y: usize) -> u64 {
        let mut out = 0u64;
        for z in 0..self.k {
            if bits >> (z * self.k + y) & 1 == 1 {
                out |= 1 << z;
            }
        }
        out
    }

    fn preassign_constants(&mut self) {
        let constants = self.alg.constants();
        if self.sig.contains(SigSymbol::ConstE) {
            if let Some(e) = constants.e {
                let mut diag = 0u64;
                for x in 0..self.k {
                    diag |= 1 << (x * self.k + x);
                }
                self.assign_true(e, diag);
                self.assign_false(e, self.pair_mask & !diag);
            }
        }
        if self.sig.contains(SigSymbol::ConstZero) {
            if let Some(zero) = constants.zero {
                self.assign_false(zero, self.pair_mask);
            }
        }
    }

    fn propagate(&mut self) {
        while !self.conflict {
            let before = self.trail.len();

            // compose: forward closure, backward pruning, forced witnesses
            for i in 0..self.products.len() {
                let (a, b, c) = self.products[i];
                let forced = self.compose_mask(self.t[a], self.t[b]);
                self.assign_true(c, forced);
                if self.conflict {
                    return;
                }

                // pairs of h(c) known false kill every completed leg pair
                let dead = self.f[c];
                if dead != 0 {
                    let mut rest = dead;
                    while rest != 0 {
                        let p = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        let (x, y) = (p / self.k, p % self.k);
                        let row_a = self.t[a] >> (x * self.k) & self.row_mask;
                        let col_b = self.column(self.t[b], y);
                        // z with (x,z) true forces (z,y) false, and dually
                        let mut za = row_a;
                        while za != 0 {
                            let z = za.trailing_zeros() as usize;
                            za &= za - 1;
                            self.assign_false(b, 1 << (z * self.k + y));
                        }
                        let mut zb = col_b;
                        while zb != 0 {
                            let z = zb.trailing_zeros() as usize;
                            zb &= zb - 1;
                            self.assign_false(a, 1 << (x * self.k + z));
                        }
                        if self.conflict {
                            return;
                        }
                    }
                }

                // every true pair of h(c) needs a witness; dead-end or
                // single-candidate cases resolve now
                let unwitnessed = self.t[c] & !self.compose_mask(self.t[a], self.t[b]);
                let mut rest = unwitnessed;
                while rest != 0 {
                    let p = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let (x, y) = (p / self.k, p % self.k);
                    let cand = !(self.f[a] >> (x * self.k)) & self.row_mask
                        & !self.column(self.f[b], y);
                    if cand == 0 {
                        self.conflict = true;
                        return;
                    }
                    if cand.count_ones() == 1 {
                        let z = cand.trailing_zeros() as usize;
                        self.assign_true(a, 1 << (x * self.k + z));
                        self.assign_true(b, 1 << (z * self.k + y));
                        if self.conflict {
                            return;
                        }
                    }
                }
            }

            // meet gates: h(m) = h(a) ∩ h(b) pointwise
            for i in 0..self.meets.len() {
                let (a, b, m) = self.meets[i];
                self.assign_true(m, self.t[a] & self.t[b]);
                self.assign_false(m, self.f[a] | self.f[b]);
                self.assign_true(a, self.t[m]);
                self.assign_true(b, self.t[m]);
                self.assign_false(b, self.f[m] & self.t[a]);
                self.assign_false(a, self.f[m] & self.t[b]);
                if self.conflict {
                    return;
                }
            }

            // join gates: h(j) = h(a) ∪ h(b) pointwise
            for i in 0..self.joins.len() {
                let (a, b, j) = self.joins[i];
                self.assign_true(j, self.t[a] | self.t[b]);
                self.assign_false(j, self.f[a] & self.f[b]);
                self.assign_false(a, self.f[j]);
                self.assign_false(b, self.f[j]);
                self.assign_true(b, self.t[j] & self.f[a]);
                self.assign_true(a, self.t[j] & self.f[b]);
                if self.conflict {
                    return;
                }
            }

            // complement
            if !self.complements.is_empty() {
                match self.cfg.semantics {
                    Complementation::Universal => {
                        for i in 0..self.complements.len() {
                            let (a, c) = self.complements[i];
                            self.assign_true(c, self.f[a]);
                            self.assign_false(c, self.t[a]);
                            self.assign_true(a, self.f[c]);
                            self.assign_false(a, self.t[c]);
                            if self.conflict {
                                return;
                            }
                        }
                    }
                    Complementation::Relative => {
                        let covered = self.t.iter().fold(0u64, |acc, &t| acc | t);
                        for i in 0..self.complements.len() {
                            let (a, c) = self.complements[i];
                            self.assign_false(c, self.t[a]);
                            self.assign_false(a, self.t[c]);
                            self.assign_true(c, covered & self.f[a]);
                            self.assign_true(a, covered & self.f[c]);
                            if self.conflict {
                                return;
                            }
                            // a pair excluded from both a and −a is outside
                            // the union, hence outside every element
                            let dead = self.f[a] & self.f[c];
                            if dead != 0 {
                                for e in 0..self.t.len() {
                                    self.assign_false(e, dead);
                                    if self.conflict {
                                        return;
                                    }
                                }
                            }
                        }
                    }
                }
            }

            // order: containment forward, difference witness for strict
            // non-order
            for i in 0..self.le_pairs.len() {
                let (a, b) = self.le_pairs[i];
                self.assign_true(b, self.t[a]);
                self.assign_false(a, self.f[b]);
                if self.conflict {
                    return;
                }
            }
            for i in 0..self.nle_pairs.len() {
                let (a, b) = self.nle_pairs[i];
                if self.t[a] & self.f[b] != 0 {
                    continue; // witnessed
                }
                let cand = !self.f[a] & !self.t[b] & self.pair_mask;
                if cand == 0 {
                    self.conflict = true;
                    return;
                }
                if cand.count_ones() == 1 {
                    let p = cand.trailing_zeros() as usize;
                    self.assign_true(a, 1 << p);
                    self.assign_false(b, 1 << p);
                    if self.conflict {
                        return;
                    }
                }
            }

            // faithfulness: every unequal pair of elements must differ
            // somewhere
            for i in 0..self.neq_pairs.len() {
                let (a, b) = self.neq_pairs[i];
                if (self.t[a] & self.f[b]) | (self.f[a] & self.t[b]) != 0 {
                    continue;
                }
                let settled_equal = (self.t[a] & self.t[b]) | (self.f[a] & self.f[b]);
                let cand = !settled_equal & self.pair_mask;
                if cand == 0 {
                    self.conflict = true;
                    return;
                }
                if cand.count_ones() == 1 {
                    let p = cand.trailing_zeros() as usize;
                    // force a difference where one side is already settled
                    if self.t[a] >> p & 1 == 1 {
                        self.assign_false(b, 1 << p);
                    } else if self.f[a] >> p & 1 == 1 {
                        self.assign_true(b, 1 << p);
                    } else if self.t[b] >> p & 1 == 1 {
                        self.assign_false(a, 1 << p);
                    } else if self.f[b] >> p & 1 == 1 {
                        self.assign_true(a, 1 << p);
                    }
                    if self.conflict {
                        return;
                    }
                }
            }

            // top: contains every image; optionally an equivalence on its
            // field
            if let Some(top) = self.top {
                for a in 0..self.t.len() {
                    self.assign_true(top, self.t[a]);
                    self.assign_false(a, self.f[top]);
                    if self.conflict {
                        return;
                    }
                }
                if self.cfg.require_top_equiv {
                    self.assign_true(top, self.transpose_mask(self.t[top]));
                    self.assign_false(top, self.transpose_mask(self.f[top]));
                    self.assign_true(top, self.compose_mask(self.t[top], self.t[top]));
                    if self.conflict {
                        return;
                    }
                    let mut rest = self.t[top];
                    let mut loops = 0u64;
                    while rest != 0 {
                        let p = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        let (x, y) = (p / self.k, p % self.k);
                        loops |= 1 << (x * self.k + x);
                        loops |= 1 << (y * self.k + y);
                    }
                    self.assign_true(top, loops);
                    if self.conflict {
                        return;
                    }
                }
            }

            if self.trail.len() == before {
                break;
            }
        }
    }

    /// The least untouched point (every point beyond it is interchangeable
    /// with it).
    fn fresh_bound(&self) -> usize {
        (64 - self.touched.leading_zeros()) as usize
    }

    fn pick_branch(&self) -> Option<Vec<Alt>> {
        // 1. unwitnessed composition pairs: k-way branch on the witness
        for &(a, b, c) in &self.products {
            let unwitnessed = self.t[c] & !self.compose_mask(self.t[a], self.t[b]);
            if unwitnessed == 0 {
                continue;
            }
            let p = unwitnessed.trailing_zeros() as usize;
            let (x, y) = (p / self.k, p % self.k);
            let cand =
                !(self.f[a] >> (x * self.k)) & self.row_mask & !self.column(self.f[b], y);
            let limit = if self.cfg.symmetry_breaking {
                self.fresh_bound().min(self.k - 1)
            } else {
                self.k - 1
            };
            let mut alts = Vec::new();
            let mut rest = cand;
            while rest != 0 {
                let z = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if z > limit {
                    break;
                }
                alts.push(Alt::Legs {
                    a,
                    leg_a: x * self.k + z,
                    b,
                    leg_b: z * self.k + y,
                });
            }
            debug_assert!(!alts.is_empty(), "empty witness candidates survive propagation");
            return Some(alts);
        }

        // 2. unsatisfied non-order witnesses
        for &(a, b) in &self.nle_pairs {
            if self.t[a] & self.f[b] != 0 {
                continue;
            }
            let cand = !self.f[a] & !self.t[b] & self.pair_mask;
            let p = cand.trailing_zeros() as usize;
            if self.t[a] >> p & 1 == 0 {
                return Some(vec![
                    Alt::Lit {
                        elem: a,
                        pair: p,
                        value: true,
                    },
                    Alt::Lit {
                        elem: a,
                        pair: p,
                        value: false,
                    },
                ]);
            }
            return Some(vec![
                Alt::Lit {
                    elem: b,
                    pair: p,
                    value: false,
                },
                Alt::Lit {
                    elem: b,
                    pair: p,
                    value: true,
                },
            ]);
        }

        // 3. unsatisfied faithfulness witnesses
        for &(a, b) in &self.neq_pairs {
            if (self.t[a] & self.f[b]) | (self.f[a] & self.t[b]) != 0 {
                continue;
            }
            let settled_equal = (self.t[a] & self.t[b]) | (self.f[a] & self.f[b]);
            let cand = !settled_equal & self.pair_mask;
            let p = cand.trailing_zeros() as usize;
            let elem = if (self.t[a] | self.f[a]) >> p & 1 == 0 { a } else { b };
            return Some(vec![
                Alt::Lit {
                    elem,
                    pair: p,
                    value: true,
                },
                Alt::Lit {
                    elem,
                    pair: p,
                    value: false,
                },
            ]);
        }

        // 4. any undecided literal, sparse first
        for &a in &self.elem_order {
            let undecided = !(self.t[a] | self.f[a]) & self.pair_mask;
            if undecided != 0 {
                let p = undecided.trailing_zeros() as usize;
                return Some(vec![
                    Alt::Lit {
                        elem: a,
                        pair: p,
                        value: false,
                    },
                    Alt::Lit {
                        elem: a,
                        pair: p,
                        value: true,
                    },
                ]);
            }
        }
        None
    }

    fn apply(&mut self, alt: Alt) {
        match alt {
            Alt::Lit { elem, pair, value } => {
                if value {
                    self.assign_true(elem, 1 << pair);
                } else {
                    self.assign_false(elem, 1 << pair);
                }
            }
            Alt::Legs { a, leg_a, b, leg_b } => {
                self.assign_true(a, 1 << leg_a);
                if !self.conflict {
                    self.assign_true(b, 1 << leg_b);
                }
            }
        }
    }

    fn leaf_representation(&self) -> Option<Representation> {
        let map: Vec<Relation> = self
            .t
            .iter()
            .map(|&mask| relation_from_mask(self.k, mask))
            .collect();
        let rep = Representation::new(
            self.alg.clone(),
            self.k,
            map,
            self.sig.clone(),
            self.cfg.semantics,
        )
        .ok()?;
        let report = rep.verify(&VerifyOptions {
            require_top_equiv: self.cfg.require_top_equiv,
            ..VerifyOptions::default()
        });
        if report.passed() {
            Some(rep)
        } else {
            None
        }
    }

    fn run(&mut self) -> SolveResult {
        self.preassign_constants();
        let mut stack: Vec<Frame> = Vec::new();

        loop {
            if !self.conflict {
                self.propagate();
            }
            if !self.conflict {
                match self.pick_branch() {
                    None => {
                        // fully decided: exact check
                        if let Some(rep) = self.leaf_representation() {
                            return SolveResult::Found(rep);
                        }
                        self.conflict = true;
                    }
                    Some(alts) => {
                        if self.nodes >= self.budget {
                            return SolveResult::OutOfBudget;
                        }
                        self.nodes += 1;
                        let frame = Frame {
                            trail_len: self.trail.len(),
                            touched: self.touched,
                            alts,
                            next: 1,
                        };
                        let first = frame.alts[0];
                        stack.push(frame);
                        self.apply(first);
                        continue;
                    }
                }
            }

            // backtrack
            loop {
                match stack.last_mut() {
                    None => return SolveResult::Unsat,
                    Some(frame) => {
                        if frame.next < frame.alts.len() {
                            let trail_len = frame.trail_len;
                            let touched = frame.touched;
                            let alt = frame.alts[frame.next];
                            frame.next += 1;
                            self.undo_to(trail_len, touched);
                            if self.nodes >= self.budget {
                                return SolveResult::OutOfBudget;
                            }
                            self.nodes += 1;
                            self.apply(alt);
                            break;
                        }
                        let frame = stack.pop().unwrap();
                        self.undo_to(frame.trail_len, frame.touched);
                    }
                }
            }
            // re-enter with the newly applied alternative; propagation
            // runs at the top of the loop, and a conflict raised by the
            // application itself sends us straight back here
        }
    }
}
