//! Partial groups, their validation, and bounded embedding search.
//!
//! A [`PartialGroup`] is a finite carrier with a partial binary operation
//! and an identity that acts as such wherever products are defined.
//! Validation checks the identity laws, associativity in the weak sense
//! (both bracketings fully defined), the cancellation laws, and
//! squareness. [`embed_search`] looks for an injective map into a finite
//! group realised as permutations of `1..=k` points; any set of
//! permutations respecting the defined products generates a finite group,
//! so searching symmetric groups by degree loses no generality at bounded
//! scale.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use thiserror::Error;

/// A permutation of `0..degree` in one-line notation: `map[i]` is the
/// image of `i`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    map: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            map: (0..degree).collect(),
        }
    }

    pub fn from_one_line(map: Vec<usize>) -> Option<Perm> {
        let degree = map.len();
        let mut seen = vec![false; degree];
        for &i in &map {
            if i >= degree || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Perm { map })
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.map
    }

    /// Left-to-right composition: apply `self`, then `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            map: self.map.iter().map(|&i| other.map[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut map = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
        }
        Perm { map }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// All permutations of the given degree in lexicographic one-line
    /// order.
    pub fn all(degree: usize) -> Vec<Perm> {
        fn rec(prefix: &mut Vec<usize>, remaining: &mut Vec<usize>, out: &mut Vec<Perm>) {
            if remaining.is_empty() {
                out.push(Perm {
                    map: prefix.clone(),
                });
                return;
            }
            for i in 0..remaining.len() {
                let v = remaining.remove(i);
                prefix.push(v);
                rec(prefix, remaining, out);
                prefix.pop();
                remaining.insert(i, v);
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut (0..degree).collect(), &mut out);
        out
    }
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.map)
    }
}

/// A total Cayley table that actually is a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    n: usize,
    table: Vec<usize>,
    identity: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupTableError {
    #[error("table must be a nonempty square, got {0} entries")]
    BadShape(usize),
    #[error("entry {0} out of range")]
    OutOfRange(usize),
    #[error("operation is not associative at ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
}

impl GroupTable {
    pub fn new(n: usize, table: Vec<usize>) -> Result<GroupTable, GroupTableError> {
        if n == 0 || table.len() != n * n {
            return Err(GroupTableError::BadShape(table.len()));
        }
        for &v in &table {
            if v >= n {
                return Err(GroupTableError::OutOfRange(v));
            }
        }
        let mul = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                        return Err(GroupTableError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul(e, a) == a && mul(a, e) == a))
            .ok_or(GroupTableError::NoIdentity)?;
        for a in 0..n {
            if !(0..n).any(|b| mul(a, b) == identity && mul(b, a) == identity) {
                return Err(GroupTableError::NoInverse(a));
            }
        }
        Ok(GroupTable { n, table, identity })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    /// The whole group as a total partial group (every product defined).
    pub fn as_partial_group(&self) -> PartialGroup {
        let table = self.table.iter().map(|&v| Some(v)).collect();
        PartialGroup::new(self.n, self.identity, table, Some((0..self.n).collect()))
            .expect("a group table is a well-formed partial group")
    }
}

/// A finite carrier with a partial product, an identity, and an optional
/// designated square-root subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialGroup {
    n: usize,
    identity: usize,
    table: Vec<Option<usize>>,
    sqrt: Option<BTreeSet<usize>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartialGroupError {
    #[error("carrier must be nonempty")]
    Empty,
    #[error("table must have n² entries, got {0}")]
    BadShape(usize),
    #[error("index {0} out of range")]
    OutOfRange(usize),
}

/// One violated partial-group axiom with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PgViolation {
    /// `e*a` or `a*e` is defined but differs from `a`.
    Identity { a: usize },
    /// Both bracketings defined but unequal.
    Associativity { a: usize, b: usize, c: usize },
    /// `a*b = a*c` with `b ≠ c` (left) or the symmetric right version.
    Cancellation { fixed: usize, x: usize, y: usize },
    /// The designated (or inferred) square root subset fails its axioms.
    Squareness { reason: String },
}

impl std::fmt::Display for PgViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PgViolation::Identity { a } => write!(f, "identity law fails at {a}"),
            PgViolation::Associativity { a, b, c } => {
                write!(f, "associativity fails at ({a},{b},{c})")
            }
            PgViolation::Cancellation { fixed, x, y } => {
                write!(f, "cancellation fails: {fixed} with {x},{y}")
            }
            PgViolation::Squareness { reason } => write!(f, "squareness fails: {reason}"),
        }
    }
}

/// Outcome of validation: the violations plus the square-root subset that
/// was checked (designated or inferred).
#[derive(Debug, Clone)]
pub struct PgValidation {
    pub violations: Vec<PgViolation>,
    pub sqrt: Option<BTreeSet<usize>>,
}

impl PgValidation {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl PartialGroup {
    pub fn new(
        n: usize,
        identity: usize,
        table: Vec<Option<usize>>,
        sqrt: Option<BTreeSet<usize>>,
    ) -> Result<PartialGroup, PartialGroupError> {
        if n == 0 {
            return Err(PartialGroupError::Empty);
        }
        if table.len() != n * n {
            return Err(PartialGroupError::BadShape(table.len()));
        }
        if identity >= n {
            return Err(PartialGroupError::OutOfRange(identity));
        }
        for v in table.iter().flatten() {
            if *v >= n {
                return Err(PartialGroupError::OutOfRange(*v));
            }
        }
        if let Some(s) = &sqrt {
            for &v in s {
                if v >= n {
                    return Err(PartialGroupError::OutOfRange(v));
                }
            }
        }
        Ok(PartialGroup {
            n,
            identity,
            table,
            sqrt,
        })
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn sqrt(&self) -> Option<&BTreeSet<usize>> {
        self.sqrt.as_ref()
    }

    pub fn product(&self, a: usize, b: usize) -> Option<usize> {
        self.table[a * self.n + b]
    }

    /// All defined products as `(a, b, a*b)` triples, row-major.
    pub fn defined_products(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in 0..self.n {
                if let Some(c) = self.product(a, b) {
                    out.push((a, b, c));
                }
            }
        }
        out
    }

    /// Checks identity, weak associativity, cancellativity and squareness.
    ///
    /// When no square-root subset is designated, the one candidate that
    /// the defined-iff axiom permits — the set of elements whose square is
    /// defined — is checked, and reported if it satisfies the axioms.
    pub fn validate(&self) -> PgValidation {
        let mut violations = Vec::new();

        for a in 0..self.n {
            let left = self.product(self.identity, a);
            let right = self.product(a, self.identity);
            if left.is_some_and(|v| v != a) || right.is_some_and(|v| v != a) {
                violations.push(PgViolation::Identity { a });
            }
        }

        for a in 0..self.n {
            for b in 0..self.n {
                for c in 0..self.n {
                    let lhs = self.product(a, b).and_then(|ab| self.product(ab, c));
                    let rhs = self.product(b, c).and_then(|bc| self.product(a, bc));
                    if let (Some(l), Some(r)) = (lhs, rhs) {
                        if l != r {
                            violations.push(PgViolation::Associativity { a, b, c });
                        }
                    }
                }
            }
        }

        for fixed in 0..self.n {
            for x in 0..self.n {
                for y in x + 1..self.n {
                    if let (Some(p), Some(q)) = (self.product(fixed, x), self.product(fixed, y)) {
                        if p == q {
                            violations.push(PgViolation::Cancellation { fixed, x, y });
                        }
                    }
                    if let (Some(p), Some(q)) = (self.product(x, fixed), self.product(y, fixed)) {
                        if p == q {
                            violations.push(PgViolation::Cancellation { fixed, x, y });
                        }
                    }
                }
            }
        }

        let candidate: BTreeSet<usize> = match &self.sqrt {
            Some(s) => s.clone(),
            None => (0..self.n)
                .filter(|&a| self.product(a, a).is_some())
                .collect(),
        };
        let mut square_ok = true;
        if !candidate.contains(&self.identity) {
            violations.push(PgViolation::Squareness {
                reason: "the identity is not in the square-root subset".into(),
            });
            square_ok = false;
        }
        'outer: for a in 0..self.n {
            for b in 0..self.n {
                let should = candidate.contains(&a) && candidate.contains(&b);
                if self.product(a, b).is_some() != should {
                    violations.push(PgViolation::Squareness {
                        reason: format!(
                            "product ({a},{b}) is {} but {a},{b} {} in the subset",
                            if self.product(a, b).is_some() {
                                "defined"
                            } else {
                                "undefined"
                            },
                            if should { "are" } else { "are not both" },
                        ),
                    });
                    square_ok = false;
                    break 'outer;
                }
            }
        }
        let mut covered: BTreeSet<usize> = BTreeSet::new();
        for &a in &candidate {
            for &b in &candidate {
                if let Some(c) = self.product(a, b) {
                    covered.insert(c);
                }
            }
        }
        if covered.len() != self.n {
            let missing = (0..self.n).find(|a| !covered.contains(a)).unwrap();
            violations.push(PgViolation::Squareness {
                reason: format!("element {missing} is not a product of subset elements"),
            });
            square_ok = false;
        }

        PgValidation {
            violations,
            sqrt: square_ok.then_some(candidate),
        }
    }
}

/// Restricts a group to the products of a subset containing the identity:
/// the carrier is `sqrt·sqrt`, and products are defined exactly on
/// `sqrt × sqrt`.
///
/// Panics if the subset does not contain the group identity.
pub fn restrict_group(group: &GroupTable, sqrt: &BTreeSet<usize>) -> PartialGroup {
    assert!(
        sqrt.contains(&group.identity()),
        "the square-root subset must contain the identity"
    );
    let mut carrier: BTreeSet<usize> = BTreeSet::new();
    for &a in sqrt {
        for &b in sqrt {
            carrier.insert(group.mul(a, b));
        }
    }
    let carrier: Vec<usize> = carrier.into_iter().collect();
    let reindex = |g: usize| carrier.iter().position(|&c| c == g).unwrap();
    let n = carrier.len();
    let mut table = vec![None; n * n];
    for &a in sqrt {
        for &b in sqrt {
            table[reindex(a) * n + reindex(b)] = Some(reindex(group.mul(a, b)));
        }
    }
    let new_sqrt: BTreeSet<usize> = sqrt.iter().map(|&a| reindex(a)).collect();
    PartialGroup::new(n, reindex(group.identity()), table, Some(new_sqrt))
        .expect("restriction of a group is well-formed")
}

/// A finite group realized as permutations of `degree` points: closed
/// under products (hence, being finite, under inverses) and containing
/// the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermGroup {
    degree: usize,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// The closure of the generators under composition.
    pub fn generate(degree: usize, generators: &[Perm]) -> PermGroup {
        let mut elems: BTreeSet<Perm> = BTreeSet::new();
        elems.insert(Perm::identity(degree));
        for p in generators {
            assert_eq!(p.degree(), degree);
            elems.insert(p.clone());
        }
        loop {
            let mut fresh: Vec<Perm> = Vec::new();
            for p in &elems {
                for q in &elems {
                    let r = p.compose(q);
                    if !elems.contains(&r) {
                        fresh.push(r);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            elems.extend(fresh);
        }
        PermGroup {
            degree,
            elements: elems.into_iter().collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.contains(p)
    }
}

/// An injective product-respecting map into permutations of `degree`
/// points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub degree: usize,
    pub images: Vec<Perm>,
}

impl Embedding {
    /// The subgroup of the symmetric group generated by the images: the
    /// finite group the partial group embeds into.
    pub fn ambient_group(&self) -> PermGroup {
        PermGroup::generate(self.degree, &self.images)
    }
}

/// Witnessed failure of an embedding check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingFailure {
    NotInjective { a: usize, b: usize },
    ProductNotRespected { a: usize, b: usize },
    IdentityNotIdentity,
}

/// Verifies injectivity, product preservation, and that the identity maps
/// to the identity permutation.
pub fn check_embedding(pg: &PartialGroup, phi: &Embedding) -> Result<(), Vec<EmbeddingFailure>> {
    let mut failures = Vec::new();
    if phi.images.len() != pg.carrier_size() {
        failures.push(EmbeddingFailure::IdentityNotIdentity);
        return Err(failures);
    }
    if !phi.images[pg.identity()].is_identity() {
        failures.push(EmbeddingFailure::IdentityNotIdentity);
    }
    for a in 0..pg.carrier_size() {
        for b in a + 1..pg.carrier_size() {
            if phi.images[a] == phi.images[b] {
                failures.push(EmbeddingFailure::NotInjective { a, b });
            }
        }
    }
    for (a, b, c) in pg.defined_products() {
        if phi.images[a].compose(&phi.images[b]) != phi.images[c] {
            failures.push(EmbeddingFailure::ProductNotRespected { a, b });
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures)
    }
}

/// Hard cap on the searchable degree (the permutation pool is k!).
pub const MAX_EMBED_DEGREE: usize = 8;

#[derive(Debug, Clone)]
pub struct EmbedConfig {
    pub max_degree: usize,
    pub node_limit: u64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            max_degree: 6,
            node_limit: 5_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub enum EmbedStatus {
    Found(Embedding),
    NotFoundUpTo(usize),
    ResourceExhausted { nodes: u64 },
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome {
    pub status: EmbedStatus,
    pub nodes: u64,
    pub elapsed: Duration,
}

impl EmbedOutcome {
    pub fn found(&self) -> Option<&Embedding> {
        match &self.status {
            EmbedStatus::Found(e) => Some(e),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("config: max_degree and node_limit must be at least 1")]
    BadConfig,
    #[error("config: max_degree {0} exceeds the cap of {MAX_EMBED_DEGREE}")]
    DegreeTooLarge(usize),
}

/// Searches degrees `1..=max_degree` for an embedding into the symmetric
/// group of that degree; exhaustive per degree.
pub fn embed_search(pg: &PartialGroup, cfg: &EmbedConfig) -> Result<EmbedOutcome, EmbedError> {
    if cfg.max_degree == 0 || cfg.node_limit == 0 {
        return Err(EmbedError::BadConfig);
    }
    if cfg.max_degree > MAX_EMBED_DEGREE {
        return Err(EmbedError::DegreeTooLarge(cfg.max_degree));
    }
    let start = Instant::now();
    let mut nodes = 0u64;
    for degree in 1..=cfg.max_degree {
        let pool = Perm::all(degree);
        if pool.len() < pg.carrier_size() {
            continue; // injectivity is impossible by counting
        }
        let mut search = EmbedSearch {
            pg,
            pool: &pool,
            images: vec![None; pg.carrier_size()],
            used: HashSet::new(),
            nodes: &mut nodes,
            budget: cfg.node_limit,
        };
        search.images[pg.identity()] = Some(Perm::identity(degree));
        search.used.insert(Perm::identity(degree));
        match search.run() {
            EmbedStep::Found(images) => {
                let embedding = Embedding { degree, images };
                check_embedding(pg, &embedding)
                    .expect("embed search returned an invalid embedding");
                return Ok(EmbedOutcome {
                    status: EmbedStatus::Found(embedding),
                    nodes,
                    elapsed: start.elapsed(),
                });
            }
            EmbedStep::Exhausted => {}
            EmbedStep::OutOfBudget => {
                return Ok(EmbedOutcome {
                    status: EmbedStatus::ResourceExhausted { nodes },
                    nodes,
                    elapsed: start.elapsed(),
                });
            }
        }
    }
    Ok(EmbedOutcome {
        status: EmbedStatus::NotFoundUpTo(cfg.max_degree),
        nodes,
        elapsed: start.elapsed(),
    })
}

enum EmbedStep {
    Found(Vec<Perm>),
    Exhausted,
    OutOfBudget,
}

struct EmbedSearch<'a> {
    pg: &'a PartialGroup,
    pool: &'a [Perm],
    images: Vec<Option<Perm>>,
    used: HashSet<Perm>,
    nodes: &'a mut u64,
    budget: u64,
}

impl EmbedSearch<'_> {
    /// Derives every image forced by already-assigned products; returns
    /// the assignments made, or `None` on inconsistency.
    fn propagate(&mut self) -> Option<Vec<usize>> {
        let mut assigned = Vec::new();
        loop {
            let mut progress = false;
            for (a, b, c) in self.pg.defined_products() {
                let pa = self.images[a].clone();
                let pb = self.images[b].clone();
                let pc = self.images[c].clone();
                let forced = match (&pa, &pb, &pc) {
                    (Some(x), Some(y), _) => Some((c, x.compose(y))),
                    (Some(x), None, Some(z)) => Some((b, x.inverse().compose(z))),
                    (None, Some(y), Some(z)) => Some((a, z.compose(&y.inverse()))),
                    _ => None,
                };
                if let Some((elem, value)) = forced {
                    match &self.images[elem] {
                        Some(existing) => {
                            if *existing != value {
                                self.unwind(&assigned);
                                return None;
                            }
                        }
                        None => {
                            if self.used.contains(&value) {
                                self.unwind(&assigned);
                                return None;
                            }
                            self.used.insert(value.clone());
                            self.images[elem] = Some(value);
                            assigned.push(elem);
                            progress = true;
                        }
                    }
                }
            }
            if !progress {
                return Some(assigned);
            }
        }
    }

    fn unwind(&mut self, assigned: &[usize]) {
        for &elem in assigned {
            let perm = self.images[elem].take().unwrap();
            self.used.remove(&perm);
        }
    }

    fn next_element(&self) -> Option<usize> {
        // most constrained first: the unassigned element with the most
        // defined products against assigned ones
        let mut best: Option<(usize, usize)> = None;
        for a in 0..self.pg.carrier_size() {
            if self.images[a].is_some() {
                continue;
            }
            let mut score = 0;
            for b in 0..self.pg.carrier_size() {
                if self.images[b].is_some() {
                    if self.pg.product(a, b).is_some() {
                        score += 1;
                    }
                    if self.pg.product(b, a).is_some() {
                        score += 1;
                    }
                }
            }
            match best {
                Some((s, _)) if s >= score => {}
                _ => best = Some((score, a)),
            }
        }
        best.map(|(_, a)| a)
    }

    fn run(&mut self) -> EmbedStep {
        let Some(assigned) = self.propagate() else {
            return EmbedStep::Exhausted;
        };
        let element = match self.next_element() {
            None => {
                let images: Vec<Perm> = self.images.iter().map(|p| p.clone().unwrap()).collect();
                self.unwind(&assigned);
                return EmbedStep::Found(images);
            }
            Some(e) => e,
        };
        for i in 0..self.pool.len() {
            let candidate = self.pool[i].clone();
            if self.used.contains(&candidate) {
                continue;
            }
            if *self.nodes >= self.budget {
                self.unwind(&assigned);
                return EmbedStep::OutOfBudget;
            }
            *self.nodes += 1;
            self.used.insert(candidate.clone());
            self.images[element] = Some(candidate.clone());
            match self.run() {
                EmbedStep::Exhausted => {
                    self.images[element] = None;
                    self.used.remove(&candidate);
                }
                other => {
                    self.images[element] = None;
                    self.used.remove(&candidate);
                    self.unwind(&assigned);
                    return other;
                }
            }
        }
        self.unwind(&assigned);
        EmbedStep::Exhausted
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedOracleError {
    #[error("oracle caps exceeded: carrier ≤ 3 and degree ≤ 3, got n={n}, degree={degree}")]
    CapExceeded { n: usize, degree: usize },
}

/// Enumerates all maps from the carrier into permutations of `degree`
/// points and filters them through [`check_embedding`]; the independent
/// completeness oracle for tiny instances.
pub fn embed_oracle(
    pg: &PartialGroup,
    degree: usize,
) -> Result<Vec<Embedding>, EmbedOracleError> {
    let n = pg.carrier_size();
    if n > 3 || degree > 3 || degree == 0 {
        return Err(EmbedOracleError::CapExceeded { n, degree });
    }
    let pool = Perm::all(degree);
    let mut out = Vec::new();
    let mut counters = vec![0usize; n];
    loop {
        let images: Vec<Perm> = counters.iter().map(|&c| pool[c].clone()).collect();
        let embedding = Embedding { degree, images };
        if check_embedding(pg, &embedding).is_ok() {
            out.push(embedding);
        }
        let mut digit = 0;
        loop {
            if digit == n {
                return Ok(out);
            }
            counters[digit] += 1;
            if counters[digit] < pool.len() {
                break;
            }
            counters[digit] = 0;
            digit += 1;
        }
    }
}
