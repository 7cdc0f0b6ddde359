//! Shared fixture generators for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use relred_core::algebra::FiniteAlgebra;
use relred_core::relations::{closure_generate, Complementation, Relation};
use relred_core::representation::Representation;
use relred_core::signature::{SigSymbol, Signature};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_relation(rng: &mut ChaCha8Rng, base: usize, density: f64) -> Relation {
    let mut pairs = Vec::new();
    for x in 0..base {
        for y in 0..base {
            if rng.gen_bool(density) {
                pairs.push((x, y));
            }
        }
    }
    Relation::from_pairs(base, &pairs).unwrap()
}

/// Signatures a closure-generated fixture may claim, from bare semigroup
/// up to the full signature.
pub fn signature_pool() -> Vec<Signature> {
    vec![
        Signature::compose_only(),
        Signature::lattice_ordered(),
        Signature::lattice_ordered().with(SigSymbol::ConstZero),
        Signature::compose_only()
            .with(SigSymbol::ConstE)
            .with(SigSymbol::ConstZero),
        Signature::ordered_complemented(),
        Signature::ordered_complemented()
            .with(SigSymbol::ConstE)
            .with(SigSymbol::ConstTop),
        Signature::boolean_monoid(),
        Signature::full(),
    ]
}

/// A faithful, fully-preserving representation: the identity map of a
/// closure-generated concrete algebra, randomly inflated.
pub struct GeneratedFixture {
    pub rep: Representation,
    pub inflated: Representation,
}

pub fn generate_fixture(rng: &mut ChaCha8Rng, cap: usize) -> Option<GeneratedFixture> {
    let base = rng.gen_range(1..=3);
    let generator_count = rng.gen_range(1..=2);
    let generators: Vec<Relation> = (0..generator_count)
        .map(|_| random_relation(rng, base, 0.4))
        .collect();
    let pool = signature_pool();
    let sig = pool[rng.gen_range(0..pool.len())].clone();
    let semantics = if rng.gen_bool(0.5) {
        Complementation::Universal
    } else {
        Complementation::Relative
    };
    let closed = closure_generate(&generators, &sig, semantics, cap).ok()?;
    let rep = closed.identity_representation();
    let fibers: Vec<usize> = (0..rep.base_size()).map(|_| rng.gen_range(1..=3)).collect();
    let inflated = rep.inflate(&fibers);
    Some(GeneratedFixture { rep, inflated })
}

/// All associative `n × n` compose tables (for exhaustive small sweeps).
pub fn all_associative_tables(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let cells = n * n;
    let total = n.pow(cells as u32);
    for code in 0..total {
        let mut table = Vec::with_capacity(cells);
        let mut c = code;
        for _ in 0..cells {
            table.push(c % n);
            c /= n;
        }
        if is_associative(&table, n) {
            out.push(table);
        }
    }
    out
}

pub fn is_associative(table: &[usize], n: usize) -> bool {
    let mul = |a: usize, b: usize| table[a * n + b];
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| mul(mul(a, b), c) == mul(a, mul(b, c)))))
}

pub fn is_semilattice(table: &[usize], n: usize) -> bool {
    let mul = |a: usize, b: usize| table[a * n + b];
    (0..n).all(|a| mul(a, a) == a)
        && (0..n).all(|a| (0..n).all(|b| mul(a, b) == mul(b, a)))
        && is_associative(table, n)
}

pub fn is_partial_order(matrix: &[bool], n: usize) -> bool {
    let le = |a: usize, b: usize| matrix[a * n + b];
    (0..n).all(|a| le(a, a))
        && (0..n).all(|a| (0..n).all(|b| a == b || !(le(a, b) && le(b, a))))
        && (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| !(le(a, b) && le(b, c)) || le(a, c)))
        })
}

/// A random algebra valid for the signature, built by rejection sampling
/// over the structural laws.
pub fn random_valid_algebra(
    rng: &mut ChaCha8Rng,
    n: usize,
    sig: &Signature,
) -> FiniteAlgebra {
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    loop {
        let compose: Vec<usize> = (0..n * n).map(|_| rng.gen_range(0..n)).collect();
        if !is_associative(&compose, n) {
            continue;
        }
        let mut builder = FiniteAlgebra::builder(names.clone(), compose);
        if sig.contains(SigSymbol::Meet) {
            let meet = loop {
                let t: Vec<usize> = (0..n * n).map(|_| rng.gen_range(0..n)).collect();
                if is_semilattice(&t, n) {
                    break t;
                }
            };
            builder = builder.meet(meet);
        }
        if sig.contains(SigSymbol::Order) {
            let order = loop {
                let mut m: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(0.4)).collect();
                for a in 0..n {
                    m[a * n + a] = true;
                }
                if is_partial_order(&m, n) {
                    break m;
                }
            };
            builder = builder.order(order);
        }
        let alg = builder.build().unwrap();
        if alg.validate(sig).unwrap().is_empty() {
            return alg;
        }
    }
}
