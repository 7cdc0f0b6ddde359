//! Standard instances: full algebras of relations and small groups.

use crate::partial_group::GroupTable;
use crate::relations::{closure_generate, Complementation, ConcreteAlgebra, Relation};
use crate::signature::Signature;

/// Every relation over `base` points, ordered by their pair bitmask.
pub fn all_relations(base: usize) -> Vec<Relation> {
    let bits = base * base;
    assert!(bits <= 20, "enumeration of 2^{bits} relations is not desk scale");
    (0..1u64 << bits)
        .map(|mask| {
            let pairs: Vec<(usize, usize)> = (0..bits)
                .filter(|p| mask >> p & 1 == 1)
                .map(|p| (p / base, p % base))
                .collect();
            Relation::from_pairs(base, &pairs).unwrap()
        })
        .collect()
}

/// The algebra of all `2^(base²)` relations over `base` points in the
/// full signature with universal complementation.
pub fn full_relation_algebra(base: usize) -> ConcreteAlgebra {
    let generators = all_relations(base);
    let cap = generators.len();
    closure_generate(
        &generators,
        &Signature::full(),
        Complementation::Universal,
        cap,
    )
    .expect("the set of all relations is closed")
}

/// Cyclic group of order `n` on `{0..n}` with addition mod `n`.
pub fn cyclic_group(n: usize) -> GroupTable {
    let mut table = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            table.push((a + b) % n);
        }
    }
    GroupTable::new(n, table).expect("cyclic tables are groups")
}

/// The Klein four-group as bitwise xor on `{0,1,2,3}`.
pub fn klein_four() -> GroupTable {
    let mut table = Vec::with_capacity(16);
    for a in 0..4usize {
        for b in 0..4usize {
            table.push(a ^ b);
        }
    }
    GroupTable::new(4, table).expect("xor on four elements is a group")
}

/// The symmetric group on three points, elements in the order produced
/// by [`crate::partial_group::Perm::all`].
pub fn symmetric_group_3() -> GroupTable {
    let perms = crate::partial_group::Perm::all(3);
    let mut table = Vec::with_capacity(36);
    for p in &perms {
        for q in &perms {
            let r = p.compose(q);
            table.push(perms.iter().position(|s| *s == r).unwrap());
        }
    }
    GroupTable::new(6, table).expect("S3 is a group")
}

/// Every group of order at most 6, up to isomorphism, with a short label.
pub fn groups_up_to_order_6() -> Vec<(&'static str, GroupTable)> {
    vec![
        ("C1", cyclic_group(1)),
        ("C2", cyclic_group(2)),
        ("C3", cyclic_group(3)),
        ("C4", cyclic_group(4)),
        ("V4", klein_four()),
        ("C5", cyclic_group(5)),
        ("C6", cyclic_group(6)),
        ("S3", symmetric_group_3()),
    ]
}
