//! Concrete binary relations over a finite base set, and concrete
//! algebras of relations.
//!
//! A [`Relation`] is a square boolean matrix stored as one `u64` bitmask
//! per row, which keeps composition and the Boolean operations cheap and
//! caps the base size at 64 points — far beyond anything the bounded
//! searches explore. A [`ConcreteAlgebra`] is a finite list of relations
//! over a common base, closed under the operations of a signature, paired
//! with the abstract tables those operations induce.

use std::collections::HashMap;

use thiserror::Error;

use crate::algebra::{AlgebraBuilder, FiniteAlgebra};
use crate::signature::{SigSymbol, Signature};

/// Largest representable base (one `u64` mask per row).
pub const MAX_BASE: usize = 64;

/// Whether complements are taken within the full square of the base set
/// or within the union of all elements of the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Complementation {
    Relative,
    Universal,
}

impl std::fmt::Display for Complementation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Complementation::Relative => "relative",
            Complementation::Universal => "universal",
        })
    }
}

impl std::str::FromStr for Complementation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "relative" => Ok(Complementation::Relative),
            "universal" => Ok(Complementation::Universal),
            other => Err(format!(
                "unknown complementation `{other}` (expected `relative` or `universal`)"
            )),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("base size must be between 1 and {MAX_BASE}, got {0}")]
    BadBaseSize(usize),
    #[error("base sizes differ: {0} vs {1}")]
    BaseMismatch(usize, usize),
    #[error("pair ({0},{1}) is outside the base")]
    PairOutOfRange(usize, usize),
    #[error("relation is not contained in the complementation universe")]
    UniverseViolation,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("nothing to close over: no generators and no constants in the signature")]
    EmptyClosure,
}

/// A binary relation over base points `0..base_size`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    base: usize,
    rows: Vec<u64>,
}

fn row_mask(base: usize) -> u64 {
    if base >= 64 {
        !0
    } else {
        (1u64 << base) - 1
    }
}

impl Relation {
    fn check_base(base: usize) -> Result<(), RelationError> {
        if base == 0 || base > MAX_BASE {
            Err(RelationError::BadBaseSize(base))
        } else {
            Ok(())
        }
    }

    pub fn empty(base: usize) -> Relation {
        Self::check_base(base).expect("base size out of range");
        Relation {
            base,
            rows: vec![0; base],
        }
    }

    pub fn identity(base: usize) -> Relation {
        let mut r = Relation::empty(base);
        for x in 0..base {
            r.rows[x] |= 1 << x;
        }
        r
    }

    pub fn full(base: usize) -> Relation {
        let mut r = Relation::empty(base);
        let mask = row_mask(base);
        for row in &mut r.rows {
            *row = mask;
        }
        r
    }

    pub fn from_pairs(base: usize, pairs: &[(usize, usize)]) -> Result<Relation, RelationError> {
        Self::check_base(base)?;
        let mut r = Relation::empty(base);
        for &(x, y) in pairs {
            if x >= base || y >= base {
                return Err(RelationError::PairOutOfRange(x, y));
            }
            r.rows[x] |= 1 << y;
        }
        Ok(r)
    }

    pub fn base_size(&self) -> usize {
        self.base
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.base && y < self.base && self.rows[x] >> y & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&row| row == 0)
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|row| row.count_ones() as usize).sum()
    }

    /// Pairs in row-major order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.pair_count());
        for x in 0..self.base {
            let mut row = self.rows[x];
            while row != 0 {
                let y = row.trailing_zeros() as usize;
                out.push((x, y));
                row &= row - 1;
            }
        }
        out
    }

    fn same_base(&self, other: &Relation) -> Result<(), RelationError> {
        if self.base != other.base {
            Err(RelationError::BaseMismatch(self.base, other.base))
        } else {
            Ok(())
        }
    }

    /// Relational composition: `(x,y)` iff some `z` has `(x,z)` here and
    /// `(z,y)` in `other`.
    pub fn compose(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.same_base(other)?;
        let mut out = Relation::empty(self.base);
        for x in 0..self.base {
            let mut mids = self.rows[x];
            let mut acc = 0u64;
            while mids != 0 {
                let z = mids.trailing_zeros() as usize;
                acc |= other.rows[z];
                mids &= mids - 1;
            }
            out.rows[x] = acc;
        }
        Ok(out)
    }

    pub fn meet(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.same_base(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a & b)
            .collect();
        Ok(Relation {
            base: self.base,
            rows,
        })
    }

    pub fn join(&self, other: &Relation) -> Result<Relation, RelationError> {
        self.same_base(other)?;
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a | b)
            .collect();
        Ok(Relation {
            base: self.base,
            rows,
        })
    }

    /// Complement within `universe`; errors if `self ⊄ universe`.
    pub fn complement(&self, universe: &Relation) -> Result<Relation, RelationError> {
        self.same_base(universe)?;
        if !self.is_subset_of(universe) {
            return Err(RelationError::UniverseViolation);
        }
        let rows = self
            .rows
            .iter()
            .zip(&universe.rows)
            .map(|(a, u)| u & !a)
            .collect();
        Ok(Relation {
            base: self.base,
            rows,
        })
    }

    pub fn converse(&self) -> Relation {
        let mut out = Relation::empty(self.base);
        for x in 0..self.base {
            let mut row = self.rows[x];
            while row != 0 {
                let y = row.trailing_zeros() as usize;
                out.rows[y] |= 1 << x;
                row &= row - 1;
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &Relation) -> bool {
        self.base == other.base
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a & !b == 0)
    }

    /// `true` iff `r∘r̆ ⊆ id` and `r̆∘r ⊆ id`.
    pub fn is_injective_partial_function(&self) -> bool {
        let conv = self.converse();
        let id = Relation::identity(self.base);
        self.compose(&conv).unwrap().is_subset_of(&id)
            && conv.compose(self).unwrap().is_subset_of(&id)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.base).all(|x| self.contains(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.converse()
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).unwrap().is_subset_of(self)
    }

    /// Reflexive on all base points, symmetric and transitive.
    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// Symmetric, transitive, and reflexive at every point that occurs in
    /// the relation.
    pub fn is_equivalence_on_domain(&self) -> bool {
        if !self.is_symmetric() || !self.is_transitive() {
            return false;
        }
        self.pairs()
            .iter()
            .all(|&(x, y)| self.contains(x, x) && self.contains(y, y))
    }

    /// Every ordered pair over `points` is in the relation.
    pub fn acts_universally(&self, points: &[usize]) -> bool {
        points
            .iter()
            .all(|&x| points.iter().all(|&y| self.contains(x, y)))
    }

    /// Points with at least one outgoing pair, as a bitmask.
    pub fn domain_mask(&self) -> u64 {
        let mut mask = 0u64;
        for x in 0..self.base {
            if self.rows[x] != 0 {
                mask |= 1 << x;
            }
        }
        mask
    }

    /// Points with at least one incoming pair, as a bitmask.
    pub fn range_mask(&self) -> u64 {
        self.rows.iter().fold(0u64, |acc, row| acc | row)
    }

    /// Pairs related in both directions: `r ∩ r̆`.
    pub fn symmetric_interior(&self) -> Relation {
        self.meet(&self.converse()).unwrap()
    }
}

impl std::fmt::Debug for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Relation(base={}, {:?})", self.base, self.pairs())
    }
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (i, (x, y)) in self.pairs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({x},{y})")?;
        }
        f.write_str("}")
    }
}

/// A finite list of distinct relations over a common base, closed under
/// the operations of a signature, with the abstract tables they induce.
#[derive(Debug, Clone)]
pub struct ConcreteAlgebra {
    base: usize,
    relations: Vec<Relation>,
    semantics: Complementation,
    signature: Signature,
    algebra: FiniteAlgebra,
}

impl ConcreteAlgebra {
    pub fn base_size(&self) -> usize {
        self.base
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn semantics(&self) -> Complementation {
        self.semantics
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// The abstract tables computed from the relations by direct set
    /// computation.
    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn index_of(&self, r: &Relation) -> Option<usize> {
        self.relations.iter().position(|s| s == r)
    }

    /// Union of all member relations (the relative complementation
    /// universe).
    pub fn union_of_all(&self) -> Relation {
        let mut u = Relation::empty(self.base);
        for r in &self.relations {
            u = u.join(r).unwrap();
        }
        u
    }

    /// The identity map as a representation of the induced abstract
    /// algebra.
    pub fn identity_representation(&self) -> crate::representation::Representation {
        crate::representation::Representation::new(
            self.algebra.clone(),
            self.base,
            self.relations.clone(),
            self.signature.clone(),
            self.semantics,
        )
        .expect("a closed concrete algebra induces a well-formed representation")
    }

    /// Recomputes every table from the relation list and checks the list
    /// is closed; used to audit instances built by other routes.
    pub fn verify_closed(&self) -> Result<(), String> {
        let rebuilt = closure_generate(
            &self.relations,
            &self.signature,
            self.semantics,
            self.relations.len(),
        )
        .map_err(|e| e.to_string())?;
        if rebuilt.relations.len() != self.relations.len() {
            return Err(format!(
                "closure adds elements: {} -> {}",
                self.relations.len(),
                rebuilt.relations.len()
            ));
        }
        Ok(())
    }
}

/// Least set of relations containing `generators` (plus the constants the
/// signature requires) closed under the signature's operations, together
/// with the abstract tables computed by direct set computation.
///
/// Under relative complementation the universe is the union of all
/// elements, which grows with the closure; the construction iterates to a
/// simultaneous fixed point.
pub fn closure_generate(
    generators: &[Relation],
    sig: &Signature,
    semantics: Complementation,
    cap: usize,
) -> Result<ConcreteAlgebra, ClosureError> {
    let base = match generators.first() {
        Some(r) => r.base_size(),
        None => {
            // constants alone can seed a closure, but only over a known base
            return Err(ClosureError::EmptyClosure);
        }
    };
    for r in generators {
        if r.base_size() != base {
            return Err(ClosureError::Relation(RelationError::BaseMismatch(
                base,
                r.base_size(),
            )));
        }
    }

    let mut elems: Vec<Relation> = Vec::new();
    let mut index: HashMap<Relation, usize> = HashMap::new();
    let push = |elems: &mut Vec<Relation>,
                    index: &mut HashMap<Relation, usize>,
                    r: Relation|
     -> Result<(), ClosureError> {
        if !index.contains_key(&r) {
            if elems.len() == cap {
                return Err(ClosureError::CapExceeded(cap));
            }
            index.insert(r.clone(), elems.len());
            elems.push(r);
        }
        Ok(())
    };

    // constants first, then generators, then products in discovery order
    if sig.contains(SigSymbol::ConstZero) {
        push(&mut elems, &mut index, Relation::empty(base))?;
    }
    if sig.contains(SigSymbol::ConstE) {
        push(&mut elems, &mut index, Relation::identity(base))?;
    }
    if sig.contains(SigSymbol::ConstTop) && semantics == Complementation::Universal {
        push(&mut elems, &mut index, Relation::full(base))?;
    }
    for g in generators {
        push(&mut elems, &mut index, g.clone())?;
    }

    loop {
        // close under the binary operations, sweeping until nothing new
        // appears; universal complements can be taken inline because
        // their universe never moves
        let mut changed = true;
        while changed {
            let before = elems.len();
            let mut i = 0;
            while i < elems.len() {
                let mut j = 0;
                while j < elems.len() {
                    let r = elems[i].clone();
                    let s = elems[j].clone();
                    push(&mut elems, &mut index, r.compose(&s).unwrap())?;
                    if sig.contains(SigSymbol::Meet) {
                        push(&mut elems, &mut index, r.meet(&s).unwrap())?;
                    }
                    if sig.contains(SigSymbol::Join) {
                        push(&mut elems, &mut index, r.join(&s).unwrap())?;
                    }
                    j += 1;
                }
                if sig.contains(SigSymbol::Complement) && semantics == Complementation::Universal
                {
                    let r = elems[i].clone();
                    let c = r.complement(&Relation::full(base)).unwrap();
                    push(&mut elems, &mut index, c)?;
                }
                i += 1;
            }
            changed = elems.len() != before;
        }

        // under relative semantics the universe is the union of what now
        // exists; the top constant and the complements are re-derived
        // against it until nothing moves
        if semantics == Complementation::Relative {
            let mut u = Relation::empty(base);
            for r in &elems {
                u = u.join(r).unwrap();
            }
            let mut stable = true;
            if sig.contains(SigSymbol::ConstTop) && !index.contains_key(&u) {
                push(&mut elems, &mut index, u.clone())?;
                stable = false;
            }
            if sig.contains(SigSymbol::Complement) {
                for i in 0..elems.len() {
                    let c = elems[i].complement(&u).unwrap();
                    if !index.contains_key(&c) {
                        push(&mut elems, &mut index, c)?;
                        stable = false;
                    }
                }
            }
            if stable {
                break;
            }
        } else {
            break;
        }
    }

    if elems.is_empty() {
        return Err(ClosureError::EmptyClosure);
    }

    let algebra = tables_from_relations(&elems, &index, sig, semantics, base);
    Ok(ConcreteAlgebra {
        base,
        relations: elems,
        semantics,
        signature: sig.clone(),
        algebra,
    })
}

fn tables_from_relations(
    elems: &[Relation],
    index: &HashMap<Relation, usize>,
    sig: &Signature,
    semantics: Complementation,
    base: usize,
) -> FiniteAlgebra {
    let n = elems.len();
    let names: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    let idx = |r: &Relation| -> usize {
        *index
            .get(r)
            .expect("closure invariant: operation result is a member")
    };

    let mut compose = Vec::with_capacity(n * n);
    for a in elems {
        for b in elems {
            compose.push(idx(&a.compose(b).unwrap()));
        }
    }
    let mut builder = AlgebraBuilder::new(names, compose);

    if sig.contains(SigSymbol::Meet) {
        let mut t = Vec::with_capacity(n * n);
        for a in elems {
            for b in elems {
                t.push(idx(&a.meet(b).unwrap()));
            }
        }
        builder = builder.meet(t);
    }
    if sig.contains(SigSymbol::Join) {
        let mut t = Vec::with_capacity(n * n);
        for a in elems {
            for b in elems {
                t.push(idx(&a.join(b).unwrap()));
            }
        }
        builder = builder.join(t);
    }
    if sig.contains(SigSymbol::Complement) {
        let universe = match semantics {
            Complementation::Universal => Relation::full(base),
            Complementation::Relative => {
                let mut u = Relation::empty(base);
                for r in elems {
                    u = u.join(r).unwrap();
                }
                u
            }
        };
        let t = elems
            .iter()
            .map(|r| idx(&r.complement(&universe).unwrap()))
            .collect();
        builder = builder.complement(t);
    }
    if sig.contains(SigSymbol::Order) {
        let mut m = Vec::with_capacity(n * n);
        for a in elems {
            for b in elems {
                m.push(a.is_subset_of(b));
            }
        }
        builder = builder.order(m);
    }
    if sig.contains(SigSymbol::ConstE) {
        builder = builder.constant_e(idx(&Relation::identity(base)));
    }
    if sig.contains(SigSymbol::ConstZero) {
        builder = builder.constant_zero(idx(&Relation::empty(base)));
    }
    if sig.contains(SigSymbol::ConstTop) {
        let top = match semantics {
            Complementation::Universal => Relation::full(base),
            Complementation::Relative => {
                let mut u = Relation::empty(base);
                for r in elems {
                    u = u.join(r).unwrap();
                }
                u
            }
        };
        builder = builder.constant_top(idx(&top));
    }
    if sig.contains(SigSymbol::Complement) && sig.contains(SigSymbol::ConstE) {
        let universe = match semantics {
            Complementation::Universal => Relation::full(base),
            Complementation::Relative => {
                let mut u = Relation::empty(base);
                for r in elems {
                    u = u.join(r).unwrap();
                }
                u
            }
        };
        let div = Relation::identity(base).complement(&universe);
        if let Ok(div) = div {
            if let Some(&i) = index.get(&div) {
                builder = builder.designate("div", i);
            }
        }
    }

    builder
        .build()
        .expect("closure tables are well-formed by construction")
}
