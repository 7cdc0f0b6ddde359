//! Candidate representations: verification and the transformations that
//! repair them.
//!
//! A [`Representation`] maps every element of an abstract algebra to a
//! relation over a common base. [`Representation::verify`] checks each
//! claimed symbol pointwise and reports failures with witnesses. The
//! transformations are:
//!
//! - [`Representation::quotient`]: collapse base points wherever the image
//!   of `e` acts as the universal relation; preserves composition and
//!   faithfulness, and anything the input represented correctly.
//! - [`Representation::symmetric_interior`]: intersect every image with
//!   the symmetric interior of the image of `⊤`, after which `⊤` is
//!   symmetric and transitive.
//! - [`Representation::inflate`]: blow each base point up into a fiber;
//!   the test-oracle inverse of the quotient.
//! - [`Representation::injectivize`]: interior (on a finite base) then
//!   quotient, with machine-checked preconditions, producing a
//!   representation in which every i-element is an injective partial
//!   function and domain/range equivalence is concrete.

use thiserror::Error;

use crate::algebra::{AnalysisError, FiniteAlgebra};
use crate::relations::{Complementation, ConcreteAlgebra, Relation};
use crate::signature::{SigSymbol, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepresentationError {
    #[error("map has {got} relations but the algebra has {expected} elements")]
    WrongMapSize { expected: usize, got: usize },
    #[error("element {element} is mapped over base {got}, expected {expected}")]
    BaseMismatch {
        element: usize,
        expected: usize,
        got: usize,
    },
    #[error("claimed signature demands `{0}` but the algebra has no such table or constant")]
    MissingTable(SigSymbol),
}

/// One failed check, with enough of a witness to re-evaluate it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepFailure {
    /// `h(a·b) ≠ h(a)∘h(b)`.
    Compose { a: usize, b: usize },
    /// `h(a∧b) ≠ h(a)∩h(b)`.
    Meet { a: usize, b: usize },
    /// `h(a∨b) ≠ h(a)∪h(b)`.
    Join { a: usize, b: usize },
    /// `h(−a)` is not the complement of `h(a)` in the universe.
    Complement { a: usize },
    /// `a ≤ b` but `h(a) ⊄ h(b)`.
    OrderNotPreserved { a: usize, b: usize },
    /// `h(a) ⊆ h(b)` but not `a ≤ b`.
    OrderNotReflected { a: usize, b: usize },
    /// `h(e)` is not the identity relation.
    ConstE,
    /// `h(0)` is not the empty relation.
    ConstZero,
    /// `h(⊤)` is not the union of all images.
    ConstTop,
    /// Two elements share an image.
    NotFaithful { a: usize, b: usize },
    /// `h(⊤)` is not an equivalence relation on the points it covers.
    TopNotEquivalence,
    /// An i-element whose image is not an injective partial function.
    INotInjective { a: usize },
    /// `a·⊤ = b·⊤` disagrees with equality of concrete domains.
    DomEquivalence { a: usize, b: usize },
    /// `⊤·a = ⊤·b` disagrees with equality of concrete ranges.
    RanEquivalence { a: usize, b: usize },
}

impl RepFailure {
    /// Recomputes the failed check on the stored witness; `true` means
    /// the failure is reproduced against the representation.
    pub fn reevaluate(&self, rep: &Representation) -> bool {
        let alg = rep.algebra();
        match *self {
            RepFailure::Compose { a, b } => {
                *rep.image(alg.compose(a, b)) != rep.image(a).compose(rep.image(b)).unwrap()
            }
            RepFailure::Meet { a, b } => {
                *rep.image(alg.meet(a, b).unwrap()) != rep.image(a).meet(rep.image(b)).unwrap()
            }
            RepFailure::Join { a, b } => {
                *rep.image(alg.join(a, b).unwrap()) != rep.image(a).join(rep.image(b)).unwrap()
            }
            RepFailure::Complement { a } => {
                let universe = rep.complement_universe();
                match rep.image(a).complement(&universe) {
                    Ok(expected) => *rep.image(alg.complement(a).unwrap()) != expected,
                    Err(_) => true,
                }
            }
            RepFailure::OrderNotPreserved { a, b } => {
                alg.le(a, b).unwrap() && !rep.image(a).is_subset_of(rep.image(b))
            }
            RepFailure::OrderNotReflected { a, b } => {
                rep.image(a).is_subset_of(rep.image(b)) && !alg.le(a, b).unwrap()
            }
            RepFailure::ConstE => {
                *rep.image(alg.const_e().unwrap()) != Relation::identity(rep.base_size())
            }
            RepFailure::ConstZero => !rep.image(alg.const_zero().unwrap()).is_empty(),
            RepFailure::ConstTop => {
                *rep.image(alg.const_top().unwrap()) != rep.union_of_images()
            }
            RepFailure::NotFaithful { a, b } => rep.image(a) == rep.image(b),
            RepFailure::TopNotEquivalence => !rep
                .image(alg.const_top().unwrap())
                .is_equivalence_on_domain(),
            RepFailure::INotInjective { a } => !rep.image(a).is_injective_partial_function(),
            RepFailure::DomEquivalence { a, b } => {
                let top = alg.const_top().unwrap();
                (alg.compose(a, top) == alg.compose(b, top))
                    != (rep.image(a).domain_mask() == rep.image(b).domain_mask())
            }
            RepFailure::RanEquivalence { a, b } => {
                let top = alg.const_top().unwrap();
                (alg.compose(top, a) == alg.compose(top, b))
                    != (rep.image(a).range_mask() == rep.image(b).range_mask())
            }
        }
    }
}

impl std::fmt::Display for RepFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            RepFailure::Compose { a, b } => write!(f, "compose fails at ({a},{b})"),
            RepFailure::Meet { a, b } => write!(f, "meet fails at ({a},{b})"),
            RepFailure::Join { a, b } => write!(f, "join fails at ({a},{b})"),
            RepFailure::Complement { a } => write!(f, "complement fails at {a}"),
            RepFailure::OrderNotPreserved { a, b } => {
                write!(f, "{a} ≤ {b} but the images are not contained")
            }
            RepFailure::OrderNotReflected { a, b } => {
                write!(f, "images of {a} and {b} are contained but {a} ≰ {b}")
            }
            RepFailure::ConstE => write!(f, "e is not the identity relation"),
            RepFailure::ConstZero => write!(f, "zero is not the empty relation"),
            RepFailure::ConstTop => write!(f, "top is not the union of all images"),
            RepFailure::NotFaithful { a, b } => write!(f, "elements {a} and {b} share an image"),
            RepFailure::TopNotEquivalence => {
                write!(f, "top is not an equivalence relation on its field")
            }
            RepFailure::INotInjective { a } => {
                write!(f, "i-element {a} is not an injective partial function")
            }
            RepFailure::DomEquivalence { a, b } => {
                write!(f, "domain equivalence of ({a},{b}) is not reflected concretely")
            }
            RepFailure::RanEquivalence { a, b } => {
                write!(f, "range equivalence of ({a},{b}) is not reflected concretely")
            }
        }
    }
}

/// Which formula is used to compute the i-elements for preservation
/// checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IRoute {
    /// Meet route if the tables allow it, complement route otherwise.
    #[default]
    Auto,
    /// `(a·div) ∧ a = 0 = (div·a) ∧ a`.
    Meet,
    /// `a ≤ −(a·div)` and `a ≤ −(div·a)`.
    Complement,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Demand that `h(⊤)` be an equivalence relation on its field.
    pub require_top_equiv: bool,
    /// Check that every i-element maps to an injective partial function.
    pub check_i_preservation: bool,
    pub i_route: IRoute,
    /// Check that ⊟/⊡ agree with equality of concrete domains/ranges.
    pub check_domran_preservation: bool,
}

/// Outcome of verifying a representation; `failures` is empty iff every
/// requested check passed.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub failures: Vec<RepFailure>,
    /// `Some` when the algebra has a top constant.
    pub top_is_equivalence: Option<bool>,
    /// `Some` when i-preservation was requested and an i-route was
    /// available.
    pub i_preserved: Option<bool>,
    /// `Some` when ⊟/⊡ preservation was requested and a top constant is
    /// present.
    pub domran_preserved: Option<bool>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn faithful(&self) -> bool {
        !self
            .failures
            .iter()
            .any(|f| matches!(f, RepFailure::NotFaithful { .. }))
    }

    pub fn symbol_ok(&self, sym: SigSymbol) -> bool {
        !self.failures.iter().any(|f| {
            matches!(
                (sym, f),
                (SigSymbol::Compose, RepFailure::Compose { .. })
                    | (SigSymbol::Meet, RepFailure::Meet { .. })
                    | (SigSymbol::Join, RepFailure::Join { .. })
                    | (SigSymbol::Complement, RepFailure::Complement { .. })
                    | (SigSymbol::Order, RepFailure::OrderNotPreserved { .. })
                    | (SigSymbol::Order, RepFailure::OrderNotReflected { .. })
                    | (SigSymbol::ConstE, RepFailure::ConstE)
                    | (SigSymbol::ConstZero, RepFailure::ConstZero)
                    | (SigSymbol::ConstTop, RepFailure::ConstTop)
            )
        })
    }
}

/// A total map from algebra elements to relations over a common base.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    algebra: FiniteAlgebra,
    base: usize,
    map: Vec<Relation>,
    claimed: Signature,
    semantics: Complementation,
}

impl Representation {
    pub fn new(
        algebra: FiniteAlgebra,
        base: usize,
        map: Vec<Relation>,
        claimed: Signature,
        semantics: Complementation,
    ) -> Result<Self, RepresentationError> {
        if map.len() != algebra.n() {
            return Err(RepresentationError::WrongMapSize {
                expected: algebra.n(),
                got: map.len(),
            });
        }
        for (element, r) in map.iter().enumerate() {
            if r.base_size() != base {
                return Err(RepresentationError::BaseMismatch {
                    element,
                    expected: base,
                    got: r.base_size(),
                });
            }
        }
        for sym in claimed.symbols() {
            if !algebra.supports(sym) {
                return Err(RepresentationError::MissingTable(sym));
            }
        }
        Ok(Representation {
            algebra,
            base,
            map,
            claimed,
            semantics,
        })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn base_size(&self) -> usize {
        self.base
    }

    pub fn image(&self, a: usize) -> &Relation {
        &self.map[a]
    }

    pub fn images(&self) -> &[Relation] {
        &self.map
    }

    pub fn claimed_signature(&self) -> &Signature {
        &self.claimed
    }

    pub fn semantics(&self) -> Complementation {
        self.semantics
    }

    /// Union of all images: the relative complementation universe, and
    /// what a correctly represented `⊤` must equal.
    pub fn union_of_images(&self) -> Relation {
        let mut u = Relation::empty(self.base);
        for r in &self.map {
            u = u.join(r).unwrap();
        }
        u
    }

    fn complement_universe(&self) -> Relation {
        match self.semantics {
            Complementation::Universal => Relation::full(self.base),
            Complementation::Relative => self.union_of_images(),
        }
    }

    /// Verifies every symbol of the claimed signature plus faithfulness.
    pub fn verify(&self, options: &VerifyOptions) -> VerificationReport {
        let symbols: Vec<SigSymbol> = self.claimed.symbols().collect();
        self.verify_symbols(&symbols, options)
    }

    /// Verifies only the given symbols (plus faithfulness and whatever
    /// `options` requests). Symbols the algebra cannot back are skipped.
    pub fn verify_symbols(
        &self,
        symbols: &[SigSymbol],
        options: &VerifyOptions,
    ) -> VerificationReport {
        let alg = &self.algebra;
        let n = alg.n();
        let mut failures = Vec::new();

        for &sym in symbols {
            if !alg.supports(sym) {
                continue;
            }
            match sym {
                SigSymbol::Compose => {
                    for a in 0..n {
                        for b in 0..n {
                            let expected = self.map[a].compose(&self.map[b]).unwrap();
                            if *self.image(alg.compose(a, b)) != expected {
                                failures.push(RepFailure::Compose { a, b });
                            }
                        }
                    }
                }
                SigSymbol::Meet => {
                    for a in 0..n {
                        for b in 0..n {
                            let expected = self.map[a].meet(&self.map[b]).unwrap();
                            if *self.image(alg.meet(a, b).unwrap()) != expected {
                                failures.push(RepFailure::Meet { a, b });
                            }
                        }
                    }
                }
                SigSymbol::Join => {
                    for a in 0..n {
                        for b in 0..n {
                            let expected = self.map[a].join(&self.map[b]).unwrap();
                            if *self.image(alg.join(a, b).unwrap()) != expected {
                                failures.push(RepFailure::Join { a, b });
                            }
                        }
                    }
                }
                SigSymbol::Complement => {
                    let universe = self.complement_universe();
                    for a in 0..n {
                        let ok = match self.map[a].complement(&universe) {
                            Ok(expected) => *self.image(alg.complement(a).unwrap()) == expected,
                            Err(_) => false,
                        };
                        if !ok {
                            failures.push(RepFailure::Complement { a });
                        }
                    }
                }
                SigSymbol::Order => {
                    for a in 0..n {
                        for b in 0..n {
                            let abstract_le = alg.le(a, b).unwrap();
                            let concrete_le = self.map[a].is_subset_of(&self.map[b]);
                            if abstract_le && !concrete_le {
                                failures.push(RepFailure::OrderNotPreserved { a, b });
                            }
                            if concrete_le && !abstract_le {
                                failures.push(RepFailure::OrderNotReflected { a, b });
                            }
                        }
                    }
                }
                SigSymbol::ConstE => {
                    if *self.image(alg.const_e().unwrap()) != Relation::identity(self.base) {
                        failures.push(RepFailure::ConstE);
                    }
                }
                SigSymbol::ConstZero => {
                    if !self.image(alg.const_zero().unwrap()).is_empty() {
                        failures.push(RepFailure::ConstZero);
                    }
                }
                SigSymbol::ConstTop => {
                    if *self.image(alg.const_top().unwrap()) != self.union_of_images() {
                        failures.push(RepFailure::ConstTop);
                    }
                }
            }
        }

        for a in 0..n {
            for b in a + 1..n {
                if self.map[a] == self.map[b] {
                    failures.push(RepFailure::NotFaithful { a, b });
                }
            }
        }

        let top_is_equivalence = alg
            .const_top()
            .ok()
            .map(|top| self.image(top).is_equivalence_on_domain());
        if options.require_top_equiv && top_is_equivalence == Some(false) {
            failures.push(RepFailure::TopNotEquivalence);
        }

        let i_preserved = if options.check_i_preservation {
            self.i_elements_for_route(options.i_route).map(|elements| {
                let mut ok = true;
                for a in elements {
                    if !self.image(a).is_injective_partial_function() {
                        failures.push(RepFailure::INotInjective { a });
                        ok = false;
                    }
                }
                ok
            })
        } else {
            None
        };

        let domran_preserved = if options.check_domran_preservation {
            match alg.const_top() {
                Ok(top) => {
                    let mut ok = true;
                    for a in 0..n {
                        for b in a + 1..n {
                            let dom_eq = alg.compose(a, top) == alg.compose(b, top);
                            let concrete_dom_eq =
                                self.map[a].domain_mask() == self.map[b].domain_mask();
                            if dom_eq != concrete_dom_eq {
                                failures.push(RepFailure::DomEquivalence { a, b });
                                ok = false;
                            }
                            let ran_eq = alg.compose(top, a) == alg.compose(top, b);
                            let concrete_ran_eq =
                                self.map[a].range_mask() == self.map[b].range_mask();
                            if ran_eq != concrete_ran_eq {
                                failures.push(RepFailure::RanEquivalence { a, b });
                                ok = false;
                            }
                        }
                    }
                    Some(ok)
                }
                Err(_) => None,
            }
        } else {
            None
        };

        VerificationReport {
            failures,
            top_is_equivalence,
            i_preserved,
            domran_preserved,
        }
    }

    fn i_elements_for_route(&self, route: IRoute) -> Option<Vec<usize>> {
        match route {
            IRoute::Meet => self.algebra.i_elements_via_meet().ok(),
            IRoute::Complement => self.algebra.i_elements_via_complement().ok(),
            IRoute::Auto => self
                .algebra
                .i_elements_via_meet()
                .or_else(|_| self.algebra.i_elements_via_complement())
                .ok(),
        }
    }

    fn compose_preservation_witness(&self) -> Option<(usize, usize)> {
        let n = self.algebra.n();
        for a in 0..n {
            for b in 0..n {
                let expected = self.map[a].compose(&self.map[b]).unwrap();
                if *self.image(self.algebra.compose(a, b)) != expected {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// The classes of `∼` (collapse wherever `h(e)` acts universally),
    /// each sorted, listed by smallest member.
    pub fn quotient_classes(&self) -> Result<Vec<Vec<usize>>, QuotientError> {
        let e = self
            .algebra
            .const_e()
            .map_err(|_| QuotientError::MissingIdentityConstant)?;
        if let Some((a, b)) = self.compose_preservation_witness() {
            return Err(QuotientError::NotCompositionPreserving { a, b });
        }
        let he = self.image(e);
        let mut related = Relation::identity(self.base);
        for x in 0..self.base {
            for y in 0..self.base {
                if x != y && he.acts_universally(&[x, y]) {
                    related = related
                        .join(&Relation::from_pairs(self.base, &[(x, y)]).unwrap())
                        .unwrap();
                }
            }
        }
        // ∼ must already be transitive; close it and demand nothing new
        // appeared, rather than silently relying on the composition
        // argument.
        let mut closure = related.clone();
        loop {
            let next = closure.compose(&closure).unwrap().join(&closure).unwrap();
            if next == closure {
                break;
            }
            closure = next;
        }
        if closure != related {
            let gap = closure
                .pairs()
                .into_iter()
                .find(|&(x, y)| !related.contains(x, y))
                .unwrap();
            return Err(QuotientError::EquivalenceClosureGap { x: gap.0, y: gap.1 });
        }

        let mut class_of = vec![usize::MAX; self.base];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.base {
            if class_of[x] != usize::MAX {
                continue;
            }
            let members: Vec<usize> = (x..self.base).filter(|&y| related.contains(x, y)).collect();
            for &y in &members {
                class_of[y] = classes.len();
            }
            classes.push(members);
        }
        Ok(classes)
    }

    /// The quotient representation ĥ over the `∼`-classes.
    pub fn quotient(&self) -> Result<Representation, QuotientError> {
        Ok(self.quotient_with_classes()?.0)
    }

    pub fn quotient_with_classes(
        &self,
    ) -> Result<(Representation, Vec<Vec<usize>>), QuotientError> {
        let classes = self.quotient_classes()?;
        let mut class_of = vec![0usize; self.base];
        for (ci, class) in classes.iter().enumerate() {
            for &x in class {
                class_of[x] = ci;
            }
        }
        let new_base = classes.len();
        let map = self
            .map
            .iter()
            .map(|r| {
                let pairs: Vec<(usize, usize)> = r
                    .pairs()
                    .into_iter()
                    .map(|(x, y)| (class_of[x], class_of[y]))
                    .collect();
                Relation::from_pairs(new_base, &pairs).unwrap()
            })
            .collect();
        let rep = Representation::new(
            self.algebra.clone(),
            new_base,
            map,
            self.claimed.clone(),
            self.semantics,
        )
        .expect("quotient preserves well-formedness");
        Ok((rep, classes))
    }

    /// Intersects every image with the symmetric interior of `h(⊤)`.
    ///
    /// Meaningful when the claimed signature contains composition and
    /// either meet or order; the result then represents `⊤` as a
    /// symmetric, transitive relation.
    pub fn symmetric_interior(&self) -> Result<Representation, InteriorError> {
        let top = self
            .algebra
            .const_top()
            .map_err(|_| InteriorError::MissingTop)?;
        let interior = self.image(top).symmetric_interior();
        let map = self
            .map
            .iter()
            .map(|r| r.meet(&interior).unwrap())
            .collect();
        Ok(Representation::new(
            self.algebra.clone(),
            self.base,
            map,
            self.claimed.clone(),
            self.semantics,
        )
        .expect("interior preserves well-formedness"))
    }

    /// Replaces each base point `x` by `fibers[x]` copies; two new points
    /// are related iff their projections are.
    ///
    /// Panics if `fibers` has the wrong length, contains a zero, or the
    /// inflated base exceeds the relation size cap.
    pub fn inflate(&self, fibers: &[usize]) -> Representation {
        assert_eq!(fibers.len(), self.base, "one fiber size per base point");
        assert!(fibers.iter().all(|&f| f >= 1), "fibers must be nonempty");
        let new_base: usize = fibers.iter().sum();
        let mut projection = Vec::with_capacity(new_base);
        for (x, &size) in fibers.iter().enumerate() {
            for _ in 0..size {
                projection.push(x);
            }
        }
        let map = self
            .map
            .iter()
            .map(|r| {
                let mut pairs = Vec::new();
                for (u, &pu) in projection.iter().enumerate() {
                    for (v, &pv) in projection.iter().enumerate() {
                        if r.contains(pu, pv) {
                            pairs.push((u, v));
                        }
                    }
                }
                Relation::from_pairs(new_base, &pairs).unwrap()
            })
            .collect();
        Representation::new(
            self.algebra.clone(),
            new_base,
            map,
            self.claimed.clone(),
            self.semantics,
        )
        .expect("inflation preserves well-formedness")
    }

    /// Interior (on a finite base) followed by quotient, with the
    /// hypotheses of the underlying lemmas checked up front and the
    /// i-relation and ⊟/⊡ checks run on the result.
    pub fn injectivize(&self, options: &PipelineOptions) -> Result<PipelineReport, PipelineError> {
        let route = match options.route {
            Some(route) => {
                if !route.symbols().iter().all(|&s| self.claimed.contains(s)) {
                    return Err(PipelineError::Precondition(
                        PipelinePrecondition::SignatureInsufficient,
                    ));
                }
                route
            }
            None => {
                if self.claimed.contains(SigSymbol::Meet) && self.claimed.contains(SigSymbol::Join)
                {
                    PipelineRoute::LatticeOrdered
                } else if self.claimed.contains(SigSymbol::Order)
                    && self.claimed.contains(SigSymbol::Complement)
                {
                    PipelineRoute::OrderedComplemented
                } else {
                    return Err(PipelineError::Precondition(
                        PipelinePrecondition::SignatureInsufficient,
                    ));
                }
            }
        };

        // hypotheses: the input preserves the route operations and is
        // faithful
        let route_syms = route.symbols();
        let input_report = self.verify_symbols(&route_syms, &VerifyOptions::default());
        for &sym in &route_syms {
            if !input_report.symbol_ok(sym) {
                return Err(PipelineError::Precondition(
                    PipelinePrecondition::NotPreserving(sym),
                ));
            }
        }
        if !input_report.faithful() {
            return Err(PipelineError::Precondition(PipelinePrecondition::NotFaithful));
        }

        // hypotheses: designated elements and normality of the monoid
        for (name, present) in [
            ("e", self.algebra.const_e().is_ok()),
            ("zero", self.algebra.const_zero().is_ok()),
            ("top", self.algebra.const_top().is_ok()),
            ("div", self.algebra.div().is_ok()),
        ] {
            if !present {
                return Err(PipelineError::Precondition(
                    PipelinePrecondition::MissingDesignation(name),
                ));
            }
        }
        let normality = self
            .algebra
            .normality()
            .map_err(PipelinePrecondition::from_analysis)
            .map_err(PipelineError::Precondition)?;
        if !normality.is_normal() {
            return Err(PipelineError::Precondition(PipelinePrecondition::NotNormal {
                witness: normality.failures[0].0,
            }));
        }
        let i_route = match route {
            PipelineRoute::LatticeOrdered => IRoute::Meet,
            PipelineRoute::OrderedComplemented => IRoute::Complement,
        };
        let i_elements = match i_route {
            IRoute::Meet => self.algebra.i_elements_via_meet(),
            _ => self.algebra.i_elements_via_complement(),
        }
        .map_err(PipelinePrecondition::from_analysis)
        .map_err(PipelineError::Precondition)?;

        let mut stages = vec![PipelineStage {
            name: "input",
            report: input_report,
        }];

        let top = self.algebra.const_top().unwrap();
        let current = if options.finite_base {
            let interior = self.symmetric_interior().expect("top presence checked");
            let report = interior.verify_symbols(
                &route_syms,
                &VerifyOptions {
                    require_top_equiv: true,
                    ..VerifyOptions::default()
                },
            );
            stages.push(PipelineStage {
                name: "interior",
                report,
            });
            interior
        } else {
            if !self.image(top).is_equivalence_on_domain() {
                return Err(PipelineError::Precondition(
                    PipelinePrecondition::TopNotEquivalence,
                ));
            }
            self.clone()
        };

        let final_rep = current.quotient()?;
        let final_report = final_rep.verify_symbols(
            &[SigSymbol::Compose],
            &VerifyOptions {
                require_top_equiv: true,
                check_i_preservation: true,
                i_route,
                check_domran_preservation: true,
            },
        );
        if final_rep.image(top).is_empty() {
            return Err(PipelineError::EmptyFinalBase);
        }
        stages.push(PipelineStage {
            name: "quotient",
            report: final_report,
        });

        Ok(PipelineReport {
            route,
            i_elements,
            stages,
            result: final_rep,
        })
    }

    /// A base point fixed by `h(f)` but not by `h(0)`, located by chasing
    /// composition witnesses of `f = f·f` until a point repeats.
    pub fn find_idempotent_fixed_point(&self, f: usize) -> Result<usize, FixedPointError> {
        let alg = &self.algebra;
        if alg.compose(f, f) != f {
            return Err(FixedPointError::NotIdempotent(f));
        }
        let zero = alg
            .const_zero()
            .map_err(|_| FixedPointError::MissingZero)?;
        let hf = self.image(f);
        let hz = self.image(zero);
        if hf == hz {
            return Err(FixedPointError::NoDistinction(f));
        }
        let start = hf
            .pairs()
            .into_iter()
            .find(|&(x, y)| !hz.contains(x, y))
            .ok_or(FixedPointError::NoDistinction(f))?;

        let (mut x, y) = start;
        let mut seen = vec![false; self.base];
        loop {
            if seen[x] {
                // a cycle of h(f)-edges has closed at x; h(f)∘h(f) = h(f)
                // makes it a loop
                if hf.contains(x, x) && !hz.contains(x, x) {
                    return Ok(x);
                }
                break;
            }
            seen[x] = true;
            let witness = (0..self.base).find(|&z| hf.contains(x, z) && hf.contains(z, y));
            match witness {
                Some(z) => x = z,
                None => break,
            }
        }
        // the chase only fails when the preconditions do; fall back to a
        // direct scan so close-but-invalid inputs still get an answer if
        // one exists
        (0..self.base)
            .find(|&p| hf.contains(p, p) && !hz.contains(p, p))
            .ok_or(FixedPointError::NoFixedPoint(f))
    }
}

/// For every idempotent `f` of a universal-semantics concrete algebra
/// whose complement is idempotent and absorbed by composition on both
/// sides, `f` must be the full square; returns the indices of any
/// counterexamples (expected none).
pub fn check_strong_complement(
    alg: &ConcreteAlgebra,
) -> Result<Vec<usize>, StrongComplementError> {
    if alg.semantics() != Complementation::Universal {
        return Err(StrongComplementError::WrongSemantics);
    }
    let full = Relation::full(alg.base_size());
    let mut violations = Vec::new();
    for (i, f) in alg.relations().iter().enumerate() {
        let nf = f.complement(&full).unwrap();
        if alg.index_of(&nf).is_none() {
            return Err(StrongComplementError::NotComplementClosed { element: i });
        }
        let f_idempotent = f.compose(f).unwrap() == *f;
        let nf_idempotent = nf.compose(&nf).unwrap() == nf;
        let absorbed = f.compose(&nf).unwrap() == nf && nf.compose(f).unwrap() == nf;
        if f_idempotent && nf_idempotent && absorbed && *f != full {
            violations.push(i);
        }
    }
    Ok(violations)
}

/// Searches for a base bijection carrying every image of `a` onto the
/// corresponding image of `b`; brute force over permutations, intended
/// for desk-scale comparisons.
pub fn find_base_bijection(a: &Representation, b: &Representation) -> Option<Vec<usize>> {
    if a.base_size() != b.base_size() || a.images().len() != b.images().len() {
        return None;
    }
    let base = a.base_size();
    let mut perm: Vec<usize> = (0..base).collect();
    fn permute(r: &Relation, perm: &[usize]) -> Relation {
        let pairs: Vec<(usize, usize)> = r
            .pairs()
            .into_iter()
            .map(|(x, y)| (perm[x], perm[y]))
            .collect();
        Relation::from_pairs(r.base_size(), &pairs).unwrap()
    }
    fn search(
        k: usize,
        perm: &mut Vec<usize>,
        a: &Representation,
        b: &Representation,
    ) -> bool {
        let base = perm.len();
        if k == base {
            return a
                .images()
                .iter()
                .zip(b.images())
                .all(|(ra, rb)| permute(ra, perm) == *rb);
        }
        for i in k..base {
            perm.swap(k, i);
            if search(k + 1, perm, a, b) {
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    if search(0, &mut perm, a, b) {
        Some(perm)
    } else {
        None
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("the algebra does not designate an identity constant")]
    MissingIdentityConstant,
    #[error("input does not preserve composition, witness ({a},{b})")]
    NotCompositionPreserving { a: usize, b: usize },
    #[error("collapsing relation is not transitive as given: ({x},{y}) appears only in the closure")]
    EquivalenceClosureGap { x: usize, y: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InteriorError {
    #[error("the algebra does not designate a top constant")]
    MissingTop,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixedPointError {
    #[error("element {0} is not idempotent")]
    NotIdempotent(usize),
    #[error("the algebra does not designate a zero constant")]
    MissingZero,
    #[error("h({0}) equals h(0); nothing to distinguish")]
    NoDistinction(usize),
    #[error("no base point is fixed by h({0}) and free of h(0); preconditions violated")]
    NoFixedPoint(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrongComplementError {
    #[error("strong-complement check applies to universal semantics only")]
    WrongSemantics,
    #[error("algebra is not closed under universal complement at element {element}")]
    NotComplementClosed { element: usize },
}

/// Which reduct's hypotheses the pipeline runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineRoute {
    LatticeOrdered,
    OrderedComplemented,
}

impl PipelineRoute {
    pub fn symbols(self) -> Vec<SigSymbol> {
        match self {
            PipelineRoute::LatticeOrdered => {
                vec![SigSymbol::Compose, SigSymbol::Meet, SigSymbol::Join]
            }
            PipelineRoute::OrderedComplemented => vec![
                SigSymbol::Compose,
                SigSymbol::Order,
                SigSymbol::Complement,
            ],
        }
    }
}

impl std::fmt::Display for PipelineRoute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PipelineRoute::LatticeOrdered => "lattice-ordered",
            PipelineRoute::OrderedComplemented => "ordered-complemented",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    /// Apply the symmetric interior (valid over a finite base); when
    /// false, demand that `h(⊤)` already be an equivalence relation.
    pub finite_base: bool,
    /// Force a route instead of inferring one from the claimed signature.
    pub route: Option<PipelineRoute>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            finite_base: true,
            route: None,
        }
    }
}

/// The first pipeline hypothesis that failed.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelinePrecondition {
    #[error("claimed signature contains neither {{·,∧,∨}} nor {{·,≤,−}}")]
    SignatureInsufficient,
    #[error("input does not preserve `{0}`")]
    NotPreserving(SigSymbol),
    #[error("input is not faithful")]
    NotFaithful,
    #[error("algebra does not designate `{0}`")]
    MissingDesignation(&'static str),
    #[error("algebra table for `{0}` is missing")]
    MissingTable(SigSymbol),
    #[error("algebra is not normal, witness element {witness}")]
    NotNormal { witness: usize },
    #[error("h(⊤) is not an equivalence relation and interior was disabled")]
    TopNotEquivalence,
}

impl PipelinePrecondition {
    fn from_analysis(err: AnalysisError) -> Self {
        match err {
            AnalysisError::MissingSymbol(sym) => PipelinePrecondition::MissingTable(sym),
            AnalysisError::MissingDesignation(name) => {
                PipelinePrecondition::MissingDesignation(name)
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("precondition failed: {0}")]
    Precondition(PipelinePrecondition),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("final top is empty: the representation lives on an empty effective base")]
    EmptyFinalBase,
}

#[derive(Debug, Clone)]
pub struct PipelineStage {
    pub name: &'static str,
    pub report: VerificationReport,
}

/// Everything the pipeline produced: the route, the stage-by-stage
/// verification trail, the i-elements checked, and the final
/// representation.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub route: PipelineRoute,
    pub i_elements: Vec<usize>,
    pub stages: Vec<PipelineStage>,
    pub result: Representation,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.report.passed())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::closure_generate;

    fn rel(base: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::from_pairs(base, pairs).unwrap()
    }

    fn four_element_rep() -> Representation {
        closure_generate(
            &[Relation::identity(2)],
            &Signature::full(),
            Complementation::Universal,
            16,
        )
        .unwrap()
        .identity_representation()
    }

    #[test]
    fn identity_representation_verifies() {
        let rep = four_element_rep();
        let report = rep.verify(&VerifyOptions {
            require_top_equiv: true,
            check_i_preservation: true,
            check_domran_preservation: true,
            ..VerifyOptions::default()
        });
        assert!(report.passed(), "failures: {:?}", report.failures);
        assert_eq!(report.top_is_equivalence, Some(true));
        assert_eq!(report.i_preserved, Some(true));
        assert_eq!(report.domran_preserved, Some(true));
    }

    #[test]
    fn collision_is_reported_with_the_pair() {
        let rep = four_element_rep();
        let mut map = rep.images().to_vec();
        map[1] = map[0].clone();
        let broken = Representation::new(
            rep.algebra().clone(),
            rep.base_size(),
            map,
            rep.claimed_signature().clone(),
            rep.semantics(),
        )
        .unwrap();
        let report = broken.verify(&VerifyOptions::default());
        assert!(report
            .failures
            .iter()
            .any(|f| *f == RepFailure::NotFaithful { a: 0, b: 1 }));
        assert!(!report.faithful());
        for f in &report.failures {
            assert!(f.reevaluate(&broken), "witness does not reproduce: {f}");
        }
    }

    #[test]
    fn compose_violation_carries_witness() {
        let rep = four_element_rep();
        let alg = rep.algebra().clone();
        let e = alg.const_e().unwrap();
        let top = alg.const_top().unwrap();
        let mut map = rep.images().to_vec();
        // remap e to the full square: e·e = e now fails concretely
        map[e] = Relation::full(2);
        map[top] = rel(2, &[(0, 1), (1, 0)]);
        let broken = Representation::new(
            alg,
            2,
            map,
            Signature::compose_only(),
            Complementation::Universal,
        )
        .unwrap();
        let report = broken.verify(&VerifyOptions::default());
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, RepFailure::Compose { .. })));
        for f in &report.failures {
            assert!(f.reevaluate(&broken), "witness does not reproduce: {f}");
        }
    }

    #[test]
    fn quotient_of_identity_e_is_isomorphic() {
        let rep = four_element_rep();
        let (q, classes) = rep.quotient_with_classes().unwrap();
        assert_eq!(classes, vec![vec![0], vec![1]]);
        assert!(find_base_bijection(&rep, &q).is_some());
    }

    #[test]
    fn quotient_collapses_e_universal_blocks() {
        // base {0,1,2}: e universal on {0,1}, loop at 2
        let alg = FiniteAlgebra::builder(vec!["e".into()], vec![0])
            .constant_e(0)
            .build()
            .unwrap();
        let he = rel(3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)]);
        let rep = Representation::new(
            alg,
            3,
            vec![he],
            Signature::compose_only().with(SigSymbol::ConstE),
            Complementation::Universal,
        )
        .unwrap();
        let classes = rep.quotient_classes().unwrap();
        assert_eq!(classes, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn quotient_requires_composition_preservation() {
        let alg = FiniteAlgebra::builder(vec!["e".into()], vec![0])
            .constant_e(0)
            .build()
            .unwrap();
        // e·e = e abstractly, but h(e)∘h(e) ≠ h(e)
        let he = rel(2, &[(0, 1)]);
        let rep = Representation::new(
            alg,
            2,
            vec![he],
            Signature::compose_only().with(SigSymbol::ConstE),
            Complementation::Universal,
        )
        .unwrap();
        assert!(matches!(
            rep.quotient(),
            Err(QuotientError::NotCompositionPreserving { .. })
        ));
    }

    #[test]
    fn interior_examples() {
        let rep = four_element_rep();
        // top already an equivalence: interior is a fixed point
        let interior = rep.symmetric_interior().unwrap();
        assert_eq!(interior.images(), rep.images());

        let r = rel(2, &[(0, 1), (0, 0), (1, 1)]);
        assert_eq!(r.symmetric_interior(), rel(2, &[(0, 0), (1, 1)]));
        assert_eq!(
            rel(2, &[(0, 1)])
                .meet(&r.symmetric_interior())
                .unwrap(),
            Relation::empty(2)
        );
    }

    #[test]
    fn inflate_then_quotient_restores_the_original() {
        let rep = four_element_rep();
        let inflated = rep.inflate(&[2, 1]);
        assert_eq!(inflated.base_size(), 3);
        let e = rep.algebra().const_e().unwrap();
        assert!(inflated.image(e).acts_universally(&[0, 1]));
        let q = inflated.quotient().unwrap();
        assert!(find_base_bijection(&q, &rep).is_some());
    }

    #[test]
    fn singleton_fibers_give_an_isomorphic_copy() {
        let rep = four_element_rep();
        let same = rep.inflate(&[1, 1]);
        assert!(find_base_bijection(&rep, &same).is_some());
    }

    #[test]
    fn pipeline_rejects_non_normal_algebras() {
        let rep = four_element_rep();
        // break normality: replace meet table so dom(a)·a ≠ a somewhere
        let alg = rep.algebra().clone();
        let n = alg.n();
        let zero = alg.const_zero().unwrap();
        let meet = vec![zero; n * n];
        let broken = FiniteAlgebra::builder(alg.names().to_vec(), alg.compose_table().to_vec())
            .meet(meet)
            .join(alg.join_table().unwrap().to_vec())
            .complement(alg.complement_table().unwrap().to_vec())
            .order(alg.order_matrix().unwrap().to_vec())
            .constant_e(alg.const_e().unwrap())
            .constant_zero(zero)
            .constant_top(alg.const_top().unwrap())
            .designate("div", alg.div().unwrap())
            .build()
            .unwrap();
        // claiming the ordered-complemented route keeps order and
        // complement intact, so normality is the first hypothesis to fail
        let rep = Representation::new(
            broken,
            rep.base_size(),
            rep.images().to_vec(),
            Signature::ordered_complemented(),
            Complementation::Universal,
        )
        .unwrap();
        match rep.injectivize(&PipelineOptions::default()) {
            Err(PipelineError::Precondition(PipelinePrecondition::NotNormal { .. })) => {}
            other => panic!("expected the normality precondition to fail, got {other:?}"),
        }
    }

    #[test]
    fn fixed_point_examples() {
        // h(f) = identity, h(0) = ∅
        let alg = FiniteAlgebra::builder(vec!["zero".into(), "f".into()], vec![0, 0, 0, 1])
            .constant_zero(0)
            .build()
            .unwrap();
        let rep = Representation::new(
            alg.clone(),
            2,
            vec![Relation::empty(2), Relation::identity(2)],
            Signature::compose_only().with(SigSymbol::ConstZero),
            Complementation::Universal,
        )
        .unwrap();
        assert_eq!(rep.find_idempotent_fixed_point(1), Ok(0));

        // h(f) = {(0,1),(1,1)}
        let rep = Representation::new(
            alg.clone(),
            2,
            vec![Relation::empty(2), rel(2, &[(0, 1), (1, 1)])],
            Signature::compose_only().with(SigSymbol::ConstZero),
            Complementation::Universal,
        )
        .unwrap();
        assert_eq!(rep.find_idempotent_fixed_point(1), Ok(1));

        // h(f) = h(0)
        let rep = Representation::new(
            alg,
            2,
            vec![Relation::empty(2), Relation::empty(2)],
            Signature::compose_only().with(SigSymbol::ConstZero),
            Complementation::Universal,
        )
        .unwrap();
        assert_eq!(
            rep.find_idempotent_fixed_point(1),
            Err(FixedPointError::NoDistinction(1))
        );
    }

    #[test]
    fn strong_complement_examples() {
        let alg = closure_generate(
            &[Relation::full(2)],
            &Signature::compose_only().with(SigSymbol::Complement),
            Complementation::Universal,
            16,
        )
        .unwrap();
        assert_eq!(check_strong_complement(&alg), Ok(vec![]));

        let alg = closure_generate(
            &[rel(2, &[(0, 0)])],
            &Signature::compose_only().with(SigSymbol::Complement),
            Complementation::Universal,
            16,
        )
        .unwrap();
        assert_eq!(check_strong_complement(&alg), Ok(vec![]));

        let relative = closure_generate(
            &[rel(2, &[(0, 0)])],
            &Signature::compose_only().with(SigSymbol::Complement),
            Complementation::Relative,
            16,
        )
        .unwrap();
        assert_eq!(
            check_strong_complement(&relative),
            Err(StrongComplementError::WrongSemantics)
        );
    }
}
