//! Abstract finite algebras in reduct signatures.
//!
//! A [`FiniteAlgebra`] stores operation tables over element indices
//! `0..n`, an optional order matrix, optional constants, and designated
//! elements (notably `div`, the diversity element). Validation checks the
//! structural laws for the symbols of a signature and reports violations
//! with witnesses; representability-necessary conditions that are not
//! structural (monotonicity of composition in the order, the identity law
//! for `e`) are reported separately as warnings so that inputs are not
//! rejected on their account.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::signature::{SigSymbol, Signature};

/// Errors raised while constructing an algebra or selecting its tables.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("an algebra must have at least one element")]
    Empty,
    #[error("duplicate element name `{0}`")]
    DuplicateName(String),
    #[error("table `{table}` has {got} entries, expected {expected}")]
    BadShape {
        table: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("table `{table}` contains index {index}, but the algebra has {n} elements")]
    IndexOutOfRange {
        table: &'static str,
        index: usize,
        n: usize,
    },
    #[error("signature demands `{0}` but no such table or constant is present")]
    MissingTable(SigSymbol),
}

/// Errors raised by derived operations when a required table, constant or
/// designation is absent.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("unavailable: missing table or constant for `{0}`")]
    MissingSymbol(SigSymbol),
    #[error("unavailable: no designated `{0}` and it is not derivable")]
    MissingDesignation(&'static str),
}

/// Which argument slot a one-sided law failed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// One violated law together with the witness elements that violate it.
///
/// Witnesses re-evaluate: [`LawViolation::reevaluate`] recomputes the law
/// on the witness and returns `true` iff the violation is reproduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LawViolation {
    /// `(a·b)·c ≠ a·(b·c)`.
    Associativity { a: usize, b: usize, c: usize },
    /// `a ∧ a ≠ a` (or the join analogue).
    LatticeIdempotence { op: SigSymbol, a: usize },
    /// `a ∧ b ≠ b ∧ a` (or join).
    LatticeCommutativity { op: SigSymbol, a: usize, b: usize },
    /// `(a ∧ b) ∧ c ≠ a ∧ (b ∧ c)` (or join).
    LatticeAssociativity {
        op: SigSymbol,
        a: usize,
        b: usize,
        c: usize,
    },
    /// `a ∧ (a ∨ b) ≠ a` when `outer` is meet, `a ∨ (a ∧ b) ≠ a` when join.
    Absorption {
        outer: SigSymbol,
        a: usize,
        b: usize,
    },
    OrderNotReflexive { a: usize },
    OrderNotAntisymmetric { a: usize, b: usize },
    OrderNotTransitive { a: usize, b: usize, c: usize },
    /// `a ≤ b` and `a ∧ b = a` disagree.
    MeetOrderMismatch { a: usize, b: usize },
    /// `0 ≤ a` fails.
    ZeroNotMinimum { a: usize },
    /// `a ≤ ⊤` fails.
    TopNotMaximum { a: usize },
    /// Warning-level: `a ≤ b` but `c·a ≤ c·b` (left) or `a·c ≤ b·c` (right) fails.
    ComposeNotMonotone {
        a: usize,
        b: usize,
        c: usize,
        side: Side,
    },
    /// Warning-level: `e·a ≠ a` (left) or `a·e ≠ a` (right).
    IdentityLaw { a: usize, side: Side },
}

impl LawViolation {
    /// Re-evaluates the law on the stored witness; `true` means the
    /// violation is reproduced by the tables.
    pub fn reevaluate(&self, alg: &FiniteAlgebra) -> bool {
        let table = |op: SigSymbol| -> &[usize] {
            match op {
                SigSymbol::Meet => alg.meet.as_deref().unwrap(),
                SigSymbol::Join => alg.join.as_deref().unwrap(),
                _ => unreachable!("lattice law on non-lattice symbol"),
            }
        };
        let n = alg.n();
        let app = |t: &[usize], x: usize, y: usize| t[x * n + y];
        match *self {
            LawViolation::Associativity { a, b, c } => {
                alg.compose(alg.compose(a, b), c) != alg.compose(a, alg.compose(b, c))
            }
            LawViolation::LatticeIdempotence { op, a } => app(table(op), a, a) != a,
            LawViolation::LatticeCommutativity { op, a, b } => {
                let t = table(op);
                app(t, a, b) != app(t, b, a)
            }
            LawViolation::LatticeAssociativity { op, a, b, c } => {
                let t = table(op);
                app(t, app(t, a, b), c) != app(t, a, app(t, b, c))
            }
            LawViolation::Absorption { outer, a, b } => {
                let (out, inn) = if outer == SigSymbol::Meet {
                    (table(SigSymbol::Meet), table(SigSymbol::Join))
                } else {
                    (table(SigSymbol::Join), table(SigSymbol::Meet))
                };
                app(out, a, app(inn, a, b)) != a
            }
            LawViolation::OrderNotReflexive { a } => !alg.le(a, a).unwrap(),
            LawViolation::OrderNotAntisymmetric { a, b } => {
                a != b && alg.le(a, b).unwrap() && alg.le(b, a).unwrap()
            }
            LawViolation::OrderNotTransitive { a, b, c } => {
                alg.le(a, b).unwrap() && alg.le(b, c).unwrap() && !alg.le(a, c).unwrap()
            }
            LawViolation::MeetOrderMismatch { a, b } => {
                alg.le(a, b).unwrap() != (app(table(SigSymbol::Meet), a, b) == a)
            }
            LawViolation::ZeroNotMinimum { a } => {
                !alg.le(alg.constants.zero.unwrap(), a).unwrap()
            }
            LawViolation::TopNotMaximum { a } => !alg.le(a, alg.constants.top.unwrap()).unwrap(),
            LawViolation::ComposeNotMonotone { a, b, c, side } => {
                let (xa, xb) = match side {
                    Side::Left => (alg.compose(c, a), alg.compose(c, b)),
                    Side::Right => (alg.compose(a, c), alg.compose(b, c)),
                };
                alg.le(a, b).unwrap() && !alg.le(xa, xb).unwrap()
            }
            LawViolation::IdentityLaw { a, side } => {
                let e = alg.constants.e.unwrap();
                match side {
                    Side::Left => alg.compose(e, a) != a,
                    Side::Right => alg.compose(a, e) != a,
                }
            }
        }
    }
}

impl std::fmt::Display for LawViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            LawViolation::Associativity { a, b, c } => {
                write!(f, "composition not associative at ({a},{b},{c})")
            }
            LawViolation::LatticeIdempotence { op, a } => {
                write!(f, "{op} not idempotent at {a}")
            }
            LawViolation::LatticeCommutativity { op, a, b } => {
                write!(f, "{op} not commutative at ({a},{b})")
            }
            LawViolation::LatticeAssociativity { op, a, b, c } => {
                write!(f, "{op} not associative at ({a},{b},{c})")
            }
            LawViolation::Absorption { outer, a, b } => {
                write!(f, "absorption ({outer} over the dual) fails at ({a},{b})")
            }
            LawViolation::OrderNotReflexive { a } => write!(f, "order not reflexive at {a}"),
            LawViolation::OrderNotAntisymmetric { a, b } => {
                write!(f, "order not antisymmetric at ({a},{b})")
            }
            LawViolation::OrderNotTransitive { a, b, c } => {
                write!(f, "order not transitive at ({a},{b},{c})")
            }
            LawViolation::MeetOrderMismatch { a, b } => {
                write!(f, "order and meet disagree at ({a},{b})")
            }
            LawViolation::ZeroNotMinimum { a } => write!(f, "zero is not below {a}"),
            LawViolation::TopNotMaximum { a } => write!(f, "top is not above {a}"),
            LawViolation::ComposeNotMonotone { a, b, c, side } => {
                write!(f, "composition not {side}-monotone at ({a},{b}) with {c}")
            }
            LawViolation::IdentityLaw { a, side } => {
                write!(f, "e is not a {side} identity at {a}")
            }
        }
    }
}

/// Optional constant elements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Constants {
    pub e: Option<usize>,
    pub zero: Option<usize>,
    pub top: Option<usize>,
}

/// An abstract finite algebra given by tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    names: Vec<String>,
    compose: Vec<usize>,
    meet: Option<Vec<usize>>,
    join: Option<Vec<usize>>,
    complement: Option<Vec<usize>>,
    order: Option<Vec<bool>>,
    constants: Constants,
    designated: BTreeMap<String, usize>,
}

/// Staged construction of a [`FiniteAlgebra`]; `build` checks shapes,
/// index ranges and name uniqueness.
pub struct AlgebraBuilder {
    names: Vec<String>,
    compose: Vec<usize>,
    meet: Option<Vec<usize>>,
    join: Option<Vec<usize>>,
    complement: Option<Vec<usize>>,
    order: Option<Vec<bool>>,
    constants: Constants,
    designated: BTreeMap<String, usize>,
}

impl AlgebraBuilder {
    pub fn new(names: Vec<String>, compose: Vec<usize>) -> Self {
        AlgebraBuilder {
            names,
            compose,
            meet: None,
            join: None,
            complement: None,
            order: None,
            constants: Constants::default(),
            designated: BTreeMap::new(),
        }
    }

    pub fn meet(mut self, table: Vec<usize>) -> Self {
        self.meet = Some(table);
        self
    }

    pub fn join(mut self, table: Vec<usize>) -> Self {
        self.join = Some(table);
        self
    }

    pub fn complement(mut self, table: Vec<usize>) -> Self {
        self.complement = Some(table);
        self
    }

    pub fn order(mut self, matrix: Vec<bool>) -> Self {
        self.order = Some(matrix);
        self
    }

    pub fn constant_e(mut self, e: usize) -> Self {
        self.constants.e = Some(e);
        self
    }

    pub fn constant_zero(mut self, zero: usize) -> Self {
        self.constants.zero = Some(zero);
        self
    }

    pub fn constant_top(mut self, top: usize) -> Self {
        self.constants.top = Some(top);
        self
    }

    pub fn designate(mut self, name: &str, element: usize) -> Self {
        self.designated.insert(name.to_string(), element);
        self
    }

    pub fn build(self) -> Result<FiniteAlgebra, AlgebraError> {
        let n = self.names.len();
        if n == 0 {
            return Err(AlgebraError::Empty);
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &self.names {
            if !seen.insert(name.as_str()) {
                return Err(AlgebraError::DuplicateName(name.clone()));
            }
        }
        let check_table = |table: &[usize], label: &'static str, len: usize| {
            if table.len() != len {
                return Err(AlgebraError::BadShape {
                    table: label,
                    expected: len,
                    got: table.len(),
                });
            }
            for &entry in table {
                if entry >= n {
                    return Err(AlgebraError::IndexOutOfRange {
                        table: label,
                        index: entry,
                        n,
                    });
                }
            }
            Ok(())
        };
        check_table(&self.compose, "compose", n * n)?;
        if let Some(t) = &self.meet {
            check_table(t, "meet", n * n)?;
        }
        if let Some(t) = &self.join {
            check_table(t, "join", n * n)?;
        }
        if let Some(t) = &self.complement {
            check_table(t, "complement", n)?;
        }
        if let Some(m) = &self.order {
            if m.len() != n * n {
                return Err(AlgebraError::BadShape {
                    table: "order",
                    expected: n * n,
                    got: m.len(),
                });
            }
        }
        for (label, value) in [
            ("constants.e", self.constants.e),
            ("constants.zero", self.constants.zero),
            ("constants.top", self.constants.top),
        ] {
            if let Some(v) = value {
                if v >= n {
                    return Err(AlgebraError::IndexOutOfRange {
                        table: match label {
                            "constants.e" => "constants.e",
                            "constants.zero" => "constants.zero",
                            _ => "constants.top",
                        },
                        index: v,
                        n,
                    });
                }
            }
        }
        for &v in self.designated.values() {
            if v >= n {
                return Err(AlgebraError::IndexOutOfRange {
                    table: "designated",
                    index: v,
                    n,
                });
            }
        }
        Ok(FiniteAlgebra {
            names: self.names,
            compose: self.compose,
            meet: self.meet,
            join: self.join,
            complement: self.complement,
            order: self.order,
            constants: self.constants,
            designated: self.designated,
        })
    }
}

impl FiniteAlgebra {
    pub fn builder(names: Vec<String>, compose: Vec<usize>) -> AlgebraBuilder {
        AlgebraBuilder::new(names, compose)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.compose[a * self.n() + b]
    }

    pub fn compose_table(&self) -> &[usize] {
        &self.compose
    }

    pub fn meet_table(&self) -> Option<&[usize]> {
        self.meet.as_deref()
    }

    pub fn join_table(&self) -> Option<&[usize]> {
        self.join.as_deref()
    }

    pub fn complement_table(&self) -> Option<&[usize]> {
        self.complement.as_deref()
    }

    pub fn order_matrix(&self) -> Option<&[bool]> {
        self.order.as_deref()
    }

    pub fn constants(&self) -> Constants {
        self.constants
    }

    pub fn designated(&self) -> &BTreeMap<String, usize> {
        &self.designated
    }

    pub fn meet(&self, a: usize, b: usize) -> Result<usize, AnalysisError> {
        let t = self
            .meet
            .as_ref()
            .ok_or(AnalysisError::MissingSymbol(SigSymbol::Meet))?;
        Ok(t[a * self.n() + b])
    }

    pub fn join(&self, a: usize, b: usize) -> Result<usize, AnalysisError> {
        let t = self
            .join
            .as_ref()
            .ok_or(AnalysisError::MissingSymbol(SigSymbol::Join))?;
        Ok(t[a * self.n() + b])
    }

    pub fn complement(&self, a: usize) -> Result<usize, AnalysisError> {
        let t = self
            .complement
            .as_ref()
            .ok_or(AnalysisError::MissingSymbol(SigSymbol::Complement))?;
        Ok(t[a])
    }

    pub fn le(&self, a: usize, b: usize) -> Result<bool, AnalysisError> {
        let m = self
            .order
            .as_ref()
            .ok_or(AnalysisError::MissingSymbol(SigSymbol::Order))?;
        Ok(m[a * self.n() + b])
    }

    pub fn const_e(&self) -> Result<usize, AnalysisError> {
        self.constants
            .e
            .ok_or(AnalysisError::MissingSymbol(SigSymbol::ConstE))
    }

    pub fn const_zero(&self) -> Result<usize, AnalysisError> {
        self.constants
            .zero
            .ok_or(AnalysisError::MissingSymbol(SigSymbol::ConstZero))
    }

    pub fn const_top(&self) -> Result<usize, AnalysisError> {
        self.constants
            .top
            .ok_or(AnalysisError::MissingSymbol(SigSymbol::ConstTop))
    }

    /// Whether the tables and constants backing `sym` are present.
    pub fn supports(&self, sym: SigSymbol) -> bool {
        match sym {
            SigSymbol::Compose => true,
            SigSymbol::Meet => self.meet.is_some(),
            SigSymbol::Join => self.join.is_some(),
            SigSymbol::Complement => self.complement.is_some(),
            SigSymbol::Order => self.order.is_some(),
            SigSymbol::ConstE => self.constants.e.is_some(),
            SigSymbol::ConstZero => self.constants.zero.is_some(),
            SigSymbol::ConstTop => self.constants.top.is_some(),
        }
    }

    /// The diversity element: the designated `div` if present, otherwise
    /// the complement of `e`.
    pub fn div(&self) -> Result<usize, AnalysisError> {
        if let Some(&d) = self.designated.get("div") {
            return Ok(d);
        }
        match (self.complement.as_ref(), self.constants.e) {
            (Some(c), Some(e)) => Ok(c[e]),
            _ => Err(AnalysisError::MissingDesignation("div")),
        }
    }

    /// `dom(a) = (a·⊤) ∧ e`.
    pub fn dom(&self, a: usize) -> Result<usize, AnalysisError> {
        let top = self.const_top()?;
        let e = self.const_e()?;
        self.meet(self.compose(a, top), e)
    }

    /// `ran(a) = (⊤·a) ∧ e`.
    pub fn ran(&self, a: usize) -> Result<usize, AnalysisError> {
        let top = self.const_top()?;
        let e = self.const_e()?;
        self.meet(self.compose(top, a), e)
    }

    /// Checks `dom(a)·a = a = a·ran(a)` for every element; failures carry
    /// the offending element and side.
    pub fn normality(&self) -> Result<NormalityCheck, AnalysisError> {
        let mut failures = Vec::new();
        for a in 0..self.n() {
            if self.compose(self.dom(a)?, a) != a {
                failures.push((a, Side::Left));
            }
            if self.compose(a, self.ran(a)?) != a {
                failures.push((a, Side::Right));
            }
        }
        Ok(NormalityCheck { failures })
    }

    /// Elements `a` with `(a·div) ∧ a = 0 = (div·a) ∧ a`.
    pub fn i_elements_via_meet(&self) -> Result<Vec<usize>, AnalysisError> {
        let div = self.div()?;
        let zero = self.const_zero()?;
        let mut out = Vec::new();
        for a in 0..self.n() {
            if self.meet(self.compose(a, div), a)? == zero
                && self.meet(self.compose(div, a), a)? == zero
            {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// Elements `a` with `a ≤ −(a·div)` and `a ≤ −(div·a)`.
    pub fn i_elements_via_complement(&self) -> Result<Vec<usize>, AnalysisError> {
        let div = self.div()?;
        let mut out = Vec::new();
        for a in 0..self.n() {
            if self.le(a, self.complement(self.compose(a, div))?)?
                && self.le(a, self.complement(self.compose(div, a))?)?
            {
                out.push(a);
            }
        }
        Ok(out)
    }

    /// Partition of the elements by the key `a·⊤` (domain equivalence ⊟).
    pub fn dom_classes(&self) -> Result<Vec<Vec<usize>>, AnalysisError> {
        let top = self.const_top()?;
        Ok(self.partition_by(|a| self.compose(a, top)))
    }

    /// Partition of the elements by the key `⊤·a` (range equivalence ⊡).
    pub fn ran_classes(&self) -> Result<Vec<Vec<usize>>, AnalysisError> {
        let top = self.const_top()?;
        Ok(self.partition_by(|a| self.compose(top, a)))
    }

    fn partition_by<F: Fn(usize) -> usize>(&self, key: F) -> Vec<Vec<usize>> {
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for a in 0..self.n() {
            classes.entry(key(a)).or_default().push(a);
        }
        // deterministic: classes ordered by their smallest member
        let mut out: Vec<Vec<usize>> = classes.into_values().collect();
        out.sort_by_key(|c| c[0]);
        out
    }

    /// Elements with `a·a = a`.
    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.n()).filter(|&a| self.compose(a, a) == a).collect()
    }

    /// Checks the structural laws for every symbol in `sig`.
    ///
    /// Fails with [`AlgebraError::MissingTable`] if `sig` demands a table
    /// or constant the algebra does not carry.
    pub fn validate(&self, sig: &Signature) -> Result<Vec<LawViolation>, AlgebraError> {
        for sym in sig.symbols() {
            if !self.supports(sym) {
                return Err(AlgebraError::MissingTable(sym));
            }
        }
        let n = self.n();
        let mut out = Vec::new();

        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.compose(self.compose(a, b), c) != self.compose(a, self.compose(b, c)) {
                        out.push(LawViolation::Associativity { a, b, c });
                    }
                }
            }
        }

        for (sym, table) in [(SigSymbol::Meet, &self.meet), (SigSymbol::Join, &self.join)] {
            if !sig.contains(sym) {
                continue;
            }
            let t = table.as_ref().unwrap();
            let app = |x: usize, y: usize| t[x * n + y];
            for a in 0..n {
                if app(a, a) != a {
                    out.push(LawViolation::LatticeIdempotence { op: sym, a });
                }
                for b in 0..n {
                    if app(a, b) != app(b, a) {
                        out.push(LawViolation::LatticeCommutativity { op: sym, a, b });
                    }
                    for c in 0..n {
                        if app(app(a, b), c) != app(a, app(b, c)) {
                            out.push(LawViolation::LatticeAssociativity { op: sym, a, b, c });
                        }
                    }
                }
            }
        }

        if sig.contains(SigSymbol::Meet) && sig.contains(SigSymbol::Join) {
            let m = self.meet.as_ref().unwrap();
            let j = self.join.as_ref().unwrap();
            for a in 0..n {
                for b in 0..n {
                    if m[a * n + j[a * n + b]] != a {
                        out.push(LawViolation::Absorption {
                            outer: SigSymbol::Meet,
                            a,
                            b,
                        });
                    }
                    if j[a * n + m[a * n + b]] != a {
                        out.push(LawViolation::Absorption {
                            outer: SigSymbol::Join,
                            a,
                            b,
                        });
                    }
                }
            }
        }

        if sig.contains(SigSymbol::Order) {
            let le = |x: usize, y: usize| self.le(x, y).unwrap();
            for a in 0..n {
                if !le(a, a) {
                    out.push(LawViolation::OrderNotReflexive { a });
                }
                for b in 0..n {
                    if a != b && le(a, b) && le(b, a) {
                        out.push(LawViolation::OrderNotAntisymmetric { a, b });
                    }
                    for c in 0..n {
                        if le(a, b) && le(b, c) && !le(a, c) {
                            out.push(LawViolation::OrderNotTransitive { a, b, c });
                        }
                    }
                }
            }
            if sig.contains(SigSymbol::Meet) {
                let m = self.meet.as_ref().unwrap();
                for a in 0..n {
                    for b in 0..n {
                        if le(a, b) != (m[a * n + b] == a) {
                            out.push(LawViolation::MeetOrderMismatch { a, b });
                        }
                    }
                }
            }
            if sig.contains(SigSymbol::ConstZero) {
                let zero = self.constants.zero.unwrap();
                for a in 0..n {
                    if !le(zero, a) {
                        out.push(LawViolation::ZeroNotMinimum { a });
                    }
                }
            }
            if sig.contains(SigSymbol::ConstTop) {
                let top = self.constants.top.unwrap();
                for a in 0..n {
                    if !le(a, top) {
                        out.push(LawViolation::TopNotMaximum { a });
                    }
                }
            }
        }

        Ok(out)
    }

    /// Advisory checks for laws that a representable algebra must satisfy
    /// but that are not structural for the signature: monotonicity of
    /// composition in the order, and the identity law for `e`.
    pub fn validation_warnings(&self, sig: &Signature) -> Vec<LawViolation> {
        let n = self.n();
        let mut out = Vec::new();
        if sig.contains(SigSymbol::Order) && self.order.is_some() {
            let le = |x: usize, y: usize| self.le(x, y).unwrap();
            for a in 0..n {
                for b in 0..n {
                    if !le(a, b) {
                        continue;
                    }
                    for c in 0..n {
                        if !le(self.compose(c, a), self.compose(c, b)) {
                            out.push(LawViolation::ComposeNotMonotone {
                                a,
                                b,
                                c,
                                side: Side::Left,
                            });
                        }
                        if !le(self.compose(a, c), self.compose(b, c)) {
                            out.push(LawViolation::ComposeNotMonotone {
                                a,
                                b,
                                c,
                                side: Side::Right,
                            });
                        }
                    }
                }
            }
        }
        if sig.contains(SigSymbol::ConstE) {
            if let Some(e) = self.constants.e {
                for a in 0..n {
                    if self.compose(e, a) != a {
                        out.push(LawViolation::IdentityLaw { a, side: Side::Left });
                    }
                    if self.compose(a, e) != a {
                        out.push(LawViolation::IdentityLaw {
                            a,
                            side: Side::Right,
                        });
                    }
                }
            }
        }
        out
    }

    /// Runs the full analysis for a signature: validation plus every
    /// derived notion that the present tables make available.
    pub fn analyze(&self, sig: &Signature) -> Result<AnalysisReport, AlgebraError> {
        let violations = self.validate(sig)?;
        Ok(AnalysisReport {
            div: self.div().ok(),
            i_elements_via_meet: self.i_elements_via_meet().ok(),
            i_elements_via_complement: self.i_elements_via_complement().ok(),
            idempotents: self.idempotents(),
            normal: self.normality().ok().map(|c| c.is_normal()),
            dom_classes: self.dom_classes().ok(),
            ran_classes: self.ran_classes().ok(),
            violations,
            warnings: self.validation_warnings(sig),
        })
    }
}

/// Result of the normality check `dom(a)·a = a = a·ran(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalityCheck {
    /// Elements (with side) where the law fails.
    pub failures: Vec<(usize, Side)>,
}

impl NormalityCheck {
    pub fn is_normal(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Everything the `analyze` entry point computes in one pass.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub div: Option<usize>,
    pub i_elements_via_meet: Option<Vec<usize>>,
    pub i_elements_via_complement: Option<Vec<usize>>,
    pub idempotents: Vec<usize>,
    pub normal: Option<bool>,
    pub dom_classes: Option<Vec<Vec<usize>>>,
    pub ran_classes: Option<Vec<Vec<usize>>>,
    pub violations: Vec<LawViolation>,
    pub warnings: Vec<LawViolation>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> FiniteAlgebra {
        FiniteAlgebra::builder(vec!["z".into()], vec![0])
            .build()
            .unwrap()
    }

    #[test]
    fn trivial_algebra_validates() {
        let alg = trivial();
        assert_eq!(alg.validate(&Signature::compose_only()).unwrap(), vec![]);
    }

    #[test]
    fn zero_element_algebra_is_rejected() {
        assert_eq!(
            FiniteAlgebra::builder(vec![], vec![]).build(),
            Err(AlgebraError::Empty)
        );
    }

    #[test]
    fn associativity_violation_has_witness() {
        // (a·a)·b ≠ a·(a·b): a·a=b, a·b=a, b·a=a, b·b=a
        let alg = FiniteAlgebra::builder(vec!["a".into(), "b".into()], vec![1, 0, 0, 0])
            .build()
            .unwrap();
        let violations = alg.validate(&Signature::compose_only()).unwrap();
        assert!(violations
            .iter()
            .any(|v| *v == LawViolation::Associativity { a: 0, b: 0, c: 1 }));
        for v in &violations {
            assert!(v.reevaluate(&alg), "witness does not reproduce: {v}");
        }
    }

    #[test]
    fn missing_table_is_an_error() {
        let alg = trivial();
        assert_eq!(
            alg.validate(&Signature::compose_only().with(SigSymbol::Meet)),
            Err(AlgebraError::MissingTable(SigSymbol::Meet))
        );
    }

    #[test]
    fn div_requires_complement_or_designation() {
        let alg = trivial();
        assert_eq!(alg.div(), Err(AnalysisError::MissingDesignation("div")));
        let alg = FiniteAlgebra::builder(vec!["z".into()], vec![0])
            .designate("div", 0)
            .build()
            .unwrap();
        assert_eq!(alg.div(), Ok(0));
    }

    #[test]
    fn one_element_div_is_the_element() {
        // e = ⊤ = 0 = the single element; −0 = 0
        let alg = FiniteAlgebra::builder(vec!["z".into()], vec![0])
            .complement(vec![0])
            .constant_e(0)
            .build()
            .unwrap();
        assert_eq!(alg.div(), Ok(0));
    }

    #[test]
    fn idempotents_and_identity() {
        let alg = FiniteAlgebra::builder(vec!["e".into(), "a".into()], vec![0, 1, 1, 0])
            .constant_e(0)
            .build()
            .unwrap();
        assert_eq!(alg.idempotents(), vec![0]);
        assert!(alg.validation_warnings(&Signature::compose_only().with(SigSymbol::ConstE)).is_empty());
    }

    #[test]
    fn one_element_algebra_is_normal_with_a_single_class() {
        let alg = FiniteAlgebra::builder(vec!["z".into()], vec![0])
            .meet(vec![0])
            .constant_e(0)
            .constant_top(0)
            .build()
            .unwrap();
        assert!(alg.normality().unwrap().is_normal());
        assert_eq!(alg.dom_classes().unwrap(), vec![vec![0]]);
        assert_eq!(alg.ran_classes().unwrap(), vec![vec![0]]);
    }

    #[test]
    fn normality_violation_carries_witness() {
        // Two elements, e = 0-th, with a·x = e for all x: dom(a)·a ≠ a.
        let alg = FiniteAlgebra::builder(
            vec!["e".into(), "a".into()],
            vec![0, 1, 0, 0], // e·e=e, e·a=a, a·e=e (!), a·a=e
        )
        .meet(vec![0, 0, 0, 1])
        .constant_e(0)
        .constant_top(1)
        .build()
        .unwrap();
        let check = alg.normality().unwrap();
        assert!(!check.is_normal());
        assert!(check.failures.iter().any(|&(a, _)| a == 1));
    }
}
