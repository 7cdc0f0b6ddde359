//! Operation and constant symbols, and sets of them.
//!
//! A [`Signature`] is the subset of symbols an algebra or representation is
//! expected to respect. Composition is not optional: every signature here
//! contains [`SigSymbol::Compose`].

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One operation or constant symbol of the full signature.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SigSymbol {
    /// Binary composition `·`.
    Compose,
    /// Binary meet `∧`.
    Meet,
    /// Binary join `∨`.
    Join,
    /// Unary complement `−`.
    Complement,
    /// Partial order `≤` (a relation, not an operation).
    Order,
    /// Identity constant `e`.
    ConstE,
    /// Bottom constant `0`.
    ConstZero,
    /// Top constant `⊤`.
    ConstTop,
}

impl SigSymbol {
    pub const ALL: [SigSymbol; 8] = [
        SigSymbol::Compose,
        SigSymbol::Meet,
        SigSymbol::Join,
        SigSymbol::Complement,
        SigSymbol::Order,
        SigSymbol::ConstE,
        SigSymbol::ConstZero,
        SigSymbol::ConstTop,
    ];

    /// Stable textual token, used in files and on the command line.
    pub fn token(self) -> &'static str {
        match self {
            SigSymbol::Compose => "compose",
            SigSymbol::Meet => "meet",
            SigSymbol::Join => "join",
            SigSymbol::Complement => "complement",
            SigSymbol::Order => "order",
            SigSymbol::ConstE => "const_e",
            SigSymbol::ConstZero => "const_zero",
            SigSymbol::ConstTop => "const_top",
        }
    }
}

impl fmt::Display for SigSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("unknown signature symbol `{0}`")]
    UnknownSymbol(String),
    #[error("signature must contain `compose`")]
    MissingCompose,
}

impl FromStr for SigSymbol {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SigSymbol::ALL
            .iter()
            .copied()
            .find(|sym| sym.token() == s)
            .ok_or_else(|| SignatureError::UnknownSymbol(s.to_string()))
    }
}

/// A set of symbols; always contains [`SigSymbol::Compose`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    symbols: BTreeSet<SigSymbol>,
}

impl Signature {
    /// The bare semigroup signature `{·}`.
    pub fn compose_only() -> Self {
        Signature {
            symbols: BTreeSet::from([SigSymbol::Compose]),
        }
    }

    /// All eight symbols, including the order relation.
    pub fn full() -> Self {
        Signature {
            symbols: SigSymbol::ALL.into_iter().collect(),
        }
    }

    /// The Boolean monoid signature `{·, ∧, ∨, −, e, 0, ⊤}`.
    pub fn boolean_monoid() -> Self {
        Signature::full().without(SigSymbol::Order)
    }

    /// The lattice-ordered semigroup signature `{·, ∧, ∨}`.
    pub fn lattice_ordered() -> Self {
        Signature::compose_only()
            .with(SigSymbol::Meet)
            .with(SigSymbol::Join)
    }

    /// The ordered complemented semigroup signature `{·, ≤, −}`.
    pub fn ordered_complemented() -> Self {
        Signature::compose_only()
            .with(SigSymbol::Order)
            .with(SigSymbol::Complement)
    }

    /// Builds a signature from an explicit symbol list; `compose` must be
    /// in the list.
    pub fn from_symbols<I: IntoIterator<Item = SigSymbol>>(
        symbols: I,
    ) -> Result<Self, SignatureError> {
        let symbols: BTreeSet<SigSymbol> = symbols.into_iter().collect();
        if !symbols.contains(&SigSymbol::Compose) {
            return Err(SignatureError::MissingCompose);
        }
        Ok(Signature { symbols })
    }

    /// Parses a comma-separated token list such as `compose,meet,join`.
    pub fn parse_tokens(s: &str) -> Result<Self, SignatureError> {
        let mut symbols = BTreeSet::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            symbols.insert(tok.parse::<SigSymbol>()?);
        }
        Signature::from_symbols(symbols)
    }

    pub fn with(mut self, sym: SigSymbol) -> Self {
        self.symbols.insert(sym);
        self
    }

    pub fn without(mut self, sym: SigSymbol) -> Self {
        self.symbols.remove(&sym);
        self.symbols.insert(SigSymbol::Compose);
        self
    }

    pub fn contains(&self, sym: SigSymbol) -> bool {
        self.symbols.contains(&sym)
    }

    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.symbols.is_subset(&other.symbols)
    }

    pub fn symbols(&self) -> impl Iterator<Item = SigSymbol> + '_ {
        self.symbols.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false // compose is always present
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for sym in &self.symbols {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{sym}")?;
            first = false;
        }
        Ok(())
    }
}
