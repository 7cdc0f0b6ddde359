//! The JSON documents the tool reads and writes.
//!
//! Elements are referenced by name, never by index, so algebra files can
//! evolve without breaking representation files. Canonical serialization
//! sorts object keys (and relation pair lists are row-major by
//! construction), which makes golden-file comparisons byte-stable:
//! parse → serialize → parse is the identity on every well-formed file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use relred_core::algebra::FiniteAlgebra;
use relred_core::partial_group::PartialGroup;
use relred_core::relations::{Complementation, Relation, MAX_BASE};
use relred_core::representation::Representation;
use relred_core::signature::{SigSymbol, Signature};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("JSON syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl FileError {
    fn field(path: impl Into<String>, message: impl Into<String>) -> FileError {
        FileError::Field {
            path: path.into(),
            message: message.into(),
        }
    }

    fn from_serde(err: serde_json::Error) -> FileError {
        FileError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

/// Serializes with sorted object keys, two-space indentation and a
/// trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("in-memory value serializes");
    let mut out = serde_json::to_string_pretty(&value).expect("value renders");
    out.push('\n');
    out
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AlgebraFile {
    pub elements: Vec<String>,
    pub signature: Vec<String>,
    pub compose: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meet: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub join: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complement: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<Vec<bool>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub designated: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PartialGroupFile {
    pub elements: Vec<String>,
    pub identity: String,
    pub table: Vec<Vec<Option<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RepresentationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra_path: Option<String>,
    pub base_size: usize,
    pub semantics: String,
    pub signature: Vec<String>,
    pub map: BTreeMap<String, Vec<(usize, usize)>>,
}

fn parse_signature(tokens: &[String], path: &str) -> Result<Signature, FileError> {
    let mut symbols = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        let sym: SigSymbol = tok
            .parse()
            .map_err(|_| FileError::field(format!("{path}[{i}]"), format!("unknown symbol `{tok}`")))?;
        symbols.push(sym);
    }
    Signature::from_symbols(symbols)
        .map_err(|_| FileError::field(path, "signature must contain `compose`"))
}

fn signature_tokens(sig: &Signature) -> Vec<String> {
    sig.symbols().map(|s| s.token().to_string()).collect()
}

struct NameTable<'a> {
    names: &'a [String],
}

impl NameTable<'_> {
    fn resolve(&self, name: &str, path: &str) -> Result<usize, FileError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| FileError::field(path, format!("unknown element `{name}`")))
    }

    fn square_table(
        &self,
        rows: &[Vec<String>],
        label: &str,
    ) -> Result<Vec<usize>, FileError> {
        let n = self.names.len();
        if rows.len() != n {
            return Err(FileError::field(
                label,
                format!("expected {n} rows, got {}", rows.len()),
            ));
        }
        let mut out = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(FileError::field(
                    format!("{label}[{i}]"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            for (j, name) in row.iter().enumerate() {
                out.push(self.resolve(name, &format!("{label}[{i}][{j}]"))?);
            }
        }
        Ok(out)
    }
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<(FiniteAlgebra, Signature), FileError> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(FileError::from_serde)?;
        file.resolve()
    }

    pub fn resolve(&self) -> Result<(FiniteAlgebra, Signature), FileError> {
        if self.elements.is_empty() {
            return Err(FileError::field("elements", "must be nonempty"));
        }
        let table = NameTable {
            names: &self.elements,
        };
        let sig = parse_signature(&self.signature, "signature")?;
        let n = self.elements.len();

        let compose = table.square_table(&self.compose, "compose")?;
        let mut builder = FiniteAlgebra::builder(self.elements.clone(), compose);
        if let Some(rows) = &self.meet {
            builder = builder.meet(table.square_table(rows, "meet")?);
        }
        if let Some(rows) = &self.join {
            builder = builder.join(table.square_table(rows, "join")?);
        }
        if let Some(row) = &self.complement {
            if row.len() != n {
                return Err(FileError::field(
                    "complement",
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            let mut t = Vec::with_capacity(n);
            for (i, name) in row.iter().enumerate() {
                t.push(table.resolve(name, &format!("complement[{i}]"))?);
            }
            builder = builder.complement(t);
        }
        if let Some(rows) = &self.order {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(FileError::field("order", format!("expected a {n}×{n} matrix")));
            }
            builder = builder.order(rows.iter().flatten().copied().collect());
        }
        for (key, name) in &self.constants {
            let idx = table.resolve(name, &format!("constants.{key}"))?;
            builder = match key.as_str() {
                "e" => builder.constant_e(idx),
                "zero" => builder.constant_zero(idx),
                "top" => builder.constant_top(idx),
                other => {
                    return Err(FileError::field(
                        format!("constants.{other}"),
                        "expected one of `e`, `zero`, `top`",
                    ))
                }
            };
        }
        for (key, name) in &self.designated {
            let idx = table.resolve(name, &format!("designated.{key}"))?;
            builder = builder.designate(key, idx);
        }
        let algebra = builder
            .build()
            .map_err(|e| FileError::field("elements", e.to_string()))?;
        for sym in sig.symbols() {
            if !algebra.supports(sym) {
                return Err(FileError::field(
                    "signature",
                    format!("demands `{sym}` but the corresponding table or constant is absent"),
                ));
            }
        }
        Ok((algebra, sig))
    }

    pub fn from_algebra(algebra: &FiniteAlgebra, sig: &Signature) -> AlgebraFile {
        let n = algebra.n();
        let name = |i: usize| algebra.name(i).to_string();
        let square = |t: &[usize]| -> Vec<Vec<String>> {
            (0..n)
                .map(|a| (0..n).map(|b| name(t[a * n + b])).collect())
                .collect()
        };
        let mut constants = BTreeMap::new();
        if let Some(e) = algebra.constants().e {
            constants.insert("e".to_string(), name(e));
        }
        if let Some(zero) = algebra.constants().zero {
            constants.insert("zero".to_string(), name(zero));
        }
        if let Some(top) = algebra.constants().top {
            constants.insert("top".to_string(), name(top));
        }
        AlgebraFile {
            elements: algebra.names().to_vec(),
            signature: signature_tokens(sig),
            compose: square(algebra.compose_table()),
            meet: algebra.meet_table().map(square),
            join: algebra.join_table().map(square),
            complement: algebra
                .complement_table()
                .map(|t| t.iter().map(|&i| name(i)).collect()),
            order: algebra.order_matrix().map(|m| {
                (0..n)
                    .map(|a| (0..n).map(|b| m[a * n + b]).collect())
                    .collect()
            }),
            constants,
            designated: algebra
                .designated()
                .iter()
                .map(|(k, &v)| (k.clone(), name(v)))
                .collect(),
        }
    }
}

impl PartialGroupFile {
    pub fn parse(text: &str) -> Result<PartialGroup, FileError> {
        let file: PartialGroupFile = serde_json::from_str(text).map_err(FileError::from_serde)?;
        file.resolve()
    }

    pub fn resolve(&self) -> Result<PartialGroup, FileError> {
        if self.elements.is_empty() {
            return Err(FileError::field("elements", "must be nonempty"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &self.elements {
            if !seen.insert(name.as_str()) {
                return Err(FileError::field(
                    "elements",
                    format!("duplicate element name `{name}`"),
                ));
            }
        }
        let table = NameTable {
            names: &self.elements,
        };
        let n = self.elements.len();
        let identity = table.resolve(&self.identity, "identity")?;
        if self.table.len() != n {
            return Err(FileError::field(
                "table",
                format!("expected {n} rows, got {}", self.table.len()),
            ));
        }
        let mut cells = Vec::with_capacity(n * n);
        for (i, row) in self.table.iter().enumerate() {
            if row.len() != n {
                return Err(FileError::field(
                    format!("table[{i}]"),
                    format!("expected {n} entries, got {}", row.len()),
                ));
            }
            for (j, cell) in row.iter().enumerate() {
                cells.push(match cell {
                    None => None,
                    Some(name) => Some(table.resolve(name, &format!("table[{i}][{j}]"))?),
                });
            }
        }
        let sqrt = match &self.sqrt {
            None => None,
            Some(names) => {
                let mut set = std::collections::BTreeSet::new();
                for (i, name) in names.iter().enumerate() {
                    set.insert(table.resolve(name, &format!("sqrt[{i}]"))?);
                }
                Some(set)
            }
        };
        PartialGroup::new(n, identity, cells, sqrt)
            .map_err(|e| FileError::field("table", e.to_string()))
    }

    pub fn from_partial_group(pg: &PartialGroup, names: &[String]) -> PartialGroupFile {
        let n = pg.carrier_size();
        assert_eq!(names.len(), n);
        PartialGroupFile {
            elements: names.to_vec(),
            identity: names[pg.identity()].clone(),
            table: (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| pg.product(a, b).map(|c| names[c].clone()))
                        .collect()
                })
                .collect(),
            sqrt: pg
                .sqrt()
                .map(|s| s.iter().map(|&a| names[a].clone()).collect()),
        }
    }
}

impl RepresentationFile {
    /// Parses, loading an `algebra_path` reference relative to `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Representation, FileError> {
        let file: RepresentationFile =
            serde_json::from_str(text).map_err(FileError::from_serde)?;
        file.resolve(dir)
    }

    pub fn resolve(&self, dir: &Path) -> Result<Representation, FileError> {
        let (algebra, _) = match (&self.algebra, &self.algebra_path) {
            (Some(inline), None) => inline.resolve()?,
            (None, Some(path)) => {
                let full = dir.join(path);
                let text = std::fs::read_to_string(&full)?;
                AlgebraFile::parse(&text)?
            }
            (Some(_), Some(_)) => {
                return Err(FileError::field(
                    "algebra",
                    "give either an inline `algebra` or an `algebra_path`, not both",
                ))
            }
            (None, None) => {
                return Err(FileError::field(
                    "algebra",
                    "missing: give an inline `algebra` or an `algebra_path`",
                ))
            }
        };
        let sig = parse_signature(&self.signature, "signature")?;
        let semantics: Complementation = self
            .semantics
            .parse()
            .map_err(|e: String| FileError::field("semantics", e))?;
        if self.base_size == 0 || self.base_size > MAX_BASE {
            return Err(FileError::field(
                "base_size",
                format!("must be between 1 and {MAX_BASE}"),
            ));
        }

        let mut map = Vec::with_capacity(algebra.n());
        for a in 0..algebra.n() {
            let name = algebra.name(a);
            let pairs = self.map.get(name).ok_or_else(|| {
                FileError::field(format!("map.{name}"), "element has no relation")
            })?;
            let relation = Relation::from_pairs(self.base_size, pairs).map_err(|e| {
                FileError::field(format!("map.{name}"), e.to_string())
            })?;
            map.push(relation);
        }
        for name in self.map.keys() {
            if algebra.index_of(name).is_none() {
                return Err(FileError::field(
                    format!("map.{name}"),
                    "name does not occur in the algebra",
                ));
            }
        }
        Representation::new(algebra, self.base_size, map, sig, semantics)
            .map_err(|e| FileError::field("map", e.to_string()))
    }

    /// Renders with the algebra inlined; the output is self-contained.
    pub fn from_representation(rep: &Representation) -> RepresentationFile {
        let algebra = rep.algebra();
        RepresentationFile {
            algebra: Some(AlgebraFile::from_algebra(algebra, rep.claimed_signature())),
            algebra_path: None,
            base_size: rep.base_size(),
            semantics: rep.semantics().to_string(),
            signature: signature_tokens(rep.claimed_signature()),
            map: (0..algebra.n())
                .map(|a| (algebra.name(a).to_string(), rep.image(a).pairs()))
                .collect(),
        }
    }
}

pub fn read_algebra(path: &Path) -> Result<(FiniteAlgebra, Signature), FileError> {
    let text = std::fs::read_to_string(path)?;
    AlgebraFile::parse(&text)
}

pub fn read_partial_group(path: &Path) -> Result<PartialGroup, FileError> {
    let text = std::fs::read_to_string(path)?;
    PartialGroupFile::parse(&text)
}

pub fn read_representation(path: &Path) -> Result<Representation, FileError> {
    let text = std::fs::read_to_string(path)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    RepresentationFile::parse(&text, dir)
}
