//! Finite structures satisfying a specification module: scopes, the
//! structure itself, the bounded search that finds one, an independent
//! checker, and shortest constructor terms for core elements.

mod check;
mod search;
mod terms;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spec::{OpId, ResultSort, SortId, SortKind, ValidatedModule};

pub use check::{check_structure, eval_domain, CheckReport, Violation};
pub use search::{find_structure, SearchOptions, DEFAULT_BUDGET};
pub use terms::{derive_construction_terms, ConstructorTerm, TermArg, TermDerivation};

pub const DEFAULT_CORE_SCOPE: usize = 4;
pub const DEFAULT_PARAM_SCOPE: usize = 2;

/// Per-sort element counts bounding the search.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Scope {
    overrides: BTreeMap<String, usize>,
}

impl Scope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, sort: &str, count: usize) -> Self {
        self.set(sort, count);
        self
    }

    pub fn set(&mut self, sort: &str, count: usize) {
        self.overrides.insert(sort.to_string(), count);
    }

    pub fn overrides(&self) -> &BTreeMap<String, usize> {
        &self.overrides
    }

    /// Element count for `sort`: the override if any, else 4 for the core
    /// sort and 2 for every other sort.
    pub fn count(&self, m: &ValidatedModule, sort: SortId) -> usize {
        let info = &m.sorts[sort];
        self.overrides.get(&info.name).copied().unwrap_or(match info.kind {
            SortKind::Core => DEFAULT_CORE_SCOPE,
            SortKind::Parameter | SortKind::Plain => DEFAULT_PARAM_SCOPE,
        })
    }

    pub fn carriers(&self, m: &ValidatedModule) -> Result<Vec<usize>, ModelError> {
        for name in self.overrides.keys() {
            if m.sort_id(name).is_none() {
                return Err(ModelError::UnknownSort(name.clone()));
            }
        }
        (0..m.sorts.len())
            .map(|s| match self.count(m, s) {
                0 => Err(ModelError::EmptyScope(m.sorts[s].name.clone())),
                n => Ok(n),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("no model exists within the given scope")]
    NoModel,
    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(u64),
    #[error("scope names unknown sort `{0}`")]
    UnknownSort(String),
    #[error("scope for sort `{0}` must be at least 1")]
    EmptyScope(String),
}

/// Result of an operation application: a boolean or an element id of the
/// result sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Elem(usize),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Elem(e) => write!(f, "#{e}"),
        }
    }
}

/// A finite model: carrier sizes per sort and a (partial) table per
/// operation mapping argument tuples to results. A missing row means the
/// operation is undefined there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub carriers: Vec<usize>,
    pub tables: Vec<BTreeMap<Vec<usize>, Value>>,
}

impl Structure {
    pub fn apply(&self, op: OpId, args: &[usize]) -> Option<Value> {
        self.tables[op].get(args).copied()
    }

    /// Every argument tuple of `op` over the carriers, in lexicographic order.
    pub fn tuples(&self, m: &ValidatedModule, op: OpId) -> Vec<Vec<usize>> {
        tuples_over(m.ops[op].args.iter().map(|&s| self.carriers[s]))
    }

    pub fn elements(&self, sort: SortId) -> std::ops::Range<usize> {
        0..self.carriers[sort]
    }

    /// Human-readable element name, e.g. `SortedSet2`.
    pub fn element_name(m: &ValidatedModule, sort: SortId, id: usize) -> String {
        format!("{}{}", m.sorts[sort].name, id)
    }
}

pub(crate) fn tuples_over(sizes: impl IntoIterator<Item = usize>) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for n in sizes {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Deterministic JSON form of a structure, keyed by names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub module: String,
    pub sorts: BTreeMap<String, SortDoc>,
    pub ops: BTreeMap<String, Vec<RowDoc>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub terms: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unreachable: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortDoc {
    pub kind: SortKind,
    pub elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDoc {
    pub args: Vec<String>,
    pub result: serde_json::Value,
}

impl StructureDoc {
    pub fn new(m: &ValidatedModule, st: &Structure, terms: Option<&TermDerivation>) -> Self {
        let sorts = m
            .sorts
            .iter()
            .enumerate()
            .map(|(s, info)| {
                (
                    info.name.clone(),
                    SortDoc {
                        kind: info.kind,
                        elements: st.elements(s).map(|e| Structure::element_name(m, s, e)).collect(),
                    },
                )
            })
            .collect();
        let ops = m
            .ops
            .iter()
            .enumerate()
            .map(|(o, info)| {
                let rows = st.tables[o]
                    .iter()
                    .map(|(args, v)| RowDoc {
                        args: args
                            .iter()
                            .zip(&info.args)
                            .map(|(&e, &s)| Structure::element_name(m, s, e))
                            .collect(),
                        result: match (v, info.result) {
                            (Value::Bool(b), _) => serde_json::Value::Bool(*b),
                            (Value::Elem(e), ResultSort::Sort(s)) => {
                                serde_json::Value::String(Structure::element_name(m, s, *e))
                            }
                            (Value::Elem(e), ResultSort::Bool) => serde_json::Value::from(*e),
                        },
                    })
                    .collect();
                (info.name.clone(), rows)
            })
            .collect();
        let (terms, unreachable) = match terms {
            Some(d) => (
                d.terms
                    .iter()
                    .map(|(e, t)| (Structure::element_name(m, m.core, *e), t.render(m)))
                    .collect(),
                d.unreachable
                    .iter()
                    .map(|&e| Structure::element_name(m, m.core, e))
                    .collect(),
            ),
            None => Default::default(),
        };
        StructureDoc {
            module: m.name.clone(),
            sorts,
            ops,
            terms,
            unreachable,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("structure documents serialize")
    }
}
