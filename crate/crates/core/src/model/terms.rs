//! Shortest constructor terms for the core elements of a structure.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Structure, Value};
use crate::spec::{OpId, OpKind, ResultSort, SortId, ValidatedModule};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum TermArg {
    /// A parameter (or other non-core) element, used as is.
    Elem { sort: SortId, id: usize },
    /// A core argument, built by a nested constructor term.
    Sub(Box<ConstructorTerm>),
}

/// A creator or transformer applied to arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ConstructorTerm {
    pub op: OpId,
    pub args: Vec<TermArg>,
}

impl ConstructorTerm {
    pub fn depth(&self) -> usize {
        1 + self.subterms().map(ConstructorTerm::depth).max().unwrap_or(0)
    }

    pub fn subterms(&self) -> impl Iterator<Item = &ConstructorTerm> {
        self.args.iter().filter_map(|a| match a {
            TermArg::Sub(t) => Some(t.as_ref()),
            TermArg::Elem { .. } => None,
        })
    }

    /// The innermost, leftmost operation: the creator the term starts from.
    pub fn creator(&self) -> OpId {
        self.subterms().next().map_or(self.op, ConstructorTerm::creator)
    }

    /// Every transformer applied anywhere in the term.
    pub fn transformers(&self, m: &ValidatedModule) -> BTreeSet<OpId> {
        let mut out = BTreeSet::new();
        self.walk(&mut |t| {
            if m.ops[t.op].kind == OpKind::Transformer {
                out.insert(t.op);
            }
        });
        out
    }

    /// Visits subterms before the term itself, left to right.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ConstructorTerm)) {
        for s in self.subterms() {
            s.walk(f);
        }
        f(self);
    }

    /// Post-order sequence of (operation name, non-core argument ids);
    /// comparing these picks the leftmost-innermost term among equals.
    pub fn key(&self, m: &ValidatedModule) -> Vec<(String, Vec<usize>)> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            let ids = t
                .args
                .iter()
                .filter_map(|a| match a {
                    TermArg::Elem { id, .. } => Some(*id),
                    TermArg::Sub(_) => None,
                })
                .collect();
            out.push((m.ops[t.op].name.clone(), ids));
        });
        out
    }

    /// Element denoted by the term, if every application is defined.
    pub fn eval(&self, st: &Structure) -> Option<usize> {
        let mut vals = Vec::with_capacity(self.args.len());
        for a in &self.args {
            vals.push(match a {
                TermArg::Elem { id, .. } => *id,
                TermArg::Sub(t) => t.eval(st)?,
            });
        }
        match st.apply(self.op, &vals)? {
            Value::Elem(e) => Some(e),
            Value::Bool(_) => None,
        }
    }

    pub fn render(&self, m: &ValidatedModule) -> String {
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| match a {
                TermArg::Elem { sort, id } => Structure::element_name(m, *sort, *id),
                TermArg::Sub(t) => t.render(m),
            })
            .collect();
        format!("{}({})", m.ops[self.op].name, args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermDerivation {
    pub terms: BTreeMap<usize, ConstructorTerm>,
    /// Core elements no constructor term reaches.
    pub unreachable: Vec<usize>,
}

/// Breadth-first search by term depth. Each reachable core element gets a
/// term of minimal depth; ties go to the smallest post-order key.
pub fn derive_construction_terms(m: &ValidatedModule, st: &Structure) -> TermDerivation {
    let ctors: Vec<OpId> = (0..m.ops.len())
        .filter(|&o| {
            let op = &m.ops[o];
            op.owner == m.core && op.kind.is_constructor() && op.result == ResultSort::Sort(m.core)
        })
        .collect();
    let mut terms: BTreeMap<usize, ConstructorTerm> = BTreeMap::new();
    let mut depth = 1;
    loop {
        let mut found: BTreeMap<usize, ConstructorTerm> = BTreeMap::new();
        for &o in &ctors {
            let op = &m.ops[o];
            let choices: Vec<Vec<TermArg>> = op
                .args
                .iter()
                .map(|&s| {
                    if s == m.core {
                        terms.values().map(|t| TermArg::Sub(Box::new(t.clone()))).collect()
                    } else {
                        st.elements(s).map(|id| TermArg::Elem { sort: s, id }).collect()
                    }
                })
                .collect();
            for combo in super::tuples_over(choices.iter().map(Vec::len)) {
                let args: Vec<TermArg> = combo.iter().enumerate().map(|(i, &k)| choices[i][k].clone()).collect();
                let t = ConstructorTerm { op: o, args };
                if t.depth() != depth {
                    continue;
                }
                let Some(e) = t.eval(st) else { continue };
                if terms.contains_key(&e) {
                    continue;
                }
                match found.get(&e) {
                    Some(old) if old.key(m) <= t.key(m) => {}
                    _ => {
                        found.insert(e, t);
                    }
                }
            }
        }
        if found.is_empty() {
            break;
        }
        terms.extend(found);
        depth += 1;
    }
    let unreachable = st.elements(m.core).filter(|e| !terms.contains_key(e)).collect();
    TermDerivation { terms, unreachable }
}
