//! Refinement mappings: which implementation type refines each sort and
//! which method implements each operation.
//!
//! ```text
//! refinement SortedSetAsTreeSet
//!   SortedSet refines as class TreeSet
//!     empty as TreeSet()
//!     insert as void insert(E e)
//!   Orderable refines as type E
//!     geq as boolean greaterEq(E e)
//! end
//! ```
//!
//! An operation line may end in `self N` to name the argument position
//! that receives the call; by default it is the first argument of the
//! owning sort.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spec::{OpId, OpKind, SortId, ValidatedModule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MappingError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown sort `{sort}`")]
    UnknownSort { line: usize, sort: String },
    #[error("line {line}: unknown operation `{op}`")]
    UnknownOp { line: usize, op: String },
    #[error("line {line}: operation `{op}` belongs to sort `{owner}`, not `{sort}`")]
    WrongOwner {
        line: usize,
        op: String,
        owner: String,
        sort: String,
    },
    #[error("line {line}: `{name}` is mapped twice")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: `self {index}` is not an argument of sort `{sort}` in `{op}`")]
    BadSelf {
        line: usize,
        op: String,
        index: usize,
        sort: String,
    },
    #[error("operation `{0}` has no method in the mapping")]
    Unmapped(String),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Class,
    Type,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpRefinement {
    pub op: String,
    pub signature: String,
    pub method: String,
    pub self_index: Option<usize>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortRefinement {
    pub sort: String,
    pub kind: TypeKind,
    pub type_name: String,
    pub ops: Vec<OpRefinement>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refinement {
    pub name: String,
    pub sorts: Vec<SortRefinement>,
}

/// Resolved mapping: per operation, the method name and receiver position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodTable {
    pub methods: Vec<String>,
    pub receivers: Vec<Option<usize>>,
    pub type_names: Vec<Option<String>>,
}

impl MethodTable {
    pub fn method(&self, op: OpId) -> &str {
        &self.methods[op]
    }

    pub fn op_for(&self, m: &ValidatedModule, sort: SortId, method: &str) -> Option<OpId> {
        (0..m.ops.len()).find(|&o| m.ops[o].owner == sort && self.methods[o] == method)
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> MappingError {
    MappingError::Syntax { line, msg: msg.into() }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

/// Method name inside a Java-like signature: the word before `(`.
fn method_name(sig: &str) -> Option<String> {
    let head = &sig[..sig.find('(')?];
    let name = head.split_whitespace().last()?;
    is_ident(name).then(|| name.to_string())
}

pub fn parse_refinement(text: &str) -> Result<Refinement, MappingError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split("//").next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (n, first) = lines.next().ok_or_else(|| syntax(1, "empty mapping"))?;
    let name = match first.split_whitespace().collect::<Vec<_>>()[..] {
        ["refinement", name] if is_ident(name) => name.to_string(),
        _ => return Err(syntax(n, "expected `refinement NAME`")),
    };

    let mut sorts: Vec<SortRefinement> = Vec::new();
    let mut ended = false;
    for (n, line) in lines.by_ref() {
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[..] {
            ["end"] => {
                ended = true;
                break;
            }
            [sort, "refines", "as", kind, ty] => {
                let kind = match kind {
                    "class" => TypeKind::Class,
                    "type" => TypeKind::Type,
                    _ => return Err(syntax(n, "expected `class` or `type`")),
                };
                if !is_ident(sort) || !is_ident(ty) {
                    return Err(syntax(n, "expected `SORT refines as class|type NAME`"));
                }
                sorts.push(SortRefinement {
                    sort: sort.to_string(),
                    kind,
                    type_name: ty.to_string(),
                    ops: Vec::new(),
                    line: n,
                });
            }
            [op, "as", ..] => {
                let current = sorts.last_mut().ok_or_else(|| syntax(n, "operation before any sort"))?;
                if !is_ident(op) {
                    return Err(syntax(n, format!("bad operation name `{op}`")));
                }
                let mut sig = line[line.find(" as ").expect("matched `as`") + 4..].trim();
                let mut self_index = None;
                if let Some(p) = sig.rfind(" self ") {
                    let idx = sig[p + 6..].trim();
                    self_index = Some(idx.parse().map_err(|_| syntax(n, format!("bad self position `{idx}`")))?);
                    sig = sig[..p].trim();
                }
                let method = method_name(sig).ok_or_else(|| syntax(n, "expected a method signature `name(...)`"))?;
                current.ops.push(OpRefinement {
                    op: op.to_string(),
                    signature: sig.to_string(),
                    method,
                    self_index,
                    line: n,
                });
            }
            _ => return Err(syntax(n, format!("unexpected `{line}`"))),
        }
    }
    if !ended {
        return Err(syntax(text.lines().count().max(1), "missing `end`"));
    }
    if let Some((n, _)) = lines.next() {
        return Err(syntax(n, "text after `end`"));
    }
    Ok(Refinement { name, sorts })
}

pub fn load_refinement(path: &Path) -> Result<Refinement, MappingError> {
    let text = std::fs::read_to_string(path).map_err(|e| MappingError::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })?;
    parse_refinement(&text)
}

impl Refinement {
    /// Checks the mapping against a module; every operation must be mapped
    /// exactly once, under its owning sort.
    pub fn resolve(&self, m: &ValidatedModule) -> Result<MethodTable, MappingError> {
        let mut methods: Vec<Option<String>> = vec![None; m.ops.len()];
        let mut receivers = vec![None; m.ops.len()];
        let mut type_names = vec![None; m.sorts.len()];
        for sr in &self.sorts {
            let sort = m.sort_id(&sr.sort).ok_or_else(|| MappingError::UnknownSort {
                line: sr.line,
                sort: sr.sort.clone(),
            })?;
            if type_names[sort].replace(sr.type_name.clone()).is_some() {
                return Err(MappingError::Duplicate {
                    line: sr.line,
                    name: sr.sort.clone(),
                });
            }
            for or in &sr.ops {
                let op = m.op_id(&or.op).ok_or_else(|| MappingError::UnknownOp {
                    line: or.line,
                    op: or.op.clone(),
                })?;
                let info = &m.ops[op];
                if info.owner != sort {
                    return Err(MappingError::WrongOwner {
                        line: or.line,
                        op: or.op.clone(),
                        owner: m.sorts[info.owner].name.clone(),
                        sort: sr.sort.clone(),
                    });
                }
                if methods[op].replace(or.method.clone()).is_some() {
                    return Err(MappingError::Duplicate {
                        line: or.line,
                        name: or.op.clone(),
                    });
                }
                receivers[op] = match (or.self_index, info.kind) {
                    (None, _) => info.self_index,
                    (Some(i), kind) if kind != OpKind::Creator && info.args.get(i) == Some(&sort) => Some(i),
                    (Some(i), _) => {
                        return Err(MappingError::BadSelf {
                            line: or.line,
                            op: or.op.clone(),
                            index: i,
                            sort: sr.sort.clone(),
                        })
                    }
                };
            }
        }
        let methods = methods
            .into_iter()
            .enumerate()
            .map(|(o, mm)| mm.ok_or_else(|| MappingError::Unmapped(m.ops[o].name.clone())))
            .collect::<Result<_, _>>()?;
        Ok(MethodTable {
            methods,
            receivers,
            type_names,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{parse_specification, validate_module};

    const SPEC: &str = "spec Stack sorts Stack[Elem]
        constructors new: -> Stack[Elem]; push: Stack[Elem] Elem -> Stack[Elem];
        observers empty: Stack[Elem]; end
        spec Elem sorts Elem end";

    const MAP: &str = "refinement StackAsList
      Stack refines as class ListStack
        new as ListStack()
        push as void push(E e)   // mutates
        empty as boolean isEmpty()
      Elem refines as type E
    end";

    fn module() -> ValidatedModule {
        validate_module(&parse_specification(SPEC).unwrap()).unwrap()
    }

    #[test]
    fn parses_sorts_and_methods() {
        let r = parse_refinement(MAP).unwrap();
        assert_eq!(r.name, "StackAsList");
        assert_eq!(r.sorts.len(), 2);
        assert_eq!(r.sorts[0].kind, TypeKind::Class);
        assert_eq!(r.sorts[0].ops[1].method, "push");
        assert_eq!(r.sorts[0].ops[1].signature, "void push(E e)");
        assert_eq!(r.sorts[0].ops[2].method, "isEmpty");
        assert!(r.sorts[1].ops.is_empty());
    }

    #[test]
    fn resolves_against_module() {
        let m = module();
        let t = parse_refinement(MAP).unwrap().resolve(&m).unwrap();
        assert_eq!(t.method(m.op_id("empty").unwrap()), "isEmpty");
        assert_eq!(t.receivers[m.op_id("push").unwrap()], Some(0));
        assert_eq!(t.receivers[m.op_id("new").unwrap()], None);
        assert_eq!(t.op_for(&m, m.core, "push"), m.op_id("push"));
    }

    #[test]
    fn explicit_self_position() {
        let m = module();
        let text = MAP.replace("void push(E e)", "void push(E e) self 0");
        let t = parse_refinement(&text).unwrap().resolve(&m).unwrap();
        assert_eq!(t.receivers[m.op_id("push").unwrap()], Some(0));
        let bad = MAP.replace("void push(E e)", "void push(E e) self 1");
        assert!(matches!(
            parse_refinement(&bad).unwrap().resolve(&m),
            Err(MappingError::BadSelf { index: 1, .. })
        ));
    }

    #[test]
    fn unmapped_operation_is_an_error() {
        let m = module();
        let text = MAP.replace("empty as boolean isEmpty()", "");
        assert_eq!(
            parse_refinement(&text).unwrap().resolve(&m),
            Err(MappingError::Unmapped("empty".into()))
        );
    }

    #[test]
    fn operation_under_wrong_sort() {
        let m = module();
        let text = MAP.replace("Elem refines as type E", "Elem refines as type E\n push as void p()");
        assert!(matches!(
            parse_refinement(&text).unwrap().resolve(&m),
            Err(MappingError::Duplicate { .. } | MappingError::WrongOwner { .. })
        ));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert_eq!(
            parse_refinement("refinement X\n  S refines like class T\nend"),
            Err(syntax(2, "unexpected `S refines like class T`"))
        );
        assert!(matches!(
            parse_refinement("refinement X\n S refines as class T\n"),
            Err(MappingError::Syntax { msg, .. }) if msg.contains("end")
        ));
        assert!(matches!(
            parse_refinement("refinement X\n S refines as class T\n f as nothing\nend"),
            Err(MappingError::Syntax { line: 3, .. })
        ));
    }
}
