//! Specification language: parsing, pretty-printing and validation of
//! algebraic specification modules.

pub mod ast;
mod lexer;
mod parser;
mod pretty;
mod validate;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ast::{Pos, SpecModule};
pub use parser::parse_syntax;
pub use pretty::pretty_print;
pub use validate::validate_module;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SpecError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown sort `{name}`")]
    UnknownSort { pos: Pos, name: String },
    #[error("{pos}: unknown operation `{name}`")]
    UnknownOp { pos: Pos, name: String },
    #[error("{pos}: undeclared variable `{name}`")]
    UnknownVar { pos: Pos, name: String },
    #[error("{pos}: ill-sorted: {msg}")]
    IllSorted { pos: Pos, msg: String },
    #[error("{pos}: duplicate declaration of `{name}`")]
    Duplicate { pos: Pos, name: String },
    #[error("{pos}: operation `{op}` is not a constructor and has no self argument of sort `{sort}`")]
    MissingSelf { pos: Pos, op: String, sort: String },
    #[error("{pos}: constructor `{op}` must produce its own sort `{sort}`")]
    ConstructorResult { pos: Pos, op: String, sort: String },
    #[error("{pos}: parameter sort `{sort}` declares constructor `{op}`")]
    ParameterConstructor { pos: Pos, op: String, sort: String },
    #[error("{pos}: partial operation `{op}` has no domain clause")]
    PartialWithoutDomain { pos: Pos, op: String },
    #[error("{pos}: total operation `{op}` has a domain clause")]
    DomainOnTotal { pos: Pos, op: String },
    #[error("{pos}: parameter list of `{name}` does not match its declaration")]
    ParamMismatch { pos: Pos, name: String },
    #[error("module must have exactly one core sort, found {found:?}")]
    CoreSort { found: Vec<String> },
    #[error("sort `{sort}` is not reachable from the core sort `{core}`")]
    Unreachable { sort: String, core: String },
    #[error("{0}")]
    Io(String),
}

impl SpecError {
    pub fn pos(&self) -> Option<Pos> {
        match self {
            SpecError::Syntax { pos, .. }
            | SpecError::UnknownSort { pos, .. }
            | SpecError::UnknownOp { pos, .. }
            | SpecError::UnknownVar { pos, .. }
            | SpecError::IllSorted { pos, .. }
            | SpecError::Duplicate { pos, .. }
            | SpecError::MissingSelf { pos, .. }
            | SpecError::ConstructorResult { pos, .. }
            | SpecError::ParameterConstructor { pos, .. }
            | SpecError::PartialWithoutDomain { pos, .. }
            | SpecError::DomainOnTotal { pos, .. }
            | SpecError::ParamMismatch { pos, .. } => Some(*pos),
            _ => None,
        }
    }
}

/// Parses specification text and checks it. The first problem found is
/// returned; use [`parse_syntax`] and [`validate_module`] for the full list.
pub fn parse_specification(text: &str) -> Result<SpecModule, SpecError> {
    let m = parse_syntax(text)?;
    validate_module(&m).map_err(|mut errs| errs.remove(0))?;
    Ok(m)
}

/// Loads every `.spec` file in a directory (sorted by file name) as one module.
pub fn load_spec_dir(dir: &Path) -> Result<SpecModule, SpecError> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| SpecError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "spec"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(SpecError::Io(format!("{}: no .spec files", dir.display())));
    }
    let mut text = String::new();
    for f in &files {
        let t = std::fs::read_to_string(f).map_err(|e| SpecError::Io(format!("{}: {e}", f.display())))?;
        text.push_str(&t);
        text.push('\n');
    }
    parse_specification(&text)
}

pub type SortId = usize;
pub type OpId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortKind {
    Core,
    Parameter,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Creator,
    Transformer,
    Observer,
    Other,
}

impl OpKind {
    pub fn is_constructor(self) -> bool {
        matches!(self, OpKind::Creator | OpKind::Transformer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResultSort {
    Bool,
    Sort(SortId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortInfo {
    pub name: String,
    pub kind: SortKind,
    pub params: Vec<SortId>,
}

/// A term with resolved operation ids; variables index the enclosing
/// axiom's (or domain's) variable list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(usize),
    App(OpId, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Prop {
    Const(bool),
    Atom(Expr),
    Eq(Expr, Expr),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Implies(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainCond {
    pub var_sorts: Vec<SortId>,
    /// Variable index bound to each argument position of the operation.
    pub params: Vec<usize>,
    pub condition: Prop,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpInfo {
    pub name: String,
    pub owner: SortId,
    pub args: Vec<SortId>,
    pub result: ResultSort,
    pub kind: OpKind,
    pub partial: bool,
    /// Position of the self argument; `None` only for creators.
    pub self_index: Option<usize>,
    pub domain: Option<DomainCond>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomInfo {
    pub vars: Vec<(String, SortId)>,
    pub prop: Prop,
    /// Canonical source form, used in reports.
    pub text: String,
}

/// A checked module with resolved names, operation kinds and the core sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedModule {
    pub name: String,
    pub sorts: Vec<SortInfo>,
    pub ops: Vec<OpInfo>,
    pub axioms: Vec<AxiomInfo>,
    pub core: SortId,
}

impl ValidatedModule {
    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s.name == name)
    }

    pub fn op_id(&self, name: &str) -> Option<OpId> {
        self.ops.iter().position(|o| o.name == name)
    }

    pub fn op(&self, id: OpId) -> &OpInfo {
        &self.ops[id]
    }

    pub fn ops_of_kind(&self, kind: OpKind) -> impl Iterator<Item = OpId> + '_ {
        self.ops
            .iter()
            .enumerate()
            .filter(move |(_, o)| o.kind == kind && o.owner == self.core)
            .map(|(i, _)| i)
    }

    pub fn creators(&self) -> Vec<OpId> {
        self.ops_of_kind(OpKind::Creator).collect()
    }

    pub fn transformers(&self) -> Vec<OpId> {
        self.ops_of_kind(OpKind::Transformer).collect()
    }

    /// Observers and `others` of the core sort; both are compared the same way.
    pub fn core_observers(&self) -> Vec<OpId> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, o)| o.owner == self.core && matches!(o.kind, OpKind::Observer | OpKind::Other))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn render_expr(&self, e: &Expr, vars: &[(String, SortId)]) -> String {
        match e {
            Expr::Var(i) => vars[*i].0.clone(),
            Expr::App(op, args) => {
                let args: Vec<String> = args.iter().map(|a| self.render_expr(a, vars)).collect();
                format!("{}({})", self.ops[*op].name, args.join(", "))
            }
        }
    }
}

impl fmt::Display for ValidatedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "module {} (core {})", self.name, self.sorts[self.core].name)
    }
}
