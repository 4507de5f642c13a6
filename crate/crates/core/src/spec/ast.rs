//! Syntax tree for specification modules, as produced by the parser.
//!
//! Names are unresolved here; [`super::validate`] turns a [`SpecModule`]
//! into an index-based [`super::ValidatedModule`].

use std::fmt;

/// Source location (1-based). Positions never take part in equality so that
/// a module and its pretty-printed re-parse compare equal.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A whole module: one or more `spec ... end` units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecModule {
    pub name: String,
    pub units: Vec<SpecUnit>,
}

impl SpecModule {
    pub fn sorts(&self) -> impl Iterator<Item = &SortDecl> {
        self.units.iter().map(|u| &u.sort)
    }

    pub fn ops(&self) -> impl Iterator<Item = &OpSig> {
        self.units.iter().flat_map(|u| u.ops.iter())
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.units.iter().flat_map(|u| u.axioms.iter())
    }
}

/// One `spec` block, which declares exactly one sort and its operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecUnit {
    pub name: String,
    pub sort: SortDecl,
    pub ops: Vec<OpSig>,
    pub axioms: Vec<Axiom>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    /// Parameter sorts, e.g. `Orderable` in `SortedSet[Orderable]`.
    pub params: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    Constructors,
    Observers,
    Others,
}

impl Section {
    pub fn keyword(self) -> &'static str {
        match self {
            Section::Constructors => "constructors",
            Section::Observers => "observers",
            Section::Others => "others",
        }
    }
}

/// A sort reference inside a signature; the bracket list is optional and,
/// when present, must repeat the declaration's parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortRef {
    pub name: String,
    pub params: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResultRef {
    Boolean,
    Sort(SortRef),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpSig {
    pub name: String,
    pub section: Section,
    pub args: Vec<SortRef>,
    pub result: ResultRef,
    pub partial: bool,
    pub domain: Option<Domain>,
    pub pos: Pos,
}

/// `largest(S) if not isEmpty(S);` together with the variables it uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    pub vars: Vec<(String, SortRef)>,
    pub params: Vec<String>,
    pub condition: Formula,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    /// Universally quantified variables, in order of first occurrence.
    pub universals: Vec<(String, SortRef)>,
    pub formula: Formula,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String, Pos),
    App(String, Vec<Term>, Pos),
}

impl Term {
    pub fn pos(&self) -> Pos {
        match self {
            Term::Var(_, p) | Term::App(_, _, p) => *p,
        }
    }

    pub(crate) fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v, _) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Term::App(_, args, _) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    /// Application of a boolean-valued operation.
    Atom(Term),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub(crate) fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Formula::Const(_) => {}
            Formula::Atom(t) => t.collect_vars(out),
            Formula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(f) => f.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}
