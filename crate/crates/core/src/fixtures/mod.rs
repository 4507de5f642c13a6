//! Case studies: the SortedSet and MapChain specifications, a reference
//! implementation of each, and seeded-fault variants of those.

mod mapchain;
mod sortedset;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::{Arg, Handle, ImplementationAdapter, Mode};
use crate::localizer::{Diagnosis, Verdict};
use crate::mapping::{parse_refinement, MethodTable, Refinement};
use crate::mock::ParamRef;
use crate::model::Scope;
use crate::spec::{parse_specification, validate_module, ValidatedModule};

pub use mapchain::{ChainMap, MapFault};
pub use sortedset::{SetFault, TreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    SortedSet,
    MapChain,
}

impl Case {
    pub const ALL: [Case; 2] = [Case::SortedSet, Case::MapChain];

    pub fn spec_text(self) -> &'static str {
        match self {
            Case::SortedSet => concat!(
                include_str!("../../fixtures/sortedset/SortedSet.spec"),
                include_str!("../../fixtures/sortedset/TotalOrder.spec"),
            ),
            Case::MapChain => concat!(
                include_str!("../../fixtures/mapchain/Key.spec"),
                include_str!("../../fixtures/mapchain/MapChain.spec"),
                include_str!("../../fixtures/mapchain/Value.spec"),
            ),
        }
    }

    pub fn map_text(self) -> &'static str {
        match self {
            Case::SortedSet => include_str!("../../fixtures/sortedset/SortedSet.map"),
            Case::MapChain => include_str!("../../fixtures/mapchain/MapChain.map"),
        }
    }
}

impl FromStr for Case {
    type Err = FixtureError;

    fn from_str(s: &str) -> Result<Self, FixtureError> {
        match s.to_ascii_lowercase().as_str() {
            "sortedset" => Ok(Case::SortedSet),
            "mapchain" => Ok(Case::MapChain),
            _ => Err(FixtureError::UnknownCase(s.to_string())),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::SortedSet => "sortedset",
            Case::MapChain => "mapchain",
        })
    }
}

/// What a run on a variant should conclude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// The target operation is named guilty.
    First,
    /// Another operation is named guilty and the target is in the FSS.
    Second,
    /// No verdict and no suspects.
    NoSuspect,
    /// No evidence at all.
    Conformant,
}

impl Expectation {
    pub fn met(self, target: Option<&str>, d: &Diagnosis, clean: bool) -> bool {
        match self {
            Expectation::First => target.is_some() && d.verdict.guilty() == target,
            Expectation::Second => match (&d.verdict, target) {
                (Verdict::Guilty(g), Some(t)) => g != t && d.fss.contains(t),
                _ => false,
            },
            Expectation::NoSuspect => d.verdict == Verdict::Inconclusive && d.fss.is_empty(),
            Expectation::Conformant => clean && d.verdict == Verdict::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FaultVariant {
    pub case: Case,
    pub id: &'static str,
    /// Operation whose implementing method carries the fault.
    pub target: Option<&'static str>,
    pub description: &'static str,
    pub expect_equals: Expectation,
    pub expect_observers: Option<Expectation>,
}

impl FaultVariant {
    pub fn expectation(&self, mode: Mode) -> Option<Expectation> {
        match mode {
            Mode::Equals => Some(self.expect_equals),
            Mode::ObserversOnly => self.expect_observers,
        }
    }
}

const fn variant(
    case: Case,
    id: &'static str,
    target: Option<&'static str>,
    description: &'static str,
    expect_equals: Expectation,
    expect_observers: Option<Expectation>,
) -> FaultVariant {
    FaultVariant {
        case,
        id,
        target,
        description,
        expect_equals,
        expect_observers,
    }
}

use Expectation::*;

pub const VARIANTS: &[FaultVariant] = &[
    variant(Case::SortedSet, "correct", None, "reference implementation", Conformant, Some(Conformant)),
    variant(Case::SortedSet, "isEmpty-1", Some("isEmpty"), "isEmpty also holds for one-element sets", First, None),
    variant(Case::SortedSet, "isEmpty-2", Some("isEmpty"), "isEmpty answers the negation", First, None),
    variant(Case::SortedSet, "isIn-1", Some("isIn"), "isIn only looks at the smallest element", First, None),
    variant(Case::SortedSet, "largest-1", Some("largest"), "largest returns the first stored element", First, None),
    variant(Case::SortedSet, "largest-2", Some("largest"), "largest scans with the comparison reversed", First, None),
    variant(
        Case::SortedSet,
        "private-insert",
        Some("insert"),
        "the private helper behind insert appends instead of keeping order",
        First,
        None,
    ),
    variant(
        Case::SortedSet,
        "public-insert",
        Some("insert"),
        "insert skips the helper for elements below the current largest",
        First,
        None,
    ),
    variant(Case::MapChain, "correct", None, "reference implementation", Conformant, Some(Conformant)),
    variant(Case::MapChain, "get-1", Some("get"), "get never looks at the last chain node", NoSuspect, Some(First)),
    variant(
        Case::MapChain,
        "get-2",
        Some("get"),
        "get misses the tail node of chains longer than one",
        NoSuspect,
        Some(First),
    ),
    variant(
        Case::MapChain,
        "get-3",
        Some("get"),
        "get starts at the second node of chains longer than one",
        NoSuspect,
        Some(First),
    ),
    variant(Case::MapChain, "isEmpty-1", Some("isEmpty"), "isEmpty also holds for one-entry maps", First, None),
    variant(Case::MapChain, "isEmpty-2", Some("isEmpty"), "isEmpty answers the negation", First, None),
    variant(
        Case::MapChain,
        "put-1",
        Some("put"),
        "put on a present key adds a duplicate node and counts it",
        First,
        None,
    ),
    variant(
        Case::MapChain,
        "put-2",
        Some("put"),
        "put drops keys above every stored key but still counts them",
        First,
        None,
    ),
    variant(
        Case::MapChain,
        "put-3",
        Some("put"),
        "put at the head of the chain leaves the count unchanged",
        First,
        Some(Second),
    ),
    variant(
        Case::MapChain,
        "remove-1",
        Some("remove"),
        "remove decrements the count even when the key is absent",
        First,
        Some(Second),
    ),
    variant(
        Case::MapChain,
        "remove-2",
        Some("remove"),
        "remove unlinks the head node instead of the matching one",
        First,
        None,
    ),
];

pub fn variants(case: Case) -> impl Iterator<Item = &'static FaultVariant> {
    VARIANTS.iter().filter(move |v| v.case == case)
}

pub fn find_variant(case: Case, id: &str) -> Result<&'static FaultVariant, FixtureError> {
    variants(case)
        .find(|v| v.id == id)
        .ok_or_else(|| FixtureError::UnknownVariant {
            case,
            id: id.to_string(),
        })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FixtureError {
    #[error("unknown case study `{0}` (expected sortedset or mapchain)")]
    UnknownCase(String),
    #[error("unknown variant `{id}` of {case}")]
    UnknownVariant { case: Case, id: String },
    #[error("implementation id `{0}` must look like CASE:VARIANT")]
    BadImplId(String),
}

/// Scope the case study is run with by default.
pub fn default_scope(case: Case) -> Scope {
    match case {
        Case::SortedSet => Scope::new().with("SortedSet", 4).with("Orderable", 2),
        Case::MapChain => Scope::new().with("MapChain", 4).with("Key", 2).with("Value", 1),
    }
}

/// A fresh adapter for a variant.
pub fn adapter(case: Case, id: &str) -> Result<Box<dyn ImplementationAdapter>, FixtureError> {
    find_variant(case, id)?;
    Ok(match case {
        Case::SortedSet => Box::new(sortedset::SetAdapter::new(SetFault::from_id(id))),
        Case::MapChain => Box::new(mapchain::MapAdapter::new(MapFault::from_id(id))),
    })
}

/// Parses `CASE:VARIANT`.
pub fn parse_impl_id(s: &str) -> Result<(Case, &'static FaultVariant), FixtureError> {
    let (case, id) = s.split_once(':').ok_or_else(|| FixtureError::BadImplId(s.to_string()))?;
    let case: Case = case.parse()?;
    Ok((case, find_variant(case, id)?))
}

pub struct Fixture {
    pub variant: &'static FaultVariant,
    pub module: ValidatedModule,
    pub refinement: Refinement,
    pub methods: MethodTable,
    pub adapter: Box<dyn ImplementationAdapter>,
}

pub fn load_fixture(case: Case, id: &str) -> Result<Fixture, FixtureError> {
    let variant = find_variant(case, id)?;
    let module = validate_module(&parse_specification(case.spec_text()).expect("fixture spec parses"))
        .expect("fixture spec validates");
    let refinement = parse_refinement(case.map_text()).expect("fixture mapping parses");
    let methods = refinement.resolve(&module).expect("fixture mapping resolves");
    Ok(Fixture {
        variant,
        module,
        refinement,
        methods,
        adapter: adapter(case, id)?,
    })
}

/// Handle-indexed object storage shared by the fixture adapters.
#[derive(Debug)]
struct Store<T> {
    objects: Vec<T>,
}

impl<T> Default for Store<T> {
    fn default() -> Self {
        Store { objects: Vec::new() }
    }
}

impl<T> Store<T> {
    fn add(&mut self, t: T) -> Handle {
        self.objects.push(t);
        Handle(self.objects.len() - 1)
    }

    fn get(&self, h: Handle) -> Result<&T, String> {
        self.objects.get(h.0).ok_or_else(|| format!("no object {}", h.0))
    }

    fn get_mut(&mut self, h: Handle) -> Result<&mut T, String> {
        self.objects.get_mut(h.0).ok_or_else(|| format!("no object {}", h.0))
    }
}

fn param(args: &[Arg], i: usize) -> Result<&ParamRef, String> {
    match args.get(i) {
        Some(Arg::Param(p)) => Ok(p),
        other => Err(format!("argument {i}: expected a parameter object, got {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_counts() {
        assert_eq!(variants(Case::SortedSet).count(), 8);
        assert_eq!(variants(Case::MapChain).count(), 11);
    }

    #[test]
    fn every_variant_loads() {
        for v in VARIANTS {
            let fx = load_fixture(v.case, v.id).unwrap();
            assert_eq!(fx.variant, v);
            if let Some(t) = v.target {
                assert!(fx.module.op_id(t).is_some(), "{t}");
            }
        }
    }

    #[test]
    fn unknown_variant() {
        assert!(matches!(
            load_fixture(Case::MapChain, "nope"),
            Err(FixtureError::UnknownVariant { .. })
        ));
        assert!(matches!("tree".parse::<Case>(), Err(FixtureError::UnknownCase(_))));
    }

    #[test]
    fn impl_ids() {
        let (case, v) = parse_impl_id("mapchain:put-3").unwrap();
        assert_eq!(case, Case::MapChain);
        assert_eq!(v.target, Some("put"));
        assert!(matches!(parse_impl_id("mapchain"), Err(FixtureError::BadImplId(_))));
    }
}
