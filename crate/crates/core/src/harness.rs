//! Runs an implementation against the abstract objects and collects the
//! failure evidence.
//!
//! Every core element is built by replaying its constructor term, once for
//! a base object and once more per planned application, so no object is
//! ever observed after another method mutated it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mapping::MethodTable;
use crate::mock::{AbstractWorld, Expected, ParamRef};
use crate::model::{ConstructorTerm, TermArg, TermDerivation};
use crate::spec::{OpId, OpKind, ValidatedModule};

/// Opaque reference to a concrete object owned by an adapter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Handle(pub usize);

/// Argument passed to an adapter method, receiver excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Param(ParamRef),
    Core(Handle),
}

/// Result of an observation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observed {
    Bool(bool),
    Param(ParamRef),
    /// Something that is none of the shared parameter objects.
    Foreign(String),
}

/// The implementation under test, addressed by mapped method names.
/// Errors and panics are both treated as failed applications.
pub trait ImplementationAdapter {
    fn create(&mut self, method: &str, args: &[Arg]) -> Result<Handle, String>;
    /// May mutate `target` in place and return it.
    fn apply_transformer(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Handle, String>;
    fn observe(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Observed, String>;
    fn concrete_equals(&mut self, a: Handle, b: Handle) -> Result<bool, String>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Transformer results are compared with the implementation's equality.
    #[default]
    Equals,
    /// Transformer results are compared through every non-core observer.
    ObserversOnly,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "equals" => Ok(Mode::Equals),
            "observers" | "observers_only" | "observers-only" => Ok(Mode::ObserversOnly),
            _ => Err(format!("unknown mode `{s}` (expected equals or observers)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Equals => "equals",
            Mode::ObserversOnly => "observers",
        })
    }
}

fn guard<T>(f: impl FnOnce() -> Result<T, String>) -> Result<T, String> {
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(payload) => Err(match payload.downcast_ref::<&str>() {
            Some(s) => format!("panic: {s}"),
            None => match payload.downcast_ref::<String>() {
                Some(s) => format!("panic: {s}"),
                None => "panic".to_string(),
            },
        }),
    }
}

/// One planned application of an operation to a copy of an element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Use {
    Observe {
        op: OpId,
        others: Vec<usize>,
    },
    /// Apply `op`; in observers mode `check` names the observation made on
    /// the result.
    Transform {
        op: OpId,
        others: Vec<usize>,
        check: Option<(OpId, Vec<usize>)>,
    },
}

/// Every application planned against `element`, in execution order.
pub fn plan(world: &AbstractWorld, element: usize, mode: Mode) -> Vec<Use> {
    let obj = world.object(world.core, element);
    let mut uses = Vec::new();
    for (&op, table) in &obj.tables {
        for (others, exp) in table {
            match exp {
                Expected::Core { element: r, .. } => match mode {
                    Mode::Equals => uses.push(Use::Transform {
                        op,
                        others: others.clone(),
                        check: None,
                    }),
                    Mode::ObserversOnly => {
                        for (&o, t) in &world.object(world.core, *r).tables {
                            for (args, e) in t {
                                if !matches!(e, Expected::Core { .. }) {
                                    uses.push(Use::Transform {
                                        op,
                                        others: others.clone(),
                                        check: Some((o, args.clone())),
                                    });
                                }
                            }
                        }
                    }
                },
                _ => uses.push(Use::Observe {
                    op,
                    others: others.clone(),
                }),
            }
        }
    }
    uses
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteBinding {
    pub element: usize,
    pub term: ConstructorTerm,
    pub base: Handle,
    /// One per entry of [`plan`], consumed in order.
    pub copies: Vec<Handle>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionFailure {
    pub element: usize,
    /// The operation being applied when the adapter failed.
    pub op: String,
    /// Element the failing transformer was applied to.
    pub on: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Materialized {
    pub bindings: BTreeMap<usize, ConcreteBinding>,
    pub failures: Vec<ConstructionFailure>,
}

impl Materialized {
    pub fn handles(&self) -> BTreeMap<usize, Handle> {
        self.bindings.iter().map(|(&e, b)| (e, b.base)).collect()
    }
}

struct Ctx<'a> {
    m: &'a ValidatedModule,
    methods: &'a MethodTable,
    world: &'a AbstractWorld,
}

impl Ctx<'_> {
    fn replay(&self, adapter: &mut dyn ImplementationAdapter, t: &ConstructorTerm) -> Result<Handle, (OpId, Option<usize>, String)> {
        let receiver = self.methods.receivers[t.op];
        let mut args = Vec::new();
        let mut target = None;
        for (i, a) in t.args.iter().enumerate() {
            match a {
                TermArg::Elem { sort, id } => args.push(Arg::Param(self.world.param(*sort, *id))),
                TermArg::Sub(sub) => {
                    let h = self.replay(adapter, sub)?;
                    if receiver == Some(i) {
                        target = Some((h, sub.eval(&self.world.structure)));
                    } else {
                        args.push(Arg::Core(h));
                    }
                }
            }
        }
        let method = self.methods.method(t.op);
        match target {
            None => guard(|| adapter.create(method, &args)).map_err(|e| (t.op, None, e)),
            Some((h, on)) => guard(|| adapter.apply_transformer(h, method, &args)).map_err(|e| (t.op, on, e)),
        }
    }

    fn args(&self, op: OpId, others: &[usize], bases: &BTreeMap<usize, Handle>) -> Option<Vec<Arg>> {
        let receiver = self.methods.receivers[op]?;
        let mut sorts = self.m.ops[op].args.clone();
        sorts.remove(receiver);
        sorts
            .iter()
            .zip(others)
            .map(|(&s, &e)| {
                if s == self.m.core {
                    bases.get(&e).map(|h| Arg::Core(*h))
                } else {
                    Some(Arg::Param(self.world.param(s, e)))
                }
            })
            .collect()
    }
}

/// Builds the base object and all planned copies of every reachable
/// element. An element whose construction fails is left unbound.
pub fn materialize_concretes(
    m: &ValidatedModule,
    methods: &MethodTable,
    world: &AbstractWorld,
    terms: &TermDerivation,
    adapter: &mut dyn ImplementationAdapter,
    mode: Mode,
) -> Materialized {
    let ctx = Ctx { m, methods, world };
    let mut out = Materialized::default();
    for (&element, term) in &terms.terms {
        let n = plan(world, element, mode).len();
        let built: Result<Vec<Handle>, _> = (0..=n).map(|_| ctx.replay(adapter, term)).collect();
        match built {
            Ok(mut hs) => {
                let base = hs.remove(0);
                out.bindings.insert(
                    element,
                    ConcreteBinding {
                        element,
                        term: term.clone(),
                        base,
                        copies: hs,
                    },
                );
            }
            Err((op, on, message)) => out.failures.push(ConstructionFailure {
                element,
                op: m.ops[op].name.clone(),
                on,
                message,
            }),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pair {
    pub op: String,
    pub element: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub term: String,
    pub creator: String,
    /// Transformers used anywhere in the term.
    pub transformers: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    L1,
    L2,
    L3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub set: Evidence,
    pub op: String,
    pub element: usize,
    pub args: Vec<String>,
    /// Observer used to compare a transformer's result, in observers mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureLog {
    pub mode: Mode,
    /// (observer, element) pairs with a wrong observation.
    pub l1: BTreeSet<Pair>,
    /// (transformer, element) pairs with a wrong result.
    pub l2: BTreeSet<Pair>,
    /// Per creator: failed observations over elements built by it alone.
    pub l3: BTreeMap<String, usize>,
    /// Per transformer and element: observers that exposed the wrong result.
    #[serde(default)]
    pub witnesses: BTreeMap<String, BTreeMap<usize, BTreeSet<String>>>,
    pub provenance: BTreeMap<usize, Provenance>,
    pub comparisons: usize,
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
    pub construction_failures: Vec<ConstructionFailure>,
}

impl FailureLog {
    pub fn new(mode: Mode, creators: impl IntoIterator<Item = String>) -> Self {
        FailureLog {
            mode,
            l1: BTreeSet::new(),
            l2: BTreeSet::new(),
            l3: creators.into_iter().map(|c| (c, 0)).collect(),
            witnesses: BTreeMap::new(),
            provenance: BTreeMap::new(),
            comparisons: 0,
            checks: 0,
            mismatches: Vec::new(),
            construction_failures: Vec::new(),
        }
    }

    /// No evidence of any kind.
    pub fn is_clean(&self) -> bool {
        self.l1.is_empty() && self.l2.is_empty() && self.l3.values().all(|&n| n == 0)
    }
}

fn show_expected(m: &ValidatedModule, e: &Expected) -> String {
    match e {
        Expected::Bool(b) => b.to_string(),
        Expected::Param { sort, id } => format!("{}{}", m.sorts[*sort].name, id),
        Expected::Core { element, .. } => format!("{}{}", m.sorts[m.core].name, element),
    }
}

fn show_observed(r: &Result<Observed, String>) -> String {
    match r {
        Ok(Observed::Bool(b)) => b.to_string(),
        Ok(Observed::Param(p)) => p.to_string(),
        Ok(Observed::Foreign(s)) => format!("foreign {s}"),
        Err(e) => format!("error: {e}"),
    }
}

fn agrees(world: &AbstractWorld, got: &Result<Observed, String>, exp: &Expected) -> bool {
    match (got, exp) {
        (Ok(Observed::Bool(a)), Expected::Bool(b)) => a == b,
        (Ok(Observed::Param(p)), Expected::Param { sort, id }) => world.is_param(p, *sort, *id),
        _ => false,
    }
}

fn arg_names(m: &ValidatedModule, methods: &MethodTable, op: OpId, others: &[usize]) -> Vec<String> {
    let mut sorts = m.ops[op].args.clone();
    if let Some(r) = methods.receivers[op] {
        sorts.remove(r);
    }
    sorts.iter().zip(others).map(|(&s, &e)| format!("{}{}", m.sorts[s].name, e)).collect()
}

/// Runs every planned comparison. `world` must have its core slots filled
/// from the same materialization.
pub fn run_comparisons(
    m: &ValidatedModule,
    methods: &MethodTable,
    world: &AbstractWorld,
    mat: &Materialized,
    adapter: &mut dyn ImplementationAdapter,
    mode: Mode,
) -> FailureLog {
    let ctx = Ctx { m, methods, world };
    let mut log = FailureLog::new(mode, m.creators().into_iter().map(|c| m.ops[c].name.clone()));
    let bases = mat.handles();

    for b in mat.bindings.values() {
        let transformers: BTreeSet<String> = b.term.transformers(m).into_iter().map(|t| m.ops[t].name.clone()).collect();
        log.provenance.insert(
            b.element,
            Provenance {
                term: b.term.render(m),
                creator: m.ops[b.term.creator()].name.clone(),
                transformers,
            },
        );
    }

    for f in &mat.failures {
        let op = m.op_id(&f.op).expect("failure names a module operation");
        match (m.ops[op].kind, f.on) {
            (OpKind::Creator, _) | (_, None) => *log.l3.entry(f.op.clone()).or_default() += 1,
            (_, Some(on)) => {
                log.l2.insert(Pair {
                    op: f.op.clone(),
                    element: on,
                });
            }
        }
        log.construction_failures.push(f.clone());
    }

    for b in mat.bindings.values() {
        let e = b.element;
        let obj = world.object(m.core, e);
        let creator_only = b.term.subterms().next().is_none();
        let uses = plan(world, e, mode);
        let mut counted: BTreeSet<(OpId, Vec<usize>)> = BTreeSet::new();
        for (u, &copy) in uses.iter().zip(&b.copies) {
            match u {
                Use::Observe { op, others } => {
                    log.comparisons += 1;
                    let exp = obj.lookup(*op, others).expect("planned from the table");
                    let Some(args) = ctx.args(*op, others, &bases) else { continue };
                    log.checks += 1;
                    let method = methods.method(*op);
                    let got = guard(|| adapter.observe(copy, method, &args));
                    if !agrees(world, &got, exp) {
                        let name = m.ops[*op].name.clone();
                        log.l1.insert(Pair { op: name.clone(), element: e });
                        if creator_only {
                            *log.l3.entry(m.ops[b.term.op].name.clone()).or_default() += 1;
                        }
                        log.mismatches.push(Mismatch {
                            set: Evidence::L1,
                            op: name,
                            element: e,
                            args: arg_names(m, methods, *op, others),
                            via: None,
                            expected: show_expected(m, exp),
                            actual: show_observed(&got),
                        });
                    }
                }
                Use::Transform { op, others, check } => {
                    if counted.insert((*op, others.clone())) {
                        log.comparisons += 1;
                    }
                    let Some(Expected::Core { element: r, handle }) = obj.lookup(*op, others) else {
                        unreachable!("planned from a core-result entry")
                    };
                    let Some(args) = ctx.args(*op, others, &bases) else { continue };
                    let method = methods.method(*op);
                    let applied = guard(|| adapter.apply_transformer(copy, method, &args));
                    let (ok, via, expected, actual) = match (check, applied) {
                        (_, Err(err)) => (false, None, format!("{}{}", m.sorts[m.core].name, r), format!("error: {err}")),
                        (None, Ok(h)) => {
                            let Some(want) = handle else { continue };
                            log.checks += 1;
                            let eq = guard(|| adapter.concrete_equals(h, *want));
                            let actual = match &eq {
                                Ok(b) => format!("equals -> {b}"),
                                Err(err) => format!("error: {err}"),
                            };
                            (eq == Ok(true), None, format!("{}{}", m.sorts[m.core].name, r), actual)
                        }
                        (Some((o, oargs)), Ok(h)) => {
                            let target = world.object(m.core, *r);
                            let exp = target.lookup(*o, oargs).expect("planned from the result's table");
                            let Some(args) = ctx.args(*o, oargs, &bases) else { continue };
                            log.checks += 1;
                            let om = methods.method(*o);
                            let got = guard(|| adapter.observe(h, om, &args));
                            let ok = agrees(world, &got, exp);
                            (ok, Some(m.ops[*o].name.clone()), show_expected(m, exp), show_observed(&got))
                        }
                    };
                    if !ok {
                        let name = m.ops[*op].name.clone();
                        log.l2.insert(Pair { op: name.clone(), element: e });
                        if let Some(v) = &via {
                            log.witnesses
                                .entry(name.clone())
                                .or_default()
                                .entry(e)
                                .or_default()
                                .insert(v.clone());
                        }
                        log.mismatches.push(Mismatch {
                            set: Evidence::L2,
                            op: name,
                            element: e,
                            args: arg_names(m, methods, *op, others),
                            via,
                            expected,
                            actual,
                        });
                    }
                }
            }
        }
    }
    log
}
