//! Abstract objects: per-element lookup tables read off a structure.
//!
//! Parameter elements become shared [`ParamRef`] objects that answer their
//! own operations from the structure; the same objects are handed to the
//! implementation under test, so parameter-typed results can be compared
//! by identity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::harness::Handle;
use crate::mapping::MethodTable;
use crate::model::{Structure, Value};
use crate::spec::{OpId, ResultSort, SortId, ValidatedModule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MockError {
    #[error("missing binding: `{op}` on element {element} expects element {result}, which has no concrete object")]
    MissingBinding { op: String, element: usize, result: usize },
}

/// Expected result of one operation application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Bool(bool),
    Param { sort: SortId, id: usize },
    /// Core-sorted result: the element, and once filled the concrete
    /// object that should be equal to the actual result.
    Core { element: usize, handle: Option<Handle> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractObject {
    pub sort: SortId,
    pub element: usize,
    /// Per operation: arguments other than the receiver → expected result.
    /// Tuples where a partial operation is undefined are absent.
    pub tables: BTreeMap<OpId, BTreeMap<Vec<usize>, Expected>>,
}

impl AbstractObject {
    pub fn lookup(&self, op: OpId, others: &[usize]) -> Option<&Expected> {
        self.tables.get(&op)?.get(others)
    }
}

#[derive(Debug)]
struct ParamOp {
    owner: SortId,
    name: String,
    method: String,
    receiver: usize,
    result: ResultSort,
    table: BTreeMap<Vec<usize>, Value>,
}

/// Tables of every operation owned by a non-core sort.
#[derive(Debug)]
pub struct ParamWorld {
    sort_names: Vec<String>,
    ops: Vec<ParamOp>,
}

/// A shared parameter object. Equality is identity: same world, sort and
/// element.
#[derive(Clone)]
pub struct ParamRef {
    world: Arc<ParamWorld>,
    sort: SortId,
    id: usize,
}

/// Answer of a parameter object's own operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Bool(bool),
    Param(ParamRef),
}

impl ParamRef {
    pub fn sort(&self) -> SortId {
        self.sort
    }

    /// Element id; stable for the lifetime of the world, usable as a hash.
    pub fn id(&self) -> usize {
        self.id
    }

    /// Calls a mapped method on this object. `args` are the remaining
    /// arguments in order; the receiver position comes from the mapping.
    pub fn invoke(&self, method: &str, args: &[ParamRef]) -> Result<ParamValue, String> {
        let op = self
            .world
            .ops
            .iter()
            .find(|o| o.owner == self.sort && (o.method == method || o.name == method))
            .ok_or_else(|| format!("{} has no method `{method}`", self.world.sort_names[self.sort]))?;
        if args.iter().any(|a| !Arc::ptr_eq(&a.world, &self.world)) {
            return Err("argument from another world".into());
        }
        let mut tuple: Vec<usize> = args.iter().map(|a| a.id).collect();
        tuple.insert(op.receiver.min(tuple.len()), self.id);
        match (op.table.get(&tuple), op.result) {
            (None, _) => Err(format!("`{}` is undefined here", op.name)),
            (Some(Value::Bool(b)), _) => Ok(ParamValue::Bool(*b)),
            (Some(Value::Elem(e)), ResultSort::Sort(s)) => Ok(ParamValue::Param(ParamRef {
                world: self.world.clone(),
                sort: s,
                id: *e,
            })),
            (Some(Value::Elem(_)), ResultSort::Bool) => Err("ill-typed table".into()),
        }
    }
}

impl PartialEq for ParamRef {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.world, &other.world) && self.sort == other.sort && self.id == other.id
    }
}

impl Eq for ParamRef {}

impl fmt::Debug for ParamRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.world.sort_names[self.sort], self.id)
    }
}

impl fmt::Display for ParamRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone)]
pub struct AbstractWorld {
    pub structure: Structure,
    pub core: SortId,
    /// Every object of every sort, ordered by sort then element.
    pub objects: Vec<AbstractObject>,
    params: Arc<ParamWorld>,
}

impl AbstractWorld {
    pub fn object(&self, sort: SortId, element: usize) -> &AbstractObject {
        let before: usize = self.structure.carriers[..sort].iter().sum();
        &self.objects[before + element]
    }

    pub fn core_objects(&self) -> impl Iterator<Item = &AbstractObject> {
        self.objects.iter().filter(move |o| o.sort == self.core)
    }

    pub fn param(&self, sort: SortId, id: usize) -> ParamRef {
        ParamRef {
            world: self.params.clone(),
            sort,
            id,
        }
    }

    /// Whether `p` is the shared object of `(sort, id)` in this world.
    pub fn is_param(&self, p: &ParamRef, sort: SortId, id: usize) -> bool {
        *p == self.param(sort, id)
    }
}

/// Splits a full argument tuple into the receiver and the other arguments.
pub fn split_receiver(args: &[usize], receiver: usize) -> (usize, Vec<usize>) {
    let mut rest = args.to_vec();
    let me = rest.remove(receiver);
    (me, rest)
}

pub fn build_abstract_objects(m: &ValidatedModule, st: &Structure, methods: &MethodTable) -> AbstractWorld {
    let mut objects: Vec<AbstractObject> = (0..m.sorts.len())
        .flat_map(|sort| {
            st.elements(sort).map(move |element| AbstractObject {
                sort,
                element,
                tables: BTreeMap::new(),
            })
        })
        .collect();
    let offset: Vec<usize> = (0..m.sorts.len()).map(|s| st.carriers[..s].iter().sum()).collect();
    let mut param_ops = Vec::new();
    for (o, info) in m.ops.iter().enumerate() {
        let Some(receiver) = methods.receivers[o] else { continue };
        for (args, v) in &st.tables[o] {
            let (me, rest) = split_receiver(args, receiver);
            let expected = match (v, info.result) {
                (Value::Bool(b), _) => Expected::Bool(*b),
                (Value::Elem(e), ResultSort::Sort(s)) if s == m.core => Expected::Core {
                    element: *e,
                    handle: None,
                },
                (Value::Elem(e), ResultSort::Sort(s)) => Expected::Param { sort: s, id: *e },
                (Value::Elem(_), ResultSort::Bool) => continue,
            };
            objects[offset[info.owner] + me]
                .tables
                .entry(o)
                .or_default()
                .insert(rest, expected);
        }
        if info.owner != m.core {
            param_ops.push(ParamOp {
                owner: info.owner,
                name: info.name.clone(),
                method: methods.method(o).to_string(),
                receiver,
                result: info.result,
                table: st.tables[o].clone(),
            });
        }
    }
    AbstractWorld {
        structure: st.clone(),
        core: m.core,
        objects,
        params: Arc::new(ParamWorld {
            sort_names: m.sorts.iter().map(|s| s.name.clone()).collect(),
            ops: param_ops,
        }),
    }
}

/// Fills every core-result slot of the bound core objects with the concrete
/// object of the expected element.
pub fn fill_expected_concrete(
    m: &ValidatedModule,
    world: &AbstractWorld,
    bindings: &BTreeMap<usize, Handle>,
) -> Result<AbstractWorld, MockError> {
    let mut out = world.clone();
    for obj in out.objects.iter_mut() {
        if obj.sort != world.core || !bindings.contains_key(&obj.element) {
            continue;
        }
        for (&op, table) in obj.tables.iter_mut() {
            for slot in table.values_mut() {
                if let Expected::Core { element, handle } = slot {
                    *handle = Some(*bindings.get(element).ok_or_else(|| MockError::MissingBinding {
                        op: m.ops[op].name.clone(),
                        element: obj.element,
                        result: *element,
                    })?);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, Case};
    use crate::model::find_structure;

    fn world() -> (ValidatedModule, MethodTable, AbstractWorld) {
        let fx = fixtures::load_fixture(Case::SortedSet, "correct").unwrap();
        let st = find_structure(&fx.module, &fixtures::default_scope(Case::SortedSet), &Default::default()).unwrap();
        let w = build_abstract_objects(&fx.module, &st, &fx.methods);
        (fx.module, fx.methods, w)
    }

    #[test]
    fn tables_agree_with_the_structure() {
        let (m, methods, w) = world();
        let st = &w.structure;
        for (o, info) in m.ops.iter().enumerate() {
            let Some(r) = methods.receivers[o] else { continue };
            for args in st.tuples(&m, o) {
                let (me, rest) = split_receiver(&args, r);
                let got = w.object(info.owner, me).lookup(o, &rest);
                match (st.apply(o, &args), got) {
                    (None, None) => {}
                    (Some(Value::Bool(b)), Some(Expected::Bool(c))) => assert_eq!(b, *c),
                    (Some(Value::Elem(e)), Some(Expected::Param { id, .. })) => assert_eq!(e, *id),
                    (Some(Value::Elem(e)), Some(Expected::Core { element, handle: None })) => assert_eq!(e, *element),
                    other => panic!("{} at {args:?}: {other:?}", info.name),
                }
            }
        }
    }

    #[test]
    fn empty_set_has_no_largest_entry() {
        let (m, _, w) = world();
        let is_empty = m.op_id("isEmpty").unwrap();
        let largest = m.op_id("largest").unwrap();
        let empties: Vec<_> = w
            .core_objects()
            .filter(|o| o.lookup(is_empty, &[]) == Some(&Expected::Bool(true)))
            .collect();
        assert_eq!(empties.len(), 1);
        assert_eq!(empties[0].lookup(largest, &[]), None);
        let others = w.core_objects().filter(|o| o.lookup(largest, &[]).is_some()).count();
        assert_eq!(others, 3);
    }

    #[test]
    fn parameter_objects_answer_their_order() {
        let (m, _, w) = world();
        let ord = m.sort_id("Orderable").unwrap();
        let (a, b) = (w.param(ord, 0), w.param(ord, 1));
        let ab = a.invoke("greaterEq", std::slice::from_ref(&b)).unwrap();
        let ba = b.invoke("geq", std::slice::from_ref(&a)).unwrap();
        assert_ne!(ab, ba);
        assert_eq!(a.invoke("greaterEq", std::slice::from_ref(&a)), Ok(ParamValue::Bool(true)));
        assert!(a.invoke("nope", &[]).is_err());
        assert!(w.is_param(&a, ord, 0));
        assert_ne!(a, b);
    }

    #[test]
    fn fill_binds_results_and_self() {
        let (m, _, w) = world();
        let insert = m.op_id("insert").unwrap();
        let bindings: BTreeMap<usize, Handle> = (0..4).map(|e| (e, Handle(100 + e))).collect();
        let filled = fill_expected_concrete(&m, &w, &bindings).unwrap();
        for obj in filled.core_objects() {
            for (args, exp) in &obj.tables[&insert] {
                let Expected::Core { element, handle } = exp else { panic!("{args:?}") };
                assert_eq!(*handle, Some(Handle(100 + element)));
            }
        }
        let self_loops = filled
            .core_objects()
            .flat_map(|o| o.tables[&insert].values().map(move |e| (o.element, e.clone())))
            .filter(|(me, e)| matches!(e, Expected::Core { element, .. } if element == me))
            .count();
        assert_eq!(self_loops, 4);
    }

    #[test]
    fn missing_binding_is_reported() {
        let (m, _, w) = world();
        let bindings: BTreeMap<usize, Handle> = (0..4).map(|e| (e, Handle(e))).collect();
        let mut partial = bindings.clone();
        let victim = (0..4)
            .find(|&e| {
                w.core_objects()
                    .any(|o| o.element != e && o.tables.values().flat_map(|t| t.values()).any(|x| matches!(x, Expected::Core { element, .. } if *element == e)))
            })
            .unwrap();
        partial.remove(&victim);
        assert!(matches!(
            fill_expected_concrete(&m, &w, &partial),
            Err(MockError::MissingBinding { result, .. }) if result == victim
        ));
    }
}
