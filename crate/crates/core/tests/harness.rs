use std::collections::BTreeSet;

use faultspec::fixtures::{self, Case, Fixture};
use faultspec::harness::{
    materialize_concretes, plan, run_comparisons, Arg, FailureLog, Handle, ImplementationAdapter, Mode, Observed,
};
use faultspec::mock::{build_abstract_objects, fill_expected_concrete, AbstractWorld};
use faultspec::model::{
    derive_construction_terms, find_structure, SearchOptions, Structure, TermArg, TermDerivation, Value,
};

struct Setup {
    fx: Fixture,
    st: Structure,
    terms: TermDerivation,
    world: AbstractWorld,
}

fn setup(case: Case, variant: &str) -> Setup {
    let fx = fixtures::load_fixture(case, variant).unwrap();
    let st = find_structure(&fx.module, &fixtures::default_scope(case), &SearchOptions::default()).unwrap();
    let terms = derive_construction_terms(&fx.module, &st);
    let world = build_abstract_objects(&fx.module, &st, &fx.methods);
    Setup { fx, st, terms, world }
}

fn execute(s: &Setup, adapter: &mut dyn ImplementationAdapter, mode: Mode) -> FailureLog {
    let m = &s.fx.module;
    let mat = materialize_concretes(m, &s.fx.methods, &s.world, &s.terms, adapter, mode);
    let world = fill_expected_concrete(m, &s.world, &mat.handles()).unwrap();
    run_comparisons(m, &s.fx.methods, &world, &mat, adapter, mode)
}

/// Records every call and can override one observer's answer.
struct Recording {
    inner: Box<dyn ImplementationAdapter>,
    calls: Vec<String>,
    fixed: Option<(&'static str, bool)>,
}

impl Recording {
    fn new(inner: Box<dyn ImplementationAdapter>) -> Self {
        Recording {
            inner,
            calls: Vec::new(),
            fixed: None,
        }
    }
}

fn show(args: &[Arg]) -> String {
    args.iter()
        .map(|a| match a {
            Arg::Param(p) => p.to_string(),
            Arg::Core(h) => format!("#{}", h.0),
        })
        .collect::<Vec<_>>()
        .join(",")
}

impl ImplementationAdapter for Recording {
    fn create(&mut self, method: &str, args: &[Arg]) -> Result<Handle, String> {
        let h = self.inner.create(method, args)?;
        self.calls.push(format!("create {method}({}) -> {}", show(args), h.0));
        Ok(h)
    }

    fn apply_transformer(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Handle, String> {
        self.calls.push(format!("apply {}.{method}({})", target.0, show(args)));
        self.inner.apply_transformer(target, method, args)
    }

    fn observe(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Observed, String> {
        self.calls.push(format!("observe {}.{method}", target.0));
        match self.fixed {
            Some((name, v)) if name == method => Ok(Observed::Bool(v)),
            _ => self.inner.observe(target, method, args),
        }
    }

    fn concrete_equals(&mut self, a: Handle, b: Handle) -> Result<bool, String> {
        self.calls.push(format!("equals {} {}", a.0, b.0));
        self.inner.concrete_equals(a, b)
    }
}

struct Exploding;

impl ImplementationAdapter for Exploding {
    fn create(&mut self, _: &str, _: &[Arg]) -> Result<Handle, String> {
        panic!("create exploded")
    }
    fn apply_transformer(&mut self, _: Handle, _: &str, _: &[Arg]) -> Result<Handle, String> {
        panic!("apply exploded")
    }
    fn observe(&mut self, _: Handle, _: &str, _: &[Arg]) -> Result<Observed, String> {
        panic!("observe exploded")
    }
    fn concrete_equals(&mut self, _: Handle, _: Handle) -> Result<bool, String> {
        panic!("equals exploded")
    }
}

/// Builds objects normally but fails every observation and comparison.
struct FailingObservations(Box<dyn ImplementationAdapter>);

impl ImplementationAdapter for FailingObservations {
    fn create(&mut self, method: &str, args: &[Arg]) -> Result<Handle, String> {
        self.0.create(method, args)
    }
    fn apply_transformer(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Handle, String> {
        self.0.apply_transformer(target, method, args)
    }
    fn observe(&mut self, _: Handle, _: &str, _: &[Arg]) -> Result<Observed, String> {
        Err("observation refused".into())
    }
    fn concrete_equals(&mut self, _: Handle, _: Handle) -> Result<bool, String> {
        panic!("no equality")
    }
}

#[test]
fn correct_implementation_leaves_no_evidence() {
    for case in Case::ALL {
        for mode in [Mode::Equals, Mode::ObserversOnly] {
            let s = setup(case, "correct");
            let log = execute(&s, fixtures::adapter(case, "correct").unwrap().as_mut(), mode);
            assert!(log.l1.is_empty() && log.l2.is_empty(), "{case} {mode}: {:?}", log.mismatches);
            assert!(log.l3.values().all(|&n| n == 0));
            assert!(log.is_clean());
        }
    }
}

#[test]
fn always_empty_fails_only_is_empty_on_nonempty_sets() {
    let s = setup(Case::SortedSet, "correct");
    let m = &s.fx.module;
    let mut rec = Recording::new(fixtures::adapter(Case::SortedSet, "correct").unwrap());
    rec.fixed = Some(("isEmpty", true));
    let log = execute(&s, &mut rec, Mode::Equals);
    let is_empty = m.op_id("isEmpty").unwrap();
    let nonempty: BTreeSet<usize> = s
        .st
        .elements(m.core)
        .filter(|&e| s.st.apply(is_empty, &[e]) == Some(Value::Bool(false)))
        .collect();
    let failing: BTreeSet<usize> = log.l1.iter().map(|p| p.element).collect();
    assert_eq!(failing, nonempty);
    assert!(log.l1.iter().all(|p| p.op == "isEmpty"));
    assert!(log.l2.is_empty());
}

#[test]
fn reruns_on_fresh_objects_give_the_same_log() {
    for case in Case::ALL {
        for v in fixtures::variants(case) {
            for mode in [Mode::Equals, Mode::ObserversOnly] {
                let s = setup(case, v.id);
                let a = execute(&s, fixtures::adapter(case, v.id).unwrap().as_mut(), mode);
                let b = execute(&s, fixtures::adapter(case, v.id).unwrap().as_mut(), mode);
                assert_eq!(a, b, "{case} {}", v.id);
            }
        }
    }
}

#[test]
fn every_defined_entry_is_compared_once() {
    for case in Case::ALL {
        let s = setup(case, "correct");
        let m = &s.fx.module;
        let mut expected = 0;
        for e in s.terms.terms.keys() {
            for (o, info) in m.ops.iter().enumerate() {
                let Some(r) = s.fx.methods.receivers[o] else { continue };
                if info.owner != m.core {
                    continue;
                }
                expected += s.st.tables[o].keys().filter(|args| args[r] == *e).count();
            }
        }
        for mode in [Mode::Equals, Mode::ObserversOnly] {
            let log = execute(&s, fixtures::adapter(case, "correct").unwrap().as_mut(), mode);
            assert_eq!(log.comparisons, expected, "{case} {mode}");
        }
    }
}

#[test]
fn each_application_gets_its_own_copy() {
    for mode in [Mode::Equals, Mode::ObserversOnly] {
        let s = setup(Case::MapChain, "correct");
        let mut adapter = fixtures::adapter(Case::MapChain, "correct").unwrap();
        let mat = materialize_concretes(&s.fx.module, &s.fx.methods, &s.world, &s.terms, adapter.as_mut(), mode);
        let mut seen = BTreeSet::new();
        for b in mat.bindings.values() {
            assert_eq!(b.copies.len(), plan(&s.world, b.element, mode).len());
            assert!(seen.insert(b.base));
            for c in &b.copies {
                assert!(seen.insert(*c), "handle reused");
            }
        }
        assert_eq!(mat.bindings.len(), 4);
    }
}

#[test]
fn terms_are_replayed_through_the_mapped_methods() {
    let s = setup(Case::SortedSet, "correct");
    let m = &s.fx.module;
    let mut rec = Recording::new(fixtures::adapter(Case::SortedSet, "correct").unwrap());
    let (&element, term) = s
        .terms
        .terms
        .iter()
        .find(|(_, t)| t.depth() == 2)
        .expect("a singleton set");
    let mut one = s.terms.clone();
    one.terms.retain(|&e, _| e == element);
    let mat = materialize_concretes(m, &s.fx.methods, &s.world, &one, &mut rec, Mode::Equals);
    let p = match &term.args[1] {
        TermArg::Elem { id, .. } => format!("Orderable{id}"),
        other => panic!("{other:?}"),
    };
    assert_eq!(rec.calls[0], "create TreeSet() -> 0");
    assert_eq!(rec.calls[1], format!("apply 0.insert({p})"));
    let per_copy = 2;
    assert_eq!(rec.calls.len(), per_copy * (1 + mat.bindings[&element].copies.len()));
}

#[test]
fn panicking_adapter_still_yields_a_log() {
    for case in Case::ALL {
        let s = setup(case, "correct");
        let log = execute(&s, &mut Exploding, Mode::Equals);
        assert_eq!(log.construction_failures.len(), s.terms.terms.len());
        assert_eq!(log.l3["empty"], s.terms.terms.len());
        assert!(log.construction_failures[0].message.contains("create exploded"));
    }
}

#[test]
fn failing_observations_are_mismatches() {
    let s = setup(Case::SortedSet, "correct");
    let mut adapter = FailingObservations(fixtures::adapter(Case::SortedSet, "correct").unwrap());
    let log = execute(&s, &mut adapter, Mode::Equals);
    assert_eq!(log.mismatches.len(), log.comparisons);
    let ops: BTreeSet<&str> = log.l1.iter().map(|p| p.op.as_str()).collect();
    assert_eq!(ops, BTreeSet::from(["isEmpty", "isIn", "largest"]));
    assert_eq!(log.l2.len(), 4);
}

#[test]
fn faulty_get_hides_behind_equality() {
    let s = setup(Case::MapChain, "get-1");
    let log = execute(&s, fixtures::adapter(Case::MapChain, "get-1").unwrap().as_mut(), Mode::Equals);
    assert!(log.l2.iter().all(|p| p.op != "put"));
    assert!(log.l1.iter().all(|p| p.op == "get"));
}
