//! A tree-set style sorted set: elements kept in ascending order in a
//! vector, ordered through the elements' own `greaterEq`.

use super::{param, Store};
use crate::harness::{Arg, Handle, ImplementationAdapter, Observed};
use crate::mock::{ParamRef, ParamValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetFault {
    None,
    IsEmptyOne,
    IsEmptyNegated,
    IsInFirstOnly,
    LargestFirst,
    LargestReversed,
    PrivateInsertAppends,
    PublicInsertSkips,
}

impl SetFault {
    pub fn from_id(id: &str) -> Self {
        match id {
            "isEmpty-1" => SetFault::IsEmptyOne,
            "isEmpty-2" => SetFault::IsEmptyNegated,
            "isIn-1" => SetFault::IsInFirstOnly,
            "largest-1" => SetFault::LargestFirst,
            "largest-2" => SetFault::LargestReversed,
            "private-insert" => SetFault::PrivateInsertAppends,
            "public-insert" => SetFault::PublicInsertSkips,
            _ => SetFault::None,
        }
    }
}

fn greater_eq(a: &ParamRef, b: &ParamRef) -> Result<bool, String> {
    match a.invoke("greaterEq", std::slice::from_ref(b))? {
        ParamValue::Bool(x) => Ok(x),
        ParamValue::Param(p) => Err(format!("greaterEq returned {p}")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSet {
    items: Vec<ParamRef>,
    fault: SetFault,
}

impl TreeSet {
    pub fn new(fault: SetFault) -> Self {
        TreeSet { items: Vec::new(), fault }
    }

    pub fn insert(&mut self, e: ParamRef) -> Result<(), String> {
        if self.fault == SetFault::PublicInsertSkips {
            if let Some(top) = self.items.last() {
                if !greater_eq(&e, top)? {
                    return Ok(());
                }
            }
        }
        self.insert_sorted(e)
    }

    fn insert_sorted(&mut self, e: ParamRef) -> Result<(), String> {
        if self.items.contains(&e) {
            return Ok(());
        }
        if self.fault == SetFault::PrivateInsertAppends {
            self.items.push(e);
            return Ok(());
        }
        for i in 0..self.items.len() {
            if greater_eq(&self.items[i], &e)? {
                self.items.insert(i, e);
                return Ok(());
            }
        }
        self.items.push(e);
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        match self.fault {
            SetFault::IsEmptyOne => self.items.len() <= 1,
            SetFault::IsEmptyNegated => !self.items.is_empty(),
            _ => self.items.is_empty(),
        }
    }

    pub fn is_in(&self, e: &ParamRef) -> bool {
        match self.fault {
            SetFault::IsInFirstOnly => self.items.first() == Some(e),
            _ => self.items.contains(e),
        }
    }

    pub fn largest(&self) -> Result<ParamRef, String> {
        let first = self.items.first().ok_or("no such element")?;
        match self.fault {
            SetFault::LargestFirst => Ok(first.clone()),
            SetFault::LargestReversed => {
                let mut best = first;
                for x in &self.items {
                    if greater_eq(best, x)? {
                        best = x;
                    }
                }
                Ok(best.clone())
            }
            _ => Ok(self.items.last().expect("non-empty").clone()),
        }
    }
}

pub(super) struct SetAdapter {
    fault: SetFault,
    store: Store<TreeSet>,
}

impl SetAdapter {
    pub(super) fn new(fault: SetFault) -> Self {
        SetAdapter {
            fault,
            store: Store::default(),
        }
    }
}

impl ImplementationAdapter for SetAdapter {
    fn create(&mut self, method: &str, args: &[Arg]) -> Result<Handle, String> {
        match (method, args) {
            ("TreeSet", []) => Ok(self.store.add(TreeSet::new(self.fault))),
            _ => Err(format!("no constructor {method}/{}", args.len())),
        }
    }

    fn apply_transformer(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Handle, String> {
        match method {
            "insert" => {
                let e = param(args, 0)?.clone();
                self.store.get_mut(target)?.insert(e)?;
                Ok(target)
            }
            _ => Err(format!("no transformer {method}")),
        }
    }

    fn observe(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Observed, String> {
        let s = self.store.get(target)?;
        match method {
            "isEmpty" => Ok(Observed::Bool(s.is_empty())),
            "isIn" => Ok(Observed::Bool(s.is_in(param(args, 0)?))),
            "largest" => s.largest().map(Observed::Param),
            _ => Err(format!("no observer {method}")),
        }
    }

    fn concrete_equals(&mut self, a: Handle, b: Handle) -> Result<bool, String> {
        Ok(self.store.get(a)?.items == self.store.get(b)?.items)
    }
}
