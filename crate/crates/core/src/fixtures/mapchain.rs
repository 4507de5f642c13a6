//! A chained map: nodes kept in ascending key order, removal by marking a
//! node dead, and an element count maintained by put and remove. Equality
//! compares counts and then looks every live key up with `get`.

use super::{param, Store};
use crate::harness::{Arg, Handle, ImplementationAdapter, Observed};
use crate::mock::ParamRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFault {
    None,
    GetSkipsLast,
    GetMissesTail,
    GetFromSecond,
    IsEmptyOne,
    IsEmptyNegated,
    PutDuplicates,
    PutDropsLargest,
    PutHeadUncounted,
    RemoveAlwaysCounts,
    RemoveHead,
}

impl MapFault {
    pub fn from_id(id: &str) -> Self {
        match id {
            "get-1" => MapFault::GetSkipsLast,
            "get-2" => MapFault::GetMissesTail,
            "get-3" => MapFault::GetFromSecond,
            "isEmpty-1" => MapFault::IsEmptyOne,
            "isEmpty-2" => MapFault::IsEmptyNegated,
            "put-1" => MapFault::PutDuplicates,
            "put-2" => MapFault::PutDropsLargest,
            "put-3" => MapFault::PutHeadUncounted,
            "remove-1" => MapFault::RemoveAlwaysCounts,
            "remove-2" => MapFault::RemoveHead,
            _ => MapFault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    key: ParamRef,
    value: ParamRef,
    live: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    chain: Vec<Node>,
    count: i64,
    fault: MapFault,
}

impl ChainMap {
    pub fn new(fault: MapFault) -> Self {
        ChainMap {
            chain: Vec::new(),
            count: 0,
            fault,
        }
    }

    fn find(&self, k: &ParamRef) -> Option<usize> {
        self.chain.iter().position(|n| n.live && &n.key == k)
    }

    pub fn put(&mut self, k: ParamRef, v: ParamRef) {
        if let Some(i) = self.find(&k) {
            if self.fault == MapFault::PutDuplicates {
                self.chain.insert(i + 1, Node { key: k, value: v, live: true });
                self.count += 1;
            } else {
                self.chain[i].value = v;
            }
            return;
        }
        let at = self.chain.iter().position(|n| n.key.id() > k.id()).unwrap_or(self.chain.len());
        if self.fault == MapFault::PutDropsLargest && !self.chain.is_empty() && at == self.chain.len() {
            self.count += 1;
            return;
        }
        self.chain.insert(at, Node { key: k, value: v, live: true });
        if !(self.fault == MapFault::PutHeadUncounted && at == 0) {
            self.count += 1;
        }
    }

    pub fn remove(&mut self, k: &ParamRef) {
        match self.find(k) {
            Some(i) => {
                let i = match self.fault {
                    MapFault::RemoveHead => self.chain.iter().position(|n| n.live).expect("found a live node"),
                    _ => i,
                };
                self.chain[i].live = false;
                self.count -= 1;
            }
            None if self.fault == MapFault::RemoveAlwaysCounts => self.count -= 1,
            None => {}
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.fault {
            MapFault::IsEmptyOne => self.count <= 1,
            MapFault::IsEmptyNegated => self.count != 0,
            _ => self.count == 0,
        }
    }

    pub fn contains_key(&self, k: &ParamRef) -> bool {
        self.find(k).is_some()
    }

    pub fn get(&self, k: &ParamRef) -> Option<ParamRef> {
        let len = self.chain.len();
        let (from, to) = match self.fault {
            MapFault::GetSkipsLast => (0, len.saturating_sub(1)),
            MapFault::GetFromSecond if len > 1 => (1, len),
            _ => (0, len),
        };
        let i = (from..to).find(|&i| self.chain[i].live && &self.chain[i].key == k)?;
        if self.fault == MapFault::GetMissesTail && len > 1 && i == len - 1 {
            return None;
        }
        Some(self.chain[i].value.clone())
    }

    pub fn equals(&self, other: &ChainMap) -> bool {
        self.count == other.count
            && self
                .chain
                .iter()
                .filter(|n| n.live)
                .all(|n| self.get(&n.key) == other.get(&n.key))
    }
}

pub(super) struct MapAdapter {
    fault: MapFault,
    store: Store<ChainMap>,
}

impl MapAdapter {
    pub(super) fn new(fault: MapFault) -> Self {
        MapAdapter {
            fault,
            store: Store::default(),
        }
    }
}

impl ImplementationAdapter for MapAdapter {
    fn create(&mut self, method: &str, args: &[Arg]) -> Result<Handle, String> {
        match (method, args) {
            ("ChainMap", []) => Ok(self.store.add(ChainMap::new(self.fault))),
            _ => Err(format!("no constructor {method}/{}", args.len())),
        }
    }

    fn apply_transformer(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Handle, String> {
        match method {
            "put" => {
                let (k, v) = (param(args, 0)?.clone(), param(args, 1)?.clone());
                self.store.get_mut(target)?.put(k, v);
            }
            "remove" => {
                let k = param(args, 0)?.clone();
                self.store.get_mut(target)?.remove(&k);
            }
            _ => return Err(format!("no transformer {method}")),
        }
        Ok(target)
    }

    fn observe(&mut self, target: Handle, method: &str, args: &[Arg]) -> Result<Observed, String> {
        let m = self.store.get(target)?;
        match method {
            "isEmpty" => Ok(Observed::Bool(m.is_empty())),
            "containsKey" => Ok(Observed::Bool(m.contains_key(param(args, 0)?))),
            "get" => Ok(match m.get(param(args, 0)?) {
                Some(v) => Observed::Param(v),
                None => Observed::Foreign("null".into()),
            }),
            _ => Err(format!("no observer {method}")),
        }
    }

    fn concrete_equals(&mut self, a: Handle, b: Handle) -> Result<bool, String> {
        Ok(self.store.get(a)?.equals(self.store.get(b)?))
    }
}
