//! Backtracking search over operation-table cells.
//!
//! Every table row is a variable. Ground axiom instances and definedness
//! conditions are constraints; each one is watched by a cell it is blocked
//! on and re-evaluated when that cell is assigned. Element symmetry is cut
//! with the least-number heuristic: a result of sort `s` ranges over the
//! elements of `s` already mentioned plus one fresh representative.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ModelError, Scope, Structure, Value};
use crate::spec::{Expr, OpKind, Prop, ResultSort, SortId, ValidatedModule};

pub const DEFAULT_BUDGET: u64 = 5_000_000;

const UNDEF: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub seed: u64,
    /// Maximum number of value assignments tried before giving up.
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed: 0,
            budget: DEFAULT_BUDGET,
        }
    }
}

enum Constraint {
    Axiom { axiom: usize, env: Vec<usize> },
    Domain { cell: usize },
}

enum Status {
    Sat,
    Unsat,
    Blocked(usize),
}

struct Layout {
    base: Vec<usize>,
    strides: Vec<Vec<usize>>,
    cell_op: Vec<usize>,
    cell_args: Vec<Vec<usize>>,
}

impl Layout {
    fn new(m: &ValidatedModule, carriers: &[usize]) -> Self {
        let mut base = Vec::new();
        let mut strides = Vec::new();
        let mut cell_op = Vec::new();
        let mut cell_args = Vec::new();
        for (o, op) in m.ops.iter().enumerate() {
            base.push(cell_op.len());
            let sizes: Vec<usize> = op.args.iter().map(|&s| carriers[s]).collect();
            let mut st = vec![1; sizes.len()];
            for i in (0..sizes.len()).rev().skip(1) {
                st[i] = st[i + 1] * sizes[i + 1];
            }
            strides.push(st);
            for t in super::tuples_over(sizes) {
                cell_op.push(o);
                cell_args.push(t);
            }
        }
        Layout {
            base,
            strides,
            cell_op,
            cell_args,
        }
    }

    fn cell(&self, op: usize, args: &[u32]) -> usize {
        self.base[op]
            + args
                .iter()
                .zip(&self.strides[op])
                .map(|(&a, &s)| a as usize * s)
                .sum::<usize>()
    }
}

struct Evaluator<'a> {
    assign: &'a [Option<u32>],
    layout: &'a Layout,
    undef: bool,
    unknown: Option<usize>,
}

impl Evaluator<'_> {
    fn expr(&mut self, e: &Expr, env: &[usize]) -> Option<u32> {
        match e {
            Expr::Var(i) => Some(env[*i] as u32),
            Expr::App(op, args) => {
                let vals: Vec<Option<u32>> = args.iter().map(|a| self.expr(a, env)).collect();
                let vals: Vec<u32> = vals.into_iter().collect::<Option<_>>()?;
                let cell = self.layout.cell(*op, &vals);
                match self.assign[cell] {
                    None => {
                        self.unknown.get_or_insert(cell);
                        None
                    }
                    Some(UNDEF) => {
                        self.undef = true;
                        None
                    }
                    Some(v) => Some(v),
                }
            }
        }
    }

    fn prop(&mut self, p: &Prop, env: &[usize]) -> Option<bool> {
        match p {
            Prop::Const(b) => Some(*b),
            Prop::Atom(e) => self.expr(e, env).map(|v| v == 1),
            Prop::Eq(a, b) => {
                let a = self.expr(a, env);
                let b = self.expr(b, env);
                Some(a? == b?)
            }
            Prop::Not(f) => self.prop(f, env).map(|b| !b),
            Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) | Prop::Iff(a, b) => {
                let x = self.prop(a, env);
                let y = self.prop(b, env);
                let (x, y) = (x?, y?);
                Some(match p {
                    Prop::And(..) => x && y,
                    Prop::Or(..) => x || y,
                    Prop::Implies(..) => !x || y,
                    _ => x == y,
                })
            }
        }
    }
}

struct Search<'a> {
    m: &'a ValidatedModule,
    layout: Layout,
    result_sort: Vec<Option<SortId>>,
    dom: Vec<u32>,
    partial: Vec<bool>,
    is_creator: Vec<bool>,
    priority: Vec<Vec<u32>>,
    constraints: Vec<Constraint>,
    watch: Vec<Vec<usize>>,
    assign: Vec<Option<u32>>,
    mention: Vec<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn status(&self, k: usize) -> Status {
        let mut ev = Evaluator {
            assign: &self.assign,
            layout: &self.layout,
            undef: false,
            unknown: None,
        };
        match &self.constraints[k] {
            Constraint::Axiom { axiom, env } => {
                let r = ev.prop(&self.m.axioms[*axiom].prop, env);
                if ev.undef {
                    return Status::Sat;
                }
                match r {
                    Some(true) => Status::Sat,
                    Some(false) => Status::Unsat,
                    None => Status::Blocked(ev.unknown.expect("blocked evaluation names a cell")),
                }
            }
            Constraint::Domain { cell } => {
                let op = self.layout.cell_op[*cell];
                let d = self.m.ops[op].domain.as_ref().expect("domain constraint on partial op");
                let mut env = vec![0; d.var_sorts.len()];
                for (pos, &v) in d.params.iter().enumerate() {
                    env[v] = self.layout.cell_args[*cell][pos];
                }
                let r = ev.prop(&d.condition, &env);
                let cond = if ev.undef {
                    false
                } else {
                    match r {
                        Some(b) => b,
                        None => return Status::Blocked(ev.unknown.expect("blocked evaluation names a cell")),
                    }
                };
                match self.assign[*cell] {
                    None => Status::Blocked(*cell),
                    Some(v) if (v != UNDEF) == cond => Status::Sat,
                    Some(_) => Status::Unsat,
                }
            }
        }
    }

    fn touch(&mut self, cell: usize, v: u32, delta: i32) {
        let op = self.layout.cell_op[cell];
        for (i, &s) in self.m.ops[op].args.iter().enumerate() {
            let e = self.layout.cell_args[cell][i];
            self.mention[s][e] = (self.mention[s][e] as i32 + delta) as u32;
        }
        if let (Some(s), true) = (self.result_sort[op], v != UNDEF) {
            self.mention[s][v as usize] = (self.mention[s][v as usize] as i32 + delta) as u32;
        }
    }

    fn set(&mut self, cell: usize, v: u32) {
        self.assign[cell] = Some(v);
        self.touch(cell, v, 1);
    }

    fn unset(&mut self, cell: usize) {
        if let Some(v) = self.assign[cell].take() {
            self.touch(cell, v, -1);
        }
    }

    fn propagate(&mut self, cell: usize) -> bool {
        let list = std::mem::take(&mut self.watch[cell]);
        let mut keep = Vec::with_capacity(list.len());
        let mut ok = true;
        for k in list {
            if !ok {
                keep.push(k);
                continue;
            }
            match self.status(k) {
                Status::Sat => keep.push(k),
                Status::Blocked(c) => self.watch[c].push(k),
                Status::Unsat => {
                    keep.push(k);
                    ok = false;
                }
            }
        }
        self.watch[cell] = keep;
        ok
    }

    fn select(&self) -> Option<usize> {
        (0..self.assign.len())
            .filter(|&c| self.assign[c].is_none())
            .max_by_key(|&c| (self.is_creator[c], self.watch[c].len(), std::cmp::Reverse(c)))
    }

    fn candidates(&self, cell: usize) -> Vec<u32> {
        let op = self.layout.cell_op[cell];
        let mut vals: Vec<u32> = match self.result_sort[op] {
            None => vec![0, 1],
            Some(s) => {
                let own: Vec<usize> = self.m.ops[op]
                    .args
                    .iter()
                    .zip(&self.layout.cell_args[cell])
                    .filter(|(&a, _)| a == s)
                    .map(|(_, &e)| e)
                    .collect();
                let used = |e: usize| self.mention[s][e] > 0 || own.contains(&e);
                let n = self.dom[cell] as usize;
                let mut v: Vec<u32> = (0..n).filter(|&e| used(e)).map(|e| e as u32).collect();
                if let Some(fresh) = (0..n).find(|&e| !used(e)) {
                    v.push(fresh as u32);
                }
                v
            }
        };
        if self.partial[cell] {
            vals.push(UNDEF);
        }
        let prio = &self.priority[cell];
        vals.sort_by_key(|&v| if v == UNDEF { prio[prio.len() - 1] } else { prio[v as usize] });
        vals
    }

    fn structure(&self, carriers: Vec<usize>) -> Structure {
        let mut tables = vec![std::collections::BTreeMap::new(); self.m.ops.len()];
        for (c, v) in self.assign.iter().enumerate() {
            let v = v.expect("complete assignment");
            if v == UNDEF {
                continue;
            }
            let op = self.layout.cell_op[c];
            let val = match self.result_sort[op] {
                None => Value::Bool(v == 1),
                Some(_) => Value::Elem(v as usize),
            };
            tables[op].insert(self.layout.cell_args[c].clone(), val);
        }
        Structure { carriers, tables }
    }
}

/// Searches for a structure of the given scope satisfying every axiom and
/// domain condition. Deterministic for a fixed module, scope and seed.
pub fn find_structure(m: &ValidatedModule, scope: &Scope, opts: &SearchOptions) -> Result<Structure, ModelError> {
    let carriers = scope.carriers(m)?;
    let layout = Layout::new(m, &carriers);
    let ncells = layout.cell_op.len();
    let result_sort: Vec<Option<SortId>> = m
        .ops
        .iter()
        .map(|o| match o.result {
            ResultSort::Bool => None,
            ResultSort::Sort(s) => Some(s),
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut dom = Vec::with_capacity(ncells);
    let mut partial = Vec::with_capacity(ncells);
    let mut is_creator = Vec::with_capacity(ncells);
    let mut priority = Vec::with_capacity(ncells);
    for c in 0..ncells {
        let op = &m.ops[layout.cell_op[c]];
        let n = match op.result {
            ResultSort::Bool => 2,
            ResultSort::Sort(s) => carriers[s] as u32,
        };
        dom.push(n);
        partial.push(op.partial);
        is_creator.push(op.kind == OpKind::Creator && op.owner == m.core);
        priority.push((0..=n).map(|_| rng.next_u32()).collect());
    }

    let mut constraints = Vec::new();
    for (i, ax) in m.axioms.iter().enumerate() {
        for env in super::tuples_over(ax.vars.iter().map(|(_, s)| carriers[*s])) {
            constraints.push(Constraint::Axiom { axiom: i, env });
        }
    }
    for (c, _) in partial.iter().enumerate().filter(|(_, &p)| p) {
        constraints.push(Constraint::Domain { cell: c });
    }

    let mut s = Search {
        m,
        layout,
        result_sort,
        dom,
        partial,
        is_creator,
        priority,
        constraints,
        watch: vec![Vec::new(); ncells],
        assign: vec![None; ncells],
        mention: carriers.iter().map(|&n| vec![0; n]).collect(),
    };

    for k in 0..s.constraints.len() {
        match s.status(k) {
            Status::Sat => {}
            Status::Unsat => return Err(ModelError::NoModel),
            Status::Blocked(c) => s.watch[c].push(k),
        }
    }

    struct Frame {
        cell: usize,
        cands: Vec<u32>,
        next: usize,
    }
    let mut stack: Vec<Frame> = Vec::new();
    let mut nodes: u64 = 0;
    loop {
        let Some(cell) = s.select() else {
            return Ok(s.structure(carriers));
        };
        let cands = s.candidates(cell);
        stack.push(Frame { cell, cands, next: 0 });
        loop {
            let Some(top) = stack.last_mut() else {
                return Err(ModelError::NoModel);
            };
            let (cell, next) = (top.cell, top.next);
            s.unset(cell);
            if next == top.cands.len() {
                stack.pop();
                if let Some(parent) = stack.last() {
                    let pc = parent.cell;
                    s.unset(pc);
                }
                continue;
            }
            let v = top.cands[next];
            top.next += 1;
            nodes += 1;
            if nodes > opts.budget {
                return Err(ModelError::BudgetExhausted(opts.budget));
            }
            s.set(cell, v);
            if s.propagate(cell) {
                break;
            }
        }
    }
}
