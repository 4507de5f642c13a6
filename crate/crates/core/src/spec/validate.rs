use std::collections::{BTreeSet, HashMap};

use super::ast::{self, Formula, ResultRef, Section, SortRef, SpecModule, Term};
use super::pretty;
use super::*;

/// Resolves names, classifies operations and checks every well-formedness
/// rule. All violations are reported, each with the offending declaration.
pub fn validate_module(m: &SpecModule) -> Result<ValidatedModule, Vec<SpecError>> {
    let mut errs = Vec::new();

    let mut sort_ids: HashMap<&str, SortId> = HashMap::new();
    for (i, s) in m.sorts().enumerate() {
        if s.name == "Boolean" || sort_ids.insert(&s.name, i).is_some() {
            errs.push(SpecError::Duplicate {
                pos: s.pos,
                name: s.name.clone(),
            });
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }

    let decls: Vec<&ast::SortDecl> = m.sorts().collect();
    let mut params_of: Vec<Vec<SortId>> = vec![Vec::new(); decls.len()];
    for (i, d) in decls.iter().enumerate() {
        for p in &d.params {
            match sort_ids.get(p.as_str()) {
                Some(&pid) => params_of[i].push(pid),
                None => errs.push(SpecError::UnknownSort {
                    pos: d.pos,
                    name: p.clone(),
                }),
            }
        }
    }

    let resolve_sort = |r: &SortRef, errs: &mut Vec<SpecError>| -> Option<SortId> {
        let Some(&id) = sort_ids.get(r.name.as_str()) else {
            errs.push(SpecError::UnknownSort {
                pos: r.pos,
                name: r.name.clone(),
            });
            return None;
        };
        if !r.params.is_empty() && r.params != decls[id].params {
            errs.push(SpecError::ParamMismatch {
                pos: r.pos,
                name: r.name.clone(),
            });
        }
        Some(id)
    };

    // Signatures.
    let mut op_ids: HashMap<&str, OpId> = HashMap::new();
    let mut ops: Vec<OpInfo> = Vec::new();
    let mut op_decls: Vec<&ast::OpSig> = Vec::new();
    for (owner, unit) in m.units.iter().enumerate() {
        for sig in &unit.ops {
            if op_ids.contains_key(sig.name.as_str()) {
                errs.push(SpecError::Duplicate {
                    pos: sig.pos,
                    name: sig.name.clone(),
                });
                continue;
            }
            let args: Vec<Option<SortId>> = sig.args.iter().map(|a| resolve_sort(a, &mut errs)).collect();
            let result = match &sig.result {
                ResultRef::Boolean => Some(ResultSort::Bool),
                ResultRef::Sort(r) => resolve_sort(r, &mut errs).map(ResultSort::Sort),
            };
            let (Some(args), Some(result)) = (args.into_iter().collect::<Option<Vec<_>>>(), result) else {
                continue;
            };
            let self_index = args.iter().position(|&a| a == owner);
            let owner_name = &unit.sort.name;
            let kind = match sig.section {
                Section::Constructors => {
                    if result != ResultSort::Sort(owner) {
                        errs.push(SpecError::ConstructorResult {
                            pos: sig.pos,
                            op: sig.name.clone(),
                            sort: owner_name.clone(),
                        });
                    }
                    if self_index.is_some() {
                        OpKind::Transformer
                    } else {
                        OpKind::Creator
                    }
                }
                Section::Observers | Section::Others => {
                    if self_index.is_none() {
                        errs.push(SpecError::MissingSelf {
                            pos: sig.pos,
                            op: sig.name.clone(),
                            sort: owner_name.clone(),
                        });
                    }
                    if sig.section == Section::Observers {
                        OpKind::Observer
                    } else {
                        OpKind::Other
                    }
                }
            };
            if sig.partial && sig.domain.is_none() {
                errs.push(SpecError::PartialWithoutDomain {
                    pos: sig.pos,
                    op: sig.name.clone(),
                });
            }
            if !sig.partial {
                if let Some(d) = &sig.domain {
                    errs.push(SpecError::DomainOnTotal {
                        pos: d.pos,
                        op: sig.name.clone(),
                    });
                }
            }
            op_ids.insert(&sig.name, ops.len());
            op_decls.push(sig);
            ops.push(OpInfo {
                name: sig.name.clone(),
                owner,
                args,
                result,
                kind,
                partial: sig.partial,
                self_index,
                domain: None,
            });
        }
    }

    // Sort kinds: parameters are named in some declaration's bracket list;
    // the core sort is the one no other sort's operations mention.
    let param_set: BTreeSet<SortId> = params_of.iter().flatten().copied().collect();
    let mut mentioned_by_other = vec![false; decls.len()];
    for op in &ops {
        let mut touched: Vec<SortId> = op.args.clone();
        if let ResultSort::Sort(s) = op.result {
            touched.push(s);
        }
        for s in touched {
            if s != op.owner {
                mentioned_by_other[s] = true;
            }
        }
    }
    let roots: Vec<SortId> = (0..decls.len())
        .filter(|&s| !mentioned_by_other[s] && !param_set.contains(&s))
        .collect();
    if roots.len() != 1 {
        errs.push(SpecError::CoreSort {
            found: roots.iter().map(|&s| decls[s].name.clone()).collect(),
        });
        return Err(errs);
    }
    let core = roots[0];

    // Reachability from the core sort in the dependency graph.
    let mut reach = vec![false; decls.len()];
    let mut stack = vec![core];
    while let Some(s) = stack.pop() {
        if std::mem::replace(&mut reach[s], true) {
            continue;
        }
        stack.extend(params_of[s].iter().copied());
        for op in ops.iter().filter(|o| o.owner == s) {
            stack.extend(op.args.iter().copied());
            if let ResultSort::Sort(r) = op.result {
                stack.push(r);
            }
        }
    }
    for (s, d) in decls.iter().enumerate() {
        if !reach[s] {
            errs.push(SpecError::Unreachable {
                sort: d.name.clone(),
                core: decls[core].name.clone(),
            });
        }
    }

    let kind_of = |s: SortId| {
        if s == core {
            SortKind::Core
        } else if param_set.contains(&s) {
            SortKind::Parameter
        } else {
            SortKind::Plain
        }
    };
    for (op, sig) in ops.iter().zip(&op_decls) {
        if op.kind.is_constructor() && kind_of(op.owner) == SortKind::Parameter {
            errs.push(SpecError::ParameterConstructor {
                pos: sig.pos,
                op: op.name.clone(),
                sort: decls[op.owner].name.clone(),
            });
        }
    }

    let cx = Resolver {
        op_ids: &op_ids,
        ops: &ops,
        decls: &decls,
    };

    // Domain conditions.
    let mut domains = Vec::new();
    for (i, sig) in op_decls.iter().enumerate() {
        let Some(d) = &sig.domain else { continue };
        let mut vars = Vec::new();
        for (v, r) in &d.vars {
            if let Some(s) = resolve_sort(r, &mut errs) {
                vars.push((v.clone(), s));
            }
        }
        if vars.len() != d.vars.len() {
            continue;
        }
        let params: Vec<usize> = d
            .params
            .iter()
            .map(|p| vars.iter().position(|(v, _)| v == p).expect("domain params are declared"))
            .collect();
        let distinct: BTreeSet<usize> = params.iter().copied().collect();
        let sorts_ok = params.len() == ops[i].args.len()
            && distinct.len() == params.len()
            && params.iter().zip(&ops[i].args).all(|(&v, &a)| vars[v].1 == a);
        if !sorts_ok {
            errs.push(SpecError::IllSorted {
                pos: d.pos,
                msg: format!("domain clause of `{}` must bind distinct variables of its argument sorts", sig.name),
            });
            continue;
        }
        let mut cond_vars = Vec::new();
        d.condition.collect_vars(&mut cond_vars);
        if cond_vars.iter().any(|v| !d.params.iter().any(|p| p == v)) {
            errs.push(SpecError::IllSorted {
                pos: d.pos,
                msg: format!("domain condition of `{}` uses variables that are not its arguments", sig.name),
            });
            continue;
        }
        if let Some(condition) = cx.prop(&d.condition, &vars, &mut errs) {
            domains.push((
                i,
                DomainCond {
                    var_sorts: vars.iter().map(|(_, s)| *s).collect(),
                    params,
                    condition,
                },
            ));
        }
    }
    // Axioms.
    let mut axioms = Vec::new();
    for ax in m.axioms() {
        let mut vars = Vec::new();
        for (v, r) in &ax.universals {
            if let Some(s) = resolve_sort(r, &mut errs) {
                vars.push((v.clone(), s));
            }
        }
        if vars.len() != ax.universals.len() {
            continue;
        }
        if let Some(prop) = cx.prop(&ax.formula, &vars, &mut errs) {
            axioms.push(AxiomInfo {
                vars,
                prop,
                text: pretty::formula(&ax.formula),
            });
        }
    }

    if !errs.is_empty() {
        return Err(errs);
    }
    for (i, d) in domains {
        ops[i].domain = Some(d);
    }
    Ok(ValidatedModule {
        name: m.units[core].name.clone(),
        sorts: decls
            .iter()
            .enumerate()
            .map(|(i, d)| SortInfo {
                name: d.name.clone(),
                kind: kind_of(i),
                params: params_of[i].clone(),
            })
            .collect(),
        ops,
        axioms,
        core,
    })
}

struct Resolver<'a> {
    op_ids: &'a HashMap<&'a str, OpId>,
    ops: &'a [OpInfo],
    decls: &'a [&'a ast::SortDecl],
}

impl Resolver<'_> {
    fn sort_name(&self, r: ResultSort) -> String {
        match r {
            ResultSort::Bool => "Boolean".into(),
            ResultSort::Sort(s) => self.decls[s].name.clone(),
        }
    }

    fn expr(&self, t: &Term, vars: &[(String, SortId)], errs: &mut Vec<SpecError>) -> Option<(Expr, ResultSort)> {
        match t {
            Term::Var(v, pos) => match vars.iter().position(|(n, _)| n == v) {
                Some(i) => Some((Expr::Var(i), ResultSort::Sort(vars[i].1))),
                None => {
                    errs.push(SpecError::UnknownVar { pos: *pos, name: v.clone() });
                    None
                }
            },
            Term::App(name, args, pos) => {
                let Some(&op) = self.op_ids.get(name.as_str()) else {
                    errs.push(SpecError::UnknownOp { pos: *pos, name: name.clone() });
                    return None;
                };
                let info = &self.ops[op];
                if info.args.len() != args.len() {
                    errs.push(SpecError::IllSorted {
                        pos: *pos,
                        msg: format!("`{name}` takes {} arguments, given {}", info.args.len(), args.len()),
                    });
                    return None;
                }
                let mut out = Vec::new();
                for (a, &want) in args.iter().zip(&info.args) {
                    let (e, got) = self.expr(a, vars, errs)?;
                    if got != ResultSort::Sort(want) {
                        errs.push(SpecError::IllSorted {
                            pos: a.pos(),
                            msg: format!(
                                "argument of `{name}` has sort {}, expected {}",
                                self.sort_name(got),
                                self.decls[want].name
                            ),
                        });
                        return None;
                    }
                    out.push(e);
                }
                Some((Expr::App(op, out), info.result))
            }
        }
    }

    fn prop(&self, f: &Formula, vars: &[(String, SortId)], errs: &mut Vec<SpecError>) -> Option<Prop> {
        let bin = |a: &Formula, b: &Formula, errs: &mut Vec<SpecError>| -> Option<(Box<Prop>, Box<Prop>)> {
            let a = self.prop(a, vars, errs);
            let b = self.prop(b, vars, errs);
            Some((Box::new(a?), Box::new(b?)))
        };
        Some(match f {
            Formula::Const(b) => Prop::Const(*b),
            Formula::Atom(t) => {
                let (e, s) = self.expr(t, vars, errs)?;
                if s != ResultSort::Bool {
                    errs.push(SpecError::IllSorted {
                        pos: t.pos(),
                        msg: format!("`{}` is not boolean", pretty::term(t)),
                    });
                    return None;
                }
                Prop::Atom(e)
            }
            Formula::Eq(a, b) => {
                let (ea, sa) = self.expr(a, vars, errs)?;
                let (eb, sb) = self.expr(b, vars, errs)?;
                if sa != sb || sa == ResultSort::Bool {
                    errs.push(SpecError::IllSorted {
                        pos: a.pos(),
                        msg: format!(
                            "equation sides have sorts {} and {}; use `iff` for booleans",
                            self.sort_name(sa),
                            self.sort_name(sb)
                        ),
                    });
                    return None;
                }
                Prop::Eq(ea, eb)
            }
            Formula::Not(g) => Prop::Not(Box::new(self.prop(g, vars, errs)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b, errs)?;
                Prop::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b, errs)?;
                Prop::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b, errs)?;
                Prop::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b, errs)?;
                Prop::Iff(a, b)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_syntax;

    fn validate(src: &str) -> Result<ValidatedModule, Vec<SpecError>> {
        validate_module(&parse_syntax(src).unwrap())
    }

    #[test]
    fn two_creators_and_a_transformer() {
        let m = validate(
            "spec C sorts C
             constructors
               zero: -> C;
               one: -> C;
               inc: C -> C;
             observers
               isZero: C;
             end",
        )
        .unwrap();
        let kinds: Vec<OpKind> = m.ops.iter().map(|o| o.kind).collect();
        assert_eq!(
            kinds,
            vec![OpKind::Creator, OpKind::Creator, OpKind::Transformer, OpKind::Observer]
        );
    }

    #[test]
    fn observer_without_self_is_rejected() {
        let errs = validate(
            "spec C sorts C constructors z: -> C; observers bad: -> Boolean; end",
        )
        .unwrap_err();
        assert!(matches!(&errs[0], SpecError::MissingSelf { op, .. } if op == "bad"));
    }

    #[test]
    fn partial_op_needs_domain() {
        let errs = validate(
            "spec C sorts C constructors z: -> C; observers f: C ->? C; end",
        )
        .unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, SpecError::PartialWithoutDomain { op, .. } if op == "f")));
    }

    #[test]
    fn ill_sorted_equation() {
        let errs = validate(
            "spec P sorts P others q: P; end
             spec C sorts C[P] constructors z: -> C; i: C P -> C;
             axioms S: C; E: P; i(S, E) = E; end",
        )
        .unwrap_err();
        assert!(errs.iter().any(|e| matches!(e, SpecError::IllSorted { .. })));
    }

    #[test]
    fn unknown_sort_reference() {
        let errs = validate("spec C sorts C constructors z: -> C; i: C Nope -> C; end").unwrap_err();
        assert!(matches!(&errs[0], SpecError::UnknownSort { name, .. } if name == "Nope"));
    }

    #[test]
    fn unknown_op_reference() {
        let errs = validate("spec C sorts C constructors z: -> C; observers p: C; axioms p(zz()); end").unwrap_err();
        assert!(matches!(&errs[0], SpecError::UnknownOp { name, .. } if name == "zz"));
    }

    #[test]
    fn each_violation_reported() {
        let errs = validate(
            "spec C sorts C constructors z: -> C; k: C -> Boolean; observers a: -> Boolean; b: -> Boolean; end",
        )
        .unwrap_err();
        assert_eq!(errs.len(), 3, "{errs:?}");
    }

    #[test]
    fn contradictory_axioms_still_validate() {
        validate("spec C sorts C constructors e: -> C; observers p: C; axioms p(e()); not p(e()); end").unwrap();
    }
}
