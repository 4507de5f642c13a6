use serde::Serialize;

use super::{Structure, Value};
use crate::spec::{AxiomInfo, DomainCond, Expr, OpId, Prop, ResultSort, ValidatedModule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// An axiom instance evaluates to false.
    Axiom {
        axiom: usize,
        text: String,
        assignment: Vec<(String, usize)>,
    },
    /// A partial operation is defined exactly where its domain is false,
    /// or the reverse.
    Definedness {
        op: String,
        args: Vec<usize>,
        defined: bool,
    },
    /// The table itself is ill-formed: wrong shape, out-of-range result,
    /// or a missing row of a total operation.
    Malformed { op: String, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Undefined application somewhere in the expression.
struct Undefined;

fn eval_expr(st: &Structure, e: &Expr, env: &[usize]) -> Result<Value, Undefined> {
    match e {
        Expr::Var(i) => Ok(Value::Elem(env[*i])),
        Expr::App(op, args) => {
            let vals = args
                .iter()
                .map(|a| match eval_expr(st, a, env)? {
                    Value::Elem(x) => Ok(x),
                    Value::Bool(_) => Err(Undefined),
                })
                .collect::<Result<Vec<usize>, _>>()?;
            st.apply(*op, &vals).ok_or(Undefined)
        }
    }
}

/// Evaluates every sub-formula (no short-circuit) so that an undefined
/// application anywhere is noticed.
fn eval_prop(st: &Structure, p: &Prop, env: &[usize]) -> Result<bool, Undefined> {
    Ok(match p {
        Prop::Const(b) => *b,
        Prop::Atom(e) => match eval_expr(st, e, env)? {
            Value::Bool(b) => b,
            Value::Elem(_) => return Err(Undefined),
        },
        Prop::Eq(a, b) => {
            let a = eval_expr(st, a, env);
            let b = eval_expr(st, b, env);
            a? == b?
        }
        Prop::Not(f) => !eval_prop(st, f, env)?,
        Prop::And(a, b) | Prop::Or(a, b) | Prop::Implies(a, b) | Prop::Iff(a, b) => {
            let x = eval_prop(st, a, env);
            let y = eval_prop(st, b, env);
            let (x, y) = (x?, y?);
            match p {
                Prop::And(..) => x && y,
                Prop::Or(..) => x || y,
                Prop::Implies(..) => !x || y,
                _ => x == y,
            }
        }
    })
}

/// An axiom instance holds vacuously when any application in it is undefined.
pub(crate) fn axiom_instance_holds(st: &Structure, ax: &AxiomInfo, env: &[usize]) -> bool {
    eval_prop(st, &ax.prop, env).unwrap_or(true)
}

/// Truth of a domain condition at an argument tuple; undefined counts as false.
pub fn eval_domain(st: &Structure, d: &DomainCond, args: &[usize]) -> bool {
    let mut env = vec![0; d.var_sorts.len()];
    for (pos, &v) in d.params.iter().enumerate() {
        env[v] = args[pos];
    }
    eval_prop(st, &d.condition, &env).unwrap_or(false)
}

fn malformed(m: &ValidatedModule, op: OpId, msg: String) -> Violation {
    Violation::Malformed {
        op: m.ops[op].name.clone(),
        msg,
    }
}

/// Checks every table row, definedness condition and axiom instance.
pub fn check_structure(m: &ValidatedModule, st: &Structure) -> CheckReport {
    let mut violations = Vec::new();
    if st.carriers.len() != m.sorts.len() || st.tables.len() != m.ops.len() {
        violations.push(Violation::Malformed {
            op: String::new(),
            msg: "structure does not match the module's signature".into(),
        });
        return CheckReport { ok: false, violations };
    }

    let mut shape_ok = true;
    for (o, info) in m.ops.iter().enumerate() {
        for (args, v) in &st.tables[o] {
            let in_range = args.len() == info.args.len()
                && args.iter().zip(&info.args).all(|(&a, &s)| a < st.carriers[s]);
            let result_ok = match (info.result, v) {
                (ResultSort::Bool, Value::Bool(_)) => true,
                (ResultSort::Sort(s), Value::Elem(e)) => *e < st.carriers[s],
                _ => false,
            };
            if !in_range || !result_ok {
                shape_ok = false;
                violations.push(malformed(m, o, format!("bad row {args:?} -> {v}")));
            }
        }
        if !info.partial {
            for t in st.tuples(m, o) {
                if !st.tables[o].contains_key(&t) {
                    shape_ok = false;
                    violations.push(malformed(m, o, format!("total operation undefined at {t:?}")));
                }
            }
        }
    }
    if !shape_ok {
        return CheckReport { ok: false, violations };
    }

    for (o, info) in m.ops.iter().enumerate() {
        let Some(d) = &info.domain else { continue };
        for t in st.tuples(m, o) {
            let should = eval_domain(st, d, &t);
            let is = st.tables[o].contains_key(&t);
            if should != is {
                violations.push(Violation::Definedness {
                    op: info.name.clone(),
                    args: t,
                    defined: is,
                });
            }
        }
    }

    for (i, ax) in m.axioms.iter().enumerate() {
        let envs = super::tuples_over(ax.vars.iter().map(|(_, s)| st.carriers[*s]));
        for env in envs {
            if !axiom_instance_holds(st, ax, &env) {
                violations.push(Violation::Axiom {
                    axiom: i,
                    text: ax.text.clone(),
                    assignment: ax.vars.iter().map(|(n, _)| n.clone()).zip(env).collect(),
                });
            }
        }
    }

    CheckReport {
        ok: violations.is_empty(),
        violations,
    }
}
