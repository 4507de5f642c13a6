//! Canonical text rendering of a [`SpecModule`]; re-parses to an equal module.

use std::fmt::Write;

use super::ast::*;

pub fn pretty_print(m: &SpecModule) -> String {
    let mut out = String::new();
    for (i, u) in m.units.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        unit(&mut out, u);
    }
    out
}

fn sort_ref(r: &SortRef) -> String {
    if r.params.is_empty() {
        r.name.clone()
    } else {
        format!("{}[{}]", r.name, r.params.join(", "))
    }
}

fn unit(out: &mut String, u: &SpecUnit) {
    let _ = writeln!(out, "spec {}", u.name);
    let decl = SortRef {
        name: u.sort.name.clone(),
        params: u.sort.params.clone(),
        pos: Pos::default(),
    };
    let _ = writeln!(out, "sorts {}", sort_ref(&decl));
    for sec in [Section::Constructors, Section::Observers, Section::Others] {
        let ops: Vec<&OpSig> = u.ops.iter().filter(|o| o.section == sec).collect();
        if ops.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{}", sec.keyword());
        for op in ops {
            let args: Vec<String> = op.args.iter().map(sort_ref).collect();
            let _ = write!(out, "  {}:", op.name);
            if !args.is_empty() {
                let _ = write!(out, " {}", args.join(" "));
            }
            let arrow = if op.partial { "->?" } else { "->" };
            match &op.result {
                ResultRef::Boolean if !op.partial => {}
                ResultRef::Boolean => {
                    let _ = write!(out, " {arrow} Boolean");
                }
                ResultRef::Sort(r) => {
                    let _ = write!(out, " {arrow} {}", sort_ref(r));
                }
            }
            out.push_str(";\n");
        }
    }
    let domains: Vec<(&OpSig, &Domain)> = u
        .ops
        .iter()
        .filter_map(|o| o.domain.as_ref().map(|d| (o, d)))
        .collect();
    if !domains.is_empty() {
        out.push_str("domains\n");
        var_decls(out, domains.iter().flat_map(|(_, d)| d.vars.iter()));
        for (op, d) in domains {
            let _ = writeln!(
                out,
                "  {}({}) if {};",
                op.name,
                d.params.join(", "),
                formula(&d.condition)
            );
        }
    }
    if !u.axioms.is_empty() {
        out.push_str("axioms\n");
        var_decls(out, u.axioms.iter().flat_map(|a| a.universals.iter()));
        for a in &u.axioms {
            let _ = writeln!(out, "  {};", formula(&a.formula));
        }
    }
    out.push_str("end\n");
}

fn var_decls<'a>(out: &mut String, vars: impl Iterator<Item = &'a (String, SortRef)>) {
    let mut seen: Vec<(&str, String)> = Vec::new();
    for (v, s) in vars {
        if !seen.iter().any(|(n, _)| *n == v.as_str()) {
            seen.push((v, sort_ref(s)));
        }
    }
    for (v, s) in seen {
        let _ = writeln!(out, "  {v}: {s};");
    }
}

pub fn term(t: &Term) -> String {
    match t {
        Term::Var(v, _) => v.clone(),
        Term::App(op, args, _) => {
            let args: Vec<String> = args.iter().map(term).collect();
            format!("{op}({})", args.join(", "))
        }
    }
}

// Binding strength: 1 = `=>`/`iff`, 2 = `or`, 3 = `and`, 4 = unary/atoms.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) | Formula::Iff(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn wrap(f: &Formula, min: u8) -> String {
    let s = formula(f);
    if level(f) < min {
        format!("({s})")
    } else {
        s
    }
}

pub fn formula(f: &Formula) -> String {
    match f {
        Formula::Const(b) => b.to_string(),
        Formula::Atom(t) => term(t),
        Formula::Eq(a, b) => format!("{} = {}", term(a), term(b)),
        Formula::Not(g) => format!("not {}", wrap(g, 4)),
        Formula::And(a, b) => format!("{} and {}", wrap(a, 3), wrap(b, 4)),
        Formula::Or(a, b) => format!("{} or {}", wrap(a, 2), wrap(b, 3)),
        Formula::Implies(a, b) => format!("{} => {}", wrap(a, 2), wrap(b, 2)),
        Formula::Iff(a, b) => format!("{} iff {}", wrap(a, 2), wrap(b, 2)),
    }
}
