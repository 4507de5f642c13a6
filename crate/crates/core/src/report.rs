//! Run reports, as text for people and JSON for tools.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::harness::{FailureLog, Mode, Pair};
use crate::localizer::Diagnosis;
use crate::model::Structure;
use crate::pipeline::{exit_code, RunOutcome};
use crate::spec::ValidatedModule;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureSummary {
    pub carriers: BTreeMap<String, usize>,
    /// Construction term of every reachable core element, by element name.
    pub terms: BTreeMap<String, String>,
    pub unreachable: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub module: String,
    pub core: String,
    pub implementation: String,
    pub mode: Mode,
    pub seed: u64,
    pub structure: StructureSummary,
    pub log: FailureLog,
    pub diagnosis: Diagnosis,
    pub exit_code: i32,
}

impl Report {
    pub fn new(m: &ValidatedModule, implementation: &str, seed: u64, out: &RunOutcome) -> Self {
        let core = m.core;
        let structure = StructureSummary {
            carriers: m
                .sorts
                .iter()
                .zip(&out.structure.carriers)
                .map(|(s, &n)| (s.name.clone(), n))
                .collect(),
            terms: out
                .terms
                .terms
                .iter()
                .map(|(&e, t)| (Structure::element_name(m, core, e), t.render(m)))
                .collect(),
            unreachable: out
                .terms
                .unreachable
                .iter()
                .map(|&e| Structure::element_name(m, core, e))
                .collect(),
        };
        Report {
            module: m.name.clone(),
            core: m.sorts[core].name.clone(),
            implementation: implementation.to_string(),
            mode: out.log.mode,
            seed,
            structure,
            log: out.log.clone(),
            diagnosis: out.diagnosis.clone(),
            exit_code: exit_code(&out.log, &out.diagnosis),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    fn element(&self, e: usize) -> String {
        format!("{}{}", self.core, e)
    }

    fn pairs(&self, set: &std::collections::BTreeSet<Pair>) -> String {
        if set.is_empty() {
            return "(none)".into();
        }
        set.iter()
            .map(|p| format!("<{}, {}>", p.op, self.element(p.element)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} against {} ({} mode, seed {})",
            self.implementation, self.module, self.mode, self.seed
        );
        let carriers: Vec<String> = self.structure.carriers.iter().map(|(k, v)| format!("{k} {v}")).collect();
        let _ = writeln!(s, "\nstructure: {}", carriers.join(", "));
        for (e, t) in &self.structure.terms {
            let _ = writeln!(s, "  {e} = {t}");
        }
        for e in &self.structure.unreachable {
            let _ = writeln!(s, "  {e} unreachable, not tested");
        }
        let _ = writeln!(
            s,
            "\ncomparisons: {} ({} checks, {} mismatches)",
            self.log.comparisons,
            self.log.checks,
            self.log.mismatches.len()
        );
        for f in &self.log.construction_failures {
            let _ = writeln!(s, "  building {} failed in {}: {}", self.element(f.element), f.op, f.message);
        }
        for mm in &self.log.mismatches {
            let via = mm.via.as_ref().map(|v| format!(" via {v}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "  {:?} {}({}){} on {}: expected {}, got {}",
                mm.set,
                mm.op,
                mm.args.join(", "),
                via,
                self.element(mm.element),
                mm.expected,
                mm.actual
            );
        }
        let _ = writeln!(s, "\nL1: {}", self.pairs(&self.log.l1));
        let _ = writeln!(s, "L2: {}", self.pairs(&self.log.l2));
        let l3: Vec<String> = self.log.l3.iter().map(|(c, n)| format!("<{c}, {n}>")).collect();
        let _ = writeln!(s, "L3: {}", l3.join(" "));
        let _ = writeln!(s, "\ndiagnosis:");
        for line in &self.diagnosis.narrative {
            let _ = writeln!(s, "  {line}");
        }
        let fss: Vec<&str> = self.diagnosis.fss.iter().map(String::as_str).collect();
        let _ = writeln!(s, "\nverdict: {}", self.diagnosis.verdict);
        let _ = writeln!(s, "suspects: {{{}}}", fss.join(", "));
        s
    }
}
