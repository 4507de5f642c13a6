//! Turns a failure log into a verdict: one guilty operation, or none, plus
//! the final set of suspects (FSS).

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::harness::FailureLog;
use crate::spec::ValidatedModule;

/// Which names count towards "more than one observer failed".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountPolicy {
    /// Observers in L1, plus for each L2 pair the observers that exposed
    /// it, or the transformer itself when no observer was involved.
    #[default]
    Union,
    /// Observers in L1 only.
    L1Only,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "op", rename_all = "snake_case")]
pub enum Verdict {
    Guilty(String),
    Inconclusive,
}

impl Verdict {
    pub fn guilty(&self) -> Option<&str> {
        match self {
            Verdict::Guilty(op) => Some(op),
            Verdict::Inconclusive => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Guilty(op) => write!(f, "guilty: {op}"),
            Verdict::Inconclusive => f.write_str("inconclusive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Several operations failed and some creator has failed observations.
    Creator,
    /// Several operations failed and no creator is implicated.
    Transformer,
    /// At most one operation failed.
    Single,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub verdict: Verdict,
    pub branch: Branch,
    pub fss: BTreeSet<String>,
    pub narrative: Vec<String>,
}

/// Names counted by `policy`.
pub fn failing_names(log: &FailureLog, policy: CountPolicy) -> BTreeSet<String> {
    let mut names: BTreeSet<String> = log.l1.iter().map(|p| p.op.clone()).collect();
    if policy == CountPolicy::Union {
        for p in &log.l2 {
            match log.witnesses.get(&p.op).and_then(|w| w.get(&p.element)) {
                Some(ws) if !ws.is_empty() => names.extend(ws.iter().cloned()),
                _ => {
                    names.insert(p.op.clone());
                }
            }
        }
    }
    names
}

/// Transformers with an L2 pair on an element built only by a creator and
/// that transformer.
pub fn final_suspects(log: &FailureLog, m: &ValidatedModule, narrative: &mut Vec<String>) -> BTreeSet<String> {
    let mut fss = BTreeSet::new();
    for t in m.transformers() {
        let ncc = &m.ops[t].name;
        let all: Vec<usize> = log.l2.iter().filter(|p| &p.op == ncc).map(|p| p.element).collect();
        let kept: Vec<usize> = all
            .iter()
            .copied()
            .filter(|e| match log.provenance.get(e) {
                Some(pr) => pr.transformers.iter().all(|x| x == ncc),
                None => false,
            })
            .collect();
        narrative.push(format!(
            "{ncc}: {} failing pair(s), {} on objects built only by {ncc} and a creator",
            all.len(),
            kept.len()
        ));
        if !kept.is_empty() {
            fss.insert(ncc.clone());
        }
    }
    fss
}

pub fn diagnose(log: &FailureLog, m: &ValidatedModule) -> Diagnosis {
    diagnose_with(log, m, CountPolicy::Union)
}

pub fn diagnose_with(log: &FailureLog, m: &ValidatedModule, policy: CountPolicy) -> Diagnosis {
    let mut narrative = Vec::new();
    let names = failing_names(log, policy);
    narrative.push(format!(
        "failing operations: {}",
        if names.is_empty() {
            "none".to_string()
        } else {
            names.iter().cloned().collect::<Vec<_>>().join(", ")
        }
    ));
    let fss = final_suspects(log, m, &mut narrative);

    let (branch, verdict) = if names.len() > 1 {
        let positive: Vec<(&String, &usize)> = log.l3.iter().filter(|(_, &n)| n > 0).collect();
        if !positive.is_empty() {
            narrative.push(format!(
                "creators with failed observations: {}",
                positive.iter().map(|(c, n)| format!("{c} ({n})")).collect::<Vec<_>>().join(", ")
            ));
            let v = match positive[..] {
                [(c, _)] => Verdict::Guilty(c.clone()),
                _ => Verdict::Inconclusive,
            };
            (Branch::Creator, v)
        } else {
            narrative.push("no creator has failed observations".into());
            let v = match fss.len() {
                1 => Verdict::Guilty(fss.iter().next().expect("one suspect").clone()),
                _ => Verdict::Inconclusive,
            };
            (Branch::Transformer, v)
        }
    } else if log.l1.is_empty() && log.l2.is_empty() {
        narrative.push("no failing comparisons".into());
        (Branch::Single, Verdict::Inconclusive)
    } else {
        let v = match names.iter().next() {
            Some(op) => Verdict::Guilty(op.clone()),
            None if fss.len() == 1 => Verdict::Guilty(fss.iter().next().expect("one suspect").clone()),
            None => Verdict::Inconclusive,
        };
        (Branch::Single, v)
    };
    narrative.push(format!(
        "FSS = {{{}}}",
        fss.iter().cloned().collect::<Vec<_>>().join(", ")
    ));
    narrative.push(verdict.to_string());
    Diagnosis {
        verdict,
        branch,
        fss,
        narrative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{Mode, Pair, Provenance};
    use crate::spec::{parse_specification, validate_module};

    fn module() -> ValidatedModule {
        let src = "spec S sorts S[E]
            constructors empty: -> S[E]; insert: S[E] E -> S[E]; drop: S[E] E -> S[E];
            observers isEmpty: S[E]; largest: S[E] ->? E;
            domains X: S[E]; largest(X) if not isEmpty(X);
            end spec E sorts E end";
        validate_module(&parse_specification(src).unwrap()).unwrap()
    }

    fn log(l1: &[(&str, usize)], l2: &[(&str, usize)], l3: &[(&str, usize)]) -> FailureLog {
        let mut log = FailureLog::new(Mode::Equals, ["empty".to_string()]);
        let pairs = |v: &[(&str, usize)]| v.iter().map(|(o, e)| Pair { op: o.to_string(), element: *e }).collect();
        log.l1 = pairs(l1);
        log.l2 = pairs(l2);
        for (c, n) in l3 {
            log.l3.insert(c.to_string(), *n);
        }
        let prov = |t: &[&str]| Provenance {
            term: String::new(),
            creator: "empty".into(),
            transformers: t.iter().map(|s| s.to_string()).collect(),
        };
        log.provenance.insert(0, prov(&[]));
        log.provenance.insert(1, prov(&["insert"]));
        log.provenance.insert(2, prov(&["insert"]));
        log.provenance.insert(3, prov(&["insert", "drop"]));
        log
    }

    #[test]
    fn single_observer_is_guilty() {
        let d = diagnose(&log(&[("isEmpty", 1), ("isEmpty", 2)], &[], &[]), &module());
        assert_eq!(d.verdict, Verdict::Guilty("isEmpty".into()));
        assert_eq!(d.branch, Branch::Single);
        assert!(d.fss.is_empty());
    }

    #[test]
    fn empty_log_is_inconclusive() {
        let d = diagnose(&log(&[], &[], &[]), &module());
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert_eq!(d.narrative.last().unwrap(), "inconclusive");
    }

    #[test]
    fn several_observers_blame_the_transformer() {
        let l = log(&[("isEmpty", 1), ("largest", 2)], &[("insert", 1), ("insert", 2)], &[("empty", 0)]);
        let d = diagnose(&l, &module());
        assert_eq!(d.verdict, Verdict::Guilty("insert".into()));
        assert_eq!(d.branch, Branch::Transformer);
        assert_eq!(d.fss, BTreeSet::from(["insert".to_string()]));
    }

    #[test]
    fn unique_failing_creator_is_guilty() {
        let l = log(&[("isEmpty", 0), ("largest", 1)], &[("insert", 1)], &[("empty", 2)]);
        let d = diagnose(&l, &module());
        assert_eq!(d.verdict, Verdict::Guilty("empty".into()));
        assert_eq!(d.branch, Branch::Creator);
        assert_eq!(d.fss, BTreeSet::from(["insert".to_string()]));
    }

    #[test]
    fn pairs_on_mixed_objects_are_discarded() {
        let l = log(&[("isEmpty", 1)], &[("drop", 3)], &[]);
        let d = diagnose(&l, &module());
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert!(d.fss.is_empty());
    }

    #[test]
    fn two_suspects_are_inconclusive() {
        let l = log(&[("isEmpty", 1)], &[("drop", 0), ("insert", 1)], &[]);
        let d = diagnose(&l, &module());
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert_eq!(d.fss.len(), 2);
    }

    #[test]
    fn witnesses_replace_transformer_names() {
        let mut l = log(&[("isEmpty", 1)], &[("insert", 0)], &[]);
        l.witnesses
            .entry("insert".into())
            .or_default()
            .insert(0, BTreeSet::from(["isEmpty".to_string()]));
        let d = diagnose(&l, &module());
        assert_eq!(d.verdict, Verdict::Guilty("isEmpty".into()));
        assert_eq!(d.fss, BTreeSet::from(["insert".to_string()]));
    }

    #[test]
    fn l1_only_policy_ignores_transformers() {
        let l = log(&[("isEmpty", 1)], &[("insert", 1)], &[]);
        assert_eq!(diagnose(&l, &module()).branch, Branch::Transformer);
        let d = diagnose_with(&l, &module(), CountPolicy::L1Only);
        assert_eq!(d.verdict, Verdict::Guilty("isEmpty".into()));
        assert_eq!(d.branch, Branch::Single);
    }
}
