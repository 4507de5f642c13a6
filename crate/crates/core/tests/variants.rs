use faultspec::fixtures::{self, Case, VARIANTS};
use faultspec::harness::Mode;
use faultspec::pipeline::{run, RunOptions};

#[test]
fn every_variant_meets_its_expectation() {
    let mut bad = Vec::new();
    for v in VARIANTS {
        for mode in [Mode::Equals, Mode::ObserversOnly] {
            let mut fx = fixtures::load_fixture(v.case, v.id).unwrap();
            let opts = RunOptions {
                scope: fixtures::default_scope(v.case),
                mode,
                ..Default::default()
            };
            let out = run(&fx.module, &fx.methods, fx.adapter.as_mut(), &opts).unwrap();
            let d = &out.diagnosis;
            let names: Vec<_> = out.log.l1.iter().map(|p| format!("{}@{}", p.op, p.element)).collect();
            let l2: Vec<_> = out.log.l2.iter().map(|p| format!("{}@{}", p.op, p.element)).collect();
            let ok = v.expectation(mode).map(|e| e.met(v.target, d, out.log.is_clean()));
            println!(
                "{:9} {:15} {:9} {:24} fss={:?} ok={:?} L1={:?} L2={:?} L3={:?}",
                v.case.to_string(), v.id, mode.to_string(), d.verdict.to_string(), d.fss, ok, names, l2, out.log.l3
            );
            if ok == Some(false) {
                bad.push(format!("{} {} {}", v.case, v.id, mode));
            }
        }
    }
    let _ = Case::ALL;
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn seeds() {
    let mut bad = Vec::new();
    for seed in 0..30 {
        for v in VARIANTS {
            for mode in [Mode::Equals, Mode::ObserversOnly] {
                let mut fx = fixtures::load_fixture(v.case, v.id).unwrap();
                let mut opts = RunOptions { scope: fixtures::default_scope(v.case), mode, ..Default::default() };
                opts.search.seed = seed;
                let out = run(&fx.module, &fx.methods, fx.adapter.as_mut(), &opts).unwrap();
                if v.expectation(mode).map(|e| e.met(v.target, &out.diagnosis, out.log.is_clean())) == Some(false) {
                    bad.push(format!("{seed} {} {} {} -> {} {:?}", v.case, v.id, mode, out.diagnosis.verdict, out.diagnosis.fss));
                }
            }
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}
