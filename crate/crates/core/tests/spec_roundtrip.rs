use proptest::prelude::*;

use faultspec::fixtures::Case;
use faultspec::spec::ast::{Formula, Pos, Term};
use faultspec::spec::{parse_syntax, pretty_print};

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["S", "E", "F"]).prop_map(|v| Term::Var(v.into(), Pos::default())),
        Just(Term::App("empty".into(), vec![], Pos::default())),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (prop::sample::select(vec!["insert", "largest", "geq"]), prop::collection::vec(inner, 1..=2))
            .prop_map(|(op, args)| Term::App(op.into(), args, Pos::default()))
    })
}

fn formula() -> impl Strategy<Value = Formula> {
    let atom = (prop::sample::select(vec!["isEmpty", "isIn"]), prop::collection::vec(term(), 1..=2))
        .prop_map(|(op, args)| Formula::Atom(Term::App(op.into(), args, Pos::default())));
    let leaf = prop_oneof![
        any::<bool>().prop_map(Formula::Const),
        atom,
        (term(), term()).prop_map(|(a, b)| Formula::Eq(a, b)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::Iff(Box::new(a), Box::new(b))),
        ]
    })
}

#[test]
fn bundled_specs_survive_printing() {
    for case in Case::ALL {
        let ast = parse_syntax(case.spec_text()).unwrap();
        let printed = pretty_print(&ast);
        assert_eq!(parse_syntax(&printed).unwrap(), ast, "{case}");
        assert_eq!(pretty_print(&parse_syntax(&printed).unwrap()), printed);
    }
}

proptest! {
    #[test]
    fn printed_axioms_parse_back(f in formula()) {
        let mut ast = parse_syntax(Case::SortedSet.spec_text()).unwrap();
        ast.units[0].axioms[0].formula = f.clone();
        let back = parse_syntax(&pretty_print(&ast)).unwrap();
        prop_assert_eq!(&back.units[0].axioms[0].formula, &f);
    }
}
