use proptest::prelude::*;

use hybrid_tableau::parser::{parse, parse_formula, print_formula, print_problem};
use hybrid_tableau::preprocess::{expand_all_graded, FreshVars};
use hybrid_tableau::semantics::{eval_sentence, Interpretation};
use hybrid_tableau::syntax::{is_nnf, nnf, Formula, Relation};

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::forward("r")), Just(Relation::backward("r"))]
}

fn grade() -> impl Strategy<Value = Option<u32>> {
    prop_oneof![3 => Just(None), 1 => (0u32..=2).prop_map(Some)]
}

/// Formulas over `p`, `q`, `'a` and the variable `x`, closed by an outer `↓x`.
fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::prop("p")),
        Just(Formula::prop("q")),
        Just(Formula::nom("a")),
        Just(Formula::var("x")),
        Just(Formula::tt()),
        Just(Formula::ff()),
    ];
    let body = leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (relation(), grade(), inner.clone()).prop_map(|(r, n, f)| match n {
                Some(n) => Formula::dia_n(r, n, f),
                None => Formula::dia(r, f),
            }),
            (relation(), grade(), inner.clone()).prop_map(|(r, n, f)| match n {
                Some(n) => Formula::box_n(r, n, f),
                None => Formula::boxed(r, f),
            }),
            inner.clone().prop_map(Formula::exists),
            inner.clone().prop_map(Formula::global),
            inner.clone().prop_map(|f| Formula::at("a", f)),
            inner.clone().prop_map(|f| Formula::at_var("x", f)),
            inner.prop_map(|f| Formula::down("x", f)),
        ]
    });
    body.prop_map(|f| Formula::down("x", f))
}

fn model() -> impl Strategy<Value = Interpretation> {
    (1usize..=3).prop_flat_map(|k| {
        (Just(k), 0u32..(1 << (k * k)), 0u32..(1 << k), 0u32..(1 << k), 0..k).prop_map(|(k, edges, p, q, a)| {
            let mut m = Interpretation::new(k);
            m.rho.entry("r".into()).or_default();
            for i in 0..k * k {
                if edges >> i & 1 == 1 {
                    m.add_edge("r", i / k, i % k);
                }
            }
            for w in 0..k {
                if p >> w & 1 == 1 {
                    m.set_prop("p", w);
                }
                if q >> w & 1 == 1 {
                    m.set_prop("q", w);
                }
            }
            m.name("a", a);
            m
        })
    })
}

fn truth(m: &Interpretation, f: &Formula) -> Vec<bool> {
    (0..m.states).map(|w| eval_sentence(m, w, f).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn nnf_preserves_truth(f in formula(), m in model()) {
        let g = nnf(&f);
        prop_assert!(is_nnf(&g));
        prop_assert_eq!(truth(&m, &f), truth(&m, &g));
    }

    #[test]
    fn nnf_is_idempotent(f in formula()) {
        let g = nnf(&f);
        prop_assert_eq!(nnf(&g), g);
    }

    #[test]
    fn graded_expansion_preserves_truth(f in formula(), m in model()) {
        let g = nnf(&f);
        let e = expand_all_graded(&g, &mut FreshVars::avoiding(&g));
        prop_assert!(!e.is_graded());
        prop_assert!(e.is_ground());
        prop_assert_eq!(truth(&m, &g), truth(&m, &e));
    }

    #[test]
    fn print_parse_round_trip(f in formula()) {
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn size_counts_nodes(f in formula()) {
        let mut n = 0;
        f.walk(&mut |_| n += 1);
        prop_assert_eq!(n, f.size());
    }
}

#[test]
fn problem_round_trip_keeps_assertions() {
    let p = parse("trans r; r- <= s; formula: <r>^2 p & [s]^1 'a;").unwrap();
    assert_eq!(parse(&print_problem(&p)).unwrap(), p);
}
