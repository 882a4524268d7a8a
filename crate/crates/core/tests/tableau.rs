use hybrid_tableau::parser::{parse, parse_formula};
use hybrid_tableau::preprocess::preprocess;
use hybrid_tableau::semantics::{extract_model, validate_pseudo_saturation};
use hybrid_tableau::syntax::{Assertion, Nominal, Relation, SatStatement};
use hybrid_tableau::tableau::{
    apply_rule, solve, Branch, BranchStatus, Inference, Label, NodeId, RuleKind, RuleOutcome, SolveConfig,
    TableauError, Verdict,
};

const FIG: &str = "trans r; r <= s; s <= r; formula: <s><s> p & [s] !p;";

fn sat(a: &str, body: &str) -> Label {
    Label::Sat(SatStatement::new(Nominal::new(a), parse_formula(body).unwrap()))
}

fn step(b: Branch, inf: Inference) -> Branch {
    match apply_rule(b, &inf).unwrap() {
        RuleOutcome::One(b, _) => b,
        RuleOutcome::Split(..) => panic!("unexpected split"),
    }
}

fn n(i: usize) -> NodeId {
    NodeId(i)
}

fn solve_text(text: &str) -> (Verdict, hybrid_tableau::parser::Problem) {
    let p = preprocess(&parse(text).unwrap()).unwrap();
    (solve(&p, &SolveConfig::default()).unwrap().verdict, p)
}

#[test]
fn initial_nodes_and_inclusion_closure() {
    let b = Branch::init(&parse(FIG).unwrap()).unwrap();
    let labels: Vec<String> = b.nodes().iter().map(|n| n.label.to_string()).collect();
    assert_eq!(labels[1..], ["trans r", "r <= s", "s <= r", "r <= r", "s <= s"]);
    assert_eq!(b.node(n(4)).provenance.rule, RuleKind::Rel0);
    assert!(b.nodes().iter().all(|n| n.parent.is_none()));
}

#[test]
fn inclusion_closure_composes() {
    let b = Branch::init(&parse("r <= s; s <= t; formula: p;").unwrap()).unwrap();
    let want = Assertion::Incl(Relation::forward("r"), "t".into());
    assert!(b.contains_label(&Label::Assert(want)));
    let b = Branch::init(&parse("r- <= s; s <= t; formula: p;").unwrap()).unwrap();
    let want = Assertion::Incl(Relation::backward("r"), "t".into());
    assert!(b.contains_label(&Label::Assert(want)));
}

#[test]
fn worked_example_replay() {
    let mut b = Branch::init(&parse(FIG).unwrap()).unwrap();
    b = step(b, Inference::And(n(0)));
    b = step(b, Inference::Diamond(n(6)));
    b = step(b, Inference::Diamond(n(9)));
    b = step(b, Inference::Link { premise: n(8), inclusion: n(3) });
    b = step(b, Inference::Link { premise: n(10), inclusion: n(3) });
    b = step(b, Inference::Trans { major: n(7), minor: n(12), trans: n(1), inclusion: n(2) });
    assert!(!b.is_closed());
    b = step(b, Inference::Box { major: n(14), minor: n(13) });

    let want = [
        (6, sat("_0", "<s><s> p"), None),
        (7, sat("_0", "[s] !p"), None),
        (8, sat("_0", "<s> '_1"), Some(6)),
        (9, sat("_1", "<s> p"), Some(6)),
        (10, sat("_1", "<s> '_2"), Some(9)),
        (11, sat("_2", "p"), Some(9)),
        (12, sat("_0", "<r> '_1"), Some(6)),
        (13, sat("_1", "<r> '_2"), Some(9)),
        (14, sat("_1", "[r] !p"), Some(6)),
        (15, sat("_2", "!p"), Some(9)),
    ];
    assert_eq!(b.len(), 16);
    for (i, label, parent) in want {
        assert_eq!(b.node(n(i)).label, label, "node {i}");
        assert_eq!(b.node(n(i)).parent, parent.map(n), "parent of node {i}");
    }
    assert_eq!(b.node(n(14)).provenance.premises, vec![n(7), n(12), n(1), n(2)]);
    assert_eq!(b.status(), BranchStatus::Closed(n(11), n(15)));
}

#[test]
fn restrictions_are_enforced() {
    let b = Branch::init(&parse(FIG).unwrap()).unwrap();
    let b = step(b, Inference::And(n(0)));
    let err = apply_rule(b.clone(), &Inference::And(n(0))).err().unwrap();
    assert!(matches!(err, TableauError::Restriction { restriction: "R1", .. }));
    let b = step(b, Inference::Diamond(n(6)));
    let err = apply_rule(b.clone(), &Inference::Diamond(n(6))).err().unwrap();
    assert!(matches!(err, TableauError::Restriction { restriction: "R2", .. }));
    let err = apply_rule(b.clone(), &Inference::Or(n(7))).err().unwrap();
    assert!(matches!(err, TableauError::Schema { .. }));
    let err = apply_rule(b, &Inference::Box { major: n(7), minor: n(9) }).err().unwrap();
    assert!(matches!(err, TableauError::Schema { .. }));
}

#[test]
fn blocked_nodes_are_not_expanded() {
    // _2:<r>p is blocked by _1:<r>p; the top nominal _0 can only map to itself.
    let mut b = Branch::init(&parse("formula: <r> p & [A] <r> p;").unwrap()).unwrap();
    b = step(b, Inference::And(n(0)));
    b = step(b, Inference::Diamond(n(2)));
    b = step(b, Inference::Global { major: n(3), nominal: Nominal::new("_1") });
    assert_eq!(b.node(n(6)).label, sat("_1", "<r> p"));
    assert!(!b.blocking().is_blocked(n(6)));
    b = step(b, Inference::Diamond(n(6)));
    b = step(b, Inference::Global { major: n(3), nominal: Nominal::new("_2") });
    let last = NodeId(b.len() - 1);
    assert_eq!(b.node(last).label, sat("_2", "<r> p"));
    assert_eq!(b.blocking().record(last).unwrap().blocker, n(6));
    assert!(b.blocking().is_directly_blocked(last));
    let err = apply_rule(b, &Inference::Diamond(last)).err().unwrap();
    assert!(matches!(err, TableauError::Restriction { restriction: "R4", .. }));
}

#[test]
fn worked_example_closes_on_one_branch() {
    let p = parse(FIG).unwrap();
    let res = solve(&preprocess(&p).unwrap(), &SolveConfig { record_trace: true, ..Default::default() }).unwrap();
    assert!(res.verdict.is_unsat());
    assert_eq!(res.stats.branches, 1);
    let trace = res.trace.unwrap();
    assert!(trace.count(RuleKind::Link) >= 1);
    assert!(trace.count(RuleKind::Trans) >= 1);
}

#[test]
fn simple_verdicts() {
    let cases = [
        ("formula: @'a p & @'a !p;", false),
        ("formula: 'a & !'a;", false),
        ("formula: down x . <r> x;", true),
        ("formula: <r> p & [r] !p;", false),
        ("formula: <r> p | <r> q;", true),
        ("formula: [A] <r> p;", true),
        ("trans r; formula: <r> <r> p & [r] !p;", false),
        ("formula: <r> <r> p & [r] [r] !p;", false),
        ("formula: <r-> p & [A] [r] !p;", true),
        ("formula: <r-> p & [A] [r-] !p;", false),
        ("r- <= r; formula: <r> p & [r] !p;", false),
        ("r- <= r; formula: <r> p & [r-] !p;", false),
        ("r- <= r; formula: <r> [r] !p & p;", false),
        ("formula: <E> p & [A] !p;", false),
        ("formula: @'a <r> 'b & @'b p & @'a [r] !p;", false),
        ("formula: @'a 'b & @'a p & @'b !p;", false),
    ];
    for (text, want) in cases {
        let (v, p) = solve_text(text);
        assert_eq!(v.is_sat(), want, "{text}");
        assert!(matches!(v, Verdict::Sat(_) | Verdict::Unsat), "{text}");
        if let Verdict::Sat(b) = v {
            assert!(validate_pseudo_saturation(&b).is_empty(), "{text}");
            let (_, report) = extract_model(&b, &p);
            assert!(report.passes(), "{text}: {report:?}");
        }
    }
}

#[test]
fn reflexive_probe_extracts_a_loop() {
    let (v, p) = solve_text("formula: down x . <r> x;");
    let Verdict::Sat(b) = v else { panic!("expected SAT") };
    let (m, report) = extract_model(&b, &p);
    assert!(report.passes());
    assert!(m.rho[&"r".into()].iter().any(|(u, v)| u == v));
}

#[test]
fn transitive_chain_is_closed_in_the_model() {
    let (v, p) = solve_text("trans r; formula: <r> (p & <r> q);");
    let Verdict::Sat(b) = v else { panic!("expected SAT") };
    let (m, report) = extract_model(&b, &p);
    assert!(report.passes());
    let r = &m.rho[&"r".into()];
    let a = m.nominals[&Nominal::new("_0")];
    let q = (0..m.states).find(|&w| m.valuation[w].contains(&"q".into())).unwrap();
    assert!(r.contains(&(a, q)));
}
