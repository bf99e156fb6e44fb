//! Explainer behaviour beyond the loan golden texts.

use indexmap::IndexMap;
use rulelens_core::explain::{
    case_record, contextual, counterfactual, explain, feature_distance, feature_ranges, historical_cases,
    nearest_unlike_neighbor, render_counterfactual, render_trace, trace, trace_all, CaseRecord, ExplainError,
    ExplainOptions, ExplanationKind,
};
use rulelens_core::fixtures::load_fixture;
use rulelens_core::kb::{parse_statement, parse_triples};
use rulelens_core::rules::parse_rules;
use rulelens_core::{infer, InferenceModel, Iri, LabelTable, ModelError, Number, Statement, Term};

fn model(id: &str) -> InferenceModel {
    let f = load_fixture(id).unwrap();
    infer(&f.graph, &f.rules).unwrap()
}

fn stmt(m: &InferenceModel, text: &str) -> Statement {
    parse_statement(text, m.base().prefixes()).unwrap()
}

fn ex(local: &str) -> Iri {
    Iri::new("ex", local)
}

fn loan_case(m: &InferenceModel, who: &str, outcome: &str) -> CaseRecord {
    case_record(m, &ex(who), &ex("loanEligibility"), Term::string(outcome)).unwrap()
}

/// Ranges over all three applicants: credit 95, debt 1000, income 0, DTI 0.2.
fn three_applicant_ranges() -> IndexMap<Iri, f64> {
    [("creditScore", 95.0), ("monthlyDebt", 1000.0), ("monthlyIncome", 0.0), ("dtiRatio", 0.4 - 0.2)]
        .into_iter()
        .map(|(p, r)| (ex(p), r))
        .collect()
}

#[test]
fn distance_matches_hand_computation() {
    let m = model("loan");
    let (a1, a2, a3) = (
        loan_case(&m, "applicant1", "Not Eligible"),
        loan_case(&m, "applicant2", "Not Eligible"),
        loan_case(&m, "applicant3", "Eligible"),
    );
    let ranges = three_applicant_ranges();
    assert_eq!(feature_ranges([&a1, &a2, &a3]), ranges);
    assert!((feature_distance(&a1, &a3, &ranges) - (20.0 / 95.0 + 1.0 + 0.0 + 1.0)).abs() < 1e-9);
    // 95/95 + 500/1000 + 0 + 0.1/0.2
    assert!((feature_distance(&a2, &a3, &ranges) - 2.0).abs() < 1e-9);
    assert_eq!(feature_distance(&a1, &a1, &ranges), 0.0);
}

#[test]
fn outcome_and_type_are_not_features() {
    let m = model("loan");
    let a1 = loan_case(&m, "applicant1", "Not Eligible");
    let names: Vec<&str> = a1.features.keys().map(|p| p.local.as_str()).collect();
    assert_eq!(names, ["monthlyDebt", "monthlyIncome", "creditScore", "dtiRatio"]);
    assert!(!a1.asserted.contains(&ex("dtiRatio")));
}

#[test]
fn historical_cases_filter_by_outcome() {
    let m = model("loan");
    let eligible = historical_cases(&m, &ex("loanEligibility"), &Term::string("Eligible"), &ex("applicant1"));
    assert_eq!(eligible.iter().map(|c| c.subject.local.as_str()).collect::<Vec<_>>(), ["applicant3"]);
    assert!(historical_cases(&m, &ex("loanEligibility"), &Term::string("Approved"), &ex("applicant1")).is_empty());
}

const FOUR_APPLICANTS: &str = "@prefix ex: <http://example.org/loan#> .
ex:applicant1 ex:type ex:Person .
ex:applicant1 ex:monthlyDebt 2000.0 .
ex:applicant1 ex:monthlyIncome 5000.0 .
ex:applicant1 ex:creditScore 680 .
ex:applicant3 ex:type ex:Person .
ex:applicant3 ex:monthlyDebt 1000.0 .
ex:applicant3 ex:monthlyIncome 5000.0 .
ex:applicant3 ex:creditScore 700 .
ex:applicant4 ex:type ex:Person .
ex:applicant4 ex:monthlyDebt 1700.0 .
ex:applicant4 ex:monthlyIncome 5000.0 .
ex:applicant4 ex:creditScore 690 .
";

fn four_applicants() -> InferenceModel {
    let rules = load_fixture("loan").unwrap().rules;
    infer(&parse_triples(FOUR_APPLICANTS).unwrap(), &rules).unwrap()
}

#[test]
fn several_eligible_cases_pick_the_nearest() {
    let m = four_applicants();
    let history = historical_cases(&m, &ex("loanEligibility"), &Term::string("Eligible"), &ex("applicant1"));
    assert_eq!(history.len(), 2);

    let query = loan_case(&m, "applicant1", "Not Eligible");
    let ranges = feature_ranges(std::iter::once(&query).chain(&history));
    // oracle: exhaustive argmin
    let distances: Vec<f64> = history.iter().map(|h| feature_distance(&query, h, &ranges)).collect();
    let best = (0..distances.len()).min_by(|&i, &j| distances[i].total_cmp(&distances[j])).unwrap();
    assert_eq!(nearest_unlike_neighbor(&query, &history, &ranges).unwrap().0, best);
    assert_eq!(history[best].subject, ex("applicant4"));

    let c =
        counterfactual(&m, &stmt(&m, "ex:applicant1 ex:loanEligibility \"Not Eligible\""), &Term::string("Eligible"))
            .unwrap();
    let text = render_counterfactual(&c, &LabelTable::for_graph(m.base()));
    assert!(text.contains("applicant4 has Loan Eligibility: Eligible because:"));
    assert!(!text.contains("applicant3"));
}

#[test]
fn ties_break_on_subject_name() {
    let case = |name: &str, v: f64| CaseRecord {
        subject: ex(name),
        features: [(ex("x"), Term::Number(Number::integer(v)))].into_iter().collect(),
        asserted: Default::default(),
        outcome: Term::string("yes"),
    };
    let query = case("q", 5.0);
    let candidates = vec![case("zed", 4.0), case("amy", 6.0)];
    let ranges = feature_ranges(std::iter::once(&query).chain(&candidates));
    assert_eq!(nearest_unlike_neighbor(&query, &candidates, &ranges).unwrap().0, 1);
}

#[test]
fn counterfactual_preconditions() {
    let m = model("loan");
    let q = stmt(&m, "ex:applicant1 ex:loanEligibility \"Not Eligible\"");
    assert!(matches!(
        counterfactual(&m, &q, &Term::string("Not Eligible")),
        Err(ExplainError::DesiredEqualsCurrent(_))
    ));
    assert!(matches!(counterfactual(&m, &q, &Term::string("Approved")), Err(ExplainError::NoHistoricalCases { .. })));
    let absent = stmt(&m, "ex:applicant9 ex:loanEligibility \"Not Eligible\"");
    assert!(matches!(
        counterfactual(&m, &absent, &Term::string("Eligible")),
        Err(ExplainError::Model(ModelError::StatementNotFound(_)))
    ));
}

#[test]
fn counterfactual_validation_failure_is_reported() {
    // applicant2 fails only on credit; applicant3 is the only eligible case,
    // but a rule that also checks income makes copying its features useless.
    let text = "@prefix ex: <http://ex.org/#> .
ex:p1 ex:score 1 .
ex:p1 ex:group ex:red .
ex:p2 ex:score 1 .
ex:p2 ex:group ex:blue .
";
    let rules = parse_rules(
        "[Ok: (?p ex:group ex:blue) -> (?p ex:status 'ok')]
         [Bad: (?p ex:group ex:red) -> (?p ex:status 'bad')]
         [Locked: (?p ex:score ?s) (?p ex:status 'bad') -> (?p ex:locked 'yes')]",
    )
    .unwrap();
    let m = infer(&parse_triples(text).unwrap(), &rules).unwrap();
    // asking p1 (locked = yes) to become unlocked: no case has locked 'no'
    let q = stmt(&m, "ex:p1 ex:locked \"yes\"");
    assert!(matches!(counterfactual(&m, &q, &Term::string("no")), Err(ExplainError::NoHistoricalCases { .. })));
    // p1 vs p2 on status: changing group flips it
    let q = stmt(&m, "ex:p1 ex:status \"bad\"");
    let c = counterfactual(&m, &q, &Term::string("ok")).unwrap();
    assert!(c.validated);
    assert_eq!(c.flip_set.len(), 1);
}

#[test]
fn counterfactual_without_differences_fails_validation() {
    let text = "@prefix ex: <http://ex.org/#> .
ex:a ex:size 1 .
ex:b ex:size 1 .
ex:a ex:status \"low\" .
ex:b ex:status \"high\" .
";
    let m = infer(&parse_triples(text).unwrap(), &[]).unwrap();
    let q = stmt(&m, "ex:a ex:status \"low\"");
    let Err(ExplainError::ValidationFailed(c)) = counterfactual(&m, &q, &Term::string("high")) else {
        panic!("expected validation failure");
    };
    assert!(!c.validated && c.differences.is_empty());
    let rendered = render_counterfactual(&c, &LabelTable::for_graph(m.base()));
    assert!(rendered.contains("b has Status: high because:\n\nMinimal change: none"));
}

#[test]
fn transitive_trace_nests() {
    let m = model("transitive");
    let t = trace(&m, &stmt(&m, "ex:a ex:ancestorOf ex:d")).unwrap();
    assert!(t.depth() >= 2);
    let text = render_trace(&t, &LabelTable::for_graph(m.base()));
    assert!(text.starts_with("Conclusion: a has Ancestor Of: D\n"));
    assert!(text.contains("\n  Conclusion: "));
    assert!(text.contains("\n  Rule: [AncestorTransitivity:"));
}

#[test]
fn indentation_grows_two_spaces_per_level() {
    let edges: String = (0..5).map(|i| format!("ex:n{i} ex:next ex:n{} .\n", i + 1)).collect();
    let g = parse_triples(&format!("@prefix ex: <http://ex.org/#> .\n{edges}")).unwrap();
    // a rule that extends paths one edge at a time gives a chain of depth 4
    let rules = parse_rules(
        "[Start: (?x ex:next ?y) -> (?x ex:reaches ?y)]
         [Step: (?x ex:reaches ?y) (?y ex:next ?z) -> (?x ex:reaches ?z)]",
    )
    .unwrap();
    let m = infer(&g, &rules).unwrap();
    let t = trace(&m, &stmt(&m, "ex:n0 ex:reaches ex:n4")).unwrap();
    assert_eq!(t.depth(), 4);
    let text = render_trace(&t, &LabelTable::for_graph(m.base()));
    for level in 0..4 {
        let pad = " ".repeat(2 * level);
        assert!(text.lines().any(|l| l.starts_with(&format!("{pad}Conclusion: "))), "level {level}");
    }
    assert!(!text.lines().any(|l| l.starts_with(&format!("{}Conclusion: ", " ".repeat(8)))));
}

#[test]
fn contextual_rejects_asserted_and_missing() {
    let m = model("loan");
    let labels = LabelTable::for_graph(m.base());
    assert!(matches!(
        contextual(&m, &stmt(&m, "ex:applicant1 ex:monthlyDebt 2000.0"), &labels),
        Err(ExplainError::Model(ModelError::StatementIsAsserted(_)))
    ));
    assert!(matches!(
        contextual(&m, &stmt(&m, "ex:applicant1 ex:monthlyDebt 1.0"), &labels),
        Err(ExplainError::Model(ModelError::StatementNotFound(_)))
    ));
}

#[test]
fn contextual_single_premise_has_no_and() {
    let g = parse_triples("@prefix ex: <http://ex.org/#> .\nex:a ex:p ex:b .\n").unwrap();
    let m = infer(&g, &parse_rules("[R: (?x ex:p ?y) -> (?y ex:q ?x)]").unwrap()).unwrap();
    let c = contextual(&m, &stmt(&m, "ex:b ex:q ex:a"), &LabelTable::for_graph(m.base())).unwrap();
    assert_eq!(c.simple_text, "b has Q: A because a has P: B.");
}

#[test]
fn contextual_agrees_with_trace_root() {
    for id in ["loan", "transitive", "diet"] {
        let m = model(id);
        let labels = LabelTable::for_graph(m.base());
        for t in trace_all(&m).unwrap() {
            let c = contextual(&m, &t.conclusion, &labels).unwrap();
            assert_eq!(Some(&c.rule), t.rule.as_ref());
            let roots: Vec<&Statement> = t.matches.iter().map(|m| &m.statement).collect();
            assert_eq!(c.facts.iter().collect::<Vec<_>>(), roots);
        }
    }
}

#[test]
fn dispatch_requires_options() {
    let m = model("loan");
    let q = stmt(&m, "ex:applicant1 ex:loanEligibility \"Not Eligible\"");
    let none = ExplainOptions::default();
    assert!(matches!(explain(&m, &q, ExplanationKind::Contrastive, none), Err(ExplainError::MissingOption(_))));
    assert!(matches!(explain(&m, &q, ExplanationKind::Counterfactual, none), Err(ExplainError::MissingOption(_))));
    let against = ex("applicant3");
    let e = explain(&m, &q, ExplanationKind::Contrastive, ExplainOptions { against: Some(&against), ..none }).unwrap();
    assert_eq!(e.kind(), ExplanationKind::Contrastive);
    let json = serde_json::to_value(&e).unwrap();
    assert_eq!(json["differences"].as_array().unwrap().len(), 4);

    let t = explain(&m, &q, ExplanationKind::Trace, none).unwrap();
    let json = serde_json::to_value(&t).unwrap();
    assert_eq!(json["rule"]["name"], "NotEligibleDTIRule");
    assert_eq!(json["conclusion"]["o"], "\"Not Eligible\"");
}

#[test]
fn contrastive_across_models_compares_same_subject() {
    let loan = load_fixture("loan").unwrap();
    let this = infer(&loan.graph, &loan.rules).unwrap();
    let tweaked = loan.rules_text.replace("'0.349999'", "'0.449999'");
    let alt = infer(&loan.graph, &parse_rules(&tweaked).unwrap()).unwrap();
    let q = stmt(&this, "ex:applicant1 ex:loanEligibility \"Not Eligible\"");
    let e = explain(
        &this,
        &q,
        ExplanationKind::Contrastive,
        ExplainOptions { alt_model: Some(&alt), ..Default::default() },
    )
    .unwrap();
    let text = e.render(&LabelTable::for_graph(this.base()));
    assert!(text.contains("For Loan Eligibility: this model has Not Eligible while the alternate model has Eligible"));
}
