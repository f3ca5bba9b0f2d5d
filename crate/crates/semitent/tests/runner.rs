use semitent::config::Scenario;
use semitent::output;
use semitent::runner::{exit_code, run_scenario, task_seed, RunSummary};

fn scenario(ids: &str, extra: &str) -> Scenario {
    Scenario::parse(&format!("[fixture]\nnames = [\"TP\", \"CYC_8\"]\n[check]\nids = [{ids}]\n{extra}")).unwrap()
}

fn csv(reports: &[semitent_core::CheckReport]) -> String {
    let mut buf = Vec::new();
    output::write_csv(reports, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn fixture_prefixed_axioms_yield_six_reports() {
    let reports = run_scenario(&scenario("\"TP-semigroup-axioms\"", ""), Some(1)).unwrap();
    assert_eq!(reports.len(), 6);
    assert!(reports.iter().all(|r| r.check_id == "semigroup-axioms" && r.fixture == "TP" && r.pass));
    let parts: Vec<&str> = reports.iter().map(|r| r.sweep_key.as_str()).collect();
    assert!(parts.contains(&"part=semigroup-law") && parts.contains(&"part=kadison-schwarz"));
}

#[test]
fn empty_check_list_gives_empty_report_set() {
    let reports = run_scenario(&scenario("", ""), None).unwrap();
    assert!(reports.is_empty());
    assert_eq!(exit_code(&RunSummary::of(&reports), true), 0);
    assert_eq!(csv(&reports).lines().count(), 1);
}

#[test]
fn unresolved_ids_are_config_errors() {
    let text = "[fixture]\nnames = [\"TP\"]\n[check]\nids = [\"no-such-check\"]\n";
    assert!(Scenario::parse(text).is_err());
    let text = "[fixture]\nnames = [\"TP\"]\n[check]\nids = [\"ZZ-semigroup-axioms\"]\n";
    assert!(Scenario::parse(text).is_err());
    let text = "[fixture]\nnames = [\"NOPE\"]\n[check]\nids = []\n";
    assert!(Scenario::parse(text).is_err());
}

#[test]
fn exact_budgets_cannot_be_overridden() {
    let text = "[fixture]\nnames = [\"TP\"]\n[check]\nids = []\n[check.overrides.dyadic-nesting]\nbudget = 5.0\n";
    assert!(Scenario::parse(text).is_err());
    let text = "[fixture]\nnames = [\"TP\"]\n[check]\nids = []\n[check.overrides.h1-bmo-duality]\nbudget = 5.0\n";
    assert!(Scenario::parse(text).is_ok());
}

#[test]
fn output_is_sorted_and_independent_of_thread_count() {
    let s = scenario("\"gamma-positive\", \"poisson-routes\", \"min-alpha\"", "seed = 9");
    let a = run_scenario(&s, Some(1)).unwrap();
    let b = run_scenario(&s, Some(3)).unwrap();
    assert_eq!(csv(&a), csv(&b));
    let keys: Vec<_> = a.iter().map(|r| (&r.check_id, &r.fixture, &r.sweep_key)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(a.iter().all(|r| r.seed == task_seed(9, &r.check_id, Some(&r.fixture))));
}

#[test]
fn seeds_change_sampled_checks() {
    let a = run_scenario(&scenario("\"TP-gamma-positive\"", "seed = 1"), None).unwrap();
    let b = run_scenario(&scenario("\"TP-gamma-positive\"", "seed = 2"), None).unwrap();
    assert_ne!(a[0].seed, b[0].seed);
    assert_ne!(a[0].lhs, b[0].lhs);
}

#[test]
fn numerical_errors_are_reported_and_the_run_continues() {
    // 1000 cells cannot be tiled by the 32-cell dyadic atoms.
    let s = scenario("\"dyadic-nesting\", \"TP-gamma-positive\"", "[line]\nn = 1000\nh = 0.1\n");
    let reports = run_scenario(&s, None).unwrap();
    assert_eq!(reports.len(), 2);
    let errored: Vec<_> = reports.iter().filter(|r| r.errored).collect();
    assert_eq!(errored.len(), 1);
    assert_eq!(errored[0].check_id, "dyadic-nesting");
    let summary = RunSummary::of(&reports);
    assert_eq!(exit_code(&summary, false), 0);
    assert_eq!(exit_code(&summary, true), 3);
}

#[test]
fn three_reports_make_a_four_line_csv() {
    let reports = run_scenario(&scenario("\"TP-min-alpha\", \"poisson-scalar-identity\"", ""), None).unwrap();
    assert_eq!(reports.len(), 3);
    let text = csv(&reports);
    assert_eq!(text.lines().count(), 4);
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').count(), 9);
    }
}
