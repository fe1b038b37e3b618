use ergoshift::battery::{criterion_count, criterion_seed, run_battery, run_criterion, BatteryOptions, Scale, DEFAULT_SEED};

#[test]
fn quick_battery_passes() {
    let report = run_battery(&BatteryOptions::new(Scale::Quick, DEFAULT_SEED));
    for c in &report.criteria {
        assert!(c.passed, "{}", c.summary_line());
        assert!(c.checks.iter().all(|k| !k.lhs.is_nan()));
    }
    assert!(report.passed);
    assert_eq!(report.criteria.len(), criterion_count());
}

#[test]
fn negative_control_is_caught() {
    let opts = BatteryOptions { negative_control: true, ..BatteryOptions::new(Scale::Quick, DEFAULT_SEED) };
    let report = run_criterion(1, &opts).unwrap();
    assert!(!report.passed);
    assert!(report.checks.iter().any(|c| !c.holds && c.label.contains("Walsh")));
}

#[test]
fn artifacts_are_reproducible() {
    let opts = BatteryOptions::new(Scale::Quick, 17);
    for id in [7, 8] {
        let a = run_criterion(id, &opts).unwrap();
        let b = run_criterion(id, &opts).unwrap();
        let contents = |r: &ergoshift::battery::CriterionReport| r.artifacts.iter().map(|x| x.contents.clone()).collect::<Vec<_>>();
        assert!(!a.artifacts.is_empty());
        assert_eq!(contents(&a), contents(&b));
    }
}

#[test]
fn criterion_seeds_are_distinct() {
    let seeds: std::collections::BTreeSet<u64> = (1..=8).map(|id| criterion_seed(DEFAULT_SEED, id)).collect();
    assert_eq!(seeds.len(), 8);
    assert!(run_criterion(0, &BatteryOptions::new(Scale::Quick, 1)).is_none());
    assert!(run_criterion(9, &BatteryOptions::new(Scale::Quick, 1)).is_none());
}
