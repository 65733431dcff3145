use super::*;

#[test]
fn rejects_bad_configurations() {
    assert!(matches!(SuiteConfig::new(2, 2).validate(), Err(Error::Config(_))));
    assert!(matches!(SuiteConfig::new(2, 9).validate(), Err(Error::Config(_))));
    assert!(matches!(SuiteConfig::new(3, 3).validate(), Err(Error::Config(_))));
    assert!(matches!(SuiteConfig::new(4, 3).validate(), Err(Error::Config(_))));
    assert!(SuiteConfig::new(2, 7).validate().is_ok());
    let mut slow = SuiteConfig::new(3, 3);
    slow.slow = true;
    assert!(slow.validate().is_ok());
    assert!(SuiteConfig::new(2, 3).with_suites(&[]).validate().is_err());
    let mut tol = SuiteConfig::new(2, 3);
    tol.tol.eq_abs = 0.0;
    assert!(tol.validate().is_err());
    // no partial report
    assert!(run_suite(&SuiteConfig::new(2, 2)).is_err());
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL {
        assert_eq!(Suite::parse(s.name()), Some(s));
    }
    assert_eq!(Suite::parse("everything"), None);
}

#[test]
fn weyl_suite_needs_no_groups() {
    let r = run_suite(&SuiteConfig::new(2, 3).with_suites(&[Suite::Weyl])).unwrap();
    assert!(r.checks.iter().all(|c| c.name.starts_with("weyl.")));
    assert_eq!(r.check("weyl.levi_outside_support").unwrap().status, Status::Fail);
    assert!(r.matching("weyl.").filter(|c| c.name != "weyl.levi_outside_support").all(|c| c.status == Status::Pass));
}

#[test]
fn names_are_unique_and_reports_reproducible() {
    let cfg = SuiteConfig::new(2, 3).with_suites(&[Suite::Groups, Suite::Weyl, Suite::Zeta]);
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let names: std::collections::HashSet<&str> = a.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names.len(), a.checks.len());
    assert!(a.to_json().contains("\"seed\""));
    assert!(!a.to_json().contains("runtime_ms"));
}

#[test]
fn csv_has_a_row_per_check() {
    let r = run_suite(&SuiteConfig::new(2, 3).with_suites(&[Suite::Weyl])).unwrap();
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), r.checks.len() + 1);
    assert!(r.render().ends_with("skipped\n"));
}
