use cabcalc::selftest;

#[test]
fn acceptance() {
    let checks = selftest::run_all();
    println!();
    for c in &checks {
        println!("{c}");
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    println!("{}/{} criteria passed", checks.len() - failed.len(), checks.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn invariant_sweep() {
    let checks = selftest::run_invariants();
    println!();
    for c in &checks {
        println!("{c}");
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| format!("{} {}", c.group, c.name)).collect();
    assert!(failed.is_empty(), "failed invariants: {failed:?}");
}
