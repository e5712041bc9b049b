use bgk_spectral::acceptance::{self, Settings};

#[test]
fn acceptance_criteria() {
    let settings = Settings::default();
    let reports = acceptance::run_all(&settings);
    for r in &reports {
        println!("{r}");
        for c in r.failures() {
            println!("       failing: {c}");
        }
    }
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
