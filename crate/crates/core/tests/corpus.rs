use lowdeg_core::corpus::{corpus_config, run_corpus};

#[test]
fn engines_agree_with_oracle_on_corpus() {
    let reports = run_corpus(&corpus_config());
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    for r in &failed {
        eprintln!("{r:?}");
    }
    for r in &reports { println!("{:>22} {:>5} {:>7} {}", r.db, r.expected, r.tests_run, r.query); }
    assert!(reports.len() >= 200);
    assert!(failed.is_empty(), "{} of {} cases failed", failed.len(), reports.len());
}
