// Scratch probe: per-mutant CI/CSI trigger rates over the shipped corpus.

use qtest_cli::config::ExperimentConfig;
use qtest_core::benchsuite::{build_program, trial_plan};
use qtest_core::mutator::{parse_corpus, trigger_trial};
use qtest_core::rng::SplitRng;
use qtest_core::stateprep::InputKind;

#[test]
#[ignore]
fn per_mutant_rates() {
    let _ = ExperimentConfig::default();
    let src = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../corpus/qft_n6.qir"
    ))
    .unwrap();
    let (mutants, _) = parse_corpus(&src).unwrap();
    let prog = build_program();
    let plan = trial_plan("QFT", 6).unwrap();
    for (i, m) in mutants.iter().enumerate() {
        let mutated = prog.with_override(m.program.clone()).unwrap();
        let mut rates = Vec::new();
        for kind in [InputKind::Ci, InputKind::Csi] {
            let mut hits = 0;
            for t in 0..200u64 {
                let mut rng = SplitRng::derive(999, &[i as u64, t]);
                if trigger_trial(&mutated, &prog, &plan, kind, true, &mut rng).unwrap() {
                    hits += 1;
                }
            }
            rates.push(hits as f64 / 200.0);
        }
        println!(
            "{i:2} {:?} {:8} {:24} ci={:.2} csi={:.2} gap={:+.2}",
            m.kind,
            m.edit.name(),
            format!("{}@{}", m.payload, m.site),
            rates[0],
            rates[1],
            rates[1] - rates[0]
        );
    }
}
