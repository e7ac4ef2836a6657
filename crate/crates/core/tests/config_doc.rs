use pbit_emu::experiment::{ExperimentConfig, ExperimentKind};

#[test]
fn documented_example_parses_and_validates() {
    let doc = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/config.md")).unwrap();
    let start = doc.find("```toml\n").expect("toml block") + 8;
    let end = start + doc[start..].find("```").unwrap();
    let cfg = ExperimentConfig::from_toml_str(&doc[start..end]).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg.experiment, ExperimentKind::Compare);
    assert_eq!(cfg.sampler().unwrap().sweeps, 100_000);
}
