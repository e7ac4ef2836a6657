use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pbit-emu"))
}

#[test]
fn compare_preset_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cli()
        .args(["compare", "--seed", "4", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["manifest.json", "summary.json", "compare.csv", "histogram_exact.csv"] {
        assert!(tmp.path().join(f).exists(), "{f}");
    }
}

#[test]
fn invalid_config_exits_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "experiment = \"psl\"\nseed = 1\noutput_dir = \"x\"\n\n[model]\nkind = \"tfim\"\nbonds = [1.0, 1.0, 1.0]\ngamma_x = 0.0\ngamma_z = 0.0\n\n[mapping]\nn = 10\n\n[sampler]\nbeta = 1.0\nsweeps = 100\n",
    )
    .unwrap();
    let out = cli().arg("psl").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gamma_x"), "{err}");

    let out = cli().arg("exact").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "subcommand must match the config");
}

#[test]
fn missing_config_is_a_runtime_error() {
    let out = cli().args(["exact", "--config", "/nonexistent/pbit.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = cli().arg("exact").arg("--out").arg(blocker.join("sub")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
