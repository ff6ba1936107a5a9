use std::process::Command;

fn harvestlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_harvestlab")).args(args).output().unwrap()
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["sweep", "--variable", "L", "--from", "0.1", "--to", "8", "--points", "40", "--spacing", "log"];
    let a = harvestlab(&args);
    let b = harvestlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["reproduce", "fig9", "--points", "16"];
    let one = Command::new(env!("CARGO_BIN_EXE_harvestlab"))
        .args(args)
        .env("HARVESTLAB_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_harvestlab"))
        .args(args)
        .env("HARVESTLAB_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(harvestlab(&["--help"]).status.code(), Some(0));
    assert_eq!(harvestlab(&["--version"]).status.code(), Some(0));
    let bad = harvestlab(&["point", "--dz", "-1"]);
    assert_eq!(bad.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parameter");
    let strict = harvestlab(&[
        "validate", "--rel-tol", "1e-18", "--omegas", "0.1", "--delta-omegas", "0.5", "--separations", "0.5", "--dzs",
        "1", "--alignments", "vertical",
    ]);
    assert_eq!(strict.status.code(), Some(3));
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("harvestlab-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fig.json");
    let args = ["reproduce", "fig4a", "--points", "8", "--format", "json"];
    let to_stdout = harvestlab(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    let to_file = harvestlab(&with_file);
    assert!(to_file.status.success() && to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    let v: serde_json::Value = serde_json::from_slice(&to_stdout.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    std::fs::remove_dir_all(&dir).unwrap();
}
