use std::fs;
use std::process::{Command, Output};

use rdpce_cli::output::parse_csv;

fn rdpce(args: &[&str], out: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdpce"))
        .args(args)
        .env("RDPCE_OUT", out)
        .output()
        .unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &[],
        &["ipce", "--bogus"],
        &["ipce", "--model", "quartic", "--scheme", "ee"],
        &["ipce", "--model", "linear", "--scheme", "etdrdpif"],
        &["nipce", "--preset", "linear-d9"],
        &["det", "--model", "linear", "--scheme", "ee", "-T", "-1"],
    ];
    for args in cases {
        let out = rdpce(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn blow_up_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = rdpce(
        &["det", "--model", "quadratic", "--scheme", "ee", "--xi", "2", "-T", "1", "-M", "1000"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blow-up"));
}

#[test]
fn preset_writes_named_files_under_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = rdpce(&["--desk", "ipce", "--preset", "linear-d0"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for tag in ["FD_EE", "FD_ETDRDP", "Spectral"] {
        let file = dir.path().join(format!("errorarray_{tag}_mean_system=6_D=0.00000.txt"));
        let table = parse_csv(&file).unwrap();
        assert_eq!(table.header, vec!["t", "N=1", "N=2", "N=3", "N=4", "N=5"]);
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(file.with_extension("txt.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["metadata"]["run_config"]["args"]["preset"], "linear-d0");
        assert_eq!(meta["metadata"]["scale"]["scale"], "desk");
    }
}

#[test]
fn tensor_dump_has_index_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = rdpce(
        &["det", "--model", "cubic", "--scheme", "etdrk4", "-N", "2", "-M", "5", "--dump-tensors"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let k4 = fs::read_to_string(dir.path().join("tensors/tensor_k4_N=2.csv")).unwrap();
    let mut lines = k4.lines();
    assert_eq!(lines.next(), Some("i,j,k,eta,value"));
    assert_eq!(lines.count(), 81);
}
