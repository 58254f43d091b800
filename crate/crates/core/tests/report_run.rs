mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use fsc_core::config::{Method, RunConfig};
use fsc_core::report;

fn h2_config(out: PathBuf, methods: &[Method]) -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/h2.conf");
    let mut config = RunConfig::load(&path).unwrap();
    config.output = out;
    config.methods = methods.iter().copied().collect::<BTreeSet<_>>();
    config
}

#[test]
fn h2_run_writes_tables_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = h2_config(dir.path().to_path_buf(), &[Method::Vqd, Method::Fsc, Method::Oracle]);
    let report = report::run(&config).unwrap();
    assert!(report.summary.converged, "{:?}", report.summary.unconverged);
    for name in ["energies.csv", "energies.txt", "dipole_fsc.csv", "dipole_oracle.csv", "h_const.csv", "summary.json"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    let fsc = report.summary.transition_dipoles.iter().find(|t| t.method == "fsc").unwrap();
    let exact = report.summary.transition_dipoles.iter().find(|t| t.method == "oracle").unwrap();
    for c in &fsc.cells {
        assert!((c.debye.unwrap() - exact.debye(c.j, c.k).unwrap()).abs() <= 5e-2);
    }
    // CSV numerics round-trip.
    let csv = std::fs::read_to_string(dir.path().join("energies.csv")).unwrap();
    let first: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let energy: f64 = first[3].parse().unwrap();
    assert_eq!(energy, report.summary.energies[0].energy);
}

#[test]
fn same_seed_gives_identical_summary() {
    let methods = [Method::Vqd, Method::Ssvqe, Method::Direct, Method::Oracle];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    report::run(&h2_config(a.path().to_path_buf(), &methods)).unwrap();
    report::run(&h2_config(b.path().to_path_buf(), &methods)).unwrap();
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("summary.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn inconsistent_fixtures_fail_before_computation() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = h2_config(dir.path().to_path_buf(), &[Method::Oracle]);
    let two_qubit = dir.path().join("two.txt");
    std::fs::write(&two_qubit, "qubits=2 label=x units=dimensionless\n1 0 ZZ\n").unwrap();
    config.fixture.dipole[1] = two_qubit;
    let err = report::run(&config).unwrap_err().to_string();
    assert!(err.contains("dipole_y"), "{err}");
    assert!(!dir.path().join("summary.json").exists());

    config.fixture.dipole[1] = dir.path().join("missing.txt");
    assert!(report::validate(&config).is_err());
}
