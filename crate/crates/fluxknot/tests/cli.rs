use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], config: Option<&str>, out: &Path) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fluxknot"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(text) = config {
        let path = dir.path().join("config.toml");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(&path);
    }
    cmd.output().unwrap()
}

const FLUX: &str = r#"
[profiles.unit]
f = { family = "constant", value = 1.0 }
g = { family = "constant", value = 0.0 }

[mc]
epsilon = 1e-3
n = 20000
seed = 3
theta_grid = 8
convergence_epsilons = [1e-2, 1e-3]
"#;

#[test]
fn flux_outputs_are_reproducible_and_seeded() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    assert!(run(&["flux", "--threads", "1"], Some(FLUX), a.path()).status.success());
    assert!(run(&["flux", "--threads", "3"], Some(FLUX), b.path()).status.success());
    assert!(run(&["flux", "--seed", "4"], Some(FLUX), c.path()).status.success());
    for name in ["flux_unit.csv", "flux_unit_convergence.csv", "report.txt"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    assert_ne!(
        std::fs::read(a.path().join("flux_unit.csv")).unwrap(),
        std::fs::read(c.path().join("flux_unit.csv")).unwrap()
    );
    let csv = std::fs::read_to_string(a.path().join("flux_unit.csv")).unwrap();
    assert!(csv.starts_with("theta,value,stderr,n,epsilon,seed\n"));
    assert_eq!(csv.lines().count(), 9);
    assert!(!csv.contains('\r'));
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let parse = run(&["invariants"], Some("[profiles.x]\nf = 3\n"), out.path());
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line"));

    let singular = "[profiles.bad]\nf = { family = \"affine\", slope = 1.0, intercept = -0.5 }\n\
                    g = { family = \"constant\", value = 0.0 }\n";
    let r = run(&["invariants"], Some(singular), out.path());
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("t = 0.5"));

    let flagged = run(&["sweep"], Some("[sweep]\na = 3.0\nb = 4.0\nq = [2.0]\n"), out.path());
    assert_eq!(flagged.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&flagged.stderr).contains("|a| < |b| - |Q|"));
    assert!(out.path().join("sweep.csv").exists());

    let no_config = run(&["flux"], None, out.path());
    assert_eq!(no_config.status.code(), Some(2));
}

#[test]
fn sweep_and_invariants_write_expected_files() {
    let out = tempfile::tempdir().unwrap();
    let config = "[profiles.const_2_3]\nf = { family = \"constant\", value = 2.0 }\n\
                  g = { family = \"constant\", value = 3.0 }\n\
                  [sweep]\na = 1.0\nb = 4.0\nq = [-2.0, -1.0, 0.0, 1.0, 2.0]\n\
                  [assembly]\nstandard = true\n";
    let r = run(&["sweep"], Some(config), out.path());
    assert!(r.status.success());
    assert!(String::from_utf8_lossy(&r.stdout).contains("independence demonstrated"));
    let r = run(&["invariants"], Some(config), out.path());
    assert!(r.status.success());
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("external tori [B1.0, B1.1]"), "{stdout}");
    for name in ["sweep.csv", "invariants.csv", "assembly.toml", "report.txt"] {
        assert!(out.path().join(name).exists(), "{name}");
    }
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        fluxknot::config::ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
