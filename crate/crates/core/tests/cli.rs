use std::path::Path;
use std::process::Command;

fn dgflux(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_dgflux"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("failed to launch dgflux")
}

#[test]
fn run_then_config_extract_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "project = smoke\noutput_dir = out\nequation = euler\ninitial = vortex\n\
               domain = -4 4 -4 4\nnx = 4\nny = 4\nN = 2\nt_end = 0.05\n";
    std::fs::create_dir(dir.path().join("out")).unwrap();
    std::fs::write(dir.path().join("smoke.cfg"), cfg).unwrap();

    let out = dgflux(&["run", "smoke.cfg"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let ckpts: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map_or(false, |x| x == "ckpt"))
        .collect();
    assert!(!ckpts.is_empty());

    let out = dgflux(&["config-extract", ckpts[0].to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), cfg);
}

#[test]
fn unknown_key_is_rejected_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "N = 3\nfoo = 1\n").unwrap();
    let out = dgflux(&["run", "bad.cfg"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('2') && err.contains("foo"), "{err}");
}

#[test]
fn calibrate_cfl_reports_gamma1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.cfg"), "N = 3\n").unwrap();
    let out = dgflux(&["calibrate-cfl", "c.cfg"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let g: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("gamma1 = "))
        .expect("no gamma1 line")
        .trim()
        .parse()
        .unwrap();
    assert!((g - 2.875).abs() < 0.01, "{g}");
}
