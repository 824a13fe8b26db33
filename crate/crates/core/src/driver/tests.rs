use super::*;

#[test]
fn next_time_is_strictly_later() {
    assert_eq!(next_time(0.0, 0.25), 0.25);
    assert_eq!(next_time(0.25, 0.25), 0.5);
    assert_eq!(next_time(0.3, 0.25), 0.5);
    assert_eq!(next_time(0.3, 0.0), f64::INFINITY);
}

const ADVECTION: &str = "
equation = scalar
advection_velocity = 1 0.5
nx = 4
ny = 4
N = 4
t_end = 0.3
analysis_dt = 0.1
output_dt = 0.15
";

#[test]
fn sine_advection_stays_accurate() {
    let mut sim = Simulation::from_text(ADVECTION).unwrap();
    let setup = sim.setup.clone();
    let exact = move |x: [f64; 2], t: f64, s: &mut [f64]| setup.state(x, t, s);
    let e0 = l2_error_overintegrated(&sim.op, &sim.u, &exact, 0.0, 12).unwrap()[0];
    let summary = sim.run(None).unwrap();
    assert_eq!(sim.t, 0.3);
    let times: Vec<f64> = summary.records.iter().map(|r| r.t).collect();
    assert_eq!(times, vec![0.0, 0.1, 0.2, 0.3]);
    assert!(summary.records.last().unwrap().l2.is_some());
    let e1 = l2_error_overintegrated(&sim.op, &sim.u, &exact, sim.t, 12).unwrap()[0];
    // a short run stays within a small multiple of the interpolation error
    assert!(e1 < 3.0 * e0, "{e0:e} -> {e1:e}");
}

#[test]
fn restart_replays_the_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut full = Simulation::from_text(ADVECTION).unwrap();
    let summary = full.run(Some(dir.path())).unwrap();
    assert_eq!(summary.checkpoints.len(), 2);
    let mid = Checkpoint::read(&summary.checkpoints[0]).unwrap();
    assert_eq!(mid.time, 0.15);
    let mut resumed = Simulation::from_checkpoint(&mid).unwrap();
    resumed.run(None).unwrap();
    assert_eq!(resumed.step, full.step);
    assert!(resumed.u.data.iter().zip(&full.u.data).all(|(a, b)| a.to_bits() == b.to_bits()));
    assert_eq!(resumed.checkpoint().to_bytes().unwrap(), full.checkpoint().to_bytes().unwrap());
}

#[test]
fn restart_rejects_a_different_mesh() {
    let sim = Simulation::from_text(ADVECTION).unwrap();
    let mut ckpt = sim.checkpoint();
    ckpt.mesh_fingerprint ^= 1;
    assert!(Simulation::from_checkpoint(&ckpt).is_err());
}

#[test]
fn nodal_error_agrees_with_overintegration() {
    let mut sim = Simulation::from_text("nx = 8\nny = 8\nN = 7\nt_end = 0.05").unwrap();
    sim.run(None).unwrap();
    let nodal = sim.errors().unwrap().0[0];
    let setup = sim.setup.clone();
    let fine = l2_error_overintegrated(&sim.op, &sim.u, &|x, t, s| setup.state(x, t, s), sim.t, 16).unwrap()[0];
    assert!((nodal - fine).abs() < 1e-10, "{nodal:e} vs {fine:e}");
}

#[test]
fn free_stream_keeps_conservation_sums() {
    let text = "equation = euler\ninitial = constant\ninitial_state = 1 0.4 -0.2 1\nnx = 3\nny = 3\nt_end = 2\nanalysis_dt = 0.5";
    let mut sim = Simulation::from_text(text).unwrap();
    let s = sim.run(None).unwrap();
    let first = &s.records[0].integrals;
    for r in &s.records {
        for v in 0..4 {
            assert!((r.integrals[v] - first[v]).abs() < 1e-12 * first[v].abs().max(1.0));
        }
        assert_eq!(r.fv_fraction, 0.0);
    }
}

#[test]
fn failure_dumps_the_state() {
    let dir = tempfile::tempdir().unwrap();
    // a fixed step far beyond stability blows up
    let text = "equation = euler\ninitial = vortex\nnx = 2\nny = 2\ndt = 5\nt_end = 100\nproject = boom";
    let mut sim = Simulation::from_text(text).unwrap();
    assert!(sim.run(Some(dir.path())).is_err());
    assert!(dir.path().join("boom_crash.ckpt").exists());
}
