use super::*;
use crate::dg::VolumeForm;
use crate::equations::{prim_to_cons, Prim};

fn ode_field(y: &[f64]) -> ElementField {
    let mut f = ElementField::zeros(y.len(), 1, 1);
    f.data.copy_from_slice(y);
    f
}

fn integrate(scheme: &RkScheme, y0: &[f64], t_end: f64, steps: usize, rhs: &dyn Fn(&[f64], f64, &mut [f64])) -> Vec<f64> {
    let mut u = ode_field(y0);
    let (mut r, mut ut) = (u.clone(), u.clone());
    let dt = t_end / steps as f64;
    for k in 0..steps {
        rk_step(scheme, &mut u, &mut r, &mut ut, k as f64 * dt, dt, |u, t, out| {
            rhs(&u.data, t, &mut out.data);
            Ok(())
        })
        .unwrap();
    }
    u.data
}

/// Butcher tableau of a two-register scheme, derived by expanding the registers.
fn butcher(s: &RkScheme) -> (Vec<Vec<f64>>, Vec<f64>) {
    let m = s.stages();
    // alpha[i][j]: coefficient of dt*K_j in R_i
    let mut alpha = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..i {
            alpha[i][j] = s.a[i] * alpha[i - 1][j];
        }
        alpha[i][i] = 1.0;
    }
    let mut a = vec![vec![0.0; m]; m];
    for i in 1..m {
        for j in 0..i {
            a[i][j] = (j..i).map(|k| s.b[k] * alpha[k][j]).sum();
        }
    }
    let b = (0..m).map(|j| (j..m).map(|k| s.b[k] * alpha[k][j]).sum()).collect();
    (a, b)
}

#[test]
fn zero_rhs_leaves_state_unchanged() {
    for s in [RK3, RK4] {
        let y0 = [1.25, -3.5, 1e-300];
        let y = integrate(&s, &y0, 1.0, 3, &|_, _, out| out.fill(0.0));
        assert_eq!(y, y0);
    }
}

#[test]
fn butcher_form_is_consistent() {
    for s in [RK3, RK4] {
        let (a, b) = butcher(&s);
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-14, "{s}");
        for i in 0..s.stages() {
            let row: f64 = a[i].iter().sum();
            assert!((row - s.c[i]).abs() < 1e-14, "{s} stage {i}: {row} vs {}", s.c[i]);
        }
    }
}

#[test]
fn matches_dense_butcher_evaluation() {
    // y' = M y + g(t)
    let m = [[-0.3, 2.0], [-1.5, -0.1]];
    let rhs = |y: &[f64], t: f64, out: &mut [f64]| {
        out[0] = m[0][0] * y[0] + m[0][1] * y[1] + t.cos();
        out[1] = m[1][0] * y[0] + m[1][1] * y[1] + 0.5 * t * t;
    };
    for s in [RK3, RK4] {
        let (a, b) = butcher(&s);
        let (y0, t0, dt) = ([0.7, -1.2], 0.4, 0.137);
        let mut k = vec![[0.0; 2]; s.stages()];
        for i in 0..s.stages() {
            let mut y = y0;
            for j in 0..i {
                y[0] += dt * a[i][j] * k[j][0];
                y[1] += dt * a[i][j] * k[j][1];
            }
            rhs(&y, t0 + s.c[i] * dt, &mut k[i]);
        }
        let mut expect = y0;
        for i in 0..s.stages() {
            expect[0] += dt * b[i] * k[i][0];
            expect[1] += dt * b[i] * k[i][1];
        }
        let mut u = ode_field(&y0);
        let (mut r, mut ut) = (u.clone(), u.clone());
        rk_step(&s, &mut u, &mut r, &mut ut, t0, dt, |u, t, out| {
            rhs(&u.data, t, &mut out.data);
            Ok(())
        })
        .unwrap();
        for v in 0..2 {
            assert!((u.data[v] - expect[v]).abs() < 1e-14, "{s}: {} vs {}", u.data[v], expect[v]);
        }
    }
}

#[test]
fn ode_convergence_order() {
    for s in [RK3, RK4] {
        let err = |steps| (integrate(&s, &[1.0], 1.0, steps, &|y, _, out| out[0] = -y[0])[0] - (-1.0f64).exp()).abs();
        let (e1, e2) = (err(20), err(40));
        let eoc = (e1 / e2).log2();
        assert!((eoc - s.order as f64).abs() < 0.05, "{s}: {eoc}");
    }
}

#[test]
fn amplification_approximates_the_exponential() {
    for s in [RK3, RK4] {
        let z = Complex::new(-0.01, 0.02);
        let err = (s.amplification(z) - z.exp()).norm();
        let scale = z.norm().powi(s.order as i32 + 1);
        assert!(err < scale, "{s}: {err:e}");
    }
}

#[test]
fn parses_scheme_names() {
    assert_eq!("RK3".parse::<RkScheme>().unwrap(), RK3);
    assert_eq!("carpenter-kennedy".parse::<RkScheme>().unwrap(), RK4);
    assert!("rk2".parse::<RkScheme>().is_err());
}

#[test]
fn rejects_non_positive_steps() {
    let mut u = ode_field(&[1.0]);
    let (mut r, mut ut) = (u.clone(), u.clone());
    assert!(rk_step(&RK3, &mut u, &mut r, &mut ut, 0.0, 0.0, |_, _, _| Ok(())).is_err());
}

#[test]
fn stage_errors_carry_the_stage() {
    let mut u = ode_field(&[1.0]);
    let (mut r, mut ut) = (u.clone(), u.clone());
    let mut calls = 0;
    let err = rk_step(&RK4, &mut u, &mut r, &mut ut, 0.0, 0.1, |_, _, _| {
        calls += 1;
        if calls == 3 {
            Err(Error::InvalidArgument("boom".into()))
        } else {
            Ok(())
        }
    })
    .unwrap_err();
    assert!(matches!(err, Error::Stage { stage: 3, .. }), "{err}");
}

fn scalar_op(cells: usize, n: usize, velocity: [f64; 2], kappa: f64, partitions: usize) -> Operator {
    let mesh = Mesh::generate_cartesian(cells, cells, Bounds::unit(), ["a"; 4], [true; 2]).unwrap();
    let eq = EquationSystem::scalar(velocity, kappa).unwrap();
    Operator::new(eq, mesh, NodalBasis::new(n, NodeFamily::LegendreGaussLobatto).unwrap(), Settings::default(), vec![], partitions).unwrap()
}

#[test]
fn cartesian_advection_step_matches_the_formula() {
    let f = TimestepFactors { cfl: 0.7, ..Default::default() };
    for n in [1, 3, 6] {
        let op = scalar_op(5, n, [1.0, 0.0], 0.0, 1);
        let u = op.new_field();
        let est = compute_dt(&op, &u, &f).unwrap();
        let expect = 0.7 * 0.2 / (2.0 * n as f64 + 1.0);
        assert!((est.dt - expect).abs() < 1e-15, "{} vs {expect}", est.dt);
        assert_eq!(est.limit, DtLimit::Convective);
    }
}

#[test]
fn doubling_velocity_halves_the_step() {
    let f = TimestepFactors::default();
    let a = scalar_op(4, 3, [0.8, -0.3], 0.0, 1);
    let b = scalar_op(4, 3, [1.6, -0.6], 0.0, 1);
    let (da, db) = (compute_dt(&a, &a.new_field(), &f).unwrap(), compute_dt(&b, &b.new_field(), &f).unwrap());
    assert_eq!(da.dt, 2.0 * db.dt);
}

#[test]
fn viscous_bound_scales_with_h_squared() {
    let f = TimestepFactors::default();
    let coarse = scalar_op(4, 3, [0.0, 0.0], 0.5, 1);
    let fine = scalar_op(8, 3, [0.0, 0.0], 0.5, 1);
    let dc = compute_dt(&coarse, &coarse.new_field(), &f).unwrap();
    let df = compute_dt(&fine, &fine.new_field(), &f).unwrap();
    assert_eq!((dc.limit, df.limit), (DtLimit::Viscous, DtLimit::Viscous));
    assert!((dc.dt / df.dt - 4.0).abs() < 1e-12);
    let expect = 0.4 * 0.25 * 0.25 / (0.5 * 7.0);
    assert!((dc.dt - expect).abs() < 1e-15);
}

#[test]
fn subcell_bound_exceeds_dg_bound() {
    let mesh = Mesh::generate_cartesian(3, 3, Bounds::unit(), ["a"; 4], [true; 2]).unwrap();
    let eq = EquationSystem::euler(1.4).unwrap();
    let f = TimestepFactors::default();
    for n in 1..=5 {
        let mut op = Operator::new(eq, mesh.clone(), NodalBasis::new(n, NodeFamily::LegendreGaussLobatto).unwrap(), Settings::default(), vec![], 1).unwrap();
        let c = prim_to_cons(1.4, Prim::new(1.0, 0.3, 0.1, 1.0)).unwrap();
        let mut u = op.project(&|_, _, u| u.copy_from_slice(&c), 0.0);
        let (dg, _) = element_timestep(&op, &u, &f, 4).unwrap();
        op.to_fv(&mut u, 4);
        let (fv, limit) = element_timestep(&op, &u, &f, 4).unwrap();
        assert_eq!(limit, DtLimit::Subcell);
        let ratio = (2.0 * n as f64 + 1.0) / (n as f64 + 1.0);
        assert!(fv > dg);
        assert!((fv / dg - ratio).abs() < 1e-12, "N={n}: {}", fv / dg);
    }
}

#[test]
fn global_minimum() {
    assert_eq!(global_min_reduce(&[0.3]), 0.3);
    assert_eq!(global_min_reduce(&[0.3, 0.1, 0.2]), 0.1);
}

#[test]
fn partition_count_does_not_change_dt() {
    let f = TimestepFactors::default();
    let base = compute_dt(&scalar_op(6, 3, [1.0, 0.4], 0.01, 1), &scalar_op(6, 3, [1.0, 0.4], 0.01, 1).new_field(), &f).unwrap();
    for k in [2, 5, 7] {
        let op = scalar_op(6, 3, [1.0, 0.4], 0.01, k);
        let est = compute_dt(&op, &op.new_field(), &f).unwrap();
        assert_eq!(est.dt.to_bits(), base.dt.to_bits());
    }
}

#[test]
fn underflow_is_reported_with_the_element() {
    let op = scalar_op(2, 3, [1e16, 0.0], 0.0, 1);
    let err = compute_dt(&op, &op.new_field(), &TimestepFactors::default()).unwrap_err();
    assert!(matches!(err, Error::TimestepUnderflow { element: 0, .. }), "{err}");
}

#[test]
fn calibration_finds_a_stability_boundary() {
    let settings = Settings { form: VolumeForm::Weak, ..Default::default() };
    for s in [RK3, RK4] {
        let c = calibrate_gamma1(3, NodeFamily::LegendreGaussLobatto, settings, &s).unwrap();
        assert!(c.gamma1 > 0.2 && c.gamma1 < 5.0, "{s}: {c:?}");
        // stepping just past the boundary amplifies the worst mode
        assert!(c.dt_critical * c.spectral_radius > 0.5);
    }
    let c3 = calibrate_gamma1(3, NodeFamily::LegendreGaussLobatto, settings, &RK3).unwrap();
    let c4 = calibrate_gamma1(3, NodeFamily::LegendreGaussLobatto, settings, &RK4).unwrap();
    // the five-stage scheme has the larger stability region
    assert!(c4.dt_critical > c3.dt_critical);
}
