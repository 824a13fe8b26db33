//! 2:1 non-conforming interfaces: big-side traces are interpolated to the
//! two half-sides, fluxes computed there are projected back.
//!
//! Traces are `np` nodes of `width` interleaved values in the parent's
//! orientation. Child fluxes carry the child `s-hat`, which is half the
//! parent's, so they are doubled before the L2 projection.

use crate::basis::MortarMatrices;

/// Lower and upper child traces of a parent trace.
pub fn mortar_interpolate(m: &MortarMatrices, width: usize, parent: &[f64], lower: &mut [f64], upper: &mut [f64]) {
    let np = m.il.rows();
    for p in 0..np {
        for v in 0..width {
            let (mut a, mut b) = (0.0, 0.0);
            for q in 0..np {
                a += m.il.get(p, q) * parent[q * width + v];
                b += m.iu.get(p, q) * parent[q * width + v];
            }
            lower[p * width + v] = a;
            upper[p * width + v] = b;
        }
    }
}

/// Parent flux from the two child fluxes.
pub fn mortar_project(m: &MortarMatrices, width: usize, lower: &[f64], upper: &[f64], parent: &mut [f64]) {
    let np = m.pl.rows();
    for p in 0..np {
        for v in 0..width {
            let mut s = 0.0;
            for q in 0..np {
                s += m.pl.get(p, q) * lower[q * width + v] + m.pu.get(p, q) * upper[q * width + v];
            }
            parent[p * width + v] = 2.0 * s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{NodalBasis, NodeFamily};

    fn poly(x: f64) -> f64 {
        0.3 - 1.2 * x + 0.7 * x * x - 0.4 * x.powi(3) + 0.1 * x.powi(4)
    }

    #[test]
    fn constant_and_linear_traces() {
        let b = NodalBasis::new(4, NodeFamily::LegendreGauss).unwrap();
        let m = b.mortar_matrices().unwrap();
        let np = b.np();
        let (mut lo, mut up) = (vec![0.0; np], vec![0.0; np]);
        mortar_interpolate(&m, 1, &vec![2.5; np], &mut lo, &mut up);
        assert!(lo.iter().chain(&up).all(|v| (v - 2.5).abs() < 1e-13));
        mortar_interpolate(&m, 1, &b.nodes, &mut lo, &mut up);
        for p in 0..np {
            assert!((lo[p] - (b.nodes[p] - 1.0) / 2.0).abs() < 1e-13);
            assert!((up[p] - (b.nodes[p] + 1.0) / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn polynomial_round_trip() {
        for family in [NodeFamily::LegendreGauss, NodeFamily::LegendreGaussLobatto] {
            let b = NodalBasis::new(4, family).unwrap();
            let m = b.mortar_matrices().unwrap();
            let np = b.np();
            let parent: Vec<f64> = b.nodes.iter().map(|&x| poly(x)).collect();
            let (mut lo, mut up) = (vec![0.0; np], vec![0.0; np]);
            mortar_interpolate(&m, 1, &parent, &mut lo, &mut up);
            for p in 0..np {
                assert!((lo[p] - poly((b.nodes[p] - 1.0) / 2.0)).abs() < 1e-12);
                assert!((up[p] - poly((b.nodes[p] + 1.0) / 2.0)).abs() < 1e-12);
            }
            // children carry half the surface element
            let half: Vec<f64> = lo.iter().map(|v| 0.5 * v).collect();
            let halfu: Vec<f64> = up.iter().map(|v| 0.5 * v).collect();
            let mut back = vec![0.0; np];
            mortar_project(&m, 1, &half, &halfu, &mut back);
            for p in 0..np {
                assert!((back[p] - parent[p]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_is_conservative() {
        let b = NodalBasis::new(5, NodeFamily::LegendreGauss).unwrap();
        let m = b.mortar_matrices().unwrap();
        let np = b.np();
        let lo: Vec<f64> = (0..np).map(|p| (p as f64 * 1.3).sin()).collect();
        let up: Vec<f64> = (0..np).map(|p| (p as f64 * 0.7).cos()).collect();
        let mut parent = vec![0.0; np];
        mortar_project(&m, 1, &lo, &up, &mut parent);
        let w = |f: &[f64]| f.iter().zip(&b.weights).map(|(a, w)| a * w).sum::<f64>();
        assert!((w(&parent) - (w(&lo) + w(&up))).abs() < 1e-13);
    }
}
