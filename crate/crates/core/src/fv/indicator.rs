//! Troubled-cell indicators.

use crate::basis::{legendre, NodalBasis};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use std::fmt;
use std::str::FromStr;

/// Value returned by the modal indicator for fields without energy.
pub const PERSSON_FLOOR: f64 = -20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndicatorKind {
    /// Modal decay of density.
    PerssonModal,
    /// Pressure second differences.
    JamesonPressure,
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndicatorKind::PerssonModal => "persson",
            IndicatorKind::JamesonPressure => "jameson",
        })
    }
}

impl FromStr for IndicatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "persson" | "modal" => Ok(IndicatorKind::PerssonModal),
            "jameson" | "pressure" => Ok(IndicatorKind::JamesonPressure),
            other => Err(Error::InvalidArgument(format!("unknown indicator '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndicatorConfig {
    pub kind: IndicatorKind,
    pub upper: f64,
    pub lower: f64,
}

impl IndicatorConfig {
    pub fn new(kind: IndicatorKind, upper: f64, lower: f64) -> Result<Self> {
        if !(upper > lower) {
            return Err(Error::InvalidArgument(format!("indicator thresholds need upper > lower, got {upper} <= {lower}")));
        }
        Ok(Self { kind, upper, lower })
    }

    pub fn with_defaults(kind: IndicatorKind) -> Self {
        match kind {
            IndicatorKind::PerssonModal => Self { kind, upper: -3.0, lower: -4.5 },
            IndicatorKind::JamesonPressure => Self { kind, upper: 0.12, lower: 0.02 },
        }
    }
}

/// Nodal-to-modal matrix for orthonormal Legendre polynomials.
pub fn modal_matrix(basis: &NodalBasis) -> Result<Matrix> {
    let np = basis.np();
    let v = Matrix::from_fn(np, np, |i, k| legendre(k, basis.nodes[i]).0 * ((2 * k + 1) as f64 / 2.0).sqrt());
    v.inverse()
}

/// `log10` of the energy share in modes of total degree `>= N-1`.
///
/// `values` are `np^2` nodal values, `modal` from [`modal_matrix`].
pub fn indicator_persson(modal: &Matrix, values: &[f64], tmp: &mut [f64], coef: &mut [f64]) -> f64 {
    let np = modal.rows();
    let n = np - 1;
    crate::fv::tensor_apply(modal, 1, np, values, tmp, coef);
    let (mut total, mut top) = (0.0, 0.0);
    for b in 0..np {
        for a in 0..np {
            let e = coef[b * np + a] * coef[b * np + a];
            total += e;
            if a + b + 1 >= n {
                top += e;
            }
        }
    }
    if !(total > 0.0) || !(top > 0.0) {
        return PERSSON_FLOOR;
    }
    (top / total).log10().max(PERSSON_FLOOR)
}

/// Largest normalized pressure second difference over both index
/// directions. `ghost[f]` holds the neighbor's pressure next to face `f`
/// (local face order); without it the boundary node is skipped.
pub fn indicator_jameson(np: usize, p: &[f64], ghost: [Option<&[f64]>; 4]) -> f64 {
    let quot = |a: f64, b: f64, c: f64| (a - 2.0 * b + c).abs() / (a + 2.0 * b + c);
    let mut worst: f64 = 0.0;
    for j in 0..np {
        for i in 0..np {
            let b = p[j * np + i];
            let left = if i > 0 { Some(p[j * np + i - 1]) } else { ghost[0].map(|g| g[j]) };
            let right = if i + 1 < np { Some(p[j * np + i + 1]) } else { ghost[1].map(|g| g[j]) };
            if let (Some(a), Some(c)) = (left, right) {
                worst = worst.max(quot(a, b, c));
            }
            let down = if j > 0 { Some(p[(j - 1) * np + i]) } else { ghost[2].map(|g| g[i]) };
            let up = if j + 1 < np { Some(p[(j + 1) * np + i]) } else { ghost[3].map(|g| g[i]) };
            if let (Some(a), Some(c)) = (down, up) {
                worst = worst.max(quot(a, b, c));
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::NodeFamily;

    #[test]
    fn persson_limits() {
        let b = NodalBasis::new(5, NodeFamily::LegendreGauss).unwrap();
        let m = modal_matrix(&b).unwrap();
        let np = b.np();
        let (mut t, mut c) = (vec![0.0; np * np], vec![0.0; np * np]);
        assert_eq!(indicator_persson(&m, &vec![1.7; np * np], &mut t, &mut c), PERSSON_FLOOR);
        assert_eq!(indicator_persson(&m, &vec![0.0; np * np], &mut t, &mut c), PERSSON_FLOOR);
        let top: Vec<f64> = (0..np * np).map(|k| legendre(5, b.nodes[k % np]).0).collect();
        assert!(indicator_persson(&m, &top, &mut t, &mut c).abs() < 1e-12);
    }

    #[test]
    fn persson_smooth_field_is_quiet() {
        let b = NodalBasis::new(7, NodeFamily::LegendreGaussLobatto).unwrap();
        let m = modal_matrix(&b).unwrap();
        let np = b.np();
        let (mut t, mut c) = (vec![0.0; np * np], vec![0.0; np * np]);
        // element [0, 0.25]: sin(pi x) with x = 0.125 (xi + 1)
        let f: Vec<f64> = (0..np * np).map(|k| (std::f64::consts::PI * 0.125 * (b.nodes[k % np] + 1.0)).sin()).collect();
        assert!(indicator_persson(&m, &f, &mut t, &mut c) < -4.0);
    }

    #[test]
    fn jameson_cases() {
        let np = 4;
        assert_eq!(indicator_jameson(np, &vec![2.0; 16], [None; 4]), 0.0);
        let lin: Vec<f64> = (0..16).map(|k| 1.0 + (k % 4) as f64).collect();
        assert!(indicator_jameson(np, &lin, [None; 4]) < 1e-15);
        let jump: Vec<f64> = (0..16).map(|k| if k % 4 < 2 { 1.0 } else { 10.0 }).collect();
        let v = indicator_jameson(np, &jump, [None; 4]);
        assert!((v - 9.0 / 13.0).abs() < 1e-15 && v > 0.4 && v < 1.0);
        // a neighbor with a different pressure lights up the boundary node
        let g = vec![5.0; 4];
        assert!(indicator_jameson(np, &vec![1.0; 16], [Some(&g), None, None, None]) > 0.4);
    }
}
