//! One-dimensional nodal polynomial machinery.
//!
//! Everything the tensor-product operators need is built here once per
//! polynomial degree: quadrature nodes and weights, Lagrange evaluation,
//! the collocation differentiation matrix `D`, the weak-form matrix
//! `Dhat`, boundary evaluation vectors, mortar interpolation/projection
//! matrices and the DG/FV subcell Vandermonde pair.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use std::fmt;
use std::str::FromStr;

/// Highest polynomial degree the nodal operators are verified for.
pub const MAX_DEGREE: usize = 15;

const NEWTON_TOL: f64 = 4.0 * f64::EPSILON;
const NEWTON_MAX_ITER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeFamily {
    LegendreGauss,
    LegendreGaussLobatto,
}

impl NodeFamily {
    /// Highest monomial degree integrated exactly by `N+1` nodes.
    pub fn exactness_degree(self, n: usize) -> usize {
        match self {
            NodeFamily::LegendreGauss => 2 * n + 1,
            NodeFamily::LegendreGaussLobatto => (2 * n).saturating_sub(1),
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeFamily::LegendreGauss => "LG",
            NodeFamily::LegendreGaussLobatto => "LGL",
        })
    }
}

impl FromStr for NodeFamily {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "LG" | "GAUSS" => Ok(NodeFamily::LegendreGauss),
            "LGL" | "GAUSS-LOBATTO" => Ok(NodeFamily::LegendreGaussLobatto),
            _ => Err(format!("unknown node family '{s}' (expected LG or LGL)")),
        }
    }
}

/// Legendre polynomial `P_n(x)` and its derivative by the three-term recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    match n {
        0 => (1.0, 0.0),
        1 => (x, 1.0),
        _ => {
            let (mut p0, mut p1) = (1.0, x);
            let (mut d0, mut d1) = (0.0, 1.0);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                let d2 = d0 + (2.0 * kf - 1.0) * p1;
                p0 = p1;
                p1 = p2;
                d0 = d1;
                d1 = d2;
            }
            (p1, d1)
        }
    }
}

/// `q = P_{n+1} - P_{n-1}`, its derivative, and `P_n`; the interior roots of `q`
/// are the interior Lobatto nodes.
fn lobatto_q(n: usize, x: f64) -> (f64, f64, f64) {
    let (pm1, dm1) = legendre(n - 1, x);
    let (pn, _) = legendre(n, x);
    let (pp1, dp1) = legendre(n + 1, x);
    (pp1 - pm1, dp1 - dm1, pn)
}

fn newton(mut x: f64, f: impl Fn(f64) -> (f64, f64)) -> f64 {
    for _ in 0..NEWTON_MAX_ITER {
        let (v, d) = f(x);
        let delta = -v / d;
        x += delta;
        if delta.abs() <= NEWTON_TOL * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Quadrature nodes and weights of the requested family on `[-1, 1]`.
///
/// Nodes are computed for the left half and mirrored, so the returned set is
/// exactly symmetric about zero.
pub fn build_nodes(n: usize, family: NodeFamily) -> Result<(Vec<f64>, Vec<f64>)> {
    if n > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!("degree {n} exceeds maximum {MAX_DEGREE}")));
    }
    let np = n + 1;
    let mut x = vec![0.0; np];
    let mut w = vec![0.0; np];
    match family {
        NodeFamily::LegendreGauss => {
            for k in 0..np.div_ceil(2) {
                let guess = -((2 * k + 1) as f64 * std::f64::consts::PI / (2 * np) as f64).cos();
                let xk = if np % 2 == 1 && k == n / 2 {
                    0.0
                } else {
                    newton(guess, |t| legendre(np, t))
                };
                let (_, d) = legendre(np, xk);
                let wk = 2.0 / ((1.0 - xk * xk) * d * d);
                x[k] = xk;
                x[n - k] = -xk;
                w[k] = wk;
                w[n - k] = wk;
            }
        }
        NodeFamily::LegendreGaussLobatto => {
            if n == 0 {
                return Err(Error::InvalidArgument("LGL nodes require N >= 1".into()));
            }
            let nf = n as f64;
            let end_w = 2.0 / (nf * (nf + 1.0));
            x[0] = -1.0;
            x[n] = 1.0;
            w[0] = end_w;
            w[n] = end_w;
            for k in 1..np.div_ceil(2) {
                let guess = -(k as f64 * std::f64::consts::PI / nf).cos();
                let xk = if n % 2 == 0 && k == n / 2 {
                    0.0
                } else {
                    newton(guess, |t| {
                        let (q, dq, _) = lobatto_q(n, t);
                        (q, dq)
                    })
                };
                let (pn, _) = legendre(n, xk);
                let wk = 2.0 / (nf * (nf + 1.0) * pn * pn);
                x[k] = xk;
                x[n - k] = -xk;
                w[k] = wk;
                w[n - k] = wk;
            }
        }
    }
    Ok((x, w))
}

/// Barycentric weights `1 / prod_{k != j} (x_j - x_k)`.
pub fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    let mut w = vec![1.0; nodes.len()];
    for j in 0..nodes.len() {
        for k in 0..nodes.len() {
            if k != j {
                let d = nodes[j] - nodes[k];
                if d == 0.0 {
                    return Err(Error::InvalidArgument(format!("duplicate node {}", nodes[j])));
                }
                w[j] /= d;
            }
        }
    }
    Ok(w)
}

/// All Lagrange basis values `l_j(x)` at one point (barycentric form).
pub fn lagrange_all(nodes: &[f64], bary: &[f64], x: f64) -> Vec<f64> {
    if let Some(k) = nodes.iter().position(|&xi| xi == x) {
        let mut out = vec![0.0; nodes.len()];
        out[k] = 1.0;
        return out;
    }
    let terms: Vec<f64> = nodes.iter().zip(bary).map(|(xi, wi)| wi / (x - xi)).collect();
    let denom: f64 = terms.iter().sum();
    terms.iter().map(|t| t / denom).collect()
}

/// `l_j(x)` for the Lagrange basis on `nodes`.
pub fn lagrange_eval(nodes: &[f64], j: usize, x: f64) -> Result<f64> {
    if j >= nodes.len() {
        return Err(Error::InvalidArgument(format!("basis index {j} out of range")));
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument("evaluation point must be finite".into()));
    }
    let bary = barycentric_weights(nodes)?;
    Ok(lagrange_all(nodes, &bary, x)[j])
}

/// Collocation differentiation matrix `D_rs = l_s'(x_r)`.
pub fn build_diff_matrix(nodes: &[f64]) -> Result<Matrix> {
    let bary = barycentric_weights(nodes)?;
    let n = nodes.len();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (bary[j] / bary[i]) / (nodes[i] - nodes[j]);
                d.set(i, j, v);
                diag -= v;
            }
        }
        d.set(i, i, diag);
    }
    Ok(d)
}

/// Weak-form matrix `Dhat_ij = -(w_j / w_i) D_ji`.
pub fn build_dhat(weights: &[f64], d: &Matrix) -> Matrix {
    let n = weights.len();
    Matrix::from_fn(n, n, |i, j| -(weights[j] / weights[i]) * d.get(j, i))
}

/// Row `p` holds `l_j(to_points[p])`.
pub fn build_interpolation_matrix(from_nodes: &[f64], to_points: &[f64]) -> Result<Matrix> {
    let bary = barycentric_weights(from_nodes)?;
    let rows: Vec<Vec<f64>> = to_points.iter().map(|&x| lagrange_all(from_nodes, &bary, x)).collect();
    Ok(Matrix::from_rows(&rows))
}

/// Interpolation from a big face to its lower/upper halves and the L2
/// projection back.
#[derive(Debug, Clone)]
pub struct MortarMatrices {
    pub il: Matrix,
    pub iu: Matrix,
    pub pl: Matrix,
    pub pu: Matrix,
}

/// Mean-value transfer between nodal DG data and equidistant FV subcells.
#[derive(Debug, Clone)]
pub struct FvVandermonde {
    pub dg_to_fv: Matrix,
    pub fv_to_dg: Matrix,
    /// Subcell width in reference space, `2/(N+1)`.
    pub width: f64,
}

#[derive(Debug, Clone)]
pub struct NodalBasis {
    pub degree: usize,
    pub family: NodeFamily,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub bary: Vec<f64>,
    pub d: Matrix,
    pub dhat: Matrix,
    pub ell_minus: Vec<f64>,
    pub ell_plus: Vec<f64>,
    pub ell_hat_minus: Vec<f64>,
    pub ell_hat_plus: Vec<f64>,
}

impl NodalBasis {
    pub fn new(degree: usize, family: NodeFamily) -> Result<Self> {
        let (nodes, weights) = build_nodes(degree, family)?;
        let bary = barycentric_weights(&nodes)?;
        let d = build_diff_matrix(&nodes)?;
        let dhat = build_dhat(&weights, &d);
        let ell_minus = lagrange_all(&nodes, &bary, -1.0);
        let ell_plus = lagrange_all(&nodes, &bary, 1.0);
        let ell_hat_minus = ell_minus.iter().zip(&weights).map(|(l, w)| l / w).collect();
        let ell_hat_plus = ell_plus.iter().zip(&weights).map(|(l, w)| l / w).collect();
        Ok(Self { degree, family, nodes, weights, bary, d, dhat, ell_minus, ell_plus, ell_hat_minus, ell_hat_plus })
    }

    /// Number of nodes per direction, `N+1`.
    #[inline]
    pub fn np(&self) -> usize {
        self.degree + 1
    }

    pub fn is_lobatto(&self) -> bool {
        self.family == NodeFamily::LegendreGaussLobatto
    }

    pub fn lagrange(&self, x: f64) -> Vec<f64> {
        lagrange_all(&self.nodes, &self.bary, x)
    }

    pub fn interpolation_to(&self, points: &[f64]) -> Matrix {
        let rows: Vec<Vec<f64>> = points.iter().map(|&x| self.lagrange(x)).collect();
        Matrix::from_rows(&rows)
    }

    pub fn mortar_matrices(&self) -> Result<MortarMatrices> {
        build_mortar_matrices(self)
    }

    pub fn fv_vandermonde(&self) -> Result<FvVandermonde> {
        build_fv_vandermonde(self)
    }
}

/// Interpolation to the two halves and the exact L2 projection back.
///
/// The projection integrates with `N+1` Gauss points, which is exact for the
/// degree-`2N` integrands; for Gauss nodes this reduces to
/// `P^L_ia = 1/2 l_i((eta_a - 1)/2) w_a / w_i`.
pub fn build_mortar_matrices(basis: &NodalBasis) -> Result<MortarMatrices> {
    let np = basis.np();
    let lower: Vec<f64> = basis.nodes.iter().map(|e| 0.5 * (e - 1.0)).collect();
    let upper: Vec<f64> = basis.nodes.iter().map(|e| 0.5 * (e + 1.0)).collect();
    let il = basis.interpolation_to(&lower);
    let iu = basis.interpolation_to(&upper);

    let (gx, gw) = build_nodes(basis.degree, NodeFamily::LegendreGauss)?;
    let at_gauss: Vec<Vec<f64>> = gx.iter().map(|&s| basis.lagrange(s)).collect();
    let mass = Matrix::from_fn(np, np, |i, k| (0..np).map(|q| gw[q] * at_gauss[q][i] * at_gauss[q][k]).sum());
    let half = |shift: f64| {
        let mapped: Vec<Vec<f64>> = gx.iter().map(|&s| basis.lagrange(0.5 * (s + shift))).collect();
        Matrix::from_fn(np, np, |i, a| 0.5 * (0..np).map(|q| gw[q] * mapped[q][i] * at_gauss[q][a]).sum::<f64>())
    };
    let minv = mass.inverse()?;
    let pl = minv.matmul(&half(-1.0));
    let pu = minv.matmul(&half(1.0));
    Ok(MortarMatrices { il, iu, pl, pu })
}

/// Subcell mean operator `V_ki = 1/2 sum_l w_l l_i(xi^k_l)` and its inverse.
pub fn build_fv_vandermonde(basis: &NodalBasis) -> Result<FvVandermonde> {
    let np = basis.np();
    let width = 2.0 / np as f64;
    let (gx, gw) = build_nodes(basis.degree, NodeFamily::LegendreGauss)?;
    let mut v = Matrix::zeros(np, np);
    for k in 0..np {
        let left = -1.0 + k as f64 * width;
        for (s, ws) in gx.iter().zip(&gw) {
            let x = left + 0.5 * width * (s + 1.0);
            for (i, l) in basis.lagrange(x).into_iter().enumerate() {
                v.set(k, i, v.get(k, i) + 0.5 * ws * l);
            }
        }
    }
    let inv = v.inverse().map_err(|e| Error::SingularMatrix(format!("DG->FV Vandermonde: {e}")))?;
    log::debug!("FV Vandermonde N={} {}: condition number {:.3e}", basis.degree, basis.family, v.condition_number());
    Ok(FvVandermonde { dg_to_fv: v, fv_to_dg: inv, width })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const FAMILIES: [NodeFamily; 2] = [NodeFamily::LegendreGauss, NodeFamily::LegendreGaussLobatto];

    fn min_degree(f: NodeFamily) -> usize {
        if f == NodeFamily::LegendreGaussLobatto {
            1
        } else {
            0
        }
    }

    #[test]
    fn trivial_node_sets() {
        let (x, w) = build_nodes(0, NodeFamily::LegendreGauss).unwrap();
        assert_eq!((x, w), (vec![0.0], vec![2.0]));
        let (x, w) = build_nodes(1, NodeFamily::LegendreGaussLobatto).unwrap();
        assert_eq!((x, w), (vec![-1.0, 1.0], vec![1.0, 1.0]));
        let (x, w) = build_nodes(1, NodeFamily::LegendreGauss).unwrap();
        assert_abs_diff_eq!(x[0], -0.5773502691896258, epsilon = 2e-16);
        assert_abs_diff_eq!(x[1], 0.5773502691896258, epsilon = 2e-16);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_degrees() {
        assert!(build_nodes(0, NodeFamily::LegendreGaussLobatto).is_err());
        assert!(build_nodes(MAX_DEGREE + 1, NodeFamily::LegendreGauss).is_err());
    }

    #[test]
    fn quadrature_exactness_and_node_invariants() {
        for fam in FAMILIES {
            for n in min_degree(fam)..=10 {
                let (x, w) = build_nodes(n, fam).unwrap();
                assert!(x.windows(2).all(|p| p[0] < p[1]));
                for i in 0..=n {
                    assert_eq!(x[i], -x[n - i]);
                    assert!(w[i] > 0.0);
                }
                assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
                if fam == NodeFamily::LegendreGaussLobatto {
                    assert_eq!((x[0], x[n]), (-1.0, 1.0));
                }
                for k in 0..=fam.exactness_degree(n) {
                    let quad: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                    let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                    assert_abs_diff_eq!(quad, exact, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn deterministic_bitwise() {
        for fam in FAMILIES {
            let a = NodalBasis::new(7, fam).unwrap();
            let b = NodalBasis::new(7, fam).unwrap();
            assert_eq!(a.nodes, b.nodes);
            assert_eq!(a.d, b.d);
            assert_eq!(a.dhat, b.dhat);
            assert_eq!(a.mortar_matrices().unwrap().pl, b.mortar_matrices().unwrap().pl);
            assert_eq!(a.fv_vandermonde().unwrap().fv_to_dg, b.fv_vandermonde().unwrap().fv_to_dg);
        }
    }

    #[test]
    fn lagrange_cardinal_and_partition_of_unity() {
        let b = NodalBasis::new(6, NodeFamily::LegendreGauss).unwrap();
        for i in 0..b.np() {
            for j in 0..b.np() {
                let v = lagrange_eval(&b.nodes, j, b.nodes[i]).unwrap();
                assert_eq!(v, if i == j { 1.0 } else { 0.0 });
            }
        }
        for x in [-1.0, -0.77, 0.013, 0.5, 1.0] {
            assert_abs_diff_eq!(b.lagrange(x).iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
        let l = NodalBasis::new(1, NodeFamily::LegendreGaussLobatto).unwrap();
        assert_abs_diff_eq!(lagrange_eval(&l.nodes, 0, 0.0).unwrap(), 0.5, epsilon = 1e-16);
        assert!(lagrange_eval(&l.nodes, 2, 0.0).is_err());
    }

    #[test]
    fn diff_matrix_examples() {
        let l = NodalBasis::new(1, NodeFamily::LegendreGaussLobatto).unwrap();
        let expect = Matrix::from_rows(&[vec![-0.5, 0.5], vec![-0.5, 0.5]]);
        assert!(l.d.max_abs_diff(&expect) < 1e-15);
        // -(w_j/w_i) D_ji with unit weights
        let expect_hat = Matrix::from_rows(&[vec![0.5, 0.5], vec![-0.5, -0.5]]);
        assert!(l.dhat.max_abs_diff(&expect_hat) < 1e-15);

        let g = NodalBasis::new(4, NodeFamily::LegendreGauss).unwrap();
        let f: Vec<f64> = g.nodes.iter().map(|x| x.powi(4)).collect();
        let df = g.d.apply(&f);
        for (x, v) in g.nodes.iter().zip(df) {
            assert_abs_diff_eq!(v, 4.0 * x.powi(3), epsilon = 1e-12);
        }
        assert!(build_diff_matrix(&[0.0, 0.0, 1.0]).is_err());

        let g0 = NodalBasis::new(0, NodeFamily::LegendreGauss).unwrap();
        assert_eq!(g0.dhat.get(0, 0), 0.0);
    }

    #[test]
    fn diff_matrix_exact_for_polynomials_and_rows_sum_to_zero() {
        for fam in FAMILIES {
            for n in min_degree(fam)..=MAX_DEGREE {
                let b = NodalBasis::new(n, fam).unwrap();
                for i in 0..b.np() {
                    assert!(b.d.row(i).iter().sum::<f64>().abs() < 1e-11);
                }
                if n <= 10 {
                    let f: Vec<f64> = b.nodes.iter().map(|x| x.powi(n as i32)).collect();
                    for (x, v) in b.nodes.iter().zip(b.d.apply(&f)) {
                        let exact = if n == 0 { 0.0 } else { n as f64 * x.powi(n as i32 - 1) };
                        assert_abs_diff_eq!(v, exact, epsilon = 1e-12 * (n as f64).max(1.0).powi(2));
                    }
                }
            }
        }
    }

    #[test]
    fn summation_by_parts_identity() {
        for fam in FAMILIES {
            for n in min_degree(fam)..=MAX_DEGREE {
                let b = NodalBasis::new(n, fam).unwrap();
                for i in 0..b.np() {
                    for j in 0..b.np() {
                        let r = b.weights[i] * b.dhat.get(i, j) + b.weights[j] * b.d.get(j, i);
                        assert!(r.abs() < 1e-13, "N={n} {fam} ({i},{j}) residual {r:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn interpolation_matrix_examples() {
        let b = NodalBasis::new(3, NodeFamily::LegendreGauss).unwrap();
        let id = build_interpolation_matrix(&b.nodes, &b.nodes).unwrap();
        assert!(id.max_abs_diff(&Matrix::identity(4)) == 0.0);
        let pts = [-1.0, -0.3, 0.9, 1.0];
        let m = build_interpolation_matrix(&b.nodes, &pts).unwrap();
        for v in m.apply(&[2.5; 4]) {
            assert_abs_diff_eq!(v, 2.5, epsilon = 1e-14);
        }
        let cube: Vec<f64> = b.nodes.iter().map(|x| x.powi(3)).collect();
        let ends = build_interpolation_matrix(&b.nodes, &[-1.0, 1.0]).unwrap().apply(&cube);
        assert_abs_diff_eq!(ends[0], -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ends[1], 1.0, epsilon = 1e-13);
        assert!(build_interpolation_matrix(&[1.0, 1.0], &[0.0]).is_err());
    }

    #[test]
    fn mortar_round_trip_and_consistency() {
        for fam in FAMILIES {
            for n in 1..=8 {
                let b = NodalBasis::new(n, fam).unwrap();
                let m = b.mortar_matrices().unwrap();
                let round = m.pl.matmul(&m.il).add(&m.pu.matmul(&m.iu));
                assert!(round.max_abs_diff(&Matrix::identity(n + 1)) < 1e-12, "{fam} N={n}");
                for v in m.il.apply(&vec![3.0; n + 1]).into_iter().chain(m.iu.apply(&vec![3.0; n + 1])) {
                    assert_abs_diff_eq!(v, 3.0, epsilon = 1e-14);
                }
            }
        }
        let b = NodalBasis::new(2, NodeFamily::LegendreGauss).unwrap();
        let m = b.mortar_matrices().unwrap();
        for (v, e) in m.il.apply(&b.nodes).iter().zip(&b.nodes) {
            assert_abs_diff_eq!(*v, 0.5 * (e - 1.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn gauss_projection_matches_closed_form() {
        let b = NodalBasis::new(5, NodeFamily::LegendreGauss).unwrap();
        let m = b.mortar_matrices().unwrap();
        for i in 0..6 {
            for a in 0..6 {
                let x = 0.5 * (b.nodes[a] - 1.0);
                let closed = 0.5 * b.lagrange(x)[i] * b.weights[a] / b.weights[i];
                assert_abs_diff_eq!(m.pl.get(i, a), closed, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn fv_vandermonde_examples() {
        let g0 = NodalBasis::new(0, NodeFamily::LegendreGauss).unwrap();
        let v0 = g0.fv_vandermonde().unwrap();
        assert_abs_diff_eq!(v0.dg_to_fv.get(0, 0), 1.0, epsilon = 1e-15);

        // N=3 LG, samples of xi^2: subcell means by an independent 20-point midpoint-free oracle
        let b = NodalBasis::new(3, NodeFamily::LegendreGauss).unwrap();
        let v = b.fv_vandermonde().unwrap();
        let u: Vec<f64> = b.nodes.iter().map(|x| x * x).collect();
        let means = v.dg_to_fv.apply(&u);
        let (qx, qw) = build_nodes(9, NodeFamily::LegendreGauss).unwrap();
        for k in 0..4 {
            let a = -1.0 + k as f64 * v.width;
            let integral: f64 =
                qx.iter().zip(&qw).map(|(s, w)| 0.5 * v.width * w * (a + 0.5 * v.width * (s + 1.0)).powi(2)).sum();
            assert_abs_diff_eq!(means[k], integral / v.width, epsilon = 1e-13);
        }
    }

    #[test]
    fn fv_vandermonde_invariants() {
        for fam in FAMILIES {
            for n in min_degree(fam)..=MAX_DEGREE {
                let b = NodalBasis::new(n, fam).unwrap();
                let v = b.fv_vandermonde().unwrap();
                assert!(v.fv_to_dg.matmul(&v.dg_to_fv).max_abs_diff(&Matrix::identity(n + 1)) < 1e-12);
                for i in 0..=n {
                    assert_abs_diff_eq!(v.dg_to_fv.row(i).iter().sum::<f64>(), 1.0, epsilon = 1e-14);
                }
                let u: Vec<f64> = (0..=n).map(|i| ((i * 7 + 3) % 5) as f64 - 1.3).collect();
                let fv = v.dg_to_fv.apply(&u);
                let lhs: f64 = fv.iter().map(|m| v.width * m).sum();
                let rhs: f64 = u.iter().zip(&b.weights).map(|(a, w)| a * w).sum();
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-13);
            }
        }
    }
}
