//! Nodal storage shared by DG polynomials and FV subcell means.

use std::fmt;

/// Per-element representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Dg,
    Fv,
}

impl ElementKind {
    pub fn to_byte(self) -> u8 {
        match self {
            ElementKind::Dg => 0,
            ElementKind::Fv => 1,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(ElementKind::Dg),
            1 => Some(ElementKind::Fv),
            _ => None,
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::Dg => "DG",
            ElementKind::Fv => "FV",
        })
    }
}

/// `nvar` values at `np x np` nodes per element, laid out as
/// `((e np + j) np + i) nvar + v`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementField {
    pub nvar: usize,
    pub np: usize,
    pub n_elems: usize,
    pub data: Vec<f64>,
}

impl ElementField {
    pub fn zeros(nvar: usize, np: usize, n_elems: usize) -> Self {
        Self { nvar, np, n_elems, data: vec![0.0; nvar * np * np * n_elems] }
    }

    pub fn same_shape(&self) -> Self {
        Self::zeros(self.nvar, self.np, self.n_elems)
    }

    #[inline]
    pub fn elem_len(&self) -> usize {
        self.nvar * self.np * self.np
    }

    #[inline]
    pub fn offset(&self, e: usize, i: usize, j: usize) -> usize {
        ((e * self.np + j) * self.np + i) * self.nvar
    }

    #[inline]
    pub fn node(&self, e: usize, i: usize, j: usize) -> &[f64] {
        let o = self.offset(e, i, j);
        &self.data[o..o + self.nvar]
    }

    #[inline]
    pub fn node_mut(&mut self, e: usize, i: usize, j: usize) -> &mut [f64] {
        let o = self.offset(e, i, j);
        &mut self.data[o..o + self.nvar]
    }

    #[inline]
    pub fn elem(&self, e: usize) -> &[f64] {
        let n = self.elem_len();
        &self.data[e * n..(e + 1) * n]
    }

    #[inline]
    pub fn elem_mut(&mut self, e: usize) -> &mut [f64] {
        let n = self.elem_len();
        &mut self.data[e * n..(e + 1) * n]
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
    }
}
