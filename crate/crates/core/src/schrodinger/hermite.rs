//! Hermite functions normalized for the `exp(pi i ...)` conventions:
//! `h_0(t) = 2^{1/4} exp(-pi t^2)`, orthonormal in `L^2(R)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::quadrature::composite_gauss_legendre;
use crate::error::{Error, Result};

/// Largest tolerated `|h_k(+-T)|` for the tail rule.
pub const TAIL_BOUND: f64 = 1e-14;

const DEFAULT_ORDER: usize = 16;
const PANEL_WIDTH: f64 = 0.2;

/// Writes `h_0(t), ..., h_{n-1}(t)` into `out` using the three-term
/// recurrence on the functions themselves (no polynomial blow-up).
pub fn hermite_all(t: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    let u = (2.0 * PI).sqrt() * t;
    out[0] = 2f64.powf(0.25) * (-PI * t * t).exp();
    if n == 1 {
        return;
    }
    out[1] = std::f64::consts::SQRT_2 * u * out[0];
    for k in 1..n - 1 {
        let kf = k as f64;
        out[k + 1] = (2.0 / (kf + 1.0)).sqrt() * u * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
    }
}

/// Smallest half-width on a 1/4 grid beyond which every `h_k`, `k < dim`,
/// stays below `bound`.
pub fn tail_half_width(dim: usize, bound: f64) -> f64 {
    let mut buf = vec![0.0; dim.max(1)];
    let mut t: f64 = 0.5;
    loop {
        hermite_all(t, &mut buf);
        if buf.iter().all(|h| h.abs() < bound) {
            // |h_k| is monotone past the turning point; guard one more step.
            hermite_all(t + 0.25, &mut buf);
            if buf.iter().all(|h| h.abs() < bound) {
                return t;
            }
        }
        t += 0.25;
    }
}

/// Truncation and quadrature parameters realizing `L^2(R)` on `span(h_0..h_{D-1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteBasisSpec {
    pub dim: usize,
    pub half_width: f64,
    pub order: usize,
    pub panels: usize,
}

impl HermiteBasisSpec {
    /// Picks `T` from the tail rule and panels of width at most 0.2.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("Hermite dimension must be >= 1".into()));
        }
        let half_width = tail_half_width(dim, TAIL_BOUND);
        let panels = (2.0 * half_width / PANEL_WIDTH).ceil() as usize;
        Ok(Self {
            dim,
            half_width,
            order: DEFAULT_ORDER,
            panels,
        })
    }

    /// Same truncation with twice the quadrature resolution.
    pub fn refined(&self) -> Self {
        Self {
            panels: self.panels * 2,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.order == 0 || self.panels == 0 {
            return Err(Error::InvalidArgument("Hermite spec fields must be positive".into()));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidArgument("half-width must be positive".into()));
        }
        Ok(())
    }
}

/// Quadrature nodes plus the tabulated basis `h_k(t_i)`.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    spec: HermiteBasisSpec,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `dim x nodes`
    table: DMatrix<f64>,
}

impl HermiteBasis {
    pub fn new(spec: HermiteBasisSpec) -> Result<Self> {
        spec.validate()?;
        let (nodes, weights) = composite_gauss_legendre(spec.half_width, spec.panels, spec.order);
        let table = Self::tabulate(spec.dim, &nodes, 0.0);
        Ok(Self {
            spec,
            nodes,
            weights,
            table,
        })
    }

    pub fn with_dim(dim: usize) -> Result<Self> {
        Self::new(HermiteBasisSpec::new(dim)?)
    }

    fn tabulate(dim: usize, nodes: &[f64], shift: f64) -> DMatrix<f64> {
        let mut table = DMatrix::zeros(dim, nodes.len());
        let mut buf = vec![0.0; dim];
        for (i, t) in nodes.iter().enumerate() {
            hermite_all(t + shift, &mut buf);
            table.column_mut(i).copy_from_slice(&buf);
        }
        table
    }

    pub fn spec(&self) -> &HermiteBasisSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `h_k(t_i)` for all `k < dim`, one column per node.
    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    /// `h_k(t_i + shift)`.
    pub fn shifted_table(&self, shift: f64) -> DMatrix<f64> {
        if shift == 0.0 {
            return self.table.clone();
        }
        Self::tabulate(self.spec.dim, &self.nodes, shift)
    }

    pub fn eval(&self, k: usize, t: f64) -> Result<f64> {
        hermite_eval(k, t, &self.spec)
    }
}

/// `h_k(t)`, rejecting `k >= D`.
pub fn hermite_eval(k: usize, t: f64, spec: &HermiteBasisSpec) -> Result<f64> {
    if k >= spec.dim {
        return Err(Error::HermiteIndex { k, dim: spec.dim });
    }
    let mut buf = vec![0.0; k + 1];
    hermite_all(t, &mut buf);
    Ok(buf[k])
}

/// `sum_k c_k h_k(t)`.
pub fn eval_series(coeffs: &[num_complex::Complex64], t: f64, scratch: &mut Vec<f64>) -> num_complex::Complex64 {
    scratch.resize(coeffs.len(), 0.0);
    hermite_all(t, scratch);
    coeffs
        .iter()
        .zip(scratch.iter())
        .map(|(c, h)| c * h)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::quadrature::composite_gauss_legendre;

    #[test]
    fn low_order_values() {
        let spec = HermiteBasisSpec::new(8).unwrap();
        assert!((hermite_eval(0, 0.0, &spec).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(hermite_eval(1, 0.0, &spec).unwrap(), 0.0);
        assert!(matches!(
            hermite_eval(8, 0.0, &spec),
            Err(Error::HermiteIndex { k: 8, dim: 8 })
        ));
    }

    #[test]
    fn parity() {
        let mut a = vec![0.0; 10];
        let mut b = vec![0.0; 10];
        hermite_all(0.37, &mut a);
        hermite_all(-0.37, &mut b);
        for k in 0..10 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a[k] - sign * b[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn tail_rule_holds() {
        for dim in [1, 16, 64] {
            let spec = HermiteBasisSpec::new(dim).unwrap();
            let mut buf = vec![0.0; dim];
            for t in [spec.half_width, -spec.half_width, spec.half_width + 1.0] {
                hermite_all(t, &mut buf);
                assert!(buf.iter().all(|h| h.abs() < TAIL_BOUND));
            }
        }
    }

    // Gram matrix by the module quadrature, checked against an independent
    // rule at doubled resolution.
    #[test]
    fn orthonormal_under_quadrature() {
        let basis = HermiteBasis::with_dim(16).unwrap();
        let h = basis.table();
        let w = basis.weights();
        let spec = basis.spec();
        let (x2, w2) = composite_gauss_legendre(spec.half_width, spec.panels * 2, spec.order);
        let mut buf = vec![0.0; 16];
        let mut oracle = DMatrix::<f64>::zeros(16, 16);
        for (t, wt) in x2.iter().zip(&w2) {
            hermite_all(*t, &mut buf);
            for j in 0..16 {
                for k in 0..16 {
                    oracle[(j, k)] += wt * buf[j] * buf[k];
                }
            }
        }
        for j in 0..16 {
            for k in 0..16 {
                let s: f64 = (0..w.len()).map(|i| w[i] * h[(j, i)] * h[(k, i)]).sum();
                let delta = if j == k { 1.0 } else { 0.0 };
                assert!((s - delta).abs() < 1e-10, "({j},{k}) = {s}");
                assert!((oracle[(j, k)] - delta).abs() < 1e-10);
            }
        }
    }
}
