//! The Schrödinger representation on `L^2(R)`, truncated to the Hermite span.
//!
//! `(rho(x, y, z) phi)(t) = z exp(pi i (x y + 2 y t)) phi(t + x)`.
//!
//! Matrix elements `<rho(g) h_k, h_j>` are computed by composite
//! Gauss-Legendre quadrature. The Weyl transform is the midpoint-rule sum
//! `sum_w f(w) rho(s(w)) dx dy`, and the Fourier-Wigner transform is
//! `alpha(X)(w) = tr(X rho(s(w))^*)`.
//!
//! Both grid routines are written as quadrature against the tabulated
//! Hermite functions rather than as loops over full `rho` matrices: the
//! sums are the same, the cost is `O(nx D^2 Nq)` instead of
//! `O(nx ny D^2 Nq)`.

pub mod grid;
pub mod hermite;
pub mod quadrature;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

pub use grid::GridFunction2D;
pub use hermite::{hermite_eval, HermiteBasis, HermiteBasisSpec};

use crate::error::{Error, Result};
use crate::heisenberg::{cocycle_psi, section, unit, GroupElement, PhasePoint};
use crate::operator::{Basis, Operator};

fn split(m: &DMatrix<Complex64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

fn join(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    re.zip_map(im, Complex64::new)
}

/// `R_{jk} = <rho(g) h_k, h_j>` for `j, k < D`.
pub fn rho_matrix(g: &GroupElement, basis: &HermiteBasis) -> Operator {
    let (x, y) = (g.point.x, g.point.y);
    let h = basis.table();
    let shifted = basis.shifted_table(x);
    let mut cre = shifted.clone();
    let mut cim = shifted;
    for (i, (t, w)) in basis.nodes().iter().zip(basis.weights()).enumerate() {
        let (s, c) = (2.0 * PI * y * t).sin_cos();
        cre.column_mut(i).scale_mut(w * c);
        cim.column_mut(i).scale_mut(w * s);
    }
    let re = h * cre.transpose();
    let im = h * cim.transpose();
    let phase = g.z * unit(PI * x * y);
    Operator::from_parts(Basis::Hermite(basis.dim()), join(&re, &im) * phase)
}

/// Applies `rho_matrix(g)` to a coefficient vector.
pub fn rho_apply(g: &GroupElement, phi: &DVector<Complex64>, basis: &HermiteBasis) -> Result<DVector<Complex64>> {
    if phi.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: phi.len(),
        });
    }
    Ok(rho_matrix(g, basis).matrix() * phi)
}

/// `exp(sign 2 pi i y_q t_i)` for every grid `y` and quadrature node.
fn y_phase_table(f: &GridFunction2D, nodes: &[f64], sign: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(f.ny(), nodes.len(), |q, i| unit(sign * 2.0 * PI * f.y(q) * nodes[i]))
}

/// Midpoint-rule Weyl transform `sum_{p,q} f(w_pq) rho(s(w_pq)) dx dy`.
///
/// Per grid column `x_p` this evaluates
/// `W_jk += sum_i w_i h_j(t_i) h_k(t_i + x_p) g_p(t_i)` with
/// `g_p(t) = dx dy sum_q f(x_p, y_q) exp(pi i (x_p y_q + 2 y_q t))`.
/// Columns are summed in index order, so the result does not depend on the
/// thread count.
pub fn weyl_transform(f: &GridFunction2D, basis: &HermiteBasis) -> Operator {
    let d = basis.dim();
    let nodes = basis.nodes();
    let weights = basis.weights();
    let ephase = y_phase_table(f, nodes, 1.0);
    let h = basis.table();
    let area = f.cell_area();

    let columns: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..f.nx())
        .into_par_iter()
        .map(|p| {
            let x = f.x(p);
            let coeffs = DVector::from_fn(f.ny(), |q, _| f.get(p, q) * unit(PI * x * f.y(q)) * area);
            if coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                return (DMatrix::zeros(d, d), DMatrix::zeros(d, d));
            }
            // g_p(t_i) = sum_q coeffs_q exp(2 pi i y_q t_i)
            let g = ephase.transpose() * coeffs;
            let shifted = basis.shifted_table(x);
            let mut bre = shifted.clone();
            let mut bim = shifted;
            for i in 0..nodes.len() {
                bre.column_mut(i).scale_mut(weights[i] * g[i].re);
                bim.column_mut(i).scale_mut(weights[i] * g[i].im);
            }
            (h * bre.transpose(), h * bim.transpose())
        })
        .collect();

    let mut re = DMatrix::<f64>::zeros(d, d);
    let mut im = DMatrix::<f64>::zeros(d, d);
    for (r, i) in &columns {
        re += r;
        im += i;
    }
    Operator::from_parts(Basis::Hermite(d), join(&re, &im))
}

fn check_hermite(x: &Operator, basis: &HermiteBasis) -> Result<()> {
    match x.basis() {
        Basis::Hermite(d) if d == basis.dim() => Ok(()),
        b => Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: b.dim(),
        }),
    }
}

/// `q_x(t_i) = sum_{jk} X_jk h_j(t_i) h_k(t_i + x)`.
fn diagonal_kernel(xre: &DMatrix<f64>, xim: &DMatrix<f64>, basis: &HermiteBasis, x: f64) -> Vec<Complex64> {
    let shifted = basis.shifted_table(x);
    let vre = xre * &shifted;
    let vim = xim * &shifted;
    let h = basis.table();
    (0..basis.nodes().len())
        .map(|i| {
            let hc = h.column(i);
            Complex64::new(hc.dot(&vre.column(i)), hc.dot(&vim.column(i)))
        })
        .collect()
}

/// `alpha(X)(w) = tr(X rho(s(w))^*)`.
pub fn fourier_wigner(x: &Operator, w: PhasePoint, basis: &HermiteBasis) -> Result<Complex64> {
    check_hermite(x, basis)?;
    let (xre, xim) = split(x.matrix());
    let q = diagonal_kernel(&xre, &xim, basis, w.x);
    let s: Complex64 = basis
        .nodes()
        .iter()
        .zip(basis.weights())
        .zip(&q)
        .map(|((t, wt), qi)| qi * unit(-2.0 * PI * w.y * t) * *wt)
        .sum();
    Ok(s * unit(-PI * w.x * w.y))
}

/// `alpha(X)` sampled on the geometry of `template` (its samples are ignored).
pub fn fourier_wigner_grid(x: &Operator, template: &GridFunction2D, basis: &HermiteBasis) -> Result<GridFunction2D> {
    check_hermite(x, basis)?;
    let (xre, xim) = split(x.matrix());
    let nodes = basis.nodes();
    let weights = basis.weights();
    let ephase = y_phase_table(template, nodes, -1.0);
    let ny = template.ny();
    let rows: Vec<Vec<Complex64>> = (0..template.nx())
        .into_par_iter()
        .map(|p| {
            let xp = template.x(p);
            let q = diagonal_kernel(&xre, &xim, basis, xp);
            let wq = DVector::from_fn(nodes.len(), |i, _| q[i] * weights[i]);
            let col = &ephase * wq;
            (0..ny).map(|j| col[j] * unit(-PI * xp * template.y(j))).collect()
        })
        .collect();
    template.with_samples(rows.into_iter().flatten().collect())
}

/// `X rho(s(v))^*`.
pub fn translate_op(x: &Operator, v: PhasePoint, basis: &HermiteBasis) -> Result<Operator> {
    check_hermite(x, basis)?;
    let r = rho_matrix(&section(v), basis);
    x.compose(&r.adjoint())
}

/// `|| R R^* - I ||_F`: how far the compressed `rho(g)` is from unitary.
pub fn unitarity_leakage(g: &GroupElement, basis: &HermiteBasis) -> f64 {
    let r = rho_matrix(g, basis);
    let d = basis.dim();
    (r.matrix() * r.matrix().adjoint() - DMatrix::<Complex64>::identity(d, d)).norm()
}

/// `conj(psi(w, v)) alpha(X)(w + v)`: the Fourier-Wigner transform of
/// `X rho(s(v))^*` expressed through that of `X`.
pub fn translated_alpha(alpha_x_at_shift: Complex64, w: PhasePoint, v: PhasePoint) -> Complex64 {
    cocycle_psi(w, v).conj() * alpha_x_at_shift
}

/// `exp(-pi |w|^2 / 2)`, the Fourier-Wigner transform of `h_0 (x) conj(h_0)`.
pub fn gaussian_alpha(w: PhasePoint) -> f64 {
    (-PI * w.norm_sqr() / 2.0).exp()
}
