//! Oracles shared by integration tests. Nothing here touches the induced side.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_complex::Complex64;
use weyl_core::heisenberg::{cocycle_psi, PhasePoint};
use weyl_core::lattice::{LatticeSpec, NPerpIndex};
use weyl_core::operator::Operator;
use weyl_core::rational::to_f64;
use weyl_core::schrodinger::{fourier_wigner_grid, GridFunction2D, HermiteBasis};

/// `alpha(X^v)(n) = conj(psi(n, v)) alpha(X)(n + v)` for `|j| <= 7 beta`,
/// `|k| <= 7 alpha`, computed on the Schrodinger side only.
pub fn translated_lattice_alpha(x: &Operator, v: PhasePoint, spec: &LatticeSpec, basis: &HermiteBasis) -> Vec<(NPerpIndex, Complex64)> {
    let rj = (7.0 * to_f64(spec.beta())).ceil() as i64;
    let rk = (7.0 * to_f64(spec.alpha())).ceil() as i64;
    let (nx, ny) = ((2 * rj + 1) as usize, (2 * rk + 1) as usize);
    let origin = spec.embed(NPerpIndex::new(-rj, -rk)) + v;
    let template = GridFunction2D::new(
        origin,
        1.0 / to_f64(spec.beta()),
        1.0 / to_f64(spec.alpha()),
        nx,
        ny,
        vec![Complex64::new(0.0, 0.0); nx * ny],
    )
    .unwrap();
    let alpha = fourier_wigner_grid(x, &template, basis).unwrap();
    let mut out = Vec::with_capacity(nx * ny);
    for p in 0..nx {
        for q in 0..ny {
            let n = NPerpIndex::new(p as i64 - rj, q as i64 - rk);
            out.push((n, cocycle_psi(spec.embed(n), v).conj() * alpha.get(p, q)));
        }
    }
    out
}

/// `sqrt(sum_{n not in nv} |c_n|^2 / sum_n |c_n|^2)`.
pub fn tail_fraction(values: &[(NPerpIndex, Complex64)], nv: &[NPerpIndex]) -> f64 {
    let inside: BTreeSet<NPerpIndex> = nv.iter().copied().collect();
    let total: f64 = values.iter().map(|(_, c)| c.norm_sqr()).sum();
    let tail: f64 = values.iter().filter(|(n, _)| !inside.contains(n)).map(|(_, c)| c.norm_sqr()).sum();
    (tail / total).sqrt()
}

/// Convenience wrapper for a single `N_v`.
pub fn parseval_tail(x: &Operator, v: PhasePoint, nv: &[NPerpIndex], spec: &LatticeSpec, basis: &HermiteBasis) -> f64 {
    tail_fraction(&translated_lattice_alpha(x, v, spec, basis), nv)
}
