//! The Weil-Brezin/Zak intertwiner `Z : L^2(R) -> H_N`, built in two stages.
//!
//! Stage 1 periodizes over `(1/beta) Z`:
//! `u(x, y, z) = beta^{-1/2} z exp(pi i x y) sum_j exp(2 pi i j y / beta) phi(x + j/beta)`,
//! which transforms by `zeta` under `pi^{-1}(M)`. Stage 2 induces from `M` to
//! `N^` over the coset representatives `r_i = (0, i/alpha)`:
//! `(Z phi)(g)_i = u(s(r_i) g)`.
//!
//! The `beta^{-1/2}` factor makes `Z` isometric for the measure
//! `dx dy` on `Omega`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{CovariantVectorField, OmegaGrid};
use crate::error::{Error, Result};
use crate::heisenberg::{section, unit, GroupElement, PhasePoint};
use crate::lattice::LatticeSpec;
use crate::rational::to_f64;
use crate::schrodinger::hermite::{hermite_all, tail_half_width};

/// Gaussian tail bound used to pick the periodization window.
pub const ZAK_TAIL_BOUND: f64 = 1e-12;

/// Smallest `J` with every `h_k`, `k < dim`, below `1e-12` beyond `J / beta`,
/// and never below `8 max(1, beta)`.
pub fn zak_truncation(dim: usize, beta: f64) -> i64 {
    let t = tail_half_width(dim, ZAK_TAIL_BOUND);
    let tail = (beta * t).ceil() as i64;
    let floor = (8.0 * beta.max(1.0)).ceil() as i64;
    tail.max(floor)
}

/// Evaluates the two stages for one Hermite coefficient vector.
#[derive(Debug, Clone)]
pub struct ZakTransform {
    spec: LatticeSpec,
    coeffs: Vec<Complex64>,
    j_trunc: i64,
    beta: f64,
    alpha: f64,
}

impl ZakTransform {
    pub fn new(spec: LatticeSpec, phi: &DVector<Complex64>, j_trunc: i64) -> Result<Self> {
        if phi.is_empty() {
            return Err(Error::InvalidArgument("empty Hermite coefficient vector".into()));
        }
        if j_trunc < 0 {
            return Err(Error::InvalidArgument(format!("Zak truncation must be >= 0, got {j_trunc}")));
        }
        Ok(Self {
            spec,
            coeffs: phi.iter().copied().collect(),
            j_trunc,
            beta: to_f64(spec.beta()),
            alpha: to_f64(spec.alpha()),
        })
    }

    pub fn truncation(&self) -> i64 {
        self.j_trunc
    }

    fn phi(&self, t: f64, scratch: &mut [f64]) -> Complex64 {
        hermite_all(t, scratch);
        self.coeffs.iter().zip(scratch.iter()).map(|(c, h)| c * h).sum()
    }

    /// Stage 1 at an arbitrary group element. The window of `2J + 1` terms
    /// is centred on the term nearest `t = 0`.
    pub fn stage_one(&self, g: &GroupElement) -> Complex64 {
        let (x, y) = (g.point.x, g.point.y);
        let mut scratch = vec![0.0; self.coeffs.len()];
        let c = (-x * self.beta).round() as i64;
        let mut s = Complex64::new(0.0, 0.0);
        for j in (c - self.j_trunc)..=(c + self.j_trunc) {
            let jf = j as f64;
            let v = self.phi(x + jf / self.beta, &mut scratch);
            if v != Complex64::new(0.0, 0.0) {
                s += v * unit(2.0 * PI * jf * y / self.beta);
            }
        }
        s * g.z * unit(PI * x * y) / self.beta.sqrt()
    }

    /// `(Z phi)(g)` as a vector in `C^a`.
    pub fn eval(&self, g: &GroupElement) -> DVector<Complex64> {
        let a = self.spec.a_usize();
        DVector::from_fn(a, |i, _| {
            let r = section(PhasePoint::new(0.0, i as f64 / self.alpha));
            self.stage_one(&r.multiply(g))
        })
    }

    /// Samples on `s(Omega)`.
    pub fn on_grid(&self, grid: &OmegaGrid) -> Result<CovariantVectorField> {
        if grid.spec() != &self.spec {
            return Err(Error::GridMismatch);
        }
        let g = grid.size();
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| self.eval(&section(grid.point(idx / g, idx % g))))
            .collect();
        CovariantVectorField::new(*grid, values)
    }
}

/// `Z phi` on the grid.
pub fn zak(phi: &DVector<Complex64>, grid: &OmegaGrid, j_trunc: i64) -> Result<CovariantVectorField> {
    ZakTransform::new(*grid.spec(), phi, j_trunc)?.on_grid(grid)
}

/// `(Z phi)(g)` at any group element, through the stage formulas.
pub fn zak_eval(phi: &DVector<Complex64>, g: &GroupElement, spec: &LatticeSpec, j_trunc: i64) -> Result<DVector<Complex64>> {
    Ok(ZakTransform::new(*spec, phi, j_trunc)?.eval(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::induced::rho_n_apply;
    use crate::lattice::{NPerpIndex, TauRep};
    use crate::schrodinger::{rho_apply, HermiteBasis};
    use num_rational::Rational64;

    fn unit_vec(d: usize, k: usize) -> DVector<Complex64> {
        DVector::from_fn(d, |i, _| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
    }

    #[test]
    fn truncation_rule() {
        assert!(zak_truncation(64, 1.0) >= 8);
        assert!(zak_truncation(64, 3.0) >= 24);
        let j = zak_truncation(64, 1.0);
        let mut buf = vec![0.0; 64];
        hermite_all(j as f64, &mut buf);
        assert!(buf.iter().all(|h| h.abs() < ZAK_TAIL_BOUND));
    }

    #[test]
    fn isometry_on_hermite_functions() {
        for (al, be) in [((2, 1), (1, 1)), ((3, 2), (2, 1)), ((1, 2), (4, 1))] {
            let spec = LatticeSpec::new(Rational64::new(al.0, al.1), Rational64::new(be.0, be.1)).unwrap();
            let grid = OmegaGrid::new(spec, 32).unwrap();
            let j = zak_truncation(8, to_f64(spec.beta()));
            for k in [0, 3, 5] {
                let n = zak(&unit_vec(8, k), &grid, j).unwrap().norm();
                assert!((n - 1.0).abs() < 1e-9, "a={} k={k} norm={n}", spec.a());
            }
        }
    }

    #[test]
    fn distinct_hermite_functions_stay_orthogonal() {
        let spec = LatticeSpec::from_integers(3, 1).unwrap();
        let grid = OmegaGrid::new(spec, 32).unwrap();
        let z1 = zak(&unit_vec(6, 1), &grid, 8).unwrap();
        let z4 = zak(&unit_vec(6, 4), &grid, 8).unwrap();
        assert!(z1.inner(&z4).unwrap().norm() < 1e-10);
    }

    #[test]
    fn covariance_under_generators() {
        let spec = LatticeSpec::new(Rational64::new(3, 2), Rational64::new(2, 1)).unwrap();
        let rep = TauRep::new(spec);
        let grid = OmegaGrid::new(spec, 8).unwrap();
        let phi = DVector::from_fn(6, |i, _| Complex64::new(1.0 / (i + 1) as f64, 0.1 * i as f64));
        let zt = ZakTransform::new(spec, &phi, zak_truncation(6, 2.0)).unwrap();
        for nu in [NPerpIndex::new(1, 0), NPerpIndex::new(0, 1), NPerpIndex::new(-1, 2)] {
            let s_nu = section(spec.embed(nu));
            let tau = rep.tau_section(nu);
            for (p, q) in [(0, 0), (3, 5), (7, 1)] {
                let sw = section(grid.point(p, q));
                let lhs = zt.eval(&s_nu.multiply(&sw));
                let rhs = tau.matrix() * zt.eval(&sw);
                assert!((lhs - rhs).norm() < 1e-10, "nu={nu:?}");
            }
        }
    }

    #[test]
    fn intertwines_with_induced_action() {
        let spec = LatticeSpec::from_integers(2, 1).unwrap();
        let rep = TauRep::new(spec);
        let grid = OmegaGrid::new(spec, 16).unwrap();
        let n = NPerpIndex::new(1, 1);
        let g = grid.lattice_element(n);
        let s_n = section(spec.embed(n));
        let mut errs = Vec::new();
        for d in [8, 16, 32] {
            let basis = HermiteBasis::with_dim(d).unwrap();
            let phi = unit_vec(d, 0);
            let moved = rho_apply(&s_n, &phi, &basis).unwrap();
            let j = zak_truncation(d, 1.0);
            let lhs = zak(&moved, &grid, j).unwrap();
            let rhs = rho_n_apply(&g, &zak(&phi, &grid, j).unwrap(), &rep).unwrap();
            errs.push(lhs.max_distance(&rhs).unwrap());
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] < 1e-6, "{errs:?}");
    }
}
