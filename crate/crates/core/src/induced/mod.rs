//! The induced realization `rho_N = Ind_{pi^{-1}(N^)}^G tau`.
//!
//! Vectors of `H_N` and operator-valued covariant fields are stored through
//! their restriction to `s(Omega)`, sampled on an [`OmegaGrid`]. The grid is
//! commensurate with the annihilator lattice (each generator is exactly `G`
//! steps), so every covariant reduction lands back on a grid point and all
//! phases are exact roots of unity.

pub mod zak;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::CheckedMul;
use rayon::prelude::*;

pub use zak::{zak, zak_eval, zak_truncation, ZakTransform};

use crate::error::{Error, Result};
use crate::heisenberg::{pairing_e, PhasePoint};
use crate::lattice::{exp_pi_i, LatticeSpec, NPerpIndex, PerpElement, TauRep};
use crate::operator::{hs_inner, numerical_rank, singular_values, Basis, Operator};
use crate::rational::to_f64;

/// `G x G` sample points `w_pq = (p dx, q dy)` with `dx = 1/(beta G)`,
/// `dy = 1/(alpha G)`, tiling `Omega = [0, 1/beta) x [0, 1/alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OmegaGrid {
    spec: LatticeSpec,
    g: usize,
}

/// A group element whose projection is `(p dx, q dy)` for integers `p, q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridElement {
    pub p: i64,
    pub q: i64,
    pub z: Complex64,
}

impl GridElement {
    pub fn section(p: i64, q: i64) -> Self {
        Self {
            p,
            q,
            z: Complex64::new(1.0, 0.0),
        }
    }
}

impl OmegaGrid {
    pub fn new(spec: LatticeSpec, g: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::InvalidArgument("grid size G must be positive".into()));
        }
        Ok(Self { spec, g })
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.g
    }

    pub fn len(&self) -> usize {
        self.g * self.g
    }

    pub fn is_empty(&self) -> bool {
        self.g == 0
    }

    pub fn dx(&self) -> f64 {
        1.0 / (to_f64(self.spec.beta()) * self.g as f64)
    }

    pub fn dy(&self) -> f64 {
        1.0 / (to_f64(self.spec.alpha()) * self.g as f64)
    }

    /// `dx dy = 1 / (a G^2)`.
    pub fn cell_area(&self) -> f64 {
        1.0 / (self.spec.a() as f64 * (self.g * self.g) as f64)
    }

    pub fn point(&self, p: usize, q: usize) -> PhasePoint {
        PhasePoint::new(p as f64 * self.dx(), q as f64 * self.dy())
    }

    pub fn index(&self, p: usize, q: usize) -> usize {
        p * self.g + q
    }

    /// Strict bound on `|j|, |k|` below which the sampled `Xi_n` stay
    /// orthonormal: index differences must stay below `a G`.
    pub fn index_bound(&self) -> i64 {
        let g = self.g as i64;
        if self.spec.a() >= 2 {
            g
        } else {
            g / 2
        }
    }

    pub fn check_alias(&self, n: NPerpIndex) -> Result<()> {
        let bound = self.index_bound();
        if n.j.abs() >= bound || n.k.abs() >= bound {
            return Err(Error::Aliasing { j: n.j, k: n.k, bound });
        }
        Ok(())
    }

    /// `e(w_pq, n) = exp(2 pi i (p k - q j) / (a G))`.
    pub fn pairing(&self, p: usize, q: usize, n: NPerpIndex) -> Complex64 {
        let num = 2 * (p as i128 * n.k as i128 - q as i128 * n.j as i128);
        exp_pi_i(num, self.spec.a() as i128 * self.g as i128)
    }

    /// Exact alignment check for `(x, y, z)` with rational coordinates.
    pub fn align(&self, x: Rational64, y: Rational64, z: Complex64) -> Result<GridElement> {
        let g = self.g as i64;
        let step_x = Rational64::new(1, g) / self.spec.beta();
        let step_y = Rational64::new(1, g) / self.spec.alpha();
        let px = x
            .checked_mul(&(self.spec.beta() * Rational64::from_integer(g)))
            .filter(|r| r.is_integer());
        let Some(px) = px else {
            return Err(Error::NotGridAligned {
                coord: "x",
                value: x.to_string(),
                step: step_x.to_string(),
            });
        };
        let qy = y
            .checked_mul(&(self.spec.alpha() * Rational64::from_integer(g)))
            .filter(|r| r.is_integer());
        let Some(qy) = qy else {
            return Err(Error::NotGridAligned {
                coord: "y",
                value: y.to_string(),
                step: step_y.to_string(),
            });
        };
        Ok(GridElement {
            p: *px.numer(),
            q: *qy.numer(),
            z,
        })
    }

    /// `s(n)` for an annihilator-lattice point.
    pub fn lattice_element(&self, n: NPerpIndex) -> GridElement {
        let g = self.g as i64;
        GridElement::section(n.j * g, n.k * g)
    }

    /// Writes `s(w_pq) g = h s(w_0)` with `w_0` on the grid and
    /// `pi(h) in N^`; returns `(h, index of w_0)`.
    pub fn reduce(&self, p: usize, q: usize, g: &GridElement) -> (PerpElement, usize) {
        let gi = self.g as i64;
        let a = self.spec.a() as i128;
        let g2 = (gi as i128) * (gi as i128);
        // central part of s(w) g: z exp(pi i omega(w, pi(g))), omega = (pQ - qP)/(a G^2)
        let num = p as i128 * g.q as i128 - q as i128 * g.p as i128;
        let z = g.z * exp_pi_i(num, a * g2);
        let tp = p as i64 + g.p;
        let tq = q as i64 + g.q;
        let (jj, p0) = (tp.div_euclid(gi), tp.rem_euclid(gi));
        let (kk, q0) = (tq.div_euclid(gi), tq.rem_euclid(gi));
        let n = NPerpIndex::new(jj, kk);
        // h = (s(w) g) s(w_0)^{-1}: extra phase exp(-pi i omega(n, w_0)),
        // omega(n, w_0) = (J q0 - K p0) / (a G)
        let num2 = jj as i128 * q0 as i128 - kk as i128 * p0 as i128;
        let zh = z * exp_pi_i(-num2, a * gi as i128);
        (PerpElement::new(n, zh), self.index(p0 as usize, q0 as usize))
    }
}

/// Samples of `phi in H_N` on `s(Omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantVectorField {
    grid: OmegaGrid,
    values: Vec<DVector<Complex64>>,
}

impl CovariantVectorField {
    pub fn new(grid: OmegaGrid, values: Vec<DVector<Complex64>>) -> Result<Self> {
        let a = grid.spec().a_usize();
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| v.len() != a) {
            return Err(Error::DimensionMismatch { expected: a, got: v.len() });
        }
        if values.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("field values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn values(&self) -> &[DVector<Complex64>] {
        &self.values
    }

    pub fn at(&self, p: usize, q: usize) -> &DVector<Complex64> {
        &self.values[self.grid.index(p, q)]
    }

    /// `<phi, psi> = sum_w <phi(s(w)), psi(s(w))> dx dy`.
    pub fn inner(&self, other: &CovariantVectorField) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u.iter().zip(v.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>())
            .sum();
        Ok(s * self.grid.cell_area())
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_squared()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_distance(&self, other: &CovariantVectorField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| (u - v).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max))
    }
}

/// Samples of an operator-valued covariant field on `s(Omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantOperatorField {
    grid: OmegaGrid,
    values: Vec<DMatrix<Complex64>>,
}

impl CovariantOperatorField {
    pub fn new(grid: OmegaGrid, values: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let a = grid.spec().a_usize();
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(m) = values.iter().find(|m| m.nrows() != a || m.ncols() != a) {
            return Err(Error::DimensionMismatch {
                expected: a,
                got: m.nrows().max(m.ncols()),
            });
        }
        if values.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("field values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: OmegaGrid) -> Self {
        let a = grid.spec().a_usize();
        Self {
            grid,
            values: vec![DMatrix::zeros(a, a); grid.len()],
        }
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn values(&self) -> &[DMatrix<Complex64>] {
        &self.values
    }

    pub fn at(&self, p: usize, q: usize) -> &DMatrix<Complex64> {
        &self.values[self.grid.index(p, q)]
    }

    /// `<F, F'> = sum_w tr(F(s(w)) F'(s(w))^*) dx dy`.
    pub fn inner(&self, other: &CovariantOperatorField) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| hs_inner(x, y))
            .sum();
        Ok(s * self.grid.cell_area())
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|m| m.norm_squared()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    /// `sum_w ||F(s(w))||_HS dx dy`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|m| m.norm()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn sub(&self, other: &CovariantOperatorField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(x, y)| x - y).collect(),
        })
    }

    pub fn max_distance(&self, other: &CovariantOperatorField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| crate::operator::max_abs_diff(x, y))
            .fold(0.0, f64::max))
    }

    /// Largest pointwise numerical rank (singular values above
    /// `rel_tol * sigma_max` of that point).
    pub fn max_rank(&self, rel_tol: f64) -> usize {
        self.values
            .par_iter()
            .map(|m| numerical_rank(m, rel_tol))
            .max()
            .unwrap_or(0)
    }

    /// Fraction of grid points whose smallest singular value is below `tol`.
    pub fn singular_fraction(&self, tol: f64) -> f64 {
        let count = self
            .values
            .par_iter()
            .filter(|m| singular_values(m).last().copied().unwrap_or(0.0) < tol)
            .count();
        count as f64 / self.values.len() as f64
    }

    /// Header `p,q,row,col,re,im`; `p`, then `q`, then row-major entries.
    pub fn to_csv(&self) -> String {
        let g = self.grid.size();
        let a = self.grid.spec().a_usize();
        let mut out = String::from("p,q,row,col,re,im\n");
        for p in 0..g {
            for q in 0..g {
                let m = self.at(p, q);
                for r in 0..a {
                    for c in 0..a {
                        let z = m[(r, c)];
                        let _ = writeln!(out, "{p},{q},{r},{c},{},{}", z.re, z.im);
                    }
                }
            }
        }
        out
    }

    /// Reads the [`to_csv`](Self::to_csv) layout back onto `grid`. Every
    /// `(p, q, row, col)` must appear exactly once; row order is free.
    pub fn from_csv(text: &str, grid: OmegaGrid) -> Result<Self> {
        let g = grid.size();
        let a = grid.spec().a_usize();
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "p,q,row,col,re,im" => {}
            Some((i, _)) => {
                return Err(Error::Csv {
                    line: i + 1,
                    msg: "expected header p,q,row,col,re,im".into(),
                })
            }
            None => {
                return Err(Error::Csv {
                    line: 0,
                    msg: "empty input".into(),
                })
            }
        }
        let mut values = vec![DMatrix::<Complex64>::zeros(a, a); grid.len()];
        let mut seen = vec![false; grid.len() * a * a];
        let mut count = 0usize;
        for (i, line) in lines {
            let err = |msg: String| Error::Csv { line: i + 1, msg };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 6 {
                return Err(err(format!("expected 6 fields, got {}", fields.len())));
            }
            let mut idx = [0usize; 4];
            for (slot, f) in idx.iter_mut().zip(&fields[..4]) {
                *slot = f.parse().map_err(|e| err(format!("{f:?}: {e}")))?;
            }
            let [p, q, r, c] = idx;
            if p >= g || q >= g || r >= a || c >= a {
                return Err(err(format!("index ({p}, {q}, {r}, {c}) out of range")));
            }
            let re: f64 = fields[4].parse().map_err(|e| err(format!("{:?}: {e}", fields[4])))?;
            let im: f64 = fields[5].parse().map_err(|e| err(format!("{:?}: {e}", fields[5])))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(err("non-finite value".into()));
            }
            let flat = (grid.index(p, q) * a + r) * a + c;
            if seen[flat] {
                return Err(err(format!("duplicate entry ({p}, {q}, {r}, {c})")));
            }
            seen[flat] = true;
            count += 1;
            values[grid.index(p, q)][(r, c)] = Complex64::new(re, im);
        }
        if count != seen.len() {
            return Err(Error::Csv {
                line: 0,
                msg: format!("expected {} entries, got {count}", seen.len()),
            });
        }
        Self::new(grid, values)
    }
}

/// `Xi_n(s(w)) = e(w, n) tau(s(n))` at an arbitrary phase-plane point.
pub fn xi(n: NPerpIndex, w: PhasePoint, rep: &TauRep) -> Operator {
    let nw = rep.spec().embed(n);
    rep.tau_section(n).scale(pairing_e(w, nw))
}

/// `Xi_n` sampled on the grid with exact phases.
pub fn xi_field(n: NPerpIndex, grid: &OmegaGrid, rep: &TauRep) -> CovariantOperatorField {
    let t = rep.tau_section(n).into_matrix();
    let g = grid.size();
    let values = (0..g)
        .flat_map(|p| (0..g).map(move |q| (p, q)))
        .map(|(p, q)| &t * grid.pairing(p, q, n))
        .collect();
    CovariantOperatorField { grid: *grid, values }
}

/// `(rho_N(g) phi)(s(w)) = phi(s(w) g)`, reduced back to `s(Omega)` through
/// `phi(h s(w_0)) = tau(h) phi(s(w_0))`.
pub fn rho_n_apply(g: &GridElement, phi: &CovariantVectorField, rep: &TauRep) -> Result<CovariantVectorField> {
    let grid = phi.grid;
    if grid.spec() != rep.spec() {
        return Err(Error::GridMismatch);
    }
    let gs = grid.size();
    let values = (0..gs * gs)
        .into_par_iter()
        .map(|idx| {
            let (p, q) = (idx / gs, idx % gs);
            let (h, w0) = grid.reduce(p, q, g);
            rep.tau(&h).matrix() * &phi.values[w0]
        })
        .collect();
    Ok(CovariantVectorField { grid, values })
}

/// `F_Y(g) = sum_j phi_j(g) (x) conj(psi_j(g))`.
pub fn f_y(phis: &[CovariantVectorField], psis: &[CovariantVectorField]) -> Result<CovariantOperatorField> {
    if phis.len() != psis.len() {
        return Err(Error::DimensionMismatch {
            expected: phis.len(),
            got: psis.len(),
        });
    }
    let Some(first) = phis.first() else {
        return Err(Error::InvalidArgument("F_Y needs at least one vector pair".into()));
    };
    let grid = first.grid;
    if phis.iter().chain(psis).any(|f| f.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let a = grid.spec().a_usize();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let mut m = DMatrix::<Complex64>::zeros(a, a);
            for (phi, psi) in phis.iter().zip(psis) {
                m += &phi.values[idx] * psi.values[idx].adjoint();
            }
            m
        })
        .collect();
    Ok(CovariantOperatorField { grid, values })
}

/// `alpha(F)(n) = sum_w <F(s(w)), Xi_n(s(w))> dx dy`.
pub fn fw_coefficient(f: &CovariantOperatorField, n: NPerpIndex, rep: &TauRep) -> Result<Complex64> {
    let grid = f.grid;
    grid.check_alias(n)?;
    let t = rep.tau_section(n).into_matrix();
    let g = grid.size();
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..g {
        for q in 0..g {
            acc += hs_inner(f.at(p, q), &t) * grid.pairing(p, q, n).conj();
        }
    }
    Ok(acc * grid.cell_area())
}

/// Coefficients for every index in `window` (parallel, order preserved).
pub fn fw_coefficients(
    f: &CovariantOperatorField,
    window: &[NPerpIndex],
    rep: &TauRep,
) -> Result<BTreeMap<NPerpIndex, Complex64>> {
    let vals: Vec<Result<(NPerpIndex, Complex64)>> = window
        .par_iter()
        .map(|&n| fw_coefficient(f, n, rep).map(|c| (n, c)))
        .collect();
    vals.into_iter().collect()
}

/// `sum_n c_n Xi_n` on the grid.
pub fn expand(
    coeffs: &BTreeMap<NPerpIndex, Complex64>,
    grid: &OmegaGrid,
    rep: &TauRep,
) -> Result<CovariantOperatorField> {
    for n in coeffs.keys() {
        grid.check_alias(*n)?;
    }
    let a = grid.spec().a_usize();
    let terms: Vec<(NPerpIndex, Complex64, DMatrix<Complex64>)> = coeffs
        .iter()
        .map(|(&n, &c)| (n, c, rep.tau_section(n).into_matrix()))
        .collect();
    let g = grid.size();
    let values = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (p, q) = (idx / g, idx % g);
            let mut m = DMatrix::<Complex64>::zeros(a, a);
            for (n, c, t) in &terms {
                m += t * (c * grid.pairing(p, q, *n));
            }
            m
        })
        .collect();
    Ok(CovariantOperatorField { grid: *grid, values })
}

/// All indices with `max(|j|, |k|) <= radius`, row-major.
pub fn index_window(radius: i64) -> Vec<NPerpIndex> {
    (-radius..=radius)
        .flat_map(|j| (-radius..=radius).map(move |k| NPerpIndex::new(j, k)))
        .collect()
}

/// `tr(X_N rho_N(g)^*)` for `X_N = sum phi_j (x) conj(psi_j)`, i.e.
/// `sum_j <phi_j, rho_N(g) psi_j>`.
pub fn induced_trace(
    phis: &[CovariantVectorField],
    psis: &[CovariantVectorField],
    g: &GridElement,
    rep: &TauRep,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (phi, psi) in phis.iter().zip(psis) {
        acc += phi.inner(&rho_n_apply(g, psi, rep)?)?;
    }
    Ok(acc)
}

/// Operator value of a field at one grid point, tagged with the tau basis.
pub fn field_value(f: &CovariantOperatorField, p: usize, q: usize) -> Operator {
    Operator::from_parts(Basis::Tau(f.grid.spec().a_usize()), f.at(p, q).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::unit;

    fn setup(a: i64, g: usize) -> (TauRep, OmegaGrid) {
        let spec = LatticeSpec::from_integers(a, 1).unwrap();
        (TauRep::new(spec), OmegaGrid::new(spec, g).unwrap())
    }

    fn random_field(grid: OmegaGrid, seed: u64) -> CovariantVectorField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = grid.spec().a_usize();
        let values = (0..grid.len())
            .map(|_| DVector::from_fn(a, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        CovariantVectorField::new(grid, values).unwrap()
    }

    #[test]
    fn xi_examples() {
        let (rep, grid) = setup(3, 8);
        for w in [PhasePoint::new(0.3, 0.1), PhasePoint::new(-2.0, 5.0)] {
            let x = xi(NPerpIndex::ZERO, w, &rep);
            assert!(crate::operator::max_abs_diff(x.matrix(), &DMatrix::identity(3, 3)) < 1e-15);
        }
        let n = NPerpIndex::new(1, 2);
        let x0 = xi(n, PhasePoint::ORIGIN, &rep);
        assert_eq!(x0.matrix(), rep.tau_section(n).matrix());
        // grid phases agree with the floating-point pairing
        let f = xi_field(n, &grid, &rep);
        for (p, q) in [(0, 0), (3, 5), (7, 7)] {
            let direct = xi(n, grid.point(p, q), &rep);
            assert!(crate::operator::max_abs_diff(f.at(p, q), direct.matrix()) < 1e-13);
        }
    }

    #[test]
    fn xi_orthonormal_on_grid() {
        let (rep, grid) = setup(2, 6);
        let idx = index_window(5);
        let fields: Vec<_> = idx.iter().map(|n| xi_field(*n, &grid, &rep)).collect();
        for (i, fi) in fields.iter().enumerate() {
            for (j, fj) in fields.iter().enumerate() {
                let g = fi.inner(fj).unwrap();
                let delta = if i == j { 1.0 } else { 0.0 };
                assert!((g - Complex64::new(delta, 0.0)).norm() < 1e-10, "{:?} {:?}", idx[i], idx[j]);
            }
        }
    }

    #[test]
    fn aliasing_rejected() {
        let (rep, grid) = setup(2, 4);
        let f = CovariantOperatorField::zeros(grid);
        assert!(matches!(
            fw_coefficient(&f, NPerpIndex::new(4, 0), &rep),
            Err(Error::Aliasing { bound: 4, .. })
        ));
        assert_eq!(fw_coefficient(&f, NPerpIndex::new(3, -3), &rep).unwrap(), Complex64::new(0.0, 0.0));
        let mut c = BTreeMap::new();
        c.insert(NPerpIndex::new(0, -4), Complex64::new(1.0, 0.0));
        assert!(expand(&c, &grid, &rep).is_err());
        let (_, grid1) = setup(1, 8);
        assert_eq!(grid1.index_bound(), 4);
    }

    #[test]
    fn expand_basics() {
        let (rep, grid) = setup(3, 6);
        let c = Complex64::new(0.5, -2.0);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(NPerpIndex::ZERO, c);
        let f = expand(&coeffs, &grid, &rep).unwrap();
        for m in f.values() {
            assert!(crate::operator::max_abs_diff(m, &(DMatrix::identity(3, 3) * c)) < 1e-15);
        }
        let n = NPerpIndex::new(-2, 4);
        let target = xi_field(n, &grid, &rep);
        let window = index_window(5);
        let coeffs = fw_coefficients(&target, &window, &rep).unwrap();
        let back = expand(&coeffs, &grid, &rep).unwrap();
        assert!(back.max_distance(&target).unwrap() < 1e-10);
    }

    #[test]
    fn rho_n_trivial_cases() {
        let (rep, grid) = setup(2, 8);
        let phi = random_field(grid, 7);
        let same = rho_n_apply(&GridElement::section(0, 0), &phi, &rep).unwrap();
        assert!(same.max_distance(&phi).unwrap() < 1e-15);
        let z = unit(0.8);
        let central = rho_n_apply(&GridElement { p: 0, q: 0, z }, &phi, &rep).unwrap();
        assert!(central.max_distance(&phi.scale(z)).unwrap() < 1e-14);
    }

    #[test]
    fn rho_n_is_a_representation() {
        let (rep, grid) = setup(2, 8);
        let phi = random_field(grid, 3);
        let g1 = GridElement { p: 3, q: -5, z: unit(0.2) };
        let g2 = GridElement { p: 11, q: 2, z: unit(-1.0) };
        // g1 g2 on the grid: phase exp(pi i (P1 Q2 - Q1 P2) dx dy)
        let num = g1.p as i128 * g2.q as i128 - g1.q as i128 * g2.p as i128;
        let z12 = g1.z * g2.z * exp_pi_i(num, 2 * 64);
        let g12 = GridElement { p: g1.p + g2.p, q: g1.q + g2.q, z: z12 };
        // rho(g1) rho(g2) = rho(g1 g2)
        let lhs = rho_n_apply(&g1, &rho_n_apply(&g2, &phi, &rep).unwrap(), &rep).unwrap();
        let rhs = rho_n_apply(&g12, &phi, &rep).unwrap();
        assert!(lhs.max_distance(&rhs).unwrap() < 1e-12);
        // unitary
        assert!((rhs.norm() - phi.norm()).abs() < 1e-12);
    }

    #[test]
    fn prop_2_5_on_random_fields() {
        for a in 2..=4 {
            let (rep, grid) = setup(a, 8);
            let phi = random_field(grid, a as u64);
            for n in rep.s_set() {
                let lhs = rho_n_apply(&grid.lattice_element(*n), &phi, &rep).unwrap();
                let xi = xi_field(*n, &grid, &rep);
                for idx in 0..grid.len() {
                    let rhs = &xi.values()[idx] * &phi.values()[idx];
                    assert!((&lhs.values()[idx] - rhs).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn alignment() {
        let spec = LatticeSpec::new(Rational64::new(3, 2), Rational64::new(4, 3)).unwrap();
        let grid = OmegaGrid::new(spec, 4).unwrap();
        // dx = 1/(beta G) = 3/16, dy = 1/(alpha G) = 1/6
        let g = grid.align(Rational64::new(9, 16), Rational64::new(-1, 3), Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!((g.p, g.q), (3, -2));
        let err = grid.align(Rational64::new(1, 16), Rational64::new(0, 1), Complex64::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NotGridAligned { coord: "x", .. }));
        let err = grid.align(Rational64::new(0, 1), Rational64::new(1, 7), Complex64::new(1.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NotGridAligned { coord: "y", .. }));
    }

    #[test]
    fn f_y_rank_and_errors() {
        let (_, grid) = setup(3, 6);
        let phis: Vec<_> = (0..2).map(|s| random_field(grid, s)).collect();
        let psis: Vec<_> = (10..12).map(|s| random_field(grid, s)).collect();
        let f1 = f_y(&phis[..1], &psis[..1]).unwrap();
        assert_eq!(f1.max_rank(1e-10), 1);
        let f2 = f_y(&phis, &psis).unwrap();
        assert_eq!(f2.max_rank(1e-10), 2);
        assert!(f2.l1_norm() > 0.0);
        assert!(f_y(&phis, &psis[..1]).is_err());
        let (_, other) = setup(3, 4);
        assert!(matches!(f_y(&phis[..1], &[random_field(other, 1)]), Err(Error::GridMismatch)));
        assert!(f_y(&[], &[]).is_err());
    }

    #[test]
    fn operator_field_csv_round_trip() {
        let (rep, grid) = setup(2, 3);
        let f = xi_field(NPerpIndex::new(1, 1), &grid, &rep);
        let back = CovariantOperatorField::from_csv(&f.to_csv(), grid).unwrap();
        assert_eq!(back, f);
        assert!(CovariantOperatorField::from_csv("p,q,row,col,re,im\n0,0,0,0,1,0\n", grid).is_err());
        let dup = f.to_csv() + "0,0,0,0,1,0\n";
        assert!(CovariantOperatorField::from_csv(&dup, grid).is_err());
    }
}
