//! Rectangular isotropic lattices and the finite induced representation.
//!
//! For rationals `alpha, beta > 0` with `alpha * beta = a` a positive integer
//! the tower is
//!
//! ```text
//! N   = alpha Z   x beta Z
//! M   = (1/beta) Z x beta Z          (self-dual, [M : N] = a)
//! N^  = (1/beta) Z x (1/alpha) Z     ([N^ : M] = a)
//! ```
//!
//! Points of `N^` are addressed by integer pairs `(j, k) -> (j/beta, k/alpha)`,
//! so every membership test is integer arithmetic: `n in M` iff `a | k`, and
//! `n in N` iff `a | j` and `a | k`. The symplectic form of two such points
//! is `(j k' - k j') / a`, which keeps all cocycle phases exact roots of unity.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{CheckedMul, CheckedSub, One, Zero};

use crate::error::{Error, Result};
use crate::heisenberg::{renormalize, GroupElement, PhasePoint};
use crate::operator::{hs_inner, Basis, Operator};
use crate::rational::to_f64;

/// `exp(pi i num / den)` with the exponent reduced exactly mod `2 den`.
pub fn exp_pi_i(num: i128, den: i128) -> Complex64 {
    debug_assert!(den > 0);
    let r = num.rem_euclid(2 * den);
    let (s, c) = (PI * r as f64 / den as f64).sin_cos();
    Complex64::new(c, s)
}

/// Index `(j, k)` of the point `(j/beta, k/alpha)` of the annihilator lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NPerpIndex {
    pub j: i64,
    pub k: i64,
}

impl NPerpIndex {
    pub const ZERO: NPerpIndex = NPerpIndex { j: 0, k: 0 };

    pub const fn new(j: i64, k: i64) -> Self {
        Self { j, k }
    }

    pub fn add(self, o: NPerpIndex) -> Self {
        Self::new(self.j + o.j, self.k + o.k)
    }

    pub fn sub(self, o: NPerpIndex) -> Self {
        Self::new(self.j - o.j, self.k - o.k)
    }

    pub fn neg(self) -> Self {
        Self::new(-self.j, -self.k)
    }

    pub fn max_abs(self) -> i64 {
        self.j.abs().max(self.k.abs())
    }
}

/// An element of `pi^{-1}(N^)`: exact projection plus a central phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerpElement {
    pub index: NPerpIndex,
    pub z: Complex64,
}

impl PerpElement {
    pub fn section(index: NPerpIndex) -> Self {
        Self {
            index,
            z: Complex64::new(1.0, 0.0),
        }
    }

    pub fn new(index: NPerpIndex, z: Complex64) -> Self {
        Self {
            index,
            z: renormalize(z),
        }
    }

    pub fn central(z: Complex64) -> Self {
        Self::new(NPerpIndex::ZERO, z)
    }

    pub fn inverse(&self) -> Self {
        Self {
            index: self.index.neg(),
            z: self.z.conj(),
        }
    }
}

/// Which conventions the group law and the character use.
///
/// Both flags are on for the genuine structures; switching one off is a
/// mutation used to check that the test suites notice broken conventions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conventions {
    /// The `(-1)^{jk}` factor in the character on `pi^{-1}(M)`.
    pub zeta_correction: bool,
    /// The `psi` phase in the group product.
    pub cocycle_phase: bool,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            zeta_correction: true,
            cocycle_phase: true,
        }
    }
}

impl Conventions {
    #[doc(hidden)]
    pub fn without_zeta_correction() -> Self {
        Self {
            zeta_correction: false,
            ..Self::default()
        }
    }

    #[doc(hidden)]
    pub fn without_cocycle() -> Self {
        Self {
            cocycle_phase: false,
            ..Self::default()
        }
    }

    /// The Heisenberg product on floating-point elements.
    pub fn group_multiply(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        if self.cocycle_phase {
            g.multiply(h)
        } else {
            GroupElement {
                point: g.point + h.point,
                z: renormalize(g.z * h.z),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    alpha: Rational64,
    beta: Rational64,
    a: i64,
}

fn symplectic_exact(p: (Rational64, Rational64), q: (Rational64, Rational64)) -> Option<Rational64> {
    let l = p.0.checked_mul(&q.1)?;
    let r = p.1.checked_mul(&q.0)?;
    l.checked_sub(&r)
}

impl LatticeSpec {
    /// Builds `N = alpha Z x beta Z` and its tower; requires `alpha * beta`
    /// to be a positive integer.
    pub fn new(alpha: Rational64, beta: Rational64) -> Result<Self> {
        if alpha <= Rational64::zero() {
            return Err(Error::InvalidLattice(format!("alpha = {alpha} must be positive")));
        }
        if beta <= Rational64::zero() {
            return Err(Error::InvalidLattice(format!("beta = {beta} must be positive")));
        }
        let area = alpha
            .checked_mul(&beta)
            .ok_or_else(|| Error::InvalidLattice(format!("alpha * beta overflows for {alpha}, {beta}")))?;
        if !area.is_integer() {
            return Err(Error::InvalidLattice(format!(
                "area alpha * beta = {area} is not an integer, so N = {alpha}Z x {beta}Z is not isotropic"
            )));
        }
        let a = *area.numer();
        let spec = Self { alpha, beta, a };
        spec.check_pairings()?;
        Ok(spec)
    }

    pub fn from_integers(alpha: i64, beta: i64) -> Result<Self> {
        Self::new(Rational64::from_integer(alpha), Rational64::from_integer(beta))
    }

    /// Isotropy of `N` and `M`, and that the `N^` generators pair trivially
    /// with `N`, all in exact arithmetic.
    fn check_pairings(&self) -> Result<()> {
        let zero = Rational64::zero();
        let one = Rational64::one();
        let n = [(self.alpha, zero), (zero, self.beta)];
        let m = [(one / self.beta, zero), (zero, self.beta)];
        let perp = [(one / self.beta, zero), (zero, one / self.alpha)];
        let integral = |p, q| symplectic_exact(p, q).map(|r| r.is_integer()).unwrap_or(false);
        if !integral(n[0], n[1]) {
            return Err(Error::InvalidLattice("N is not isotropic".into()));
        }
        if !integral(m[0], m[1]) {
            return Err(Error::InvalidLattice("M is not isotropic".into()));
        }
        for g in &n {
            for w in &perp {
                if !integral(*g, *w) {
                    return Err(Error::InvalidLattice("annihilator generators do not pair trivially with N".into()));
                }
            }
        }
        Ok(())
    }

    pub fn alpha(&self) -> Rational64 {
        self.alpha
    }

    pub fn beta(&self) -> Rational64 {
        self.beta
    }

    /// `area(R^2 / N) = [N^ : M] = [M : N]`.
    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn a_usize(&self) -> usize {
        self.a as usize
    }

    /// Exact coordinates of an annihilator-lattice point.
    pub fn embed_exact(&self, n: NPerpIndex) -> (Rational64, Rational64) {
        (Rational64::from_integer(n.j) / self.beta, Rational64::from_integer(n.k) / self.alpha)
    }

    pub fn embed(&self, n: NPerpIndex) -> PhasePoint {
        PhasePoint::new(n.j as f64 / to_f64(self.beta), n.k as f64 / to_f64(self.alpha))
    }

    /// Exact membership in `N^`.
    pub fn index_of(&self, x: Rational64, y: Rational64) -> Result<NPerpIndex> {
        let not_in = || Error::NotInAnnihilator {
            x: x.to_string(),
            y: y.to_string(),
        };
        let j = x.checked_mul(&self.beta).ok_or_else(not_in)?;
        let k = y.checked_mul(&self.alpha).ok_or_else(not_in)?;
        if !j.is_integer() || !k.is_integer() {
            return Err(not_in());
        }
        Ok(NPerpIndex::new(*j.numer(), *k.numer()))
    }

    /// Snaps a floating-point point to `N^` when it lies within `tol` of it.
    pub fn locate(&self, w: PhasePoint, tol: f64) -> Option<NPerpIndex> {
        let fj = w.x * to_f64(self.beta);
        let fk = w.y * to_f64(self.alpha);
        let (j, k) = (fj.round(), fk.round());
        if (fj - j).abs() <= tol && (fk - k).abs() <= tol && j.abs() < 1e15 && k.abs() < 1e15 {
            Some(NPerpIndex::new(j as i64, k as i64))
        } else {
            None
        }
    }

    pub fn in_m(&self, n: NPerpIndex) -> bool {
        n.k.rem_euclid(self.a) == 0
    }

    pub fn in_n(&self, n: NPerpIndex) -> bool {
        n.j.rem_euclid(self.a) == 0 && n.k.rem_euclid(self.a) == 0
    }

    /// The `a^2` representatives `{(j, k) : 0 <= j, k < a}` of `N^ / N`.
    pub fn s_set(&self) -> Vec<NPerpIndex> {
        let a = self.a;
        (0..a).flat_map(|j| (0..a).map(move |k| NPerpIndex::new(j, k))).collect()
    }

    /// Position of a representative inside [`s_set`](Self::s_set).
    pub fn s_position(&self, n: NPerpIndex) -> Option<usize> {
        (0..self.a).contains(&n.j).then_some(())?;
        (0..self.a).contains(&n.k).then_some(())?;
        Some((n.j * self.a + n.k) as usize)
    }

    /// Splits `n = m + n'` with `m in N` and `n' in S`.
    pub fn reduce_mod_n(&self, n: NPerpIndex) -> (NPerpIndex, NPerpIndex) {
        let rep = NPerpIndex::new(n.j.rem_euclid(self.a), n.k.rem_euclid(self.a));
        (n.sub(rep), rep)
    }

    /// Coset representatives `r_i = (0, i/alpha)` of `N^ / M`, as indices.
    pub fn coset_reps(&self) -> Vec<NPerpIndex> {
        (0..self.a).map(|i| NPerpIndex::new(0, i)).collect()
    }

    /// Numerator of the symplectic form over the fixed denominator `a`.
    pub fn symplectic_numer(&self, n: NPerpIndex, m: NPerpIndex) -> i128 {
        n.j as i128 * m.k as i128 - n.k as i128 * m.j as i128
    }

    /// `psi(n, n')`, exact.
    pub fn psi(&self, n: NPerpIndex, m: NPerpIndex) -> Complex64 {
        exp_pi_i(self.symplectic_numer(n, m), self.a as i128)
    }

    /// `e(n, n')`, exact.
    pub fn pairing(&self, n: NPerpIndex, m: NPerpIndex) -> Complex64 {
        exp_pi_i(2 * self.symplectic_numer(n, m), self.a as i128)
    }

    pub fn multiply(&self, conv: &Conventions, g: &PerpElement, h: &PerpElement) -> PerpElement {
        let phase = if conv.cocycle_phase {
            self.psi(g.index, h.index)
        } else {
            Complex64::new(1.0, 0.0)
        };
        PerpElement::new(g.index.add(h.index), g.z * h.z * phase)
    }

    /// The character on `pi^{-1}(M)`: writing `(x, y) = j m1 + K m2` with
    /// `m1 = (1/beta, 0)`, `m2 = (0, beta)`, `zeta(x, y, z) = z (-1)^{j K}`.
    pub fn zeta_with(&self, conv: &Conventions, h: &PerpElement) -> Result<Complex64> {
        if !self.in_m(h.index) {
            let (x, y) = self.embed_exact(h.index);
            return Err(Error::NotInM {
                x: x.to_string(),
                y: y.to_string(),
            });
        }
        let big_k = h.index.k / self.a;
        let odd = conv.zeta_correction && (h.index.j.rem_euclid(2) == 1) && (big_k.rem_euclid(2) == 1);
        Ok(if odd { -h.z } else { h.z })
    }

    pub fn zeta(&self, h: &PerpElement) -> Result<Complex64> {
        self.zeta_with(&Conventions::default(), h)
    }
}

/// The induced representation `tau = Ind_{pi^{-1}(M)}^{pi^{-1}(N^)} zeta` on `C^a`,
/// realized on functions over the cosets `s(r_i) pi^{-1}(M)`.
#[derive(Debug, Clone)]
pub struct TauRep {
    spec: LatticeSpec,
    conventions: Conventions,
    s_set: Vec<NPerpIndex>,
    cache: Vec<Operator>,
}

impl TauRep {
    pub fn new(spec: LatticeSpec) -> Self {
        Self::with_conventions(spec, Conventions::default())
    }

    pub fn with_conventions(spec: LatticeSpec, conventions: Conventions) -> Self {
        let s_set = spec.s_set();
        let mut rep = Self {
            spec,
            conventions,
            s_set: s_set.clone(),
            cache: Vec::new(),
        };
        rep.cache = s_set.iter().map(|&n| rep.build(&PerpElement::section(n))).collect();
        rep
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn conventions(&self) -> &Conventions {
        &self.conventions
    }

    pub fn a(&self) -> usize {
        self.spec.a_usize()
    }

    pub fn s_set(&self) -> &[NPerpIndex] {
        &self.s_set
    }

    pub fn coset_reps(&self) -> Vec<PhasePoint> {
        self.spec.coset_reps().into_iter().map(|r| self.spec.embed(r)).collect()
    }

    pub fn zeta(&self, h: &PerpElement) -> Result<Complex64> {
        self.spec.zeta_with(&self.conventions, h)
    }

    pub fn multiply(&self, g: &PerpElement, h: &PerpElement) -> PerpElement {
        self.spec.multiply(&self.conventions, g, h)
    }

    /// `tau(h)_{i', i} = zeta(s(r_{i'}) h s(r_i)^{-1})` when that lies over `M`.
    fn build(&self, h: &PerpElement) -> Operator {
        let a = self.a();
        let mut m = DMatrix::<Complex64>::zeros(a, a);
        for ip in 0..a {
            let left = PerpElement::section(NPerpIndex::new(0, ip as i64));
            let lh = self.multiply(&left, h);
            for i in 0..a {
                let right = PerpElement::section(NPerpIndex::new(0, i as i64)).inverse();
                let g = self.multiply(&lh, &right);
                if self.spec.in_m(g.index) {
                    m[(ip, i)] = self.zeta(&g).expect("membership checked");
                }
            }
        }
        Operator::from_parts(Basis::Tau(a), m)
    }

    pub fn tau(&self, h: &PerpElement) -> Operator {
        if h.index == NPerpIndex::ZERO {
            return Operator::identity(Basis::Tau(self.a())).scale(h.z);
        }
        if let Some(pos) = self.spec.s_position(h.index) {
            return self.cache[pos].scale(h.z);
        }
        self.build(h)
    }

    /// `tau(s(n))`, served from the cache for `n in S`.
    pub fn tau_section(&self, n: NPerpIndex) -> Operator {
        match self.spec.s_position(n) {
            Some(pos) => self.cache[pos].clone(),
            None => self.build(&PerpElement::section(n)),
        }
    }

    /// Like [`tau`](Self::tau) but starting from a floating-point element,
    /// which must sit on `N^` to within `1e-9` in lattice units.
    pub fn tau_matrix(&self, g: &GroupElement) -> Result<Operator> {
        let idx = self.spec.locate(g.point, 1e-9).ok_or_else(|| Error::NotInAnnihilator {
            x: g.point.x.to_string(),
            y: g.point.y.to_string(),
        })?;
        Ok(self.tau(&PerpElement::new(idx, g.z)))
    }

    /// `sum_{n in S} tau(s(n)) T tau(s(n))^{-1}`.
    pub fn twirl(&self, t: &Operator) -> Result<Operator> {
        let a = self.a();
        if t.basis() != Basis::Tau(a) {
            return Err(Error::DimensionMismatch {
                expected: a,
                got: t.dim(),
            });
        }
        let mut acc = DMatrix::<Complex64>::zeros(a, a);
        for u in &self.cache {
            // tau is unitary, so the inverse is the adjoint.
            acc += u.matrix() * t.matrix() * u.matrix().adjoint();
        }
        Ok(Operator::from_parts(Basis::Tau(a), acc))
    }

    pub fn trace_tau(&self, n: NPerpIndex) -> Complex64 {
        self.tau_section(n).trace()
    }

    /// Closed form of `tr tau(s(n))`: `zeta(s(n)) a` on `N`, zero elsewhere.
    pub fn trace_expected(&self, n: NPerpIndex) -> Complex64 {
        if self.spec.in_n(n) {
            self.zeta(&PerpElement::section(n)).expect("N lies in M") * self.spec.a as f64
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `<tau(s(n)), tau(s(n'))>`.
    pub fn inner(&self, n: NPerpIndex, m: NPerpIndex) -> Complex64 {
        hs_inner(self.tau_section(n).matrix(), self.tau_section(m).matrix())
    }

    /// Closed form of [`inner`](Self::inner):
    /// `a zeta(psi(n, -n') s(n - n'))` when `n - n' in N`, zero otherwise.
    pub fn inner_expected(&self, n: NPerpIndex, m: NPerpIndex) -> Complex64 {
        let d = n.sub(m);
        if !self.spec.in_n(d) {
            return Complex64::new(0.0, 0.0);
        }
        let h = PerpElement::new(d, self.spec.psi(n, m.neg()));
        self.zeta(&h).expect("N lies in M") * self.spec.a as f64
    }

    /// Gram matrix `<tau(s(n)), tau(s(n'))>` over `S x S` in `s_set` order.
    pub fn tau_gram(&self) -> DMatrix<Complex64> {
        let n = self.cache.len();
        DMatrix::from_fn(n, n, |i, j| hs_inner(self.cache[i].matrix(), self.cache[j].matrix()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{pairing_e, unit};
    use crate::operator::max_abs_diff;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn make_lattice_examples() {
        let l = LatticeSpec::from_integers(2, 1).unwrap();
        assert_eq!(l.a(), 2);
        // N^ = Z x (1/2)Z: its generators pair trivially with N's.
        for w in [l.embed(NPerpIndex::new(1, 0)), l.embed(NPerpIndex::new(0, 1))] {
            assert_eq!(w.x.fract(), 0.0);
            for n in [PhasePoint::new(2.0, 0.0), PhasePoint::new(0.0, 1.0)] {
                assert!((pairing_e(n, w) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
            }
        }
        assert_eq!(l.embed(NPerpIndex::new(0, 1)), PhasePoint::new(0.0, 0.5));
        // M = Z x Z
        assert!(l.in_m(NPerpIndex::new(1, 2)));
        assert!(!l.in_m(NPerpIndex::new(0, 1)));

        let l3 = LatticeSpec::from_integers(3, 1).unwrap();
        assert_eq!(l3.s_set().len(), 9);

        let err = LatticeSpec::new(r(1, 2), r(1, 1)).unwrap_err();
        assert!(err.to_string().contains("not an integer"), "{err}");
        assert!(LatticeSpec::new(r(-1, 1), r(1, 1)).is_err());
        assert!(LatticeSpec::new(r(3, 2), r(4, 3)).is_ok());
    }

    #[test]
    fn exact_membership() {
        let l = LatticeSpec::new(r(3, 2), r(4, 3)).unwrap();
        assert_eq!(l.a(), 2);
        assert_eq!(l.index_of(r(3, 4), r(2, 3)).unwrap(), NPerpIndex::new(1, 1));
        assert!(matches!(l.index_of(r(1, 3), r(0, 1)), Err(Error::NotInAnnihilator { .. })));
        let (m, rep) = l.reduce_mod_n(NPerpIndex::new(-3, 5));
        assert_eq!(rep, NPerpIndex::new(1, 1));
        assert!(l.in_n(m));
    }

    #[test]
    fn zeta_examples() {
        let l = LatticeSpec::from_integers(2, 1).unwrap();
        let z = unit(0.4);
        assert_eq!(l.zeta(&PerpElement::central(z)).unwrap(), z);
        // m1 = (1/beta, 0) -> (1, 0); m2 = (0, beta) -> (0, a)
        assert_eq!(l.zeta(&PerpElement::section(NPerpIndex::new(1, 0))).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(l.zeta(&PerpElement::section(NPerpIndex::new(0, 2))).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(l.zeta(&PerpElement::section(NPerpIndex::new(1, 2))).unwrap(), Complex64::new(-1.0, 0.0));
        assert!(matches!(
            l.zeta(&PerpElement::section(NPerpIndex::new(0, 1))),
            Err(Error::NotInM { .. })
        ));
    }

    #[test]
    fn tau_central_and_n() {
        for a in 2..=4 {
            let rep = TauRep::new(LatticeSpec::from_integers(a, 1).unwrap());
            let z = unit(1.3);
            let t = rep.tau(&PerpElement::central(z));
            assert!(max_abs_diff(t.matrix(), &(DMatrix::identity(a as usize, a as usize) * z)) < 1e-15);
            for n in [NPerpIndex::new(a, 0), NPerpIndex::new(0, a), NPerpIndex::new(a, -a), NPerpIndex::new(3 * a, a)] {
                let zeta = rep.zeta(&PerpElement::section(n)).unwrap();
                let expected = DMatrix::identity(a as usize, a as usize) * zeta;
                assert!(max_abs_diff(rep.tau_section(n).matrix(), &expected) < 1e-12, "a={a} n={n:?}");
            }
        }
    }

    #[test]
    fn tau_matrix_rejects_off_lattice() {
        let rep = TauRep::new(LatticeSpec::from_integers(2, 1).unwrap());
        assert!(rep.tau_matrix(&GroupElement::new(0.3, 0.0, Complex64::new(1.0, 0.0))).is_err());
        let t = rep.tau_matrix(&GroupElement::new(1.0, 0.5, Complex64::new(1.0, 0.0))).unwrap();
        assert!(max_abs_diff(t.matrix(), rep.tau_section(NPerpIndex::new(1, 1)).matrix()) < 1e-15);
    }

    #[test]
    fn monomial_and_unitary() {
        let rep = TauRep::new(LatticeSpec::from_integers(5, 1).unwrap());
        for n in rep.s_set() {
            let t = rep.tau_section(*n);
            for col in 0..5 {
                let nz = t.matrix().column(col).iter().filter(|z| z.norm() > 0.5).count();
                assert_eq!(nz, 1);
            }
            let u = t.matrix() * t.matrix().adjoint();
            assert!(max_abs_diff(&u, &DMatrix::identity(5, 5)) < 1e-12);
        }
    }

    #[test]
    fn twirl_examples() {
        for a in 2..=4usize {
            let rep = TauRep::new(LatticeSpec::from_integers(a as i64, 1).unwrap());
            let id = Operator::identity(Basis::Tau(a));
            let tw = rep.twirl(&id).unwrap();
            let expected = DMatrix::<Complex64>::identity(a, a) * Complex64::new((a * a) as f64, 0.0);
            assert!(max_abs_diff(tw.matrix(), &expected) < 1e-12);
            let mut e00 = DMatrix::<Complex64>::zeros(a, a);
            e00[(0, 0)] = Complex64::new(1.0, 0.0);
            // direct summation oracle for E00
            let mut oracle = DMatrix::<Complex64>::zeros(a, a);
            for n in rep.s_set() {
                let u = rep.tau_section(*n);
                let inv = u.matrix().clone().try_inverse().unwrap();
                oracle += u.matrix() * &e00 * inv;
            }
            let tw = rep.twirl(&Operator::new(Basis::Tau(a), e00).unwrap()).unwrap();
            assert!(max_abs_diff(tw.matrix(), &oracle) < 1e-12);
            assert!(max_abs_diff(tw.matrix(), &(DMatrix::identity(a, a) * Complex64::new(a as f64, 0.0))) < 1e-12);
        }
        let rep = TauRep::new(LatticeSpec::from_integers(2, 1).unwrap());
        assert!(rep.twirl(&Operator::identity(Basis::Tau(3))).is_err());
    }

    #[test]
    fn trace_dichotomy() {
        for a in 2..=5 {
            let rep = TauRep::new(LatticeSpec::from_integers(a, 1).unwrap());
            assert!((rep.trace_tau(NPerpIndex::ZERO) - Complex64::new(a as f64, 0.0)).norm() < 1e-12);
            for n in rep.s_set().iter().skip(1) {
                assert!(rep.trace_tau(*n).norm() < 1e-10 * a as f64);
            }
            for n in [NPerpIndex::new(a, a), NPerpIndex::new(-a, 3 * a), NPerpIndex::new(a, 0)] {
                assert!((rep.trace_tau(n) - rep.trace_expected(n)).norm() < 1e-10 * a as f64);
            }
            // j and K both odd: the character is -1 there.
            let n = NPerpIndex::new(a, a);
            if a % 2 == 1 {
                assert!((rep.trace_tau(n) + Complex64::new(a as f64, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn gram_is_a_identity() {
        for a in 2..=5 {
            let rep = TauRep::new(LatticeSpec::from_integers(a, 1).unwrap());
            let g = rep.tau_gram();
            let n = (a * a) as usize;
            assert!(max_abs_diff(&g, &(DMatrix::identity(n, n) * Complex64::new(a as f64, 0.0))) < 1e-10);
        }
    }

    #[test]
    fn shifted_gram_entries() {
        let rep = TauRep::new(LatticeSpec::from_integers(3, 1).unwrap());
        let s = rep.s_set().to_vec();
        for n in &s {
            for shift in [NPerpIndex::new(3, 0), NPerpIndex::new(0, 3), NPerpIndex::new(3, -6)] {
                let m = n.add(shift);
                let direct = rep.inner(*n, m);
                assert!((direct - rep.inner_expected(*n, m)).norm() < 1e-10);
                assert!((direct.norm() - 3.0).abs() < 1e-10);
            }
        }
    }

    proptest! {
        // Brute force: multiply as floating-point Heisenberg elements, snap
        // back to M, and compare characters.
        #[test]
        fn zeta_is_multiplicative(
            a in 2i64..6,
            j1 in -6i64..6, k1 in -3i64..3, t1 in 0.0f64..6.3,
            j2 in -6i64..6, k2 in -3i64..3, t2 in 0.0f64..6.3,
        ) {
            let l = LatticeSpec::from_integers(a, 1).unwrap();
            let h1 = PerpElement::new(NPerpIndex::new(j1, a * k1), unit(t1));
            let h2 = PerpElement::new(NPerpIndex::new(j2, a * k2), unit(t2));
            let g1 = GroupElement { point: l.embed(h1.index), z: h1.z };
            let g2 = GroupElement { point: l.embed(h2.index), z: h2.z };
            let g = g1 * g2;
            let idx = l.locate(g.point, 1e-9).unwrap();
            let lhs = l.zeta(&PerpElement::new(idx, g.z)).unwrap();
            let rhs = l.zeta(&h1).unwrap() * l.zeta(&h2).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn projective_law(a in 2i64..6, j1 in 0i64..5, k1 in 0i64..5, j2 in 0i64..5, k2 in 0i64..5) {
            let rep = TauRep::new(LatticeSpec::from_integers(a, 1).unwrap());
            let n = NPerpIndex::new(j1 % a, k1 % a);
            let m = NPerpIndex::new(j2 % a, k2 % a);
            let lhs = rep.tau_section(n).compose(&rep.tau_section(m)).unwrap();
            let rhs = rep.tau_section(n.add(m)).scale(rep.spec().psi(n, m));
            prop_assert!(max_abs_diff(lhs.matrix(), rhs.matrix()) < 1e-12);
            // conjugation: tau(s(n)) tau(s(m)) tau(s(n))^{-1} = e(n, m) tau(s(m))
            let tn = rep.tau_section(n);
            let conj = tn.compose(&rep.tau_section(m)).unwrap().compose(&tn.adjoint()).unwrap();
            let expected = rep.tau_section(m).scale(rep.spec().pairing(n, m));
            prop_assert!(max_abs_diff(conj.matrix(), expected.matrix()) < 1e-12);
        }
    }

    #[test]
    fn mutations_break_the_character() {
        let l = LatticeSpec::from_integers(2, 1).unwrap();
        let h1 = PerpElement::section(NPerpIndex::new(1, 0));
        let h2 = PerpElement::section(NPerpIndex::new(0, 2));
        for conv in [Conventions::without_zeta_correction(), Conventions::without_cocycle()] {
            let g = conv.group_multiply(
                &GroupElement { point: l.embed(h1.index), z: h1.z },
                &GroupElement { point: l.embed(h2.index), z: h2.z },
            );
            let idx = l.locate(g.point, 1e-9).unwrap();
            let lhs = l.zeta_with(&conv, &PerpElement::new(idx, g.z)).unwrap();
            let rhs = l.zeta_with(&conv, &h1).unwrap() * l.zeta_with(&conv, &h2).unwrap();
            assert!((lhs - rhs).norm() > 1.0);
        }
    }
}
