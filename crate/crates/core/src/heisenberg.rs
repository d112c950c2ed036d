//! The three-dimensional Heisenberg group `G = R^2 x U(1)`.
//!
//! Elements are triples `(x, y, z)` with `|z| = 1` and product
//!
//! ```text
//! (x, y, z)(x', y', z') = (x + x', y + y', z z' exp(pi i (x y' - y x')))
//! ```
//!
//! The section `s(w) = (w, 1)` fails to be a homomorphism by the central
//! cocycle `psi`, and commutators are measured by the pairing `e = psi^2`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// A point `w = (x, y)` of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Standard symplectic form `x y' - y x'`.
    pub fn symplectic(&self, other: &PhasePoint) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, rhs: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for PhasePoint {
    type Output = PhasePoint;
    fn neg(self) -> PhasePoint {
        PhasePoint::new(-self.x, -self.y)
    }
}

/// `exp(i theta)`.
#[inline]
pub fn unit(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// Rescales a nonzero complex number onto the unit circle.
#[inline]
pub fn renormalize(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        z
    } else {
        z / r
    }
}

/// An element `(x, y, z)` of the Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub point: PhasePoint,
    /// Central phase, kept on the unit circle.
    pub z: Complex64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        point: PhasePoint::ORIGIN,
        z: Complex64 { re: 1.0, im: 0.0 },
    };

    pub fn new(x: f64, y: f64, z: Complex64) -> Self {
        Self {
            point: PhasePoint::new(x, y),
            z: renormalize(z),
        }
    }

    /// The central element `(0, 0, z)`.
    pub fn central(z: Complex64) -> Self {
        Self::new(0.0, 0.0, z)
    }

    pub fn multiply(&self, other: &GroupElement) -> GroupElement {
        let p = self.point;
        let q = other.point;
        let z = self.z * other.z * unit(PI * p.symplectic(&q));
        GroupElement {
            point: p + q,
            z: renormalize(z),
        }
    }

    /// `(x, y, z)^{-1} = (-x, -y, conj z)`; the cocycle vanishes on `(w, -w)`.
    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            point: -self.point,
            z: self.z.conj(),
        }
    }

    pub fn projection(&self) -> PhasePoint {
        self.point
    }

    /// Component-wise distance, used for associativity checks.
    pub fn distance(&self, other: &GroupElement) -> f64 {
        (self.point.x - other.point.x)
            .abs()
            .max((self.point.y - other.point.y).abs())
            .max((self.z - other.z).norm())
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: GroupElement) -> GroupElement {
        self.multiply(&rhs)
    }
}

/// `s(w) = (w, 1)`.
pub fn section(w: PhasePoint) -> GroupElement {
    GroupElement {
        point: w,
        z: Complex64::new(1.0, 0.0),
    }
}

/// `pi(x, y, z) = (x, y)`.
pub fn projection(g: &GroupElement) -> PhasePoint {
    g.point
}

/// Central phase of `psi(w, w') = s(w) s(w') s(w + w')^{-1}`.
pub fn cocycle_psi(w: PhasePoint, w2: PhasePoint) -> Complex64 {
    unit(PI * w.symplectic(&w2))
}

/// The alternating bicharacter `e(w, w') = exp(2 pi i (x y' - y x'))`.
pub fn pairing_e(w: PhasePoint, w2: PhasePoint) -> Complex64 {
    unit(2.0 * PI * w.symplectic(&w2))
}

/// `g g' g^{-1} g'^{-1}`.
pub fn commutator(g: &GroupElement, h: &GroupElement) -> GroupElement {
    g.multiply(h)
        .multiply(&g.inverse())
        .multiply(&h.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn arb_point() -> impl Strategy<Value = PhasePoint> {
        (-5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y)| PhasePoint::new(x, y))
    }

    fn arb_element() -> impl Strategy<Value = GroupElement> {
        (arb_point(), 0.0f64..(2.0 * PI)).prop_map(|(p, t)| GroupElement {
            point: p,
            z: unit(t),
        })
    }

    #[test]
    fn basic_product() {
        let g = GroupElement::new(1.0, 0.0, c(1.0, 0.0));
        let h = GroupElement::new(0.0, 1.0, c(1.0, 0.0));
        let gh = g * h;
        assert_eq!(gh.point, PhasePoint::new(1.0, 1.0));
        assert!((gh.z - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_cases() {
        let g = GroupElement::new(0.3, -1.2, unit(0.7));
        assert!(g.multiply(&GroupElement::IDENTITY).distance(&g) < 1e-15);
        assert_eq!(GroupElement::IDENTITY.inverse(), GroupElement::IDENTITY);
        assert_eq!(section(PhasePoint::ORIGIN), GroupElement::IDENTITY);
        let h = GroupElement::new(3.0, 4.0, c(0.0, 1.0));
        assert_eq!(projection(&h), PhasePoint::new(3.0, 4.0));
    }

    #[test]
    fn psi_and_e_values() {
        let ex = PhasePoint::new(1.0, 0.0);
        let ey = PhasePoint::new(0.0, 1.0);
        assert!((cocycle_psi(ex, ey) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((pairing_e(ex, ey) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((pairing_e(PhasePoint::new(0.5, 0.0), ey) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn associativity(g in arb_element(), h in arb_element(), k in arb_element()) {
            let lhs = (g * h) * k;
            let rhs = g * (h * k);
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
        }

        #[test]
        fn inverse_is_two_sided(g in arb_element()) {
            prop_assert!((g * g.inverse()).distance(&GroupElement::IDENTITY) <= 1e-12);
            prop_assert!((g.inverse() * g).distance(&GroupElement::IDENTITY) <= 1e-12);
            prop_assert!(g.inverse().inverse().distance(&g) <= 1e-15);
        }

        #[test]
        fn commutator_is_pairing(g in arb_element(), h in arb_element()) {
            let comm = commutator(&g, &h);
            let expected = GroupElement::central(pairing_e(g.point, h.point));
            prop_assert!(comm.distance(&expected) <= 1e-12);
        }

        #[test]
        fn center_commutes(t in 0.0f64..6.3, g in arb_element()) {
            let z = GroupElement::central(unit(t));
            prop_assert!((z * g).distance(&(g * z)) <= 1e-12);
        }

        #[test]
        fn section_cocycle(w in arb_point(), v in arb_point()) {
            let lhs = section(w) * section(v);
            let rhs = GroupElement::central(cocycle_psi(w, v)) * section(w + v);
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
            prop_assert_eq!(projection(&section(w)), w);
        }

        #[test]
        fn pairing_properties(w in arb_point(), v in arb_point(), u in arb_point()) {
            prop_assert!((pairing_e(w, w) - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
            prop_assert!((pairing_e(w, v) * pairing_e(v, w) - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
            prop_assert!((cocycle_psi(w, v).powi(2) - pairing_e(w, v)).norm() <= 1e-12);
            let lin = pairing_e(w + u, v) - pairing_e(w, v) * pairing_e(u, v);
            prop_assert!(lin.norm() <= 1e-12);
            prop_assert!((cocycle_psi(w, w) - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        }
    }
}
