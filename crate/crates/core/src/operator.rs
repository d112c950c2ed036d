//! Dense complex operators tagged with the space they act on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Which finite-dimensional space an [`Operator`] acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// `span(h_0, ..., h_{D-1})` inside `L^2(R)`.
    Hermite(usize),
    /// The `a`-dimensional space of the finite induced representation.
    Tau(usize),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Hermite(d) | Basis::Tau(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    basis: Basis,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(basis: Basis, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("operator has non-finite entries".into()));
        }
        Ok(Self { basis, matrix })
    }

    pub(crate) fn from_parts(basis: Basis, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), basis.dim());
        Self { basis, matrix }
    }

    pub fn zeros(basis: Basis) -> Self {
        let d = basis.dim();
        Self::from_parts(basis, DMatrix::zeros(d, d))
    }

    pub fn identity(basis: Basis) -> Self {
        let d = basis.dim();
        Self::from_parts(basis, DMatrix::identity(d, d))
    }

    /// `phi (x) conj(psi)`, i.e. the matrix `phi psi^*`.
    pub fn rank_one(basis: Basis, phi: &DVector<Complex64>, psi: &DVector<Complex64>) -> Result<Self> {
        let d = basis.dim();
        for v in [phi, psi] {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        Ok(Self::from_parts(basis, phi * psi.adjoint()))
    }

    /// Orthogonal projector onto the first `r` basis vectors.
    pub fn coordinate_projector(basis: Basis, r: usize) -> Self {
        let d = basis.dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..r.min(d) {
            m[(k, k)] = Complex64::new(1.0, 0.0);
        }
        Self::from_parts(basis, m)
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.basis, self.matrix.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_parts(self.basis, &self.matrix * c)
    }

    fn check_same(&self, other: &Operator) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    pub fn compose(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_parts(self.basis, &self.matrix * &other.matrix))
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_parts(self.basis, &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_parts(self.basis, &self.matrix - &other.matrix))
    }

    /// `<A, B> = tr(A B^*)`.
    pub fn hs_inner(&self, other: &Operator) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(hs_inner(&self.matrix, &other.matrix))
    }

    pub fn hs_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.matrix)
    }

    /// Number of singular values above `rel_tol * sigma_max`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        numerical_rank(&self.matrix, rel_tol)
    }

    /// Factors the operator as `sum_i phi_i psi_i^*` with `phi_i = sigma_i u_i`
    /// and orthonormal `psi_i`, keeping singular values above
    /// `rel_tol * sigma_max`.
    pub fn rank_decomposition(&self, rel_tol: f64) -> Vec<(DVector<Complex64>, DVector<Complex64>)> {
        let svd = self.matrix.clone().svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Vec::new(),
        };
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        if smax == 0.0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s > rel_tol * smax {
                let phi = u.column(i) * Complex64::new(s, 0.0);
                let psi = v_t.row(i).adjoint();
                out.push((phi.into_owned(), psi.into_owned()));
            }
        }
        out
    }
}

pub fn hs_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

pub fn numerical_rank(m: &DMatrix<Complex64>, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
