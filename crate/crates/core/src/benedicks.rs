//! Finite-resolution version of the support argument.
//!
//! For a finite-rank `X` and a lattice with `a > rank(X)`, the field
//! `F = F_{X_N^v}` has pointwise rank at most `rank(X)`, while any nonzero
//! finite sum `sum c_n Xi_n` has full rank `a` off a null set. So the
//! reconstruction from the coefficients on `N_v` can never be exact unless
//! everything vanishes. No finite computation can show `X = 0`; the pipeline
//! instead measures how far the truncated expansion is from `F` and how
//! rarely the expansion drops rank.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heisenberg::PhasePoint;
use crate::induced::{expand, f_y, fw_coefficients, zak, zak_truncation, CovariantOperatorField, OmegaGrid};
use crate::lattice::{LatticeSpec, NPerpIndex, TauRep};
use crate::operator::{Basis, Operator};
use crate::rational::to_f64;
use crate::schrodinger::{fourier_wigner_grid, translate_op, GridFunction2D, HermiteBasis};

/// Relative singular-value threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;
/// Absolute smallest-singular-value threshold of the rank scan.
pub const SINGULAR_TOL: f64 = 1e-8;

/// Cells of an `alpha` grid with `|alpha| > epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    pub epsilon: f64,
    pub measure: f64,
    pub cell_count: usize,
    /// `(x_min, x_max, y_min, y_max)` of the sampled window.
    pub window: (f64, f64, f64, f64),
    mask: Vec<bool>,
    template: GridFunction2D,
}

impl SupportReport {
    pub fn contains_cell(&self, p: usize, q: usize) -> bool {
        self.mask[p * self.template.ny() + q]
    }

    /// Whether `w` lies in a cell of the superlevel set.
    pub fn contains(&self, w: PhasePoint) -> bool {
        self.template.cell_of(w).is_some_and(|(p, q)| self.contains_cell(p, q))
    }

    pub fn is_empty(&self) -> bool {
        self.cell_count == 0
    }
}

pub fn superlevel_measure(alpha: &GridFunction2D, epsilon: f64) -> Result<SupportReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let mask: Vec<bool> = alpha.samples().iter().map(|z| z.norm() > epsilon).collect();
    let cell_count = mask.iter().filter(|&&b| b).count();
    let (hx, hy) = (alpha.dx() / 2.0, alpha.dy() / 2.0);
    let window = (
        alpha.x(0) - hx,
        alpha.x(alpha.nx() - 1) + hx,
        alpha.y(0) - hy,
        alpha.y(alpha.ny() - 1) + hy,
    );
    Ok(SupportReport {
        epsilon,
        measure: cell_count as f64 * alpha.cell_area(),
        cell_count,
        window,
        mask,
        template: alpha.with_samples(vec![Complex64::new(0.0, 0.0); alpha.samples().len()])?,
    })
}

/// `N_v = {n in N^ : n + v in B_eps}` among indices with `|j|, |k| < bound`.
pub fn nv_set(support: &SupportReport, v: PhasePoint, spec: &LatticeSpec, bound: i64) -> Vec<NPerpIndex> {
    if support.is_empty() {
        return Vec::new();
    }
    let (x0, x1, y0, y1) = support.window;
    let (beta, alpha) = (to_f64(spec.beta()), to_f64(spec.alpha()));
    // lattice points whose translate can fall in the window
    let jr = (((x0 - v.x) * beta).floor() as i64, ((x1 - v.x) * beta).ceil() as i64);
    let kr = (((y0 - v.y) * alpha).floor() as i64, ((y1 - v.y) * alpha).ceil() as i64);
    let mut out = Vec::new();
    for j in jr.0.max(1 - bound)..=jr.1.min(bound - 1) {
        for k in kr.0.max(1 - bound)..=kr.1.min(bound - 1) {
            let n = NPerpIndex::new(j, k);
            if support.contains(spec.embed(n) + v) {
                out.push(n);
            }
        }
    }
    out
}

/// Fraction of grid points where `sum c_n Xi_n` has smallest singular
/// value below `tol`.
pub fn rank_dichotomy_scan(
    coeffs: &BTreeMap<NPerpIndex, Complex64>,
    rep: &TauRep,
    grid: &OmegaGrid,
    tol: f64,
) -> Result<f64> {
    if coeffs.values().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidArgument("coefficients must be finite".into()));
    }
    Ok(expand(coeffs, grid, rep)?.singular_fraction(tol))
}

/// One `(v, epsilon)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub rank: usize,
    pub a: i64,
    pub v: PhasePoint,
    pub epsilon: f64,
    pub nv: Vec<NPerpIndex>,
    pub support_measure: f64,
    pub residual_rel: f64,
    /// Fraction of grid points where the reconstruction is singular.
    pub min_sv_fraction: f64,
    /// Largest pointwise rank of `F`.
    pub field_max_rank: usize,
    pub zero_operator: bool,
}

impl PipelineReport {
    pub fn nv_size(&self) -> usize {
        self.nv.len()
    }
}

pub const REPORT_HEADER: &str = "rank,a,vx,vy,epsilon,nv_size,support_measure,residual_rel,min_sv_fraction";

pub fn reports_to_csv(reports: &[PipelineReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.rank,
            r.a,
            r.v.x,
            r.v.y,
            r.epsilon,
            r.nv_size(),
            r.support_measure,
            r.residual_rel,
            r.min_sv_fraction
        );
    }
    out
}

/// Numerical resources of a pipeline run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineParams {
    /// Hermite truncation.
    pub dim: usize,
    /// Omega grid points per axis.
    pub g: usize,
    /// Zak truncation; `None` uses the tail rule.
    pub j: Option<i64>,
    /// `alpha(X)` is sampled on `[-L, L]^2`.
    pub half_width: f64,
    /// Cells per axis of that window.
    pub cells: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            dim: 64,
            g: 64,
            j: None,
            half_width: 4.0,
            cells: 128,
        }
    }
}

/// `X` together with everything that does not depend on `(v, epsilon)`.
pub struct Pipeline {
    x: Operator,
    rank: usize,
    basis: HermiteBasis,
    rep: TauRep,
    grid: OmegaGrid,
    j: i64,
    alpha: GridFunction2D,
}

impl Pipeline {
    pub fn new(x: Operator, spec: LatticeSpec, params: PipelineParams) -> Result<Self> {
        let basis = HermiteBasis::with_dim(params.dim)?;
        if x.basis() != Basis::Hermite(params.dim) {
            return Err(Error::DimensionMismatch {
                expected: params.dim,
                got: x.dim(),
            });
        }
        let rank = x.numerical_rank(RANK_TOL);
        if rank as i64 >= spec.a() && rank > 0 {
            return Err(Error::RankTooLarge { rank, a: spec.a() });
        }
        let grid = OmegaGrid::new(spec, params.g)?;
        let j = params.j.unwrap_or_else(|| zak_truncation(params.dim, to_f64(spec.beta())));
        let template = GridFunction2D::centered_window(params.half_width, params.cells)?;
        let alpha = fourier_wigner_grid(&x, &template, &basis)?;
        Ok(Self {
            x,
            rank,
            basis,
            rep: TauRep::new(spec),
            grid,
            j,
            alpha,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alpha(&self) -> &GridFunction2D {
        &self.alpha
    }

    pub fn grid(&self) -> &OmegaGrid {
        &self.grid
    }

    pub fn rep(&self) -> &TauRep {
        &self.rep
    }

    pub fn zak_truncation(&self) -> i64 {
        self.j
    }

    /// `F_{X_N^v}` through a rank decomposition of `X^v`. `None` for `X = 0`.
    pub fn field(&self, v: PhasePoint) -> Result<Option<CovariantOperatorField>> {
        if self.rank == 0 {
            return Ok(None);
        }
        let xv = translate_op(&self.x, v, &self.basis)?;
        let pairs = xv.rank_decomposition(RANK_TOL);
        let mut phis = Vec::with_capacity(pairs.len());
        let mut psis = Vec::with_capacity(pairs.len());
        for (phi, psi) in &pairs {
            phis.push(zak(phi, &self.grid, self.j)?);
            psis.push(zak(psi, &self.grid, self.j)?);
        }
        f_y(&phis, &psis).map(Some)
    }

    /// Runs every `epsilon` for one `v`, sharing the field computation.
    pub fn run_v(&self, v: PhasePoint, epsilons: &[f64]) -> Result<Vec<PipelineReport>> {
        let field = self.field(v)?;
        let f_norm = field.as_ref().map_or(0.0, |f| f.l2_norm());
        let field_max_rank = field.as_ref().map_or(0, |f| f.max_rank(RANK_TOL));
        let bound = self.grid.index_bound();
        let mut out = Vec::with_capacity(epsilons.len());
        for &eps in epsilons {
            let support = superlevel_measure(&self.alpha, eps)?;
            let nv = nv_set(&support, v, self.grid.spec(), bound);
            let (residual_rel, min_sv_fraction) = match &field {
                None => (0.0, 1.0),
                Some(f) => {
                    let coeffs = fw_coefficients(f, &nv, &self.rep)?;
                    let fhat = expand(&coeffs, &self.grid, &self.rep)?;
                    let res = f.sub(&fhat)?.l2_norm();
                    let rel = if f_norm > 0.0 { res / f_norm } else { 0.0 };
                    (rel, fhat.singular_fraction(SINGULAR_TOL))
                }
            };
            out.push(PipelineReport {
                rank: self.rank,
                a: self.grid.spec().a(),
                v,
                epsilon: eps,
                nv,
                support_measure: support.measure,
                residual_rel,
                min_sv_fraction,
                field_max_rank,
                zero_operator: field.is_none(),
            });
        }
        Ok(out)
    }

    /// All `(v, epsilon)` pairs, ordered by `v` then `epsilon` as given.
    pub fn run(&self, vs: &[PhasePoint], epsilons: &[f64]) -> Result<Vec<PipelineReport>> {
        let per_v: Vec<Result<Vec<PipelineReport>>> = vs.par_iter().map(|&v| self.run_v(v, epsilons)).collect();
        let mut out = Vec::with_capacity(vs.len() * epsilons.len());
        for r in per_v {
            out.extend(r?);
        }
        Ok(out)
    }
}

/// `n x n` sub-grid `(i / (n beta), k / (n alpha))` of the fundamental domain.
pub fn v_samples(spec: &LatticeSpec, n: usize) -> Vec<PhasePoint> {
    let (beta, alpha) = (to_f64(spec.beta()), to_f64(spec.alpha()));
    let nf = n as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |k| PhasePoint::new(i as f64 / (nf * beta), k as f64 / (nf * alpha))))
        .collect()
}

/// Orthogonal projector onto `span(h_0, ..., h_{r-1})`.
pub fn hermite_projector(dim: usize, r: usize) -> Result<Operator> {
    if r > dim {
        return Err(Error::HermiteIndex { k: r, dim });
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j && i < r {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Operator::new(Basis::Hermite(dim), m)
}
