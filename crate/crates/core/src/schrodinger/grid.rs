//! Uniformly sampled phase-plane functions.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heisenberg::PhasePoint;

/// Samples `f(origin + (p dx, q dy))`, `0 <= p < nx`, `0 <= q < ny`.
///
/// Each sample stands for the cell of size `dx x dy` centred on it, which
/// is what the midpoint-rule Weyl transform and support counting assume.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    origin: PhasePoint,
    dx: f64,
    dy: f64,
    nx: usize,
    ny: usize,
    samples: Vec<Complex64>,
}

impl GridFunction2D {
    pub fn new(origin: PhasePoint, dx: f64, dy: f64, nx: usize, ny: usize, samples: Vec<Complex64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("grid must have at least one sample per axis".into()));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid spacing must be positive, got ({dx}, {dy})")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidArgument("grid origin must be finite".into()));
        }
        if samples.len() != nx * ny {
            return Err(Error::DimensionMismatch {
                expected: nx * ny,
                got: samples.len(),
            });
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("grid samples must be finite".into()));
        }
        Ok(Self {
            origin,
            dx,
            dy,
            nx,
            ny,
            samples,
        })
    }

    /// `n x n` cells tiling `[-half_width, half_width]^2`, sampled at cell centres.
    pub fn centered_window(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || n == 0 {
            return Err(Error::InvalidArgument("window needs positive half-width and size".into()));
        }
        let d = 2.0 * half_width / n as f64;
        let o = -half_width + 0.5 * d;
        Self::new(PhasePoint::new(o, o), d, d, n, n, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn from_fn(mut self, f: impl Fn(PhasePoint) -> Complex64) -> Self {
        for p in 0..self.nx {
            for q in 0..self.ny {
                let w = self.point(p, q);
                self.samples[p * self.ny + q] = f(w);
            }
        }
        self
    }

    /// Same geometry, new samples.
    pub fn with_samples(&self, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(self.origin, self.dx, self.dy, self.nx, self.ny, samples)
    }

    pub fn origin(&self) -> PhasePoint {
        self.origin
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn dy(&self) -> f64 {
        self.dy
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn x(&self, p: usize) -> f64 {
        self.origin.x + p as f64 * self.dx
    }

    pub fn y(&self, q: usize) -> f64 {
        self.origin.y + q as f64 * self.dy
    }

    pub fn point(&self, p: usize, q: usize) -> PhasePoint {
        PhasePoint::new(self.x(p), self.y(q))
    }

    pub fn get(&self, p: usize, q: usize) -> Complex64 {
        self.samples[p * self.ny + q]
    }

    /// Index of the cell containing `w`, if inside the sampled window.
    pub fn cell_of(&self, w: PhasePoint) -> Option<(usize, usize)> {
        let fp = ((w.x - self.origin.x) / self.dx + 0.5).floor();
        let fq = ((w.y - self.origin.y) / self.dy + 0.5).floor();
        if !(fp >= 0.0 && fq >= 0.0) {
            return None;
        }
        let (p, q) = (fp as usize, fq as usize);
        (p < self.nx && q < self.ny).then_some((p, q))
    }

    /// Discrete `L^2` norm, `sqrt(sum |f|^2 dx dy)`.
    pub fn l2_norm(&self) -> f64 {
        (self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_area()).sqrt()
    }

    /// Discrete `L^2` distance to a grid of the same shape.
    pub fn l2_distance(&self, other: &GridFunction2D) -> Result<f64> {
        if self.nx != other.nx || self.ny != other.ny {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.cell_area()).sqrt())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Header `x,y,re,im`, one row per sample, `p` outer and `q` inner.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,re,im\n");
        for p in 0..self.nx {
            for q in 0..self.ny {
                let z = self.get(p, q);
                let _ = writeln!(out, "{},{},{},{}", self.x(p), self.y(q), z.re, z.im);
            }
        }
        out
    }

    /// Inverse of [`to_csv`](Self::to_csv). Geometry is recovered from the
    /// coordinates, which must form a uniform grid with at least two
    /// samples per axis.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "x,y,re,im" => {}
            Some((i, _)) => {
                return Err(Error::Csv {
                    line: i + 1,
                    msg: "expected header x,y,re,im".into(),
                })
            }
            None => {
                return Err(Error::Csv {
                    line: 0,
                    msg: "empty input".into(),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 4 {
                return Err(Error::Csv {
                    line: i + 1,
                    msg: format!("expected 4 fields, got {}", fields.len()),
                });
            }
            let mut vals = [0.0; 4];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f.parse::<f64>().map_err(|e| Error::Csv {
                    line: i + 1,
                    msg: format!("{f:?}: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Csv {
                        line: i + 1,
                        msg: "non-finite value".into(),
                    });
                }
            }
            rows.push((i + 1, vals));
        }
        if rows.len() < 4 {
            return Err(Error::Csv {
                line: 0,
                msg: "need at least two samples per axis".into(),
            });
        }
        let x0 = rows[0].1[0];
        let ny = rows.iter().take_while(|r| r.1[0] == x0).count();
        if ny < 2 || rows.len() % ny != 0 || rows.len() / ny < 2 {
            return Err(Error::Csv {
                line: 0,
                msg: "rows do not form a rectangular grid with two samples per axis".into(),
            });
        }
        let nx = rows.len() / ny;
        let origin = PhasePoint::new(x0, rows[0].1[1]);
        let dy = rows[1].1[1] - origin.y;
        let dx = rows[ny].1[0] - origin.x;
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(Error::Csv {
                line: rows[1].0,
                msg: "coordinates must increase".into(),
            });
        }
        let mut samples = Vec::with_capacity(rows.len());
        for (idx, (line, v)) in rows.iter().enumerate() {
            let (p, q) = (idx / ny, idx % ny);
            let ex = origin.x + p as f64 * dx;
            let ey = origin.y + q as f64 * dy;
            if (v[0] - ex).abs() > 1e-6 * dx || (v[1] - ey).abs() > 1e-6 * dy {
                return Err(Error::Csv {
                    line: *line,
                    msg: format!("coordinate ({}, {}) off the uniform grid", v[0], v[1]),
                });
            }
            samples.push(Complex64::new(v[2], v[3]));
        }
        Self::new(origin, dx, dy, nx, ny, samples)
    }
}
