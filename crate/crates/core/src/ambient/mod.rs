//! Geometry of the ambient space `M(kappa, tau)`.
//!
//! The space is the chart `{(x, y, z) : 1 + kappa/4 (x^2 + y^2) > 0}` with the
//! metric
//!
//! ```text
//! ds^2 = (dx^2 + dy^2) / w^2 + (dz + tau (y dx - x dy) / w)^2,   w = 1 + kappa/4 (x^2 + y^2).
//! ```
//!
//! `kappa = 0, tau != 0` is the Heisenberg group `Nil3`. Everything here is
//! expressed in the orthonormal frame
//!
//! ```text
//! e1 = w d/dx - tau y d/dz,   e2 = w d/dy + tau x d/dz,   e3 = d/dz,
//! ```
//!
//! and [`oracle`] recomputes connection, brackets and curvature from the
//! metric alone by finite differences.

pub mod oracle;

use crate::linalg::{abs, CoordVector, Mat3, TangentVector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientParams {
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AmbientPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl AmbientPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    /// Translates by `t * v` in coordinates.
    pub fn offset(self, v: CoordVector, t: f64) -> Self {
        Self::new(self.x + t * v[0], self.y + t * v[1], self.z + t * v[2])
    }

    pub fn distance(&self, o: &Self) -> f64 {
        let (dx, dy, dz) = (self.x - o.x, self.y - o.y, self.z - o.z);
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }
}

/// Coordinate-basis Gram matrix of the metric at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricMatrix(pub Mat3);

impl MetricMatrix {
    pub fn inner(&self, a: CoordVector, b: CoordVector) -> f64 {
        let g = &self.0;
        (0..3).map(|i| (0..3).map(|j| a[i] * g[i][j] * b[j]).sum::<f64>()).sum()
    }
}

/// Index of a frame vector `e1`, `e2`, `e3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameIndex {
    E1,
    E2,
    E3,
}

impl FrameIndex {
    pub const ALL: [FrameIndex; 3] = [FrameIndex::E1, FrameIndex::E2, FrameIndex::E3];

    /// Zero-based position.
    pub const fn slot(self) -> usize {
        match self {
            FrameIndex::E1 => 0,
            FrameIndex::E2 => 1,
            FrameIndex::E3 => 2,
        }
    }

    pub fn unit(self) -> TangentVector {
        let mut c = [0.0; 3];
        c[self.slot()] = 1.0;
        TangentVector(c)
    }
}

impl TryFrom<usize> for FrameIndex {
    type Error = Error;

    /// One-based, as in `e1, e2, e3`.
    fn try_from(i: usize) -> Result<Self> {
        match i {
            1 => Ok(FrameIndex::E1),
            2 => Ok(FrameIndex::E2),
            3 => Ok(FrameIndex::E3),
            _ => Err(Error::InvalidFrameIndex(i)),
        }
    }
}

impl AmbientParams {
    pub const fn new(kappa: f64, tau: f64) -> Self {
        Self { kappa, tau }
    }

    /// The Heisenberg group with bundle curvature `tau`.
    pub const fn nil3(tau: f64) -> Self {
        Self::new(0.0, tau)
    }

    pub const fn euclidean() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn is_nil3(&self) -> bool {
        self.kappa == 0.0 && self.tau != 0.0
    }

    /// Constant sectional curvature (`kappa/4`) exactly when `kappa = 4 tau^2`.
    pub fn has_constant_curvature(&self) -> bool {
        self.kappa == 4.0 * self.tau * self.tau
    }

    /// `w = 1 + kappa/4 (x^2 + y^2)`, without domain checking.
    pub fn conformal(&self, x: f64, y: f64) -> f64 {
        1.0 + 0.25 * self.kappa * (x * x + y * y)
    }

    /// Returns `w` at `p`, or an error when `p` is outside the chart.
    pub fn check(&self, p: &AmbientPoint) -> Result<f64> {
        let w = self.conformal(p.x, p.y);
        if w > 0.0 && w.is_finite() && p.z.is_finite() {
            Ok(w)
        } else {
            Err(Error::InvalidPoint {
                x: p.x,
                y: p.y,
                z: p.z,
                conformal: w,
            })
        }
    }

    /// Coordinate distance from `p` to the chart boundary (infinite when
    /// `kappa >= 0`).
    pub fn boundary_margin(&self, p: &AmbientPoint) -> f64 {
        if self.kappa >= 0.0 {
            f64::INFINITY
        } else {
            2.0 / libm::sqrt(-self.kappa) - libm::hypot(p.x, p.y)
        }
    }

    pub fn metric_at(&self, p: &AmbientPoint) -> Result<MetricMatrix> {
        let w = self.check(p)?;
        let (x, y, t) = (p.x, p.y, self.tau);
        let w2 = w * w;
        // one-form dz + a dx + b dy
        let a = t * y / w;
        let b = -t * x / w;
        Ok(MetricMatrix([
            [1.0 / w2 + a * a, a * b, a],
            [a * b, 1.0 / w2 + b * b, b],
            [a, b, 1.0],
        ]))
    }

    /// Coordinate components of `e1, e2, e3`.
    pub fn frame_at(&self, p: &AmbientPoint) -> Result<[CoordVector; 3]> {
        let w = self.check(p)?;
        let t = self.tau;
        Ok([
            CoordVector::new(w, 0.0, -t * p.y),
            CoordVector::new(0.0, w, t * p.x),
            CoordVector::new(0.0, 0.0, 1.0),
        ])
    }

    /// Rows are the dual one-forms of the frame, in coordinates.
    pub fn coframe_at(&self, p: &AmbientPoint) -> Result<Mat3> {
        let w = self.check(p)?;
        let t = self.tau;
        Ok([
            [1.0 / w, 0.0, 0.0],
            [0.0, 1.0 / w, 0.0],
            [t * p.y / w, -t * p.x / w, 1.0],
        ])
    }

    pub fn to_frame(&self, p: &AmbientPoint, v: CoordVector) -> Result<TangentVector> {
        let th = self.coframe_at(p)?;
        Ok(TangentVector(crate::linalg::mat3_vec(&th, v.0)))
    }

    pub fn to_coords(&self, p: &AmbientPoint, v: TangentVector) -> Result<CoordVector> {
        let [e1, e2, e3] = self.frame_at(p)?;
        Ok(e1 * v[0] + e2 * v[1] + e3 * v[2])
    }

    /// `nabla_{e_i} e_j` in frame components.
    pub fn connection_frame(&self, i: FrameIndex, j: FrameIndex, p: &AmbientPoint) -> Result<TangentVector> {
        self.check(p)?;
        let hk = 0.5 * self.kappa;
        let (x, y, t) = (p.x, p.y, self.tau);
        use FrameIndex::*;
        let v = match (i, j) {
            (E1, E1) => [0.0, hk * y, 0.0],
            (E1, E2) => [-hk * y, 0.0, t],
            (E1, E3) => [0.0, -t, 0.0],
            (E2, E1) => [0.0, -hk * x, -t],
            (E2, E2) => [hk * x, 0.0, 0.0],
            (E2, E3) => [t, 0.0, 0.0],
            (E3, E1) => [0.0, -t, 0.0],
            (E3, E2) => [t, 0.0, 0.0],
            (E3, E3) => [0.0, 0.0, 0.0],
        };
        Ok(TangentVector(v))
    }

    /// `[nabla_X e1, nabla_X e2, nabla_X e3]` for `X` in frame components.
    pub fn connection_along(&self, p: &AmbientPoint, x: TangentVector) -> Result<[TangentVector; 3]> {
        let mut out = [TangentVector::ZERO; 3];
        for j in FrameIndex::ALL {
            for k in FrameIndex::ALL {
                out[j.slot()] += self.connection_frame(k, j, p)? * x[k.slot()];
            }
        }
        Ok(out)
    }

    /// Covariant derivative `nabla_X V` of a field with frame components `V`
    /// whose directional derivative along `X` is `dv`.
    pub fn covariant_derivative(
        &self,
        p: &AmbientPoint,
        x: TangentVector,
        v: TangentVector,
        dv: TangentVector,
    ) -> Result<TangentVector> {
        let nab = self.connection_along(p, x)?;
        Ok(dv + nab[0] * v[0] + nab[1] * v[1] + nab[2] * v[2])
    }

    /// `[e_i, e_j]` in frame components.
    pub fn commutator_frame(&self, i: FrameIndex, j: FrameIndex, p: &AmbientPoint) -> Result<TangentVector> {
        self.check(p)?;
        let e12 = TangentVector::new(-0.5 * self.kappa * p.y, 0.5 * self.kappa * p.x, 2.0 * self.tau);
        use FrameIndex::*;
        Ok(match (i, j) {
            (E1, E2) => e12,
            (E2, E1) => -e12,
            _ => TangentVector::ZERO,
        })
    }

    /// `R(X, Y) Z` with the convention `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`.
    pub fn curvature_tensor(
        &self,
        p: &AmbientPoint,
        x: TangentVector,
        y: TangentVector,
        z: TangentVector,
    ) -> Result<TangentVector> {
        self.check(p)?;
        let t2 = self.tau * self.tau;
        let iso = self.kappa - 3.0 * t2;
        let fib = self.kappa - 4.0 * t2;
        let e3 = FrameIndex::E3.unit();
        let (x3, y3, z3) = (x[2], y[2], z[2]);
        let yz = y.dot(&z);
        let xz = x.dot(&z);
        let round = x * yz - y * xz;
        let vertical = x * (y3 * z3) - y * (x3 * z3) + e3 * (x3 * yz - y3 * xz);
        Ok(round * iso - vertical * fib)
    }

    /// Sectional curvature of the plane spanned by `x`, `y`.
    pub fn sectional_curvature(&self, p: &AmbientPoint, x: TangentVector, y: TangentVector) -> Result<f64> {
        let r = self.curvature_tensor(p, x, y, y)?;
        let area = x.dot(&x) * y.dot(&y) - x.dot(&y) * x.dot(&y);
        if abs(area) < 1e-300 {
            return Err(Error::Precondition("sectional curvature of a degenerate plane".into()));
        }
        Ok(r.dot(&x) / area)
    }
}

/// The Hopf fibration `(x, y, z) -> (x, y)`.
pub fn hopf_project(p: &AmbientPoint) -> (f64, f64) {
    (p.x, p.y)
}
