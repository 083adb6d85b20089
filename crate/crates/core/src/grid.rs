//! Surfaces sampled on a rectangular parameter grid.

use crate::ambient::{AmbientParams, AmbientPoint};
use crate::linalg::abs;
use crate::surface::{Immersion, Orientation, ParamDomain};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Uniform grid of `nu x nv` nodes on `[u0, u1] x [v0, v1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub nu: usize,
    pub nv: usize,
}

impl GridSpec {
    pub fn new(u: (f64, f64), v: (f64, f64), nu: usize, nv: usize) -> Result<Self> {
        if nu < 2 || nv < 2 {
            return Err(Error::InvalidSpec(format!(
                "grid needs at least 2x2 nodes, got {nu}x{nv}"
            )));
        }
        for (name, (a, b)) in [("u", u), ("v", v)] {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidSpec(format!(
                    "{name} range must be finite and increasing"
                )));
            }
        }
        Ok(Self { u, v, nu, nv })
    }

    pub fn du(&self) -> f64 {
        (self.u.1 - self.u.0) / (self.nu - 1) as f64
    }

    pub fn dv(&self) -> f64 {
        (self.v.1 - self.v.0) / (self.nv - 1) as f64
    }

    pub fn u_at(&self, i: usize) -> f64 {
        if i + 1 == self.nu {
            self.u.1
        } else {
            self.u.0 + i as f64 * self.du()
        }
    }

    pub fn v_at(&self, j: usize) -> f64 {
        if j + 1 == self.nv {
            self.v.1
        } else {
            self.v.0 + j as f64 * self.dv()
        }
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major index (u outer, v inner).
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    /// All `(i, j, u, v)` in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.nu).flat_map(move |i| (0..self.nv).map(move |j| (i, j, self.u_at(i), self.v_at(j))))
    }

    /// Up to `count x count` nodes spread evenly over the nodes at least
    /// `margin` away from the boundary.
    pub fn interior_sample(&self, margin: usize, count: usize) -> Vec<(usize, usize)> {
        let pick = |n: usize| -> Vec<usize> {
            if n <= 2 * margin || count == 0 {
                return Vec::new();
            }
            let (lo, hi) = (margin, n - 1 - margin);
            let avail = hi - lo + 1;
            if avail <= count {
                return (lo..=hi).collect();
            }
            let mut out: Vec<usize> = (0..count)
                .map(|k| lo + (k * (avail - 1) + (count - 1) / 2) / (count - 1).max(1))
                .collect();
            out.dedup();
            out
        };
        let (is, js) = (pick(self.nu), pick(self.nv));
        is.iter().flat_map(|&i| js.iter().map(move |&j| (i, j))).collect()
    }

    /// Node index of a coordinate, if it lies on the grid.
    fn locate(start: f64, step: f64, n: usize, x: f64) -> Option<usize> {
        let s = (x - start) / step;
        let k = libm::round(s);
        (k >= 0.0 && (k as usize) < n && abs(s - k) < 1e-6).then_some(k as usize)
    }

    pub fn locate_node(&self, u: f64, v: f64) -> Option<(usize, usize)> {
        Some((
            Self::locate(self.u.0, self.du(), self.nu, u)?,
            Self::locate(self.v.0, self.dv(), self.nv, v)?,
        ))
    }

    pub fn domain(&self) -> ParamDomain {
        ParamDomain::new(self.u, self.v)
    }
}

/// Surface known only at the nodes of a [`GridSpec`]. Derived quantities
/// use finite differences with the node spacing as step, so evaluation is
/// possible at nodes at least [`crate::surface::STENCIL_REACH`] nodes from
/// the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSurface {
    params: AmbientParams,
    spec: GridSpec,
    points: Vec<AmbientPoint>,
    orientation: Orientation,
}

impl GridSurface {
    pub fn new(params: AmbientParams, spec: GridSpec, points: Vec<AmbientPoint>) -> Result<Self> {
        if points.len() != spec.len() {
            return Err(Error::InvalidSpec(format!(
                "expected {} grid points, got {}",
                spec.len(),
                points.len()
            )));
        }
        for p in &points {
            params.check(p)?;
        }
        Ok(Self {
            params,
            spec,
            points,
            orientation: Orientation::Positive,
        })
    }

    /// Evaluates an immersion at every node.
    pub fn sample<I: Immersion + ?Sized>(imm: &I, spec: GridSpec) -> Result<Self> {
        let points = spec
            .nodes()
            .map(|(_, _, u, v)| imm.position(u, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(imm.params(), spec, points)?.with_orientation(imm.orientation()))
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn points(&self) -> &[AmbientPoint] {
        &self.points
    }

    pub fn point(&self, i: usize, j: usize) -> AmbientPoint {
        self.points[self.spec.index(i, j)]
    }

    /// Largest distance between matching nodes of two grids (coordinate norm).
    pub fn max_distance(&self, other: &GridSurface) -> Option<f64> {
        (self.spec == other.spec).then(|| {
            self.points
                .iter()
                .zip(&other.points)
                .map(|(a, b)| a.distance(b))
                .fold(0.0, f64::max)
        })
    }
}

impl Immersion for GridSurface {
    fn params(&self) -> AmbientParams {
        self.params
    }

    fn domain(&self) -> ParamDomain {
        self.spec.domain()
    }

    fn position(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        let (i, j) = self.spec.locate_node(u, v).ok_or(Error::OffGrid { u, v })?;
        Ok(self.point(i, j))
    }

    fn step(&self) -> [f64; 2] {
        [self.spec.du(), self.spec.dv()]
    }

    fn orientation(&self) -> Orientation {
        self.orientation
    }
}
