//! Finite-difference recomputation of the ambient geometry from
//! [`AmbientParams::metric_at`] and [`AmbientParams::frame_at`] only.
//!
//! These never consult the closed-form connection or curvature tables, so
//! they can be used to check them.

use super::{AmbientParams, AmbientPoint, FrameIndex};
use crate::diff::central2;
use crate::linalg::{inverse3, CoordVector, TangentVector};
use crate::{Error, Result};

/// Default step for first derivatives.
pub const FIRST_STEP: f64 = 1e-5;
/// Default outer step for the curvature oracle.
pub const CURVATURE_STEP: f64 = 1e-3;
/// Stencils must stay this many steps away from the chart boundary.
pub const MARGIN_STEPS: f64 = 10.0;

/// Coordinate Christoffel symbols, indexed `gamma[k][i][j]` for `Gamma^k_{ij}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Christoffel(pub [[[f64; 3]; 3]; 3]);

impl Christoffel {
    /// `Gamma(a, b)^k = Gamma^k_{ij} a^i b^j`.
    pub fn apply(&self, a: CoordVector, b: CoordVector) -> CoordVector {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    *o += self.0[k][i][j] * a[i] * b[j];
                }
            }
        }
        CoordVector(out)
    }

    fn axpy(mut self, a: f64, x: &Self) -> Self {
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    self.0[k][i][j] += a * x.0[k][i][j];
                }
            }
        }
        self
    }
}

fn check_margin(params: &AmbientParams, p: &AmbientPoint, h: f64) -> Result<()> {
    params.check(p)?;
    let margin = params.boundary_margin(p);
    if !(h > 0.0) || !h.is_finite() || margin < MARGIN_STEPS * h {
        return Err(Error::StepTooLarge { step: h, margin });
    }
    Ok(())
}

fn shifted(p: &AmbientPoint, axis: usize, t: f64) -> AmbientPoint {
    let mut a = p.to_array();
    a[axis] += t;
    AmbientPoint::from_array(a)
}

fn metric_array(params: &AmbientParams, p: &AmbientPoint) -> Result<[f64; 9]> {
    let g = params.metric_at(p)?.0;
    Ok(core::array::from_fn(|n| g[n / 3][n % 3]))
}

/// Christoffel symbols by central differences of the metric and the Koszul
/// formula `Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)`.
pub fn christoffel_oracle(params: &AmbientParams, p: &AmbientPoint, h: f64) -> Result<Christoffel> {
    check_margin(params, p, h)?;
    let g = params.metric_at(p)?.0;
    let ginv = inverse3(&g).ok_or_else(|| Error::Precondition("metric is singular".into()))?;
    let mut dg = [[[0.0; 3]; 3]; 3]; // dg[a][i][j] = d_a g_ij
    for (a, slot) in dg.iter_mut().enumerate() {
        let d = central2(|t| metric_array(params, &shifted(p, a, t)), h)?;
        for n in 0..9 {
            slot[n / 3][n % 3] = d[n];
        }
    }
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                gamma[k][i][j] = 0.5
                    * (0..3)
                        .map(|l| ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                        .sum::<f64>();
            }
        }
    }
    Ok(Christoffel(gamma))
}

/// `d_a e_j^b`, indexed `[a][j]`.
fn frame_derivatives(params: &AmbientParams, p: &AmbientPoint, h: f64) -> Result<[[CoordVector; 3]; 3]> {
    let mut out = [[CoordVector::ZERO; 3]; 3];
    for (a, slot) in out.iter_mut().enumerate() {
        let d = central2(
            |t| {
                let f = params.frame_at(&shifted(p, a, t))?;
                Ok(core::array::from_fn::<f64, 9, _>(|n| f[n / 3][n % 3]))
            },
            h,
        )?;
        for j in 0..3 {
            slot[j] = CoordVector::new(d[3 * j], d[3 * j + 1], d[3 * j + 2]);
        }
    }
    Ok(out)
}

fn directional(de: &[[CoordVector; 3]; 3], dir: CoordVector, j: usize) -> CoordVector {
    de[0][j] * dir[0] + de[1][j] * dir[1] + de[2][j] * dir[2]
}

/// `nabla_{e_i} e_j` in frame components, from the Christoffel oracle.
pub fn connection_oracle(
    params: &AmbientParams,
    i: FrameIndex,
    j: FrameIndex,
    p: &AmbientPoint,
    h: f64,
) -> Result<TangentVector> {
    let gamma = christoffel_oracle(params, p, h)?;
    let frame = params.frame_at(p)?;
    let de = frame_derivatives(params, p, h)?;
    let (ei, ej) = (frame[i.slot()], frame[j.slot()]);
    let v = directional(&de, ei, j.slot()) + gamma.apply(ei, ej);
    params.to_frame(p, v)
}

/// `[e_i, e_j]` in frame components, by differentiating the frame fields.
pub fn commutator_oracle(
    params: &AmbientParams,
    i: FrameIndex,
    j: FrameIndex,
    p: &AmbientPoint,
    h: f64,
) -> Result<TangentVector> {
    check_margin(params, p, h)?;
    let frame = params.frame_at(p)?;
    let de = frame_derivatives(params, p, h)?;
    let v = directional(&de, frame[i.slot()], j.slot()) - directional(&de, frame[j.slot()], i.slot());
    params.to_frame(p, v)
}

/// Riemann tensor `R^l_{ijk}` (indexed `[l][i][j][k]`, `R(d_i, d_j) d_k`)
/// from central differences of the Christoffel oracle.
pub fn riemann_oracle(params: &AmbientParams, p: &AmbientPoint, h: f64, inner: f64) -> Result<[[[[f64; 3]; 3]; 3]; 3]> {
    check_margin(params, p, h + MARGIN_STEPS * inner)?;
    let gamma = christoffel_oracle(params, p, inner)?.0;
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3]; // [a][l][j][k]
    for (a, slot) in dgamma.iter_mut().enumerate() {
        let plus = christoffel_oracle(params, &shifted(p, a, h), inner)?;
        let minus = christoffel_oracle(params, &shifted(p, a, -h), inner)?;
        *slot = plus.axpy(-1.0, &minus).0;
        for l in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    slot[l][j][k] /= 2.0 * h;
                }
            }
        }
    }
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..3 {
                        v += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    r[l][i][j][k] = v;
                }
            }
        }
    }
    Ok(r)
}

/// `R(X, Y) Z` in frame components from [`riemann_oracle`].
pub fn curvature_oracle(
    params: &AmbientParams,
    p: &AmbientPoint,
    vectors: [TangentVector; 3],
    h: f64,
    inner: f64,
) -> Result<TangentVector> {
    let r = riemann_oracle(params, p, h, inner)?;
    let [x, y, z] = vectors.map(|v| params.to_coords(p, v));
    let (x, y, z) = (x?, y?, z?);
    let mut out = [0.0; 3];
    for (l, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    *o += r[l][i][j][k] * x[i] * y[j] * z[k];
                }
            }
        }
    }
    params.to_frame(p, CoordVector(out))
}

/// Frame connection matrix from the Christoffel oracle, `[i][j] -> nabla_{e_i} e_j`.
pub fn connection_table_oracle(params: &AmbientParams, p: &AmbientPoint, h: f64) -> Result<[[TangentVector; 3]; 3]> {
    let gamma = christoffel_oracle(params, p, h)?;
    let frame = params.frame_at(p)?;
    let de = frame_derivatives(params, p, h)?;
    let mut out = [[TangentVector::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let v = directional(&de, frame[i], j) + gamma.apply(frame[i], frame[j]);
            out[i][j] = params.to_frame(p, v)?;
        }
    }
    Ok(out)
}

/// Orthonormality defect `max |<e_i, e_j> - delta_ij|` using the coordinate metric.
pub fn orthonormality_defect(params: &AmbientParams, p: &AmbientPoint) -> Result<f64> {
    let g = params.metric_at(p)?;
    let f = params.frame_at(p)?;
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let d = g.inner(f[i], f[j]) - if i == j { 1.0 } else { 0.0 };
            worst = worst.max(libm::fabs(d));
        }
    }
    Ok(worst)
}
