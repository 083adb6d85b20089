//! Invariants of an immersed patch `F(u, v)` in `M(kappa, tau)`.
//!
//! All vectors are carried in frame components (see [`TangentVector`]).
//! Derivatives of derived fields (normal, `T`, shape operator images) are
//! taken with fourth-order central differences whose step is supplied by the
//! immersion through [`Immersion::step`]. Analytic families use a small fixed
//! step; sampled grids use their node spacing so every stencil lands on a node.

use crate::ambient::{AmbientParams, AmbientPoint};
use crate::diff::{central4, CENTRAL4_WEIGHTS, SECOND4_WEIGHTS};
use crate::linalg::{abs, acos, det2, sin, solve2, CoordVector, Mat2, TangentVector};
use crate::{Error, Result};
use core::f64::consts::FRAC_PI_2;

/// Finite-difference step of analytic immersions.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Angles closer than this to `0` or `pi/2` use an orthonormal basis instead
/// of `{T, JT}`.
pub const THETA_DEGENERATE: f64 = 1e-9;
/// Number of stencil nodes (per side) consumed by the deepest nested
/// derivative in this module.
pub const STENCIL_REACH: usize = 6;

/// Rectangular parameter domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamDomain {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

impl ParamDomain {
    pub const UNBOUNDED: Self = Self {
        u: (f64::NEG_INFINITY, f64::INFINITY),
        v: (f64::NEG_INFINITY, f64::INFINITY),
    };

    pub const fn new(u: (f64, f64), v: (f64, f64)) -> Self {
        Self { u, v }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        let slack = |(a, b): (f64, f64)| 1e-9 * (1.0 + abs(b - a).min(1e300));
        let (su, sv) = (slack(self.u), slack(self.v));
        u >= self.u.0 - su && u <= self.u.1 + su && v >= self.v.0 - sv && v <= self.v.1 + sv
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

/// A parametrized surface patch in a BCV space.
pub trait Immersion {
    fn params(&self) -> AmbientParams;

    fn domain(&self) -> ParamDomain {
        ParamDomain::UNBOUNDED
    }

    fn position(&self, u: f64, v: f64) -> Result<AmbientPoint>;

    /// Coordinate partials `[dF/du, dF/dv]`.
    fn partials(&self, u: f64, v: f64) -> Result<[CoordVector; 2]> {
        fd_partials(self, u, v)
    }

    /// Coordinate second partials `[F_uu, F_uv, F_vv]`.
    fn second_partials(&self, u: f64, v: f64) -> Result<[CoordVector; 3]> {
        let [hu, hv] = self.step();
        let uu = central4(|t| Ok(checked_partials(self, u + t, v)?[0]), hu)?;
        let uv = central4(|t| Ok(checked_partials(self, u + t, v)?[1]), hu)?;
        let vv = central4(|t| Ok(checked_partials(self, u, v + t)?[1]), hv)?;
        Ok([uu, uv, vv])
    }

    /// Steps used when differentiating derived fields.
    fn step(&self) -> [f64; 2] {
        [DEFAULT_STEP; 2]
    }

    /// Breaks the normal-orientation tie on Hopf cylinders.
    fn orientation(&self) -> Orientation {
        Orientation::Positive
    }
}

impl<I: Immersion + ?Sized> Immersion for &I {
    fn params(&self) -> AmbientParams {
        (**self).params()
    }
    fn domain(&self) -> ParamDomain {
        (**self).domain()
    }
    fn position(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        (**self).position(u, v)
    }
    fn partials(&self, u: f64, v: f64) -> Result<[CoordVector; 2]> {
        (**self).partials(u, v)
    }
    fn second_partials(&self, u: f64, v: f64) -> Result<[CoordVector; 3]> {
        (**self).second_partials(u, v)
    }
    fn step(&self) -> [f64; 2] {
        (**self).step()
    }
    fn orientation(&self) -> Orientation {
        (**self).orientation()
    }
}

impl<I: Immersion + ?Sized> Immersion for alloc::boxed::Box<I> {
    fn params(&self) -> AmbientParams {
        (**self).params()
    }
    fn domain(&self) -> ParamDomain {
        (**self).domain()
    }
    fn position(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        (**self).position(u, v)
    }
    fn partials(&self, u: f64, v: f64) -> Result<[CoordVector; 2]> {
        (**self).partials(u, v)
    }
    fn second_partials(&self, u: f64, v: f64) -> Result<[CoordVector; 3]> {
        (**self).second_partials(u, v)
    }
    fn step(&self) -> [f64; 2] {
        (**self).step()
    }
    fn orientation(&self) -> Orientation {
        (**self).orientation()
    }
}

fn in_domain<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<()> {
    if imm.domain().contains(u, v) {
        Ok(())
    } else {
        Err(Error::StencilOutOfDomain { u, v })
    }
}

/// Position with a domain check.
pub fn checked_position<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<AmbientPoint> {
    in_domain(imm, u, v)?;
    imm.position(u, v)
}

fn checked_partials<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<[CoordVector; 2]> {
    in_domain(imm, u, v)?;
    imm.partials(u, v)
}

/// Fourth-order central differences of [`Immersion::position`].
pub fn fd_partials<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<[CoordVector; 2]> {
    let [hu, hv] = imm.step();
    let pos = |u, v| checked_position(imm, u, v).map(|p| CoordVector(p.to_array()));
    Ok([central4(|t| pos(u + t, v), hu)?, central4(|t| pos(u, v + t), hv)?])
}

/// An immersion given by a closure.
pub struct FnImmersion<F> {
    params: AmbientParams,
    domain: ParamDomain,
    map: F,
}

impl<F: Fn(f64, f64) -> AmbientPoint> FnImmersion<F> {
    pub fn new(params: AmbientParams, domain: ParamDomain, map: F) -> Self {
        Self { params, domain, map }
    }
}

impl<F: Fn(f64, f64) -> AmbientPoint> Immersion for FnImmersion<F> {
    fn params(&self) -> AmbientParams {
        self.params
    }
    fn domain(&self) -> ParamDomain {
        self.domain
    }
    fn position(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        let p = (self.map)(u, v);
        self.params.check(&p)?;
        Ok(p)
    }
}

/// Adds `amplitude * sin(u)` to the fiber coordinate of another immersion.
pub struct FiberShift<I> {
    pub inner: I,
    pub amplitude: f64,
}

impl<I: Immersion> Immersion for FiberShift<I> {
    fn params(&self) -> AmbientParams {
        self.inner.params()
    }
    fn domain(&self) -> ParamDomain {
        self.inner.domain()
    }
    fn position(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        let mut p = self.inner.position(u, v)?;
        p.z += self.amplitude * sin(u);
        Ok(p)
    }
    fn partials(&self, u: f64, v: f64) -> Result<[CoordVector; 2]> {
        let [fu, fv] = self.inner.partials(u, v)?;
        Ok([fu + CoordVector::new(0.0, 0.0, self.amplitude * libm::cos(u)), fv])
    }
    fn step(&self) -> [f64; 2] {
        self.inner.step()
    }
    fn orientation(&self) -> Orientation {
        self.inner.orientation()
    }
}

/// Point and tangent vectors of the patch at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentPlane {
    pub point: AmbientPoint,
    pub fu: TangentVector,
    pub fv: TangentVector,
}

impl TangentPlane {
    pub fn gram(&self) -> Mat2 {
        let f = self.fu.dot(&self.fv);
        [[self.fu.dot(&self.fu), f], [f, self.fv.dot(&self.fv)]]
    }

    /// Coefficients `[a, b]` with `x = a F_u + b F_v` for tangent `x`.
    pub fn coefficients(&self, x: TangentVector) -> Result<[f64; 2]> {
        solve2(&self.gram(), [x.dot(&self.fu), x.dot(&self.fv)]).ok_or(Error::DegenerateTangentPlane {
            u: f64::NAN,
            v: f64::NAN,
        })
    }

    pub fn combine(&self, c: [f64; 2]) -> TangentVector {
        self.fu * c[0] + self.fv * c[1]
    }
}

/// Gram matrix of `{F_u, F_v}` under the ambient metric.
pub fn first_fundamental_form<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<Mat2> {
    let tp = tangent_plane(imm, u, v)?;
    let g = tp.gram();
    if !(det2(&g) > 1e-14 * g[0][0] * g[1][1]) {
        return Err(Error::DegenerateTangentPlane { u, v });
    }
    Ok(g)
}

pub fn tangent_plane<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<TangentPlane> {
    let params = imm.params();
    let point = checked_position(imm, u, v)?;
    let [fu, fv] = checked_partials(imm, u, v)?;
    Ok(TangentPlane {
        point,
        fu: params.to_frame(&point, fu)?,
        fv: params.to_frame(&point, fv)?,
    })
}

/// Unit normal, angle with the fibers and the projections `T`, `JT`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projections {
    pub normal: TangentVector,
    /// In `[0, pi/2]`.
    pub theta: f64,
    /// `<N, e3>`.
    pub cos_theta: f64,
    /// Tangential part of `e3`, `e3 - cos(theta) N`.
    pub t: TangentVector,
    /// `N x T`.
    pub jt: TangentVector,
}

impl Projections {
    fn new(normal: TangentVector) -> Self {
        let cos_theta = normal[2];
        let t = TangentVector::new(0.0, 0.0, 1.0) - normal * cos_theta;
        let jt = normal.cross(&t);
        Self {
            normal,
            theta: acos(cos_theta.clamp(0.0, 1.0)),
            cos_theta,
            t,
            jt,
        }
    }

    pub fn sin_theta(&self) -> f64 {
        sin(self.theta)
    }

    pub fn is_degenerate(&self) -> bool {
        self.theta < THETA_DEGENERATE || self.theta > FRAC_PI_2 - THETA_DEGENERATE
    }

    /// `J X = N x X`.
    pub fn rotate(&self, x: TangentVector) -> TangentVector {
        self.normal.cross(&x)
    }
}

/// Shared state for derivatives around one base point. The normal
/// orientation is fixed at the base point and reused at every stencil node.
struct Probe<'a, I: ?Sized> {
    imm: &'a I,
    params: AmbientParams,
    h: [f64; 2],
    sign: f64,
}

impl<'a, I: Immersion + ?Sized> Probe<'a, I> {
    fn new(imm: &'a I, u: f64, v: f64) -> Result<Self> {
        let mut probe = Self {
            imm,
            params: imm.params(),
            h: imm.step(),
            sign: 1.0,
        };
        let tp = tangent_plane(imm, u, v)?;
        let n = probe.oriented_normal(&tp, u, v)?;
        let tie = sin(THETA_DEGENERATE);
        let flip = n[2] < -tie || (n[2] <= tie && imm.orientation() == Orientation::Negative);
        probe.sign = if flip { -1.0 } else { 1.0 };
        Ok(probe)
    }

    fn oriented_normal(&self, tp: &TangentPlane, u: f64, v: f64) -> Result<TangentVector> {
        let c = tp.fu.cross(&tp.fv);
        let len = c.norm();
        if !(len > 1e-12 * tp.fu.norm() * tp.fv.norm()) {
            return Err(Error::DegenerateTangentPlane { u, v });
        }
        Ok(c * (self.sign / len))
    }

    fn plane(&self, u: f64, v: f64) -> Result<TangentPlane> {
        tangent_plane(self.imm, u, v)
    }

    fn projections(&self, u: f64, v: f64) -> Result<(TangentPlane, Projections)> {
        let tp = self.plane(u, v)?;
        let n = self.oriented_normal(&tp, u, v)?;
        Ok((tp, Projections::new(n)))
    }

    /// `[d/du f, d/dv f]` of a frame-component field.
    fn d_field(&self, u: f64, v: f64, f: impl Fn(f64, f64) -> Result<TangentVector>) -> Result<[TangentVector; 2]> {
        Ok([
            central4(|t| f(u + t, v), self.h[0])?,
            central4(|t| f(u, v + t), self.h[1])?,
        ])
    }

    fn d_scalar(&self, u: f64, v: f64, f: impl Fn(f64, f64) -> Result<f64>) -> Result<[f64; 2]> {
        Ok([
            central4(|t| f(u + t, v), self.h[0])?,
            central4(|t| f(u, v + t), self.h[1])?,
        ])
    }

    /// `S F_u`, `S F_v` from `S X = -nabla_X N`.
    fn shape_images(&self, u: f64, v: f64) -> Result<(TangentPlane, Projections, [TangentVector; 2])> {
        let (tp, pr) = self.projections(u, v)?;
        let dn = self.d_field(u, v, |a, b| Ok(self.projections(a, b)?.1.normal))?;
        let mut out = [TangentVector::ZERO; 2];
        for (k, x) in [tp.fu, tp.fv].into_iter().enumerate() {
            out[k] = -self.params.covariant_derivative(&tp.point, x, pr.normal, dn[k])?;
        }
        Ok((tp, pr, out))
    }

    /// Applies `S` to a tangent vector.
    fn apply_shape(tp: &TangentPlane, images: &[TangentVector; 2], x: TangentVector) -> Result<TangentVector> {
        let c = tp.coefficients(x)?;
        Ok(images[0] * c[0] + images[1] * c[1])
    }

    fn shape_matrix(
        &self,
        u: f64,
        v: f64,
        tp: &TangentPlane,
        pr: &Projections,
        images: &[TangentVector; 2],
        basis: ShapeBasis,
    ) -> Result<Mat2> {
        let b = match basis {
            ShapeBasis::TJt => {
                if pr.is_degenerate() {
                    return Err(Error::BasisDegenerate { theta: pr.theta });
                }
                [pr.t * (1.0 / pr.t.norm()), pr.jt * (1.0 / pr.jt.norm())]
            }
            ShapeBasis::Orthonormal => {
                let e = tp.fu * (1.0 / tp.fu.norm());
                [e, pr.normal.cross(&e)]
            }
        };
        let sb = [
            Self::apply_shape(tp, images, b[0]).map_err(|_| Error::DegenerateTangentPlane { u, v })?,
            Self::apply_shape(tp, images, b[1]).map_err(|_| Error::DegenerateTangentPlane { u, v })?,
        ];
        Ok([
            [b[0].dot(&sb[0]), b[0].dot(&sb[1])],
            [b[1].dot(&sb[0]), b[1].dot(&sb[1])],
        ])
    }

    /// Tangential part of `nabla_X W` for a field `W` along the surface.
    fn covariant(
        &self,
        u: f64,
        v: f64,
        tp: &TangentPlane,
        pr: &Projections,
        x: TangentVector,
        field: impl Fn(f64, f64) -> Result<TangentVector>,
    ) -> Result<TangentVector> {
        let c = tp.coefficients(x).map_err(|_| Error::DegenerateTangentPlane { u, v })?;
        let w = field(u, v)?;
        let dw = self.d_field(u, v, &field)?;
        let along = dw[0] * c[0] + dw[1] * c[1];
        let full = self.params.covariant_derivative(&tp.point, x, w, along)?;
        Ok(full - pr.normal * full.dot(&pr.normal))
    }

    fn lambda(&self, u: f64, v: f64) -> Result<f64> {
        let (tp, pr, images) = self.shape_images(u, v)?;
        Ok(self.shape_matrix(u, v, &tp, &pr, &images, ShapeBasis::TJt)?[1][1])
    }

    fn gram_stencil(&self, u: f64, v: f64) -> Result<[[Mat2; 5]; 5]> {
        let mut g = [[[[0.0; 2]; 2]; 5]; 5];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let du = (i as f64 - 2.0) * self.h[0];
                let dv = (j as f64 - 2.0) * self.h[1];
                *cell = self.plane(u + du, v + dv)?.gram();
            }
        }
        Ok(g)
    }
}

/// Angle function and the projections of `e3`.
///
/// The normal is chosen with `<N, e3> >= 0`; on Hopf cylinders
/// (`<N, e3> = 0`) `{F_u, F_v, N}` is positively oriented unless the
/// immersion reports [`Orientation::Negative`].
pub fn angle_and_projections<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<Projections> {
    Ok(Probe::new(imm, u, v)?.projections(u, v)?.1)
}

/// Basis in which a shape operator matrix is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeBasis {
    /// `{T, JT}`. Both have length `sin(theta)`, so the matrix is the same
    /// as in the normalized basis.
    TJt,
    /// `{F_u / |F_u|, N x F_u / |F_u|}`.
    Orthonormal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeOperator {
    pub matrix: Mat2,
    pub basis: ShapeBasis,
    /// The `(JT, JT)` entry, when the basis is `{T, JT}`.
    pub lambda: Option<f64>,
}

impl ShapeOperator {
    pub fn det(&self) -> f64 {
        det2(&self.matrix)
    }

    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    /// `|<S b1, b2> - <b1, S b2>|`; the basis is orthonormal.
    pub fn symmetry_defect(&self) -> f64 {
        abs(self.matrix[0][1] - self.matrix[1][0])
    }
}

pub fn shape_operator<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64, basis: ShapeBasis) -> Result<ShapeOperator> {
    let probe = Probe::new(imm, u, v)?;
    let (tp, pr, images) = probe.shape_images(u, v)?;
    let matrix = probe.shape_matrix(u, v, &tp, &pr, &images, basis)?;
    Ok(ShapeOperator {
        matrix,
        basis,
        lambda: (basis == ShapeBasis::TJt).then_some(matrix[1][1]),
    })
}

/// Everything at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceGeometry {
    pub projections: Projections,
    /// In `{T, JT}` when the angle allows it, otherwise orthonormal.
    pub shape: ShapeOperator,
    /// Extrinsic Gaussian curvature.
    pub gaussian_curvature: f64,
}

impl SurfaceGeometry {
    pub fn lambda(&self) -> Option<f64> {
        self.shape.lambda
    }
}

pub fn surface_geometry<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<SurfaceGeometry> {
    let probe = Probe::new(imm, u, v)?;
    let (tp, pr, images) = probe.shape_images(u, v)?;
    let basis = if pr.is_degenerate() {
        ShapeBasis::Orthonormal
    } else {
        ShapeBasis::TJt
    };
    let matrix = probe.shape_matrix(u, v, &tp, &pr, &images, basis)?;
    let shape = ShapeOperator {
        matrix,
        basis,
        lambda: (basis == ShapeBasis::TJt).then_some(matrix[1][1]),
    };
    Ok(SurfaceGeometry {
        projections: pr,
        shape,
        gaussian_curvature: extrinsic_from(&probe.params, shape.det(), pr.cos_theta),
    })
}

fn extrinsic_from(params: &AmbientParams, det_s: f64, cos_theta: f64) -> f64 {
    let t2 = params.tau * params.tau;
    det_s + t2 + (params.kappa - 4.0 * t2) * cos_theta * cos_theta
}

/// `det S + tau^2 + (kappa - 4 tau^2) cos^2(theta)`.
pub fn gaussian_curvature_extrinsic<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<f64> {
    let probe = Probe::new(imm, u, v)?;
    let (tp, pr, images) = probe.shape_images(u, v)?;
    let m = probe.shape_matrix(u, v, &tp, &pr, &images, ShapeBasis::Orthonormal)?;
    Ok(extrinsic_from(&probe.params, det2(&m), pr.cos_theta))
}

/// Gaussian curvature of the induced metric alone (Brioschi formula on
/// finite differences of `E`, `F`, `G`).
pub fn gaussian_curvature_intrinsic<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<f64> {
    let probe = Probe::new(imm, u, v)?;
    let g = probe.gram_stencil(u, v)?;
    let [hu, hv] = probe.h;
    let comp = |i: usize, j: usize, k: usize| match k {
        0 => g[i][j][0][0],
        1 => g[i][j][0][1],
        _ => g[i][j][1][1],
    };
    let du = |k| (0..5).map(|i| CENTRAL4_WEIGHTS[i] * comp(i, 2, k)).sum::<f64>() / hu;
    let dv = |k| (0..5).map(|j| CENTRAL4_WEIGHTS[j] * comp(2, j, k)).sum::<f64>() / hv;
    let duu = |k| (0..5).map(|i| SECOND4_WEIGHTS[i] * comp(i, 2, k)).sum::<f64>() / (hu * hu);
    let dvv = |k| (0..5).map(|j| SECOND4_WEIGHTS[j] * comp(2, j, k)).sum::<f64>() / (hv * hv);
    let duv = |k| {
        let mut s = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                s += CENTRAL4_WEIGHTS[i] * CENTRAL4_WEIGHTS[j] * comp(i, j, k);
            }
        }
        s / (hu * hv)
    };
    let (e, f, gg) = (comp(2, 2, 0), comp(2, 2, 1), comp(2, 2, 2));
    let (e_u, e_v, f_u, f_v, g_u, g_v) = (du(0), dv(0), du(1), dv(1), du(2), dv(2));
    let (e_vv, f_uv, g_uu) = (dvv(0), duv(1), duu(2));
    let m1 = [
        [-0.5 * e_vv + f_uv - 0.5 * g_uu, 0.5 * e_u, f_u - 0.5 * e_v],
        [f_v - 0.5 * g_u, e, f],
        [0.5 * g_v, f, gg],
    ];
    let m2 = [[0.0, 0.5 * e_v, 0.5 * g_u], [0.5 * e_v, e, f], [0.5 * g_u, f, gg]];
    let w = e * gg - f * f;
    if !(w > 0.0) {
        return Err(Error::DegenerateTangentPlane { u, v });
    }
    Ok((crate::linalg::det3(&m1) - crate::linalg::det3(&m2)) / (w * w))
}

/// Residual magnitudes of the four compatibility equations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompatibilityResiduals {
    /// `|K_extrinsic - K_intrinsic|`.
    pub gauss: f64,
    /// Codazzi on `X = d/du`, `Y = d/dv`, divided by `|F_u| |F_v|`.
    pub codazzi: f64,
    /// `|nabla_X T - cos(theta)(S X - tau J X)|` over unit `X` along the
    /// coordinate directions.
    pub structure_t: f64,
    /// `|X[cos(theta)] + <S X - tau J X, T>|` over the same `X`.
    pub structure_angle: f64,
    /// `max |X[cos(theta)]|`, zero on constant-angle surfaces.
    pub angle_derivative: f64,
}

impl CompatibilityResiduals {
    pub fn max(&self) -> f64 {
        self.gauss
            .max(self.codazzi)
            .max(self.structure_t)
            .max(self.structure_angle)
    }
}

pub fn compatibility_residuals<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<CompatibilityResiduals> {
    let probe = Probe::new(imm, u, v)?;
    let params = probe.params;
    let tau = params.tau;
    let (tp, pr, images) = probe.shape_images(u, v)?;
    let c = pr.cos_theta;

    let k_ext = extrinsic_from(
        &params,
        det2(&probe.shape_matrix(u, v, &tp, &pr, &images, ShapeBasis::Orthonormal)?),
        c,
    );
    let k_int = gaussian_curvature_intrinsic(imm, u, v)?;

    // nabla_u (S F_v) - nabla_v (S F_u) = (kappa - 4 tau^2) cos(theta) (<F_v,T> F_u - <F_u,T> F_v)
    let pr_ref = &probe;
    let s_image = |k: usize| move |a: f64, b: f64| Ok(pr_ref.shape_images(a, b)?.2[k]);
    let dsv = probe.d_field(u, v, s_image(1))?[0];
    let dsu = probe.d_field(u, v, s_image(0))?[1];
    let lhs = probe.params.covariant_derivative(&tp.point, tp.fu, images[1], dsv)?
        - probe.params.covariant_derivative(&tp.point, tp.fv, images[0], dsu)?;
    let lhs = lhs - pr.normal * lhs.dot(&pr.normal);
    let rhs = (tp.fu * tp.fv.dot(&pr.t) - tp.fv * tp.fu.dot(&pr.t)) * ((params.kappa - 4.0 * tau * tau) * c);
    let codazzi = (lhs - rhs).norm() / (tp.fu.norm() * tp.fv.norm());

    let t_field = |a: f64, b: f64| Ok(probe.projections(a, b)?.1.t);
    let dcos = probe.d_scalar(u, v, |a, b| Ok(probe.projections(a, b)?.1.cos_theta))?;
    let mut structure_t: f64 = 0.0;
    let mut structure_angle: f64 = 0.0;
    let mut angle_derivative: f64 = 0.0;
    for (k, x) in [tp.fu, tp.fv].into_iter().enumerate() {
        let len = x.norm();
        let sx_minus_jx = images[k] - pr.rotate(x) * tau;
        let nabla_t = probe.covariant(u, v, &tp, &pr, x, t_field)?;
        structure_t = structure_t.max((nabla_t - sx_minus_jx * c).norm() / len);
        structure_angle = structure_angle.max(abs(dcos[k] + sx_minus_jx.dot(&pr.t)) / len);
        angle_derivative = angle_derivative.max(abs(dcos[k]) / len);
    }

    Ok(CompatibilityResiduals {
        gauss: abs(k_ext - k_int),
        codazzi,
        structure_t,
        structure_angle,
        angle_derivative,
    })
}

/// Residuals of the constant-angle structure: the shape operator pattern
/// `[[0, -tau], [-tau, lambda]]` in `{T, JT}`, the surface connection table
///
/// ```text
/// nabla_T T  = -2 tau cos(theta) JT     nabla_JT T  =  lambda cos(theta) JT
/// nabla_T JT =  2 tau cos(theta) T      nabla_JT JT = -lambda cos(theta) T
/// ```
///
/// and the Riccati equation `T[lambda] + lambda^2 cos(theta) + kappa cos(theta) sin^2(theta)
/// + 4 tau^2 cos^3(theta) = 0` for the measured `lambda`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstantAngleResiduals {
    pub theta: f64,
    pub lambda: f64,
    /// `|S_11|`.
    pub s11: f64,
    /// `|S_12 + tau|` (and `|S_21 + tau|`).
    pub s12: f64,
    /// Largest of the four connection identities, divided by `sin^2(theta)`.
    pub connection: f64,
    pub riccati: f64,
}

pub fn constant_angle_residuals<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<ConstantAngleResiduals> {
    let probe = Probe::new(imm, u, v)?;
    let params = probe.params;
    let tau = params.tau;
    let (tp, pr, images) = probe.shape_images(u, v)?;
    let m = probe.shape_matrix(u, v, &tp, &pr, &images, ShapeBasis::TJt)?;
    let lambda = m[1][1];
    let c = pr.cos_theta;
    let s = pr.sin_theta();

    let t_field = |a: f64, b: f64| Ok(probe.projections(a, b)?.1.t);
    let jt_field = |a: f64, b: f64| Ok(probe.projections(a, b)?.1.jt);
    let nabla_t_t = probe.covariant(u, v, &tp, &pr, pr.t, t_field)?;
    let nabla_jt_t = probe.covariant(u, v, &tp, &pr, pr.jt, t_field)?;
    let nabla_t_jt = probe.covariant(u, v, &tp, &pr, pr.t, jt_field)?;
    let nabla_jt_jt = probe.covariant(u, v, &tp, &pr, pr.jt, jt_field)?;
    let connection = [
        nabla_t_t + pr.jt * (2.0 * tau * c),
        nabla_jt_t - pr.jt * (lambda * c),
        nabla_t_jt - pr.t * (2.0 * tau * c),
        nabla_jt_jt + pr.t * (lambda * c),
    ]
    .iter()
    .fold(0.0_f64, |acc, r| acc.max(r.norm()))
        / (s * s);

    let dl = probe.d_scalar(u, v, |a, b| probe.lambda(a, b))?;
    let tc = tp
        .coefficients(pr.t)
        .map_err(|_| Error::DegenerateTangentPlane { u, v })?;
    let t_lambda = tc[0] * dl[0] + tc[1] * dl[1];
    let riccati = t_lambda + lambda * lambda * c + params.kappa * c * s * s + 4.0 * tau * tau * c * c * c;

    Ok(ConstantAngleResiduals {
        theta: pr.theta,
        lambda,
        s11: abs(m[0][0]),
        s12: abs(m[0][1] + tau).max(abs(m[1][0] + tau)),
        connection,
        riccati: abs(riccati),
    })
}
