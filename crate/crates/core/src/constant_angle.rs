//! Constant-angle surfaces in `Nil3`.
//!
//! Two kinds occur: Hopf cylinders (`theta = pi/2`) and the explicit
//! two-parameter-function family built by [`Theorem1Surface`]. The closed
//! forms `lambda`, `a`, `b`, `phi` of the coordinate construction live in
//! [`ProofFields`], and [`integrate_distribution`] rebuilds the surface from
//! them by integrating `F_u = T`, `F_v = aT + bJT` without using the explicit
//! parametrization.

use crate::ambient::{AmbientParams, AmbientPoint};
use crate::diff::central4;
use crate::grid::{GridSpec, GridSurface};
use crate::linalg::{abs, atan2, cos, sin, tan, tan_pole_distance, wrap_angle, CoordVector, TangentVector};
use crate::ode::{sweep, SweepOptions};
use crate::profile::{Polynomial, Profile};
use crate::surface::{angle_and_projections, Immersion, Orientation, ParamDomain};
use crate::{Error, Result};
use alloc::format;
use core::f64::consts::FRAC_PI_2;

/// Angles below this are rejected in `Nil3`; angles above `pi/2` minus this
/// are treated as Hopf cylinders.
pub const THETA_THRESHOLD: f64 = 1e-6;
/// Minimum distance of `psi` from a pole of `tan`.
pub const POLE_MARGIN: f64 = 1e-3;
/// Step for finite-difference residuals of closed forms.
pub const RESIDUAL_STEP: f64 = 1e-3;
/// Tolerance for the coefficient identities of [`ConstantAngleSpec::new`].
pub const SPEC_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleRegime {
    /// `theta = 0` with `tau = 0`: horizontal leaves.
    Leaf,
    /// `0 < theta < pi/2`.
    Generic,
    /// `theta = pi/2`.
    HopfCylinder,
}

/// Sorts a requested angle into a regime, rejecting `theta = 0` when the
/// fibration is twisted.
pub fn classify_angle(theta: f64, tau: f64) -> Result<AngleRegime> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::InvalidSpec(format!("angle {theta} outside [0, pi/2]")));
    }
    if theta < THETA_THRESHOLD {
        reject_theta_zero(theta, tau)?;
        Ok(AngleRegime::Leaf)
    } else if theta > FRAC_PI_2 - THETA_THRESHOLD {
        Ok(AngleRegime::HopfCylinder)
    } else {
        Ok(AngleRegime::Generic)
    }
}

/// A surface orthogonal to the fibers integrates the horizontal
/// distribution, which is impossible when `tau != 0`.
pub fn reject_theta_zero(theta: f64, tau: f64) -> Result<()> {
    if theta < THETA_THRESHOLD && tau != 0.0 {
        Err(Error::NonIntegrable { theta, tau })
    } else {
        Ok(())
    }
}

fn require_generic(theta: f64, tau: f64) -> Result<()> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::Precondition(format!("tau must be nonzero, got {tau}")));
    }
    match classify_angle(theta, tau)? {
        AngleRegime::Generic => Ok(()),
        AngleRegime::HopfCylinder => Err(Error::Precondition(format!(
            "angle {theta} is a Hopf cylinder; use hopf_cylinder"
        ))),
        AngleRegime::Leaf => unreachable!("tau != 0 rejects theta = 0"),
    }
}

/// Regular curve in the base `(x, y)` plane.
pub trait PlanarCurve {
    fn point(&self, s: f64) -> (f64, f64);
    fn velocity(&self, s: f64) -> (f64, f64);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub origin: (f64, f64),
    pub direction: (f64, f64),
}

impl PlanarCurve for Line {
    fn point(&self, s: f64) -> (f64, f64) {
        (
            self.origin.0 + s * self.direction.0,
            self.origin.1 + s * self.direction.1,
        )
    }
    fn velocity(&self, _s: f64) -> (f64, f64) {
        self.direction
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: (f64, f64),
    pub radius: f64,
}

impl Circle {
    pub const UNIT: Self = Self {
        center: (0.0, 0.0),
        radius: 1.0,
    };
}

impl PlanarCurve for Circle {
    fn point(&self, s: f64) -> (f64, f64) {
        (
            self.center.0 + self.radius * cos(s),
            self.center.1 + self.radius * sin(s),
        )
    }
    fn velocity(&self, s: f64) -> (f64, f64) {
        (-self.radius * sin(s), self.radius * cos(s))
    }
}

/// Preimage `F(s, t) = (g1(s), g2(s), t)` of a base curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopfCylinder<C> {
    pub params: AmbientParams,
    pub curve: C,
    pub domain: ParamDomain,
    pub orientation: Orientation,
}

pub fn hopf_cylinder<C: PlanarCurve>(curve: C, params: AmbientParams) -> HopfCylinder<C> {
    HopfCylinder {
        params,
        curve,
        domain: ParamDomain::UNBOUNDED,
        orientation: Orientation::Positive,
    }
}

impl<C> HopfCylinder<C> {
    pub fn with_domain(mut self, domain: ParamDomain) -> Self {
        self.domain = domain;
        self
    }
}

impl<C: PlanarCurve> Immersion for HopfCylinder<C> {
    fn params(&self) -> AmbientParams {
        self.params
    }
    fn domain(&self) -> ParamDomain {
        self.domain
    }
    fn position(&self, s: f64, t: f64) -> Result<AmbientPoint> {
        let (x, y) = self.curve.point(s);
        let p = AmbientPoint::new(x, y, t);
        self.params.check(&p)?;
        Ok(p)
    }
    fn partials(&self, s: f64, _t: f64) -> Result<[CoordVector; 2]> {
        let (dx, dy) = self.curve.velocity(s);
        if !(libm::hypot(dx, dy) > 0.0) {
            return Err(Error::SingularCurve { s });
        }
        Ok([CoordVector::new(dx, dy, 0.0), CoordVector::new(0.0, 0.0, 1.0)])
    }
    fn orientation(&self) -> Orientation {
        self.orientation
    }
}

/// Data of the explicit family: `theta`, `tau` and the profile polynomials
/// `f1`, `f2` (degree at most one) and `f3` (degree at most two) with
/// `f1'^2 + f2'^2 = sin^2(theta)` and `f3' = f1' f2 - f1 f2'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantAngleSpec {
    theta: f64,
    tau: f64,
    f1: Polynomial,
    f2: Polynomial,
    f3: Polynomial,
}

impl ConstantAngleSpec {
    /// Validates user-supplied profiles.
    pub fn new(theta: f64, tau: f64, f1: Polynomial, f2: Polynomial, f3: Polynomial) -> Result<Self> {
        require_generic(theta, tau)?;
        if f1.degree() > 1 || f2.degree() > 1 {
            return Err(Error::InvalidSpec("f1 and f2 must have degree at most one".into()));
        }
        let (p, q) = (f1.coeffs[1], f2.coeffs[1]);
        let s = sin(theta);
        let speed = p * p + q * q - s * s;
        if abs(speed) > SPEC_TOLERANCE {
            return Err(Error::InvalidSpec(format!(
                "f1'^2 + f2'^2 - sin^2(theta) = {speed:e}, must vanish"
            )));
        }
        let scale = 1.0 + f1.coeffs[0].abs().max(f2.coeffs[0].abs());
        let d3 = f3.derivative();
        let rhs = p * f2.coeffs[0] - f1.coeffs[0] * q;
        let defect = abs(d3.coeffs[0] - rhs).max(abs(d3.coeffs[1]));
        if defect > SPEC_TOLERANCE * scale {
            return Err(Error::InvalidSpec(format!(
                "f3' - (f1' f2 - f1 f2') = {defect:e}, must vanish"
            )));
        }
        Ok(Self { theta, tau, f1, f2, f3 })
    }

    /// Builds profiles with `f1' = sin(theta) sin(delta)`,
    /// `f2' = sin(theta) cos(delta)`, so the speed identity holds by
    /// construction. `f3` is the primitive with `f3(0) = f3_0`.
    pub fn from_direction(theta: f64, tau: f64, delta: f64, f1_0: f64, f2_0: f64, f3_0: f64) -> Result<Self> {
        require_generic(theta, tau)?;
        let (p, q) = (sin(theta) * sin(delta), sin(theta) * cos(delta));
        Ok(Self {
            theta,
            tau,
            f1: Polynomial::linear(f1_0, p),
            f2: Polynomial::linear(f2_0, q),
            f3: Polynomial::linear(f3_0, p * f2_0 - f1_0 * q),
        })
    }

    /// `theta = pi/4`, `f1 = f3 = 0`, `f2 = v / sqrt(2)`: a ruled surface
    /// over a helix.
    pub fn example(tau: f64) -> Result<Self> {
        Self::new(
            core::f64::consts::FRAC_PI_4,
            tau,
            Polynomial::constant(0.0),
            Polynomial::linear(0.0, core::f64::consts::FRAC_1_SQRT_2),
            Polynomial::constant(0.0),
        )
    }

    /// The member of the family that coincides with the surface integrated
    /// from `fields` through `p0` at `anchor = (u, v)`, after the change of
    /// coordinate `u -> phi(u)`. Requires a constant `varphi`.
    pub fn matching<V: Profile>(fields: &ProofFields<V>, p0: AmbientPoint, anchor: (f64, f64)) -> Result<Self> {
        let varphi = fields.varphi.at(anchor.1);
        let (theta, tau) = (fields.theta, fields.tau);
        let tan_t = tan(theta);
        let amp = tan_t / (2.0 * tau);
        let delta = fields.c - varphi;
        // The integrated surface moves along (sin(delta), -cos(delta)) in v.
        let (p, q) = (sin(theta) * sin(delta), -sin(theta) * cos(delta));
        let (u0, v0) = (fields.phi(anchor.0), anchor.1);
        let f1_0 = p0.x - amp * sin(u0) - p * v0;
        let f2_0 = p0.y + amp * cos(u0) - q * v0;
        let (f1v, f2v) = (f1_0 + p * v0, f2_0 + q * v0);
        let f3v =
            (-tan_t * tan_t / (4.0 * tau) * u0 - 0.5 * tan_t * cos(u0) * f1v - 0.5 * tan_t * sin(u0) * f2v - p0.z)
                / tau;
        let slope = p * f2_0 - f1_0 * q;
        Self::new(
            theta,
            tau,
            Polynomial::linear(f1_0, p),
            Polynomial::linear(f2_0, q),
            Polynomial::linear(f3v - slope * v0, slope),
        )
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn profiles(&self) -> [Polynomial; 3] {
        [self.f1, self.f2, self.f3]
    }
    pub fn params(&self) -> AmbientParams {
        AmbientParams::nil3(self.tau)
    }
}

/// The explicit parametrization of the generic family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Theorem1Surface {
    pub spec: ConstantAngleSpec,
    pub domain: ParamDomain,
}

pub fn theorem1_surface(spec: ConstantAngleSpec) -> Theorem1Surface {
    Theorem1Surface {
        spec,
        domain: ParamDomain::UNBOUNDED,
    }
}

impl Theorem1Surface {
    pub fn with_domain(mut self, domain: ParamDomain) -> Self {
        self.domain = domain;
        self
    }

    fn consts(&self) -> (f64, f64, f64) {
        let t = tan(self.spec.theta);
        (t, t / (2.0 * self.spec.tau), self.spec.tau)
    }

    /// `sin` of the angle between `F_u` and `F_v`; zero on the singular set.
    pub fn regularity(&self, u: f64, v: f64) -> f64 {
        let (p, q) = (self.spec.f1.derivative().eval(v), self.spec.f2.derivative().eval(v));
        abs(q * cos(u) - p * sin(u)) / sin(self.spec.theta)
    }
}

impl Immersion for Theorem1Surface {
    fn params(&self) -> AmbientParams {
        self.spec.params()
    }
    fn domain(&self) -> ParamDomain {
        self.domain
    }
    fn position(&self, u: f64, v: f64) -> Result<AmbientPoint> {
        let (t, amp, tau) = self.consts();
        let [f1, f2, f3] = self.spec.profiles().map(|f| f.eval(v));
        Ok(AmbientPoint::new(
            amp * sin(u) + f1,
            -amp * cos(u) + f2,
            -t * t / (4.0 * tau) * u - 0.5 * t * cos(u) * f1 - 0.5 * t * sin(u) * f2 - tau * f3,
        ))
    }
    fn partials(&self, u: f64, v: f64) -> Result<[CoordVector; 2]> {
        let (t, amp, tau) = self.consts();
        let [f1, f2, _] = self.spec.profiles().map(|f| f.eval(v));
        let [d1, d2, d3] = self.spec.profiles().map(|f| f.derivative().eval(v));
        let (c, s) = (cos(u), sin(u));
        Ok([
            CoordVector::new(
                amp * c,
                amp * s,
                -t * t / (4.0 * tau) + 0.5 * t * s * f1 - 0.5 * t * c * f2,
            ),
            CoordVector::new(d1, d2, -0.5 * t * c * d1 - 0.5 * t * s * d2 - tau * d3),
        ])
    }
}

/// Closed forms of the coordinate construction with `d/du = T`:
///
/// ```text
/// psi    = varphi(v) - 2 tau cos^2(theta) u
/// lambda = 2 tau cos(theta) tan(psi)
/// a      = sin(psi) / cos(theta),   b = cos(psi)
/// phi    = -2 tau cos^2(theta) u + c
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProofFields<V> {
    theta: f64,
    tau: f64,
    pub varphi: V,
    pub c: f64,
}

impl<V: Profile> ProofFields<V> {
    pub fn new(theta: f64, tau: f64, varphi: V, c: f64) -> Result<Self> {
        require_generic(theta, tau)?;
        Ok(Self { theta, tau, varphi, c })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn params(&self) -> AmbientParams {
        AmbientParams::nil3(self.tau)
    }

    fn rate(&self) -> f64 {
        let c = cos(self.theta);
        2.0 * self.tau * c * c
    }

    pub fn psi(&self, u: f64, v: f64) -> f64 {
        self.varphi.at(v) - self.rate() * u
    }

    /// Horizontal angle of the normal, `N = sin(theta)(cos phi e1 + sin phi e2) + cos(theta) e3`.
    pub fn phi(&self, u: f64) -> f64 {
        -self.rate() * u + self.c
    }

    pub fn check_pole(&self, u: f64, v: f64) -> Result<f64> {
        let psi = self.psi(u, v);
        if tan_pole_distance(psi) < POLE_MARGIN {
            Err(Error::Singularity { u, v })
        } else {
            Ok(psi)
        }
    }

    pub fn lambda(&self, u: f64, v: f64) -> Result<f64> {
        let psi = self.check_pole(u, v)?;
        Ok(2.0 * self.tau * cos(self.theta) * tan(psi))
    }

    pub fn ab(&self, u: f64, v: f64) -> (f64, f64) {
        let psi = self.psi(u, v);
        (sin(psi) / cos(self.theta), cos(psi))
    }

    /// `d/du lambda + lambda^2 cos(theta) + 4 tau^2 cos^3(theta)`.
    pub fn riccati_residual(&self, u: f64, v: f64) -> Result<f64> {
        let c = cos(self.theta);
        let l = self.lambda(u, v)?;
        let dl = central4(|t| self.lambda(u + t, v), RESIDUAL_STEP)?;
        Ok(dl + l * l * c + 4.0 * self.tau * self.tau * c * c * c)
    }

    /// `[d/du a + 2 tau b cos(theta), d/du b - lambda b cos(theta)]`.
    pub fn bracket_residuals(&self, u: f64, v: f64) -> Result<[f64; 2]> {
        let c = cos(self.theta);
        let (_, b) = self.ab(u, v);
        let da = central4(|t| Ok(self.ab(u + t, v).0), RESIDUAL_STEP)?;
        let db = central4(|t| Ok(self.ab(u + t, v).1), RESIDUAL_STEP)?;
        Ok([da + 2.0 * self.tau * b * c, db - self.lambda(u, v)? * b * c])
    }

    /// `[d/du phi + 2 tau cos^2(theta), d/dv phi]`.
    pub fn phi_residuals(&self, u: f64) -> Result<[f64; 2]> {
        let du = central4(|t| Ok(self.phi(u + t)), RESIDUAL_STEP)?;
        Ok([du + self.rate(), 0.0])
    }

    /// `T` and `JT` in frame components for the normal angle `phi`.
    pub fn frame_fields(&self, phi: f64) -> [TangentVector; 2] {
        tangent_pair(self.theta, phi)
    }
}

/// `T = e3 - cos(theta) N` and `JT = N x T` for the normal with horizontal
/// angle `phi`.
pub fn tangent_pair(theta: f64, phi: f64) -> [TangentVector; 2] {
    let (s, c) = (sin(theta), cos(theta));
    let (sp, cp) = (sin(phi), cos(phi));
    [
        TangentVector::new(-s * c * cp, -s * c * sp, s * s),
        TangentVector::new(s * sp, -s * cp, 0.0),
    ]
}

/// Rebuilds the surface from the proof fields by integrating
/// `F_u = T(phi(u))`, `F_v = a T + b JT` with RK4 (u-line through the anchor
/// first, then every v-line). Every right-hand-side evaluation checks the
/// pole margin of `psi`.
pub fn integrate_distribution<V: Profile>(
    fields: &ProofFields<V>,
    p0: AmbientPoint,
    spec: GridSpec,
    options: SweepOptions,
) -> Result<GridSurface> {
    let params = fields.params();
    let coords = |y: &[f64; 3], t: TangentVector| -> Result<[f64; 3]> {
        Ok(params.to_coords(&AmbientPoint::from_array(*y), t)?.0)
    };
    let values = sweep(
        &spec,
        p0.to_array(),
        options,
        |u, v, y| {
            fields.check_pole(u, v)?;
            coords(y, fields.frame_fields(fields.phi(u))[0])
        },
        |u, v, y| {
            fields.check_pole(u, v)?;
            let [t, jt] = fields.frame_fields(fields.phi(u));
            let (a, b) = fields.ab(u, v);
            coords(y, t * a + jt * b)
        },
    )?;
    GridSurface::new(params, spec, values.into_iter().map(AmbientPoint::from_array).collect())
}

/// Horizontal angle of the measured normal.
pub fn measured_phi<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<f64> {
    let n = angle_and_projections(imm, u, v)?.normal;
    Ok(atan2(n[1], n[0]))
}

/// `[d/du phi, d/dv phi]` of the measured normal angle.
pub fn measured_phi_derivatives<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> Result<[f64; 2]> {
    let base = measured_phi(imm, u, v)?;
    let rel = |a: f64, b: f64| Ok(wrap_angle(measured_phi(imm, a, b)? - base));
    let [hu, hv] = imm.step();
    Ok([central4(|t| rel(u + t, v), hu)?, central4(|t| rel(u, v + t), hv)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{gaussian_curvature_extrinsic, shape_operator, ShapeBasis};
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn angle_regimes() {
        assert!(matches!(classify_angle(0.0, 0.5), Err(Error::NonIntegrable { .. })));
        assert!(matches!(classify_angle(1e-12, 0.5), Err(Error::NonIntegrable { .. })));
        assert_eq!(classify_angle(0.0, 0.0).unwrap(), AngleRegime::Leaf);
        assert_eq!(classify_angle(FRAC_PI_2, 0.5).unwrap(), AngleRegime::HopfCylinder);
        assert_eq!(classify_angle(0.3, 0.5).unwrap(), AngleRegime::Generic);
        assert!(classify_angle(2.0, 0.5).is_err());
        assert!(matches!(
            ProofFields::new(FRAC_PI_2, 0.5, 0.0, 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn example_surface_point() {
        let s = theorem1_surface(ConstantAngleSpec::example(0.5).unwrap());
        let p = s.position(0.0, 0.0).unwrap();
        assert!(p.distance(&AmbientPoint::new(0.0, -1.0, 0.0)) < 1e-15);
        let (u, v) = (0.7, -0.4);
        let p = s.position(u, v).unwrap();
        let expect = AmbientPoint::new(
            sin(u),
            -cos(u) + v * FRAC_1_SQRT_2,
            -0.5 * u - v * sin(u) / (2.0 * 2f64.sqrt()),
        );
        assert!(p.distance(&expect) < 1e-14);
    }

    #[test]
    fn spec_rejects_bad_profiles() {
        let bad = ConstantAngleSpec::new(
            FRAC_PI_4,
            0.5,
            Polynomial::constant(0.0),
            Polynomial::linear(0.0, 0.8),
            Polynomial::constant(0.0),
        );
        assert!(matches!(bad, Err(Error::InvalidSpec(_))));
        let bad_f3 = ConstantAngleSpec::new(
            FRAC_PI_4,
            0.5,
            Polynomial::constant(1.0),
            Polynomial::linear(0.0, FRAC_1_SQRT_2),
            Polynomial::constant(0.0),
        );
        assert!(matches!(bad_f3, Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn analytic_partials_match_differences() {
        let spec = ConstantAngleSpec::from_direction(FRAC_PI_3, 1.0, 0.4, 0.3, -0.2, 0.1).unwrap();
        let s = theorem1_surface(spec);
        let exact = s.partials(0.3, 0.8).unwrap();
        let fd = crate::surface::fd_partials(&s, 0.3, 0.8).unwrap();
        for k in 0..2 {
            assert!((exact[k] - fd[k]).max_abs() < 1e-10);
        }
    }

    #[test]
    fn constant_angle_and_curvature() {
        for (theta, tau) in [(FRAC_PI_6, 0.5), (FRAC_PI_4, 1.0), (FRAC_PI_3, 0.5)] {
            let s = theorem1_surface(ConstantAngleSpec::from_direction(theta, tau, 0.2, 0.1, 0.3, 0.0).unwrap());
            let (u, v) = (0.4, 0.2);
            let pr = angle_and_projections(&s, u, v).unwrap();
            assert!((pr.theta - theta).abs() < 1e-8);
            let k = gaussian_curvature_extrinsic(&s, u, v).unwrap();
            let c = cos(theta);
            assert!((k + 4.0 * tau * tau * c * c).abs() < 1e-6, "{k}");
            let so = shape_operator(&s, u, v, ShapeBasis::TJt).unwrap();
            assert!(so.matrix[0][0].abs() < 1e-6);
            assert!((so.matrix[0][1] + tau).abs() < 1e-6);
        }
    }

    #[test]
    fn closed_form_values() {
        let pf = ProofFields::new(FRAC_PI_3, 0.5, 0.0, 0.0).unwrap();
        assert_eq!(pf.lambda(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(pf.ab(0.0, 0.0), (0.0, 1.0));
        let pf = ProofFields::new(FRAC_PI_3, 0.5, FRAC_PI_6, 0.0).unwrap();
        assert!((pf.lambda(0.0, 0.0).unwrap() - 0.5 / 3f64.sqrt()).abs() < 1e-15);
        let pole = ProofFields::new(FRAC_PI_3, 0.5, FRAC_PI_2 + 1e-4, 0.0).unwrap();
        assert!(matches!(pole.lambda(0.0, 0.0), Err(Error::Singularity { .. })));
        assert!(pf.riccati_residual(0.3, 0.1).unwrap().abs() < 1e-8);
        let [r1, r2] = pf.bracket_residuals(0.3, 0.1).unwrap();
        assert!(r1.abs() < 1e-8 && r2.abs() < 1e-8);
    }

    #[test]
    fn hopf_cylinder_is_vertical() {
        let cyl = hopf_cylinder(Circle::UNIT, AmbientParams::nil3(0.5));
        let pr = angle_and_projections(&cyl, 0.3, 0.2).unwrap();
        assert!((pr.theta - FRAC_PI_2).abs() < 1e-12);
        assert!(pr.cos_theta.abs() < 1e-12);
        let stalled = hopf_cylinder(
            Line {
                origin: (0.0, 0.0),
                direction: (0.0, 0.0),
            },
            AmbientParams::nil3(0.5),
        );
        assert!(matches!(stalled.partials(0.0, 0.0), Err(Error::SingularCurve { .. })));
    }

    #[test]
    fn reconstruction_matches_example() {
        let pf = ProofFields::new(FRAC_PI_4, 0.5, -PI, 0.0).unwrap();
        let p0 = AmbientPoint::new(0.0, -1.0, 0.0);
        let grid = GridSpec::new((-0.5, 0.5), (-0.25, 0.25), 11, 6).unwrap();
        let opts = SweepOptions {
            anchor: Some((0.0, 0.0)),
            ..SweepOptions::default()
        };
        let built = integrate_distribution(&pf, p0, grid, opts).unwrap();
        let spec = ConstantAngleSpec::matching(&pf, p0, (0.0, 0.0)).unwrap();
        let [f1, f2, f3] = spec.profiles();
        assert!(f1.coeffs.iter().all(|c| c.abs() < 1e-15));
        assert!((f2.coeffs[1] - FRAC_1_SQRT_2).abs() < 1e-15 && f2.coeffs[0].abs() < 1e-15);
        assert!(f3.coeffs.iter().all(|c| c.abs() < 1e-15));
        let explicit = theorem1_surface(spec);
        for (i, j, u, v) in grid.nodes() {
            let q = explicit.position(pf.phi(u), v).unwrap();
            assert!(built.point(i, j).distance(&q) < 1e-9, "({u}, {v})");
        }
    }
}
