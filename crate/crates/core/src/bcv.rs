//! Constant-angle surfaces in a general `M(kappa, tau)`.
//!
//! With `d/du = T`, `d/dv = aT + bJT` the shape-operator entry `lambda`
//! obeys a Riccati equation whose solution depends on the sign of
//! `r^2 = kappa sin^2(theta) + 4 tau^2 cos^2(theta)`; only `r^2 > 0` is
//! handled. The surface itself is found by integrating an eight-equation
//! system for `(F1, F2, F3, phi)`, where `phi` is the horizontal angle of
//! the normal. A closed form is known only for the `u`-equations of
//! `F1`, `F2`, `phi` ([`RemarkFields`]).

use crate::ambient::{AmbientParams, AmbientPoint};
use crate::constant_angle::{classify_angle, AngleRegime, POLE_MARGIN, RESIDUAL_STEP, THETA_THRESHOLD};
use crate::diff::central4;
use crate::grid::{GridSpec, GridSurface};
use crate::linalg::{abs, atan, cos, sin, sqrt, tan, tan_pole_distance, wrap_angle};
use crate::ode::{sweep, SweepOptions};
use crate::profile::Profile;
use crate::surface::{
    angle_and_projections, compatibility_residuals, constant_angle_residuals, gaussian_curvature_extrinsic,
    gaussian_curvature_intrinsic, Immersion,
};
use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

/// `kappa sin^2(theta) + 4 tau^2 cos^2(theta)`.
pub fn r_squared(kappa: f64, tau: f64, theta: f64) -> f64 {
    let (s, c) = (sin(theta), cos(theta));
    kappa * s * s + 4.0 * tau * tau * c * c
}

fn positive_r(kappa: f64, tau: f64, theta: f64) -> Result<f64> {
    let r2 = r_squared(kappa, tau, theta);
    if r2 > 0.0 {
        Ok(sqrt(r2))
    } else {
        Err(Error::UnsolvedBranch { r_squared: r2 })
    }
}

fn require_open_angle(theta: f64) -> Result<()> {
    if theta > THETA_THRESHOLD && theta < FRAC_PI_2 - THETA_THRESHOLD {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "angle {theta} must lie strictly inside (0, pi/2)"
        )))
    }
}

/// `lambda = r tan(psi)`, `a = (2 tau / r) sin(psi)`, `b = cos(psi)` with
/// `psi = varphi(v) - r cos(theta) u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BcvFields<V> {
    params: AmbientParams,
    theta: f64,
    r: f64,
    pub varphi: V,
}

impl<V: Profile> BcvFields<V> {
    pub fn new(params: AmbientParams, theta: f64, varphi: V) -> Result<Self> {
        let r = positive_r(params.kappa, params.tau, theta)?;
        require_open_angle(theta)?;
        Ok(Self {
            params,
            theta,
            r,
            varphi,
        })
    }

    pub fn params(&self) -> AmbientParams {
        self.params
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn psi(&self, u: f64, v: f64) -> f64 {
        self.varphi.at(v) - self.r * cos(self.theta) * u
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
        Ok(self.r * tan(self.check_pole(u, v)?))
    }

    pub fn ab(&self, u: f64, v: f64) -> (f64, f64) {
        let psi = self.psi(u, v);
        (2.0 * self.params.tau / self.r * sin(psi), cos(psi))
    }

    pub fn lambda_a_b(&self, u: f64, v: f64) -> Result<(f64, f64, f64)> {
        let l = self.lambda(u, v)?;
        let (a, b) = self.ab(u, v);
        Ok((l, a, b))
    }

    /// `d/du lambda + lambda^2 cos + kappa cos sin^2 + 4 tau^2 cos^3`.
    pub fn riccati_residual(&self, u: f64, v: f64) -> Result<f64> {
        let (s, c) = (sin(self.theta), cos(self.theta));
        let l = self.lambda(u, v)?;
        let dl = central4(|t| self.lambda(u + t, v), RESIDUAL_STEP)?;
        let tau = self.params.tau;
        Ok(dl + l * l * c + self.params.kappa * c * s * s + 4.0 * tau * tau * c * c * c)
    }

    /// `[d/du a + 2 tau b cos, d/du b - lambda b cos]`.
    pub fn bracket_residuals(&self, u: f64, v: f64) -> Result<[f64; 2]> {
        let c = cos(self.theta);
        let (_, b) = self.ab(u, v);
        let da = central4(|t| Ok(self.ab(u + t, v).0), RESIDUAL_STEP)?;
        let db = central4(|t| Ok(self.ab(u + t, v).1), RESIDUAL_STEP)?;
        Ok([da + 2.0 * self.params.tau * b * c, db - self.lambda(u, v)? * b * c])
    }

    /// Right-hand side `d/du (F1, F2, F3, phi)`.
    pub fn flow_u(&self, state: &[f64; 4]) -> Result<[f64; 4]> {
        let [f1, f2, _, phi] = *state;
        let (s, c) = (sin(self.theta), cos(self.theta));
        let (sp, cp) = (sin(phi), cos(phi));
        let (kappa, tau) = (self.params.kappa, self.params.tau);
        let w = self.params.check(&AmbientPoint::new(f1, f2, state[2]))?;
        Ok([
            -s * c * cp * w,
            -s * c * sp * w,
            -s * (-tau * f2 * c * cp + tau * f1 * c * sp - s),
            -0.5 * kappa * s * c * (f1 * sp - f2 * cp) - 2.0 * tau * c * c,
        ])
    }

    /// Right-hand side `d/dv (F1, F2, F3, phi)` at parameter `(u, v)`.
    pub fn flow_v(&self, u: f64, v: f64, state: &[f64; 4]) -> Result<[f64; 4]> {
        let (lambda, a, b) = self.lambda_a_b(u, v)?;
        let du = self.flow_u(state)?;
        let [f1, f2, _, phi] = *state;
        let s = sin(self.theta);
        let (sp, cp) = (sin(phi), cos(phi));
        let (kappa, tau) = (self.params.kappa, self.params.tau);
        let w = self.params.conformal(f1, f2);
        Ok([
            a * du[0] + b * s * sp * w,
            a * du[1] - b * s * cp * w,
            a * du[2] - b * tau * s * (f2 * sp + f1 * cp),
            a * du[3] + b * (lambda - 0.5 * kappa * s * (f1 * cp + f2 * sp)),
        ])
    }
}

/// Closed-form `lambda`, `a`, `b`.
pub fn bcv_lambda_a_b(
    kappa: f64,
    tau: f64,
    theta: f64,
    varphi: impl Profile,
    (u, v): (f64, f64),
) -> Result<(f64, f64, f64)> {
    BcvFields::new(AmbientParams::new(kappa, tau), theta, varphi)?.lambda_a_b(u, v)
}

/// Closed form for the `u`-equations of `F1`, `F2`, `phi`:
///
/// ```text
/// F1  =  sin(2 theta) / (2D) sin(phi) + L cos(rho)
/// F2  = -sin(2 theta) / (2D) cos(phi) + L sin(rho)
/// phi =  rho + 2 atan((-A + R tan(-R u / 2 + C)) / B),   R = sqrt(B^2 - A^2)
/// A   =  (kappa / 4) sin(2 theta) L
/// B   =  D + (kappa / 4)(sin^2(2 theta) / (4D) + D L^2)
/// ```
///
/// The `F1`, `F2` equations hold for every `D`, `L`. The `phi` equation and
/// `B^2 - A^2 = r^2 cos^2(theta)` additionally need
/// `D + kappa D L^2 / 4 - kappa sin^2 cos^2 / (4D) = 2 tau cos^2`; see
/// [`RemarkFields::constraint_defect`] and [`constrained_d`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemarkFields<D, L, P, C> {
    params: AmbientParams,
    theta: f64,
    pub d: D,
    pub l: L,
    pub rho: P,
    pub c: C,
}

/// Closed-form values at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemarkPoint {
    pub f1: f64,
    pub f2: f64,
    pub phi: f64,
}

impl<D: Profile, L: Profile, P: Profile, C: Profile> RemarkFields<D, L, P, C> {
    pub fn new(params: AmbientParams, theta: f64, d: D, l: L, rho: P, c: C) -> Result<Self> {
        positive_r(params.kappa, params.tau, theta)?;
        require_open_angle(theta)?;
        Ok(Self {
            params,
            theta,
            d,
            l,
            rho,
            c,
        })
    }

    pub fn params(&self) -> AmbientParams {
        self.params
    }

    fn d_at(&self, v: f64) -> Result<f64> {
        let d = self.d.at(v);
        if d == 0.0 || !d.is_finite() {
            Err(Error::ZeroD { v })
        } else {
            Ok(d)
        }
    }

    pub fn a(&self, v: f64) -> f64 {
        0.25 * self.params.kappa * sin(2.0 * self.theta) * self.l.at(v)
    }

    pub fn b(&self, v: f64) -> Result<f64> {
        let d = self.d_at(v)?;
        let l = self.l.at(v);
        let s2 = sin(2.0 * self.theta);
        Ok(d + 0.25 * self.params.kappa * (s2 * s2 / (4.0 * d) + d * l * l))
    }

    /// `B^2 - A^2 - r^2 cos^2(theta)`.
    pub fn identity_defect(&self, v: f64) -> Result<f64> {
        let (a, b) = (self.a(v), self.b(v)?);
        let c = cos(self.theta);
        Ok(b * b - a * a - r_squared(self.params.kappa, self.params.tau, self.theta) * c * c)
    }

    /// `D + kappa D L^2 / 4 - kappa sin^2 cos^2 / (4D) - 2 tau cos^2`.
    pub fn constraint_defect(&self, v: f64) -> Result<f64> {
        let d = self.d_at(v)?;
        let l = self.l.at(v);
        Ok(constraint(self.params, self.theta, d, l))
    }

    pub fn closed_form(&self, u: f64, v: f64) -> Result<RemarkPoint> {
        let d = self.d_at(v)?;
        let (a, b) = (self.a(v), self.b(v)?);
        if b == 0.0 {
            return Err(Error::BranchInconsistency { v });
        }
        let disc = b * b - a * a;
        if !(disc > 0.0) {
            return Err(Error::UnsolvedBranch { r_squared: disc });
        }
        let big_r = sqrt(disc);
        let arg = -0.5 * big_r * u + self.c.at(v);
        if tan_pole_distance(arg) < POLE_MARGIN {
            return Err(Error::Singularity { u, v });
        }
        let rho = self.rho.at(v);
        let phi = rho + 2.0 * atan((-a + big_r * tan(arg)) / b);
        let amp = sin(2.0 * self.theta) / (2.0 * d);
        let l = self.l.at(v);
        Ok(RemarkPoint {
            f1: amp * sin(phi) + l * cos(rho),
            f2: -amp * cos(phi) + l * sin(rho),
            phi,
        })
    }

    /// Residuals of the `u`-equations of `phi`, `F1`, `F2`.
    pub fn u_residuals(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        let p = self.closed_form(u, v)?;
        let at = |t: f64| self.closed_form(u + t, v).map(|q| [q.phi, q.f1, q.f2]);
        let [dphi, df1, df2] = central4(|t| unwrap_phi(at(t)?, p.phi), RESIDUAL_STEP)?;
        let (s, c) = (sin(self.theta), cos(self.theta));
        let (sp, cp) = (sin(p.phi), cos(p.phi));
        let kappa = self.params.kappa;
        let w = self.params.conformal(p.f1, p.f2);
        Ok([
            dphi - (-0.5 * kappa * s * c * (p.f1 * sp - p.f2 * cp) - 2.0 * self.params.tau * c * c),
            df1 + s * c * cp * w,
            df2 + s * c * sp * w,
        ])
    }

    /// Residuals of the `v`-equations of `phi`, `F1`, `F2` for the given
    /// `varphi` (the closed form does not claim these).
    pub fn v_residuals(&self, varphi: impl Profile, u: f64, v: f64) -> Result<[f64; 3]> {
        let fields = BcvFields::new(self.params, self.theta, varphi)?;
        let p = self.closed_form(u, v)?;
        let at = |t: f64| self.closed_form(u, v + t).map(|q| [q.phi, q.f1, q.f2]);
        let [dphi, df1, df2] = central4(|t| unwrap_phi(at(t)?, p.phi), RESIDUAL_STEP)?;
        let rhs = fields.flow_v(u, v, &[p.f1, p.f2, 0.0, p.phi])?;
        Ok([dphi - rhs[3], df1 - rhs[0], df2 - rhs[1]])
    }
}

fn unwrap_phi(mut q: [f64; 3], base: f64) -> Result<[f64; 3]> {
    q[0] = base + wrap_angle(q[0] - base);
    Ok(q)
}

fn constraint(params: AmbientParams, theta: f64, d: f64, l: f64) -> f64 {
    let (s, c) = (sin(theta), cos(theta));
    let k = params.kappa;
    d + 0.25 * k * d * l * l - 0.25 * k * s * s * c * c / d - 2.0 * params.tau * c * c
}

/// Roots `D` of the constraint under which the closed form solves the
/// `phi` equation, for a given `L` (smaller root first).
pub fn constrained_d(params: AmbientParams, theta: f64, l: f64) -> Option<[f64; 2]> {
    let (s, c) = (sin(theta), cos(theta));
    let k = params.kappa;
    let qa = 1.0 + 0.25 * k * l * l;
    let qb = -2.0 * params.tau * c * c;
    let qc = -0.25 * k * s * s * c * c;
    if qa == 0.0 {
        return (qb != 0.0).then(|| [-qc / qb; 2]);
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return None;
    }
    // Stable form: no cancellation between -qb and sqrt(disc).
    let q = -0.5 * (qb + libm::copysign(sqrt(disc), qb));
    if q == 0.0 {
        return None;
    }
    let (r1, r2) = (q / qa, qc / q);
    let roots = [r1.min(r2), r1.max(r2)];
    roots.iter().all(|&d| d != 0.0).then_some(roots)
}

impl RemarkFields<f64, f64, f64, f64> {
    /// Constants that reproduce the `u`-flow through `(F1, F2, phi)` at
    /// parameter `u0` (with `F3` irrelevant). `D` is read from
    /// `phi_u = -D (1 + kappa/4 (F1^2 + F2^2))`.
    pub fn from_initial(params: AmbientParams, theta: f64, start: [f64; 4], u0: f64) -> Result<Self> {
        let fields = BcvFields::new(params, theta, 0.0)?;
        let [f1, f2, _, phi0] = start;
        let rate = fields.flow_u(&start)?[3];
        let w = params.conformal(f1, f2);
        let d = -rate / w;
        if d == 0.0 {
            return Err(Error::ZeroD { v: 0.0 });
        }
        let amp = sin(2.0 * theta) / (2.0 * d);
        let (cx, cy) = (f1 - amp * sin(phi0), f2 + amp * cos(phi0));
        let l = libm::hypot(cx, cy);
        let rho = if l > 0.0 { libm::atan2(cy, cx) } else { 0.0 };
        let mut out = Self::new(params, theta, d, l, rho, 0.0)?;
        let (a, b) = (out.a(0.0), out.b(0.0)?);
        if b == 0.0 {
            return Err(Error::BranchInconsistency { v: 0.0 });
        }
        let disc = b * b - a * a;
        if !(disc > 0.0) {
            return Err(Error::UnsolvedBranch { r_squared: disc });
        }
        let big_r = sqrt(disc);
        let chi = wrap_angle(phi0 - rho);
        out.c = atan((b * tan(0.5 * chi) + a) / big_r) + 0.5 * big_r * u0;
        Ok(out)
    }
}

/// Output of [`integrate_bcv_system`].
#[derive(Clone, Debug, PartialEq)]
pub struct BcvIntegration {
    pub surface: GridSurface,
    /// Integrated normal angle, same layout as the surface points.
    pub phi: Vec<f64>,
}

/// RK4 integration of the eight equations for `(F1, F2, F3, phi)`, `u`-flow
/// through the anchor first and then every `v`-line.
pub fn integrate_bcv_system<V: Profile>(
    fields: &BcvFields<V>,
    start: [f64; 4],
    spec: GridSpec,
    options: SweepOptions,
) -> Result<BcvIntegration> {
    let values = sweep(
        &spec,
        start,
        options,
        |u, v, y| {
            fields.check_pole(u, v)?;
            fields.flow_u(y)
        },
        |u, v, y| fields.flow_v(u, v, y),
    )?;
    let points = values.iter().map(|y| AmbientPoint::new(y[0], y[1], y[2])).collect();
    Ok(BcvIntegration {
        surface: GridSurface::new(fields.params(), spec, points)?,
        phi: values.iter().map(|y| y[3]).collect(),
    })
}

impl BcvIntegration {
    pub fn state(&self, i: usize, j: usize) -> [f64; 4] {
        let p = self.surface.point(i, j);
        [p.x, p.y, p.z, self.phi[self.surface.spec().index(i, j)]]
    }

    /// Integrability of the system at node `(i, j)`: for each component,
    /// `|d/dv (u-rhs) - d/du (v-rhs)|` with both right-hand sides evaluated
    /// on the stored solution and differentiated across nodes. Needs two
    /// nodes of margin.
    pub fn mixed_partial_defect<V: Profile>(&self, fields: &BcvFields<V>, i: usize, j: usize) -> Result<[f64; 4]> {
        let spec = *self.surface.spec();
        if i < 2 || j < 2 || i + 2 >= spec.nu || j + 2 >= spec.nv {
            return Err(Error::StencilOutOfDomain {
                u: spec.u_at(i.min(spec.nu - 1)),
                v: spec.v_at(j.min(spec.nv - 1)),
            });
        }
        let node = |k: isize, base: usize| (base as isize + k) as usize;
        let gu = |t: isize| fields.flow_u(&self.state(i, node(t, j)));
        let gv = |t: isize| {
            let ii = node(t, i);
            fields.flow_v(spec.u_at(ii), spec.v_at(j), &self.state(ii, j))
        };
        let weights = crate::diff::CENTRAL4_WEIGHTS;
        let mut dv_gu = [0.0; 4];
        let mut du_gv = [0.0; 4];
        for (k, w) in (-2..=2).zip(weights) {
            let (a, b) = (gu(k)?, gv(k)?);
            for m in 0..4 {
                dv_gu[m] += w * a[m] / spec.dv();
                du_gv[m] += w * b[m] / spec.du();
            }
        }
        Ok(core::array::from_fn(|m| abs(dv_gu[m] - du_gv[m])))
    }
}

/// Deviations of a sampled surface from the constant-angle structure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma4Report {
    pub branch: AngleRegime,
    pub samples: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    /// `max |K_extrinsic - (kappa - 4 tau^2) cos^2(theta)|`.
    pub curvature: f64,
    /// Same against the intrinsic curvature.
    pub curvature_intrinsic: f64,
    /// `max(|S11|, |S12 + tau|)`; generic branch only.
    pub shape_pattern: Option<f64>,
    /// Surface connection table; generic branch only.
    pub connection: Option<f64>,
    /// Riccati equation for the measured `lambda`; generic branch only.
    pub riccati: Option<f64>,
    /// Largest compatibility residual.
    pub compatibility: f64,
}

impl Lemma4Report {
    pub fn angle_spread(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    pub fn max_residual(&self) -> f64 {
        [
            Some(self.angle_spread()),
            Some(self.curvature),
            Some(self.curvature_intrinsic),
            self.shape_pattern,
            self.connection,
            self.riccati,
            Some(self.compatibility),
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

/// Measures every constant-angle property at the given samples. The branch
/// is decided by the first sample; samples on a different branch raise
/// [`Error::BasisDegenerate`].
pub fn lemma4_residuals<I: Immersion + ?Sized>(imm: &I, samples: &[(f64, f64)]) -> Result<Lemma4Report> {
    let params = imm.params();
    let first = samples
        .first()
        .ok_or_else(|| Error::Precondition("no samples".into()))?;
    let regime_of = |theta: f64| classify_angle(theta, 0.0);
    let branch = regime_of(angle_and_projections(imm, first.0, first.1)?.theta)?;
    let mut report = Lemma4Report {
        branch,
        samples: samples.len(),
        theta_min: f64::INFINITY,
        theta_max: f64::NEG_INFINITY,
        curvature: 0.0,
        curvature_intrinsic: 0.0,
        shape_pattern: None,
        connection: None,
        riccati: None,
        compatibility: 0.0,
    };
    let k_coeff = params.kappa - 4.0 * params.tau * params.tau;
    for &(u, v) in samples {
        let pr = angle_and_projections(imm, u, v)?;
        if regime_of(pr.theta)? != branch {
            return Err(Error::BasisDegenerate { theta: pr.theta });
        }
        report.theta_min = report.theta_min.min(pr.theta);
        report.theta_max = report.theta_max.max(pr.theta);
        let target = k_coeff * pr.cos_theta * pr.cos_theta;
        report.curvature = report
            .curvature
            .max(abs(gaussian_curvature_extrinsic(imm, u, v)? - target));
        report.curvature_intrinsic = report
            .curvature_intrinsic
            .max(abs(gaussian_curvature_intrinsic(imm, u, v)? - target));
        report.compatibility = report.compatibility.max(compatibility_residuals(imm, u, v)?.max());
        if branch == AngleRegime::Generic {
            let r = constant_angle_residuals(imm, u, v)?;
            let bump = |slot: &mut Option<f64>, x: f64| *slot = Some(slot.unwrap_or(0.0).max(x));
            bump(&mut report.shape_pattern, r.s11.max(r.s12));
            bump(&mut report.connection, r.connection);
            bump(&mut report.riccati, r.riccati);
        }
    }
    Ok(report)
}
