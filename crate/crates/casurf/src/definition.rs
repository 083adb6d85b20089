//! Surface-definition files.
//!
//! A definition is a TOML document with a `family` tag, an `[ambient]`
//! table, a `[grid]` table and one table for the chosen family:
//!
//! ```toml
//! family = "theorem1"        # hopf_cylinder | theorem1 | bcv_integrated | grid_file
//!
//! [ambient]
//! kappa = 0.0
//! tau = 0.5
//!
//! [grid]
//! u = [0.0, "2pi"]
//! v = [-1.0, 1.0]
//! nu = 100
//! nv = 20
//!
//! [theorem1]
//! theta = "pi/4"
//! f1 = [0.0]                 # coefficients, constant term first
//! f2 = [0.0, 0.7071067811865476]
//! f3 = [0.0]
//! # or: delta = 0.0, f1_0 = 0.0, f2_0 = 0.0, f3_0 = 0.0
//!
//! [hopf_cylinder]
//! curve = "circle"           # or "line" with origin = [x, y], direction = [dx, dy]
//! center = [0.0, 0.0]
//! radius = 1.0
//!
//! [bcv_integrated]
//! theta = "pi/3"
//! varphi = [0.0]             # polynomial in v
//! phi0 = 0.0                 # normal angle at the anchor
//! start = [0.0, 0.0, 0.0]    # point at the anchor
//! anchor = [0.0, 0.0]        # optional, defaults to the grid centre
//! step = 1e-3
//!
//! [grid_file]
//! path = "surface.csv"       # relative to the definition file
//!
//! [perturb]
//! fiber_sin_u = 0.01         # adds 0.01 sin(u) to the fiber coordinate
//! ```
//!
//! Numbers may be written as strings using `pi` (see [`crate::expr`]).

use crate::error::{CliError, Result};
use crate::export::read_csv_grid;
use crate::expr::Real;
use casurf_core::bcv::{integrate_bcv_system, BcvFields, BcvIntegration};
use casurf_core::constant_angle::{
    hopf_cylinder, integrate_distribution, theorem1_surface, Circle, ConstantAngleSpec, Line, PlanarCurve, ProofFields,
};
use casurf_core::ode::SweepOptions;
use casurf_core::surface::FiberShift;
use casurf_core::{AmbientParams, AmbientPoint, GridSpec, GridSurface, Immersion, Polynomial};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    HopfCylinder,
    Theorem1,
    BcvIntegrated,
    GridFile,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::HopfCylinder => "hopf_cylinder",
            Family::Theorem1 => "theorem1",
            Family::BcvIntegrated => "bcv_integrated",
            Family::GridFile => "grid_file",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDefinition {
    pub family: Family,
    pub ambient: AmbientSection,
    pub grid: GridSection,
    pub theorem1: Option<Theorem1Section>,
    pub hopf_cylinder: Option<HopfSection>,
    pub bcv_integrated: Option<IntegratedSection>,
    pub grid_file: Option<GridFileSection>,
    #[serde(default)]
    pub perturb: PerturbSection,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSection {
    pub kappa: Real,
    pub tau: Real,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub u: [Real; 2],
    pub v: [Real; 2],
    pub nu: usize,
    pub nv: usize,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Section {
    pub theta: Real,
    pub f1: Option<Vec<f64>>,
    pub f2: Option<Vec<f64>>,
    pub f3: Option<Vec<f64>>,
    pub delta: Option<Real>,
    #[serde(default)]
    pub f1_0: f64,
    #[serde(default)]
    pub f2_0: f64,
    #[serde(default)]
    pub f3_0: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Circle,
    Line,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfSection {
    pub curve: CurveKind,
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default)]
    pub origin: [f64; 2],
    #[serde(default = "unit_x")]
    pub direction: [f64; 2],
}

fn one() -> f64 {
    1.0
}
fn unit_x() -> [f64; 2] {
    [1.0, 0.0]
}
fn default_step() -> f64 {
    casurf_core::ode::DEFAULT_STEP
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratedSection {
    pub theta: Real,
    #[serde(default = "zero_poly")]
    pub varphi: Vec<f64>,
    #[serde(default = "zero_real")]
    pub phi0: Real,
    #[serde(default)]
    pub start: [f64; 3],
    pub anchor: Option<[f64; 2]>,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn zero_poly() -> Vec<f64> {
    vec![0.0]
}
fn zero_real() -> Real {
    Real::Number(0.0)
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFileSection {
    pub path: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSection {
    #[serde(default)]
    pub fiber_sin_u: f64,
}

/// Base curve of a Hopf cylinder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve {
    Circle(Circle),
    Line(Line),
}

impl PlanarCurve for Curve {
    fn point(&self, s: f64) -> (f64, f64) {
        match self {
            Curve::Circle(c) => c.point(s),
            Curve::Line(l) => l.point(s),
        }
    }
    fn velocity(&self, s: f64) -> (f64, f64) {
        match self {
            Curve::Circle(c) => c.velocity(s),
            Curve::Line(l) => l.velocity(s),
        }
    }
}

/// Midpoint of the parameter rectangle.
pub fn grid_center(grid: &GridSpec) -> (f64, f64) {
    (0.5 * (grid.u.0 + grid.u.1), 0.5 * (grid.v.0 + grid.v.1))
}

/// Parameters of an integrated constant-angle surface.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationSetup {
    pub params: AmbientParams,
    pub theta: f64,
    pub varphi: Polynomial,
    /// Normal angle at the anchor.
    pub phi0: f64,
    pub start: AmbientPoint,
    pub anchor: (f64, f64),
    pub step: f64,
    pub grid: GridSpec,
}

impl IntegrationSetup {
    pub fn options(&self) -> SweepOptions {
        SweepOptions {
            anchor: Some(self.anchor),
            max_step: self.step,
        }
    }

    /// `kappa = 0` uses the closed-form normal angle of the Nil3
    /// construction; other `kappa` integrate the full system.
    pub fn uses_nil3(&self) -> bool {
        self.params.kappa == 0.0
    }

    pub fn nil3_fields(&self) -> Result<ProofFields<Polynomial>> {
        let c = self.theta.cos();
        let offset = 2.0 * self.params.tau * c * c * self.anchor.0;
        Ok(ProofFields::new(
            self.theta,
            self.params.tau,
            self.varphi,
            self.phi0 + offset,
        )?)
    }

    pub fn bcv_fields(&self) -> Result<BcvFields<Polynomial>> {
        Ok(BcvFields::new(self.params, self.theta, self.varphi)?)
    }

    pub fn run(&self) -> Result<Integrated> {
        if self.uses_nil3() {
            let fields = self.nil3_fields()?;
            let surface = integrate_distribution(&fields, self.start, self.grid, self.options())?;
            Ok(Integrated::Nil3 { fields, surface })
        } else {
            let fields = self.bcv_fields()?;
            let p = self.start;
            let result = integrate_bcv_system(&fields, [p.x, p.y, p.z, self.phi0], self.grid, self.options())?;
            Ok(Integrated::Bcv { fields, result })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Integrated {
    Nil3 {
        fields: ProofFields<Polynomial>,
        surface: GridSurface,
    },
    Bcv {
        fields: BcvFields<Polynomial>,
        result: BcvIntegration,
    },
}

impl Integrated {
    pub fn surface(&self) -> &GridSurface {
        match self {
            Integrated::Nil3 { surface, .. } => surface,
            Integrated::Bcv { result, .. } => &result.surface,
        }
    }
}

/// A loaded surface together with its sampling grid.
pub struct BuiltSurface {
    pub family: Family,
    pub params: AmbientParams,
    pub grid: GridSpec,
    pub immersion: Box<dyn Immersion>,
    /// Known only at grid nodes; checks keep a stencil margin.
    pub sampled: bool,
    /// Angle the family is constructed with, if any.
    pub target_theta: Option<f64>,
}

impl BuiltSurface {
    pub fn sample(&self) -> Result<GridSurface> {
        Ok(GridSurface::sample(&*self.immersion, self.grid)?)
    }
}

impl SurfaceDefinition {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| CliError::Toml {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn params(&self) -> Result<AmbientParams> {
        Ok(AmbientParams::new(
            self.ambient.kappa.value()?,
            self.ambient.tau.value()?,
        ))
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = &self.grid;
        Ok(GridSpec::new(
            (g.u[0].value()?, g.u[1].value()?),
            (g.v[0].value()?, g.v[1].value()?),
            g.nu,
            g.nv,
        )?)
    }

    fn section<'a, T>(&self, s: &'a Option<T>) -> Result<&'a T> {
        s.as_ref().ok_or_else(|| {
            CliError::Definition(format!(
                "family `{}` needs a [{}] table",
                self.family.name(),
                self.family.name()
            ))
        })
    }

    pub fn integration_setup(&self) -> Result<IntegrationSetup> {
        let s = self.section(&self.bcv_integrated)?;
        let grid = self.grid_spec()?;
        let varphi = Polynomial::from_slice(&s.varphi)
            .ok_or_else(|| CliError::Definition("varphi takes one to three coefficients".into()))?;
        Ok(IntegrationSetup {
            params: self.params()?,
            theta: s.theta.value()?,
            varphi,
            phi0: s.phi0.value()?,
            start: AmbientPoint::from_array(s.start),
            anchor: s.anchor.map_or_else(|| grid_center(&grid), |[u, v]| (u, v)),
            step: s.step,
            grid,
        })
    }

    pub fn theorem1_spec(&self) -> Result<ConstantAngleSpec> {
        let s = self.section(&self.theorem1)?;
        let tau = self.params()?.tau;
        if self.params()?.kappa != 0.0 {
            return Err(CliError::Definition(
                "theorem1 surfaces live in Nil3 (kappa = 0)".into(),
            ));
        }
        let theta = s.theta.value()?;
        let poly = |c: &Vec<f64>| {
            Polynomial::from_slice(c)
                .ok_or_else(|| CliError::Definition("profiles take one to three coefficients".into()))
        };
        Ok(match (&s.f1, &s.f2, &s.f3) {
            (Some(f1), Some(f2), Some(f3)) => ConstantAngleSpec::new(theta, tau, poly(f1)?, poly(f2)?, poly(f3)?)?,
            (None, None, None) => {
                let delta = s.delta.as_ref().map_or(Ok(0.0), Real::value)?;
                ConstantAngleSpec::from_direction(theta, tau, delta, s.f1_0, s.f2_0, s.f3_0)?
            }
            _ => {
                return Err(CliError::Definition(
                    "give all of f1, f2, f3 or none of them (then delta, f1_0, f2_0, f3_0 apply)".into(),
                ))
            }
        })
    }

    /// `base` resolves relative grid-file paths.
    pub fn build(&self, base: &Path) -> Result<BuiltSurface> {
        let params = self.params()?;
        let grid = self.grid_spec()?;
        let (immersion, sampled, target_theta): (Box<dyn Immersion>, bool, Option<f64>) = match self.family {
            Family::Theorem1 => {
                let spec = self.theorem1_spec()?;
                (Box::new(theorem1_surface(spec)), false, Some(spec.theta()))
            }
            Family::HopfCylinder => {
                let s = self.section(&self.hopf_cylinder)?;
                let curve = match s.curve {
                    CurveKind::Circle => Curve::Circle(Circle {
                        center: (s.center[0], s.center[1]),
                        radius: s.radius,
                    }),
                    CurveKind::Line => Curve::Line(Line {
                        origin: (s.origin[0], s.origin[1]),
                        direction: (s.direction[0], s.direction[1]),
                    }),
                };
                (
                    Box::new(hopf_cylinder(curve, params)),
                    false,
                    Some(std::f64::consts::FRAC_PI_2),
                )
            }
            Family::BcvIntegrated => {
                let setup = self.integration_setup()?;
                let surface = setup.run()?.surface().clone();
                (Box::new(surface), true, Some(setup.theta))
            }
            Family::GridFile => {
                let s = self.section(&self.grid_file)?;
                let path = base.join(&s.path);
                let surface = read_csv_grid(&path, params)?;
                if *surface.spec() != grid {
                    return Err(CliError::Definition(format!(
                        "{} holds a {}x{} grid on {:?}x{:?}, the [grid] table says {}x{} on {:?}x{:?}",
                        path.display(),
                        surface.spec().nu,
                        surface.spec().nv,
                        surface.spec().u,
                        surface.spec().v,
                        grid.nu,
                        grid.nv,
                        grid.u,
                        grid.v
                    )));
                }
                (Box::new(surface), true, None)
            }
        };
        let eps = self.perturb.fiber_sin_u;
        let immersion: Box<dyn Immersion> = if eps == 0.0 {
            immersion
        } else if sampled {
            let g = GridSurface::sample(&*immersion, grid)?;
            let pts = grid
                .nodes()
                .zip(g.points())
                .map(|((_, _, u, _), p)| AmbientPoint::new(p.x, p.y, p.z + eps * u.sin()))
                .collect();
            Box::new(GridSurface::new(params, grid, pts)?)
        } else {
            Box::new(FiberShift {
                inner: immersion,
                amplitude: eps,
            })
        };
        Ok(BuiltSurface {
            family: self.family,
            params,
            grid,
            immersion,
            sampled,
            target_theta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
family = "theorem1"
[ambient]
kappa = 0
tau = 0.5
[grid]
u = [0.0, "2pi"]
v = [-1.0, 1.0]
nu = 100
nv = 20
[theorem1]
theta = "pi/4"
f1 = [0.0]
f2 = [0.0, 0.7071067811865476]
f3 = [0.0]
"#;

    fn parse(text: &str) -> SurfaceDefinition {
        SurfaceDefinition::from_toml(text, Path::new("inline.toml")).unwrap()
    }

    #[test]
    fn example_definition_builds() {
        let def = parse(EXAMPLE);
        let built = def.build(Path::new(".")).unwrap();
        assert_eq!(built.family, Family::Theorem1);
        assert_eq!(built.sample().unwrap().points().len(), 2000);
        let p = built.immersion.position(0.0, 0.0).unwrap();
        assert!(p.distance(&AmbientPoint::new(0.0, -1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn speed_violation_is_rejected() {
        let def = parse(&EXAMPLE.replace("0.7071067811865476", "0.8"));
        let err = def.build(Path::new(".")).err().unwrap();
        assert!(
            matches!(err, CliError::Geometry(casurf_core::Error::InvalidSpec(_))),
            "{err}"
        );
    }

    #[test]
    fn missing_table_and_unknown_keys() {
        let no_table = EXAMPLE.split("[theorem1]").next().unwrap();
        assert!(matches!(
            parse(no_table).build(Path::new(".")),
            Err(CliError::Definition(_))
        ));
        let typo = EXAMPLE.replace("nv = 20", "nv = 20\nnw = 3");
        assert!(SurfaceDefinition::from_toml(&typo, Path::new("x")).is_err());
    }
}
