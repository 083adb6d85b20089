//! The four subcommands as library functions returning reports.

use crate::definition::{BuiltSurface, Integrated, IntegrationSetup};
use crate::error::Result;
use crate::report::{real, CheckReport};
use casurf_core::ambient::oracle::{
    commutator_oracle, connection_table_oracle, curvature_oracle, orthonormality_defect, CURVATURE_STEP, FIRST_STEP,
};
use casurf_core::bcv::{lemma4_residuals, RemarkFields};
use casurf_core::constant_angle::{theorem1_surface, AngleRegime, ConstantAngleSpec};
use casurf_core::linalg::wrap_angle;
use casurf_core::surface::{first_fundamental_form, gaussian_curvature_extrinsic, STENCIL_REACH};
use casurf_core::{AmbientParams, AmbientPoint, Error, FrameIndex, GridSpec, Immersion, TangentVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pass thresholds. `uniform` replaces every entry by one value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub orthonormality: f64,
    pub commutator: f64,
    pub connection_oracle: f64,
    pub curvature_oracle: f64,
    pub constant_curvature: f64,
    pub angle: f64,
    pub curvature_extrinsic: f64,
    pub curvature_intrinsic: f64,
    pub shape_pattern: f64,
    pub connection: f64,
    pub riccati: f64,
    pub compatibility: f64,
    pub reconstruction: f64,
    pub closed_form: f64,
    pub integrability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthonormality: 1e-12,
            commutator: 1e-6,
            connection_oracle: 1e-6,
            curvature_oracle: 1e-4,
            constant_curvature: 1e-10,
            angle: 1e-6,
            curvature_extrinsic: 1e-4,
            curvature_intrinsic: 1e-3,
            shape_pattern: 1e-5,
            connection: 1e-4,
            riccati: 1e-4,
            compatibility: 1e-3,
            reconstruction: 1e-6,
            closed_form: 1e-5,
            integrability: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn uniform(t: f64) -> Self {
        Self {
            orthonormality: t,
            commutator: t,
            connection_oracle: t,
            curvature_oracle: t,
            constant_curvature: t,
            angle: t,
            curvature_extrinsic: t,
            curvature_intrinsic: t,
            shape_pattern: t,
            connection: t,
            riccati: t,
            compatibility: t,
            reconstruction: t,
            closed_form: t,
            integrability: t,
        }
    }

    pub fn from_override(tol: Option<f64>) -> Self {
        tol.map_or_else(Self::default, Self::uniform)
    }
}

/// Points with `|x|, |y|` well inside the chart (`1 + kappa/4 r^2 >= 3/4`)
/// and `z` in `[-2, 2]`.
pub fn random_point(rng: &mut impl Rng, params: &AmbientParams) -> AmbientPoint {
    let r_max = if params.kappa < 0.0 {
        (1.0 / (-params.kappa).sqrt()).min(1.5)
    } else {
        1.5
    };
    let r = r_max * rng.gen::<f64>().sqrt();
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    AmbientPoint::new(r * a.cos(), r * a.sin(), rng.gen_range(-2.0..2.0))
}

pub fn random_vector(rng: &mut impl Rng) -> TangentVector {
    TangentVector::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

/// Frame, connection and curvature against their finite-difference oracles
/// at `samples` seeded random points.
pub fn verify_ambient(params: AmbientParams, samples: usize, seed: u64, tol: &Tolerances) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 4];
    let mut sectional: Option<(f64, f64)> = None;
    for _ in 0..samples {
        let p = random_point(&mut rng, &params);
        worst[0] = worst[0].max(orthonormality_defect(&params, &p)?);
        let table = connection_table_oracle(&params, &p, FIRST_STEP)?;
        for i in FrameIndex::ALL {
            for j in FrameIndex::ALL {
                let bracket = commutator_oracle(&params, i, j, &p, FIRST_STEP)?;
                worst[1] = worst[1].max((params.commutator_frame(i, j, &p)? - bracket).max_abs());
                let nabla = table[i.slot()][j.slot()];
                worst[2] = worst[2].max((params.connection_frame(i, j, &p)? - nabla).max_abs());
            }
        }
        let xyz = [
            random_vector(&mut rng),
            random_vector(&mut rng),
            random_vector(&mut rng),
        ];
        let exact = params.curvature_tensor(&p, xyz[0], xyz[1], xyz[2])?;
        let fd = curvature_oracle(&params, &p, xyz, CURVATURE_STEP, FIRST_STEP)?;
        worst[3] = worst[3].max((exact - fd).max_abs());
        if params.has_constant_curvature() {
            let k = params.sectional_curvature(&p, xyz[0], xyz[1])?;
            let (lo, hi) = sectional.unwrap_or((k, k));
            sectional = Some((lo.min(k), hi.max(k)));
        }
    }
    let mut report = CheckReport::new("verify-ambient");
    report
        .check("orthonormality", worst[0], tol.orthonormality, samples)
        .check("commutator", worst[1], tol.commutator, samples)
        .check("connection", worst[2], tol.connection_oracle, samples)
        .check("curvature", worst[3], tol.curvature_oracle, samples);
    if let Some((lo, hi)) = sectional {
        let target = params.tau * params.tau;
        let dev = (lo - target).abs().max((hi - target).abs());
        report.check("constant_curvature", dev, tol.constant_curvature, samples);
        report.measure("sectional_curvature", real(target));
        report.measure("sectional_curvature_min", real(lo));
        report.measure("sectional_curvature_max", real(hi));
    }
    report
        .note("kappa", params.kappa)
        .note("tau", params.tau)
        .note("samples", samples)
        .note("seed", seed)
        .note("fd_step", FIRST_STEP)
        .note("curvature_step", CURVATURE_STEP);
    Ok(report)
}

/// Samples whose coordinate lines meet at an angle with sine below this are
/// skipped: finite differences of the normal are unreliable there.
pub const REGULARITY_FLOOR: f64 = 0.1;

fn regularity<I: Immersion + ?Sized>(imm: &I, u: f64, v: f64) -> f64 {
    match first_fundamental_form(imm, u, v) {
        Ok(g) => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            (det / (g[0][0] * g[1][1])).max(0.0).sqrt()
        }
        Err(_) => 0.0,
    }
}

/// Evenly spread nodes of `grid`, `margin` nodes from the boundary, about
/// `samples` in total, skipping near-singular parameter points.
pub fn sample_points<I: Immersion + ?Sized>(
    imm: &I,
    grid: &GridSpec,
    margin: usize,
    samples: usize,
) -> (Vec<(f64, f64)>, usize) {
    let per_axis = (samples as f64).sqrt().ceil() as usize;
    let all: Vec<(f64, f64)> = grid
        .interior_sample(margin, per_axis)
        .into_iter()
        .map(|(i, j)| (grid.u_at(i), grid.v_at(j)))
        .collect();
    let total = all.len();
    let kept: Vec<_> = all
        .into_iter()
        .filter(|&(u, v)| regularity(imm, u, v) >= REGULARITY_FLOOR)
        .collect();
    let skipped = total - kept.len();
    (kept, skipped)
}

fn regime_name(r: AngleRegime) -> &'static str {
    match r {
        AngleRegime::Leaf => "leaf",
        AngleRegime::Generic => "generic",
        AngleRegime::HopfCylinder => "hopf_cylinder",
    }
}

/// Constant-angle checks on an arbitrary immersion at the given samples.
pub fn constant_angle_checks<I: Immersion + ?Sized>(
    report: &mut CheckReport,
    imm: &I,
    samples: &[(f64, f64)],
    target_theta: Option<f64>,
    tol: &Tolerances,
) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::Precondition("no regular sample points on the grid".into()).into());
    }
    let rep = lemma4_residuals(imm, samples)?;
    let n = rep.samples;
    report.check("angle_constancy", rep.angle_spread(), tol.angle, n);
    if let Some(t) = target_theta {
        let dev = (rep.theta_min - t).abs().max((rep.theta_max - t).abs());
        report.check("angle_target", dev, tol.angle, n);
    }
    report
        .check("curvature_extrinsic", rep.curvature, tol.curvature_extrinsic, n)
        .check(
            "curvature_intrinsic",
            rep.curvature_intrinsic,
            tol.curvature_intrinsic,
            n,
        );
    if let Some(x) = rep.shape_pattern {
        report.check("shape_pattern", x, tol.shape_pattern, n);
    }
    if let Some(x) = rep.connection {
        report.check("connection", x, tol.connection, n);
    }
    if let Some(x) = rep.riccati {
        report.check("riccati", x, tol.riccati, n);
    }
    report.check("compatibility", rep.compatibility, tol.compatibility, n);

    let params = imm.params();
    let theta = 0.5 * (rep.theta_min + rep.theta_max);
    let (u, v) = samples[samples.len() / 2];
    report
        .measure("branch", regime_name(rep.branch))
        .measure("theta", real(theta))
        .measure(
            "gaussian_curvature_expected",
            real((params.kappa - 4.0 * params.tau * params.tau) * theta.cos().powi(2)),
        )
        .measure("gaussian_curvature", real(gaussian_curvature_extrinsic(imm, u, v)?));
    let [hu, hv] = imm.step();
    report.note("fd_step_u", hu).note("fd_step_v", hv);
    Ok(())
}

/// Options shared by `check` and `integrate`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    /// Approximate number of sample points.
    pub samples: usize,
    pub tolerances: Tolerances,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            tolerances: Tolerances::default(),
        }
    }
}

pub fn check_surface(built: &BuiltSurface, opts: &CheckOptions) -> Result<CheckReport> {
    let margin = if built.sampled { STENCIL_REACH } else { 0 };
    let imm = &*built.immersion;
    let (samples, skipped) = sample_points(imm, &built.grid, margin, opts.samples);
    let mut report = CheckReport::new(format!("check {}", built.family.name()));
    constant_angle_checks(&mut report, imm, &samples, built.target_theta, &opts.tolerances)?;
    report
        .measure("skipped_samples", skipped)
        .note("family", built.family.name())
        .note("kappa", built.params.kappa)
        .note("tau", built.params.tau);
    note_grid(&mut report, &built.grid);
    Ok(report)
}

fn note_grid(report: &mut CheckReport, g: &GridSpec) {
    report
        .note("grid", format!("{}x{}", g.nu, g.nv))
        .note("domain", format!("{}:{},{}:{}", g.u.0, g.u.1, g.v.0, g.v.1));
}

/// Integrates, checks the result and, where a closed form exists,
/// compares against it.
pub fn integrate(setup: &IntegrationSetup, opts: &CheckOptions) -> Result<(Integrated, CheckReport)> {
    let tol = &opts.tolerances;
    let out = setup.run()?;
    let surface = out.surface();
    let grid = setup.grid;
    let mut report = CheckReport::new(if setup.uses_nil3() {
        "integrate nil3"
    } else {
        "integrate bcv"
    });
    let (samples, skipped) = sample_points(surface, &grid, STENCIL_REACH, opts.samples);
    constant_angle_checks(&mut report, surface, &samples, Some(setup.theta), tol)?;
    report.measure("skipped_samples", skipped);

    match &out {
        Integrated::Nil3 { fields, surface } => {
            if setup.varphi.is_constant() {
                let spec = ConstantAngleSpec::matching(fields, setup.start, setup.anchor)?;
                let explicit = theorem1_surface(spec);
                let mut worst = 0.0f64;
                for ((_, _, u, v), p) in grid.nodes().zip(surface.points()) {
                    let q = explicit.position(fields.phi(u), v)?;
                    worst = worst.max(q.distance(p));
                }
                report.check("reconstruction", worst, tol.reconstruction, grid.len());
                let [f1, f2, f3] = spec.profiles();
                report.measure("matched_f1", fmt_poly(&f1.coeffs));
                report.measure("matched_f2", fmt_poly(&f2.coeffs));
                report.measure("matched_f3", fmt_poly(&f3.coeffs));
            } else {
                report.measure("reconstruction", "skipped: varphi is not constant");
            }
        }
        Integrated::Bcv { fields, result } => {
            let i0 = nearest(grid.u.0, grid.du(), grid.nu, setup.anchor.0);
            let lines = grid.interior_sample(0, 5);
            let mut js: Vec<usize> = lines.iter().map(|&(_, j)| j).collect();
            js.sort_unstable();
            js.dedup();
            let (mut worst, mut count, mut poles) = (0.0f64, 0usize, 0usize);
            for &j in &js {
                let remark = RemarkFields::from_initial(setup.params, setup.theta, result.state(i0, j), grid.u_at(i0))?;
                for i in 0..grid.nu {
                    match remark.closed_form(grid.u_at(i), grid.v_at(j)) {
                        Ok(p) => {
                            let s = result.state(i, j);
                            let d = (p.f1 - s[0])
                                .abs()
                                .max((p.f2 - s[1]).abs())
                                .max(wrap_angle(p.phi - s[3]).abs());
                            worst = worst.max(d);
                            count += 1;
                        }
                        Err(Error::Singularity { .. }) => poles += 1,
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            report.check("closed_form", worst, tol.closed_form, count);
            report.measure("closed_form_pole_skips", poles);
            let mut defect = 0.0f64;
            let nodes: Vec<_> = grid.interior_sample(2, 7);
            for &(i, j) in &nodes {
                let d = result.mixed_partial_defect(fields, i, j)?;
                defect = d.into_iter().fold(defect, f64::max);
            }
            report.check("integrability", defect, tol.integrability, nodes.len());
            report.measure("r", real(fields.r()));
        }
    }
    report
        .note("kappa", setup.params.kappa)
        .note("tau", setup.params.tau)
        .note("theta", setup.theta)
        .note("varphi", fmt_poly(&setup.varphi.coeffs))
        .note("phi0", setup.phi0)
        .note(
            "start",
            format!("{},{},{}", setup.start.x, setup.start.y, setup.start.z),
        )
        .note("anchor", format!("{},{}", setup.anchor.0, setup.anchor.1))
        .note("ode_step", setup.step);
    note_grid(&mut report, &grid);
    Ok((out, report))
}

fn nearest(start: f64, step: f64, n: usize, x: f64) -> usize {
    (((x - start) / step).round().max(0.0) as usize).min(n - 1)
}

/// Coefficients joined by commas; `-0` prints as `0`.
fn fmt_poly(c: &[f64; 3]) -> String {
    c.map(|x| real(x + 0.0)).join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_points_stay_in_chart() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = AmbientParams::new(-4.0, 1.0);
        for _ in 0..1000 {
            let p = random_point(&mut rng, &params);
            assert!(params.conformal(p.x, p.y) >= 0.75 - 1e-12);
        }
    }

    #[test]
    fn verify_ambient_on_nil3() {
        let rep = verify_ambient(AmbientParams::nil3(0.5), 5, 1, &Tolerances::default()).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(rep.get("constant_curvature").is_none());
        let berger = verify_ambient(AmbientParams::new(1.0, 0.5), 5, 1, &Tolerances::default()).unwrap();
        assert!(berger.passed(), "{berger}");
        assert_eq!(berger.measurements["sectional_curvature"], "0.25");
    }
}
