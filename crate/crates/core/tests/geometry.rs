use casurf_core::ambient::oracle::{connection_oracle, curvature_oracle, CURVATURE_STEP, FIRST_STEP};
use casurf_core::constant_angle::{
    hopf_cylinder, integrate_distribution, measured_phi_derivatives, theorem1_surface, Circle, ConstantAngleSpec, Line,
    ProofFields,
};
use casurf_core::ode::SweepOptions;
use casurf_core::surface::{
    angle_and_projections, compatibility_residuals, constant_angle_residuals, first_fundamental_form,
    gaussian_curvature_extrinsic, gaussian_curvature_intrinsic, shape_operator, ShapeBasis, STENCIL_REACH,
};
use casurf_core::{AmbientParams, AmbientPoint, FrameIndex, GridSpec, Immersion, TangentVector};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

fn example_fields() -> ProofFields<f64> {
    ProofFields::new(FRAC_PI_4, 0.5, -PI, 0.0).unwrap()
}

fn anchored() -> SweepOptions {
    SweepOptions {
        anchor: Some((0.0, 0.0)),
        ..SweepOptions::default()
    }
}

#[test]
fn connection_table_matches_metric_oracle() {
    let params = AmbientParams::new(-0.7, 0.8);
    let p = AmbientPoint::new(0.3, -0.4, 1.1);
    for i in FrameIndex::ALL {
        for j in FrameIndex::ALL {
            let exact = params.connection_frame(i, j, &p).unwrap();
            let fd = connection_oracle(&params, i, j, &p, FIRST_STEP).unwrap();
            assert!((exact - fd).max_abs() < 1e-6);
        }
    }
    let (x, y, z) = (
        TangentVector::new(0.2, -1.0, 0.4),
        TangentVector::new(0.7, 0.1, -0.3),
        TangentVector::new(-0.5, 0.6, 0.9),
    );
    let exact = params.curvature_tensor(&p, x, y, z).unwrap();
    let fd = curvature_oracle(&params, &p, [x, y, z], CURVATURE_STEP, FIRST_STEP).unwrap();
    assert!((exact - fd).max_abs() < 1e-4);
}

#[test]
fn hopf_cylinder_gram_is_positive_definite() {
    let cyl = hopf_cylinder(Circle::UNIT, AmbientParams::nil3(1.0));
    let g = first_fundamental_form(&cyl, 0.9, 0.3).unwrap();
    assert!(g[0][0] > 0.0 && g[0][0] * g[1][1] - g[0][1] * g[1][0] > 0.0);
}

#[test]
fn hopf_cylinders_are_flat_and_vertical() {
    let line = Line {
        origin: (0.0, 0.0),
        direction: (1.0, 0.0),
    };
    for params in [
        AmbientParams::nil3(0.5),
        AmbientParams::new(1.0, 0.5),
        AmbientParams::new(-1.0, 0.3),
    ] {
        let circle = hopf_cylinder(
            Circle {
                center: (0.1, 0.0),
                radius: 0.5,
            },
            params,
        );
        let pr = angle_and_projections(&circle, 0.4, 0.2).unwrap();
        assert!((pr.theta - FRAC_PI_2).abs() < 1e-12);
        let k_ext = gaussian_curvature_extrinsic(&circle, 0.4, 0.2).unwrap();
        let k_int = gaussian_curvature_intrinsic(&circle, 0.4, 0.2).unwrap();
        assert!((k_ext - k_int).abs() < 1e-6, "{k_ext} {k_int}");
        let plane = hopf_cylinder(line, params);
        assert!((angle_and_projections(&plane, 0.3, -0.6).unwrap().theta - FRAC_PI_2).abs() < 1e-12);
        assert!(shape_operator(&plane, 0.3, 0.1, ShapeBasis::TJt).is_err());
    }
}

#[test]
fn example_surface_invariants() {
    let s = theorem1_surface(ConstantAngleSpec::example(0.5).unwrap());
    for (u, v) in [(0.0, 0.0), (0.4, -0.3), (2.0, 0.5), (-1.0, 0.9)] {
        let pr = angle_and_projections(&s, u, v).unwrap();
        assert!((pr.theta - FRAC_PI_4).abs() < 1e-8);
        let k = gaussian_curvature_intrinsic(&s, u, v).unwrap();
        assert!((k + 0.5).abs() < 1e-4, "{k}");
        let r = compatibility_residuals(&s, u, v).unwrap();
        assert!(
            r.max() < 1e-3 && r.structure_angle < 1e-6 && r.angle_derivative < 1e-6,
            "{r:?}"
        );
        let c = constant_angle_residuals(&s, u, v).unwrap();
        assert!(c.connection < 1e-6 && c.riccati < 1e-6, "{c:?}");
    }
}

#[test]
fn measured_lambda_matches_closed_form() {
    // theorem1 at (phi(u), v) is the proof-coordinate point (u, v).
    let pf = example_fields();
    let s = theorem1_surface(ConstantAngleSpec::matching(&pf, AmbientPoint::new(0.0, -1.0, 0.0), (0.0, 0.0)).unwrap());
    for (u, v) in [(0.0, 0.0), (0.6, 0.2), (-1.1, -0.4)] {
        let measured = shape_operator(&s, pf.phi(u), v, ShapeBasis::TJt)
            .unwrap()
            .lambda
            .unwrap();
        assert!((measured - pf.lambda(u, v).unwrap()).abs() < 1e-7, "{measured}");
    }
}

#[test]
fn integrated_grid_has_unit_speed_projection() {
    let pf = example_fields();
    let spec = GridSpec::new((-0.3, 0.3), (-0.3, 0.3), 61, 61).unwrap();
    let grid = integrate_distribution(&pf, AmbientPoint::new(0.0, -1.0, 0.0), spec, anchored()).unwrap();
    let s2 = 0.5;
    for (i, j) in spec.interior_sample(STENCIL_REACH, 4) {
        let (u, v) = (spec.u_at(i), spec.v_at(j));
        let g = first_fundamental_form(&grid, u, v).unwrap();
        assert!((g[0][0] - s2).abs() < 1e-8, "{g:?}");
        let pr = angle_and_projections(&grid, u, v).unwrap();
        assert!((pr.theta - FRAC_PI_4).abs() < 1e-6);
        let [du, dv] = measured_phi_derivatives(&grid, u, v).unwrap();
        assert!((du + 2.0 * 0.5 * 0.5).abs() < 1e-6 && dv.abs() < 1e-6, "{du} {dv}");
    }
}

#[test]
fn integration_reports_pole_crossing() {
    let pf = ProofFields::new(FRAC_PI_4, 0.5, 0.0, 0.0).unwrap();
    // psi = -u/4 reaches -pi/2 at u = 2 pi.
    let spec = GridSpec::new((0.0, 7.0), (0.0, 0.1), 8, 2).unwrap();
    let err = integrate_distribution(&pf, AmbientPoint::new(0.0, 0.0, 0.0), spec, SweepOptions::default());
    assert!(matches!(err, Err(casurf_core::Error::Singularity { .. })));
}

#[test]
fn example_profiles_match_published_form() {
    let spec = ConstantAngleSpec::example(0.5).unwrap();
    let [f1, f2, f3] = spec.profiles();
    assert_eq!(f1.coeffs, [0.0; 3]);
    assert_eq!(f2.coeffs, [0.0, FRAC_1_SQRT_2, 0.0]);
    assert_eq!(f3.coeffs, [0.0; 3]);
    let s = theorem1_surface(spec);
    assert_eq!(s.params(), AmbientParams::nil3(0.5));
    assert!(s.regularity(FRAC_PI_2, 0.0) < 1e-15);
    assert!(angle_and_projections(&s, FRAC_PI_2, 0.0).is_err());
}
