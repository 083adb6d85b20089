use casurf_core::bcv::{constrained_d, r_squared, BcvFields, RemarkFields};
use casurf_core::constant_angle::{theorem1_surface, ConstantAngleSpec, ProofFields};
use casurf_core::linalg::tan_pole_distance;
use casurf_core::surface::{
    angle_and_projections, constant_angle_residuals, gaussian_curvature_extrinsic, gaussian_curvature_intrinsic,
    shape_operator, FnImmersion, ShapeBasis,
};
use casurf_core::{AmbientParams, AmbientPoint, FrameIndex, ParamDomain, TangentVector};
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn params() -> impl Strategy<Value = AmbientParams> {
    (-1.5f64..1.5, -1.2f64..1.2).prop_map(|(k, t)| AmbientParams::new(k, t))
}

fn inside(params: AmbientParams) -> impl Strategy<Value = AmbientPoint> {
    let r = if params.kappa < 0.0 {
        0.6 / (-params.kappa).sqrt()
    } else {
        2.0
    };
    (-r..r, -r..r, -3.0f64..3.0).prop_map(move |(x, y, z)| AmbientPoint::new(x * 0.7, y * 0.7, z))
}

fn vector() -> impl Strategy<Value = TangentVector> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b, c)| TangentVector::new(a, b, c))
}

/// Distance from `u` to the nearest pole of `tan(psi)`, in units of `u`; `psi` is affine in `u`.
fn pole_gap(psi: impl Fn(f64) -> f64, u: f64) -> f64 {
    tan_pole_distance(psi(u)) / (psi(u + 0.5) - psi(u - 0.5)).abs().max(f64::MIN_POSITIVE)
}

fn generic_angle() -> impl Strategy<Value = f64> {
    0.15f64..(FRAC_PI_2 - 0.15)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frame_is_orthonormal((params, p) in params().prop_flat_map(|pa| (Just(pa), inside(pa)))) {
        let g = params.metric_at(&p).unwrap();
        let frame = params.frame_at(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g.inner(frame[i], frame[j]) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn connection_is_metric_and_torsion_free(
        (params, p) in params().prop_flat_map(|pa| (Just(pa), inside(pa)))
    ) {
        for i in FrameIndex::ALL {
            for j in FrameIndex::ALL {
                let dij = params.connection_frame(i, j, &p).unwrap();
                let dji = params.connection_frame(j, i, &p).unwrap();
                let bracket = params.commutator_frame(i, j, &p).unwrap();
                prop_assert!((dij - dji - bracket).max_abs() < 1e-14);
                // <nabla_i e_j, e_k> + <e_j, nabla_i e_k> = 0
                for k in FrameIndex::ALL {
                    let dik = params.connection_frame(i, k, &p).unwrap();
                    prop_assert!((dij[k.slot()] + dik[j.slot()]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn curvature_symmetries(
        (params, p) in params().prop_flat_map(|pa| (Just(pa), inside(pa))),
        x in vector(), y in vector(), z in vector(), w in vector(),
    ) {
        let r = |a, b, c| params.curvature_tensor(&p, a, b, c).unwrap();
        prop_assert!((r(x, y, z) + r(y, x, z)).max_abs() < 1e-12);
        prop_assert!((r(x, y, z) + r(y, z, x) + r(z, x, y)).max_abs() < 1e-12);
        prop_assert!((r(x, y, z).dot(&w) - r(z, w, x).dot(&y)).abs() < 1e-12);
    }

    #[test]
    fn constant_curvature_when_kappa_is_four_tau_squared(
        tau in 0.1f64..1.0, x in vector(), y in vector(),
    ) {
        let params = AmbientParams::new(4.0 * tau * tau, tau);
        let p = AmbientPoint::new(0.3, -0.2, 0.5);
        let area = x.dot(&x) * y.dot(&y) - x.dot(&y).powi(2);
        prop_assume!(area > 1e-3);
        let k = params.sectional_curvature(&p, x, y).unwrap();
        prop_assert!((k - tau * tau).abs() < 1e-12);
    }

    #[test]
    fn surface_frame_invariants(
        params in params(), a in -0.8f64..0.8, b in -0.8f64..0.8, c in 0.2f64..1.0,
        u in -0.3f64..0.3, v in -0.3f64..0.3,
    ) {
        let s = FnImmersion::new(params, ParamDomain::UNBOUNDED, move |u, v| {
            AmbientPoint::new(0.5 * u, 0.5 * v, a * u * v + b * u * u + c * v)
        });
        let pr = angle_and_projections(&s, u, v).unwrap();
        let s2 = pr.sin_theta().powi(2);
        prop_assert!((pr.normal.norm() - 1.0).abs() < 1e-12);
        prop_assert!(pr.t.dot(&pr.jt).abs() < 1e-10);
        prop_assert!((pr.t.dot(&pr.t) - s2).abs() < 1e-10);
        prop_assert!((pr.jt.dot(&pr.jt) - s2).abs() < 1e-10);
        let so = shape_operator(&s, u, v, ShapeBasis::Orthonormal).unwrap();
        prop_assert!(so.symmetry_defect() < 1e-8, "{:?}", so);
        let k_ext = gaussian_curvature_extrinsic(&s, u, v).unwrap();
        let k_int = gaussian_curvature_intrinsic(&s, u, v).unwrap();
        prop_assert!((k_ext - k_int).abs() < 1e-3, "{} {}", k_ext, k_int);
    }

    #[test]
    fn explicit_family_has_constant_angle_structure(
        theta in generic_angle(), tau in prop_oneof![0.3f64..1.2, -1.2f64..-0.3],
        delta in -3.0f64..3.0, f0 in (-0.5f64..0.5, -0.5f64..0.5, -0.5f64..0.5),
        v in -0.5f64..0.5, u in -3.0f64..3.0,
    ) {
        let spec = ConstantAngleSpec::from_direction(theta, tau, delta, f0.0, f0.1, f0.2).unwrap();
        let s = theorem1_surface(spec);
        prop_assume!(s.regularity(u, v) > 0.2);
        let pr = angle_and_projections(&s, u, v).unwrap();
        prop_assert!((pr.theta - theta).abs() < 1e-8);
        let c = theta.cos();
        let k = gaussian_curvature_extrinsic(&s, u, v).unwrap();
        prop_assert!((k + 4.0 * tau * tau * c * c).abs() < 1e-6);
        let r = constant_angle_residuals(&s, u, v).unwrap();
        prop_assert!(r.s11 < 1e-6 && r.s12 < 1e-6, "{:?}", r);
    }

    #[test]
    fn proof_fields_solve_their_equations(
        theta in generic_angle(), tau in 0.2f64..1.5, phi0 in -3.0f64..3.0,
        u in -2.0f64..2.0, v in -1.0f64..1.0,
    ) {
        let pf = ProofFields::new(theta, tau, phi0, 0.0).unwrap();
        prop_assume!(pole_gap(|t| pf.psi(t, v), u) > 0.2);
        let scale = 1.0 + pf.lambda(u, v).unwrap().powi(2);
        prop_assert!(pf.riccati_residual(u, v).unwrap().abs() < 1e-8 * scale);
        let [r1, r2] = pf.bracket_residuals(u, v).unwrap();
        prop_assert!(r1.abs() < 1e-8 && r2.abs() < 1e-8 * scale);
        let [p1, p2] = pf.phi_residuals(u).unwrap();
        prop_assert!(p1.abs() < 1e-8 && p2 == 0.0);
    }

    #[test]
    fn bcv_fields_reduce_to_nil3(theta in generic_angle(), tau in 0.2f64..1.5, phi0 in -1.0f64..1.0, u in -1.0f64..1.0) {
        let bcv = BcvFields::new(AmbientParams::nil3(tau), theta, phi0).unwrap();
        let nil = ProofFields::new(theta, tau, phi0, 0.0).unwrap();
        prop_assume!(pole_gap(|t| nil.psi(t, 0.0), u) > 0.2);
        let (l, a, b) = bcv.lambda_a_b(u, 0.0).unwrap();
        let (na, nb) = nil.ab(u, 0.0);
        prop_assert!((l - nil.lambda(u, 0.0).unwrap()).abs() < 1e-12);
        prop_assert!((a - na).abs() < 1e-12 && (b - nb).abs() < 1e-12);
        let c = theta.cos();
        let r2 = 4.0 * tau * tau * c * c;
        prop_assert!((r_squared(0.0, tau, theta) - r2).abs() < 4.0 * f64::EPSILON * r2);
    }

    #[test]
    fn bcv_riccati(kappa in 0.1f64..3.0, tau in 0.1f64..1.0, theta in generic_angle(), u in -1.0f64..1.0) {
        let f = BcvFields::new(AmbientParams::new(kappa, tau), theta, 0.1).unwrap();
        prop_assume!(pole_gap(|t| f.psi(t, 0.0), u) > 0.2);
        let scale = 1.0 + f.lambda(u, 0.0).unwrap().powi(2);
        prop_assert!(f.riccati_residual(u, 0.0).unwrap().abs() < 1e-8 * scale);
    }

    /// `B^2 - A^2 - r^2 cos^2 = g (g + 4 tau cos^2)`, `g` the constraint
    /// defect; it vanishes exactly when `D` solves the constraint.
    #[test]
    fn remark_identity_factorization(
        kappa in 0.1f64..3.0, tau in 0.1f64..1.0, theta in generic_angle(),
        d in prop_oneof![0.2f64..3.0, -3.0f64..-0.2], l in -2.0f64..2.0,
    ) {
        let params = AmbientParams::new(kappa, tau);
        let rf = RemarkFields::new(params, theta, d, l, 0.0, 0.0).unwrap();
        let g = rf.constraint_defect(0.0).unwrap();
        let c2 = theta.cos().powi(2);
        let defect = rf.identity_defect(0.0).unwrap();
        prop_assert!((defect - g * (g + 4.0 * tau * c2)).abs() < 1e-10 * (1.0 + defect.abs()));
        for root in constrained_d(params, theta, l).unwrap() {
            let tight = RemarkFields::new(params, theta, root, l, 0.0, 0.0).unwrap();
            prop_assert!(tight.identity_defect(0.0).unwrap().abs() < 1e-12);
        }
    }
}
