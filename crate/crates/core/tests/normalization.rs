use proptest::prelude::*;
use qprime::domains::{transform, Domain, MapSpec};
use qprime::jet::transform::AffineMap;
use qprime::monge_ampere::{fefferman, fefferman_interior, jz, Tolerances, SIGMA};
use qprime::poly::{ball, Poly};
use qprime::pseudoherm::webster_invariants;
use qprime::{Error, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn origin() -> [C64; 2] {
    [c(0.0, 0.0); 2]
}

/// `ρ = 1 − |z|² − a|z₁|⁴ − b|z₁|²|z₂|² + e Re(z₁² z̄₂)`.
fn perturbed(a: f64, b: f64, e: f64) -> Poly {
    let quartic = &Poly::abs2(0).powu(2).scale(c(a, 0.0)) + &(&Poly::abs2(0) * &Poly::abs2(1)).scale(c(b, 0.0));
    let cubic = &(&(&Poly::z(0) * &Poly::z(0)) * &Poly::zbar(1)) + &(&(&Poly::zbar(0) * &Poly::zbar(0)) * &Poly::z(1));
    &(&ball() - &quartic) + &cubic.scale(c(0.5 * e, 0.0))
}

/// Bordered determinant from exact polynomial derivatives.
fn bordered(rho: &Poly, z: &[C64; 2]) -> f64 {
    let d = |p: &Poly| p.eval(z);
    let r = d(rho);
    let rj = [d(&rho.dz(0)), d(&rho.dz(1))];
    let rk = [d(&rho.dzbar(0)), d(&rho.dzbar(1))];
    let rjk = |j: usize, k: usize| d(&rho.dz(j).dzbar(k));
    let m = [[r, rk[0], rk[1]], [rj[0], rjk(0, 0), rjk(0, 1)], [rj[1], rjk(1, 0), rjk(1, 1)]];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    SIGMA * det.re
}

fn boundary(d: &Domain, dir: [f64; 4]) -> [C64; 2] {
    let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    d.boundary_point(&dir.map(|x| x / n)).unwrap().0
}

fn unit_dir() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.1)
}

#[test]
fn ball_is_calibrated() {
    for p in [[c(0.0, 0.0); 2], [c(0.6, 0.0), c(0.0, 0.8)], [c(0.2, -0.3), c(1.1, 0.4)]] {
        let j = jz(&ball().jet(p, 6)).unwrap();
        assert!(j.add_scalar(c(-1.0, 0.0)).norm_inf() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jz_matches_polynomial_derivatives(
        a in 0.0..0.5f64, b in 0.0..0.5f64, e in -0.2..0.2f64,
        z in prop::array::uniform4(-0.7..0.7f64),
        w in prop::array::uniform4(-0.02..0.02f64),
    ) {
        let rho = perturbed(a, b, e);
        let p = [c(z[0], z[1]), c(z[2], z[3])];
        let j = jz(&rho.jet(p, 8)).unwrap();
        prop_assert!((j.value().re - bordered(&rho, &p)).abs() < 1e-12);
        // the jet also predicts nearby values (degree 6, |w| ≤ 0.03)
        let q = [p[0] + c(w[0], w[1]), p[1] + c(w[2], w[3])];
        let pred = j.eval(&[c(w[0], w[1]), c(w[2], w[3])]).re;
        prop_assert!((pred - bordered(&rho, &q)).abs() < 1e-9);
    }

    #[test]
    fn jz_scales_cubically(s in 0.2..5.0f64, z in prop::array::uniform4(-0.5..0.5f64)) {
        let rho = perturbed(0.3, 0.1, 0.1);
        let p = [c(z[0], z[1]), c(z[2], z[3])];
        let j1 = jz(&rho.jet(p, 4)).unwrap();
        let js = jz(&rho.scale(c(s, 0.0)).jet(p, 4)).unwrap();
        prop_assert!(js.max_abs_diff(&j1.scale_re(s * s * s)) <= 1e-12 * s.powi(3) * j1.norm_inf().max(1.0));
    }

    #[test]
    fn obstruction_is_independent_of_the_representative(dir in unit_dir(), k in 0.05..0.5f64) {
        let rho = perturbed(0.4, 0.2, 0.1);
        let d = Domain::from_poly("d", &rho, origin()).unwrap();
        let p = boundary(&d, dir);
        let tol = Tolerances::default();
        let factor = &Poly::constant(1.0) + &(&Poly::abs2(0).scale(c(k, 0.0)) + &Poly::abs2(1).scale(c(0.5 * k, 0.0)));
        let f1 = fefferman(&rho.jet(p, 10), &tol).unwrap();
        let f2 = fefferman(&(&rho * &factor).jet(p, 10), &tol).unwrap();
        prop_assert!((f1.obstruction - f2.obstruction).abs() < 1e-8 * f1.obstruction.abs().max(1.0));
        // r agrees modulo O(r⁴): compare through the invariants
        let q1 = webster_invariants(&f1.r_jet).unwrap().q_prime;
        let q2 = webster_invariants(&f2.r_jet).unwrap().q_prime;
        prop_assert!((q1 - q2).abs() < 1e-8);
    }

    #[test]
    fn images_of_the_ball_are_unobstructed(dir in unit_dir(), sh in -0.4..0.4f64) {
        let map = MapSpec::Composition { maps: vec![
            MapSpec::Scaling { factors: [[1.3, 0.2], [0.8, 0.0]] },
            MapSpec::Shear { coeff: [sh, 0.1], power: 2 },
        ]};
        let img = transform(&Domain::from_poly("ball", &ball(), origin()).unwrap(), &map).unwrap();
        let p = boundary(&img, dir);
        let f = fefferman(&img.rho.jet(p, 10), &Tolerances::default()).unwrap();
        prop_assert!(f.obstruction.abs() < 1e-8);
        let w = webster_invariants(&f.r_jet).unwrap();
        prop_assert!(w.norm_a2 < 1e-14);
    }
}

/// `r̂ = |det Φ′|^{2/3} r ∘ Φ⁻¹` for affine `Φ`, compared as jets.
#[test]
fn transport_law_for_affine_maps() {
    let rho = perturbed(0.3, 0.2, 0.1);
    let d = Domain::from_poly("d", &rho, origin()).unwrap();
    let p = boundary(&d, [0.5, 0.2, -0.6, 0.3]);
    let tol = Tolerances::default();
    let map = AffineMap {
        linear: [[c(1.2, 0.3), c(0.1, 0.0)], [c(0.0, -0.4), c(0.7, 0.1)]],
        shift: [c(0.0, 0.0); 2],
    };
    let r = fefferman(&rho.jet(p, 10), &tol).unwrap().r_jet;
    // ρ̂ = ρ ∘ Φ⁻¹ as a jet at Φ(p)
    let inv = map.inverse().unwrap();
    let rho_hat = rho.jet(p, 10).compose_affine(&inv).unwrap();
    let r_hat = fefferman(&rho_hat, &tol).unwrap().r_jet;
    let factor = map.det().norm().powf(2.0 / 3.0);
    let expected = r.compose_affine(&inv).unwrap().scale_re(factor);
    assert!((r_hat.base()[0] - map.apply(&p)[0]).norm() < 1e-12);
    assert!(r_hat.max_abs_diff(&expected) < 1e-10, "{}", r_hat.max_abs_diff(&expected));
}

#[test]
fn normalization_degrees_and_probes() {
    let rho = perturbed(0.3, 0.0, 0.0);
    let d = Domain::from_poly("d", &rho, origin()).unwrap();
    let p = boundary(&d, [1.0, 0.0, 1.0, 0.0]);
    let f = fefferman(&rho.jet(p, 10), &Tolerances::default()).unwrap();
    assert_eq!(f.r_jet.degree(), 7);
    assert_eq!(f.eta_jet.degree(), 2);
    assert!((f.probe_slopes[0] - 4.0).abs() < 1e-9 && (f.probe_slopes[1] - 3.0).abs() < 1e-9);
    assert!(f.stage_residuals.iter().all(|r| *r < 1e-10));
    // J[r] − 1 vanishes to third order along the boundary
    let j = jz(&f.r_jet).unwrap();
    let defect = j.add_scalar(c(-1.0, 0.0));
    let eta_r3 = &(&(&f.eta_jet * &f.r_jet) * &f.r_jet) * &f.r_jet;
    assert!(defect.truncate(2).norm_inf() < 1e-10);
    assert!(defect.max_abs_diff(&eta_r3.truncate(defect.degree())) < 1e-9);
    assert!(matches!(fefferman(&rho.jet(p, 7), &Tolerances::default()), Err(Error::Degree { .. })));
}

#[test]
fn interior_function_is_normalized_off_the_boundary() {
    let rho = perturbed(0.3, 0.2, 0.0);
    let d = Domain::from_poly("d", &rho, origin()).unwrap();
    let pb = boundary(&d, [0.5, 0.2, -0.6, 0.3]);
    let defect = |s: f64| {
        let q = [pb[0] * (1.0 - s), pb[1] * (1.0 - s)];
        let r3 = fefferman_interior(&rho.jet(q, 8)).unwrap();
        assert_eq!(r3.degree(), 2);
        let r = r3.value().re;
        assert!(r > 0.0);
        (r, jz(&r3).unwrap().value().re - 1.0)
    };
    // (J[r₃] − 1)/r³ tends to η at the boundary point, with an O(r) correction
    let eta = fefferman(&rho.jet(pb, 10), &Tolerances::default()).unwrap().eta_jet.value().re;
    let (r0, e0) = defect(0.005);
    let (r1, e1) = defect(0.0025);
    let (q0, q1) = (e0 / r0.powi(3), e1 / r1.powi(3));
    let limit = (r0 * q1 - r1 * q0) / (r0 - r1);
    assert!((limit - eta).abs() < 2e-2 * eta.abs(), "limit {limit}, η {eta}");
    // on the ball every stage is exact
    let q = [c(0.3, 0.1), c(-0.2, 0.4)];
    let b = fefferman_interior(&ball().jet(q, 8)).unwrap();
    assert!((b.value().re - ball().eval_re(&q)).abs() < 1e-14);
    assert!(matches!(fefferman_interior(&ball().jet(q, 6)), Err(Error::Degree { .. })));
}

#[test]
fn levi_flat_directions_are_rejected() {
    // Hartogs domain |z₂|² < g(|z₁|²) with log g subharmonic near |z₁|² = 0.3
    let rho = &(&ball() + &Poly::abs2(0).powu(2).scale(c(3.0, 0.0))) - &Poly::abs2(0).powu(3).scale(c(2.0, 0.0));
    let d = Domain::from_poly("hartogs", &rho, origin()).unwrap();
    let e = d.check_pseudoconvex(12).unwrap_err();
    assert!(matches!(e, Error::Geometry(_)), "{e}");
    assert_eq!(e.exit_code(), 3);
    let z1 = 0.3f64.sqrt();
    let p = boundary(&d, [z1, 0.0, (1.0 - 0.3f64 + 0.27 - 0.054).sqrt(), 0.0]);
    let j = jz(&rho.jet(p, 2)).unwrap().value().re;
    assert!(j < 0.0, "J = {j}");
    assert!(matches!(fefferman(&rho.jet(p, 10), &Tolerances::default()), Err(Error::Geometry(_))));
}
