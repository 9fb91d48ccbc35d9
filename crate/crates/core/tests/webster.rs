use proptest::prelude::*;
use qprime::ambient::{p_prime_ambient_at, q_ambient_at};
use qprime::domains::{transform, Domain, MapSpec};
use qprime::monge_ampere::{fefferman, Tolerances};
use qprime::poly::{ball, Poly};
use qprime::pseudoherm::{p_prime_at, webster_invariants};
use qprime::quadrature::{p_prime_pairing, PipelineConfig};
use qprime::{JetC, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn origin() -> [C64; 2] {
    [c(0.0, 0.0); 2]
}

fn domain(a: f64, b: f64) -> Domain {
    let quartic = &Poly::abs2(0).powu(2).scale(c(a, 0.0)) + &(&Poly::abs2(0) * &Poly::abs2(1)).scale(c(b, 0.0));
    Domain::from_poly("d", &(&ball() - &quartic), origin()).unwrap()
}

fn skew() -> Domain {
    // no rotational symmetry
    let cubic = &(&(&Poly::z(0) * &Poly::z(0)) * &Poly::zbar(1)) + &(&(&Poly::zbar(0) * &Poly::zbar(0)) * &Poly::z(1));
    let rho = &(&ball() - &Poly::abs2(1).powu(2).scale(c(0.3, 0.0))) + &cubic.scale(c(0.1, 0.0));
    Domain::from_poly("skew", &rho, origin()).unwrap()
}

fn r_at(d: &Domain, p: [C64; 2]) -> JetC {
    fefferman(&d.rho.jet(p, 10), &Tolerances::default()).unwrap().r_jet
}

fn point(d: &Domain, dir: [f64; 4]) -> [C64; 2] {
    let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    d.boundary_point(&dir.map(|x| x / n)).unwrap().0
}

fn unit_dir() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64).prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sphere_invariants(dir in unit_dir()) {
        let b = domain(0.0, 0.0);
        let w = webster_invariants(&r_at(&b, point(&b, dir))).unwrap();
        prop_assert!((w.scal - 2.0).abs() < 1e-12);
        prop_assert!(w.norm_a2 < 1e-24);
        prop_assert!((w.q_prime - 1.0).abs() < 1e-12);
        prop_assert!(w.residuals.max() < 1e-12);
    }

    #[test]
    fn ambient_q_matches_formula_up_to_two(dir in unit_dir(), which in 0..3usize) {
        let d = [domain(0.5, 0.0), domain(0.2, 0.6), skew()][which].clone();
        let r = r_at(&d, point(&d, dir));
        let amb = q_ambient_at(&r).unwrap();
        let q = webster_invariants(&r).unwrap().q_prime;
        prop_assert!(amb.q0.abs() < 1e-8 && amb.q1.abs() < 1e-8, "{amb:?}");
        prop_assert!((amb.q2 - 2.0 * q).abs() < 1e-8 * q.abs().max(1.0), "{} vs {}", amb.q2, q);
    }

    #[test]
    fn ambient_p_prime_matches_formula(dir in unit_dir(), k in 0..4usize) {
        let d = skew();
        let p = point(&d, dir);
        let r = r_at(&d, p);
        let f = [
            Poly::z(0),
            &Poly::z(1) * &Poly::z(1),
            (&Poly::z(0) * &Poly::z(1)).scale(c(0.0, 1.0)),
            &Poly::z(0).powu(3) + &Poly::z(1).scale(c(0.5, -0.2)),
        ][k].clone();
        let formula = p_prime_at(&f.jet(p, r.degree()).re(), &r).unwrap();
        let ambient = p_prime_ambient_at(&f, &r).unwrap();
        prop_assert!((formula - ambient).abs() < 1e-8 * formula.abs().max(1.0), "{formula} vs {ambient}");
    }

    #[test]
    fn p_prime_kills_constants(dir in unit_dir()) {
        let d = skew();
        let p = point(&d, dir);
        let r = r_at(&d, p);
        let one = Poly::constant(1.0);
        prop_assert!(p_prime_at(&one.jet(p, r.degree()).re(), &r).unwrap().abs() < 1e-12);
        prop_assert!(p_prime_ambient_at(&one, &r).unwrap().abs() < 1e-10);
    }

    #[test]
    fn q_prime_is_constant_on_torus_orbits(dir in unit_dir(), a in 0.0..6.3f64, b in 0.0..6.3f64) {
        let d = domain(0.4, 0.3);
        let p = point(&d, dir);
        let q = [p[0] * C64::from_polar(1.0, a), p[1] * C64::from_polar(1.0, b)];
        let w0 = webster_invariants(&r_at(&d, p)).unwrap();
        let w1 = webster_invariants(&r_at(&d, q)).unwrap();
        prop_assert!((w0.q_prime - w1.q_prime).abs() < 1e-10);
        prop_assert!((w0.scal - w1.scal).abs() < 1e-10);
        prop_assert!((w0.norm_a2 - w1.norm_a2).abs() < 1e-10);
    }

    #[test]
    fn invariants_are_pointwise_natural(dir in unit_dir(), s in -0.5..0.5f64) {
        // unit-determinant maps carry r to r ∘ Φ⁻¹, so θ and every invariant agree
        let d = skew();
        let map = MapSpec::Composition { maps: vec![
            MapSpec::Unitary { matrix: [[[0.6, 0.0], [0.0, 0.8]], [[0.0, 0.8], [0.6, 0.0]]] },
            MapSpec::Shear { coeff: [s, 0.2], power: 2 },
        ]};
        let img = transform(&d, &map).unwrap();
        let p = point(&d, dir);
        let w0 = webster_invariants(&r_at(&d, p)).unwrap();
        let w1 = webster_invariants(&r_at(&img, map.apply(&p))).unwrap();
        prop_assert!((w0.q_prime - w1.q_prime).abs() < 1e-9 * w0.q_prime.abs().max(1.0));
        prop_assert!((w0.scal - w1.scal).abs() < 1e-9);
        prop_assert!((w0.norm_a2 - w1.norm_a2).abs() < 1e-9);
    }
}

#[test]
fn p_prime_is_self_adjoint() {
    let d = skew();
    let cfg = PipelineConfig::default();
    // weight 2 under (z₁, z₂) ↦ (e^{ia} z₁, e^{2ia} z₂), which preserves the domain
    let f = &(&Poly::z(0) * &Poly::z(0)) + &Poly::z(1).scale(c(0.3, 0.1));
    let g = &Poly::z(1) + &(&Poly::z(0) * &Poly::z(0)).scale(c(0.0, 0.5));
    let (fg, gf) = p_prime_pairing(&d, &f, &g, 12, &cfg).unwrap();
    let scale = fg.abs().max(gf.abs());
    assert!(scale > 1e-3, "pairing is trivial: {fg}");
    assert!((fg - gf).abs() < 1e-6 * scale, "{fg} vs {gf}");
    // and annihilates constants in the weak sense
    let (p1, _) = p_prime_pairing(&d, &Poly::constant(1.0), &g, 8, &cfg).unwrap();
    assert!(p1.abs() < 1e-10);
}
