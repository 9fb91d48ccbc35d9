use proptest::prelude::*;
use qprime::jet::table::table;
use qprime::jet::transform::AffineMap;
use qprime::{JetC, Var, C64};

const DEG: usize = 4;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn base() -> [C64; 2] {
    [c(0.3, -0.2), c(-0.1, 0.5)]
}

fn jet(d: usize) -> impl Strategy<Value = JetC> {
    let n = table(4, d).len(d);
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(move |v| JetC::from_coeffs(base(), d, v.into_iter().map(|(a, b)| c(a, b)).collect(), false))
}

fn real_jet(d: usize) -> impl Strategy<Value = JetC> {
    jet(d).prop_map(|a| (&a + &a.conj()).into_real())
}

/// Jet with constant term bounded away from zero.
fn unit_jet(d: usize) -> impl Strategy<Value = JetC> {
    jet(d).prop_map(|a| a.add_scalar(c(3.0, 0.5)))
}

/// Vanishes at the base point with gradient of size about 1.
fn defining_jet(d: usize) -> impl Strategy<Value = JetC> {
    (real_jet(d), 0.5..1.5f64).prop_map(|(a, g)| {
        let mut u = a.scale_re(0.3);
        u.set_coeff(&[0, 0, 0, 0], c(0.0, 0.0));
        u.set_coeff(&[1, 0, 0, 0], c(g, 0.2));
        u.set_coeff(&[0, 1, 0, 0], c(g, -0.2));
        u.into_real()
    })
}

/// Product by direct exponent addition over all coefficient pairs.
fn naive_product(a: &JetC, b: &JetC) -> Vec<C64> {
    let t = a.table();
    let d = a.degree().min(b.degree());
    let n = t.len(d);
    let mut out = vec![c(0.0, 0.0); n];
    for i in 0..n {
        for j in 0..n {
            let (ei, ej) = (t.exps(i), t.exps(j));
            let mut e = *ei;
            for v in 0..4 {
                e[v] += ej[v];
            }
            if e.iter().map(|&x| x as usize).sum::<usize>() <= d {
                out[t.index_of(&e).unwrap()] += a.coeffs()[i] * b.coeffs()[j];
            }
        }
    }
    out
}

fn close(a: &JetC, b: &JetC, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_naive_convolution(a in jet(DEG), b in jet(DEG)) {
        let p = &a * &b;
        let naive = naive_product(&a, &b);
        for (x, y) in p.coeffs().iter().zip(&naive) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn product_is_associative_and_commutative(a in jet(DEG), b in jet(DEG), d in jet(DEG)) {
        prop_assert!(close(&(&(&a * &b) * &d), &(&a * &(&b * &d)), 1e-11));
        prop_assert!(close(&(&a * &b), &(&b * &a), 1e-13));
    }

    #[test]
    fn leibniz_rule(a in jet(DEG), b in jet(DEG), k in 0usize..4) {
        let var = [Var::Z(0), Var::Zbar(0), Var::Z(1), Var::Zbar(1)][k];
        let lhs = (&a * &b).derivative(var).unwrap();
        let rhs = &(&a.derivative(var).unwrap() * &b) + &(&a * &b.derivative(var).unwrap());
        prop_assert!(close(&lhs, &rhs.truncate(lhs.degree()), 1e-11));
    }

    #[test]
    fn real_jets_stay_real(a in real_jet(DEG), b in real_jet(DEG)) {
        let p = &a * &b;
        prop_assert!(p.is_real());
        prop_assert!(close(&p, &p.conj(), 1e-12));
        prop_assert!(close(&a.conj().conj(), &a, 0.0));
        // ∂̄ of a real jet is the conjugate of ∂
        let dz = a.derivative(Var::Z(1)).unwrap();
        let dzb = a.derivative(Var::Zbar(1)).unwrap();
        prop_assert!(close(&dz.conj(), &dzb, 1e-13));
    }

    #[test]
    fn division_inverts_multiplication(a in jet(DEG), b in unit_jet(DEG)) {
        let q = (&a * &b).checked_div(&b).unwrap();
        prop_assert!(close(&q, &a, 1e-10));
        let one = b.checked_div(&b).unwrap();
        prop_assert!(close(&one, &JetC::constant(base(), DEG, c(1.0, 0.0)), 1e-12));
    }

    #[test]
    fn series_functions_invert(a in unit_jet(DEG)) {
        let back = a.ln().unwrap().exp();
        prop_assert!(close(&back, &a, 1e-10));
        let r = (&a + &a.conj()).into_real();
        let cube = r.pow_real(1.0 / 3.0).unwrap();
        prop_assert!(close(&(&(&cube * &cube) * &cube), &r, 1e-10));
    }

    #[test]
    fn division_by_powers_recovers_the_cofactor(
        h in real_jet(3),
        u in defining_jet(6),
        s in 1usize..=3,
    ) {
        let h = h.truncate(6 - s);
        let hp = JetC::from_coeffs(base(), 6, {
            let mut v = h.coeffs().to_vec();
            v.resize(table(4, 6).len(6), c(0.0, 0.0));
            v
        }, true);
        let mut g = hp.clone();
        for _ in 0..s {
            g = &g * &u;
        }
        // g = hp · u^s known to degree 6; the quotient is known to degree 6 − s
        let back = g.divide_by_power(&u, s, 1e-9).unwrap();
        prop_assert_eq!(back.degree(), 6 - s);
        prop_assert!(close(&back, &h.truncate(6 - s), 1e-9));
    }

    #[test]
    fn affine_round_trip(a in jet(DEG), m in prop::array::uniform4(-1.0..1.0f64), sh in prop::array::uniform2(-1.0..1.0f64)) {
        let map = AffineMap {
            linear: [[c(1.0 + m[0], m[1]), c(m[2], 0.3)], [c(-0.2, m[3]), c(1.0, -m[0])]],
            shift: [c(sh[0], 0.1), c(0.0, sh[1])],
        };
        prop_assume!(map.det().norm() > 0.2);
        let there = a.compose_affine(&map).unwrap();
        let back = there.compose_affine(&map.inverse().unwrap()).unwrap();
        prop_assert!((back.base()[0] - a.base()[0]).norm() < 1e-12);
        prop_assert!(close(&back, &a, 1e-9));
        // composition agrees with evaluation: (a ∘ T)(y) = a(T y)
        let y = [there.base()[0] + c(0.01, -0.02), there.base()[1] + c(0.015, 0.0)];
        let ty = map.apply(&y);
        let w_a = [ty[0] - a.base()[0], ty[1] - a.base()[1]];
        let w_t = [y[0] - there.base()[0], y[1] - there.base()[1]];
        prop_assert!((there.eval(&w_t) - a.eval(&w_a)).norm() < 1e-10);
    }
}

#[test]
fn non_divisible_jets_are_reported() {
    let u = JetC::variable(base(), 4, Var::Z(0)).scale(c(1.0, 0.0));
    let u = (&u + &u.conj()).into_real();
    let g = JetC::variable(base(), 4, Var::Z(1));
    let e = g.divide_by_power(&u, 1, 1e-9).unwrap_err();
    assert!(matches!(e, qprime::Error::NotDivisible { .. }));
}

#[test]
fn base_mismatch_is_an_error() {
    let a = JetC::constant(base(), 2, c(1.0, 0.0));
    let b = JetC::constant([c(0.0, 0.0); 2], 2, c(1.0, 0.0));
    assert!(matches!(a.checked_mul(&b), Err(qprime::Error::BaseMismatch)));
}
