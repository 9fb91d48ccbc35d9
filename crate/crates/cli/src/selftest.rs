//! Fast built-in checks against exactly known values.

use std::f64::consts::PI;

use qprime::ambient::q_ambient_at;
use qprime::config::RunConfig;
use qprime::domains::Domain;
use qprime::monge_ampere::{fefferman, jz, SIGMA};
use qprime::poly::{ball, Poly};
use qprime::pseudoherm::{p_prime_at, webster_invariants};
use qprime::quadrature::{surface_integral, total_q_prime_at, VARIATION_CONSTANT};
use qprime::{Error, JetC, Result, C64};

struct Check {
    name: &'static str,
    error: f64,
    tol: f64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn checks(cfg: &RunConfig) -> Result<(Vec<Check>, f64)> {
    let pipe = cfg.pipeline();
    let origin = [c(0.0, 0.0); 2];
    let sphere = Domain::from_poly("ball", &ball(), origin)?;
    let p = [c(0.6, 0.0), c(0.0, 0.8)];
    let rho = ball().jet(p, cfg.degree);
    let mut out = Vec::new();

    let j = jz(&rho)?;
    out.push(Check {
        name: "J[1 - |z|^2] = 1",
        error: j.add_scalar(c(-1.0, 0.0)).norm_inf(),
        tol: 1e-12,
    });

    let f = fefferman(&rho, &pipe.tol)?;
    let slopes = &f.probe_slopes;
    out.push(Check {
        name: "ball: fixed point of the normalization, O = 0",
        error: f.r_jet.max_abs_diff(&rho.truncate(f.r_jet.degree())).max(f.obstruction.abs()),
        tol: 1e-12,
    });
    out.push(Check {
        name: "refinement slopes (4, 3)",
        error: (slopes[0] - 4.0).abs().max((slopes[1] - 3.0).abs()),
        tol: 1e-9,
    });

    let w = webster_invariants(&f.r_jet)?;
    out.push(Check {
        name: "sphere: Scal = 2, A = 0, Q' = 1",
        error: (w.scal - 2.0).abs().max(w.a11.norm()).max((w.q_prime - 1.0).abs()),
        tol: 1e-10,
    });

    let (total, _) = total_q_prime_at(&sphere, 8, &pipe)?;
    out.push(Check {
        name: "total Q'(S^3) = 4 pi^2",
        error: (total - 4.0 * PI * PI).abs() / (4.0 * PI * PI),
        tol: 1e-10,
    });

    let mean_re_z1 = surface_integral(&sphere, 8, false, |z| z[0].re)?;
    out.push(Check {
        name: "integral of Re z1 over S^3 = 0",
        error: mean_re_z1.abs(),
        tol: 1e-12,
    });

    let bump = &ball() - &Poly::abs2(0).powu(2).scale(c(0.2, 0.0));
    let dom = Domain::from_poly("perturbed ball", &bump, origin)?;
    let dir = [0.6, 0.1, 0.7, -0.3_f64];
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (q, _) = dom.boundary_point(&dir.map(|x| x / norm))?;
    let fb = fefferman(&bump.jet(q, cfg.degree), &pipe.tol)?;
    let amb = q_ambient_at(&fb.r_jet)?;
    let formula = webster_invariants(&fb.r_jet)?.q_prime;
    out.push(Check {
        name: "ambient Q(0), Q(1) vanish",
        error: amb.q0.abs().max(amb.q1.abs()),
        tol: 1e-8,
    });
    out.push(Check {
        name: "ambient Q(2) / Q' = 2",
        error: (amb.q2 / formula - 2.0).abs(),
        tol: 1e-8,
    });
    let one = JetC::constant(q, fb.r_jet.degree(), c(1.0, 0.0)).into_real();
    out.push(Check {
        name: "P' 1 = 0",
        error: p_prime_at(&one, &fb.r_jet)?.abs(),
        tol: 1e-10,
    });
    Ok((out, total))
}

/// Report text and whether every check passed.
pub fn run(cfg: &RunConfig) -> Result<String> {
    let (checks, total) = checks(cfg)?;
    let mut text = String::from("conventions\n");
    text += &format!("  sign of J: {SIGMA:+} (J[1 - |z|^2] = 1)\n");
    text += "  ambient Q(2) = 2 Q'\n";
    text += &format!("  dQ'/dt = {} x 2 int r' O theta^dtheta\n", VARIATION_CONSTANT);
    text += &format!("  total Q'(S^3) = {total:.15}\n");
    text += "checks\n";
    let mut failed = 0;
    for ch in &checks {
        let ok = ch.error <= ch.tol;
        failed += usize::from(!ok);
        text += &format!(
            "  {} {:<48} error {:.2e} (tol {:.0e})\n",
            if ok { "PASS" } else { "FAIL" },
            ch.name,
            ch.error,
            ch.tol
        );
    }
    if failed > 0 {
        eprint!("{text}");
        return Err(Error::Numeric(format!("{failed} selftest checks failed")));
    }
    Ok(text)
}
