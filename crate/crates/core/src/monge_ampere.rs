//! Complex Monge-Ampère operator and Fefferman's approximate solution.
//!
//! For a real function `u` on `C^2`,
//!
//! ```text
//! J[u] = σ · det | u      ∂_1 u      ∂_2 u    |
//!                | ∂_1̄ u  ∂_1∂_1̄ u  ∂_2∂_1̄ u |
//!                | ∂_2̄ u  ∂_1∂_2̄ u  ∂_2∂_2̄ u |
//! ```
//!
//! A Fefferman defining function `r` satisfies `J[r] = 1 + η r³`; it is
//! built from any defining function `ρ` by `r₁ = ρ J[ρ]^{-1/3}` followed by
//! two order-raising corrections `u ↦ u (1 + c e u^s)`, where
//! `J[u] = 1 + e u^s + O(u^{s+1})`. The obstruction is `O = η|_M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{JetC, Var, C64};

/// Sign in front of the bordered determinant.
///
/// Fixed by requiring `J[1 - |z|²] = 1`: the bordered determinant of the
/// ball function is `ρ + |z₁|² + |z₂|² = 1`, so no sign flip is needed in
/// `C²` (see the `ball_calibrates_sign` test).
pub const SIGMA: f64 = 1.0;

/// Tolerances used by the normalization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Divisibility checks (remainder relative to the jet size).
    pub divisibility: f64,
    /// Relative size of the affine-model defect in the refine probe.
    pub probe_affine: f64,
    /// Below this the probe slope counts as degenerate.
    pub probe_slope: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            divisibility: 1e-8,
            probe_affine: 1e-9,
            probe_slope: 1e-6,
        }
    }
}

/// Jets of Fefferman's defining function and the obstruction at a boundary point.
#[derive(Clone, Debug)]
pub struct FeffermanResult {
    pub r_jet: JetC,
    /// `η` with `J[r] = 1 + η r³`.
    pub eta_jet: JetC,
    pub obstruction: f64,
    /// Largest non-divisible remainder after step 1 and after each refinement.
    pub stage_residuals: Vec<f64>,
    /// Probed slope `K_s` of each refinement: `J[u(1 + t u^s)] = J[u] + t K_s u^s + ...`.
    pub probe_slopes: Vec<f64>,
}

pub(crate) fn det3(m: [[&JetC; 3]; 3]) -> JetC {
    let minor = |a: &JetC, b: &JetC, c: &JetC, d: &JetC| a * b - c * d;
    let c0 = minor(m[1][1], m[2][2], m[1][2], m[2][1]);
    let c1 = minor(m[1][0], m[2][2], m[1][2], m[2][0]);
    let c2 = minor(m[1][0], m[2][1], m[1][1], m[2][0]);
    &(&(m[0][0] * &c0) - &(m[0][1] * &c1)) + &(m[0][2] * &c2)
}

/// Monge-Ampère operator; output degree `deg u - 2`.
pub fn jz(u: &JetC) -> Result<JetC> {
    if u.degree() < 2 {
        return Err(Error::Degree {
            what: "Monge-Ampère operator",
            needed: 2,
            have: u.degree(),
        });
    }
    let d = u.degree() - 2;
    let du = [u.wirtinger(Var::Z(0))?, u.wirtinger(Var::Z(1))?];
    let dbu = [u.wirtinger(Var::Zbar(0))?, u.wirtinger(Var::Zbar(1))?];
    // hess[k][j] = ∂_j ∂_k̄ u
    let mut hess: Vec<Vec<JetC>> = Vec::with_capacity(2);
    for k in 0..2 {
        let mut row = Vec::with_capacity(2);
        for j in 0..2 {
            row.push(dbu[k].wirtinger(Var::Z(j))?);
        }
        hess.push(row);
    }
    let u0 = u.truncate(d);
    let r0 = [du[0].truncate(d), du[1].truncate(d)];
    let c0 = [dbu[0].truncate(d), dbu[1].truncate(d)];
    let det = det3([
        [&u0, &r0[0], &r0[1]],
        [&c0[0], &hess[0][0], &hess[0][1]],
        [&c0[1], &hess[1][0], &hess[1][1]],
    ]);
    let out = det.scale_re(SIGMA);
    Ok(if u.is_real() { out.into_real() } else { out })
}

fn zero_constant(mut u: JetC) -> JetC {
    let mut e = [0u8; 4];
    e[0] = 0;
    u.set_coeff(&e, C64::new(0.0, 0.0));
    u
}

/// First normalization `r₁ = ρ · J[ρ]^{-1/3}`; output degree `deg ρ - 1`.
pub fn fefferman_step1(rho: &JetC) -> Result<JetC> {
    check_boundary_jet(rho)?;
    let j = jz(rho)?;
    let j0 = j.value().re;
    if j0 <= 0.0 {
        return Err(Error::Geometry(format!(
            "J[ρ] = {j0:.3e} ≤ 0 at base point: not strictly pseudoconvex here"
        )));
    }
    let factor = j.pow_real(-1.0 / 3.0)?;
    let rho = zero_constant(rho.clone());
    Ok(rho.mul_vanishing(&factor, 1)?.into_real())
}

fn check_boundary_jet(rho: &JetC) -> Result<()> {
    if rho.degree() < 2 {
        return Err(Error::Degree {
            what: "Fefferman normalization",
            needed: 2,
            have: rho.degree(),
        });
    }
    let grad: f64 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        .iter()
        .map(|e| rho.coeff(e).norm())
        .fold(0.0, f64::max);
    if grad == 0.0 || rho.value().norm() > 1e-9 * grad.max(1.0) {
        if grad == 0.0 {
            return Err(Error::DegenerateDefiningFunction);
        }
        return Err(Error::Geometry(format!(
            "base point not on the boundary: ρ = {:.3e}",
            rho.value().re
        )));
    }
    Ok(())
}

/// `u (1 + c·e·u^s)` valid to degree `deg u - 1`.
fn corrected(u: &JetC, e: &JetC, s: usize, c: f64) -> Result<JetC> {
    let mut us = u.clone();
    for _ in 1..s {
        us = us.mul_vanishing(u, 1)?;
    }
    let term = us.mul_vanishing(e, s)?.scale_re(c);
    let factor = term.add_scalar(C64::new(1.0, 0.0));
    Ok(u.mul_vanishing(&factor, 1)?.into_real())
}

/// Outcome of one order-raising step.
#[derive(Clone, Debug)]
pub struct RefineStep {
    pub u: JetC,
    /// Slope `K_s` of the probe.
    pub slope: f64,
    /// Defect of the affine model at the third probe point, relative to `|K_s|`.
    pub affine_defect: f64,
    /// Remainder when dividing `J[u] - 1` by `u^s`.
    pub residual: f64,
}

/// Raise the order of `J[u] - 1` from `s` to `s + 1`.
///
/// The correction coefficient `c = -1/K_s` is obtained by probing
/// `J[u(1 + t u^s)]` at `t ∈ {0, 1, 1/2}`: to order `s` the error
/// coefficient moves affinely in `t` with slope `K_s`. A vanishing slope
/// means the equation cannot be solved at this order (the obstruction).
pub fn fefferman_refine(u: &JetC, s: usize, tol: &Tolerances) -> Result<RefineStep> {
    let ju = jz(u)?;
    let g = ju.add_scalar(C64::new(-1.0, 0.0));
    let (e, residual) = g.divide_by_power_residual(u, s)?;
    let bound = tol.divisibility * g.norm_inf().max(1.0);
    if residual > bound {
        return Err(Error::NotDivisible {
            residual,
            tol: bound,
        });
    }
    // the probe only reads the base-point coefficient, which needs degree s + 3
    let low = u.truncate(s + 3);
    let one = JetC::constant(*u.base(), s + 2, C64::new(1.0, 0.0));
    let probe = |t: f64| -> Result<f64> {
        let v = corrected(&low, &one, s, t)?;
        let gv = jz(&v)?.add_scalar(C64::new(-1.0, 0.0));
        let (ev, _) = gv.divide_by_power_residual(&v, s)?;
        Ok(ev.value().re)
    };
    let e0 = e.value().re;
    let e1 = probe(1.0)?;
    let eh = probe(0.5)?;
    let slope = e1 - e0;
    if slope.abs() < tol.probe_slope {
        return Err(Error::Numeric(format!(
            "refine probe degenerate at order {s}: slope {slope:.3e} (normalization obstructed)"
        )));
    }
    let affine_defect = (eh - 0.5 * (e0 + e1)).abs() / slope.abs();
    if affine_defect > tol.probe_affine {
        return Err(Error::Numeric(format!(
            "refine probe not affine at order {s}: defect {affine_defect:.3e}"
        )));
    }
    let u_next = corrected(u, &e, s, -1.0 / slope)?;
    Ok(RefineStep {
        u: u_next,
        slope,
        affine_defect,
        residual,
    })
}

/// Fefferman defining function, `η` and obstruction at the base point of `rho`.
pub fn fefferman(rho: &JetC, tol: &Tolerances) -> Result<FeffermanResult> {
    if rho.degree() < 8 {
        return Err(Error::Degree {
            what: "obstruction function",
            needed: 8,
            have: rho.degree(),
        });
    }
    let mut u = fefferman_step1(rho)?;
    let mut stage_residuals = Vec::with_capacity(3);
    let mut probe_slopes = Vec::with_capacity(2);
    for s in 1..=2 {
        let step = fefferman_refine(&u, s, tol)?;
        stage_residuals.push(step.residual);
        probe_slopes.push(step.slope);
        u = step.u;
    }
    let g = jz(&u)?.add_scalar(C64::new(-1.0, 0.0));
    let (eta, residual) = g.divide_by_power_residual(&u, 3)?;
    stage_residuals.push(residual);
    let bound = tol.divisibility * g.norm_inf().max(1.0);
    if residual > bound {
        return Err(Error::NotDivisible {
            residual,
            tol: bound,
        });
    }
    let eta = eta.into_real();
    Ok(FeffermanResult {
        obstruction: eta.value().re,
        r_jet: u,
        eta_jet: eta,
        stage_residuals,
        probe_slopes,
    })
}


/// Fefferman's function at a point where `ρ ≠ 0`.
///
/// Off the boundary every division is a plain jet division, so the same two
/// refinements as on `M` (`K₁ = 4`, `K₂ = 3`) give `J[r] = 1 + O(r³)` as a
/// function; output degree `deg ρ − 6`.
pub fn fefferman_interior(rho: &JetC) -> Result<JetC> {
    let d = rho.degree();
    if d < 8 {
        return Err(Error::Degree {
            what: "interior Fefferman function",
            needed: 8,
            have: d,
        });
    }
    if rho.value().re == 0.0 {
        return Err(Error::Geometry("interior normalization at a boundary point".into()));
    }
    let one = C64::new(1.0, 0.0);
    let j = jz(rho)?;
    if j.value().re <= 0.0 {
        return Err(Error::Geometry(format!("J[ρ] = {:.3e} ≤ 0", j.value().re)));
    }
    let r1 = rho.checked_mul(&j.pow_real(-1.0 / 3.0)?)?.into_real();
    let e1 = jz(&r1)?.add_scalar(-one).checked_div(&r1)?;
    let r2 = r1.checked_mul(&e1.checked_mul(&r1)?.scale_re(-0.25).add_scalar(one))?.into_real();
    let r2sq = r2.checked_mul(&r2)?;
    let e2 = jz(&r2)?.add_scalar(-one).checked_div(&r2sq)?;
    Ok(r2.checked_mul(&e2.checked_mul(&r2sq)?.scale_re(-1.0 / 3.0).add_scalar(one))?.into_real())
}
