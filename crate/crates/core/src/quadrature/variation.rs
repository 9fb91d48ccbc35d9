//! First and second variations of total Q-prime along pencils `ρ + tσ`.

use serde::{Deserialize, Serialize};

use super::{integrate, total_q_prime_sym, PipelineConfig};
use crate::domains::{Domain, Family};
use crate::error::{Error, Result};
use crate::monge_ampere::SIGMA;
use crate::poly::{ball, Monomial, Poly};

/// Factor between `dQ̄′/dt` and `2∫ ṙ O θ∧dθ` for the normalizations used
/// here (`Q′ = ½Δ_b Scal + ¼Scal² − |A|²`, `O = η|_M`): `n + 2 = 3`, so
/// `dQ̄′/dt = 6∫ ṙ O θ∧dθ = (n+1)! n! (n+2) ∫ ṙ O θ∧dθ`.
pub const VARIATION_CONSTANT: f64 = 3.0;

/// Centered-difference derivative of `Q̄′(t)` at `t = 0` versus the
/// boundary integral `2∫ ṙ O θ∧dθ` with `ṙ = σ J[ρ]^{-1/3}` on `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub family: String,
    pub domain_hash: String,
    pub direction: Vec<Monomial>,
    pub grid: usize,
    pub degree: usize,
    /// Steps `h, h/2, h/4`.
    pub steps: [f64; 3],
    pub derivative: [f64; 3],
    /// Richardson combination of the two finest differences.
    pub derivative_extrapolated: f64,
    /// `log₂ |D(h) − D(h/2)| / |D(h/2) − D(h/4)|`.
    pub observed_order: f64,
    /// `2∫ ṙ O θ∧dθ`.
    pub rhs_literal: f64,
    /// `VARIATION_CONSTANT · rhs_literal`.
    pub rhs: f64,
    /// `derivative_extrapolated / rhs_literal`.
    pub literal_ratio: f64,
    /// Relative to `rhs`.
    pub relative_error: f64,
    pub total_q_prime: f64,
    pub base_obstruction_max: f64,
}

/// Collapsed variables shared by every member of a family, so that all
/// differences are taken on the same grid.
fn family_symmetry(family: &Family, cfg: &PipelineConfig) -> [bool; 2] {
    if cfg.use_symmetry {
        family.rotation_symmetry()
    } else {
        [false; 2]
    }
}

fn q_at(family: &Family, t: f64, n: usize, cfg: &PipelineConfig) -> Result<f64> {
    Ok(total_q_prime_sym(&family.at(t)?, n, family_symmetry(family, cfg), cfg)?.0)
}

pub fn variation_check(family: &Family, h: f64, n: usize, cfg: &PipelineConfig) -> Result<VariationReport> {
    if !(h > 0.0 && h <= family.t_max) {
        return Err(Error::Invalid(format!("step {h} outside (0, t_max = {}]", family.t_max)));
    }
    family.check(h, n.min(12))?;
    let (q0, pts) = total_q_prime_sym(&family.base, n, family_symmetry(family, cfg), cfg)?;
    let rhs = 2.0
        * integrate(&pts, |p| {
            let s = family.direction_at(&super::point_complex(p));
            SIGMA * s * p.j_rho.powf(-1.0 / 3.0) * p.obstruction
        });
    let steps = [h, h / 2.0, h / 4.0];
    let mut derivative = [0.0; 3];
    for (d, &s) in derivative.iter_mut().zip(&steps) {
        *d = (q_at(family, s, n, cfg)? - q_at(family, -s, n, cfg)?) / (2.0 * s);
    }
    let extrapolated = (4.0 * derivative[2] - derivative[1]) / 3.0;
    let observed_order = ((derivative[0] - derivative[1]).abs() / (derivative[1] - derivative[2]).abs()).log2();
    let rhs_literal = rhs;
    let rhs = VARIATION_CONSTANT * rhs_literal;
    let scale = rhs.abs().max(extrapolated.abs()).max(f64::MIN_POSITIVE);
    Ok(VariationReport {
        family: family.base.name().to_string(),
        domain_hash: family.base.hash(),
        direction: family.sigma.to_monomials(),
        grid: n,
        degree: cfg.degree,
        steps,
        derivative,
        derivative_extrapolated: extrapolated,
        observed_order,
        rhs_literal,
        rhs,
        literal_ratio: extrapolated / rhs_literal,
        relative_error: (extrapolated - rhs).abs() / scale,
        total_q_prime: q0,
        base_obstruction_max: pts.iter().fold(0.0, |m, p| m.max(p.obstruction.abs())),
    })
}

/// Second variation of `Q̄′` at the sphere along `ρ = 1 − |z|² + tσ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    pub direction: Vec<Monomial>,
    pub grid: usize,
    pub degree: usize,
    pub steps: [f64; 2],
    /// `(Q̄′(h) − 2Q̄′(0) + Q̄′(−h)) / h²` at `h` and `h/2`.
    pub second_difference: [f64; 2],
    pub extrapolated: f64,
    /// The same extrapolation on the `2N` grid, when requested.
    pub extrapolated_fine: Option<f64>,
    /// Ten times the combined step, grid and rounding error estimate.
    pub noise_floor: f64,
    /// `-1`, `0` (within noise) or `1`.
    pub sign: i8,
    /// Sign of the `h` and `h/2` differences and of the fine grid agree.
    pub sign_stable: bool,
}

fn second_differences(family: &Family, h: f64, n: usize, cfg: &PipelineConfig) -> Result<([f64; 2], f64)> {
    let q0 = q_at(family, 0.0, n, cfg)?;
    let mut s = [0.0; 2];
    for (k, step) in [h, h / 2.0].into_iter().enumerate() {
        s[k] = (q_at(family, step, n, cfg)? - 2.0 * q0 + q_at(family, -step, n, cfg)?) / (step * step);
    }
    Ok((s, q0))
}

pub fn hessian_probe(sigma: &Poly, h: f64, n: usize, cfg: &PipelineConfig, check_fine: bool) -> Result<HessianReport> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Invalid(format!("step {h} outside (0, 1)")));
    }
    let base = Domain::from_poly("ball", &ball(), [crate::C64::new(0.0, 0.0); 2])?;
    let family = Family::from_parts(base, sigma, h);
    family.check(h, n.min(12))?;
    let (s, q0) = second_differences(&family, h, n, cfg)?;
    let extrapolated = (4.0 * s[1] - s[0]) / 3.0;
    let fine = if check_fine {
        let (sf, _) = second_differences(&family, h, 2 * n, cfg)?;
        Some((4.0 * sf[1] - sf[0]) / 3.0)
    } else {
        None
    };
    let half = h / 2.0;
    let rounding = 4e-14 * q0.abs() / (half * half);
    let grid_err = fine.map_or(0.0, |f| (f - extrapolated).abs());
    let noise_floor = 10.0 * ((s[0] - s[1]).abs() / 3.0 + grid_err + rounding);
    let sign = if extrapolated.abs() <= noise_floor {
        0
    } else if extrapolated < 0.0 {
        -1
    } else {
        1
    };
    let signs = [s[0].signum(), s[1].signum(), fine.map_or(extrapolated, |f| f).signum()];
    let sign_stable = sign != 0 && signs.iter().all(|&x| x == extrapolated.signum());
    Ok(HessianReport {
        direction: family.sigma.to_monomials(),
        grid: n,
        degree: cfg.degree,
        steps: [h, half],
        second_difference: s,
        extrapolated,
        extrapolated_fine: fine,
        noise_floor,
        sign,
        sign_stable,
    })
}
