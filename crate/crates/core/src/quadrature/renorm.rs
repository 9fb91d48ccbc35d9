//! Volume expansions of `g₊ = −i∂∂̄ log r` over `{r > ε}`.
//!
//! Both integrands reduce to jets of `r` at the sample point: with
//! `v = ∂r`, `L = ∂∂̄r` and `a = J[r] − r det L`,
//! `dvol = J[r] / r³` and `|d log r|² = 2a / J[r]` (Lebesgue normalization).
//! The domain is swept by rays from its center; along a ray the distance
//! `τ` to the boundary is integrated in `log τ` piecewise between the cut
//! points `r = ε_k`, so every `ε` reuses the same samples. Only the collar
//! `τ < cap · s_b` is integrated: the interior cap contributes a constant,
//! and deep inside the domain the polynomial normalization of `r` need not
//! give a positive metric.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::domains::{gauss_legendre, Domain};
use crate::error::{Error, Result};
use crate::jet::{JetC, C64};
use crate::monge_ampere::{fefferman_interior, jz};
use crate::par::{pairwise_sum, try_map};

/// Largest accepted condition number of the column-scaled fit matrix.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormConfig {
    /// Cutoffs, strictly decreasing.
    pub eps: Vec<f64>,
    pub grid: usize,
    /// Gauss nodes per radial segment in `log τ`.
    pub radial_nodes: usize,
    /// Collar depth as a fraction of the ray length.
    pub cap: f64,
}

impl Default for RenormConfig {
    fn default() -> Self {
        RenormConfig {
            eps: default_eps(),
            grid: 12,
            radial_nodes: 16,
            cap: 0.2,
        }
    }
}

/// Twelve log-spaced cutoffs from `2·10⁻³` down to `2·10⁻⁴`. Larger
/// cutoffs let the `O(ε log ε)` remainder leak into the log coefficient.
pub fn default_eps() -> Vec<f64> {
    (0..12).map(|k| 2e-3 * 10f64.powf(-(k as f64) / 11.0)).collect()
}

/// Least-squares fit `c₂ε⁻² + c₁ε⁻¹ + c_log log ε + c₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub c2: f64,
    pub c1: f64,
    pub log_coeff: f64,
    pub const_term: f64,
    /// Largest residual relative to the largest value.
    pub residual: f64,
    pub condition: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormFit {
    pub domain: String,
    pub domain_hash: String,
    pub grid: usize,
    pub eps_list: Vec<f64>,
    /// `∫_{r>ε} |d log r|² dvol` over the collar.
    pub weighted: Vec<f64>,
    /// `∫_{r>ε} dvol` over the collar.
    pub volume: Vec<f64>,
    pub weighted_fit: ExpansionFit,
    pub volume_fit: ExpansionFit,
    /// Relative change of one ray integral under doubling the radial nodes.
    pub radial_error: f64,
}

struct Sample {
    r: f64,
    /// `dr/ds` along the ray.
    slope: f64,
    dvol: f64,
    weight: f64,
}

fn sample(domain: &Domain, q: [C64; 2], dir: &[C64; 2]) -> Result<Sample> {
    let r3: JetC = fefferman_interior(&domain.rho.jet(q, 8))?;
    let r = r3.value().re;
    let v = [r3.coeff(&[1, 0, 0, 0]), r3.coeff(&[0, 0, 1, 0])];
    let l = |j: usize, k: usize| {
        let mut e = [0u8; 4];
        e[2 * j] += 1;
        e[2 * k + 1] += 1;
        r3.coeff(&e)
    };
    let det_l = (l(0, 0) * l(1, 1) - l(0, 1) * l(1, 0)).re;
    let j = jz(&r3)?.value().re;
    let a = j - r * det_l;
    if !(r > 0.0 && j > 0.0 && a > 0.0) {
        return Err(Error::Numeric(format!(
            "nonpositive volume integrand at ({}, {}): r = {r:.3e}, J = {j:.3e}, a = {a:.3e}",
            q[0], q[1]
        )));
    }
    Ok(Sample {
        r,
        slope: 2.0 * (v[0] * dir[0] + v[1] * dir[1]).re,
        dvol: j / (r * r * r),
        weight: 2.0 * a / j,
    })
}

/// One ray `c + sω`, `s ∈ [0, s_b]`.
struct Ray<'a> {
    domain: &'a Domain,
    omega: [C64; 2],
    s_b: f64,
}

impl Ray<'_> {
    fn at(&self, s: f64) -> Result<Sample> {
        let c = self.domain.center;
        let q = [c[0] + self.omega[0] * s, c[1] + self.omega[1] * s];
        sample(self.domain, q, &self.omega)
    }

    /// Distance to the boundary where `r = ε`.
    fn cut(&self, eps: f64, guess: f64) -> Result<f64> {
        let mut tau = guess;
        for _ in 0..60 {
            let smp = self.at(self.s_b - tau)?;
            // r decreases in s, so dr/dτ = −slope
            let step = (smp.r - eps) / -smp.slope;
            let next = tau - step;
            let next = if next <= 0.0 { 0.5 * tau } else { next };
            // rounding in s = s_b − τ limits τ to a few ulps of s_b
            if (next - tau).abs() <= 1e-13 * tau + 8.0 * f64::EPSILON * self.s_b {
                return Ok(next);
            }
            tau = next;
        }
        Err(Error::Numeric(format!("no convergence for the cut r = {eps:.3e} along a ray")))
    }

    /// `(Σ weighted, Σ volume)` over `s ∈ [s_b − τ_hi, s_b − τ_lo]` in `log τ`.
    fn segment(&self, lo: f64, hi: f64, nodes: usize) -> Result<(f64, f64)> {
        let mut w = Vec::with_capacity(nodes);
        let mut v = Vec::with_capacity(nodes);
        for (u, gw) in gauss_legendre(nodes, lo.ln(), hi.ln()) {
            let tau = u.exp();
            let s = self.s_b - tau;
            let smp = self.at(s)?;
            let m = gw * tau * s.powi(3) * smp.dvol;
            w.push(m * smp.weight);
            v.push(m);
        }
        Ok((pairwise_sum(&w), pairwise_sum(&v)))
    }

    /// Ray integrals for every cutoff, with the node count per segment.
    fn integrals(&self, eps: &[f64], cfg: &RenormConfig, nodes: usize) -> Result<Vec<(f64, f64)>> {
        let p = self.domain.center;
        let bdry = [p[0] + self.omega[0] * self.s_b, p[1] + self.omega[1] * self.s_b];
        let rho = self.domain.rho.jet(bdry, 2);
        let j0 = jz(&rho)?.value().re;
        let drho = 2.0 * (rho.coeff(&[1, 0, 0, 0]) * self.omega[0] + rho.coeff(&[0, 0, 1, 0]) * self.omega[1]).re;
        let tau_cap = cfg.cap * self.s_b;
        let mut cuts = Vec::with_capacity(eps.len());
        for &e in eps {
            let guess = e * j0.cbrt() / drho.abs();
            cuts.push(self.cut(e, guess.min(0.5 * tau_cap))?);
        }
        if cuts.last().map_or(true, |&t| t >= tau_cap) {
            return Err(Error::Invalid("largest ε reaches the interior cap".into()));
        }
        // cuts shrink with ε; accumulate from the cap outwards
        let mut out = vec![(0.0, 0.0); eps.len()];
        let mut acc = (0.0, 0.0);
        let mut hi = tau_cap;
        for k in (0..eps.len()).rev() {
            let seg = self.segment(cuts[k], hi, nodes)?;
            acc = (acc.0 + seg.0, acc.1 + seg.1);
            out[k] = acc;
            hi = cuts[k];
        }
        Ok(out)
    }
}

fn fit(eps: &[f64], values: &[f64]) -> Result<ExpansionFit> {
    let e0 = eps[0];
    let rows = eps.len();
    let mut a = DMatrix::<f64>::zeros(rows, 4);
    for (i, &e) in eps.iter().enumerate() {
        let x = e / e0;
        a[(i, 0)] = x.powi(-2);
        a[(i, 1)] = x.recip();
        a[(i, 2)] = x.ln();
        a[(i, 3)] = 1.0;
    }
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition < MAX_CONDITION) {
        return Err(Error::Numeric(format!("fit condition number {condition:.3e} too large")));
    }
    let b = DVector::from_column_slice(values);
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Numeric(e.to_string()))?;
    let resid = &a * &x - &b;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // undo the scaling ε → ε/ε₀
    Ok(ExpansionFit {
        c2: x[0] * e0 * e0,
        c1: x[1] * e0,
        log_coeff: x[2],
        const_term: x[3] - x[2] * e0.ln(),
        residual: resid.amax() / scale,
        condition,
    })
}

/// Both volume integrals over `{r > ε}` and their expansion fits.
pub fn renorm_volume(domain: &Domain, cfg: &RenormConfig) -> Result<RenormFit> {
    if cfg.eps.len() < 5 {
        return Err(Error::Invalid("at least 5 cutoffs are needed for a 4-term fit".into()));
    }
    if cfg.eps.windows(2).any(|w| !(w[1] < w[0])) || !(cfg.eps[cfg.eps.len() - 1] > 0.0) {
        return Err(Error::Invalid("cutoffs must be positive and strictly decreasing".into()));
    }
    if cfg.radial_nodes < 2 {
        return Err(Error::Invalid("fewer than 2 radial nodes".into()));
    }
    if !(cfg.cap > 0.0 && cfg.cap < 1.0) {
        return Err(Error::Invalid(format!("cap fraction {} outside (0, 1)", cfg.cap)));
    }
    let nodes = domain.boundary_grid(cfg.grid, true)?;
    let rays: Vec<(Ray, f64)> = nodes
        .iter()
        .map(|n| {
            let c = domain.center;
            let d = [n.point[0] - c[0], n.point[1] - c[1]];
            let s_b = (d[0].norm_sqr() + d[1].norm_sqr()).sqrt();
            let eta = n.coords[0];
            let ray = Ray {
                domain,
                omega: [d[0] / s_b, d[1] / s_b],
                s_b,
            };
            (ray, n.weight * eta.cos() * eta.sin())
        })
        .collect();
    let per_ray = try_map(&rays, |(ray, _)| ray.integrals(&cfg.eps, cfg, cfg.radial_nodes))?;
    let check = rays[0].0.integrals(&cfg.eps, cfg, 2 * cfg.radial_nodes)?;
    let radial_error = per_ray[0]
        .iter()
        .zip(&check)
        .map(|(a, b)| ((a.0 - b.0) / b.0).abs().max(((a.1 - b.1) / b.1).abs()))
        .fold(0.0, f64::max);
    let k = cfg.eps.len();
    let total = |pick: fn(&(f64, f64)) -> f64| -> Vec<f64> {
        (0..k)
            .map(|i| {
                let terms: Vec<f64> = rays.iter().zip(&per_ray).map(|((_, w), v)| w * pick(&v[i])).collect();
                pairwise_sum(&terms)
            })
            .collect()
    };
    let weighted = total(|x| x.0);
    let volume = total(|x| x.1);
    Ok(RenormFit {
        domain: domain.name().to_string(),
        domain_hash: domain.hash(),
        grid: cfg.grid,
        weighted_fit: fit(&cfg.eps, &weighted)?,
        volume_fit: fit(&cfg.eps, &volume)?,
        eps_list: cfg.eps.clone(),
        weighted,
        volume,
        radial_error,
    })
}
