//! Boundary and collar integrals: total Q-prime, the first-variation
//! identity, second variations at the sphere and renormalized volume.
//!
//! Every boundary integral is `Σ w · f · |θ∧dθ(X_η, X_ξ₁, X_ξ₂)|` over the
//! Hopf grid of [`Domain::boundary_grid`], with `θ = θ[r]` for the
//! Fefferman defining function `r`. Pointwise work runs through
//! [`crate::par::try_map`] and sums are taken pairwise in grid order, so
//! results are bit-reproducible for a fixed configuration.

pub mod renorm;
pub mod variation;

use serde::{Deserialize, Serialize};

use crate::domains::{contact_density, Domain, GridNode};
use crate::error::{Error, Result};
use crate::jet::C64;
use crate::monge_ampere::{fefferman, fefferman_step1, jz, Tolerances};
use crate::par::{pairwise_sum, try_map};
use crate::poly::Poly;
use crate::pseudoherm::{p_prime_jet, webster_jets, Frame};

pub use renorm::{default_eps, renorm_volume, ExpansionFit, RenormConfig, RenormFit};
pub use variation::{hessian_probe, variation_check, HessianReport, VariationReport, VARIATION_CONSTANT};

/// Default Taylor degree of `ρ` at boundary points: `η` needs 8 and the
/// sub-Laplacian of `Scal` needs 9; one more for margin.
pub const DEFAULT_DEGREE: usize = 10;

/// Settings shared by all boundary computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub degree: usize,
    pub tol: Tolerances,
    /// Collapse rotation-invariant variables of the grid.
    pub use_symmetry: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            degree: DEFAULT_DEGREE,
            tol: Tolerances::default(),
            use_symmetry: true,
        }
    }
}

/// Pointwise output at one boundary node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointData {
    pub coords: [f64; 3],
    /// `(Re z₁, Im z₁, Re z₂, Im z₂)`.
    pub point: [f64; 4],
    pub weight: f64,
    /// `|θ∧dθ|` on the coordinate tangents.
    pub density: f64,
    pub q_prime: f64,
    pub scal: f64,
    pub norm_a2: f64,
    pub laplacian_b_scal: f64,
    pub obstruction: f64,
    /// `J[ρ]` at the point (relates `ρ` to `r` on the boundary).
    pub j_rho: f64,
    /// Largest non-divisible remainder in the normalization.
    pub ma_residual: f64,
    /// Largest structure-equation residual.
    pub structure_residual: f64,
}

impl PointData {
    /// Quadrature weight times contact density.
    pub fn measure(&self) -> f64 {
        self.weight * self.density
    }
}

fn at_point(e: Error, p: &[C64; 2]) -> Error {
    let loc = format!(" at boundary point ({}, {})", p[0], p[1]);
    match e {
        Error::Geometry(m) => Error::Geometry(m + &loc),
        Error::Numeric(m) => Error::Numeric(m + &loc),
        Error::NotInvertible(m) => Error::NotInvertible(m + &loc),
        Error::NotDivisible { residual, tol } => {
            Error::Numeric(format!("jet not divisible: residual {residual:.3e} > {tol:.1e}{loc}"))
        }
        other => other,
    }
}

/// Full pipeline at one node: Fefferman normalization, Webster invariants,
/// obstruction and contact density.
pub fn point_data(domain: &Domain, node: &GridNode, cfg: &PipelineConfig) -> Result<PointData> {
    let p = node.point;
    let run = || -> Result<PointData> {
        let rho = domain.rho.jet(p, cfg.degree);
        let j_rho = jz(&rho.truncate(2))?.value().re;
        let f = fefferman(&rho, &cfg.tol)?;
        let frame = Frame::new(&f.r_jet)?;
        let w = webster_jets(&frame)?;
        let h = frame.h.value().re;
        let scal = w.scal.value();
        let lap = w.laplacian_b_scal.value();
        let norm_a2 = w.a11.value().norm_sqr() / (h * h);
        let structure_residual = frame.residuals.max().max(scal.im.abs()).max(lap.im.abs());
        Ok(PointData {
            coords: node.coords,
            point: [p[0].re, p[0].im, p[1].re, p[1].im],
            weight: node.weight,
            density: contact_density(&f.r_jet, &node.tangents),
            q_prime: 0.5 * lap.re + 0.25 * scal.re * scal.re - norm_a2,
            scal: scal.re,
            norm_a2,
            laplacian_b_scal: lap.re,
            obstruction: f.obstruction,
            j_rho,
            ma_residual: f.stage_residuals.iter().fold(0.0, |m: f64, x| m.max(*x)),
            structure_residual,
        })
    };
    run().map_err(|e| at_point(e, &p))
}

/// Pointwise data over the `n`-grid.
pub fn evaluate(domain: &Domain, n: usize, cfg: &PipelineConfig) -> Result<Vec<PointData>> {
    evaluate_sym(domain, n, symmetry_used(domain, cfg), cfg)
}

/// Pointwise data over the `n`-grid with explicitly collapsed variables.
pub fn evaluate_sym(domain: &Domain, n: usize, sym: [bool; 2], cfg: &PipelineConfig) -> Result<Vec<PointData>> {
    let nodes = domain.boundary_grid_sym(n, sym)?;
    try_map(&nodes, |node| point_data(domain, node, cfg))
}

/// `Σ w · density · f(point)` in grid order.
pub fn integrate(points: &[PointData], f: impl Fn(&PointData) -> f64) -> f64 {
    let terms: Vec<f64> = points.iter().map(|p| p.measure() * f(p)).collect();
    pairwise_sum(&terms)
}

/// `∫_M f θ∧dθ` for a pointwise field; only the first normalization of `ρ`
/// is needed since `θ∧dθ` on `TM` sees `r` to first order along `M`.
/// With `use_symmetry` the field must itself be invariant under the
/// collapsed rotations.
pub fn surface_integral(
    domain: &Domain,
    n: usize,
    use_symmetry: bool,
    field: impl Fn(&[C64; 2]) -> f64 + Sync + Send,
) -> Result<f64> {
    let nodes = domain.boundary_grid(n, use_symmetry)?;
    let terms = try_map(&nodes, |node| {
        let r1 = fefferman_step1(&domain.rho.jet(node.point, 3)).map_err(|e| at_point(e, &node.point))?;
        Ok(node.weight * contact_density(&r1, &node.tangents) * field(&node.point))
    })?;
    Ok(pairwise_sum(&terms))
}

/// Smallest and largest value of a pointwise quantity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
}

impl Extrema {
    pub fn of(xs: impl Iterator<Item = f64>) -> Self {
        let (min, max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        Extrema { min, max }
    }

    pub fn spread(&self) -> f64 {
        self.max - self.min
    }
}

/// Total Q-prime with its grid-convergence estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub domain: String,
    pub domain_hash: String,
    /// Coarse resolution `N`; the reported values come from `2N`.
    pub grid: usize,
    pub grid_fine: usize,
    pub degree: usize,
    pub symmetry: [bool; 2],
    pub points: usize,
    pub total_q_prime: f64,
    pub total_q_prime_coarse: f64,
    /// `|Q̄′(2N) − Q̄′(N)|`.
    pub convergence_estimate: f64,
    /// `∫_M θ∧dθ`.
    pub contact_volume: f64,
    pub q_prime: Extrema,
    pub scal: Extrema,
    pub norm_a2: Extrema,
    pub obstruction: Extrema,
    pub max_ma_residual: f64,
    pub max_structure_residual: f64,
    #[serde(skip)]
    pub point_data: Vec<PointData>,
}

fn symmetry_used(domain: &Domain, cfg: &PipelineConfig) -> [bool; 2] {
    if cfg.use_symmetry {
        domain.rotation_symmetry()
    } else {
        [false; 2]
    }
}

/// `Q̄′ = ∫_M Q′ θ∧dθ` on a single grid, with the pointwise data.
pub fn total_q_prime_at(domain: &Domain, n: usize, cfg: &PipelineConfig) -> Result<(f64, Vec<PointData>)> {
    total_q_prime_sym(domain, n, symmetry_used(domain, cfg), cfg)
}

/// [`total_q_prime_at`] with explicitly collapsed variables.
pub fn total_q_prime_sym(
    domain: &Domain,
    n: usize,
    sym: [bool; 2],
    cfg: &PipelineConfig,
) -> Result<(f64, Vec<PointData>)> {
    let pts = evaluate_sym(domain, n, sym, cfg)?;
    Ok((integrate(&pts, |p| p.q_prime), pts))
}

/// `Q̄′` on grids `N` and `2N`.
pub fn total_q_prime(domain: &Domain, n: usize, cfg: &PipelineConfig) -> Result<InvariantReport> {
    let (coarse, _) = total_q_prime_at(domain, n, cfg)?;
    let (fine, pts) = total_q_prime_at(domain, 2 * n, cfg)?;
    Ok(InvariantReport {
        domain: domain.name().to_string(),
        domain_hash: domain.hash(),
        grid: n,
        grid_fine: 2 * n,
        degree: cfg.degree,
        symmetry: symmetry_used(domain, cfg),
        points: pts.len(),
        total_q_prime: fine,
        total_q_prime_coarse: coarse,
        convergence_estimate: (fine - coarse).abs(),
        contact_volume: integrate(&pts, |_| 1.0),
        q_prime: Extrema::of(pts.iter().map(|p| p.q_prime)),
        scal: Extrema::of(pts.iter().map(|p| p.scal)),
        norm_a2: Extrema::of(pts.iter().map(|p| p.norm_a2)),
        obstruction: Extrema::of(pts.iter().map(|p| p.obstruction)),
        max_ma_residual: pts.iter().fold(0.0, |m, p| m.max(p.ma_residual)),
        max_structure_residual: pts.iter().fold(0.0, |m, p| m.max(p.structure_residual)),
        point_data: pts,
    })
}

/// The pairings `(∫ (P′f) g θ∧dθ, ∫ f (P′g) θ∧dθ)` for `f = Re F`, `g = Re G`
/// with holomorphic polynomials `F, G`.
pub fn p_prime_pairing(
    domain: &Domain,
    f_holo: &Poly,
    g_holo: &Poly,
    n: usize,
    cfg: &PipelineConfig,
) -> Result<(f64, f64)> {
    let nodes = domain.boundary_grid(n, false)?;
    let terms = try_map(&nodes, |node| {
        let p = node.point;
        let run = || -> Result<(f64, f64)> {
            let f = fefferman(&domain.rho.jet(p, cfg.degree), &cfg.tol)?;
            let frame = Frame::new(&f.r_jet)?;
            let d = f.r_jet.degree();
            let fj = f_holo.jet(p, d).re();
            let gj = g_holo.jet(p, d).re();
            let pf = p_prime_jet(&frame, &fj)?.value().re;
            let pg = p_prime_jet(&frame, &gj)?.value().re;
            let m = node.weight * contact_density(&f.r_jet, &node.tangents);
            Ok((m * pf * gj.value().re, m * fj.value().re * pg))
        };
        run().map_err(|e| at_point(e, &p))
    })?;
    let a: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let b: Vec<f64> = terms.iter().map(|t| t.1).collect();
    Ok((pairwise_sum(&a), pairwise_sum(&b)))
}

pub(crate) fn point_complex(p: &PointData) -> [C64; 2] {
    crate::domains::to_complex(&p.point)
}
