//! Domain specifications, boundary sampling, biholomorphic transforms and
//! one-parameter families.
//!
//! A domain is `Ω = {ρ > 0}` for a real polynomial `ρ` in
//! `(z₁, z̄₁, z₂, z̄₂)`, star-shaped about a center point. Boundary points
//! are found along rays from the center; the boundary is sampled through
//! Hopf coordinates `ω = (cos η e^{iξ₁}, sin η e^{iξ₂})` on the unit sphere.

pub mod family;
pub mod maps;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::jet::C64;
use crate::monge_ampere::jz;
use crate::poly::{Monomial, Poly};

/// Growth factor of the geometric root scan along rays.
const SCAN_RATIO: f64 = 1.002;

pub use family::{DirectionSpec, Family, FamilySpec};
pub use maps::{transform, MapSpec};

/// On-disk domain description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// Complex dimension minus one; only `1` is supported.
    pub n: u32,
    pub name: String,
    /// Star-shape center as `(Re z₁, Im z₁, Re z₂, Im z₂)`.
    pub center: [f64; 4],
    pub rho: Vec<Monomial>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl DomainSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Invalid(e.to_string()))
    }
}

/// A validated domain.
#[derive(Clone, Debug)]
pub struct Domain {
    pub spec: DomainSpec,
    pub rho: Poly,
    pub center: [C64; 2],
}

/// One boundary quadrature node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridNode {
    /// Hopf coordinates `(η, ξ₁, ξ₂)`.
    pub coords: [f64; 3],
    pub point: [C64; 2],
    /// Product weight in the Hopf coordinates, including orbit factors
    /// when a rotational symmetry is used.
    pub weight: f64,
    /// `∂p/∂η, ∂p/∂ξ₁, ∂p/∂ξ₂` as vectors in `C²`.
    pub tangents: [[C64; 2]; 3],
}

fn horner(q: &[f64], s: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &c in q.iter().rev() {
        d = d * s + v;
        v = v * s + c;
    }
    (v, d)
}

/// Real 4-vector `(Re ω₁, Im ω₁, Re ω₂, Im ω₂)` as a point of `C²`.
pub fn to_complex(x: &[f64; 4]) -> [C64; 2] {
    [C64::new(x[0], x[1]), C64::new(x[2], x[3])]
}

fn real_dot(g: &[f64; 4], v: &[C64; 2]) -> f64 {
    g[0] * v[0].re + g[1] * v[0].im + g[2] * v[1].re + g[3] * v[1].im
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Newton on P_n from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w));
    }
    out.reverse();
    out
}

impl Domain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        if spec.n != 1 {
            return Err(Error::Parse(format!("n = {} is not supported (only n = 1)", spec.n)));
        }
        for m in &spec.rho {
            if !m.re.is_finite() || !m.im.is_finite() {
                return Err(Error::Parse(format!("non-finite coefficient at {:?}", m.pow)));
            }
        }
        if spec.center.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse("non-finite center".into()));
        }
        Poly::check_hermitian(&spec.rho)?;
        let rho = Poly::from_monomials(&spec.rho);
        if rho.is_zero() {
            return Err(Error::Parse("defining function is zero".into()));
        }
        let center = to_complex(&spec.center);
        let rc = rho.eval_re(&center);
        if !(rc > 0.0) {
            return Err(Error::Geometry(format!(
                "ρ(center) = {rc:.3e} is not positive"
            )));
        }
        Ok(Domain { spec, rho, center })
    }

    /// Domain from an arithmetic result; coefficients are paired exactly first.
    pub fn from_poly(name: &str, rho: &Poly, center: [C64; 2]) -> Result<Self> {
        let rho = rho.hermitian_part();
        Domain::new(DomainSpec {
            n: 1,
            name: name.to_string(),
            center: [center[0].re, center[0].im, center[1].re, center[1].im],
            rho: rho.to_monomials(),
            metadata: BTreeMap::new(),
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Domain::new(DomainSpec::parse(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Domain::new(DomainSpec::load(path)?)
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// SHA-256 of the canonical JSON form of the spec.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(&self.spec).expect("spec serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Invariance under `z_i ↦ e^{iα} z_i` for `i = 1, 2`: every monomial
    /// balanced in that variable and the center on the rotation axis.
    pub fn rotation_symmetry(&self) -> [bool; 2] {
        let mut sym = [true; 2];
        for (i, s) in sym.iter_mut().enumerate() {
            *s = self.center[i] == C64::new(0.0, 0.0)
                && self.rho.terms().all(|(p, _)| p[2 * i] == p[2 * i + 1]);
        }
        sym
    }

    /// Polynomial `s ↦ ρ(center + s ω)`, ascending coefficients.
    fn ray_polynomial(&self, omega: &[f64; 4]) -> Vec<f64> {
        let deg = self.rho.degree();
        let jet = self.rho.jet(self.center, deg);
        let mut q: Vec<f64> = jet
            .restrict_to_line(&to_complex(omega))
            .iter()
            .map(|c| c.re)
            .collect();
        let scale = q.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while q.len() > 1 && q.last().unwrap().abs() <= 1e-14 * scale {
            q.pop();
        }
        q
    }

    /// Boundary point `center + s ω` for a unit direction `ω ∈ R⁴`; returns `(point, s)`.
    pub fn boundary_point(&self, omega: &[f64; 4]) -> Result<([C64; 2], f64)> {
        let q = self.ray_polynomial(omega);
        let lead = q.len() - 1;
        if lead == 0 {
            return Err(Error::Geometry(format!(
                "ρ is constant along direction {omega:?}: not star-shaped"
            )));
        }
        let cauchy = 1.0 + q[..lead].iter().fold(0.0f64, |m, c| m.max((c / q[lead]).abs()));
        // no root below the lower Cauchy bound; scan geometrically from there
        // so that small leading coefficients do not coarsen the search
        let lower = 1.0 / (1.0 + q[1..].iter().fold(0.0f64, |m, c| m.max((c / q[0]).abs())));
        let steps = ((cauchy / lower).ln() / SCAN_RATIO.ln()).ceil().max(1.0) as usize;
        let ratio = (cauchy / lower).powf(1.0 / steps as f64);
        // first sign change from the center: the domain is the part of
        // {ρ > 0} seen from the center
        let mut bracket = None;
        let mut prev = (0.0, q[0]);
        let mut s = lower;
        for _ in 0..=steps {
            let v = horner(&q, s).0;
            if v != 0.0 {
                if v.signum() != prev.1.signum() {
                    bracket = Some((prev.0, s));
                    break;
                }
                prev = (s, v);
            }
            s *= ratio;
        }
        let (mut a, mut b) = bracket.ok_or_else(|| {
            Error::Geometry(format!("no boundary crossing along direction {omega:?}"))
        })?;
        // safeguarded Newton
        let mut s = 0.5 * (a + b);
        let fa = horner(&q, a).0;
        for _ in 0..200 {
            let (v, d) = horner(&q, s);
            if v == 0.0 {
                break;
            }
            if v.signum() == fa.signum() {
                a = s;
            } else {
                b = s;
            }
            let mut next = s - v / d;
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            let step = (next - s).abs();
            s = next;
            if step <= 1e-15 * s.abs().max(1.0) || b - a <= 1e-15 * s.abs().max(1.0) {
                break;
            }
        }
        if horner(&q, s).0.abs() > 1e-12 * q.iter().fold(0.0f64, |m, c| m.max(c.abs())) {
            return Err(Error::Numeric(format!(
                "boundary root along {omega:?} did not converge"
            )));
        }
        let w = to_complex(omega);
        Ok(([self.center[0] + w[0] * s, self.center[1] + w[1] * s], s))
    }

    /// Boundary nodes on an `n × n × n` Hopf grid (Gauss-Legendre in `η`,
    /// trapezoidal in `ξ₁, ξ₂`). Rotationally symmetric variables are
    /// collapsed to a single node carrying the full `2π` orbit weight.
    pub fn boundary_grid(&self, n: usize, use_symmetry: bool) -> Result<Vec<GridNode>> {
        let sym = if use_symmetry {
            self.rotation_symmetry()
        } else {
            [false; 2]
        };
        self.boundary_grid_sym(n, sym)
    }

    /// As [`Domain::boundary_grid`] with an explicit set of collapsed
    /// variables, which must be symmetries of the domain.
    pub fn boundary_grid_sym(&self, n: usize, sym: [bool; 2]) -> Result<Vec<GridNode>> {
        if n < 4 {
            return Err(Error::Invalid(format!("grid resolution {n} below 4")));
        }
        let own = self.rotation_symmetry();
        if (sym[0] && !own[0]) || (sym[1] && !own[1]) {
            return Err(Error::Invalid(format!(
                "grid collapses {sym:?} but the domain is only symmetric in {own:?}"
            )));
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        let xi = |s: bool| -> Vec<(f64, f64)> {
            if s {
                vec![(0.0, two_pi)]
            } else {
                (0..n).map(|k| (two_pi * k as f64 / n as f64, two_pi / n as f64)).collect()
            }
        };
        let eta = gauss_legendre(n, 0.0, 0.5 * std::f64::consts::PI);
        let mut params = Vec::new();
        for &(e, we) in &eta {
            for &(x1, w1) in &xi(sym[0]) {
                for &(x2, w2) in &xi(sym[1]) {
                    params.push(([e, x1, x2], we * w1 * w2));
                }
            }
        }
        crate::par::try_map(&params, |(u, w)| self.grid_node(*u, *w))
    }

    pub fn grid_node(&self, u: [f64; 3], weight: f64) -> Result<GridNode> {
        let (ce, se) = (u[0].cos(), u[0].sin());
        let e1 = C64::from_polar(1.0, u[1]);
        let e2 = C64::from_polar(1.0, u[2]);
        let i = C64::new(0.0, 1.0);
        let om = [e1 * ce, e2 * se];
        let omega = [om[0].re, om[0].im, om[1].re, om[1].im];
        let dom = [
            [-e1 * se, e2 * ce],
            [i * e1 * ce, C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), i * e2 * se],
        ];
        let (point, s) = self.boundary_point(&omega)?;
        let g = self.rho.grad_re(&point);
        let gw = real_dot(&g, &om);
        if gw == 0.0 {
            return Err(Error::Geometry(format!(
                "boundary tangent to the ray at {point:?}: not star-shaped"
            )));
        }
        let mut tangents = [[C64::new(0.0, 0.0); 2]; 3];
        for a in 0..3 {
            let sv = [dom[a][0] * s, dom[a][1] * s];
            let sa = -real_dot(&g, &sv) / gw;
            tangents[a] = [om[0] * sa + sv[0], om[1] * sa + sv[1]];
        }
        Ok(GridNode {
            coords: u,
            point,
            weight,
            tangents,
        })
    }

    /// Smallest value of `J[ρ]` over a coarse boundary sample; fails with a
    /// geometry error naming the worst point if it is not positive.
    pub fn check_pseudoconvex(&self, n: usize) -> Result<f64> {
        let nodes = self.boundary_grid(n, true)?;
        let vals = crate::par::try_map(&nodes, |node| {
            Ok(jz(&self.rho.jet(node.point, 2))?.value().re)
        })?;
        let (k, worst) = vals
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, &v)| if v < acc.1 { (k, v) } else { acc });
        if !(worst > 0.0) {
            let p = nodes[k].point;
            return Err(Error::Geometry(format!(
                "domain '{}' is not strictly pseudoconvex: J[ρ] = {worst:.3e} at ({}, {})",
                self.name(),
                p[0],
                p[1]
            )));
        }
        Ok(worst)
    }
}

/// Levi-form density of `θ ∧ dθ` on three tangent vectors, from the first
/// and mixed second Taylor coefficients of `r` at the base point.
pub fn contact_density(r: &crate::jet::JetC, t: &[[C64; 2]; 3]) -> f64 {
    let grad = [r.coeff(&[1, 0, 0, 0]), r.coeff(&[0, 0, 1, 0])];
    let mut levi = [[C64::new(0.0, 0.0); 2]; 2];
    for j in 0..2 {
        for k in 0..2 {
            let mut e = [0u8; 4];
            e[2 * j] += 1;
            e[2 * k + 1] += 1;
            levi[j][k] = r.coeff(&e);
        }
    }
    let theta = |x: &[C64; 2]| -(grad[0] * x[0] + grad[1] * x[1]).im;
    let dtheta = |x: &[C64; 2], y: &[C64; 2]| {
        let mut l = C64::new(0.0, 0.0);
        for j in 0..2 {
            for k in 0..2 {
                l += levi[j][k] * x[j] * y[k].conj();
            }
        }
        2.0 * l.im
    };
    let v = theta(&t[0]) * dtheta(&t[1], &t[2]) - theta(&t[1]) * dtheta(&t[0], &t[2])
        + theta(&t[2]) * dtheta(&t[0], &t[1]);
    v.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ball;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre(6, -1.0, 2.0);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(11)).sum();
        let exact = (2f64.powi(12) - 1.0) / 12.0;
        assert!((s - exact).abs() < 1e-11 * exact);
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((total - 3.0).abs() < 1e-14);
    }

    #[test]
    fn ball_rays_have_unit_radius() {
        let d = Domain::from_poly("ball", &ball(), [C64::new(0.0, 0.0); 2]).unwrap();
        let (_, s) = d.boundary_point(&[0.5, 0.5, 0.5, -0.5]).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        let scaled = &Poly::constant(4.0) - &(&Poly::abs2(0) + &Poly::abs2(1));
        let d = Domain::from_poly("r2", &scaled, [C64::new(0.0, 0.0); 2]).unwrap();
        let (_, s) = d.boundary_point(&[0.0, 0.6, 0.8, 0.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        let text = "n = 2\nname = \"x\"\ncenter = [0.0, 0.0, 0.0, 0.0]\nrho = []\n";
        assert!(matches!(Domain::parse(text), Err(Error::Parse(_))));
        let text = "n = 1\nname = \"x\"\ncenter = [0.0, 0.0, 0.0, 0.0]\ncolour = 3\nrho = []\n";
        assert!(matches!(Domain::parse(text), Err(Error::Parse(_))));
    }
}
