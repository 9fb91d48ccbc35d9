//! Linear pencils `ρ_t = ρ + t σ`.

use serde::{Deserialize, Serialize};

use super::{Domain, DomainSpec};
use crate::error::{Error, Result};
use crate::jet::C64;
use crate::poly::{Monomial, Poly};

/// On-disk family description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub base: DomainSpec,
    /// `σ = ∂ρ_t/∂t`.
    pub direction: Vec<Monomial>,
    pub t_max: f64,
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug)]
pub struct Family {
    pub base: Domain,
    pub sigma: Poly,
    pub t_max: f64,
}

impl Family {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        Poly::check_hermitian(&spec.direction)?;
        if !(spec.t_max > 0.0 && spec.t_max.is_finite()) {
            return Err(Error::Parse(format!("t_max = {} must be positive", spec.t_max)));
        }
        Ok(Family {
            base: Domain::new(spec.base)?,
            sigma: Poly::from_monomials(&spec.direction),
            t_max: spec.t_max,
        })
    }

    pub fn from_parts(base: Domain, sigma: &Poly, t_max: f64) -> Self {
        Family {
            base,
            sigma: sigma.hermitian_part(),
            t_max,
        }
    }

    pub fn spec(&self) -> FamilySpec {
        FamilySpec {
            base: self.base.spec.clone(),
            direction: self.sigma.to_monomials(),
            t_max: self.t_max,
        }
    }

    /// `ρ + t σ`. The caller checks pseudoconvexity where it matters
    /// (see [`Family::check`]).
    pub fn at(&self, t: f64) -> Result<Domain> {
        if t.abs() > self.t_max {
            return Err(Error::Invalid(format!(
                "|t| = {} exceeds t_max = {}",
                t.abs(),
                self.t_max
            )));
        }
        if t == 0.0 {
            return Ok(self.base.clone());
        }
        let rho = &self.base.rho + &self.sigma.scale(C64::new(t, 0.0));
        let mut d = Domain::from_poly(&format!("{} (t = {t})", self.base.name()), &rho, self.base.center)?;
        d.spec.metadata = self.base.spec.metadata.clone();
        Ok(d)
    }

    /// Levi-positivity on a coarse sample at `±t`.
    pub fn check(&self, t: f64, n: usize) -> Result<()> {
        for s in [-t, t] {
            self.at(s)?.check_pseudoconvex(n)?;
        }
        Ok(())
    }

    /// `σ(p) = ρ̇(p)`.
    pub fn direction_at(&self, p: &[C64; 2]) -> f64 {
        self.sigma.eval_re(p)
    }

    /// Rotational symmetry shared by the base and the direction.
    pub fn rotation_symmetry(&self) -> [bool; 2] {
        let b = self.base.rotation_symmetry();
        let mut s = b;
        for (i, x) in s.iter_mut().enumerate() {
            *x = *x && self.sigma.terms().all(|(p, _)| p[2 * i] == p[2 * i + 1]);
        }
        s
    }
}

/// On-disk direction `σ` for second-variation probes at the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionSpec {
    #[serde(default)]
    pub name: String,
    pub direction: Vec<Monomial>,
}

impl DirectionSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let d: DirectionSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Poly::check_hermitian(&d.direction)?;
        if d.direction.iter().any(|m| !(m.re.is_finite() && m.im.is_finite())) {
            return Err(Error::Parse("non-finite coefficient in direction".into()));
        }
        Ok(d)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn poly(&self) -> Poly {
        Poly::from_monomials(&self.direction)
    }
}
