//! The allowed biholomorphisms: unitaries, diagonal scalings, triangular
//! shears `(z₁, z₂) ↦ (z₁, z₂ + c z₁^k)` and their compositions.
//!
//! All of them have a constant Jacobian determinant, so a Fefferman
//! defining function `r` of `Ω` transports to `Φ(Ω)` as
//! `r̂ = |det Φ′|^{2/3} · r ∘ Φ⁻¹`.

use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{Error, Result};
use crate::jet::C64;
use crate::poly::Poly;

/// Complex numbers appear as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    /// `z ↦ U z`, rows of `U`.
    Unitary { matrix: [[[f64; 2]; 2]; 2] },
    /// `(z₁, z₂) ↦ (a₁ z₁, a₂ z₂)`.
    Scaling { factors: [[f64; 2]; 2] },
    /// `(z₁, z₂) ↦ (z₁, z₂ + c z₁^k)`.
    Shear { coeff: [f64; 2], power: u32 },
    /// Applied first to last.
    Composition { maps: Vec<MapSpec> },
}

fn cx(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

impl MapSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let m: MapSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::Unitary { matrix } => {
                let u: [[C64; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| cx(matrix[i][j])));
                for i in 0..2 {
                    for j in 0..2 {
                        let dot = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
                        let id = if i == j { 1.0 } else { 0.0 };
                        if (dot - id).norm() > 1e-12 {
                            return Err(Error::SingularMap(format!(
                                "matrix is not unitary (U*U − I has entry {:.3e})",
                                (dot - id).norm()
                            )));
                        }
                    }
                }
            }
            MapSpec::Scaling { factors } => {
                if factors.iter().any(|f| cx(*f).norm() == 0.0) {
                    return Err(Error::SingularMap("zero scaling factor".into()));
                }
            }
            MapSpec::Shear { power, .. } => {
                if *power == 0 {
                    return Err(Error::Invalid("shear power must be at least 1".into()));
                }
            }
            MapSpec::Composition { maps } => {
                if maps.is_empty() {
                    return Err(Error::Invalid("empty composition".into()));
                }
                for m in maps {
                    m.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Component polynomials `(Φ₁, Φ₂)`, holomorphic.
    pub fn components(&self) -> [Poly; 2] {
        let z = [Poly::z(0), Poly::z(1)];
        match self {
            MapSpec::Unitary { matrix } => std::array::from_fn(|i| {
                &z[0].scale(cx(matrix[i][0])) + &z[1].scale(cx(matrix[i][1]))
            }),
            MapSpec::Scaling { factors } => {
                [z[0].scale(cx(factors[0])), z[1].scale(cx(factors[1]))]
            }
            MapSpec::Shear { coeff, power } => {
                [z[0].clone(), &z[1] + &z[0].powu(*power).scale(cx(*coeff))]
            }
            MapSpec::Composition { maps } => {
                let mut acc = z;
                for m in maps {
                    let f = m.components();
                    acc = [
                        compose_holo(&f[0], &acc),
                        compose_holo(&f[1], &acc),
                    ];
                }
                acc
            }
        }
    }

    /// Closed-form inverse.
    pub fn inverse(&self) -> Result<MapSpec> {
        self.validate()?;
        Ok(match self {
            MapSpec::Unitary { matrix } => MapSpec::Unitary {
                matrix: std::array::from_fn(|i| {
                    std::array::from_fn(|j| pair(cx(matrix[j][i]).conj()))
                }),
            },
            MapSpec::Scaling { factors } => MapSpec::Scaling {
                factors: [pair(cx(factors[0]).inv()), pair(cx(factors[1]).inv())],
            },
            MapSpec::Shear { coeff, power } => MapSpec::Shear {
                coeff: [-coeff[0], -coeff[1]],
                power: *power,
            },
            MapSpec::Composition { maps } => MapSpec::Composition {
                maps: maps.iter().rev().map(|m| m.inverse()).collect::<Result<_>>()?,
            },
        })
    }

    /// `det Φ′`, constant for every allowed map.
    pub fn jacobian_det(&self) -> C64 {
        match self {
            MapSpec::Unitary { matrix } => {
                let u: [[C64; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| cx(matrix[i][j])));
                u[0][0] * u[1][1] - u[0][1] * u[1][0]
            }
            MapSpec::Scaling { factors } => cx(factors[0]) * cx(factors[1]),
            MapSpec::Shear { .. } => C64::new(1.0, 0.0),
            MapSpec::Composition { maps } => maps.iter().map(|m| m.jacobian_det()).product(),
        }
    }

    /// Principal cube root `φ = (det Φ′)^{1/3}`.
    pub fn jacobian_root(&self) -> C64 {
        self.jacobian_det().powf(1.0 / 3.0)
    }

    /// Factor `|det Φ′|^{2/3}` relating Fefferman defining functions.
    pub fn transport_factor(&self) -> f64 {
        self.jacobian_det().norm().powf(2.0 / 3.0)
    }

    pub fn apply(&self, z: &[C64; 2]) -> [C64; 2] {
        let f = self.components();
        [f[0].eval(z), f[1].eval(z)]
    }
}

/// `f(g₁, g₂)` for holomorphic `f`.
fn compose_holo(f: &Poly, g: &[Poly; 2]) -> Poly {
    f.compose_holomorphic(g)
}

/// Image domain `Φ(Ω) = {ρ ∘ Φ⁻¹ > 0}` with the center carried along.
pub fn transform(domain: &Domain, map: &MapSpec) -> Result<Domain> {
    let inv = map.inverse()?;
    let rho = domain.rho.compose_holomorphic(&inv.components());
    let center = map.apply(&domain.center);
    let mut out = Domain::from_poly(&domain.spec.name, &rho, center)?;
    out.spec.metadata = domain.spec.metadata.clone();
    Ok(out)
}
