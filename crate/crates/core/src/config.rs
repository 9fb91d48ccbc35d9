//! Run settings shared by the library drivers and the command line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monge_ampere::Tolerances;
use crate::quadrature::{default_eps, PipelineConfig, RenormConfig, DEFAULT_DEGREE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Boundary grid resolution `N` (the check grid is `2N`).
    pub grid: usize,
    /// Taylor degree of `ρ` at boundary points.
    pub degree: usize,
    /// Divisibility tolerance of the normalization.
    pub tol: f64,
    /// Cutoffs of the volume expansion, strictly decreasing.
    pub eps: Vec<f64>,
    /// Finite-difference step in `t`.
    pub step: f64,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
    /// Collapse rotation-invariant grid variables.
    pub use_symmetry: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: 12,
            degree: DEFAULT_DEGREE,
            tol: Tolerances::default().divisibility,
            eps: default_eps(),
            step: 0.05,
            threads: 0,
            use_symmetry: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invalid(m));
        if !(4..=256).contains(&self.grid) {
            return bad(format!("grid {} outside 4..=256", self.grid));
        }
        if !(9..=16).contains(&self.degree) {
            return bad(format!("degree {} outside 9..=16", self.degree));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return bad(format!("tolerance {} outside (0, 1e-2]", self.tol));
        }
        if !(self.step > 0.0 && self.step <= 0.5) {
            return bad(format!("step {} outside (0, 0.5]", self.step));
        }
        if self.eps.len() < 5 {
            return bad(format!("{} cutoffs given, at least 5 needed", self.eps.len()));
        }
        if self.eps.iter().any(|e| !(*e > 0.0 && *e < 0.1)) {
            return bad("cutoffs must lie in (0, 0.1)".into());
        }
        if self.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return bad("cutoffs must be strictly decreasing".into());
        }
        Ok(())
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            degree: self.degree,
            tol: Tolerances {
                divisibility: self.tol,
                ..Tolerances::default()
            },
            use_symmetry: self.use_symmetry,
        }
    }

    pub fn renorm(&self) -> RenormConfig {
        RenormConfig {
            eps: self.eps.clone(),
            grid: self.grid,
            ..RenormConfig::default()
        }
    }
}

/// Parse `"e1,e2,..."`.
pub fn parse_eps(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("cutoff '{s}' is not a number")))
        })
        .collect()
}
