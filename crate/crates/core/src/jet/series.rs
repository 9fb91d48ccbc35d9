//! Order-by-order recursions for reciprocals, quotients, real powers,
//! exponentials and logarithms of jets.
//!
//! Each recursion walks the output monomials in graded order; the degree-`k`
//! coefficient depends only on already computed lower-degree coefficients
//! and the constant term of the input.

use super::{pairwise_sum, Jet, C64};
use crate::error::{Error, Result};

const TINY: f64 = 1e-300;

impl<const N: usize> Jet<N> {
    fn invertible(&self, what: &str) -> Result<C64> {
        let a0 = self.value();
        if a0.norm() <= TINY || !a0.norm().is_finite() {
            return Err(Error::NotInvertible(format!(
                "{what}: constant term {a0} vanishes"
            )));
        }
        Ok(a0)
    }

    /// `1 / self`.
    pub fn recip(&self) -> Result<Self> {
        let one = Self::constant(self.base, self.degree, C64::new(1.0, 0.0));
        one.checked_div(self)
    }

    /// `self / other`; requires a nonvanishing constant term in `other`.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if self.base != other.base {
            return Err(Error::BaseMismatch);
        }
        let b0 = other.invertible("division")?;
        let d = self.degree.min(other.degree);
        let t = &self.table;
        let n = t.len(d);
        let mut q = vec![C64::new(0.0, 0.0); n];
        let mut buf = Vec::with_capacity(64);
        for m in 0..n {
            buf.clear();
            for &(i, j) in t.pairs(m) {
                if j != 0 {
                    buf.push(q[i as usize] * other.coeffs[j as usize]);
                }
            }
            q[m] = (self.coeffs[m] - pairwise_sum(&buf)) / b0;
        }
        Ok(self.with_coeffs(d, q, self.real && other.real))
    }

    /// `self^alpha` for real `alpha`.
    ///
    /// Real jets need a positive constant term; complex jets use the
    /// principal branch.
    pub fn pow_real(&self, alpha: f64) -> Result<Self> {
        let a0 = self.invertible("power")?;
        if self.real && a0.re <= 0.0 {
            return Err(Error::NotInvertible(format!(
                "real power of non-positive constant term {}",
                a0.re
            )));
        }
        let t = &self.table;
        let n = self.coeffs.len();
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[0] = if self.real {
            C64::new(a0.re.powf(alpha), 0.0)
        } else {
            a0.powf(alpha)
        };
        let mut buf = Vec::with_capacity(64);
        for m in 1..n {
            let k = t.deg(m) as f64;
            buf.clear();
            for &(i, j) in t.pairs(m) {
                if j != 0 {
                    let (i, j) = (i as usize, j as usize);
                    let w = alpha * t.deg(j) as f64 - t.deg(i) as f64;
                    buf.push(y[i] * self.coeffs[j] * w);
                }
            }
            y[m] = pairwise_sum(&buf) / (a0 * k);
        }
        Ok(self.with_coeffs(self.degree, y, self.real))
    }

    pub fn exp(&self) -> Self {
        let t = &self.table;
        let n = self.coeffs.len();
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[0] = self.coeffs[0].exp();
        let mut buf = Vec::with_capacity(64);
        for m in 1..n {
            let k = t.deg(m) as f64;
            buf.clear();
            for &(i, j) in t.pairs(m) {
                if j != 0 {
                    let (i, j) = (i as usize, j as usize);
                    buf.push(y[i] * self.coeffs[j] * t.deg(j) as f64);
                }
            }
            y[m] = pairwise_sum(&buf) / k;
        }
        self.with_coeffs(self.degree, y, self.real)
    }

    /// Natural logarithm; real jets need a positive constant term.
    pub fn ln(&self) -> Result<Self> {
        let a0 = self.invertible("logarithm")?;
        if self.real && a0.re <= 0.0 {
            return Err(Error::NotInvertible(format!(
                "log of non-positive constant term {}",
                a0.re
            )));
        }
        let t = &self.table;
        let n = self.coeffs.len();
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[0] = if self.real {
            C64::new(a0.re.ln(), 0.0)
        } else {
            a0.ln()
        };
        let mut buf = Vec::with_capacity(64);
        for m in 1..n {
            let k = t.deg(m) as f64;
            buf.clear();
            for &(i, j) in t.pairs(m) {
                if j != 0 && i != 0 {
                    let (i, j) = (i as usize, j as usize);
                    buf.push(y[i] * self.coeffs[j] * t.deg(i) as f64);
                }
            }
            y[m] = (self.coeffs[m] * k - pairwise_sum(&buf)) / (a0 * k);
        }
        Ok(self.with_coeffs(self.degree, y, self.real))
    }
}
