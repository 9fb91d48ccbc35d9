//! Sparse polynomials in `(z_1, z̄_1, z_2, z̄_2)`.
//!
//! Exponents are stored as `[a1, b1, a2, b2]` for `z1^a1 z̄1^b1 z2^a2 z̄2^b2`.
//! A polynomial is real-valued (Hermitian) when the coefficient of
//! `[b1, a1, b2, a2]` is the exact conjugate of the coefficient of
//! `[a1, b1, a2, b2]`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{JetC, C64};

pub type Pow = [u8; 4];

/// One `{pow, re, im}` record as it appears in domain files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub pow: Pow,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Pow, C64>,
}

fn conj_pow(p: &Pow) -> Pow {
    [p[1], p[0], p[3], p[2]]
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly::from_terms([([0, 0, 0, 0], C64::new(c, 0.0))])
    }

    /// `z_i` (i = 0, 1).
    pub fn z(i: usize) -> Self {
        let mut p = [0; 4];
        p[2 * i] = 1;
        Poly::from_terms([(p, C64::new(1.0, 0.0))])
    }

    pub fn zbar(i: usize) -> Self {
        Poly::z(i).conj()
    }

    /// `|z_i|^2`.
    pub fn abs2(i: usize) -> Self {
        let mut p = [0; 4];
        p[2 * i] = 1;
        p[2 * i + 1] = 1;
        Poly::from_terms([(p, C64::new(1.0, 0.0))])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Pow, C64)>) -> Self {
        let mut p = Poly::zero();
        for (pow, c) in terms {
            *p.terms.entry(pow).or_default() += c;
        }
        p.prune();
        p
    }

    pub fn from_monomials(ms: &[Monomial]) -> Self {
        Poly::from_terms(ms.iter().map(|m| (m.pow, C64::new(m.re, m.im))))
    }

    pub fn to_monomials(&self) -> Vec<Monomial> {
        self.terms
            .iter()
            .map(|(pow, c)| Monomial {
                pow: *pow,
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| *c != C64::new(0.0, 0.0));
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Pow, &C64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|p| p.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn conj(&self) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (conj_pow(p), c.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Poly::from_terms(self.terms.iter().map(|(p, x)| (*p, x * c)))
    }

    /// Bit-exact Hermitian check of a monomial list: every record needs a
    /// conjugate partner with exactly conjugate coefficient.
    pub fn check_hermitian(ms: &[Monomial]) -> Result<()> {
        let mut seen: BTreeMap<Pow, (f64, f64)> = BTreeMap::new();
        for m in ms {
            if seen.insert(m.pow, (m.re, m.im)).is_some() {
                return Err(Error::NotHermitian(format!("duplicate monomial {:?}", m.pow)));
            }
        }
        for (pow, (re, im)) in &seen {
            let cp = conj_pow(pow);
            match seen.get(&cp) {
                None => {
                    return Err(Error::NotHermitian(format!(
                        "monomial {pow:?} has no conjugate partner {cp:?}"
                    )))
                }
                Some((re2, im2)) => {
                    // exact comparison; signed zeros compare equal
                    if re != re2 || *im != -im2 {
                        return Err(Error::NotHermitian(format!(
                            "coefficients of {pow:?} and {cp:?} are not conjugate"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Hermitian up to rounding (for polynomials produced by arithmetic).
    pub fn hermitian_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| {
                let other = self.terms.get(&conj_pow(p)).copied().unwrap_or_default();
                (c - other.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Replace every coefficient by the average with its conjugate partner.
    pub fn hermitian_part(&self) -> Self {
        let c = self.conj();
        (self + &c).scale(C64::new(0.5, 0.0))
    }

    pub fn eval(&self, z: &[C64; 2]) -> C64 {
        let zb = [z[0].conj(), z[1].conj()];
        self.terms
            .iter()
            .map(|(p, c)| {
                c * z[0].powu(p[0] as u32)
                    * zb[0].powu(p[1] as u32)
                    * z[1].powu(p[2] as u32)
                    * zb[1].powu(p[3] as u32)
            })
            .sum()
    }

    /// Real value of a Hermitian polynomial.
    pub fn eval_re(&self, z: &[C64; 2]) -> f64 {
        self.eval(z).re
    }

    /// Real gradient `(∂/∂x1, ∂/∂y1, ∂/∂x2, ∂/∂y2)` of the real part.
    pub fn grad_re(&self, z: &[C64; 2]) -> [f64; 4] {
        let mut g = [0.0; 4];
        for i in 0..2 {
            // ∂/∂x = ∂ + ∂̄, ∂/∂y = i(∂ - ∂̄)
            let d = self.dz(i).eval(z);
            let db = self.dzbar(i).eval(z);
            let gx = d + db;
            let gy = C64::new(0.0, 1.0) * (d - db);
            g[2 * i] = gx.re;
            g[2 * i + 1] = gy.re;
        }
        g
    }

    pub fn dz(&self, i: usize) -> Self {
        Poly::from_terms(self.terms.iter().filter(|(p, _)| p[2 * i] > 0).map(|(p, c)| {
            let mut q = *p;
            q[2 * i] -= 1;
            (q, c * p[2 * i] as f64)
        }))
    }

    pub fn dzbar(&self, i: usize) -> Self {
        Poly::from_terms(
            self.terms
                .iter()
                .filter(|(p, _)| p[2 * i + 1] > 0)
                .map(|(p, c)| {
                    let mut q = *p;
                    q[2 * i + 1] -= 1;
                    (q, c * p[2 * i + 1] as f64)
                }),
        )
    }

    pub fn powu(&self, k: u32) -> Self {
        (0..k).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }

    /// Substitute holomorphic polynomials for `z_1, z_2`: `p(f1, f̄1, f2, f̄2)`.
    pub fn compose_holomorphic(&self, f: &[Poly; 2]) -> Self {
        let fb = [f[0].conj(), f[1].conj()];
        let mut out = Poly::zero();
        for (p, c) in &self.terms {
            let t = &(&f[0].powu(p[0] as u32) * &fb[0].powu(p[1] as u32))
                * &(&f[1].powu(p[2] as u32) * &fb[1].powu(p[3] as u32));
            out = &out + &t.scale(*c);
        }
        out
    }

    /// Exact Taylor re-expansion at `base`, truncated at `degree`.
    pub fn jet(&self, base: [C64; 2], degree: usize) -> JetC {
        let mut j = JetC::zero(base, degree);
        let bb = [base[0], base[0].conj(), base[1], base[1].conj()];
        let real = self.hermitian_defect() == 0.0;
        for (p, c) in &self.terms {
            // product of independent binomial shifts (b + w)^a per variable
            let mut shifts: Vec<Vec<C64>> = Vec::with_capacity(4);
            for v in 0..4 {
                let a = p[v] as usize;
                shifts.push(
                    (0..=a)
                        .map(|k| binom(a, k) * bb[v].powu((a - k) as u32))
                        .collect(),
                );
            }
            for k0 in 0..=p[0] as usize {
                for k1 in 0..=p[1] as usize {
                    for k2 in 0..=p[2] as usize {
                        for k3 in 0..=p[3] as usize {
                            if k0 + k1 + k2 + k3 > degree {
                                continue;
                            }
                            let e = [k0 as u8, k1 as u8, k2 as u8, k3 as u8];
                            let v = c * shifts[0][k0] * shifts[1][k1] * shifts[2][k2] * shifts[3][k3];
                            let cur = j.coeff(&e);
                            j.set_coeff(&e, cur + v);
                        }
                    }
                }
            }
        }
        if real {
            j.into_real()
        } else {
            j.into_complex()
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::from_terms(self.terms.iter().chain(rhs.terms.iter()).map(|(p, c)| (*p, *c)))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out: BTreeMap<Pow, C64> = BTreeMap::new();
        for (p, a) in &self.terms {
            for (q, b) in &rhs.terms {
                let e = [p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3]];
                *out.entry(e).or_default() += a * b;
            }
        }
        let mut r = Poly { terms: out };
        r.prune();
        r
    }
}

/// `1 - |z|^2`.
pub fn ball() -> Poly {
    &(&Poly::constant(1.0) - &Poly::abs2(0)) - &Poly::abs2(1)
}
