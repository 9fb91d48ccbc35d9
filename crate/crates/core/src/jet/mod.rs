//! Truncated multivariate Taylor expansions ("jets") in the variables
//! `(w_1, w̄_1, ..., w_N, w̄_N)`, `w = z - base`, with complex coefficients.
//!
//! All smooth data in the crate (defining functions, curvature quantities,
//! frame fields) is carried as jets at a base point. Coefficients are stored
//! densely in the graded-lex order of [`table::MonomialTable`].

pub mod series;
pub mod table;
pub mod transform;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use table::{Exps, MonomialTable, MAX_VARS};

pub type C64 = Complex64;

/// Jet on `C^2` (four real variables).
pub type JetC = Jet<2>;
/// Jet on `C^3`, used for ambient computations on `C* x C^2`.
pub type JetC6 = Jet<3>;

/// A holomorphic or antiholomorphic coordinate direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    Z(usize),
    Zbar(usize),
}

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Var::Z(i) => 2 * i,
            Var::Zbar(i) => 2 * i + 1,
        }
    }
}

#[derive(Clone)]
pub struct Jet<const N: usize> {
    base: [C64; N],
    degree: usize,
    real: bool,
    coeffs: Vec<C64>,
    table: Arc<MonomialTable>,
}

impl<const N: usize> fmt::Debug for Jet<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("base", &self.base)
            .field("degree", &self.degree)
            .field("real", &self.real)
            .field("nonzero", &self.coeffs.iter().filter(|c| c.norm() > 0.0).count())
            .finish()
    }
}

pub(crate) fn pairwise_sum(xs: &[C64]) -> C64 {
    if xs.len() <= 8 {
        xs.iter().copied().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

impl<const N: usize> Jet<N> {
    pub const NVARS: usize = 2 * N;

    pub fn zero(base: [C64; N], degree: usize) -> Self {
        let table = table::table(2 * N, degree);
        let len = table.len(degree);
        Jet {
            base,
            degree,
            real: true,
            coeffs: vec![C64::new(0.0, 0.0); len],
            table,
        }
    }

    pub fn constant(base: [C64; N], degree: usize, c: C64) -> Self {
        let mut j = Self::zero(base, degree);
        j.coeffs[0] = c;
        j.real = c.im == 0.0;
        j
    }

    /// The displacement variable `w_i` or `w̄_i`.
    pub fn variable(base: [C64; N], degree: usize, var: Var) -> Self {
        let mut j = Self::zero(base, degree);
        if degree >= 1 {
            let mut e = [0u8; MAX_VARS];
            e[var.index()] = 1;
            let k = j.table.index_of(&e).unwrap();
            j.coeffs[k] = C64::new(1.0, 0.0);
        }
        j.real = false;
        j
    }

    /// The coordinate function `z_i` (or `z̄_i`) expanded at the base point.
    pub fn coordinate(base: [C64; N], degree: usize, var: Var) -> Self {
        let mut j = Self::variable(base, degree, var);
        j.coeffs[0] = match var {
            Var::Z(i) => base[i],
            Var::Zbar(i) => base[i].conj(),
        };
        j
    }

    /// Build from a raw coefficient vector in table order.
    pub fn from_coeffs(base: [C64; N], degree: usize, coeffs: Vec<C64>, real: bool) -> Self {
        let table = table::table(2 * N, degree);
        assert_eq!(coeffs.len(), table.len(degree), "coefficient count");
        let mut j = Jet {
            base,
            degree,
            real,
            coeffs,
            table,
        };
        if real {
            j.symmetrize();
        }
        j
    }

    pub(crate) fn with_coeffs(&self, degree: usize, coeffs: Vec<C64>, real: bool) -> Self {
        debug_assert_eq!(coeffs.len(), self.table.len(degree));
        let mut j = Jet {
            base: self.base,
            degree,
            real,
            coeffs,
            table: Arc::clone(&self.table),
        };
        if real {
            j.symmetrize();
        }
        j
    }

    #[inline]
    pub fn base(&self) -> &[C64; N] {
        &self.base
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn is_real(&self) -> bool {
        self.real
    }

    #[inline]
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    #[inline]
    pub fn table(&self) -> &MonomialTable {
        &self.table
    }

    /// Value at the base point.
    #[inline]
    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    /// Coefficient of the monomial with the given exponents (zero beyond the
    /// truncation degree).
    pub fn coeff(&self, exps: &[u8]) -> C64 {
        let mut e = [0u8; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        let d: usize = e.iter().map(|&x| x as usize).sum();
        if d > self.degree {
            return C64::new(0.0, 0.0);
        }
        self.table
            .index_of(&e)
            .map(|k| self.coeffs[k])
            .unwrap_or_default()
    }

    pub fn set_coeff(&mut self, exps: &[u8], value: C64) {
        let mut e = [0u8; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        let k = self.table.index_of(&e).expect("monomial within table");
        assert!(k < self.coeffs.len(), "monomial beyond truncation degree");
        self.coeffs[k] = value;
    }

    /// Mark as real-valued and enforce `c(a,b) = conj(c(b,a))` exactly.
    pub fn into_real(mut self) -> Self {
        self.real = true;
        self.symmetrize();
        self
    }

    /// Drop the real-valued flag (e.g. before complex scaling).
    pub fn into_complex(mut self) -> Self {
        self.real = false;
        self
    }

    fn symmetrize(&mut self) {
        for k in 0..self.coeffs.len() {
            let c = self.table.conj(k);
            if c > k {
                let avg = 0.5 * (self.coeffs[k] + self.coeffs[c].conj());
                self.coeffs[k] = avg;
                self.coeffs[c] = avg.conj();
            } else if c == k {
                self.coeffs[k].im = 0.0;
            }
        }
    }

    /// Largest violation of the conjugation symmetry.
    pub fn reality_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|k| (self.coeffs[k] - self.coeffs[self.table.conj(k)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Complex conjugate function.
    pub fn conj(&self) -> Self {
        if self.real {
            return self.clone();
        }
        let coeffs = (0..self.coeffs.len())
            .map(|k| self.coeffs[self.table.conj(k)].conj())
            .collect();
        self.with_coeffs(self.degree, coeffs, false)
    }

    /// Real part `(f + f̄)/2` as a real jet.
    pub fn re(&self) -> Self {
        if self.real {
            return self.clone();
        }
        let coeffs = (0..self.coeffs.len())
            .map(|k| 0.5 * (self.coeffs[k] + self.coeffs[self.table.conj(k)].conj()))
            .collect();
        self.with_coeffs(self.degree, coeffs, true)
    }

    /// Imaginary part `(f - f̄)/(2i)` as a real jet.
    pub fn im(&self) -> Self {
        let coeffs = (0..self.coeffs.len())
            .map(|k| {
                (self.coeffs[k] - self.coeffs[self.table.conj(k)].conj()) / C64::new(0.0, 2.0)
            })
            .collect();
        self.with_coeffs(self.degree, coeffs, true)
    }

    pub fn truncate(&self, degree: usize) -> Self {
        if degree >= self.degree {
            return self.clone();
        }
        let n = self.table.len(degree);
        self.with_coeffs(degree, self.coeffs[..n].to_vec(), self.real)
    }

    /// Max-abs coefficient.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Max-abs coefficient of `self - other` over the common degree.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeffs[k] - other.coeffs[k]).norm())
            .fold(0.0, f64::max)
    }

    /// Lowest total degree carrying a coefficient above `tol` in magnitude.
    pub fn valuation(&self, tol: f64) -> usize {
        (0..self.coeffs.len())
            .find(|&k| self.coeffs[k].norm() > tol)
            .map(|k| self.table.deg(k))
            .unwrap_or(self.degree + 1)
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            Err(Error::BaseMismatch)
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let d = self.degree.min(other.degree);
        let n = self.table.len(d);
        let coeffs = (0..n).map(|k| self.coeffs[k] + other.coeffs[k]).collect();
        Ok(self.with_coeffs(d, coeffs, self.real && other.real))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let d = self.degree.min(other.degree);
        let n = self.table.len(d);
        let coeffs = (0..n).map(|k| self.coeffs[k] - other.coeffs[k]).collect();
        Ok(self.with_coeffs(d, coeffs, self.real && other.real))
    }

    /// Truncated Cauchy product; output degree `min(deg a, deg b)`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        let d = self.degree.min(other.degree);
        Ok(self.product(other, d))
    }

    /// Product known to a degree above `min(deg a, deg b)`.
    ///
    /// If `self` vanishes to order `valuation` at the base point, the product
    /// is determined up to degree `min(deg self, deg other + valuation)`.
    /// Coefficients of `self` below `valuation` are treated as zero; they
    /// must be negligible (checked against `1e-8` relative).
    pub fn mul_vanishing(&self, other: &Self, valuation: usize) -> Result<Self> {
        self.check_base(other)?;
        let d = self.degree.min(other.degree + valuation);
        let low = self.table.len(valuation.saturating_sub(1)).min(self.coeffs.len());
        let scale = self.norm_inf().max(1.0);
        if valuation > 0 {
            let defect = self.coeffs[..low].iter().map(|c| c.norm()).fold(0.0, f64::max);
            if defect > 1e-8 * scale {
                return Err(Error::Numeric(format!(
                    "jet does not vanish to order {valuation} (low-order defect {defect:.3e})"
                )));
            }
        }
        let mut a = self.truncate(d);
        for c in a.coeffs.iter_mut().take(if valuation > 0 { low } else { 0 }) {
            *c = C64::new(0.0, 0.0);
        }
        // other's coefficients beyond its degree never meet a's nonzero ones
        let n = self.table.len(d);
        let ob = other.coeffs.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        let mut buf = Vec::with_capacity(64);
        for (k, slot) in out.iter_mut().enumerate() {
            buf.clear();
            for &(i, j) in self.table.pairs(k) {
                let (i, j) = (i as usize, j as usize);
                if j < ob {
                    buf.push(a.coeffs[i] * other.coeffs[j]);
                }
            }
            *slot = pairwise_sum(&buf);
        }
        a.coeffs = out;
        a.degree = d;
        a.real = self.real && other.real;
        if a.real {
            a.symmetrize();
        }
        Ok(a)
    }

    fn product(&self, other: &Self, d: usize) -> Self {
        let n = self.table.len(d);
        let mut out = vec![C64::new(0.0, 0.0); n];
        let mut buf = Vec::with_capacity(64);
        let (a, b) = (&self.coeffs, &other.coeffs);
        for (k, slot) in out.iter_mut().enumerate() {
            buf.clear();
            buf.extend(
                self.table
                    .pairs(k)
                    .iter()
                    .map(|&(i, j)| a[i as usize] * b[j as usize]),
            );
            *slot = pairwise_sum(&buf);
        }
        self.with_coeffs(d, out, self.real && other.real)
    }

    pub fn scale(&self, c: C64) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        self.with_coeffs(self.degree, coeffs, self.real && c.im == 0.0)
    }

    pub fn scale_re(&self, c: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        self.with_coeffs(self.degree, coeffs, self.real)
    }

    pub fn add_scalar(&self, c: C64) -> Self {
        let mut j = self.clone();
        j.coeffs[0] += c;
        j.real = self.real && c.im == 0.0;
        j
    }

    /// Formal partial derivative in one of the real variables; degree drops by one.
    pub fn derivative(&self, var: Var) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::Degree {
                what: "derivative",
                needed: 1,
                have: 0,
            });
        }
        let v = var.index();
        assert!(v < 2 * N);
        let d = self.degree - 1;
        let n = self.table.len(d);
        let coeffs = (0..n)
            .map(|k| {
                let src = self.table.raise(k, v);
                let pow = self.table.exps(k)[v] as f64 + 1.0;
                self.coeffs[src] * pow
            })
            .collect();
        // ∂_z of a real function is not real
        Ok(self.with_coeffs(d, coeffs, false))
    }

    /// Wirtinger derivative `∂/∂z_i` or `∂/∂z̄_i`.
    pub fn wirtinger(&self, var: Var) -> Result<Self> {
        self.derivative(var)
    }

    /// Evaluate at an independent displacement of all `2N` real variables.
    pub fn eval_vars(&self, disp: &[C64]) -> C64 {
        assert_eq!(disp.len(), 2 * N);
        // powers of each displacement up to degree
        let mut pows = vec![[C64::new(1.0, 0.0); MAX_VARS]; self.degree + 1];
        for p in 1..=self.degree {
            for v in 0..2 * N {
                pows[p][v] = pows[p - 1][v] * disp[v];
            }
        }
        let terms: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let e: &Exps = self.table.exps(k);
                let mut m = *c;
                for v in 0..2 * N {
                    if e[v] > 0 {
                        m *= pows[e[v] as usize][v];
                    }
                }
                m
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Evaluate at `base + w`.
    pub fn eval(&self, w: &[C64; N]) -> C64 {
        let mut disp = [C64::new(0.0, 0.0); MAX_VARS];
        for i in 0..N {
            disp[2 * i] = w[i];
            disp[2 * i + 1] = w[i].conj();
        }
        self.eval_vars(&disp[..2 * N])
    }

    /// Restriction to the real line `t ↦ base + t·dir` as polynomial
    /// coefficients in `t` (ascending).
    pub fn restrict_to_line(&self, dir: &[C64; N]) -> Vec<C64> {
        let mut disp = [C64::new(0.0, 0.0); MAX_VARS];
        for i in 0..N {
            disp[2 * i] = dir[i];
            disp[2 * i + 1] = dir[i].conj();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.degree + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.table.exps(k);
            let mut m = *c;
            for v in 0..2 * N {
                for _ in 0..e[v] {
                    m *= disp[v];
                }
            }
            out[self.table.deg(k)] += m;
        }
        out
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<const N: usize> $tr<&Jet<N>> for &Jet<N> {
            type Output = Jet<N>;
            fn $method(self, rhs: &Jet<N>) -> Jet<N> {
                self.$checked(rhs).expect("jet base points must agree")
            }
        }
        impl<const N: usize> $tr<Jet<N>> for Jet<N> {
            type Output = Jet<N>;
            fn $method(self, rhs: Jet<N>) -> Jet<N> {
                (&self).$checked(&rhs).expect("jet base points must agree")
            }
        }
        impl<const N: usize> $tr<&Jet<N>> for Jet<N> {
            type Output = Jet<N>;
            fn $method(self, rhs: &Jet<N>) -> Jet<N> {
                (&self).$checked(rhs).expect("jet base points must agree")
            }
        }
        impl<const N: usize> $tr<Jet<N>> for &Jet<N> {
            type Output = Jet<N>;
            fn $method(self, rhs: Jet<N>) -> Jet<N> {
                self.$checked(&rhs).expect("jet base points must agree")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<const N: usize> Neg for &Jet<N> {
    type Output = Jet<N>;
    fn neg(self) -> Jet<N> {
        self.scale_re(-1.0)
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Jet<N>;
    fn neg(self) -> Jet<N> {
        self.scale_re(-1.0)
    }
}
