//! Linear changes of variables and exact division by powers of a defining
//! function.

use super::table::{Exps, MAX_VARS};
use super::{pairwise_sum, Jet, C64};
use crate::error::{Error, Result};

/// Holomorphic affine map `z ↦ A z + b` on `C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<const N: usize> {
    pub linear: [[C64; N]; N],
    pub shift: [C64; N],
}

impl AffineMap<2> {
    pub fn identity() -> Self {
        let o = C64::new(0.0, 0.0);
        let i = C64::new(1.0, 0.0);
        AffineMap {
            linear: [[i, o], [o, i]],
            shift: [o, o],
        }
    }

    pub fn det(&self) -> C64 {
        let a = &self.linear;
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }

    pub fn apply(&self, z: &[C64; 2]) -> [C64; 2] {
        let a = &self.linear;
        [
            a[0][0] * z[0] + a[0][1] * z[1] + self.shift[0],
            a[1][0] * z[0] + a[1][1] * z[1] + self.shift[1],
        ]
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.norm() < 1e-14 {
            return Err(Error::SingularMap(format!("affine map with det {det}")));
        }
        let a = &self.linear;
        let inv = [
            [a[1][1] / det, -a[0][1] / det],
            [-a[1][0] / det, a[0][0] / det],
        ];
        let b = &self.shift;
        let shift = [
            -(inv[0][0] * b[0] + inv[0][1] * b[1]),
            -(inv[1][0] * b[0] + inv[1][1] * b[1]),
        ];
        Ok(AffineMap { linear: inv, shift })
    }
}

/// Substitute `v = M y` into a coefficient vector: returns the coefficients
/// of `y ↦ a(M y)` over the same monomial table. `m` is row-major `nv x nv`.
pub(crate) fn substitute_linear<const N: usize>(a: &Jet<N>, m: &[C64]) -> Vec<C64> {
    let t = a.table();
    let nv = 2 * N;
    assert_eq!(m.len(), nv * nv);
    let d = a.degree();
    let mut out = vec![C64::new(0.0, 0.0); a.coeffs().len()];
    out[0] = a.coeffs()[0];
    // images of the degree-(k-1) monomials, each a dense degree-(k-1) block
    let mut prev: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
    for k in 1..=d {
        let pb = t.block(k - 1);
        let cb = t.block(k);
        let mut cur: Vec<Vec<C64>> = Vec::with_capacity(cb.len());
        for mono in cb.clone() {
            let e = t.exps(mono);
            let v = (0..nv).find(|&v| e[v] > 0).unwrap();
            let mut lower: Exps = *e;
            lower[v] -= 1;
            let src = t.index_of(&lower).unwrap() - pb.start;
            let mut img = vec![C64::new(0.0, 0.0); cb.len()];
            for (off, &coef) in prev[src].iter().enumerate() {
                if coef == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..nv {
                    let mij = m[v * nv + j];
                    if mij != C64::new(0.0, 0.0) {
                        img[t.raise(pb.start + off, j) - cb.start] += coef * mij;
                    }
                }
            }
            let c = a.coeffs()[mono];
            if c != C64::new(0.0, 0.0) {
                for (off, x) in img.iter().enumerate() {
                    out[cb.start + off] += c * x;
                }
            }
            cur.push(img);
        }
        prev = cur;
    }
    out
}

impl Jet<2> {
    /// Re-expand `a ∘ T` at the pulled-back base point `T⁻¹(base)`.
    pub fn compose_affine(&self, map: &AffineMap<2>) -> Result<Self> {
        let inv = map.inverse()?;
        let new_base = inv.apply(self.base());
        // w = A ŵ and w̄ = Ā ŵ̄ in the ordering (w1, w̄1, w2, w̄2)
        let a = &map.linear;
        let o = C64::new(0.0, 0.0);
        let mut m = [o; 16];
        for i in 0..2 {
            for j in 0..2 {
                m[(2 * i) * 4 + 2 * j] = a[i][j];
                m[(2 * i + 1) * 4 + 2 * j + 1] = a[i][j].conj();
            }
        }
        let coeffs = substitute_linear(self, &m);
        Ok(Jet::from_coeffs(new_base, self.degree(), coeffs, self.is_real()))
    }
}

impl<const N: usize> Jet<N> {
    /// Exact division `g = q · u` where `u` vanishes at the base point with
    /// nonzero differential. Returns `q` (degree `deg g - 1`) and the largest
    /// remainder coefficient encountered.
    ///
    /// Homogeneous parts are solved in increasing degree. Each step divides a
    /// homogeneous polynomial by the linear part `ℓ` of `u` with respect to
    /// the pivot variable carrying the largest coefficient of `ℓ`, i.e. in
    /// lexicographic order with the pivot first; monomials free of the pivot
    /// form the remainder.
    pub fn divide_once(&self, u: &Self) -> Result<(Self, f64)> {
        if self.base != u.base {
            return Err(Error::BaseMismatch);
        }
        if self.degree == 0 {
            return Err(Error::Degree {
                what: "division by defining function",
                needed: 1,
                have: 0,
            });
        }
        let t = &self.table;
        let nv = 2 * N;
        let lin_by_var: Vec<C64> = (0..nv)
            .map(|v| {
                let mut e: Exps = [0; MAX_VARS];
                e[v] = 1;
                u.coeffs[t.index_of(&e).unwrap()]
            })
            .collect();
        let (pivot, lp) = lin_by_var
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .map(|(v, c)| (v, *c))
            .unwrap();
        let scale = u.norm_inf().max(1e-300);
        if lp.norm() <= 1e-12 * scale {
            return Err(Error::DegenerateDefiningFunction);
        }
        let dg = self.degree.min(u.degree);
        let dq = dg - 1;
        let mut q = vec![C64::new(0.0, 0.0); t.len(dq)];
        let mut residual = self.coeffs[0].norm();
        let mut buf = Vec::with_capacity(64);
        for k in 0..=dq {
            // f = g_{k+1} - [q_{<k} · u]_{k+1}
            let blk = t.block(k + 1);
            let mut f: Vec<C64> = Vec::with_capacity(blk.len());
            for mono in blk.clone() {
                buf.clear();
                for &(i, j) in t.pairs(mono) {
                    let (i, j) = (i as usize, j as usize);
                    if t.deg(j) >= 2 && i < q.len() {
                        buf.push(q[i] * u.coeffs[j]);
                    }
                }
                f.push(self.coeffs[mono] - pairwise_sum(&buf));
            }
            // synthetic division of the homogeneous part by ℓ, pivot power descending
            let mut order: Vec<usize> = (0..blk.len()).collect();
            order.sort_by_key(|&o| std::cmp::Reverse(t.exps(blk.start + o)[pivot]));
            for &o in &order {
                let mono = blk.start + o;
                let e = t.exps(mono);
                if e[pivot] == 0 {
                    residual = residual.max(f[o].norm());
                    continue;
                }
                let c = f[o] / lp;
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut lower: Exps = *e;
                lower[pivot] -= 1;
                let qi = t.index_of(&lower).unwrap();
                q[qi] += c;
                for (v, lv) in lin_by_var.iter().enumerate() {
                    if *lv != C64::new(0.0, 0.0) {
                        let target = t.raise(qi, v) - blk.start;
                        f[target] -= c * lv;
                    }
                }
            }
        }
        Ok((self.with_coeffs(dq, q, self.real && u.real), residual))
    }

    /// Solve `h · u^s = g`; output degree `deg g - s`.
    ///
    /// Fails with [`Error::NotDivisible`] if the remainder exceeds
    /// `tol · max(1, |g|)`.
    pub fn divide_by_power(&self, u: &Self, s: usize, tol: f64) -> Result<Self> {
        let (h, res) = self.divide_by_power_residual(u, s)?;
        let bound = tol * self.norm_inf().max(1.0);
        if res > bound {
            return Err(Error::NotDivisible {
                residual: res,
                tol: bound,
            });
        }
        Ok(h)
    }

    /// As [`divide_by_power`](Self::divide_by_power) but returns the raw
    /// remainder instead of checking it.
    pub fn divide_by_power_residual(&self, u: &Self, s: usize) -> Result<(Self, f64)> {
        if self.degree < s {
            return Err(Error::Degree {
                what: "division by power",
                needed: s,
                have: self.degree,
            });
        }
        let mut h = self.clone();
        let mut worst: f64 = 0.0;
        for _ in 0..s {
            let (q, r) = h.divide_once(u)?;
            worst = worst.max(r);
            h = q;
        }
        Ok((h, worst))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{JetC, Var};
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn x(b: [C64; 2], d: usize, i: usize) -> JetC {
        // real coordinate x_i = Re w_i
        let w = JetC::variable(b, d, Var::Z(i));
        w.re()
    }

    #[test]
    fn cube_over_cube_is_one() {
        let b = [c(0.0, 0.0); 2];
        let d = 7;
        let x1 = x(b, d, 0);
        let x2 = x(b, d, 1);
        let u = &x1 + &(&x2 * &x2);
        let g = &(&u * &u) * &u;
        let h = g.divide_by_power(&u, 3, 1e-8).unwrap();
        assert_eq!(h.degree(), 4);
        assert!((h.value() - c(1.0, 0.0)).norm() < 1e-14);
        assert!(h.add_scalar(c(-1.0, 0.0)).norm_inf() < 1e-13);
    }

    #[test]
    fn recover_linear_factor() {
        let b = [c(0.0, 0.0); 2];
        let d = 6;
        let x1 = x(b, d, 0);
        let x2 = x(b, d, 1);
        let g = &x2 * &(&x1 * &x1);
        let h = g.divide_by_power(&x1, 2, 1e-8).unwrap();
        assert!(h.max_abs_diff(&x2.truncate(4)) < 1e-14);
    }

    #[test]
    fn not_divisible_detected() {
        let b = [c(0.0, 0.0); 2];
        let x1 = x(b, 5, 0);
        let x2 = x(b, 5, 1);
        let g = &x2 * &x1;
        assert!(matches!(
            g.divide_by_power(&x1, 2, 1e-8),
            Err(Error::NotDivisible { .. })
        ));
        let flat = &x2 * &x2;
        assert!(matches!(
            g.divide_by_power(&flat, 1, 1e-8),
            Err(Error::DegenerateDefiningFunction)
        ));
    }

    #[test]
    fn identity_and_swap_composition() {
        let b = [c(0.2, 0.1), c(-0.3, 0.0)];
        let z1 = JetC::coordinate(b, 4, Var::Z(0));
        let same = z1.compose_affine(&AffineMap::identity()).unwrap();
        assert!(same.max_abs_diff(&z1) < 1e-15);
        let o = c(0.0, 0.0);
        let i = c(1.0, 0.0);
        let swap = AffineMap {
            linear: [[o, i], [i, o]],
            shift: [o, o],
        };
        let swapped = z1.compose_affine(&swap).unwrap();
        let nb = *swapped.base();
        let z2 = JetC::coordinate(nb, 4, Var::Z(1));
        assert!(swapped.max_abs_diff(&z2) < 1e-15);
    }
}
