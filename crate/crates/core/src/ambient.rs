//! The Lorentz-Kähler ambient metric `g̃ = −i∂∂̄(|z₀|² r)` on `C* × C²` and
//! the ambient-Laplacian definitions of `Q′` and `P′`.
//!
//! Used as an independent check of the explicit 3-dimensional formulas in
//! [`crate::pseudoherm`]. Jets are taken at the lifted point `(1, p)` in the
//! variables `(w₀, w̄₀, w₁, w̄₁, w₂, w̄₂)`.

use crate::error::{Error, Result};
use crate::jet::{JetC, JetC6, Var, C64};
use crate::poly::Poly;

/// Jet degree of the lift. `Δ̃²` uses four derivatives of the metric
/// potential, so degree 4 gives exact base-point values.
pub const AMBIENT_DEGREE: usize = 4;

/// Metric components `g[j][k] = ∂_j ∂_k̄ ρ♯` and the inverse `ginv[k][j] = g^{k̄j}`.
#[derive(Clone, Debug)]
pub struct AmbientData {
    pub g: [[JetC6; 3]; 3],
    pub ginv: [[JetC6; 3]; 3],
    pub base: [C64; 3],
}

/// Lift a jet on `C²` to `C* × C²`, independent of `z₀`.
pub fn lift(f: &JetC, degree: usize) -> JetC6 {
    let p = f.base();
    let base = [C64::new(1.0, 0.0), p[0], p[1]];
    let mut out = JetC6::zero(base, degree).into_complex();
    let d = degree.min(f.degree());
    let ft = f.table();
    for k in 0..ft.len(d) {
        let e = ft.exps(k);
        out.set_coeff(&[0, 0, e[0], e[1], e[2], e[3]], f.coeffs()[k]);
    }
    if f.is_real() {
        out.into_real()
    } else {
        out
    }
}

/// `log z₀ + log z̄₀` at `z₀ = 1`.
pub fn log_abs2_z0(base: [C64; 3], degree: usize) -> JetC6 {
    let w0 = JetC6::variable(base, degree, Var::Z(0)).add_scalar(C64::new(1.0, 0.0));
    let l = w0.ln().expect("log of 1 + w0");
    (&l + &l.conj()).into_real()
}

fn mat_mul(a: &[[JetC6; 3]; 3], b: &[[JetC6; 3]; 3]) -> Result<[[JetC6; 3]; 3]> {
    let entry = |i: usize, j: usize| -> Result<JetC6> {
        let mut acc = a[i][0].checked_mul(&b[0][j])?;
        for k in 1..3 {
            acc = acc.checked_add(&a[i][k].checked_mul(&b[k][j])?)?;
        }
        Ok(acc)
    };
    Ok([
        [entry(0, 0)?, entry(0, 1)?, entry(0, 2)?],
        [entry(1, 0)?, entry(1, 1)?, entry(1, 2)?],
        [entry(2, 0)?, entry(2, 1)?, entry(2, 2)?],
    ])
}

fn inverse3(m: [[C64; 3]; 3]) -> Option<[[C64; 3]; 3]> {
    let c = |i: usize, j: usize| {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
        m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]
    };
    let det = m[0][0] * c(0, 0) + m[0][1] * c(0, 1) + m[0][2] * c(0, 2);
    if det.norm() < 1e-14 {
        return None;
    }
    let mut inv = [[C64::new(0.0, 0.0); 3]; 3];
    for (i, row) in inv.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = c(j, i) / det;
        }
    }
    Some(inv)
}

/// Metric jets of `ρ♯ = |z₀|² r` at `(1, p)`.
pub fn ambient_metric_at(r: &JetC) -> Result<AmbientData> {
    let degree = AMBIENT_DEGREE;
    if r.degree() < degree {
        return Err(Error::Degree {
            what: "ambient metric",
            needed: degree,
            have: r.degree(),
        });
    }
    // two extra orders: the metric is a second derivative
    let d = degree + 2;
    let rl = lift(r, d.min(r.degree()));
    let base = *rl.base();
    let z0 = JetC6::coordinate(base, rl.degree(), Var::Z(0));
    let rho_sharp = (&(&z0 * &z0.conj()) * &rl).into_real();
    let mut g: Vec<Vec<JetC6>> = Vec::with_capacity(3);
    for j in 0..3 {
        let dj = rho_sharp.wirtinger(Var::Z(j))?;
        let mut row = Vec::with_capacity(3);
        for k in 0..3 {
            row.push(dj.wirtinger(Var::Zbar(k))?);
        }
        g.push(row);
    }
    let g: [[JetC6; 3]; 3] = [
        [g[0][0].clone(), g[0][1].clone(), g[0][2].clone()],
        [g[1][0].clone(), g[1][1].clone(), g[1][2].clone()],
        [g[2][0].clone(), g[2][1].clone(), g[2][2].clone()],
    ];
    let mut g0 = [[C64::new(0.0, 0.0); 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            g0[j][k] = g[j][k].value();
        }
    }
    let g0inv = inverse3(g0).ok_or_else(|| Error::Geometry("ambient metric degenerate".into()))?;
    // Neumann recursion X ← G₀⁻¹ − G₀⁻¹ E X with E = G − G₀, exact after deg + 1 sweeps;
    // index layout: ginv[k][j] solves Σ_k g[j][k] ginv[k][l] = δ_jl
    let dg = g[0][0].degree();
    let cst = |c: C64| JetC6::constant(base, dg, c).into_complex();
    let a: [[JetC6; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| cst(g0inv[i][j])));
    let mut e = g.clone();
    for (j, row) in e.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            *x = x.add_scalar(-g0[j][k]);
        }
    }
    let ae = mat_mul(&a, &e)?;
    let mut x = a.clone();
    for _ in 0..=dg {
        let aex = mat_mul(&ae, &x)?;
        x = std::array::from_fn(|i| std::array::from_fn(|j| &a[i][j] - &aex[i][j]));
    }
    Ok(AmbientData { g, ginv: x, base })
}

impl AmbientData {
    /// Largest coefficient of `g · g⁻¹ − I`.
    pub fn inverse_defect(&self) -> Result<f64> {
        let prod = mat_mul(&self.g, &self.ginv)?;
        let mut worst: f64 = 0.0;
        for (j, row) in prod.iter().enumerate() {
            for (l, x) in row.iter().enumerate() {
                let id = if j == l { 1.0 } else { 0.0 };
                worst = worst.max(x.add_scalar(C64::new(-id, 0.0)).norm_inf());
            }
        }
        Ok(worst)
    }

    /// Eigenvalue signs of the Hermitian base-point matrix `−g` via its
    /// leading principal minors: returns the number of negative eigenvalues
    /// of the metric `−i∂∂̄ρ♯` viewed as a Hermitian form.
    pub fn negative_directions(&self) -> usize {
        let m: [[C64; 3]; 3] = std::array::from_fn(|j| std::array::from_fn(|k| -self.g[j][k].value()));
        let d1 = m[0][0].re;
        let d2 = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re;
        let d3 = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            .re;
        // sign changes in the sequence 1, d1, d2, d3
        let seq = [1.0, d1, d2, d3];
        seq.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
    }
}

/// Ambient Laplacian `Δ̃f = −g^{k̄j} ∂_j ∂_k̄ f`; degree drops by 2.
pub fn ambient_laplacian(f: &JetC6, amb: &AmbientData) -> Result<JetC6> {
    let mut acc: Option<JetC6> = None;
    for j in 0..3 {
        let dj = f.wirtinger(Var::Z(j))?;
        for k in 0..3 {
            let t = amb.ginv[k][j].checked_mul(&dj.wirtinger(Var::Zbar(k))?)?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.checked_add(&t)?,
            });
        }
    }
    Ok(-&acc.unwrap())
}

/// `Q^{(k)} = Δ̃²((−log|z₀|²)^k)` at `(1, p)` for `k = 0, 1, 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientQ {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
}

pub fn q_ambient_at(r: &JetC) -> Result<AmbientQ> {
    let amb = ambient_metric_at(r)?;
    let d = AMBIENT_DEGREE;
    let l = log_abs2_z0(amb.base, d).scale_re(-1.0);
    let one = JetC6::constant(amb.base, d, C64::new(1.0, 0.0));
    let l2 = &l * &l;
    let q = |f: &JetC6| -> Result<f64> {
        let once = ambient_laplacian(f, &amb)?;
        Ok(ambient_laplacian(&once, &amb)?.value().re)
    };
    Ok(AmbientQ {
        q0: q(&one)?,
        q1: q(&l)?,
        q2: q(&l2)?,
    })
}

/// Ambient `Q′ = Q^{(2)}` at the base point of a Fefferman defining function.
pub fn q_prime_ambient_at(r: &JetC) -> Result<f64> {
    Ok(q_ambient_at(r)?.q2)
}

/// `P′f = −Δ̃²(f̃ log|z₀|²)` for `f = Re F` with `F` holomorphic.
pub fn p_prime_ambient_at(f_holo: &Poly, r: &JetC) -> Result<f64> {
    let amb = ambient_metric_at(r)?;
    let d = AMBIENT_DEGREE;
    let p = r.base();
    let fj = f_holo.jet(*p, d);
    let fre = fj.re();
    let ft = lift(&fre, d);
    let l = log_abs2_z0(amb.base, d);
    let once = ambient_laplacian(&(&ft * &l), &amb)?;
    Ok(-ambient_laplacian(&once, &amb)?.value().re)
}
