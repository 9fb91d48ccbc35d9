//! Pseudohermitian geometry of the level sets of a Fefferman defining function.
//!
//! All objects are jets on a neighbourhood of a boundary point `p`. Each
//! level set `{r = c}` carries the contact form `θ = (i/2)(∂ − ∂̄)r`, the
//! frame `Z = λ(r_2 ∂_1 − r_1 ∂_2)`, its conjugate, and the Reeb field `T`;
//! since these fields are tangent to every level set, differentiating along
//! them never involves the extension of data off `M`.
//!
//! Conventions (Lee's):
//!
//! ```text
//! dθ = i h θ¹ ∧ θ¹̄,                 h = −r_{jk̄} Z^j Z̄^k > 0
//! dθ¹ = θ¹ ∧ ω + A¹₁̄ θ ∧ θ¹̄,         ω + ω̄ = dh/h
//! dω = Scal · h θ¹ ∧ θ¹̄  (mod θ)
//! Δ_b u = −h⁻¹ (u_{11̄} + u_{1̄1})     (non-negative operator)
//! ```
//!
//! With the bracket relations `[Z, Z̄] = −ihT + βZ − β̄Z̄` and
//! `[T, Z] = μZ + νZ̄` the connection form is `ω(Z̄) = −β`, `ω(T) = μ`,
//! `ω(Z) = Zh/h + β̄`, and the torsion is `A₁₁ = −hν`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{JetC, Var, C64};
use crate::monge_ampere::det3;

const VARS: [Var; 4] = [Var::Z(0), Var::Zbar(0), Var::Z(1), Var::Zbar(1)];

fn cst(like: &JetC, c: C64) -> JetC {
    JetC::constant(*like.base(), like.degree(), c)
}

/// Complex vector field with components along `(∂_1, ∂_1̄, ∂_2, ∂_2̄)`.
#[derive(Clone, Debug)]
pub struct VectorField(pub [JetC; 4]);

impl VectorField {
    /// `X(f) = Σ X^a ∂_a f`.
    pub fn apply(&self, f: &JetC) -> Result<JetC> {
        let mut out: Option<JetC> = None;
        for (a, var) in VARS.iter().enumerate() {
            let term = self.0[a].checked_mul(&f.wirtinger(*var)?)?;
            out = Some(match out {
                None => term,
                Some(acc) => acc.checked_add(&term)?,
            });
        }
        Ok(out.unwrap())
    }

    pub fn conj(&self) -> Self {
        let c = &self.0;
        VectorField([c[1].conj(), c[0].conj(), c[3].conj(), c[2].conj()])
    }

    pub fn scale(&self, s: &JetC) -> Result<Self> {
        let c = &self.0;
        Ok(VectorField([
            c[0].checked_mul(s)?,
            c[1].checked_mul(s)?,
            c[2].checked_mul(s)?,
            c[3].checked_mul(s)?,
        ]))
    }

    /// Lie bracket `[self, other]`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        let comp = |a: usize| -> Result<JetC> {
            self.apply(&other.0[a])?.checked_sub(&other.apply(&self.0[a])?)
        };
        Ok(VectorField([comp(0)?, comp(1)?, comp(2)?, comp(3)?]))
    }

    fn lin(terms: &[(&JetC, &VectorField)]) -> Result<Self> {
        let mut out: Option<[JetC; 4]> = None;
        for (s, v) in terms {
            let w = v.scale(s)?.0;
            out = Some(match out {
                None => w,
                Some([a, b, c, d]) => [
                    a.checked_add(&w[0])?,
                    b.checked_add(&w[1])?,
                    c.checked_add(&w[2])?,
                    d.checked_add(&w[3])?,
                ],
            });
        }
        Ok(VectorField(out.expect("non-empty combination")))
    }

    fn max_diff(&self, other: &Self) -> f64 {
        (0..4)
            .map(|a| self.0[a].max_abs_diff(&other.0[a]))
            .fold(0.0, f64::max)
    }

    /// Values at the base point.
    pub fn value(&self) -> [C64; 4] {
        [
            self.0[0].value(),
            self.0[1].value(),
            self.0[2].value(),
            self.0[3].value(),
        ]
    }
}

/// Largest violations of the frame and structure identities, as jet norms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StructureResiduals {
    /// `θ(T) − 1`, `dr(T)` and `dθ(T, Z)`.
    pub reeb: f64,
    /// `θ([Z, Z̄]) + ih`.
    pub levi: f64,
    /// `[Z, Z̄] − (−ihT + βZ − β̄Z̄)` and `[T, Z] − (μZ + νZ̄)`.
    pub brackets: f64,
    /// Imaginary part of the scalar curvature.
    pub scal_imag: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        self.reeb.max(self.levi).max(self.brackets).max(self.scal_imag)
    }
}

/// Values of `θ[r]` and of the adapted frame at the base point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactData {
    /// `θ` in the basis `(dz_1, dz̄_1, dz_2, dz̄_2)`.
    pub theta: [C64; 4],
    /// `dθ = −i L_{jk̄} dz^j ∧ dz̄^k` with `L_{jk̄} = ∂_j∂_k̄ r`, stored as `L[j][k]`.
    pub dtheta: [[C64; 2]; 2],
    /// `θ¹` in the basis `(dz_1, dz̄_1, dz_2, dz̄_2)`.
    pub theta1: [C64; 4],
    pub z1: [C64; 4],
    pub t: [C64; 4],
    pub h11bar: f64,
}

/// Pointwise Tanaka-Webster invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PseudohermData {
    pub h11bar: f64,
    pub scal: f64,
    pub a11: C64,
    pub laplacian_b_scal: f64,
    pub norm_a2: f64,
    pub q_prime: f64,
    pub residuals: StructureResiduals,
}

/// Adapted frame and connection coefficients as jets.
#[derive(Clone, Debug)]
pub struct Frame {
    pub r: JetC,
    /// `(r_1, r_1̄, r_2, r_2̄)`.
    pub dr: [JetC; 4],
    /// `levi[j][k] = ∂_j ∂_k̄ r`.
    pub levi: [[JetC; 2]; 2],
    pub z: VectorField,
    pub zb: VectorField,
    pub t: VectorField,
    pub h: JetC,
    pub beta: JetC,
    pub mu: JetC,
    pub nu: JetC,
    pub omega_z: JetC,
    pub omega_zb: JetC,
    pub omega_t: JetC,
    pub residuals: StructureResiduals,
}

impl Frame {
    /// Frame normalized so that `h = 1` at the base point.
    pub fn new(r: &JetC) -> Result<Self> {
        Self::build(r, None)
    }

    /// Frame `λZ` for a nonvanishing gauge jet `λ` (on top of the base-point
    /// normalization). Every invariant is independent of `λ`.
    pub fn with_gauge(r: &JetC, gauge: &JetC) -> Result<Self> {
        Self::build(r, Some(gauge))
    }

    fn build(r: &JetC, gauge: Option<&JetC>) -> Result<Self> {
        if r.degree() < 3 {
            return Err(Error::Degree {
                what: "pseudohermitian frame",
                needed: 3,
                have: r.degree(),
            });
        }
        let r = r.clone().into_complex();
        let dr = [
            r.wirtinger(VARS[0])?,
            r.wirtinger(VARS[1])?,
            r.wirtinger(VARS[2])?,
            r.wirtinger(VARS[3])?,
        ];
        let grad = dr.iter().map(|d| d.value().norm()).fold(0.0, f64::max);
        if grad == 0.0 {
            return Err(Error::DegenerateDefiningFunction);
        }
        let mut levi_rows = Vec::with_capacity(2);
        for j in 0..2 {
            levi_rows.push([dr[2 * j].wirtinger(Var::Zbar(0))?, dr[2 * j].wirtinger(Var::Zbar(1))?]);
        }
        let levi = [levi_rows[0].clone(), levi_rows[1].clone()];
        let zero = cst(&dr[0], C64::new(0.0, 0.0));

        let z0 = VectorField([dr[2].clone(), zero.clone(), -&dr[0], zero.clone()]);
        let h0 = levi_pairing(&levi, &z0, &z0.conj())?.value();
        if !(h0.re > 0.0) {
            return Err(Error::Geometry(format!(
                "Levi form not positive at base point (h = {:.3e})",
                h0.re
            )));
        }
        let mut lambda = cst(&dr[0], C64::new(1.0 / h0.re.sqrt(), 0.0));
        if let Some(g) = gauge {
            if g.value().norm() == 0.0 {
                return Err(Error::Invalid("gauge vanishes at base point".into()));
            }
            lambda = lambda.checked_mul(g)?;
        }
        let z = z0.scale(&lambda)?;
        let zb = z.conj();
        let h = levi_pairing(&levi, &z, &zb)?;

        let t = reeb(&dr, &levi)?;
        let mut frame = Frame {
            r,
            dr,
            levi,
            z,
            zb,
            t,
            beta: zero.clone(),
            mu: zero.clone(),
            nu: zero.clone(),
            omega_z: zero.clone(),
            omega_zb: zero.clone(),
            omega_t: zero,
            h,
            residuals: StructureResiduals::default(),
        };

        let i = C64::new(0.0, 1.0);
        let zzb = frame.z.bracket(&frame.zb)?;
        let (a, beta, c) = frame.decompose(&zzb)?;
        let levi_res = a.checked_add(&frame.h.scale(i))?.norm_inf();
        let beta_bar = beta.conj();
        let model = VectorField::lin(&[
            (&frame.h.scale(-i), &frame.t),
            (&beta, &frame.z),
            (&(-&beta_bar), &frame.zb),
        ])?;
        let mut brackets = zzb.max_diff(&model);
        brackets = brackets.max(c.checked_add(&beta_bar)?.norm_inf());

        let tz = frame.t.bracket(&frame.z)?;
        let (a_tz, mu, nu) = frame.decompose(&tz)?;
        let model = VectorField::lin(&[(&mu, &frame.z), (&nu, &frame.zb)])?;
        brackets = brackets.max(tz.max_diff(&model)).max(a_tz.norm_inf());

        let zh = frame.z.apply(&frame.h)?;
        frame.omega_z = zh.checked_div(&frame.h)?.checked_add(&beta_bar)?;
        frame.omega_zb = -&beta;
        frame.omega_t = mu.clone();
        frame.beta = beta;
        frame.mu = mu;
        frame.nu = nu;

        let theta_t = frame.theta(&frame.t)?;
        let dr_t = frame.dr_of(&frame.t)?;
        let dtheta_tz = frame.dtheta(&frame.t, &frame.z)?;
        let reeb_res = theta_t
            .add_scalar(C64::new(-1.0, 0.0))
            .norm_inf()
            .max(dr_t.norm_inf())
            .max(dtheta_tz.norm_inf());
        frame.residuals = StructureResiduals {
            reeb: reeb_res,
            levi: levi_res,
            brackets,
            scal_imag: 0.0,
        };
        Ok(frame)
    }

    /// `θ(X) = (i/2)(r_j X^j − r_j̄ X^j̄)`.
    pub fn theta(&self, x: &VectorField) -> Result<JetC> {
        let d = &self.dr;
        let hol = d[0].checked_mul(&x.0[0])?.checked_add(&d[2].checked_mul(&x.0[2])?)?;
        let ahol = d[1].checked_mul(&x.0[1])?.checked_add(&d[3].checked_mul(&x.0[3])?)?;
        Ok(hol.checked_sub(&ahol)?.scale(C64::new(0.0, 0.5)))
    }

    fn dr_of(&self, x: &VectorField) -> Result<JetC> {
        let mut acc = self.dr[0].checked_mul(&x.0[0])?;
        for a in 1..4 {
            acc = acc.checked_add(&self.dr[a].checked_mul(&x.0[a])?)?;
        }
        Ok(acc)
    }

    /// `dθ(X, Y) = −i r_{jk̄}(X^j Y^k̄ − Y^j X^k̄)`.
    pub fn dtheta(&self, x: &VectorField, y: &VectorField) -> Result<JetC> {
        let a = levi_pairing(&self.levi, x, y)?;
        let b = levi_pairing(&self.levi, y, x)?;
        // levi_pairing carries a minus sign
        Ok(a.checked_sub(&b)?.scale(C64::new(0.0, 1.0)))
    }

    /// Coefficients `(a, b, c)` of `X = aT + bZ + cZ̄` for `X` tangent to the level sets.
    pub fn decompose(&self, x: &VectorField) -> Result<(JetC, JetC, JetC)> {
        let a = self.theta(x)?;
        let xp = VectorField::lin(&[(&cst(&a, C64::new(1.0, 0.0)), x), (&(-&a), &self.t)])?;
        let b = levi_pairing(&self.levi, &xp, &self.zb)?.checked_div(&self.h)?;
        let c = levi_pairing(&self.levi, &self.z, &xp)?.checked_div(&self.h)?;
        Ok((a, b, c))
    }

    /// Sub-Laplacian `Δ_b u = −h⁻¹(Z̄Zu + βZu + ZZ̄u + β̄Z̄u)`.
    pub fn sub_laplacian(&self, u: &JetC) -> Result<JetC> {
        let zu = self.z.apply(u)?;
        let zbu = self.zb.apply(u)?;
        let s = self
            .zb
            .apply(&zu)?
            .checked_add(&self.beta.checked_mul(&zu)?)?
            .checked_add(&self.z.apply(&zbu)?)?
            .checked_add(&self.beta.conj().checked_mul(&zbu)?)?;
        Ok(-&s.checked_div(&self.h)?)
    }

    /// Webster scalar curvature as a jet (complex; the imaginary part is rounding).
    pub fn scal(&self) -> Result<JetC> {
        let i = C64::new(0.0, 1.0);
        let om_bracket = self
            .h
            .checked_mul(&self.omega_t)?
            .scale(-i)
            .checked_add(&self.beta.checked_mul(&self.omega_z)?)?
            .checked_sub(&self.beta.conj().checked_mul(&self.omega_zb)?)?;
        let num = self
            .z
            .apply(&self.omega_zb)?
            .checked_sub(&self.zb.apply(&self.omega_z)?)?
            .checked_sub(&om_bracket)?;
        num.checked_div(&self.h)
    }

    /// Torsion component `A₁₁ = −hν` in this frame.
    pub fn a11(&self) -> Result<JetC> {
        Ok(-&self.h.checked_mul(&self.nu)?)
    }

    pub fn contact_data(&self) -> ContactData {
        let d: Vec<C64> = self.dr.iter().map(|j| j.value()).collect();
        let half_i = C64::new(0.0, 0.5);
        let theta = [half_i * d[0], -half_i * d[1], half_i * d[2], -half_i * d[3]];
        let l = |j: usize, k: usize| self.levi[j][k].value();
        let dtheta = [[l(0, 0), l(0, 1)], [l(1, 0), l(1, 1)]];
        let z1 = self.z.value();
        let t = self.t.value();
        let h = self.h.value().re;
        // θ¹(X) = −h⁻¹ L_{jk̄} (X^j − θ(X) T^j) conj(Z^k)
        let mut theta1 = [C64::new(0.0, 0.0); 4];
        for (a, slot) in theta1.iter_mut().enumerate() {
            let mut x = [C64::new(0.0, 0.0); 4];
            x[a] = C64::new(1.0, 0.0);
            let th: C64 = (0..4).map(|b| theta[b] * x[b]).sum();
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..2 {
                for k in 0..2 {
                    let xj = x[2 * j] - th * t[2 * j];
                    acc -= dtheta[j][k] * xj * z1[2 * k].conj();
                }
            }
            *slot = acc / h;
        }
        ContactData {
            theta,
            dtheta,
            theta1,
            z1,
            t,
            h11bar: h,
        }
    }
}

/// `L(X, Y) = −r_{jk̄} X^j Y^k̄`.
fn levi_pairing(levi: &[[JetC; 2]; 2], x: &VectorField, y: &VectorField) -> Result<JetC> {
    let mut acc: Option<JetC> = None;
    for j in 0..2 {
        for k in 0..2 {
            let term = levi[j][k].checked_mul(&x.0[2 * j])?.checked_mul(&y.0[2 * k + 1])?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.checked_add(&term)?,
            });
        }
    }
    Ok(-&acc.unwrap())
}

/// Reeb field of `θ` on each level set: `r_j T^j = −i` and
/// `r_{jk̄} T^j = λ r_k̄` for a multiplier `λ`, solved by Cramer's rule.
fn reeb(dr: &[JetC; 4], levi: &[[JetC; 2]; 2]) -> Result<VectorField> {
    let zero = cst(&levi[0][0], C64::new(0.0, 0.0));
    let m01 = -&dr[1];
    let m12 = -&dr[3];
    let det = det3([
        [&levi[0][0], &levi[1][0], &m01],
        [&levi[0][1], &levi[1][1], &m12],
        [&dr[0], &dr[2], &zero],
    ]);
    if det.value().norm() < 1e-14 {
        return Err(Error::Geometry("contact condition fails at base point".into()));
    }
    // right-hand side (0, 0, −i) only meets the cofactors of the last row
    let c20 = &(&levi[1][0] * &m12) - &(&m01 * &levi[1][1]);
    let c21 = -&(&(&levi[0][0] * &m12) - &(&m01 * &levi[0][1]));
    let mi = C64::new(0.0, -1.0);
    let t1 = c20.checked_div(&det)?.scale(mi);
    let t2 = c21.checked_div(&det)?.scale(mi);
    Ok(VectorField([t1.clone(), t1.conj(), t2.clone(), t2.conj()]))
}

/// Jets of the Webster invariants along a frame.
#[derive(Clone, Debug)]
pub struct WebsterJets {
    pub scal: JetC,
    pub a11: JetC,
    pub laplacian_b_scal: JetC,
}

pub fn webster_jets(frame: &Frame) -> Result<WebsterJets> {
    let scal = frame.scal()?;
    let a11 = frame.a11()?;
    if scal.degree() < 2 {
        return Err(Error::Degree {
            what: "sub-Laplacian of the scalar curvature",
            needed: 6,
            have: frame.r.degree(),
        });
    }
    let laplacian_b_scal = frame.sub_laplacian(&scal)?;
    Ok(WebsterJets {
        scal,
        a11,
        laplacian_b_scal,
    })
}

fn data_from(frame: &Frame) -> Result<PseudohermData> {
    let w = webster_jets(frame)?;
    let h = frame.h.value().re;
    let scal = w.scal.value();
    let a11 = w.a11.value();
    let lap = w.laplacian_b_scal.value();
    let norm_a2 = a11.norm_sqr() / (h * h);
    let mut residuals = frame.residuals;
    residuals.scal_imag = scal.im.abs().max(lap.im.abs());
    let q_prime = 0.5 * lap.re + 0.25 * scal.re * scal.re - norm_a2;
    Ok(PseudohermData {
        h11bar: h,
        scal: scal.re,
        a11,
        laplacian_b_scal: lap.re,
        norm_a2,
        q_prime,
        residuals,
    })
}

/// Contact form and adapted frame at the base point of `r`.
pub fn contact_form_at(r: &JetC) -> Result<ContactData> {
    Ok(Frame::new(r)?.contact_data())
}

/// Webster invariants and `Q′ = ½Δ_b Scal + ¼Scal² − |A|²` at the base point.
pub fn webster_invariants(r: &JetC) -> Result<PseudohermData> {
    data_from(&Frame::new(r)?)
}

/// As [`webster_invariants`] with an extra frame gauge `λ`.
pub fn webster_invariants_gauged(r: &JetC, gauge: &JetC) -> Result<PseudohermData> {
    data_from(&Frame::with_gauge(r, gauge)?)
}

pub fn q_prime_at(r: &JetC) -> Result<f64> {
    Ok(webster_invariants(r)?.q_prime)
}

/// `P′f = Δ_b² f − Re ∇¹(Scal ∇₁f − 2i A₁₁ ∇¹f)` as a jet along the frame.
pub fn p_prime_jet(frame: &Frame, f: &JetC) -> Result<JetC> {
    let i = C64::new(0.0, 1.0);
    let f = f.clone().into_complex();
    let lap2 = frame.sub_laplacian(&frame.sub_laplacian(&f)?)?;
    let scal = frame.scal()?;
    let a11 = frame.a11()?;
    let zf = frame.z.apply(&f)?;
    let up = frame.zb.apply(&f)?.checked_div(&frame.h)?;
    let v1 = scal
        .checked_mul(&zf)?
        .checked_sub(&a11.checked_mul(&up)?.scale(2.0 * i))?;
    let div = frame
        .zb
        .apply(&v1)?
        .checked_add(&frame.beta.checked_mul(&v1)?)?
        .checked_div(&frame.h)?;
    lap2.checked_sub(&div.re())
}

/// `P′f` at the base point, for a real jet `f` expanded at the same point.
pub fn p_prime_at(f: &JetC, r: &JetC) -> Result<f64> {
    let frame = Frame::new(r)?;
    Ok(p_prime_jet(&frame, f)?.value().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monge_ampere::{fefferman, Tolerances};
    use crate::poly::{ball, Poly};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sphere_points() -> Vec<[C64; 2]> {
        vec![
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 1.0)],
            [c(0.6, 0.0), c(0.0, 0.8)],
            [c(0.3, -0.4), c(0.5, 0.5f64.sqrt())],
        ]
    }

    #[test]
    fn sphere_invariants() {
        for p in sphere_points() {
            let r = ball().jet(p, 7);
            let d = webster_invariants(&r).unwrap();
            assert!((d.scal - 2.0).abs() < 1e-12, "{d:?}");
            assert!(d.norm_a2 < 1e-24);
            assert!(d.laplacian_b_scal.abs() < 1e-11);
            assert!((d.q_prime - 1.0).abs() < 1e-12);
            assert!((d.h11bar - 1.0).abs() < 1e-14);
            assert!(d.residuals.max() < 1e-12, "{:?}", d.residuals);
        }
    }

    #[test]
    fn contact_identities_at_base() {
        let p = [c(0.6, 0.0), c(0.0, 0.8)];
        let cd = contact_form_at(&ball().jet(p, 4)).unwrap();
        let pair = |w: &[C64; 4], x: &[C64; 4]| -> C64 { (0..4).map(|a| w[a] * x[a]).sum() };
        assert!((pair(&cd.theta, &cd.t) - 1.0).norm() < 1e-14);
        assert!(pair(&cd.theta, &cd.z1).norm() < 1e-14);
        assert!((pair(&cd.theta1, &cd.z1) - 1.0).norm() < 1e-14);
        assert!(pair(&cd.theta1, &cd.t).norm() < 1e-14);
    }

    fn perturbed_point() -> (Poly, [C64; 2]) {
        // ρ = 1 − |z|² − 0.1|z₁|⁴ at a point with both coordinates nonzero
        let rho = &ball() - &Poly::abs2(0).powu(2).scale(c(0.1, 0.0));
        let dir = [c(0.6, 0.3), c(-0.2, 0.714142842854285)];
        let n: f64 = (dir[0].norm_sqr() + dir[1].norm_sqr()).sqrt();
        let dir = [dir[0] / n, dir[1] / n];
        // solve 1 − s² − 0.1 a² s⁴ = 0 with a = |dir₁|²
        let a = dir[0].norm_sqr();
        let x = ((1.0 + 0.4 * a * a).sqrt() - 1.0) / (0.2 * a * a);
        let s = x.sqrt();
        (rho, [dir[0] * s, dir[1] * s])
    }

    #[test]
    fn gauge_independence() {
        let (rho, p) = perturbed_point();
        let f = fefferman(&rho.jet(p, 10), &Tolerances::default()).unwrap();
        let base = webster_invariants(&f.r_jet).unwrap();
        let gauge = (JetC::constant(p, 7, c(0.7, 0.4))
            + JetC::variable(p, 7, Var::Z(0)).scale(c(0.3, 0.1))
            + JetC::variable(p, 7, Var::Zbar(1)).scale(c(0.0, 0.2)))
        .into_complex();
        let g = webster_invariants_gauged(&f.r_jet, &gauge).unwrap();
        assert!((g.scal - base.scal).abs() < 1e-9);
        assert!((g.norm_a2 - base.norm_a2).abs() < 1e-9);
        assert!((g.laplacian_b_scal - base.laplacian_b_scal).abs() < 1e-9);
        assert!((g.q_prime - base.q_prime).abs() < 1e-9);
        assert!(base.norm_a2 > 1e-4);
        assert!(base.residuals.max() < 1e-9, "{:?}", base.residuals);
    }

    #[test]
    fn theta_sees_only_first_jet() {
        let (rho, p) = perturbed_point();
        let r = rho.jet(p, 4);
        let bumped = &r + &(&r * &r).scale_re(5.0);
        let a = contact_form_at(&r).unwrap();
        let b = contact_form_at(&bumped).unwrap();
        for k in 0..4 {
            assert!((a.theta[k] - b.theta[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn p_prime_kills_constants() {
        let (rho, p) = perturbed_point();
        let f = fefferman(&rho.jet(p, 10), &Tolerances::default()).unwrap();
        let one = JetC::constant(p, 7, c(1.0, 0.0));
        assert_eq!(p_prime_at(&one, &f.r_jet).unwrap(), 0.0);
    }
}
