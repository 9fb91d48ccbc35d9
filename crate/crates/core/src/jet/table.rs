//! Graded-lex monomial tables shared by all jets with the same number of
//! real variables.
//!
//! A table built for degree `D` lists every exponent vector of total degree
//! `<= D`, grouped by degree. The listing for `D - 1` is a prefix of the
//! listing for `D`, so one table per variable count serves every degree up to
//! its maximum and coefficient vectors of different degrees share indices.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// Maximum number of real (w, w̄) variables supported.
pub const MAX_VARS: usize = 6;

pub type Exps = [u8; MAX_VARS];

#[derive(Debug)]
pub struct MonomialTable {
    nvars: usize,
    max_degree: usize,
    exps: Vec<Exps>,
    degs: Vec<u8>,
    /// `deg_start[d]` is the index of the first monomial of degree `d`;
    /// `deg_start[d + 1]` is the number of monomials of degree `<= d`.
    deg_start: Vec<usize>,
    conj: Vec<u32>,
    index: HashMap<Exps, u32>,
    /// `raise[k * nvars + v]` = index of monomial `k` times variable `v`
    /// (or `u32::MAX` past the maximum degree).
    raise: Vec<u32>,
    /// CSR product table: for output monomial `k`, the pairs `(i, j)` with
    /// `exps[i] + exps[j] = exps[k]`.
    mul_offsets: Vec<u32>,
    mul_pairs: Vec<(u32, u32)>,
}

impl MonomialTable {
    fn build(nvars: usize, max_degree: usize) -> Self {
        assert!(nvars <= MAX_VARS && nvars % 2 == 0);
        let mut exps: Vec<Exps> = Vec::new();
        let mut deg_start = Vec::with_capacity(max_degree + 2);
        for d in 0..=max_degree {
            deg_start.push(exps.len());
            let mut block = Vec::new();
            let mut cur = [0u8; MAX_VARS];
            compositions(d, nvars, 0, &mut cur, &mut block);
            exps.extend(block);
        }
        deg_start.push(exps.len());

        let index: HashMap<Exps, u32> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as u32))
            .collect();
        let degs: Vec<u8> = exps
            .iter()
            .map(|e| e.iter().map(|&x| x as u32).sum::<u32>() as u8)
            .collect();

        let conj = exps
            .iter()
            .map(|e| {
                let mut c = *e;
                for v in (0..nvars).step_by(2) {
                    c.swap(v, v + 1);
                }
                index[&c]
            })
            .collect();

        let mut raise = vec![u32::MAX; exps.len() * nvars];
        for (k, e) in exps.iter().enumerate() {
            if (degs[k] as usize) < max_degree {
                for v in 0..nvars {
                    let mut r = *e;
                    r[v] += 1;
                    raise[k * nvars + v] = index[&r];
                }
            }
        }

        let mut mul_offsets = Vec::with_capacity(exps.len() + 1);
        let mut mul_pairs = Vec::new();
        for ek in &exps {
            mul_offsets.push(mul_pairs.len() as u32);
            let mut cur = [0u8; MAX_VARS];
            sub_exponents(ek, nvars, 0, &mut cur, &mut |a| {
                let mut b = [0u8; MAX_VARS];
                for v in 0..nvars {
                    b[v] = ek[v] - a[v];
                }
                mul_pairs.push((index[a], index[&b]));
            });
        }
        mul_offsets.push(mul_pairs.len() as u32);

        MonomialTable {
            nvars,
            max_degree,
            exps,
            degs,
            deg_start,
            conj,
            index,
            raise,
            mul_offsets,
            mul_pairs,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Number of monomials of total degree `<= d`.
    #[inline]
    pub fn len(&self, d: usize) -> usize {
        self.deg_start[d + 1]
    }

    /// Index range of the monomials of total degree exactly `d`.
    #[inline]
    pub fn block(&self, d: usize) -> std::ops::Range<usize> {
        self.deg_start[d]..self.deg_start[d + 1]
    }

    #[inline]
    pub fn exps(&self, k: usize) -> &Exps {
        &self.exps[k]
    }

    #[inline]
    pub fn deg(&self, k: usize) -> usize {
        self.degs[k] as usize
    }

    #[inline]
    pub fn conj(&self, k: usize) -> usize {
        self.conj[k] as usize
    }

    pub fn index_of(&self, e: &Exps) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    #[inline]
    pub fn raise(&self, k: usize, var: usize) -> usize {
        self.raise[k * self.nvars + var] as usize
    }

    #[inline]
    pub fn pairs(&self, k: usize) -> &[(u32, u32)] {
        let lo = self.mul_offsets[k] as usize;
        let hi = self.mul_offsets[k + 1] as usize;
        &self.mul_pairs[lo..hi]
    }
}

fn compositions(d: usize, nvars: usize, pos: usize, cur: &mut Exps, out: &mut Vec<Exps>) {
    if pos == nvars - 1 {
        cur[pos] = d as u8;
        out.push(*cur);
        cur[pos] = 0;
        return;
    }
    // lex order: larger power of earlier variables first
    for k in (0..=d).rev() {
        cur[pos] = k as u8;
        compositions(d - k, nvars, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

fn sub_exponents(e: &Exps, nvars: usize, pos: usize, cur: &mut Exps, f: &mut impl FnMut(&Exps)) {
    if pos == nvars {
        f(cur);
        return;
    }
    for k in 0..=e[pos] {
        cur[pos] = k;
        sub_exponents(e, nvars, pos + 1, cur, f);
    }
    cur[pos] = 0;
}

type Registry = RwLock<HashMap<usize, Arc<MonomialTable>>>;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Shared table for `nvars` real variables covering at least `degree`.
pub fn table(nvars: usize, degree: usize) -> Arc<MonomialTable> {
    if let Some(t) = registry().read().unwrap().get(&nvars) {
        if t.max_degree >= degree {
            return Arc::clone(t);
        }
    }
    let mut reg = registry().write().unwrap();
    if let Some(t) = reg.get(&nvars) {
        if t.max_degree >= degree {
            return Arc::clone(t);
        }
    }
    // grow in steps so repeated small bumps do not rebuild every time
    let target = degree.max(if nvars <= 4 { 12 } else { 8 });
    let t = Arc::new(MonomialTable::build(nvars, target));
    reg.insert(nvars, Arc::clone(&t));
    t
}
