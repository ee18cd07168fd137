//! Dunkl and Cherednik operators on polynomials in ambient coordinates,
//! the pairing (D₁,D₂)_k = (T̄_k(D₁)D₂)(0) and the Gram-matrix regularity test.
//!
//! All arithmetic is exact over ℚ (big rationals). Ambient coordinates are
//! taken orthonormal for the pairing, i.e. e_i ∈ 𝔞 is identified with x_i;
//! the pairing is symmetric when the Gram matrix of the system is the identity.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rootsys::{Multiplicity, RootSystem, Q};

pub type BQ = BigRational;

pub fn bq(x: &Q) -> BQ {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

fn bq_i(n: i64) -> BQ {
    BigRational::from_integer(BigInt::from(n))
}

/// Sparse polynomial Σ c_a x^a with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, BQ>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BQ) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BQ::one())
    }

    pub fn monomial(exps: &[u32]) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps.to_vec(), BQ::one());
        p
    }

    /// Linear form Σ c_i x_i.
    pub fn linear(c: &[BQ]) -> Self {
        let n = c.len();
        let mut p = Self::zero(n);
        for (i, ci) in c.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, ci.clone());
        }
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BQ) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; −1 for the zero polynomial is represented by `None`.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }

    pub fn scale(&self, c: &BQ) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut p = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    /// Homogeneous component of degree d.
    pub fn component(&self, d: u32) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == d).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    /// Drop terms of degree > d.
    pub fn truncate(&self, d: u32) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() <= d).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    /// Value at 0.
    pub fn at_zero(&self) -> BQ {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(BQ::zero)
    }

    /// Directional derivative Σ h_i ∂_i.
    pub fn derivative(&self, h: &[BQ]) -> Polynomial {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            for i in 0..self.nvars {
                if e[i] == 0 || h[i].is_zero() {
                    continue;
                }
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, c * &h[i] * bq_i(e[i] as i64));
            }
        }
        p
    }

    /// p(Mx) where row i of M gives the image of x_i as a linear form.
    pub fn substitute(&self, m: &[Vec<BQ>]) -> Polynomial {
        let forms: Vec<Polynomial> = m.iter().map(|row| Polynomial::linear(row)).collect();
        let mut powers: Vec<Vec<Polynomial>> = forms.iter().map(|f| vec![Polynomial::one(self.nvars), f.clone()]).collect();
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(self.nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&forms[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Exact division by a nonzero linear form; `None` if not divisible.
    pub fn div_linear(&self, l: &[BQ]) -> Option<Polynomial> {
        let j = l.iter().position(|c| !c.is_zero())?;
        let lin = Polynomial::linear(l);
        let mut rem = self.clone();
        let mut quo = Self::zero(self.nvars);
        // leading term: largest x_j exponent, then the rest lexicographically
        while let Some((e, c)) = rem.terms.iter().max_by(|a, b| (a.0[j], a.0).cmp(&(b.0[j], b.0))).map(|(e, c)| (e.clone(), c.clone())) {
            if e[j] == 0 {
                return None;
            }
            let mut f = e.clone();
            f[j] -= 1;
            let qc = c / &l[j];
            let mut t = Polynomial::zero(self.nvars);
            t.add_term(f, qc);
            rem = rem.sub(&t.mul(&lin));
            quo = quo.add(&t);
        }
        Some(quo)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                    .collect();
                if mono.is_empty() {
                    c.to_string()
                } else {
                    format!("{}*{}", c, mono.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exact multiplicity on the orbits of `rs` (floats are converted exactly).
pub fn exact_k(rs: &RootSystem, k: &Multiplicity) -> Vec<BQ> {
    match &k.exact {
        Some(e) => e.iter().map(bq).collect(),
        None => (0..rs.orbits().len()).map(|o| BigRational::from_float(k.values[o]).unwrap_or_else(BQ::zero)).collect(),
    }
}

/// Per positive root: the linear form α(x), the matrix of r_α, α(H) and k_α.
struct RootData {
    form: Vec<BQ>,
    refl: Vec<Vec<BQ>>,
    k: BQ,
}

fn root_data(rs: &RootSystem, k: &[BQ]) -> Vec<RootData> {
    let n = rs.ambient_dim();
    let g: Vec<Vec<BQ>> = rs.gram().iter().map(|r| r.iter().map(bq).collect()).collect();
    rs.positive()
        .iter()
        .map(|&a| {
            let v: Vec<BQ> = rs.root(a).iter().map(bq).collect();
            let form: Vec<BQ> = (0..n).map(|j| (0..n).map(|i| &v[i] * &g[i][j]).sum()).collect();
            let n2: BQ = (0..n).map(|j| &form[j] * &v[j]).sum();
            let c = bq_i(2) / n2;
            // x_i ↦ x_i − c α_i (α, x)
            let refl: Vec<Vec<BQ>> = (0..n)
                .map(|i| (0..n).map(|j| if i == j { BQ::one() } else { BQ::zero() } - &c * &v[i] * &form[j]).collect())
                .collect();
            RootData { form, refl, k: k[rs.orbit_of(a)].clone() }
        })
        .collect()
}

fn apply_form(form: &[BQ], h: &[BQ]) -> BQ {
    form.iter().zip(h).map(|(a, b)| a * b).sum()
}

/// Divided differences (p − r_α p)/α for all positive roots.
fn divided(rd: &[RootData], p: &Polynomial) -> Vec<Polynomial> {
    rd.iter()
        .map(|r| {
            if r.k.is_zero() {
                return Polynomial::zero(p.nvars);
            }
            let d = p.sub(&p.substitute(&r.refl));
            d.div_linear(&r.form).expect("(1 - r_a)p is divisible by a")
        })
        .collect()
}

fn to_bq_vec(h: &[Q]) -> Vec<BQ> {
    h.iter().map(bq).collect()
}

/// T̄_k(H)p = ∂_H p + Σ_{α>0} k_α α(H)(p − r_α p)/α.
pub fn dunkl_apply(rs: &RootSystem, k: &Multiplicity, h: &[Q], p: &Polynomial) -> Polynomial {
    let kb = exact_k(rs, k);
    let rd = root_data(rs, &kb);
    dunkl_apply_with(&rd, &to_bq_vec(h), p)
}

fn dunkl_apply_with(rd: &[RootData], h: &[BQ], p: &Polynomial) -> Polynomial {
    let mut out = p.derivative(h);
    for (r, q) in rd.iter().zip(divided(rd, p)) {
        let c = &r.k * apply_form(&r.form, h);
        if !c.is_zero() {
            out = out.add(&q.scale(&c));
        }
    }
    out
}

/// z/(1 − e^{−z}) = Σ b_n z^n/n!, i.e. Bernoulli numbers with b₁ = +½.
pub fn bernoulli_plus(n: usize) -> Vec<BQ> {
    let mut b: Vec<BQ> = vec![BQ::one()];
    for m in 1..=n {
        // Σ_{j=0}^{m} C(m+1, j) B_j = 0
        let mut s = BQ::zero();
        let mut binom = BigInt::one();
        for (j, bj) in b.iter().enumerate() {
            s += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from((m + 1 - j) as i64) / BigInt::from((j + 1) as i64);
        }
        b.push(-s / BigRational::from_integer(BigInt::from((m + 1) as i64)));
    }
    if n >= 1 {
        b[1] = BigRational::new(BigInt::from(1), BigInt::from(2));
    }
    b
}

/// T_k(H)p = ∂_H p + Σ_{α>0} k_α α(H)(1 − e^{−α})⁻¹(p − r_α p) − ρ(k)(H)p,
/// with (1 − e^{−α})⁻¹ = α⁻¹ Σ_n b_n α^n/n!, truncated at total degree `cap`.
pub fn cherednik_apply(rs: &RootSystem, k: &Multiplicity, h: &[Q], p: &Polynomial, cap: u32) -> Result<Polynomial> {
    if let Some(d) = p.degree() {
        if d > cap {
            return Err(Error::DegreeCapExceeded { deg: d as usize, cap: cap as usize });
        }
    }
    let kb = exact_k(rs, k);
    let rd = root_data(rs, &kb);
    let hb = to_bq_vec(h);
    let bern = bernoulli_plus(cap as usize + 1);
    let mut fact = vec![BQ::one()];
    for i in 1..bern.len() {
        let f = &fact[i - 1] * bq_i(i as i64);
        fact.push(f);
    }
    let mut out = p.derivative(&hb);
    for (r, q) in rd.iter().zip(divided(&rd, p)) {
        let c = &r.k * apply_form(&r.form, &hb);
        if c.is_zero() || q.is_zero() {
            continue;
        }
        let alpha = Polynomial::linear(&r.form);
        let mut pw = q.clone();
        for n in 0..bern.len() {
            if pw.is_zero() || pw.terms.keys().map(|e| e.iter().sum::<u32>()).min().unwrap() > cap {
                break;
            }
            if !bern[n].is_zero() {
                out = out.add(&pw.scale(&(&c * &bern[n] / &fact[n])));
            }
            pw = pw.mul(&alpha).truncate(cap);
        }
    }
    // ρ(k)(H) = ½ Σ_{α>0} k_α α(H)
    let rho_h: BQ = rd.iter().map(|r| &r.k * apply_form(&r.form, &hb)).sum::<BQ>() / bq_i(2);
    out = out.sub(&p.scale(&rho_h));
    Ok(out.truncate(cap))
}

/// Monomials of total degree d in n variables, in lexicographic order.
pub fn monomials(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n - 1 {
            cur.push(d);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in (0..=d).rev() {
            cur.push(a);
            rec(n, d - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Gram matrix of (·,·)_k on S_{≤d}, one homogeneous block per degree.
#[derive(Clone, Debug)]
pub struct PairingGram {
    pub degree: u32,
    pub basis: Vec<Vec<Vec<u32>>>,
    pub blocks: Vec<Vec<Vec<BQ>>>,
    /// cross-degree entries found nonzero (expected none)
    pub off_block_nonzero: usize,
}

impl PairingGram {
    pub fn dets(&self) -> Vec<BQ> {
        self.blocks.iter().map(|b| linalg::det(b)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.blocks.iter().all(|b| (0..b.len()).all(|i| (0..b.len()).all(|j| b[i][j] == b[j][i])))
    }

    /// Full matrix on the concatenated basis.
    pub fn full(&self) -> Vec<Vec<BQ>> {
        let n: usize = self.blocks.iter().map(|b| b.len()).sum();
        let mut m = vec![vec![BQ::zero(); n]; n];
        let mut off = 0;
        for b in &self.blocks {
            for i in 0..b.len() {
                for j in 0..b.len() {
                    m[off + i][off + j] = b[i][j].clone();
                }
            }
            off += b.len();
        }
        m
    }
}

#[derive(Serialize)]
pub struct GramSummary {
    pub degree: u32,
    pub blocks: Vec<Vec<Vec<String>>>,
    pub dets: Vec<String>,
    pub regular: bool,
    pub symmetric: bool,
}

impl PairingGram {
    pub fn summary(&self) -> GramSummary {
        let dets = self.dets();
        GramSummary {
            degree: self.degree,
            blocks: self.blocks.iter().map(|b| b.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()).collect(),
            regular: dets.iter().all(|d| !d.is_zero()),
            dets: dets.iter().map(|x| x.to_string()).collect(),
            symmetric: self.is_symmetric(),
        }
    }
}

/// (x^a, x^b)_k = (T̄(e)^a x^b)(0) for all monomials of degree ≤ d.
pub fn pairing_gram(rs: &RootSystem, k: &Multiplicity, d: u32) -> PairingGram {
    let n = rs.ambient_dim();
    let kb = exact_k(rs, k);
    let rd = root_data(rs, &kb);
    let units: Vec<Vec<BQ>> = (0..n).map(|i| (0..n).map(|j| if i == j { BQ::one() } else { BQ::zero() }).collect()).collect();
    let mut basis = Vec::new();
    let mut blocks = Vec::new();
    let mut off_block_nonzero = 0;
    for deg in 0..=d {
        let mons = monomials(n, deg);
        let mut block = vec![vec![BQ::zero(); mons.len()]; mons.len()];
        for (jb, b) in mons.iter().enumerate() {
            // T̄(e)^a x^b for all a of degree ≤ deg, built by applying one T̄(e_i) at a time
            let mut memo: HashMap<Vec<u32>, Polynomial> = HashMap::new();
            memo.insert(vec![0; n], Polynomial::monomial(b));
            for s in 1..=deg {
                for a in monomials(n, s) {
                    let i = a.iter().position(|&x| x > 0).unwrap();
                    let mut prev = a.clone();
                    prev[i] -= 1;
                    let p = memo[&prev].clone();
                    let t = dunkl_apply_with(&rd, &units[i], &p);
                    memo.insert(a, t);
                }
                if s < deg {
                    // lower-degree operators leave no constant term: blocks are orthogonal
                    for a in monomials(n, s) {
                        if !memo[&a].at_zero().is_zero() {
                            off_block_nonzero += 1;
                        }
                    }
                }
            }
            for (ia, a) in mons.iter().enumerate() {
                block[ia][jb] = memo[a].at_zero();
            }
        }
        basis.push(mons);
        blocks.push(block);
    }
    PairingGram { degree: d, basis, blocks, off_block_nonzero }
}

/// det ≠ 0 on every homogeneous block up to degree d.
pub fn regular_by_gram(rs: &RootSystem, k: &Multiplicity, d: u32) -> bool {
    pairing_gram(rs, k, d).dets().iter().all(|x| !x.is_zero())
}

/// max |entry| as f64, for reporting.
pub fn max_abs(m: &[Vec<BQ>]) -> BQ {
    m.iter().flatten().map(|x| x.abs()).fold(BQ::zero(), |a, b| if b > a { b } else { a })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{q, qi};

    fn line() -> RootSystem {
        RootSystem::from_vectors(vec![vec![qi(1)], vec![qi(-1)]], vec![vec![qi(1)]], None, "A1").unwrap()
    }

    #[test]
    fn a1_examples() {
        let rs = line();
        let k = Multiplicity::from_exact(vec![q(1, 3)]);
        let t = Polynomial::monomial(&[1]);
        let out = dunkl_apply(&rs, &k, &[qi(1)], &t);
        assert_eq!(out, Polynomial::constant(1, bq(&q(5, 3))));
        assert!(dunkl_apply(&rs, &k, &[qi(1)], &Polynomial::one(1)).is_zero());
        let g = pairing_gram(&rs, &k, 1);
        assert_eq!(g.blocks, vec![vec![vec![bq_i(1)]], vec![vec![bq(&q(5, 3))]]]);
        assert!(!regular_by_gram(&rs, &Multiplicity::from_exact(vec![q(-1, 2)]), 1));
        assert!(regular_by_gram(&rs, &Multiplicity::from_exact(vec![q(1, 2)]), 1));
    }

    #[test]
    fn bernoulli() {
        let b = bernoulli_plus(6);
        let want = [q(1, 1), q(1, 2), q(1, 6), q(0, 1), q(-1, 30), q(0, 1), q(1, 42)];
        for (x, y) in b.iter().zip(want) {
            assert_eq!(*x, bq(&y));
        }
    }

    #[test]
    fn cherednik_constant() {
        let rs = RootSystem::build("A", 2).unwrap();
        let k = Multiplicity::from_exact(vec![q(1, 2)]);
        let h = vec![qi(1), qi(0), qi(-1)];
        let out = cherednik_apply(&rs, &k, &h, &Polynomial::one(3), 3).unwrap();
        let rho = rs.rho_weighted_exact(&[q(1, 2)]);
        let rho_h: Q = rho.iter().zip(&h).map(|(a, b)| a * b).sum();
        assert_eq!(out, Polynomial::constant(3, -bq(&rho_h)));
        let big = Polynomial::monomial(&[2, 2, 0]);
        assert!(matches!(cherednik_apply(&rs, &k, &h, &big, 3), Err(Error::DegreeCapExceeded { .. })));
    }

    #[test]
    fn rank_one_cherednik_closed_form() {
        // (1 − e^{−t})⁻¹(t − (−t)) = 2t/(1 − e^{−t}) = 2 Σ b_n t^n/n!
        let rs = line();
        let k = Multiplicity::from_exact(vec![qi(1)]);
        let out = cherednik_apply(&rs, &k, &[qi(1)], &Polynomial::monomial(&[1]), 4).unwrap();
        // ∂t = 1, rho(H) = 1/2: 1 + 2(1 + t/2 + t²/12 − t⁴/720) − t/2
        let mut want = Polynomial::zero(1);
        want.add_term(vec![0], bq_i(3));
        want.add_term(vec![1], bq(&q(1, 2)));
        want.add_term(vec![2], bq(&q(1, 6)));
        want.add_term(vec![4], bq(&q(-1, 360)));
        assert_eq!(out, want);
    }
}
