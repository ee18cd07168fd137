//! Exact root systems, Weyl groups and cone lattices.
//!
//! Coordinates and Gram matrices are exact rationals. Weyl group elements are
//! integer matrices acting on coefficient vectors over the simple roots, which
//! keeps enumeration exact and cheap; ambient actions are derived from them.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub type Q = Rational64;

pub const DEFAULT_WEYL_CAP: usize = 200_000;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parse "3", "-1/4", "0.5" into an exact rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().ok()?;
        let b: i64 = b.trim().parse().ok()?;
        if b == 0 {
            return None;
        }
        return Some(Q::new(a, b));
    }
    if let Ok(n) = s.parse::<i64>() {
        return Some(qi(n));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (ip, fp) = body.split_once('.')?;
    if fp.len() > 15 || !fp.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let ip: i64 = if ip.is_empty() { 0 } else { ip.parse().ok()? };
    let den = 10i64.pow(fp.len() as u32);
    let fpv: i64 = if fp.is_empty() { 0 } else { fp.parse().ok()? };
    let v = Q::new(ip * den + fpv, den);
    Some(if neg { -v } else { v })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    E,
    F,
    G,
    Custom,
}

/// Weyl group element as an integer matrix on simple-root coefficients
/// (column j is the image of the j-th simple root).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub r: usize,
    pub mat: Vec<i64>,
}

impl WeylElement {
    pub fn identity(r: usize) -> Self {
        let mut mat = vec![0; r * r];
        for i in 0..r {
            mat[i * r + i] = 1;
        }
        WeylElement { r, mat }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.r)
    }

    /// self ∘ other
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let r = self.r;
        let mut mat = vec![0; r * r];
        for i in 0..r {
            for k in 0..r {
                let a = self.mat[i * r + k];
                if a == 0 {
                    continue;
                }
                for j in 0..r {
                    mat[i * r + j] += a * other.mat[k * r + j];
                }
            }
        }
        WeylElement { r, mat }
    }

    pub fn act_coeffs(&self, c: &[i64]) -> Vec<i64> {
        let r = self.r;
        (0..r).map(|i| (0..r).map(|j| self.mat[i * r + j] * c[j]).sum()).collect()
    }

    /// Determinant sign, i.e. sgn(w).
    pub fn sign(&self) -> i64 {
        let m: Vec<Vec<Q>> = (0..self.r)
            .map(|i| (0..self.r).map(|j| qi(self.mat[i * self.r + j])).collect())
            .collect();
        if linalg::det(&m).is_positive() {
            1
        } else {
            -1
        }
    }
}

/// μ ∈ ℕΣ⁺ written over the simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConePoint {
    pub coords: Vec<u32>,
    pub height: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub label: String,
    pub members: Vec<usize>,
    pub is_double: bool,
    pub norm2: Q,
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    family: Family,
    label: String,
    ambient_dim: usize,
    gram: Vec<Vec<Q>>,
    roots: Vec<Vec<Q>>,
    index: HashMap<Vec<Q>, usize>,
    is_positive: Vec<bool>,
    positive: Vec<usize>,
    simple: Vec<usize>,
    neg: Vec<usize>,
    coeffs: Vec<Vec<i64>>,
    orbit_of: Vec<usize>,
    orbits: Vec<Orbit>,
    double_of: Vec<Option<usize>>,
    half_of: Vec<Option<usize>>,
    cartan: Vec<Vec<i64>>,
    simple_perm: Vec<Vec<usize>>,
    gram_f: Vec<Vec<f64>>,
    roots_f: Vec<Vec<f64>>,
    simple_gram_f: Vec<Vec<f64>>,
    simple_gram_inv_f: Vec<Vec<f64>>,
    fingerprint: String,
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: Q, a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| x * c).collect()
}

fn neg(a: &[Q]) -> Vec<Q> {
    a.iter().map(|x| -x).collect()
}

pub fn identity_gram(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| unit(n, i)).collect()
}

pub fn gram_dot(g: &[Vec<Q>], u: &[Q], v: &[Q]) -> Q {
    let mut s = Q::zero();
    for i in 0..u.len() {
        if u[i].is_zero() {
            continue;
        }
        for j in 0..v.len() {
            if !v[j].is_zero() && !g[i][j].is_zero() {
                s += u[i] * g[i][j] * v[j];
            }
        }
    }
    s
}

fn lex_positive(v: &[Q]) -> bool {
    v.iter().find(|x| !x.is_zero()).map(|x| x.is_positive()).unwrap_or(false)
}

fn e8_roots() -> Vec<Vec<Q>> {
    let n = 8;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for si in [1i64, -1] {
                for sj in [1i64, -1] {
                    let mut v = vec![Q::zero(); n];
                    v[i] = qi(si);
                    v[j] = qi(sj);
                    out.push(v);
                }
            }
        }
    }
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            out.push((0..n).map(|i| if mask >> i & 1 == 1 { q(-1, 2) } else { q(1, 2) }).collect());
        }
    }
    out
}

/// Validity report of a finite vector set as a (possibly non-reduced) root system.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub crystallographic: bool,
    pub reflection_closed: bool,
    pub spans: bool,
    pub proportionality: bool,
    pub details: Vec<String>,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.crystallographic && self.reflection_closed && self.spans && self.proportionality
    }
}

/// Check the root system axioms for `vectors` under `gram`. `span_dim`, if
/// given, is the dimension the set must span.
pub fn validate_root_system(vectors: &[Vec<Q>], gram: &[Vec<Q>], span_dim: Option<usize>) -> ValidationReport {
    let mut rep = ValidationReport {
        crystallographic: true,
        reflection_closed: true,
        spans: true,
        proportionality: true,
        details: Vec::new(),
    };
    let set: HashSet<&Vec<Q>> = vectors.iter().collect();
    let norms: Vec<Q> = vectors.iter().map(|v| gram_dot(gram, v, v)).collect();
    if norms.iter().any(|n| n.is_zero()) {
        rep.crystallographic = false;
        rep.details.push("zero vector".into());
        return rep;
    }
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let ip = gram_dot(gram, a, b);
            let n = qi(2) * ip / norms[i];
            if !n.is_integer() {
                if rep.crystallographic {
                    rep.details.push(format!("<{}, ({})^v> = {} is not an integer", fmt_vec(b), fmt_vec(a), n));
                }
                rep.crystallographic = false;
            }
            if rep.reflection_closed {
                let img = sub(b, &scale(n, a));
                if !set.contains(&img) {
                    rep.reflection_closed = false;
                    rep.details.push(format!("r_({})({}) = {} is missing", fmt_vec(a), fmt_vec(b), fmt_vec(&img)));
                }
            }
            if i < j && rep.proportionality {
                // proportional iff ip^2 = |a|^2 |b|^2
                if ip * ip == norms[i] * norms[j] {
                    let c = ip / norms[i];
                    let ok = [qi(1), qi(-1), qi(2), qi(-2), q(1, 2), q(-1, 2)].contains(&c);
                    if !ok {
                        rep.proportionality = false;
                        rep.details.push(format!("{} and {} are proportional with ratio {}", fmt_vec(a), fmt_vec(b), c));
                    }
                }
            }
        }
    }
    if let Some(d) = span_dim {
        let r = linalg::rank(vectors);
        if r != d {
            rep.spans = false;
            rep.details.push(format!("span has dimension {} instead of {}", r, d));
        }
    }
    rep
}

pub fn fmt_vec(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RootSystemSpec {
    Family { family: String, rank: usize },
    Custom { custom: CustomSpec },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CustomSpec {
    pub roots: Vec<Vec<String>>,
    #[serde(default)]
    pub gram: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub chamber: Option<Vec<String>>,
}

impl RootSystem {
    /// Standard construction; see [`RootSystem::from_label`] for "BC2"-style tags.
    pub fn build(family: &str, rank: usize) -> Result<Self> {
        let fam = family.trim().to_ascii_uppercase();
        let bad = || Error::RankOutOfRange { family: fam.clone(), rank };
        let (f, n, roots): (Family, usize, Vec<Vec<Q>>) = match fam.as_str() {
            "A" => {
                if !(1..=12).contains(&rank) {
                    return Err(bad());
                }
                let n = rank + 1;
                let mut rs = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            rs.push(sub(&unit(n, i), &unit(n, j)));
                        }
                    }
                }
                (Family::A, n, rs)
            }
            "B" | "C" | "D" | "BC" => {
                let min = match fam.as_str() {
                    "BC" => 1,
                    "D" => 3,
                    _ => 2,
                };
                if rank < min || rank > 12 {
                    return Err(bad());
                }
                let n = rank;
                let mut rs = Vec::new();
                for i in 0..n {
                    for j in i + 1..n {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            rs.push(add(&scale(qi(si), &unit(n, i)), &scale(qi(sj), &unit(n, j))));
                        }
                    }
                    let e = unit(n, i);
                    if fam == "B" || fam == "BC" {
                        rs.push(e.clone());
                        rs.push(neg(&e));
                    }
                    if fam == "C" || fam == "BC" {
                        rs.push(scale(qi(2), &e));
                        rs.push(scale(qi(-2), &e));
                    }
                }
                let f = match fam.as_str() {
                    "B" => Family::B,
                    "C" => Family::C,
                    "D" => Family::D,
                    _ => Family::BC,
                };
                (f, n, rs)
            }
            "G" => {
                if rank != 2 {
                    return Err(bad());
                }
                let n = 3;
                let mut rs = Vec::new();
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            rs.push(sub(&unit(n, i), &unit(n, j)));
                        }
                    }
                    let mut l = vec![qi(-1); 3];
                    l[i] = qi(2);
                    rs.push(l.clone());
                    rs.push(neg(&l));
                }
                (Family::G, n, rs)
            }
            "F" => {
                if rank != 4 {
                    return Err(bad());
                }
                let n = 4;
                let mut rs = Vec::new();
                for i in 0..n {
                    rs.push(unit(n, i));
                    rs.push(neg(&unit(n, i)));
                    for j in i + 1..n {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            rs.push(add(&scale(qi(si), &unit(n, i)), &scale(qi(sj), &unit(n, j))));
                        }
                    }
                }
                for mask in 0u32..16 {
                    rs.push((0..n).map(|i| if mask >> i & 1 == 1 { q(-1, 2) } else { q(1, 2) }).collect());
                }
                (Family::F, n, rs)
            }
            "E" => {
                let all = e8_roots();
                let rs: Vec<Vec<Q>> = match rank {
                    8 => all,
                    // orthogonal complement of the root e7+e8, then of the A2 {e7+e8, e6+e7}
                    7 => all.into_iter().filter(|v| (v[6] + v[7]).is_zero()).collect(),
                    6 => all
                        .into_iter()
                        .filter(|v| (v[6] + v[7]).is_zero() && (v[5] + v[6]).is_zero())
                        .collect(),
                    _ => return Err(bad()),
                };
                (Family::E, 8, rs)
            }
            _ => return Err(Error::UnknownFamily(family.to_string())),
        };
        let label = match f {
            Family::E => format!("E{}", rank),
            Family::F => "F4".into(),
            Family::G => "G2".into(),
            _ => format!("{}{}", fam, rank),
        };
        Self::assemble(f, label, identity_gram(n), roots, None)
    }

    /// Parse tags such as "A2", "BC1", "G2", "E6".
    pub fn from_label(tag: &str) -> Result<Self> {
        let t = tag.trim();
        let pos = t.find(|c: char| c.is_ascii_digit()).ok_or_else(|| Error::UnknownFamily(t.to_string()))?;
        let (fam, r) = t.split_at(pos);
        let rank: usize = r.parse().map_err(|_| Error::UnknownFamily(t.to_string()))?;
        Self::build(fam, rank)
    }

    pub fn from_spec(spec: &RootSystemSpec) -> Result<Self> {
        match spec {
            RootSystemSpec::Family { family, rank } => Self::build(family, *rank),
            RootSystemSpec::Custom { custom } => {
                let conv = |v: &Vec<String>| -> Result<Vec<Q>> {
                    v.iter()
                        .map(|s| parse_q(s).ok_or_else(|| Error::InvalidRootSystem(format!("bad number `{}`", s))))
                        .collect()
                };
                let roots: Vec<Vec<Q>> = custom.roots.iter().map(conv).collect::<Result<_>>()?;
                let n = roots.first().map(|r| r.len()).unwrap_or(0);
                let gram = match &custom.gram {
                    Some(g) => g.iter().map(conv).collect::<Result<_>>()?,
                    None => identity_gram(n),
                };
                let chamber = match &custom.chamber {
                    Some(c) => Some(conv(c)?),
                    None => None,
                };
                Self::from_vectors(roots, gram, chamber, "custom")
            }
        }
    }

    /// Build from an explicit root list. If `chamber` is given, a root is
    /// positive iff its inner product with it is positive; otherwise the
    /// first nonzero ambient coordinate decides.
    pub fn from_vectors(roots: Vec<Vec<Q>>, gram: Vec<Vec<Q>>, chamber: Option<Vec<Q>>, label: &str) -> Result<Self> {
        let n = gram.len();
        if roots.is_empty() || roots.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidRootSystem("empty root list or dimension mismatch".into()));
        }
        let mut uniq: Vec<Vec<Q>> = Vec::new();
        let mut seen = HashSet::new();
        for r in roots {
            if seen.insert(r.clone()) {
                uniq.push(r);
            }
        }
        let rep = validate_root_system(&uniq, &gram, None);
        if !rep.valid() {
            return Err(Error::InvalidRootSystem(rep.details.join("; ")));
        }
        Self::assemble(Family::Custom, label.to_string(), gram, uniq, chamber)
    }

    fn assemble(family: Family, label: String, gram: Vec<Vec<Q>>, roots: Vec<Vec<Q>>, chamber: Option<Vec<Q>>) -> Result<Self> {
        let n = gram.len();
        let index: HashMap<Vec<Q>, usize> = roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let neg_idx: Vec<usize> = roots
            .iter()
            .map(|r| index.get(&neg(r)).copied().ok_or_else(|| Error::InvalidRootSystem("not closed under negation".into())))
            .collect::<Result<_>>()?;
        let mut is_positive = Vec::with_capacity(roots.len());
        for r in &roots {
            let p = match &chamber {
                Some(c) => {
                    let v = gram_dot(&gram, r, c);
                    if v.is_zero() {
                        return Err(Error::InvalidRootSystem("chamber vector lies on a wall".into()));
                    }
                    v.is_positive()
                }
                None => lex_positive(r),
            };
            is_positive.push(p);
        }
        let positive: Vec<usize> = (0..roots.len()).filter(|&i| is_positive[i]).collect();
        // simple roots: positive roots that are not a sum of two positive roots
        let mut decomposable = vec![false; roots.len()];
        for &a in &positive {
            for &b in &positive {
                if let Some(&c) = index.get(&add(&roots[a], &roots[b])) {
                    decomposable[c] = true;
                }
            }
        }
        let mut simple: Vec<usize> = positive.iter().copied().filter(|&i| !decomposable[i]).collect();
        // order simple roots along the lexicographic order of their coordinates (descending)
        simple.sort_by(|&a, &b| roots[b].cmp(&roots[a]));
        let r = simple.len();
        let sg: Vec<Vec<Q>> = simple
            .iter()
            .map(|&i| simple.iter().map(|&j| gram_dot(&gram, &roots[i], &roots[j])).collect())
            .collect();
        let sg_inv = linalg::inverse(&sg).ok_or_else(|| Error::InvalidRootSystem("simple roots are dependent".into()))?;
        let mut coeffs = Vec::with_capacity(roots.len());
        for rt in &roots {
            let b: Vec<Q> = simple.iter().map(|&j| gram_dot(&gram, &roots[j], rt)).collect();
            let c: Vec<Q> = (0..r).map(|i| (0..r).map(|j| sg_inv[i][j] * b[j]).sum()).collect();
            // must reproduce the root (it lies in the span)
            let mut back = vec![Q::zero(); n];
            for (ci, &s) in c.iter().zip(&simple) {
                for k in 0..n {
                    back[k] += ci * roots[s][k];
                }
            }
            if &back != rt || c.iter().any(|x| !x.is_integer()) {
                return Err(Error::InvalidRootSystem(format!("root {} is not an integral combination of simple roots", fmt_vec(rt))));
            }
            coeffs.push(c.iter().map(|x| x.to_integer()).collect::<Vec<i64>>());
        }
        for &p in &positive {
            if coeffs[p].iter().any(|&x| x < 0) {
                return Err(Error::InvalidRootSystem("positive root with negative simple coefficients".into()));
            }
        }
        let cartan: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| (qi(2) * sg[i][j] / sg[j][j]).to_integer()).collect())
            .collect();
        let norms: Vec<Q> = roots.iter().map(|v| gram_dot(&gram, v, v)).collect();
        let simple_perm: Vec<Vec<usize>> = simple
            .iter()
            .map(|&s| {
                roots
                    .iter()
                    .enumerate()
                    .map(|(_, b)| {
                        let c = qi(2) * gram_dot(&gram, b, &roots[s]) / norms[s];
                        index[&sub(b, &scale(c, &roots[s]))]
                    })
                    .collect()
            })
            .collect();
        // orbits by closure under simple reflections
        let mut orbit_of = vec![usize::MAX; roots.len()];
        let mut raw_orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..roots.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = raw_orbits.len();
            let mut members = vec![start];
            orbit_of[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for p in &simple_perm {
                    let y = p[x];
                    if orbit_of[y] == usize::MAX {
                        orbit_of[y] = id;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort();
            raw_orbits.push(members);
        }
        let half_of: Vec<Option<usize>> = roots.iter().map(|v| index.get(&scale(q(1, 2), v)).copied()).collect();
        let double_of: Vec<Option<usize>> = roots.iter().map(|v| index.get(&scale(qi(2), v)).copied()).collect();
        let mut order: Vec<usize> = (0..raw_orbits.len()).collect();
        let key = |o: usize| {
            let m = raw_orbits[o][0];
            (half_of[m].is_some(), norms[m], roots[raw_orbits[o][0]].clone())
        };
        order.sort_by(|&a, &b| key(a).cmp(&key(b)));
        let reduced = half_of.iter().all(|h| h.is_none());
        let nondouble: Vec<usize> = order.iter().copied().filter(|&o| half_of[raw_orbits[o][0]].is_none()).collect();
        let base_names: Vec<&str> = match (nondouble.len(), reduced) {
            (1, true) => vec!["long"],
            (1, false) => vec!["short"],
            (2, true) => vec!["short", "long"],
            (2, false) => vec!["short", "medium"],
            (3, _) => vec!["short", "medium", "long"],
            _ => vec![],
        };
        let mut orbits = Vec::new();
        let mut remap = vec![0usize; raw_orbits.len()];
        let mut used: HashMap<String, usize> = HashMap::new();
        let mut nd_i = 0;
        let mut d_i = 0;
        for &o in &order {
            let m = raw_orbits[o][0];
            let is_double = half_of[m].is_some();
            let base = if is_double {
                d_i += 1;
                if d_i == 1 { "double".to_string() } else { format!("double{}", d_i) }
            } else {
                let s = base_names.get(nd_i).map(|s| s.to_string()).unwrap_or_else(|| format!("orbit{}", nd_i));
                nd_i += 1;
                s
            };
            let cnt = used.entry(base.clone()).or_insert(0);
            *cnt += 1;
            let label = if *cnt == 1 { base } else { format!("{}{}", base, cnt) };
            remap[o] = orbits.len();
            orbits.push(Orbit { label, members: raw_orbits[o].clone(), is_double, norm2: norms[m] });
        }
        let orbit_of: Vec<usize> = orbit_of.iter().map(|&o| remap[o]).collect();
        let gram_f: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(q_to_f64).collect()).collect();
        let roots_f: Vec<Vec<f64>> = roots.iter().map(|r| r.iter().map(q_to_f64).collect()).collect();
        let simple_gram_f = sg.iter().map(|r| r.iter().map(q_to_f64).collect()).collect();
        let simple_gram_inv_f = sg_inv.iter().map(|r| r.iter().map(q_to_f64).collect()).collect();
        let fingerprint = {
            use sha2::{Digest, Sha256};
            let mut h = Sha256::new();
            for r in &roots {
                h.update(fmt_vec(r).as_bytes());
            }
            for r in &gram {
                h.update(fmt_vec(r).as_bytes());
            }
            for &p in &positive {
                h.update(p.to_le_bytes());
            }
            hex::encode(&h.finalize()[..12])
        };
        Ok(RootSystem {
            fingerprint,
            family,
            label,
            ambient_dim: n,
            gram,
            roots,
            index,
            is_positive,
            positive,
            simple,
            neg: neg_idx,
            coeffs,
            orbit_of,
            orbits,
            double_of,
            half_of,
            cartan,
            simple_perm,
            gram_f,
            roots_f,
            simple_gram_f,
            simple_gram_inv_f,
        })
    }

    /// Same roots with the Gram matrix multiplied by `c`.
    pub fn rescaled(&self, c: Q) -> Result<Self> {
        let gram = self.gram.iter().map(|r| scale(c, r)).collect();
        let chamber = self.positive.iter().fold(vec![Q::zero(); self.ambient_dim], |acc, &i| add(&acc, &self.roots[i]));
        let mut out = Self::assemble(self.family, self.label.clone(), gram, self.roots.clone(), Some(chamber))?;
        out.label = format!("{}*{}", self.label, c);
        Ok(out)
    }

    /// Hash of roots, Gram matrix and positive system.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }
    pub fn family(&self) -> Family {
        self.family
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }
    pub fn rank(&self) -> usize {
        self.simple.len()
    }
    pub fn gram(&self) -> &[Vec<Q>] {
        &self.gram
    }
    pub fn gram_f64(&self) -> &[Vec<f64>] {
        &self.gram_f
    }
    pub fn roots(&self) -> &[Vec<Q>] {
        &self.roots
    }
    pub fn root(&self, i: usize) -> &[Q] {
        &self.roots[i]
    }
    pub fn root_f64(&self, i: usize) -> &[f64] {
        &self.roots_f[i]
    }
    pub fn positive(&self) -> &[usize] {
        &self.positive
    }
    pub fn is_positive(&self, i: usize) -> bool {
        self.is_positive[i]
    }
    pub fn simple(&self) -> &[usize] {
        &self.simple
    }
    pub fn negative_of(&self, i: usize) -> usize {
        self.neg[i]
    }
    pub fn coeffs(&self, i: usize) -> &[i64] {
        &self.coeffs[i]
    }
    pub fn index_of(&self, v: &[Q]) -> Option<usize> {
        self.index.get(v).copied()
    }
    pub fn orbits(&self) -> &[Orbit] {
        &self.orbits
    }
    pub fn orbit_of(&self, i: usize) -> usize {
        self.orbit_of[i]
    }
    pub fn orbit_by_label(&self, label: &str) -> Option<usize> {
        self.orbits.iter().position(|o| o.label == label)
    }
    pub fn double_of(&self, i: usize) -> Option<usize> {
        self.double_of[i]
    }
    pub fn half_of(&self, i: usize) -> Option<usize> {
        self.half_of[i]
    }
    pub fn is_reduced(&self) -> bool {
        self.half_of.iter().all(|h| h.is_none())
    }
    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }
    pub fn simple_gram_f64(&self) -> &[Vec<f64>] {
        &self.simple_gram_f
    }

    pub fn dot(&self, u: &[Q], v: &[Q]) -> Q {
        gram_dot(&self.gram, u, v)
    }

    pub fn dot_f64(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..u.len() {
            for j in 0..v.len() {
                s += u[i] * self.gram_f[i][j] * v[j];
            }
        }
        s
    }

    pub fn dot_c(&self, u: &[Complex64], v: &[f64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..u.len() {
            for j in 0..v.len() {
                s += u[i] * (self.gram_f[i][j] * v[j]);
            }
        }
        s
    }

    pub fn norm2(&self, i: usize) -> Q {
        self.orbits[self.orbit_of[i]].norm2
    }

    /// ⟨β, α^∨⟩ = 2(β,α)/(α,α).
    pub fn pairing(&self, beta: &[Q], alpha: usize) -> Q {
        qi(2) * self.dot(beta, &self.roots[alpha]) / self.norm2(alpha)
    }

    /// α^∨ = 2α/(α,α), as an ambient vector under the Gram identification.
    pub fn coroot(&self, alpha: &[Q]) -> Result<Vec<Q>> {
        let i = self.index_of(alpha).ok_or(Error::NotARoot)?;
        Ok(scale(qi(2) / self.norm2(i), &self.roots[i]))
    }

    pub fn coroot_f64(&self, i: usize) -> Vec<f64> {
        let c = 2.0 / q_to_f64(&self.norm2(i));
        self.roots_f[i].iter().map(|x| x * c).collect()
    }

    /// ρ(k) = ½ Σ_{α>0} k_α α, exact.
    pub fn rho_weighted_exact(&self, k: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.ambient_dim];
        for &i in &self.positive {
            let c = k[self.orbit_of[i]] * q(1, 2);
            for (o, x) in out.iter_mut().zip(&self.roots[i]) {
                *o += c * x;
            }
        }
        out
    }

    pub fn rho_weighted(&self, k: &Multiplicity) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim];
        for &i in &self.positive {
            let c = 0.5 * k.values[self.orbit_of[i]];
            for (o, x) in out.iter_mut().zip(&self.roots_f[i]) {
                *o += c * x;
            }
        }
        out
    }

    fn simple_reflection(&self, i: usize) -> WeylElement {
        let r = self.rank();
        let mut w = WeylElement::identity(r);
        // s_i(α_j) = α_j − ⟨α_j, α_i^∨⟩ α_i
        for j in 0..r {
            w.mat[i * r + j] -= self.cartan[j][i];
        }
        w
    }

    pub fn simple_reflections(&self) -> Vec<WeylElement> {
        (0..self.rank()).map(|i| self.simple_reflection(i)).collect()
    }

    /// Order of W by closure, refusing above `cap`.
    pub fn weyl_elements(&self, cap: usize) -> Result<Vec<WeylElement>> {
        let gens = self.simple_reflections();
        let id = WeylElement::identity(self.rank());
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        seen.insert(id.mat.clone());
        let mut out = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let x = g.compose(&w);
                if seen.insert(x.mat.clone()) {
                    if out.len() >= cap {
                        return Err(Error::WeylGroupTooLarge { cap });
                    }
                    out.push(x.clone());
                    queue.push_back(x);
                }
            }
        }
        Ok(out)
    }

    /// Exact ambient matrix of w (identity on the orthogonal complement of the span).
    pub fn weyl_matrix_exact(&self, w: &WeylElement) -> Vec<Vec<Q>> {
        let n = self.ambient_dim;
        let r = self.rank();
        let sg_inv = self.simple_gram_inv_exact();
        let mut m = vec![vec![Q::zero(); n]; n];
        for col in 0..n {
            let v = unit(n, col);
            let b: Vec<Q> = self.simple.iter().map(|&s| self.dot(&self.roots[s], &v)).collect();
            let c: Vec<Q> = (0..r).map(|i| (0..r).map(|j| sg_inv[i][j] * b[j]).sum()).collect();
            let mut out = v.clone();
            for i in 0..r {
                let mut wc = Q::zero();
                for j in 0..r {
                    wc += qi(w.mat[i * r + j]) * c[j];
                }
                let d = wc - c[i];
                for k in 0..n {
                    out[k] += d * self.roots[self.simple[i]][k];
                }
            }
            for k in 0..n {
                m[k][col] = out[k];
            }
        }
        m
    }

    fn simple_gram_inv_exact(&self) -> Vec<Vec<Q>> {
        let sg: Vec<Vec<Q>> = self
            .simple
            .iter()
            .map(|&i| self.simple.iter().map(|&j| self.dot(&self.roots[i], &self.roots[j])).collect())
            .collect();
        linalg::inverse(&sg).expect("simple roots independent")
    }

    /// Coefficients over simple roots of the projection of v onto the root span.
    fn span_coeffs_f64(&self, v: &[f64]) -> Vec<f64> {
        let b: Vec<f64> = self.simple.iter().map(|&s| self.dot_f64(&self.roots_f[s], v)).collect();
        linalg::mat_vec_f64(&self.simple_gram_inv_f, &b)
    }

    pub fn act_f64(&self, w: &WeylElement, v: &[f64]) -> Vec<f64> {
        let r = self.rank();
        let c = self.span_coeffs_f64(v);
        let mut out = v.to_vec();
        for i in 0..r {
            let wc: f64 = (0..r).map(|j| w.mat[i * r + j] as f64 * c[j]).sum();
            let d = wc - c[i];
            for (o, x) in out.iter_mut().zip(&self.roots_f[self.simple[i]]) {
                *o += d * x;
            }
        }
        out
    }

    pub fn act_c(&self, w: &WeylElement, v: &[Complex64]) -> Vec<Complex64> {
        let re: Vec<f64> = v.iter().map(|z| z.re).collect();
        let im: Vec<f64> = v.iter().map(|z| z.im).collect();
        let a = self.act_f64(w, &re);
        let b = self.act_f64(w, &im);
        a.into_iter().zip(b).map(|(x, y)| Complex64::new(x, y)).collect()
    }

    /// α_i(H) for each simple root.
    pub fn simple_values(&self, h: &[f64]) -> Vec<f64> {
        self.simple.iter().map(|&s| self.dot_f64(&self.roots_f[s], h)).collect()
    }

    /// Move H into the closed negative chamber: repeatedly reflect in the first
    /// simple root with α(H) > 0. Returns w with w·H = H′.
    pub fn chamber_map(&self, h: &[f64]) -> (WeylElement, Vec<f64>) {
        let r = self.rank();
        let scale_h = self.dot_f64(h, h).sqrt().max(1e-300);
        let tol = 1e-13 * scale_h;
        let gens = self.simple_reflections();
        let mut w = WeylElement::identity(r);
        let mut cur = h.to_vec();
        let limit = 4 * self.positive.len() + 8;
        for _ in 0..limit {
            let vals = self.simple_values(&cur);
            match vals.iter().position(|&x| x > tol) {
                None => break,
                Some(i) => {
                    let s = self.simple[i];
                    let c = 2.0 * vals[i] / q_to_f64(&self.norm2(s));
                    for (o, x) in cur.iter_mut().zip(&self.roots_f[s]) {
                        *o -= c * x;
                    }
                    w = gens[i].compose(&w);
                }
            }
        }
        (w, cur)
    }

    /// min over positive roots of |α(H)|.
    pub fn wall_distance(&self, h: &[f64]) -> f64 {
        self.positive
            .iter()
            .map(|&i| self.dot_f64(&self.roots_f[i], h).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// All μ ∈ ℕΣ⁺ of height ≤ N, graded by height then lexicographic.
    pub fn enumerate_cone(&self, max_height: usize) -> Vec<ConePoint> {
        let r = self.rank();
        let mut out = Vec::new();
        for h in 0..=max_height {
            let mut shell = Vec::new();
            compositions(r, h as u32, &mut vec![0; r], 0, &mut shell);
            shell.sort();
            shell.reverse();
            for c in shell {
                out.push(ConePoint { coords: c, height: h as u32 });
            }
        }
        out
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    /// Ambient vector Σ c_i α_i.
    pub fn from_coeffs_f64(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.ambient_dim];
        for (ci, &s) in c.iter().zip(&self.simple) {
            for (o, x) in out.iter_mut().zip(&self.roots_f[s]) {
                *o += ci * x;
            }
        }
        out
    }

    /// λ ∈ 𝔞* from its values λ(α_i^∨) on simple coroots.
    pub fn lambda_from_coroot_values(&self, vals: &[Complex64]) -> Vec<Complex64> {
        // λ = Σ c_j α_j with Σ_j c_j ⟨α_j, α_i^∨⟩ = vals_i, i.e. C^T c = vals
        let r = self.rank();
        let ct: Vec<Vec<Q>> = (0..r).map(|i| (0..r).map(|j| qi(self.cartan[j][i])).collect()).collect();
        let inv = linalg::inverse(&ct).expect("Cartan matrix invertible");
        let c: Vec<Complex64> = (0..r)
            .map(|i| (0..r).map(|j| vals[j] * q_to_f64(&inv[i][j])).sum())
            .collect();
        let re = self.from_coeffs_f64(&c.iter().map(|z| z.re).collect::<Vec<_>>());
        let im = self.from_coeffs_f64(&c.iter().map(|z| z.im).collect::<Vec<_>>());
        re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect()
    }

    /// H ∈ 𝔞 from its values α_i(H) on simple roots.
    pub fn h_from_simple_values(&self, vals: &[f64]) -> Vec<f64> {
        let c = linalg::mat_vec_f64(&self.simple_gram_inv_f, vals);
        self.from_coeffs_f64(&c)
    }

    /// Vectors of the orbits, by root index.
    pub fn positive_in_orbit(&self, o: usize) -> impl Iterator<Item = usize> + '_ {
        self.positive.iter().copied().filter(move |&i| self.orbit_of[i] == o)
    }

    /// Same root set; useful to tell whether two systems share roots exactly.
    pub fn root_set(&self) -> HashSet<Vec<Q>> {
        self.roots.iter().cloned().collect()
    }

    /// Set of reflection hyperplanes, as primitive (normalised) directions.
    pub fn reflection_directions(&self) -> HashSet<Vec<Q>> {
        self.positive.iter().map(|&i| primitive_direction(&self.roots[i])).collect()
    }

    pub fn simple_perm(&self, i: usize) -> &[usize] {
        &self.simple_perm[i]
    }
}

/// Scale a nonzero vector so that its first nonzero entry is 1.
pub fn primitive_direction(v: &[Q]) -> Vec<Q> {
    let lead = *v.iter().find(|x| !x.is_zero()).expect("nonzero vector");
    v.iter().map(|x| x / lead).collect()
}

fn compositions(r: usize, h: u32, cur: &mut Vec<u32>, pos: usize, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == r {
        cur[pos] = h;
        out.push(cur.clone());
        return;
    }
    for a in 0..=h {
        cur[pos] = a;
        compositions(r, h - a, cur, pos + 1, out);
    }
}

/// W-invariant function on the roots, stored per orbit (canonical orbit order).
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplicity {
    pub values: Vec<f64>,
    pub exact: Option<Vec<Q>>,
}

impl Multiplicity {
    pub fn from_exact(v: Vec<Q>) -> Self {
        Multiplicity { values: v.iter().map(q_to_f64).collect(), exact: Some(v) }
    }

    pub fn from_f64(v: Vec<f64>) -> Self {
        Multiplicity { values: v, exact: None }
    }

    pub fn constant(rs: &RootSystem, c: f64) -> Self {
        Self::from_f64(vec![c; rs.orbits().len()])
    }

    pub fn constant_exact(rs: &RootSystem, c: Q) -> Self {
        Self::from_exact(vec![c; rs.orbits().len()])
    }

    pub fn zero(rs: &RootSystem) -> Self {
        Self::constant_exact(rs, Q::zero())
    }

    pub fn at(&self, rs: &RootSystem, root: usize) -> f64 {
        self.values[rs.orbit_of(root)]
    }

    pub fn at_exact(&self, rs: &RootSystem, root: usize) -> Option<Q> {
        self.exact.as_ref().map(|e| e[rs.orbit_of(root)])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Parse "1", "2,0.5" (positional, canonical orbit order) or "short=2,double=0.5".
    pub fn parse(rs: &RootSystem, s: &str) -> Result<Self> {
        let no = rs.orbits().len();
        let parts: Vec<&str> = s.split(',').map(|p| p.trim()).filter(|p| !p.is_empty()).collect();
        let bad = |m: String| Error::InvalidMultiplicity(m);
        if parts.is_empty() {
            return Err(bad("empty multiplicity".into()));
        }
        let parse_val = |t: &str| -> Result<(f64, Option<Q>)> {
            let exact = parse_q(t);
            let f = match &exact {
                Some(x) => q_to_f64(x),
                None => t.parse::<f64>().map_err(|_| bad(format!("bad value `{}`", t)))?,
            };
            Ok((f, exact))
        };
        let mut vals: Vec<Option<(f64, Option<Q>)>> = vec![None; no];
        if parts.iter().any(|p| p.contains('=')) {
            for p in &parts {
                let (l, v) = p.split_once('=').ok_or_else(|| bad(format!("mixed syntax in `{}`", s)))?;
                let o = rs.orbit_by_label(l.trim()).ok_or_else(|| bad(format!("unknown orbit label `{}` for {}", l.trim(), rs.label())))?;
                vals[o] = Some(parse_val(v)?);
            }
            // unspecified orbits default to 0
            for v in vals.iter_mut() {
                if v.is_none() {
                    *v = Some((0.0, Some(Q::zero())));
                }
            }
        } else if parts.len() == 1 {
            let v = parse_val(parts[0])?;
            vals = vec![Some(v); no];
        } else if parts.len() == no {
            for (o, p) in parts.iter().enumerate() {
                vals[o] = Some(parse_val(p)?);
            }
        } else {
            return Err(bad(format!("{} values given, {} has {} orbits", parts.len(), rs.label(), no)));
        }
        let vals: Vec<(f64, Option<Q>)> = vals.into_iter().map(|v| v.unwrap()).collect();
        let exact: Option<Vec<Q>> = vals.iter().map(|v| v.1).collect();
        Ok(Multiplicity { values: vals.iter().map(|v| v.0).collect(), exact })
    }

    pub fn labelled(&self, rs: &RootSystem) -> Vec<(String, f64)> {
        rs.orbits().iter().zip(&self.values).map(|(o, v)| (o.label.clone(), *v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        let cases = [("A1", 2, 2), ("A2", 6, 6), ("B2", 8, 8), ("BC1", 4, 2), ("BC2", 12, 8), ("G2", 12, 12), ("F4", 48, 1152), ("D4", 24, 192), ("C3", 18, 48)];
        for (tag, nroots, w) in cases {
            let rs = RootSystem::from_label(tag).unwrap();
            assert_eq!(rs.roots().len(), nroots, "{}", tag);
            assert_eq!(rs.weyl_elements(DEFAULT_WEYL_CAP).unwrap().len(), w, "{}", tag);
        }
    }

    #[test]
    fn e_types() {
        assert_eq!(RootSystem::from_label("E8").unwrap().roots().len(), 240);
        let e7 = RootSystem::from_label("E7").unwrap();
        assert_eq!(e7.roots().len(), 126);
        assert_eq!(e7.rank(), 7);
        let e6 = RootSystem::from_label("E6").unwrap();
        assert_eq!(e6.roots().len(), 72);
        assert_eq!(e6.rank(), 6);
        assert_eq!(e6.weyl_elements(DEFAULT_WEYL_CAP).unwrap().len(), 51840);
        assert!(matches!(e7.weyl_elements(DEFAULT_WEYL_CAP), Err(Error::WeylGroupTooLarge { .. })));
    }

    #[test]
    fn errors() {
        assert!(matches!(RootSystem::build("X", 2), Err(Error::UnknownFamily(_))));
        assert!(matches!(RootSystem::build("D", 2), Err(Error::RankOutOfRange { .. })));
        assert!(matches!(RootSystem::build("G", 3), Err(Error::RankOutOfRange { .. })));
    }

    #[test]
    fn orbit_labels() {
        let bc2 = RootSystem::from_label("BC2").unwrap();
        let labels: Vec<&str> = bc2.orbits().iter().map(|o| o.label.as_str()).collect();
        assert_eq!(labels, vec!["short", "medium", "double"]);
        let s = bc2.orbit_by_label("short").unwrap();
        assert_eq!(bc2.orbits()[s].norm2, qi(1));
        let bc1 = RootSystem::from_label("BC1").unwrap();
        let labels: Vec<&str> = bc1.orbits().iter().map(|o| o.label.as_str()).collect();
        assert_eq!(labels, vec!["short", "double"]);
        let g2 = RootSystem::from_label("G2").unwrap();
        assert_eq!(g2.orbits().len(), 2);
        assert_eq!(g2.orbits()[0].members.len(), 6);
    }

    #[test]
    fn coroots() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let a = a1.root(a1.simple()[0]).to_vec();
        assert_eq!(a1.coroot(&a).unwrap(), a);
        let bc1 = RootSystem::from_label("BC1").unwrap();
        let e = vec![qi(1)];
        let two_e = vec![qi(2)];
        assert_eq!(bc1.coroot(&two_e).unwrap(), scale(q(1, 2), &bc1.coroot(&e).unwrap()));
        assert!(matches!(bc1.coroot(&[qi(3)]), Err(Error::NotARoot)));
    }

    #[test]
    fn g2_pairing_table() {
        // brute force: some long/short pair pairs to -3
        let g2 = RootSystem::from_label("G2").unwrap();
        let mut found = false;
        for i in 0..12 {
            for j in 0..12 {
                let p = g2.pairing(g2.root(i), j);
                assert!(p.is_integer());
                if g2.norm2(i) > g2.norm2(j) && p == qi(-3) {
                    found = true;
                }
            }
        }
        assert!(found);
    }

    #[test]
    fn cone_examples() {
        let a2 = RootSystem::from_label("A2").unwrap();
        assert_eq!(a2.enumerate_cone(2).len(), 6);
        let a1 = RootSystem::from_label("A1").unwrap();
        let c = a1.enumerate_cone(3);
        assert_eq!(c.iter().map(|p| p.coords[0]).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let bc1 = RootSystem::from_label("BC1").unwrap();
        assert_eq!(bc1.enumerate_cone(2).len(), 3);
    }

    #[test]
    fn rho_bc1() {
        let bc1 = RootSystem::from_label("BC1").unwrap();
        let rho = bc1.rho_weighted_exact(&[q(3, 1), q(5, 1)]);
        assert_eq!(rho, vec![q(3, 2) + qi(5)]);
    }

    #[test]
    fn validation_examples() {
        let g2 = RootSystem::from_label("G2").unwrap();
        assert!(validate_root_system(g2.roots(), g2.gram(), Some(2)).valid());
        let mut v: Vec<Vec<Q>> = Vec::new();
        for i in 0..12 {
            v.push(g2.root(i).to_vec());
            if g2.orbit_of(i) == 0 {
                v.push(scale(qi(2), g2.root(i)));
            }
        }
        let rep = validate_root_system(&v, g2.gram(), Some(2));
        assert!(!rep.crystallographic);
        let col: Vec<Vec<Q>> = [1, -1, 2, -2, 4, -4].iter().map(|&c| vec![qi(c)]).collect();
        let rep = validate_root_system(&col, &identity_gram(1), Some(1));
        assert!(!rep.valid());
        assert!(!rep.proportionality);
    }

    #[test]
    fn parse_multiplicity() {
        let bc1 = RootSystem::from_label("BC1").unwrap();
        let k = Multiplicity::parse(&bc1, "short=2,double=0.5").unwrap();
        assert_eq!(k.values, vec![2.0, 0.5]);
        assert_eq!(k.exact.unwrap(), vec![qi(2), q(1, 2)]);
        let k = Multiplicity::parse(&bc1, "2,0.5").unwrap();
        assert_eq!(k.values, vec![2.0, 0.5]);
        let k = Multiplicity::parse(&bc1, "1").unwrap();
        assert_eq!(k.values, vec![1.0, 1.0]);
        assert!(Multiplicity::parse(&bc1, "1,2,3").is_err());
        assert_eq!(parse_q("-0.25").unwrap(), q(-1, 4));
    }

    #[test]
    fn chamber_map_examples() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let h0 = a1.h_from_simple_values(&[-0.7]);
        let (w, h) = a1.chamber_map(&h0);
        assert!(w.is_identity());
        assert_eq!(h, h0);
        let minus: Vec<f64> = h0.iter().map(|x| -x).collect();
        let (w, h) = a1.chamber_map(&minus);
        assert!(!w.is_identity());
        for (a, b) in h.iter().zip(&h0) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn custom_system() {
        let spec: RootSystemSpec = serde_json::from_str(r#"{"custom":{"roots":[["1"],["-1"]],"gram":[["2"]]}}"#).unwrap();
        let rs = RootSystem::from_spec(&spec).unwrap();
        assert_eq!(rs.roots().len(), 2);
        let bad: RootSystemSpec = serde_json::from_str(r#"{"custom":{"roots":[["1"],["-1"],["3"],["-3"]]}}"#).unwrap();
        assert!(RootSystem::from_spec(&bad).is_err());
        let fam: RootSystemSpec = serde_json::from_str(r#"{"family":"BC","rank":2}"#).unwrap();
        assert_eq!(RootSystem::from_spec(&fam).unwrap().roots().len(), 12);
    }
}
