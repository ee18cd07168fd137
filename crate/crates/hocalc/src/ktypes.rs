//! Small K-type catalog and the exact matching-condition solver.
//!
//! Given restricted roots Σ with multiplicities m and the K-type datum κ ≤ 0,
//! find (Σ^π, k^π) with Σ^π ⊂ Σ ∪ 2Σ such that for every α ∈ Σ ∪ 2Σ
//!
//!   −m_ακ_α + ½m_{α/2}(1 − ½m_{α/2} − m_α + 2κ_{α/2}) = k_α(1 − k_α − 2k_{2α})
//!   (m_α + m_{2α})/2 = k_α + k_{2α} + k_{4α}          (α ∈ Σ∖2Σ)
//!
//! with m, κ zero off Σ and k zero off Σ^π. Arithmetic is exact in ℚ(√D).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hyperfun::{cosh_factor, CoshFactor, SphericalData};
use crate::rootsys::{fmt_vec, identity_gram, parse_q, primitive_direction, q, q_to_f64, qi, validate_root_system, Multiplicity, RootSystem, ValidationReport, Q};

/// a + b√d with d a fixed non-square rational (d is 0 when b = 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surd {
    pub a: Q,
    pub b: Q,
    pub d: Q,
}

fn is_square_i64(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

/// Exact square root in ℚ, if any.
pub fn rational_sqrt(x: Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    Some(Q::new(is_square_i64(*x.numer())?, is_square_i64(*x.denom())?))
}

impl Surd {
    pub fn rational(a: Q) -> Self {
        Surd { a, b: Q::zero(), d: Q::zero() }
    }

    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    fn norm(mut self) -> Self {
        if self.b.is_zero() {
            self.d = Q::zero();
        }
        self
    }

    /// √x; `None` for x < 0.
    pub fn sqrt(x: Q) -> Option<Self> {
        if x.is_negative() {
            return None;
        }
        Some(match rational_sqrt(x) {
            Some(r) => Self::rational(r),
            None => Surd { a: Q::zero(), b: Q::one(), d: x },
        })
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<Q> {
        self.is_rational().then_some(self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.a) + q_to_f64(&self.b) * q_to_f64(&self.d).sqrt()
    }

    fn radicand(&self, o: &Surd) -> Option<Q> {
        match (self.b.is_zero(), o.b.is_zero()) {
            (true, true) => Some(Q::zero()),
            (false, true) => Some(self.d),
            (true, false) => Some(o.d),
            (false, false) => (self.d == o.d).then_some(self.d),
        }
    }

    pub fn add(&self, o: &Surd) -> Option<Surd> {
        let d = self.radicand(o)?;
        Some(Surd { a: self.a + o.a, b: self.b + o.b, d }.norm())
    }

    pub fn sub(&self, o: &Surd) -> Option<Surd> {
        self.add(&o.scale(-Q::one()))
    }

    pub fn mul(&self, o: &Surd) -> Option<Surd> {
        let d = self.radicand(o)?;
        Some(Surd { a: self.a * o.a + self.b * o.b * d, b: self.a * o.b + self.b * o.a, d }.norm())
    }

    pub fn scale(&self, c: Q) -> Surd {
        Surd { a: self.a * c, b: self.b * c, d: self.d }.norm()
    }

    pub fn add_q(&self, c: Q) -> Surd {
        Surd { a: self.a + c, ..self.clone() }
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Outcome of the exact checks for one candidate (Σ^π, k^π).
#[derive(Clone, Debug, Serialize)]
pub struct MatchingReport {
    pub mc1: bool,
    pub real: bool,
    pub root_system: ValidationReport,
    pub weyl_equal: bool,
    pub matching_ok: bool,
    pub regularity_ok: bool,
    pub violations: Vec<String>,
}

impl MatchingReport {
    pub fn valid(&self) -> bool {
        self.mc1 && self.real && self.root_system.valid() && self.weyl_equal && self.matching_ok && self.regularity_ok
    }

    /// First reason the candidate fails, if any.
    pub fn failure_reason(&self) -> Option<String> {
        if !self.real {
            return Some("negative discriminant: k would not be real".into());
        }
        if !self.mc1 {
            return Some("Sigma^pi is not contained in Sigma union 2 Sigma".into());
        }
        if !self.root_system.valid() {
            return Some(format!("not a root system: {}", self.root_system.details.first().cloned().unwrap_or_default()));
        }
        if !self.weyl_equal {
            return Some("Weyl group of Sigma^pi differs from W".into());
        }
        if !self.matching_ok || !self.regularity_ok {
            return Some(self.violations.first().cloned().unwrap_or_default());
        }
        None
    }
}

/// A candidate (Σ^π, k^π) with its provenance and validity.
#[derive(Clone, Debug)]
pub struct MatchedPair {
    /// Every vector of Σ^π with its k value, sorted by vector.
    pub assignment: Vec<(Vec<Q>, Surd)>,
    pub sigma_pi: Option<RootSystem>,
    /// k^π per orbit of `sigma_pi` (when valid).
    pub k_pi: Option<Multiplicity>,
    pub branch_tags: Vec<String>,
    pub valid: bool,
    pub failure_reason: Option<String>,
    pub irrational: bool,
    pub report: MatchingReport,
}

impl MatchedPair {
    /// Same Σ^π with the same k^π.
    pub fn same_as(&self, other: &MatchedPair) -> bool {
        self.assignment == other.assignment
    }

    /// Exact rational k^π per orbit of Σ^π.
    pub fn k_exact(&self) -> Option<Vec<Q>> {
        self.k_pi.as_ref().and_then(|k| k.exact.clone())
    }

    pub fn vectors(&self) -> Vec<Vec<Q>> {
        self.assignment.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn k_at(&self, v: &[Q]) -> Option<&Surd> {
        self.assignment.iter().find(|(w, _)| w.as_slice() == v).map(|(_, k)| k)
    }

    pub fn to_json(&self) -> Value {
        let positive: Vec<Value> = match &self.sigma_pi {
            Some(rs) => rs
                .positive()
                .iter()
                .map(|&i| json!({"root": fmt_vec(rs.root(i)), "k": self.k_at(rs.root(i)).map(|s| s.to_string())}))
                .collect(),
            None => self
                .assignment
                .iter()
                .filter(|(v, _)| v.iter().find(|x| !x.is_zero()).map(|x| x.is_positive()).unwrap_or(false))
                .map(|(v, k)| json!({"root": fmt_vec(v), "k": k.to_string()}))
                .collect(),
        };
        let orbits: Vec<Value> = match (&self.sigma_pi, &self.k_pi) {
            (Some(rs), Some(_)) => rs
                .orbits()
                .iter()
                .map(|o| {
                    let rep = rs.root(o.members[0]);
                    let rep = o.members.iter().map(|&i| rs.root(i)).find(|r| rs.index_of(r).map(|i| rs.is_positive(i)).unwrap_or(false)).unwrap_or(rep);
                    json!({"label": o.label, "representative": fmt_vec(rep), "k": self.k_at(rep).map(|s| s.to_string()), "size": o.members.len()})
                })
                .collect(),
            _ => Vec::new(),
        };
        json!({
            "sigma_pi": {"label": self.sigma_pi.as_ref().map(|r| r.label().to_string()), "positive": positive, "orbits": orbits},
            "branch_tags": self.branch_tags,
            "valid": self.valid,
            "failure_reason": self.failure_reason,
            "irrational": self.irrational,
            "report": self.report,
        })
    }
}

fn times(v: &[Q], c: i64) -> Vec<Q> {
    v.iter().map(|x| x * qi(c)).collect()
}

/// Σ ∪ 2Σ in a fixed order.
pub fn sigma_union_double(sigma: &RootSystem) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = sigma.roots().to_vec();
    let mut seen: HashSet<Vec<Q>> = out.iter().cloned().collect();
    for r in sigma.roots() {
        let d = times(r, 2);
        if seen.insert(d.clone()) {
            out.push(d);
        }
    }
    out
}

fn on(sigma: &RootSystem, vals: &[Q], v: &[Q]) -> Q {
    sigma.index_of(v).map(|i| vals[sigma.orbit_of(i)]).unwrap_or_else(Q::zero)
}

/// Exact check of MC1, the root-system axioms, W(Σ^π) = W and both
/// equation families over Σ ∪ 2Σ.
pub fn verify_assignment(sigma: &RootSystem, m: &[Q], kappa: &[Q], assignment: &[(Vec<Q>, Surd)]) -> MatchingReport {
    let ext = sigma_union_double(sigma);
    let ext_set: HashSet<&Vec<Q>> = ext.iter().collect();
    let kmap: HashMap<&Vec<Q>, &Surd> = assignment.iter().map(|(v, k)| (v, k)).collect();
    let vectors: Vec<Vec<Q>> = assignment.iter().map(|(v, _)| v.clone()).collect();
    let mut violations = Vec::new();
    let mc1 = vectors.iter().all(|v| ext_set.contains(v));
    if !mc1 {
        violations.push("MC1: some vector of Sigma^pi is outside Sigma union 2 Sigma".into());
    }
    let root_system = if vectors.is_empty() {
        ValidationReport { crystallographic: true, reflection_closed: true, spans: false, proportionality: true, details: vec!["Sigma^pi is empty".into()] }
    } else {
        validate_root_system(&vectors, sigma.gram(), Some(sigma.rank()))
    };
    let dirs: HashSet<Vec<Q>> = vectors.iter().map(|v| primitive_direction(v)).collect();
    let weyl_equal = dirs == sigma.reflection_directions();
    let zero = Surd::zero();
    let k_of = |v: &Vec<Q>| -> Surd { kmap.get(v).map(|s| (*s).clone()).unwrap_or_else(|| zero.clone()) };
    let mut matching_ok = true;
    for v in &ext {
        let half: Vec<Q> = v.iter().map(|x| x / qi(2)).collect();
        let ma = on(sigma, m, v);
        let ka_ = on(sigma, kappa, v);
        let mh = on(sigma, m, &half);
        let kh = on(sigma, kappa, &half);
        let lhs = -ma * ka_ + q(1, 2) * mh * (Q::one() - q(1, 2) * mh - ma + qi(2) * kh);
        let k1 = k_of(v);
        let k2 = k_of(&times(v, 2));
        let rhs = Surd::rational(Q::one()).sub(&k1).and_then(|t| t.sub(&k2.scale(qi(2)))).and_then(|t| k1.mul(&t));
        match rhs {
            Some(r) if r == Surd::rational(lhs) => {}
            Some(r) => {
                matching_ok = false;
                violations.push(format!("matching equation at {}: lhs = {} but k(1-k-2k_2) = {}", fmt_vec(v), lhs, r));
            }
            None => {
                matching_ok = false;
                violations.push(format!("matching equation at {}: incompatible radicands", fmt_vec(v)));
            }
        }
    }
    let mut regularity_ok = true;
    for r in sigma.roots() {
        let half: Vec<Q> = r.iter().map(|x| x / qi(2)).collect();
        if sigma.index_of(&half).is_some() {
            continue;
        }
        let lhs = (on(sigma, m, r) + on(sigma, m, &times(r, 2))) / qi(2);
        let s = k_of(r).add(&k_of(&times(r, 2))).and_then(|t| t.add(&k_of(&times(r, 4))));
        if s != Some(Surd::rational(lhs)) {
            regularity_ok = false;
            violations.push(format!(
                "regularity equation at {}: (m_a+m_2a)/2 = {} but k_a+k_2a+k_4a = {}",
                fmt_vec(r),
                lhs,
                s.map(|x| x.to_string()).unwrap_or_else(|| "?".into())
            ));
        }
    }
    MatchingReport { mc1, real: true, root_system, weyl_equal, matching_ok, regularity_ok, violations }
}

/// Check a given (Σ^π, k^π) against (Σ, m, κ).
pub fn verify_matching(sigma: &RootSystem, m: &[Q], kappa: &[Q], sigma_pi: &RootSystem, k_pi: &[Q]) -> MatchingReport {
    let assignment: Vec<(Vec<Q>, Surd)> = sigma_pi
        .roots()
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Surd::rational(k_pi[sigma_pi.orbit_of(i)])))
        .collect();
    verify_assignment(sigma, m, kappa, &assignment)
}

/// Assemble a [`MatchedPair`] from an explicit assignment.
pub fn assess(sigma: &RootSystem, m: &[Q], kappa: &[Q], mut assignment: Vec<(Vec<Q>, Surd)>, branch_tags: Vec<String>) -> MatchedPair {
    assignment.sort();
    let report = verify_assignment(sigma, m, kappa, &assignment);
    let irrational = assignment.iter().any(|(_, k)| !k.is_rational());
    let mut valid = report.valid();
    let mut failure_reason = report.failure_reason();
    let mut sigma_pi = None;
    let mut k_pi = None;
    if valid {
        let chamber: Vec<Q> = {
            let mut c = vec![Q::zero(); sigma.ambient_dim()];
            for &p in sigma.positive() {
                for (x, y) in c.iter_mut().zip(sigma.root(p)) {
                    *x += y;
                }
            }
            c
        };
        match RootSystem::from_vectors(assignment.iter().map(|(v, _)| v.clone()).collect(), sigma.gram().to_vec(), Some(chamber), "Sigma^pi") {
            Ok(rs) => {
                let kmap: HashMap<&Vec<Q>, &Surd> = assignment.iter().map(|(v, k)| (v, k)).collect();
                let per: Vec<Surd> = rs.orbits().iter().map(|o| kmap[&rs.root(o.members[0]).to_vec()].clone()).collect();
                let consistent = rs.roots().iter().enumerate().all(|(i, v)| *kmap[v] == per[rs.orbit_of(i)]);
                if !consistent {
                    valid = false;
                    failure_reason = Some("k^pi is not constant on W-orbits".into());
                } else {
                    let values: Vec<f64> = per.iter().map(|s| s.to_f64()).collect();
                    let exact: Option<Vec<Q>> = per.iter().map(|s| s.as_rational()).collect();
                    k_pi = Some(Multiplicity { values, exact });
                    sigma_pi = Some(rs);
                }
            }
            Err(e) => {
                valid = false;
                failure_reason = Some(e.to_string());
            }
        }
    }
    MatchedPair { assignment, sigma_pi, k_pi, branch_tags, valid, failure_reason, irrational, report }
}

#[derive(Clone, Debug)]
struct BranchOption {
    k: [Option<Surd>; 3],
    tag: String,
}

/// Per-representative branch values (k_α, k_{2α}, k_{4α}).
fn branch_options(m1: Q, k1: Q, second: Option<(Q, Q)>) -> Vec<BranchOption> {
    let half = q(1, 2);
    let mut out: Vec<BranchOption> = Vec::new();
    match second {
        None => {
            let disc = (m1 - Q::one()) * (m1 - Q::one()) - qi(4) * m1 * k1;
            match Surd::sqrt(disc) {
                None => out.push(BranchOption { k: [None, None, None], tag: "b1:complex".into() }),
                Some(s) => {
                    for (sign, t) in [(Q::one(), "+"), (-Q::one(), "-")] {
                        let ka = s.scale(sign * half).add_q((m1 - Q::one()) * half);
                        let k2 = s.scale(-sign * half).add_q(half);
                        out.push(BranchOption { k: [Some(ka), Some(k2), Some(Surd::zero())], tag: format!("b1{t}") });
                    }
                }
            }
        }
        Some((m2, kap2)) => {
            let disc = (m2 - Q::one()) * (m2 - Q::one()) - qi(4) * m2 * kap2;
            match Surd::sqrt(disc) {
                None => out.push(BranchOption { k: [None, None, None], tag: "b2:complex".into() }),
                Some(s) => {
                    for (sign, t) in [(Q::one(), "+"), (-Q::one(), "-")] {
                        let k2 = s.scale(sign * half).add_q((m1 + m2 - Q::one()) * half);
                        let k4 = s.scale(-sign * half).add_q(half);
                        out.push(BranchOption { k: [Some(Surd::zero()), Some(k2), Some(k4)], tag: format!("b2{t}") });
                    }
                }
            }
            if kap2 == m2 / qi(4) - half {
                out.push(BranchOption {
                    k: [Some(Surd::rational(m1 + m2 - Q::one())), Some(Surd::rational(Q::one() - (m1 + m2) / qi(2))), Some(Surd::zero())],
                    tag: "b2special".into(),
                });
            }
        }
    }
    let mut seen = HashSet::new();
    out.retain(|o| seen.insert(format!("{:?}", o.k)));
    out
}

/// Enumerate every branch/sign combination and zero-extension; valid and
/// invalid minimal candidates are all returned, zero-extensions only when valid.
pub fn solve_matching(sigma: &RootSystem, m: &[Q], kappa: &[Q]) -> Vec<MatchedPair> {
    let ext: HashSet<Vec<Q>> = sigma_union_double(sigma).into_iter().collect();
    let reps: Vec<usize> = (0..sigma.orbits().len()).filter(|&o| !sigma.orbits()[o].is_double).collect();
    let options: Vec<Vec<BranchOption>> = reps
        .iter()
        .map(|&o| {
            let a = sigma.orbits()[o].members[0];
            let second = sigma.double_of(a).map(|d| {
                let od = sigma.orbit_of(d);
                (m[od], kappa[od])
            });
            branch_options(m[o], kappa[o], second)
        })
        .collect();
    let mut out = Vec::new();
    let mut combo = vec![0usize; reps.len()];
    loop {
        let mut assignment: Vec<(Vec<Q>, Surd)> = Vec::new();
        let mut zero_slots: Vec<Vec<Vec<Q>>> = Vec::new();
        let mut tags = Vec::new();
        let mut real = true;
        for (ri, &o) in reps.iter().enumerate() {
            let opt = &options[ri][combo[ri]];
            tags.push(format!("{}:{}", sigma.orbits()[o].label, opt.tag));
            if opt.k[0].is_none() {
                real = false;
                continue;
            }
            for (lvl, mult) in [1i64, 2, 4].iter().enumerate() {
                let k = opt.k[lvl].clone().unwrap();
                let vs: Vec<Vec<Q>> = sigma.orbits()[o].members.iter().map(|&i| times(sigma.root(i), *mult)).filter(|v| ext.contains(v)).collect();
                if vs.is_empty() {
                    continue;
                }
                if k.is_zero() {
                    zero_slots.push(vs);
                } else {
                    assignment.extend(vs.into_iter().map(|v| (v, k.clone())));
                }
            }
        }
        if !real {
            let mut p = assess(sigma, m, kappa, Vec::new(), tags);
            p.report.real = false;
            p.valid = false;
            p.failure_reason = p.report.failure_reason();
            out.push(p);
        } else {
            out.push(assess(sigma, m, kappa, assignment.clone(), tags.clone()));
            let z = zero_slots.len().min(10);
            for mask in 1u32..(1u32 << z) {
                let mut a = assignment.clone();
                let mut t = tags.clone();
                for (i, slot) in zero_slots.iter().enumerate().take(z) {
                    if mask >> i & 1 == 1 {
                        a.extend(slot.iter().map(|v| (v.clone(), Surd::zero())));
                        t.push(format!("zero-extended:{}", fmt_vec(&primitive_direction(&slot[0])).replace(',', " ")));
                    }
                }
                let p = assess(sigma, m, kappa, a, t);
                if p.valid {
                    out.push(p);
                }
            }
        }
        // next combination
        let mut i = 0;
        loop {
            if i == combo.len() {
                return dedupe(out);
            }
            combo[i] += 1;
            if combo[i] < options[i].len() {
                break;
            }
            combo[i] = 0;
            i += 1;
        }
    }
}

fn dedupe(pairs: Vec<MatchedPair>) -> Vec<MatchedPair> {
    let mut out: Vec<MatchedPair> = Vec::new();
    for p in pairs {
        if p.valid {
            if let Some(q) = out.iter_mut().find(|q| q.valid && q.same_as(&p)) {
                for t in p.branch_tags {
                    if !q.branch_tags.contains(&t) {
                        q.branch_tags.push(t);
                    }
                }
                continue;
            }
        }
        out.push(p);
    }
    out
}

// ---------------------------------------------------------------- catalog

/// One small K-type with its group data and matched pairs.
#[derive(Clone, Debug)]
pub struct SmallKTypeRecord {
    pub group_label: String,
    pub parameters: BTreeMap<String, String>,
    pub ktype_name: String,
    pub sigma: RootSystem,
    /// per orbit of `sigma`
    pub m: Vec<Q>,
    pub kappa: Vec<Q>,
    pub matched: Vec<MatchedPair>,
    pub cosh_factor_spec: Vec<String>,
    pub source: String,
    pub note: Option<String>,
}

impl SmallKTypeRecord {
    /// First valid matched pair.
    pub fn pair(&self) -> Result<&MatchedPair> {
        self.matched.iter().find(|p| p.valid).ok_or(Error::NoMatchedPair)
    }

    pub fn spherical_data<'a>(&'a self, pair: &'a MatchedPair, k: &'a [Q]) -> Result<SphericalData<'a>> {
        let sigma_pi = pair.sigma_pi.as_ref().ok_or(Error::NoMatchedPair)?;
        Ok(SphericalData { sigma: &self.sigma, m: &self.m, kappa: &self.kappa, sigma_pi, k_pi: k })
    }

    pub fn is_trivial(&self) -> bool {
        self.kappa.iter().all(|x| x.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let orbits: Vec<Value> = self
            .sigma
            .orbits()
            .iter()
            .enumerate()
            .map(|(i, o)| json!({"label": o.label, "m": self.m[i].to_string(), "kappa": self.kappa[i].to_string(), "size": o.members.len()}))
            .collect();
        json!({
            "group": self.group_label,
            "parameters": self.parameters,
            "ktype": self.ktype_name,
            "sigma": {"label": self.sigma.label(), "rank": self.sigma.rank(), "orbits": orbits},
            "matched": self.matched.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
            "cosh_factor": self.cosh_factor_spec,
            "source": self.source,
            "note": self.note,
        })
    }
}

/// Catalog filter; unset fields use default sweeps.
#[derive(Clone, Debug, Default)]
pub struct CatalogFilter {
    pub family: Option<String>,
    pub p: Option<i64>,
    pub q: Option<i64>,
    pub r: Option<i64>,
    pub s: Option<i64>,
    pub n: Option<i64>,
    pub nu: Option<Q>,
}

fn one_dim(vs: &[i64]) -> RootSystem {
    let roots: Vec<Vec<Q>> = vs.iter().flat_map(|&v| [vec![qi(v)], vec![qi(-v)]]).collect();
    let label = match vs {
        [1] => "A1",
        [2] => "A1(2e)",
        _ => "BC1",
    };
    RootSystem::from_vectors(roots, identity_gram(1), None, label).expect("rank one system")
}

/// Shape of a root in standard coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    /// ±e_i
    E,
    /// ±2e_i
    TwoE,
    /// ±e_i±e_j and everything else
    Mixed,
}

fn shape(v: &[Q]) -> Shape {
    let nz: Vec<&Q> = v.iter().filter(|x| !x.is_zero()).collect();
    if nz.len() == 1 {
        if nz[0].abs() == qi(2) {
            return Shape::TwoE;
        }
        if nz[0].abs() == qi(1) {
            return Shape::E;
        }
    }
    Shape::Mixed
}

/// Per-orbit values from a function of a representative root.
fn per_orbit(rs: &RootSystem, f: impl Fn(&[Q]) -> Q) -> Vec<Q> {
    rs.orbits().iter().map(|o| f(rs.root(o.members[0]))).collect()
}

fn c_type(n: usize) -> RootSystem {
    if n == 1 {
        one_dim(&[2])
    } else {
        RootSystem::build("C", n).expect("C_n")
    }
}

fn bc_type(n: usize) -> RootSystem {
    if n == 1 {
        one_dim(&[1, 2])
    } else {
        RootSystem::build("BC", n).expect("BC_n")
    }
}

/// Catalog pair from a rule on Σ ∪ 2Σ: `Some(k)` includes the vector.
fn catalog_pair(sigma: &RootSystem, m: &[Q], kappa: &[Q], tag: &str, rule: impl Fn(&[Q]) -> Option<Q>) -> MatchedPair {
    let assignment: Vec<(Vec<Q>, Surd)> = sigma_union_double(sigma).into_iter().filter_map(|v| rule(&v).map(|k| (v, Surd::rational(k)))).collect();
    assess(sigma, m, kappa, assignment, vec![tag.to_string()])
}

/// Trivial K-type: Σ^π = 2Σ, k^π_{2α} = m_α/2.
fn trivial_pair(sigma: &RootSystem, m: &[Q]) -> MatchedPair {
    let kappa = vec![Q::zero(); m.len()];
    catalog_pair(sigma, m, &kappa, "trivial", |v| {
        let half: Vec<Q> = v.iter().map(|x| x / qi(2)).collect();
        sigma.index_of(&half).map(|i| m[sigma.orbit_of(i)] / qi(2))
    })
}

struct Builder {
    out: Vec<SmallKTypeRecord>,
}

impl Builder {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, group: &str, params: &[(&str, String)], name: &str, sigma: RootSystem, m: Vec<Q>, kappa: Vec<Q>, matched: Vec<MatchedPair>, source: &str, note: Option<String>) {
        let cosh_factor_spec = matched
            .iter()
            .map(|p| match (&p.sigma_pi, p.k_exact()) {
                (Some(pi), Some(k)) => cosh_factor(&sigma, &m, pi, &k).map(|c: CoshFactor| c.to_string()).unwrap_or_else(|e| e.to_string()),
                _ => "n/a".into(),
            })
            .collect();
        self.out.push(SmallKTypeRecord {
            group_label: group.to_string(),
            parameters: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            ktype_name: name.to_string(),
            sigma,
            m,
            kappa,
            matched,
            cosh_factor_spec,
            source: source.to_string(),
            note,
        });
    }

    fn trivial(&mut self, group: &str, params: &[(&str, String)], sigma: RootSystem, m: Vec<Q>) {
        let kappa = vec![Q::zero(); m.len()];
        let pair = trivial_pair(&sigma, &m);
        self.push(group, params, "trivial", sigma, m, kappa, vec![pair], "trivial K-type: Sigma^pi = 2 Sigma, k = m/2", None);
    }
}

fn range_or(v: Option<i64>, lo: i64, hi: i64) -> Vec<i64> {
    match v {
        Some(x) => vec![x],
        None => (lo..=hi).collect(),
    }
}

fn family_matches(filter: &Option<String>, keys: &[&str]) -> bool {
    match filter {
        None => true,
        Some(f) => {
            let f = f.to_ascii_lowercase().replace(' ', "");
            keys.iter().any(|k| {
                let k = k.to_ascii_lowercase();
                k == f || k.starts_with(&f) || k.split(':').any(|part| part == f || part.starts_with(&f))
            })
        }
    }
}

const FAMILIES: &[&str] = &["sp(p,1)", "so(2r,1)", "so(p,q)", "hermitian", "f4-family", "split", "g2", "complex", "trivial-only"];

/// Generate catalog records matching `filter`.
pub fn catalog(filter: &CatalogFilter) -> Result<Vec<SmallKTypeRecord>> {
    if let Some(f) = &filter.family {
        let head = f.split(':').next().unwrap_or_default().to_string();
        let known = FAMILIES.iter().any(|k| family_matches(&Some(f.clone()), &[k]) || family_matches(&Some(head.clone()), &[k]))
            || ["sp", "so", "su", "so*", "e6", "e7", "e8", "f4", "sl", "a", "d", "e"].contains(&f.to_ascii_lowercase().as_str());
        if !known {
            return Err(Error::UnknownCatalogFamily(f.clone()));
        }
    }
    let mut b = Builder { out: Vec::new() };
    let fam = &filter.family;
    let (qf, rf, sf, nf) = (filter.q, filter.r, filter.s, filter.n);

    // sp(p,1), π_n: κ_long = −(n²−1)/3
    if family_matches(fam, &["sp(p,1)", "sp"]) && qf.map(|x| x == 1).unwrap_or(true) && rf.is_none() && sf.is_none() {
        for p in range_or(filter.p, 1, 3) {
            if p < 1 {
                return Err(Error::ParameterOutOfRange(format!("sp(p,1) needs p >= 1, got {p}")));
            }
            for n in range_or(nf, 1, 4) {
                if n < 1 {
                    return Err(Error::ParameterOutOfRange(format!("sp(p,1) needs n >= 1, got {n}")));
                }
                let sigma = if p == 1 { one_dim(&[2]) } else { one_dim(&[1, 2]) };
                let m = per_orbit(&sigma, |v| if shape(v) == Shape::TwoE { qi(3) } else { qi(4 * (p - 1)) });
                let kl = -(qi(n * n) - Q::one()) / qi(3);
                let kappa = per_orbit(&sigma, |v| if shape(v) == Shape::TwoE { kl } else { Q::zero() });
                let mut pairs = Vec::new();
                for (sg, t) in [(1, "+"), (-1, "-")] {
                    pairs.push(catalog_pair(&sigma, &m, &kappa, &format!("sp(p,1) {t}"), |v| match v[0].abs().to_integer() {
                        2 => Some(qi(2 * p - 1 + sg * n)),
                        4 => Some(q(1, 2) - qi(sg * n)),
                        _ => None,
                    }));
                }
                let name = if n == 1 { "pi_1 (trivial)".to_string() } else { format!("pi_{n}") };
                b.push("sp(p,1)", &[("p", p.to_string()), ("n", n.to_string())], &name, sigma, m, kappa, pairs, "sp(p,1) family: kappa_long = -(n^2-1)/3", None);
            }
        }
    }

    // so(2r,1), π_s^±: κ = −s(s+2r−2)/(2r−1)
    if family_matches(fam, &["so(2r,1)", "so"]) && qf.map(|x| x == 1).unwrap_or(true) && filter.n.is_none() && filter.nu.is_none() {
        let rs_ = match (rf, filter.p) {
            (Some(r), _) => vec![r],
            (None, Some(p)) if p % 2 == 0 => vec![p / 2],
            (None, Some(_)) => vec![],
            (None, None) => (2..=3).collect(),
        };
        for r in rs_ {
            if r < 2 {
                return Err(Error::ParameterOutOfRange(format!("so(2r,1) needs r >= 2, got {r}")));
            }
            for s in range_or(sf, 0, 3) {
                if s < 0 {
                    return Err(Error::ParameterOutOfRange(format!("so(2r,1) needs s >= 0, got {s}")));
                }
                let sigma = one_dim(&[1]);
                let m = vec![qi(2 * r - 1)];
                let params = [("r", r.to_string()), ("s", s.to_string())];
                if s == 0 {
                    b.trivial("so(2r,1)", &params, sigma, m);
                    continue;
                }
                let kappa = vec![-qi(s * (s + 2 * r - 2)) / qi(2 * r - 1)];
                for sign in ["+", "-"] {
                    let pair = catalog_pair(&sigma, &m, &kappa, "so(2r,1)", |v| match v[0].abs().to_integer() {
                        1 => Some(qi(-s)),
                        2 => Some(qi(r + s) - q(1, 2)),
                        _ => None,
                    });
                    b.push("so(2r,1)", &params, &format!("pi_{s}^{sign}"), sigma.clone(), m.clone(), kappa.clone(), vec![pair], "so(2r,1) family: highest weight (s/2,...,s/2,+-s/2)", None);
                }
            }
        }
    }

    // so(p,q), p > q ≥ 3: Σ = B_q, m = (p−q, 1)
    if family_matches(fam, &["so(p,q)", "so"]) && rf.is_none() && sf.is_none() && nf.is_none() && filter.nu.is_none() {
        let pairs_pq: Vec<(i64, i64)> = match (filter.p, qf) {
            (Some(p), Some(qq)) => vec![(p, qq)],
            (Some(p), None) => (3..p).map(|qq| (p, qq)).collect(),
            (None, Some(qq)) => ((qq + 1)..=(qq + 3)).map(|p| (p, qq)).collect(),
            (None, None) => vec![(5, 3), (6, 3), (7, 3)],
        };
        for (p, qq) in pairs_pq {
            if !(p > qq && qq >= 3) {
                if filter.p.is_some() && qf.is_some() && family_matches(fam, &["so(p,q)"]) && fam.is_some() {
                    return Err(Error::ParameterOutOfRange(format!("so(p,q) needs p > q >= 3, got ({p},{qq})")));
                }
                continue;
            }
            let sigma = RootSystem::build("B", qq as usize)?;
            let m = per_orbit(&sigma, |v| if shape(v) == Shape::E { qi(p - qq) } else { qi(1) });
            let params = [("p", p.to_string()), ("q", qq.to_string())];
            b.trivial("so(p,q)", &params, sigma.clone(), m.clone());
            let kappa = per_orbit(&sigma, |v| if shape(v) == Shape::E { Q::zero() } else { q(-1, 4) });
            let pair = catalog_pair(&sigma, &m, &kappa, "so(p,q) (i)", |v| match shape(v) {
                Shape::TwoE => Some(qi(p - qq) / qi(2)),
                Shape::Mixed => sigma.index_of(v).map(|_| q(1, 2)),
                Shape::E => None,
            });
            b.push("so(p,q)", &params, "spin (i)", sigma.clone(), m.clone(), kappa, vec![pair], "so(p,q) family, case (i): kappa = (0, -1/4)", None);
            if p % 2 == 0 && qq % 2 == 1 {
                let kappa = per_orbit(&sigma, |v| if shape(v) == Shape::E { -Q::one() } else { q(-1, 4) });
                let pair = catalog_pair(&sigma, &m, &kappa, "so(p,q) (ii)", |v| match shape(v) {
                    Shape::E => Some(qi(p - qq)),
                    Shape::TwoE => Some(-qi(p - qq) / qi(2)),
                    Shape::Mixed => sigma.index_of(v).map(|_| q(1, 2)),
                });
                b.push("so(p,q)", &params, "half-spin (ii)", sigma, m, kappa, vec![pair], "so(p,q) family, case (ii): kappa = (-1, -1/4)", None);
            }
        }
    }

    // Hermitian: κ_long = −ν²
    if family_matches(fam, &["hermitian", "hermitian:su(p,q)", "hermitian:sp(n,r)", "hermitian:so*(2n)", "hermitian:so(p,2)", "hermitian:e6(-14)", "hermitian:e7(-25)", "su", "so*"]) && rf.is_none() && sf.is_none() {
        let nus: Vec<Q> = match filter.nu {
            Some(v) => vec![v],
            None => vec![q(1, 2), q(-1, 2), qi(1), qi(-1)],
        };
        // (label, params, sigma, m by shape (E, Mixed, TwoE))
        let mut groups: Vec<(String, Vec<(&str, String)>, RootSystem, [i64; 3])> = Vec::new();
        let want = |name: &str| family_matches(fam, &["hermitian", name]) || fam.as_deref().map(|f| f.eq_ignore_ascii_case("hermitian")).unwrap_or(true);
        if want("hermitian:su(p,q)") || family_matches(fam, &["su"]) {
            let list: Vec<(i64, i64)> = match (filter.p, qf) {
                (Some(p), Some(qq)) => vec![(p, qq)],
                _ => vec![(2, 1), (3, 1), (2, 2), (3, 2)],
            };
            for (p, qq) in list {
                if !(p >= qq && qq >= 1) {
                    return Err(Error::ParameterOutOfRange(format!("su(p,q) needs p >= q >= 1, got ({p},{qq})")));
                }
                let sigma = if p == qq { c_type(qq as usize) } else { bc_type(qq as usize) };
                groups.push(("hermitian:su(p,q)".into(), vec![("p", p.to_string()), ("q", qq.to_string())], sigma, [2 * (p - qq), 2, 1]));
            }
        }
        if (want("hermitian:sp(n,r)")) && filter.p.is_none() && qf.is_none() {
            for n in range_or(nf, 2, 3) {
                if n < 1 {
                    return Err(Error::ParameterOutOfRange(format!("sp(n,R) needs n >= 1, got {n}")));
                }
                groups.push(("hermitian:sp(n,R)".into(), vec![("n", n.to_string())], c_type(n as usize), [0, 1, 1]));
            }
        }
        if (want("hermitian:so*(2n)") || family_matches(fam, &["so*"])) && filter.p.is_none() && qf.is_none() {
            for n in range_or(nf, 4, 6) {
                if n < 4 {
                    return Err(Error::ParameterOutOfRange(format!("so*(2n) needs n >= 4, got {n}")));
                }
                let sigma = if n % 2 == 0 { c_type((n / 2) as usize) } else { bc_type((n / 2) as usize) };
                groups.push(("hermitian:so*(2n)".into(), vec![("n", n.to_string())], sigma, [4, 4, 1]));
            }
        }
        if want("hermitian:so(p,2)") && nf.is_none() && qf.map(|x| x == 2).unwrap_or(true) {
            for p in range_or(filter.p, 5, 6) {
                if p < 3 {
                    return Err(Error::ParameterOutOfRange(format!("so(p,2) needs p >= 3, got {p}")));
                }
                groups.push(("hermitian:so(p,2)".into(), vec![("p", p.to_string())], c_type(2), [0, p - 2, 1]));
            }
        }
        if want("hermitian:e6(-14)") && filter.p.is_none() && qf.is_none() && nf.is_none() {
            groups.push(("hermitian:e6(-14)".into(), vec![], bc_type(2), [8, 6, 1]));
        }
        if want("hermitian:e7(-25)") && filter.p.is_none() && qf.is_none() && nf.is_none() {
            groups.push(("hermitian:e7(-25)".into(), vec![], c_type(3), [0, 8, 1]));
        }
        for (label, params, sigma, ms) in groups {
            let m = per_orbit(&sigma, |v| qi(match shape(v) {
                Shape::E => ms[0],
                Shape::Mixed => ms[1],
                Shape::TwoE => ms[2],
            }));
            b.trivial(&label, &params, sigma.clone(), m.clone());
            let m_s = if sigma.roots().iter().any(|v| shape(v) == Shape::E) { ms[0] } else { 0 };
            for nu in &nus {
                if nu.is_zero() {
                    continue;
                }
                let kappa = per_orbit(&sigma, |v| if shape(v) == Shape::TwoE { -nu * nu } else { Q::zero() });
                let mut pairs = Vec::new();
                for (sg, t) in [(1, "+"), (-1, "-")] {
                    let nu = *nu;
                    pairs.push(catalog_pair(&sigma, &m, &kappa, &format!("hermitian {t}"), move |v| {
                        let nz: Vec<&Q> = v.iter().filter(|x| !x.is_zero()).collect();
                        if nz.len() == 1 {
                            match nz[0].abs().to_integer() {
                                2 => Some(qi(m_s) / qi(2) + qi(sg) * nu),
                                4 => Some(q(1, 2) - qi(sg) * nu),
                                _ => None,
                            }
                        } else if nz.iter().all(|x| x.abs() == qi(2)) {
                            Some(qi(ms[1]) / qi(2))
                        } else {
                            None
                        }
                    }));
                }
                let mut p = params.clone();
                p.push(("nu", nu.to_string()));
                b.push(&label, &p, &format!("chi_nu (nu={nu})"), sigma.clone(), m.clone(), kappa, pairs, "Hermitian family: kappa_long = -nu^2", None);
            }
        }
    }

    let no_params = filter.p.is_none() && qf.is_none() && rf.is_none() && sf.is_none() && filter.nu.is_none();

    // F4-family: Σ = F4, m = (m_s, 1), κ = (0, −¼)
    if family_matches(fam, &["f4-family", "f4", "e6", "e7", "e8"]) && no_params && nf.is_none() {
        for (name, ms) in [("f4(4)", 1), ("e6(2)", 2), ("e7(-5)", 4), ("e8(-24)", 8)] {
            if !family_matches(fam, &["f4-family", name, "f4", &name[..2]]) {
                continue;
            }
            let sigma = RootSystem::build("F", 4)?;
            let short = sigma.orbits().iter().position(|o| o.label == "short").expect("short orbit");
            let m: Vec<Q> = (0..sigma.orbits().len()).map(|o| if o == short { qi(ms) } else { qi(1) }).collect();
            let label = format!("F4-family:{name}");
            b.trivial(&label, &[("m_short", ms.to_string())], sigma.clone(), m.clone());
            let kappa: Vec<Q> = (0..m.len()).map(|o| if o == short { Q::zero() } else { q(-1, 4) }).collect();
            let pair = catalog_pair(&sigma, &m, &kappa, "F4-family", |v| {
                let half: Vec<Q> = v.iter().map(|x| x / qi(2)).collect();
                if let Some(i) = sigma.index_of(v) {
                    (sigma.orbit_of(i) != short).then_some(q(1, 2))
                } else {
                    sigma.index_of(&half).filter(|&i| sigma.orbit_of(i) == short).map(|_| qi(ms) / qi(2))
                }
            });
            b.push(&label, &[("m_short", ms.to_string())], "pi (kappa_long = -1/4)", sigma, m, kappa, vec![pair], "F4-family: division of Sigma by root length", None);
        }
    }

    // split simply-laced: m ≡ 1, κ ≡ −¼
    if family_matches(fam, &["split", "sl", "a", "d", "e", "split:a", "split:d", "split:e6", "split:e7", "split:e8"]) && no_params {
        let mut list: Vec<(String, RootSystem, Vec<(&str, String)>)> = Vec::new();
        for n in range_or(nf, 3, 5) {
            if n < 3 {
                return Err(Error::ParameterOutOfRange(format!("split sl(n,R) needs n >= 3, got {n}")));
            }
            if family_matches(fam, &["split", "sl", "a", "split:a"]) {
                list.push((format!("split:A{}", n - 1), RootSystem::build("A", (n - 1) as usize)?, vec![("n", n.to_string())]));
            }
        }
        if family_matches(fam, &["split", "d", "split:d"]) {
            for n in range_or(nf, 3, 4) {
                list.push((format!("split:D{n}"), RootSystem::build("D", n as usize)?, vec![("n", n.to_string())]));
            }
        }
        if nf.is_none() {
            for e in [6usize, 7, 8] {
                if family_matches(fam, &["split", "e", &format!("split:e{e}"), &format!("e{e}")]) {
                    list.push((format!("split:E{e}"), RootSystem::build("E", e)?, vec![]));
                }
            }
        }
        for (label, sigma, params) in list {
            let m = vec![qi(1); sigma.orbits().len()];
            b.trivial(&label, &params, sigma.clone(), m.clone());
            let kappa = vec![q(-1, 4); m.len()];
            let pair = catalog_pair(&sigma, &m, &kappa, "split", |v| sigma.index_of(v).map(|_| q(1, 2)));
            b.push(&label, &params, "half-spin (kappa = -1/4)", sigma, m, kappa, vec![pair], "split simply-laced: kappa = -1/4", None);
        }
    }

    // G2
    if family_matches(fam, &["g2", "split:g2"]) && no_params && nf.is_none() {
        let sigma = RootSystem::build("G", 2)?;
        let short = sigma.orbits().iter().position(|o| o.label == "short").expect("short");
        let m = vec![qi(1); 2];
        b.trivial("G2", &[], sigma.clone(), m.clone());
        let kappa = vec![q(-1, 4); 2];
        let pair = catalog_pair(&sigma, &m, &kappa, "G2 pi_1", |v| sigma.index_of(v).map(|_| q(1, 2)));
        b.push("G2", &[], "pi_1", sigma.clone(), m.clone(), kappa, vec![pair], "G2: kappa = (-1/4, -1/4)", None);
        let kappa2: Vec<Q> = (0..2).map(|o| if o == short { q(-9, 4) } else { q(-1, 4) }).collect();
        let found = solve_matching(&sigma, &m, &kappa2);
        let note = if found.iter().any(|p| p.valid) {
            None
        } else {
            Some("no hypergeometric expression: no (Sigma^pi, k^pi) satisfies the matching conditions".to_string())
        };
        b.push("G2", &[], "pi_2", sigma, m, kappa2, Vec::new(), "G2: kappa = (-9/4, -1/4)", note);
    }

    // groups with no non-trivial small K-type
    if family_matches(fam, &["complex", "trivial-only"]) && no_params && nf.is_none() {
        for (fam_, rank) in [("A", 2usize), ("B", 2), ("G", 2)] {
            let sigma = RootSystem::build(fam_, rank)?;
            let m = vec![qi(2); sigma.orbits().len()];
            b.trivial(&format!("complex:{}{}", fam_, rank), &[], sigma, m);
        }
    }
    if family_matches(fam, &["trivial-only", "f4"]) && no_params && nf.is_none() {
        b.trivial("f4(-20)", &[], bc_type(1), per_orbit(&bc_type(1), |v| if shape(v) == Shape::TwoE { qi(7) } else { qi(8) }));
    }
    if family_matches(fam, &["trivial-only", "e6"]) && no_params && nf.is_none() {
        let sigma = RootSystem::build("A", 2)?;
        let m = vec![qi(8); sigma.orbits().len()];
        b.trivial("e6(-26)", &[], sigma, m);
    }
    Ok(b.out)
}

/// Parse per-orbit exact values: "4,3" (orbit order) or "short=4,double=3".
pub fn parse_orbit_values(rs: &RootSystem, s: &str) -> Result<Vec<Q>> {
    let no = rs.orbits().len();
    let s = s.trim();
    if s.contains('=') {
        let mut out = vec![Q::zero(); no];
        for part in s.split(',') {
            let (l, v) = part.split_once('=').ok_or_else(|| Error::InvalidMultiplicity(part.into()))?;
            let o = rs.orbit_by_label(l.trim()).ok_or_else(|| Error::InvalidMultiplicity(format!("unknown orbit label `{}`", l.trim())))?;
            out[o] = parse_q(v.trim()).ok_or_else(|| Error::InvalidMultiplicity(format!("bad value `{v}`")))?;
        }
        return Ok(out);
    }
    let vals: Vec<Q> = s
        .split(',')
        .map(|x| parse_q(x.trim()).ok_or_else(|| Error::InvalidMultiplicity(format!("bad value `{x}`"))))
        .collect::<Result<_>>()?;
    match vals.len() {
        1 => Ok(vec![vals[0]; no]),
        l if l == no => Ok(vals),
        l => Err(Error::InvalidMultiplicity(format!("{l} values given for {no} orbits"))),
    }
}

/// Labels of the orbits of `rs`, in orbit order.
pub fn orbit_labels(rs: &RootSystem) -> Vec<String> {
    rs.orbits().iter().map(|o| o.label.clone()).collect()
}

/// κ ≤ 0 and κ = 0 on even multiplicities.
pub fn kappa_sign_ok(m: &[Q], kappa: &[Q]) -> bool {
    m.iter().zip(kappa).all(|(mm, kk)| !kk.is_positive() && (!(mm.is_integer() && mm.to_integer() % 2 == 0) || kk.is_zero()))
}

/// Convert a rational to f64 (helper for callers that do not import num-traits).
pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_arithmetic() {
        let s = Surd::sqrt(qi(2)).unwrap();
        assert_eq!(s.mul(&s).unwrap(), Surd::rational(qi(2)));
        assert_eq!(Surd::sqrt(q(9, 4)).unwrap(), Surd::rational(q(3, 2)));
        assert!(Surd::sqrt(qi(-1)).is_none());
        assert!(s.mul(&Surd::sqrt(qi(3)).unwrap()).is_none());
    }

    #[test]
    fn sp_p1_solver() {
        let sigma = one_dim(&[1, 2]);
        let p = 2;
        let n = 3;
        let m = per_orbit(&sigma, |v| if shape(v) == Shape::TwoE { qi(3) } else { qi(4 * (p - 1)) });
        let kappa = per_orbit(&sigma, |v| if shape(v) == Shape::TwoE { -(qi(n * n) - Q::one()) / qi(3) } else { Q::zero() });
        let sols = solve_matching(&sigma, &m, &kappa);
        let valid: Vec<&MatchedPair> = sols.iter().filter(|p| p.valid).collect();
        let want: Vec<(Q, Q)> = vec![(qi(2 * p - 1 + n), q(1, 2) - qi(n)), (qi(2 * p - 1 - n), q(1, 2) + qi(n))];
        for (a, b) in want {
            assert!(valid.iter().any(|s| s.k_at(&[qi(2)]) == Some(&Surd::rational(a)) && s.k_at(&[qi(4)]) == Some(&Surd::rational(b))));
        }
    }

    #[test]
    fn so2r1_mirror_branch() {
        let sigma = one_dim(&[1]);
        let (r, s) = (3, 2);
        let m = vec![qi(2 * r - 1)];
        let kappa = vec![-qi(s * (s + 2 * r - 2)) / qi(2 * r - 1)];
        let sols = solve_matching(&sigma, &m, &kappa);
        let valid: Vec<&MatchedPair> = sols.iter().filter(|p| p.valid).collect();
        assert!(valid.iter().any(|p| p.k_at(&[qi(1)]) == Some(&Surd::rational(qi(-s))) && p.k_at(&[qi(2)]) == Some(&Surd::rational(qi(r + s) - q(1, 2)))));
        assert!(valid.iter().any(|p| p.k_at(&[qi(1)]) == Some(&Surd::rational(qi(2 * r + s - 2))) && p.k_at(&[qi(2)]) == Some(&Surd::rational(q(3 - 2 * r - 2 * s, 2)))));
    }

    #[test]
    fn g2_pi2_has_no_pair() {
        let recs = catalog(&CatalogFilter { family: Some("G2".into()), ..Default::default() }).unwrap();
        let pi2 = recs.iter().find(|r| r.ktype_name == "pi_2").unwrap();
        assert!(pi2.matched.is_empty());
        assert!(pi2.note.as_deref().unwrap().contains("no hypergeometric expression"));
        let sols = solve_matching(&pi2.sigma, &pi2.m, &pi2.kappa);
        assert!(!sols.is_empty() && sols.iter().all(|p| !p.valid));
        assert!(sols.iter().all(|p| !p.report.root_system.valid()));
    }

    #[test]
    fn catalog_examples() {
        let recs = catalog(&CatalogFilter { family: Some("sp(p,1)".into()), p: Some(2), n: Some(3), ..Default::default() }).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.m, vec![qi(4), qi(3)]);
        assert_eq!(r.kappa, vec![Q::zero(), q(-8, 3)]);
        let recs = catalog(&CatalogFilter { family: Some("so(2r,1)".into()), r: Some(2), s: Some(1), ..Default::default() }).unwrap();
        assert_eq!(recs[0].kappa, vec![-Q::one()]);
        assert!(matches!(catalog(&CatalogFilter { family: Some("nope".into()), ..Default::default() }), Err(Error::UnknownCatalogFamily(_))));
        assert!(matches!(
            catalog(&CatalogFilter { family: Some("so(p,q)".into()), p: Some(4), q: Some(5), ..Default::default() }),
            Err(Error::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn default_catalog_pairs_verify_and_are_found() {
        let recs = catalog(&CatalogFilter::default()).unwrap();
        assert!(recs.len() > 40);
        for r in &recs {
            assert!(kappa_sign_ok(&r.m, &r.kappa), "{} {}", r.group_label, r.ktype_name);
            for p in &r.matched {
                assert!(p.valid, "{} {} {:?} {:?}", r.group_label, r.ktype_name, r.parameters, p.failure_reason);
            }
            if r.sigma.rank() <= 4 && !r.matched.is_empty() {
                let sols = solve_matching(&r.sigma, &r.m, &r.kappa);
                for p in &r.matched {
                    assert!(sols.iter().any(|s| s.valid && s.same_as(p)), "{} {} {:?}", r.group_label, r.ktype_name, r.parameters);
                }
            }
        }
    }

    #[test]
    fn perturbation_is_caught() {
        let recs = catalog(&CatalogFilter { family: Some("sp(p,1)".into()), p: Some(2), n: Some(2), ..Default::default() }).unwrap();
        let pair = &recs[0].matched[0];
        let mut a = pair.assignment.clone();
        a[0].1 = a[0].1.add_q(q(1, 7));
        let rep = verify_assignment(&recs[0].sigma, &recs[0].m, &recs[0].kappa, &a);
        assert!(!rep.valid());
        assert!(rep.violations.iter().any(|v| v.contains("equation at")));
    }
}
