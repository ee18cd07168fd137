//! Harish-Chandra series Φ(Σ′,k,λ) on the negative chamber.
//!
//! Φ = Σ_μ a_μ e^{(λ+ρ(k)+μ)(H)}, μ ∈ ℕΣ′⁺, a_0 = 1, where
//!
//! ((μ,μ) + 2(μ,λ)) a_μ = 2 Σ_{α>0} k_α Σ_{j≥1} (λ+ρ(k)+μ−jα, α) a_{μ−jα}.
//!
//! This comes from L Φ = ((λ,λ) − (ρ(k),ρ(k))) Φ with
//! coth(α/2) = −(1 + 2Σ_{j≥1} e^{jα}) on 𝔞₋.

use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

use lru::LruCache;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rootsys::{ConePoint, Multiplicity, RootSystem};

/// Dense tables larger than this are refused.
const MAX_TABLE: usize = 40_000_000;

#[derive(Clone, Copy, Debug)]
pub struct TruncationPolicy {
    pub max_height: usize,
    pub tail_tol: f64,
    pub wall_margin: f64,
    /// On resonance, shift λ by 1e-6·i along a fixed direction instead of failing.
    pub perturb: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { max_height: 60, tail_tol: 1e-12, wall_margin: 1e-2, perturb: false }
    }
}

impl TruncationPolicy {
    /// Height needed so that e^{-N·margin}·N^p drops below `tol`.
    pub fn height_for(margin: f64, tol: f64, growth: f64) -> usize {
        let mut n = 10.0f64;
        for _ in 0..50 {
            n = ((1.0 / tol).ln() + growth * n.max(2.0).ln()) / margin;
        }
        n.ceil().clamp(4.0, 1.0e7) as usize
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PosRoot {
    coeffs: Vec<u32>,
    stride: usize,
    k: f64,
    norm2: f64,
    /// (α_i, α) over simple roots
    g: Vec<f64>,
    /// (λ+ρ, α)
    lr: Complex64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub system: String,
    pub max_height: usize,
    pub lambda: Vec<Complex64>,
    pub rho: Vec<f64>,
    pub k: Vec<f64>,
    rank: usize,
    radix: usize,
    points: Vec<ConePoint>,
    point_idx: Vec<usize>,
    shells: Vec<(usize, usize)>,
    coeffs: Vec<Complex64>,
    pos: Vec<PosRoot>,
    simple_gram: Vec<Vec<f64>>,
    /// (λ+ρ, α_i)
    lr_simple: Vec<Complex64>,
    lr_lr: Complex64,
    eigenvalue: Complex64,
    simple_amb: Vec<Vec<f64>>,
    gram_amb: Vec<Vec<f64>>,
}

fn dot_amb(g: &[Vec<f64>], u: &[f64], v: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..u.len() {
        for j in 0..v.len() {
            s += u[i] * g[i][j] * v[j];
        }
    }
    s
}

fn dot_amb_c(g: &[Vec<f64>], u: &[Complex64], v: &[f64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..u.len() {
        for j in 0..v.len() {
            s += u[i] * (g[i][j] * v[j]);
        }
    }
    s
}

fn dot_amb_cc(g: &[Vec<f64>], u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..u.len() {
        for j in 0..v.len() {
            s += u[i] * v[j] * g[i][j];
        }
    }
    s
}

/// Compute a_μ for all μ of height ≤ N.
pub fn hc_coefficients(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], n: usize) -> Result<SeriesCoefficients> {
    hc_coefficients_with(rs, k, lambda, n, false)
}

pub fn hc_coefficients_with(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], n: usize, perturb: bool) -> Result<SeriesCoefficients> {
    match build(rs, k, lambda, n) {
        Err(Error::ResonantParameter { .. }) if perturb => {
            // fixed direction: 2ρ for k ≡ 1, normalised
            let dir = rs.rho_weighted(&Multiplicity::constant(rs, 1.0));
            let nrm = rs.dot_f64(&dir, &dir).sqrt();
            let shifted: Vec<Complex64> = lambda.iter().zip(&dir).map(|(l, d)| l + Complex64::new(0.0, 1e-6 * d / nrm)).collect();
            build(rs, k, &shifted, n)
        }
        r => r,
    }
}

fn build(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], n: usize) -> Result<SeriesCoefficients> {
    let r = rs.rank();
    let radix = n + 1;
    let size = (0..r).try_fold(1usize, |acc, _| acc.checked_mul(radix)).filter(|&s| s <= MAX_TABLE).ok_or(Error::HeightOverflow(n))?;
    let rho = rs.rho_weighted(k);
    let lr: Vec<Complex64> = lambda.iter().zip(&rho).map(|(l, p)| l + p).collect();
    let gram = rs.gram_f64().to_vec();
    let simple_amb: Vec<Vec<f64>> = rs.simple().iter().map(|&s| rs.root_f64(s).to_vec()).collect();
    let simple_gram = rs.simple_gram_f64().to_vec();
    let lr_simple: Vec<Complex64> = simple_amb.iter().map(|a| dot_amb_c(&gram, &lr, a)).collect();
    let l_simple: Vec<Complex64> = simple_amb.iter().map(|a| dot_amb_c(&gram, lambda, a)).collect();
    let pos: Vec<PosRoot> = rs
        .positive()
        .iter()
        .map(|&i| {
            let coeffs: Vec<u32> = rs.coeffs(i).iter().map(|&c| c as u32).collect();
            let stride = coeffs.iter().rev().fold(0usize, |acc, &c| acc * radix + c as usize);
            let amb = rs.root_f64(i);
            PosRoot {
                stride,
                k: k.at(rs, i),
                norm2: dot_amb(&gram, amb, amb),
                g: simple_amb.iter().map(|a| dot_amb(&gram, a, amb)).collect(),
                lr: dot_amb_c(&gram, &lr, amb),
                coeffs,
            }
        })
        .collect();
    let points = rs.enumerate_cone(n);
    let mut shells = Vec::with_capacity(n + 1);
    let mut start = 0;
    for h in 0..=n as u32 {
        let end = start + points[start..].iter().take_while(|p| p.height == h).count();
        shells.push((start, end));
        start = end;
    }
    let point_idx: Vec<usize> = points.iter().map(|p| p.coords.iter().rev().fold(0usize, |acc, &c| acc * radix + c as usize)).collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); size];
    coeffs[0] = Complex64::new(1.0, 0.0);
    let lam2 = lambda.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let res_tol = 1e-8 * (1.0 + lam2);
    let zero_k = k.is_zero();
    for (p, &idx) in points.iter().zip(&point_idx).skip(1) {
        if zero_k {
            break;
        }
        let mu: Vec<f64> = p.coords.iter().map(|&c| c as f64).collect();
        let mut mumu = 0.0;
        let mut mul = Complex64::new(0.0, 0.0);
        for i in 0..r {
            mul += l_simple[i] * mu[i];
            for j in 0..r {
                mumu += mu[i] * simple_gram[i][j] * mu[j];
            }
        }
        let lhs = mumu + 2.0 * mul;
        if lhs.norm() < res_tol {
            return Err(Error::ResonantParameter { mu: p.coords.clone(), size: lhs.norm() });
        }
        let mut rhs = Complex64::new(0.0, 0.0);
        for a in &pos {
            if a.k == 0.0 {
                continue;
            }
            let mut jmax = u32::MAX;
            for (m, c) in p.coords.iter().zip(&a.coeffs) {
                if *c > 0 {
                    jmax = jmax.min(m / c);
                }
            }
            if jmax == 0 {
                continue;
            }
            let base = a.lr + mu.iter().zip(&a.g).map(|(m, g)| m * g).sum::<f64>();
            let mut s0 = Complex64::new(0.0, 0.0);
            let mut s1 = Complex64::new(0.0, 0.0);
            let mut at = idx;
            for j in 1..=jmax {
                at -= a.stride;
                let c = coeffs[at];
                s0 += c;
                s1 += c * j as f64;
            }
            rhs += a.k * (base * s0 - a.norm2 * s1);
        }
        coeffs[idx] = 2.0 * rhs / lhs;
    }
    let lr_lr = dot_amb_cc(&gram, &lr, &lr);
    let eigenvalue = dot_amb_cc(&gram, lambda, lambda) - dot_amb(&gram, &rho, &rho);
    Ok(SeriesCoefficients {
        system: rs.fingerprint().to_string(),
        max_height: n,
        lambda: lambda.to_vec(),
        rho,
        k: k.values.clone(),
        rank: r,
        radix,
        points,
        point_idx,
        shells,
        coeffs,
        pos,
        simple_gram,
        lr_simple,
        lr_lr,
        eigenvalue,
        simple_amb,
        gram_amb: gram,
    })
}

type CacheKey = (String, Vec<u64>, Vec<u64>, usize, bool);

fn cache() -> &'static Mutex<LruCache<CacheKey, Arc<SeriesCoefficients>>> {
    static C: OnceLock<Mutex<LruCache<CacheKey, Arc<SeriesCoefficients>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(LruCache::new(NonZeroUsize::new(256).unwrap())))
}

fn cache_key(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], n: usize, perturb: bool) -> CacheKey {
    (
        rs.fingerprint().to_string(),
        k.values.iter().map(|x| x.to_bits()).collect(),
        lambda.iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect(),
        n,
        perturb,
    )
}

/// [`hc_coefficients_with`] backed by the directory in `HO_CACHE_DIR`, if set.
/// Unreadable or unwritable cache files are ignored.
pub fn hc_coefficients_persistent(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], n: usize, perturb: bool) -> Result<SeriesCoefficients> {
    let dir = match std::env::var_os("HO_CACHE_DIR") {
        Some(d) if !d.is_empty() => std::path::PathBuf::from(d),
        _ => return hc_coefficients_with(rs, k, lambda, n, perturb),
    };
    let key = cache_key(rs, k, lambda, n, perturb);
    let mut h = Sha256::new();
    h.update(format!("{:?}", key).as_bytes());
    let path = dir.join(format!("series-{}.json", hex::encode(h.finalize())));
    if let Ok(bytes) = std::fs::read(&path) {
        if let Ok(sc) = serde_json::from_slice::<SeriesCoefficients>(&bytes) {
            return Ok(sc);
        }
    }
    let sc = hc_coefficients_with(rs, k, lambda, n, perturb)?;
    if std::fs::create_dir_all(&dir).is_ok() {
        if let Ok(bytes) = serde_json::to_vec(&sc) {
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            if std::fs::write(&tmp, bytes).is_ok() {
                let _ = std::fs::rename(&tmp, &path);
            }
        }
    }
    Ok(sc)
}

/// Memoized [`hc_coefficients_persistent`] keyed by (system, k, λ, N).
pub fn hc_coefficients_cached(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], n: usize, perturb: bool) -> Result<Arc<SeriesCoefficients>> {
    let key = cache_key(rs, k, lambda, n, perturb);
    if let Some(sc) = cache().lock().unwrap().get(&key) {
        return Ok(sc.clone());
    }
    let sc = Arc::new(hc_coefficients_persistent(rs, k, lambda, n, perturb)?);
    cache().lock().unwrap().put(key, sc.clone());
    Ok(sc)
}

/// Outcome of a series evaluation.
#[derive(Clone, Copy, Debug)]
pub struct PhiValue {
    pub value: Complex64,
    pub tail: f64,
    pub height_used: usize,
}

impl SeriesCoefficients {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ConePoint] {
        &self.points
    }

    /// a_μ for μ given by its simple-root coordinates.
    pub fn coeff(&self, mu: &[u32]) -> Option<Complex64> {
        let h: u32 = mu.iter().sum();
        if h as usize > self.max_height {
            return None;
        }
        let idx = mu.iter().rev().fold(0usize, |acc, &c| acc * self.radix + c as usize);
        Some(self.coeffs[idx])
    }

    /// (μ, a_μ) in cone order.
    pub fn iter(&self) -> impl Iterator<Item = (&ConePoint, Complex64)> + '_ {
        self.points.iter().zip(&self.point_idx).map(move |(p, &i)| (p, self.coeffs[i]))
    }

    /// Overwrite one coefficient (for sensitivity tests of [`eigen_residual`]).
    pub fn set_coeff(&mut self, mu: &[u32], v: Complex64) {
        let idx = mu.iter().rev().fold(0usize, |acc, &c| acc * self.radix + c as usize);
        self.coeffs[idx] = v;
    }

    pub fn eigenvalue(&self) -> Complex64 {
        self.eigenvalue
    }

    /// α_i(H) for the simple roots.
    pub fn simple_values(&self, h: &[f64]) -> Vec<f64> {
        self.simple_amb.iter().map(|a| dot_amb(&self.gram_amb, a, h)).collect()
    }

    /// Evaluate on shells given x_i = α_i(H) ≤ 0 and the prefactor exponent
    /// (λ+ρ)(H). Stops early once shells are negligible.
    pub fn sum_at(&self, simple_vals: &[f64], lr_h: Complex64) -> PhiValue {
        let r = self.rank;
        let n = self.max_height;
        let pows: Vec<Vec<f64>> = simple_vals
            .iter()
            .map(|&x| {
                let e = x.exp();
                let mut v = Vec::with_capacity(n + 1);
                let mut c = 1.0;
                for _ in 0..=n {
                    v.push(c);
                    c *= e;
                }
                v
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        let mut mags: Vec<f64> = Vec::with_capacity(n + 1);
        for (h, &(s, e)) in self.shells.iter().enumerate() {
            let mut sh = Complex64::new(0.0, 0.0);
            for t in s..e {
                let p = &self.points[t];
                let mut w = 1.0;
                for i in 0..r {
                    w *= pows[i][p.coords[i] as usize];
                }
                sh += self.coeffs[self.point_idx[t]] * w;
            }
            total += sh;
            mags.push(sh.norm());
            if h >= 6 && mags[h] + mags[h - 1] + mags[h - 2] <= 1e-18 * total.norm() {
                break;
            }
        }
        let tail = tail_estimate(&mags);
        let scale = lr_h.exp();
        PhiValue { value: total * scale, tail: tail * scale.norm(), height_used: mags.len() - 1 }
    }
}

/// Geometric extrapolation from the last height-shells (heuristic).
fn tail_estimate(mags: &[f64]) -> f64 {
    let m = mags.len();
    if m < 4 {
        return if mags.last().copied().unwrap_or(0.0) == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let last = mags[m - 1].max(mags[m - 2]);
    let prev = mags[m - 3].max(mags[m - 4]);
    if last == 0.0 {
        return 0.0;
    }
    let q = (last / prev).sqrt();
    if !(q < 0.999) {
        return f64::INFINITY;
    }
    mags[m - 1] * q / (1.0 - q)
}

/// Φ(λ; H) for H in the closed negative chamber.
pub fn phi_eval(sc: &SeriesCoefficients, h: &[f64], policy: &TruncationPolicy) -> Result<Complex64> {
    let v = phi_eval_full(sc, h, policy)?;
    Ok(v.value)
}

pub fn phi_eval_full(sc: &SeriesCoefficients, h: &[f64], policy: &TruncationPolicy) -> Result<PhiValue> {
    let sv = sc.simple_values(h);
    let scale: f64 = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    if sv.iter().any(|&x| x > 1e-13 * scale) {
        return Err(Error::OutsideNegativeChamber);
    }
    if !sc.k.iter().all(|&x| x == 0.0) {
        let dist = sc
            .pos
            .iter()
            .map(|a| a.coeffs.iter().zip(&sv).map(|(c, x)| *c as f64 * x).sum::<f64>().abs())
            .fold(f64::INFINITY, f64::min);
        if dist < policy.wall_margin {
            return Err(Error::TooCloseToWallOrOrigin { dist, margin: policy.wall_margin });
        }
    }
    let lr_h: Complex64 = {
        let lr: Vec<Complex64> = sc.lambda.iter().zip(&sc.rho).map(|(l, p)| l + p).collect();
        dot_amb_c(&sc.gram_amb, &lr, h)
    };
    let v = sc.sum_at(&sv, lr_h);
    if v.tail > policy.tail_tol * v.value.norm().max(1e-300) {
        return Err(Error::TailNotConverged { estimate: v.tail / v.value.norm().max(1e-300), tol: policy.tail_tol });
    }
    Ok(v)
}

/// Apply L = Ω + Σ_{α>0} k_α coth(α/2) ∂_α term by term to the truncated
/// series and return the largest per-μ mismatch against the eigenvalue
/// (λ,λ) − (ρ,ρ), relative to the size of the terms that enter it.
pub fn eigen_residual(sc: &SeriesCoefficients) -> f64 {
    let r = sc.rank;
    let mut worst: f64 = 0.0;
    for (p, &idx) in sc.points.iter().zip(&sc.point_idx) {
        let mu: Vec<f64> = p.coords.iter().map(|&c| c as f64).collect();
        // (ν,ν) with ν = λ+ρ+μ
        let mut nn = sc.lr_lr;
        for i in 0..r {
            nn += 2.0 * mu[i] * sc.lr_simple[i];
            for j in 0..r {
                nn += mu[i] * sc.simple_gram[i][j] * mu[j];
            }
        }
        let a = sc.coeffs[idx];
        let mut diag = nn;
        let mut scale = a.norm() * (nn.norm() + sc.eigenvalue.norm());
        let mut off = Complex64::new(0.0, 0.0);
        for pr in &sc.pos {
            let nu_a = pr.lr + mu.iter().zip(&pr.g).map(|(m, g)| m * g).sum::<f64>();
            // −k_α (ν,α) from the constant term of coth
            diag -= pr.k * nu_a;
            scale += a.norm() * (pr.k * nu_a).norm();
            let mut jmax = u32::MAX;
            for (m, c) in p.coords.iter().zip(&pr.coeffs) {
                if *c > 0 {
                    jmax = jmax.min(m / c);
                }
            }
            for j in 1..=jmax.min(p.height) {
                let prev = sc.coeffs[idx - j as usize * pr.stride];
                let t = 2.0 * pr.k * (nu_a - j as f64 * pr.norm2) * prev;
                off -= t;
                scale += t.norm();
            }
        }
        let res = diag * a + off - sc.eigenvalue * a;
        if res.norm() > 0.0 {
            worst = worst.max(res.norm() / scale.max(1e-300));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{qi, RootSystem};

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn a1_k1_all_ones() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let k = Multiplicity::constant_exact(&a1, qi(1));
        let lam = a1.lambda_from_coroot_values(&[c(0.37, 0.8)]);
        let sc = hc_coefficients(&a1, &k, &lam, 20).unwrap();
        for (_, a) in sc.iter() {
            assert!((a - 1.0).norm() < 1e-13);
        }
        assert!(eigen_residual(&sc) < 1e-14);
    }

    #[test]
    fn zero_k() {
        let b2 = RootSystem::from_label("B2").unwrap();
        let k = Multiplicity::zero(&b2);
        let lam = vec![c(0.3, 0.1), c(-0.2, 0.7)];
        let sc = hc_coefficients(&b2, &k, &lam, 8).unwrap();
        for (p, a) in sc.iter() {
            if p.height > 0 {
                assert_eq!(a, c(0.0, 0.0));
            }
        }
        assert_eq!(eigen_residual(&sc), 0.0);
        let h = b2.h_from_simple_values(&[-0.4, -0.3]);
        let v = phi_eval(&sc, &h, &TruncationPolicy::default()).unwrap();
        let expect = (lam[0] * h[0] + lam[1] * h[1]).exp();
        assert!((v - expect).norm() < 1e-14);
    }

    #[test]
    fn a1_first_coefficient() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let kv = 0.73;
        let k = Multiplicity::from_f64(vec![kv]);
        let lam = a1.lambda_from_coroot_values(&[c(0.41, -0.6)]);
        let sc = hc_coefficients(&a1, &k, &lam, 3).unwrap();
        let la = a1.dot_c(&lam, a1.root_f64(a1.simple()[0]));
        let expect = kv * (2.0 * la + kv * 2.0) / (2.0 + 2.0 * la);
        assert!((sc.coeff(&[1]).unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn a1_closed_form_phi() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let k = Multiplicity::constant_exact(&a1, qi(1));
        let lam = a1.lambda_from_coroot_values(&[c(1.0, 0.0)]);
        let sc = hc_coefficients(&a1, &k, &lam, 60).unwrap();
        let h = a1.h_from_simple_values(&[-2.0]);
        let v = phi_eval(&sc, &h, &TruncationPolicy::default()).unwrap();
        let lr: f64 = (0..2).map(|i| (lam[i].re + sc.rho[i]) * h[i]).sum();
        let expect = lr.exp() / (1.0 - (-2.0f64).exp());
        assert!((v - expect).norm() < 1e-10 * expect.abs());
    }

    #[test]
    fn resonance_detected() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let k = Multiplicity::from_f64(vec![0.5]);
        // (μ,μ)+2(μ,λ) = 0 at μ = 2α when λ(α^∨) = −2
        let lam = a1.lambda_from_coroot_values(&[c(-2.0, 0.0)]);
        match hc_coefficients(&a1, &k, &lam, 5) {
            Err(Error::ResonantParameter { mu, .. }) => assert_eq!(mu, vec![2]),
            other => panic!("{:?}", other.map(|s| s.max_height)),
        }
        assert!(hc_coefficients_with(&a1, &k, &lam, 5, true).is_ok());
    }

    #[test]
    fn outside_chamber() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let k = Multiplicity::from_f64(vec![0.5]);
        let lam = a1.lambda_from_coroot_values(&[c(0.3, 0.0)]);
        let sc = hc_coefficients(&a1, &k, &lam, 5).unwrap();
        let h = a1.h_from_simple_values(&[0.5]);
        assert!(matches!(phi_eval(&sc, &h, &TruncationPolicy::default()), Err(Error::OutsideNegativeChamber)));
    }

    #[test]
    fn corrupted_coefficient_detected() {
        let a2 = RootSystem::from_label("A2").unwrap();
        let k = Multiplicity::from_f64(vec![0.8]);
        let lam = vec![c(0.3, 0.2), c(-0.1, 0.5), c(0.4, -0.3)];
        let mut sc = hc_coefficients(&a2, &k, &lam, 6).unwrap();
        assert!(eigen_residual(&sc) < 1e-13);
        let a = sc.coeff(&[1, 1]).unwrap();
        sc.set_coeff(&[1, 1], a + 1e-3);
        assert!(eigen_residual(&sc) >= 1e-4, "{}", eigen_residual(&sc));
    }
}
