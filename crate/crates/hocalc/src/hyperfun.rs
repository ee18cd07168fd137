//! The hypergeometric function F(Σ′,k,λ) via the connection formula
//!
//! F = c̃(ρ(k))⁻¹ Σ_w c̃(−wλ) Φ(wλ; H′),   H′ = chamber_map(H) ∈ 𝔞₋,
//!
//! together with the cosh-factor, Υ = cosh-factor·F(Σ^π,k^π), the radial
//! Casimir residual and the c-function asymptotics.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cfunc::{c_norm, c_tilde, c_tilde_rho, k_on};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rootsys::{fmt_vec, q_to_f64, qi, Multiplicity, RootSystem, DEFAULT_WEYL_CAP, Q};
use crate::series::{hc_coefficients_persistent, phi_eval_full, SeriesCoefficients, TruncationPolicy};

/// Largest series height tried per rank.
fn height_cap(rank: usize) -> usize {
    match rank {
        0 | 1 => 6000,
        2 => 640,
        3 => 120,
        4 => 48,
        _ => 24,
    }
}

fn height_ladder(start: usize, rank: usize) -> Vec<usize> {
    let cap = height_cap(rank);
    let mut out = vec![start.min(cap)];
    while *out.last().unwrap() < cap {
        let n = (out.last().unwrap() * 2).min(cap);
        out.push(n);
    }
    out
}

struct Term {
    lambda: Vec<Complex64>,
    coef: Complex64,
}

/// F(Σ′,k,λ;·) for fixed (Σ′,k,λ).
pub struct HypergeometricEvaluator {
    rs: RootSystem,
    k: Multiplicity,
    lambda: Vec<Complex64>,
    policy: TruncationPolicy,
    terms: Vec<Term>,
    norm: Complex64,
    tables: Mutex<HashMap<usize, Arc<Vec<Arc<SeriesCoefficients>>>>>,
    // perturb mode: F at λ ± iεd, averaged
    shifted: Option<Box<(HypergeometricEvaluator, HypergeometricEvaluator)>>,
    origin: Option<OriginSeries>,
}

/// Relative error below which the origin expansion is used without consulting the series.
/// Values whose estimated relative error exceeds this are refused.
pub const MAX_REL_ERROR: f64 = 1e-6;
const ORIGIN_ACCEPT: f64 = 1e-14;

/// Rank one: F(λ; x) = Σ f_{2j} x^{2j} with x = α₀(H), α₀ the indivisible simple root.
///
/// With c_α = α/α₀ ∈ {1, 2} the radial equation is f″ + P(x)f′ = E f,
/// P(x) = Σ_{α>0} k_α c_α coth(c_α x/2), E = ((λ,λ) − (ρ,ρ))/|α₀|².
/// x·c coth(cx/2) = 2Σ_n B_{2n}(cx)^{2n}/(2n)!, which gives
/// f_m(m(m−1) + q₀m) = E f_{m−2} − Σ_{n≥1} q_n(m−2n) f_{m−2n}, q_n = 2B_{2n}/(2n)! Σ k_α c_α^{2n}.
#[derive(Clone, Debug)]
struct OriginSeries {
    alpha0: Vec<f64>,
    coeffs: Vec<Complex64>,
    radius: f64,
}

const ORIGIN_TERMS: usize = 120;

/// B_{2n}/(2n)! for n < ORIGIN_TERMS.
fn bernoulli_even_scaled() -> &'static [f64] {
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let b = crate::dunkl::bernoulli_plus(2 * ORIGIN_TERMS);
        let mut fact = num_bigint::BigInt::from(1);
        let mut out = Vec::with_capacity(ORIGIN_TERMS);
        for m in 0..=2 * ORIGIN_TERMS {
            if m > 0 {
                fact *= num_bigint::BigInt::from(m as i64);
            }
            if m % 2 == 0 && out.len() < ORIGIN_TERMS {
                let v = &b[m] / num_rational::BigRational::from_integer(fact.clone());
                out.push(v.to_f64().unwrap_or(0.0));
            }
        }
        out
    })
}

impl OriginSeries {
    fn new(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> Option<Self> {
        if rs.rank() != 1 || k.is_zero() {
            return None;
        }
        let a0i = rs.simple()[0];
        let alpha0 = rs.root_f64(a0i).to_vec();
        let n0 = rs.dot_f64(&alpha0, &alpha0);
        let c0 = rs.coeffs(a0i)[0] as f64;
        let parts: Vec<(f64, f64)> = rs.positive().iter().map(|&a| (k.at(rs, a), rs.coeffs(a)[0] as f64 / c0)).collect();
        let g = rs.gram_f64();
        let mut ll = Complex64::zero();
        for i in 0..lambda.len() {
            for j in 0..lambda.len() {
                ll += lambda[i] * lambda[j] * g[i][j];
            }
        }
        let rho = rs.rho_weighted(k);
        let e = (ll - rs.dot_f64(&rho, &rho)) / n0;
        let bern = bernoulli_even_scaled();
        let q: Vec<f64> = (0..ORIGIN_TERMS).map(|n| 2.0 * bern[n] * parts.iter().map(|(ka, ca)| ka * ca.powi(2 * n as i32)).sum::<f64>()).collect();
        let cmax = parts.iter().map(|p| p.1).fold(1.0, f64::max);
        let mut f = vec![Complex64::new(1.0, 0.0)];
        for j in 1..ORIGIN_TERMS {
            let m = (2 * j) as f64;
            let den = m * (m - 1.0) + q[0] * m;
            if den.abs() < 1e-12 {
                return None;
            }
            let mut rhs = e * f[j - 1];
            for n in 1..j {
                rhs -= q[n] * (m - 2.0 * n as f64) * f[j - n];
            }
            f.push(rhs / den);
        }
        Some(OriginSeries { alpha0, coeffs: f, radius: 2.0 * PI / cmax })
    }

    /// (value, relative error estimate), or None outside the usable disc.
    fn eval(&self, x: f64) -> Option<(Complex64, f64)> {
        if x > 0.5 * self.radius {
            return None;
        }
        let x2 = x * x;
        let mut p = 1.0;
        let mut s = Complex64::zero();
        let mut abs = 0.0;
        let mut small = 0;
        for c in &self.coeffs {
            let t = c * p;
            s += t;
            abs += t.norm();
            if t.norm() <= 1e-18 * s.norm() {
                small += 1;
                if small >= 3 {
                    return Some((s, 4.0 * f64::EPSILON * abs / s.norm().max(f64::MIN_POSITIVE)));
                }
            } else {
                small = 0;
            }
            p *= x2;
        }
        None
    }
}

/// Size of the imaginary shift used in perturb mode.
pub const PERTURB_EPS: f64 = 1e-6;

impl HypergeometricEvaluator {
    pub fn new(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], policy: TruncationPolicy) -> Result<Self> {
        let mut ev = Self::build(rs, k, lambda, TruncationPolicy { perturb: false, ..policy })?;
        if policy.perturb && !k.is_zero() {
            // F is entire in λ, so the symmetric average is O(ε²) off; shifting c̃ and Φ together
            // keeps the cancellation between resonant terms intact
            let dir = rs.rho_weighted(&Multiplicity::constant(rs, 1.0));
            let nrm = rs.dot_f64(&dir, &dir).sqrt();
            let shift = |sgn: f64| -> Vec<Complex64> { lambda.iter().zip(&dir).map(|(l, d)| l + Complex64::new(0.0, sgn * PERTURB_EPS * d / nrm)).collect() };
            let p = TruncationPolicy { perturb: false, ..policy };
            ev.shifted = Some(Box::new((Self::build(rs, k, &shift(1.0), p)?, Self::build(rs, k, &shift(-1.0), p)?)));
            ev.policy.perturb = true;
        }
        Ok(ev)
    }

    fn build(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], policy: TruncationPolicy) -> Result<Self> {
        let rho = c_tilde_rho(rs, k)?;
        if rho.is_zero() {
            return Err(Error::NotRegular);
        }
        let weyl = rs.weyl_elements(DEFAULT_WEYL_CAP)?;
        let mut terms: Vec<Term> = Vec::with_capacity(weyl.len());
        for w in &weyl {
            let wl = rs.act_c(w, lambda);
            let neg: Vec<Complex64> = wl.iter().map(|z| -z).collect();
            let c = c_tilde(rs, k, &neg)?.value;
            if c == Complex64::zero() {
                continue;
            }
            terms.push(Term { lambda: wl, coef: c });
        }
        Ok(HypergeometricEvaluator {
            rs: rs.clone(),
            k: k.clone(),
            lambda: lambda.to_vec(),
            policy,
            terms,
            norm: rho.value,
            tables: Mutex::new(HashMap::new()),
            shifted: None,
            origin: OriginSeries::new(rs, k, lambda),
        })
    }

    pub fn system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    /// c̃(ρ(k)).
    pub fn normalization(&self) -> Complex64 {
        self.norm
    }

    fn tables(&self, n: usize) -> Result<Arc<Vec<Arc<SeriesCoefficients>>>> {
        if let Some(t) = self.tables.lock().unwrap().get(&n) {
            return Ok(t.clone());
        }
        let built: Result<Vec<Arc<SeriesCoefficients>>> = self
            .terms
            .par_iter()
            .map(|t| hc_coefficients_persistent(&self.rs, &self.k, &t.lambda, n, self.policy.perturb).map(Arc::new))
            .collect();
        let built = Arc::new(built?);
        self.tables.lock().unwrap().insert(n, built.clone());
        Ok(built)
    }

    /// Height from which the ladder starts for a point with simple values `sv`.
    fn start_height(&self, sv: &[f64]) -> usize {
        let d = sv.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        let want = if d.is_finite() && d > 0.0 {
            TruncationPolicy::height_for(d, self.policy.tail_tol * 1e-2, 1.0 + self.rs.rank() as f64)
        } else {
            self.policy.max_height
        };
        // round up to max_height·2^j so that nearby points share tables
        let mut n = self.policy.max_height.max(4);
        while n < want && n < height_cap(self.rs.rank()) {
            n *= 2;
        }
        n
    }

    fn check_margin(&self, hp: &[f64]) -> Result<()> {
        if !self.k.is_zero() {
            let dist = self.rs.wall_distance(hp);
            if dist < self.policy.wall_margin {
                return Err(Error::TooCloseToWallOrOrigin { dist, margin: self.policy.wall_margin });
            }
        }
        Ok(())
    }

    /// F̃(λ;H) = Σ_w c̃(−wλ)Φ(wλ;H′).
    pub fn eval_unnormalized(&self, h: &[f64]) -> Result<Complex64> {
        Ok(self.eval_parts(h)?.0)
    }

    /// F̃ together with Σ_w |c̃(−wλ)Φ(wλ;H′)| (the size of the terms that cancel).
    fn eval_parts(&self, h: &[f64]) -> Result<(Complex64, f64)> {
        if let Some(pair) = &self.shifted {
            let (a, aa) = pair.0.eval_parts(h)?;
            let (b, bb) = pair.1.eval_parts(h)?;
            return Ok(((a + b) * 0.5, aa.max(bb)));
        }
        let (_, hp) = self.rs.chamber_map(h);
        self.check_margin(&hp)?;
        if self.k.is_zero() {
            let mut s = Complex64::zero();
            let mut abs = 0.0;
            for t in &self.terms {
                let v = t.coef * self.rs.dot_c(&t.lambda, &hp).exp();
                s += v;
                abs += v.norm();
            }
            return Ok((s, abs));
        }
        let sv = self.rs.simple_values(&hp);
        let mut last_err = None;
        for n in height_ladder(self.start_height(&sv), self.rs.rank()) {
            let tabs = self.tables(n)?;
            let mut s = Complex64::zero();
            let mut abs = 0.0;
            let mut ok = true;
            for (t, sc) in self.terms.iter().zip(tabs.iter()) {
                match phi_eval_full(sc, &hp, &self.policy) {
                    Ok(v) => {
                        s += t.coef * v.value;
                        abs += (t.coef * v.value).norm();
                    }
                    Err(e @ Error::TailNotConverged { .. }) => {
                        last_err = Some(e);
                        ok = false;
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            if ok {
                return Ok((s, abs));
            }
        }
        Err(last_err.unwrap_or(Error::HeightOverflow(height_cap(self.rs.rank()))))
    }

    /// F(λ;H) from the connection formula, with an error estimate
    /// (rounding amplified by cancellation, plus the tail tolerance).
    pub fn eval_series(&self, h: &[f64]) -> Result<(Complex64, f64)> {
        let (s, abs) = self.eval_parts(h)?;
        let mut err = 4.0 * f64::EPSILON * abs / s.norm().max(f64::MIN_POSITIVE) + self.policy.tail_tol;
        if self.shifted.is_some() {
            err += PERTURB_EPS * PERTURB_EPS;
        }
        Ok((s / self.norm, err))
    }

    /// F(λ;H). In rank one the Taylor expansion at the origin replaces the
    /// connection formula when its error estimate is smaller.
    pub fn eval(&self, h: &[f64]) -> Result<Complex64> {
        if let Some(os) = &self.origin {
            let (_, hp) = self.rs.chamber_map(h);
            self.check_margin(&hp)?;
            let x = self.rs.dot_f64(&os.alpha0, &hp).abs();
            if let Some((v, err)) = os.eval(x) {
                if err <= ORIGIN_ACCEPT {
                    return Ok(v);
                }
                return match self.eval_series(h) {
                    Ok((s, serr)) if serr < err => Ok(s),
                    Ok(_) if err <= MAX_REL_ERROR => Ok(v),
                    Ok(_) => Err(Error::PrecisionLoss { estimate: err }),
                    Err(e) if err > 1e-8 => Err(e),
                    Err(_) => Ok(v),
                };
            }
        }
        let (s, err) = self.eval_series(h)?;
        if err > MAX_REL_ERROR {
            return Err(Error::PrecisionLoss { estimate: err });
        }
        Ok(s)
    }

    /// Evaluate on many points in parallel, preserving order.
    pub fn eval_many(&self, hs: &[Vec<f64>]) -> Vec<Result<Complex64>> {
        hs.par_iter().map(|h| self.eval(h)).collect()
    }
}

/// F(Σ′,k,λ;H).
pub fn f_eval(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], h: &[f64], policy: &TruncationPolicy) -> Result<Complex64> {
    HypergeometricEvaluator::new(rs, k, lambda, *policy)?.eval(h)
}

/// e^{t(−λ+ρ(k))(H)} F(tH), which tends to c(λ) for H ∈ 𝔞₊.
pub fn asymptotic_c(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], h: &[f64], t: f64, policy: &TruncationPolicy) -> Result<Complex64> {
    let th: Vec<f64> = h.iter().map(|x| t * x).collect();
    let f = f_eval(rs, k, lambda, &th, policy)?;
    let rho = rs.rho_weighted(k);
    let e = -rs.dot_c(lambda, &th) + rs.dot_f64(&rho, &th);
    Ok(e.exp() * f)
}

/// F(0) by extrapolation along the ray s·H₀ from `npts` points s₀(1 + j/2).
///
/// The fit uses {1, s², s³, ..} (the gradient of a W-invariant function vanishes at 0).
/// Should return 1 up to the extrapolation error.
pub fn f_at_origin(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64], h0: &[f64], s0: f64, npts: usize, policy: &TruncationPolicy) -> Result<Complex64> {
    let npts = npts.max(2);
    let ev = HypergeometricEvaluator::new(rs, k, lambda, *policy)?;
    let ss: Vec<f64> = (0..npts).map(|j| s0 * (1.0 + j as f64 / 2.0)).collect();
    let hs: Vec<Vec<f64>> = ss.iter().map(|s| h0.iter().map(|x| s * x).collect()).collect();
    let vals: Vec<Complex64> = ev.eval_many(&hs).into_iter().collect::<Result<_>>()?;
    let pow = |s: f64, j: usize| if j == 0 { 1.0 } else { s.powi(j as i32 + 1) };
    let vand: Vec<Vec<f64>> = ss.iter().map(|&s| (0..npts).map(|j| pow(s, j)).collect()).collect();
    let inv = linalg::inverse(&vand).ok_or_else(|| Error::Transform("singular extrapolation system".into()))?;
    Ok(inv[0].iter().zip(&vals).map(|(a, v)| v * *a).sum())
}

/// Limit value of [`asymptotic_c`]; same as `c_norm`.
pub fn c_limit(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> Result<Complex64> {
    c_norm(rs, k, lambda)
}

/// Π_{α∈Σ⁺∖2Σ⁺} (cosh α/2)^{a_α} (cosh α)^{b_α}.
#[derive(Clone, Debug, PartialEq)]
pub struct CoshFactor {
    /// (α, exponent at cosh(α/2), exponent at cosh α)
    pub terms: Vec<(Vec<Q>, Q, Q)>,
    roots_f: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
}

impl CoshFactor {
    pub fn evaluate(&self, h: &[f64]) -> f64 {
        let mut v = 1.0;
        for ((_, a, b), r) in self.terms.iter().zip(&self.roots_f) {
            let mut x = 0.0;
            for i in 0..r.len() {
                for j in 0..h.len() {
                    x += r[i] * self.gram[i][j] * h[j];
                }
            }
            if !a.is_zero() {
                v *= (0.5 * x).cosh().powf(q_to_f64(a));
            }
            if !b.is_zero() {
                v *= x.cosh().powf(q_to_f64(b));
            }
        }
        v
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.iter().all(|(_, a, b)| a.is_zero() && b.is_zero())
    }
}

impl fmt::Display for CoshFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .flat_map(|(r, a, b)| {
                let v = fmt_vec(r);
                let mut p = Vec::new();
                if !a.is_zero() {
                    p.push(format!("cosh({v}/2)^({a})"));
                }
                if !b.is_zero() {
                    p.push(format!("cosh({v})^({b})"));
                }
                p
            })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" * "))
        }
    }
}

fn times(v: &[Q], c: i64) -> Vec<Q> {
    v.iter().map(|x| x * qi(c)).collect()
}

/// Build the cosh-factor after checking (m_α+m_{2α})/2 = k_α+k_{2α}+k_{4α}
/// for every α ∈ Σ⁺∖2Σ⁺.
pub fn cosh_factor(sigma: &RootSystem, m: &[Q], sigma_pi: &RootSystem, k_pi: &[Q]) -> Result<CoshFactor> {
    crate::cfunc::check_mc1(sigma, sigma_pi)?;
    let mut bad = Vec::new();
    let mut terms = Vec::new();
    let mut roots_f = Vec::new();
    for &a in sigma.positive() {
        if sigma.half_of(a).is_some() {
            continue;
        }
        let v = sigma.root(a);
        let (v2, v4) = (times(v, 2), times(v, 4));
        let k1 = k_on(sigma_pi, k_pi, v);
        let k2 = k_on(sigma_pi, k_pi, &v2);
        let k4 = k_on(sigma_pi, k_pi, &v4);
        let m1 = k_on(sigma, m, v);
        let m2 = k_on(sigma, m, &v2);
        if (m1 + m2) / qi(2) != k1 + k2 + k4 {
            bad.push(fmt_vec(v));
        }
        terms.push((v.to_vec(), -k1, k4 - m2 / qi(2)));
        roots_f.push(sigma.root_f64(a).to_vec());
    }
    if !bad.is_empty() {
        return Err(Error::RegularityViolated(bad));
    }
    Ok(CoshFactor { terms, roots_f, gram: sigma.gram_f64().to_vec() })
}

/// Group data plus one matched pair; the inputs of Υ and the radial Casimir.
#[derive(Clone, Debug)]
pub struct SphericalData<'a> {
    pub sigma: &'a RootSystem,
    pub m: &'a [Q],
    pub kappa: &'a [Q],
    pub sigma_pi: &'a RootSystem,
    pub k_pi: &'a [Q],
}

impl SphericalData<'_> {
    pub fn k_multiplicity(&self) -> Multiplicity {
        Multiplicity::from_exact(self.k_pi.to_vec())
    }
}

/// Υ^π(φ^π_λ)(H) = cosh-factor(H) · F(Σ^π,k^π,λ;H).
pub fn upsilon_eval(d: &SphericalData, lambda: &[Complex64], h: &[f64], policy: &TruncationPolicy) -> Result<Complex64> {
    let cf = cosh_factor(d.sigma, d.m, d.sigma_pi, d.k_pi)?;
    Ok(f_eval(d.sigma_pi, &d.k_multiplicity(), lambda, h, policy)? * cf.evaluate(h))
}

/// Υ for fixed λ on many points.
pub struct UpsilonEvaluator {
    cf: CoshFactor,
    f: HypergeometricEvaluator,
}

impl UpsilonEvaluator {
    pub fn new(d: &SphericalData, lambda: &[Complex64], policy: &TruncationPolicy) -> Result<Self> {
        let cf = cosh_factor(d.sigma, d.m, d.sigma_pi, d.k_pi)?;
        let f = HypergeometricEvaluator::new(d.sigma_pi, &d.k_multiplicity(), lambda, *policy)?;
        Ok(UpsilonEvaluator { cf, f })
    }

    pub fn eval(&self, h: &[f64]) -> Result<Complex64> {
        Ok(self.f.eval(h)? * self.cf.evaluate(h))
    }

    pub fn cosh_factor(&self) -> &CoshFactor {
        &self.cf
    }
}

/// ρ = ½ Σ_{α∈Σ⁺} m_α α.
pub fn rho_group(sigma: &RootSystem, m: &[Q]) -> Vec<f64> {
    let mf: Vec<f64> = m.iter().map(q_to_f64).collect();
    sigma.rho_weighted(&Multiplicity::from_f64(mf))
}

/// Apply Ω_𝔞 + Σ_{α∈Σ⁺} m_α(coth α·∂_α − κ_α‖α‖²/(4cosh²(α/2))) to Υ by
/// central differences with step h and compare with ((λ,λ) − ‖ρ‖²)Υ.
/// Returns |LHS − eigenvalue·Υ| / (1 + |Υ|).
pub fn casimir_residual(d: &SphericalData, lambda: &[Complex64], hpt: &[f64], step: f64, policy: &TruncationPolicy) -> Result<f64> {
    let sigma = d.sigma;
    let ups = UpsilonEvaluator::new(d, lambda, policy)?;
    casimir_residual_with(sigma, d.m, d.kappa, |x| ups.eval(x), lambda, hpt, step)
}

/// Same as [`casimir_residual`] for an arbitrary function `f`.
pub fn casimir_residual_with<F>(sigma: &RootSystem, m: &[Q], kappa: &[Q], f: F, lambda: &[Complex64], hpt: &[f64], step: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let gram = sigma.gram_f64();
    let span: Vec<Vec<f64>> = sigma.simple().iter().map(|&s| sigma.root_f64(s).to_vec()).collect();
    let basis = linalg::orthonormal_basis(&span, gram);
    let dist = sigma.wall_distance(hpt);
    let max_len = sigma
        .positive()
        .iter()
        .map(|&a| {
            let r = sigma.root_f64(a);
            sigma.dot_f64(r, r).sqrt()
        })
        .fold(0.0, f64::max);
    // the stencil (including steps along roots) must stay inside the chamber
    let reach = step * max_len * max_len.max(1.0);
    if reach * 4.0 >= dist {
        return Err(Error::StepTooLarge { h: step, dist });
    }
    let shift = |v: &[f64], c: f64| -> Vec<f64> { hpt.iter().zip(v).map(|(x, y)| x + c * y).collect() };
    let f0 = f(hpt)?;
    let mut lap = Complex64::zero();
    for e in &basis {
        let fp = f(&shift(e, step))?;
        let fm = f(&shift(e, -step))?;
        lap += (fp - 2.0 * f0 + fm) / (step * step);
    }
    let mut first = Complex64::zero();
    let mut pot = 0.0;
    for &a in sigma.positive() {
        let o = sigma.orbit_of(a);
        let ma = q_to_f64(&m[o]);
        if ma == 0.0 {
            continue;
        }
        let r = sigma.root_f64(a);
        let x = sigma.dot_f64(r, hpt);
        let fp = f(&shift(r, step))?;
        let fm = f(&shift(r, -step))?;
        first += ma / x.tanh() * (fp - fm) / (2.0 * step);
        let n2 = sigma.dot_f64(r, r);
        pot += ma * q_to_f64(&kappa[o]) * n2 / (4.0 * (0.5 * x).cosh().powi(2));
    }
    let lhs = lap + first - pot * f0;
    let rho = rho_group(sigma, m);
    let lam: Complex64 = {
        let g = gram;
        let mut s = Complex64::zero();
        for i in 0..lambda.len() {
            for j in 0..lambda.len() {
                s += lambda[i] * lambda[j] * g[i][j];
            }
        }
        s
    };
    let eig = lam - sigma.dot_f64(&rho, &rho);
    Ok((lhs - eig * f0).norm() / (1.0 + f0.norm()))
}

/// Potential of L(Σ′,k) in Schrödinger form:
/// Σ_{α>0} k_α(1 − k_α − 2k_{2α})‖α‖²/(4 sinh²(α/2)).
pub fn potential_hypergeometric(rs: &RootSystem, k: &[Q], h: &[f64]) -> f64 {
    let mut v = 0.0;
    for &a in rs.positive() {
        let ka = q_to_f64(&k[rs.orbit_of(a)]);
        if ka == 0.0 {
            continue;
        }
        let k2 = rs.double_of(a).map(|d| q_to_f64(&k[rs.orbit_of(d)])).unwrap_or(0.0);
        let r = rs.root_f64(a);
        let x = rs.dot_f64(r, h);
        v += ka * (1.0 - ka - 2.0 * k2) * rs.dot_f64(r, r) / (4.0 * (0.5 * x).sinh().powi(2));
    }
    v
}

/// Potential of the radial Casimir conjugated by δ_{G/K}^{1/2}:
/// Σ_{α∈Σ⁺} [ (m_α/2)(1 − m_α/2 − m_{2α})‖α‖²/sinh²α − m_ακ_α‖α‖²/(4cosh²(α/2)) ].
pub fn potential_group(sigma: &RootSystem, m: &[Q], kappa: &[Q], h: &[f64]) -> f64 {
    let mut v = 0.0;
    for &a in sigma.positive() {
        let o = sigma.orbit_of(a);
        let ma = q_to_f64(&m[o]);
        let m2 = sigma.double_of(a).map(|d| q_to_f64(&m[sigma.orbit_of(d)])).unwrap_or(0.0);
        let r = sigma.root_f64(a);
        let n2 = sigma.dot_f64(r, r);
        let x = sigma.dot_f64(r, h);
        v += 0.5 * ma * (1.0 - 0.5 * ma - m2) * n2 / x.sinh().powi(2);
        v -= ma * q_to_f64(&kappa[o]) * n2 / (4.0 * (0.5 * x).cosh().powi(2));
    }
    v
}

/// k^π as exact rationals, if it is.
pub fn exact_k(k: &Multiplicity) -> Option<Vec<Q>> {
    k.exact.clone()
}

/// 2^e as f64.
pub fn two_pow(e: &Q) -> f64 {
    2f64.powf(e.to_f64().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::q;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn a1_k1_closed_form() {
        let rs = RootSystem::build("A", 1).unwrap();
        let k = Multiplicity::constant_exact(&rs, qi(1));
        let x = c(0.7, 0.3);
        let lam = rs.lambda_from_coroot_values(&[x]);
        let ev = HypergeometricEvaluator::new(&rs, &k, &lam, TruncationPolicy::default()).unwrap();
        for &a in &[-3.0, -1.0, -0.3, 0.5, 2.0] {
            let h = rs.h_from_simple_values(&[a]);
            let lh = rs.dot_c(&lam, &h);
            let want = lh.sinh() / (x * (0.5 * a).sinh());
            let got = ev.eval(&h).unwrap();
            assert!((got - want).norm() < 1e-10 * (1.0 + want.norm()), "{a}: {got} vs {want}");
        }
    }

    #[test]
    fn zero_k_average() {
        let rs = RootSystem::build("B", 2).unwrap();
        let k = Multiplicity::zero(&rs);
        let lam = rs.lambda_from_coroot_values(&[c(0.3, 0.2), c(-0.5, 1.0)]);
        let h = vec![0.4, -1.1];
        let f = f_eval(&rs, &k, &lam, &h, &TruncationPolicy::default()).unwrap();
        let ws = rs.weyl_elements(100).unwrap();
        let want: Complex64 = ws.iter().map(|w| rs.dot_c(&rs.act_c(w, &lam), &h).exp()).sum::<Complex64>() / ws.len() as f64;
        assert!((f - want).norm() < 1e-12);
    }

    #[test]
    fn cosh_factor_examples() {
        // sp(2,1), π_3 with the upper sign: (cosh α)^{-4}
        let bc = RootSystem::build("BC", 1).unwrap();
        let m = vec![qi(4), qi(3)];
        let pi = RootSystem::from_vectors(vec![vec![qi(2)], vec![qi(-2)], vec![qi(4)], vec![qi(-4)]], vec![vec![qi(1)]], None, "pi").unwrap();
        let k2 = pi.orbit_of(pi.index_of(&[qi(2)]).unwrap());
        let mut kp = vec![Q::zero(); 2];
        kp[k2] = qi(6);
        kp[1 - k2] = q(1, 2) - qi(3);
        let cf = cosh_factor(&bc, &m, &pi, &kp).unwrap();
        let t = 0.8f64;
        assert!((cf.evaluate(&[t]) - t.cosh().powi(-4)).abs() < 1e-14);
        assert_eq!(cf.evaluate(&[0.0]), 1.0);
        kp[k2] = qi(5);
        assert!(matches!(cosh_factor(&bc, &m, &pi, &kp), Err(Error::RegularityViolated(_))));
    }

    #[test]
    fn casimir_trivial_a1() {
        let a1 = RootSystem::build("A", 1).unwrap();
        let m = vec![qi(2)];
        let kappa = vec![Q::zero()];
        let sigma_pi = RootSystem::from_vectors(
            a1.roots().iter().map(|v| v.iter().map(|x| x * qi(2)).collect()).collect(),
            a1.gram().to_vec(),
            None,
            "2A1",
        )
        .unwrap();
        let kp = vec![qi(1)];
        let d = SphericalData { sigma: &a1, m: &m, kappa: &kappa, sigma_pi: &sigma_pi, k_pi: &kp };
        let lam = sigma_pi.lambda_from_coroot_values(&[c(0.4, 0.9)]);
        let h = a1.h_from_simple_values(&[-1.3]);
        let r = casimir_residual(&d, &lam, &h, 1e-3, &TruncationPolicy::default()).unwrap();
        assert!(r < 1e-5, "{r}");
        let bad = vec![q(-1, 10)];
        let d2 = SphericalData { kappa: &bad, ..d };
        let r2 = casimir_residual(&d2, &lam, &h, 1e-3, &TruncationPolicy::default()).unwrap();
        assert!(r2 > 1e-2, "{r2}");
    }

    #[test]
    fn cancellation_near_wall_is_refused() {
        let rs = RootSystem::from_label("BC2").unwrap();
        let k = Multiplicity::from_f64(vec![0.0, 1.98, 1.96]);
        let lam = rs.lambda_from_coroot_values(&[c(0.113, 0.0), c(0.071, 0.0)]);
        let h = rs.h_from_simple_values(&[-0.07, -0.44]);
        let r = f_eval(&rs, &k, &lam, &h, &TruncationPolicy::default());
        assert!(matches!(r, Err(Error::PrecisionLoss { .. })), "{:?}", r);
    }
}
