//! Gamma-product c-functions, regularity, and the group-side c^π.
//!
//! c̃(λ) = Π_{α>0} Γ(λ(α^∨) + ½k_{α/2}) / Γ(λ(α^∨) + ½k_{α/2} + k_α)
//! is evaluated as Π rΓ(den) / Π rΓ(num) with the entire function rΓ = 1/Γ,
//! so zeros and poles are explicit. Simultaneous zeros are resolved to first
//! order along a fixed generic direction.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rootsys::{fmt_vec, q_to_f64, qi, Multiplicity, RootSystem, Q};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Nonpositive integer n with z = -n, within 1e-12.
fn near_pole(z: Complex64) -> Option<i64> {
    if z.im.abs() > 1e-12 || z.re > 0.5 {
        return None;
    }
    let n = z.re.round();
    if (z.re - n).abs() <= 1e-12 {
        Some(-n as i64)
    } else {
        None
    }
}

fn log_gamma_lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// log Γ(z) via the Lanczos approximation, with the reflection formula for Re z < ½.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if let Some(n) = near_pole(z) {
        return Err(Error::PoleAtNonpositiveInteger(-(n as f64)));
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = (PI * z).sin();
        Ok(Complex64::new(PI.ln(), 0.0) - s.ln() - log_gamma_lanczos(1.0 - z))
    } else {
        Ok(log_gamma_lanczos(z))
    }
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|l| l.exp())
}

/// Reciprocal Gamma, entire.
pub fn rgamma(z: Complex64) -> Complex64 {
    if near_pole(z).is_some() && z.im == 0.0 && z.re == z.re.round() {
        return Complex64::zero();
    }
    if z.re < 0.5 {
        // 1/Γ(z) = sin(πz) Γ(1−z) / π
        (PI * z).sin() * log_gamma_lanczos(1.0 - z).exp() / PI
    } else {
        (-log_gamma_lanczos(z)).exp()
    }
}

fn factorial(n: i64) -> f64 {
    (1..=n).fold(1.0, |a, b| a * b as f64)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PoleFlag {
    pub root: String,
    /// "num" for Γ(λ(α^∨)+½k_{α/2}), "den" for Γ(λ(α^∨)+½k_{α/2}+k_α)
    pub side: String,
    pub at: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CFunctionValue {
    #[serde(serialize_with = "crate::ser_complex")]
    pub value: Complex64,
    pub pole_flags: Vec<PoleFlag>,
    pub limit_used: bool,
}

impl CFunctionValue {
    pub fn is_zero(&self) -> bool {
        self.value == Complex64::zero()
    }
}

/// One Gamma argument: its value, optional exact value, and derivatives along
/// the perturbation directions used for limits.
struct GammaArg {
    root: usize,
    value: Complex64,
    exact: Option<Q>,
    slopes: Vec<f64>,
}

impl GammaArg {
    fn pole(&self) -> Option<i64> {
        match &self.exact {
            Some(x) => {
                if x.is_integer() && *x <= Q::zero() {
                    Some(-x.to_integer())
                } else {
                    None
                }
            }
            None => near_pole(self.value),
        }
    }
}

fn ratio_with_limits(rs: &RootSystem, num: &[GammaArg], den: &[GammaArg]) -> Result<CFunctionValue> {
    let mut flags = Vec::new();
    let mut zn = 0;
    let mut zd = 0;
    for (side, args) in [("num", num), ("den", den)] {
        for a in args {
            if let Some(n) = a.pole() {
                flags.push(PoleFlag { root: fmt_vec(rs.root(a.root)), side: side.into(), at: -n });
                if side == "num" {
                    zn += 1;
                } else {
                    zd += 1;
                }
            }
        }
    }
    // finite part: Σ log Γ over non-vanishing factors (products of rΓ underflow for large k)
    let finite = |args: &[GammaArg]| -> Result<Complex64> {
        args.iter().filter(|a| a.pole().is_none()).map(|a| log_gamma(a.value)).sum()
    };
    let base = (finite(num)? - finite(den)?).exp();
    if zn == 0 {
        let value = if zd > 0 { Complex64::zero() } else { base };
        return Ok(CFunctionValue { value, pole_flags: flags, limit_used: false });
    }
    if zd > zn {
        return Ok(CFunctionValue { value: Complex64::zero(), pole_flags: flags, limit_used: true });
    }
    if zn > zd {
        return Err(Error::CFunctionPole { poles: zn, zeros: zd });
    }
    // equal orders: ratio of leading coefficients, rΓ(−n+δ) ≈ (−1)^n n! δ
    let ndir = num.iter().chain(den).map(|a| a.slopes.len()).max().unwrap_or(0);
    let mut results = Vec::new();
    for d in 0..ndir {
        let lead = |args: &[GammaArg]| -> Option<f64> {
            let mut p = 1.0;
            for a in args {
                if let Some(n) = a.pole() {
                    let s = a.slopes[d];
                    if s.abs() < 1e-12 {
                        return None;
                    }
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    p *= sign * factorial(n) * s;
                }
            }
            Some(p)
        };
        if let (Some(a), Some(b)) = (lead(den), lead(num)) {
            results.push(base * a / b);
        }
    }
    match results.first() {
        None => Err(Error::IndeterminateAfterLimit("a vanishing Gamma argument is constant along every test direction".into())),
        Some(&v) => {
            for r in &results[1..] {
                if (r - v).norm() > 1e-9 * (1.0 + v.norm()) {
                    return Err(Error::IndeterminateAfterLimit("limit depends on the direction of approach".into()));
                }
            }
            Ok(CFunctionValue { value: v, pole_flags: flags, limit_used: true })
        }
    }
}

/// Direction vectors with small, generic rational entries.
const DIRS: [[i64; 4]; 2] = [[7, 3, 5, 2], [4, 9, 2, 11]];

fn k_at(rs: &RootSystem, k: &Multiplicity, root: Option<usize>) -> f64 {
    root.map(|i| k.at(rs, i)).unwrap_or(0.0)
}

/// c̃(Σ′,k,λ). λ is an ambient complex vector. Limits are taken along λ.
pub fn c_tilde(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> Result<CFunctionValue> {
    let dirs: Vec<Vec<f64>> = DIRS
        .iter()
        .map(|d| (0..rs.ambient_dim()).map(|i| d[i % 4] as f64 / 7.0 + 0.01 * i as f64).collect())
        .collect();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for &a in rs.positive() {
        let cor = rs.coroot_f64(a);
        let x = rs.dot_c(lambda, &cor) + 0.5 * k_at(rs, k, rs.half_of(a));
        let slopes: Vec<f64> = dirs.iter().map(|d| rs.dot_f64(d, &cor)).collect();
        num.push(GammaArg { root: a, value: x, exact: None, slopes: slopes.clone() });
        den.push(GammaArg { root: a, value: x + k.at(rs, a), exact: None, slopes });
    }
    ratio_with_limits(rs, &num, &den)
}

/// c̃(Σ′,k,ρ(k)); the arguments are linear in k, limits are taken along k.
pub fn c_tilde_rho(rs: &RootSystem, k: &Multiplicity) -> Result<CFunctionValue> {
    let no = rs.orbits().len();
    let dirs: Vec<Vec<Q>> = DIRS.iter().map(|d| (0..no).map(|i| Q::new(d[i % 4], 7)).collect()).collect();
    let exact_k = k.exact.clone();
    let rho_f = rs.rho_weighted(k);
    let rho_e = exact_k.as_ref().map(|e| rs.rho_weighted_exact(e));
    let dir_rho: Vec<Vec<Q>> = dirs.iter().map(|d| rs.rho_weighted_exact(d)).collect();
    let mut num = Vec::new();
    let mut den = Vec::new();
    for &a in rs.positive() {
        let cor_e = rs.coroot(rs.root(a)).expect("root");
        let cor = rs.coroot_f64(a);
        let half = rs.half_of(a);
        let o = rs.orbit_of(a);
        let x = rs.dot_f64(&rho_f, &cor) + 0.5 * k_at(rs, k, half);
        let xe = match (&rho_e, &exact_k) {
            (Some(r), Some(e)) => Some(rs.dot(r, &cor_e) + half.map(|h| e[rs.orbit_of(h)] / qi(2)).unwrap_or_else(Q::zero)),
            _ => None,
        };
        let sn: Vec<f64> = dirs
            .iter()
            .zip(&dir_rho)
            .map(|(d, dr)| q_to_f64(&(rs.dot(dr, &cor_e) + half.map(|h| d[rs.orbit_of(h)] / qi(2)).unwrap_or_else(Q::zero))))
            .collect();
        let sd: Vec<f64> = sn.iter().zip(&dirs).map(|(s, d)| s + q_to_f64(&d[o])).collect();
        num.push(GammaArg { root: a, value: Complex64::new(x, 0.0), exact: xe, slopes: sn });
        den.push(GammaArg {
            root: a,
            value: Complex64::new(x + k.values[o], 0.0),
            exact: xe.map(|v| v + exact_k.as_ref().unwrap()[o]),
            slopes: sd,
        });
    }
    ratio_with_limits(rs, &num, &den)
}

pub fn is_regular(rs: &RootSystem, k: &Multiplicity) -> Result<bool> {
    Ok(!c_tilde_rho(rs, k)?.is_zero())
}

/// c(λ) = c̃(λ)/c̃(ρ(k)).
pub fn c_norm(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> Result<Complex64> {
    let d = c_tilde_rho(rs, k)?;
    if d.is_zero() {
        return Err(Error::NotRegular);
    }
    Ok(c_tilde(rs, k, lambda)?.value / d.value)
}

/// k on a root of another system, by ambient vector; 0 when absent.
pub fn k_on(rs: &RootSystem, k: &[Q], v: &[Q]) -> Q {
    rs.index_of(v).map(|i| k[rs.orbit_of(i)]).unwrap_or_else(Q::zero)
}

/// e(Σ^π,k^π) = Σ_{α∈Σ⁺∖2Σ⁺} (k^π_α − k^π_{4α} + m_{2α}/2).
pub fn e_exponent(sigma: &RootSystem, m: &[Q], sigma_pi: &RootSystem, k_pi: &[Q]) -> Result<Q> {
    check_mc1(sigma, sigma_pi)?;
    let mut e = Q::zero();
    for &a in sigma.positive() {
        if sigma.half_of(a).is_some() {
            continue;
        }
        let v = sigma.root(a);
        let v2: Vec<Q> = v.iter().map(|x| x * qi(2)).collect();
        let v4: Vec<Q> = v.iter().map(|x| x * qi(4)).collect();
        e += k_on(sigma_pi, k_pi, v) - k_on(sigma_pi, k_pi, &v4) + k_on(sigma, m, &v2) / qi(2);
    }
    Ok(e)
}

pub fn check_mc1(sigma: &RootSystem, sigma_pi: &RootSystem) -> Result<()> {
    for v in sigma_pi.roots() {
        let half: Vec<Q> = v.iter().map(|x| x / qi(2)).collect();
        if sigma.index_of(v).is_none() && sigma.index_of(&half).is_none() {
            return Err(Error::MC1Violated);
        }
    }
    Ok(())
}

/// c^π(λ) = 2^e c(Σ^π,k^π,λ).
pub fn c_pi(sigma: &RootSystem, m: &[Q], sigma_pi: &RootSystem, k_pi: &[Q], lambda: &[Complex64]) -> Result<Complex64> {
    let e = e_exponent(sigma, m, sigma_pi, k_pi)?;
    let k = Multiplicity::from_exact(k_pi.to_vec());
    Ok(c_norm(sigma_pi, &k, lambda)? * 2f64.powf(e.to_f64().unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::q;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!((log_gamma(c(0.5, 0.0)).unwrap() - c(PI.sqrt().ln(), 0.0)).norm() < 1e-14);
        let z = c(2.0, 3.0);
        let lhs = gamma(z + 1.0).unwrap();
        let rhs = z * gamma(z).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::PoleAtNonpositiveInteger(_))));
    }

    #[test]
    fn functional_equations_on_grid() {
        for re in [-7.3, -2.5, -0.4, 0.3, 1.7, 4.2, 11.5, 30.5] {
            for im in [-5.0, -0.7, 0.0, 0.9, 6.0] {
                let z = c(re, im);
                let g = gamma(z).unwrap();
                let g1 = gamma(z + 1.0).unwrap();
                assert!((g1 - z * g).norm() <= 1e-12 * g1.norm().max(1e-300), "recurrence at {}", z);
                // reflection: Γ(z)Γ(1−z) sin(πz) = π
                let r = g * gamma(1.0 - z).unwrap() * (PI * z).sin();
                assert!((r - PI).norm() <= 1e-12 * PI, "reflection at {}", z);
            }
        }
    }

    #[test]
    fn rgamma_zeros() {
        assert_eq!(rgamma(c(-2.0, 0.0)), Complex64::zero());
        let d = 1e-7;
        let v = rgamma(c(-2.0 + d, 0.0));
        assert!((v.re - 2.0 * d).abs() < 1e-12);
    }

    #[test]
    fn c_tilde_examples() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let k1 = Multiplicity::constant_exact(&a1, qi(1));
        let lam = a1.lambda_from_coroot_values(&[c(0.8, 0.3)]);
        let v = c_tilde(&a1, &k1, &lam).unwrap();
        assert!((v.value - 1.0 / c(0.8, 0.3)).norm() < 1e-14);
        let k0 = Multiplicity::zero(&a1);
        assert!((c_tilde(&a1, &k0, &lam).unwrap().value - 1.0).norm() < 1e-15);
        let r = c_tilde_rho(&a1, &k0).unwrap();
        assert!(r.limit_used);
        assert!((r.value - 2.0).norm() < 1e-12);
        assert!((c_norm(&a1, &k0, &lam).unwrap() - 0.5).norm() < 1e-12);
        assert!((c_norm(&a1, &k1, &lam).unwrap() - 1.0 / c(0.8, 0.3)).norm() < 1e-14);
    }

    #[test]
    fn regularity_examples() {
        let a1 = RootSystem::from_label("A1").unwrap();
        assert!(is_regular(&a1, &Multiplicity::from_exact(vec![q(1, 2)])).unwrap());
        assert!(!is_regular(&a1, &Multiplicity::from_exact(vec![q(-1, 2)])).unwrap());
        assert!(is_regular(&a1, &Multiplicity::zero(&a1)).unwrap());
        // k = -1: Γ(-1)/Γ(-2), both infinite; the limit is finite and nonzero
        let r = c_tilde_rho(&a1, &Multiplicity::from_exact(vec![qi(-1)])).unwrap();
        assert!(r.limit_used);
        assert!((r.value.re + 4.0).abs() < 1e-12, "{:?}", r.value);
        let bc1 = RootSystem::from_label("BC1").unwrap();
        let k = Multiplicity::from_exact(vec![q(3, 2), q(1, 3)]);
        let expect = gamma(c(1.5 + 1.0 / 3.0, 0.0)).unwrap() / gamma(c(3.0 + 2.0 / 3.0, 0.0)).unwrap();
        assert!((c_tilde_rho(&bc1, &k).unwrap().value - expect).norm() < 1e-13);
    }

    #[test]
    fn normalization_at_rho() {
        for tag in ["A2", "B2", "G2", "BC2"] {
            let rs = RootSystem::from_label(tag).unwrap();
            let k = Multiplicity::from_f64((0..rs.orbits().len()).map(|i| 0.7 + 0.3 * i as f64).collect());
            let rho: Vec<Complex64> = rs.rho_weighted(&k).iter().map(|&x| c(x, 0.0)).collect();
            assert!((c_norm(&rs, &k, &rho).unwrap() - 1.0).norm() < 1e-12, "{}", tag);
        }
    }

    #[test]
    fn large_k_does_not_underflow() {
        // F4 with k = (1/2, 4): the Gamma arguments at ρ(k) reach ~60
        let rs = RootSystem::from_label("F4").unwrap();
        let k = Multiplicity::from_exact(vec![q(1, 2), qi(4)]);
        let v = c_tilde_rho(&rs, &k).unwrap().value;
        assert!(v.norm() > 0.0 && v.norm().is_finite());
        let lam: Vec<Complex64> = rs.lambda_from_coroot_values(&[c(0.0, 0.1); 4]);
        assert!(c_norm(&rs, &k, &lam).unwrap().norm().is_finite());
    }

    #[test]
    fn pole_is_reported() {
        let rs = RootSystem::from_label("A1").unwrap();
        let k = Multiplicity::from_exact(vec![qi(1)]);
        let lam = rs.lambda_from_coroot_values(&[c(0.0, 0.0)]);
        assert!(matches!(c_tilde(&rs, &k, &lam), Err(Error::CFunctionPole { poles: 1, zeros: 0 })));
    }
}
