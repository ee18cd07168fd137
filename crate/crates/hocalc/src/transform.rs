//! Hypergeometric Fourier transform ℱ(Σ′,k), its inversion against the
//! Plancherel density |c(λ)|⁻², and the π-spherical transform.
//!
//! Coordinates: 𝔞 is parametrized by an orthonormal frame b_1..b_r (w.r.t. the
//! Gram matrix), H = Σ y_i b_i, and the spectrum by λ = Σ iξ_i b_i, so that
//! λ(H) = iξ·y and dλ = dξ/(2π)^r.
//!
//! Near walls the series for F is not evaluated: values within `wall_margin`
//! of a wall come from polynomial extrapolation along a regular direction.
//! Optionally the forward integrand is set to 0 there instead (the weight
//! vanishes to order 2Σk, but the jump shows up as a flat floor in ℱf).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cfunc::{c_norm, check_mc1, e_exponent};
use crate::error::{Error, Result};
use crate::hyperfun::{cosh_factor, HypergeometricEvaluator, UpsilonEvaluator, SphericalData};
use crate::ktypes::{MatchedPair, SmallKTypeRecord};
use crate::linalg;
use crate::rootsys::{primitive_direction, q_to_f64, Multiplicity, RootSystem, DEFAULT_WEYL_CAP, Q};
use crate::series::TruncationPolicy;

#[derive(Clone, Copy, Debug)]
pub struct TransformOptions {
    /// Points closer than this to a wall are not evaluated by the series.
    pub wall_margin: f64,
    /// Spectral cutoff: stop when |ℱf|·|c|⁻² drops below this (relative to its max).
    pub spectral_tol: f64,
    pub panel_width: f64,
    pub panel_nodes: usize,
    /// Hard cap on the cutoff; defaults to the grid Nyquist frequency.
    pub max_cutoff: Option<f64>,
    pub extrapolation_nodes: usize,
    /// Forward integrand inside the margin: 0 (true) or extrapolated F (false).
    pub zero_inside_margin: bool,
    pub policy: TruncationPolicy,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            wall_margin: 0.05,
            spectral_tol: 1e-8,
            panel_width: 1.0,
            panel_nodes: 16,
            max_cutoff: None,
            extrapolation_nodes: 8,
            zero_inside_margin: false,
            policy: TruncationPolicy::default(),
        }
    }
}

impl TransformOptions {
    fn policy_for(&self, k: &Multiplicity) -> TruncationPolicy {
        let mut p = self.policy;
        p.wall_margin = if k.is_zero() { 0.0 } else { self.wall_margin };
        p
    }

    fn margin_for(&self, k: &Multiplicity) -> f64 {
        if k.is_zero() {
            0.0
        } else {
            self.wall_margin
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Space,
    Spectrum,
}

/// Quadrature nodes in frame coordinates with their weights.
#[derive(Clone, Debug)]
pub struct Grid {
    pub domain: Domain,
    pub basis: Vec<Vec<f64>>,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Spectrum only: nodes cover ξ > 0 and the weights carry the factor 2
    /// from evenness in ξ (rank one).
    pub folded: bool,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Ambient vector of a space point.
    pub fn ambient(&self, i: usize) -> Vec<f64> {
        to_ambient(&self.basis, &self.points[i])
    }

    /// λ = Σ iξ_j b_j for a spectrum point.
    pub fn lambda(&self, i: usize) -> Vec<Complex64> {
        let a = to_ambient(&self.basis, &self.points[i]);
        a.into_iter().map(|x| Complex64::new(0.0, x)).collect()
    }
}

fn to_ambient(basis: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let n = basis.first().map(|b| b.len()).unwrap_or(0);
    let mut out = vec![0.0; n];
    for (c, b) in y.iter().zip(basis) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

/// Orthonormal frame of 𝔞 (span of the roots) in ambient coordinates.
pub fn orthonormal_frame(rs: &RootSystem) -> Vec<Vec<f64>> {
    let span: Vec<Vec<f64>> = rs.simple().iter().map(|&s| rs.root_f64(s).to_vec()).collect();
    let mut b = linalg::orthonormal_basis(&span, rs.gram_f64());
    // fix signs so that frames are reproducible: first nonzero entry positive
    for v in b.iter_mut() {
        if let Some(x) = v.iter().find(|x| x.abs() > 1e-12) {
            if *x < 0.0 {
                v.iter_mut().for_each(|y| *y = -*y);
            }
        }
    }
    b
}

/// Uniform symmetric grid on [−R,R]^r with `n` intervals per axis and
/// trapezoid weights.
pub fn space_grid(rs: &RootSystem, radius: f64, n: usize) -> Grid {
    let basis = orthonormal_frame(rs);
    let r = basis.len();
    let h = 2.0 * radius / n as f64;
    let axis: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 * h } else { h };
            (-radius + i as f64 * h, w)
        })
        .collect();
    let (points, weights) = tensor(&vec![axis; r]);
    Grid { domain: Domain::Space, basis, points, weights, folded: false }
}

fn tensor(axes: &[Vec<(f64, f64)>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut pts = vec![Vec::new()];
    let mut wts = vec![1.0];
    for axis in axes {
        let mut np = Vec::with_capacity(pts.len() * axis.len());
        let mut nw = Vec::with_capacity(pts.len() * axis.len());
        for (p, w) in pts.iter().zip(&wts) {
            for &(x, v) in axis {
                let mut q = p.clone();
                q.push(x);
                np.push(q);
                nw.push(w * v);
            }
        }
        pts = np;
        wts = nw;
    }
    (pts, wts)
}

/// Gauss-Legendre panels of width `panel` on [a, b].
fn gl_panels(a: f64, b: f64, panel: f64, nodes: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(nodes.max(1)).unwrap());
    let np = ((b - a) / panel).ceil().max(1.0) as usize;
    let width = (b - a) / np as f64;
    let mut out = Vec::new();
    for p in 0..np {
        let lo = a + p as f64 * width;
        for &(x, w) in gl.as_node_weight_pairs() {
            out.push((lo + 0.5 * width * (x + 1.0), 0.5 * width * w));
        }
    }
    out
}

/// Spectrum grid with cutoff Ξ. Rank one: (0, Ξ] folded; otherwise [−Ξ,Ξ]^r.
/// Weights include dξ/(2π)^r.
pub fn spectrum_grid(basis: &[Vec<f64>], cutoff: f64, panel_width: f64, nodes: usize) -> Grid {
    let r = basis.len();
    let norm = (2.0 * PI).powi(r as i32);
    if r == 1 {
        let axis = gl_panels(0.0, cutoff, panel_width, nodes);
        let points = axis.iter().map(|&(x, _)| vec![x]).collect();
        let weights = axis.iter().map(|&(_, w)| 2.0 * w / norm).collect();
        return Grid { domain: Domain::Spectrum, basis: basis.to_vec(), points, weights, folded: true };
    }
    let axis = gl_panels(-cutoff, cutoff, panel_width, nodes);
    let (points, weights) = tensor(&vec![axis; r]);
    let weights = weights.into_iter().map(|w| w / norm).collect();
    Grid { domain: Domain::Spectrum, basis: basis.to_vec(), points, weights, folded: false }
}

/// Values on a grid.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub support_radius: f64,
}

impl SampledFunction {
    /// Sample the W-average of `f` (a function of the ambient H).
    pub fn from_fn<F>(rs: &RootSystem, grid: Grid, support_radius: f64, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let weyl = rs.weyl_elements(DEFAULT_WEYL_CAP)?;
        let nw = weyl.len() as f64;
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let h = grid.ambient(i);
                weyl.iter().map(|w| f(&rs.act_f64(w, &h))).sum::<Complex64>() / nw
            })
            .collect();
        Ok(SampledFunction { grid, values, support_radius })
    }

    /// Ingest raw values on a W-stable grid, averaging over W-orbits.
    pub fn from_values(rs: &RootSystem, grid: Grid, values: Vec<Complex64>, support_radius: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Transform(format!("{} values for {} grid points", values.len(), grid.len())));
        }
        let weyl = rs.weyl_elements(DEFAULT_WEYL_CAP)?;
        let key = |y: &[f64]| -> Vec<i64> { y.iter().map(|x| (x * 1e6).round() as i64).collect() };
        let index: HashMap<Vec<i64>, usize> = grid.points.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
        let gram = rs.gram_f64();
        let mut out = vec![Complex64::zero(); values.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let h = grid.ambient(i);
            let mut s = Complex64::zero();
            for w in &weyl {
                let wh = rs.act_f64(w, &h);
                let gw = linalg::mat_vec_f64(gram, &wh);
                let y: Vec<f64> = grid.basis.iter().map(|b| b.iter().zip(&gw).map(|(a, c)| a * c).sum()).collect();
                let j = index
                    .get(&key(&y))
                    .ok_or_else(|| Error::Transform("grid is not stable under the Weyl group".into()))?;
                s += values[*j];
            }
            *o = s / weyl.len() as f64;
        }
        Ok(SampledFunction { grid, values: out, support_radius })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// C^∞ step: 1 on s ≤ 3/4, 0 on s ≥ 1.
pub fn smooth_cutoff(s: f64) -> f64 {
    let psi = |t: f64| if t <= 0.0 { 0.0 } else { (-1.0 / t).exp() };
    let u = (s - 0.75) / 0.25;
    if u <= 0.0 {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let a = psi(1.0 - u);
    a / (a + psi(u))
}

/// exp(−|H|²/2w²) times a smooth cutoff at radius 10w, sampled on a space
/// grid with `n` intervals per axis.
pub fn gaussian_bump(rs: &RootSystem, width: f64, n: usize) -> Result<SampledFunction> {
    let radius = 10.0 * width;
    let grid = space_grid(rs, radius, n);
    let g = rs.gram_f64().to_vec();
    SampledFunction::from_fn(rs, grid, radius, move |h| {
        let gh = linalg::mat_vec_f64(&g, h);
        let r2: f64 = h.iter().zip(&gh).map(|(a, b)| a * b).sum();
        Complex64::new((-0.5 * r2 / (width * width)).exp() * smooth_cutoff(r2.sqrt() / radius), 0.0)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    /// Π_{α∈Σ⁺} |2 sinh α|^{m_α}
    Group,
    /// Π_{α∈Σ′⁺} |2 sinh(α/2)|^{2k_α}
    Hypergeometric,
}

/// δ_{G/K} or δ(Σ′,k); `normalized` switches to the variants with
/// |sinh α/‖α‖| and |sinh(α/2)/‖α/2‖|, which equal 1 to leading order at 0.
#[derive(Clone, Debug)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub system: RootSystem,
    /// per orbit
    pub mult: Vec<f64>,
    pub normalized: bool,
    /// Σ over positive roots on a line of the exponents of |α(H)| is > −1 for every wall.
    pub locally_integrable: bool,
}

impl WeightSpec {
    pub fn group(sigma: &RootSystem, m: &[Q]) -> Self {
        Self::build(WeightKind::Group, sigma, m.iter().map(q_to_f64).collect(), false)
    }

    pub fn hypergeometric(rs: &RootSystem, k: &Multiplicity) -> Self {
        Self::build(WeightKind::Hypergeometric, rs, k.values.clone(), false)
    }

    pub fn normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    fn build(kind: WeightKind, rs: &RootSystem, mult: Vec<f64>, normalized: bool) -> Self {
        let mut by_line: HashMap<Vec<Q>, f64> = HashMap::new();
        for &a in rs.positive() {
            let e = Self::exponent_of(kind, mult[rs.orbit_of(a)]);
            *by_line.entry(primitive_direction(rs.root(a))).or_default() += e;
        }
        let locally_integrable = by_line.values().all(|&e| e > -1.0);
        WeightSpec { kind, system: rs.clone(), mult, normalized, locally_integrable }
    }

    fn exponent_of(kind: WeightKind, m: f64) -> f64 {
        match kind {
            WeightKind::Group => m,
            WeightKind::Hypergeometric => 2.0 * m,
        }
    }
}

/// log of the weight; −∞ on walls with positive exponent.
pub fn weight_log(spec: &WeightSpec, h: &[f64]) -> f64 {
    let rs = &spec.system;
    let mut s = 0.0;
    for &a in rs.positive() {
        let m = spec.mult[rs.orbit_of(a)];
        if m == 0.0 {
            continue;
        }
        let r = rs.root_f64(a);
        let x = rs.dot_f64(r, h);
        let len = rs.dot_f64(r, r).sqrt();
        let (arg, scale) = match spec.kind {
            WeightKind::Group => (x, if spec.normalized { 1.0 / len } else { 2.0 }),
            WeightKind::Hypergeometric => (0.5 * x, if spec.normalized { 2.0 / len } else { 2.0 }),
        };
        s += WeightSpec::exponent_of(spec.kind, m) * (scale * arg.sinh().abs()).ln();
    }
    s
}

pub fn weight_eval(spec: &WeightSpec, h: &[f64]) -> f64 {
    weight_log(spec, h).exp()
}

/// F(λ_j; H_i) for all spectrum points j and space points i, together with
/// the flags of points inside the wall margin.
struct Kernel {
    rows: Vec<Vec<Complex64>>,
    inside: Vec<bool>,
}

/// Unit vector along −ρ (ρ = half sum of positive roots), regular in 𝔞₋.
fn regular_direction(rs: &RootSystem) -> Vec<f64> {
    let n = rs.ambient_dim();
    let mut v = vec![0.0; n];
    for &a in rs.positive() {
        for (o, x) in v.iter_mut().zip(rs.root_f64(a)) {
            *o -= x;
        }
    }
    let len = rs.dot_f64(&v, &v).sqrt();
    v.iter().map(|x| x / len).collect()
}

fn lagrange(xs: &[f64], ys: &[Complex64], x: f64) -> Complex64 {
    let mut s = Complex64::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut l = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if j != i {
                l *= (x - xj) / (xi - xj);
            }
        }
        s += yi * l;
    }
    s
}

/// F at a point of the closed negative chamber within the margin, by
/// extrapolation from points H + s·d (d regular in 𝔞₋). In rank one F is
/// even in the coordinate, so the fit is in its square.
fn extrapolate(ev: &HypergeometricEvaluator, rep: &[f64], margin: f64, nodes: usize) -> Result<Complex64> {
    let rs = ev.system();
    let d = regular_direction(rs);
    let mind = rs.positive().iter().map(|&a| rs.dot_f64(rs.root_f64(a), &d).abs()).fold(f64::INFINITY, f64::min);
    let s0 = margin * 1.001 / mind;
    let ss: Vec<f64> = (0..nodes).map(|j| s0 * (1.0 + 0.5 * j as f64)).collect();
    let mut ys = Vec::with_capacity(nodes);
    for &s in &ss {
        let p: Vec<f64> = rep.iter().zip(&d).map(|(a, b)| a + s * b).collect();
        ys.push(ev.eval(&p)?);
    }
    if rs.rank() == 1 {
        let t = rs.dot_f64(rep, &d).max(0.0);
        let xs: Vec<f64> = ss.iter().map(|s| (t + s) * (t + s)).collect();
        Ok(lagrange(&xs, &ys, t * t))
    } else {
        Ok(lagrange(&ss, &ys, 0.0))
    }
}

fn chamber_key(h: &[f64]) -> Vec<i64> {
    h.iter().map(|x| (x * 1e9).round() as i64).collect()
}

fn kernel(rs: &RootSystem, k: &Multiplicity, lambdas: &[Vec<Complex64>], hs: &[Vec<f64>], opts: &TransformOptions) -> Result<Kernel> {
    let margin = opts.margin_for(k);
    let policy = opts.policy_for(k);
    let mut reps: Vec<Vec<f64>> = Vec::new();
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut map = Vec::with_capacity(hs.len());
    for h in hs {
        let (_, rep) = rs.chamber_map(h);
        let idx = *seen.entry(chamber_key(&rep)).or_insert_with(|| {
            reps.push(rep.clone());
            reps.len() - 1
        });
        map.push(idx);
    }
    let rep_inside: Vec<bool> = reps.iter().map(|r| margin > 0.0 && rs.wall_distance(r) < margin).collect();
    let rows: Result<Vec<Vec<Complex64>>> = lambdas
        .par_iter()
        .map(|lam| {
            let ev = HypergeometricEvaluator::new(rs, k, lam, policy)?;
            let vals: Result<Vec<Complex64>> = reps
                .iter()
                .zip(&rep_inside)
                .map(|(r, &inside)| if inside { extrapolate(&ev, r, margin, opts.extrapolation_nodes) } else { ev.eval(r) })
                .collect();
            let vals = vals?;
            Ok(map.iter().map(|&i| vals[i]).collect())
        })
        .collect();
    Ok(Kernel { rows: rows?, inside: map.iter().map(|&i| rep_inside[i]).collect() })
}

fn num_weyl(rs: &RootSystem) -> Result<f64> {
    Ok(rs.weyl_elements(DEFAULT_WEYL_CAP)?.len() as f64)
}

fn check_frame(rs: &RootSystem, g: &Grid) -> Result<()> {
    if g.rank() != rs.rank() {
        return Err(Error::Transform(format!("grid rank {} does not match {} (rank {})", g.rank(), rs.label(), rs.rank())));
    }
    if rs.rank() > 2 {
        return Err(Error::Transform("transforms are implemented for rank ≤ 2".into()));
    }
    Ok(())
}

fn forward_row(f: &SampledFunction, delta: &[f64], row: &[Complex64], inside: &[bool], nw: f64, zero_inside: bool) -> Complex64 {
    let mut s = Complex64::zero();
    for i in 0..f.values.len() {
        // an infinite weight only occurs on a wall (negative exponent); the node is dropped
        if (zero_inside && inside[i]) || f.values[i] == Complex64::zero() || !delta[i].is_finite() {
            continue;
        }
        s += f.values[i] * row[i].conj() * (f.grid.weights[i] * delta[i]);
    }
    s / nw
}

fn weights_on(spec: &WeightSpec, g: &Grid) -> Vec<f64> {
    (0..g.len()).map(|i| weight_eval(spec, &g.ambient(i))).collect()
}

/// ℱf(λ) = (1/#W)∫ f(H) F(−λ;H) δ(Σ′,k;H) dH on the given spectrum grid
/// (λ ∈ i𝔞*, real k, so F(−λ;H) = conj F(λ;H)).
pub fn hft_forward(rs: &RootSystem, k: &Multiplicity, f: &SampledFunction, spectrum: &Grid, opts: &TransformOptions) -> Result<SampledFunction> {
    check_frame(rs, &f.grid)?;
    let nw = num_weyl(rs)?;
    let delta = weights_on(&WeightSpec::hypergeometric(rs, k), &f.grid);
    let lambdas: Vec<Vec<Complex64>> = (0..spectrum.len()).map(|j| spectrum.lambda(j)).collect();
    let hs: Vec<Vec<f64>> = (0..f.grid.len()).map(|i| f.grid.ambient(i)).collect();
    let values = if f.values.iter().all(|z| z.is_zero()) {
        vec![Complex64::zero(); lambdas.len()]
    } else {
        let ker = kernel(rs, k, &lambdas, &hs, opts)?;
        ker.rows.iter().map(|row| forward_row(f, &delta, row, &ker.inside, nw, opts.zero_inside_margin)).collect()
    };
    Ok(SampledFunction { grid: spectrum.clone(), values, support_radius: f.support_radius })
}

fn check_nonnegative(rs: &RootSystem, k: &Multiplicity) -> Result<()> {
    for (o, v) in rs.orbits().iter().zip(&k.values) {
        if *v < 0.0 {
            return Err(Error::NonnegativityViolated(o.label.clone()));
        }
    }
    Ok(())
}

fn density_at(rs: &RootSystem, k: &Multiplicity, lambda: &[Complex64]) -> Result<f64> {
    match c_norm(rs, k, lambda) {
        Ok(c) => Ok(1.0 / c.norm_sqr()),
        Err(Error::CFunctionPole { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// |c(λ)|⁻² on a spectrum grid; zero where c has a pole.
pub fn plancherel_density(rs: &RootSystem, k: &Multiplicity, spectrum: &Grid) -> Result<Vec<f64>> {
    (0..spectrum.len())
        .map(|j| density_at(rs, k, &spectrum.lambda(j)))
        .collect()
}

/// f(H) = (1/#W)∫ ℱf(λ) F(λ;H) |c(λ)|⁻² dλ on the given space grid.
pub fn hft_inverse(rs: &RootSystem, k: &Multiplicity, spectrum: &SampledFunction, space: &Grid, opts: &TransformOptions) -> Result<SampledFunction> {
    check_nonnegative(rs, k)?;
    check_frame(rs, space)?;
    let nw = num_weyl(rs)?;
    let density = plancherel_density(rs, k, &spectrum.grid)?;
    let lambdas: Vec<Vec<Complex64>> = (0..spectrum.grid.len()).map(|j| spectrum.grid.lambda(j)).collect();
    let hs: Vec<Vec<f64>> = (0..space.len()).map(|i| space.ambient(i)).collect();
    let ker = kernel(rs, k, &lambdas, &hs, opts)?;
    let values = inverse_from_kernel(&ker.rows, &spectrum.values, &spectrum.grid.weights, &density, hs.len(), nw);
    Ok(SampledFunction { grid: space.clone(), values, support_radius: spectrum.support_radius })
}

fn inverse_from_kernel(rows: &[Vec<Complex64>], fhat: &[Complex64], w: &[f64], density: &[f64], npts: usize, nw: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::zero(); npts];
    for (j, row) in rows.iter().enumerate() {
        let c = fhat[j] * (w[j] * density[j]);
        for (o, f) in out.iter_mut().zip(row) {
            *o += c * f;
        }
    }
    out.iter().map(|z| z / nw).collect()
}

/// Why the adaptive spectral cutoff stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffReason {
    /// |ℱf|·|c|⁻² fell below `spectral_tol` times its peak
    Decay,
    /// it started to grow again (quadrature noise times the growing density)
    Floor,
    /// the Nyquist frequency of the grid or `max_cutoff` was reached
    Cap,
}

/// Result of forward-then-inverse on a space grid.
#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub system: String,
    pub k: Vec<f64>,
    pub grid_points: usize,
    pub spectrum_points: usize,
    pub cutoff: f64,
    pub cutoff_reason: CutoffReason,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub plancherel_space: f64,
    pub plancherel_spectrum: f64,
    pub plancherel_mismatch: f64,
    pub points_inside_margin: usize,
    pub wall_margin: f64,
    #[serde(skip)]
    pub spectrum: Option<SampledFunction>,
    #[serde(skip)]
    pub reconstructed: Option<SampledFunction>,
}

/// Forward transform with the cutoff chosen where |ℱf|·|c|⁻² has decayed.
/// Returns the spectrum and the kernel rows on f's grid (reused by roundtrip).
fn adaptive_forward(rs: &RootSystem, k: &Multiplicity, f: &SampledFunction, opts: &TransformOptions) -> Result<(SampledFunction, Vec<Vec<Complex64>>, Vec<f64>, CutoffReason, Vec<bool>)> {
    check_frame(rs, &f.grid)?;
    let nw = num_weyl(rs)?;
    let basis = f.grid.basis.clone();
    let r = basis.len();
    let hs: Vec<Vec<f64>> = (0..f.grid.len()).map(|i| f.grid.ambient(i)).collect();
    let delta = weights_on(&WeightSpec::hypergeometric(rs, k), &f.grid);
    let spacing = if r == 0 {
        1.0
    } else {
        let ws: Vec<f64> = f.grid.points.iter().map(|p| p[0]).collect();
        let mut u: Vec<f64> = ws.clone();
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        u.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if u.len() > 1 {
            u[1] - u[0]
        } else {
            1.0
        }
    };
    let cap = opts.max_cutoff.unwrap_or(PI / spacing);
    let width = opts.panel_width;

    // probe along each frame axis, panel by panel
    let mut cutoff = 0.0f64;
    let mut reason = CutoffReason::Decay;
    let mut cache: Vec<(Vec<f64>, Complex64, f64, Vec<Complex64>)> = Vec::new();
    for axis in 0..r {
        let mut peak = 0.0f64;
        let mut prev = f64::INFINITY;
        let mut lo = 0.0;
        let mut why = CutoffReason::Cap;
        while lo < cap - 1e-12 {
            let hi = (lo + width).min(cap);
            let nodes = gl_panels(lo, hi, width, opts.panel_nodes);
            let xis: Vec<Vec<f64>> = nodes
                .iter()
                .map(|&(x, _)| {
                    let mut v = vec![0.0; r];
                    v[axis] = x;
                    v
                })
                .collect();
            let lambdas: Vec<Vec<Complex64>> = xis.iter().map(|x| to_ambient(&basis, x).into_iter().map(|t| Complex64::new(0.0, t)).collect()).collect();
            let ker = kernel(rs, k, &lambdas, &hs, opts)?;
            let mut panel_max = 0.0f64;
            let mut panel = Vec::new();
            for (j, row) in ker.rows.into_iter().enumerate() {
                let fh = forward_row(f, &delta, &row, &ker.inside, nw, opts.zero_inside_margin);
                let dens = density_at(rs, k, &lambdas[j])?;
                panel_max = panel_max.max(fh.norm() * dens);
                panel.push((xis[j].clone(), fh, dens, row));
            }
            // a rise after substantial decay is the quadrature floor: stop before it
            if peak > 0.0 && prev < 1e-3 * peak && panel_max > prev {
                why = CutoffReason::Floor;
                break;
            }
            if r == 1 {
                cache.extend(panel);
            }
            peak = peak.max(panel_max);
            prev = panel_max;
            lo = hi;
            if peak > 0.0 && panel_max < opts.spectral_tol * peak {
                why = CutoffReason::Decay;
                break;
            }
            if peak == 0.0 && lo >= width {
                why = CutoffReason::Decay;
                break;
            }
        }
        if why != CutoffReason::Decay {
            reason = why;
        }
        cutoff = cutoff.max(lo);
    }
    let spectrum = spectrum_grid(&basis, cutoff.max(width.min(cap)), width, opts.panel_nodes);
    if r == 1 && cache.len() == spectrum.len() {
        let fhat = cache.iter().map(|c| c.1).collect();
        let dens = cache.iter().map(|c| c.2).collect();
        let rows = cache.into_iter().map(|c| c.3).collect();
        let inside = kernel_inside(rs, k, &hs, opts);
        return Ok((SampledFunction { grid: spectrum, values: fhat, support_radius: f.support_radius }, rows, dens, reason, inside));
    }
    let lambdas: Vec<Vec<Complex64>> = (0..spectrum.len()).map(|j| spectrum.lambda(j)).collect();
    let ker = kernel(rs, k, &lambdas, &hs, opts)?;
    let fhat = ker.rows.iter().map(|row| forward_row(f, &delta, row, &ker.inside, nw, opts.zero_inside_margin)).collect();
    let dens = plancherel_density(rs, k, &spectrum)?;
    Ok((SampledFunction { grid: spectrum, values: fhat, support_radius: f.support_radius }, ker.rows, dens, reason, ker.inside))
}

fn kernel_inside(rs: &RootSystem, k: &Multiplicity, hs: &[Vec<f64>], opts: &TransformOptions) -> Vec<bool> {
    let margin = opts.margin_for(k);
    hs.iter().map(|h| margin > 0.0 && rs.wall_distance(&rs.chamber_map(h).1) < margin).collect()
}

/// Forward transform on an adaptively chosen spectrum grid.
pub fn hft_forward_adaptive(rs: &RootSystem, k: &Multiplicity, f: &SampledFunction, opts: &TransformOptions) -> Result<SampledFunction> {
    Ok(adaptive_forward(rs, k, f, opts)?.0)
}

/// ℱ then ℱ⁻¹ on f's own grid, plus the Plancherel comparison
/// (1/#W)∫|f|²δ vs (1/#W)∫|ℱf|²|c|⁻².
pub fn roundtrip(rs: &RootSystem, k: &Multiplicity, f: &SampledFunction, opts: &TransformOptions) -> Result<RoundtripReport> {
    check_nonnegative(rs, k)?;
    let nw = num_weyl(rs)?;
    let (spec, rows, dens, reason, inside) = adaptive_forward(rs, k, f, opts)?;
    let npts = f.grid.len();
    let rec = inverse_from_kernel(&rows, &spec.values, &spec.grid.weights, &dens, npts, nw);
    let max_abs_error = rec.iter().zip(&f.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let delta = weights_on(&WeightSpec::hypergeometric(rs, k), &f.grid);
    let lhs: f64 = (0..npts).filter(|&i| delta[i].is_finite()).map(|i| f.values[i].norm_sqr() * delta[i] * f.grid.weights[i]).sum::<f64>() / nw;
    let rhs: f64 = (0..spec.grid.len()).map(|j| spec.values[j].norm_sqr() * dens[j] * spec.grid.weights[j]).sum::<f64>() / nw;
    let fmax = f.max_abs();
    Ok(RoundtripReport {
        system: rs.label().to_string(),
        k: k.values.clone(),
        grid_points: npts,
        spectrum_points: spec.grid.len(),
        cutoff: spec.grid.points.iter().map(|p| p.iter().map(|x| x.abs()).fold(0.0, f64::max)).fold(0.0, f64::max),
        cutoff_reason: reason,
        max_abs_error,
        max_rel_error: if fmax > 0.0 { max_abs_error / fmax } else { max_abs_error },
        plancherel_space: lhs,
        plancherel_spectrum: rhs,
        plancherel_mismatch: if lhs > 0.0 { (lhs - rhs).abs() / lhs } else { (lhs - rhs).abs() },
        points_inside_margin: inside.iter().filter(|&&b| b).count(),
        wall_margin: opts.margin_for(k),
        spectrum: Some(spec),
        reconstructed: Some(SampledFunction { grid: f.grid.clone(), values: rec, support_radius: f.support_radius }),
    })
}

/// δ̃_{G/K}^{−1/2} δ̃(Σ^π,k^π)^{1/2} and 2^e δ_{G/K}^{−1/2} δ(Σ^π,k^π)^{1/2} at H, as logs.
pub fn delta_ratios_log(sigma: &RootSystem, m: &[Q], sigma_pi: &RootSystem, k_pi: &[Q], h: &[f64]) -> Result<(f64, f64)> {
    let e = e_exponent(sigma, m, sigma_pi, k_pi)?;
    let k = Multiplicity::from_exact(k_pi.to_vec());
    let g = WeightSpec::group(sigma, m);
    let p = WeightSpec::hypergeometric(sigma_pi, &k);
    let tilde = -0.5 * weight_log(&g.clone().normalized(), h) + 0.5 * weight_log(&p.clone().normalized(), h);
    let plain = q_to_f64(&e) * 2f64.ln() - 0.5 * weight_log(&g, h) + 0.5 * weight_log(&p, h);
    Ok((tilde, plain))
}

/// The π-spherical transform together with its direct-quadrature check.
#[derive(Clone, Debug)]
pub struct SphericalTransform {
    pub spectrum: SampledFunction,
    /// 2^e, or the constant δ̃-ratio/δ-ratio when Σ^π ⊄ Σ∪2Σ
    pub constant: f64,
    pub exponent: Option<Q>,
    /// (1/#W)∫ f Υ^π(φ^π_{−λ}) δ_{G/K} by quadrature
    pub direct: Vec<Complex64>,
    pub two_path_max_diff: f64,
}

/// f̂ = 2^e ℱ(Σ^π,k^π)(f δ_{G/K}^{1/2} δ(Σ^π,k^π)^{−1/2}).
///
/// δ_{G/K}^{1/2}δ^{−1/2} = C/(cosh-factor) with C = 2^e, which is used
/// instead of the raw quotient (0/0 on walls).
pub fn spherical_forward(entry: &SmallKTypeRecord, pair: &MatchedPair, f: &SampledFunction, spectrum: &Grid, opts: &TransformOptions) -> Result<SphericalTransform> {
    if !pair.valid {
        return Err(Error::NoMatchedPair);
    }
    let sigma_pi = pair.sigma_pi.as_ref().ok_or(Error::NoMatchedPair)?;
    let k_pi = pair.k_exact().ok_or(Error::NoMatchedPair)?;
    let k = Multiplicity::from_exact(k_pi.clone());
    let sigma = &entry.sigma;
    let hs: Vec<Vec<f64>> = (0..f.grid.len()).map(|i| f.grid.ambient(i)).collect();

    let (constant, exponent, tilde_ratio): (f64, Option<Q>, Vec<f64>) = if check_mc1(sigma, sigma_pi).is_ok() {
        let e = e_exponent(sigma, &entry.m, sigma_pi, &k_pi)?;
        let cf = cosh_factor(sigma, &entry.m, sigma_pi, &k_pi)?;
        (2f64.powf(q_to_f64(&e)), Some(e), hs.iter().map(|h| cf.evaluate(h)).collect())
    } else {
        let g = WeightSpec::group(sigma, &entry.m);
        let p = WeightSpec::hypergeometric(sigma_pi, &k);
        let tl = |h: &[f64]| -0.5 * weight_log(&g.clone().normalized(), h) + 0.5 * weight_log(&p.clone().normalized(), h);
        let pl = |h: &[f64]| -0.5 * weight_log(&g, h) + 0.5 * weight_log(&p, h);
        let href: Vec<f64> = regular_direction(sigma).iter().map(|x| 0.7 * x).collect();
        let c = (tl(&href) - pl(&href)).exp();
        let ratio = hs.iter().map(|h| if sigma.wall_distance(h) > 1e-12 { tl(h).exp() } else { f64::NAN }).collect();
        (c, None, ratio)
    };
    let gvals: Vec<Complex64> = f
        .values
        .iter()
        .zip(&tilde_ratio)
        .map(|(v, r)| if r.is_finite() && *r != 0.0 { v * (constant / r) } else { Complex64::zero() })
        .collect();
    let g = SampledFunction { grid: f.grid.clone(), values: gvals, support_radius: f.support_radius };
    let fh = hft_forward(sigma_pi, &k, &g, spectrum, opts)?;
    let spectrum_vals: Vec<Complex64> = fh.values.iter().map(|z| z * constant).collect();

    // direct path: (1/#W)∫ f Υ^π(φ^π_{−λ}) δ_{G/K}
    let nw = num_weyl(sigma_pi)?;
    let dgk = weights_on(&WeightSpec::group(sigma, &entry.m), &f.grid);
    let data = SphericalData { sigma, m: &entry.m, kappa: &entry.kappa, sigma_pi, k_pi: &k_pi };
    let policy = opts.policy_for(&k);
    let margin = opts.margin_for(&k);
    let direct: Result<Vec<Complex64>> = (0..spectrum.len())
        .into_par_iter()
        .map(|j| {
            let neg: Vec<Complex64> = spectrum.lambda(j).iter().map(|z| -z).collect();
            let ups = UpsilonEvaluator::new(&data, &neg, &policy)?;
            let mut s = Complex64::zero();
            for (i, h) in hs.iter().enumerate() {
                if f.values[i].is_zero() || (margin > 0.0 && sigma_pi.wall_distance(h) < margin) {
                    continue;
                }
                s += f.values[i] * ups.eval(h)? * (dgk[i] * f.grid.weights[i]);
            }
            Ok(s / nw)
        })
        .collect();
    let direct = direct?;
    let scale = spectrum_vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let two_path_max_diff = direct.iter().zip(&spectrum_vals).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    Ok(SphericalTransform {
        spectrum: SampledFunction { grid: spectrum.clone(), values: spectrum_vals, support_radius: f.support_radius },
        constant,
        exponent,
        direct,
        two_path_max_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{q, qi};

    #[test]
    fn weight_examples() {
        let a1 = RootSystem::from_label("A1").unwrap();
        let k = Multiplicity::constant(&a1, 1.0);
        let spec = WeightSpec::hypergeometric(&a1, &k);
        // α(H) = 1: H = α/‖α‖²
        let r = a1.root_f64(a1.simple()[0]).to_vec();
        let n2 = a1.dot_f64(&r, &r);
        let h: Vec<f64> = r.iter().map(|x| x / n2).collect();
        let want = (2.0 * 0.5f64.sinh()).powi(2);
        assert!((weight_eval(&spec, &h) - want).abs() < 1e-14);
        assert!(spec.locally_integrable);
        // δ_{G/K} with m = 1 equals δ(2Σ, m/2)
        let bc = RootSystem::from_label("B2").unwrap();
        let g = WeightSpec::group(&bc, &[qi(1), qi(1)]);
        let doubled = bc.rescaled(qi(2)).unwrap();
        let hk = WeightSpec::hypergeometric(&doubled, &Multiplicity::from_exact(vec![q(1, 2), q(1, 2)]));
        for h in [[0.3, -0.7], [1.1, 0.2], [-2.0, 0.9]] {
            let (a, b) = (weight_eval(&g, &h), weight_eval(&hk, &h));
            assert!((a - b).abs() <= 1e-12 * a, "{a} {b}");
        }
        let bad = WeightSpec::hypergeometric(&a1, &Multiplicity::constant(&a1, -0.6));
        assert!(!bad.locally_integrable);
    }

    #[test]
    fn zero_function_transforms_to_zero() {
        let bc = RootSystem::from_label("BC1").unwrap();
        let k = Multiplicity::from_f64(vec![2.0, 0.5]);
        let grid = space_grid(&bc, 5.0, 50);
        let f = SampledFunction::from_fn(&bc, grid, 5.0, |_| Complex64::zero()).unwrap();
        let spec = spectrum_grid(&f.grid.basis, 4.0, 1.0, 4);
        let out = hft_forward(&bc, &k, &f, &spec, &TransformOptions::default()).unwrap();
        assert!(out.values.iter().all(|z| z.is_zero()));
    }

    #[test]
    fn inverse_refuses_negative_k() {
        let bc = RootSystem::from_label("BC1").unwrap();
        let k = Multiplicity::from_f64(vec![2.0, -0.5]);
        let grid = space_grid(&bc, 5.0, 10);
        let spec = spectrum_grid(&grid.basis, 2.0, 1.0, 2);
        let s = SampledFunction { grid: spec, values: vec![Complex64::zero(); 4], support_radius: 5.0 };
        assert!(matches!(hft_inverse(&bc, &k, &s, &grid, &TransformOptions::default()), Err(Error::NonnegativityViolated(_))));
    }

    #[test]
    fn gaussian_k_zero_rank_one() {
        // k ≡ 0: ℱf(iξ) = ∫_0^∞ f cos(ξx) dx, and for f = e^{−x²/2} that is √(π/2) e^{−ξ²/2}
        let a1 = RootSystem::from_label("A1").unwrap();
        let k = Multiplicity::zero(&a1);
        let f = gaussian_bump(&a1, 1.0, 200).unwrap();
        let spec = spectrum_grid(&f.grid.basis, 6.0, 1.0, 8);
        let out = hft_forward(&a1, &k, &f, &spec, &TransformOptions::default()).unwrap();
        for (p, v) in spec.points.iter().zip(&out.values) {
            let want = (PI / 2.0).sqrt() * (-0.5 * p[0] * p[0]).exp();
            assert!((v.re - want).abs() < 1e-10 && v.im.abs() < 1e-12, "{} {} {}", p[0], v, want);
        }
    }
}
