//! Slit domains for punctured disks and the one-form `β = d Im F`.
//!
//! A disk with one outgoing and `k` incoming boundary punctures is modelled on the upper
//! half-plane with punctures `a₁ < … < a_k` on the real axis and the point at infinity as
//! the outgoing end.  The map
//!
//! ```text
//! F(ζ) = Σⱼ (wʲ/π) · log(ζ − aⱼ),   arg ∈ [0, π]
//! ```
//!
//! sends the half-plane to a strip of width `w⁰` with `k − 1` horizontal slits.  Slit `ℓ`
//! sits at height `tℓ = w⁰ − (w¹ + … + wℓ)` and its tip is the critical value of `F` in the
//! gap `(a_ℓ, a_{ℓ+1})`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default tolerance for closed-form residuals.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default tolerance for puncture round trips.
pub const ROUND_TRIP_TOL: f64 = 1e-8;
/// Strip-coordinate depth at which end pullbacks are measured.
pub const END_DEPTH: f64 = 10.0;

const WEIGHT_MATCH_TOL: f64 = 1e-12;

/// Strip widths `(w⁰; w¹, …, wᵏ)` with `w⁰` stored as the computed sum of the inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsRepr")]
pub struct Weights {
    w0: f64,
    inputs: Vec<f64>,
}

#[derive(Deserialize)]
struct WeightsRepr {
    inputs: Vec<f64>,
    #[serde(default)]
    w0: Option<f64>,
}

impl TryFrom<WeightsRepr> for Weights {
    type Error = Error;
    fn try_from(r: WeightsRepr) -> Result<Self> {
        let w = Weights::new(r.inputs)?;
        if let Some(w0) = r.w0 {
            if (w0 - w.w0).abs() > WEIGHT_MATCH_TOL * w.w0.max(1.0) {
                return Err(Error::InvalidWeights(format!(
                    "w0 = {w0} is not the sum {} of the inputs",
                    w.w0
                )));
            }
        }
        Ok(w)
    }
}

impl Weights {
    pub fn new(inputs: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::InvalidWeights("at least one input weight is required".into()));
        }
        if let Some(bad) = inputs.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {bad} is not strictly positive")));
        }
        let w0 = inputs.iter().sum();
        Ok(Weights { w0, inputs })
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    /// Number of incoming ends.
    pub fn k(&self) -> usize {
        self.inputs.len()
    }

    /// Slit heights `tℓ = w⁰ − (w¹ + … + wℓ)`, `ℓ = 1, …, k−1`.
    pub fn levels(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.inputs[..self.k() - 1]
            .iter()
            .map(|w| {
                acc += w;
                self.w0 - acc
            })
            .collect()
    }

    /// `u #ⁱ v`: replace input `i` (1-based) of `v` by the inputs of `u`.
    pub fn glue(u: &Weights, v: &Weights, i: usize) -> Result<Weights> {
        if i == 0 || i > v.k() {
            return Err(Error::IndexRange(format!("input {i} not in 1..={}", v.k())));
        }
        let vi = v.inputs[i - 1];
        if (u.w0 - vi).abs() > WEIGHT_MATCH_TOL * vi.max(1.0) {
            return Err(Error::IncompatibleWeights(format!(
                "outgoing weight {} does not match input weight {vi}",
                u.w0
            )));
        }
        let mut inputs = Vec::with_capacity(u.k() + v.k() - 1);
        inputs.extend_from_slice(&v.inputs[..i - 1]);
        inputs.extend_from_slice(&u.inputs);
        inputs.extend_from_slice(&v.inputs[i..]);
        Weights::new(inputs)
    }
}

/// Puncture positions together with the derived slit data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr")]
pub struct SlitDomainSpec {
    weights: Weights,
    punctures: Vec<f64>,
    critical_points: Vec<f64>,
    slit_params: Vec<f64>,
    levels: Vec<f64>,
}

#[derive(Deserialize)]
struct SpecRepr {
    weights: Weights,
    punctures: Vec<f64>,
}

impl TryFrom<SpecRepr> for SlitDomainSpec {
    type Error = Error;
    fn try_from(r: SpecRepr) -> Result<Self> {
        build_slit_map(&r.weights, &r.punctures)
    }
}

/// Values of `β` and `β∘j` at a point, in the coordinates `ζ = x + iy`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneFormValue {
    /// `(β_x, β_y)`.
    pub beta: [f64; 2],
    /// `((β∘j)_x, (β∘j)_y)` with `(β∘j)(v) = β(jv)`.
    pub beta_j: [f64; 2],
}

impl SlitDomainSpec {
    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn punctures(&self) -> &[f64] {
        &self.punctures
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    pub fn slit_params(&self) -> &[f64] {
        &self.slit_params
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn k(&self) -> usize {
        self.weights.k()
    }

    /// True when `a₁ = 0` and, for `k ≥ 2`, `a₂ = 1`.
    pub fn is_normalized(&self) -> bool {
        self.punctures[0] == 0.0 && (self.k() < 2 || self.punctures[1] == 1.0)
    }

    /// The same conformal class with punctures moved to `a₁ = 0, a₂ = 1`.
    ///
    /// Slit tips shift by a common constant; heights are unchanged.
    pub fn normalized(&self) -> Result<SlitDomainSpec> {
        let p = normalize_points(&self.punctures);
        build_slit_map(&self.weights, &p)
    }

    /// `F(ζ)` on the closed upper half-plane.
    pub fn map_value(&self, z: Complex64) -> Result<Complex64> {
        self.check_point(z)?;
        Ok(self.log_map(z))
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.im < 0.0 {
            return Err(Error::InvalidDomain(format!("{z} is not in the closed upper half-plane")));
        }
        if z.im == 0.0 && self.punctures.contains(&z.re) {
            return Err(Error::SingularPoint(format!("{z} is a puncture")));
        }
        Ok(())
    }

    fn log_map(&self, z: Complex64) -> Complex64 {
        // -0.0 would select the wrong side of the branch cut
        let y = if z.im == 0.0 { 0.0 } else { z.im };
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, a) in self.weights.inputs.iter().zip(&self.punctures) {
            let dx = z.re - a;
            let modulus = dx.hypot(y);
            acc += Complex64::new(modulus.ln(), y.atan2(dx)) * (w / PI);
        }
        acc
    }

    fn dlog(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, a) in self.weights.inputs.iter().zip(&self.punctures) {
            acc += (w / PI) / (z - a);
        }
        acc
    }

    /// Boundary value of `Im F` just right of `x` on the real axis.
    pub fn boundary_level(&self, x: f64) -> f64 {
        self.weights
            .inputs
            .iter()
            .zip(&self.punctures)
            .filter(|(_, a)| **a > x)
            .map(|(w, _)| *w)
            .sum()
    }
}

fn normalize_points(p: &[f64]) -> Vec<f64> {
    if p.len() < 2 {
        return p.iter().map(|x| x - p[0]).collect();
    }
    let scale = p[1] - p[0];
    p.iter().map(|x| (x - p[0]) / scale).collect()
}

/// `Σⱼ wʲ/(x − aⱼ)` on the real axis.
fn critical_equation(weights: &[f64], punctures: &[f64], x: f64) -> f64 {
    weights.iter().zip(punctures).map(|(w, a)| w / (x - a)).sum()
}

/// Root of the critical equation in `(lo, hi)` by bisection.
///
/// The function decreases strictly from `+∞` to `−∞` across every gap.
fn bisect_gap(weights: &[f64], punctures: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..400 {
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let v = critical_equation(weights, punctures, mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v.is_nan() {
            return Err(Error::NumericFailure { message: format!("critical equation undefined at {mid}"), residual: f64::NAN });
        }
        if v > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let root = a + 0.5 * (b - a);
    if root <= lo || root >= hi {
        return Err(Error::NumericFailure {
            message: format!("no critical point bracketed in ({lo}, {hi})"),
            residual: f64::INFINITY,
        });
    }
    Ok(root)
}

/// Build the slit map for the given punctures.
pub fn build_slit_map(weights: &Weights, punctures: &[f64]) -> Result<SlitDomainSpec> {
    let k = weights.k();
    if punctures.len() != k {
        return Err(Error::InvalidDomain(format!("{} punctures given for {k} input weights", punctures.len())));
    }
    if punctures.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidDomain("punctures must be finite".into()));
    }
    for w in punctures.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidDomain(format!("punctures not strictly increasing at {} , {}", w[0], w[1])));
        }
    }
    let mut critical_points = Vec::with_capacity(k.saturating_sub(1));
    for j in 0..k.saturating_sub(1) {
        critical_points.push(bisect_gap(&weights.inputs, punctures, punctures[j], punctures[j + 1])?);
    }
    let mut spec = SlitDomainSpec {
        weights: weights.clone(),
        punctures: punctures.to_vec(),
        critical_points,
        slit_params: Vec::new(),
        levels: weights.levels(),
    };
    let mut slits = Vec::with_capacity(k.saturating_sub(1));
    for (l, &c) in spec.critical_points.iter().enumerate() {
        let value = spec.log_map(Complex64::new(c, 0.0));
        let level_err = (value.im - spec.levels[l]).abs();
        if level_err > DEFAULT_TOL * weights.w0.max(1.0) || !value.re.is_finite() {
            return Err(Error::NumericFailure {
                message: format!("critical value {value} misses level {}", spec.levels[l]),
                residual: level_err,
            });
        }
        slits.push(value.re);
    }
    spec.slit_params = slits;
    Ok(spec)
}

/// Evaluate `β` and `β∘j` from the closed form `β = Im(F′) dx + Re(F′) dy`.
pub fn eval_beta(spec: &SlitDomainSpec, point: Complex64) -> Result<OneFormValue> {
    spec.check_point(point)?;
    let y = if point.im == 0.0 { 0.0 } else { point.im };
    let d = spec.dlog(Complex64::new(point.re, y));
    let (bx, by) = if y == 0.0 { (0.0, d.re) } else { (d.im, d.re) };
    Ok(OneFormValue { beta: [bx, by], beta_j: [by, -bx] })
}

/// A one-form on a planar domain whose components extend holomorphically in each real
/// coordinate, so that they can be differentiated by the complex-step method.
pub trait PlanarOneForm {
    /// `(β_x, β_y)` at `(x, y)`.
    fn components(&self, x: Complex64, y: Complex64) -> [Complex64; 2];

    /// Components at `(anchor + dx, dy)`, for points very close to `anchor`.
    fn components_near(&self, anchor: f64, dx: Complex64, dy: Complex64) -> [Complex64; 2] {
        self.components(dx + anchor, dy)
    }
}

impl SlitDomainSpec {
    fn components_shifted(&self, anchor: f64, dx: Complex64, y: Complex64) -> [Complex64; 2] {
        let mut bx = Complex64::new(0.0, 0.0);
        let mut by = Complex64::new(0.0, 0.0);
        for (w, a) in self.weights.inputs.iter().zip(&self.punctures) {
            let u = dx + (anchor - a);
            let r2 = u * u + y * y;
            bx -= y * (w / PI) / r2;
            by += u * (w / PI) / r2;
        }
        [bx, by]
    }
}

impl PlanarOneForm for SlitDomainSpec {
    fn components(&self, x: Complex64, y: Complex64) -> [Complex64; 2] {
        self.components_shifted(0.0, x, y)
    }

    fn components_near(&self, anchor: f64, dx: Complex64, dy: Complex64) -> [Complex64; 2] {
        self.components_shifted(anchor, dx, dy)
    }
}

/// `β + c·x² dy`: a form that is not closed, used as a negative control.
pub struct NonHarmonicPerturbation<'a, F: PlanarOneForm> {
    pub base: &'a F,
    pub amplitude: f64,
}

impl<F: PlanarOneForm> PlanarOneForm for NonHarmonicPerturbation<'_, F> {
    fn components(&self, x: Complex64, y: Complex64) -> [Complex64; 2] {
        let [bx, by] = self.base.components(x, y);
        [bx, by + x * x * self.amplitude]
    }
}

/// Deviation of the pullback along one end from `wʲ dt`.  End `0` is the outgoing end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndDeviation {
    pub end: usize,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid_density: usize,
    pub interior_points: usize,
    pub boundary_points: usize,
    pub max_d_beta: f64,
    pub max_d_beta_j: f64,
    pub max_boundary_tangential: f64,
    pub end_depth: f64,
    pub end_deviations: Vec<EndDeviation>,
    pub tol: f64,
    pub pass: bool,
}

const COMPLEX_STEP: f64 = 1e-30;

fn dx_of<F: PlanarOneForm + ?Sized>(form: &F, x: f64, y: f64, comp: usize) -> f64 {
    form.components(Complex64::new(x, COMPLEX_STEP), Complex64::new(y, 0.0))[comp].im / COMPLEX_STEP
}

fn dy_of<F: PlanarOneForm + ?Sized>(form: &F, x: f64, y: f64, comp: usize) -> f64 {
    form.components(Complex64::new(x, 0.0), Complex64::new(y, COMPLEX_STEP))[comp].im / COMPLEX_STEP
}

/// Check `dβ = 0`, `d(β∘j) = 0`, `i*β = 0` and the end behaviour of `β` for the slit map.
pub fn verify_beta_conditions(spec: &SlitDomainSpec, grid_density: usize, tol: f64) -> VerificationReport {
    verify_one_form(spec, spec, grid_density, tol)
}

/// As [`verify_beta_conditions`], for an arbitrary form on the domain of `spec`.
///
/// Derivatives are taken numerically by complex steps on a cell-centred grid covering the
/// punctures with margins; the boundary check samples the real axis; the end check pulls
/// back along the strip coordinates `ζ = aⱼ + e^{π(s+it)}` (inputs, `s = −depth`) and
/// `ζ = c + e^{π(s+it)}` (output, `s = +depth`).
pub fn verify_one_form<F: PlanarOneForm + ?Sized>(
    form: &F,
    spec: &SlitDomainSpec,
    grid_density: usize,
    tol: f64,
) -> VerificationReport {
    let p = spec.punctures();
    let span = (p[p.len() - 1] - p[0]).max(1.0);
    let lo = p[0] - span - 1.0;
    let hi = p[p.len() - 1] + span + 1.0;
    let height = hi - lo;
    let n = grid_density.max(1);
    let hx = (hi - lo) / n as f64;
    let hy = height / n as f64;

    let mut max_d_beta: f64 = 0.0;
    let mut max_d_beta_j: f64 = 0.0;
    for i in 0..n {
        let x = lo + (i as f64 + 0.5) * hx;
        for j in 0..n {
            let y = (j as f64 + 0.5) * hy;
            let dxbx = dx_of(form, x, y, 0);
            let dxby = dx_of(form, x, y, 1);
            let dybx = dy_of(form, x, y, 0);
            let dyby = dy_of(form, x, y, 1);
            let curl = dxby - dybx;
            // β∘j = (β_y, −β_x)
            let curl_j = -dxbx - dyby;
            max_d_beta = max_d_beta.max(curl.abs());
            max_d_beta_j = max_d_beta_j.max(curl_j.abs());
        }
    }

    let mut max_tangential: f64 = 0.0;
    let mut boundary_points = 0;
    for i in 0..=n {
        let x = lo + i as f64 * hx;
        if p.iter().any(|a| (x - a).abs() < 1e-12) {
            continue;
        }
        boundary_points += 1;
        let bx = form.components(Complex64::new(x, 0.0), Complex64::new(0.0, 0.0))[0].re;
        max_tangential = max_tangential.max(bx.abs());
    }

    let end_deviations = end_deviations(form, spec, END_DEPTH);
    let pass = max_d_beta < tol
        && max_d_beta_j < tol
        && max_tangential < tol
        && end_deviations.iter().all(|e| e.deviation < tol);
    VerificationReport {
        grid_density: n,
        interior_points: n * n,
        boundary_points,
        max_d_beta,
        max_d_beta_j,
        max_boundary_tangential: max_tangential,
        end_depth: END_DEPTH,
        end_deviations,
        tol,
        pass,
    }
}

/// Pullback deviations from `wʲ dt` along every end at the given depth.
pub fn end_deviations<F: PlanarOneForm + ?Sized>(form: &F, spec: &SlitDomainSpec, depth: f64) -> Vec<EndDeviation> {
    let p = spec.punctures();
    let w = spec.weights();
    let centre = 0.5 * (p[0] + p[p.len() - 1]);
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(EndDeviation { end: 0, deviation: end_deviation(form, centre, depth, w.w0()) });
    for (j, (&a, &wj)) in p.iter().zip(w.inputs()).enumerate() {
        out.push(EndDeviation { end: j + 1, deviation: end_deviation(form, a, -depth, wj) });
    }
    out
}

fn end_deviation<F: PlanarOneForm + ?Sized>(form: &F, anchor: f64, s: f64, width: f64) -> f64 {
    let samples = 20;
    let mut worst: f64 = 0.0;
    for i in 0..=samples {
        let t = i as f64 / samples as f64;
        let e = Complex64::from_polar((PI * s).exp(), PI * t);
        // on the real axis the imaginary part must be an exact zero
        let y = if i == 0 || i == samples { 0.0 } else { e.im };
        let [bx, by] = form.components_near(anchor, Complex64::new(e.re, 0.0), Complex64::new(y, 0.0));
        let (bx, by) = (bx.re, by.re);
        let ds = e * PI;
        let dt = e * Complex64::new(0.0, PI);
        let along_s = bx * ds.re + by * ds.im;
        let along_t = bx * dt.re + by * dt.im;
        worst = worst.max(along_s.abs()).max((along_t - width).abs());
    }
    worst
}

const NEWTON_MAX_ITER: usize = 80;

/// Find punctures `a₁ = 0 < a₂ < … < a_k` realising the given slit tips.
///
/// Only translations of the half-plane are fixed (`a₁ = 0`); the scale is determined by the
/// targets, since rescaling the half-plane translates every slit tip by the same amount.
/// The solver runs damped Newton in log-gap coordinates along a continuation from an
/// equally spaced configuration, halving the continuation step when Newton stalls.
pub fn invert_slit_params(weights: &Weights, target_slits: &[f64]) -> Result<SlitDomainSpec> {
    let k = weights.k();
    if k < 2 {
        return Err(Error::InvalidArity(k));
    }
    if target_slits.len() != k - 1 {
        return Err(Error::InvalidDomain(format!("{} slit targets for {k} inputs", target_slits.len())));
    }
    if target_slits.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidDomain("slit targets must be finite".into()));
    }
    let mut gaps = vec![0.0; k - 1];
    let start = build_from_gaps(weights, &gaps)?;
    let s0 = start.slit_params.clone();
    let scale = 1.0 + target_slits.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let mut lambda: f64 = 0.0;
    let mut step: f64 = 1.0;
    while lambda < 1.0 {
        let next = (lambda + step).min(1.0);
        let target: Vec<f64> = s0.iter().zip(target_slits).map(|(a, b)| a + next * (b - a)).collect();
        let final_step = next >= 1.0;
        let tol = if final_step { 1e-13 * scale } else { 1e-9 * scale };
        match newton(weights, &gaps, &target, tol) {
            Ok(g) => {
                gaps = g;
                lambda = next;
                step = (step * 2.0).min(1.0);
            }
            Err(e) => {
                step *= 0.5;
                if step < 1e-6 {
                    return Err(e);
                }
            }
        }
    }
    let spec = build_from_gaps(weights, &gaps)?;
    let residual = max_abs_diff(&spec.slit_params, target_slits);
    if residual > DEFAULT_TOL * scale {
        return Err(Error::NumericFailure { message: "slit inversion did not converge".into(), residual });
    }
    Ok(spec)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn build_from_gaps(weights: &Weights, gaps: &[f64]) -> Result<SlitDomainSpec> {
    let mut p = Vec::with_capacity(gaps.len() + 1);
    p.push(0.0);
    let mut acc: f64 = 0.0;
    for g in gaps {
        acc += g.exp();
        p.push(acc);
    }
    build_slit_map(weights, &p)
}

fn newton(weights: &Weights, gaps: &[f64], target: &[f64], tol: f64) -> Result<Vec<f64>> {
    let n = gaps.len();
    let mut g = gaps.to_vec();
    let mut spec = build_from_gaps(weights, &g)?;
    let mut res = max_abs_diff(&spec.slit_params, target);
    for _ in 0..NEWTON_MAX_ITER {
        if res <= tol {
            return Ok(g);
        }
        // ∂s_ℓ/∂a_j = −(wʲ/π)/(c_ℓ − a_j); the critical point moves to first order only
        // inside the kernel of F′, so it drops out.
        let w = weights.inputs();
        let a = spec.punctures();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for l in 0..n {
            let c = spec.critical_points[l];
            for m in 0..n {
                let dgap = g[m].exp();
                let mut sum = 0.0;
                for j in (m + 1)..=n {
                    sum += -(w[j] / PI) / (c - a[j]);
                }
                jac[(l, m)] = sum * dgap;
            }
        }
        let r = DVector::from_iterator(n, spec.slit_params.iter().zip(target).map(|(s, t)| t - s));
        let delta = jac.lu().solve(&r).ok_or_else(|| Error::NumericFailure {
            message: "singular Jacobian in slit inversion".into(),
            residual: res,
        })?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = g.iter().zip(delta.iter()).map(|(x, d)| x + t * d).collect();
            if let Ok(s) = build_from_gaps(weights, &trial) {
                let r_new = max_abs_diff(&s.slit_params, target);
                if r_new < res {
                    g = trial;
                    spec = s;
                    res = r_new;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            // stalled at the rounding floor
            if res <= tol.max(1e-11 * (1.0 + target.iter().fold(0.0f64, |m, s| m.max(s.abs())))) {
                return Ok(g);
            }
            return Err(Error::NumericFailure { message: "Newton line search failed".into(), residual: res });
        }
    }
    if res <= tol {
        Ok(g)
    } else {
        Err(Error::NumericFailure { message: "Newton iteration limit reached".into(), residual: res })
    }
}

/// Glue `u` into input `i` (1-based) of `v` with neck length `gluing_length`.
///
/// The glued slit configuration is `v`'s slits with `u`'s slits inserted between slit
/// `i − 1` and slit `i` of `v`, translated so that their tips lie `gluing_length` to the
/// left of the neighbouring tips of `v`.  The punctures are recovered by inversion.
pub fn glue_slit_domains(
    u_spec: &SlitDomainSpec,
    v_spec: &SlitDomainSpec,
    i: usize,
    gluing_length: f64,
) -> Result<SlitDomainSpec> {
    if !(gluing_length.is_finite() && gluing_length > 0.0) {
        return Err(Error::InvalidDomain(format!("gluing length {gluing_length} must be positive")));
    }
    let weights = Weights::glue(u_spec.weights(), v_spec.weights(), i)?;
    if u_spec.k() == 1 {
        return Ok(v_spec.clone());
    }
    let targets = glued_slit_targets(u_spec, v_spec, i, gluing_length);
    invert_slit_params(&weights, &targets)
}

fn glued_slit_targets(u: &SlitDomainSpec, v: &SlitDomainSpec, i: usize, length: f64) -> Vec<f64> {
    let vs = v.slit_params();
    let mut neighbours = Vec::new();
    if i >= 2 {
        neighbours.push(vs[i - 2]);
    }
    if i <= vs.len() {
        neighbours.push(vs[i - 1]);
    }
    let anchor = neighbours.iter().cloned().fold(f64::INFINITY, f64::min);
    let anchor = if anchor.is_finite() { anchor } else { 0.0 };
    let umax = u.slit_params().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shift = anchor - umax - length;
    let mut out = Vec::with_capacity(vs.len() + u.slit_params().len());
    out.extend_from_slice(&vs[..i - 1]);
    out.extend(u.slit_params().iter().map(|s| s + shift));
    out.extend_from_slice(&vs[i - 1..]);
    out
}

/// Distance of a glued configuration from its nodal limit: `v` with a collapsed cluster
/// shaped like `u` at puncture `i`.
///
/// The value is the largest of the cluster diameter relative to the span of `v`'s
/// punctures, and the deviations of the normalized cluster and the normalized remainder
/// from `u` and `v`.
pub fn gluing_residual(glued: &SlitDomainSpec, u: &SlitDomainSpec, v: &SlitDomainSpec, i: usize) -> Result<f64> {
    let k1 = u.k();
    let k2 = v.k();
    if glued.k() != k1 + k2 - 1 || i == 0 || i > k2 {
        return Err(Error::IncompatibleWeights("glued domain does not match its factors".into()));
    }
    let b = glued.punctures();
    if k1 == 1 {
        return Ok(max_abs_diff(&normalize_points(b), &normalize_points(v.punctures())));
    }
    if k2 == 1 {
        return Ok(max_abs_diff(&normalize_points(b), &normalize_points(u.punctures())));
    }
    let cluster = &b[i - 1..i - 1 + k1];
    let centre = cluster.iter().sum::<f64>() / k1 as f64;
    let mut rest = Vec::with_capacity(k2);
    rest.extend_from_slice(&b[..i - 1]);
    rest.push(centre);
    rest.extend_from_slice(&b[i - 1 + k1..]);
    let diameter = (cluster[k1 - 1] - cluster[0]) / (rest[k2 - 1] - rest[0]);
    let u_dev = max_abs_diff(&normalize_points(cluster), &normalize_points(u.punctures()));
    let v_dev = max_abs_diff(&normalize_points(&rest), &normalize_points(v.punctures()));
    Ok(diameter.max(u_dev).max(v_dev))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[f64]) -> Weights {
        Weights::new(v.to_vec()).unwrap()
    }

    #[test]
    fn basic_example() {
        let spec = build_slit_map(&w(&[1.0, 1.0]), &[0.0, 1.0]).unwrap();
        assert_eq!(spec.critical_points(), &[0.5]);
        assert_eq!(spec.levels(), &[1.0]);
        let expected = -2.0 * 2f64.ln() / PI;
        assert!((spec.slit_params()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn weights_validation() {
        assert!(matches!(Weights::new(vec![]), Err(Error::InvalidWeights(_))));
        assert!(matches!(Weights::new(vec![1.0, 0.0]), Err(Error::InvalidWeights(_))));
        assert!(matches!(Weights::new(vec![1.0, -2.0]), Err(Error::InvalidWeights(_))));
        assert_eq!(w(&[1.5, 2.5]).w0(), 4.0);
    }

    #[test]
    fn weights_json_rejects_wrong_sum() {
        let ok: Weights = serde_json::from_str(r#"{"w0": 2.0, "inputs": [1.0, 1.0]}"#).unwrap();
        assert_eq!(ok.w0(), 2.0);
        assert!(serde_json::from_str::<Weights>(r#"{"w0": 3.0, "inputs": [1.0, 1.0]}"#).is_err());
    }

    #[test]
    fn single_strip() {
        let spec = build_slit_map(&w(&[2.0]), &[0.0]).unwrap();
        assert!(spec.slit_params().is_empty());
        let left = spec.map_value(Complex64::new(-1.0, 0.0)).unwrap();
        let right = spec.map_value(Complex64::new(3.0, 0.0)).unwrap();
        assert_eq!(left.im, 2.0);
        assert_eq!(right.im, 0.0);
    }

    #[test]
    fn boundary_levels_step_down() {
        let spec = build_slit_map(&w(&[1.0, 2.0, 0.5]), &[0.0, 1.0, 2.5]).unwrap();
        for (x, expect) in [(-3.0, 3.5), (0.5, 2.5), (2.0, 0.5), (7.0, 0.0)] {
            let im = spec.map_value(Complex64::new(x, 0.0)).unwrap().im;
            assert!((im - expect).abs() < 1e-14, "Im F({x}) = {im}");
            assert_eq!(spec.boundary_level(x), expect);
        }
    }

    #[test]
    fn duplicate_punctures_rejected() {
        assert!(matches!(
            build_slit_map(&w(&[1.0, 1.0]), &[0.0, 0.0]),
            Err(Error::InvalidDomain(_))
        ));
        assert!(matches!(
            build_slit_map(&w(&[1.0, 1.0]), &[1.0, 0.0]),
            Err(Error::InvalidDomain(_))
        ));
    }

    #[test]
    fn beta_at_puncture_is_singular() {
        let spec = build_slit_map(&w(&[1.0, 1.0]), &[0.0, 1.0]).unwrap();
        assert!(matches!(eval_beta(&spec, Complex64::new(1.0, 0.0)), Err(Error::SingularPoint(_))));
        assert!(matches!(eval_beta(&spec, Complex64::new(0.5, -1.0)), Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn beta_tangential_vanishes_on_boundary() {
        let spec = build_slit_map(&w(&[1.0, 1.0]), &[0.0, 1.0]).unwrap();
        for x in [-5.0, 0.25, 0.5, 3.0] {
            let v = eval_beta(&spec, Complex64::new(x, 0.0)).unwrap();
            assert_eq!(v.beta[0], 0.0);
        }
    }

    #[test]
    fn beta_at_i_matches_difference_quotient() {
        let spec = build_slit_map(&w(&[1.0, 1.0]), &[0.0, 1.0]).unwrap();
        let v = eval_beta(&spec, Complex64::new(0.0, 1.0)).unwrap();
        let h = 1e-6;
        let im = |x: f64, y: f64| spec.map_value(Complex64::new(x, y)).unwrap().im;
        let fx = (im(h, 1.0) - im(-h, 1.0)) / (2.0 * h);
        let fy = (im(0.0, 1.0 + h) - im(0.0, 1.0 - h)) / (2.0 * h);
        assert!((v.beta[0] - fx).abs() < 1e-8);
        assert!((v.beta[1] - fy).abs() < 1e-8);
        assert_eq!(v.beta_j, [v.beta[1], -v.beta[0]]);
    }

    #[test]
    fn verification_passes_and_negative_control_fails() {
        let spec = build_slit_map(&w(&[1.0, 1.0]), &[0.0, 1.0]).unwrap();
        let rep = verify_beta_conditions(&spec, 60, DEFAULT_TOL);
        assert!(rep.pass, "{rep:?}");
        let bad = NonHarmonicPerturbation { base: &spec, amplitude: 1e-3 };
        let rep = verify_one_form(&bad, &spec, 60, DEFAULT_TOL);
        assert!(!rep.pass);
        assert!(rep.max_d_beta > 1e-4);
    }

    #[test]
    fn invert_basic() {
        let weights = w(&[1.0, 1.0]);
        let target = -2.0 * 2f64.ln() / PI;
        let spec = invert_slit_params(&weights, &[target]).unwrap();
        assert!((spec.punctures()[1] - 1.0).abs() < 1e-12);
        assert!(matches!(invert_slit_params(&w(&[1.0]), &[]), Err(Error::InvalidArity(1))));
    }

    #[test]
    fn invert_roundtrip_k3() {
        let weights = w(&[0.7, 1.3, 2.1]);
        let spec = build_slit_map(&weights, &[0.0, 1.0, 3.7]).unwrap();
        let back = invert_slit_params(&weights, spec.slit_params()).unwrap();
        for (a, b) in back.punctures().iter().zip(spec.punctures()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn glue_weights_example() {
        let u = build_slit_map(&w(&[1.0, 1.0]), &[0.0, 1.0]).unwrap();
        let v = build_slit_map(&w(&[2.0, 1.0]), &[0.0, 1.0]).unwrap();
        let g = glue_slit_domains(&u, &v, 1, 2.0).unwrap();
        assert_eq!(g.weights().inputs(), &[1.0, 1.0, 1.0]);
        assert_eq!(g.weights().w0(), 3.0);
        let bad = build_slit_map(&w(&[1.0, 2.0]), &[0.0, 1.0]).unwrap();
        assert!(matches!(glue_slit_domains(&bad, &v, 1, 2.0), Err(Error::IncompatibleWeights(_))));
    }

    #[test]
    fn glue_unit_strip() {
        let strip = build_slit_map(&w(&[2.0]), &[0.0]).unwrap();
        let v = build_slit_map(&w(&[2.0, 1.0]), &[0.0, 1.0]).unwrap();
        let g = glue_slit_domains(&strip, &v, 1, 3.0).unwrap();
        assert_eq!(g, v);
    }
}
