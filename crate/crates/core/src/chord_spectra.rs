//! Chord spectra of flat model geometries, cylindrical metric adjustments, Hamiltonian
//! vector fields of kinetic energy and metric comparison.
//!
//! A time-one chord of `H = |p|²/2` along a geodesic of length `L` has energy `E = L²/2`
//! and action `𝒜 = −E`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Div, Mul, Neg, Sub};

const SYMMETRY_TOL: f64 = 1e-12;
/// Relative slack when comparing energies against the cutoff.
const CUTOFF_SLACK: f64 = 1e-12;

/// Gram matrix of a flat torus lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct FlatTorusLattice {
    gram: DMatrix<f64>,
    labels: Vec<String>,
}

#[derive(Clone, Serialize, Deserialize)]
struct LatticeRepr {
    gram: Vec<Vec<f64>>,
    #[serde(default)]
    labels: Vec<String>,
}

impl TryFrom<LatticeRepr> for FlatTorusLattice {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Self> {
        let mut l = FlatTorusLattice::new(&r.gram)?;
        if !r.labels.is_empty() {
            l = l.with_labels(r.labels)?;
        }
        Ok(l)
    }
}

impl From<FlatTorusLattice> for LatticeRepr {
    fn from(l: FlatTorusLattice) -> Self {
        let n = l.gram.nrows();
        LatticeRepr { gram: (0..n).map(|i| (0..n).map(|j| l.gram[(i, j)]).collect()).collect(), labels: l.labels }
    }
}

/// Check squareness, symmetry and positive definiteness.
pub fn check_gram(g: &DMatrix<f64>) -> Result<()> {
    let n = g.nrows();
    if n == 0 || g.ncols() != n {
        return Err(Error::InvalidModel(format!("Gram matrix must be square, got {}×{}", n, g.ncols())));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidModel("Gram matrix has non-finite entries".into()));
    }
    let scale = g.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if (g[(i, j)] - g[(j, i)]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidModel(format!("Gram matrix not symmetric at ({i}, {j})")));
            }
        }
    }
    if g.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite("Cholesky factorisation failed".into()));
    }
    Ok(())
}

impl FlatTorusLattice {
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) || !(2..=3).contains(&n) {
            return Err(Error::InvalidModel("Gram matrix must be 2×2 or 3×3".into()));
        }
        let gram = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        check_gram(&gram)?;
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        Ok(FlatTorusLattice { gram, labels })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        FlatTorusLattice::new(&rows)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::InvalidModel(format!("{} labels for a rank {} lattice", labels.len(), self.dim())));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `v G vᵀ`.
    pub fn norm_squared(&self, v: &[i64]) -> f64 {
        let x = DVector::from_iterator(v.len(), v.iter().map(|&c| c as f64));
        (x.transpose() * &self.gram * &x)[(0, 0)]
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        let g = &self.gram * c;
        check_gram(&g)?;
        Ok(FlatTorusLattice { gram: g, labels: self.labels.clone() })
    }

    fn min_eigenvalue(&self) -> f64 {
        self.gram.clone().symmetric_eigen().eigenvalues.min()
    }
}

/// What distinguishes a chord class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChordDatum {
    /// The Morse–Bott family of constant chords.
    ConstantFamily,
    /// A cord wrapping the vertical circle `k` times.
    Wrap { k: i64 },
    /// A closed geodesic in the class of a lattice vector.
    Lattice { vector: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordClass {
    pub datum: ChordDatum,
    pub length: f64,
    pub energy: f64,
    pub action: f64,
    pub constant_family: bool,
}

impl ChordClass {
    fn from_length(datum: ChordDatum, length: f64) -> Self {
        let energy = 0.5 * length * length;
        ChordClass { constant_family: matches!(datum, ChordDatum::ConstantFamily), datum, length, energy, action: -energy }
    }

    fn from_energy(datum: ChordDatum, energy: f64) -> Self {
        ChordClass {
            constant_family: matches!(datum, ChordDatum::ConstantFamily),
            datum,
            length: (2.0 * energy).sqrt(),
            energy,
            action: -energy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordSpectrum {
    pub model: String,
    pub cutoff: f64,
    pub classes: Vec<ChordClass>,
}

impl ChordSpectrum {
    pub fn nonconstant(&self) -> impl Iterator<Item = &ChordClass> {
        self.classes.iter().filter(|c| !c.constant_family)
    }

    pub fn constant(&self) -> Option<&ChordClass> {
        self.classes.iter().find(|c| c.constant_family)
    }

    /// Largest fiber norm `|p|` along any chord: the length for time-one chords.
    pub fn max_fiber_norm(&self) -> f64 {
        self.classes.iter().map(|c| c.length).fold(0.0, f64::max)
    }
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if !(cutoff.is_finite() && cutoff < 0.0) {
        return Err(Error::InvalidCutoff(cutoff));
    }
    Ok(())
}

fn within_cutoff(energy: f64, cutoff: f64) -> bool {
    energy <= cutoff.abs() * (1.0 + CUTOFF_SLACK)
}

/// Perpendicular cords from `T² × {0}` to itself in the flat 3-torus with vertical period
/// `h`: wrap numbers `k ≠ 0` with `k²h²/2 ≤ |cutoff|`, plus the constant family.
pub fn enumerate_cords_t3(h: f64, cutoff: f64) -> Result<ChordSpectrum> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidModel(format!("vertical period {h} must be positive")));
    }
    check_cutoff(cutoff)?;
    let kmax = ((2.0 * cutoff.abs()).sqrt() / h).floor() as i64 + 1;
    let mut classes = vec![ChordClass::from_length(ChordDatum::ConstantFamily, 0.0)];
    let mut wraps: Vec<i64> = (1..=kmax).flat_map(|k| [-k, k]).collect();
    wraps.sort_by_key(|k| (k.abs(), *k));
    for k in wraps {
        let energy = 0.5 * (k * k) as f64 * h * h;
        if within_cutoff(energy, cutoff) {
            classes.push(ChordClass::from_energy(ChordDatum::Wrap { k }, energy));
        }
    }
    Ok(ChordSpectrum { model: format!("t3(h={h})"), cutoff, classes })
}

/// Closed geodesics of the flat 2-torus with Gram matrix `G`: lattice vectors `v ≠ 0` with
/// `vGvᵀ/2 ≤ |cutoff|`, sorted by energy.
pub fn enumerate_loops_t2(lattice: &FlatTorusLattice, cutoff: f64) -> Result<ChordSpectrum> {
    if lattice.dim() != 2 {
        return Err(Error::InvalidModel(format!("expected a rank 2 lattice, got rank {}", lattice.dim())));
    }
    check_cutoff(cutoff)?;
    let lam = lattice.min_eigenvalue();
    let bound = ((2.0 * cutoff.abs() / lam) * (1.0 + CUTOFF_SLACK)).sqrt().floor() as i64 + 1;
    let mut classes = Vec::new();
    for m in -bound..=bound {
        for n in -bound..=bound {
            if m == 0 && n == 0 {
                continue;
            }
            let energy = 0.5 * lattice.norm_squared(&[m, n]);
            if within_cutoff(energy, cutoff) {
                classes.push(ChordClass::from_energy(ChordDatum::Lattice { vector: vec![m, n] }, energy));
            }
        }
    }
    classes.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.datum.cmp(&b.datum)));
    Ok(ChordSpectrum { model: "t2".into(), cutoff, classes })
}

/// `𝔊 = min E` over nonconstant classes; every nonconstant action is then `≤ −𝔊`.
pub fn action_gap(spectrum: &ChordSpectrum) -> Result<f64> {
    let gap = spectrum.nonconstant().map(|c| c.energy).fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return Err(Error::UndefinedGap);
    }
    if let Some(bad) = spectrum.nonconstant().find(|c| c.action > -gap) {
        return Err(Error::NumericFailure { message: format!("action {} above −gap", bad.action), residual: bad.action + gap });
    }
    Ok(gap)
}

/// Smallest `C ≥ 1` with `G₁/C ≤ G₂ ≤ C·G₁`, from the generalized eigenvalues of `(G₂, G₁)`.
pub fn lipschitz_constant(g1: &DMatrix<f64>, g2: &DMatrix<f64>) -> Result<f64> {
    check_gram(g1)?;
    check_gram(g2)?;
    if g1.nrows() != g2.nrows() {
        return Err(Error::InvalidModel(format!("dimensions {} and {} differ", g1.nrows(), g2.nrows())));
    }
    let l = g1.clone().cholesky().ok_or_else(|| Error::NotPositiveDefinite("first metric".into()))?.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::NotPositiveDefinite("singular factor".into()))?;
    let m = &linv * g2 * linv.transpose();
    let sym = (&m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen().eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if lo <= 0.0 {
        return Err(Error::NotPositiveDefinite("generalized eigenvalue not positive".into()));
    }
    Ok(hi.max(1.0 / lo))
}

/// Forward-mode dual number `v + d·ε`, `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn constant(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }

    pub fn variable(v: f64) -> Self {
        Dual { v, d: 1.0 }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Dual { v: e, d: e * self.d }
    }

    pub fn ln(self) -> Self {
        Dual { v: self.v.ln(), d: self.d / self.v }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        Dual { v: self.v / o.v, d: (self.d * o.v - self.v * o.d) / (o.v * o.v) }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { v: -self.v, d: -self.d }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, c: f64) -> Dual {
        Dual { v: self.v * c, d: self.d * c }
    }
}

/// Coordinates on the end: `(a, θ, φ)` or `(r, θ, φ)` with `r = e^{−a}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    A,
    R,
}

/// A metric that is diagonal in the chart coordinates.
pub trait DiagonalMetric {
    /// Coefficients of `(dx₁², dx₂², dx₃²)` at `q`.
    fn coefficients(&self, chart: Chart, q: [Dual; 3]) -> Result<[Dual; 3]>;
}

/// The unit product cylinder `da² + dθ² + dφ²`, i.e. `dr²/r² + dθ² + dφ²`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProductCylinder;

impl DiagonalMetric for ProductCylinder {
    fn coefficients(&self, chart: Chart, q: [Dual; 3]) -> Result<[Dual; 3]> {
        let one = Dual::constant(1.0);
        match chart {
            Chart::A => Ok([one, one, one]),
            Chart::R => {
                if !(q[0].v > 0.0) {
                    return Err(Error::OutsideChart(format!("r = {} must be positive", q[0].v)));
                }
                Ok([one / (q[0] * q[0]), one, one])
            }
        }
    }
}

/// Monotone quintic step with `C²` contact at both ends: `10t³ − 15t⁴ + 6t⁵` on `[0, 1]`.
fn smoothstep(t: Dual) -> Dual {
    if t.v <= 0.0 {
        return Dual::constant(0.0);
    }
    if t.v >= 1.0 {
        return Dual::constant(1.0);
    }
    let t2 = t * t;
    let t3 = t2 * t;
    t3 * (Dual::constant(10.0) + t * (Dual::constant(-15.0) + t * 6.0))
}

/// Cylindrical adjustment at depth `i` of the tube metric `s²e^{−2a}(da² + dθ²) + dφ²`.
///
/// The coefficients equal the tube metric for `a ≤ i − w`, the product
/// `s²ε₁²(da² + dθ²) + dφ²` with `ε₁ = e^{−i}` for `a ≥ i`, and are blended by a
/// quintic step in between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylindricalMetricModel {
    pub depth: f64,
    pub window: f64,
    pub base_scale: f64,
}

impl CylindricalMetricModel {
    pub fn new(depth: f64, window: f64, base_scale: f64) -> Result<Self> {
        let m = CylindricalMetricModel { depth, window, base_scale };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.window.is_finite() && self.window > 0.0 && self.depth.is_finite()) {
            return Err(Error::DegenerateWindow(format!("window [{}, {}]", self.depth - self.window, self.depth)));
        }
        if !(self.base_scale.is_finite() && self.base_scale > 0.0) {
            return Err(Error::InvalidModel(format!("base scale {} must be positive", self.base_scale)));
        }
        Ok(())
    }

    pub fn window_start(&self) -> f64 {
        self.depth - self.window
    }

    pub fn epsilon(&self) -> f64 {
        (-self.depth).exp()
    }

    fn coefficients_a(&self, a: Dual) -> [Dual; 3] {
        let s2 = self.base_scale * self.base_scale;
        let tube = (-(a * 2.0)).exp() * s2;
        let eps2 = self.epsilon() * self.epsilon();
        let far = Dual::constant(s2 * eps2);
        let t = (a - Dual::constant(self.window_start())) * (1.0 / self.window);
        let b = smoothstep(t);
        let c = tube * (Dual::constant(1.0) - b) + far * b;
        [c, c, Dual::constant(1.0)]
    }

    /// Coefficients of `(da², dθ², dφ²)` at `a`.
    pub fn coefficients_at(&self, a: f64) -> [f64; 3] {
        self.coefficients_a(Dual::constant(a)).map(|d| d.v)
    }

    /// Coefficients of `(dr², dθ², dφ²)` at `r = e^{−a}`.
    pub fn coefficients_at_r(&self, r: f64) -> Result<[f64; 3]> {
        Ok(self.coefficients(Chart::R, [Dual::constant(r), Dual::constant(0.0), Dual::constant(0.0)])?.map(|d| d.v))
    }
}

impl DiagonalMetric for CylindricalMetricModel {
    fn coefficients(&self, chart: Chart, q: [Dual; 3]) -> Result<[Dual; 3]> {
        match chart {
            Chart::A => Ok(self.coefficients_a(q[0])),
            Chart::R => {
                if !(q[0].v > 0.0) {
                    return Err(Error::OutsideChart(format!("r = {} must be positive", q[0].v)));
                }
                let a = -q[0].ln();
                let [caa, ctt, cpp] = self.coefficients_a(a);
                Ok([caa / (q[0] * q[0]), ctt, cpp])
            }
        }
    }
}

/// Diagnostics of a cylindrical adjustment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentReport {
    pub window: (f64, f64),
    pub far_coefficients: [f64; 3],
    pub midpoint_coefficients: [f64; 3],
    pub tube_deviation: f64,
    pub far_deviation: f64,
    pub monotone_in_window: bool,
    pub min_coefficient: f64,
}

/// Sample the adjusted coefficients around the window.
pub fn cylindrical_adjust(model: &CylindricalMetricModel, samples: usize) -> Result<AdjustmentReport> {
    model.validate()?;
    let n = samples.max(2);
    let (w0, w1) = (model.window_start(), model.depth);
    let s2 = model.base_scale * model.base_scale;
    let far = [s2 * model.epsilon() * model.epsilon(), s2 * model.epsilon() * model.epsilon(), 1.0];
    let mut tube_dev: f64 = 0.0;
    let mut far_dev: f64 = 0.0;
    let mut min_c = f64::INFINITY;
    for i in 0..=n {
        let a = w0 - 2.0 + 2.0 * i as f64 / n as f64;
        let c = model.coefficients_at(a);
        let tube = s2 * (-2.0 * a).exp();
        tube_dev = tube_dev.max((c[0] - tube).abs() / tube).max((c[1] - tube).abs() / tube).max((c[2] - 1.0).abs());
        let b = w1 + 2.0 * i as f64 / n as f64;
        let c = model.coefficients_at(b);
        for j in 0..3 {
            far_dev = far_dev.max((c[j] - far[j]).abs() / far[j]);
        }
    }
    let mut monotone = true;
    let mut prev = model.coefficients_at(w0)[0];
    for i in 1..=n {
        let a = w0 + (w1 - w0) * i as f64 / n as f64;
        let c = model.coefficients_at(a);
        min_c = min_c.min(c[0]).min(c[1]).min(c[2]);
        if c[0] > prev {
            monotone = false;
        }
        prev = c[0];
    }
    Ok(AdjustmentReport {
        window: (w0, w1),
        far_coefficients: far,
        midpoint_coefficients: model.coefficients_at(0.5 * (w0 + w1)),
        tube_deviation: tube_dev,
        far_deviation: far_dev,
        monotone_in_window: monotone,
        min_coefficient: min_c,
    })
}

/// Lipschitz constant of two adjusted metrics, maximised over sample points in `a`.
pub fn model_lipschitz(m1: &CylindricalMetricModel, m2: &CylindricalMetricModel, a_values: &[f64]) -> Result<f64> {
    let mut worst: f64 = 1.0;
    for &a in a_values {
        let g1 = DMatrix::from_diagonal(&DVector::from_row_slice(&m1.coefficients_at(a)));
        let g2 = DMatrix::from_diagonal(&DVector::from_row_slice(&m2.coefficients_at(a)));
        worst = worst.max(lipschitz_constant(&g1, &g2)?);
    }
    Ok(worst)
}

/// `H = ½ Σ pᵢ² / gᵢᵢ(q)` for a diagonal metric.
fn kinetic<M: DiagonalMetric>(metric: &M, chart: Chart, q: [Dual; 3], p: [Dual; 3]) -> Result<Dual> {
    let g = metric.coefficients(chart, q)?;
    let mut h = Dual::constant(0.0);
    for i in 0..3 {
        h = h + p[i] * p[i] / g[i];
    }
    Ok(h * 0.5)
}

/// `X_H` from `ι_X ω = dH` with `ω = Σ dqᵢ ∧ dpᵢ` and `H = |p|²_g / 2`.
///
/// The gradient is taken by forward-mode dual numbers and the linear system
/// `Ωᵀ X = ∇H` is solved by LU.  Points are `(q₁, q₂, q₃, p₁, p₂, p₃)`.
pub fn hamiltonian_vector_field<M: DiagonalMetric>(metric: &M, chart: Chart, point: [f64; 6]) -> Result<[f64; 6]> {
    if point.iter().any(|x| !x.is_finite()) {
        return Err(Error::OutsideChart("non-finite coordinates".into()));
    }
    let mut grad = DVector::<f64>::zeros(6);
    for k in 0..6 {
        let seed = |i: usize| if i == k { Dual::variable(point[i]) } else { Dual::constant(point[i]) };
        let q = [seed(0), seed(1), seed(2)];
        let p = [seed(3), seed(4), seed(5)];
        grad[k] = kinetic(metric, chart, q, p)?.d;
    }
    let mut omega = DMatrix::<f64>::zeros(6, 6);
    for i in 0..3 {
        omega[(i, i + 3)] = 1.0;
        omega[(i + 3, i)] = -1.0;
    }
    let x = omega
        .transpose()
        .lu()
        .solve(&grad)
        .ok_or_else(|| Error::NotSymplectic("symplectic matrix is singular".into()))?;
    Ok([x[0], x[1], x[2], x[3], x[4], x[5]])
}

/// Closed form of `X_H` on the unit product cylinder.
///
/// `a`-chart: `p_a ∂_a + p_θ ∂_θ + p_φ ∂_φ`.
/// `r`-chart: `r² p_r ∂_r + p_θ ∂_θ + p_φ ∂_φ − r p_r² ∂_{p_r}`.
pub fn product_cylinder_xh(chart: Chart, point: [f64; 6]) -> Result<[f64; 6]> {
    let [q0, _, _, p0, p1, p2] = point;
    match chart {
        Chart::A => Ok([p0, p1, p2, 0.0, 0.0, 0.0]),
        Chart::R => {
            if !(q0 > 0.0) {
                return Err(Error::OutsideChart(format!("r = {q0} must be positive")));
            }
            Ok([q0 * q0 * p0, p1, p2, -q0 * p0 * p0, 0.0, 0.0])
        }
    }
}

/// `H(q, p) = |p|²/2` in flat coordinates.
pub fn flat_kinetic(_q: &[f64], p: &[f64]) -> f64 {
    0.5 * p.iter().map(|x| x * x).sum::<f64>()
}

/// `H(q, p) = |p|`, homogeneous of degree one.
pub fn fiber_norm(_q: &[f64], p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleReport {
    pub w: f64,
    pub residual: f64,
    /// Index of the image of each class under the fiber scaling `p ↦ w p`.
    pub relabeling: Vec<usize>,
}

/// `max |H(q, w p)/w² − H(q, p)|` over the samples, and the class bijection induced by the
/// fiber scaling on the given spectrum.
pub fn quadratic_rescale_check<H: Fn(&[f64], &[f64]) -> f64>(
    w: f64,
    samples: &[(Vec<f64>, Vec<f64>)],
    hamiltonian: H,
    spectrum: &ChordSpectrum,
) -> Result<RescaleReport> {
    if !(w.is_finite() && w > 0.0) {
        return Err(Error::InvalidModel(format!("scaling weight {w} must be positive")));
    }
    let mut residual: f64 = 0.0;
    for (q, p) in samples {
        let scaled: Vec<f64> = p.iter().map(|x| w * x).collect();
        residual = residual.max((hamiltonian(q, &scaled) / (w * w) - hamiltonian(q, p)).abs());
    }
    // the scaling preserves the homotopy class of every chord
    let relabeling = spectrum
        .classes
        .iter()
        .map(|c| spectrum.classes.iter().position(|d| d.datum == c.datum).expect("class is present"))
        .collect();
    Ok(RescaleReport { w, residual, relabeling })
}
