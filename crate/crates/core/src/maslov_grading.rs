//! Robbin–Salamon index of Lagrangian paths by crossing forms, and the grading of cords in
//! the flat conormal model.
//!
//! Coordinates on `ℝ²ⁿ` are `(q, p)` with `ω = Σ dqᵢ ∧ dpᵢ` and `J₀(q, p) = (−p, q)`, so
//! `ℝ²ⁿ ≅ ℂⁿ` via `q + ip` and `J₀` is multiplication by `i`.  A Lagrangian is stored as a
//! unitary `U` with `L = U ℝⁿ`.

use crate::chord_spectra::{ChordClass, ChordDatum};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const STRUCTURE_TOL: f64 = 1e-9;
pub const PERTURBATION: f64 = 1e-6;
const DEFAULT_SCAN: usize = 1024;
const KERNEL_TOL: f64 = 1e-6;
const ENDPOINT_TOL: f64 = 1e-9;
const TANGENT_TOL: f64 = 1e-8;
const FORM_TOL: f64 = 1e-6;
const DIFF_STEP: f64 = 1e-5;

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "f64", try_from = "f64")]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);

    pub fn from_twice(twice: i64) -> Self {
        HalfInteger(twice)
    }

    pub fn from_int(n: i64) -> Self {
        HalfInteger(2 * n)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl std::ops::Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, o: HalfInteger) -> HalfInteger {
        HalfInteger(self.0 + o.0)
    }
}

impl std::ops::Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> HalfInteger {
        HalfInteger(-self.0)
    }
}

impl From<HalfInteger> for f64 {
    fn from(h: HalfInteger) -> f64 {
        h.value()
    }
}

impl TryFrom<f64> for HalfInteger {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        let t = 2.0 * x;
        if !t.is_finite() || t.fract() != 0.0 {
            return Err(Error::Config(format!("{x} is not a half-integer")));
        }
        Ok(HalfInteger(t as i64))
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// `J₀` as a real `2n × 2n` matrix.
pub fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

/// Complex Gram–Schmidt on the columns, run twice.
pub fn unitarize(u: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = u.ncols();
    let mut q = u.clone();
    for _ in 0..2 {
        for j in 0..n {
            for i in 0..j {
                let ci = q.column(i).clone_owned();
                let r = ci.dotc(&q.column(j));
                let cj = q.column(j) - ci * r;
                q.set_column(j, &cj);
            }
            let norm = q.column(j).norm();
            if !(norm > 1e-12) {
                return Err(Error::NotLagrangian(format!("frame column {j} is degenerate")));
            }
            let cj = q.column(j) / Complex64::new(norm, 0.0);
            q.set_column(j, &cj);
        }
    }
    Ok(q)
}

/// Rows spanning a Lagrangian subspace of `ℝ²ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LagrangianFrame {
    rows: DMatrix<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for LagrangianFrame {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != 2 * n) {
            return Err(Error::NotLagrangian("frame must be n × 2n".into()));
        }
        LagrangianFrame::new(DMatrix::from_fn(n, 2 * n, |i, j| rows[i][j]))
    }
}

impl From<LagrangianFrame> for Vec<Vec<f64>> {
    fn from(f: LagrangianFrame) -> Self {
        f.rows.row_iter().map(|r| r.iter().copied().collect()).collect()
    }
}

impl LagrangianFrame {
    pub fn new(rows: DMatrix<f64>) -> Result<Self> {
        let n = rows.nrows();
        if n == 0 || rows.ncols() != 2 * n {
            return Err(Error::NotLagrangian(format!("frame must be n × 2n, got {} × {}", n, rows.ncols())));
        }
        if rows.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotLagrangian("non-finite entries".into()));
        }
        let sv = rows.clone().svd(false, false).singular_values;
        let (hi, lo) = (sv.max(), sv.min());
        if !(lo > STRUCTURE_TOL * hi) {
            return Err(Error::NotLagrangian(format!("rank below {n}")));
        }
        let pairing = &rows * standard_j(n) * rows.transpose();
        if pairing.amax() > STRUCTURE_TOL * hi * hi {
            return Err(Error::NotLagrangian(format!("symplectic pairing {:e}", pairing.amax())));
        }
        Ok(LagrangianFrame { rows })
    }

    /// `ℝⁿ × {0}`.
    pub fn horizontal(n: usize) -> Self {
        let mut rows = DMatrix::zeros(n, 2 * n);
        for i in 0..n {
            rows[(i, i)] = 1.0;
        }
        LagrangianFrame { rows }
    }

    /// `{0} × ℝⁿ`.
    pub fn vertical(n: usize) -> Self {
        let mut rows = DMatrix::zeros(n, 2 * n);
        for i in 0..n {
            rows[(i, n + i)] = 1.0;
        }
        LagrangianFrame { rows }
    }

    pub fn from_unitary(u: &DMatrix<Complex64>) -> Self {
        let n = u.nrows();
        let rows = DMatrix::from_fn(n, 2 * n, |j, c| if c < n { u[(c, j)].re } else { u[(c - n, j)].im });
        LagrangianFrame { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.nrows()
    }

    pub fn rows(&self) -> &DMatrix<f64> {
        &self.rows
    }

    pub fn unitary(&self) -> Result<DMatrix<Complex64>> {
        unitarize(&raw_unitary(&self.rows))
    }

    /// Image under a symplectic matrix.
    pub fn transformed(&self, phi: &DMatrix<f64>) -> Result<Self> {
        LagrangianFrame::new(&self.rows * phi.transpose())
    }
}

fn raw_unitary(rows: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = rows.nrows();
    DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[(j, i)], rows[(j, n + i)]))
}

/// Check `BᵀJ₀B = J₀` to [`STRUCTURE_TOL`] relative to `‖B‖²`.
pub fn check_symplectic(b: &DMatrix<f64>) -> Result<()> {
    let m = b.nrows();
    if m == 0 || !m.is_multiple_of(2) || b.ncols() != m {
        return Err(Error::NotSymplectic(format!("matrix is {} × {}", m, b.ncols())));
    }
    let j = standard_j(m / 2);
    let err = (b.transpose() * &j * b - &j).amax();
    let scale = b.amax().max(1.0);
    if !(err <= STRUCTURE_TOL * scale * scale) {
        return Err(Error::NotSymplectic(format!("|BᵀJ₀B − J₀| = {err:e}")));
    }
    Ok(())
}

/// A continuous path of Lagrangian subspaces on `[0, 1]`.
pub trait LagrangianPath {
    fn dim(&self) -> usize;

    /// A unitary `U(t)` with `L(t) = U(t)ℝⁿ`, continuous in `t`.
    fn unitary(&self, t: f64) -> Result<DMatrix<Complex64>>;

    /// Times at which the path is scanned for crossings.
    fn scan_times(&self) -> Vec<f64> {
        (0..=DEFAULT_SCAN).map(|i| i as f64 / DEFAULT_SCAN as f64).collect()
    }
}

/// A path given by a closure returning any invertible complex matrix; columns are
/// orthonormalized on evaluation.
pub struct FnPath<F> {
    n: usize,
    f: F,
}

impl<F: Fn(f64) -> DMatrix<Complex64>> FnPath<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnPath { n, f }
    }
}

impl<F: Fn(f64) -> DMatrix<Complex64>> LagrangianPath for FnPath<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn unitary(&self, t: f64) -> Result<DMatrix<Complex64>> {
        unitarize(&(self.f)(t))
    }
}

/// Frames at increasing sample times, joined by linear interpolation of unitaries
/// followed by Gram–Schmidt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledRepr", into = "SampledRepr")]
pub struct SampledFramePath {
    times: Vec<f64>,
    frames: Vec<LagrangianFrame>,
    unitaries: Vec<DMatrix<Complex64>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct SampledRepr {
    times: Vec<f64>,
    frames: Vec<LagrangianFrame>,
}

impl TryFrom<SampledRepr> for SampledFramePath {
    type Error = Error;
    fn try_from(r: SampledRepr) -> Result<Self> {
        SampledFramePath::new(r.times, r.frames)
    }
}

impl From<SampledFramePath> for SampledRepr {
    fn from(p: SampledFramePath) -> Self {
        SampledRepr { times: p.times, frames: p.frames }
    }
}

/// Real orthogonal `O` minimising `‖U O − prev‖`.
fn align(prev: &DMatrix<Complex64>, u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let c = (u.adjoint() * prev).map(|z| z.re);
    let svd = c.svd(true, true);
    let o = svd.u.expect("requested") * svd.v_t.expect("requested");
    u * o.map(|x| Complex64::new(x, 0.0))
}

impl SampledFramePath {
    pub fn new(times: Vec<f64>, frames: Vec<LagrangianFrame>) -> Result<Self> {
        if times.len() < 2 || times.len() != frames.len() {
            return Err(Error::NotLagrangian("need at least two samples, one frame per time".into()));
        }
        if times[0] != 0.0 || *times.last().expect("nonempty") != 1.0 || times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::NotLagrangian("sample times must increase from 0 to 1".into()));
        }
        let n = frames[0].dim();
        if frames.iter().any(|f| f.dim() != n) {
            return Err(Error::NotLagrangian("frames of different dimensions".into()));
        }
        let mut unitaries: Vec<DMatrix<Complex64>> = Vec::with_capacity(frames.len());
        for f in &frames {
            let u = f.unitary()?;
            let u = match unitaries.last() {
                Some(prev) => align(prev, &u),
                None => u,
            };
            unitaries.push(u);
        }
        Ok(SampledFramePath { times, frames, unitaries })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[LagrangianFrame] {
        &self.frames
    }
}

impl LagrangianPath for SampledFramePath {
    fn dim(&self) -> usize {
        self.frames[0].dim()
    }

    fn unitary(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let t = t.clamp(0.0, 1.0);
        let i = self.times.partition_point(|&s| s <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let s = (t - t0) / (t1 - t0);
        let u = &self.unitaries[i - 1] * Complex64::new(1.0 - s, 0.0) + &self.unitaries[i] * Complex64::new(s, 0.0);
        unitarize(&u).map_err(|_| Error::NumericFailure {
            message: format!("samples near t = {t} are too far apart to interpolate"),
            residual: s,
        })
    }

    fn scan_times(&self) -> Vec<f64> {
        let sub = (DEFAULT_SCAN / (self.times.len() - 1)).max(8);
        let mut out = Vec::new();
        for w in self.times.windows(2) {
            for k in 0..sub {
                out.push(w[0] + (w[1] - w[0]) * k as f64 / sub as f64);
            }
        }
        out.push(1.0);
        out
    }
}

/// The path traversed backwards.
pub struct Reversed<'a, P: ?Sized>(pub &'a P);

impl<P: LagrangianPath + ?Sized> LagrangianPath for Reversed<'_, P> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn unitary(&self, t: f64) -> Result<DMatrix<Complex64>> {
        self.0.unitary(1.0 - t)
    }
}

/// `t ↦ P(a + (b − a)t)`.
pub struct Restricted<'a, P: ?Sized> {
    pub path: &'a P,
    pub a: f64,
    pub b: f64,
}

impl<P: LagrangianPath + ?Sized> LagrangianPath for Restricted<'_, P> {
    fn dim(&self) -> usize {
        self.path.dim()
    }
    fn unitary(&self, t: f64) -> Result<DMatrix<Complex64>> {
        self.path.unitary(self.a + (self.b - self.a) * t)
    }
}

/// First path on `[0, ½]`, second on `[½, 1]`.  The endpoints must agree as subspaces.
pub struct Concatenated<'a, P: ?Sized, Q: ?Sized>(pub &'a P, pub &'a Q);

impl<P: LagrangianPath + ?Sized, Q: LagrangianPath + ?Sized> LagrangianPath for Concatenated<'_, P, Q> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn unitary(&self, t: f64) -> Result<DMatrix<Complex64>> {
        if t <= 0.5 {
            self.0.unitary(2.0 * t)
        } else {
            let u = self.1.unitary(2.0 * t - 1.0)?;
            Ok(align(&self.0.unitary(1.0)?, &u))
        }
    }
}

/// Image of a path under a constant symplectic matrix.
pub struct Conjugated<'a, P: ?Sized> {
    pub path: &'a P,
    pub phi: DMatrix<f64>,
}

impl<P: LagrangianPath + ?Sized> LagrangianPath for Conjugated<'_, P> {
    fn dim(&self) -> usize {
        self.path.dim()
    }
    fn unitary(&self, t: f64) -> Result<DMatrix<Complex64>> {
        let f = LagrangianFrame::from_unitary(&self.path.unitary(t)?);
        unitarize(&raw_unitary(&(f.rows() * self.phi.transpose())))
    }
}

/// Sampled symplectic matrices on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticPath {
    times: Vec<f64>,
    matrices: Vec<DMatrix<f64>>,
}

impl SymplecticPath {
    pub fn new(times: Vec<f64>, matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        if times.len() != matrices.len() || times.is_empty() {
            return Err(Error::NotSymplectic("one matrix per sample time".into()));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) || times[0] < 0.0 || *times.last().expect("nonempty") > 1.0 {
            return Err(Error::NotSymplectic("sample times must increase within [0, 1]".into()));
        }
        for b in &matrices {
            check_symplectic(b)?;
        }
        Ok(SymplecticPath { times, matrices })
    }

    /// Linearized flat geodesic flow `(q, p) ↦ (q + tp, p)`.
    pub fn shear(n: usize, samples: usize) -> Self {
        let times: Vec<f64> = (0..=samples).map(|i| i as f64 / samples as f64).collect();
        let matrices = times
            .iter()
            .map(|&t| {
                let mut b = DMatrix::identity(2 * n, 2 * n);
                for i in 0..n {
                    b[(i, n + i)] = t;
                }
                b
            })
            .collect();
        SymplecticPath { times, matrices }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    /// `t ↦ B(t) L`, sampled at the path's times.
    pub fn apply(&self, frame: &LagrangianFrame) -> Result<SampledFramePath> {
        let frames = self.matrices.iter().map(|b| frame.transformed(b)).collect::<Result<Vec<_>>>()?;
        SampledFramePath::new(self.times.clone(), frames)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub kernel_dim: usize,
    pub signature: i64,
    pub endpoint: bool,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsIndex {
    pub index: HalfInteger,
    pub crossings: Vec<Crossing>,
    /// Rotation angle applied to the reference when some crossing was degenerate.
    pub perturbation: Option<f64>,
}

struct Adapted<'a, P: ?Sized> {
    path: &'a P,
    reference_adj: DMatrix<Complex64>,
}

impl<P: LagrangianPath + ?Sized> Adapted<'_, P> {
    /// Real and imaginary parts of `U_V^* U(t)`; crossings are where the imaginary part is
    /// singular.
    fn parts(&self, t: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let m = &self.reference_adj * self.path.unitary(t)?;
        Ok((m.map(|z| z.re), m.map(|z| z.im)))
    }

    fn sigma_min(&self, t: f64) -> Result<f64> {
        Ok(self.parts(t)?.1.svd(false, false).singular_values.min())
    }

    fn det(&self, t: f64) -> Result<f64> {
        Ok(self.parts(t)?.1.determinant())
    }

    fn im_derivative(&self, t: f64) -> Result<DMatrix<f64>> {
        let h = DIFF_STEP;
        let f = |s: f64| self.parts(s).map(|p| p.1);
        if t - h < 0.0 {
            Ok((f(t)? * -3.0 + f(t + h)? * 4.0 - f(t + 2.0 * h)?) / (2.0 * h))
        } else if t + h > 1.0 {
            Ok((f(t)? * 3.0 - f(t - h)? * 4.0 + f(t - 2.0 * h)?) / (2.0 * h))
        } else {
            Ok((f(t + h)? - f(t - h)?) / (2.0 * h))
        }
    }

    /// Signature of `u ↦ ω(Zu, Żu) = uᵀ Re(M)ᵀ Im(M)′ u` on `ker Im(M)`.
    fn crossing(&self, t: f64, endpoint: bool) -> Result<Crossing> {
        let (a, b) = self.parts(t)?;
        let n = b.nrows();
        let svd = b.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let kernel: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] < KERNEL_TOL).collect();
        if kernel.is_empty() {
            return Ok(Crossing { t, kernel_dim: 0, signature: 0, endpoint, degenerate: false });
        }
        let k = DMatrix::from_fn(n, kernel.len(), |r, c| vt[(kernel[c], r)]);
        let form = a.transpose() * self.im_derivative(t)?;
        let form = (&form + form.transpose()) * 0.5;
        let restricted = k.transpose() * form * &k;
        let eig = restricted.symmetric_eigen().eigenvalues;
        let degenerate = eig.iter().any(|l| l.abs() < FORM_TOL);
        let signature = eig.iter().filter(|&&l| l >= FORM_TOL).count() as i64
            - eig.iter().filter(|&&l| l <= -FORM_TOL).count() as i64;
        Ok(Crossing { t, kernel_dim: kernel.len(), signature, endpoint, degenerate })
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let sign_lo = self.det(lo)?.signum();
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.det(mid)?.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    fn golden_min(&self, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = hi - g * (hi - lo);
        let mut x2 = lo + g * (hi - lo);
        let (mut f1, mut f2) = (self.sigma_min(x1)?, self.sigma_min(x2)?);
        for _ in 0..80 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = self.sigma_min(x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = self.sigma_min(x2)?;
            }
        }
        let t = 0.5 * (lo + hi);
        Ok((t, self.sigma_min(t)?))
    }

    fn crossings(&self) -> Result<Vec<Crossing>> {
        let times = self.path.scan_times();
        let mut dets = Vec::with_capacity(times.len());
        let mut sigmas = Vec::with_capacity(times.len());
        for &t in &times {
            let b = self.parts(t)?.1;
            dets.push(b.determinant());
            sigmas.push(b.svd(false, false).singular_values.min());
        }
        let start = sigmas[0] < ENDPOINT_TOL;
        let end = *sigmas.last().expect("nonempty") < ENDPOINT_TOL;
        let mut roots: Vec<f64> = Vec::new();
        let near_end = |t: f64| (start && t < 1e-7) || (end && t > 1.0 - 1e-7);
        let last = times.len() - 1;
        let mut changed = vec![false; last];
        for i in 0..last {
            if sigmas[i] < TANGENT_TOL && sigmas[i + 1] < TANGENT_TOL {
                let kernel_dim = self.parts(times[i])?.1.svd(false, false).singular_values.iter().filter(|s| **s < KERNEL_TOL).count();
                return Ok(vec![Crossing { t: times[i], kernel_dim, signature: 0, endpoint: false, degenerate: true }]);
            }
            if dets[i] != 0.0 && dets[i + 1] != 0.0 && dets[i].signum() != dets[i + 1].signum() {
                changed[i] = true;
                let r = self.bisect(times[i], times[i + 1])?;
                // a change of representative with det −1 also flips the sign
                if !near_end(r) && self.sigma_min(r)? < KERNEL_TOL {
                    roots.push(r);
                }
            }
        }
        for i in 1..last {
            let (l, m, r) = (sigmas[i - 1], sigmas[i], sigmas[i + 1]);
            let is_min = m <= l && m <= r && m < 1e-3;
            // vertex of the parabola through the three samples, for equally spaced times
            let curvature = l - 2.0 * m + r;
            let vertex = if curvature > 0.0 { m - (r - l).powi(2) / (8.0 * curvature) } else { m };
            let dip = vertex < TANGENT_TOL || m < 0.5 * l.max(r);
            if is_min && dip && !changed[i - 1] && !changed[i] {
                let (t, s) = self.golden_min(times[i - 1], times[i + 1])?;
                if s < TANGENT_TOL && !near_end(t) && roots.iter().all(|r| (r - t).abs() > 1e-6) {
                    roots.push(t);
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        let mut out = Vec::new();
        if start {
            out.push(self.crossing(0.0, true)?);
        }
        for r in roots {
            out.push(self.crossing(r, false)?);
        }
        if end {
            out.push(self.crossing(1.0, true)?);
        }
        Ok(out)
    }
}

fn index_of(crossings: &[Crossing]) -> HalfInteger {
    HalfInteger(crossings.iter().map(|c| if c.endpoint { c.signature } else { 2 * c.signature }).sum())
}

fn crossings_against<P: LagrangianPath + ?Sized>(
    path: &P,
    reference: &DMatrix<Complex64>,
    angle: f64,
) -> Result<Vec<Crossing>> {
    let rotated = reference * Complex64::from_polar(1.0, angle);
    Adapted { path, reference_adj: rotated.adjoint() }.crossings()
}

/// Robbin–Salamon index of `path` relative to `reference`, endpoints weighted ½.
///
/// When a crossing form is degenerate, the reference is rotated by `e^{εJ₀}` with
/// `ε = PERTURBATION` and the result is accepted only if `ε/2` gives the same value.
pub fn rs_index<P: LagrangianPath + ?Sized>(path: &P, reference: &LagrangianFrame) -> Result<RsIndex> {
    if path.dim() != reference.dim() {
        return Err(Error::NotLagrangian(format!("path in dimension {}, reference in {}", path.dim(), reference.dim())));
    }
    let v = reference.unitary()?;
    let crossings = crossings_against(path, &v, 0.0)?;
    let Some(bad) = crossings.iter().find(|c| c.degenerate) else {
        return Ok(RsIndex { index: index_of(&crossings), crossings, perturbation: None });
    };
    let t_bad = bad.t;
    let perturbed = crossings_against(path, &v, PERTURBATION)?;
    let half = crossings_against(path, &v, 0.5 * PERTURBATION)?;
    if let Some(c) = perturbed.iter().chain(&half).find(|c| c.degenerate) {
        return Err(Error::DegenerateCrossing { t: c.t, message: "degenerate after perturbing the reference".into() });
    }
    let (a, b) = (index_of(&perturbed), index_of(&half));
    if a != b {
        return Err(Error::DegenerateCrossing {
            t: t_bad,
            message: format!("index {a} at ε but {b} at ε/2"),
        });
    }
    Ok(RsIndex { index: a, crossings: perturbed, perturbation: Some(PERTURBATION) })
}

/// Grading of a cord in the flat conormal model of `T² × {0} ⊂ T³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordIndex {
    pub index: HalfInteger,
    pub morse_bott_degenerate: bool,
    pub perturbation: Option<f64>,
    pub crossings: Vec<Crossing>,
}

/// Tangent space of the conormal `ν*(T² × {0})`: `span(∂q₁, ∂q₂, ∂p₃)`.
pub fn conormal_frame() -> LagrangianFrame {
    let mut rows = DMatrix::zeros(3, 6);
    rows[(0, 0)] = 1.0;
    rows[(1, 1)] = 1.0;
    rows[(2, 5)] = 1.0;
    LagrangianFrame { rows }
}

/// Index of `B_Φ(t)Λ` against `ΦΛ`, with `B_Φ = Φ ∘ shear(t) ∘ Φ⁻¹`, `Λ` the conormal
/// frame and `Φ` a constant symplectic trivialization.
pub fn chord_index(chord: &ChordClass, trivialization: &DMatrix<f64>) -> Result<ChordIndex> {
    check_symplectic(trivialization)?;
    if trivialization.nrows() != 6 {
        return Err(Error::NotSymplectic("trivialization must be 6 × 6".into()));
    }
    match chord.datum {
        ChordDatum::ConstantFamily => {
            return Ok(ChordIndex { index: HalfInteger::ZERO, morse_bott_degenerate: true, perturbation: None, crossings: vec![] })
        }
        ChordDatum::Wrap { .. } => {}
        ChordDatum::Lattice { .. } => {
            return Err(Error::InvalidModel("cord grading needs the conormal cord model".into()));
        }
    }
    let lambda = conormal_frame();
    let path = SymplecticPath::shear(3, 64).apply(&lambda)?;
    let phi_path = Conjugated { path: &path, phi: trivialization.clone() };
    let reference = lambda.transformed(trivialization)?;
    let r = rs_index(&phi_path, &reference)?;
    Ok(ChordIndex {
        index: r.index,
        morse_bott_degenerate: r.perturbation.is_some(),
        perturbation: r.perturbation,
        crossings: r.crossings,
    })
}
