//! Reproducible verification runs across all modules, with JSON reports.

use crate::ainfty_core::{
    compose_functors, fixtures, verify_ainfty, verify_functor, verify_homotopy, AInftyCategory, CategorySpec,
    ResidualReport,
};
use crate::chord_spectra::{
    action_gap, enumerate_cords_t3, enumerate_loops_t2, flat_kinetic, hamiltonian_vector_field, lipschitz_constant,
    product_cylinder_xh, quadratic_rescale_check, Chart, FlatTorusLattice, ProductCylinder,
};
use crate::error::{Error, Result};
use crate::maslov_grading::{rs_index, FnPath, HalfInteger, LagrangianFrame, Reversed};
use crate::moduli_trees::{
    boundary_facets_l, boundary_facets_n, enumerate_strata, enumerate_trees, functor_relation_terms,
    homotopy_relation_terms, Space,
};
use crate::sign_engine::{verify_identity, Identity, IdentityOutcome};
use crate::slit_domains::{build_slit_map, invert_slit_params, verify_beta_conditions, Weights};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;
/// Environment variable naming the default suite configuration file.
pub const CONFIG_ENV: &str = "WORKBENCH_CONFIG";
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    Beta,
    RoundTrip,
    Trees,
    Facets,
    Signs,
    Ainfty,
    Chords,
    Xh,
    Grading,
}

impl CheckName {
    pub const ALL: [CheckName; 9] = [
        CheckName::Beta,
        CheckName::RoundTrip,
        CheckName::Trees,
        CheckName::Facets,
        CheckName::Signs,
        CheckName::Ainfty,
        CheckName::Chords,
        CheckName::Xh,
        CheckName::Grading,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Beta => "beta",
            CheckName::RoundTrip => "round-trip",
            CheckName::Trees => "trees",
            CheckName::Facets => "facets",
            CheckName::Signs => "signs",
            CheckName::Ainfty => "ainfty",
            CheckName::Chords => "chords",
            CheckName::Xh => "xh",
            CheckName::Grading => "grading",
        }
    }
}

impl FromStr for CheckName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub beta: f64,
    pub end_pullback: f64,
    pub round_trip: f64,
    pub exact: f64,
    pub xh: f64,
    pub rescale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { beta: 1e-9, end_pullback: 1e-6, round_trip: 1e-8, exact: 1e-12, xh: 1e-10, rescale: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ranges {
    pub beta_instances: usize,
    pub beta_grid: usize,
    pub round_trip_instances: usize,
    pub tree_k_max: usize,
    pub facet_k_max: usize,
    pub sign_d_max: usize,
    pub sign_degree_max: i64,
    pub random_functors: usize,
    pub xh_points: usize,
    pub rescale_weights: usize,
    pub maslov_paths: usize,
}

impl Default for Ranges {
    fn default() -> Self {
        Ranges {
            beta_instances: 20,
            beta_grid: 200,
            round_trip_instances: 50,
            tree_k_max: 6,
            facet_k_max: 4,
            sign_d_max: 5,
            sign_degree_max: 3,
            random_functors: 20,
            xh_points: 100,
            rescale_weights: 10,
            maslov_paths: 50,
        }
    }
}

/// Suite configuration, read from JSON; every field is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub checks: Vec<CheckName>,
    pub seed: u64,
    pub k_max: usize,
    pub tolerances: Tolerances,
    pub ranges: Ranges,
    /// Category checked by `ainfty` in place of the built-in fixtures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub category: Option<CategorySpec>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            checks: CheckName::ALL.to_vec(),
            seed: DEFAULT_SEED,
            k_max: 3,
            tolerances: Tolerances::default(),
            ranges: Ranges::default(),
            category: None,
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("suite config: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: CheckName,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub seed: u64,
    pub config: SuiteConfig,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
    pub elapsed_ms: f64,
}

impl RunReport {
    /// The report with timing fields zeroed, for byte comparison.
    pub fn without_timing(&self) -> RunReport {
        let mut r = self.clone();
        r.elapsed_ms = 0.0;
        for c in &mut r.checks {
            c.elapsed_ms = 0.0;
        }
        r
    }
}

struct Outcome {
    pass: bool,
    residual: Option<f64>,
    details: Value,
    counterexample: Option<Value>,
}

impl Outcome {
    fn new(pass: bool, residual: Option<f64>, details: Value) -> Self {
        Outcome { pass, residual, details, counterexample: None }
    }
}

fn rng_for(seed: u64, check: CheckName) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(check as u64);
    rng
}

/// Run the selected checks, one thread each, and assemble the report in selection order.
pub fn run_suite(config: &SuiteConfig, command: Vec<String>) -> RunReport {
    let start = Instant::now();
    let mut selected = config.checks.clone();
    selected.dedup();
    let checks: Vec<CheckReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&name| {
                scope.spawn(move || {
                    let t0 = Instant::now();
                    let outcome = run_check(name, config);
                    let elapsed_ms = t0.elapsed().as_secs_f64() * 1e3;
                    match outcome {
                        Ok(o) => CheckReport {
                            name,
                            status: if o.pass { Status::Pass } else { Status::Fail },
                            residual: o.residual,
                            details: o.details,
                            counterexample: o.counterexample,
                            elapsed_ms,
                        },
                        Err(e) => CheckReport {
                            name,
                            status: Status::Error,
                            residual: None,
                            details: json!({ "error": e.to_string() }),
                            counterexample: None,
                            elapsed_ms,
                        },
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    let pass = checks.iter().all(|c| c.status == Status::Pass);
    RunReport {
        schema_version: SCHEMA_VERSION,
        command,
        seed: config.seed,
        config: config.clone(),
        checks,
        pass,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn run_check(name: CheckName, cfg: &SuiteConfig) -> Result<Outcome> {
    let mut rng = rng_for(cfg.seed, name);
    match name {
        CheckName::Beta => check_beta(cfg, &mut rng),
        CheckName::RoundTrip => check_round_trip(cfg, &mut rng),
        CheckName::Trees => check_trees(cfg),
        CheckName::Facets => check_facets(cfg),
        CheckName::Signs => check_signs(cfg),
        CheckName::Ainfty => check_ainfty(cfg, &mut rng),
        CheckName::Chords => check_chords(cfg, &mut rng),
        CheckName::Xh => check_xh(cfg, &mut rng),
        CheckName::Grading => check_grading(cfg, &mut rng),
    }
}

/// Random weights in `[0.3, 2]` and increasing punctures from 0 with gaps in `[0.4, 2]`.
pub fn random_slit_instance<R: Rng>(rng: &mut R) -> Result<(Weights, Vec<f64>)> {
    let k = rng.random_range(2..=3usize);
    let weights = Weights::new((0..k).map(|_| rng.random_range(0.3..2.0)).collect())?;
    let mut punctures = vec![0.0];
    for _ in 1..k {
        let last = *punctures.last().expect("nonempty");
        punctures.push(last + rng.random_range(0.4..2.0));
    }
    Ok((weights, punctures))
}

fn check_beta(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let tol = &cfg.tolerances;
    let base = build_slit_map(&Weights::new(vec![1.0, 1.0])?, &[0.0, 1.0])?;
    let tip_err = (base.slit_params()[0] + 2.0 * 2f64.ln() / PI).abs();
    let critical_exact = base.critical_points() == [0.5];
    let mut worst: f64 = 0.0;
    let mut worst_end: f64 = 0.0;
    let mut failing = Vec::new();
    for i in 0..cfg.ranges.beta_instances {
        let (w, a) = random_slit_instance(rng)?;
        let spec = build_slit_map(&w, &a)?;
        let rep = verify_beta_conditions(&spec, cfg.ranges.beta_grid, tol.beta);
        let r = rep.max_d_beta.max(rep.max_d_beta_j).max(rep.max_boundary_tangential);
        let e = rep.end_deviations.iter().map(|d| d.deviation).fold(0.0, f64::max);
        worst = worst.max(r);
        worst_end = worst_end.max(e);
        if r >= tol.beta || e >= tol.end_pullback {
            failing.push(json!({ "instance": i, "weights": w, "punctures": a, "residual": r, "end": e }));
        }
    }
    let pass = critical_exact && tip_err < tol.exact && failing.is_empty();
    let mut o = Outcome::new(
        pass,
        Some(worst),
        json!({
            "critical_point_exact": critical_exact,
            "slit_tip_error": tip_err,
            "instances": cfg.ranges.beta_instances,
            "grid": cfg.ranges.beta_grid,
            "max_end_deviation": worst_end,
        }),
    );
    if !failing.is_empty() {
        o.counterexample = Some(Value::Array(failing));
    }
    Ok(o)
}

fn check_round_trip(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    for i in 0..cfg.ranges.round_trip_instances {
        let (w, a) = random_slit_instance(rng)?;
        let spec = build_slit_map(&w, &a)?;
        let back = invert_slit_params(&w, spec.slit_params())?;
        let err = back.punctures().iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        worst = worst.max(err);
        if err >= cfg.tolerances.round_trip {
            failing.push(json!({ "instance": i, "weights": w, "punctures": a, "recovered": back.punctures() }));
        }
    }
    let mut o = Outcome::new(failing.is_empty(), Some(worst), json!({ "instances": cfg.ranges.round_trip_instances }));
    if !failing.is_empty() {
        o.counterexample = Some(Value::Array(failing));
    }
    Ok(o)
}

/// Planar rooted trees with `k` leaves and every vertex at least trivalent.
fn schroeder(k: usize) -> u64 {
    // t(n) = Σ over ordered tuples of ≥ 2 subtrees with leaf counts summing to n
    let mut t = vec![0u64; k + 1];
    let mut forests = vec![vec![0u64; k + 1]; k + 1];
    t[1] = 1;
    for n in 1..=k {
        for j in 2..=n {
            forests[j][n] = (1..n).map(|m| forests[j - 1][n - m] * t[m]).sum();
        }
        if n > 1 {
            t[n] = (2..=n).map(|j| forests[j][n]).sum();
        }
        forests[1][n] = t[n];
    }
    t[k]
}

fn check_trees(cfg: &SuiteConfig) -> Result<Outcome> {
    let mut details = BTreeMap::new();
    let mut pass = true;
    for k in 2..=cfg.ranges.tree_k_max {
        let count = enumerate_trees(k)?.len() as u64;
        let expected = schroeder(k);
        let strata = enumerate_strata(Space::N, k)?;
        let top = strata.iter().map(|s| s.dimension).max().unwrap_or(i64::MIN);
        let formula_ok = strata.iter().all(|s| s.dimension == s.formula_dimension());
        let l_ok = enumerate_strata(Space::L, k)?.iter().all(|s| s.dimension == s.formula_dimension());
        let ok = count == expected && top == k as i64 - 1 && formula_ok && l_ok;
        pass &= ok;
        details.insert(
            k.to_string(),
            json!({ "trees": count, "expected": expected, "n_strata": strata.len(), "top_dimension": top, "ok": ok }),
        );
    }
    Ok(Outcome::new(pass, None, json!(details)))
}

fn check_facets(cfg: &SuiteConfig) -> Result<Outcome> {
    let mut pass = true;
    let mut details = BTreeMap::new();
    let mut counterexample = None;
    for k in 2..=cfg.ranges.facet_k_max {
        let n = boundary_facets_n(k)?;
        let l = boundary_facets_l(k)?;
        let mut nt: Vec<_> = n.iter().map(|f| f.term.clone()).collect();
        let mut lt: Vec<_> = l.iter().map(|f| f.term.clone()).collect();
        let (mut ne, mut le) = (functor_relation_terms(k)?, homotopy_relation_terms(k)?);
        for v in [&mut nt, &mut lt, &mut ne, &mut le] {
            v.sort();
        }
        let codim_ok = n.iter().chain(&l).all(|f| f.codimension() == 1);
        let ok = nt == ne && lt == le && codim_ok;
        if !ok && counterexample.is_none() {
            counterexample = Some(json!({ "k": k, "n_facets": nt, "n_terms": ne, "l_facets": lt, "l_terms": le }));
        }
        pass &= ok;
        details.insert(k.to_string(), json!({ "n_facets": n.len(), "l_facets": l.len(), "ok": ok }));
    }
    let mut o = Outcome::new(pass, None, json!(details));
    o.counterexample = counterexample;
    Ok(o)
}

fn check_signs(cfg: &SuiteConfig) -> Result<Outcome> {
    let degrees: Vec<i64> = (0..=cfg.ranges.sign_degree_max).collect();
    let d = cfg.ranges.sign_d_max;
    let m = verify_identity(Identity::MComposition, &degrees, d);
    let f = verify_identity(Identity::FComposition, &degrees, d);
    let fp = verify_identity(Identity::FprimeComposition, &degrees, d);
    let describe = |o: &IdentityOutcome| serde_json::to_value(o).unwrap_or(Value::Null);
    // the f and f′ identities are reported, the m identity must hold
    let mut o = Outcome::new(
        m.passed(),
        None,
        json!({ "m": describe(&m), "f": describe(&f), "fprime": describe(&fp), "d_max": d }),
    );
    if let IdentityOutcome::Counterexample(c) = &m {
        o.counterexample = serde_json::to_value(c).ok();
    }
    Ok(o)
}

fn residual_json(r: &ResidualReport) -> Value {
    json!({ "relation": r.relation, "tuples": r.tuples_checked, "failures": r.failures.len(), "max_abs": r.max_abs() })
}

fn check_ainfty(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let k = cfg.k_max;
    if let Some(spec) = &cfg.category {
        let cat = AInftyCategory::from_spec(spec)?;
        let r = verify_ainfty(&cat, k)?;
        let mut o = Outcome::new(r.pass, Some(r.max_abs() as f64), residual_json(&r));
        if !r.pass {
            o.counterexample = serde_json::to_value(&r.failures).ok();
        }
        return Ok(o);
    }
    let dga = fixtures::interval_dga();
    let a = verify_ainfty(&dga, k)?;
    let id = crate::ainfty_core::AInftyFunctor::identity(&dga);
    let fi = verify_functor(&id, &dga, &dga, k)?;
    let (cat, f, g, h) = fixtures::chain_homotopy_fixture();
    let hr = verify_homotopy(&h, &f, &g, &cat, &cat, k)?;
    let mut composite_ok = true;
    let mut composite_failures = Vec::new();
    for i in 0..cfg.ranges.random_functors {
        let s1: u64 = rng.random();
        let s2: u64 = rng.random();
        let f1 = fixtures::random_derived_functor(&dga, k, s1)?;
        let f2 = fixtures::random_derived_functor(&dga, k, s2)?;
        if !(verify_functor(&f1, &dga, &dga, k)?.pass && verify_functor(&f2, &dga, &dga, k)?.pass) {
            composite_failures.push(json!({ "instance": i, "seeds": [s1, s2], "stage": "factor" }));
            composite_ok = false;
            continue;
        }
        let c = compose_functors(&f2, &f1, &dga, &dga, &dga, k)?;
        let r = verify_functor(&c, &dga, &dga, k)?;
        if !r.pass {
            composite_ok = false;
            composite_failures.push(json!({ "instance": i, "seeds": [s1, s2], "failures": r.failures }));
        }
    }
    let pass = a.pass && fi.pass && hr.pass && composite_ok;
    let worst = a.max_abs().max(fi.max_abs()).max(hr.max_abs());
    let mut o = Outcome::new(
        pass,
        Some(worst as f64),
        json!({
            "dga": residual_json(&a),
            "identity_functor": residual_json(&fi),
            "chain_homotopy": residual_json(&hr),
            "random_composites": cfg.ranges.random_functors,
        }),
    );
    if !composite_failures.is_empty() {
        o.counterexample = Some(Value::Array(composite_failures));
    }
    Ok(o)
}

fn check_chords(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let tol = &cfg.tolerances;
    let t3 = enumerate_cords_t3(1.0, -8.0)?;
    let mut actions: Vec<f64> = t3.nonconstant().map(|c| c.action).collect();
    actions.sort_by(f64::total_cmp);
    let t3_ok = actions == [-8.0, -8.0, -4.5, -4.5, -2.0, -2.0, -0.5, -0.5];
    let gap = action_gap(&t3)?;
    let below_gap = t3.nonconstant().all(|c| c.action <= -gap);
    let t2 = enumerate_loops_t2(&FlatTorusLattice::identity(2)?, -2.0)?;
    let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let mut lip_err: f64 = 0.0;
    for c in [0.25, 2.0, 7.5] {
        lip_err = lip_err.max((lipschitz_constant(&g, &(&g * c))? - c.max(1.0 / c)).abs() / c.max(1.0 / c));
    }
    let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..20)
        .map(|_| {
            let q = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
            let p = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            (q, p)
        })
        .collect();
    let mut rescale: f64 = 0.0;
    for _ in 0..cfg.ranges.rescale_weights {
        let w = rng.random_range(0.1..10.0);
        rescale = rescale.max(quadratic_rescale_check(w, &samples, flat_kinetic, &t3)?.residual);
    }
    let pass = t3_ok
        && gap == 0.5
        && below_gap
        && t2.classes.len() == 12
        && lip_err <= tol.exact
        && rescale < tol.rescale;
    Ok(Outcome::new(
        pass,
        Some(rescale),
        json!({
            "t3_actions": actions,
            "gap": gap,
            "t2_classes": t2.classes.len(),
            "lipschitz_relative_error": lip_err,
            "rescale_residual": rescale,
        }),
    ))
}

fn check_xh(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for chart in [Chart::A, Chart::R] {
        for _ in 0..cfg.ranges.xh_points {
            let q0 = match chart {
                Chart::A => rng.random_range(-3.0..3.0),
                Chart::R => rng.random_range(0.05..3.0),
            };
            let mut pt = [q0, 0.0, 0.0, 0.0, 0.0, 0.0];
            for x in pt.iter_mut().skip(1).take(2) {
                *x = rng.random_range(0.0..2.0 * PI);
            }
            for x in pt.iter_mut().skip(3) {
                *x = rng.random_range(-2.0..2.0);
            }
            let num = hamiltonian_vector_field(&ProductCylinder, chart, pt)?;
            let exact = product_cylinder_xh(chart, pt)?;
            let err = num.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(err);
        }
    }
    Ok(Outcome::new(worst < cfg.tolerances.xh, Some(worst), json!({ "points_per_chart": cfg.ranges.xh_points })))
}

fn random_symmetric<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale));
    (&a + a.transpose()) * 0.5
}

/// `t ↦ exp(i(S₀ + tS₁ + t²S₂))ℝⁿ` for random real symmetric `Sᵢ`, evaluated by
/// diagonalising the Hermitian exponent.
pub fn random_smooth_path<R: Rng>(rng: &mut R, n: usize) -> impl Fn(f64) -> DMatrix<Complex64> {
    let s: Vec<DMatrix<f64>> = (0..3).map(|i| random_symmetric(rng, n, if i == 0 { 1.5 } else { 3.0 })).collect();
    move |t: f64| {
        let m = &s[0] + &s[1] * t + &s[2] * (t * t);
        let eig = m.symmetric_eigen();
        let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l)));
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        &v * phases * v.transpose()
    }
}

fn check_grading(cfg: &SuiteConfig, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let horizontal = LagrangianFrame::horizontal(1);
    let constant = FnPath::new(2, |_| DMatrix::identity(2, 2));
    let c = rs_index(&constant, &LagrangianFrame::horizontal(2))?.index;
    let half_turn = FnPath::new(1, |t| DMatrix::from_element(1, 1, Complex64::from_polar(1.0, PI * t)));
    let h = rs_index(&half_turn, &horizontal)?.index;
    let mut failures = Vec::new();
    for i in 0..cfg.ranges.maslov_paths {
        let n = rng.random_range(1..=3usize);
        let f = random_smooth_path(rng, n);
        let reference = LagrangianFrame::from_unitary(&random_smooth_path(rng, n)(0.0));
        let split: f64 = rng.random_range(0.2..0.8);
        let whole = FnPath::new(n, &f);
        let first = FnPath::new(n, |t| f(split * t));
        let second = FnPath::new(n, |t| f(split + (1.0 - split) * t));
        let total = rs_index(&whole, &reference)?.index;
        let parts = rs_index(&first, &reference)?.index + rs_index(&second, &reference)?.index;
        let back = rs_index(&Reversed(&whole), &reference)?.index;
        if total != parts || back != -total {
            failures.push(json!({ "path": i, "total": total, "parts": parts, "reversed": back }));
        }
    }
    let pass = c == HalfInteger::ZERO && h == HalfInteger::from_int(1) && failures.is_empty();
    let mut o = Outcome::new(
        pass,
        None,
        json!({ "constant": c, "half_turn": h, "random_paths": cfg.ranges.maslov_paths }),
    );
    if !failures.is_empty() {
        o.counterexample = Some(Value::Array(failures));
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schroeder_numbers() {
        assert_eq!((1..=6).map(schroeder).collect::<Vec<_>>(), vec![1, 1, 3, 11, 45, 197]);
    }

    #[test]
    fn signs_only_config() {
        let cfg = SuiteConfig::from_json(r#"{"checks": ["signs"], "ranges": {"sign_d_max": 3}}"#).unwrap();
        let r = run_suite(&cfg, vec![]);
        assert_eq!(r.checks.len(), 1);
        assert_eq!(r.checks[0].name, CheckName::Signs);
        assert!(r.pass);
    }

    #[test]
    fn malformed_config() {
        assert!(matches!(SuiteConfig::from_json(r#"{"checks": ["nope"]}"#), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::from_json(r#"{"colour": 1}"#), Err(Error::Config(_))));
    }

    #[test]
    fn corrupted_fixture_fails_with_payload() {
        let mut spec = fixtures::interval_dga().to_spec();
        let m2 = spec.maps.get_mut(&2).expect("m2 present");
        m2[0].output[0].1 = -m2[0].output[0].1;
        let cfg = SuiteConfig { checks: vec![CheckName::Ainfty], category: Some(spec), ..SuiteConfig::default() };
        let r = run_suite(&cfg, vec![]);
        assert!(!r.pass);
        assert!(r.checks[0].counterexample.is_some());
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SuiteConfig::from_json(r#"{"checks": ["grading", "chords"], "ranges": {"maslov_paths": 3}}"#).unwrap();
        let a = serde_json::to_string(&run_suite(&cfg, vec![]).without_timing()).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg, vec![]).without_timing()).unwrap();
        assert_eq!(a, b);
    }
}
