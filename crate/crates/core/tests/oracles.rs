//! Library results against independently computed values.

use floer_workbench::ainfty_core::build_morse_bott_complex;
use floer_workbench::chord_spectra::{
    enumerate_cords_t3, enumerate_loops_t2, hamiltonian_vector_field, Chart, CylindricalMetricModel,
    FlatTorusLattice,
};
use floer_workbench::maslov_grading::{rs_index, FnPath, HalfInteger, LagrangianFrame, LagrangianPath};
use floer_workbench::slit_domains::{build_slit_map, eval_beta, Weights};
use floer_workbench::workbench::random_smooth_path;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Eigenphases of the Souriau map `W = M Mᵀ`, `M = U_V^* U`, lifted continuously along the
/// path. A crossing is an eigenvalue of `W` at `1`; each lifted phase contributes
/// `h(θ₁) − h(θ₀)` with `h(θ) = (⌊θ/2π⌋ + ⌈θ/2π⌉)/2`.
fn eigenphase_index<P: LagrangianPath>(path: &P, reference: &DMatrix<Complex64>, steps: usize) -> HalfInteger {
    let phases_at = |t: f64| -> Vec<Complex64> {
        let m = reference.adjoint() * path.unitary(t).unwrap();
        let w = &m * m.transpose();
        w.schur().eigenvalues().expect("complex Schur form").iter().copied().collect()
    };
    let mut current = phases_at(0.0);
    let mut lifted: Vec<f64> = current.iter().map(|z| z.arg()).collect();
    let start = lifted.clone();
    for s in 1..=steps {
        let next = phases_at(s as f64 / steps as f64);
        let perm = best_matching(&current, &next);
        let mut new_lift = vec![0.0; lifted.len()];
        for (i, &j) in perm.iter().enumerate() {
            new_lift[j] = lifted[i] + (next[j] / current[i]).arg();
        }
        current = next;
        lifted = new_lift;
    }
    let h = |theta: f64| {
        let x = theta / (2.0 * PI);
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            2 * r as i64
        } else {
            x.floor() as i64 + x.ceil() as i64
        }
    };
    let mut start_sorted = start;
    let twice: i64 = lifted.iter().map(|&t| h(t)).sum::<i64>() - start_sorted.drain(..).map(h).sum::<i64>();
    HalfInteger::from_twice(twice)
}

fn best_matching(a: &[Complex64], b: &[Complex64]) -> Vec<usize> {
    let n = a.len();
    let mut best = (f64::INFINITY, Vec::new());
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let cost: f64 = p.iter().enumerate().map(|(i, &j)| (a[i] - b[j]).norm()).sum();
        if cost < best.0 {
            best = (cost, p.to_vec());
        }
    });
    best.1
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

#[test]
fn rs_index_matches_eigenphase_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut nonzero = 0;
    for i in 0..25 {
        let n = rng.random_range(1..=3usize);
        let f = random_smooth_path(&mut rng, n);
        let v = random_smooth_path(&mut rng, n)(0.0);
        let reference = LagrangianFrame::from_unitary(&v);
        let path = FnPath::new(n, &f);
        let got = rs_index(&path, &reference).unwrap().index;
        let expected = eigenphase_index(&path, &reference.unitary().unwrap(), 4000);
        assert_eq!(got, expected, "path {i} (n = {n})");
        nonzero += (got != HalfInteger::ZERO) as usize;
    }
    assert!(nonzero > 5, "too few paths with crossings: {nonzero}");
}

#[test]
fn eigenphase_count_of_rotations() {
    for (turns, expected) in [(0.5, 1), (1.0, 2), (-1.5, -3)] {
        let path = FnPath::new(1, move |t: f64| DMatrix::from_element(1, 1, Complex64::from_polar(1.0, PI * turns * t)));
        let v = DMatrix::from_element(1, 1, Complex64::from_polar(1.0, 0.3));
        let r = rs_index(&path, &LagrangianFrame::from_unitary(&v)).unwrap().index;
        assert_eq!(r, eigenphase_index(&path, &v, 500));
        let aligned = rs_index(&path, &LagrangianFrame::horizontal(1)).unwrap().index;
        assert_eq!(aligned, HalfInteger::from_twice(expected));
    }
}

/// `r = e^{−a}`, `p_r = −p_a / r`: push the `a`-chart field forward and compare.
#[test]
fn xh_chain_rule_between_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let depth: f64 = rng.random_range(1.0..6.0);
        let window = rng.random_range(0.2..depth.min(2.0));
        let model = CylindricalMetricModel::new(depth, window, rng.random_range(0.5..2.0)).unwrap();
        let a = rng.random_range(-1.0..depth + 1.0);
        let (theta, phi) = (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
        let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let xa = hamiltonian_vector_field(&model, Chart::A, [a, theta, phi, p[0], p[1], p[2]]).unwrap();
        let r = (-a).exp();
        let pr = -p[0] / r;
        let xr = hamiltonian_vector_field(&model, Chart::R, [r, theta, phi, pr, p[1], p[2]]).unwrap();
        let pushed = [-r * xa[0], xa[1], xa[2], -xa[3] / r - p[0] * xa[0] / r, xa[4], xa[5]];
        for i in 0..6 {
            let scale = pushed[i].abs().max(1.0);
            assert!((xr[i] - pushed[i]).abs() < 1e-9 * scale, "component {i} at a = {a}: {xr:?} vs {pushed:?}");
        }
    }
}

/// `β = d Im F` with `F′(ζ) = Σ (wⱼ/π)/(ζ − aⱼ)`.
#[test]
fn beta_matches_closed_form_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..20 {
        let k = rng.random_range(2..=4usize);
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.3..2.0)).collect();
        let mut a = vec![0.0];
        for _ in 1..k {
            a.push(a.last().unwrap() + rng.random_range(0.4..2.0));
        }
        let spec = build_slit_map(&Weights::new(w.clone()).unwrap(), &a).unwrap();
        for _ in 0..20 {
            let z = Complex64::new(rng.random_range(-3.0..8.0), rng.random_range(0.05..3.0));
            let fp: Complex64 = w.iter().zip(&a).map(|(wj, aj)| *wj / PI / (z - aj)).sum();
            let b = eval_beta(&spec, z).unwrap().beta;
            assert!((b[0] - fp.im).abs() < 1e-12 && (b[1] - fp.re).abs() < 1e-12, "{b:?} vs {fp} at {z}");
        }
    }
}

#[test]
fn morse_bott_generators_match_lattice_counts() {
    for (h, cutoff) in [(1.0, -8.0), (0.7, -3.0), (2.0, -1.0)] {
        let s = enumerate_cords_t3(h, cutoff).unwrap();
        let c = build_morse_bott_complex(&s, "T", |_| 0);
        let count = (1..100i64).filter(|k| 0.5 * (k * k) as f64 * h * h <= -cutoff + 1e-12).count() * 2;
        assert_eq!(c.nonconstant_len(), count, "h = {h}, cutoff {cutoff}");
        assert_eq!(c.constant_subcomplex.len(), 4);
    }
    let lattice = FlatTorusLattice::new(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
    for cutoff in [-0.5, -2.0, -6.0] {
        let s = enumerate_loops_t2(&lattice, cutoff).unwrap();
        let c = build_morse_bott_complex(&s, "T", |_| 0);
        let mut count = 0;
        for m in -20i64..=20 {
            for n in -20i64..=20 {
                let e = 0.5 * (2.0 * (m * m) as f64 + (m * n) as f64 + (n * n) as f64);
                count += ((m, n) != (0, 0) && e <= -cutoff + 1e-12) as usize;
            }
        }
        assert_eq!(c.nonconstant_len(), count, "cutoff {cutoff}");
        assert_eq!(c.hom.basis.len(), count + 4);
    }
}
