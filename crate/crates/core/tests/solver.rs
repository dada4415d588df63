mod common;

use std::f64::consts::TAU;

use common::*;
use linkorbit::hamiltonians::{cutoff, example_anisotropic, zero_model};
use linkorbit::index::{index_pair_galerkin, GalerkinOptions};
use linkorbit::loopspace::ScalingProfile;
use linkorbit::solver::{
    find_saddle, linking_seed_set, shift_distance, solve_period, standard_e, ActionFunctional, LinearizedPath,
    LinkingGeometry, ScanEntry, Shifts, SolverOptions,
};
use linkorbit::symplectic::{MatrixPath, Periodized};

fn small_opts() -> SolverOptions {
    SolverOptions {
        m: 16,
        ..SolverOptions::default()
    }
}

fn example_entry() -> (linkorbit::hamiltonians::HamiltonianModel, ScanEntry) {
    let model = example_anisotropic(1, &[1.0], &[1.0]).unwrap();
    let entry = solve_period(&model, TAU, 1, &small_opts()).unwrap();
    (model, entry)
}

#[test]
fn zero_hamiltonian_has_no_linking_solution() {
    let model = zero_model(1, TAU).unwrap();
    let f = ActionFunctional::new(&model, 8, TAU).unwrap();
    let profile = ScalingProfile::minimal(vec![1.0], vec![1.0]).unwrap();
    let g = LinkingGeometry::new(0.5, 3.0, standard_e(1, 8, TAU), profile).unwrap();
    let seeds: Vec<_> = linking_seed_set(&g, 8, 8, 1).into_iter().map(|s| s.z).collect();
    let opts = SolverOptions { m: 8, ..SolverOptions::default() };
    let search = find_saddle(&f, &g, &seeds, &[], &opts).unwrap();
    assert!(search.results.is_empty(), "{:?}", search.results);
    assert_eq!(search.failures.len(), seeds.len());
}

#[test]
fn example_orbit_at_small_truncation() {
    let (_, entry) = example_entry();
    let r = entry.results().first().expect("an accepted orbit");
    assert!(r.residual <= 1e-9);
    assert!(r.window_ok && r.morse_window_ok && r.morse_maslov_consistent);
    assert_eq!(r.maslov.map(|p| (p.i, p.nu)), Some((2, 1)));
    assert_eq!(r.monodromy_nullity, Some(1));
    assert!(r.reintegration_error.unwrap() < 1e-4);
    assert!(r.sup_norm <= entry.cutoff_k.unwrap());
    // Every other seed either duplicates it or fails.
    assert_eq!(entry.results().len() + entry.search.failures.len(), small_opts().seeds);
}

#[test]
fn deflation_excludes_a_known_orbit() {
    let (model, entry) = example_entry();
    let z = entry.results()[0].z.clone();
    let consts = entry.constants.clone().unwrap();
    let hk = cutoff(&model, entry.cutoff_k.unwrap(), entry.lambda0.unwrap(), consts.a1).unwrap();
    let f = ActionFunctional::new(&hk, 16, TAU).unwrap();
    let g = entry.geometry.clone().unwrap();
    // Seeds placed on the orbit itself.
    let seeds = vec![z.clone(), z.shifted(1.0)];
    let opts = small_opts();
    let plain = find_saddle(&f, &g, &seeds, &[], &opts).unwrap();
    assert!(!plain.results.is_empty());
    let deflated = find_saddle(&f, &g, &seeds, &[z.clone()], &opts).unwrap();
    for r in &deflated.results {
        let (d, _) = shift_distance(&r.z, &z, Shifts::None);
        assert!(d > 1e-4, "deflated root returned again");
    }
}

#[test]
fn index_is_invariant_under_phase_shift() {
    let (model, entry) = example_entry();
    let z = &entry.results()[0].z;
    let lin = LinearizedPath::new(&model, z, 256).unwrap();
    let opts = GalerkinOptions::doubling(16, 64);
    let (base, _) = index_pair_galerkin(&lin, &opts).unwrap();
    for s in [0.7, 2.0, 4.5] {
        let (p, _) = index_pair_galerkin(&lin.shifted(s), &opts).unwrap();
        assert!(p.same_index(&base), "shift {s}: {p:?} vs {base:?}");
    }
    // A 3τ-periodic view of a τ-periodic path, shifted by jτ.
    let mut r = rng(11);
    let path = random_smooth_path(&mut r, 1, TAU, 1.2).sample(512).unwrap();
    let per = Periodized::new(&path, 3);
    let (p0, _) = index_pair_galerkin(&per, &GalerkinOptions::default()).unwrap();
    for j in 1..3 {
        let shifted: MatrixPath = path.shifted(j as f64 * TAU).unwrap();
        let (pj, _) = index_pair_galerkin(&Periodized::new(&shifted, 3), &GalerkinOptions::default()).unwrap();
        assert!(pj.same_index(&p0));
    }
}

#[test]
fn seeds_are_reproducible() {
    let (_, a) = example_entry();
    let (_, b) = example_entry();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}
