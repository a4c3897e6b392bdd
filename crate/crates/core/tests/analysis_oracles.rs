//! Approximate mode families against modes found by the general search.

use layermodes_core::analysis::{
    asymptotic_modes, cluster_census, near_resonance_modes_slab, two_layer_near_resonance, SecondIndex, WhichLayer,
};
use layermodes_core::modefinder::polish_mode;
use layermodes_core::transfer::wolter_recursion;
use layermodes_core::{find_modes, Complex64, FrequencyScale, Layer, Material, ModeSet, SearchRegion, Stack};

fn lorentz(omega0: f64) -> Material {
    Material::lorentz(0.25, omega0, 1e-3).unwrap()
}

fn slab() -> Stack {
    Stack::slab(Material::constant(1.0), lorentz(1.0), 1.0).unwrap()
}

fn two_layer() -> Stack {
    Stack::normal_incidence(
        Material::constant(1.0),
        vec![Layer::new(lorentz(1.0), 1.0), Layer::new(lorentz(0.6), 1.0)],
        Material::constant(1.0),
    )
    .unwrap()
}

fn near_pole(stack: &Stack, re_min: f64, re_max: f64) -> ModeSet {
    find_modes(stack, &SearchRegion::new(re_min, re_max, -0.01, 0.002).unwrap()).unwrap()
}

fn relative_gap(set: &ModeSet, omega: Complex64) -> f64 {
    (set.nearest(omega).unwrap().omega - omega).norm() / omega.norm()
}

/// Distance to the nearest exact mode over that mode's distance to the pole.
/// Every mode near the pole is within 1% of it in plain relative terms, so
/// this is the sharper measure of agreement.
fn gap_over_pole_distance(set: &ModeSet, omega: Complex64, pole: Complex64) -> f64 {
    let exact = set.nearest(omega).unwrap().omega;
    (exact - omega).norm() / (exact - pole).norm()
}

#[test]
fn near_resonance_family_tracks_exact_modes() {
    let stack = slab();
    let exact = near_pole(&stack, 0.95, 1.005);
    let fam = near_resonance_modes_slab(&lorentz(1.0), 1.0, 10..=30, FrequencyScale::default()).unwrap();
    let mut residuals = Vec::new();
    for f in &fam {
        assert!(relative_gap(&exact, f.omega_approx) <= 1e-2, "m = {}", f.m);
        assert!(gap_over_pole_distance(&exact, f.omega_approx, f.pole) < 5e-3, "m = {}", f.m);
        residuals.push(wolter_recursion(&stack, f.omega_approx).unwrap().residual());
    }
    assert!(residuals.windows(2).all(|w| w[1] < w[0]), "{residuals:?}");
}

#[test]
fn second_layer_family_tracks_exact_modes() {
    let stack = two_layer();
    let exact = near_pole(&stack, 0.55, 0.605);
    let fam = two_layer_near_resonance(&stack, WhichLayer::Second, 10..=30, SecondIndex::Exact).unwrap();
    for f in &fam {
        assert!(relative_gap(&exact, f.omega_approx) <= 1e-2, "m = {}", f.m);
        assert!(gap_over_pole_distance(&exact, f.omega_approx, f.pole) < 5e-3, "m = {}", f.m);
    }
}

#[test]
fn first_layer_family_tracks_exact_modes() {
    let stack = two_layer();
    let exact = near_pole(&stack, 0.95, 1.005);
    for second in [SecondIndex::Exact, SecondIndex::Frozen] {
        let fam = two_layer_near_resonance(&stack, WhichLayer::First, 10..=30, second).unwrap();
        let mut gaps = Vec::new();
        for f in &fam {
            assert!(relative_gap(&exact, f.omega_approx) <= 1e-2, "m = {}, {second:?}", f.m);
            gaps.push(gap_over_pole_distance(&exact, f.omega_approx, f.pole));
        }
        // Layer 2 is treated as nonresonant here, so agreement is looser
        // than for the slab family but still improves with the order.
        assert!(gaps[0] < 0.05 && gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }
}

#[test]
fn large_frequency_modes_match_in_modulus() {
    let stack = slab();
    let a = lorentz(1.0).high_freq_coefficient().unwrap();
    for fam in asymptotic_modes(a, 1.0, &[50, 100], FrequencyScale::default()).unwrap() {
        let size = 0.5;
        let exact = polish_mode(&stack, fam.omega_decaying, size).unwrap();
        let region = SearchRegion::new(exact.omega.re - 1.0, exact.omega.re + 1.0, exact.omega.im - 1.0, exact.omega.im + 1.0).unwrap();
        let local = find_modes(&stack, &region).unwrap();
        assert!(local.contains_near(exact.omega, 1e-9), "polished root is a search root");
        let rel = (fam.omega_m.norm() - exact.omega.norm()).abs() / exact.omega.norm();
        assert!(rel <= 1e-2, "m = {}: {rel}", fam.m);
    }
}

#[test]
fn implicit_residual_shrinks_with_order() {
    let a = lorentz(1.0).high_freq_coefficient().unwrap();
    let fam = asymptotic_modes(a, 1.0, &[10, 20, 50, 100], FrequencyScale::default()).unwrap();
    assert!(fam.windows(2).all(|w| w[1].implicit_residual < w[0].implicit_residual));
}

#[test]
fn modes_cluster_at_the_resonance() {
    let stack = slab();
    let region = SearchRegion::new(0.0, 1.2, -0.1, 0.0).unwrap();
    let modes = find_modes(&stack, &region).unwrap();
    let census = cluster_census(&modes, Complex64::new(1.0, -0.0005), &[0.1, 0.05, 0.02, 0.01]).unwrap();
    assert!(census.density_increases, "{census:?}");
    assert!(census.monotone);
    let mirror = find_modes(&stack, &SearchRegion::new(-1.2, 0.0, -0.1, 0.0).unwrap()).unwrap();
    for m in &modes.modes {
        assert!(mirror.contains_near(-m.omega.conj(), 1e-9), "{}", m.omega);
    }
}

#[test]
fn slab_has_an_isolated_mode_just_above_the_resonance() {
    // Not part of the near-resonance family: it sits at a finite distance
    // from the pole and survives as the damping goes to zero.
    let region = SearchRegion::new(1.01, 3.0, -0.5, 0.0).unwrap();
    let modes = find_modes(&slab(), &region).unwrap();
    assert_eq!(modes.len(), 1);
    assert!((modes.modes[0].omega - Complex64::new(1.019_073_8, -0.059_734_6)).norm() < 1e-6);
}
