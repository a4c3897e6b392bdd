//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use layermodes_core::analysis::{
    asymptotic_modes, cluster_census, near_resonance_modes_slab, two_layer_near_resonance, SecondIndex, WhichLayer,
};
use layermodes_core::completeness::{classify, lambert_w, verify_l_constancy, CanonicalProduct, Classification, TailModel};
use layermodes_core::completeness::EigenvalueLaw;
use layermodes_core::modefinder::langer::exponential_sum;
use layermodes_core::modefinder::polynomial::{
    equal_phase_modes, gap_around, max_abs_im, quarterwave_polynomial, quarterwave_stack,
};
use layermodes_core::modefinder::{count_zeros, Rect};
use layermodes_core::transfer::wolter_recursion;
use layermodes_core::{
    find_modes, spectrum, Complex64, FrequencyScale, Layer, Material, ModeSet, Polarization, SearchRegion, Stack,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn lorentz(omega0: f64) -> Material {
    Material::lorentz(0.25, omega0, 1e-3).unwrap()
}

fn constant_slab(n: f64) -> Stack {
    Stack::slab(Material::constant(1.0), Material::constant(n), 1.0).unwrap()
}

fn dispersive_slab() -> Stack {
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

fn multilayers() -> Vec<Stack> {
    let c = Material::constant;
    vec![
        Stack::normal_incidence(c(1.0), vec![Layer::new(c(2.1), 0.3), Layer::new(c(1.4), 0.8)], c(1.52)).unwrap(),
        Stack::normal_incidence(
            c(1.33),
            vec![Layer::new(c(3.0), 0.2), Layer::new(c(1.5), 0.45), Layer::new(c(2.2), 0.7)],
            c(1.0),
        )
        .unwrap(),
        quarterwave_stack(1.5, 4).unwrap(),
    ]
}

fn search(stack: &Stack, re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> ModeSet {
    find_modes(stack, &SearchRegion::new(re_min, re_max, im_min, im_max).unwrap()).unwrap()
}

fn closed_form_slab() -> Verdict {
    let start = Instant::now();
    let n = 1.5;
    // Re δ from π/2 to 5π + π/2: the open interval (0, 5π) has the k = 0 and
    // k = 5 roots on its closure, so the edges sit half a spacing away.
    let found = search(&constant_slab(n), FRAC_PI_2 / n, 5.5 * PI / n, -2.0, 0.5);
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    for (k, m) in (1..=5).zip(&found.modes) {
        let delta = Complex64::new(k as f64 * PI, -(5.0f64).ln());
        worst = worst.max((m.omega * n - delta).norm());
    }
    let pass = found.len() == 5 && worst < 1e-9 && elapsed < 1.0;
    verdict(pass, format!("{} modes, max |δ − δ_k| = {worst:.2e}, {elapsed:.3} s", found.len()))
}

fn clustering_at_resonance() -> Verdict {
    let start = Instant::now();
    let stack = dispersive_slab();
    let modes = search(&stack, 0.0, 1.2, -0.1, 0.0);
    let outside: Vec<Complex64> = modes.modes.iter().map(|m| m.omega).filter(|w| w.re >= 1.0 + 1e-2).collect();
    let census = cluster_census(&modes, Complex64::new(1.0, -0.0005), &[0.1, 0.05, 0.02, 0.01]).unwrap();
    let counts: Vec<usize> = census.rows.iter().map(|r| r.count).collect();
    let mirror = search(&stack, -1.2, 0.0, -0.1, 0.0);
    let unmatched = modes.modes.iter().filter(|m| !mirror.contains_near(-m.omega.conj(), 1e-9)).count();
    let elapsed = start.elapsed().as_secs_f64();
    let a = outside.is_empty();
    // Nested disks cannot hold more modes than the disks around them, so the
    // growth toward the pole is read as count per area.
    let b = census.monotone && census.grows_at_largest && census.density_increases;
    let c = unmatched == 0 && mirror.len() == modes.len();
    let pass = a && b && c && elapsed < 30.0;
    verdict(
        pass,
        format!(
            "(a) {} modes with Re ω ≥ 1.01 {outside:?}; (b) counts {counts:?}, density increasing {}; \
             (c) {} of {} mirrors missing; {elapsed:.2} s",
            outside.len(),
            census.density_increases,
            unmatched,
            modes.len()
        ),
    )
}

fn quarterwave_claims() -> Verdict {
    let qw = |ratio: f64, layers: usize| quarterwave_stack(ratio, layers).unwrap();
    let degree = quarterwave_polynomial(&qw(1.5, 8)).unwrap().len() - 1;
    // One period of δ (period π in y = e^{2iδ}).
    let period8 = equal_phase_modes(&qw(1.5, 8), 0..=0).unwrap();
    let period16 = equal_phase_modes(&qw(1.5, 16), 0..=0).unwrap();
    let period_r2 = equal_phase_modes(&qw(2.0, 8), 0..=0).unwrap();
    let (im8, im16, im_r2) = (max_abs_im(&period8), max_abs_im(&period16), max_abs_im(&period_r2));
    let gap8 = gap_around(&period8, FRAC_PI_2, 0.0, PI).unwrap();
    let gap16 = gap_around(&period16, FRAC_PI_2, 0.0, PI).unwrap();
    let tol = 0.05 * (gap16.1 - gap16.0);
    let contained = gap8.0 >= gap16.0 - tol && gap8.1 <= gap16.1 + tol;
    let pass = degree == 8 && period8.len() == 8 && im16 < im8 && im_r2 < im8 && contained;
    verdict(
        pass,
        format!(
            "degree {degree}, {} roots per period; max|Im δ| 8 layers {im8:.4}, 16 layers {im16:.4}, ratio 2 {im_r2:.4}; \
             gap8 ({:.4}, {:.4}) within gap16 ({:.4}, {:.4}) ± {tol:.4}: {contained}",
            period8.len(),
            gap8.0,
            gap8.1,
            gap16.0,
            gap16.1
        ),
    )
}

/// Relative distance to the nearest exact mode, and whether distinct orders
/// landed on distinct exact modes.
fn match_family(exact: &ModeSet, approx: &[Complex64]) -> (f64, bool) {
    let mut worst = 0.0f64;
    let mut hit: Vec<Complex64> = Vec::new();
    for &w in approx {
        let e = exact.nearest(w).unwrap().omega;
        worst = worst.max((e - w).norm() / e.norm());
        hit.push(e);
    }
    let distinct = hit.iter().enumerate().all(|(i, a)| hit[..i].iter().all(|b| (a - b).norm() > 1e-12));
    (worst, distinct)
}

fn near_resonance() -> Verdict {
    let stack = dispersive_slab();
    let exact = search(&stack, 0.95, 1.005, -0.01, 0.002);
    let fam = near_resonance_modes_slab(&lorentz(1.0), 1.0, 10..=30, FrequencyScale::default()).unwrap();
    let approx: Vec<Complex64> = fam.iter().map(|f| f.omega_approx).collect();
    let (worst, distinct) = match_family(&exact, &approx);
    let residuals: Vec<f64> = approx.iter().map(|&w| wolter_recursion(&stack, w).unwrap().residual()).collect();
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let pass = worst <= 1e-2 && distinct && decreasing;
    verdict(
        pass,
        format!(
            "m = 10..30: max relative error {worst:.2e}, distinct matches {distinct}; residual {:.4e} → {:.4e}, decreasing {decreasing}",
            residuals[0],
            residuals[residuals.len() - 1]
        ),
    )
}

fn two_layer_reduction() -> Verdict {
    let stack = two_layer();
    let exact = search(&stack, 0.55, 0.605, -0.01, 0.002);
    let fam = two_layer_near_resonance(&stack, WhichLayer::Second, 10..=30, SecondIndex::Exact).unwrap();
    let approx: Vec<Complex64> = fam.iter().map(|f| f.omega_approx).collect();
    let (worst, distinct) = match_family(&exact, &approx);
    verdict(worst <= 1e-2 && distinct, format!("m = 10..30: max relative error {worst:.2e}, distinct matches {distinct}"))
}

fn asymptotics() -> Verdict {
    let stack = dispersive_slab();
    let a = lorentz(1.0).high_freq_coefficient().unwrap();
    let mut errors = Vec::new();
    for f in asymptotic_modes(a, 1.0, &[50, 100], FrequencyScale::default()).unwrap() {
        let w = f.omega_decaying;
        let local = search(&stack, w.re - 1.0, w.re + 1.0, w.im - 1.0, w.im + 1.0);
        let Some(exact) = local.nearest(w) else {
            return verdict(false, format!("no exact mode near m = {}", f.m));
        };
        errors.push((f.m, (f.omega_m.norm() - exact.omega.norm()).abs() / exact.omega.norm()));
    }
    let residuals: Vec<f64> = asymptotic_modes(a, 1.0, &[10, 20, 50, 100], FrequencyScale::default())
        .unwrap()
        .iter()
        .map(|f| f.implicit_residual)
        .collect();
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let pass = errors.iter().all(|&(_, e)| e <= 1e-2) && decreasing;
    let errors: Vec<String> = errors.iter().map(|(m, e)| format!("m = {m}: {e:.2e}")).collect();
    verdict(pass, format!("modulus errors [{}]; residuals {residuals:.3?}, decreasing {decreasing}", errors.join(", ")))
}

fn energy_conservation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut n = || Material::constant(rng.gen_range(1.0..4.0));
        let (ambient_in, ambient_out) = (n(), n());
        let count = rng.gen_range(1..=6);
        let layers = (0..count)
            .map(|_| Layer::new(Material::constant(rng.gen_range(1.0..4.0)), rng.gen_range(0.01..3.0)))
            .collect();
        let pol = if rng.gen_bool(0.5) { Polarization::Te } else { Polarization::Tm };
        let theta = rng.gen_range(0.0..1.5);
        let stack = Stack::new(ambient_in, layers, ambient_out, pol, theta, FrequencyScale::default()).unwrap();
        let omega = rng.gen_range(0.01..50.0);
        worst = worst.max(spectrum(&stack, &[omega]).unwrap().max_flux_defect());
    }
    verdict(worst < 1e-12, format!("1000 stacks, max |R + T − 1| = {worst:.2e}"))
}

fn mode_symmetry() -> Verdict {
    let mut cases: Vec<(&str, Stack, Rect)> = vec![
        ("slab n = 1.5", constant_slab(1.5), Rect::new(-12.0, 12.0, -3.0, 0.5).unwrap()),
        ("quarter-wave 8", quarterwave_stack(1.5, 8).unwrap(), Rect::new(-7.0, 7.0, -1.0, 0.5).unwrap()),
        ("dispersive slab", dispersive_slab(), Rect::new(-1.2, 1.2, -0.1, 0.0).unwrap()),
        ("two-layer", two_layer(), Rect::new(-1.2, 1.2, -0.1, 0.0).unwrap()),
    ];
    for (i, s) in multilayers().into_iter().enumerate() {
        cases.push((["multilayer A", "multilayer B", "multilayer C"][i], s, Rect::new(-12.0, 12.0, -4.0, 0.5).unwrap()));
    }
    let mut total = 0;
    let mut missing = Vec::new();
    for (name, stack, rect) in &cases {
        let found = find_modes(stack, &SearchRegion::from_rect(*rect)).unwrap();
        total += found.len();
        let m = found.missing_mirrors(rect, 1e-9);
        if !m.is_empty() || found.is_empty() {
            missing.push(format!("{name}: {} of {}", m.len(), found.len()));
        }
    }
    verdict(missing.is_empty(), format!("{} stacks, {total} modes; missing mirrors: {missing:?}", cases.len()))
}

fn argument_principle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut stacks = multilayers();
    stacks.push(constant_slab(1.5));
    let big = Rect::new(-10.0, 10.0, -4.0, 0.5).unwrap();
    let all: Vec<ModeSet> = stacks.iter().map(|s| find_modes(s, &SearchRegion::from_rect(big)).unwrap()).collect();
    let (mut checked, mut mismatches) = (0, Vec::new());
    while checked < 100 {
        let i = rng.gen_range(0..stacks.len());
        let (a, b): (f64, f64) = (rng.gen_range(-9.0..9.0), rng.gen_range(-9.0..9.0));
        let (c, d): (f64, f64) = (rng.gen_range(-3.5..0.0), rng.gen_range(-3.5..0.4));
        let Ok(rect) = Rect::new(a.min(b), a.max(b), c.min(d), c.max(d)) else { continue };
        // Contours passing within 1e-6 of a zero are ill-posed; draw again.
        let near_edge =
            all[i].modes.iter().any(|m| rect.expanded(1e-6).contains(m.omega) && !rect.expanded(-1e-6).contains(m.omega));
        if near_edge || rect.width() < 1e-3 || rect.height() < 1e-3 {
            continue;
        }
        let winding = count_zeros(&stacks[i], &rect).unwrap();
        let polished = find_modes(&stacks[i], &SearchRegion::from_rect(rect)).unwrap().total_multiplicity();
        if winding != polished {
            mismatches.push((i, rect, winding, polished));
        }
        checked += 1;
    }
    verdict(mismatches.is_empty(), format!("{checked} rectangles, mismatches {mismatches:?}"))
}

fn completeness_classifier() -> Verdict {
    let cases = [
        ("λ_m = mπ", EigenvalueLaw::Arithmetic { spacing: PI, shift: 0.0 }, None, Classification::Incomplete),
        ("λ_m = (m − ½)π", EigenvalueLaw::Arithmetic { spacing: PI, shift: 0.5 }, None, Classification::Complete),
        ("cosine without m = 1", EigenvalueLaw::Arithmetic { spacing: PI, shift: 0.5 }, Some(1), Classification::Incomplete),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, law, removed, expected) in cases {
        let mut cp = CanonicalProduct::from_law(law, 100_000, TailModel::AsymptoticPairing).unwrap();
        if let Some(m) = removed {
            cp = cp.without(m);
        }
        let r = classify(&cp, 1.0, 1000.0).unwrap();
        let margin = (r.decay_exponent + 0.5).abs();
        let doubling = r.doubling_change.unwrap_or(f64::INFINITY);
        pass &= r.classification == expected && margin >= 0.1 && doubling < 0.02;
        parts.push(format!(
            "{name}: {} (p = {:.4}, margin {margin:.3}, doubling {doubling:.1e})",
            r.classification.as_str(),
            r.decay_exponent
        ));
    }
    verdict(pass, parts.join("; "))
}

fn constancy() -> Verdict {
    let zs: Vec<f64> = (0..=40).map(|k| 100.0 * 10f64.powf(k as f64 / 40.0)).collect();
    let table = verify_l_constancy(0.25, 1.0, 100_000, &zs).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let z = Complex64::from_polar(10f64.powf(rng.gen_range(-8.0..8.0)), rng.gen_range(-PI..PI));
        let w = lambert_w(z, 0).unwrap();
        worst = worst.max((w * w.exp() - z).norm() / z.norm().max(1.0));
    }
    let first = table.rows[0].1;
    let last = table.rows[table.rows.len() - 1].1;
    let pass = table.relative_variation < 0.05 && worst <= 1e-12;
    verdict(
        pass,
        format!(
            "|L| from {first:.4} (|z| = 100) to {last:.4} (|z| = 1000), variation {:.3}; bound {:.3}; \
             Lambert W max residual {worst:.1e}",
            table.relative_variation, table.bound
        ),
    )
}

fn langer_density() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, stack) in multilayers().iter().enumerate() {
        let sum = exponential_sum(stack).unwrap();
        let (lo, hi) = sum.strip();
        let found = search(stack, 0.05, 40.0, lo - 0.5, hi + 0.5);
        let mut windows = 0;
        let mut violations = 0;
        for l in [3.0, 7.5, 20.0] {
            let (min, max) = sum.count_bounds(l);
            let mut start = 0.05;
            while start + l <= 40.0 {
                let count =
                    found.modes.iter().filter(|m| m.omega.re >= start && m.omega.re < start + l).count() as f64;
                violations += usize::from(count < min || count > max);
                windows += 1;
                start += 0.25;
            }
        }
        pass &= violations == 0 && !found.is_empty();
        parts.push(format!("stack {i}: {} modes, {violations}/{windows} windows out of bounds", found.len()));
    }
    verdict(pass, parts.join("; "))
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 12] = [
        ("closed-form slab oracle", closed_form_slab),
        ("clustering at the resonance", clustering_at_resonance),
        ("quarter-wave claims", quarterwave_claims),
        ("near-resonance approximation", near_resonance),
        ("two-layer reduction", two_layer_reduction),
        ("asymptotics", asymptotics),
        ("energy conservation", energy_conservation),
        ("mode symmetry", mode_symmetry),
        ("argument-principle consistency", argument_principle),
        ("completeness classifier", completeness_classifier),
        ("constancy of |L| and Lambert W", constancy),
        ("Langer density", langer_density),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        failed += usize::from(!v.pass);
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
