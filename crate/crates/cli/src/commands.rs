//! One function per subcommand. Each writes its files into the output
//! directory and reports what it wrote.

use std::path::{Path, PathBuf};

use layermodes_core::analysis::{
    asymptotic_modes_with_min, cluster_census, near_resonance_modes_slab, two_layer_near_resonance, NearResonanceFamily,
    SecondIndex, WhichLayer,
};
use layermodes_core::completeness::{classify_with, verify_l_constancy, CanonicalProduct};
use layermodes_core::modefinder::polynomial::{common_optical_thickness, equal_phase_modes};
use layermodes_core::modefinder::{find_modes_report, polish_mode, Rect};
use layermodes_core::transfer::wolter_recursion;
use layermodes_core::{spectrum, Complex64, Error, Material, Method, Mode, ModeSet, Stack};
use serde::Serialize;

use crate::config::{section, ModeMethod, RunConfig};
use crate::output::{num, write_json, Provenance, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The search left cells it could not resolve; partial results were written.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub files: Vec<PathBuf>,
}

pub struct Context<'a> {
    pub config: &'a RunConfig,
    pub out: &'a Path,
    pub seed: u64,
}

impl Context<'_> {
    fn provenance(&self, stack: Option<&Stack>) -> Provenance {
        Provenance::new(self.config.fingerprint(), self.seed, stack.map(Stack::fingerprint))
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn mode_table(set: &ModeSet) -> Table {
    let mut t = Table::new(&["re_omega", "im_omega", "multiplicity", "method", "residual"]);
    for m in &set.modes {
        t.push(vec![num(m.omega.re), num(m.omega.im), m.multiplicity.to_string(), m.method.as_str().to_owned(), num(m.residual)]);
    }
    t
}

fn rect_array(r: &Rect) -> [f64; 4] {
    [r.re_min, r.re_max, r.im_min, r.im_max]
}

#[derive(Serialize)]
struct ModesSummary {
    command: &'static str,
    method: &'static str,
    region: [f64; 4],
    count: usize,
    total_multiplicity: u32,
    excluded_cells: usize,
    region_count: Option<u32>,
    missing_mirrors: usize,
    unresolved: Vec<[f64; 4]>,
    /// `ω = δ · omega_per_delta` for the exact-polynomial method.
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_per_delta: Option<f64>,
}

struct Search {
    modes: ModeSet,
    excluded_cells: usize,
    region_count: Option<u32>,
    unresolved: Vec<Rect>,
}

fn search(stack: &Stack, region: &layermodes_core::SearchRegion) -> Result<Search, CliError> {
    match find_modes_report(stack, region) {
        Ok(r) => Ok(Search { modes: r.modes, excluded_cells: r.excluded_cells, region_count: r.region_count, unresolved: Vec::new() }),
        Err(Error::MaxDepthExceeded(u)) => {
            Ok(Search { modes: u.found, excluded_cells: 0, region_count: None, unresolved: u.unresolved })
        }
        Err(e) => Err(e.into()),
    }
}

/// Equal-phase stacks: polynomial roots mapped back from `δ = ω τ / c`.
fn exact_polynomial_modes(stack: &Stack, rect: &Rect) -> Result<ModeSet, CliError> {
    let tau = common_optical_thickness(stack)?;
    let c = stack.scale.c;
    let to_delta = |w: f64| w * tau / c;
    let lo = (to_delta(rect.re_min) / std::f64::consts::PI).floor() as i64 - 1;
    let hi = (to_delta(rect.re_max) / std::f64::consts::PI).ceil() as i64 + 1;
    let deltas = equal_phase_modes(stack, lo..=hi)?;
    let modes = deltas
        .modes
        .iter()
        .map(|m| Mode { omega: m.omega * c / tau, ..*m })
        .filter(|m| rect.contains(m.omega))
        .collect();
    Ok(ModeSet::new(modes, stack.fingerprint()))
}

pub fn modes(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = section(&ctx.config.modes, "modes")?;
    let stack = ctx.config.stack()?;
    let region = cfg.search_region(ctx.seed)?;
    let rect = region.rect();
    let (found, method) = match cfg.method {
        ModeMethod::Contour => (search(&stack, &region)?, Method::ContourNewton),
        ModeMethod::ExactPolynomial => (
            Search { modes: exact_polynomial_modes(&stack, &rect)?, excluded_cells: 0, region_count: None, unresolved: Vec::new() },
            Method::ExactPolynomial,
        ),
    };
    let prov = ctx.provenance(Some(&stack));
    let csv = ctx.path("modes.csv");
    mode_table(&found.modes).write(&csv, &prov)?;
    let summary = ModesSummary {
        command: "modes",
        method: method.as_str(),
        region: rect_array(&rect),
        count: found.modes.len(),
        total_multiplicity: found.modes.total_multiplicity(),
        excluded_cells: found.excluded_cells,
        region_count: found.region_count,
        missing_mirrors: found.modes.missing_mirrors(&rect, 1e-9).len(),
        unresolved: found.unresolved.iter().map(rect_array).collect(),
        omega_per_delta: match method {
            Method::ExactPolynomial => Some(stack.scale.c / common_optical_thickness(&stack)?),
            _ => None,
        },
    };
    let json = ctx.path("modes_summary.json");
    write_json(&json, &prov, &summary)?;
    let status = if found.unresolved.is_empty() { Status::Ok } else { Status::Unresolved };
    Ok(Outcome { status, files: vec![csv, json] })
}

#[derive(Serialize)]
struct PeakRow {
    omega: f64,
    height: f64,
    fwhm: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumSummary {
    command: &'static str,
    points: usize,
    max_flux_defect: f64,
    peaks: Vec<PeakRow>,
    /// Maximal runs of grid points with transmittance below the threshold.
    stop_bands: Vec<[f64; 2]>,
}

pub fn spectrum_cmd(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = section(&ctx.config.spectrum, "spectrum")?;
    if cfg.points < 2 || !(cfg.omega_max > cfg.omega_min) {
        return Err(CliError::Config("spectrum needs omega_max > omega_min and at least 2 points".into()));
    }
    let stack = ctx.config.stack()?;
    let step = (cfg.omega_max - cfg.omega_min) / (cfg.points - 1) as f64;
    let grid: Vec<f64> = (0..cfg.points).map(|k| cfg.omega_min + step * k as f64).collect();
    let s = spectrum(&stack, &grid)?;
    let mut t = Table::new(&["omega", "R", "T", "is_peak", "fwhm"]);
    for p in &s.points {
        t.push(vec![num(p.omega), num(p.r), num(p.t), u8::from(p.is_peak).to_string(), p.fwhm.map(num).unwrap_or_default()]);
    }
    let mut stop_bands = Vec::new();
    let mut start: Option<f64> = None;
    for (i, p) in s.points.iter().enumerate() {
        let inside = p.t < cfg.stop_band_threshold;
        match (inside, start) {
            (true, None) => start = Some(p.omega),
            (false, Some(a)) => {
                stop_bands.push([a, s.points[i - 1].omega]);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        stop_bands.push([a, s.points.last().map_or(a, |p| p.omega)]);
    }
    let prov = ctx.provenance(Some(&stack));
    let csv = ctx.path("spectrum.csv");
    t.write(&csv, &prov)?;
    let summary = SpectrumSummary {
        command: "spectrum",
        points: s.points.len(),
        max_flux_defect: s.max_flux_defect(),
        peaks: s.peaks.iter().map(|p| PeakRow { omega: p.omega, height: p.height, fwhm: p.fwhm }).collect(),
        stop_bands,
    };
    let json = ctx.path("spectrum_summary.json");
    write_json(&json, &prov, &summary)?;
    Ok(Outcome { status: Status::Ok, files: vec![csv, json] })
}

#[derive(Serialize)]
struct CensusPole {
    pole: [f64; 2],
    counts: Vec<(f64, usize)>,
    monotone: bool,
    grows_at_largest: bool,
    density_increases: bool,
}

#[derive(Serialize)]
struct CensusSummary {
    command: &'static str,
    modes: usize,
    unresolved: Vec<[f64; 4]>,
    poles: Vec<CensusPole>,
}

pub fn census(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = section(&ctx.config.census, "census")?;
    let stack = ctx.config.stack()?;
    let region = crate::config::region(&cfg.region, cfg.max_depth, cfg.newton_tol, cfg.exclusion_radius, ctx.seed)?;
    let rect = region.rect();
    let poles: Vec<Complex64> = match &cfg.poles {
        Some(p) => p.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        None => stack.singular_points().into_iter().filter(|p| rect.contains(*p)).collect(),
    };
    if poles.is_empty() {
        return Err(CliError::Config("census needs a pole: none given and no material pole lies in the region".into()));
    }
    let found = search(&stack, &region)?;
    let mut t = Table::new(&["radius", "count", "pole_re", "pole_im"]);
    let mut rows = Vec::new();
    for pole in poles {
        let c = cluster_census(&found.modes, pole, &cfg.radii)?;
        for r in &c.rows {
            t.push(vec![num(r.radius), r.count.to_string(), num(pole.re), num(pole.im)]);
        }
        rows.push(CensusPole {
            pole: [pole.re, pole.im],
            counts: c.rows.iter().map(|r| (r.radius, r.count)).collect(),
            monotone: c.monotone,
            grows_at_largest: c.grows_at_largest,
            density_increases: c.density_increases,
        });
    }
    let prov = ctx.provenance(Some(&stack));
    let csv = ctx.path("census.csv");
    t.write(&csv, &prov)?;
    let modes_csv = ctx.path("modes.csv");
    mode_table(&found.modes).write(&modes_csv, &prov)?;
    let json = ctx.path("census.json");
    let summary = CensusSummary {
        command: "census",
        modes: found.modes.len(),
        unresolved: found.unresolved.iter().map(rect_array).collect(),
        poles: rows,
    };
    write_json(&json, &prov, &summary)?;
    let status = if found.unresolved.is_empty() { Status::Ok } else { Status::Unresolved };
    Ok(Outcome { status, files: vec![csv, modes_csv, json] })
}

pub fn asymptotics(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = section(&ctx.config.asymptotics, "asymptotics")?;
    let stack = ctx.config.stack.as_ref().map(|s| s.build()).transpose()?;
    let a = match (cfg.a, &stack) {
        (Some(a), _) => a,
        (None, Some(s)) => s
            .layers
            .iter()
            .filter_map(|l| l.material.high_freq_coefficient().ok())
            .sum::<f64>(),
        (None, None) => return Err(CliError::Config("asymptotics needs `a` or a stack".into())),
    };
    let d = match (cfg.d, &stack) {
        (Some(d), _) => d,
        (None, Some(s)) => s.total_thickness(),
        (None, None) => return Err(CliError::Config("asymptotics needs `d` or a stack".into())),
    };
    let scale = stack.as_ref().map(|s| s.scale).unwrap_or_default();
    let fam = asymptotic_modes_with_min(a, d, &cfg.orders, cfg.m_min, scale)?;
    let compare = match (&stack, cfg.compare_exact) {
        (Some(s), true) => Some(s),
        (None, true) => return Err(CliError::Config("compare_exact needs a stack".into())),
        _ => None,
    };
    // Leading columns follow the mode CSV; `re_omega, im_omega` is the formula as written.
    let mut t = Table::new(&[
        "re_omega",
        "im_omega",
        "multiplicity",
        "method",
        "residual",
        "m",
        "re_decaying",
        "im_decaying",
        "re_exact",
        "im_exact",
        "modulus_rel_error",
    ]);
    for f in &fam {
        let exact = match compare {
            Some(s) => Some(polish_mode(s, f.omega_decaying, 0.5 * std::f64::consts::PI * scale.c / d)?.omega),
            None => None,
        };
        let mut row = vec![
            num(f.omega_m.re),
            num(f.omega_m.im),
            "1".to_owned(),
            Method::Asymptotic.as_str().to_owned(),
            num(f.implicit_residual),
            f.m.to_string(),
            num(f.omega_decaying.re),
            num(f.omega_decaying.im),
        ];
        match exact {
            Some(e) => row.extend([num(e.re), num(e.im), num((f.omega_m.norm() - e.norm()).abs() / e.norm())]),
            None => row.extend([String::new(), String::new(), String::new()]),
        }
        t.push(row);
    }
    let prov = ctx.provenance(stack.as_ref());
    let csv = ctx.path("asymptotics.csv");
    t.write(&csv, &prov)?;
    let mut files = vec![csv];
    if let Some(nr) = &cfg.near_resonance {
        let s = stack.as_ref().ok_or_else(|| CliError::Config("near_resonance needs a stack".into()))?;
        let fams = near_resonance_families(s, nr.m_min..=nr.m_max)?;
        let mut t = Table::new(&["re_omega", "im_omega", "multiplicity", "method", "residual", "m", "layer", "pole_re", "pole_im"]);
        for f in fams {
            let residual = wolter_recursion(s, f.omega_approx)?.residual();
            t.push(vec![
                num(f.omega_approx.re),
                num(f.omega_approx.im),
                "1".to_owned(),
                Method::NearResonance.as_str().to_owned(),
                num(residual),
                f.m.to_string(),
                f.layer_index.to_string(),
                num(f.pole.re),
                num(f.pole.im),
            ]);
        }
        let path = ctx.path("near_resonance.csv");
        t.write(&path, &prov)?;
        files.push(path);
    }
    Ok(Outcome { status: Status::Ok, files })
}

/// Slab family for one Lorentz layer, both two-layer families for two.
fn near_resonance_families(stack: &Stack, ms: std::ops::RangeInclusive<u32>) -> Result<Vec<NearResonanceFamily>, CliError> {
    match stack.layers.as_slice() {
        [l] if matches!(l.material, Material::Lorentz { .. }) => {
            Ok(near_resonance_modes_slab(&l.material, l.thickness, ms, stack.scale)?)
        }
        [a, b] if matches!(a.material, Material::Lorentz { .. }) && matches!(b.material, Material::Lorentz { .. }) => {
            let mut out = two_layer_near_resonance(stack, WhichLayer::First, ms.clone(), SecondIndex::Exact)?;
            out.extend(two_layer_near_resonance(stack, WhichLayer::Second, ms, SecondIndex::Exact)?);
            Ok(out)
        }
        _ => Err(CliError::Config("near_resonance needs one Lorentz layer or two Lorentz layers".into())),
    }
}

#[derive(Serialize)]
struct ClassificationReport {
    classification: &'static str,
    decay_exponent: f64,
    fit_residual: f64,
    truncation: usize,
    tail_model: &'static str,
    fit_range: [f64; 2],
    doubling_change: Option<f64>,
    paley_wiener_ratio_check: bool,
    modes_to_complete: Option<u32>,
    tail_provenance: Option<&'static str>,
    removed: Vec<i64>,
}

#[derive(Serialize)]
struct ConstancyReport {
    a: f64,
    d: f64,
    truncation: usize,
    relative_variation: f64,
    residue_bound: f64,
    worst_tail_ratio: f64,
}

#[derive(Serialize)]
struct CompletenessOutput {
    command: &'static str,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    report: Option<ClassificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constancy: Option<ConstancyReport>,
}

pub fn completeness(ctx: &Context) -> Result<Outcome, CliError> {
    let cfg = section(&ctx.config.completeness, "completeness")?;
    if cfg.set.is_none() && cfg.constancy.is_none() {
        return Err(CliError::Config("completeness needs `set` and/or `constancy`".into()));
    }
    let prov = ctx.provenance(None);
    let mut files = Vec::new();
    let report = match &cfg.set {
        Some(set) => {
            let mut cp = CanonicalProduct::from_law(set.law(), cfg.truncation, cfg.tail_model.into())?;
            for &m in &cfg.remove {
                cp = cp.without(m);
            }
            let r = classify_with(&cp, cfg.x_min, cfg.x_max, &cfg.classify.into())?;
            Some(ClassificationReport {
                classification: r.classification.as_str(),
                decay_exponent: r.decay_exponent,
                fit_residual: r.fit_residual,
                truncation: r.truncation,
                tail_model: r.tail_model.as_str(),
                fit_range: [r.fit_range.0, r.fit_range.1],
                doubling_change: r.doubling_change,
                paley_wiener_ratio_check: r.paley_wiener_ratio_check,
                modes_to_complete: r.modes_to_complete,
                tail_provenance: r.tail_provenance,
                removed: cfg.remove.clone(),
            })
        }
        None => None,
    };
    let constancy = match &cfg.constancy {
        Some(c) => {
            if c.samples < 2 || !(c.z_max > c.z_min) || !(c.z_min > 0.0) {
                return Err(CliError::Config("constancy needs 0 < z_min < z_max and at least 2 samples".into()));
            }
            let ratio = c.z_max / c.z_min;
            let zs: Vec<f64> =
                (0..c.samples).map(|k| c.z_min * ratio.powf(k as f64 / (c.samples - 1) as f64)).collect();
            let table = verify_l_constancy(c.a, c.d, c.truncation, &zs)?;
            let mut t = Table::new(&["abs_z", "abs_L"]);
            for &(z, l) in &table.rows {
                t.push(vec![num(z), num(l)]);
            }
            let path = ctx.path("constancy.csv");
            t.write(&path, &prov)?;
            files.push(path);
            Some(ConstancyReport {
                a: c.a,
                d: c.d,
                truncation: c.truncation,
                relative_variation: table.relative_variation,
                residue_bound: table.bound,
                worst_tail_ratio: table.worst_tail_ratio,
            })
        }
        None => None,
    };
    let json = ctx.path("completeness.json");
    write_json(&json, &prov, &CompletenessOutput { command: "completeness", report, constancy })?;
    files.insert(0, json);
    Ok(Outcome { status: Status::Ok, files })
}
