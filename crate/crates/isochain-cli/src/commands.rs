//! One function per command. Each reads its inputs, runs the library and
//! writes its artifacts into the output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use isochain::csvio::{format_number, Table};
use isochain::helmholtz::{
    calibrated_params, extrapolate_corner, fit_decay_law, mode_table, spectrum_below_threshold, splitting_sweep,
    sweep_table, Bend, DecayLaw, SplittingPoint,
};
use isochain::inverse::{
    coupling_distribution, newton_solve, sample_surface_with_stats, EnsembleKind, EnsembleSpec, InverseProblem,
};
use isochain::models::{expected_spectrum, model_couplings, ExpectedSpectrum, ModelKind};
use isochain::rng::derive_seed;
use isochain::spectral::{eig_jacobi, ChainCouplings, SymmetricSpectrum};
use isochain::waveguide::{
    design_guide, geometry_from_json, geometry_to_json, outline_to_svg, GuideParams, Pattern, ARM_WIDTHS,
};
use serde_json::json;

use crate::config::{Pin, RunConfig, Source, Task};
use crate::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Files written by one run, in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub files: Vec<PathBuf>,
}

struct Output<'a> {
    dir: &'a Path,
    artifacts: Artifacts,
}

impl Output<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.artifacts.files.push(path);
        Ok(())
    }

    fn table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        self.write(name, table.to_csv_string().as_bytes())
    }

    fn json(&mut self, name: &str, value: serde_json::Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}

fn column(header: &str, values: &[f64]) -> Table {
    let mut t = Table::new(&[header]);
    for v in values {
        t.push(vec![*v]);
    }
    t
}

fn load(source: &Source) -> Result<Vec<f64>, CliError> {
    match source {
        Source::Inline(v) => Ok(v.clone()),
        Source::File { path, column } => {
            let shown = path.display().to_string();
            let file = fs::File::open(path).map_err(|source| CliError::Io { path: shown.clone(), source })?;
            let table = Table::read(file).map_err(|e| CliError::Input(format!("{shown}: {e}")))?;
            table.column(column).map_err(|e| CliError::Input(format!("{shown}: {e}")))
        }
    }
}

fn chain(source: &Source) -> Result<ChainCouplings, CliError> {
    Ok(ChainCouplings::new(load(source)?).map_err(isochain::Error::from)?)
}

fn spectrum(source: &Source) -> Result<SymmetricSpectrum, CliError> {
    Ok(SymmetricSpectrum::new(load(source)?).map_err(isochain::Error::from)?)
}

/// The per-command stream seed, so pipelines sharing a seed do not
/// correlate.
fn seed(config: &RunConfig) -> u64 {
    derive_seed(config.seed, config.command.name(), 0)
}

/// Runs the configured command and writes its artifacts into `out`.
pub fn run(config: &RunConfig, out: &Path) -> Result<Artifacts, CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Io { path: out.display().to_string(), source })?;
    let mut o = Output { dir: out, artifacts: Artifacts::default() };
    match &config.task {
        Task::Spectrum { couplings } => run_spectrum(&mut o, couplings)?,
        Task::Invert { energies, pins, max_restarts, tolerance } => {
            run_invert(&mut o, energies, pins, *max_restarts, *tolerance, seed(config))?
        }
        Task::Sample { energies, count } => run_sample(&mut o, energies, *count, seed(config))?,
        Task::Distributions { ensemble, size, trials, sigma, bins } => {
            let spec = EnsembleSpec {
                kind: *ensemble,
                size: *size,
                trials: *trials,
                sigma: *sigma,
                bins: *bins,
                seed: seed(config),
            };
            run_distributions(&mut o, &spec)?
        }
        Task::Model { model } => run_model(&mut o, model)?,
        Task::Design { couplings, pattern, scale } => run_design(&mut o, couplings, pattern, *scale, &config.guide)?,
        Task::Simulate { geometry, steps_per_width, modes } => {
            run_simulate(&mut o, geometry, *steps_per_width, *modes, &config.guide)?
        }
        Task::Validate { steps_per_width, d_from, d_to, d_step, corner_steps } => {
            let ds = separations(*d_from, *d_to, *d_step);
            run_validate(&mut o, *steps_per_width, &ds, corner_steps, &config.guide)?
        }
    }
    Ok(o.artifacts)
}

fn run_spectrum(o: &mut Output, couplings: &Source) -> Result<(), CliError> {
    let eig = eig_jacobi(&chain(couplings)?);
    o.table("spectrum.csv", &column("E", eig.spectrum.values()))
}

fn run_invert(
    o: &mut Output,
    energies: &Source,
    pins: &[Pin],
    max_restarts: usize,
    tolerance: f64,
    seed: u64,
) -> Result<(), CliError> {
    let target = spectrum(energies)?;
    let mut map = BTreeMap::new();
    for p in pins {
        if map.insert(p.index, p.value).is_some() {
            return Err(CliError::Config(format!("invert.pins: index {} pinned twice", p.index)));
        }
    }
    let mut problem = InverseProblem::new(target, map.clone())
        .map_err(isochain::Error::from)?
        .with_seed(seed)
        .with_max_restarts(max_restarts);
    problem.tolerance = tolerance;
    let result = newton_solve(&problem).map_err(isochain::Error::from)?;
    o.table("couplings.csv", &column("F", result.couplings.values()))?;
    o.json(
        "invert.json",
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "pins": map.iter().map(|(i, v)| json!({"index": i, "value": v})).collect::<Vec<_>>(),
            "residual_norm": result.residual_norm,
            "iterations": result.iterations,
            "restarts_used": result.restarts_used,
        }),
    )
}

fn run_sample(o: &mut Output, energies: &Source, count: usize, seed: u64) -> Result<(), CliError> {
    let target = spectrum(energies)?;
    let drawn = sample_surface_with_stats(&target, count, seed).map_err(isochain::Error::from)?;
    let mut t = Table::new(&["sample", "n", "F"]);
    for (s, c) in drawn.samples.iter().enumerate() {
        for (n, f) in c.values().iter().enumerate() {
            t.push(vec![(s + 1) as f64, (n + 1) as f64, *f]);
        }
    }
    o.table("samples.csv", &t)?;
    o.json(
        "sample.json",
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "requested": count,
            "returned": drawn.samples.len(),
            "skipped": drawn.skipped,
        }),
    )
}

fn run_distributions(o: &mut Output, spec: &EnsembleSpec) -> Result<(), CliError> {
    let stats = coupling_distribution(spec).map_err(isochain::Error::from)?;
    let h = &stats.histogram;
    let mut t = Table::new(&["bin_lo", "bin_hi", "count"]);
    for (i, c) in h.counts.iter().enumerate() {
        t.push(vec![h.edges[i], h.edges[i + 1], *c as f64]);
    }
    o.table("histogram.csv", &t)?;
    let rows = [
        ("mean", stats.mean),
        ("std_dev", stats.std_dev),
        ("mode", stats.mode),
        ("samples", stats.samples as f64),
        ("failed_trials", stats.failed_trials as f64),
        ("size", spec.size as f64),
        ("trials", spec.trials as f64),
        ("sigma", if spec.kind == EnsembleKind::Gaussian { spec.sigma } else { f64::NAN }),
    ];
    let mut text = String::from("key,value\n");
    for (k, v) in rows {
        text.push_str(&format!("{k},{}\n", format_number(v)));
    }
    o.write("stats.csv", text.as_bytes())
}

fn run_model(o: &mut Output, model: &ModelKind) -> Result<(), CliError> {
    let couplings = model_couplings(model).map_err(isochain::Error::from)?;
    let expected = expected_spectrum(model).map_err(isochain::Error::from)?;
    o.table("couplings.csv", &column("F", couplings.values()))?;
    o.table("expected.csv", &column("E", expected.levels().values()))?;
    let (kind, fit) = match &expected {
        ExpectedSpectrum::Exact(_) => ("exact", serde_json::Value::Null),
        ExpectedSpectrum::ScaledHermiteNodes(_) => ("scaled-hermite-nodes", serde_json::Value::Null),
        ExpectedSpectrum::SquareRootLaw { fit, .. } => (
            "square-root-law",
            json!({"slope": fit.slope, "intercept": fit.intercept, "correlation": fit.correlation}),
        ),
    };
    o.json(
        "model.json",
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "model": model,
            "sites": model.sites(),
            "expected": kind,
            "fit": fit,
        }),
    )
}

fn run_design(
    o: &mut Output,
    couplings: &Source,
    pattern: &Pattern,
    scale: Option<f64>,
    params: &GuideParams,
) -> Result<(), CliError> {
    let chain = chain(couplings)?;
    let design = design_guide(&chain, params, pattern, scale).map_err(isochain::Error::from)?;
    o.write("geometry.json", format!("{}\n", geometry_to_json(&design.geometry)).as_bytes())?;
    o.write("geometry.svg", outline_to_svg(&design.geometry).as_bytes())?;
    o.table("predicted.csv", &column("E", &design.predicted))?;
    o.json(
        "design.json",
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "scale": design.scale,
            "capped": design.capped,
            "params": params,
            "threshold": params.threshold(),
        }),
    )
}

fn grid_step(steps_per_width: usize, width: f64) -> f64 {
    width / steps_per_width as f64
}

fn run_simulate(
    o: &mut Output,
    geometry: &Path,
    steps_per_width: usize,
    modes: bool,
    params: &GuideParams,
) -> Result<(), CliError> {
    let shown = geometry.display().to_string();
    let text = fs::read_to_string(geometry).map_err(|source| CliError::Io { path: shown.clone(), source })?;
    let geometry = geometry_from_json(&text).map_err(|e| CliError::Input(format!("{shown}: {e}")))?;
    if (geometry.width - params.width).abs() > 1e-12 * params.width {
        return Err(CliError::Config(format!(
            "guide.width: {} does not match the geometry width {}",
            params.width, geometry.width
        )));
    }
    let h = grid_step(steps_per_width, geometry.width);
    let cmp = spectrum_below_threshold(&geometry, params, h)?;
    // one row per predicted level; levels the guide does not bind are NaN
    let rows = cmp.levels.len().max(cmp.predicted.len());
    let mut t = Table::new(&["k", "level", "predicted", "deviation"]);
    for k in 0..rows {
        let level = cmp.levels.get(k).copied().unwrap_or(f64::NAN);
        let predicted = cmp.predicted.get(k).copied().unwrap_or(f64::NAN);
        let deviation = cmp.deviations.get(k).copied().unwrap_or(f64::NAN);
        t.push(vec![(k + 1) as f64, level, predicted, deviation]);
    }
    o.table("levels.csv", &t)?;
    o.write("mask.txt", cmp.domain.to_text().as_bytes())?;
    let mut mask = Vec::new();
    cmp.domain.write_binary(&mut mask).map_err(|source| CliError::Io { path: "mask.bin".into(), source })?;
    o.write("mask.bin", &mask)?;
    if modes {
        for (k, v) in cmp.modes.vectors.iter().enumerate() {
            o.table(&format!("mode_{}.csv", k + 1), &mode_table(&cmp.domain, v))?;
            let mut field = Vec::new();
            cmp.domain.write_binary_field(v, &mut field).map_err(isochain::Error::from)?;
            o.write(&format!("mode_{}.bin", k + 1), &field)?;
        }
    }
    o.json(
        "simulate.json",
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "h": h,
            "steps_per_width": steps_per_width,
            "unknowns": cmp.domain.unknowns(),
            "bound": cmp.bound,
            "threshold": cmp.threshold,
            "window": cmp.window,
            "levels": cmp.levels.len(),
            "predicted": cmp.predicted.len(),
            "counts_match": cmp.counts_match(),
            "max_deviation": cmp.max_deviation(),
            "max_residual": cmp.modes.residuals.iter().fold(0.0f64, |m, r| m.max(*r)),
        }),
    )
}

/// `from, from + step, …` up to `to` inclusive (with a little slack).
fn separations(from: f64, to: f64, step: f64) -> Vec<f64> {
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| from + i as f64 * step).collect()
}

fn law_json(law: &DecayLaw) -> serde_json::Value {
    json!({"lambda": law.lambda, "delta0": law.delta0, "correlation": law.correlation, "points": law.points})
}

fn fit(points: &[SplittingPoint]) -> Result<DecayLaw, CliError> {
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.d, p.coupling)).collect();
    Ok(fit_decay_law(&samples)?)
}

fn run_validate(
    o: &mut Output,
    steps_per_width: usize,
    ds: &[f64],
    corner_steps: &[usize],
    params: &GuideParams,
) -> Result<(), CliError> {
    let width = params.width;
    let h = grid_step(steps_per_width, width);
    let u = splitting_sweep(ds, Bend::U, h, width)?;
    let s = splitting_sweep(ds, Bend::S, h, width)?;
    o.table("sweep_u.csv", &sweep_table(&u))?;
    o.table("sweep_s.csv", &sweep_table(&s))?;
    let (law_u, law_s) = (fit(&u)?, fit(&s)?);
    let corner = extrapolate_corner(ARM_WIDTHS * width, corner_steps, width)?;
    let same_grid = corner.states.iter().find(|c| (c.h - h).abs() < 1e-12 * h).map(|c| c.bound);
    let calibrated = same_grid.map(|b| calibrated_params(params, &law_u, b));
    let baseline = GuideParams::for_width(width);
    o.json(
        "decay.json",
        json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "lambda": law_u.lambda,
            "delta0": law_u.delta0,
            "correlation": law_u.correlation,
            "h": h,
            "separations": ds,
            "u": law_json(&law_u),
            "s": law_json(&law_s),
            "symmetric_lower": u.iter().chain(&s).all(|p| p.symmetric_is_lower()),
            "corner": {
                "states": corner.states,
                "bound": corner.bound,
                "ratio": corner.ratio,
                "difference_ratio": corner.difference_ratio,
            },
            "baseline": {"lambda": baseline.lambda, "delta0": baseline.delta0, "bound": baseline.bound},
            "calibrated": calibrated,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separations_include_the_end() {
        assert_eq!(separations(2.0, 6.0, 0.5).len(), 9);
        assert_eq!(separations(2.0, 2.0, 0.5), vec![2.0]);
        let s = separations(0.1, 0.3, 0.1);
        assert_eq!(s.len(), 3);
    }
}
