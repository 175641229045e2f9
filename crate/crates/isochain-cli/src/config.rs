//! Run configuration: one TOML file naming a command and its section.

use std::path::{Path, PathBuf};

use isochain::inverse::EnsembleKind;
use isochain::models::ModelKind;
use isochain::rng::DEFAULT_SEED;
use isochain::waveguide::{GuideParams, Pattern, Turn};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Invert,
    Sample,
    Distributions,
    Model,
    Design,
    Simulate,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Spectrum => "spectrum",
            Self::Invert => "invert",
            Self::Sample => "sample",
            Self::Distributions => "distributions",
            Self::Model => "model",
            Self::Design => "design",
            Self::Simulate => "simulate",
            Self::Validate => "validate",
        }
    }

    fn uses_guide(self) -> bool {
        matches!(self, Self::Design | Self::Simulate | Self::Validate)
    }
}

/// Numbers given inline or as a CSV column.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Inline(Vec<f64>),
    File { path: PathBuf, column: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pin {
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Spectrum { couplings: Source },
    Invert { energies: Source, pins: Vec<Pin>, max_restarts: usize, tolerance: f64 },
    Sample { energies: Source, count: usize },
    Distributions { ensemble: EnsembleKind, size: usize, trials: usize, sigma: f64, bins: usize },
    Model { model: ModelKind },
    Design { couplings: Source, pattern: Pattern, scale: Option<f64> },
    Simulate { geometry: PathBuf, steps_per_width: usize, modes: bool },
    Validate { steps_per_width: usize, d_from: f64, d_to: f64, d_step: f64, corner_steps: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub guide: GuideParams,
    pub task: Task,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Command,
    seed: Option<u64>,
    guide: Option<RawGuide>,
    spectrum: Option<RawSpectrum>,
    invert: Option<RawInvert>,
    sample: Option<RawSample>,
    distributions: Option<RawDistributions>,
    model: Option<ModelKind>,
    design: Option<RawDesign>,
    simulate: Option<RawSimulate>,
    validate: Option<RawValidate>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGuide {
    width: Option<f64>,
    lambda: Option<f64>,
    delta0: Option<f64>,
    bound: Option<f64>,
    d_min: Option<f64>,
    safety: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    couplings: Option<Vec<f64>>,
    couplings_file: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInvert {
    energies: Option<Vec<f64>>,
    spectrum_file: Option<PathBuf>,
    #[serde(default)]
    pins: Vec<Pin>,
    max_restarts: Option<usize>,
    tolerance: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    energies: Option<Vec<f64>>,
    spectrum_file: Option<PathBuf>,
    count: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistributions {
    ensemble: EnsembleKind,
    size: Option<usize>,
    trials: Option<usize>,
    sigma: Option<f64>,
    bins: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDesign {
    couplings: Option<Vec<f64>>,
    couplings_file: Option<PathBuf>,
    pattern: Option<String>,
    turns: Option<Vec<Turn>>,
    scale: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    geometry_file: PathBuf,
    steps_per_width: Option<usize>,
    modes: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawValidate {
    steps_per_width: Option<usize>,
    d_from: Option<f64>,
    d_to: Option<f64>,
    d_step: Option<f64>,
    corner_steps: Option<Vec<usize>>,
}

pub const DEFAULT_STEPS_PER_WIDTH: usize = 20;

fn invalid(field: &str, message: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {message}"))
}

fn source(
    section: &str,
    inline: Option<Vec<f64>>,
    file: Option<PathBuf>,
    names: (&str, &str),
    column: &'static str,
    base: &Path,
) -> Result<Source, CliError> {
    match (inline, file) {
        (Some(v), None) => Ok(Source::Inline(v)),
        (None, Some(p)) => Ok(Source::File { path: base.join(p), column }),
        (Some(_), Some(_)) => Err(invalid(section, format!("give either {} or {}, not both", names.0, names.1))),
        (None, None) => Err(invalid(section, format!("one of {} or {} is required", names.0, names.1))),
    }
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

fn guide_params(raw: RawGuide) -> Result<GuideParams, CliError> {
    let width = positive("guide.width", raw.width.unwrap_or(1.0))?;
    let base = GuideParams::for_width(width);
    let params = GuideParams {
        width,
        lambda: raw.lambda.unwrap_or(base.lambda),
        delta0: raw.delta0.unwrap_or(base.delta0),
        bound: raw.bound.unwrap_or(base.bound),
        d_min: raw.d_min.unwrap_or(base.d_min),
        safety: raw.safety.unwrap_or(base.safety),
    };
    params.validate().map_err(|e| invalid("guide", e))?;
    Ok(params)
}

fn pattern(raw: &RawDesign) -> Result<Pattern, CliError> {
    match (raw.pattern.as_deref(), &raw.turns) {
        (None | Some("zigzag"), None) => Ok(Pattern::Zigzag),
        (Some("meander"), None) => Ok(Pattern::Meander),
        (None | Some("custom"), Some(t)) => Ok(Pattern::Custom(t.clone())),
        (Some("zigzag" | "meander"), Some(_)) => Err(invalid("design.turns", "only allowed with pattern = \"custom\"")),
        (Some("custom"), None) => Err(invalid("design.pattern", "custom pattern needs turns")),
        (Some(other), _) => Err(invalid("design.pattern", format!("unknown pattern {other:?} (zigzag, meander, custom)"))),
    }
}

fn steps(field: &str, v: Option<usize>) -> Result<usize, CliError> {
    let m = v.unwrap_or(DEFAULT_STEPS_PER_WIDTH);
    if m < isochain::helmholtz::MIN_STEPS_PER_WIDTH {
        return Err(invalid(field, format!("at least {} steps per width needed, got {m}", isochain::helmholtz::MIN_STEPS_PER_WIDTH)));
    }
    Ok(m)
}

/// Parses and validates a configuration. Relative paths are resolved
/// against `base`, normally the directory of the config file.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(parse_message(text, &e)))?;
    let command = raw.command;
    let present = [
        ("spectrum", raw.spectrum.is_some()),
        ("invert", raw.invert.is_some()),
        ("sample", raw.sample.is_some()),
        ("distributions", raw.distributions.is_some()),
        ("model", raw.model.is_some()),
        ("design", raw.design.is_some()),
        ("simulate", raw.simulate.is_some()),
        ("validate", raw.validate.is_some()),
    ];
    for (name, there) in present {
        if there && name != command.name() {
            return Err(invalid(name, format!("section does not apply to command {:?}", command.name())));
        }
    }
    if raw.guide.is_some() && !command.uses_guide() {
        return Err(invalid("guide", format!("section does not apply to command {:?}", command.name())));
    }
    let guide = guide_params(raw.guide.unwrap_or_default())?;
    let missing = || invalid(command.name(), "section is required");
    let task = match command {
        Command::Spectrum => {
            let s = raw.spectrum.ok_or_else(missing)?;
            Task::Spectrum { couplings: source("spectrum", s.couplings, s.couplings_file, ("couplings", "couplings_file"), "F", base)? }
        }
        Command::Invert => {
            let s = raw.invert.ok_or_else(missing)?;
            let tolerance = positive("invert.tolerance", s.tolerance.unwrap_or(1e-12))?;
            Task::Invert {
                energies: source("invert", s.energies, s.spectrum_file, ("energies", "spectrum_file"), "E", base)?,
                pins: s.pins,
                max_restarts: s.max_restarts.unwrap_or(50),
                tolerance,
            }
        }
        Command::Sample => {
            let s = raw.sample.ok_or_else(missing)?;
            if s.count == 0 {
                return Err(invalid("sample.count", "must be at least 1"));
            }
            Task::Sample {
                energies: source("sample", s.energies, s.spectrum_file, ("energies", "spectrum_file"), "E", base)?,
                count: s.count,
            }
        }
        Command::Distributions => {
            let s = raw.distributions.ok_or_else(missing)?;
            let defaults = isochain::inverse::EnsembleSpec::new(s.ensemble);
            Task::Distributions {
                ensemble: s.ensemble,
                size: s.size.unwrap_or(defaults.size),
                trials: s.trials.unwrap_or(defaults.trials),
                sigma: s.sigma.unwrap_or(defaults.sigma),
                bins: s.bins.unwrap_or(defaults.bins),
            }
        }
        Command::Model => {
            let model = raw.model.ok_or_else(missing)?;
            model.validate().map_err(|e| invalid("model", e))?;
            Task::Model { model }
        }
        Command::Design => {
            let s = raw.design.ok_or_else(missing)?;
            let pattern = pattern(&s)?;
            let scale = s.scale.map(|v| positive("design.scale", v)).transpose()?;
            Task::Design {
                couplings: source("design", s.couplings, s.couplings_file, ("couplings", "couplings_file"), "F", base)?,
                pattern,
                scale,
            }
        }
        Command::Simulate => {
            let s = raw.simulate.ok_or_else(missing)?;
            Task::Simulate {
                geometry: base.join(s.geometry_file),
                steps_per_width: steps("simulate.steps_per_width", s.steps_per_width)?,
                modes: s.modes.unwrap_or(false),
            }
        }
        Command::Validate => {
            let s = raw.validate.unwrap_or_default();
            let d_from = positive("validate.d_from", s.d_from.unwrap_or(2.0))?;
            let d_to = positive("validate.d_to", s.d_to.unwrap_or(6.0))?;
            let d_step = positive("validate.d_step", s.d_step.unwrap_or(0.5))?;
            if d_to < d_from {
                return Err(invalid("validate.d_to", format!("must not be below d_from = {d_from}")));
            }
            Task::Validate {
                steps_per_width: steps("validate.steps_per_width", s.steps_per_width)?,
                d_from,
                d_to,
                d_step,
                corner_steps: s.corner_steps.unwrap_or_else(|| vec![10, 20, 40]),
            }
        }
    };
    Ok(RunConfig { command, seed: raw.seed.unwrap_or(DEFAULT_SEED), guide, task })
}

/// The TOML error with its line number.
fn parse_message(text: &str, e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("line {line}: {}", e.message())
        }
        None => e.message().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, CliError> {
        parse_config(text, Path::new("/base"))
    }

    #[test]
    fn minimal_spectrum_config() {
        let c = parse("command = \"spectrum\"\n[spectrum]\ncouplings_file = \"c.csv\"\n").unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(
            c.task,
            Task::Spectrum { couplings: Source::File { path: PathBuf::from("/base/c.csv"), column: "F" } }
        );
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse("command = \"design\"\n[design]\ncouplings = [1.0]\n[guide]\nlamda = 1.2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lamda"), "{msg}");
        assert!(msg.contains("line 5"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn design_defaults_are_populated() {
        let c = parse("command = \"design\"\nseed = 3\n[design]\ncouplings = [1.0, 2.0]\npattern = \"meander\"\n").unwrap();
        assert_eq!(c.guide, GuideParams::default());
        assert_eq!(c.seed, 3);
        assert!(matches!(c.task, Task::Design { pattern: Pattern::Meander, scale: None, .. }));
    }

    #[test]
    fn validation_names_the_field() {
        let e = parse("command = \"sample\"\n[sample]\nenergies = [1.0]\ncount = 0\n").unwrap_err();
        assert!(e.to_string().contains("sample.count"));
        let e = parse("command = \"design\"\n[design]\ncouplings = [1.0]\n[guide]\nsafety = 2.0\n").unwrap_err();
        assert!(e.to_string().contains("guide"));
        let e = parse("command = \"invert\"\n[invert]\nenergies = [1.0]\nspectrum_file = \"x\"\n").unwrap_err();
        assert!(e.to_string().contains("not both"));
        let e = parse("command = \"spectrum\"\n[spectrum]\ncouplings = [1.0]\n[model]\nmodel = \"uniform\"\nsites = 3\nc = 1.0\n").unwrap_err();
        assert!(e.to_string().contains("model"));
        let e = parse("command = \"simulate\"\n[simulate]\ngeometry_file = \"g.json\"\nsteps_per_width = 4\n").unwrap_err();
        assert!(e.to_string().contains("simulate.steps_per_width"));
        assert!(parse("command = \"frobnicate\"\n").is_err());
    }

    #[test]
    fn custom_turns() {
        let c = parse("command = \"design\"\n[design]\ncouplings = [1.0]\nturns = [\"L\", \"R\"]\n").unwrap();
        assert!(matches!(c.task, Task::Design { pattern: Pattern::Custom(ref t), .. } if t == &[Turn::Left, Turn::Right]));
    }
}
