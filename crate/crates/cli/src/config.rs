//! Sectioned `key = value` experiment configuration: parsing with
//! line-accurate errors, command-line overrides, serialization, and
//! construction of the concrete simulation objects.
//!
//! A config file has five sections:
//!
//! ```text
//! [graph]      mixing-matrix schedule (kind, size, window, floor)
//! [objective]  synthetic least-squares instance shared by the agents
//! [noise]      gradient noise model and its moment order
//! [schedule]   step-size and clip-level parameters
//! [run]        horizon, recording stride, seeds, mode, output
//! ```
//!
//! Lines starting with `#` or `;` are comments. Every key is checked: an
//! unknown key or section is an error naming the offending line.

use std::fmt;
use std::path::{Path, PathBuf};

use hclip_core::graph::GraphSchedule;
use hclip_core::noise::NoiseModel;
use hclip_core::objective::Problem;
use hclip_core::schedule::Schedule;
use hclip_core::{Error, Result};

// ---------------------------------------------------------------------------
// Raw layer: ordered sections of (key, value, line).
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct RawEntry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone)]
struct RawSection {
    name: String,
    line: usize,
    entries: Vec<RawEntry>,
}

/// Parsed but untyped config text.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    sections: Vec<RawSection>,
}

impl RawConfig {
    /// Parses INI-style text. Duplicate sections or duplicate keys within a
    /// section are rejected so that a value can never be silently shadowed.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RawConfig::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with(';') {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("section header `{trimmed}` is missing `]`"),
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::Parse { line, msg: "empty section name".into() });
                }
                if cfg.sections.iter().any(|s| s.name == name) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("section [{name}] appears twice"),
                    });
                }
                cfg.sections.push(RawSection { name: name.to_string(), line, entries: Vec::new() });
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{trimmed}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(Error::Parse { line, msg: "empty key".into() });
            }
            let section = cfg.sections.last_mut().ok_or_else(|| Error::Parse {
                line,
                msg: format!("key `{key}` appears before any [section] header"),
            })?;
            if section.entries.iter().any(|e| e.key == key) {
                return Err(Error::Parse {
                    line,
                    msg: format!("key `{key}` appears twice in [{}]", section.name),
                });
            }
            section.entries.push(RawEntry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
        }
        Ok(cfg)
    }

    /// Applies one `section.key=value` override, replacing an existing entry
    /// or appending a new one (which the typed layer will then vet).
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (path, value) = spec.split_once('=').ok_or_else(|| {
            Error::InvalidArgument(format!("override `{spec}` is missing `=value`"))
        })?;
        let (section, key) = path.trim().split_once('.').ok_or_else(|| {
            Error::InvalidArgument(format!(
                "override key `{path}` must be of the form section.key"
            ))
        })?;
        let (section, key, value) = (section.trim(), key.trim(), value.trim());
        if section.is_empty() || key.is_empty() {
            return Err(Error::InvalidArgument(format!("override `{spec}` has an empty part")));
        }
        let sec = match self.sections.iter_mut().find(|s| s.name == section) {
            Some(s) => s,
            None => {
                self.sections.push(RawSection {
                    name: section.to_string(),
                    line: 0,
                    entries: Vec::new(),
                });
                self.sections.last_mut().unwrap()
            }
        };
        match sec.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => e.value = value.to_string(),
            None => sec.entries.push(RawEntry {
                key: key.to_string(),
                value: value.to_string(),
                line: 0,
            }),
        }
        Ok(())
    }

    fn take_section(&mut self, name: &str) -> Option<RawSection> {
        let idx = self.sections.iter().position(|s| s.name == name)?;
        Some(self.sections.remove(idx))
    }
}

/// Typed access to one section with consume-and-check semantics: every key
/// must be taken exactly once, and leftovers are reported with their line.
struct SectionView {
    name: &'static str,
    entries: Vec<RawEntry>,
}

impl SectionView {
    fn new(raw: &mut RawConfig, name: &'static str) -> Result<Self> {
        let section = raw.take_section(name).ok_or_else(|| {
            Error::MalformedInput(format!("config is missing the [{name}] section"))
        })?;
        Ok(SectionView { name, entries: section.entries })
    }

    fn take(&mut self, key: &str) -> Option<RawEntry> {
        let idx = self.entries.iter().position(|e| e.key == key)?;
        Some(self.entries.remove(idx))
    }

    fn require(&mut self, key: &str) -> Result<RawEntry> {
        self.take(key).ok_or_else(|| {
            Error::MalformedInput(format!("[{}] is missing key `{key}`", self.name))
        })
    }

    fn parse_with<T>(&self, entry: &RawEntry, what: &str) -> Result<T>
    where
        T: std::str::FromStr,
    {
        entry.value.parse::<T>().map_err(|_| Error::Parse {
            line: entry.line,
            msg: format!(
                "expected {what} for {}.{}, got `{}`",
                self.name, entry.key, entry.value
            ),
        })
    }

    fn f64(&mut self, key: &str) -> Result<f64> {
        let e = self.require(key)?;
        self.parse_with(&e, "a number")
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            Some(e) => self.parse_with(&e, "a number"),
            None => Ok(default),
        }
    }

    fn usize(&mut self, key: &str) -> Result<usize> {
        let e = self.require(key)?;
        self.parse_with(&e, "a non-negative integer")
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            Some(e) => self.parse_with(&e, "a non-negative integer"),
            None => Ok(default),
        }
    }

    fn u64_or(&mut self, key: &str, default: u64) -> Result<u64> {
        match self.take(key) {
            Some(e) => self.parse_with(&e, "a non-negative integer"),
            None => Ok(default),
        }
    }

    fn bool_or(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            Some(e) => self.parse_with(&e, "true or false"),
            None => Ok(default),
        }
    }

    fn string(&mut self, key: &str) -> Result<(String, usize)> {
        let e = self.require(key)?;
        Ok((e.value, e.line))
    }

    /// Errors on the first unconsumed key so typos never pass silently.
    fn finish(self) -> Result<()> {
        match self.entries.first() {
            None => Ok(()),
            Some(e) => Err(Error::Parse {
                line: e.line,
                msg: format!("unknown key `{}` in [{}]", e.key, self.name),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Typed layer.
// ---------------------------------------------------------------------------

/// Mixing-graph construction recipe.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphConfig {
    SwitchingRing { n: usize, b: usize, eta: f64 },
    Complete { n: usize },
    Random { n: usize, b: usize, eta: f64, period: usize, graph_seed: u64 },
    File { path: PathBuf },
}

impl GraphConfig {
    pub fn build(&self) -> Result<GraphSchedule> {
        match self {
            GraphConfig::SwitchingRing { n, b, eta } => GraphSchedule::switching_ring(*n, *b, *eta),
            GraphConfig::Complete { n } => GraphSchedule::complete(*n),
            GraphConfig::Random { n, b, eta, period, graph_seed } => {
                GraphSchedule::random(*n, *b, *eta, *period, *graph_seed)
            }
            GraphConfig::File { path } => GraphSchedule::from_file(path),
        }
    }

    fn from_section(mut sec: SectionView) -> Result<Self> {
        let (kind, kind_line) = sec.string("kind")?;
        let out = match kind.as_str() {
            "switching_ring" => GraphConfig::SwitchingRing {
                n: sec.usize("n")?,
                b: sec.usize("b")?,
                eta: sec.f64("eta")?,
            },
            "complete" => GraphConfig::Complete { n: sec.usize("n")? },
            "random" => {
                let n = sec.usize("n")?;
                let b = sec.usize("b")?;
                GraphConfig::Random {
                    n,
                    b,
                    eta: sec.f64("eta")?,
                    period: sec.usize_or("period", b)?,
                    graph_seed: sec.u64_or("graph_seed", 0)?,
                }
            }
            "file" => GraphConfig::File { path: PathBuf::from(sec.string("path")?.0) },
            other => {
                return Err(Error::Parse {
                    line: kind_line,
                    msg: format!(
                        "unknown graph kind `{other}` (expected switching_ring, complete, random, or file)"
                    ),
                })
            }
        };
        sec.finish()?;
        Ok(out)
    }

    fn pairs(&self, out: &mut Vec<(String, String)>) {
        let p = |out: &mut Vec<(String, String)>, k: &str, v: String| {
            out.push((format!("graph.{k}"), v));
        };
        match self {
            GraphConfig::SwitchingRing { n, b, eta } => {
                p(out, "kind", "switching_ring".into());
                p(out, "n", n.to_string());
                p(out, "b", b.to_string());
                p(out, "eta", eta.to_string());
            }
            GraphConfig::Complete { n } => {
                p(out, "kind", "complete".into());
                p(out, "n", n.to_string());
            }
            GraphConfig::Random { n, b, eta, period, graph_seed } => {
                p(out, "kind", "random".into());
                p(out, "n", n.to_string());
                p(out, "b", b.to_string());
                p(out, "eta", eta.to_string());
                p(out, "period", period.to_string());
                p(out, "graph_seed", graph_seed.to_string());
            }
            GraphConfig::File { path } => {
                p(out, "kind", "file".into());
                p(out, "path", path.display().to_string());
            }
        }
    }
}

/// Synthetic least-squares instance; the agent count comes from the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveConfig {
    pub dim: usize,
    pub samples_per_agent: usize,
    pub heterogeneity: f64,
    pub ridge: f64,
    pub data_seed: u64,
}

impl ObjectiveConfig {
    pub fn build(&self, n_agents: usize) -> Result<Problem> {
        Problem::generate_synthetic(
            n_agents,
            self.dim,
            self.samples_per_agent,
            self.heterogeneity,
            self.ridge,
            self.data_seed,
        )
    }

    fn from_section(mut sec: SectionView) -> Result<Self> {
        if let Some(e) = sec.take("kind") {
            if e.value != "synthetic" {
                return Err(Error::Parse {
                    line: e.line,
                    msg: format!("unknown objective kind `{}` (expected synthetic)", e.value),
                });
            }
        }
        let out = ObjectiveConfig {
            dim: sec.usize("dim")?,
            samples_per_agent: sec.usize("samples_per_agent")?,
            heterogeneity: sec.f64_or("heterogeneity", 0.5)?,
            ridge: sec.f64_or("ridge", 0.1)?,
            data_seed: sec.u64_or("data_seed", 0)?,
        };
        sec.finish()?;
        Ok(out)
    }

    fn pairs(&self, out: &mut Vec<(String, String)>) {
        out.push(("objective.kind".into(), "synthetic".into()));
        out.push(("objective.dim".into(), self.dim.to_string()));
        out.push(("objective.samples_per_agent".into(), self.samples_per_agent.to_string()));
        out.push(("objective.heterogeneity".into(), self.heterogeneity.to_string()));
        out.push(("objective.ridge".into(), self.ridge.to_string()));
        out.push(("objective.data_seed".into(), self.data_seed.to_string()));
    }
}

/// Either derive the moment bound from the model or take it as given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSpec {
    Auto,
    Value(f64),
}

/// Gradient-noise model plus the moment order `p` the analysis runs at.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub model: NoiseModel,
    pub p: f64,
    pub sigma: SigmaSpec,
}

impl NoiseConfig {
    /// Resolves the moment bound for a given dimension. `auto` is an error
    /// for models without a closed-form bound (heavy tails past order `p`).
    pub fn resolve_sigma(&self, dim: usize) -> Result<f64> {
        match self.sigma {
            SigmaSpec::Value(v) => {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "noise sigma must be a finite non-negative number, got {v}"
                    )));
                }
                Ok(v)
            }
            SigmaSpec::Auto => self.model.declared_sigma(dim, self.p).ok_or_else(|| {
                Error::InvalidArgument(
                    "noise.sigma = auto has no closed form for this model; set a number".into(),
                )
            }),
        }
    }

    fn from_section(mut sec: SectionView) -> Result<Self> {
        let (kind, kind_line) = sec.string("kind")?;
        let model = match kind.as_str() {
            "none" => NoiseModel::None,
            "gaussian" => NoiseModel::Gaussian { scale: sec.f64("scale")? },
            "student_t" => NoiseModel::StudentT { dof: sec.f64("dof")?, scale: sec.f64("scale")? },
            "pareto" => NoiseModel::Pareto { scale: sec.f64("scale")?, shape: sec.f64("shape")? },
            other => {
                return Err(Error::Parse {
                    line: kind_line,
                    msg: format!(
                        "unknown noise kind `{other}` (expected none, gaussian, student_t, or pareto)"
                    ),
                })
            }
        };
        let p = sec.f64("p")?;
        let sigma = match sec.take("sigma") {
            None => SigmaSpec::Auto,
            Some(e) if e.value == "auto" => SigmaSpec::Auto,
            Some(e) => SigmaSpec::Value(sec.parse_with(&e, "a number or `auto`")?),
        };
        model.validate(p)?;
        sec.finish()?;
        Ok(NoiseConfig { model, p, sigma })
    }

    fn pairs(&self, out: &mut Vec<(String, String)>) {
        let p = |out: &mut Vec<(String, String)>, k: &str, v: String| {
            out.push((format!("noise.{k}"), v));
        };
        match &self.model {
            NoiseModel::None => p(out, "kind", "none".into()),
            NoiseModel::Gaussian { scale } => {
                p(out, "kind", "gaussian".into());
                p(out, "scale", scale.to_string());
            }
            NoiseModel::StudentT { dof, scale } => {
                p(out, "kind", "student_t".into());
                p(out, "dof", dof.to_string());
                p(out, "scale", scale.to_string());
            }
            NoiseModel::Pareto { scale, shape } => {
                p(out, "kind", "pareto".into());
                p(out, "scale", scale.to_string());
                p(out, "shape", shape.to_string());
            }
        }
        p(out, "p", self.p.to_string());
        let sigma = match self.sigma {
            SigmaSpec::Auto => "auto".to_string(),
            SigmaSpec::Value(v) => v.to_string(),
        };
        p(out, "sigma", sigma);
    }
}

/// Step-size and clip-level parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConfig {
    pub m: f64,
    pub b1: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl ScheduleConfig {
    pub fn build(&self) -> Result<Schedule> {
        Schedule::new(self.m, self.b1, self.kappa, self.lambda, self.alpha)
    }

    fn from_section(mut sec: SectionView) -> Result<Self> {
        let out = ScheduleConfig {
            m: sec.f64("m")?,
            b1: sec.f64("b1")?,
            kappa: sec.f64("kappa")?,
            lambda: sec.f64("lambda")?,
            alpha: sec.f64("alpha")?,
        };
        sec.finish()?;
        Ok(out)
    }

    fn pairs(&self, out: &mut Vec<(String, String)>) {
        out.push(("schedule.m".into(), self.m.to_string()));
        out.push(("schedule.b1".into(), self.b1.to_string()));
        out.push(("schedule.kappa".into(), self.kappa.to_string()));
        out.push(("schedule.lambda".into(), self.lambda.to_string()));
        out.push(("schedule.alpha".into(), self.alpha.to_string()));
    }
}

/// Inclusive seed range `first..last` (a single seed when the ends agree).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

impl SeedRange {
    pub fn single(seed: u64) -> Self {
        SeedRange { first: seed, last: seed }
    }

    /// Accepts `N` or `A..B` (inclusive on both ends).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |s: &str| {
            Error::InvalidArgument(format!("expected a seed `N` or a range `A..B`, got `{s}`"))
        };
        if let Some((a, b)) = s.split_once("..") {
            let first: u64 = a.trim().parse().map_err(|_| bad(s))?;
            let last: u64 = b.trim().parse().map_err(|_| bad(s))?;
            if last < first {
                return Err(Error::InvalidArgument(format!(
                    "seed range `{s}` runs backwards"
                )));
            }
            Ok(SeedRange { first, last })
        } else {
            Ok(SeedRange::single(s.trim().parse().map_err(|_| bad(s))?))
        }
    }

    pub fn list(&self) -> Vec<u64> {
        (self.first..=self.last).collect()
    }

    pub fn count(&self) -> usize {
        (self.last - self.first + 1) as usize
    }
}

impl fmt::Display for SeedRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.first == self.last {
            write!(f, "{}", self.first)
        } else {
            write!(f, "{}..{}", self.first, self.last)
        }
    }
}

/// Which update rule(s) to run for every seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Clipped,
    Baseline,
    Both,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "clipped" => Some(Mode::Clipped),
            "baseline" => Some(Mode::Baseline),
            "both" => Some(Mode::Both),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Mode::Clipped => "clipped",
            Mode::Baseline => "baseline",
            Mode::Both => "both",
        }
    }

    /// `(file label, clip_enabled)` for each rule this mode runs.
    pub fn variants(&self) -> Vec<(&'static str, bool)> {
        match self {
            Mode::Clipped => vec![("clipped", true)],
            Mode::Baseline => vec![("baseline", false)],
            Mode::Both => vec![("clipped", true), ("baseline", false)],
        }
    }
}

/// Horizon, recording, seeds, and output destination.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub horizon: usize,
    pub stride: usize,
    pub delta: f64,
    pub seeds: SeedRange,
    pub mode: Mode,
    pub record_states: bool,
    pub out: Option<PathBuf>,
}

impl RunSection {
    fn from_section(mut sec: SectionView) -> Result<Self> {
        let horizon = sec.usize("horizon")?;
        let stride = sec.usize_or("stride", 1)?;
        let delta = sec.f64_or("delta", 0.1)?;
        let seeds = match sec.take("seeds") {
            None => SeedRange::single(1),
            Some(e) => SeedRange::parse(&e.value).map_err(|err| Error::Parse {
                line: e.line,
                msg: err.to_string(),
            })?,
        };
        let mode = match sec.take("mode") {
            None => Mode::Both,
            Some(e) => Mode::parse(&e.value).ok_or_else(|| Error::Parse {
                line: e.line,
                msg: format!(
                    "unknown mode `{}` (expected clipped, baseline, or both)",
                    e.value
                ),
            })?,
        };
        let record_states = sec.bool_or("record_states", false)?;
        let out = sec.take("out").map(|e| PathBuf::from(e.value));
        sec.finish()?;
        Ok(RunSection { horizon, stride, delta, seeds, mode, record_states, out })
    }

    fn pairs(&self, out: &mut Vec<(String, String)>) {
        out.push(("run.horizon".into(), self.horizon.to_string()));
        out.push(("run.stride".into(), self.stride.to_string()));
        out.push(("run.delta".into(), self.delta.to_string()));
        out.push(("run.seeds".into(), self.seeds.to_string()));
        out.push(("run.mode".into(), self.mode.label().to_string()));
        out.push(("run.record_states".into(), self.record_states.to_string()));
        if let Some(p) = &self.out {
            out.push(("run.out".into(), p.display().to_string()));
        }
    }
}

/// The full typed experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graph: GraphConfig,
    pub objective: ObjectiveConfig,
    pub noise: NoiseConfig,
    pub schedule: ScheduleConfig,
    pub run: RunSection,
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let mut raw = raw.clone();
        let graph = GraphConfig::from_section(SectionView::new(&mut raw, "graph")?)?;
        let objective = ObjectiveConfig::from_section(SectionView::new(&mut raw, "objective")?)?;
        let noise = NoiseConfig::from_section(SectionView::new(&mut raw, "noise")?)?;
        let schedule = ScheduleConfig::from_section(SectionView::new(&mut raw, "schedule")?)?;
        let run = RunSection::from_section(SectionView::new(&mut raw, "run")?)?;
        if let Some(stray) = raw.sections.first() {
            return Err(Error::Parse {
                line: stray.line,
                msg: format!("unknown section [{}]", stray.name),
            });
        }
        Ok(ExperimentConfig { graph, objective, noise, schedule, run })
    }

    /// Reads a file, applies `section.key=value` overrides, and type-checks.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut raw = RawConfig::parse(&text)?;
        for spec in overrides {
            raw.apply_override(spec)?;
        }
        Self::from_raw(&raw)
    }

    /// Dotted `section.key` / value pairs, in serialization order.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        self.graph.pairs(&mut out);
        self.objective.pairs(&mut out);
        self.noise.pairs(&mut out);
        self.schedule.pairs(&mut out);
        self.run.pairs(&mut out);
        out
    }

    /// Serializes back to config text; `parse` of the output round-trips.
    pub fn to_ini(&self) -> String {
        let mut out = String::new();
        let mut current = String::new();
        for (path, value) in self.pairs() {
            let (section, key) = path.split_once('.').expect("pairs are dotted");
            if section != current {
                if !out.is_empty() {
                    out.push('\n');
                }
                out.push_str(&format!("[{section}]\n"));
                current = section.to_string();
            }
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }
}

/// Everything needed to call the engine, built from a config.
pub struct Experiment {
    pub problem: Problem,
    pub graph: GraphSchedule,
    pub schedule: Schedule,
    pub noise: NoiseModel,
    /// Resolved moment bound `sigma` (auto values are filled in).
    pub sigma: f64,
    pub p: f64,
}

/// Instantiates the simulation objects, wiring the agent count from the
/// graph into the objective and the dimension into the noise bound.
pub fn build_experiment(cfg: &ExperimentConfig) -> Result<Experiment> {
    let graph = cfg.graph.build()?;
    let problem = cfg.objective.build(graph.n())?;
    let schedule = cfg.schedule.build()?;
    let sigma = cfg.noise.resolve_sigma(problem.dim())?;
    Ok(Experiment {
        problem,
        graph,
        schedule,
        noise: cfg.noise.model.clone(),
        sigma,
        p: cfg.noise.p,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# comment
[graph]
kind = switching_ring
n = 6
b = 2
eta = 0.2

[objective]
kind = synthetic
dim = 4
samples_per_agent = 12
heterogeneity = 0.5
ridge = 0.1
data_seed = 7

[noise]
kind = student_t
dof = 2.0
scale = 0.2
p = 1.5
sigma = auto

[schedule]
m = 0.2
b1 = 1
kappa = 0.75
lambda = 2
alpha = 0.25

[run]
horizon = 50
stride = 1
delta = 0.1
seeds = 1..3
mode = both
record_states = false
";

    fn sample() -> ExperimentConfig {
        ExperimentConfig::from_raw(&RawConfig::parse(SAMPLE).unwrap()).unwrap()
    }

    #[test]
    fn sample_config_parses_and_round_trips() {
        let cfg = sample();
        assert_eq!(
            cfg.graph,
            GraphConfig::SwitchingRing { n: 6, b: 2, eta: 0.2 },
            "graph section mismatch"
        );
        assert_eq!(cfg.run.seeds, SeedRange { first: 1, last: 3 });
        let again =
            ExperimentConfig::from_raw(&RawConfig::parse(&cfg.to_ini()).unwrap()).unwrap();
        assert_eq!(cfg, again, "serialize/parse round trip altered the config");
    }

    #[test]
    fn unknown_key_is_rejected_with_its_line() {
        let text = SAMPLE.replace("eta = 0.2", "eta = 0.2\nwat = 3");
        let err = ExperimentConfig::from_raw(&RawConfig::parse(&text).unwrap()).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 7, "the stray key lands on line 7 after the insert");
                assert!(msg.contains("wat"), "message should name the key: {msg}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_number_reports_field_and_line() {
        let text = SAMPLE.replace("dim = 4", "dim = four");
        let err = ExperimentConfig::from_raw(&RawConfig::parse(&text).unwrap()).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 10, "dim sits on line 10 of the sample");
                assert!(msg.contains("objective.dim"), "{msg}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_section_is_reported() {
        let text = SAMPLE.replace("[schedule]", "[sched]");
        let err = ExperimentConfig::from_raw(&RawConfig::parse(&text).unwrap()).unwrap_err();
        assert!(
            err.to_string().contains("[schedule]"),
            "error should name the missing section: {err}"
        );
    }

    #[test]
    fn overrides_replace_and_append() {
        let mut raw = RawConfig::parse(SAMPLE).unwrap();
        raw.apply_override("schedule.lambda=8").unwrap();
        raw.apply_override("run.mode=clipped").unwrap();
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.schedule.lambda, 8.0);
        assert_eq!(cfg.run.mode, Mode::Clipped);
        // A typo'd key is appended raw and then rejected by the typed layer.
        raw.apply_override("schedule.lambada=8").unwrap();
        let err = ExperimentConfig::from_raw(&raw).unwrap_err();
        assert!(err.to_string().contains("lambada"), "{err}");
    }

    #[test]
    fn seed_ranges_parse_both_forms() {
        assert_eq!(SeedRange::parse("7").unwrap(), SeedRange::single(7));
        assert_eq!(SeedRange::parse("2..5").unwrap().list(), vec![2, 3, 4, 5]);
        assert!(SeedRange::parse("5..2").is_err(), "backwards ranges are rejected");
        assert!(SeedRange::parse("x..2").is_err());
    }

    #[test]
    fn auto_sigma_resolves_for_student_t_but_not_pareto() {
        let cfg = sample();
        let sigma = cfg.noise.resolve_sigma(4).unwrap();
        assert!(sigma > 0.0, "closed-form moment bound should be positive");
        let text = SAMPLE.replace("kind = student_t\ndof = 2.0", "kind = pareto\nshape = 2.5");
        let cfg = ExperimentConfig::from_raw(&RawConfig::parse(&text).unwrap()).unwrap();
        assert!(
            cfg.noise.resolve_sigma(4).is_err(),
            "pareto noise has no closed-form bound; auto must be refused"
        );
    }

    #[test]
    fn experiment_builds_from_the_sample() {
        let exp = build_experiment(&sample()).unwrap();
        assert_eq!(exp.problem.n_agents(), 6);
        assert_eq!(exp.problem.dim(), 4);
        assert_eq!(exp.graph.window_b(), 2);
        assert!(exp.sigma > 0.0);
    }

    #[test]
    fn duplicate_keys_and_headerless_keys_are_rejected() {
        let dup = "[run]\nhorizon = 5\nhorizon = 6\n";
        assert!(matches!(RawConfig::parse(dup), Err(Error::Parse { line: 3, .. })));
        let stray = "horizon = 5\n";
        assert!(matches!(RawConfig::parse(stray), Err(Error::Parse { line: 1, .. })));
    }
}
