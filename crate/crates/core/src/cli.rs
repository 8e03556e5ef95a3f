//! Experiment runner behind the `fecoll` binary.
//!
//! A run is fully described by an [`ExperimentConfig`]; the resolved config is
//! echoed into `meta.json` so any run can be repeated exactly.
//!
//! Output files (all in the output directory):
//!
//! | file                    | columns / content                        |
//! |-------------------------|------------------------------------------|
//! | `errors.csv`            | `N,max_error`                            |
//! | `spectrum_N{N}.csv`     | `i,sigma_raw,sigma_normalized`           |
//! | `coefficients_N{N}.csv` | `l1,l2,re,im`                            |
//! | `nodes.csv`             | `x,y,kind`                               |
//! | `meta.json`             | format version, config echo, per-N records |

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::extension::{self, FitRecord};
use crate::frames::{eval_matrix, linear_index, DerivOrder, FrameSpec};
use crate::geometry::{boundary_nodes, catalog, corner_refine, Domain};
use crate::linalg::{plunge_region_size, tsvd_solve, write_spectrum_csv, TsvdReport};
use crate::nodes::{write_nodes_csv, GridSpec, NodeMetadata, NodeSet, OversamplingReport};
use crate::pde::{self, BoundaryPolicy, InteriorNodes};
use crate::presets::{function_preset, pde_preset, FunctionPreset, PdePreset};
use crate::{Approximant, Error};

/// Version stamped into `meta.json`; covers the layout of every output file.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure at N = {n}: {source}")]
    Numerical { n: usize, source: Error },
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Approx,
    Solve,
    Nodes,
    Spectrum,
}

fn default_t() -> f64 {
    2.0
}
fn default_eps() -> f64 {
    1e-14
}
fn default_seed() -> u64 {
    1
}
fn default_density() -> usize {
    extension::DEFAULT_EVAL_DENSITY
}
fn default_max_n() -> usize {
    60
}
fn default_radius() -> f64 {
    0.1
}

/// Parameters of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Per-axis frame sizes, ascending.
    #[serde(rename = "N")]
    pub n_list: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "T", default = "default_t")]
    pub t: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Boundary policy, e.g. `linear:5`, `log:20`, `square:4:4`, `explicit:120`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_density")]
    pub eval_density: usize,
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    #[serde(default)]
    pub corner_extra: usize,
    #[serde(default = "default_radius")]
    pub corner_radius: f64,
    #[serde(default)]
    pub spectra: bool,
    #[serde(default)]
    pub coefficients: bool,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn new(command: Command, n_list: Vec<usize>, out: PathBuf) -> Self {
        Self {
            command,
            domain: None,
            function: None,
            preset: None,
            n_list,
            gamma: None,
            t: default_t(),
            eps: default_eps(),
            boundary: None,
            seed: default_seed(),
            eval_density: default_density(),
            max_n: default_max_n(),
            corner_extra: 0,
            corner_radius: default_radius(),
            spectra: false,
            coefficients: false,
            out,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Overlays the keys of a TOML config file on top of `self`.
    pub fn overlay_toml(&self, text: &str) -> Result<Self, CliError> {
        let file: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))?;
        let mut base = toml::Table::try_from(self).map_err(|e| CliError::Config(e.to_string()))?;
        base.extend(file);
        base.try_into().map_err(|e: toml::de::Error| CliError::Config(format!("config file: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n_list.is_empty() {
            return bad("N list is empty".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("N list {:?} must be strictly ascending", self.n_list));
        }
        if self.n_list[0] == 0 {
            return bad("N must be at least 1".into());
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n > self.max_n) {
            return bad(format!("N = {n} exceeds max-N = {}", self.max_n));
        }
        if !(self.t > 1.0 && self.t.is_finite()) {
            return bad(format!("T = {} must exceed 1", self.t));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps = {} must lie in (0, 1)", self.eps));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return bad(format!("gamma = {g} must be positive"));
            }
        }
        if self.eval_density < 1 {
            return bad("eval_density must be at least 1".into());
        }
        if !(self.corner_radius > 0.0) {
            return bad("corner_radius must be positive".into());
        }
        if let Some(b) = &self.boundary {
            BoundaryPolicy::from_str(b).map_err(CliError::Config)?;
        }
        if self.preset.is_some() && self.function.is_some() {
            return bad("give either a PDE preset or a function, not both".into());
        }
        if let Some(p) = &self.preset {
            if pde_preset(p).is_none() {
                return bad(format!("unknown preset `{p}`; expected example1..example7"));
            }
        }
        if let Some(f) = &self.function {
            if function_preset(f).is_none() {
                return bad(format!("unknown function `{f}`; expected f1..f4"));
            }
        }
        if let Some(d) = &self.domain {
            catalog(d).map_err(|e| CliError::Config(e.to_string()))?;
        }
        match self.command {
            Command::Solve if self.preset.is_none() => bad("solve needs --preset".into()),
            Command::Approx if self.preset.is_some() => bad("approx takes --function, not --preset".into()),
            Command::Nodes if self.n_list.len() != 1 => bad("nodes takes a single N".into()),
            _ => Ok(()),
        }
    }
}

/// Parses `start:step:stop`, a comma list, or a single value.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, String> {
    let num = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("`{v}` is not a valid N"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(num).collect(),
        3 => {
            let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
            if step == 0 || stop < start {
                return Err(format!("invalid sweep `{s}`"));
            }
            Ok((start..=stop).step_by(step).collect())
        }
        _ => Err(format!("expected start:step:stop, got `{s}`")),
    }
}

/// One row of a PDE sweep in `meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub example_id: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_B_policy")]
    pub n_b_policy: String,
    pub counts: OversamplingReport,
    pub max_error: Option<f64>,
    pub cond: f64,
    pub rank_eps: usize,
    pub singular_values_file: Option<String>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank_eps: usize,
    pub cond: f64,
    pub plunge_region: usize,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub format_version: u32,
    pub tool: String,
    pub config: ExperimentConfig,
    /// Output file name -> CSV header (or "json").
    pub files: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub approx: Vec<FitRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub solve: Vec<SolveRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectrum: Vec<SpectrumRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<NodeMetadata>,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub metadata: Metadata,
    pub errors: Vec<(usize, f64)>,
}

fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let io_err = |source| CliError::Io { path: path.clone(), source };
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, &path).map_err(io_err)
}

fn csv_bytes<F: FnOnce(&mut Vec<u8>) -> io::Result<()>>(f: F) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn errors_csv(errors: &[(usize, f64)]) -> Vec<u8> {
    csv_bytes(|buf| {
        writeln!(buf, "N,max_error")?;
        for (n, e) in errors {
            writeln!(buf, "{n},{e:.16e}")?;
        }
        Ok(())
    })
}

fn coefficients_csv(ap: &Approximant) -> Vec<u8> {
    csv_bytes(|buf| {
        writeln!(buf, "l1,l2,re,im")?;
        for (l, c) in linear_index(ap.spec()).iter().zip(ap.rescaled_coefficients()) {
            writeln!(buf, "{},{},{:.16e},{:.16e}", l.l1, l.l2, c.re, c.im)?;
        }
        Ok(())
    })
}

fn spectrum_csv(report: &TsvdReport) -> Vec<u8> {
    csv_bytes(|buf| write_spectrum_csv(buf, report))
}

struct Run<'a> {
    config: &'a ExperimentConfig,
    files: BTreeMap<String, String>,
}

impl Run<'_> {
    fn emit(&mut self, name: String, header: &str, contents: &[u8]) -> Result<(), CliError> {
        write_atomic(&self.config.out, &name, contents)?;
        self.files.insert(name, header.to_string());
        Ok(())
    }

    fn spec(&self, n: usize) -> Result<FrameSpec, CliError> {
        FrameSpec::new(n, self.config.t, self.config.eps).map_err(|e| CliError::Numerical { n, source: e.into() })
    }

    fn policy(&self, fallback: Option<BoundaryPolicy>) -> Option<BoundaryPolicy> {
        match &self.config.boundary {
            Some(s) => Some(s.parse().expect("validated")),
            None => fallback,
        }
    }

    fn function(&self) -> Result<(FunctionPreset, Domain), CliError> {
        let f = function_preset(self.config.function.as_deref().unwrap_or("f4")).expect("validated");
        let domain = catalog(self.config.domain.as_deref().unwrap_or(f.default_domain)).expect("validated");
        Ok((f, domain))
    }

    fn preset(&self) -> Result<(PdePreset, pde::PdeProblem), CliError> {
        let preset = pde_preset(self.config.preset.as_deref().expect("validated")).expect("validated");
        let problem = preset.problem().map_err(|e| CliError::Config(e.to_string()))?;
        if self.config.domain.as_deref().is_some_and(|d| d != preset.domain) {
            return Err(CliError::Config(format!("preset {} is defined on {}", preset.id, preset.domain)));
        }
        Ok((preset, problem))
    }

    /// Approximation node set: grid interior plus optional boundary and corner nodes.
    fn approx_nodes(&self, domain: &Domain, spec: &FrameSpec) -> Result<NodeSet, Error> {
        let grid = GridSpec::from_gamma(spec.size(), self.config.gamma.unwrap_or(extension::DEFAULT_GAMMA), spec.half_width())?;
        let mut nodes = NodeSet::from_grid(domain, &grid);
        let mut boundary = match self.policy(None) {
            Some(p) => boundary_nodes(domain, p.count(spec.size(), spec.len()))?,
            None => Vec::new(),
        };
        if self.config.corner_extra > 0 {
            boundary = corner_refine(&boundary, domain, self.config.corner_extra, self.config.corner_radius);
        }
        nodes.boundary = boundary;
        Ok(nodes)
    }

    fn approx(&mut self) -> Result<RunSummary, CliError> {
        let (f, domain) = self.function()?;
        let field = f.field();
        let mut records = Vec::new();
        let mut errors = Vec::new();
        for &n in &self.config.n_list {
            let start = Instant::now();
            let spec = self.spec(n)?;
            let numerical = |source| CliError::Numerical { n, source };
            let nodes = self.approx_nodes(&domain, &spec).map_err(numerical)?;
            let ap = extension::fit_on_nodes(&field, &nodes, &spec).map_err(numerical)?;
            let err = extension::max_error(&ap, &field, &domain, self.config.eval_density).map_err(numerical)?;
            let report = ap.fit_report().expect("fitted").clone();
            if self.config.spectra {
                self.emit(format!("spectrum_N{n}.csv"), "i,sigma_raw,sigma_normalized", &spectrum_csv(&report))?;
            }
            if self.config.coefficients {
                self.emit(format!("coefficients_N{n}.csv"), "l1,l2,re,im", &coefficients_csv(&ap))?;
            }
            errors.push((n, err));
            records.push(FitRecord {
                domain: domain.name().into(),
                n,
                n_lambda: spec.len(),
                n_omega: nodes.n_total(),
                gamma: nodes.grid().and_then(|g| g.gamma),
                t: spec.half_width(),
                eps: spec.tolerance(),
                max_error: err,
                rank_eps: report.rank_eps,
                cond: report.cond,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            });
            eprintln!("approx {} on {}: N = {n}, max error {err:.3e}", f.id, domain.name());
        }
        self.emit("errors.csv".into(), "N,max_error", &errors_csv(&errors))?;
        let mut meta = self.metadata();
        meta.approx = records;
        Ok(RunSummary { metadata: meta, errors })
    }

    fn solve(&mut self) -> Result<RunSummary, CliError> {
        let (preset, problem) = self.preset()?;
        let policy = self.policy(Some(preset.policy)).expect("fallback given");
        let mut records = Vec::new();
        let mut errors = Vec::new();
        for &n in &self.config.n_list {
            let start = Instant::now();
            let spec = self.spec(n)?;
            let numerical = |source| CliError::Numerical { n, source };
            let interior = preset.interior.nodes(&spec, self.config.gamma, self.config.seed).map_err(numerical)?;
            let sol = pde::solve(&problem, &spec, policy, interior).map_err(numerical)?;
            let err = sol.max_error.expect("presets carry exact solutions");
            let sv_file = if self.config.spectra {
                let name = format!("spectrum_N{n}.csv");
                self.emit(name.clone(), "i,sigma_raw,sigma_normalized", &spectrum_csv(&sol.report))?;
                Some(name)
            } else {
                None
            };
            if self.config.coefficients {
                self.emit(format!("coefficients_N{n}.csv"), "l1,l2,re,im", &coefficients_csv(&sol.approximant))?;
            }
            errors.push((n, err));
            records.push(SolveRecord {
                example_id: preset.id.into(),
                n,
                n_b_policy: policy.to_string(),
                counts: crate::nodes::oversampling_report(&sol.nodes, &spec),
                max_error: sol.max_error,
                cond: sol.report.cond,
                rank_eps: sol.report.rank_eps,
                singular_values_file: sv_file,
                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
            });
            eprintln!("solve {}: N = {n}, N_B = {}, max error {err:.3e}", preset.id, sol.nodes.n_boundary());
        }
        self.emit("errors.csv".into(), "N,max_error", &errors_csv(&errors))?;
        let mut meta = self.metadata();
        meta.solve = records;
        Ok(RunSummary { metadata: meta, errors })
    }

    fn nodes(&mut self) -> Result<RunSummary, CliError> {
        let n = self.config.n_list[0];
        let spec = self.spec(n)?;
        let numerical = |source| CliError::Numerical { n, source };
        let nodes = if self.config.preset.is_some() {
            let (preset, problem) = self.preset()?;
            let policy = self.policy(Some(preset.policy)).expect("fallback given");
            let base = match preset.interior.nodes(&spec, self.config.gamma, self.config.seed).map_err(numerical)? {
                InteriorNodes::Grid(g) => NodeSet::from_grid(&problem.domain, &g),
                InteriorNodes::Random { count, seed } => NodeSet::random(&problem.domain, count, seed).map_err(numerical)?,
            };
            let boundary = boundary_nodes(&problem.domain, policy.count(spec.size(), spec.len()))
                .map_err(|e| numerical(e.into()))?;
            base.with_boundary(boundary)
        } else {
            let domain = catalog(self.config.domain.as_deref().unwrap_or("diamond")).expect("validated");
            self.approx_nodes(&domain, &spec).map_err(numerical)?
        };
        self.emit("nodes.csv".into(), "x,y,kind", &csv_bytes(|b| write_nodes_csv(b, &nodes)))?;
        let node_meta = nodes.metadata(&spec);
        eprintln!(
            "nodes: N = {n}, N_I = {}, N_B = {}, ratio {:.4}",
            nodes.n_interior(),
            nodes.n_boundary(),
            node_meta.counts.total_ratio
        );
        let mut meta = self.metadata();
        meta.nodes = Some(node_meta);
        Ok(RunSummary { metadata: meta, errors: Vec::new() })
    }

    fn spectrum(&mut self) -> Result<RunSummary, CliError> {
        let mut records = Vec::new();
        for &n in &self.config.n_list {
            let spec = self.spec(n)?;
            let numerical = |source| CliError::Numerical { n, source };
            let (matrix, rhs) = if self.config.preset.is_some() {
                let (preset, problem) = self.preset()?;
                let policy = self.policy(Some(preset.policy)).expect("fallback given");
                let base = match preset.interior.nodes(&spec, self.config.gamma, self.config.seed).map_err(numerical)? {
                    InteriorNodes::Grid(g) => NodeSet::from_grid(&problem.domain, &g),
                    InteriorNodes::Random { count, seed } => NodeSet::random(&problem.domain, count, seed).map_err(numerical)?,
                };
                let boundary = boundary_nodes(&problem.domain, policy.count(spec.size(), spec.len()))
                    .map_err(|e| numerical(e.into()))?;
                pde::assemble(&problem, &base.with_boundary(boundary), &spec).map_err(numerical)?
            } else {
                let (f, domain) = self.function()?;
                let nodes = self.approx_nodes(&domain, &spec).map_err(numerical)?;
                nodes.ensure_oversampled(&spec).map_err(numerical)?;
                let n_r = nodes.grid().map_or(nodes.n_total(), |g| g.len());
                let pts: Vec<_> = nodes.interior.iter().chain(&nodes.boundary).copied().collect();
                (eval_matrix(&spec, &pts, DerivOrder::Value, 1.0 / (n_r as f64).sqrt()), f.field().sample(&pts))
            };
            let (_, report) = tsvd_solve(matrix.as_ref(), &rhs, spec.tolerance()).map_err(|e| numerical(e.into()))?;
            let file = format!("spectrum_N{n}.csv");
            self.emit(file.clone(), "i,sigma_raw,sigma_normalized", &spectrum_csv(&report))?;
            records.push(SpectrumRecord {
                n,
                rows: report.rows,
                cols: report.cols,
                rank_eps: report.rank_eps,
                cond: report.cond,
                plunge_region: plunge_region_size(&report, spec.tolerance()),
                file,
            });
            eprintln!("spectrum: N = {n}, rank {} of {}, cond {:.3e}", report.rank_eps, report.cols, report.cond);
        }
        let mut meta = self.metadata();
        meta.spectrum = records;
        Ok(RunSummary { metadata: meta, errors: Vec::new() })
    }

    fn metadata(&self) -> Metadata {
        Metadata {
            format_version: FORMAT_VERSION,
            tool: "fecoll".into(),
            config: self.config.clone(),
            files: self.files.clone(),
            approx: Vec::new(),
            solve: Vec::new(),
            spectrum: Vec::new(),
            nodes: None,
        }
    }
}

/// Validates `config`, runs it, and writes all artifacts plus `meta.json`.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, CliError> {
    config.validate()?;
    fs::create_dir_all(&config.out).map_err(|source| CliError::Io { path: config.out.clone(), source })?;
    let mut run = Run { config, files: BTreeMap::new() };
    let mut summary = match config.command {
        Command::Approx => run.approx(),
        Command::Solve => run.solve(),
        Command::Nodes => run.nodes(),
        Command::Spectrum => run.spectrum(),
    }?;
    summary.metadata.files = run.files.clone();
    summary.metadata.files.insert("meta.json".into(), "json".into());
    let json = serde_json::to_vec_pretty(&summary.metadata).expect("metadata serializes");
    write_atomic(&config.out, "meta.json", &json)?;
    Ok(summary)
}
