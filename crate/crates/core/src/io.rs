//! Configuration files and run outputs.
//!
//! Every float written to CSV uses 17 significant digits so values read
//! back bit-identical. A run directory holds `ecdf.csv`, `hist.csv`,
//! `probes.csv` (when probe points are configured), `summary.json`, and a
//! `manifest.json` listing the SHA-256 digest of every other file.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::Utc;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::election::TieBreakRule;
use crate::engine::{
    aggregate, ecdf_grid, run_experiment, KShare, SimulationConfig, Trajectory, CENTER_BAND,
    HIST_BINS, INNER_BAND,
};
use crate::error::{Error, Result};
use crate::rng::trial_key;
use crate::theory::{cdf_bound, fixed_points, Bound, FixedPoint, IteratedMap};

pub const ECDF_FILE: &str = "ecdf.csv";
pub const HIST_FILE: &str = "hist.csv";
pub const PROBES_FILE: &str = "probes.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const BOUNDS_FILE: &str = "bounds.csv";
pub const HEATMAP_FILE: &str = "heatmap.csv";

/// Current UTC time in RFC 3339 form, as recorded in manifests.
pub fn timestamp() -> String {
    Utc::now().to_rfc3339()
}

/// Lossless float formatting for CSV cells.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Command-line values that replace entries of a config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub k: Option<usize>,
    pub generations: Option<usize>,
    pub elections: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub symmetry: Option<bool>,
    pub epsilon: Option<f64>,
    pub perturbation_variance: Option<f64>,
    pub memory: Option<usize>,
    pub top_h: Option<usize>,
    pub rule: Option<TieBreakRule>,
    pub probes: Option<Vec<f64>>,
}

fn int(name: &'static str, v: u64) -> Result<toml::Value> {
    i64::try_from(v)
        .map(toml::Value::Integer)
        .map_err(|_| Error::param(name, format!("{v} does not fit a signed 64-bit integer")))
}

impl ConfigOverrides {
    fn apply(&self, table: &mut toml::Table) -> Result<()> {
        use toml::Value;
        if let Some(k) = self.k {
            table.remove("k_counts");
            table.insert("k".into(), int("k", k as u64)?);
        }
        let ints = [
            ("generations", self.generations),
            ("elections", self.elections),
            ("trials", self.trials),
            ("memory", self.memory),
            ("top_h", self.top_h),
        ];
        for (name, v) in ints {
            if let Some(v) = v {
                table.insert(name.into(), int(name, v as u64)?);
            }
        }
        if let Some(seed) = self.seed {
            table.insert("seed".into(), int("seed", seed)?);
        }
        if let Some(s) = self.symmetry {
            table.insert("symmetry".into(), Value::Boolean(s));
        }
        if let Some(e) = self.epsilon {
            table.insert("epsilon".into(), Value::Float(e));
        }
        if let Some(s) = self.perturbation_variance {
            table.insert("perturbation_variance".into(), Value::Float(s));
        }
        if let Some(rule) = self.rule {
            let name = match rule {
                TieBreakRule::LeftRight => "left-right",
                TieBreakRule::EqualSplit => "equal-split",
            };
            table.insert("rule".into(), Value::String(name.into()));
        }
        if let Some(p) = &self.probes {
            table.insert(
                "probes".into(),
                Value::Array(p.iter().map(|&x| Value::Float(x)).collect()),
            );
        }
        Ok(())
    }
}

fn from_table(table: toml::Table) -> Result<SimulationConfig> {
    let cfg: SimulationConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses and validates a TOML config.
pub fn parse_config_str(text: &str) -> Result<SimulationConfig> {
    parse_config_with(text, &ConfigOverrides::default())
}

fn parse_config_with(text: &str, overrides: &ConfigOverrides) -> Result<SimulationConfig> {
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    overrides.apply(&mut table)?;
    from_table(table)
}

/// Reads an optional config file and applies flag overrides on top.
pub fn parse_config(path: Option<&Path>, overrides: &ConfigOverrides) -> Result<SimulationConfig> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    parse_config_with(&text, overrides)
}

/// TOML text that parses back to `cfg`.
pub fn config_to_toml(cfg: &SimulationConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Provenance record written next to every output set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SimulationConfig>,
    pub master_seed: u64,
    pub trial_seeds: Vec<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub files: Vec<FileDigest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, master_seed: u64, trials: usize) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: None,
            master_seed,
            trial_seeds: (0..trials as u64).map(|t| trial_key(master_seed, t)).collect(),
            started_at: timestamp(),
            finished_at: String::new(),
            files: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Writes `contents` into `dir/name` and records its digest.
    pub fn write_file(&mut self, dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileDigest {
            name: name.to_string(),
            bytes: contents.len() as u64,
            sha256: hex::encode(Sha256::digest(contents)),
        });
        Ok(())
    }

    /// Stamps the finish time and writes `manifest.json`.
    pub fn finish(mut self, dir: &Path) -> Result<RunManifest> {
        self.finished_at = timestamp();
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(self)
    }

    pub fn read(dir: &Path) -> Result<RunManifest> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn digest(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.sha256.as_str())
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

#[derive(Serialize)]
struct GenerationEntry {
    t: usize,
    n: usize,
    center_mass: f64,
    inner_mass: f64,
    atom_mass: f64,
    modes: Vec<f64>,
    interval_masses: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct AggregateEntry {
    t: usize,
    trials: usize,
    mean_center_mass: f64,
    mean_inner_mass: f64,
    modes: Vec<f64>,
}

#[derive(Serialize)]
struct TrialEntry {
    trial: usize,
    generations: Vec<GenerationEntry>,
}

#[derive(Serialize)]
struct Summary {
    center_band: (f64, f64),
    inner_band: (f64, f64),
    trials: Vec<TrialEntry>,
    aggregate: Vec<AggregateEntry>,
}

fn band_name(lo: f64, hi: f64, open: bool) -> String {
    if open {
        format!("({lo}, {hi})")
    } else {
        format!("[{lo}, {hi}]")
    }
}

/// Writes a run directory for `trajectories`, all from the same config.
pub fn emit_trajectory(
    trajectories: &[Trajectory],
    out_dir: &Path,
    started_at: Option<String>,
) -> Result<RunManifest> {
    let cfg = trajectories
        .first()
        .map(|t| t.config.clone())
        .ok_or_else(|| Error::Config("no trajectories to write".into()))?;
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("run", cfg.seed, cfg.trials);
    if let Some(s) = started_at {
        manifest.started_at = s;
    }

    let grid: Vec<String> = ecdf_grid().map(fmt_f64).collect();
    let mut ecdf = String::from("trial,t,grid_x,ecdf_value\n");
    let mut hist = String::from("trial,t,bin_left,count\n");
    let mut probes = String::from("trial,t,x,ecdf_value\n");
    let bin_left: Vec<String> = (0..HIST_BINS).map(|b| fmt_f64(b as f64 / HIST_BINS as f64)).collect();
    for tr in trajectories {
        for rec in &tr.records {
            let s = &rec.summary;
            for (x, v) in grid.iter().zip(&s.ecdf) {
                let _ = writeln!(ecdf, "{},{},{},{}", tr.trial, s.t, x, fmt_f64(*v));
            }
            for (left, c) in bin_left.iter().zip(&s.histogram) {
                let _ = writeln!(hist, "{},{},{},{}", tr.trial, s.t, left, c);
            }
            for &(x, v) in &s.probes {
                let _ = writeln!(probes, "{},{},{},{}", tr.trial, s.t, fmt_f64(x), fmt_f64(v));
            }
        }
    }
    manifest.write_file(out_dir, ECDF_FILE, ecdf.as_bytes())?;
    manifest.write_file(out_dir, HIST_FILE, hist.as_bytes())?;
    if !cfg.probes.is_empty() {
        manifest.write_file(out_dir, PROBES_FILE, probes.as_bytes())?;
    }

    let center = band_name(CENTER_BAND.0, CENTER_BAND.1, true);
    let inner = band_name(INNER_BAND.0, INNER_BAND.1, false);
    let summary = Summary {
        center_band: CENTER_BAND,
        inner_band: INNER_BAND,
        trials: trajectories
            .iter()
            .map(|tr| TrialEntry {
                trial: tr.trial,
                generations: tr
                    .records
                    .iter()
                    .map(|r| {
                        let s = &r.summary;
                        GenerationEntry {
                            t: s.t,
                            n: s.n,
                            center_mass: s.center_mass,
                            inner_mass: s.inner_mass,
                            atom_mass: s.atom_mass,
                            modes: s.modes(),
                            interval_masses: BTreeMap::from([
                                (center.clone(), s.center_mass),
                                (inner.clone(), s.inner_mass),
                            ]),
                        }
                    })
                    .collect(),
            })
            .collect(),
        aggregate: aggregate(trajectories)
            .iter()
            .map(|a| AggregateEntry {
                t: a.t,
                trials: a.trials,
                mean_center_mass: a.mean_center_mass,
                mean_inner_mass: a.mean_inner_mass,
                modes: a.modes(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))?;
    manifest.write_file(out_dir, SUMMARY_FILE, (json + "\n").as_bytes())?;
    manifest.config = Some(cfg);
    manifest.finish(out_dir)
}

/// Per-trial ECDF values indexed by generation and evaluation point.
#[derive(Clone, Debug, Default)]
pub struct EcdfTable {
    // (t, x bits) -> trial -> value; a probe on the grid lands on one entry
    values: BTreeMap<(usize, u64), BTreeMap<usize, f64>>,
}

impl EcdfTable {
    pub fn from_trajectories(trajectories: &[Trajectory]) -> Self {
        let mut table = EcdfTable::default();
        for tr in trajectories {
            for rec in &tr.records {
                let s = &rec.summary;
                for (x, &v) in ecdf_grid().zip(&s.ecdf) {
                    table.insert(tr.trial, s.t, x, v);
                }
                for &(x, v) in &s.probes {
                    table.insert(tr.trial, s.t, x, v);
                }
            }
        }
        table
    }

    /// Loads `ecdf.csv` and, if present, `probes.csv` from a run directory.
    pub fn read(dir: &Path) -> Result<Self> {
        let mut table = EcdfTable::default();
        for name in [ECDF_FILE, PROBES_FILE] {
            let path = dir.join(name);
            if name == PROBES_FILE && !path.exists() {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            for (line_no, line) in text.lines().enumerate().skip(1) {
                let bad = || Error::Config(format!("{}:{}: malformed row", path.display(), line_no + 1));
                let cols: Vec<&str> = line.split(',').collect();
                if cols.len() != 4 {
                    return Err(bad());
                }
                let trial: usize = cols[0].parse().map_err(|_| bad())?;
                let t: usize = cols[1].parse().map_err(|_| bad())?;
                let x: f64 = cols[2].parse().map_err(|_| bad())?;
                let v: f64 = cols[3].parse().map_err(|_| bad())?;
                table.insert(trial, t, x, v);
            }
        }
        Ok(table)
    }

    fn insert(&mut self, trial: usize, t: usize, x: f64, v: f64) {
        self.values.entry((t, x.to_bits())).or_default().insert(trial, v);
    }

    /// Values across trials at generation `t`, point `x`.
    pub fn values(&self, t: usize, x: f64) -> Option<Vec<f64>> {
        self.values.get(&(t, x.to_bits())).map(|m| m.values().copied().collect())
    }

    pub fn mean(&self, t: usize, x: f64) -> Option<f64> {
        self.values(t, x).map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn max_t(&self) -> Option<usize> {
        self.values.keys().map(|&(t, _)| t).max()
    }
}

/// The family of bounds the `bounds` command can tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    K2Exact,
    K3Upper,
    K4Upper,
    K2NoisyLimit,
    K3NoisyLimit,
    K4NoisyLimit,
}

impl BoundKind {
    pub fn k(self) -> usize {
        match self {
            BoundKind::K2Exact | BoundKind::K2NoisyLimit => 2,
            BoundKind::K3Upper | BoundKind::K3NoisyLimit => 3,
            BoundKind::K4Upper | BoundKind::K4NoisyLimit => 4,
        }
    }

    pub fn is_noisy(self) -> bool {
        matches!(self, BoundKind::K2NoisyLimit | BoundKind::K3NoisyLimit | BoundKind::K4NoisyLimit)
    }

    pub fn bound(self, x: f64, t: usize, epsilon: f64) -> Result<Bound> {
        let t = u32::try_from(t).map_err(|_| Error::param("t", "generation index too large"))?;
        Ok(match self {
            BoundKind::K2Exact => Bound::K2Exact { x, t },
            BoundKind::K3Upper => Bound::K3Upper { x, t },
            BoundKind::K4Upper => Bound::K4Upper { x, t },
            BoundKind::K2NoisyLimit => Bound::K2NoisyLimit { x, epsilon },
            BoundKind::K3NoisyLimit => Bound::K3NoisyLimit { epsilon },
            BoundKind::K4NoisyLimit => Bound::K4NoisyLimit { x, epsilon },
        })
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "k2-exact" => BoundKind::K2Exact,
            "k3-upper" => BoundKind::K3Upper,
            "k4-upper" => BoundKind::K4Upper,
            "k2-noisy-limit" => BoundKind::K2NoisyLimit,
            "k3-noisy-limit" => BoundKind::K3NoisyLimit,
            "k4-noisy-limit" => BoundKind::K4NoisyLimit,
            _ => return Err(Error::param("kind", format!("unknown bound kind `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub t: usize,
    pub x: f64,
    pub empirical_ecdf_mean: f64,
    pub bound_value: f64,
    pub satisfied: bool,
}

/// Standard errors of slack allowed when checking a bound.
pub const BOUND_SLACK_SE: f64 = 4.0;

/// Compares a run's ECDF with a bound at every generation and point.
///
/// Exact values must agree within the slack; upper bounds must not be
/// exceeded by more than it. The standard error is binomial over all
/// elections of all trials at that generation.
pub fn bounds_table(
    cfg: &SimulationConfig,
    table: &EcdfTable,
    kind: BoundKind,
    xs: &[f64],
) -> Result<Vec<BoundRow>> {
    if cfg.k != Some(kind.k()) {
        return Err(Error::Config(format!(
            "bound {kind:?} describes k = {} but the run used {}",
            kind.k(),
            cfg.k.map_or_else(|| "a mixture of counts".to_string(), |k| format!("k = {k}")),
        )));
    }
    if kind.is_noisy() != (cfg.epsilon > 0.0) {
        return Err(Error::Config(format!(
            "bound {kind:?} needs a run {} uniform noise",
            if kind.is_noisy() { "with" } else { "without" }
        )));
    }
    let max_t = table.max_t().ok_or_else(|| Error::Config("run has no ECDF rows".into()))?;
    let mut rows = Vec::new();
    for t in 0..=max_t {
        for &x in xs {
            let values = table.values(t, x).ok_or_else(|| {
                Error::Config(format!("ECDF at x = {x} was not recorded; add it to `probes`"))
            })?;
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let bound = cdf_bound(&kind.bound(x, t, cfg.epsilon)?, &cfg.initial)?;
            let n = (cfg.elections * values.len()) as f64;
            let var = (bound * (1.0 - bound)).max(mean * (1.0 - mean));
            let slack = BOUND_SLACK_SE * (var / n).sqrt();
            let satisfied = if matches!(kind, BoundKind::K2Exact | BoundKind::K2NoisyLimit) {
                (mean - bound).abs() <= slack
            } else {
                mean <= bound + slack
            };
            rows.push(BoundRow {
                t,
                x,
                empirical_ecdf_mean: mean,
                bound_value: bound,
                satisfied,
            });
        }
    }
    Ok(rows)
}

pub fn bounds_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("t,x,empirical_ecdf_mean,bound_value,satisfied\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.t,
            fmt_f64(r.x),
            fmt_f64(r.empirical_ecdf_mean),
            fmt_f64(r.bound_value),
            r.satisfied
        );
    }
    out
}

/// Reads a run directory and writes `bounds.csv` into `out_dir`.
pub fn bounds_command(run_dir: &Path, kind: BoundKind, xs: &[f64], out_dir: &Path) -> Result<Vec<BoundRow>> {
    let run = RunManifest::read(run_dir)?;
    let cfg = run
        .config
        .ok_or_else(|| Error::Config(format!("{} has no config echo", run_dir.display())))?;
    let rows = bounds_table(&cfg, &EcdfTable::read(run_dir)?, kind, xs)?;
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("bounds", cfg.seed, cfg.trials);
    manifest.notes.push(format!("bound {kind:?} over run {}", run_dir.display()));
    manifest.write_file(out_dir, BOUNDS_FILE, bounds_csv(&rows).as_bytes())?;
    manifest.config = Some(cfg);
    manifest.finish(out_dir)?;
    Ok(rows)
}

/// Settings for the mixture heatmap over shares of 3-, 4- and 5-candidate
/// elections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapSpec {
    /// Grid step is `1 / resolution` on both axes.
    pub resolution: usize,
    pub generations: usize,
    pub elections: usize,
    pub trials: usize,
    pub seed: u64,
    pub symmetry: bool,
}

impl Default for HeatmapSpec {
    fn default() -> Self {
        HeatmapSpec {
            resolution: 10,
            generations: 100,
            elections: 100_000,
            trials: 1,
            seed: 0,
            symmetry: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatmapRow {
    pub fraction_k3: f64,
    pub fraction_k4: f64,
    pub fraction_k5: f64,
    pub seed: u64,
    pub mode: f64,
}

/// Centre of the fullest histogram bin, folded into `[0, 1/2]`.
pub fn folded_peak(histogram: &[u64]) -> f64 {
    let mut best = 0;
    for (i, &c) in histogram.iter().enumerate() {
        if c > histogram[best] {
            best = i;
        }
    }
    let centre = (best as f64 + 0.5) / histogram.len() as f64;
    centre.min(1.0 - centre)
}

/// Runs one mixture cell and reports the folded mode of the pooled final
/// histogram. Errors if the shares leave no room for the third count.
pub fn heatmap_cell(f3: f64, f4: f64, spec: &HeatmapSpec, seed: u64) -> Result<HeatmapRow> {
    let f5 = 1.0 - f3 - f4;
    if f3 < 0.0 || f4 < 0.0 || f5 < -1e-12 {
        return Err(Error::param("fractions", format!("({f3}, {f4}) leaves remainder {f5}")));
    }
    let f5 = f5.max(0.0);
    let mut cfg = SimulationConfig::new(3, spec.generations, spec.elections);
    cfg.k = None;
    cfg.k_counts = [(3, f3), (4, f4), (5, f5)]
        .into_iter()
        .filter(|&(_, p)| p > 0.0)
        .map(|(k, p)| KShare { k, p })
        .collect();
    cfg.trials = spec.trials;
    cfg.seed = seed;
    cfg.symmetry = spec.symmetry;
    let runs = run_experiment(&cfg)?;
    let last = aggregate(&runs).pop().ok_or(Error::EmptyPool)?;
    Ok(HeatmapRow {
        fraction_k3: f3,
        fraction_k4: f4,
        fraction_k5: f5,
        seed,
        mode: folded_peak(&last.pooled_histogram),
    })
}

pub fn heatmap_csv(rows: &[HeatmapRow]) -> String {
    let mut out = String::from("fraction_k3,fraction_k4,fraction_k5,seed,mode\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(r.fraction_k3),
            fmt_f64(r.fraction_k4),
            fmt_f64(r.fraction_k5),
            r.seed,
            fmt_f64(r.mode)
        );
    }
    out
}

/// Runs every grid cell, writes `heatmap.csv` and a manifest. Cell `c` in
/// row-major order uses seed `spec.seed + c`; cells whose shares would
/// leave a negative remainder are skipped and noted in the manifest.
pub fn heatmap_command(spec: &HeatmapSpec, out_dir: &Path) -> Result<Vec<HeatmapRow>> {
    if spec.resolution == 0 {
        return Err(Error::param("resolution", "must be positive"));
    }
    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("heatmap", spec.seed, spec.trials);
    let r = spec.resolution;
    let mut rows = Vec::new();
    for i in 0..=r {
        for j in 0..=r {
            let seed = spec.seed.wrapping_add((i * (r + 1) + j) as u64);
            let (f3, f4) = (i as f64 / r as f64, j as f64 / r as f64);
            if i + j > r {
                manifest.notes.push(format!("skipped cell ({f3}, {f4}): shares exceed 1"));
                continue;
            }
            rows.push(heatmap_cell(f3, f4, spec, seed)?);
        }
    }
    manifest.write_file(out_dir, HEATMAP_FILE, heatmap_csv(&rows).as_bytes())?;
    manifest.notes.push(format!(
        "spec: {}",
        serde_json::to_string(spec).map_err(|e| Error::Config(e.to_string()))?
    ));
    manifest.finish(out_dir)?;
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    pub p0: f64,
    pub steps: usize,
    pub last: f64,
}

/// Fixed points of a map with their stability, plus an optional orbit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapReport {
    pub map: IteratedMap,
    pub domain: (f64, f64),
    pub fixed_points: Vec<FixedPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<Orbit>,
}

pub fn map_report(map: IteratedMap, orbit: Option<(f64, usize)>) -> Result<MapReport> {
    let fixed_points = fixed_points(&map)?;
    let orbit = match orbit {
        Some((p0, steps)) => {
            let path = map.iterate(p0, steps)?;
            Some(Orbit {
                p0,
                steps,
                last: *path.last().unwrap_or(&p0),
            })
        }
        None => None,
    };
    Ok(MapReport {
        map,
        domain: map.domain(),
        fixed_points,
        orbit,
    })
}
