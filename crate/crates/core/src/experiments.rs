//! Experiment drivers behind the `sparseq` binary.
//!
//! Each driver turns an [`ExperimentConfig`] into CSV text. The first line is a
//! `#` comment carrying the fully resolved configuration, then a column header,
//! then rows in grid order. Trials run in parallel; every trial draws from its
//! own RNG stream so output does not depend on the thread count.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;

use crate::channel::{random_cir, Cir};
use crate::coherence::{coherence_bound_empirical, coherence_bound_theoretical, worst_case_coherence};
use crate::correlations::{default_delay, CorrelationSet};
use crate::dictionaries::DictionaryKind;
use crate::equalizer::{
    db_to_linear, delta_eq_from_eta_max, design_from_triple, significant_taps, significant_taps_refit,
    taps_for_sparsity, triple_for, EigenMethod,
};
use crate::rng::{self, Purpose};
use crate::simulation::{run_ser_random_channels, Constellation, LabeledFilter, SerCurve, SimConfig};
use crate::sparse_solver::SparseFilter;
use crate::{Error, Result};

pub const QUICK_TRIALS: usize = 500;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    CoherenceVsSnr,
    CoherenceBound,
    TapsVsLoss,
    Ser,
}

impl Experiment {
    pub const ALL: [Experiment; 4] =
        [Experiment::CoherenceVsSnr, Experiment::CoherenceBound, Experiment::TapsVsLoss, Experiment::Ser];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::CoherenceVsSnr => "coherence-vs-snr",
            Experiment::CoherenceBound => "coherence-bound",
            Experiment::TapsVsLoss => "taps-vs-loss",
            Experiment::Ser => "ser",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Every setting of a run. Keys accepted by [`ExperimentConfig::set`] are the
/// long flag names of the binary.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub v: usize,
    pub n_f: usize,
    /// `None` means `⌊(N_f + v)/2⌋`.
    pub delta: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    /// Forces [`QUICK_TRIALS`] trials.
    pub quick: bool,
    pub snr_db: Vec<f64>,
    pub eta_max_db: Vec<f64>,
    pub kinds: Vec<DictionaryKind>,
    pub sparsity: f64,
    pub v_grid: Vec<usize>,
    pub symbols: usize,
    pub constellation: Constellation,
    pub eigen: EigenMethod,
    pub refit: bool,
    pub out: Option<PathBuf>,
    pub per_channel: Option<PathBuf>,
}

pub const KEYS: [&str; 18] = [
    "v",
    "nf",
    "delta",
    "seed",
    "trials",
    "quick",
    "snr-db",
    "eta-max-db",
    "kinds",
    "sparsity",
    "v-grid",
    "symbols",
    "constellation",
    "eigen",
    "refit",
    "out",
    "per-channel",
    "experiment",
];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value for {key}: '{value}'")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    let items: Vec<T> = value
        .split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(Error::Config(format!("{key} needs at least one value")));
    }
    Ok(items)
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("bad value for {key}: '{value}'"))),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        let snr_db = match experiment {
            Experiment::CoherenceVsSnr => (-3..=6).map(|i| f64::from(i) * 10.0).collect(),
            Experiment::CoherenceBound => vec![30.0],
            Experiment::TapsVsLoss => vec![10.0, 30.0],
            Experiment::Ser => vec![5.0, 10.0, 15.0, 20.0, 25.0],
        };
        let kinds = match experiment {
            Experiment::CoherenceVsSnr => DictionaryKind::VALID.to_vec(),
            _ => vec![DictionaryKind::EigDu, DictionaryKind::CholLh, DictionaryKind::CholRyy],
        };
        ExperimentConfig {
            experiment,
            v: 5,
            n_f: 35,
            delta: None,
            seed: 1,
            trials: 5000,
            quick: false,
            snr_db,
            eta_max_db: vec![0.05, 0.1, 0.25, 0.5, 1.0, 2.0],
            kinds,
            sparsity: 0.25,
            v_grid: (2..=10).collect(),
            symbols: 10_000,
            constellation: Constellation::Qam16,
            eigen: EigenMethod::Exact,
            refit: false,
            out: None,
            per_channel: None,
        }
    }

    /// Sets one key. `-` and `_` are interchangeable in key names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let k = key.as_str();
        match k {
            "v" => self.v = parse_num(k, value)?,
            "nf" | "n-f" => self.n_f = parse_num(k, value)?,
            "delta" => {
                self.delta = match value.trim() {
                    "auto" => None,
                    s => Some(parse_num(k, s)?),
                }
            }
            "seed" => self.seed = parse_num(k, value)?,
            "trials" => self.trials = parse_num(k, value)?,
            "quick" => self.quick = parse_bool(k, value)?,
            "snr-db" => self.snr_db = parse_list(k, value)?,
            "eta-max-db" => self.eta_max_db = parse_list(k, value)?,
            "kinds" => self.kinds = parse_list(k, value)?,
            "sparsity" => self.sparsity = parse_num(k, value)?,
            "v-grid" => self.v_grid = parse_list(k, value)?,
            "symbols" => self.symbols = parse_num(k, value)?,
            "constellation" => self.constellation = value.parse()?,
            "eigen" => self.eigen = value.parse()?,
            "circulant" => {
                if parse_bool(k, value)? {
                    self.eigen = EigenMethod::Circulant
                }
            }
            "refit" => self.refit = parse_bool(k, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "per-channel" => self.per_channel = Some(PathBuf::from(value.trim())),
            "experiment" => {
                let e: Experiment = value.parse()?;
                if e != self.experiment {
                    return Err(Error::Config(format!(
                        "config file is for '{e}' but running '{}'",
                        self.experiment.as_str()
                    )));
                }
            }
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file. `#` starts a comment.
    pub fn apply_file_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v).map_err(|e| Error::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn resolved_delta(&self) -> usize {
        self.delta.unwrap_or_else(|| default_delay(self.n_f, self.v))
    }

    pub fn effective_trials(&self) -> usize {
        if self.quick {
            QUICK_TRIALS
        } else {
            self.trials
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.effective_trials() == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.n_f == 0 {
            return bad("nf must be >= 1".into());
        }
        match self.experiment {
            Experiment::CoherenceBound => {
                if self.snr_db.len() != 1 {
                    return bad("coherence-bound takes exactly one snr-db value".into());
                }
                if let Some(&v) = self.v_grid.iter().find(|&&v| v == 0 || v >= self.n_f) {
                    return bad(format!("v-grid entry {v} must satisfy 1 <= v < nf"));
                }
            }
            _ => {
                if self.delta.is_some_and(|d| d > self.n_f + self.v - 1) {
                    return Err(Error::DelayOutOfRange {
                        delta: self.resolved_delta(),
                        max: self.n_f + self.v - 1,
                    });
                }
            }
        }
        if self.eta_max_db.iter().any(|&e| !(e >= 0.0)) {
            return bad("eta-max-db values must be >= 0".into());
        }
        if !(self.sparsity > 0.0 && self.sparsity <= 1.0) {
            return bad(format!("sparsity must be in (0, 1], got {}", self.sparsity));
        }
        if self.experiment == Experiment::Ser && self.symbols <= self.n_f + self.v {
            return bad(format!("symbols must exceed nf + v = {}", self.n_f + self.v));
        }
        if self.experiment != Experiment::CoherenceVsSnr {
            if let Some(k) = self.kinds.iter().find(|k| !k.is_valid()) {
                return bad(format!("{k} cannot drive a design"));
            }
        }
        Ok(())
    }

    /// `# sparseq <experiment> key=value …` with every resolved setting.
    pub fn header(&self) -> String {
        let mut s = format!("# sparseq {}", self.experiment.as_str());
        let kinds: Vec<&str> = self.kinds.iter().map(|k| k.as_str()).collect();
        let fields: Vec<(&str, String)> = vec![
            ("v", self.v.to_string()),
            ("nf", self.n_f.to_string()),
            ("delta", self.resolved_delta().to_string()),
            ("seed", self.seed.to_string()),
            ("trials", self.effective_trials().to_string()),
            ("quick", self.quick.to_string()),
            ("snr-db", join(&self.snr_db)),
            ("eta-max-db", join(&self.eta_max_db)),
            ("kinds", kinds.join(";")),
            ("sparsity", self.sparsity.to_string()),
            ("v-grid", join(&self.v_grid)),
            ("symbols", self.symbols.to_string()),
            ("constellation", self.constellation.to_string()),
            ("eigen", self.eigen.to_string()),
            ("refit", self.refit.to_string()),
        ];
        for (k, v) in fields {
            let _ = write!(s, " {k}={v}");
        }
        s.push('\n');
        s
    }
}

impl std::fmt::Display for Experiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// CSV produced by one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub csv: String,
    /// Per-trial SER counts, only for `ser`.
    pub per_channel: Option<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Output> {
    cfg.validate()?;
    let csv = match cfg.experiment {
        Experiment::CoherenceVsSnr => coherence_vs_snr(cfg)?,
        Experiment::CoherenceBound => coherence_bound(cfg)?,
        Experiment::TapsVsLoss => taps_vs_loss(cfg)?,
        Experiment::Ser => return ser(cfg),
    };
    Ok(Output { csv, per_channel: None })
}

/// Channel of trial `t`; the same across experiments for a given seed.
pub fn trial_cir(seed: u64, v: usize, t: usize) -> Cir {
    random_cir(v, &mut rng::stream(seed, Purpose::Channel, t as u64))
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `values[t][i]` → per-column `(mean, std)` over trials.
fn column_stats(values: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let width = values.first().map_or(0, Vec::len);
    (0..width)
        .map(|i| mean_std(&values.iter().map(|row| row[i]).collect::<Vec<_>>()))
        .collect()
}

fn per_trial<T, F>(trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

/// Worst-case coherence of each dictionary over the SNR grid.
pub fn coherence_vs_snr(cfg: &ExperimentConfig) -> Result<String> {
    let delta = cfg.resolved_delta();
    let mus = per_trial(cfg.effective_trials(), |t| {
        let cir = trial_cir(cfg.seed, cfg.v, t);
        let mut row = Vec::with_capacity(cfg.snr_db.len() * cfg.kinds.len());
        for &snr_db in &cfg.snr_db {
            let corr = CorrelationSet::from_cir(&cir, cfg.n_f, db_to_linear(snr_db), delta)?;
            for &kind in &cfg.kinds {
                let triple = triple_for(kind, cfg.eigen, &corr)?;
                row.push(worst_case_coherence(triple.phi())?.mu);
            }
        }
        Ok(row)
    })?;
    let stats = column_stats(&mus);
    let mut csv = cfg.header();
    csv.push_str("snr_db,kind,mean_mu,std_mu\n");
    let mut it = stats.iter();
    for &snr_db in &cfg.snr_db {
        for kind in &cfg.kinds {
            let (m, s) = it.next().copied().unwrap_or_default();
            let _ = writeln!(csv, "{snr_db},{kind},{m},{s}");
        }
    }
    Ok(csv)
}

/// Sine-channel bound against the empirical maximum, per channel memory.
pub fn coherence_bound(cfg: &ExperimentConfig) -> Result<String> {
    let snr = db_to_linear(cfg.snr_db[0]);
    let mut csv = cfg.header();
    csv.push_str("v,theoretical_mu,empirical_mu,relative_mismatch_percent\n");
    for &v in &cfg.v_grid {
        let theo = coherence_bound_theoretical(v, snr, cfg.n_f)?;
        let emp = coherence_bound_empirical(v, snr, cfg.n_f, cfg.effective_trials(), cfg.seed)?;
        let mismatch = (theo - emp).abs() / theo * 100.0;
        let _ = writeln!(csv, "{v},{theo},{emp},{mismatch}");
    }
    Ok(csv)
}

/// Active-tap percentage of OMP designs over the `(η_max, SNR, kind)` grid.
pub fn taps_vs_loss(cfg: &ExperimentConfig) -> Result<String> {
    let delta = cfg.resolved_delta();
    let (ns, nk, ne) = (cfg.snr_db.len(), cfg.kinds.len(), cfg.eta_max_db.len());
    // row layout per trial: [snr][kind][eta]
    let active = per_trial(cfg.effective_trials(), |t| {
        let cir = trial_cir(cfg.seed, cfg.v, t);
        let mut row = Vec::with_capacity(ns * nk * ne);
        for &snr_db in &cfg.snr_db {
            let corr = CorrelationSet::from_cir(&cir, cfg.n_f, db_to_linear(snr_db), delta)?;
            for &kind in &cfg.kinds {
                let triple = triple_for(kind, cfg.eigen, &corr)?;
                for &eta in &cfg.eta_max_db {
                    let budget = delta_eq_from_eta_max(eta, corr.xi_m())?;
                    row.push(design_from_triple(&triple, &corr, budget, None)?.active_percent);
                }
            }
        }
        Ok(row)
    })?;
    let stats = column_stats(&active);
    let mut csv = cfg.header();
    csv.push_str("eta_max_db,snr_db,kind,mean_active_percent,std\n");
    for (e, &eta) in cfg.eta_max_db.iter().enumerate() {
        for (s, &snr_db) in cfg.snr_db.iter().enumerate() {
            for (k, kind) in cfg.kinds.iter().enumerate() {
                let (m, sd) = stats[(s * nk + k) * ne + e];
                let _ = writeln!(csv, "{eta},{snr_db},{kind},{m},{sd}");
            }
        }
    }
    Ok(csv)
}

/// Label used for a sparse design in the SER table.
pub fn ser_label(kind: DictionaryKind) -> String {
    match kind {
        DictionaryKind::CholRyy => "ryy".to_string(),
        k => k.as_str().to_ascii_lowercase(),
    }
}

/// Dense Wiener filter, one OMP design per kind run to `K` taps, and the
/// significant-taps baseline with the same `K`.
pub fn ser_filters(cfg: &ExperimentConfig, cir: &Cir, snr: f64) -> Result<Vec<LabeledFilter>> {
    let corr = CorrelationSet::from_cir(cir, cfg.n_f, snr, cfg.resolved_delta())?;
    let k = taps_for_sparsity(cfg.sparsity, cfg.n_f);
    let w = corr.wiener();
    let mut out = vec![LabeledFilter::new("mmse_dense", SparseFilter::new(cfg.n_f, w.iter().copied().enumerate().collect())?)];
    for &kind in &cfg.kinds {
        let triple = triple_for(kind, cfg.eigen, &corr)?;
        out.push(LabeledFilter::new(ser_label(kind), design_from_triple(&triple, &corr, 0.0, Some(k))?.filter));
    }
    let sig = if cfg.refit { significant_taps_refit(&corr, k)? } else { significant_taps(w, k)? };
    out.push(LabeledFilter::new("significant_taps", sig));
    Ok(out)
}

/// Pooled SER per `(SNR, filter)` over random channels.
pub fn ser(cfg: &ExperimentConfig) -> Result<Output> {
    let sim = SimConfig {
        constellation: cfg.constellation,
        snr_db_grid: cfg.snr_db.clone(),
        symbols_per_trial: cfg.symbols,
        trials: cfg.effective_trials(),
        seed: cfg.seed,
        delta: cfg.resolved_delta(),
        n_f: cfg.n_f,
    };
    let trials = run_ser_random_channels(&sim, cfg.v, |cir, snr| ser_filters(cfg, cir, snr))?;
    let curve = SerCurve::pool(&trials);
    let mut csv = cfg.header();
    csv.push_str("snr_db,label,ser,errors,symbols,std_error\n");
    for p in &curve.points {
        let _ = writeln!(csv, "{},{},{},{},{},{}", p.snr_db, p.label, p.ser(), p.errors, p.symbols, p.std_error());
    }
    let mut per = cfg.header();
    per.push_str("trial,snr_db,label,errors,symbols,ser\n");
    for tp in &trials {
        let p = &tp.point;
        let _ = writeln!(per, "{},{},{},{},{},{}", tp.trial, p.snr_db, p.label, p.errors, p.symbols, p.ser());
    }
    Ok(Output { csv, per_channel: Some(per) })
}

/// Parses a CSV produced by [`run`] into its header names and numeric-or-text
/// cells, skipping the `#` line.
pub fn read_table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let cols = lines.next().map(|h| h.split(',').map(str::to_string).collect()).unwrap_or_default();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (cols, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(e: Experiment) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(e);
        c.trials = 6;
        c.n_f = 12;
        c.v = 3;
        c.symbols = 400;
        c.v_grid = vec![2, 3];
        c
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::new(Experiment::TapsVsLoss);
        assert_eq!((c.v, c.n_f, c.resolved_delta(), c.trials), (5, 35, 20, 5000));
        assert_eq!(c.snr_db, vec![10.0, 30.0]);
        let q = ExperimentConfig { quick: true, ..c };
        assert_eq!(q.effective_trials(), 500);
        assert_eq!(ExperimentConfig::new(Experiment::CoherenceVsSnr).snr_db.len(), 10);
    }

    #[test]
    fn file_and_keys() {
        let mut c = ExperimentConfig::new(Experiment::Ser);
        c.apply_file_text("# comment\nnf = 20 \n snr_db = -5, 0,5\nkinds=EIG_DU;chol_lh\nquick = yes # trailing\n")
            .unwrap();
        assert_eq!(c.n_f, 20);
        assert_eq!(c.snr_db, vec![-5.0, 0.0, 5.0]);
        assert_eq!(c.kinds, vec![DictionaryKind::EigDu, DictionaryKind::CholLh]);
        assert!(c.quick);
        assert!(c.apply_file_text("bogus = 1").is_err());
        assert!(c.apply_file_text("nf 3").is_err());
        assert!(c.apply_file_text("experiment = taps-vs-loss").is_err());
        for k in KEYS {
            assert!(!matches!(c.clone().set(k, "!"), Err(Error::Config(m)) if m.starts_with("unknown key")), "{k}");
        }
    }

    #[test]
    fn validation() {
        let mut c = small(Experiment::Ser);
        c.symbols = 10;
        assert!(run(&c).is_err());
        let mut c = small(Experiment::TapsVsLoss);
        c.kinds = vec![DictionaryKind::EigUh];
        assert!(run(&c).is_err());
        let mut c = small(Experiment::CoherenceBound);
        c.snr_db = vec![10.0, 20.0];
        assert!(run(&c).is_err());
        let mut c = small(Experiment::CoherenceVsSnr);
        c.delta = Some(99);
        assert!(run(&c).is_err());
        c.delta = None;
        c.sparsity = 0.0;
        assert!(run(&c).is_err());
    }

    #[test]
    fn every_experiment_is_deterministic_and_well_formed() {
        for e in Experiment::ALL {
            let c = small(e);
            let a = run(&c).unwrap();
            let b = run(&c).unwrap();
            assert_eq!(a, b, "{e}");
            assert!(a.csv.starts_with(&format!("# sparseq {e} ")));
            let (cols, rows) = read_table(&a.csv);
            assert!(!rows.is_empty());
            assert!(rows.iter().all(|r| r.len() == cols.len()));
            assert!(!a.csv.contains('\r'));
        }
    }

    #[test]
    fn seed_changes_output() {
        let c = small(Experiment::CoherenceVsSnr);
        let d = ExperimentConfig { seed: 2, ..c.clone() };
        assert_ne!(run(&c).unwrap().csv, run(&d).unwrap().csv);
    }

    #[test]
    fn taps_rows_are_grid_sorted() {
        let c = small(Experiment::TapsVsLoss);
        let (_, rows) = read_table(&run(&c).unwrap().csv);
        assert_eq!(rows.len(), 6 * 2 * 3);
        let etas: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
        assert!(etas.windows(2).all(|w| w[0] <= w[1]));
        for r in &rows {
            let m: f64 = r[3].parse().unwrap();
            assert!(m > 0.0 && m <= 100.0);
        }
    }

    #[test]
    fn zero_loss_uses_every_tap() {
        let mut c = small(Experiment::TapsVsLoss);
        c.eta_max_db = vec![0.0];
        c.snr_db = vec![10.0];
        let (_, rows) = read_table(&run(&c).unwrap().csv);
        for r in rows {
            assert_eq!(r[3], "100", "{r:?}");
        }
    }

    #[test]
    fn ser_table_labels() {
        let c = small(Experiment::Ser);
        let out = run(&c).unwrap();
        let (_, rows) = read_table(&out.csv);
        let labels: Vec<&str> = rows.iter().take(5).map(|r| r[1].as_str()).collect();
        assert_eq!(labels, ["mmse_dense", "eig_du", "chol_lh", "ryy", "significant_taps"]);
        let (_, per) = read_table(out.per_channel.as_deref().unwrap());
        assert_eq!(per.len(), 6 * 5 * 5);
    }

    #[test]
    fn ser_sparse_filters_hit_the_cap() {
        let c = ExperimentConfig::new(Experiment::Ser);
        let cir = trial_cir(3, 5, 0);
        let fs = ser_filters(&c, &cir, db_to_linear(15.0)).unwrap();
        assert_eq!(fs[0].filter.len(), 35);
        for f in &fs[1..] {
            assert_eq!(f.filter.len(), 9, "{}", f.label);
        }
    }

    #[test]
    fn mean_std_sample() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[7.0]), (7.0, 0.0));
    }
}
