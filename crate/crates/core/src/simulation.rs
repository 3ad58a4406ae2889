//! Monte Carlo baseband link: QAM symbols through an FIR channel with AWGN,
//! linear equalization, minimum-distance slicing and symbol-error counting.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channel::{random_cir, Cir};
use crate::equalizer::db_to_linear;
use crate::rng::{self, Purpose, SimRng};
use crate::sparse_solver::SparseFilter;
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constellation {
    Qpsk,
    Qam16,
}

const GRAY4: [f64; 4] = [-3.0, -1.0, 3.0, 1.0];

impl Constellation {
    pub fn order(self) -> usize {
        match self {
            Constellation::Qpsk => 4,
            Constellation::Qam16 => 16,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Constellation::Qpsk => "QPSK",
            Constellation::Qam16 => "QAM16",
        }
    }

    /// Gray-mapped points at unit average energy, in index order.
    ///
    /// QPSK: bit 1 drives I and bit 0 drives Q, `0 → +1`, `1 → −1`.
    /// QAM16: bits 3..2 drive I and bits 1..0 drive Q through the Gray
    /// sequence `00, 01, 11, 10 → −3, −1, +1, +3`.
    pub fn points(self) -> Vec<C64> {
        match self {
            Constellation::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                let lvl = |b: usize| if b == 0 { a } else { -a };
                (0..4).map(|i| C64::new(lvl(i >> 1), lvl(i & 1))).collect()
            }
            Constellation::Qam16 => {
                let s = 10f64.sqrt().recip();
                (0..16).map(|i| C64::new(GRAY4[i >> 2] * s, GRAY4[i & 3] * s)).collect()
            }
        }
    }
}

impl fmt::Display for Constellation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Constellation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "").as_str() {
            "qpsk" | "4qam" | "qam4" => Ok(Constellation::Qpsk),
            "qam16" | "16qam" => Ok(Constellation::Qam16),
            other => Err(Error::InvalidArgument(format!("unknown constellation '{other}'"))),
        }
    }
}

pub fn qam_modulate(indices: &[usize], constellation: Constellation) -> Result<Vec<C64>> {
    let pts = constellation.points();
    indices
        .iter()
        .map(|&i| {
            pts.get(i).copied().ok_or_else(|| {
                Error::InvalidArgument(format!("symbol index {i} out of range for {constellation}"))
            })
        })
        .collect()
}

fn nearest(points: &[C64], y: C64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = (y - p).norm_sqr();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Index of the nearest constellation point; the lowest index wins ties.
pub fn slice(symbol: C64, constellation: Constellation) -> usize {
    nearest(&constellation.points(), symbol)
}

/// An equalizer under test.
#[derive(Clone, Debug)]
pub struct LabeledFilter {
    pub label: String,
    pub filter: SparseFilter,
}

impl LabeledFilter {
    pub fn new(label: impl Into<String>, filter: SparseFilter) -> Self {
        LabeledFilter { label: label.into(), filter }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub constellation: Constellation,
    pub snr_db_grid: Vec<f64>,
    pub symbols_per_trial: usize,
    pub trials: usize,
    pub seed: u64,
    pub delta: usize,
    pub n_f: usize,
}

impl SimConfig {
    pub fn validate(&self, v: usize) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.n_f == 0 {
            return Err(Error::Config("n_f must be >= 1".into()));
        }
        if self.symbols_per_trial <= self.n_f + v {
            return Err(Error::Config(format!(
                "symbols_per_trial ({}) must exceed N_f + v = {}",
                self.symbols_per_trial,
                self.n_f + v
            )));
        }
        if self.delta > self.n_f + v - 1 {
            return Err(Error::DelayOutOfRange { delta: self.delta, max: self.n_f + v - 1 });
        }
        if self.snr_db_grid.is_empty() {
            return Err(Error::Config("empty SNR grid".into()));
        }
        Ok(())
    }
}

/// Error count for one filter at one SNR.
#[derive(Clone, Debug, PartialEq)]
pub struct SerPoint {
    pub snr_db: f64,
    pub label: String,
    pub errors: u64,
    pub symbols: u64,
}

impl SerPoint {
    pub fn ser(&self) -> f64 {
        self.errors as f64 / self.symbols as f64
    }

    /// Binomial standard error of [`ser`](Self::ser).
    pub fn std_error(&self) -> f64 {
        let p = self.ser();
        (p * (1.0 - p) / self.symbols as f64).sqrt()
    }
}

/// A [`SerPoint`] tagged with the trial that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialPoint {
    pub trial: usize,
    pub point: SerPoint,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SerCurve {
    pub points: Vec<SerPoint>,
}

impl SerCurve {
    /// Pool per-trial counts by `(snr_db, label)`, keeping first-seen order.
    pub fn pool(trials: &[TrialPoint]) -> SerCurve {
        let mut points: Vec<SerPoint> = Vec::new();
        for tp in trials {
            let p = &tp.point;
            match points.iter_mut().find(|q| q.snr_db == p.snr_db && q.label == p.label) {
                Some(q) => {
                    q.errors += p.errors;
                    q.symbols += p.symbols;
                }
                None => points.push(p.clone()),
            }
        }
        SerCurve { points }
    }

    pub fn get(&self, snr_db: f64, label: &str) -> Option<&SerPoint> {
        self.points.iter().find(|p| p.snr_db == snr_db && p.label == label)
    }
}

/// One block: `n` symbols through `cir`, noise of total variance `1/snr`, and
/// every filter applied to the same received stream.
///
/// Returns `(errors, counted)` per filter. Only times `k ≥ N_f + v − 1` are
/// counted, where the full window `y_k … y_{k−N_f+1}` depends on transmitted
/// symbols alone.
pub fn simulate_block(
    cir: &Cir,
    filters: &[&SparseFilter],
    snr: f64,
    n: usize,
    delta: usize,
    constellation: Constellation,
    rng: &mut SimRng,
) -> Result<Vec<(u64, u64)>> {
    let n_f = filters.first().map_or(1, |f| f.n_f());
    if let Some(f) = filters.iter().find(|f| f.n_f() != n_f) {
        return Err(Error::DimensionMismatch { expected: n_f, got: f.n_f() });
    }
    let v = cir.memory();
    let start = n_f + v - 1;
    if n <= start || delta > start || snr <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "block of {n} symbols too short for N_f={n_f}, v={v}, delta={delta}, snr={snr}"
        )));
    }
    let pts = constellation.points();
    let m = pts.len();
    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..m)).collect();
    let sigma = (0.5 / snr).sqrt();
    let h = cir.taps();
    let y: Vec<C64> = (0..n)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (l, hl) in h.iter().enumerate().take(k + 1) {
                acc += hl * pts[idx[k - l]];
            }
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            acc + C64::new(re * sigma, im * sigma)
        })
        .collect();

    let counted = (n - start) as u64;
    Ok(filters
        .iter()
        .map(|f| {
            let taps: Vec<(usize, C64)> =
                f.support().iter().zip(f.coefficients()).map(|(&i, w)| (i, w.conj())).collect();
            let errors = (start..n)
                .filter(|&k| {
                    let est: C64 = taps.iter().map(|&(i, w)| w * y[k - i]).sum();
                    nearest(&pts, est) != idx[k - delta]
                })
                .count() as u64;
            (errors, counted)
        })
        .collect())
}

type Designer<'a> = Box<dyn Fn(f64) -> Result<Vec<LabeledFilter>> + 'a>;

fn run_trials<'a, F>(config: &SimConfig, v: usize, body: F) -> Result<Vec<TrialPoint>>
where
    F: Fn(usize, &mut SimRng) -> Result<(Cir, Designer<'a>)> + Sync,
{
    config.validate(v)?;
    let per_trial: Vec<Vec<TrialPoint>> = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut chan_rng = rng::stream(config.seed, Purpose::Channel, t as u64);
            let (cir, design) = body(t, &mut chan_rng)?;
            let mut out = Vec::new();
            for (s, &snr_db) in config.snr_db_grid.iter().enumerate() {
                let snr = db_to_linear(snr_db);
                let filters = design(snr)?;
                let refs: Vec<&SparseFilter> = filters.iter().map(|f| &f.filter).collect();
                let mut sym_rng = rng::stream(config.seed, Purpose::Symbols, ((t as u64) << 16) | s as u64);
                let counts = simulate_block(
                    &cir,
                    &refs,
                    snr,
                    config.symbols_per_trial,
                    config.delta,
                    config.constellation,
                    &mut sym_rng,
                )?;
                for (f, (errors, symbols)) in filters.iter().zip(counts) {
                    out.push(TrialPoint {
                        trial: t,
                        point: SerPoint { snr_db, label: f.label.clone(), errors, symbols },
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Fixed channel and fixed filters over every SNR point and trial.
pub fn run_ser(config: &SimConfig, cir: &Cir, filters: &[LabeledFilter]) -> Result<SerCurve> {
    if let Some(f) = filters.iter().find(|f| f.filter.n_f() != config.n_f) {
        return Err(Error::DimensionMismatch { expected: config.n_f, got: f.filter.n_f() });
    }
    let trials = run_trials(config, cir.memory(), |_, _| {
        Ok((cir.clone(), Box::new(move |_| Ok(filters.to_vec()))))
    })?;
    Ok(SerCurve::pool(&trials))
}

/// A fresh random channel of memory `v` per trial with filters redesigned per
/// `(channel, snr)` by `design`. Returns per-trial points in trial order.
pub fn run_ser_random_channels<D>(config: &SimConfig, v: usize, design: D) -> Result<Vec<TrialPoint>>
where
    D: Fn(&Cir, f64) -> Result<Vec<LabeledFilter>> + Sync,
{
    let design = &design;
    run_trials(config, v, |_, rng| {
        let cir = random_cir(v, rng);
        let c2 = cir.clone();
        Ok((cir, Box::new(move |snr| design(&c2, snr))))
    })
}
