//! Beam simulation: random receiver populations swept over the peak SNR,
//! comparing the three schemes on identical coverage.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{pair_scheme_from, reference_vcm, PairingStrategy};
use crate::capacity::ModCodTable;
use crate::channel::{sample_receivers, AntennaModel, Receiver, WeatherCdf};
use crate::lp::{schedule_from, RateWeights, Schedule, SolveOptions};
use crate::math::sqrt;
use crate::ratevectors::{enumerate_all, EnumerationLimits};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Reference,
    Pairing,
    Optimal,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Reference, Scheme::Pairing, Scheme::Optimal];

    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Reference => "reference",
            Scheme::Pairing => "pairing",
            Scheme::Optimal => "optimal",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.tag() == s)
            .ok_or_else(|| Error::InvalidScenario(alloc::format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub receivers: usize,
    pub snr_max_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub antenna: AntennaModel,
    pub weather: WeatherCdf,
    pub limits: EnumerationLimits,
    pub pairing: PairingStrategy,
}

impl Scenario {
    /// 50 receivers, 20 trials, peak SNR 2..=21 dB.
    pub fn desk(seed: u64) -> Self {
        Self {
            receivers: 50,
            snr_max_grid: grid(2.0, 21.0, 1.0).expect("static grid"),
            trials: 20,
            seed,
            antenna: AntennaModel::ka_band_default(),
            weather: WeatherCdf::placeholder(),
            limits: EnumerationLimits::default(),
            pairing: PairingStrategy::Greedy,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.receivers == 0 || self.trials == 0 {
            return Err(Error::InvalidScenario("receivers and trials must be at least 1".into()));
        }
        if self.snr_max_grid.is_empty() || self.snr_max_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidScenario("peak SNR grid must be non-empty and finite".into()));
        }
        self.limits.validate()
    }
}

/// Inclusive grid `start, start + step, ..` up to `stop` (with a small
/// tolerance for accumulated rounding).
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step > 0.0 && step.is_finite()) || stop < start {
        return Err(Error::InvalidScenario("grid needs start <= stop and a positive step".into()));
    }
    let count = ((stop - start) / step + 1e-9) as usize + 1;
    if count > 100_000 {
        return Err(Error::InvalidScenario("grid has too many points".into()));
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `master ^ splitmix64(grid_index << 32 | trial)`.
pub fn trial_seed(master: u64, grid_index: usize, trial: usize) -> u64 {
    master ^ splitmix64(((grid_index as u64) << 32) | (trial as u64 & 0xFFFF_FFFF))
}

/// Percentage of receivers without any decodable whole-symbol modcod.
pub fn unavailability(receivers: &[Receiver], table: &ModCodTable) -> f64 {
    if receivers.is_empty() {
        return 0.0;
    }
    let out = receivers.iter().filter(|r| table.best_whole(r.snr_db).is_none()).count();
    100.0 * out as f64 / receivers.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome {
    pub scheme: Scheme,
    /// `None` when no receiver is covered.
    pub rate: Option<f64>,
    pub gain_pct: Option<f64>,
    pub excluded: Vec<usize>,
    pub columns: usize,
    pub iterations: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub snr_max_db: f64,
    pub grid_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub unavailability_pct: f64,
    /// Reference, pairing, optimal.
    pub outcomes: Vec<SchemeOutcome>,
}

impl TrialResult {
    pub fn outcome(&self, scheme: Scheme) -> &SchemeOutcome {
        self.outcomes.iter().find(|o| o.scheme == scheme).expect("all schemes run")
    }
}

/// Milliseconds from an arbitrary origin.
pub type Clock<'a> = &'a dyn Fn() -> f64;

fn timed(clock: Option<Clock<'_>>, f: impl FnOnce() -> Result<Schedule>) -> Result<(Schedule, f64)> {
    let start = clock.map(|c| c());
    let s = f()?;
    let ms = match (clock, start) {
        (Some(c), Some(t0)) => c() - t0,
        _ => 0.0,
    };
    Ok((s, ms))
}

/// One population at one peak SNR. `clock` fills the wall times; without it
/// they are 0.
pub fn run_trial(
    s: &Scenario,
    table: &ModCodTable,
    grid_index: usize,
    trial: usize,
    clock: Option<Clock<'_>>,
) -> Result<TrialResult> {
    let snr_max_db = *s
        .snr_max_grid
        .get(grid_index)
        .ok_or_else(|| Error::InvalidScenario("grid index out of range".into()))?;
    let seed = trial_seed(s.seed, grid_index, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let receivers = sample_receivers(s.receivers, snr_max_db, &s.antenna, &s.weather, &mut rng)?;
    let unavailability_pct = unavailability(&receivers, table);
    let mut result = TrialResult { snr_max_db, grid_index, trial, seed, unavailability_pct, outcomes: Vec::new() };

    let e = match enumerate_all(&receivers, table, &s.limits) {
        Ok(e) => e,
        Err(Error::EmptyBeam) => {
            let all: Vec<usize> = (0..receivers.len()).collect();
            result.outcomes = Scheme::ALL
                .into_iter()
                .map(|scheme| SchemeOutcome {
                    scheme,
                    rate: None,
                    gain_pct: None,
                    excluded: all.clone(),
                    columns: 0,
                    iterations: 0,
                    wall_ms: 0.0,
                })
                .collect();
            return Ok(result);
        }
        Err(err) => return Err(err),
    };

    let (reference, t_ref) = timed(clock, || reference_vcm(&receivers, table))?;
    let (pairing, t_pair) = timed(clock, || Ok(pair_scheme_from(&e, &receivers, s.pairing)?.0))?;
    let w = RateWeights::uniform(receivers.len());
    let (optimal, t_opt) = timed(clock, || schedule_from(&e, &w, &SolveOptions::default()))?;
    let r_ref = reference.rate;
    for (scheme, sched, ms) in
        [(Scheme::Reference, reference, t_ref), (Scheme::Pairing, pairing, t_pair), (Scheme::Optimal, optimal, t_opt)]
    {
        let gain = if scheme == Scheme::Reference { 0.0 } else { 100.0 * (sched.rate / r_ref - 1.0) };
        result.outcomes.push(SchemeOutcome {
            scheme,
            rate: Some(sched.rate),
            gain_pct: Some(gain),
            excluded: sched.excluded,
            columns: sched.columns,
            iterations: sched.iterations,
            wall_ms: ms,
        });
    }
    Ok(result)
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub mean: f64,
    pub std_dev: f64,
    pub count: usize,
}

impl Moments {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut n, mut mean, mut m2) = (0usize, 0.0, 0.0);
        for x in values {
            n += 1;
            let d = x - mean;
            mean += d / n as f64;
            m2 += d * (x - mean);
        }
        let std_dev = if n > 1 { sqrt(m2 / (n - 1) as f64) } else { 0.0 };
        Self { mean: if n == 0 { 0.0 } else { mean }, std_dev, count: n }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    /// Over trials with at least one covered receiver.
    pub rate: Moments,
    pub gain_pct: Moments,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSummary {
    pub snr_max_db: f64,
    pub unavailability_pct: Moments,
    pub schemes: Vec<SchemeSummary>,
}

/// Per-grid-point averages, in grid order.
pub fn summarize(grid: &[f64], results: &[TrialResult]) -> Vec<GridSummary> {
    grid.iter()
        .enumerate()
        .map(|(g, &snr_max_db)| {
            let here: Vec<&TrialResult> = results.iter().filter(|r| r.grid_index == g).collect();
            GridSummary {
                snr_max_db,
                unavailability_pct: Moments::of(here.iter().map(|r| r.unavailability_pct)),
                schemes: Scheme::ALL
                    .into_iter()
                    .map(|scheme| SchemeSummary {
                        scheme,
                        rate: Moments::of(here.iter().filter_map(|r| r.outcome(scheme).rate)),
                        gain_pct: Moments::of(here.iter().filter_map(|r| r.outcome(scheme).gain_pct)),
                    })
                    .collect(),
            }
        })
        .collect()
}

/// Every (grid point, trial) in grid-major order.
pub fn trial_indices(s: &Scenario) -> Vec<(usize, usize)> {
    (0..s.snr_max_grid.len()).flat_map(|g| (0..s.trials).map(move |t| (g, t))).collect()
}

/// Sequential sweep.
pub fn sweep(s: &Scenario, table: &ModCodTable) -> Result<(Vec<TrialResult>, Vec<GridSummary>)> {
    s.validate()?;
    let results = trial_indices(s)
        .into_iter()
        .map(|(g, t)| run_trial(s, table, g, t, None))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&s.snr_max_grid, &results);
    Ok((results, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{
        calibrated_margin, hierarchical_entries, load_modcod_table, standard_entries, ModCodEntry,
    };
    use crate::constellation::ConstellationFamily;
    use alloc::vec;

    extern crate std;

    /// Full default table, built once.
    fn table() -> ModCodTable {
        static TABLE: std::sync::OnceLock<ModCodTable> = std::sync::OnceLock::new();
        TABLE
            .get_or_init(|| {
                let mut e: Vec<ModCodEntry> = standard_entries();
                e.extend(hierarchical_entries(&ConstellationFamily::ALL));
                load_modcod_table(&e, calibrated_margin()).unwrap()
            })
            .clone()
    }

    fn small(seed: u64) -> Scenario {
        Scenario { receivers: 12, snr_max_grid: vec![4.0, 12.0], trials: 2, ..Scenario::desk(seed) }
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(grid(2.0, 21.0, 1.0).unwrap().len(), 20);
        assert_eq!(grid(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert_eq!(grid(3.0, 3.0, 1.0).unwrap(), vec![3.0]);
        assert!(grid(3.0, 2.0, 1.0).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn seeds_differ_per_cell() {
        let s = [trial_seed(7, 0, 0), trial_seed(7, 0, 1), trial_seed(7, 1, 0), trial_seed(8, 0, 0)];
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(trial_seed(7, 3, 4), trial_seed(7, 3, 4));
    }

    #[test]
    fn unavailability_examples() {
        let t = table();
        let high: Vec<Receiver> = (0..4).map(|i| Receiver::with_snr(i, 20.0)).collect();
        assert_eq!(unavailability(&high, &t), 0.0);
        let half: Vec<Receiver> = (0..4).map(|i| Receiver::with_snr(i, if i % 2 == 0 { -10.0 } else { 10.0 })).collect();
        assert_eq!(unavailability(&half, &t), 50.0);
    }

    #[test]
    fn clear_sky_high_peak_has_no_gain() {
        let t = table();
        let s = Scenario { weather: WeatherCdf::clear_sky(), snr_max_grid: vec![21.0], ..small(1) };
        let r = run_trial(&s, &t, 0, 0, None).unwrap();
        assert_eq!(r.unavailability_pct, 0.0);
        let rates: Vec<f64> = r.outcomes.iter().map(|o| o.rate.unwrap()).collect();
        assert!((rates[0] - 4.5 / 12.0).abs() < 1e-12);
        for o in &r.outcomes {
            assert!(o.gain_pct.unwrap().abs() < 1e-9, "{o:?}");
        }
    }

    #[test]
    fn dark_beam_is_fully_unavailable() {
        let t = table();
        let s = Scenario { weather: WeatherCdf::clear_sky(), snr_max_grid: vec![-10.0], ..small(1) };
        let r = run_trial(&s, &t, 0, 0, None).unwrap();
        assert_eq!(r.unavailability_pct, 100.0);
        assert!(r.outcomes.iter().all(|o| o.rate.is_none() && o.excluded.len() == 12));
    }

    #[test]
    fn trials_are_reproducible_and_ordered() {
        let t = table();
        let s = small(3);
        let (a, summary) = sweep(&s, &t).unwrap();
        let (b, _) = sweep(&s, &t).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert_eq!(summary.len(), 2);
        for r in &a {
            let (re, pa, op) = (r.outcome(Scheme::Reference), r.outcome(Scheme::Pairing), r.outcome(Scheme::Optimal));
            assert_eq!(re.excluded, pa.excluded);
            assert_eq!(pa.excluded, op.excluded);
            let (x, y, z) = (re.rate.unwrap(), pa.rate.unwrap(), op.rate.unwrap());
            assert!(x <= y + 1e-9 && y <= z + 1e-9);
            assert!(op.gain_pct.unwrap() >= pa.gain_pct.unwrap() - 1e-7);
            assert_eq!(re.excluded.len() as f64 * 100.0 / 12.0, r.unavailability_pct);
        }
    }

    #[test]
    fn moments() {
        let m = Moments::of([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        assert!((m.std_dev - 1.290_994_448_735_805_6).abs() < 1e-12);
        assert_eq!(Moments::of([]).count, 0);
    }

    #[test]
    fn scenario_validation() {
        assert!(Scenario { receivers: 0, ..small(0) }.validate().is_err());
        assert!(Scenario { snr_max_grid: vec![], ..small(0) }.validate().is_err());
        assert!(Scenario::desk(0).validate().is_ok());
        assert_eq!("optimal".parse::<Scheme>().unwrap(), Scheme::Optimal);
        assert!("best".parse::<Scheme>().is_err());
    }
}
