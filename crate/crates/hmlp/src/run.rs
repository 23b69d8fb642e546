//! Parallel sweep and the single-population optimizer.

use std::time::Instant;

use anyhow::{bail, Result};
use rayon::prelude::*;

use hmlp_core::capacity::ModCodTable;
use hmlp_core::channel::Receiver;
use hmlp_core::lp::{assemble, schedule_from, LpProblem, RateWeights, Schedule, SolveOptions};
use hmlp_core::ratevectors::{enumerate_all, EnumerationLimits};
use hmlp_core::sim::{run_trial, summarize, trial_indices, GridSummary, Scenario, TrialResult};

/// Runs every trial on the rayon pool. Results come back in (grid, trial)
/// order whatever the scheduling. `wall_clock` fills the per-scheme timings.
pub fn par_sweep(s: &Scenario, table: &ModCodTable, wall_clock: bool) -> Result<(Vec<TrialResult>, Vec<GridSummary>)> {
    s.validate()?;
    let origin = Instant::now();
    let clock = move || origin.elapsed().as_secs_f64() * 1e3;
    let results = trial_indices(s)
        .into_par_iter()
        .map(|(g, t)| {
            let c: Option<&dyn Fn() -> f64> = if wall_clock { Some(&clock) } else { None };
            run_trial(s, table, g, t, c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&s.snr_max_grid, &results);
    Ok((results, summary))
}

pub struct Optimized {
    pub schedule: Schedule,
    pub problem: LpProblem,
}

/// Optimal schedule for receivers at `snrs`. Checks that every covered
/// receiver gets `R * w_i` before returning.
pub fn optimize(
    snrs: &[f64],
    table: &ModCodTable,
    limits: &EnumerationLimits,
    weights: &RateWeights,
) -> Result<Optimized> {
    if weights.len() != snrs.len() {
        bail!("{} weights given for {} receivers", weights.len(), snrs.len());
    }
    let receivers: Vec<Receiver> = snrs.iter().enumerate().map(|(i, &s)| Receiver::with_snr(i, s)).collect();
    let e = enumerate_all(&receivers, table, limits)?;
    let schedule = schedule_from(&e, weights, &SolveOptions::default())?;
    let problem = assemble(&e.vectors(), e.slot_count(), &weights.select(&e.covered)?)?;
    let rates = schedule.receiver_rates(snrs.len());
    for &p in &schedule.covered {
        let want = schedule.rate * weights.as_slice()[p];
        if (rates[p] - want).abs() > 1e-9 {
            bail!("receiver {p} gets {} instead of {want}", rates[p]);
        }
    }
    Ok(Optimized { schedule, problem })
}
