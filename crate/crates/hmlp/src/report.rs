//! Text and CSV renderings.

use std::fmt::Write;

use hmlp_core::capacity::{Layer, ModCodTable};
use hmlp_core::constellation::ConstellationParams;
use hmlp_core::lp::Schedule;
use hmlp_core::sim::{GridSummary, Scheme, TrialResult};

use crate::config::SchemeSelection;

pub const SWEEP_HEADER: &str =
    "snr_max_db,trial,scheme,rate_bits_per_symbol,gain_pct,unavailability_pct,columns,iterations,wall_ms";

/// One row per trial and selected scheme, in (grid, trial, scheme) order.
/// Trials without coverage leave the rate and gain fields empty.
pub fn sweep_csv(results: &[TrialResult], schemes: SchemeSelection) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for r in results {
        for o in r.outcomes.iter().filter(|o| schemes.includes(o.scheme)) {
            let rate = o.rate.map(|x| format!("{x:.9}")).unwrap_or_default();
            let gain = o.gain_pct.map(|x| format!("{x:.6}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "{:.3},{},{},{rate},{gain},{:.3},{},{},{:.3}",
                r.snr_max_db, r.trial, o.scheme, r.unavailability_pct, o.columns, o.iterations, o.wall_ms
            );
        }
    }
    s
}

/// Per-grid-point means (and standard deviations of the gain).
pub fn summary_table(summary: &[GridSummary], schemes: SchemeSelection) -> String {
    let mut s = String::from("snr_max_db  unavail%");
    let shown: Vec<Scheme> = Scheme::ALL.into_iter().filter(|&x| schemes.includes(x)).collect();
    for x in &shown {
        let _ = write!(s, "  {:>10} {:>16}", format!("{x}_R"), format!("{x}_gain%"));
    }
    s.push('\n');
    for g in summary {
        let _ = write!(s, "{:>10.2}  {:>8.2}", g.snr_max_db, g.unavailability_pct.mean);
        for x in &shown {
            let sc = g.schemes.iter().find(|q| q.scheme == *x).expect("all schemes summarized");
            let _ = write!(
                s,
                "  {:>10.4} {:>16}",
                sc.rate.mean,
                format!("{:.3}±{:.3}", sc.gain_pct.mean, sc.gain_pct.std_dev)
            );
        }
        s.push('\n');
    }
    s
}

fn params_text(p: &ConstellationParams) -> String {
    let mut s = format!("theta={}", p.theta_deg);
    for (k, v) in [("gamma", p.gamma), ("gamma1", p.gamma1), ("gamma2", p.gamma2)] {
        if let Some(v) = v {
            let _ = write!(s, " {k}={v}");
        }
    }
    s
}

pub const THRESHOLD_HEADER: &str = "id,constellation,family,params,stream,rate,threshold_db,efficiency";

pub fn thresholds_csv(table: &ModCodTable) -> String {
    let mut s = String::from(THRESHOLD_HEADER);
    s.push('\n');
    for m in table.modcods() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{:.2},{:.6}",
            m.id,
            m.constellation.name,
            m.constellation.family,
            params_text(&m.constellation.params),
            m.layer,
            m.code_rate,
            m.threshold_db,
            m.spectral_efficiency
        );
    }
    s
}

/// Schedule printout: the common rate, every positive share with the modcod
/// of each served receiver, then per-receiver rates.
pub fn schedule_text(schedule: &Schedule, table: &ModCodTable, snrs: &[f64], weights: &[f64]) -> String {
    let n = snrs.len();
    let mut s = String::new();
    let _ = writeln!(s, "rate_bits_per_symbol {:.9}", schedule.rate);
    let _ = writeln!(s, "unavailability_pct {:.3}", 100.0 * schedule.excluded.len() as f64 / n as f64);
    let _ = writeln!(s, "columns {} iterations {}", schedule.columns, schedule.iterations);
    for share in &schedule.shares {
        let _ = write!(s, "share {:.9}", share.time);
        for (a, &(pos, rate)) in share.vector.provenance().iter().zip(share.vector.entries()) {
            let m = table.get(a.modcod);
            let kind = if m.layer == Layer::Whole { "" } else { " hierarchical" };
            let _ = write!(s, " | rx{pos} {}{kind} {rate:.6}", m.label());
        }
        s.push('\n');
    }
    let rates = schedule.receiver_rates(n);
    for (pos, (&snr, r)) in snrs.iter().zip(rates).enumerate() {
        if schedule.excluded.contains(&pos) {
            let _ = writeln!(s, "receiver {pos} snr_db {snr:.3} unavailable");
        } else {
            let _ = writeln!(s, "receiver {pos} snr_db {snr:.3} weight {} rate {r:.9}", weights[pos]);
        }
    }
    s
}
