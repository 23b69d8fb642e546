//! Spot-beam channel: location attenuation from the parabolic antenna
//! pattern `G(θ)/Gmax = (2 J1(u) / u)²` with `u = sin(θ) π D / λ`, weather
//! attenuation from an empirical CDF, and receiver sampling.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::Rng;

use crate::math::{asin, cos, deg_to_rad, log10, rad_to_deg, sin, sqrt};
use crate::{Error, Result};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// First positive zero of J1.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512_3;

/// Below this magnitude J1 is summed as a power series; above it the Hankel
/// asymptotic expansion is used.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax <= SERIES_LIMIT { j1_series(ax) } else { j1_asymptotic(ax) };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn j1_series(x: f64) -> f64 {
    let half = x / 2.0;
    let q = half * half;
    let mut term = half;
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= -q / (k * (k + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > half {
            break;
        }
        k += 1.0;
    }
    sum
}

/// `sqrt(2/(πx)) (P cos χ − Q sin χ)`, `χ = x − 3π/4`, truncated at the
/// smallest term.
fn j1_asymptotic(x: f64) -> f64 {
    const MU: f64 = 4.0;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    for k in 1..200u32 {
        let odd = (2 * k - 1) as f64;
        let next = term * (MU - odd * odd) / (k as f64 * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        // term is a_k / x^k; even k feed P, odd k feed Q, signs alternate
        // every two orders.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 0.75 * core::f64::consts::PI;
    sqrt(2.0 / (core::f64::consts::PI * x)) * (p * cos(chi) - q * sin(chi))
}

/// `2 J1(u) / u`, continuous through `u = 0`.
pub fn airy_amplitude(u: f64) -> f64 {
    if u.abs() < 1e-3 {
        let u2 = u * u;
        1.0 - u2 / 8.0 + u2 * u2 / 192.0
    } else {
        2.0 * bessel_j1(u) / u
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaModel {
    diameter_m: f64,
    frequency_hz: f64,
    edge_attenuation_db: f64,
}

impl AntennaModel {
    pub fn new(diameter_m: f64, frequency_hz: f64, edge_attenuation_db: f64) -> Result<Self> {
        let bad = |s: &str| Err(Error::InvalidAntenna(s.to_string()));
        if !(diameter_m.is_finite() && diameter_m > 0.0) {
            return bad("diameter must be positive");
        }
        if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
            return bad("frequency must be positive");
        }
        if !(edge_attenuation_db.is_finite() && edge_attenuation_db >= 0.0) {
            return bad("edge attenuation must be non-negative");
        }
        Ok(Self { diameter_m, frequency_hz, edge_attenuation_db })
    }

    /// 1.5 m dish at 20 GHz, beam edge 4 dB below the center.
    pub fn ka_band_default() -> Self {
        Self { diameter_m: 1.5, frequency_hz: 20e9, edge_attenuation_db: 4.0 }
    }

    pub fn diameter_m(&self) -> f64 {
        self.diameter_m
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn edge_attenuation_db(&self) -> f64 {
        self.edge_attenuation_db
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    fn aperture_factor(&self) -> f64 {
        core::f64::consts::PI * self.diameter_m / self.wavelength_m()
    }

    /// Off-axis angle of the first null, degrees.
    pub fn first_null_deg(&self) -> f64 {
        let s = J1_FIRST_ZERO / self.aperture_factor();
        if s >= 1.0 {
            90.0
        } else {
            rad_to_deg(asin(s))
        }
    }
}

/// Attenuation relative to boresight, in dB, at `offaxis_deg`. Only the main
/// lobe is modeled.
pub fn pattern_attenuation_db(a: &AntennaModel, offaxis_deg: f64) -> Result<f64> {
    if !(offaxis_deg.is_finite() && (0.0..90.0).contains(&offaxis_deg)) {
        return Err(Error::OutsideMainLobe(offaxis_deg));
    }
    let u = sin(deg_to_rad(offaxis_deg)) * a.aperture_factor();
    if u >= J1_FIRST_ZERO {
        return Err(Error::OutsideMainLobe(offaxis_deg));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let g = airy_amplitude(u);
    Ok(-20.0 * log10(g))
}

/// Off-axis angle, degrees, where the pattern reaches the edge attenuation.
/// The returned angle never overshoots: its attenuation is at most the edge
/// value.
pub fn edge_angle(a: &AntennaModel) -> Result<f64> {
    let target = a.edge_attenuation_db;
    if target == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = a.first_null_deg();
    if hi >= 90.0 {
        return Err(Error::InvalidAntenna("main lobe wider than the hemisphere".to_string()));
    }
    // Attenuation diverges at the null, so the root is bracketed.
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        match pattern_attenuation_db(a, mid) {
            Ok(att) if att <= target => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(lo)
}

/// Piecewise-linear CDF of weather attenuation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherCdf {
    points: Vec<(f64, f64)>,
}

impl WeatherCdf {
    /// `points` are `(attenuation dB, cumulative probability)`. A first
    /// probability above zero is a point mass at the first attenuation.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |s: alloc::string::String| Err(Error::InvalidWeatherCdf(s));
        if points.is_empty() {
            return bad("no points".to_string());
        }
        for (k, &(a, p)) in points.iter().enumerate() {
            if !(a.is_finite() && a >= 0.0) {
                return bad(format!("point {k}: attenuation {a} must be finite and non-negative"));
            }
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("point {k}: probability {p} outside [0, 1]"));
            }
            if k > 0 {
                let (pa, pp) = points[k - 1];
                if a <= pa {
                    return bad(format!("point {k}: attenuations must strictly increase"));
                }
                if p < pp {
                    return bad(format!("point {k}: probabilities must not decrease"));
                }
            }
        }
        if points.last().map(|&(_, p)| p) != Some(1.0) {
            return bad("last probability must be 1".to_string());
        }
        Ok(Self { points })
    }

    /// No weather attenuation at all.
    pub fn clear_sky() -> Self {
        Self { points: alloc::vec![(0.0, 1.0)] }
    }

    /// Placeholder distribution: 98% of the mass below 1 dB with a thin tail
    /// out to 20 dB. Not a measured distribution.
    pub fn placeholder() -> Self {
        Self {
            points: alloc::vec![
                (0.0, 0.0),
                (0.1, 0.40),
                (0.3, 0.75),
                (0.6, 0.92),
                (1.0, 0.98),
                (2.0, 0.99),
                (5.0, 0.997),
                (10.0, 0.999),
                (20.0, 1.0),
            ],
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn cdf(&self, attenuation_db: f64) -> f64 {
        let pts = &self.points;
        if attenuation_db < pts[0].0 {
            return 0.0;
        }
        let k = pts.partition_point(|&(a, _)| a <= attenuation_db);
        if k == pts.len() {
            return 1.0;
        }
        let (a0, p0) = pts[k - 1];
        let (a1, p1) = pts[k];
        p0 + (attenuation_db - a0) / (a1 - a0) * (p1 - p0)
    }

    /// Inverse CDF at `u ∈ [0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let pts = &self.points;
        let k = pts.partition_point(|&(_, p)| p < u);
        if k == 0 {
            return pts[0].0;
        }
        if k == pts.len() {
            return pts[k - 1].0;
        }
        let (a0, p0) = pts[k - 1];
        let (a1, p1) = pts[k];
        a0 + (u - p0) / (p1 - p0) * (a1 - a0)
    }
}

/// One terminal of the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    pub id: usize,
    pub snr_db: f64,
    pub location_attenuation_db: f64,
    pub weather_attenuation_db: f64,
}

impl Receiver {
    pub fn compose(id: usize, snr_max_db: f64, location_db: f64, weather_db: f64) -> Self {
        Self {
            id,
            snr_db: snr_max_db - location_db - weather_db,
            location_attenuation_db: location_db,
            weather_attenuation_db: weather_db,
        }
    }

    /// A receiver known only by its SNR.
    pub fn with_snr(id: usize, snr_db: f64) -> Self {
        Self { id, snr_db, location_attenuation_db: 0.0, weather_attenuation_db: 0.0 }
    }
}

/// Draws `n` receivers spread uniformly by area over the beam disk (angular
/// radius [`edge_angle`]) with independent weather attenuation.
pub fn sample_receivers<R: Rng + ?Sized>(
    n: usize,
    snr_max_db: f64,
    antenna: &AntennaModel,
    weather: &WeatherCdf,
    rng: &mut R,
) -> Result<Vec<Receiver>> {
    if n == 0 {
        return Err(Error::InvalidScenario("at least one receiver is required".to_string()));
    }
    if !snr_max_db.is_finite() {
        return Err(Error::NonFiniteSnr(snr_max_db));
    }
    let radius = edge_angle(antenna)?;
    let mut out = Vec::with_capacity(n);
    for id in 0..n {
        let u_pos: f64 = rng.random();
        let u_weather: f64 = rng.random();
        let offaxis = radius * sqrt(u_pos);
        let location = pattern_attenuation_db(antenna, offaxis)?;
        let weather_db = weather.quantile(u_weather);
        out.push(Receiver::compose(id, snr_max_db, location, weather_db));
    }
    Ok(out)
}
