//! Uniform and non-uniform QPSK, 8-PSK, 16-APSK and 32-APSK constellations.
//!
//! Every constellation is built quadrant by quadrant. The two most
//! significant label bits (one bit per axis for QPSK) pick the quadrant, the
//! remaining bits pick a point inside it. A point inside the first quadrant
//! is described by a radius and a quadrant-relative angle measured from the
//! I axis, and is mirrored into the other quadrants through the sign of each
//! axis. Symbols are scaled to unit average energy after construction.
//!
//! | family  | stream 1 | stream 2   |
//! |---------|----------|------------|
//! | QPSK    | b1       | b2         |
//! | 8-PSK   | b1 b2    | b3         |
//! | 16-APSK | b1 b2    | b3 b4      |
//! | 32-APSK | b1 b2    | b3 b4 b5   |
//!
//! Bit `b1` is the most significant bit of the label.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{cos, deg_to_rad, sin, sqrt};
use crate::{Error, Result};

/// Minimum distance under which two symbols count as coincident.
const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstellationFamily {
    Qpsk,
    Psk8,
    Apsk16,
    Apsk32,
}

impl ConstellationFamily {
    pub const ALL: [ConstellationFamily; 4] = [Self::Qpsk, Self::Psk8, Self::Apsk16, Self::Apsk32];

    pub fn bits_per_symbol(self) -> u32 {
        match self {
            Self::Qpsk => 2,
            Self::Psk8 => 3,
            Self::Apsk16 => 4,
            Self::Apsk32 => 5,
        }
    }

    pub fn order(self) -> usize {
        1 << self.bits_per_symbol()
    }

    /// Short lowercase tag used in presets and configuration files.
    pub fn tag(self) -> &'static str {
        match self {
            Self::Qpsk => "qpsk",
            Self::Psk8 => "8psk",
            Self::Apsk16 => "16apsk",
            Self::Apsk32 => "32apsk",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag.to_ascii_lowercase().as_str() {
            "qpsk" => Some(Self::Qpsk),
            "8psk" | "8-psk" | "psk8" => Some(Self::Psk8),
            "16apsk" | "16-apsk" | "apsk16" => Some(Self::Apsk16),
            "32apsk" | "32-apsk" | "apsk32" => Some(Self::Apsk32),
            _ => None,
        }
    }
}

impl fmt::Display for ConstellationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One of the two layers of a hierarchical symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StreamId {
    /// High-protection layer, carried by the quadrant bits.
    One,
    /// Low-protection layer, carried by the bits inside the quadrant.
    Two,
}

/// Geometry parameters. `theta_deg` is always required; the ring ratios only
/// for the APSK families.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstellationParams {
    pub theta_deg: f64,
    pub gamma: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
}

impl ConstellationParams {
    pub fn psk(theta_deg: f64) -> Self {
        Self { theta_deg, ..Self::default() }
    }

    pub fn apsk16(theta_deg: f64, gamma: f64) -> Self {
        Self { theta_deg, gamma: Some(gamma), ..Self::default() }
    }

    pub fn apsk32(theta_deg: f64, gamma1: f64, gamma2: f64) -> Self {
        Self { theta_deg, gamma1: Some(gamma1), gamma2: Some(gamma2), ..Self::default() }
    }
}

/// Checks that `params` carries exactly the fields `family` needs and that
/// they are in range.
pub fn validate_params(family: ConstellationFamily, params: &ConstellationParams) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidParams(msg));
    let theta = params.theta_deg;
    if !theta.is_finite() || theta <= 0.0 {
        return bad(format!("theta must be a positive finite angle, got {theta}"));
    }
    let max_theta = match family {
        ConstellationFamily::Qpsk | ConstellationFamily::Psk8 => 90.0,
        ConstellationFamily::Apsk16 | ConstellationFamily::Apsk32 => 45.0,
    };
    if theta >= max_theta {
        return bad(format!("theta must be below {max_theta} deg for {family}, got {theta}"));
    }

    let check_ratio = |name: &str, v: Option<f64>| -> Result<f64> {
        match v {
            None => Err(Error::InvalidParams(format!("{name} is required for {family}"))),
            Some(v) if !v.is_finite() || v <= 1.0 => {
                Err(Error::InvalidParams(format!("{name} must exceed 1, got {v}")))
            }
            Some(v) => Ok(v),
        }
    };
    let reject = |name: &str, v: Option<f64>| -> Result<()> {
        match v {
            Some(_) => Err(Error::InvalidParams(format!("{name} not applicable to {family}"))),
            None => Ok(()),
        }
    };

    match family {
        ConstellationFamily::Qpsk | ConstellationFamily::Psk8 => {
            reject("gamma", params.gamma)?;
            reject("gamma1", params.gamma1)?;
            reject("gamma2", params.gamma2)?;
        }
        ConstellationFamily::Apsk16 => {
            check_ratio("gamma", params.gamma)?;
            reject("gamma1", params.gamma1)?;
            reject("gamma2", params.gamma2)?;
        }
        ConstellationFamily::Apsk32 => {
            reject("gamma", params.gamma)?;
            let g1 = check_ratio("gamma1", params.gamma1)?;
            let g2 = check_ratio("gamma2", params.gamma2)?;
            if g2 <= g1 {
                return bad(format!("gamma2 ({g2}) must exceed gamma1 ({g1})"));
            }
        }
    }
    Ok(())
}

/// Bit positions (1-based, `b1` most significant) carried by each stream.
pub fn stream_bits(family: ConstellationFamily) -> (Vec<u32>, Vec<u32>) {
    let m = family.bits_per_symbol();
    let s1 = stream_one_bits(family);
    ((1..=s1).collect(), (s1 + 1..=m).collect())
}

fn stream_one_bits(family: ConstellationFamily) -> u32 {
    match family {
        ConstellationFamily::Qpsk => 1,
        _ => 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqPoint {
    pub i: f64,
    pub q: f64,
}

impl IqPoint {
    pub fn norm_sqr(self) -> f64 {
        self.i * self.i + self.q * self.q
    }

    pub fn dist(self, other: IqPoint) -> f64 {
        let (di, dq) = (self.i - other.i, self.q - other.q);
        sqrt(di * di + dq * dq)
    }
}

/// An energy-normalized constellation. `points[label]` is the symbol carrying
/// bit label `label`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    family: ConstellationFamily,
    params: ConstellationParams,
    points: Vec<IqPoint>,
}

impl Constellation {
    pub fn family(&self) -> ConstellationFamily {
        self.family
    }

    pub fn params(&self) -> &ConstellationParams {
        &self.params
    }

    pub fn points(&self) -> &[IqPoint] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.family.bits_per_symbol()
    }

    pub fn stream_bit_count(&self, stream: StreamId) -> u32 {
        let s1 = stream_one_bits(self.family);
        match stream {
            StreamId::One => s1,
            StreamId::Two => self.bits_per_symbol() - s1,
        }
    }

    /// Value of the stream-1 bits of `label`.
    pub fn stream_one_value(&self, label: usize) -> usize {
        label >> self.stream_bit_count(StreamId::Two)
    }

    /// Value of the stream-2 bits of `label`.
    pub fn stream_two_value(&self, label: usize) -> usize {
        label & ((1 << self.stream_bit_count(StreamId::Two)) - 1)
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    /// Bit label of `label` as a string `b1 b2 ... bm`.
    pub fn label_string(&self, label: usize) -> String {
        let m = self.bits_per_symbol();
        (0..m).rev().map(|k| if (label >> k) & 1 == 1 { '1' } else { '0' }).collect()
    }
}

/// Radius (relative to the inner ring) and quadrant-relative angle in degrees
/// of each in-quadrant point, indexed by the in-quadrant code.
fn quadrant_layout(family: ConstellationFamily, p: &ConstellationParams) -> Vec<(f64, f64)> {
    let th = p.theta_deg;
    match family {
        ConstellationFamily::Qpsk => alloc::vec![(1.0, th)],
        ConstellationFamily::Psk8 => alloc::vec![(1.0, th), (1.0, 90.0 - th)],
        ConstellationFamily::Apsk16 => {
            let g = p.gamma.unwrap_or(1.0);
            // Gray along the outer arc, inner point closing the cycle.
            alloc::vec![(g, 45.0 - th), (g, 45.0), (1.0, 45.0), (g, 45.0 + th)]
        }
        ConstellationFamily::Apsk32 => {
            let (g1, g2) = (p.gamma1.unwrap_or(1.0), p.gamma2.unwrap_or(1.0));
            let outer = [45.0 - th, 45.0 - th / 3.0, 45.0 + th / 3.0, 45.0 + th];
            let middle = [15.0, 45.0, 75.0];
            // Gray sequence 000 001 011 010 110 111 101 100 walks the outer
            // ring, then the middle ring, then the inner point.
            let sequence: [(usize, (f64, f64)); 8] = [
                (0b000, (g2, outer[0])),
                (0b001, (g2, outer[1])),
                (0b011, (g2, outer[2])),
                (0b010, (g2, outer[3])),
                (0b110, (g1, middle[0])),
                (0b111, (g1, middle[1])),
                (0b101, (g1, middle[2])),
                (0b100, (1.0, 45.0)),
            ];
            let mut layout = alloc::vec![(0.0, 0.0); 8];
            for (code, point) in sequence {
                layout[code] = point;
            }
            layout
        }
    }
}

/// Builds the constellation for `family` with geometry `params`, normalized
/// to unit average energy.
pub fn build_constellation(
    family: ConstellationFamily,
    params: ConstellationParams,
) -> Result<Constellation> {
    validate_params(family, &params)?;
    let layout = quadrant_layout(family, &params);
    let in_quadrant = layout.len();
    let mut points = Vec::with_capacity(family.order());
    for label in 0..family.order() {
        let quadrant = label / in_quadrant;
        let (radius, alpha) = layout[label % in_quadrant];
        let si = if quadrant >> 1 == 0 { 1.0 } else { -1.0 };
        let sq = if quadrant & 1 == 0 { 1.0 } else { -1.0 };
        let a = deg_to_rad(alpha);
        points.push(IqPoint { i: si * radius * cos(a), q: sq * radius * sin(a) });
    }

    let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
    let scale = 1.0 / sqrt(energy);
    for p in &mut points {
        p.i *= scale;
        p.q *= scale;
    }

    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if points[a].dist(points[b]) < COINCIDENCE_TOL {
                return Err(Error::DegenerateGeometry(a, b));
            }
        }
    }
    Ok(Constellation { family, params, points })
}

/// A named, reusable geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub family: ConstellationFamily,
    pub params: ConstellationParams,
    pub hierarchical: bool,
}

impl Preset {
    pub fn build(&self) -> Result<Constellation> {
        build_constellation(self.family, self.params)
    }
}

const fn psk(name: &'static str, family: ConstellationFamily, theta: f64, h: bool) -> Preset {
    Preset {
        name,
        family,
        params: ConstellationParams { theta_deg: theta, gamma: None, gamma1: None, gamma2: None },
        hierarchical: h,
    }
}

const fn a16(name: &'static str, theta: f64, gamma: f64, h: bool) -> Preset {
    Preset {
        name,
        family: ConstellationFamily::Apsk16,
        params: ConstellationParams { theta_deg: theta, gamma: Some(gamma), gamma1: None, gamma2: None },
        hierarchical: h,
    }
}

const fn a32(name: &'static str, theta: f64, g1: f64, g2: f64, h: bool) -> Preset {
    Preset {
        name,
        family: ConstellationFamily::Apsk32,
        params: ConstellationParams { theta_deg: theta, gamma: None, gamma1: Some(g1), gamma2: Some(g2) },
        hierarchical: h,
    }
}

use ConstellationFamily::{Psk8, Qpsk};

/// Standard (non-hierarchical) layouts. The APSK ring ratios are the
/// rate-3/4 values of the standard, used for every code rate.
pub const STANDARD_PRESETS: [Preset; 4] = [
    psk("qpsk", Qpsk, 45.0, false),
    psk("8psk", Psk8, 22.5, false),
    a16("16apsk", 30.0, 2.85, false),
    a32("32apsk", 33.75, 2.84, 5.27, false),
];

/// The 22 hierarchical geometries used in the beam study.
pub const HIERARCHICAL_PRESETS: [Preset; 22] = [
    psk("hqpsk-45", Qpsk, 45.0, true),
    psk("hqpsk-42", Qpsk, 42.0, true),
    psk("hqpsk-39", Qpsk, 39.0, true),
    psk("hqpsk-36", Qpsk, 36.0, true),
    psk("hqpsk-33", Qpsk, 33.0, true),
    psk("hqpsk-30", Qpsk, 30.0, true),
    psk("hqpsk-27", Qpsk, 27.0, true),
    psk("hqpsk-24", Qpsk, 24.0, true),
    psk("hqpsk-18", Qpsk, 18.0, true),
    psk("h8psk-30", Psk8, 30.0, true),
    psk("h8psk-27", Psk8, 27.0, true),
    psk("h8psk-24", Psk8, 24.0, true),
    psk("h8psk-18", Psk8, 18.0, true),
    a16("h16apsk-31.5", 31.5, 2.8, true),
    a16("h16apsk-28.4", 28.4, 2.3, true),
    a16("h16apsk-25.1", 25.1, 1.9, true),
    a16("h16apsk-20.9", 20.9, 1.6, true),
    a32("h32apsk-32.3", 32.3, 2.4, 5.0, true),
    a32("h32apsk-30.2", 30.2, 1.8, 3.4, true),
    a32("h32apsk-28.4", 28.4, 1.6, 2.6, true),
    a32("h32apsk-25.6", 25.6, 1.6, 2.2, true),
    a32("h32apsk-17.4", 17.4, 1.8, 2.4, true),
];

/// Looks up an embedded preset by name.
pub fn preset(name: &str) -> Option<Preset> {
    STANDARD_PRESETS.iter().chain(HIERARCHICAL_PRESETS.iter()).find(|p| p.name == name).copied()
}
