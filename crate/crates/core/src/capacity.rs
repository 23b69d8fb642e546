//! AWGN mutual information per hierarchical stream, SNR decoding thresholds
//! derived from it, and the modcod table consumed by the rate-vector
//! enumeration.
//!
//! The channel is `y = x + n` with unit-energy symbols and circular complex
//! Gaussian noise of variance `N0`, so the SNR is `Es/N0 = 1/N0`. For a
//! uniform input the three quantities of interest are
//!
//! - `I(X;Y)` for the whole symbol,
//! - `I(B1;Y)` for stream 1, the stream-2 bits being marginalized,
//! - `I(B2;Y|B1)` for stream 2, decoded after stream 1.
//!
//! They are computed with a tensor Gauss–Hermite rule over the noise, or by
//! Monte Carlo with an explicit seed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constellation::{
    build_constellation, Constellation, ConstellationFamily, ConstellationParams, Preset, StreamId,
    HIERARCHICAL_PRESETS, STANDARD_PRESETS,
};
use crate::math::{db_to_linear, exp, log2, sqrt};
use crate::{Error, Result};

/// Default number of Gauss–Hermite nodes per axis.
pub const DEFAULT_QUADRATURE_ORDER: usize = 24;

/// Threshold of the most robust standard modcod (QPSK 1/4), used to
/// calibrate the capacity-to-code gap.
pub const QPSK_QUARTER_THRESHOLD_DB: f64 = -2.35;

/// Margin applied when no calibration is requested.
pub const DEFAULT_MARGIN_DB: f64 = 1.0;

/// Thresholds are searched on a grid of this step, in dB.
pub const THRESHOLD_STEP_DB: f64 = 0.01;

const SEARCH_LO_CDB: i32 = -3000;
const SEARCH_HI_CDB: i32 = 6000;

/// What a receiver decodes from a transmitted symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    /// All bits of a (non-hierarchical) symbol.
    Whole,
    Stream(StreamId),
}

impl Layer {
    pub const ONE: Layer = Layer::Stream(StreamId::One);
    pub const TWO: Layer = Layer::Stream(StreamId::Two);

    pub fn bits(self, c: &Constellation) -> u32 {
        match self {
            Layer::Whole => c.bits_per_symbol(),
            Layer::Stream(s) => c.stream_bit_count(s),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Layer::Whole => "whole",
            Layer::Stream(StreamId::One) => "1",
            Layer::Stream(StreamId::Two) => "2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Layer> {
        match tag {
            "whole" | "all" => Some(Layer::Whole),
            "1" | "s1" | "stream1" => Some(Layer::ONE),
            "2" | "s2" | "stream2" => Some(Layer::TWO),
            _ => None,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MiMethod {
    Quadrature { order: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for MiMethod {
    fn default() -> Self {
        MiMethod::Quadrature { order: DEFAULT_QUADRATURE_ORDER }
    }
}

/// Mutual information in bits/symbol. `std_error` is zero for quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// The three informations of one constellation at one SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerInformation {
    pub whole: MiEstimate,
    pub stream_one: MiEstimate,
    pub stream_two: MiEstimate,
}

impl LayerInformation {
    pub fn get(&self, layer: Layer) -> MiEstimate {
        match layer {
            Layer::Whole => self.whole,
            Layer::Stream(StreamId::One) => self.stream_one,
            Layer::Stream(StreamId::Two) => self.stream_two,
        }
    }
}

/// Nodes and weights of the `order`-point Gauss–Hermite rule for
/// `∫ exp(-t²) f(t) dt`, by Newton iteration on the normalized Hermite
/// recurrence.
pub fn gauss_hermite(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let n = order;
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => sqrt((2 * n + 1) as f64) - 1.85575 * libm::pow((2 * n + 1) as f64, -1.0 / 6.0),
            1 => z - 1.14 * libm::pow(n as f64, 0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * sqrt(2.0 / jf) * p2 - sqrt((jf - 1.0) / jf) * p3;
            }
            pp = sqrt(2.0 * n as f64) * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Pairwise differences `x - x'` scaled by `1/sqrt(N0)`, row-major by the
/// transmitted label.
fn scaled_differences(c: &Constellation, snr_db: f64) -> Vec<(f64, f64)> {
    let scale = sqrt(db_to_linear(snr_db));
    let pts = c.points();
    let mut d = Vec::with_capacity(pts.len() * pts.len());
    for x in pts {
        for xp in pts {
            d.push(((x.i - xp.i) * scale, (x.q - xp.q) * scale));
        }
    }
    d
}

/// `(log2 S_all, log2 S_group)` for transmitted label `tx` and normalized
/// noise `(ui, uq)`, where `S = Σ exp(-(|d+u|² - |u|²))`.
#[inline]
fn log_sums(
    c: &Constellation,
    diffs: &[(f64, f64)],
    tx: usize,
    ui: f64,
    uq: f64,
) -> (f64, f64) {
    let m = c.points().len();
    let row = &diffs[tx * m..(tx + 1) * m];
    let group = c.stream_one_value(tx);
    let mut all = 0.0;
    let mut grp = 0.0;
    for (label, &(di, dq)) in row.iter().enumerate() {
        let e = exp(-(di * di + dq * dq + 2.0 * (di * ui + dq * uq)));
        all += e;
        if c.stream_one_value(label) == group {
            grp += e;
        }
    }
    (log2(all), log2(grp))
}

/// Whole-symbol, stream-1 and stream-2 information of `c` at `snr_db`.
pub fn layer_information(c: &Constellation, snr_db: f64, method: MiMethod) -> Result<LayerInformation> {
    if !snr_db.is_finite() {
        return Err(Error::NonFiniteSnr(snr_db));
    }
    let m_bits = c.bits_per_symbol() as f64;
    let s1 = c.stream_bit_count(StreamId::One) as f64;
    let s2 = c.stream_bit_count(StreamId::Two) as f64;
    let diffs = scaled_differences(c, snr_db);
    let order = c.points().len();

    let clamp = |v: f64, hi: f64| v.clamp(0.0, hi);
    match method {
        MiMethod::Quadrature { order: q } => {
            let (nodes, weights) = gauss_hermite(q);
            // Every constellation is mirror-symmetric about both axes with
            // quadrants mapped onto stream-1 groups, and the rule is
            // symmetric, so first-quadrant symbols carry the full average.
            let first_quadrant: Vec<usize> =
                (0..order).filter(|&l| c.points()[l].i > 0.0 && c.points()[l].q > 0.0).collect();
            let mut sum_all = 0.0;
            let mut sum_grp = 0.0;
            for &tx in &first_quadrant {
                for (a, &ta) in nodes.iter().enumerate() {
                    for (b, &tb) in nodes.iter().enumerate() {
                        let w = weights[a] * weights[b];
                        let (la, lg) = log_sums(c, &diffs, tx, ta, tb);
                        sum_all += w * la;
                        sum_grp += w * lg;
                    }
                }
            }
            let norm = core::f64::consts::PI * first_quadrant.len() as f64;
            let (e_all, e_grp) = (sum_all / norm, sum_grp / norm);
            let est = |v: f64| MiEstimate { value: v, std_error: 0.0 };
            Ok(LayerInformation {
                whole: est(clamp(m_bits - e_all, m_bits)),
                stream_one: est(clamp(s1 - (e_all - e_grp), s1)),
                stream_two: est(clamp(s2 - e_grp, s2)),
            })
        }
        MiMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidParams("Monte Carlo needs at least 2 samples".to_string()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sigma = core::f64::consts::FRAC_1_SQRT_2;
            let mut acc = [Welford::default(); 3];
            for _ in 0..samples {
                let tx = rng.random_range(0..order);
                let ui: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
                let uq: f64 = rng.sample::<f64, _>(StandardNormal) * sigma;
                let (la, lg) = log_sums(c, &diffs, tx, ui, uq);
                acc[0].push(m_bits - la);
                acc[1].push(s1 - (la - lg));
                acc[2].push(s2 - lg);
            }
            let est = |w: &Welford, hi: f64| MiEstimate { value: clamp(w.mean, hi), std_error: w.std_error() };
            Ok(LayerInformation {
                whole: est(&acc[0], m_bits),
                stream_one: est(&acc[1], s1),
                stream_two: est(&acc[2], s2),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        sqrt(self.m2 / (self.n - 1) as f64 / self.n as f64)
    }
}

/// Mutual information of one layer of `c` at `snr_db`.
pub fn stream_mutual_information(
    c: &Constellation,
    layer: Layer,
    snr_db: f64,
    method: MiMethod,
) -> Result<MiEstimate> {
    Ok(layer_information(c, snr_db, method)?.get(layer))
}

/// Quadrature information of one layer evaluated on the 0.01 dB grid and
/// memoized, so thresholds for several code rates share evaluations.
#[derive(Debug, Clone)]
pub struct InformationCurve<'a> {
    constellation: &'a Constellation,
    layer: Layer,
    order: usize,
    cache: BTreeMap<i32, f64>,
}

impl<'a> InformationCurve<'a> {
    pub fn new(constellation: &'a Constellation, layer: Layer) -> Self {
        Self { constellation, layer, order: DEFAULT_QUADRATURE_ORDER, cache: BTreeMap::new() }
    }

    /// Information at `centi_db / 100` dB.
    pub fn at_grid(&mut self, centi_db: i32) -> f64 {
        if let Some(&v) = self.cache.get(&centi_db) {
            return v;
        }
        let snr = centi_db as f64 * THRESHOLD_STEP_DB;
        let v = stream_mutual_information(
            self.constellation,
            self.layer,
            snr,
            MiMethod::Quadrature { order: self.order },
        )
        .map(|e| e.value)
        .unwrap_or(0.0);
        self.cache.insert(centi_db, v);
        v
    }

    /// Smallest grid SNR, in dB, whose information reaches
    /// `code_rate * bits`, without margin.
    pub fn raw_threshold(&mut self, code_rate: f64) -> Result<f64> {
        if !(code_rate > 0.0 && code_rate <= 1.0) {
            return Err(Error::InvalidCodeRate(code_rate));
        }
        let bits = self.layer.bits(self.constellation);
        let target = code_rate * bits as f64;
        if code_rate >= 1.0 || self.at_grid(SEARCH_HI_CDB) < target {
            return Err(Error::UnreachableRate { target, bits });
        }
        let mut lo = SEARCH_LO_CDB;
        let mut hi = SEARCH_HI_CDB;
        if self.at_grid(lo) >= target {
            return Ok(lo as f64 * THRESHOLD_STEP_DB);
        }
        // Invariant: info(lo) < target <= info(hi).
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.at_grid(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi as f64 * THRESHOLD_STEP_DB)
    }

    pub fn threshold(&mut self, code_rate: f64, margin_db: f64) -> Result<f64> {
        Ok(self.raw_threshold(code_rate)? + margin_db)
    }
}

/// SNR (dB) at which layer `layer` of `c` supports `code_rate`, plus
/// `margin_db`. Resolution is [`THRESHOLD_STEP_DB`].
pub fn decoding_threshold(c: &Constellation, layer: Layer, code_rate: f64, margin_db: f64) -> Result<f64> {
    InformationCurve::new(c, layer).threshold(code_rate, margin_db)
}

/// Margin that puts the derived uniform-QPSK rate-1/4 threshold at
/// [`QPSK_QUARTER_THRESHOLD_DB`].
pub fn calibrated_margin() -> f64 {
    let qpsk = build_constellation(ConstellationFamily::Qpsk, ConstellationParams::psk(45.0))
        .expect("uniform QPSK is valid");
    let raw = decoding_threshold(&qpsk, Layer::Whole, 0.25, 0.0).expect("QPSK 1/4 is reachable");
    QPSK_QUARTER_THRESHOLD_DB - raw
}

/// A code rate kept as an exact fraction so table keys compare exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodeRate {
    num: u32,
    den: u32,
}

impl CodeRate {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::MalformedModCod(format!("code rate {num}/{den} must lie in (0, 1]")));
        }
        let g = gcd(num, den);
        Ok(Self { num: num / g, den: den / g })
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::MalformedModCod(format!("cannot parse code rate {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n = n.trim().parse().map_err(|_| bad())?;
                let d = d.trim().parse().map_err(|_| bad())?;
                Self::new(n, d)
            }
            None => Self::new(s.parse().map_err(|_| bad())?, 1),
        }
    }
}

impl PartialOrd for CodeRate {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CodeRate {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        (self.num as u64 * other.den as u64).cmp(&(other.num as u64 * self.den as u64))
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The eleven LDPC code rates of the standard, lowest first.
pub const STANDARD_CODE_RATES: [(u32, u32); 11] =
    [(1, 4), (1, 3), (2, 5), (1, 2), (3, 5), (2, 3), (3, 4), (4, 5), (5, 6), (8, 9), (9, 10)];

/// Code rates the standard defines for each modulation.
pub fn standard_rates(family: ConstellationFamily) -> &'static [(u32, u32)] {
    match family {
        ConstellationFamily::Qpsk => &STANDARD_CODE_RATES,
        ConstellationFamily::Psk8 => &[(3, 5), (2, 3), (3, 4), (5, 6), (8, 9), (9, 10)],
        ConstellationFamily::Apsk16 => &STANDARD_CODE_RATES[5..],
        ConstellationFamily::Apsk32 => &STANDARD_CODE_RATES[6..],
    }
}

/// A constellation geometry with the name modcod rows refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedConstellation {
    pub name: String,
    pub family: ConstellationFamily,
    pub params: ConstellationParams,
}

impl From<&Preset> for NamedConstellation {
    fn from(p: &Preset) -> Self {
        Self { name: p.name.to_string(), family: p.family, params: p.params }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdSpec {
    Explicit(f64),
    Derive,
}

/// One row of a modcod table before thresholds are resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ModCodEntry {
    pub constellation: NamedConstellation,
    pub layer: Layer,
    pub code_rate: CodeRate,
    pub threshold: ThresholdSpec,
}

impl ModCodEntry {
    pub fn key(&self) -> String {
        format!("({}, {}, {})", self.constellation.name, self.layer, self.code_rate)
    }
}

/// A decodable transmission option.
#[derive(Debug, Clone, PartialEq)]
pub struct ModCod {
    pub id: usize,
    pub constellation: NamedConstellation,
    pub layer: Layer,
    pub code_rate: CodeRate,
    /// Bits per symbol delivered to the receiver of this layer.
    pub spectral_efficiency: f64,
    pub threshold_db: f64,
}

impl ModCod {
    pub fn label(&self) -> String {
        match self.layer {
            Layer::Whole => format!("{} {}", self.constellation.name, self.code_rate),
            l => format!("{} s{} {}", self.constellation.name, l, self.code_rate),
        }
    }
}

/// Modcods sorted by threshold with a running best spectral efficiency, for
/// "best decodable option at this SNR" queries.
#[derive(Debug, Clone, PartialEq, Default)]
struct DecodableIndex {
    thresholds: Vec<f64>,
    best_so_far: Vec<usize>,
}

impl DecodableIndex {
    fn build(ids: &[usize], modcods: &[ModCod]) -> Self {
        let mut ids = ids.to_vec();
        ids.sort_by(|&a, &b| modcods[a].threshold_db.total_cmp(&modcods[b].threshold_db).then(a.cmp(&b)));
        let mut best_so_far = Vec::with_capacity(ids.len());
        let mut best: Option<usize> = None;
        for &id in &ids {
            best = match best {
                Some(b) if modcods[b].spectral_efficiency >= modcods[id].spectral_efficiency => Some(b),
                _ => Some(id),
            };
            best_so_far.push(best.unwrap());
        }
        Self { thresholds: ids.iter().map(|&i| modcods[i].threshold_db).collect(), best_so_far }
    }

    /// Threshold comparison is inclusive.
    fn best(&self, snr_db: f64) -> Option<usize> {
        let count = self.thresholds.partition_point(|&t| t <= snr_db);
        count.checked_sub(1).map(|k| self.best_so_far[k])
    }

    fn min_threshold(&self) -> Option<f64> {
        self.thresholds.first().copied()
    }
}

/// Stream-1 and stream-2 options of one hierarchical constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalGroup {
    pub constellation: String,
    stream_one: DecodableIndex,
    stream_two: DecodableIndex,
}

impl HierarchicalGroup {
    pub fn best_stream_one(&self, snr_db: f64) -> Option<usize> {
        self.stream_one.best(snr_db)
    }

    pub fn best_stream_two(&self, snr_db: f64) -> Option<usize> {
        self.stream_two.best(snr_db)
    }
}

/// A resolved modcod table, sorted by threshold. `modcods[id].id == id`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModCodTable {
    modcods: Vec<ModCod>,
    whole: DecodableIndex,
    groups: Vec<HierarchicalGroup>,
}

impl ModCodTable {
    pub fn modcods(&self) -> &[ModCod] {
        &self.modcods
    }

    pub fn get(&self, id: usize) -> &ModCod {
        &self.modcods[id]
    }

    pub fn len(&self) -> usize {
        self.modcods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modcods.is_empty()
    }

    pub fn hierarchical_groups(&self) -> &[HierarchicalGroup] {
        &self.groups
    }

    /// Highest-efficiency whole-symbol modcod decodable at `snr_db`.
    pub fn best_whole(&self, snr_db: f64) -> Option<&ModCod> {
        self.whole.best(snr_db).map(|id| &self.modcods[id])
    }

    /// Lowest whole-symbol threshold; receivers below it are unavailable.
    pub fn min_whole_threshold(&self) -> Option<f64> {
        self.whole.min_threshold()
    }

    /// Keeps only the rows accepted by `keep`, re-indexing ids.
    pub fn filtered(&self, mut keep: impl FnMut(&ModCod) -> bool) -> Result<ModCodTable> {
        let rows: Vec<ModCod> = self.modcods.iter().filter(|m| keep(m)).cloned().collect();
        ModCodTable::from_resolved(rows)
    }

    fn from_resolved(mut rows: Vec<ModCod>) -> Result<ModCodTable> {
        if rows.is_empty() {
            return Err(Error::EmptyTable);
        }
        rows.sort_by(|a, b| {
            a.threshold_db
                .total_cmp(&b.threshold_db)
                .then_with(|| a.constellation.name.cmp(&b.constellation.name))
                .then(a.layer.cmp(&b.layer))
                .then(a.code_rate.cmp(&b.code_rate))
        });
        for (id, row) in rows.iter_mut().enumerate() {
            row.id = id;
        }

        // Per (constellation, layer): thresholds must not decrease with
        // spectral efficiency.
        let mut by_group: BTreeMap<(String, Layer), Vec<usize>> = BTreeMap::new();
        for row in &rows {
            by_group.entry((row.constellation.name.clone(), row.layer)).or_default().push(row.id);
        }
        for ((name, layer), ids) in &by_group {
            for &a in ids {
                for &b in ids {
                    let (ra, rb) = (&rows[a], &rows[b]);
                    if ra.spectral_efficiency < rb.spectral_efficiency && ra.threshold_db > rb.threshold_db {
                        return Err(Error::MalformedModCod(format!(
                            "thresholds of ({name}, {layer}) decrease with code rate: {} at {} dB vs {} at {} dB",
                            ra.code_rate, ra.threshold_db, rb.code_rate, rb.threshold_db
                        )));
                    }
                }
            }
        }

        let whole_ids: Vec<usize> = rows.iter().filter(|m| m.layer == Layer::Whole).map(|m| m.id).collect();
        let whole = DecodableIndex::build(&whole_ids, &rows);
        let mut groups = Vec::new();
        let names: Vec<String> = by_group.keys().map(|(n, _)| n.clone()).collect();
        let mut seen: Vec<&String> = Vec::new();
        for name in &names {
            if seen.contains(&name) {
                continue;
            }
            seen.push(name);
            let one = by_group.get(&(name.clone(), Layer::ONE));
            let two = by_group.get(&(name.clone(), Layer::TWO));
            if let (Some(one), Some(two)) = (one, two) {
                groups.push(HierarchicalGroup {
                    constellation: name.clone(),
                    stream_one: DecodableIndex::build(one, &rows),
                    stream_two: DecodableIndex::build(two, &rows),
                });
            }
        }
        Ok(ModCodTable { modcods: rows, whole, groups })
    }
}

/// Resolves `entries` into a table. `Derive` rows get
/// [`decoding_threshold`] with `margin_db`.
pub fn load_modcod_table(entries: &[ModCodEntry], margin_db: f64) -> Result<ModCodTable> {
    if entries.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut geometries: BTreeMap<String, (ConstellationFamily, ConstellationParams)> = BTreeMap::new();
    let mut keys: BTreeMap<(String, Layer, (u32, u32)), ()> = BTreeMap::new();
    for e in entries {
        let name = &e.constellation.name;
        match geometries.get(name) {
            Some(&(f, p)) if f != e.constellation.family || p != e.constellation.params => {
                return Err(Error::MalformedModCod(format!(
                    "constellation {name} is used with two different geometries"
                )));
            }
            Some(_) => {}
            None => {
                geometries.insert(name.clone(), (e.constellation.family, e.constellation.params));
            }
        }
        if keys.insert((name.clone(), e.layer, (e.code_rate.num, e.code_rate.den)), ()).is_some() {
            return Err(Error::DuplicateModCod(e.key()));
        }
        if let ThresholdSpec::Explicit(t) = e.threshold {
            if !t.is_finite() {
                return Err(Error::MalformedModCod(format!("{}: threshold must be finite", e.key())));
            }
        }
    }

    let mut built: BTreeMap<String, Constellation> = BTreeMap::new();
    for (name, &(family, params)) in &geometries {
        let c = build_constellation(family, params)
            .map_err(|err| Error::MalformedModCod(format!("constellation {name}: {err}")))?;
        built.insert(name.clone(), c);
    }

    // One memoized curve per (constellation, layer).
    let mut curves: BTreeMap<(String, Layer), InformationCurve<'_>> = BTreeMap::new();
    let mut rows = Vec::with_capacity(entries.len());
    for e in entries {
        let c = &built[&e.constellation.name];
        let bits = e.layer.bits(c);
        let threshold_db = match e.threshold {
            ThresholdSpec::Explicit(t) => t,
            ThresholdSpec::Derive => curves
                .entry((e.constellation.name.clone(), e.layer))
                .or_insert_with(|| InformationCurve::new(c, e.layer))
                .threshold(e.code_rate.value(), margin_db)
                .map_err(|err| Error::MalformedModCod(format!("{}: {err}", e.key())))?,
        };
        rows.push(ModCod {
            id: 0,
            constellation: e.constellation.clone(),
            layer: e.layer,
            code_rate: e.code_rate,
            spectral_efficiency: bits as f64 * e.code_rate.value(),
            threshold_db,
        });
    }
    ModCodTable::from_resolved(rows)
}

/// The 28 standard whole-symbol modcods, every threshold derived.
pub fn standard_entries() -> Vec<ModCodEntry> {
    let mut out = Vec::new();
    for p in &STANDARD_PRESETS {
        for &(n, d) in standard_rates(p.family) {
            out.push(ModCodEntry {
                constellation: p.into(),
                layer: Layer::Whole,
                code_rate: CodeRate::new(n, d).expect("standard rate"),
                threshold: ThresholdSpec::Derive,
            });
        }
    }
    out
}

/// Stream-1 and stream-2 modcods at every standard code rate for each
/// hierarchical preset of the listed families.
pub fn hierarchical_entries(families: &[ConstellationFamily]) -> Vec<ModCodEntry> {
    let mut out = Vec::new();
    for p in HIERARCHICAL_PRESETS.iter().filter(|p| families.contains(&p.family)) {
        for layer in [Layer::ONE, Layer::TWO] {
            for &(n, d) in &STANDARD_CODE_RATES {
                out.push(ModCodEntry {
                    constellation: p.into(),
                    layer,
                    code_rate: CodeRate::new(n, d).expect("standard rate"),
                    threshold: ThresholdSpec::Derive,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn qpsk(theta: f64) -> Constellation {
        build_constellation(ConstellationFamily::Qpsk, ConstellationParams::psk(theta)).unwrap()
    }

    #[test]
    fn gauss_hermite_integrates_polynomials_exactly() {
        let (x, w) = gauss_hermite(24);
        let pi = core::f64::consts::PI;
        let moment = |k: i32| x.iter().zip(&w).map(|(&t, &wt)| wt * crate::math::powi(t, k)).sum::<f64>();
        assert!((moment(0) - sqrt(pi)).abs() < 1e-13);
        assert!(moment(1).abs() < 1e-13);
        assert!((moment(2) - sqrt(pi) / 2.0).abs() < 1e-13);
        assert!((moment(4) - 3.0 * sqrt(pi) / 4.0).abs() < 1e-12);
        // t^10 has moment 945 sqrt(pi) / 32.
        assert!((moment(10) - 945.0 * sqrt(pi) / 32.0).abs() < 1e-9);
    }

    #[test]
    fn information_limits() {
        let c = qpsk(45.0);
        let hi = layer_information(&c, 60.0, MiMethod::default()).unwrap();
        assert!((hi.whole.value - 2.0).abs() < 1e-9);
        let lo = layer_information(&c, -60.0, MiMethod::default()).unwrap();
        assert!(lo.whole.value < 1e-5);
        assert!(lo.stream_one.value < 1e-5 && lo.stream_two.value < 1e-5);
    }

    #[test]
    fn uniform_qpsk_streams_are_two_bpsk_channels() {
        // With uniform QPSK each bit is an independent BPSK at half the energy.
        let c = qpsk(45.0);
        let info = layer_information(&c, 3.0, MiMethod::default()).unwrap();
        assert!((info.stream_one.value - info.stream_two.value).abs() < 1e-9);
        assert!((info.whole.value - 2.0 * info.stream_one.value).abs() < 1e-9);
    }

    #[test]
    fn non_finite_snr_is_rejected() {
        let c = qpsk(45.0);
        assert!(matches!(
            stream_mutual_information(&c, Layer::Whole, f64::NAN, MiMethod::default()),
            Err(Error::NonFiniteSnr(_))
        ));
    }

    #[test]
    fn thresholds_grow_with_code_rate() {
        let c = qpsk(45.0);
        let mut curve = InformationCurve::new(&c, Layer::Whole);
        let lo = curve.threshold(0.5, 0.0).unwrap();
        let hi = curve.threshold(0.9, 0.0).unwrap();
        assert!(hi > lo);
        assert!(matches!(curve.threshold(1.0, 0.0), Err(Error::UnreachableRate { .. })));
        assert!(matches!(curve.threshold(0.0, 0.0), Err(Error::InvalidCodeRate(_))));
    }

    #[test]
    fn code_rate_parsing() {
        assert_eq!(CodeRate::parse("2/4").unwrap(), CodeRate::new(1, 2).unwrap());
        assert_eq!(CodeRate::parse(" 9/10 ").unwrap().to_string(), "9/10");
        assert!(CodeRate::parse("5/4").is_err());
        assert!(CodeRate::parse("abc").is_err());
        assert!(CodeRate::new(1, 3).unwrap() < CodeRate::new(2, 5).unwrap());
    }

    fn qpsk_entry(rate: (u32, u32), threshold: ThresholdSpec) -> ModCodEntry {
        ModCodEntry {
            constellation: (&STANDARD_PRESETS[0]).into(),
            layer: Layer::Whole,
            code_rate: CodeRate::new(rate.0, rate.1).unwrap(),
            threshold,
        }
    }

    #[test]
    fn explicit_row_keeps_its_threshold() {
        let t = load_modcod_table(&[qpsk_entry((1, 4), ThresholdSpec::Explicit(-2.35))], 1.0).unwrap();
        assert_eq!(t.get(0).threshold_db, -2.35);
        assert!((t.get(0).spectral_efficiency - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derived_row_matches_decoding_threshold() {
        let t = load_modcod_table(&[qpsk_entry((1, 2), ThresholdSpec::Derive)], 1.3).unwrap();
        let direct = decoding_threshold(&qpsk(45.0), Layer::Whole, 0.5, 1.3).unwrap();
        assert_eq!(t.get(0).threshold_db, direct);
    }

    #[test]
    fn duplicate_rows_are_rejected() {
        let rows = vec![
            qpsk_entry((1, 4), ThresholdSpec::Explicit(-2.35)),
            qpsk_entry((2, 8), ThresholdSpec::Explicit(-2.0)),
        ];
        assert!(matches!(load_modcod_table(&rows, 0.0), Err(Error::DuplicateModCod(_))));
        assert!(matches!(load_modcod_table(&[], 0.0), Err(Error::EmptyTable)));
    }

    #[test]
    fn decreasing_explicit_thresholds_are_rejected() {
        let rows = vec![
            qpsk_entry((1, 4), ThresholdSpec::Explicit(1.0)),
            qpsk_entry((1, 2), ThresholdSpec::Explicit(0.0)),
        ];
        assert!(matches!(load_modcod_table(&rows, 0.0), Err(Error::MalformedModCod(_))));
    }

    #[test]
    fn best_whole_is_inclusive() {
        let rows = vec![
            qpsk_entry((1, 4), ThresholdSpec::Explicit(-2.35)),
            qpsk_entry((1, 2), ThresholdSpec::Explicit(1.0)),
        ];
        let t = load_modcod_table(&rows, 0.0).unwrap();
        assert!(t.best_whole(-2.36).is_none());
        assert_eq!(t.best_whole(-2.35).unwrap().code_rate.to_string(), "1/4");
        assert_eq!(t.best_whole(f64::INFINITY).unwrap().code_rate.to_string(), "1/2");
        assert_eq!(t.min_whole_threshold(), Some(-2.35));
    }

    #[test]
    fn default_entry_counts() {
        assert_eq!(standard_entries().len(), 28);
        assert_eq!(hierarchical_entries(&ConstellationFamily::ALL).len(), 22 * 2 * 11);
    }
}
