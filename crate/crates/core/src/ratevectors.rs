//! Achievable rate vectors.
//!
//! A plain modcod serves one receiver, giving a vector with one non-zero
//! entry. A hierarchical constellation serves two receivers at once: stream 1
//! goes to the weaker receiver of the pair and stream 2 to the stronger,
//! giving a vector with two non-zero entries. Vectors are indexed by receiver
//! *slot*, the position of the receiver in the list handed to the LP.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::capacity::{Layer, ModCodTable};
use crate::channel::Receiver;
use crate::{Error, Result};

/// Which modcod serves which receiver slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    pub modcod: usize,
    pub slot: usize,
}

/// Sparse rate vector: `(slot, rate)` pairs sorted by slot, rates in
/// bits/symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector {
    entries: Vec<(usize, f64)>,
    provenance: Vec<Assignment>,
}

impl RateVector {
    /// Builds a vector from `(slot, rate, modcod)` triples. Slots must be
    /// distinct and rates positive.
    pub fn new(parts: impl IntoIterator<Item = (usize, f64, usize)>) -> Result<Self> {
        let mut parts: Vec<(usize, f64, usize)> = parts.into_iter().collect();
        parts.sort_by_key(|p| p.0);
        if parts.is_empty() {
            return Err(Error::InvalidRates("rate vector has no entries".into()));
        }
        for w in parts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidRates("rate vector names a slot twice".into()));
            }
        }
        if parts.iter().any(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::InvalidRates("rates must be positive and finite".into()));
        }
        Ok(Self {
            entries: parts.iter().map(|&(s, r, _)| (s, r)).collect(),
            provenance: parts.iter().map(|&(slot, _, modcod)| Assignment { modcod, slot }).collect(),
        })
    }

    pub fn single(slot: usize, rate: f64, modcod: usize) -> Self {
        Self { entries: alloc::vec![(slot, rate)], provenance: alloc::vec![Assignment { modcod, slot }] }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn provenance(&self) -> &[Assignment] {
        &self.provenance
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn rate(&self, slot: usize) -> f64 {
        self.entries.iter().find(|e| e.0 == slot).map_or(0.0, |e| e.1)
    }

    pub fn min_rate(&self) -> f64 {
        self.entries.iter().map(|e| e.1).fold(f64::INFINITY, f64::min)
    }

    /// Number of receivers served at once.
    pub fn layers(&self) -> usize {
        self.entries.len()
    }

    /// Modcod ids in slot order, used to break ties deterministically.
    pub fn provenance_key(&self) -> Vec<usize> {
        self.provenance.iter().map(|a| a.modcod).collect()
    }

    pub(crate) fn with_slots(&self, map: impl Fn(usize) -> usize) -> RateVector {
        let mut parts: Vec<(usize, f64, usize)> = self
            .entries
            .iter()
            .zip(&self.provenance)
            .map(|(&(s, r), a)| (map(s), r, a.modcod))
            .collect();
        parts.sort_by_key(|p| p.0);
        RateVector {
            entries: parts.iter().map(|&(s, r, _)| (s, r)).collect(),
            provenance: parts.iter().map(|&(slot, _, modcod)| Assignment { modcod, slot }).collect(),
        }
    }
}

/// Column budget for the LP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationLimits {
    /// Pairs whose SNRs differ by more than this (dB) are not combined.
    pub pair_snr_window_db: f64,
    pub max_vectors_per_pair: usize,
    pub max_total_vectors: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        Self { pair_snr_window_db: 16.0, max_vectors_per_pair: 8, max_total_vectors: 1_000_000 }
    }
}

impl EnumerationLimits {
    pub fn unlimited() -> Self {
        Self { pair_snr_window_db: f64::INFINITY, max_vectors_per_pair: usize::MAX, max_total_vectors: usize::MAX }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pair_snr_window_db.is_nan() || self.pair_snr_window_db < 0.0 || self.max_vectors_per_pair == 0 || self.max_total_vectors == 0 {
            return Err(Error::InvalidScenario("enumeration limits must be positive".into()));
        }
        Ok(())
    }
}

/// Best whole-symbol vector for one receiver, or `None` when the receiver
/// decodes nothing.
pub fn best_single_rate(slot: usize, rx: &Receiver, table: &ModCodTable) -> Option<RateVector> {
    table.best_whole(rx.snr_db).map(|m| RateVector::single(slot, m.spectral_efficiency, m.id))
}

/// Pareto-optimal two-receiver vectors for the pair, stream 1 going to the
/// weaker receiver. With equal SNRs both orientations are produced.
///
/// Within one constellation the two streams pick their code rates
/// independently, so the best decodable rate on each stream gives the only
/// undominated vector of that constellation.
pub fn pair_vectors(a: (usize, &Receiver), b: (usize, &Receiver), table: &ModCodTable) -> Vec<RateVector> {
    let mut out = Vec::new();
    if a.0 == b.0 {
        return out;
    }
    let mut orientations = Vec::with_capacity(2);
    if a.1.snr_db <= b.1.snr_db {
        orientations.push((a, b));
    }
    if b.1.snr_db <= a.1.snr_db {
        orientations.push((b, a));
    }
    for ((weak_slot, weak), (strong_slot, strong)) in orientations {
        for group in table.hierarchical_groups() {
            let (Some(one), Some(two)) = (group.best_stream_one(weak.snr_db), group.best_stream_two(strong.snr_db))
            else {
                continue;
            };
            let (m1, m2) = (table.get(one), table.get(two));
            out.push(
                RateVector::new([
                    (weak_slot, m1.spectral_efficiency, one),
                    (strong_slot, m2.spectral_efficiency, two),
                ])
                .expect("distinct slots and positive rates"),
            );
        }
    }
    pareto_prune(out).expect("pair vectors share one support")
}

/// `a` dominates or equals `b` component-wise (same support assumed).
fn covers(a: &RateVector, b: &RateVector) -> bool {
    a.entries.iter().zip(&b.entries).all(|(x, y)| x.1 >= y.1)
}

/// Removes dominated vectors. Among identical vectors the one with the
/// larger provenance key is kept. Output is sorted by decreasing rates.
///
/// The LP optimum is unchanged as long as no pair entry exceeds that
/// receiver's best single rate, which holds for covered receivers on the
/// derived tables.
pub fn pareto_prune(mut vectors: Vec<RateVector>) -> Result<Vec<RateVector>> {
    if let Some(first) = vectors.first() {
        let support: Vec<usize> = first.support().collect();
        if vectors.iter().any(|v| !v.support().eq(support.iter().copied())) {
            return Err(Error::MixedSupports);
        }
    }
    // Lexicographically decreasing rates: a dominating vector always comes
    // before the vectors it dominates.
    vectors.sort_by(|a, b| {
        for (x, y) in a.entries.iter().zip(&b.entries) {
            match y.1.total_cmp(&x.1) {
                core::cmp::Ordering::Equal => {}
                o => return o,
            }
        }
        b.provenance_key().cmp(&a.provenance_key())
    });
    let mut kept: Vec<RateVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if !kept.iter().any(|k| covers(k, &v)) {
            kept.push(v);
        }
    }
    Ok(kept)
}

/// All rate vectors for a receiver population, ready for the LP.
#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    /// Input positions of the receivers that decode at least one modcod;
    /// slot `s` of every vector is receiver `covered[s]`.
    pub covered: Vec<usize>,
    /// Input positions of unavailable receivers.
    pub excluded: Vec<usize>,
    /// Best single vector of each slot, in slot order.
    pub singles: Vec<RateVector>,
    /// Two-receiver vectors kept after pruning and capping, by pair.
    pub pairs: BTreeMap<(usize, usize), Vec<RateVector>>,
}

impl Enumeration {
    pub fn slot_count(&self) -> usize {
        self.covered.len()
    }

    /// Singles first, then pair vectors in pair order.
    pub fn vectors(&self) -> Vec<RateVector> {
        let mut out = self.singles.clone();
        for v in self.pairs.values() {
            out.extend(v.iter().cloned());
        }
        out
    }

    pub fn len(&self) -> usize {
        self.singles.len() + self.pairs.values().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pair vectors of slots `a` and `b`, in any order.
    pub fn pair(&self, a: usize, b: usize) -> &[RateVector] {
        self.pairs.get(&(a.min(b), a.max(b))).map_or(&[], Vec::as_slice)
    }
}

/// Enumerates single and pair vectors for `receivers`, applying `limits`.
pub fn enumerate_all(receivers: &[Receiver], table: &ModCodTable, limits: &EnumerationLimits) -> Result<Enumeration> {
    limits.validate()?;
    let mut covered = Vec::new();
    let mut excluded = Vec::new();
    let mut singles = Vec::new();
    for (pos, rx) in receivers.iter().enumerate() {
        match best_single_rate(covered.len(), rx, table) {
            Some(v) => {
                covered.push(pos);
                singles.push(v);
            }
            None => excluded.push(pos),
        }
    }
    if covered.is_empty() {
        return Err(Error::EmptyBeam);
    }

    let mut pairs: BTreeMap<(usize, usize), Vec<RateVector>> = BTreeMap::new();
    for a in 0..covered.len() {
        let ra = &receivers[covered[a]];
        for b in a + 1..covered.len() {
            let rb = &receivers[covered[b]];
            if (ra.snr_db - rb.snr_db).abs() > limits.pair_snr_window_db {
                continue;
            }
            let mut v = pair_vectors((a, ra), (b, rb), table);
            if v.is_empty() {
                continue;
            }
            if v.len() > limits.max_vectors_per_pair {
                sort_by_min_rate(&mut v);
                v.truncate(limits.max_vectors_per_pair);
            }
            pairs.insert((a, b), v);
        }
    }

    let budget = limits.max_total_vectors.saturating_sub(singles.len());
    let total: usize = pairs.values().map(Vec::len).sum();
    if total > budget {
        let mut ranked: Vec<((usize, usize), usize, f64)> = pairs
            .iter()
            .flat_map(|(&key, v)| v.iter().enumerate().map(move |(k, rv)| (key, k, rv.min_rate())))
            .collect();
        ranked.sort_by(|x, y| y.2.total_cmp(&x.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));
        let mut keep: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for &(key, k, _) in ranked.iter().take(budget) {
            keep.entry(key).or_default().push(k);
        }
        let mut trimmed = BTreeMap::new();
        for (key, mut idx) in keep {
            idx.sort_unstable();
            let v = &pairs[&key];
            trimmed.insert(key, idx.into_iter().map(|k| v[k].clone()).collect());
        }
        pairs = trimmed;
    }
    Ok(Enumeration { covered, excluded, singles, pairs })
}

fn sort_by_min_rate(v: &mut [RateVector]) {
    v.sort_by(|a, b| {
        b.min_rate()
            .total_cmp(&a.min_rate())
            .then_with(|| b.provenance_key().cmp(&a.provenance_key()))
    });
}

/// Checks every entry of every vector against the receivers' SNRs.
pub fn verify_achievable(enumeration: &Enumeration, receivers: &[Receiver], table: &ModCodTable) -> bool {
    enumeration.vectors().iter().all(|v| {
        v.provenance().iter().zip(v.entries()).all(|(a, &(slot, rate))| {
            let m = table.get(a.modcod);
            let rx = &receivers[enumeration.covered[slot]];
            let layer_ok = match v.layers() {
                1 => m.layer == Layer::Whole,
                _ => m.layer != Layer::Whole,
            };
            layer_ok && rx.snr_db >= m.threshold_db && rate == m.spectral_efficiency
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{load_modcod_table, CodeRate, ModCodEntry, NamedConstellation, ThresholdSpec};
    use crate::constellation::{ConstellationFamily, ConstellationParams};
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn entry(name: &str, family: ConstellationFamily, theta: f64, layer: Layer, rate: (u32, u32), t: f64) -> ModCodEntry {
        ModCodEntry {
            constellation: NamedConstellation {
                name: name.to_string(),
                family,
                params: ConstellationParams::psk(theta),
            },
            layer,
            code_rate: CodeRate::new(rate.0, rate.1).unwrap(),
            threshold: ThresholdSpec::Explicit(t),
        }
    }

    /// Two plain QPSK modcods and one hierarchical QPSK with two rates per
    /// stream.
    fn small_table() -> ModCodTable {
        use ConstellationFamily::Qpsk;
        load_modcod_table(
            &[
                entry("qpsk", Qpsk, 45.0, Layer::Whole, (1, 4), -2.35),
                entry("qpsk", Qpsk, 45.0, Layer::Whole, (1, 2), 1.0),
                entry("h", Qpsk, 30.0, Layer::ONE, (1, 4), -3.0),
                entry("h", Qpsk, 30.0, Layer::ONE, (1, 2), 0.0),
                entry("h", Qpsk, 30.0, Layer::TWO, (1, 4), 2.0),
                entry("h", Qpsk, 30.0, Layer::TWO, (1, 2), 5.0),
            ],
            0.0,
        )
        .unwrap()
    }

    fn rx(id: usize, snr: f64) -> Receiver {
        Receiver::with_snr(id, snr)
    }

    #[test]
    fn single_rate_thresholds() {
        let t = small_table();
        assert!(best_single_rate(0, &rx(0, -3.0), &t).is_none());
        let edge = best_single_rate(0, &rx(0, -2.35), &t).unwrap();
        assert_eq!(edge.entries(), &[(0, 0.5)]);
        let top = best_single_rate(3, &rx(0, f64::INFINITY), &t).unwrap();
        assert_eq!(top.entries(), &[(3, 1.0)]);
    }

    /// Every stream-1 / stream-2 code-rate combination, then an O(n²)
    /// dominance filter.
    fn exhaustive_pair(a: (usize, &Receiver), b: (usize, &Receiver), table: &ModCodTable) -> Vec<Vec<(usize, f64)>> {
        let mut all = Vec::new();
        let mut orient = vec![];
        if a.1.snr_db <= b.1.snr_db {
            orient.push((a, b));
        }
        if b.1.snr_db <= a.1.snr_db {
            orient.push((b, a));
        }
        for (weak, strong) in orient {
            for m1 in table.modcods().iter().filter(|m| m.layer == Layer::ONE && m.threshold_db <= weak.1.snr_db) {
                for m2 in table.modcods().iter().filter(|m| {
                    m.layer == Layer::TWO
                        && m.constellation.name == m1.constellation.name
                        && m.threshold_db <= strong.1.snr_db
                }) {
                    let mut e = vec![(weak.0, m1.spectral_efficiency), (strong.0, m2.spectral_efficiency)];
                    e.sort_by_key(|x| x.0);
                    all.push(e);
                }
            }
        }
        brute_force_front(all)
    }

    fn brute_force_front(all: Vec<Vec<(usize, f64)>>) -> Vec<Vec<(usize, f64)>> {
        let dominated = |x: &Vec<(usize, f64)>, y: &Vec<(usize, f64)>| {
            x.iter().zip(y).all(|(p, q)| p.1 <= q.1) && x.iter().zip(y).any(|(p, q)| p.1 < q.1)
        };
        let mut front: Vec<Vec<(usize, f64)>> =
            all.iter().filter(|x| !all.iter().any(|y| dominated(x, y))).cloned().collect();
        front.sort_by(|x, y| y.partial_cmp(x).unwrap());
        front.dedup();
        front
    }

    fn as_sorted(v: &[RateVector]) -> Vec<Vec<(usize, f64)>> {
        let mut out: Vec<Vec<(usize, f64)>> = v.iter().map(|r| r.entries().to_vec()).collect();
        out.sort_by(|x, y| y.partial_cmp(x).unwrap());
        out
    }

    #[test]
    fn pair_vectors_match_exhaustive_combination() {
        let t = small_table();
        for (sa, sb) in [(0.5, 6.0), (-2.0, 2.5), (-4.0, 10.0), (3.0, 3.0), (7.0, 0.1)] {
            let (a, b) = (rx(0, sa), rx(1, sb));
            let got = pair_vectors((0, &a), (1, &b), &t);
            assert_eq!(as_sorted(&got), exhaustive_pair((0, &a), (1, &b), &t), "{sa} {sb}");
        }
    }

    #[test]
    fn pair_below_every_threshold_is_empty() {
        let t = small_table();
        assert!(pair_vectors((0, &rx(0, -5.0)), (1, &rx(1, -4.0)), &t).is_empty());
    }

    #[test]
    fn equal_snr_pair_is_symmetric() {
        let t = small_table();
        let v = pair_vectors((0, &rx(0, 6.0)), (1, &rx(1, 6.0)), &t);
        let swapped: Vec<RateVector> = v.iter().map(|r| r.with_slots(|s| 1 - s)).collect();
        assert_eq!(as_sorted(&v), as_sorted(&swapped));
        assert_eq!(v.len(), 1);
        // Asymmetric stream rates keep both orientations.
        let v = pair_vectors((0, &rx(0, 3.0)), (1, &rx(1, 3.0)), &t);
        assert_eq!(as_sorted(&v), vec![vec![(0, 0.5), (1, 0.25)], vec![(0, 0.25), (1, 0.5)]]);
    }

    #[test]
    fn prune_examples() {
        let v = |a: f64, b: f64, id: usize| RateVector::new([(0, a, id), (1, b, id)]).unwrap();
        let kept = pareto_prune(vec![v(1.0, 2.0, 0), v(1.0, 1.0, 1)]).unwrap();
        assert_eq!(as_sorted(&kept), vec![vec![(0, 1.0), (1, 2.0)]]);
        let kept = pareto_prune(vec![v(1.0, 2.0, 0), v(2.0, 1.0, 1)]).unwrap();
        assert_eq!(kept.len(), 2);
        let kept = pareto_prune(vec![v(1.0, 2.0, 3), v(1.0, 2.0, 7), v(1.0, 2.0, 5)]).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].provenance_key(), vec![7, 7]);
        let mixed = vec![v(1.0, 2.0, 0), RateVector::new([(0, 1.0, 0), (2, 1.0, 0)]).unwrap()];
        assert_eq!(pareto_prune(mixed), Err(Error::MixedSupports));
    }

    proptest! {
        #[test]
        fn prune_equals_quadratic_filter(points in proptest::collection::vec((1u32..20, 1u32..20), 1..100)) {
            let vectors: Vec<RateVector> = points
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| RateVector::new([(0, a as f64 / 4.0, k), (1, b as f64 / 4.0, k)]).unwrap())
                .collect();
            let expected = brute_force_front(vectors.iter().map(|v| v.entries().to_vec()).collect());
            let got = pareto_prune(vectors).unwrap();
            prop_assert_eq!(as_sorted(&got), expected);
        }
    }

    /// LP optima over singles plus pair vectors, with and without pruning
    /// each pair's group.
    fn optima_with_and_without_pruning(singles: &[f64], pairs: &[(usize, u32, u32)]) -> (f64, f64) {
        use crate::lp::{solve_vectors, RateWeights, SolveOptions};
        let mut all: Vec<RateVector> =
            singles.iter().enumerate().map(|(i, &r)| RateVector::single(i, r, i)).collect();
        let mut pruned = all.clone();
        let slots = [(0, 1), (0, 2), (1, 2)];
        for (k, &(a, b)) in slots.iter().enumerate() {
            let group: Vec<RateVector> = pairs
                .iter()
                .enumerate()
                .filter(|(_, p)| p.0 == k)
                .map(|(id, p)| RateVector::new([(a, p.1 as f64 / 4.0, id), (b, p.2 as f64 / 4.0, id)]).unwrap())
                .collect();
            all.extend(group.iter().cloned());
            pruned.extend(pareto_prune(group).unwrap());
        }
        let w = RateWeights::uniform(singles.len());
        let full = solve_vectors(&all, 3, &w, &SolveOptions::default()).unwrap().0;
        let kept = solve_vectors(&pruned, 3, &w, &SolveOptions::default()).unwrap().0;
        (full, kept)
    }

    // With equality rows a dominated column can still be needed once a pair
    // hands a receiver more than its own single would.
    #[test]
    fn pruning_can_lose_the_optimum_when_a_pair_beats_the_single() {
        let (full, kept) = optima_with_and_without_pruning(&[0.25; 3], &[(0, 6, 5), (0, 1, 2)]);
        assert!((full - 7.0 / 36.0).abs() < 1e-12, "{full}");
        assert!((kept - 3.0 / 16.0).abs() < 1e-12, "{kept}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn pruning_keeps_the_lp_optimum(
            extra in proptest::collection::vec(0u32..20, 3),
            pairs in proptest::collection::vec((0usize..3, 1u32..16, 1u32..16), 1..24),
        ) {
            // Every single at least matches the receiver's best pair entry,
            // as in any table where stream rates never beat whole-symbol rates.
            let slots = [(0, 1), (0, 2), (1, 2)];
            let mut singles: Vec<f64> = extra.iter().map(|&e| e as f64 / 4.0).collect();
            for &(k, ra, rb) in &pairs {
                let (a, b) = slots[k];
                singles[a] = singles[a].max(ra as f64 / 4.0 + extra[a] as f64 / 4.0);
                singles[b] = singles[b].max(rb as f64 / 4.0 + extra[b] as f64 / 4.0);
            }
            for x in &mut singles {
                *x = x.max(0.25);
            }
            let (full, kept) = optima_with_and_without_pruning(&singles, &pairs);
            prop_assert!((full - kept).abs() <= 1e-9 * full, "{} vs {}", full, kept);
        }
    }

    #[test]
    fn enumeration_of_one_receiver_is_its_single() {
        let t = small_table();
        let e = enumerate_all(&[rx(0, 4.0)], &t, &EnumerationLimits::default()).unwrap();
        assert_eq!(e.vectors(), vec![RateVector::single(0, 1.0, t.best_whole(4.0).unwrap().id)]);
    }

    #[test]
    fn empty_beam_is_an_error() {
        let t = small_table();
        assert_eq!(enumerate_all(&[rx(0, -9.0)], &t, &EnumerationLimits::default()), Err(Error::EmptyBeam));
    }

    #[test]
    fn three_receivers_match_exhaustive_reference() {
        let t = small_table();
        let receivers = [rx(0, -1.0), rx(1, 2.5), rx(2, 6.0), rx(3, -7.0)];
        let e = enumerate_all(&receivers, &t, &EnumerationLimits::unlimited()).unwrap();
        assert_eq!(e.covered, vec![0, 1, 2]);
        assert_eq!(e.excluded, vec![3]);
        let mut expected = 3;
        for a in 0..3 {
            for b in a + 1..3 {
                expected += exhaustive_pair((a, &receivers[a]), (b, &receivers[b]), &t).len();
            }
        }
        assert_eq!(e.len(), expected);
        assert!(verify_achievable(&e, &receivers, &t));
        assert!(e.vectors().iter().all(|v| v.support().all(|s| s < 3)));
    }

    #[test]
    fn total_cap_drops_pairs_first() {
        let t = small_table();
        let receivers = [rx(0, -1.0), rx(1, 2.5), rx(2, 6.0)];
        let limits = EnumerationLimits { max_total_vectors: 3, ..EnumerationLimits::default() };
        let e = enumerate_all(&receivers, &t, &limits).unwrap();
        assert_eq!(e.len(), 3);
        assert!(e.pairs.is_empty());
        let limits = EnumerationLimits { pair_snr_window_db: 0.5, ..EnumerationLimits::default() };
        assert!(enumerate_all(&receivers, &t, &limits).unwrap().pairs.is_empty());
    }

    #[test]
    fn per_pair_cap_keeps_highest_min_rate() {
        let v = |a: f64, b: f64, id: usize| RateVector::new([(0, a, id), (1, b, id)]).unwrap();
        let mut set = vec![v(3.0, 0.5, 0), v(1.5, 1.5, 1), v(0.25, 4.0, 2)];
        sort_by_min_rate(&mut set);
        assert_eq!(set[0].entries(), &[(0, 1.5), (1, 1.5)]);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let t = small_table();
        let receivers = [rx(0, -1.0), rx(1, 2.5), rx(2, 6.0), rx(3, 0.3)];
        let a = enumerate_all(&receivers, &t, &EnumerationLimits::default()).unwrap();
        let b = enumerate_all(&receivers, &t, &EnumerationLimits::default()).unwrap();
        assert_eq!(a, b);
    }
}
