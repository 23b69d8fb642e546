//! Comparison schemes: plain VCM over the best single modcods, and pairing,
//! where every group of at most two receivers is served by its own small LP.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::capacity::ModCodTable;
use crate::channel::Receiver;
use crate::lp::{solve_vectors, RateWeights, Schedule, Share, SolveOptions};
use crate::ratevectors::{best_single_rate, enumerate_all, pair_vectors, EnumerationLimits, Enumeration, RateVector};
use crate::{Error, Result};

/// A receiver and its optional partner, by position.
type Slot = (usize, Option<usize>);

/// Largest coverable population matched exactly.
pub const EXACT_MATCHING_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Group {
    Single(usize),
    Pair(usize, usize),
}

impl Group {
    pub fn members(&self) -> Vec<usize> {
        match *self {
            Group::Single(a) => vec![a],
            Group::Pair(a, b) => vec![a, b],
        }
    }
}

/// Disjoint groups covering every served receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub groups: Vec<Group>,
}

impl Partition {
    /// Groups are disjoint and their union is exactly `universe`.
    pub fn is_valid_for(&self, universe: &[usize]) -> bool {
        let mut members: Vec<usize> = self.groups.iter().flat_map(Group::members).collect();
        members.sort_unstable();
        let mut u = universe.to_vec();
        u.sort_unstable();
        members == u
    }

    fn map(&self, f: impl Fn(usize) -> usize) -> Partition {
        let mut groups: Vec<Group> = self
            .groups
            .iter()
            .map(|g| match *g {
                Group::Single(a) => Group::Single(f(a)),
                Group::Pair(a, b) => {
                    let (a, b) = (f(a), f(b));
                    Group::Pair(a.min(b), a.max(b))
                }
            })
            .collect();
        groups.sort();
        Partition { groups }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingStrategy {
    /// Sort by SNR and pair neighbours.
    #[default]
    Greedy,
    /// Minimum total airtime over all pairings.
    OptimalMatching,
}

impl PairingStrategy {
    pub fn tag(self) -> &'static str {
        match self {
            PairingStrategy::Greedy => "greedy",
            PairingStrategy::OptimalMatching => "optimal-matching",
        }
    }
}

impl fmt::Display for PairingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PairingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(PairingStrategy::Greedy),
            "optimal-matching" | "optimal_matching" | "matching" => Ok(PairingStrategy::OptimalMatching),
            _ => Err(Error::InvalidScenario(alloc::format!("unknown pairing strategy {s:?}"))),
        }
    }
}

/// Common rate when groups with rates `rates` share the channel, and the
/// airtime of each group.
pub fn equalize(rates: &[f64]) -> Result<(f64, Vec<f64>)> {
    if rates.is_empty() {
        return Err(Error::InvalidRates("no groups".into()));
    }
    if let Some(bad) = rates.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidRates(alloc::format!("group rate must be positive, got {bad}")));
    }
    let r = 1.0 / rates.iter().map(|x| 1.0 / x).sum::<f64>();
    Ok((r, rates.iter().map(|x| r / x).collect()))
}

/// Best common rate of two receivers served on their own.
pub fn best_pair_rate(a: &Receiver, b: &Receiver, table: &ModCodTable) -> Result<f64> {
    let (Some(sa), Some(sb)) = (best_single_rate(0, a, table), best_single_rate(1, b, table)) else {
        return Err(Error::Infeasible);
    };
    let mut vectors = vec![sa, sb];
    vectors.extend(pair_vectors((0, a), (1, b), table));
    Ok(solve_vectors(&vectors, 2, &RateWeights::uniform(2), &SolveOptions::default())?.0)
}

/// Group schedules over enumeration slots, solved on demand.
struct GroupRates<'e> {
    e: &'e Enumeration,
    pairs: BTreeMap<(usize, usize), (f64, Vec<Share>, usize)>,
    iterations: usize,
}

impl<'e> GroupRates<'e> {
    fn new(e: &'e Enumeration) -> Self {
        Self { e, pairs: BTreeMap::new(), iterations: 0 }
    }

    fn single(&self, a: usize) -> f64 {
        self.e.singles[a].entries()[0].1
    }

    /// Shares use local slots 0 (for `a`) and 1 (for `b`), `a < b`.
    fn pair(&mut self, a: usize, b: usize) -> Result<f64> {
        let key = (a.min(b), a.max(b));
        if let Some(p) = self.pairs.get(&key) {
            return Ok(p.0);
        }
        let local = |s: usize| usize::from(s != key.0);
        let mut vectors: Vec<RateVector> = vec![
            self.e.singles[key.0].with_slots(local),
            self.e.singles[key.1].with_slots(local),
        ];
        vectors.extend(self.e.pair(key.0, key.1).iter().map(|v| v.with_slots(local)));
        let (r, shares, sol) = solve_vectors(&vectors, 2, &RateWeights::uniform(2), &SolveOptions::default())?;
        self.iterations += sol.iterations;
        self.pairs.insert(key, (r, shares, vectors.len() + 1));
        Ok(r)
    }

    fn rate(&mut self, g: Group) -> Result<f64> {
        match g {
            Group::Single(a) => Ok(self.single(a)),
            Group::Pair(a, b) => self.pair(a, b),
        }
    }

    fn cost(&mut self, g: Group) -> Result<f64> {
        Ok(1.0 / self.rate(g)?)
    }
}

/// Sorts slots by SNR (stable) and pairs neighbours; an odd last slot stays
/// single.
fn greedy_partition(e: &Enumeration, receivers: &[Receiver]) -> Partition {
    let mut order: Vec<usize> = (0..e.slot_count()).collect();
    order.sort_by(|&x, &y| receivers[e.covered[x]].snr_db.total_cmp(&receivers[e.covered[y]].snr_db));
    let mut groups: Vec<Group> = order
        .chunks(2)
        .map(|c| match *c {
            [a, b] => Group::Pair(a.min(b), a.max(b)),
            [a] => Group::Single(a),
            _ => unreachable!(),
        })
        .collect();
    groups.sort();
    Partition { groups }
}

/// Exact minimum airtime by dynamic programming over subsets.
fn exact_matching(rates: &mut GroupRates<'_>) -> Result<Partition> {
    let n = rates.e.slot_count();
    let full = (1usize << n) - 1;
    let mut best = vec![f64::INFINITY; 1 << n];
    let mut choice = vec![Group::Single(0); 1 << n];
    best[0] = 0.0;
    for mask in 1..=full {
        let a = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << a);
        let mut c = best[rest] + rates.cost(Group::Single(a))?;
        let mut g = Group::Single(a);
        for b in a + 1..n {
            if rest & (1 << b) != 0 {
                let cand = best[rest & !(1 << b)] + rates.cost(Group::Pair(a, b))?;
                if cand < c {
                    c = cand;
                    g = Group::Pair(a, b);
                }
            }
        }
        best[mask] = c;
        choice[mask] = g;
    }
    let mut groups = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let g = choice[mask];
        for m in g.members() {
            mask &= !(1 << m);
        }
        groups.push(g);
    }
    groups.sort();
    Ok(Partition { groups })
}

fn group_of(a: usize, b: Option<usize>) -> Group {
    match b {
        None => Group::Single(a),
        Some(b) => Group::Pair(a.min(b), a.max(b)),
    }
}

/// Greedy start, then exchanges between two groups while the airtime drops.
fn local_search(rates: &mut GroupRates<'_>, start: Partition) -> Result<Partition> {
    // Each group as (first, optional second).
    let mut groups: Vec<Slot> = start
        .groups
        .iter()
        .map(|g| match *g {
            Group::Single(a) => (a, None),
            Group::Pair(a, b) => (a, Some(b)),
        })
        .collect();
    let mut improved = true;
    while improved {
        improved = false;
        for x in 0..groups.len() {
            for y in x + 1..groups.len() {
                let (a, b) = groups[x];
                let (c, d) = groups[y];
                let current = rates.cost(group_of(a, b))? + rates.cost(group_of(c, d))?;
                // All ways to regroup the (up to four) members into two groups.
                let candidates: [(Slot, Slot); 2] = match (b, d) {
                    (Some(b), Some(d)) => [((a, Some(c)), (b, Some(d))), ((a, Some(d)), (b, Some(c)))],
                    (Some(b), None) => [((a, Some(c)), (b, None)), ((b, Some(c)), (a, None))],
                    (None, Some(d)) => [((c, Some(a)), (d, None)), ((d, Some(a)), (c, None))],
                    (None, None) => [((a, Some(c)), (a, Some(c))), ((a, None), (c, None))],
                };
                for (k, (g1, g2)) in candidates.into_iter().enumerate() {
                    let merged = b.is_none() && d.is_none() && k == 0;
                    let cost = if merged {
                        rates.cost(group_of(g1.0, g1.1))?
                    } else {
                        rates.cost(group_of(g1.0, g1.1))? + rates.cost(group_of(g2.0, g2.1))?
                    };
                    if cost < current * (1.0 - 1e-12) {
                        if merged {
                            groups[x] = g1;
                            groups.remove(y);
                        } else {
                            groups[x] = g1;
                            groups[y] = g2;
                        }
                        improved = true;
                        break;
                    }
                }
                if improved {
                    break;
                }
            }
            if improved {
                break;
            }
        }
    }
    let mut out: Vec<Group> = groups.into_iter().map(|(a, b)| group_of(a, b)).collect();
    out.sort();
    Ok(Partition { groups: out })
}

/// Plain VCM: every receiver on its best whole-symbol modcod.
pub fn reference_vcm(receivers: &[Receiver], table: &ModCodTable) -> Result<Schedule> {
    let mut covered = Vec::new();
    let mut excluded = Vec::new();
    let mut singles = Vec::new();
    for (pos, rx) in receivers.iter().enumerate() {
        match best_single_rate(pos, rx, table) {
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
    singles_schedule(singles, covered, excluded)
}

/// Plain VCM over the singles of an enumeration.
pub fn reference_from(e: &Enumeration) -> Result<Schedule> {
    let singles = e.singles.iter().map(|v| v.with_slots(|s| e.covered[s])).collect();
    singles_schedule(singles, e.covered.clone(), e.excluded.clone())
}

fn singles_schedule(singles: Vec<RateVector>, covered: Vec<usize>, excluded: Vec<usize>) -> Result<Schedule> {
    let rates: Vec<f64> = singles.iter().map(|v| v.entries()[0].1).collect();
    let (rate, times) = equalize(&rates)?;
    let columns = singles.len();
    Ok(Schedule {
        rate,
        shares: times.into_iter().zip(singles).map(|(time, vector)| Share { time, vector }).collect(),
        covered,
        excluded,
        columns,
        iterations: 0,
    })
}

/// Pairing scheme over freshly enumerated vectors.
pub fn pair_scheme(
    receivers: &[Receiver],
    table: &ModCodTable,
    strategy: PairingStrategy,
    limits: &EnumerationLimits,
) -> Result<(Schedule, Partition)> {
    let e = enumerate_all(receivers, table, limits)?;
    pair_scheme_from(&e, receivers, strategy)
}

/// Pairing scheme over an existing enumeration of `receivers`. The partition
/// is reported in receiver positions.
pub fn pair_scheme_from(
    e: &Enumeration,
    receivers: &[Receiver],
    strategy: PairingStrategy,
) -> Result<(Schedule, Partition)> {
    let mut rates = GroupRates::new(e);
    let partition = match strategy {
        PairingStrategy::Greedy => greedy_partition(e, receivers),
        PairingStrategy::OptimalMatching if e.slot_count() <= EXACT_MATCHING_LIMIT => exact_matching(&mut rates)?,
        PairingStrategy::OptimalMatching => local_search(&mut rates, greedy_partition(e, receivers))?,
    };
    let group_rates = partition.groups.iter().map(|&g| rates.rate(g)).collect::<Result<Vec<f64>>>()?;
    let (rate, times) = equalize(&group_rates)?;
    let mut shares = Vec::new();
    let mut columns = 0;
    for (&g, t) in partition.groups.iter().zip(times) {
        match g {
            Group::Single(a) => {
                columns += 1;
                shares.push(Share { time: t, vector: e.singles[a].with_slots(|s| e.covered[s]) });
            }
            Group::Pair(a, b) => {
                let (_, pair_shares, cols) = &rates.pairs[&(a, b)];
                columns += cols;
                let global = |s: usize| e.covered[if s == 0 { a } else { b }];
                for s in pair_shares {
                    shares.push(Share { time: t * s.time, vector: s.vector.with_slots(global) });
                }
            }
        }
    }
    let schedule = Schedule {
        rate,
        shares,
        covered: e.covered.clone(),
        excluded: e.excluded.clone(),
        columns,
        iterations: rates.iterations,
    };
    Ok((schedule, partition.map(|s| e.covered[s])))
}
