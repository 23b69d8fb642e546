//! Time-sharing LP and its revised simplex solver.
//!
//! Variables are the time shares `t_1..t_k` of the rate vectors followed by
//! the common rate `R`. Row `i < n` reads `sum_j r_ij t_j - w_i R = 0`, the
//! last row `sum_j t_j = 1`. The objective is `max R`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::capacity::ModCodTable;
use crate::channel::Receiver;
use crate::ratevectors::{enumerate_all, EnumerationLimits, RateVector};
use crate::{Error, Result};

/// Shares at or below this are reported as zero.
pub const SHARE_EPSILON: f64 = 1e-9;

/// Per-receiver rate multipliers: receiver `i` is served at `w_i * R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateWeights(Vec<f64>);

impl RateWeights {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if let Some(bad) = w.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidWeights(alloc::format!("weights must be positive, got {bad}")));
        }
        Ok(Self(w))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Weights of the given positions, in order.
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        positions
            .iter()
            .map(|&p| self.0.get(p).copied().ok_or_else(|| Error::InvalidWeights("weight index out of range".into())))
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Sparse column: `(row, value)` pairs sorted by row.
pub type Column = Vec<(usize, f64)>;

/// `max c^T x` subject to `A x = b`, `x >= 0`, with `A` stored by columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    rows: usize,
    columns: Vec<Column>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// Index into the assembled rate vectors; `None` for the `R` column.
    provenance: Vec<Option<usize>>,
}

impl LpProblem {
    /// General standard-form problem. Requires `b >= 0`.
    pub fn new(rows: usize, columns: Vec<Column>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if rows == 0 || columns.is_empty() {
            return Err(Error::InvalidProblem("empty problem".into()));
        }
        if b.len() != rows || c.len() != columns.len() {
            return Err(Error::InvalidProblem("dimension mismatch".into()));
        }
        if b.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("b must be non-negative and finite".into()));
        }
        let mut columns = columns;
        for col in &mut columns {
            col.retain(|e| e.1 != 0.0);
            col.sort_by_key(|e| e.0);
            if col.iter().any(|e| e.0 >= rows || !e.1.is_finite()) || col.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidProblem("bad column entry".into()));
            }
        }
        let provenance = vec![None; columns.len()];
        Ok(Self { rows, columns, b, c, provenance })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, f64)] {
        &self.columns[j]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn provenance(&self) -> &[Option<usize>] {
        &self.provenance
    }

    /// Row-major dense copy of `A`.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                a[i][j] = v;
            }
        }
        a
    }

    /// `max_i |(A x - b)_i|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.rows];
        for (col, &xj) in self.columns.iter().zip(x) {
            for &(i, v) in col {
                ax[i] += v * xj;
            }
        }
        ax.iter().zip(&self.b).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max)
    }

    /// Column-list text: a header line, then `b`, `c`, and one line per
    /// column of `A` as `j: i=v i=v ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rows {} cols {}", self.rows, self.cols());
        let _ = writeln!(s, "b {}", join(&self.b));
        let _ = writeln!(s, "c {}", join(&self.c));
        for (j, col) in self.columns.iter().enumerate() {
            let _ = write!(s, "{j}:");
            for &(i, v) in col {
                let _ = write!(s, " {i}={v:?}");
            }
            s.push('\n');
        }
        s
    }
}

fn join(v: &[f64]) -> String {
    let mut s = String::new();
    for (k, x) in v.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:?}");
    }
    s
}

/// Builds the time-sharing LP for `n` receiver slots.
pub fn assemble(vectors: &[RateVector], n: usize, w: &RateWeights) -> Result<LpProblem> {
    if vectors.is_empty() {
        return Err(Error::InvalidProblem("no rate vectors".into()));
    }
    if w.len() != n {
        return Err(Error::InvalidWeights(alloc::format!("{} weights for {n} receivers", w.len())));
    }
    let mut columns = Vec::with_capacity(vectors.len() + 1);
    for v in vectors {
        if v.support().any(|s| s >= n) {
            return Err(Error::InvalidProblem("rate vector slot out of range".into()));
        }
        let mut col: Column = v.entries().to_vec();
        col.push((n, 1.0));
        columns.push(col);
    }
    columns.push(w.as_slice().iter().enumerate().map(|(i, &wi)| (i, -wi)).collect());
    let mut b = vec![0.0; n + 1];
    b[n] = 1.0;
    let mut c = vec![0.0; vectors.len() + 1];
    c[vectors.len()] = 1.0;
    let mut p = LpProblem::new(n + 1, columns, b, c)?;
    p.provenance = (0..vectors.len()).map(Some).chain([None]).collect();
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Smallest pivot element accepted in the ratio test.
    pub pivot_tolerance: f64,
    /// A column enters when its reduced cost exceeds this.
    pub optimality_tolerance: f64,
    /// Phase 1 objective below `-feasibility_tolerance` means infeasible.
    pub feasibility_tolerance: f64,
    pub max_iterations: usize,
    pub refactor_interval: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            pivot_tolerance: 1e-11,
            optimality_tolerance: 1e-10,
            feasibility_tolerance: 1e-9,
            max_iterations: 100_000,
            refactor_interval: 64,
            bland_after: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point, one entry per column.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Basic column per row; `None` marks a redundant row.
    pub basis: Vec<Option<usize>>,
    /// Largest reduced cost over non-basic columns at termination.
    pub max_reduced_cost: f64,
    /// Started from the single-column basis without a Phase 1.
    pub warm_started: bool,
}

/// Dense inverse by Gauss-Jordan with partial pivoting, row-major.
fn invert(m: usize, mut a: Vec<f64>) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; m * m];
    for i in 0..m {
        inv[i * m + i] = 1.0;
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&x, &y| a[x * m + col].abs().total_cmp(&a[y * m + col].abs()))?;
        if a[piv * m + col].abs() < 1e-13 {
            return None;
        }
        if piv != col {
            for k in 0..m {
                a.swap(piv * m + k, col * m + k);
                inv.swap(piv * m + k, col * m + k);
            }
        }
        let d = a[col * m + col];
        for k in 0..m {
            a[col * m + k] /= d;
            inv[col * m + k] /= d;
        }
        for r in 0..m {
            let f = a[r * m + col];
            if r == col || f == 0.0 {
                continue;
            }
            for k in 0..m {
                a[r * m + k] -= f * a[col * m + k];
                inv[r * m + k] -= f * inv[col * m + k];
            }
        }
    }
    Some(inv)
}

/// Index space: problem columns `0..cols`, then one artificial per row.
struct Tableau<'a> {
    p: &'a LpProblem,
    m: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    opts: SolveOptions,
    iterations: usize,
    since_refactor: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl<'a> Tableau<'a> {
    fn new(p: &'a LpProblem, basis: Vec<usize>, opts: SolveOptions) -> Option<Self> {
        let m = p.rows;
        let mut t = Self {
            p,
            m,
            in_basis: vec![false; p.cols() + m],
            basis,
            binv: Vec::new(),
            xb: Vec::new(),
            opts,
            iterations: 0,
            since_refactor: 0,
        };
        for &j in &t.basis {
            t.in_basis[j] = true;
        }
        t.refactor().then_some(t)
    }

    fn column(&self, j: usize) -> Column {
        if j < self.p.cols() {
            self.p.columns[j].clone()
        } else {
            vec![(j - self.p.cols(), 1.0)]
        }
    }

    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut dense = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.column(j) {
                dense[i * m + k] = v;
            }
        }
        let Some(inv) = invert(m, dense) else { return false };
        self.binv = inv;
        self.xb = (0..m).map(|i| (0..m).map(|r| self.binv[i * m + r] * self.p.b[r]).sum()).collect();
        self.since_refactor = 0;
        true
    }

    /// `B^-1 a_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let col = self.column(j);
        (0..m).map(|i| col.iter().map(|&(r, v)| self.binv[i * m + r] * v).sum()).collect()
    }

    /// Simplex multipliers for costs `cost` over the basis.
    fn duals(&self, cost: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = cost(j);
            if cb != 0.0 {
                for (yr, b) in y.iter_mut().zip(&self.binv[i * m..(i + 1) * m]) {
                    *yr += cb * b;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[f64], cost: &dyn Fn(usize) -> f64) -> f64 {
        cost(j) - self.column(j).iter().map(|&(r, v)| y[r] * v).sum::<f64>()
    }

    fn pivot(&mut self, row: usize, enter: usize, u: &[f64]) {
        let m = self.m;
        let theta = self.xb[row] / u[row];
        for (i, (x, &ui)) in self.xb.iter_mut().zip(u).enumerate() {
            if i != row {
                *x -= theta * ui;
            }
        }
        self.xb[row] = theta;
        let d = u[row];
        for b in &mut self.binv[row * m..(row + 1) * m] {
            *b /= d;
        }
        let pivot_row = self.binv[row * m..(row + 1) * m].to_vec();
        for (i, (dst, &f)) in self.binv.chunks_exact_mut(m).zip(u).enumerate() {
            if i == row || f == 0.0 {
                continue;
            }
            for (b, p) in dst.iter_mut().zip(&pivot_row) {
                *b -= f * p;
            }
        }
        self.in_basis[self.basis[row]] = false;
        self.in_basis[enter] = true;
        self.basis[row] = enter;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_interval {
            // A failed refactor keeps the updated inverse.
            self.refactor();
        }
    }

    /// Maximizes `cost` over the columns accepted by `eligible`.
    fn optimize(&mut self, cost: &dyn Fn(usize) -> f64, eligible: &dyn Fn(usize) -> bool) -> Outcome {
        let mut degenerate_run = 0usize;
        let total = self.p.cols() + self.m;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Outcome::IterationLimit;
            }
            let bland = degenerate_run >= self.opts.bland_after;
            let y = self.duals(cost);
            let mut enter = None;
            let mut best = self.opts.optimality_tolerance;
            for j in 0..total {
                if self.in_basis[j] || !eligible(j) {
                    continue;
                }
                let d = self.reduced_cost(j, &y, cost);
                if d > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(enter) = enter else { return Outcome::Optimal };
            let u = self.ftran(enter);
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                if u[i] <= self.opts.pivot_tolerance {
                    continue;
                }
                let ratio = self.xb[i].max(0.0) / u[i];
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((l, lr)) => {
                        let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[l]
                            } else {
                                u[i] > u[l]
                            }
                        } else {
                            ratio < lr
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((l, lr))
                        }
                    }
                };
            }
            let Some((row, ratio)) = leave else { return Outcome::Unbounded };
            if ratio <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, enter, &u);
            for x in &mut self.xb {
                if *x < 0.0 && *x > -1e-13 {
                    *x = 0.0;
                }
            }
        }
    }
}

/// Harmonic starting basis: for every row but the last, the column with a
/// single positive entry there (largest rate wins), plus the `R` column.
fn harmonic_basis(p: &LpProblem) -> Option<Vec<usize>> {
    let n = p.rows.checked_sub(1)?;
    let r_col = p.c.iter().position(|&v| v == 1.0)?;
    let mut best: Vec<Option<(usize, f64)>> = vec![None; n];
    for (j, col) in p.columns.iter().enumerate() {
        if let [(i, r), (last, one)] = col.as_slice() {
            if *last == n && *one == 1.0 && *i < n && *r > 0.0 && best[*i].is_none_or(|(_, b)| *r > b) {
                best[*i] = Some((j, *r));
            }
        }
    }
    let mut basis: Vec<usize> = best.into_iter().map(|e| e.map(|e| e.0)).collect::<Option<_>>()?;
    basis.push(r_col);
    Some(basis)
}

/// Revised simplex. Starts from the harmonic basis when the problem has one
/// single-receiver column per row, otherwise runs Phase 1 on artificials.
pub fn solve(p: &LpProblem, opts: &SolveOptions) -> LpSolution {
    let cols = p.cols();
    let cost = |j: usize| if j < cols { p.c[j] } else { 0.0 };
    let real = |j: usize| j < cols;

    let warm = harmonic_basis(p)
        .and_then(|b| Tableau::new(p, b, *opts))
        .filter(|t| t.xb.iter().all(|&x| x >= -opts.feasibility_tolerance));
    let warm_started = warm.is_some();
    let mut t = match warm {
        Some(t) => t,
        None => {
            let mut t = Tableau::new(p, (cols..cols + p.rows).collect(), *opts).expect("identity basis");
            let phase1 = |j: usize| if j >= cols { -1.0 } else { 0.0 };
            match t.optimize(&phase1, &|_| true) {
                Outcome::IterationLimit => return finish(p, &t, LpStatus::IterationLimit, &cost, warm_started),
                Outcome::Unbounded | Outcome::Optimal => {}
            }
            t.refactor();
            let infeasibility: f64 =
                t.basis.iter().zip(&t.xb).filter(|(j, _)| **j >= cols).map(|(_, x)| *x).sum();
            if infeasibility > opts.feasibility_tolerance {
                return finish(p, &t, LpStatus::Infeasible, &cost, warm_started);
            }
            drive_out_artificials(&mut t);
            t
        }
    };
    let status = match t.optimize(&cost, &real) {
        Outcome::Optimal => LpStatus::Optimal,
        Outcome::Unbounded => LpStatus::Unbounded,
        Outcome::IterationLimit => LpStatus::IterationLimit,
    };
    t.refactor();
    finish(p, &t, status, &cost, warm_started)
}

fn drive_out_artificials(t: &mut Tableau<'_>) {
    let cols = t.p.cols();
    let m = t.m;
    for row in 0..m {
        if t.basis[row] < cols {
            continue;
        }
        let mut pick: Option<(usize, f64)> = None;
        for j in 0..cols {
            if t.in_basis[j] {
                continue;
            }
            let v: f64 = t.p.columns[j].iter().map(|&(r, a)| t.binv[row * m + r] * a).sum();
            if v.abs() > 1e-9 && pick.is_none_or(|(_, pv)| v.abs() > pv.abs()) {
                pick = Some((j, v));
            }
        }
        if let Some((j, _)) = pick {
            let u = t.ftran(j);
            t.pivot(row, j, &u);
        }
    }
}

fn finish(p: &LpProblem, t: &Tableau<'_>, status: LpStatus, cost: &dyn Fn(usize) -> f64, warm: bool) -> LpSolution {
    let cols = p.cols();
    let mut x = vec![0.0; cols];
    let mut basis = vec![None; t.m];
    for (i, &j) in t.basis.iter().enumerate() {
        if j < cols {
            x[j] = t.xb[i];
            basis[i] = Some(j);
        }
    }
    let y = t.duals(cost);
    let max_reduced_cost = (0..cols)
        .filter(|&j| !t.in_basis[j])
        .map(|j| t.reduced_cost(j, &y, cost))
        .fold(f64::NEG_INFINITY, f64::max);
    let objective = x.iter().zip(&p.c).map(|(a, b)| a * b).sum();
    LpSolution { status, x, objective, iterations: t.iterations, basis, max_reduced_cost, warm_started: warm }
}

/// A positive time share and the rate vector it carries, with slots mapped
/// back to receiver positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Share {
    pub time: f64,
    pub vector: RateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub rate: f64,
    pub shares: Vec<Share>,
    pub covered: Vec<usize>,
    pub excluded: Vec<usize>,
    /// LP columns including `R`.
    pub columns: usize,
    pub iterations: usize,
}

impl Schedule {
    /// Time-averaged rate of each receiver position.
    pub fn receiver_rates(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for s in &self.shares {
            for &(pos, r) in s.vector.entries() {
                out[pos] += s.time * r;
            }
        }
        out
    }
}

/// Solves the assembled LP and maps an optimal solution to shares.
pub fn solve_vectors(
    vectors: &[RateVector],
    n: usize,
    w: &RateWeights,
    opts: &SolveOptions,
) -> Result<(f64, Vec<Share>, LpSolution)> {
    let p = assemble(vectors, n, w)?;
    let sol = solve(&p, opts);
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::Infeasible),
        LpStatus::IterationLimit => return Err(Error::IterationLimit(sol.iterations)),
        LpStatus::Unbounded => return Err(Error::InvalidProblem("unbounded".into())),
    }
    let shares = sol.x[..vectors.len()]
        .iter()
        .zip(vectors)
        .filter(|(t, _)| **t > SHARE_EPSILON)
        .map(|(&time, v)| Share { time, vector: v.clone() })
        .collect();
    Ok((sol.objective, shares, sol))
}

/// Optimal broadcast schedule over every enumerated vector. `w` is indexed
/// by receiver position; unavailable receivers are left out.
pub fn optimal_schedule(
    receivers: &[Receiver],
    table: &ModCodTable,
    limits: &EnumerationLimits,
    w: &RateWeights,
) -> Result<Schedule> {
    let e = enumerate_all(receivers, table, limits)?;
    schedule_from(&e, w, &SolveOptions::default())
}

/// Same as [`optimal_schedule`] on an existing enumeration.
pub fn schedule_from(
    e: &crate::ratevectors::Enumeration,
    w: &RateWeights,
    opts: &SolveOptions,
) -> Result<Schedule> {
    let vectors = e.vectors();
    let (rate, shares, sol) = solve_vectors(&vectors, e.slot_count(), &w.select(&e.covered)?, opts)?;
    let shares = shares
        .into_iter()
        .map(|s| Share { time: s.time, vector: s.vector.with_slots(|slot| e.covered[slot]) })
        .collect();
    Ok(Schedule {
        rate,
        shares,
        covered: e.covered.clone(),
        excluded: e.excluded.clone(),
        columns: vectors.len() + 1,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(entries: &[(usize, f64)]) -> RateVector {
        RateVector::new(entries.iter().enumerate().map(|(k, &(s, r))| (s, r, k))).unwrap()
    }

    /// Solves every square subsystem and keeps the best non-negative one.
    fn vertex_oracle(p: &LpProblem) -> Option<f64> {
        let (m, k) = (p.rows(), p.cols());
        let a = p.dense();
        let mut best: Option<f64> = None;
        let mut subset: Vec<usize> = (0..m).collect();
        if m > k {
            return None;
        }
        loop {
            let mut dense = vec![0.0; m * m];
            for (kk, &j) in subset.iter().enumerate() {
                for i in 0..m {
                    dense[i * m + kk] = a[i][j];
                }
            }
            if let Some(inv) = invert(m, dense) {
                let xb: Vec<f64> = (0..m).map(|i| (0..m).map(|r| inv[i * m + r] * p.b()[r]).sum()).collect();
                if xb.iter().all(|&x| x >= -1e-12) {
                    let mut x = vec![0.0; k];
                    for (kk, &j) in subset.iter().enumerate() {
                        x[j] = xb[kk];
                    }
                    if p.residual(&x) < 1e-9 {
                        let obj: f64 = x.iter().zip(p.c()).map(|(a, b)| a * b).sum();
                        best = Some(best.map_or(obj, |b: f64| b.max(obj)));
                    }
                }
            }
            // Next combination in lexicographic order.
            let mut i = m;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if subset[i] < k - m + i {
                    break;
                }
            }
            subset[i] += 1;
            for t in i + 1..m {
                subset[t] = subset[t - 1] + 1;
            }
        }
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<RateVector> {
        let mut out: Vec<RateVector> = (0..n).map(|i| v(&[(i, rng.random_range(1..=18) as f64 / 4.0)])).collect();
        while out.len() < k {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                out.push(v(&[(a, rng.random_range(1..=18) as f64 / 4.0)]));
            } else {
                out.push(v(&[(a, rng.random_range(1..=12) as f64 / 4.0), (b, rng.random_range(1..=12) as f64 / 4.0)]));
            }
        }
        out
    }

    fn check_certificate(p: &LpProblem, s: &LpSolution) {
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(p.residual(&s.x) < 1e-9);
        assert!(s.x.iter().all(|&x| x >= -1e-12));
        assert!(s.max_reduced_cost <= 1e-9, "{}", s.max_reduced_cost);
    }

    #[test]
    fn assemble_single_vector() {
        let p = assemble(&[v(&[(0, 2.0)])], 1, &RateWeights::uniform(1)).unwrap();
        assert_eq!(p.dense(), vec![vec![2.0, -1.0], vec![1.0, 0.0]]);
        assert_eq!(p.b(), &[0.0, 1.0]);
        assert_eq!(p.c(), &[0.0, 1.0]);
    }

    #[test]
    fn assemble_weighted_last_column() {
        let w = RateWeights::new(vec![1.0, 2.0]).unwrap();
        let p = assemble(&[v(&[(0, 1.0)]), v(&[(1, 1.0)])], 2, &w).unwrap();
        let a = p.dense();
        assert_eq!((a.len(), a[0].len()), (3, 3));
        assert_eq!(a.iter().map(|r| r[2]).collect::<Vec<_>>(), vec![-1.0, -2.0, 0.0]);
        assert_eq!(a[2], vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn assemble_rejects_bad_input() {
        let w = RateWeights::uniform(1);
        assert!(assemble(&[], 1, &w).is_err());
        assert!(assemble(&[v(&[(1, 1.0)])], 1, &w).is_err());
        assert!(assemble(&[v(&[(0, 1.0)])], 2, &w).is_err());
        assert!(RateWeights::new(vec![1.0, 0.0]).is_err());
        assert!(RateWeights::new(vec![]).is_err());
    }

    #[test]
    fn single_receiver() {
        let (r, shares, _) =
            solve_vectors(&[v(&[(0, 2.0)])], 1, &RateWeights::uniform(1), &SolveOptions::default()).unwrap();
        assert_eq!(r, 2.0);
        assert_eq!(shares.len(), 1);
        assert_eq!(shares[0].time, 1.0);
    }

    #[test]
    fn two_singles_harmonic() {
        let vs = [v(&[(0, 1.0)]), v(&[(1, 3.0)])];
        let (r, shares, sol) = solve_vectors(&vs, 2, &RateWeights::uniform(2), &SolveOptions::default()).unwrap();
        assert!((r - 0.75).abs() < 1e-12);
        assert!((shares[0].time - 0.75).abs() < 1e-12 && (shares[1].time - 0.25).abs() < 1e-12);
        assert!(sol.warm_started);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn three_receivers_with_hierarchical_vector() {
        let vs = [v(&[(0, 1.0)]), v(&[(1, 2.0)]), v(&[(2, 1.0)]), v(&[(0, 1.5), (2, 1.5)])];
        let p = assemble(&vs, 3, &RateWeights::uniform(3)).unwrap();
        let s = solve(&p, &SolveOptions::default());
        check_certificate(&p, &s);
        assert!(s.objective >= 6.0 / 7.0 - 1e-12);
        assert!((s.objective - vertex_oracle(&p).unwrap()).abs() < 1e-12);
        assert!((s.objective - 6.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1..=4);
            let k = rng.random_range(n..=10);
            let vs = random_instance(&mut rng, n, k);
            let p = assemble(&vs, n, &RateWeights::uniform(n)).unwrap();
            let s = solve(&p, &SolveOptions::default());
            check_certificate(&p, &s);
            let o = vertex_oracle(&p).unwrap();
            assert!((s.objective - o).abs() <= 1e-9 * o, "{} vs {o}", s.objective);
        }
    }

    #[test]
    fn phase_one_without_singles() {
        // Receiver 1 has no single column.
        let vs = [v(&[(0, 2.0)]), v(&[(0, 1.0), (1, 1.0)]), v(&[(0, 0.5), (1, 2.0)])];
        let p = assemble(&vs, 2, &RateWeights::uniform(2)).unwrap();
        let s = solve(&p, &SolveOptions::default());
        assert!(!s.warm_started);
        check_certificate(&p, &s);
        assert!((s.objective - vertex_oracle(&p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn infeasible_without_coverage() {
        // Receiver 1 is never served, so R must be 0 and the shares cannot sum
        // to one without serving receiver 0.
        let p = assemble(&[v(&[(0, 1.0)])], 2, &RateWeights::uniform(2)).unwrap();
        assert_eq!(solve(&p, &SolveOptions::default()).status, LpStatus::Infeasible);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let vs = [v(&[(0, 1.0)]), v(&[(1, 2.0)]), v(&[(2, 1.0)]), v(&[(0, 1.5), (2, 1.5)])];
        let opts = SolveOptions { max_iterations: 0, ..SolveOptions::default() };
        let err = solve_vectors(&vs, 3, &RateWeights::uniform(3), &opts).unwrap_err();
        assert_eq!(err, Error::IterationLimit(0));
    }

    #[test]
    fn weighted_rates_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(2..=4);
            let vs = random_instance(&mut rng, n, 9);
            let w = RateWeights::new((0..n).map(|_| rng.random_range(1..=8) as f64 / 4.0).collect()).unwrap();
            let (r, shares, _) = solve_vectors(&vs, n, &w, &SolveOptions::default()).unwrap();
            let mut got = vec![0.0; n];
            for s in &shares {
                for &(i, x) in s.vector.entries() {
                    got[i] += s.time * x;
                }
            }
            for (g, wi) in got.iter().zip(w.as_slice()) {
                assert!((g - r * wi).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bland_fallback_reaches_same_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eager = SolveOptions { bland_after: 0, ..SolveOptions::default() };
        for _ in 0..50 {
            let vs = random_instance(&mut rng, 4, 10);
            let p = assemble(&vs, 4, &RateWeights::uniform(4)).unwrap();
            let a = solve(&p, &SolveOptions::default());
            let b = solve(&p, &eager);
            check_certificate(&p, &b);
            assert!((a.objective - b.objective).abs() < 1e-12);
        }
    }

    #[test]
    fn larger_instance_with_refactoring() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 40;
        let vs = random_instance(&mut rng, n, 800);
        let p = assemble(&vs, n, &RateWeights::uniform(n)).unwrap();
        let s = solve(&p, &SolveOptions::default());
        check_certificate(&p, &s);
        let tight = solve(&p, &SolveOptions { refactor_interval: 1, ..SolveOptions::default() });
        assert!((s.objective - tight.objective).abs() < 1e-10);
    }

    #[test]
    fn text_dump_lists_columns() {
        let p = assemble(&[v(&[(0, 2.0)])], 1, &RateWeights::uniform(1)).unwrap();
        assert_eq!(p.to_text(), "rows 2 cols 2\nb 0.0 1.0\nc 0.0 1.0\n0: 0=2.0 1=1.0\n1: 0=-1.0\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn adding_a_column_never_lowers_rate(seed in any::<u64>(), n in 1usize..6, k in 0usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut vs = random_instance(&mut rng, n, n + k);
            let w = RateWeights::uniform(n);
            let before = solve_vectors(&vs, n, &w, &SolveOptions::default()).unwrap().0;
            vs.extend(random_instance(&mut rng, n, n + 1).into_iter().skip(n));
            vs.push(random_instance(&mut rng, n, n).swap_remove(0));
            let after = solve_vectors(&vs, n, &w, &SolveOptions::default()).unwrap().0;
            prop_assert!(after >= before - 1e-9 * before);
        }

        #[test]
        fn singles_only_is_harmonic(rates in proptest::collection::vec(1u32..40, 1..12)) {
            let n = rates.len();
            let vs: Vec<RateVector> = rates.iter().enumerate().map(|(i, &r)| v(&[(i, r as f64 / 8.0)])).collect();
            let r = solve_vectors(&vs, n, &RateWeights::uniform(n), &SolveOptions::default()).unwrap().0;
            let h = 1.0 / rates.iter().map(|&r| 8.0 / r as f64).sum::<f64>();
            prop_assert!((r - h).abs() <= 1e-9 * h);
        }
    }
}
