//! Independent references shared by the integration tests.
#![allow(dead_code)]

use hmlp_core::lp::LpProblem;

/// Best objective over all feasible basic solutions, by solving every square
/// column subset with Gaussian elimination.
pub fn vertex_enumeration(p: &LpProblem) -> Option<f64> {
    let (m, k) = (p.rows(), p.cols());
    if m > k {
        return None;
    }
    let a = p.dense();
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = (0..m).collect();
    loop {
        if let Some(xb) = solve_square(&a, &subset, p.b()) {
            if xb.iter().all(|&x| x >= -1e-12) {
                let mut x = vec![0.0; k];
                for (kk, &j) in subset.iter().enumerate() {
                    x[j] = xb[kk];
                }
                if p.residual(&x) < 1e-9 {
                    let obj: f64 = x.iter().zip(p.c()).map(|(a, b)| a * b).sum();
                    best = Some(best.map_or(obj, |b| b.max(obj)));
                }
            }
        }
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

fn solve_square(a: &[Vec<f64>], cols: &[usize], b: &[f64]) -> Option<Vec<f64>> {
    let m = cols.len();
    let mut aug: Vec<Vec<f64>> = (0..m).map(|i| cols.iter().map(|&j| a[i][j]).chain([b[i]]).collect()).collect();
    for c in 0..m {
        let p = (c..m).max_by(|&x, &y| aug[x][c].abs().total_cmp(&aug[y][c].abs()))?;
        if aug[p][c].abs() < 1e-12 {
            return None;
        }
        aug.swap(p, c);
        let pivot = aug[c].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != c {
                let f = row[c] / pivot[c];
                for k in c..=m {
                    row[k] -= f * pivot[k];
                }
            }
        }
    }
    Some((0..m).map(|i| aug[i][m] / aug[i][i]).collect())
}

/// `J1(x)` from 200 terms of its power series, summed in pairs of
/// alternating sign with compensated (Kahan) addition.
pub fn bessel_j1_series(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half;
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in 0..200 {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        let kf = k as f64;
        term *= -(half * half) / ((kf + 1.0) * (kf + 2.0));
    }
    sum
}

/// `(Σ 1/r_i)^-1`.
pub fn harmonic(rates: &[f64]) -> f64 {
    1.0 / rates.iter().map(|r| 1.0 / r).sum::<f64>()
}
