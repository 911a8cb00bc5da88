//! Optimal pairing of estimated angles with ground truth.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchedPair {
    pub truth_index: usize,
    pub estimate_index: usize,
    pub truth_deg: f64,
    pub estimate_deg: f64,
    /// Absolute error in degrees.
    pub error_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    /// Pairs ordered by truth index.
    pub pairs: Vec<MatchedPair>,
    /// Truths left unpaired or paired outside the tolerance.
    pub misses: usize,
    pub total_error_deg: f64,
}

impl Matching {
    pub fn all_within_tolerance(&self) -> bool {
        self.misses == 0
    }
}

/// Minimum-total-absolute-error assignment between `truth_deg` and
/// `est_deg`. `min(len)` pairs are always formed; a truth counts as a miss
/// when it is unpaired or its pair is more than `tolerance_deg` away.
pub fn match_angles(truth_deg: &[f64], est_deg: &[f64], tolerance_deg: f64) -> Matching {
    let cost = |t: usize, e: usize| (truth_deg[t] - est_deg[e]).abs();
    let mut pairs: Vec<(usize, usize)> = if truth_deg.len() <= est_deg.len() {
        hungarian(truth_deg.len(), est_deg.len(), cost)
            .into_iter()
            .enumerate()
            .collect()
    } else {
        hungarian(est_deg.len(), truth_deg.len(), |i, j| cost(j, i))
            .into_iter()
            .enumerate()
            .map(|(e, t)| (t, e))
            .collect()
    };
    pairs.sort_unstable();
    let pairs: Vec<MatchedPair> = pairs
        .into_iter()
        .map(|(t, e)| MatchedPair {
            truth_index: t,
            estimate_index: e,
            truth_deg: truth_deg[t],
            estimate_deg: est_deg[e],
            error_deg: cost(t, e),
        })
        .collect();
    let within = pairs
        .iter()
        .filter(|p| p.error_deg <= tolerance_deg)
        .count();
    Matching {
        misses: truth_deg.len() - within,
        total_error_deg: pairs.iter().map(|p| p.error_deg).sum(),
        pairs,
    }
}

/// Rectangular assignment (Kuhn-Munkres with potentials), `rows <= cols`.
/// Returns the column assigned to each row.
fn hungarian(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    debug_assert!(rows <= cols);
    if rows == 0 {
        return Vec::new();
    }
    // 1-based arrays; column 0 is the virtual start.
    let mut u = vec![0.0; rows + 1];
    let mut v = vec![0.0; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    for i in 1..=rows {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; cols + 1];
        let mut used = vec![false; cols + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; rows];
    for j in 1..=cols {
        if owner[j] != 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}
