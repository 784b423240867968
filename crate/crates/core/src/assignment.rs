//! Exact maximum-weight perfect assignment (Hungarian method with
//! potentials, O(n^3)).
//!
//! Among several maximizers the lexicographically smallest assignment is
//! returned: after the solve, every optimal plan uses only edges that are
//! tight for the optimal dual, so a greedy pass over the tight-edge graph
//! picks the smallest feasible partner for each man in turn.

use std::collections::VecDeque;

use crate::instance::{Matching, Matrix};
use crate::tolerance::eps;

/// Optimal plan together with the dual potentials of the minimisation
/// `sum_i -theta[(i, sigma(i))]`.
#[derive(Clone, Debug)]
pub struct AssignmentSolution {
    pub matching: Matching,
    pub value: f64,
    /// Row potentials; `-theta[(i, j)] - row[i] - col[j] >= 0`.
    pub row: Vec<f64>,
    pub col: Vec<f64>,
}

/// Maximizes `sum_i theta[(i, sigma(i))]` over permutations.
pub fn optimal_assignment(theta: &Matrix) -> (Matching, f64) {
    let sol = solve(theta);
    (sol.matching, sol.value)
}

pub fn solve(theta: &Matrix) -> AssignmentSolution {
    let n = theta.n();
    if n == 0 {
        return AssignmentSolution {
            matching: Matching::identity(0),
            value: 0.0,
            row: vec![],
            col: vec![],
        };
    }
    let cost = |i: usize, j: usize| -theta[(i - 1, j - 1)];

    // 1-based arrays; column 0 is the virtual start.
    let mut u = vec![0.0_f64; n + 1];
    let mut v = vec![0.0_f64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
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

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    let row: Vec<f64> = u[1..].to_vec();
    let col: Vec<f64> = v[1..].to_vec();
    let tol = eps();
    let tight = |i: usize, j: usize| -theta[(i, j)] - row[i] - col[j] <= tol;
    let assignment = lexicographic_tight(n, assignment, tight);
    let matching = Matching::new(assignment).expect("assignment is a permutation");
    let value = theta.value_of(&matching);
    AssignmentSolution {
        matching,
        value,
        row,
        col,
    }
}

/// Lexicographically smallest perfect matching of the tight-edge graph,
/// starting from the perfect matching `start`.
fn lexicographic_tight(
    n: usize,
    start: Vec<usize>,
    tight: impl Fn(usize, usize) -> bool,
) -> Vec<usize> {
    let mut wife = start;
    let mut husband = vec![0usize; n];
    for (i, &j) in wife.iter().enumerate() {
        husband[j] = i;
    }
    let mut woman_fixed = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if woman_fixed[j] || !tight(i, j) {
                continue;
            }
            if wife[i] == j {
                break;
            }
            // Give j to i; her husband k must reach i's old wife w0 by an
            // alternating path among the unfixed men and women.
            let k = husband[j];
            let w0 = wife[i];
            if let Some(path) = alternating_path(n, k, w0, j, &woman_fixed, &husband, &tight) {
                // path: (man, new wife) pairs along the augmentation
                for (man, woman) in path {
                    wife[man] = woman;
                    husband[woman] = man;
                }
                wife[i] = j;
                husband[j] = i;
                break;
            }
        }
        woman_fixed[wife[i]] = true;
    }
    wife
}

fn alternating_path(
    n: usize,
    start: usize,
    target: usize,
    banned: usize,
    woman_fixed: &[bool],
    husband: &[usize],
    tight: &impl Fn(usize, usize) -> bool,
) -> Option<Vec<(usize, usize)>> {
    // BFS over women; parent[w] = man who reached w.
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::from([start]);
    let mut seen_man = vec![false; n];
    seen_man[start] = true;
    while let Some(man) = queue.pop_front() {
        for w in 0..n {
            if w == banned || woman_fixed[w] || parent[w] != usize::MAX || !tight(man, w) {
                continue;
            }
            parent[w] = man;
            if w == target {
                let mut path = Vec::new();
                let mut w = target;
                loop {
                    let m = parent[w];
                    path.push((m, w));
                    if m == start {
                        return Some(path);
                    }
                    w = current_wife(husband, m);
                }
            }
            let next = husband[w];
            if !seen_man[next] {
                seen_man[next] = true;
                queue.push_back(next);
            }
        }
    }
    None
}

fn current_wife(husband: &[usize], man: usize) -> usize {
    husband
        .iter()
        .position(|&h| h == man)
        .expect("every man is matched")
}
