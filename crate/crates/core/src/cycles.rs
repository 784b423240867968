//! Positive-cycle detection on the complete couple digraph.
//!
//! Both the transferable and the partial-transfer engines ask the same
//! question: given a weight `w(a, b)` for letting couple `a`'s man take couple
//! `b`'s woman, is there a cycle of distinct couples whose total weight
//! exceeds `eps()`?
//!
//! A closed walk with positive weight always contains a simple cycle with
//! positive weight, so searching simple cycles loses nothing. Detection runs
//! a longest-path Bellman-Ford from a virtual source (every potential starts
//! at 0) on weights shifted down by `eps() / n`. Every simple cycle of
//! weight above `eps()` stays strictly positive after the shift (it has at
//! most `n` edges), while zero-weight cycles become strictly negative, which
//! keeps ties from being reported. Cycles whose weight falls in the band
//! `(k * eps() / n, eps()]` may still be reported.

use crate::tolerance::eps;

/// Looks for a cycle of distinct couples with positive total weight.
/// Returns the couples in traversal order (`cycle[l] -> cycle[l + 1]`,
/// wrapping around), starting from the smallest index.
pub fn find_positive_cycle(n: usize, weight: impl Fn(usize, usize) -> f64) -> Option<Vec<usize>> {
    if n < 2 {
        return None;
    }
    let shift = eps() / n as f64;
    let w: Vec<f64> = (0..n * n)
        .map(|k| {
            let (a, b) = (k / n, k % n);
            if a == b {
                f64::NEG_INFINITY
            } else {
                weight(a, b) - shift
            }
        })
        .collect();

    let mut dist = vec![0.0_f64; n];
    let mut pred = vec![usize::MAX; n];
    let mut last = None;
    for _ in 0..n {
        last = None;
        for a in 0..n {
            for b in 0..n {
                let cand = dist[a] + w[a * n + b];
                if cand > dist[b] {
                    dist[b] = cand;
                    pred[b] = a;
                    last = Some(b);
                }
            }
        }
        last?;
    }

    // Still relaxing after n rounds: walk back n steps to land on the cycle.
    let mut x = last?;
    for _ in 0..n {
        x = pred[x];
    }
    let mut cycle = vec![x];
    let mut y = pred[x];
    while y != x {
        cycle.push(y);
        y = pred[y];
    }
    cycle.reverse();
    let start = (0..cycle.len()).min_by_key(|&k| cycle[k]).unwrap_or(0);
    cycle.rotate_left(start);
    Some(cycle)
}

/// Sum of `weight` around `cycle`, closing the last edge back to the start.
pub fn cycle_weight(cycle: &[usize], weight: impl Fn(usize, usize) -> f64) -> f64 {
    let k = cycle.len();
    (0..k).map(|l| weight(cycle[l], cycle[(l + 1) % k])).sum()
}
