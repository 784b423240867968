//! Brute-force oracles. Everything here is computed straight from the reward
//! tables by enumeration and shares no code path with the engines it checks.

#![allow(dead_code)]

use matchkit::{Instance, Matching, Matrix, RewardDist};

pub const EPS: f64 = 1e-9;

/// All permutations of `0..n` in lexicographic order (Heap-free, recursive).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn value(theta: &Matrix, sigma: &[usize]) -> f64 {
    sigma.iter().enumerate().map(|(i, &j)| theta[(i, j)]).sum()
}

/// Maximum of `sum theta[i, sigma(i)]` over all permutations.
pub fn brute_max(theta: &Matrix) -> f64 {
    permutations(theta.n())
        .iter()
        .map(|s| value(theta, s))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every simple cycle of `0..n` (length >= 2), each listed once, starting at
/// its smallest element.
pub fn simple_cycles(n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, path: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if path.len() >= 2 {
            out.push(path.clone());
        }
        for x in start + 1..used.len() {
            if !used[x] {
                used[x] = true;
                path.push(x);
                rec(start, path, used, out);
                path.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut used = vec![false; n];
        used[s] = true;
        rec(s, &mut vec![s], &mut used, &mut out);
    }
    out
}

fn husband(sigma: &[usize], j: usize) -> usize {
    sigma.iter().position(|&w| w == j).unwrap()
}

/// Blocking-chain gain on combined rewards, by definition.
pub fn ft_cycle_gain(inst: &Instance, sigma: &[usize], cycle: &[usize]) -> f64 {
    let k = cycle.len();
    let t = |i: usize, j: usize| inst.theta_m()[(i, j)] + inst.theta_w()[(i, j)];
    (0..k)
        .map(|l| {
            let a = cycle[l];
            let b = cycle[(l + 1) % k];
            t(a, sigma[b]) - t(a, sigma[a])
        })
        .sum()
}

/// Partial-transfer margin for man `i` and woman `j`, by definition.
pub fn delta(inst: &Instance, sigma: &[usize], i: usize, j: usize, q: f64) -> f64 {
    let man = inst.theta_m()[(i, j)] - inst.theta_m()[(i, sigma[i])];
    let woman = inst.theta_w()[(i, j)] - inst.theta_w()[(husband(sigma, j), j)];
    f64::min(q * man + woman, q * woman + man)
}

pub fn clip(x: f64, p: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        p * x
    }
}

pub fn pq_cycle_gain(inst: &Instance, sigma: &[usize], cycle: &[usize], p: f64, q: f64) -> f64 {
    let k = cycle.len();
    (0..k)
        .map(|l| {
            let a = cycle[l];
            let b = cycle[(l + 1) % k];
            clip(delta(inst, sigma, a, sigma[b], q), p)
        })
        .sum()
}

/// Stable iff no simple cycle has clipped gain above `EPS`.
pub fn pq_stable_by_enumeration(inst: &Instance, sigma: &[usize], p: f64, q: f64) -> bool {
    simple_cycles(inst.n())
        .iter()
        .all(|c| pq_cycle_gain(inst, sigma, c, p, q) <= EPS)
}

pub fn ft_monotone_by_enumeration(inst: &Instance, sigma: &[usize]) -> bool {
    simple_cycles(inst.n())
        .iter()
        .all(|c| ft_cycle_gain(inst, sigma, c) <= EPS)
}

/// No pair where both sides strictly gain, by definition.
pub fn fnt_stable_by_definition(inst: &Instance, sigma: &[usize]) -> bool {
    let n = inst.n();
    for i in 0..n {
        for j in 0..n {
            if j == sigma[i] {
                continue;
            }
            let man = inst.theta_m()[(i, j)] - inst.theta_m()[(i, sigma[i])];
            let woman = inst.theta_w()[(i, j)] - inst.theta_w()[(husband(sigma, j), j)];
            if man > EPS && woman > EPS {
                return false;
            }
        }
    }
    true
}

/// Least chain cost ending at couple `target`: minimum over sequences of
/// distinct couples `i_1..i_k` (`k <= n`) of
/// `sum_{l<k} (θ[i_l, σ(i_l)] - θ[i_l, σ(i_{l+1})]) + θ[i_k, σ(i_k)] - θ[i_k, σ(target)]`.
pub fn chain_potential_by_enumeration(theta: &Matrix, sigma: &[usize], target: usize) -> f64 {
    let n = theta.n();
    let step = |a: usize, b: usize| theta[(a, sigma[a])] - theta[(a, sigma[b])];
    let mut best = f64::INFINITY;
    fn rec(
        path: &mut Vec<usize>,
        used: &mut [bool],
        acc: f64,
        target: usize,
        step: &dyn Fn(usize, usize) -> f64,
        best: &mut f64,
    ) {
        let last = *path.last().unwrap();
        *best = best.min(acc + step(last, target));
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                path.push(x);
                rec(path, used, acc + step(last, x), target, step, best);
                path.pop();
                used[x] = false;
            }
        }
    }
    for s in 0..n {
        let mut used = vec![false; n];
        used[s] = true;
        rec(&mut vec![s], &mut used, 0.0, target, &step, &mut best);
    }
    best
}

/// Seeded corpus mixing continuous and small-integer rewards; integer
/// instances carry ties and degenerate optima.
pub fn corpus_instance(n: usize, seed: u64) -> Instance {
    let dist = if seed % 2 == 0 {
        RewardDist::Uniform01
    } else {
        RewardDist::IntegerRange { lo: 0, hi: 5 }
    };
    Instance::random(n, seed, dist).unwrap()
}

pub fn matching(sigma: &[usize]) -> Matching {
    Matching::new(sigma.to_vec()).unwrap()
}

pub fn boxed() -> Instance {
    Instance::from_rows(
        &[vec![1.0, 0.0], vec![0.0, 1.0]],
        &[vec![1.0, 5.0], vec![0.0, 1.0]],
    )
    .unwrap()
}
