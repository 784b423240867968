//! Fully transferable stability.
//!
//! With shared rewards `theta = theta_m + theta_w` a plan is stable exactly
//! when it maximizes total reward, exactly when it admits no blocking chain
//! (cyclic monotonicity), and exactly when dual cuts supported by it lie in
//! the core. Each characterization is computed independently here so the
//! equivalence can be checked rather than assumed.

use crate::cycles::{cycle_weight, find_positive_cycle};
use crate::error::{Error, Result};
use crate::instance::{CutVector, Matching, Matrix};
use crate::tolerance::eps;

pub use crate::assignment::optimal_assignment;

/// A cycle of couples `i_1 .. i_k` in which man `i_l` moves to the wife of
/// `i_{l+1}` (wrapping around), together with the total reward gained.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainWitness {
    pub cycle: Vec<usize>,
    pub gain: f64,
}

/// Reward change when man `a` leaves his wife for the wife of couple `b`.
#[inline]
fn chain_step(theta: &Matrix, m: &Matching, a: usize, b: usize) -> f64 {
    theta[(a, m.wife(b))] - theta[(a, m.wife(a))]
}

/// Total gain of rotating partners along `cycle`.
pub fn chain_gain(theta: &Matrix, m: &Matching, cycle: &[usize]) -> f64 {
    cycle_weight(cycle, |a, b| chain_step(theta, m, a, b))
}

/// `Ok(())` when no blocking chain exists, otherwise a violating cycle.
pub fn is_cyclically_monotone(
    theta: &Matrix,
    m: &Matching,
) -> Result<std::result::Result<(), ChainWitness>> {
    m.check_size(theta.n())?;
    Ok(
        match find_positive_cycle(theta.n(), |a, b| chain_step(theta, m, a, b)) {
            None => Ok(()),
            Some(cycle) => {
                let gain = chain_gain(theta, m, &cycle);
                Err(ChainWitness { cycle, gain })
            }
        },
    )
}

/// For each couple `i`, the least cost of a chain of any length and any
/// starting couple that ends by handing `i`'s wife to its last man:
///
/// `min over i_1..i_k of sum_{l<k} (theta[i_l, m(i_l)] - theta[i_l, m(i_{l+1})])
///                         + theta[i_k, m(i_k)] - theta[i_k, m(i)]`.
///
/// The chain consisting of `i` alone costs zero, so every value is `<= 0`.
/// Computed as multi-source shortest paths (all sources at 0). The cut of
/// the woman matched to `i` is the negation of this value.
pub fn chain_potentials(theta: &Matrix, m: &Matching) -> Result<Vec<f64>> {
    if let Err(w) = is_cyclically_monotone(theta, m)? {
        return Err(Error::NotCyclicallyMonotone(w));
    }
    let n = theta.n();
    let cost = |a: usize, b: usize| -chain_step(theta, m, a, b);
    let mut dist = vec![0.0_f64; n];
    for _ in 1..n {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let cand = dist[a] + cost(a, b);
                if cand < dist[b] {
                    dist[b] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(dist)
}

/// Core-supporting cuts for a cyclically monotone plan.
///
/// `v[m(i)] = -chain_potentials[i]` and `u[i] = theta[i, m(i)] - v[m(i)]`,
/// then re-gauged (`u - c`, `v + c`) so that `min_i u[i] = 0`. The potentials
/// satisfy `pi[b] <= pi[a] + theta[a, m(a)] - theta[a, m(b)]`, which is
/// exactly `u[a] + v[m(b)] >= theta[a, m(b)]`.
pub fn dual_cuts(theta: &Matrix, m: &Matching) -> Result<CutVector> {
    let pot = chain_potentials(theta, m)?;
    let n = theta.n();
    let mut u = vec![0.0; n];
    for (i, j) in m.pairs() {
        u[i] = theta[(i, j)] + pot[i];
    }
    let anchor = u.iter().copied().fold(f64::INFINITY, f64::min);
    for x in &mut u {
        *x -= anchor;
    }
    let mut v = vec![0.0; n];
    for (i, j) in m.pairs() {
        v[j] = theta[(i, j)] - u[i];
    }
    CutVector::new(u, v)
}

fn check_cut_size(n: usize, cuts: &CutVector) -> Result<()> {
    if cuts.n() != n {
        return Err(Error::DimensionMismatch {
            what: "cut vector",
            expected: n,
            found: cuts.n(),
        });
    }
    Ok(())
}

/// `u[i] + v[j] >= theta[i, j] - eps()` for every pair: the cuts lie in the
/// dominating set no pair can improve on.
pub fn is_dominating(theta: &Matrix, cuts: &CutVector) -> Result<bool> {
    let n = theta.n();
    check_cut_size(n, cuts)?;
    let tol = eps();
    Ok((0..n).all(|i| (0..n).all(|j| cuts.u[i] + cuts.v[j] >= theta[(i, j)] - tol)))
}

/// Equality on matched pairs and `u[i] + v[j] >= theta[i, j]` everywhere,
/// both up to `eps()`.
pub fn verify_ft_core(theta: &Matrix, m: &Matching, cuts: &CutVector) -> Result<bool> {
    m.check_size(theta.n())?;
    let tol = eps();
    let dominating = is_dominating(theta, cuts)?;
    let matched_tight = m
        .pairs()
        .all(|(i, j)| (cuts.u[i] + cuts.v[j] - theta[(i, j)]).abs() <= tol);
    Ok(matched_tight && dominating)
}

/// For dominating cuts, whether their total equals the optimal assignment
/// value (within `n * eps()`), i.e. whether they attain the least total
/// payoff over the dominating set. Cuts outside that set are rejected.
pub fn check_optimality_of_cuts(theta: &Matrix, m: &Matching, cuts: &CutVector) -> Result<bool> {
    m.check_size(theta.n())?;
    if !is_dominating(theta, cuts)? {
        return Err(Error::Precondition(
            "cuts leave some pair below its combined reward".into(),
        ));
    }
    let (_, best) = optimal_assignment(theta);
    Ok((cuts.total() - best).abs() <= theta.n() as f64 * eps())
}
