//! Partial transfer ("fake promises") stability.
//!
//! `q` is the share of a side payment a partner actually keeps, `p` the share
//! of other couples' losses a profitable chain must cover. A plan is
//! `(p, q)`-stable when no rotation of partners along a cycle of couples has
//! a positive `p`-clipped sum of `q`-utilities. `(0, 0)` recovers blocking
//! pairs, `(1, 1)` recovers blocking chains on the combined rewards.
//!
//! Only simple cycles are searched. A repeated-couple cycle is a union of
//! simple cycles whose clipped sums add up to its own, so if it is positive
//! one of its simple parts is positive too.

use crate::cycles::{cycle_weight, find_positive_cycle};
use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, Matrix, PQParams};
use crate::perm::{all_matchings, ensure_at_most, ENUMERATION_LIMIT};
use crate::tolerance::eps;

/// Largest market for the grid checks that rerun chain detection per cell.
pub const GRID_CHECK_LIMIT: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct PQChainWitness {
    pub cycle: Vec<usize>,
    pub clipped_gain: f64,
}

fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange { what, value });
    }
    Ok(())
}

/// `x` for `x >= 0`, `p * x` otherwise.
pub fn clip_p(x: f64, p: f64) -> Result<f64> {
    check_unit("p", p)?;
    Ok(clip(x, p))
}

#[inline]
fn clip(x: f64, p: f64) -> f64 {
    if x >= 0.0 {
        x
    } else {
        p * x
    }
}

/// Acceptability margin of man `i` and woman `j` leaving their partners when
/// each keeps only a share `q` of the promised transfer: the smaller of
///
/// * `q * (man's gain) + woman's gain` (she accepts his offer), and
/// * `q * (woman's gain) + man's gain` (he accepts hers),
///
/// where the man's gain is measured against his wife and the woman's gain
/// against her husband.
pub fn delta_q(inst: &Instance, m: &Matching, i: usize, j: usize, q: f64) -> f64 {
    let man = inst.theta_m()[(i, j)] - inst.theta_m()[(i, m.wife(i))];
    let woman = inst.theta_w()[(i, j)] - inst.theta_w()[(m.husband(j), j)];
    (q * man + woman).min(q * woman + man)
}

/// `(a + b) / 2 - r |a - b| / 2`; `r = 1` gives `min(a, b)`, `r = 0` the mean.
pub fn delta_r(a: f64, b: f64, r: f64) -> Result<f64> {
    check_unit("r", r)?;
    Ok(0.5 * (a + b) - 0.5 * r * (a - b).abs())
}

/// Weight of letting couple `a`'s man court couple `b`'s wife.
#[inline]
fn edge(inst: &Instance, m: &Matching, pq: PQParams, a: usize, b: usize) -> f64 {
    clip(delta_q(inst, m, a, m.wife(b), pq.q()), pq.p())
}

/// Clipped gain of rotating partners along `cycle`.
pub fn clipped_chain_gain(inst: &Instance, m: &Matching, pq: PQParams, cycle: &[usize]) -> f64 {
    cycle_weight(cycle, |a, b| edge(inst, m, pq, a, b))
}

/// `Ok(())` when `m` is `(p, q)`-stable, otherwise a cycle that activates.
pub fn find_pq_blocking_chain(
    inst: &Instance,
    m: &Matching,
    pq: PQParams,
) -> Result<std::result::Result<(), PQChainWitness>> {
    m.check_size(inst.n())?;
    Ok(
        match find_positive_cycle(inst.n(), |a, b| edge(inst, m, pq, a, b)) {
            None => Ok(()),
            Some(cycle) => {
                let clipped_gain = clipped_chain_gain(inst, m, pq, &cycle);
                Err(PQChainWitness {
                    cycle,
                    clipped_gain,
                })
            }
        },
    )
}

pub fn is_pq_stable(inst: &Instance, m: &Matching, pq: PQParams) -> Result<bool> {
    Ok(find_pq_blocking_chain(inst, m, pq)?.is_ok())
}

/// First `(p, q)`-stable plan in lexicographic order, by brute force.
pub fn exists_pq_stable(inst: &Instance, pq: PQParams) -> Result<Option<Matching>> {
    ensure_at_most("exists_pq_stable", inst.n(), ENUMERATION_LIMIT)?;
    for m in all_matchings(inst.n()) {
        if is_pq_stable(inst, &m, pq)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Two-couple market with no `(p, q)`-stable plan, for `q > p`.
///
/// Both tables are `[[0, a], [-b, 0]]` with `a = 1` and `a / b = (p + q) / 2`,
/// so the identity plan is broken by the pair swap (`a > p b`) and the
/// swapped plan is broken by returning (`a < q b`).
pub fn counterexample_instance(p: f64, q: f64) -> Result<Instance> {
    check_unit("p", p)?;
    check_unit("q", q)?;
    if q - p <= 10.0 * eps() {
        return Err(Error::Precondition(format!(
            "counterexample needs q > p, got p = {p}, q = {q}"
        )));
    }
    Ok(adversarial_pair(1.0, 2.0 / (p + q)))
}

pub(crate) fn adversarial_pair(a: f64, b: f64) -> Instance {
    let t = Matrix::from_rows("theta", 2, &[vec![0.0, a], vec![-b, 0.0]])
        .expect("finite 2x2 table");
    Instance::new(t.clone(), t).expect("valid 2x2 instance")
}

/// Uniform grid `0, 1/(steps-1), ..., 1`.
pub fn grid_values(steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Precondition(format!(
            "grid needs at least 2 points per axis, got {steps}"
        )));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| k as f64 / last).collect())
}

/// A `(p, q)` grid point.
pub type GridPoint = (f64, f64);

/// Grid pairs `((p, q), (p', q'))` with `p' >= p`, `q' <= q`, where `m` is
/// stable at the first and unstable at the second.
pub fn monotonicity_violations(
    inst: &Instance,
    m: &Matching,
    grid_steps: usize,
) -> Result<Vec<(GridPoint, GridPoint)>> {
    ensure_at_most("check_pq_monotonicity", inst.n(), GRID_CHECK_LIMIT)?;
    let grid = grid_values(grid_steps)?;
    let k = grid.len();
    let mut stable = vec![false; k * k];
    for (a, &p) in grid.iter().enumerate() {
        for (b, &q) in grid.iter().enumerate() {
            stable[a * k + b] = is_pq_stable(inst, m, PQParams::new(p, q)?)?;
        }
    }
    let mut out = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if !stable[a * k + b] {
                continue;
            }
            for a2 in a..k {
                for b2 in 0..=b {
                    if !stable[a2 * k + b2] {
                        out.push(((grid[a], grid[b]), (grid[a2], grid[b2])));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Stability at `(p, q)` carries over to every grid point with larger `p`
/// and smaller `q`.
pub fn check_pq_monotonicity(inst: &Instance, m: &Matching, grid_steps: usize) -> Result<bool> {
    Ok(monotonicity_violations(inst, m, grid_steps)?.is_empty())
}
