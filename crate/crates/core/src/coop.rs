//! The cooperative-game view: each pair `(i, j)` has a bargaining set
//! `F(i, j)` of cut pairs `(u, v)` it can guarantee, and a plan is stable
//! when some cut vector puts every couple inside its own set while leaving
//! no pair strictly inside theirs.
//!
//! Every built-in set is an intersection of closed half-planes
//! `a u + b v <= c`; its interior is where all of them hold strictly.
//!
//! | model     | half-planes                                   |
//! |-----------|-----------------------------------------------|
//! | fnt       | `u <= θm`, `v <= θw`                          |
//! | ft        | `u + v <= θ`                                  |
//! | ft_nonneg | `u + v <= θ`, `u <= θ`, `v <= θ`              |
//! | ft_m2w    | `u + v <= θ`, `u <= θm`                       |
//! | ft_taxed  | `u + v / β <= θm + θw / β`, `u <= θm`          |

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{CutVector, Instance, Matching, Matrix};
use crate::lp::{scaled, to_f64, Inequality, LinearSystem, Rational};
use crate::perm::ensure_at_most;
use crate::tolerance::eps;

/// Largest market for exhaustive core search.
pub const CORE_SEARCH_LIMIT: usize = 3;

/// Float inputs are scaled by this factor and rounded before exact search.
pub const EXACT_SCALE: f64 = 1e9;

#[derive(Clone, Debug, PartialEq)]
pub enum BargainingModel {
    Fnt,
    Ft,
    FtNonneg,
    FtManToWoman,
    /// Transfers from man to woman arrive multiplied by `beta[(i, j)]`.
    FtTaxed { beta: Matrix },
}

impl BargainingModel {
    pub const NAMES: [&'static str; 5] = ["fnt", "ft", "ft_nonneg", "ft_m2w", "ft_taxed"];

    /// Looks a model up by name; the taxed model takes `beta` from the
    /// instance.
    pub fn from_name(name: &str, inst: &Instance) -> Result<Self> {
        Ok(match name {
            "fnt" => BargainingModel::Fnt,
            "ft" => BargainingModel::Ft,
            "ft_nonneg" => BargainingModel::FtNonneg,
            "ft_m2w" => BargainingModel::FtManToWoman,
            "ft_taxed" => BargainingModel::taxed(inst.beta().ok_or(Error::MissingBeta)?.clone())?,
            other => return Err(Error::UnknownModel(other.to_string())),
        })
    }

    pub fn taxed(beta: Matrix) -> Result<Self> {
        let n = beta.n();
        for i in 0..n {
            for j in 0..n {
                let b = beta[(i, j)];
                if !(b > 0.0 && b <= 1.0) {
                    return Err(Error::InvalidBeta { row: i, col: j, value: b });
                }
            }
        }
        Ok(BargainingModel::FtTaxed { beta })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BargainingModel::Fnt => "fnt",
            BargainingModel::Ft => "ft",
            BargainingModel::FtNonneg => "ft_nonneg",
            BargainingModel::FtManToWoman => "ft_m2w",
            BargainingModel::FtTaxed { .. } => "ft_taxed",
        }
    }

    fn half_planes(&self, inst: &Instance, i: usize, j: usize) -> Result<Vec<HalfPlane>> {
        let tm = inst.theta_m()[(i, j)];
        let tw = inst.theta_w()[(i, j)];
        let t = tm + tw;
        Ok(match self {
            BargainingModel::Fnt => vec![HalfPlane::Man(tm), HalfPlane::Woman(tw)],
            BargainingModel::Ft => vec![HalfPlane::Sum(t)],
            BargainingModel::FtNonneg => {
                vec![HalfPlane::Sum(t), HalfPlane::Man(t), HalfPlane::Woman(t)]
            }
            BargainingModel::FtManToWoman => vec![HalfPlane::Sum(t), HalfPlane::Man(tm)],
            BargainingModel::FtTaxed { beta } => {
                if beta.n() != inst.n() {
                    return Err(Error::DimensionMismatch {
                        what: "beta",
                        expected: inst.n(),
                        found: beta.n(),
                    });
                }
                vec![
                    HalfPlane::Taxed {
                        beta: beta[(i, j)],
                        man: tm,
                        woman: tw,
                    },
                    HalfPlane::Man(tm),
                ]
            }
        })
    }
}

impl fmt::Display for BargainingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug)]
enum HalfPlane {
    /// `u + v <= c`
    Sum(f64),
    /// `u <= c`
    Man(f64),
    /// `v <= c`
    Woman(f64),
    /// `u + v / beta <= man + woman / beta`
    Taxed { beta: f64, man: f64, woman: f64 },
}

impl HalfPlane {
    /// Signed slack `c - lhs`; non-negative inside.
    fn slack(&self, u: f64, v: f64) -> f64 {
        match *self {
            HalfPlane::Sum(c) => c - (u + v),
            HalfPlane::Man(c) => c - u,
            HalfPlane::Woman(c) => c - v,
            HalfPlane::Taxed { beta, man, woman } => (man + woman / beta) - (u + v / beta),
        }
    }

    /// Exact row over variables `u_i` (index `ui`) and `v_j` (index `vj`),
    /// in units of `1 / EXACT_SCALE`.
    fn exact(&self, ui: usize, vj: usize) -> Inequality {
        let one = || Rational::from_integer(BigInt::from(1));
        let s = |x: f64| scaled(x, EXACT_SCALE);
        match *self {
            HalfPlane::Sum(c) => Inequality::new(vec![(ui, one()), (vj, one())], s(c)),
            HalfPlane::Man(c) => Inequality::new(vec![(ui, one())], s(c)),
            HalfPlane::Woman(c) => Inequality::new(vec![(vj, one())], s(c)),
            HalfPlane::Taxed { beta, man, woman } => {
                // beta u + v <= beta man + woman, beta itself scaled
                let b = s(beta);
                let unit = s(1.0);
                let rhs = &b * s(man) + &unit * s(woman);
                Inequality::new(vec![(ui, b), (vj, unit)], rhs)
            }
        }
    }
}

/// `(u, v)` lies in the closed set `F(i, j)` (up to `eps()`).
pub fn in_feasible_set(
    model: &BargainingModel,
    inst: &Instance,
    i: usize,
    j: usize,
    u: f64,
    v: f64,
) -> Result<bool> {
    let tol = eps();
    Ok(model
        .half_planes(inst, i, j)?
        .iter()
        .all(|h| h.slack(u, v) >= -tol))
}

/// `(u, v)` lies strictly inside `F(i, j)`, by more than `eps()` on every
/// side.
pub fn in_interior(
    model: &BargainingModel,
    inst: &Instance,
    i: usize,
    j: usize,
    u: f64,
    v: f64,
) -> Result<bool> {
    let tol = eps();
    Ok(model
        .half_planes(inst, i, j)?
        .iter()
        .all(|h| h.slack(u, v) > tol))
}

/// Every couple inside its own set and no pair (matched or not) strictly
/// inside its set.
pub fn verify_core_point(
    model: &BargainingModel,
    inst: &Instance,
    m: &Matching,
    cuts: &CutVector,
) -> Result<bool> {
    let n = inst.n();
    m.check_size(n)?;
    if cuts.n() != n {
        return Err(Error::DimensionMismatch {
            what: "cut vector",
            expected: n,
            found: cuts.n(),
        });
    }
    for (i, j) in m.pairs() {
        if !in_feasible_set(model, inst, i, j, cuts.u[i], cuts.v[j])? {
            return Ok(false);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if in_interior(model, inst, i, j, cuts.u[i], cuts.v[j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Each person keeps their own reward from their partner.
pub fn canonical_fnt_cuts(inst: &Instance, m: &Matching) -> Result<CutVector> {
    m.check_size(inst.n())?;
    let n = inst.n();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    for (i, j) in m.pairs() {
        u[i] = inst.theta_m()[(i, j)];
        v[j] = inst.theta_w()[(i, j)];
    }
    CutVector::new(u, v)
}

/// Searches for core cuts supported by `m`, exactly.
///
/// Each pair must avoid the interior of its set, which means at least one of
/// its half-planes is reversed (`>=`); matched pairs must also satisfy all of
/// theirs. Starting from a point of the matched-pair system, the search takes
/// the first pair (row-major) whose interior still holds the current point
/// and branches on its reversed half-planes in model order, pruning
/// infeasible systems. A branch row stays in the system, so each pair is
/// branched on at most once and the search is complete. The order is fixed,
/// so the result is deterministic.
pub fn search_core(
    model: &BargainingModel,
    inst: &Instance,
    m: &Matching,
) -> Result<Option<CutVector>> {
    let n = inst.n();
    ensure_at_most("search_core", n, CORE_SEARCH_LIMIT)?;
    m.check_size(n)?;
    // variables: u_0..u_{n-1}, v_0..v_{n-1}
    let mut base = LinearSystem::new(2 * n);
    let mut choices: Vec<Vec<Inequality>> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<Inequality> = model
                .half_planes(inst, i, j)?
                .iter()
                .map(|h| h.exact(i, n + j))
                .collect();
            if m.wife(i) == j {
                for r in &rows {
                    base.push(r.clone());
                }
            }
            choices.push(rows.iter().map(Inequality::reversed).collect());
        }
    }
    let Some(start) = base.feasible_point() else {
        return Ok(None);
    };
    let Some(x) = descend(&mut base, &choices, start) else {
        return Ok(None);
    };
    let cut = |k: usize| to_f64(&x[k]) / EXACT_SCALE;
    let cuts = CutVector::new((0..n).map(cut).collect(), (n..2 * n).map(cut).collect())?;
    Ok(Some(cuts))
}

fn descend(
    sys: &mut LinearSystem,
    choices: &[Vec<Inequality>],
    point: Vec<Rational>,
) -> Option<Vec<Rational>> {
    let Some(blocked) = choices
        .iter()
        .position(|rows| !rows.iter().any(|r| r.holds(&point)))
    else {
        return Some(point);
    };
    for row in &choices[blocked] {
        sys.push(row.clone());
        let found = sys
            .feasible_point()
            .and_then(|x| descend(sys, choices, x));
        sys.rows.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Outcome of a randomized check of the structural assumptions on the
/// bargaining sets.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub model: &'static str,
    pub samples: usize,
    /// Every set lies in `u + v <= c1`.
    pub c1: f64,
    /// Every set contains `max(u, v) <= c2`.
    pub c2: f64,
    /// Member points with a dominated point outside the set.
    pub monotonicity_violations: usize,
    /// Points of `max(u, v) <= c2` outside a set.
    pub inner_violations: usize,
    /// Members of a set with `u + v > c1`.
    pub outer_violations: usize,
}

impl AssumptionReport {
    pub fn violations(&self) -> usize {
        self.monotonicity_violations + self.inner_violations + self.outer_violations
    }
}

/// Bounds of the sandwich `{max(u, v) <= c2} ⊂ F(i, j) ⊂ {u + v <= c1}`.
fn sandwich_bounds(model: &BargainingModel, inst: &Instance) -> (f64, f64) {
    let n = inst.n();
    let mut c1 = f64::NEG_INFINITY;
    let mut c2 = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let tm = inst.theta_m()[(i, j)];
            let tw = inst.theta_w()[(i, j)];
            let t = tm + tw;
            c1 = c1.max(t);
            let corner = match model {
                BargainingModel::Fnt => tm.min(tw),
                BargainingModel::Ft => t / 2.0,
                BargainingModel::FtNonneg => (t / 2.0).min(t),
                BargainingModel::FtManToWoman => (t / 2.0).min(tm),
                BargainingModel::FtTaxed { beta } => {
                    let b = beta[(i, j)];
                    tm.min((b * tm + tw) / (1.0 + b))
                }
            };
            c2 = c2.min(corner);
        }
    }
    (c1, c2)
}

/// Samples points to check downward closure and the `c1`/`c2` sandwich.
pub fn check_assumption(
    model: &BargainingModel,
    inst: &Instance,
    samples: usize,
    seed: u64,
) -> Result<AssumptionReport> {
    let n = inst.n();
    let (c1, c2) = sandwich_bounds(model, inst);
    let scale = inst
        .theta_m()
        .values()
        .iter()
        .chain(inst.theta_w().values())
        .fold(1.0_f64, |acc, x| acc.max(x.abs()))
        * 3.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = eps();
    let mut report = AssumptionReport {
        model: model.name(),
        samples,
        c1,
        c2,
        monotonicity_violations: 0,
        inner_violations: 0,
        outer_violations: 0,
    };
    for _ in 0..samples {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        let u = rng.gen_range(-scale..=scale);
        let v = rng.gen_range(-scale..=scale);
        if in_feasible_set(model, inst, i, j, u, v)? {
            let du = rng.gen_range(0.0..=scale);
            let dv = rng.gen_range(0.0..=scale);
            if !in_feasible_set(model, inst, i, j, u - du, v - dv)? {
                report.monotonicity_violations += 1;
            }
            if u + v > c1 + tol {
                report.outer_violations += 1;
            }
        }
        let ui = c2 - rng.gen_range(0.0..=scale);
        let vi = c2 - rng.gen_range(0.0..=scale);
        if !in_feasible_set(model, inst, i, j, ui, vi)? {
            report.inner_violations += 1;
        }
    }
    Ok(report)
}
