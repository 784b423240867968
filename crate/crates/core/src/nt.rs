//! Fully non-transferable stability.

use std::collections::VecDeque;

use crate::error::Result;
use crate::instance::{Instance, Matching, PreferenceOrders};
use crate::perm::{all_matchings, ensure_at_most, ENUMERATION_LIMIT};
use crate::tolerance::eps;

/// Which side proposes in Gale-Shapley.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposer {
    Men,
    Women,
}

/// Result of a Gale-Shapley run.
#[derive(Clone, Debug, PartialEq)]
pub struct GsOutcome {
    pub matching: Matching,
    pub proposals: usize,
}

/// The gains `(man, woman)` would see by eloping: man `i`'s gain over his
/// wife and woman `j`'s gain over her husband.
pub fn fnt_gains(inst: &Instance, m: &Matching, i: usize, j: usize) -> (f64, f64) {
    let man = inst.theta_m()[(i, j)] - inst.theta_m()[(i, m.wife(i))];
    let woman = inst.theta_w()[(i, j)] - inst.theta_w()[(m.husband(j), j)];
    (man, woman)
}

/// Every pair `(i, j)` with `j != m(i)` where both sides strictly gain.
/// An empty result means `m` is stable.
pub fn find_fnt_blocking_pairs(inst: &Instance, m: &Matching) -> Result<Vec<(usize, usize)>> {
    m.check_size(inst.n())?;
    let n = inst.n();
    let tol = eps();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (0..n).filter(|&j| j != m.wife(i)) {
            let (a, b) = fnt_gains(inst, m, i, j);
            if a.min(b) > tol {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

pub fn is_fnt_stable(inst: &Instance, m: &Matching) -> Result<bool> {
    Ok(find_fnt_blocking_pairs(inst, m)?.is_empty())
}

/// Deferred acceptance over derived preference lists.
///
/// A receiver holding a proposal switches only to a proposer of strictly
/// better rank. Equal rewards are ranked by ascending index, so the
/// lower-index proposer wins a tie.
pub fn gale_shapley(inst: &Instance, proposer: Proposer) -> Matching {
    gale_shapley_with_stats(inst, proposer).matching
}

pub fn gale_shapley_with_stats(inst: &Instance, proposer: Proposer) -> GsOutcome {
    let prefs = inst.preference_orders();
    match proposer {
        Proposer::Men => {
            let (assignment, proposals) =
                deferred_acceptance(&prefs.men, &PreferenceOrders::ranks(&prefs.women));
            GsOutcome {
                matching: Matching::new(assignment).expect("deferred acceptance is perfect"),
                proposals,
            }
        }
        Proposer::Women => {
            let (assignment, proposals) =
                deferred_acceptance(&prefs.women, &PreferenceOrders::ranks(&prefs.men));
            let by_women = Matching::new(assignment).expect("deferred acceptance is perfect");
            GsOutcome {
                matching: by_women.inverse(),
                proposals,
            }
        }
    }
}

/// Returns `proposer -> receiver` and the number of proposals made.
fn deferred_acceptance(lists: &[Vec<usize>], receiver_rank: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = lists.len();
    let mut next = vec![0usize; n];
    let mut held: Vec<Option<usize>> = vec![None; n];
    let mut free: VecDeque<usize> = (0..n).collect();
    let mut proposals = 0;
    while let Some(p) = free.pop_front() {
        let r = lists[p][next[p]];
        next[p] += 1;
        proposals += 1;
        match held[r] {
            None => held[r] = Some(p),
            Some(cur) if receiver_rank[r][p] < receiver_rank[r][cur] => {
                held[r] = Some(p);
                free.push_back(cur);
            }
            Some(_) => free.push_back(p),
        }
    }
    let mut assignment = vec![0; n];
    for (r, p) in held.iter().enumerate() {
        assignment[p.expect("every receiver is held at termination")] = r;
    }
    (assignment, proposals)
}

/// All stable matchings, in lexicographic order. Brute force over `n!`
/// plans, so `n <= 8`.
pub fn enumerate_fnt_stable(inst: &Instance) -> Result<Vec<Matching>> {
    ensure_at_most("enumerate_fnt_stable", inst.n(), ENUMERATION_LIMIT)?;
    let mut out = Vec::new();
    for m in all_matchings(inst.n()) {
        if is_fnt_stable(inst, &m)? {
            out.push(m);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MenOptimalityReport {
    /// False when some preference list has ties; the check still runs on the
    /// tie-broken order but carries no guarantee.
    pub applicable: bool,
    pub holds: bool,
    pub men_proposing: Matching,
    pub stable_count: usize,
    /// `(man, stable matching)` where the man ranks his stable partner
    /// strictly above his men-proposing partner.
    pub violations: Vec<(usize, Matching)>,
}

/// Checks that every man weakly prefers his men-proposing partner to his
/// partner in any stable matching.
pub fn verify_men_optimality(inst: &Instance) -> Result<MenOptimalityReport> {
    ensure_at_most("verify_men_optimality", inst.n(), ENUMERATION_LIMIT)?;
    let prefs = inst.preference_orders();
    let rank = PreferenceOrders::ranks(&prefs.men);
    let gs = gale_shapley(inst, Proposer::Men);
    let stable = enumerate_fnt_stable(inst)?;
    let mut violations = Vec::new();
    for sigma in &stable {
        for i in 0..inst.n() {
            if rank[i][gs.wife(i)] > rank[i][sigma.wife(i)] {
                violations.push((i, sigma.clone()));
            }
        }
    }
    Ok(MenOptimalityReport {
        applicable: !prefs.ties,
        holds: violations.is_empty(),
        men_proposing: gs,
        stable_count: stable.len(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Matrix, RewardDist};

    fn boxed() -> Instance {
        Instance::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![1.0, 5.0], vec![0.0, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn boxed_identity_is_stable() {
        let m = Matching::identity(2);
        assert!(find_fnt_blocking_pairs(&boxed(), &m).unwrap().is_empty());
    }

    #[test]
    fn boxed_swap_is_blocked_by_first_couple() {
        let m = Matching::new(vec![1, 0]).unwrap();
        let pairs = find_fnt_blocking_pairs(&boxed(), &m).unwrap();
        assert!(pairs.contains(&(0, 0)));
    }

    #[test]
    fn single_couple_never_blocks() {
        let inst = Instance::from_rows(&[vec![4.0]], &[vec![-3.0]]).unwrap();
        assert!(find_fnt_blocking_pairs(&inst, &Matching::identity(1)).unwrap().is_empty());
    }

    #[test]
    fn gale_shapley_boxed_one_round() {
        let out = gale_shapley_with_stats(&boxed(), Proposer::Men);
        assert_eq!(out.matching, Matching::identity(2));
        assert_eq!(out.proposals, 2);
    }

    #[test]
    fn mutual_first_choices_bind() {
        let n = 5;
        let inst = Instance::new(
            Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 }),
            Matrix::from_fn(n, |i, j| if i == j { 2.0 } else { (i * j) as f64 * 0.1 }),
        )
        .unwrap();
        assert_eq!(gale_shapley(&inst, Proposer::Men), Matching::identity(n));
        assert_eq!(gale_shapley(&inst, Proposer::Women), Matching::identity(n));
    }

    #[test]
    fn woman_keeps_lower_index_man_on_tie() {
        // both men rank woman 0 first and she is indifferent
        let inst = Instance::from_rows(
            &[vec![1.0, 0.0], vec![1.0, 0.0]],
            &[vec![3.0, 0.0], vec![3.0, 0.0]],
        )
        .unwrap();
        assert_eq!(gale_shapley(&inst, Proposer::Men).wife(0), 0);
    }

    #[test]
    fn enumeration_of_boxed_and_flat_instances() {
        assert_eq!(enumerate_fnt_stable(&boxed()).unwrap(), vec![Matching::identity(2)]);
        let flat = Instance::new(Matrix::zeros(3), Matrix::zeros(3)).unwrap();
        assert_eq!(enumerate_fnt_stable(&flat).unwrap().len(), 6);
        let one = Instance::from_rows(&[vec![1.0]], &[vec![1.0]]).unwrap();
        assert_eq!(enumerate_fnt_stable(&one).unwrap(), vec![Matching::identity(1)]);
    }

    #[test]
    fn enumeration_size_guard() {
        let big = Instance::random(9, 0, RewardDist::Uniform01).unwrap();
        assert!(matches!(
            enumerate_fnt_stable(&big),
            Err(crate::Error::SizeLimit { .. })
        ));
        assert!(verify_men_optimality(&big).is_err());
    }

    #[test]
    fn men_optimality_on_boxed_and_singleton() {
        let r = verify_men_optimality(&boxed()).unwrap();
        assert!(r.applicable && r.holds);
        assert_eq!(r.stable_count, 1);
        let one = Instance::from_rows(&[vec![1.0]], &[vec![1.0]]).unwrap();
        assert!(verify_men_optimality(&one).unwrap().holds);
    }

    #[test]
    fn ties_mark_report_not_applicable() {
        let flat = Instance::new(Matrix::zeros(2), Matrix::zeros(2)).unwrap();
        assert!(!verify_men_optimality(&flat).unwrap().applicable);
    }
}
