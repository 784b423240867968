//! Exact feasibility of small systems of linear inequalities over the
//! rationals.
//!
//! Systems whose rows are bounds (`±x_a <= c`) or differences
//! (`x_a - x_b <= c`) are decided by Bellman-Ford on the constraint graph.
//! Sums (`x_a + x_b <= c`) are accepted too when flipping the sign of some
//! variables turns every two-variable row into a difference.
//! Anything else goes through a phase-one simplex with Bland's rule. Both
//! routes are exact; no tolerance is involved.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Converts `x * scale` to the nearest integer, as a rational.
pub fn scaled(x: f64, scale: f64) -> Rational {
    let y = (x * scale).round();
    let i = y as i128;
    Rational::from_integer(BigInt::from(i))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `sum_k coef[k] * x[k] <= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub coef: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

impl Inequality {
    pub fn new(coef: Vec<(usize, Rational)>, rhs: Rational) -> Self {
        let coef = coef.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Inequality { coef, rhs }
    }

    /// The reversed inequality `sum coef * x >= rhs`, written as `<=`.
    pub fn reversed(&self) -> Self {
        Inequality {
            coef: self.coef.iter().map(|(k, c)| (*k, -c)).collect(),
            rhs: -&self.rhs,
        }
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coef.iter().map(|(k, c)| c * &x[*k]).sum();
        lhs <= self.rhs
    }
}

#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    pub vars: usize,
    pub rows: Vec<Inequality>,
}

impl LinearSystem {
    pub fn new(vars: usize) -> Self {
        LinearSystem {
            vars,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Inequality) {
        self.rows.push(row);
    }

    pub fn is_satisfied_by(&self, x: &[Rational]) -> bool {
        self.rows.iter().all(|r| r.holds(x))
    }

    /// Some point satisfying every row, or `None` if the system is empty.
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let Some(flip) = self.sign_flips() else {
            return simplex_feasible(self);
        };
        let flipped = self.with_flips(&flip);
        match flipped.as_difference_graph() {
            Some(edges) => {
                let mut x = difference_feasible(self.vars, &edges)?;
                for (k, f) in flip.iter().enumerate() {
                    if *f {
                        x[k] = -&x[k];
                    }
                }
                Some(x)
            }
            None => simplex_feasible(self),
        }
    }

    /// Per-variable sign flips under which every two-variable row has
    /// opposite coefficients, found by two-colouring. `None` when a row has
    /// more than two variables, unequal magnitudes, or the parities clash.
    fn sign_flips(&self) -> Option<Vec<bool>> {
        // adjacency with parity: true = the two variables need different flips
        let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); self.vars];
        for row in &self.rows {
            match row.coef.as_slice() {
                [] | [_] => {}
                [(a, ca), (b, cb)] if ca.abs() == cb.abs() => {
                    let differ = ca.is_positive() == cb.is_positive();
                    adj[*a].push((*b, differ));
                    adj[*b].push((*a, differ));
                }
                _ => return None,
            }
        }
        let mut flip: Vec<Option<bool>> = vec![None; self.vars];
        for root in 0..self.vars {
            if flip[root].is_some() {
                continue;
            }
            flip[root] = Some(false);
            let mut stack = vec![root];
            while let Some(a) = stack.pop() {
                let fa = flip[a].unwrap();
                for &(b, differ) in &adj[a] {
                    let want = fa ^ differ;
                    match flip[b] {
                        None => {
                            flip[b] = Some(want);
                            stack.push(b);
                        }
                        Some(fb) if fb != want => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(flip.into_iter().map(|f| f.unwrap_or(false)).collect())
    }

    fn with_flips(&self, flip: &[bool]) -> LinearSystem {
        let rows = self
            .rows
            .iter()
            .map(|r| Inequality {
                coef: r
                    .coef
                    .iter()
                    .map(|(k, c)| (*k, if flip[*k] { -c } else { c.clone() }))
                    .collect(),
                rhs: r.rhs.clone(),
            })
            .collect();
        LinearSystem {
            vars: self.vars,
            rows,
        }
    }

    /// Forces the general simplex route.
    pub fn feasible_point_simplex(&self) -> Option<Vec<Rational>> {
        simplex_feasible(self)
    }

    /// Edges `(from, to, w)` encoding `x_to - x_from <= w`; node `vars` is
    /// the constant zero.
    fn as_difference_graph(&self) -> Option<Vec<(usize, usize, Rational)>> {
        let zero = self.vars;
        let mut edges = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            match row.coef.as_slice() {
                [] => {
                    if row.rhs.is_negative() {
                        // 0 <= negative: a self-loop with negative weight
                        edges.push((zero, zero, row.rhs.clone()));
                    }
                }
                [(a, c)] => {
                    let w = &row.rhs / c.abs();
                    if c.is_positive() {
                        edges.push((zero, *a, w));
                    } else {
                        edges.push((*a, zero, w));
                    }
                }
                [(a, ca), (b, cb)] if (ca + cb).is_zero() => {
                    let w = &row.rhs / ca.abs();
                    if ca.is_positive() {
                        edges.push((*b, *a, w));
                    } else {
                        edges.push((*a, *b, w));
                    }
                }
                _ => return None,
            }
        }
        Some(edges)
    }
}

fn difference_feasible(vars: usize, edges: &[(usize, usize, Rational)]) -> Option<Vec<Rational>> {
    let nodes = vars + 1;
    let mut dist = vec![Rational::zero(); nodes];
    for round in 0..=nodes {
        let mut changed = false;
        for (from, to, w) in edges {
            let cand = &dist[*from] + w;
            if cand < dist[*to] {
                dist[*to] = cand;
                changed = true;
            }
        }
        if !changed {
            let base = dist[vars].clone();
            return Some(dist[..vars].iter().map(|d| d - &base).collect());
        }
        if round == nodes {
            break;
        }
    }
    None
}

/// Phase-one simplex on `A x+ - A x- + s = b` with artificials on rows whose
/// right-hand side is negative.
fn simplex_feasible(sys: &LinearSystem) -> Option<Vec<Rational>> {
    let m = sys.rows.len();
    let nv = sys.vars;
    if m == 0 {
        return Some(vec![Rational::zero(); nv]);
    }
    let neg_rows: Vec<usize> = (0..m).filter(|&r| sys.rows[r].rhs.is_negative()).collect();
    let n_art = neg_rows.len();
    // columns: x+ (nv), x- (nv), slack (m), artificial (n_art), rhs
    let art0 = 2 * nv + m;
    let cols = art0 + n_art;
    let mut t = vec![vec![Rational::zero(); cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut art_of_row = vec![None; m];
    for (k, &r) in neg_rows.iter().enumerate() {
        art_of_row[r] = Some(k);
    }
    for (r, row) in sys.rows.iter().enumerate() {
        let sign = if row.rhs.is_negative() {
            -Rational::one()
        } else {
            Rational::one()
        };
        for (k, c) in &row.coef {
            t[r][*k] = &sign * c;
            t[r][nv + *k] = -(&sign * c);
        }
        t[r][2 * nv + r] = sign.clone();
        t[r][cols] = &sign * &row.rhs;
        match art_of_row[r] {
            Some(k) => {
                t[r][art0 + k] = Rational::one();
                basis[r] = art0 + k;
            }
            None => basis[r] = 2 * nv + r,
        }
    }
    // reduced costs of the phase-one objective (sum of artificials)
    let mut d = vec![Rational::zero(); cols + 1];
    for &r in &neg_rows {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj += &t[r][j];
        }
    }
    for k in 0..n_art {
        d[art0 + k] = Rational::zero();
    }

    while let Some(enter) = (0..art0).find(|&j| d[j].is_positive()) {
        let mut leave: Option<(usize, Rational)> = None;
        for r in 0..m {
            if !t[r][enter].is_positive() {
                continue;
            }
            let ratio = &t[r][cols] / &t[r][enter];
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let (pr, _) = leave.expect("phase one objective is bounded below");
        let piv = t[pr][enter].clone();
        for x in t[pr].iter_mut() {
            *x /= &piv;
        }
        let pivot_row = t[pr].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r == pr || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        let f = d[enter].clone();
        for (x, p) in d.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
        basis[pr] = enter;
    }

    if !d[cols].is_zero() {
        return None;
    }
    let mut val = vec![Rational::zero(); art0];
    for r in 0..m {
        if basis[r] < art0 {
            val[basis[r]] = t[r][cols].clone();
        }
    }
    let x: Vec<Rational> = (0..nv).map(|k| &val[k] - &val[nv + k]).collect();
    debug_assert!(sys.is_satisfied_by(&x));
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64) -> Rational {
        Rational::from_integer(BigInt::from(x))
    }

    fn row(coef: &[(usize, i64)], rhs: i64) -> Inequality {
        Inequality::new(coef.iter().map(|&(k, c)| (k, r(c))).collect(), r(rhs))
    }

    #[test]
    fn difference_system_solution_is_feasible() {
        let mut s = LinearSystem::new(3);
        s.push(row(&[(0, 1), (1, -1)], 2));
        s.push(row(&[(1, 1), (2, -1)], -1));
        s.push(row(&[(2, 1)], 5));
        s.push(row(&[(0, -1)], -4));
        let x = s.feasible_point().unwrap();
        assert!(s.is_satisfied_by(&x));
        let y = s.feasible_point_simplex().unwrap();
        assert!(s.is_satisfied_by(&y));
    }

    #[test]
    fn detects_infeasible_difference_cycle() {
        let mut s = LinearSystem::new(2);
        s.push(row(&[(0, 1), (1, -1)], 1));
        s.push(row(&[(1, 1), (0, -1)], -2));
        assert!(s.feasible_point().is_none());
        assert!(s.feasible_point_simplex().is_none());
    }

    #[test]
    fn general_rows_use_simplex() {
        // 2x + y <= 4, x >= 1, y >= 1, x + 3y >= 5
        let mut s = LinearSystem::new(2);
        s.push(row(&[(0, 2), (1, 1)], 4));
        s.push(row(&[(0, -1)], -1));
        s.push(row(&[(1, -1)], -1));
        s.push(row(&[(0, -1), (1, -3)], -5));
        let x = s.feasible_point().unwrap();
        assert!(s.is_satisfied_by(&x));
        // tighten to infeasible: 2x + y <= 2 with x, y >= 1
        s.push(row(&[(0, 2), (1, 1)], 2));
        assert!(s.feasible_point().is_none());
    }

    #[test]
    fn constant_rows() {
        let mut s = LinearSystem::new(1);
        s.push(Inequality::new(vec![(0, r(0))], r(-1)));
        assert!(s.feasible_point().is_none());
        assert!(s.feasible_point_simplex().is_none());
    }

    #[test]
    fn sum_rows_are_flipped_into_differences() {
        // u + v <= 3, u >= 2, v >= 2 is infeasible; relaxing to u + v <= 4 is not
        let mut s = LinearSystem::new(2);
        s.push(row(&[(0, 1), (1, 1)], 3));
        s.push(row(&[(0, -1)], -2));
        s.push(row(&[(1, -1)], -2));
        assert!(s.sign_flips().is_some());
        assert!(s.feasible_point().is_none());
        s.rows[0] = row(&[(0, 1), (1, 1)], 4);
        let x = s.feasible_point().unwrap();
        assert!(s.is_satisfied_by(&x));
    }

    #[test]
    fn parity_clash_falls_back_to_simplex() {
        // x + y, y + z, x + z: an odd cycle of sums
        let mut s = LinearSystem::new(3);
        s.push(row(&[(0, 1), (1, 1)], 1));
        s.push(row(&[(1, 1), (2, 1)], 1));
        s.push(row(&[(0, 1), (2, 1)], 1));
        s.push(row(&[(0, -1), (1, -1)], -1));
        assert!(s.sign_flips().is_none());
        let x = s.feasible_point().unwrap();
        assert!(s.is_satisfied_by(&x));
    }

    #[test]
    fn graph_route_agrees_with_simplex() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            // bipartite u/v sums and bounds, the shape the core search builds
            let mut s = LinearSystem::new(4);
            for _ in 0..rng.gen_range(1..8) {
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                let rhs = rng.gen_range(-6..6);
                if rng.gen_bool(0.6) {
                    let (a, b) = (rng.gen_range(0..2), rng.gen_range(2..4));
                    s.push(row(&[(a, sign), (b, sign)], rhs));
                } else {
                    s.push(row(&[(rng.gen_range(0..4), sign)], rhs));
                }
            }
            let fast = s.feasible_point();
            let slow = s.feasible_point_simplex();
            assert_eq!(fast.is_some(), slow.is_some());
            if let Some(x) = fast {
                assert!(s.is_satisfied_by(&x));
            }
        }
    }

    #[test]
    fn scaling_rounds_to_integers() {
        assert_eq!(scaled(0.5, 1e9), r(500_000_000));
        assert_eq!(scaled(-1.25e-10, 1e9), r(0));
    }
}
