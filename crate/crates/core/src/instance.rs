//! Problem instances, matchings and the small value types shared by every
//! engine.
//!
//! Reward tables follow the (man, woman) orientation for both sides:
//! `theta_m[(i, j)]` is what man `i` gets from woman `j`, and
//! `theta_w[(i, j)]` is what woman `j` gets from man `i`.

use std::fmt;
use std::ops::{Index, IndexMut};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::eps;

/// Dense square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    /// Builds from nested rows, checking squareness and finiteness.
    pub fn from_rows(what: &'static str, n: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                what,
                expected: n,
                found: rows.len(),
            });
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::NonFinite { what, row: i, col: j });
                }
                data.push(x);
            }
        }
        Ok(Matrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Total reward of `m`, i.e. `sum_i self[(i, m(i))]`.
    pub fn value_of(&self, m: &Matching) -> f64 {
        m.pairs().map(|(i, j)| self[(i, j)]).sum()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// A market of `n` men and `n` women with their two reward tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    theta_m: Matrix,
    theta_w: Matrix,
    /// Per-pair transfer efficiency for the taxed bargaining model.
    beta: Option<Matrix>,
}

#[derive(Deserialize)]
struct InstanceFile {
    n: usize,
    theta_m: Vec<Vec<f64>>,
    theta_w: Vec<Vec<f64>>,
    #[serde(default)]
    beta: Option<Vec<Vec<f64>>>,
}

impl Instance {
    pub fn new(theta_m: Matrix, theta_w: Matrix) -> Result<Self> {
        let n = theta_m.n();
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        if theta_w.n() != n {
            return Err(Error::DimensionMismatch {
                what: "theta_w",
                expected: n,
                found: theta_w.n(),
            });
        }
        for (what, m) in [("theta_m", &theta_m), ("theta_w", &theta_w)] {
            if let Some(k) = m.values().iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    what,
                    row: k / n,
                    col: k % n,
                });
            }
        }
        Ok(Instance {
            theta_m,
            theta_w,
            beta: None,
        })
    }

    /// Convenience constructor from nested rows.
    pub fn from_rows(theta_m: &[Vec<f64>], theta_w: &[Vec<f64>]) -> Result<Self> {
        let n = theta_m.len();
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        Instance::new(
            Matrix::from_rows("theta_m", n, theta_m)?,
            Matrix::from_rows("theta_w", n, theta_w)?,
        )
    }

    /// Attaches a transfer-efficiency table; every entry must lie in `(0, 1]`.
    pub fn with_beta(mut self, beta: Matrix) -> Result<Self> {
        let n = self.n();
        if beta.n() != n {
            return Err(Error::DimensionMismatch {
                what: "beta",
                expected: n,
                found: beta.n(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let b = beta[(i, j)];
                if !b.is_finite() {
                    return Err(Error::NonFinite {
                        what: "beta",
                        row: i,
                        col: j,
                    });
                }
                if !(b > 0.0 && b <= 1.0) {
                    return Err(Error::InvalidBeta {
                        row: i,
                        col: j,
                        value: b,
                    });
                }
            }
        }
        self.beta = Some(beta);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.theta_m.n()
    }

    pub fn theta_m(&self) -> &Matrix {
        &self.theta_m
    }

    pub fn theta_w(&self) -> &Matrix {
        &self.theta_w
    }

    pub fn beta(&self) -> Option<&Matrix> {
        self.beta.as_ref()
    }

    /// Combined reward `theta[(i, j)] = theta_m[(i, j)] + theta_w[(i, j)]`,
    /// the pot a couple splits when rewards are shared.
    pub fn combined_rewards(&self) -> Matrix {
        let n = self.n();
        Matrix::from_fn(n, |i, j| self.theta_m[(i, j)] + self.theta_w[(i, j)])
    }

    /// The same market with the roles of men and women exchanged.
    pub fn mirrored(&self) -> Instance {
        Instance {
            theta_m: self.theta_w.transpose(),
            theta_w: self.theta_m.transpose(),
            beta: None,
        }
    }

    pub fn preference_orders(&self) -> PreferenceOrders {
        PreferenceOrders::from_instance(self)
    }

    /// Parses the JSON instance format.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceFile = serde_json::from_str(text)?;
        if raw.n == 0 {
            return Err(Error::EmptyInstance);
        }
        let inst = Instance::new(
            Matrix::from_rows("theta_m", raw.n, &raw.theta_m)?,
            Matrix::from_rows("theta_w", raw.n, &raw.theta_w)?,
        )?;
        match raw.beta {
            Some(rows) => inst.with_beta(Matrix::from_rows("beta", raw.n, &rows)?),
            None => Ok(inst),
        }
    }

    /// JSON with one matrix row per line.
    pub fn to_json(&self) -> String {
        let matrix = |m: &Matrix| {
            let rows: Vec<String> = m
                .rows()
                .iter()
                .map(|r| serde_json::to_string(r).expect("finite rows serialize"))
                .collect();
            format!("[\n    {}\n  ]", rows.join(",\n    "))
        };
        let mut out = format!(
            "{{\n  \"n\": {},\n  \"theta_m\": {},\n  \"theta_w\": {}",
            self.n(),
            matrix(&self.theta_m),
            matrix(&self.theta_w)
        );
        if let Some(beta) = &self.beta {
            out.push_str(&format!(",\n  \"beta\": {}", matrix(beta)));
        }
        out.push_str("\n}");
        out
    }

    /// Seeded random instance. Entries are drawn with ChaCha8 (portable and
    /// stable across platforms): all of `theta_m` row by row, then all of
    /// `theta_w`.
    pub fn random(n: usize, seed: u64, dist: RewardDist) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInstance);
        }
        if let RewardDist::IntegerRange { lo, hi } = dist {
            if lo > hi {
                return Err(Error::Precondition(format!(
                    "integer range {lo}..={hi} is empty"
                )));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta_m = Matrix::from_fn(n, |_, _| dist.sample(&mut rng));
        let theta_w = Matrix::from_fn(n, |_, _| dist.sample(&mut rng));
        Instance::new(theta_m, theta_w)
    }
}

/// Distribution of random reward entries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RewardDist {
    /// Uniform on `[0, 1)`.
    Uniform01,
    /// Uniform integers in `lo..=hi`.
    IntegerRange { lo: i64, hi: i64 },
}

impl RewardDist {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RewardDist::Uniform01 => rng.gen::<f64>(),
            RewardDist::IntegerRange { lo, hi } => rng.gen_range(lo..=hi) as f64,
        }
    }
}

/// Preference lists derived from the reward tables. Lists are sorted by
/// strictly decreasing reward; exact ties keep ascending index order.
#[derive(Clone, Debug, PartialEq)]
pub struct PreferenceOrders {
    /// `men[i]` lists women, best first.
    pub men: Vec<Vec<usize>>,
    /// `women[j]` lists men, best first.
    pub women: Vec<Vec<usize>>,
    /// Some list holds two rewards within `eps()` of each other.
    pub ties: bool,
}

impl PreferenceOrders {
    fn from_instance(inst: &Instance) -> Self {
        let n = inst.n();
        let mut ties = false;
        let mut order = |score: &dyn Fn(usize) -> f64| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| score(b).total_cmp(&score(a)));
            if idx.windows(2).any(|w| score(w[0]) - score(w[1]) <= eps()) {
                ties = true;
            }
            idx
        };
        let men = (0..n)
            .map(|i| order(&|j| inst.theta_m[(i, j)]))
            .collect();
        let women = (0..n)
            .map(|j| order(&|i| inst.theta_w[(i, j)]))
            .collect();
        PreferenceOrders { men, women, ties }
    }

    /// `ranks(&self.men)[i][j]` is the position of woman `j` in man `i`'s list.
    pub fn ranks(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
        lists
            .iter()
            .map(|list| {
                let mut rank = vec![0; list.len()];
                for (pos, &x) in list.iter().enumerate() {
                    rank[x] = pos;
                }
                rank
            })
            .collect()
    }
}

/// A marriage plan: a bijection from men to women.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    assignment: Vec<usize>,
    husband: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct MatchingFile {
    assignment: Vec<usize>,
}

impl Matching {
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let n = assignment.len();
        let mut husband = vec![usize::MAX; n];
        for (i, &j) in assignment.iter().enumerate() {
            if j >= n || husband[j] != usize::MAX {
                return Err(Error::NotAPermutation { n });
            }
            husband[j] = i;
        }
        Ok(Matching {
            assignment,
            husband,
        })
    }

    pub fn identity(n: usize) -> Self {
        Matching {
            assignment: (0..n).collect(),
            husband: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Woman matched to man `i`.
    #[inline]
    pub fn wife(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Man matched to woman `j`.
    #[inline]
    pub fn husband(&self, j: usize) -> usize {
        self.husband[j]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// `(man, woman)` pairs in man order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignment.iter().copied().enumerate()
    }

    /// The same plan seen from the women's side.
    pub fn inverse(&self) -> Matching {
        Matching {
            assignment: self.husband.clone(),
            husband: self.assignment.clone(),
        }
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::DimensionMismatch {
                what: "matching",
                expected: n,
                found: self.n(),
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MatchingFile = serde_json::from_str(text)?;
        Matching::new(raw.assignment)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatchingFile {
            assignment: self.assignment.clone(),
        })
        .expect("matching serialization cannot fail")
    }
}

/// 1-based with primed women: `1→2' 2→1'`.
impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j) in self.pairs() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}→{}'", i + 1, j + 1)?;
        }
        Ok(())
    }
}

/// Inter-pair (`p`) and intra-pair (`q`) sharing levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PQParams {
    p: f64,
    q: f64,
}

impl PQParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (what, value) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ParameterOutOfRange { what, value });
            }
        }
        Ok(PQParams { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Per-person payoffs: `u[i]` for man `i`, `v[j]` for woman `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutVector {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl CutVector {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                what: "cut vector",
                expected: u.len(),
                found: v.len(),
            });
        }
        for (what, xs) in [("u", &u), ("v", &v)] {
            if let Some(k) = xs.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { what, row: k, col: 0 });
            }
        }
        Ok(CutVector { u, v })
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn total(&self) -> f64 {
        self.u.iter().sum::<f64>() + self.v.iter().sum::<f64>()
    }

    /// Replaces negative entries by zero.
    pub fn clamped_nonneg(&self) -> CutVector {
        CutVector {
            u: self.u.iter().map(|&x| x.max(0.0)).collect(),
            v: self.v.iter().map(|&x| x.max(0.0)).collect(),
        }
    }
}
