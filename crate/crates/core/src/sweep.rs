//! Empirical existence map over the `(p, q)` unit square.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Instance, Matrix, PQParams, RewardDist};
use crate::pq::{adversarial_pair, exists_pq_stable, grid_values, GRID_CHECK_LIMIT};
use crate::tolerance::eps;

/// Produces the instance for one trial of one grid cell. Implementations
/// must be pure functions of their arguments so a sweep is reproducible
/// regardless of scheduling.
pub trait InstanceSource: Sync {
    fn instance(&self, pq: PQParams, cell: usize, trial: usize) -> Result<Instance>;
}

/// Seed for one `(cell, trial)` slot.
pub fn cell_seed(base: u64, cell: usize, trial: usize) -> u64 {
    base ^ (((cell as u64) << 32) | (trial as u64 & 0xFFFF_FFFF))
}

/// Independent random instances only.
#[derive(Clone, Debug)]
pub struct RandomSource {
    pub n: usize,
    pub seed: u64,
    pub dist: RewardDist,
}

impl InstanceSource for RandomSource {
    fn instance(&self, _pq: PQParams, cell: usize, trial: usize) -> Result<Instance> {
        Instance::random(self.n, cell_seed(self.seed, cell, trial), self.dist)
    }
}

/// Even trials are random instances, odd trials are noisy members of the
/// two-couple non-existence family. In cells with `q > p` the family is
/// tuned to the cell (ratio `(p + q) / 2`, noise small enough to keep both
/// plans unstable); elsewhere the ratio is drawn uniformly.
#[derive(Clone, Debug)]
pub struct MixedSource {
    pub n: usize,
    pub seed: u64,
    pub dist: RewardDist,
}

impl InstanceSource for MixedSource {
    fn instance(&self, pq: PQParams, cell: usize, trial: usize) -> Result<Instance> {
        let seed = cell_seed(self.seed, cell, trial);
        if trial % 2 == 0 {
            return Instance::random(self.n, seed, self.dist);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (pq.p(), pq.q());
        let (ratio, noise) = if q - p > 10.0 * eps() {
            // each delta moves by at most 4 * noise, each side's margin is at
            // least (q - p) / 2
            ((p + q) / 2.0, (q - p) / 40.0)
        } else {
            (rng.gen_range(0.05..0.95), 0.02)
        };
        let base = adversarial_pair(1.0, 1.0 / ratio);
        let mut jitter = |t: &Matrix| {
            Matrix::from_fn(2, |i, j| t[(i, j)] + rng.gen_range(-noise..=noise))
        };
        let theta_m = jitter(base.theta_m());
        let theta_w = jitter(base.theta_w());
        Instance::new(theta_m, theta_w)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCell {
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    #[serde(rename = "exists")]
    pub existence_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    /// Cells in `p`-major order.
    pub grid: Vec<SweepCell>,
}

impl SweepReport {
    pub fn cell(&self, p: f64, q: f64) -> Option<&SweepCell> {
        self.grid
            .iter()
            .find(|c| (c.p - p).abs() < 1e-12 && (c.q - q).abs() < 1e-12)
    }

    /// CSV with header `p,q,trials,exists`, one row per cell.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for cell in &self.grid {
            w.serialize(cell)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Counts, for each grid cell, how many of `trials` instances admit a
/// `(p, q)`-stable plan. Cells run in parallel; the result equals a
/// sequential run.
pub fn pq_plane_sweep<S: InstanceSource>(
    source: &S,
    grid_steps: usize,
    trials: usize,
) -> Result<SweepReport> {
    let grid = grid_values(grid_steps)?;
    let cells: Vec<(usize, f64, f64)> = grid
        .iter()
        .flat_map(|&p| grid.iter().map(move |&q| (p, q)))
        .enumerate()
        .map(|(k, (p, q))| (k, p, q))
        .collect();
    let grid = cells
        .par_iter()
        .map(|&(cell, p, q)| {
            let pq = PQParams::new(p, q)?;
            let mut existence_count = 0;
            for trial in 0..trials {
                let inst = source.instance(pq, cell, trial)?;
                if inst.n() > GRID_CHECK_LIMIT {
                    return Err(Error::SizeLimit {
                        operation: "pq_plane_sweep",
                        n: inst.n(),
                        limit: GRID_CHECK_LIMIT,
                    });
                }
                if exists_pq_stable(&inst, pq)?.is_some() {
                    existence_count += 1;
                }
            }
            Ok(SweepCell {
                p,
                q,
                trials,
                existence_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport { grid })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape_and_csv_header() {
        let src = RandomSource {
            n: 2,
            seed: 3,
            dist: RewardDist::Uniform01,
        };
        let report = pq_plane_sweep(&src, 3, 4).unwrap();
        assert_eq!(report.grid.len(), 9);
        assert_eq!((report.grid[1].p, report.grid[1].q), (0.0, 0.5));
        let csv = report.to_csv_string().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("p,q,trials,exists"));
        assert_eq!(lines.count(), 9);
        for c in &report.grid {
            assert!(c.existence_count <= c.trials);
        }
    }

    #[test]
    fn oversized_source_is_rejected() {
        let src = RandomSource {
            n: 7,
            seed: 0,
            dist: RewardDist::Uniform01,
        };
        assert!(matches!(
            pq_plane_sweep(&src, 2, 1),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn tuned_adversary_has_no_stable_plan() {
        let src = MixedSource {
            n: 3,
            seed: 11,
            dist: RewardDist::Uniform01,
        };
        let pq = PQParams::new(0.1, 0.9).unwrap();
        for trial in (1..40).step_by(2) {
            let inst = src.instance(pq, 5, trial).unwrap();
            assert_eq!(exists_pq_stable(&inst, pq).unwrap(), None);
        }
    }
}
