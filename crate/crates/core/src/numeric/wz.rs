//! Exhaustive oracle for the decoder-only side information configuration
//! on tiny alphabets.
//!
//! With q independent of x, the decoder-only rate is
//! `inf I(x; u)` over auxiliary channels `p(u|x)` and reconstruction maps
//! `v(u, q)`, subject to `E[d(x, v(u, q); q)] <= D` (the `I(u; q)` credit
//! vanishes because u - x - q is a Markov chain and x is independent of q).
//! The search grids the channel rows over the probability simplex and uses
//! the per-(u, q) optimal reconstruction, which dominates every other
//! deterministic map. The lower convex envelope of the achieved (D, R)
//! cloud converges to the true curve from above as the grid refines.

use crate::error::{Error, Result};
use crate::model::{DistortionTensor, ProbVec};
use crate::numeric::envelope::{convex_lower_envelope, eval_envelope};

/// Search space: auxiliary alphabet size and simplex grid resolution
/// (points per dimension).
#[derive(Debug, Clone, Copy)]
pub struct WzGrid {
    pub u_size: usize,
    pub resolution: usize,
}

impl WzGrid {
    pub fn new(u_size: usize, resolution: usize) -> Result<Self> {
        if resolution < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution {resolution} must be >= 3"
            )));
        }
        if u_size < 1 {
            return Err(Error::InvalidParameter(
                "auxiliary alphabet is empty".into(),
            ));
        }
        Ok(WzGrid { u_size, resolution })
    }
}

/// Count of simplex grid points with denominator `den` in `dim` cells:
/// C(den + dim - 1, dim - 1).
fn simplex_count(dim: usize, den: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..dim - 1 {
        c = c.saturating_mul((den + i + 1) as u64) / (i + 1) as u64;
    }
    c
}

/// All probability rows with entries k/den.
fn simplex_rows(dim: usize, den: usize) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    let mut counts = vec![0usize; dim];
    fn rec(cell: usize, left: usize, counts: &mut Vec<usize>, den: usize, out: &mut Vec<Vec<f64>>) {
        if cell == counts.len() - 1 {
            counts[cell] = left;
            out.push(counts.iter().map(|&c| c as f64 / den as f64).collect());
            return;
        }
        for take in 0..=left {
            counts[cell] = take;
            rec(cell + 1, left - take, counts, den, out);
        }
    }
    rec(0, den, &mut counts, den, &mut rows);
    rows
}

/// Achievable (distortion, rate-bits) cloud reduced to its lower convex
/// envelope. Preconditions: `|X| * |Q| <= 6` and a total candidate count
/// within the 10^8 search budget.
pub fn wz_bruteforce_curve(
    px: &ProbVec,
    pq: &ProbVec,
    d: &DistortionTensor,
    grid: WzGrid,
) -> Result<Vec<(f64, f64)>> {
    let nx = px.len();
    let nq = pq.len();
    if nx * nq > 6 {
        return Err(Error::InvalidParameter(format!(
            "brute-force oracle is limited to |X| * |Q| <= 6, got {}",
            nx * nq
        )));
    }
    if d.nx() != nx || d.nq() != nq {
        return Err(Error::DimensionMismatch(
            "distortion tensor does not match alphabets".into(),
        ));
    }
    if grid.u_size > nx + 1 {
        return Err(Error::InvalidParameter(format!(
            "auxiliary alphabet {} exceeds the sufficient bound |X| + 1 = {}",
            grid.u_size,
            nx + 1
        )));
    }
    let den = grid.resolution - 1;
    let per_row = simplex_count(grid.u_size, den);
    let total = (0..nx).try_fold(1u64, |acc, _| acc.checked_mul(per_row));
    match total {
        Some(t) if t <= 100_000_000 => {}
        _ => return Err(Error::SearchBudgetExceeded(total.unwrap_or(u64::MAX))),
    }

    let rows = simplex_rows(grid.u_size, den);
    let nu = grid.u_size;
    let ny = d.nxhat();

    // Iterate over all row assignments (one simplex row per source letter).
    let mut row_idx = vec![0usize; nx];
    let mut cloud: Vec<(f64, f64)> = Vec::new();
    // Coarse (D, R) deduplication keeps the cloud small without touching
    // the envelope: keep the best R seen in each distortion bucket.
    let mut best_in_bucket: std::collections::HashMap<i64, (f64, f64)> =
        std::collections::HashMap::new();
    let d_scale = {
        let mut m = 0.0f64;
        for x in 0..nx {
            for y in 0..ny {
                for q in 0..nq {
                    m = m.max(d.get(x, y, q));
                }
            }
        }
        m.max(1e-300)
    };
    loop {
        // p(u), I(x; u)
        let mut pu = vec![0.0f64; nu];
        for x in 0..nx {
            let row = &rows[row_idx[x]];
            for u in 0..nu {
                pu[u] += px[x] * row[u];
            }
        }
        let mut info_bits = 0.0f64;
        for x in 0..nx {
            let row = &rows[row_idx[x]];
            for u in 0..nu {
                if row[u] > 0.0 && pu[u] > 0.0 {
                    info_bits += px[x] * row[u] * (row[u] / pu[u]).log2();
                }
            }
        }
        // Optimal deterministic reconstruction per (u, q).
        let mut dist = 0.0f64;
        for u in 0..nu {
            if pu[u] == 0.0 {
                continue;
            }
            for q in 0..nq {
                let mut best = f64::INFINITY;
                for y in 0..ny {
                    let mut e = 0.0;
                    for x in 0..nx {
                        e += px[x] * rows[row_idx[x]][u] * d.get(x, y, q);
                    }
                    if e < best {
                        best = e;
                    }
                }
                dist += pq[q] * best;
            }
        }
        let bucket = (dist / d_scale * 16384.0).round() as i64;
        best_in_bucket
            .entry(bucket)
            .and_modify(|e| {
                if info_bits < e.1 {
                    *e = (dist, info_bits);
                }
            })
            .or_insert((dist, info_bits));

        // advance the odometer
        let mut carry = 0;
        loop {
            row_idx[carry] += 1;
            if row_idx[carry] < rows.len() {
                break;
            }
            row_idx[carry] = 0;
            carry += 1;
            if carry == nx {
                break;
            }
        }
        if carry == nx {
            break;
        }
    }
    cloud.extend(best_in_bucket.into_values());
    convex_lower_envelope(&cloud)
}

/// Best achievable rate (bits) at expected distortion <= `d_target`,
/// interpolated on the envelope (time sharing makes chords achievable).
pub fn wz_bruteforce(
    px: &ProbVec,
    pq: &ProbVec,
    d: &DistortionTensor,
    d_target: f64,
    grid: WzGrid,
) -> Result<f64> {
    let hull = wz_bruteforce_curve(px, pq, d, grid)?;
    let lo = hull[0].0;
    if d_target < lo {
        return Err(Error::InfeasibleDistortion {
            d: d_target,
            lo,
            hi: hull[hull.len() - 1].0,
        });
    }
    Ok(eval_envelope(&hull, d_target))
}
