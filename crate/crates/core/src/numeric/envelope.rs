//! Lower convex envelope of rate-distortion point clouds.

use crate::error::{Error, Result};

/// Lower convex hull of the points in the (distortion, rate) plane,
/// monotone non-increasing in distortion.
///
/// Duplicate distortions keep the smallest rate. Collinear hull points are
/// retained (non-strict hull), so already-convex curves pass through
/// unchanged. If the raw hull rises after its rate minimum, the rising tail
/// is replaced by a flat extension: any distortion beyond the minimizer is
/// achievable at the minimal rate.
pub fn convex_lower_envelope(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|b, a| {
        if b.0 == a.0 {
            a.1 = a.1.min(b.1);
            true
        } else {
            false
        }
    });
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "convex envelope needs >= 2 distinct distortions, got {}",
            pts.len()
        )));
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // pop b when it lies strictly above segment a->p
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross < 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Flatten any rising tail after the rate minimum.
    let (imin, _) = hull
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .unwrap();
    if imin + 1 < hull.len() {
        let (d_last, _) = *hull.last().unwrap();
        let r_min = hull[imin].1;
        hull.truncate(imin + 1);
        if d_last > hull[imin].0 {
            hull.push((d_last, r_min));
        }
    }
    Ok(hull)
}

/// Piecewise-linear evaluation of an envelope at `d`, clamped at the ends.
pub fn eval_envelope(hull: &[(f64, f64)], d: f64) -> f64 {
    if hull.is_empty() {
        return f64::NAN;
    }
    if d <= hull[0].0 {
        return hull[0].1;
    }
    if d >= hull[hull.len() - 1].0 {
        return hull[hull.len() - 1].1;
    }
    let i = hull.partition_point(|&(x, _)| x < d);
    let (d0, r0) = hull[i - 1];
    let (d1, r1) = hull[i];
    r0 + (r1 - r0) * (d - d0) / (d1 - d0)
}
