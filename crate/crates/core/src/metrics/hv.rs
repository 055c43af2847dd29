//! Hypervolume of a minimize-oriented front with respect to a reference point.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::front::{check_unit, nondominated_points, Front};
use crate::dominance::dominates_min;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HvMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HvConfig {
    /// Defaults to the all-ones corner.
    pub reference: Option<Vec<f64>>,
    pub mode: HvMode,
}

impl Default for HvConfig {
    fn default() -> Self {
        Self {
            reference: None,
            mode: HvMode::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HvEstimate {
    pub value: f64,
    /// Zero for exact computation.
    pub std_error: f64,
}

pub fn hv(front: &Front, cfg: &HvConfig) -> Result<f64> {
    hv_estimate(front, cfg).map(|e| e.value)
}

pub fn hv_estimate(front: &Front, cfg: &HvConfig) -> Result<HvEstimate> {
    let Some(m) = front.dims() else {
        return Ok(HvEstimate {
            value: 0.0,
            std_error: 0.0,
        });
    };
    check_unit(front, m)?;
    let reference = cfg.reference.clone().unwrap_or_else(|| vec![1.0; m]);
    if reference.len() != m {
        return Err(Error::structural(format!(
            "reference point has {} coordinates, front has {m}",
            reference.len()
        )));
    }
    match cfg.mode {
        HvMode::Exact => Ok(HvEstimate {
            value: exact(&front.points, &reference),
            std_error: 0.0,
        }),
        HvMode::MonteCarlo { samples, seed } => {
            monte_carlo(&front.points, &reference, samples, seed)
        }
    }
}

/// Exact hypervolume of arbitrary minimize-oriented points (no unit-cube check).
pub fn exact(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let inside: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .cloned()
        .collect();
    if inside.is_empty() {
        return 0.0;
    }
    // A coordinate shared by every point only scales the volume.
    let m = reference.len();
    let mut scale = 1.0;
    let mut keep = Vec::with_capacity(m);
    for j in 0..m {
        let v = inside[0][j];
        if inside.iter().all(|p| p[j] == v) {
            scale *= reference[j] - v;
        } else {
            keep.push(j);
        }
    }
    if keep.is_empty() {
        return scale;
    }
    let project = |p: &Vec<f64>| keep.iter().map(|&j| p[j]).collect::<Vec<f64>>();
    let pts = nondominated_points(inside.iter().map(project).collect()).points;
    let r: Vec<f64> = keep.iter().map(|&j| reference[j]).collect();
    scale * volume(pts, &r)
}

/// Volume for non-dominated points strictly inside the reference box.
fn volume(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    match r.len() {
        1 => r[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => sweep2(&mut pts, r),
        3 => sweep3(&mut pts, r),
        _ => wfg(pts, r),
    }
}

fn sweep2(pts: &mut [Vec<f64>], r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = r[1];
    for p in pts.iter() {
        if p[1] < ceiling {
            area += (r[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Sweep along the third objective, maintaining the 2-D staircase of the
/// points seen so far and its dominated area.
fn sweep3(pts: &mut [Vec<f64>], r: &[f64]) -> f64 {
    pts.sort_by(|a, b| a[2].total_cmp(&b[2]));
    // x -> y; x ascending, y strictly descending.
    let mut stair: BTreeMap<OrdF64, f64> = BTreeMap::new();
    let mut area = 0.0;
    let mut vol = 0.0;
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = (p[0], p[1]);
        let pred_y = stair.range(..=OrdF64(x)).next_back().map(|(_, &y)| y);
        if pred_y.is_some_and(|py| py <= y) {
            // Covered in projection; still ends the previous slab below.
        } else {
            let mut removed = Vec::new();
            let mut next_x = r[0];
            for (&k, &ky) in stair.range(OrdF64(x)..) {
                if ky >= y {
                    removed.push((k.0, ky));
                } else {
                    next_x = k.0;
                    break;
                }
            }
            let mut old = 0.0;
            let mut cursor = x;
            let mut level = pred_y.unwrap_or(r[1]);
            for &(kx, ky) in &removed {
                old += (kx - cursor) * (r[1] - level);
                cursor = kx;
                level = ky;
            }
            old += (next_x - cursor) * (r[1] - level);
            area += (next_x - x) * (r[1] - y) - old;
            for (kx, _) in removed {
                stair.remove(&OrdF64(kx));
            }
            stair.insert(OrdF64(x), y);
        }
        let z_next = pts.get(i + 1).map_or(r[2], |q| q[2]);
        vol += area * (z_next - p[2]);
    }
    vol
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Sum of exclusive contributions. Points are visited worst-first on the
/// first objective, so every limited point shares that coordinate and the
/// subtraction term drops one dimension.
fn wfg(mut pts: Vec<Vec<f64>>, r: &[f64]) -> f64 {
    pts.sort_by(|a, b| b[0].total_cmp(&a[0]));
    let tail_ref = &r[1..];
    let mut total = 0.0;
    for i in 0..pts.len() {
        let p = &pts[i];
        let incl: f64 = p[1..].iter().zip(tail_ref).map(|(a, b)| b - a).product();
        let limited: Vec<Vec<f64>> = pts[i + 1..]
            .iter()
            .map(|q| q[1..].iter().zip(&p[1..]).map(|(a, b)| a.max(*b)).collect())
            .collect();
        let dominated = if limited.is_empty() {
            0.0
        } else {
            let nd = filter_nd(limited);
            volume(nd, tail_ref)
        };
        total += (r[0] - p[0]) * (incl - dominated);
    }
    total
}

fn filter_nd(pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    nondominated_points(pts).points
}

fn monte_carlo(
    points: &[Vec<f64>],
    reference: &[f64],
    samples: usize,
    seed: u64,
) -> Result<HvEstimate> {
    if samples == 0 {
        return Err(Error::config(
            "Monte Carlo hypervolume needs at least one sample",
        ));
    }
    let box_volume: f64 = reference.iter().product();
    let mut rng = seed::rng(seed);
    let mut hits = 0usize;
    let mut sample = vec![0.0; reference.len()];
    for _ in 0..samples {
        for (s, r) in sample.iter_mut().zip(reference) {
            *s = rng.gen::<f64>() * r;
        }
        if points
            .iter()
            .any(|p| p.iter().zip(&sample).all(|(a, s)| a <= s))
        {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    Ok(HvEstimate {
        value: frac * box_volume,
        std_error: box_volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
    })
}

/// True iff `p` is dominated by, or equal to, a member of `front`.
pub fn covered(front: &[Vec<f64>], p: &[f64]) -> bool {
    front
        .iter()
        .any(|q| q.as_slice() == p || dominates_min(q, p))
}
