use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use super::{SplitOutcome, SplitResult};
use crate::error::{Error, Result};
use crate::problem::Candidate;

/// Position of a bit vector on the radial disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialCoordinate {
    /// Number of set bits.
    pub r: usize,
    /// `r` divided by the largest `r` in the pool.
    pub r_norm: f64,
    /// Distance to the pivot.
    pub d: usize,
    pub theta: f64,
}

/// Number of positions where the two vectors differ.
pub fn jaccard_distance(a: &[bool], b: &[bool]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::structural(format!(
            "bit vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(hamming(a, b))
}

fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Radius, pivot distance and angle for every vector. Within each group of
/// equal radius, members sorted by `(d, index)` get `θ_i = 2πi/|g|`, `i = 1..|g|`.
pub fn radial_coordinates(bits: &[&[bool]], pivot: &[bool]) -> Result<Vec<RadialCoordinate>> {
    let mut coords = Vec::with_capacity(bits.len());
    for b in bits {
        let d = jaccard_distance(b, pivot)?;
        let r = b.iter().filter(|&&x| x).count();
        coords.push(RadialCoordinate {
            r,
            r_norm: 0.0,
            d,
            theta: 0.0,
        });
    }
    let rmax = coords.iter().map(|c| c.r).max().unwrap_or(0);
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by_key(|&i| (coords[i].r, coords[i].d, i));
    let radii: Vec<usize> = coords.iter().map(|c| c.r).collect();
    for group in order.chunk_by(|&i, &j| radii[i] == radii[j]) {
        let size = group.len() as f64;
        for (k, &i) in group.iter().enumerate() {
            coords[i].theta = 2.0 * PI * (k + 1) as f64 / size;
        }
    }
    for c in coords.iter_mut() {
        c.r_norm = if rmax == 0 {
            0.0
        } else {
            c.r as f64 / rmax as f64
        };
    }
    Ok(coords)
}

/// 1-based annulus index. Radii on a boundary belong to the inner annulus.
pub fn annulus_of(r: usize, rmax: usize, total_group: usize) -> usize {
    if r == 0 || rmax == 0 {
        1
    } else {
        (r * total_group).div_ceil(rmax)
    }
}

/// Radial split of bit-vector candidates.
pub fn split_binary<R: Rng + ?Sized>(
    items: &[Candidate],
    total_group: usize,
    rng: &mut R,
) -> Result<SplitOutcome> {
    let bits = items
        .iter()
        .map(|c| {
            c.decisions()
                .as_bits()
                .ok_or_else(|| Error::structural("split_binary needs bit-vector decisions"))
        })
        .collect::<Result<Vec<_>>>()?;
    split_bits(&bits, total_group, rng)
}

pub(crate) fn split_bits<R: Rng + ?Sized>(
    bits: &[&[bool]],
    total_group: usize,
    rng: &mut R,
) -> Result<SplitOutcome> {
    let n = bits.len();
    if n < 4 {
        return Err(Error::structural(format!(
            "split needs at least 4 items, got {n}"
        )));
    }
    if total_group == 0 {
        return Err(Error::config("total_group must be positive"));
    }
    let pivot = bits[rng.gen_range(0..n)];
    let coords = radial_coordinates(bits, pivot)?;
    if coords.iter().all(|c| c.d == 0) {
        return Ok(SplitOutcome::Degenerate);
    }

    let mut west_items = Vec::new();
    let mut east_items = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        if c.theta <= PI {
            east_items.push(i);
        } else {
            west_items.push(i);
        }
    }
    if west_items.is_empty() || east_items.is_empty() {
        return Ok(SplitOutcome::Degenerate);
    }

    let rmax = coords.iter().map(|c| c.r).max().unwrap_or(0);
    // (min-θ item, max-θ item) per annulus.
    let mut extremes: Vec<Option<(usize, usize)>> = vec![None; total_group];
    for (i, c) in coords.iter().enumerate() {
        let a = annulus_of(c.r, rmax, total_group) - 1;
        extremes[a] = Some(match extremes[a] {
            None => (i, i),
            Some((lo, hi)) => (
                if c.theta < coords[lo].theta { i } else { lo },
                if c.theta > coords[hi].theta { i } else { hi },
            ),
        });
    }

    let mut west_reps = Vec::new();
    let mut east_reps = Vec::new();
    for (east, west) in extremes.into_iter().flatten() {
        // A pair is only usable when each representative sits in its own half.
        if coords[east].theta <= PI && coords[west].theta > PI {
            east_reps.push(east);
            west_reps.push(west);
        }
    }
    if east_reps.is_empty() {
        return Ok(SplitOutcome::Degenerate);
    }

    Ok(SplitOutcome::Split(SplitResult {
        west_reps,
        east_reps,
        west_items,
        east_items,
        keys: coords.iter().map(|c| c.theta).collect(),
    }))
}
