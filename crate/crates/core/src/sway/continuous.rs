use rand::Rng;

use super::{SplitOutcome, SplitResult};
use crate::error::{Error, Result};
use crate::problem::{normalize_decisions, Candidate, DecisionSpace};

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::structural(format!(
            "distance between vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(dist(a, b))
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn farthest(points: &[&[f64]], from: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        let d = dist(p, from);
        if d > best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// FastMap-style split of normalized decisions.
pub fn split_continuous<R: Rng + ?Sized>(
    items: &[Candidate],
    space: &DecisionSpace,
    rng: &mut R,
) -> Result<SplitOutcome> {
    let normalized = items
        .iter()
        .map(|c| normalize_decisions(c, space))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<&[f64]> = normalized.iter().map(|v| v.as_slice()).collect();
    split_points(&points, rng)
}

pub(crate) fn split_points<R: Rng + ?Sized>(
    points: &[&[f64]],
    rng: &mut R,
) -> Result<SplitOutcome> {
    let n = points.len();
    if n < 4 {
        return Err(Error::structural(format!(
            "split needs at least 4 items, got {n}"
        )));
    }
    let anchor = rng.gen_range(0..n);
    let east = farthest(points, points[anchor]);
    let west = farthest(points, points[east]);
    let c = dist(points[east], points[west]);
    if c == 0.0 {
        return Ok(SplitOutcome::Degenerate);
    }

    let keys: Vec<f64> = points
        .iter()
        .map(|p| {
            let a = dist(p, points[west]);
            let b = dist(p, points[east]);
            (a * a + c * c - b * b) / (2.0 * c)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| keys[i].total_cmp(&keys[j]).then(i.cmp(&j)));

    let cut = n.div_ceil(2);
    let (west_half, east_half) = order.split_at_mut(cut);
    // The endpoints normally sort into their own halves; duplicates and
    // points beyond `east` can push them across the boundary.
    if let Some(pos) = east_half.iter().position(|&i| i == west) {
        std::mem::swap(&mut east_half[pos], &mut west_half[cut - 1]);
    }
    if let Some(pos) = west_half.iter().position(|&i| i == east) {
        std::mem::swap(&mut west_half[pos], &mut east_half[0]);
    }

    Ok(SplitOutcome::Split(SplitResult {
        west_reps: vec![west],
        east_reps: vec![east],
        west_items: west_half.to_vec(),
        east_items: east_half.to_vec(),
        keys,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    #[test]
    fn distance_examples() {
        assert_eq!(euclidean_distance(&[0.2, 0.3], &[0.2, 0.3]).unwrap(), 0.0);
        assert!(
            (euclidean_distance(&[0.0, 0.0], &[1.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15
        );
        assert_eq!(
            euclidean_distance(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(),
            1.0
        );
        assert!(euclidean_distance(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn endpoints_project_to_zero_and_c() {
        let pts: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.4],
            vec![0.5, 0.5],
            vec![1.0, 1.0],
            vec![0.7, 0.2],
        ];
        let refs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
        let out = split_points(&refs, &mut seed::rng(1)).unwrap();
        let SplitOutcome::Split(s) = out else {
            panic!("degenerate")
        };
        let (w, e) = (s.west_reps[0], s.east_reps[0]);
        let c = dist(refs[w], refs[e]);
        assert!(s.keys[w].abs() < 1e-12);
        assert!((s.keys[e] - c).abs() < 1e-12);
        assert_eq!(s.west_items.len(), 3);
        assert_eq!(s.east_items.len(), 2);
    }

    #[test]
    fn identical_points_are_degenerate() {
        let pts = vec![vec![0.5, 0.5]; 6];
        let refs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
        assert!(matches!(
            split_points(&refs, &mut seed::rng(0)).unwrap(),
            SplitOutcome::Degenerate
        ));
    }

    #[test]
    fn too_few_items() {
        let pts = [vec![0.0], vec![1.0]];
        let refs: Vec<&[f64]> = pts.iter().map(|v| v.as_slice()).collect();
        assert!(split_points(&refs, &mut seed::rng(0)).is_err());
    }
}
