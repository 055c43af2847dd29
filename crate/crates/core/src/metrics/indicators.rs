use super::front::Front;
use crate::error::{Error, Result};
use crate::sway::euclidean_distance;

fn nearest(p: &[f64], set: &[Vec<f64>]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for q in set {
        best = best.min(euclidean_distance(p, q)?);
    }
    Ok(best)
}

fn require_nonempty(f: &Front, what: &str) -> Result<()> {
    if f.is_empty() {
        return Err(Error::InsufficientSamples(format!("{what} is empty")));
    }
    Ok(())
}

/// Generational distance: `sqrt(Σ d_i²) / |PFc|`, where `d_i` is the distance
/// from member `i` to the nearest point of the reference front.
pub fn gd(pfc: &Front, pf0: &Front) -> Result<f64> {
    require_nonempty(pfc, "obtained front")?;
    require_nonempty(pf0, "reference front")?;
    let mut sum = 0.0;
    for p in &pfc.points {
        let d = nearest(p, &pf0.points)?;
        sum += d * d;
    }
    Ok(sum.sqrt() / pfc.len() as f64)
}

/// Generalized spread. Extremes are the reference-front members that minimize
/// each objective; spacing uses each member's nearest *other* member.
/// Fronts with fewer than two members score 1.
pub fn gs(pfc: &Front, pf0: &Front) -> Result<f64> {
    require_nonempty(pfc, "obtained front")?;
    require_nonempty(pf0, "reference front")?;
    if pfc.len() < 2 {
        return Ok(1.0);
    }
    let m = pf0.points[0].len();
    let mut extreme_sum = 0.0;
    for j in 0..m {
        let e = pf0
            .points
            .iter()
            .min_by(|a, b| a[j].total_cmp(&b[j]))
            .expect("reference front is non-empty");
        extreme_sum += nearest(e, &pfc.points)?;
    }
    let mut nn = Vec::with_capacity(pfc.len());
    for (i, p) in pfc.points.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (k, q) in pfc.points.iter().enumerate() {
            if k != i {
                best = best.min(euclidean_distance(p, q)?);
            }
        }
        nn.push(best);
    }
    let mean = nn.iter().sum::<f64>() / nn.len() as f64;
    let deviation: f64 = nn.iter().map(|d| (d - mean).abs()).sum();
    let denom = extreme_sum + pfc.len() as f64 * mean;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((extreme_sum + deviation) / denom)
}

/// Pareto front size.
pub fn pfs(pfc: &Front) -> usize {
    pfc.len()
}
