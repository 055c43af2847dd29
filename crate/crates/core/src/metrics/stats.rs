//! Rank-sum test, Cliff's delta and small helpers for summarizing repeats.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `a` has the larger median.
    AGreater,
    BGreater,
    Equal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSumResult {
    /// Mann–Whitney U of the first sample.
    pub u: f64,
    pub p_value: f64,
    pub significant: bool,
    pub direction: Direction,
}

pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    })
}

/// Mid-ranks (1-based) of the pooled sample and the tie-group sizes.
fn mid_ranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        ties.push(end - start);
        start = end;
    }
    (ranks, ties)
}

fn check_sizes(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() < 5 || b.len() < 5 {
        return Err(Error::InsufficientSamples(format!(
            "rank-sum test needs at least 5 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::structural("rank-sum test received NaN"));
    }
    Ok(())
}

fn direction(a: &[f64], b: &[f64]) -> Direction {
    match median(a).partial_cmp(&median(b)) {
        Some(Ordering::Greater) => Direction::AGreater,
        Some(Ordering::Less) => Direction::BGreater,
        _ => Direction::Equal,
    }
}

fn u_statistic(a: &[f64], b: &[f64]) -> (f64, Vec<f64>, Vec<usize>) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = mid_ranks(&pooled);
    let n1 = a.len() as f64;
    let r1: f64 = ranks[..a.len()].iter().sum();
    (r1 - n1 * (n1 + 1.0) / 2.0, ranks, ties)
}

/// Two-sided Wilcoxon rank-sum test, normal approximation with tie and
/// continuity corrections.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumResult> {
    check_sizes(a, b)?;
    let (u, _, ties) = u_statistic(a, b);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term);
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
        let normal = Normal::standard();
        (2.0 * (1.0 - normal.cdf(z))).min(1.0)
    };
    Ok(RankSumResult {
        u,
        p_value,
        significant: p_value < alpha,
        direction: direction(a, b),
    })
}

/// Two-sided rank-sum test with the exact permutation distribution of the
/// (mid-rank) rank sum. Practical for samples up to a few dozen values each.
pub fn wilcoxon_exact(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumResult> {
    check_sizes(a, b)?;
    let (u, ranks, _) = u_statistic(a, b);
    let n1 = a.len();
    // Doubled mid-ranks are integers.
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // ways[k][s]: subsets of size k with doubled-rank sum s.
    let mut ways = vec![vec![0f64; max_sum + 1]; n1 + 1];
    ways[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=n1).rev() {
            let (lo, hi) = ways.split_at_mut(k);
            for s in (r..=max_sum).rev() {
                hi[0][s] += lo[k - 1][s - r];
            }
        }
    }
    let total: f64 = ways[n1].iter().sum();
    let observed: usize = doubled[..n1].iter().sum();
    let mean = n1 as f64 * max_sum as f64 / doubled.len() as f64;
    let dev = (observed as f64 - mean).abs();
    let extreme: f64 = ways[n1]
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as f64 - mean).abs() >= dev - 1e-9)
        .map(|(_, w)| w)
        .sum();
    let p_value = (extreme / total).min(1.0);
    Ok(RankSumResult {
        u,
        p_value,
        significant: p_value < alpha,
        direction: direction(a, b),
    })
}

/// Cliff's delta: `P(a > b) − P(a < b)` over all cross pairs.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut score = 0i64;
    for x in a {
        for y in b {
            score += match x.partial_cmp(y) {
                Some(Ordering::Greater) => 1,
                Some(Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    score as f64 / (a.len() * b.len()) as f64
}
