//! NSGA-II over continuous decision spaces, seeded from a shared pool.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dominance::dominates_min;
use crate::error::{Error, Result};
use crate::metrics::{hv, nondominated_points, HvConfig};
use crate::problem::{
    evaluate, Candidate, Decisions, EvaluationLedger, ObjectiveSpec, ProblemModel, SpaceKind,
};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nsga2Params {
    pub mu: usize,
    pub cxpb: f64,
    /// Per-gene mutation probability.
    pub mutpb: f64,
    /// Generations without hypervolume improvement before stopping.
    #[serde(default = "default_window")]
    pub stagnation_window: usize,
    /// Hard cap on generations, counting generation 0.
    #[serde(default = "default_max_generations")]
    pub max_generations: usize,
    /// Distribution index of simulated binary crossover.
    #[serde(default = "default_eta")]
    pub eta: f64,
}

fn default_window() -> usize {
    5
}

fn default_max_generations() -> usize {
    500
}

fn default_eta() -> f64 {
    20.0
}

/// Grid-tuned `(scenario, MU, CXPB, MUTPB)`.
pub const TUNED_PARAMS: [(&str, usize, f64, f64); 7] = [
    ("osp", 200, 0.9, 0.1),
    ("osp2", 100, 0.8, 0.2),
    ("ground", 200, 0.8, 0.15),
    ("flight", 300, 0.9, 0.15),
    ("pom3a", 300, 0.8, 0.15),
    ("pom3b", 160, 0.9, 0.1),
    ("pom3c", 200, 0.9, 0.2),
];

impl Nsga2Params {
    pub fn new(mu: usize, cxpb: f64, mutpb: f64) -> Self {
        Self {
            mu,
            cxpb,
            mutpb,
            stagnation_window: default_window(),
            max_generations: default_max_generations(),
            eta: default_eta(),
        }
    }

    /// Tuned parameters for a shipped scenario; `100 / 0.9 / 0.1` otherwise.
    pub fn for_scenario(name: &str) -> Self {
        let name = name.to_lowercase();
        let name = name.strip_prefix("xomo-").unwrap_or(&name);
        TUNED_PARAMS
            .iter()
            .find(|(n, ..)| *n == name)
            .map(|&(_, mu, cx, mt)| Self::new(mu, cx, mt))
            .unwrap_or_else(|| Self::new(100, 0.9, 0.1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.mu < 2 {
            return Err(Error::config(
                "NSGA-II population must hold at least two members",
            ));
        }
        if !(0.0..=1.0).contains(&self.cxpb) || !(0.0..=1.0).contains(&self.mutpb) {
            return Err(Error::config(
                "crossover and mutation probabilities must lie in [0, 1]",
            ));
        }
        if self.stagnation_window == 0 {
            return Err(Error::config("stagnation window must be positive"));
        }
        if self.max_generations == 0 {
            return Err(Error::config("max_generations must be positive"));
        }
        if self.eta.is_nan() || self.eta < 0.0 {
            return Err(Error::config(
                "crossover distribution index must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Splits minimize-oriented points into non-dominated bands, best first.
/// Identical points share a band.
pub fn fast_nondominated_sort(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates_min(&points[i], &points[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if dominates_min(&points[j], &points[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut bands = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        bands.push(current);
        current = next;
    }
    bands
}

/// Crowding of each band member: the product over objectives of the
/// normalized gap between its two neighbours. Extremes get infinity;
/// objectives that do not vary within the band are skipped.
#[allow(clippy::needless_range_loop)]
pub fn crowding_distance(points: &[Vec<f64>], band: &[usize]) -> Vec<f64> {
    let k = band.len();
    if k <= 2 {
        return vec![f64::INFINITY; k];
    }
    let m = points[band[0]].len();
    let mut crowd = vec![1.0; k];
    let mut order: Vec<usize> = (0..k).collect();
    for o in 0..m {
        order.sort_by(|&a, &b| {
            points[band[a]][o]
                .total_cmp(&points[band[b]][o])
                .then(a.cmp(&b))
        });
        let lo = points[band[order[0]]][o];
        let hi = points[band[order[k - 1]]][o];
        if hi <= lo {
            continue;
        }
        crowd[order[0]] = f64::INFINITY;
        crowd[order[k - 1]] = f64::INFINITY;
        for w in 1..k - 1 {
            if crowd[order[w]].is_finite() {
                let gap =
                    (points[band[order[w + 1]]][o] - points[band[order[w - 1]]][o]) / (hi - lo);
                crowd[order[w]] *= gap;
            }
        }
    }
    crowd
}

#[derive(Clone, Debug)]
pub struct Nsga2Outcome {
    /// Final population, every member evaluated.
    pub population: Vec<Candidate>,
    /// Generations run, counting generation 0.
    pub generations: usize,
    /// Front hypervolume after each generation.
    pub hv_trace: Vec<f64>,
}

struct Ranked {
    rank: Vec<usize>,
    crowd: Vec<f64>,
}

fn minimize_oriented(pop: &[Candidate], spec: &ObjectiveSpec) -> Result<Vec<Vec<f64>>> {
    let dirs = spec.directions();
    pop.iter()
        .map(|c| {
            Ok(c.require_objectives()?
                .iter()
                .zip(&dirs)
                .map(|(&v, d)| d.to_minimize(v))
                .collect())
        })
        .collect()
}

fn rank(points: &[Vec<f64>]) -> (Vec<Vec<usize>>, Ranked) {
    let bands = fast_nondominated_sort(points);
    let mut rank = vec![0; points.len()];
    let mut crowd = vec![0.0; points.len()];
    for (r, band) in bands.iter().enumerate() {
        for (&i, c) in band.iter().zip(crowding_distance(points, band)) {
            rank[i] = r;
            crowd[i] = c;
        }
    }
    (bands, Ranked { rank, crowd })
}

fn tournament<R: Rng>(ranked: &Ranked, rng: &mut R) -> usize {
    let n = ranked.rank.len();
    let a = rng.gen_range(0..n);
    let b = rng.gen_range(0..n);
    let better = |x: usize, y: usize| {
        ranked.rank[x] < ranked.rank[y]
            || (ranked.rank[x] == ranked.rank[y] && ranked.crowd[x] > ranked.crowd[y])
    };
    if better(b, a) {
        b
    } else {
        a
    }
}

/// Bounded simulated binary crossover of one gene pair.
fn sbx<R: Rng>(x1: f64, x2: f64, lo: f64, hi: f64, eta: f64, rng: &mut R) -> (f64, f64) {
    if (x1 - x2).abs() <= 1e-14 || hi <= lo {
        return (x1, x2);
    }
    let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let u: f64 = rng.gen();
    let spread = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let bq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
    let c1 = 0.5 * (y1 + y2 - bq1 * (y2 - y1));
    let bq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
    let c2 = 0.5 * (y1 + y2 + bq2 * (y2 - y1));
    let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
    if rng.gen_bool(0.5) {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

/// Runs NSGA-II from `initial` (generation 0, typically the first `mu` pool
/// members). Every evaluated offspring is charged to `ledger`.
pub fn run_nsga2(
    model: &dyn ProblemModel,
    initial: Vec<Candidate>,
    params: &Nsga2Params,
    ledger: &EvaluationLedger,
    seed: u64,
) -> Result<Nsga2Outcome> {
    params.validate()?;
    let space = model.decision_space();
    if space.kind() != SpaceKind::Continuous {
        return Err(Error::config("NSGA-II needs a continuous decision space"));
    }
    if initial.len() < params.mu {
        return Err(Error::config(format!(
            "NSGA-II needs {} initial members, got {}",
            params.mu,
            initial.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let mut pop: Vec<Candidate> = initial.into_iter().take(params.mu).collect();
    for c in pop.iter_mut() {
        evaluate(model, c, ledger)?;
    }

    // Progress is measured with bounds frozen at generation 0.
    let mut spec = model.objective_spec().clone();
    spec.calibrate(pop.iter().map(|c| c.objectives().unwrap_or(&[])))?;
    let hv_cfg = HvConfig::default();
    let front_hv = |pop: &[Candidate]| -> Result<f64> {
        let pts = pop
            .iter()
            .map(|c| spec.normalize(c.require_objectives()?))
            .collect::<Result<Vec<_>>>()?;
        hv(&nondominated_points(pts), &hv_cfg)
    };

    let mut best = front_hv(&pop)?;
    let mut hv_trace = vec![best];
    let mut stale = 0;
    let mut generations = 1;
    let mut next_id = pop.iter().map(|c| c.id).max().unwrap_or(0) + 1;
    let dims = space.dims();

    while stale < params.stagnation_window && generations < params.max_generations {
        let (_, ranked) = rank(&minimize_oriented(&pop, model.objective_spec())?);
        let mut offspring: Vec<Candidate> = Vec::with_capacity(params.mu);
        while offspring.len() < params.mu {
            let p1 = &pop[tournament(&ranked, &mut rng)];
            let p2 = &pop[tournament(&ranked, &mut rng)];
            let mut genes = [
                p1.decisions().as_real().unwrap_or(&[]).to_vec(),
                p2.decisions().as_real().unwrap_or(&[]).to_vec(),
            ];
            let mut changed = [false, false];
            if rng.gen_bool(params.cxpb) {
                for (g, d) in dims.iter().enumerate() {
                    if rng.gen_bool(0.5) {
                        let (a, b) = sbx(
                            genes[0][g],
                            genes[1][g],
                            d.lower,
                            d.upper,
                            params.eta,
                            &mut rng,
                        );
                        changed[0] |= a != genes[0][g];
                        changed[1] |= b != genes[1][g];
                        genes[0][g] = a;
                        genes[1][g] = b;
                    }
                }
            }
            for (child, parent) in [(0, p1), (1, p2)] {
                if params.mutpb > 0.0 {
                    for (g, d) in dims.iter().enumerate() {
                        if rng.gen_bool(params.mutpb) && !d.is_fixed() {
                            genes[child][g] = rng.gen_range(d.lower..=d.upper);
                            changed[child] = true;
                        }
                    }
                }
                if offspring.len() == params.mu {
                    break;
                }
                if changed[child] {
                    offspring.push(Candidate::new(
                        next_id,
                        Decisions::Real(std::mem::take(&mut genes[child])),
                    ));
                    next_id += 1;
                } else {
                    offspring.push(parent.clone());
                }
            }
        }
        for c in offspring.iter_mut() {
            evaluate(model, c, ledger)?;
        }

        let mut combined = pop;
        combined.extend(offspring);
        let points = minimize_oriented(&combined, model.objective_spec())?;
        let (bands, ranked) = rank(&points);
        let mut keep: Vec<usize> = Vec::with_capacity(params.mu);
        for band in bands {
            if keep.len() + band.len() <= params.mu {
                keep.extend(band);
            } else {
                let mut last = band;
                last.sort_by(|&a, &b| ranked.crowd[b].total_cmp(&ranked.crowd[a]).then(a.cmp(&b)));
                keep.extend(last.into_iter().take(params.mu - keep.len()));
            }
            if keep.len() == params.mu {
                break;
            }
        }
        keep.sort_unstable();
        let mut slots: Vec<Option<Candidate>> = combined.into_iter().map(Some).collect();
        pop = keep
            .into_iter()
            .map(|i| slots[i].take().expect("each survivor is kept once"))
            .collect();

        generations += 1;
        let h = front_hv(&pop)?;
        hv_trace.push(h);
        if h > best {
            best = h;
            stale = 0;
        } else {
            stale += 1;
        }
    }
    Ok(Nsga2Outcome {
        population: pop,
        generations,
        hv_trace,
    })
}
