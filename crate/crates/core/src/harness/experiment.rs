//! The repeated-comparison protocol: one shared pool per repeat, every
//! configured algorithm on a private copy, indicators against a reference
//! front pooled over all runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    cliffs_delta, gd, gs, hv, median, nondominated_filter, nondominated_points, pfs,
    reference_front, stats::Direction as RankDirection, wilcoxon_rank_sum, Front,
};
use crate::problem::{pool_from, Candidate, EvaluationLedger, ObjectiveSpec, ProblemModel};
use crate::seed;
use crate::sway::{SwayConfig, SwayStats};

use super::algorithms::{rand_sample, run_ground_truth, run_sway};
use super::config::{Algorithm, ExperimentConfig, RandSize};
use super::nsga2::run_nsga2;

pub const INDICATORS: [&str; 4] = ["gd", "gs", "pfs", "hv"];

/// Seed streams derived from one repeat seed.
const POOL_STREAM: u64 = 0;
const SWAY_STREAM: u64 = 1;
const RAND_STREAM: u64 = 2;
const NSGA2_STREAM: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub run: usize,
    /// Repeat seed; the shared pool and every algorithm's randomness derive from it.
    pub seed: u64,
    pub gd: f64,
    pub gs: f64,
    pub pfs: usize,
    pub hv: f64,
    pub evaluations: u64,
    pub runtime_secs: f64,
    /// Candidates the algorithm returned before non-dominated filtering.
    pub output_size: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sway_stats: Option<SwayStats>,
    /// Normalized, minimize-oriented front.
    #[serde(skip)]
    pub front: Vec<Vec<f64>>,
}

impl RunRecord {
    pub fn indicator(&self, name: &str) -> Option<f64> {
        match name {
            "gd" => Some(self.gd),
            "gs" => Some(self.gs),
            "pfs" => Some(self.pfs as f64),
            "hv" => Some(self.hv),
            "evaluations" => Some(self.evaluations as f64),
            "runtime" => Some(self.runtime_secs),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub indicator: String,
    pub a: Algorithm,
    pub b: Algorithm,
    pub u: f64,
    pub p_value: f64,
    pub significant: bool,
    /// `a`, `b` or `equal`: whose median is larger.
    pub larger: String,
    pub cliffs_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub algorithm: Algorithm,
    pub median_gd: f64,
    pub median_gs: f64,
    pub median_pfs: f64,
    pub median_hv: f64,
    pub median_evaluations: f64,
    pub median_runtime_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub model: String,
    pub pool_size: usize,
    pub repeats: usize,
    pub master_seed: u64,
    pub objectives: Vec<String>,
    /// Normalization bounds shared by every run.
    pub bounds: Vec<(f64, f64)>,
    pub reference_front_size: usize,
    pub records: Vec<RunRecord>,
    pub summary: Vec<AlgorithmSummary>,
    pub comparisons: Vec<Comparison>,
    /// Broken protocol invariants; empty for a sound run.
    pub violations: Vec<String>,
}

impl RunReport {
    pub fn records_for(&self, alg: Algorithm) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(move |r| r.algorithm == alg)
    }

    pub fn values(&self, alg: Algorithm, indicator: &str) -> Vec<f64> {
        self.records_for(alg)
            .filter_map(|r| r.indicator(indicator))
            .collect()
    }

    pub fn comparison(&self, indicator: &str, a: Algorithm, b: Algorithm) -> Option<&Comparison> {
        self.comparisons
            .iter()
            .find(|c| c.indicator == indicator && c.a == a && c.b == b)
    }
}

/// Raw result of one algorithm in one repeat.
struct AlgorithmRun {
    algorithm: Algorithm,
    front: Vec<Vec<f64>>,
    /// Per-objective (min, max) over everything the algorithm returned.
    range: Vec<(f64, f64)>,
    evaluations: u64,
    runtime_secs: f64,
    output_size: usize,
    sway_stats: Option<SwayStats>,
}

struct Repeat {
    run: usize,
    seed: u64,
    results: Vec<AlgorithmRun>,
    violations: Vec<String>,
}

fn objective_range(cands: &[Candidate], m: usize) -> Result<Vec<(f64, f64)>> {
    let mut range = vec![(f64::INFINITY, f64::NEG_INFINITY); m];
    for c in cands {
        for (r, &v) in range.iter_mut().zip(c.require_objectives()?) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }
    Ok(range)
}

fn raw_front(cands: &[Candidate], spec: &ObjectiveSpec) -> Result<Vec<Vec<f64>>> {
    nondominated_filter(cands, spec)?
        .iter()
        .map(|c| c.require_objectives().map(<[f64]>::to_vec))
        .collect()
}

fn finish(
    algorithm: Algorithm,
    returned: &[Candidate],
    spec: &ObjectiveSpec,
    evaluations: u64,
    runtime_secs: f64,
) -> Result<AlgorithmRun> {
    Ok(AlgorithmRun {
        algorithm,
        front: raw_front(returned, spec)?,
        range: objective_range(returned, spec.len())?,
        evaluations,
        runtime_secs,
        output_size: returned.len(),
        sway_stats: None,
    })
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    model: &'a dyn ProblemModel,
}

impl Context<'_> {
    fn pool(&self, repeat_seed: u64) -> Result<Vec<Candidate>> {
        Ok(pool_from(self.model.generate(
            self.cfg.pool_size,
            seed::split(repeat_seed, POOL_STREAM),
        )?))
    }

    fn rand(
        &self,
        pool: &[Candidate],
        n: usize,
        repeat_seed: u64,
    ) -> Result<(AlgorithmRun, Option<String>)> {
        let ledger = EvaluationLedger::new();
        let start = Instant::now();
        let sample = rand_sample(
            pool,
            self.model,
            n,
            &ledger,
            seed::split(repeat_seed, RAND_STREAM),
        )?;
        let secs = start.elapsed().as_secs_f64();
        let expected = n.clamp(1, pool.len()) as u64;
        let violation = (ledger.evaluations() != expected).then(|| {
            format!(
                "RAND charged {} evaluations, expected {expected}",
                ledger.evaluations()
            )
        });
        Ok((
            finish(
                Algorithm::Rand,
                &sample,
                self.model.objective_spec(),
                ledger.evaluations(),
                secs,
            )?,
            violation,
        ))
    }

    fn repeat(&self, run: usize) -> Result<Repeat> {
        let cfg = self.cfg;
        let spec = self.model.objective_spec();
        let repeat_seed = seed::split(cfg.master_seed, run as u64);
        let pool = self.pool(repeat_seed)?;
        let mut results = Vec::new();
        let mut violations = Vec::new();
        let mut sway_size = None;

        for &alg in &cfg.algorithms {
            match alg {
                Algorithm::Sway => {
                    let sway_cfg = SwayConfig {
                        seed: seed::split(repeat_seed, SWAY_STREAM),
                        ..cfg.sway.clone()
                    };
                    let out = run_sway(&pool, self.model, &sway_cfg)?;
                    let mut ids: Vec<usize> = out.output.iter().map(|c| c.id).collect();
                    ids.sort_unstable();
                    ids.dedup();
                    let subset = ids.len() == out.output.len()
                        && out.output.iter().all(|c| {
                            pool.get(c.id)
                                .is_some_and(|p| p.decisions() == c.decisions())
                        });
                    if !subset {
                        violations.push(format!(
                            "run {run}: SWAY returned candidates outside the pool"
                        ));
                    }
                    sway_size = Some(out.output.len());
                    let mut r = finish(
                        alg,
                        &out.output,
                        spec,
                        out.evaluations,
                        out.runtime.as_secs_f64(),
                    )?;
                    r.sway_stats = Some(out.stats);
                    results.push(r);
                }
                Algorithm::GroundTruth => {
                    let ledger = EvaluationLedger::new();
                    let start = Instant::now();
                    let front = run_ground_truth(&pool, self.model, &ledger)?;
                    let secs = start.elapsed().as_secs_f64();
                    if ledger.evaluations() != pool.len() as u64 {
                        violations.push(format!(
                            "run {run}: GroundTruth charged {} evaluations for a pool of {}",
                            ledger.evaluations(),
                            pool.len()
                        ));
                    }
                    // Ground truth sees the whole pool, so its range is the pool's.
                    let mut r = finish(alg, &front, spec, ledger.evaluations(), secs)?;
                    let mut evaluated = pool.clone();
                    for c in evaluated.iter_mut() {
                        crate::problem::evaluate(self.model, c, &EvaluationLedger::new())?;
                    }
                    r.range = objective_range(&evaluated, spec.len())?;
                    r.output_size = front.len();
                    results.push(r);
                }
                Algorithm::Nsga2 => {
                    let params = cfg.nsga2_params(self.model)?;
                    let ledger = EvaluationLedger::new();
                    let start = Instant::now();
                    let initial: Vec<Candidate> = pool.iter().take(params.mu).cloned().collect();
                    let out = run_nsga2(
                        self.model,
                        initial,
                        &params,
                        &ledger,
                        seed::split(repeat_seed, NSGA2_STREAM),
                    )?;
                    let secs = start.elapsed().as_secs_f64();
                    results.push(finish(
                        alg,
                        &out.population,
                        spec,
                        ledger.evaluations(),
                        secs,
                    )?);
                }
                Algorithm::Rand => {}
            }
        }
        if cfg.algorithms.contains(&Algorithm::Rand) {
            let n = match cfg.rand_size {
                RandSize::Fixed(n) => Some(n),
                RandSize::Sway => Some(sway_size.ok_or_else(|| {
                    Error::config("rand_size = \"sway\" needs SWAY in the algorithm list")
                })?),
                RandSize::Auto if !cfg.algorithms.contains(&Algorithm::Nsga2) => {
                    Some(sway_size.unwrap_or(cfg.pool_size))
                }
                RandSize::Auto | RandSize::Nsga2 => None,
            };
            if let Some(n) = n {
                let (r, v) = self.rand(&pool, n, repeat_seed)?;
                violations.extend(v.map(|v| format!("run {run}: {v}")));
                results.push(r);
            }
        }
        Ok(Repeat {
            run,
            seed: repeat_seed,
            results,
            violations,
        })
    }
}

/// Runs the configured comparison. Fails before any evaluation when the
/// model cannot be loaded.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let model = cfg.model.load(cfg.model_seed)?;
    run_experiment_with(cfg, model.as_ref())
}

/// [`run_experiment`] with an already-built model.
pub fn run_experiment_with(cfg: &ExperimentConfig, model: &dyn ProblemModel) -> Result<RunReport> {
    cfg.validate()?;
    if cfg.algorithms.contains(&Algorithm::Nsga2) {
        cfg.nsga2_params(model)?;
    }
    let ctx = Context { cfg, model };
    let mut repeats: Vec<Repeat> = (0..cfg.repeats)
        .into_par_iter()
        .map(|r| ctx.repeat(r))
        .collect::<Result<_>>()?;

    // RAND sized after NSGA-II needs every repeat's NSGA-II front first.
    let rand_pending = cfg.algorithms.contains(&Algorithm::Rand)
        && !repeats
            .iter()
            .any(|r| r.results.iter().any(|a| a.algorithm == Algorithm::Rand));
    if rand_pending {
        let sizes: Vec<f64> = repeats
            .iter()
            .flat_map(|r| r.results.iter())
            .filter(|a| a.algorithm == Algorithm::Nsga2)
            .map(|a| a.front.len() as f64)
            .collect();
        let n = median(&sizes)
            .map(|m| m.round() as usize)
            .unwrap_or(cfg.pool_size);
        let extra: Vec<(AlgorithmRun, Option<String>)> = repeats
            .par_iter()
            .map(|r| {
                let pool = ctx.pool(r.seed)?;
                ctx.rand(&pool, n, r.seed)
            })
            .collect::<Result<_>>()?;
        for (r, (res, v)) in repeats.iter_mut().zip(extra) {
            r.results.push(res);
            r.violations
                .extend(v.map(|v| format!("run {}: {v}", r.run)));
        }
    }

    build_report(cfg, model, repeats)
}

fn build_report(
    cfg: &ExperimentConfig,
    model: &dyn ProblemModel,
    repeats: Vec<Repeat>,
) -> Result<RunReport> {
    let mut spec = model.objective_spec().clone();
    let m = spec.len();
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); m];
    for a in repeats.iter().flat_map(|r| r.results.iter()) {
        for (b, r) in bounds.iter_mut().zip(&a.range) {
            b.0 = b.0.min(r.0);
            b.1 = b.1.max(r.1);
        }
    }
    spec.set_bounds(&bounds)?;

    let mut records = Vec::new();
    for rep in &repeats {
        for a in &rep.results {
            let pts = a
                .front
                .iter()
                .map(|o| spec.normalize(o))
                .collect::<Result<Vec<_>>>()?;
            records.push((rep.run, rep.seed, a, nondominated_points(pts)));
        }
    }
    let fronts: Vec<Front> = records.iter().map(|(.., f)| f.clone()).collect();
    let pf0 = reference_front(&fronts);

    let mut violations: Vec<String> = repeats.iter().flat_map(|r| r.violations.clone()).collect();
    let mut out = Vec::with_capacity(records.len());
    for (run, seed, a, front) in records {
        out.push(RunRecord {
            algorithm: a.algorithm,
            run,
            seed,
            gd: gd(&front, &pf0)?,
            gs: gs(&front, &pf0)?,
            pfs: pfs(&front),
            hv: hv(&front, &cfg.hv)?,
            evaluations: a.evaluations,
            runtime_secs: a.runtime_secs,
            output_size: a.output_size,
            sway_stats: a.sway_stats.clone(),
            front: front.points,
        });
    }
    out.sort_by_key(|r| (r.algorithm, r.run));

    for run in 0..cfg.repeats {
        let get = |alg| out.iter().find(|r| r.algorithm == alg && r.run == run);
        if let (Some(g), Some(s)) = (get(Algorithm::GroundTruth), get(Algorithm::Sway)) {
            if g.hv < s.hv {
                violations.push(format!(
                    "run {run}: GroundTruth hypervolume {} below SWAY's {}",
                    g.hv, s.hv
                ));
            }
        }
    }

    let mut algorithms = cfg.algorithms.clone();
    algorithms.sort();
    let summary = algorithms
        .iter()
        .map(|&alg| {
            let med = |ind: &str| {
                let v: Vec<f64> = out
                    .iter()
                    .filter(|r| r.algorithm == alg)
                    .filter_map(|r| r.indicator(ind))
                    .collect();
                median(&v).unwrap_or(f64::NAN)
            };
            AlgorithmSummary {
                algorithm: alg,
                median_gd: med("gd"),
                median_gs: med("gs"),
                median_pfs: med("pfs"),
                median_hv: med("hv"),
                median_evaluations: med("evaluations"),
                median_runtime_secs: med("runtime"),
            }
        })
        .collect();

    let mut comparisons = Vec::new();
    if cfg.repeats >= 5 {
        for (i, &a) in algorithms.iter().enumerate() {
            for &b in &algorithms[i + 1..] {
                for ind in INDICATORS {
                    let va: Vec<f64> = out
                        .iter()
                        .filter(|r| r.algorithm == a)
                        .filter_map(|r| r.indicator(ind))
                        .collect();
                    let vb: Vec<f64> = out
                        .iter()
                        .filter(|r| r.algorithm == b)
                        .filter_map(|r| r.indicator(ind))
                        .collect();
                    let t = wilcoxon_rank_sum(&va, &vb, cfg.alpha)?;
                    comparisons.push(Comparison {
                        indicator: ind.to_string(),
                        a,
                        b,
                        u: t.u,
                        p_value: t.p_value,
                        significant: t.significant,
                        larger: match t.direction {
                            RankDirection::AGreater => "a",
                            RankDirection::BGreater => "b",
                            RankDirection::Equal => "equal",
                        }
                        .to_string(),
                        cliffs_delta: cliffs_delta(&va, &vb),
                    });
                }
            }
        }
    } else {
        log::info!("fewer than 5 repeats; skipping significance tests");
    }

    violations.sort();
    Ok(RunReport {
        scenario: cfg.model.scenario_name(),
        model: model.name().to_string(),
        pool_size: cfg.pool_size,
        repeats: cfg.repeats,
        master_seed: cfg.master_seed,
        objectives: spec.objectives().iter().map(|o| o.name.clone()).collect(),
        bounds,
        reference_front_size: pf0.len(),
        records: out,
        summary,
        comparisons,
        violations,
    })
}

/// Shortest round-trip formatting keeps files byte-stable across runs.
fn fmt(v: f64) -> String {
    format!("{v}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes `<root>/<scenario>/<algorithm>/run<k>.csv` and `front<k>.csv`,
/// `<root>/<scenario>/indicators.csv` and `<root>/<scenario>/summary.json`.
/// Returns the scenario directory.
pub fn write_results(report: &RunReport, root: &Path) -> Result<PathBuf> {
    let dir = root.join(&report.scenario);
    fs::create_dir_all(&dir)?;
    let mut long = csv::Writer::from_path(dir.join("indicators.csv")).map_err(csv_err)?;
    long.write_record(["scenario", "algorithm", "run", "indicator", "value"])
        .map_err(csv_err)?;
    let mut by_alg: BTreeMap<Algorithm, Vec<&RunRecord>> = BTreeMap::new();
    for r in &report.records {
        by_alg.entry(r.algorithm).or_default().push(r);
    }
    for (alg, runs) in by_alg {
        let adir = dir.join(alg.as_str());
        fs::create_dir_all(&adir)?;
        for r in runs {
            let rows = [
                ("gd", fmt(r.gd)),
                ("gs", fmt(r.gs)),
                ("pfs", r.pfs.to_string()),
                ("hv", fmt(r.hv)),
                ("evaluations", r.evaluations.to_string()),
                ("seed", r.seed.to_string()),
            ];
            let mut w =
                csv::Writer::from_path(adir.join(format!("run{}.csv", r.run))).map_err(csv_err)?;
            w.write_record(["indicator", "value"]).map_err(csv_err)?;
            for (k, v) in &rows {
                w.write_record([*k, v.as_str()]).map_err(csv_err)?;
                if *k != "seed" {
                    long.write_record([
                        report.scenario.as_str(),
                        alg.as_str(),
                        &r.run.to_string(),
                        k,
                        v,
                    ])
                    .map_err(csv_err)?;
                }
            }
            w.flush()?;

            let mut f = csv::Writer::from_path(adir.join(format!("front{}.csv", r.run)))
                .map_err(csv_err)?;
            f.write_record(&report.objectives).map_err(csv_err)?;
            for p in &r.front {
                f.write_record(p.iter().map(|&v| fmt(v))).map_err(csv_err)?;
            }
            f.flush()?;
        }
    }
    long.flush()?;
    let json =
        serde_json::to_string_pretty(report).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    fs::write(dir.join("summary.json"), json)?;
    Ok(dir)
}
