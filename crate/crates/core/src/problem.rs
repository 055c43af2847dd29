//! Domain types shared by every module: decision spaces, candidates,
//! objective specifications, the [`ProblemModel`] abstraction and the
//! evaluation ledger.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Continuous,
    Binary,
}

/// One decision variable. Binary dimensions carry bounds `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub units: String,
}

impl DimensionSpec {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            lower,
            upper,
            units: String::new(),
        }
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_fixed(&self) -> bool {
        self.upper == self.lower
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionSpace {
    name: String,
    kind: SpaceKind,
    dims: Vec<DimensionSpec>,
}

impl DecisionSpace {
    pub fn continuous(name: impl Into<String>, dims: Vec<DimensionSpec>) -> Result<Self> {
        for d in &dims {
            if !(d.lower.is_finite() && d.upper.is_finite()) || d.lower > d.upper {
                return Err(Error::structural(format!(
                    "dimension {} has invalid bounds [{}, {}]",
                    d.name, d.lower, d.upper
                )));
            }
        }
        Self::build(name.into(), SpaceKind::Continuous, dims)
    }

    pub fn binary<S: Into<String>>(
        name: impl Into<String>,
        names: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let dims = names
            .into_iter()
            .map(|n| DimensionSpec::new(n, 0.0, 1.0))
            .collect();
        Self::build(name.into(), SpaceKind::Binary, dims)
    }

    fn build(name: String, kind: SpaceKind, dims: Vec<DimensionSpec>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::structural(format!(
                "decision space {name} has no dimensions"
            )));
        }
        let mut seen = HashSet::new();
        for d in &dims {
            if !seen.insert(d.name.as_str()) {
                return Err(Error::structural(format!(
                    "duplicate dimension name {} in {name}",
                    d.name
                )));
            }
        }
        Ok(Self { name, kind, dims })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dims(&self) -> &[DimensionSpec] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    /// Checks that `decisions` has the right representation, length and bounds.
    pub fn conforms(&self, decisions: &Decisions) -> Result<()> {
        if decisions.len() != self.len() {
            return Err(Error::structural(format!(
                "expected {} decisions for {}, got {}",
                self.len(),
                self.name,
                decisions.len()
            )));
        }
        match (self.kind, decisions) {
            (SpaceKind::Continuous, Decisions::Real(values)) => {
                for (d, &v) in self.dims.iter().zip(values) {
                    if !(d.lower..=d.upper).contains(&v) {
                        return Err(Error::Validity(format!(
                            "{} = {v} outside [{}, {}]",
                            d.name, d.lower, d.upper
                        )));
                    }
                }
                Ok(())
            }
            (SpaceKind::Binary, Decisions::Bits(_)) => Ok(()),
            _ => Err(Error::structural(format!(
                "decision representation does not match {:?} space {}",
                self.kind, self.name
            ))),
        }
    }

    /// Maps a unit-cube vector back into the space. Fixed dimensions map to their value.
    pub fn denormalize(&self, unit: &[f64]) -> Result<Vec<f64>> {
        if unit.len() != self.len() {
            return Err(Error::structural(format!(
                "expected {} coordinates, got {}",
                self.len(),
                unit.len()
            )));
        }
        Ok(self
            .dims
            .iter()
            .zip(unit)
            .map(|(d, &u)| (d.lower + u * d.width()).clamp(d.lower, d.upper))
            .collect())
    }

    /// Uniform draw inside the bounds (continuous) or uniform bits (binary).
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Decisions {
        match self.kind {
            SpaceKind::Continuous => Decisions::Real(
                self.dims
                    .iter()
                    .map(|d| {
                        if d.is_fixed() {
                            d.lower
                        } else {
                            rng.gen_range(d.lower..=d.upper)
                        }
                    })
                    .collect(),
            ),
            SpaceKind::Binary => {
                Decisions::Bits(self.dims.iter().map(|_| rng.gen_bool(0.5)).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Decisions {
    Real(Vec<f64>),
    Bits(Vec<bool>),
}

impl Decisions {
    pub fn len(&self) -> usize {
        match self {
            Decisions::Real(v) => v.len(),
            Decisions::Bits(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match self {
            Decisions::Real(v) => Some(v),
            Decisions::Bits(_) => None,
        }
    }

    pub fn as_bits(&self) -> Option<&[bool]> {
        match self {
            Decisions::Bits(b) => Some(b),
            Decisions::Real(_) => None,
        }
    }
}

/// A point in decision space plus, once evaluated, its objective vector.
///
/// `id` is the candidate's position in the pool it was generated into; it is
/// the tie-breaker wherever a deterministic order is needed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: usize,
    decisions: Decisions,
    objectives: Option<Vec<f64>>,
}

impl Candidate {
    pub fn new(id: usize, decisions: Decisions) -> Self {
        Self {
            id,
            decisions,
            objectives: None,
        }
    }

    /// A candidate whose objectives are already known (e.g. loaded from disk).
    pub fn evaluated(id: usize, decisions: Decisions, objectives: Vec<f64>) -> Self {
        Self {
            id,
            decisions,
            objectives: Some(objectives),
        }
    }

    pub fn decisions(&self) -> &Decisions {
        &self.decisions
    }

    pub fn objectives(&self) -> Option<&[f64]> {
        self.objectives.as_deref()
    }

    /// Objectives or an [`Error::Unevaluated`].
    pub fn require_objectives(&self) -> Result<&[f64]> {
        self.objectives().ok_or(Error::Unevaluated(self.id))
    }

    pub fn eval_count_charged(&self) -> bool {
        self.objectives.is_some()
    }
}

/// Builds a pool of unevaluated candidates with ids `0..n`.
pub fn pool_from(decisions: Vec<Decisions>) -> Vec<Candidate> {
    decisions
        .into_iter()
        .enumerate()
        .map(|(id, d)| Candidate::new(id, d))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// `+1` for maximize, `-1` for minimize.
    pub fn weight(self) -> f64 {
        match self {
            Direction::Minimize => -1.0,
            Direction::Maximize => 1.0,
        }
    }

    /// Value re-oriented so that smaller is better.
    pub fn to_minimize(self, v: f64) -> f64 {
        match self {
            Direction::Minimize => v,
            Direction::Maximize => -v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub name: String,
    pub direction: Direction,
    bounds: Option<(f64, f64)>,
}

impl Objective {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        Self {
            name: name.into(),
            direction,
            bounds: None,
        }
    }

    pub fn minimize(name: impl Into<String>) -> Self {
        Self::new(name, Direction::Minimize)
    }

    pub fn maximize(name: impl Into<String>) -> Self {
        Self::new(name, Direction::Maximize)
    }

    pub fn weight(&self) -> f64 {
        self.direction.weight()
    }

    pub fn bounds(&self) -> Option<(f64, f64)> {
        self.bounds
    }
}

/// Per-objective direction and normalization bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    objectives: Vec<Objective>,
}

impl ObjectiveSpec {
    pub fn new(objectives: Vec<Objective>) -> Self {
        Self { objectives }
    }

    pub fn objectives(&self) -> &[Objective] {
        &self.objectives
    }

    pub fn len(&self) -> usize {
        self.objectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objectives.is_empty()
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.objectives.iter().map(|o| o.direction).collect()
    }

    pub fn is_calibrated(&self) -> bool {
        self.objectives.iter().all(|o| o.bounds.is_some())
    }

    /// Sets normalization bounds to the observed range of `points`.
    ///
    /// An objective that never varies keeps `lo == hi`; normalization maps it to 0.
    pub fn calibrate<'a>(&mut self, points: impl IntoIterator<Item = &'a [f64]>) -> Result<()> {
        let m = self.len();
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        let mut seen = 0usize;
        for p in points {
            self.check_len(p)?;
            for j in 0..m {
                lo[j] = lo[j].min(p[j]);
                hi[j] = hi[j].max(p[j]);
            }
            seen += 1;
        }
        if seen == 0 {
            return Err(Error::Normalization(
                "cannot calibrate bounds from zero points".into(),
            ));
        }
        for (o, (l, h)) in self.objectives.iter_mut().zip(lo.into_iter().zip(hi)) {
            o.bounds = Some((l, h));
        }
        Ok(())
    }

    pub fn set_bounds(&mut self, bounds: &[(f64, f64)]) -> Result<()> {
        if bounds.len() != self.len() {
            return Err(Error::structural(
                "bounds length does not match objective count",
            ));
        }
        for (o, &(l, h)) in self.objectives.iter_mut().zip(bounds) {
            if l > h {
                return Err(Error::Normalization(format!(
                    "{}: lower bound {l} above upper {h}",
                    o.name
                )));
            }
            o.bounds = Some((l, h));
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, o: &[f64]) -> Result<()> {
        if o.len() != self.len() {
            return Err(Error::structural(format!(
                "objective vector has {} entries, spec has {}",
                o.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// Rescales to `[0, 1]` and orients every objective as minimize.
    pub fn normalize(&self, o: &[f64]) -> Result<Vec<f64>> {
        self.check_len(o)?;
        self.objectives
            .iter()
            .zip(o)
            .map(|(obj, &v)| {
                let (lo, hi) = obj.bounds.ok_or_else(|| {
                    Error::config(format!(
                        "objective {} has no normalization bounds",
                        obj.name
                    ))
                })?;
                let scaled = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
                let oriented = match obj.direction {
                    Direction::Minimize => scaled,
                    Direction::Maximize if hi > lo => 1.0 - scaled,
                    Direction::Maximize => 0.0,
                };
                Ok(oriented.clamp(0.0, 1.0))
            })
            .collect()
    }

    /// Rescales to `[0, 1]` keeping each objective's direction.
    pub(crate) fn scale(&self, o: &[f64]) -> Result<Vec<f64>> {
        self.check_len(o)?;
        self.objectives
            .iter()
            .zip(o)
            .map(|(obj, &v)| {
                let (lo, hi) = obj.bounds.ok_or_else(|| {
                    Error::config(format!(
                        "objective {} has no normalization bounds",
                        obj.name
                    ))
                })?;
                Ok(if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            })
            .collect()
    }
}

/// Unit-scaled decisions of a continuous candidate. Fixed dimensions map to 0.
pub fn normalize_decisions(c: &Candidate, space: &DecisionSpace) -> Result<Vec<f64>> {
    if space.kind() != SpaceKind::Continuous {
        return Err(Error::structural(
            "normalize_decisions needs a continuous space",
        ));
    }
    let values = c
        .decisions()
        .as_real()
        .ok_or_else(|| Error::structural("candidate decisions are not real-valued"))?;
    if values.len() != space.len() {
        return Err(Error::structural(format!(
            "candidate has {} decisions, space {} has {}",
            values.len(),
            space.name(),
            space.len()
        )));
    }
    Ok(space
        .dims()
        .iter()
        .zip(values)
        .map(|(d, &v)| {
            if d.is_fixed() {
                0.0
            } else {
                (v - d.lower) / d.width()
            }
        })
        .collect())
}

/// A benchmark model: maps decisions to objectives, `o = model(d)`.
pub trait ProblemModel: Send + Sync {
    fn name(&self) -> &str;

    fn decision_space(&self) -> &DecisionSpace;

    fn objective_spec(&self) -> &ObjectiveSpec;

    /// Raw objective vector for already-validated decisions.
    fn compute(&self, decisions: &Decisions) -> Result<Vec<f64>>;

    /// Validity predicate; the default only checks conformance with the space.
    fn check_valid(&self, decisions: &Decisions) -> Result<()> {
        self.decision_space().conforms(decisions)
    }

    /// `count` valid decision vectors, deterministic in `seed`.
    fn generate(&self, count: usize, seed: u64) -> Result<Vec<Decisions>> {
        let mut rng = seed::rng(seed);
        Ok((0..count)
            .map(|_| self.decision_space().sample_uniform(&mut rng))
            .collect())
    }
}

/// Counts evaluations. Safe to share between threads.
#[derive(Debug, Default)]
pub struct EvaluationLedger {
    evaluations: AtomicU64,
    nanos: AtomicU64,
}

impl EvaluationLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::SeqCst)
    }

    /// Time spent inside model evaluations.
    pub fn wall_time(&self) -> Duration {
        Duration::from_nanos(self.nanos.load(Ordering::SeqCst))
    }

    fn charge(&self, elapsed: Duration) {
        self.evaluations.fetch_add(1, Ordering::SeqCst);
        self.nanos.fetch_add(
            elapsed.as_nanos().min(u64::MAX as u128) as u64,
            Ordering::SeqCst,
        );
    }
}

/// Populates `c`'s objectives, charging the ledger once. Already-evaluated
/// candidates are returned unchanged and cost nothing.
pub fn evaluate<'a>(
    model: &dyn ProblemModel,
    c: &'a mut Candidate,
    ledger: &EvaluationLedger,
) -> Result<&'a [f64]> {
    if c.objectives.is_none() {
        model.check_valid(&c.decisions)?;
        let start = Instant::now();
        let o = model.compute(&c.decisions)?;
        model.objective_spec().check_len(&o)?;
        ledger.charge(start.elapsed());
        c.objectives = Some(o);
    }
    Ok(c.objectives.as_deref().expect("objectives populated above"))
}
