//! Agile requirements-engineering simulation with three objectives:
//! completion rate, idle rate and total cost.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::problem::{
    DecisionSpace, Decisions, DimensionSpec, Objective, ObjectiveSpec, ProblemModel,
};
use crate::seed;

pub const BUILTIN_SCENARIOS: [(&str, &str); 3] = [
    ("pom3a", include_str!("../../data/pom3/pom3a.toml")),
    ("pom3b", include_str!("../../data/pom3/pom3b.toml")),
    ("pom3c", include_str!("../../data/pom3/pom3c.toml")),
];

/// Decision names in decision-vector order.
pub const DECISIONS: [&str; 9] = [
    "culture",
    "criticality",
    "criticality_modifier",
    "initial_known",
    "interdependency",
    "dynamism",
    "size",
    "plan",
    "team_size",
];

const CULTURE: usize = 0;
const CRITICALITY: usize = 1;
const CRIT_MOD: usize = 2;
const INITIAL_KNOWN: usize = 3;
const INTERDEPENDENCY: usize = 4;
const DYNAMISM: usize = 5;
const SIZE: usize = 6;
const PLAN: usize = 7;
const TEAM_SIZE: usize = 8;

/// Every constant the simulation uses that the decisions do not set.
/// None of these are calibrated against real projects.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pom3Constants {
    /// Requirements generated per unit of the `size` decision.
    pub requirements_per_size: f64,
    pub min_requirements: usize,
    pub max_requirements: usize,
    pub max_children: usize,
    pub cost_range: [u32; 2],
    pub value_range: [u32; 2],
    pub requirements_per_team: usize,
    pub salary_tiers: Vec<f64>,
    pub hours_per_person: f64,
    pub max_sprints: usize,
    /// Multiplicative change range applied to a changing requirement.
    pub change_factor: [f64; 2],
    /// `dynamism` at which every hidden requirement surfaces in one sprint.
    pub full_reveal_dynamism: f64,
    /// Cancellation probability after sprint `s` is `min(s * cancel_per_sprint, cancel_cap)`.
    pub cancel_per_sprint: f64,
    pub cancel_cap: f64,
}

impl Default for Pom3Constants {
    fn default() -> Self {
        Self {
            requirements_per_size: 2.5,
            min_requirements: 30,
            max_requirements: 500,
            max_children: 4,
            cost_range: [1, 100],
            value_range: [1, 100],
            requirements_per_team: 20,
            salary_tiers: vec![1.0, 1.5, 2.0],
            hours_per_person: 8.0,
            max_sprints: 20,
            change_factor: [0.8, 1.2],
            full_reveal_dynamism: 50.0,
            cancel_per_sprint: 0.02,
            cancel_cap: 0.5,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    description: String,
    ranges: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    units: BTreeMap<String, String>,
    #[serde(default)]
    constants: Option<Pom3Constants>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pom3Scenario {
    pub name: String,
    pub description: String,
    /// `(lower, upper)` per entry of [`DECISIONS`], in file units.
    pub ranges: Vec<(f64, f64)>,
    /// Divisor turning file units into fractions (100 for percent).
    pub scale: Vec<f64>,
    pub constants: Pom3Constants,
}

impl Pom3Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::model(format!("POM3 scenario: {e}")))?;
        for key in file.ranges.keys().chain(file.units.keys()) {
            if !DECISIONS.contains(&key.as_str()) {
                return Err(Error::model(format!(
                    "{}: unknown decision {key}",
                    file.name
                )));
            }
        }
        let mut ranges = Vec::with_capacity(DECISIONS.len());
        let mut scale = Vec::with_capacity(DECISIONS.len());
        for name in DECISIONS {
            let [lo, hi] = *file
                .ranges
                .get(name)
                .ok_or_else(|| Error::model(format!("{}: missing range for {name}", file.name)))?;
            if lo.is_nan() || hi.is_nan() || lo > hi || lo < 0.0 {
                return Err(Error::model(format!(
                    "{}: bad range [{lo}, {hi}] for {name}",
                    file.name
                )));
            }
            let s = match file.units.get(name).map(String::as_str) {
                None | Some("fraction") => 1.0,
                Some("percent") => 100.0,
                Some(u) => {
                    return Err(Error::model(format!(
                        "{}: unknown unit {u:?} for {name}",
                        file.name
                    )))
                }
            };
            ranges.push((lo, hi));
            scale.push(s);
        }
        let scenario = Self {
            name: file.name,
            description: file.description,
            ranges,
            scale,
            constants: file.constants.unwrap_or_default(),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<()> {
        let frac = |i: usize| {
            (
                self.ranges[i].0 / self.scale[i],
                self.ranges[i].1 / self.scale[i],
            )
        };
        for i in [CULTURE, CRIT_MOD, INITIAL_KNOWN, INTERDEPENDENCY] {
            let (lo, hi) = frac(i);
            if hi > 1.0 || lo < 0.0 {
                return Err(Error::model(format!(
                    "{}: {} must be a fraction",
                    self.name, DECISIONS[i]
                )));
            }
        }
        if self.ranges[PLAN].1 > 4.0 {
            return Err(Error::model(format!(
                "{}: plan must lie in [0, 4]",
                self.name
            )));
        }
        if self.ranges[TEAM_SIZE].0 < 1.0
            || self.ranges[SIZE].0 < 1.0
            || self.ranges[CRITICALITY].0 <= 0.0
        {
            return Err(Error::model(format!(
                "{}: size, team size and criticality must be positive",
                self.name
            )));
        }
        let c = &self.constants;
        if c.salary_tiers.is_empty()
            || c.max_sprints == 0
            || c.requirements_per_team == 0
            || c.max_children == 0
        {
            return Err(Error::model(format!(
                "{}: degenerate simulation constants",
                self.name
            )));
        }
        Ok(())
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let (_, text) = BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::model(format!("no built-in POM3 scenario named {name}")))?;
        Self::parse(text)
    }
}

struct Requirement {
    cost: f64,
    value: f64,
    progress: f64,
    team: usize,
    visible: bool,
    done: bool,
    /// Has been visible and unblocked at some sprint start.
    ready: bool,
    /// Prerequisites still open.
    blocked_by: u32,
    /// Requirements that list this one as a prerequisite.
    dependents: Vec<u32>,
}

/// Decision values after unit conversion and rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pom3Settings {
    pub culture: f64,
    pub criticality: f64,
    pub criticality_modifier: f64,
    pub initial_known: f64,
    pub interdependency: f64,
    pub dynamism: f64,
    pub size: usize,
    pub plan: u8,
    pub team_size: usize,
}

#[derive(Clone, Debug)]
pub struct Pom3Model {
    name: String,
    scenario: Pom3Scenario,
    model_seed: u64,
    space: DecisionSpace,
    spec: ObjectiveSpec,
}

impl Pom3Model {
    pub fn new(scenario: Pom3Scenario, model_seed: u64) -> Result<Self> {
        let dims = DECISIONS
            .iter()
            .zip(&scenario.ranges)
            .zip(&scenario.scale)
            .map(|((name, &(lo, hi)), &s)| {
                let d = DimensionSpec::new(*name, lo, hi);
                if s == 100.0 {
                    d.with_units("percent")
                } else {
                    d
                }
            })
            .collect();
        let space = DecisionSpace::continuous(scenario.name.clone(), dims)?;
        let spec = ObjectiveSpec::new(vec![
            Objective::maximize("completion"),
            Objective::minimize("idle"),
            Objective::minimize("cost"),
        ]);
        Ok(Self {
            name: scenario.name.to_lowercase(),
            scenario,
            model_seed,
            space,
            spec,
        })
    }

    pub fn builtin(name: &str, model_seed: u64) -> Result<Self> {
        Self::new(Pom3Scenario::builtin(name)?, model_seed)
    }

    pub fn from_file(path: &Path, model_seed: u64) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::new(Pom3Scenario::parse(&text)?, model_seed)
    }

    pub fn scenario(&self) -> &Pom3Scenario {
        &self.scenario
    }

    pub fn settings(&self, x: &[f64]) -> Pom3Settings {
        let s = &self.scenario.scale;
        Pom3Settings {
            culture: x[CULTURE] / s[CULTURE],
            criticality: x[CRITICALITY] / s[CRITICALITY],
            criticality_modifier: x[CRIT_MOD] / s[CRIT_MOD],
            initial_known: x[INITIAL_KNOWN] / s[INITIAL_KNOWN],
            interdependency: x[INTERDEPENDENCY] / s[INTERDEPENDENCY],
            dynamism: x[DYNAMISM] / s[DYNAMISM],
            size: (x[SIZE] / s[SIZE]).round().max(1.0) as usize,
            plan: (x[PLAN] / s[PLAN]).round().clamp(0.0, 4.0) as u8,
            team_size: (x[TEAM_SIZE] / s[TEAM_SIZE]).round().max(1.0) as usize,
        }
    }

    /// Runs the simulation; randomness is keyed on the decisions and the model seed.
    pub fn simulate(&self, x: &[f64]) -> [f64; 3] {
        let key = seed::hash_words(self.model_seed, x.iter().map(|v| v.to_bits()));
        simulate(
            &self.settings(x),
            &self.scenario.constants,
            &mut seed::rng(key),
        )
    }
}

fn priority(plan: u8, r: &Requirement) -> f64 {
    match plan {
        0 => r.cost,
        1 => -r.cost,
        2 => r.value,
        3 => -r.value,
        _ => r.cost / r.value,
    }
}

fn build_heap<R: Rng>(
    s: &Pom3Settings,
    k: &Pom3Constants,
    rng: &mut R,
) -> (Vec<Requirement>, usize) {
    let count = ((k.requirements_per_size * s.size as f64).round() as usize).clamp(
        k.min_requirements,
        k.max_requirements.max(k.min_requirements),
    );
    let roots = s.size.clamp(1, count);
    let teams = count.div_ceil(k.requirements_per_team);
    let mut reqs: Vec<Requirement> = (0..count)
        .map(|_| Requirement {
            cost: rng.gen_range(k.cost_range[0]..=k.cost_range[1]) as f64,
            value: rng.gen_range(k.value_range[0]..=k.value_range[1]) as f64,
            progress: 0.0,
            team: rng.gen_range(0..teams),
            visible: rng.gen_bool(s.initial_known.clamp(0.0, 1.0)),
            done: false,
            ready: false,
            blocked_by: 0,
            dependents: Vec::new(),
        })
        .collect();

    // Tree: every non-root attaches below an earlier requirement with a free
    // child slot, so prerequisites always have larger indices.
    let mut open: Vec<usize> = (0..roots).collect();
    let mut children = vec![0usize; count];
    for child in roots..count {
        let slot = rng.gen_range(0..open.len());
        let parent = open[slot];
        children[parent] += 1;
        if children[parent] >= k.max_children {
            open.swap_remove(slot);
        }
        open.push(child);
        reqs[parent].blocked_by += 1;
        reqs[child].dependents.push(parent as u32);
    }

    // Cross-team dependencies, again pointing at larger indices.
    if teams > 1 {
        for i in 0..count.saturating_sub(1) {
            if !rng.gen_bool(s.interdependency.clamp(0.0, 1.0)) {
                continue;
            }
            let j = rng.gen_range(i + 1..count);
            if reqs[j].team != reqs[i].team {
                reqs[i].blocked_by += 1;
                reqs[j].dependents.push(i as u32);
            }
        }
    }
    (reqs, teams)
}

fn simulate<R: Rng>(s: &Pom3Settings, k: &Pom3Constants, rng: &mut R) -> [f64; 3] {
    let (mut reqs, teams) = build_heap(s, k, rng);
    let total = reqs.len();
    let salary: Vec<f64> = (0..teams)
        .map(|_| k.salary_tiers[rng.gen_range(0..k.salary_tiers.len())])
        .collect();
    let crit_mult = s.criticality.powf(s.criticality_modifier * teams as f64);
    let capacity = s.team_size as f64 * k.hours_per_person;
    let reveal = (s.dynamism / k.full_reveal_dynamism).clamp(0.0, 1.0);

    let mut done = 0usize;
    let mut ready = 0usize;
    let mut cost = 0.0;
    let mut by_team: Vec<Vec<usize>> = vec![Vec::new(); teams];
    let mut finished: Vec<usize> = Vec::new();

    for sprint in 1..=k.max_sprints {
        for list in by_team.iter_mut() {
            list.clear();
        }
        for (i, r) in reqs.iter_mut().enumerate() {
            if r.visible && !r.done && r.blocked_by == 0 {
                by_team[r.team].push(i);
                if !r.ready {
                    r.ready = true;
                    ready += 1;
                }
            }
        }
        for (t, backlog) in by_team.iter_mut().enumerate() {
            backlog.sort_by(|&a, &b| {
                priority(s.plan, &reqs[a])
                    .total_cmp(&priority(s.plan, &reqs[b]))
                    .then(a.cmp(&b))
            });
            let mut left = capacity;
            for &i in backlog.iter() {
                if left <= 0.0 {
                    break;
                }
                let r = &mut reqs[i];
                let need = r.cost - r.progress;
                let spend = need.min(left);
                r.progress += spend;
                left -= spend;
                cost += spend * salary[t] * crit_mult;
                if r.progress >= r.cost {
                    r.done = true;
                    finished.push(i);
                }
            }
        }
        // Completed work unblocks its dependents for the next sprint.
        for i in finished.drain(..) {
            done += 1;
            for d in std::mem::take(&mut reqs[i].dependents) {
                reqs[d as usize].blocked_by -= 1;
            }
        }
        if done == total {
            break;
        }
        for r in reqs.iter_mut().filter(|r| !r.done) {
            if r.visible {
                if rng.gen_bool(s.culture.clamp(0.0, 1.0)) {
                    let f = rng.gen_range(k.change_factor[0]..=k.change_factor[1]);
                    r.cost = (r.cost * f).max(r.progress.max(1.0));
                    r.value *= rng.gen_range(k.change_factor[0]..=k.change_factor[1]);
                }
            } else if rng.gen_bool(reveal) {
                r.visible = true;
            }
        }
        let cancel = (k.cancel_per_sprint * sprint as f64).min(k.cancel_cap);
        if rng.gen_bool(cancel.clamp(0.0, 1.0)) {
            break;
        }
    }
    // Work that was ready to start but never finished.
    let idle_rate = if ready > 0 {
        1.0 - done as f64 / ready as f64
    } else {
        0.0
    };
    [done as f64 / total as f64, idle_rate, cost]
}

impl ProblemModel for Pom3Model {
    fn name(&self) -> &str {
        &self.name
    }

    fn decision_space(&self) -> &DecisionSpace {
        &self.space
    }

    fn objective_spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    fn compute(&self, decisions: &Decisions) -> Result<Vec<f64>> {
        let x = decisions
            .as_real()
            .ok_or_else(|| Error::structural("POM3 decisions must be real-valued"))?;
        Ok(self.simulate(x).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_scenarios_match_their_tables() {
        let b = Pom3Scenario::builtin("POM3b").unwrap();
        assert_eq!(b.ranges[SIZE], (3.0, 30.0));
        assert_eq!(b.ranges[CRIT_MOD], (0.80, 0.95));
        let c = Pom3Scenario::builtin("pom3c").unwrap();
        assert_eq!(c.ranges[INTERDEPENDENCY], (0.0, 50.0));
        assert_eq!(c.scale[INTERDEPENDENCY], 100.0);
    }

    #[test]
    fn percent_units_are_converted() {
        let m = Pom3Model::builtin("pom3c", 0).unwrap();
        let mut x: Vec<f64> = m.decision_space().dims().iter().map(|d| d.lower).collect();
        x[INTERDEPENDENCY] = 50.0;
        assert_eq!(m.settings(&x).interdependency, 0.5);
    }

    #[test]
    fn objectives_in_range_and_deterministic() {
        let m = Pom3Model::builtin("pom3a", 3).unwrap();
        let mut rng = seed::rng(1);
        for _ in 0..200 {
            let d = m.decision_space().sample_uniform(&mut rng);
            let a = m.compute(&d).unwrap();
            let b = m.compute(&d).unwrap();
            assert_eq!(a, b);
            assert!((0.0..=1.0).contains(&a[0]));
            assert!((0.0..=1.0).contains(&a[1]));
            assert!(a[2] >= 0.0 && a[2].is_finite());
        }
    }

    #[test]
    fn model_seed_changes_outcomes() {
        let a = Pom3Model::builtin("pom3a", 1).unwrap();
        let b = Pom3Model::builtin("pom3a", 2).unwrap();
        let d = a.decision_space().sample_uniform(&mut seed::rng(0));
        assert_ne!(a.compute(&d).unwrap(), b.compute(&d).unwrap());
    }

    #[test]
    fn bad_scenarios_are_rejected() {
        assert!(Pom3Scenario::parse("name = \"x\"\n[ranges]\nculture = [0, 1]\n").is_err());
        let text = BUILTIN_SCENARIOS[0]
            .1
            .replace("culture = [0.10, 0.90]", "culture = [0.10, 1.90]");
        assert!(Pom3Scenario::parse(&text).is_err());
        let text = format!("{}\n[units]\nsize = \"furlongs\"\n", BUILTIN_SCENARIOS[0].1);
        assert!(Pom3Scenario::parse(&text).is_err());
    }
}
