//! COCOMO-style software process model with four objectives: risk, effort,
//! defects and calendar months.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::problem::{
    DecisionSpace, Decisions, DimensionSpec, Objective, ObjectiveSpec, ProblemModel,
};

const COCOMO_TOML: &str = include_str!("../../data/xomo/cocomo.toml");
const RISK_RULES_TOML: &str = include_str!("../../data/xomo/risk_rules.toml");

pub const BUILTIN_SCENARIOS: [(&str, &str); 4] = [
    ("flight", include_str!("../../data/xomo/flight.toml")),
    ("ground", include_str!("../../data/xomo/ground.toml")),
    ("osp", include_str!("../../data/xomo/osp.toml")),
    ("osp2", include_str!("../../data/xomo/osp2.toml")),
];

pub const KSLOC: &str = "ksloc";
const LEVELS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    /// Exponent terms; higher levels decrease effort.
    Scale,
    /// Multipliers that decrease effort as the level rises.
    Upper,
    /// Multipliers that increase effort as the level rises.
    Lower,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub defects_per_ksloc: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variable {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub block: Block,
    pub range: [f64; 2],
    pub effort: [f64; LEVELS],
    pub defects: [f64; LEVELS],
}

impl Variable {
    /// Linear interpolation between integer levels, clamped to the defined range.
    fn at(row: &[f64; LEVELS], range: [f64; 2], x: f64) -> f64 {
        let x = x.clamp(range[0], range[1]);
        let i = (x.floor() as usize).clamp(1, LEVELS);
        if i == LEVELS {
            return row[LEVELS - 1];
        }
        let frac = x - i as f64;
        row[i - 1] + frac * (row[i] - row[i - 1])
    }

    pub fn effort_at(&self, x: f64) -> f64 {
        Self::at(&self.effort, self.range, x)
    }

    pub fn defects_at(&self, x: f64) -> f64 {
        Self::at(&self.defects, self.range, x)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KslocDefaults {
    range: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CocomoFile {
    constants: Constants,
    ksloc: KslocDefaults,
    variables: Vec<Variable>,
}

/// Calibration constants and per-variable level tables.
#[derive(Clone, Debug, PartialEq)]
pub struct CocomoTable {
    pub constants: Constants,
    pub ksloc_range: [f64; 2],
    pub variables: Vec<Variable>,
}

impl CocomoTable {
    pub fn builtin() -> Self {
        Self::parse(COCOMO_TOML).expect("shipped COCOMO table is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: CocomoFile =
            toml::from_str(text).map_err(|e| Error::model(format!("COCOMO table: {e}")))?;
        let table = Self {
            constants: file.constants,
            ksloc_range: file.ksloc.range,
            variables: file.variables,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        let mut names = std::collections::HashSet::new();
        for v in &self.variables {
            for n in std::iter::once(&v.name).chain(&v.aliases) {
                if n == KSLOC || !names.insert(n.to_lowercase()) {
                    return Err(Error::model(format!(
                        "COCOMO table: duplicate variable name {n}"
                    )));
                }
            }
            let [lo, hi] = v.range;
            if !(1.0..=6.0).contains(&lo) || !(1.0..=6.0).contains(&hi) || lo > hi {
                return Err(Error::model(format!(
                    "{}: range [{lo}, {hi}] outside [1, 6]",
                    v.name
                )));
            }
            let rising = v.effort.windows(2).all(|w| w[1] >= w[0]);
            let falling = v.effort.windows(2).all(|w| w[1] <= w[0]);
            let ok = match v.block {
                Block::Scale | Block::Upper => falling,
                Block::Lower => rising,
            };
            if !ok {
                return Err(Error::model(format!(
                    "{}: effort row is not monotone in the direction its {:?} block requires",
                    v.name, v.block
                )));
            }
            if v.effort
                .iter()
                .chain(&v.defects)
                .any(|x| !x.is_finite() || *x < 0.0)
                || (v.block != Block::Scale && v.effort.contains(&0.0))
                || v.defects.contains(&0.0)
            {
                return Err(Error::model(format!(
                    "{}: multipliers must be positive",
                    v.name
                )));
            }
        }
        let [lo, hi] = self.ksloc_range;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::model("ksloc default range must be positive"));
        }
        Ok(())
    }

    /// Canonical index of `name` (case-insensitive, aliases accepted).
    pub fn index_of(&self, name: &str) -> Option<usize> {
        let name = name.to_lowercase();
        self.variables
            .iter()
            .position(|v| v.name == name || v.aliases.contains(&name))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    High,
    Low,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiskRule {
    /// (variable index in the COCOMO table, condition)
    pub antecedents: Vec<(usize, Condition)>,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiskRules {
    pub high: f64,
    pub low: f64,
    pub rules: Vec<RiskRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Thresholds {
    high: f64,
    low: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    when: Vec<(String, Condition)>,
    description: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RulesFile {
    thresholds: Thresholds,
    rules: Vec<RawRule>,
}

impl RiskRules {
    pub fn builtin(table: &CocomoTable) -> Self {
        Self::parse(RISK_RULES_TOML, table).expect("shipped risk rules are valid")
    }

    pub fn parse(text: &str, table: &CocomoTable) -> Result<Self> {
        let file: RulesFile =
            toml::from_str(text).map_err(|e| Error::model(format!("risk rules: {e}")))?;
        if file.rules.is_empty() {
            return Err(Error::model("risk rules: no rules"));
        }
        let rules = file
            .rules
            .into_iter()
            .map(|r| {
                if r.when.is_empty() {
                    return Err(Error::model(format!(
                        "risk rule {:?} has no antecedents",
                        r.description
                    )));
                }
                let antecedents = r
                    .when
                    .into_iter()
                    .map(|(name, cond)| {
                        table.index_of(&name).map(|i| (i, cond)).ok_or_else(|| {
                            Error::model(format!("risk rule uses unknown variable {name}"))
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(RiskRule {
                    antecedents,
                    description: r.description,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            high: file.thresholds.high,
            low: file.thresholds.low,
            rules,
        })
    }

    fn holds(&self, cond: Condition, x: f64) -> bool {
        match cond {
            Condition::High => x >= self.high,
            Condition::Low => x <= self.low,
        }
    }

    /// Indices of rules triggered by per-variable settings `x` (table order).
    pub fn triggered(&self, x: &[f64]) -> Vec<usize> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.antecedents.iter().all(|&(v, c)| self.holds(c, x[v])))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    ranges: BTreeMap<String, [f64; 2]>,
    #[serde(default)]
    values: BTreeMap<String, f64>,
}

/// Project-specific ranges and fixed values. Variables the scenario does not
/// mention take the table's default range.
#[derive(Clone, Debug, PartialEq)]
pub struct XomoScenario {
    pub name: String,
    pub description: String,
    /// Per table variable, then ksloc last: `(lower, upper)`.
    pub bounds: Vec<(f64, f64)>,
    /// Which entries of `bounds` the scenario set explicitly.
    pub listed: Vec<bool>,
}

impl XomoScenario {
    pub fn parse(text: &str, table: &CocomoTable) -> Result<Self> {
        let file: ScenarioFile =
            toml::from_str(text).map_err(|e| Error::model(format!("XOMO scenario: {e}")))?;
        let n = table.variables.len();
        let mut bounds: Vec<(f64, f64)> = table
            .variables
            .iter()
            .map(|v| (v.range[0], v.range[1]))
            .chain(std::iter::once((
                table.ksloc_range[0],
                table.ksloc_range[1],
            )))
            .collect();
        let mut listed = vec![false; n + 1];
        let entries = file
            .ranges
            .iter()
            .map(|(k, r)| (k, r[0], r[1]))
            .chain(file.values.iter().map(|(k, &v)| (k, v, v)));
        for (key, lo, hi) in entries {
            let idx = if key.eq_ignore_ascii_case(KSLOC) {
                n
            } else {
                table
                    .index_of(key)
                    .ok_or_else(|| Error::model(format!("{}: unknown variable {key}", file.name)))?
            };
            if listed[idx] {
                return Err(Error::model(format!(
                    "{}: variable {key} given twice",
                    file.name
                )));
            }
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::model(format!(
                    "{}: {key} range [{lo}, {hi}] is inverted",
                    file.name
                )));
            }
            if idx == n {
                if lo <= 0.0 {
                    return Err(Error::model(format!(
                        "{}: ksloc must be positive",
                        file.name
                    )));
                }
            } else if lo < 1.0 || hi > 6.0 {
                return Err(Error::model(format!(
                    "{}: {key} = [{lo}, {hi}] outside [1, 6]",
                    file.name
                )));
            }
            listed[idx] = true;
            bounds[idx] = (lo, hi);
        }
        Ok(Self {
            name: file.name,
            description: file.description,
            bounds,
            listed,
        })
    }

    pub fn builtin(name: &str, table: &CocomoTable) -> Result<Self> {
        let (_, text) = BUILTIN_SCENARIOS
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::model(format!("no built-in XOMO scenario named {name}")))?;
        Self::parse(text, table)
    }

    /// Natural log of the product of range widths over non-fixed variables.
    pub fn log_volume(&self) -> f64 {
        self.bounds
            .iter()
            .filter(|(lo, hi)| hi > lo)
            .map(|(lo, hi)| (hi - lo).ln())
            .sum()
    }

    pub fn ksloc_span(&self) -> f64 {
        let (lo, hi) = self.bounds[self.bounds.len() - 1];
        hi - lo
    }
}

/// XOMO as a [`ProblemModel`]. Decisions are the table variables in table
/// order followed by ksloc.
#[derive(Clone, Debug)]
pub struct XomoModel {
    name: String,
    table: CocomoTable,
    rules: RiskRules,
    scenario: XomoScenario,
    space: DecisionSpace,
    spec: ObjectiveSpec,
}

impl XomoModel {
    pub fn new(scenario: XomoScenario, table: CocomoTable, rules: RiskRules) -> Result<Self> {
        if scenario.bounds.len() != table.variables.len() + 1 {
            return Err(Error::model("scenario does not match the COCOMO table"));
        }
        let dims = table
            .variables
            .iter()
            .map(|v| v.name.clone())
            .chain(std::iter::once(KSLOC.to_string()))
            .zip(&scenario.bounds)
            .map(|(name, &(lo, hi))| {
                let d = DimensionSpec::new(name.clone(), lo, hi);
                if name == KSLOC {
                    d.with_units("thousand source lines")
                } else {
                    d.with_units("level")
                }
            })
            .collect();
        let space = DecisionSpace::continuous(scenario.name.clone(), dims)?;
        let spec = ObjectiveSpec::new(vec![
            Objective::minimize("risk"),
            Objective::minimize("effort"),
            Objective::minimize("defects"),
            Objective::minimize("months"),
        ]);
        Ok(Self {
            name: format!("xomo-{}", scenario.name.to_lowercase()),
            table,
            rules,
            scenario,
            space,
            spec,
        })
    }

    /// One of the shipped scenarios with the shipped tables.
    pub fn builtin(scenario: &str) -> Result<Self> {
        let table = CocomoTable::builtin();
        let rules = RiskRules::builtin(&table);
        let scenario = XomoScenario::builtin(scenario, &table)?;
        Self::new(scenario, table, rules)
    }

    /// A scenario file on disk with the shipped tables.
    pub fn from_file(path: &Path) -> Result<Self> {
        let table = CocomoTable::builtin();
        let rules = RiskRules::builtin(&table);
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        let scenario = XomoScenario::parse(&text, &table)?;
        Self::new(scenario, table, rules)
    }

    pub fn scenario(&self) -> &XomoScenario {
        &self.scenario
    }

    pub fn table(&self) -> &CocomoTable {
        &self.table
    }

    pub fn rules(&self) -> &RiskRules {
        &self.rules
    }

    /// `[risk %, effort person-months, defects, months]` for in-range settings.
    pub fn objectives_for(&self, x: &[f64]) -> [f64; 4] {
        let k = self.constants();
        let n = self.table.variables.len();
        let ksloc = x[n];
        let mut sf = 0.0;
        let mut em = 1.0;
        let mut dm = 1.0;
        for (v, &xi) in self.table.variables.iter().zip(x) {
            match v.block {
                Block::Scale => sf += v.effort_at(xi),
                Block::Upper | Block::Lower => em *= v.effort_at(xi),
            }
            dm *= v.defects_at(xi);
        }
        let e = k.b + 0.01 * sf;
        let effort = k.a * ksloc.powf(e) * em;
        let months = k.c * effort.powf(k.d + 0.2 * (e - k.b));
        let defects = k.defects_per_ksloc * ksloc * dm;
        let risk =
            100.0 * self.rules.triggered(&x[..n]).len() as f64 / self.rules.rules.len() as f64;
        [risk, effort, defects, months]
    }

    fn constants(&self) -> &Constants {
        &self.table.constants
    }
}

impl ProblemModel for XomoModel {
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
            .ok_or_else(|| Error::structural("XOMO decisions must be real-valued"))?;
        Ok(self.objectives_for(x).to_vec())
    }
}
