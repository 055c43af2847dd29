//! Benchmark problem models and a registry of the built-in instances.

pub mod fmgen;
pub mod pom3;
pub mod spl;
pub mod xomo;

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemModel;

pub use fmgen::{generate_feature_model, FeatureModelSpec};
pub use pom3::{Pom3Model, Pom3Scenario};
pub use spl::{generate_attributes, spl_evaluate, spl_valid, FeatureAttributes, SplModel};
pub use xomo::{XomoModel, XomoScenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Xomo,
    Pom3,
    Spl,
}

impl ModelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::Xomo => "xomo",
            ModelFamily::Pom3 => "pom3",
            ModelFamily::Spl => "spl",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelInfo {
    pub name: &'static str,
    pub family: ModelFamily,
    pub description: &'static str,
}

/// Every built-in scenario, in listing order.
pub fn builtin_models() -> Vec<ModelInfo> {
    let mut out = Vec::new();
    for (name, _) in xomo::BUILTIN_SCENARIOS {
        out.push(ModelInfo {
            name,
            family: ModelFamily::Xomo,
            description: "COCOMO-style effort, months, defects and risk",
        });
    }
    for (name, _) in pom3::BUILTIN_SCENARIOS {
        out.push(ModelInfo {
            name,
            family: ModelFamily::Pom3,
            description: "agile requirements prioritization simulation",
        });
    }
    for (name, _) in spl::BUILTIN_MODELS {
        out.push(ModelInfo {
            name,
            family: ModelFamily::Spl,
            description: "product-line configuration over a CNF feature model",
        });
    }
    out
}

pub fn family_of(name: &str) -> Option<ModelFamily> {
    builtin_models()
        .into_iter()
        .find(|m| m.name.eq_ignore_ascii_case(name))
        .map(|m| m.family)
}

/// Built-in model by scenario name. `model_seed` fixes the stochastic parts
/// (POM3 requirement heaps, product-line feature attributes).
pub fn load_builtin(name: &str, model_seed: u64) -> Result<Arc<dyn ProblemModel>> {
    match family_of(name) {
        Some(ModelFamily::Xomo) => Ok(Arc::new(XomoModel::builtin(name)?)),
        Some(ModelFamily::Pom3) => Ok(Arc::new(Pom3Model::builtin(name, model_seed)?)),
        Some(ModelFamily::Spl) => Ok(Arc::new(SplModel::builtin(name, model_seed)?)),
        None => Err(Error::model(format!("unknown model {name}"))),
    }
}

/// Model from a scenario file of the given family.
pub fn load_file(
    family: ModelFamily,
    path: &Path,
    model_seed: u64,
) -> Result<Arc<dyn ProblemModel>> {
    Ok(match family {
        ModelFamily::Xomo => Arc::new(XomoModel::from_file(path)?),
        ModelFamily::Pom3 => Arc::new(Pom3Model::from_file(path, model_seed)?),
        ModelFamily::Spl => Arc::new(SplModel::from_file(path, model_seed)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_loads() {
        for m in builtin_models() {
            let model = load_builtin(m.name, 1).unwrap();
            assert!(model.name().contains(m.name), "{}", model.name());
        }
        assert!(load_builtin("nope", 0).is_err());
    }
}
