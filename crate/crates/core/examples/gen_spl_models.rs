//! Regenerates the synthetic product-line models under `data/spl`.

use std::fs;
use std::path::Path;

use sway_core::models::fmgen::{generate_feature_model, FeatureModelSpec};
use sway_core::models::spl::SYNTHETIC_MODELS;
use sway_core::satgen::to_dimacs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/spl");
    for &(name, features, clauses, seed) in SYNTHETIC_MODELS.iter() {
        let cnf = generate_feature_model(&FeatureModelSpec::new(name, features, clauses, seed))?;
        let path = dir.join(format!("{name}.dimacs"));
        fs::write(&path, to_dimacs(&cnf))?;
        println!(
            "{} ({features} features, {clauses} clauses)",
            path.display()
        );
    }
    Ok(())
}
