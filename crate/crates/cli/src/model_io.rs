//! Trained models as JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use anyhow::{Context, Result};
use trienhance_core::TrainedModel;

pub fn save_model(path: &Path, model: &TrainedModel) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    serde_json::to_writer(BufWriter::new(f), model)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    serde_json::from_reader(BufReader::new(f)).with_context(|| format!("{} is not a saved model", path.display()))
}
