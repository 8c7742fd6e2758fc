//! Canonical on-disk form of a [`Dataset`]: one JSON-lines file per entity
//! type inside a directory.

use std::path::Path;

use super::{Dataset, HourlyReading, SocioProfile};
use crate::error::Result;
use crate::io;

pub const READINGS_FILE: &str = "readings.jsonl";
pub const SOCIO_FILE: &str = "socio.jsonl";

pub fn write_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    io::write_jsonl(&dir.join(READINGS_FILE), &dataset.readings)?;
    io::write_jsonl(&dir.join(SOCIO_FILE), &dataset.socio)
}

/// Reads a dataset written by [`write_dataset`]. A missing socio file
/// yields an empty socio collection.
pub fn read_dataset(dir: &Path) -> Result<Dataset> {
    let readings: Vec<HourlyReading> = io::read_jsonl(&dir.join(READINGS_FILE))?;
    let socio_path = dir.join(SOCIO_FILE);
    let socio: Vec<SocioProfile> = if socio_path.exists() {
        io::read_jsonl(&socio_path)?
    } else {
        Vec::new()
    };
    Dataset::new(readings, socio)
}
