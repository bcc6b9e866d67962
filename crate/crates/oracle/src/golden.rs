//! Golden prox records: one JSON object per line holding the instance and
//! the oracle's certified solution.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{oracle_prox, random_instance, OracleConfig, OracleError, ProxInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    #[serde(flatten)]
    pub instance: ProxInstance,
    pub x: Vec<f64>,
    pub gap: f64,
    pub oracle_iterations: usize,
}

/// Solves instance `seed` with the oracle and packages the certified result.
pub fn golden_record(
    seed: u64,
    max_p: usize,
    max_g: usize,
    config: &OracleConfig,
) -> Result<GoldenRecord, OracleError> {
    let instance = random_instance(seed, max_p, max_g);
    let sol = oracle_prox(
        &instance.v,
        &instance.group_structure(),
        &instance.params(),
        config,
    )?;
    Ok(GoldenRecord {
        instance,
        x: sol.x,
        gap: sol.gap,
        oracle_iterations: sol.iterations,
    })
}

pub fn write_jsonl(path: &Path, records: &[GoldenRecord]) -> std::io::Result<()> {
    let mut f = fs::File::create(path)?;
    for r in records {
        serde_json::to_writer(&mut f, r)?;
        f.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(path: &Path) -> std::io::Result<Vec<GoldenRecord>> {
    let f = fs::File::open(path)?;
    let mut out = Vec::new();
    for line in BufReader::new(f).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
