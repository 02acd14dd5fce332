//! Benchmark mode: every model under every combination of simplex variant,
//! start basis and epsilon, one CSV row per run.

use std::io;
use std::path::Path;

use exactreach_core::{Objective, Variant};
use serde::Serialize;

use crate::format::{parse_model, Model};
use crate::pipeline::{run, RunOptions, StartBasis};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub objective: Objective,
    pub target: String,
    pub variants: Vec<Variant>,
    pub bases: Vec<StartBasis>,
    pub epsilons: Vec<f64>,
    pub repair_apt: bool,
}

/// A row of the report. Fields are empty when the model could not be run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub model: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub variant: Option<String>,
    pub start_basis: Option<String>,
    pub epsilon: Option<f64>,
    pub status: String,
    pub pivots: Option<usize>,
    pub value_iteration_s: Option<f64>,
    pub lp_construction_s: Option<f64>,
    pub simplex_s: Option<f64>,
    pub total_s: Option<f64>,
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(model: &str, error: String) -> Self {
        BenchRow {
            model: model.to_string(),
            n: None,
            m: None,
            variant: None,
            start_basis: None,
            epsilon: None,
            status: "error".into(),
            pivots: None,
            value_iteration_s: None,
            lp_construction_s: None,
            simplex_s: None,
            total_s: None,
            error: Some(error),
        }
    }
}

/// Reads every `*.mdp` file of `dir`, sorted by file name. Parse failures
/// are kept as messages so the benchmark can report them.
pub fn load_models(dir: &Path) -> io::Result<Vec<(String, Result<Model, String>)>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "mdp") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|path| {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let model = std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|text| parse_model(&text).map_err(|e| e.to_string()));
            (name, model)
        })
        .collect())
}

pub fn benchmark(models: &[(String, Result<Model, String>)], config: &BenchConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for (name, model) in models {
        let model = match model {
            Ok(m) => m,
            Err(e) => {
                rows.push(BenchRow::failed(name, e.clone()));
                continue;
            }
        };
        for &epsilon in &config.epsilons {
            for &variant in &config.variants {
                for &basis in &config.bases {
                    let options = RunOptions {
                        epsilon,
                        variant,
                        start_basis: basis,
                        repair_apt: config.repair_apt,
                        ..RunOptions::default()
                    };
                    let row = match run(model, config.objective, &config.target, &options) {
                        Ok(r) => BenchRow {
                            model: name.clone(),
                            n: Some(r.lp_size.0),
                            m: Some(r.lp_size.1),
                            variant: Some(variant.to_string()),
                            start_basis: Some(basis.to_string()),
                            epsilon: Some(epsilon),
                            status: r.status.to_string(),
                            pivots: Some(r.pivots),
                            value_iteration_s: Some(r.timings.value_iteration_s),
                            lp_construction_s: Some(r.timings.lp_construction_s),
                            simplex_s: Some(r.timings.simplex_s),
                            total_s: Some(r.timings.total_s),
                            error: r.message,
                        },
                        Err(e) => BenchRow {
                            variant: Some(variant.to_string()),
                            start_basis: Some(basis.to_string()),
                            epsilon: Some(epsilon),
                            ..BenchRow::failed(name, e.to_string())
                        },
                    };
                    rows.push(row);
                }
            }
        }
    }
    rows
}

const HEADER: [&str; 13] = [
    "model",
    "n",
    "m",
    "variant",
    "start_basis",
    "epsilon",
    "status",
    "pivots",
    "value_iteration_s",
    "lp_construction_s",
    "simplex_s",
    "total_s",
    "error",
];

pub fn write_csv<W: io::Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    // written by hand so an empty report still has a header
    writer.write_record(HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
