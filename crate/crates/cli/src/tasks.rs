//! Turns jobs into tables and writes them.

use std::path::{Path, PathBuf};

use rdpce::analysis::{run_experiment, run_sweep, runtime_ratio, ErrorSeries, ReferenceSolution};
use rdpce::chaos::{build_tensors, LegendreBasis};
use rdpce::det::det_solve;
use rdpce::models::ModelSpec;
use rdpce::solvers::{Silent, SolverOptions};
use serde_json::{json, Map, Value};

use crate::output::{emit_csv, Table};
use crate::Failure;
use crate::presets::{Job, JobKind, Scale};

/// A finished job ready to be written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub file: String,
    pub table: Table,
    pub meta: Value,
}

type Result<T> = std::result::Result<T, Failure>;

fn io_error(e: std::io::Error) -> Failure {
    Failure::Io(e)
}

fn series_meta(reference: &ReferenceSolution, series: &[ErrorSeries]) -> Value {
    let curves: Map<String, Value> = series
        .iter()
        .map(|s| (s.label.clone(), json!(s.meta)))
        .collect();
    json!({ "reference": reference.provenance(), "curves": curves })
}

/// Runs one job with the given solver options.
pub fn run_job(job: &Job, scale: Scale, options: &SolverOptions) -> Result<Outcome> {
    let (table, mut meta) = match &job.kind {
        JobKind::Errors { experiment, methods } => {
            let exp = rdpce::analysis::Experiment {
                options: *options,
                ..experiment.clone()
            };
            let (reference, series) = run_experiment(&exp, methods)?;
            let table = Table::from_series("t", &series).map_err(io_error)?;
            (table, series_meta(&reference, &series))
        }
        JobKind::Sweep {
            experiment,
            curves,
            steps,
        } => {
            let exp = rdpce::analysis::Experiment {
                options: *options,
                ..experiment.clone()
            };
            let (reference, series) = run_sweep(&exp, curves, steps)?;
            let table = Table::from_series("M", &series).map_err(io_error)?;
            let mut meta = series_meta(&reference, &series);
            meta["final_time"] = json!(exp.time.final_time());
            (table, meta)
        }
        JobKind::Runtime {
            scheme,
            equations,
            degrees,
            repeats,
            grid,
            time,
        } => {
            let mut header = vec!["N".to_string()];
            let mut columns = Vec::new();
            let mut operations = Map::new();
            for (name, spec) in equations {
                let samples = runtime_ratio(spec, *scheme, *grid, degrees, *repeats, *time, options)?;
                header.push(name.clone());
                operations.insert(
                    name.clone(),
                    json!(samples.iter().map(|s| s.operations).collect::<Vec<_>>()),
                );
                columns.push(samples.into_iter().map(|s| s.ratio).collect::<Vec<_>>());
            }
            let rows = degrees
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    let mut row = vec![Some(n as f64)];
                    row.extend(columns.iter().map(|c| Some(c[i])));
                    row
                })
                .collect();
            let meta = json!({
                "scheme": scheme.id(),
                "p": grid.points(),
                "T": time.final_time(),
                "M": time.steps(),
                "repeats": repeats,
                "operations_per_point": operations,
                "deterministic": false,
            });
            (Table { header, rows }, meta)
        }
        JobKind::Field {
            spec,
            scheme,
            xi,
            grid,
            time,
        } => {
            let state = det_solve(*scheme, spec, *xi, *grid, *time, options, &mut Silent)?;
            let nodes = grid.nodes();
            let p = grid.points();
            let mut header: Vec<String> = if grid.dim() == 2 { vec!["x".into(), "y".into()] } else { vec!["x".into()] };
            header.extend(["u", "v"].iter().take(spec.species()).map(|s| s.to_string()));
            let rows = (0..grid.len())
                .map(|i| {
                    let mut row = if grid.dim() == 2 {
                        vec![Some(nodes[i / p]), Some(nodes[i % p])]
                    } else {
                        vec![Some(nodes[i])]
                    };
                    row.extend((0..spec.species()).map(|s| Some(state.field(s)[i])));
                    row
                })
                .collect();
            let meta = json!({
                "scheme": scheme.id(),
                "xi": xi,
                "p": p,
                "dim": grid.dim(),
                "T": time.final_time(),
                "M": time.steps(),
            });
            (Table { header, rows }, meta)
        }
    };
    meta["preset"] = json!(job.preset);
    meta["scale"] = scale.describe();
    meta["dealias"] = json!(options.dealias.id());
    meta["contour_points"] = json!(options.contour_points);
    Ok(Outcome {
        file: job.file.clone(),
        table,
        meta,
    })
}

pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<PathBuf> {
    emit_csv(dir, &outcome.file, &outcome.table, outcome.meta.clone()).map_err(io_error)
}

/// Writes `K2`, `K3` and `K4` of the degree-`degree` basis on the model
/// interval as `i,j,k,eta,value` CSV files.
pub fn dump_tensors(dir: &Path, spec: &ModelSpec, degree: usize) -> Result<Vec<PathBuf>> {
    let tensors = build_tensors(LegendreBasis::new(spec.lower, spec.upper, degree)?);
    std::fs::create_dir_all(dir).map_err(io_error)?;
    [("k2", &tensors.k2), ("k3", &tensors.k3), ("k4", &tensors.k4)]
        .into_iter()
        .map(|(name, tensor)| {
            let path = dir.join(format!("tensor_{name}_N={degree}.csv"));
            let mut bytes = Vec::new();
            tensor.write_csv(&mut bytes).map_err(io_error)?;
            std::fs::write(&path, bytes).map_err(io_error)?;
            Ok(path)
        })
        .collect()
}
