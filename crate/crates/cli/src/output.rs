//! Report files: `report.json`, `timings.json`, `decay.csv`, `defect.csv`
//! and one `zeroset_<n>.csv` per extracted zero set.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::pipeline::PipelineReport;

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::Csv(path.to_path_buf(), e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Writes every artifact of `report` into `dir`; returns the written paths.
pub fn write_outputs(report: &PipelineReport, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let mut written = Vec::new();

    let path = dir.join("report.json");
    write_json(&path, report)?;
    written.push(path);

    let path = dir.join("timings.json");
    write_json(&path, &report.timings)?;
    written.push(path);

    if let Some(decay) = &report.decay {
        let path = dir.join("decay.csv");
        let mut w = csv_writer(&path)?;
        let err = |e| CliError::Csv(path.clone(), e);
        w.write_record(["n", "sup_dist_sigma_to_p", "sup_dist_image_to_q", "sample_size"])
            .map_err(err)?;
        for r in &decay.rows {
            w.write_record([
                r.n.to_string(),
                opt(r.sup_dist_sigma_to_p),
                opt(r.sup_dist_image_to_q),
                r.sample_size.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Io(path.clone(), e))?;
        written.push(path);
    }

    if !report.defects.is_empty() {
        let path = dir.join("defect.csv");
        let mut w = csv_writer(&path)?;
        let err = |e| CliError::Csv(path.clone(), e);
        w.write_record(["n", "min_total", "g_component", "fiber_component", "starts"])
            .map_err(err)?;
        for d in &report.defects {
            w.write_record([
                d.n.to_string(),
                d.report.min_total.to_string(),
                d.report.g_component.to_string(),
                d.report.fiber_component.to_string(),
                d.report.starts.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Io(path.clone(), e))?;
        written.push(path);
    }

    for sample in &report.zero_sets {
        let path = dir.join(format!("zeroset_{}.csv", sample.iterate_index));
        let mut w = csv_writer(&path)?;
        let err = |e| CliError::Csv(path.clone(), e);
        let dim = report.config.n;
        let mut header: Vec<String> = (1..=dim).flat_map(|i| [format!("re{i}"), format!("im{i}")]).collect();
        header.push("residual".into());
        w.write_record(&header).map_err(err)?;
        let rows = sample
            .points
            .iter()
            .zip(&sample.residuals)
            .map(|(z, r)| (z, *r))
            .chain(sample.unresolved.iter().map(|u| (&u.point, u.residual)));
        for (z, r) in rows {
            let mut record: Vec<String> = z.real_coords().iter().map(|x| x.to_string()).collect();
            record.push(r.to_string());
            w.write_record(&record).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Io(path.clone(), e))?;
        written.push(path);
    }
    Ok(written)
}
