use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use betagraph_core::{ConvergenceReport, Histogram, PointMeasure};

use crate::manifest::RunManifest;

/// A real with 17 significant digits, which round-trips any `f64`.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// CSV text with a header line and LF line endings.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn point_measure_csv(mu: &PointMeasure) -> Csv {
    let mut csv = Csv::new(&["location", "mass"]);
    for a in mu.atoms() {
        csv.row(&[real(a.location), real(a.mass)]);
    }
    csv
}

pub fn histogram_csv(h: &Histogram) -> Csv {
    let mut csv = Csv::new(&["bin_left", "bin_right", "count", "density"]);
    for (i, w) in h.bin_edges.windows(2).enumerate() {
        csv.row(&[
            real(w[0]),
            real(w[1]),
            h.counts[i].to_string(),
            real(h.density[i]),
        ]);
    }
    csv
}

pub fn convergence_csv(report: &ConvergenceReport) -> Csv {
    let mut csv = Csv::new(&["n", "trials", "ks_mean", "ks_std"]);
    for r in &report.rows {
        csv.row(&[
            r.n.to_string(),
            r.trials.to_string(),
            real(r.ks_mean),
            real(r.ks_std),
        ]);
    }
    csv
}

pub fn eigenvalues_csv(values: &[f64]) -> Csv {
    let mut csv = Csv::new(&["index", "eigenvalue"]);
    for (i, v) in values.iter().enumerate() {
        csv.row(&[i.to_string(), real(*v)]);
    }
    csv
}

/// Where an artifact and its manifest go.
#[derive(Debug, Clone, Default)]
pub struct Destination {
    pub out: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
}

impl Destination {
    fn write_out(&self, text: &str) -> io::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()
            }
        }
    }

    /// Sidecar path for a CSV artifact's manifest: `--manifest`, else
    /// `<out>.manifest.json`, else none (the manifest goes to stderr).
    pub fn manifest_path(&self) -> Option<PathBuf> {
        self.manifest.clone().or_else(|| {
            self.out.as_ref().map(|p| {
                let mut s = p.clone().into_os_string();
                s.push(".manifest.json");
                PathBuf::from(s)
            })
        })
    }

    /// Write `csv` and its manifest.
    pub fn emit_csv(&self, manifest: &RunManifest, csv: Csv) -> io::Result<()> {
        self.write_out(&csv.into_string())?;
        let json = manifest_json(manifest);
        match self.manifest_path() {
            Some(path) => fs::write(path, json),
            None => {
                let mut stderr = io::stderr().lock();
                stderr.write_all(json.as_bytes())
            }
        }
    }

    /// Write a JSON document whose first key is the manifest.
    pub fn emit_json(&self, body: &impl serde::Serialize) -> io::Result<()> {
        let mut text = serde_json::to_string(body).map_err(io::Error::other)?;
        text.push('\n');
        self.write_out(&text)
    }
}

pub fn manifest_json(m: &RunManifest) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("manifest serializes");
    s.push('\n');
    s
}
