//! File formats: dataset CSV, fitted-model files, and the run manifest
//! embedded as `#` comment lines at the top of every artifact.
//!
//! Dataset CSV: UTF-8, comma-separated, header `y,x1,...,xd`, labels in
//! {0,1}, features serialized with 17 significant digits so values
//! round-trip bit-exactly. Lines starting with `#` are ignored on read.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use robin_core::{Dataset, FitResult, FitStatus, Link, LossSpec, ParameterVector};

/// 17-significant-digit decimal serialization (bit-exact round trip).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Manifest header: tool version, the invoking command line, a timestamp,
/// and optional extra key/value lines (seed, config echo).
pub fn manifest(extra: &[(&str, String)]) -> String {
    let argv: Vec<String> = std::env::args().collect();
    let mut out = String::new();
    let _ = writeln!(out, "# robin {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# command: {}", argv.join(" "));
    let _ = writeln!(out, "# created: {}", chrono::Utc::now().to_rfc3339());
    for (key, value) in extra {
        let _ = writeln!(out, "# {key}: {value}");
    }
    out
}

pub fn open_readable(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            anyhow!("file not found: {}", path.display())
        } else {
            anyhow!("cannot open {}: {e}", path.display())
        }
    })
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let file = open_readable(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader
        .headers()
        .with_context(|| format!("{}: cannot read header", path.display()))?
        .clone();
    if headers.is_empty() || headers.get(0) != Some("y") {
        bail!(
            "{}: expected header starting with 'y' (y,x1,...,xd), found {:?}",
            path.display(),
            headers.iter().collect::<Vec<_>>()
        );
    }
    let d = headers.len() - 1;

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.with_context(|| format!("{}: malformed CSV", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != d + 1 {
            bail!(
                "{} line {line}: expected {} fields, found {}",
                path.display(),
                d + 1,
                record.len()
            );
        }
        let y: u8 = record[0]
            .parse()
            .ok()
            .filter(|v| *v <= 1)
            .ok_or_else(|| {
                anyhow!(
                    "{} line {line}: label '{}' is not 0 or 1",
                    path.display(),
                    &record[0]
                )
            })?;
        labels.push(y);
        for j in 1..=d {
            let v: f64 = record[j].parse().map_err(|_| {
                anyhow!(
                    "{} line {line}: field {j} ('{}') is not a number",
                    path.display(),
                    &record[j]
                )
            })?;
            features.push(v);
        }
    }
    Dataset::from_parts(d, features, labels)
        .with_context(|| format!("{}: invalid dataset", path.display()))
}

pub fn write_dataset(path: &Path, data: &Dataset, extra: &[(&str, String)]) -> Result<()> {
    let mut out = manifest(extra);
    out.push_str("y");
    for j in 1..=data.feature_dim() {
        let _ = write!(out, ",x{j}");
    }
    out.push('\n');
    for (x, y) in data.rows() {
        let _ = write!(out, "{y}");
        for v in x {
            let _ = write!(out, ",{}", fmt_f64(*v));
        }
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Key/value model file produced by `fit` and consumed by `predict`.
pub fn write_model(
    path: &Path,
    link: Link,
    spec: LossSpec,
    result: &FitResult,
) -> Result<()> {
    let mut out = manifest(&[]);
    let _ = writeln!(out, "link = {link}");
    let _ = writeln!(out, "loss = {spec}");
    let _ = writeln!(out, "d = {}", result.theta_hat.feature_dim());
    let theta: Vec<String> = result.theta_hat.values().iter().map(|v| fmt_f64(*v)).collect();
    let _ = writeln!(out, "theta = {}", theta.join(" "));
    let _ = writeln!(out, "final_risk = {}", fmt_f64(result.final_risk));
    let _ = writeln!(out, "gradient_norm = {}", fmt_f64(result.gradient_norm));
    let _ = writeln!(out, "iterations = {}", result.iterations);
    let _ = writeln!(out, "status = {}", result.status.as_str());
    let _ = writeln!(out, "initializer = {}", result.initializer_used);
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

pub struct ModelFile {
    pub link: Link,
    pub spec: LossSpec,
    pub theta: ParameterVector,
    pub status: FitStatus,
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let text = {
        use std::io::Read;
        let mut file = open_readable(path)?;
        let mut s = String::new();
        file.read_to_string(&mut s)
            .with_context(|| format!("cannot read {}", path.display()))?;
        s
    };
    let mut link = None;
    let mut spec = None;
    let mut theta = None;
    let mut status = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}: malformed line '{line}'", path.display()))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "link" => link = Some(value.parse::<Link>()?),
            "loss" => spec = Some(value.parse::<LossSpec>()?),
            "theta" => {
                let values = value
                    .split_whitespace()
                    .map(|v| {
                        v.parse::<f64>()
                            .map_err(|_| anyhow!("{}: bad theta entry '{v}'", path.display()))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                theta = Some(ParameterVector::new(values)?);
            }
            "status" => {
                status = Some(match value {
                    "converged" => FitStatus::Converged,
                    "max_iterations" => FitStatus::MaxIterations,
                    "stalled_at_initial" => FitStatus::StalledAtInitial,
                    "numerical_failure" => FitStatus::NumericalFailure,
                    other => bail!("{}: unknown status '{other}'", path.display()),
                })
            }
            _ => {}
        }
    }
    Ok(ModelFile {
        link: link.ok_or_else(|| anyhow!("{}: missing 'link'", path.display()))?,
        spec: spec.ok_or_else(|| anyhow!("{}: missing 'loss'", path.display()))?,
        theta: theta.ok_or_else(|| anyhow!("{}: missing 'theta'", path.display()))?,
        status: status.unwrap_or(FitStatus::Converged),
    })
}
