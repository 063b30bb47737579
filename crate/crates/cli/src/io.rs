//! On-disk formats.
//!
//! * Data: CSV with a header row, plus a `<stem>.schema.json` sidecar
//!   mapping each column name to `{"kind":"continuous"}` or
//!   `{"kind":"categorical","levels":k}`, optionally with `"labels":[..]`
//!   giving each level's numeric value. Categorical cells hold codes `0..k`.
//! * DAG: CSV edge list `from,to` over node names, plus a `<file>.nodes`
//!   sidecar holding the comma-separated node list on one line.
//! * Samples: JSON lines. A `{"kind":"header",..}` record, one
//!   `{iteration, edges, log_score}` record per kept sample (edges are node
//!   index pairs), and a `{"kind":"summary",..}` footer.
//! * Metrics: CSV `scenario,beta,strategy,score,replicates,shd,tp,fp,fn,tpr,fr,status`
//!   with `inf`/`nan` literals.
//!
//! CSV outputs start with `# key=value` comment lines carrying the seed and
//! settings. Every write goes to a temporary file in the target directory
//! and is renamed into place, so a file is either complete or absent.

use crate::error::{CliError, Result};
use hbn_core::data::{Column, ColumnKind, Dataset};
use hbn_core::graph::Dag;
use hbn_core::metrics::EvalReport;
use hbn_core::sampler::{PosteriorSamples, Sample};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Writes `path` through a temporary sibling file that is renamed on
/// success. Parent directories are created as needed.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w).map_err(|e| CliError::io(path, e))?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// `inf`, `-inf` and `nan` literals; shortest round-trip text otherwise.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

fn write_comments(w: &mut dyn Write, comments: &[(String, String)]) -> std::io::Result<()> {
    for (k, v) in comments {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

fn csv_reader(path: &Path) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::format(path, e.to_string()))
}

fn to_io(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

// ---------------------------------------------------------------- datasets

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnSchema {
    Continuous,
    Categorical {
        levels: usize,
        /// Numeric value of each level for the all-Gaussian view.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<f64>>,
    },
}

impl From<&Column> for ColumnSchema {
    fn from(c: &Column) -> Self {
        match c.kind {
            ColumnKind::Continuous => ColumnSchema::Continuous,
            ColumnKind::Categorical { levels } => {
                ColumnSchema::Categorical { levels, labels: c.level_values.clone() }
            }
        }
    }
}

pub type Schema = BTreeMap<String, ColumnSchema>;

/// `data.csv` → `data.schema.json`.
pub fn schema_path_for(data_path: &Path) -> PathBuf {
    data_path.with_extension("schema.json")
}

pub fn write_dataset(path: &Path, data: &Dataset, comments: &[(String, String)]) -> Result<()> {
    let schema: Schema =
        data.columns().iter().map(|c| (c.name.clone(), ColumnSchema::from(c))).collect();
    write_atomic(&schema_path_for(path), |w| {
        serde_json::to_writer_pretty(&mut *w, &schema)?;
        writeln!(w)
    })?;
    write_atomic(path, |w| {
        write_comments(w, comments)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(data.names()).map_err(to_io)?;
        for r in 0..data.n_rows() {
            let row = data.columns().iter().map(|c| fmt_f64(c.values[r]));
            out.write_record(row).map_err(to_io)?;
        }
        out.flush()
    })
}

pub fn read_schema(path: &Path) -> Result<Schema> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))
}

/// Reads a data CSV with its schema; column order follows the CSV header.
pub fn read_dataset(path: &Path, schema_path: &Path) -> Result<Dataset> {
    let schema = read_schema(schema_path)?;
    let mut reader = csv_reader(path)?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::format(path, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut kinds = Vec::with_capacity(header.len());
    for name in &header {
        let kind = schema.get(name).ok_or_else(|| {
            CliError::format(schema_path, format!("no schema entry for column `{name}`"))
        })?;
        kinds.push(kind.clone());
    }
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::format(path, e.to_string()))?;
        for (j, cell) in record.iter().enumerate() {
            let v = cell.parse::<f64>().map_err(|_| {
                CliError::format(path, format!("row {}: `{cell}` is not a number", i + 1))
            })?;
            values[j].push(v);
        }
    }
    let columns = header
        .into_iter()
        .zip(kinds)
        .zip(values)
        .map(|((name, kind), values)| match kind {
            ColumnSchema::Continuous => Column::continuous(name, values),
            ColumnSchema::Categorical { levels, labels } => Column {
                name,
                kind: ColumnKind::Categorical { levels },
                values,
                level_values: labels,
            },
        })
        .collect();
    Ok(Dataset::new(columns)?)
}

// -------------------------------------------------------------------- DAGs

/// `truth.csv` → `truth.csv.nodes`.
pub fn nodes_path_for(dag_path: &Path) -> PathBuf {
    let mut s = dag_path.as_os_str().to_owned();
    s.push(".nodes");
    PathBuf::from(s)
}

pub fn write_dag(path: &Path, dag: &Dag, names: &[String], comments: &[(String, String)]) -> Result<()> {
    write_atomic(&nodes_path_for(path), |w| writeln!(w, "{}", names.join(",")))?;
    write_atomic(path, |w| {
        write_comments(w, comments)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["from", "to"]).map_err(to_io)?;
        for (a, b) in dag.edges() {
            out.write_record([&names[a], &names[b]]).map_err(to_io)?;
        }
        out.flush()
    })
}

pub fn read_dag(path: &Path) -> Result<(Dag, Vec<String>)> {
    let nodes_path = nodes_path_for(path);
    let text = fs::read_to_string(&nodes_path).map_err(|e| CliError::io(&nodes_path, e))?;
    let names: Vec<String> = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .unwrap_or("")
        .split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect();
    let edges = read_edge_names(path)?;
    let edges = resolve_edges(&edges, &names)?;
    Ok((Dag::new(names.len(), edges)?, names))
}

/// Name pairs of a `from,to` CSV, in file order.
pub fn read_edge_names(path: &Path) -> Result<Vec<(String, String)>> {
    let mut reader = csv_reader(path)?;
    let header = reader.headers().map_err(|e| CliError::format(path, e.to_string()))?;
    if header.len() != 2 || &header[0] != "from" || &header[1] != "to" {
        return Err(CliError::format(path, "expected header `from,to`"));
    }
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::format(path, format!("row {}: {e}", i + 1)))?;
        if record.len() != 2 || record[0].is_empty() || record[1].is_empty() {
            return Err(CliError::format(path, format!("row {}: expected `from,to`", i + 1)));
        }
        out.push((record[0].to_owned(), record[1].to_owned()));
    }
    Ok(out)
}

/// Maps name pairs to index pairs against `names`.
pub fn resolve_edges(edges: &[(String, String)], names: &[String]) -> Result<Vec<(usize, usize)>> {
    let index = |n: &str| {
        names.iter().position(|m| m == n).ok_or_else(|| CliError::UnknownNode {
            name: n.to_owned(),
            known: names.join(","),
        })
    };
    edges.iter().map(|(a, b)| Ok((index(a)?, index(b)?))).collect()
}

// ----------------------------------------------------------------- samples

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub kind: String,
    pub nodes: Vec<String>,
    pub sampler: String,
    /// Chain seed.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub kind: String,
    pub samples: usize,
    pub proposals: usize,
    pub accepted: usize,
    pub acceptance_rate: f64,
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    iteration: usize,
    edges: Vec<[usize; 2]>,
    log_score: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SampleLine {
    Sample(SampleRecord),
    Header(SampleHeader),
    Summary(SampleSummary),
}

impl SampleHeader {
    pub fn new(nodes: Vec<String>, sampler: &str, cfg: &hbn_core::sampler::ChainConfig) -> Self {
        Self {
            kind: "header".into(),
            nodes,
            sampler: sampler.into(),
            seed: cfg.seed,
            data_seed: None,
            strategy: None,
            iterations: cfg.iterations,
            burn_in: cfg.burn_in(),
            thinning: cfg.thinning,
        }
    }
}

pub fn write_samples(path: &Path, header: &SampleHeader, run: &PosteriorSamples) -> Result<()> {
    let summary = SampleSummary {
        kind: "summary".into(),
        samples: run.samples.len(),
        proposals: run.proposals,
        accepted: run.accepted,
        acceptance_rate: run.acceptance_rate(),
    };
    write_atomic(path, |w| {
        serde_json::to_writer(&mut *w, header)?;
        writeln!(w)?;
        for s in &run.samples {
            let rec = SampleRecord {
                iteration: s.iteration,
                edges: s.dag.edges().into_iter().map(|(a, b)| [a, b]).collect(),
                log_score: s.log_score,
            };
            serde_json::to_writer(&mut *w, &rec)?;
            writeln!(w)?;
        }
        serde_json::to_writer(&mut *w, &summary)?;
        writeln!(w)
    })
}

/// Header, samples and (when present) the summary footer of a samples file.
pub fn read_samples(path: &Path) -> Result<(SampleHeader, Vec<Sample>, Option<SampleSummary>)> {
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut header: Option<SampleHeader> = None;
    let mut summary = None;
    let mut samples = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: String| CliError::format(path, format!("line {}: {m}", i + 1));
        match serde_json::from_str::<SampleLine>(&line).map_err(|e| bad(e.to_string()))? {
            SampleLine::Header(h) => header = Some(h),
            SampleLine::Summary(s) => summary = Some(s),
            SampleLine::Sample(rec) => {
                let n = header.as_ref().ok_or_else(|| bad("sample before header".into()))?.nodes.len();
                let dag = Dag::new(n, rec.edges.iter().map(|e| (e[0], e[1])))
                    .map_err(|e| bad(e.to_string()))?;
                samples.push(Sample { iteration: rec.iteration, dag, log_score: rec.log_score });
            }
        }
    }
    let header = header.ok_or_else(|| CliError::format(path, "missing header record"))?;
    Ok((header, samples, summary))
}

// ----------------------------------------------------------------- metrics

/// One metrics row: a (scenario, β, strategy) cell averaged over replicates,
/// or the error that aborted it.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub scenario: String,
    pub beta: Option<f64>,
    pub strategy: String,
    pub score: String,
    pub outcome: std::result::Result<EvalReport, String>,
}

pub const METRICS_HEADER: [&str; 12] =
    ["scenario", "beta", "strategy", "score", "replicates", "shd", "tp", "fp", "fn", "tpr", "fr", "status"];

impl MetricsRow {
    pub fn fields(&self) -> Vec<String> {
        let beta = self.beta.map(fmt_f64).unwrap_or_default();
        let mut out = vec![self.scenario.clone(), beta, self.strategy.clone(), self.score.clone()];
        match &self.outcome {
            Ok(r) => {
                out.push(r.replicates.to_string());
                for v in [r.shd, r.tp, r.fp, r.fn_, r.tpr, r.fr.unwrap_or(f64::NAN)] {
                    out.push(fmt_f64(v));
                }
                out.push("ok".into());
            }
            Err(msg) => {
                out.extend(std::iter::repeat_n(String::new(), 7));
                out.push(format!("error: {msg}"));
            }
        }
        out
    }
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow], comments: &[(String, String)]) -> Result<()> {
    write_atomic(path, |w| {
        write_comments(w, comments)?;
        let mut out = csv::Writer::from_writer(w);
        out.write_record(METRICS_HEADER).map_err(to_io)?;
        for row in rows {
            out.write_record(row.fields()).map_err(to_io)?;
        }
        out.flush()
    })
}

/// Reads a metrics CSV back as string records keyed by column name.
pub fn read_metrics(path: &Path) -> Result<Vec<BTreeMap<String, String>>> {
    let mut reader = csv_reader(path)?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::format(path, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| CliError::format(path, e.to_string()))?;
            Ok(header.iter().cloned().zip(r.iter().map(str::to_owned)).collect())
        })
        .collect()
}

/// `beta,r10,rtilde10` curve file.
pub fn write_curve(path: &Path, rows: &[hbn_core::theory::CurveRow], comments: &[(String, String)]) -> Result<()> {
    write_atomic(path, |w| {
        write_comments(w, comments)?;
        writeln!(w, "beta,r10,rtilde10")?;
        for r in rows {
            writeln!(w, "{},{},{}", fmt_f64(r.beta), fmt_f64(r.r10), fmt_f64(r.rtilde10))?;
        }
        Ok(())
    })
}
