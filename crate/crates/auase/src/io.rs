//! Plain-text I/O: triplet matrices, edge lists, covariate CSVs, model
//! configs, and embedding export.
//!
//! All formats are line-oriented. Blank lines and lines starting with `#`
//! are ignored everywhere. Parse errors carry 1-based line numbers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::embedding::EmbeddingSequence;
use crate::mat::{DenseMatrix, MatError, SparseMatrix};
use crate::model::{DynamicAttributedNetwork, ModelError, ModelSpec, Trajectory};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn perr<T>(line: usize, msg: impl Into<String>) -> Result<T, IoError> {
    Err(IoError::Parse { line, msg: msg.into() })
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parse a sparse matrix from `row col value` triplet lines. Duplicate
/// entries are summed; explicit zeros are dropped.
pub fn parse_triplets(text: &str, rows: usize, cols: usize) -> Result<SparseMatrix, IoError> {
    let mut triplets = Vec::new();
    for (lineno, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return perr(lineno, format!("expected `row col value`, got {} fields", fields.len()));
        }
        let r: usize = fields[0]
            .parse()
            .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad row index: {e}") })?;
        let c: usize = fields[1]
            .parse()
            .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad col index: {e}") })?;
        let v: f64 = fields[2]
            .parse()
            .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad value: {e}") })?;
        if !v.is_finite() {
            return perr(lineno, "value must be finite");
        }
        triplets.push((r, c, v));
    }
    SparseMatrix::from_triplets(rows, cols, &triplets).map_err(IoError::from)
}

/// Write a sparse matrix as triplet lines, row-major order.
pub fn write_triplets(m: &SparseMatrix) -> String {
    let mut out = String::new();
    for (r, c, v) in m.to_triplets() {
        out.push_str(&format!("{r} {c} {v}\n"));
    }
    out
}

/// Parse an undirected edge list with lines `i j` or `i j weight`
/// (0-based node indices). The result is symmetrized, self-loops are
/// dropped, and duplicate edges keep the last weight seen.
pub fn parse_edge_list(text: &str, n: usize) -> Result<SparseMatrix, IoError> {
    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (lineno, line) in content_lines(text) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return perr(lineno, format!("expected `i j [weight]`, got {} fields", fields.len()));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad node index: {e}") })?;
        let j: usize = fields[1]
            .parse()
            .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad node index: {e}") })?;
        if i >= n || j >= n {
            return perr(lineno, format!("node index out of range (n = {n})"));
        }
        let w: f64 = if fields.len() == 3 {
            fields[2]
                .parse()
                .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad weight: {e}") })?
        } else {
            1.0
        };
        if !w.is_finite() {
            return perr(lineno, "weight must be finite");
        }
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        edges.insert(key, w);
    }
    let mut triplets = Vec::with_capacity(2 * edges.len());
    for (&(i, j), &w) in &edges {
        triplets.push((i, j, w));
        triplets.push((j, i, w));
    }
    SparseMatrix::from_triplets(n, n, &triplets).map_err(IoError::from)
}

/// Parse a covariate CSV: a header line followed by one comma-separated row
/// of floats per node. The header is only used to fix the column count.
pub fn parse_covariates(text: &str) -> Result<DenseMatrix, IoError> {
    let mut lines = content_lines(text);
    let (header_line, header) = match lines.next() {
        Some(x) => x,
        None => return Err(IoError::Invalid("empty covariate file".into())),
    };
    let p = header.split(',').count();
    if p == 0 {
        return perr(header_line, "header has no columns");
    }
    let mut data = Vec::new();
    let mut n = 0usize;
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != p {
            return perr(lineno, format!("expected {p} fields, got {}", fields.len()));
        }
        for f in fields {
            let v: f64 = f.trim().parse().map_err(|e| IoError::Parse {
                line: lineno,
                msg: format!("bad value `{f}`: {e}"),
            })?;
            if !v.is_finite() {
                return perr(lineno, "value must be finite");
            }
            data.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(IoError::Invalid("covariate file has a header but no rows".into()));
    }
    DenseMatrix::from_row_major(n, p, data).map_err(IoError::from)
}

/// Write a covariate matrix as CSV with an `x_0,x_1,...` header.
pub fn write_covariates(c: &DenseMatrix) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..c.cols()).map(|j| format!("x_{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for i in 0..c.rows() {
        let row: Vec<String> = c.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn parse_prob(s: &str, lineno: usize) -> Result<f64, IoError> {
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|e| IoError::Parse {
            line: lineno,
            msg: format!("bad probability numerator: {e}"),
        })?;
        let den: f64 = den.trim().parse().map_err(|e| IoError::Parse {
            line: lineno,
            msg: format!("bad probability denominator: {e}"),
        })?;
        if den == 0.0 {
            return perr(lineno, "probability denominator is zero");
        }
        Ok(num / den)
    } else {
        s.trim()
            .parse()
            .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad probability: {e}") })
    }
}

fn parse_floats(s: &str, lineno: usize) -> Result<Vec<f64>, IoError> {
    s.split_whitespace()
        .map(|f| {
            f.parse::<f64>()
                .map_err(|e| IoError::Parse { line: lineno, msg: format!("bad value `{f}`: {e}") })
        })
        .collect()
}

/// Parse a model configuration.
///
/// Grammar (one statement per line):
///
/// ```text
/// k = 3                      # number of communities
/// sigma = 1                  # covariate noise standard deviation
/// rho = 1                    # global sparsity factor
/// alpha = 0.2                # attribute weight
/// b_row = 0.3 0.5 0.5        # one line per row of the K x K edge matrix
/// d_row = 0 1 0 ...          # one line per row of the K x p mean matrix
/// trajectory 1/3 = 1 1 1 2   # probability, then 1-based states per interval
/// ```
pub fn parse_model_spec(text: &str) -> Result<ModelSpec, IoError> {
    let mut k: Option<usize> = None;
    let mut sigma: Option<f64> = None;
    let mut rho: Option<f64> = None;
    let mut alpha: Option<f64> = None;
    let mut b_rows: Vec<Vec<f64>> = Vec::new();
    let mut d_rows: Vec<Vec<f64>> = Vec::new();
    let mut trajectories: Vec<Trajectory> = Vec::new();

    for (lineno, line) in content_lines(text) {
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => return perr(lineno, "expected `key = value`"),
        };
        if let Some(prob_str) = key.strip_prefix("trajectory") {
            let probability = parse_prob(prob_str.trim(), lineno)?;
            let raw = parse_floats(value, lineno)?;
            let mut states = Vec::with_capacity(raw.len());
            for s in raw {
                if s < 1.0 || s.fract() != 0.0 {
                    return perr(lineno, "states must be integers >= 1");
                }
                states.push(s as usize - 1);
            }
            if states.is_empty() {
                return perr(lineno, "trajectory has no states");
            }
            trajectories.push(Trajectory { probability, states });
            continue;
        }
        match key {
            "k" => {
                k = Some(value.parse().map_err(|e| IoError::Parse {
                    line: lineno,
                    msg: format!("bad k: {e}"),
                })?)
            }
            "sigma" => {
                sigma = Some(value.parse().map_err(|e| IoError::Parse {
                    line: lineno,
                    msg: format!("bad sigma: {e}"),
                })?)
            }
            "rho" => {
                rho = Some(value.parse().map_err(|e| IoError::Parse {
                    line: lineno,
                    msg: format!("bad rho: {e}"),
                })?)
            }
            "alpha" => {
                alpha = Some(value.parse().map_err(|e| IoError::Parse {
                    line: lineno,
                    msg: format!("bad alpha: {e}"),
                })?)
            }
            "b_row" => b_rows.push(parse_floats(value, lineno)?),
            "d_row" => d_rows.push(parse_floats(value, lineno)?),
            other => return perr(lineno, format!("unknown key `{other}`")),
        }
    }

    let k = k.ok_or_else(|| IoError::Invalid("missing `k`".into()))?;
    let sigma = sigma.ok_or_else(|| IoError::Invalid("missing `sigma`".into()))?;
    let rho = rho.ok_or_else(|| IoError::Invalid("missing `rho`".into()))?;
    let alpha = alpha.ok_or_else(|| IoError::Invalid("missing `alpha`".into()))?;
    if b_rows.len() != k {
        return Err(IoError::Invalid(format!("expected {k} b_row lines, got {}", b_rows.len())));
    }
    if d_rows.len() != k {
        return Err(IoError::Invalid(format!("expected {k} d_row lines, got {}", d_rows.len())));
    }
    if b_rows.iter().any(|r| r.len() != k) {
        return Err(IoError::Invalid(format!("every b_row must have {k} entries")));
    }
    let p = d_rows[0].len();
    if d_rows.iter().any(|r| r.len() != p) {
        return Err(IoError::Invalid("all d_row lines must have the same length".into()));
    }
    if trajectories.is_empty() {
        return Err(IoError::Invalid("no trajectories".into()));
    }
    for traj in &trajectories {
        if traj.states.iter().any(|&s| s >= k) {
            return Err(IoError::Invalid(format!("trajectory state exceeds k = {k}")));
        }
    }
    let b = DenseMatrix::from_row_major(k, k, b_rows.concat())?;
    let d = DenseMatrix::from_row_major(k, p, d_rows.concat())?;
    let spec = ModelSpec { k, b, d, sigma, rho, alpha, trajectories };
    spec.validate()?;
    Ok(spec)
}

/// Serialize a model spec in the format accepted by [`parse_model_spec`].
pub fn write_model_spec(spec: &ModelSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("k = {}\n", spec.k));
    out.push_str(&format!("sigma = {}\n", spec.sigma));
    out.push_str(&format!("rho = {}\n", spec.rho));
    out.push_str(&format!("alpha = {}\n", spec.alpha));
    for i in 0..spec.k {
        let row: Vec<String> = spec.b.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("b_row = {}\n", row.join(" ")));
    }
    for i in 0..spec.k {
        let row: Vec<String> = spec.d.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("d_row = {}\n", row.join(" ")));
    }
    for traj in &spec.trajectories {
        let states: Vec<String> = traj.states.iter().map(|&s| format!("{}", s + 1)).collect();
        out.push_str(&format!("trajectory {} = {}\n", traj.probability, states.join(" ")));
    }
    out
}

/// The built-in three-community synthetic benchmark configuration.
pub fn builtin_synthetic_spec() -> Result<ModelSpec, IoError> {
    parse_model_spec(include_str!("../configs/synthetic.cfg"))
}

/// Load a dynamic attributed network from per-interval edge-list and
/// covariate files. Interval order follows the order of the path lists,
/// which must have equal length. `n` is taken from the covariate files.
pub fn ingest(
    edge_paths: &[PathBuf],
    covariate_paths: &[PathBuf],
) -> Result<DynamicAttributedNetwork, IoError> {
    if edge_paths.len() != covariate_paths.len() {
        return Err(IoError::Invalid(format!(
            "{} edge files but {} covariate files",
            edge_paths.len(),
            covariate_paths.len()
        )));
    }
    if edge_paths.is_empty() {
        return Err(IoError::Invalid("no input files".into()));
    }
    let mut adjacency = Vec::new();
    let mut covariates = Vec::new();
    for (ep, cp) in edge_paths.iter().zip(covariate_paths) {
        let cov = parse_covariates(&fs::read_to_string(cp)?)
            .map_err(|e| IoError::Invalid(format!("{}: {e}", cp.display())))?;
        let adj = parse_edge_list(&fs::read_to_string(ep)?, cov.rows())
            .map_err(|e| IoError::Invalid(format!("{}: {e}", ep.display())))?;
        adjacency.push(adj);
        covariates.push(cov);
    }
    DynamicAttributedNetwork::new(adjacency, covariates).map_err(IoError::from)
}

/// Parse a node-label table: header `node,t0,t1,...`, then one row per node
/// with the node index followed by its 0-based label at each interval.
/// Returns `labels[t][i]`.
pub fn parse_labels(text: &str) -> Result<Vec<Vec<usize>>, IoError> {
    let mut lines = content_lines(text);
    let (_, header) = lines
        .next()
        .ok_or_else(|| IoError::Invalid("empty label file".into()))?;
    let cols = header.split(',').count();
    if cols < 2 {
        return Err(IoError::Invalid("label header needs node plus interval columns".into()));
    }
    let intervals = cols - 1;
    let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols {
            return perr(lineno, format!("expected {cols} fields, got {}", fields.len()));
        }
        let node: usize = fields[0].trim().parse().map_err(|e| IoError::Parse {
            line: lineno,
            msg: format!("bad node index: {e}"),
        })?;
        let mut states = Vec::with_capacity(intervals);
        for f in &fields[1..] {
            states.push(f.trim().parse().map_err(|e| IoError::Parse {
                line: lineno,
                msg: format!("bad label `{f}`: {e}"),
            })?);
        }
        rows.push((node, states));
    }
    if rows.is_empty() {
        return Err(IoError::Invalid("label file has a header but no rows".into()));
    }
    let n = rows.len();
    let mut labels = vec![vec![0usize; n]; intervals];
    let mut seen = vec![false; n];
    for (node, states) in rows {
        if node >= n {
            return Err(IoError::Invalid(format!(
                "node index {node} out of range for {n} rows"
            )));
        }
        if seen[node] {
            return Err(IoError::Invalid(format!("duplicate node index {node}")));
        }
        seen[node] = true;
        for (t, s) in states.into_iter().enumerate() {
            labels[t][node] = s;
        }
    }
    Ok(labels)
}

/// Write a label table in the format accepted by [`parse_labels`].
pub fn write_labels(labels: &[Vec<usize>]) -> String {
    let intervals = labels.len();
    let n = labels.first().map_or(0, |l| l.len());
    let mut out = String::from("node");
    for t in 0..intervals {
        out.push_str(&format!(",t{t}"));
    }
    out.push('\n');
    for i in 0..n {
        out.push_str(&format!("{i}"));
        for t in 0..intervals {
            out.push_str(&format!(",{}", labels[t][i]));
        }
        out.push('\n');
    }
    out
}

/// Run manifest written next to exported embeddings so a run can be
/// reproduced exactly.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub n: usize,
    pub intervals: usize,
    pub dim: usize,
    pub alpha: f64,
    pub seed: u64,
    pub degree_corrected: bool,
    pub svd_power_iterations: usize,
    pub svd_oversampling: usize,
    pub extra: BTreeMap<String, String>,
}

/// Export an embedding sequence: one `embedding_t<t>.csv` per interval
/// (header `node,dim_0,...`), `singular_values.csv`, and `manifest.json`.
pub fn export_embedding(
    dir: &Path,
    emb: &EmbeddingSequence,
    manifest: &Manifest,
) -> Result<(), IoError> {
    fs::create_dir_all(dir)?;
    for t in 0..emb.intervals() {
        let block = emb.block(t);
        let mut out = String::new();
        let header: Vec<String> = (0..block.cols()).map(|j| format!("dim_{j}")).collect();
        out.push_str(&format!("node,{}\n", header.join(",")));
        for i in 0..block.rows() {
            let row: Vec<String> = block.row(i).iter().map(|v| format!("{v:.17e}")).collect();
            out.push_str(&format!("{i},{}\n", row.join(",")));
        }
        fs::write(dir.join(format!("embedding_t{t}.csv")), out)?;
    }
    let mut sv = String::from("index,singular_value\n");
    for (i, s) in emb.singular_values.iter().enumerate() {
        sv.push_str(&format!("{i},{s:.17e}\n"));
    }
    fs::write(dir.join("singular_values.csv"), sv)?;
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(manifest)?)?;
    Ok(())
}

/// Write a sampled network to `dir`: `edges_t<t>.txt` and
/// `covariates_t<t>.csv` per interval.
pub fn export_network(dir: &Path, net: &DynamicAttributedNetwork) -> Result<(), IoError> {
    fs::create_dir_all(dir)?;
    for t in 0..net.intervals() {
        let mut out = String::new();
        for (i, j, w) in net.adjacency[t].to_triplets() {
            if i < j {
                if (w - 1.0).abs() < 1e-15 {
                    out.push_str(&format!("{i} {j}\n"));
                } else {
                    out.push_str(&format!("{i} {j} {w}\n"));
                }
            }
        }
        fs::write(dir.join(format!("edges_t{t}.txt")), out)?;
        fs::write(dir.join(format!("covariates_t{t}.csv")), write_covariates(&net.covariates[t]))?;
    }
    Ok(())
}
