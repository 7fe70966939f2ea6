use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numkit::Matrix;

/// A graph with node features, integer labels and a name.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub graph: Graph,
    /// n×F, one row per node.
    pub features: Matrix,
    /// Values in `[0, num_classes)`.
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub name: String,
}

impl Dataset {
    pub fn new(
        graph: Graph,
        features: Matrix,
        labels: Vec<usize>,
        num_classes: usize,
        name: String,
    ) -> Result<Dataset> {
        let n = graph.num_nodes();
        if features.rows() != n {
            return Err(Error::InvalidInput(format!(
                "feature rows ({}) != node count ({n})",
                features.rows()
            )));
        }
        if labels.len() != n {
            return Err(Error::InvalidInput(format!(
                "label count ({}) != node count ({n})",
                labels.len()
            )));
        }
        let mut seen = vec![false; num_classes];
        for (i, &l) in labels.iter().enumerate() {
            if l >= num_classes {
                return Err(Error::InvalidInput(format!(
                    "label {l} at node {i} out of range (num_classes = {num_classes})"
                )));
            }
            seen[l] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidInput("some class has no nodes".into()));
        }
        Ok(Dataset {
            graph,
            features,
            labels,
            num_classes,
            name,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn feat_dim(&self) -> usize {
        self.features.cols()
    }
}

#[derive(Serialize, Deserialize)]
struct Meta {
    name: String,
    num_classes: usize,
}

/// Read a dataset directory: `graph.edges` (one "src dst" pair per line,
/// `#` comments ignored), `features.csv` (comma-separated reals, no header),
/// `labels.txt` (one integer per line), optional `meta.json`.
///
/// Duplicate and reversed edge lines are deduplicated; self-loop lines are
/// rejected. `num_classes` is inferred as max(label)+1 when meta.json is
/// absent.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let edges_path = dir.join("graph.edges");
    let edges_text = fs::read_to_string(&edges_path).map_err(|e| Error::io(&edges_path, e))?;
    let mut edges = Vec::new();
    for (lineno, line) in edges_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.ok_or_else(|| Error::parse(&edges_path, lineno + 1, "expected two indices"))?
                .parse::<usize>()
                .map_err(|e| Error::parse(&edges_path, lineno + 1, e.to_string()))
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::parse(&edges_path, lineno + 1, "trailing tokens"));
        }
        if u == v {
            return Err(Error::parse(&edges_path, lineno + 1, format!("self-loop at node {u}")));
        }
        edges.push((u, v));
    }

    let feats_path = dir.join("features.csv");
    let feats_text = fs::read_to_string(&feats_path).map_err(|e| Error::io(&feats_path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in feats_text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(&feats_path, lineno + 1, format!("non-numeric feature '{tok}'")))
            })
            .collect();
        rows.push(row?);
    }
    let features = Matrix::from_rows(&rows)?;

    let labels_path = dir.join("labels.txt");
    let labels_text = fs::read_to_string(&labels_path).map_err(|e| Error::io(&labels_path, e))?;
    let mut labels = Vec::new();
    for (lineno, line) in labels_text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        labels.push(
            line.parse::<usize>()
                .map_err(|e| Error::parse(&labels_path, lineno + 1, e.to_string()))?,
        );
    }

    if features.rows() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "features.csv has {} rows but labels.txt has {} entries",
            features.rows(),
            labels.len()
        )));
    }

    let meta_path = dir.join("meta.json");
    let (name, num_classes) = if meta_path.exists() {
        let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let meta: Meta = serde_json::from_str(&text)?;
        (meta.name, meta.num_classes)
    } else {
        let inferred = labels.iter().max().map_or(0, |&m| m + 1);
        (
            dir.file_name()
                .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned()),
            inferred,
        )
    };

    let graph = Graph::from_undirected_edges(features.rows(), &edges)?;
    Dataset::new(graph, features, labels, num_classes, name)
}

/// Write the dataset directory format read by [`load_dataset`]. Features are
/// written with Rust's shortest round-trip decimal formatting, so reals
/// survive a save/load cycle bit-exactly.
pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |path: &Path, content: String| -> Result<()> {
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(content.as_bytes()).map_err(|e| Error::io(path, e))
    };

    let mut edges = String::new();
    for (u, v) in dataset.graph.undirected_edges() {
        edges.push_str(&format!("{u} {v}\n"));
    }
    write(&dir.join("graph.edges"), edges)?;

    let mut feats = String::new();
    for i in 0..dataset.features.rows() {
        let row: Vec<String> = dataset.features.row(i).iter().map(|v| format!("{v}")).collect();
        feats.push_str(&row.join(","));
        feats.push('\n');
    }
    write(&dir.join("features.csv"), feats)?;

    let mut labels = String::new();
    for l in &dataset.labels {
        labels.push_str(&format!("{l}\n"));
    }
    write(&dir.join("labels.txt"), labels)?;

    let meta = Meta {
        name: dataset.name.clone(),
        num_classes: dataset.num_classes,
    };
    write(&dir.join("meta.json"), serde_json::to_string_pretty(&meta)?)
}
