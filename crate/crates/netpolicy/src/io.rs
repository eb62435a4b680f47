//! File formats.
//!
//! * Graphs: edge-list text with a `n=<count>` header and one `u v` pair per
//!   line, 0-based.
//! * Actor tables: CSV with header `educ,age,income,gender,pric,behavior`.
//! * Costs: CSV with header `actor_id,cost`.
//! * Panels: a directory with one edge list and one `behavior,price` CSV per
//!   wave, plus `panel.json`.
//! * Everything else is JSON.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use netpolicy_core::behavior::{Actor, ActorTable};
use netpolicy_core::dgp::{Panel, TreatmentAssignment, WaveProbabilities, WaveState};
use netpolicy_core::graph::{graph_metrics, Graph};
use netpolicy_core::sampling::{NodeSet, SampleFlag, Strategy};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Writes `text`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable value");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value))
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

pub fn format_edge_list(g: &Graph) -> String {
    let mut s = format!("n={}\n", g.n());
    for (u, v) in g.edges() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

/// Parses an edge list. Blank lines and `#` comments are skipped; self-loops
/// and repeated edges are rejected.
pub fn parse_edge_list(text: &str, path: &Path) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(path, "line 1", "missing `n=<count>` header"))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| Error::parse(path, format!("line {line_no}"), format!("expected `n=<count>`, found `{header}`")))?;
    let mut g = Graph::new(n);
    for (line_no, line) in lines {
        let at = format!("line {line_no}");
        let ids: Vec<&str> = line.split_whitespace().collect();
        if ids.len() != 2 {
            return Err(Error::parse(path, at, "expected two actor ids"));
        }
        let mut pair = [0usize; 2];
        for (slot, id) in pair.iter_mut().zip(&ids) {
            *slot = id.parse().map_err(|_| Error::parse(path, &at, format!("`{id}` is not an actor id")))?;
            if *slot >= n {
                return Err(Error::parse(path, &at, format!("actor {slot} is outside 0..{n}")));
            }
        }
        if pair[0] == pair[1] {
            return Err(Error::parse(path, at, "self-loop"));
        }
        if !g.add_edge(pair[0], pair[1]) {
            return Err(Error::parse(path, at, "repeated edge"));
        }
    }
    Ok(g)
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    parse_edge_list(&read_text(path)?, path)
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    write_text(path, &format_edge_list(g))
}

/// Flat summary of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub n: usize,
    pub edges: usize,
    pub density: f64,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub transitivity: f64,
    pub components: usize,
    /// Share of actors with degree 0, 1, 2, ...
    pub degree_mass: Vec<f64>,
}

impl MetricsRecord {
    pub fn of(g: &Graph) -> Self {
        let m = graph_metrics(g);
        MetricsRecord {
            n: g.n(),
            edges: g.edge_count(),
            density: m.density,
            mean_degree: m.mean_degree,
            max_degree: g.max_degree(),
            transitivity: m.transitivity,
            components: g.component_count(),
            degree_mass: m.degree_distribution.mass().to_vec(),
        }
    }
}

// ---------------------------------------------------------------------------
// Actor tables and costs
// ---------------------------------------------------------------------------

pub const ACTOR_COLUMNS: [&str; 6] = ["educ", "age", "income", "gender", "pric", "behavior"];

/// The synthetic 300-actor table shipped with the crate.
pub const BUNDLED_ACTORS_CSV: &str = include_str!("../data/actors_300.csv");

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader)
}

fn column_indices(headers: &csv::StringRecord, wanted: &[&str], path: &Path) -> Result<Vec<usize>> {
    wanted
        .iter()
        .map(|&name| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::parse(path, "header", format!("missing column `{name}`")))
        })
        .collect()
}

fn records<R: Read>(reader: &mut csv::Reader<R>, path: &Path) -> Result<Vec<csv::StringRecord>> {
    reader
        .records()
        .enumerate()
        .map(|(row, r)| r.map_err(|e| Error::parse(path, format!("row {row}"), e.to_string())))
        .collect()
}

fn number(record: &csv::StringRecord, idx: usize, row: usize, column: &str, path: &Path) -> Result<f64> {
    let cell = record.get(idx).unwrap_or("");
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(path, format!("row {row}, column {column}"), format!("`{cell}` is not a finite number")))
}

fn binary(record: &csv::StringRecord, idx: usize, row: usize, column: &str, path: &Path) -> Result<u8> {
    match number(record, idx, row, column, path)? {
        0.0 => Ok(0),
        1.0 => Ok(1),
        v => Err(Error::parse(path, format!("row {row}, column {column}"), format!("{v} is not 0 or 1"))),
    }
}

/// Parses an actor table. Rows are numbered from 0, excluding the header.
pub fn parse_actor_table<R: Read>(reader: R, path: &Path) -> Result<ActorTable> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::parse(path, "header", e.to_string()))?.clone();
    if headers.iter().all(str::is_empty) {
        return Err(Error::parse(path, "header", "empty file"));
    }
    let idx = column_indices(&headers, &ACTOR_COLUMNS, path)?;
    let rows = records(&mut rdr, path)?;
    if rows.is_empty() {
        return Err(Error::parse(path, "row 0", "no actors"));
    }
    let mut actors = Vec::with_capacity(rows.len());
    for (row, r) in rows.iter().enumerate() {
        actors.push(Actor {
            educ: number(r, idx[0], row, "educ", path)?,
            age: number(r, idx[1], row, "age", path)?,
            income: number(r, idx[2], row, "income", path)?,
            gender: binary(r, idx[3], row, "gender", path)?,
            price: number(r, idx[4], row, "pric", path)?,
            behavior: binary(r, idx[5], row, "behavior", path)?,
        });
    }
    ActorTable::new(actors).map_err(|e| Error::parse(path, "table", e.to_string()))
}

pub fn read_actor_table(path: &Path) -> Result<ActorTable> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_actor_table(file, path)
}

pub fn format_actor_table(table: &ActorTable) -> String {
    let mut s = ACTOR_COLUMNS.join(",");
    s.push('\n');
    for a in &table.actors {
        s.push_str(&format!("{},{},{},{},{},{}\n", a.educ, a.age, a.income, a.gender, a.price, a.behavior));
    }
    s
}

pub fn bundled_actor_table() -> ActorTable {
    parse_actor_table(BUNDLED_ACTORS_CSV.as_bytes(), Path::new("data/actors_300.csv")).expect("bundled table is valid")
}

/// Reads a per-actor cost vector from `actor_id,cost` rows. Every actor in
/// `0..n` must appear exactly once.
pub fn read_costs(path: &Path, n: usize) -> Result<Vec<f64>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_costs(file, path, n)
}

pub fn parse_costs<R: Read>(reader: R, path: &Path, n: usize) -> Result<Vec<f64>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::parse(path, "header", e.to_string()))?.clone();
    let idx = column_indices(&headers, &["actor_id", "cost"], path)?;
    let mut costs = vec![None; n];
    for (row, r) in records(&mut rdr, path)?.iter().enumerate() {
        let id = number(r, idx[0], row, "actor_id", path)?;
        if id < 0.0 || id.fract() != 0.0 || id as usize >= n {
            return Err(Error::parse(path, format!("row {row}, column actor_id"), format!("{id} is not an actor in 0..{n}")));
        }
        let cost = number(r, idx[1], row, "cost", path)?;
        if cost < 0.0 {
            return Err(Error::parse(path, format!("row {row}, column cost"), "cost must be non-negative"));
        }
        if costs[id as usize].replace(cost).is_some() {
            return Err(Error::parse(path, format!("row {row}, column actor_id"), format!("actor {id} listed twice")));
        }
    }
    costs
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| Error::parse(path, "rows", format!("no cost for actor {v}"))))
        .collect()
}

// ---------------------------------------------------------------------------
// Node sets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSetRecord {
    pub strategy: Strategy,
    pub members: Vec<usize>,
    pub achieved_size: usize,
    pub flags: Vec<SampleFlag>,
}

impl From<&NodeSet> for NodeSetRecord {
    fn from(s: &NodeSet) -> Self {
        NodeSetRecord {
            strategy: s.strategy,
            members: s.members.clone(),
            achieved_size: s.len(),
            flags: s.flags.clone(),
        }
    }
}

impl NodeSetRecord {
    pub fn into_node_set(self, path: &Path) -> Result<NodeSet> {
        let mut set = NodeSet::new(self.strategy, self.members);
        if set.len() != self.achieved_size {
            return Err(Error::parse(
                path,
                "achieved_size",
                format!("{} distinct members but achieved_size {}", set.len(), self.achieved_size),
            ));
        }
        set.flags = self.flags;
        Ok(set)
    }
}

pub fn read_node_set(path: &Path) -> Result<NodeSet> {
    read_json::<NodeSetRecord>(path)?.into_node_set(path)
}

pub fn write_node_set(path: &Path, set: &NodeSet) -> Result<()> {
    write_json(path, &NodeSetRecord::from(set))
}

// ---------------------------------------------------------------------------
// Panels
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFiles {
    pub label: String,
    pub edges: String,
    pub attributes: String,
}

/// `panel.json`: wave files plus the inputs that produced the panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelManifest {
    pub n: usize,
    pub waves: Vec<WaveFiles>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub probabilities: Option<WaveProbabilities>,
    #[serde(default)]
    pub assignment: Option<TreatmentAssignment>,
}

pub const PANEL_MANIFEST: &str = "panel.json";

fn format_wave_attributes(w: &WaveState) -> String {
    let mut s = String::from("behavior,price\n");
    for (b, p) in w.behavior.iter().zip(&w.price) {
        s.push_str(&format!("{b},{p}\n"));
    }
    s
}

fn parse_wave_attributes(text: &str, path: &Path, n: usize) -> Result<(Vec<u8>, Vec<f64>)> {
    let mut rdr = csv_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| Error::parse(path, "header", e.to_string()))?.clone();
    let idx = column_indices(&headers, &["behavior", "price"], path)?;
    let rows = records(&mut rdr, path)?;
    if rows.len() != n {
        return Err(Error::parse(path, "rows", format!("expected {n} actors, found {}", rows.len())));
    }
    let mut behavior = Vec::with_capacity(n);
    let mut price = Vec::with_capacity(n);
    for (row, r) in rows.iter().enumerate() {
        behavior.push(binary(r, idx[0], row, "behavior", path)?);
        price.push(number(r, idx[1], row, "price", path)?);
    }
    Ok((behavior, price))
}

/// Writes `panel` into `dir` and returns the manifest written.
pub fn write_panel(
    dir: &Path,
    panel: &Panel,
    seed: Option<u64>,
    probabilities: Option<WaveProbabilities>,
    assignment: Option<TreatmentAssignment>,
) -> Result<PanelManifest> {
    let mut waves = Vec::new();
    for (label, w) in panel.labels.iter().zip(&panel.waves) {
        let files = WaveFiles {
            label: label.clone(),
            edges: format!("wave_{label}.edges"),
            attributes: format!("wave_{label}.csv"),
        };
        write_graph(&dir.join(&files.edges), &w.graph)?;
        write_text(&dir.join(&files.attributes), &format_wave_attributes(w))?;
        waves.push(files);
    }
    let manifest = PanelManifest {
        n: panel.n(),
        waves,
        seed,
        probabilities,
        assignment,
    };
    write_json(&dir.join(PANEL_MANIFEST), &manifest)?;
    Ok(manifest)
}

pub fn read_panel(dir: &Path) -> Result<(Panel, PanelManifest)> {
    let manifest: PanelManifest = read_json(&dir.join(PANEL_MANIFEST))?;
    let mut waves = Vec::with_capacity(manifest.waves.len());
    for files in &manifest.waves {
        let edges_path = dir.join(&files.edges);
        let graph = read_graph(&edges_path)?;
        if graph.n() != manifest.n {
            return Err(Error::parse(&edges_path, "header", format!("expected n={}, found n={}", manifest.n, graph.n())));
        }
        let attr_path = dir.join(&files.attributes);
        let (behavior, price) = parse_wave_attributes(&read_text(&attr_path)?, &attr_path, manifest.n)?;
        waves.push(WaveState::new(graph, behavior, price)?);
    }
    let mut panel = Panel::new(waves)?;
    panel.labels = manifest.waves.iter().map(|w| w.label.clone()).collect();
    Ok((panel, manifest))
}

/// Every file a panel directory refers to, manifest included.
pub fn panel_files(dir: &Path, manifest: &PanelManifest) -> Vec<PathBuf> {
    let mut v = vec![dir.join(PANEL_MANIFEST)];
    for w in &manifest.waves {
        v.push(dir.join(&w.edges));
        v.push(dir.join(&w.attributes));
    }
    v
}
