//! File ingestion and output writers.
//!
//! Inputs are delimited text: comma by default, tab when the first data
//! line contains one. Lines starting with `#` are comments. A header
//! row is optional and recognized by its first column name. Node,
//! period, and community identifiers are arbitrary strings, mapped to
//! dense indices deterministically in first-appearance order.
//!
//! All file writes go through a temp file in the destination directory
//! followed by a rename, so readers never observe partial output.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::experiments::{RowStatus, SweepResult};
use crate::graph::{Directedness, Graph, GraphError, Membership};
use crate::metrics::CompartmentalizationSummary;
use crate::polarization::{BipartiteGraph, PeriodData, PolarizationError, PolarizationOutput};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {message}")]
    File { path: String, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Polarization(#[from] PolarizationError),
}

/// String identifiers interned in first-appearance order.
#[derive(Debug, Default, Clone)]
pub struct NodeTable {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, id: &str) -> usize {
        if let Some(&ix) = self.index.get(id) {
            return ix;
        }
        let ix = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), ix);
        ix
    }

    pub fn get(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, ix: usize) -> &str {
        &self.ids[ix]
    }
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

/// Comma unless the first data line contains a tab.
fn detect_delimiter(content: &str) -> u8 {
    for line in content.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        return if line.contains('\t') { b'\t' } else { b',' };
    }
    b','
}

struct Record {
    fields: Vec<String>,
    line: u64,
}

/// Parse delimited rows, skipping comments, blank lines, and an
/// optional header whose first column matches one of `header_names`.
fn read_records(path: &Path, header_names: &[&str]) -> Result<Vec<Record>, IoError> {
    let content = read_to_string(path)?;
    let delimiter = detect_delimiter(&content);
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(content.as_bytes());
    let mut records = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| IoError::File {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let fields: Vec<String> = record.iter().map(|f| f.to_string()).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        records.push(Record { fields, line });
    }
    if let Some(first) = records.first() {
        let head = first.fields[0].to_ascii_lowercase();
        if header_names.iter().any(|&h| h == head) {
            records.remove(0);
        }
    }
    Ok(records)
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> IoError {
    IoError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// One edge-list row: endpoint ids and an optional positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRow {
    pub source: String,
    pub target: String,
    pub weight: Option<f64>,
    pub line: u64,
}

/// Read an edge list of `source, target[, weight]` rows.
pub fn read_edge_rows(path: &Path) -> Result<Vec<EdgeRow>, IoError> {
    let records = read_records(path, &["source", "src", "from"])?;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        if r.fields.len() < 2 {
            return Err(parse_error(
                path,
                r.line,
                format!("expected source and target, got {} field(s)", r.fields.len()),
            ));
        }
        if r.fields.len() > 3 {
            return Err(parse_error(
                path,
                r.line,
                format!("expected at most 3 fields, got {}", r.fields.len()),
            ));
        }
        if r.fields[0].is_empty() || r.fields[1].is_empty() {
            return Err(parse_error(path, r.line, "empty node id"));
        }
        let weight = match r.fields.get(2) {
            None => None,
            Some(f) if f.is_empty() => None,
            Some(f) => {
                let w: f64 = f.parse().map_err(|_| {
                    parse_error(path, r.line, format!("weight {f:?} is not a number"))
                })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(parse_error(
                        path,
                        r.line,
                        format!("weight {w} must be a positive real"),
                    ));
                }
                Some(w)
            }
        };
        rows.push(EdgeRow {
            source: r.fields[0].clone(),
            target: r.fields[1].clone(),
            weight,
            line: r.line,
        });
    }
    Ok(rows)
}

/// One membership row: node id and community label.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipRow {
    pub node: String,
    pub community: String,
    pub line: u64,
}

/// Read a `node, community` file.
pub fn read_membership_rows(path: &Path) -> Result<Vec<MembershipRow>, IoError> {
    let records = read_records(path, &["node", "node_id", "id", "actor"])?;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        if r.fields.len() != 2 {
            return Err(parse_error(
                path,
                r.line,
                format!("expected node and community, got {} field(s)", r.fields.len()),
            ));
        }
        if r.fields[0].is_empty() || r.fields[1].is_empty() {
            return Err(parse_error(path, r.line, "empty field"));
        }
        rows.push(MembershipRow {
            node: r.fields[0].clone(),
            community: r.fields[1].clone(),
            line: r.line,
        });
    }
    Ok(rows)
}

/// A graph plus aligned membership as loaded from disk.
pub struct LoadedGraph {
    pub graph: Graph,
    pub membership: Membership,
    pub nodes: NodeTable,
}

/// Combine an edge list and a membership file. Node indices follow
/// first appearance in the edge file; nodes present only in the
/// membership file are appended after, as isolated nodes. Every edge
/// endpoint must be covered by the membership exactly once.
pub fn load_graph(
    edge_path: &Path,
    membership_path: &Path,
    directedness: Directedness,
) -> Result<LoadedGraph, IoError> {
    let edge_rows = read_edge_rows(edge_path)?;
    let membership_rows = read_membership_rows(membership_path)?;

    let mut nodes = NodeTable::new();
    for row in &edge_rows {
        nodes.intern(&row.source);
        nodes.intern(&row.target);
    }
    let edge_node_count = nodes.len();

    let mut community_of: HashMap<usize, &str> = HashMap::new();
    for row in &membership_rows {
        let ix = nodes.intern(&row.node);
        if community_of.insert(ix, &row.community).is_some() {
            return Err(parse_error(
                membership_path,
                row.line,
                format!("node {:?} assigned more than once", row.node),
            ));
        }
    }
    for ix in 0..edge_node_count {
        if !community_of.contains_key(&ix) {
            return Err(IoError::File {
                path: membership_path.display().to_string(),
                message: format!("node {:?} has no community assignment", nodes.id(ix)),
            });
        }
    }

    let membership = Membership::densify(
        (0..nodes.len()).map(|ix| community_of[&ix].to_string()),
    )?;

    let mut seen: HashMap<(usize, usize), u64> = HashMap::new();
    let mut edges = Vec::with_capacity(edge_rows.len());
    for row in &edge_rows {
        let u = nodes.get(&row.source).expect("interned above");
        let v = nodes.get(&row.target).expect("interned above");
        if u == v {
            return Err(parse_error(
                edge_path,
                row.line,
                format!("self-loop on node {:?}", row.source),
            ));
        }
        let key = match directedness {
            Directedness::Directed => (u, v),
            Directedness::Undirected => (u.min(v), u.max(v)),
        };
        if let Some(first) = seen.insert(key, row.line) {
            return Err(parse_error(
                edge_path,
                row.line,
                format!(
                    "duplicate dyad {:?} -- {:?} (first listed on line {first})",
                    row.source, row.target
                ),
            ));
        }
        edges.push((u, v, row.weight.unwrap_or(1.0)));
    }
    let graph = Graph::new(nodes.len(), directedness, edges)?;
    Ok(LoadedGraph {
        graph,
        membership,
        nodes,
    })
}

/// Serialize a graph as `source,target[,weight]` rows; the weight
/// column appears only when some weight differs from 1.
pub fn edge_list_csv(g: &Graph) -> String {
    let weighted = g.edges().iter().any(|e| e.weight != 1.0);
    let mut out = String::new();
    if weighted {
        out.push_str("source,target,weight\n");
        for e in g.edges() {
            let _ = writeln!(out, "{},{},{}", e.source, e.target, e.weight);
        }
    } else {
        out.push_str("source,target\n");
        for e in g.edges() {
            let _ = writeln!(out, "{},{}", e.source, e.target);
        }
    }
    out
}

/// Serialize a membership as `node,community` rows.
pub fn membership_csv(m: &Membership) -> String {
    let mut out = String::from("node,community\n");
    for (node, label) in m.labels().iter().enumerate() {
        let _ = writeln!(out, "{node},{label}");
    }
    out
}

/// Serialize a summary as pretty JSON (machine-facing output).
pub fn summary_json(summary: &CompartmentalizationSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

/// Human-readable table for a summary. Never parsed by tests or tools.
pub fn summary_table(summary: &CompartmentalizationSummary) -> String {
    let fmt = |v: Option<f64>| match v {
        Some(x) => format!("{x:.6}"),
        None => "undefined (no edges)".to_string(),
    };
    let mut out = String::new();
    let _ = writeln!(out, "{:<28} {}", "within_fraction", fmt(summary.within_fraction));
    let _ = writeln!(out, "{:<28} {:.6}", "density", summary.density);
    let _ = writeln!(out, "{:<28} {:.6}", "max_within_density", summary.max_within_density);
    let _ = writeln!(out, "{:<28} {:.6}", "compartmentalization", summary.compartmentalization);
    let _ = writeln!(
        out,
        "{:<28} {:.6}",
        "degree_compartmentalization", summary.degree_compartmentalization
    );
    let _ = writeln!(out, "{:<28} {}", "modularity", fmt(summary.modularity));
    out
}

/// Sweep rows as CSV: one row per cell and metric.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "preference,max_within_density_target,max_within_density_realized,density_target,density_realized,edges,metric,mean,stddev,replicates,status,note\n",
    );
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            row.preference,
            row.max_within_density_target,
            row.max_within_density_realized,
            row.density_target,
            row.density_realized,
            row.edges,
            row.metric.name(),
            opt(row.mean),
            opt(row.stddev),
            row.replicates,
            match row.status {
                RowStatus::Ok => "ok",
                RowStatus::Skipped => "skipped",
            },
            csv_quote(&row.note),
        );
    }
    out
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Sweep rows as pretty JSON.
pub fn sweep_json(result: &SweepResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("sweep result serializes");
    s.push('\n');
    s
}

/// One actor-item tie with its period.
#[derive(Debug, Clone, PartialEq)]
pub struct TieRow {
    pub period: String,
    pub actor: String,
    pub item: String,
    pub line: u64,
}

/// Read a `period, actor_id, item_id` file.
pub fn read_tie_rows(path: &Path) -> Result<Vec<TieRow>, IoError> {
    let records = read_records(path, &["period"])?;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        if r.fields.len() != 3 {
            return Err(parse_error(
                path,
                r.line,
                format!("expected period, actor, item; got {} field(s)", r.fields.len()),
            ));
        }
        if r.fields.iter().any(|f| f.is_empty()) {
            return Err(parse_error(path, r.line, "empty field"));
        }
        rows.push(TieRow {
            period: r.fields[0].clone(),
            actor: r.fields[1].clone(),
            item: r.fields[2].clone(),
            line: r.line,
        });
    }
    Ok(rows)
}

/// One per-period membership row.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMembershipRow {
    pub period: String,
    pub actor: String,
    pub group: String,
    pub line: u64,
}

/// Read a `period, actor_id, group` file.
pub fn read_period_membership_rows(path: &Path) -> Result<Vec<PeriodMembershipRow>, IoError> {
    let records = read_records(path, &["period"])?;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        if r.fields.len() != 3 {
            return Err(parse_error(
                path,
                r.line,
                format!("expected period, actor, group; got {} field(s)", r.fields.len()),
            ));
        }
        if r.fields.iter().any(|f| f.is_empty()) {
            return Err(parse_error(path, r.line, "empty field"));
        }
        rows.push(PeriodMembershipRow {
            period: r.fields[0].clone(),
            actor: r.fields[1].clone(),
            group: r.fields[2].clone(),
            line: r.line,
        });
    }
    Ok(rows)
}

/// Read a `period, value` ground-truth file.
pub fn read_ground_truth_rows(path: &Path) -> Result<Vec<(String, f64, u64)>, IoError> {
    let records = read_records(path, &["period"])?;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        if r.fields.len() != 2 {
            return Err(parse_error(
                path,
                r.line,
                format!("expected period and value, got {} field(s)", r.fields.len()),
            ));
        }
        let value: f64 = r.fields[1].parse().map_err(|_| {
            parse_error(
                path,
                r.line,
                format!("value {:?} is not a number", r.fields[1]),
            )
        })?;
        if !value.is_finite() {
            return Err(parse_error(path, r.line, "value must be finite"));
        }
        rows.push((r.fields[0].clone(), value, r.line));
    }
    Ok(rows)
}

/// Order periods numerically when every label parses as an integer,
/// lexicographically otherwise.
pub fn sort_period_labels(labels: &mut [String]) {
    let all_numeric = labels.iter().all(|l| l.parse::<i64>().is_ok());
    if all_numeric {
        labels.sort_by_key(|l| l.parse::<i64>().expect("checked"));
    } else {
        labels.sort();
    }
}

/// Load and align the three polarize inputs into per-period data.
/// The period sets of the three files must coincide; mismatches are
/// reported with the missing labels by name.
pub fn load_polarization(
    ties_path: &Path,
    membership_path: &Path,
    truth_path: &Path,
) -> Result<Vec<PeriodData>, IoError> {
    let ties = read_tie_rows(ties_path)?;
    let memberships = read_period_membership_rows(membership_path)?;
    let truths = read_ground_truth_rows(truth_path)?;

    let tie_periods: HashSet<&str> = ties.iter().map(|r| r.period.as_str()).collect();
    let member_periods: HashSet<&str> = memberships.iter().map(|r| r.period.as_str()).collect();
    let truth_periods: HashSet<&str> = truths.iter().map(|(p, _, _)| p.as_str()).collect();

    let mut complaints = Vec::new();
    let mut complain = |have: &HashSet<&str>, have_name: &str, miss: &HashSet<&str>, miss_name: &str| {
        let mut missing: Vec<&str> = have.difference(miss).copied().collect();
        if !missing.is_empty() {
            missing.sort_unstable();
            complaints.push(format!(
                "periods [{}] present in {have_name} but missing from {miss_name}",
                missing.join(", ")
            ));
        }
    };
    complain(&tie_periods, "ties", &member_periods, "membership");
    complain(&member_periods, "membership", &tie_periods, "ties");
    complain(&tie_periods, "ties", &truth_periods, "ground truth");
    complain(&truth_periods, "ground truth", &tie_periods, "ties");
    if !complaints.is_empty() {
        return Err(IoError::File {
            path: ties_path.display().to_string(),
            message: complaints.join("; "),
        });
    }

    let mut truth_by_period: HashMap<&str, f64> = HashMap::new();
    for (period, value, line) in &truths {
        if truth_by_period.insert(period.as_str(), *value).is_some() {
            return Err(parse_error(
                truth_path,
                *line,
                format!("period {period:?} listed more than once"),
            ));
        }
    }

    let mut labels: Vec<String> = tie_periods.iter().map(|s| s.to_string()).collect();
    sort_period_labels(&mut labels);

    let mut periods = Vec::with_capacity(labels.len());
    for label in labels {
        // Actors in membership-file order; the membership may list
        // actors with no ties, which count as isolated nodes.
        let mut actors = NodeTable::new();
        let mut groups = Vec::new();
        for row in memberships.iter().filter(|r| r.period == label) {
            let ix = actors.intern(&row.actor);
            if ix != groups.len() {
                return Err(parse_error(
                    membership_path,
                    row.line,
                    format!("actor {:?} assigned more than once in period {label:?}", row.actor),
                ));
            }
            groups.push(row.group.clone());
        }
        let membership = Membership::densify(groups)?;

        let mut items = NodeTable::new();
        let mut period_ties = Vec::new();
        for row in ties.iter().filter(|r| r.period == label) {
            let actor = actors.get(&row.actor).ok_or_else(|| {
                parse_error(
                    ties_path,
                    row.line,
                    format!(
                        "actor {:?} has no membership row in period {label:?}",
                        row.actor
                    ),
                )
            })?;
            let item = items.intern(&row.item);
            period_ties.push(((actor, item), row.line));
        }
        let mut seen = HashMap::new();
        for ((actor, item), line) in &period_ties {
            if let Some(first) = seen.insert((*actor, *item), *line) {
                return Err(parse_error(
                    ties_path,
                    *line,
                    format!("duplicate tie (first listed on line {first})"),
                ));
            }
        }
        let graph = BipartiteGraph::new(
            actors.len(),
            items.len(),
            period_ties.iter().map(|(t, _)| *t),
        )?;
        periods.push(PeriodData {
            ground_truth: truth_by_period[label.as_str()],
            label,
            graph,
            membership,
        });
    }
    Ok(periods)
}

/// Per-period CSV with raw and standardized series.
pub fn polarization_csv(output: &PolarizationOutput) -> String {
    let mut out = String::from(
        "period,compartmentalization,modularity,ground_truth,compartmentalization_std,modularity_std,ground_truth_std\n",
    );
    for i in 0..output.series.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_quote(&output.series.periods[i]),
            output.series.compartmentalization[i],
            output.series.modularity[i],
            output.series.ground_truth[i],
            output.standardized_compartmentalization[i],
            output.standardized_modularity[i],
            output.standardized_ground_truth[i],
        );
    }
    out
}

/// Write through a temp file in the target directory plus rename.
pub fn atomic_write(path: &Path, content: &str) -> Result<(), IoError> {
    let to_io_error = |source: std::io::Error| IoError::Write {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    if !dir.exists() {
        std::fs::create_dir_all(&dir).map_err(to_io_error)?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(to_io_error)?;
    tmp.write_all(content.as_bytes()).map_err(to_io_error)?;
    tmp.persist(path).map_err(|e| to_io_error(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn edge_rows_parse_with_comments_headers_and_weights() {
        let f = write_temp("# fixture\nsource,target,weight\na,b,2.5\nb,c\nc,d,\n");
        let rows = read_edge_rows(f.path()).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].weight, Some(2.5));
        assert_eq!(rows[1].weight, None);
        assert_eq!(rows[2].weight, None);
        assert_eq!(rows[0].line, 3);
    }

    #[test]
    fn tsv_is_detected_from_the_first_data_line() {
        let f = write_temp("# comment\na\tb\nb\tc\n");
        let rows = read_edge_rows(f.path()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].source, "a");
        assert_eq!(rows[0].target, "b");
    }

    #[test]
    fn bad_weight_reports_the_line() {
        let f = write_temp("a,b,1.0\nb,c,-3\n");
        let err = read_edge_rows(f.path()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains(":2:"), "{text}");
        assert!(text.contains("positive"), "{text}");
    }

    #[test]
    fn load_graph_maps_ids_in_first_appearance_order() {
        let edges = write_temp("b,a\nc,a\n");
        let members = write_temp("b,left\na,right\nc,left\nd,right\n");
        let loaded = load_graph(edges.path(), members.path(), Directedness::Undirected).unwrap();
        // b first, then a, then c from the edge file; d appended from
        // the membership file as an isolated node.
        assert_eq!(loaded.nodes.id(0), "b");
        assert_eq!(loaded.nodes.id(1), "a");
        assert_eq!(loaded.nodes.id(2), "c");
        assert_eq!(loaded.nodes.id(3), "d");
        assert_eq!(loaded.graph.node_count(), 4);
        assert_eq!(loaded.graph.edge_count(), 2);
        // Communities densified in membership-file order: left = 0.
        assert_eq!(loaded.membership.labels(), &[0, 1, 0, 1]);
    }

    #[test]
    fn load_graph_rejects_uncovered_nodes_and_duplicates() {
        let edges = write_temp("a,b\n");
        let members = write_temp("a,x\n");
        let err = load_graph(edges.path(), members.path(), Directedness::Undirected).unwrap_err();
        assert!(err.to_string().contains("no community assignment"));

        let edges = write_temp("a,b\nb,a\n");
        let members = write_temp("a,x\nb,x\n");
        let err = load_graph(edges.path(), members.path(), Directedness::Undirected).unwrap_err();
        assert!(err.to_string().contains("duplicate dyad"), "{err}");
        // The same file parses cleanly as directed: the arcs differ.
        assert!(load_graph(edges.path(), members.path(), Directedness::Directed).is_ok());

        let edges = write_temp("a,b\n");
        let members = write_temp("a,x\nb,x\na,y\n");
        let err = load_graph(edges.path(), members.path(), Directedness::Undirected).unwrap_err();
        assert!(err.to_string().contains("assigned more than once"));
    }

    #[test]
    fn period_sorting_prefers_numeric_order() {
        let mut labels = vec!["100".to_string(), "96".to_string(), "99".to_string()];
        sort_period_labels(&mut labels);
        assert_eq!(labels, ["96", "99", "100"]);
        let mut labels = vec!["b".to_string(), "a10".to_string(), "a2".to_string()];
        sort_period_labels(&mut labels);
        assert_eq!(labels, ["a10", "a2", "b"]);
    }

    #[test]
    fn polarization_loading_aligns_periods() {
        let ties = write_temp("period,actor,item\n1,u,i1\n1,v,i1\n2,u,i2\n2,v,i2\n");
        let members = write_temp("period,actor,group\n1,u,p\n1,v,q\n2,u,p\n2,v,q\n");
        let truth = write_temp("period,value\n1,0.5\n2,0.7\n");
        let periods = load_polarization(ties.path(), members.path(), truth.path()).unwrap();
        assert_eq!(periods.len(), 2);
        assert_eq!(periods[0].label, "1");
        assert_eq!(periods[0].ground_truth, 0.5);
        assert_eq!(periods[0].graph.actor_count(), 2);

        let truth_missing = write_temp("period,value\n1,0.5\n");
        let err =
            load_polarization(ties.path(), members.path(), truth_missing.path()).unwrap_err();
        assert!(err.to_string().contains("missing from ground truth"), "{err}");
        assert!(err.to_string().contains('2'), "{err}");
    }

    #[test]
    fn atomic_write_round_trips(){
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("out.txt");
        atomic_write(&path, "payload\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "payload\n");
    }
}
