//! Monte Carlo harnesses: grid sweeps over (preference, target density
//! window) cells and the measure-ordering experiment, both emitting flat
//! replicate-averaged rows.
//!
//! Every cell derives its own seed from the base seed and the cell
//! indices, so sweeps parallelize over cells and any subset of a sweep
//! reproduces the full run's numbers exactly. Row order is canonical
//! (cell index order) regardless of execution order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genmodel::{simulate, GenConfig, GenError};
use crate::graph::{Directedness, Graph, GraphError, Membership};
use crate::metrics::{
    compartmentalization_of, degree_compartmentalization, modularity, MetricsError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("invalid sweep spec: {}", problems.join("; "))]
    InvalidSpec { problems: Vec<String> },
}

/// Metrics a sweep can aggregate per cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[serde(alias = "upsilon")]
    Compartmentalization,
    #[serde(alias = "upsilon_tilde")]
    DegreeCompartmentalization,
    Modularity,
    #[serde(alias = "f")]
    WithinFraction,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Compartmentalization => "compartmentalization",
            Metric::DegreeCompartmentalization => "degree_compartmentalization",
            Metric::Modularity => "modularity",
            Metric::WithinFraction => "within_fraction",
        }
    }

    fn evaluate(self, g: &Graph, m: &Membership) -> Result<Option<f64>, ExperimentError> {
        let value = match self {
            Metric::Compartmentalization => Some(compartmentalization_of(g, m)?),
            Metric::DegreeCompartmentalization => Some(degree_compartmentalization(g, m)?),
            Metric::Modularity => {
                if g.edge_count() == 0 {
                    None
                } else {
                    Some(modularity(g, m)?)
                }
            }
            Metric::WithinFraction => {
                if g.edge_count() == 0 {
                    None
                } else {
                    Some(g.within_fraction(m)?)
                }
            }
        };
        Ok(value)
    }
}

/// Families of integer group-size profiles used to realize a target
/// within-dyad share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupStyle {
    /// One group of size s plus singletons; s swept exhaustively.
    OneBigGroup,
    /// g groups with sizes differing by at most one; g swept exhaustively.
    EqualGroups,
}

/// Best-effort integer group sizes whose within-dyad share approximates
/// `target`. Callers check the realized value; ties in the search go to
/// the smaller parameter.
pub fn group_sizes_for_target(n: usize, target: f64, style: GroupStyle) -> Vec<usize> {
    debug_assert!(n >= 2);
    let realized = |sizes: &[usize]| -> f64 {
        let within: u64 = sizes.iter().map(|&s| (s * (s - 1)) as u64).sum();
        within as f64 / (n * (n - 1)) as f64
    };
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut consider = |sizes: Vec<usize>| {
        let err = (realized(&sizes) - target).abs();
        if best.as_ref().map_or(true, |(e, _)| err < *e) {
            best = Some((err, sizes));
        }
    };
    match style {
        GroupStyle::OneBigGroup => {
            for big in 1..=n {
                let mut sizes = vec![big];
                sizes.extend(std::iter::repeat(1).take(n - big));
                consider(sizes);
            }
        }
        GroupStyle::EqualGroups => {
            for groups in 1..=n {
                let base = n / groups;
                let extra = n % groups;
                let mut sizes = vec![base + 1; extra];
                sizes.extend(std::iter::repeat(base).take(groups - extra));
                consider(sizes);
            }
        }
    }
    best.expect("n >= 2 always yields a candidate").1
}

/// Spec for a grid sweep: every (preference, target window, target
/// density) combination becomes one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSweepSpec {
    pub n: usize,
    #[serde(default = "default_directedness")]
    pub directedness: Directedness,
    /// Within-community preferences to sweep.
    #[serde(alias = "rho")]
    pub preferences: Vec<f64>,
    /// Target max-within-density values, realized via group-size search.
    pub max_within_density_targets: Vec<f64>,
    #[serde(default = "default_style")]
    pub group_style: GroupStyle,
    /// Target densities, realized as an integer edge budget.
    pub density_targets: Vec<f64>,
    pub replicates: usize,
    pub seed_base: u64,
    pub metrics: Vec<Metric>,
}

fn default_directedness() -> Directedness {
    Directedness::Undirected
}

fn default_style() -> GroupStyle {
    GroupStyle::OneBigGroup
}

/// Spec for the ordering experiment: explicit group sizes, curves of
/// the coefficient and modularity over density for each preference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderingSpec {
    pub n: usize,
    #[serde(default = "default_directedness")]
    pub directedness: Directedness,
    pub group_sizes: Vec<usize>,
    #[serde(alias = "rho")]
    pub preferences: Vec<f64>,
    pub density_targets: Vec<f64>,
    pub replicates: usize,
    pub seed_base: u64,
}

/// One output row: a cell and one metric aggregated over replicates.
/// `mean`/`stddev` are absent when the cell was skipped; `note` then
/// carries the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub preference: f64,
    pub max_within_density_target: f64,
    pub max_within_density_realized: f64,
    pub density_target: f64,
    pub density_realized: f64,
    /// Realized edge budget for the cell.
    pub edges: u64,
    pub metric: Metric,
    pub mean: Option<f64>,
    pub stddev: Option<f64>,
    pub replicates: usize,
    pub status: RowStatus,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Largest tolerated gap between a target window and the best integer
/// group-size profile; beyond it the cell is reported as skipped.
pub const MAX_WINDOW_GAP: f64 = 0.01;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one replicate of one cell: a pure hash of the base seed and
/// the cell/replicate indices, so any subset of a sweep reproduces the
/// full run.
pub fn cell_seed(seed_base: u64, indices: [u64; 4]) -> u64 {
    let mut state = splitmix(seed_base ^ 0xD6E8_FEB8_6659_FD93);
    for ix in indices {
        state = splitmix(state ^ ix);
    }
    state
}

struct Cell {
    pref_idx: usize,
    window_idx: usize,
    density_idx: usize,
}

fn validate_common(
    n: usize,
    preferences: &[f64],
    density_targets: &[f64],
    replicates: usize,
    problems: &mut Vec<String>,
) {
    if n < 2 {
        problems.push(format!("n: need at least 2 nodes, got {n}"));
    }
    if preferences.is_empty() {
        problems.push("preferences: empty".into());
    }
    for p in preferences {
        if !(0.0..=1.0).contains(p) {
            problems.push(format!("preferences: {p} outside [0, 1]"));
        }
    }
    if density_targets.is_empty() {
        problems.push("density_targets: empty".into());
    }
    for d in density_targets {
        if !(0.0..=1.0).contains(d) {
            problems.push(format!("density_targets: {d} outside [0, 1]"));
        }
    }
    if replicates == 0 {
        problems.push("replicates: must be positive".into());
    }
}

impl GridSweepSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let mut problems = Vec::new();
        validate_common(
            self.n,
            &self.preferences,
            &self.density_targets,
            self.replicates,
            &mut problems,
        );
        if self.max_within_density_targets.is_empty() {
            problems.push("max_within_density_targets: empty".into());
        }
        for t in &self.max_within_density_targets {
            if !(0.0..=1.0).contains(t) {
                problems.push(format!("max_within_density_targets: {t} outside [0, 1]"));
            }
        }
        if self.metrics.is_empty() {
            problems.push("metrics: empty".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ExperimentError::InvalidSpec { problems })
        }
    }
}

impl OrderingSpec {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let mut problems = Vec::new();
        validate_common(
            self.n,
            &self.preferences,
            &self.density_targets,
            self.replicates,
            &mut problems,
        );
        if self.group_sizes.iter().sum::<usize>() != self.n {
            problems.push(format!(
                "group_sizes: sum {} does not match n = {}",
                self.group_sizes.iter().sum::<usize>(),
                self.n
            ));
        }
        if self.group_sizes.iter().any(|&s| s == 0) {
            problems.push("group_sizes: zero-size group".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ExperimentError::InvalidSpec { problems })
        }
    }
}

/// Aggregate one cell: `replicates` simulations, one mean/stddev pair
/// per metric.
#[allow(clippy::too_many_arguments)]
fn run_cell(
    membership: &Membership,
    directedness: Directedness,
    edge_budget: usize,
    preference: f64,
    metrics: &[Metric],
    replicates: usize,
    seed_base: u64,
    cell_indices: [u64; 3],
) -> Result<Vec<(Metric, Option<f64>, Option<f64>)>, ExperimentError> {
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(replicates); metrics.len()];
    let mut defined = vec![true; metrics.len()];
    for rep in 0..replicates {
        let seed = cell_seed(
            seed_base,
            [cell_indices[0], cell_indices[1], cell_indices[2], rep as u64],
        );
        let cfg = GenConfig {
            membership: membership.clone(),
            directedness,
            edge_budget,
            preference,
            seed,
        };
        let g = simulate(&cfg)?;
        for (slot, metric) in metrics.iter().enumerate() {
            match metric.evaluate(&g, membership)? {
                Some(v) => samples[slot].push(v),
                None => defined[slot] = false,
            }
        }
    }
    Ok(metrics
        .iter()
        .zip(samples)
        .zip(defined)
        .map(|((&metric, values), ok)| {
            if !ok {
                return (metric, None, None);
            }
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let stddev = if values.len() < 2 {
                0.0
            } else {
                let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
                (ss / (values.len() - 1) as f64).sqrt()
            };
            (metric, Some(mean), Some(stddev))
        })
        .collect())
}

fn realized_budget(target_density: f64, dyads: u64) -> u64 {
    ((target_density * dyads as f64).round() as u64).min(dyads)
}

/// Run a grid sweep. Cells whose target window cannot be realized
/// within [`MAX_WINDOW_GAP`] are reported as skipped rows, not errors.
pub fn run_grid_sweep(spec: &GridSweepSpec) -> Result<SweepResult, ExperimentError> {
    run_grid_sweep_with_progress(spec, |_, _| {})
}

/// Like [`run_grid_sweep`], invoking `progress(done, total)` as cells
/// complete (possibly from worker threads).
pub fn run_grid_sweep_with_progress(
    spec: &GridSweepSpec,
    progress: impl Fn(usize, usize) + Sync,
) -> Result<SweepResult, ExperimentError> {
    spec.validate()?;
    let dyads = spec.directedness.possible_dyads(spec.n);

    struct Window {
        target: f64,
        realized: f64,
        membership: Option<Membership>,
    }
    let windows: Vec<Window> = spec
        .max_within_density_targets
        .iter()
        .map(|&target| {
            let sizes = group_sizes_for_target(spec.n, target, spec.group_style);
            let membership = Membership::from_group_sizes(&sizes)?;
            let realized = membership.max_within_density()?;
            Ok(Window {
                target,
                realized,
                membership: ((realized - target).abs() <= MAX_WINDOW_GAP).then_some(membership),
            })
        })
        .collect::<Result<_, ExperimentError>>()?;

    let cells: Vec<Cell> = (0..spec.preferences.len())
        .flat_map(|pref_idx| {
            (0..windows.len()).flat_map(move |window_idx| {
                (0..spec.density_targets.len()).map(move |density_idx| Cell {
                    pref_idx,
                    window_idx,
                    density_idx,
                })
            })
        })
        .collect();
    let total = cells.len();
    let done = std::sync::atomic::AtomicUsize::new(0);

    let mut rows: Vec<(usize, Vec<SweepRow>)> = cells
        .par_iter()
        .enumerate()
        .map(|(order, cell)| {
            let preference = spec.preferences[cell.pref_idx];
            let window = &windows[cell.window_idx];
            let density_target = spec.density_targets[cell.density_idx];
            let edges = realized_budget(density_target, dyads);
            let density_realized = edges as f64 / dyads as f64;
            let base_row = |metric: Metric| SweepRow {
                preference,
                max_within_density_target: window.target,
                max_within_density_realized: window.realized,
                density_target,
                density_realized,
                edges,
                metric,
                mean: None,
                stddev: None,
                replicates: spec.replicates,
                status: RowStatus::Skipped,
                note: String::new(),
            };
            let rows: Result<Vec<SweepRow>, ExperimentError> = match &window.membership {
                None => Ok(spec
                    .metrics
                    .iter()
                    .map(|&metric| {
                        let mut row = base_row(metric);
                        row.note = format!(
                            "no group-size profile within {MAX_WINDOW_GAP} of target {}",
                            window.target
                        );
                        row
                    })
                    .collect()),
                Some(membership) => run_cell(
                    membership,
                    spec.directedness,
                    edges as usize,
                    preference,
                    &spec.metrics,
                    spec.replicates,
                    spec.seed_base,
                    [
                        cell.pref_idx as u64,
                        cell.window_idx as u64,
                        cell.density_idx as u64,
                    ],
                )
                .map(|stats| {
                    stats
                        .into_iter()
                        .map(|(metric, mean, stddev)| {
                            let mut row = base_row(metric);
                            match mean {
                                Some(_) => {
                                    row.mean = mean;
                                    row.stddev = stddev;
                                    row.status = RowStatus::Ok;
                                }
                                None => {
                                    row.note = "metric undefined on edgeless replicates".into();
                                }
                            }
                            row
                        })
                        .collect()
                }),
            };
            let finished = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            progress(finished, total);
            rows.map(|r| (order, r))
        })
        .collect::<Result<_, ExperimentError>>()?;

    rows.sort_by_key(|(order, _)| *order);
    Ok(SweepResult {
        rows: rows.into_iter().flat_map(|(_, r)| r).collect(),
    })
}

/// Run the ordering experiment: fixed group sizes, coefficient and
/// modularity curves over density for each preference.
pub fn run_ordering_experiment(spec: &OrderingSpec) -> Result<SweepResult, ExperimentError> {
    spec.validate()?;
    let membership = Membership::from_group_sizes(&spec.group_sizes)?;
    let realized_window = membership.max_within_density()?;
    let dyads = spec.directedness.possible_dyads(spec.n);
    let metrics = [Metric::Compartmentalization, Metric::Modularity];

    let cells: Vec<(usize, usize)> = (0..spec.preferences.len())
        .flat_map(|p| (0..spec.density_targets.len()).map(move |d| (p, d)))
        .collect();

    let mut rows: Vec<(usize, Vec<SweepRow>)> = cells
        .par_iter()
        .enumerate()
        .map(|(order, &(pref_idx, density_idx))| {
            let preference = spec.preferences[pref_idx];
            let density_target = spec.density_targets[density_idx];
            let edges = realized_budget(density_target, dyads);
            let stats = run_cell(
                &membership,
                spec.directedness,
                edges as usize,
                preference,
                &metrics,
                spec.replicates,
                spec.seed_base,
                [pref_idx as u64, 0, density_idx as u64],
            )?;
            let rows = stats
                .into_iter()
                .map(|(metric, mean, stddev)| SweepRow {
                    preference,
                    max_within_density_target: realized_window,
                    max_within_density_realized: realized_window,
                    density_target,
                    density_realized: edges as f64 / dyads as f64,
                    edges,
                    metric,
                    mean,
                    stddev,
                    replicates: spec.replicates,
                    status: if mean.is_some() {
                        RowStatus::Ok
                    } else {
                        RowStatus::Skipped
                    },
                    note: if mean.is_some() {
                        String::new()
                    } else {
                        "metric undefined on edgeless replicates".into()
                    },
                })
                .collect();
            Ok((order, rows))
        })
        .collect::<Result<_, ExperimentError>>()?;

    rows.sort_by_key(|(order, _)| *order);
    Ok(SweepResult {
        rows: rows.into_iter().flat_map(|(_, r)| r).collect(),
    })
}
