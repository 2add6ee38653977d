//! Two-mode projection, weighted density, per-period measure series,
//! and the dependent-correlation comparison of two measures against a
//! ground-truth series.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Directedness, Graph, GraphError, Membership};
use crate::metrics::{
    eval_compartmentalization, modularity, summarize, CompartmentalizationSummary, MetricsError,
};
use crate::stats::student_t_two_sided_p;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolarizationError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("tie ({actor}, {item}) out of range for {actors} actors and {items} items")]
    TieOutOfRange {
        actor: usize,
        item: usize,
        actors: usize,
        items: usize,
    },
    #[error("duplicate tie ({actor}, {item})")]
    DuplicateTie { actor: usize, item: usize },
    #[error("series of length {len} is too short, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },
    #[error("series lengths differ: {0:?}")]
    LengthMismatch(Vec<usize>),
    #[error("series is constant; correlations and standardization are undefined")]
    ConstantSeries,
    #[error("duplicate period label {0:?}")]
    DuplicatePeriod(String),
}

/// An actor-item affiliation graph.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    actors: usize,
    items: usize,
    ties: Vec<(usize, usize)>,
}

impl BipartiteGraph {
    pub fn new(
        actors: usize,
        items: usize,
        ties: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, PolarizationError> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (actor, item) in ties {
            if actor >= actors || item >= items {
                return Err(PolarizationError::TieOutOfRange {
                    actor,
                    item,
                    actors,
                    items,
                });
            }
            if !seen.insert((actor, item)) {
                return Err(PolarizationError::DuplicateTie { actor, item });
            }
            out.push((actor, item));
        }
        Ok(BipartiteGraph {
            actors,
            items,
            ties: out,
        })
    }

    pub fn actor_count(&self) -> usize {
        self.actors
    }

    pub fn item_count(&self) -> usize {
        self.items
    }

    pub fn ties(&self) -> &[(usize, usize)] {
        &self.ties
    }
}

/// Weighted one-mode projection: actors joined by the number of items
/// they co-affiliate with. Zero-weight dyads are absent; the result is
/// undirected with edges in sorted dyad order.
pub fn project_one_mode(b: &BipartiteGraph) -> Result<Graph, PolarizationError> {
    let mut per_item: Vec<Vec<usize>> = vec![Vec::new(); b.items];
    for &(actor, item) in &b.ties {
        per_item[item].push(actor);
    }
    let mut weights: HashMap<(usize, usize), f64> = HashMap::new();
    for actors in &mut per_item {
        actors.sort_unstable();
        for (i, &u) in actors.iter().enumerate() {
            for &v in &actors[i + 1..] {
                *weights.entry((u, v)).or_insert(0.0) += 1.0;
            }
        }
    }
    let mut edges: Vec<(usize, usize, f64)> = weights
        .into_iter()
        .map(|((u, v), w)| (u, v, w))
        .collect();
    edges.sort_unstable_by_key(|&(u, v, _)| (u, v));
    Ok(Graph::new(b.actors, Directedness::Undirected, edges)?)
}

/// Weighted density: the weight sum divided by the mean present-tie
/// weight times the maximal edge count. Implemented exactly as stated
/// even though it reduces algebraically to the binary density whenever
/// all present weights are equal (and in fact always); the reduction is
/// covered by tests rather than silently substituted. Edgeless graphs
/// return 0 by convention.
pub fn weighted_density(g: &Graph) -> Result<f64, PolarizationError> {
    if g.node_count() < 2 {
        return Err(GraphError::DegenerateGraph { n: g.node_count() }.into());
    }
    if g.edge_count() == 0 {
        return Ok(0.0);
    }
    let weight_sum = g.total_weight();
    let mean_present = weight_sum / g.edge_count() as f64;
    let max_edges = g.possible_dyads() as f64;
    Ok(weight_sum / (mean_present * max_edges))
}

/// Per-period measures on the weighted projection: the
/// compartmentalization coefficient (weighted within fraction, weighted
/// density) and modularity from the weighted mixing matrix.
pub fn period_metrics(
    b: &BipartiteGraph,
    m: &Membership,
) -> Result<(f64, f64), PolarizationError> {
    let g = project_one_mode(b)?;
    g.check_membership(m)?;
    let f = g.within_fraction(m)?;
    let d = weighted_density(&g)?;
    let dm = m.max_within_density()?;
    let coefficient = eval_compartmentalization(f, d, dm);
    let q = modularity(&g, m)?;
    Ok((coefficient, q))
}

/// Full summary for one period's projection, with the density taken
/// from [`weighted_density`].
pub fn weighted_summary(
    b: &BipartiteGraph,
    m: &Membership,
) -> Result<CompartmentalizationSummary, PolarizationError> {
    let g = project_one_mode(b)?;
    let mut summary = summarize(&g, m)?;
    summary.density = weighted_density(&g)?;
    if let Some(f) = summary.within_fraction {
        summary.compartmentalization =
            eval_compartmentalization(f, summary.density, summary.max_within_density);
    }
    Ok(summary)
}

/// Aligned per-period values for the two measures and the ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSeries {
    pub periods: Vec<String>,
    pub compartmentalization: Vec<f64>,
    pub modularity: Vec<f64>,
    pub ground_truth: Vec<f64>,
}

impl PeriodSeries {
    pub fn new(
        periods: Vec<String>,
        compartmentalization: Vec<f64>,
        modularity: Vec<f64>,
        ground_truth: Vec<f64>,
    ) -> Result<Self, PolarizationError> {
        let lens = [
            periods.len(),
            compartmentalization.len(),
            modularity.len(),
            ground_truth.len(),
        ];
        if lens.iter().any(|&l| l != lens[0]) {
            return Err(PolarizationError::LengthMismatch(lens.to_vec()));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &periods {
            if !seen.insert(p.clone()) {
                return Err(PolarizationError::DuplicatePeriod(p.clone()));
            }
        }
        Ok(PeriodSeries {
            periods,
            compartmentalization,
            modularity,
            ground_truth,
        })
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }
}

/// Zero-mean, unit sample-standard-deviation copy of the series.
pub fn standardize(series: &[f64]) -> Result<Vec<f64>, PolarizationError> {
    if series.len() < 2 {
        return Err(PolarizationError::SeriesTooShort {
            len: series.len(),
            min: 2,
        });
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let ss: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Err(PolarizationError::ConstantSeries);
    }
    Ok(series.iter().map(|x| (x - mean) / sd).collect())
}

/// Pearson correlation, two-pass.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, PolarizationError> {
    if x.len() != y.len() {
        return Err(PolarizationError::LengthMismatch(vec![x.len(), y.len()]));
    }
    if x.len() < 2 {
        return Err(PolarizationError::SeriesTooShort {
            len: x.len(),
            min: 2,
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(PolarizationError::ConstantSeries);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Outcome of comparing two correlated measures against a shared
/// ground-truth series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HotellingReport {
    pub t: f64,
    pub df: u64,
    pub p_two_sided: f64,
    /// One-sided tail for the alternative "the first series correlates
    /// higher with the ground truth than the second".
    pub p_one_sided: f64,
    pub r_first_truth: f64,
    pub r_second_truth: f64,
    pub r_first_second: f64,
    pub periods: usize,
}

/// Hotelling's comparison of two dependent correlations that share the
/// variable `truth`: t on n - 3 degrees of freedom from the three
/// pairwise correlations. Swapping the two series negates `t` exactly
/// and leaves `p_two_sided` unchanged.
pub fn hotelling_compare(
    first: &[f64],
    second: &[f64],
    truth: &[f64],
) -> Result<HotellingReport, PolarizationError> {
    let n = first.len();
    if second.len() != n || truth.len() != n {
        return Err(PolarizationError::LengthMismatch(vec![
            n,
            second.len(),
            truth.len(),
        ]));
    }
    if n < 4 {
        return Err(PolarizationError::SeriesTooShort { len: n, min: 4 });
    }
    let r13 = pearson(first, truth)?;
    let r23 = pearson(second, truth)?;
    let r12 = pearson(first, second)?;
    let df = (n - 3) as u64;
    let diff = r13 - r23;
    let t = if diff == 0.0 {
        0.0
    } else {
        // Sub-expressions are kept symmetric in (r13, r23) so that
        // swapping the series negates t bit for bit.
        let sumsq = r13 * r13 + r23 * r23;
        let det = 1.0 - r12 * r12 - sumsq + 2.0 * r12 * (r13 * r23);
        if det <= 0.0 {
            // Singular correlation structure; the statistic degenerates.
            f64::INFINITY.copysign(diff)
        } else {
            diff * ((df as f64 * (1.0 + r12)) / (2.0 * det)).sqrt()
        }
    };
    let p_two_sided = student_t_two_sided_p(t, df as f64);
    let p_one_sided = if t >= 0.0 {
        p_two_sided / 2.0
    } else {
        1.0 - p_two_sided / 2.0
    };
    Ok(HotellingReport {
        t,
        df,
        p_two_sided,
        p_one_sided,
        r_first_truth: r13,
        r_second_truth: r23,
        r_first_second: r12,
        periods: n,
    })
}

/// One period's inputs: the affiliation graph, the actor membership,
/// and the ground-truth polarization value.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodData {
    pub label: String,
    pub graph: BipartiteGraph,
    pub membership: Membership,
    pub ground_truth: f64,
}

/// Everything the polarize pipeline produces.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationOutput {
    pub series: PeriodSeries,
    pub standardized_compartmentalization: Vec<f64>,
    pub standardized_modularity: Vec<f64>,
    pub standardized_ground_truth: Vec<f64>,
    pub report: HotellingReport,
}

/// Per-period measures, standardized series, and the correlation
/// comparison of the coefficient and modularity against the ground
/// truth.
pub fn run_polarization(periods: &[PeriodData]) -> Result<PolarizationOutput, PolarizationError> {
    if periods.len() < 4 {
        return Err(PolarizationError::SeriesTooShort {
            len: periods.len(),
            min: 4,
        });
    }
    let mut labels = Vec::with_capacity(periods.len());
    let mut coefficient = Vec::with_capacity(periods.len());
    let mut q = Vec::with_capacity(periods.len());
    let mut truth = Vec::with_capacity(periods.len());
    for period in periods {
        let (c, m) = period_metrics(&period.graph, &period.membership)?;
        labels.push(period.label.clone());
        coefficient.push(c);
        q.push(m);
        truth.push(period.ground_truth);
    }
    let series = PeriodSeries::new(labels, coefficient, q, truth)?;
    let report = hotelling_compare(
        &series.compartmentalization,
        &series.modularity,
        &series.ground_truth,
    )?;
    Ok(PolarizationOutput {
        standardized_compartmentalization: standardize(&series.compartmentalization)?,
        standardized_modularity: standardize(&series.modularity)?,
        standardized_ground_truth: standardize(&series.ground_truth)?,
        series,
        report,
    })
}
