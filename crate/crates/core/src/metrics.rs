//! Compartmentalization coefficients and modularity for a fixed
//! membership.
//!
//! The headline quantity is the compartmentalization coefficient: the
//! within-community edge fraction minus the largest density attainable
//! with only within-community dyads, rescaled by how close the observed
//! density sits to the saturation point of the relevant dyad pool. It is
//! bounded in [-1, 1] on every graph, hits +1 exactly when all within
//! dyads are filled and nothing else, and -1 in the mirror-image case,
//! which makes values comparable across graphs of different size and
//! group structure. Modularity is provided alongside for comparison.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Directedness, Graph, GraphError, Membership};

/// Slack used when checking that a `(F, D, D_M)` triple could have come
/// from a real dyad pool; absorbs float round-off in density ratios.
pub const FEASIBILITY_EPS: f64 = 1e-12;

/// |F - D_M| below this is treated as the branch boundary, where the
/// coefficient is exactly zero.
pub const BRANCH_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("infeasible combination (within_fraction={f}, density={d}, max_within_density={dm}): no dyad pool can produce it")]
    InfeasibleTriple { f: f64, d: f64, dm: f64 },
    #[error("within_fraction={f} sits on the branch boundary max_within_density={dm}; the gradient is undefined there")]
    BranchBoundary { f: f64, dm: f64 },
}

/// Group-to-group edge proportions. Entry `(i, j)` is the share of total
/// edge weight joining group `i` to group `j`; rows and columns follow
/// the membership's dense labels. For undirected graphs each between
/// edge contributes half to `(i, j)` and half to `(j, i)`, so the matrix
/// is symmetric and still sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MixMatrix {
    groups: usize,
    weights: Vec<f64>,
    total: f64,
}

impl MixMatrix {
    pub fn groups(&self) -> usize {
        self.groups
    }

    /// Proportion entry `e_ij`.
    pub fn proportion(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.groups + j] / self.total
    }

    /// Row sums of the proportion matrix.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.groups)
            .map(|i| self.row_weight(i) / self.total)
            .collect()
    }

    /// Column sums of the proportion matrix.
    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.groups)
            .map(|j| self.col_weight(j) / self.total)
            .collect()
    }

    fn weight_at(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.groups + j]
    }

    fn row_weight(&self, i: usize) -> f64 {
        (0..self.groups).map(|j| self.weight_at(i, j)).sum()
    }

    fn col_weight(&self, j: usize) -> f64 {
        (0..self.groups).map(|i| self.weight_at(i, j)).sum()
    }
}

/// Build the group mixing matrix. Errors on edgeless graphs.
pub fn mix_matrix(g: &Graph, m: &Membership) -> Result<MixMatrix, MetricsError> {
    g.check_membership(m)?;
    if g.edge_count() == 0 {
        return Err(GraphError::NoEdges.into());
    }
    let groups = m.group_count();
    let labels = m.labels();
    let mut weights = vec![0.0; groups * groups];
    let mut total = 0.0;
    for e in g.edges() {
        let (gi, gj) = (labels[e.source], labels[e.target]);
        match g.directedness() {
            Directedness::Directed => {
                weights[gi * groups + gj] += e.weight;
                total += e.weight;
            }
            Directedness::Undirected => {
                // Accumulate both orientations so the proportions stay
                // symmetric; the doubled total keeps the sum at 1.
                weights[gi * groups + gj] += e.weight;
                weights[gj * groups + gi] += e.weight;
                total += 2.0 * e.weight;
            }
        }
    }
    Ok(MixMatrix {
        groups,
        weights,
        total,
    })
}

/// Modularity for a fixed membership: the within-group proportion minus
/// the product of the matching row and column sums of the mixing matrix.
pub fn modularity(g: &Graph, m: &Membership) -> Result<f64, MetricsError> {
    let mm = mix_matrix(g, m)?;
    let mut trace = 0.0;
    let mut row = vec![0.0; mm.groups];
    let mut col = vec![0.0; mm.groups];
    for i in 0..mm.groups {
        for j in 0..mm.groups {
            let w = mm.weight_at(i, j);
            row[i] += w;
            col[j] += w;
            if i == j {
                trace += w;
            }
        }
    }
    let mid: f64 = (0..mm.groups).map(|i| row[i] * col[i]).sum();
    // Single division per term: integer-valued accumulators (unweighted
    // graphs) reduce exactly, so small cases match integer-ratio oracles
    // bit for bit.
    Ok(trace / mm.total - mid / (mm.total * mm.total))
}

fn check_triple(f: f64, d: f64, dm: f64) -> Result<(), MetricsError> {
    let in_unit = |x: f64| x >= -FEASIBILITY_EPS && x <= 1.0 + FEASIBILITY_EPS;
    let feasible = in_unit(f)
        && in_unit(d)
        && in_unit(dm)
        && f * d <= dm + FEASIBILITY_EPS
        && (1.0 - f) * d <= (1.0 - dm) + FEASIBILITY_EPS;
    if !feasible {
        return Err(MetricsError::InfeasibleTriple { f, d, dm });
    }
    Ok(())
}

/// Evaluate the coefficient without the feasibility gate. Used on values
/// read straight off a graph, where the conventions below make the result
/// well defined even at degenerate inputs:
/// - 0 when `d == 0` (the within fraction carries no information),
/// - 0 on the branch boundary `f == dm` (zero numerator), which also
///   covers `dm` of 0 or 1 since `f` is pinned there.
pub(crate) fn eval_compartmentalization(f: f64, d: f64, dm: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let lead = f - dm;
    if lead.abs() < BRANCH_EPS {
        return 0.0;
    }
    if lead > 0.0 {
        let gap = d - dm;
        lead * (1.0 - gap * gap) / (1.0 - dm)
    } else {
        let gap = d - (1.0 - dm);
        lead * (1.0 - gap * gap) / dm
    }
}

/// Compartmentalization coefficient from the `(F, D, D_M)` triple.
/// Rejects triples no dyad pool could produce.
pub fn compartmentalization(f: f64, d: f64, dm: f64) -> Result<f64, MetricsError> {
    check_triple(f, d, dm)?;
    Ok(eval_compartmentalization(f, d, dm))
}

/// Compartmentalization coefficient of a graph under a membership;
/// 0 for edgeless graphs.
pub fn compartmentalization_of(g: &Graph, m: &Membership) -> Result<f64, MetricsError> {
    g.check_membership(m)?;
    if g.edge_count() == 0 {
        return Ok(0.0);
    }
    let f = g.within_fraction(m)?;
    let d = g.density()?;
    let dm = m.max_within_density()?;
    Ok(eval_compartmentalization(f, d, dm))
}

/// Variant of the coefficient that rescales by mean degree over maximum
/// degree instead of the density window, for settings where nodes cannot
/// plausibly reach every member of their group. Degrees are weighted;
/// directed graphs use in-strength. Exactly 0 on edgeless graphs.
pub fn degree_compartmentalization(g: &Graph, m: &Membership) -> Result<f64, MetricsError> {
    g.check_membership(m)?;
    if g.edge_count() == 0 {
        return Ok(0.0);
    }
    let n = g.node_count();
    let mut degree = vec![0.0f64; n];
    for e in g.edges() {
        match g.directedness() {
            Directedness::Undirected => {
                degree[e.source] += e.weight;
                degree[e.target] += e.weight;
            }
            Directedness::Directed => degree[e.target] += e.weight,
        }
    }
    let total: f64 = degree.iter().sum();
    let max = degree.iter().copied().fold(0.0f64, f64::max);
    let ratio = total / (n as f64 * max);
    let f = g.within_fraction(m)?;
    let dm = m.max_within_density()?;
    Ok((f - dm) * ratio)
}

/// Partial derivatives of the coefficient with respect to the within
/// fraction and the density, for the branch the point sits on. The
/// branch boundary itself is rejected: the slope in `F` jumps there.
/// Inputs only need to lie in the unit interval; the formulas extend
/// smoothly beyond the pool-feasible region.
pub fn compartmentalization_gradient(
    f: f64,
    d: f64,
    dm: f64,
) -> Result<(f64, f64), MetricsError> {
    let in_unit = |x: f64| x >= -FEASIBILITY_EPS && x <= 1.0 + FEASIBILITY_EPS;
    if !(in_unit(f) && in_unit(d) && in_unit(dm)) {
        return Err(MetricsError::InfeasibleTriple { f, d, dm });
    }
    let lead = f - dm;
    if lead.abs() < BRANCH_EPS {
        return Err(MetricsError::BranchBoundary { f, dm });
    }
    if lead > 0.0 {
        let gap = d - dm;
        Ok((
            (1.0 - gap * gap) / (1.0 - dm),
            -2.0 * lead * gap / (1.0 - dm),
        ))
    } else {
        let gap = d - (1.0 - dm);
        Ok(((1.0 - gap * gap) / dm, -2.0 * lead * gap / dm))
    }
}

/// Everything the `measure` command reports for one graph/membership
/// pair. `within_fraction` and `modularity` are undefined (None) on
/// edgeless graphs; both coefficients fall back to 0 there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompartmentalizationSummary {
    pub within_fraction: Option<f64>,
    pub density: f64,
    pub max_within_density: f64,
    pub compartmentalization: f64,
    pub degree_compartmentalization: f64,
    pub modularity: Option<f64>,
}

/// Compute the full summary for a graph/membership pair.
pub fn summarize(g: &Graph, m: &Membership) -> Result<CompartmentalizationSummary, MetricsError> {
    g.check_membership(m)?;
    let density = g.density()?;
    let max_within_density = m.max_within_density()?;
    if g.edge_count() == 0 {
        return Ok(CompartmentalizationSummary {
            within_fraction: None,
            density,
            max_within_density,
            compartmentalization: 0.0,
            degree_compartmentalization: 0.0,
            modularity: None,
        });
    }
    Ok(CompartmentalizationSummary {
        within_fraction: Some(g.within_fraction(m)?),
        density,
        max_within_density,
        compartmentalization: compartmentalization_of(g, m)?,
        degree_compartmentalization: degree_compartmentalization(g, m)?,
        modularity: Some(modularity(g, m)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn undirected(n: usize, pairs: &[(usize, usize)]) -> Graph {
        Graph::unweighted(n, Directedness::Undirected, pairs.iter().copied()).unwrap()
    }

    fn groups(sizes: &[usize]) -> Membership {
        Membership::from_group_sizes(sizes).unwrap()
    }

    #[test]
    fn mix_matrix_proportions() {
        // One community: everything lands in the single entry.
        let g = undirected(4, &[(0, 1), (1, 2), (2, 3)]);
        let mm = mix_matrix(&g, &groups(&[4])).unwrap();
        assert_eq!(mm.proportion(0, 0), 1.0);

        // Two groups of 4, ten edges, five within each group.
        let pairs = [
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 3),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 6),
            (5, 7),
        ];
        let g = undirected(8, &pairs);
        let mm = mix_matrix(&g, &groups(&[4, 4])).unwrap();
        assert_eq!(mm.proportion(0, 0), 0.5);
        assert_eq!(mm.proportion(1, 1), 0.5);
        assert_eq!(mm.proportion(0, 1), 0.0);

        // A single between edge splits across the two off-diagonal cells.
        let g = undirected(4, &[(0, 2)]);
        let mm = mix_matrix(&g, &groups(&[2, 2])).unwrap();
        assert_eq!(mm.proportion(0, 1), 0.5);
        assert_eq!(mm.proportion(1, 0), 0.5);
        assert_eq!(mm.proportion(0, 0), 0.0);

        let empty = undirected(4, &[]);
        assert!(matches!(
            mix_matrix(&empty, &groups(&[2, 2])),
            Err(MetricsError::Graph(GraphError::NoEdges))
        ));
    }

    #[test]
    fn modularity_examples() {
        let g = undirected(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(modularity(&g, &groups(&[4])).unwrap(), 0.0);

        let pairs = [
            (0, 1),
            (0, 2),
            (0, 3),
            (1, 2),
            (1, 3),
            (4, 5),
            (4, 6),
            (4, 7),
            (5, 6),
            (5, 7),
        ];
        let g = undirected(8, &pairs);
        assert_eq!(modularity(&g, &groups(&[4, 4])).unwrap(), 0.5);
    }

    #[test]
    fn modularity_near_zero_for_arbitrary_split_of_complete_graph() {
        let n = 20;
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                pairs.push((u, v));
            }
        }
        let g = undirected(n, &pairs);
        // Alternating labels: an even split unrelated to the edges.
        let m = Membership::new((0..n).map(|i| i % 2).collect()).unwrap();
        let q = modularity(&g, &m).unwrap();
        assert!(q.abs() < 0.05, "q = {q}");
    }

    #[test]
    fn coefficient_examples() {
        for dm in [0.2, 0.5, 0.8] {
            assert!((compartmentalization(1.0, dm, dm).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(compartmentalization(0.0, 0.5, 0.5).unwrap(), -1.0);
        for d in [0.0, 0.3, 0.7] {
            assert_eq!(compartmentalization(0.5, d, 0.5).unwrap(), 0.0);
        }
        assert!((compartmentalization(0.8, 0.5, 0.5).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn coefficient_rejects_infeasible_triples() {
        // F*D exceeds what the within pool can hold.
        assert!(matches!(
            compartmentalization(1.0, 0.9, 0.3),
            Err(MetricsError::InfeasibleTriple { .. })
        ));
        assert!(matches!(
            compartmentalization(0.0, 0.9, 0.5),
            Err(MetricsError::InfeasibleTriple { .. })
        ));
        assert!(matches!(
            compartmentalization(1.2, 0.1, 0.5),
            Err(MetricsError::InfeasibleTriple { .. })
        ));
    }

    #[test]
    fn graph_coefficient_conventions() {
        // Complete one-community graph: F = D_M = 1 pins the value to 0.
        let mut pairs = Vec::new();
        for u in 0..5 {
            for v in (u + 1)..5 {
                pairs.push((u, v));
            }
        }
        let g = undirected(5, &pairs);
        assert_eq!(compartmentalization_of(&g, &groups(&[5])).unwrap(), 0.0);

        // All within dyads filled, no between edges, D_M = 0.5.
        let m = groups(&[3, 3]);
        let g = undirected(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]);
        assert_eq!(compartmentalization_of(&g, &m).unwrap(), 1.0);

        // All between dyads filled, none within: the mirror case.
        let mut between = Vec::new();
        for u in 0..3 {
            for v in 3..6 {
                between.push((u, v));
            }
        }
        let g = undirected(6, &between);
        assert_eq!(compartmentalization_of(&g, &m).unwrap(), -1.0);

        let empty = undirected(6, &[]);
        assert_eq!(compartmentalization_of(&empty, &m).unwrap(), 0.0);
    }

    #[test]
    fn degree_variant_examples() {
        let m = groups(&[3, 3]);
        let empty = undirected(6, &[]);
        assert_eq!(degree_compartmentalization(&empty, &m).unwrap(), 0.0);

        // 2-regular graph: degree ratio is exactly 1, so the variant
        // equals F - D_M.
        let g = undirected(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        let f = g.within_fraction(&m).unwrap();
        let dm = m.max_within_density().unwrap();
        assert_eq!(degree_compartmentalization(&g, &m).unwrap(), f - dm);

        // Star on 5 nodes, hub in its own community: mean degree 8/5,
        // max 4, F = 0, D_M = 0.6.
        let star = undirected(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let m = groups(&[1, 4]);
        let got = degree_compartmentalization(&star, &m).unwrap();
        assert!((got - (0.0 - 0.6) * 0.4).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn gradient_examples() {
        // Stationary point of the quadratic factor: zero density slope.
        let (_, dd) = compartmentalization_gradient(0.9, 0.5, 0.5).unwrap();
        assert_eq!(dd, 0.0);

        let (df, _) = compartmentalization_gradient(1.0, 0.6, 0.5).unwrap();
        assert!((df - 1.98).abs() < 1e-15);

        assert!(matches!(
            compartmentalization_gradient(0.5, 0.3, 0.5),
            Err(MetricsError::BranchBoundary { .. })
        ));
    }

    #[test]
    fn summary_handles_edgeless_graphs() {
        let m = groups(&[3, 3]);
        let empty = undirected(6, &[]);
        let s = summarize(&empty, &m).unwrap();
        assert_eq!(s.within_fraction, None);
        assert_eq!(s.modularity, None);
        assert_eq!(s.compartmentalization, 0.0);
        assert_eq!(s.degree_compartmentalization, 0.0);
        assert_eq!(s.density, 0.0);
    }

    #[test]
    fn coefficient_depends_only_on_the_triple() {
        // Different node counts and group structures, identical
        // (F, D, D_M): the coefficient must agree exactly.
        //
        // g1: n = 6, sizes {3, 2, 1}: D_M = 4/15; 5 edges (2 within)
        //     give D = 1/3, F = 2/5.
        // g2: n = 10, sizes {4, 3, 3}: D_M = 12/45 = 4/15; 15 edges
        //     (6 within) give D = 15/45 = 1/3, F = 6/15 = 2/5.
        let m1 = groups(&[3, 2, 1]);
        let g1 = undirected(6, &[(0, 1), (3, 4), (0, 3), (1, 4), (2, 5)]);
        let m2 = groups(&[4, 3, 3]);
        let g2 = undirected(
            10,
            &[
                (0, 1),
                (0, 2),
                (1, 2),
                (4, 5),
                (7, 8),
                (7, 9),
                (0, 4),
                (0, 5),
                (0, 6),
                (1, 4),
                (1, 5),
                (2, 7),
                (2, 8),
                (3, 9),
                (3, 4),
            ],
        );
        assert_eq!(
            g1.within_fraction(&m1).unwrap(),
            g2.within_fraction(&m2).unwrap()
        );
        assert_eq!(g1.density().unwrap(), g2.density().unwrap());
        assert_eq!(
            m1.max_within_density().unwrap(),
            m2.max_within_density().unwrap()
        );
        assert_eq!(
            compartmentalization_of(&g1, &m1).unwrap(),
            compartmentalization_of(&g2, &m2).unwrap()
        );
    }
}
