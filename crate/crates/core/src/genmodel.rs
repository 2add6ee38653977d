//! Sequential edge-placement model with a tunable preference for
//! within-community ties.
//!
//! Each step first decides whether the next edge lands inside a
//! community, with probability driven by the preference and by how much
//! room is left in the within/between dyad pools, then picks the dyad
//! uniformly from the chosen pool. A preference of 1 fills within dyads
//! for as long as any remain, 0 does the opposite, and 0.5 reduces to a
//! uniform draw over all open dyads.
//!
//! Pools are explicit arrays with swap-remove deletion: uniform sampling
//! is O(1) and the probability comes from exact integer counts, so there
//! is no rejection loop to degenerate at high density. Sampling degrees
//! non-uniformly (to impose a degree distribution) is an extension
//! point, not implemented: both endpoints are always uniform given the
//! pool.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Directedness, DensityProfile, Graph, GraphError, Membership};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge budget {budget} exceeds the {capacity} available dyads")]
    BudgetExceedsCapacity { budget: usize, capacity: usize },
    #[error("preference {preference} outside [0, 1]")]
    PreferenceOutOfRange { preference: f64 },
    #[error("graph is full: both dyad pools are exhausted")]
    GraphFull,
    #[error("dyad pool is exhausted")]
    PoolExhausted,
    #[error("profile has more mass than its pools allow (within {within_density} > {max_within_density}, or the between analogue)")]
    InfeasibleProfile {
        within_density: f64,
        max_within_density: f64,
    },
}

/// Probability that the next edge forms within a community, from a
/// density profile. The numerator is the unused within capacity scaled
/// by the preference; the denominator adds the unused between capacity
/// scaled by the complement. When the denominator vanishes only one
/// pool still has room, so the choice is forced: 1 if only within dyads
/// remain, 0 if only between dyads remain. Both pools empty is an error.
pub fn within_edge_probability(
    profile: &DensityProfile,
    preference: f64,
) -> Result<f64, GenError> {
    if !(0.0..=1.0).contains(&preference) {
        return Err(GenError::PreferenceOutOfRange { preference });
    }
    const EPS: f64 = 1e-12;
    let within_room = profile.max_within_density - profile.within_density;
    let between_room = (1.0 - profile.max_within_density) - profile.between_density;
    if within_room < -EPS || between_room < -EPS {
        return Err(GenError::InfeasibleProfile {
            within_density: profile.within_density,
            max_within_density: profile.max_within_density,
        });
    }
    let within_room = within_room.max(0.0);
    let between_room = between_room.max(0.0);
    if within_room <= EPS && between_room <= EPS {
        return Err(GenError::GraphFull);
    }
    let num = within_room * preference;
    let den = num + between_room * (1.0 - preference);
    if den == 0.0 {
        return Ok(if within_room > EPS { 1.0 } else { 0.0 });
    }
    Ok(num / den)
}

/// One pool of unoccupied dyads with O(1) uniform draws.
#[derive(Debug, Clone)]
pub struct DyadPool {
    dyads: Vec<(u32, u32)>,
}

impl DyadPool {
    pub fn new(dyads: Vec<(u32, u32)>) -> Self {
        DyadPool { dyads }
    }

    pub fn len(&self) -> usize {
        self.dyads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dyads.is_empty()
    }

    /// Draw a dyad uniformly and remove it from the pool.
    pub fn sample(&mut self, rng: &mut impl Rng) -> Result<(u32, u32), GenError> {
        if self.dyads.is_empty() {
            return Err(GenError::PoolExhausted);
        }
        let idx = rng.random_range(0..self.dyads.len());
        Ok(self.dyads.swap_remove(idx))
    }
}

/// The within- and between-community pools for a membership.
#[derive(Debug, Clone)]
pub struct DyadPools {
    pub within: DyadPool,
    pub between: DyadPool,
}

impl DyadPools {
    pub fn build(m: &Membership, directedness: Directedness) -> Self {
        let n = m.len();
        let mut within = Vec::new();
        let mut between = Vec::new();
        for u in 0..n {
            let start = match directedness {
                Directedness::Directed => 0,
                Directedness::Undirected => u + 1,
            };
            for v in start..n {
                if u == v {
                    continue;
                }
                let dyad = (u as u32, v as u32);
                if m.same_group(u, v) {
                    within.push(dyad);
                } else {
                    between.push(dyad);
                }
            }
        }
        DyadPools {
            within: DyadPool::new(within),
            between: DyadPool::new(between),
        }
    }

    pub fn remaining(&self) -> usize {
        self.within.len() + self.between.len()
    }

    /// Within probability from the exact remaining counts: algebraically
    /// the same as [`within_edge_probability`] after dividing through by
    /// the total dyad count, but immune to density round-off.
    pub fn within_probability(&self, preference: f64) -> Result<f64, GenError> {
        if !(0.0..=1.0).contains(&preference) {
            return Err(GenError::PreferenceOutOfRange { preference });
        }
        let w = self.within.len() as f64;
        let b = self.between.len() as f64;
        if self.within.is_empty() && self.between.is_empty() {
            return Err(GenError::GraphFull);
        }
        let num = w * preference;
        let den = num + b * (1.0 - preference);
        if den == 0.0 {
            return Ok(if self.within.is_empty() { 0.0 } else { 1.0 });
        }
        Ok(num / den)
    }
}

/// Inputs of one simulation run.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub membership: Membership,
    pub directedness: Directedness,
    /// Number of edges to place.
    pub edge_budget: usize,
    /// Within-community preference in [0, 1].
    pub preference: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        if !(0.0..=1.0).contains(&self.preference) {
            return Err(GenError::PreferenceOutOfRange {
                preference: self.preference,
            });
        }
        let capacity = self.directedness.possible_dyads(self.membership.len()) as usize;
        if self.edge_budget > capacity {
            return Err(GenError::BudgetExceedsCapacity {
                budget: self.edge_budget,
                capacity,
            });
        }
        Ok(())
    }
}

/// Run the generative process: place exactly `edge_budget` edges, one at
/// a time. Fully deterministic for a given config, including the seed.
pub fn simulate(cfg: &GenConfig) -> Result<Graph, GenError> {
    cfg.validate()?;
    let mut pools = DyadPools::build(&cfg.membership, cfg.directedness);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = Vec::with_capacity(cfg.edge_budget);
    for _ in 0..cfg.edge_budget {
        let p = pools.within_probability(cfg.preference)?;
        let within = rng.random_bool(p.clamp(0.0, 1.0));
        // The chosen pool cannot be empty: an empty pool forces the
        // probability to 0 or 1 away from it.
        let pool = if within {
            &mut pools.within
        } else {
            &mut pools.between
        };
        let (u, v) = pool.sample(&mut rng)?;
        edges.push((u as usize, v as usize, 1.0));
    }
    Ok(Graph::new(
        cfg.membership.len(),
        cfg.directedness,
        edges,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn two_fives() -> Membership {
        Membership::from_group_sizes(&[5, 5]).unwrap()
    }

    fn config(preference: f64, edge_budget: usize, seed: u64) -> GenConfig {
        GenConfig {
            membership: two_fives(),
            directedness: Directedness::Undirected,
            edge_budget,
            preference,
            seed,
        }
    }

    #[test]
    fn probability_conventions() {
        let profile = DensityProfile {
            density: 0.1,
            within_density: 0.1,
            between_density: 0.0,
            max_within_density: 0.5,
        };
        // Full preference wins whenever within room remains.
        assert_eq!(within_edge_probability(&profile, 1.0).unwrap(), 1.0);

        // Within pool saturated: numerator vanishes.
        let saturated = DensityProfile {
            density: 0.5,
            within_density: 0.5,
            between_density: 0.0,
            max_within_density: 0.5,
        };
        assert_eq!(within_edge_probability(&saturated, 0.3).unwrap(), 0.0);
        // ... and a full preference is then forced to the between pool.
        assert_eq!(within_edge_probability(&saturated, 1.0).unwrap(), 0.0);

        // Symmetric pools, no preference.
        let fresh = DensityProfile {
            density: 0.0,
            within_density: 0.0,
            between_density: 0.0,
            max_within_density: 0.5,
        };
        assert_eq!(within_edge_probability(&fresh, 0.5).unwrap(), 0.5);
        // Preference equal to the within share of dyads keeps the
        // within proportion constant; at 0.5 the fixed point is 0.5.
        assert_eq!(within_edge_probability(&fresh, 0.5).unwrap(), 0.5);

        let full = DensityProfile {
            density: 1.0,
            within_density: 0.5,
            between_density: 0.5,
            max_within_density: 0.5,
        };
        assert_eq!(
            within_edge_probability(&full, 0.5),
            Err(GenError::GraphFull)
        );
    }

    #[test]
    fn probability_is_invariant_under_proportional_pool_fill() {
        // Filling both pools by the same proportion leaves the
        // probability unchanged, whatever the preference.
        for dm in [0.2, 0.5, 0.8] {
            for pref in [0.1, 0.4, 0.9] {
                let fresh = DensityProfile {
                    density: 0.0,
                    within_density: 0.0,
                    between_density: 0.0,
                    max_within_density: dm,
                };
                let p0 = within_edge_probability(&fresh, pref).unwrap();
                for fill in [0.25, 0.5, 0.75] {
                    let part = DensityProfile {
                        density: fill,
                        within_density: dm * fill,
                        between_density: (1.0 - dm) * fill,
                        max_within_density: dm,
                    };
                    let p = within_edge_probability(&part, pref).unwrap();
                    assert!((p - p0).abs() < 1e-12, "dm={dm} pref={pref} fill={fill}");
                }
            }
        }
    }

    #[test]
    fn pool_and_profile_probabilities_agree() {
        let m = two_fives();
        let pools = DyadPools::build(&m, Directedness::Undirected);
        assert_eq!(pools.within.len(), 20);
        assert_eq!(pools.between.len(), 25);
        let fresh = DensityProfile {
            density: 0.0,
            within_density: 0.0,
            between_density: 0.0,
            max_within_density: m.max_within_density().unwrap(),
        };
        for pref in [0.0, 0.3, 0.7, 1.0] {
            let a = pools.within_probability(pref).unwrap();
            let b = within_edge_probability(&fresh, pref).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_uniform_and_without_replacement() {
        let dyads: Vec<(u32, u32)> = (0..10).map(|i| (i, i + 10)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(99);

        // Draw-with-reset frequencies: each dyad near 1/10. The
        // chi-square bound is the df = 9 critical value at alpha = 0.001.
        let draws = 100_000;
        let mut counts = [0usize; 10];
        for _ in 0..draws {
            let mut pool = DyadPool::new(dyads.clone());
            let (u, _) = pool.sample(&mut rng).unwrap();
            counts[u as usize] += 1;
        }
        let expected = draws as f64 / 10.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let diff = c as f64 - expected;
                diff * diff / expected
            })
            .sum();
        assert!(chi2 < 27.877, "chi2 = {chi2}, counts = {counts:?}");
        for &c in &counts {
            assert!((c as f64 / draws as f64 - 0.1).abs() < 0.01);
        }

        // Without reset: all draws distinct, pool drains to empty.
        let mut pool = DyadPool::new(dyads.clone());
        let mut seen = std::collections::HashSet::new();
        for _ in 0..10 {
            assert!(seen.insert(pool.sample(&mut rng).unwrap()));
        }
        assert_eq!(pool.sample(&mut rng), Err(GenError::PoolExhausted));

        // Pool of one: that dyad with certainty.
        let mut pool = DyadPool::new(vec![(3, 4)]);
        assert_eq!(pool.sample(&mut rng).unwrap(), (3, 4));
    }

    #[test]
    fn extreme_preferences_fill_only_one_pool() {
        let m = two_fives();
        // Full within preference, budget inside the within capacity.
        let g = simulate(&config(1.0, 18, 7)).unwrap();
        assert_eq!(g.edge_count(), 18);
        assert_eq!(g.within_fraction(&m).unwrap(), 1.0);

        // Full between preference, budget inside the between capacity.
        let g = simulate(&config(0.0, 24, 7)).unwrap();
        assert_eq!(g.within_fraction(&m).unwrap(), 0.0);
    }

    #[test]
    fn saturating_the_graph_reaches_the_pool_split_exactly() {
        let m = two_fives();
        for pref in [0.0, 0.25, 1.0] {
            let g = simulate(&config(pref, 45, 11)).unwrap();
            assert_eq!(g.density().unwrap(), 1.0);
            // F equals D_M bit for bit: same integer ratio.
            assert_eq!(
                g.within_fraction(&m).unwrap(),
                m.max_within_density().unwrap()
            );
        }
    }

    #[test]
    fn identical_configs_give_identical_edge_sequences() {
        let a = simulate(&config(0.6, 30, 123)).unwrap();
        let b = simulate(&config(0.6, 30, 123)).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = simulate(&config(0.6, 30, 124)).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn simulation_budget_is_prefix_stable_and_never_overdraws() {
        // Same seed, growing budget: each run extends the previous one,
        // and every prefix keeps both pools within capacity.
        let m = two_fives();
        let full = simulate(&config(0.8, 45, 5)).unwrap();
        for k in 0..=45usize {
            let g = simulate(&config(0.8, k, 5)).unwrap();
            assert_eq!(g.edges(), &full.edges()[..k]);
            let p = g.density_profile(&m).unwrap();
            assert!(p.within_density <= p.max_within_density + 1e-12);
            assert!(p.between_density <= (1.0 - p.max_within_density) + 1e-12);
        }
    }

    #[test]
    fn within_indicator_tracks_the_step_probability() {
        // At step k the indicator for "edge landed within" is Bernoulli
        // with the probability computed from the step k-1 profile. Check
        // the empirical mean over many replicates against the averaged
        // probability, within 3 binomial sigma.
        let m = two_fives();
        let step = 5usize;
        let replicates = 10_000u64;
        let pref = 0.7;
        let mut indicator_sum = 0.0;
        let mut prob_sum = 0.0;
        let mut var_sum = 0.0;
        for rep in 0..replicates {
            let seed = 1_000_000 + rep;
            let prefix = simulate(&config(pref, step - 1, seed)).unwrap();
            let profile = prefix.density_profile(&m).unwrap();
            let p = within_edge_probability(&profile, pref).unwrap();
            let full = simulate(&config(pref, step, seed)).unwrap();
            let last = full.edges()[step - 1];
            if m.same_group(last.source, last.target) {
                indicator_sum += 1.0;
            }
            prob_sum += p;
            var_sum += p * (1.0 - p);
        }
        let diff = (indicator_sum - prob_sum).abs() / replicates as f64;
        let sigma = var_sum.sqrt() / replicates as f64;
        assert!(diff <= 3.0 * sigma, "diff = {diff}, 3 sigma = {}", 3.0 * sigma);
    }

    #[test]
    fn budget_over_capacity_is_rejected() {
        let err = simulate(&config(0.5, 46, 1)).unwrap_err();
        assert_eq!(
            err,
            GenError::BudgetExceedsCapacity {
                budget: 46,
                capacity: 45
            }
        );
        assert!(matches!(
            simulate(&config(1.5, 10, 1)).unwrap_err(),
            GenError::PreferenceOutOfRange { .. }
        ));
    }

    #[test]
    fn directed_simulation_uses_ordered_dyads() {
        let m = two_fives();
        let cfg = GenConfig {
            membership: m.clone(),
            directedness: Directedness::Directed,
            edge_budget: 90,
            preference: 0.5,
            seed: 3,
        };
        let g = simulate(&cfg).unwrap();
        assert_eq!(g.edge_count(), 90);
        assert!(g.is_directed());
        assert_eq!(g.density().unwrap(), 1.0);
        let pools = DyadPools::build(&m, Directedness::Directed);
        assert_eq!(pools.within.len(), 40);
        assert_eq!(pools.between.len(), 50);
    }
}
