//! Energy-guided selection of key neighbors and key walks under a token
//! budget.
//!
//! A node is eligible for the description of target `t` when its energy is
//! at least `H(t)`. Neighbors are admitted in descending-energy order while
//! the rendered description stays inside the neighbor share of the budget;
//! walks then grow hop by hop through eligible unvisited nodes and spend
//! whatever budget remains. Every cost is measured on the actual rendered
//! text, so the final description never exceeds the budget.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::Rng;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::apportion;
use crate::description::{CompactDescription, DescriptionError, DescriptionRenderer};
use crate::energy::{Energies, NodeEnergy};
use crate::graph::{GraphError, NodeIx, RelationId};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SelectionConfig {
    /// Share of the effective budget offered to neighbors first.
    pub neighbor_budget_fraction: f64,
    pub max_walk_length: usize,
    pub max_walks: usize,
    pub softmax_temperature: f64,
    pub rng_seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            neighbor_budget_fraction: 0.5,
            max_walk_length: 4,
            max_walks: 8,
            softmax_temperature: 1.0,
            rng_seed: 0,
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), SelectionError> {
        let rho = self.neighbor_budget_fraction;
        if !(0.0..=1.0).contains(&rho) {
            return Err(SelectionError::InvalidConfig(
                "neighbor_budget_fraction must lie in [0, 1]",
            ));
        }
        if !(self.softmax_temperature.is_finite() && self.softmax_temperature > 0.0) {
            return Err(SelectionError::InvalidConfig(
                "softmax_temperature must be > 0",
            ));
        }
        if self.max_walk_length == 0 {
            return Err(SelectionError::InvalidConfig(
                "max_walk_length must be positive",
            ));
        }
        if self.max_walks == 0 {
            return Err(SelectionError::InvalidConfig("max_walks must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyNeighborSet {
    pub target: NodeIx,
    pub members: Vec<(NodeIx, RelationId)>,
    pub token_cost: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    pub target: NodeIx,
    pub steps: Vec<(RelationId, NodeIx)>,
    /// Tokens this walk added to the description.
    pub token_cost: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSelection {
    pub neighbors: KeyNeighborSet,
    pub walks: Vec<Walk>,
    pub boilerplate: usize,
    pub budget: usize,
}

impl TargetSelection {
    /// Tokens spent beyond the boilerplate.
    pub fn token_cost(&self) -> usize {
        self.neighbors.token_cost + self.walks.iter().map(|w| w.token_cost).sum::<usize>()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelectionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Description(#[from] DescriptionError),
    #[error("budget {budget} for node `{node}` is below the boilerplate cost {boilerplate}")]
    BudgetTooSmall {
        node: String,
        budget: usize,
        boilerplate: usize,
    },
    #[error("invalid selection config: {0}")]
    InvalidConfig(&'static str),
}

/// Eligible one-hop neighbors of `target` in admission order: descending
/// energy, then ascending id. A neighbor reached through several relations
/// appears once, with its first relation.
pub fn neighbor_candidates(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
) -> Vec<(NodeIx, RelationId)> {
    let threshold = energies.energy(target);
    let mut out: Vec<(NodeIx, RelationId)> = Vec::new();
    for a in renderer.graph.neighbors(target) {
        if energies.energy(a.node) >= threshold && out.last().map(|l| l.0) != Some(a.node) {
            out.push((a.node, a.relation));
        }
    }
    out.sort_by_key(|&(n, _)| (Reverse(energies.energy(n)), n));
    out
}

pub fn select_neighbors(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
    neighbor_budget: usize,
) -> Result<KeyNeighborSet, SelectionError> {
    let base = renderer.boilerplate_cost(target)?;
    let mut members = Vec::new();
    let mut token_cost = 0;
    for cand in neighbor_candidates(renderer, energies, target) {
        if energies.tokens(cand.0) > neighbor_budget as u64 {
            break;
        }
        members.push(cand);
        let cost = renderer
            .measure(target, &members, &[])?
            .saturating_sub(base);
        if cost > neighbor_budget {
            members.pop();
            break;
        }
        token_cost = cost;
    }
    Ok(KeyNeighborSet {
        target,
        members,
        token_cost,
    })
}

/// Walks from `target` with no neighbor section content.
pub fn expand_walks(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
    walk_budget: usize,
    cfg: &SelectionConfig,
) -> Result<Vec<Walk>, SelectionError> {
    expand_walks_after(renderer, energies, target, &[], walk_budget, cfg)
}

/// Walks from `target`, costed on top of an already chosen neighbor set.
pub fn expand_walks_after(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
    neighbors: &[(NodeIx, RelationId)],
    walk_budget: usize,
    cfg: &SelectionConfig,
) -> Result<Vec<Walk>, SelectionError> {
    let graph = renderer.graph;
    let threshold = energies.energy(target);
    let mut rng = seed::rng(cfg.rng_seed, "walks", &graph.node(target).id);
    let base = renderer.measure(target, neighbors, &[])?;

    let mut walks: Vec<Walk> = Vec::new();
    let mut spent = 0usize;
    let mut eligible: Vec<crate::graph::Adjacent> = Vec::new();
    while walks.len() < cfg.max_walks {
        let mut steps: Vec<(RelationId, NodeIx)> = Vec::new();
        let mut current = target;
        let spent_before = spent;
        while steps.len() < cfg.max_walk_length {
            eligible.clear();
            eligible.extend(graph.neighbors(current).iter().filter(|a| {
                a.node != target
                    && energies.energy(a.node) >= threshold
                    && !steps.iter().any(|&(_, n)| n == a.node)
            }));
            if eligible.is_empty() {
                break;
            }
            let pick = eligible[rng.random_range(0..eligible.len() as u32) as usize];
            steps.push((pick.relation, pick.node));
            let cost = {
                let mut views: Vec<&[(RelationId, NodeIx)]> =
                    walks.iter().map(|w| w.steps.as_slice()).collect();
                views.push(&steps);
                renderer
                    .measure(target, neighbors, &views)?
                    .saturating_sub(base)
            };
            if cost > walk_budget {
                steps.pop();
                break;
            }
            spent = cost;
            current = pick.node;
        }
        if steps.is_empty() {
            break;
        }
        walks.push(Walk {
            target,
            steps,
            token_cost: spent - spent_before,
        });
    }
    Ok(walks)
}

/// Full selection for one target under total budget `budget`.
pub fn select_for_target(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
    budget: usize,
    cfg: &SelectionConfig,
) -> Result<TargetSelection, SelectionError> {
    cfg.validate()?;
    let boilerplate = renderer.boilerplate_cost(target)?;
    if budget < boilerplate {
        return Err(SelectionError::BudgetTooSmall {
            node: renderer.graph.node(target).id.clone(),
            budget,
            boilerplate,
        });
    }
    let effective = budget - boilerplate;
    let neighbor_budget = libm::floor(cfg.neighbor_budget_fraction * effective as f64) as usize;
    let neighbors = select_neighbors(renderer, energies, target, neighbor_budget.min(effective))?;
    let walk_budget = effective - neighbors.token_cost;
    let walks = expand_walks_after(
        renderer,
        energies,
        target,
        &neighbors.members,
        walk_budget,
        cfg,
    )?;
    Ok(TargetSelection {
        neighbors,
        walks,
        boilerplate,
        budget,
    })
}

/// Select and render in one step.
pub fn describe_target(
    renderer: &DescriptionRenderer<'_>,
    energies: &Energies,
    target: NodeIx,
    budget: usize,
    cfg: &SelectionConfig,
) -> Result<(TargetSelection, CompactDescription), SelectionError> {
    let sel = select_for_target(renderer, energies, target, budget, cfg)?;
    let desc = renderer.render(target, &sel.neighbors, &sel.walks)?;
    Ok((sel, desc))
}

/// Split `total_budget` across several target nodes in proportion to
/// `softmax(H / temperature)`, integerized by largest remainder. Equal
/// remainders favour the smaller node id.
pub fn allocate_multi_node_budget(
    energies: &[NodeEnergy],
    total_budget: u64,
    temperature: f64,
) -> Vec<u64> {
    if energies.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].node.cmp(&energies[b].node));
    let max = energies.iter().map(|e| e.energy).max().unwrap_or(0);
    // differences are taken in integers so that shifting every energy by the
    // same amount leaves the weights bit-identical
    let weights: Vec<f64> = order
        .iter()
        .map(|&i| libm::exp(-((max - energies[i].energy) as f64) / temperature))
        .collect();
    let shares = apportion::by_reals(total_budget, &weights).expect("the maximum has weight 1");
    let mut out = alloc::vec![0u64; energies.len()];
    for (k, &i) in order.iter().enumerate() {
        out[i] = shares[k];
    }
    out
}
