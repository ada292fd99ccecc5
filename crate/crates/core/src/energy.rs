//! Node energy: attribute token count scaled by a ceiling-log degree factor,
//! `H = T * ceil(log_b(D + 1))`.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::graph::{AttributedGraph, NodeIx};
use crate::tokenize::{count_tokens, TokenizerConfig};

/// `floor(e^k)` for `k = 0..=44`; `e^45` exceeds `u64::MAX`. For an integer
/// `n`, `n <= e^k` exactly when `n <= floor(e^k)`.
#[rustfmt::skip]
const FLOOR_EXP: [u64; 45] = [
    1, 2, 7, 20,
    54, 148, 403, 1096,
    2980, 8103, 22026, 59874,
    162754, 442413, 1202604, 3269017,
    8886110, 24154952, 65659969, 178482300,
    485165195, 1318815734, 3584912846, 9744803446,
    26489122129, 72004899337, 195729609428, 532048240601,
    1446257064291, 3931334297144, 10686474581524, 29048849665247,
    78962960182680, 214643579785916, 583461742527454, 1586013452313430,
    4311231547115195, 11719142372802611, 31855931757113756, 86593400423993746,
    235385266837019985, 639843493530054949, 1739274941520501047, 4727839468229346561,
    12851600114359308275,
];

/// Logarithm base for the degree factor. Always > 1.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize))]
pub struct LogBase(f64);

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("logarithm base must be a finite value > 1, got {0}")]
pub struct InvalidLogBase(pub f64);

impl LogBase {
    pub const E: LogBase = LogBase(core::f64::consts::E);

    pub fn new(base: f64) -> Result<Self, InvalidLogBase> {
        if base.is_finite() && base > 1.0 {
            Ok(LogBase(base))
        } else {
            Err(InvalidLogBase(base))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `ceil(log_base(n))` for `n >= 1`, i.e. the smallest `k` with
    /// `base^k >= n`. Exact for `e` and for integral bases; other bases go
    /// through `f64` logarithms.
    pub fn ceil_log(self, n: u64) -> u64 {
        if n <= 1 {
            return 0;
        }
        let b = self.0;
        if libm::floor(b) == b && b <= u64::MAX as f64 {
            // exact for integral bases
            let b = b as u128;
            let n = n as u128;
            let mut k = 0;
            let mut p: u128 = 1;
            while p < n {
                p = p.saturating_mul(b);
                k += 1;
            }
            return k;
        }
        if b == core::f64::consts::E {
            return FLOOR_EXP
                .iter()
                .position(|&f| n <= f)
                .unwrap_or(FLOOR_EXP.len()) as u64;
        }
        let x = libm::log(n as f64) / libm::log(b);
        libm::ceil(x) as u64
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::E
    }
}

#[cfg(feature = "serde")]
impl<'de> Deserialize<'de> for LogBase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        LogBase::new(v).map_err(serde::de::Error::custom)
    }
}

/// `T * ceil(log_base(D + 1))`, saturating at `u64::MAX`.
pub fn node_energy(token_count: u64, degree: u64, base: LogBase) -> u64 {
    token_count.saturating_mul(base.ceil_log(degree.saturating_add(1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct NodeEnergy {
    pub node: String,
    pub token_count: u64,
    pub degree: u64,
    pub energy: u64,
}

/// Energies for every node of one graph, indexed by [`NodeIx`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Energies {
    entries: Vec<NodeEnergy>,
}

impl Energies {
    pub fn get(&self, ix: NodeIx) -> &NodeEnergy {
        &self.entries[ix.index()]
    }

    pub fn energy(&self, ix: NodeIx) -> u64 {
        self.entries[ix.index()].energy
    }

    pub fn tokens(&self, ix: NodeIx) -> u64 {
        self.entries[ix.index()].token_count
    }

    pub fn iter(&self) -> impl Iterator<Item = &NodeEnergy> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of all node energies.
    pub fn total(&self) -> u128 {
        self.entries.iter().map(|e| e.energy as u128).sum()
    }

    pub fn into_vec(self) -> Vec<NodeEnergy> {
        self.entries
    }
}

/// Energy of a single node: tokens over its space-joined attribute values.
pub fn energy_of(
    graph: &AttributedGraph,
    ix: NodeIx,
    cfg: &TokenizerConfig,
    base: LogBase,
) -> NodeEnergy {
    let node = graph.node(ix);
    let token_count = count_tokens(&node.attribute_text(), cfg) as u64;
    let degree = graph.degree_of(ix) as u64;
    NodeEnergy {
        node: node.id.clone(),
        token_count,
        degree,
        energy: node_energy(token_count, degree, base),
    }
}

pub fn compute_energies(graph: &AttributedGraph, cfg: &TokenizerConfig, base: LogBase) -> Energies {
    Energies {
        entries: graph
            .node_ids()
            .map(|ix| energy_of(graph, ix, cfg, base))
            .collect(),
    }
}

impl FromIterator<NodeEnergy> for Energies {
    /// Entries must already be in node-index order.
    fn from_iter<I: IntoIterator<Item = NodeEnergy>>(iter: I) -> Self {
        Energies {
            entries: iter.into_iter().collect(),
        }
    }
}
