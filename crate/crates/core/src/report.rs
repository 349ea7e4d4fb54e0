use std::fmt;

use serde::{Deserialize, Serialize};

/// Repair scheme, named as on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "naive")]
    Naive,
    #[serde(rename = "gw")]
    Gw,
    #[serde(rename = "depth1")]
    DepthOne,
    #[serde(rename = "depth2")]
    DepthTwo,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Naive,
        Scheme::Gw,
        Scheme::DepthOne,
        Scheme::DepthTwo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Naive => "naive",
            Scheme::Gw => "gw",
            Scheme::DepthOne => "depth1",
            Scheme::DepthTwo => "depth2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sub-symbols received by one replacement node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RnBandwidth {
    /// 1-based node number of the failed node this RN replaces.
    pub node: usize,
    pub downloaded: usize,
    pub exchanged_in: usize,
    pub total: usize,
}

impl RnBandwidth {
    pub fn new(node_index: usize, downloaded: usize, exchanged_in: usize) -> Self {
        Self {
            node: node_index + 1,
            downloaded,
            exchanged_in,
            total: downloaded + exchanged_in,
        }
    }
}

/// Outcome of one repair. All counts are in sub-symbols (elements of `B`);
/// a full symbol counts as `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandwidthReport {
    pub scheme: Scheme,
    /// 1-based node numbers, in repair order.
    pub erased: Vec<usize>,
    pub rns: Vec<RnBandwidth>,
    pub total: usize,
    /// `k·t` for one erasure, `k·t + t` for two.
    pub naive_baseline: usize,
    /// Per RN: recovered symbol equals the original. Empty until checked
    /// against the originals.
    pub verdict: Vec<bool>,
}

impl BandwidthReport {
    pub fn new(scheme: Scheme, rns: Vec<RnBandwidth>, k: usize, t: usize) -> Self {
        let erased: Vec<usize> = rns.iter().map(|r| r.node).collect();
        let total = rns.iter().map(|r| r.total).sum();
        let naive_baseline = naive_bandwidth(k, t, erased.len());
        Self {
            scheme,
            erased,
            rns,
            total,
            naive_baseline,
            verdict: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        !self.verdict.is_empty() && self.verdict.iter().all(|&v| v)
    }

    /// Whether this run used no more bandwidth than the naive baseline.
    pub fn beats_naive(&self) -> bool {
        self.total <= self.naive_baseline
    }
}

/// Bandwidth of interpolation repair: one RN downloads `k` symbols and
/// forwards one symbol to each other RN.
pub fn naive_bandwidth(k: usize, t: usize, erasures: usize) -> usize {
    k * t + erasures.saturating_sub(1) * t
}
