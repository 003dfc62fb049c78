//! Rate settings of the four `n = 120` cluster-size panels.

use gossip_age::{RateConfig, TopologyKind};

pub const PANEL_N: usize = 120;

/// Topologies compared in every panel, in output order.
pub const PANEL_TOPOLOGIES: [TopologyKind; 3] =
    [TopologyKind::FullyConnected, TopologyKind::BiRing, TopologyKind::Disconnected];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Panel {
    A,
    B,
    C,
    D,
}

impl Panel {
    pub const ALL: [Panel; 4] = [Panel::A, Panel::B, Panel::C, Panel::D];

    pub fn letter(self) -> char {
        match self {
            Panel::A => 'a',
            Panel::B => 'b',
            Panel::C => 'c',
            Panel::D => 'd',
        }
    }

    /// Labelled rate sets for the panel. Panel `d` is described with two
    /// different rate sets (figure legend vs. running text); both are
    /// returned.
    pub fn rate_sets(self) -> Vec<PanelRates> {
        let set = |label: &'static str, le, ls, lc, l| PanelRates {
            panel: self,
            label,
            rates: RateConfig::new(le, ls, lc, l).expect("preset rates are valid"),
        };
        match self {
            Panel::A => vec![set("a", 1.0, 1.0, 1.0, 1.0)],
            Panel::B => vec![set("b", 1.0, 10.0, 1.0, 1.0)],
            Panel::C => vec![set("c", 1.0, 10.0, 10.0, 1.0)],
            Panel::D => vec![set("d-legend", 1.0, 10.0, 1.0, 2.0), set("d-text", 1.0, 1.0, 10.0, 2.0)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelRates {
    pub panel: Panel,
    pub label: &'static str,
    pub rates: RateConfig,
}
