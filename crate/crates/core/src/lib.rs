//! List colouring on trees and tree-partitioned graphs with an audited
//! work-tape model.
//!
//! The solvers in this crate never keep per-vertex tables of their own. Every
//! persistent register they hold is charged to a [`WorkspaceMeter`], so the
//! bit budgets of the logspace and log-squared algorithms can be checked
//! mechanically against the ground-truth solvers in [`oracle`].

pub mod bench;
pub mod error;
pub mod instance;
pub mod log2;
pub mod logspace;
pub mod meter;
pub mod oracle;
pub mod pathwidth;
pub mod tpw;
pub mod tree;

pub use error::{Error, Result};
pub use instance::{
    ColourLists, Graph, Instance, MulticolouredCliqueInstance, TreePartition,
};
pub use meter::{PeakReport, WorkspaceMeter};
pub use tree::RootedTree;

/// Colours are the integers `1..=n`.
pub type Colour = u32;

/// Number of bits needed to store any value in `0..range` (at least one).
pub fn bits_for_range(range: u64) -> u64 {
    if range <= 2 {
        1
    } else {
        64 - u64::from((range - 1).leading_zeros())
    }
}

/// `⌈log₂(n+1)⌉`, the width of a counter over `0..=n`.
pub fn log_bits(n: u64) -> u64 {
    bits_for_range(n.saturating_add(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn register_widths() {
        assert_eq!(bits_for_range(0), 1);
        assert_eq!(bits_for_range(2), 1);
        assert_eq!(bits_for_range(3), 2);
        assert_eq!(bits_for_range(4), 2);
        assert_eq!(bits_for_range(5), 3);
        assert_eq!(log_bits(1024), 11);
        assert_eq!(log_bits(1023), 10);
    }
}
