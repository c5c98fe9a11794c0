use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{BoxDims, MultiBinState, Placement};

/// A placement chosen by a policy. When `opened_new_bin` is set the
/// placement targets bin `open_count`, which the caller must open first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub placement: Placement,
    pub opened_new_bin: bool,
}

/// An online packing policy: sees the current state, the box to place and
/// the visible upcoming boxes, and must place the box somewhere.
pub trait Policy {
    fn name(&self) -> &str;

    fn decide(&mut self, ms: &MultiBinState, next: BoxDims, lookahead: &[BoxDims]) -> Result<Decision>;
}

/// Applies a decision, opening a bin first if the decision asks for it.
pub fn apply(ms: &mut MultiBinState, next: BoxDims, decision: Decision) -> Result<usize> {
    if decision.opened_new_bin {
        ms.open_next_bin()?;
    }
    ms.place(next, decision.placement)
}
