use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Legal-action indicator over the fixed action space of a game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionMask {
    bits: Vec<bool>,
}

impl ActionMask {
    pub fn none(len: usize) -> Self {
        ActionMask {
            bits: vec![false; len],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        ActionMask { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn is_legal(&self, action: usize) -> bool {
        self.bits.get(action).copied().unwrap_or(false)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// True when no action is legal.
    pub fn is_all_false(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn legal_actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.then_some(i))
    }

    pub fn first_legal(&self) -> Option<usize> {
        self.bits.iter().position(|b| *b)
    }

    /// A copy with every bit but `action` cleared.
    pub fn only(&self, action: usize) -> Self {
        let mut m = ActionMask::none(self.len());
        if action < m.len() {
            m.bits[action] = true;
        }
        m
    }
}
