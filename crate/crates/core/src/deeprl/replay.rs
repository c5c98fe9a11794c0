use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;

use crate::encoder::EncodedInput;

#[derive(Debug, Clone)]
struct Step {
    input: EncodedInput,
    reward: f64,
    terminal: bool,
}

/// A stored transition. `next` is the input of the decision taken at the
/// following step, or `None` on the last step of an episode.
#[derive(Debug, Clone, Copy)]
pub struct Transition<'a> {
    pub input: &'a EncodedInput,
    pub reward: f64,
    pub next: Option<&'a EncodedInput>,
}

/// FIFO buffer of whole episodes.
///
/// Episodes are appended contiguously and evicted from the front, so the
/// successor of any non-terminal step is always the next stored step.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    steps: VecDeque<Step>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self { steps: VecDeque::new(), capacity: capacity.max(1) }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Appends one finished episode; `inputs` and `rewards` are in step order.
    pub fn push_episode(&mut self, inputs: Vec<EncodedInput>, rewards: &[f64]) {
        assert_eq!(inputs.len(), rewards.len(), "one reward per step");
        let n = inputs.len();
        for (t, (input, &reward)) in inputs.into_iter().zip(rewards).enumerate() {
            self.steps.push_back(Step { input, reward, terminal: t + 1 == n });
        }
        while self.steps.len() > self.capacity {
            self.steps.pop_front();
        }
    }

    pub fn get(&self, k: usize) -> Option<Transition<'_>> {
        let s = self.steps.get(k)?;
        let next = if s.terminal { None } else { self.steps.get(k + 1).map(|n| &n.input) };
        Some(Transition { input: &s.input, reward: s.reward, next })
    }

    /// Uniform sample of distinct transitions; everything if the buffer is
    /// smaller than `batch`.
    pub fn sample<R: Rng>(&self, batch: usize, rng: &mut R) -> Vec<Transition<'_>> {
        let n = batch.min(self.len());
        let mut picks = index::sample(rng, self.len(), n).into_vec();
        picks.sort_unstable();
        picks.into_iter().filter_map(|k| self.get(k)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Transition<'_>> {
        (0..self.len()).filter_map(|k| self.get(k))
    }
}
