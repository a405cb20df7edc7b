//! Exact sliding-window reference: the last `W` values in a ring buffer.

use std::collections::VecDeque;

/// Ground-truth window sum. Starts as `W` zeros, matching the sketches'
/// warm-up convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactWindow {
    buf: VecDeque<u64>,
    sum: u128,
}

impl ExactWindow {
    pub fn new(window: u64) -> Self {
        assert!(window > 0, "window must be positive");
        Self {
            buf: std::iter::repeat_n(0, window as usize).collect(),
            sum: 0,
        }
    }

    pub fn window(&self) -> u64 {
        self.buf.len() as u64
    }

    /// Appends `x`, evicting the oldest value.
    pub fn push(&mut self, x: u64) {
        let evicted = self.buf.pop_front().expect("window is never empty");
        self.sum = self.sum - evicted as u128 + x as u128;
        self.buf.push_back(x);
    }

    /// Sum of the last `W` values (count of ones for a bit stream).
    pub fn exact(&self) -> u128 {
        self.sum
    }

    /// Oldest to newest.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        self.buf.iter().copied()
    }
}
