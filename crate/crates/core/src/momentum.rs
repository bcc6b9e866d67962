//! Nesterov momentum sequence shared by the outer solver and the dual solver.

/// Tracks `α_{i-2}, α_{i-1}` for the recurrence
/// `α_{i+1} = (1 + √(1 + 4α_i²)) / 2`, started at `α_{-1} = 0`, `α_0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    older: f64,
    newer: f64,
}

impl Default for Momentum {
    fn default() -> Self {
        Self::new()
    }
}

impl Momentum {
    pub fn new() -> Self {
        Self {
            older: 0.0,
            newer: 1.0,
        }
    }

    /// `β_i = (α_{i-2} - 1) / α_{i-1}` for the upcoming iteration.
    pub fn beta(&self) -> f64 {
        (self.older - 1.0) / self.newer
    }

    /// Most recent alpha, `α_{i-1}`.
    pub fn alpha(&self) -> f64 {
        self.newer
    }

    /// Advances the sequence by one term and returns it.
    pub fn advance(&mut self) -> f64 {
        let next = 0.5 * (1.0 + (1.0 + 4.0 * self.newer * self.newer).sqrt());
        self.older = self.newer;
        self.newer = next;
        next
    }
}
