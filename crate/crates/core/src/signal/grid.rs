use serde::{Deserialize, Serialize};

use super::SignalError;

/// A uniform one-dimensional grid `start + i * step`, `0 <= i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    start: f64,
    step: f64,
    count: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self, SignalError> {
        if !start.is_finite() || !step.is_finite() {
            return Err(SignalError::InvalidGrid("non-finite start or step".into()));
        }
        if step <= 0.0 {
            return Err(SignalError::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if count < 2 {
            return Err(SignalError::InvalidGrid(format!("need at least 2 nodes, got {count}")));
        }
        Ok(Self { start, step, count })
    }

    /// Grid covering `[lo, hi]` with the given step. The node count is
    /// rounded, so `hi` is hit exactly only when `(hi - lo) / step` is integral.
    pub fn span(lo: f64, hi: f64, step: f64) -> Result<Self, SignalError> {
        if !(hi > lo) {
            return Err(SignalError::InvalidGrid(format!("empty range [{lo}, {hi}]")));
        }
        if !(step > 0.0) {
            return Err(SignalError::InvalidGrid(format!("step must be positive, got {step}")));
        }
        let count = ((hi - lo) / step).round() as usize + 1;
        Self::new(lo, step, count)
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn end(&self) -> f64 {
        self.node(self.count - 1)
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.node(i))
    }

    /// Trapezoid weight of node `i` (half step at both ends).
    #[inline]
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.count {
            0.5 * self.step
        } else {
            self.step
        }
    }

    /// Same step, range stretched by `factor` about the grid centre.
    pub fn enlarged(&self, factor: f64) -> Self {
        let half = 0.5 * (self.end() - self.start);
        let extra = ((half * factor - half) / self.step).round().max(0.0) as usize;
        Self {
            start: self.start - extra as f64 * self.step,
            step: self.step,
            count: self.count + 2 * extra,
        }
    }

    /// The grid of negated nodes, ascending.
    pub fn negated(&self) -> Self {
        Self { start: -self.end(), step: self.step, count: self.count }
    }

    pub fn shifted(&self, offset: f64) -> Self {
        Self { start: self.start + offset, step: self.step, count: self.count }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t <= self.end()
    }

    pub fn describe(&self) -> String {
        format!("{}:{}:{}", self.start, self.end(), self.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_hits_both_ends() {
        let g = Grid::span(-6.0, 6.0, 0.05).unwrap();
        assert_eq!(g.count(), 241);
        assert!((g.end() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn node_is_reproducible() {
        let g = Grid::new(-3.7, 0.013, 999).unwrap();
        for i in 0..g.count() {
            assert_eq!(g.node(i).to_bits(), g.node(i).to_bits());
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(0.0, 0.0, 5).is_err());
        assert!(Grid::new(0.0, -1.0, 5).is_err());
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(f64::NAN, 1.0, 3).is_err());
        assert!(Grid::span(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn enlarged_keeps_step_and_grows_symmetrically() {
        let g = Grid::span(-10.0, 20.0, 0.5).unwrap();
        let e = g.enlarged(1.5);
        assert_eq!(e.step(), 0.5);
        assert!((e.start() + 17.5).abs() < 1e-12);
        assert!((e.end() - 27.5).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_weights_sum_to_length() {
        let g = Grid::span(0.0, 1.0, 0.01).unwrap();
        let s: f64 = (0..g.count()).map(|i| g.trapezoid_weight(i)).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
