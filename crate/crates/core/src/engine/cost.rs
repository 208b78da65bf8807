//! Abstract step accounting for subject runs and relation work.

use serde::{Deserialize, Serialize};

/// Monotone counter of abstract steps.
///
/// One step is charged per element comparison, element read, element write,
/// edge relaxation, or arithmetic row operation. Wall-clock time is never
/// measured; all cost comparisons in the harness are over these counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CostMeter {
    steps: u64,
}

impl CostMeter {
    pub fn new() -> Self {
        Self { steps: 0 }
    }

    /// Charges `n` steps.
    pub fn charge(&mut self, n: u64) {
        self.steps = self.steps.saturating_add(n);
    }

    /// Charges a single step.
    pub fn tick(&mut self) {
        self.charge(1);
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }
}

impl std::ops::AddAssign for CostMeter {
    fn add_assign(&mut self, rhs: Self) {
        self.charge(rhs.steps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charges_accumulate_monotonically() {
        let mut meter = CostMeter::new();
        assert_eq!(meter.steps(), 0);
        meter.tick();
        meter.charge(4);
        assert_eq!(meter.steps(), 5);
        let mut other = CostMeter::new();
        other.charge(2);
        meter += other;
        assert_eq!(meter.steps(), 7);
    }

    #[test]
    fn charge_saturates_instead_of_wrapping() {
        let mut meter = CostMeter::new();
        meter.charge(u64::MAX);
        meter.charge(10);
        assert_eq!(meter.steps(), u64::MAX);
    }
}
