//! Compensated summation, used wherever a sum feeds a reported statistic so
//! that results are stable and reproducible in fixed iteration order.

use crate::Scalar;

/// Neumaier's variant of Kahan summation: tracks a running compensation term
/// that also survives the case where the next addend is larger than the sum.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Accumulator<F> {
    sum: F,
    comp: F,
}

impl<F: Scalar> Accumulator<F> {
    pub(crate) fn new() -> Self {
        Accumulator {
            sum: F::zero(),
            comp: F::zero(),
        }
    }

    pub(crate) fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> F {
        self.sum + self.comp
    }
}

/// Compensated sum over an iterator, in iteration order.
pub(crate) fn sum<F: Scalar>(values: impl IntoIterator<Item = F>) -> F {
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_that_breaks_naive_sum() {
        let values = [1.0f64, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(sum(values), 2.0);
    }

    #[test]
    fn matches_naive_sum_on_benign_data() {
        let values: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.25).collect();
        let naive: f64 = values.iter().sum();
        assert!((sum(values.iter().copied()) - naive).abs() < 1e-9);
    }
}
