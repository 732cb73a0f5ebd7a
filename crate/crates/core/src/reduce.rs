//! Order-fixed reductions so results never depend on the worker count.

use std::ops::AddAssign;

/// Pairwise (tree) sum in a fixed association order.
pub fn pairwise_sum<T>(items: &[T]) -> T
where
    T: Clone + Default + AddAssign,
{
    match items.len() {
        0 => T::default(),
        n if n <= 8 => {
            let mut acc = items[0].clone();
            for it in &items[1..] {
                acc += it.clone();
            }
            acc
        }
        n => {
            let mut left = pairwise_sum(&items[..n / 2]);
            left += pairwise_sum(&items[n / 2..]);
            left
        }
    }
}

/// Pairwise sum of plain floats.
pub fn pairwise_sum_f64(items: &[f64]) -> f64 {
    pairwise_sum(items)
}

/// Fixed-length coefficient block that can be accumulated with `+=`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoeffBlock(pub Vec<f64>);

impl AddAssign for CoeffBlock {
    fn add_assign(&mut self, rhs: Self) {
        if self.0.is_empty() {
            self.0 = rhs.0;
            return;
        }
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}
