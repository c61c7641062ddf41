//! Categorical draws used by the generator.

use rand::Rng;

use crate::scalar::Scalar;

/// Draws an index with probability proportional to `weights[i]`.
///
/// Non-finite or non-positive weights get no mass. Returns `None` when no
/// weight is positive.
pub fn sample_weighted<S: Scalar, R: Rng + ?Sized>(weights: &[S], rng: &mut R) -> Option<usize> {
    let usable = |w: S| w.is_finite() && w > S::zero();
    let total: S = weights.iter().copied().filter(|w| usable(*w)).sum();
    if !(total.is_finite() && total > S::zero()) {
        return None;
    }
    let target = S::of(rng.gen::<f64>()) * total;
    let mut acc = S::zero();
    let mut last = None;
    for (i, w) in weights.iter().enumerate() {
        if !usable(*w) {
            continue;
        }
        acc = acc + *w;
        last = Some(i);
        if target < acc {
            return Some(i);
        }
    }
    // rounding left `target` at or past the accumulated total
    last
}

/// Draws an index with probability `counts[i] / Σ counts`, exactly.
pub fn sample_counts<R, I>(counts: I, rng: &mut R) -> Option<usize>
where
    R: Rng + ?Sized,
    I: IntoIterator<Item = u64>,
    I::IntoIter: Clone,
{
    let counts = counts.into_iter();
    let total: u64 = counts.clone().sum();
    if total == 0 {
        return None;
    }
    let mut target = rng.gen_range(0..total);
    for (i, c) in counts.enumerate() {
        if target < c {
            return Some(i);
        }
        target -= c;
    }
    unreachable!("target below total")
}

/// Uniform pick from a non-empty slice.
pub fn pick<'a, T, R: Rng + ?Sized>(items: &'a [T], rng: &mut R) -> Option<&'a T> {
    if items.is_empty() {
        None
    } else {
        Some(&items[rng.gen_range(0..items.len())])
    }
}

/// Normalizes weights to probabilities using the same masking as
/// [`sample_weighted`].
pub fn normalize<S: Scalar>(weights: &[S]) -> Vec<S> {
    let usable = |w: S| w.is_finite() && w > S::zero();
    let total: S = weights.iter().copied().filter(|w| usable(*w)).sum();
    weights
        .iter()
        .map(|w| if usable(*w) && total > S::zero() { *w / total } else { S::zero() })
        .collect()
}
