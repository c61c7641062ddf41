//! Per-slot weights and per-minute weights for departure time selection.

use std::ops::Range;

use crate::ingest::TemporalCounts;
use crate::model::{IndividualProfile, TimePeriod, TimeSlot, TimeSlotPartition};
use crate::scalar::Scalar;

/// Floor on `|Δe|` when every candidate minute is already over-represented.
pub const PERIOD_DELTA_FLOOR: f64 = 1e-12;

/// Slot index ranges for the current clock.
///
/// `subsequent` holds the slot containing the clock and every later one.
/// `reserved` holds the latest slots kept back for the trips still owed
/// today, and `available` is `subsequent` without `reserved`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSets {
    pub subsequent: Range<usize>,
    pub reserved: Range<usize>,
    pub available: Range<usize>,
}

impl SlotSets {
    pub fn is_available(&self, slot: usize) -> bool {
        self.available.contains(&slot)
    }
}

/// Splits the remaining day into available and reserved slots.
///
/// `remaining` is the number of trips still to generate today, including the
/// one being generated now; it must be at least 1.
pub fn subsequent_slots(
    partition: &TimeSlotPartition,
    now: TimePeriod,
    remaining: u32,
) -> SlotSets {
    debug_assert!(remaining >= 1);
    let n = partition.len();
    let current = partition.slot_of(now).id;
    let n_subsequent = n - current;
    let n_reserved = (remaining.saturating_sub(1) as usize).min(n_subsequent - 1);
    let split = n - n_reserved;
    SlotSets {
        subsequent: current..n,
        reserved: split..n,
        available: current..split,
    }
}

/// 1 inside the available set, `kappa` everywhere else.
pub fn logic_factor<S: Scalar>(slot: usize, sets: &SlotSets, kappa: S) -> S {
    if sets.is_available(slot) {
        S::one()
    } else {
        kappa
    }
}

/// Decreasing feedback curve on `[-1, 1]`: `1 - x^shape` for `x >= 0` and
/// `blowup^((-x)^shape)` below zero, so `f(0) = 1`, `f(1) = 0`,
/// `f(-1) = blowup`. `shape = 1` gives `1 - x` and `blowup^(-x)`; smaller
/// values steepen the curve near 0.
pub fn aggregation_curve<S: Scalar>(x: S, blowup: S, shape: S) -> S {
    let x = x.max(-S::one()).min(S::one());
    if x >= S::zero() {
        S::one() - x.powf(shape)
    } else {
        blowup.powf((-x).powf(shape))
    }
}

/// Feedback weight of one slot for one traveller type: the curve evaluated
/// at generated share minus historical share. With nothing generated yet the
/// generated share is taken as zero.
pub fn aggregation_factor<S: Scalar>(
    generated: &TemporalCounts,
    reference: &TemporalCounts,
    slot: usize,
    blowup: S,
    shape: S,
) -> S {
    let x = generated.slot_share::<S>(slot) - reference.slot_share::<S>(slot);
    aggregation_curve(x, blowup, shape)
}

/// Whole-day slot preference and the preference conditioned on departing
/// from `current_zone`. The latter is 0 when the individual never departed
/// from that zone.
pub fn preference_factors<S: Scalar>(
    profile: &IndividualProfile,
    current_zone: &str,
    slot: usize,
) -> (S, S) {
    let whole = S::ratio(profile.slot_counts[slot], profile.total_trips);
    let from_zone = profile.slot_origin_counts[slot]
        .get(current_zone)
        .copied()
        .unwrap_or(0);
    let located = S::ratio(from_zone, profile.origin_count(current_zone));
    (whole, located)
}

/// The four factors of one slot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlotFactors<S> {
    pub logic: S,
    pub aggregation: S,
    pub preference: S,
    pub location_preference: S,
}

impl<S: Scalar> SlotFactors<S> {
    /// Combined weight `logic * aggregation * (pref * (1 + loc_pref) + epsilon)`.
    pub fn weight(&self, epsilon: S) -> S {
        self.logic
            * self.aggregation
            * (self.preference * (S::one() + self.location_preference) + epsilon)
    }
}

/// Factors for every slot of the partition.
#[allow(clippy::too_many_arguments)]
pub fn slot_factors<S: Scalar>(
    partition: &TimeSlotPartition,
    sets: &SlotSets,
    profile: &IndividualProfile,
    current_zone: &str,
    generated: &TemporalCounts,
    reference: &TemporalCounts,
    kappa: S,
    blowup: S,
    shape: S,
) -> Vec<SlotFactors<S>> {
    partition
        .slots()
        .iter()
        .map(|slot| {
            let (preference, location_preference) =
                preference_factors(profile, current_zone, slot.id);
            SlotFactors {
                logic: logic_factor(slot.id, sets, kappa),
                aggregation: aggregation_factor(generated, reference, slot.id, blowup, shape),
                preference,
                location_preference,
            }
        })
        .collect()
}

/// Sampling weights for the slot draw. Slots before the clock keep their
/// formula weight in `factors` but are masked out here, since no departure
/// minute in them is reachable any more.
pub fn slot_weights<S: Scalar>(factors: &[SlotFactors<S>], sets: &SlotSets, epsilon: S) -> Vec<S> {
    factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            if sets.subsequent.contains(&i) {
                f.weight(epsilon)
            } else {
                S::zero()
            }
        })
        .collect()
}

/// First selectable minute in `slot` given the clock.
pub fn first_selectable(slot: &TimeSlot, now: TimePeriod) -> TimePeriod {
    slot.start.max(now)
}

/// Weights for each minute from [`first_selectable`] to the slot end.
///
/// If any minute is under-represented in the generated data
/// (`Δe = e - e_generated > 0`) only those minutes get mass, proportional to
/// `Δe`; otherwise every minute gets `1 / max(|Δe|, floor)`.
pub fn period_weights<S: Scalar>(
    slot: &TimeSlot,
    now: TimePeriod,
    generated: &TemporalCounts,
    reference: &TemporalCounts,
) -> (TimePeriod, Vec<S>) {
    let first = first_selectable(slot, now);
    let deltas: Vec<S> = (first.get()..=slot.end.get())
        .map(|m| {
            let t = TimePeriod::new(m).expect("inside a slot");
            reference.period_share::<S>(t) - generated.period_share::<S>(t)
        })
        .collect();
    (first, delta_weights(&deltas))
}

/// Minute weights from `Δe` values; see [`period_weights`].
pub fn delta_weights<S: Scalar>(deltas: &[S]) -> Vec<S> {
    let positive: Vec<S> = deltas.iter().map(|d| d.max(S::zero())).collect();
    if positive.iter().any(|d| *d > S::zero()) {
        return positive;
    }
    let floor = S::of(PERIOD_DELTA_FLOOR);
    deltas
        .iter()
        .map(|d| S::one() / d.abs().max(floor))
        .collect()
}
