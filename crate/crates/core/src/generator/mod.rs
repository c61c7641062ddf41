//! Sequential trip generation.
//!
//! Every historical individual is replayed as a template: starting from its
//! most visited zone, each day draws a trip quota and then produces trips in
//! time order. A trip is built from five draws (slot, minute, destination,
//! path, duration). The slot and minute draws read a per-type ledger of what
//! has been generated so far, which is why one traveller type is always
//! generated as a single sequence.

mod factors;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use self::factors::{
    aggregation_curve, aggregation_factor, delta_weights, first_selectable, logic_factor,
    period_weights, preference_factors, slot_factors, slot_weights, subsequent_slots, SlotFactors,
    SlotSets, PERIOD_DELTA_FLOOR,
};
use crate::error::{Error, Result};
use crate::ingest::{
    DurationPool, PathCatalog, PathId, ReferenceAggregates, TemporalCounts, TypedCounts,
};
use crate::model::{
    GenClock, IndividualProfile, TimePeriod, TimeSlot, TimeSlotPartition, TravellerType,
    TripRecord, ZoneId,
};
use crate::sampling::{pick, sample_counts, sample_weighted};
use crate::scalar::Scalar;

/// Per-type counts of generated trips, per slot and per minute.
pub type AggregationLedger = TypedCounts;

/// Tuning knobs of the generator.
///
/// The weights must respect `1/blowup << epsilon << 1/max_trips` and
/// `kappa * blowup ≈ 1`, so that time logic outranks the aggregate feedback,
/// which in turn outranks individual preference; [`GenParams::validate`]
/// checks this.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams<S> {
    pub kappa: S,
    pub epsilon: S,
    /// Value of the feedback curve at -1.
    pub blowup: S,
    /// Exponent applied to the share difference inside the feedback curve.
    pub shape: S,
    /// Minutes of rest added after each trip's duration.
    pub min_gap: u32,
    pub start_day: i32,
    /// Length of the horizon; 0 generates nothing.
    pub days: u32,
    pub seed: u64,
}

impl<S: Scalar> Default for GenParams<S> {
    fn default() -> Self {
        GenParams {
            kappa: S::of(1e-9),
            epsilon: S::of(1e-6),
            blowup: S::of(1e9),
            shape: S::one(),
            min_gap: 1,
            start_day: 0,
            days: 7,
            seed: 0,
        }
    }
}

impl<S: Scalar> GenParams<S> {
    /// First and last clock of the horizon, or `None` for an empty horizon.
    pub fn horizon(&self) -> Option<(GenClock, GenClock)> {
        if self.days == 0 {
            return None;
        }
        Some((
            GenClock::start_of(self.start_day),
            GenClock::end_of(self.start_day + self.days as i32 - 1),
        ))
    }

    /// Checks the weight ordering against the largest per-individual trip
    /// count in the corpus.
    pub fn validate(&self, max_trip_frequency: u64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.kappa > S::zero() && self.epsilon > S::zero() && self.blowup > S::one()) {
            return bad("kappa and epsilon must be positive and blowup above 1".into());
        }
        if !(self.shape > S::zero() && self.shape <= S::one()) {
            return bad(format!("shape = {} must lie in (0, 1]", self.shape));
        }
        let product = self.kappa * self.blowup;
        if product < S::of(0.5) || product > S::of(2.0) {
            return bad(format!("kappa * blowup = {product} must lie in [0.5, 2]"));
        }
        if S::one() / self.blowup >= self.epsilon {
            return bad(format!(
                "1/blowup = {} must be below epsilon = {}",
                S::one() / self.blowup,
                self.epsilon
            ));
        }
        if max_trip_frequency > 0 {
            let cap = S::one() / S::of(max_trip_frequency as f64);
            if self.epsilon >= cap {
                return bad(format!(
                    "epsilon = {} must be below 1/max trip frequency = {cap}",
                    self.epsilon
                ));
            }
        }
        Ok(())
    }
}

/// The zone with the most origin-plus-destination visits (ties to the
/// smallest id).
pub fn initial_location(profile: &IndividualProfile) -> Result<ZoneId> {
    let mut best: Option<(&ZoneId, u64)> = None;
    for (zone, visits) in profile.visits() {
        if best.is_none_or(|(_, b)| visits > b) {
            best = Some((zone, visits));
        }
    }
    best.map(|(z, _)| z.clone())
        .ok_or_else(|| Error::EmptyProfile(profile.traveller_id.clone()))
}

/// Today's trip count: `floor(v/D)` plus a Bernoulli draw on the fractional
/// part of `v/D`, computed in exact integer arithmetic.
pub fn daily_quota<R: Rng + ?Sized>(profile: &IndividualProfile, rng: &mut R) -> u32 {
    let days = profile.observed_days.max(1) as u64;
    let whole = profile.total_trips / days;
    let rest = profile.total_trips % days;
    let extra = rest > 0 && rng.gen_range(0..days) < rest;
    (whole + extra as u64) as u32
}

pub fn select_time_slot<S: Scalar, R: Rng + ?Sized>(
    factors: &[SlotFactors<S>],
    sets: &SlotSets,
    epsilon: S,
    rng: &mut R,
) -> usize {
    let weights = slot_weights(factors, sets, epsilon);
    // the available set is never empty and its weights are positive
    sample_weighted(&weights, rng).unwrap_or(sets.available.start)
}

pub fn select_time_period<S: Scalar, R: Rng + ?Sized>(
    slot: &TimeSlot,
    now: TimePeriod,
    generated: &TemporalCounts,
    reference: &TemporalCounts,
    rng: &mut R,
) -> TimePeriod {
    let (first, weights) = period_weights::<S>(slot, now, generated, reference);
    let offset = sample_weighted(&weights, rng).unwrap_or(0);
    TimePeriod::new(first.get() + offset as u16).expect("offset stays inside the slot")
}

/// Outcome of the destination draw.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DestinationChoice {
    /// Where the trip actually starts; differs from the requested origin only
    /// after relocation.
    pub origin: ZoneId,
    pub destination: ZoneId,
    pub relocated: bool,
}

/// Draws a destination from the individual's OD counts out of `origin`.
/// Without historical departures from `origin` the trip is relocated to the
/// individual's most frequent origin first.
pub fn select_destination<R: Rng + ?Sized>(
    profile: &IndividualProfile,
    origin: &ZoneId,
    rng: &mut R,
) -> Result<DestinationChoice> {
    if profile.total_trips == 0 {
        return Err(Error::EmptyProfile(profile.traveller_id.clone()));
    }
    let (origin, relocated) = if profile.origin_count(origin.as_str()) > 0 {
        (origin.clone(), false)
    } else {
        let mut best: Option<(&ZoneId, u64)> = None;
        for (zone, n) in &profile.per_origin {
            if best.is_none_or(|(_, b)| *n > b) {
                best = Some((zone, *n));
            }
        }
        let (zone, _) = best.ok_or_else(|| Error::EmptyProfile(profile.traveller_id.clone()))?;
        (zone.clone(), true)
    };
    let row = &profile.od_counts[&origin];
    let i = sample_counts(row.values().copied(), rng).expect("origin has departures");
    let destination = row.keys().nth(i).expect("index from the same row").clone();
    Ok(DestinationChoice {
        origin,
        destination,
        relocated,
    })
}

/// Draws a path for the OD pair with probability proportional to its crowd
/// count.
pub fn select_path<R: Rng + ?Sized>(
    catalog: &PathCatalog,
    origin: &ZoneId,
    destination: &ZoneId,
    rng: &mut R,
) -> Result<PathId> {
    let missing = || Error::MissingOdPair {
        origin: origin.clone(),
        destination: destination.clone(),
    };
    let entries = catalog
        .candidates(origin.as_str(), destination.as_str())
        .ok_or_else(missing)?;
    let i = sample_counts(entries.iter().map(|e| e.crowd_count), rng).ok_or_else(missing)?;
    Ok(entries[i].id)
}

/// Uniform draw among historical durations of the same path and slot,
/// falling back to all durations of the path.
pub fn sample_duration<R: Rng + ?Sized>(
    pools: &DurationPool,
    path: PathId,
    slot: usize,
    rng: &mut R,
) -> Result<u32> {
    let same_slot = pools.samples(path, slot);
    let pool = if same_slot.is_empty() {
        pools.fallback(path).ok_or(Error::UnknownPath(path.0))?
    } else {
        same_slot
    };
    pick(pool, rng).copied().ok_or(Error::UnknownPath(path.0))
}

/// Where one individual's generation currently stands.
#[derive(Clone, Debug)]
pub struct GenCursor<'p> {
    pub profile: &'p IndividualProfile,
    pub clock: GenClock,
    pub location: ZoneId,
    pub daily_quota: u32,
    pub generated_today: u32,
}

impl<'p> GenCursor<'p> {
    pub fn new(profile: &'p IndividualProfile, start: GenClock) -> Result<Self> {
        Ok(GenCursor {
            location: initial_location(profile)?,
            profile,
            clock: start,
            daily_quota: 0,
            generated_today: 0,
        })
    }

    pub fn remaining_today(&self) -> u32 {
        self.daily_quota.saturating_sub(self.generated_today)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedTrip {
    pub record: TripRecord,
    pub path_id: PathId,
    pub relocated: bool,
}

/// Generated trips plus the individuals whose generation failed (their trips
/// are not in `trips`).
#[derive(Debug, Default)]
pub struct GenerationOutput {
    pub trips: Vec<GeneratedTrip>,
    pub quarantined: Vec<(String, Error)>,
    pub ledger: Option<AggregationLedger>,
}

/// Trip generator over one ingested corpus.
#[derive(Clone, Debug)]
pub struct Generator<'a, S> {
    pub partition: &'a TimeSlotPartition,
    pub catalog: &'a PathCatalog,
    pub durations: &'a DurationPool,
    pub reference: &'a ReferenceAggregates,
    pub params: GenParams<S>,
}

impl<'a, S: Scalar> Generator<'a, S> {
    /// Independent, reproducible random stream for one traveller type.
    pub fn type_rng(&self, ty: TravellerType) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed);
        rng.set_stream(ty.ordinal() as u64 + 1);
        rng
    }

    /// Generates one trip and advances the cursor and the ledger.
    pub fn generate_trip<R: Rng + ?Sized>(
        &self,
        cursor: &mut GenCursor<'_>,
        ledger: &mut TemporalCounts,
        rng: &mut R,
    ) -> Result<GeneratedTrip> {
        let profile = cursor.profile;
        let reference = self.reference.get(profile.traveller_type);
        let now = cursor.clock.period;
        let sets = subsequent_slots(self.partition, now, cursor.remaining_today().max(1));
        let factors = slot_factors(
            self.partition,
            &sets,
            profile,
            cursor.location.as_str(),
            ledger,
            reference,
            self.params.kappa,
            self.params.blowup,
            self.params.shape,
        );
        let slot_id = select_time_slot(&factors, &sets, self.params.epsilon, rng);
        let slot = self.partition.slot(slot_id).expect("slot from this partition");
        let departure = select_time_period::<S, _>(slot, now, ledger, reference, rng);
        let choice = select_destination(profile, &cursor.location, rng)?;
        let path_id = select_path(self.catalog, &choice.origin, &choice.destination, rng)?;
        let duration = sample_duration(self.durations, path_id, slot_id, rng)?;
        let path = self
            .catalog
            .path(path_id)
            .ok_or(Error::UnknownPath(path_id.0))?
            .to_vec();

        ledger.record(slot_id, departure);
        let record = TripRecord {
            traveller_id: profile.traveller_id.clone(),
            traveller_type: profile.traveller_type,
            date: cursor.clock.day,
            departure,
            slot: slot_id,
            o_zone: choice.origin,
            d_zone: choice.destination.clone(),
            path,
            duration,
        };
        cursor.location = choice.destination;
        cursor.clock = GenClock::new(cursor.clock.day, departure)
            .advance(duration + self.params.min_gap);
        cursor.generated_today += 1;
        Ok(GeneratedTrip {
            record,
            path_id,
            relocated: choice.relocated,
        })
    }

    /// Runs one individual across the whole horizon, appending to `out`.
    pub fn generate_individual<R: Rng + ?Sized>(
        &self,
        profile: &IndividualProfile,
        ledger: &mut TemporalCounts,
        rng: &mut R,
        out: &mut Vec<GeneratedTrip>,
    ) -> Result<()> {
        let Some((start, end)) = self.params.horizon() else {
            return Ok(());
        };
        let mut cursor = GenCursor::new(profile, start)?;
        let mut day = start.day;
        while day <= end.day {
            if cursor.clock.day > day {
                // a trip ran past midnight; that day's remainder was dropped
                day += 1;
                continue;
            }
            if cursor.clock.day < day {
                cursor.clock = GenClock::start_of(day);
            }
            cursor.daily_quota = daily_quota(profile, rng);
            cursor.generated_today = 0;
            while cursor.remaining_today() > 0 && cursor.clock <= end {
                out.push(self.generate_trip(&mut cursor, ledger, rng)?);
                if cursor.clock.day != day {
                    break;
                }
            }
            day += 1;
        }
        Ok(())
    }

    /// Generates every individual of one type in the given order. A failing
    /// individual is quarantined: its trips are dropped and the ledger is
    /// restored to its state before that individual.
    pub fn generate_type<'p, I>(&self, ty: TravellerType, profiles: I) -> TypeRun
    where
        I: IntoIterator<Item = &'p IndividualProfile>,
    {
        let mut rng = self.type_rng(ty);
        let mut ledger = TemporalCounts::new(self.partition.len());
        let mut run = TypeRun::default();
        let mut scratch = Vec::new();
        for profile in profiles {
            let snapshot = ledger.clone();
            scratch.clear();
            match self.generate_individual(profile, &mut ledger, &mut rng, &mut scratch) {
                Ok(()) => run.trips.append(&mut scratch),
                Err(e) => {
                    ledger = snapshot;
                    run.quarantined.push((profile.traveller_id.clone(), e));
                }
            }
        }
        run.ledger = Some(ledger);
        run
    }

    /// Generates all individuals, one logical sequence per traveller type.
    /// Types are spread over up to `threads` worker threads; output order is
    /// by type, then by traveller id, independent of `threads`.
    pub fn generate_all(
        &self,
        profiles: &BTreeMap<String, IndividualProfile>,
        threads: usize,
    ) -> GenerationOutput {
        let mut by_type: BTreeMap<TravellerType, Vec<&IndividualProfile>> = BTreeMap::new();
        for p in profiles.values() {
            by_type.entry(p.traveller_type).or_default().push(p);
        }
        let jobs: Vec<(TravellerType, Vec<&IndividualProfile>)> = by_type.into_iter().collect();
        let threads = threads.clamp(1, jobs.len().max(1));

        let mut runs: Vec<(TravellerType, TypeRun)> = if threads == 1 {
            jobs.iter()
                .map(|(ty, ps)| (*ty, self.generate_type(*ty, ps.iter().copied())))
                .collect()
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..threads)
                    .map(|worker| {
                        let jobs = &jobs;
                        scope.spawn(move || {
                            jobs.iter()
                                .skip(worker)
                                .step_by(threads)
                                .map(|(ty, ps)| (*ty, self.generate_type(*ty, ps.iter().copied())))
                                .collect::<Vec<_>>()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .flat_map(|h| h.join().expect("generation worker panicked"))
                    .collect()
            })
        };
        runs.sort_by_key(|(ty, _)| *ty);

        let mut out = GenerationOutput::default();
        let mut ledger = AggregationLedger::new(self.partition.len());
        for (ty, run) in runs {
            out.trips.extend(run.trips);
            out.quarantined.extend(run.quarantined);
            if let Some(l) = run.ledger {
                *ledger.get_mut(ty) = l;
            }
        }
        out.ledger = Some(ledger);
        out
    }
}

/// Result of generating one traveller type.
#[derive(Debug, Default)]
pub struct TypeRun {
    pub trips: Vec<GeneratedTrip>,
    pub quarantined: Vec<(String, Error)>,
    pub ledger: Option<TemporalCounts>,
}

#[cfg(test)]
mod tests;
