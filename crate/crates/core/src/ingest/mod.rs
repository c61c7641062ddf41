//! Turns historical trips into the counters the generator samples from.

mod records;
mod store;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{
    IndividualProfile, RoadId, TimePeriod, TimeSlotPartition, TravellerType, TripRecord, ZoneId,
    MINUTES_PER_DAY,
};
use crate::scalar::Scalar;

pub use self::records::{
    read_network, read_trips, read_zones, write_network, write_trips, write_zones, DurationUnit,
    ParsedTrips, RowError, RowErrorKind, TripCodec, TRIP_COLUMNS,
};
pub use self::store::{Store, STORE_HEADER};

/// Identity of a distinct road sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathId(pub u32);

impl std::fmt::Display for PathId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEntry {
    pub id: PathId,
    pub crowd_count: u64,
}

/// Crowd-level path choices per OD pair.
///
/// Identical road sequences share one [`PathId`] no matter which individual
/// or OD pair they came from. Ids are assigned in lexicographic order of the
/// sequences, so the catalog does not depend on input order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCatalog {
    paths: Vec<Vec<RoadId>>,
    entries: BTreeMap<ZoneId, BTreeMap<ZoneId, Vec<PathEntry>>>,
}

impl PathCatalog {
    pub fn path(&self, id: PathId) -> Option<&[RoadId]> {
        self.paths.get(id.0 as usize).map(Vec::as_slice)
    }

    pub fn id_of(&self, roads: &[RoadId]) -> Option<PathId> {
        self.paths
            .binary_search_by(|p| p.as_slice().cmp(roads))
            .ok()
            .map(|i| PathId(i as u32))
    }

    pub fn candidates(&self, origin: &str, destination: &str) -> Option<&[PathEntry]> {
        self.entries
            .get(origin)?
            .get(destination)
            .map(Vec::as_slice)
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn od_pairs(&self) -> impl Iterator<Item = (&ZoneId, &ZoneId, &[PathEntry])> {
        self.entries.iter().flat_map(|(o, by_d)| {
            by_d.iter().map(move |(d, entries)| (o, d, entries.as_slice()))
        })
    }
}

/// Historical durations, keyed by path and slot with a per-path fallback.
/// Every multiset is kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DurationPool {
    samples: BTreeMap<PathId, BTreeMap<usize, Vec<u32>>>,
    fallback: BTreeMap<PathId, Vec<u32>>,
}

impl DurationPool {
    pub fn samples(&self, path: PathId, slot: usize) -> &[u32] {
        self.samples
            .get(&path)
            .and_then(|by_slot| by_slot.get(&slot))
            .map_or(&[], Vec::as_slice)
    }

    pub fn fallback(&self, path: PathId) -> Option<&[u32]> {
        self.fallback.get(&path).map(Vec::as_slice)
    }

    pub fn insert(&mut self, path: PathId, slot: usize, minutes: u32) {
        let bucket = self.samples.entry(path).or_default().entry(slot).or_default();
        let at = bucket.partition_point(|d| *d <= minutes);
        bucket.insert(at, minutes);
        let all = self.fallback.entry(path).or_default();
        let at = all.partition_point(|d| *d <= minutes);
        all.insert(at, minutes);
    }
}

/// Trip counts per slot and per minute, for one traveller type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemporalCounts {
    pub slot_counts: Vec<u64>,
    pub period_counts: Vec<u64>,
    pub total: u64,
}

impl TemporalCounts {
    pub fn new(n_slots: usize) -> Self {
        TemporalCounts {
            slot_counts: vec![0; n_slots],
            period_counts: vec![0; MINUTES_PER_DAY as usize],
            total: 0,
        }
    }

    pub fn record(&mut self, slot: usize, period: TimePeriod) {
        self.slot_counts[slot] += 1;
        self.period_counts[period.index()] += 1;
        self.total += 1;
    }

    pub fn slot_share<S: Scalar>(&self, slot: usize) -> S {
        S::ratio(self.slot_counts[slot], self.total)
    }

    pub fn period_share<S: Scalar>(&self, period: TimePeriod) -> S {
        S::ratio(self.period_counts[period.index()], self.total)
    }

    pub fn period_shares<S: Scalar>(&self) -> Vec<S> {
        self.period_counts
            .iter()
            .map(|c| S::ratio(*c, self.total))
            .collect()
    }
}

/// [`TemporalCounts`] for every traveller type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedCounts {
    by_type: Vec<TemporalCounts>,
}

impl TypedCounts {
    pub fn new(n_slots: usize) -> Self {
        TypedCounts {
            by_type: vec![TemporalCounts::new(n_slots); TravellerType::ALL.len()],
        }
    }

    pub fn get(&self, ty: TravellerType) -> &TemporalCounts {
        &self.by_type[ty.ordinal()]
    }

    pub fn get_mut(&mut self, ty: TravellerType) -> &mut TemporalCounts {
        &mut self.by_type[ty.ordinal()]
    }

    pub fn record(&mut self, ty: TravellerType, slot: usize, period: TimePeriod) {
        self.get_mut(ty).record(slot, period);
    }

    pub fn n_slots(&self) -> usize {
        self.by_type[0].slot_counts.len()
    }
}

/// Historical per-type temporal aggregates (`u` and its normalization `e`).
pub type ReferenceAggregates = TypedCounts;

/// Counts every trip into its individual's profile.
///
/// An individual listed under several traveller types gets the most frequent
/// one (ties go to the earlier type in [`TravellerType::ALL`]).
pub fn build_profiles(
    trips: &[TripRecord],
    partition: &TimeSlotPartition,
    window_days: u32,
) -> BTreeMap<String, IndividualProfile> {
    let mut profiles: BTreeMap<String, IndividualProfile> = BTreeMap::new();
    let mut type_votes: BTreeMap<&str, [u64; 5]> = BTreeMap::new();
    for trip in trips {
        let slot = partition.slot_of(trip.departure).id;
        profiles
            .entry(trip.traveller_id.clone())
            .or_insert_with(|| {
                IndividualProfile::empty(
                    trip.traveller_id.clone(),
                    trip.traveller_type,
                    partition.len(),
                    window_days,
                )
            })
            .record(trip.departure, slot, &trip.o_zone, &trip.d_zone);
        type_votes.entry(&trip.traveller_id).or_default()[trip.traveller_type.ordinal()] += 1;
    }
    for (id, votes) in type_votes {
        let best = (0..votes.len())
            .max_by(|a, b| votes[*a].cmp(&votes[*b]).then(b.cmp(a)))
            .expect("five types");
        if let Some(profile) = profiles.get_mut(id) {
            profile.traveller_type = TravellerType::ALL[best];
        }
    }
    profiles
}

/// Pools identical road sequences and counts their use per OD pair.
pub fn build_path_catalog(trips: &[TripRecord]) -> PathCatalog {
    let mut usage: BTreeMap<(&ZoneId, &ZoneId), BTreeMap<&[RoadId], u64>> = BTreeMap::new();
    let mut distinct: BTreeMap<&[RoadId], ()> = BTreeMap::new();
    for trip in trips {
        *usage
            .entry((&trip.o_zone, &trip.d_zone))
            .or_default()
            .entry(trip.path.as_slice())
            .or_default() += 1;
        distinct.insert(trip.path.as_slice(), ());
    }
    let paths: Vec<Vec<RoadId>> = distinct.into_keys().map(<[RoadId]>::to_vec).collect();
    let mut catalog = PathCatalog {
        paths,
        entries: BTreeMap::new(),
    };
    for ((o, d), by_path) in usage {
        let list = by_path
            .into_iter()
            .map(|(roads, crowd_count)| PathEntry {
                id: catalog.id_of(roads).expect("path registered above"),
                crowd_count,
            })
            .collect();
        catalog
            .entries
            .entry(o.clone())
            .or_default()
            .insert(d.clone(), list);
    }
    catalog
}

/// Files every trip's duration under its (path, slot) and path buckets.
pub fn build_duration_pools(
    trips: &[TripRecord],
    partition: &TimeSlotPartition,
    catalog: &PathCatalog,
) -> DurationPool {
    let mut pool = DurationPool::default();
    for trip in trips {
        let Some(path) = catalog.id_of(&trip.path) else {
            continue;
        };
        pool.insert(path, partition.slot_of(trip.departure).id, trip.duration);
    }
    pool
}

/// Per-type historical trip counts per slot and per minute.
pub fn build_reference_aggregates(
    trips: &[TripRecord],
    partition: &TimeSlotPartition,
) -> ReferenceAggregates {
    let mut agg = TypedCounts::new(partition.len());
    for trip in trips {
        agg.record(
            trip.traveller_type,
            partition.slot_of(trip.departure).id,
            trip.departure,
        );
    }
    agg
}

/// Reference aggregates keyed by each individual's resolved profile type
/// rather than by the per-row label.
pub fn reference_from_profiles(
    profiles: &BTreeMap<String, IndividualProfile>,
    partition: &TimeSlotPartition,
) -> ReferenceAggregates {
    let mut agg = TypedCounts::new(partition.len());
    for profile in profiles.values() {
        for (period, n) in &profile.per_period {
            let counts = agg.get_mut(profile.traveller_type);
            let slot = partition.slot_of(*period).id;
            counts.slot_counts[slot] += n;
            counts.period_counts[period.index()] += n;
            counts.total += n;
        }
    }
    agg
}
