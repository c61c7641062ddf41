//! Versioned on-disk form of everything generation needs.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{
    build_duration_pools, build_path_catalog, build_profiles, build_reference_aggregates,
    DurationPool, PathCatalog, ReferenceAggregates,
};
use crate::error::{Error, Result};
use crate::model::{IndividualProfile, RoadNetwork, TimePeriod, TimeSlotPartition, TripRecord, Zone};

pub const STORE_HEADER: &str = "tripsynth-store v1";

/// Profiles, catalog, duration pools and reference aggregates built from one
/// historical corpus, plus the context they were built under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Store {
    pub epoch: String,
    pub window_days: u32,
    pub slot_starts: Vec<TimePeriod>,
    pub profiles: BTreeMap<String, IndividualProfile>,
    pub catalog: PathCatalog,
    pub durations: DurationPool,
    pub reference: ReferenceAggregates,
    pub zones: Vec<Zone>,
    pub network: RoadNetwork,
}

impl Store {
    pub fn build(
        trips: &[TripRecord],
        partition: &TimeSlotPartition,
        window_days: u32,
        epoch: String,
        zones: Vec<Zone>,
        network: RoadNetwork,
    ) -> Self {
        let catalog = build_path_catalog(trips);
        Store {
            epoch,
            window_days,
            slot_starts: partition.starts(),
            profiles: build_profiles(trips, partition, window_days),
            durations: build_duration_pools(trips, partition, &catalog),
            reference: build_reference_aggregates(trips, partition),
            catalog,
            zones,
            network,
        }
    }

    pub fn partition(&self) -> Result<TimeSlotPartition> {
        TimeSlotPartition::from_starts(&self.slot_starts)
    }

    pub fn n_trips(&self) -> u64 {
        self.profiles.values().map(|p| p.total_trips).sum()
    }

    /// Largest per-individual trip count, used to check the weight ordering.
    pub fn max_trip_frequency(&self) -> u64 {
        self.profiles.values().map(|p| p.total_trips).max().unwrap_or(0)
    }

    pub fn write<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "{STORE_HEADER}")?;
        serde_json::to_writer(&mut sink, self)?;
        writeln!(sink)?;
        sink.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(mut source: R) -> Result<Self> {
        let mut header = String::new();
        source.read_line(&mut header)?;
        if header.trim_end() != STORE_HEADER {
            return Err(Error::Store(format!(
                "unsupported store header `{}`, expected `{STORE_HEADER}`",
                header.trim_end()
            )));
        }
        let store: Store = serde_json::from_reader(source)?;
        if store.reference.n_slots() != store.slot_starts.len() {
            return Err(Error::Store("slot count disagrees with partition".into()));
        }
        Ok(store)
    }
}
