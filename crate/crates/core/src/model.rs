//! Domain types shared by ingestion, generation and validation.
//!
//! Minutes are 1-based: minute 1 is `00:00-00:01` and minute 1440 is
//! `23:59-24:00`. Days are integer offsets from an epoch date that only the
//! CSV layer knows about.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MINUTES_PER_DAY: u16 = 1440;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Traffic zone identifier.
    ZoneId
);
string_id!(
    /// Road identifier.
    RoadId
);

/// One minute of the day, `1..=1440`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u16", into = "u16")]
pub struct TimePeriod(u16);

impl TimePeriod {
    pub const FIRST: TimePeriod = TimePeriod(1);
    pub const LAST: TimePeriod = TimePeriod(MINUTES_PER_DAY);

    pub fn new(minute: u16) -> Result<Self> {
        if (1..=MINUTES_PER_DAY).contains(&minute) {
            Ok(TimePeriod(minute))
        } else {
            Err(Error::MinuteOutOfRange(minute as i64))
        }
    }

    pub fn get(self) -> u16 {
        self.0
    }

    /// Zero-based position, handy for indexing per-minute arrays.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    /// `HH:MM` wall-clock time at which this minute starts.
    pub fn from_hhmm(s: &str) -> Result<Self> {
        let minutes = parse_hhmm(s)?;
        if minutes >= MINUTES_PER_DAY as i64 {
            return Err(Error::MinuteOutOfRange(minutes + 1));
        }
        TimePeriod::new(minutes as u16 + 1)
    }

    pub fn to_hhmm(self) -> String {
        format_hhmm(self.0 - 1)
    }

    /// All minutes of the day in order.
    pub fn all() -> impl Iterator<Item = TimePeriod> {
        (1..=MINUTES_PER_DAY).map(TimePeriod)
    }
}

impl TryFrom<u16> for TimePeriod {
    type Error = Error;

    fn try_from(v: u16) -> Result<Self> {
        TimePeriod::new(v)
    }
}

impl From<TimePeriod> for u16 {
    fn from(t: TimePeriod) -> u16 {
        t.0
    }
}

impl fmt::Display for TimePeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parses `HH:MM` into minutes since midnight. `24:00` is accepted and
/// yields 1440; callers decide whether that is in range.
pub(crate) fn parse_hhmm(s: &str) -> Result<i64> {
    let s = s.trim();
    let bad = || Error::InvalidParams(format!("malformed time `{s}`, expected HH:MM"));
    let (h, m) = s.split_once(':').ok_or_else(bad)?;
    let h: i64 = h.parse().map_err(|_| bad())?;
    let m: i64 = m.parse().map_err(|_| bad())?;
    if !(0..60).contains(&m) || h < 0 {
        return Err(bad());
    }
    let total = h * 60 + m;
    if total > MINUTES_PER_DAY as i64 {
        return Err(Error::MinuteOutOfRange(total + 1));
    }
    Ok(total)
}

pub(crate) fn format_hhmm(minutes: u16) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

/// A contiguous, inclusive run of minutes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeSlot {
    pub id: usize,
    pub start: TimePeriod,
    pub end: TimePeriod,
}

impl TimeSlot {
    pub fn contains(&self, t: TimePeriod) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn len(&self) -> usize {
        (self.end.get() - self.start.get()) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn periods(&self) -> impl Iterator<Item = TimePeriod> {
        (self.start.get()..=self.end.get()).map(TimePeriod)
    }

    /// Rendered as `HH:MM-HH:MM`, e.g. `07:00-08:00` for minutes 421..=480.
    pub fn label(&self) -> String {
        format!(
            "{}-{}",
            format_hhmm(self.start.get() - 1),
            format_hhmm(self.end.get())
        )
    }
}

/// Ordered set of disjoint slots covering the whole day.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeSlotPartition {
    slots: Vec<TimeSlot>,
    slot_by_minute: Vec<u16>,
}

impl TimeSlotPartition {
    /// Builds a partition from the first minute of every slot. The first
    /// start must be minute 1 and starts must be strictly increasing.
    pub fn from_starts(starts: &[TimePeriod]) -> Result<Self> {
        match starts.first() {
            None => return Err(Error::InvalidPartition("no slots".into())),
            Some(first) if *first != TimePeriod::FIRST => {
                return Err(Error::InvalidPartition(format!(
                    "first slot starts at minute {first}, expected 1"
                )))
            }
            _ => {}
        }
        if let Some(w) = starts.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition(format!(
                "slot starts not increasing at minute {}",
                w[1]
            )));
        }
        let mut slots = Vec::with_capacity(starts.len());
        for (id, start) in starts.iter().enumerate() {
            let end = match starts.get(id + 1) {
                Some(next) => TimePeriod(next.get() - 1),
                None => TimePeriod::LAST,
            };
            slots.push(TimeSlot {
                id,
                start: *start,
                end,
            });
        }
        let mut slot_by_minute = vec![0u16; MINUTES_PER_DAY as usize];
        for slot in &slots {
            for t in slot.periods() {
                slot_by_minute[t.index()] = slot.id as u16;
            }
        }
        Ok(TimeSlotPartition {
            slots,
            slot_by_minute,
        })
    }

    /// Equal-width slots; the final slot absorbs any remainder.
    pub fn uniform(width_minutes: u16) -> Result<Self> {
        if width_minutes == 0 || width_minutes > MINUTES_PER_DAY {
            return Err(Error::InvalidPartition(format!(
                "slot width {width_minutes} outside 1..=1440"
            )));
        }
        let starts: Vec<_> = (0..MINUTES_PER_DAY / width_minutes)
            .map(|i| TimePeriod(i * width_minutes + 1))
            .collect();
        Self::from_starts(&starts)
    }

    pub fn hourly() -> Self {
        Self::uniform(60).expect("60 divides the day")
    }

    /// Parses `HH:MM` slot start times (first must be `00:00`).
    pub fn from_hhmm_starts<S: AsRef<str>>(starts: &[S]) -> Result<Self> {
        let starts = starts
            .iter()
            .map(|s| TimePeriod::from_hhmm(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_starts(&starts)
    }

    pub fn slots(&self) -> &[TimeSlot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, id: usize) -> Option<&TimeSlot> {
        self.slots.get(id)
    }

    pub fn starts(&self) -> Vec<TimePeriod> {
        self.slots.iter().map(|s| s.start).collect()
    }

    /// The unique slot containing `t`.
    pub fn slot_of(&self, t: TimePeriod) -> &TimeSlot {
        &self.slots[self.slot_by_minute[t.index()] as usize]
    }

    pub fn slot_by_label(&self, label: &str) -> Option<&TimeSlot> {
        let (a, b) = label.trim().split_once('-')?;
        let start = parse_hhmm(a).ok()?;
        let end = parse_hhmm(b).ok()?;
        self.slots
            .iter()
            .find(|s| s.start.get() as i64 - 1 == start && s.end.get() as i64 == end)
    }
}

/// Generation clock: day offset plus minute of day. Orders chronologically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenClock {
    pub day: i32,
    pub period: TimePeriod,
}

impl GenClock {
    pub fn new(day: i32, period: TimePeriod) -> Self {
        GenClock { day, period }
    }

    pub fn start_of(day: i32) -> Self {
        GenClock {
            day,
            period: TimePeriod::FIRST,
        }
    }

    pub fn end_of(day: i32) -> Self {
        GenClock {
            day,
            period: TimePeriod::LAST,
        }
    }

    /// Moves `minutes` forward, rolling into later days as needed.
    pub fn advance(self, minutes: u32) -> Self {
        let absolute = self.period.index() as i64 + minutes as i64;
        let per_day = MINUTES_PER_DAY as i64;
        GenClock {
            day: self.day + (absolute / per_day) as i32,
            period: TimePeriod((absolute % per_day) as u16 + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub id: ZoneId,
    pub longitude: f64,
    pub latitude: f64,
    pub roads: BTreeSet<RoadId>,
}

/// Road set plus directed "may follow" relation between roads.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoadNetwork {
    roads: BTreeSet<RoadId>,
    adjacency: BTreeMap<RoadId, BTreeSet<RoadId>>,
}

impl RoadNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_road(&mut self, road: RoadId) {
        self.roads.insert(road);
    }

    /// Records that `to` may directly follow `from` in a path.
    pub fn add_edge(&mut self, from: RoadId, to: RoadId) {
        self.roads.insert(from.clone());
        self.roads.insert(to.clone());
        self.adjacency.entry(from).or_default().insert(to);
    }

    /// Infers topology from consecutive roads of observed paths, for road
    /// files that carry no adjacency.
    pub fn infer_from_paths<'a, I>(paths: I) -> Self
    where
        I: IntoIterator<Item = &'a [RoadId]>,
    {
        let mut net = RoadNetwork::new();
        for path in paths {
            for road in path {
                net.add_road(road.clone());
            }
            for pair in path.windows(2) {
                net.add_edge(pair[0].clone(), pair[1].clone());
            }
        }
        net
    }

    pub fn roads(&self) -> &BTreeSet<RoadId> {
        &self.roads
    }

    pub fn contains(&self, road: &str) -> bool {
        self.roads.contains(road)
    }

    pub fn neighbors(&self, road: &str) -> impl Iterator<Item = &RoadId> {
        self.adjacency.get(road).into_iter().flatten()
    }

    pub fn is_adjacent(&self, from: &str, to: &str) -> bool {
        self.adjacency.get(from).is_some_and(|n| n.contains(to))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&RoadId, &RoadId)> {
        self.adjacency
            .iter()
            .flat_map(|(from, tos)| tos.iter().map(move |to| (from, to)))
    }

    /// Whether every consecutive pair of `path` is adjacent.
    pub fn path_is_continuous(&self, path: &[RoadId]) -> Result<bool> {
        if let Some(missing) = path.iter().find(|r| !self.contains(r.as_str())) {
            return Err(Error::UnknownRoad(missing.clone()));
        }
        Ok(path
            .windows(2)
            .all(|w| self.is_adjacent(w[0].as_str(), w[1].as_str())))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TravellerType {
    Commuter,
    StableTraveller,
    RandomTraveller,
    HighFreqTraveller,
    PassbyTraveller,
}

impl TravellerType {
    pub const ALL: [TravellerType; 5] = [
        TravellerType::Commuter,
        TravellerType::StableTraveller,
        TravellerType::RandomTraveller,
        TravellerType::HighFreqTraveller,
        TravellerType::PassbyTraveller,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TravellerType::Commuter => "commuter",
            TravellerType::StableTraveller => "stable_traveller",
            TravellerType::RandomTraveller => "random_traveller",
            TravellerType::HighFreqTraveller => "high_freq_traveller",
            TravellerType::PassbyTraveller => "passby_traveller",
        }
    }

    pub fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TravellerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TravellerType {
    type Err = String;

    /// Case-, space- and underscore-insensitive; the `traveller` suffix is
    /// optional (`Stable traveller`, `stable_traveller` and `STABLE` all work).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        let key = key
            .strip_suffix("traveller")
            .or_else(|| key.strip_suffix("traveler"))
            .unwrap_or(&key);
        match key {
            "commuter" => Ok(TravellerType::Commuter),
            "stable" => Ok(TravellerType::StableTraveller),
            "random" => Ok(TravellerType::RandomTraveller),
            "highfreq" | "highfrequency" => Ok(TravellerType::HighFreqTraveller),
            "passby" | "passerby" => Ok(TravellerType::PassbyTraveller),
            _ => Err(format!("unknown traveller type `{s}`")),
        }
    }
}

/// One trip, either historical or generated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripRecord {
    pub traveller_id: String,
    pub traveller_type: TravellerType,
    pub date: i32,
    pub departure: TimePeriod,
    pub slot: usize,
    pub o_zone: ZoneId,
    pub d_zone: ZoneId,
    pub path: Vec<RoadId>,
    pub duration: u32,
}

impl TripRecord {
    pub fn clock(&self) -> GenClock {
        GenClock::new(self.date, self.departure)
    }
}

/// Historical counters of one individual.
///
/// `slot_counts` is the per-slot sum of `per_period` under the partition the
/// profile was built with; `slot_origin_counts` is indexed the same way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndividualProfile {
    pub traveller_id: String,
    pub traveller_type: TravellerType,
    pub total_trips: u64,
    pub per_period: BTreeMap<TimePeriod, u64>,
    pub per_origin: BTreeMap<ZoneId, u64>,
    pub per_destination: BTreeMap<ZoneId, u64>,
    pub od_counts: BTreeMap<ZoneId, BTreeMap<ZoneId, u64>>,
    pub slot_counts: Vec<u64>,
    pub slot_origin_counts: Vec<BTreeMap<ZoneId, u64>>,
    pub observed_days: u32,
}

impl IndividualProfile {
    pub fn empty(
        traveller_id: impl Into<String>,
        traveller_type: TravellerType,
        n_slots: usize,
        observed_days: u32,
    ) -> Self {
        IndividualProfile {
            traveller_id: traveller_id.into(),
            traveller_type,
            total_trips: 0,
            per_period: BTreeMap::new(),
            per_origin: BTreeMap::new(),
            per_destination: BTreeMap::new(),
            od_counts: BTreeMap::new(),
            slot_counts: vec![0; n_slots],
            slot_origin_counts: vec![BTreeMap::new(); n_slots],
            observed_days,
        }
    }

    /// Counts one trip departing at `departure` in slot `slot`.
    pub fn record(&mut self, departure: TimePeriod, slot: usize, origin: &ZoneId, dest: &ZoneId) {
        self.total_trips += 1;
        *self.per_period.entry(departure).or_default() += 1;
        *self.per_origin.entry(origin.clone()).or_default() += 1;
        *self.per_destination.entry(dest.clone()).or_default() += 1;
        *self
            .od_counts
            .entry(origin.clone())
            .or_default()
            .entry(dest.clone())
            .or_default() += 1;
        self.slot_counts[slot] += 1;
        *self.slot_origin_counts[slot]
            .entry(origin.clone())
            .or_default() += 1;
    }

    pub fn origin_count(&self, zone: &str) -> u64 {
        self.per_origin.get(zone).copied().unwrap_or(0)
    }

    /// Origin-plus-destination visits per zone.
    pub fn visits(&self) -> BTreeMap<&ZoneId, u64> {
        let mut visits: BTreeMap<&ZoneId, u64> = BTreeMap::new();
        for (z, n) in self.per_origin.iter().chain(&self.per_destination) {
            *visits.entry(z).or_default() += n;
        }
        visits
    }

    /// Checks that every marginal agrees with `total_trips`.
    pub fn marginals_consistent(&self) -> bool {
        let f = self.total_trips;
        let od: u64 = self.od_counts.values().flat_map(|m| m.values()).sum();
        let slot_origin_ok = self
            .slot_counts
            .iter()
            .zip(&self.slot_origin_counts)
            .all(|(n, by_zone)| by_zone.values().sum::<u64>() == *n);
        self.per_period.values().sum::<u64>() == f
            && self.per_origin.values().sum::<u64>() == f
            && self.per_destination.values().sum::<u64>() == f
            && od == f
            && self.slot_counts.iter().sum::<u64>() == f
            && slot_origin_ok
    }
}
