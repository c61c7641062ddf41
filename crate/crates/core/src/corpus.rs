//! Planted test corpora and brute-force reference probabilities.
//!
//! [`synth_corpus`] lays out a square road grid whose cells are the traffic
//! zones and fills a week with trips following per-type behaviour plans. The
//! `oracle_*` functions enumerate the selection probabilities of the
//! generator directly from its defining formulas, without going through the
//! generator's own factor code.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{PathCatalog, PathId, TemporalCounts};
use crate::model::{
    IndividualProfile, RoadId, RoadNetwork, TimePeriod, TimeSlot, TimeSlotPartition,
    TravellerType, TripRecord, Zone, ZoneId,
};
use crate::sampling::sample_weighted;

/// How the individuals of one type move.
#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    /// One trip home to work on every active day.
    Fixed,
    /// Home, work, home on weekdays, sometimes with a stop at a third anchor;
    /// home, anchor, home on weekends.
    Commute { detour: f64 },
    /// Daily tours from home through `min_stops..=max_stops` of the
    /// individual's anchors.
    Errands {
        anchors: usize,
        min_stops: usize,
        max_stops: usize,
    },
    /// Each active day starts at home and hops to random zones, without
    /// coming back.
    Roaming { max_trips: usize },
    /// Through traffic between a west and an east gateway zone, sometimes
    /// returning the same day.
    PassBy { return_prob: f64 },
}

/// Behaviour of one traveller type.
#[derive(Clone, Debug, PartialEq)]
pub struct TypePlan {
    /// Slot id and weight; each trip's slot is drawn from it.
    pub mixture: Vec<(usize, f64)>,
    pub weekday_activity: f64,
    pub weekend_activity: f64,
    pub pattern: Pattern,
}

/// Parameters of a planted corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSpec {
    pub rows: usize,
    pub cols: usize,
    /// Individuals per type, in [`TravellerType::ALL`] order.
    pub individuals: [u32; 5],
    pub days: u32,
    pub epoch: NaiveDate,
    pub slot_width: u16,
    pub plans: [TypePlan; 5],
    /// Zones nearest the grid centre that attract extra visits.
    pub hot_zones: usize,
    /// Popularity of a hot zone relative to an ordinary zone.
    pub hot_weight: f64,
    /// Weights of the alternative routes between two zones.
    pub path_weights: Vec<f64>,
    /// Gateway weights along the west and east edges, north to south.
    pub west_gateways: Vec<f64>,
    pub east_gateways: Vec<f64>,
    pub minutes_per_road: f64,
    pub duration_jitter: u32,
    /// Departures fall in the first `departure_spread` minutes of a slot.
    pub departure_spread: u16,
    pub seed: u64,
}

fn hours(range: std::ops::RangeInclusive<usize>) -> Vec<(usize, f64)> {
    range.map(|h| (h, 1.0)).collect()
}

impl CorpusSpec {
    /// The desk-scale corpus: 1,000 individuals on a 5×10 grid over one week.
    pub fn desk() -> Self {
        CorpusSpec {
            rows: 5,
            cols: 10,
            individuals: [350, 250, 100, 200, 100],
            days: 7,
            epoch: NaiveDate::from_ymd_opt(2019, 8, 12).expect("valid date"),
            slot_width: 60,
            plans: [
                TypePlan {
                    mixture: vec![(6, 0.1), (7, 0.25), (8, 0.15), (12, 0.05), (16, 0.1), (17, 0.25), (18, 0.1)],
                    weekday_activity: 0.95,
                    weekend_activity: 0.45,
                    pattern: Pattern::Commute { detour: 0.25 },
                },
                TypePlan {
                    mixture: vec![(9, 0.15), (10, 0.2), (11, 0.15), (14, 0.15), (15, 0.2), (16, 0.15)],
                    weekday_activity: 0.85,
                    weekend_activity: 0.85,
                    pattern: Pattern::Errands {
                        anchors: 2,
                        min_stops: 1,
                        max_stops: 2,
                    },
                },
                TypePlan {
                    mixture: hours(6..=21),
                    weekday_activity: 0.5,
                    weekend_activity: 0.5,
                    pattern: Pattern::Roaming { max_trips: 3 },
                },
                TypePlan {
                    mixture: hours(7..=20),
                    weekday_activity: 1.0,
                    weekend_activity: 0.9,
                    pattern: Pattern::Errands {
                        anchors: 3,
                        min_stops: 3,
                        max_stops: 5,
                    },
                },
                TypePlan {
                    mixture: vec![(8, 1.0), (9, 1.0), (10, 1.0), (11, 1.0), (13, 1.0), (14, 2.0), (15, 2.0), (16, 1.0)],
                    weekday_activity: 0.6,
                    weekend_activity: 0.4,
                    pattern: Pattern::PassBy { return_prob: 0.5 },
                },
            ],
            hot_zones: 5,
            hot_weight: 8.0,
            path_weights: vec![0.7, 0.25, 0.05],
            west_gateways: vec![8.0, 4.0, 2.0, 1.0, 1.0],
            east_gateways: vec![3.0, 2.0, 2.0, 1.0, 1.0],
            minutes_per_road: 2.5,
            duration_jitter: 6,
            departure_spread: 60,
            seed: 20190812,
        }
    }

    /// A `rows × cols` grid with one commuter; handy for small fixtures.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let desk = Self::desk();
        CorpusSpec {
            rows,
            cols,
            individuals: [1, 0, 0, 0, 0],
            west_gateways: desk.west_gateways.iter().copied().take(rows).collect(),
            east_gateways: desk.east_gateways.iter().copied().take(rows).collect(),
            ..desk
        }
    }

    /// One commuter, one OD pair, one slot, no randomness in time or route:
    /// every day repeats the same trip.
    pub fn degenerate() -> Self {
        let mut spec = Self::grid(2, 2);
        spec.plans[0] = TypePlan {
            mixture: vec![(8, 1.0)],
            weekday_activity: 1.0,
            weekend_activity: 1.0,
            pattern: Pattern::Fixed,
        };
        spec.path_weights = vec![1.0];
        spec.duration_jitter = 0;
        spec.departure_spread = 1;
        spec
    }

    pub fn partition(&self) -> Result<TimeSlotPartition> {
        TimeSlotPartition::uniform(self.slot_width)
    }

    fn check(&self, n_slots: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(format!("corpus: {m}")));
        if self.rows == 0 || self.cols == 0 {
            return bad("empty grid");
        }
        if self.individuals.iter().all(|n| *n == 0) {
            return bad("no individuals");
        }
        if self.days == 0 {
            return bad("no days");
        }
        for plan in &self.plans {
            if plan.mixture.is_empty()
                || plan.mixture.iter().any(|(s, w)| *s >= n_slots || w.is_nan() || *w <= 0.0)
            {
                return bad("slot mixture needs positive weights on existing slots");
            }
        }
        if self.path_weights.is_empty() || self.path_weights.iter().any(|w| w.is_nan() || *w <= 0.0) {
            return bad("path weights must be positive");
        }
        if self.west_gateways.len() > self.rows || self.east_gateways.len() > self.rows {
            return bad("more gateways than rows");
        }
        let uses_passby = self.individuals[TravellerType::PassbyTraveller.ordinal()] > 0;
        if uses_passby && (self.west_gateways.is_empty() || self.east_gateways.is_empty()) {
            return bad("pass-by travellers need gateways");
        }
        if self.rows * self.cols < 3 {
            return bad("need at least three zones");
        }
        Ok(())
    }
}

/// What the corpus was built from, for recovery checks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlantedTruth {
    /// Every OD pair each individual travels.
    pub od_support: BTreeMap<String, BTreeSet<(ZoneId, ZoneId)>>,
    pub homes: BTreeMap<String, ZoneId>,
    pub hot_zones: Vec<ZoneId>,
    /// Planned trips per individual.
    pub trip_counts: BTreeMap<String, u64>,
}

/// A generated corpus.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub trips: Vec<TripRecord>,
    pub zones: Vec<Zone>,
    pub network: RoadNetwork,
    pub partition: TimeSlotPartition,
    pub truth: PlantedTruth,
}

/// Grid geometry: `rows × cols` zones bounded by road segments between
/// `(rows + 1) × (cols + 1)` intersections.
struct Grid {
    rows: usize,
    cols: usize,
}

impl Grid {
    fn zone_id(&self, r: usize, c: usize) -> ZoneId {
        ZoneId(format!("Z{:03}", r * self.cols + c + 1))
    }

    fn cell(&self, zone: &ZoneId) -> (usize, usize) {
        let i: usize = zone.as_str()[1..].parse::<usize>().expect("grid zone id") - 1;
        (i / self.cols, i % self.cols)
    }

    fn horizontal(i: usize, j: usize) -> RoadId {
        RoadId(format!("h{i}_{j}"))
    }

    fn vertical(i: usize, j: usize) -> RoadId {
        RoadId(format!("v{i}_{j}"))
    }

    /// Segments touching intersection `(i, j)`.
    fn incident(&self, i: usize, j: usize) -> Vec<RoadId> {
        let mut roads = Vec::new();
        if j > 0 {
            roads.push(Self::horizontal(i, j - 1));
        }
        if j < self.cols {
            roads.push(Self::horizontal(i, j));
        }
        if i > 0 {
            roads.push(Self::vertical(i - 1, j));
        }
        if i < self.rows {
            roads.push(Self::vertical(i, j));
        }
        roads
    }

    fn network(&self) -> RoadNetwork {
        let mut net = RoadNetwork::new();
        for i in 0..=self.rows {
            for j in 0..=self.cols {
                let roads = self.incident(i, j);
                for a in &roads {
                    net.add_road(a.clone());
                    for b in &roads {
                        if a != b {
                            net.add_edge(a.clone(), b.clone());
                        }
                    }
                }
            }
        }
        net
    }

    fn zones(&self) -> Vec<Zone> {
        let mut zones = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                zones.push(Zone {
                    id: self.zone_id(r, c),
                    longitude: 118.70 + (c as f64 + 0.5) * 0.01,
                    latitude: 30.95 - (r as f64 + 0.5) * 0.01,
                    roads: [
                        Self::horizontal(r, c),
                        Self::horizontal(r + 1, c),
                        Self::vertical(r, c),
                        Self::vertical(r, c + 1),
                    ]
                    .into_iter()
                    .collect(),
                });
            }
        }
        zones
    }

    fn walk(from: (usize, usize), to: (usize, usize), horizontal_first: bool, out: &mut Vec<RoadId>) {
        let (mut i, mut j) = from;
        let step_h = |i: usize, j: &mut usize, out: &mut Vec<RoadId>| {
            while *j != to.1 {
                if *j < to.1 {
                    out.push(Self::horizontal(i, *j));
                    *j += 1;
                } else {
                    *j -= 1;
                    out.push(Self::horizontal(i, *j));
                }
            }
        };
        let step_v = |i: &mut usize, j: usize, out: &mut Vec<RoadId>| {
            while *i != to.0 {
                if *i < to.0 {
                    out.push(Self::vertical(*i, j));
                    *i += 1;
                } else {
                    *i -= 1;
                    out.push(Self::vertical(*i, j));
                }
            }
        };
        if horizontal_first {
            step_h(i, &mut j, out);
            step_v(&mut i, j, out);
        } else {
            step_v(&mut i, j, out);
            step_h(i, &mut j, out);
        }
    }

    /// Route variant `k` from the north-west corner of `o` to the south-east
    /// corner of `d`: along rows first, along columns first, or a staircase
    /// turning halfway along the row. The route starts and ends on a road
    /// bounding its zone.
    fn route(&self, o: &ZoneId, d: &ZoneId, k: usize) -> Vec<RoadId> {
        let from = self.cell(o);
        let (dr, dc) = self.cell(d);
        let to = (dr + 1, dc + 1);
        let mut path = Vec::new();
        match k {
            0 => Self::walk(from, to, true, &mut path),
            1 => Self::walk(from, to, false, &mut path),
            _ => {
                let mid = (from.0, (from.1 + to.1) / 2);
                Self::walk(from, mid, true, &mut path);
                Self::walk(mid, to, false, &mut path);
            }
        }
        let north = Self::horizontal(from.0, from.1);
        let south = Self::horizontal(dr + 1, dc);
        let bounds = |(r, c): (usize, usize), road: &RoadId| {
            [Self::horizontal(r, c), Self::horizontal(r + 1, c), Self::vertical(r, c), Self::vertical(r, c + 1)]
                .contains(road)
        };
        if path.first().is_none_or(|r| !bounds(from, r)) {
            path.insert(0, north);
        }
        if path.last().is_none_or(|r| !bounds((dr, dc), r)) {
            path.push(south);
        }
        path
    }
}

fn draw<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    sample_weighted(weights, rng).expect("positive weights")
}

/// A zone drawn by popularity, avoiding `exclude`.
fn popular_zone<R: Rng + ?Sized>(
    zones: &[ZoneId],
    popularity: &[f64],
    exclude: &[&ZoneId],
    rng: &mut R,
) -> ZoneId {
    let weights: Vec<f64> = zones
        .iter()
        .zip(popularity)
        .map(|(z, w)| if exclude.contains(&z) { 0.0 } else { *w })
        .collect();
    zones[draw(&weights, rng)].clone()
}

/// One day's planned trips of one individual as a zone sequence per chain.
fn plan_day<R: Rng + ?Sized>(
    pattern: &Pattern,
    home: &ZoneId,
    anchors: &[ZoneId],
    weekend: bool,
    ctx: &PlanContext<'_>,
    rng: &mut R,
) -> Vec<ZoneId> {
    match pattern {
        Pattern::Fixed => vec![home.clone(), anchors[0].clone()],
        Pattern::Commute { detour } => {
            let (work, other) = (&anchors[0], &anchors[1]);
            if weekend {
                vec![home.clone(), other.clone(), home.clone()]
            } else if rng.gen_bool(*detour) {
                vec![home.clone(), work.clone(), other.clone(), home.clone()]
            } else {
                vec![home.clone(), work.clone(), home.clone()]
            }
        }
        Pattern::Errands {
            min_stops,
            max_stops,
            ..
        } => {
            let stops = rng.gen_range(*min_stops..=*max_stops);
            let mut tour = vec![home.clone()];
            for _ in 0..stops {
                let last = tour.last().expect("starts at home").clone();
                let choices: Vec<&ZoneId> = anchors.iter().filter(|a| **a != last).collect();
                tour.push(choices[rng.gen_range(0..choices.len())].clone());
            }
            if tour.last() != Some(home) {
                tour.push(home.clone());
            }
            tour
        }
        Pattern::Roaming { max_trips } => {
            let n = rng.gen_range(1..=*max_trips);
            let mut chain = vec![home.clone()];
            for _ in 0..n {
                let last = chain.last().expect("starts at home").clone();
                chain.push(popular_zone(ctx.zones, ctx.popularity, &[&last], rng));
            }
            chain
        }
        Pattern::PassBy { return_prob } => {
            let (west, east) = (home, &anchors[0]);
            if rng.gen_bool(*return_prob) {
                vec![west.clone(), east.clone(), west.clone()]
            } else {
                vec![west.clone(), east.clone()]
            }
        }
    }
}

struct PlanContext<'a> {
    zones: &'a [ZoneId],
    popularity: &'a [f64],
}

/// Departure minutes for legs in ascending slots, spaced so no trip starts
/// before the previous one ends.
fn schedule<R: Rng + ?Sized>(
    slots: &[&TimeSlot],
    durations: &[u32],
    spread: u16,
    rng: &mut R,
) -> Vec<u16> {
    let fits = |minutes: &[u16]| {
        minutes.windows(2).zip(durations).all(|(w, d)| w[1] as u32 > w[0] as u32 + d)
            && minutes.last().is_none_or(|m| *m <= 1440)
    };
    let draw_minutes = |rng: &mut R| {
        let mut minutes: Vec<u16> = slots
            .iter()
            .map(|s| {
                let width = (s.len() as u16).min(spread).max(1);
                s.start.get() + rng.gen_range(0..width)
            })
            .collect();
        minutes.sort_unstable();
        minutes
    };
    for _ in 0..64 {
        let minutes = draw_minutes(rng);
        if fits(&minutes) {
            return minutes;
        }
    }
    // push later legs back; if that runs past midnight, lay the day out
    // from 06:00 instead
    let mut minutes = draw_minutes(rng);
    for i in 1..minutes.len() {
        let earliest = minutes[i - 1] as u32 + durations[i - 1] + 1;
        minutes[i] = minutes[i].max(earliest.min(u16::MAX as u32) as u16);
    }
    if fits(&minutes) {
        return minutes;
    }
    let mut t = 361u32;
    durations
        .iter()
        .map(|d| {
            let m = t as u16;
            t += d + 1;
            m
        })
        .collect()
}

/// Builds a planted corpus from `spec`, drawing from `rng`.
pub fn synth_corpus<R: Rng + ?Sized>(spec: &CorpusSpec, rng: &mut R) -> Result<Corpus> {
    let partition = spec.partition()?;
    spec.check(partition.len())?;
    let grid = Grid {
        rows: spec.rows,
        cols: spec.cols,
    };
    let zones = grid.zones();
    let network = grid.network();
    let zone_ids: Vec<ZoneId> = zones.iter().map(|z| z.id.clone()).collect();

    let centre = ((spec.rows as f64 - 1.0) / 2.0, (spec.cols as f64 - 1.0) / 2.0);
    let mut by_centrality: Vec<(f64, &ZoneId)> = zone_ids
        .iter()
        .map(|z| {
            let (r, c) = grid.cell(z);
            ((r as f64 - centre.0).powi(2) + (c as f64 - centre.1).powi(2), z)
        })
        .collect();
    by_centrality.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
    let hot: Vec<ZoneId> = by_centrality
        .iter()
        .take(spec.hot_zones.min(zone_ids.len()))
        .map(|(_, z)| (*z).clone())
        .collect();
    let popularity: Vec<f64> = zone_ids
        .iter()
        .map(|z| if hot.contains(z) { spec.hot_weight } else { 1.0 })
        .collect();
    let residential: Vec<f64> = zone_ids
        .iter()
        .map(|z| if hot.contains(z) { 0.0 } else { 1.0 })
        .collect();
    let residential = if residential.iter().any(|w| *w > 0.0) {
        residential
    } else {
        vec![1.0; zone_ids.len()]
    };
    let west: Vec<ZoneId> = (0..spec.west_gateways.len()).map(|r| grid.zone_id(r, 0)).collect();
    let east: Vec<ZoneId> = (0..spec.east_gateways.len())
        .map(|r| grid.zone_id(r, spec.cols - 1))
        .collect();
    let ctx = PlanContext {
        zones: &zone_ids,
        popularity: &popularity,
    };

    let mut truth = PlantedTruth {
        hot_zones: hot.clone(),
        ..PlantedTruth::default()
    };
    let mut trips = Vec::new();
    let prefixes = ["C", "S", "R", "H", "P"];
    for ty in TravellerType::ALL {
        let plan = &spec.plans[ty.ordinal()];
        let mixture: Vec<f64> = plan.mixture.iter().map(|(_, w)| *w).collect();
        for n in 0..spec.individuals[ty.ordinal()] {
            let id = format!("{}{:04}", prefixes[ty.ordinal()], n + 1);
            let (home, anchors) = match &plan.pattern {
                Pattern::PassBy { .. } => {
                    let w = west[draw(&spec.west_gateways, rng)].clone();
                    let e = east[draw(&spec.east_gateways, rng)].clone();
                    (w, vec![e])
                }
                Pattern::Errands { anchors: k, .. } => {
                    let home = popular_zone(&zone_ids, &residential, &[], rng);
                    let mut anchors: Vec<ZoneId> = Vec::new();
                    while anchors.len() < (*k).max(2).min(zone_ids.len() - 1) {
                        let mut taken: Vec<&ZoneId> = anchors.iter().collect();
                        taken.push(&home);
                        let z = popular_zone(&zone_ids, &popularity, &taken, rng);
                        anchors.push(z);
                    }
                    (home, anchors)
                }
                _ => {
                    let home = popular_zone(&zone_ids, &residential, &[], rng);
                    let work = popular_zone(&zone_ids, &popularity, &[&home], rng);
                    let other = popular_zone(&zone_ids, &popularity, &[&home, &work], rng);
                    (home, vec![work, other])
                }
            };

            let mut active: Vec<bool> = (0..spec.days)
                .map(|d| {
                    let p = if is_weekend(spec.epoch, d) {
                        plan.weekend_activity
                    } else {
                        plan.weekday_activity
                    };
                    rng.gen_bool(p.clamp(0.0, 1.0))
                })
                .collect();
            if !active.iter().any(|a| *a) {
                let d = rng.gen_range(0..spec.days as usize);
                active[d] = true;
            }

            let mut support = BTreeSet::new();
            let mut count = 0u64;
            for (day, _) in active.iter().enumerate().filter(|(_, a)| **a) {
                let day = day as i32;
                let weekend = is_weekend(spec.epoch, day as u32);
                let chain = plan_day(&plan.pattern, &home, &anchors, weekend, &ctx, rng);
                let legs = chain.len() - 1;
                let mut slot_ids: Vec<usize> =
                    (0..legs).map(|_| plan.mixture[draw(&mixture, rng)].0).collect();
                slot_ids.sort_unstable();
                let slots: Vec<&TimeSlot> = slot_ids
                    .iter()
                    .map(|s| partition.slot(*s).expect("checked mixture"))
                    .collect();
                let paths: Vec<Vec<RoadId>> = chain
                    .windows(2)
                    .map(|w| grid.route(&w[0], &w[1], draw(&spec.path_weights, rng)))
                    .collect();
                let durations: Vec<u32> = paths
                    .iter()
                    .map(|p| {
                        let base = (p.len() as f64 * spec.minutes_per_road).round() as u32;
                        base.max(1) + rng.gen_range(0..=spec.duration_jitter)
                    })
                    .collect();
                let minutes = schedule(&slots, &durations, spec.departure_spread, rng);
                for (leg, path) in paths.into_iter().enumerate() {
                    let departure = TimePeriod::new(minutes[leg])?;
                    let (o, d) = (chain[leg].clone(), chain[leg + 1].clone());
                    support.insert((o.clone(), d.clone()));
                    trips.push(TripRecord {
                        traveller_id: id.clone(),
                        traveller_type: ty,
                        date: day,
                        departure,
                        slot: partition.slot_of(departure).id,
                        o_zone: o,
                        d_zone: d,
                        path,
                        duration: durations[leg],
                    });
                    count += 1;
                }
            }
            truth.od_support.insert(id.clone(), support);
            truth.homes.insert(id.clone(), home);
            truth.trip_counts.insert(id, count);
        }
    }
    trips.sort_by(|a, b| {
        (&a.traveller_id, a.date, a.departure).cmp(&(&b.traveller_id, b.date, b.departure))
    });
    Ok(Corpus {
        trips,
        zones,
        network,
        partition,
        truth,
    })
}

impl CorpusSpec {
    /// [`synth_corpus`] with a generator seeded from `self.seed`.
    pub fn generate(&self) -> Result<Corpus> {
        synth_corpus(self, &mut ChaCha8Rng::seed_from_u64(self.seed))
    }
}

fn is_weekend(epoch: NaiveDate, day: u32) -> bool {
    matches!(
        (epoch + Days::new(day as u64)).weekday(),
        Weekday::Sat | Weekday::Sun
    )
}

/// Weights of the generator that the oracles need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleParams {
    pub kappa: f64,
    pub epsilon: f64,
    pub blowup: f64,
    pub shape: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            kappa: 1e-9,
            epsilon: 1e-6,
            blowup: 1e9,
            shape: 1.0,
        }
    }
}

fn share(count: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

fn normalized(weights: Vec<f64>) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Exact slot probabilities for an individual at `location` at minute
/// `clock` with `remaining` trips still owed today (including this one).
/// Every slot of the partition is weighted, including those already past.
#[allow(clippy::too_many_arguments)]
pub fn oracle_slot_probabilities(
    partition: &TimeSlotPartition,
    profile: &IndividualProfile,
    location: &ZoneId,
    generated: &TemporalCounts,
    reference: &TemporalCounts,
    clock: TimePeriod,
    remaining: u32,
    params: OracleParams,
) -> Vec<f64> {
    let slots = partition.slots();
    let n = slots.len();
    let now = clock.get();
    let current = slots
        .iter()
        .position(|s| s.start.get() <= now && now <= s.end.get())
        .expect("partition covers the day");
    let later = n - current;
    let reserved = (remaining.max(1) as usize - 1).min(later - 1);
    let from_here: u64 = (0..n)
        .map(|j| profile.slot_origin_counts[j].get(location).copied().unwrap_or(0))
        .sum();
    let weights = (0..n)
        .map(|j| {
            let logic = if j >= current && j < n - reserved {
                1.0
            } else {
                params.kappa
            };
            let x = (share(generated.slot_counts[j], generated.total)
                - share(reference.slot_counts[j], reference.total))
            .clamp(-1.0, 1.0);
            let feedback = if x >= 0.0 {
                1.0 - x.powf(params.shape)
            } else {
                params.blowup.powf((-x).powf(params.shape))
            };
            let preference = share(profile.slot_counts[j], profile.total_trips);
            let here = profile.slot_origin_counts[j].get(location).copied().unwrap_or(0);
            let located = share(here, from_here);
            logic * feedback * (preference * (1.0 + located) + params.epsilon)
        })
        .collect();
    normalized(weights)
}

/// Exact probability of each minute of `slot` given the clock; minutes
/// before the clock get 0.
pub fn oracle_period_probabilities(
    slot: &TimeSlot,
    clock: TimePeriod,
    generated: &TemporalCounts,
    reference: &TemporalCounts,
) -> Vec<(TimePeriod, f64)> {
    let minutes: Vec<u16> = (slot.start.get()..=slot.end.get()).collect();
    let delta: Vec<Option<f64>> = minutes
        .iter()
        .map(|m| {
            (*m >= clock.get()).then(|| {
                let i = *m as usize - 1;
                share(reference.period_counts[i], reference.total)
                    - share(generated.period_counts[i], generated.total)
            })
        })
        .collect();
    let any_positive = delta.iter().flatten().any(|d| *d > 0.0);
    let weights = delta
        .iter()
        .map(|d| match d {
            None => 0.0,
            Some(d) if any_positive => d.max(0.0),
            Some(d) => 1.0 / d.abs().max(1e-12),
        })
        .collect();
    minutes
        .into_iter()
        .map(|m| TimePeriod::new(m).expect("slot minute"))
        .zip(normalized(weights))
        .collect()
}

/// Exact destination probabilities from `location`, with the origin the
/// trip actually starts from.
pub fn oracle_destination_probabilities(
    profile: &IndividualProfile,
    location: &ZoneId,
) -> (ZoneId, BTreeMap<ZoneId, f64>) {
    let departs = |z: &ZoneId| {
        profile
            .od_counts
            .get(z)
            .map_or(0, |row| row.values().sum::<u64>())
    };
    let origin = if departs(location) > 0 {
        location.clone()
    } else {
        let mut best: Option<(&ZoneId, u64)> = None;
        for z in profile.od_counts.keys() {
            let n = departs(z);
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((z, n));
            }
        }
        best.expect("profile has trips").0.clone()
    };
    let row = &profile.od_counts[&origin];
    let total: u64 = row.values().sum();
    let probs = row
        .iter()
        .map(|(d, n)| (d.clone(), *n as f64 / total as f64))
        .collect();
    (origin, probs)
}

/// Exact path probabilities for an OD pair of the catalog.
pub fn oracle_path_probabilities(
    catalog: &PathCatalog,
    origin: &ZoneId,
    destination: &ZoneId,
) -> Vec<(PathId, f64)> {
    let entries = catalog
        .candidates(origin.as_str(), destination.as_str())
        .unwrap_or(&[]);
    let total: u64 = entries.iter().map(|e| e.crowd_count).sum();
    entries
        .iter()
        .map(|e| (e.id, e.crowd_count as f64 / total as f64))
        .collect()
}

/// Total variation distance between two probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
