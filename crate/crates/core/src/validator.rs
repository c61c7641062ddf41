//! Comparison metrics between a reference and a generated trip dataset.
//!
//! All logarithms are natural.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{format_hhmm, RoadId, TravellerType, TripRecord, ZoneId, MINUTES_PER_DAY};
use crate::scalar::Scalar;

/// A normalized distribution over labelled bins.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S> {
    bins: Vec<String>,
    mass: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    /// Normalizes `counts`; fails with [`Error::EmptyDistribution`] when they
    /// sum to zero.
    pub fn from_counts(bins: Vec<String>, counts: &[u64]) -> Result<Self> {
        if bins.len() != counts.len() {
            return Err(Error::SizeMismatch {
                left: bins.len(),
                right: counts.len(),
            });
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyDistribution);
        }
        let mass = counts.iter().map(|c| S::ratio(*c, total)).collect();
        Ok(Distribution { bins, mass })
    }

    /// Distribution over the keys of `counts` plus every label of `extra`,
    /// in sorted order.
    pub fn from_map<'e, K, I>(counts: &BTreeMap<K, u64>, extra: I) -> Result<Self>
    where
        K: Ord + AsRef<str> + 'e,
        I: IntoIterator<Item = &'e K>,
    {
        let mut keys: BTreeSet<&K> = counts.keys().collect();
        for k in extra {
            keys.insert(k);
        }
        let bins = keys.iter().map(|k| k.as_ref().to_string()).collect();
        let values: Vec<u64> = keys
            .iter()
            .map(|k| counts.get(*k).copied().unwrap_or(0))
            .collect();
        Self::from_counts(bins, &values)
    }

    /// Takes probabilities as given; they must be non-negative and sum to 1.
    pub fn from_mass(bins: Vec<String>, mass: Vec<S>) -> Result<Self> {
        if bins.len() != mass.len() {
            return Err(Error::SizeMismatch {
                left: bins.len(),
                right: mass.len(),
            });
        }
        let total: S = mass.iter().copied().sum();
        if mass.iter().any(|m| m.is_nan() || *m < S::zero()) || (total - S::one()).abs() > S::of(1e-6) {
            return Err(Error::InvalidParams(format!("masses sum to {total}")));
        }
        Ok(Distribution { bins, mass })
    }

    pub fn bins(&self) -> &[String] {
        &self.bins
    }

    pub fn mass(&self) -> &[S] {
        &self.mass
    }

    pub fn get(&self, bin: &str) -> Option<S> {
        self.bins.iter().position(|b| b == bin).map(|i| self.mass[i])
    }

    /// `-Σ p ln p`.
    pub fn entropy(&self) -> S {
        entropy(&self.mass)
    }

    /// CSV dump `bin,mass` for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,mass\n");
        for (b, m) in self.bins.iter().zip(&self.mass) {
            let _ = writeln!(out, "{b},{m}");
        }
        out
    }
}

fn entropy<S: Scalar>(mass: &[S]) -> S {
    let h: S = mass
        .iter()
        .filter(|p| **p > S::zero())
        .map(|p| -*p * p.ln())
        .sum();
    h.max(S::zero())
}

fn check_bins<S>(p: &Distribution<S>, q: &Distribution<S>) -> Result<()> {
    if p.bins != q.bins {
        return Err(Error::BinMismatch);
    }
    Ok(())
}

fn kl_terms<S: Scalar>(p: &[S], q: &[S]) -> S {
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi > S::zero())
        .map(|(pi, qi)| *pi * (*pi / *qi).ln())
        .sum()
}

/// `KL(p‖q)`; infinite when `q` lacks mass where `p` has some.
pub fn kl_divergence<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Result<S> {
    check_bins(p, q)?;
    Ok(kl_terms(&p.mass, &q.mass).max(S::zero()))
}

/// Jensen-Shannon divergence, in `[0, ln 2]`.
pub fn js_divergence<S: Scalar>(p: &Distribution<S>, q: &Distribution<S>) -> Result<S> {
    check_bins(p, q)?;
    let half = S::of(0.5);
    let m: Vec<S> = p.mass.iter().zip(&q.mass).map(|(a, b)| (*a + *b) * half).collect();
    let js = half * kl_terms(&p.mass, &m) + half * kl_terms(&q.mass, &m);
    Ok(js.max(S::zero()).min(S::of(std::f64::consts::LN_2)))
}

/// `|s ∩ s'| / |s|` for two sets of equal size.
pub fn overlap_ratio<S: Scalar, T: Ord>(s: &BTreeSet<T>, s_prime: &BTreeSet<T>) -> Result<S> {
    if s.len() != s_prime.len() {
        return Err(Error::SizeMismatch {
            left: s.len(),
            right: s_prime.len(),
        });
    }
    if s.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let shared = s.intersection(s_prime).count() as u64;
    Ok(S::ratio(shared, s.len() as u64))
}

/// Weekday or holiday.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayClass {
    Weekday,
    Holiday,
}

impl DayClass {
    pub fn as_str(self) -> &'static str {
        match self {
            DayClass::Weekday => "weekday",
            DayClass::Holiday => "holiday",
        }
    }
}

/// Maps day offsets to day classes. Saturdays and Sundays are holidays
/// unless overridden.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DayCalendar {
    epoch: NaiveDate,
    overrides: BTreeMap<NaiveDate, DayClass>,
}

impl DayCalendar {
    pub fn new(epoch: NaiveDate) -> Self {
        DayCalendar {
            epoch,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, date: NaiveDate, class: DayClass) -> Self {
        self.overrides.insert(date, class);
        self
    }

    pub fn set(&mut self, date: NaiveDate, class: DayClass) {
        self.overrides.insert(date, class);
    }

    pub fn date_of(&self, day: i32) -> NaiveDate {
        if day >= 0 {
            self.epoch + Days::new(day as u64)
        } else {
            self.epoch - Days::new(day.unsigned_abs() as u64)
        }
    }

    pub fn classify(&self, day: i32) -> DayClass {
        let date = self.date_of(day);
        if let Some(c) = self.overrides.get(&date) {
            return *c;
        }
        match date.weekday() {
            Weekday::Sat | Weekday::Sun => DayClass::Holiday,
            _ => DayClass::Weekday,
        }
    }
}

/// Which trips a metric looks at. `None` means no restriction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Selection {
    pub traveller_type: Option<TravellerType>,
    pub day_class: Option<DayClass>,
}

impl Selection {
    pub fn of_type(ty: Option<TravellerType>) -> Self {
        Selection {
            traveller_type: ty,
            day_class: None,
        }
    }

    pub fn matches(&self, trip: &TripRecord, calendar: &DayCalendar) -> bool {
        self.traveller_type.is_none_or(|t| t == trip.traveller_type)
            && self.day_class.is_none_or(|c| c == calendar.classify(trip.date))
    }
}

/// Share of departures per `granularity`-minute window of the day. Minute
/// `t` falls in window `(t - 1) / granularity`.
pub fn temporal_distribution<'t, S, I>(
    trips: I,
    granularity: u16,
    selection: Selection,
    calendar: &DayCalendar,
) -> Result<Distribution<S>>
where
    S: Scalar,
    I: IntoIterator<Item = &'t TripRecord>,
{
    if granularity == 0 || !MINUTES_PER_DAY.is_multiple_of(granularity) {
        return Err(Error::InvalidParams(format!(
            "granularity {granularity} does not divide the day"
        )));
    }
    let n = (MINUTES_PER_DAY / granularity) as usize;
    let mut counts = vec![0u64; n];
    for t in trips.into_iter().filter(|t| selection.matches(t, calendar)) {
        counts[(t.departure.get() as usize - 1) / granularity as usize] += 1;
    }
    let bins = (0..n as u16)
        .map(|i| {
            let start = i * granularity;
            format!("{}-{}", format_hhmm(start), format_hhmm(start + granularity))
        })
        .collect();
    Distribution::from_counts(bins, &counts)
}

/// Origin plus destination visits per zone.
pub fn zone_visits<'t, I>(trips: I) -> BTreeMap<ZoneId, u64>
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    let mut visits = BTreeMap::new();
    for t in trips {
        *visits.entry(t.o_zone.clone()).or_insert(0) += 1;
        *visits.entry(t.d_zone.clone()).or_insert(0) += 1;
    }
    visits
}

/// Trips per OD pair.
pub fn od_counts<'t, I>(trips: I) -> BTreeMap<(ZoneId, ZoneId), u64>
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    let mut counts = BTreeMap::new();
    for t in trips {
        *counts.entry((t.o_zone.clone(), t.d_zone.clone())).or_insert(0) += 1;
    }
    counts
}

/// The `ceil(k * |universe|)` members of `universe` with the highest counts
/// (missing counts are zero), ties to the smallest key.
pub fn top_fraction<K: Ord + Clone>(
    counts: &BTreeMap<K, u64>,
    universe: &BTreeSet<K>,
    k: f64,
) -> Result<BTreeSet<K>> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::InvalidParams(format!("top fraction {k} outside (0, 1]")));
    }
    let take = (k * universe.len() as f64 - 1e-9).ceil().max(0.0) as usize;
    let mut ranked: Vec<(&K, u64)> = universe
        .iter()
        .map(|key| (key, counts.get(key).copied().unwrap_or(0)))
        .collect();
    // universe iterates in key order and the sort is stable
    ranked.sort_by_key(|e| std::cmp::Reverse(e.1));
    Ok(ranked.into_iter().take(take).map(|(key, _)| key.clone()).collect())
}

/// Most visited zones among the zones the trips touch.
pub fn topk_zones<'t, I>(trips: I, k: f64) -> Result<BTreeSet<ZoneId>>
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    let visits = zone_visits(trips);
    let universe = visits.keys().cloned().collect();
    top_fraction(&visits, &universe, k)
}

/// Most frequent OD pairs among the pairs the trips use.
pub fn topk_od<'t, I>(trips: I, k: f64) -> Result<BTreeSet<(ZoneId, ZoneId)>>
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    let counts = od_counts(trips);
    let universe = counts.keys().cloned().collect();
    top_fraction(&counts, &universe, k)
}

/// Trips through each road. A road id names the undirected segment, so both
/// travel directions land on the same key; a path crossing a road twice
/// counts once.
pub fn road_trip_counts<'t, I>(trips: I) -> BTreeMap<RoadId, u64>
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    let mut counts = BTreeMap::new();
    for t in trips {
        let roads: BTreeSet<&RoadId> = t.path.iter().collect();
        for r in roads {
            *counts.entry(r.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// Road access shares over the roads used by `trips` plus `roads`, which
/// get share 0 when unused.
pub fn road_access_distribution<'t, 'r, S, I, R>(trips: I, roads: R) -> Result<Distribution<S>>
where
    S: Scalar,
    I: IntoIterator<Item = &'t TripRecord>,
    R: IntoIterator<Item = &'r RoadId>,
{
    Distribution::from_map(&road_trip_counts(trips), roads)
}

/// Trips grouped by individual, each in chronological order.
fn by_individual<'t, I>(trips: I) -> BTreeMap<(&'t str, TravellerType), Vec<&'t TripRecord>>
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    let mut groups: BTreeMap<(&str, TravellerType), Vec<&TripRecord>> = BTreeMap::new();
    for t in trips {
        groups
            .entry((t.traveller_id.as_str(), t.traveller_type))
            .or_default()
            .push(t);
    }
    for g in groups.values_mut() {
        g.sort_by_key(|t| (t.date, t.departure));
    }
    groups
}

/// Continuous and total consecutive trip pairs.
pub fn continuity_counts<'t, I>(trips: I) -> (u64, u64)
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    let mut continuous = 0;
    let mut pairs = 0;
    for chain in by_individual(trips).values() {
        for w in chain.windows(2) {
            pairs += 1;
            continuous += (w[1].o_zone == w[0].d_zone) as u64;
        }
    }
    (continuous, pairs)
}

/// Share of consecutive trip pairs of the same individual where the next
/// origin is the previous destination. `None` when no individual has two
/// trips.
pub fn continuity_ratio<'t, S, I>(trips: I) -> Option<S>
where
    S: Scalar,
    I: IntoIterator<Item = &'t TripRecord>,
{
    let (continuous, pairs) = continuity_counts(trips);
    (pairs > 0).then(|| S::ratio(continuous, pairs))
}

/// Entropy of the destination frequencies of one individual's trips.
pub fn destination_entropy<'t, S, I>(trips: I) -> Result<S>
where
    S: Scalar,
    I: IntoIterator<Item = &'t TripRecord>,
{
    let mut counts: BTreeMap<&ZoneId, u64> = BTreeMap::new();
    let mut total = 0;
    for t in trips {
        *counts.entry(&t.d_zone).or_insert(0) += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::EmptyDistribution);
    }
    let mass: Vec<S> = counts.values().map(|c| S::ratio(*c, total)).collect();
    Ok(entropy(&mass))
}

/// Destination entropy of every individual.
pub fn individual_entropies<'t, S, I>(trips: I) -> Vec<S>
where
    S: Scalar,
    I: IntoIterator<Item = &'t TripRecord>,
{
    by_individual(trips)
        .values()
        .map(|chain| destination_entropy(chain.iter().copied()).expect("groups are non-empty"))
        .collect()
}

/// Trips per individual.
pub fn individual_frequencies<'t, I>(trips: I) -> Vec<u64>
where
    I: IntoIterator<Item = &'t TripRecord>,
{
    by_individual(trips)
        .values()
        .map(|chain| chain.len() as u64)
        .collect()
}

/// Counts of `values` in `n_bins` bins of width `width` starting at 0; the
/// last bin also takes everything beyond it.
pub fn histogram<S: Scalar>(values: &[S], width: S, n_bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_bins];
    for v in values {
        let i = (*v / width).floor().to_usize().unwrap_or(0);
        counts[i.min(n_bins - 1)] += 1;
    }
    counts
}

fn histogram_labels(width: f64, n_bins: usize) -> Vec<String> {
    (0..n_bins)
        .map(|i| {
            if i + 1 == n_bins {
                format!(">={}", i as f64 * width)
            } else {
                format!("[{},{})", i as f64 * width, (i + 1) as f64 * width)
            }
        })
        .collect()
}

/// Knobs of [`build_report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReportOptions {
    /// Minutes per window of the temporal distributions.
    pub granularity: u16,
    pub zone_fractions: Vec<f64>,
    pub od_fractions: Vec<f64>,
    pub entropy_bin_width: f64,
    pub entropy_bins: usize,
    /// Frequency histogram bins of width 1; the last is open-ended.
    pub frequency_bins: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            granularity: 15,
            zone_fractions: vec![0.1, 0.2, 0.3, 0.5],
            od_fractions: vec![0.1, 0.2, 0.3, 0.5],
            entropy_bin_width: 0.25,
            entropy_bins: 12,
            frequency_bins: 40,
        }
    }
}

/// One report line; `value` holds the error text when the metric failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell<S> {
    pub metric: String,
    pub group: String,
    pub param: String,
    pub value: std::result::Result<S, String>,
}

/// Every metric per traveller type and for all types together.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport<S> {
    pub cells: Vec<Cell<S>>,
    pub warnings: Vec<String>,
}

impl<S: Scalar> ValidationReport<S> {
    fn push(&mut self, metric: &str, group: &str, param: impl Into<String>, value: Result<S>) {
        self.cells.push(Cell {
            metric: metric.to_string(),
            group: group.to_string(),
            param: param.into(),
            value: value.map_err(|e| e.to_string()),
        });
    }

    pub fn cell(&self, metric: &str, group: &str, param: &str) -> Option<&Cell<S>> {
        self.cells
            .iter()
            .find(|c| c.metric == metric && c.group == group && c.param == param)
    }

    /// Value of a cell, `None` when missing or failed.
    pub fn value(&self, metric: &str, group: &str, param: &str) -> Option<S> {
        self.cell(metric, group, param).and_then(|c| c.value.clone().ok())
    }

    pub fn cells_of<'a>(&'a self, metric: &'a str) -> impl Iterator<Item = &'a Cell<S>> + 'a {
        self.cells.iter().filter(move |c| c.metric == metric)
    }

    /// `metric,type,param,value` lines, warnings as `#` comments at the end.
    pub fn to_text(&self) -> String {
        let mut out = String::from("metric,type,param,value\n");
        for c in &self.cells {
            let value = match &c.value {
                Ok(v) => format!("{:.9}", v.as_f64()),
                Err(e) => e.clone(),
            };
            let _ = writeln!(out, "{},{},{},{}", c.metric, c.group, c.param, value);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "# warning: {w}");
        }
        out.push_str("# logarithms are natural (base e); js divergence lies in [0, ln 2]\n");
        out
    }
}

const ALL: &str = "all";

/// Compares `generated` against `reference`. A failing metric marks its own
/// cell and never aborts the report.
pub fn build_report<S: Scalar>(
    reference: &[TripRecord],
    generated: &[TripRecord],
    calendar: &DayCalendar,
    options: &ReportOptions,
) -> ValidationReport<S> {
    let mut report = ValidationReport::default();

    let ref_zones: BTreeSet<&ZoneId> = reference.iter().flat_map(|t| [&t.o_zone, &t.d_zone]).collect();
    let gen_zones: BTreeSet<&ZoneId> = generated.iter().flat_map(|t| [&t.o_zone, &t.d_zone]).collect();
    for z in ref_zones.difference(&gen_zones) {
        report.warnings.push(format!("zone {z} is missing from the generated data"));
    }
    for z in gen_zones.difference(&ref_zones) {
        report.warnings.push(format!("zone {z} is missing from the reference data"));
    }

    let present: BTreeSet<TravellerType> = reference
        .iter()
        .chain(generated)
        .map(|t| t.traveller_type)
        .collect();
    let groups: Vec<Option<TravellerType>> = present
        .into_iter()
        .map(Some)
        .chain(std::iter::once(None))
        .collect();

    for ty in groups {
        let group = ty.map_or(ALL, |t| t.as_str());
        let pick = |data: &'_ [TripRecord]| -> Vec<TripRecord> {
            data.iter()
                .filter(|t| ty.is_none_or(|x| x == t.traveller_type))
                .cloned()
                .collect()
        };
        let r = pick(reference);
        let g = pick(generated);
        report_group(&mut report, group, &r, &g, calendar, options);
    }
    report
}

fn report_group<S: Scalar>(
    report: &mut ValidationReport<S>,
    group: &str,
    r: &[TripRecord],
    g: &[TripRecord],
    calendar: &DayCalendar,
    options: &ReportOptions,
) {
    report.push("trips", group, "reference", Ok(S::of(r.len() as f64)));
    report.push("trips", group, "generated", Ok(S::of(g.len() as f64)));

    for class in [Some(DayClass::Weekday), Some(DayClass::Holiday), None] {
        let selection = Selection {
            traveller_type: None,
            day_class: class,
        };
        let value = temporal_distribution::<S, _>(r, options.granularity, selection, calendar)
            .and_then(|p| {
                let q = temporal_distribution(g, options.granularity, selection, calendar)?;
                js_divergence(&p, &q)
            });
        let param = format!("{}/{}min", class.map_or(ALL, |c| c.as_str()), options.granularity);
        report.push("js_time", group, param, value);
    }

    let ref_visits = zone_visits(r);
    let gen_visits = zone_visits(g);
    let zones: BTreeSet<ZoneId> = ref_visits.keys().chain(gen_visits.keys()).cloned().collect();
    for k in &options.zone_fractions {
        let value = nonempty(r, g).and_then(|_| {
            let a = top_fraction(&ref_visits, &zones, *k)?;
            let b = top_fraction(&gen_visits, &zones, *k)?;
            overlap_ratio(&a, &b)
        });
        report.push("hotzone_overlap", group, percent(*k), value);
    }

    let ref_od = od_counts(r);
    let gen_od = od_counts(g);
    let pairs: BTreeSet<(ZoneId, ZoneId)> = ref_od.keys().chain(gen_od.keys()).cloned().collect();
    for k in &options.od_fractions {
        let value = nonempty(r, g).and_then(|_| {
            let a = top_fraction(&ref_od, &pairs, *k)?;
            let b = top_fraction(&gen_od, &pairs, *k)?;
            overlap_ratio(&a, &b)
        });
        report.push("od_overlap", group, percent(*k), value);
    }

    let ref_roads = road_trip_counts(r);
    let gen_roads = road_trip_counts(g);
    let value = Distribution::<S>::from_map(&ref_roads, gen_roads.keys()).and_then(|p| {
        let q = Distribution::from_map(&gen_roads, ref_roads.keys())?;
        js_divergence(&p, &q)
    });
    report.push("js_road", group, "-", value);

    for (name, data) in [("reference", r), ("generated", g)] {
        let value = continuity_ratio::<S, _>(data)
            .ok_or_else(|| Error::InvalidParams("no individual with two trips".into()));
        report.push("continuity", group, name, value);
    }

    let w = S::of(options.entropy_bin_width);
    let ref_h = individual_entropies::<S, _>(r);
    let gen_h = individual_entropies::<S, _>(g);
    for (name, h) in [("reference", &ref_h), ("generated", &gen_h)] {
        report.push("entropy_mean", group, name, mean(h));
    }
    let labels = histogram_labels(options.entropy_bin_width, options.entropy_bins);
    let value = Distribution::<S>::from_counts(labels.clone(), &histogram(&ref_h, w, options.entropy_bins))
        .and_then(|p| {
            let q = Distribution::from_counts(labels, &histogram(&gen_h, w, options.entropy_bins))?;
            js_divergence(&p, &q)
        });
    report.push("entropy_js", group, format!("width={}", options.entropy_bin_width), value);

    let ref_f: Vec<S> = individual_frequencies(r).into_iter().map(|f| S::of(f as f64)).collect();
    let gen_f: Vec<S> = individual_frequencies(g).into_iter().map(|f| S::of(f as f64)).collect();
    for (name, f) in [("reference", &ref_f), ("generated", &gen_f)] {
        report.push("frequency_mean", group, name, mean(f));
    }
    let labels = histogram_labels(1.0, options.frequency_bins);
    let value = Distribution::<S>::from_counts(labels.clone(), &histogram(&ref_f, S::one(), options.frequency_bins))
        .and_then(|p| {
            let q = Distribution::from_counts(labels, &histogram(&gen_f, S::one(), options.frequency_bins))?;
            js_divergence(&p, &q)
        });
    report.push("frequency_js", group, "width=1", value);
}

fn nonempty(r: &[TripRecord], g: &[TripRecord]) -> Result<()> {
    if r.is_empty() || g.is_empty() {
        Err(Error::EmptyDistribution)
    } else {
        Ok(())
    }
}

fn mean<S: Scalar>(values: &[S]) -> Result<S> {
    if values.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    Ok(values.iter().copied().sum::<S>() / S::of(values.len() as f64))
}

fn percent(k: f64) -> String {
    format!("top{}%", (k * 100.0).round())
}
