//! CSV boundary: trip records, zone/road relations and the road edge list.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    parse_hhmm, RoadId, RoadNetwork, TimePeriod, TimeSlotPartition, TravellerType, TripRecord,
    Zone, ZoneId,
};

pub const TRIP_COLUMNS: [&str; 9] = [
    "traveller_ID",
    "traveller_type",
    "Date",
    "Departure_time",
    "Time_slot",
    "O_zone",
    "D_zone",
    "Path",
    "Duration",
];

const ZONE_COLUMNS: [&str; 4] = ["Zone_ID", "Longitude", "Latitude", "Roads"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DurationUnit {
    #[default]
    Minutes,
    Seconds,
}

/// Settings shared by trip reading and writing.
#[derive(Clone, Debug)]
pub struct TripCodec<'a> {
    pub partition: &'a TimeSlotPartition,
    pub epoch: NaiveDate,
    pub duration_unit: DurationUnit,
    pub delimiter: u8,
}

impl<'a> TripCodec<'a> {
    pub fn new(partition: &'a TimeSlotPartition, epoch: NaiveDate) -> Self {
        TripCodec {
            partition,
            epoch,
            duration_unit: DurationUnit::Minutes,
            delimiter: b',',
        }
    }

    pub fn date_of(&self, day: i32) -> NaiveDate {
        self.epoch + chrono::Duration::days(day as i64)
    }

    pub fn day_of(&self, date: NaiveDate) -> i32 {
        (date - self.epoch).num_days() as i32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowErrorKind {
    Malformed,
    EmptyPath,
    MinuteOutOfRange,
    BadDate,
    UnknownTravellerType,
    BadDuration,
    SlotMismatch,
}

impl fmt::Display for RowErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowErrorKind::Malformed => "malformed row",
            RowErrorKind::EmptyPath => "empty path",
            RowErrorKind::MinuteOutOfRange => "minute out of range",
            RowErrorKind::BadDate => "bad date",
            RowErrorKind::UnknownTravellerType => "unknown traveller type",
            RowErrorKind::BadDuration => "bad duration",
            RowErrorKind::SlotMismatch => "slot does not contain departure",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub kind: RowErrorKind,
    pub detail: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.kind, self.detail)
    }
}

/// Accepted rows plus the rejected ones with their line numbers.
#[derive(Clone, Debug, Default)]
pub struct ParsedTrips {
    pub trips: Vec<TripRecord>,
    pub rejected: Vec<RowError>,
}

impl ParsedTrips {
    pub fn rejection_summary(&self) -> BTreeMap<RowErrorKind, usize> {
        let mut summary = BTreeMap::new();
        for r in &self.rejected {
            *summary.entry(r.kind).or_default() += 1;
        }
        summary
    }
}

fn column_index(headers: &csv::StringRecord, wanted: &[&str], source: &str) -> Result<Vec<usize>> {
    wanted
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::Input {
                    path: source.to_owned(),
                    line: 1,
                    message: format!("missing column `{name}`"),
                })
        })
        .collect()
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%Y/%m/%d"))
        .ok()
}

/// Reads trips. Header names are matched case-insensitively and may appear
/// in any order. Bad rows are collected, never fatal; a missing column or an
/// unreadable stream is.
pub fn read_trips<R: Read>(source: R, codec: &TripCodec<'_>, name: &str) -> Result<ParsedTrips> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(codec.delimiter)
        .flexible(true)
        .from_reader(source);
    let cols = column_index(reader.headers()?, &TRIP_COLUMNS, name)?;
    let mut parsed = ParsedTrips::default();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                match parse_trip_row(&record, &cols, codec) {
                    Ok(trip) => parsed.trips.push(trip),
                    Err((kind, detail)) => parsed.rejected.push(RowError { line, kind, detail }),
                }
            }
            Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. }) => {
                let line = e.position().map_or(0, |p| p.line());
                parsed.rejected.push(RowError {
                    line,
                    kind: RowErrorKind::Malformed,
                    detail: e.to_string(),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(parsed)
}

fn parse_trip_row(
    row: &csv::StringRecord,
    cols: &[usize],
    codec: &TripCodec<'_>,
) -> std::result::Result<TripRecord, (RowErrorKind, String)> {
    use RowErrorKind::*;
    let field = |i: usize| -> std::result::Result<&str, (RowErrorKind, String)> {
        row.get(cols[i])
            .map(str::trim)
            .ok_or_else(|| (Malformed, format!("missing field `{}`", TRIP_COLUMNS[i])))
    };

    let traveller_id = field(0)?;
    if traveller_id.is_empty() {
        return Err((Malformed, "empty traveller_ID".into()));
    }
    let traveller_type: TravellerType = field(1)?.parse().map_err(|e| (UnknownTravellerType, e))?;
    let date = parse_date(field(2)?).ok_or_else(|| (BadDate, field(2).unwrap_or("").to_owned()))?;

    let raw_departure = field(3)?;
    let minutes = parse_hhmm(raw_departure).map_err(|e| match e {
        Error::MinuteOutOfRange(_) => (MinuteOutOfRange, raw_departure.to_owned()),
        other => (Malformed, other.to_string()),
    })?;
    let departure = u16::try_from(minutes + 1)
        .ok()
        .and_then(|m| TimePeriod::new(m).ok())
        .ok_or_else(|| (MinuteOutOfRange, raw_departure.to_owned()))?;

    let slot = codec.partition.slot_of(departure);
    let raw_slot = field(4)?;
    if !raw_slot.is_empty() {
        let (a, b) = raw_slot
            .split_once('-')
            .ok_or_else(|| (Malformed, format!("bad time slot `{raw_slot}`")))?;
        let (a, b) = (
            parse_hhmm(a).map_err(|e| (Malformed, e.to_string()))?,
            parse_hhmm(b).map_err(|e| (Malformed, e.to_string()))?,
        );
        if !(a < minutes + 1 && minutes < b) {
            return Err((SlotMismatch, format!("{raw_departure} not in {raw_slot}")));
        }
    }

    let o_zone = field(5)?;
    let d_zone = field(6)?;
    if o_zone.is_empty() || d_zone.is_empty() {
        return Err((Malformed, "empty zone".into()));
    }

    let raw_path = field(7)?;
    if raw_path.is_empty() {
        return Err((EmptyPath, "empty path".into()));
    }
    let path: Vec<RoadId> = raw_path.split('-').map(|r| RoadId::from(r.trim())).collect();
    if path.iter().any(|r| r.as_str().is_empty()) {
        return Err((Malformed, format!("empty road in path `{raw_path}`")));
    }

    let raw_duration = field(8)?;
    let amount: u64 = raw_duration
        .parse()
        .map_err(|_| (BadDuration, raw_duration.to_owned()))?;
    let duration = match codec.duration_unit {
        DurationUnit::Minutes => amount,
        DurationUnit::Seconds => amount.div_ceil(60),
    };
    if duration == 0 || duration > u32::MAX as u64 {
        return Err((BadDuration, raw_duration.to_owned()));
    }

    Ok(TripRecord {
        traveller_id: traveller_id.to_owned(),
        traveller_type,
        date: codec.day_of(date),
        departure,
        slot: slot.id,
        o_zone: o_zone.into(),
        d_zone: d_zone.into(),
        path,
        duration: duration as u32,
    })
}

/// Writes trips with the nine standard columns.
pub fn write_trips<'t, W, I>(sink: W, trips: I, codec: &TripCodec<'_>) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'t TripRecord>,
{
    let mut w = csv::WriterBuilder::new()
        .delimiter(codec.delimiter)
        .from_writer(sink);
    w.write_record(TRIP_COLUMNS)?;
    for trip in trips {
        write_trip(&mut w, trip, codec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_trip<W: Write>(w: &mut csv::Writer<W>, trip: &TripRecord, codec: &TripCodec<'_>) -> Result<()> {
    let slot = codec.partition.slot_of(trip.departure);
    let path = trip
        .path
        .iter()
        .map(RoadId::as_str)
        .collect::<Vec<_>>()
        .join("-");
    let duration = match codec.duration_unit {
        DurationUnit::Minutes => trip.duration as u64,
        DurationUnit::Seconds => trip.duration as u64 * 60,
    };
    w.write_record([
        trip.traveller_id.as_str(),
        trip.traveller_type.as_str(),
        &codec.date_of(trip.date).format("%Y-%m-%d").to_string(),
        &trip.departure.to_hhmm(),
        &slot.label(),
        trip.o_zone.as_str(),
        trip.d_zone.as_str(),
        &path,
        &duration.to_string(),
    ])?;
    Ok(())
}

/// Reads the zone/road relation; roads are `;`-separated inside the field.
pub fn read_zones<R: Read>(source: R, name: &str) -> Result<Vec<Zone>> {
    let mut reader = csv::Reader::from_reader(source);
    let cols = column_index(reader.headers()?, &ZONE_COLUMNS, name)?;
    let mut zones = Vec::new();
    let mut ids = BTreeSet::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Input {
            path: name.to_owned(),
            line,
            message,
        };
        let get = |i: usize| row.get(cols[i]).map(str::trim).unwrap_or("");
        let id = ZoneId::from(get(0));
        if id.as_str().is_empty() {
            return Err(bad("empty Zone_ID".into()));
        }
        if !ids.insert(id.clone()) {
            return Err(bad(format!("duplicate zone `{id}`")));
        }
        let longitude = get(1)
            .parse()
            .map_err(|_| bad(format!("bad longitude `{}`", get(1))))?;
        let latitude = get(2)
            .parse()
            .map_err(|_| bad(format!("bad latitude `{}`", get(2))))?;
        let roads = get(3)
            .split(';')
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(RoadId::from)
            .collect();
        zones.push(Zone {
            id,
            longitude,
            latitude,
            roads,
        });
    }
    Ok(zones)
}

pub fn write_zones<W: Write>(sink: W, zones: &[Zone]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(ZONE_COLUMNS)?;
    for z in zones {
        let roads = z.roads.iter().map(RoadId::as_str).collect::<Vec<_>>().join(";");
        w.write_record([
            z.id.as_str(),
            &z.longitude.to_string(),
            &z.latitude.to_string(),
            &roads,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a `road_id,neighbor_id` edge list. Blank lines, `#` comments and a
/// leading header row are skipped; a line with a single field declares an
/// isolated road.
pub fn read_network<R: Read>(source: R, name: &str) -> Result<RoadNetwork> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(source);
    let mut net = RoadNetwork::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let from = row.get(0).map(str::trim).unwrap_or("");
        let to = row.get(1).map(str::trim).unwrap_or("");
        if i == 0 && from.eq_ignore_ascii_case("road_id") {
            continue;
        }
        match (from.is_empty(), to.is_empty()) {
            (true, true) => continue,
            (false, true) => net.add_road(from.into()),
            (false, false) => net.add_edge(from.into(), to.into()),
            (true, false) => {
                return Err(Error::Input {
                    path: name.to_owned(),
                    line,
                    message: "edge without a source road".into(),
                })
            }
        }
    }
    Ok(net)
}

pub fn write_network<W: Write>(sink: W, net: &RoadNetwork) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(sink);
    w.write_record(["road_id", "neighbor_id"])?;
    let mut with_edges = BTreeSet::new();
    for (from, to) in net.edges() {
        w.write_record([from.as_str(), to.as_str()])?;
        with_edges.insert(from);
    }
    for road in net.roads() {
        if !with_edges.contains(road) && net.neighbors(road.as_str()).next().is_none() {
            w.write_record([road.as_str()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str =
        "traveller_ID,traveller_type,Date,Departure_time,Time_slot,O_zone,D_zone,Path,Duration\n";

    fn epoch() -> NaiveDate {
        NaiveDate::from_ymd_opt(2019, 8, 12).unwrap()
    }

    fn parse(body: &str) -> ParsedTrips {
        let part = TimeSlotPartition::hourly();
        let codec = TripCodec::new(&part, epoch());
        read_trips(format!("{HEADER}{body}").as_bytes(), &codec, "trips.csv").unwrap()
    }

    #[test]
    fn parses_a_documented_row() {
        let p = parse("V1,commuter,2019-08-12,07:31,07:00-08:00,Z3,Z9,r1-r4-r7,14\n");
        assert!(p.rejected.is_empty(), "{:?}", p.rejected);
        let t = &p.trips[0];
        assert_eq!(t.departure.get(), 452);
        assert_eq!(t.slot, 7);
        assert_eq!(t.date, 0);
        assert_eq!(
            t.path,
            vec![RoadId::from("r1"), RoadId::from("r4"), RoadId::from("r7")]
        );
        assert_eq!(t.duration, 14);
    }

    #[test]
    fn header_is_case_insensitive_and_reorderable() {
        let part = TimeSlotPartition::hourly();
        let codec = TripCodec::new(&part, epoch());
        let csv = "DURATION,path,d_zone,o_zone,time_slot,departure_time,date,TRAVELLER_TYPE,Traveller_id\n\
                   5,a-b,Z2,Z1,,00:00,2019-08-13,random,V7\n";
        let p = read_trips(csv.as_bytes(), &codec, "x").unwrap();
        assert_eq!(p.trips[0].date, 1);
        assert_eq!(p.trips[0].departure.get(), 1);
    }

    #[test]
    fn bad_rows_are_rejected_with_line_numbers() {
        let p = parse(
            "V1,commuter,2019-08-12,07:31,07:00-08:00,Z3,Z9,,14\n\
             V1,commuter,2019-08-12,24:00,07:00-08:00,Z3,Z9,r1,14\n\
             V1,tourist,2019-08-12,07:31,07:00-08:00,Z3,Z9,r1,14\n\
             V1,commuter,2019-08-12,07:31,08:00-09:00,Z3,Z9,r1,14\n\
             V1,commuter,2019-08-12,07:31,07:00-08:00,Z3,Z9,r1,0\n\
             V1,commuter,2019-08-12,07:31,07:00-08:00,Z3,Z9,r1,14\n",
        );
        assert_eq!(p.trips.len(), 1);
        let kinds: Vec<_> = p.rejected.iter().map(|r| (r.line, r.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                (2, RowErrorKind::EmptyPath),
                (3, RowErrorKind::MinuteOutOfRange),
                (4, RowErrorKind::UnknownTravellerType),
                (5, RowErrorKind::SlotMismatch),
                (6, RowErrorKind::BadDuration),
            ]
        );
        assert_eq!(p.rejected[0].kind.to_string(), "empty path");
        assert_eq!(p.rejected[1].kind.to_string(), "minute out of range");
        assert_eq!(p.rejection_summary()[&RowErrorKind::EmptyPath], 1);
    }

    #[test]
    fn missing_column_is_fatal() {
        let part = TimeSlotPartition::hourly();
        let codec = TripCodec::new(&part, epoch());
        let err = read_trips("traveller_ID,Date\nV1,2019-08-12\n".as_bytes(), &codec, "t.csv");
        assert!(matches!(err, Err(Error::Input { line: 1, .. })));
    }

    #[test]
    fn seconds_are_rounded_up_to_minutes() {
        let part = TimeSlotPartition::hourly();
        let mut codec = TripCodec::new(&part, epoch());
        codec.duration_unit = DurationUnit::Seconds;
        let csv = format!("{HEADER}V1,commuter,2019-08-12,07:31,,Z3,Z9,r1,61\n");
        let p = read_trips(csv.as_bytes(), &codec, "x").unwrap();
        assert_eq!(p.trips[0].duration, 2);
    }

    #[test]
    fn zones_and_network_round_trip() {
        let zones_csv = "Zone_ID,Longitude,Latitude,Roads\nZ1,118.75,30.94,r1;r2\nZ2,118.76,30.95,r2\n";
        let zones = read_zones(zones_csv.as_bytes(), "zones.csv").unwrap();
        assert_eq!(zones[0].roads.len(), 2);
        let mut out = Vec::new();
        write_zones(&mut out, &zones).unwrap();
        assert_eq!(read_zones(out.as_slice(), "z").unwrap(), zones);

        let net_txt = "road_id,neighbor_id\n# grid\nr1,r2\nr2,r1\nr3\n";
        let net = read_network(net_txt.as_bytes(), "net").unwrap();
        assert!(net.is_adjacent("r1", "r2"));
        assert!(net.contains("r3"));
        let mut out = Vec::new();
        write_network(&mut out, &net).unwrap();
        assert_eq!(read_network(out.as_slice(), "n").unwrap(), net);
    }

    #[test]
    fn duplicate_zone_is_rejected() {
        let zones_csv = "Zone_ID,Longitude,Latitude,Roads\nZ1,0,0,r1\nZ1,0,0,r2\n";
        assert!(matches!(
            read_zones(zones_csv.as_bytes(), "zones.csv"),
            Err(Error::Input { line: 3, .. })
        ));
    }

    fn arb_trip() -> impl Strategy<Value = TripRecord> {
        (
            "[A-Za-z0-9_]{1,8}",
            0usize..5,
            -30i32..400,
            1u16..=1440,
            "[A-Z][0-9]{1,3}",
            "[A-Z][0-9]{1,3}",
            proptest::collection::vec("[a-z][0-9]{1,4}", 1..6),
            1u32..500,
        )
            .prop_map(|(id, ty, date, minute, o, d, path, duration)| {
                let departure = TimePeriod::new(minute).unwrap();
                TripRecord {
                    traveller_id: id,
                    traveller_type: TravellerType::ALL[ty],
                    date,
                    departure,
                    slot: TimeSlotPartition::hourly().slot_of(departure).id,
                    o_zone: o.into(),
                    d_zone: d.into(),
                    path: path.into_iter().map(RoadId::from).collect(),
                    duration,
                }
            })
    }

    proptest! {
        #[test]
        fn trips_round_trip(trips in proptest::collection::vec(arb_trip(), 0..20), seconds in any::<bool>()) {
            let part = TimeSlotPartition::hourly();
            let mut codec = TripCodec::new(&part, epoch());
            if seconds {
                codec.duration_unit = DurationUnit::Seconds;
            }
            let mut buf = Vec::new();
            write_trips(&mut buf, &trips, &codec).unwrap();
            let parsed = read_trips(buf.as_slice(), &codec, "rt").unwrap();
            prop_assert!(parsed.rejected.is_empty());
            prop_assert_eq!(parsed.trips, trips);
        }
    }
}
