//! The declarative run configuration.
//!
//! ```toml
//! [paths]
//! trips = "trips.csv"
//! zones = "zones.csv"
//! network = "network.csv"
//! out_dir = "out"
//!
//! [data]
//! epoch = "2019-08-12"
//! window_days = 7
//!
//! [partition]
//! width = 60
//!
//! [generate]
//! seed = 7
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use tripsynth::ingest::{DurationUnit, TripCodec};
use tripsynth::model::TimeSlotPartition;
use tripsynth::validator::{DayCalendar, DayClass, ReportOptions};
use tripsynth::GenParams;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub paths: Paths,
    #[serde(default)]
    pub data: Data,
    #[serde(default)]
    pub partition: Partition,
    #[serde(default)]
    pub generate: Generate,
    #[serde(default)]
    pub calendar: Calendar,
    #[serde(default)]
    pub report: ReportOptions,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub trips: PathBuf,
    pub zones: PathBuf,
    pub network: PathBuf,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Data {
    /// Date of day 0.
    pub epoch: String,
    /// Days covered by the historical trips.
    pub window_days: u32,
    pub duration_unit: DurationUnit,
    pub delimiter: char,
}

impl Default for Data {
    fn default() -> Self {
        Data {
            epoch: "2019-08-12".into(),
            window_days: 7,
            duration_unit: DurationUnit::Minutes,
            delimiter: ',',
        }
    }
}

/// Either equal-width slots or explicit `HH:MM` slot starts.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partition {
    pub width: Option<u16>,
    pub boundaries: Option<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Generate {
    pub kappa: f64,
    pub epsilon: f64,
    pub blowup: f64,
    pub shape: f64,
    pub min_gap: u32,
    pub start_day: i32,
    /// Defaults to the window length.
    pub days: Option<u32>,
    pub seed: u64,
}

impl Default for Generate {
    fn default() -> Self {
        let p = GenParams::default();
        Generate {
            kappa: p.kappa,
            epsilon: p.epsilon,
            blowup: p.blowup,
            shape: p.shape,
            min_gap: p.min_gap,
            start_day: p.start_day,
            days: None,
            seed: p.seed,
        }
    }
}

/// Day-class overrides on top of the weekend rule.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calendar {
    pub holidays: Vec<String>,
    pub workdays: Vec<String>,
}

fn parse_date(s: &str) -> anyhow::Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").with_context(|| format!("bad date `{s}`, expected YYYY-MM-DD"))
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config: Config =
            toml::from_str(&text).with_context(|| format!("bad config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.paths.trips,
            &mut config.paths.zones,
            &mut config.paths.network,
            &mut config.paths.out_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        config.check()?;
        Ok(config)
    }

    /// Checks everything that can be checked without reading the data.
    pub fn check(&self) -> anyhow::Result<()> {
        self.epoch()?;
        self.partition()?;
        self.calendar()?;
        if !self.data.delimiter.is_ascii() {
            bail!("delimiter must be a single ASCII character");
        }
        if self.data.window_days == 0 {
            bail!("window_days must be at least 1");
        }
        Ok(())
    }

    pub fn epoch(&self) -> anyhow::Result<NaiveDate> {
        parse_date(&self.data.epoch)
    }

    pub fn partition(&self) -> anyhow::Result<TimeSlotPartition> {
        let p = &self.partition;
        let partition = match (&p.width, &p.boundaries) {
            (Some(_), Some(_)) => bail!("partition: give either width or boundaries, not both"),
            (Some(w), None) => TimeSlotPartition::uniform(*w)?,
            (None, Some(b)) => TimeSlotPartition::from_hhmm_starts(b)?,
            (None, None) => TimeSlotPartition::hourly(),
        };
        Ok(partition)
    }

    pub fn calendar(&self) -> anyhow::Result<DayCalendar> {
        let mut calendar = DayCalendar::new(self.epoch()?);
        for d in &self.calendar.holidays {
            calendar.set(parse_date(d)?, DayClass::Holiday);
        }
        for d in &self.calendar.workdays {
            calendar.set(parse_date(d)?, DayClass::Weekday);
        }
        Ok(calendar)
    }

    pub fn codec<'a>(&self, partition: &'a TimeSlotPartition) -> anyhow::Result<TripCodec<'a>> {
        let mut codec = TripCodec::new(partition, self.epoch()?);
        codec.duration_unit = self.data.duration_unit;
        codec.delimiter = self.data.delimiter as u8;
        Ok(codec)
    }

    pub fn gen_params(&self, seed: Option<u64>) -> GenParams {
        let g = &self.generate;
        GenParams {
            kappa: g.kappa,
            epsilon: g.epsilon,
            blowup: g.blowup,
            shape: g.shape,
            min_gap: g.min_gap,
            start_day: g.start_day,
            days: g.days.unwrap_or(self.data.window_days),
            seed: seed.unwrap_or(g.seed),
        }
    }

    pub fn store_path(&self) -> PathBuf {
        self.paths.out_dir.join("store.json")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [paths]
        trips = "t.csv"
        zones = "z.csv"
        network = "n.csv"
    "#;

    #[test]
    fn defaults_fill_in() {
        let c: Config = toml::from_str(MINIMAL).unwrap();
        c.check().unwrap();
        assert_eq!(c.partition().unwrap().len(), 24);
        assert_eq!(c.gen_params(None).days, 7);
        assert_eq!(c.gen_params(Some(3)).seed, 3);
        assert_eq!(c.report, ReportOptions::default());
    }

    #[test]
    fn boundaries_and_width_conflict() {
        let text = format!("{MINIMAL}\n[partition]\nwidth = 60\nboundaries = [\"00:00\"]\n");
        let c: Config = toml::from_str(&text).unwrap();
        assert!(c.check().is_err());
    }

    #[test]
    fn explicit_boundaries() {
        let text = format!("{MINIMAL}\n[partition]\nboundaries = [\"00:00\", \"07:00\", \"19:00\"]\n");
        let c: Config = toml::from_str(&text).unwrap();
        assert_eq!(c.partition().unwrap().len(), 3);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[generate]\nkapa = 1.0\n");
        assert!(toml::from_str::<Config>(&text).is_err());
    }

    #[test]
    fn holiday_override() {
        let text = format!("{MINIMAL}\n[calendar]\nholidays = [\"2019-08-15\"]\n");
        let c: Config = toml::from_str(&text).unwrap();
        let cal = c.calendar().unwrap();
        assert_eq!(cal.classify(3), DayClass::Holiday);
        assert_eq!(cal.classify(2), DayClass::Weekday);
    }
}
