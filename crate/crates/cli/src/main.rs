mod config;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use tripsynth::corpus::CorpusSpec;
use tripsynth::ingest::{read_network, read_trips, read_zones, write_network, write_trips, write_zones, ParsedTrips, Store, TripCodec};
use tripsynth::model::TripRecord;
use tripsynth::validator::build_report;
use tripsynth::Generator;

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "tripsynth", version, about = "Synthetic individual trips from historical trip records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the profile store from the historical trips.
    Ingest {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate synthetic trips from the store.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Traveller types generated concurrently.
        #[arg(long, default_value_t = 5)]
        threads: usize,
    },
    /// Compare generated trips with the historical ones.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to the configured trips file.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Defaults to `generated.csv` in the output directory.
        #[arg(long)]
        generated: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a planted test corpus and a config that points at it.
    Corpus {
        #[arg(long, value_enum, default_value_t = Preset::Desk)]
        preset: Preset,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Desk,
    Degenerate,
}

/// Marks errors that come from the configuration rather than the data.
#[derive(Debug)]
struct ConfigError;

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("configuration error")
    }
}

fn config_error(e: impl Into<anyhow::Error>) -> anyhow::Error {
    e.into().context(ConfigError)
}

fn load_config(path: &Path, out: Option<PathBuf>) -> anyhow::Result<Config> {
    let mut config = Config::load(path).map_err(config_error)?;
    if let Some(out) = out {
        config.paths.out_dir = out;
    }
    Ok(config)
}

fn open(path: &Path, what: &str) -> anyhow::Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {what} file {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn read_trip_file(path: &Path, codec: &TripCodec<'_>) -> anyhow::Result<ParsedTrips> {
    let name = path.display().to_string();
    let parsed = read_trips(open(path, "trips")?, codec, &name)?;
    if !parsed.rejected.is_empty() {
        eprintln!("{name}: {} rows rejected", parsed.rejected.len());
        for (kind, n) in parsed.rejection_summary() {
            eprintln!("  {kind}: {n}");
        }
        for e in parsed.rejected.iter().take(5) {
            eprintln!("  line {}: {}", e.line, e.detail);
        }
    }
    Ok(parsed)
}

fn ingest(config: &Config) -> anyhow::Result<()> {
    let partition = config.partition()?;
    let codec = config.codec(&partition)?;
    let zones_name = config.paths.zones.display().to_string();
    let zones = read_zones(open(&config.paths.zones, "zones")?, &zones_name)?;
    let net_name = config.paths.network.display().to_string();
    let network = read_network(open(&config.paths.network, "network")?, &net_name)?;
    let parsed = read_trip_file(&config.paths.trips, &codec)?;

    let store = Store::build(
        &parsed.trips,
        &partition,
        config.data.window_days,
        config.data.epoch.clone(),
        zones,
        network,
    );
    let path = config.store_path();
    let mut sink = create(&path)?;
    store.write(&mut sink)?;
    sink.flush()?;
    println!(
        "{} individuals, {} trips, {} paths -> {}",
        store.profiles.len(),
        store.n_trips(),
        store.catalog.n_paths(),
        path.display()
    );
    Ok(())
}

fn generate(config: &Config, seed: Option<u64>, threads: usize) -> anyhow::Result<()> {
    let path = config.store_path();
    if !path.exists() {
        anyhow::bail!("store {} not found; run `tripsynth ingest` first", path.display());
    }
    let store = Store::read(open(&path, "store")?)?;
    let partition = store.partition()?;
    if partition.starts() != config.partition()?.starts() {
        return Err(config_error(anyhow::anyhow!(
            "the store was built with a different time-slot partition; re-run ingest"
        )));
    }
    if store.epoch != config.data.epoch {
        return Err(config_error(anyhow::anyhow!(
            "the store was built with epoch {}, the config says {}",
            store.epoch,
            config.data.epoch
        )));
    }
    let params = config.gen_params(seed);
    params.validate(store.max_trip_frequency()).map_err(config_error)?;

    let generator = Generator {
        partition: &partition,
        catalog: &store.catalog,
        durations: &store.durations,
        reference: &store.reference,
        params,
    };
    let out = generator.generate_all(&store.profiles, threads);
    for (id, e) in &out.quarantined {
        eprintln!("warning: individual {id} skipped: {e}");
    }
    let trips: Vec<TripRecord> = out.trips.into_iter().map(|t| t.record).collect();
    let codec = config.codec(&partition)?;
    let path = config.paths.out_dir.join("generated.csv");
    let mut sink = create(&path)?;
    write_trips(&mut sink, &trips, &codec)?;
    sink.flush()?;
    println!(
        "{} trips for {} individuals -> {}",
        trips.len(),
        store.profiles.len() - out.quarantined.len(),
        path.display()
    );
    Ok(())
}

fn validate(config: &Config, reference: Option<PathBuf>, generated: Option<PathBuf>) -> anyhow::Result<()> {
    let partition = config.partition()?;
    let codec = config.codec(&partition)?;
    let calendar = config.calendar()?;
    let reference = reference.unwrap_or_else(|| config.paths.trips.clone());
    let generated = generated.unwrap_or_else(|| config.paths.out_dir.join("generated.csv"));
    let r = read_trip_file(&reference, &codec)?;
    let g = read_trip_file(&generated, &codec)?;

    let report = build_report::<f64>(&r.trips, &g.trips, &calendar, &config.report);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let path = config.paths.out_dir.join("report.csv");
    let mut sink = create(&path)?;
    sink.write_all(report.to_text().as_bytes())?;
    sink.flush()?;
    let failed = report.cells.iter().filter(|c| c.value.is_err()).count();
    println!(
        "{} reference trips, {} generated trips, {} metrics ({failed} not computable) -> {}",
        r.trips.len(),
        g.trips.len(),
        report.cells.len(),
        path.display()
    );
    Ok(())
}

const CORPUS_CONFIG: &str = r#"[paths]
trips = "trips.csv"
zones = "zones.csv"
network = "network.csv"
out_dir = "out"

[data]
epoch = "{epoch}"
window_days = {days}

[partition]
width = {width}

[generate]
shape = 0.3333333333333333
seed = 7
"#;

fn corpus(preset: Preset, seed: Option<u64>, out: &Path) -> anyhow::Result<()> {
    let mut spec = match preset {
        Preset::Desk => CorpusSpec::desk(),
        Preset::Degenerate => CorpusSpec::degenerate(),
    };
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let corpus = spec.generate()?;
    let codec = TripCodec::new(&corpus.partition, spec.epoch);

    let mut sink = create(&out.join("trips.csv"))?;
    write_trips(&mut sink, &corpus.trips, &codec)?;
    sink.flush()?;
    let mut sink = create(&out.join("zones.csv"))?;
    write_zones(&mut sink, &corpus.zones)?;
    sink.flush()?;
    let mut sink = create(&out.join("network.csv"))?;
    write_network(&mut sink, &corpus.network)?;
    sink.flush()?;
    let text = CORPUS_CONFIG
        .replace("{epoch}", &spec.epoch.format("%Y-%m-%d").to_string())
        .replace("{days}", &spec.days.to_string())
        .replace("{width}", &spec.slot_width.to_string());
    fs::write(out.join("config.toml"), text).context("cannot write config.toml")?;
    println!(
        "{} trips, {} zones, {} roads -> {}",
        corpus.trips.len(),
        corpus.zones.len(),
        corpus.network.roads().len(),
        out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest { config, out } => ingest(&load_config(&config, out)?),
        Command::Generate {
            config,
            seed,
            out,
            threads,
        } => generate(&load_config(&config, out)?, seed, threads),
        Command::Validate {
            config,
            reference,
            generated,
            out,
        } => validate(&load_config(&config, out)?, reference, generated),
        Command::Corpus { preset, seed, out } => corpus(preset, seed, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
