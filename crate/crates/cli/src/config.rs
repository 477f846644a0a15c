//! Run configuration: a flat `key=value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use d2d_core::aggregation::{GroupingInstant, GroupingOptions};
use d2d_core::dwell::DwellOverrides;
use d2d_core::pipeline::DatasetPaths;
use d2d_core::DwellProfile;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Geojson,
    Csv,
    Both,
}

impl Format {
    pub fn geojson(self) -> bool {
        matches!(self, Format::Geojson | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grouping {
    Arrival,
    Departure,
}

/// Flags shared by every subcommand. Any flag left out falls back to the
/// config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Config file of `key=value` lines
    #[arg(long, env = "D2D_CONFIG", global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ride_stats: Option<PathBuf>,
    #[arg(long, global = true)]
    pub segments: Option<PathBuf>,
    #[arg(long, global = true)]
    pub weekly_schedule: Option<PathBuf>,
    #[arg(long, global = true)]
    pub stations: Option<PathBuf>,
    #[arg(long, global = true)]
    pub zones: Option<PathBuf>,
    #[arg(long, global = true)]
    pub from_date: Option<NaiveDate>,
    #[arg(long, global = true)]
    pub to_date: Option<NaiveDate>,
    /// Use scheduled times where actual times are missing
    #[arg(long, global = true)]
    pub on_time_mode: bool,
    /// Airport processing time at departure, minutes
    #[arg(long, global = true)]
    pub dep_proc_min: Option<u32>,
    /// Airport dwell at arrival, minutes
    #[arg(long, global = true)]
    pub arr_proc_min: Option<u32>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Origin zone of every trip, repeatable; defaults to the departure station's zone
    #[arg(long = "origin-zone", global = true)]
    pub origin_zones: Vec<String>,
    /// Instant deciding a trip's day and period
    #[arg(long, value_enum, global = true)]
    pub grouping: Option<Grouping>,
    /// Worker threads for the evaluation
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub dataset_id: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ride_stats: Option<PathBuf>,
    pub segments: Option<PathBuf>,
    pub weekly_schedule: Option<PathBuf>,
    pub stations: Option<PathBuf>,
    pub zones: Option<PathBuf>,
    pub from_date: Option<NaiveDate>,
    pub to_date: Option<NaiveDate>,
    pub on_time_mode: bool,
    pub dep_proc_min: Option<u32>,
    pub arr_proc_min: Option<u32>,
    pub out_dir: PathBuf,
    pub format: Format,
    pub origin_zones: Vec<String>,
    pub grouping: Grouping,
    pub threads: Option<usize>,
    pub dataset_id: Option<String>,
}

const KEYS: [&str; 16] = [
    "ride_stats",
    "segments",
    "weekly_schedule",
    "stations",
    "zones",
    "from_date",
    "to_date",
    "on_time_mode",
    "dep_proc_min",
    "arr_proc_min",
    "out_dir",
    "format",
    "origin_zone",
    "grouping",
    "threads",
    "dataset_id",
];

/// Parse `key=value` lines; `#` starts a comment, keys may use `-` or `_`.
pub fn parse_config_file(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "{}:{}: unknown key {key}",
                path.display(),
                i + 1
            )));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn parsed<T: std::str::FromStr>(
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| CliError::Config(format!("config {key}={v}: {e}")))
        })
        .transpose()
}

fn enum_value<T: ValueEnum>(
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| {
            T::from_str(v, true).map_err(|e| CliError::Config(format!("config {key}={v}: {e}")))
        })
        .transpose()
}

fn parse_bool(v: &str) -> Result<bool, CliError> {
    match v {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        _ => Err(CliError::Config(format!(
            "config on_time_mode={v}: expected true or false"
        ))),
    }
}

impl RunConfig {
    /// Merge flags over the config file; flags win.
    pub fn resolve(args: &RunArgs) -> Result<RunConfig, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                parse_config_file(&text, path)?
            }
            None => BTreeMap::new(),
        };
        // relative paths in the config file are taken from its directory
        let base = args
            .config
            .as_ref()
            .and_then(|p| p.parent())
            .map(Path::to_path_buf);
        let path_of = |flag: &Option<PathBuf>, key: &str| -> Option<PathBuf> {
            flag.clone().or_else(|| {
                file.get(key).map(|v| match &base {
                    Some(b) if Path::new(v).is_relative() => b.join(v),
                    _ => PathBuf::from(v),
                })
            })
        };
        let origin_zones = if args.origin_zones.is_empty() {
            file.get("origin_zone")
                .map(|v| {
                    v.split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect()
                })
                .unwrap_or_default()
        } else {
            args.origin_zones.clone()
        };
        let on_time_mode = args.on_time_mode
            || file
                .get("on_time_mode")
                .map(|v| parse_bool(v))
                .transpose()?
                .unwrap_or(false);
        Ok(RunConfig {
            ride_stats: path_of(&args.ride_stats, "ride_stats"),
            segments: path_of(&args.segments, "segments"),
            weekly_schedule: path_of(&args.weekly_schedule, "weekly_schedule"),
            stations: path_of(&args.stations, "stations"),
            zones: path_of(&args.zones, "zones"),
            from_date: args.from_date.or(parsed(&file, "from_date")?),
            to_date: args.to_date.or(parsed(&file, "to_date")?),
            on_time_mode,
            dep_proc_min: args.dep_proc_min.or(parsed(&file, "dep_proc_min")?),
            arr_proc_min: args.arr_proc_min.or(parsed(&file, "arr_proc_min")?),
            out_dir: path_of(&args.out_dir, "out_dir").unwrap_or_else(|| PathBuf::from("out")),
            format: args
                .format
                .or(enum_value(&file, "format")?)
                .unwrap_or(Format::Both),
            origin_zones,
            grouping: args
                .grouping
                .or(enum_value(&file, "grouping")?)
                .unwrap_or(Grouping::Arrival),
            threads: args.threads.or(parsed(&file, "threads")?),
            dataset_id: args
                .dataset_id
                .clone()
                .or_else(|| file.get("dataset_id").cloned()),
        })
    }

    pub fn dataset_paths(&self) -> Result<DatasetPaths, CliError> {
        let need = |p: &Option<PathBuf>, flag: &str| {
            p.clone()
                .ok_or_else(|| CliError::Config(format!("--{flag} is required")))
        };
        if self.segments.is_none() && self.weekly_schedule.is_none() {
            return Err(CliError::Config(
                "--segments or --weekly-schedule is required".into(),
            ));
        }
        Ok(DatasetPaths {
            ride_stats: need(&self.ride_stats, "ride-stats")?,
            stations: need(&self.stations, "stations")?,
            zones: need(&self.zones, "zones")?,
            segments: self.segments.clone(),
            weekly_schedule: self.weekly_schedule.clone(),
        })
    }

    pub fn date_range(&self) -> Result<d2d_core::DateRange, CliError> {
        match (self.from_date, self.to_date) {
            (Some(a), Some(b)) => d2d_core::DateRange::new(a, b).map_err(CliError::Ingest),
            (Some(a), None) => Ok(d2d_core::DateRange::single(a)),
            _ => Err(CliError::Config("--from-date is required".into())),
        }
    }

    /// Airport dwell replacement from `--dep-proc-min` / `--arr-proc-min`.
    pub fn air_override(&self) -> Result<Option<DwellProfile>, CliError> {
        match (self.dep_proc_min, self.arr_proc_min) {
            (None, None) => Ok(None),
            (Some(d), Some(a)) => Ok(Some(DwellProfile::from_minutes(d, a))),
            _ => Err(CliError::Config(
                "--dep-proc-min and --arr-proc-min must be given together".into(),
            )),
        }
    }

    pub fn overrides(&self) -> Result<DwellOverrides, CliError> {
        Ok(DwellOverrides {
            air: self.air_override()?,
            rail: None,
        })
    }

    pub fn grouping_options(&self) -> GroupingOptions {
        GroupingOptions {
            instant: match self.grouping {
                Grouping::Arrival => GroupingInstant::Arrival,
                Grouping::Departure => GroupingInstant::Departure,
            },
            whole_day: false,
        }
    }
}
