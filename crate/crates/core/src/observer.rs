//! Improvement-trajectory logging and the matching parser.
//!
//! An experiment folder holds one `suite.info` file of `key = value` lines and
//! one `f<i>_d<n>.dat` file per function and dimension. Each observed problem
//! contributes a block
//!
//! ```text
//! # run i=<i> n=<n> j=<j>
//! <evaluations>\t<best offset, %.9e>
//! ...
//! # end budget=<evaluations used>
//! ```
//!
//! An event line is written whenever the logged best offset strictly
//! improves. Offsets are `f(x) - f_opt`.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::cfmt::format_e;
use crate::error::{Error, Result};
use crate::suite::{registered_suites, Objective, Problem, ProblemDescriptor, SuiteSpec};

pub const FORMAT_VERSION: &str = "1";
pub const INFO_FILE: &str = "suite.info";
const OFFSET_PRECISION: usize = 9;
const MAX_FOLDER_SUFFIX: u32 = 999;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub evaluations: u64,
    pub best_offset: f64,
}

/// Improvement trajectory of one observed problem.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub descriptor: ProblemDescriptor,
    pub events: Vec<Event>,
    pub budget_used: u64,
}

impl RunLog {
    /// Checks the ordering invariants; returns a reason on failure.
    pub fn check(&self) -> std::result::Result<(), String> {
        for pair in self.events.windows(2) {
            if pair[1].evaluations <= pair[0].evaluations {
                return Err(format!(
                    "evaluation counts not increasing ({} then {})",
                    pair[0].evaluations, pair[1].evaluations
                ));
            }
            if pair[1].best_offset.partial_cmp(&pair[0].best_offset)
                != Some(std::cmp::Ordering::Less)
            {
                return Err(format!(
                    "offsets not decreasing ({} then {})",
                    pair[0].best_offset, pair[1].best_offset
                ));
            }
        }
        if let Some(first) = self.events.first() {
            if first.evaluations == 0 {
                return Err("event at evaluation 0".into());
            }
        }
        if let Some(last) = self.events.last() {
            if last.evaluations > self.budget_used {
                return Err(format!(
                    "event at evaluation {} beyond budget {}",
                    last.evaluations, self.budget_used
                ));
            }
        }
        Ok(())
    }

    /// The text block this run occupies in its `.dat` file.
    pub fn to_block(&self) -> String {
        let d = &self.descriptor;
        let mut out = format!(
            "# run i={} n={} j={}\n",
            d.function_id, d.dimension, d.instance_id
        );
        for e in &self.events {
            out.push_str(&format!(
                "{}\t{}\n",
                e.evaluations,
                format_e(e.best_offset, OFFSET_PRECISION)
            ));
        }
        out.push_str(&format!("# end budget={}\n", self.budget_used));
        out
    }
}

/// Rounds an offset to the value that survives a write/parse cycle.
pub fn logged_value(offset: f64) -> f64 {
    format_e(offset, OFFSET_PRECISION)
        .parse()
        .expect("formatted float parses")
}

pub fn data_file_name(function_id: u32, dimension: usize) -> String {
    format!("f{function_id}_d{dimension}.dat")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObserverConfig {
    pub result_folder: PathBuf,
    pub algorithm_name: String,
    pub algorithm_info: String,
}

impl ObserverConfig {
    pub fn new(result_folder: impl Into<PathBuf>, algorithm_name: impl Into<String>) -> Self {
        Self {
            result_folder: result_folder.into(),
            algorithm_name: algorithm_name.into(),
            algorithm_info: String::new(),
        }
    }
}

#[derive(Debug)]
struct Shared {
    folder: PathBuf,
    live: Mutex<HashSet<ProblemDescriptor>>,
    // Serializes appends to .dat files and to suite.info.
    write_lock: Mutex<()>,
}

impl Shared {
    fn append(&self, file: &Path, text: &str) -> Result<()> {
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut handle = OpenOptions::new()
            .create(true)
            .append(true)
            .open(file)
            .map_err(|e| Error::io(file, e))?;
        handle
            .write_all(text.as_bytes())
            .map_err(|e| Error::io(file, e))
    }
}

/// Writes an experiment folder. Cheap to clone; clones share the folder.
#[derive(Debug, Clone)]
pub struct Observer {
    shared: Arc<Shared>,
}

fn single_line(value: &str) -> String {
    value.replace(['\n', '\r'], " ")
}

fn join_ids<T: ToString>(ids: &[T]) -> String {
    ids.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// Creates `base`, or `base-001`, `base-002`, ... if it already exists.
fn create_unique_folder(base: &Path) -> Result<PathBuf> {
    if let Some(parent) = base.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    for suffix in 0..=MAX_FOLDER_SUFFIX {
        let candidate = if suffix == 0 {
            base.to_path_buf()
        } else {
            let mut name = base.as_os_str().to_owned();
            name.push(format!("-{suffix:03}"));
            PathBuf::from(name)
        };
        match fs::create_dir(&candidate) {
            Ok(()) => return Ok(candidate),
            Err(e) if e.kind() == ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::io(candidate, e)),
        }
    }
    Err(Error::io(
        base,
        std::io::Error::new(ErrorKind::AlreadyExists, "no free result folder name"),
    ))
}

impl Observer {
    /// Creates the result folder and writes `suite.info`.
    pub fn new(config: &ObserverConfig, suite: &SuiteSpec) -> Result<Self> {
        let folder = create_unique_folder(&config.result_folder)?;
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let info = format!(
            "format_version = {FORMAT_VERSION}\n\
             suite = {}\n\
             algorithm_name = {}\n\
             algorithm_info = {}\n\
             timestamp = {timestamp}\n\
             function_ids = {}\n\
             dimensions = {}\n\
             instance_ids = {}\n",
            suite.name(),
            single_line(&config.algorithm_name),
            single_line(&config.algorithm_info),
            join_ids(suite.function_ids()),
            join_ids(suite.dimensions()),
            join_ids(suite.instance_ids()),
        );
        let path = folder.join(INFO_FILE);
        fs::write(&path, info).map_err(|e| Error::io(&path, e))?;
        Ok(Self {
            shared: Arc::new(Shared {
                folder,
                live: Mutex::new(HashSet::new()),
                write_lock: Mutex::new(()),
            }),
        })
    }

    /// The folder actually used (may carry a collision suffix).
    pub fn folder(&self) -> &Path {
        &self.shared.folder
    }

    /// Appends a `key = value` line to `suite.info`.
    pub fn append_metadata(&self, key: &str, value: &str) -> Result<()> {
        let path = self.shared.folder.join(INFO_FILE);
        self.shared.append(
            &path,
            &format!("{} = {}\n", single_line(key), single_line(value)),
        )
    }

    pub fn observe(&self, problem: Problem) -> Result<ObservedProblem> {
        let descriptor = problem.descriptor();
        let mut live = self.shared.live.lock().unwrap_or_else(|e| e.into_inner());
        if !live.insert(descriptor) {
            return Err(Error::AlreadyObserved(descriptor));
        }
        Ok(ObservedProblem {
            problem,
            shared: Arc::clone(&self.shared),
            events: Vec::new(),
            last_logged: f64::INFINITY,
            finalized: false,
        })
    }
}

/// A problem whose improvements are being logged.
///
/// The run block is written by [`ObservedProblem::finalize`], or on drop if
/// finalize was never called.
#[derive(Debug)]
pub struct ObservedProblem {
    problem: Problem,
    shared: Arc<Shared>,
    events: Vec<Event>,
    last_logged: f64,
    finalized: bool,
}

impl ObservedProblem {
    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        let (f, offset) = self.problem.evaluate_with_offset(x)?;
        // Rounding is monotone and logged values are fixed points of it, so
        // only true improvements can be logged improvements.
        if offset < self.last_logged {
            let logged = logged_value(offset);
            if logged < self.last_logged {
                self.last_logged = logged;
                self.events.push(Event {
                    evaluations: self.problem.evaluations(),
                    best_offset: logged,
                });
            }
        }
        Ok(f)
    }

    /// The log as it would be written now.
    pub fn run_log(&self) -> RunLog {
        RunLog {
            descriptor: self.problem.descriptor(),
            events: self.events.clone(),
            budget_used: self.problem.evaluations(),
        }
    }

    /// Writes the run block and releases the descriptor for re-observation.
    pub fn finalize(mut self) -> Result<RunLog> {
        self.write_out()
    }

    fn write_out(&mut self) -> Result<RunLog> {
        self.finalized = true;
        let log = self.run_log();
        let d = log.descriptor;
        let path = self
            .shared
            .folder
            .join(data_file_name(d.function_id, d.dimension));
        let written = self.shared.append(&path, &log.to_block());
        self.shared
            .live
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .remove(&d);
        written.map(|()| log)
    }
}

impl Drop for ObservedProblem {
    fn drop(&mut self) {
        if !self.finalized {
            let _ = self.write_out();
        }
    }
}

impl Objective for ObservedProblem {
    fn dimension(&self) -> usize {
        self.problem.dimension()
    }

    fn lower_bounds(&self) -> &[f64] {
        self.problem.lower_bounds()
    }

    fn upper_bounds(&self) -> &[f64] {
        self.problem.upper_bounds()
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        ObservedProblem::evaluate(self, x)
    }

    fn evaluations(&self) -> u64 {
        self.problem.evaluations()
    }

    fn final_target_hit(&self) -> bool {
        self.problem.final_target_hit()
    }

    fn descriptor(&self) -> Option<ProblemDescriptor> {
        Some(self.problem.descriptor())
    }
}

/// Contents of an experiment folder.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentData {
    /// `suite.info` entries; repeated keys keep every value in file order.
    pub metadata: BTreeMap<String, Vec<String>>,
    pub suite: SuiteSpec,
    /// Sorted by suite index; repeated observations keep file order.
    pub logs: Vec<RunLog>,
    /// Truncated lines and unterminated runs that were dropped.
    pub warnings: usize,
}

impl ExperimentData {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .get(key)
            .and_then(|v| v.first())
            .map(String::as_str)
    }
}

fn parse_id_list<T: std::str::FromStr>(path: &Path, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| s.trim().parse::<T>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::MalformedLog {
            path: path.to_path_buf(),
            line: 0,
            reason: format!("bad `{key}` list `{value}`"),
        })
}

fn read_metadata(folder: &Path) -> Result<(BTreeMap<String, Vec<String>>, SuiteSpec)> {
    let path = folder.join(INFO_FILE);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == ErrorKind::NotFound => return Err(Error::MissingMetadata(path)),
        Err(e) => return Err(Error::io(&path, e)),
    };
    let mut metadata: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::MalformedLog {
            path: path.clone(),
            line: k + 1,
            reason: "expected `key = value`".into(),
        })?;
        metadata
            .entry(key.trim().to_string())
            .or_default()
            .push(value.trim().to_string());
    }
    let first = |key: &str| -> Result<&str> {
        metadata
            .get(key)
            .and_then(|v| v.first())
            .map(String::as_str)
            .ok_or_else(|| Error::MalformedLog {
                path: path.clone(),
                line: 0,
                reason: format!("missing `{key}`"),
            })
    };
    let version = first("format_version")?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version.to_string(),
            expected: FORMAT_VERSION.to_string(),
        });
    }
    let name = first("suite")?.to_string();
    let defaults = registered_suites().into_iter().find(|s| s.name() == name);
    let list = |key: &str| metadata.get(key).and_then(|v| v.first());
    let spec = match (
        list("function_ids"),
        list("dimensions"),
        list("instance_ids"),
    ) {
        (Some(f), Some(d), Some(i)) => SuiteSpec::new(
            name,
            parse_id_list(&path, "function_ids", f)?,
            parse_id_list(&path, "dimensions", d)?,
            parse_id_list(&path, "instance_ids", i)?,
        )?,
        _ => defaults.ok_or_else(|| Error::MalformedLog {
            path: path.clone(),
            line: 0,
            reason: format!("no problem lists and `{name}` is not a registered suite"),
        })?,
    };
    Ok((metadata, spec))
}

/// Parses `f<i>_d<n>.dat` into `(i, n)`.
fn data_file_key(name: &str) -> Option<(u32, usize)> {
    let stem = name.strip_prefix('f')?.strip_suffix(".dat")?;
    let (i, n) = stem.split_once("_d")?;
    Some((i.parse().ok()?, n.parse().ok()?))
}

fn parse_kv<T: std::str::FromStr>(token: Option<&str>, key: &str) -> Option<T> {
    token?.strip_prefix(key)?.strip_prefix('=')?.parse().ok()
}

struct DataFileParse {
    logs: Vec<RunLog>,
    warnings: usize,
}

fn parse_data_file(path: &Path, key: (u32, usize), suite: &SuiteSpec) -> Result<DataFileParse> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let malformed = |line: usize, reason: String| Error::MalformedLog {
        path: path.to_path_buf(),
        line,
        reason,
    };

    let mut warnings = 0;
    let mut lines: Vec<&str> = text.split('\n').collect();
    // split leaves "" after a final newline; anything else is a partial line.
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    } else if !lines.is_empty() {
        lines.pop();
        warnings += 1;
    }

    let mut logs = Vec::new();
    let mut open: Option<RunLog> = None;
    for (k, line) in lines.iter().enumerate() {
        let lineno = k + 1;
        if let Some(rest) = line.strip_prefix("# run ") {
            if open.is_some() {
                return Err(malformed(lineno, "run header inside an open run".into()));
            }
            let mut tokens = rest.split_whitespace();
            let (Some(i), Some(n), Some(j)) = (
                parse_kv::<u32>(tokens.next(), "i"),
                parse_kv::<usize>(tokens.next(), "n"),
                parse_kv::<u32>(tokens.next(), "j"),
            ) else {
                return Err(malformed(lineno, format!("bad run header `{line}`")));
            };
            if (i, n) != key {
                return Err(malformed(
                    lineno,
                    format!("run i={i} n={n} does not belong in this file"),
                ));
            }
            let suite_index = suite
                .triple_to_index(n, i, j)
                .map_err(|e| malformed(lineno, e.to_string()))?;
            open = Some(RunLog {
                descriptor: ProblemDescriptor {
                    function_id: i,
                    dimension: n,
                    instance_id: j,
                    suite_index,
                },
                events: Vec::new(),
                budget_used: 0,
            });
        } else if let Some(rest) = line.strip_prefix("# end ") {
            let mut run = open
                .take()
                .ok_or_else(|| malformed(lineno, "end marker outside a run".into()))?;
            run.budget_used = parse_kv(Some(rest.trim()), "budget")
                .ok_or_else(|| malformed(lineno, format!("bad end marker `{line}`")))?;
            run.check().map_err(|reason| malformed(lineno, reason))?;
            logs.push(run);
        } else {
            let run = open
                .as_mut()
                .ok_or_else(|| malformed(lineno, "event line outside a run".into()))?;
            let parsed = line.split_once('\t').and_then(|(e, v)| {
                Some(Event {
                    evaluations: e.parse().ok()?,
                    best_offset: v.parse().ok()?,
                })
            });
            let event =
                parsed.ok_or_else(|| malformed(lineno, format!("bad event line `{line}`")))?;
            run.events.push(event);
        }
    }
    if open.is_some() {
        warnings += 1;
    }
    Ok(DataFileParse { logs, warnings })
}

/// Reads every run of an experiment folder written by [`Observer`].
pub fn parse_logs(folder: &Path) -> Result<ExperimentData> {
    let (metadata, suite) = read_metadata(folder)?;
    let mut files: Vec<(String, (u32, usize))> = fs::read_dir(folder)
        .map_err(|e| Error::io(folder, e))?
        .filter_map(|entry| {
            let name = entry.ok()?.file_name().into_string().ok()?;
            let key = data_file_key(&name)?;
            Some((name, key))
        })
        .collect();
    files.sort();

    let mut logs = Vec::new();
    let mut warnings = 0;
    for (name, key) in files {
        let parsed = parse_data_file(&folder.join(&name), key, &suite)?;
        logs.extend(parsed.logs);
        warnings += parsed.warnings;
    }
    logs.sort_by_key(|log| log.descriptor.suite_index);
    Ok(ExperimentData {
        metadata,
        suite,
        logs,
        warnings,
    })
}
