//! Run configuration: a TOML file checked against a strict schema.
//!
//! Every problem is reported with the dotted key path it concerns, and
//! unknown keys come with the closest known key when one is similar enough.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveTime, Weekday};
use toml::{Table, Value};

use walkcast::backtest::RollingPlan;
use walkcast::calendar::{parse_holidays, TradingCalendar};
use walkcast::fixtures::reference_spec;
use walkcast::ingest::{SyntheticSpec, EXOGENOUS_COUNT};
use walkcast::learners::{Algorithm, Hyperparameters, ModelSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

#[derive(Debug, Clone)]
pub enum DataSource {
    Synthetic(SyntheticSpec),
    Files {
        target: (String, PathBuf),
        exogenous: Vec<(String, PathBuf)>,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub calendar: TradingCalendar,
    pub data: DataSource,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub plans: Vec<RollingPlan>,
    pub models: Vec<ModelSpec>,
}

#[derive(Debug)]
pub enum ConfigError {
    Unreadable(PathBuf, std::io::Error),
    Invalid(Vec<Diagnostic>),
}

const TOP_KEYS: &[&str] = &["output_dir", "allowed_train_days", "calendar", "data", "plans", "models"];
const CALENDAR_KEYS: &[&str] = &["session_open", "session_close", "holidays", "holidays_file", "weekend_days"];
const DATA_KEYS: &[&str] = &["start", "end", "synthetic", "files"];
const SYNTHETIC_KEYS: &[&str] = &[
    "seed",
    "coefficients",
    "hour_amplitude",
    "weekday_amplitude",
    "noise_sigma",
    "base_price",
    "walk_sigma",
];
const FILES_KEYS: &[&str] = &["target", "exogenous"];
const SERIES_KEYS: &[&str] = &["symbol", "path"];
const PLAN_KEYS: &[&str] = &["train_days", "horizon_days", "evaluation_start", "evaluation_end"];

/// Hyperparameter keys of `algorithm`, taken from its serialised defaults.
fn param_keys(algorithm: Algorithm) -> Vec<String> {
    let v = serde_json::to_value(Hyperparameters::defaults(algorithm)).expect("defaults serialise");
    v.as_object()
        .expect("tagged enum serialises to an object")
        .keys()
        .filter(|k| *k != "algorithm")
        .cloned()
        .collect()
}

fn suggestion<'a>(key: &str, known: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    known
        .into_iter()
        .map(|k| (strsim::jaro_winkler(key, k), k))
        .filter(|(score, _)| *score >= 0.8)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, k)| k)
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

struct Checker {
    diags: Vec<Diagnostic>,
    base_dir: PathBuf,
}

impl Checker {
    fn report(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            path: path.into(),
            message: message.into(),
        });
    }

    fn known_keys(&mut self, table: &Table, path: &str, known: &[&str]) {
        for key in table.keys() {
            if known.contains(&key.as_str()) {
                continue;
            }
            let message = match suggestion(key, known.iter().copied()) {
                Some(s) => format!("unknown key (did you mean \"{s}\"?)"),
                None => format!("unknown key; expected one of: {}", known.join(", ")),
            };
            self.report(join(path, key), message);
        }
    }

    fn table<'a>(&mut self, value: &'a Value, path: &str) -> Option<&'a Table> {
        match value.as_table() {
            Some(t) => Some(t),
            None => {
                self.report(path, format!("expected a table, found {}", value.type_str()));
                None
            }
        }
    }

    fn required<'a>(&mut self, table: &'a Table, path: &str, key: &str) -> Option<&'a Value> {
        let v = table.get(key);
        if v.is_none() {
            self.report(join(path, key), "missing required key");
        }
        v
    }

    fn string(&mut self, value: &Value, path: &str) -> Option<String> {
        match value.as_str() {
            Some(s) => Some(s.to_string()),
            None => {
                self.report(path, format!("expected a string, found {}", value.type_str()));
                None
            }
        }
    }

    fn integer(&mut self, value: &Value, path: &str, min: i64) -> Option<u64> {
        match value.as_integer() {
            Some(i) if i >= min => Some(i as u64),
            Some(i) => {
                self.report(path, format!("must be at least {min}, got {i}"));
                None
            }
            None => {
                self.report(path, format!("expected an integer, found {}", value.type_str()));
                None
            }
        }
    }

    fn float(&mut self, value: &Value, path: &str) -> Option<f64> {
        match value {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.report(path, format!("expected a number, found {}", other.type_str()));
                None
            }
        }
    }

    /// Accepts TOML local dates and `YYYY-MM-DD` strings.
    fn date(&mut self, value: &Value, path: &str) -> Option<NaiveDate> {
        let text = match value {
            Value::Datetime(d) if d.time.is_none() && d.offset.is_none() => d.to_string(),
            Value::String(s) => s.clone(),
            other => {
                self.report(path, format!("expected a date, found {}", other.type_str()));
                return None;
            }
        };
        match NaiveDate::parse_from_str(&text, "%Y-%m-%d") {
            Ok(d) => Some(d),
            Err(_) => {
                self.report(path, format!("\"{text}\" is not a YYYY-MM-DD date"));
                None
            }
        }
    }

    fn time(&mut self, value: &Value, path: &str) -> Option<NaiveTime> {
        let text = self.string(value, path)?;
        match NaiveTime::parse_from_str(&text, "%H:%M") {
            Ok(t) => Some(t),
            Err(_) => {
                self.report(path, format!("\"{text}\" is not an HH:MM time"));
                None
            }
        }
    }

    fn array<'a>(&mut self, value: &'a Value, path: &str) -> Option<&'a Vec<Value>> {
        match value.as_array() {
            Some(a) => Some(a),
            None => {
                self.report(path, format!("expected an array, found {}", value.type_str()));
                None
            }
        }
    }

    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn calendar(&mut self, value: Option<&Value>) -> Option<TradingCalendar> {
        let Some(value) = value else {
            return Some(TradingCalendar::nyse());
        };
        let t = self.table(value, "calendar")?;
        self.known_keys(t, "calendar", CALENDAR_KEYS);
        let open = match t.get("session_open") {
            Some(v) => self.time(v, "calendar.session_open"),
            None => NaiveTime::from_hms_opt(9, 30, 0),
        };
        let close = match t.get("session_close") {
            Some(v) => self.time(v, "calendar.session_close"),
            None => NaiveTime::from_hms_opt(16, 0, 0),
        };
        let mut holidays = BTreeSet::new();
        if let Some(v) = t.get("holidays") {
            if let Some(items) = self.array(v, "calendar.holidays") {
                for (i, item) in items.iter().enumerate() {
                    if let Some(d) = self.date(item, &format!("calendar.holidays[{i}]")) {
                        holidays.insert(d);
                    }
                }
            }
        }
        if let Some(v) = t.get("holidays_file") {
            if let Some(p) = self.string(v, "calendar.holidays_file") {
                let path = self.resolve(&p);
                match std::fs::read_to_string(&path) {
                    Ok(text) => match parse_holidays(&text, &path) {
                        Ok(set) => holidays.extend(set),
                        Err(e) => self.report("calendar.holidays_file", e.to_string()),
                    },
                    Err(e) => self.report(
                        "calendar.holidays_file",
                        format!("cannot read {}: {e}", path.display()),
                    ),
                }
            }
        }
        let mut weekend = None;
        if let Some(v) = t.get("weekend_days") {
            if let Some(items) = self.array(v, "calendar.weekend_days") {
                let mut days = Vec::new();
                for (i, item) in items.iter().enumerate() {
                    let path = format!("calendar.weekend_days[{i}]");
                    if let Some(s) = self.string(item, &path) {
                        match s.parse::<Weekday>() {
                            Ok(d) => days.push(d),
                            Err(_) => self.report(path, format!("\"{s}\" is not a weekday name")),
                        }
                    }
                }
                weekend = Some(days);
            }
        }
        let cal = match TradingCalendar::new(open?, close?) {
            Ok(c) => c.with_holidays(holidays),
            Err(e) => {
                self.report("calendar", e.to_string());
                return None;
            }
        };
        match weekend {
            None => Some(cal),
            Some(days) => match cal.with_weekend_days(days) {
                Ok(c) => Some(c),
                Err(e) => {
                    self.report("calendar.weekend_days", e.to_string());
                    None
                }
            },
        }
    }

    fn synthetic(&mut self, value: &Value) -> Option<SyntheticSpec> {
        let path = "data.synthetic";
        let t = self.table(value, path)?;
        self.known_keys(t, path, SYNTHETIC_KEYS);
        let seed = self.required(t, path, "seed").and_then(|v| self.integer(v, "data.synthetic.seed", 0));
        let mut spec = reference_spec(seed.unwrap_or(0));
        if let Some(v) = t.get("coefficients") {
            let p = "data.synthetic.coefficients";
            if let Some(items) = self.array(v, p) {
                if items.len() != EXOGENOUS_COUNT {
                    self.report(p, format!("expected {EXOGENOUS_COUNT} numbers, got {}", items.len()));
                } else {
                    for (i, item) in items.iter().enumerate() {
                        if let Some(c) = self.float(item, &format!("{p}[{i}]")) {
                            spec.coefficients[i] = c;
                        }
                    }
                }
            }
        }
        let fields: [(&str, &mut f64); 5] = [
            ("hour_amplitude", &mut spec.hour_amplitude),
            ("weekday_amplitude", &mut spec.weekday_amplitude),
            ("noise_sigma", &mut spec.noise_sigma),
            ("base_price", &mut spec.base_price),
            ("walk_sigma", &mut spec.walk_sigma),
        ];
        for (key, slot) in fields {
            if let Some(v) = t.get(key) {
                if let Some(f) = self.float(v, &join(path, key)) {
                    *slot = f;
                }
            }
        }
        if let Err(e) = spec.validate() {
            self.report(path, e.to_string());
        }
        seed.map(|_| spec)
    }

    fn series(&mut self, value: &Value, path: &str) -> Option<(String, PathBuf)> {
        let t = self.table(value, path)?;
        self.known_keys(t, path, SERIES_KEYS);
        let symbol = self.required(t, path, "symbol").and_then(|v| self.string(v, &join(path, "symbol")));
        let file = self.required(t, path, "path").and_then(|v| self.string(v, &join(path, "path")));
        Some((symbol?, self.resolve(&file?)))
    }

    fn files(&mut self, value: &Value) -> Option<DataSource> {
        let path = "data.files";
        let t = self.table(value, path)?;
        self.known_keys(t, path, FILES_KEYS);
        let target = self
            .required(t, path, "target")
            .and_then(|v| self.series(v, "data.files.target"));
        let mut exogenous = Vec::new();
        if let Some(v) = self.required(t, path, "exogenous") {
            if let Some(items) = self.array(v, "data.files.exogenous") {
                if items.len() != EXOGENOUS_COUNT {
                    self.report(
                        "data.files.exogenous",
                        format!("expected {EXOGENOUS_COUNT} series, got {}", items.len()),
                    );
                }
                for (i, item) in items.iter().enumerate() {
                    if let Some(s) = self.series(item, &format!("data.files.exogenous[{i}]")) {
                        exogenous.push(s);
                    }
                }
            }
        }
        let mut seen = BTreeSet::new();
        for (sym, _) in target.iter().chain(&exogenous) {
            if !seen.insert(sym.clone()) {
                self.report("data.files", format!("symbol \"{sym}\" appears more than once"));
            }
        }
        Some(DataSource::Files {
            target: target?,
            exogenous,
        })
    }

    fn plan(&mut self, value: &Value, path: &str, allowed: Option<&BTreeSet<u64>>) -> Option<RollingPlan> {
        let t = self.table(value, path)?;
        self.known_keys(t, path, PLAN_KEYS);
        let train = self
            .required(t, path, "train_days")
            .and_then(|v| self.integer(v, &join(path, "train_days"), 1));
        let horizon = self
            .required(t, path, "horizon_days")
            .and_then(|v| self.integer(v, &join(path, "horizon_days"), 1));
        let start = self
            .required(t, path, "evaluation_start")
            .and_then(|v| self.date(v, &join(path, "evaluation_start")));
        let end = self
            .required(t, path, "evaluation_end")
            .and_then(|v| self.date(v, &join(path, "evaluation_end")));
        if let (Some(train), Some(allowed)) = (train, allowed) {
            if !allowed.contains(&train) {
                let list: Vec<String> = allowed.iter().map(|d| d.to_string()).collect();
                self.report(
                    join(path, "train_days"),
                    format!("{train} is not in allowed_train_days [{}]", list.join(", ")),
                );
            }
        }
        if let (Some(s), Some(e)) = (start, end) {
            if s > e {
                self.report(path, format!("evaluation_start {s} is after evaluation_end {e}"));
                return None;
            }
        }
        Some(RollingPlan {
            train_days: train? as usize,
            horizon_days: horizon? as usize,
            evaluation_start: start?,
            evaluation_end: end?,
        })
    }

    fn model(&mut self, value: &Value, path: &str) -> Option<ModelSpec> {
        let t = self.table(value, path)?;
        let name = self
            .required(t, path, "algorithm")
            .and_then(|v| self.string(v, &join(path, "algorithm")));
        let seed = self.required(t, path, "seed").and_then(|v| self.integer(v, &join(path, "seed"), 0));
        let n = name?;
        let Some(algorithm) = Algorithm::ALL.into_iter().find(|a| a.name() == n) else {
            let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            let hint = suggestion(&n, names.iter().copied())
                .map(|s| format!(" (did you mean \"{s}\"?)"))
                .unwrap_or_else(|| format!("; expected one of: {}", names.join(", ")));
            self.report(join(path, "algorithm"), format!("unknown algorithm \"{n}\"{hint}"));
            return None;
        };
        let keys = param_keys(algorithm);
        let mut known: Vec<&str> = vec!["algorithm", "seed"];
        known.extend(keys.iter().map(|s| s.as_str()));
        self.known_keys(t, path, &known);
        let mut params = t.clone();
        params.remove("seed");
        params.retain(|k, _| {
            let k: &str = k;
            known.contains(&k)
        });
        let json = serde_json::to_value(&params).expect("toml values serialise");
        let params: Hyperparameters = match serde_json::from_value(json) {
            Ok(p) => p,
            Err(e) => {
                self.report(path, e.to_string());
                return None;
            }
        };
        if let Err(e) = params.validate() {
            self.report(path, e.to_string());
            return None;
        }
        Some(ModelSpec::new(params, seed?))
    }
}

/// Validates `text` (the contents of the file at `origin`). Relative paths
/// inside it are resolved against the file's directory.
pub fn parse(text: &str, origin: &Path) -> Result<RunConfig, Vec<Diagnostic>> {
    let base_dir = origin.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut c = Checker {
        diags: Vec::new(),
        base_dir,
    };
    let root: Table = match text.parse() {
        Ok(t) => t,
        Err(e) => {
            return Err(vec![Diagnostic {
                path: String::new(),
                message: format!("not valid TOML: {}", e.message()),
            }])
        }
    };
    c.known_keys(&root, "", TOP_KEYS);

    let output_dir = match root.get("output_dir") {
        Some(v) => c.string(v, "output_dir").map(|s| c.resolve(&s)),
        None => Some(c.resolve("walkcast-out")),
    };
    let allowed = root.get("allowed_train_days").and_then(|v| {
        let items = c.array(v, "allowed_train_days")?;
        let mut set = BTreeSet::new();
        for (i, item) in items.iter().enumerate() {
            if let Some(d) = c.integer(item, &format!("allowed_train_days[{i}]"), 1) {
                set.insert(d);
            }
        }
        Some(set)
    });
    let calendar = c.calendar(root.get("calendar"));

    let mut span = (None, None);
    let data = c.required(&root, "", "data").and_then(|v| {
        let t = c.table(v, "data")?;
        c.known_keys(t, "data", DATA_KEYS);
        span.0 = c.required(t, "data", "start").and_then(|v| c.date(v, "data.start"));
        span.1 = c.required(t, "data", "end").and_then(|v| c.date(v, "data.end"));
        match (t.get("synthetic"), t.get("files")) {
            (Some(s), None) => c.synthetic(s).map(DataSource::Synthetic),
            (None, Some(f)) => c.files(f),
            (Some(_), Some(_)) => {
                c.report("data", "give either [data.synthetic] or [data.files], not both");
                None
            }
            (None, None) => {
                c.report("data", "missing a [data.synthetic] or [data.files] section");
                None
            }
        }
    });
    if let (Some(s), Some(e)) = span {
        if s > e {
            c.report("data", format!("start {s} is after end {e}"));
        }
    }

    let mut plans = Vec::new();
    if let Some(v) = c.required(&root, "", "plans") {
        if let Some(items) = c.array(v, "plans") {
            if items.is_empty() {
                c.report("plans", "at least one plan is required");
            }
            for (i, item) in items.iter().enumerate() {
                let path = format!("plans[{i}]");
                if let Some(p) = c.plan(item, &path, allowed.as_ref()) {
                    if let (Some(s), Some(e)) = span {
                        if p.evaluation_start < s || p.evaluation_end > e {
                            c.report(&path, format!("evaluation span lies outside data span {s}..{e}"));
                        }
                    }
                    plans.push(p);
                }
            }
        }
    }
    let mut models = Vec::new();
    if let Some(v) = c.required(&root, "", "models") {
        if let Some(items) = c.array(v, "models") {
            if items.is_empty() {
                c.report("models", "at least one model is required");
            }
            for (i, item) in items.iter().enumerate() {
                if let Some(m) = c.model(item, &format!("models[{i}]")) {
                    models.push(m);
                }
            }
        }
    }

    if !c.diags.is_empty() {
        return Err(c.diags);
    }
    Ok(RunConfig {
        output_dir: output_dir.expect("checked"),
        calendar: calendar.expect("checked"),
        data: data.expect("checked"),
        start: span.0.expect("checked"),
        end: span.1.expect("checked"),
        plans,
        models,
    })
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable(path.to_path_buf(), e))?;
    parse(&text, path).map_err(ConfigError::Invalid)
}
