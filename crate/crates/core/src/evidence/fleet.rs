//! Fleet operating logs.
//!
//! A fleet log is JSON Lines, one unit per line:
//!
//! ```json
//! {"unit_id": "u1",
//!  "intervals": [{"start": 0, "end": 4500, "version": "v1"}],
//!  "out_of_service": [{"start": 1000, "end": 1200}],
//!  "failures": [{"time": 300, "dangerous": false, "description": "display glitch"}]}
//! ```
//!
//! Times are hours on a clock shared by all units. `out_of_service` and
//! `failures` may be omitted. Blank lines are ignored.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HOURS_PER_YEAR: f64 = 8760.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceInterval {
    pub start: f64,
    pub end: f64,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exclusion {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureEvent {
    pub time: f64,
    pub dangerous: bool,
    #[serde(default)]
    pub description: String,
}

/// One unit's service history.
///
/// Service intervals are closed on the clock, exclusions remove their open
/// interior. A failure on the shared boundary of two back-to-back intervals
/// belongs to the earlier one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceRecord {
    pub unit_id: String,
    pub intervals: Vec<ServiceInterval>,
    #[serde(default)]
    pub out_of_service: Vec<Exclusion>,
    #[serde(default)]
    pub failures: Vec<FailureEvent>,
}

impl ServiceRecord {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidFleet(format!("unit {:?}: {m}", self.unit_id)));
        if self.unit_id.is_empty() {
            return bad("empty unit_id".into());
        }
        for iv in &self.intervals {
            if !(iv.start.is_finite() && iv.end.is_finite() && iv.start < iv.end) {
                return bad(format!("bad service interval ({}, {})", iv.start, iv.end));
            }
            if iv.version.is_empty() {
                return bad(format!(
                    "service interval ({}, {}) has no version",
                    iv.start, iv.end
                ));
            }
        }
        for w in self.intervals.windows(2) {
            if w[1].start < w[0].end {
                return bad(format!(
                    "service intervals ({}, {}) and ({}, {}) overlap or are out of order",
                    w[0].start, w[0].end, w[1].start, w[1].end
                ));
            }
        }
        let mut excl: Vec<&Exclusion> = self.out_of_service.iter().collect();
        for ex in &excl {
            if !(ex.start.is_finite() && ex.end.is_finite() && ex.start < ex.end) {
                return bad(format!("bad exclusion ({}, {})", ex.start, ex.end));
            }
            if self.interval_containing(ex.start, ex.end).is_none() {
                return bad(format!(
                    "exclusion ({}, {}) is not inside a service interval",
                    ex.start, ex.end
                ));
            }
        }
        excl.sort_by(|a, b| a.start.total_cmp(&b.start));
        for w in excl.windows(2) {
            if w[1].start < w[0].end {
                return bad(format!(
                    "exclusions ({}, {}) and ({}, {}) overlap",
                    w[0].start, w[0].end, w[1].start, w[1].end
                ));
            }
        }
        for f in &self.failures {
            if self.counted_interval_of(f.time).is_none() {
                return bad(format!("failure at {} lies outside service time", f.time));
            }
        }
        Ok(())
    }

    fn interval_containing(&self, a: f64, b: f64) -> Option<usize> {
        self.intervals
            .iter()
            .position(|iv| iv.start <= a && b <= iv.end)
    }

    /// Index of the service interval a failure at `t` is charged to.
    fn counted_interval_of(&self, t: f64) -> Option<usize> {
        if !t.is_finite() || self.out_of_service.iter().any(|e| e.start < t && t < e.end) {
            return None;
        }
        self.interval_containing(t, t)
    }

    fn excluded_within(&self, iv: &ServiceInterval) -> f64 {
        self.out_of_service
            .iter()
            .filter(|e| iv.start <= e.start && e.end <= iv.end)
            .map(|e| e.end - e.start)
            .sum()
    }

    pub fn versions(&self) -> BTreeSet<&str> {
        self.intervals
            .iter()
            .map(|iv| iv.version.as_str())
            .collect()
    }
}

/// A validated set of unit records with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FleetLog {
    records: Vec<ServiceRecord>,
}

impl FleetLog {
    pub fn new(records: Vec<ServiceRecord>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for r in &records {
            r.validate()?;
            if !seen.insert(r.unit_id.as_str()) {
                return Err(Error::InvalidFleet(format!(
                    "duplicate unit_id {:?}",
                    r.unit_id
                )));
            }
        }
        Ok(FleetLog { records })
    }

    pub fn records(&self) -> &[ServiceRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<ServiceRecord> {
        self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn versions(&self) -> BTreeSet<&str> {
        self.records.iter().flat_map(|r| r.versions()).collect()
    }

    pub fn read_jsonl<R: Read>(input: R, source: &str) -> Result<Self> {
        let mut records = Vec::new();
        let mut first_line: HashMap<String, usize> = HashMap::new();
        let at = |line: usize, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        for (idx, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            let n = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let rec: ServiceRecord =
                serde_json::from_str(&line).map_err(|e| at(n, e.to_string()))?;
            rec.validate().map_err(|e| at(n, e.to_string()))?;
            if let Some(prev) = first_line.insert(rec.unit_id.clone(), n) {
                return Err(at(
                    n,
                    format!("duplicate unit_id {:?} (first on line {prev})", rec.unit_id),
                ));
            }
            records.push(rec);
        }
        Ok(FleetLog { records })
    }

    pub fn read_jsonl_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::open(path, e))?;
        Self::read_jsonl(f, &path.display().to_string())
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Counted operating experience for one component version.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exposure {
    pub hours: f64,
    pub dangerous_failures: u64,
    /// `(unit_id, failure)` pairs that fell in counted time but are not dangerous.
    pub non_dangerous: Vec<(String, FailureEvent)>,
    pub version: Option<String>,
    /// Units with positive counted time.
    pub units: usize,
    /// Earliest start and latest end of the counted intervals.
    pub span: Option<(f64, f64)>,
}

impl Exposure {
    pub fn years_experience(&self) -> f64 {
        self.span.map_or(0.0, |(a, b)| (b - a) / HOURS_PER_YEAR)
    }
}

/// Total in-service hours minus exclusions, and dangerous failures in that
/// time, over intervals whose version matches `version_filter`.
///
/// Different versions are different components, so a fleet carrying more
/// than one version needs a filter.
pub fn exposure(fleet: &FleetLog, version_filter: Option<&str>) -> Result<Exposure> {
    let versions = fleet.versions();
    if version_filter.is_none() && versions.len() > 1 {
        return Err(Error::InvalidFleet(format!(
            "fleet mixes versions {:?}; choose one with a version filter",
            versions
        )));
    }
    let wanted = |v: &str| version_filter.is_none_or(|f| f == v);

    let mut out = Exposure {
        hours: 0.0,
        dangerous_failures: 0,
        non_dangerous: Vec::new(),
        version: version_filter
            .map(str::to_string)
            .or_else(|| versions.first().map(|v| v.to_string())),
        units: 0,
        span: None,
    };
    for rec in fleet.records() {
        let mut unit_hours = 0.0;
        for iv in rec.intervals.iter().filter(|iv| wanted(&iv.version)) {
            let h = (iv.end - iv.start) - rec.excluded_within(iv);
            unit_hours += h;
            if h > 0.0 {
                out.span = Some(match out.span {
                    None => (iv.start, iv.end),
                    Some((a, b)) => (a.min(iv.start), b.max(iv.end)),
                });
            }
        }
        out.hours += unit_hours;
        if unit_hours > 0.0 {
            out.units += 1;
        }
        for f in &rec.failures {
            let idx = rec.counted_interval_of(f.time).expect("validated");
            if !wanted(&rec.intervals[idx].version) {
                continue;
            }
            if f.dangerous {
                out.dangerous_failures += 1;
            } else {
                out.non_dangerous.push((rec.unit_id.clone(), f.clone()));
            }
        }
    }
    Ok(out)
}
