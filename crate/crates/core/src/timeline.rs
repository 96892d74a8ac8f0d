//! Event timelines and their CSV form.
//!
//! A timeline is one sample path of a counting process observed on the
//! window `(0, window_end]`: an event exactly at `window_end` is inside, an
//! event at 0 is not. Times are non-decreasing. Exact ties are representable
//! so that coincident records reach the singularity check instead of being
//! rejected on load.
//!
//! CSV layout:
//!
//! ```text
//! # window_end=1000.00000
//! unit_id,time_h
//! pump-7,12.3456789
//! ```

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventTimeline {
    window_end: f64,
    events: Vec<f64>,
    unit_id: Option<String>,
}

impl EventTimeline {
    pub fn new(window_end: f64, events: Vec<f64>, unit_id: Option<String>) -> Result<Self> {
        if !(window_end.is_finite() && window_end > 0.0) {
            return Err(Error::InvalidTimeline(format!(
                "window_end must be finite and > 0, got {window_end}"
            )));
        }
        for (i, &t) in events.iter().enumerate() {
            if !(t > 0.0 && t <= window_end) {
                return Err(Error::InvalidTimeline(format!(
                    "event {i} at {t} lies outside (0, {window_end}]"
                )));
            }
            if i > 0 && t < events[i - 1] {
                return Err(Error::InvalidTimeline(format!(
                    "event {i} at {t} precedes event {} at {}",
                    i - 1,
                    events[i - 1]
                )));
            }
        }
        Ok(Self {
            window_end,
            events,
            unit_id,
        })
    }

    pub fn empty(window_end: f64) -> Result<Self> {
        Self::new(window_end, Vec::new(), None)
    }

    pub fn with_unit_id(mut self, unit_id: impl Into<String>) -> Self {
        self.unit_id = Some(unit_id.into());
        self
    }

    pub fn window_end(&self) -> f64 {
        self.window_end
    }

    pub fn events(&self) -> &[f64] {
        &self.events
    }

    pub fn unit_id(&self) -> Option<&str> {
        self.unit_id.as_deref()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events per hour over the whole window.
    pub fn empirical_rate(&self) -> f64 {
        self.events.len() as f64 / self.window_end
    }

    /// Inter-arrival gaps, the first measured from time 0.
    pub fn gaps(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.events
            .iter()
            .map(|&t| {
                let g = t - prev;
                prev = t;
                g
            })
            .collect()
    }

    /// Multiplies every time (and the window) by `factor`.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.window_end * factor,
            self.events.iter().map(|t| t * factor).collect(),
            self.unit_id.clone(),
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# window_end={}", format_hours(self.window_end))?;
        writeln!(out, "unit_id,time_h")?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        let unit = self.unit_id.as_deref().unwrap_or("");
        for &t in &self.events {
            w.write_record([unit, &format_hours(t)])
                .map_err(|e| Error::InvalidTimeline(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Reads one timeline. All rows must carry the same `unit_id` (possibly empty).
    pub fn read_csv<R: Read>(input: R, source: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let mut window_end = None;
        let mut body = String::new();
        for (idx, line) in BufReader::new(input).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("window_end=") {
                    let v: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| parse_err(idx + 1, format!("bad window_end {v:?}")))?;
                    window_end = Some(v);
                }
                // Comments keep their line so csv positions map to file lines.
                body.push('\n');
                continue;
            }
            body.push_str(&line);
            body.push('\n');
        }
        let window_end =
            window_end.ok_or_else(|| parse_err(1, "missing `# window_end=<hours>` line".into()))?;

        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(body.as_bytes());
        let headers = rdr
            .headers()
            .map_err(|e| parse_err(1, e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["unit_id", "time_h"] {
            return Err(parse_err(
                1,
                format!("expected header `unit_id,time_h`, found {headers:?}"),
            ));
        }
        let mut events = Vec::new();
        let mut unit: Option<String> = None;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                parse_err(line, e.to_string())
            })?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            if rec.len() != 2 {
                return Err(parse_err(
                    line,
                    format!("expected 2 fields, got {}", rec.len()),
                ));
            }
            let id = rec[0].to_string();
            match &unit {
                None => unit = Some(id),
                Some(u) if *u != id => {
                    return Err(parse_err(
                        line,
                        format!("mixed unit ids {u:?} and {id:?}; one timeline per file"),
                    ))
                }
                _ => {}
            }
            let t: f64 = rec[1]
                .parse()
                .map_err(|_| parse_err(line, format!("bad time {:?}", &rec[1])))?;
            events.push(t);
        }
        let unit = unit.filter(|u| !u.is_empty());
        EventTimeline::new(window_end, events, unit).map_err(|e| parse_err(0, e.to_string()))
    }

    pub fn read_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::open(path, e))?;
        Self::read_csv(f, &path.display().to_string())
    }
}

/// Decimal rendering with at least 9 significant digits that parses back to
/// the identical `f64`.
pub fn format_hours(x: f64) -> String {
    let shortest = format!("{x}");
    let sig = shortest
        .chars()
        .filter(|c| c.is_ascii_digit())
        .skip_while(|&c| c == '0')
        .count();
    if sig >= 9 || x == 0.0 || !x.is_finite() {
        return shortest;
    }
    let int_digits = x.abs().log10().floor() as i32 + 1;
    let decimals = (9 - int_digits).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_is_open_closed() {
        assert!(EventTimeline::new(5.0, vec![5.0], None).is_ok());
        assert!(EventTimeline::new(5.0, vec![0.0], None).is_err());
        assert!(EventTimeline::new(5.0, vec![5.000001], None).is_err());
        assert!(EventTimeline::new(0.0, vec![], None).is_err());
        assert!(EventTimeline::new(-1.0, vec![], None).is_err());
    }

    #[test]
    fn order_is_enforced_but_ties_allowed() {
        assert!(EventTimeline::new(5.0, vec![2.0, 1.0], None).is_err());
        assert!(EventTimeline::new(5.0, vec![1.0, 1.0, 2.0], None).is_ok());
    }

    #[test]
    fn gaps_start_at_zero() {
        let t = EventTimeline::new(10.0, vec![1.0, 3.0, 7.5], None).unwrap();
        assert_eq!(t.gaps(), vec![1.0, 2.0, 4.5]);
    }

    #[test]
    fn format_keeps_nine_digits() {
        assert_eq!(format_hours(5.0), "5.00000000");
        assert_eq!(format_hours(1000.0), "1000.00000");
        assert_eq!(format_hours(0.25), "0.250000000");
        assert_eq!(format_hours(0.001), "0.00100000000");
        let x = 123.456_789_012_345_67;
        assert_eq!(format_hours(x).parse::<f64>().unwrap(), x);
        for x in [5.0, 1000.0, 0.25, 0.001, 1e-7, 3.5e6, 1.0 / 3.0] {
            let s = format_hours(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let sig = s
                .trim_start_matches(['0', '.'])
                .chars()
                .filter(|c| c.is_ascii_digit())
                .count();
            assert!(sig >= 9, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let t = EventTimeline::new(5.0, vec![1.0, 2.5], Some("u1".into())).unwrap();
        assert_eq!(
            t.to_csv_string(),
            "# window_end=5.00000000\nunit_id,time_h\nu1,1.00000000\nu1,2.50000000\n"
        );
    }

    #[test]
    fn csv_round_trip_and_empty() {
        let t = EventTimeline::new(1000.0, vec![0.1, 1.0 / 3.0, 999.999_999_999], None).unwrap();
        let back = EventTimeline::read_csv(t.to_csv_string().as_bytes(), "mem").unwrap();
        assert_eq!(back, t);
        let e = EventTimeline::empty(7.0).unwrap();
        let back = EventTimeline::read_csv(e.to_csv_string().as_bytes(), "mem").unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let bad = "# window_end=10\nunit_id,time_h\n,1\n,abc\n";
        match EventTimeline::read_csv(bad.as_bytes(), "x.csv") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let missing = "unit_id,time_h\n,1\n";
        assert!(EventTimeline::read_csv(missing.as_bytes(), "x.csv").is_err());
        let mixed = "# window_end=10\nunit_id,time_h\na,1\nb,2\n";
        assert!(EventTimeline::read_csv(mixed.as_bytes(), "x.csv").is_err());
        let outside = "# window_end=10\nunit_id,time_h\n,11\n";
        assert!(EventTimeline::read_csv(outside.as_bytes(), "x.csv").is_err());
    }

    #[test]
    fn duplicates_survive_loading() {
        let dup = "# window_end=10\nunit_id,time_h\n,1\n,1\n,4\n";
        let t = EventTimeline::read_csv(dup.as_bytes(), "dup.csv").unwrap();
        assert_eq!(t.events(), &[1.0, 1.0, 4.0]);
    }
}
