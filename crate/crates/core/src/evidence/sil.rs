use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Safety integrity level reached by a rate bound, `None` when above every band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sil {
    None,
    Sil1,
    Sil2,
    Sil3,
    Sil4,
}

impl Sil {
    pub fn level(self) -> u8 {
        match self {
            Sil::None => 0,
            Sil::Sil1 => 1,
            Sil::Sil2 => 2,
            Sil::Sil3 => 3,
            Sil::Sil4 => 4,
        }
    }

    pub fn from_level(level: u8) -> Option<Sil> {
        Some(match level {
            0 => Sil::None,
            1 => Sil::Sil1,
            2 => Sil::Sil2,
            3 => Sil::Sil3,
            4 => Sil::Sil4,
            _ => return None,
        })
    }
}

impl fmt::Display for Sil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sil::None => f.write_str("none"),
            s => write!(f, "SIL {}", s.level()),
        }
    }
}

/// JSON form: `"none"` or the integer level.
impl Serialize for Sil {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sil::None => s.serialize_str("none"),
            other => s.serialize_u8(other.level()),
        }
    }
}

impl<'de> Deserialize<'de> for Sil {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Level(u8),
            Name(String),
        }
        let bad = |what: String| serde::de::Error::custom(format!("invalid SIL {what}"));
        match Raw::deserialize(d)? {
            Raw::Level(l) if (1..=4).contains(&l) => Ok(Sil::from_level(l).expect("1..=4")),
            Raw::Level(l) => Err(bad(l.to_string())),
            Raw::Name(n) if n == "none" => Ok(Sil::None),
            Raw::Name(n) => Err(bad(n)),
        }
    }
}

/// Upper rate limits (per hour) of the high-demand SIL bands. A bound reaches
/// level `k` when it is strictly below `sil_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SilBands {
    pub version: String,
    pub sil1: f64,
    pub sil2: f64,
    pub sil3: f64,
    pub sil4: f64,
}

impl Default for SilBands {
    fn default() -> Self {
        SilBands {
            version: "iec61508-high-demand".into(),
            sil1: 1e-5,
            sil2: 1e-6,
            sil3: 1e-7,
            sil4: 1e-8,
        }
    }
}

impl SilBands {
    pub fn validate(&self) -> Result<()> {
        let l = [self.sil1, self.sil2, self.sil3, self.sil4];
        if l.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Config("SIL limits must be finite and > 0".into()));
        }
        if !l.windows(2).all(|w| w[0] > w[1]) {
            return Err(Error::Config(
                "SIL limits must strictly decrease from sil1 to sil4".into(),
            ));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let b: SilBands = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        b.validate()?;
        Ok(b)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::open(path, e))?;
        Self::from_toml_str(&s).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn limit(&self, sil: Sil) -> Option<f64> {
        match sil {
            Sil::None => None,
            Sil::Sil1 => Some(self.sil1),
            Sil::Sil2 => Some(self.sil2),
            Sil::Sil3 => Some(self.sil3),
            Sil::Sil4 => Some(self.sil4),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("plain table")
    }
}

/// Highest level whose limit lies strictly above `bound`.
pub fn sil_for_rate(bound: f64, bands: &SilBands) -> Sil {
    [Sil::Sil4, Sil::Sil3, Sil::Sil2, Sil::Sil1]
        .into_iter()
        .find(|&s| bound < bands.limit(s).expect("leveled"))
        .unwrap_or(Sil::None)
}
