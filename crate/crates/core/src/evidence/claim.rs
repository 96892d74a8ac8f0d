use std::path::Path;

use serde::{Deserialize, Serialize};

use super::bounds::{rate_upper_bound, required_exposure};
use super::fleet::{exposure, FleetLog};
use super::sil::{sil_for_rate, Sil, SilBands};
use crate::error::{Error, Result};

pub const DEFAULT_CONFIDENCE: f64 = 0.95;

/// Qualitative preconditions for using operating experience at all.
/// Every flag must be present in the input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checklist {
    /// The operating environment acts randomly on the component and is
    /// representative of the intended use.
    pub representative_environment: bool,
    pub similar_environments_all_units: bool,
    pub components_similar: bool,
    pub all_failures_recorded: bool,
    /// Lifetimes, times of use and out-of-service periods are all recorded.
    pub all_lifetimes_recorded: bool,
    pub no_unrecorded_modifications: bool,
    #[serde(default)]
    pub notes: String,
}

impl Checklist {
    pub fn all_true() -> Self {
        Checklist {
            representative_environment: true,
            similar_environments_all_units: true,
            components_similar: true,
            all_failures_recorded: true,
            all_lifetimes_recorded: true,
            no_unrecorded_modifications: true,
            notes: String::new(),
        }
    }

    pub fn flags(&self) -> [(&'static str, bool); 6] {
        [
            (
                "representative_environment",
                self.representative_environment,
            ),
            (
                "similar_environments_all_units",
                self.similar_environments_all_units,
            ),
            ("components_similar", self.components_similar),
            ("all_failures_recorded", self.all_failures_recorded),
            ("all_lifetimes_recorded", self.all_lifetimes_recorded),
            (
                "no_unrecorded_modifications",
                self.no_unrecorded_modifications,
            ),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.flags().iter().all(|(_, v)| *v)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let s = std::fs::read_to_string(path).map_err(|e| Error::open(path, e))?;
        serde_json::from_str(&s)
            .map_err(|e| Error::Config(format!("checklist {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimResult {
    pub exposure_hours: f64,
    pub dangerous_failures: u64,
    pub confidence: f64,
    pub rate_upper_bound: f64,
    pub sil: Sil,
    pub valid: bool,
    pub en50129_sil34_recommendation_met: bool,
    pub version: Option<String>,
    pub band_table_version: String,
    pub units: usize,
    pub years_experience: f64,
    /// Exposure divided by the zero-failure exposure needed for SIL 1.
    pub sil1_exposure_ratio: f64,
    pub audit: Vec<String>,
}

impl ClaimResult {
    /// The level that may actually be claimed: `none` unless the gate holds.
    pub fn claimable_sil(&self) -> Sil {
        if self.valid {
            self.sil
        } else {
            Sil::None
        }
    }

    pub fn text_summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "claim: {}\n",
            if self.valid {
                "valid"
            } else {
                "INVALID (checklist gate failed)"
            }
        ));
        s.push_str(&format!(
            "version: {}\n",
            self.version.as_deref().unwrap_or("-")
        ));
        s.push_str(&format!(
            "exposure: {} h over {} units\n",
            self.exposure_hours, self.units
        ));
        s.push_str(&format!(
            "dangerous failures: {}\n",
            self.dangerous_failures
        ));
        s.push_str(&format!(
            "rate upper bound ({:.0}% confidence): {:.4e} /h\n",
            self.confidence * 100.0,
            self.rate_upper_bound
        ));
        s.push_str(&format!("statistical SIL: {}\n", self.sil));
        s.push_str(&format!(
            "EN 50129 SIL 3/4 recommendation met: {}\n",
            if self.en50129_sil34_recommendation_met {
                "yes"
            } else {
                "no"
            }
        ));
        s.push_str("audit:\n");
        for line in &self.audit {
            s.push_str("  ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}

/// At least 1e6 operating hours, 2 years of experience and 2 distinct equipments.
pub fn en50129_check(hours: f64, years_experience: f64, distinct_equipments: usize) -> bool {
    hours >= 1e6 && years_experience >= 2.0 && distinct_equipments >= 2
}

pub fn evaluate_claim(
    fleet: &FleetLog,
    checklist: &Checklist,
    confidence: f64,
    version_filter: Option<&str>,
) -> Result<ClaimResult> {
    evaluate_claim_with_bands(
        fleet,
        checklist,
        confidence,
        version_filter,
        &SilBands::default(),
    )
}

/// Exposure, chi-square bound, SIL band and checklist gate for one version.
///
/// The gate never consults the statistics: any false flag makes the claim invalid.
pub fn evaluate_claim_with_bands(
    fleet: &FleetLog,
    checklist: &Checklist,
    confidence: f64,
    version_filter: Option<&str>,
    bands: &SilBands,
) -> Result<ClaimResult> {
    bands.validate()?;
    let exp = exposure(fleet, version_filter)?;
    if !(exp.hours > 0.0) {
        return Err(Error::NoExposure(match version_filter {
            Some(v) => format!("no counted service hours for version {v:?}"),
            None => "no counted service hours in fleet".into(),
        }));
    }
    let r = exp.dangerous_failures;
    let bound = rate_upper_bound(exp.hours, r, confidence)?;
    let sil = sil_for_rate(bound, bands);
    let sil1_needed = required_exposure(0, confidence, bands.sil1)?;
    let ratio = exp.hours / sil1_needed;
    let years = exp.years_experience();
    let en = en50129_check(exp.hours, years, exp.units);

    let mut audit = Vec::new();
    audit.push(format!(
        "version: {}",
        exp.version.as_deref().unwrap_or("-")
    ));
    audit.push(format!(
        "exposure T = {} h over {} units, calendar span {:.3} years",
        exp.hours, exp.units, years
    ));
    audit.push(format!("dangerous failures r = {r}"));
    for (unit, f) in &exp.non_dangerous {
        audit.push(format!(
            "non-dangerous failure retained, not counted: unit {unit} at {} h{}",
            f.time,
            if f.description.is_empty() {
                String::new()
            } else {
                format!(" ({})", f.description)
            }
        ));
    }
    audit.push(format!("confidence = {confidence}"));
    audit.push(format!(
        "rate upper bound = chi2({confidence}; {}) / (2T) = {bound:.6e} /h",
        2 * r + 2
    ));
    audit.push(format!(
        "band table {:?}: SIL1 < {:e}, SIL2 < {:e}, SIL3 < {:e}, SIL4 < {:e} (upper edges excluded)",
        bands.version, bands.sil1, bands.sil2, bands.sil3, bands.sil4
    ));
    audit.push(format!("statistical SIL: {sil}"));
    audit.push(format!(
        "zero-failure exposure for SIL 1 at this confidence: {sil1_needed:.1} h; observed/required = {ratio:.4}"
    ));
    for (name, v) in checklist.flags() {
        audit.push(if v {
            format!("gate {name}: satisfied")
        } else {
            format!("gate {name}: NOT satisfied, claim invalid")
        });
    }
    let valid = checklist.all_hold();
    if !valid {
        audit.push("checklist gate failed: operating experience cannot support any claim".into());
    }
    if !checklist.notes.is_empty() {
        audit.push(format!("checklist notes: {}", checklist.notes));
    }
    audit.push(format!(
        "EN 50129 SIL 3/4 recommendation (>= 1e6 h, >= 2 years, >= 2 equipments): {}",
        if en { "met" } else { "not met" }
    ));

    Ok(ClaimResult {
        exposure_hours: exp.hours,
        dangerous_failures: r,
        confidence,
        rate_upper_bound: bound,
        sil,
        valid,
        en50129_sil34_recommendation_met: en,
        version: exp.version,
        band_table_version: bands.version.clone(),
        units: exp.units,
        years_experience: years,
        sil1_exposure_ratio: ratio,
        audit,
    })
}
