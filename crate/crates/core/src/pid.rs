//! Persistent identifiers used as join keys between sources.
//!
//! Every [`Pid`] is stored in canonical form: DOIs lowercase, ORCIDs as four
//! hyphenated groups of four with an uppercase `X` check character, GeoNames
//! ids as a positive decimal integer without leading zeros.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PidScheme {
    Doi,
    Orcid,
    Ror,
    Geonames,
    Url,
}

impl PidScheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            PidScheme::Doi => "DOI",
            PidScheme::Orcid => "ORCID",
            PidScheme::Ror => "ROR",
            PidScheme::Geonames => "GEONAMES",
            PidScheme::Url => "URL",
        }
    }
}

impl fmt::Display for PidScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PidScheme {
    type Err = PidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "DOI" => Ok(PidScheme::Doi),
            "ORCID" => Ok(PidScheme::Orcid),
            "ROR" => Ok(PidScheme::Ror),
            "GEONAMES" => Ok(PidScheme::Geonames),
            "URL" => Ok(PidScheme::Url),
            _ => Err(PidError::Malformed(format!("unknown identifier scheme `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PidError {
    #[error("malformed identifier: {0}")]
    Malformed(String),
    #[error("ORCID checksum mismatch for `{value}` (expected check character `{expected}`)")]
    ChecksumFailure { value: String, expected: char },
    #[error("cannot determine identifier scheme of `{0}` without a hint")]
    AmbiguousScheme(String),
}

/// A typed, normalized persistent identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pid {
    scheme: PidScheme,
    value: String,
}

impl Pid {
    pub fn scheme(&self) -> PidScheme {
        self.scheme
    }

    pub fn value(&self) -> &str {
        &self.value
    }

    pub fn doi(text: &str) -> Result<Pid, PidError> {
        parse_pid(text, Some(PidScheme::Doi))
    }

    pub fn orcid(text: &str) -> Result<Pid, PidError> {
        parse_pid(text, Some(PidScheme::Orcid))
    }

    pub fn geonames(id: u64) -> Result<Pid, PidError> {
        parse_pid(&id.to_string(), Some(PidScheme::Geonames))
    }

    /// GeoNames id as an integer; `None` for other schemes.
    pub fn geonames_id(&self) -> Option<u64> {
        match self.scheme {
            PidScheme::Geonames => self.value.parse().ok(),
            _ => None,
        }
    }

    /// Resolver-style URL for the identifier.
    pub fn to_url(&self) -> String {
        match self.scheme {
            PidScheme::Doi => format!("https://doi.org/{}", self.value),
            PidScheme::Orcid => format!("https://orcid.org/{}", self.value),
            PidScheme::Ror => format!("https://ror.org/{}", self.value),
            PidScheme::Geonames => format!("{GEONAMES_URL_PREFIX}{}", self.value),
            PidScheme::Url => self.value.clone(),
        }
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value)
    }
}

pub const GEONAMES_URL_PREFIX: &str = "https://www.geonames.org/";

const DOI_PREFIXES: &[&str] = &["https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi:"];
const ORCID_PREFIXES: &[&str] = &["https://orcid.org/", "http://orcid.org/"];
const ROR_PREFIXES: &[&str] = &["https://ror.org/", "http://ror.org/"];
const GEONAMES_PREFIXES: &[&str] = &["https://www.geonames.org/", "http://www.geonames.org/", "https://sws.geonames.org/", "http://sws.geonames.org/"];

fn strip_any<'a>(text: &'a str, prefixes: &[&str]) -> Option<&'a str> {
    prefixes.iter().find_map(|p| {
        if text.len() >= p.len() && text[..p.len()].eq_ignore_ascii_case(p) {
            Some(&text[p.len()..])
        } else {
            None
        }
    })
}

/// Parses and normalizes an identifier, detecting its scheme unless a hint
/// is given.
pub fn parse_pid(text: &str, scheme_hint: Option<PidScheme>) -> Result<Pid, PidError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(PidError::Malformed("empty identifier".into()));
    }
    let scheme = match scheme_hint {
        Some(s) => s,
        None => detect_scheme(text)?,
    };
    let value = match scheme {
        PidScheme::Doi => normalize_doi(strip_any(text, DOI_PREFIXES).unwrap_or(text))?,
        PidScheme::Orcid => normalize_orcid(strip_any(text, ORCID_PREFIXES).unwrap_or(text))?,
        PidScheme::Ror => normalize_ror(strip_any(text, ROR_PREFIXES).unwrap_or(text))?,
        PidScheme::Geonames => normalize_geonames(strip_any(text, GEONAMES_PREFIXES).unwrap_or(text))?,
        PidScheme::Url => normalize_url(text)?,
    };
    Ok(Pid { scheme, value })
}

fn detect_scheme(text: &str) -> Result<PidScheme, PidError> {
    if strip_any(text, DOI_PREFIXES).is_some() || text.starts_with("10.") {
        return Ok(PidScheme::Doi);
    }
    if strip_any(text, ORCID_PREFIXES).is_some() || looks_like_hyphenated_orcid(text) {
        return Ok(PidScheme::Orcid);
    }
    if strip_any(text, ROR_PREFIXES).is_some() {
        return Ok(PidScheme::Ror);
    }
    if strip_any(text, GEONAMES_PREFIXES).is_some() {
        return Ok(PidScheme::Geonames);
    }
    if text.starts_with("http://") || text.starts_with("https://") {
        return Ok(PidScheme::Url);
    }
    if text.bytes().all(|b| b.is_ascii_digit()) {
        // a bare integer is a GeoNames id or an unhyphenated ORCID; only a hint decides
        return Err(PidError::AmbiguousScheme(text.to_string()));
    }
    Err(PidError::Malformed(format!("`{text}` matches no identifier scheme")))
}

fn looks_like_hyphenated_orcid(text: &str) -> bool {
    let b = text.as_bytes();
    b.len() == 19
        && b.iter().enumerate().all(|(i, c)| match i {
            4 | 9 | 14 => *c == b'-',
            18 => c.is_ascii_digit() || *c == b'X' || *c == b'x',
            _ => c.is_ascii_digit(),
        })
}

fn normalize_doi(text: &str) -> Result<String, PidError> {
    let lower = text.to_lowercase();
    let rest = lower
        .strip_prefix("10.")
        .ok_or_else(|| PidError::Malformed(format!("DOI `{text}` must start with `10.`")))?;
    let (registrant, suffix) = rest
        .split_once('/')
        .ok_or_else(|| PidError::Malformed(format!("DOI `{text}` lacks a `/suffix`")))?;
    if registrant.is_empty() || !registrant.bytes().all(|b| b.is_ascii_digit() || b == b'.') {
        return Err(PidError::Malformed(format!("DOI `{text}` has an invalid registrant")));
    }
    if suffix.is_empty() || suffix.chars().any(char::is_whitespace) {
        return Err(PidError::Malformed(format!("DOI `{text}` has an invalid suffix")));
    }
    Ok(lower)
}

/// ISO 7064 MOD 11-2 check character for the 15-digit ORCID base.
pub fn orcid_check_char(base_digits: &[u8]) -> char {
    let total = base_digits
        .iter()
        .fold(0u32, |acc, d| (acc + u32::from(*d)) * 2);
    match (12 - total % 11) % 11 {
        10 => 'X',
        n => char::from(b'0' + n as u8),
    }
}

fn normalize_orcid(text: &str) -> Result<String, PidError> {
    let compact: String = text.chars().filter(|c| *c != '-').collect();
    let hyphens_ok = text.len() == 16 || looks_like_hyphenated_orcid(text);
    if compact.len() != 16 || !hyphens_ok {
        return Err(PidError::Malformed(format!("ORCID `{text}` must have 16 characters")));
    }
    let (base, check) = compact.split_at(15);
    if !base.bytes().all(|b| b.is_ascii_digit()) {
        return Err(PidError::Malformed(format!("ORCID `{text}` must be numeric")));
    }
    let check = check.chars().next().unwrap_or('?').to_ascii_uppercase();
    if !(check.is_ascii_digit() || check == 'X') {
        return Err(PidError::Malformed(format!("ORCID `{text}` has an invalid check character")));
    }
    let digits: Vec<u8> = base.bytes().map(|b| b - b'0').collect();
    let expected = orcid_check_char(&digits);
    let canonical = format!("{}-{}-{}-{}{}", &base[0..4], &base[4..8], &base[8..12], &base[12..15], check);
    if expected != check {
        return Err(PidError::ChecksumFailure { value: canonical, expected });
    }
    Ok(canonical)
}

fn normalize_ror(text: &str) -> Result<String, PidError> {
    let lower = text.to_ascii_lowercase();
    let ok = lower.len() == 9
        && lower.starts_with('0')
        && lower.bytes().all(|b| b.is_ascii_digit() || b.is_ascii_lowercase());
    if !ok {
        return Err(PidError::Malformed(format!("ROR id `{text}` must be 9 characters starting with 0")));
    }
    Ok(lower)
}

fn normalize_geonames(text: &str) -> Result<String, PidError> {
    let trimmed = text.trim_end_matches('/');
    let id: u64 = trimmed
        .parse()
        .map_err(|_| PidError::Malformed(format!("GeoNames id `{text}` must be an integer")))?;
    if id == 0 || !trimmed.bytes().all(|b| b.is_ascii_digit()) {
        return Err(PidError::Malformed(format!("GeoNames id `{text}` must be positive")));
    }
    Ok(id.to_string())
}

fn normalize_url(text: &str) -> Result<String, PidError> {
    let rest = text
        .strip_prefix("https://")
        .or_else(|| text.strip_prefix("http://"))
        .ok_or_else(|| PidError::Malformed(format!("URL `{text}` must be absolute http(s)")))?;
    if rest.is_empty() || rest.starts_with('/') || text.chars().any(char::is_whitespace) {
        return Err(PidError::Malformed(format!("URL `{text}` has no host")));
    }
    Ok(text.to_string())
}

/// Scheme and value equality of two normalized identifiers.
pub fn pids_equal(a: &Pid, b: &Pid) -> bool {
    a.scheme == b.scheme && a.value == b.value
}
