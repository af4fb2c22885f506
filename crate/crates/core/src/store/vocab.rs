//! Property and class identifiers the store interprets.

pub const PAPER: &str = "Paper";
pub const CONTRIBUTION: &str = "Contribution";
pub const COMPARISON: &str = "Comparison";
pub const AUTHOR: &str = "Author";
pub const PROPERTY: &str = "Property";
pub const DC_LOCATION: &str = "DCLocation";

pub const DOI: &str = "doi";
pub const PUBLISHER: &str = "publisher";
pub const PUBLICATION_YEAR: &str = "publicationYear";
pub const HAS_CONTRIBUTION: &str = "hasContribution";
pub const DESCRIPTION: &str = "description";
pub const RESEARCH_FIELD: &str = "researchField";
pub const CREATOR: &str = "creator";
pub const ORCID: &str = "orcid";
pub const COMPARES: &str = "compareContribution";
pub const COMPARE_PROPERTY: &str = "compareProperty";
pub const SAME_AS: &str = "sameAs";
pub const COUNTRY_CODE: &str = "countryCode";

/// Contribution properties of the reproductive-number comparison.
pub const R0: &str = "P_R0";
pub const LOCATION: &str = "P_LOCATION";
pub const CONFIDENCE_INTERVAL: &str = "P_CI";
pub const LOWER_BOUND: &str = "lowerBound";
pub const UPPER_BOUND: &str = "upperBound";
pub const LEVEL: &str = "level";
