//! Fixture files, the on-disk cache and the LMFDB client.

mod cache;
mod lmfdb;
mod store;

pub use cache::{sha256_hex, Cache, CacheEntry, CacheManifest, CACHE_ENV};
pub use lmfdb::{parse_lmfdb_forms, parse_poly_expr, LmfdbClient, LmfdbQuery, DEFAULT_BASE_URL, LMFDB_SCHEMA};
pub use store::{FixtureStore, FIXTURES_ENV};

use serde::{Deserialize, Serialize};

/// JSON layout of a field fixture. Rationals are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub label: String,
    /// Coefficients c0..cd.
    pub min_poly: Vec<String>,
    /// Row i gives the i-th basis element in the power basis of α.
    pub integral_basis: Vec<Vec<String>>,
    pub disc: String,
    #[serde(rename = "h_K")]
    pub h_k: u64,
    pub fundamental_units: Vec<Vec<String>>,
    pub tower_units: Vec<Vec<String>>,
    pub provenance: String,
    pub notes: String,
}

/// One Hecke eigenvalue a_𝔮 as a vector in the power basis of β.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenvalueEntry {
    pub p: u64,
    pub f: usize,
    pub factor_index: usize,
    pub aq: Vec<String>,
}

/// A Galois orbit of newforms. `hecke_poly` may be null for summary records
/// that only carry the orbit size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewformEntry {
    pub field_label: String,
    pub level_norm: u64,
    pub label: String,
    pub hecke_poly: Option<Vec<String>>,
    pub hecke_degree: usize,
    pub eigenvalues: Vec<EigenvalueEntry>,
}

/// All newforms of a given level over one field, with provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewformTable {
    pub field_label: String,
    pub level_norm: u64,
    pub schema: String,
    pub provenance: String,
    pub forms: Vec<NewformEntry>,
}

/// Pretty JSON exactly as stored in fixture files.
pub fn to_fixture_json<T: Serialize>(value: &T) -> crate::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
