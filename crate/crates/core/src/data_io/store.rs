use std::fs;
use std::path::{Path, PathBuf};

use crate::data_io::{FieldDescriptor, NewformTable};
use crate::error::{Error, Result};
use crate::numfield::NumberField;

/// Bundled field and newform fixtures under one root:
/// `fields/<label>.json` and `newforms/<label>.json`.
#[derive(Clone, Debug)]
pub struct FixtureStore {
    root: PathBuf,
}

/// Environment variable overriding the fixture root.
pub const FIXTURES_ENV: &str = "FERMAT_FIXTURES";

impl FixtureStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FixtureStore { root: root.into() }
    }

    /// `$FERMAT_FIXTURES`, or the fixtures shipped with this crate.
    pub fn bundled() -> Self {
        match std::env::var_os(FIXTURES_ENV) {
            Some(p) => Self::new(p),
            None => Self::new(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn field_path(&self, label: &str) -> Result<PathBuf> {
        Ok(self.root.join("fields").join(format!("{}.json", check_label(label)?)))
    }

    pub fn newform_path(&self, label: &str) -> Result<PathBuf> {
        Ok(self.root.join("newforms").join(format!("{}.json", check_label(label)?)))
    }

    /// Labels of all bundled fields ordered by degree, then discriminant.
    pub fn field_labels(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("fields"))? {
            let name = entry?.file_name().to_string_lossy().into_owned();
            if let Some(label) = name.strip_suffix(".json") {
                out.push(label.to_string());
            }
        }
        out.sort_by_key(|l| label_key(l));
        Ok(out)
    }

    pub fn read_field_text(&self, label: &str) -> Result<String> {
        let path = self.field_path(label)?;
        fs::read_to_string(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::DataGap(format!("no field fixture for {label} ({})", path.display())),
            _ => Error::Io(e),
        })
    }

    pub fn field_descriptor(&self, label: &str) -> Result<FieldDescriptor> {
        let text = self.read_field_text(label)?;
        let desc: FieldDescriptor =
            serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{label}: {e}")))?;
        if desc.label != label {
            return Err(Error::Invalid(format!("fixture {label} declares label {}", desc.label)));
        }
        Ok(desc)
    }

    /// Loads and fully verifies a field.
    pub fn load_field(&self, label: &str) -> Result<NumberField> {
        NumberField::from_descriptor(&self.field_descriptor(label)?)
    }

    pub fn read_newform_text(&self, label: &str) -> Result<String> {
        let path = self.newform_path(label)?;
        fs::read_to_string(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => {
                Error::DataGap(format!("no newform data for {label} ({})", path.display()))
            }
            _ => Error::Io(e),
        })
    }

    /// The newforms of level norm `level_norm` over the field.
    pub fn newform_table(&self, label: &str, level_norm: u64) -> Result<NewformTable> {
        let text = self.read_newform_text(label)?;
        let table: NewformTable =
            serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("newforms of {label}: {e}")))?;
        if table.field_label != label || table.level_norm != level_norm {
            return Err(Error::DataGap(format!(
                "newform data for {label} covers level norm {}, not {level_norm}",
                table.level_norm
            )));
        }
        Ok(table)
    }

    pub fn has_newforms(&self, label: &str) -> bool {
        self.newform_path(label).map(|p| p.exists()).unwrap_or(false)
    }
}

/// Field labels are d.r.D.i; anything else could escape the fixture root.
pub(crate) fn check_label(label: &str) -> Result<&str> {
    let ok = !label.is_empty()
        && label.split('.').count() == 4
        && label.split('.').all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()));
    if ok {
        Ok(label)
    } else {
        Err(Error::Invalid(format!("malformed field label {label:?}")))
    }
}

fn label_key(label: &str) -> (u64, u128, String) {
    let parts: Vec<&str> = label.split('.').collect();
    let d = parts.first().and_then(|p| p.parse().ok()).unwrap_or(u64::MAX);
    let disc = parts.get(2).and_then(|p| p.parse().ok()).unwrap_or(u128::MAX);
    (d, disc, label.to_string())
}
