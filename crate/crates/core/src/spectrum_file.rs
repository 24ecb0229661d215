//! TOML spectrum files:
//!
//! ```toml
//! n = 30
//!
//! [[singular_values]]
//! value = 1.0
//! count = 3
//!
//! [[singular_values]]
//! value = 2.23606797749979
//! count = 9
//! ```
//!
//! Entries must have strictly increasing values and their counts must sum
//! to less than `n`.

use serde::{Deserialize, Serialize};

use crate::bounds::Spectrum;
use crate::error::{usage, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularValueEntry {
    pub value: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub n: u64,
    pub singular_values: Vec<SingularValueEntry>,
}

impl SpectrumFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: SpectrumFile = toml::from_str(text).map_err(|e| usage(format!("invalid spectrum file: {e}")))?;
        file.to_spectrum()?;
        Ok(file)
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        if let Some(w) = self.singular_values.windows(2).find(|w| !(w[0].value < w[1].value)) {
            return Err(usage(format!(
                "singular values must increase strictly, got {} then {}",
                w[0].value, w[1].value
            )));
        }
        Spectrum::new(self.singular_values.iter().map(|e| (e.value, e.count)), self.n)
    }

    pub fn from_spectrum(spec: &Spectrum) -> Self {
        SpectrumFile {
            n: spec.n(),
            singular_values: spec
                .groups()
                .iter()
                .map(|&(value, count)| SingularValueEntry { value, count })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spectrum files always serialize")
    }
}
