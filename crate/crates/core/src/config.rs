//! Run configurations: JSON schema, parsing and validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{Subfield, TameExtension, TameParams};
use crate::inner_form::{validate_jumps, InnerForm, Tower};

pub const SCHEMA_VERSION: u32 = 1;

/// A validated configuration: extension, tower, jumps and inner form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JumpConfig {
    pub params: TameParams,
    pub tower: Tower,
    pub jumps: Vec<u64>,
    pub form: InnerForm,
}

impl JumpConfig {
    pub fn n(&self) -> u32 {
        self.params.n()
    }

    /// Checks everything that depends on the extension.
    pub fn validate(&self, ext: &TameExtension) -> Result<()> {
        if ext.params() != self.params {
            return Err(Error::Internal(
                "extension does not match configuration".into(),
            ));
        }
        self.tower.validate(ext)?;
        validate_jumps(&self.jumps, &self.tower)?;
        InnerForm::new(self.n(), self.form.m, self.form.d, self.form.h)?;
        Ok(())
    }

    /// The same data with the split inner form.
    pub fn split(&self) -> JumpConfig {
        JumpConfig {
            form: InnerForm::split(self.n()),
            ..self.clone()
        }
    }
}

/// Which checks a run performs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct Flags {
    pub main_theorem: bool,
    pub zeta_conditions: bool,
    pub functoriality: bool,
    pub parity: bool,
    pub dual_path: bool,
    /// Negative control: corrupts one ζ-value before checking.
    pub mutate_zeta: bool,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            main_theorem: true,
            zeta_conditions: true,
            functoriality: true,
            parity: true,
            dual_path: true,
            mutate_zeta: false,
        }
    }
}

/// The on-disk configuration document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigDoc {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub q: u64,
    pub e: u32,
    pub f: u32,
    #[serde(default)]
    pub z_ef: u128,
    /// `(e(E/E_k), f(E/E_k))` for `k = 0..=t`.
    pub tower: Vec<(u32, u32)>,
    pub jumps: Vec<u64>,
    pub m: u32,
    pub d: u32,
    #[serde(default)]
    pub h: u32,
    #[serde(default)]
    pub flags: Flags,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub config: JumpConfig,
    pub flags: Flags,
}

impl RunConfigDoc {
    pub fn from_config(c: &JumpConfig, flags: Flags) -> Self {
        RunConfigDoc {
            schema: SCHEMA_VERSION,
            q: c.params.q,
            e: c.params.e,
            f: c.params.f,
            z_ef: c.params.z_ef,
            tower: c.tower.levels.iter().map(|k| (k.e_rel, k.f_rel)).collect(),
            jumps: c.jumps.clone(),
            m: c.form.m,
            d: c.form.d,
            h: c.form.h,
            flags,
        }
    }

    /// Validates the document, collecting every violated rule.
    pub fn validate(&self) -> Result<(RunConfig, TameExtension)> {
        let mut errors = Vec::new();
        if self.schema != SCHEMA_VERSION {
            errors.push(format!("unsupported schema version {}", self.schema));
        }
        let params = match TameParams::new(self.q, self.e, self.f, self.z_ef) {
            Ok(p) => Some(p),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        };
        let n = self.e * self.f;
        let form = match InnerForm::new(n, self.m, self.d, self.h) {
            Ok(f) => Some(f),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        };
        let tower = Tower {
            levels: self
                .tower
                .iter()
                .map(|&(e_rel, f_rel)| Subfield { e_rel, f_rel })
                .collect(),
        };
        if let Err(e) = validate_jumps(&self.jumps, &tower) {
            errors.push(e.to_string());
        }
        let mut ext = None;
        if let Some(p) = params {
            match TameExtension::new(p) {
                Ok(x) => {
                    if let Err(e) = tower.validate(&x) {
                        errors.push(e.to_string());
                    }
                    ext = Some(x);
                }
                Err(e) => errors.push(e.to_string()),
            }
        }
        if !errors.is_empty() {
            return Err(Error::Config(errors));
        }
        let config = JumpConfig {
            params: params.unwrap(),
            tower,
            jumps: self.jumps.clone(),
            form: form.unwrap(),
        };
        Ok((
            RunConfig {
                config,
                flags: self.flags.clone(),
            },
            ext.unwrap(),
        ))
    }
}

pub fn parse_config(text: &str) -> Result<(RunConfig, TameExtension)> {
    let doc: RunConfigDoc = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("malformed JSON: {e}")]))?;
    doc.validate()
}
