//! Finite symplectic modules as multisets of standard modules.
//!
//! A component is a pair (level, double coset); the standard module of the
//! coset is the residue field of `E_g` with the root character acting.

use serde::{Deserialize, Serialize};

use crate::config::JumpConfig;
use crate::error::Result;
use crate::galois::{DoubleCoset, Subfield, Symmetry, TameExtension};
use crate::inner_form::{jump_levels, InnerForm, LevelCase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// The inner form `GL_m(D)`.
    A,
    /// The split form `GL_n(F)`.
    M,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FineComponent {
    pub level: u32,
    pub coset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleDecomposition {
    pub side: Side,
    /// Sorted by `(level, coset)`.
    pub components: Vec<FineComponent>,
    /// Components contributed by a `Full` level that lie inside `Γ_{E_k}`.
    pub inner_flags: Vec<FineComponent>,
}

/// Nontrivial classes with `j ≡ h·j' (mod f/s)`.
pub fn standard_graded_piece(ext: &TameExtension, form: &InnerForm, j_prime: u32) -> Vec<usize> {
    let f = ext.params().f;
    let modulus = f / num_integer::gcd(f, form.m);
    let target = ((form.h as u64 * j_prime as u64) % modulus as u64) as u32;
    ext.cosets
        .iter()
        .filter(|c| c.j % modulus == target)
        .map(|c| c.id)
        .collect()
}

pub fn finite_module(
    ext: &TameExtension,
    cfg: &JumpConfig,
    side: Side,
) -> Result<ModuleDecomposition> {
    cfg.validate(ext)?;
    let form = match side {
        Side::A => cfg.form,
        Side::M => InnerForm::split(cfg.n()),
    };
    let params = ext.params();
    let levels = jump_levels(&params, &form, &cfg.tower, &cfg.jumps)?;
    let mut components = Vec::new();
    let mut inner_flags = Vec::new();
    for lv in &levels.levels {
        if lv.case == LevelCase::Empty {
            continue;
        }
        let k = lv.k as i32;
        let outer = cfg.tower.field(k + 1, &params);
        let inner = cfg.tower.field(k, &params);
        for c in &ext.cosets {
            if c.j % levels.modulus != lv.target || !ext.subfield_membership(c, outer) {
                continue;
            }
            let in_inner = k >= 0 && ext.subfield_membership(c, inner);
            let comp = FineComponent {
                level: lv.k,
                coset: c.id,
            };
            match (lv.case, in_inner) {
                (LevelCase::Difference, true) => {}
                (LevelCase::Full, true) => {
                    inner_flags.push(comp);
                    components.push(comp);
                }
                _ => components.push(comp),
            }
        }
    }
    components.sort();
    Ok(ModuleDecomposition {
        side,
        components,
        inner_flags,
    })
}

impl ModuleDecomposition {
    pub fn empty(side: Side) -> Self {
        ModuleDecomposition {
            side,
            components: Vec::new(),
            inner_flags: Vec::new(),
        }
    }

    pub fn multiplicity(&self, coset: usize) -> u32 {
        self.components.iter().filter(|c| c.coset == coset).count() as u32
    }

    /// Multiplicity of every class, indexed by class id.
    pub fn multiplicities(&self, ext: &TameExtension) -> Vec<u32> {
        let mut out = vec![0; ext.cosets.len()];
        for c in &self.components {
            out[c.coset] += 1;
        }
        out
    }

    pub fn isotypic_component(&self, coset: usize) -> Vec<FineComponent> {
        self.components
            .iter()
            .filter(|c| c.coset == coset)
            .copied()
            .collect()
    }

    /// `(sym-ram, sym-unram)` parts.
    pub fn symmetric_parts(&self, ext: &TameExtension) -> (Vec<FineComponent>, Vec<FineComponent>) {
        let pick = |s: Symmetry| {
            self.components
                .iter()
                .filter(|c| ext.cosets[c.coset].symmetry == s)
                .copied()
                .collect::<Vec<_>>()
        };
        (
            pick(Symmetry::SymmetricRamified),
            pick(Symmetry::SymmetricUnramified),
        )
    }

    /// The part supported on classes inside `Γ_K`.
    pub fn restrict_to(&self, ext: &TameExtension, k: Subfield) -> ModuleDecomposition {
        let keep = |c: &FineComponent| ext.subfield_membership(&ext.cosets[c.coset], k);
        ModuleDecomposition {
            side: self.side,
            components: self
                .components
                .iter()
                .filter(|c| keep(c))
                .copied()
                .collect(),
            inner_flags: self
                .inner_flags
                .iter()
                .filter(|c| keep(c))
                .copied()
                .collect(),
        }
    }

    /// Asymmetric classes pair with their inverses at equal multiplicity.
    pub fn pairing_balanced(&self, ext: &TameExtension) -> bool {
        let mult = self.multiplicities(ext);
        ext.cosets
            .iter()
            .all(|c: &DoubleCoset| mult[c.id] == mult[c.inverse])
    }
}
