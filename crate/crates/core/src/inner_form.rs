//! Integer invariants of inner forms `GL_m(D)`, hereditary orders, standard
//! towers, and jump bookkeeping.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galois::{Subfield, TameExtension, TameParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InnerForm {
    pub m: u32,
    pub d: u32,
    pub h: u32,
}

impl InnerForm {
    pub fn new(n: u32, m: u32, d: u32, h: u32) -> Result<Self> {
        if m == 0 || d == 0 || m * d != n {
            return Err(Error::InvalidInnerForm(format!(
                "m·d = {m}·{d} is not n = {n}"
            )));
        }
        if h.gcd(&d) != 1 {
            return Err(Error::InvalidInnerForm(format!(
                "gcd(h, d) = gcd({h}, {d}) is not 1"
            )));
        }
        Ok(InnerForm { m, d, h })
    }

    pub fn split(n: u32) -> Self {
        InnerForm { m: n, d: 1, h: 0 }
    }

    pub fn is_split(&self) -> bool {
        self.d == 1
    }
}

/// The standard tower `E ⊇ E_0 ⊋ E_1 ⊋ ... ⊋ E_t ⊋ F`, listed from `E_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tower {
    pub levels: Vec<Subfield>,
}

impl Tower {
    pub fn t(&self) -> usize {
        self.levels.len() - 1
    }

    /// `E_k` for `-1 <= k <= t + 1`.
    pub fn field(&self, k: i32, params: &TameParams) -> Subfield {
        if k < 0 {
            Subfield { e_rel: 1, f_rel: 1 }
        } else if k as usize >= self.levels.len() {
            Subfield {
                e_rel: params.e,
                f_rel: params.f,
            }
        } else {
            self.levels[k as usize]
        }
    }

    pub fn validate(&self, ext: &TameExtension) -> Result<()> {
        let params = ext.params();
        let first = self
            .levels
            .first()
            .ok_or_else(|| Error::InvalidTower("tower must contain E_0".into()))?;
        if first.e_rel != 1 {
            return Err(Error::InvalidTower("E/E_0 must be unramified".into()));
        }
        for k in self.levels.iter() {
            ext.check_subfield(*k)?;
        }
        for w in self.levels.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.e_rel % a.e_rel != 0 || b.f_rel % a.f_rel != 0 || b.n_rel() <= a.n_rel() {
                return Err(Error::InvalidTower(format!(
                    "({}, {}) -> ({}, {}) is not a strict divisibility step",
                    a.e_rel, a.f_rel, b.e_rel, b.f_rel
                )));
            }
        }
        if self.levels.last().unwrap().n_rel() >= params.n() {
            return Err(Error::InvalidTower(
                "E_t must be a proper extension of F".into(),
            ));
        }
        Ok(())
    }
}

/// Invariants attached to one intermediate field `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInvariants {
    pub field: Subfield,
    pub d_k: u32,
    pub m_k: u32,
    pub s_k: u32,
    pub r_k: u32,
    /// `e(𝔄_K / o_E)`.
    pub ea_k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderInvariants {
    pub s: u32,
    pub r: u32,
    pub ea: u32,
    /// `E_0, ..., E_t`.
    pub levels: Vec<FieldInvariants>,
}

pub fn field_invariants(params: &TameParams, form: &InnerForm, k: Subfield) -> FieldInvariants {
    let n_kf = params.n() / k.n_rel();
    let d_k = form.d / form.d.gcd(&n_kf);
    let m_k = form.m.gcd(&k.n_rel());
    let s_k = k.f_rel.gcd(&m_k);
    FieldInvariants {
        field: k,
        d_k,
        m_k,
        s_k,
        r_k: k.e_rel / d_k.gcd(&k.e_rel),
        ea_k: k.f_rel / s_k,
    }
}

pub fn order_invariants(
    params: &TameParams,
    form: &InnerForm,
    tower: &Tower,
) -> Result<OrderInvariants> {
    let n = params.n();
    if form.m * form.d != n || form.h.gcd(&form.d) != 1 {
        return Err(Error::InvalidInnerForm(format!(
            "(m, d, h) = ({}, {}, {}) for n = {n}",
            form.m, form.d, form.h
        )));
    }
    let s = params.f.gcd(&form.m);
    let ea = params.f / s;
    let levels: Vec<_> = tower
        .levels
        .iter()
        .map(|k| field_invariants(params, form, *k))
        .collect();
    if let Some(bad) = levels.iter().find(|l| ea % l.ea_k != 0) {
        return Err(Error::Internal(format!(
            "e(A_K/o_E) = {} does not divide {ea}",
            bad.ea_k
        )));
    }
    Ok(OrderInvariants {
        s,
        r: params.e / form.d.gcd(&params.e),
        ea,
        levels,
    })
}

impl OrderInvariants {
    /// `e(𝔄_{E_k}/o_E)` for `-1 <= k <= t + 1`.
    pub fn ea_at(&self, k: i32) -> u32 {
        if k < 0 {
            1
        } else if k as usize >= self.levels.len() {
            self.ea
        } else {
            self.levels[k as usize].ea_k
        }
    }
}

/// Which double cosets a level contributes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelCase {
    /// No contribution.
    Empty,
    /// Classes inside `Γ_{E_{k+1}}`.
    Full,
    /// Classes inside `Γ_{E_{k+1}}` but not `Γ_{E_k}`.
    Difference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub k: u32,
    pub jump: u64,
    pub case: LevelCase,
    /// Required residue of `j` modulo `e(𝔄/o_E)`.
    pub target: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpLevels {
    pub modulus: u32,
    pub levels: Vec<Level>,
    /// Index `k` with `f(E/E_k)` odd and `f(E/E_{k+1})` even.
    pub r_index: Option<i32>,
    /// Index `k` with `e(𝔄_{E_k})` odd and `e(𝔄_{E_{k+1}})` even.
    pub q_index: Option<i32>,
}

impl JumpLevels {
    /// `R <= Q`, with an absent index read as infinity.
    pub fn r_le_q(&self) -> bool {
        match (self.r_index, self.q_index) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(r), Some(q)) => r <= q,
        }
    }
}

pub fn validate_jumps(jumps: &[u64], tower: &Tower) -> Result<()> {
    if jumps.len() != tower.levels.len() {
        return Err(Error::InvalidJumps(format!(
            "{} jumps for {} tower levels",
            jumps.len(),
            tower.levels.len()
        )));
    }
    if jumps.first() == Some(&0) {
        return Err(Error::InvalidJumps("jumps must be positive".into()));
    }
    if jumps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidJumps(
            "jumps must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn jump_levels(
    params: &TameParams,
    form: &InnerForm,
    tower: &Tower,
    jumps: &[u64],
) -> Result<JumpLevels> {
    validate_jumps(jumps, tower)?;
    let inv = order_invariants(params, form, tower)?;
    let ea = inv.ea;
    let t = tower.t() as i32;
    let mut levels = Vec::with_capacity(jumps.len());
    for (k, &a) in jumps.iter().enumerate() {
        let (here, next) = (
            inv.ea_at(k as i32) % 2 == 1,
            inv.ea_at(k as i32 + 1) % 2 == 1,
        );
        let odd = a % 2 == 1;
        let case = if odd && next {
            LevelCase::Empty
        } else if odd && here {
            LevelCase::Full
        } else {
            LevelCase::Difference
        };
        let target = if !odd || case == LevelCase::Empty {
            0
        } else {
            if ea % 2 == 1 {
                return Err(Error::Internal(format!(
                    "level {k}: odd jump with odd e(A/o_E) = {ea}"
                )));
            }
            ((form.h as u64 * (ea / 2) as u64) % ea as u64) as u32
        };
        levels.push(Level {
            k: k as u32,
            jump: a,
            case,
            target,
        });
    }
    let f_rel = |k: i32| tower.field(k, params).f_rel;
    let r_index = (-1..=t).find(|&k| f_rel(k) % 2 == 1 && f_rel(k + 1) % 2 == 0);
    let q_index = (-1..=t).find(|&k| inv.ea_at(k) % 2 == 1 && inv.ea_at(k + 1) % 2 == 0);
    let out = JumpLevels {
        modulus: ea,
        levels,
        r_index,
        q_index,
    };
    if !out.r_le_q() {
        return Err(Error::Internal(format!(
            "R = {r_index:?} exceeds Q = {q_index:?}"
        )));
    }
    Ok(out)
}
