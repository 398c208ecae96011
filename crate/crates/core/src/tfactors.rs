//! t-factors of finite symplectic modules over the cyclic groups `μ` and `ϖ`.
//!
//! Two independent evaluations are provided: a generic one that restricts
//! each standard module to the cyclic group, splits it into Frobenius classes
//! of characters and applies the hyperbolic/anisotropic rules, and a closed
//! form indexed by the symmetry type of the double coset.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{
    checked_pow, multiplicative_order, signature_closed_form, RootGroup, RootOfUnity,
};
use crate::error::{Error, Result};
use crate::galois::{DoubleCoset, Symmetry, TameExtension};
use crate::modules::ModuleDecomposition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    /// `μ_E/μ_F`, generated by the canonical generator of `μ_E`.
    Mu,
    /// The image of `ϖ_E`.
    Pi,
}

/// `(t⁰, t¹(γ))` for the canonical generator `γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TFactor {
    pub t0: i8,
    pub t1: i8,
}

impl TFactor {
    pub const TRIVIAL: TFactor = TFactor { t0: 1, t1: 1 };

    pub fn new(t0: i8, t1: i8) -> Self {
        TFactor { t0, t1 }
    }

    pub fn t(self) -> i8 {
        self.t0 * self.t1
    }

    pub fn mul(self, o: TFactor) -> TFactor {
        TFactor {
            t0: self.t0 * o.t0,
            t1: self.t1 * o.t1,
        }
    }

    pub fn pow(self, k: u32) -> TFactor {
        if k % 2 == 0 {
            TFactor::TRIVIAL
        } else {
            self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SymplecticClass {
    TrivialAction,
    Hyperbolic {
        alpha: RootOfUnity,
        partner: RootOfUnity,
    },
    Anisotropic {
        alpha: RootOfUnity,
    },
}

/// `[F_p(q) : F_p]`.
fn log_p_q(g: &RootGroup) -> u32 {
    crate::cyclotomic::prime_power(g.q).unwrap().1
}

/// `[F_p[α] : F_p]`.
fn fp_degree(g: &RootGroup, alpha: RootOfUnity) -> u32 {
    multiplicative_order(g.p as u128, g.element_order(alpha)).unwrap() as u32
}

fn frobenius_class_rep(g: &RootGroup, alpha: RootOfUnity, k: u32) -> RootOfUnity {
    let mut best = alpha;
    let mut x = alpha;
    for _ in 1..k {
        x = g.pow_u(x, g.p as u128);
        best = best.min(x);
    }
    best
}

/// Symbol of `α` in the kernel of the norm from `F_p[α]` to its index-2 subfield.
fn kernel_symbol(g: &RootGroup, alpha: RootOfUnity, k: u32) -> Result<i8> {
    if g.p == 2 {
        return Ok(1);
    }
    let half = checked_pow(g.p as u128, k / 2).ok_or(Error::FieldTooLarge { p: g.p, k })?;
    let kernel_order = half + 1;
    if kernel_order % g.element_order(alpha) != 0 || k % 2 == 1 {
        return Err(Error::Pairing(format!(
            "element {} is not in a norm kernel",
            alpha.exponent
        )));
    }
    Ok(if g.pow_u(alpha, kernel_order / 2).is_one() {
        1
    } else {
        -1
    })
}

/// Sign of multiplication by `α` on the residue field of `E_g` (`q^{ft}` elements).
pub fn residue_sign(ext: &TameExtension, dc: &DoubleCoset, alpha: RootOfUnity) -> i8 {
    let g = ext.group();
    if g.p == 2 {
        return 1;
    }
    let size = g.q_pow(ext.params().f * dc.t);
    g.multiplication_signature_on(alpha, size)
}

/// `λ(γ)` for the canonical generator `γ` of `Γ`.
pub fn generator_value(ext: &TameExtension, dc: &DoubleCoset, gamma: Gamma) -> RootOfUnity {
    let lam = ext.root_character(dc);
    match gamma {
        Gamma::Mu => lam.on_mu(&ext.model, ext.model.zeta_e()),
        Gamma::Pi => lam.on_pi,
    }
}

/// Multiset of characters of `Γ`, pooled by Frobenius class.
#[derive(Clone, Debug, Default)]
pub struct CharacterPool {
    /// class representative -> (degree of `F_p[α]`, number of copies of `V_α`)
    classes: BTreeMap<RootOfUnity, (u32, u128)>,
}

impl CharacterPool {
    /// Adds `mult` copies of `U_g` restricted to `Γ`, evaluated at `γ^power`.
    pub fn add_standard(
        &mut self,
        ext: &TameExtension,
        dc: &DoubleCoset,
        gamma: Gamma,
        power: u128,
        mult: u32,
    ) {
        let g = ext.group();
        let alpha = g.pow_u(generator_value(ext, dc, gamma), power);
        let dim = ext.params().f * dc.t * log_p_q(g);
        let k = fp_degree(g, alpha);
        debug_assert_eq!(dim % k, 0);
        self.add(g, alpha, (dim / k) as u128 * mult as u128);
    }

    pub fn add(&mut self, g: &RootGroup, alpha: RootOfUnity, copies: u128) {
        if copies == 0 {
            return;
        }
        let k = fp_degree(g, alpha);
        let rep = frobenius_class_rep(g, alpha, k);
        self.classes.entry(rep).or_insert((k, 0)).1 += copies;
    }

    pub fn classify(&self, g: &RootGroup) -> Result<Vec<(SymplecticClass, u128)>> {
        let mut out = Vec::new();
        for (&alpha, &(k, count)) in &self.classes {
            if alpha.is_one() {
                out.push((SymplecticClass::TrivialAction, count));
                continue;
            }
            let inv = g.inv(alpha);
            let inv_rep = frobenius_class_rep(g, inv, k);
            if inv_rep == alpha {
                if g.mul(alpha, alpha).is_one() {
                    if count % 2 == 1 {
                        return Err(Error::Pairing(format!(
                            "odd multiplicity {count} of a character of order 2"
                        )));
                    }
                    out.push((
                        SymplecticClass::Hyperbolic {
                            alpha,
                            partner: alpha,
                        },
                        count / 2,
                    ));
                } else {
                    out.push((SymplecticClass::Anisotropic { alpha }, count));
                }
            } else if alpha < inv_rep {
                let partner = self.classes.get(&inv_rep).map_or(0, |x| x.1);
                if partner != count {
                    return Err(Error::Pairing(format!(
                        "class {} has {count} copies but its inverse has {partner}",
                        alpha.exponent
                    )));
                }
                out.push((
                    SymplecticClass::Hyperbolic {
                        alpha,
                        partner: inv_rep,
                    },
                    count,
                ));
            }
        }
        Ok(out)
    }

    pub fn tfactor(&self, g: &RootGroup) -> Result<TFactor> {
        let mut t = TFactor::TRIVIAL;
        for (class, count) in self.classify(g)? {
            let odd = count % 2 == 1;
            match class {
                SymplecticClass::TrivialAction => {}
                SymplecticClass::Hyperbolic { alpha, .. } => {
                    if odd && g.p != 2 {
                        let k = fp_degree(g, alpha);
                        let size = checked_pow(g.p as u128, k)
                            .ok_or(Error::FieldTooLarge { p: g.p, k })?;
                        t.t1 *= signature_closed_form(g.element_order(alpha), size);
                    }
                }
                SymplecticClass::Anisotropic { alpha } => {
                    if odd {
                        t.t0 = -t.t0;
                        t.t1 *= kernel_symbol(g, alpha, fp_degree(g, alpha))?;
                    }
                }
            }
        }
        Ok(t)
    }
}

/// Restriction of `mult` copies of each listed standard module to `Γ`.
pub fn restrict_and_classify(
    ext: &TameExtension,
    parts: &[(usize, u32)],
    gamma: Gamma,
) -> Result<Vec<(SymplecticClass, u128)>> {
    let mut pool = CharacterPool::default();
    for &(id, mult) in parts {
        pool.add_standard(ext, &ext.cosets[id], gamma, 1, mult);
    }
    pool.classify(ext.group())
}

/// The defined value for the class `(0, -1)`: `x -> (x/μ_E)` on `μ`, and the
/// fixed value `1` on `ϖ`.
fn sigma_half_value(ext: &TameExtension, gamma: Gamma, power: u128) -> TFactor {
    match gamma {
        Gamma::Mu => {
            let g = ext.group();
            let x = g.pow_u(ext.model.zeta_e(), power);
            TFactor::new(1, g.square_class_symbol(x, ext.model.mu_e()).unwrap())
        }
        Gamma::Pi => TFactor::TRIVIAL,
    }
}

/// t-factors from the definitions, evaluated at `γ^power`.
pub fn t_factors_generic_at(
    ext: &TameExtension,
    parts: &[(usize, u32)],
    gamma: Gamma,
    power: u128,
) -> Result<TFactor> {
    let mut pool = CharacterPool::default();
    let mut t = TFactor::TRIVIAL;
    for &(id, mult) in parts {
        let dc = &ext.cosets[id];
        if dc.is_sigma_half {
            t = t.mul(sigma_half_value(ext, gamma, power).pow(mult));
        } else {
            pool.add_standard(ext, dc, gamma, power, mult);
        }
    }
    Ok(t.mul(pool.tfactor(ext.group())?))
}

pub fn t_factors_generic(
    ext: &TameExtension,
    parts: &[(usize, u32)],
    gamma: Gamma,
) -> Result<TFactor> {
    t_factors_generic_at(ext, parts, gamma, 1)
}

/// The table value for one symmetric class, or for an asymmetric class
/// together with its inverse.
pub fn t_factors_closed_form(
    ext: &TameExtension,
    dc: &DoubleCoset,
    gamma: Gamma,
) -> Result<TFactor> {
    let g = ext.group();
    let q = ext.params().q as u128;
    let f = ext.params().f;
    if dc.is_sigma_half {
        return Ok(sigma_half_value(ext, gamma, 1));
    }
    let u = dc.u();
    let t1 = |t: TFactor| if g.p == 2 { TFactor::new(t.t0, 1) } else { t };
    Ok(t1(match (dc.symmetry, gamma) {
        (Symmetry::Asymmetric, Gamma::Mu) => {
            let z = ext.model.zeta_e();
            let alpha = g.pow_u(z, ext.model.frob_minus_one(dc.j as u128));
            TFactor::new(1, residue_sign(ext, dc, alpha))
        }
        (Symmetry::Asymmetric, Gamma::Pi) => TFactor::new(1, residue_sign(ext, dc, u)),
        (Symmetry::SymmetricRamified, Gamma::Mu) => TFactor::TRIVIAL,
        (Symmetry::SymmetricRamified, Gamma::Pi) => {
            TFactor::new(-1, kernel_symbol(g, u, fp_degree(g, u))?)
        }
        (Symmetry::SymmetricUnramified, Gamma::Mu) => {
            let half = g.q_pow(f / 2);
            let z = ext.model.zeta_e();
            let x = g.div(z, g.frob(z, (f / 2) as u128));
            let h = g.subgroup(half + 1)?;
            TFactor::new(-1, g.square_class_symbol(x, h)?)
        }
        (Symmetry::SymmetricUnramified, Gamma::Pi) => {
            if u.is_one() {
                TFactor::TRIVIAL
            } else if Some(u) == g.minus_one() {
                let half = (q.pow(f / 2) - 1) / 2;
                TFactor::new(1, if half % 2 == 0 { 1 } else { -1 })
            } else {
                TFactor::new(-1, kernel_symbol(g, u, fp_degree(g, u))?)
            }
        }
    }))
}

/// The extended `t¹` of a class on `μ_{E_g}`, evaluated at `w`. For
/// asymmetric classes `a` picks the Frobenius lift `q^a` (`a ≡ j mod f`).
pub fn extended_t1_with_lift(
    ext: &TameExtension,
    dc: &DoubleCoset,
    w: RootOfUnity,
    a: u128,
) -> Result<i8> {
    let g = ext.group();
    if g.p == 2 {
        return Ok(1);
    }
    let mu_g = ext.mu_g(dc);
    if !g.contains(mu_g, w) {
        return Err(Error::NotInSubgroup {
            exponent: w.exponent,
            order: mu_g.order,
        });
    }
    if dc.is_sigma_half {
        return g.square_class_symbol(w, ext.model.mu_e());
    }
    match dc.symmetry {
        Symmetry::Asymmetric => {
            let root = g.div(w, g.frob(w, a));
            Ok(residue_sign(ext, dc, root))
        }
        _ => {
            let half = ext.params().f * dc.t / 2;
            let x = g.div(w, g.frob(w, half as u128));
            let h = g.subgroup(g.q_pow(half) + 1)?;
            g.square_class_symbol(x, h)
        }
    }
}

pub fn extended_t1(ext: &TameExtension, dc: &DoubleCoset, w: RootOfUnity) -> Result<i8> {
    extended_t1_with_lift(ext, dc, w, dc.j as u128)
}

/// Multiplicity list `(class, mult)` of a decomposition, nonzero entries only.
pub fn parts_of(ext: &TameExtension, dec: &ModuleDecomposition) -> Vec<(usize, u32)> {
    dec.multiplicities(ext)
        .into_iter()
        .enumerate()
        .filter(|(_, m)| *m > 0)
        .collect()
}

/// Closed-form product over a decomposition.
pub fn closed_form_of_parts(
    ext: &TameExtension,
    parts: &[(usize, u32)],
    gamma: Gamma,
) -> Result<TFactor> {
    let mut mult = vec![0u32; ext.cosets.len()];
    for &(id, m) in parts {
        mult[id] += m;
    }
    let mut t = TFactor::TRIVIAL;
    for dc in &ext.cosets {
        let m = mult[dc.id];
        if dc.symmetry == Symmetry::Asymmetric {
            if m != mult[dc.inverse] {
                return Err(Error::Pairing(format!(
                    "class {} has multiplicity {m}, its inverse {}",
                    dc.id, mult[dc.inverse]
                )));
            }
            if dc.id > dc.inverse {
                continue;
            }
        }
        if m % 2 == 1 {
            t = t.mul(t_factors_closed_form(ext, dc, gamma)?);
        }
    }
    Ok(t)
}

/// Product of t-factors over all components, computed by both paths.
pub fn t_factors_of_decomposition(
    ext: &TameExtension,
    dec: &ModuleDecomposition,
    gamma: Gamma,
) -> Result<TFactor> {
    let parts = parts_of(ext, dec);
    let generic = t_factors_generic(ext, &parts, gamma)?;
    let closed = closed_form_of_parts(ext, &parts, gamma)?;
    if generic != closed {
        return Err(Error::PathMismatch(format!(
            "{:?} side, Γ = {gamma:?}: generic {generic:?}, closed form {closed:?}",
            dec.side
        )));
    }
    Ok(generic)
}
