//! Rectifiers, ζ-data and the checks relating them.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::config::JumpConfig;
use crate::cyclotomic::{Qz, RootOfUnity};
use crate::error::{Error, Result};
use crate::galois::{DoubleCoset, Subfield, Symmetry, TameExtension};
use crate::modules::{finite_module, ModuleDecomposition, Side};
use crate::tfactors::{
    extended_t1, parts_of, residue_sign, t_factors_closed_form, t_factors_of_decomposition, Gamma,
    TFactor,
};

/// A tame character of `E_g^×`, recorded by its value on the canonical
/// generator of `μ_{E_g}` and at `ϖ_E`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TameCharacter {
    /// The double coset `g`, or `None` for `E` itself.
    pub coset: Option<usize>,
    /// `[k_{E_g} : k_F]`.
    pub residue_degree: u32,
    pub on_mu_generator: Qz,
    pub on_pi: Qz,
}

impl TameCharacter {
    pub fn trivial(coset: Option<usize>, residue_degree: u32) -> Self {
        TameCharacter {
            coset,
            residue_degree,
            on_mu_generator: Qz::ZERO,
            on_pi: Qz::ZERO,
        }
    }

    /// Value at a root of unity of `E_g`.
    pub fn eval_root(&self, ext: &TameExtension, w: RootOfUnity) -> Result<Qz> {
        let h = ext.model.units(self.residue_degree);
        let log = ext.group().log_in(h, w).ok_or(Error::NotInSubgroup {
            exponent: w.exponent,
            order: h.order,
        })?;
        Ok(self.on_mu_generator.scale(log))
    }

    /// Value at `w·ϖ_E^k`.
    pub fn eval(&self, ext: &TameExtension, w: RootOfUnity, k: i128) -> Result<Qz> {
        Ok(self.eval_root(ext, w)?.add(self.on_pi.scale_signed(k)))
    }

    /// Value at the canonical generator of `μ_E`.
    pub fn on_mu_e(&self, ext: &TameExtension) -> Qz {
        self.eval_root(ext, ext.model.zeta_e())
            .expect("μ_E ⊂ μ_{E_g}")
    }

    pub fn is_quadratic(&self) -> bool {
        self.on_mu_generator.to_sign().is_some() && self.on_pi.to_sign().is_some()
    }
}

/// ζ-data indexed by double coset id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaFamily {
    pub members: Vec<ZetaMember>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaMember {
    pub character: TameCharacter,
    /// Determined by the character of the inverse class.
    pub derived: bool,
    /// `ε_g` for symmetric classes.
    pub epsilon: Option<i8>,
}

/// The decompositions and per-class multiplicities of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modules {
    pub a: ModuleDecomposition,
    pub m: ModuleDecomposition,
}

impl Modules {
    pub fn new(ext: &TameExtension, cfg: &JumpConfig) -> Result<Self> {
        Ok(Modules {
            a: finite_module(ext, cfg, Side::A)?,
            m: finite_module(ext, cfg, Side::M)?,
        })
    }

    /// `mult_A(g) + mult_M(g)`.
    pub fn combined(&self, ext: &TameExtension) -> Vec<u32> {
        let a = self.a.multiplicities(ext);
        let m = self.m.multiplicities(ext);
        a.iter().zip(m).map(|(x, y)| x + y).collect()
    }

    pub fn restrict_to(&self, ext: &TameExtension, k: Subfield) -> Modules {
        Modules {
            a: self.a.restrict_to(ext, k),
            m: self.m.restrict_to(ext, k),
        }
    }
}

fn sign(s: i8) -> Qz {
    Qz::from_sign(s)
}

fn to_i8(b: bool) -> i8 {
    if b {
        -1
    } else {
        1
    }
}

/// `n_K - m_K + f_{ϖ,K} - m_{ϖ,K}` for `K` with `e(E/K)`, `f(E/K)` given.
pub fn sign_exponent(ext: &TameExtension, m: u32, k: Subfield) -> u32 {
    let f = ext.params().f;
    let n_k = k.n_rel();
    let m_k = m.gcd(&n_k);
    let f_kf = f / k.f_rel;
    let f_varpi_k = f / f_kf.lcm(&ext.model.z_degree());
    let m_varpi_k = m_k.gcd(&f_varpi_k);
    n_k + f_varpi_k - m_k - m_varpi_k
}

/// The rectifier as a tame character of `E^×`, from the modules supported on
/// `Γ_K` (`K = F` for the full rectifier).
pub fn rectifier_over(
    ext: &TameExtension,
    modules: &Modules,
    m: u32,
    k: Subfield,
) -> Result<TameCharacter> {
    let mods = modules.restrict_to(ext, k);
    let mu = t_factors_of_decomposition(ext, &mods.a, Gamma::Mu)?.mul(t_factors_of_decomposition(
        ext,
        &mods.m,
        Gamma::Mu,
    )?);
    let pi = t_factors_of_decomposition(ext, &mods.a, Gamma::Pi)?.mul(t_factors_of_decomposition(
        ext,
        &mods.m,
        Gamma::Pi,
    )?);
    let s = to_i8(sign_exponent(ext, m, k) % 2 == 1);
    Ok(TameCharacter {
        coset: None,
        residue_degree: ext.params().f,
        on_mu_generator: sign(mu.t1),
        on_pi: sign(s * pi.t()),
    })
}

fn full_field(ext: &TameExtension) -> Subfield {
    Subfield {
        e_rel: ext.params().e,
        f_rel: ext.params().f,
    }
}

pub fn rectifier(ext: &TameExtension, cfg: &JumpConfig) -> Result<TameCharacter> {
    let modules = Modules::new(ext, cfg)?;
    rectifier_over(ext, &modules, cfg.form.m, full_field(ext))
}

/// `ε_g`.
pub fn epsilon(dc: &DoubleCoset, m: u32) -> i8 {
    let flips =
        dc.is_sigma_half || (dc.symmetry == Symmetry::SymmetricUnramified && !dc.fixes_uniformizer);
    if flips && m % 2 == 1 {
        -1
    } else {
        1
    }
}

/// ζ-data with the asymmetric `ϖ_E`-values split as
/// `(full product + split, -split)` across `(g, g^{-1})`.
pub fn assign_zeta_with_split(
    ext: &TameExtension,
    modules: &Modules,
    m: u32,
    split: Qz,
) -> Result<ZetaFamily> {
    let mult = modules.combined(ext);
    let g = ext.group();
    let mut members = Vec::with_capacity(ext.cosets.len());
    for dc in &ext.cosets {
        let mu_g = ext.mu_g(dc);
        let gen = g.generator(mu_g);
        let deg = ext.params().f * dc.t;
        let mlt = mult[dc.id];
        let pi_t = if dc.is_sigma_half {
            TFactor::TRIVIAL
        } else {
            t_factors_closed_form(ext, dc, Gamma::Pi)?.pow(mlt)
        };
        let member = match dc.symmetry {
            Symmetry::Asymmetric => {
                // ζ_g(w) = sgn_w(U_g)^mult; the inverse class carries the same
                // values on roots of unity.
                let on_mu = sign(residue_sign(ext, dc, gen)).scale(mlt as u128);
                let canonical = dc.id < dc.inverse;
                let on_pi = if canonical {
                    sign(pi_t.t()).add(split)
                } else {
                    split.neg()
                };
                ZetaMember {
                    character: TameCharacter {
                        coset: Some(dc.id),
                        residue_degree: deg,
                        on_mu_generator: on_mu,
                        on_pi,
                    },
                    derived: !canonical,
                    epsilon: None,
                }
            }
            _ => {
                let eps = epsilon(dc, m);
                let on_mu = sign(extended_t1(ext, dc, gen)?).scale(mlt as u128);
                ZetaMember {
                    character: TameCharacter {
                        coset: Some(dc.id),
                        residue_degree: deg,
                        on_mu_generator: on_mu,
                        on_pi: sign(eps * pi_t.t()),
                    },
                    derived: false,
                    epsilon: Some(eps),
                }
            }
        };
        members.push(member);
    }
    Ok(ZetaFamily { members })
}

pub fn assign_zeta(ext: &TameExtension, cfg: &JumpConfig) -> Result<ZetaFamily> {
    let modules = Modules::new(ext, cfg)?;
    assign_zeta_with_split(ext, &modules, cfg.form.m, Qz::ZERO)
}

/// Product of the restrictions to `E^×` of the members whose class lies in `Γ_K`.
pub fn restrict_product_over(
    ext: &TameExtension,
    family: &ZetaFamily,
    k: Subfield,
) -> TameCharacter {
    let mut on_mu = Qz::ZERO;
    let mut on_pi = Qz::ZERO;
    for (dc, z) in ext.cosets.iter().zip(&family.members) {
        if !ext.subfield_membership(dc, k) {
            continue;
        }
        on_mu = on_mu.add(z.character.on_mu_e(ext));
        on_pi = on_pi.add(z.character.on_pi);
    }
    TameCharacter {
        coset: None,
        residue_degree: ext.params().f,
        on_mu_generator: on_mu,
        on_pi,
    }
}

pub fn restrict_product(ext: &TameExtension, family: &ZetaFamily) -> TameCharacter {
    restrict_product_over(ext, family, full_field(ext))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFailure {
    pub coset: usize,
    pub generator: String,
}

/// Checks the inverse identity for asymmetric pairs and triviality on the
/// image of `E_{±g}^×` for symmetric classes.
pub fn verify_zeta_conditions(
    ext: &TameExtension,
    family: &ZetaFamily,
) -> Result<Vec<ConditionFailure>> {
    let g = ext.group();
    let mut failures = Vec::new();
    let zeta_e = ext.model.zeta_e();
    for dc in &ext.cosets {
        let z = &family.members[dc.id].character;
        let fail = |what: &str| ConditionFailure {
            coset: dc.id,
            generator: what.to_string(),
        };
        if dc.symmetry == Symmetry::Asymmetric {
            if dc.id > dc.inverse {
                continue;
            }
            let zi = &family.members[dc.inverse].character;
            // ζ_g ζ_{g^{-1}} = ζ_g ∘ [1; g] on E^×
            let lam = ext.root_character(dc);
            let lhs_mu = z.on_mu_e(ext).add(zi.on_mu_e(ext));
            let rhs_mu = z.eval_root(ext, lam.on_mu(&ext.model, zeta_e))?;
            if lhs_mu != rhs_mu {
                failures.push(fail("inverse identity at the generator of mu_E"));
            }
            let lhs_pi = z.on_pi.add(zi.on_pi);
            let rhs_pi = z.eval_root(ext, lam.on_pi)?;
            if lhs_pi != rhs_pi {
                failures.push(fail("inverse identity at the uniformizer"));
            }
            continue;
        }
        let d = ext.epm_descriptor(dc)?;
        let fixed_gen = g.generator(d.fixed_roots);
        if !z.eval_root(ext, fixed_gen)?.is_trivial() {
            failures.push(fail("fixed roots of unity"));
        }
        let (w, k) = d.fixed_uniformizer;
        if !z.eval(ext, w, k as i128)?.is_trivial() {
            failures.push(fail(&format!("fixed element w·ϖ_E^{k}")));
        }
    }
    Ok(failures)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChiCheck {
    pub trivial_on_fixed_roots: bool,
    pub trivial_on_norm: bool,
    pub minus_one_at_z0: bool,
}

impl ChiCheck {
    pub fn passes(&self) -> bool {
        self.trivial_on_fixed_roots && self.trivial_on_norm && self.minus_one_at_z0
    }
}

/// The χ-datum conditions for a symmetric class with unramified `E_g/E_{±g}`.
pub fn verify_chi_conditions(
    ext: &TameExtension,
    chi: &TameCharacter,
    dc: &DoubleCoset,
) -> Result<ChiCheck> {
    let d = ext.epm_descriptor(dc)?;
    if !d.unramified {
        return Err(Error::Internal(format!(
            "class {} is not unramified over E_±g",
            dc.id
        )));
    }
    let g = ext.group();
    let fixed = chi.eval_root(ext, g.generator(d.fixed_roots))?.is_trivial();
    let norm = chi
        .eval(ext, d.norm_of_uniformizer.unwrap(), 2)?
        .is_trivial();
    let z0 = chi.eval(ext, d.z0.unwrap(), 1)? == Qz::HALF;
    Ok(ChiCheck {
        trivial_on_fixed_roots: fixed,
        trivial_on_norm: norm,
        minus_one_at_z0: z0,
    })
}

/// `χ_g` obtained from `ζ_g` by flipping the value at `ϖ_E`.
pub fn chi_from_zeta(zeta: &TameCharacter) -> TameCharacter {
    TameCharacter {
        on_pi: zeta.on_pi.add(Qz::HALF),
        ..*zeta
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectifierReport {
    pub rectifier: TameCharacter,
    pub zeta_product: TameCharacter,
    pub sign_exponent: u32,
    pub epsilons: Vec<(usize, i8)>,
    pub verdict: bool,
}

pub fn verify_main_theorem(ext: &TameExtension, cfg: &JumpConfig) -> Result<RectifierReport> {
    let modules = Modules::new(ext, cfg)?;
    let family = assign_zeta_with_split(ext, &modules, cfg.form.m, Qz::ZERO)?;
    main_theorem_report(ext, cfg, &modules, &family)
}

pub fn main_theorem_report(
    ext: &TameExtension,
    cfg: &JumpConfig,
    modules: &Modules,
    family: &ZetaFamily,
) -> Result<RectifierReport> {
    let full = full_field(ext);
    let rect = rectifier_over(ext, modules, cfg.form.m, full)?;
    let prod = restrict_product(ext, family);
    Ok(RectifierReport {
        verdict: rect.on_mu_generator == prod.on_mu_generator && rect.on_pi == prod.on_pi,
        rectifier: rect,
        zeta_product: prod,
        sign_exponent: sign_exponent(ext, cfg.form.m, full),
        epsilons: family
            .members
            .iter()
            .enumerate()
            .filter_map(|(i, z)| z.epsilon.map(|e| (i, e)))
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorialReport {
    pub field: Subfield,
    pub rectifier: TameCharacter,
    pub partial_product: TameCharacter,
    pub passes: bool,
}

pub fn functorial_check_with(
    ext: &TameExtension,
    cfg: &JumpConfig,
    modules: &Modules,
    family: &ZetaFamily,
    k: Subfield,
) -> Result<FunctorialReport> {
    ext.check_subfield(k)?;
    let rect = rectifier_over(ext, modules, cfg.form.m, k)?;
    let prod = restrict_product_over(ext, family, k);
    Ok(FunctorialReport {
        field: k,
        passes: rect.on_mu_generator == prod.on_mu_generator && rect.on_pi == prod.on_pi,
        rectifier: rect,
        partial_product: prod,
    })
}

pub fn functorial_check(
    ext: &TameExtension,
    cfg: &JumpConfig,
    k: Subfield,
) -> Result<FunctorialReport> {
    let modules = Modules::new(ext, cfg)?;
    let family = assign_zeta_with_split(ext, &modules, cfg.form.m, Qz::ZERO)?;
    functorial_check_with(ext, cfg, &modules, &family, k)
}

/// Whether the module `U_{[σ^{e/2}]}` is absent from both sides.
pub fn sigma_half_absent(ext: &TameExtension, modules: &Modules) -> bool {
    match ext.sigma_half() {
        None => true,
        Some(s) => modules.a.multiplicity(s.id) == 0 && modules.m.multiplicity(s.id) == 0,
    }
}

/// The multiplicities as `(class, A, M)` triples, for reports.
pub fn multiplicity_table(ext: &TameExtension, modules: &Modules) -> Vec<(usize, u32, u32)> {
    let a = modules.a.multiplicities(ext);
    let m = modules.m.multiplicities(ext);
    (0..ext.cosets.len()).map(|i| (i, a[i], m[i])).collect()
}

/// Generic-path t-factors for the isotypic part of one class on one side.
pub fn isotypic_tfactors(
    ext: &TameExtension,
    dec: &ModuleDecomposition,
    dc: &DoubleCoset,
) -> Result<(TFactor, TFactor)> {
    let parts: Vec<(usize, u32)> = parts_of(ext, dec)
        .into_iter()
        .filter(|(i, _)| *i == dc.id || (dc.symmetry == Symmetry::Asymmetric && *i == dc.inverse))
        .collect();
    Ok((
        crate::tfactors::t_factors_generic(ext, &parts, Gamma::Mu)?,
        crate::tfactors::t_factors_generic(ext, &parts, Gamma::Pi)?,
    ))
}
