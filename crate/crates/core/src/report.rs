//! Single-configuration evaluation and the JSON run report.

use serde::{Deserialize, Serialize};

use crate::config::{JumpConfig, RunConfig, RunConfigDoc, SCHEMA_VERSION};
use crate::cyclotomic::Qz;
use crate::error::Result;
use crate::galois::{Subfield, Symmetry, TameExtension};
use crate::inner_form::jump_levels;
use crate::modules::ModuleDecomposition;
use crate::tfactors::{extended_t1, t_factors_closed_form, t_factors_generic, Gamma, TFactor};
use crate::zeta::{
    assign_zeta_with_split, chi_from_zeta, functorial_check_with, isotypic_tfactors,
    main_theorem_report, rectifier_over, restrict_product, verify_chi_conditions,
    verify_zeta_conditions, ConditionFailure, Modules, RectifierReport, TameCharacter, ZetaFamily,
};

/// Alternative asymmetric `ϖ_E` splits tried for convention independence.
pub const ALTERNATIVE_SPLITS: [(u128, u128); 3] = [(1, 2), (1, 3), (3, 4)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetRow {
    pub id: usize,
    pub j: u32,
    pub multiplier: u128,
    pub symmetry: Symmetry,
    pub t: u32,
    pub fixes_uniformizer: bool,
    pub inverse: usize,
    pub sigma_half: bool,
}

pub fn coset_table(ext: &TameExtension) -> Vec<CosetRow> {
    ext.cosets
        .iter()
        .map(|c| CosetRow {
            id: c.id,
            j: c.j,
            multiplier: c.u().exponent,
            symmetry: c.symmetry,
            t: c.t,
            fixes_uniformizer: c.fixes_uniformizer,
            inverse: c.inverse,
            sigma_half: c.is_sigma_half,
        })
        .collect()
}

/// Both computation paths for one class and one generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathPair {
    pub closed_form: TFactor,
    pub generic: TFactor,
}

impl PathPair {
    pub fn agrees(&self) -> bool {
        self.closed_form == self.generic
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosetTFactors {
    pub coset: usize,
    pub mu: PathPair,
    pub pi: PathPair,
    /// Extended `t^1` at the generator of `μ_E`, as a sign.
    pub extended_t1_on_mu_e: i8,
}

impl CosetTFactors {
    pub fn agrees(&self) -> bool {
        self.mu.agrees() && self.pi.agrees() && self.extended_t1_on_mu_e == self.mu.closed_form.t1
    }
}

/// Standard-module t-factors of every class along both paths. For an
/// asymmetric class the module is the pair `U_g ⊕ U_{g^{-1}}`.
pub fn standard_tfactors(ext: &TameExtension) -> Result<Vec<CosetTFactors>> {
    let zeta_e = ext.model.zeta_e();
    ext.cosets
        .iter()
        .map(|dc| {
            let parts: Vec<(usize, u32)> = if dc.symmetry == Symmetry::Asymmetric {
                vec![(dc.id, 1), (dc.inverse, 1)]
            } else {
                vec![(dc.id, 1)]
            };
            let pair = |gamma| -> Result<PathPair> {
                Ok(PathPair {
                    closed_form: t_factors_closed_form(ext, dc, gamma)?,
                    generic: t_factors_generic(ext, &parts, gamma)?,
                })
            };
            Ok(CosetTFactors {
                coset: dc.id,
                mu: pair(Gamma::Mu)?,
                pi: if dc.is_sigma_half {
                    PathPair {
                        closed_form: TFactor::TRIVIAL,
                        generic: TFactor::TRIVIAL,
                    }
                } else {
                    pair(Gamma::Pi)?
                },
                extended_t1_on_mu_e: extended_t1(ext, dc, zeta_e)?,
            })
        })
        .collect()
}

/// Per-class t-factors of the isotypic parts of one side: `(class, t_μ, t_ϖ)`.
pub fn isotypic_table(
    ext: &TameExtension,
    dec: &ModuleDecomposition,
) -> Result<Vec<(usize, TFactor, TFactor)>> {
    ext.cosets
        .iter()
        .filter(|dc| !dc.is_sigma_half)
        .map(|dc| {
            let (mu, pi) = isotypic_tfactors(ext, dec, dc)?;
            Ok((dc.id, mu, pi))
        })
        .collect()
}

/// Everything that must not depend on the Hasse invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseFingerprint {
    pub a_side: Vec<(usize, TFactor, TFactor)>,
    pub m_side: Vec<(usize, TFactor, TFactor)>,
    pub rectifier: TameCharacter,
    pub zeta: ZetaFamily,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorialVerdict {
    pub field: Subfield,
    pub rectifier: TameCharacter,
    pub partial_product: TameCharacter,
    pub passes: bool,
}

/// Named verdicts. `None` means the check does not apply or was disabled.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub main_theorem: Option<bool>,
    pub zeta_conditions: Option<bool>,
    pub chi_conditions: Option<bool>,
    pub totally_ramified: Option<bool>,
    pub split_trivial: Option<bool>,
    pub dual_path: Option<bool>,
    pub parity: Option<bool>,
    pub r_le_q: Option<bool>,
    pub symmetric_trichotomy: Option<bool>,
    pub functoriality: Option<bool>,
    pub split_invariance: Option<bool>,
}

impl Verdicts {
    pub fn named(&self) -> Vec<(&'static str, Option<bool>)> {
        vec![
            ("main_theorem", self.main_theorem),
            ("zeta_conditions", self.zeta_conditions),
            ("chi_conditions", self.chi_conditions),
            ("totally_ramified", self.totally_ramified),
            ("split_trivial", self.split_trivial),
            ("dual_path", self.dual_path),
            ("parity", self.parity),
            ("r_le_q", self.r_le_q),
            ("symmetric_trichotomy", self.symmetric_trichotomy),
            ("functoriality", self.functoriality),
            ("split_invariance", self.split_invariance),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.named().iter().all(|(_, v)| v.unwrap_or(true))
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.named()
            .into_iter()
            .filter(|(_, v)| *v == Some(false))
            .map(|(n, _)| n)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub config: RunConfigDoc,
    pub cosets: Vec<CosetRow>,
    pub a_side: ModuleDecomposition,
    pub m_side: ModuleDecomposition,
    pub multiplicities: Vec<(usize, u32, u32)>,
    pub tfactors: Vec<CosetTFactors>,
    pub rectifier: RectifierReport,
    pub zeta: ZetaFamily,
    pub zeta_failures: Vec<ConditionFailure>,
    pub functoriality: Vec<FunctorialVerdict>,
    pub parity_checks: Vec<(String, bool)>,
    pub sigma_half_present: bool,
    pub verdicts: Verdicts,
    pub all_pass: bool,
}

/// Intermediate results of one configuration.
pub struct Evaluation {
    pub report: RunReport,
    pub fingerprint: HasseFingerprint,
}

fn flip_first(family: &mut ZetaFamily) {
    if let Some(z) = family.members.first_mut() {
        z.character.on_pi = z.character.on_pi.add(Qz::HALF);
    }
}

/// Multiset equality of the class lists of two component lists.
fn same_classes(a: &[crate::modules::FineComponent], b: &[crate::modules::FineComponent]) -> bool {
    let key = |v: &[crate::modules::FineComponent]| {
        let mut k: Vec<_> = v.iter().map(|c| (c.level, c.coset)).collect();
        k.sort();
        k
    };
    key(a) == key(b)
}

fn trichotomy(ext: &TameExtension, cfg: &JumpConfig, modules: &Modules) -> bool {
    let (a_ram, a_unram) = modules.a.symmetric_parts(ext);
    let (m_ram, m_unram) = modules.m.symmetric_parts(ext);
    if !same_classes(&a_ram, &m_ram) {
        return false;
    }
    let f = cfg.params.f;
    if f % 2 == 1 || cfg.form.m % 2 == 0 {
        return same_classes(&a_unram, &m_unram);
    }
    // level by level, A ⊔ M is every sym-unram class of Γ_{E_{k+1}} − Γ_{E_k}
    let mut union: Vec<_> = a_unram
        .iter()
        .chain(&m_unram)
        .map(|c| (c.level, c.coset))
        .collect();
    union.sort();
    let mut want = Vec::new();
    for k in 0..=cfg.tower.t() as i32 {
        let inner = cfg.tower.field(k, &cfg.params);
        let outer = cfg.tower.field(k + 1, &cfg.params);
        for dc in &ext.cosets {
            if dc.symmetry == Symmetry::SymmetricUnramified
                && ext.subfield_membership(dc, outer)
                && !ext.subfield_membership(dc, inner)
            {
                want.push((k as u32, dc.id));
            }
        }
    }
    want.sort();
    union == want
}

/// Runs every enabled check on one configuration.
pub fn evaluate(ext: &TameExtension, rc: &RunConfig) -> Result<Evaluation> {
    let cfg = &rc.config;
    let flags = &rc.flags;
    cfg.validate(ext)?;
    let modules = Modules::new(ext, cfg)?;
    let m = cfg.form.m;
    let mut family = assign_zeta_with_split(ext, &modules, m, Qz::ZERO)?;
    if flags.mutate_zeta {
        flip_first(&mut family);
    }
    let mut v = Verdicts::default();

    let tfactors = standard_tfactors(ext)?;
    let rect = main_theorem_report(ext, cfg, &modules, &family)?;
    if flags.main_theorem {
        v.main_theorem = Some(rect.verdict);
    }
    if flags.dual_path {
        // the decomposition-level comparison errors on any disagreement
        let decomposition_paths = rectifier_over(
            ext,
            &modules,
            m,
            Subfield {
                e_rel: cfg.params.e,
                f_rel: cfg.params.f,
            },
        )
        .is_ok();
        v.dual_path = Some(decomposition_paths && tfactors.iter().all(CosetTFactors::agrees));
    }

    let zeta_failures = if flags.zeta_conditions {
        let fails = verify_zeta_conditions(ext, &family)?;
        v.zeta_conditions = Some(fails.is_empty());
        let mut chi_ok = true;
        for dc in ext.cosets.iter().filter(|c| c.is_symmetric()) {
            if ext.epm_descriptor(dc)?.unramified {
                let chi = chi_from_zeta(&family.members[dc.id].character);
                chi_ok &= verify_chi_conditions(ext, &chi, dc)?.passes();
            }
        }
        v.chi_conditions = Some(chi_ok);
        fails
    } else {
        Vec::new()
    };

    let params = cfg.params;
    if params.f == 1 {
        let r = &rect.rectifier;
        let want = Qz::from_sign(if (params.n() - m) % 2 == 1 { -1 } else { 1 });
        v.totally_ramified = Some(
            r.on_mu_generator.is_trivial()
                && r.on_pi == want
                && modules.a.components == modules.m.components,
        );
    }
    if cfg.form.d == 1 {
        let r = &rect.rectifier;
        v.split_trivial = Some(r.on_mu_generator.is_trivial() && r.on_pi.is_trivial());
    }

    let parity = ext.classify_and_count();
    let mut parity_checks = parity.checks.clone();
    if flags.parity {
        let lv = jump_levels(&params, &cfg.form, &cfg.tower, &cfg.jumps)?;
        let mut ok = lv.r_le_q();
        if params.f % 2 == 0 && m % 2 == 1 {
            ok &= lv.r_index == lv.q_index;
        }
        parity_checks.push(("r_le_q".into(), ok));
        v.r_le_q = Some(ok);
        v.parity = Some(parity.checks.iter().all(|(_, b)| *b));
        v.symmetric_trichotomy = Some(trichotomy(ext, cfg, &modules));
    }

    let mut functoriality = Vec::new();
    if flags.functoriality {
        for k in 0..=cfg.tower.t() as i32 + 1 {
            let field = cfg.tower.field(k, &params);
            let r = functorial_check_with(ext, cfg, &modules, &family, field)?;
            functoriality.push(FunctorialVerdict {
                field,
                rectifier: r.rectifier,
                partial_product: r.partial_product,
                passes: r.passes,
            });
        }
        v.functoriality = Some(functoriality.iter().all(|f| f.passes));
    }

    if flags.main_theorem {
        let base = restrict_product(ext, &family);
        let mut same = true;
        for (a, b) in ALTERNATIVE_SPLITS {
            let mut alt = assign_zeta_with_split(ext, &modules, m, Qz::new(a, b))?;
            if flags.mutate_zeta {
                flip_first(&mut alt);
            }
            same &= restrict_product(ext, &alt) == base;
        }
        v.split_invariance = Some(same);
    }

    let fingerprint = HasseFingerprint {
        a_side: isotypic_table(ext, &modules.a)?,
        m_side: isotypic_table(ext, &modules.m)?,
        rectifier: rect.rectifier,
        zeta: family.clone(),
    };
    let all_pass = v.all_pass();
    let report = RunReport {
        schema: SCHEMA_VERSION,
        config: RunConfigDoc::from_config(cfg, flags.clone()),
        cosets: coset_table(ext),
        multiplicities: crate::zeta::multiplicity_table(ext, &modules),
        sigma_half_present: !crate::zeta::sigma_half_absent(ext, &modules),
        a_side: modules.a,
        m_side: modules.m,
        tfactors,
        rectifier: rect,
        zeta: family,
        zeta_failures,
        functoriality,
        parity_checks,
        verdicts: v,
        all_pass,
    };
    Ok(Evaluation {
        report,
        fingerprint,
    })
}

pub fn run(ext: &TameExtension, rc: &RunConfig) -> Result<RunReport> {
    Ok(evaluate(ext, rc)?.report)
}

/// Parses, validates and runs a configuration document.
pub fn run_document(text: &str) -> Result<RunReport> {
    let (rc, ext) = crate::config::parse_config(text)?;
    run(&ext, &rc)
}

/// Compact text rendering of a report.
pub fn render_table(r: &RunReport) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let c = &r.config;
    let _ = writeln!(
        s,
        "q={} e={} f={} z_ef={} m={} d={} h={} tower={:?} jumps={:?}",
        c.q, c.e, c.f, c.z_ef, c.m, c.d, c.h, c.tower, c.jumps
    );
    let _ = writeln!(
        s,
        "{:>3} {:>3} {:>12} {:>20} {:>3} {:>5} {:>4} {:>4}",
        "id", "j", "u", "symmetry", "t", "fix", "A", "M"
    );
    for (row, (_, a, m)) in r.cosets.iter().zip(&r.multiplicities) {
        let _ = writeln!(
            s,
            "{:>3} {:>3} {:>12} {:>20} {:>3} {:>5} {:>4} {:>4}",
            row.id,
            row.j,
            row.multiplier,
            format!("{:?}", row.symmetry),
            row.t,
            row.fixes_uniformizer,
            a,
            m
        );
    }
    let rc = &r.rectifier.rectifier;
    let _ = writeln!(
        s,
        "rectifier: mu_E -> {}, varpi_E -> {}",
        rc.on_mu_generator, rc.on_pi
    );
    let zp = &r.rectifier.zeta_product;
    let _ = writeln!(
        s,
        "zeta product: mu_E -> {}, varpi_E -> {}",
        zp.on_mu_generator, zp.on_pi
    );
    for (name, v) in r.verdicts.named() {
        let tag = match v {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "n/a",
        };
        let _ = writeln!(s, "{name:<22} {tag}");
    }
    s
}
