//! The tame extension `E/F`, its embeddings, and Galois double cosets.
//!
//! An `F`-embedding of `E` is recorded as `(j, u)`: it acts on residue roots
//! of unity by `x -> x^(q^j)` and sends `ϖ_E` to `u·ϖ_E`. Galois elements of
//! the splitting field are pairs `(a, w)` with `a` taken modulo the ambient
//! degree `M`.

use std::collections::HashMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{
    multiplicative_order, pow_mod, prime_power, CyclicSubgroup, RootGroup, RootOfUnity,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TameParams {
    pub p: u64,
    pub q: u64,
    pub e: u32,
    pub f: u32,
    /// `z_{E/F}` as an exponent of the canonical generator of `mu_(q^f - 1)`.
    pub z_ef: u128,
}

impl TameParams {
    pub fn new(q: u64, e: u32, f: u32, z_ef: u128) -> Result<Self> {
        let (p, _) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if e == 0 || f == 0 {
            return Err(Error::InvalidParams("e and f must be positive".into()));
        }
        if e as u64 % p == 0 {
            return Err(Error::NotTame { p, e });
        }
        let size = crate::cyclotomic::checked_pow(q as u128, f)
            .ok_or_else(|| Error::InvalidParams("q^f too large".into()))?;
        if z_ef >= size - 1 {
            return Err(Error::BadZ(z_ef));
        }
        Ok(TameParams { p, q, e, f, z_ef })
    }

    pub fn n(&self) -> u32 {
        self.e * self.f
    }
}

/// The ambient group of roots of unity large enough to hold every multiplier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientModel {
    pub params: TameParams,
    pub degree: u32,
    pub group: RootGroup,
    /// `z_{E/F}` inside the ambient group.
    pub z: RootOfUnity,
}

pub fn build_ambient(params: TameParams) -> Result<AmbientModel> {
    let TameParams { q, e, f, .. } = params;
    let qf1 = crate::cyclotomic::checked_pow(q as u128, f).unwrap() - 1;
    let modulus = e as u128 * qf1;
    let ord = multiplicative_order(q as u128, modulus)
        .ok_or_else(|| Error::InvalidParams("q not invertible modulo e(q^f-1)".into()))?;
    let degree = (f as u128).lcm(&ord) as u32;
    let group = RootGroup::new(q, degree)?;
    let mu_e = group.residue_units(f)?;
    let z = group.pow_u(group.generator(mu_e), params.z_ef);
    Ok(AmbientModel {
        params,
        degree,
        group,
        z,
    })
}

impl AmbientModel {
    /// `mu_(q^k - 1)`.
    pub fn units(&self, k: u32) -> CyclicSubgroup {
        self.group
            .residue_units(k)
            .expect("residue degree divides the ambient degree")
    }

    /// `mu_E`.
    pub fn mu_e(&self) -> CyclicSubgroup {
        self.units(self.params.f)
    }

    /// `mu_F`.
    pub fn mu_f(&self) -> CyclicSubgroup {
        self.units(1)
    }

    /// The canonical generator of `mu_E`.
    pub fn zeta_e(&self) -> RootOfUnity {
        self.group.generator(self.mu_e())
    }

    /// `q^a - 1` reduced modulo the ambient order.
    pub fn frob_minus_one(&self, a: u128) -> u128 {
        (self.group.frobenius_multiplier(a) + self.group.order - 1) % self.group.order
    }

    /// `z_{E/F}^(q^a - 1)`, the target of `w^e` for Galois multipliers.
    pub fn multiplier_target(&self, a: u128) -> RootOfUnity {
        self.group.pow_u(self.z, self.frob_minus_one(a))
    }

    /// Degree of `z_{E/F}` over the residue field of `F`.
    pub fn z_degree(&self) -> u32 {
        (1..=self.params.f)
            .find(|t| self.group.frob(self.z, *t as u128) == self.z)
            .expect("z lies in mu_E")
    }

    pub fn galois_element(&self, a: u128, w: RootOfUnity) -> Result<GaloisElement> {
        let a = a % self.degree as u128;
        if self.group.pow_u(w, self.params.e as u128) != self.multiplier_target(a) {
            return Err(Error::InvalidParams(format!(
                "multiplier {} is not an e-th root of z^(q^{a}-1)",
                w.exponent
            )));
        }
        Ok(GaloisElement { a, w })
    }

    pub fn identity(&self) -> GaloisElement {
        GaloisElement {
            a: 0,
            w: RootOfUnity::ONE,
        }
    }

    /// `(a, w)(a', w') = (a + a', w'^(q^a) w)`.
    pub fn compose(&self, g: GaloisElement, h: GaloisElement) -> GaloisElement {
        let g_ = &self.group;
        GaloisElement {
            a: (g.a + h.a) % self.degree as u128,
            w: g_.mul(g_.frob(h.w, g.a), g.w),
        }
    }

    pub fn inverse(&self, g: GaloisElement) -> GaloisElement {
        let m = self.degree as u128;
        let a = (m - g.a) % m;
        GaloisElement {
            a,
            w: self.group.inv(self.group.frob(g.w, a)),
        }
    }

    pub fn act(&self, g: GaloisElement, c: EmbeddingCoset) -> EmbeddingCoset {
        let f = self.params.f as u128;
        EmbeddingCoset {
            j: ((c.j as u128 + g.a) % f) as u32,
            u: self.group.mul(g.w, self.group.frob(c.u, g.a)),
        }
    }

    /// A Galois element whose coset is `c`.
    pub fn lift(&self, c: EmbeddingCoset) -> GaloisElement {
        GaloisElement {
            a: c.j as u128,
            w: c.u,
        }
    }

    pub fn coset_inverse(&self, c: EmbeddingCoset) -> EmbeddingCoset {
        let inv = self.inverse(self.lift(c));
        self.act(inv, EmbeddingCoset::BASE)
    }

    pub fn enumerate_embeddings(&self) -> Result<Vec<EmbeddingCoset>> {
        let mut out = Vec::with_capacity(self.params.n() as usize);
        for j in 0..self.params.f {
            let target = self.multiplier_target(j as u128);
            let sols = self.group.power_solutions(self.params.e as u128, target)?;
            if sols.is_empty() {
                return Err(Error::AmbientSizing(format!("z^(q^{j}-1)")));
            }
            out.extend(sols.into_iter().map(|u| EmbeddingCoset { j, u }));
        }
        Ok(out)
    }

    /// The `u -> u^(q^f)` orbit of a multiplier, sorted.
    fn residual_orbit(&self, u: RootOfUnity) -> Vec<RootOfUnity> {
        let f = self.params.f as u128;
        let mut orbit = vec![u];
        let mut x = self.group.frob(u, f);
        while x != u {
            orbit.push(x);
            x = self.group.frob(x, f);
        }
        orbit.sort();
        orbit
    }

    /// `(f_ϖ, m_ϖ)` for a given `m`.
    pub fn f_varpi(&self, m: u32) -> (u32, u32) {
        let fv = self.params.f / self.z_degree();
        (fv, m.gcd(&fv))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaloisElement {
    pub a: u128,
    pub w: RootOfUnity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EmbeddingCoset {
    pub j: u32,
    pub u: RootOfUnity,
}

impl EmbeddingCoset {
    pub const BASE: EmbeddingCoset = EmbeddingCoset {
        j: 0,
        u: RootOfUnity::ONE,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    Asymmetric,
    SymmetricRamified,
    SymmetricUnramified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoubleCoset {
    pub id: usize,
    pub j: u32,
    /// The residual orbit of multipliers, sorted; the first is the representative.
    pub multipliers: Vec<RootOfUnity>,
    pub symmetry: Symmetry,
    /// `[E_g : E]`.
    pub t: u32,
    pub fixes_uniformizer: bool,
    pub inverse: usize,
    /// The class `(0, -1)`.
    pub is_sigma_half: bool,
}

impl DoubleCoset {
    pub fn rep(&self) -> EmbeddingCoset {
        EmbeddingCoset {
            j: self.j,
            u: self.multipliers[0],
        }
    }

    pub fn u(&self) -> RootOfUnity {
        self.multipliers[0]
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry != Symmetry::Asymmetric
    }

    pub fn contains(&self, c: EmbeddingCoset) -> bool {
        c.j == self.j && self.multipliers.binary_search(&c.u).is_ok()
    }
}

/// The character `[1; g]` of `Ψ_{E/F}`: `z -> z^(1 - q^j)` on `mu_E` and
/// `ϖ_E -> u^(-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCharacter {
    pub j: u32,
    pub on_pi: RootOfUnity,
}

impl RootCharacter {
    pub fn on_mu(&self, model: &AmbientModel, z: RootOfUnity) -> RootOfUnity {
        let g = &model.group;
        g.div(z, g.frob(z, self.j as u128))
    }

    /// Value at `ϖ_F = z_{E/F}^(-1) ϖ_E^e`.
    pub fn on_pi_f(&self, model: &AmbientModel) -> RootOfUnity {
        let g = &model.group;
        let at_z = self.on_mu(model, model.z);
        g.mul(g.inv(at_z), g.pow_u(self.on_pi, model.params.e as u128))
    }
}

/// A standard intermediate field `K`, given by `e(E/K)` and `f(E/K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subfield {
    pub e_rel: u32,
    pub f_rel: u32,
}

impl Subfield {
    pub fn n_rel(&self) -> u32 {
        self.e_rel * self.f_rel
    }
}

/// Data describing `E_{±g} ⊂ E_g` for a symmetric class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpmDescriptor {
    pub coset: usize,
    pub tau: GaloisElement,
    /// `[k_{E_g} : k_F]`.
    pub residue_degree: u32,
    /// Roots of unity fixed by `τ`.
    pub fixed_roots: CyclicSubgroup,
    /// `w` and `k` with `w·ϖ_E^k` fixed by `τ`, `k` minimal.
    pub fixed_uniformizer: (RootOfUnity, u32),
    /// `E_g / E_{±g}` is unramified.
    pub unramified: bool,
    /// For unramified `E_g/E_{±g}`: `z_0` with `z_0 ϖ_E` fixed, and `u` with
    /// `N(ϖ_E) = u ϖ_E^2`.
    pub z0: Option<RootOfUnity>,
    pub norm_of_uniformizer: Option<RootOfUnity>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityReport {
    pub asymmetric: usize,
    pub sym_ram: usize,
    pub sym_unram: usize,
    pub sym_unram_not_fixing: usize,
    pub checks: Vec<(String, bool)>,
}

/// `E/F` with its ambient model and double cosets.
#[derive(Clone, Debug)]
pub struct TameExtension {
    pub model: AmbientModel,
    pub embeddings: Vec<EmbeddingCoset>,
    pub cosets: Vec<DoubleCoset>,
    lookup: HashMap<EmbeddingCoset, usize>,
}

impl TameExtension {
    pub fn new(params: TameParams) -> Result<Self> {
        let model = build_ambient(params)?;
        let embeddings = model.enumerate_embeddings()?;
        let (cosets, lookup) = double_cosets(&model, &embeddings);
        Ok(TameExtension {
            model,
            embeddings,
            cosets,
            lookup,
        })
    }

    pub fn params(&self) -> TameParams {
        self.model.params
    }

    pub fn group(&self) -> &RootGroup {
        &self.model.group
    }

    /// The class of a non-identity embedding.
    pub fn class_of(&self, c: EmbeddingCoset) -> Option<usize> {
        self.lookup.get(&c).copied()
    }

    pub fn root_character(&self, dc: &DoubleCoset) -> RootCharacter {
        RootCharacter {
            j: dc.j,
            on_pi: self.group().inv(dc.u()),
        }
    }

    /// The generator of `mu_{E_g}`.
    pub fn mu_g(&self, dc: &DoubleCoset) -> CyclicSubgroup {
        self.model.units(self.params().f * dc.t)
    }

    pub fn sigma_half(&self) -> Option<&DoubleCoset> {
        self.cosets.iter().find(|c| c.is_sigma_half)
    }

    pub fn epm_descriptor(&self, dc: &DoubleCoset) -> Result<EpmDescriptor> {
        if !dc.is_symmetric() {
            return Err(Error::NotSymmetric(dc.id));
        }
        let g = self.group();
        let f = self.params().f;
        let ft = f * dc.t;
        let u = dc.u();
        let tau_a = (dc.j..self.model.degree)
            .step_by(f as usize)
            .find(|a| (2 * a) % ft == 0 && g.mul(u, g.frob(u, *a as u128)).is_one())
            .ok_or_else(|| Error::Internal(format!("no involution for class {}", dc.id)))?;
        let tau = self.model.galois_element(tau_a as u128, u)?;

        // Work inside mu_P, P = q^(ft) - 1, with its canonical generator.
        let mu_g = self.mu_g(dc);
        let big_p = mu_g.order;
        let qa1 = (pow_mod(self.params().q as u128, tau_a as u128, big_p) + big_p - 1) % big_p;
        let fixed_order = qa1.gcd(&big_p);
        let fixed_roots = CyclicSubgroup {
            order: if qa1 == 0 { big_p } else { fixed_order },
        };
        let log_u = g.log_in(mu_g, u).expect("u lies in mu_{E_g}");
        let mut found = None;
        for k in 1..=2u32 {
            // w^(q^a - 1) = u^(-k): solve qa1·x ≡ -k·log_u (mod P)
            let c = (big_p - (k as u128 * log_u) % big_p) % big_p;
            if let Some(x) = solve_linear(qa1, c, big_p) {
                found = Some((g.pow_u(g.generator(mu_g), x), k));
                break;
            }
        }
        let (w1, k) = found
            .ok_or_else(|| Error::Internal(format!("no fixed uniformizer for class {}", dc.id)))?;
        let unramified = k == 1;
        Ok(EpmDescriptor {
            coset: dc.id,
            tau,
            residue_degree: ft,
            fixed_roots,
            fixed_uniformizer: (w1, k),
            unramified,
            z0: unramified.then_some(w1),
            norm_of_uniformizer: unramified.then_some(u),
        })
    }

    /// Whether the class has a representative fixing the standard subfield `K`.
    pub fn subfield_membership(&self, dc: &DoubleCoset, k: Subfield) -> bool {
        let f_k = self.params().f / k.f_rel;
        let g = self.group();
        // K/F unramified: only the residue degree matters
        dc.j % f_k == 0
            && (k.e_rel == self.params().e
                || dc
                    .multipliers
                    .iter()
                    .any(|u| g.pow_u(*u, k.e_rel as u128).is_one()))
    }

    /// Standard subfield validity: `K` contains `z_{E/F}`.
    pub fn check_subfield(&self, k: Subfield) -> Result<()> {
        let TameParams { e, f, .. } = self.params();
        if k.e_rel == 0 || k.f_rel == 0 || e % k.e_rel != 0 || f % k.f_rel != 0 {
            return Err(Error::InvalidTower(format!(
                "({}, {}) does not divide (e, f) = ({e}, {f})",
                k.e_rel, k.f_rel
            )));
        }
        let f_k = f / k.f_rel;
        if (k.e_rel, k.f_rel) != (e, f) && f_k % self.model.z_degree() != 0 {
            return Err(Error::InvalidTower(format!(
                "subfield with f(K/F) = {f_k} does not contain z_EF (degree {})",
                self.model.z_degree()
            )));
        }
        Ok(())
    }

    pub fn classify_and_count(&self) -> ParityReport {
        let TameParams { e, f, .. } = self.params();
        let count = |s: Symmetry| self.cosets.iter().filter(|c| c.symmetry == s).count();
        let sym_unram = count(Symmetry::SymmetricUnramified);
        let not_fixing = self
            .cosets
            .iter()
            .filter(|c| c.symmetry == Symmetry::SymmetricUnramified && !c.fixes_uniformizer)
            .count();
        let mut checks = vec![(
            "sym_unram_count_parity".to_string(),
            sym_unram % 2 == (e * (f - 1)) as usize % 2,
        )];
        checks.push((
            "sym_unram_degree_odd".to_string(),
            self.cosets
                .iter()
                .filter(|c| c.symmetry == Symmetry::SymmetricUnramified)
                .all(|c| c.t % 2 == 1),
        ));
        if f % 2 == 0 {
            let (fv, _) = self.model.f_varpi(1);
            checks.push((
                "sym_unram_not_fixing_parity".to_string(),
                not_fixing % 2 == (e + fv - 1) as usize % 2,
            ));
            let g = self.group();
            let half = f / 2;
            let c1 = self.embeddings.iter().any(|c| c.j == half && c.u.is_one());
            let c2 = self
                .embeddings
                .iter()
                .filter(|c| c.j == half)
                .all(|c| g.pow_u(c.u, e as u128).is_one());
            let c3 = g.contains(self.model.units(half), self.model.z);
            let c4 = fv % 2 == 0;
            checks.push((
                "fixing_root_equivalence".to_string(),
                c1 == c2 && c2 == c3 && c3 == c4,
            ));
            if c1 {
                let fixing: Vec<_> = self
                    .cosets
                    .iter()
                    .filter(|c| c.symmetry == Symmetry::SymmetricUnramified && c.fixes_uniformizer)
                    .collect();
                checks.push(("fixing_class_unique".to_string(), fixing.len() == 1));
            }
        }
        ParityReport {
            asymmetric: count(Symmetry::Asymmetric),
            sym_ram: count(Symmetry::SymmetricRamified),
            sym_unram,
            sym_unram_not_fixing: not_fixing,
            checks,
        }
    }
}

/// Solve `a·x ≡ c (mod m)`, returning the least nonnegative solution.
fn solve_linear(a: u128, c: u128, m: u128) -> Option<u128> {
    let a = a % m;
    let c = c % m;
    let g = a.gcd(&m);
    if c % g != 0 {
        return None;
    }
    let (a1, c1, m1) = (a / g, c / g, m / g);
    if m1 == 1 {
        return Some(0);
    }
    let ext = (a1 as i128).extended_gcd(&(m1 as i128));
    let inv = ext.x.rem_euclid(m1 as i128) as u128;
    Some(inv * c1 % m1)
}

fn double_cosets(
    model: &AmbientModel,
    embeddings: &[EmbeddingCoset],
) -> (Vec<DoubleCoset>, HashMap<EmbeddingCoset, usize>) {
    let f = model.params.f;
    let g = &model.group;
    let mut seen: HashMap<EmbeddingCoset, usize> = HashMap::new();
    let mut cosets: Vec<DoubleCoset> = Vec::new();
    let mut sorted: Vec<EmbeddingCoset> = embeddings.to_vec();
    sorted.sort();
    for c in sorted {
        if c == EmbeddingCoset::BASE || seen.contains_key(&c) {
            continue;
        }
        let orbit = model.residual_orbit(c.u);
        let id = cosets.len();
        for u in &orbit {
            seen.insert(EmbeddingCoset { j: c.j, u: *u }, id);
        }
        cosets.push(DoubleCoset {
            id,
            j: c.j,
            t: orbit.len() as u32,
            fixes_uniformizer: orbit.iter().any(|u| u.is_one()),
            is_sigma_half: c.j == 0 && Some(orbit[0]) == g.minus_one() && orbit.len() == 1,
            multipliers: orbit,
            symmetry: Symmetry::Asymmetric,
            inverse: usize::MAX,
        });
    }
    // Order classes by (j, least multiplier) so ids are stable.
    cosets.sort_by_key(|c| (c.j, c.multipliers[0]));
    for (i, c) in cosets.iter_mut().enumerate() {
        c.id = i;
        for u in &c.multipliers {
            seen.insert(EmbeddingCoset { j: c.j, u: *u }, i);
        }
    }
    for i in 0..cosets.len() {
        let inv = model.coset_inverse(cosets[i].rep());
        let k = seen[&inv];
        let c = &mut cosets[i];
        c.inverse = k;
        c.symmetry = if k != i {
            Symmetry::Asymmetric
        } else if c.j == 0 {
            Symmetry::SymmetricRamified
        } else {
            debug_assert_eq!(2 * c.j, f);
            Symmetry::SymmetricUnramified
        };
    }
    (cosets, seen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ext(q: u64, e: u32, f: u32, z: u128) -> TameExtension {
        TameExtension::new(TameParams::new(q, e, f, z).unwrap()).unwrap()
    }

    #[test]
    fn ambient_examples() {
        let m = build_ambient(TameParams::new(3, 2, 2, 0).unwrap()).unwrap();
        assert_eq!((m.degree, m.group.order), (4, 80));
        let m = build_ambient(TameParams::new(3, 1, 1, 0).unwrap()).unwrap();
        assert_eq!((m.degree, m.group.order), (1, 2));
        let m = build_ambient(TameParams::new(7, 3, 1, 0).unwrap()).unwrap();
        assert_eq!((m.degree, m.group.order), (3, 342));
        assert!(matches!(
            TameParams::new(3, 3, 1, 0),
            Err(Error::NotTame { .. })
        ));
        assert!(matches!(
            TameParams::new(6, 1, 1, 0),
            Err(Error::NotPrimePower(6))
        ));
    }

    #[test]
    fn embeddings_q3_e2_f2() {
        let x = ext(3, 2, 2, 0);
        let minus = x.group().minus_one().unwrap();
        let mut got = x.embeddings.clone();
        got.sort();
        let mut want = vec![
            EmbeddingCoset {
                j: 0,
                u: RootOfUnity::ONE,
            },
            EmbeddingCoset { j: 0, u: minus },
            EmbeddingCoset {
                j: 1,
                u: RootOfUnity::ONE,
            },
            EmbeddingCoset { j: 1, u: minus },
        ];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(x.cosets.len(), 3);
        let sig = x.sigma_half().unwrap();
        assert_eq!(sig.symmetry, Symmetry::SymmetricRamified);
        let unram: Vec<_> = x
            .cosets
            .iter()
            .filter(|c| c.symmetry == Symmetry::SymmetricUnramified)
            .collect();
        assert_eq!(unram.len(), 2);
        assert_eq!(unram.iter().filter(|c| c.fixes_uniformizer).count(), 1);
        let r = x.classify_and_count();
        assert_eq!((r.sym_unram, r.sym_unram_not_fixing), (2, 1));
        assert!(r.checks.iter().all(|c| c.1), "{:?}", r.checks);
    }

    #[test]
    fn cosets_q7_e3_f1() {
        let x = ext(7, 3, 1, 0);
        assert_eq!(x.cosets.len(), 2);
        assert!(x
            .cosets
            .iter()
            .all(|c| c.symmetry == Symmetry::Asymmetric && c.t == 1));
        assert_eq!(x.cosets[0].inverse, 1);
        assert_eq!(x.cosets[1].inverse, 0);
        let g = x.group();
        assert_eq!(g.element_order(x.cosets[0].u()), 3);
    }

    #[test]
    fn quadratic_unramified() {
        let x = ext(3, 1, 2, 0);
        assert_eq!(x.cosets.len(), 1);
        let c = &x.cosets[0];
        assert_eq!(c.symmetry, Symmetry::SymmetricUnramified);
        assert_eq!((c.j, c.u()), (1, RootOfUnity::ONE));
        let lam = x.root_character(c);
        let g = x.group();
        let z = x.model.zeta_e();
        assert_eq!(lam.on_mu(&x.model, z), g.pow(z, -2));
        assert!(lam.on_pi.is_one());
        let r = x.classify_and_count();
        assert_eq!(r.sym_unram, 1);
        assert!(r.checks.iter().all(|c| c.1));
    }

    #[test]
    fn trivial_extension() {
        let x = ext(3, 1, 1, 0);
        assert_eq!(x.embeddings, vec![EmbeddingCoset::BASE]);
        assert!(x.cosets.is_empty());
    }

    #[test]
    fn sigma_half_character() {
        let x = ext(3, 2, 2, 0);
        let sig = x.sigma_half().unwrap();
        let lam = x.root_character(sig);
        let g = x.group();
        assert!(lam.on_mu(&x.model, x.model.zeta_e()).is_one());
        assert_eq!(Some(lam.on_pi), g.minus_one());
    }

    #[test]
    fn membership_examples() {
        let x = ext(3, 2, 2, 0);
        let f_field = Subfield { e_rel: 2, f_rel: 2 };
        let e_field = Subfield { e_rel: 1, f_rel: 1 };
        let k = Subfield { e_rel: 1, f_rel: 2 };
        for c in &x.cosets {
            assert!(x.subfield_membership(c, f_field));
            assert!(!x.subfield_membership(c, e_field));
        }
        let c11 = x
            .class_of(EmbeddingCoset {
                j: 1,
                u: RootOfUnity::ONE,
            })
            .unwrap();
        assert!(x.subfield_membership(&x.cosets[c11], k));
    }

    #[test]
    fn f_varpi_examples() {
        assert_eq!(ext(3, 2, 2, 0).model.f_varpi(2), (2, 2));
        assert_eq!(ext(5, 2, 1, 3).model.f_varpi(1).0, 1);
        assert_eq!(ext(3, 1, 2, 1).model.f_varpi(1).0, 1);
    }

    #[test]
    fn epm_unramified_quadratic() {
        let x = ext(3, 1, 2, 0);
        let c = &x.cosets[0];
        let d = x.epm_descriptor(c).unwrap();
        assert!(d.unramified);
        // E_{±g} = F: fixed roots are mu_F
        assert_eq!(d.fixed_roots.order, 2);
        assert_eq!(d.norm_of_uniformizer, Some(RootOfUnity::ONE));
        let tau2 = x.model.compose(d.tau, d.tau);
        assert_eq!(tau2.w, RootOfUnity::ONE);
        assert_eq!(tau2.a % d.residue_degree as u128, 0);
    }

    #[test]
    fn epm_sigma_half_is_ramified() {
        let x = ext(3, 2, 2, 0);
        let d = x.epm_descriptor(x.sigma_half().unwrap()).unwrap();
        assert!(!d.unramified);
        assert_eq!(d.fixed_roots.order, x.model.mu_e().order);
        assert!(x.epm_descriptor(&ext(7, 3, 1, 0).cosets[0]).is_err());
    }

    fn params() -> impl Strategy<Value = TameParams> {
        let base = prop::sample::select(vec![
            (3u64, 1u32, 4u32),
            (3, 2, 2),
            (3, 4, 2),
            (5, 2, 2),
            (5, 3, 2),
            (7, 2, 3),
            (7, 6, 1),
            (9, 4, 2),
            (4, 3, 2),
            (11, 5, 2),
            (13, 4, 3),
        ]);
        (base, any::<u64>()).prop_map(|((q, e, f), z)| {
            let zmax = (q as u128).pow(f) - 1;
            TameParams::new(q, e, f, z as u128 % zmax).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cosets_partition_embeddings(p in params()) {
            let x = TameExtension::new(p).unwrap();
            prop_assert_eq!(x.embeddings.len() as u32, p.n());
            let total: usize = x.cosets.iter().map(|c| c.multipliers.len()).sum();
            prop_assert_eq!(total as u32, p.n() - 1);
            for c in &x.cosets {
                prop_assert_eq!(x.cosets[c.inverse].inverse, c.id);
                match c.symmetry {
                    Symmetry::SymmetricRamified => prop_assert_eq!(c.j, 0),
                    Symmetry::SymmetricUnramified => {
                        prop_assert_eq!(2 * c.j, p.f);
                        prop_assert_eq!(c.t % 2, 1);
                    }
                    Symmetry::Asymmetric => prop_assert_ne!(c.inverse, c.id),
                }
                prop_assert_eq!(x.model.degree % (p.f * c.t), 0);
                let lam = x.root_character(c);
                prop_assert!(lam.on_pi_f(&x.model).is_one());
                let zf = x.group().generator(x.model.mu_f());
                prop_assert!(lam.on_mu(&x.model, zf).is_one());
            }
            let r = x.classify_and_count();
            for (name, ok) in &r.checks {
                prop_assert!(*ok, "{} failed", name);
            }
        }

        #[test]
        fn action_is_a_group_action(p in params(), seeds in prop::collection::vec(any::<u64>(), 3)) {
            let x = TameExtension::new(p).unwrap();
            let m = &x.model;
            let pick = |s: u64| x.embeddings[(s as usize) % x.embeddings.len()];
            let g = m.lift(pick(seeds[0]));
            let h = m.lift(pick(seeds[1]));
            let c = pick(seeds[2]);
            prop_assert_eq!(m.act(m.identity(), c), c);
            prop_assert_eq!(m.act(m.compose(g, h), c), m.act(g, m.act(h, c)));
            prop_assert_eq!(m.compose(g, m.inverse(g)), m.identity());
            prop_assert!(m.galois_element(g.a, g.w).is_ok());
            prop_assert_eq!(m.act(g, EmbeddingCoset::BASE), pick(seeds[0]));
        }

        #[test]
        fn involutions_square_to_identity(p in params()) {
            let x = TameExtension::new(p).unwrap();
            for c in x.cosets.iter().filter(|c| c.is_symmetric()) {
                let d = x.epm_descriptor(c).unwrap();
                let t2 = x.model.compose(d.tau, d.tau);
                prop_assert!(t2.w.is_one());
                prop_assert_eq!(t2.a % d.residue_degree as u128, 0);
                let (w, k) = d.fixed_uniformizer;
                let g = x.group();
                // τ(w ϖ^k) = w^(q^a) u^k ϖ^k
                let image = g.mul(g.frob(w, d.tau.a), g.pow_u(d.tau.w, k as u128));
                prop_assert_eq!(image, w);
                if c.symmetry == Symmetry::SymmetricUnramified {
                    prop_assert!(d.unramified);
                }
            }
        }
    }
}
