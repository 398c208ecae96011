//! Exhaustive and sampled parameter sweeps.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Flags, JumpConfig, RunConfig, RunConfigDoc, SCHEMA_VERSION};
use crate::cyclotomic::{checked_pow, prime_power};
use crate::error::{Error, Result};
use crate::galois::{Subfield, TameExtension, TameParams};
use crate::inner_form::{InnerForm, Tower};
use crate::report::{evaluate, HasseFingerprint};

fn default_qs() -> Vec<u64> {
    vec![3, 4, 5, 7, 8, 9, 11, 13]
}
fn default_n_max() -> u32 {
    12
}
fn default_one() -> u32 {
    1
}
fn default_levels() -> usize {
    3
}
fn default_orbit_limit() -> usize {
    1000
}
fn default_samples() -> usize {
    8
}
fn default_seed() -> u64 {
    0x5eed
}
fn default_true() -> bool {
    true
}

/// How `z_{E/F}` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZChoice {
    /// Every element of `μ_{q^f-1}`.
    All,
    /// One element per Frobenius orbit, sampled when there are too many.
    Orbits,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_schema")]
    pub schema: u32,
    #[serde(default = "default_qs")]
    pub q: Vec<u64>,
    #[serde(default = "default_one")]
    pub n_min: u32,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    /// Restrict to these `(e, f)`; empty means all factorizations.
    #[serde(default)]
    pub ef: Vec<(u32, u32)>,
    /// Restrict the division-algebra degree; empty means every divisor of `n`.
    #[serde(default)]
    pub d: Vec<u32>,
    #[serde(default = "default_true")]
    pub include_split: bool,
    #[serde(default = "default_z")]
    pub z: ZChoice,
    /// Above this many orbits the `z` values are sampled.
    #[serde(default = "default_orbit_limit")]
    pub orbit_limit: usize,
    /// Random `z` per subgroup `μ_{q^δ-1}` when sampling.
    #[serde(default = "default_samples")]
    pub z_samples: usize,
    #[serde(default = "default_levels")]
    pub max_tower_levels: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub flags: Flags,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_z() -> ZChoice {
    ZChoice::Orbits
}

impl Default for SweepSpec {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if self.schema != SCHEMA_VERSION {
            errors.push(format!("unsupported schema version {}", self.schema));
        }
        for &q in &self.q {
            if prime_power(q).is_none() {
                errors.push(format!("{q} is not a prime power"));
            }
        }
        if self.max_tower_levels == 0 {
            errors.push("max_tower_levels must be positive".into());
        }
        if self.jobs == Some(0) {
            errors.push("jobs must be positive".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }
}

pub fn parse_spec(text: &str) -> Result<SweepSpec> {
    let spec: SweepSpec = serde_json::from_str(text)
        .map_err(|e| Error::Config(vec![format!("malformed JSON: {e}")]))?;
    spec.validate()?;
    Ok(spec)
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Minimal element of the Frobenius orbit of `x` in `Z/P`.
fn orbit_min(x: u128, q: u128, p: u128) -> u128 {
    let mut best = x;
    let mut y = x * q % p;
    while y != x {
        best = best.min(y);
        y = y * q % p;
    }
    best
}

/// `z_{E/F}` exponents for `(q, f)` and whether they were sampled.
pub fn z_values(spec: &SweepSpec, q: u64, f: u32) -> Result<(Vec<u128>, bool)> {
    let p = checked_pow(q as u128, f).ok_or(Error::AmbientTooLarge { q, degree: f })? - 1;
    let q128 = q as u128;
    if spec.z == ZChoice::All {
        if p > 100_000 {
            return Err(Error::Config(vec![format!(
                "μ_{{{q}^{f}-1}} too large to enumerate"
            )]));
        }
        return Ok(((0..p).collect(), false));
    }
    // upper bound on the orbit count
    if p / f as u128 <= 4 * spec.orbit_limit as u128 {
        let reps: BTreeSet<u128> = (0..p).map(|x| orbit_min(x, q128, p)).collect();
        if reps.len() <= spec.orbit_limit {
            return Ok((reps.into_iter().collect(), false));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (q << 8) ^ f as u64);
    let mut out = BTreeSet::new();
    for delta in divisors(f) {
        let sub = checked_pow(q128, delta).unwrap() - 1;
        let step = p / sub;
        // generator, its square, -1 and 1 of each subfield, then random elements
        let mut picks = vec![step, 2 * step % p, 0];
        if sub % 2 == 0 {
            picks.push(p / 2);
        }
        for _ in 0..spec.z_samples {
            picks.push(rng.gen_range(0..sub) * step);
        }
        out.extend(picks.into_iter().map(|x| orbit_min(x, q128, p)));
    }
    Ok((out.into_iter().collect(), true))
}

/// Standard towers of at most `max_levels` fields compatible with `z`.
pub fn towers(ext: &TameExtension, max_levels: usize) -> Vec<Tower> {
    let TameParams { e, f, .. } = ext.params();
    let n = e * f;
    let fields: Vec<Subfield> = divisors(e)
        .into_iter()
        .flat_map(|e_rel| {
            divisors(f)
                .into_iter()
                .map(move |f_rel| Subfield { e_rel, f_rel })
        })
        .filter(|k| k.n_rel() < n && ext.check_subfield(*k).is_ok())
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<Subfield>> = fields
        .iter()
        .filter(|k| k.e_rel == 1)
        .map(|k| vec![*k])
        .collect();
    stack.reverse();
    while let Some(chain) = stack.pop() {
        let last = *chain.last().unwrap();
        if chain.len() < max_levels {
            for k in fields.iter().rev() {
                if k.e_rel % last.e_rel == 0
                    && k.f_rel % last.f_rel == 0
                    && k.n_rel() > last.n_rel()
                {
                    let mut c = chain.clone();
                    c.push(*k);
                    stack.push(c);
                }
            }
        }
        out.push(Tower { levels: chain });
    }
    out.sort_by(|a, b| {
        let key = |t: &Tower| {
            t.levels
                .iter()
                .map(|k| (k.e_rel, k.f_rel))
                .collect::<Vec<_>>()
        };
        key(a).cmp(&key(b))
    });
    out
}

/// The smallest strictly increasing positive jumps with each parity pattern.
pub fn jump_patterns(levels: usize) -> Vec<Vec<u64>> {
    (0..1u32 << levels)
        .map(|mask| {
            let mut out = Vec::with_capacity(levels);
            let mut prev = 0u64;
            for k in 0..levels {
                let odd = mask >> k & 1 == 1;
                let mut a = prev + 1;
                if (a % 2 == 1) != odd {
                    a += 1;
                }
                out.push(a);
                prev = a;
            }
            out
        })
        .collect()
}

/// Inner forms `(m, d, h)` with `d > 1` (plus the split form when asked).
fn inner_forms(spec: &SweepSpec, n: u32) -> Vec<Vec<InnerForm>> {
    let mut out = Vec::new();
    for d in divisors(n) {
        if !spec.d.is_empty() && !spec.d.contains(&d) {
            continue;
        }
        if d == 1 {
            if spec.include_split {
                out.push(vec![InnerForm::split(n)]);
            }
            continue;
        }
        let forms: Vec<InnerForm> = (1..d)
            .filter(|h| num_integer::gcd(*h, d) == 1)
            .map(|h| InnerForm { m: n / d, d, h })
            .collect();
        out.push(forms);
    }
    out
}

/// One extension `(q, e, f, z)`; the unit of parallel work.
#[derive(Clone, Debug)]
struct Unit {
    params: TameParams,
}

fn units(spec: &SweepSpec) -> Result<(Vec<Unit>, bool)> {
    let mut out = Vec::new();
    let mut sampled = false;
    for &q in &spec.q {
        let (p, _) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        for n in spec.n_min.max(1)..=spec.n_max {
            for e in divisors(n) {
                let f = n / e;
                if e as u64 % p == 0 || (!spec.ef.is_empty() && !spec.ef.contains(&(e, f))) {
                    continue;
                }
                let (zs, s) = z_values(spec, q, f)?;
                sampled |= s;
                for z in zs {
                    out.push(Unit {
                        params: TameParams::new(q, e, f, z)?,
                    });
                }
            }
        }
    }
    Ok((out, sampled))
}

fn unit_configs(spec: &SweepSpec, ext: &TameExtension) -> Vec<Vec<JumpConfig>> {
    let params = ext.params();
    let mut groups = Vec::new();
    for tower in towers(ext, spec.max_tower_levels) {
        for jumps in jump_patterns(tower.levels.len()) {
            for forms in inner_forms(spec, params.n()) {
                groups.push(
                    forms
                        .into_iter()
                        .map(|form| JumpConfig {
                            params,
                            tower: tower.clone(),
                            jumps: jumps.clone(),
                            form,
                        })
                        .collect(),
                );
            }
        }
    }
    groups
}

/// A failing check, with the configuration needed to replay it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub check: String,
    pub config: RunConfigDoc,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: u64,
    pub fail: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema: u32,
    pub spec: Option<SweepSpec>,
    pub extensions: u64,
    pub configs: u64,
    pub z_sampled: bool,
    pub tallies: BTreeMap<String, Tally>,
    /// Configurations whose modules contain a Full-level class lying in `Γ_{E_k}`.
    pub inner_class_flags: u64,
    /// Configurations whose modules contain `U_{[σ^{e/2}]}`.
    pub sigma_half_present: u64,
    pub failures: Vec<FailureRecord>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, name: &str, ok: bool) {
        let t = self.tallies.entry(name.to_string()).or_default();
        if ok {
            t.pass += 1;
        } else {
            t.fail += 1;
        }
    }

    fn merge(&mut self, other: SweepSummary) {
        self.extensions += other.extensions;
        self.configs += other.configs;
        self.inner_class_flags += other.inner_class_flags;
        self.sigma_half_present += other.sigma_half_present;
        for (k, t) in other.tallies {
            let e = self.tallies.entry(k).or_default();
            e.pass += t.pass;
            e.fail += t.fail;
        }
        self.failures.extend(other.failures);
    }
}

fn run_unit(spec: &SweepSpec, unit: &Unit) -> SweepSummary {
    let mut s = SweepSummary {
        extensions: 1,
        ..Default::default()
    };
    let ext = match TameExtension::new(unit.params) {
        Ok(x) => x,
        Err(e) => {
            s.record("setup", false);
            s.failures.push(FailureRecord {
                check: "setup".into(),
                config: RunConfigDoc {
                    schema: SCHEMA_VERSION,
                    q: unit.params.q,
                    e: unit.params.e,
                    f: unit.params.f,
                    z_ef: unit.params.z_ef,
                    tower: vec![],
                    jumps: vec![],
                    m: unit.params.n(),
                    d: 1,
                    h: 0,
                    flags: spec.flags.clone(),
                },
                detail: e.to_string(),
            });
            return s;
        }
    };
    for group in unit_configs(spec, &ext) {
        let mut fingerprints: Vec<(JumpConfig, HasseFingerprint)> = Vec::new();
        for cfg in group {
            s.configs += 1;
            let rc = RunConfig {
                config: cfg.clone(),
                flags: spec.flags.clone(),
            };
            let doc = RunConfigDoc::from_config(&cfg, spec.flags.clone());
            match evaluate(&ext, &rc) {
                Ok(ev) => {
                    let r = &ev.report;
                    for (name, v) in r.verdicts.named() {
                        if let Some(ok) = v {
                            s.record(name, ok);
                            if !ok {
                                s.failures.push(FailureRecord {
                                    check: name.into(),
                                    config: doc.clone(),
                                    detail: String::new(),
                                });
                            }
                        }
                    }
                    s.inner_class_flags += (!r.a_side.inner_flags.is_empty()
                        || !r.m_side.inner_flags.is_empty())
                        as u64;
                    s.sigma_half_present += r.sigma_half_present as u64;
                    fingerprints.push((cfg, ev.fingerprint));
                }
                Err(e) => {
                    s.record("evaluation", false);
                    s.failures.push(FailureRecord {
                        check: "evaluation".into(),
                        config: doc,
                        detail: e.to_string(),
                    });
                }
            }
        }
        if fingerprints.len() > 1 {
            let (_, first) = &fingerprints[0];
            for (cfg, fp) in &fingerprints[1..] {
                let ok = fp == first;
                s.record("hasse_independence", ok);
                if !ok {
                    s.failures.push(FailureRecord {
                        check: "hasse_independence".into(),
                        config: RunConfigDoc::from_config(cfg, spec.flags.clone()),
                        detail: format!("differs from h = {}", fingerprints[0].0.form.h),
                    });
                }
            }
        }
    }
    s
}

/// Number of configurations a sweep spec enumerates.
pub fn count_configs(spec: &SweepSpec) -> Result<u64> {
    let (units, _) = units(spec)?;
    let counts: Vec<u64> = units
        .par_iter()
        .map(|u| match TameExtension::new(u.params) {
            Ok(ext) => unit_configs(spec, &ext)
                .iter()
                .map(|g| g.len() as u64)
                .sum(),
            Err(_) => 0,
        })
        .collect();
    Ok(counts.iter().sum())
}

/// Runs the sweep on `jobs` worker threads (all cores when `None`).
pub fn sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepSummary> {
    spec.validate()?;
    let (units, sampled) = units(spec)?;
    let work = || -> Vec<SweepSummary> { units.par_iter().map(|u| run_unit(spec, u)).collect() };
    let parts = match jobs.or(spec.jobs) {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(work),
        None => work(),
    };
    let mut out = SweepSummary {
        schema: SCHEMA_VERSION,
        spec: Some(spec.clone()),
        z_sampled: sampled,
        ..Default::default()
    };
    for p in parts {
        out.merge(p);
    }
    Ok(out)
}
