use proptest::prelude::*;

use tamejl::config::JumpConfig;
use tamejl::cyclotomic::Qz;
use tamejl::galois::{Subfield, Symmetry, TameExtension, TameParams};
use tamejl::inner_form::{InnerForm, Tower};
use tamejl::sweep::{jump_patterns, towers};
use tamejl::zeta::{
    assign_zeta, assign_zeta_with_split, functorial_check, rectifier, restrict_product,
    verify_chi_conditions, verify_main_theorem, Modules, TameCharacter,
};

fn ext(q: u64, e: u32, f: u32, z: u128) -> TameExtension {
    TameExtension::new(TameParams::new(q, e, f, z).unwrap()).unwrap()
}

/// Every configuration of an extension with the given `d`.
fn configs(x: &TameExtension, d: u32) -> Vec<JumpConfig> {
    let params = x.params();
    let n = params.n();
    let mut out = Vec::new();
    for tower in towers(x, 3) {
        for jumps in jump_patterns(tower.levels.len()) {
            let hs: Vec<u32> = if d == 1 {
                vec![0]
            } else {
                (1..d).filter(|h| num_integer::gcd(*h, d) == 1).collect()
            };
            for h in hs {
                out.push(JumpConfig {
                    params,
                    tower: tower.clone(),
                    jumps: jumps.clone(),
                    form: InnerForm { m: n / d, d, h },
                });
            }
        }
    }
    out
}

#[test]
fn coset_table_of_smallest_mixed_example() {
    let x = ext(3, 2, 2, 0);
    let rows: Vec<_> = x
        .cosets
        .iter()
        .map(|c| (c.j, c.u().exponent, c.symmetry, c.fixes_uniformizer))
        .collect();
    let minus_one = x.group().minus_one().unwrap().exponent;
    assert_eq!(
        rows,
        vec![
            (0, minus_one, Symmetry::SymmetricRamified, false),
            (1, 0, Symmetry::SymmetricUnramified, true),
            (1, minus_one, Symmetry::SymmetricUnramified, false),
        ]
    );
    assert!(x.cosets[0].is_sigma_half);
}

#[test]
fn every_class_lies_in_gamma_f() {
    for (q, e, f) in [(5, 2, 4), (7, 3, 2), (3, 4, 3)] {
        let p = (q as u128).pow(f) - 1;
        for z in [1, p / 2, p - 1] {
            let x = ext(q, e, f, z);
            let top = Subfield { e_rel: e, f_rel: f };
            assert!(x.cosets.iter().all(|c| x.subfield_membership(c, top)));
            x.check_subfield(top).unwrap();
        }
    }
}

#[test]
fn split_form_gives_trivial_rectifier() {
    for (q, e, f) in [(3, 2, 2), (5, 4, 2), (7, 2, 3), (4, 3, 2)] {
        let x = ext(q, e, f, 0);
        for c in configs(&x, 1) {
            let r = rectifier(&x, &c).unwrap();
            assert!(
                r.on_mu_generator.is_trivial() && r.on_pi.is_trivial(),
                "{c:?}"
            );
        }
    }
}

#[test]
fn odd_residue_degree_families() {
    for (q, e, f, d) in [
        (7, 3, 1, 3),
        (4, 3, 3, 3),
        (5, 4, 1, 2),
        (5, 2, 3, 2),
        (7, 4, 3, 4),
    ] {
        let x = ext(q, e, f, 0);
        let sig = x.sigma_half().map(|c| c.id);
        for c in configs(&x, d) {
            let fam = assign_zeta(&x, &c).unwrap();
            for (i, z) in fam.members.iter().enumerate() {
                let want = if Some(i) == sig && c.form.m % 2 == 1 {
                    Qz::HALF
                } else {
                    Qz::ZERO
                };
                assert!(z.character.on_mu_generator.is_trivial(), "{c:?}");
                assert_eq!(z.character.on_pi, want, "{c:?} class {i}");
            }
            let p = restrict_product(&x, &fam);
            let want = if e % 2 == 0 && c.form.m % 2 == 1 {
                Qz::HALF
            } else {
                Qz::ZERO
            };
            assert_eq!(p.on_pi, want);
        }
    }
}

#[test]
fn even_residue_degree_even_m_has_trivial_sym_unram_data() {
    for (q, e, f, d) in [(3, 1, 4, 2), (5, 2, 2, 2), (3, 2, 4, 2)] {
        let x = ext(q, e, f, 0);
        for c in configs(&x, d).into_iter().filter(|c| c.form.m % 2 == 0) {
            let fam = assign_zeta(&x, &c).unwrap();
            for dc in x
                .cosets
                .iter()
                .filter(|c| c.symmetry == Symmetry::SymmetricUnramified)
            {
                let z = fam.members[dc.id].character;
                assert!(
                    z.on_mu_generator.is_trivial() && z.on_pi.is_trivial(),
                    "{c:?}"
                );
            }
        }
    }
}

#[test]
fn maximal_unramified_subfield_sees_the_ramified_part() {
    for (q, e, f, d) in [(3, 2, 2, 2), (5, 4, 2, 2), (5, 2, 4, 4), (7, 3, 2, 3)] {
        let x = ext(q, e, f, 0);
        let k = Subfield { e_rel: e, f_rel: 1 };
        for c in configs(&x, d) {
            let r = functorial_check(&x, &c, k).unwrap();
            assert!(r.passes, "{c:?}");
            assert!(r.rectifier.on_mu_generator.is_trivial());
            let m_k = num_integer::gcd(c.form.m, e);
            let want = if (e - m_k) % 2 == 1 {
                Qz::HALF
            } else {
                Qz::ZERO
            };
            assert_eq!(r.rectifier.on_pi, want, "{c:?}");
        }
    }
}

#[test]
fn unramified_quadratic_character_is_a_chi_datum() {
    for (q, e, f) in [(3, 2, 2), (5, 1, 4), (3, 2, 4), (7, 3, 2)] {
        let x = ext(q, e, f, 0);
        for dc in x
            .cosets
            .iter()
            .filter(|c| c.symmetry == Symmetry::SymmetricUnramified)
        {
            if !x.epm_descriptor(dc).unwrap().unramified {
                continue;
            }
            let delta = TameCharacter {
                on_pi: Qz::HALF,
                ..TameCharacter::trivial(Some(dc.id), f * dc.t)
            };
            assert!(verify_chi_conditions(&x, &delta, dc).unwrap().passes());
        }
    }
}

#[test]
fn towers_reject_fields_missing_z() {
    let x = ext(3, 1, 4, 1);
    let bad = Tower {
        levels: vec![Subfield { e_rel: 1, f_rel: 2 }],
    };
    assert!(bad.validate(&x).is_err());
}

fn arb_config() -> impl Strategy<Value = (TameExtension, JumpConfig)> {
    let shapes = vec![
        (3u64, 2u32, 2u32),
        (5, 2, 2),
        (5, 4, 1),
        (7, 3, 2),
        (3, 2, 3),
        (4, 3, 2),
        (9, 2, 2),
        (5, 2, 4),
    ];
    (
        prop::sample::select(shapes),
        any::<u64>(),
        any::<u64>(),
        any::<u64>(),
    )
        .prop_map(|((q, e, f), zs, ts, fs)| {
            let p = (q as u128).pow(f) - 1;
            let x = ext(q, e, f, zs as u128 % p);
            let ts_list = towers(&x, 3);
            let tower = ts_list[(ts % ts_list.len() as u64) as usize].clone();
            let js = jump_patterns(tower.levels.len());
            let jumps = js[(fs % js.len() as u64) as usize].clone();
            let n = e * f;
            let ds: Vec<u32> = (1..=n).filter(|d| n % d == 0).collect();
            let d = ds[(fs >> 8) as usize % ds.len()];
            let hs: Vec<u32> = if d == 1 {
                vec![0]
            } else {
                (1..d).filter(|h| num_integer::gcd(*h, d) == 1).collect()
            };
            let h = hs[(fs >> 16) as usize % hs.len()];
            let c = JumpConfig {
                params: x.params(),
                tower,
                jumps,
                form: InnerForm { m: n / d, d, h },
            };
            (x, c)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn theorem_holds_and_rectifier_is_quadratic((x, c) in arb_config()) {
        let rep = verify_main_theorem(&x, &c).unwrap();
        prop_assert!(rep.verdict);
        prop_assert!(rep.rectifier.is_quadratic());
    }

    #[test]
    fn free_split_never_matters((x, c) in arb_config(), num in 0u128..12, den in 1u128..12) {
        let modules = Modules::new(&x, &c).unwrap();
        let base = restrict_product(&x, &assign_zeta_with_split(&x, &modules, c.form.m, Qz::ZERO).unwrap());
        let alt = restrict_product(&x, &assign_zeta_with_split(&x, &modules, c.form.m, Qz::new(num, den)).unwrap());
        prop_assert_eq!(base, alt);
    }

    #[test]
    fn every_tower_level_is_functorial((x, c) in arb_config()) {
        for k in 0..=c.tower.t() as i32 + 1 {
            let field = c.tower.field(k, &x.params());
            prop_assert!(functorial_check(&x, &c, field).unwrap().passes);
        }
    }
}
