use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sl4coh::complex::{cohomology_rank, retract, EquivariantComplex, Ring, DEFAULT_TOP};
use sl4coh::coset::{CosetSpace, BASE_POINT};
use sl4coh::lattice::Mat4;
use sl4coh::linalg::normalize;
use sl4coh::sharbly::{double_coset_reps, hecke_image, lift_chain, reduce_cycle, CellTable};
use sl4coh::Error;

fn elementary(i: usize, j: usize, c: i64) -> Mat4 {
    let mut m = Mat4::diag([1; 4]);
    m.0[i][j] = c;
    m
}

fn arb_sl4() -> impl Strategy<Value = Mat4> {
    prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 1..6).prop_map(|ops| {
        ops.into_iter().filter(|(i, j, _)| i != j).fold(Mat4::diag([1; 4]), |m, (i, j, c)| m.mul(&elementary(i, j, c)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coset_action_is_a_right_action(n in 2u64..40, g in arb_sl4(), h in arb_sl4(), seed in any::<u64>()) {
        let s = CosetSpace::new(n).unwrap();
        let x = (seed % s.len() as u64) as usize;
        prop_assert_eq!(s.act(s.act(x, &g), &h), s.act(x, &g.mul(&h)));
        prop_assert_eq!(s.act(x, &Mat4::diag([1; 4])), x);
    }
}

#[test]
fn coset_action_is_transitive() {
    for n in [2u64, 6, 9, 11, 12] {
        let s = CosetSpace::new(n).unwrap();
        let gens: Vec<Mat4> =
            (0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| elementary(i, j, 1))).collect();
        let mut seen = vec![false; s.len()];
        let mut stack = vec![BASE_POINT];
        seen[BASE_POINT] = true;
        while let Some(x) = stack.pop() {
            for g in &gens {
                let y = s.act(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        assert!(seen.iter().all(|&b| b), "level {n}");
    }
}

#[test]
fn retract_shape() {
    let r = retract();
    assert_eq!(r.perfect_forms.len(), 2);
    let counts: Vec<usize> = r.orbit_counts().iter().map(|c| c.1).collect();
    assert_eq!(counts, vec![1, 3, 4, 4, 2, 2, 2]);
    assert_eq!(r.stabilizer_primes(), vec![2, 3, 5]);
}

#[test]
fn small_characteristics_are_refused() {
    for p in [2u32, 3, 5] {
        assert!(matches!(cohomology_rank(7, Ring::Fp(p)), Err(Error::UnsupportedCharacteristic { .. })), "p = {p}");
    }
    assert!(cohomology_rank(7, Ring::Fp(7)).is_ok());
}

#[test]
fn boundaries_compose_to_zero_to_level_20() {
    for n in 1..=20 {
        let c = EquivariantComplex::build(n, Ring::Z, 3).unwrap();
        for k in 2..=3 {
            assert!(c.boundaries[k].mul(&c.boundaries[k - 1]).is_zero(), "level {n} degree {k}");
        }
    }
}

#[test]
fn integral_rank_matches_mod_p_rank() {
    for n in [9u64, 11, 14, 16] {
        let z = sl4coh::complex::integral_cohomology(n, Default::default()).unwrap();
        assert_eq!(z.free_rank, cohomology_rank(n, Ring::DEFAULT).unwrap(), "level {n}");
    }
}

/// The Hecke image of a cycle and of the same cycle plus a boundary have
/// the same class, although the reductions follow different paths.
#[test]
fn hecke_images_are_path_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = EquivariantComplex::build(11, Ring::DEFAULT, DEFAULT_TOP).unwrap();
    let hb = c.homology_basis().unwrap();
    let f = hb.field;
    let table = CellTable::new();
    let dc = double_coset_reps(2, 1).unwrap();
    let d2 = &c.boundaries[2];
    for z in &hb.cycles {
        let mut w: Vec<(u32, u32)> = z.clone();
        for _ in 0..4 {
            let r = rng.gen_range(0..d2.nrows);
            let a = rng.gen_range(1..f.p);
            w.extend(d2.rows[r].iter().map(|&(j, v)| (j, f.mul(a, f.from_i64(v)))));
        }
        let w = normalize(&f, w);
        let image = |x: &Vec<(u32, u32)>| {
            let lifted = lift_chain(&f, &c, x);
            let img = hecke_image(&f, &c.space, &lifted, &dc).unwrap();
            let (red, _) = reduce_cycle(&f, &c, &table, &img, 50_000_000).unwrap();
            hb.coordinates(&red).unwrap()
        };
        assert_eq!(image(z), image(&w));
    }
}
