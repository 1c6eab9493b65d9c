mod common;

use common::{random_knot_grid, tb_by_pushoff};
use kirby_core::handle::{Component, HandleDecomposition};
use kirby_core::legendrian::{stabilize_at, stein_check, torus_knot_grid, GridDiagram, Quadrant};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn knot() -> impl Strategy<Value = GridDiagram> {
    (any::<u64>(), 2usize..=9).prop_map(|(seed, n)| random_knot_grid(&mut ChaCha8Rng::seed_from_u64(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn tb_plus_rot_is_odd(g in knot()) {
        let inv = g.invariants().unwrap();
        prop_assert_eq!((inv.tb + inv.rot).rem_euclid(2), 1);
        prop_assert_eq!(inv.cusp_count % 2, 0);
    }

    #[test]
    fn tb_matches_pushoff_linking(g in knot()) {
        prop_assert_eq!(g.invariants().unwrap().tb, tb_by_pushoff(&g));
    }

    #[test]
    fn cyclic_translation_is_an_isotopy(g in knot(), dc in 0usize..9, dr in 0usize..9) {
        let a = g.invariants().unwrap();
        let b = g.translate(dc, dr).invariants().unwrap();
        prop_assert_eq!((a.tb, a.rot), (b.tb, b.rot));
    }

    #[test]
    fn stabilization_contract(g in knot(), c in 0usize..9) {
        let c = c % g.size();
        let base = g.invariants().unwrap();
        let nw = stabilize_at(&g, c, Quadrant::NW).invariants().unwrap();
        let se = stabilize_at(&g, c, Quadrant::SE).invariants().unwrap();
        prop_assert_eq!((nw.tb, nw.rot), (base.tb - 1, base.rot + 1));
        prop_assert_eq!((se.tb, se.rot), (base.tb - 1, base.rot - 1));
        for q in [Quadrant::NE, Quadrant::SW] {
            let s = stabilize_at(&g, c, q);
            prop_assert_eq!(s.size(), g.size() + 1);
            let i = s.invariants().unwrap();
            prop_assert_eq!((i.tb, i.rot), (base.tb, base.rot));
        }
    }

    #[test]
    fn stein_condition_is_monotone(g in knot(), framing in -12i64..6) {
        let tb = g.invariants().unwrap().tb;
        let h = |f: i64, grid: GridDiagram| {
            HandleDecomposition::empty("k").with(Component::two_handle("k", f).with_grid(grid))
        };
        let ok = stein_check(&h(framing, g.clone())).stein;
        prop_assert_eq!(ok, framing <= tb - 1);
        if ok {
            prop_assert!(stein_check(&h(framing - 1, g.clone())).stein);
        }
        // stabilizing lowers tb, so a handle at the threshold stops passing
        let at_threshold = h(tb - 1, stabilize_at(&g, 0, Quadrant::NW));
        prop_assert!(!stein_check(&at_threshold).stein);
    }
}

#[test]
fn torus_tb_against_pushoff() {
    for p in 2u32..=9 {
        for q in 1..p {
            if let Ok(g) = torus_knot_grid(p, q) {
                let expected = i64::from(p * q) - i64::from(p + q);
                assert_eq!(g.invariants().unwrap().tb, expected, "({p},{q})");
                assert_eq!(tb_by_pushoff(&g), expected, "({p},{q})");
            }
        }
    }
    assert_eq!(tb_by_pushoff(&GridDiagram::unknot()), -1);
}
