mod common;

use common::{oracle, random_decomposition};
use kirby_core::algebra::AbelianGroup;
use kirby_core::handle::HandleDecomposition;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn decomposition() -> impl Strategy<Value = HandleDecomposition> {
    (any::<u64>(), 1usize..=5).prop_filter_map("invalid", |(seed, k)| {
        let h = random_decomposition(&mut ChaCha8Rng::seed_from_u64(seed), k, 4);
        (h.validate().is_empty() && h.invariant_report().is_ok()).then_some(h)
    })
}

/// Boundary sum: components side by side, nothing linking across.
fn boundary_sum(a: &HandleDecomposition, b: &HandleDecomposition) -> HandleDecomposition {
    let mut h = HandleDecomposition::empty("sum");
    for (tag, src) in [("a", a), ("b", b)] {
        for c in src.components() {
            let mut c = c.clone();
            c.id = format!("{tag}{}", c.id);
            h.push(c);
        }
        for ((x, y), v) in src.linking_entries() {
            h.set_linking(&format!("{tag}{x}"), &format!("{tag}{y}"), *v);
        }
    }
    h.three_handles = a.three_handles + b.three_handles;
    h
}

fn sum_groups(a: &AbelianGroup, b: &AbelianGroup) -> (usize, Vec<i64>) {
    // free rank and torsion order; the factors themselves may regroup
    let order = |g: &AbelianGroup| g.invariant_factors.iter().product::<i64>();
    (a.free_rank + b.free_rank, vec![order(a) * order(b)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn betti_identity(h in decomposition()) {
        let r = h.invariant_report().unwrap();
        let b1 = r.h1.free_rank as i64;
        prop_assert_eq!(r.h2_rank as i64, r.euler_characteristic - 1 + b1);
        let o = oracle(&h);
        prop_assert_eq!(o.euler, r.euler_characteristic);
        prop_assert_eq!(o.h2_rank, r.h2_rank);
    }

    #[test]
    fn invariants_add_under_boundary_sum(a in decomposition(), b in decomposition()) {
        let s = boundary_sum(&a, &b);
        let (ra, rb, rs) = (a.invariant_report().unwrap(), b.invariant_report().unwrap(), s.invariant_report().unwrap());
        prop_assert_eq!(rs.euler_characteristic, ra.euler_characteristic + rb.euler_characteristic - 1);
        prop_assert_eq!(rs.h2_rank, ra.h2_rank + rb.h2_rank);
        let order = |g: &AbelianGroup| g.invariant_factors.iter().product::<i64>();
        prop_assert_eq!((rs.h1.free_rank, vec![order(&rs.h1)]), sum_groups(&ra.h1, &rb.h1));
        prop_assert_eq!((rs.boundary_h1.free_rank, vec![order(&rs.boundary_h1)]), sum_groups(&ra.boundary_h1, &rb.boundary_h1));
        if let (Some(fa), Some(fb), Some(fs)) = (ra.form_invariants, rb.form_invariants, rs.form_invariants) {
            prop_assert_eq!(fs.signature, fa.signature + fb.signature);
            prop_assert_eq!(fs.rank, fa.rank + fb.rank);
        }
    }

    #[test]
    fn boundary_order_is_the_determinant(h in decomposition()) {
        prop_assume!(h.three_handles == 0);
        let det = h.linking_matrix().determinant().unwrap();
        let g = h.boundary_h1().unwrap();
        if det == 0 {
            prop_assert!(g.free_rank > 0);
        } else {
            prop_assert_eq!(g.free_rank, 0);
            prop_assert_eq!(g.invariant_factors.iter().product::<i64>(), det.abs());
        }
    }
}
