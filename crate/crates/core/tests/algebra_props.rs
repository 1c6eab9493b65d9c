mod common;

use common::{factors_by_elimination, factors_by_minors, random_matrix};
use kirby_core::algebra::{
    cokernel, form_invariants, forms_equivalent, kernel_basis, smith_normal_form, Equivalence,
    IntegerMatrix, Parity, SymmetricForm,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn nonunit(v: Vec<i64>) -> Vec<i64> {
    v.into_iter().filter(|&d| d >= 2).collect()
}

#[test]
fn snf_matches_two_oracles_on_3x3() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let rows = random_matrix(&mut rng, 3, 3, 3);
        let m = IntegerMatrix::from_rows(&rows).unwrap();
        let snf = smith_normal_form(&m).unwrap();
        let ours = snf.invariant_factors();
        assert_eq!(ours, factors_by_minors(&rows), "{rows:?}");
        assert_eq!(ours, factors_by_elimination(&rows), "{rows:?}");
        let g = cokernel(&m).unwrap();
        assert_eq!(g.free_rank, 3 - ours.len());
        assert_eq!(g.invariant_factors, nonunit(ours));
    }
}

fn matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r)
    })
}

fn unimodular(n: usize) -> impl Strategy<Value = IntegerMatrix> {
    prop::collection::vec((0..n, 0..n, -2i64..=2), 0..8).prop_map(move |ops| {
        let mut t = IntegerMatrix::identity(n);
        for (i, j, k) in ops {
            if i != j {
                let mut e = IntegerMatrix::identity(n);
                let mut rows = e.to_rows();
                rows[i][j] = k;
                e = IntegerMatrix::from_rows(&rows).unwrap();
                t = t.mul(&e).unwrap();
            }
        }
        t
    })
}

fn symmetric(max: usize, bound: i64) -> impl Strategy<Value = SymmetricForm> {
    (1..=max).prop_flat_map(move |n| {
        prop::collection::vec(-bound..=bound, n * n).prop_map(move |v| {
            let mut rows = vec![vec![0; n]; n];
            for i in 0..n {
                for j in i..n {
                    rows[i][j] = v[i * n + j];
                    rows[j][i] = v[i * n + j];
                }
            }
            SymmetricForm::new(IntegerMatrix::from_rows(&rows).unwrap()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn snf_certificate(rows in matrix(4, 4, 9)) {
        let m = IntegerMatrix::from_rows(&rows).unwrap();
        let s = smith_normal_form(&m).unwrap();
        prop_assert_eq!(s.u.mul(&m).unwrap().mul(&s.v).unwrap(), s.d.clone());
        prop_assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntegerMatrix::identity(m.rows()));
        prop_assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntegerMatrix::identity(m.cols()));
        let f = s.invariant_factors();
        prop_assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
        prop_assert!(f.iter().all(|&d| d > 0));
        prop_assert_eq!(f, factors_by_minors(&rows));
    }

    #[test]
    fn kernel_basis_is_a_summand_basis(rows in matrix(3, 5, 4)) {
        let m = IntegerMatrix::from_rows(&rows).unwrap();
        let k = kernel_basis(&m).unwrap();
        let rank = factors_by_minors(&rows).len();
        prop_assert_eq!(k.cols(), m.cols() - rank);
        prop_assert!(m.mul(&k).unwrap().is_zero());
        // a summand: the columns extend to a basis, so their gcd of maximal minors is 1
        if k.cols() > 0 {
            let kr = k.transpose().to_rows();
            prop_assert!(factors_by_minors(&kr).iter().all(|&d| d == 1));
        }
    }

    #[test]
    fn form_invariants_survive_congruence(q in symmetric(4, 6), t in unimodular(4)) {
        let n = q.dim();
        let idx: Vec<usize> = (0..n).collect();
        let t = t.select(&idx, &idx);
        // restrict to the top-left block; still unimodular only if det is ±1
        prop_assume!(t.determinant().unwrap().abs() == 1);
        let a = form_invariants(&q).unwrap();
        let b = form_invariants(&q.transform(&t).unwrap()).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.signature.unsigned_abs() as usize <= a.rank);
        let even = (0..n).all(|i| q.matrix()[(i, i)] % 2 == 0);
        prop_assert_eq!(a.parity == Parity::Even, even);
    }

    #[test]
    fn equivalence_finds_small_transforms(q in symmetric(2, 4), t in unimodular(2)) {
        prop_assume!(t.to_rows().iter().flatten().all(|x| x.abs() <= 3));
        prop_assume!(q.dim() == 2);
        let q2 = q.transform(&t).unwrap();
        match forms_equivalent(&q, &q2, 3).unwrap() {
            Equivalence::Equivalent { witness } => {
                prop_assert_eq!(q.transform(&witness).unwrap(), q2);
                prop_assert_eq!(witness.determinant().unwrap().abs(), 1);
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
