//! Oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use kirby_core::algebra::Parity;
use kirby_core::handle::{Component, HandleDecomposition};
use kirby_core::legendrian::GridDiagram;
use kirby_core::moves::{Move, Sign};
use rand::seq::SliceRandom;
use rand::Rng;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors (including 1s, excluding zeros) from determinantal
/// divisors: `d_k` is the gcd of all `k x k` minors, `s_k = d_k / d_{k-1}`.
pub fn factors_by_minors(m: &[Vec<i64>]) -> Vec<i64> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut prev = 1;
    for k in 1..=rows.min(cols) {
        let mut d = 0;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j]).collect()).collect();
                d = gcd(d, det(&sub));
            }
        }
        if d == 0 {
            break;
        }
        out.push(d / prev);
        prev = d;
    }
    out
}

/// Diagonal reduction by plain elementary operations: move the smallest
/// nonzero entry of the remaining block to the corner, reduce its row and
/// column by quotients, repeat; once both are clear, fold in any row the
/// corner does not divide. Returns the nonzero diagonal, sorted.
pub fn factors_by_elimination(m: &[Vec<i64>]) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let Some((i, j)) = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs())
            else {
                break;
            };
            a.swap(t, i);
            for r in a.iter_mut() {
                r.swap(t, j);
            }
            let p = a[t][t];
            for i in t + 1..rows {
                let q = a[i][t] / p;
                for c in t..cols {
                    a[i][c] -= q * a[t][c];
                }
            }
            for j in t + 1..cols {
                let q = a[t][j] / p;
                for r in a.iter_mut() {
                    r[j] -= q * r[t];
                }
            }
            let clear = (t + 1..rows).all(|i| a[i][t] == 0) && (t + 1..cols).all(|j| a[t][j] == 0);
            if !clear {
                continue;
            }
            match (t + 1..rows).find(|&i| (t + 1..cols).any(|j| a[i][j] % p != 0)) {
                Some(i) => {
                    for c in t..cols {
                        a[t][c] += a[i][c];
                    }
                }
                None => break,
            }
        }
        if a[t][t] == 0 {
            break;
        }
        diag.push(i64::try_from(a[t][t].abs()).expect("invariant factor fits i64"));
    }
    diag.sort_unstable();
    diag
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

/// Random single-component grid of size `n`.
pub fn random_knot_grid(rng: &mut impl Rng, n: usize) -> GridDiagram {
    loop {
        let mut x: Vec<usize> = (0..n).collect();
        let mut o: Vec<usize> = (0..n).collect();
        x.shuffle(rng);
        o.shuffle(rng);
        if let Ok(g) = GridDiagram::knot(x, o) {
            return g;
        }
    }
}

/// tb as the linking number of the knot with its push-off in the front's
/// vertical direction, which in the grid is a shift by `(1/2, 1/2)`.
/// Coordinates are doubled so everything is an integer.
pub fn tb_by_pushoff(g: &GridDiagram) -> i64 {
    let n = g.size();
    let x = g.x_positions();
    let o = g.o_positions();
    let mut x_col = vec![0; n];
    let mut o_col = vec![0; n];
    for c in 0..n {
        x_col[x[c]] = c;
        o_col[o[c]] = c;
    }
    // (position, from, to) with direction from -> to
    let verticals = |s: i64| -> Vec<(i64, i64, i64)> {
        (0..n).map(|c| (2 * c as i64 + s, 2 * o[c] as i64 + s, 2 * x[c] as i64 + s)).collect()
    };
    let horizontals = |s: i64| -> Vec<(i64, i64, i64)> {
        (0..n).map(|r| (2 * r as i64 + s, 2 * x_col[r] as i64 + s, 2 * o_col[r] as i64 + s)).collect()
    };
    let crossings = |vs: &[(i64, i64, i64)], hs: &[(i64, i64, i64)]| -> i64 {
        let mut total = 0;
        for &(vx, v0, v1) in vs {
            for &(hy, h0, h1) in hs {
                let inside_v = v0.min(v1) < hy && hy < v0.max(v1);
                let inside_h = h0.min(h1) < vx && vx < h0.max(h1);
                if inside_v && inside_h {
                    let dv = (v1 - v0).signum();
                    let dh = (h1 - h0).signum();
                    total += -dv * dh;
                }
            }
        }
        total
    };
    let sum = crossings(&verticals(0), &horizontals(1)) + crossings(&verticals(1), &horizontals(0));
    assert_eq!(sum % 2, 0);
    sum / 2
}

/// Random valid decomposition: up to 2 dotted circles, 2-handles filling
/// up to `max_components`, framings and linking in `[-bound, bound]`
/// (dotted circles linked with 2-handles mostly by 0 or ±1).
pub fn random_decomposition(rng: &mut impl Rng, max_components: usize, bound: i64) -> HandleDecomposition {
    let dotted = rng.gen_range(0..=2.min(max_components - 1));
    let two = rng.gen_range(1..=max_components - dotted);
    let mut h = HandleDecomposition::empty("random");
    for i in 0..dotted {
        h.push(Component::dotted(format!("d{}", i + 1)));
    }
    for i in 0..two {
        h.push(Component::two_handle(format!("h{}", i + 1), rng.gen_range(-bound..=bound)));
    }
    let ids: Vec<(String, bool)> = h.components().iter().map(|c| (c.id.clone(), c.is_dotted())).collect();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            let v = match (ids[i].1, ids[j].1) {
                (true, true) => 0,
                (true, false) | (false, true) => {
                    if rng.gen_bool(0.8) {
                        rng.gen_range(-1..=1)
                    } else {
                        rng.gen_range(-bound..=bound)
                    }
                }
                (false, false) => rng.gen_range(-bound..=bound),
            };
            h.set_linking(&ids[i].0, &ids[j].0, v);
        }
    }
    h
}

fn max_entry(h: &HandleDecomposition) -> i64 {
    let m = h.linking_matrix();
    (0..m.rows()).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].abs()).max().unwrap_or(0)
}

/// A random move that is applicable to `h` and keeps entries below `cap`.
pub fn random_move(rng: &mut impl Rng, h: &HandleDecomposition, cap: i64) -> Option<Move> {
    let comps = h.components();
    let ids: Vec<&str> = comps.iter().map(|c| c.id.as_str()).collect();
    let two: Vec<&str> = comps.iter().filter(|c| !c.is_dotted()).map(|c| c.id.as_str()).collect();
    let dotted: Vec<&str> = comps.iter().filter(|c| c.is_dotted()).map(|c| c.id.as_str()).collect();
    let sign = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
    let mut candidates: Vec<Move> = Vec::new();
    for _ in 0..4 {
        if let (Some(&i), Some(&j)) = (two.choose(rng), ids.choose(rng)) {
            if i != j {
                candidates.push(Move::Slide { handle: i.into(), over: j.into(), sign: sign(rng) });
            }
        }
    }
    if comps.len() < 10 {
        candidates.push(Move::BlowUp { sign: sign(rng) });
        candidates.push(Move::AddPair);
    }
    for &e in &two {
        let f = h.lk(e, e);
        if f.abs() == 1 && dotted.iter().all(|d| h.lk(d, e) == 0) {
            candidates.push(Move::BlowDown { id: e.into() });
        }
        if f == 0 && h.three_handles > 0 && ids.iter().all(|x| *x == e || h.lk(e, x) == 0) {
            candidates.push(Move::DropPair { id: e.into() });
        }
    }
    for &d in &dotted {
        for &e in &two {
            let l = h.lk(d, e);
            if l.abs() == 1 {
                candidates.push(Move::Cancel { dotted: d.into(), handle: e.into() });
                let others_clear = dotted.iter().all(|o| *o == d || h.lk(o, e) == 0);
                if h.lk(e, e) == 0 && others_clear {
                    candidates.push(Move::Twist { dotted: d.into(), handle: e.into() });
                }
            }
        }
    }
    candidates.shuffle(rng);
    candidates.into_iter().find(|mv| {
        kirby_core::moves::apply(h, mv).is_ok_and(|next| max_entry(&next) <= cap && next.invariant_report().is_ok())
    })
}

/// Plant a cancelling or twistable pair so those moves get exercised.
pub fn with_cork_pair(mut h: HandleDecomposition, rng: &mut impl Rng) -> HandleDecomposition {
    h.push(Component::dotted("cd"));
    h.push(Component::two_handle("ch", 0));
    h.set_linking("cd", "ch", if rng.gen_bool(0.5) { 1 } else { -1 });
    let ids: Vec<String> = h.components().iter().filter(|c| !c.is_dotted()).map(|c| c.id.clone()).collect();
    for id in ids {
        if id != "ch" {
            let v = rng.gen_range(-2..=2);
            h.set_linking(&id, "cd", v);
            h.set_linking(&id, "ch", v);
        }
    }
    h
}

/// Characteristic polynomial coefficients `[c_0, ..., c_n]` (monic, `c_n = 1`)
/// by Faddeev-LeVerrier in exact integer arithmetic.
pub fn char_poly(a: &[Vec<i64>]) -> Vec<i128> {
    let n = a.len();
    let a: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| i128::from(x)).collect()).collect();
    let mut c = vec![0i128; n + 1];
    c[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for j in 0..n {
                next[i][j] = (0..n).map(|l| a[i][l] * m[l][j]).sum::<i128>();
            }
            next[i][i] += c[n - k + 1];
        }
        m = next;
        let tr: i128 = (0..n).map(|i| (0..n).map(|l| a[i][l] * m[l][i]).sum::<i128>()).sum();
        assert_eq!(tr % k as i128, 0);
        c[n - k] = -tr / k as i128;
    }
    c
}

fn sign_changes(v: impl Iterator<Item = i128>) -> usize {
    let nz: Vec<i128> = v.filter(|&x| x != 0).collect();
    nz.windows(2).filter(|w| (w[0] < 0) != (w[1] < 0)).count()
}

/// Signature of a symmetric integer matrix. All roots of its characteristic
/// polynomial are real, so Descartes' rule counts them exactly.
pub fn signature_by_descartes(a: &[Vec<i64>]) -> i64 {
    let c = char_poly(a);
    let pos = sign_changes(c.iter().copied());
    let neg = sign_changes(c.iter().enumerate().map(|(k, &x)| if k % 2 == 1 { -x } else { x }));
    pos as i64 - neg as i64
}

/// Independent recomputation of the tracked invariants of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Oracle {
    pub euler: i64,
    /// Torsion coefficients and free rank of `H_1`.
    pub h1: (Vec<i64>, usize),
    pub h2_rank: usize,
    pub boundary: (Vec<i64>, usize),
}

/// Minors on small matrices, elimination on the rest.
fn factors(rows: &[Vec<i64>]) -> Vec<i64> {
    if rows.len().min(rows[0].len()) <= 4 {
        factors_by_minors(rows)
    } else {
        factors_by_elimination(rows)
    }
}

fn group_of(rows: &[Vec<i64>], generators: usize) -> (Vec<i64>, usize) {
    let f = if rows.is_empty() || rows[0].is_empty() { vec![] } else { factors(rows) };
    (f.iter().copied().filter(|&d| d > 1).collect(), generators - f.len())
}

pub fn oracle(h: &HandleDecomposition) -> Oracle {
    let comps = h.components();
    let dotted: Vec<&str> = comps.iter().filter(|c| c.is_dotted()).map(|c| c.id.as_str()).collect();
    let two: Vec<&str> = comps.iter().filter(|c| !c.is_dotted()).map(|c| c.id.as_str()).collect();
    let t = h.three_handles as usize;
    let d: Vec<Vec<i64>> = dotted.iter().map(|a| two.iter().map(|b| h.lk(a, b)).collect()).collect();
    let rank_d = if d.is_empty() || two.is_empty() { 0 } else { factors(&d).len() };
    let ids: Vec<&str> = comps.iter().map(|c| c.id.as_str()).collect();
    let l: Vec<Vec<i64>> = ids
        .iter()
        .map(|a| ids.iter().map(|b| if a == b && dotted.contains(a) { 0 } else { h.lk(a, b) }).collect())
        .collect();
    let (torsion, free) = group_of(&l, ids.len());
    Oracle {
        euler: 1 - dotted.len() as i64 + two.len() as i64 - t as i64,
        h1: group_of(&d, dotted.len()),
        h2_rank: two.len() - rank_d - t,
        boundary: (torsion, free - t),
    }
}

pub fn form_of(h: &HandleDecomposition) -> Option<(i64, Parity)> {
    let q = h.intersection_form().ok()?;
    let rows = q.matrix().to_rows();
    let sig = signature_by_descartes(&rows);
    let even = rows.iter().enumerate().all(|(i, r)| r[i] % 2 == 0);
    Some((sig, if even { Parity::Even } else { Parity::Odd }))
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Check one step against the oracle and the move's contract.
pub fn check_step(before: &HandleDecomposition, mv: &Move, after: &HandleDecomposition) -> Result<(), String> {
    let (a, b) = (oracle(before), oracle(after));
    let (fa, fb) = (form_of(before), form_of(after));
    let lib = after.invariant_report().map_err(|e| format!("{mv}: {e}"))?;
    ensure!(lib.euler_characteristic == b.euler, "{mv}: euler {} vs oracle {}", lib.euler_characteristic, b.euler);
    ensure!(lib.h2_rank == b.h2_rank, "{mv}: h2 rank {} vs oracle {}", lib.h2_rank, b.h2_rank);
    ensure!((lib.h1.invariant_factors.clone(), lib.h1.free_rank) == b.h1, "{mv}: h1 {} vs oracle {:?}", lib.h1, b.h1);
    ensure!(
        (lib.boundary_h1.invariant_factors.clone(), lib.boundary_h1.free_rank) == b.boundary,
        "{mv}: boundary {} vs oracle {:?}",
        lib.boundary_h1,
        b.boundary
    );
    if let (Some(fi), Some(f)) = (lib.form_invariants, fb) {
        ensure!((fi.signature, fi.parity) == f, "{mv}: form {fi:?} vs oracle {f:?}");
    }
    match mv {
        Move::BlowUp { sign } => {
            ensure!(b.euler == a.euler + 1 && b.h2_rank == a.h2_rank + 1, "{mv}: euler/rank");
            ensure!(b.h1 == a.h1 && b.boundary == a.boundary, "{mv}: homology moved");
            if let (Some((s0, _)), Some((s1, p1))) = (fa, fb) {
                ensure!(s1 == s0 + sign.value() && p1 == Parity::Odd, "{mv}: sig {s0} -> {s1}, parity {p1:?}");
            }
        }
        Move::BlowDown { id } => {
            let eps = before.lk(id, id);
            ensure!(b.euler == a.euler - 1 && b.h2_rank + 1 == a.h2_rank, "{mv}: euler/rank");
            ensure!(b.h1 == a.h1 && b.boundary == a.boundary, "{mv}: homology moved");
            if let (Some((s0, _)), Some((s1, _))) = (fa, fb) {
                ensure!(s1 == s0 - eps, "{mv}: sig {s0} -> {s1}");
            }
        }
        Move::Slide { .. } | Move::Cancel { .. } | Move::AddPair | Move::DropPair { .. } | Move::Twist { .. } => {
            ensure!(a == b, "{mv}: {a:?} -> {b:?}");
            ensure!(fa == fb, "{mv}: form {fa:?} -> {fb:?}");
        }
        Move::Swap { .. } => {
            ensure!(b.boundary == a.boundary, "{mv}: boundary moved");
            ensure!((b.euler - a.euler).abs() == 2, "{mv}: euler {} -> {}", a.euler, b.euler);
        }
    }
    Ok(())
}
