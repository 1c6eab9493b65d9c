//! Basic-class bookkeeping for elliptic surfaces and their blow-ups, the
//! adjunction inequality as a genus lower bound, and exoticness certificates
//! for the enlarged-cork family.
//!
//! Homology classes of the ambient manifold are described by their pairings
//! with the regular fiber `F` and the exceptional spheres `E_i`. Cohomology
//! classes (basic classes) are stored as Poincaré-dual coefficients on the
//! same basis, so `K(α) = f·(F·α) + Σ e_i·(E_i·α)`.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{IntegerMatrix, SymmetricForm};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdjunctionError {
    #[error("K(α) + α² = {k_alpha} + {square} is odd; no characteristic class pairs this way")]
    Parity { k_alpha: i64, square: i64 },
    #[error("{0}")]
    Domain(String),
    #[error("theorem does not apply: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, AdjunctionError>;

/// `fiber·PD(F) + Σ exceptional[i]·PD(E_{i+1})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AmbientClass {
    pub fiber: i64,
    pub exceptional: Vec<i64>,
}

impl AmbientClass {
    pub fn negate(&self) -> Self {
        AmbientClass { fiber: -self.fiber, exceptional: self.exceptional.iter().map(|e| -e).collect() }
    }

    /// Evaluation on a homology class given by its pairings. Missing
    /// exceptional coordinates on either side count as zero.
    pub fn evaluate(&self, image: &ClassImage) -> i64 {
        self.fiber * image.fiber_pairing
            + self
                .exceptional
                .iter()
                .zip(&image.exceptional_pairing)
                .map(|(e, x)| e * x)
                .sum::<i64>()
    }
}

/// The two extreme basic classes `±(n-2)·PD(F)` of `E(n)`, deduplicated.
pub fn en_basic_class(n: u32) -> Result<Vec<AmbientClass>> {
    if n < 2 {
        return Err(AdjunctionError::Domain(format!("E(n) needs n >= 2, got {n}")));
    }
    let k = AmbientClass { fiber: i64::from(n) - 2, exceptional: Vec::new() };
    let set: BTreeSet<_> = [k.negate(), k].into_iter().collect();
    Ok(set.into_iter().collect())
}

/// Blow-up formula: each `K` becomes `K ± E_{s+1} ± … ± E_{s+k}`, where `s`
/// is the number of exceptional coordinates already present. Sorted, deduplicated.
pub fn blow_up_classes(classes: &[AmbientClass], k: usize) -> Vec<AmbientClass> {
    let mut out = BTreeSet::new();
    for c in classes {
        for signs in 0u64..(1u64 << k) {
            let mut e = c.exceptional.clone();
            e.extend((0..k).map(|i| if signs >> i & 1 == 1 { -1 } else { 1 }));
            out.insert(AmbientClass { fiber: c.fiber, exceptional: e });
        }
    }
    out.into_iter().collect()
}

/// An ambient class given by its pairings with `F`, `E_1..E_k` and its square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassImage {
    pub label: String,
    pub fiber_pairing: i64,
    pub exceptional_pairing: Vec<i64>,
    pub square: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmbientModel {
    /// `n` of the elliptic surface `E(n)`.
    pub elliptic: u32,
    /// Number of `CP²`-bar summands.
    pub blowups: usize,
    pub basic_classes: Vec<AmbientClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmbientEmbedding {
    pub ambient: AmbientModel,
    pub images: Vec<ClassImage>,
    /// Where the pairing data comes from when it is not computed.
    pub reconstructed_from: Option<String>,
}

impl AmbientEmbedding {
    /// Largest `|K(α)|` over the known basic classes.
    pub fn max_pairing(&self, image: &ClassImage) -> i64 {
        self.ambient.basic_classes.iter().map(|k| k.evaluate(image).abs()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `|K(α)| + α² ≤ 2g − 2`, informative only for `g ≥ 2`.
    Adjunction,
    /// `|K(α)| + α² ≤ 0`: no lower bound beyond `g ≥ 0`.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenusBound {
    pub k_alpha: i64,
    pub square: i64,
    pub bound: i64,
    pub branch: Branch,
}

/// Smallest genus allowed by `|K(α)| + α² ≤ 2g − 2` (for `g ≥ 2`) or
/// `≤ 0` (for `g ≤ 1`).
pub fn min_genus(k_alpha: i64, alpha_sq: i64) -> Result<GenusBound> {
    let s = k_alpha
        .checked_abs()
        .and_then(|k| k.checked_add(alpha_sq))
        .ok_or_else(|| AdjunctionError::Domain("pairing overflows".into()))?;
    if s.rem_euclid(2) != 0 {
        return Err(AdjunctionError::Parity { k_alpha, square: alpha_sq });
    }
    Ok(if s > 0 {
        GenusBound { k_alpha, square: alpha_sq, bound: (s + 2) / 2, branch: Branch::Adjunction }
    } else {
        GenusBound { k_alpha, square: alpha_sq, bound: 0, branch: Branch::Degenerate }
    })
}

/// `p² − 3p + 1`: maximal Thurston-Bennequin number of the `(p, p−1)` torus knot.
pub fn torus_tb(p: i64) -> i64 {
    p * p - 3 * p + 1
}

/// Seifert genus of the `(p, p−1)` torus knot, `(p−1)(p−2)/2`.
pub fn realized_genus(p: i64) -> i64 {
    (p - 1) * (p - 2) / 2
}

/// `r` with `n ∈ {3r−2, 3r−1, 3r}`.
pub fn r_of(n: i64) -> i64 {
    (n + 2) / 3
}

const MAX_EXTRA_BLOWUPS: i64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `q = 0`, `n ≥ 4`.
    LargeTwist,
    /// `q = 0`, `1 ≤ n ≤ 3`, `p ≥ 3`.
    SmallTwist,
    /// `q ≥ 1`, `0 ≤ m`.
    ExtraHandles,
}

pub fn regime(m: i64, n: i64, p: i64, q: i64) -> Result<Regime> {
    let na = |s: String| Err(AdjunctionError::NotApplicable(s));
    if p < 1 || n < 1 || q < 0 {
        return na(format!("need p >= 1, n >= 1, q >= 0 (got p={p}, n={n}, q={q})"));
    }
    if m > torus_tb(p) {
        return na(format!("m = {m} exceeds p^2-3p+1 = {}", torus_tb(p)));
    }
    if q == 0 {
        if n >= 4 {
            Ok(Regime::LargeTwist)
        } else if p >= 3 {
            Ok(Regime::SmallTwist)
        } else {
            na(format!("n = {n} <= 3 with p = {p} <= 2 and q = 0 is the excluded corner"))
        }
    } else if m >= 0 {
        Ok(Regime::ExtraHandles)
    } else {
        na(format!("q >= 1 needs m >= 0, got m = {m}"))
    }
}

/// Embedding data for the generator of `H_2` of the enlarged cork in
/// `E(p+q+2r+1) # (2r−1+j) CP²-bar`, with `j = p²−3p+1−m` extra blow-ups
/// absorbing the framing deficit. Pairings `α·F = 0`, `α·E_i = 1`.
pub fn cork_embedding(m: i64, n: i64, p: i64, q: i64) -> Result<AmbientEmbedding> {
    let r = r_of(n);
    let j = torus_tb(p) - m;
    if j < 0 {
        return Err(AdjunctionError::Domain(format!("m = {m} exceeds p^2-3p+1")));
    }
    if j > MAX_EXTRA_BLOWUPS {
        return Err(AdjunctionError::Domain(format!("{j} extra blow-ups requested")));
    }
    let blowups = (2 * r - 1 + j) as usize;
    let elliptic = u32::try_from(p + q + 2 * r + 1)
        .map_err(|_| AdjunctionError::Domain("elliptic index out of range".into()))?;
    let k = AmbientClass { fiber: i64::from(elliptic) - 2, exceptional: vec![1; blowups] };
    let alpha = ClassImage {
        label: "alpha".into(),
        fiber_pairing: 0,
        exceptional_pairing: vec![1; blowups],
        square: m,
    };
    Ok(AmbientEmbedding {
        ambient: AmbientModel { elliptic, blowups, basic_classes: vec![k.negate(), k] },
        images: vec![alpha],
        reconstructed_from: Some("g >= (p^2-3p+2r+2)/2".into()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultipleBound {
    pub a: i64,
    /// `None` when `a·K(α) + m` is odd, so no class `aα + x` with `x·K = 0` exists.
    pub bound: Option<GenusBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Distinct,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExoticnessReport {
    pub m: i64,
    pub n: i64,
    pub p: i64,
    pub q: i64,
    pub regime: Regime,
    pub r: i64,
    pub extra_blowups: i64,
    pub elliptic: u32,
    pub k_alpha: i64,
    /// Genus lower bound on the enlarged-cork side (`a = 1`).
    pub bound: GenusBound,
    /// Genus of a surface on the twisted side.
    pub realized_genus: i64,
    pub gap: i64,
    /// Bounds for `γ = aα + x`, extra-handle regime only.
    pub multiples: Vec<MultipleBound>,
    pub verdict: Verdict,
}

pub fn exoticness_certificate(m: i64, n: i64, p: i64, q: i64, a_max: i64) -> Result<ExoticnessReport> {
    let regime = regime(m, n, p, q)?;
    let emb = cork_embedding(m, n, p, q)?;
    let alpha = &emb.images[0];
    let k_alpha = emb.max_pairing(alpha);
    let bound = min_genus(k_alpha, alpha.square)?;
    let realized = realized_genus(p);
    let mut multiples = Vec::new();
    let mut ok = bound.branch == Branch::Adjunction && bound.bound > realized;
    if regime == Regime::ExtraHandles {
        if a_max < 1 {
            return Err(AdjunctionError::Domain(format!("a_max must be >= 1, got {a_max}")));
        }
        for a in 1..=a_max {
            let b = match min_genus(a * k_alpha, m) {
                Ok(b) => Some(b),
                Err(AdjunctionError::Parity { .. }) => None,
                Err(e) => return Err(e),
            };
            if let Some(b) = b {
                ok &= b.branch == Branch::Adjunction && b.bound > realized;
            }
            multiples.push(MultipleBound { a, bound: b });
        }
    }
    Ok(ExoticnessReport {
        m,
        n,
        p,
        q,
        regime,
        r: r_of(n),
        extra_blowups: emb.ambient.blowups as i64 - (2 * r_of(n) - 1),
        elliptic: emb.ambient.elliptic,
        k_alpha,
        bound,
        realized_genus: realized,
        gap: bound.bound - realized,
        multiples,
        verdict: if ok { Verdict::Distinct } else { Verdict::Inconclusive },
    })
}

/// Certified lower bound on the genus difference across the cork twist,
/// for `n = 3r − 2`, `q = 0`.
pub fn genus_gap(m: i64, p: i64, r: i64) -> Result<i64> {
    if r < 2 || p < 1 || m > torus_tb(p) {
        return Err(AdjunctionError::Domain(format!(
            "need r >= 2, p >= 1, m <= p^2-3p+1 (got m={m}, p={p}, r={r})"
        )));
    }
    let rep = exoticness_certificate(m, 3 * r - 2, p, 0, 1)?;
    Ok(rep.gap)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareZeroClass {
    pub coefficients: Vec<i64>,
    /// A basic class with `|K(c)| > 0`, ruling out a torus.
    pub obstructed_by: Option<AmbientClass>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusSearch {
    pub bound: i64,
    pub square_zero: Vec<SquareZeroClass>,
    /// Nonzero square-zero classes passing `|K(c)| + c² ≤ 0` for every basic class.
    pub torus_candidates: Vec<Vec<i64>>,
}

/// Search nonzero `c = Σ a_i x_i` with `|a_i| ≤ bound` and `c² = 0` for
/// classes that the genus-one adjunction inequality allows to be tori.
/// `pairings[(i, j)] = E_{j+1}·x_i`; basic classes use only exceptional
/// coordinates (the fiber pairing of every `x_i` is zero).
pub fn torus_obstruction_search(
    form: &SymmetricForm,
    pairings: &IntegerMatrix,
    basic: &[AmbientClass],
    bound: i64,
    exec: Execution,
) -> Result<TorusSearch> {
    let k = form.dim();
    if pairings.rows() != k {
        return Err(AdjunctionError::Domain("pairing rows must match form dimension".into()));
    }
    if bound < 0 || k > 4 {
        return Err(AdjunctionError::Domain("search needs bound >= 0 and rank <= 4".into()));
    }
    let side = (2 * bound + 1) as usize;
    let total = side.pow(k as u32);
    let indices: Vec<usize> = (0..total).collect();
    let found: Vec<Option<SquareZeroClass>> = exec.map(&indices, |&idx| {
        let mut rest = idx;
        let c: Vec<i64> = (0..k)
            .map(|_| {
                let d = (rest % side) as i64 - bound;
                rest /= side;
                d
            })
            .collect();
        if c.iter().all(|&x| x == 0) || form.square(&c).ok()? != 0 {
            return None;
        }
        let image = ClassImage {
            label: String::new(),
            fiber_pairing: 0,
            exceptional_pairing: (0..pairings.cols())
                .map(|j| (0..k).map(|i| c[i] * pairings[(i, j)]).sum())
                .collect(),
            square: 0,
        };
        let obstructed_by = basic.iter().find(|kc| kc.evaluate(&image).abs() > 0).cloned();
        Some(SquareZeroClass { coefficients: c, obstructed_by })
    });
    let square_zero: Vec<SquareZeroClass> = found.into_iter().flatten().collect();
    let torus_candidates = square_zero
        .iter()
        .filter(|s| s.obstructed_by.is_none())
        .map(|s| s.coefficients.clone())
        .collect();
    Ok(TorusSearch { bound, square_zero, torus_candidates })
}

/// Euler characteristic and signature of `E(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EllipticSummary {
    pub n: u32,
    pub euler: i64,
    pub signature: i64,
    pub basic_classes: Vec<AmbientClass>,
}

pub fn elliptic_summary(n: u32) -> Result<EllipticSummary> {
    if n < 1 {
        return Err(AdjunctionError::Domain("E(n) needs n >= 1".into()));
    }
    let basic_classes = if n >= 2 { en_basic_class(n)? } else { Vec::new() };
    Ok(EllipticSummary { n, euler: 12 * i64::from(n), signature: -8 * i64::from(n), basic_classes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_classes() {
        let c = en_basic_class(7).unwrap();
        assert_eq!(c.iter().map(|k| k.fiber).collect::<Vec<_>>(), vec![-5, 5]);
        assert_eq!(en_basic_class(2).unwrap().len(), 1);
        assert!(en_basic_class(1).is_err());
    }

    #[test]
    fn blow_up_of_zero() {
        let zero = en_basic_class(2).unwrap();
        let b = blow_up_classes(&zero, 2);
        let e: Vec<Vec<i64>> = b.iter().map(|k| k.exceptional.clone()).collect();
        assert_eq!(e, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
        assert_eq!(blow_up_classes(&zero, 0), zero);
        let b = blow_up_classes(&en_basic_class(5).unwrap(), 3);
        assert_eq!(b.len(), 16);
        assert!(b.iter().all(|k| b.contains(&k.negate())));
    }

    #[test]
    fn min_genus_branches() {
        assert_eq!(min_genus(0, 0).unwrap().branch, Branch::Degenerate);
        assert_eq!(min_genus(0, 0).unwrap().bound, 0);
        assert_eq!(min_genus(-5, 1).unwrap().bound, 4);
        assert_eq!(min_genus(3, -7).unwrap().bound, 0);
        assert!(matches!(min_genus(2, 1), Err(AdjunctionError::Parity { .. })));
    }

    #[test]
    fn regimes() {
        assert_eq!(regime(11, 4, 5, 0), Ok(Regime::LargeTwist));
        assert_eq!(regime(1, 3, 3, 0), Ok(Regime::SmallTwist));
        assert_eq!(regime(0, 1, 3, 2), Ok(Regime::ExtraHandles));
        for (n, p) in [(1, 1), (3, 2), (2, 1)] {
            assert!(matches!(regime(-5, n, p, 0), Err(AdjunctionError::NotApplicable(_))));
        }
        assert!(regime(12, 4, 5, 0).is_err());
        assert!(regime(-1, 4, 5, 1).is_err());
    }

    #[test]
    fn small_twist_example() {
        let rep = exoticness_certificate(1, 3, 3, 0, 16).unwrap();
        assert_eq!(rep.verdict, Verdict::Distinct);
        assert_eq!((rep.bound.bound, rep.realized_genus), (2, 1));
    }

    #[test]
    fn gap_is_r() {
        assert_eq!(genus_gap(11, 5, 2), Ok(2));
        for p in 1..=8 {
            for r in 2..=6 {
                for m in [torus_tb(p), torus_tb(p) - 3, -4] {
                    assert_eq!(genus_gap(m, p, r), Ok(r));
                }
            }
        }
        assert!(genus_gap(0, 3, 1).is_err());
    }

    #[test]
    fn extra_handles_parity() {
        let rep = exoticness_certificate(1, 4, 3, 1, 4).unwrap();
        assert_eq!(rep.verdict, Verdict::Distinct);
        // odd multiples give bounds, even ones are parity-inconsistent
        let got: Vec<bool> = rep.multiples.iter().map(|b| b.bound.is_some()).collect();
        assert_eq!(got, vec![true, false, true, false]);
        let b: Vec<i64> = rep.multiples.iter().filter_map(|b| b.bound.map(|g| g.bound)).collect();
        assert!(b.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn plug_side_torus_search() {
        let form = SymmetricForm::new(IntegerMatrix::from_rows(&[vec![0, 1], vec![1, -3]]).unwrap()).unwrap();
        let e = blow_up_classes(&en_basic_class(2).unwrap(), 2);
        let s = torus_obstruction_search(&form, &IntegerMatrix::identity(2), &e, 10, Execution::Sequential)
            .unwrap();
        assert!(s.torus_candidates.is_empty());
        assert!(s.square_zero.iter().any(|c| c.coefficients == vec![1, 0]));
        let par = torus_obstruction_search(&form, &IntegerMatrix::identity(2), &e, 10, Execution::Parallel)
            .unwrap();
        assert_eq!(s, par);
    }
}
