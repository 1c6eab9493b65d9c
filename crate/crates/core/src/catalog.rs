//! Builders for the cork, plug, enlarged-cork and enlarged-plug families,
//! the twists between them, and verification bundles.
//!
//! The families are reconstructed at the level of linking numbers and
//! Legendrian attaching circles; every build re-derives the invariants the
//! construction is meant to have and fails if any of them is off.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::adjunction::{self, AdjunctionError, AmbientClass, TorusSearch};
use crate::algebra::{
    forms_equivalent_with, AbelianGroup, Equivalence, IntegerMatrix, Parity, SymmetricForm,
};
use crate::exec::Execution;
use crate::handle::{Component, HandleDecomposition, InvariantReport, ModelError};
use crate::legendrian::{stein_check, torus_knot_grid, GridDiagram, SteinReport};
use crate::moves::{self, Ledger, MoveError, MoveScript};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("invalid parameters for {family}: {message}")]
    Params { family: Family, message: String },
    #[error("reconstruction of {name} does not reproduce {what}")]
    SelfCheck { name: String, what: String },
    #[error("{0}")]
    NoSublink(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Adjunction(#[from] AdjunctionError),
}

pub type Result<T> = std::result::Result<T, CatalogError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// Cork `W_n`.
    W,
    /// Plug `W_{m,n}`.
    WPlug,
    C1,
    C2,
    P1,
    P2,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::W, Family::WPlug, Family::C1, Family::C2, Family::P1, Family::P2];

    pub fn label(self) -> &'static str {
        match self {
            Family::W => "W",
            Family::WPlug => "Wplug",
            Family::C1 => "C1",
            Family::C2 => "C2",
            Family::P1 => "P1",
            Family::P2 => "P2",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.label().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FamilyParams {
    pub family: Family,
    pub m: i64,
    pub n: i64,
    pub p: i64,
    pub q: i64,
}

impl FamilyParams {
    pub fn cork(n: i64) -> Self {
        FamilyParams { family: Family::W, m: 0, n, p: 0, q: 0 }
    }
    pub fn plug(m: i64, n: i64) -> Self {
        FamilyParams { family: Family::WPlug, m, n, p: 0, q: 0 }
    }
    pub fn c1(m: i64, n: i64, p: i64, q: i64) -> Self {
        FamilyParams { family: Family::C1, m, n, p, q }
    }
    pub fn c2(m: i64, n: i64, p: i64, q: i64) -> Self {
        FamilyParams { family: Family::C2, m, n, p, q }
    }
    pub fn p1(m: i64, n: i64) -> Self {
        FamilyParams { family: Family::P1, m, n, p: 0, q: 0 }
    }
    pub fn p2(m: i64, n: i64) -> Self {
        FamilyParams { family: Family::P2, m, n, p: 0, q: 0 }
    }

    pub fn name(&self) -> String {
        let (m, n, p, q) = (self.m, self.n, self.p, self.q);
        match self.family {
            Family::W => format!("W({n})"),
            Family::WPlug | Family::P1 | Family::P2 => format!("{}({m},{n})", self.family),
            Family::C1 | Family::C2 => format!("{}({m},{n},{p},{q})", self.family),
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |message: String| Err(CatalogError::Params { family: self.family, message });
        match self.family {
            Family::W if self.n < 1 => bad(format!("n must be >= 1, got {}", self.n)),
            Family::WPlug | Family::P1 | Family::P2 if self.m < 1 || self.n < 1 => {
                bad(format!("m and n must be >= 1, got m={}, n={}", self.m, self.n))
            }
            Family::C1 | Family::C2 if self.n < 1 || self.p < 1 || self.q < 0 => {
                bad(format!("need n >= 1, p >= 1, q >= 0 (got n={}, p={}, q={})", self.n, self.p, self.q))
            }
            Family::C1 | Family::C2 if self.p > MAX_P || self.q > MAX_Q || self.n > MAX_N => {
                bad(format!("p <= {MAX_P}, q <= {MAX_Q} and n <= {MAX_N} are supported"))
            }
            Family::W | Family::WPlug | Family::P1 | Family::P2 if self.n > MAX_N || self.m > MAX_N => {
                bad(format!("m, n <= {MAX_N} are supported"))
            }
            _ => Ok(()),
        }
    }
}

const MAX_P: i64 = 40;
const MAX_Q: i64 = 64;
const MAX_N: i64 = 1000;

/// Twist count of the cork sets the witness grid: the `(2n+1, 2)` torus knot,
/// tb `2n − 1 ≥ 1`, so a 0-framing is below tb on either side of the twist.
fn cork_grid(n: i64) -> GridDiagram {
    torus_knot_grid((2 * n + 1) as u32, 2).expect("coprime")
}

/// `(p, p−1)` torus knot at max tb; the unknot for `p = 1`.
fn torus_handle_grid(p: i64) -> GridDiagram {
    if p == 1 {
        GridDiagram::unknot()
    } else {
        torus_knot_grid(p as u32, (p - 1) as u32).expect("coprime")
    }
}

fn cork_core(name: String, n: i64) -> HandleDecomposition {
    let mut h = HandleDecomposition::empty(name)
        .with(Component::dotted("d").with_grid(cork_grid(n)))
        .with(Component::two_handle("h", 0).with_grid(cork_grid(n)))
        .linked("d", "h", 1);
    h.metadata.cork = Some(("d".into(), "h".into()));
    h
}

/// Plug with dotted `d`, 0-framed `h` (algebraically unlinked from `d`) and a
/// `−(m+n)`-framed unknot `k` passing once through each.
fn plug_core(name: String, m: i64, n: i64) -> HandleDecomposition {
    let trefoil = torus_knot_grid(3, 2).expect("coprime");
    let mut h = HandleDecomposition::empty(name)
        .with(Component::dotted("d").with_grid(trefoil.clone()))
        .with(Component::two_handle("h", 0).with_grid(trefoil))
        .with(Component::two_handle("k", -(m + n)).with_grid(GridDiagram::unknot()))
        .linked("k", "d", 1)
        .linked("k", "h", 1);
    h.metadata.plug = Some(("d".into(), "h".into()));
    h
}

/// Framing of the extra handle `e` of the enlarged plug.
pub const PLUG_EXTRA_FRAMING: i64 = -3;

pub fn build(params: FamilyParams) -> Result<HandleDecomposition> {
    params.check()?;
    let name = params.name();
    let (m, n, p, q) = (params.m, params.n, params.p, params.q);
    let mut h = match params.family {
        Family::W => cork_core(name, n),
        Family::WPlug => plug_core(name, m, n),
        Family::C1 => {
            let mut h = cork_core(name, n)
                .with(Component::two_handle("k", m).with_grid(torus_handle_grid(p)));
            let trefoil = torus_knot_grid(3, 2).expect("coprime");
            for i in 1..=q {
                h.push(Component::two_handle(format!("x{i}"), -1).with_grid(trefoil.clone()));
            }
            h
        }
        Family::C2 => {
            let mut h = cork_twist(&build(FamilyParams { family: Family::C1, ..params })?)?;
            h.metadata.name = name;
            h
        }
        Family::P1 => plug_core(name, m, n)
            .with(Component::two_handle("e", PLUG_EXTRA_FRAMING).with_grid(GridDiagram::unknot()))
            .linked("e", "h", 1),
        Family::P2 => {
            let mut h = plug_twist(&build(FamilyParams { family: Family::P1, ..params })?)?;
            h.metadata.name = name;
            h.metadata.torus_witness = Some("d".into());
            h
        }
    };
    h.metadata.asserted_simply_connected = true;
    h.metadata.reconstructed = true;
    self_check(&h, &params)?;
    Ok(h)
}

fn self_check(h: &HandleDecomposition, params: &FamilyParams) -> Result<()> {
    let problems = h.validate();
    if !problems.is_empty() {
        return Err(ModelError::Invalid(problems).into());
    }
    let r = h.invariant_report()?;
    let fail = |what: &str| Err(CatalogError::SelfCheck { name: h.metadata.name.clone(), what: what.into() });
    if !r.h1.is_trivial() {
        return fail("H_1 = 0");
    }
    match params.family {
        Family::W => {
            if r.h2_rank != 0 || !r.boundary_h1.is_trivial() {
                return fail("a contractible cork with homology-sphere boundary");
            }
        }
        Family::C1 | Family::C2 => {
            if r.h2_rank != (params.q + 1) as usize {
                return fail("H_2 of rank q+1");
            }
            if params.q == 0 {
                if r.boundary_h1 != AbelianGroup::cyclic(params.m) {
                    return fail("boundary H_1 = Z/m");
                }
                if r.intersection_form != Some(SymmetricForm::diagonal(&[params.m])) {
                    return fail("intersection form <m>");
                }
            }
        }
        Family::WPlug => {
            if r.h2_rank != 1 {
                return fail("H_2 of rank 1");
            }
        }
        Family::P1 | Family::P2 => {
            if r.h2_rank != 2 {
                return fail("H_2 of rank 2");
            }
            let parity = r.form_invariants.map(|f| f.parity);
            if params.family == Family::P1 && parity != Some(Parity::Odd) {
                return fail("an odd intersection form");
            }
            let split = params.m % 2 == 1 && params.n % 2 == 0;
            if params.family == Family::P2 && split && parity != Some(Parity::Even) {
                return fail("an even intersection form for odd m, even n");
            }
            if (params.m, params.n) == (1, 3) && r.form_invariants.map(|f| (f.signature, f.det_abs)) != Some((0, 1)) {
                return fail("the form <1> + <-1>");
            }
        }
    }
    Ok(())
}

/// Checks the designated cork sublink: dotted `d`, 0-framed `h`,
/// `lk(d, h) = ±1`, and `lk(x, d) = lk(x, h)` for every other component.
fn cork_sublink(h: &HandleDecomposition) -> Result<(String, String)> {
    let (d, k) = h
        .metadata
        .cork
        .clone()
        .ok_or_else(|| CatalogError::NoSublink("no designated cork sublink".into()))?;
    let no = |m: String| Err(CatalogError::NoSublink(m));
    if !h.component(&d)?.is_dotted() {
        return no(format!("cork component `{d}` is not dotted"));
    }
    if h.component(&k)?.framing != Some(0) {
        return no(format!("cork component `{k}` is not 0-framed"));
    }
    if h.lk(&d, &k).abs() != 1 {
        return no(format!("lk({d}, {k}) = {}, need ±1", h.lk(&d, &k)));
    }
    for c in h.components() {
        if c.id != d && c.id != k && h.lk(&c.id, &d) != h.lk(&c.id, &k) {
            return no(format!("`{}` links the cork asymmetrically", c.id));
        }
    }
    Ok((d, k))
}

/// Exchange dot and 0-framing on the designated cork pair.
pub fn cork_twist(h: &HandleDecomposition) -> Result<HandleDecomposition> {
    let (d, k) = cork_sublink(h)?;
    let mut out = moves::twist(h, &d, &k)?;
    out.metadata.cork = Some((k, d));
    Ok(out)
}

/// Exchange dot and 0-framing on the designated plug pair.
pub fn plug_twist(h: &HandleDecomposition) -> Result<HandleDecomposition> {
    let (d, k) = h
        .metadata
        .plug
        .clone()
        .ok_or_else(|| CatalogError::NoSublink("no designated plug sublink".into()))?;
    let mut out = moves::twist(h, &d, &k)?;
    out.metadata.plug = Some((k, d));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotClaimed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim {
    pub claim: String,
    pub status: Status,
    pub detail: String,
}

impl Claim {
    fn new(claim: &str, ok: bool, detail: String) -> Self {
        Claim { claim: claim.into(), status: if ok { Status::Pass } else { Status::Fail }, detail }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorkPairChecklist {
    pub params: (i64, i64, i64, i64),
    pub claims: Vec<Claim>,
    pub reports: [InvariantReport; 2],
    pub stein: [SteinReport; 2],
}

impl CorkPairChecklist {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.status != Status::Fail)
    }

    pub fn claim(&self, i: usize) -> &Claim {
        &self.claims[i]
    }
}

/// The four claims about the enlarged cork pair: twist-invariant report,
/// Stein on both sides, boundary `H_1 = Z/m` at `q = 0`, `H_2` of rank `q+1`.
pub fn verify_cork_pair(m: i64, n: i64, p: i64, q: i64) -> Result<CorkPairChecklist> {
    let c1 = build(FamilyParams::c1(m, n, p, q))?;
    let c2 = build(FamilyParams::c2(m, n, p, q))?;
    let (r1, r2) = (c1.invariant_report()?, c2.invariant_report()?);
    let twisted = cork_twist(&c1)?.invariant_report()?;
    let back = cork_twist(&cork_twist(&c1)?)? == c1;
    let same = r1.same_invariants(&r2) && r1.same_invariants(&twisted) && back;
    let (s1, s2) = (stein_check(&c1), stein_check(&c2));
    let mut claims = vec![Claim::new(
        "homeomorphism-level invariants agree across the cork twist",
        same,
        format!("euler {}, h1 {}, h2 {}, boundary {}", r1.euler_characteristic, r1.h1, r1.h2_rank, r1.boundary_h1),
    )];
    let worst = |s: &SteinReport| {
        s.verdicts
            .iter()
            .filter(|(_, v)| !v.passed())
            .map(|(id, v)| format!("{id}: {v:?}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    claims.push(Claim::new(
        "both sides are Stein (framing < tb on every 2-handle)",
        s1.stein && s2.stein,
        if s1.stein && s2.stein { "all handles pass".into() } else { format!("{} | {}", worst(&s1), worst(&s2)) },
    ));
    if q == 0 {
        let want = AbelianGroup::cyclic(m);
        claims.push(Claim::new(
            "boundary H_1 is Z/m on both sides",
            r1.boundary_h1 == want && r2.boundary_h1 == want,
            format!("{} and {}, expected {want}", r1.boundary_h1, r2.boundary_h1),
        ));
    } else {
        claims.push(Claim {
            claim: "boundary H_1 is Z/m on both sides".into(),
            status: Status::NotClaimed,
            detail: format!("q = {q}; computed {}", r1.boundary_h1),
        });
    }
    let rank = (q + 1) as usize;
    claims.push(Claim::new(
        "H_2 is free of rank q+1 on both sides",
        r1.h2_rank == rank && r2.h2_rank == rank && r1.h1.is_trivial() && r2.h1.is_trivial(),
        format!("ranks {} and {}", r1.h2_rank, r2.h2_rank),
    ));
    Ok(CorkPairChecklist { params: (m, n, p, q), claims, reports: [r1, r2], stein: [s1, s2] })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub m: i64,
    pub n: i64,
    pub parities: [Parity; 2],
    pub forms: [SymmetricForm; 2],
    pub boundary_h1: [AbelianGroup; 2],
    pub same_homology: bool,
    pub stein: [bool; 2],
    /// `true` when the forms have different parity while boundary and
    /// homology agree, so the pair is not homeomorphic.
    pub not_homeomorphic: bool,
}

/// Odd `m`, even `n`: the enlarged plug pair has forms of different parity
/// with the same boundary homology and interior homology.
pub fn verify_parity(m: i64, n: i64) -> Result<ParityReport> {
    if m < 1 || m % 2 == 0 || n < 1 || n % 2 != 0 {
        return Err(CatalogError::Params {
            family: Family::P1,
            message: format!("need odd m >= 1 and even n >= 1, got m={m}, n={n}"),
        });
    }
    let (a, b) = (build(FamilyParams::p1(m, n))?, build(FamilyParams::p2(m, n))?);
    let (ra, rb) = (a.invariant_report()?, b.invariant_report()?);
    let form = |r: &InvariantReport| r.intersection_form.clone().ok_or(ModelError::TorsionInH1(r.h1.clone()));
    let parity = |r: &InvariantReport| r.form_invariants.map(|f| f.parity).ok_or(ModelError::TorsionInH1(r.h1.clone()));
    let parities = [parity(&ra)?, parity(&rb)?];
    let same_homology = ra.h1 == rb.h1 && ra.h2_rank == rb.h2_rank;
    let not_homeomorphic = parities[0] != parities[1] && ra.boundary_h1 == rb.boundary_h1 && same_homology;
    Ok(ParityReport {
        m,
        n,
        parities,
        forms: [form(&ra)?, form(&rb)?],
        boundary_h1: [ra.boundary_h1.clone(), rb.boundary_h1.clone()],
        same_homology,
        stein: [stein_check(&a).stein, stein_check(&b).stein],
        not_homeomorphic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlugSide {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusWitness {
    pub handle: String,
    pub coefficients: Vec<i64>,
    pub square: i64,
    /// Genus of the attaching knot, bounding the genus of the class.
    pub genus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TorusClassReport {
    /// Bounded search: every nonzero square-zero class is obstructed.
    Obstructed { search: TorusSearch, basic_classes: Vec<AmbientClass> },
    Witness(TorusWitness),
}

impl TorusClassReport {
    pub fn has_torus_class(&self) -> bool {
        match self {
            TorusClassReport::Obstructed { search, .. } => !search.torus_candidates.is_empty(),
            TorusClassReport::Witness(_) => true,
        }
    }
}

/// Square-zero tori in `H_2` of the enlarged plug pair at `(m, n) = (1, 3)`.
/// The first side embeds in `E(2) # 2 CP²-bar` with `E_i · x_j = δ_ij` on the
/// basis `x_1, x_2` of `H_2`, so the basic classes `±E_1 ± E_2` obstruct
/// every torus. The second side has a 0-framed trefoil in `ker ∂`.
pub fn torus_class_obstruction(side: PlugSide, bound: i64, exec: Execution) -> Result<TorusClassReport> {
    match side {
        PlugSide::First => {
            let h = build(FamilyParams::p1(1, 3))?;
            let form = h.intersection_form()?;
            let basic = adjunction::blow_up_classes(&adjunction::en_basic_class(2)?, 2);
            let search = adjunction::torus_obstruction_search(
                &form,
                &IntegerMatrix::identity(form.dim()),
                &basic,
                bound,
                exec,
            )?;
            Ok(TorusClassReport::Obstructed { search, basic_classes: basic })
        }
        PlugSide::Second => {
            let h = build(FamilyParams::p2(1, 3))?;
            let id = h.metadata.torus_witness.clone().expect("set by build");
            let data = h.intersection_data()?;
            let j = data.generator_of(&id).ok_or_else(|| CatalogError::SelfCheck {
                name: h.metadata.name.clone(),
                what: format!("`{id}` as a basis class of H_2"),
            })?;
            let mut coefficients = vec![0; data.form.dim()];
            coefficients[j] = 1;
            let square = data.form.square(&coefficients).map_err(ModelError::from)?;
            // the witness is drawn as the (3,2) torus knot, genus 1
            let genus = 1;
            if square != 0 || h.component(&id)?.grid != Some(torus_knot_grid(3, 2).expect("coprime")) {
                return Err(CatalogError::SelfCheck { name: h.metadata.name.clone(), what: "a square-zero torus".into() });
            }
            Ok(TorusClassReport::Witness(TorusWitness { handle: id, coefficients, square, genus }))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlugPairReport {
    pub forms: [SymmetricForm; 2],
    /// Each side against `<1> + <-1>`, then the sides against each other.
    pub equivalences: [Equivalence; 3],
    pub stein: [bool; 2],
    pub first: TorusClassReport,
    pub second: TorusClassReport,
    /// Homeomorphic by the form, smoothly distinguished by the torus class.
    pub exotic: bool,
}

pub fn verify_plug_pair(search_bound: u32, torus_bound: i64, exec: Execution) -> Result<PlugPairReport> {
    let (a, b) = (build(FamilyParams::p1(1, 3))?, build(FamilyParams::p2(1, 3))?);
    let (qa, qb) = (a.intersection_form()?, b.intersection_form()?);
    let target = SymmetricForm::diagonal(&[1, -1]);
    let eq = |x: &SymmetricForm, y: &SymmetricForm| {
        forms_equivalent_with(x, y, search_bound, exec).map_err(ModelError::from)
    };
    let equivalences = [eq(&qa, &target)?, eq(&qb, &target)?, eq(&qa, &qb)?];
    let first = torus_class_obstruction(PlugSide::First, torus_bound, exec)?;
    let second = torus_class_obstruction(PlugSide::Second, torus_bound, exec)?;
    let stein = [stein_check(&a).stein, stein_check(&b).stein];
    let exotic = equivalences.iter().all(|e| matches!(e, Equivalence::Equivalent { .. }))
        && a.boundary_h1()? == b.boundary_h1()?
        && !first.has_torus_class()
        && second.has_torus_class();
    Ok(PlugPairReport { forms: [qa, qb], equivalences, stein, first, second, exotic })
}

/// Named move scripts with the decomposition they start from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedScript {
    pub name: &'static str,
    pub start: FamilyParams,
    pub script: MoveScript,
}

pub fn scripts() -> Vec<NamedScript> {
    let parse = |s: &str| MoveScript::parse(s).expect("catalog scripts parse");
    vec![
        NamedScript {
            name: "c1-to-c2",
            start: FamilyParams::c1(2, 1, 4, 0),
            script: parse("twist d h\n"),
        },
        NamedScript {
            name: "cork-cancel",
            start: FamilyParams::cork(1),
            script: parse("cancel d h\n"),
        },
        NamedScript {
            name: "slide-and-pair",
            start: FamilyParams::c1(4, 4, 4, 1),
            script: parse(
                "slide k over h +\nslide k over h -\nslide x1 over k +\naddpair\nslide z1 over x1 -\nslide z1 over x1 +\ndroppair z1\nslide x1 over k -\n",
            ),
        },
        NamedScript {
            name: "blow-up-down",
            start: FamilyParams::c1(1, 4, 3, 0),
            script: parse("blowup -\nslide k over e1 +\nblowdown e1\n"),
        },
        NamedScript {
            name: "plug-twist",
            start: FamilyParams::p1(1, 2),
            script: parse("twist d h\n"),
        },
    ]
}

pub fn script(name: &str) -> Option<NamedScript> {
    scripts().into_iter().find(|s| s.name == name)
}

pub fn run_script(named: &NamedScript) -> Result<(HandleDecomposition, Ledger)> {
    let start = build(named.start)?;
    Ok(moves::replay(&start, &named.script)?)
}

/// Parameters of the enlarged-cork grid: `p ∈ ps`, `m ∈ 0..=p²−3p`, `n ∈ ns`, `q ∈ qs`.
pub fn cork_grid_params(ps: &[i64], ns: &[i64], qs: &[i64]) -> Vec<(i64, i64, i64, i64)> {
    let mut out = Vec::new();
    for &p in ps {
        for m in 0..=p * p - 3 * p {
            for &n in ns {
                for &q in qs {
                    out.push((m, n, p, q));
                }
            }
        }
    }
    out
}

pub fn sweep_cork_pairs(
    params: &[(i64, i64, i64, i64)],
    exec: Execution,
) -> Vec<Result<CorkPairChecklist>> {
    exec.map(params, |&(m, n, p, q)| verify_cork_pair(m, n, p, q))
}

/// For each `p`: tb of the torus handle, and the framings in `lo..=hi` at
/// which the Stein check on the enlarged cork fails.
pub fn stein_threshold(p: i64, lo: i64, hi: i64) -> Result<(i64, Vec<i64>)> {
    let tb = torus_handle_grid(p).invariants().map_err(|e| CatalogError::SelfCheck {
        name: format!("torus handle p={p}"),
        what: e.to_string(),
    })?;
    let mut failing = Vec::new();
    for m in lo..=hi {
        let h = build(FamilyParams::c1(m, 1, p, 0))?;
        if !stein_check(&h).stein {
            failing.push(m);
        }
    }
    Ok((tb.tb, failing))
}
