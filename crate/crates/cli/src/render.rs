//! Plain-text renderings of the reports. Same data as the structured output.

use std::fmt::Write as _;

use kirby_core::adjunction::{Branch, ExoticnessReport, GenusBound, Verdict};
use kirby_core::algebra::Equivalence;
use kirby_core::catalog::{Status, TorusClassReport};
use kirby_core::handle::InvariantReport;
use kirby_core::legendrian::{HandleVerdict, SteinReport};
use kirby_core::moves::Ledger;

use crate::{BundleReport, Comparison};

pub fn invariants(r: &InvariantReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "name: {}", r.name);
    let _ = writeln!(s, "euler: {}", r.euler_characteristic);
    let _ = writeln!(s, "h1: {}", r.h1);
    let _ = writeln!(s, "h2_rank: {}", r.h2_rank);
    let _ = writeln!(s, "boundary_h1: {}", r.boundary_h1);
    match (&r.intersection_form, &r.form_invariants) {
        (Some(q), Some(f)) => {
            let _ = writeln!(s, "form: {}", q.matrix());
            let _ = writeln!(
                s,
                "form_invariants: rank {} signature {} parity {:?} det {}",
                f.rank, f.signature, f.parity, f.det_abs
            );
        }
        _ => {
            let _ = writeln!(s, "form: n/a (torsion in h1)");
        }
    }
    s
}

pub fn stein(r: &SteinReport) -> String {
    let mut s = String::new();
    for (id, v) in &r.verdicts {
        let line = match v {
            HandleVerdict::Pass { framing, tb } => format!("{id}: pass (framing {framing} < tb {tb})"),
            HandleVerdict::Fail { framing, tb } => format!("{id}: FAIL (framing {framing} >= tb {tb})"),
            HandleVerdict::Unchecked { reason } => format!("{id}: unchecked ({reason})"),
        };
        let _ = writeln!(s, "{line}");
    }
    let _ = writeln!(s, "stein: {}", r.stein);
    s
}

pub fn ledger(l: &Ledger, result: &str) -> String {
    let snap = |s: &kirby_core::moves::Snapshot| {
        let opt = |x: Option<String>| x.unwrap_or_else(|| "n/a".into());
        format!(
            "euler {} h1 {} h2 {} sig {} parity {} boundary {}",
            s.euler,
            s.h1,
            s.h2_rank,
            opt(s.signature.map(|v| v.to_string())),
            opt(s.parity.map(|p| format!("{p:?}").to_lowercase())),
            s.boundary_h1
        )
    };
    let mut s = String::new();
    let _ = writeln!(s, "start: {}", snap(&l.initial));
    for e in &l.entries {
        let held = e.checks.iter().filter(|c| c.held).count();
        let _ = writeln!(s, "{:>3} {:<24} {} [{}/{} checks]", e.step, e.mv, snap(&e.after), held, e.checks.len());
    }
    let _ = writeln!(s, "result:");
    s.push_str(result);
    s
}

pub fn genus_bound(b: &GenusBound) -> String {
    let branch = match b.branch {
        Branch::Adjunction => "adjunction",
        Branch::Degenerate => "degenerate",
    };
    format!("K(alpha) {} square {} -> genus >= {} ({branch})\n", b.k_alpha, b.square, b.bound)
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Distinct => "DISTINCT",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

pub fn certificate(r: &ExoticnessReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", verdict(r.verdict));
    let _ = writeln!(s, "params: m={} n={} p={} q={} ({:?})", r.m, r.n, r.p, r.q, r.regime);
    let _ = writeln!(s, "ambient: E({}) # {} CP2-bar", r.elliptic, 2 * r.r - 1 + r.extra_blowups);
    let _ = writeln!(s, "r: {}  extra blow-ups: {}", r.r, r.extra_blowups);
    let _ = write!(s, "{}", genus_bound(&r.bound));
    let _ = writeln!(s, "realized genus: {}", r.realized_genus);
    let _ = writeln!(s, "gap: {}", r.gap);
    for m in &r.multiples {
        match &m.bound {
            Some(b) => {
                let _ = writeln!(s, "  a={}: genus >= {}", m.a, b.bound);
            }
            None => {
                let _ = writeln!(s, "  a={}: no class (parity)", m.a);
            }
        }
    }
    s
}

pub fn comparison(c: &Comparison) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", c.verdict);
    let _ = writeln!(s, "reason: {}", c.reason);
    for (side, r) in [("left", &c.left), ("right", &c.right)] {
        let form = r
            .form_invariants
            .map(|f| format!("rank {} sig {} {:?}", f.rank, f.signature, f.parity).to_lowercase())
            .unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            s,
            "{side}: {} h1 {} h2 {} boundary {} form {form}",
            r.name, r.h1, r.h2_rank, r.boundary_h1
        );
    }
    if let Some(Equivalence::Equivalent { witness }) = &c.equivalence {
        let _ = writeln!(s, "witness: {witness}");
    }
    s
}

fn status(st: Status) -> &'static str {
    match st {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::NotClaimed => "n/a",
    }
}

pub fn bundle(b: &BundleReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[{}] {}", b.name(), if b.passed() { "PASS" } else { "FAIL" });
    match b {
        BundleReport::CorkPair(c) => {
            for cl in &c.claims {
                let _ = writeln!(s, "  {:<4} {}: {}", status(cl.status), cl.claim, cl.detail);
            }
        }
        BundleReport::Parity(p) => {
            let _ = writeln!(
                s,
                "  {}",
                if p.not_homeomorphic { "NOT-HOMEOMORPHIC" } else { "not distinguished" }
            );
            for i in 0..2 {
                let _ = writeln!(
                    s,
                    "  side {}: form {} parity {:?} boundary {} stein {}",
                    i + 1,
                    p.forms[i].matrix(),
                    p.parities[i],
                    p.boundary_h1[i],
                    p.stein[i]
                );
            }
        }
        BundleReport::PlugPair(p) => {
            let _ = writeln!(s, "  {}", if p.exotic { "EXOTIC" } else { "not distinguished" });
            for (i, e) in p.equivalences.iter().enumerate() {
                let what = ["first vs <1>+<-1>", "second vs <1>+<-1>", "first vs second"][i];
                let _ = writeln!(s, "  {what}: {}", e.label());
            }
            for (side, t) in [("first", &p.first), ("second", &p.second)] {
                let line = match t {
                    TorusClassReport::Obstructed { search, .. } => format!(
                        "{} square-zero classes up to {}, {} unobstructed",
                        search.square_zero.len(),
                        search.bound,
                        search.torus_candidates.len()
                    ),
                    TorusClassReport::Witness(w) => {
                        format!("torus on `{}` (square {}, genus {})", w.handle, w.square, w.genus)
                    }
                };
                let _ = writeln!(s, "  {side}: {line}");
            }
        }
    }
    s
}
