//! Kirby moves on [`HandleDecomposition`]s at the linking-matrix level, a
//! line-oriented script format, and replay with an invariant ledger.
//!
//! Every move is a pure function returning a new decomposition. Slides act
//! on the full linking matrix by the congruence `e_i -> e_i + s e_j`, with a
//! dotted circle contributing a framing-0 row. A slide changes the knot type
//! of the moved attaching circle, so its Legendrian grid (if any) is dropped.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AbelianGroup, Parity};
use crate::handle::{Component, ComponentKind, HandleDecomposition, ModelError};
use crate::legendrian::GridDiagram;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Precondition(String),
    #[error("step {step} (`{mv}`): {source}")]
    Step { step: usize, mv: String, source: Box<MoveError> },
    #[error("step {} (`{}`): {} expected {}, went from {} to {}",
        .0.step, .0.mv, .0.quantity, .0.expected, .0.before, .0.after)]
    Violation(Box<Violation>),
}

pub type Result<T> = std::result::Result<T, MoveError>;

fn precondition(msg: impl Into<String>) -> MoveError {
    MoveError::Precondition(msg.into())
}

/// Certificate for an invariant that changed when the move promised it would not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub step: usize,
    pub mv: String,
    pub quantity: Quantity,
    pub expected: String,
    pub before: String,
    pub after: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn of(x: i64) -> Sign {
        if x < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum Move {
    /// New unlinked unknot with framing `+1` or `-1`.
    BlowUp { sign: Sign },
    BlowDown { id: String },
    Slide { handle: String, over: String, sign: Sign },
    Cancel { dotted: String, handle: String },
    /// Exchange a dot for a 0-framing or back, on one component.
    Swap { id: String },
    /// Exchange dot and 0-framing simultaneously on a dotted circle and a
    /// 0-framed 2-handle (the cork or plug involution).
    Twist { dotted: String, handle: String },
    AddPair,
    DropPair { id: String },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::BlowUp { sign } => write!(f, "blowup {sign}"),
            Move::BlowDown { id } => write!(f, "blowdown {id}"),
            Move::Slide { handle, over, sign } => write!(f, "slide {handle} over {over} {sign}"),
            Move::Cancel { dotted, handle } => write!(f, "cancel {dotted} {handle}"),
            Move::Swap { id } => write!(f, "swap {id}"),
            Move::Twist { dotted, handle } => write!(f, "twist {dotted} {handle}"),
            Move::AddPair => write!(f, "addpair"),
            Move::DropPair { id } => write!(f, "droppair {id}"),
        }
    }
}

/// Parse failure in script text. `line` and `column` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Tokens with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

impl Move {
    /// Parse one non-empty, non-comment script line.
    pub fn parse_line(line: &str, line_no: usize) -> std::result::Result<Move, ScriptError> {
        let toks = tokens(line);
        let err = |column: usize, message: String| ScriptError { line: line_no, column, message };
        let end = line.trim_end().len() + 1;
        let Some(&(c0, verb)) = toks.first() else {
            return Err(err(1, "empty move".into()));
        };
        let arity = |n: usize| -> std::result::Result<(), ScriptError> {
            if toks.len() == n + 1 {
                Ok(())
            } else if toks.len() > n + 1 {
                Err(err(toks[n + 1].0, format!("`{verb}` takes {n} argument(s)")))
            } else {
                Err(err(end, format!("`{verb}` takes {n} argument(s)")))
            }
        };
        let sign = |(c, t): (usize, &str)| match t {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            _ => Err(err(c, format!("expected `+` or `-`, found `{t}`"))),
        };
        let id = |i: usize| toks[i].1.to_string();
        Ok(match verb {
            "blowup" => {
                arity(1)?;
                Move::BlowUp { sign: sign(toks[1])? }
            }
            "blowdown" => {
                arity(1)?;
                Move::BlowDown { id: id(1) }
            }
            "slide" => {
                arity(4)?;
                if toks[2].1 != "over" {
                    return Err(err(toks[2].0, format!("expected `over`, found `{}`", toks[2].1)));
                }
                Move::Slide { handle: id(1), over: id(3), sign: sign(toks[4])? }
            }
            "cancel" => {
                arity(2)?;
                Move::Cancel { dotted: id(1), handle: id(2) }
            }
            "swap" => {
                arity(1)?;
                Move::Swap { id: id(1) }
            }
            "twist" => {
                arity(2)?;
                Move::Twist { dotted: id(1), handle: id(2) }
            }
            "addpair" => {
                arity(0)?;
                Move::AddPair
            }
            "droppair" => {
                arity(1)?;
                Move::DropPair { id: id(1) }
            }
            other => return Err(err(c0, format!("unknown move `{other}`"))),
        })
    }
}

impl FromStr for Move {
    type Err = ScriptError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Move::parse_line(s, 1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
pub struct MoveScript {
    pub steps: Vec<Move>,
}

impl MoveScript {
    pub fn new(steps: Vec<Move>) -> Self {
        MoveScript { steps }
    }

    /// One move per line; blank lines and `#` comments are skipped.
    /// `first_line` is the line number reported for the first line of `text`.
    pub fn parse_at(text: &str, first_line: usize) -> std::result::Result<Self, ScriptError> {
        let mut steps = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            if line.trim().is_empty() {
                continue;
            }
            steps.push(Move::parse_line(line, first_line + k)?);
        }
        Ok(MoveScript { steps })
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ScriptError> {
        Self::parse_at(text, 1)
    }

    pub fn then(mut self, other: &MoveScript) -> Self {
        self.steps.extend(other.steps.iter().cloned());
        self
    }
}

impl fmt::Display for MoveScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

fn fresh_id(h: &HandleDecomposition, prefix: &str) -> String {
    (1..)
        .map(|k| format!("{prefix}{k}"))
        .find(|id| h.index_of(id).is_none())
        .expect("unbounded id supply")
}

fn two_handle_framing(h: &HandleDecomposition, id: &str) -> Result<i64> {
    let c = h.component(id)?;
    c.framing.ok_or_else(|| precondition(format!("`{id}` is dotted, not a 2-handle")))
}

fn checked(x: Option<i64>) -> Result<i64> {
    x.ok_or(MoveError::Model(ModelError::Algebra(crate::algebra::AlgebraError::Overflow)))
}

/// New unlinked unknot 2-handle with framing `sign` (`-1` for `Minus`).
pub fn blow_up(h: &HandleDecomposition, sign: Sign) -> HandleDecomposition {
    let id = fresh_id(h, "e");
    h.clone().with(Component::two_handle(id, sign.value()).with_grid(GridDiagram::unknot()))
}

/// Slide 2-handle `i` over component `j`: `e_i -> e_i + sign * e_j`.
pub fn slide(h: &HandleDecomposition, i: &str, j: &str, sign: Sign) -> Result<HandleDecomposition> {
    if i == j {
        return Err(precondition("cannot slide a handle over itself"));
    }
    let fi = two_handle_framing(h, i)?;
    h.component(j)?;
    let s = sign.value();
    let lij = h.lk(i, j);
    let ljj = h.lk(j, j);
    // (e_i + s e_j)^2 = L_ii + 2 s L_ij + L_jj
    let new_fi = checked(
        lij.checked_mul(2 * s)
            .and_then(|t| fi.checked_add(t))
            .and_then(|t| t.checked_add(ljj)),
    )?;
    let mut out = h.clone();
    let others: Vec<String> =
        h.components().iter().map(|c| c.id.clone()).filter(|k| k != i).collect();
    for k in &others {
        let v = checked(h.lk(j, k).checked_mul(s).and_then(|t| h.lk(i, k).checked_add(t)))?;
        out.set_linking(i, k, v);
    }
    let c = out.component_mut(i)?;
    c.framing = Some(new_fi);
    c.grid = None;
    Ok(out)
}

/// Remove a `±1`-framed 2-handle after sliding every other 2-handle off it.
pub fn blow_down(h: &HandleDecomposition, id: &str) -> Result<HandleDecomposition> {
    let eps = two_handle_framing(h, id)?;
    if eps.abs() != 1 {
        return Err(precondition(format!("`{id}` has framing {eps}, not ±1")));
    }
    let mut out = h.clone();
    for c in h.components() {
        if c.id == id {
            continue;
        }
        let l = h.lk(&c.id, id);
        if l == 0 {
            continue;
        }
        if c.is_dotted() {
            return Err(precondition(format!(
                "`{id}` links dotted circle `{}`; its row cannot be cleared by slides",
                c.id
            )));
        }
        // e_x -> e_x - eps*l e_id clears the entry
        let sign = Sign::of(-eps * l);
        for _ in 0..l.unsigned_abs() {
            out = slide(&out, &c.id, id, sign)?;
        }
    }
    out.remove(id)?;
    Ok(out)
}

/// Cancel a 1-handle against a 2-handle passing over it algebraically once.
pub fn cancel(h: &HandleDecomposition, dotted: &str, handle: &str) -> Result<HandleDecomposition> {
    if !h.component(dotted)?.is_dotted() {
        return Err(precondition(format!("`{dotted}` is not dotted")));
    }
    two_handle_framing(h, handle)?;
    let eps = h.lk(dotted, handle);
    if eps.abs() != 1 {
        return Err(precondition(format!(
            "lk({dotted}, {handle}) = {eps}; cancellation needs ±1"
        )));
    }
    let mut out = h.clone();
    for c in h.components() {
        if c.is_dotted() || c.id == handle {
            continue;
        }
        let a = h.lk(&c.id, dotted);
        if a == 0 {
            continue;
        }
        let sign = Sign::of(-a * eps);
        for _ in 0..a.unsigned_abs() {
            out = slide(&out, &c.id, handle, sign)?;
        }
    }
    out.remove(dotted)?;
    out.remove(handle)?;
    fix_metadata(&mut out, &[dotted, handle]);
    Ok(out)
}

fn fix_metadata(h: &mut HandleDecomposition, removed: &[&str]) {
    let gone = |p: &Option<(String, String)>| {
        p.as_ref().is_some_and(|(a, b)| removed.contains(&a.as_str()) || removed.contains(&b.as_str()))
    };
    if gone(&h.metadata.cork) {
        h.metadata.cork = None;
    }
    if gone(&h.metadata.plug) {
        h.metadata.plug = None;
    }
    if h.metadata.torus_witness.as_deref().is_some_and(|w| removed.contains(&w)) {
        h.metadata.torus_witness = None;
    }
}

fn toggle(c: &mut Component) {
    match c.kind {
        ComponentKind::Dotted => {
            c.kind = ComponentKind::TwoHandle;
            c.framing = Some(0);
        }
        ComponentKind::TwoHandle => {
            c.kind = ComponentKind::Dotted;
            c.framing = None;
        }
    }
}

fn swap_ids(h: &HandleDecomposition, ids: &[&str]) -> Result<HandleDecomposition> {
    for id in ids {
        let c = h.component(id)?;
        if let Some(f) = c.framing {
            if f != 0 {
                return Err(precondition(format!("`{id}` has framing {f}; only 0-framed handles take a dot")));
            }
        }
    }
    let mut out = h.clone();
    for id in ids {
        toggle(out.component_mut(id)?);
    }
    let problems = out.validate();
    if !problems.is_empty() {
        return Err(precondition(format!("result is not a valid decomposition: {}", problems.join("; "))));
    }
    Ok(out)
}

/// Exchange dot and 0-framing on one component.
pub fn dot_zero_swap(h: &HandleDecomposition, id: &str) -> Result<HandleDecomposition> {
    swap_ids(h, &[id])
}

/// Simultaneous dot/0-framing exchange on a dotted circle and a 0-framed 2-handle.
pub fn twist(h: &HandleDecomposition, dotted: &str, handle: &str) -> Result<HandleDecomposition> {
    if dotted == handle {
        return Err(precondition("twist needs two distinct components"));
    }
    if !h.component(dotted)?.is_dotted() {
        return Err(precondition(format!("`{dotted}` is not dotted")));
    }
    if two_handle_framing(h, handle)? != 0 {
        return Err(precondition(format!("`{handle}` is not 0-framed")));
    }
    swap_ids(h, &[dotted, handle])
}

/// Add a 0-framed unlinked unknot together with a 3-handle that cancels it.
pub fn add_pair(h: &HandleDecomposition) -> HandleDecomposition {
    let id = fresh_id(h, "z");
    let mut out = h.clone().with(Component::two_handle(id, 0).with_grid(GridDiagram::unknot()));
    out.three_handles += 1;
    out
}

/// Inverse of [`add_pair`]: `id` must be 0-framed and unlinked from everything.
pub fn drop_pair(h: &HandleDecomposition, id: &str) -> Result<HandleDecomposition> {
    if two_handle_framing(h, id)? != 0 {
        return Err(precondition(format!("`{id}` is not 0-framed")));
    }
    if h.three_handles == 0 {
        return Err(precondition("no 3-handle to drop"));
    }
    if let Some(c) = h.components().iter().find(|c| c.id != id && h.lk(id, &c.id) != 0) {
        return Err(precondition(format!("`{id}` links `{}`", c.id)));
    }
    let mut out = h.clone();
    out.remove(id)?;
    out.three_handles -= 1;
    fix_metadata(&mut out, &[id]);
    Ok(out)
}

pub fn apply(h: &HandleDecomposition, mv: &Move) -> Result<HandleDecomposition> {
    match mv {
        Move::BlowUp { sign } => Ok(blow_up(h, *sign)),
        Move::BlowDown { id } => blow_down(h, id),
        Move::Slide { handle, over, sign } => slide(h, handle, over, *sign),
        Move::Cancel { dotted, handle } => cancel(h, dotted, handle),
        Move::Swap { id } => dot_zero_swap(h, id),
        Move::Twist { dotted, handle } => twist(h, dotted, handle),
        Move::AddPair => Ok(add_pair(h)),
        Move::DropPair { id } => drop_pair(h, id),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Euler,
    H1,
    H2Rank,
    Signature,
    Parity,
    BoundaryH1,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Euler => "euler",
            Quantity::H1 => "h1",
            Quantity::H2Rank => "h2_rank",
            Quantity::Signature => "signature",
            Quantity::Parity => "parity",
            Quantity::BoundaryH1 => "boundary_h1",
        })
    }
}

/// What a move promises about one quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "by", rename_all = "snake_case")]
pub enum Expectation {
    Unchanged,
    Shift(i64),
    /// Parity becomes odd.
    Odd,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Unchanged => write!(f, "unchanged"),
            Expectation::Shift(d) => write!(f, "shift {d:+}"),
            Expectation::Odd => write!(f, "odd"),
        }
    }
}

/// Invariants tracked by the ledger. Form data is `None` when `H_1` has torsion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub euler: i64,
    pub h1: AbelianGroup,
    pub h2_rank: usize,
    pub signature: Option<i64>,
    pub parity: Option<Parity>,
    pub boundary_h1: AbelianGroup,
}

impl Snapshot {
    pub fn of(h: &HandleDecomposition) -> Result<Snapshot> {
        let r = h.invariant_report()?;
        Ok(Snapshot {
            euler: r.euler_characteristic,
            h1: r.h1,
            h2_rank: r.h2_rank,
            signature: r.form_invariants.map(|f| f.signature),
            parity: r.form_invariants.map(|f| f.parity),
            boundary_h1: r.boundary_h1,
        })
    }

    fn show(&self, q: Quantity) -> String {
        fn opt<T: fmt::Debug>(x: &Option<T>) -> String {
            x.as_ref().map_or("n/a".into(), |v| format!("{v:?}").to_lowercase())
        }
        match q {
            Quantity::Euler => self.euler.to_string(),
            Quantity::H1 => self.h1.to_string(),
            Quantity::H2Rank => self.h2_rank.to_string(),
            Quantity::Signature => opt(&self.signature),
            Quantity::Parity => opt(&self.parity),
            Quantity::BoundaryH1 => self.boundary_h1.to_string(),
        }
    }

    fn number(&self, q: Quantity) -> Option<i64> {
        match q {
            Quantity::Euler => Some(self.euler),
            Quantity::H2Rank => i64::try_from(self.h2_rank).ok(),
            Quantity::Signature => self.signature,
            _ => None,
        }
    }
}

fn holds(q: Quantity, e: Expectation, before: &Snapshot, after: &Snapshot) -> bool {
    match e {
        Expectation::Unchanged => before.show(q) == after.show(q),
        Expectation::Shift(d) => match (before.number(q), after.number(q)) {
            (Some(a), Some(b)) => b - a == d,
            (None, None) => true,
            _ => false,
        },
        Expectation::Odd => match (before.parity, after.parity) {
            (_, Some(p)) => p == Parity::Odd,
            (None, None) => true,
            (Some(_), None) => false,
        },
    }
}

/// Promises a move makes, given the decomposition it is applied to.
pub fn expectations(h: &HandleDecomposition, mv: &Move) -> Vec<(Quantity, Expectation)> {
    use Expectation::*;
    use Quantity::*;
    let all = || {
        vec![
            (Euler, Unchanged),
            (H1, Unchanged),
            (H2Rank, Unchanged),
            (Signature, Unchanged),
            (Parity, Unchanged),
            (BoundaryH1, Unchanged),
        ]
    };
    match mv {
        Move::BlowUp { sign } => vec![
            (Euler, Shift(1)),
            (H1, Unchanged),
            (H2Rank, Shift(1)),
            (Signature, Shift(sign.value())),
            (Parity, Odd),
            (BoundaryH1, Unchanged),
        ],
        Move::BlowDown { id } => {
            let eps = h.lk(id, id);
            vec![
                (Euler, Shift(-1)),
                (H1, Unchanged),
                (H2Rank, Shift(-1)),
                (Signature, Shift(-eps)),
                (BoundaryH1, Unchanged),
            ]
        }
        Move::Slide { .. } | Move::Cancel { .. } | Move::AddPair | Move::DropPair { .. } => all(),
        Move::Swap { id } => {
            let d = if h.component(id).is_ok_and(|c| c.is_dotted()) { 2 } else { -2 };
            vec![(Euler, Shift(d)), (BoundaryH1, Unchanged)]
        }
        Move::Twist { dotted, handle } => {
            if h.lk(dotted, handle).abs() == 1 {
                all()
            } else {
                vec![(Euler, Unchanged), (BoundaryH1, Unchanged)]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub quantity: Quantity,
    pub expected: Expectation,
    pub held: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerEntry {
    pub step: usize,
    #[serde(rename = "move")]
    pub mv: String,
    pub after: Snapshot,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ledger {
    pub initial: Snapshot,
    pub entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn final_snapshot(&self) -> &Snapshot {
        self.entries.last().map_or(&self.initial, |e| &e.after)
    }
}

/// Apply `script` to `h`, checking each move's promises. Steps are numbered
/// from 1. A failed precondition or a broken promise aborts the replay.
pub fn replay(h: &HandleDecomposition, script: &MoveScript) -> Result<(HandleDecomposition, Ledger)> {
    let problems = h.validate();
    if !problems.is_empty() {
        return Err(ModelError::Invalid(problems).into());
    }
    let initial = Snapshot::of(h)?;
    let mut cur = h.clone();
    let mut before = initial.clone();
    let mut entries = Vec::with_capacity(script.steps.len());
    for (k, mv) in script.steps.iter().enumerate() {
        let step = k + 1;
        let wrap = |e: MoveError| MoveError::Step { step, mv: mv.to_string(), source: Box::new(e) };
        let promised = expectations(&cur, mv);
        let next = apply(&cur, mv).map_err(wrap)?;
        let after = Snapshot::of(&next).map_err(wrap)?;
        let mut checks = Vec::with_capacity(promised.len());
        for (quantity, expected) in promised {
            let held = holds(quantity, expected, &before, &after);
            if !held {
                return Err(MoveError::Violation(Box::new(Violation {
                    step,
                    mv: mv.to_string(),
                    quantity,
                    expected: expected.to_string(),
                    before: before.show(quantity),
                    after: after.show(quantity),
                })));
            }
            checks.push(Check { quantity, expected, held });
        }
        entries.push(LedgerEntry { step, mv: mv.to_string(), after: after.clone(), checks });
        cur = next;
        before = after;
    }
    Ok((cur, Ledger { initial, entries }))
}
