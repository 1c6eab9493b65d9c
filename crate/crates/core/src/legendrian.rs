//! Grid diagrams as Legendrian representatives.
//!
//! Conventions: rows are numbered bottom to top, columns left to right.
//! Vertical segments cross over horizontal ones and run from O to X;
//! horizontal segments run from X to O. Rotating the grid 45° counterclockwise
//! gives a front whose crossings agree with that convention (the strand of
//! lesser slope is in front); SE corners become right cusps and NW corners
//! left cusps.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::handle::{ComponentKind, HandleDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid size must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("X and O rows must both have length {0}")]
    Length(usize),
    #[error("{0} positions are not a permutation")]
    NotPermutation(&'static str),
    #[error("column {0} has X and O in the same row")]
    SharedCell(usize),
    #[error("grid has {0} components, a knot is required")]
    NotAKnot(usize),
    #[error("torus knot parameters ({p},{q}) must satisfy p > q >= 1 and gcd(p,q) = 1")]
    TorusParameters { p: u32, q: u32 },
}

/// `x[c]` and `o[c]` are the rows of the X and O markings in column `c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDiagram {
    x: Vec<usize>,
    o: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegendrianInvariants {
    pub tb: i64,
    pub rot: i64,
    pub writhe: i64,
    pub cusp_count: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizationSign {
    Positive,
    Negative,
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&r| r < v.len() && !std::mem::replace(&mut seen[r], true))
}

fn inverse(v: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; v.len()];
    for (c, &r) in v.iter().enumerate() {
        inv[r] = c;
    }
    inv
}

impl GridDiagram {
    pub fn new(x: Vec<usize>, o: Vec<usize>) -> Result<Self, GridError> {
        let n = x.len();
        if n < 2 {
            return Err(GridError::TooSmall(n));
        }
        if o.len() != n {
            return Err(GridError::Length(n));
        }
        if !is_permutation(&x) {
            return Err(GridError::NotPermutation("X"));
        }
        if !is_permutation(&o) {
            return Err(GridError::NotPermutation("O"));
        }
        if let Some(c) = (0..n).find(|&c| x[c] == o[c]) {
            return Err(GridError::SharedCell(c));
        }
        Ok(GridDiagram { x, o })
    }

    /// Like [`GridDiagram::new`] but also requires a single component.
    pub fn knot(x: Vec<usize>, o: Vec<usize>) -> Result<Self, GridError> {
        let g = Self::new(x, o)?;
        match g.component_count() {
            1 => Ok(g),
            k => Err(GridError::NotAKnot(k)),
        }
    }

    /// The 2x2 unknot with tb = -1, rot = 0.
    pub fn unknot() -> Self {
        GridDiagram { x: vec![1, 0], o: vec![0, 1] }
    }

    pub fn size(&self) -> usize {
        self.x.len()
    }

    pub fn x_positions(&self) -> &[usize] {
        &self.x
    }

    pub fn o_positions(&self) -> &[usize] {
        &self.o
    }

    pub fn component_count(&self) -> usize {
        let n = self.size();
        let o_col = inverse(&self.o);
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                // column c: O -> X, then along row x[c] to its O
                c = o_col[self.x[c]];
            }
        }
        count
    }

    /// Cyclic shift of columns by `dc` and rows by `dr`.
    pub fn translate(&self, dc: usize, dr: usize) -> Self {
        let n = self.size();
        let mut x = vec![0; n];
        let mut o = vec![0; n];
        for c in 0..n {
            x[(c + dc) % n] = (self.x[c] + dr) % n;
            o[(c + dc) % n] = (self.o[c] + dr) % n;
        }
        GridDiagram { x, o }
    }

    /// Reflection across the main diagonal, exchanging rows and columns.
    pub fn transpose(&self) -> Self {
        GridDiagram { x: inverse(&self.x), o: inverse(&self.o) }
    }

    pub fn writhe(&self) -> i64 {
        let n = self.size();
        let x_col = inverse(&self.x);
        let o_col = inverse(&self.o);
        let mut w = 0;
        for c in 0..n {
            let (lo, hi) = (self.x[c].min(self.o[c]), self.x[c].max(self.o[c]));
            let dv: i64 = if self.x[c] > self.o[c] { 1 } else { -1 };
            for r in lo + 1..hi {
                let (l, h) = (x_col[r].min(o_col[r]), x_col[r].max(o_col[r]));
                if l < c && c < h {
                    let dh: i64 = if o_col[r] > x_col[r] { 1 } else { -1 };
                    // over = vertical (0, dv), under = horizontal (dh, 0)
                    w += -dv * dh;
                }
            }
        }
        w
    }

    /// Counts of (SE at O, SE at X, NW at O, NW at X) corners.
    fn corner_counts(&self) -> [i64; 4] {
        let n = self.size();
        let x_col = inverse(&self.x);
        let o_col = inverse(&self.o);
        let mut counts = [0i64; 4];
        for c in 0..n {
            for (is_x, r) in [(false, self.o[c]), (true, self.x[c])] {
                let other_row = if is_x { self.o[c] } else { self.x[c] };
                let other_col = if is_x { o_col[r] } else { x_col[r] };
                let up = other_row > r;
                let right = other_col > c;
                // SE corner: legs go up and left; NW corner: down and right.
                match (up, right, is_x) {
                    (true, false, false) => counts[0] += 1,
                    (true, false, true) => counts[1] += 1,
                    (false, true, false) => counts[2] += 1,
                    (false, true, true) => counts[3] += 1,
                    _ => {}
                }
            }
        }
        counts
    }

    pub fn invariants(&self) -> Result<LegendrianInvariants, GridError> {
        grid_invariants(self)
    }

    pub fn stabilize(&self, sign: StabilizationSign) -> Self {
        stabilize(self, sign)
    }

    /// Text lines `grid n`, `X: …`, `O: …`.
    pub fn to_text_lines(&self) -> [String; 3] {
        let join = |v: &[usize]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ");
        [format!("grid {}", self.size()), format!("X: {}", join(&self.x)), format!("O: {}", join(&self.o))]
    }

    /// ASCII picture, top row first: `X`/`O` markings, `|` and `-` for
    /// segments. A crossing shows as `-|-` since the vertical strand is over.
    pub fn render_ascii(&self) -> String {
        let n = self.size();
        let x_col = inverse(&self.x);
        let o_col = inverse(&self.o);
        let mut out = String::new();
        for r in (0..n).rev() {
            let (l, h) = (x_col[r].min(o_col[r]), x_col[r].max(o_col[r]));
            for c in 0..n {
                let (lo, hi) = (self.x[c].min(self.o[c]), self.x[c].max(self.o[c]));
                let vertical = lo < r && r < hi;
                let horizontal = l < c && c < h;
                let ch = if self.x[c] == r {
                    'X'
                } else if self.o[c] == r {
                    'O'
                } else if vertical {
                    '|'
                } else if horizontal {
                    '-'
                } else {
                    '.'
                };
                out.push(ch);
                if c + 1 < n {
                    out.push(if l <= c && c < h { '-' } else { ' ' });
                }
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text_lines().join(" / "))
    }
}

pub fn grid_invariants(g: &GridDiagram) -> Result<LegendrianInvariants, GridError> {
    let k = g.component_count();
    if k != 1 {
        return Err(GridError::NotAKnot(k));
    }
    let writhe = g.writhe();
    let [se_o, se_x, nw_o, nw_x] = g.corner_counts();
    let cusps = se_o + se_x + nw_o + nw_x;
    debug_assert_eq!(se_o + se_x, nw_o + nw_x);
    let down = se_x + nw_o;
    let up = se_o + nw_x;
    Ok(LegendrianInvariants {
        tb: writhe - cusps / 2,
        rot: (down - up) / 2,
        writhe,
        cusp_count: cusps as u64,
    })
}

/// Grid of the positive `(p, q)` torus knot at maximal tb `pq - p - q`.
pub fn torus_knot_grid(p: u32, q: u32) -> Result<GridDiagram, GridError> {
    if !(p > q && q >= 1 && p.gcd(&q) == 1) {
        return Err(GridError::TorusParameters { p, q });
    }
    let n = (p + q) as usize;
    // O on the antidiagonal, X shifted by q. The same pattern on the main
    // diagonal is the negative torus knot.
    let o: Vec<usize> = (0..n).map(|c| n - 1 - c).collect();
    let x: Vec<usize> = (0..n).map(|c| (n - 1 - c + q as usize) % n).collect();
    Ok(GridDiagram { x, o })
}

/// Where the new O marking sits relative to the X being stabilized. `NW` and
/// `SE` are Legendrian stabilizations; `NE` and `SW` are Legendrian isotopies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    NE,
    NW,
    SE,
    SW,
}

/// Replace the X in column `c` by a 2x2 block: two X's on the antidiagonal
/// relative to the new O, which lands in quadrant `quad`.
pub fn stabilize_at(g: &GridDiagram, c: usize, quad: Quadrant) -> GridDiagram {
    let n = g.size();
    let r = g.x[c];
    let (east, north) = match quad {
        Quadrant::NE => (true, true),
        Quadrant::NW => (false, true),
        Quadrant::SE => (true, false),
        Quadrant::SW => (false, false),
    };
    // indices of the inserted column/row in the new grid
    let new_c = if east { c + 1 } else { c };
    let new_r = if north { r + 1 } else { r };
    let old_r = if north { r } else { r + 1 };
    let shift_row = |row: usize| if row >= new_r { row + 1 } else { row };

    let mut x = Vec::with_capacity(n + 1);
    let mut o = Vec::with_capacity(n + 1);
    for col in 0..=n {
        if col == new_c {
            x.push(old_r);
            o.push(new_r);
        } else {
            let src = if col > new_c { col - 1 } else { col };
            o.push(shift_row(g.o[src]));
            x.push(if src == c { new_r } else { shift_row(g.x[src]) });
        }
    }
    GridDiagram { x, o }
}

/// Legendrian stabilization: `tb - 1`, `rot ± 1`.
pub fn stabilize(g: &GridDiagram, sign: StabilizationSign) -> GridDiagram {
    let quad = match sign {
        StabilizationSign::Positive => Quadrant::NW,
        StabilizationSign::Negative => Quadrant::SE,
    };
    stabilize_at(g, 0, quad)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum HandleVerdict {
    Pass { framing: i64, tb: i64 },
    Fail { framing: i64, tb: i64 },
    Unchecked { reason: String },
}

impl HandleVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, HandleVerdict::Pass { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinReport {
    pub verdicts: Vec<(String, HandleVerdict)>,
    /// True iff every 2-handle was checked and passed.
    pub stein: bool,
}

/// Framing of each 2-handle must be at most `tb - 1`.
pub fn stein_check(h: &HandleDecomposition) -> SteinReport {
    let verdicts: Vec<(String, HandleVerdict)> = h
        .components()
        .iter()
        .filter(|c| c.kind == ComponentKind::TwoHandle)
        .map(|c| {
            let framing = c.framing.unwrap_or(0);
            let verdict = match &c.grid {
                None => HandleVerdict::Unchecked { reason: "no attaching grid".into() },
                Some(g) => match grid_invariants(g) {
                    Err(e) => HandleVerdict::Unchecked { reason: e.to_string() },
                    Ok(inv) if framing < inv.tb => HandleVerdict::Pass { framing, tb: inv.tb },
                    Ok(inv) => HandleVerdict::Fail { framing, tb: inv.tb },
                },
            };
            (c.id.clone(), verdict)
        })
        .collect();
    let stein = verdicts.iter().all(|(_, v)| v.passed());
    SteinReport { verdicts, stein }
}
