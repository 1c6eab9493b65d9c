//! Handlebodies as framed links with dotted circles.
//!
//! A [`HandleDecomposition`] stores one 0-handle implicitly, 1-handles as
//! dotted circles, framed 2-handles, algebraic linking numbers for every
//! unordered pair of components, and a count of 3-handles.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    self, cokernel, kernel_basis, smith_normal_form, AbelianGroup,
    AlgebraError, FormInvariants, IntegerMatrix, SymmetricForm,
};
use crate::legendrian::GridDiagram;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid decomposition: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("{three_handles} 3-handle(s) but only {available} free class(es) to cancel")]
    ThreeHandles { three_handles: u32, available: usize },
    #[error("form not computed; torsion in H_1 ({0})")]
    TorsionInH1(AbelianGroup),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Dotted,
    TwoHandle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub kind: ComponentKind,
    /// Present iff `kind` is `TwoHandle`.
    pub framing: Option<i64>,
    /// Legendrian attaching circle for Stein checks. A dotted component may
    /// carry one too; it is used once the dot is exchanged for a framing.
    pub grid: Option<GridDiagram>,
}

impl Component {
    pub fn dotted(id: impl Into<String>) -> Self {
        Component { id: id.into(), kind: ComponentKind::Dotted, framing: None, grid: None }
    }

    pub fn two_handle(id: impl Into<String>, framing: i64) -> Self {
        Component { id: id.into(), kind: ComponentKind::TwoHandle, framing: Some(framing), grid: None }
    }

    pub fn with_grid(mut self, grid: GridDiagram) -> Self {
        self.grid = Some(grid);
        self
    }

    pub fn is_dotted(&self) -> bool {
        self.kind == ComponentKind::Dotted
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub name: String,
    pub asserted_simply_connected: bool,
    pub reconstructed: bool,
    /// `(dotted, 0-framed)` pair exchanged by the cork involution.
    pub cork: Option<(String, String)>,
    /// `(dotted, 0-framed)` pair exchanged by the plug involution.
    pub plug: Option<(String, String)>,
    /// 2-handle whose class is a square-zero class represented by a torus.
    pub torus_witness: Option<String>,
}

/// Unordered pair key.
fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandleDecomposition {
    components: Vec<Component>,
    linking: BTreeMap<(String, String), i64>,
    pub three_handles: u32,
    pub metadata: Metadata,
}

impl HandleDecomposition {
    /// The 4-ball.
    pub fn empty(name: impl Into<String>) -> Self {
        HandleDecomposition {
            components: Vec::new(),
            linking: BTreeMap::new(),
            three_handles: 0,
            metadata: Metadata { name: name.into(), ..Metadata::default() },
        }
    }

    /// Raw constructor; no validation and no defaulting of missing pairs.
    pub fn from_parts(
        components: Vec<Component>,
        linking: BTreeMap<(String, String), i64>,
        three_handles: u32,
        metadata: Metadata,
    ) -> Self {
        let linking = linking.into_iter().map(|((a, b), v)| (key(&a, &b), v)).collect();
        HandleDecomposition { components, linking, three_handles, metadata }
    }

    /// Add a component unlinked from everything present.
    pub fn push(&mut self, c: Component) {
        for other in &self.components {
            self.linking.insert(key(&other.id, &c.id), 0);
        }
        self.components.push(c);
    }

    pub fn with(mut self, c: Component) -> Self {
        self.push(c);
        self
    }

    pub fn linked(mut self, a: &str, b: &str, value: i64) -> Self {
        self.set_linking(a, b, value);
        self
    }

    pub fn set_linking(&mut self, a: &str, b: &str, value: i64) {
        self.linking.insert(key(a, b), value);
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn linking_entries(&self) -> &BTreeMap<(String, String), i64> {
        &self.linking
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn component(&self, id: &str) -> Result<&Component> {
        self.components
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| ModelError::UnknownComponent(id.to_string()))
    }

    pub(crate) fn component_mut(&mut self, id: &str) -> Result<&mut Component> {
        self.components
            .iter_mut()
            .find(|c| c.id == id)
            .ok_or_else(|| ModelError::UnknownComponent(id.to_string()))
    }

    /// Remove a component and all its linking entries.
    pub(crate) fn remove(&mut self, id: &str) -> Result<Component> {
        let i = self.index_of(id).ok_or_else(|| ModelError::UnknownComponent(id.to_string()))?;
        self.linking.retain(|(a, b), _| a != id && b != id);
        Ok(self.components.remove(i))
    }

    /// Algebraic linking number; for a component with itself, its framing
    /// (0 for dotted circles).
    pub fn lk(&self, a: &str, b: &str) -> i64 {
        if a == b {
            return self.component(a).ok().and_then(|c| c.framing).unwrap_or(0);
        }
        self.linking.get(&key(a, b)).copied().unwrap_or(0)
    }

    pub fn count(&self, kind: ComponentKind) -> usize {
        self.components.iter().filter(|c| c.kind == kind).count()
    }

    fn indices(&self, kind: ComponentKind) -> Vec<usize> {
        (0..self.components.len()).filter(|&i| self.components[i].kind == kind).collect()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for c in &self.components {
            if c.id.is_empty() || c.id.chars().any(char::is_whitespace) {
                out.push(format!("component id `{}` must be a non-empty word", c.id));
            }
            if !seen.insert(c.id.as_str()) {
                out.push(format!("duplicate component id `{}`", c.id));
            }
            match (c.kind, c.framing) {
                (ComponentKind::Dotted, Some(_)) => {
                    out.push(format!("dotted circle `{}` carries a framing", c.id))
                }
                (ComponentKind::TwoHandle, None) => {
                    out.push(format!("2-handle `{}` is missing its framing", c.id))
                }
                _ => {}
            }
            if let Some(g) = &c.grid {
                if g.component_count() != 1 {
                    out.push(format!("grid of `{}` is not a knot", c.id));
                }
            }
        }
        for (a, b) in self.linking.keys() {
            if a == b {
                out.push(format!("self-linking stored for `{a}`"));
            }
            for id in [a, b] {
                if !seen.contains(id.as_str()) {
                    out.push(format!("linking refers to unknown component `{id}`"));
                }
            }
        }
        for (i, ci) in self.components.iter().enumerate() {
            for cj in &self.components[i + 1..] {
                match self.linking.get(&key(&ci.id, &cj.id)) {
                    None => out.push(format!("linking of `{}` and `{}` is missing", ci.id, cj.id)),
                    Some(&v) if v != 0 && ci.is_dotted() && cj.is_dotted() => out.push(format!(
                        "dotted circles `{}` and `{}` must be unlinked (lk = {v})",
                        ci.id, cj.id
                    )),
                    _ => {}
                }
            }
        }
        out
    }

    fn ensure_valid(&self) -> Result<()> {
        let diagnostics = self.validate();
        if diagnostics.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Invalid(diagnostics))
        }
    }

    /// Full linking matrix in component order; dotted circles get framing 0.
    pub fn linking_matrix(&self) -> IntegerMatrix {
        let n = self.components.len();
        let mut m = IntegerMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.lk(&self.components[i].id, &self.components[j].id);
            }
        }
        m
    }

    pub fn euler_characteristic(&self) -> i64 {
        1 - self.count(ComponentKind::Dotted) as i64 + self.count(ComponentKind::TwoHandle) as i64
            - i64::from(self.three_handles)
    }

    /// Surgery presentation of the boundary: the linking matrix with dots
    /// read as 0-framings, plus one relation column per 3-handle killing a
    /// free class of `H_1(∂X)`.
    ///
    /// Each 3-handle relation is the unit vector of a component with an
    /// identically zero row when one is available (the dual of a split
    /// 0-framed unknot); otherwise a free generator of the cokernel is used.
    pub fn boundary_presentation(&self) -> Result<IntegerMatrix> {
        self.ensure_valid()?;
        let m = self.linking_matrix();
        let t = self.three_handles as usize;
        if t == 0 {
            return Ok(m);
        }
        let n = m.rows();
        let snf = smith_normal_form(&m)?;
        let free = n - snf.rank;
        if t > free {
            return Err(ModelError::ThreeHandles { three_handles: self.three_handles, available: free });
        }
        let zero_rows: Vec<usize> = (0..n).filter(|&i| m.row(i).iter().all(|&x| x == 0)).collect();
        let mut rel = IntegerMatrix::zeros(n, t);
        if zero_rows.len() >= t {
            for (k, &i) in zero_rows[zero_rows.len() - t..].iter().enumerate() {
                rel[(i, k)] = 1;
            }
        } else {
            for (k, j) in (n - t..n).enumerate() {
                for i in 0..n {
                    rel[(i, k)] = snf.u_inv[(i, j)];
                }
            }
        }
        Ok(m.hstack(&rel)?)
    }

    pub fn boundary_h1(&self) -> Result<AbelianGroup> {
        Ok(cokernel(&self.boundary_presentation()?)?)
    }

    /// `∂: Z^{2-handles} -> Z^{dotted}` given by linking with dotted circles.
    pub fn chain_boundary(&self) -> IntegerMatrix {
        let full = self.linking_matrix();
        full.select(&self.indices(ComponentKind::Dotted), &self.indices(ComponentKind::TwoHandle))
    }

    /// `(H_1, rank H_2)`.
    pub fn homology(&self) -> Result<(AbelianGroup, usize)> {
        self.ensure_valid()?;
        let d = self.chain_boundary();
        let snf = smith_normal_form(&d)?;
        let h1 = cokernel(&d)?;
        let cycles = d.cols() - snf.rank;
        let t = self.three_handles as usize;
        if t > cycles {
            return Err(ModelError::ThreeHandles { three_handles: self.three_handles, available: cycles });
        }
        Ok((h1, cycles - t))
    }

    /// Basis of `H_2` (columns, in 2-handle coordinates) and the
    /// intersection form in that basis.
    pub fn intersection_data(&self) -> Result<IntersectionData> {
        let (h1, _) = self.homology()?;
        if !h1.is_torsion_free() {
            return Err(ModelError::TorsionInH1(h1));
        }
        let two = self.indices(ComponentKind::TwoHandle);
        let lk2 = self.linking_matrix().select(&two, &two);
        let cycles = kernel_basis(&self.chain_boundary())?;
        let q_cycles = lk2.congruence(&cycles)?;
        let t = self.three_handles as usize;
        if t == 0 {
            return Ok(IntersectionData {
                two_handles: two.iter().map(|&i| self.components[i].id.clone()).collect(),
                basis: cycles,
                form: SymmetricForm::new(q_cycles)?,
            });
        }
        // Each 3-handle kills one class of the radical.
        let radical = kernel_basis(&q_cycles)?;
        if radical.cols() < t {
            return Err(ModelError::ThreeHandles {
                three_handles: self.three_handles,
                available: radical.cols(),
            });
        }
        let k = q_cycles.rows();
        let killed = radical.select(&(0..k).collect::<Vec<_>>(), &(0..t).collect::<Vec<_>>());
        // killed is part of a summand basis, so its SNF is [I; 0] and the
        // first t columns of U^-1 span the same sublattice.
        let adapted = smith_normal_form(&killed)?.u_inv;
        let keep: Vec<usize> = (t..k).collect();
        let all: Vec<usize> = (0..k).collect();
        let complement = adapted.select(&all, &keep);
        let basis = cycles.mul(&complement)?;
        let form = SymmetricForm::new(lk2.congruence(&basis)?)?;
        Ok(IntersectionData {
            two_handles: two.iter().map(|&i| self.components[i].id.clone()).collect(),
            basis,
            form,
        })
    }

    pub fn intersection_form(&self) -> Result<SymmetricForm> {
        Ok(self.intersection_data()?.form)
    }

    pub fn invariant_report(&self) -> Result<InvariantReport> {
        let (h1, h2_rank) = self.homology()?;
        let boundary_h1 = self.boundary_h1()?;
        let (intersection_form, form_invariants) = match self.intersection_form() {
            Ok(q) => {
                let inv = algebra::form_invariants(&q)?;
                (Some(q), Some(inv))
            }
            Err(ModelError::TorsionInH1(_)) => (None, None),
            Err(e) => return Err(e),
        };
        let report = InvariantReport {
            name: self.metadata.name.clone(),
            euler_characteristic: self.euler_characteristic(),
            h1,
            h2_rank,
            intersection_form,
            boundary_h1,
            form_invariants,
        };
        debug_assert!(report.intersection_form.as_ref().map_or(true, |q| q.dim() == h2_rank));
        Ok(report)
    }
}

/// Result of [`HandleDecomposition::intersection_data`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionData {
    /// Ids of the 2-handles, indexing the rows of `basis`.
    pub two_handles: Vec<String>,
    pub basis: IntegerMatrix,
    pub form: SymmetricForm,
}

impl IntersectionData {
    /// Coordinates of a single 2-handle's class in `basis`, if that class is
    /// a basis vector.
    pub fn generator_of(&self, id: &str) -> Option<usize> {
        let row = self.two_handles.iter().position(|h| h == id)?;
        (0..self.basis.cols()).find(|&j| {
            (0..self.basis.rows()).all(|i| self.basis[(i, j)] == i64::from(i == row))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub name: String,
    pub euler_characteristic: i64,
    pub h1: AbelianGroup,
    pub h2_rank: usize,
    /// `None` when `H_1` has torsion.
    pub intersection_form: Option<SymmetricForm>,
    pub boundary_h1: AbelianGroup,
    pub form_invariants: Option<FormInvariants>,
}

impl InvariantReport {
    /// Everything except the name and the basis-dependent form matrix.
    pub fn same_invariants(&self, other: &InvariantReport) -> bool {
        self.euler_characteristic == other.euler_characteristic
            && self.h1 == other.h1
            && self.h2_rank == other.h2_rank
            && self.boundary_h1 == other.boundary_h1
            && self.form_invariants == other.form_invariants
    }
}
