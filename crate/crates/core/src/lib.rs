//! Handle decompositions of 4-manifolds as framed links with dotted circles:
//! exact invariants, Legendrian grid checks, Kirby moves and genus bounds.

pub mod algebra;
pub mod exec;
pub mod handle;
pub mod legendrian;
pub mod moves;
pub mod adjunction;
pub mod catalog;
pub mod document;
