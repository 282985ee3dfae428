//! Exact structure theory for finite dimensional Lie algebras over small
//! finite fields of odd characteristic.
//!
//! The crate is organised bottom-up:
//!
//! * [`gf`] — arithmetic in GF(p^k) and a tower of extensions with fixed
//!   embeddings, including Artin–Schreier roots.
//! * [`linalg`] — exact linear algebra over those fields: echelon forms,
//!   nullspaces, simultaneous eigenspaces of commuting toral operators,
//!   module irreducibility testing and Jordan–Chevalley decomposition.
//! * [`liealg`] — structure-constant Lie algebras: ideals, series, forms,
//!   gradings, filtrations and the classical recognition checks.
//! * [`dpalg`] — divided power algebras O(m;n), their special derivations
//!   and differential forms.
//! * [`cartan`] — the graded and filtered Lie algebras of Cartan type
//!   W, S, CS, H, CH, K cut out of W(m;n) by differential forms.
//! * [`restricted`] — p-maps, p-envelopes, tori, root space decompositions,
//!   Winter exponentials and sandwich elements.
//! * [`exceptional`] — the Melikian algebras M(m,n) at p = 5, the Brown
//!   algebras G2(2;n) at p = 2, Chevalley basis constructions and the
//!   matrix classical families gl, sl, pgl, psl.
//! * [`verify`] — the named acceptance suites shared by the test harness
//!   and the command line tool.

pub mod gf;
pub mod linalg;
pub mod liealg;
pub mod dpalg;
pub mod cartan;
pub mod restricted;
pub mod exceptional;
pub mod verify;
