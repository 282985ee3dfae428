//! Structure-constant Lie algebras over a [`Field`]: construction with
//! antisymmetry and Jacobi validation, brackets, subobject closures,
//! series, derivations, the Killing form, simplicity, the solvable
//! radical, and quotients.
//!
//! The bracket table stores [b_i, b_j] for i < j only; the other half is
//! implied by antisymmetry and the diagonal by [x, x] = 0, which is
//! strictly stronger than antisymmetry in characteristic 2 and is the
//! form every validation here enforces.

pub mod checks;
pub mod grading;
pub mod io;

use crate::gf::poly::seeded_rng;
use crate::gf::Field;
use crate::linalg::{
    meataxe::{module_irreducible, ModuleVerdict},
    nullspace, Echelon, Matrix, SparseVec, SubspaceBasis,
};
use rand::Rng;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

pub use grading::{Filtration, Grading};

#[derive(Debug, Error)]
pub enum LieError {
    #[error("antisymmetry violated at basis pair ({0}, {1})")]
    AntisymmetryViolation(usize, usize),
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    JacobiViolation(usize, usize, usize),
    #[error("basis index {0} out of range for dimension {1}")]
    IndexOutOfRange(usize, usize),
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("dimension {0} exceeds the configured limit {1} (override with MODLIE_DIM_LIMIT)")]
    DimensionLimitExceeded(usize, usize),
    #[error("subspace is not an ideal: bracket with basis {0} leaves it")]
    NotAnIdeal(usize),
    #[error("subspace is not closed under the bracket")]
    NotASubalgebra,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("coefficient vector has wrong length {0}, expected {1}")]
    BadCoordinates(usize, usize),
    #[error("serialization: {0}")]
    Serialization(String),
}

/// How much bracket-table validation a constructor performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    /// Antisymmetry plus the Jacobi identity on every basis triple.
    Full,
    /// Antisymmetry plus a seeded random sample of Jacobi triples; for
    /// tables produced by internally verified constructors.
    SpotCheck { seed: u64, samples: usize },
}

/// (i, j, [(k, coefficient-slice)]) rows; i < j not required on input,
/// both orders are checked for consistency when given.
pub type StructureEntries = Vec<(usize, usize, Vec<(usize, Vec<u64>)>)>;

pub(crate) struct LieData {
    pub f: Field,
    pub dim: usize,
    pub labels: Vec<String>,
    /// Upper triangle: table[i] sorted by j with entries ([b_i, b_j]).
    pub table: Vec<Vec<(u32, SparseVec)>>,
    pub grading: Option<Grading>,
    pub filtration: Option<Filtration>,
    /// Basis images of a p-map, set once by the restricted machinery.
    pub pmap: OnceLock<crate::restricted::PMapData>,
}

/// Immutable Lie algebra handle; clones share the underlying table.
#[derive(Clone)]
pub struct LieAlgebra(pub(crate) Arc<LieData>);

impl std::fmt::Debug for LieAlgebra {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(w, "LieAlgebra(dim {}, GF({}^{}))", self.dim(), self.field().p(), self.field().k())
    }
}

/// Element as a coordinate vector in the basis of its parent.
#[derive(Clone, Debug)]
pub struct LieElement {
    pub alg: LieAlgebra,
    pub c: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureMode {
    Subalgebra,
    Ideal,
}

/// Symmetric Gram matrix of a trace form.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearForm {
    pub f: Field,
    pub dim: usize,
    /// Dense row-major, stride k per entry.
    pub gram: Vec<u64>,
}

impl BilinearForm {
    pub fn entry(&self, i: usize, j: usize) -> &[u64] {
        let k = self.f.k();
        &self.gram[(i * self.dim + j) * k..(i * self.dim + j + 1) * k]
    }

    pub fn is_zero(&self) -> bool {
        self.gram.iter().all(|&w| w == 0)
    }

    pub fn evaluate(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let f = &self.f;
        let k = f.k();
        let mut acc = f.zero_slice();
        for i in 0..self.dim {
            let xi = &x[i * k..(i + 1) * k];
            if f.is_zero_slice(xi) {
                continue;
            }
            for j in 0..self.dim {
                let yj = &y[j * k..(j + 1) * k];
                if f.is_zero_slice(yj) {
                    continue;
                }
                let t = f.mul_slice(&f.mul_slice(xi, yj), self.entry(i, j));
                f.add_assign_slice(&mut acc, &t);
            }
        }
        acc
    }

    pub fn radical(&self) -> SubspaceBasis {
        let f = &self.f;
        let rows: Vec<Vec<u64>> = (0..self.dim)
            .map(|i| self.gram[i * self.dim * f.k()..(i + 1) * self.dim * f.k()].to_vec())
            .collect();
        nullspace(&Matrix::from_dense_rows(f, self.dim, &rows))
    }
}

/// Center, derived and lower central series, and the flags they imply.
#[derive(Clone, Debug)]
pub struct StructuralSeries {
    pub center: SubspaceBasis,
    pub derived_series: Vec<SubspaceBasis>,
    pub lower_central_series: Vec<SubspaceBasis>,
    pub is_solvable: bool,
    pub is_nilpotent: bool,
}

/// Derivation algebra with the concrete matrices realizing each basis
/// derivation on the parent.
pub struct DerivationAlgebra {
    pub algebra: LieAlgebra,
    pub matrices: Vec<Matrix>,
}

/// Quotient projection data: classes are read off on the non-pivot
/// coordinates of the ideal's echelon form.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub ideal: SubspaceBasis,
    /// Parent coordinates used as the transversal, ascending.
    pub complement: Vec<usize>,
    pub parent_dim: usize,
}

impl QuotientMap {
    pub fn project(&self, f: &Field, x: &[u64]) -> Vec<u64> {
        let k = f.k();
        let e = self.ideal.to_echelon();
        let red = e.reduce(&SparseVec::from_dense(f, x)).to_dense(f, self.parent_dim);
        let mut out = vec![0u64; self.complement.len() * k];
        for (q, &c) in self.complement.iter().enumerate() {
            out[q * k..(q + 1) * k].copy_from_slice(&red[c * k..(c + 1) * k]);
        }
        out
    }

    pub fn section(&self, f: &Field, q: &[u64]) -> Vec<u64> {
        let k = f.k();
        let mut out = vec![0u64; self.parent_dim * k];
        for (qi, &c) in self.complement.iter().enumerate() {
            out[c * k..(c + 1) * k].copy_from_slice(&q[qi * k..(qi + 1) * k]);
        }
        out
    }
}

/// Configurable gate for the quadratic-unknown solves; also read by the
/// solvable radical.
pub fn dim_limit() -> usize {
    std::env::var("MODLIE_DIM_LIMIT").ok().and_then(|v| v.parse().ok()).unwrap_or(60)
}

impl LieAlgebra {
    pub fn from_structure_constants(
        f: &Field,
        labels: Vec<String>,
        entries: StructureEntries,
        validation: Validation,
    ) -> Result<LieAlgebra, LieError> {
        let dim = labels.len();
        let k = f.k();
        // Canonicalize to the upper triangle, checking both orders when
        // supplied and rejecting nonzero diagonal entries.
        let mut upper: Vec<Vec<(u32, SparseVec)>> = vec![Vec::new(); dim];
        let mut seen: Vec<Vec<(u32, SparseVec, bool)>> = vec![Vec::new(); dim];
        for (i, j, terms) in entries {
            if i >= dim || j >= dim {
                return Err(LieError::IndexOutOfRange(i.max(j), dim));
            }
            let mut dense = vec![0u64; dim * k];
            for (t, c) in terms {
                if t >= dim {
                    return Err(LieError::IndexOutOfRange(t, dim));
                }
                if c.len() != k {
                    return Err(LieError::BadCoordinates(c.len(), k));
                }
                f.add_assign_slice(&mut dense[t * k..(t + 1) * k], &c);
            }
            let v = SparseVec::from_dense(f, &dense);
            if i == j {
                if !v.is_zero() {
                    return Err(LieError::AntisymmetryViolation(i, j));
                }
                continue;
            }
            let (a, b, flipped) = if i < j { (i, j, false) } else { (j, i, true) };
            let stored = if flipped { v.scale(f, &f.from_int(-1)) } else { v };
            if let Some((_, prev, prev_flipped)) =
                seen[a].iter().find(|(jj, _, _)| *jj == b as u32)
            {
                if *prev != stored {
                    return Err(LieError::AntisymmetryViolation(i, j));
                }
                if *prev_flipped != flipped {
                    // Both orders supplied and consistent: fine.
                    continue;
                }
                continue;
            }
            seen[a].push((b as u32, stored.clone(), flipped));
            upper[a].push((b as u32, stored));
        }
        for row in upper.iter_mut() {
            row.sort_by_key(|(j, _)| *j);
        }
        let alg = LieAlgebra(Arc::new(LieData {
            f: f.clone(),
            dim,
            labels,
            table: upper,
            grading: None,
            filtration: None,
            pmap: OnceLock::new(),
        }));
        alg.validate(validation)?;
        Ok(alg)
    }

    fn validate(&self, validation: Validation) -> Result<(), LieError> {
        let n = self.dim();
        match validation {
            Validation::Full => {
                for i in 0..n {
                    for j in i + 1..n {
                        for l in j + 1..n {
                            if !self.jacobi_holds(i, j, l) {
                                return Err(LieError::JacobiViolation(i, j, l));
                            }
                        }
                    }
                }
            }
            Validation::SpotCheck { seed, samples } => {
                let mut rng = seeded_rng(seed);
                for _ in 0..samples {
                    if n < 3 {
                        break;
                    }
                    let i = rng.gen_range(0..n);
                    let j = rng.gen_range(0..n);
                    let l = rng.gen_range(0..n);
                    if i == j || j == l || i == l {
                        continue;
                    }
                    if !self.jacobi_holds(i, j, l) {
                        return Err(LieError::JacobiViolation(i, j, l));
                    }
                }
            }
        }
        Ok(())
    }

    fn jacobi_holds(&self, i: usize, j: usize, l: usize) -> bool {
        let f = self.field();
        let n = self.dim();
        let k = f.k();
        let mut acc = vec![0u64; n * k];
        for (a, b, c) in [(i, j, l), (j, l, i), (l, i, j)] {
            let inner = self.bracket_basis(a, b);
            let term = self.bracket_sparse_with_basis(&inner, c);
            for (pos, &t) in term.idx.iter().enumerate() {
                f.add_assign_slice(
                    &mut acc[t as usize * k..(t as usize + 1) * k],
                    &term.dat[pos * k..(pos + 1) * k],
                );
            }
        }
        acc.iter().all(|&w| w == 0)
    }

    pub fn field(&self) -> &Field {
        &self.0.f
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.labels[i]
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.0.grading.as_ref()
    }

    pub fn filtration(&self) -> Option<&Filtration> {
        self.0.filtration.as_ref()
    }

    pub fn same_algebra(&self, other: &LieAlgebra) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Rewrap with a grading attached (validated).
    pub fn with_grading(self, degrees: Vec<i64>) -> Result<LieAlgebra, LieError> {
        let g = Grading::new(&self, degrees)?;
        self.replace_attachments(Some(g), None)
    }

    pub fn with_filtration(self, filtration: Filtration) -> Result<LieAlgebra, LieError> {
        filtration.validate(&self)?;
        self.replace_attachments(None, Some(filtration))
    }

    fn replace_attachments(
        self,
        grading: Option<Grading>,
        filtration: Option<Filtration>,
    ) -> Result<LieAlgebra, LieError> {
        let data = match Arc::try_unwrap(self.0) {
            Ok(d) => LieData {
                grading: grading.or(d.grading),
                filtration: filtration.or(d.filtration),
                ..d
            },
            Err(arc) => LieData {
                f: arc.f.clone(),
                dim: arc.dim,
                labels: arc.labels.clone(),
                table: arc.table.clone(),
                grading: grading.or_else(|| arc.grading.clone()),
                filtration: filtration.or_else(|| arc.filtration.clone()),
                pmap: OnceLock::new(),
            },
        };
        Ok(LieAlgebra(Arc::new(data)))
    }

    pub(crate) fn pmap_cell(&self) -> &OnceLock<crate::restricted::PMapData> {
        &self.0.pmap
    }

    /// [b_i, b_j] as a sparse coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> SparseVec {
        use std::cmp::Ordering;
        match i.cmp(&j) {
            Ordering::Equal => SparseVec::empty(),
            Ordering::Less => self
                .0
                .table[i]
                .binary_search_by_key(&(j as u32), |(jj, _)| *jj)
                .map(|pos| self.0.table[i][pos].1.clone())
                .unwrap_or_else(|_| SparseVec::empty()),
            Ordering::Greater => {
                let v = self.bracket_basis(j, i);
                v.scale(self.field(), &self.field().from_int(-1))
            }
        }
    }

    /// [v, b_j] for sparse v.
    pub fn bracket_sparse_with_basis(&self, v: &SparseVec, j: usize) -> SparseVec {
        let f = self.field();
        let k = f.k();
        let n = self.dim();
        let mut acc = vec![0u64; n * k];
        for (pos, &i) in v.idx.iter().enumerate() {
            let c = &v.dat[pos * k..(pos + 1) * k];
            let term = self.bracket_basis(i as usize, j);
            term.axpy_into(f, c, &mut acc);
        }
        SparseVec::from_dense(f, &acc)
    }

    pub fn bracket_sparse(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let f = self.field();
        let k = f.k();
        let n = self.dim();
        let mut acc = vec![0u64; n * k];
        for (px, &i) in x.idx.iter().enumerate() {
            let xi = &x.dat[px * k..(px + 1) * k];
            for (py, &j) in y.idx.iter().enumerate() {
                let yj = &y.dat[py * k..(py + 1) * k];
                let c = f.mul_slice(xi, yj);
                if f.is_zero_slice(&c) {
                    continue;
                }
                let term = self.bracket_basis(i as usize, j as usize);
                term.axpy_into(f, &c, &mut acc);
            }
        }
        SparseVec::from_dense(f, &acc)
    }

    pub fn bracket_dense(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let f = self.field();
        self.bracket_sparse(&SparseVec::from_dense(f, x), &SparseVec::from_dense(f, y))
            .to_dense(f, self.dim())
    }

    pub fn element(&self, coords: Vec<u64>) -> Result<LieElement, LieError> {
        let k = self.field().k();
        if coords.len() != self.dim() * k {
            return Err(LieError::BadCoordinates(coords.len(), self.dim() * k));
        }
        let p = self.field().p();
        let c = coords.into_iter().map(|w| w % p).collect();
        Ok(LieElement { alg: self.clone(), c })
    }

    pub fn basis_element(&self, i: usize) -> LieElement {
        let k = self.field().k();
        let mut c = vec![0u64; self.dim() * k];
        c[i * k] = 1;
        LieElement { alg: self.clone(), c }
    }

    pub fn zero_element(&self) -> LieElement {
        LieElement { alg: self.clone(), c: vec![0; self.dim() * self.field().k()] }
    }

    /// Matrix of ad x acting on column coordinate vectors.
    pub fn ad_matrix(&self, x: &[u64]) -> Matrix {
        let f = self.field();
        let n = self.dim();
        let k = f.k();
        let sx = SparseVec::from_dense(f, x);
        let mut cols: Vec<SparseVec> = Vec::with_capacity(n);
        for j in 0..n {
            cols.push(self.bracket_sparse_with_basis(&sx, j));
        }
        // Transpose columns into sparse rows.
        let mut rows_idx: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut rows_dat: Vec<Vec<u64>> = vec![Vec::new(); n];
        for (j, col) in cols.iter().enumerate() {
            for (pos, &r) in col.idx.iter().enumerate() {
                rows_idx[r as usize].push(j as u32);
                rows_dat[r as usize].extend_from_slice(&col.dat[pos * k..(pos + 1) * k]);
            }
        }
        let rs = rows_idx
            .into_iter()
            .zip(rows_dat)
            .map(|(idx, dat)| SparseVec { idx, dat })
            .collect();
        Matrix { f: f.clone(), rows: n, cols: n, rs }
    }

    pub fn ad_basis(&self, i: usize) -> Matrix {
        let k = self.field().k();
        let mut x = vec![0u64; self.dim() * k];
        x[i * k] = 1;
        self.ad_matrix(&x)
    }

    pub fn adjoint_matrices(&self) -> Vec<Matrix> {
        (0..self.dim()).map(|i| self.ad_basis(i)).collect()
    }

    /// A small set of elements generating the whole algebra as a Lie
    /// algebra, found greedily.  A subspace invariant under ad of a
    /// generating set is invariant under all of ad L, so these suffice
    /// for ideal-lattice computations.
    pub fn generating_elements(&self) -> Vec<SparseVec> {
        let f = self.field();
        let n = self.dim();
        let mut gens: Vec<SparseVec> = Vec::new();
        let mut span = self.closure(&gens, ClosureMode::Subalgebra);
        while span.dim() < n {
            let se = span.to_echelon();
            let next = (0..n)
                .find(|&i| {
                    let unit = SparseVec { idx: vec![i as u32], dat: f.one_slice() };
                    !se.reduce(&unit).idx.is_empty()
                })
                .expect("span is proper, some unit vector is missing");
            gens.push(SparseVec { idx: vec![next as u32], dat: f.one_slice() });
            span = self.closure(&gens, ClosureMode::Subalgebra);
        }
        gens
    }

    /// Adjoint matrices of a generating set; enough to cut out the
    /// ideal lattice as invariant subspaces.
    pub fn generating_adjoints(&self) -> Vec<Matrix> {
        let f = self.field();
        let n = self.dim();
        self.generating_elements()
            .iter()
            .map(|v| self.ad_matrix(&v.to_dense(f, n)))
            .collect()
    }

    /// Smallest subalgebra or ideal containing the seed vectors.
    pub fn closure(&self, seed: &[SparseVec], mode: ClosureMode) -> SubspaceBasis {
        let f = self.field();
        let n = self.dim();
        let mut e = Echelon::new(f, n);
        let mut members: Vec<SparseVec> = Vec::new();
        let mut queue: Vec<SparseVec> = Vec::new();
        for v in seed {
            if e.insert(v) {
                members.push(v.clone());
                queue.push(v.clone());
            }
        }
        while let Some(v) = queue.pop() {
            match mode {
                ClosureMode::Ideal => {
                    for i in 0..n {
                        let w = self.bracket_sparse_with_basis(&v, i);
                        if e.insert(&w) {
                            members.push(w.clone());
                            queue.push(w);
                        }
                        if e.rank() == n {
                            return SubspaceBasis::whole(f, n);
                        }
                    }
                }
                ClosureMode::Subalgebra => {
                    // Bracket against the current snapshot; vectors added
                    // later bracket with v when they are popped.
                    let snapshot = members.clone();
                    for u in snapshot {
                        let w = self.bracket_sparse(&u, &v);
                        if e.insert(&w) {
                            members.push(w.clone());
                            queue.push(w);
                        }
                        if e.rank() == n {
                            return SubspaceBasis::whole(f, n);
                        }
                    }
                }
            }
        }
        SubspaceBasis::from_echelon(e)
    }

    /// Span of [A, B].
    pub fn bracket_spaces(&self, a: &SubspaceBasis, b: &SubspaceBasis) -> SubspaceBasis {
        let f = self.field();
        let mut e = Echelon::new(f, self.dim());
        for u in &a.rows {
            for v in &b.rows {
                e.insert(&self.bracket_sparse(u, v));
            }
        }
        SubspaceBasis::from_echelon(e)
    }

    pub fn center(&self) -> SubspaceBasis {
        // x central iff ad(b_j)x = 0 for all j; stack the ad matrices.
        let f = self.field();
        let n = self.dim();
        let mut rows = Vec::new();
        for j in 0..n {
            rows.extend(self.ad_basis(j).rs);
        }
        nullspace(&Matrix::from_sparse_rows(f, n, rows))
    }

    /// {x : [x, s] ⊆ S for all s ∈ S}.
    pub fn normalizer(&self, s: &SubspaceBasis) -> SubspaceBasis {
        self.stabilizer_rows(s, s)
    }

    /// {x : [x, t] = 0 for all t ∈ T}.
    pub fn centralizer(&self, t: &SubspaceBasis) -> SubspaceBasis {
        let f = self.field();
        let n = self.dim();
        let mut rows = Vec::new();
        for v in &t.rows {
            // Row block: x ↦ [x, v] = -ad(v)x.
            rows.extend(self.ad_matrix(&v.to_dense(f, n)).rs);
        }
        if rows.is_empty() {
            return SubspaceBasis::whole(f, n);
        }
        nullspace(&Matrix::from_sparse_rows(f, n, rows))
    }

    /// {x : [x, target-rows] ⊆ within}.
    pub fn stabilizer_rows(&self, target: &SubspaceBasis, within: &SubspaceBasis) -> SubspaceBasis {
        let f = self.field();
        let n = self.dim();
        let k = f.k();
        let we = within.to_echelon();
        // For each target row v: condition rows over x: residue of [x, v]
        // modulo `within` must vanish.  [x,v] = -ad(v) x; reduce each
        // column of ad(v) by the echelon and keep nonzero residues.
        let mut rows: Vec<SparseVec> = Vec::new();
        for v in &target.rows {
            let adv = self.ad_matrix(&v.to_dense(f, n));
            // Column j of adv = [b_j, v] ... note ad(v) x = [v, x], so
            // [x, v] = -[v, x]; the sign does not change the kernel.
            let mut cols_res: Vec<SparseVec> = Vec::with_capacity(n);
            for j in 0..n {
                let mut col = vec![0u64; n * k];
                for (r, row) in adv.rs.iter().enumerate() {
                    if let Some(c) = row.coeff(f, j) {
                        col[r * k..(r + 1) * k].copy_from_slice(c);
                    }
                }
                cols_res.push(we.reduce(&SparseVec::from_dense(f, &col)));
            }
            // Constraint block: rows indexed by ambient coordinate r.
            let mut blk_idx: Vec<Vec<u32>> = vec![Vec::new(); n];
            let mut blk_dat: Vec<Vec<u64>> = vec![Vec::new(); n];
            for (j, res) in cols_res.iter().enumerate() {
                for (pos, &r) in res.idx.iter().enumerate() {
                    blk_idx[r as usize].push(j as u32);
                    blk_dat[r as usize].extend_from_slice(&res.dat[pos * k..(pos + 1) * k]);
                }
            }
            for (idx, dat) in blk_idx.into_iter().zip(blk_dat) {
                if !idx.is_empty() {
                    rows.push(SparseVec { idx, dat });
                }
            }
        }
        if rows.is_empty() {
            return SubspaceBasis::whole(f, n);
        }
        nullspace(&Matrix::from_sparse_rows(f, n, rows))
    }

    pub fn is_abelian(&self) -> bool {
        self.0.table.iter().all(|row| row.iter().all(|(_, v)| v.is_zero()))
    }

    pub fn derived_subspace(&self) -> SubspaceBasis {
        let whole = SubspaceBasis::whole(self.field(), self.dim());
        self.bracket_spaces(&whole, &whole)
    }

    /// Center, both series, and the solvability/nilpotency flags.
    pub fn structural_series(&self) -> StructuralSeries {
        let f = self.field();
        let n = self.dim();
        let whole = SubspaceBasis::whole(f, n);
        let mut derived = vec![whole.clone()];
        loop {
            let last = derived.last().unwrap();
            let next = self.bracket_spaces(last, last);
            if next.dim() == last.dim() {
                break;
            }
            let stop = next.dim() == 0;
            derived.push(next);
            if stop {
                break;
            }
        }
        let mut lower = vec![whole.clone()];
        loop {
            let last = lower.last().unwrap();
            let next = self.bracket_spaces(&whole, last);
            if next.dim() == last.dim() {
                break;
            }
            let stop = next.dim() == 0;
            lower.push(next);
            if stop {
                break;
            }
        }
        let is_solvable = derived.last().unwrap().dim() == 0 || n == 0;
        let is_nilpotent = lower.last().unwrap().dim() == 0 || n == 0;
        StructuralSeries {
            center: self.center(),
            derived_series: derived,
            lower_central_series: lower,
            is_solvable,
            is_nilpotent,
        }
    }

    pub fn is_solvable(&self) -> bool {
        let whole = SubspaceBasis::whole(self.field(), self.dim());
        let mut cur = whole;
        loop {
            let next = self.bracket_spaces(&cur, &cur);
            if next.dim() == 0 {
                return true;
            }
            if next.dim() == cur.dim() {
                return false;
            }
            cur = next;
        }
    }

    pub fn is_nilpotent_algebra(&self) -> bool {
        let whole = SubspaceBasis::whole(self.field(), self.dim());
        let mut cur = whole.clone();
        loop {
            let next = self.bracket_spaces(&whole, &cur);
            if next.dim() == 0 {
                return true;
            }
            if next.dim() == cur.dim() {
                return false;
            }
            cur = next;
        }
    }

    /// All derivations D (matrices with D[x,y] = [Dx,y] + [x,Dy]) as a
    /// Lie algebra under the commutator.
    pub fn derivation_algebra(&self) -> Result<DerivationAlgebra, LieError> {
        let limit = dim_limit();
        let n = self.dim();
        if n > limit {
            return Err(LieError::DimensionLimitExceeded(n, limit));
        }
        let f = self.field();
        let k = f.k();
        // Unknowns D_{rs} flattened as r*n + s; constraint rows per basis
        // pair (i < j) and output coordinate r.
        let mut rows: Vec<SparseVec> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let target = self.bracket_basis(i, j).to_dense(f, n);
                let mut blk: Vec<Vec<u64>> = vec![vec![0u64; n * n * k]; n];
                for s in 0..n {
                    // [D b_i, b_j] picks up D_{si} [b_s, b_j].
                    let csj = self.bracket_basis(s, j);
                    for (pos, &r) in csj.idx.iter().enumerate() {
                        let dst = &mut blk[r as usize][(s * n + i) * k..(s * n + i + 1) * k];
                        let add = csj.dat[pos * k..(pos + 1) * k].to_vec();
                        f.add_assign_slice(dst, &add);
                    }
                    // [b_i, D b_j] picks up D_{sj} [b_i, b_s].
                    let cis = self.bracket_basis(i, s);
                    for (pos, &r) in cis.idx.iter().enumerate() {
                        let dst = &mut blk[r as usize][(s * n + j) * k..(s * n + j + 1) * k];
                        let add = cis.dat[pos * k..(pos + 1) * k].to_vec();
                        f.add_assign_slice(dst, &add);
                    }
                }
                // Minus D([b_i,b_j]) = -sum_s target_s D_{rs}.
                for r in 0..n {
                    for s in 0..n {
                        let t = &target[s * k..(s + 1) * k];
                        if !f.is_zero_slice(t) {
                            let dst = &mut blk[r][(r * n + s) * k..(r * n + s + 1) * k];
                            let neg = f.neg_slice(t);
                            f.add_assign_slice(dst, &neg);
                        }
                    }
                }
                for row in blk {
                    let sv = SparseVec::from_dense(f, &row);
                    if !sv.is_zero() {
                        rows.push(sv);
                    }
                }
            }
        }
        let ns = if rows.is_empty() {
            SubspaceBasis::whole(f, n * n)
        } else {
            nullspace(&Matrix::from_sparse_rows(f, n * n, rows))
        };
        let matrices: Vec<Matrix> = ns
            .rows
            .iter()
            .map(|v| {
                let dense = v.to_dense(f, n * n);
                let rows: Vec<Vec<u64>> =
                    (0..n).map(|r| dense[r * n * k..(r + 1) * n * k].to_vec()).collect();
                Matrix::from_dense_rows(f, n, &rows)
            })
            .collect();
        // Commutator structure constants in the derivation basis.
        let flat_echelon = ns.to_echelon();
        let d = matrices.len();
        let mut entries: StructureEntries = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                let comm = matrices[a].mul(&matrices[b]).sub(&matrices[b].mul(&matrices[a]));
                let coords = flat_echelon
                    .coordinates(&comm.flatten())
                    .expect("derivations are closed under the commutator");
                let terms: Vec<(usize, Vec<u64>)> = (0..d)
                    .filter_map(|t| {
                        let c = coords[t * k..(t + 1) * k].to_vec();
                        if f.is_zero_slice(&c) {
                            None
                        } else {
                            Some((t, c))
                        }
                    })
                    .collect();
                if !terms.is_empty() {
                    entries.push((a, b, terms));
                }
            }
        }
        let labels = (0..d).map(|i| format!("D{}", i)).collect();
        let algebra = LieAlgebra::from_structure_constants(
            f,
            labels,
            entries,
            Validation::SpotCheck { seed: 0x6465_72, samples: 200 },
        )?;
        Ok(DerivationAlgebra { algebra, matrices })
    }

    pub fn killing_form(&self) -> BilinearForm {
        let f = self.field();
        let n = self.dim();
        let k = f.k();
        let ads = self.adjoint_matrices();
        let mut gram = vec![0u64; n * n * k];
        for i in 0..n {
            for j in i..n {
                // trace(ad b_i · ad b_j) = sum_{r,s} (ad b_i)_{rs} (ad b_j)_{sr}.
                let mut acc = f.zero_slice();
                for (r, row) in ads[i].rs.iter().enumerate() {
                    for (pos, &s) in row.idx.iter().enumerate() {
                        if let Some(c) = ads[j].rs[s as usize].coeff(f, r) {
                            let t = f.mul_slice(&row.dat[pos * k..(pos + 1) * k], c);
                            f.add_assign_slice(&mut acc, &t);
                        }
                    }
                }
                gram[(i * n + j) * k..(i * n + j + 1) * k].copy_from_slice(&acc);
                gram[(j * n + i) * k..(j * n + i + 1) * k].copy_from_slice(&acc);
            }
        }
        BilinearForm { f: f.clone(), dim: n, gram }
    }

    /// Simple iff dim > 1, perfect, and the adjoint module is
    /// irreducible (proper ideals are exactly proper submodules).
    pub fn is_simple(&self, seed: u64) -> bool {
        let n = self.dim();
        if n <= 1 {
            return false;
        }
        if self.derived_subspace().dim() != n {
            return false;
        }
        module_irreducible(self.field(), n, &self.generating_adjoints(), seed).is_irreducible()
    }

    /// A minimal nonzero ideal (minimal adjoint submodule).
    pub fn minimal_ideal(&self, seed: u64) -> SubspaceBasis {
        let f = self.field();
        let n = self.dim();
        assert!(n > 0, "the zero algebra has no minimal ideal");
        let gens = self.generating_adjoints();
        let mut cur = SubspaceBasis::whole(f, n);
        loop {
            // Restrict the action to `cur` and test irreducibility there.
            let d = cur.dim();
            let e = cur.to_echelon();
            let k = f.k();
            let mut rgens = Vec::with_capacity(gens.len());
            for g in &gens {
                let mut r = Matrix::zero(f, d, d);
                for (i, row) in cur.rows.iter().enumerate() {
                    let img = g.apply(&row.to_dense(f, n));
                    let coords = e
                        .coordinates(&SparseVec::from_dense(f, &img))
                        .expect("ideals are invariant under the adjoint action");
                    for j in 0..d {
                        let c = &coords[j * k..(j + 1) * k];
                        if !f.is_zero_slice(c) {
                            r.set_entry(j, i, c);
                        }
                    }
                }
                rgens.push(r);
            }
            match module_irreducible(f, d, &rgens, seed) {
                ModuleVerdict::Irreducible => return cur,
                ModuleVerdict::Reducible(w) => {
                    // Lift the witness back to ambient coordinates.
                    let mut lifted = Vec::with_capacity(w.dim());
                    for x in &w.rows {
                        let xd = x.to_dense(f, d);
                        let mut acc = vec![0u64; n * k];
                        for i in 0..d {
                            cur.rows[i].axpy_into(f, &xd[i * k..(i + 1) * k], &mut acc);
                        }
                        lifted.push(acc);
                    }
                    cur = SubspaceBasis::from_dense_vectors(f, n, &lifted);
                }
            }
        }
    }

    /// The largest solvable ideal.
    ///
    /// Strategy: solvable algebras are their own radical.  Otherwise find
    /// a minimal ideal W.  If W is abelian, rad(L) is the preimage of
    /// rad(L/W).  If W is perfect (nonabelian minimal), the radical
    /// centralizes W, so rad(L) = c_L(W) ∩ preimage of rad(L/W): the
    /// right side is a solvable ideal (its image in L/W is solvable and
    /// its intersection kernel-part c_L(W) ∩ W is central in W, zero by
    /// perfectness), and it contains rad(L) since rad(L) ∩ W = 0 forces
    /// [rad(L), W] ⊆ rad(L) ∩ W = 0.
    pub fn solvable_radical(&self, seed: u64) -> Result<SubspaceBasis, LieError> {
        let limit = dim_limit().max(150);
        if self.dim() > limit {
            return Err(LieError::DimensionLimitExceeded(self.dim(), limit));
        }
        Ok(self.solvable_radical_inner(seed))
    }

    fn solvable_radical_inner(&self, seed: u64) -> SubspaceBasis {
        let f = self.field();
        let n = self.dim();
        if n == 0 || self.is_solvable() {
            return SubspaceBasis::whole(f, n);
        }
        let w = self.minimal_ideal(seed);
        let w_perfect = self.bracket_spaces(&w, &w).dim() == w.dim();
        let (q, map) = self.quotient(&w).expect("minimal ideal passes the ideal check");
        let rad_q = q.solvable_radical_inner(seed);
        // Preimage of rad(L/W).
        let mut pre = w.clone();
        for r in &rad_q.rows {
            let lift = map.section(f, &r.to_dense(f, q.dim()));
            pre = pre.sum(&SubspaceBasis::from_dense_vectors(f, n, &[lift]));
        }
        if !w_perfect {
            pre
        } else {
            pre.intersect(&self.centralizer(&w))
        }
    }

    /// Quotient by a verified ideal, with the projection data.
    pub fn quotient(&self, ideal: &SubspaceBasis) -> Result<(LieAlgebra, QuotientMap), LieError> {
        let f = self.field();
        let n = self.dim();
        let k = f.k();
        let e = ideal.to_echelon();
        for row in &ideal.rows {
            for i in 0..n {
                if !e.contains(&self.bracket_sparse_with_basis(row, i)) {
                    return Err(LieError::NotAnIdeal(i));
                }
            }
        }
        let complement = ideal.complement_units();
        let map = QuotientMap { ideal: ideal.clone(), complement: complement.clone(), parent_dim: n };
        let d = complement.len();
        let mut entries: StructureEntries = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                let br = self.bracket_basis(complement[a], complement[b]);
                let red = e.reduce(&br).to_dense(f, n);
                let terms: Vec<(usize, Vec<u64>)> = (0..d)
                    .filter_map(|t| {
                        let c = red[complement[t] * k..(complement[t] + 1) * k].to_vec();
                        if f.is_zero_slice(&c) {
                            None
                        } else {
                            Some((t, c))
                        }
                    })
                    .collect();
                if !terms.is_empty() {
                    entries.push((a, b, terms));
                }
            }
        }
        let labels = complement.iter().map(|&c| format!("[{}]", self.label(c))).collect();
        let q = LieAlgebra::from_structure_constants(
            f,
            labels,
            entries,
            Validation::SpotCheck { seed: 0x71, samples: 200 },
        )?;
        // Projection is a homomorphism on all basis pairs.
        debug_assert!((0..n).all(|i| (i + 1..n).all(|j| {
            let lhs = map.project(f, &self.bracket_basis(i, j).to_dense(f, n));
            let mut bi = vec![0u64; n * k];
            bi[i * k] = 1;
            let mut bj = vec![0u64; n * k];
            bj[j * k] = 1;
            let rhs = q.bracket_dense(&map.project(f, &bi), &map.project(f, &bj));
            lhs == rhs
        })));
        Ok((q, map))
    }

    /// Algebra structure induced on a bracket-closed subspace, with the
    /// rows of `basis` as the new basis.
    pub fn induced_algebra(&self, basis: &SubspaceBasis) -> Result<LieAlgebra, LieError> {
        let f = self.field();
        let e = basis.to_echelon();
        let d = basis.dim();
        let k = f.k();
        let mut entries: StructureEntries = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                let br = self.bracket_sparse(&basis.rows[a], &basis.rows[b]);
                let coords = e.coordinates(&br).ok_or(LieError::NotASubalgebra)?;
                let terms: Vec<(usize, Vec<u64>)> = (0..d)
                    .filter_map(|t| {
                        let c = coords[t * k..(t + 1) * k].to_vec();
                        if f.is_zero_slice(&c) {
                            None
                        } else {
                            Some((t, c))
                        }
                    })
                    .collect();
                if !terms.is_empty() {
                    entries.push((a, b, terms));
                }
            }
        }
        let labels = basis
            .rows
            .iter()
            .map(|r| {
                if r.nnz() == 1 && f.is_one_slice(&r.dat[0..k]) {
                    self.label(r.idx[0] as usize).to_string()
                } else {
                    format!("v{}", r.idx.first().copied().unwrap_or(0))
                }
            })
            .collect();
        LieAlgebra::from_structure_constants(
            f,
            labels,
            entries,
            Validation::SpotCheck { seed: 0x73, samples: 200 },
        )
    }
}

impl LieElement {
    pub fn bracket(&self, other: &LieElement) -> Result<LieElement, LieError> {
        if !self.alg.same_algebra(&other.alg) {
            return Err(LieError::ParentMismatch);
        }
        Ok(LieElement { alg: self.alg.clone(), c: self.alg.bracket_dense(&self.c, &other.c) })
    }

    pub fn add(&self, other: &LieElement) -> Result<LieElement, LieError> {
        if !self.alg.same_algebra(&other.alg) {
            return Err(LieError::ParentMismatch);
        }
        let f = self.alg.field();
        let mut c = self.c.clone();
        f.add_assign_slice(&mut c, &other.c);
        Ok(LieElement { alg: self.alg.clone(), c })
    }

    pub fn sub(&self, other: &LieElement) -> Result<LieElement, LieError> {
        self.add(&other.scale(&self.alg.field().from_int(-1)))
    }

    pub fn scale(&self, coeff: &[u64]) -> LieElement {
        let f = self.alg.field();
        let k = f.k();
        let mut c = vec![0u64; self.c.len()];
        for i in 0..self.c.len() / k {
            let prod = f.mul_slice(&self.c[i * k..(i + 1) * k], coeff);
            c[i * k..(i + 1) * k].copy_from_slice(&prod);
        }
        LieElement { alg: self.alg.clone(), c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&w| w == 0)
    }

    pub fn coords(&self) -> &[u64] {
        &self.c
    }
}

impl PartialEq for LieElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg.same_algebra(&other.alg) && self.c == other.c
    }
}

/// The length-5 table [e_i, e_j] = (j - i) e_{i+j} on indices -1..=3,
/// entries vanishing outside the range; used pervasively in tests.
pub fn witt_w11_table(f: &Field) -> Result<LieAlgebra, LieError> {
    let p = f.p() as i64;
    assert!(f.k() == 1 && p >= 5);
    let idx = |i: i64| -> Option<usize> {
        if (-1..=p - 2).contains(&i) {
            Some((i + 1) as usize)
        } else {
            None
        }
    };
    let mut entries: StructureEntries = Vec::new();
    for i in -1..=(p - 2) {
        for j in (i + 1)..=(p - 2) {
            if let Some(t) = idx(i + j) {
                let c = f.from_int(j - i);
                if !f.is_zero_slice(&c) {
                    entries.push((idx(i).unwrap(), idx(j).unwrap(), vec![(t, c)]));
                }
            }
        }
    }
    let labels = (-1..=(p - 2)).map(|i| format!("e{}", i)).collect();
    let degrees: Vec<i64> = (-1..=(p - 2)).collect();
    LieAlgebra::from_structure_constants(f, labels, entries, Validation::Full)?
        .with_grading(degrees)
        .map(|l| {
            let filt = grading::Filtration::from_grading(&l).expect("graded algebra filters");
            l.with_filtration(filt).expect("natural filtration is valid")
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;

    fn gf5() -> Field {
        FieldTower::new(1).field(5, 1).unwrap()
    }

    fn witt(f: &Field) -> LieAlgebra {
        witt_w11_table(f).unwrap()
    }

    fn heisenberg(f: &Field) -> LieAlgebra {
        // [x, y] = z, z central.
        LieAlgebra::from_structure_constants(
            f,
            vec!["x".into(), "y".into(), "z".into()],
            vec![(0, 1, vec![(2, vec![1])])],
            Validation::Full,
        )
        .unwrap()
    }

    fn sl2(f: &Field) -> LieAlgebra {
        // Basis (e, h, f): [e,h] = -2e, [e,f] = h, [h,f] = -2f.
        LieAlgebra::from_structure_constants(
            f,
            vec!["e".into(), "h".into(), "f".into()],
            vec![
                (0, 1, vec![(0, f.from_int(-2))]),
                (0, 2, vec![(1, vec![1])]),
                (1, 2, vec![(2, f.from_int(-2))]),
            ],
            Validation::Full,
        )
        .unwrap()
    }

    #[test]
    fn witt_table_is_valid_and_bracket_matches() {
        let f = gf5();
        let w = witt(&f);
        assert_eq!(w.dim(), 5);
        // [e1, e2] = e3: indices 2 and 3 in the shifted basis.
        let b = w.bracket_basis(2, 3);
        assert_eq!(b.to_dense(&f, 5), vec![0, 0, 0, 0, 1]);
        // [e_{-1}, e_1] = 2 e_0.
        let b = w.bracket_basis(0, 2);
        assert_eq!(b.to_dense(&f, 5), vec![0, 2, 0, 0, 0]);
        // [x, x] = 0 through the element interface.
        let x = w.element(vec![1, 2, 3, 4, 0]).unwrap();
        assert!(x.bracket(&x).unwrap().is_zero());
    }

    #[test]
    fn antisymmetry_violation_detected() {
        let f = gf5();
        let r = LieAlgebra::from_structure_constants(
            &f,
            vec!["a".into(), "b".into()],
            vec![(0, 1, vec![(0, vec![1])]), (1, 0, vec![(0, vec![1])])],
            Validation::Full,
        );
        assert!(matches!(r, Err(LieError::AntisymmetryViolation(1, 0))));
        // Abelian table is fine.
        let a = LieAlgebra::from_structure_constants(
            &f,
            vec!["a".into(), "b".into()],
            vec![],
            Validation::Full,
        );
        assert!(a.is_ok());
    }

    #[test]
    fn jacobi_violation_detected() {
        let f = gf5();
        // [a,b] = c, [a,c] = a, [b,c] = 0: the cyclic sum on (a,b,c)
        // leaves [b, a] = -c.
        let r = LieAlgebra::from_structure_constants(
            &f,
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1, vec![(2, vec![1])]), (0, 2, vec![(0, vec![1])])],
            Validation::Full,
        );
        assert!(matches!(r, Err(LieError::JacobiViolation(0, 1, 2))));
    }

    #[test]
    fn closure_examples() {
        let f = gf5();
        let w = witt(&f);
        // Ideal generated by any nonzero element is everything.
        for i in 0..5 {
            let seed = SparseVec::unit(&f, i);
            assert_eq!(w.closure(&[seed], ClosureMode::Ideal).dim(), 5);
        }
        // Subalgebra generated by {e_{-1}, e_2} is everything.
        let sub = w.closure(
            &[SparseVec::unit(&f, 0), SparseVec::unit(&f, 3)],
            ClosureMode::Subalgebra,
        );
        assert_eq!(sub.dim(), 5);
        // Subalgebra generated by e_0 alone is one-dimensional.
        let sub = w.closure(&[SparseVec::unit(&f, 1)], ClosureMode::Subalgebra);
        assert_eq!(sub.dim(), 1);
    }

    #[test]
    fn series_and_flags() {
        let f = gf5();
        let h = heisenberg(&f);
        let s = h.structural_series();
        assert_eq!(s.center.dim(), 1);
        assert!(s.is_nilpotent && s.is_solvable);
        let w = witt(&f);
        let s = w.structural_series();
        assert_eq!(s.center.dim(), 0);
        assert_eq!(s.derived_series.len(), 1, "derived algebra equals the whole algebra");
        assert!(!s.is_solvable && !s.is_nilpotent);
    }

    #[test]
    fn derivations_of_small_algebras() {
        let f = gf5();
        // Abelian of dimension 2: derivations are all of gl(2).
        let a = LieAlgebra::from_structure_constants(
            &f,
            vec!["a".into(), "b".into()],
            vec![],
            Validation::Full,
        )
        .unwrap();
        let d = a.derivation_algebra().unwrap();
        assert_eq!(d.algebra.dim(), 4);
        // The length-5 table: all derivations inner, dimension 5.
        let w = witt(&f);
        let d = w.derivation_algebra().unwrap();
        assert_eq!(d.algebra.dim(), 5);
        for m in &d.matrices {
            // Derivation property re-checked on random pairs.
            let x = vec![1, 2, 0, 4, 3];
            let y = vec![0, 1, 1, 0, 2];
            let lhs = m.apply(&w.bracket_dense(&x, &y));
            let mut rhs = w.bracket_dense(&m.apply(&x), &y);
            f.add_assign_slice(&mut rhs, &w.bracket_dense(&x, &m.apply(&y)));
            assert_eq!(lhs, rhs);
        }
        // sl(2): dimension 3.
        let s = sl2(&f);
        assert_eq!(s.derivation_algebra().unwrap().algebra.dim(), 3);
    }

    #[test]
    fn killing_form_values() {
        let f = gf5();
        let w = witt(&f);
        assert!(w.killing_form().is_zero(), "trace form vanishes identically here");
        let s = sl2(&f);
        let kf = s.killing_form();
        assert!(!kf.is_zero());
        assert_eq!(kf.radical().dim(), 0, "nondegenerate on sl(2) at p=5");
        let h = heisenberg(&f);
        assert!(h.killing_form().is_zero());
    }

    #[test]
    fn simplicity_and_radicals() {
        let f = gf5();
        let w = witt(&f);
        assert!(w.is_simple(3));
        assert_eq!(w.solvable_radical(3).unwrap().dim(), 0);
        let s = sl2(&f);
        assert!(s.is_simple(3));
        let h = heisenberg(&f);
        assert!(!h.is_simple(3));
        assert_eq!(h.solvable_radical(3).unwrap().dim(), 3);
    }

    #[test]
    fn gl2_radical_is_the_center() {
        let f = gf5();
        // gl(2) basis (E11, E12, E21, E22).
        let gl2 = LieAlgebra::from_structure_constants(
            &f,
            vec!["E11".into(), "E12".into(), "E21".into(), "E22".into()],
            vec![
                (0, 1, vec![(1, vec![1])]),
                (0, 2, vec![(2, f.from_int(-1))]),
                (1, 2, vec![(0, vec![1]), (3, f.from_int(-1))]),
                (1, 3, vec![(1, vec![1])]),
                (2, 3, vec![(2, f.from_int(-1))]),
            ],
            Validation::Full,
        )
        .unwrap();
        assert!(!gl2.is_simple(3));
        let rad = gl2.solvable_radical(3).unwrap();
        assert_eq!(rad.dim(), 1);
        assert!(rad.contains_dense(&[1, 0, 0, 1]), "radical is the scalar line");
        // Quotient by the radical has zero radical.
        let (q, _) = gl2.quotient(&rad).unwrap();
        assert_eq!(q.solvable_radical(3).unwrap().dim(), 0);
        // Ideal closure of the scalar line stays one-dimensional.
        let scal = SparseVec::from_dense(&f, &[1, 0, 0, 1]);
        assert_eq!(gl2.closure(&[scal], ClosureMode::Ideal).dim(), 1);
    }

    #[test]
    fn quotient_examples() {
        let f = gf5();
        let w = witt(&f);
        // L / 0 is L again.
        let zero = SubspaceBasis::zero(&f, 5);
        let (q, _) = w.quotient(&zero).unwrap();
        assert_eq!(q.dim(), 5);
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(q.bracket_basis(i, j), w.bracket_basis(i, j));
            }
        }
        // Non-ideal rejected.
        let not_ideal = SubspaceBasis::from_dense_vectors(&f, 5, &[vec![0, 1, 0, 0, 0]]);
        assert!(w.quotient(&not_ideal).is_err());
        // Projection/section roundtrip on the Heisenberg center quotient.
        let h = heisenberg(&f);
        let center = h.center();
        let (q, map) = h.quotient(&center).unwrap();
        assert_eq!(q.dim(), 2);
        for v in [[1u64, 0], [0, 1], [3, 4]] {
            let lifted = map.section(&f, &v);
            assert_eq!(map.project(&f, &lifted), v.to_vec());
        }
    }

    #[test]
    fn centralizer_and_normalizer() {
        let f = gf5();
        let w = witt(&f);
        // Centralizer of e_0 is the span of e_0 (ad e_0 has distinct
        // eigenvalues elsewhere).
        let e0 = SubspaceBasis::from_dense_vectors(&f, 5, &[vec![0, 1, 0, 0, 0]]);
        let c = w.centralizer(&e0);
        assert_eq!(c.dim(), 1);
        assert!(c.contains_dense(&[0, 1, 0, 0, 0]));
        // The nonnegative part is self-normalizing... its normalizer is
        // itself.
        let l0 = SubspaceBasis::from_dense_vectors(
            &f,
            5,
            &[
                vec![0, 1, 0, 0, 0],
                vec![0, 0, 1, 0, 0],
                vec![0, 0, 0, 1, 0],
                vec![0, 0, 0, 0, 1],
            ],
        );
        let nrm = w.normalizer(&l0);
        assert_eq!(nrm.dim(), 4);
        assert!(nrm.equals(&l0));
    }

    #[test]
    fn simplicity_agrees_with_bruteforce_ideals() {
        let f = gf5();
        for (alg, expect) in [(witt(&f), true), (sl2(&f), true), (heisenberg(&f), false)] {
            let n = alg.dim();
            // Enumerate all 1-generated ideals over projective lines.
            let mut simple = n > 1;
            let total: u64 = 5u64.pow(n as u32);
            let mut v = 1u64;
            while v < total {
                let mut coords = vec![0u64; n];
                let mut t = v;
                for c in coords.iter_mut() {
                    *c = t % 5;
                    t /= 5;
                }
                v += 1;
                let cl = alg.closure(&[SparseVec::from_dense(&f, &coords)], ClosureMode::Ideal);
                if cl.dim() < n {
                    simple = false;
                    break;
                }
            }
            assert_eq!(simple, expect);
            assert_eq!(alg.is_simple(11), expect);
        }
    }
}
