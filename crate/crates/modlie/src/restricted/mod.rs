//! Restricted structure: p-maps, p-envelopes, tori and toral rank.
//!
//! The computational core is one observation: a p-th power of x is any y
//! with ad y = (ad x)^p, and a derivation is determined by its values on a
//! generating set.  So each p-power is a single linear solve against the
//! stacked bracket action of the generators, and consistency of that
//! system decides innerness exactly.  When the centre is nonzero the
//! solver returns the solution whose free central part is zero; callers
//! that depend on the convention say so.
//!
//! Submodules: [`roots`] for root space decompositions, sections and the
//! degeneracy searches; [`winter`] for the Jacobson summands and the
//! exponential-style toral switches.

pub mod roots;
pub mod winter;

pub use roots::*;
pub use winter::*;

use crate::gf::poly::seeded_rng;
use crate::gf::{Field, FieldTower, GfError};
use crate::liealg::{LieAlgebra, LieError, StructureEntries, Validation};
use crate::linalg::jordan::jordan_chevalley_matrix;
use crate::linalg::{nullspace, solve, Echelon, LinalgError, Matrix, SparseVec, SubspaceBasis};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RestrictedError {
    #[error("no p-map: some (ad x)^p is an outer derivation")]
    NotRestrictable,
    #[error("operation requires a trivial centre")]
    NotCentreless,
    #[error("subspace is not abelian")]
    NotAbelian,
    #[error("subspace is not closed under the p-map")]
    NotPClosed,
    #[error("element does not lie in a nonzero root space")]
    NotRootVector,
    #[error("iterated p-powers escape the torus; it cannot be maximal")]
    TorusNotMaximal,
    #[error("weights are GF(p)-dependent")]
    DependentRoots,
    #[error("consistency check failed: {0}")]
    CheckFailed(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// p-map of a restrictable algebra, tabulated on the basis.
#[derive(Clone, Debug)]
pub struct PMapData {
    /// Dense image of each basis vector under x ↦ x^{[p]}.
    pub images: Vec<Vec<u64>>,
    /// Dimension of the centre; the map is canonical iff this is zero.
    pub centre_dim: usize,
}

/// Result of a single p-power solve.
#[derive(Clone, Debug)]
pub struct PPower {
    pub value: Vec<u64>,
    /// All solutions differ by this space (the centre).
    pub ambiguity: SubspaceBasis,
}

/// Prefactored solver for ad y = D.
///
/// Unknown y = Σ y_j b_j; the equations ad(b_g) y = -D b_g over a
/// generating set {b_g} pin y up to the centre.  Columns are stored in an
/// echelon augmented with unit tags so that solving is one reduction and
/// the tag part reads off the coefficients.
pub(crate) struct InnerSolver {
    f: Field,
    n: usize,
    /// Width of the main (stacked bracket) region.
    s: usize,
    gens: Vec<usize>,
    ech: Echelon,
}

impl InnerSolver {
    pub(crate) fn new(l: &LieAlgebra) -> InnerSolver {
        let f = l.field().clone();
        let n = l.dim();
        let k = f.k();
        let gens: Vec<usize> =
            l.generating_elements().iter().map(|g| g.idx[0] as usize).collect();
        let s = gens.len() * n;
        let mut ech = Echelon::new(&f, s + n);
        for j in 0..n {
            let mut idx: Vec<u32> = Vec::new();
            let mut dat: Vec<u64> = Vec::new();
            for (bi, &g) in gens.iter().enumerate() {
                let br = l.bracket_basis(g, j);
                for (pos, &t) in br.idx.iter().enumerate() {
                    idx.push((bi * n) as u32 + t);
                    dat.extend_from_slice(&br.dat[pos * k..(pos + 1) * k]);
                }
            }
            idx.push((s + j) as u32);
            dat.extend_from_slice(&f.one_slice());
            ech.insert(&SparseVec { idx, dat });
        }
        InnerSolver { f, n, s, gens, ech }
    }

    /// Solve ad y = d; None when d is not inner.
    pub(crate) fn solve(&self, d: &Matrix) -> Option<Vec<u64>> {
        let f = &self.f;
        let k = f.k();
        let n = self.n;
        let mut idx: Vec<u32> = Vec::new();
        let mut dat: Vec<u64> = Vec::new();
        for (bi, &g) in self.gens.iter().enumerate() {
            let mut unit = vec![0u64; n * k];
            unit[g * k] = 1;
            let col = d.apply(&unit);
            for t in 0..n {
                let c = &col[t * k..(t + 1) * k];
                if !f.is_zero_slice(c) {
                    idx.push((bi * n + t) as u32);
                    dat.extend_from_slice(&f.neg_slice(c));
                }
            }
        }
        let r = self.ech.reduce(&SparseVec { idx, dat });
        if r.idx.iter().any(|&i| (i as usize) < self.s) {
            return None;
        }
        let mut y = vec![0u64; n * k];
        for (pos, &i) in r.idx.iter().enumerate() {
            let j = i as usize - self.s;
            let c = f.neg_slice(&r.dat[pos * k..(pos + 1) * k]);
            y[j * k..(j + 1) * k].copy_from_slice(&c);
        }
        Some(y)
    }

    /// Solve ad y = (ad x)^p.
    pub(crate) fn p_power(&self, l: &LieAlgebra, x: &[u64]) -> Result<Vec<u64>, RestrictedError> {
        let d = l.ad_matrix(x).pow(self.f.p());
        self.solve(&d).ok_or(RestrictedError::NotRestrictable)
    }

    /// Rows whose pivot sits in the tag region encode relations among the
    /// columns, i.e. a basis of the centre.
    pub(crate) fn centre(&self) -> SubspaceBasis {
        let f = &self.f;
        let mut rows: Vec<SparseVec> = Vec::new();
        for (row, &pc) in self.ech.rows.iter().zip(&self.ech.pivots) {
            if (pc as usize) < self.s {
                continue;
            }
            let idx: Vec<u32> = row.idx.iter().map(|&i| i - self.s as u32).collect();
            rows.push(SparseVec { idx, dat: row.dat.clone() });
        }
        SubspaceBasis::from_vectors(f, self.n, rows)
    }
}

/// Tabulated p-map, computed once per algebra and cached.  None when some
/// basis vector has no p-th power.
pub fn pmap(l: &LieAlgebra) -> Option<&PMapData> {
    if l.pmap_cell().get().is_none() {
        let solver = InnerSolver::new(l);
        let mut images = Vec::with_capacity(l.dim());
        for i in 0..l.dim() {
            let d = l.ad_basis(i).pow(l.field().p());
            images.push(solver.solve(&d)?);
        }
        let centre_dim = solver.centre().dim();
        let _ = l.pmap_cell().set(PMapData { images, centre_dim });
    }
    l.pmap_cell().get()
}

/// (ad x)^p inner for every x; equivalently, every basis vector has one.
pub fn is_restrictable(l: &LieAlgebra) -> bool {
    pmap(l).is_some()
}

pub fn p_power(l: &LieAlgebra, x: &[u64]) -> Result<PPower, RestrictedError> {
    let solver = InnerSolver::new(l);
    let value = solver.p_power(l, x)?;
    Ok(PPower { value, ambiguity: solver.centre() })
}

/// Iterated p-powers x, x^{[p]}, x^{[p]^2}, … until the next iterate falls
/// into the span of the previous ones.  The span is p-closed.
pub(crate) fn p_chain(
    solver: &InnerSolver,
    l: &LieAlgebra,
    x: &[u64],
) -> Result<Vec<Vec<u64>>, RestrictedError> {
    let f = l.field();
    let n = l.dim();
    let mut ech = Echelon::new(f, n);
    let mut out: Vec<Vec<u64>> = Vec::new();
    let mut cur = x.to_vec();
    loop {
        let sv = SparseVec::from_dense(f, &cur);
        if !ech.insert(&sv) {
            return Ok(out);
        }
        out.push(cur.clone());
        cur = solver.p_power(l, &cur)?;
    }
}

/// t^{[p]} = t.
pub fn is_toral_element(l: &LieAlgebra, x: &[u64]) -> Result<bool, RestrictedError> {
    Ok(p_power(l, x)?.value == x)
}

/// x lies in the p-span of x^{[p]}, the defining property of semisimple
/// elements.
pub fn is_semisimple_element(l: &LieAlgebra, x: &[u64]) -> Result<bool, RestrictedError> {
    let solver = InnerSolver::new(l);
    let xp = solver.p_power(l, x)?;
    let chain = p_chain(&solver, l, &xp)?;
    Ok(SubspaceBasis::from_dense_vectors(l.field(), l.dim(), &chain).contains_dense(x))
}

#[derive(Clone, Debug)]
pub struct JordanParts {
    pub semisimple: Vec<u64>,
    pub nilpotent: Vec<u64>,
    /// Brackets of the parts vanish; can fail only through the central
    /// normalization on algebras with nonzero centre.
    pub commute: bool,
}

/// x = s + n with s semisimple, n nilpotent, [s,n] = 0, both pulled back
/// from the matrix decomposition of ad x.
pub fn jordan_decomposition(l: &LieAlgebra, x: &[u64]) -> Result<JordanParts, RestrictedError> {
    let solver = InnerSolver::new(l);
    let (s, _) = jordan_chevalley_matrix(&l.ad_matrix(x))?;
    let xs = solver.solve(&s).ok_or(RestrictedError::NotRestrictable)?;
    let f = l.field();
    let xn = f.sub_slice(x, &xs);
    let commute = f.is_zero_slice(&l.bracket_dense(&xs, &xn));
    Ok(JordanParts { semisimple: xs, nilpotent: xn, commute })
}

/// GF(p)-basis of {t ∈ A : t^{[p]} = t} for an abelian p-closed subspace
/// with RREF rows `rows` and basis p-powers `images`.
///
/// The p-map is p-semilinear on A, so over the prime field the fixed
/// points are the kernel of Φ - I where Φ acts on field coordinates.
fn toral_fixed_points(
    f: &Field,
    ambient: usize,
    rows: &[SparseVec],
    images: &[Vec<u64>],
) -> Result<Vec<Vec<u64>>, RestrictedError> {
    let d = rows.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let k = f.k();
    let ech = {
        let mut e = Echelon::new(f, ambient);
        for r in rows {
            e.insert(r);
        }
        if e.rank() != d {
            return Err(RestrictedError::CheckFailed("dependent subspace rows".into()));
        }
        e
    };
    let mut sigma: Vec<Vec<u64>> = Vec::with_capacity(d);
    for img in images {
        let c = ech
            .coordinates(&SparseVec::from_dense(f, img))
            .ok_or(RestrictedError::NotPClosed)?;
        sigma.push(c);
    }
    // Column of Φ for the prime variable (i, t): coordinates of
    // (e_t)^p · a_i^{[p]}, field coordinates read as prime entries.
    let mut cols: Vec<Vec<u64>> = Vec::with_capacity(d * k);
    for s in &sigma {
        for t in 0..k {
            let mut e_t = vec![0u64; k];
            e_t[t] = 1;
            cols.push(scale_dense(f, s, &f.frobenius_slice(&e_t)));
        }
    }
    let pf = Field::prime_field(f.p());
    let dim = d * k;
    let mrows: Vec<Vec<u64>> = (0..dim)
        .map(|r| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[r]).collect();
            row[r] = pf.sub_slice(&[row[r]], &[1])[0];
            row
        })
        .collect();
    let ns = nullspace(&Matrix::from_dense_rows(&pf, dim, &mrows));
    let mut out = Vec::with_capacity(ns.dim());
    for r in &ns.rows {
        let dv = r.to_dense(&pf, dim);
        let mut v = vec![0u64; ambient * k];
        for i in 0..d {
            let c = &dv[i * k..(i + 1) * k];
            if !f.is_zero_slice(c) {
                rows[i].axpy_into(f, c, &mut v);
            }
        }
        out.push(v);
    }
    Ok(out)
}

pub(crate) fn toral_elements_with(
    solver: &InnerSolver,
    l: &LieAlgebra,
    rows: &[SparseVec],
) -> Result<Vec<Vec<u64>>, RestrictedError> {
    let f = l.field();
    for (i, a) in rows.iter().enumerate() {
        for b in rows.iter().skip(i + 1) {
            if !l.bracket_sparse(a, b).is_zero() {
                return Err(RestrictedError::NotAbelian);
            }
        }
    }
    let n = l.dim();
    let images: Result<Vec<Vec<u64>>, RestrictedError> =
        rows.iter().map(|r| solver.p_power(l, &r.to_dense(f, n))).collect();
    toral_fixed_points(f, n, rows, &images?)
}

/// GF(p)-basis of the toral elements of an abelian p-closed subalgebra.
pub fn toral_elements(
    l: &LieAlgebra,
    a: &SubspaceBasis,
) -> Result<Vec<Vec<u64>>, RestrictedError> {
    let solver = InnerSolver::new(l);
    toral_elements_with(&solver, l, &a.rows)
}

/// Abelian subalgebra with an F-basis of toral elements.
#[derive(Clone, Debug)]
pub struct Torus {
    pub basis: Vec<Vec<u64>>,
    pub span: SubspaceBasis,
}

impl Torus {
    /// Greedily select an F-independent subset of toral generators.  Every
    /// generator must be toral at the adjoint level; element-level
    /// torality is the caller's concern on centreful algebras.
    pub fn from_toral_generators(
        l: &LieAlgebra,
        gens: &[Vec<u64>],
    ) -> Result<Torus, RestrictedError> {
        let f = l.field();
        let n = l.dim();
        let p = f.p();
        let mut ech = Echelon::new(f, n);
        let mut basis: Vec<Vec<u64>> = Vec::new();
        for g in gens {
            if !ech.insert(&SparseVec::from_dense(f, g)) {
                continue;
            }
            let ad = l.ad_matrix(g);
            if ad.pow(p) != ad {
                return Err(RestrictedError::CheckFailed("generator is not toral".into()));
            }
            basis.push(g.clone());
        }
        for (i, a) in basis.iter().enumerate() {
            for b in basis.iter().skip(i + 1) {
                if !f.is_zero_slice(&l.bracket_dense(a, b)) {
                    return Err(RestrictedError::NotAbelian);
                }
            }
        }
        let span = SubspaceBasis::from_dense_vectors(f, n, &basis);
        Ok(Torus { basis, span })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coefficients of v in the stored basis (not the RREF rows).
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        let f = &self.span.f;
        let n = self.span.ambient;
        let k = f.k();
        let d = self.basis.len();
        if d == 0 {
            return if v.iter().all(|&c| c == 0) { Some(Vec::new()) } else { None };
        }
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut row = vec![0u64; d * k];
                for (j, b) in self.basis.iter().enumerate() {
                    row[j * k..(j + 1) * k].copy_from_slice(&b[i * k..(i + 1) * k]);
                }
                row
            })
            .collect();
        solve(&Matrix::from_dense_rows(f, d, &rows), v)
    }
}

/// Span of matrices closed under commutators and p-th powers, with
/// coordinates relative to the insertion order.
pub(crate) struct MatrixSpan {
    f: Field,
    n: usize,
    ech: Echelon,
    pub(crate) basis: Vec<Matrix>,
    pub(crate) labels: Vec<String>,
}

impl MatrixSpan {
    pub(crate) fn new(f: &Field, n: usize) -> MatrixSpan {
        MatrixSpan {
            f: f.clone(),
            n,
            ech: Echelon::new(f, 2 * n * n),
            basis: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub(crate) fn insert(&mut self, label: String, m: Matrix) -> bool {
        let flat = m.flatten();
        if flat.is_zero() {
            return false;
        }
        let r = self.ech.reduce(&flat);
        if r.idx.iter().all(|&i| (i as usize) >= self.n * self.n) {
            return false;
        }
        let tag = (self.n * self.n + self.basis.len()) as u32;
        let mut idx = flat.idx.clone();
        idx.push(tag);
        let mut dat = flat.dat.clone();
        dat.extend_from_slice(&self.f.one_slice());
        self.ech.insert(&SparseVec { idx, dat });
        self.basis.push(m);
        self.labels.push(label);
        true
    }

    /// Coefficients in insertion order; None when m is outside the span.
    pub(crate) fn coords(&self, m: &Matrix) -> Option<Vec<u64>> {
        let k = self.f.k();
        let r = self.ech.reduce(&m.flatten());
        if r.idx.iter().any(|&i| (i as usize) < self.n * self.n) {
            return None;
        }
        let mut c = vec![0u64; self.basis.len() * k];
        for (pos, &i) in r.idx.iter().enumerate() {
            let j = i as usize - self.n * self.n;
            let neg = self.f.neg_slice(&r.dat[pos * k..(pos + 1) * k]);
            c[j * k..(j + 1) * k].copy_from_slice(&neg);
        }
        Some(c)
    }

    pub(crate) fn combine(&self, coords: &[u64]) -> Matrix {
        let k = self.f.k();
        let mut m = Matrix::zero(&self.f, self.n, self.n);
        for (j, b) in self.basis.iter().enumerate() {
            let c = &coords[j * k..(j + 1) * k];
            if !self.f.is_zero_slice(c) {
                m = m.add(&b.scale(c));
            }
        }
        m
    }

    /// One pass with dynamic bounds covers all new pairs and powers; the
    /// outer loop re-runs only to confirm stability.
    pub(crate) fn close(&mut self, p: u64) {
        loop {
            let before = self.basis.len();
            let mut i = 0;
            while i < self.basis.len() {
                let mi = self.basis[i].clone();
                self.insert(format!("{}^[p]", self.labels[i]), mi.pow(p));
                let mut j = 0;
                while j < i {
                    let mj = &self.basis[j];
                    let c = mi.mul(mj).sub(&mj.mul(&mi));
                    self.insert(format!("[{},{}]", self.labels[i], self.labels[j]), c);
                    j += 1;
                }
                i += 1;
            }
            if self.basis.len() == before {
                return;
            }
        }
    }
}

/// Abstract algebra on a closed matrix span.  The exact p-map (matrix
/// p-th powers in coordinates) is cached on the result only when the
/// centre is trivial, where it coincides with the solver's answer.
pub(crate) fn span_to_algebra(
    span: &MatrixSpan,
    seed: u64,
) -> Result<LieAlgebra, RestrictedError> {
    let f = &span.f;
    let k = f.k();
    let d = span.basis.len();
    let mut entries: StructureEntries = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let ma = &span.basis[a];
            let mb = &span.basis[b];
            let c = ma.mul(mb).sub(&mb.mul(ma));
            let coords = span
                .coords(&c)
                .ok_or_else(|| RestrictedError::CheckFailed("commutator left the span".into()))?;
            let terms: Vec<(usize, Vec<u64>)> = (0..d)
                .filter_map(|t| {
                    let s = coords[t * k..(t + 1) * k].to_vec();
                    if f.is_zero_slice(&s) {
                        None
                    } else {
                        Some((t, s))
                    }
                })
                .collect();
            if !terms.is_empty() {
                entries.push((a, b, terms));
            }
        }
    }
    let validation = if d <= 12 {
        Validation::Full
    } else {
        Validation::SpotCheck { seed, samples: 200 }
    };
    let alg = LieAlgebra::from_structure_constants(f, span.labels.clone(), entries, validation)?;
    let centre_dim = alg.center().dim();
    if centre_dim == 0 {
        let images: Result<Vec<Vec<u64>>, RestrictedError> = span
            .basis
            .iter()
            .map(|m| {
                span.coords(&m.pow(f.p())).ok_or_else(|| {
                    RestrictedError::CheckFailed("p-th power left the span".into())
                })
            })
            .collect();
        let _ = alg.pmap_cell().set(PMapData { images: images?, centre_dim });
    }
    Ok(alg)
}

/// p-envelope of a centreless algebra inside its adjoint representation.
pub struct PEnvelope {
    pub algebra: LieAlgebra,
    /// Faithful matrix model; entry i realizes basis vector i.
    pub matrices: Vec<Matrix>,
    /// The first `ad_dim` basis vectors are the adjoints of the original
    /// basis, so the original algebra embeds as an ideal.
    pub ad_dim: usize,
}

pub fn p_envelope(l: &LieAlgebra) -> Result<PEnvelope, RestrictedError> {
    if l.center().dim() != 0 {
        return Err(RestrictedError::NotCentreless);
    }
    let f = l.field();
    let n = l.dim();
    let mut span = MatrixSpan::new(f, n);
    for i in 0..n {
        if !span.insert(l.label(i).to_string(), l.ad_basis(i)) {
            return Err(RestrictedError::CheckFailed("ad is not faithful".into()));
        }
    }
    span.close(f.p());
    let algebra = span_to_algebra(&span, 0)?;
    Ok(PEnvelope { algebra, matrices: span.basis, ad_dim: n })
}

#[derive(Clone, Debug)]
pub struct TorusReport {
    pub torus: Torus,
    pub centralizer: SubspaceBasis,
    /// No semisimple element of the centralizer lies outside the torus:
    /// the centralizer is nilpotent and the toral part of its centre is
    /// contained in the torus.
    pub certified_maximal: bool,
    /// Best torus dimension found.
    pub mt: usize,
    /// MT is known exactly: a certified empty torus, or a registered
    /// family bound that the search attained.
    pub exact: bool,
}

pub fn maximal_torus(
    l: &LieAlgebra,
    seed: u64,
    restarts: usize,
    known_bound: Option<usize>,
) -> Result<TorusReport, RestrictedError> {
    maximal_torus_from(l, &[], seed, restarts, known_bound)
}

/// Greedy torus growth from a starting set of commuting toral elements.
///
/// Each round inspects C = centralizer(T).  If the toral part of z(C)
/// leaves T, it extends T directly.  Otherwise a nilpotent C certifies
/// maximality: semisimple elements of a nilpotent restricted algebra lie
/// in its centre.  Failing both, candidate elements of C contribute their
/// p-chains and the toral part of the enlarged abelian span.
pub fn maximal_torus_from(
    l: &LieAlgebra,
    start: &[Vec<u64>],
    seed: u64,
    restarts: usize,
    known_bound: Option<usize>,
) -> Result<TorusReport, RestrictedError> {
    let f = l.field().clone();
    let n = l.dim();
    let solver = InnerSolver::new(l);
    let mut rng = seeded_rng(seed);
    let mut toral: Vec<Vec<u64>> = Vec::new();
    let mut tspan = SubspaceBasis::zero(&f, n);
    if !start.is_empty() {
        let sspan = SubspaceBasis::from_dense_vectors(&f, n, start);
        toral = toral_elements_with(&solver, l, &sspan.rows)?;
        tspan = SubspaceBasis::from_dense_vectors(&f, n, &toral);
    }
    let mut certified = false;
    for _round in 0..=n + 1 {
        let c = l.centralizer(&tspan);
        let cc = l.induced_algebra(&c)?;
        let zl = lift_rows(&f, n, &c, &cc.center());
        let ztoral = toral_elements_with(&solver, l, &zl.rows)?;
        let zspan = SubspaceBasis::from_dense_vectors(&f, n, &ztoral);
        if !tspan.contains_subspace(&zspan) {
            toral.extend(ztoral);
            tspan = tspan.sum(&zspan);
            continue;
        }
        if cc.is_nilpotent_algebra() {
            certified = true;
            break;
        }
        let mut candidates: Vec<Vec<u64>> = c.rows.iter().map(|r| r.to_dense(&f, n)).collect();
        for _ in 0..restarts {
            let mut v = vec![0u64; n * f.k()];
            for r in &c.rows {
                r.axpy_into(&f, &f.random_slice(&mut rng), &mut v);
            }
            candidates.push(v);
        }
        let mut improved = false;
        for x in candidates {
            if x.iter().all(|&c| c == 0) || tspan.contains_dense(&x) {
                continue;
            }
            let chain = p_chain(&solver, l, &x)?;
            let a = tspan.sum(&SubspaceBasis::from_dense_vectors(&f, n, &chain));
            let t2 = match toral_elements_with(&solver, l, &a.rows) {
                Ok(t) => t,
                Err(RestrictedError::NotAbelian | RestrictedError::NotPClosed) => continue,
                Err(e) => return Err(e),
            };
            let t2span = SubspaceBasis::from_dense_vectors(&f, n, &t2);
            if t2span.dim() > tspan.dim() {
                toral = t2;
                tspan = t2span;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }
    let torus = Torus::from_toral_generators(l, &toral)?;
    let mt = torus.dim();
    let centralizer = l.centralizer(&torus.span);
    let exact = (certified && mt == 0) || known_bound == Some(mt);
    Ok(TorusReport { torus, centralizer, certified_maximal: certified, mt, exact })
}

pub struct ToralRankReport {
    pub rank: usize,
    pub exact: bool,
    pub envelope: PEnvelope,
    pub torus: TorusReport,
}

/// TR via a maximal torus of the p-envelope; the envelope of a centreless
/// algebra is itself centreless, so no quotient is needed.
pub fn absolute_toral_rank(
    l: &LieAlgebra,
    seed: u64,
    restarts: usize,
    known_bound: Option<usize>,
) -> Result<ToralRankReport, RestrictedError> {
    let envelope = p_envelope(l)?;
    let torus = maximal_torus(&envelope.algebra, seed, restarts, known_bound)?;
    Ok(ToralRankReport { rank: torus.mt, exact: torus.exact, envelope, torus })
}

/// Toral part of the p-closure of ad H for a nilpotent subalgebra H.
pub struct ToralPart {
    pub algebra: LieAlgebra,
    pub matrices: Vec<Matrix>,
    /// GF(p)-generators in envelope coordinates.
    pub toral_basis: Vec<Vec<u64>>,
}

pub fn cartan_toral_part(l: &LieAlgebra, h: &SubspaceBasis) -> Result<ToralPart, RestrictedError> {
    let hi = l.induced_algebra(h)?;
    if !hi.is_nilpotent_algebra() {
        return Err(RestrictedError::CheckFailed("subalgebra is not nilpotent".into()));
    }
    let f = l.field();
    let n = l.dim();
    let mut span = MatrixSpan::new(f, n);
    for (i, r) in h.rows.iter().enumerate() {
        span.insert(format!("ad h{i}"), l.ad_matrix(&r.to_dense(f, n)));
    }
    span.close(f.p());
    let algebra = span_to_algebra(&span, 0)?;
    // Semisimple elements of the nilpotent envelope live in its centre,
    // where matrix p-th powers give the p-map exactly.
    let zc = algebra.center();
    let d = span.basis.len();
    let mut images = Vec::with_capacity(zc.dim());
    for r in &zc.rows {
        let m = span.combine(&r.to_dense(f, d));
        let c = span
            .coords(&m.pow(f.p()))
            .ok_or_else(|| RestrictedError::CheckFailed("p-th power left the span".into()))?;
        images.push(c);
    }
    let toral_basis = toral_fixed_points(f, d, &zc.rows, &images)?;
    Ok(ToralPart { algebra, matrices: span.basis, toral_basis })
}

/// Same structure constants over a larger field from the same tower.
pub fn scalar_extension(
    tower: &FieldTower,
    l: &LieAlgebra,
    target: &Field,
) -> Result<LieAlgebra, RestrictedError> {
    let f = l.field();
    let n = l.dim();
    let k = f.k();
    let mut entries: StructureEntries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let row = l.bracket_basis(i, j);
            let mut terms = Vec::with_capacity(row.nnz());
            for (pos, &t) in row.idx.iter().enumerate() {
                let c = f.element(row.dat[pos * k..(pos + 1) * k].to_vec());
                terms.push((t as usize, tower.embed(&c, target)?.coords().to_vec()));
            }
            if !terms.is_empty() {
                entries.push((i, j, terms));
            }
        }
    }
    let labels = l.labels().to_vec();
    let validation = Validation::SpotCheck { seed: 11, samples: 200 };
    Ok(LieAlgebra::from_structure_constants(target, labels, entries, validation)?)
}

/// Coordinate vector over `target` for an element given over l's field.
pub(crate) fn embed_dense(
    tower: &FieldTower,
    f: &Field,
    target: &Field,
    v: &[u64],
) -> Result<Vec<u64>, GfError> {
    let k = f.k();
    let k2 = target.k();
    let n = v.len() / k;
    let mut out = vec![0u64; n * k2];
    for i in 0..n {
        let c = f.element(v[i * k..(i + 1) * k].to_vec());
        let e = tower.embed(&c, target)?;
        out[i * k2..(i + 1) * k2].copy_from_slice(e.coords());
    }
    Ok(out)
}

/// Rows of a subspace of the induced algebra on `c`, expressed in the
/// ambient coordinates.
pub(crate) fn lift_rows(
    f: &Field,
    ambient: usize,
    c: &SubspaceBasis,
    sub: &SubspaceBasis,
) -> SubspaceBasis {
    let k = f.k();
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(sub.dim());
    for r in &sub.rows {
        let mut v = vec![0u64; ambient * k];
        for (pos, &j) in r.idx.iter().enumerate() {
            c.rows[j as usize].axpy_into(f, &r.dat[pos * k..(pos + 1) * k], &mut v);
        }
        rows.push(v);
    }
    SubspaceBasis::from_dense_vectors(f, ambient, &rows)
}

/// Per-slice scaling of a dense coordinate vector by a field element.
pub(crate) fn scale_dense(f: &Field, v: &[u64], c: &[u64]) -> Vec<u64> {
    let k = f.k();
    let mut out = vec![0u64; v.len()];
    for (o, s) in out.chunks_mut(k).zip(v.chunks(k)) {
        f.mul_add_assign(o, s, c);
    }
    out
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::dpalg::binom_mod_p;
    use crate::gf::{Field, FieldTower};
    use crate::liealg::{witt_w11_table, LieAlgebra, StructureEntries, Validation};

    pub(crate) fn gf(p: u64) -> Field {
        FieldTower::new(1).field(p, 1).unwrap()
    }

    pub(crate) fn witt(f: &Field) -> LieAlgebra {
        witt_w11_table(f).unwrap()
    }

    pub(crate) fn sl2(f: &Field) -> LieAlgebra {
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

    pub(crate) fn heisenberg(f: &Field) -> LieAlgebra {
        // [x, y] = z, z central.
        LieAlgebra::from_structure_constants(
            f,
            vec!["x".into(), "y".into(), "z".into()],
            vec![(0, 1, vec![(2, vec![1])])],
            Validation::Full,
        )
        .unwrap()
    }

    /// [t, u] = u with a central direction v alongside.
    pub(crate) fn solvable3(f: &Field) -> LieAlgebra {
        LieAlgebra::from_structure_constants(
            f,
            vec!["t".into(), "u".into(), "v".into()],
            vec![(0, 1, vec![(1, vec![1])])],
            Validation::Full,
        )
        .unwrap()
    }

    /// W(1;(2)) over GF(5): basis x^(a)d for a < 25 with
    /// [x^(a)d, x^(b)d] = (C(a+b-1,a) - C(a+b-1,b)) x^(a+b-1)d.
    pub(crate) fn w12(f: &Field) -> LieAlgebra {
        assert!(f.p() == 5 && f.k() == 1);
        let mut entries: StructureEntries = Vec::new();
        for a in 0..25u64 {
            for b in a + 1..25 {
                let t = a + b - 1;
                if t >= 25 {
                    continue;
                }
                let c = (binom_mod_p(t, a, 5) + 5 - binom_mod_p(t, b, 5)) % 5;
                if c != 0 {
                    entries.push((a as usize, b as usize, vec![(t as usize, vec![c])]));
                }
            }
        }
        let labels = (0..25).map(|a| format!("D{a}")).collect();
        LieAlgebra::from_structure_constants(f, labels, entries, Validation::Full).unwrap()
    }

    pub(crate) fn unit(f: &Field, n: usize, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; n * f.k()];
        v[i * f.k()] = 1;
        v
    }

    pub(crate) fn elt(f: &Field, n: usize, terms: &[(usize, i64)]) -> Vec<u64> {
        let k = f.k();
        let mut v = vec![0u64; n * k];
        for &(i, c) in terms {
            let cv = f.from_int(c);
            let s = f.add_slice(&v[i * k..(i + 1) * k], &cv);
            v[i * k..(i + 1) * k].copy_from_slice(&s);
        }
        v
    }
}
