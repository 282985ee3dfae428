//! Exact linear algebra over a [`Field`].
//!
//! Vectors store field elements as flat coordinate words with stride
//! `field.k()`.  Matrices keep sparse rows; reduction kernels accumulate
//! into dense rows whenever the fill ratio crosses
//! [`DENSE_FILL_THRESHOLD`], which is the profitable regime for the small
//! ambient dimensions used here.
//!
//! Submodules supply simultaneous eigenspace decompositions for commuting
//! toral operators ([`eigen`]), an exact module irreducibility test
//! ([`meataxe`]) and the Jordan–Chevalley decomposition of a square matrix
//! ([`jordan`]).

pub mod eigen;
pub mod jordan;
pub mod meataxe;

use crate::gf::Field;
use thiserror::Error;

/// Row operations switch to dense accumulation above this fill ratio.
pub const DENSE_FILL_THRESHOLD: f64 = 0.20;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("operators do not commute (indices {0} and {1})")]
    NotCommuting(usize, usize),
    #[error("operator {0} is not toral: M^p != M")]
    NotToral(usize),
    #[error("operands belong to different fields")]
    FieldMismatch,
}

/// Sparse vector: strictly increasing indices, nonzero coefficients stored
/// flat with stride `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseVec {
    pub idx: Vec<u32>,
    pub dat: Vec<u64>,
}

impl SparseVec {
    pub fn empty() -> Self {
        SparseVec { idx: Vec::new(), dat: Vec::new() }
    }

    pub fn nnz(&self) -> usize {
        self.idx.len()
    }

    pub fn is_zero(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn unit(f: &Field, i: usize) -> Self {
        SparseVec { idx: vec![i as u32], dat: f.one_slice() }
    }

    pub fn from_dense(f: &Field, v: &[u64]) -> Self {
        let k = f.k();
        let n = v.len() / k;
        let mut idx = Vec::new();
        let mut dat = Vec::new();
        for i in 0..n {
            let c = &v[i * k..(i + 1) * k];
            if !f.is_zero_slice(c) {
                idx.push(i as u32);
                dat.extend_from_slice(c);
            }
        }
        SparseVec { idx, dat }
    }

    pub fn to_dense(&self, f: &Field, n: usize) -> Vec<u64> {
        let k = f.k();
        let mut v = vec![0; n * k];
        for (pos, &i) in self.idx.iter().enumerate() {
            v[i as usize * k..(i as usize + 1) * k].copy_from_slice(&self.dat[pos * k..(pos + 1) * k]);
        }
        v
    }

    pub fn coeff<'a>(&'a self, f: &Field, i: usize) -> Option<&'a [u64]> {
        let k = f.k();
        self.idx.binary_search(&(i as u32)).ok().map(|pos| &self.dat[pos * k..(pos + 1) * k])
    }

    /// dst += c * self, with dst dense flat.
    pub fn axpy_into(&self, f: &Field, c: &[u64], dst: &mut [u64]) {
        let k = f.k();
        if k == 1 {
            let p = f.p();
            let c0 = c[0];
            if c0 == 0 {
                return;
            }
            for (pos, &i) in self.idx.iter().enumerate() {
                let t = &mut dst[i as usize];
                *t = (*t + crate::gf::poly::mulmod_u64(self.dat[pos], c0, p)) % p;
            }
        } else {
            for (pos, &i) in self.idx.iter().enumerate() {
                let prod = f.mul_slice(&self.dat[pos * k..(pos + 1) * k], c);
                f.add_assign_slice(&mut dst[i as usize * k..(i as usize + 1) * k], &prod);
            }
        }
    }

    pub fn scale(&self, f: &Field, c: &[u64]) -> SparseVec {
        let k = f.k();
        let mut out = SparseVec { idx: Vec::new(), dat: Vec::new() };
        for (pos, &i) in self.idx.iter().enumerate() {
            let prod = f.mul_slice(&self.dat[pos * k..(pos + 1) * k], c);
            if !f.is_zero_slice(&prod) {
                out.idx.push(i);
                out.dat.extend_from_slice(&prod);
            }
        }
        out
    }

    pub fn add(&self, f: &Field, other: &SparseVec) -> SparseVec {
        let k = f.k();
        let mut out = SparseVec { idx: Vec::new(), dat: Vec::new() };
        let (mut a, mut b) = (0usize, 0usize);
        while a < self.idx.len() || b < other.idx.len() {
            let ia = self.idx.get(a).copied().unwrap_or(u32::MAX);
            let ib = other.idx.get(b).copied().unwrap_or(u32::MAX);
            if ia < ib {
                out.idx.push(ia);
                out.dat.extend_from_slice(&self.dat[a * k..(a + 1) * k]);
                a += 1;
            } else if ib < ia {
                out.idx.push(ib);
                out.dat.extend_from_slice(&other.dat[b * k..(b + 1) * k]);
                b += 1;
            } else {
                let s = f.add_slice(&self.dat[a * k..(a + 1) * k], &other.dat[b * k..(b + 1) * k]);
                if !f.is_zero_slice(&s) {
                    out.idx.push(ia);
                    out.dat.extend_from_slice(&s);
                }
                a += 1;
                b += 1;
            }
        }
        out
    }
}

/// Sparse-row matrix acting on column vectors: y_i = sum_j M[i][j] x_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub f: Field,
    pub rows: usize,
    pub cols: usize,
    pub rs: Vec<SparseVec>,
}

impl Matrix {
    pub fn zero(f: &Field, rows: usize, cols: usize) -> Self {
        Matrix { f: f.clone(), rows, cols, rs: vec![SparseVec::empty(); rows] }
    }

    pub fn identity(f: &Field, n: usize) -> Self {
        let rs = (0..n).map(|i| SparseVec::unit(f, i)).collect();
        Matrix { f: f.clone(), rows: n, cols: n, rs }
    }

    pub fn from_sparse_rows(f: &Field, cols: usize, rs: Vec<SparseVec>) -> Self {
        Matrix { f: f.clone(), rows: rs.len(), cols, rs }
    }

    pub fn from_dense_rows(f: &Field, cols: usize, rows: &[Vec<u64>]) -> Self {
        let rs = rows.iter().map(|r| SparseVec::from_dense(f, r)).collect();
        Matrix { f: f.clone(), rows: rows.len(), cols, rs }
    }

    pub fn nnz(&self) -> usize {
        self.rs.iter().map(|r| r.nnz()).sum()
    }

    pub fn fill_ratio(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.rows as f64 * self.cols as f64)
    }

    pub fn is_zero(&self) -> bool {
        self.rs.iter().all(|r| r.is_zero())
    }

    pub fn entry<'a>(&'a self, i: usize, j: usize) -> Option<&'a [u64]> {
        self.rs[i].coeff(&self.f, j)
    }

    pub fn set_entry(&mut self, i: usize, j: usize, c: &[u64]) {
        let f = self.f.clone();
        let k = f.k();
        let row = &mut self.rs[i];
        match row.idx.binary_search(&(j as u32)) {
            Ok(pos) => {
                if f.is_zero_slice(c) {
                    row.idx.remove(pos);
                    row.dat.drain(pos * k..(pos + 1) * k);
                } else {
                    row.dat[pos * k..(pos + 1) * k].copy_from_slice(c);
                }
            }
            Err(pos) => {
                if !f.is_zero_slice(c) {
                    row.idx.insert(pos, j as u32);
                    for (o, &w) in c.iter().enumerate() {
                        row.dat.insert(pos * k + o, w);
                    }
                }
            }
        }
    }

    /// Matrix times dense column vector.
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        let f = &self.f;
        let k = f.k();
        assert_eq!(x.len(), self.cols * k, "vector length mismatch");
        let mut y = vec![0; self.rows * k];
        for (i, row) in self.rs.iter().enumerate() {
            let mut acc = f.zero_slice();
            for (pos, &j) in row.idx.iter().enumerate() {
                let prod = f.mul_slice(&row.dat[pos * k..(pos + 1) * k], &x[j as usize * k..(j as usize + 1) * k]);
                f.add_assign_slice(&mut acc, &prod);
            }
            y[i * k..(i + 1) * k].copy_from_slice(&acc);
        }
        y
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let f = &self.f;
        let k = f.k();
        let mut rs = Vec::with_capacity(self.rows);
        let mut acc = vec![0u64; other.cols * k];
        for row in &self.rs {
            acc.iter_mut().for_each(|w| *w = 0);
            for (pos, &j) in row.idx.iter().enumerate() {
                other.rs[j as usize].axpy_into(f, &row.dat[pos * k..(pos + 1) * k], &mut acc);
            }
            rs.push(SparseVec::from_dense(f, &acc));
        }
        Matrix { f: f.clone(), rows: self.rows, cols: other.cols, rs }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let rs = self.rs.iter().zip(&other.rs).map(|(a, b)| a.add(&self.f, b)).collect();
        Matrix { f: self.f.clone(), rows: self.rows, cols: self.cols, rs }
    }

    pub fn scale(&self, c: &[u64]) -> Matrix {
        let rs = self.rs.iter().map(|r| r.scale(&self.f, c)).collect();
        Matrix { f: self.f.clone(), rows: self.rows, cols: self.cols, rs }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let minus_one = self.f.from_int(-1);
        self.add(&other.scale(&minus_one))
    }

    /// self - c * identity.
    pub fn sub_scalar(&self, c: &[u64]) -> Matrix {
        let f = &self.f;
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let cur = out.entry(i, i).map(|s| s.to_vec()).unwrap_or_else(|| f.zero_slice());
            let nv = f.sub_slice(&cur, c);
            out.set_entry(i, i, &nv);
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let f = &self.f;
        let k = f.k();
        let mut cols_idx: Vec<Vec<u32>> = vec![Vec::new(); self.cols];
        let mut cols_dat: Vec<Vec<u64>> = vec![Vec::new(); self.cols];
        for (i, row) in self.rs.iter().enumerate() {
            for (pos, &j) in row.idx.iter().enumerate() {
                cols_idx[j as usize].push(i as u32);
                cols_dat[j as usize].extend_from_slice(&row.dat[pos * k..(pos + 1) * k]);
            }
        }
        let rs = cols_idx
            .into_iter()
            .zip(cols_dat)
            .map(|(idx, dat)| SparseVec { idx, dat })
            .collect();
        Matrix { f: f.clone(), rows: self.cols, cols: self.rows, rs }
    }

    pub fn pow(&self, e: u64) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = Matrix::identity(&self.f, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Flatten row-major into a single sparse vector of length rows*cols.
    pub fn flatten(&self) -> SparseVec {
        let k = self.f.k();
        let mut idx = Vec::new();
        let mut dat = Vec::new();
        for (i, row) in self.rs.iter().enumerate() {
            for (pos, &j) in row.idx.iter().enumerate() {
                idx.push((i * self.cols + j as usize) as u32);
                dat.extend_from_slice(&row.dat[pos * k..(pos + 1) * k]);
            }
        }
        SparseVec { idx, dat }
    }

    pub fn trace(&self) -> Vec<u64> {
        let f = &self.f;
        let mut acc = f.zero_slice();
        for i in 0..self.rows.min(self.cols) {
            if let Some(c) = self.entry(i, i) {
                acc = f.add_slice(&acc, c);
            }
        }
        acc
    }
}

/// Incremental reduced row echelon structure over sparse rows.
///
/// Rows are kept fully reduced against each other; pivot columns are
/// normalised to 1.  Dense accumulation is used per insertion when the
/// incoming row is dense relative to [`DENSE_FILL_THRESHOLD`].
#[derive(Clone, Debug)]
pub struct Echelon {
    pub f: Field,
    pub cols: usize,
    /// Rows sorted by pivot column.
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<u32>,
}

impl Echelon {
    pub fn new(f: &Field, cols: usize) -> Self {
        Echelon { f: f.clone(), cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Fully reduce `v` against the stored rows.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let f = &self.f;
        let k = f.k();
        if self.rows.is_empty() || v.is_zero() {
            return v.clone();
        }
        let use_dense = v.nnz() as f64 / self.cols as f64 > DENSE_FILL_THRESHOLD
            || self.rows.len() as f64 / self.cols as f64 > DENSE_FILL_THRESHOLD;
        if use_dense {
            let mut dense = v.to_dense(f, self.cols);
            for (r, &pc) in self.rows.iter().zip(&self.pivots) {
                let c = dense[pc as usize * k..(pc as usize + 1) * k].to_vec();
                if !f.is_zero_slice(&c) {
                    let nc = f.neg_slice(&c);
                    r.axpy_into(f, &nc, &mut dense);
                }
            }
            SparseVec::from_dense(f, &dense)
        } else {
            let mut cur = v.clone();
            loop {
                let mut hit = None;
                for (pos, &i) in cur.idx.iter().enumerate() {
                    if let Ok(rix) = self.pivots.binary_search(&i) {
                        hit = Some((pos, rix));
                        break;
                    }
                }
                let Some((pos, rix)) = hit else { break };
                let c = cur.dat[pos * k..(pos + 1) * k].to_vec();
                let nc = f.neg_slice(&c);
                cur = cur.add(f, &self.rows[rix].scale(f, &nc));
            }
            cur
        }
    }

    /// Reduce and insert; returns true if the rank grew.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let f = self.f.clone();
        let k = f.k();
        let red = self.reduce(v);
        if red.is_zero() {
            return false;
        }
        let pc = red.idx[0];
        let lead = red.dat[0..k].to_vec();
        let inv = f.inv_slice(&lead).expect("leading coefficient nonzero");
        let norm = red.scale(&f, &inv);
        // Back-substitute into existing rows to keep the form reduced.
        for r in self.rows.iter_mut() {
            if let Some(c) = r.coeff(&f, pc as usize) {
                let c = c.to_vec();
                let nc = f.neg_slice(&c);
                *r = r.add(&f, &norm.scale(&f, &nc));
            }
        }
        let at = self.pivots.binary_search(&pc).unwrap_err();
        self.pivots.insert(at, pc);
        self.rows.insert(at, norm);
        true
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<u64>> {
        let f = &self.f;
        let k = f.k();
        let mut coords = vec![0u64; self.rows.len() * k];
        let mut cur = v.clone();
        // Because rows are reduced, the coefficient of row r is the entry
        // of the running vector at r's pivot column.
        for (rix, (r, &pc)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if let Some(c) = cur.coeff(f, pc as usize) {
                let c = c.to_vec();
                coords[rix * k..(rix + 1) * k].copy_from_slice(&c);
                let nc = f.neg_slice(&c);
                cur = cur.add(f, &r.scale(f, &nc));
            }
        }
        if cur.is_zero() {
            Some(coords)
        } else {
            None
        }
    }
}

/// Row space in reduced echelon form; the standard exchangeable
/// representation of a subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    pub f: Field,
    pub ambient: usize,
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<u32>,
}

impl SubspaceBasis {
    pub fn zero(f: &Field, ambient: usize) -> Self {
        SubspaceBasis { f: f.clone(), ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn whole(f: &Field, ambient: usize) -> Self {
        let rows = (0..ambient).map(|i| SparseVec::unit(f, i)).collect();
        SubspaceBasis { f: f.clone(), ambient, rows, pivots: (0..ambient as u32).collect() }
    }

    pub fn from_echelon(e: Echelon) -> Self {
        SubspaceBasis { f: e.f, ambient: e.cols, rows: e.rows, pivots: e.pivots }
    }

    pub fn from_vectors(f: &Field, ambient: usize, vs: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut e = Echelon::new(f, ambient);
        for v in vs {
            e.insert(&v);
        }
        Self::from_echelon(e)
    }

    pub fn from_dense_vectors(f: &Field, ambient: usize, vs: &[Vec<u64>]) -> Self {
        Self::from_vectors(f, ambient, vs.iter().map(|v| SparseVec::from_dense(f, v)))
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn to_echelon(&self) -> Echelon {
        Echelon { f: self.f.clone(), cols: self.ambient, rows: self.rows.clone(), pivots: self.pivots.clone() }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.to_echelon().contains(v)
    }

    pub fn contains_dense(&self, v: &[u64]) -> bool {
        self.contains(&SparseVec::from_dense(&self.f, v))
    }

    pub fn contains_subspace(&self, other: &SubspaceBasis) -> bool {
        let e = self.to_echelon();
        other.rows.iter().all(|r| e.contains(r))
    }

    pub fn equals(&self, other: &SubspaceBasis) -> bool {
        // Reduced echelon form is canonical.
        self.pivots == other.pivots && self.rows == other.rows
    }

    pub fn sum(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.ambient, other.ambient);
        let mut e = self.to_echelon();
        for r in &other.rows {
            e.insert(r);
        }
        Self::from_echelon(e)
    }

    /// Intersection by the Zassenhaus block trick.
    pub fn intersect(&self, other: &SubspaceBasis) -> SubspaceBasis {
        assert_eq!(self.ambient, other.ambient);
        let f = &self.f;
        let n = self.ambient;
        let k = f.k();
        let mut e = Echelon::new(f, 2 * n);
        // Rows [u | u] for u in self, then [w | 0] for w in other; after
        // echelon, rows with zero left half carry intersection vectors in
        // the right half.
        for u in &self.rows {
            let mut idx = u.idx.clone();
            let mut dat = u.dat.clone();
            for &i in &u.idx {
                idx.push(i + n as u32);
            }
            dat.extend_from_slice(&u.dat);
            e.insert(&SparseVec { idx, dat });
        }
        for w in &other.rows {
            e.insert(w);
        }
        let mut out = Echelon::new(f, n);
        for (row, &pc) in e.rows.iter().zip(&e.pivots) {
            if (pc as usize) < n {
                continue;
            }
            // Entirely in the right half: shift back.
            let idx: Vec<u32> = row.idx.iter().map(|&i| i - n as u32).collect();
            out.insert(&SparseVec { idx, dat: row.dat.clone() });
        }
        let _ = k;
        Self::from_echelon(out)
    }

    /// Pivot-free coordinates: a complement of this subspace spanned by
    /// the non-pivot unit vectors.
    pub fn complement_units(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut pi = 0;
        for c in 0..self.ambient {
            if pi < self.pivots.len() && self.pivots[pi] as usize == c {
                pi += 1;
            } else {
                out.push(c);
            }
        }
        out
    }
}

/// Reduced row echelon form of the rows of `m`, with pivot bookkeeping.
pub fn row_echelon(m: &Matrix) -> Echelon {
    let mut e = Echelon::new(&m.f, m.cols);
    for r in &m.rs {
        e.insert(r);
    }
    e
}

pub fn rank(m: &Matrix) -> usize {
    row_echelon(m).rank()
}

/// Basis of the right nullspace {x : Mx = 0}.
pub fn nullspace(m: &Matrix) -> SubspaceBasis {
    let f = &m.f;
    let k = f.k();
    let e = row_echelon(m);
    let mut basis = Vec::new();
    let pivset: Vec<u32> = e.pivots.clone();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivset {
        is_pivot[p as usize] = true;
    }
    for free in 0..m.cols {
        if is_pivot[free] {
            continue;
        }
        // x_free = 1; x_pivot determined by the reduced rows.
        let mut v = vec![0u64; m.cols * k];
        v[free * k] = 1;
        for (row, &pc) in e.rows.iter().zip(&pivset) {
            if let Some(c) = row.coeff(f, free) {
                let nc = f.neg_slice(c);
                v[pc as usize * k..(pc as usize + 1) * k].copy_from_slice(&nc);
            }
        }
        basis.push(SparseVec::from_dense(f, &v));
    }
    SubspaceBasis::from_vectors(f, m.cols, basis)
}

/// One solution of Mx = b with free variables set to zero, or None when
/// the system is inconsistent (a signal, not a fault).
pub fn solve(m: &Matrix, b: &[u64]) -> Option<Vec<u64>> {
    let f = &m.f;
    let k = f.k();
    assert_eq!(b.len(), m.rows * k, "right hand side length mismatch");
    let mut e = Echelon::new(&m.f, m.cols + 1);
    for (i, r) in m.rs.iter().enumerate() {
        let mut idx = r.idx.clone();
        let mut dat = r.dat.clone();
        let bi = &b[i * k..(i + 1) * k];
        if !f.is_zero_slice(bi) {
            idx.push(m.cols as u32);
            dat.extend_from_slice(bi);
        }
        e.insert(&SparseVec { idx, dat });
    }
    // Inconsistent iff some row pivots in the augmented column.
    if e.pivots.binary_search(&(m.cols as u32)).is_ok() {
        return None;
    }
    let mut x = vec![0u64; m.cols * k];
    for (row, &pc) in e.rows.iter().zip(&e.pivots) {
        if let Some(c) = row.coeff(f, m.cols) {
            // Row reads x_pc + sum(free terms) = c; free variables zero.
            x[pc as usize * k..(pc as usize + 1) * k].copy_from_slice(c);
        }
    }
    Some(x)
}

/// Minimal polynomial of a square matrix, as the lcm of the minimal
/// polynomials of all standard basis vectors.
pub fn min_poly(m: &Matrix) -> crate::gf::poly::Poly {
    use crate::gf::poly::Poly;
    assert_eq!(m.rows, m.cols);
    let f = &m.f;
    let n = m.rows;
    let k = f.k();
    let mut mu = Poly::one(f);
    // Seeds inside the span of earlier Krylov chains contribute nothing
    // to the lcm and are skipped.
    let mut seen = Echelon::new(f, n);
    for s in 0..n {
        let unit = SparseVec { idx: vec![s as u32], dat: f.one_slice() };
        if seen.reduce(&unit).idx.is_empty() {
            continue;
        }
        // Krylov chain from e_s with coefficient tracking.
        let mut e = Echelon::new(f, n + n + 1);
        let mut v = vec![0u64; n * k];
        v[s * k] = 1;
        let mut step = 0usize;
        loop {
            let mut aug = SparseVec::from_dense(f, &v);
            aug.idx.push((n + step) as u32);
            aug.dat.extend_from_slice(&f.one_slice());
            let red = e.reduce(&aug);
            let main_zero = red.idx.first().map_or(true, |&i| i as usize >= n);
            if main_zero {
                // Dependency: augmented part encodes the monic relation.
                let mut coeffs = vec![0u64; (step + 1) * k];
                for (pos, &i) in red.idx.iter().enumerate() {
                    let deg = i as usize - n;
                    coeffs[deg * k..(deg + 1) * k].copy_from_slice(&red.dat[pos * k..(pos + 1) * k]);
                }
                let pv = Poly::from_coeffs(f, &coeffs);
                let g = mu.gcd(&pv);
                mu = mu.mul(&pv.divrem(&g).0);
                break;
            }
            e.insert(&aug);
            seen.insert(&SparseVec::from_dense(f, &v));
            v = m.apply(&v);
            step += 1;
        }
        if mu.degree().unwrap_or(0) == n {
            break;
        }
    }
    mu.make_monic()
}

/// Evaluate a polynomial at a matrix by Horner's rule.
pub fn poly_at_matrix(p: &crate::gf::poly::Poly, m: &Matrix) -> Matrix {
    assert_eq!(m.rows, m.cols);
    let f = &m.f;
    let n = m.rows;
    let d = match p.degree() {
        None => return Matrix::zero(f, n, n),
        Some(d) => d,
    };
    let mut acc = Matrix::identity(f, n).scale(p.coeff(d));
    for i in (0..d).rev() {
        acc = acc.mul(m);
        let c = p.coeff(i).to_vec();
        let term = Matrix::identity(f, n).scale(&c);
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::poly::seeded_rng;
    use crate::gf::FieldTower;
    use rand::Rng;

    fn gf5() -> Field {
        FieldTower::new(1).field(5, 1).unwrap()
    }

    fn random_matrix(f: &Field, rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = seeded_rng(seed);
        let mut m = Matrix::zero(f, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let c = vec![rng.gen_range(0..f.p())];
                m.set_entry(i, j, &c);
            }
        }
        m
    }

    fn gf7() -> Field {
        FieldTower::new(1).field(7, 1).unwrap()
    }

    #[test]
    fn nullspace_trivial_cases() {
        let f = gf5();
        assert_eq!(nullspace(&Matrix::identity(&f, 3)).dim(), 0);
        let z = Matrix::zero(&f, 2, 3);
        let ns = nullspace(&z);
        assert_eq!(ns.dim(), 3);
        assert!(ns.equals(&SubspaceBasis::whole(&f, 3)));
    }

    #[test]
    fn nullspace_of_known_rank_product() {
        let f = gf7();
        // M = A * B with A 10x7, B 7x10, both full rank 7, so rank M = 7
        // and the nullspace has dimension 3.
        let mut a = random_matrix(&f, 10, 7, 11);
        let b = random_matrix(&f, 7, 10, 12);
        // Ensure full rank by bumping diagonals until rank is 7.
        let mut bump = 0u64;
        while rank(&a) < 7 {
            bump += 1;
            for i in 0..7 {
                a.set_entry(i, i, &[bump % 7]);
            }
        }
        assert_eq!(rank(&b), 7);
        let m = a.mul(&b);
        assert_eq!(rank(&m), 7);
        let ns = nullspace(&m);
        assert_eq!(ns.dim(), 3);
        for r in &ns.rows {
            let x = r.to_dense(&f, 10);
            let y = m.apply(&x);
            assert!(y.iter().all(|&w| w == 0));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let f = gf7();
        let p = f.p();
        let m = random_matrix(&f, 6, 4, 21);
        // Identity system and zero right-hand side first.
        let id = Matrix::identity(&f, 4);
        let b0 = vec![3, 1, 4, 1];
        assert_eq!(solve(&id, &b0).unwrap(), b0);
        assert_eq!(solve(&m, &vec![0; 6]).unwrap(), vec![0; 4]);
        let mut rng = seeded_rng(22);
        let x0: Vec<u64> = (0..4).map(|_| rng.gen_range(0..p)).collect();
        let b = m.apply(&x0);
        let x = solve(&m, &b).expect("constructed system is consistent");
        assert_eq!(m.apply(&x), b);
        // Perturb b outside the column space if possible.
        let e = row_echelon(&m.transpose());
        if e.rank() < 6 {
            let col_space = SubspaceBasis::from_echelon(e);
            let mut bad = b.clone();
            // Find a vector not in the column space by trying unit bumps.
            for i in 0..6 {
                let mut cand = bad.clone();
                cand[i] = (cand[i] + 1) % p;
                if !col_space.contains_dense(&cand) {
                    bad = cand;
                    break;
                }
            }
            if !col_space.contains_dense(&bad) {
                assert!(solve(&m, &bad).is_none());
            }
        }
    }

    #[test]
    fn echelon_membership_and_coordinates() {
        let f = gf5();
        let v1 = SparseVec::from_dense(&f, &[1, 2, 0, 3]);
        let v2 = SparseVec::from_dense(&f, &[0, 1, 1, 1]);
        let mut e = Echelon::new(&f, 4);
        e.insert(&v1);
        e.insert(&v2);
        // 2*v1 + 3*v2.
        let w = v1.scale(&f, &[2]).add(&f, &v2.scale(&f, &[3]));
        assert!(e.contains(&w));
        let coords = e.coordinates(&w).unwrap();
        // Coordinates are with respect to the reduced rows, so check by
        // reconstruction.
        let mut acc = vec![0u64; 4];
        for (i, r) in e.rows.iter().enumerate() {
            r.axpy_into(&f, &coords[i..i + 1], &mut acc);
        }
        assert_eq!(SparseVec::from_dense(&f, &acc), w);
        assert!(!e.contains(&SparseVec::from_dense(&f, &[0, 0, 1, 0])));
    }

    #[test]
    fn intersection_matches_bruteforce() {
        let f = gf5();
        // Subspaces of GF(5)^4; brute force over all 625 vectors.
        let u = SubspaceBasis::from_dense_vectors(&f, 4, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        let w = SubspaceBasis::from_dense_vectors(&f, 4, &[vec![1, 1, 1, 1], vec![0, 0, 1, 0]]);
        let inter = u.intersect(&w);
        let mut expected = Vec::new();
        for a in 0..5u64 {
            for b in 0..5u64 {
                for c in 0..5u64 {
                    for d in 0..5u64 {
                        let v = vec![a, b, c, d];
                        if u.contains_dense(&v) && w.contains_dense(&v) {
                            expected.push(v);
                        }
                    }
                }
            }
        }
        let brute = SubspaceBasis::from_dense_vectors(&f, 4, &expected);
        assert!(inter.equals(&brute));
    }

    #[test]
    fn min_poly_of_diagonalisable_and_nilpotent() {
        let f = gf5();
        // Diagonal (1,1,2): minimal polynomial (T-1)(T-2).
        let mut d = Matrix::zero(&f, 3, 3);
        d.set_entry(0, 0, &[1]);
        d.set_entry(1, 1, &[1]);
        d.set_entry(2, 2, &[2]);
        let mu = min_poly(&d);
        assert_eq!(mu.prime_coeffs(), vec![2, 2, 1]); // T^2 + 2T + 2 = (T-1)(T-2) mod 5
        // Jordan block J_2(0): minimal polynomial T^2.
        let mut j = Matrix::zero(&f, 2, 2);
        j.set_entry(0, 1, &[1]);
        let mu = min_poly(&j);
        assert_eq!(mu.prime_coeffs(), vec![0, 0, 1]);
    }

    #[test]
    fn transpose_and_mul_agree_with_dense() {
        let f = gf5();
        let a = random_matrix(&f, 4, 5, 31);
        let b = random_matrix(&f, 5, 3, 32);
        let c = a.mul(&b);
        for i in 0..4 {
            for j in 0..3 {
                let mut acc = 0u64;
                for l in 0..5 {
                    let x = a.entry(i, l).map(|s| s[0]).unwrap_or(0);
                    let y = b.entry(l, j).map(|s| s[0]).unwrap_or(0);
                    acc = (acc + x * y) % 5;
                }
                assert_eq!(c.entry(i, j).map(|s| s[0]).unwrap_or(0), acc);
            }
        }
        let t = a.transpose();
        for i in 0..4 {
            for j in 0..5 {
                assert_eq!(a.entry(i, j), t.entry(j, i));
            }
        }
    }
}
