//! Graded and filtered Lie algebras of differential-operator type.
//!
//! Everything here lives inside an ambient derivation algebra W(m;n)
//! acting on a divided power algebra O(m;n).  The four classical families
//! are cut out of W by linear conditions on a defining differential form:
//! annihilate it (special, Hamiltonian), scale it by a constant (their
//! conformal extensions) or scale it by a function (contact).  Bases are
//! kept reduced against a weight-sorted monomial order, so the natural
//! grading or filtration of each algebra is read off its pivots.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dpalg::{
    binom_mod_p, volume_form, DifferentialForm, DpAlgebra, DpElement, DpError, MultiIndex,
    SpecialDerivation,
};
use crate::gf::{Field, FieldTower, GfError};
use crate::liealg::grading::Filtration;
use crate::liealg::{ClosureMode, LieAlgebra, LieError, StructureEntries, Validation};
use crate::linalg::{nullspace, solve, Matrix, SparseVec, SubspaceBasis};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CartanError {
    #[error("no construction mode accepts a form of degree {0}")]
    WrongDegree(usize),
    #[error("the defining form is degenerate")]
    DegenerateForm,
    #[error("invalid index decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("invalid block data: {0}")]
    BadBlockShape(String),
    #[error("subalgebra fails the maximality check: {0}")]
    NotMaximal(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// The six Cartan-type families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    W,
    S,
    CS,
    H,
    CH,
    K,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::W => "W",
            Family::S => "S",
            Family::CS => "CS",
            Family::H => "H",
            Family::CH => "CH",
            Family::K => "K",
        }
    }

    /// Variable weights of the natural grading: weight one everywhere,
    /// except that the contact family counts the last variable twice.
    pub fn weights(self, m: usize) -> Vec<i64> {
        let mut r = vec![1i64; m];
        if self == Family::K {
            r[m - 1] = 2;
        }
        r
    }
}

/// Full Jacobi validation is quadratic in the table and cubic in the
/// dimension; beyond this size a seeded spot check is used instead.
const FULL_VALIDATION_LIMIT: usize = 160;

pub(crate) fn validation_for(dim: usize) -> Validation {
    if dim <= FULL_VALIDATION_LIMIT {
        Validation::Full
    } else {
        Validation::SpotCheck { seed: 0x6361_7274, samples: 600 }
    }
}

/// The ambient algebra W(m;n) realized on monomial derivations x^(α)∂_i.
///
/// Slots are sorted by (weight, α, i), so any subspace reduced against
/// this order has pivot weights equal to the minimal weights of its rows
/// and its filtration levels are spanned by trailing segments of them.
pub struct WittModel {
    alg: DpAlgebra,
    weights: Vec<i64>,
    slots: Vec<(MultiIndex, usize)>,
    slot_degree: Vec<i64>,
    slot_of: Vec<usize>,
    strides: Vec<u64>,
}

impl WittModel {
    pub fn new(f: &Field, n: &[u32], weights: Vec<i64>) -> Result<WittModel, CartanError> {
        let m = n.len();
        if m == 0 {
            return Err(CartanError::Precondition("at least one variable is required".into()));
        }
        if n.iter().any(|&h| h == 0) {
            return Err(CartanError::Precondition("heights must be positive".into()));
        }
        if weights.len() != m || weights.iter().any(|&w| w <= 0) {
            return Err(CartanError::Precondition("weights must be positive, one per variable".into()));
        }
        let alg = DpAlgebra::new(f, n.to_vec());
        let dim_o = alg.dim();
        let mut strides = vec![1u64; m];
        for t in 1..m {
            strides[t] = strides[t - 1] * alg.bound(t - 1);
        }
        let mut slots: Vec<(MultiIndex, usize)> = Vec::with_capacity(m * dim_o);
        for a in alg.all_indices() {
            for i in 0..m {
                slots.push((a.clone(), i));
            }
        }
        let degree = |a: &MultiIndex, i: usize| -> i64 {
            a.iter().zip(&weights).map(|(&e, &w)| e as i64 * w).sum::<i64>() - weights[i]
        };
        slots.sort_by(|x, y| {
            (degree(&x.0, x.1), &x.0, x.1).cmp(&(degree(&y.0, y.1), &y.0, y.1))
        });
        let slot_degree: Vec<i64> = slots.iter().map(|(a, i)| degree(a, *i)).collect();
        let mut slot_of = vec![usize::MAX; m * dim_o];
        for (t, (a, i)) in slots.iter().enumerate() {
            let flat: u64 = a.iter().zip(&strides).map(|(&e, &s)| e as u64 * s).sum();
            slot_of[flat as usize * m + i] = t;
        }
        Ok(WittModel { alg, weights, slots, slot_degree, slot_of, strides })
    }

    pub fn alg(&self) -> &DpAlgebra {
        &self.alg
    }

    pub fn m(&self) -> usize {
        self.alg.m()
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn slot(&self, t: usize) -> (&MultiIndex, usize) {
        (&self.slots[t].0, self.slots[t].1)
    }

    pub fn degree_of_slot(&self, t: usize) -> i64 {
        self.slot_degree[t]
    }

    fn flat_of(&self, a: &MultiIndex) -> usize {
        a.iter().zip(&self.strides).map(|(&e, &s)| e as u64 * s).sum::<u64>() as usize
    }

    pub fn slot_index(&self, a: &MultiIndex, i: usize) -> usize {
        self.slot_of[self.flat_of(a) * self.m() + i]
    }

    pub fn label(&self, t: usize) -> String {
        let (a, i) = &self.slots[t];
        if a.iter().all(|&e| e == 0) {
            format!("D{}", i + 1)
        } else {
            let body: Vec<String> = a.iter().map(|e| e.to_string()).collect();
            format!("x({})D{}", body.join(","), i + 1)
        }
    }

    /// x^(α)·∂_d(x^(β)) placed on ∂_t, when the product survives the
    /// height truncation.
    fn shift_product(
        &self,
        alpha: &MultiIndex,
        beta: &MultiIndex,
        d: usize,
        t: usize,
    ) -> Option<(usize, u64)> {
        if beta[d] == 0 {
            return None;
        }
        let p = self.alg.field().p();
        let m = self.m();
        let mut c = 1u64;
        let mut flat = 0u64;
        for s in 0..m {
            let mut g = alpha[s] as u64 + beta[s] as u64;
            if s == d {
                g -= 1;
            }
            if g >= self.alg.bound(s) {
                return None;
            }
            c = c * binom_mod_p(g, alpha[s] as u64, p) % p;
            if c == 0 {
                return None;
            }
            flat += g * self.strides[s];
        }
        Some((self.slot_of[flat as usize * m + t], c))
    }

    /// [x^(α)∂_i, x^(β)∂_j] as at most two monomial terms.
    fn slot_bracket(&self, a: usize, b: usize) -> (Option<(usize, u64)>, Option<(usize, u64)>) {
        let p = self.alg.field().p();
        let (alpha, i) = &self.slots[a];
        let (beta, j) = &self.slots[b];
        let fst = self.shift_product(alpha, beta, *i, *j);
        let snd = self.shift_product(beta, alpha, *j, *i);
        match (fst, snd) {
            (Some((s1, c1)), Some((s2, c2))) if s1 == s2 => {
                let c = (c1 + p - c2) % p;
                (if c == 0 { None } else { Some((s1, c)) }, None)
            }
            (f1, f2) => (f1, f2.map(|(s, c)| (s, p - c))),
        }
    }

    /// Bracket of two coefficient vectors over the monomial basis.
    pub fn bracket_vec(&self, u: &SparseVec, v: &SparseVec) -> SparseVec {
        let f = self.alg.field();
        let k = f.k();
        let mut acc = vec![0u64; self.dim() * k];
        for (pu, &su) in u.idx.iter().enumerate() {
            let cu = &u.dat[pu * k..(pu + 1) * k];
            for (pv, &sv) in v.idx.iter().enumerate() {
                let cv = &v.dat[pv * k..(pv + 1) * k];
                let cuv = f.mul_slice(cu, cv);
                if f.is_zero_slice(&cuv) {
                    continue;
                }
                let (t1, t2) = self.slot_bracket(su as usize, sv as usize);
                for (t, c) in t1.into_iter().chain(t2) {
                    let w = f.scale_int_slice(&cuv, c);
                    f.add_assign_slice(&mut acc[t * k..(t + 1) * k], &w);
                }
            }
        }
        SparseVec::from_dense(f, &acc)
    }

    /// Coefficient vector to special derivation.
    pub fn derivation_of(&self, v: &SparseVec) -> SpecialDerivation {
        let f = self.alg.field();
        let k = f.k();
        let mut comps = vec![self.alg.zero(); self.m()];
        for (pos, &t) in v.idx.iter().enumerate() {
            let (a, i) = &self.slots[t as usize];
            let c = &v.dat[pos * k..(pos + 1) * k];
            comps[*i] = comps[*i].add(&self.alg.monomial(a, c));
        }
        SpecialDerivation::from_components(&self.alg, comps)
    }

    /// Special derivation to coefficient vector.
    pub fn coords_of(&self, d: &SpecialDerivation) -> SparseVec {
        let f = self.alg.field();
        let k = f.k();
        let mut dense = vec![0u64; self.dim() * k];
        for (i, comp) in d.comps.iter().enumerate() {
            for (a, c) in comp.terms() {
                let t = self.slot_index(a, i);
                dense[t * k..(t + 1) * k].copy_from_slice(c);
            }
        }
        SparseVec::from_dense(f, &dense)
    }

    /// The whole ambient algebra as a structure constant table, with its
    /// weight grading attached.
    pub fn lie_algebra(&self) -> Result<LieAlgebra, CartanError> {
        let f = self.alg.field();
        let dim = self.dim();
        let labels: Vec<String> = (0..dim).map(|t| self.label(t)).collect();
        let mut entries: StructureEntries = Vec::new();
        for a in 0..dim {
            for b in (a + 1)..dim {
                let (t1, t2) = self.slot_bracket(a, b);
                let terms: Vec<(usize, Vec<u64>)> = t1
                    .into_iter()
                    .chain(t2)
                    .map(|(t, c)| (t, f.from_int(c as i64)))
                    .collect();
                if !terms.is_empty() {
                    entries.push((a, b, terms));
                }
            }
        }
        let l = LieAlgebra::from_structure_constants(f, labels, entries, validation_for(dim))?;
        Ok(l.with_grading(self.slot_degree.clone())?)
    }
}

/// A defining form (exp u)·ω' held as the pair (ω', du).
///
/// Truncated exponentials do not lie in O(m;n), so the twisted forms in
/// the classification are stored by their untwisted part together with
/// the exact differential of the exponent.  The twist changes the action
/// of a derivation D by the multiplier du(D) and keeps every linear
/// condition expressible over O(m;n).
#[derive(Clone)]
pub struct CartanForm {
    pub base: DifferentialForm,
    pub twist: Option<DifferentialForm>,
}

impl CartanForm {
    pub fn plain(base: DifferentialForm) -> CartanForm {
        CartanForm { base, twist: None }
    }

    pub fn twisted(du: DifferentialForm, base: DifferentialForm) -> Result<CartanForm, CartanError> {
        if du.alg != base.alg {
            return Err(CartanError::Precondition("twist and base live over different algebras".into()));
        }
        if du.degree != 1 {
            return Err(CartanError::WrongDegree(du.degree));
        }
        if !du.exterior_d().is_zero() {
            return Err(CartanError::Precondition("the twist differential must be closed".into()));
        }
        Ok(CartanForm { base, twist: Some(du) })
    }

    pub fn alg(&self) -> &DpAlgebra {
        &self.base.alg
    }

    pub fn degree(&self) -> usize {
        self.base.degree
    }

    /// D((exp u)ω') with the exponential factor stripped:
    /// du(D)·ω' + D(ω').
    pub fn action(&self, d: &SpecialDerivation) -> DifferentialForm {
        let acted = self.base.derivation_action(d);
        match &self.twist {
            None => acted,
            Some(du) => acted.add(&self.base.scale_fn(&du.evaluate_on(d))),
        }
    }

    /// d((exp u)ω') with the exponential factor stripped:
    /// du ∧ ω' + dω'.
    fn effective_d(&self) -> DifferentialForm {
        let d = self.base.exterior_d();
        match &self.twist {
            None => d,
            Some(du) => du.wedge(&self.base).add(&d),
        }
    }

    /// Nondegeneracy of the twisted form.  The exponential factor is a
    /// unit multiple of 1 in every divided power, so each case reduces to
    /// an invertibility test on the untwisted data.
    pub fn nondegenerate(&self) -> Result<bool, CartanError> {
        let alg = self.alg();
        let f = alg.field();
        let m = alg.m();
        let deg = self.degree();
        let top: Vec<u8> = (0..m as u8).collect();
        if deg == m && m >= 2 {
            let phi = self.base.coefficient(&top);
            return Ok(!f.is_zero_slice(&phi.constant_term()));
        }
        if deg == 2 {
            if m % 2 != 0 || m < 2 {
                return Ok(false);
            }
            if !self.effective_d().is_zero() {
                return Ok(false);
            }
            let pw = self.base.divided_power(m / 2)?;
            return Ok(!f.is_zero_slice(&pw.coefficient(&top).constant_term()));
        }
        if deg == 1 {
            if m % 2 == 0 || m < 3 {
                return Ok(false);
            }
            let eta = self.effective_d().divided_power((m - 1) / 2)?;
            let vol = eta.wedge(&self.base);
            return Ok(!f.is_zero_slice(&vol.coefficient(&top).constant_term()));
        }
        Err(CartanError::WrongDegree(deg))
    }
}

/// What was built: the family, the shape (m;n) and the defining form.
#[derive(Clone)]
pub struct CartanDescriptor {
    pub family: Family,
    pub m: usize,
    pub n: Vec<u32>,
    pub p: u64,
    pub form: Option<CartanForm>,
}

impl CartanDescriptor {
    pub fn name(&self) -> String {
        let heights: Vec<String> = self.n.iter().map(|h| h.to_string()).collect();
        let twist = match &self.form {
            Some(cf) if cf.twist.is_some() => "; twisted",
            _ => "",
        };
        format!("{}({};({}){})", self.family.name(), self.m, heights.join(","), twist)
    }
}

/// How the defining form cuts the subalgebra out of W.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuildMode {
    /// Dω = 0 (special, Hamiltonian).
    Annihilate,
    /// Dω ∈ Fω (their conformal extensions).
    ScaleByF,
    /// Dω ∈ O(m;n)·ω (contact).
    ScaleByO,
}

/// A subalgebra of some W(m;n) with its reduced ambient basis, the weight
/// of each basis row, and the structure constant table in row coordinates.
#[derive(Clone)]
pub struct CartanAlgebra {
    pub algebra: LieAlgebra,
    pub descriptor: Arc<CartanDescriptor>,
    pub witt: Arc<WittModel>,
    /// Reduced basis in ambient coordinates; row t is basis vector t.
    pub rows: SubspaceBasis,
    /// Minimal weight of each row, nondecreasing.
    pub degrees: Vec<i64>,
    /// True when every row is weight homogeneous.
    pub graded: bool,
}

fn unit_filtration(f: &Field, dim: usize, degrees: &[i64]) -> Option<Filtration> {
    if dim == 0 {
        return None;
    }
    let lo = *degrees.iter().min().unwrap();
    let hi = *degrees.iter().max().unwrap();
    let mut levels = Vec::new();
    for j in lo..=hi {
        let units: Vec<SparseVec> =
            (0..dim).filter(|&t| degrees[t] >= j).map(|t| SparseVec::unit(f, t)).collect();
        levels.push(SubspaceBasis::from_vectors(f, dim, units));
    }
    Some(Filtration { lo, levels })
}

/// Structure constants of a bracket-closed row space, with the weight
/// grading attached when the rows are homogeneous and the weight
/// filtration otherwise.
fn assemble(
    witt: &Arc<WittModel>,
    desc: &Arc<CartanDescriptor>,
    rows: SubspaceBasis,
) -> Result<CartanAlgebra, CartanError> {
    let f = witt.alg().field().clone();
    let k = f.k();
    let dim = rows.dim();
    let degrees: Vec<i64> =
        rows.pivots.iter().map(|&pc| witt.degree_of_slot(pc as usize)).collect();
    let graded = rows.rows.iter().enumerate().all(|(t, r)| {
        r.idx.iter().all(|&s| witt.degree_of_slot(s as usize) == degrees[t])
    });
    let labels: Vec<String> = rows.pivots.iter().map(|&pc| witt.label(pc as usize)).collect();
    let ech = rows.to_echelon();
    let mut entries: StructureEntries = Vec::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let w = witt.bracket_vec(&rows.rows[a], &rows.rows[b]);
            if w.is_zero() {
                continue;
            }
            let coords = ech.coordinates(&w).ok_or(LieError::NotASubalgebra)?;
            let mut terms = Vec::new();
            for t in 0..dim {
                let c = &coords[t * k..(t + 1) * k];
                if !f.is_zero_slice(c) {
                    terms.push((t, c.to_vec()));
                }
            }
            entries.push((a, b, terms));
        }
    }
    let mut algebra = LieAlgebra::from_structure_constants(&f, labels, entries, validation_for(dim))?;
    if dim > 0 {
        if graded {
            algebra = algebra.with_grading(degrees.clone())?;
        } else if let Some(filt) = unit_filtration(&f, dim, &degrees) {
            algebra = algebra.with_filtration(filt)?;
        }
    }
    Ok(CartanAlgebra { algebra, descriptor: desc.clone(), witt: witt.clone(), rows, degrees, graded })
}

/// W(m;n) over the prime field of characteristic p, with its weight-one
/// grading.  Characteristics 2 and 3 are accepted; the structure theory
/// downstream is only reliable from 5 on.
pub fn build_witt(m: usize, n: &[u32], p: u64) -> Result<CartanAlgebra, CartanError> {
    if n.len() != m {
        return Err(CartanError::Precondition("n must list one height per variable".into()));
    }
    let f = FieldTower::new(0).field_small_char(p, 1)?;
    let witt = Arc::new(WittModel::new(&f, n, Family::W.weights(m))?);
    let algebra = witt.lie_algebra()?;
    let dim = witt.dim();
    let rows = SubspaceBasis::whole(&f, dim);
    let degrees: Vec<i64> = (0..dim).map(|t| witt.degree_of_slot(t)).collect();
    let desc = Arc::new(CartanDescriptor { family: Family::W, m, n: n.to_vec(), p, form: None });
    Ok(CartanAlgebra { algebra, descriptor: desc, witt, rows, degrees, graded: true })
}

fn combos(m: u8, d: usize) -> Vec<Vec<u8>> {
    fn rec(start: u8, m: u8, d: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for t in start..m {
            cur.push(t);
            rec(t + 1, m, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, d, &mut Vec::new(), &mut out);
    out
}

/// Rows of the linear system cutting the subalgebra out of W: one scalar
/// condition per (coordinate key, monomial), over the W coefficients plus
/// the scaling unknowns of the chosen mode.
fn membership_rows(
    witt: &WittModel,
    form: &CartanForm,
    mode: BuildMode,
) -> Result<SubspaceBasis, CartanError> {
    let alg = witt.alg();
    let f = alg.field();
    let k = f.k();
    let m = alg.m();
    let deg = form.degree();
    let dim_o = alg.dim();
    let dim_w = witt.dim();
    let keys = combos(m as u8, deg);
    let key_row: HashMap<Vec<u8>, usize> =
        keys.iter().enumerate().map(|(q, kk)| (kk.clone(), q)).collect();
    let aux = match mode {
        BuildMode::Annihilate => 0,
        BuildMode::ScaleByF => 1,
        BuildMode::ScaleByO => dim_o,
    };
    let cols = dim_w + aux;
    let nrows = keys.len() * dim_o;
    let mut buckets: Vec<Vec<(u32, Vec<u64>)>> = vec![Vec::new(); nrows];
    for s in 0..dim_w {
        let d = witt.derivation_of(&SparseVec::unit(f, s));
        let acted = form.action(&d);
        for (kk, c) in acted.terms() {
            let q = key_row[kk.as_slice()];
            for (a, cc) in c.terms() {
                buckets[q * dim_o + witt.flat_of(a)].push((s as u32, cc.to_vec()));
            }
        }
    }
    match mode {
        BuildMode::Annihilate => {}
        BuildMode::ScaleByF => {
            for (kk, c) in form.base.terms() {
                let q = key_row[kk.as_slice()];
                for (a, cc) in c.terms() {
                    buckets[q * dim_o + witt.flat_of(a)].push((dim_w as u32, f.neg_slice(cc)));
                }
            }
        }
        BuildMode::ScaleByO => {
            // Column dim_w + β carries −x^(β)·(base coefficient).
            let p = f.p();
            for (kk, c) in form.base.terms() {
                let q = key_row[kk.as_slice()];
                for (g, cg) in c.terms() {
                    for (bflat, b) in alg.all_indices().iter().enumerate() {
                        let a: MultiIndex = g.iter().zip(b).map(|(&x, &y)| x + y).collect();
                        if !alg.in_bounds(&a) {
                            continue;
                        }
                        let mut bin = 1u64;
                        for (s, (&ae, &be)) in a.iter().zip(b).enumerate() {
                            let _ = s;
                            bin = bin * binom_mod_p(ae as u64, be as u64, p) % p;
                        }
                        if bin == 0 {
                            continue;
                        }
                        let val = f.neg_slice(&f.scale_int_slice(cg, bin));
                        let aflat = witt.flat_of(&a);
                        buckets[q * dim_o + aflat].push(((dim_w + bflat) as u32, val));
                    }
                }
            }
        }
    }
    let mut mrows = Vec::with_capacity(nrows);
    for mut bucket in buckets {
        bucket.sort_by_key(|&(c, _)| c);
        let mut idx = Vec::with_capacity(bucket.len());
        let mut dat = Vec::with_capacity(bucket.len() * k);
        for (c, v) in bucket {
            if idx.last() == Some(&c) {
                let at = idx.len() - 1;
                f.add_assign_slice(&mut dat[at * k..(at + 1) * k], &v);
            } else {
                idx.push(c);
                dat.extend_from_slice(&v);
            }
        }
        // Merged duplicates may have cancelled.
        let raw = SparseVec { idx, dat };
        let dense = raw.to_dense(f, cols);
        mrows.push(SparseVec::from_dense(f, &dense));
    }
    let mat = Matrix::from_sparse_rows(f, cols, mrows);
    let null = nullspace(&mat);
    let mut projected = Vec::new();
    for r in &null.rows {
        let end = r.idx.partition_point(|&c| (c as usize) < dim_w);
        projected.push(SparseVec { idx: r.idx[..end].to_vec(), dat: r.dat[..end * k].to_vec() });
    }
    Ok(SubspaceBasis::from_vectors(f, dim_w, projected))
}

/// The subalgebra of W(m;n) attached to a nondegenerate defining form.
///
/// The family is inferred from the mode and the degree of the form: a
/// 2-form is Hamiltonian (conformal Hamiltonian under scaling), a top
/// form special (conformal special), and a 1-form under function scaling
/// contact.  The resulting algebra carries its weight grading if the
/// solution space is homogeneous, its weight filtration otherwise.
pub fn build_from_form(form: &CartanForm, mode: BuildMode) -> Result<CartanAlgebra, CartanError> {
    let alg = form.alg().clone();
    let m = alg.m();
    let deg = form.degree();
    let family = match mode {
        BuildMode::Annihilate => {
            if deg == 2 {
                Family::H
            } else if deg == m {
                Family::S
            } else {
                return Err(CartanError::WrongDegree(deg));
            }
        }
        BuildMode::ScaleByF => {
            if deg == 2 {
                Family::CH
            } else if deg == m {
                Family::CS
            } else {
                return Err(CartanError::WrongDegree(deg));
            }
        }
        BuildMode::ScaleByO => {
            if deg == 1 {
                Family::K
            } else {
                return Err(CartanError::WrongDegree(deg));
            }
        }
    };
    if !form.nondegenerate()? {
        return Err(CartanError::DegenerateForm);
    }
    let f = alg.field().clone();
    let witt = Arc::new(WittModel::new(&f, alg.heights(), family.weights(m))?);
    let rows = membership_rows(&witt, form, mode)?;
    let desc = Arc::new(CartanDescriptor {
        family,
        m,
        n: alg.heights().to_vec(),
        p: f.p(),
        form: Some(form.clone()),
    });
    assemble(&witt, &desc, rows)
}

/// Whether a form with coefficients in O(m;n) is the differential of one.
pub fn exact_in_coefficient_forms(base: &DifferentialForm) -> bool {
    let alg = &base.alg;
    let deg = base.degree;
    if deg == 0 {
        return false;
    }
    let f = alg.field();
    let k = f.k();
    let m = alg.m();
    let dim_o = alg.dim();
    let all = alg.all_indices();
    let flat_of: HashMap<MultiIndex, usize> =
        all.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
    let keys_t = combos(m as u8, deg);
    let keys_s = combos(m as u8, deg - 1);
    let trow: HashMap<Vec<u8>, usize> =
        keys_t.iter().enumerate().map(|(q, kk)| (kk.clone(), q)).collect();
    let nrows = keys_t.len() * dim_o;
    let mut buckets: Vec<Vec<(u32, Vec<u64>)>> = vec![Vec::new(); nrows];
    for (q, kk) in keys_s.iter().enumerate() {
        for (bflat, b) in all.iter().enumerate() {
            let col = (q * dim_o + bflat) as u32;
            let mut w = DifferentialForm::from_function(&alg.monomial(b, &f.one_slice()));
            for &t in kk {
                w = w.wedge(&DifferentialForm::dx(alg, t as usize));
            }
            for (tk, c) in w.exterior_d().terms() {
                let row = trow[tk.as_slice()];
                for (a, cc) in c.terms() {
                    buckets[row * dim_o + flat_of[a]].push((col, cc.to_vec()));
                }
            }
        }
    }
    let cols = keys_s.len() * dim_o;
    let mut mrows = Vec::with_capacity(nrows);
    for mut bucket in buckets {
        bucket.sort_by_key(|&(c, _)| c);
        let mut dense = vec![0u64; cols * k];
        for (c, v) in bucket {
            f.add_assign_slice(&mut dense[c as usize * k..(c as usize + 1) * k], &v);
        }
        mrows.push(SparseVec::from_dense(f, &dense));
    }
    let mat = Matrix::from_sparse_rows(f, cols, mrows);
    let mut b = vec![0u64; nrows * k];
    for (tk, c) in base.terms() {
        let row = trow[tk.as_slice()];
        for (a, cc) in c.terms() {
            let at = row * dim_o + flat_of[a];
            b[at * k..(at + 1) * k].copy_from_slice(cc);
        }
    }
    solve(&mat, &b).is_some()
}

/// Restrictability of an algebra and its derived terms, next to the shape
/// facts that decide it for the Cartan families.
pub struct RestrictabilityReport {
    /// Every height equals one.
    pub n_is_one: bool,
    /// The defining form has coefficients in O(m;n), i.e. carries no twist.
    pub form_in_coefficients: Option<bool>,
    /// The defining form is a differential of a coefficient form.
    pub form_exact: Option<bool>,
    /// (dimension, restrictable) for the algebra and up to two derived terms.
    pub chain: Vec<(usize, bool)>,
    /// Computed restrictability agrees with what the shape facts predict.
    pub consistent: bool,
}

fn expected_restrictable(
    family: Family,
    idx: usize,
    n1: bool,
    fic: Option<bool>,
    fex: Option<bool>,
) -> Option<bool> {
    match family {
        Family::W => {
            if idx == 0 {
                Some(n1)
            } else {
                None
            }
        }
        Family::CS | Family::CH => {
            if idx == 0 {
                Some(n1)
            } else {
                None
            }
        }
        Family::K => {
            if idx <= 1 {
                Some(n1)
            } else {
                None
            }
        }
        Family::S | Family::H => {
            if idx == 0 {
                Some(n1 && fic == Some(true))
            } else {
                Some(n1 && fex == Some(true))
            }
        }
    }
}

impl CartanAlgebra {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Depth of the weight filtration below zero.
    pub fn depth(&self) -> i64 {
        -self.degrees.iter().min().copied().unwrap_or(0)
    }

    /// The weight filtration in row coordinates; levels are unit spans.
    pub fn standard_filtration(&self) -> Option<Filtration> {
        unit_filtration(self.algebra.field(), self.dim(), &self.degrees)
    }

    /// Derived subalgebras until they stabilize, starting with the
    /// algebra itself; a perfect algebra yields a single term.
    pub fn derived_to_stability(&self) -> Result<Vec<CartanAlgebra>, CartanError> {
        let f = self.algebra.field().clone();
        let dim_w = self.witt.dim();
        let mut chain = vec![self.clone()];
        loop {
            let cur = chain.last().unwrap();
            let rows = &cur.rows.rows;
            let mut vecs = Vec::new();
            for a in 0..rows.len() {
                for b in (a + 1)..rows.len() {
                    let w = self.witt.bracket_vec(&rows[a], &rows[b]);
                    if !w.is_zero() {
                        vecs.push(w);
                    }
                }
            }
            let der = SubspaceBasis::from_vectors(&f, dim_w, vecs);
            if der.dim() == cur.dim() {
                break;
            }
            chain.push(assemble(&self.witt, &self.descriptor, der)?);
        }
        Ok(chain)
    }

    /// The nonnegative filtration level, checked to be a proper maximal
    /// subalgebra: adjoining any basis vector outside it generates back
    /// the whole algebra.
    pub fn standard_maximal_subalgebra(&self) -> Result<SubspaceBasis, CartanError> {
        let f = self.algebra.field().clone();
        let dim = self.dim();
        let nonneg: Vec<usize> = (0..dim).filter(|&t| self.degrees[t] >= 0).collect();
        if nonneg.len() == dim {
            return Err(CartanError::NotMaximal("the nonnegative level is everything".into()));
        }
        let seed: Vec<SparseVec> = nonneg.iter().map(|&t| SparseVec::unit(&f, t)).collect();
        let closed = self.algebra.closure(&seed, ClosureMode::Subalgebra);
        if closed.dim() != nonneg.len() {
            return Err(CartanError::Precondition(
                "the nonnegative level is not bracket closed".into(),
            ));
        }
        for t in (0..dim).filter(|&t| self.degrees[t] < 0) {
            let mut ext = seed.clone();
            ext.push(SparseVec::unit(&f, t));
            let grown = self.algebra.closure(&ext, ClosureMode::Subalgebra);
            if grown.dim() != dim {
                return Err(CartanError::NotMaximal(format!(
                    "adjoining basis vector {} generates only dimension {}",
                    t,
                    grown.dim()
                )));
            }
        }
        Ok(SubspaceBasis::from_vectors(&f, dim, seed))
    }

    /// Span of the minimal-weight homogeneous parts of the rows, in
    /// ambient coordinates.  For a graded algebra this is the row space;
    /// in general it realizes the associated graded space inside W.
    pub fn leading_term_rows(&self) -> SubspaceBasis {
        let f = self.algebra.field();
        let k = f.k();
        let vecs: Vec<SparseVec> = self
            .rows
            .rows
            .iter()
            .enumerate()
            .map(|(t, r)| {
                let mut idx = Vec::new();
                let mut dat = Vec::new();
                for (pos, &s) in r.idx.iter().enumerate() {
                    if self.witt.degree_of_slot(s as usize) == self.degrees[t] {
                        idx.push(s);
                        dat.extend_from_slice(&r.dat[pos * k..(pos + 1) * k]);
                    }
                }
                SparseVec { idx, dat }
            })
            .collect();
        SubspaceBasis::from_vectors(f, self.witt.dim(), vecs)
    }

    /// The multiplier f with Dω = f·ω for a contact-type element, read
    /// off at a key where the base form has an invertible constant
    /// coefficient.  Coordinates are row coordinates.
    pub fn contact_scale(&self, x: &[u64]) -> Result<DpElement, CartanError> {
        let form = self
            .descriptor
            .form
            .as_ref()
            .ok_or_else(|| CartanError::Precondition("no defining form".into()))?;
        let f = self.algebra.field();
        let k = f.k();
        let (key, unit) = form
            .base
            .terms()
            .find(|(_, c)| c.support_size() == 1 && !f.is_zero_slice(&c.constant_term()))
            .ok_or_else(|| {
                CartanError::Precondition("no constant unit coefficient in the base form".into())
            })?;
        let inv = f.inv_slice(&unit.constant_term())?;
        let mut dense = vec![0u64; self.witt.dim() * k];
        for (t, r) in self.rows.rows.iter().enumerate() {
            r.axpy_into(f, &x[t * k..(t + 1) * k], &mut dense);
        }
        let d = self.witt.derivation_of(&SparseVec::from_dense(f, &dense));
        Ok(form.action(&d).coefficient(key).scale(&inv))
    }

    /// Restrictability of the algebra and its derived terms, checked
    /// against the shape facts that decide it family by family: heights
    /// all one throughout; for special and Hamiltonian algebras the form
    /// must in addition lie in the coefficient forms, and their derived
    /// terms need it exact.
    pub fn restrictability_profile(&self) -> Result<RestrictabilityReport, CartanError> {
        let n_is_one = self.witt.alg().heights().iter().all(|&h| h == 1);
        let (fic, fex) = match &self.descriptor.form {
            None => (None, None),
            Some(cf) => {
                let fic = cf.twist.is_none();
                let fex = if self.descriptor.family == Family::K {
                    None
                } else if !fic {
                    Some(false)
                } else {
                    Some(exact_in_coefficient_forms(&cf.base))
                };
                (Some(fic), fex)
            }
        };
        let chain_algs = self.derived_to_stability()?;
        let chain: Vec<(usize, bool)> = chain_algs
            .iter()
            .take(3)
            .map(|c| (c.dim(), crate::restricted::is_restrictable(&c.algebra)))
            .collect();
        let consistent = chain.iter().enumerate().all(|(idx, &(_, got))| {
            match expected_restrictable(self.descriptor.family, idx, n_is_one, fic, fex) {
                Some(want) => want == got,
                None => true,
            }
        });
        Ok(RestrictabilityReport {
            n_is_one,
            form_in_coefficients: fic,
            form_exact: fex,
            chain,
            consistent,
        })
    }
}

/// The normal forms of the defining forms, one tag per orbit type.
#[derive(Clone, Debug)]
pub enum NormalFormSpec {
    /// (exp x_i)·(volume form).
    VolumeExp { i: usize },
    /// (1 − x^(δ))·(volume form), δ the top multi index.
    VolumeDelta,
    /// dx_{i0} + Σ x_a dx_b over a point and pairs partitioning {1..m}.
    ContactI { point: usize, pairs: Vec<(usize, usize)> },
    /// d((exp x_i)·Σ x_a dx_b) over pairs partitioning {1..m}.
    HamiltonianExpI { i: usize, pairs: Vec<(usize, usize)> },
    /// Σ (a_st + b_st x_s^(top) x_t^(top)) dx_s ∧ dx_t from symplectic
    /// blocks; A is the standard symplectic sum, B block diagonal.
    HamiltonianAB { blocks: Vec<HamiltonianBlock> },
}

/// Upper-right block content of one symplectic 2r×2r block.
#[derive(Clone, Debug)]
pub enum HamiltonianBlock {
    /// Nilpotent Jordan block J_r(0).
    Nilpotent { size: usize },
    /// Block monomial matrix of d×d cells of size s with unit cells on
    /// the superdiagonal and J_s(λ) in the corner; λ ≠ 0, r = d·s.
    Invertible { d: usize, s: usize, lambda: i64 },
    /// Cyclic monomial matrix C_r.
    Cyclic { size: usize },
}

fn check_partition(m: usize, point: Option<usize>, pairs: &[(usize, usize)]) -> Result<(), CartanError> {
    let mut used = vec![false; m + 1];
    let mut mark = |i: usize| -> Result<(), CartanError> {
        if i == 0 || i > m {
            return Err(CartanError::InvalidDecomposition(format!(
                "index {} is outside 1..={}",
                i, m
            )));
        }
        if used[i] {
            return Err(CartanError::InvalidDecomposition(format!("index {} repeats", i)));
        }
        used[i] = true;
        Ok(())
    };
    if let Some(i0) = point {
        mark(i0)?;
    }
    for &(a, b) in pairs {
        if a >= b {
            return Err(CartanError::InvalidDecomposition(format!(
                "pair ({}, {}) must be increasing",
                a, b
            )));
        }
        mark(a)?;
        mark(b)?;
    }
    if let Some(miss) = (1..=m).find(|&i| !used[i]) {
        return Err(CartanError::InvalidDecomposition(format!("index {} is not covered", miss)));
    }
    Ok(())
}

fn block_matrix(block: &HamiltonianBlock, p: u64) -> Result<Vec<Vec<u64>>, CartanError> {
    match block {
        HamiltonianBlock::Nilpotent { size } => {
            if *size == 0 {
                return Err(CartanError::BadBlockShape("empty block".into()));
            }
            let mut mat = vec![vec![0u64; *size]; *size];
            for u in 0..size.saturating_sub(1) {
                mat[u][u + 1] = 1;
            }
            Ok(mat)
        }
        HamiltonianBlock::Cyclic { size } => {
            if *size == 0 {
                return Err(CartanError::BadBlockShape("empty block".into()));
            }
            let mut mat = vec![vec![0u64; *size]; *size];
            for u in 0..size.saturating_sub(1) {
                mat[u][u + 1] = 1;
            }
            mat[*size - 1][0] = 1;
            Ok(mat)
        }
        HamiltonianBlock::Invertible { d, s, lambda } => {
            let lam = lambda.rem_euclid(p as i64) as u64;
            if lam == 0 {
                return Err(CartanError::BadBlockShape("λ must be nonzero".into()));
            }
            if *d == 0 || *s == 0 {
                return Err(CartanError::BadBlockShape("empty block".into()));
            }
            let r = d * s;
            let mut mat = vec![vec![0u64; r]; r];
            for u in 0..(d - 1) {
                for t in 0..*s {
                    mat[u * s + t][(u + 1) * s + t] = 1;
                }
            }
            for t in 0..*s {
                mat[(d - 1) * s + t][t] = lam;
                if t + 1 < *s {
                    mat[(d - 1) * s + t][t + 1] = 1;
                }
            }
            Ok(mat)
        }
    }
}

fn block_size(block: &HamiltonianBlock) -> usize {
    match block {
        HamiltonianBlock::Nilpotent { size } | HamiltonianBlock::Cyclic { size } => *size,
        HamiltonianBlock::Invertible { d, s, .. } => d * s,
    }
}

/// The literal defining form of a normal form tag over O(m;n) in
/// characteristic p, nondegeneracy checked.
pub fn normal_form(spec: &NormalFormSpec, n: &[u32], p: u64) -> Result<CartanForm, CartanError> {
    let m = n.len();
    let f = FieldTower::new(0).field_small_char(p, 1)?;
    let alg = DpAlgebra::new(&f, n.to_vec());
    let form = match spec {
        NormalFormSpec::VolumeExp { i } => {
            if *i == 0 || *i > m {
                return Err(CartanError::InvalidDecomposition(format!(
                    "exponent index {} is outside 1..={}",
                    i, m
                )));
            }
            CartanForm::twisted(DifferentialForm::dx(&alg, i - 1), volume_form(&alg))?
        }
        NormalFormSpec::VolumeDelta => {
            let delta: MultiIndex = (0..m).map(|s| (alg.bound(s) - 1) as u32).collect();
            let g = alg.one().sub(&alg.monomial(&delta, &f.one_slice()));
            CartanForm::plain(volume_form(&alg).scale_fn(&g))
        }
        NormalFormSpec::ContactI { point, pairs } => {
            check_partition(m, Some(*point), pairs)?;
            let mut w = DifferentialForm::dx(&alg, point - 1);
            for &(a, b) in pairs {
                w = w.add(&DifferentialForm::dx(&alg, b - 1).scale_fn(&alg.x(a - 1)));
            }
            CartanForm::plain(w)
        }
        NormalFormSpec::HamiltonianExpI { i, pairs } => {
            if *i == 0 || *i > m {
                return Err(CartanError::InvalidDecomposition(format!(
                    "exponent index {} is outside 1..={}",
                    i, m
                )));
            }
            check_partition(m, None, pairs)?;
            let mut eta = DifferentialForm::zero(&alg, 1);
            for &(a, b) in pairs {
                eta = eta.add(&DifferentialForm::dx(&alg, b - 1).scale_fn(&alg.x(a - 1)));
            }
            let du = DifferentialForm::dx(&alg, i - 1);
            let base = du.wedge(&eta).add(&eta.exterior_d());
            CartanForm::twisted(du, base)?
        }
        NormalFormSpec::HamiltonianAB { blocks } => {
            let total: usize = blocks.iter().map(block_size).sum();
            if 2 * total != m {
                return Err(CartanError::BadBlockShape(format!(
                    "blocks cover {} coordinates, the algebra has {}",
                    2 * total,
                    m
                )));
            }
            let mut w = DifferentialForm::zero(&alg, 2);
            let mut off = 0usize;
            for block in blocks {
                let r = block_size(block);
                let mat = block_matrix(block, p)?;
                for u in 0..r {
                    let s = off + u;
                    let t = off + r + u;
                    w = w.add(&DifferentialForm::dx(&alg, s).wedge(&DifferentialForm::dx(&alg, t)));
                    for (v, &c) in mat[u].iter().enumerate() {
                        if c == 0 {
                            continue;
                        }
                        let tt = off + r + v;
                        let mut top: MultiIndex = vec![0; m];
                        top[s] = (alg.bound(s) - 1) as u32;
                        top[tt] = (alg.bound(tt) - 1) as u32;
                        let g = alg.monomial(&top, &f.from_int(c as i64));
                        let part = DifferentialForm::dx(&alg, s)
                            .wedge(&DifferentialForm::dx(&alg, tt))
                            .scale_fn(&g);
                        w = w.add(&part);
                    }
                }
                off += 2 * r;
            }
            CartanForm::plain(w)
        }
    };
    if !form.nondegenerate()? {
        return Err(CartanError::DegenerateForm);
    }
    Ok(form)
}
