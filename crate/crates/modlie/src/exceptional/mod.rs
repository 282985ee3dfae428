//! Exceptional simple Lie algebras in small characteristic.
//!
//! Three sources that fall outside the classical and differential-operator
//! series: the Melikian algebras at p = 5, glued from two copies of W(2;n)
//! and one of O(2;n); the Brown algebras at p = 2, glued from W(2;n) and
//! two copies of O(2;n); and reductions of Chevalley bases together with
//! the matrix families gl, sl, pgl, psl they are usually compared against.

pub mod chevalley;

use std::collections::HashMap;

use crate::cartan::validation_for;
use crate::dpalg::{DpAlgebra, DpElement, DpError, MultiIndex};
use crate::gf::{FieldTower, GfError};
use crate::liealg::grading::Grading;
use crate::liealg::{ClosureMode, LieAlgebra, LieError, StructureEntries};
use crate::linalg::jordan::is_nilpotent_matrix;
use crate::linalg::{LinalgError, SparseVec, SubspaceBasis};
use crate::restricted::{is_toral_element, RestrictedError};
use thiserror::Error;

pub use chevalley::{build_chevalley, ChevalleyAlgebra, RootType};

#[derive(Debug, Error)]
pub enum ExceptionalError {
    #[error("this family exists only in characteristic {expected}, got {got}")]
    WrongCharacteristic { expected: u64, got: u64 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("construction self-check failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Dp(#[from] DpError),
    #[error(transparent)]
    Gf(#[from] GfError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Restricted(#[from] RestrictedError),
}

/// The three summands of a Melikian algebra: vector fields, functions,
/// and a second copy of the vector fields on which functions act.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MelikianSheet {
    Vector,
    Function,
    Twisted,
}

type MelSlot = (MelikianSheet, MultiIndex, usize);

#[derive(Clone)]
pub struct MelikianAlgebra {
    pub algebra: LieAlgebra,
    pub functions: DpAlgebra,
    pub slots: Vec<MelSlot>,
    /// Sheet class of each slot in the three-fold cyclic grading.
    pub z3: Vec<u8>,
    /// Degrees in the full depth-three grading that refines the cyclic one.
    pub ermolaev: Vec<i64>,
    slot_of: HashMap<MelSlot, usize>,
}

fn mono_suffix(a: &MultiIndex) -> String {
    if a.iter().all(|&e| e == 0) {
        String::new()
    } else {
        let parts: Vec<String> = a.iter().map(|e| e.to_string()).collect();
        format!("x({})", parts.join(","))
    }
}

impl MelikianAlgebra {
    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_index(&self, sheet: MelikianSheet, a: &MultiIndex, comp: usize) -> usize {
        self.slot_of[&(sheet, a.clone(), comp)]
    }

    pub fn z3_component(&self, class: u8) -> SubspaceBasis {
        let f = self.algebra.field();
        let units = self
            .z3
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == class)
            .map(|(t, _)| SparseVec::unit(f, t));
        SubspaceBasis::from_vectors(f, self.dim(), units)
    }

    /// The depth-three grading, validated against the bracket table.
    pub fn ermolaev_grading(&self) -> Result<Grading, LieError> {
        Grading::new(&self.algebra, self.ermolaev.clone())
    }

    /// Subalgebra generated by the two depth-three components of degree
    /// plus and minus one, with that grading carried over.
    pub fn g2_core(&self) -> Result<(LieAlgebra, SubspaceBasis), ExceptionalError> {
        let f = self.algebra.field();
        let seeds: Vec<SparseVec> = (0..self.dim())
            .filter(|&t| self.ermolaev[t] == 1 || self.ermolaev[t] == -1)
            .map(|t| SparseVec::unit(f, t))
            .collect();
        let rows = self.algebra.closure(&seeds, ClosureMode::Subalgebra);
        let mut degrees = Vec::with_capacity(rows.dim());
        for (row, &pv) in rows.rows.iter().zip(&rows.pivots) {
            let d = self.ermolaev[pv as usize];
            if row.idx.iter().any(|&t| self.ermolaev[t as usize] != d) {
                return Err(ExceptionalError::Verification(
                    "generated subalgebra is not graded".into(),
                ));
            }
            degrees.push(d);
        }
        let sub = self.algebra.induced_algebra(&rows)?.with_grading(degrees)?;
        Ok((sub, rows))
    }

    /// The rank two torus spanned by (1+x_1)d_1 and (1+x_2)d_2.
    pub fn standard_torus_rows(&self) -> Vec<SparseVec> {
        let f = self.algebra.field();
        (0..2)
            .map(|i| {
                let mut e = vec![0u32; 2];
                e[i] = 1;
                let mut dense = vec![0u64; self.dim()];
                dense[self.slot_index(MelikianSheet::Vector, &vec![0, 0], i)] = 1;
                dense[self.slot_index(MelikianSheet::Vector, &e, i)] = 1;
                SparseVec::from_dense(f, &dense)
            })
            .collect()
    }
}

/// Components of one bracket value, kept as divided power elements until
/// they are scattered onto slots.
struct MelValue {
    v: [DpElement; 2],
    f: DpElement,
    t: [DpElement; 2],
}

impl MelValue {
    fn zero(o: &DpAlgebra) -> MelValue {
        MelValue { v: [o.zero(), o.zero()], f: o.zero(), t: [o.zero(), o.zero()] }
    }

    fn negate(mut self) -> MelValue {
        for c in self.v.iter_mut().chain(self.t.iter_mut()) {
            *c = c.neg();
        }
        self.f = self.f.neg();
        self
    }
}

fn melikian_pair(o: &DpAlgebra, x: &MelSlot, y: &MelSlot) -> MelValue {
    use MelikianSheet::*;
    let (sa, a, i) = x;
    let (sb, b, j) = y;
    if sa > sb {
        return melikian_pair(o, y, x).negate();
    }
    let f = o.field();
    let one = f.one_slice();
    let two = f.from_int(2);
    let xa = o.monomial(a, &one);
    let xb = o.monomial(b, &one);
    let mut out = MelValue::zero(o);
    match (sa, sb) {
        (Vector, Vector) => {
            out.v[*j] = xa.mul(&xb.partial_derivative(*i));
            out.v[*i] = out.v[*i].sub(&xb.mul(&xa.partial_derivative(*j)));
        }
        (Vector, Function) => {
            // D(f) - 2 div(D) f
            out.f = xa
                .mul(&xb.partial_derivative(*i))
                .sub(&xa.partial_derivative(*i).mul(&xb).scale(&two));
        }
        (Vector, Twisted) => {
            // the vector field bracket plus 2 div(D) times the argument
            out.t[*j] = xa
                .mul(&xb.partial_derivative(*i))
                .add(&xa.partial_derivative(*i).mul(&xb).scale(&two));
            out.t[*i] = out.t[*i].sub(&xb.mul(&xa.partial_derivative(*j)));
        }
        (Function, Function) => {
            // 2(f D_g - g D_f) where D_h sends d_1, d_2 to -h_2, h_1
            out.t[0] = xb
                .mul(&xa.partial_derivative(1))
                .sub(&xa.mul(&xb.partial_derivative(1)))
                .scale(&two);
            out.t[1] = xa
                .mul(&xb.partial_derivative(0))
                .sub(&xb.mul(&xa.partial_derivative(0)))
                .scale(&two);
        }
        (Function, Twisted) => {
            out.v[*j] = xa.mul(&xb);
        }
        (Twisted, Twisted) => {
            if *i == 0 && *j == 1 {
                out.f = xa.mul(&xb);
            } else if *i == 1 && *j == 0 {
                out.f = xa.mul(&xb).neg();
            }
        }
        _ => unreachable!("pairs are sheet ordered"),
    }
    out
}

pub fn build_melikian(n1: u32, n2: u32, p: u64) -> Result<MelikianAlgebra, ExceptionalError> {
    if p != 5 {
        return Err(ExceptionalError::WrongCharacteristic { expected: 5, got: p });
    }
    if n1 == 0 || n2 == 0 {
        return Err(ExceptionalError::Precondition("heights must be positive".into()));
    }
    let f = FieldTower::new(0).field_small_char(5, 1)?;
    let o = DpAlgebra::new(&f, vec![n1, n2]);

    use MelikianSheet::*;
    let total = |a: &MultiIndex| a.iter().map(|&e| e as i64).sum::<i64>();
    // Variable weights (1,2) give a depth two grading; the sheets carry
    // an extra shift of 0, -1, +1 so that all six bracket rules add up.
    let wdeg = |sheet: MelikianSheet, a: &MultiIndex, comp: usize| -> i64 {
        let w = a[0] as i64 + 2 * a[1] as i64;
        match sheet {
            Vector => w - [1, 2][comp],
            Function => w - 1,
            Twisted => w - [1, 2][comp] + 1,
        }
    };
    let edeg = |sheet: MelikianSheet, a: &MultiIndex| -> i64 {
        3 * total(a)
            + match sheet {
                Vector => -3,
                Function => -2,
                Twisted => -1,
            }
    };

    let mut slots: Vec<MelSlot> = Vec::new();
    for a in o.all_indices() {
        for comp in 0..2 {
            slots.push((Vector, a.clone(), comp));
            slots.push((Twisted, a.clone(), comp));
        }
        slots.push((Function, a.clone(), 0));
    }
    slots.sort_by_key(|(s, a, c)| (edeg(*s, a), *s, a.clone(), *c));
    let slot_of: HashMap<MelSlot, usize> =
        slots.iter().enumerate().map(|(t, s)| (s.clone(), t)).collect();
    let dim = slots.len();

    let labels: Vec<String> = slots
        .iter()
        .map(|(s, a, c)| match s {
            Vector => format!("{}D{}", mono_suffix(a), c + 1),
            Function => {
                if a.iter().all(|&e| e == 0) {
                    "1".to_string()
                } else {
                    mono_suffix(a)
                }
            }
            Twisted => format!("{}T{}", mono_suffix(a), c + 1),
        })
        .collect();

    let mut entries: StructureEntries = Vec::new();
    for ai in 0..dim {
        for bi in ai + 1..dim {
            let val = melikian_pair(&o, &slots[ai], &slots[bi]);
            let mut terms: Vec<(usize, Vec<u64>)> = Vec::new();
            let mut push = |sheet: MelikianSheet, comp: usize, el: &DpElement| {
                for (idx, c) in el.terms() {
                    terms.push((slot_of[&(sheet, idx.clone(), comp)], c.to_vec()));
                }
            };
            push(Vector, 0, &val.v[0]);
            push(Vector, 1, &val.v[1]);
            push(Function, 0, &val.f);
            push(Twisted, 0, &val.t[0]);
            push(Twisted, 1, &val.t[1]);
            if !terms.is_empty() {
                entries.push((ai, bi, terms));
            }
        }
    }

    let degrees: Vec<i64> = slots.iter().map(|(s, a, c)| wdeg(*s, a, *c)).collect();
    let z3: Vec<u8> = slots
        .iter()
        .map(|(s, _, _)| match s {
            Vector => 0,
            Function => 1,
            Twisted => 2,
        })
        .collect();
    let ermolaev: Vec<i64> = slots.iter().map(|(s, a, _)| edeg(*s, a)).collect();

    let algebra = LieAlgebra::from_structure_constants(&f, labels, entries, validation_for(dim))?
        .with_grading(degrees)?;
    Ok(MelikianAlgebra { algebra, functions: o, slots, z3, ermolaev, slot_of })
}

pub struct MelikianTorusReport {
    pub t0: SubspaceBasis,
    pub h: SubspaceBasis,
    pub self_normalizing: bool,
    pub nonabelian: bool,
    pub double_bracket_is_t0: bool,
    pub witness_toral: bool,
    pub triangulable: bool,
}

/// Structure of the centralizer of the torus spanned by (1+x_i)d_i.  Its
/// double derived space is the torus itself, so the centralizer is a
/// nonabelian Cartan subalgebra that no change of basis can triangulate.
pub fn melikian_torus_analysis(m: &MelikianAlgebra) -> Result<MelikianTorusReport, ExceptionalError> {
    let l = &m.algebra;
    let f = l.field();
    let n = l.dim();
    let gens = m.standard_torus_rows();
    let t0 = SubspaceBasis::from_vectors(f, n, gens.iter().cloned());
    let h = l.centralizer(&t0);
    let hh = l.bracket_spaces(&h, &h);
    let hhh = l.bracket_spaces(&h, &hh);
    let witness_toral = is_toral_element(l, &gens[0].to_dense(f, n))?;
    let mut triangulable = true;
    for row in &hhh.rows {
        if !is_nilpotent_matrix(&l.ad_matrix(&row.to_dense(f, n)))? {
            triangulable = false;
        }
    }
    Ok(MelikianTorusReport {
        self_normalizing: l.normalizer(&h).equals(&h),
        nonabelian: hh.dim() > 0,
        double_bracket_is_t0: hhh.equals(&t0),
        witness_toral,
        triangulable,
        t0,
        h,
    })
}

/// The sheets of a Brown algebra before the central quotient: vector
/// fields, functions, and an odd copy of the functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum BrownSheet {
    Vector,
    Function,
    Odd,
}

pub struct BrownAlgebra {
    /// The simple quotient: derived algebra of parent over its centre.
    pub algebra: LieAlgebra,
    pub parent: LieAlgebra,
    pub center: SubspaceBasis,
}

pub fn build_brown_g2(n1: u32, n2: u32, p: u64) -> Result<BrownAlgebra, ExceptionalError> {
    if p != 2 {
        return Err(ExceptionalError::WrongCharacteristic { expected: 2, got: p });
    }
    if n1 == 0 || n2 == 0 {
        return Err(ExceptionalError::Precondition("heights must be positive".into()));
    }
    let f = FieldTower::new(0).field_small_char(2, 1)?;
    let o = DpAlgebra::new(&f, vec![n1, n2]);
    use BrownSheet::*;

    let total = |a: &MultiIndex| a.iter().map(|&e| e as i64).sum::<i64>();
    let deg = |sheet: BrownSheet, a: &MultiIndex| -> i64 {
        3 * total(a)
            + match sheet {
                Vector => -3,
                Function => -4,
                Odd => -2,
            }
    };

    type Slot = (BrownSheet, MultiIndex, usize);
    let mut slots: Vec<Slot> = Vec::new();
    for a in o.all_indices() {
        for comp in 0..2 {
            slots.push((Vector, a.clone(), comp));
        }
        slots.push((Function, a.clone(), 0));
        slots.push((Odd, a.clone(), 0));
    }
    slots.sort_by_key(|(s, a, c)| (deg(*s, a), *s, a.clone(), *c));
    let slot_of: HashMap<Slot, usize> =
        slots.iter().enumerate().map(|(t, s)| (s.clone(), t)).collect();
    let dim = slots.len();
    let labels: Vec<String> = slots
        .iter()
        .map(|(s, a, c)| match s {
            Vector => format!("{}D{}", mono_suffix(a), c + 1),
            Function => {
                if a.iter().all(|&e| e == 0) {
                    "1".to_string()
                } else {
                    mono_suffix(a)
                }
            }
            Odd => format!("{}u", mono_suffix(a)),
        })
        .collect();

    let one = f.one_slice();
    let pair = |x: &Slot, y: &Slot| -> Vec<(BrownSheet, usize, DpElement)> {
        let (sa, a, i) = x;
        let (sb, b, j) = y;
        let xa = o.monomial(a, &one);
        let xb = o.monomial(b, &one);
        match (sa, sb) {
            (Vector, Vector) => {
                let t1 = xa.mul(&xb.partial_derivative(*i));
                let t2 = xb.mul(&xa.partial_derivative(*j));
                if i == j {
                    vec![(Vector, *i, t1.sub(&t2))]
                } else {
                    vec![(Vector, *j, t1), (Vector, *i, t2.neg())]
                }
            }
            (Vector, Function) => vec![(Function, 0, xa.mul(&xb.partial_derivative(*i)))],
            // [D, gu] = div(gD) u
            (Vector, Odd) => vec![(Odd, 0, xa.mul(&xb).partial_derivative(*i))],
            // [f, g] = (d_1(g) d_2(f) - d_2(g) d_1(f)) u
            (Function, Function) => vec![(
                Odd,
                0,
                xb.partial_derivative(0)
                    .mul(&xa.partial_derivative(1))
                    .sub(&xb.partial_derivative(1).mul(&xa.partial_derivative(0))),
            )],
            // [fu, g] = f D_g, the hamiltonian field of g scaled by f
            (Function, Odd) => vec![
                (Vector, 0, xb.mul(&xa.partial_derivative(1)).neg()),
                (Vector, 1, xb.mul(&xa.partial_derivative(0))),
            ],
            (Odd, Odd) => vec![],
            _ => unreachable!("pairs are sheet ordered"),
        }
    };

    let mut entries: StructureEntries = Vec::new();
    for ai in 0..dim {
        for bi in ai + 1..dim {
            let (x, y) = (&slots[ai], &slots[bi]);
            let flip = x.0 > y.0;
            let parts = if flip { pair(y, x) } else { pair(x, y) };
            let mut terms: Vec<(usize, Vec<u64>)> = Vec::new();
            for (sheet, comp, el) in parts {
                let el = if flip { el.neg() } else { el };
                for (idx, c) in el.terms() {
                    terms.push((slot_of[&(sheet, idx.clone(), comp)], c.to_vec()));
                }
            }
            if !terms.is_empty() {
                entries.push((ai, bi, terms));
            }
        }
    }

    let degrees: Vec<i64> = slots.iter().map(|(s, a, _)| deg(*s, a)).collect();
    let parent = LieAlgebra::from_structure_constants(&f, labels, entries, validation_for(dim))?
        .with_grading(degrees.clone())?;

    let z = parent.center();
    let (q, qmap) = parent.quotient(&z)?;
    let qdeg: Vec<i64> = qmap.complement.iter().map(|&c| degrees[c]).collect();
    let q = q.with_grading(qdeg.clone())?;
    let der = q.derived_subspace();
    let algebra = if der.dim() == q.dim() {
        q
    } else {
        let mut ddeg = Vec::with_capacity(der.dim());
        for (row, &pv) in der.rows.iter().zip(&der.pivots) {
            let d = qdeg[pv as usize];
            if row.idx.iter().any(|&t| qdeg[t as usize] != d) {
                return Err(ExceptionalError::Verification("derived algebra is not graded".into()));
            }
            ddeg.push(d);
        }
        q.induced_algebra(&der)?.with_grading(ddeg)?
    };
    Ok(BrownAlgebra { algebra, parent, center: z })
}

/// Matrix realizations of the small classical families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Gl,
    Sl,
    Pgl,
    Psl,
}

pub fn build_matrix_classical(
    kind: MatrixKind,
    n: usize,
    p: u64,
) -> Result<LieAlgebra, ExceptionalError> {
    if n < 2 {
        return Err(ExceptionalError::Precondition("matrices must be at least 2 by 2".into()));
    }
    let f = FieldTower::new(0).field_small_char(p, 1)?;
    let slot = |i: usize, j: usize| i * n + j;
    let labels: Vec<String> =
        (0..n).flat_map(|i| (0..n).map(move |j| format!("E({},{})", i + 1, j + 1))).collect();
    let mut entries: StructureEntries = Vec::new();
    for a in 0..n * n {
        let (i, j) = (a / n, a % n);
        for b in a + 1..n * n {
            let (k, l) = (b / n, b % n);
            let mut terms: Vec<(usize, i64)> = Vec::new();
            if j == k {
                terms.push((slot(i, l), 1));
            }
            if l == i {
                terms.push((slot(k, j), -1));
            }
            let terms: Vec<(usize, Vec<u64>)> =
                terms.into_iter().map(|(t, c)| (t, f.from_int(c))).collect();
            if !terms.is_empty() {
                entries.push((a, b, terms));
            }
        }
    }
    let gl = LieAlgebra::from_structure_constants(&f, labels, entries, validation_for(n * n))?;
    let traceless = || {
        let mut rows: Vec<SparseVec> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rows.push(SparseVec::unit(&f, slot(i, j)));
                }
            }
        }
        for i in 0..n - 1 {
            let mut dense = vec![0u64; n * n];
            dense[slot(i, i)] = 1;
            dense[slot(i + 1, i + 1)] = f.from_int(-1)[0];
            rows.push(SparseVec::from_dense(&f, &dense));
        }
        SubspaceBasis::from_vectors(&f, n * n, rows)
    };
    match kind {
        MatrixKind::Gl => Ok(gl),
        MatrixKind::Sl => Ok(gl.induced_algebra(&traceless())?),
        MatrixKind::Pgl => {
            let z = gl.center();
            Ok(gl.quotient(&z)?.0)
        }
        MatrixKind::Psl => {
            let sl = gl.induced_algebra(&traceless())?;
            let z = sl.center();
            if z.dim() == 0 {
                Ok(sl)
            } else {
                Ok(sl.quotient(&z)?.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::restricted::is_restrictable;

    #[test]
    fn melikian_at_the_smallest_heights() {
        let m = build_melikian(1, 1, 5).unwrap();
        let l = &m.algebra;
        assert_eq!(l.dim(), 125);
        assert_eq!(m.z3_component(0).dim(), 50);
        assert_eq!(m.z3_component(1).dim(), 25);
        assert_eq!(m.z3_component(2).dim(), 50);
        // Sheet classes add mod 3 across the whole table.
        for a in 0..125 {
            for b in a + 1..125 {
                let target = (m.z3[a] + m.z3[b]) % 3;
                for &t in &l.bracket_basis(a, b).idx {
                    assert_eq!(m.z3[t as usize], target);
                }
            }
        }
        let g = l.grading().unwrap();
        assert_eq!(*g.degrees.iter().min().unwrap(), -2);
        assert_eq!(g.degrees.iter().filter(|&&d| d == -2).count(), 1);
        let e = m.ermolaev_grading().unwrap();
        assert_eq!(*e.degrees.iter().min().unwrap(), -3);
        assert_eq!(e.degrees.iter().filter(|&&d| d == -3).count(), 2);
        assert!(matches!(build_melikian(1, 1, 7), Err(ExceptionalError::WrongCharacteristic { .. })));
    }

    #[test]
    fn melikian_is_simple_and_restricted_only_at_height_one() {
        let m = build_melikian(1, 1, 5).unwrap();
        assert!(m.algebra.is_simple(11));
        assert!(is_restrictable(&m.algebra));
        let tall = build_melikian(1, 2, 5).unwrap();
        assert_eq!(tall.algebra.dim(), 625);
        assert!(!is_restrictable(&tall.algebra));
    }

    #[test]
    fn torus_centralizer_is_a_nonabelian_cartan_subalgebra() {
        let m = build_melikian(1, 1, 5).unwrap();
        let r = melikian_torus_analysis(&m).unwrap();
        assert_eq!(r.t0.dim(), 2);
        assert_eq!(r.h.dim(), 5);
        assert!(r.self_normalizing);
        assert!(r.nonabelian);
        assert!(r.double_bracket_is_t0);
        assert!(r.witness_toral);
        assert!(!r.triangulable);
    }

    #[test]
    fn degree_one_components_generate_a_fourteen_dimensional_core() {
        let m = build_melikian(1, 1, 5).unwrap();
        let (core, rows) = m.g2_core().unwrap();
        assert_eq!(core.dim(), 14);
        assert!(core.is_simple(5));
        let mut byd: HashMap<i64, usize> = HashMap::new();
        for &pv in &rows.pivots {
            *byd.entry(m.ermolaev[pv as usize]).or_insert(0) += 1;
        }
        let pattern: Vec<usize> = (-3..=3).map(|d| byd[&d]).collect();
        assert_eq!(pattern, vec![2, 1, 2, 4, 2, 1, 2]);
    }

    #[test]
    fn brown_parent_collapses_to_a_fourteen_dimensional_simple_quotient() {
        let b = build_brown_g2(1, 1, 2).unwrap();
        assert_eq!(b.parent.dim(), 16);
        assert_eq!(b.center.dim(), 1);
        assert_eq!(b.algebra.dim(), 14);
        // The centre sits in the bottom degree of the parent grading.
        let pg = b.parent.grading().unwrap();
        let f = b.parent.field();
        let bottom: Vec<usize> =
            (0..16).filter(|&t| pg.degrees[t] == -4).collect();
        assert_eq!(bottom.len(), 1);
        assert!(b.center.contains(&SparseVec::unit(f, bottom[0])));
        // Same layer pattern as the characteristic five core.
        let g = b.algebra.grading().unwrap();
        let pattern: Vec<usize> =
            (-3..=3).map(|d| g.degrees.iter().filter(|&&x| x == d).count()).collect();
        assert_eq!(pattern, vec![2, 1, 2, 4, 2, 1, 2]);
        assert!(matches!(build_brown_g2(1, 1, 5), Err(ExceptionalError::WrongCharacteristic { .. })));
    }

    #[test]
    fn brown_zero_square_and_linear_action() {
        let b = build_brown_g2(1, 1, 2).unwrap();
        let l = &b.algebra;
        let f = l.field();
        let n = l.dim();
        // Squares vanish identically, checked on all two-term sums.
        for i in 0..n {
            assert!(l.bracket_basis(i, i).is_zero());
            for j in i + 1..n {
                let mut x = vec![0u64; n];
                x[i] = 1;
                x[j] = 1;
                assert!(f.is_zero_slice(&l.bracket_dense(&x, &x)));
            }
        }
        // The degree zero layer acts faithfully on the degree minus one
        // layer and fills all of its endomorphisms.
        let g = l.grading().unwrap();
        let zero: Vec<usize> = (0..n).filter(|&t| g.degrees[t] == 0).collect();
        let minus: Vec<usize> = (0..n).filter(|&t| g.degrees[t] == -1).collect();
        assert_eq!((zero.len(), minus.len()), (4, 2));
        let mats: Vec<Vec<u64>> = zero
            .iter()
            .map(|&z| {
                let mut flat = Vec::new();
                for &s in &minus {
                    let br = l.bracket_basis(z, s).to_dense(f, n);
                    for &t in &minus {
                        flat.push(br[t]);
                    }
                }
                flat
            })
            .collect();
        assert_eq!(SubspaceBasis::from_dense_vectors(f, 4, &mats).dim(), 4);
    }

    #[test]
    fn brown_dimension_formula_holds_at_taller_heights() {
        let b = build_brown_g2(2, 1, 2).unwrap();
        assert_eq!(b.algebra.dim(), 30);
        assert_eq!(b.parent.dim(), 32);
    }

    #[test]
    fn matrix_families_split_as_expected() {
        let gl2 = build_matrix_classical(MatrixKind::Gl, 2, 5).unwrap();
        assert_eq!(gl2.dim(), 4);
        assert_eq!(gl2.center().dim(), 1);
        assert!(!gl2.is_simple(1));
        let sl5 = build_matrix_classical(MatrixKind::Sl, 5, 5).unwrap();
        assert_eq!(sl5.dim(), 24);
        assert_eq!(sl5.center().dim(), 1);
        assert_eq!(sl5.derived_subspace().dim(), 24);
        assert!(!sl5.is_simple(2));
        let pgl5 = build_matrix_classical(MatrixKind::Pgl, 5, 5).unwrap();
        assert_eq!(pgl5.dim(), 24);
        assert_eq!(pgl5.center().dim(), 0);
        assert_eq!(pgl5.derived_subspace().dim(), 23);
        let psl5 = build_matrix_classical(MatrixKind::Psl, 5, 5).unwrap();
        assert_eq!(psl5.dim(), 23);
        assert!(psl5.is_simple(4));
        let psl3 = build_matrix_classical(MatrixKind::Psl, 3, 5).unwrap();
        assert_eq!(psl3.dim(), 8);
        assert!(psl3.is_simple(6));
    }
}
