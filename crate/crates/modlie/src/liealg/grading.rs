//! Gradings, descending filtrations, associated graded algebras, and
//! the transitivity conditions used by the structure checks.
//!
//! Filtration indices follow the descending convention: L_(i+1) ⊆ L_(i),
//! L_(lo) = L, and the first index past `hi` is zero.  The transversal
//! of L_(i+1) in L_(i) is read off echelon forms: pivots of the smaller
//! space are a subset of pivots of the larger, so the rows of RREF(L_(i))
//! with pivots outside RREF(L_(i+1)) represent a basis of the quotient,
//! and class coordinates are literal entries at those pivots after
//! reduction.

use super::{LieAlgebra, LieError, StructureEntries, Validation};
use crate::linalg::{meataxe::module_irreducible, nullspace, Matrix, SparseVec, SubspaceBasis};

/// Basis-aligned grading: basis vector i is homogeneous of degree
/// `degrees[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grading {
    pub degrees: Vec<i64>,
}

impl Grading {
    /// Validates [G_a, G_b] ⊆ G_{a+b} against the bracket table.
    pub fn new(l: &LieAlgebra, degrees: Vec<i64>) -> Result<Grading, LieError> {
        let n = l.dim();
        if degrees.len() != n {
            return Err(LieError::BadCoordinates(degrees.len(), n));
        }
        for i in 0..n {
            for j in i + 1..n {
                let v = l.bracket_basis(i, j);
                for &t in &v.idx {
                    if degrees[t as usize] != degrees[i] + degrees[j] {
                        return Err(LieError::PreconditionFailed(format!(
                            "bracket of degrees {} and {} has a component of degree {}",
                            degrees[i], degrees[j], degrees[t as usize]
                        )));
                    }
                }
            }
        }
        Ok(Grading { degrees })
    }

    pub fn component_indices(&self, d: i64) -> Vec<usize> {
        (0..self.degrees.len()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn component(&self, l: &LieAlgebra, d: i64) -> SubspaceBasis {
        let f = l.field();
        let rows: Vec<SparseVec> =
            self.component_indices(d).into_iter().map(|i| SparseVec::unit(f, i)).collect();
        SubspaceBasis::from_vectors(f, l.dim(), rows)
    }

    /// Sorted list of degrees with nonzero component.
    pub fn support(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.degrees.clone();
        ds.sort_unstable();
        ds.dedup();
        ds
    }
}

/// Descending filtration; `levels[t]` is L_(lo + t), `levels[0]` the
/// whole algebra, and L_(hi + 1) = 0.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub lo: i64,
    pub levels: Vec<SubspaceBasis>,
}

impl Filtration {
    pub fn hi(&self) -> i64 {
        self.lo + self.levels.len() as i64 - 1
    }

    /// Depth s' when lo = -s'.
    pub fn depth(&self) -> i64 {
        -self.lo
    }

    pub fn space_at(&self, i: i64) -> SubspaceBasis {
        if i <= self.lo {
            self.levels[0].clone()
        } else if i > self.hi() {
            let f = &self.levels[0].f;
            SubspaceBasis::zero(f, self.levels[0].ambient)
        } else {
            self.levels[(i - self.lo) as usize].clone()
        }
    }

    /// Containment, exhaustion, separation, and bracket compatibility.
    pub fn validate(&self, l: &LieAlgebra) -> Result<(), LieError> {
        let n = l.dim();
        if self.levels.is_empty() || self.levels[0].dim() != n {
            return Err(LieError::PreconditionFailed(
                "filtration must start at the whole algebra".into(),
            ));
        }
        if self.levels.last().unwrap().dim() == 0 {
            return Err(LieError::PreconditionFailed(
                "trailing zero level is implicit; drop it".into(),
            ));
        }
        for t in 1..self.levels.len() {
            if !self.levels[t - 1].contains_subspace(&self.levels[t]) {
                return Err(LieError::PreconditionFailed(format!(
                    "level {} is not contained in level {}",
                    self.lo + t as i64,
                    self.lo + t as i64 - 1
                )));
            }
        }
        for i in self.lo..=self.hi() {
            for j in i..=self.hi() {
                let br = l.bracket_spaces(&self.space_at(i), &self.space_at(j));
                if !self.space_at(i + j).contains_subspace(&br) {
                    return Err(LieError::PreconditionFailed(format!(
                        "[L_({}), L_({})] is not inside L_({})",
                        i,
                        j,
                        i + j
                    )));
                }
            }
        }
        Ok(())
    }

    /// L_(i) = span of components of degree ≥ i.
    pub fn from_grading(l: &LieAlgebra) -> Result<Filtration, LieError> {
        let g = l
            .grading()
            .ok_or_else(|| LieError::PreconditionFailed("no grading attached".into()))?;
        let f = l.field();
        let n = l.dim();
        if n == 0 {
            return Err(LieError::PreconditionFailed("zero algebra has no filtration".into()));
        }
        let support = g.support();
        let (lo, hi) = (support[0], *support.last().unwrap());
        let mut levels = Vec::new();
        for i in lo..=hi {
            let rows: Vec<SparseVec> = (0..n)
                .filter(|&b| g.degrees[b] >= i)
                .map(|b| SparseVec::unit(f, b))
                .collect();
            levels.push(SubspaceBasis::from_vectors(f, n, rows));
        }
        Ok(Filtration { lo, levels })
    }
}

/// Associated graded algebra of a filtration, with representatives of
/// each graded basis vector in the original algebra.
pub struct GradedAlgebra {
    pub algebra: LieAlgebra,
    pub filtration: Filtration,
    /// Degree and representative (in parent coordinates) per basis slot.
    pub reps: Vec<(i64, SparseVec)>,
    /// Ambient pivot column used for each slot's class coordinate.
    pivots: Vec<usize>,
}

impl GradedAlgebra {
    pub fn degree_of(&self, slot: usize) -> i64 {
        self.reps[slot].0
    }

    pub fn component_slots(&self, d: i64) -> Vec<usize> {
        (0..self.reps.len()).filter(|&s| self.reps[s].0 == d).collect()
    }

    pub fn component(&self, d: i64) -> SubspaceBasis {
        let f = self.algebra.field();
        let rows: Vec<SparseVec> =
            self.component_slots(d).into_iter().map(|s| SparseVec::unit(f, s)).collect();
        SubspaceBasis::from_vectors(f, self.algebra.dim(), rows)
    }

    /// Class of x ∈ L_(t) in G_t, on the slots of degree t; None when x
    /// is not in L_(t).
    pub fn class_in_degree(&self, t: i64, x: &[u64]) -> Option<Vec<u64>> {
        let f = self.algebra.field();
        let k = f.k();
        let parent_dim = self.filtration.levels[0].ambient;
        if !self.filtration.space_at(t).contains_dense(x) {
            return None;
        }
        let below = self.filtration.space_at(t + 1).to_echelon();
        let red = below.reduce(&SparseVec::from_dense(f, x)).to_dense(f, parent_dim);
        let slots = self.component_slots(t);
        let mut out = vec![0u64; slots.len() * k];
        for (q, &s) in slots.iter().enumerate() {
            let c = self.pivots[s];
            out[q * k..(q + 1) * k].copy_from_slice(&red[c * k..(c + 1) * k]);
        }
        Some(out)
    }
}

/// Builds gr L = ⊕ L_(i)/L_(i+1) with the bracket induced on classes.
pub fn associated_graded(l: &LieAlgebra, filt: &Filtration) -> Result<GradedAlgebra, LieError> {
    filt.validate(l)?;
    let f = l.field();
    let n = l.dim();
    let k = f.k();
    // Transversal rows per level with their pivots.
    let mut reps: Vec<(i64, SparseVec)> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for i in filt.lo..=filt.hi() {
        let here = filt.space_at(i);
        let below = filt.space_at(i + 1);
        for (r, &pv) in here.rows.iter().zip(&here.pivots) {
            if !below.pivots.contains(&pv) {
                reps.push((i, r.clone()));
                pivots.push(pv as usize);
            }
        }
    }
    let d = reps.len();
    debug_assert_eq!(d, n, "graded components tile the algebra");
    // Slot coordinates of the class of z in degree t.
    let class_coords = |t: i64, z: &SparseVec| -> Vec<u64> {
        let mut out = vec![0u64; d * k];
        if t > filt.hi() {
            debug_assert!(z.is_zero());
            return out;
        }
        let below = filt.space_at(t + 1).to_echelon();
        let red = below.reduce(z).to_dense(f, n);
        for s in 0..d {
            if reps[s].0 == t {
                let c = pivots[s];
                out[s * k..(s + 1) * k].copy_from_slice(&red[c * k..(c + 1) * k]);
            }
        }
        out
    };
    let mut entries: StructureEntries = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let t = reps[a].0 + reps[b].0;
            let z = l.bracket_sparse(&reps[a].1, &reps[b].1);
            let coords = class_coords(t, &z);
            let terms: Vec<(usize, Vec<u64>)> = (0..d)
                .filter_map(|s| {
                    let c = coords[s * k..(s + 1) * k].to_vec();
                    if f.is_zero_slice(&c) {
                        None
                    } else {
                        Some((s, c))
                    }
                })
                .collect();
            if !terms.is_empty() {
                entries.push((a, b, terms));
            }
        }
    }
    let labels = (0..d).map(|s| format!("gr{}#{}", reps[s].0, s)).collect();
    let validation = if d <= 64 {
        Validation::Full
    } else {
        Validation::SpotCheck { seed: 0x6772, samples: 400 }
    };
    let algebra = LieAlgebra::from_structure_constants(f, labels, entries, validation)?
        .with_grading(reps.iter().map(|(deg, _)| *deg).collect())?;
    Ok(GradedAlgebra { algebra, filtration: filt.clone(), reps, pivots })
}

/// Report from [`standard_filtration`] preconditions.
const PRE_SUBALGEBRA: &str = "the chosen zero level is not a subalgebra";
const PRE_PROPER: &str = "the zero level must be a proper subspace of the minus-one level";
const PRE_STABLE: &str = "the minus-one level is not stable under the zero level";
const PRE_IRREDUCIBLE: &str = "the minus-one quotient is not an irreducible module";
const PRE_EXHAUST: &str = "the minus-one level does not generate the whole algebra";
const PRE_SEPARATE: &str = "the zero level contains a nonzero ideal, the filtration does not separate";

/// Standard filtration from a maximal subalgebra L_(0) and an invariant
/// generating subspace L_(-1): downward by L_(-i-1) = [L_(-i), L_(-1)] +
/// L_(-i), upward by L_(i+1) = {x ∈ L_(i) : [x, L_(-1)] ⊆ L_(i)}.
pub fn standard_filtration(
    l: &LieAlgebra,
    l0: &SubspaceBasis,
    lm1: &SubspaceBasis,
) -> Result<Filtration, LieError> {
    let f = l.field();
    let n = l.dim();
    let pre = |msg: &str| LieError::PreconditionFailed(msg.to_string());
    if !l0.contains_subspace(&l.bracket_spaces(l0, l0)) {
        return Err(pre(PRE_SUBALGEBRA));
    }
    if !lm1.contains_subspace(l0) || l0.dim() >= lm1.dim() {
        return Err(pre(PRE_PROPER));
    }
    if !lm1.contains_subspace(&l.bracket_spaces(l0, lm1)) {
        return Err(pre(PRE_STABLE));
    }
    // Quotient module lm1/l0 under l0 must be irreducible (this implies
    // maximality of l0 in the subalgebra generated by lm1).
    {
        let k = f.k();
        let le = l0.to_echelon();
        let mut trans: Vec<&SparseVec> = Vec::new();
        let mut tpiv: Vec<usize> = Vec::new();
        for (r, &pv) in lm1.rows.iter().zip(&lm1.pivots) {
            if !l0.pivots.contains(&pv) {
                trans.push(r);
                tpiv.push(pv as usize);
            }
        }
        let m = trans.len();
        let class = |z: &SparseVec| -> Vec<u64> {
            let red = le.reduce(z).to_dense(f, n);
            let mut out = vec![0u64; m * k];
            for (q, &c) in tpiv.iter().enumerate() {
                out[q * k..(q + 1) * k].copy_from_slice(&red[c * k..(c + 1) * k]);
            }
            out
        };
        let mut gens = Vec::with_capacity(l0.dim());
        for h in &l0.rows {
            let mut mat = Matrix::zero(f, m, m);
            for (col, v) in trans.iter().enumerate() {
                let img = class(&l.bracket_sparse(h, v));
                for row in 0..m {
                    let c = &img[row * k..(row + 1) * k];
                    if !f.is_zero_slice(c) {
                        mat.set_entry(row, col, c);
                    }
                }
            }
            gens.push(mat);
        }
        if !module_irreducible(f, m, &gens, 0x7374_6466).is_irreducible() {
            return Err(pre(PRE_IRREDUCIBLE));
        }
    }
    // Downward closure.
    let mut neg: Vec<SubspaceBasis> = vec![lm1.clone()];
    loop {
        let last = neg.last().unwrap();
        let next = last.sum(&l.bracket_spaces(last, lm1));
        if next.dim() == last.dim() {
            break;
        }
        neg.push(next);
    }
    if neg.last().unwrap().dim() != n {
        return Err(pre(PRE_EXHAUST));
    }
    // Upward: L_(i+1) = {x ∈ L_(i) : [x, lm1] ⊆ L_(i)}.
    let mut pos: Vec<SubspaceBasis> = vec![l0.clone()];
    loop {
        let last = pos.last().unwrap();
        let next = last.intersect(&l.stabilizer_rows(lm1, last));
        if next.dim() == 0 {
            break;
        }
        if next.dim() == last.dim() {
            return Err(pre(PRE_SEPARATE));
        }
        pos.push(next);
    }
    let lo = -(neg.len() as i64);
    let mut levels: Vec<SubspaceBasis> = neg.into_iter().rev().collect();
    levels.extend(pos);
    while levels.last().map_or(false, |s| s.dim() == 0) {
        levels.pop();
    }
    let filt = Filtration { lo, levels };
    filt.validate(l)?;
    Ok(filt)
}

/// Largest ideal of the graded algebra inside ⊕_{i ≤ -2} G_i, by
/// shrinking V ← {v ∈ V : [G, v] ⊆ V} from the full deep part.
pub fn weisfeiler_ideal(gr: &GradedAlgebra) -> SubspaceBasis {
    let g = &gr.algebra;
    let f = g.field();
    let whole = SubspaceBasis::whole(f, g.dim());
    let mut v = {
        let mut acc = SubspaceBasis::zero(f, g.dim());
        for d in gr.filtration.lo..=-2 {
            acc = acc.sum(&gr.component(d));
        }
        acc
    };
    loop {
        if v.dim() == 0 {
            return v;
        }
        let stab = g.stabilizer_rows(&whole, &v);
        let next = v.intersect(&stab);
        if next.dim() == v.dim() {
            // Fixed point: [G, V] ⊆ V, and V sits inside the deep part.
            debug_assert!(v.contains_subspace(&g.bracket_spaces(&whole, &v)));
            return v;
        }
        v = next;
    }
}

/// The four transitivity/generation conditions of a graded algebra
/// G = ⊕_{i ≥ -depth} G_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedConditions {
    /// G_{-1} is an irreducible G_0-module.
    pub g1_irreducible: bool,
    /// G_0 acts faithfully on G_{-1}.
    pub g1_faithful: bool,
    /// G_{-i} = [G_{-i+1}, G_{-1}] for all i ≥ 1.
    pub g2_generated: bool,
    /// x ∈ G_i, i > 0, [x, G_{-1}] = 0 forces x = 0.
    pub g3_transitive: bool,
    /// x ∈ G_{-i}, i > 0, [x, G_k] = 0 for all k > 0 forces x = 0.
    pub g4_cotransitive: bool,
}

impl GradedConditions {
    pub fn all_of_g1_g2_g3(&self) -> bool {
        self.g1_irreducible && self.g1_faithful && self.g2_generated && self.g3_transitive
    }
}

pub fn check_graded_conditions(gr: &GradedAlgebra) -> GradedConditions {
    let g = &gr.algebra;
    let f = g.field();
    let n = g.dim();
    let k = f.k();
    let lo = gr.filtration.lo;
    let hi = gr.filtration.hi();
    let gm1 = gr.component(-1);
    let g0 = gr.component(0);
    // (g1): restrict ad(G_0) to G_{-1}; component bases are unit vectors,
    // so restriction is a literal submatrix.
    let m = gm1.dim();
    let slots_m1 = gr.component_slots(-1);
    let mut faithful_rows: Vec<SparseVec> = Vec::new();
    let mut gens: Vec<Matrix> = Vec::new();
    for h in &g0.rows {
        let ad = g.ad_matrix(&h.to_dense(f, n));
        let mut mat = Matrix::zero(f, m, m);
        for (col, &cs) in slots_m1.iter().enumerate() {
            for (row, &rs) in slots_m1.iter().enumerate() {
                if let Some(c) = ad.rs[rs].coeff(f, cs) {
                    mat.set_entry(row, col, c);
                }
            }
        }
        gens.push(mat);
    }
    // Faithfulness: coefficients are linear in the G_0 coordinates, so
    // kernel elements of the action are a nullspace over the g0 basis.
    let d0 = g0.dim();
    if d0 > 0 {
        for col in 0..m {
            for row in 0..m {
                let mut cvec = vec![0u64; d0 * k];
                for (gidx, mat) in gens.iter().enumerate() {
                    if let Some(c) = mat.rs[row].coeff(f, col) {
                        cvec[gidx * k..(gidx + 1) * k].copy_from_slice(c);
                    }
                }
                let sv = SparseVec::from_dense(f, &cvec);
                if !sv.is_zero() {
                    faithful_rows.push(sv);
                }
            }
        }
    }
    let g1_irreducible = m > 0 && module_irreducible(f, m, &gens, 0x6731).is_irreducible();
    let g1_faithful = if d0 == 0 {
        true
    } else if faithful_rows.is_empty() {
        false
    } else {
        nullspace(&Matrix::from_sparse_rows(f, d0, faithful_rows)).dim() == 0
    };
    // (g2).
    let mut g2_generated = true;
    for i in 1..=(-lo) {
        let target = gr.component(-i);
        let got = g.bracket_spaces(&gr.component(-i + 1), &gm1);
        if !got.equals(&target) {
            g2_generated = false;
            break;
        }
    }
    // (g3): per positive degree, kernel of bracketing with G_{-1}.
    let mut g3_transitive = true;
    'outer: for i in 1..=hi {
        let gi = gr.component(i);
        if gi.dim() == 0 {
            continue;
        }
        let di = gi.dim();
        let mut rows: Vec<SparseVec> = Vec::new();
        // x = sum c_s (slot s); [x, y] for each y in G_{-1} basis; each
        // ambient output coordinate gives a row over the c_s.
        let slots_i = gr.component_slots(i);
        for y in &gm1.rows {
            let mut cols: Vec<SparseVec> = Vec::new();
            for &s in &slots_i {
                cols.push(g.bracket_sparse(&SparseVec::unit(f, s), y));
            }
            for amb in 0..n {
                let mut rvec = vec![0u64; di * k];
                let mut nz = false;
                for (q, col) in cols.iter().enumerate() {
                    if let Some(c) = col.coeff(f, amb) {
                        rvec[q * k..(q + 1) * k].copy_from_slice(c);
                        nz = true;
                    }
                }
                if nz {
                    rows.push(SparseVec::from_dense(f, &rvec));
                }
            }
        }
        let kerdim = if rows.is_empty() {
            di
        } else {
            nullspace(&Matrix::from_sparse_rows(f, di, rows)).dim()
        };
        if kerdim > 0 {
            g3_transitive = false;
            break 'outer;
        }
    }
    // (g4): same with negative degrees against all positive components.
    let mut g4_cotransitive = true;
    let pos_rows: Vec<SparseVec> = (1..=hi)
        .flat_map(|d| gr.component(d).rows)
        .collect();
    'outer4: for i in 1..=(-lo) {
        let gi = gr.component(-i);
        if gi.dim() == 0 {
            continue;
        }
        let di = gi.dim();
        let slots_i = gr.component_slots(-i);
        let mut rows: Vec<SparseVec> = Vec::new();
        for y in &pos_rows {
            let mut cols: Vec<SparseVec> = Vec::new();
            for &s in &slots_i {
                cols.push(g.bracket_sparse(&SparseVec::unit(f, s), y));
            }
            for amb in 0..n {
                let mut rvec = vec![0u64; di * k];
                let mut nz = false;
                for (q, col) in cols.iter().enumerate() {
                    if let Some(c) = col.coeff(f, amb) {
                        rvec[q * k..(q + 1) * k].copy_from_slice(c);
                        nz = true;
                    }
                }
                if nz {
                    rows.push(SparseVec::from_dense(f, &rvec));
                }
            }
        }
        let kerdim = if rows.is_empty() {
            di
        } else {
            nullspace(&Matrix::from_sparse_rows(f, di, rows)).dim()
        };
        if kerdim > 0 {
            g4_cotransitive = false;
            break 'outer4;
        }
    }
    GradedConditions { g1_irreducible, g1_faithful, g2_generated, g3_transitive, g4_cotransitive }
}

/// Subalgebra generated by the non-negative part of the grading; a
/// convenience for building zero levels.
pub fn nonnegative_part(l: &LieAlgebra) -> Option<SubspaceBasis> {
    let g = l.grading()?;
    let f = l.field();
    let rows: Vec<SparseVec> = (0..l.dim())
        .filter(|&i| g.degrees[i] >= 0)
        .map(|i| SparseVec::unit(f, i))
        .collect();
    let sp = SubspaceBasis::from_vectors(f, l.dim(), rows);
    debug_assert!(sp.contains_subspace(&l.bracket_spaces(&sp, &sp)));
    Some(sp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Field, FieldTower};
    use crate::liealg::witt_w11_table;

    fn gf5() -> Field {
        FieldTower::new(1).field(5, 1).unwrap()
    }

    #[test]
    fn natural_filtration_of_the_length_five_table() {
        let f = gf5();
        let w = witt_w11_table(&f).unwrap();
        let filt = w.filtration().unwrap().clone();
        assert_eq!(filt.lo, -1);
        assert_eq!(filt.hi(), 3);
        assert_eq!(filt.depth(), 1);
        assert_eq!(filt.space_at(-1).dim(), 5);
        assert_eq!(filt.space_at(0).dim(), 4);
        assert_eq!(filt.space_at(3).dim(), 1);
        assert_eq!(filt.space_at(4).dim(), 0);
        assert!(filt.validate(&w).is_ok());
    }

    #[test]
    fn standard_filtration_matches_the_natural_one() {
        let f = gf5();
        let w = witt_w11_table(&f).unwrap();
        let l0 = nonnegative_part(&w).unwrap();
        let lm1 = SubspaceBasis::whole(&f, 5);
        let filt = standard_filtration(&w, &l0, &lm1).unwrap();
        assert_eq!(filt.lo, -1);
        assert_eq!(filt.depth(), 1);
        assert_eq!(filt.hi(), 3);
        for i in -1..=4 {
            assert!(filt.space_at(i).equals(&w.filtration().unwrap().space_at(i)));
        }
    }

    #[test]
    fn non_maximal_zero_level_is_rejected() {
        let f = gf5();
        let w = witt_w11_table(&f).unwrap();
        // span{e1, e2, e3} is a subalgebra but not maximal: the quotient
        // module has an invariant line.
        let l0 = SubspaceBasis::from_dense_vectors(
            &f,
            5,
            &[vec![0, 0, 1, 0, 0], vec![0, 0, 0, 1, 0], vec![0, 0, 0, 0, 1]],
        );
        let lm1 = SubspaceBasis::whole(&f, 5);
        let r = standard_filtration(&w, &l0, &lm1);
        match r {
            Err(LieError::PreconditionFailed(msg)) => {
                assert!(msg.contains("irreducible"), "got: {}", msg)
            }
            other => panic!("expected a precondition failure, got {:?}", other.map(|f| f.lo)),
        }
    }

    #[test]
    fn associated_graded_of_the_natural_filtration_is_the_same_table() {
        let f = gf5();
        let w = witt_w11_table(&f).unwrap();
        let gr = associated_graded(&w, w.filtration().unwrap()).unwrap();
        assert_eq!(gr.algebra.dim(), 5);
        // Slots come out in filtration order e_{-1}, e_0, ..., e_3 and
        // the bracket table is reproduced verbatim.
        for i in 0..5 {
            for j in i + 1..5 {
                assert_eq!(gr.algebra.bracket_basis(i, j), w.bracket_basis(i, j));
            }
        }
        let degs: Vec<i64> = (0..5).map(|s| gr.degree_of(s)).collect();
        assert_eq!(degs, vec![-1, 0, 1, 2, 3]);
    }

    #[test]
    fn graded_component_dims_survive_regrading() {
        let f = gf5();
        let w = witt_w11_table(&f).unwrap();
        let gr = associated_graded(&w, w.filtration().unwrap()).unwrap();
        for d in -1..=3 {
            assert_eq!(gr.component(d).dim(), 1);
        }
        // Class coordinates: e_1 + e_3 lies in L_(1), class in degree 1
        // is the e_1 coordinate.
        let x = vec![0u64, 0, 1, 0, 1];
        assert_eq!(gr.class_in_degree(1, &x), Some(vec![1]));
        assert_eq!(gr.class_in_degree(2, &x), None);
    }

    #[test]
    fn weisfeiler_ideal_is_zero_for_depth_one() {
        let f = gf5();
        let w = witt_w11_table(&f).unwrap();
        let gr = associated_graded(&w, w.filtration().unwrap()).unwrap();
        assert_eq!(weisfeiler_ideal(&gr).dim(), 0);
    }

    #[test]
    fn weisfeiler_ideal_catches_an_abelian_tail() {
        let f = gf5();
        // Contrived depth-2 graded algebra: the length-5 table extended
        // by a central slot in degree -2 that the degree-1 part kills:
        // [e_{-1}, c] = 0, all brackets with c vanish.  The deep part
        // {c} is then an ideal and the shrink must keep it.
        let w = witt_w11_table(&f).unwrap();
        let mut entries: StructureEntries = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                let v = w.bracket_basis(i, j);
                let terms: Vec<(usize, Vec<u64>)> = v
                    .idx
                    .iter()
                    .enumerate()
                    .map(|(pos, &t)| (t as usize, v.dat[pos..pos + 1].to_vec()))
                    .collect();
                if !terms.is_empty() {
                    entries.push((i, j, terms));
                }
            }
        }
        let labels: Vec<String> =
            (0..5).map(|i| format!("e{}", i as i64 - 1)).chain(["c".to_string()]).collect();
        let ext = LieAlgebra::from_structure_constants(&f, labels, entries, Validation::Full)
            .unwrap()
            .with_grading(vec![-1, 0, 1, 2, 3, -2])
            .unwrap();
        let filt = Filtration::from_grading(&ext).unwrap();
        let gr = associated_graded(&ext, &filt).unwrap();
        let wi = weisfeiler_ideal(&gr);
        assert_eq!(wi.dim(), 1, "the central tail is itself the largest deep ideal");
        // And the graded conditions flag the failure of (g4).
        let gc = check_graded_conditions(&gr);
        assert!(!gc.g4_cotransitive);
        assert!(!gc.g2_generated, "G_{{-2}} is not generated from G_{{-1}}");
    }

    #[test]
    fn graded_conditions_for_the_length_five_table() {
        let f = gf5();
        let w = witt_w11_table(&f).unwrap();
        let gr = associated_graded(&w, w.filtration().unwrap()).unwrap();
        let gc = check_graded_conditions(&gr);
        assert!(gc.g1_irreducible);
        assert!(gc.g1_faithful);
        assert!(gc.g2_generated);
        assert!(gc.g3_transitive);
        assert!(gc.g4_cotransitive);
    }

    #[test]
    fn graded_conditions_fail_on_a_trivial_action() {
        let f = gf5();
        // Abelian graded algebra with G_{-1} of dimension 2 and G_0 of
        // dimension 1: the action is trivial, so G_{-1} is reducible.
        let a = LieAlgebra::from_structure_constants(
            &f,
            vec!["u".into(), "v".into(), "h".into()],
            vec![],
            Validation::Full,
        )
        .unwrap()
        .with_grading(vec![-1, -1, 0])
        .unwrap();
        let filt = Filtration::from_grading(&a).unwrap();
        let gr = associated_graded(&a, &filt).unwrap();
        let gc = check_graded_conditions(&gr);
        assert!(!gc.g1_irreducible);
        assert!(!gc.g1_faithful);
    }
}
