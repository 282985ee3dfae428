//! Root space decompositions with respect to a torus, sections, the
//! K_α/K′ construction and the sandwich searches.

use super::{lift_rows, RestrictedError, Torus};
use crate::gf::Field;
use crate::liealg::{ClosureMode, LieAlgebra};
use crate::linalg::eigen::{simultaneous_eigenspaces, Weight};
use crate::linalg::{nullspace, solve, Echelon, Matrix, SparseVec, SubspaceBasis};

/// Simultaneous eigenspace decomposition for the adjoint torus action.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub torus: Torus,
    /// H = centralizer of the torus, the zero weight space.
    pub zero_space: SubspaceBasis,
    /// Nonzero weights with their spaces, sorted by weight.
    pub roots: Vec<(Weight, SubspaceBasis)>,
}

impl RootDatum {
    /// All components; the zero weight comes first.
    pub fn components(&self) -> Vec<(Weight, &SubspaceBasis)> {
        let mut v = vec![(vec![0u64; self.torus.dim()], &self.zero_space)];
        v.extend(self.roots.iter().map(|(w, s)| (w.clone(), s)));
        v
    }

    pub fn space_of(&self, w: &Weight) -> Option<&SubspaceBasis> {
        if w.iter().all(|&c| c == 0) {
            return Some(&self.zero_space);
        }
        self.roots.iter().find(|(u, _)| u == w).map(|(_, s)| s)
    }

    /// Weight of the component containing x, for pure weight vectors.
    pub fn weight_of(&self, x: &[u64]) -> Option<Weight> {
        if x.iter().all(|&c| c == 0) {
            return None;
        }
        self.components()
            .into_iter()
            .find(|(_, s)| s.contains_dense(x))
            .map(|(w, _)| w)
    }

    /// [L_α, L_β] ⊆ L_{α+β} (and vanishes when α+β carries no weight).
    fn validate_grading(&self, l: &LieAlgebra) -> Result<(), RestrictedError> {
        let p = l.field().p();
        let comps = self.components();
        for (wa, sa) in &comps {
            for (wb, sb) in &comps {
                let br = l.bracket_spaces(sa, sb);
                if br.dim() == 0 {
                    continue;
                }
                let wt: Weight = wa.iter().zip(wb).map(|(&a, &b)| (a + b) % p).collect();
                let ok = match self.space_of(&wt) {
                    Some(st) => st.contains_subspace(&br),
                    None => false,
                };
                if !ok {
                    return Err(RestrictedError::CheckFailed(format!(
                        "bracket of weights {wa:?} and {wb:?} leaves its component"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Decompose the adjoint module under a torus.  A zero torus yields the
/// whole algebra as zero space.
pub fn root_decomposition(l: &LieAlgebra, torus: &Torus) -> Result<RootDatum, RestrictedError> {
    let f = l.field();
    let n = l.dim();
    if torus.dim() == 0 {
        return Ok(RootDatum {
            torus: torus.clone(),
            zero_space: SubspaceBasis::whole(f, n),
            roots: Vec::new(),
        });
    }
    let ops: Vec<Matrix> = torus.basis.iter().map(|t| l.ad_matrix(t)).collect();
    let mut zero_space = SubspaceBasis::zero(f, n);
    let mut roots = Vec::new();
    for (w, s) in simultaneous_eigenspaces(&ops)? {
        if w.iter().all(|&c| c == 0) {
            zero_space = s;
        } else {
            roots.push((w, s));
        }
    }
    let datum = RootDatum { torus: torus.clone(), zero_space, roots };
    datum.validate_grading(l)?;
    Ok(datum)
}

/// α(u) for u in the torus, from the weight's values on the toral basis.
pub(crate) fn weight_value(
    datum: &RootDatum,
    alpha: &Weight,
    u: &[u64],
) -> Result<Vec<u64>, RestrictedError> {
    let f = &datum.torus.span.f;
    let k = f.k();
    let sigma = datum
        .torus
        .coordinates(u)
        .ok_or_else(|| RestrictedError::CheckFailed("element outside the torus".into()))?;
    let mut val = f.zero_slice();
    for (j, &aj) in alpha.iter().enumerate() {
        f.mul_add_assign(&mut val, &sigma[j * k..(j + 1) * k], &f.from_int(aj as i64));
    }
    Ok(val)
}

pub struct KSection {
    pub algebra: LieAlgebra,
    pub rows: SubspaceBasis,
}

/// Sum of the weight spaces over the GF(p)-span of the given roots, plus
/// the zero space; checked to be bracket-closed.
pub fn k_section(
    l: &LieAlgebra,
    datum: &RootDatum,
    roots: &[Weight],
) -> Result<KSection, RestrictedError> {
    let f = l.field();
    let p = f.p();
    let d = datum.torus.dim();
    let pf = Field::prime_field(p);
    let mut e = Echelon::new(&pf, d);
    for r in roots {
        if !e.insert(&SparseVec::from_dense(&pf, r)) {
            return Err(RestrictedError::DependentRoots);
        }
    }
    let mut v = datum.zero_space.clone();
    let mut tuple = vec![0u64; roots.len()];
    loop {
        // advance the odometer; the all-zero tuple was consumed by seeding
        // with the zero space
        let mut pos = 0;
        while pos < tuple.len() {
            tuple[pos] += 1;
            if tuple[pos] < p {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
        if pos == tuple.len() {
            break;
        }
        let w: Weight = (0..d)
            .map(|t| {
                tuple.iter().zip(roots).fold(0u64, |acc, (&c, r)| (acc + c * r[t]) % p)
            })
            .collect();
        if let Some(s) = datum.space_of(&w) {
            v = v.sum(s);
        }
    }
    if !v.contains_subspace(&l.bracket_spaces(&v, &v)) {
        return Err(RestrictedError::CheckFailed("section is not bracket-closed".into()));
    }
    let algebra = l.induced_algebra(&v)?;
    Ok(KSection { algebra, rows: v })
}

/// K_α = {x ∈ G_α : α([x, G_{-α}]) = 0}.  Requires H = T so that α
/// extends to the brackets [G_α, G_{-α}].
pub fn k_alpha(
    l: &LieAlgebra,
    datum: &RootDatum,
    alpha: &Weight,
) -> Result<SubspaceBasis, RestrictedError> {
    let f = l.field();
    let n = l.dim();
    let k = f.k();
    let p = f.p();
    if alpha.iter().all(|&c| c == 0) {
        return Err(RestrictedError::NotRootVector);
    }
    if !datum.zero_space.equals(&datum.torus.span) {
        return Err(RestrictedError::CheckFailed(
            "K_alpha needs a self-centralizing torus".into(),
        ));
    }
    let Some(ga) = datum.space_of(alpha) else {
        return Ok(SubspaceBasis::zero(f, n));
    };
    let minus: Weight = alpha.iter().map(|&c| (p - c) % p).collect();
    let Some(gm) = datum.space_of(&minus) else {
        return Ok(ga.clone());
    };
    let da = ga.dim();
    let mut rows: Vec<Vec<u64>> = Vec::new();
    for w in &gm.rows {
        let mut row = vec![0u64; da * k];
        for (i, v) in ga.rows.iter().enumerate() {
            let u = l.bracket_sparse(v, w).to_dense(f, n);
            let val = weight_value(datum, alpha, &u)?;
            row[i * k..(i + 1) * k].copy_from_slice(&val);
        }
        if !f.is_zero_slice(&row) {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(ga.clone());
    }
    let ns = nullspace(&Matrix::from_dense_rows(f, da, &rows));
    Ok(lift_rows(f, n, ga, &ns))
}

pub struct KPrimeReport {
    /// (i, K_{iα}) over the weights iα present in the decomposition.
    pub parts: Vec<(u64, SubspaceBasis)>,
    pub subspace: SubspaceBasis,
    pub algebra: LieAlgebra,
    /// The derived subalgebra acts nilpotently on K′.
    pub triangulable: bool,
}

/// Subalgebra generated by the K_{iα}, i ∈ GF(p)^*.
pub fn k_prime(
    l: &LieAlgebra,
    datum: &RootDatum,
    alpha: &Weight,
) -> Result<KPrimeReport, RestrictedError> {
    let p = l.field().p();
    let mut parts = Vec::new();
    let mut seeds: Vec<SparseVec> = Vec::new();
    for i in 1..p {
        let ia: Weight = alpha.iter().map(|&c| (c * i) % p).collect();
        if datum.space_of(&ia).is_none() {
            continue;
        }
        let ki = k_alpha(l, datum, &ia)?;
        seeds.extend(ki.rows.iter().cloned());
        parts.push((i, ki));
    }
    let subspace = l.closure(&seeds, ClosureMode::Subalgebra);
    let algebra = l.induced_algebra(&subspace)?;
    let dsub = algebra.derived_subspace();
    let mut u = SubspaceBasis::whole(algebra.field(), algebra.dim());
    let triangulable = loop {
        let next = algebra.bracket_spaces(&dsub, &u);
        if next.dim() == 0 {
            break true;
        }
        if next.dim() >= u.dim() {
            break false;
        }
        u = next;
    };
    Ok(KPrimeReport { parts, subspace, algebra, triangulable })
}

#[derive(Clone, Debug)]
pub struct WeightCompareReport {
    /// A GF(p)-linear bijection of the extended weight sets matching
    /// multiplicities exists.
    pub found: bool,
    /// Images of a spanning subset of the first weight set.
    pub images: Option<Vec<(Weight, Weight)>>,
    pub zero_in_delta: (bool, bool),
    /// Some nonzero weight comes with its whole GF(p)-line.
    pub full_line: (bool, bool),
    /// Span rank above the search budget; nothing was decided.
    pub unchecked: bool,
}

fn weight_multiset(d: &RootDatum) -> Vec<(Weight, usize)> {
    let mut v = vec![(vec![0u64; d.torus.dim()], d.zero_space.dim())];
    v.extend(d.roots.iter().map(|(w, s)| (w.clone(), s.dim())));
    v
}

fn has_full_line(del: &[(Weight, usize)], p: u64) -> bool {
    del.iter().any(|(w, _)| {
        !w.iter().all(|&c| c == 0)
            && (1..p).all(|c| {
                let cw: Weight = w.iter().map(|&a| (a * c) % p).collect();
                del.iter().any(|(u, _)| *u == cw)
            })
    })
}

fn span_basis(del: &[(Weight, usize)], pf: &Field, d: usize) -> Vec<Weight> {
    let mut e = Echelon::new(pf, d);
    let mut basis = Vec::new();
    for (w, _) in del {
        if e.insert(&SparseVec::from_dense(pf, w)) {
            basis.push(w.clone());
        }
    }
    basis
}

/// Search for a GF(p)-linear bijection between the extended weight sets
/// Γ ∪ {0} of two root data, preserving multiplicities.  Spans of rank
/// up to 2 are searched exhaustively.
pub fn weight_set_compare(d1: &RootDatum, d2: &RootDatum) -> WeightCompareReport {
    let p = d1.torus.span.f.p();
    let del1 = weight_multiset(d1);
    let del2 = weight_multiset(d2);
    let zero_in_delta = (d1.zero_space.dim() > 0, d2.zero_space.dim() > 0);
    let full_line = (has_full_line(&del1, p), has_full_line(&del2, p));
    let pf = Field::prime_field(p);
    let basis1 = span_basis(&del1, &pf, d1.torus.dim());
    let basis2 = span_basis(&del2, &pf, d2.torus.dim());
    let r = basis1.len();
    let mut report = WeightCompareReport {
        found: false,
        images: None,
        zero_in_delta,
        full_line,
        unchecked: false,
    };
    if r != basis2.len() || del1.len() != del2.len() {
        return report;
    }
    if r == 0 {
        report.found = del1[0].1 == del2[0].1;
        report.images = report.found.then(Vec::new);
        return report;
    }
    if r > 2 {
        report.unchecked = true;
        return report;
    }
    // Coordinates of each first-set weight in basis1.
    let dim1 = d1.torus.dim();
    let cols: Vec<Vec<u64>> = (0..dim1)
        .map(|i| basis1.iter().map(|b| b[i]).collect())
        .collect();
    let m1 = Matrix::from_dense_rows(&pf, r, &cols);
    let coords1: Vec<Vec<u64>> = del1
        .iter()
        .map(|(w, _)| solve(&m1, w).expect("weights lie in their own span"))
        .collect();
    // All points of span2.
    let dim2 = d2.torus.dim();
    let mut points: Vec<Weight> = Vec::new();
    let mut tuple = vec![0u64; basis2.len()];
    loop {
        let w: Weight = (0..dim2)
            .map(|t| tuple.iter().zip(&basis2).fold(0u64, |a, (&c, b)| (a + c * b[t]) % p))
            .collect();
        points.push(w);
        let mut pos = 0;
        while pos < tuple.len() {
            tuple[pos] += 1;
            if tuple[pos] < p {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
        if pos == tuple.len() {
            break;
        }
    }
    let mut sorted2 = del2.clone();
    sorted2.sort();
    let mut choice = vec![0usize; r];
    loop {
        let imgs: Vec<&Weight> = choice.iter().map(|&c| &points[c]).collect();
        let mut mapped: Vec<(Weight, usize)> = coords1
            .iter()
            .zip(&del1)
            .map(|(c, (_, dim))| {
                let w: Weight = (0..dim2)
                    .map(|t| {
                        c.iter().zip(&imgs).fold(0u64, |a, (&cj, im)| (a + cj * im[t]) % p)
                    })
                    .collect();
                (w, *dim)
            })
            .collect();
        mapped.sort();
        if mapped == sorted2 {
            report.found = true;
            report.images = Some(
                basis1.iter().cloned().zip(imgs.iter().map(|w| (*w).clone())).collect(),
            );
            return report;
        }
        let mut pos = 0;
        while pos < r {
            choice[pos] += 1;
            if choice[pos] < points.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == r {
            break;
        }
    }
    report
}

/// (ad x)^2 = 0.
pub fn is_sandwich(l: &LieAlgebra, x: &[u64]) -> bool {
    let a = l.ad_matrix(x);
    a.mul(&a).is_zero()
}

#[derive(Clone, Debug)]
pub struct SandwichReport {
    /// Exact sandwich span per searched component.
    pub component_spans: Vec<(String, SubspaceBasis)>,
    pub span: SubspaceBasis,
    pub strongly_degenerate: bool,
    /// Components whose dimension exceeded the enumeration bound.
    pub skipped: Vec<String>,
    pub in_killing_radical: bool,
}

fn weight_label(w: &Weight) -> String {
    let parts: Vec<String> = w.iter().map(|c| c.to_string()).collect();
    format!("root ({})", parts.join(","))
}

/// One representative per line: leading coefficient one, earlier
/// coordinates zero.
fn projective_points(f: &Field, s: &SubspaceBasis) -> Vec<Vec<u64>> {
    let d = s.dim();
    let nk = s.ambient * f.k();
    let elems: Vec<Vec<u64>> = f.all_elements().collect();
    let mut out = Vec::new();
    for lead in 0..d {
        let tail = d - lead - 1;
        let mut idx = vec![0usize; tail];
        loop {
            let mut x = vec![0u64; nk];
            s.rows[lead].axpy_into(f, &f.one_slice(), &mut x);
            for (t, &e) in idx.iter().enumerate() {
                s.rows[lead + 1 + t].axpy_into(f, &elems[e], &mut x);
            }
            out.push(x);
            let mut pos = 0;
            while pos < tail {
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == tail {
                break;
            }
        }
    }
    out
}

/// Exhaustive sandwich search over small components: the root spaces of a
/// given decomposition, the graded components when a grading is attached,
/// or the whole algebra as a last resort.
pub fn sandwich_search(
    l: &LieAlgebra,
    datum: Option<&RootDatum>,
    bound: usize,
) -> SandwichReport {
    let f = l.field();
    let n = l.dim();
    let mut comps: Vec<(String, SubspaceBasis)> = Vec::new();
    if let Some(d) = datum {
        comps.push(("zero space".into(), d.zero_space.clone()));
        for (w, s) in &d.roots {
            comps.push((weight_label(w), s.clone()));
        }
    }
    if let Some(g) = l.grading() {
        let mut degs = g.degrees.clone();
        degs.sort_unstable();
        degs.dedup();
        for d in degs {
            comps.push((format!("degree {d}"), g.component(l, d)));
        }
    }
    if comps.is_empty() {
        comps.push(("ambient".into(), SubspaceBasis::whole(f, n)));
    }
    let mut span = SubspaceBasis::zero(f, n);
    let mut component_spans = Vec::new();
    let mut skipped = Vec::new();
    for (label, s) in comps {
        if s.dim() > bound {
            skipped.push(label);
            continue;
        }
        let mut hits = Echelon::new(f, n);
        for x in projective_points(f, &s) {
            if is_sandwich(l, &x) {
                hits.insert(&SparseVec::from_dense(f, &x));
            }
        }
        let hs = SubspaceBasis::from_echelon(hits);
        span = span.sum(&hs);
        component_spans.push((label, hs));
    }
    let strongly_degenerate = span.dim() > 0;
    let in_killing_radical = l.killing_form().radical().contains_subspace(&span);
    SandwichReport {
        component_spans,
        span,
        strongly_degenerate,
        skipped,
        in_killing_radical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::Validation;
    use crate::restricted::fixtures::*;

    fn standard_datum(l: &LieAlgebra, t: Vec<u64>) -> RootDatum {
        let torus = Torus::from_toral_generators(l, &[t]).unwrap();
        root_decomposition(l, &torus).unwrap()
    }

    #[test]
    fn witt_decomposes_under_the_degree_torus() {
        let f = gf(5);
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        assert_eq!(d.zero_space.dim(), 1);
        assert!(d.zero_space.contains_dense(&unit(&f, 5, 1)));
        assert_eq!(d.roots.len(), 4);
        for (i, (wt, s)) in d.roots.iter().enumerate() {
            assert_eq!(wt, &vec![i as u64 + 1]);
            assert_eq!(s.dim(), 1);
        }
        assert!(d.space_of(&vec![1]).unwrap().contains_dense(&unit(&f, 5, 2)));
        assert_eq!(d.weight_of(&unit(&f, 5, 0)), Some(vec![4]));
        assert_eq!(d.components()[0].0, vec![0]);
    }

    #[test]
    fn shifted_witt_torus_has_an_equivalent_weight_set() {
        let f = gf(5);
        let w = witt(&f);
        let d1 = standard_datum(&w, unit(&f, 5, 1));
        let d2 = standard_datum(&w, elt(&f, 5, &[(0, 1), (1, 1)]));
        assert_eq!(d2.zero_space.dim(), 1);
        assert_eq!(d2.roots.len(), 4);
        assert!(d2.roots.iter().all(|(_, s)| s.dim() == 1));
        let rep = weight_set_compare(&d1, &d2);
        assert!(rep.found);
        assert!(rep.images.is_some());
        assert_eq!(rep.zero_in_delta, (true, true));
        assert_eq!(rep.full_line, (true, true));
        assert!(!rep.unchecked);
    }

    #[test]
    fn zero_torus_collapses_to_one_component() {
        let f = gf(5);
        let w = witt(&f);
        let torus = Torus::from_toral_generators(&w, &[]).unwrap();
        let d = root_decomposition(&w, &torus).unwrap();
        assert_eq!(d.zero_space.dim(), 5);
        assert!(d.roots.is_empty());
    }

    #[test]
    fn sections_of_the_degree_torus() {
        let f = gf(5);
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        let sec = k_section(&w, &d, &[vec![1]]).unwrap();
        assert_eq!(sec.algebra.dim(), 5);
        assert_eq!(sec.rows.dim(), 5);
        let sec = k_section(&w, &d, &[]).unwrap();
        assert_eq!(sec.algebra.dim(), 1);
        assert!(matches!(
            k_section(&w, &d, &[vec![1], vec![2]]),
            Err(RestrictedError::DependentRoots)
        ));
    }

    #[test]
    fn witt_k_alpha_keeps_exactly_the_top_half() {
        let f = gf(5);
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        assert_eq!(k_alpha(&w, &d, &vec![1]).unwrap().dim(), 0);
        let k2 = k_alpha(&w, &d, &vec![2]).unwrap();
        assert_eq!(k2.dim(), 1);
        assert!(k2.contains_dense(&unit(&f, 5, 3)));
        let k3 = k_alpha(&w, &d, &vec![3]).unwrap();
        assert_eq!(k3.dim(), 1);
        assert!(k3.contains_dense(&unit(&f, 5, 4)));
        assert_eq!(k_alpha(&w, &d, &vec![4]).unwrap().dim(), 0);
        assert!(matches!(
            k_alpha(&w, &d, &vec![0]),
            Err(RestrictedError::NotRootVector)
        ));
    }

    #[test]
    fn k_alpha_rejects_a_small_torus() {
        let f = gf(5);
        let l = LieAlgebra::from_structure_constants(
            &f,
            vec!["a".into(), "b".into()],
            vec![],
            Validation::Full,
        )
        .unwrap();
        let d = standard_datum(&l, unit(&f, 2, 0));
        assert_eq!(d.zero_space.dim(), 2);
        assert!(matches!(
            k_alpha(&l, &d, &vec![1]),
            Err(RestrictedError::CheckFailed(_))
        ));
    }

    #[test]
    fn witt_k_prime_is_the_nilpotent_top() {
        let f = gf(5);
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        let rep = k_prime(&w, &d, &vec![1]).unwrap();
        let dims: Vec<(u64, usize)> = rep.parts.iter().map(|(i, s)| (*i, s.dim())).collect();
        assert_eq!(dims, vec![(1, 0), (2, 1), (3, 1), (4, 0)]);
        assert_eq!(rep.subspace.dim(), 2);
        assert!(rep.subspace.contains_dense(&unit(&f, 5, 3)));
        assert!(rep.subspace.contains_dense(&unit(&f, 5, 4)));
        assert_eq!(rep.algebra.dim(), 2);
        assert!(rep.triangulable);
    }

    #[test]
    fn sl2_k_prime_vanishes() {
        let f = gf(5);
        let s = sl2(&f);
        let d = standard_datum(&s, unit(&f, 3, 1));
        assert_eq!(d.roots.len(), 2);
        let rep = k_prime(&s, &d, &vec![2]).unwrap();
        assert_eq!(rep.parts.len(), 2);
        assert!(rep.parts.iter().all(|(_, s)| s.dim() == 0));
        assert_eq!(rep.subspace.dim(), 0);
        assert!(rep.triangulable);
    }

    #[test]
    fn weight_compare_detects_multiplicity_mismatch() {
        let f = gf(5);
        // t and s act diagonally on a, b, c with different multiplicities.
        let l = LieAlgebra::from_structure_constants(
            &f,
            vec!["t".into(), "s".into(), "a".into(), "b".into(), "c".into()],
            vec![
                (0, 2, vec![(2, vec![1])]),
                (0, 3, vec![(3, vec![1])]),
                (0, 4, vec![(4, vec![2])]),
                (1, 2, vec![(2, vec![1])]),
                (1, 3, vec![(3, vec![2])]),
                (1, 4, vec![(4, vec![2])]),
            ],
            Validation::Full,
        )
        .unwrap();
        let d1 = standard_datum(&l, unit(&f, 5, 0));
        let d2 = standard_datum(&l, unit(&f, 5, 1));
        assert_eq!(d1.zero_space.dim(), 2);
        assert_eq!(d2.zero_space.dim(), 2);
        let rep = weight_set_compare(&d1, &d2);
        assert!(!rep.found);
        assert!(rep.images.is_none());
        assert_eq!(rep.zero_in_delta, (true, true));
        assert_eq!(rep.full_line, (false, false));
        assert!(!rep.unchecked);
    }

    #[test]
    fn witt_sandwiches_span_the_top_component() {
        let f = gf(5);
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        let rep = sandwich_search(&w, Some(&d), 4);
        assert!(rep.strongly_degenerate);
        assert!(rep.skipped.is_empty());
        assert_eq!(rep.span.dim(), 1);
        assert!(rep.span.contains_dense(&unit(&f, 5, 4)));
        assert!(rep.in_killing_radical);
        assert!(rep
            .component_spans
            .iter()
            .any(|(l, s)| l == "root (3)" && s.dim() == 1));
        assert!(is_sandwich(&w, &unit(&f, 5, 4)));
        assert!(!is_sandwich(&w, &unit(&f, 5, 3)));
    }

    #[test]
    fn witt7_has_a_two_dimensional_sandwich_span() {
        let f = gf(7);
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 7, 1));
        let rep = sandwich_search(&w, Some(&d), 3);
        assert!(rep.strongly_degenerate);
        assert_eq!(rep.span.dim(), 2);
        assert!(rep.span.contains_dense(&unit(&f, 7, 5)));
        assert!(rep.span.contains_dense(&unit(&f, 7, 6)));
    }

    #[test]
    fn sandwich_search_skips_components_over_the_bound() {
        let f = gf(5);
        let w = witt(&f);
        let rep = sandwich_search(&w, None, 0);
        assert_eq!(rep.skipped.len(), 5);
        assert!(!rep.strongly_degenerate);
        let h = heisenberg(&f);
        let rep = sandwich_search(&h, None, 3);
        assert_eq!(rep.component_spans[0].0, "ambient");
        assert_eq!(rep.span.dim(), 3);
        assert!(rep.in_killing_radical);
    }

    #[test]
    fn sl2_has_no_sandwiches() {
        let f = gf(5);
        let s = sl2(&f);
        let d = standard_datum(&s, unit(&f, 3, 1));
        let rep = sandwich_search(&s, Some(&d), 3);
        assert_eq!(rep.span.dim(), 0);
        assert!(!rep.strongly_degenerate);
    }
}
