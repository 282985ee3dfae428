//! Jacobson summands of the p-power of a sum, and toral switching: the
//! exponential-style operator built from a root vector that carries one
//! maximal torus to another.

use super::roots::{root_decomposition, RootDatum};
use super::{
    embed_dense, scalar_extension, scale_dense, InnerSolver, RestrictedError, Torus,
};
use crate::gf::{Field, FieldTower};
use crate::liealg::LieAlgebra;
use crate::linalg::eigen::{simultaneous_eigenspaces, Weight};
use crate::linalg::{rank, Echelon, Matrix, SparseVec, SubspaceBasis};

#[derive(Clone, Debug)]
pub struct JacobsonTerms {
    /// s_1 … s_{p-1}.
    pub terms: Vec<Vec<u64>>,
    pub lhs: Vec<u64>,
    pub rhs: Vec<u64>,
    /// (x+y)^{[p]} = x^{[p]} + y^{[p]} + Σ s_i; on centreful algebras this
    /// sees the normalized solver images.
    pub verified: bool,
}

/// Extract the s_i from Σ i·s_i t^{i-1} = (ad(tx+y))^{p-1}(x), computed
/// over L ⊗ F[t] with the coefficient list indexed by t-degree.
pub fn jacobson_terms(
    l: &LieAlgebra,
    x: &[u64],
    y: &[u64],
) -> Result<JacobsonTerms, RestrictedError> {
    let f = l.field();
    let n = l.dim();
    let k = f.k();
    let p = f.p() as usize;
    let mut cur: Vec<Vec<u64>> = vec![x.to_vec()];
    for _ in 0..p - 1 {
        let mut next: Vec<Vec<u64>> = vec![vec![0u64; n * k]; cur.len() + 1];
        for (d, v) in cur.iter().enumerate() {
            next[d + 1] = f.add_slice(&next[d + 1], &l.bracket_dense(x, v));
            next[d] = f.add_slice(&next[d], &l.bracket_dense(y, v));
        }
        cur = next;
    }
    // The top coefficient is (ad x)^{p-1}(x) = 0.
    if !f.is_zero_slice(&cur[p - 1]) {
        return Err(RestrictedError::CheckFailed("top Jacobson coefficient nonzero".into()));
    }
    let mut terms = Vec::with_capacity(p - 1);
    for i in 1..p {
        let inv = f.inv_slice(&f.from_int(i as i64)).expect("unit mod p");
        terms.push(scale_dense(f, &cur[i - 1], &inv));
    }
    let solver = InnerSolver::new(l);
    let xp = solver.p_power(l, x)?;
    let yp = solver.p_power(l, y)?;
    let lhs = solver.p_power(l, &f.add_slice(x, y))?;
    let mut rhs = f.add_slice(&xp, &yp);
    for s in &terms {
        rhs = f.add_slice(&rhs, s);
    }
    let verified = lhs == rhs;
    Ok(JacobsonTerms { terms, lhs, rhs, verified })
}

#[derive(Clone, Debug)]
pub struct WinterData {
    /// The algebra the operator lives on; differs from the input when the
    /// Artin-Schreier scalars forced a base change.
    pub algebra: LieAlgebra,
    pub extended: bool,
    pub x: Vec<u64>,
    pub gamma: Weight,
    /// Least m with x^{[p]^m} in the torus.
    pub m: usize,
    /// q(x) = x^{[p]} + … + x^{[p]^{m-1}}, a zero-space element.
    pub q_x: Vec<u64>,
    pub e_op: Matrix,
    pub invertible: bool,
    /// E(H) and its Cartan-ness.
    pub new_cartan: SubspaceBasis,
    pub cartan_nilpotent: bool,
    pub cartan_self_normalizing: bool,
    /// t - γ(t)(x + q(x)) over the toral basis.
    pub new_torus_basis: Vec<Vec<u64>>,
    /// ξ(α(x^{[p]^m})) per component, zero weight first.
    pub xi_values: Vec<(Weight, Vec<u64>)>,
    /// Values α(t) - ξ(α(s))γ(t) on the original toral basis.
    pub transformed_roots: Vec<(Weight, Vec<Vec<u64>>)>,
    /// Fresh eigenspaces of the new torus reproduce the predicted weights
    /// and the E-images; None when the new basis fails the adjoint toral
    /// test or a predicted value leaves the prime field.
    pub recompute_match: Option<bool>,
}

enum Attempt {
    Done(Box<WinterData>),
    NeedsExtension,
}

/// E_{x,ξ} for a root vector x: per weight component,
/// E(y) = -Σ_{i=0}^{p-1} Π_{j=i+1}^{p-1}((ξ(α(s)) + j)Id - ad q)(ad x)^i y.
///
/// The factors commute (all are polynomials in ad q), so the product
/// needs no ordering.  When some α(s) has nonzero absolute trace the
/// Artin-Schreier roots ξ live in a degree-p extension; the whole
/// computation is restarted there once.
pub fn winter_exponential(
    tower: &FieldTower,
    l: &LieAlgebra,
    datum: &RootDatum,
    x: &[u64],
) -> Result<WinterData, RestrictedError> {
    match winter_attempt(tower, l, datum, x, false)? {
        Attempt::Done(w) => Ok(*w),
        Attempt::NeedsExtension => {
            let f = l.field();
            let ext = tower.field(f.p(), f.k() * f.p() as usize)?;
            let l2 = scalar_extension(tower, l, &ext)?;
            let basis2: Result<Vec<Vec<u64>>, _> = datum
                .torus
                .basis
                .iter()
                .map(|b| embed_dense(tower, f, &ext, b))
                .collect();
            let torus2 = Torus::from_toral_generators(&l2, &basis2?)?;
            let datum2 = root_decomposition(&l2, &torus2)?;
            let x2 = embed_dense(tower, f, &ext, x)?;
            match winter_attempt(tower, &l2, &datum2, &x2, true)? {
                Attempt::Done(w) => Ok(*w),
                Attempt::NeedsExtension => Err(RestrictedError::CheckFailed(
                    "scalars still inseparable after the base change".into(),
                )),
            }
        }
    }
}

fn winter_attempt(
    tower: &FieldTower,
    l: &LieAlgebra,
    datum: &RootDatum,
    x: &[u64],
    extended: bool,
) -> Result<Attempt, RestrictedError> {
    let f = l.field().clone();
    let n = l.dim();
    let k = f.k();
    let p = f.p() as usize;
    if x.iter().all(|&c| c == 0) {
        return Err(RestrictedError::NotRootVector);
    }
    let Some((gamma, _)) = datum.roots.iter().find(|(_, s)| s.contains_dense(x)) else {
        return Err(RestrictedError::NotRootVector);
    };
    let gamma = gamma.clone();
    let solver = InnerSolver::new(l);
    let mut q = vec![0u64; n * k];
    let mut cur = x.to_vec();
    let mut ms = None;
    for step in 1..=n + 1 {
        cur = solver.p_power(l, &cur)?;
        if datum.torus.span.contains_dense(&cur) {
            ms = Some((step, cur.clone()));
            break;
        }
        q = f.add_slice(&q, &cur);
    }
    let Some((m, s)) = ms else {
        return Err(RestrictedError::TorusNotMaximal);
    };
    if !datum.zero_space.contains_dense(&q) {
        return Err(RestrictedError::CheckFailed("q(x) outside the zero space".into()));
    }
    let components = datum.components();
    // α(s) per component, via the coordinates of s on the toral basis.
    let sigma = datum
        .torus
        .coordinates(&s)
        .ok_or_else(|| RestrictedError::CheckFailed("limit p-power outside the torus".into()))?;
    let mut cvals: Vec<Vec<u64>> = Vec::with_capacity(components.len());
    for (w, _) in &components {
        let mut c = f.zero_slice();
        for (j, &wj) in w.iter().enumerate() {
            f.mul_add_assign(&mut c, &sigma[j * k..(j + 1) * k], &f.from_int(wj as i64));
        }
        cvals.push(c);
    }
    if cvals.iter().any(|c| f.trace_to_prime(c) != 0) {
        return Ok(Attempt::NeedsExtension);
    }
    let mut xis: Vec<Vec<u64>> = Vec::with_capacity(cvals.len());
    for c in &cvals {
        let root = tower.artin_schreier_root(&f.element(c.clone()))?;
        if root.coords().len() != k {
            return Err(RestrictedError::CheckFailed("Artin-Schreier root escaped".into()));
        }
        xis.push(root.coords().to_vec());
    }
    let a = l.ad_matrix(x);
    let qm = l.ad_matrix(&q);
    let mut comp_rows: Vec<SparseVec> = Vec::new();
    let mut comp_images: Vec<Vec<u64>> = Vec::new();
    for ((_, space), xi) in components.iter().zip(&xis) {
        for v in &space.rows {
            let vd = v.to_dense(&f, n);
            let mut pw = vd;
            let mut acc = vec![0u64; n * k];
            for i in 0..p {
                let mut u = pw.clone();
                for j in i + 1..p {
                    let cj = f.add_slice(xi, &f.from_int(j as i64));
                    u = f.sub_slice(&scale_dense(&f, &u, &cj), &qm.apply(&u));
                }
                acc = f.add_slice(&acc, &u);
                if i + 1 < p {
                    pw = a.apply(&pw);
                }
            }
            comp_rows.push(v.clone());
            comp_images.push(f.neg_slice(&acc));
        }
    }
    // Assemble the matrix: express each unit vector in the component basis
    // through a tag-augmented echelon, then combine the images.
    let mut tech = Echelon::new(&f, 2 * n);
    for (t, r) in comp_rows.iter().enumerate() {
        let mut idx = r.idx.clone();
        idx.push((n + t) as u32);
        let mut dat = r.dat.clone();
        dat.extend_from_slice(&f.one_slice());
        tech.insert(&SparseVec { idx, dat });
    }
    let mut grid: Vec<Vec<u64>> = vec![vec![0u64; n * k]; n];
    for j in 0..n {
        let red = tech.reduce(&SparseVec::unit(&f, j));
        if red.idx.iter().any(|&i| (i as usize) < n) {
            return Err(RestrictedError::CheckFailed("components do not span".into()));
        }
        let mut col = vec![0u64; n * k];
        for (pos, &i) in red.idx.iter().enumerate() {
            let t = i as usize - n;
            let c = f.neg_slice(&red.dat[pos * k..(pos + 1) * k]);
            f.add_assign_slice(&mut col, &scale_dense(&f, &comp_images[t], &c));
        }
        for i in 0..n {
            grid[i][j * k..(j + 1) * k].copy_from_slice(&col[i * k..(i + 1) * k]);
        }
    }
    let e_op = Matrix::from_dense_rows(&f, n, &grid);
    let invertible = rank(&e_op) == n;
    let cartan_rows: Vec<Vec<u64>> = datum
        .zero_space
        .rows
        .iter()
        .map(|r| e_op.apply(&r.to_dense(&f, n)))
        .collect();
    let new_cartan = SubspaceBasis::from_dense_vectors(&f, n, &cartan_rows);
    let (cartan_nilpotent, cartan_self_normalizing) = match l.induced_algebra(&new_cartan) {
        Ok(ind) => {
            (ind.is_nilpotent_algebra(), l.normalizer(&new_cartan).equals(&new_cartan))
        }
        Err(_) => (false, false),
    };
    let xq = f.add_slice(x, &q);
    let new_torus_basis: Vec<Vec<u64>> = datum
        .torus
        .basis
        .iter()
        .enumerate()
        .map(|(j, t)| f.sub_slice(t, &scale_dense(&f, &xq, &f.from_int(gamma[j] as i64))))
        .collect();
    let xi_values: Vec<(Weight, Vec<u64>)> = components
        .iter()
        .map(|(w, _)| w.clone())
        .zip(xis.iter().cloned())
        .collect();
    let transformed_roots: Vec<(Weight, Vec<Vec<u64>>)> = components
        .iter()
        .zip(&xis)
        .map(|((w, _), xi)| {
            let vals: Vec<Vec<u64>> = (0..datum.torus.dim())
                .map(|j| {
                    let av = f.from_int(w[j] as i64);
                    let gv = f.from_int(gamma[j] as i64);
                    let mut prod = f.zero_slice();
                    f.mul_add_assign(&mut prod, xi, &gv);
                    f.sub_slice(&av, &prod)
                })
                .collect();
            (w.clone(), vals)
        })
        .collect();
    let recompute_match =
        recompute(l, &components, &new_torus_basis, &transformed_roots, &e_op);
    Ok(Attempt::Done(Box::new(WinterData {
        algebra: l.clone(),
        extended,
        x: x.to_vec(),
        gamma,
        m,
        q_x: q,
        e_op,
        invertible,
        new_cartan,
        cartan_nilpotent,
        cartan_self_normalizing,
        new_torus_basis,
        xi_values,
        transformed_roots,
        recompute_match,
    })))
}

fn slice_residue(f: &Field, v: &[u64]) -> Option<u64> {
    (0..f.p()).find(|&r| f.from_int(r as i64) == v)
}

fn recompute(
    l: &LieAlgebra,
    components: &[(Weight, &SubspaceBasis)],
    new_basis: &[Vec<u64>],
    transformed: &[(Weight, Vec<Vec<u64>>)],
    e_op: &Matrix,
) -> Option<bool> {
    let f = l.field();
    let n = l.dim();
    let p = f.p();
    let ops: Vec<Matrix> = new_basis.iter().map(|t| l.ad_matrix(t)).collect();
    if ops.iter().any(|m| m.pow(p) != *m) {
        return None;
    }
    // Predicted prime weights with their E-image spaces.
    let mut predicted: Vec<(Weight, SubspaceBasis)> = Vec::new();
    for ((_, vals), (_, space)) in transformed.iter().zip(components) {
        let mut res: Weight = Vec::with_capacity(vals.len());
        for v in vals {
            res.push(slice_residue(f, v)?);
        }
        let imgs: Vec<Vec<u64>> =
            space.rows.iter().map(|r| e_op.apply(&r.to_dense(f, n))).collect();
        predicted.push((res, SubspaceBasis::from_dense_vectors(f, n, &imgs)));
    }
    let fresh = match simultaneous_eigenspaces(&ops) {
        Ok(s) => s,
        Err(_) => return Some(false),
    };
    if fresh.len() != predicted.len() {
        return Some(false);
    }
    for (w, s) in &predicted {
        let Some((_, fs)) = fresh.iter().find(|(fw, _)| fw == w) else {
            return Some(false);
        };
        if !fs.equals(s) {
            return Some(false);
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::poly::seeded_rng;
    use crate::restricted::fixtures::*;
    use crate::restricted::p_envelope;

    fn standard_datum(l: &LieAlgebra, t: Vec<u64>) -> RootDatum {
        let torus = Torus::from_toral_generators(l, &[t]).unwrap();
        root_decomposition(l, &torus).unwrap()
    }

    #[test]
    fn jacobson_terms_of_commuting_nilpotents_vanish() {
        let f = gf(5);
        let w = witt(&f);
        let t = jacobson_terms(&w, &unit(&f, 5, 3), &unit(&f, 5, 4)).unwrap();
        assert!(t.terms.iter().all(|s| f.is_zero_slice(s)));
        assert!(f.is_zero_slice(&t.lhs));
        assert!(t.verified);
        let h = heisenberg(&f);
        let t = jacobson_terms(&h, &unit(&f, 3, 0), &unit(&f, 3, 1)).unwrap();
        assert!(t.terms.iter().all(|s| f.is_zero_slice(s)));
        assert!(t.verified);
    }

    #[test]
    fn jacobson_summands_balance_the_p_power_of_a_sum() {
        let f = gf(5);
        let s = sl2(&f);
        let t = jacobson_terms(&s, &unit(&f, 3, 0), &unit(&f, 3, 2)).unwrap();
        assert_eq!(t.terms.len(), 4);
        assert!(t.verified);
        let w = witt(&f);
        let mut rng = seeded_rng(0x77a1);
        for _ in 0..4 {
            let mut x = Vec::new();
            let mut y = Vec::new();
            for _ in 0..5 {
                x.extend(f.random_slice(&mut rng));
                y.extend(f.random_slice(&mut rng));
            }
            assert!(jacobson_terms(&w, &x, &y).unwrap().verified);
        }
    }

    #[test]
    fn winter_operator_for_a_nil_root_vector_is_the_exponential() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 1).unwrap();
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        let win = winter_exponential(&tower, &w, &d, &unit(&f, 5, 0)).unwrap();
        assert!(!win.extended);
        assert_eq!(win.m, 1);
        assert!(f.is_zero_slice(&win.q_x));
        assert_eq!(win.gamma, vec![4]);
        assert!(win.invertible);
        let a = w.ad_matrix(&unit(&f, 5, 0));
        let mut exp = Matrix::identity(&f, 5);
        let mut pw = Matrix::identity(&f, 5);
        let mut fact = 1i64;
        for i in 1..5 {
            pw = pw.mul(&a);
            fact *= i;
            let inv = f.inv_slice(&f.from_int(fact)).unwrap();
            exp = exp.add(&pw.scale(&inv));
        }
        assert_eq!(win.e_op, exp);
        assert_eq!(win.new_cartan.dim(), 1);
        assert!(win.new_cartan.contains_dense(&elt(&f, 5, &[(0, 1), (1, 1)])));
        assert!(win.cartan_nilpotent);
        assert!(win.cartan_self_normalizing);
        assert_eq!(win.new_torus_basis, vec![elt(&f, 5, &[(0, 1), (1, 1)])]);
        for (_, xi) in &win.xi_values {
            assert!(f.is_zero_slice(xi));
        }
        for (wt, vals) in &win.transformed_roots {
            for (j, v) in vals.iter().enumerate() {
                assert_eq!(v, &f.from_int(wt[j] as i64));
            }
        }
        assert_eq!(win.recompute_match, Some(true));
    }

    #[test]
    fn winter_operator_moves_the_cartan_the_other_way() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 1).unwrap();
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        let win = winter_exponential(&tower, &w, &d, &unit(&f, 5, 2)).unwrap();
        assert_eq!(win.m, 1);
        assert_eq!(win.gamma, vec![1]);
        assert!(win.invertible);
        assert_eq!(win.new_cartan.dim(), 1);
        assert!(win.new_cartan.contains_dense(&elt(&f, 5, &[(1, 1), (2, -1)])));
        assert!(win.cartan_nilpotent);
        assert!(win.cartan_self_normalizing);
        assert_eq!(win.recompute_match, Some(true));
    }

    #[test]
    fn winter_rejects_vectors_outside_a_root_space() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 1).unwrap();
        let w = witt(&f);
        let d = standard_datum(&w, unit(&f, 5, 1));
        for x in [
            unit(&f, 5, 1),
            vec![0u64; 5],
            elt(&f, 5, &[(2, 1), (3, 1)]),
        ] {
            assert!(matches!(
                winter_exponential(&tower, &w, &d, &x),
                Err(RestrictedError::NotRootVector)
            ));
        }
    }

    #[test]
    fn winter_handles_a_nontrivial_q_on_the_w12_envelope() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 1).unwrap();
        let env = p_envelope(&w12(&f)).unwrap();
        let l = &env.algebra;
        let n = l.dim();
        // The degree torus F ad(xd) is maximal but not of maximal
        // dimension in the envelope, so the switched zero space need not
        // be a Cartan subalgebra; everything else still applies.
        let d = standard_datum(l, unit(&f, n, 1));
        assert_eq!(d.zero_space.dim(), 6);
        assert_eq!(d.roots.len(), 4);
        assert!(d.roots.iter().all(|(_, s)| s.dim() == 5));
        let win = winter_exponential(&tower, l, &d, &unit(&f, n, 0)).unwrap();
        assert!(!win.extended);
        assert_eq!(win.m, 2);
        assert_eq!(win.q_x, unit(&f, n, 25));
        assert!(win.invertible);
        for (_, xi) in &win.xi_values {
            assert!(f.is_zero_slice(xi));
        }
        // E(ad(xd)) = ad((1+x)d) and E fixes ad(d^[5]).
        assert_eq!(win.e_op.apply(&unit(&f, n, 1)), elt(&f, n, &[(0, 1), (1, 1)]));
        assert_eq!(win.e_op.apply(&unit(&f, n, 25)), unit(&f, n, 25));
        assert_eq!(
            win.e_op.apply(&unit(&f, n, 6)),
            elt(&f, n, &[(0, 1), (2, 4), (3, 1), (4, 3), (5, 1), (6, 1)])
        );
        assert_eq!(win.new_cartan.dim(), 6);
        // [E(D6), E(D1)] = -4 E(D1) exhibits a non-nilpotent adjoint
        // action inside the switched zero space.
        assert!(!win.cartan_nilpotent);
        // t_x = ad((1+x)d) + ad(d^[5]) = ad((1+x)d)^[5] is genuinely toral.
        let tx = elt(&f, n, &[(0, 1), (1, 1), (25, 1)]);
        assert_eq!(win.new_torus_basis, vec![tx.clone()]);
        assert!(crate::restricted::is_toral_element(l, &tx).unwrap());
        assert!(win.recompute_match.is_some());
    }
}
