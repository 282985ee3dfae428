//! Weight space decomposition under a commuting toral family.
//!
//! Each operator is certified toral (M^p = M) before use; the relation
//! x^p = x forces every eigenvalue into the prime field, so the whole
//! decomposition runs without extension-field eigenproblems.

use super::{nullspace, LinalgError, Matrix, SparseVec, SubspaceBasis};

/// Weight: one prime-field scalar per operator, as residues in 0..p.
pub type Weight = Vec<u64>;

/// Simultaneous eigenspace decomposition of commuting toral operators.
///
/// Returns the nonzero joint eigenspaces, sorted by weight; their
/// dimensions always sum to the ambient dimension.
pub fn simultaneous_eigenspaces(ops: &[Matrix]) -> Result<Vec<(Weight, SubspaceBasis)>, LinalgError> {
    let Some(first) = ops.first() else {
        return Err(LinalgError::ShapeMismatch("no operators given".into()));
    };
    let f = first.f.clone();
    let n = first.rows;
    for (i, op) in ops.iter().enumerate() {
        if op.f != f {
            return Err(LinalgError::FieldMismatch);
        }
        if op.rows != op.cols {
            return Err(LinalgError::NotSquare);
        }
        if op.rows != n {
            return Err(LinalgError::ShapeMismatch(format!(
                "operator {} is {}x{}, expected {}x{}",
                i, op.rows, op.cols, n, n
            )));
        }
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if ops[i].mul(&ops[j]) != ops[j].mul(&ops[i]) {
                return Err(LinalgError::NotCommuting(i, j));
            }
        }
    }
    let p = f.p();
    for (i, op) in ops.iter().enumerate() {
        if op.pow(p) != *op {
            return Err(LinalgError::NotToral(i));
        }
    }

    let k = f.k();
    let mut spaces: Vec<(Weight, SubspaceBasis)> = vec![(Vec::new(), SubspaceBasis::whole(&f, n))];
    for op in ops {
        let mut next = Vec::new();
        for (w, sp) in &spaces {
            let d = sp.dim();
            // Restriction R with op·b_i = sum_j R[j][i] b_j; the space is
            // invariant because it is a joint eigenspace of operators
            // commuting with op (or the whole space).
            let ech = sp.to_echelon();
            let mut r = Matrix::zero(&f, d, d);
            for i in 0..d {
                let v = sp.rows[i].to_dense(&f, n);
                let img = op.apply(&v);
                let coords = ech
                    .coordinates(&SparseVec::from_dense(&f, &img))
                    .expect("commuting toral operator preserves the joint eigenspace");
                for j in 0..d {
                    let c = &coords[j * k..(j + 1) * k];
                    if !f.is_zero_slice(c) {
                        r.set_entry(j, i, c);
                    }
                }
            }
            for lambda in 0..p {
                let shifted = r.sub_scalar(&f.from_int(lambda as i64));
                let ker = nullspace(&shifted);
                if ker.dim() == 0 {
                    continue;
                }
                let mut lifted = Vec::with_capacity(ker.dim());
                for x in &ker.rows {
                    let xd = x.to_dense(&f, d);
                    let mut acc = vec![0u64; n * k];
                    for i in 0..d {
                        sp.rows[i].axpy_into(&f, &xd[i * k..(i + 1) * k], &mut acc);
                    }
                    lifted.push(acc);
                }
                let mut weight = w.clone();
                weight.push(lambda);
                next.push((weight, SubspaceBasis::from_dense_vectors(&f, n, &lifted)));
            }
        }
        spaces = next;
    }
    let total: usize = spaces.iter().map(|(_, s)| s.dim()).sum();
    debug_assert_eq!(total, n, "toral operators split the full space over the prime field");
    spaces.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(spaces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Field, FieldTower};

    fn gf5() -> Field {
        FieldTower::new(1).field(5, 1).unwrap()
    }

    fn diag(f: &Field, d: &[u64]) -> Matrix {
        let mut m = Matrix::zero(f, d.len(), d.len());
        for (i, &c) in d.iter().enumerate() {
            m.set_entry(i, i, &[c]);
        }
        m
    }

    #[test]
    fn single_diagonal_operator() {
        let f = gf5();
        let m = diag(&f, &[0, 1, 1]);
        let out = simultaneous_eigenspaces(&[m]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].0, vec![0]);
        assert_eq!(out[0].1.dim(), 1);
        assert_eq!(out[1].0, vec![1]);
        assert_eq!(out[1].1.dim(), 2);
    }

    #[test]
    fn degree_derivation_on_witt_basis() {
        // Basis e_{-1},...,e_3 of the length-5 graded module with
        // [e_0, e_i] = i e_i: the bracket operator of e_0 is toral with
        // one-dimensional eigenspaces of eigenvalues -1,0,1,2,3.
        let f = gf5();
        let m = diag(&f, &[4, 0, 1, 2, 3]);
        let out = simultaneous_eigenspaces(&[m]).unwrap();
        assert_eq!(out.len(), 5);
        let weights: Vec<u64> = out.iter().map(|(w, _)| w[0]).collect();
        assert_eq!(weights, vec![0, 1, 2, 3, 4]);
        assert!(out.iter().all(|(_, s)| s.dim() == 1));
    }

    #[test]
    fn two_commuting_torals_split_four_dims() {
        let f = gf5();
        // Non-diagonal pair: conjugate diag pair by a change of basis.
        let a = diag(&f, &[1, 1, 2, 3]);
        let b = diag(&f, &[0, 4, 4, 3]);
        // g = I + E_{01} + E_{23}; g^{-1} = I - E_{01} - E_{23}.
        let mut g = Matrix::identity(&f, 4);
        g.set_entry(0, 1, &[1]);
        g.set_entry(2, 3, &[1]);
        let mut gi = Matrix::identity(&f, 4);
        gi.set_entry(0, 1, &[4]);
        gi.set_entry(2, 3, &[4]);
        assert_eq!(g.mul(&gi), Matrix::identity(&f, 4));
        let a_c = g.mul(&a).mul(&gi);
        let b_c = g.mul(&b).mul(&gi);
        let out = simultaneous_eigenspaces(&[a_c, b_c]).unwrap();
        let dims: usize = out.iter().map(|(_, s)| s.dim()).sum();
        assert_eq!(dims, 4);
        let weights: Vec<Weight> = out.iter().map(|(w, _)| w.clone()).collect();
        assert_eq!(weights, vec![vec![1, 0], vec![1, 4], vec![2, 4], vec![3, 3]]);
    }

    #[test]
    fn rejects_noncommuting_and_nontoral() {
        let f = gf5();
        let mut x = Matrix::zero(&f, 2, 2);
        x.set_entry(0, 1, &[1]);
        let mut y = Matrix::zero(&f, 2, 2);
        y.set_entry(1, 0, &[1]);
        match simultaneous_eigenspaces(&[x.clone(), y]) {
            Err(LinalgError::NotCommuting(0, 1)) => {}
            other => panic!("expected NotCommuting, got {:?}", other.map(|v| v.len())),
        }
        match simultaneous_eigenspaces(&[x]) {
            Err(LinalgError::NotToral(0)) => {}
            other => panic!("expected NotToral, got {:?}", other.map(|v| v.len())),
        }
    }
}
