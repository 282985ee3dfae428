//! Jordan–Chevalley decomposition of a square matrix.
//!
//! Write mu for the minimal polynomial of M.  Inside the commutative
//! algebra F[T]/(mu) the p-power map P is semilinear over the field and
//! linear over the prime field, so the coefficient space splits as
//! im(P^e) ⊕ ker(P^e) for e large (Fitting).  The image component of the
//! class of T evaluates at M to the semisimple part: it is a p^e-th power
//! in a commutative algebra, hence has squarefree minimal polynomial,
//! while the kernel component is literally nilpotent (its p^e-th power is
//! the zero class).  Both parts are polynomials in M by construction.

use super::{min_poly, nullspace, poly_at_matrix, row_echelon, solve, LinalgError, Matrix, SubspaceBasis};
use crate::gf::poly::Poly;
use crate::gf::Field;

/// M = S + N with SN = NS, S semisimple, N nilpotent, both polynomials
/// in M.
pub fn jordan_chevalley_matrix(m: &Matrix) -> Result<(Matrix, Matrix), LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare);
    }
    let f = &m.f;
    let n = m.rows;
    if n == 0 {
        return Ok((m.clone(), Matrix::zero(f, 0, 0)));
    }
    let mu = min_poly(m);
    let u = semisimple_part_mod(&mu)?;
    let s = poly_at_matrix(&u, m);
    let nmat = m.sub(&s);
    debug_assert_eq!(s.mul(&nmat), nmat.mul(&s));
    Ok((s, nmat))
}

/// The polynomial u with u(M) semisimple, M - u(M) nilpotent, reduced
/// mod mu; exposed for element-level decompositions that already know a
/// minimal polynomial.
pub fn semisimple_part_mod(mu: &Poly) -> Result<Poly, LinalgError> {
    let f = mu.f.clone();
    let p = f.p();
    let k = f.k();
    let r = mu.degree().expect("minimal polynomial of a nonempty matrix is nonzero");
    if r == 0 {
        return Ok(Poly::zero(&f));
    }
    let dim = r * k;
    let fp = Field::prime_field(p);

    // Matrix of P(g) = g^(p) over the prime field: the basis vector
    // t^j T^i maps to (t^j)^p * (T^p mod mu)^i.
    let tpow = Poly::x(&f).modpow(p as u128, mu);
    let mut tp: Vec<Poly> = Vec::with_capacity(r);
    tp.push(Poly::one(&f));
    for i in 1..r {
        let next = tp[i - 1].mul(&tpow).rem(mu);
        tp.push(next);
    }
    let mut pm = Matrix::zero(&fp, dim, dim);
    for i in 0..r {
        for j in 0..k {
            let mut tj = vec![0u64; k];
            tj[j] = 1;
            let cj = f.frobenius_slice(&tj);
            let img = tp[i].scale(&cj);
            if let Some(d) = img.degree() {
                for deg in 0..=d {
                    let slice = img.coeff(deg);
                    for jj in 0..k {
                        if slice[jj] != 0 {
                            pm.set_entry(deg * k + jj, i * k + j, &[slice[jj]]);
                        }
                    }
                }
            }
        }
    }

    // Fitting splitting of the coefficient space under P.
    let mut e = 1usize;
    while e < dim {
        e <<= 1;
    }
    let b = pm.pow(e as u64);
    let im = SubspaceBasis::from_echelon(row_echelon(&b.transpose()));
    let ker = nullspace(&b);
    debug_assert_eq!(im.dim() + ker.dim(), dim);

    // Prime-field coordinates of the class of T.
    let tred = Poly::x(&f).rem(mu);
    let mut g = vec![0u64; dim];
    if let Some(d) = tred.degree() {
        for deg in 0..=d {
            let slice = tred.coeff(deg);
            for jj in 0..k {
                g[deg * k + jj] = slice[jj];
            }
        }
    }

    // Solve [im | ker] c = g and keep the image component.
    let cols = im.dim() + ker.dim();
    let mut stack = Matrix::zero(&fp, dim, cols);
    for (c, v) in im.rows.iter().chain(ker.rows.iter()).enumerate() {
        let dense = v.to_dense(&fp, dim);
        for (row, &w) in dense.iter().enumerate() {
            if w != 0 {
                stack.set_entry(row, c, &[w]);
            }
        }
    }
    let coeffs = solve(&stack, &g).expect("Fitting components span the coefficient space");
    let mut u_coords = vec![0u64; dim];
    for (c, v) in im.rows.iter().enumerate() {
        v.axpy_into(&fp, &coeffs[c..c + 1], &mut u_coords);
    }

    // Reassemble the polynomial over the field.
    let mut coeff_slices = vec![0u64; r * k];
    for i in 0..r {
        for jj in 0..k {
            coeff_slices[i * k + jj] = u_coords[i * k + jj];
        }
    }
    Ok(Poly::from_coeffs(&f, &coeff_slices))
}

/// True when the minimal polynomial of `m` is squarefree.
pub fn is_semisimple_matrix(m: &Matrix) -> Result<bool, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare);
    }
    if m.rows == 0 {
        return Ok(true);
    }
    let mu = min_poly(m);
    let sf = mu.squarefree_part();
    Ok(sf.degree() == mu.degree())
}

/// True when some power of `m` vanishes.
pub fn is_nilpotent_matrix(m: &Matrix) -> Result<bool, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare);
    }
    if m.rows == 0 {
        return Ok(true);
    }
    Ok(m.pow(m.rows as u64).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Field, FieldTower};

    fn gf5() -> Field {
        FieldTower::new(1).field(5, 1).unwrap()
    }

    #[test]
    fn nilpotent_block_and_diagonalisable() {
        let f = gf5();
        // J_3(0): already nilpotent.
        let mut j = Matrix::zero(&f, 3, 3);
        j.set_entry(0, 1, &[1]);
        j.set_entry(1, 2, &[1]);
        let (s, n) = jordan_chevalley_matrix(&j).unwrap();
        assert!(s.is_zero());
        assert_eq!(n, j);
        // diag(1,2,2): already semisimple.
        let mut d = Matrix::zero(&f, 3, 3);
        d.set_entry(0, 0, &[1]);
        d.set_entry(1, 1, &[2]);
        d.set_entry(2, 2, &[2]);
        let (s, n) = jordan_chevalley_matrix(&d).unwrap();
        assert_eq!(s, d);
        assert!(n.is_zero());
    }

    #[test]
    fn unipotent_jordan_block() {
        let f = gf5();
        // J_2(1): S is the identity, N the superdiagonal unit.
        let mut j = Matrix::identity(&f, 2);
        j.set_entry(0, 1, &[1]);
        let (s, n) = jordan_chevalley_matrix(&j).unwrap();
        assert_eq!(s, Matrix::identity(&f, 2));
        let mut expected_n = Matrix::zero(&f, 2, 2);
        expected_n.set_entry(0, 1, &[1]);
        assert_eq!(n, expected_n);
        assert_eq!(s.pow(5), s);
        assert!(n.mul(&n).is_zero());
    }

    #[test]
    fn mixed_matrix_properties() {
        let f = gf5();
        // Block diagonal: J_2(1), J_2(3), and a 2x2 semisimple block with
        // irreducible characteristic polynomial.
        let mut m = Matrix::zero(&f, 6, 6);
        m.set_entry(0, 0, &[1]);
        m.set_entry(0, 1, &[1]);
        m.set_entry(1, 1, &[1]);
        m.set_entry(2, 2, &[3]);
        m.set_entry(2, 3, &[1]);
        m.set_entry(3, 3, &[3]);
        // Companion of T^2 + 2 (irreducible over GF(5): -2 = 3 is not a square).
        m.set_entry(4, 5, &[1]);
        m.set_entry(5, 4, &[3]);
        let (s, n) = jordan_chevalley_matrix(&m).unwrap();
        assert_eq!(s.add(&n), m);
        assert_eq!(s.mul(&n), n.mul(&s));
        assert!(is_nilpotent_matrix(&n).unwrap());
        assert!(is_semisimple_matrix(&s).unwrap());
        // S commutes with everything commuting with M: check on a
        // generating set of the commutant of the block structure.
        let mut c = Matrix::zero(&f, 6, 6);
        c.set_entry(0, 1, &[2]);
        c.set_entry(2, 3, &[4]);
        c.set_entry(4, 4, &[1]);
        c.set_entry(5, 5, &[1]);
        assert_eq!(m.mul(&c), c.mul(&m));
        assert_eq!(s.mul(&c), c.mul(&s));
        // Decomposition of a semisimple matrix is (itself, 0).
        let (s2, n2) = jordan_chevalley_matrix(&s).unwrap();
        assert_eq!(s2, s);
        assert!(n2.is_zero());
    }

    #[test]
    fn extension_field_decomposition() {
        // Over GF(25): a Jordan block J_2(t) with t a proper field element.
        let tower = FieldTower::new(9);
        let f = tower.field(5, 2).unwrap();
        let t = vec![1, 1];
        let mut m = Matrix::zero(&f, 2, 2);
        m.set_entry(0, 0, &t);
        m.set_entry(0, 1, &f.one_slice());
        m.set_entry(1, 1, &t);
        let (s, n) = jordan_chevalley_matrix(&m).unwrap();
        let mut expected_s = Matrix::zero(&f, 2, 2);
        expected_s.set_entry(0, 0, &t);
        expected_s.set_entry(1, 1, &t);
        assert_eq!(s, expected_s);
        assert!(n.mul(&n).is_zero());
        assert!(is_semisimple_matrix(&s).unwrap());
    }
}
