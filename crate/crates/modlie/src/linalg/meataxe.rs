//! Module irreducibility testing.
//!
//! The engine is the Norton certificate: take an algebra element theta,
//! an irreducible factor f of a minimal polynomial of theta, and the
//! kernels of f(theta) and f(theta)^T.  Any proper invariant subspace W
//! either meets ker f(theta) (when f divides the characteristic
//! polynomial of theta restricted to W) or its annihilator meets
//! ker f(theta)^T.  So spinning every kernel line on both sides is a
//! complete, deterministic certificate.  When nullity(f(theta)) equals
//! deg f, a single spin per side suffices.
//!
//! Candidate thetas come from a deterministic pool (generators, sums,
//! products) before any seeded randomness, so verdicts on small inputs
//! never depend on random draws; randomness only affects how fast a
//! certificate is found, never its validity.

use super::{nullspace, poly_at_matrix, Echelon, Matrix, SparseVec, SubspaceBasis};
use crate::gf::poly::{seeded_rng, Poly};
use crate::gf::Field;
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub enum ModuleVerdict {
    Irreducible,
    /// A proper nonzero invariant subspace.
    Reducible(SubspaceBasis),
}

impl ModuleVerdict {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, ModuleVerdict::Irreducible)
    }
}

/// Orbit closure of `start` under the generators.
pub fn spin(f: &Field, n: usize, gens: &[Matrix], start: &[u64]) -> SubspaceBasis {
    let mut e = Echelon::new(f, n);
    e.insert(&SparseVec::from_dense(f, start));
    let mut queue: Vec<Vec<u64>> = vec![start.to_vec()];
    while let Some(v) = queue.pop() {
        for g in gens {
            let w = g.apply(&v);
            if e.insert(&SparseVec::from_dense(f, &w)) {
                if e.rank() == n {
                    return SubspaceBasis::whole(f, n);
                }
                queue.push(w);
            }
        }
    }
    SubspaceBasis::from_echelon(e)
}

/// Minimal polynomial of `m` on the single vector `v`.
fn krylov_min_poly(m: &Matrix, v: &[u64]) -> Poly {
    let f = &m.f;
    let n = m.rows;
    let k = f.k();
    let mut e = Echelon::new(f, 2 * n + 1);
    let mut cur = v.to_vec();
    let mut step = 0usize;
    loop {
        let mut aug = SparseVec::from_dense(f, &cur);
        aug.idx.push((n + step) as u32);
        aug.dat.extend_from_slice(&f.one_slice());
        let red = e.reduce(&aug);
        if red.idx.first().map_or(true, |&i| i as usize >= n) {
            let mut coeffs = vec![0u64; (step + 1) * k];
            for (pos, &i) in red.idx.iter().enumerate() {
                let deg = i as usize - n;
                coeffs[deg * k..(deg + 1) * k].copy_from_slice(&red.dat[pos * k..(pos + 1) * k]);
            }
            return Poly::from_coeffs(f, &coeffs).make_monic();
        }
        e.insert(&aug);
        cur = m.apply(&cur);
        step += 1;
    }
}

struct NortonCandidate {
    ker: SubspaceBasis,
    ker_t: SubspaceBasis,
    /// Projective lines in the kernel, as a cost estimate.
    lines: u128,
}

/// Projective representatives (first nonzero coordinate 1) of a subspace
/// given by its basis rows, streamed to `visit`; stops early when `visit`
/// returns false.
fn for_each_projective_combination(
    f: &Field,
    n: usize,
    basis: &SubspaceBasis,
    mut visit: impl FnMut(&[u64]) -> bool,
) -> bool {
    let k = f.k();
    let d = basis.dim();
    let elements: Vec<Vec<u64>> = f.all_elements().collect();
    let q = elements.len();
    // Leading coordinate index runs over basis positions; earlier
    // coordinates zero, leading one, the rest free.
    for lead in 0..d {
        let free = d - lead - 1;
        let mut counter = vec![0usize; free];
        loop {
            let mut acc = vec![0u64; n * k];
            basis.rows[lead].axpy_into(f, &f.one_slice(), &mut acc);
            for (t, &ci) in counter.iter().enumerate() {
                if ci != 0 {
                    basis.rows[lead + 1 + t].axpy_into(f, &elements[ci], &mut acc);
                }
            }
            if !visit(&acc) {
                return false;
            }
            // Increment the mixed-radix counter.
            let mut pos = 0;
            loop {
                if pos == free {
                    break;
                }
                counter[pos] += 1;
                if counter[pos] < q {
                    break;
                }
                counter[pos] = 0;
                pos += 1;
            }
            if pos == free {
                break;
            }
        }
    }
    true
}

fn projective_line_count(q: u128, d: usize) -> u128 {
    let mut total: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..d {
        total = total.saturating_add(pw);
        pw = pw.saturating_mul(q);
    }
    total
}

/// Decide irreducibility of the module defined by `gens` on F^n.
///
/// Every verdict is exact: `Irreducible` is backed by a complete Norton
/// certificate, `Reducible` carries an invariant subspace.
pub fn module_irreducible(f: &Field, n: usize, gens: &[Matrix], seed: u64) -> ModuleVerdict {
    assert!(n >= 1, "the zero module has no irreducibility verdict");
    for g in gens {
        assert_eq!((g.rows, g.cols), (n, n), "generators must be n x n");
        assert_eq!(g.f, *f, "generators must share one field");
    }
    if n == 1 {
        return ModuleVerdict::Irreducible;
    }
    // Cheap screen; also the only path that can decide for empty or
    // all-zero generator sets.
    let mut e0 = vec![0u64; n * f.k()];
    e0[0] = 1;
    let s = spin(f, n, gens, &e0);
    if s.dim() < n {
        return check_witness(f, n, gens, s);
    }
    if gens.iter().all(|g| g.is_zero()) || gens.is_empty() {
        // Every subspace invariant, n >= 2, yet spin(e_0) was full:
        // impossible; the screen above already returned.
        unreachable!("zero action spins one line");
    }

    let q: u128 = (f.p() as u128).pow(f.k() as u32);
    let gens_t: Vec<Matrix> = gens.iter().map(|g| g.transpose()).collect();
    // Spin-count budget keeping exhaustive certificates at roughly cubic
    // total cost.
    let n3 = (n as u128).pow(3);
    let allowed_lines = (2_000_000_000u128 / n3.max(1)).max(64);

    let mut best: Option<NortonCandidate> = None;
    let mut rng = seeded_rng(seed ^ 0x6e6f72746f6e);
    let max_rounds = 64 + deterministic_pool_len(gens.len());
    for round in 0..max_rounds {
        let Some(theta) = make_theta(f, n, gens, round, &mut rng) else {
            continue;
        };
        // Factors of the minimal polynomial on two probe vectors.
        let mut factors: Vec<Poly> = Vec::new();
        let mut frng = seeded_rng(seed ^ (round as u64).wrapping_mul(0x9e37_79b9));
        for pv in [0usize, n / 2] {
            let mut v = vec![0u64; n * f.k()];
            v[pv * f.k()] = 1;
            let mu = krylov_min_poly(&theta, &v);
            if mu.degree().unwrap_or(0) == 0 {
                continue;
            }
            for fac in mu.distinct_irreducible_factors(&mut frng) {
                if !factors.iter().any(|g| g.c == fac.c) {
                    factors.push(fac);
                }
            }
        }
        factors.sort_by(|a, b| (a.degree(), &a.c).cmp(&(b.degree(), &b.c)));
        let small_enough: Vec<&Poly> =
            factors.iter().filter(|fac| fac.degree().unwrap_or(0) <= 8).collect();
        let chosen: Vec<&Poly> = if small_enough.is_empty() {
            factors.iter().take(1).collect()
        } else {
            small_enough
        };
        for fac in chosen {
            let fmat = poly_at_matrix(fac, &theta);
            let ker = nullspace(&fmat);
            let d = ker.dim();
            if d == 0 {
                continue;
            }
            let ker_t = nullspace(&fmat.transpose());
            // Opportunistic spins of the kernel bases on both sides.
            for v in ker.rows.iter().take(3) {
                let sp = spin(f, n, gens, &v.to_dense(f, n));
                if sp.dim() < n {
                    return check_witness(f, n, gens, sp);
                }
            }
            for w in ker_t.rows.iter().take(3) {
                let sp = spin(f, n, &gens_t, &w.to_dense(f, n));
                if sp.dim() < n {
                    return check_witness(f, n, gens, perp(f, n, &sp));
                }
            }
            if d == fac.degree().unwrap() {
                // Multiplicity one: the two full spins above certify.
                return ModuleVerdict::Irreducible;
            }
            let lines = projective_line_count(q, d);
            if best.as_ref().map_or(true, |b| lines < b.lines) {
                best = Some(NortonCandidate { ker, ker_t, lines });
            }
        }
        if let Some(b) = &best {
            if b.lines <= allowed_lines {
                break;
            }
        }
    }

    // Exhaust the cheapest kernel on both sides; complete certificate.
    let b = best.expect("every theta yields a singular factor matrix");
    let mut witness: Option<SubspaceBasis> = None;
    for_each_projective_combination(f, n, &b.ker, |v| {
        let sp = spin(f, n, gens, v);
        if sp.dim() < n {
            witness = Some(sp);
            false
        } else {
            true
        }
    });
    if let Some(w) = witness {
        return check_witness(f, n, gens, w);
    }
    for_each_projective_combination(f, n, &b.ker_t, |w| {
        let sp = spin(f, n, &gens_t, w);
        if sp.dim() < n {
            witness = Some(perp(f, n, &sp));
            false
        } else {
            true
        }
    });
    if let Some(w) = witness {
        return check_witness(f, n, gens, w);
    }
    ModuleVerdict::Irreducible
}

fn deterministic_pool_len(g: usize) -> usize {
    g + g * g.min(4) + g * g.min(4)
}

/// Round-indexed theta: first the generators, then capped products and
/// sums, then seeded random combinations.
fn make_theta(f: &Field, n: usize, gens: &[Matrix], round: usize, rng: &mut crate::gf::poly::CzRng) -> Option<Matrix> {
    let g = gens.len();
    if round < g {
        return Some(gens[round].clone());
    }
    let cap = g.min(4);
    let prods = g * cap;
    if round < g + prods {
        let t = round - g;
        let (i, j) = (t / cap, t % cap);
        if i == j {
            return None;
        }
        return Some(gens[i].mul(&gens[j]));
    }
    if round < g + 2 * prods {
        let t = round - g - prods;
        let (i, j) = (t / cap, t % cap);
        if i >= j {
            return None;
        }
        return Some(gens[i].add(&gens[j]));
    }
    // Random linear combination of up to three generators plus one
    // random product.
    let mut acc = Matrix::zero(f, n, n);
    for _ in 0..3 {
        let i = rng.gen_range(0..g);
        let c = f.random_slice(rng);
        acc = acc.add(&gens[i].scale(&c));
    }
    let i = rng.gen_range(0..g);
    let j = rng.gen_range(0..g);
    Some(acc.add(&gens[i].mul(&gens[j])))
}

/// Annihilator of a row space.
fn perp(f: &Field, n: usize, rows: &SubspaceBasis) -> SubspaceBasis {
    let m = Matrix::from_sparse_rows(f, n, rows.rows.clone());
    nullspace(&m)
}

fn check_witness(f: &Field, n: usize, gens: &[Matrix], w: SubspaceBasis) -> ModuleVerdict {
    debug_assert!(w.dim() > 0 && w.dim() < n, "witness must be proper and nonzero");
    debug_assert!(
        {
            let e = w.to_echelon();
            gens.iter().all(|g| {
                w.rows
                    .iter()
                    .all(|r| e.contains(&SparseVec::from_dense(f, &g.apply(&r.to_dense(f, n)))))
            })
        },
        "witness must be invariant"
    );
    ModuleVerdict::Reducible(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;

    fn gf5() -> Field {
        FieldTower::new(1).field(5, 1).unwrap()
    }

    /// ad matrices for sl(2) with basis (e, h, f): [h,e]=2e, [h,f]=-2f,
    /// [e,f]=h.
    fn sl2_ad(f: &Field) -> Vec<Matrix> {
        let mut ade = Matrix::zero(f, 3, 3);
        // ad e: e->0, h->-2e, f->h.
        ade.set_entry(0, 1, &f.from_int(-2));
        ade.set_entry(1, 2, &[1]);
        let mut adh = Matrix::zero(f, 3, 3);
        adh.set_entry(0, 0, &[2]);
        adh.set_entry(2, 2, &f.from_int(-2));
        let mut adf = Matrix::zero(f, 3, 3);
        // ad f: e->-h, h->2f, f->0.
        adf.set_entry(1, 0, &f.from_int(-1));
        adf.set_entry(2, 1, &[2]);
        vec![ade, adh, adf]
    }

    #[test]
    fn identity_generators_are_reducible() {
        let f = gf5();
        let gens = vec![Matrix::identity(&f, 3)];
        match module_irreducible(&f, 3, &gens, 7) {
            ModuleVerdict::Reducible(w) => assert_eq!(w.dim(), 1),
            v => panic!("expected reducible, got {v:?}"),
        }
    }

    #[test]
    fn sl2_adjoint_is_irreducible_and_matches_exhaustive_oracle() {
        let f = gf5();
        let gens = sl2_ad(&f);
        // Oracle: spin every one of the 124 nonzero vectors (31 lines
        // suffice, but scaling is free to check too).
        let whole = SubspaceBasis::whole(&f, 3);
        let mut all_full = true;
        for a in 0..5u64 {
            for b in 0..5u64 {
                for c in 0..5u64 {
                    if a == 0 && b == 0 && c == 0 {
                        continue;
                    }
                    let s = spin(&f, 3, &gens, &[a, b, c]);
                    if !s.equals(&whole) {
                        all_full = false;
                    }
                }
            }
        }
        assert!(all_full, "every cyclic submodule of the sl2 adjoint is the whole space");
        assert!(module_irreducible(&f, 3, &gens, 7).is_irreducible());
    }

    #[test]
    fn gl2_adjoint_sees_the_center() {
        let f = gf5();
        // Basis (E11, E12, E21, E22); ad matrices of the four units.
        // [E11,E12]=E12, [E11,E21]=-E21, [E12,E21]=E11-E22,
        // [E12,E22]=E12, [E21,E22]=-E21.
        let mut ad11 = Matrix::zero(&f, 4, 4);
        ad11.set_entry(1, 1, &[1]);
        ad11.set_entry(2, 2, &f.from_int(-1));
        let mut ad12 = Matrix::zero(&f, 4, 4);
        // ad E12: E11 -> -E12, E21 -> E11-E22, E22 -> E12.
        ad12.set_entry(1, 0, &f.from_int(-1));
        ad12.set_entry(0, 2, &[1]);
        ad12.set_entry(3, 2, &f.from_int(-1));
        ad12.set_entry(1, 3, &[1]);
        let mut ad21 = Matrix::zero(&f, 4, 4);
        // ad E21: E11 -> E21, E12 -> E22-E11, E22 -> -E21.
        ad21.set_entry(2, 0, &[1]);
        ad21.set_entry(0, 1, &f.from_int(-1));
        ad21.set_entry(3, 1, &[1]);
        ad21.set_entry(2, 3, &f.from_int(-1));
        let mut ad22 = Matrix::zero(&f, 4, 4);
        // ad E22: E12 -> -E12, E21 -> E21.
        ad22.set_entry(1, 1, &f.from_int(-1));
        ad22.set_entry(2, 2, &[1]);
        let gens = vec![ad11, ad12, ad21, ad22];
        match module_irreducible(&f, 4, &gens, 7) {
            ModuleVerdict::Reducible(w) => {
                // The scalar line is invariant; the witness must be a
                // proper invariant subspace, and the center lies in some
                // witness chain.  Verify the returned one directly.
                assert!(w.dim() >= 1 && w.dim() < 4);
                for g in &gens {
                    for r in &w.rows {
                        let img = g.apply(&r.to_dense(&f, 4));
                        assert!(w.contains_dense(&img));
                    }
                }
            }
            v => panic!("expected reducible, got {v:?}"),
        }
    }

    #[test]
    fn direct_sum_of_two_copies_is_detected() {
        // sl2 acting diagonally on V ⊕ V with V the adjoint module:
        // every theta has even nullities, exercising the exhaustive
        // kernel sweep rather than the multiplicity-one shortcut.
        let f = gf5();
        let small = sl2_ad(&f);
        let mut gens = Vec::new();
        for g in &small {
            let mut big = Matrix::zero(&f, 6, 6);
            for i in 0..3 {
                for j in 0..3 {
                    if let Some(c) = g.entry(i, j) {
                        let c = c.to_vec();
                        big.set_entry(i, j, &c);
                        big.set_entry(i + 3, j + 3, &c);
                    }
                }
            }
            gens.push(big);
        }
        match module_irreducible(&f, 6, &gens, 7) {
            ModuleVerdict::Reducible(w) => {
                assert!(w.dim() == 3, "witness should be one copy, got dim {}", w.dim());
            }
            v => panic!("expected reducible, got {v:?}"),
        }
    }
}
