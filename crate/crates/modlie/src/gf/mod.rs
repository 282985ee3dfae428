//! Arithmetic in GF(p^k) for odd p, organised as a tower of extensions
//! with fixed, deterministically chosen embeddings.
//!
//! A field is represented absolutely as GF(p)[T]/(m) for a monic
//! irreducible modulus m of degree k found by a seeded search, so the same
//! tower seed always reproduces the same moduli and embeddings.  Elements
//! are coordinate vectors of length k over the prime field in the power
//! basis of T.
//!
//! Beyond the ring operations the module provides Frobenius powers,
//! absolute traces, and a pointwise Artin–Schreier section: for a given
//! `a` it returns a root of T^p - T - a, extending the tower by a degree p
//! step exactly when the absolute trace of `a` is nonzero.

pub mod poly;

use poly::{is_prime_u64, seeded_rng, Poly};
use rand::Rng;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GfError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic {0} is below 5 and admitted only for dedicated constructors")]
    SmallCharacteristic(u64),
    #[error("extension degree must be at least 1")]
    UnsupportedDegree,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("no embedding: source degree {src_k} does not divide target degree {dst_k}")]
    NoEmbedding { src_k: usize, dst_k: usize },
    #[error("fields come from different towers or characteristics")]
    IncompatibleFields,
}

/// Immutable description of one field in a tower.
#[derive(Debug)]
pub struct FieldDesc {
    p: u64,
    k: usize,
    /// Monic modulus of degree k over GF(p), low degree first, length k+1.
    modulus: Vec<u64>,
    /// Tower-unique identifier used for embedding caches.
    id: u64,
    zero: Vec<u64>,
}

/// Cheap-to-clone handle to a field.
#[derive(Clone)]
pub struct Field(Arc<FieldDesc>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p(), self.k())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus
    }
}
impl Eq for Field {}

impl Field {
    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn k(&self) -> usize {
        self.0.k
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn order(&self) -> u128 {
        let mut acc: u128 = 1;
        for _ in 0..self.0.k {
            acc *= self.0.p as u128;
        }
        acc
    }

    /// Standalone GF(p) handle.  Equality is by (p, k, modulus), so this
    /// agrees with any tower's prime field.
    pub fn prime_field(p: u64) -> Field {
        debug_assert!(is_prime_u64(p), "characteristic must be prime");
        Field(Arc::new(FieldDesc { p, k: 1, modulus: vec![0, 1], id: u64::MAX - 1, zero: vec![0] }))
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    // ---- slice level arithmetic -------------------------------------
    //
    // Hot paths operate on raw coordinate slices of length k to avoid
    // per-element allocation; `FieldElement` wraps these for the public
    // API.

    pub fn zero_slice(&self) -> Vec<u64> {
        vec![0; self.0.k]
    }

    pub fn zero_ref(&self) -> &[u64] {
        &self.0.zero
    }

    pub fn one_slice(&self) -> Vec<u64> {
        let mut v = vec![0; self.0.k];
        v[0] = 1;
        v
    }

    pub fn is_zero_slice(&self, a: &[u64]) -> bool {
        a.iter().all(|&w| w == 0)
    }

    pub fn is_one_slice(&self, a: &[u64]) -> bool {
        a[0] == 1 && a[1..].iter().all(|&w| w == 0)
    }

    pub fn from_int(&self, n: i64) -> Vec<u64> {
        let p = self.0.p as i64;
        let mut r = n % p;
        if r < 0 {
            r += p;
        }
        let mut v = vec![0; self.0.k];
        v[0] = r as u64;
        v
    }

    pub fn add_slice(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.0.p;
        a.iter().zip(b).map(|(&x, &y)| (x + y) % p).collect()
    }

    pub fn add_assign_slice(&self, a: &mut [u64], b: &[u64]) {
        let p = self.0.p;
        for (x, &y) in a.iter_mut().zip(b) {
            *x = (*x + y) % p;
        }
    }

    pub fn sub_slice(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.0.p;
        a.iter().zip(b).map(|(&x, &y)| (x + p - y) % p).collect()
    }

    pub fn neg_slice(&self, a: &[u64]) -> Vec<u64> {
        let p = self.0.p;
        a.iter().map(|&x| (p - x) % p).collect()
    }

    pub fn scale_int_slice(&self, a: &[u64], n: u64) -> Vec<u64> {
        let p = self.0.p;
        let n = n % p;
        a.iter().map(|&x| poly::mulmod_u64(x, n, p)).collect()
    }

    /// a*b + into, accumulated in place; `into` has length k.
    pub fn mul_add_assign(&self, into: &mut [u64], a: &[u64], b: &[u64]) {
        let prod = self.mul_slice(a, b);
        self.add_assign_slice(into, &prod);
    }

    pub fn mul_slice(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.0.p;
        let k = self.0.k;
        if k == 1 {
            return vec![poly::mulmod_u64(a[0], b[0], p)];
        }
        // Schoolbook product followed by reduction by the monic modulus.
        let mut prod = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + poly::mulmod_u64(a[i], b[j], p)) % p;
            }
        }
        self.reduce_by_modulus(&mut prod);
        prod.truncate(k);
        prod
    }

    fn reduce_by_modulus(&self, c: &mut Vec<u64>) {
        let p = self.0.p;
        let k = self.0.k;
        let m = &self.0.modulus;
        while c.len() > k {
            let d = c.len() - 1;
            let lead = c[d];
            if lead != 0 {
                // c -= lead * T^{d-k} * modulus (modulus monic).
                for j in 0..=k {
                    let t = poly::mulmod_u64(lead, m[j], p);
                    let idx = d - k + j;
                    c[idx] = (c[idx] + p - t % p) % p;
                }
            }
            c.pop();
        }
    }

    pub fn inv_slice(&self, a: &[u64]) -> Result<Vec<u64>, GfError> {
        if self.is_zero_slice(a) {
            return Err(GfError::DivisionByZero);
        }
        let p = self.0.p;
        if self.0.k == 1 {
            return Ok(vec![modinv_prime(a[0], p)]);
        }
        // Extended Euclid in GF(p)[T] against the modulus.
        let mut r0: Vec<u64> = self.0.modulus.clone();
        let mut r1: Vec<u64> = trim(a.to_vec());
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = prime_poly_divrem(&r0, &r1, p);
            let s = prime_poly_sub(&s0, &prime_poly_mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        debug_assert_eq!(r0.len(), 1, "modulus is irreducible");
        let c = modinv_prime(r0[0], p);
        let mut out: Vec<u64> = s0.iter().map(|&x| poly::mulmod_u64(x, c, p)).collect();
        out.resize(self.0.k, 0);
        Ok(out)
    }

    pub fn pow_slice(&self, a: &[u64], mut e: u128) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.one_slice();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slice(&acc, &base);
            }
            base = self.mul_slice(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius x -> x^p.
    pub fn frobenius_slice(&self, a: &[u64]) -> Vec<u64> {
        self.pow_slice(a, self.0.p as u128)
    }

    /// Inverse Frobenius, using x -> x^{p^{k-1}}.
    pub fn pth_root_slice(&self, a: &[u64]) -> Vec<u64> {
        let mut acc = a.to_vec();
        for _ in 0..self.0.k.saturating_sub(1) {
            acc = self.frobenius_slice(&acc);
        }
        acc
    }

    /// Absolute trace down to GF(p), returned as a residue.
    pub fn trace_to_prime(&self, a: &[u64]) -> u64 {
        let mut acc = self.zero_slice();
        let mut cur = a.to_vec();
        for _ in 0..self.0.k {
            self.add_assign_slice(&mut acc, &cur);
            cur = self.frobenius_slice(&cur);
        }
        debug_assert!(acc[1..].iter().all(|&w| w == 0), "trace lies in the prime field");
        acc[0]
    }

    pub fn random_slice(&self, rng: &mut poly::CzRng) -> Vec<u64> {
        (0..self.0.k).map(|_| rng.gen_range(0..self.0.p)).collect()
    }

    /// Iterate over every element of the field (intended for small fields
    /// in exhaustive tests).
    pub fn all_elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        let p = self.0.p;
        let k = self.0.k;
        let total = self.order();
        (0..total).map(move |mut n| {
            let mut v = vec![0u64; k];
            for w in v.iter_mut() {
                *w = (n % p as u128) as u64;
                n /= p as u128;
            }
            v
        })
    }

    pub fn element(&self, coords: Vec<u64>) -> FieldElement {
        assert_eq!(coords.len(), self.0.k, "coordinate length must equal the degree");
        let p = self.0.p;
        let c = coords.into_iter().map(|w| w % p).collect();
        FieldElement { field: self.clone(), c }
    }

    pub fn element_from_int(&self, n: i64) -> FieldElement {
        FieldElement { field: self.clone(), c: self.from_int(n) }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { field: self.clone(), c: self.zero_slice() }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { field: self.clone(), c: self.one_slice() }
    }
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn modinv_prime(a: u64, p: u64) -> u64 {
    // Fermat inverse; p is prime and a nonzero mod p.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly::mulmod_u64(acc, base, p);
        }
        base = poly::mulmod_u64(base, base, p);
        e >>= 1;
    }
    acc
}

// Polynomial helpers over the prime field, coefficients as plain residues.
fn prime_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + poly::mulmod_u64(x, y, p)) % p;
        }
    }
    trim(c)
}

fn prime_poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut c = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        c[i] = (x + p - y) % p;
    }
    trim(c)
}

fn prime_poly_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let inv = modinv_prime(b[db], p);
    let mut quot = vec![0u64; a.len().saturating_sub(db)];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let f = poly::mulmod_u64(rem[dr], inv, p);
        if f != 0 {
            quot[dr - db] = f;
            for j in 0..=db {
                let t = poly::mulmod_u64(f, b[j], p);
                rem[dr - db + j] = (rem[dr - db + j] + p - t) % p;
            }
        }
        rem.pop();
        rem = trim(rem);
        if rem.len() <= db {
            break;
        }
    }
    (trim(quot), trim(rem))
}

/// A single element of a field, carrying its field handle.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    c: Vec<u64>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.k() == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "{:?} in {:?}", self.c, self.field)
        }
    }
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[u64] {
        &self.c
    }

    pub fn into_coords(self) -> Vec<u64> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero_slice(&self.c)
    }

    fn check(&self, other: &FieldElement) -> Result<(), GfError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(GfError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(other)?;
        Ok(FieldElement { field: self.field.clone(), c: self.field.add_slice(&self.c, &other.c) })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(other)?;
        Ok(FieldElement { field: self.field.clone(), c: self.field.sub_slice(&self.c, &other.c) })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(other)?;
        Ok(FieldElement { field: self.field.clone(), c: self.field.mul_slice(&self.c, &other.c) })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(other)?;
        let inv = self.field.inv_slice(&other.c)?;
        Ok(FieldElement { field: self.field.clone(), c: self.field.mul_slice(&self.c, &inv) })
    }

    pub fn inv(&self) -> Result<FieldElement, GfError> {
        Ok(FieldElement { field: self.field.clone(), c: self.field.inv_slice(&self.c)? })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { field: self.field.clone(), c: self.field.neg_slice(&self.c) }
    }

    pub fn pow(&self, e: u128) -> FieldElement {
        FieldElement { field: self.field.clone(), c: self.field.pow_slice(&self.c, e) }
    }

    /// j-fold Frobenius x -> x^{p^j}.
    pub fn frobenius(&self, j: usize) -> FieldElement {
        let mut c = self.c.clone();
        for _ in 0..j {
            c = self.field.frobenius_slice(&c);
        }
        FieldElement { field: self.field.clone(), c }
    }

    /// Absolute trace to GF(p) as a residue.
    pub fn trace_to_prime(&self) -> u64 {
        self.field.trace_to_prime(&self.c)
    }
}

struct TowerState {
    fields: HashMap<(u64, usize), Field>,
    /// (source id, target id) -> image of the source generator in target
    /// coordinates.
    embeddings: HashMap<(u64, u64), Vec<u64>>,
    next_id: u64,
}

/// Append-only registry of fields with fixed pairwise embeddings.
///
/// All moduli and embeddings are chosen deterministically from the tower
/// seed, so repeated runs agree element-for-element.
pub struct FieldTower {
    seed: u64,
    state: Mutex<TowerState>,
}

impl FieldTower {
    pub fn new(seed: u64) -> Self {
        FieldTower {
            seed,
            state: Mutex::new(TowerState { fields: HashMap::new(), embeddings: HashMap::new(), next_id: 0 }),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// GF(p^k) for odd p at least 5.
    pub fn field(&self, p: u64, k: usize) -> Result<Field, GfError> {
        if !is_prime_u64(p) {
            return Err(GfError::NonPrime(p));
        }
        if p < 5 {
            return Err(GfError::SmallCharacteristic(p));
        }
        self.field_unchecked_char(p, k)
    }

    /// GF(p^k) admitting p in {2, 3}; intended for the constructors that
    /// genuinely need small characteristic.
    pub fn field_small_char(&self, p: u64, k: usize) -> Result<Field, GfError> {
        if !is_prime_u64(p) {
            return Err(GfError::NonPrime(p));
        }
        self.field_unchecked_char(p, k)
    }

    fn field_unchecked_char(&self, p: u64, k: usize) -> Result<Field, GfError> {
        if k == 0 {
            return Err(GfError::UnsupportedDegree);
        }
        let mut st = self.state.lock().unwrap();
        if let Some(f) = st.fields.get(&(p, k)) {
            return Ok(f.clone());
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            self.search_modulus(p, k)
        };
        let id = st.next_id;
        st.next_id += 1;
        let field = Field(Arc::new(FieldDesc { p, k, modulus, id, zero: vec![0; k] }));
        st.fields.insert((p, k), field.clone());
        Ok(field)
    }

    fn search_modulus(&self, p: u64, k: usize) -> Vec<u64> {
        // Seeded random search over monic degree-k polynomials; the prime
        // subfield is enough to express and test the candidates.
        let prime = Field(Arc::new(FieldDesc { p, k: 1, modulus: vec![0, 1], id: u64::MAX, zero: vec![0] }));
        let mut rng = seeded_rng(mix(self.seed, p, k as u64, 0x117));
        loop {
            let mut coeffs: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p)).collect();
            coeffs.push(1);
            let cand = Poly::from_coeffs(&prime, &coeffs);
            if cand.is_irreducible() {
                return coeffs;
            }
        }
    }

    /// Image of `x` under the tower embedding into `target`.
    pub fn embed(&self, x: &FieldElement, target: &Field) -> Result<FieldElement, GfError> {
        let src = x.field().clone();
        if src == *target {
            return Ok(x.clone());
        }
        if src.p() != target.p() {
            return Err(GfError::IncompatibleFields);
        }
        if target.k() % src.k() != 0 {
            return Err(GfError::NoEmbedding { src_k: src.k(), dst_k: target.k() });
        }
        if src.k() == 1 {
            // Constants embed canonically.
            let mut c = vec![0; target.k()];
            c[0] = x.coords()[0];
            return Ok(FieldElement { field: target.clone(), c });
        }
        let gen_img = self.generator_image(&src, target)?;
        // x = sum c_i T^i maps to sum c_i gen_img^i.
        let mut acc = target.zero_slice();
        let mut pw = target.one_slice();
        for i in 0..src.k() {
            let ci = x.coords()[i];
            if ci != 0 {
                let term = target.scale_int_slice(&pw, ci);
                target.add_assign_slice(&mut acc, &term);
            }
            if i + 1 < src.k() {
                pw = target.mul_slice(&pw, &gen_img);
            }
        }
        Ok(FieldElement { field: target.clone(), c: acc })
    }

    fn generator_image(&self, src: &Field, dst: &Field) -> Result<Vec<u64>, GfError> {
        {
            let st = self.state.lock().unwrap();
            if let Some(img) = st.embeddings.get(&(src.id(), dst.id())) {
                return Ok(img.clone());
            }
        }
        // Lift the source modulus to a polynomial over dst and take the
        // lexicographically smallest root; this fixes the embedding.
        let k = dst.k();
        let mut coeffs = Vec::with_capacity((src.k() + 1) * k);
        for &c in src.modulus() {
            let mut v = vec![0u64; k];
            v[0] = c;
            coeffs.extend_from_slice(&v);
        }
        let f = Poly::from_coeffs(dst, &coeffs);
        let mut rng = seeded_rng(mix(self.seed, src.id(), dst.id(), 0x5eed));
        let roots = f.roots_in_field(&mut rng);
        let img = roots.into_iter().next().ok_or(GfError::NoEmbedding { src_k: src.k(), dst_k: dst.k() })?;
        let mut st = self.state.lock().unwrap();
        st.embeddings.insert((src.id(), dst.id()), img.clone());
        Ok(img)
    }

    /// A root of T^p - T = a.  The root is canonical: coordinates are the
    /// echelon particular solution with free variables zero, so a = 0
    /// yields 0.  When the absolute trace of `a` is nonzero the root lives
    /// in the degree-p extension, which is created and registered.
    pub fn artin_schreier_root(&self, a: &FieldElement) -> Result<FieldElement, GfError> {
        let f = a.field().clone();
        if let Some(sol) = artin_schreier_in_field(&f, a.coords()) {
            return Ok(FieldElement { field: f, c: sol });
        }
        let big = self.field_unchecked_char(f.p(), f.k() * f.p() as usize)?;
        let img = self.embed(a, &big)?;
        let sol = artin_schreier_in_field(&big, img.coords())
            .expect("trace vanishes after extension of degree p");
        Ok(FieldElement { field: big, c: sol })
    }
}

/// Solve b^p - b = a inside the field if possible.  The map is GF(p)-linear
/// on coordinates, so this is k x k Gaussian elimination over GF(p).
fn artin_schreier_in_field(f: &Field, a: &[u64]) -> Option<Vec<u64>> {
    let k = f.k();
    let p = f.p();
    // Columns: images of basis vectors under x -> x^p - x.
    let mut cols = Vec::with_capacity(k);
    for i in 0..k {
        let mut e = vec![0u64; k];
        e[i] = 1;
        let fr = f.frobenius_slice(&e);
        cols.push(f.sub_slice(&fr, &e));
    }
    // Augmented system [A | a] over GF(p).
    let mut rows = vec![vec![0u64; k + 1]; k];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..k {
            rows[i][j] = col[i];
        }
    }
    for i in 0..k {
        rows[i][k] = a[i];
    }
    // Gaussian elimination to reduced echelon form.
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let mut pr = None;
        for i in r..k {
            if rows[i][c] != 0 {
                pr = Some(i);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        rows.swap(r, pr);
        let inv = modinv_prime(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = poly::mulmod_u64(*v, inv, p);
        }
        for i in 0..k {
            if i != r && rows[i][c] != 0 {
                let factor = rows[i][c];
                for j in 0..=k {
                    let t = poly::mulmod_u64(factor, rows[r][j], p);
                    rows[i][j] = (rows[i][j] + p - t) % p;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == k {
            break;
        }
    }
    // Inconsistency: a pivot in the augmented column.
    for i in r..k {
        if rows[i][k] != 0 {
            return None;
        }
    }
    let mut sol = vec![0u64; k];
    for (row_idx, &c) in pivot_cols.iter().enumerate() {
        sol[c] = rows[row_idx][k];
    }
    Some(sol)
}

fn mix(a: u64, b: u64, c: u64, d: u64) -> u64 {
    let mut h = a ^ 0x9e37_79b9_7f4a_7c15;
    for v in [b, c, d] {
        h ^= v.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = h.rotate_left(27).wrapping_mul(0x94d0_49bb_1331_11eb);
    }
    h
}

static DEFAULT_TOWER: OnceLock<FieldTower> = OnceLock::new();

/// Default seed for reproducible runs; override by building a fresh tower.
pub const DEFAULT_TOWER_SEED: u64 = 0x6d6f_646c_6965;

/// Process-wide tower used when no explicit tower is threaded through.
pub fn default_tower() -> &'static FieldTower {
    DEFAULT_TOWER.get_or_init(|| FieldTower::new(DEFAULT_TOWER_SEED))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_characteristic() {
        let tower = FieldTower::new(1);
        assert!(matches!(tower.field(6, 1), Err(GfError::NonPrime(6))));
        assert!(matches!(tower.field(3, 1), Err(GfError::SmallCharacteristic(3))));
        assert!(tower.field_small_char(2, 1).is_ok());
    }

    #[test]
    fn gf25_multiplicative_order() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 2).unwrap();
        // Every nonzero element satisfies x^24 = 1 and the orders divide 24.
        for c in f.all_elements() {
            if f.is_zero_slice(&c) {
                continue;
            }
            assert!(f.is_one_slice(&f.pow_slice(&c, 24)));
        }
        // Some element has full order 24: count solutions of x^12 = 1 and
        // x^8 = 1; a generator avoids both.
        let mut found = false;
        for c in f.all_elements() {
            if f.is_zero_slice(&c) {
                continue;
            }
            if !f.is_one_slice(&f.pow_slice(&c, 12)) && !f.is_one_slice(&f.pow_slice(&c, 8)) {
                found = true;
                break;
            }
        }
        assert!(found, "GF(25) has a multiplicative generator");
    }

    #[test]
    fn frobenius_fixed_field_is_prime_field() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 2).unwrap();
        let mut fixed = 0;
        for c in f.all_elements() {
            if f.frobenius_slice(&c) == c {
                fixed += 1;
            }
        }
        assert_eq!(fixed, 5);
    }

    #[test]
    fn field_axioms_exhaustive_gf25() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 2).unwrap();
        let els: Vec<_> = f.all_elements().collect();
        for a in &els {
            for b in &els {
                // Commutativity and distributivity spot the usual bugs.
                assert_eq!(f.mul_slice(a, b), f.mul_slice(b, a));
                let ab = f.add_slice(a, b);
                for c in [&els[3], &els[17]] {
                    let lhs = f.mul_slice(&ab, c);
                    let rhs = f.add_slice(&f.mul_slice(a, c), &f.mul_slice(b, c));
                    assert_eq!(lhs, rhs);
                }
            }
        }
        for a in &els {
            if f.is_zero_slice(a) {
                assert!(f.inv_slice(a).is_err());
                continue;
            }
            let inv = f.inv_slice(a).unwrap();
            assert!(f.is_one_slice(&f.mul_slice(a, &inv)));
        }
    }

    #[test]
    fn artin_schreier_trace_zero_stays_in_field() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 2).unwrap();
        for c in f.all_elements() {
            let a = f.element(c.clone());
            if a.trace_to_prime() != 0 {
                continue;
            }
            let b = tower.artin_schreier_root(&a).unwrap();
            assert_eq!(b.field(), &f, "root stays in GF(25)");
            let lhs = b.pow(5).sub(&b).unwrap();
            assert_eq!(lhs.coords(), a.coords());
        }
    }

    #[test]
    fn artin_schreier_nonzero_trace_extends() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 1).unwrap();
        let a = f.element_from_int(1);
        let b = tower.artin_schreier_root(&a).unwrap();
        assert_eq!(b.field().k(), 5, "root of T^5 - T - 1 lives in GF(5^5)");
        let lhs = b.pow(5).sub(&b).unwrap();
        let a_up = tower.embed(&a, b.field()).unwrap();
        assert_eq!(lhs.coords(), a_up.coords());
    }

    #[test]
    fn artin_schreier_zero_maps_to_zero() {
        let tower = FieldTower::new(1);
        let f = tower.field(5, 1).unwrap();
        let b = tower.artin_schreier_root(&f.zero()).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let tower = FieldTower::new(1);
        let small = tower.field(5, 2).unwrap();
        let big = tower.field(5, 4).unwrap();
        let mut rng = seeded_rng(42);
        for _ in 0..50 {
            let a = small.element(small.random_slice(&mut rng));
            let b = small.element(small.random_slice(&mut rng));
            let ea = tower.embed(&a, &big).unwrap();
            let eb = tower.embed(&b, &big).unwrap();
            let sum = tower.embed(&a.add(&b).unwrap(), &big).unwrap();
            let prod = tower.embed(&a.mul(&b).unwrap(), &big).unwrap();
            assert_eq!(ea.add(&eb).unwrap(), sum);
            assert_eq!(ea.mul(&eb).unwrap(), prod);
        }
        // The embedding fixes the prime field.
        let c = small.element_from_int(3);
        let e = tower.embed(&c, &big).unwrap();
        assert_eq!(e.coords()[0], 3);
        assert!(e.coords()[1..].iter().all(|&w| w == 0));
    }

    #[test]
    fn modulus_search_is_deterministic() {
        let t1 = FieldTower::new(99);
        let t2 = FieldTower::new(99);
        let f1 = t1.field(7, 3).unwrap();
        let f2 = t2.field(7, 3).unwrap();
        assert_eq!(f1.modulus(), f2.modulus());
        let t3 = FieldTower::new(100);
        let f3 = t3.field(7, 3).unwrap();
        // Different seeds are allowed to coincide, but the modulus is
        // always irreducible and monic.
        assert_eq!(f3.modulus().len(), 4);
        assert_eq!(*f3.modulus().last().unwrap(), 1);
    }

    #[test]
    fn element_arithmetic_wrappers() {
        let tower = FieldTower::new(1);
        let f5 = tower.field(5, 1).unwrap();
        let f7 = tower.field(7, 1).unwrap();
        let a = f5.element_from_int(3);
        let b = f7.element_from_int(2);
        assert!(matches!(a.add(&b), Err(GfError::FieldMismatch)));
        let two = f5.element_from_int(2);
        assert_eq!(a.mul(&two).unwrap().coords(), &[1]);
        assert_eq!(a.div(&two).unwrap().coords(), &[4]);
        assert!(a.div(&f5.zero()).is_err());
    }
}
