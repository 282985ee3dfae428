//! Univariate polynomial arithmetic over a [`Field`], used internally for
//! modulus searches, characteristic polynomial factorisation and root
//! finding.  Coefficients are stored low degree first as flat coordinate
//! slices (stride `k` words per coefficient).

use super::Field;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense univariate polynomial over `f`, normalised so the leading
/// coefficient is nonzero (the zero polynomial has an empty coefficient
/// vector).
#[derive(Clone, Debug)]
pub struct Poly {
    pub f: Field,
    /// Flat coefficient words, `k` per coefficient, low degree first.
    pub c: Vec<u64>,
}

impl Poly {
    pub fn zero(f: &Field) -> Self {
        Poly { f: f.clone(), c: Vec::new() }
    }

    pub fn one(f: &Field) -> Self {
        Poly { f: f.clone(), c: f.one_slice() }
    }

    /// Monomial `T`.
    pub fn x(f: &Field) -> Self {
        let k = f.k();
        let mut c = vec![0; 2 * k];
        c[k] = 1;
        Poly { f: f.clone(), c }
    }

    pub fn from_coeffs(f: &Field, coeffs: &[u64]) -> Self {
        let mut p = Poly { f: f.clone(), c: coeffs.to_vec() };
        p.normalize();
        p
    }

    /// Constant polynomial from one field element (coordinate slice).
    pub fn constant(f: &Field, a: &[u64]) -> Self {
        let mut p = Poly { f: f.clone(), c: a.to_vec() };
        p.normalize();
        p
    }

    pub fn degree(&self) -> Option<usize> {
        let k = self.f.k();
        if self.c.is_empty() { None } else { Some(self.c.len() / k - 1) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, i: usize) -> &[u64] {
        let k = self.f.k();
        if (i + 1) * k <= self.c.len() { &self.c[i * k..(i + 1) * k] } else { self.f.zero_ref() }
    }

    fn normalize(&mut self) {
        let k = self.f.k();
        while !self.c.is_empty() && self.c[self.c.len() - k..].iter().all(|&w| w == 0) {
            self.c.truncate(self.c.len() - k);
        }
    }

    pub fn leading(&self) -> &[u64] {
        let k = self.f.k();
        &self.c[self.c.len() - k..]
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.f.is_one_slice(self.leading())
    }

    pub fn make_monic(&self) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = self.f.inv_slice(self.leading()).expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn scale(&self, a: &[u64]) -> Poly {
        let f = &self.f;
        let k = f.k();
        let mut c = vec![0; self.c.len()];
        for i in 0..self.c.len() / k {
            let prod = f.mul_slice(&self.c[i * k..(i + 1) * k], a);
            c[i * k..(i + 1) * k].copy_from_slice(&prod);
        }
        let mut p = Poly { f: f.clone(), c };
        p.normalize();
        p
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let f = &self.f;
        let k = f.k();
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0; n];
        c[..self.c.len()].copy_from_slice(&self.c);
        for i in 0..other.c.len() / k {
            let s = f.add_slice(&c[i * k..(i + 1) * k], &other.c[i * k..(i + 1) * k]);
            c[i * k..(i + 1) * k].copy_from_slice(&s);
        }
        let mut p = Poly { f: f.clone(), c };
        p.normalize();
        p
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        let f = &self.f;
        let k = f.k();
        let mut c = vec![0; self.c.len()];
        for i in 0..self.c.len() / k {
            let s = f.neg_slice(&self.c[i * k..(i + 1) * k]);
            c[i * k..(i + 1) * k].copy_from_slice(&s);
        }
        Poly { f: f.clone(), c }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = &self.f;
        let k = f.k();
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        let da = self.c.len() / k;
        let db = other.c.len() / k;
        let mut c = vec![0; (da + db - 1) * k];
        for i in 0..da {
            let ai = &self.c[i * k..(i + 1) * k];
            if ai.iter().all(|&w| w == 0) {
                continue;
            }
            for j in 0..db {
                let prod = f.mul_slice(ai, &other.c[j * k..(j + 1) * k]);
                let t = (i + j) * k;
                let s = f.add_slice(&c[t..t + k], &prod);
                c[t..t + k].copy_from_slice(&s);
            }
        }
        let mut p = Poly { f: f.clone(), c };
        p.normalize();
        p
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        let f = &self.f;
        let k = f.k();
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.degree().unwrap();
        let mut rem = self.c.clone();
        let lead_inv = f.inv_slice(div.leading()).expect("nonzero leading coefficient");
        let mut quot: Vec<u64> = Vec::new();
        while !rem.is_empty() && rem.len() / k > dd {
            let dr = rem.len() / k - 1;
            let factor = f.mul_slice(&rem[dr * k..(dr + 1) * k], &lead_inv);
            let shift = dr - dd;
            if quot.len() < (shift + 1) * k {
                quot.resize((shift + 1) * k, 0);
            }
            quot[shift * k..(shift + 1) * k].copy_from_slice(&factor);
            for j in 0..=dd {
                let prod = f.mul_slice(div.coeff(j), &factor);
                let t = (shift + j) * k;
                let s = f.sub_slice(&rem[t..t + k], &prod);
                rem[t..t + k].copy_from_slice(&s);
            }
            // The leading term cancels exactly.
            let mut r = Poly { f: f.clone(), c: rem };
            r.normalize();
            rem = r.c;
        }
        let mut q = Poly { f: f.clone(), c: quot };
        q.normalize();
        let mut r = Poly { f: f.clone(), c: rem };
        r.normalize();
        (q, r)
    }

    pub fn rem(&self, div: &Poly) -> Poly {
        self.divrem(div).1
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() { a } else { a.make_monic() }
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        let f = &self.f;
        let k = f.k();
        if self.c.len() / k <= 1 {
            return Poly::zero(f);
        }
        let d = self.c.len() / k - 1;
        let mut c = vec![0; d * k];
        for i in 1..=d {
            let s = f.scale_int_slice(&self.c[i * k..(i + 1) * k], i as u64);
            c[(i - 1) * k..i * k].copy_from_slice(&s);
        }
        let mut p = Poly { f: f.clone(), c };
        p.normalize();
        p
    }

    pub fn eval(&self, at: &[u64]) -> Vec<u64> {
        let f = &self.f;
        let k = f.k();
        let mut acc = f.zero_slice();
        for i in (0..self.c.len() / k).rev() {
            acc = f.mul_slice(&acc, at);
            acc = f.add_slice(&acc, &self.c[i * k..(i + 1) * k]);
        }
        acc
    }

    /// `self^e mod m` by square and multiply.
    pub fn modpow(&self, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut acc = Poly::one(&self.f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Largest squarefree divisor, valid in characteristic p: strips both
    /// repeated factors and p-th power content.
    pub fn squarefree_part(&self) -> Poly {
        let f = self.f.clone();
        let p = f.p() as usize;
        let poly = self.make_monic();
        if poly.degree().unwrap_or(0) == 0 {
            return Poly::one(&f);
        }
        let d = poly.derivative();
        if d.is_zero() {
            // poly = g(T^p); extract p-th roots of the coefficients.
            let deg = poly.degree().unwrap();
            let mut c = Vec::new();
            for i in (0..=deg).step_by(p) {
                c.extend_from_slice(&f.pth_root_slice(poly.coeff(i)));
            }
            let g = Poly { f: f.clone(), c };
            return g.squarefree_part();
        }
        let g = poly.gcd(&d);
        if g.degree() == Some(0) {
            return poly;
        }
        let (q, _) = poly.divrem(&g);
        // q = product of factors with multiplicity prime to p; factors with
        // multiplicity divisible by p survive inside g.
        let rest = g.squarefree_part();
        let extra = rest.divrem(&rest.gcd(&q)).0;
        q.mul(&extra).make_monic()
    }

    /// Distinct degree factorisation: returns pairs `(d, product of all
    /// monic irreducible factors of degree d)`.  Input must be squarefree.
    pub fn distinct_degree(&self) -> Vec<(usize, Poly)> {
        let f = self.f.clone();
        let q = f.order();
        let mut out = Vec::new();
        let mut v = self.make_monic();
        let mut h = Poly::x(&f);
        let mut d = 0;
        while v.degree().unwrap_or(0) > 0 {
            d += 1;
            if 2 * d > v.degree().unwrap() {
                out.push((v.degree().unwrap(), v.clone()));
                break;
            }
            h = h.modpow(q, &v);
            let diff = h.sub(&Poly::x(&f));
            let g = diff.gcd(&v);
            if g.degree().unwrap_or(0) > 0 {
                out.push((d, g.clone()));
                v = v.divrem(&g).0;
                h = h.rem(&v);
            }
        }
        out
    }

    /// Cantor–Zassenhaus equal degree splitting: factors a squarefree
    /// product of irreducibles all of degree `d` into the irreducibles.
    pub fn equal_degree_factor(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let f = self.f.clone();
        let n = self.degree().unwrap();
        if n == d {
            return vec![self.make_monic()];
        }
        let q = f.order();
        // Exponent (q^d - 1) / 2; q is odd for every admitted field here
        // except GF(2^k), where a trace based splitter is used instead.
        loop {
            let a = random_poly(&f, n - 1, rng);
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let g0 = a.gcd(self);
            if g0.degree().unwrap_or(0) > 0 && g0.degree().unwrap() < n {
                let mut out = g0.equal_degree_factor(d, rng);
                out.extend(self.divrem(&g0).0.equal_degree_factor(d, rng));
                return out;
            }
            let g = if f.p() == 2 {
                // Sum a^{2^i} for i < d*k2, a trace map splitter.
                let bits = (d as u32) * (f.k() as u32);
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..bits {
                    t = t.mul(&t).rem(self);
                    acc = acc.add(&t);
                }
                acc.gcd(self)
            } else {
                let e = (pow_u128(q, d as u32) - 1) / 2;
                let b = a.modpow(e, self);
                b.sub(&Poly::one(&f)).gcd(self)
            };
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let mut out = g.equal_degree_factor(d, rng);
                out.extend(self.divrem(&g).0.equal_degree_factor(d, rng));
                return out;
            }
        }
    }

    /// Full factorisation into monic irreducibles with multiplicities
    /// ignored (returns the distinct irreducible factors).
    pub fn distinct_irreducible_factors(&self, rng: &mut ChaCha8Rng) -> Vec<Poly> {
        let sf = self.squarefree_part();
        let mut out = Vec::new();
        for (d, prod) in sf.distinct_degree() {
            out.extend(prod.equal_degree_factor(d, rng));
        }
        out
    }

    /// All roots of `self` lying in the coefficient field, sorted
    /// lexicographically by coordinate vector for determinism.
    pub fn roots_in_field(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
        let f = self.f.clone();
        let q = f.order();
        // Restrict to the product of linear factors: gcd(self, T^q - T).
        let xq = Poly::x(&f).modpow(q, self);
        let lin = xq.sub(&Poly::x(&f)).gcd(self);
        let mut roots = Vec::new();
        if lin.degree().unwrap_or(0) == 0 {
            return roots;
        }
        for factor in lin.equal_degree_factor(1, rng) {
            // factor = T + c, root is -c.
            let c = factor.coeff(0).to_vec();
            roots.push(f.neg_slice(&c));
        }
        roots.sort();
        roots.dedup();
        roots
    }

    /// Rabin irreducibility test for polynomials over the prime field.
    pub fn is_irreducible(&self) -> bool {
        let f = self.f.clone();
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => return false,
        };
        if n == 1 {
            return true;
        }
        let q = f.order();
        let monic = self.make_monic();
        // T^{q^n} == T mod f, and gcd(T^{q^{n/r}} - T, f) == 1 for prime r | n.
        let mut h = Poly::x(&f);
        for _ in 0..n {
            h = h.modpow(q, &monic);
        }
        if !h.sub(&Poly::x(&f)).rem(&monic).is_zero() {
            return false;
        }
        for r in prime_divisors(n as u64) {
            let m = n / r as usize;
            let mut g = Poly::x(&f);
            for _ in 0..m {
                g = g.modpow(q, &monic);
            }
            let gc = g.sub(&Poly::x(&f)).gcd(&monic);
            if gc.degree().unwrap_or(0) != 0 {
                return false;
            }
        }
        true
    }
}

pub fn random_poly(f: &Field, max_deg: usize, rng: &mut ChaCha8Rng) -> Poly {
    let k = f.k();
    let p = f.p();
    let mut c = vec![0; (max_deg + 1) * k];
    for w in c.iter_mut() {
        *w = rng.gen_range(0..p);
    }
    Poly::from_coeffs(f, &c)
}

pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_u128(base: u128, exp: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base).expect("field order fits in u128");
    }
    acc
}

/// Deterministic Miller–Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = modpow_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn modpow_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, a, m);
        }
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

pub type CzRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

impl Poly {
    /// Helper used by tests: pretty coefficient list for the prime field.
    pub fn prime_coeffs(&self) -> Vec<u64> {
        assert_eq!(self.f.k(), 1);
        self.c.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldTower;

    #[test]
    fn divrem_roundtrip() {
        let tower = FieldTower::new(7);
        let f = tower.field(5, 1).unwrap();
        let a = Poly::from_coeffs(&f, &[1, 2, 0, 3, 4]);
        let b = Poly::from_coeffs(&f, &[2, 1, 1]);
        let (q, r) = a.divrem(&b);
        let back = q.mul(&b).add(&r);
        assert_eq!(back.c, a.c);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn gcd_of_common_factor() {
        let tower = FieldTower::new(7);
        let f = tower.field(5, 1).unwrap();
        let a = Poly::from_coeffs(&f, &[1, 1]); // T + 1
        let b = Poly::from_coeffs(&f, &[2, 1]); // T + 2
        let g = a.mul(&b).gcd(&a.mul(&Poly::from_coeffs(&f, &[3, 1])));
        assert_eq!(g.c, a.make_monic().c);
    }

    #[test]
    fn squarefree_part_strips_powers() {
        let tower = FieldTower::new(7);
        let f = tower.field(5, 1).unwrap();
        let a = Poly::from_coeffs(&f, &[1, 1]); // T + 1
        let b = Poly::from_coeffs(&f, &[3, 1]); // T + 3
        let pow = a.mul(&a).mul(&a).mul(&b);
        let sf = pow.squarefree_part();
        assert_eq!(sf.c, a.mul(&b).make_monic().c);
    }

    #[test]
    fn squarefree_part_handles_pth_powers() {
        let tower = FieldTower::new(7);
        let f = tower.field(5, 1).unwrap();
        // (T+2)^5 = T^5 + 2^5 = T^5 + 32 over GF(5).
        let mut c = vec![0u64; 6];
        c[0] = 32 % 5;
        c[5] = 1;
        let pw = Poly::from_coeffs(&f, &c);
        let sf = pw.squarefree_part();
        assert_eq!(sf.c, vec![2, 1]);
    }

    #[test]
    fn roots_found_exactly() {
        let tower = FieldTower::new(7);
        let f = tower.field(5, 1).unwrap();
        // (T-1)(T-2)(T^2+2): T^2+2 is irreducible over GF(5) since -2 = 3
        // is a non-square mod 5.
        let a = Poly::from_coeffs(&f, &[4, 1]);
        let b = Poly::from_coeffs(&f, &[3, 1]);
        let cpol = Poly::from_coeffs(&f, &[2, 0, 1]);
        let prod = a.mul(&b).mul(&cpol);
        let mut rng = seeded_rng(1);
        let roots = prod.roots_in_field(&mut rng);
        assert_eq!(roots, vec![vec![1], vec![2]]);
    }

    #[test]
    fn irreducibility_on_known_cases() {
        let tower = FieldTower::new(7);
        let f = tower.field(5, 1).unwrap();
        assert!(Poly::from_coeffs(&f, &[2, 0, 1]).is_irreducible()); // T^2 + 2
        assert!(!Poly::from_coeffs(&f, &[4, 0, 1]).is_irreducible()); // T^2 - 1
        assert!(Poly::from_coeffs(&f, &[3, 1]).is_irreducible());
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(5));
        assert!(is_prime_u64(7));
        assert!(is_prime_u64((1 << 31) - 1));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561));
    }
}
