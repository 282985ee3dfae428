//! Truncated divided-power algebras O(m;n), their special derivations,
//! and differential forms with wedge, exterior derivative, divided
//! powers of even forms, truncated exponentials, and the nondegeneracy
//! tests for forms of degree 1, 2 and m.
//!
//! Basis monomials are x^α with 0 ≤ α(i) < p^{n_i}; the product is
//! x^α·x^β = binom(α+β, β)·x^{α+β}, with any out-of-bounds result
//! truncated to zero.  Truncation agrees with the binomial coefficient:
//! a digit overflow past p^{n_i} forces a base-p carry, which kills the
//! coefficient anyway when n_i = 1, and the defining ideal does the
//! rest in general.

use crate::gf::Field;
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

pub type MultiIndex = Vec<u32>;

#[derive(Debug, Error)]
pub enum DpError {
    #[error("elements belong to different algebras")]
    ParentMismatch,
    #[error("the element has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("multi-index entry {0} exceeds the height bound")]
    IndexOutOfBounds(u32),
    #[error("operation undefined for a form of degree {0}")]
    WrongDegree(usize),
    #[error("the 2-form is not closed")]
    NotClosed,
    #[error("divided powers of forms need s < p, got {0}")]
    SBeyondCharacteristic(usize),
}

struct DpDesc {
    f: Field,
    /// Heights n_i; the bound on α(i) is p^{n_i}.
    n: Vec<u32>,
    bounds: Vec<u64>,
}

/// Descriptor handle for O(m;n); clones share the descriptor.
#[derive(Clone)]
pub struct DpAlgebra(Arc<DpDesc>);

impl std::fmt::Debug for DpAlgebra {
    fn fmt(&self, w: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(w, "O({};{:?}) over GF({}^{})", self.m(), self.0.n, self.field().p(), self.field().k())
    }
}

impl PartialEq for DpAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.0.f == other.0.f && self.0.n == other.0.n
    }
}

impl DpAlgebra {
    pub fn new(f: &Field, n: Vec<u32>) -> DpAlgebra {
        assert!(!n.is_empty() && n.iter().all(|&h| h >= 1), "heights must be positive");
        let bounds = n.iter().map(|&h| f.p().pow(h)).collect();
        DpAlgebra(Arc::new(DpDesc { f: f.clone(), n, bounds }))
    }

    pub fn field(&self) -> &Field {
        &self.0.f
    }

    pub fn m(&self) -> usize {
        self.0.n.len()
    }

    pub fn heights(&self) -> &[u32] {
        &self.0.n
    }

    pub fn bound(&self, i: usize) -> u64 {
        self.0.bounds[i]
    }

    pub fn dim(&self) -> usize {
        self.0.bounds.iter().product::<u64>() as usize
    }

    /// Σ (p^{n_i} − 1), the top total degree.
    pub fn max_degree(&self) -> usize {
        self.0.bounds.iter().map(|&b| (b - 1) as usize).sum()
    }

    pub fn in_bounds(&self, a: &MultiIndex) -> bool {
        a.len() == self.m() && a.iter().zip(&self.0.bounds).all(|(&e, &b)| (e as u64) < b)
    }

    pub fn all_indices(&self) -> Vec<MultiIndex> {
        let m = self.m();
        let mut out = Vec::with_capacity(self.dim());
        let mut cur: MultiIndex = vec![0; m];
        loop {
            out.push(cur.clone());
            let mut i = 0;
            loop {
                if i == m {
                    return out;
                }
                cur[i] += 1;
                if (cur[i] as u64) < self.0.bounds[i] {
                    break;
                }
                cur[i] = 0;
                i += 1;
            }
        }
    }

    pub fn zero(&self) -> DpElement {
        DpElement { alg: self.clone(), terms: BTreeMap::new() }
    }

    pub fn one(&self) -> DpElement {
        self.monomial(&vec![0; self.m()], &self.field().one_slice())
    }

    /// The generator x_i = x^{ε_i}, 0-based.
    pub fn x(&self, i: usize) -> DpElement {
        let mut a = vec![0u32; self.m()];
        a[i] = 1;
        self.monomial(&a, &self.field().one_slice())
    }

    pub fn monomial(&self, a: &MultiIndex, c: &[u64]) -> DpElement {
        assert!(self.in_bounds(a), "monomial index out of bounds");
        let mut terms = BTreeMap::new();
        if !self.field().is_zero_slice(c) {
            terms.insert(a.clone(), c.to_vec());
        }
        DpElement { alg: self.clone(), terms }
    }
}

/// n! = p^val · unit with unit a unit mod p (Wilson chunking).
fn factorial_decomp(n: u64, p: u64) -> (u64, u64) {
    if n < p {
        let mut u = 1u64;
        for i in 2..=n {
            u = u * i % p;
        }
        return (0, u);
    }
    let (q, r) = (n / p, n % p);
    let (v, u) = factorial_decomp(q, p);
    let (_, ur) = factorial_decomp(r, p);
    let sign = if q % 2 == 0 { 1 } else { p - 1 };
    (v + q, u * ur % p * sign % p)
}

/// binom(a, b) mod p by Lucas.
pub fn binom_mod_p(mut a: u64, mut b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let mut out = 1u64;
    while b > 0 || a > 0 {
        let (ra, rb) = (a % p, b % p);
        if rb > ra {
            return 0;
        }
        let mut c = 1u64;
        for i in 0..rb {
            c = c * ((ra - i) % p) % p * mod_inv(i + 1, p) % p;
        }
        out = out * c % p;
        a /= p;
        b /= p;
    }
    out
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime and a is a unit.
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// (sα)!/(α!)^s/s! mod p, the divided-power monomial coefficient.
fn monomial_dp_coeff(a: &MultiIndex, s: u64, p: u64) -> u64 {
    let mut val = 0i64;
    let mut unit = 1u64;
    let (vs, us) = factorial_decomp(s, p);
    val -= vs as i64;
    unit = unit * mod_inv(us, p) % p;
    for &ai in a {
        let (vn, un) = factorial_decomp(s * ai as u64, p);
        val += vn as i64;
        unit = unit * un % p;
        let (vd, ud) = factorial_decomp(ai as u64, p);
        val -= (s * vd) as i64;
        unit = unit * mod_inv(pow_mod(ud, s, p), p) % p;
    }
    debug_assert!(val >= 0);
    if val > 0 {
        0
    } else {
        unit
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Element of O(m;n) as a sparse monomial map.
#[derive(Clone, Debug)]
pub struct DpElement {
    pub alg: DpAlgebra,
    terms: BTreeMap<MultiIndex, Vec<u64>>,
}

impl PartialEq for DpElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.terms == other.terms
    }
}

impl DpElement {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &[u64])> {
        self.terms.iter().map(|(a, c)| (a, c.as_slice()))
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, a: &MultiIndex) -> Vec<u64> {
        self.terms.get(a).cloned().unwrap_or_else(|| self.alg.field().zero_slice())
    }

    pub fn constant_term(&self) -> Vec<u64> {
        self.coeff(&vec![0; self.alg.m()])
    }

    pub fn min_total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|a| a.iter().map(|&e| e as usize).sum()).min()
    }

    fn insert_term(&mut self, a: MultiIndex, c: Vec<u64>) {
        let f = self.alg.field().clone();
        match self.terms.entry(a) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !f.is_zero_slice(&c) {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                f.add_assign_slice(o.get_mut(), &c);
                if f.is_zero_slice(o.get()) {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &DpElement) -> DpElement {
        assert!(self.alg == other.alg, "parent mismatch");
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.insert_term(a.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> DpElement {
        let f = self.alg.field();
        let terms = self.terms.iter().map(|(a, c)| (a.clone(), f.neg_slice(c))).collect();
        DpElement { alg: self.alg.clone(), terms }
    }

    pub fn sub(&self, other: &DpElement) -> DpElement {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &[u64]) -> DpElement {
        let f = self.alg.field();
        if f.is_zero_slice(c) {
            return self.alg.zero();
        }
        let terms = self.terms.iter().map(|(a, w)| (a.clone(), f.mul_slice(w, c))).collect();
        DpElement { alg: self.alg.clone(), terms }
    }

    /// Divided-power product.
    pub fn mul(&self, other: &DpElement) -> DpElement {
        assert!(self.alg == other.alg, "parent mismatch");
        let f = self.alg.field();
        let p = f.p();
        let m = self.alg.m();
        let mut out = self.alg.zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let mut sum = vec![0u32; m];
                let mut coef = 1u64;
                let mut ok = true;
                for i in 0..m {
                    let s = a[i] as u64 + b[i] as u64;
                    if s >= self.alg.bound(i) {
                        ok = false;
                        break;
                    }
                    sum[i] = s as u32;
                    coef = coef * binom_mod_p(s, b[i] as u64, p) % p;
                }
                if !ok || coef == 0 {
                    continue;
                }
                let c = f.mul_slice(ca, cb);
                let c = f.scale_int_slice(&c, coef);
                out.insert_term(sum, c);
            }
        }
        out
    }

    pub fn partial_derivative(&self, i: usize) -> DpElement {
        assert!(i < self.alg.m());
        let mut out = self.alg.zero();
        for (a, c) in &self.terms {
            if a[i] > 0 {
                let mut b = a.clone();
                b[i] -= 1;
                out.insert_term(b, c.clone());
            }
        }
        out
    }

    /// s-th divided power of an element with zero constant term, by the
    /// monomial formula and the sum rule, truncated to the algebra.
    pub fn divided_power(&self, s: usize) -> Result<DpElement, DpError> {
        let f = self.alg.field();
        if !f.is_zero_slice(&self.constant_term()) {
            return Err(DpError::NonzeroConstantTerm);
        }
        let p = f.p();
        let m = self.alg.m();
        // acc[j] = (partial sum of monomials)^{(j)}.
        let mut acc: Vec<DpElement> = Vec::with_capacity(s + 1);
        acc.push(self.alg.one());
        for _ in 0..s {
            acc.push(self.alg.zero());
        }
        for (a, c) in &self.terms {
            let mut powers: Vec<DpElement> = Vec::with_capacity(s + 1);
            powers.push(self.alg.one());
            for i in 1..=s {
                // (c x^α)^{(i)} = c^i · coeff(α, i) · x^{iα}, truncated.
                let coef = monomial_dp_coeff(a, i as u64, p);
                let mut idx = vec![0u32; m];
                let mut ok = coef != 0;
                if ok {
                    for t in 0..m {
                        let e = a[t] as u64 * i as u64;
                        if e >= self.alg.bound(t) {
                            ok = false;
                            break;
                        }
                        idx[t] = e as u32;
                    }
                }
                if ok {
                    let ci = f.pow_slice(c, i as u128);
                    powers.push(self.alg.monomial(&idx, &f.scale_int_slice(&ci, coef)));
                } else {
                    powers.push(self.alg.zero());
                }
            }
            let mut next: Vec<DpElement> = Vec::with_capacity(s + 1);
            for j in 0..=s {
                let mut term = self.alg.zero();
                for i in 0..=j {
                    term = term.add(&acc[j - i].mul(&powers[i]));
                }
                next.push(term);
            }
            acc = next;
        }
        Ok(acc.pop().expect("s+1 entries"))
    }

    /// exp f = Σ f^{(i)}, finite by truncation.
    pub fn exp(&self) -> Result<DpElement, DpError> {
        let mut out = self.alg.zero();
        for i in 0..=self.alg.max_degree() {
            out = out.add(&self.divided_power(i)?);
        }
        Ok(out)
    }
}

/// Derivation Σ f_i ∂_i with f_i ∈ O(m;n).
#[derive(Clone, Debug, PartialEq)]
pub struct SpecialDerivation {
    pub alg: DpAlgebra,
    pub comps: Vec<DpElement>,
}

impl SpecialDerivation {
    pub fn zero(alg: &DpAlgebra) -> SpecialDerivation {
        SpecialDerivation { alg: alg.clone(), comps: vec![alg.zero(); alg.m()] }
    }

    pub fn partial(alg: &DpAlgebra, i: usize) -> SpecialDerivation {
        let mut d = Self::zero(alg);
        d.comps[i] = alg.one();
        d
    }

    pub fn from_components(alg: &DpAlgebra, comps: Vec<DpElement>) -> SpecialDerivation {
        assert_eq!(comps.len(), alg.m());
        assert!(comps.iter().all(|c| c.alg == *alg), "parent mismatch");
        SpecialDerivation { alg: alg.clone(), comps }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(DpElement::is_zero)
    }

    pub fn add(&self, other: &SpecialDerivation) -> SpecialDerivation {
        assert!(self.alg == other.alg);
        let comps =
            self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect();
        SpecialDerivation { alg: self.alg.clone(), comps }
    }

    pub fn sub(&self, other: &SpecialDerivation) -> SpecialDerivation {
        assert!(self.alg == other.alg);
        let comps =
            self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect();
        SpecialDerivation { alg: self.alg.clone(), comps }
    }

    pub fn scale_fn(&self, g: &DpElement) -> SpecialDerivation {
        let comps = self.comps.iter().map(|c| c.mul(g)).collect();
        SpecialDerivation { alg: self.alg.clone(), comps }
    }

    pub fn scale(&self, c: &[u64]) -> SpecialDerivation {
        let comps = self.comps.iter().map(|w| w.scale(c)).collect();
        SpecialDerivation { alg: self.alg.clone(), comps }
    }

    pub fn apply(&self, g: &DpElement) -> DpElement {
        assert!(self.alg == g.alg);
        let mut out = self.alg.zero();
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&c.mul(&g.partial_derivative(i)));
            }
        }
        out
    }

    pub fn bracket(&self, other: &SpecialDerivation) -> SpecialDerivation {
        assert!(self.alg == other.alg);
        let comps = (0..self.alg.m())
            .map(|j| self.apply(&other.comps[j]).sub(&other.apply(&self.comps[j])))
            .collect();
        SpecialDerivation { alg: self.alg.clone(), comps }
    }
}

/// Differential form of fixed degree; keys are strictly increasing
/// 0-based index tuples, antisymmetry absorbed by sorting.
#[derive(Clone, Debug)]
pub struct DifferentialForm {
    pub alg: DpAlgebra,
    pub degree: usize,
    terms: BTreeMap<Vec<u8>, DpElement>,
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.degree == other.degree && {
            let za = self.terms.iter().filter(|(_, c)| !c.is_zero()).count();
            let zb = other.terms.iter().filter(|(_, c)| !c.is_zero()).count();
            za == zb
                && self
                    .terms
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .all(|(kk, c)| other.terms.get(kk).map_or(false, |d| d == c))
        }
    }
}

/// Sign of sorting the concatenation of two disjoint ascending tuples;
/// None when they intersect.
fn merge_sign(a: &[u8], b: &[u8]) -> Option<(Vec<u8>, i32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1i32;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] == b[j] {
            return None;
        }
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            // b[j] jumps over the remaining a-entries.
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, sign))
}

impl DifferentialForm {
    pub fn zero(alg: &DpAlgebra, degree: usize) -> DifferentialForm {
        DifferentialForm { alg: alg.clone(), degree, terms: BTreeMap::new() }
    }

    /// A function as a 0-form.
    pub fn from_function(g: &DpElement) -> DifferentialForm {
        let mut w = Self::zero(&g.alg, 0);
        if !g.is_zero() {
            w.terms.insert(vec![], g.clone());
        }
        w
    }

    /// dx_i (0-based).
    pub fn dx(alg: &DpAlgebra, i: usize) -> DifferentialForm {
        assert!(i < alg.m());
        let mut w = Self::zero(alg, 1);
        w.terms.insert(vec![i as u8], alg.one());
        w
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(DpElement::is_zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &DpElement)> {
        self.terms.iter().filter(|(_, c)| !c.is_zero())
    }

    pub fn coefficient(&self, key: &[u8]) -> DpElement {
        self.terms.get(key).cloned().unwrap_or_else(|| self.alg.zero())
    }

    fn insert(&mut self, key: Vec<u8>, c: DpElement) {
        debug_assert_eq!(key.len(), self.degree);
        debug_assert!(key.windows(2).all(|w| w[0] < w[1]));
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DifferentialForm) -> DifferentialForm {
        assert!(self.alg == other.alg && self.degree == other.degree);
        let mut out = self.clone();
        for (kk, c) in &other.terms {
            out.insert(kk.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> DifferentialForm {
        let terms = self.terms.iter().map(|(kk, c)| (kk.clone(), c.neg())).collect();
        DifferentialForm { alg: self.alg.clone(), degree: self.degree, terms }
    }

    pub fn sub(&self, other: &DifferentialForm) -> DifferentialForm {
        self.add(&other.neg())
    }

    pub fn scale_fn(&self, g: &DpElement) -> DifferentialForm {
        let mut out = Self::zero(&self.alg, self.degree);
        for (kk, c) in self.terms() {
            out.insert(kk.clone(), c.mul(g));
        }
        out
    }

    pub fn scale(&self, c: &[u64]) -> DifferentialForm {
        let terms = self.terms.iter().map(|(kk, w)| (kk.clone(), w.scale(c))).collect();
        DifferentialForm { alg: self.alg.clone(), degree: self.degree, terms }
    }

    pub fn wedge(&self, other: &DifferentialForm) -> DifferentialForm {
        assert!(self.alg == other.alg);
        let f = self.alg.field();
        let mut out = Self::zero(&self.alg, self.degree + other.degree);
        if out.degree > self.alg.m() {
            return out;
        }
        for (ka, ca) in self.terms() {
            for (kb, cb) in other.terms() {
                if let Some((key, sign)) = merge_sign(ka, kb) {
                    let mut c = ca.mul(cb);
                    if sign < 0 {
                        c = c.scale(&f.from_int(-1));
                    }
                    out.insert(key, c);
                }
            }
        }
        out
    }

    fn d_raw(&self) -> DifferentialForm {
        let mut out = Self::zero(&self.alg, self.degree + 1);
        if out.degree > self.alg.m() {
            return out;
        }
        let f = self.alg.field();
        for (kk, c) in self.terms() {
            for i in 0..self.alg.m() as u8 {
                if kk.contains(&i) {
                    continue;
                }
                let g = c.partial_derivative(i as usize);
                if g.is_zero() {
                    continue;
                }
                let pos = kk.iter().filter(|&&t| t < i).count();
                let mut key = kk.clone();
                key.insert(pos, i);
                let signed = if pos % 2 == 1 { g.scale(&f.from_int(-1)) } else { g };
                out.insert(key, signed);
            }
        }
        out
    }

    /// Exterior derivative; the square-zero law is asserted on the
    /// result in debug builds.
    pub fn exterior_d(&self) -> DifferentialForm {
        let out = self.d_raw();
        debug_assert!(out.d_raw().is_zero(), "d must square to zero");
        out
    }

    /// Evaluation of a 1-form on a derivation: (Σ f_i dx_i)(D) = Σ f_i·Dx_i.
    pub fn evaluate_on(&self, d: &SpecialDerivation) -> DpElement {
        assert_eq!(self.degree, 1);
        assert!(self.alg == d.alg);
        let mut out = self.alg.zero();
        for (kk, c) in self.terms() {
            out = out.add(&c.mul(&d.comps[kk[0] as usize]));
        }
        out
    }

    /// Action of a special derivation, via the Leibniz rule with
    /// D(dx_i) = d(Dx_i); on 1-forms this matches the defining
    /// (Dα)(D') = D(α(D')) − α([D, D']).
    pub fn derivation_action(&self, d: &SpecialDerivation) -> DifferentialForm {
        assert!(self.alg == d.alg);
        let mut out = Self::zero(&self.alg, self.degree);
        for (kk, c) in self.terms() {
            // (Dc)·dx_K
            let mut base = Self::zero(&self.alg, self.degree);
            base.insert(kk.clone(), d.apply(c));
            out = out.add(&base);
            // c · Σ_j dx_{k_1} ∧ ... ∧ d(Dx_{k_j}) ∧ ... ∧ dx_{k_t}
            for (j, &kj) in kk.iter().enumerate() {
                let replaced = DifferentialForm::from_function(&d.comps[kj as usize]).d_raw();
                if replaced.is_zero() {
                    continue;
                }
                let mut acc = DifferentialForm::from_function(&self.alg.one());
                for (t, &kt) in kk.iter().enumerate() {
                    let factor = if t == j { replaced.clone() } else { Self::dx(&self.alg, kt as usize) };
                    acc = acc.wedge(&factor);
                }
                out = out.add(&acc.scale_fn(c));
            }
        }
        out
    }

    /// Divided power of an even form (or a 0-form in the augmentation
    /// ideal): for 0 < s < p this is the s-fold wedge over s!.
    pub fn divided_power(&self, s: usize) -> Result<DifferentialForm, DpError> {
        let f = self.alg.field();
        let p = f.p();
        if self.degree == 0 {
            let g = self.coefficient(&[]);
            return Ok(Self::from_function(&g.divided_power(s)?));
        }
        if self.degree % 2 != 0 {
            return Err(DpError::WrongDegree(self.degree));
        }
        if s as u64 >= p {
            return Err(DpError::SBeyondCharacteristic(s));
        }
        if s == 0 {
            return Ok(Self::from_function(&self.alg.one()));
        }
        let mut out = self.clone();
        for _ in 1..s {
            out = out.wedge(self);
        }
        let (_, mut sfact) = factorial_decomp(s as u64, p);
        sfact = mod_inv(sfact, p);
        Ok(out.scale(&f.scale_int_slice(&f.one_slice(), sfact)))
    }

    /// The three-case nondegeneracy test: top forms need an invertible
    /// coefficient, closed 2-forms a nondegenerate r-th divided power,
    /// and 1-forms a nondegenerate (dω)^{(r)} ∧ ω.
    pub fn nondegenerate(&self) -> Result<bool, DpError> {
        let m = self.alg.m();
        let f = self.alg.field();
        if self.degree == m && m >= 2 {
            let key: Vec<u8> = (0..m as u8).collect();
            let phi = self.coefficient(&key);
            return Ok(!f.is_zero_slice(&phi.constant_term()));
        }
        if self.degree == 2 {
            if m % 2 != 0 || m < 2 {
                return Err(DpError::WrongDegree(2));
            }
            if !self.d_raw().is_zero() {
                return Err(DpError::NotClosed);
            }
            return self.divided_power(m / 2)?.nondegenerate();
        }
        if self.degree == 1 {
            if m % 2 != 1 || m < 3 {
                return Err(DpError::WrongDegree(1));
            }
            let r = (m - 1) / 2;
            let top = self.d_raw().divided_power(r)?.wedge(self);
            return top.nondegenerate();
        }
        Err(DpError::WrongDegree(self.degree))
    }
}

/// ω_S = dx_1 ∧ ... ∧ dx_m.
pub fn volume_form(alg: &DpAlgebra) -> DifferentialForm {
    let mut out = DifferentialForm::zero(alg, alg.m());
    out.insert((0..alg.m() as u8).collect(), alg.one());
    out
}

/// ω_H = Σ_{i=1}^r dx_i ∧ dx_{i+r}, m = 2r.
pub fn hamiltonian_form(alg: &DpAlgebra) -> DifferentialForm {
    let m = alg.m();
    assert!(m % 2 == 0 && m >= 2, "needs m = 2r");
    let r = m / 2;
    let mut out = DifferentialForm::zero(alg, 2);
    for i in 0..r {
        out.insert(vec![i as u8, (i + r) as u8], alg.one());
    }
    out
}

/// ω_K = dx_m + Σ_{i=1}^r (x_{i+r} dx_i − x_i dx_{i+r}), m = 2r + 1.
pub fn contact_form(alg: &DpAlgebra) -> DifferentialForm {
    let m = alg.m();
    assert!(m % 2 == 1 && m >= 3, "needs m = 2r + 1");
    let r = (m - 1) / 2;
    let f = alg.field();
    let mut out = DifferentialForm::zero(alg, 1);
    out.insert(vec![(m - 1) as u8], alg.one());
    for i in 0..r {
        out.insert(vec![i as u8], alg.x(i + r));
        out.insert(vec![(i + r) as u8], alg.x(i).scale(&f.from_int(-1)));
    }
    out
}

/// Seeded random element, optionally without constant term.
pub fn random_element(alg: &DpAlgebra, rng: &mut crate::gf::poly::CzRng, augmented: bool) -> DpElement {
    let f = alg.field();
    let idx = alg.all_indices();
    let mut out = alg.zero();
    let picks = 1 + rng.gen_range(0..4usize.min(idx.len()));
    for _ in 0..picks {
        let a = idx[rng.gen_range(0..idx.len())].clone();
        if augmented && a.iter().all(|&e| e == 0) {
            continue;
        }
        let c = f.random_slice(rng);
        out.insert_term(a, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::poly::seeded_rng;
    use crate::gf::{Field, FieldTower};

    fn gf5() -> Field {
        FieldTower::new(1).field(5, 1).unwrap()
    }

    fn o11(f: &Field) -> DpAlgebra {
        DpAlgebra::new(f, vec![1])
    }

    fn o211(f: &Field) -> DpAlgebra {
        DpAlgebra::new(f, vec![1, 1])
    }

    #[test]
    fn dimension_is_p_to_the_height_sum() {
        let f = gf5();
        assert_eq!(o11(&f).dim(), 5);
        assert_eq!(o211(&f).dim(), 25);
        assert_eq!(DpAlgebra::new(&f, vec![2]).dim(), 25);
        assert_eq!(o211(&f).all_indices().len(), 25);
    }

    #[test]
    fn product_examples() {
        let f = gf5();
        let o = o11(&f);
        let x = o.x(0);
        // x·x = binom(2,1)·x^{2ε} = 2 x^{(2)}.
        assert_eq!(x.mul(&x), o.monomial(&vec![2], &f.from_int(2)));
        // 1·f = f.
        let g = o.monomial(&vec![3], &vec![4]).add(&o.one());
        assert_eq!(o.one().mul(&g), g);
        // x^{(4)}·x = binom(5,1) x^{(5)} = 0 by truncation and by Lucas.
        let x4 = o.monomial(&vec![4], &vec![1]);
        assert!(x4.mul(&x).is_zero());
        assert_eq!(binom_mod_p(5, 1, 5), 0);
    }

    #[test]
    fn associativity_exhaustive_on_small_algebras() {
        let f = gf5();
        for alg in [o11(&f), o211(&f)] {
            let idx = alg.all_indices();
            let monos: Vec<DpElement> =
                idx.iter().map(|a| alg.monomial(a, &f.one_slice())).collect();
            for a in &monos {
                for b in &monos {
                    let ab = a.mul(b);
                    assert_eq!(ab, b.mul(a), "commutativity");
                    for c in &monos {
                        assert_eq!(ab.mul(c), a.mul(&b.mul(c)), "associativity");
                    }
                }
            }
        }
    }

    #[test]
    fn divided_power_examples() {
        let f = gf5();
        let o = o11(&f);
        let x = o.x(0);
        for s in 0..5 {
            let want =
                if s == 0 { o.one() } else { o.monomial(&vec![s as u32], &vec![1]) };
            assert_eq!(x.divided_power(s).unwrap(), want, "(x)^({}) = x^({})", s, s);
        }
        // (λf)^{(s)} = λ^s f^{(s)}.
        let lam = f.from_int(3);
        let o2 = o211(&f);
        let g = o2.x(0).add(&o2.monomial(&vec![1, 1], &vec![2]));
        for s in 0..4 {
            let lhs = g.scale(&lam).divided_power(s).unwrap();
            let rhs = g.divided_power(s).unwrap().scale(&f.pow_slice(&lam, s as u128));
            assert_eq!(lhs, rhs);
        }
        // (x₁+x₂)^{(2)} = x^{2ε₁} + x^{ε₁+ε₂} + x^{2ε₂}... the middle
        // term is the product x₁x₂ with coefficient 1.
        let s = o2.x(0).add(&o2.x(1));
        let got = s.divided_power(2).unwrap();
        let want = o2
            .monomial(&vec![2, 0], &vec![1])
            .add(&o2.monomial(&vec![1, 1], &vec![1]))
            .add(&o2.monomial(&vec![0, 2], &vec![1]));
        assert_eq!(got, want);
        // Nonzero constant term is rejected.
        assert!(o.one().divided_power(2).is_err());
    }

    #[test]
    fn divided_power_sum_rule_randomized() {
        let f = gf5();
        let o = o211(&f);
        let mut rng = seeded_rng(0x6470);
        for _ in 0..200 {
            let a = random_element(&o, &mut rng, true);
            let b = random_element(&o, &mut rng, true);
            let s = rng.gen_range(0..5usize);
            let lhs = a.add(&b).divided_power(s).unwrap();
            let mut rhs = o.zero();
            for i in 0..=s {
                rhs = rhs.add(&a.divided_power(i).unwrap().mul(&b.divided_power(s - i).unwrap()));
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn exponentials() {
        let f = gf5();
        let o = o11(&f);
        assert_eq!(o.zero().exp().unwrap(), o.one());
        let x = o.x(0);
        let e = x.exp().unwrap();
        let mut want = o.zero();
        for i in 0..5u32 {
            want = want.add(&o.monomial(&vec![i], &vec![1]));
        }
        assert_eq!(e, want);
        // exp(x)·exp(−x) = 1.
        let einv = x.neg().exp().unwrap();
        assert_eq!(e.mul(&einv), o.one());
    }

    #[test]
    fn partial_derivatives() {
        let f = gf5();
        let o = o11(&f);
        assert_eq!(o.monomial(&vec![2], &vec![1]).partial_derivative(0), o.x(0));
        assert!(o.one().partial_derivative(0).is_zero());
        // Leibniz on random pairs, and commuting partials on a
        // two-variable algebra.
        let o2 = o211(&f);
        let mut rng = seeded_rng(0x6c62);
        for _ in 0..20 {
            let a = random_element(&o2, &mut rng, false);
            let b = random_element(&o2, &mut rng, false);
            for i in 0..2 {
                let lhs = a.mul(&b).partial_derivative(i);
                let rhs =
                    a.partial_derivative(i).mul(&b).add(&a.mul(&b.partial_derivative(i)));
                assert_eq!(lhs, rhs);
            }
        }
        for a in o2.all_indices() {
            let mono = o2.monomial(&a, &f.one_slice());
            assert_eq!(
                mono.partial_derivative(0).partial_derivative(1),
                mono.partial_derivative(1).partial_derivative(0)
            );
        }
        // Special-derivation property ∂(f^{(s)}) = f^{(s-1)} ∂f.
        for _ in 0..20 {
            let g = random_element(&o2, &mut rng, true);
            for s in 1..4usize {
                let lhs = g.divided_power(s).unwrap().partial_derivative(0);
                let rhs = g.divided_power(s - 1).unwrap().mul(&g.partial_derivative(0));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn exterior_derivative_examples() {
        let f = gf5();
        let o = o11(&f);
        // d(x₁) = dx₁.
        let dx1 = DifferentialForm::from_function(&o.x(0)).exterior_d();
        assert_eq!(dx1, DifferentialForm::dx(&o, 0));
        // d(ω_K) for m = 3 is −2·dx₁∧dx₂ on the canonical key.
        let o3 = DpAlgebra::new(&f, vec![1, 1, 1]);
        let wk = contact_form(&o3);
        let dwk = wk.exterior_d();
        let mut want = DifferentialForm::zero(&o3, 2);
        want.insert(vec![0, 1], o3.one().scale(&f.from_int(-2)));
        assert_eq!(dwk, want);
        // d(ω_H) = 0 for m = 2.
        let o2 = o211(&f);
        assert!(hamiltonian_form(&o2).exterior_d().is_zero());
        // d² = 0 on a spanning set of 1-forms.
        for a in o2.all_indices() {
            for i in 0..2 {
                let w = DifferentialForm::dx(&o2, i).scale_fn(&o2.monomial(&a, &f.one_slice()));
                assert!(w.exterior_d().exterior_d().is_zero());
            }
        }
    }

    #[test]
    fn derivation_action_matches_the_defining_formula() {
        let f = gf5();
        let o2 = o211(&f);
        let mut rng = seeded_rng(0x6163);
        for _ in 0..20 {
            let d = SpecialDerivation::from_components(
                &o2,
                vec![random_element(&o2, &mut rng, false), random_element(&o2, &mut rng, false)],
            );
            let dprime = SpecialDerivation::from_components(
                &o2,
                vec![random_element(&o2, &mut rng, false), random_element(&o2, &mut rng, false)],
            );
            let alpha = DifferentialForm::dx(&o2, 0)
                .scale_fn(&random_element(&o2, &mut rng, false))
                .add(&DifferentialForm::dx(&o2, 1).scale_fn(&random_element(&o2, &mut rng, false)));
            // (Dα)(D') = D(α(D')) − α([D,D']).
            let lhs = alpha.derivation_action(&d).evaluate_on(&dprime);
            let rhs = d.apply(&alpha.evaluate_on(&dprime)).sub(&alpha.evaluate_on(&d.bracket(&dprime)));
            assert_eq!(lhs, rhs);
        }
        // D(dx_i) = d(Dx_i).
        let d = SpecialDerivation::from_components(&o2, vec![o2.monomial(&vec![1, 1], &vec![2]), o2.x(0)]);
        for i in 0..2 {
            let lhs = DifferentialForm::dx(&o2, i).derivation_action(&d);
            let rhs = DifferentialForm::from_function(&d.comps[i]).exterior_d();
            assert_eq!(lhs, rhs);
        }
        // Zero derivation acts as zero.
        let z = SpecialDerivation::zero(&o2);
        let wh = hamiltonian_form(&o2);
        assert!(wh.derivation_action(&z).is_zero());
        // The action commutes with d on samples.
        for _ in 0..10 {
            let d = SpecialDerivation::from_components(
                &o2,
                vec![random_element(&o2, &mut rng, false), random_element(&o2, &mut rng, false)],
            );
            let g = random_element(&o2, &mut rng, false);
            let w = DifferentialForm::from_function(&g);
            assert_eq!(w.derivation_action(&d).exterior_d(), w.exterior_d().derivation_action(&d));
        }
    }

    #[test]
    fn form_divided_powers_and_nondegeneracy() {
        let f = gf5();
        // m = 2: (ω_H)^{(1)} = dx₁∧dx₂, the volume form.
        let o2 = o211(&f);
        let wh = hamiltonian_form(&o2);
        assert_eq!(wh.divided_power(1).unwrap(), volume_form(&o2));
        assert!(wh.nondegenerate().unwrap());
        // m = 4: (ω_H)^{(2)} = −dx₁∧dx₂∧dx₃∧dx₄, nondegenerate.
        let o4 = DpAlgebra::new(&f, vec![1, 1, 1, 1]);
        let wh4 = hamiltonian_form(&o4);
        let sq = wh4.divided_power(2).unwrap();
        let mut want = DifferentialForm::zero(&o4, 4);
        want.insert(vec![0, 1, 2, 3], o4.one().scale(&f.from_int(-1)));
        assert_eq!(sq, want);
        assert!(wh4.nondegenerate().unwrap());
        // ω^{(1)} = ω and s ≥ p is rejected.
        assert_eq!(wh4.divided_power(1).unwrap(), wh4);
        assert!(matches!(wh4.divided_power(5), Err(DpError::SBeyondCharacteristic(5))));
        // Volume forms: ω_S nondegenerate, x₁·ω_S degenerate.
        let o3 = DpAlgebra::new(&f, vec![1, 1, 1]);
        let ws = volume_form(&o3);
        assert!(ws.nondegenerate().unwrap());
        assert!(!ws.scale_fn(&o3.x(0)).nondegenerate().unwrap());
        // ω_K is a nondegenerate 1-form on m = 3.
        assert!(contact_form(&o3).nondegenerate().unwrap());
        // A closed degenerate 2-form: dx₁∧dx₂ on m = 4 has vanishing
        // square.
        let degen = DifferentialForm::dx(&o4, 0).wedge(&DifferentialForm::dx(&o4, 1));
        assert!(!degen.nondegenerate().unwrap());
        // Non-closed 2-form is rejected.
        let bad = hamiltonian_form(&o4).scale_fn(&o4.x(0));
        assert!(matches!(bad.nondegenerate(), Err(DpError::NotClosed)));
    }
}
