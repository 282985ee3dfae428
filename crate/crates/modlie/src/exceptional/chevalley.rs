//! Chevalley basis reductions of the complex simple Lie algebras.
//!
//! The root system is enumerated in a small integer lattice.  Structure
//! constants are fixed over the integers first: each non-simple positive
//! root has a unique extraspecial writing as an ordered sum of two smaller
//! positive roots, that pair receives the positive sign q+1, and every
//! other constant follows from antisymmetry, the reflection rule through
//! the origin and the three- and four-root relations.  Only after the
//! integral table is complete is anything reduced mod p, and the built
//! algebra is checked against freshly computed root strings.

use std::collections::HashMap;

use crate::cartan::validation_for;
use crate::gf::FieldTower;
use crate::liealg::{LieAlgebra, StructureEntries};
use crate::restricted::is_restrictable;

use super::ExceptionalError;

/// Supported root system families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootType {
    A,
    B,
    C,
    D,
    G,
}

impl RootType {
    pub fn name(self) -> &'static str {
        match self {
            RootType::A => "A",
            RootType::B => "B",
            RootType::C => "C",
            RootType::D => "D",
            RootType::G => "G",
        }
    }
}

fn vadd(u: &[i64], v: &[i64]) -> Vec<i64> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

fn vsub(u: &[i64], v: &[i64]) -> Vec<i64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

fn vneg(u: &[i64]) -> Vec<i64> {
    u.iter().map(|a| -a).collect()
}

fn dot(u: &[i64], v: &[i64]) -> i64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn exact_div(a: i64, b: i64) -> Result<i64, ExceptionalError> {
    if b == 0 || a % b != 0 {
        return Err(ExceptionalError::Verification(format!("non-integral constant {a}/{b}")));
    }
    Ok(a / b)
}

struct RootSystem {
    rank: usize,
    simple: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    /// Positive roots sorted by (height, simple-basis coordinates).
    positives: Vec<Vec<i64>>,
    coords: Vec<Vec<i64>>,
    pos_rank: HashMap<Vec<i64>, usize>,
}

fn unit(dim: usize, i: usize, c: i64) -> Vec<i64> {
    let mut v = vec![0i64; dim];
    v[i] = c;
    v
}

fn enumerate(ty: RootType, rank: usize) -> Result<RootSystem, ExceptionalError> {
    let bad = |msg: &str| ExceptionalError::Unsupported(format!("{}{rank}: {msg}", ty.name()));
    let (_dim, mut all, simple): (usize, Vec<Vec<i64>>, Vec<Vec<i64>>) = match ty {
        RootType::A => {
            if rank < 1 {
                return Err(bad("rank must be at least 1"));
            }
            let d = rank + 1;
            let mut all = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        all.push(vsub(&unit(d, i, 1), &unit(d, j, 1)));
                    }
                }
            }
            let simple = (0..rank).map(|i| vsub(&unit(d, i, 1), &unit(d, i + 1, 1))).collect();
            (d, all, simple)
        }
        RootType::B | RootType::C => {
            if rank < 2 {
                return Err(bad("rank must be at least 2"));
            }
            let d = rank;
            let long = if ty == RootType::C { 2 } else { 1 };
            let mut all = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        all.push(vadd(&unit(d, i, si), &unit(d, j, sj)));
                    }
                }
                all.push(unit(d, i, long));
                all.push(unit(d, i, -long));
            }
            let mut simple: Vec<Vec<i64>> =
                (0..rank - 1).map(|i| vsub(&unit(d, i, 1), &unit(d, i + 1, 1))).collect();
            simple.push(unit(d, rank - 1, long));
            (d, all, simple)
        }
        RootType::D => {
            if rank < 3 {
                return Err(bad("rank must be at least 3"));
            }
            let d = rank;
            let mut all = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                        all.push(vadd(&unit(d, i, si), &unit(d, j, sj)));
                    }
                }
            }
            let mut simple: Vec<Vec<i64>> =
                (0..rank - 1).map(|i| vsub(&unit(d, i, 1), &unit(d, i + 1, 1))).collect();
            simple.push(vadd(&unit(d, rank - 2, 1), &unit(d, rank - 1, 1)));
            (d, all, simple)
        }
        RootType::G => {
            if rank != 2 {
                return Err(bad("rank must be 2"));
            }
            let d = 3;
            let mut all = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        all.push(vsub(&unit(d, i, 1), &unit(d, j, 1)));
                    }
                }
                let mut long = vec![-1i64; 3];
                long[i] = 2;
                all.push(long.clone());
                all.push(vneg(&long));
            }
            let simple = vec![vsub(&unit(d, 0, 1), &unit(d, 1, 1)), vec![-2, 1, 1]];
            (d, all, simple)
        }
    };
    all.sort();
    all.dedup();
    let index: HashMap<Vec<i64>, usize> =
        all.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();

    // Every positive root is a simple root plus a smaller positive root,
    // so a closure walk from the simples by height finds them all.
    let mut found: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
    let mut level: Vec<Vec<i64>> = Vec::new();
    for (i, s) in simple.iter().enumerate() {
        found.insert(s.clone(), unit(rank, i, 1));
        level.push(s.clone());
    }
    while !level.is_empty() {
        let mut next = Vec::new();
        for r in &level {
            for (i, s) in simple.iter().enumerate() {
                let cand = vadd(r, s);
                if index.contains_key(&cand) && !found.contains_key(&cand) {
                    let mut c = found[r].clone();
                    c[i] += 1;
                    found.insert(cand.clone(), c);
                    next.push(cand);
                }
            }
        }
        level = next;
    }
    if found.len() * 2 != all.len() {
        return Err(ExceptionalError::Verification(format!(
            "reached {} positive roots out of {}",
            found.len(),
            all.len() / 2
        )));
    }
    let mut order: Vec<(i64, Vec<i64>, Vec<i64>)> = found
        .into_iter()
        .map(|(r, c)| (c.iter().sum::<i64>(), c, r))
        .collect();
    order.sort();
    let positives: Vec<Vec<i64>> = order.iter().map(|(_, _, r)| r.clone()).collect();
    let coords: Vec<Vec<i64>> = order.into_iter().map(|(_, c, _)| c).collect();
    let pos_rank = positives.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
    Ok(RootSystem { rank, simple, index, positives, coords, pos_rank })
}

impl RootSystem {
    fn is_root(&self, v: &[i64]) -> bool {
        self.index.contains_key(v)
    }

    /// Largest q with b - q a still a root.
    fn string_down(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut q = 0;
        let mut cur = vsub(b, a);
        while self.is_root(&cur) {
            q += 1;
            cur = vsub(&cur, a);
        }
        q
    }

    /// Coordinates of the coroot of `r` over the simple coroots.
    fn coroot_coords(&self, r: &[i64]) -> Result<Vec<i64>, ExceptionalError> {
        let (m, sign) = match self.pos_rank.get(r) {
            Some(&i) => (&self.coords[i], 1),
            None => (&self.coords[self.pos_rank[&vneg(r)]], -1),
        };
        let rr = dot(r, r);
        (0..self.rank)
            .map(|i| exact_div(sign * m[i] * dot(&self.simple[i], &self.simple[i]), rr))
            .collect()
    }

    fn cartan_pairing(&self, r: &[i64], i: usize) -> Result<i64, ExceptionalError> {
        exact_div(2 * dot(r, &self.simple[i]), dot(&self.simple[i], &self.simple[i]))
    }
}

/// Integral structure constants N over pairs of positive-root ranks.
struct Constants {
    table: HashMap<(usize, usize), i64>,
}

impl Constants {
    fn fill(rs: &RootSystem) -> Result<Constants, ExceptionalError> {
        let mut table: HashMap<(usize, usize), i64> = HashMap::new();
        let cons = |t: &HashMap<(usize, usize), i64>, u: &[i64], v: &[i64]| n_of(rs, t, u, v);
        for gi in 0..rs.positives.len() {
            let gamma = rs.positives[gi].clone();
            let mut writings: Vec<(usize, usize)> = Vec::new();
            for ai in 0..gi {
                let beta = vsub(&gamma, &rs.positives[ai]);
                if let Some(&bi) = rs.pos_rank.get(&beta) {
                    if ai < bi {
                        writings.push((ai, bi));
                    }
                }
            }
            writings.sort();
            if writings.is_empty() {
                continue;
            }
            let (a1, b1) = writings[0];
            let alpha1 = rs.positives[a1].clone();
            let beta1 = rs.positives[b1].clone();
            let n1 = rs.string_down(&alpha1, &beta1) + 1;
            table.insert((a1, b1), n1);
            for &(ai, bi) in &writings[1..] {
                let alpha = rs.positives[ai].clone();
                let beta = rs.positives[bi].clone();
                // Four-root relation on (a1, b1, -a, -b), all sums distinct
                // from zero because the two writings of gamma differ.
                let d2v = vsub(&beta1, &alpha);
                let d3v = vsub(&alpha1, &alpha);
                let t2 = cons(&table, &beta1, &vneg(&alpha))? * cons(&table, &alpha1, &vneg(&beta))?;
                let t3 = cons(&table, &vneg(&alpha), &alpha1)? * cons(&table, &beta1, &vneg(&beta))?;
                let d2 = dot(&d2v, &d2v);
                let d3 = dot(&d3v, &d3v);
                let num = dot(&gamma, &gamma) * (t2 * d3 + t3 * d2);
                let val = exact_div(num, d2 * d3 * n1)?;
                let expect = rs.string_down(&alpha, &beta) + 1;
                if val.abs() != expect {
                    return Err(ExceptionalError::Verification(format!(
                        "constant {val} for a special pair, expected size {expect}"
                    )));
                }
                table.insert((ai, bi), val);
            }
        }
        Ok(Constants { table })
    }
}

/// Constant in [e_u, e_v] = N e_{u+v} for arbitrary signs, derived from the
/// positive table by antisymmetry, reflection and the three-root relation.
fn n_of(
    rs: &RootSystem,
    table: &HashMap<(usize, usize), i64>,
    u: &[i64],
    v: &[i64],
) -> Result<i64, ExceptionalError> {
    let sum = vadd(u, v);
    if !rs.is_root(&sum) {
        return Ok(0);
    }
    match (rs.pos_rank.get(u), rs.pos_rank.get(v)) {
        (Some(&iu), Some(&iv)) => {
            let val = if iu < iv { table[&(iu, iv)] } else { -table[&(iv, iu)] };
            Ok(val)
        }
        (None, None) => Ok(-n_of(rs, table, &vneg(u), &vneg(v))?),
        (None, Some(_)) => Ok(-n_of(rs, table, v, u)?),
        (Some(_), None) => {
            let z = vneg(&sum);
            if rs.pos_rank.contains_key(&z) {
                // N(u,v)/|z|^2 = N(z,u)/|v|^2 on the cycle u + v + z = 0.
                let val = n_of(rs, table, &z, u)?;
                exact_div(dot(&z, &z) * val, dot(v, v))
            } else {
                let val = n_of(rs, table, v, &z)?;
                exact_div(dot(&z, &z) * val, dot(u, u))
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Neg(usize),
    Cartan(usize),
    Pos(usize),
}

pub struct ChevalleyAlgebra {
    pub algebra: LieAlgebra,
    pub rank: usize,
    pub num_positive: usize,
    pub restrictable: bool,
    /// Extraspecial pairs carry the positive sign; all other constants are
    /// derived from them, so brackets are only pinned down up to the signs
    /// this convention picks.
    pub sign_note: &'static str,
}

impl ChevalleyAlgebra {
    /// The algebra modulo its centre; for A with p dividing rank+1 this is
    /// the projective quotient, elsewhere it is the algebra itself.
    pub fn simple_quotient(&self) -> Result<LieAlgebra, ExceptionalError> {
        let z = self.algebra.center();
        if z.dim() == 0 {
            return Ok(self.algebra.clone());
        }
        Ok(self.algebra.quotient(&z)?.0)
    }
}

pub fn build_chevalley(ty: RootType, rank: usize, p: u64) -> Result<ChevalleyAlgebra, ExceptionalError> {
    let rs = enumerate(ty, rank)?;
    let cons = Constants::fill(&rs)?;
    let f = FieldTower::new(0).field_small_char(p, 1)?;
    let np = rs.positives.len();

    let height = |pi: usize| rs.coords[pi].iter().sum::<i64>();
    let mut slots: Vec<Slot> = Vec::new();
    for pi in (0..np).rev() {
        slots.push(Slot::Neg(pi));
    }
    slots.sort_by_key(|s| match *s {
        Slot::Neg(pi) => (-height(pi), rs.coords[pi].clone()),
        _ => unreachable!(),
    });
    for i in 0..rs.rank {
        slots.push(Slot::Cartan(i));
    }
    for pi in 0..np {
        slots.push(Slot::Pos(pi));
    }

    let coord_label = |pi: usize| {
        let parts: Vec<String> = rs.coords[pi].iter().map(|c| c.to_string()).collect();
        parts.join(",")
    };
    let labels: Vec<String> = slots
        .iter()
        .map(|s| match *s {
            Slot::Neg(pi) => format!("f({})", coord_label(pi)),
            Slot::Cartan(i) => format!("h{}", i + 1),
            Slot::Pos(pi) => format!("e({})", coord_label(pi)),
        })
        .collect();
    let degrees: Vec<i64> = slots
        .iter()
        .map(|s| match *s {
            Slot::Neg(pi) => -height(pi),
            Slot::Cartan(_) => 0,
            Slot::Pos(pi) => height(pi),
        })
        .collect();
    let root_of = |s: Slot| -> Option<Vec<i64>> {
        match s {
            Slot::Neg(pi) => Some(vneg(&rs.positives[pi])),
            Slot::Pos(pi) => Some(rs.positives[pi].clone()),
            Slot::Cartan(_) => None,
        }
    };
    let slot_of_root = |r: &[i64]| -> usize {
        slots
            .iter()
            .position(|&s| root_of(s).as_deref() == Some(r))
            .expect("root slot")
    };

    let dim = slots.len();
    let mut entries: StructureEntries = Vec::new();
    for a in 0..dim {
        for b in a + 1..dim {
            let mut terms: Vec<(usize, i64)> = Vec::new();
            match (slots[a], slots[b]) {
                (Slot::Cartan(_), Slot::Cartan(_)) => {}
                (Slot::Cartan(i), s) | (s, Slot::Cartan(i)) => {
                    let r = root_of(s).unwrap();
                    let c = rs.cartan_pairing(&r, i)?;
                    let sign = if matches!(slots[a], Slot::Cartan(_)) { 1 } else { -1 };
                    let target = if matches!(slots[a], Slot::Cartan(_)) { b } else { a };
                    terms.push((target, sign * c));
                }
                (sa, sb) => {
                    let r = root_of(sa).unwrap();
                    let s = root_of(sb).unwrap();
                    let sum = vadd(&r, &s);
                    if sum.iter().all(|&c| c == 0) {
                        let cc = rs.coroot_coords(&r)?;
                        for (i, &c) in cc.iter().enumerate() {
                            let hslot = np + i;
                            terms.push((hslot, c));
                        }
                    } else if rs.is_root(&sum) {
                        let c = n_of(&rs, &cons.table, &r, &s)?;
                        terms.push((slot_of_root(&sum), c));
                    }
                }
            }
            let terms: Vec<(usize, Vec<u64>)> = terms
                .into_iter()
                .filter(|&(_, c)| c.rem_euclid(p as i64) != 0)
                .map(|(t, c)| (t, f.from_int(c)))
                .collect();
            if !terms.is_empty() {
                entries.push((a, b, terms));
            }
        }
    }
    let algebra = LieAlgebra::from_structure_constants(&f, labels, entries, validation_for(dim))?
        .with_grading(degrees)?;

    verify_clauses(&rs, &cons, &algebra, &slots, &root_of)?;
    let restrictable = is_restrictable(&algebra);
    Ok(ChevalleyAlgebra {
        algebra,
        rank,
        num_positive: np,
        restrictable,
        sign_note: "extraspecial pairs positive",
    })
}

/// Recheck the built brackets against independently recomputed data: root
/// sums scale by +-(q+1) with q the length of the descending root string
/// (never more than 2), opposite roots meet in the coroot, Cartan elements
/// act by the pairing, and everything else vanishes.
fn verify_clauses(
    rs: &RootSystem,
    cons: &Constants,
    l: &LieAlgebra,
    slots: &[Slot],
    root_of: &dyn Fn(Slot) -> Option<Vec<i64>>,
) -> Result<(), ExceptionalError> {
    let f = l.field();
    let n = l.dim();
    let fail = |msg: String| Err(ExceptionalError::Verification(msg));
    let np = rs.positives.len();
    for a in 0..n {
        for b in a + 1..n {
            let got = l.bracket_basis(a, b).to_dense(f, n);
            let mut want = vec![0u64; n];
            match (slots[a], slots[b]) {
                (Slot::Cartan(_), Slot::Cartan(_)) => {}
                (Slot::Cartan(i), s) | (s, Slot::Cartan(i)) => {
                    let r = root_of(s).unwrap();
                    let mut c = rs.cartan_pairing(&r, i)?;
                    if !matches!(slots[a], Slot::Cartan(_)) {
                        c = -c;
                    }
                    let target = if matches!(slots[a], Slot::Cartan(_)) { b } else { a };
                    want[target] = f.from_int(c)[0];
                }
                (sa, sb) => {
                    let r = root_of(sa).unwrap();
                    let s = root_of(sb).unwrap();
                    let sum = vadd(&r, &s);
                    if sum.iter().all(|&c| c == 0) {
                        let cc = rs.coroot_coords(&r)?;
                        for (i, &c) in cc.iter().enumerate() {
                            want[np + i] = f.from_int(c)[0];
                        }
                    } else if rs.is_root(&sum) {
                        let q = rs.string_down(&r, &s);
                        if q > 2 {
                            return fail(format!("root string of length {q}"));
                        }
                        let c = n_of(rs, &cons.table, &r, &s)?;
                        if c.abs() != q + 1 {
                            return fail(format!("constant {c} against string {q}"));
                        }
                        let t = slots
                            .iter()
                            .position(|&x| root_of(x).as_deref() == Some(sum.as_slice()))
                            .unwrap();
                        want[t] = f.from_int(c)[0];
                    }
                }
            }
            if got != want {
                return fail(format!("bracket of slots {a},{b} disagrees with the root data"));
            }
        }
    }
    Ok(())
}
