//! The classical matrix groups and brute-force periodic-point counts.
//!
//! Per family: full matrix algebra `M_n(q)`, general linear `GL_n(q)`,
//! symplectic `Sp_2m(q)` for the block-antidiagonal form, and unitary
//! `U_n(q)` for the identity Hermitian form over `F_(q^2)`. The brute-force
//! counters here are the ground truth the class-based closed forms in
//! [`crate::classcount`] are tested against: they visit group elements one
//! by one and apply the structural periodicity verdict, cross-checking a
//! deterministic sample of elements against plain orbit iteration.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_traits::One;

use crate::counting::e_value;
use crate::ff::{
    is_prime_u64, make_field, make_quadratic_ext, prime_power_split, Field, FieldElem,
    MAX_DEGREE,
};
use crate::matdyn::{char_poly, orbit_report, Matrix};
use crate::poly::{distinct_degree_split, radical, roots_satisfy_power_unchecked, Poly};
use crate::{guard, hypothesis, internal, invalid, ExactInt, Result};

/// Cap on the scan space of filter enumeration (`q^(n^2)` matrices).
pub const FILTER_GUARD: u64 = 1 << 26;
/// Cap on the cardinality of a group enumerated by closure.
pub const CLOSURE_GUARD: u64 = 1 << 26;
/// Below this scan space a filter scan beats closure bookkeeping; above it
/// the form-preserving families switch to closure (their density in the
/// matrix space drops fast with `q` and `n`).
const FILTER_PREFERRED: u64 = 1 << 20;

/// Matrix family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Full matrix algebra (not a group under multiplication; the power map
    /// still acts on it).
    M,
    /// General linear group.
    Gl,
    /// Symplectic group for the form `J = [[0, I], [-I, 0]]`.
    Sp,
    /// Unitary group for the identity Hermitian form over `F_(q^2)`.
    U,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::M => "m",
            Family::Gl => "gl",
            Family::Sp => "sp",
            Family::U => "u",
        }
    }
}

/// A concrete family member: dimension plus the field its matrices live
/// over. For `U` the field must carry a declared base subfield (matrices
/// have entries in `F_(q^2)`; the form conjugates by `x -> x^q`).
#[derive(Debug, Clone)]
pub struct GroupKind {
    family: Family,
    dim: usize,
    field: Field,
}

impl GroupKind {
    pub fn m(field: &Field, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(GroupKind { family: Family::M, dim, field: field.clone() })
    }

    pub fn gl(field: &Field, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(GroupKind { family: Family::Gl, dim, field: field.clone() })
    }

    pub fn sp(field: &Field, dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(invalid("symplectic dimension must be even and positive"));
        }
        Ok(GroupKind { family: Family::Sp, dim, field: field.clone() })
    }

    pub fn u(field: &Field, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if field.base_degree().is_none() {
            return Err(invalid(
                "unitary groups need a field with a declared base subfield (make_quadratic_ext)",
            ));
        }
        Ok(GroupKind { family: Family::U, dim, field: field.clone() })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// The `q` the order formulas speak about: the base-field order for
    /// unitary groups, the field order otherwise.
    pub fn formula_q(&self) -> u64 {
        match self.family {
            Family::U => self.field.base_order().unwrap(),
            _ => self.field.q(),
        }
    }

    /// Build the kind from the family and the `q` its order formula speaks
    /// about: the field order for `m`/`gl`/`sp`, the base order for `u`
    /// (whose matrices have entries in `F_(q^2)`).
    pub fn for_family(family: Family, q: u64, dim: usize) -> Result<Self> {
        let (p, e) = prime_power_split(q)?;
        match family {
            Family::M => GroupKind::m(&make_field(p, e)?, dim),
            Family::Gl => GroupKind::gl(&make_field(p, e)?, dim),
            Family::Sp => GroupKind::sp(&make_field(p, e)?, dim),
            Family::U => GroupKind::u(&make_quadratic_ext(p, e)?, dim),
        }
    }

    /// The symplectic form `[[0, I], [-I, 0]]`.
    pub fn symplectic_form(&self) -> Matrix {
        debug_assert_eq!(self.family, Family::Sp);
        let m = self.dim / 2;
        let mut j = Matrix::zero(&self.field, self.dim);
        let one = FieldElem::one(&self.field);
        let minus_one = -&one;
        for i in 0..m {
            j.set(i, m + i, &one);
            j.set(m + i, i, &minus_one);
        }
        j
    }
}

/// Cardinality of the kind (for `M`, the cardinality of the full algebra).
pub fn group_order(kind: &GroupKind) -> ExactInt {
    let n = kind.dim as u32;
    let q = BigUint::from(kind.formula_q());
    match kind.family {
        Family::M => q.pow(n * n),
        Family::Gl => {
            let qn = q.pow(n);
            let mut acc = BigUint::one();
            for i in 0..n {
                acc *= &qn - q.pow(i);
            }
            acc
        }
        Family::Sp => {
            let m = n / 2;
            let mut acc = q.pow(m * m);
            for i in 1..=m {
                acc *= q.pow(2 * i) - BigUint::one();
            }
            acc
        }
        Family::U => {
            let mut acc = q.pow(n * (n - 1) / 2);
            for i in 1..=n {
                // q^i - (-1)^i
                acc *= if i % 2 == 0 {
                    q.pow(i) - BigUint::one()
                } else {
                    q.pow(i) + BigUint::one()
                };
            }
            acc
        }
    }
}

/// Order of the even-dimensional orthogonal group `O^eps_(2 mu)(q)`:
/// `2 q^(mu^2 - mu) (q^mu - eps) prod_(j=1)^(mu-1) (q^(2j) - 1)`.
/// Exposed for completeness; nothing else in the crate consumes it.
pub fn orthogonal_order_even(q: u64, mu: u32, eps: i8) -> Result<ExactInt> {
    crate::ff::prime_power_split(q)?;
    if mu == 0 {
        return Err(invalid("mu must be at least 1"));
    }
    if eps != 1 && eps != -1 {
        return Err(invalid("eps must be +1 or -1"));
    }
    let q = BigUint::from(q);
    let qmu = q.pow(mu);
    let core = if eps == 1 {
        qmu - BigUint::one()
    } else {
        qmu + BigUint::one()
    };
    let mut acc = BigUint::from(2u32) * q.pow(mu * mu - mu) * core;
    for j in 1..mu {
        acc *= q.pow(2 * j) - BigUint::one();
    }
    Ok(acc)
}

/// Form-preservation membership test.
pub fn is_member(kind: &GroupKind, a: &Matrix) -> Result<bool> {
    if a.dim() != kind.dim {
        return Err(invalid(format!(
            "dimension mismatch: matrix is {}x{}, kind wants {}",
            a.dim(),
            a.dim(),
            kind.dim
        )));
    }
    if a.field() != &kind.field {
        return Err(invalid("matrix field does not match the group kind"));
    }
    Ok(match kind.family {
        Family::M => true,
        Family::Gl => !a.det().is_zero(),
        Family::Sp => {
            let j = kind.symplectic_form();
            a.transpose().mul(&j).mul(a) == j
        }
        Family::U => a.conj_transpose()?.mul(a).is_identity(),
    })
}

/// Deterministic xorshift generator for the generating-set search.
struct Rng(u64);

impl Rng {
    fn new() -> Self {
        Rng(0x9e37_79b9_7f4a_7c15)
    }

    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}

fn filter_space(kind: &GroupKind) -> u128 {
    (kind.field.q() as u128)
        .checked_pow((kind.dim * kind.dim) as u32)
        .unwrap_or(u128::MAX)
}

/// Visit every element of the kind exactly once, in a deterministic order.
/// Uses a scan of the full matrix space when that is small, otherwise a
/// breadth-first closure from a searched generating set (validated against
/// [`group_order`]).
fn for_each_member(
    kind: &GroupKind,
    mut visit: impl FnMut(&Matrix) -> Result<()>,
) -> Result<()> {
    let space = filter_space(kind);
    let filter_cap = match kind.family {
        Family::M | Family::Gl => FILTER_GUARD,
        Family::Sp | Family::U => FILTER_PREFERRED,
    };
    if space <= filter_cap as u128 {
        let q = kind.field.q();
        let nn = kind.dim * kind.dim;
        let mut digits = vec![0u64; nn];
        loop {
            let a = Matrix::from_entry_indices(&kind.field, kind.dim, &digits)?;
            if is_member(kind, &a)? {
                visit(&a)?;
            }
            // Odometer, least-significant digit first.
            let mut k = 0;
            while k < nn {
                digits[k] += 1;
                if digits[k] < q {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == nn {
                return Ok(());
            }
        }
    }
    if matches!(kind.family, Family::M | Family::Gl) {
        return Err(guard(format!(
            "scan space q^(n^2) = {space} exceeds {FILTER_GUARD} and closure \
             enumeration applies only to the form-preserving families"
        )));
    }
    let order = group_order(kind);
    if order > ExactInt::from(CLOSURE_GUARD) {
        return Err(guard(format!(
            "group order {order} exceeds the closure guard {CLOSURE_GUARD}"
        )));
    }
    for a in closure_elements(kind, &order)? {
        visit(&a)?;
    }
    Ok(())
}

/// Closure enumeration with the optional on-disk cache in front of it.
fn closure_elements(kind: &GroupKind, order: &ExactInt) -> Result<Vec<Matrix>> {
    let cache_dir = std::env::var_os("FFDYN_CACHE").map(PathBuf::from);
    closure_elements_cached(kind, order, cache_dir.as_deref())
}

fn closure_elements_cached(
    kind: &GroupKind,
    order: &ExactInt,
    cache_dir: Option<&Path>,
) -> Result<Vec<Matrix>> {
    if let Some(dir) = cache_dir {
        if let Some(elements) = read_cache(kind, order, dir) {
            return Ok(elements);
        }
    }
    let elements = closure_enumerate(kind, order)?;
    if let Some(dir) = cache_dir {
        // Failure to persist is not an error; the cache is best-effort.
        let _ = write_cache(kind, &elements, dir);
    }
    Ok(elements)
}

/// Breadth-first closure of a generating set found by randomized search:
/// membership-test random matrices until enough members are collected, then
/// multiply outward until no new elements appear. A closure that stalls at
/// the wrong cardinality restarts with one more generator; reaching
/// [`group_order`] is the proof the generating set sufficed.
fn closure_enumerate(kind: &GroupKind, order: &ExactInt) -> Result<Vec<Matrix>> {
    let q = kind.field.q();
    let nn = kind.dim * kind.dim;
    let mut rng = Rng::new();
    let mut draw_member = || -> Result<Matrix> {
        // Rejection sampling; density |G| / q^(n^2) keeps this cheap for
        // every kind inside the guards.
        for _ in 0..20_000_000u64 {
            let digits: Vec<u64> = (0..nn).map(|_| rng.below(q)).collect();
            let a = Matrix::from_entry_indices(&kind.field, kind.dim, &digits)?;
            if is_member(kind, &a)? {
                return Ok(a);
            }
        }
        Err(internal("randomized member search failed to hit the group"))
    };
    let mut gens: Vec<Matrix> = vec![draw_member()?, draw_member()?];
    for _attempt in 0..6 {
        let mut seen: HashSet<Matrix> = HashSet::new();
        let mut out: Vec<Matrix> = Vec::new();
        let mut frontier: VecDeque<Matrix> = VecDeque::new();
        let identity = Matrix::identity(&kind.field, kind.dim);
        seen.insert(identity.clone());
        out.push(identity.clone());
        frontier.push_back(identity);
        while let Some(cur) = frontier.pop_front() {
            for g in &gens {
                let next = cur.mul(g);
                if seen.insert(next.clone()) {
                    if ExactInt::from(out.len() as u64 + 1) > *order {
                        return Err(internal(
                            "closure exceeded the expected group order; membership test broken",
                        ));
                    }
                    out.push(next.clone());
                    frontier.push_back(next);
                }
            }
        }
        if ExactInt::from(out.len() as u64) == *order {
            return Ok(out);
        }
        // Proper subgroup: enlarge the generating set and try again.
        gens.push(draw_member()?);
    }
    Err(internal(
        "closure enumeration kept terminating below the group order",
    ))
}

fn cache_file(kind: &GroupKind, dir: &Path) -> PathBuf {
    dir.join(format!(
        "{}-{}-{}-{}.ffdyn",
        kind.family.label(),
        kind.dim,
        kind.field.p(),
        kind.field.degree()
    ))
}

const CACHE_MAGIC: &[u8; 8] = b"FFDYNG01";

fn write_cache(kind: &GroupKind, elements: &[Matrix], dir: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&(kind.dim as u64).to_le_bytes());
    buf.extend_from_slice(&kind.field.p().to_le_bytes());
    buf.extend_from_slice(&(kind.field.degree() as u64).to_le_bytes());
    buf.extend_from_slice(&(elements.len() as u64).to_le_bytes());
    for a in elements {
        for &r in a.entries_raw() {
            buf.extend_from_slice(&(r as u32).to_le_bytes());
        }
    }
    let tmp = cache_file(kind, dir).with_extension("tmp");
    std::fs::File::create(&tmp)?.write_all(&buf)?;
    std::fs::rename(tmp, cache_file(kind, dir))
}

fn cache_take<'a>(raw: &'a [u8], at: &mut usize, k: usize) -> Option<&'a [u8]> {
    let s = raw.get(*at..*at + k)?;
    *at += k;
    Some(s)
}

fn cache_u64(raw: &[u8], at: &mut usize) -> Option<u64> {
    Some(u64::from_le_bytes(cache_take(raw, at, 8)?.try_into().unwrap()))
}

fn read_cache(kind: &GroupKind, order: &ExactInt, dir: &Path) -> Option<Vec<Matrix>> {
    let mut raw = Vec::new();
    std::fs::File::open(cache_file(kind, dir))
        .ok()?
        .read_to_end(&mut raw)
        .ok()?;
    let mut at = 0usize;
    if cache_take(&raw, &mut at, 8)? != CACHE_MAGIC {
        return None;
    }
    if cache_u64(&raw, &mut at)? != kind.dim as u64
        || cache_u64(&raw, &mut at)? != kind.field.p()
        || cache_u64(&raw, &mut at)? != kind.field.degree() as u64
    {
        return None;
    }
    let count = cache_u64(&raw, &mut at)?;
    if ExactInt::from(count) != *order {
        return None;
    }
    let d = kind.field.degree();
    let per = kind.dim * kind.dim * d;
    let mut out = Vec::with_capacity(count as usize);
    let p = kind.field.p();
    for _ in 0..count {
        let mut residues = Vec::with_capacity(per);
        for _ in 0..per {
            let b: [u8; 4] = cache_take(&raw, &mut at, 4)?.try_into().unwrap();
            let r = u32::from_le_bytes(b) as u64;
            if r >= p {
                return None;
            }
            residues.push(r);
        }
        // Residues are stored flat; rebuild through the element codec to
        // revalidate them.
        let mut m = Matrix::zero(&kind.field, kind.dim);
        for i in 0..kind.dim {
            for j in 0..kind.dim {
                let blk = &residues[(i * kind.dim + j) * d..(i * kind.dim + j + 1) * d];
                let e = FieldElem::from_residues(&kind.field, blk).ok()?;
                m.set(i, j, &e);
            }
        }
        out.push(m);
    }
    if at != raw.len() {
        return None;
    }
    Some(out)
}

/// Materialize the elements of a kind (intended for desk-scale groups; the
/// counting paths stream instead).
pub fn enumerate_group(kind: &GroupKind) -> Result<Vec<Matrix>> {
    let mut out = Vec::new();
    for_each_member(kind, |a| {
        out.push(a.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Periodicity verdicts memoized by characteristic polynomial.
///
/// The verdict for `A -> A^L` depends only on the minimal polynomial; the
/// characteristic polynomial determines everything except the size of the
/// largest nilpotent block, which is recovered per matrix by comparing
/// `rank(A)` with `rank(A^2)` in the rare case the factor `t` divides the
/// characteristic polynomial at least twice.
struct VerdictMemo {
    ls: Vec<u64>,
    map: HashMap<u128, MemoEntry>,
}

struct MemoEntry {
    invertible: bool,
    t_mult: u32,
    /// Per `l`: every irreducible factor other than `t` satisfies its
    /// root-power congruence.
    factor_ok: Vec<bool>,
}

impl VerdictMemo {
    fn new(field: &Field, ls: &[u64]) -> Result<Self> {
        if ls.is_empty() {
            return Err(invalid("need at least one exponent l"));
        }
        for &l in ls {
            if !is_prime_u64(l) {
                return Err(invalid(format!("l = {l} is not prime")));
            }
            if l == field.p() {
                return Err(hypothesis(format!(
                    "gcd(l, q) must be 1, but l = {l} is the field characteristic"
                )));
            }
        }
        Ok(VerdictMemo { ls: ls.to_vec(), map: HashMap::new() })
    }

    fn entry(&mut self, field: &Field, coeff_indices: &[u64]) -> Result<&MemoEntry> {
        debug_assert!(coeff_indices.len() <= 6, "key packing limited to dimension 6");
        let key = coeff_indices
            .iter()
            .rev()
            .fold(0u128, |acc, &c| (acc << 20) | c as u128);
        if !self.map.contains_key(&key) {
            let mut indices = coeff_indices.to_vec();
            indices.push(1); // monic leading coefficient
            let cp = Poly::from_element_indices(field, &indices)?;
            let t_mult = cp.t_multiplicity() as u32;
            let g = cp.shift_down(t_mult as usize);
            let mut factor_ok = vec![true; self.ls.len()];
            if g.degree() != Some(0) {
                let squarefree = radical(&g);
                let parts = distinct_degree_split(&squarefree);
                for (i, &l) in self.ls.iter().enumerate() {
                    for (m, prod) in &parts {
                        let e = e_value(field.q(), l, *m as u32)?;
                        if !roots_satisfy_power_unchecked(prod, &e) {
                            factor_ok[i] = false;
                            break;
                        }
                    }
                }
            }
            self.map.insert(
                key,
                MemoEntry {
                    invertible: coeff_indices[0] != 0,
                    t_mult,
                    factor_ok,
                },
            );
        }
        Ok(self.map.get(&key).unwrap())
    }
}

/// Characteristic-polynomial coefficient indices (constant term first,
/// leading 1 omitted), computed by direct trace/minor formulas for
/// dimensions up to 3 and by the general routine beyond.
fn char_coeff_indices(a: &Matrix, out: &mut Vec<u64>) {
    let field = a.field().clone();
    let d = field.degree();
    let n = a.dim();
    out.clear();
    let mut t1 = [0u64; MAX_DEGREE];
    let t1 = &mut t1[..d];
    let mut t2 = [0u64; MAX_DEGREE];
    let t2 = &mut t2[..d];
    let mut acc = [0u64; MAX_DEGREE];
    let acc = &mut acc[..d];
    match n {
        1 => {
            // char = t - a00
            t1.copy_from_slice(a.block(0, 0));
            field.el_neg_assign(t1);
            out.push(field.el_to_index(t1));
        }
        2 => {
            // char = t^2 - tr t + det
            field.el_mul(a.block(0, 0), a.block(1, 1), t1);
            field.el_mul(a.block(0, 1), a.block(1, 0), t2);
            field.el_sub_assign(t1, t2); // det
            out.push(field.el_to_index(t1));
            t1.copy_from_slice(a.block(0, 0));
            field.el_add_assign(t1, a.block(1, 1));
            field.el_neg_assign(t1); // -tr
            out.push(field.el_to_index(t1));
        }
        3 => {
            // char = t^3 - tr t^2 + (sum principal 2-minors) t - det
            // det via cofactor expansion along the first row.
            let minor = |r0: usize, c0: usize, r1: usize, c1: usize,
                         t1: &mut [u64], t2: &mut [u64]| {
                field.el_mul(a.block(r0, c0), a.block(r1, c1), t1);
                field.el_mul(a.block(r0, c1), a.block(r1, c0), t2);
                field.el_sub_assign(t1, t2);
            };
            // -det
            acc.fill(0);
            minor(1, 1, 2, 2, t1, t2);
            field.el_mul(a.block(0, 0), t1, t2);
            field.el_add_assign(acc, t2);
            minor(1, 0, 2, 2, t1, t2);
            field.el_mul(a.block(0, 1), t1, t2);
            field.el_sub_assign(acc, t2);
            minor(1, 0, 2, 1, t1, t2);
            field.el_mul(a.block(0, 2), t1, t2);
            field.el_add_assign(acc, t2);
            field.el_neg_assign(acc);
            out.push(field.el_to_index(acc));
            // sum of principal 2x2 minors
            acc.fill(0);
            for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
                minor(i, i, j, j, t1, t2);
                field.el_add_assign(acc, t1);
            }
            out.push(field.el_to_index(acc));
            // -tr
            acc.fill(0);
            for i in 0..3 {
                field.el_add_assign(acc, a.block(i, i));
            }
            field.el_neg_assign(acc);
            out.push(field.el_to_index(acc));
        }
        _ => {
            let cp = char_poly(a);
            for i in 0..n {
                out.push(field.el_to_index(cp.coeff_block(i)));
            }
        }
    }
}

/// Whether the nilpotent part of `A` is semisimple: true iff the factor `t`
/// appears in the minimal polynomial with multiplicity <= 1.
fn nilpotent_part_small(a: &Matrix) -> bool {
    a.rank() == a.mul(a).rank()
}

/// One matrix's verdict using the memo; `rank_gate` caches the per-matrix
/// rank comparison so multiple `l` values share it.
fn verdicts_for<'m>(
    memo: &'m mut VerdictMemo,
    a: &Matrix,
    coeffs: &[u64],
    rank_gate: &mut Option<bool>,
) -> Result<(&'m MemoEntry, bool)> {
    let needs_rank = {
        let e = memo.entry(a.field(), coeffs)?;
        e.t_mult >= 2 && e.factor_ok.iter().any(|&ok| ok)
    };
    let gate = if needs_rank {
        *rank_gate.get_or_insert_with(|| nilpotent_part_small(a))
    } else {
        true
    };
    let e = memo.entry(a.field(), coeffs)?;
    let gate = if e.t_mult >= 2 { gate } else { true };
    Ok((e, gate))
}

/// How often to cross-check the structural verdict against orbit iteration.
const ORBIT_SAMPLE_TARGET: u64 = 48;

fn orbit_cross_check(a: &Matrix, l: u64, structural: bool) -> Result<()> {
    let slow = orbit_report(a, l)?.periodic();
    if slow != structural {
        return Err(internal(format!(
            "structural verdict {structural} disagrees with orbit iteration for l = {l}"
        )));
    }
    Ok(())
}

/// Periodic-point counts of `A -> A^L` over `M_n(q)` and `GL_n(q)` for
/// several exponents in one scan of the matrix space. Returns
/// `(m_counts, gl_counts)` aligned with `ls`.
pub fn brute_periodic_counts_m_gl(
    field: &Field,
    dim: usize,
    ls: &[u64],
) -> Result<(Vec<ExactInt>, Vec<ExactInt>)> {
    let kind = GroupKind::m(field, dim)?;
    let space = filter_space(&kind);
    if space > FILTER_GUARD as u128 {
        return Err(guard(format!(
            "scan space q^(n^2) = {space} exceeds {FILTER_GUARD}"
        )));
    }
    let total = space as u64;
    let mut memo = VerdictMemo::new(field, ls)?;
    let mut m_counts = vec![0u64; ls.len()];
    let mut gl_counts = vec![0u64; ls.len()];
    let stride = (total / ORBIT_SAMPLE_TARGET).max(1);
    let q = field.q();
    let nn = dim * dim;
    let mut digits = vec![0u64; nn];
    let mut coeffs = Vec::with_capacity(dim);
    let mut code = 0u64;
    loop {
        let a = Matrix::from_entry_indices(field, dim, &digits)?;
        char_coeff_indices(&a, &mut coeffs);
        let mut rank_gate = None;
        let sample = code % stride == 0;
        let (entry, gate) = verdicts_for(&mut memo, &a, &coeffs, &mut rank_gate)?;
        for (i, &ok) in entry.factor_ok.iter().enumerate() {
            let periodic = ok && gate;
            if periodic {
                m_counts[i] += 1;
                if entry.invertible {
                    gl_counts[i] += 1;
                }
            }
            if sample && i == (code / stride) as usize % ls.len() {
                let l = ls[i];
                orbit_cross_check(&a, l, periodic)?;
            }
        }
        code += 1;
        let mut k = 0;
        while k < nn {
            digits[k] += 1;
            if digits[k] < q {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == nn {
            break;
        }
    }
    Ok((
        m_counts.into_iter().map(ExactInt::from).collect(),
        gl_counts.into_iter().map(ExactInt::from).collect(),
    ))
}

/// Periodic-point counts for several exponents over one kind.
pub fn brute_periodic_count_multi(kind: &GroupKind, ls: &[u64]) -> Result<Vec<ExactInt>> {
    match kind.family {
        Family::M => Ok(brute_periodic_counts_m_gl(&kind.field, kind.dim, ls)?.0),
        Family::Gl => Ok(brute_periodic_counts_m_gl(&kind.field, kind.dim, ls)?.1),
        Family::Sp | Family::U => {
            let mut memo = VerdictMemo::new(&kind.field, ls)?;
            let mut counts = vec![0u64; ls.len()];
            let mut coeffs = Vec::with_capacity(kind.dim);
            let mut index = 0u64;
            let mut sampled: Vec<(Matrix, Vec<bool>)> = Vec::new();
            for_each_member(kind, |a| {
                char_coeff_indices(a, &mut coeffs);
                let mut rank_gate = None;
                let (entry, gate) = verdicts_for(&mut memo, a, &coeffs, &mut rank_gate)?;
                let verdicts: Vec<bool> =
                    entry.factor_ok.iter().map(|&ok| ok && gate).collect();
                for (i, &v) in verdicts.iter().enumerate() {
                    if v {
                        counts[i] += 1;
                    }
                }
                if index % 977 == 0 && sampled.len() < ORBIT_SAMPLE_TARGET as usize {
                    sampled.push((a.clone(), verdicts));
                }
                index += 1;
                Ok(())
            })?;
            for (i, (a, verdicts)) in sampled.iter().enumerate() {
                let li = i % ls.len();
                orbit_cross_check(a, ls[li], verdicts[li])?;
            }
            Ok(counts.into_iter().map(ExactInt::from).collect())
        }
    }
}

/// Periodic-point count of `A -> A^L` over one kind: the number of elements
/// whose structural verdict is periodic, with a deterministic sample
/// re-checked by orbit iteration.
pub fn brute_periodic_count(kind: &GroupKind, l: u64) -> Result<ExactInt> {
    Ok(brute_periodic_count_multi(kind, &[l])?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{make_field, make_quadratic_ext};
    use crate::matdyn::mat_power_u64;

    fn int(x: u64) -> ExactInt {
        ExactInt::from(x)
    }

    #[test]
    fn order_examples() {
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(group_order(&GroupKind::gl(&f3, 2).unwrap()), int(48));
        assert_eq!(group_order(&GroupKind::sp(&f3, 4).unwrap()), int(51840));
        assert_eq!(group_order(&GroupKind::m(&f3, 2).unwrap()), int(81));
        let f9 = make_quadratic_ext(3, 1).unwrap();
        assert_eq!(group_order(&GroupKind::u(&f9, 2).unwrap()), int(96));
        assert_eq!(group_order(&GroupKind::u(&f9, 3).unwrap()), int(24192));
        // Sp_2 = SL_2.
        assert_eq!(group_order(&GroupKind::sp(&f3, 2).unwrap()), int(24));
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(group_order(&GroupKind::gl(&f7, 1).unwrap()), int(6));
    }

    #[test]
    fn orthogonal_order_examples() {
        // |O^+_4(3)| = 2 * 9 * 8 * 8 = 1152, |O^-_4(3)| = 2 * 9 * 10 * 8 = 1440.
        assert_eq!(orthogonal_order_even(3, 2, 1).unwrap(), int(1152));
        assert_eq!(orthogonal_order_even(3, 2, -1).unwrap(), int(1440));
        // mu = 1: O^+_2(q) is dihedral of order 2(q-1).
        assert_eq!(orthogonal_order_even(5, 1, 1).unwrap(), int(8));
        assert!(orthogonal_order_even(5, 0, 1).is_err());
        assert!(orthogonal_order_even(5, 1, 0).is_err());
    }

    #[test]
    fn membership_examples() {
        let f3 = make_field(3, 1).unwrap();
        let i2 = Matrix::identity(&f3, 2);
        for kind in [
            GroupKind::m(&f3, 2).unwrap(),
            GroupKind::gl(&f3, 2).unwrap(),
            GroupKind::sp(&f3, 2).unwrap(),
        ] {
            assert!(is_member(&kind, &i2).unwrap());
        }
        let f9 = make_quadratic_ext(3, 1).unwrap();
        let u2 = GroupKind::u(&f9, 2).unwrap();
        assert!(is_member(&u2, &Matrix::identity(&f9, 2)).unwrap());

        // diag(1, 2) over F_3 has det 2, not symplectic (Sp_2 = SL_2).
        let sp2 = GroupKind::sp(&f3, 2).unwrap();
        let diag = Matrix::from_entry_indices(&f3, 2, &[1, 0, 0, 2]).unwrap();
        assert!(!is_member(&sp2, &diag).unwrap());
        assert!(is_member(&GroupKind::gl(&f3, 2).unwrap(), &diag).unwrap());
        // antidiag(1, -1) preserves the form.
        let anti = Matrix::from_entry_indices(&f3, 2, &[0, 1, 2, 0]).unwrap();
        assert!(is_member(&sp2, &anti).unwrap());
    }

    #[test]
    fn kind_constructors_validate() {
        let f3 = make_field(3, 1).unwrap();
        assert!(GroupKind::sp(&f3, 3).is_err()); // odd dimension
        assert!(GroupKind::u(&f3, 2).is_err()); // no declared base subfield
        assert!(GroupKind::m(&f3, 0).is_err());
    }

    #[test]
    fn enumeration_matches_orders() {
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(enumerate_group(&GroupKind::gl(&f3, 2).unwrap()).unwrap().len(), 48);
        assert_eq!(enumerate_group(&GroupKind::m(&f3, 2).unwrap()).unwrap().len(), 81);
        let sp2 = enumerate_group(&GroupKind::sp(&f3, 2).unwrap()).unwrap();
        assert_eq!(sp2.len(), 24);
        // Sp_2 = SL_2: every member has determinant 1.
        for a in &sp2 {
            assert!(a.det().is_one());
        }
        let f9 = make_quadratic_ext(3, 1).unwrap();
        assert_eq!(enumerate_group(&GroupKind::u(&f9, 2).unwrap()).unwrap().len(), 96);
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(enumerate_group(&GroupKind::sp(&f5, 2).unwrap()).unwrap().len(), 120);
    }

    #[test]
    fn closure_agrees_with_filter() {
        // Force the closure path on groups small enough to filter, and
        // compare element sets.
        let f3 = make_field(3, 1).unwrap();
        for kind in [GroupKind::sp(&f3, 2).unwrap()] {
            let filtered: HashSet<Matrix> =
                enumerate_group(&kind).unwrap().into_iter().collect();
            let closed: HashSet<Matrix> =
                closure_enumerate(&kind, &group_order(&kind)).unwrap().into_iter().collect();
            assert_eq!(filtered, closed);
        }
        let f9 = make_quadratic_ext(3, 1).unwrap();
        let u2 = GroupKind::u(&f9, 2).unwrap();
        let filtered: HashSet<Matrix> = enumerate_group(&u2).unwrap().into_iter().collect();
        let closed: HashSet<Matrix> =
            closure_enumerate(&u2, &group_order(&u2)).unwrap().into_iter().collect();
        assert_eq!(filtered, closed);
    }

    #[test]
    fn closure_enumerates_sp4_3() {
        let f3 = make_field(3, 1).unwrap();
        let kind = GroupKind::sp(&f3, 4).unwrap();
        let elements = enumerate_group(&kind).unwrap();
        assert_eq!(ExactInt::from(elements.len() as u64), group_order(&kind));
        // Spot-check membership of a few elements.
        for a in elements.iter().step_by(5000) {
            assert!(is_member(&kind, a).unwrap());
        }
    }

    #[test]
    fn cache_roundtrip() {
        let dir = std::env::temp_dir().join("ffdyn-cache-test");
        let _ = std::fs::remove_dir_all(&dir);
        let f3 = make_field(3, 1).unwrap();
        let kind = GroupKind::sp(&f3, 2).unwrap();
        let order = group_order(&kind);
        let first = closure_elements_cached(&kind, &order, Some(&dir)).unwrap();
        assert!(cache_file(&kind, &dir).exists());
        let second = closure_elements_cached(&kind, &order, Some(&dir)).unwrap();
        assert_eq!(first, second);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn power_map_stays_inside_groups() {
        let f3 = make_field(3, 1).unwrap();
        let f9 = make_quadratic_ext(3, 1).unwrap();
        let kinds = [
            GroupKind::gl(&f3, 2).unwrap(),
            GroupKind::sp(&f3, 2).unwrap(),
            GroupKind::u(&f9, 2).unwrap(),
        ];
        for kind in &kinds {
            for a in enumerate_group(kind).unwrap() {
                for l in [2u64, 5] {
                    assert!(is_member(kind, &mat_power_u64(&a, l).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn brute_count_examples() {
        let f3 = make_field(3, 1).unwrap();
        let m2 = GroupKind::m(&f3, 2).unwrap();
        assert_eq!(brute_periodic_count(&m2, 2).unwrap(), int(22));
        let gl2 = GroupKind::gl(&f3, 2).unwrap();
        assert_eq!(brute_periodic_count(&gl2, 2).unwrap(), int(9));
        // L coprime to the relevant orders: everything invertible is periodic.
        assert_eq!(brute_periodic_count(&gl2, 7).unwrap(), int(48));
    }

    #[test]
    fn brute_count_gl1_is_e_value() {
        for (q, l) in [(7u64, 3u64), (59, 2), (9, 2), (4, 3)] {
            let (p, e) = crate::ff::prime_power_split(q).unwrap();
            let field = make_field(p, e).unwrap();
            let gl1 = GroupKind::gl(&field, 1).unwrap();
            assert_eq!(
                brute_periodic_count(&gl1, l).unwrap(),
                e_value(q, l, 1).unwrap()
            );
        }
    }

    #[test]
    fn m_count_dominates_gl_count() {
        let f5 = make_field(5, 1).unwrap();
        let (m, gl) = brute_periodic_counts_m_gl(&f5, 2, &[2, 3]).unwrap();
        for (mc, glc) in m.iter().zip(&gl) {
            assert!(mc >= glc);
        }
        // The difference counts periodic singular matrices; at least the
        // zero matrix is one.
        assert!(m[0] > gl[0]);
    }

    #[test]
    fn multi_sweep_matches_single_sweeps() {
        let f3 = make_field(3, 1).unwrap();
        let (m, gl) = brute_periodic_counts_m_gl(&f3, 2, &[2, 5, 7]).unwrap();
        for (i, &l) in [2u64, 5, 7].iter().enumerate() {
            assert_eq!(
                brute_periodic_count(&GroupKind::m(&f3, 2).unwrap(), l).unwrap(),
                m[i]
            );
            assert_eq!(
                brute_periodic_count(&GroupKind::gl(&f3, 2).unwrap(), l).unwrap(),
                gl[i]
            );
        }
    }

    #[test]
    fn sp2_5_periodic_count_l3() {
        // Sp_2(5) = SL_2(5), 120 elements; golden value pinned by full orbit
        // iteration below.
        let f5 = make_field(5, 1).unwrap();
        let kind = GroupKind::sp(&f5, 2).unwrap();
        let fast = brute_periodic_count(&kind, 3).unwrap();
        let mut slow = 0u64;
        for a in enumerate_group(&kind).unwrap() {
            if orbit_report(&a, 3).unwrap().periodic() {
                slow += 1;
            }
        }
        assert_eq!(fast, int(slow));
        assert_eq!(fast, int(80));
    }

    #[test]
    fn direct_char_coeffs_match_general_routine() {
        // The scan path computes characteristic coefficients by trace/minor
        // formulas for n <= 3; certify against the flag-based routine.
        let mut coeffs = Vec::new();
        for (p, d, n) in [(3u64, 1u32, 2usize), (2, 1, 3), (2, 2, 2), (5, 1, 1)] {
            let field = make_field(p, d).unwrap();
            let q = field.q();
            let nn = n * n;
            let total = q.pow(nn as u32);
            for code in 0..total {
                let mut digits = vec![0u64; nn];
                let mut c = code;
                for slot in digits.iter_mut() {
                    *slot = c % q;
                    c /= q;
                }
                let a = Matrix::from_entry_indices(&field, n, &digits).unwrap();
                char_coeff_indices(&a, &mut coeffs);
                let cp = char_poly(&a);
                let direct: Vec<u64> = coeffs.clone();
                let general: Vec<u64> = (0..n)
                    .map(|i| field.el_to_index(cp.coeff_block(i)))
                    .collect();
                assert_eq!(direct, general, "entries {digits:?}");
            }
        }
    }

    #[test]
    fn verdict_memo_rejects_bad_l() {
        let f3 = make_field(3, 1).unwrap();
        let gl2 = GroupKind::gl(&f3, 2).unwrap();
        assert!(brute_periodic_count(&gl2, 3).is_err()); // l = p
        assert!(brute_periodic_count(&gl2, 4).is_err()); // not prime
    }
}
