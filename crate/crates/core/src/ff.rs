//! Finite fields `F_{p^d}` with deterministic construction.
//!
//! A field is described by a [`FieldSpec`]: the characteristic `p`, the
//! extension degree `d`, and a monic irreducible modulus of degree `d` over
//! `F_p`. The modulus is always the lexicographically least monic irreducible
//! polynomial of its degree, comparing coefficient tuples from the `t^(d-1)`
//! coefficient down to the constant term. Two calls with the same `(p, d)`
//! therefore produce identical fields, and golden values stay stable.
//!
//! Elements are dense residue vectors of length `d` (constant coefficient
//! first). There are no discrete-log or multiplication tables: arithmetic is
//! schoolbook convolution plus reduction, so every field up to the order
//! guard works without precomputation.
//!
//! Fields built for unitary work carry a base-subfield tag: [`make_quadratic_ext`]
//! constructs `F_{q^2}` over a declared `F_q` and records the base degree, which
//! [`FieldElem::conj_q`] requires.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::{guard, invalid, Error, Result};

/// Largest permitted field order. Unitary constructions need `F_{q^2}` for
/// `q` up to `2^10`, and nothing in the crate needs more.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Largest extension degree implied by [`MAX_FIELD_ORDER`] (`2^20` at `p = 2`).
pub(crate) const MAX_DEGREE: usize = 20;

/// Shared handle to a field. Elements, polynomials, and matrices hold clones.
pub type Field = Arc<FieldSpec>;

/// A concrete finite field `F_{p^d}`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    d: usize,
    /// Monic modulus of degree `d` over `F_p`, constant coefficient first,
    /// length `d + 1`. For `d = 1` this is the degenerate modulus `t`.
    modulus: Vec<u64>,
    q: u64,
    /// Set when the field was built as a quadratic extension of a declared
    /// base subfield: the base degree `e`, so the base has order `p^e`.
    base_degree: Option<usize>,
    /// Precomputed `floor(2^mod_t / p)` for reduction without hardware
    /// division; `mod_t = 40 + bitlen(p)`, so any value below `2^40 + p` folds
    /// with at most one correcting subtraction.
    mod_m: u64,
    mod_t: u32,
}

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree `d` over the prime field.
    pub fn degree(&self) -> usize {
        self.d
    }

    /// Field order `q = p^d`.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn q_big(&self) -> BigUint {
        BigUint::from(self.q)
    }

    /// Modulus coefficients, constant term first, length `d + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Degree of the declared base subfield, when one was recorded.
    pub fn base_degree(&self) -> Option<usize> {
        self.base_degree
    }

    /// Order of the declared base subfield, when one was recorded.
    pub fn base_order(&self) -> Option<u64> {
        self.base_degree.map(|e| self.p.pow(e as u32))
    }
}

/// Deterministic Miller-Rabin primality test for `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for r in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == r {
            return true;
        }
        if n % r == 0 {
            return false;
        }
    }
    // Deterministic Miller-Rabin for u64 with the standard witness set.
    let d = (n - 1) >> (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        let mut r = d;
        while r != n - 1 {
            x = mul_mod_u64(x, x, n);
            r <<= 1;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Factor `n` into `(prime, exponent)` pairs by trial division.
pub(crate) fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            let mut e = 0;
            while n % f == 0 {
                n /= f;
                e += 1;
            }
            out.push((f, e));
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Split a prime power `q = p^d` into `(p, d)`; errors if `q` is not a
/// prime power.
pub fn prime_power_split(q: u64) -> Result<(u64, u32)> {
    let f = factor_u64(q);
    match f.as_slice() {
        [(p, d)] => Ok((*p, *d)),
        _ => Err(invalid(format!("{q} is not a prime power"))),
    }
}

/// Construct `F_{p^d}` with the deterministic least modulus.
///
/// For `d = 1` the modulus is the degenerate `t` and elements reduce to
/// residues mod `p`.
pub fn make_field(p: u64, d: u32) -> Result<Field> {
    build_field(p, d, None)
}

/// Construct `F_{q^2}` for `q = p^e`, tagged with its base subfield `F_q`.
///
/// The result is the plain field `F_{p^(2e)}` (same modulus choice as
/// [`make_field`]) plus the base-degree tag that [`FieldElem::conj_q`] and the
/// unitary constructions require.
pub fn make_quadratic_ext(p: u64, e: u32) -> Result<Field> {
    if e == 0 {
        return Err(invalid("base degree must be at least 1"));
    }
    build_field(p, 2 * e, Some(e as usize))
}

fn build_field(p: u64, d: u32, base_degree: Option<usize>) -> Result<Field> {
    if d == 0 {
        return Err(invalid("extension degree must be at least 1"));
    }
    if !is_prime_u64(p) {
        return Err(invalid(format!("{p} is not prime")));
    }
    let d = d as usize;
    let q = checked_pow(p, d)?;
    let modulus = if d == 1 {
        vec![0, 1]
    } else {
        least_irreducible_modulus(p, d)
    };
    let mod_t = 40 + (64 - p.leading_zeros());
    let mod_m = ((1u128 << mod_t) / p as u128) as u64;
    Ok(Arc::new(FieldSpec {
        p,
        d,
        modulus,
        q,
        base_degree,
        mod_m,
        mod_t,
    }))
}

fn checked_pow(p: u64, d: usize) -> Result<u64> {
    let mut q: u64 = 1;
    for _ in 0..d {
        q = q.checked_mul(p).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(guard(format!(
                "field order {p}^{d} exceeds the supported maximum 2^20"
            )));
        }
    }
    Ok(q)
}

/// Least monic irreducible of degree `d` over `F_p`, comparing coefficient
/// tuples `(c_{d-1}, ..., c_1, c_0)` lexicographically (constant term last).
fn least_irreducible_modulus(p: u64, d: usize) -> Vec<u64> {
    let mut coeffs = vec![0u64; d + 1];
    coeffs[d] = 1;
    loop {
        if prime_poly_irreducible(p, &coeffs) {
            return coeffs;
        }
        // Increment as a base-p odometer with the constant term least
        // significant, so ascent matches the comparison order.
        let mut i = 0;
        loop {
            assert!(i < d, "no irreducible of degree {d} found over F_{p}");
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

// --- polynomial arithmetic over the prime field, used only for the modulus
// search; the general-field version lives in `poly` ---

fn prime_poly_deg(f: &[u64]) -> usize {
    let mut d = f.len();
    while d > 0 && f[d - 1] == 0 {
        d -= 1;
    }
    d.saturating_sub(1)
}

fn prime_poly_mulmod(p: u64, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    let dm = prime_poly_deg(m);
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    for i in (dm..prod.len()).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..dm {
            prod[i - dm + j] = (prod[i - dm + j] + c * (p - m[j]) % p) % p;
        }
    }
    prod.truncate(dm.max(1));
    prod
}

fn prime_poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    loop {
        let db = prime_poly_deg(&b);
        if db == 0 && b.iter().all(|&c| c == 0) {
            return a;
        }
        // a mod b
        let da = prime_poly_deg(&a);
        if da < db {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let lead_inv = pow_mod_u64(b[db], p - 2, p);
        let mut r = a.clone();
        for i in (db..=da).rev() {
            let c = mul_mod_u64(r[i], lead_inv, p);
            if c == 0 {
                continue;
            }
            for j in 0..=db {
                r[i - db + j] = (r[i - db + j] + c * (p - b[j]) % p) % p;
            }
        }
        a = b;
        b = r;
    }
}

/// Irreducibility over `F_p` via the Frobenius criterion: `t^(p^d) = t`
/// mod `f` and `gcd(t^(p^(d/r)) - t, f) = 1` for every prime `r | d`.
fn prime_poly_irreducible(p: u64, f: &[u64]) -> bool {
    let d = prime_poly_deg(f);
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let t = vec![0u64, 1];
    // frob[k] = t^(p^k) mod f, built by iterating h -> h^p.
    let mut h = t.clone();
    let mut frob = vec![t.clone()];
    for _ in 0..d {
        h = prime_poly_powmod(p, &h, p, f);
        frob.push(h.clone());
    }
    let mut top = frob[d].clone();
    sub_t_mod_p(p, &mut top);
    if top.iter().any(|&c| c != 0) {
        return false;
    }
    for (r, _) in factor_u64(d as u64) {
        let mut g = frob[d / r as usize].clone();
        sub_t_mod_p(p, &mut g);
        let gc = prime_poly_gcd(p, f, &g);
        if prime_poly_deg(&gc) != 0 {
            return false;
        }
    }
    true
}

fn sub_t_mod_p(p: u64, f: &mut Vec<u64>) {
    if f.len() < 2 {
        f.resize(2, 0);
    }
    f[1] = (f[1] + p - 1) % p;
}

fn prime_poly_powmod(p: u64, base: &[u64], mut e: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut sq = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = prime_poly_mulmod(p, &acc, &sq, m);
        }
        sq = prime_poly_mulmod(p, &sq, &sq, m);
        e >>= 1;
    }
    acc
}

// --- raw element layer: residue slices of length `d`, no allocation ---

impl FieldSpec {
    pub(crate) fn el_is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub(crate) fn el_set_one(&self, a: &mut [u64]) {
        a.fill(0);
        a[0] = 1;
    }

    pub(crate) fn el_add_assign(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x += y;
            if *x >= self.p {
                *x -= self.p;
            }
        }
    }

    pub(crate) fn el_sub_assign(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x += self.p - y;
            if *x >= self.p {
                *x -= self.p;
            }
        }
    }

    pub(crate) fn el_neg_assign(&self, a: &mut [u64]) {
        for x in a.iter_mut() {
            if *x != 0 {
                *x = self.p - *x;
            }
        }
    }

    /// Reduce `n < 2^40 + p` modulo `p` via the precomputed reciprocal.
    ///
    /// The quotient estimate is off by at most one, so a single conditional
    /// subtraction corrects it. All products of residues (each below
    /// `p <= 2^20`, possibly plus one prior residue) stay in range; so do the
    /// lazily accumulated convolution sums in the fixed-modulus kernel, which
    /// are bounded by a small multiple of `p^2`.
    #[inline]
    pub(crate) fn fold(&self, n: u64) -> u64 {
        let est = ((n as u128 * self.mod_m as u128) >> self.mod_t) as u64;
        let r = n - est * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    /// `out = a * b`. `out` must not alias `a` or `b`.
    pub(crate) fn el_mul(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        debug_assert_eq!(a.len(), self.d);
        debug_assert_eq!(b.len(), self.d);
        if self.d == 1 {
            out[0] = self.fold(a[0] * b[0]);
            return;
        }
        let mut buf = [0u64; 2 * MAX_DEGREE];
        let conv = &mut buf[..2 * self.d - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                conv[i + j] = self.fold(conv[i + j] + ai * bj);
            }
        }
        self.reduce_conv(conv);
        out.copy_from_slice(&conv[..self.d]);
    }

    /// Reduce a convolution buffer of degree `< 2d - 1` by the modulus.
    fn reduce_conv(&self, buf: &mut [u64]) {
        let d = self.d;
        for i in (d..buf.len()).rev() {
            let c = buf[i];
            if c == 0 {
                continue;
            }
            buf[i] = 0;
            for j in 0..d {
                let m = self.modulus[j];
                if m != 0 {
                    buf[i - d + j] = self.fold(buf[i - d + j] + c * (self.p - m));
                }
            }
        }
    }

    /// `out = a^e` for a `u64` exponent, with the convention `0^0 = 1`.
    pub(crate) fn el_pow_u64(&self, a: &[u64], mut e: u64, out: &mut [u64]) {
        let mut sq = [0u64; MAX_DEGREE];
        let mut tmp = [0u64; MAX_DEGREE];
        let sq = &mut sq[..self.d];
        let tmp = &mut tmp[..self.d];
        sq.copy_from_slice(a);
        self.el_set_one(out);
        while e > 0 {
            if e & 1 == 1 {
                tmp.copy_from_slice(out);
                self.el_mul(tmp, sq, out);
            }
            e >>= 1;
            if e > 0 {
                tmp.copy_from_slice(sq);
                self.el_mul(tmp, tmp, sq);
            }
        }
    }

    /// `out = a^e` for an arbitrary-precision exponent; `0^0 = 1`.
    pub(crate) fn el_pow_big(&self, a: &[u64], e: &BigUint, out: &mut [u64]) {
        let mut sq = [0u64; MAX_DEGREE];
        let mut tmp = [0u64; MAX_DEGREE];
        let sq = &mut sq[..self.d];
        let tmp = &mut tmp[..self.d];
        sq.copy_from_slice(a);
        self.el_set_one(out);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                tmp.copy_from_slice(out);
                self.el_mul(tmp, sq, out);
            }
            if i + 1 < bits {
                tmp.copy_from_slice(sq);
                self.el_mul(tmp, tmp, sq);
            }
        }
    }

    /// `out = a^(-1)`; panics on zero (callers check).
    pub(crate) fn el_inv(&self, a: &[u64], out: &mut [u64]) {
        assert!(!self.el_is_zero(a), "inverse of zero in F_{}", self.q);
        if self.d == 1 {
            out[0] = pow_mod_u64(a[0], self.p - 2, self.p);
            return;
        }
        self.el_pow_u64(a, self.q - 2, out);
    }

    /// Apply the base-field conjugation `x -> x^(p^e)` in place of a generic
    /// power; requires the base tag.
    pub(crate) fn el_conj(&self, a: &[u64], out: &mut [u64]) -> Result<()> {
        let e = self.base_degree.ok_or_else(|| {
            invalid("conj_q requires a field built with a declared base subfield")
        })?;
        self.el_pow_u64(a, self.p.pow(e as u32), out);
        Ok(())
    }

    /// Residue-vector index: `sum coeffs[i] * p^i`, a bijection onto `0..q`.
    pub(crate) fn el_to_index(&self, a: &[u64]) -> u64 {
        let mut idx = 0u64;
        for &c in a.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub(crate) fn el_from_index(&self, mut idx: u64, out: &mut [u64]) {
        for c in out.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        debug_assert_eq!(idx, 0, "element index out of range");
    }
}

/// An element of a specific field, as a residue vector plus a field handle.
///
/// This is the convenience layer: operators allocate freely. Hot loops inside
/// the crate use the slice-based methods on [`FieldSpec`] instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    field: Field,
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn zero(field: &Field) -> Self {
        FieldElem {
            field: field.clone(),
            coeffs: vec![0; field.d],
        }
    }

    pub fn one(field: &Field) -> Self {
        let mut coeffs = vec![0; field.d];
        coeffs[0] = 1;
        FieldElem {
            field: field.clone(),
            coeffs,
        }
    }

    /// Embed a prime-field residue (reduced mod `p`).
    pub fn from_u64(field: &Field, value: u64) -> Self {
        let mut coeffs = vec![0; field.d];
        coeffs[0] = value % field.p;
        FieldElem {
            field: field.clone(),
            coeffs,
        }
    }

    /// Build from residues, constant coefficient first; shorter vectors are
    /// zero padded.
    pub fn from_residues(field: &Field, residues: &[u64]) -> Result<Self> {
        if residues.len() > field.d {
            return Err(invalid(format!(
                "residue vector of length {} in a degree-{} field",
                residues.len(),
                field.d
            )));
        }
        let mut coeffs = vec![0; field.d];
        for (c, &r) in coeffs.iter_mut().zip(residues) {
            *c = r % field.p;
        }
        Ok(FieldElem {
            field: field.clone(),
            coeffs,
        })
    }

    /// Element with the given index in `0..q` (base-`p` digits of the index
    /// are the residues).
    pub fn from_index(field: &Field, idx: u64) -> Result<Self> {
        if idx >= field.q {
            return Err(invalid(format!("element index {idx} out of range")));
        }
        let mut coeffs = vec![0; field.d];
        field.el_from_index(idx, &mut coeffs);
        Ok(FieldElem {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn index(&self) -> u64 {
        self.field.el_to_index(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.field.el_is_zero(&self.coeffs)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// `self^e` with the convention `0^0 = 1`.
    pub fn pow(&self, e: &BigUint) -> FieldElem {
        let mut out = FieldElem::zero(&self.field);
        self.field.el_pow_big(&self.coeffs, e, &mut out.coeffs);
        out
    }

    /// `self^e` for a machine-word exponent; `0^0 = 1`.
    pub fn pow_u64(&self, e: u64) -> FieldElem {
        let mut out = FieldElem::zero(&self.field);
        self.field.el_pow_u64(&self.coeffs, e, &mut out.coeffs);
        out
    }

    pub fn inverse(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(invalid("inverse of zero"));
        }
        let mut out = FieldElem::zero(&self.field);
        self.field.el_inv(&self.coeffs, &mut out.coeffs);
        Ok(out)
    }

    /// Multiplicative order of a nonzero element, by factoring `q - 1` and
    /// descending through each prime.
    pub fn mult_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(invalid("multiplicative order of zero"));
        }
        let mut ord = self.field.q - 1;
        for (r, _) in factor_u64(self.field.q - 1) {
            while ord % r == 0 && self.pow_u64(ord / r).is_one() {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Conjugation over the declared base subfield: `x -> x^(q_0)` where
    /// `q_0` is the base order. Errors unless the field carries the base tag.
    pub fn conj_q(&self) -> Result<FieldElem> {
        let mut out = FieldElem::zero(&self.field);
        self.field.el_conj(&self.coeffs, &mut out.coeffs)?;
        Ok(out)
    }
}

fn assert_same_field(a: &FieldElem, b: &FieldElem) {
    assert!(
        a.field == b.field,
        "elements of different fields (F_{} vs F_{})",
        a.field.q,
        b.field.q
    );
}

impl std::ops::Add for &FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: &FieldElem) -> FieldElem {
        assert_same_field(self, rhs);
        let mut out = self.clone();
        out.field.el_add_assign(&mut out.coeffs, &rhs.coeffs);
        out
    }
}

impl std::ops::Sub for &FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: &FieldElem) -> FieldElem {
        assert_same_field(self, rhs);
        let mut out = self.clone();
        out.field.el_sub_assign(&mut out.coeffs, &rhs.coeffs);
        out
    }
}

impl std::ops::Mul for &FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: &FieldElem) -> FieldElem {
        assert_same_field(self, rhs);
        let mut out = FieldElem::zero(&self.field);
        self.field.el_mul(&self.coeffs, &rhs.coeffs, &mut out.coeffs);
        out
    }
}

impl std::ops::Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        let mut out = self.clone();
        out.field.el_neg_assign(&mut out.coeffs);
        out
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, _) => format!("{c}"),
                (1, 1) => "t".to_string(),
                (1, _) => format!("{c}t"),
                (_, 1) => format!("t^{i}"),
                _ => format!("{c}t^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl From<Error> for fmt::Error {
    fn from(_: Error) -> fmt::Error {
        fmt::Error
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_f4_is_t2_t_1() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn modulus_f9_is_t2_plus_1() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_composite_characteristic() {
        assert!(make_field(6, 1).is_err());
        assert!(make_field(1, 1).is_err());
    }

    #[test]
    fn rejects_oversized_field() {
        assert!(matches!(make_field(2, 21), Err(Error::Guard(_))));
        assert!(make_field(2, 20).is_ok());
    }

    #[test]
    fn pow_examples_f7() {
        let f = make_field(7, 1).unwrap();
        let three = FieldElem::from_u64(&f, 3);
        assert!(three.pow_u64(6).is_one());
        assert_eq!(three.pow_u64(2).index(), 2);
    }

    #[test]
    fn zero_pow_zero_is_one() {
        let f = make_field(5, 1).unwrap();
        assert!(FieldElem::zero(&f).pow_u64(0).is_one());
    }

    #[test]
    fn lagrange_exhaustive_f59() {
        let f = make_field(59, 1).unwrap();
        for i in 0..59 {
            let x = FieldElem::from_index(&f, i).unwrap();
            assert_eq!(x.pow_u64(59).index(), i, "x^q = x failed at {i}");
        }
    }

    #[test]
    fn mult_order_examples() {
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(FieldElem::from_u64(&f7, 3).mult_order().unwrap(), 6);
        let f9 = make_field(3, 2).unwrap();
        let t = FieldElem::from_residues(&f9, &[0, 1]).unwrap();
        assert_eq!(t.mult_order().unwrap(), 4);
    }

    #[test]
    fn mult_order_divides_group_order() {
        // Exhaustive over every field of order up to 128.
        for q in 2u64..=128 {
            let Ok((p, d)) = prime_power_split(q) else {
                continue;
            };
            let f = make_field(p, d).unwrap();
            for i in 1..q {
                let x = FieldElem::from_index(&f, i).unwrap();
                let ord = x.mult_order().unwrap();
                assert_eq!((q - 1) % ord, 0, "order {ord} of index {i} in F_{q}");
                assert!(x.pow_u64(ord).is_one());
                // Minimality at each prime of ord.
                for (r, _) in factor_u64(ord) {
                    assert!(!x.pow_u64(ord / r).is_one());
                }
            }
        }
    }

    #[test]
    fn conj_fixes_base_and_is_involutive() {
        // F_9 over F_3: conj(t) = t^3 = -t with modulus t^2 + 1.
        let f9 = make_quadratic_ext(3, 1).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let t = FieldElem::from_residues(&f9, &[0, 1]).unwrap();
        let c = t.conj_q().unwrap();
        assert_eq!(c, -&t);
        // Across several quadratic extensions: involution, base-fixing,
        // and multiplicativity.
        for (p, e) in [(2u64, 1u32), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2)] {
            let field = make_quadratic_ext(p, e).unwrap();
            let q0 = field.base_order().unwrap();
            for i in 0..field.q() {
                let x = FieldElem::from_index(&field, i).unwrap();
                let cx = x.conj_q().unwrap();
                assert_eq!(cx.conj_q().unwrap(), x, "involution failed in F_{}", field.q());
                if x.pow_u64(q0) == x {
                    assert_eq!(cx, x, "base element moved");
                }
                for j in 0..field.q().min(16) {
                    let y = FieldElem::from_index(&field, j).unwrap();
                    assert_eq!(
                        (&x * &y).conj_q().unwrap(),
                        &cx * &y.conj_q().unwrap(),
                        "conj not multiplicative"
                    );
                }
            }
        }
    }

    #[test]
    fn conj_requires_base_tag() {
        let f9 = make_field(3, 2).unwrap();
        let t = FieldElem::from_residues(&f9, &[0, 1]).unwrap();
        assert!(t.conj_q().is_err());
    }

    #[test]
    fn field_arithmetic_against_integers_mod_p() {
        let f = make_field(59, 1).unwrap();
        for a in 0..59u64 {
            for b in 0..59u64 {
                let x = FieldElem::from_u64(&f, a);
                let y = FieldElem::from_u64(&f, b);
                assert_eq!((&x + &y).index(), (a + b) % 59);
                assert_eq!((&x * &y).index(), a * b % 59);
                assert_eq!((&x - &y).index(), (a + 59 - b) % 59);
            }
        }
    }

    #[test]
    fn inverse_roundtrip_extension() {
        let f = make_field(2, 4).unwrap();
        for i in 1..f.q() {
            let x = FieldElem::from_index(&f, i).unwrap();
            let inv = x.inverse().unwrap();
            assert!((&x * &inv).is_one());
        }
    }

    #[test]
    fn index_roundtrip() {
        let f = make_field(7, 3).unwrap();
        for i in 0..f.q() {
            let x = FieldElem::from_index(&f, i).unwrap();
            assert_eq!(x.index(), i);
        }
    }

    #[test]
    fn deterministic_reconstruction() {
        let a = make_field(13, 2).unwrap();
        let b = make_field(13, 2).unwrap();
        assert_eq!(a.modulus(), b.modulus());
    }
}
