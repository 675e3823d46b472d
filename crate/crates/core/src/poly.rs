//! Dense univariate polynomials over a finite field.
//!
//! Coefficients are stored flat: element `i` of the coefficient sequence
//! occupies `d` residues starting at `i * d`, constant term first, with the
//! leading block nonzero (the zero polynomial is empty). This keeps the
//! enumeration loops allocation-light.
//!
//! Everything a caller needs for the counting oracles lives here:
//! irreducibility, deterministic enumeration of monic irreducibles, the
//! reciprocal and conjugate transforms, and [`roots_satisfy_power`], which
//! decides whether every root `a` of an irreducible `f` satisfies `a^e = 1`
//! by testing the congruence `t^e = 1 (mod f)` in the quotient ring. No
//! splitting fields are ever constructed.

use std::fmt;

use num_bigint::BigUint;

use crate::ff::{Field, FieldElem};
use crate::{guard, invalid, Result};

/// Default cap on the number of candidate polynomials an enumeration may
/// visit (`2^24`).
pub const DEFAULT_ENUM_GUARD: u64 = 1 << 24;

/// A polynomial over a fixed field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    /// Flat residues, `degree + 1` blocks of length `field.degree()`;
    /// empty means the zero polynomial.
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn zero(field: &Field) -> Self {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &Field) -> Self {
        Poly::constant(&FieldElem::one(field))
    }

    /// The monomial `t`.
    pub fn t(field: &Field) -> Self {
        let d = field.degree();
        let mut coeffs = vec![0; 2 * d];
        coeffs[d] = 1;
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn constant(c: &FieldElem) -> Self {
        let mut p = Poly {
            field: c.field().clone(),
            coeffs: c.coeffs().to_vec(),
        };
        p.trim();
        p
    }

    pub fn from_elems(field: &Field, elems: &[FieldElem]) -> Self {
        let d = field.degree();
        let mut coeffs = Vec::with_capacity(elems.len() * d);
        for e in elems {
            assert!(e.field() == field, "coefficient from a different field");
            coeffs.extend_from_slice(e.coeffs());
        }
        let mut p = Poly {
            field: field.clone(),
            coeffs,
        };
        p.trim();
        p
    }

    /// Build from element indices (see [`FieldElem::from_index`]), constant
    /// term first.
    pub fn from_element_indices(field: &Field, indices: &[u64]) -> Result<Self> {
        let d = field.degree();
        let mut coeffs = vec![0; indices.len() * d];
        for (i, &idx) in indices.iter().enumerate() {
            if idx >= field.q() {
                return Err(invalid(format!("element index {idx} out of range")));
            }
            field.el_from_index(idx, &mut coeffs[i * d..(i + 1) * d]);
        }
        let mut p = Poly {
            field: field.clone(),
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let d = self.field.degree();
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() / d - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.degree() == Some(0) && self.coeff_block(0)[0] == 1
            && self.coeff_block(0)[1..].iter().all(|&c| c == 0)
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        let d = self.field.degree();
        if (i + 1) * d > self.coeffs.len() {
            FieldElem::zero(&self.field)
        } else {
            FieldElem::from_residues(&self.field, &self.coeffs[i * d..(i + 1) * d]).unwrap()
        }
    }

    pub(crate) fn coeff_block(&self, i: usize) -> &[u64] {
        let d = self.field.degree();
        &self.coeffs[i * d..(i + 1) * d]
    }

    pub fn is_monic(&self) -> bool {
        match self.degree() {
            None => false,
            Some(n) => {
                let b = self.coeff_block(n);
                b[0] == 1 && b[1..].iter().all(|&c| c == 0)
            }
        }
    }

    fn trim(&mut self) {
        let d = self.field.degree();
        while !self.coeffs.is_empty() {
            let n = self.coeffs.len();
            if self.coeffs[n - d..].iter().all(|&c| c == 0) {
                self.coeffs.truncate(n - d);
            } else {
                break;
            }
        }
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        assert!(self.field == rhs.field, "polynomials over different fields");
        let mut out = if self.coeffs.len() >= rhs.coeffs.len() {
            self.clone()
        } else {
            rhs.clone()
        };
        let small = if self.coeffs.len() >= rhs.coeffs.len() {
            &rhs.coeffs
        } else {
            &self.coeffs
        };
        let d = self.field.degree();
        for i in 0..small.len() / d {
            let mut block = [0u64; crate::ff::MAX_DEGREE];
            block[..d].copy_from_slice(&small[i * d..(i + 1) * d]);
            self.field
                .el_add_assign(&mut out.coeffs[i * d..(i + 1) * d], &block[..d]);
        }
        out.trim();
        out
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        assert!(self.field == rhs.field, "polynomials over different fields");
        let d = self.field.degree();
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = self.clone();
        out.coeffs.resize(len, 0);
        for i in 0..rhs.coeffs.len() / d {
            self.field
                .el_sub_assign(&mut out.coeffs[i * d..(i + 1) * d], rhs.coeff_block(i));
        }
        out.trim();
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        let d = self.field.degree();
        for i in 0..out.coeffs.len() / d {
            self.field.el_neg_assign(&mut out.coeffs[i * d..(i + 1) * d]);
        }
        out
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        assert!(self.field == rhs.field, "polynomials over different fields");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(&self.field);
        }
        let d = self.field.degree();
        let na = self.coeffs.len() / d;
        let nb = rhs.coeffs.len() / d;
        let mut out = Poly {
            field: self.field.clone(),
            coeffs: vec![0; (na + nb - 1) * d],
        };
        let mut tmp = [0u64; crate::ff::MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in 0..na {
            let a = self.coeff_block(i);
            if a.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..nb {
                self.field.el_mul(a, rhs.coeff_block(j), tmp);
                self.field
                    .el_add_assign(&mut out.coeffs[(i + j) * d..(i + j + 1) * d], tmp);
            }
        }
        out.trim();
        out
    }

    /// Scale by a field element.
    pub fn scale(&self, c: &FieldElem) -> Poly {
        let d = self.field.degree();
        let mut out = Poly {
            field: self.field.clone(),
            coeffs: vec![0; self.coeffs.len()],
        };
        let mut tmp = [0u64; crate::ff::MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in 0..self.coeffs.len() / d {
            self.field.el_mul(self.coeff_block(i), c.coeffs(), tmp);
            out.coeffs[i * d..(i + 1) * d].copy_from_slice(tmp);
        }
        out.trim();
        out
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        assert!(self.field == div.field, "polynomials over different fields");
        let d = self.field.degree();
        let nd = div.degree().unwrap();
        let Some(n) = self.degree() else {
            return (Poly::zero(&self.field), Poly::zero(&self.field));
        };
        if n < nd {
            return (Poly::zero(&self.field), self.clone());
        }
        let mut lead_inv = [0u64; crate::ff::MAX_DEGREE];
        let lead_inv = &mut lead_inv[..d];
        self.field.el_inv(div.coeff_block(nd), lead_inv);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; (n - nd + 1) * d];
        let mut c = [0u64; crate::ff::MAX_DEGREE];
        let c = &mut c[..d];
        let mut tmp = [0u64; crate::ff::MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in (nd..=n).rev() {
            self.field.el_mul(&rem[i * d..(i + 1) * d], lead_inv, c);
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            quot[(i - nd) * d..(i - nd + 1) * d].copy_from_slice(c);
            for j in 0..=nd {
                self.field.el_mul(c, div.coeff_block(j), tmp);
                let k = i - nd + j;
                self.field.el_sub_assign(&mut rem[k * d..(k + 1) * d], tmp);
            }
        }
        let mut q = Poly {
            field: self.field.clone(),
            coeffs: quot,
        };
        let mut r = Poly {
            field: self.field.clone(),
            coeffs: rem,
        };
        q.trim();
        r.trim();
        (q, r)
    }

    pub fn rem(&self, div: &Poly) -> Poly {
        self.divrem(div).1
    }

    pub fn make_monic(&self) -> Poly {
        match self.degree() {
            None => self.clone(),
            Some(n) => {
                let lead = self.coeff(n);
                if lead.is_one() {
                    self.clone()
                } else {
                    self.scale(&lead.inverse().expect("nonzero leading coefficient"))
                }
            }
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        let d = self.field.degree();
        let Some(n) = self.degree() else {
            return Poly::zero(&self.field);
        };
        if n == 0 {
            return Poly::zero(&self.field);
        }
        let mut out = Poly {
            field: self.field.clone(),
            coeffs: vec![0; n * d],
        };
        let p = self.field.p();
        for i in 1..=n {
            let k = (i as u64) % p;
            if k == 0 {
                continue;
            }
            let block = self.coeff_block(i);
            for j in 0..d {
                out.coeffs[(i - 1) * d + j] = block[j] * k % p;
            }
        }
        out.trim();
        out
    }

    /// Evaluate at a field element by Horner's rule.
    pub fn eval(&self, at: &FieldElem) -> FieldElem {
        let Some(n) = self.degree() else {
            return FieldElem::zero(&self.field);
        };
        let mut acc = self.coeff(n);
        for i in (0..n).rev() {
            acc = &(&acc * at) + &self.coeff(i);
        }
        acc
    }

    /// `self^e mod m` for a monic modulus of degree at least 1.
    pub fn powmod(&self, e: &BigUint, m: &Poly) -> Poly {
        assert!(m.is_monic(), "powmod requires a monic modulus");
        let mut acc = Poly::one(&self.field);
        let mut sq = self.rem(m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc.mul(&sq).rem(m);
            }
            if i + 1 < bits {
                sq = sq.mul(&sq).rem(m);
            }
        }
        acc
    }

    pub fn powmod_u64(&self, e: u64, m: &Poly) -> Poly {
        self.powmod(&BigUint::from(e), m)
    }

    /// Largest `k` with `t^k | self`; zero polynomial is rejected by callers.
    pub fn t_multiplicity(&self) -> usize {
        let d = self.field.degree();
        let blocks = self.coeffs.len() / d;
        for i in 0..blocks {
            if !self.coeff_block(i).iter().all(|&c| c == 0) {
                return i;
            }
        }
        blocks
    }

    /// Divide by `t^k` (requires divisibility).
    pub fn shift_down(&self, k: usize) -> Poly {
        let d = self.field.degree();
        assert!(self.t_multiplicity() >= k, "not divisible by t^{k}");
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs[k * d..].to_vec(),
        }
    }
}

/// Fixed-modulus arithmetic in the quotient ring `F_q[t]/(f)` for a monic
/// `f` of degree `n >= 1`. Residues are flat buffers of exactly `n`
/// coefficient blocks (`n * d` words, constant term first, no trimming); the
/// zero residue is all zeros. The product scratch lives in the struct, so the
/// inner loops of the enumeration-heavy counts never allocate.
pub(crate) struct ModArith {
    field: Field,
    n: usize,
    d: usize,
    /// Non-leading coefficient blocks of the modulus (`n * d` words).
    low: Vec<u64>,
    /// Scratch for the unreduced product (`2n - 1` blocks).
    wide: Vec<u64>,
    /// Recycled exponentiation scratch.
    pow_sq: Vec<u64>,
    pow_tmp: Vec<u64>,
}

impl ModArith {
    pub(crate) fn new(f: &Poly) -> Self {
        let n = f.degree().expect("modulus must be nonzero");
        assert!(f.is_monic(), "modulus must be monic of degree >= 1");
        assert!(n >= 1, "modulus must have degree >= 1");
        ModArith::from_low_blocks(f.field(), n, &f.coeffs[..n * f.field().degree()])
    }

    /// Build from the non-leading coefficient blocks of a monic degree-`n`
    /// modulus (`n * d` residue words, constant term first; the leading 1 is
    /// implicit).
    pub(crate) fn from_low_blocks(field: &Field, n: usize, low: &[u64]) -> Self {
        let d = field.degree();
        assert!(n >= 1, "modulus must have degree >= 1");
        assert_eq!(low.len(), n * d);
        ModArith {
            field: field.clone(),
            n,
            d,
            low: low.to_vec(),
            wide: vec![0; (2 * n - 1) * (2 * d - 1)],
            pow_sq: Vec::new(),
            pow_tmp: Vec::new(),
        }
    }

    /// Re-point at another modulus of the same field and degree, reusing the
    /// scratch buffers (the enumeration loops swap moduli millions of times).
    pub(crate) fn set_low_blocks(&mut self, low: &[u64]) {
        assert_eq!(low.len(), self.n * self.d);
        self.low.copy_from_slice(low);
    }

    /// Words per residue buffer.
    pub(crate) fn width(&self) -> usize {
        self.n * self.d
    }

    /// Write the residue of `t` into `out` (for `n = 1` that is `-f(0)`).
    pub(crate) fn set_t(&self, out: &mut [u64]) {
        out.fill(0);
        if self.n == 1 {
            out.copy_from_slice(&self.low);
            self.field.el_neg_assign(out);
        } else {
            out[self.d] = 1;
        }
    }

    pub(crate) fn is_one(&self, a: &[u64]) -> bool {
        a[0] == 1 && a[1..].iter().all(|&c| c == 0)
    }

    /// `out = a * b mod f`. `out` must not alias `a` or `b` (`a` and `b` may
    /// alias each other, e.g. for squaring).
    ///
    /// Works on a doubly-lazy convolution: coefficient blocks accumulate raw
    /// word products (each below `p^2`) and are only folded back below `p`
    /// when a block is consumed. The accumulated sums stay far below the
    /// range [`crate::ff::FieldSpec::fold`] accepts, because at most `2nd`
    /// products land in one slot and `q = p^d` is capped at `2^20`.
    pub(crate) fn mul_mod(&mut self, a: &[u64], b: &[u64], out: &mut [u64]) {
        debug_assert_eq!(a.len(), self.n * self.d);
        debug_assert_eq!(b.len(), self.n * self.d);
        if self.d == 1 {
            // Prime field: words are residues and the convolution is flat.
            let ModArith {
                field,
                n,
                low,
                wide,
                ..
            } = self;
            let n = *n;
            let p = field.p();
            wide.fill(0);
            for (i, &av) in a.iter().enumerate() {
                if av == 0 {
                    continue;
                }
                for (w, &bv) in wide[i..i + n].iter_mut().zip(b) {
                    *w += av * bv;
                }
            }
            for bi in (n..2 * n - 1).rev() {
                let c = field.fold(wide[bi]);
                if c == 0 {
                    continue;
                }
                let cn = p - c;
                for (w, &fv) in wide[bi - n..bi].iter_mut().zip(low.iter()) {
                    *w += cn * fv;
                }
            }
            for (o, &w) in out.iter_mut().zip(wide.iter()) {
                *o = field.fold(w);
            }
            return;
        }
        // Monomorphize the common extension widths so the element loops
        // fully unroll; 0 stands for "read the width at runtime".
        match self.d {
            2 => self.mul_mod_ext::<2>(a, b, out),
            3 => self.mul_mod_ext::<3>(a, b, out),
            4 => self.mul_mod_ext::<4>(a, b, out),
            5 => self.mul_mod_ext::<5>(a, b, out),
            _ => self.mul_mod_ext::<0>(a, b, out),
        }
    }

    fn mul_mod_ext<const DC: usize>(&mut self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let ModArith {
            field,
            n,
            d,
            low,
            wide,
            ..
        } = self;
        let n = *n;
        let dd = *d;
        let d = if DC == 0 { dd } else { DC };
        debug_assert_eq!(d, dd);
        let ew = 2 * d - 1; // element-level convolution width per block
        let p = field.p();
        let elmod = &field.modulus()[..d];
        wide.fill(0);
        for i in 0..n {
            for s in 0..d {
                let av = a[i * d + s];
                if av == 0 {
                    continue;
                }
                for j in 0..n {
                    let bb = &b[j * d..(j + 1) * d];
                    let row = &mut wide[(i + j) * ew + s..(i + j) * ew + s + d];
                    for (w, &bv) in row.iter_mut().zip(bb) {
                        *w += av * bv;
                    }
                }
            }
        }
        // Cascade the high blocks down with t^n = -(low blocks) (mod f),
        // descending so each block sees the contributions from above.
        let mut c = [0u64; crate::ff::MAX_DEGREE];
        let c = &mut c[..d];
        for bi in (n..2 * n - 1).rev() {
            reduce_elem(field, p, elmod, &mut wide[bi * ew..(bi + 1) * ew]);
            for (s, cs) in c.iter_mut().enumerate() {
                // Negate, so the fold stays an addition of raw products.
                let w = wide[bi * ew + s];
                *cs = if w == 0 { 0 } else { p - w };
            }
            if c.iter().all(|&x| x == 0) {
                continue;
            }
            for j in 0..n {
                let fb = &low[j * d..(j + 1) * d];
                let base = (bi - n + j) * ew;
                for (s, &cs) in c.iter().enumerate() {
                    if cs == 0 {
                        continue;
                    }
                    let row = &mut wide[base + s..base + s + d];
                    for (w, &fv) in row.iter_mut().zip(fb) {
                        *w += cs * fv;
                    }
                }
            }
        }
        for bi in 0..n {
            reduce_elem(field, p, elmod, &mut wide[bi * ew..(bi + 1) * ew]);
            out[bi * d..(bi + 1) * d].copy_from_slice(&wide[bi * ew..bi * ew + d]);
        }
    }

    /// `out = base^e mod f` with the convention `0^0 = 1`.
    pub(crate) fn pow_u64(&mut self, base: &[u64], mut e: u64, out: &mut [u64]) {
        out.fill(0);
        out[0] = 1;
        if e == 0 {
            return;
        }
        let w = self.width();
        let mut sq = std::mem::take(&mut self.pow_sq);
        let mut scratch = std::mem::take(&mut self.pow_tmp);
        sq.clear();
        sq.extend_from_slice(base);
        scratch.resize(w, 0);
        loop {
            if e & 1 == 1 {
                scratch.copy_from_slice(out);
                self.mul_mod(&scratch, &sq, out);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            scratch.copy_from_slice(&sq);
            self.mul_mod(&scratch, &scratch, &mut sq);
        }
        self.pow_sq = sq;
        self.pow_tmp = scratch;
    }

    /// `out = base^e mod f` for an arbitrary-precision exponent.
    pub(crate) fn pow_big(&mut self, base: &[u64], e: &BigUint, out: &mut [u64]) {
        out.fill(0);
        out[0] = 1;
        let bits = e.bits();
        if bits == 0 {
            return;
        }
        let w = self.width();
        let mut sq = std::mem::take(&mut self.pow_sq);
        let mut scratch = std::mem::take(&mut self.pow_tmp);
        sq.clear();
        sq.extend_from_slice(base);
        scratch.resize(w, 0);
        for i in 0..bits {
            if e.bit(i) {
                scratch.copy_from_slice(out);
                self.mul_mod(&scratch, &sq, out);
            }
            if i + 1 < bits {
                scratch.copy_from_slice(&sq);
                self.mul_mod(&scratch, &scratch, &mut sq);
            }
        }
        self.pow_sq = sq;
        self.pow_tmp = scratch;
    }

    /// Whether `t^e = 1` in the quotient ring.
    pub(crate) fn t_power_is_one(&mut self, e: u64) -> bool {
        if e == 0 {
            return true;
        }
        let w = self.width();
        let mut t = vec![0u64; w];
        self.set_t(&mut t);
        let mut out = vec![0u64; w];
        self.pow_u64(&t, e, &mut out);
        self.is_one(&out)
    }
}

/// Fold a raw element-convolution window (`2d - 1` lazily accumulated words)
/// in place so its first `d` words become proper residues, cascading the
/// upper words down through the field modulus.
#[inline]
fn reduce_elem(field: &crate::ff::FieldSpec, p: u64, elmod: &[u64], w: &mut [u64]) {
    let d = elmod.len();
    for s in (d..2 * d - 1).rev() {
        let c = field.fold(w[s]);
        w[s] = 0;
        if c == 0 {
            continue;
        }
        for (t, &m) in elmod.iter().enumerate() {
            if m != 0 {
                w[s - d + t] += c * (p - m);
            }
        }
    }
    for x in w[..d].iter_mut() {
        *x = field.fold(*x);
    }
}

/// Reinterpret an (untrimmed) residue buffer as a polynomial.
fn residue_poly(field: &Field, res: &[u64]) -> Poly {
    let mut p = Poly {
        field: field.clone(),
        coeffs: res.to_vec(),
    };
    p.trim();
    p
}

/// Squarefree part (radical): the product of the distinct irreducible
/// factors of a monic polynomial. Correct in characteristic `p`, where a
/// vanishing derivative signals a perfect `p`-th power.
pub fn radical(f: &Poly) -> Poly {
    let field = f.field().clone();
    match f.degree() {
        None => panic!("radical of the zero polynomial"),
        Some(0) => return Poly::one(&field),
        _ => {}
    }
    let f = f.make_monic();
    let df = f.derivative();
    if df.is_zero() {
        return radical(&pth_root(&f));
    }
    let g = f.gcd(&df);
    if g.degree() == Some(0) {
        return f;
    }
    // w carries each factor whose multiplicity is not divisible by p, once.
    let w = f.divrem(&g).0;
    let mut r = f;
    loop {
        let c = r.gcd(&w);
        if c.degree() == Some(0) {
            break;
        }
        r = r.divrem(&c).0;
    }
    // What remains of f is a perfect p-th power holding the other factors.
    if r.degree() == Some(0) {
        w
    } else {
        w.mul(&radical(&pth_root(&r)))
    }
}

/// `p`-th root of a polynomial whose derivative vanishes: `sum a_(pi) t^(pi)`
/// maps to `sum a_(pi)^(1/p) t^i`, using the inverse Frobenius on
/// coefficients.
fn pth_root(f: &Poly) -> Poly {
    let field = f.field();
    let p = field.p() as usize;
    let d = field.degree();
    let n = f.degree().expect("pth_root of zero");
    assert!(f.derivative().is_zero(), "pth_root requires vanishing derivative");
    // x -> x^(p^(d-1)) inverts x -> x^p on F_(p^d).
    let inv_frob = field.p().pow(d as u32 - 1);
    let mut elems = Vec::with_capacity(n / p + 1);
    for i in (0..=n).step_by(p) {
        let c = FieldElem::from_residues(field, f.coeff_block(i)).unwrap();
        elems.push(c.pow_u64(inv_frob));
    }
    Poly::from_elems(field, &elems)
}

/// Distinct-degree split of a monic squarefree polynomial: returns pairs
/// `(d, g_d)` where `g_d` is the product of the irreducible factors of
/// degree exactly `d`, in increasing `d`.
pub fn distinct_degree_split(s: &Poly) -> Vec<(usize, Poly)> {
    let field = s.field().clone();
    let mut rem = s.make_monic();
    let mut out = Vec::new();
    let t = Poly::t(&field);
    let mut h = t.rem(&rem);
    let mut d = 0usize;
    while rem.degree().map_or(false, |n| n > 0) {
        d += 1;
        let n = rem.degree().unwrap();
        if 2 * d > n {
            out.push((n, rem.clone()));
            break;
        }
        h = h.powmod_u64(field.q(), &rem);
        let g = h.sub(&t.rem(&rem)).gcd(&rem);
        if g.degree().map_or(false, |k| k > 0) {
            out.push((d, g.clone()));
            rem = rem.divrem(&g).0;
            h = h.rem(&rem);
        }
    }
    out
}

/// Frobenius-criterion irreducibility test: `f` of degree `n` is irreducible
/// iff `t^(q^n) = t (mod f)` and `gcd(t^(q^(n/r)) - t, f) = 1` for each
/// prime `r | n`.
pub fn is_irreducible(f: &Poly) -> bool {
    let Some(n) = f.degree() else {
        return false;
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let field = f.field().clone();
    let f = f.make_monic();
    let q = field.q();
    // Degree >= 2 with zero constant term is divisible by t.
    if f.coeff_block(0).iter().all(|&c| c == 0) {
        return false;
    }
    let checkpoints: Vec<usize> = crate::ff::factor_u64(n as u64)
        .iter()
        .map(|&(r, _)| n / r as usize)
        .collect();
    let d = field.degree();
    let mut m = ModArith::new(&f);
    let w = m.width();
    let mut t_res = vec![0u64; w];
    m.set_t(&mut t_res);
    let mut h = t_res.clone();
    let mut hq = vec![0u64; w];
    for k in 1..=n {
        m.pow_u64(&h, q, &mut hq);
        h.copy_from_slice(&hq);
        if checkpoints.contains(&k) {
            let mut diff = h.clone();
            for b in 0..n {
                field.el_sub_assign(&mut diff[b * d..(b + 1) * d], &t_res[b * d..(b + 1) * d]);
            }
            // gcd(t^(q^k) - t, f) > 1 means f has a factor of degree
            // dividing k (gcd with the zero difference returns f itself).
            let g = residue_poly(&field, &diff).gcd(&f);
            if g.degree() != Some(0) {
                return false;
            }
        }
    }
    h == t_res
}

/// Iterator over all monic polynomials of fixed degree in ascending index
/// order: candidate `N` has coefficient blocks given by the base-`q` digits
/// of `N`, constant term least significant, so the order compares leading
/// coefficients first and the constant term last (the same convention the
/// field modulus search uses).
pub struct MonicPolys {
    field: Field,
    n: usize,
    next_idx: u64,
    total: u64,
}

impl MonicPolys {
    pub fn new(field: &Field, n: u32, guard_limit: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("enumeration needs degree at least 1"));
        }
        let total = (field.q() as u128).checked_pow(n).unwrap_or(u128::MAX);
        if total > guard_limit as u128 {
            return Err(guard(format!(
                "enumerating q^n = {}^{} monic polynomials exceeds the guard {guard_limit}",
                field.q(),
                n
            )));
        }
        Ok(MonicPolys {
            field: field.clone(),
            n: n as usize,
            next_idx: 0,
            total: total as u64,
        })
    }

    /// Decode candidate `idx` into `out` (element indices, constant first,
    /// leading block set to 1).
    fn decode(&self, mut idx: u64, out: &mut Vec<u64>) {
        out.clear();
        let q = self.field.q();
        for _ in 0..self.n {
            out.push(idx % q);
            idx /= q;
        }
        out.push(1);
    }
}

impl Iterator for MonicPolys {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        if self.next_idx >= self.total {
            return None;
        }
        let mut indices = Vec::new();
        self.decode(self.next_idx, &mut indices);
        self.next_idx += 1;
        Some(Poly::from_element_indices(&self.field, &indices).unwrap())
    }
}

/// Iterator over all monic irreducible polynomials of fixed degree, in the
/// same deterministic order as [`MonicPolys`].
pub fn enumerate_monic_irreducibles(
    field: &Field,
    n: u32,
    guard_limit: u64,
) -> Result<impl Iterator<Item = Poly>> {
    Ok(MonicPolys::new(field, n, guard_limit)?.filter(|f| is_irreducible(f)))
}

/// Reciprocal transform: for monic `f` with `f(0) != 0`, the monic polynomial
/// `f(0)^(-1) t^n f(1/t)`, whose roots are the inverses of the roots of `f`.
pub fn reciprocal_transform(f: &Poly) -> Result<Poly> {
    let n = f
        .degree()
        .ok_or_else(|| invalid("reciprocal transform of zero"))?;
    if !f.is_monic() {
        return Err(invalid("reciprocal transform requires a monic polynomial"));
    }
    let a0 = f.coeff(0);
    if a0.is_zero() {
        return Err(invalid("reciprocal transform requires a nonzero constant term"));
    }
    let a0_inv = a0.inverse().unwrap();
    let elems: Vec<FieldElem> = (0..=n).map(|i| &f.coeff(n - i) * &a0_inv).collect();
    Ok(Poly::from_elems(f.field(), &elems))
}

/// Conjugate transform over a field with a declared base subfield `F_q`:
/// coefficients are conjugated (`x -> x^q`) and reversed, normalized monic.
/// The roots of the result are `a -> a^(-q)` images of the roots of `f`.
pub fn conjugate_transform(f: &Poly) -> Result<Poly> {
    let n = f
        .degree()
        .ok_or_else(|| invalid("conjugate transform of zero"))?;
    if !f.is_monic() {
        return Err(invalid("conjugate transform requires a monic polynomial"));
    }
    let a0 = f.coeff(0);
    if a0.is_zero() {
        return Err(invalid("conjugate transform requires a nonzero constant term"));
    }
    let norm = a0.conj_q()?.inverse().unwrap();
    let elems: Vec<FieldElem> = (0..=n)
        .map(|i| Ok(&f.coeff(n - i).conj_q()? * &norm))
        .collect::<Result<_>>()?;
    Ok(Poly::from_elems(f.field(), &elems))
}

/// Whether every root `a` of the monic irreducible `f != t` satisfies
/// `a^e = 1`, decided by the congruence `t^e = 1 (mod f)`.
pub fn roots_satisfy_power(f: &Poly, e: &BigUint) -> Result<bool> {
    let n = f.degree().ok_or_else(|| invalid("zero polynomial"))?;
    if n == 0 || !f.is_monic() {
        return Err(invalid("roots_satisfy_power requires a monic polynomial of degree >= 1"));
    }
    if f.coeff(0).is_zero() {
        return Err(invalid("roots_satisfy_power requires f != t (its root 0 is never a root of unity)"));
    }
    if !is_irreducible(f) {
        return Err(invalid("roots_satisfy_power requires an irreducible polynomial"));
    }
    Ok(roots_satisfy_power_unchecked(f, e))
}

/// The congruence kernel without validation; callers guarantee `f` monic
/// irreducible. For `f = t` this correctly returns false.
pub(crate) fn roots_satisfy_power_unchecked(f: &Poly, e: &BigUint) -> bool {
    let mut m = ModArith::new(f);
    match u64::try_from(e) {
        Ok(e64) => m.t_power_is_one(e64),
        Err(_) => {
            let w = m.width();
            let mut t = vec![0u64; w];
            m.set_t(&mut t);
            let mut out = vec![0u64; w];
            m.pow_big(&t, e, &mut out);
            m.is_one(&out)
        }
    }
}

impl fmt::Display for Poly {
    /// Prime-field coefficients print as residues (`t^2 + 5t + 4`); extension
    /// coefficients print as bracketed element indices (`t^2 + [4]t + [7]`).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(n) = self.degree() else {
            return write!(f, "0");
        };
        let d = self.field.degree();
        let mut terms = Vec::new();
        for i in (0..=n).rev() {
            let block = self.coeff_block(i);
            if block.iter().all(|&c| c == 0) {
                continue;
            }
            let idx = self.field.el_to_index(block);
            let is_one = idx == 1;
            let coeff_str = if d == 1 {
                format!("{idx}")
            } else {
                format!("[{idx}]")
            };
            let term = match i {
                0 => coeff_str,
                1 if is_one => "t".to_string(),
                1 => format!("{coeff_str}t"),
                _ if is_one => format!("t^{i}"),
                _ => format!("{coeff_str}t^{i}"),
            };
            terms.push(term);
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{make_field, make_quadratic_ext};

    fn poly(field: &Field, indices: &[u64]) -> Poly {
        Poly::from_element_indices(field, indices).unwrap()
    }

    #[test]
    fn irreducible_examples() {
        let f2 = make_field(2, 1).unwrap();
        assert!(is_irreducible(&poly(&f2, &[1, 1, 1])));
        let f59 = make_field(59, 1).unwrap();
        // t^2 - 31t - 42 = t^2 + 28t + 17 over F_59.
        assert!(is_irreducible(&poly(&f59, &[17, 28, 1])));
        let f7 = make_field(7, 1).unwrap();
        // t^2 - 1 factors.
        assert!(!is_irreducible(&poly(&f7, &[6, 0, 1])));
    }

    /// Brute-force irreducibility: no monic divisor of degree 1..n/2+1.
    fn irreducible_by_trial_division(f: &Poly) -> bool {
        let n = f.degree().unwrap();
        if n == 1 {
            return true;
        }
        for d in 1..=n / 2 {
            for g in MonicPolys::new(f.field(), d as u32, 1 << 20).unwrap() {
                if f.rem(&g).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn irreducibility_matches_trial_division() {
        for (p, d) in [(2u64, 1u32), (3, 1), (2, 2)] {
            let field = make_field(p, d).unwrap();
            for n in 1..=4u32 {
                for f in MonicPolys::new(&field, n, 1 << 20).unwrap() {
                    assert_eq!(
                        is_irreducible(&f),
                        irreducible_by_trial_division(&f),
                        "mismatch for {f} over F_{}",
                        field.q()
                    );
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        let f3 = make_field(3, 1).unwrap();
        let quads: Vec<Poly> = enumerate_monic_irreducibles(&f3, 2, DEFAULT_ENUM_GUARD)
            .unwrap()
            .collect();
        assert_eq!(quads.len(), 3);
        // Ascending order compares the t-coefficient before the constant.
        assert_eq!(format!("{}", quads[0]), "t^2 + 1");

        let f7 = make_field(7, 1).unwrap();
        let cubics = enumerate_monic_irreducibles(&f7, 3, DEFAULT_ENUM_GUARD)
            .unwrap()
            .count();
        assert_eq!(cubics, 112);
    }

    fn mobius_small(n: u64) -> i64 {
        let mut n = n;
        let mut mu = 1i64;
        let mut f = 2u64;
        while f * f <= n {
            if n % f == 0 {
                n /= f;
                if n % f == 0 {
                    return 0;
                }
                mu = -mu;
            }
            f += 1;
        }
        if n > 1 {
            mu = -mu;
        }
        mu
    }

    #[test]
    fn enumeration_count_matches_necklace_formula() {
        // (1/n) sum_{i|n} mu(n/i) q^i monic irreducibles of degree n.
        for (p, d) in [(2u64, 1u32), (3, 1), (5, 1), (2, 2)] {
            let field = make_field(p, d).unwrap();
            let q = field.q() as i64;
            for n in 1..=6u32 {
                if (field.q() as u128).pow(n) > 1 << 20 {
                    continue;
                }
                let mut necklace = 0i64;
                for i in 1..=n as i64 {
                    if n as i64 % i == 0 {
                        necklace += mobius_small((n as i64 / i) as u64) * q.pow(i as u32);
                    }
                }
                necklace /= n as i64;
                let got = enumerate_monic_irreducibles(&field, n, 1 << 20)
                    .unwrap()
                    .count() as i64;
                assert_eq!(got, necklace, "degree {n} over F_{q}");
            }
        }
    }

    #[test]
    fn guard_refuses_oversized_enumeration() {
        let f7 = make_field(7, 1).unwrap();
        assert!(matches!(
            MonicPolys::new(&f7, 10, DEFAULT_ENUM_GUARD),
            Err(crate::Error::Guard(_))
        ));
    }

    #[test]
    fn reciprocal_example_and_involution() {
        let f7 = make_field(7, 1).unwrap();
        let f = poly(&f7, &[2, 3, 1]);
        let r = reciprocal_transform(&f).unwrap();
        assert_eq!(format!("{r}"), "t^2 + 5t + 4");
        // Involution on every monic cubic with nonzero constant term over F_5.
        let f5 = make_field(5, 1).unwrap();
        for f in MonicPolys::new(&f5, 3, 1 << 20).unwrap() {
            if f.coeff(0).is_zero() {
                continue;
            }
            let r = reciprocal_transform(&f).unwrap();
            assert_eq!(reciprocal_transform(&r).unwrap(), f);
        }
    }

    #[test]
    fn reciprocal_rejects_zero_constant() {
        let f7 = make_field(7, 1).unwrap();
        assert!(reciprocal_transform(&poly(&f7, &[0, 3, 1])).is_err());
    }

    #[test]
    fn conjugate_linear_fixed_points() {
        // Over F_9 with base F_3: t - a is fixed iff a^(q+1) = a^4 = 1.
        let f9 = make_quadratic_ext(3, 1).unwrap();
        let mut fixed = 0;
        for i in 1..9 {
            let a = FieldElem::from_index(&f9, i).unwrap();
            let f = Poly::from_elems(&f9, &[-&a, FieldElem::one(&f9)]);
            let c = conjugate_transform(&f).unwrap();
            if c == f {
                fixed += 1;
                assert!(a.pow_u64(4).is_one());
            } else {
                assert!(!a.pow_u64(4).is_one());
            }
        }
        assert_eq!(fixed, 4);
    }

    #[test]
    fn conjugate_involution_exhaustive_f9() {
        let f9 = make_quadratic_ext(3, 1).unwrap();
        for f in MonicPolys::new(&f9, 2, 1 << 20).unwrap() {
            if f.coeff(0).is_zero() {
                continue;
            }
            let c = conjugate_transform(&f).unwrap();
            assert_eq!(conjugate_transform(&c).unwrap(), f);
        }
    }

    #[test]
    fn fixed_modulus_kernel_matches_powmod() {
        // The allocation-free quotient-ring kernel must agree with the
        // generic powmod for every monic modulus, reducible or not.
        for (p, d) in [(2u64, 1u32), (3, 1), (7, 1), (2, 2), (5, 2)] {
            let field = make_field(p, d).unwrap();
            let q = field.q();
            for n in 1..=3u32 {
                let exps = [0u64, 1, 2, 7, q.pow(n) - 1, q.pow(n) + 3];
                // Subsample large modulus spaces; small ones run exhaustively.
                let stride = (q.pow(n) as usize / 500).max(1);
                for f in MonicPolys::new(&field, n, 1 << 20).unwrap().step_by(stride) {
                    let mut m = ModArith::new(&f);
                    let w = m.width();
                    let mut t_res = vec![0u64; w];
                    m.set_t(&mut t_res);
                    let t = Poly::t(&field);
                    let mut out = vec![0u64; w];
                    for &e in &exps {
                        m.pow_u64(&t_res, e, &mut out);
                        let expect = t.powmod(&BigUint::from(e), &f);
                        assert_eq!(
                            residue_poly(&field, &out),
                            expect,
                            "t^{e} mod {f} over F_{q}"
                        );
                        m.pow_big(&t_res, &BigUint::from(e), &mut out);
                        assert_eq!(residue_poly(&field, &out), expect);
                        assert_eq!(m.t_power_is_one(e), expect.is_one());
                    }
                }
            }
        }
    }

    #[test]
    fn roots_satisfy_power_examples() {
        let f5 = make_field(5, 1).unwrap();
        // Roots of t^2 + t + 1 over F_5 are primitive cube roots of unity
        // living in F_25.
        let f = poly(&f5, &[1, 1, 1]);
        assert!(is_irreducible(&f));
        assert!(roots_satisfy_power(&f, &BigUint::from(3u32)).unwrap());
        assert!(!roots_satisfy_power(&f, &BigUint::from(2u32)).unwrap());
        // t - 1 satisfies every power.
        let f7 = make_field(7, 1).unwrap();
        let lin = poly(&f7, &[6, 1]);
        assert!(roots_satisfy_power(&lin, &BigUint::from(1u32)).unwrap());
        // The F_59 quadratic has roots of order dividing 435 but not 29.
        let f59 = make_field(59, 1).unwrap();
        let g = poly(&f59, &[17, 28, 1]);
        assert!(!roots_satisfy_power(&g, &BigUint::from(29u32)).unwrap());
        assert!(roots_satisfy_power(&g, &BigUint::from(435u32)).unwrap());
    }

    #[test]
    fn roots_satisfy_power_rejects_bad_input() {
        let f7 = make_field(7, 1).unwrap();
        // Reducible.
        assert!(roots_satisfy_power(&poly(&f7, &[6, 0, 1]), &BigUint::from(2u32)).is_err());
        // f = t.
        assert!(roots_satisfy_power(&poly(&f7, &[0, 1]), &BigUint::from(2u32)).is_err());
    }

    #[test]
    fn roots_power_always_holds_at_group_order() {
        // Every irreducible of degree n has roots in the unit group of
        // F_(q^n), so e = q^n - 1 always works.
        for (p, d, n) in [(3u64, 1u32, 3u32), (5, 1, 2), (2, 2, 2)] {
            let field = make_field(p, d).unwrap();
            let e = BigUint::from(field.q().pow(n) - 1);
            for f in enumerate_monic_irreducibles(&field, n, 1 << 20).unwrap() {
                if f.coeff(0).is_zero() {
                    continue;
                }
                assert!(roots_satisfy_power(&f, &e).unwrap(), "{f}");
            }
        }
    }

    #[test]
    fn divrem_roundtrip() {
        let f13 = make_field(13, 1).unwrap();
        let a = poly(&f13, &[3, 1, 4, 1, 5]);
        let b = poly(&f13, &[2, 7, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().map_or(true, |d| d < 2));
    }

    #[test]
    fn radical_strips_multiplicity() {
        let f3 = make_field(3, 1).unwrap();
        let a = poly(&f3, &[2, 1]); // t + 2 = t - 1
        let b = poly(&f3, &[1, 1]); // t + 1
        // (t-1)^3 (t+1): the cube hits the vanishing-derivative path in char 3.
        let f = a.mul(&a).mul(&a).mul(&b);
        let rad = radical(&f);
        assert_eq!(rad, a.mul(&b));
        // (t-1)^2 (t+1)
        let g = a.mul(&a).mul(&b);
        assert_eq!(radical(&g), a.mul(&b));
    }

    #[test]
    fn radical_of_pure_power() {
        let f2 = make_field(2, 1).unwrap();
        let a = poly(&f2, &[1, 1, 1]); // irreducible quadratic
        let f = a.mul(&a).mul(&a).mul(&a); // 4th power, char 2
        assert_eq!(radical(&f), a);
    }

    #[test]
    fn distinct_degree_split_separates_factors() {
        let f5 = make_field(5, 1).unwrap();
        let lin = poly(&f5, &[4, 1]); // t - 1
        let quad = poly(&f5, &[2, 1, 1]); // irreducible: 1 - 8 = -7 = 3 non-square mod 5
        assert!(is_irreducible(&quad));
        let f = lin.mul(&quad);
        let parts = distinct_degree_split(&f);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (1, lin));
        assert_eq!(parts[1], (2, quad));
    }

    #[test]
    fn distinct_degree_split_same_degree_product() {
        let f3 = make_field(3, 1).unwrap();
        let irr: Vec<Poly> = enumerate_monic_irreducibles(&f3, 2, 1 << 20)
            .unwrap()
            .collect();
        let f = irr[0].mul(&irr[1]);
        let parts = distinct_degree_split(&f);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, 2);
        assert_eq!(parts[0].1, f.make_monic());
    }

    #[test]
    fn powmod_matches_repeated_multiplication() {
        let f7 = make_field(7, 1).unwrap();
        let m = poly(&f7, &[1, 1, 1]);
        let t = Poly::t(&f7);
        let mut acc = Poly::one(&f7);
        for e in 0..30u64 {
            assert_eq!(t.powmod_u64(e, &m), acc, "exponent {e}");
            acc = acc.mul(&t).rem(&m);
        }
    }

    #[test]
    fn display_forms() {
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(format!("{}", poly(&f7, &[4, 5, 1])), "t^2 + 5t + 4");
        assert_eq!(format!("{}", Poly::zero(&f7)), "0");
        assert_eq!(format!("{}", Poly::one(&f7)), "1");
    }
}
