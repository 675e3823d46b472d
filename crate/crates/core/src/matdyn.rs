//! Matrices over a finite field and the dynamics of `A -> A^L`.
//!
//! The centerpiece is [`is_periodic_structural`]: a matrix is periodic under
//! the power map iff the factor `t` appears in its minimal polynomial with
//! multiplicity at most one and every other irreducible factor `g`, of degree
//! `m`, satisfies `t^(e_m) = 1 (mod g)`, where `e_m` is the `L`-free part of
//! `q^m - 1`. Both conditions are decided with quotient-ring arithmetic over
//! the base field; no Jordan form and no extension field is ever built. An
//! orbit iterator ([`orbit_report`]) provides the independent slow answer.

use std::collections::HashMap;

use num_bigint::BigUint;

use crate::counting::{delta_of, e_value};
use crate::ff::{is_prime_u64, Field, FieldElem, MAX_DEGREE};
use crate::poly::{distinct_degree_split, radical, roots_satisfy_power_unchecked, Poly};
use crate::{guard, hypothesis, invalid, ExactInt, Result};

/// Default cap on the number of states an orbit walk may visit.
pub const DEFAULT_ORBIT_BUDGET: usize = 1 << 20;

/// A square matrix over a fixed field, entries stored flat row-major as
/// residue blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    n: usize,
    entries: Vec<u64>,
}

impl Matrix {
    pub fn zero(field: &Field, n: usize) -> Self {
        assert!(n >= 1, "matrices here have dimension at least 1");
        Matrix {
            field: field.clone(),
            n,
            entries: vec![0; n * n * field.degree()],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.set_one(i, i);
        }
        m
    }

    pub fn from_elems(field: &Field, n: usize, elems: &[FieldElem]) -> Result<Self> {
        if elems.len() != n * n {
            return Err(invalid(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                elems.len()
            )));
        }
        let d = field.degree();
        let mut m = Matrix::zero(field, n);
        for (k, e) in elems.iter().enumerate() {
            if e.field() != field {
                return Err(invalid("matrix entry from a different field"));
            }
            m.entries[k * d..(k + 1) * d].copy_from_slice(e.coeffs());
        }
        Ok(m)
    }

    /// Build from element indices (see [`FieldElem::from_index`]), row-major.
    /// Over a prime field an index is just the residue.
    pub fn from_entry_indices(field: &Field, n: usize, indices: &[u64]) -> Result<Self> {
        if indices.len() != n * n {
            return Err(invalid(format!(
                "expected {} indices for a {n}x{n} matrix, got {}",
                n * n,
                indices.len()
            )));
        }
        let d = field.degree();
        let mut m = Matrix::zero(field, n);
        for (k, &idx) in indices.iter().enumerate() {
            if idx >= field.q() {
                return Err(invalid(format!("element index {idx} out of range")));
            }
            field.el_from_index(idx, &mut m.entries[k * d..(k + 1) * d]);
        }
        Ok(m)
    }

    /// Row-major element indices; inverse of [`Matrix::from_entry_indices`].
    pub fn entry_indices(&self) -> Vec<u64> {
        let d = self.field.degree();
        (0..self.n * self.n)
            .map(|k| self.field.el_to_index(&self.entries[k * d..(k + 1) * d]))
            .collect()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        FieldElem::from_residues(&self.field, self.block(i, j)).unwrap()
    }

    pub fn set(&mut self, i: usize, j: usize, value: &FieldElem) {
        assert!(value.field() == &self.field, "entry from a different field");
        let d = self.field.degree();
        let at = (i * self.n + j) * d;
        self.entries[at..at + d].copy_from_slice(value.coeffs());
    }

    fn set_one(&mut self, i: usize, j: usize) {
        let d = self.field.degree();
        let at = (i * self.n + j) * d;
        self.entries[at..at + d].fill(0);
        self.entries[at] = 1;
    }

    pub(crate) fn block(&self, i: usize, j: usize) -> &[u64] {
        let d = self.field.degree();
        let at = (i * self.n + j) * d;
        &self.entries[at..at + d]
    }

    pub(crate) fn entries_raw(&self) -> &[u64] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&c| c == 0)
    }

    pub fn is_identity(&self) -> bool {
        self == &Matrix::identity(&self.field, self.n)
    }

    /// `Some(a)` iff the matrix is `a` times the identity.
    pub fn as_scalar(&self) -> Option<FieldElem> {
        let a = self.get(0, 0);
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    if self.get(i, i) != a {
                        return None;
                    }
                } else if !self.field.el_is_zero(self.block(i, j)) {
                    return None;
                }
            }
        }
        Some(a)
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert!(self.field == rhs.field && self.n == rhs.n, "dimension or field mismatch");
        let n = self.n;
        let d = self.field.degree();
        let mut out = Matrix::zero(&self.field, n);
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in 0..n {
            for k in 0..n {
                let a = self.block(i, k);
                if self.field.el_is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.block(k, j);
                    if self.field.el_is_zero(b) {
                        continue;
                    }
                    self.field.el_mul(a, b, tmp);
                    let at = (i * n + j) * d;
                    self.field.el_add_assign(&mut out.entries[at..at + d], tmp);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert!(self.field == rhs.field && self.n == rhs.n, "dimension or field mismatch");
        let d = self.field.degree();
        let mut out = self.clone();
        for k in 0..self.n * self.n {
            self.field
                .el_add_assign(&mut out.entries[k * d..(k + 1) * d], &rhs.entries[k * d..(k + 1) * d]);
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(&self.field, n);
        let d = self.field.degree();
        for i in 0..n {
            for j in 0..n {
                let at = (j * n + i) * d;
                out.entries[at..at + d].copy_from_slice(self.block(i, j));
            }
        }
        out
    }

    /// Conjugate transpose over a field with a declared base subfield.
    pub fn conj_transpose(&self) -> Result<Matrix> {
        let n = self.n;
        let mut out = Matrix::zero(&self.field, n);
        let d = self.field.degree();
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in 0..n {
            for j in 0..n {
                self.field.el_conj(self.block(i, j), tmp)?;
                let at = (j * n + i) * d;
                out.entries[at..at + d].copy_from_slice(tmp);
            }
        }
        Ok(out)
    }

    /// Apply the matrix to a flat vector of residue blocks.
    pub(crate) fn matvec(&self, v: &[u64], out: &mut [u64]) {
        let n = self.n;
        let d = self.field.degree();
        out.fill(0);
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in 0..n {
            for j in 0..n {
                let a = self.block(i, j);
                if self.field.el_is_zero(a) {
                    continue;
                }
                let b = &v[j * d..(j + 1) * d];
                if self.field.el_is_zero(b) {
                    continue;
                }
                self.field.el_mul(a, b, tmp);
                self.field.el_add_assign(&mut out[i * d..(i + 1) * d], tmp);
            }
        }
    }

    /// Determinant by Gaussian elimination.
    pub fn det(&self) -> FieldElem {
        let n = self.n;
        let d = self.field.degree();
        let field = &self.field;
        let mut work = self.entries.clone();
        let at = |i: usize, j: usize| (i * n + j) * d;
        let mut det = FieldElem::one(field);
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for col in 0..n {
            // Find a pivot row at or below `col`.
            let pivot = (col..n).find(|&r| !field.el_is_zero(&work[at(r, col)..at(r, col) + d]));
            let Some(pivot) = pivot else {
                return FieldElem::zero(field);
            };
            if pivot != col {
                for j in 0..n {
                    let (a, b) = (at(col, j), at(pivot, j));
                    for k in 0..d {
                        work.swap(a + k, b + k);
                    }
                }
                det = -&det;
            }
            let pv = FieldElem::from_residues(field, &work[at(col, col)..at(col, col) + d]).unwrap();
            det = &det * &pv;
            let pv_inv = pv.inverse().unwrap();
            for row in col + 1..n {
                let factor =
                    FieldElem::from_residues(field, &work[at(row, col)..at(row, col) + d]).unwrap();
                if factor.is_zero() {
                    continue;
                }
                let scale = &factor * &pv_inv;
                for j in col..n {
                    field.el_mul(scale.coeffs(), &work[at(col, j)..at(col, j) + d].to_vec(), tmp);
                    field.el_sub_assign(&mut work[at(row, j)..at(row, j) + d], tmp);
                }
            }
        }
        det
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let n = self.n;
        let d = self.field.degree();
        let field = &self.field;
        let mut work = self.entries.clone();
        let at = |i: usize, j: usize| (i * n + j) * d;
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        let mut rank = 0;
        for col in 0..n {
            let pivot = (rank..n).find(|&r| !field.el_is_zero(&work[at(r, col)..at(r, col) + d]));
            let Some(pivot) = pivot else { continue };
            if pivot != rank {
                for j in 0..n {
                    let (a, b) = (at(rank, j), at(pivot, j));
                    for k in 0..d {
                        work.swap(a + k, b + k);
                    }
                }
            }
            let pv = FieldElem::from_residues(field, &work[at(rank, col)..at(rank, col) + d]).unwrap();
            let pv_inv = pv.inverse().unwrap();
            for row in rank + 1..n {
                let factor =
                    FieldElem::from_residues(field, &work[at(row, col)..at(row, col) + d]).unwrap();
                if factor.is_zero() {
                    continue;
                }
                let scale = &factor * &pv_inv;
                for j in col..n {
                    field.el_mul(scale.coeffs(), &work[at(rank, j)..at(rank, j) + d].to_vec(), tmp);
                    field.el_sub_assign(&mut work[at(row, j)..at(row, j) + d], tmp);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse by Gauss-Jordan elimination; errors on singular input.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let field = self.field.clone();
        let mut work = self.clone();
        let mut inv = Matrix::identity(&field, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !field.el_is_zero(work.block(r, col)));
            let Some(pivot) = pivot else {
                return Err(invalid("matrix is singular"));
            };
            if pivot != col {
                for j in 0..n {
                    let a = work.get(col, j);
                    let b = work.get(pivot, j);
                    work.set(col, j, &b);
                    work.set(pivot, j, &a);
                    let a = inv.get(col, j);
                    let b = inv.get(pivot, j);
                    inv.set(col, j, &b);
                    inv.set(pivot, j, &a);
                }
            }
            let pv_inv = work.get(col, col).inverse().unwrap();
            for j in 0..n {
                let a = &work.get(col, j) * &pv_inv;
                work.set(col, j, &a);
                let b = &inv.get(col, j) * &pv_inv;
                inv.set(col, j, &b);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = work.get(row, col);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let a = &work.get(row, j) - &(&factor * &work.get(col, j));
                    work.set(row, j, &a);
                    let b = &inv.get(row, j) - &(&factor * &inv.get(col, j));
                    inv.set(row, j, &b);
                }
            }
        }
        Ok(inv)
    }

    pub fn trace(&self) -> FieldElem {
        let mut acc = FieldElem::zero(&self.field);
        for i in 0..self.n {
            acc = &acc + &self.get(i, i);
        }
        acc
    }
}

/// `A^k` by square-and-multiply; `k` must be at least 1.
pub fn mat_power(a: &Matrix, k: &ExactInt) -> Result<Matrix> {
    if k < &BigUint::from(1u32) {
        return Err(invalid("matrix power needs exponent k >= 1"));
    }
    let mut acc: Option<Matrix> = None;
    let mut sq = a.clone();
    let bits = k.bits();
    for i in 0..bits {
        if k.bit(i) {
            acc = Some(match acc {
                None => sq.clone(),
                Some(m) => m.mul(&sq),
            });
        }
        if i + 1 < bits {
            sq = sq.mul(&sq);
        }
    }
    Ok(acc.unwrap())
}

pub fn mat_power_u64(a: &Matrix, k: u64) -> Result<Matrix> {
    mat_power(a, &BigUint::from(k))
}

/// Minimal preperiod and period of a state under `A -> A^L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitReport {
    /// Steps before the orbit enters its cycle (0 means the start recurs).
    pub preperiod: u64,
    /// Length of the cycle.
    pub period: u64,
}

impl OrbitReport {
    /// Whether the starting state itself recurs.
    pub fn periodic(&self) -> bool {
        self.preperiod == 0
    }
}

/// Walk `A, A^L, A^(L^2), ...` with memoization until a state repeats.
/// Works for any `L >= 2`; errors if more than `budget` states are visited.
pub fn orbit_report_budgeted(a: &Matrix, l: u64, budget: usize) -> Result<OrbitReport> {
    if l < 2 {
        return Err(invalid("orbit iteration needs L >= 2"));
    }
    let mut seen: HashMap<Matrix, u64> = HashMap::new();
    let mut cur = a.clone();
    let mut step = 0u64;
    loop {
        if let Some(&first) = seen.get(&cur) {
            return Ok(OrbitReport {
                preperiod: first,
                period: step - first,
            });
        }
        if seen.len() >= budget {
            return Err(guard(format!("orbit walk exceeded {budget} states")));
        }
        seen.insert(cur.clone(), step);
        cur = mat_power_u64(&cur, l)?;
        step += 1;
    }
}

pub fn orbit_report(a: &Matrix, l: u64) -> Result<OrbitReport> {
    orbit_report_budgeted(a, l, DEFAULT_ORBIT_BUDGET)
}

/// Row-echelon store over a field, kept fully inter-reduced so membership
/// reduction is a single pass.
struct Echelon {
    field: Field,
    width: usize, // number of coordinate blocks
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(field: &Field, width: usize) -> Self {
        Echelon {
            field: field.clone(),
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn first_nonzero(&self, v: &[u64]) -> Option<usize> {
        let d = self.field.degree();
        (0..self.width).find(|&i| !self.field.el_is_zero(&v[i * d..(i + 1) * d]))
    }

    /// Subtract multiples of the stored rows to kill their pivot positions.
    fn reduce(&self, v: &mut [u64]) {
        let d = self.field.degree();
        let mut c = [0u64; MAX_DEGREE];
        let c = &mut c[..d];
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            c.copy_from_slice(&v[piv * d..(piv + 1) * d]);
            if self.field.el_is_zero(c) {
                continue;
            }
            for i in 0..self.width {
                let rb = &row[i * d..(i + 1) * d];
                if self.field.el_is_zero(rb) {
                    continue;
                }
                self.field.el_mul(c, rb, tmp);
                self.field.el_sub_assign(&mut v[i * d..(i + 1) * d], tmp);
            }
        }
    }

    /// Insert an already-reduced nonzero vector; returns false if it reduced
    /// to zero instead.
    fn insert_reduced(&mut self, mut v: Vec<u64>) -> bool {
        let d = self.field.degree();
        let Some(piv) = self.first_nonzero(&v) else {
            return false;
        };
        // Normalize the pivot to 1.
        let mut inv = [0u64; MAX_DEGREE];
        let inv = &mut inv[..d];
        self.field.el_inv(&v[piv * d..(piv + 1) * d], inv);
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in 0..self.width {
            self.field.el_mul(&v[i * d..(i + 1) * d].to_vec(), inv, tmp);
            v[i * d..(i + 1) * d].copy_from_slice(tmp);
        }
        // Kill the new pivot column in the existing rows (Gauss-Jordan).
        let mut c = [0u64; MAX_DEGREE];
        let c = &mut c[..d];
        for row in &mut self.rows {
            c.copy_from_slice(&row[piv * d..(piv + 1) * d]);
            if self.field.el_is_zero(c) {
                continue;
            }
            for i in 0..self.width {
                let vb = &v[i * d..(i + 1) * d];
                if self.field.el_is_zero(vb) {
                    continue;
                }
                self.field.el_mul(c, vb, tmp);
                self.field.el_sub_assign(&mut row[i * d..(i + 1) * d], tmp);
            }
        }
        self.rows.push(v);
        self.pivots.push(piv);
        true
    }
}

/// Monic annihilator of `v` modulo the subspace in `base`: the least-degree
/// monic `f` with `f(A) v` inside that subspace. When `base` is nonempty it
/// must be A-invariant. With `grow`, the Krylov vectors visited are added to
/// `base` afterwards. Returns the constant 1 when `v` already lies in `base`.
fn spin_annihilator(a: &Matrix, v: &[u64], base: &mut Echelon, grow: bool) -> Poly {
    let field = a.field().clone();
    let n = a.dim();
    let d = field.degree();
    // Krylov echelon with coefficient tracking: kr_rows[i] is a reduced,
    // normalized vector and kr_combos[i] expresses it in terms of the raw
    // Krylov sequence u_0 = v, u_(j+1) = A u_j (mod base).
    let mut kr_rows: Vec<Vec<u64>> = Vec::new();
    let mut kr_pivots: Vec<usize> = Vec::new();
    let mut kr_combos: Vec<Vec<FieldElem>> = Vec::new();
    let mut u = v.to_vec();
    base.reduce(&mut u);
    let mut k = 0usize;
    loop {
        // Reduce a copy of u_k against the Krylov echelon, tracking the
        // combination coefficients.
        let mut r = u.clone();
        let mut combo = vec![FieldElem::zero(&field); k + 1];
        combo[k] = FieldElem::one(&field);
        let mut cbuf = [0u64; MAX_DEGREE];
        let cbuf = &mut cbuf[..d];
        let mut tmp = [0u64; MAX_DEGREE];
        let tmp = &mut tmp[..d];
        for i in 0..kr_rows.len() {
            let piv = kr_pivots[i];
            cbuf.copy_from_slice(&r[piv * d..(piv + 1) * d]);
            if field.el_is_zero(cbuf) {
                continue;
            }
            let c = FieldElem::from_residues(&field, cbuf).unwrap();
            for w in 0..n {
                let rb = &kr_rows[i][w * d..(w + 1) * d];
                if field.el_is_zero(rb) {
                    continue;
                }
                field.el_mul(c.coeffs(), rb, tmp);
                field.el_sub_assign(&mut r[w * d..(w + 1) * d], tmp);
            }
            for (slot, coef) in combo.iter_mut().zip(&kr_combos[i]) {
                *slot = &*slot - &(&c * coef);
            }
        }
        let pivot = (0..n).find(|&i| !field.el_is_zero(&r[i * d..(i + 1) * d]));
        let Some(pivot) = pivot else {
            // u_k is dependent: combo gives the monic annihilator directly.
            if grow {
                for row in kr_rows {
                    base.insert_reduced(row);
                }
            }
            return Poly::from_elems(&field, &combo);
        };
        // Normalize and store, keeping the echelon inter-reduced.
        let s = FieldElem::from_residues(&field, &r[pivot * d..(pivot + 1) * d])
            .unwrap()
            .inverse()
            .unwrap();
        for w in 0..n {
            field.el_mul(&r[w * d..(w + 1) * d].to_vec(), s.coeffs(), tmp);
            r[w * d..(w + 1) * d].copy_from_slice(tmp);
        }
        let combo: Vec<FieldElem> = combo.iter().map(|c| c * &s).collect();
        for i in 0..kr_rows.len() {
            cbuf.copy_from_slice(&kr_rows[i][pivot * d..(pivot + 1) * d]);
            if field.el_is_zero(cbuf) {
                continue;
            }
            let c = FieldElem::from_residues(&field, cbuf).unwrap();
            for w in 0..n {
                let rb = &r[w * d..(w + 1) * d];
                if field.el_is_zero(rb) {
                    continue;
                }
                field.el_mul(c.coeffs(), rb, tmp);
                field.el_sub_assign(&mut kr_rows[i][w * d..(w + 1) * d], tmp);
            }
            let mut padded = kr_combos[i].clone();
            padded.resize(combo.len(), FieldElem::zero(&field));
            for (slot, coef) in padded.iter_mut().zip(&combo) {
                *slot = &*slot - &(&c * coef);
            }
            kr_combos[i] = padded;
        }
        kr_rows.push(r);
        kr_pivots.push(pivot);
        kr_combos.push(combo);
        // Advance the raw sequence: u_(k+1) = A u_k, reduced mod base.
        let mut next = vec![0u64; n * d];
        a.matvec(&u, &mut next);
        base.reduce(&mut next);
        u = next;
        k += 1;
        assert!(k <= n, "Krylov chain exceeded the dimension");
    }
}

/// Monic minimal polynomial: least common multiple of the annihilators of
/// the standard basis vectors.
pub fn min_poly(a: &Matrix) -> Poly {
    let field = a.field().clone();
    let n = a.dim();
    let d = field.degree();
    let mut acc = Poly::one(&field);
    for i in 0..n {
        if acc.degree() == Some(n) {
            break;
        }
        let mut v = vec![0u64; n * d];
        v[i * d] = 1;
        let mut empty = Echelon::new(&field, n);
        let local = spin_annihilator(a, &v, &mut empty, false);
        let g = acc.gcd(&local);
        acc = acc.mul(&local.divrem(&g).0);
    }
    acc.make_monic()
}

/// Monic characteristic polynomial, degree `n`: the product of the
/// quotient annihilators along a growing invariant flag.
pub fn char_poly(a: &Matrix) -> Poly {
    let field = a.field().clone();
    let n = a.dim();
    let d = field.degree();
    let mut flag = Echelon::new(&field, n);
    let mut acc = Poly::one(&field);
    for i in 0..n {
        if flag.dim() == n {
            break;
        }
        let mut v = vec![0u64; n * d];
        v[i * d] = 1;
        acc = acc.mul(&spin_annihilator(a, &v, &mut flag, true));
    }
    debug_assert_eq!(acc.degree(), Some(n));
    acc
}

/// Periodicity verdict from a minimal polynomial: the factor `t` must have
/// multiplicity at most one, and every other irreducible factor `g` of
/// degree `m` must satisfy `t^(e_m) = 1 (mod g)`. Distinct factors of equal
/// degree are tested together through their product (the congruence holds
/// modulo the product iff it holds modulo each factor).
pub fn periodic_from_min_poly(min: &Poly, l: u64) -> Result<bool> {
    let field = min.field().clone();
    if min.is_zero() || !min.is_monic() {
        return Err(invalid("minimal polynomial must be monic"));
    }
    validate_l(&field, l)?;
    let k = min.t_multiplicity();
    if k >= 2 {
        return Ok(false);
    }
    let g = min.shift_down(k);
    if g.degree() == Some(0) {
        return Ok(true);
    }
    let squarefree = radical(&g);
    for (m, prod) in distinct_degree_split(&squarefree) {
        let e = e_value(field.q(), l, m as u32)?;
        if !roots_satisfy_power_unchecked(&prod, &e) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn validate_l(field: &Field, l: u64) -> Result<()> {
    if !is_prime_u64(l) {
        return Err(invalid(format!("l = {l} is not prime")));
    }
    if l == field.p() {
        return Err(hypothesis(format!(
            "gcd(l, q) must be 1, but l = {l} is the field characteristic"
        )));
    }
    Ok(())
}

/// Structural periodicity test for `A -> A^L`, with the degree hypothesis
/// checked: the multiplicative order of the characteristic `p` modulo `l`
/// must divide the field degree `d` (where `q = p^d`), which is the same as
/// asking `l | q - 1`. Use [`is_periodic_structural_unchecked`] to
/// experiment outside that hypothesis.
pub fn is_periodic_structural(a: &Matrix, l: u64) -> Result<bool> {
    let field = a.field();
    validate_l(field, l)?;
    let delta = delta_of(l, field.p())?;
    if field.degree() as u64 % delta != 0 {
        return Err(hypothesis(format!(
            "order of p = {} mod l = {l} is {delta}, which does not divide the \
             field degree {}",
            field.p(),
            field.degree()
        )));
    }
    periodic_from_min_poly(&min_poly(a), l)
}

/// Structural periodicity test without the degree hypothesis; only
/// `gcd(l, q) = 1` is required. Exhaustive comparisons against
/// [`orbit_report`] have found no disagreement on any tested space.
pub fn is_periodic_structural_unchecked(a: &Matrix, l: u64) -> Result<bool> {
    validate_l(a.field(), l)?;
    periodic_from_min_poly(&min_poly(a), l)
}

/// The `l`-free part of `q - 1`. Unlike the matrix-level tests, the
/// field-level description needs no coprimality between `l` and `q`: when `l` is
/// the characteristic, `x -> x^l` is a power of Frobenius, `v_l(q - 1) = 0`,
/// and the same expression still describes the (full) periodic set.
fn field_e1(field: &Field, l: u64) -> Result<u64> {
    if !is_prime_u64(l) {
        return Err(invalid(format!("l = {l} is not prime")));
    }
    let mut e1 = field.q() - 1;
    while e1 % l == 0 {
        e1 /= l;
    }
    Ok(e1)
}

/// Number of periodic points of `x -> x^L` on the field itself:
/// `1 + e_1` (zero, plus the roots of unity of `l`-free order).
pub fn field_periodic_count(field: &Field, l: u64) -> Result<ExactInt> {
    Ok(ExactInt::from(field_e1(field, l)? + 1))
}

/// Whether a single field element is periodic under `x -> x^L`: zero is,
/// and a nonzero `x` is iff `x^(e_1) = 1`.
pub fn is_field_periodic(x: &FieldElem, l: u64) -> Result<bool> {
    let e1 = field_e1(x.field(), l)?;
    if x.is_zero() {
        return Ok(true);
    }
    Ok(x.pow_u64(e1).is_one())
}

/// Companion matrix of a monic polynomial of degree >= 1: ones on the
/// subdiagonal, negated coefficients in the last column.
pub fn companion(f: &Poly) -> Result<Matrix> {
    let n = f
        .degree()
        .ok_or_else(|| invalid("companion matrix of the zero polynomial"))?;
    if n == 0 || !f.is_monic() {
        return Err(invalid("companion matrix needs a monic polynomial of degree >= 1"));
    }
    let field = f.field();
    let mut m = Matrix::zero(field, n);
    for i in 1..n {
        m.set_one(i, i - 1);
    }
    for i in 0..n {
        let c = -&f.coeff(i);
        m.set(i, n - 1, &c);
    }
    Ok(m)
}

/// Jordan block `J_(a,m)`: eigenvalue on the diagonal, ones on the
/// superdiagonal.
pub fn jordan_block(a: &FieldElem, m: usize) -> Matrix {
    assert!(m >= 1);
    let field = a.field();
    let mut j = Matrix::zero(field, m);
    for i in 0..m {
        j.set(i, i, a);
        if i + 1 < m {
            j.set_one(i, i + 1);
        }
    }
    j
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[Matrix]) -> Result<Matrix> {
    if blocks.is_empty() {
        return Err(invalid("block_diag needs at least one block"));
    }
    let field = blocks[0].field().clone();
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let mut m = Matrix::zero(&field, n);
    let mut off = 0;
    for b in blocks {
        if b.field() != &field {
            return Err(invalid("blocks over different fields"));
        }
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                m.set(off + i, off + j, &b.get(i, j));
            }
        }
        off += b.dim();
    }
    Ok(m)
}
