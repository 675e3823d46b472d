//! Conjugacy-class combinatorics and exact class-based periodic-point
//! counts.
//!
//! A class of `M_n(q)` under `GL_n(q)`-conjugacy is described by the
//! multiplicity of the eigenvalue zero together with a multiset of
//! (irreducible polynomial, partition) pairs; a class is periodic under
//! `A -> A^L` exactly when the zero part is semisimple and every other
//! irreducible factor has roots of `L`-free multiplicative order. Summing
//! class sizes over the periodic class shapes reproduces the brute-force
//! counts of [`crate::groups`] exactly, and the same partition sums drive
//! the exact-rational limiting proportions of the three families.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::counting::{d_plain, delta_of, v_adic, validate_q_l};
use crate::ff::{prime_power_split, Field, FieldElem};
use crate::groups::Family;
use crate::matdyn::{block_diag, companion, Matrix};
use crate::poly::{enumerate_monic_irreducibles, Poly};
use crate::{guard, hypothesis, internal, invalid, ExactInt, ExactRational, Result};

/// Largest matrix dimension the class-type sum will expand.
pub const MAX_EXACT_N: usize = 6;

/// An integer partition, parts descending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    pub fn new(mut parts: Vec<u64>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(invalid("partition parts must be positive"));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Distinct parts with multiplicities, ascending by part.
    pub fn multiplicities(&self) -> Vec<(u64, u64)> {
        let mut map: BTreeMap<u64, u64> = BTreeMap::new();
        for &p in &self.parts {
            *map.entry(p).or_insert(0) += 1;
        }
        map.into_iter().collect()
    }
}

/// All partitions of `ell`, descending parts, in a deterministic order.
pub fn partitions(ell: u64) -> Vec<Partition> {
    fn rec(remaining: u64, cap: u64, acc: &mut Vec<u64>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: acc.clone() });
            return;
        }
        let mut part = remaining.min(cap);
        while part >= 1 {
            acc.push(part);
            rec(remaining - part, part, acc, out);
            acc.pop();
            part -= 1;
        }
    }
    let mut out = Vec::new();
    rec(ell, ell.max(1), &mut Vec::new(), &mut out);
    out
}

/// An ordered pair of partitions with sizes summing to `ell`: the shapes
/// indexing the symplectic/unitary limit sums (one side for self-paired
/// factors, the other for factor pairs `(g, g*)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPartitionPair {
    pub plus: Partition,
    pub minus: Partition,
}

/// All ordered pairs `(plus, minus)` with `|plus| + |minus| = ell`.
pub fn split_partitions(ell: u64) -> Vec<SplitPartitionPair> {
    let mut out = Vec::new();
    for a in 0..=ell {
        for plus in partitions(a) {
            for minus in partitions(ell - a) {
                out.push(SplitPartitionPair { plus: plus.clone(), minus });
            }
        }
    }
    out
}

/// The shape of an `M_n(q)` conjugacy class that can carry periodic
/// elements: eigenvalue zero with a forced all-ones partition `1^m0`, plus
/// a multiset of (degree, partition) block shapes to be filled by distinct
/// irreducible polynomials of the stated degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassType {
    zero_mult: usize,
    blocks: Vec<(u64, Partition)>,
    n: usize,
}

impl ClassType {
    pub fn new(n: usize, zero_mult: usize, mut blocks: Vec<(u64, Partition)>) -> Result<Self> {
        let mut total = zero_mult as u64;
        for (d, lambda) in &blocks {
            if *d == 0 || lambda.is_empty() {
                return Err(invalid("blocks need positive degree and nonempty partition"));
            }
            total += d * lambda.size();
        }
        if total != n as u64 {
            return Err(invalid(format!(
                "class type sums to {total}, expected n = {n}"
            )));
        }
        blocks.sort();
        Ok(ClassType { zero_mult, blocks, n })
    }

    pub fn zero_mult(&self) -> usize {
        self.zero_mult
    }

    pub fn blocks(&self) -> &[(u64, Partition)] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Regular semisimple shapes: no zero eigenvalue, every partition `(1)`.
    pub fn is_regular_semisimple(&self) -> bool {
        self.zero_mult == 0 && self.blocks.iter().all(|(_, l)| l.parts() == [1])
    }
}

/// Every class shape for dimension `n`; `allow_zero` admits a semisimple
/// zero eigenvalue (the `M` case), otherwise `zero_mult = 0` (the `GL`
/// case).
pub fn enumerate_class_types(n: usize, allow_zero: bool) -> Vec<ClassType> {
    // Candidate (degree, partition) pairs in a fixed total order; multisets
    // are generated as weakly increasing sequences of candidate indices.
    fn rec(
        remaining: u64,
        candidates: &[(u64, Partition)],
        min_idx: usize,
        acc: &mut Vec<(u64, Partition)>,
        out: &mut Vec<Vec<(u64, Partition)>>,
    ) {
        if remaining == 0 {
            out.push(acc.clone());
            return;
        }
        for (i, (d, lambda)) in candidates.iter().enumerate().skip(min_idx) {
            let weight = d * lambda.size();
            if weight > remaining {
                continue;
            }
            acc.push((*d, lambda.clone()));
            rec(remaining - weight, candidates, i, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let max_zero = if allow_zero { n } else { 0 };
    for zero_mult in 0..=max_zero {
        let budget = (n - zero_mult) as u64;
        let mut candidates = Vec::new();
        for d in 1..=budget.max(1) {
            for m in 1..=(budget / d.max(1)).max(0) {
                for lambda in partitions(m) {
                    candidates.push((d, lambda));
                }
            }
        }
        candidates.sort();
        let mut block_sets = Vec::new();
        rec(budget, &candidates, 0, &mut Vec::new(), &mut block_sets);
        for blocks in block_sets {
            out.push(ClassType::new(n, zero_mult, blocks).expect("generated shapes are consistent"));
        }
    }
    out
}

/// `|GL_m(q)|` as exact arithmetic (no field object involved); `m = 0`
/// gives 1.
fn gl_order(q: u64, m: usize) -> ExactInt {
    let q = BigUint::from(q);
    let qm = q.pow(m as u32);
    let mut acc = BigUint::one();
    for i in 0..m {
        acc *= &qm - q.pow(i as u32);
    }
    acc
}

fn factorial(k: u64) -> ExactInt {
    (1..=k).map(BigUint::from).fold(BigUint::one(), |a, b| a * b)
}

/// Falling factorial `x (x-1) ... (x-k+1)`; zero when `x < k`.
fn falling(x: &ExactInt, k: u64) -> ExactInt {
    let mut acc = BigUint::one();
    for j in 0..k {
        let j = BigUint::from(j);
        if *x <= j {
            return BigUint::zero();
        }
        acc *= x - j;
    }
    acc
}

fn exact_div(num: ExactInt, den: &ExactInt, what: &str) -> Result<ExactInt> {
    if den.is_zero() {
        return Err(internal(format!("{what}: division by zero")));
    }
    let (quot, rem) = num_integer::Integer::div_rem(&num, den);
    if !rem.is_zero() {
        return Err(internal(format!("{what}: {num} is not divisible by {den}")));
    }
    Ok(quot)
}

/// Order of the centralizer in `GL_n(q)` of a matrix whose class has the
/// given shape (no zero eigenvalue): per block with distinct parts
/// `lambda_k` of multiplicities `l_k` (ascending), `q^(d gamma)` times
/// `prod_k |GL_(l_k)(q^d)|` with
/// `gamma = 2 sum_(a<b) lambda_a l_a l_b + sum_k (lambda_k - 1) l_k^2`.
pub fn gl_centralizer_order(ct: &ClassType, q: u64) -> Result<ExactInt> {
    if ct.zero_mult != 0 {
        return Err(invalid("centralizer shape must have zero_mult = 0"));
    }
    prime_power_split(q)?;
    Ok(centralizer_of_blocks(&ct.blocks, q))
}

fn centralizer_of_blocks(blocks: &[(u64, Partition)], q: u64) -> ExactInt {
    let mut acc = BigUint::one();
    for (d, lambda) in blocks {
        let mults = lambda.multiplicities();
        let mut gamma: u64 = 0;
        for (a, &(part_a, l_a)) in mults.iter().enumerate() {
            gamma += (part_a - 1) * l_a * l_a;
            for &(_, l_b) in &mults[a + 1..] {
                gamma += 2 * part_a * l_a * l_b;
            }
        }
        let qd = BigUint::from(q).pow(*d as u32);
        acc *= qd.pow(gamma as u32);
        let qd_u64 = u64::try_from(&qd);
        for &(_, l_k) in &mults {
            // |GL_(l_k)(q^d)|; compute in big arithmetic directly when q^d
            // overflows u64 (it cannot within the n <= 6 guard, but stay
            // total).
            let sub = match qd_u64 {
                Ok(v) => gl_order(v, l_k as usize),
                Err(_) => {
                    let mut o = BigUint::one();
                    let qm = qd.pow(l_k as u32);
                    for i in 0..l_k {
                        o *= &qm - qd.pow(i as u32);
                    }
                    o
                }
            };
            acc *= sub;
        }
    }
    acc
}

/// Monic irreducibles of degree `d` over `F_q` with nonzero constant term:
/// the necklace count, minus one in degree 1 for the polynomial `t`. These
/// are the building blocks available to the invertible part of a class type.
pub fn invertible_irreducible_count(q: u64, d: u64) -> Result<ExactInt> {
    prime_power_split(q)?;
    if d == 0 || d > 20 {
        return Err(invalid("invertible_irreducible_count needs 1 <= d <= 20"));
    }
    let mut sum = num_bigint::BigInt::zero();
    for i in crate::counting::divisors(d) {
        sum += num_bigint::BigInt::from(crate::counting::mobius(d / i))
            * num_bigint::BigInt::from(q).pow(i as u32);
    }
    let necklace = (sum / num_bigint::BigInt::from(d))
        .to_biguint()
        .ok_or_else(|| internal("necklace count came out negative"))?;
    let skip_t = if d == 1 { BigUint::one() } else { BigUint::zero() };
    Ok(necklace - skip_t)
}

/// A block-companion matrix realizing the class shape over the given field:
/// a zero block for `zero_mult`, then for every `(d, lambda)` block the
/// `lambda`-shaped self-extensions of a fresh degree-`d` irreducible with
/// nonzero constant term (taken in enumeration order, so the choice is
/// deterministic). Fails when the field has too few distinct irreducibles
/// of some degree; such shapes also carry weight zero in every count.
pub fn class_representative(field: &Field, ct: &ClassType) -> Result<Matrix> {
    let mut pieces = Vec::new();
    if ct.zero_mult > 0 {
        pieces.push(Matrix::zero(field, ct.zero_mult));
    }
    let mut used: BTreeMap<u64, usize> = BTreeMap::new();
    for (d, lambda) in &ct.blocks {
        let skip = *used.entry(*d).or_insert(0);
        let f = enumerate_monic_irreducibles(field, *d as u32, 1 << 20)?
            .filter(|f| !f.coeff(0).is_zero())
            .nth(skip)
            .ok_or_else(|| {
                invalid(format!(
                    "F_{} has fewer than {} monic irreducibles of degree {d} \
                     with nonzero constant term",
                    field.q(),
                    skip + 1
                ))
            })?;
        *used.get_mut(d).unwrap() += 1;
        for &part in lambda.parts() {
            pieces.push(self_extension(&f, part as usize)?);
        }
    }
    block_diag(&pieces)
}

/// `s`-fold self-extension of the companion matrix of `f`: companion blocks
/// on the diagonal, identity blocks on the superdiagonal (the degree-`d`
/// analogue of a Jordan block).
fn self_extension(f: &Poly, s: usize) -> Result<Matrix> {
    let c = companion(f)?;
    let d = c.dim();
    let field = c.field().clone();
    let mut m = Matrix::zero(&field, d * s);
    for b in 0..s {
        for i in 0..d {
            for j in 0..d {
                m.set(b * d + i, b * d + j, &c.get(i, j));
            }
        }
        if b + 1 < s {
            for i in 0..d {
                m.set(b * d + i, (b + 1) * d + i, &FieldElem::one(&field));
            }
        }
    }
    Ok(m)
}

/// The class-type sum with an arbitrary supply of degree-`d` irreducible
/// counts (`degree_counts[d - 1]`). Restricting to regular semisimple
/// shapes gives the dominant part of the count.
fn count_with_degree_counts(
    n: usize,
    q: u64,
    degree_counts: &[ExactInt],
    allow_zero: bool,
    rs_only: bool,
) -> Result<ExactInt> {
    debug_assert_eq!(degree_counts.len(), n);
    let full_order = gl_order(q, n);
    let mut total = BigUint::zero();
    for ct in enumerate_class_types(n, allow_zero) {
        if rs_only && !ct.is_regular_semisimple() {
            continue;
        }
        // Ways to fill the blocks with distinct irreducibles per degree:
        // falling(count_d, k_d) / prod over equal-(d, lambda) groups of k!.
        let mut ways = BigUint::one();
        let mut per_degree: BTreeMap<u64, u64> = BTreeMap::new();
        let mut per_block: BTreeMap<&(u64, Partition), u64> = BTreeMap::new();
        for block in &ct.blocks {
            *per_degree.entry(block.0).or_insert(0) += 1;
            *per_block.entry(block).or_insert(0) += 1;
        }
        for (&d, &k) in &per_degree {
            ways *= falling(&degree_counts[d as usize - 1], k);
        }
        if ways.is_zero() {
            continue;
        }
        for (_, &k) in &per_block {
            ways = exact_div(ways, &factorial(k), "assignment multinomial")?;
        }
        let denom = centralizer_of_blocks(&ct.blocks, q) * gl_order(q, ct.zero_mult);
        let size = exact_div(full_order.clone(), &denom, "class size")?;
        total += ways * size;
    }
    Ok(total)
}

fn validate_exact_params(family: Family, n: usize, q: u64, l: u64) -> Result<()> {
    if !matches!(family, Family::M | Family::Gl) {
        return Err(invalid(
            "class-based exact counts cover the matrix algebra and general linear family only",
        ));
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if n > MAX_EXACT_N {
        return Err(guard(format!(
            "class-type sum expands dimensions up to {MAX_EXACT_N}, got {n}"
        )));
    }
    validate_q_l(q, l)
}

fn exact_count_core(family: Family, n: usize, q: u64, l: u64, rs_only: bool) -> Result<ExactInt> {
    let degree_counts = (1..=n)
        .map(|d| d_plain(q, l, d as u32))
        .collect::<Result<Vec<_>>>()?;
    count_with_degree_counts(
        n,
        q,
        &degree_counts,
        matches!(family, Family::M) && !rs_only,
        rs_only,
    )
}

/// Number of periodic points of `A -> A^L` on `M_n(q)` or `GL_n(q)`,
/// assembled from class sizes: good irreducibles counted by
/// [`d_plain`], distinct-assignment multinomials, and centralizer orders.
/// Requires the order of `p` modulo `L` to divide the field degree
/// (equivalently `L | q - 1`); [`exact_periodic_count_unchecked`] drops
/// that hypothesis.
pub fn exact_periodic_count(family: Family, n: usize, q: u64, l: u64) -> Result<ExactInt> {
    validate_exact_params(family, n, q, l)?;
    let (p, d) = prime_power_split(q)?;
    let delta = delta_of(l, p)?;
    if d as u64 % delta != 0 {
        return Err(hypothesis(format!(
            "order of p = {p} mod l = {l} is {delta}, which does not divide the field degree {d}"
        )));
    }
    exact_count_core(family, n, q, l, false)
}

/// The class-based count under the bare `gcd(L, q) = 1` requirement.
pub fn exact_periodic_count_unchecked(
    family: Family,
    n: usize,
    q: u64,
    l: u64,
) -> Result<ExactInt> {
    validate_exact_params(family, n, q, l)?;
    exact_count_core(family, n, q, l, false)
}

/// The regular-semisimple part of the count (distinct irreducible factors,
/// all invertible); these classes dominate the ratio as `q` grows.
pub fn exact_periodic_count_regular_semisimple(n: usize, q: u64, l: u64) -> Result<ExactInt> {
    validate_exact_params(Family::Gl, n, q, l)?;
    exact_count_core(Family::Gl, n, q, l, true)
}

fn closed_form_gate(q: u64, l: u64) -> Result<()> {
    validate_q_l(q, l)?;
    let (p, d) = prime_power_split(q)?;
    let delta = delta_of(l, p)?;
    if d as u64 % delta != 0 {
        return Err(hypothesis(format!(
            "closed forms assume l | q - 1 (order of p = {p} mod l = {l} is {delta}, \
             field degree {d})"
        )));
    }
    Ok(())
}

/// Closed-form count of periodic points on `M_2(q)`:
/// `(D1 + 1) + D1 (D1 + 1)(q^2 + q)/2 + D1 (q^2 - 1) + D2 (q^2 - q)` with
/// `D_i` the good-irreducible counts of degree `i`.
pub fn m2_closed(q: u64, l: u64) -> Result<ExactInt> {
    closed_form_gate(q, l)?;
    let d1 = d_plain(q, l, 1)?;
    let d2 = d_plain(q, l, 2)?;
    let q = BigUint::from(q);
    let one = BigUint::one();
    let scalars = &d1 + &one;
    let split_pairs = exact_div(
        &d1 * (&d1 + &one) * (q.pow(2) + &q),
        &BigUint::from(2u32),
        "m2 split-pair term",
    )?;
    let jordan = &d1 * (q.pow(2) - &one);
    let quadratic = &d2 * (q.pow(2) - &q);
    Ok(scalars + split_pairs + jordan + quadratic)
}

/// Closed-form count of periodic points on `M_3(q)`: the eight-row class
/// contribution sum. The row for `diag(a, a, b)` shapes carries class size
/// `q^2 (q^2 + q + 1)`.
pub fn m3_closed(q: u64, l: u64) -> Result<ExactInt> {
    closed_form_gate(q, l)?;
    let d1 = d_plain(q, l, 1)?;
    let d2 = d_plain(q, l, 2)?;
    let d3 = d_plain(q, l, 3)?;
    let q = BigUint::from(q);
    let one = BigUint::one();
    // Row 1: scalars a I_3 with a in {0} u goods.
    let row1 = &d1 + &one;
    // Row 2: J_(a,3), a good; class size q(q^3 - 1)(q^2 - 1).
    let row2 = &d1 * (&q * (q.pow(3) - &one) * (q.pow(2) - &one));
    // Row 3: partition (2,1) at one good eigenvalue; size (q^3 - 1)(q + 1).
    let row3 = &d1 * ((q.pow(3) - &one) * (&q + &one));
    // Row 4: three distinct eigenvalues from {0} u goods, binom(D1 + 1, 3)
    // classes; size q^3 (q + 1)(q^2 + q + 1).
    let row4 = exact_div(
        falling(&(&d1 + &one), 3),
        &BigUint::from(6u32),
        "m3 distinct-triple term",
    )?;
    let row4 = row4 * (q.pow(3) * (&q + &one) * (q.pow(2) + &q + &one));
    // Row 5: diag(a, a, b), a != b from {0} u goods (a nonzero when the
    // double eigenvalue is zero is covered by zero_mult); size
    // q^2 (q^2 + q + 1).
    let row5 = &d1 * (&d1 + &one) * (q.pow(2) * (q.pow(2) + &q + &one));
    // Row 6: J_(a,2) + b, a good, b in {0} u goods minus a; size
    // q^2 (q^3 - 1)(q + 1).
    let row6 = &d1 * &d1 * (q.pow(2) * (q.pow(3) - &one) * (&q + &one));
    // Row 7: companion of a good cubic; size q^3 (q^2 - 1)(q - 1).
    let row7 = &d3 * (q.pow(3) * (q.pow(2) - &one) * (&q - &one));
    // Row 8: good quadratic + a in {0} u goods; size q^3 (q^3 - 1).
    let row8 = (&d1 + &one) * &d2 * (q.pow(3) * (q.pow(3) - &one));
    Ok(row1 + row2 + row3 + row4 + row5 + row6 + row7 + row8)
}

fn validate_limit_params(l: u64, c: u32) -> Result<()> {
    if !crate::ff::is_prime_u64(l) {
        return Err(invalid(format!("l = {l} is not prime")));
    }
    if l == 2 {
        return Err(hypothesis(
            "limiting proportions require an odd prime l (the declared valuation \
             does not determine the l = 2 limit)",
        ));
    }
    if c == 0 {
        return Err(hypothesis("the declared valuation c = v_l(q - 1) must be at least 1"));
    }
    Ok(())
}

fn rational_one_over(den: ExactInt) -> ExactRational {
    ExactRational::new(
        num_bigint::BigInt::one(),
        num_bigint::BigInt::from(den),
    )
}

/// Limiting proportion of periodic points in `GL_l(q)` (equally `M_l(q)`)
/// as `q` grows with `v_L(q - 1) = c` fixed:
/// `sum over partitions lambda of ell, prod over distinct parts
/// 1/(part^m m!) * 1/L^(m (c + v_L(part)))`.
pub fn limit_gl(ell: u64, l: u64, c: u32) -> Result<ExactRational> {
    validate_limit_params(l, c)?;
    let mut sum = ExactRational::zero();
    for lambda in partitions(ell) {
        let mut den = BigUint::one();
        for (part, m) in lambda.multiplicities() {
            let exp = (c as u64 + v_adic(l, part)? as u64) * m;
            den *= BigUint::from(part).pow(m as u32)
                * factorial(m)
                * pow_u64_big(l, exp)?;
        }
        sum += rational_one_over(den);
    }
    Ok(sum)
}

/// The same partition sum with every `L`-power factor forced to 1; the
/// exponential-formula identity makes this exactly 1 for every `ell`.
pub fn limit_gl_normalization(ell: u64) -> ExactRational {
    let mut sum = ExactRational::zero();
    for lambda in partitions(ell) {
        let mut den = BigUint::one();
        for (part, m) in lambda.multiplicities() {
            den *= BigUint::from(part).pow(m as u32) * factorial(m);
        }
        sum += rational_one_over(den);
    }
    sum
}

fn pow_u64_big(base: u64, exp: u64) -> Result<ExactInt> {
    let exp: u32 = exp
        .try_into()
        .map_err(|_| invalid("exponent does not fit in 32 bits"))?;
    Ok(BigUint::from(base).pow(exp))
}

/// Shared limiting proportion for the symplectic and unitary families, as a
/// sum over ordered partition pairs: self-paired factors contribute
/// `1/((2 part)^m m!)` (their valuation factor `v_L(q^part + 1)` vanishes
/// for odd `L | q - 1`), factor pairs contribute
/// `1/((2 part)^m m!) * 1/L^(m (c + v_L(part)))`.
pub fn limit_sp_u(ell: u64, l: u64, c: u32) -> Result<ExactRational> {
    validate_limit_params(l, c)?;
    sp_u_sum(ell, l, c, true)
}

/// The Sp/U partition sum exactly as printed, with `1/(part^m m!)` factors
/// on both sides. Exceeds 1 already at `ell = 1`, which is why the
/// `(2 part)` form above is the default; kept for side-by-side reporting.
pub fn limit_sp_u_verbatim(ell: u64, l: u64, c: u32) -> Result<ExactRational> {
    validate_limit_params(l, c)?;
    sp_u_sum(ell, l, c, false)
}

fn sp_u_sum(ell: u64, l: u64, c: u32, doubled: bool) -> Result<ExactRational> {
    let mut sum = ExactRational::zero();
    for pair in split_partitions(ell) {
        let mut den = BigUint::one();
        for (part, m) in pair.plus.multiplicities() {
            let base = if doubled { 2 * part } else { part };
            // v_L(q^part + 1) = 0 for odd L | q - 1: q^part + 1 = 2 mod L.
            den *= BigUint::from(base).pow(m as u32) * factorial(m);
        }
        for (part, m) in pair.minus.multiplicities() {
            let base = if doubled { 2 * part } else { part };
            let exp = (c as u64 + v_adic(l, part)? as u64) * m;
            den *= BigUint::from(base).pow(m as u32) * factorial(m) * pow_u64_big(l, exp)?;
        }
        sum += rational_one_over(den);
    }
    Ok(sum)
}

/// The Sp/U sum with `L`-power factors forced to 1: the generating-function
/// identity `exp(sum 2 x^k / (2k)) = 1/(1 - x)` makes this exactly 1.
pub fn limit_sp_u_normalization(ell: u64) -> ExactRational {
    let mut sum = ExactRational::zero();
    for pair in split_partitions(ell) {
        let mut den = BigUint::one();
        for side in [&pair.plus, &pair.minus] {
            for (part, m) in side.multiplicities() {
                den *= BigUint::from(2 * part).pow(m as u32) * factorial(m);
            }
        }
        sum += rational_one_over(den);
    }
    sum
}
