//! Verification suites: every closed form in the library runs against an
//! independent brute-force computation or a frozen golden value.
//!
//! A suite is an ordered list of checks assembled from a deterministic grid;
//! `--budget` selects one of three workload tiers (below 10 seconds: small,
//! below 120: standard, otherwise: extended) so the mapping from flags to
//! work is reproducible. Checks execute on the rayon pool but are collected
//! in assembly order, so reports are byte-identical at any `--jobs` value.

use clap::ValueEnum;
use ffdyn_core::classcount::{
    class_representative, enumerate_class_types, exact_periodic_count,
    exact_periodic_count_regular_semisimple, exact_periodic_count_unchecked,
    gl_centralizer_order, invertible_irreducible_count, limit_gl, limit_gl_normalization,
    limit_sp_u, limit_sp_u_normalization, limit_sp_u_verbatim, m2_closed, m3_closed, Partition,
};
use ffdyn_core::counting::{
    d_plain, d_self_conjugate, d_self_conjugate_verbatim, d_self_reciprocal,
    d_self_reciprocal_verbatim, delta_of, e_value, lte_val, oracle_count, oracle_counts_multi,
    v_adic, v_adic_big, OracleKind,
};
use ffdyn_core::ff::{make_field, prime_power_split, Field, FieldElem};
use ffdyn_core::groups::{
    brute_periodic_count_multi, brute_periodic_counts_m_gl, enumerate_group, group_order, Family,
    GroupKind,
};
use ffdyn_core::matdyn::{
    is_field_periodic, is_periodic_structural_unchecked, orbit_report, Matrix,
};
use ffdyn_core::{Error, ExactInt, ExactRational, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::report::rational_string;

/// Which checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemmas,
    Dynamics,
    Classes,
    Limits,
    All,
}

impl Suite {
    pub fn label(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Dynamics => "dynamics",
            Suite::Classes => "classes",
            Suite::Limits => "limits",
            Suite::All => "all",
        }
    }
}

/// Outcome of one check.
pub struct Check {
    pub name: &'static str,
    pub params: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

struct Spec {
    name: &'static str,
    params: String,
    expected: String,
    run: Box<dyn Fn() -> Result<String> + Send + Sync>,
}

fn spec(
    name: &'static str,
    params: String,
    expected: impl Into<String>,
    run: impl Fn() -> Result<String> + Send + Sync + 'static,
) -> Spec {
    Spec { name, params, expected: expected.into(), run: Box::new(run) }
}

/// Deterministic budget-to-workload mapping.
pub fn tier_for_budget(budget: u64) -> u8 {
    if budget < 10 {
        0
    } else if budget < 120 {
        1
    } else {
        2
    }
}

pub fn run_suite(suite: Suite, tier: u8) -> Vec<Check> {
    let mut specs = Vec::new();
    if matches!(suite, Suite::Lemmas | Suite::All) {
        lemmas(&mut specs, tier);
    }
    if matches!(suite, Suite::Dynamics | Suite::All) {
        dynamics(&mut specs, tier);
    }
    if matches!(suite, Suite::Classes | Suite::All) {
        classes(&mut specs, tier);
    }
    if matches!(suite, Suite::Limits | Suite::All) {
        limits(&mut specs, tier);
    }
    specs
        .into_par_iter()
        .map(|s| {
            let got = (s.run)().unwrap_or_else(|e| format!("error: {e}"));
            let pass = got == s.expected;
            Check { name: s.name, params: s.params, expected: s.expected, got, pass }
        })
        .collect()
}

fn field_of(q: u64) -> Result<Field> {
    let (p, d) = prime_power_split(q)?;
    make_field(p, d)
}

/// Primes from `set` coprime to `q`.
fn coprime_ls(q: u64, set: &[u64]) -> Vec<u64> {
    let Ok((p, _)) = prime_power_split(q) else { return Vec::new() };
    set.iter().copied().filter(|&l| l != p).collect()
}

/// Split the coprime primes into those satisfying the degree hypothesis
/// (order of `p` mod `l` divides `d`, i.e. `l | q - 1`) and the rest.
fn split_strict(q: u64, set: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let Ok((p, d)) = prime_power_split(q) else { return (Vec::new(), Vec::new()) };
    let mut strict = Vec::new();
    let mut bypass = Vec::new();
    for l in coprime_ls(q, set) {
        match delta_of(l, p) {
            Ok(delta) if d as u64 % delta == 0 => strict.push(l),
            Ok(_) => bypass.push(l),
            Err(_) => {}
        }
    }
    (strict, bypass)
}

fn int_list(vals: &[ExactInt]) -> String {
    vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn ratio(count: &ExactInt, size: &ExactInt) -> ExactRational {
    ExactRational::new(BigInt::from(count.clone()), BigInt::from(size.clone()))
}

fn rat(num: i64, den: i64) -> ExactRational {
    ExactRational::new(num.into(), den.into())
}

/// Visit every matrix of `M_n(q)` in odometer order.
fn all_matrices(
    field: &Field,
    n: usize,
    mut visit: impl FnMut(&Matrix) -> Result<()>,
) -> Result<()> {
    let q = field.q();
    let mut digits = vec![0u64; n * n];
    loop {
        let a = Matrix::from_entry_indices(field, n, &digits)?;
        visit(&a)?;
        let mut k = 0;
        while k < digits.len() {
            digits[k] += 1;
            if digits[k] < q {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            return Ok(());
        }
    }
}

// ---------------------------------------------------------------------------
// lemmas: polynomial-counting closed forms vs enumeration oracles
// ---------------------------------------------------------------------------

fn lemmas(specs: &mut Vec<Spec>, tier: u8) {
    specs.push(spec(
        "e-value-examples",
        "(q, L, ell) in {(7,3,1), (7,3,2), (3,2,1), (3,2,3), (59,2,1), (4,3,1)}".into(),
        "2, 16, 1, 13, 29, 1",
        || {
            let vals = [(7u64, 3u64, 1u32), (7, 3, 2), (3, 2, 1), (3, 2, 3), (59, 2, 1), (4, 3, 1)]
                .iter()
                .map(|&(q, l, ell)| e_value(q, l, ell))
                .collect::<Result<Vec<_>>>()?;
            Ok(int_list(&vals))
        },
    ));

    specs.push(spec(
        "lifting-the-exponent",
        "q in {7, 13, 19}, L = 3, k <= 12".into(),
        "agree",
        || {
            for (q, c) in [(7u64, 1u32), (13, 1), (19, 2)] {
                for k in 1..=12u64 {
                    let m = ExactInt::from(q).pow(k as u32) - ExactInt::one();
                    let direct = v_adic_big(3, &m)?;
                    let formula = lte_val(3, Some(q), k, c)?;
                    if direct != formula {
                        return Ok(format!("q={q} k={k}: direct {direct} vs formula {formula}"));
                    }
                }
            }
            Ok("agree".into())
        },
    ));

    let mut plain: Vec<(u64, u32)> = Vec::new();
    let small_q = [2u64, 3, 4, 5, 7, 8, 9];
    for &q in &small_q {
        for n in 1..=2 {
            plain.push((q, n));
        }
    }
    if tier >= 1 {
        for &q in &small_q {
            plain.push((q, 3));
        }
        for q in [11u64, 13, 16] {
            for n in 1..=3 {
                plain.push((q, n));
            }
        }
    }
    if tier >= 2 {
        for q in [17u64, 19, 23, 25, 27, 29, 31, 32] {
            for n in 1..=3 {
                plain.push((q, n));
            }
        }
        for &q in &small_q {
            plain.push((q, 4));
        }
    }
    for (q, n) in plain {
        let ls = coprime_ls(q, &[2, 3, 5, 7]);
        if ls.is_empty() {
            continue;
        }
        let params = format!("q={q} n={n} L in {ls:?}");
        specs.push(spec("plain-formula-vs-oracle", params, "agree", move || {
            let formula: Vec<ExactInt> =
                ls.iter().map(|&l| d_plain(q, l, n)).collect::<Result<_>>()?;
            let oracle = oracle_counts_multi(OracleKind::Plain, q, &ls, n)?;
            Ok(if formula == oracle {
                "agree".into()
            } else {
                format!("formula [{}] vs oracle [{}]", int_list(&formula), int_list(&oracle))
            })
        }));
    }

    let mut sr: Vec<(u64, u32)> = Vec::new();
    for q in [7u64, 13] {
        for n in 1..=2 {
            sr.push((q, n));
        }
    }
    if tier >= 1 {
        sr.push((7, 3));
        sr.push((13, 3));
        for q in [19u64, 25, 31] {
            for n in 1..=3 {
                sr.push((q, n));
            }
        }
    }
    if tier >= 2 {
        for q in [11u64, 29, 37, 41, 43, 49] {
            for n in 1..=3 {
                sr.push((q, n));
            }
        }
    }
    for (q, n) in sr {
        // Hypotheses: odd q, odd prime L dividing q - 1.
        let ls: Vec<u64> =
            [3u64, 5, 7].iter().copied().filter(|&l| q % 2 == 1 && (q - 1) % l == 0).collect();
        if ls.is_empty() {
            continue;
        }
        let params = format!("q={q} n={n} L in {ls:?}");
        specs.push(spec("self-reciprocal-formula-vs-oracle", params, "agree", move || {
            let formula: Vec<ExactInt> =
                ls.iter().map(|&l| d_self_reciprocal(q, l, n)).collect::<Result<_>>()?;
            let oracle = oracle_counts_multi(OracleKind::SelfReciprocal, q, &ls, n)?;
            Ok(if formula == oracle {
                "agree".into()
            } else {
                format!("formula [{}] vs oracle [{}]", int_list(&formula), int_list(&oracle))
            })
        }));
    }

    let mut sc: Vec<(u64, u32)> = Vec::new();
    for q in [4u64, 7, 13] {
        for n in 1..=3 {
            sc.push((q, n));
        }
    }
    if tier >= 1 {
        for q in [16u64, 19, 25] {
            for n in 1..=3 {
                sc.push((q, n));
            }
        }
    }
    if tier >= 2 {
        for q in [31u64, 37, 43, 49] {
            for n in 1..=3 {
                sc.push((q, n));
            }
        }
    }
    for (q, n) in sc {
        // Hypotheses: odd prime L dividing q - 1 (q may be even).
        let ls: Vec<u64> = [3u64, 5, 7].iter().copied().filter(|&l| (q - 1) % l == 0).collect();
        if ls.is_empty() {
            continue;
        }
        let params = format!("q={q} n={n} L in {ls:?}");
        specs.push(spec("self-conjugate-formula-vs-oracle", params, "agree", move || {
            let formula: Vec<ExactInt> =
                ls.iter().map(|&l| d_self_conjugate(q, l, n)).collect::<Result<_>>()?;
            let oracle = oracle_counts_multi(OracleKind::SelfConjugate, q, &ls, n)?;
            Ok(if formula == oracle {
                "agree".into()
            } else {
                format!("formula [{}] vs oracle [{}]", int_list(&formula), int_list(&oracle))
            })
        }));
    }

    specs.push(spec(
        "self-reciprocal-corrected-vs-printed",
        "(q, L, n) = (7, 3, 1)".into(),
        "corrected 3 = oracle 3, printed 4",
        || {
            let corrected = d_self_reciprocal(7, 3, 1)?;
            let oracle = oracle_count(OracleKind::SelfReciprocal, 7, 3, 1)?;
            let printed = d_self_reciprocal_verbatim(7, 3, 1)?;
            Ok(format!(
                "corrected {corrected} = oracle {oracle}, printed {}",
                rational_string(&printed)
            ))
        },
    ));

    specs.push(spec(
        "self-conjugate-even-degree-vanishes",
        "(q, L, n) = (4, 3, 2)".into(),
        "corrected 0 = oracle 0, printed 6",
        || {
            let corrected = d_self_conjugate(4, 3, 2)?;
            let oracle = oracle_count(OracleKind::SelfConjugate, 4, 3, 2)?;
            let printed = d_self_conjugate_verbatim(4, 3, 2)?;
            Ok(format!(
                "corrected {corrected} = oracle {oracle}, printed {}",
                rational_string(&printed)
            ))
        },
    ));

    specs.push(spec(
        "plain-degree-one-is-e-value",
        "q in {3, 4, 5, 7, 9, 13}".into(),
        "agree",
        || {
            for q in [3u64, 4, 5, 7, 9, 13] {
                for l in coprime_ls(q, &[2, 3, 5, 7]) {
                    if d_plain(q, l, 1)? != e_value(q, l, 1)? {
                        return Ok(format!("disagree at q={q} L={l}"));
                    }
                }
            }
            Ok("agree".into())
        },
    ));
}

// ---------------------------------------------------------------------------
// dynamics: structural periodicity vs orbit iteration
// ---------------------------------------------------------------------------

fn dynamics(specs: &mut Vec<Spec>, tier: u8) {
    specs.push(spec(
        "two-by-two-28-cycle",
        "[[0, 42], [1, 31]] over F_59, L = 2".into(),
        "preperiod 0, period 28",
        || {
            let field = make_field(59, 1)?;
            let a = Matrix::from_entry_indices(&field, 2, &[0, 42, 1, 31])?;
            let rep = orbit_report(&a, 2)?;
            Ok(format!("preperiod {}, period {}", rep.preperiod, rep.period))
        },
    ));

    let mut spaces: Vec<(usize, u64)> = vec![(2, 3)];
    if tier >= 1 {
        spaces.extend([(2, 5), (2, 7), (3, 3)]);
    }
    if tier >= 2 {
        spaces.extend([(2, 4), (2, 8), (2, 9), (3, 2)]);
    }
    for (n, q) in spaces {
        let ls = coprime_ls(q, &[2, 3, 5]);
        if ls.is_empty() {
            continue;
        }
        let params = format!("all of M_{n}(F_{q}), L in {ls:?}");
        specs.push(spec("structural-equals-orbit", params, "0 disagreements", move || {
            let field = field_of(q)?;
            let mut bad = 0u64;
            all_matrices(&field, n, |a| {
                for &l in &ls {
                    let structural = is_periodic_structural_unchecked(a, l)?;
                    let orbit = orbit_report(a, l)?.periodic();
                    if structural != orbit {
                        bad += 1;
                    }
                }
                Ok(())
            })?;
            Ok(format!("{bad} disagreements"))
        }));
    }

    let bound = match tier {
        0 => 49u64,
        1 => 121,
        _ => 343,
    };
    for l in [2u64, 3, 5] {
        let params = format!("all prime powers q <= {bound}, L = {l}");
        specs.push(spec("field-predicate-equals-orbit", params, "0 disagreements", move || {
            let mut bad = 0u64;
            for q in 2..=bound {
                let Ok(field) = field_of(q) else { continue };
                for i in 0..q {
                    let x = FieldElem::from_index(&field, i)?;
                    let predicted = is_field_periodic(&x, l)?;
                    // Walk x -> x^L; the state space has q elements, so if x
                    // has not recurred within 2q steps it never will.
                    let mut cur = x.pow_u64(l);
                    let mut recurs = cur == x;
                    for _ in 1..2 * q {
                        if recurs {
                            break;
                        }
                        cur = cur.pow_u64(l);
                        recurs = cur == x;
                    }
                    if predicted != recurs {
                        bad += 1;
                    }
                }
            }
            Ok(format!("{bad} disagreements"))
        }));
    }

    specs.push(spec(
        "non-periodic-witnesses",
        "nilpotent over F_3 at L = 2; diag(3, 1) over F_7 at L = 3".into(),
        "structural false and preperiod positive for both",
        || {
            let f3 = make_field(3, 1)?;
            let nil = Matrix::from_entry_indices(&f3, 2, &[0, 1, 0, 0])?;
            let s1 = is_periodic_structural_unchecked(&nil, 2)?;
            let r1 = orbit_report(&nil, 2)?;
            let f7 = make_field(7, 1)?;
            let d = Matrix::from_entry_indices(&f7, 2, &[3, 0, 0, 1])?;
            let s2 = is_periodic_structural_unchecked(&d, 3)?;
            let r2 = orbit_report(&d, 3)?;
            Ok(if !s1 && !s2 && r1.preperiod > 0 && r2.preperiod > 0 {
                "structural false and preperiod positive for both".into()
            } else {
                format!(
                    "nilpotent: structural {s1}, preperiod {}; diag: structural {s2}, preperiod {}",
                    r1.preperiod, r2.preperiod
                )
            })
        },
    ));

    specs.push(spec(
        "scalar-matrices-match-field-rule",
        "1x1 matrices over F_13, L = 3".into(),
        "agree",
        || {
            let field = make_field(13, 1)?;
            for i in 0..13 {
                let a = Matrix::from_entry_indices(&field, 1, &[i])?;
                let x = FieldElem::from_index(&field, i)?;
                if is_periodic_structural_unchecked(&a, 3)? != is_field_periodic(&x, 3)? {
                    return Ok(format!("disagree at {i}"));
                }
            }
            Ok("agree".into())
        },
    ));
}

// ---------------------------------------------------------------------------
// classes: class-type sums vs brute force, centralizers vs commutants
// ---------------------------------------------------------------------------

fn classes(specs: &mut Vec<Spec>, tier: u8) {
    let mut grid: Vec<(u64, usize)> = vec![(3, 2), (5, 2)];
    if tier >= 1 {
        grid.extend([(7, 2), (9, 2), (4, 2), (3, 3)]);
    }
    if tier >= 2 {
        grid.extend([(11, 2), (2, 2), (2, 3), (13, 2), (5, 3)]);
    }
    for (q, n) in grid {
        let (strict, bypass) = split_strict(q, &[2, 3, 5, 7]);
        if !strict.is_empty() {
            let ls = strict.clone();
            let params = format!("q={q} n={n} L in {ls:?}");
            specs.push(spec("class-count-vs-brute", params, "agree", move || {
                let field = field_of(q)?;
                let (brute_m, brute_gl) = brute_periodic_counts_m_gl(&field, n, &ls)?;
                for (k, &l) in ls.iter().enumerate() {
                    let m = exact_periodic_count(Family::M, n, q, l)?;
                    let g = exact_periodic_count(Family::Gl, n, q, l)?;
                    if m != brute_m[k] || g != brute_gl[k] {
                        return Ok(format!(
                            "L={l}: class sum (m {m}, gl {g}) vs brute (m {}, gl {})",
                            brute_m[k], brute_gl[k]
                        ));
                    }
                }
                Ok("agree".into())
            }));
        }
        if !bypass.is_empty() {
            let ls = bypass.clone();
            let params = format!("q={q} n={n} L in {ls:?} (degree hypothesis bypassed)");
            specs.push(spec("class-count-vs-brute-bypass", params, "agree", move || {
                let field = field_of(q)?;
                let (brute_m, brute_gl) = brute_periodic_counts_m_gl(&field, n, &ls)?;
                for (k, &l) in ls.iter().enumerate() {
                    let m = exact_periodic_count_unchecked(Family::M, n, q, l)?;
                    let g = exact_periodic_count_unchecked(Family::Gl, n, q, l)?;
                    if m != brute_m[k] || g != brute_gl[k] {
                        return Ok(format!(
                            "L={l}: class sum (m {m}, gl {g}) vs brute (m {}, gl {})",
                            brute_m[k], brute_gl[k]
                        ));
                    }
                }
                Ok("agree".into())
            }));
        }
    }

    for n in [2usize, 3] {
        let qs = [3u64, 5, 7, 9, 13, 25, 59, 67];
        let params = format!("n={n}, q in {qs:?}, all L passing the degree hypothesis");
        specs.push(spec("closed-form-vs-class-sum", params, "agree", move || {
            for &q in &qs {
                let (strict, _) = split_strict(q, &[2, 3, 5, 7]);
                for l in strict {
                    let closed = if n == 2 { m2_closed(q, l)? } else { m3_closed(q, l)? };
                    let exact = exact_periodic_count(Family::M, n, q, l)?;
                    if closed != exact {
                        return Ok(format!("q={q} L={l}: closed {closed} vs class sum {exact}"));
                    }
                }
            }
            Ok("agree".into())
        }));
    }

    specs.push(spec(
        "m3-count-golden",
        "(family, n, q, L) = (m, 3, 2, 7)".into(),
        "class sum 317 = brute 317",
        || {
            let exact = exact_periodic_count_unchecked(Family::M, 3, 2, 7)?;
            let field = field_of(2)?;
            let (brute_m, _) = brute_periodic_counts_m_gl(&field, 3, &[7])?;
            Ok(format!("class sum {exact} = brute {}", brute_m[0]))
        },
    ));

    let mut tiling: Vec<(u64, usize)> = vec![(2, 2), (3, 2), (2, 3)];
    if tier >= 1 {
        tiling.extend([(3, 3), (4, 2)]);
    }
    if tier >= 2 {
        tiling.extend([(4, 3), (5, 2), (5, 3)]);
    }
    for (q, n) in tiling {
        let params = format!("q={q} n={n}");
        specs.push(spec("class-sizes-tile-group", params, "agree", move || {
            let total = tiling_total(q, n)?;
            let order = group_order(&GroupKind::for_family(Family::Gl, q, n)?);
            Ok(if total == order {
                "agree".into()
            } else {
                format!("class-type sum {total} vs group order {order}")
            })
        }));
    }

    let mut commutant: Vec<(usize, u64)> = vec![(2, 3), (3, 2)];
    if tier >= 1 {
        commutant.push((3, 3));
    }
    for (n, q) in commutant {
        let params = format!("every class shape of GL_{n}(F_{q})");
        specs.push(spec("centralizer-vs-commutant", params, "0 mismatches", move || {
            let field = field_of(q)?;
            let gl = enumerate_group(&GroupKind::gl(&field, n)?)?;
            let mut bad = 0u64;
            for ct in enumerate_class_types(n, false) {
                let rep = match class_representative(&field, &ct) {
                    Ok(rep) => rep,
                    // Not enough distinct irreducibles over this field: the
                    // shape is unrealizable and carries weight zero.
                    Err(Error::Invalid(_)) => continue,
                    Err(e) => return Err(e),
                };
                let commutant =
                    gl.iter().filter(|g| g.mul(&rep) == rep.mul(g)).count() as u64;
                if gl_centralizer_order(&ct, q)? != ExactInt::from(commutant) {
                    bad += 1;
                }
            }
            Ok(format!("{bad} mismatches"))
        }));
    }

    struct Golden {
        family: Family,
        q: u64,
        dim: usize,
        counts: Vec<(u64, u64)>,
    }
    let mut goldens = vec![
        Golden { family: Family::M, q: 3, dim: 2, counts: vec![(2, 22)] },
        Golden { family: Family::Gl, q: 3, dim: 2, counts: vec![(2, 9), (7, 48)] },
        Golden { family: Family::Sp, q: 5, dim: 2, counts: vec![(3, 80)] },
        Golden { family: Family::U, q: 3, dim: 2, counts: vec![(2, 9), (5, 96), (7, 96)] },
    ];
    if tier >= 1 {
        goldens.push(Golden {
            family: Family::Sp,
            q: 3,
            dim: 4,
            counts: vec![(2, 11745), (5, 41472)],
        });
        goldens.push(Golden { family: Family::U, q: 3, dim: 3, counts: vec![(2, 2457)] });
        goldens.push(Golden { family: Family::Sp, q: 13, dim: 2, counts: vec![(3, 1456)] });
    }
    if tier >= 2 {
        goldens.push(Golden { family: Family::Sp, q: 31, dim: 2, counts: vec![(3, 19840)] });
    }
    for g in goldens {
        let expected = g
            .counts
            .iter()
            .map(|(l, c)| format!("L={l}: {c}"))
            .collect::<Vec<_>>()
            .join(", ");
        let params = format!("family {} dim {} over base q = {}", g.family.label(), g.dim, g.q);
        specs.push(spec("brute-count-goldens", params, expected, move || {
            let kind = GroupKind::for_family(g.family, g.q, g.dim)?;
            let ls: Vec<u64> = g.counts.iter().map(|&(l, _)| l).collect();
            let got = brute_periodic_count_multi(&kind, &ls)?;
            Ok(ls
                .iter()
                .zip(&got)
                .map(|(l, c)| format!("L={l}: {c}"))
                .collect::<Vec<_>>()
                .join(", "))
        }));
    }
}

/// Independent re-derivation of the tiling identity: assigning ALL
/// invertible irreducibles to the zero-free class shapes and summing
/// class sizes must reproduce the group order exactly.
fn tiling_total(q: u64, n: usize) -> Result<ExactInt> {
    let counts: Vec<ExactInt> = (1..=n)
        .map(|d| invertible_irreducible_count(q, d as u64))
        .collect::<Result<_>>()?;
    let order = group_order(&GroupKind::for_family(Family::Gl, q, n)?);
    let mut total = ExactInt::zero();
    for ct in enumerate_class_types(n, false) {
        let ways = assignment_count(ct.blocks(), &counts)?;
        let z = gl_centralizer_order(&ct, q)?;
        if !(&order % &z).is_zero() {
            return Err(Error::Internal(format!(
                "centralizer order {z} does not divide the group order"
            )));
        }
        total += ways * (&order / &z);
    }
    Ok(total)
}

/// Number of ways to fill a class shape with distinct irreducibles per
/// degree: a falling factorial per degree, divided by the multiplicities of
/// identical (degree, partition) blocks.
fn assignment_count(blocks: &[(u64, Partition)], counts: &[ExactInt]) -> Result<ExactInt> {
    let mut num = ExactInt::one();
    let mut den = ExactInt::one();
    let mut i = 0;
    while i < blocks.len() {
        let d = blocks[i].0;
        // Count the run of identical (d, partition) blocks.
        let mut j = i;
        while j < blocks.len() && blocks[j] == blocks[i] {
            j += 1;
        }
        for k in 1..=(j - i) as u64 {
            den *= ExactInt::from(k);
        }
        // Falling factorial over the whole degree-d stretch, continued from
        // however many degree-d blocks were consumed before this run.
        let before = blocks[..i].iter().filter(|(e, _)| *e == d).count() as u64;
        let supply = &counts[d as usize - 1];
        for k in 0..(j - i) as u64 {
            let used = ExactInt::from(before + k);
            if *supply <= used {
                return Ok(ExactInt::zero());
            }
            num *= supply - used;
        }
        i = j;
    }
    if !(&num % &den).is_zero() {
        return Err(Error::Internal("assignment multinomial was not an integer".into()));
    }
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// limits: exact limiting proportions and convergence trends
// ---------------------------------------------------------------------------

fn limits(specs: &mut Vec<Spec>, tier: u8) {
    specs.push(spec(
        "gl-limit-values",
        "(ell, L, c) in {(1,3,1), (2,3,1), (3,3,1), (4,3,1), (1,5,2)}".into(),
        "1/3, 2/9, 8/81, 29/243, 1/25",
        || {
            let vals = [(1u64, 3u64, 1u32), (2, 3, 1), (3, 3, 1), (4, 3, 1), (1, 5, 2)]
                .iter()
                .map(|&(ell, l, c)| limit_gl(ell, l, c))
                .collect::<Result<Vec<_>>>()?;
            Ok(vals.iter().map(rational_string).collect::<Vec<_>>().join(", "))
        },
    ));

    specs.push(spec(
        "m3-limit-three-term-display",
        "(ell, L, c) = (3, 3, 1)".into(),
        "agree (8/81)",
        || {
            let l = 3u64;
            let c = 1u32;
            let ev = limit_gl(3, l, c)?;
            // Partitions [1,1,1], [3], [2,1] of 3, with L-exponents 3c,
            // c + v_L(3) and 2c + v_L(2).
            let term = |coeff: i64, exp: u32| -> ExactRational {
                rat(1, coeff) * ExactRational::new(1.into(), BigInt::from(l).pow(exp))
            };
            let display =
                term(6, 3 * c) + term(3, c + v_adic(l, 3)?) + term(2, 2 * c + v_adic(l, 2)?);
            Ok(if ev == display {
                format!("agree ({})", rational_string(&ev))
            } else {
                format!(
                    "evaluator {} vs three-term display {}",
                    rational_string(&ev),
                    rational_string(&display)
                )
            })
        },
    ));

    specs.push(spec(
        "sp-u-limit-values",
        "(ell, L, c) in {(1,3,1), (2,3,1)}; printed variant at (1,3,1)".into(),
        "2/3, 5/9; printed variant 4/3",
        || {
            let a = limit_sp_u(1, 3, 1)?;
            let b = limit_sp_u(2, 3, 1)?;
            let printed = limit_sp_u_verbatim(1, 3, 1)?;
            Ok(format!(
                "{}, {}; printed variant {}",
                rational_string(&a),
                rational_string(&b),
                rational_string(&printed)
            ))
        },
    ));

    let gl_norm_bound: u64 = if tier == 0 { 5 } else { 8 };
    specs.push(spec(
        "gl-normalization",
        format!("ell <= {gl_norm_bound}"),
        "all exactly 1",
        move || {
            for ell in 1..=gl_norm_bound {
                let s = limit_gl_normalization(ell);
                if s != rat(1, 1) {
                    return Ok(format!("ell={ell}: {}", rational_string(&s)));
                }
            }
            Ok("all exactly 1".into())
        },
    ));

    let spu_norm_bound: u64 = if tier == 0 { 4 } else { 6 };
    specs.push(spec(
        "sp-u-normalization",
        format!("ell <= {spu_norm_bound}"),
        "all exactly 1",
        move || {
            for ell in 1..=spu_norm_bound {
                let s = limit_sp_u_normalization(ell);
                if s != rat(1, 1) {
                    return Ok(format!("ell={ell}: {}", rational_string(&s)));
                }
            }
            Ok("all exactly 1".into())
        },
    ));

    let gl_qs: Vec<u64> = if tier == 0 { vec![13] } else { vec![13, 31, 67] };
    {
        let qs = gl_qs.clone();
        let params = format!("ell=2, L=3, q in {qs:?} (each with v_3(q-1) = 1)");
        specs.push(spec("gl2-ratio-at-limit", params, "2/9 at every q", move || {
            for &q in &qs {
                let count = exact_periodic_count(Family::Gl, 2, q, 3)?;
                let size = group_order(&GroupKind::for_family(Family::Gl, q, 2)?);
                let r = ratio(&count, &size);
                if r != rat(2, 9) {
                    return Ok(format!("q={q}: {}", rational_string(&r)));
                }
            }
            Ok("2/9 at every q".into())
        }));
    }

    specs.push(spec(
        "m2-ratio-monotone",
        "ell=2, L=3, q in [13, 31, 67], limit 2/9".into(),
        "gaps strictly decreasing, final below 1/10",
        || {
            let lim = limit_gl(2, 3, 1)?;
            let mut gaps = Vec::new();
            for q in [13u64, 31, 67] {
                let count = exact_periodic_count(Family::M, 2, q, 3)?;
                let size = ExactInt::from(q).pow(4);
                gaps.push((ratio(&count, &size) - &lim).abs());
            }
            let decreasing = gaps.windows(2).all(|w| w[0] > w[1]);
            let small = gaps.last().expect("nonempty") < &rat(1, 10);
            Ok(if decreasing && small {
                "gaps strictly decreasing, final below 1/10".into()
            } else {
                format!(
                    "gaps {}",
                    gaps.iter().map(rational_string).collect::<Vec<_>>().join(", ")
                )
            })
        },
    ));

    let sp_qs: Vec<u64> = match tier {
        0 => vec![13],
        1 => vec![13, 31],
        _ => vec![13, 31, 67],
    };
    {
        let qs = sp_qs.clone();
        let params = format!("Sp_2(q) brute force, L=3, q in {qs:?}, limit 2/3");
        specs.push(spec("sp2-ratio-toward-limit", params, "gaps non-increasing, final below 1/8", move || {
            let lim = limit_sp_u(1, 3, 1)?;
            let mut gaps = Vec::new();
            for &q in &qs {
                let kind = GroupKind::for_family(Family::Sp, q, 2)?;
                let count = brute_periodic_count_multi(&kind, &[3])?.pop().expect("one count");
                gaps.push((ratio(&count, &group_order(&kind)) - &lim).abs());
            }
            let non_increasing = gaps.windows(2).all(|w| w[0] >= w[1]);
            let small = gaps.last().expect("nonempty") < &rat(1, 8);
            Ok(if non_increasing && small {
                "gaps non-increasing, final below 1/8".into()
            } else {
                format!(
                    "gaps {}",
                    gaps.iter().map(rational_string).collect::<Vec<_>>().join(", ")
                )
            })
        }));
    }

    let rs_qs: Vec<u64> = if tier == 0 { vec![13] } else { vec![13, 31, 67] };
    {
        let qs = rs_qs;
        let params = format!("ell=2, L=3, q in {qs:?}");
        specs.push(spec(
            "regular-semisimple-dominance",
            params,
            "all gaps below 10/q",
            move || {
                for &q in &qs {
                    let full = exact_periodic_count(Family::Gl, 2, q, 3)?;
                    let rs = exact_periodic_count_regular_semisimple(2, q, 3)?;
                    let size = group_order(&GroupKind::for_family(Family::Gl, q, 2)?);
                    let gap = (ratio(&full, &size) - ratio(&rs, &size)).abs();
                    if gap >= rat(10, q as i64) {
                        return Ok(format!("q={q}: gap {}", rational_string(&gap)));
                    }
                }
                Ok("all gaps below 10/q".into())
            },
        ));
    }

    // The primality filter on L is part of the contract: composite or even
    // L is refused by the limit evaluators.
    specs.push(spec(
        "limit-hypothesis-gates",
        "L = 2 and c = 0 are refused".into(),
        "both refused",
        || {
            let even = limit_gl(2, 2, 1).is_err();
            let c0 = limit_sp_u(1, 3, 0).is_err();
            Ok(if even && c0 {
                "both refused".into()
            } else {
                format!("even refused: {even}, c=0 refused: {c0}")
            })
        },
    ));
}
