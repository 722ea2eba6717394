//! Acceptance gate: one test per criterion, each ending in a single
//! `[PASS] ...` line (the numeric limit check additionally logs an
//! `[ADVISORY]` line that never gates).  The construction context used by
//! most criteria (depth 2, weight window 18, order 40) is built once and
//! shared.

use std::time::Instant;

use once_cell::sync::Lazy;

use qmzv_core::analysis::{
    find_relations, formal_limit, numeric_limit_check, verify_derivation_formula,
    verify_product_formula, verify_tau_invariance,
};
use qmzv_core::bimould::{
    check_product_symmetry, check_swap_invariance, check_tau_invariance, ProductSymmetry,
};
use qmzv_core::eisenstein::{EisensteinContext, EisensteinParams};
use qmzv_core::qseries::{bracket_sum, delta_q, parse_qseries, QSeries};
use qmzv_core::quasishuffle::{embed_py, engine, tau_py, ProductId};
use qmzv_core::rational::{qi, qr};
use qmzv_core::regmaps::{
    delta_dec, delta_dec0_lin, phi_sharp, phi_sharp_lin, reg, reg_lin, swap_ybi, tau_b_lin,
};
use qmzv_core::words::{
    b_words_up_to_weight, parse_word, ybi_words_up_to_weight, Letter, LinComb, TensorComb, Word,
};
use qmzv_core::{Q, Result};

static CTX: Lazy<EisensteinContext> = Lazy::new(|| {
    EisensteinContext::build(EisensteinParams::new(2, 18, 40)).expect("shared context builds")
});

fn ctx() -> &'static EisensteinContext {
    &CTX
}

#[test]
fn c01_depth_one_golden_expansion() {
    let t0 = Instant::now();
    let small = EisensteinContext::build(EisensteinParams::new(1, 2, 4)).unwrap();
    let z2 = small.zeta_q(&[2]).unwrap();
    let expected = parse_qseries("-1/24 + q + 3q^2 + 4q^3 + 7q^4", 4).unwrap();
    assert_eq!(z2, expected);
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "took {elapsed:.3}s, budget 1s");
    println!("[PASS] c01 depth-one golden expansion to q^4 ({elapsed:.3}s, budget 1s)");
}

#[test]
fn c02_tau_invariance_sweep() {
    let ctx = ctx();
    let t0 = Instant::now();
    let report = verify_tau_invariance(ctx, 6).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(report.passed, "failures: {:?}", report.failures);
    assert!(report.cases >= 30, "only {} cases", report.cases);
    assert!(elapsed < 120.0, "took {elapsed:.1}s, budget 120s");
    println!(
        "[PASS] c02 tau invariance to q^40, weight <= 6, depth <= 2 ({} words, {elapsed:.2}s, budget 120s)",
        report.cases
    );
}

#[test]
fn c03_product_formula_sweep() {
    let ctx = ctx();
    let t0 = Instant::now();
    let report = verify_product_formula(ctx, 8, 1).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(report.passed, "failures: {:?}", report.failures);
    assert!(report.cases >= 100, "only {} cases", report.cases);
    assert!(elapsed < 300.0, "took {elapsed:.1}s, budget 300s");
    println!(
        "[PASS] c03 product formula to q^40, depth-one factors, weight sum <= 8 ({} pairs, {elapsed:.2}s, budget 300s)",
        report.cases
    );
}

#[test]
fn c04_depth_two_values_match_the_nested_sum_oracle() {
    let ctx = ctx();
    let z23 = ctx.zeta_q(&[2, 3]).unwrap().truncated(30).unwrap();
    let oracle = bracket_sum(&[(0, 1), (0, 2)], 30)
        .scale(&qr(1, 2))
        .sub(&bracket_sum(&[(0, 2)], 30).scale(&qr(1, 48)));
    assert_eq!(z23, oracle);

    let z203 = ctx.zeta_q(&[2, 0, 3]).unwrap().truncated(30).unwrap();
    let oracle = bracket_sum(&[(1, 1), (0, 2)], 30)
        .sub(&bracket_sum(&[(0, 1), (1, 2)], 30))
        .scale(&qr(1, 2));
    assert_eq!(z203, oracle);

    assert_eq!(ctx.beta.value2(2, 3).unwrap(), qi(0));
    println!(
        "[PASS] c04 zq(2,3) and zq(2,0,3) match the nested-sum oracle to q^30; depth-two constant at (2,3) is zero"
    );
}

#[test]
fn c05_derivation_formula_sweep() {
    let ctx = ctx();
    let report = verify_derivation_formula(ctx, 6).unwrap();
    assert!(report.passed, "failures: {:?}", report.failures);
    assert!(report.cases >= 30, "only {} cases", report.cases);

    let lhs = ctx.zeta_q(&[2]).unwrap().qderiv();
    let rhs = ctx.zeta_q(&[3, 0]).unwrap().scale(&qi(2));
    assert_eq!(lhs, rhs);
    println!(
        "[PASS] c05 derivation formula to q^40, weight <= 6 ({} words); spot value q d/dq zq(2) = 2 zq(3,0)",
        report.cases
    );
}

#[test]
fn c06_mould_symmetry_reports() {
    let ctx = ctx();
    let cap = Some(4);
    let stuffle = check_product_symmetry(&ctx.eisenstein, ProductSymmetry::Stuffle, cap).unwrap();
    assert!(stuffle.passed, "failures: {:?}", stuffle.failures);
    assert!(stuffle.compared > 0);
    let swap = check_swap_invariance(&ctx.eisenstein, cap);
    assert!(swap.passed, "failures: {:?}", swap.failures);
    assert!(swap.compared > 0);
    let balanced = check_product_symmetry(&ctx.balanced, ProductSymmetry::Balanced, cap).unwrap();
    assert!(balanced.passed, "failures: {:?}", balanced.failures);
    assert!(balanced.compared > 0);
    let tau = check_tau_invariance(&ctx.balanced, cap);
    assert!(tau.passed, "failures: {:?}", tau.failures);
    assert!(tau.compared > 0);
    println!(
        "[PASS] c06 symmetry reports at depth 2, degree cap 4, q^40: stuffle ({}) and swap ({}) on the Eisenstein bimould; balanced ({}) and tau ({}) on the q-zeta bimould",
        stuffle.compared, swap.compared, balanced.compared, tau.compared
    );
}

/// Apply the alphabet change to both legs of a tensor.
fn phi_tensor(t: &TensorComb) -> Result<TensorComb> {
    let mut out = TensorComb::zero();
    for ((u, v), c) in t.iter() {
        let pu = phi_sharp(u)?;
        let pv = phi_sharp(v)?;
        for (wu, cu) in pu.iter() {
            for (wv, cv) in pv.iter() {
                out.add_term(
                    wu.clone(),
                    wv.clone(),
                    c.clone() * cu.clone() * cv.clone(),
                );
            }
        }
    }
    Ok(out)
}

#[test]
fn c07_word_level_algebra_exhaustive() {
    let eng = engine();
    let b_words = b_words_up_to_weight(5);

    // The projection onto zero-free words is a morphism for the balanced
    // product.
    let mut reg_cases = 0usize;
    for u in &b_words {
        for v in &b_words {
            if u.weight() + v.weight() > 5 {
                continue;
            }
            let product = eng.product(ProductId::Balanced, u, v).unwrap();
            let lhs = reg_lin(&product).unwrap();
            let rhs = eng
                .product_lin(ProductId::Balanced, &reg(u).unwrap(), &reg(v).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "projection-morphism mismatch at {u} times {v}");
            reg_cases += 1;
        }
    }

    // The alphabet change intertwines plain deconcatenation with its
    // zero-absorbing variant, and the two-index swap with the block-reversal.
    let ybi_words = ybi_words_up_to_weight(5);
    for w in &ybi_words {
        let image = phi_sharp(w).unwrap();
        assert_eq!(
            phi_tensor(&delta_dec(w)).unwrap(),
            delta_dec0_lin(&image).unwrap(),
            "coproduct mismatch at {w}"
        );
        assert_eq!(
            phi_sharp_lin(&swap_ybi(w).unwrap()).unwrap(),
            tau_b_lin(&image).unwrap(),
            "swap intertwining mismatch at {w}"
        );
    }

    // The p/y embedding turns the balanced product into the conjugated
    // one-sided shuffle.
    let mut embed_cases = 0usize;
    for u in &b_words {
        for v in &b_words {
            if u.weight() + v.weight() > 5 {
                continue;
            }
            let lhs = eng
                .product(ProductId::Balanced, u, v)
                .unwrap()
                .map_words(embed_py)
                .unwrap();
            let tu = tau_py(&embed_py(u).unwrap()).unwrap();
            let tv = tau_py(&embed_py(v).unwrap()).unwrap();
            let rhs = eng
                .shuffle_b_py(&tu, &tv)
                .unwrap()
                .map_words(tau_py)
                .unwrap();
            assert_eq!(lhs, rhs, "embedding law mismatch at {u} times {v}");
            embed_cases += 1;
        }
    }

    println!(
        "[PASS] c07 word-level algebra, exhaustive to weight 5: projection morphism ({reg_cases} pairs), coproduct and swap intertwining ({} words), embedding law ({embed_cases} pairs)",
        ybi_words.len()
    );
}

#[test]
fn c08_formal_limit_family_and_numeric_advisory() {
    // Frozen small cases.
    let splits = formal_limit(&parse_word("b2 b3").unwrap()).unwrap();
    assert_eq!(splits, vec![(Word::empty(), parse_word("y2 y3").unwrap())]);
    let splits = formal_limit(&parse_word("b1 b0 b3").unwrap()).unwrap();
    assert_eq!(
        splits,
        vec![(parse_word("x0 x1").unwrap(), parse_word("y3").unwrap())]
    );
    assert!(formal_limit(&parse_word("b2 b0 b2").unwrap())
        .unwrap()
        .is_empty());

    // Exhaustive family: a two-letter prefix ending in b0 (or empty),
    // followed by indices k1 >= 2, k_i >= 1.  Such words split uniquely.
    let mut family_cases = 0usize;
    let mut prefixes: Vec<Vec<u32>> = vec![vec![]];
    for n in 1..=3usize {
        // Free bits for the first n-1 letters, last letter fixed to 0.
        for bits in 0..(1u32 << (n - 1)) {
            let mut eps: Vec<u32> = (0..n - 1).map(|i| (bits >> i) & 1).collect();
            eps.push(0);
            prefixes.push(eps);
        }
    }
    let mut tails: Vec<Vec<u32>> = Vec::new();
    for k1 in 2..=4u32 {
        tails.push(vec![k1]);
        for k2 in 1..=4u32 {
            tails.push(vec![k1, k2]);
        }
    }
    for eps in &prefixes {
        for ks in &tails {
            let letters: Vec<Letter> = eps
                .iter()
                .chain(ks.iter())
                .map(|&i| Letter::B(i))
                .collect();
            let w = Word(letters);
            if !w.is_empty() && w.0[0] == Letter::B(0) {
                continue;
            }
            let expected_x = Word(eps.iter().rev().map(|&e| Letter::X(e as u8)).collect());
            let expected_y = Word(ks.iter().map(|&k| Letter::Y(k)).collect());
            let splits = formal_limit(&w).unwrap();
            assert_eq!(
                splits,
                vec![(expected_x.clone(), expected_y.clone())],
                "family word {w}"
            );
            family_cases += 1;
        }
    }
    assert!(family_cases >= 60, "only {family_cases} family words");

    // Numeric extrapolation of the scaled weight-two series: advisory only.
    let z2 = ctx().zeta_q(&[2]).unwrap();
    let advisory = numeric_limit_check(&z2, 2, std::f64::consts::PI.powi(2) / 6.0, 0.05);
    println!(
        "[ADVISORY] scaled q -> 1 limit of zq(2): extrapolated {:.6} vs pi^2/6 = {:.6} (relative error {:.2e}): {}",
        advisory.extrapolated,
        advisory.target,
        advisory.relative_error,
        if advisory.within_tolerance {
            "within 5%"
        } else {
            "outside 5% (logged, not gated)"
        }
    );
    println!(
        "[PASS] c08 formal limit family, exhaustive prefixes up to length 3 and tails up to depth 2 ({family_cases} words)"
    );
}

/// Exact regression pin of the discriminant residual: the weight-twelve
/// combination below is the depth-two part of a known expression for
/// `delta(q)/43200`; the difference is the depth-three remainder, which the
/// depth-two construction cannot produce.  Its expansion was generated by
/// this code base and is frozen here so any change to the construction that
/// moves these coefficients fails loudly.  The positive-degree coefficients
/// are independent of the solver's tie-break (free parameters only shift
/// q^0 terms); the constant term is pinned under the default tie-break.
const DISCRIMINANT_RESIDUAL: &str = "1/11623772160 - 1/76032*q + 59/177408*q^2 - 83/44352*q^3 + 28529/532224*q^4 + 29693/88704*q^5 + 44951/14784*q^6 + 1087739/66528*q^7 + 12239995/177408*q^8 + 45679567/177408*q^9 + 24176519/29568*q^10 + 102912143/44352*q^11 + 38452243/6336*q^12 + 556055141/38016*q^13 + 732795617/22176*q^14 + 521456897/7392*q^15 + 76407471473/532224*q^16 + 8268943049/29568*q^17 + 4430828603/8448*q^18 + 126417936115/133056*q^19 + 21181674947/12672*q^20 + 15841456471/5544*q^21 + 70504620509/14784*q^22 + 172355224331/22176*q^23 + 183598500055/14784*q^24 + 10351202511983/532224*q^25 + 379585929023/12672*q^26 + 1005645834185/22176*q^27 + 643285190981/9504*q^28 + 1261143539695/12672*q^29 + 356236880851/2464*q^30 + 3447254271443/16632*q^31 + 17388671081513/59136*q^32 + 1523823398267/3696*q^33 + 5645831173547/9856*q^34 + 8732750531399/11088*q^35 + 190573772976151/177408*q^36 + 386218340991911/266112*q^37 + 86356350684745/44352*q^38 + 8204410387849/3168*q^39 + 101214339204295/29568*q^40";

#[test]
fn c09_discriminant_combination_depth_two_residual() {
    let ctx = ctx();
    let terms: [(Q, [u32; 2]); 6] = [
        (qi(-63), [9, 3]),
        (qi(183), [8, 4]),
        (qr(-675, 2), [7, 5]),
        (qr(89, 2), [6, 6]),
        (qi(-378), [5, 7]),
        (qi(183), [4, 8]),
    ];
    let mut depth2 = QSeries::zero(40);
    for (c, idx) in &terms {
        depth2 = depth2.add(&ctx.zeta_q(idx).unwrap().scale(c));
    }
    let residual = delta_q(40).scale(&qr(1, 43200)).sub(&depth2);
    let frozen = parse_qseries(DISCRIMINANT_RESIDUAL, 40).unwrap();
    assert_eq!(residual, frozen, "first difference at q^{:?}", residual.first_difference(&frozen));
    println!(
        "[PASS] c09 discriminant combination: depth-two part computed to q^40; depth-three residual matches the stored regression expansion (constant term {})",
        residual.coeff(0)
    );
}

#[test]
fn c10_relation_finder_weight_two() {
    let ctx = ctx();
    let t0 = Instant::now();
    let report = find_relations(ctx, 2, 2).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    assert_eq!(report.relations.len(), 1, "kernel should be one-dimensional");
    let rel = &report.relations[0];
    let mut expected = LinComb::zero();
    expected.add_term(parse_word("b2").unwrap(), qi(1));
    expected.add_term(parse_word("b1 b0").unwrap(), qi(-1));
    assert_eq!(rel, &expected);
    assert!(elapsed < 30.0, "took {elapsed:.1}s, budget 30s");
    println!(
        "[PASS] c10 relation finder at weight 2: kernel is exactly the span of zq(2) - zq(1,0) ({elapsed:.2}s, budget 30s)"
    );
}
