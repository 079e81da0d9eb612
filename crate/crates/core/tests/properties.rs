mod common;

use common::{arith, exact, nearby, random_value, ulps, Dyadic};
use dynprec::precision::{adaptive_sum, evaluate_at, CancellationReport};
use dynprec::profiler::{predict_add_cost, predict_mul_cost};
use dynprec::rootfind::{horner_eval, Polynomial};
use dynprec::{rational, Arith, GrossFloat, NoCount, OpCounter, Rounding, Sign};
use num_traits::Signed;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FORMATS: [(u32, usize); 3] = [(3, 2), (7, 3), (52, 4)];

fn pick(idx: usize, rounding: Rounding) -> Arith {
    let (t, big_t) = FORMATS[idx % FORMATS.len()];
    arith(t, big_t, rounding)
}

fn operands(rng: &mut ChaCha8Rng, ar: &Arith) -> (GrossFloat, GrossFloat) {
    let cap = ar.max_section() + 1;
    let wx = rng.gen_range(1..=cap);
    let wy = rng.gen_range(1..=cap);
    let x = random_value(rng, ar, wx, -20..=20);
    let y = if rng.gen_bool(0.3) {
        nearby(rng, ar, &x)
    } else {
        random_value(rng, ar, wy, -20..=20)
    };
    (x, y)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn add_sub_mul_round_like_the_oracle(seed: u64, fmt in 0usize..3, truncate: bool) {
        let mode = if truncate { Rounding::Truncate } else { Rounding::NearestEven };
        let ar = pick(fmt, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = operands(&mut rng, &ar);
        let rs = rng.gen_range(0..=ar.max_section());
        let digits = ((rs + 1) * ar.chunk_width()) as u64;
        let (ex, ey) = (exact(&ar, &x), exact(&ar, &y));
        let cases = [
            (ar.add(&x, &y, rs, &mut NoCount).unwrap().0, ex.add(&ey)),
            (ar.sub(&x, &y, rs, &mut NoCount).unwrap().0, ex.sub(&ey)),
            (ar.mul(&x, &y, rs, &mut NoCount).unwrap().0, ex.mul(&ey)),
        ];
        for (got, want) in cases {
            prop_assert!(got.width() <= rs + 1);
            prop_assert_eq!(exact(&ar, &got), want.round(digits, mode));
        }
    }

    #[test]
    fn short_product_within_one_unit(seed: u64, fmt in 0usize..3) {
        let ar = pick(fmt, Rounding::NearestEven);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = operands(&mut rng, &ar);
        let rs = rng.gen_range(0..=ar.max_section());
        let digits = ((rs + 1) * ar.chunk_width()) as u64;
        let mut full = OpCounter::new();
        let mut short = OpCounter::new();
        ar.mul(&x, &y, rs, &mut full).unwrap();
        let (z, _) = ar.mul_short(&x, &y, rs, &mut short).unwrap();
        let want = exact(&ar, &x).mul(&exact(&ar, &y));
        prop_assert!(ulps(&exact(&ar, &z), &want, digits) <= 1.0);
        prop_assert!(short.grossdigit_mults <= full.grossdigit_mults);
    }

    #[test]
    fn division_within_two_units(seed: u64, fmt in 0usize..3) {
        let ar = pick(fmt, Rounding::NearestEven);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = operands(&mut rng, &ar);
        let rs = rng.gen_range(0..=ar.max_section());
        let (q, _) = ar.div(&x, &y, rs, &mut NoCount).unwrap();
        let exact_q = ar.to_rational(&x) / ar.to_rational(&y);
        let err = (ar.to_rational(&q) - &exact_q) / &exact_q;
        let unit = num_traits::ToPrimitive::to_f64(&err).unwrap().abs();
        let bound = 2.0 * 2f64.powi(1 - ((rs + 1) * ar.chunk_width()) as i32);
        prop_assert!(unit <= bound, "relative error {unit:e} > {bound:e}");
    }

    #[test]
    fn add_and_mul_commute(seed: u64, fmt in 0usize..3) {
        let ar = pick(fmt, Rounding::NearestEven);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = operands(&mut rng, &ar);
        let rs = rng.gen_range(0..=ar.max_section());
        prop_assert_eq!(ar.add(&x, &y, rs, &mut NoCount).unwrap().0, ar.add(&y, &x, rs, &mut NoCount).unwrap().0);
        prop_assert_eq!(ar.mul(&x, &y, rs, &mut NoCount).unwrap().0, ar.mul(&y, &x, rs, &mut NoCount).unwrap().0);
        let (d1, _) = ar.sub(&x, &y, rs, &mut NoCount).unwrap();
        let (d2, _) = ar.sub(&y, &x, rs, &mut NoCount).unwrap();
        prop_assert_eq!(d1, -d2);
    }

    #[test]
    fn sections_approach_the_value(seed: u64, fmt in 0usize..3) {
        let ar = pick(fmt, Rounding::Truncate);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_value(&mut rng, &ar, ar.max_section() + 1, -5..=5);
        let ex = exact(&ar, &x);
        let mut prev: Option<Dyadic> = None;
        for q in 0..=ar.max_section() {
            let s = ar.section(&x, q).unwrap();
            prop_assert_eq!(s.width(), q + 1);
            prop_assert_eq!(&ar.section(&s, q).unwrap(), &s);
            let gap = ex.sub(&exact(&ar, &s)).abs();
            // Truncation never overshoots, and the gap shrinks with q.
            prop_assert!(exact(&ar, &s).abs().cmp(&ex.abs()) != std::cmp::Ordering::Greater);
            if let Some(p) = &prev {
                prop_assert!(gap.cmp(p) != std::cmp::Ordering::Greater);
            }
            prev = Some(gap);
        }
        prop_assert!(prev.unwrap().n == 0.into());
    }

    #[test]
    fn mixed_widths_stay_closed(seed: u64, fmt in 0usize..3) {
        let ar = pick(fmt, Rounding::NearestEven);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = operands(&mut rng, &ar);
        for rs in 0..=ar.max_section() {
            for z in [
                ar.add(&x, &y, rs, &mut NoCount).unwrap().0,
                ar.mul(&x, &y, rs, &mut NoCount).unwrap().0,
            ] {
                prop_assert!(z.width() <= rs + 1);
                prop_assert!(ar.validate_operand(&z).is_ok());
                prop_assert_eq!(ar.parse_literal(&ar.to_literal(&z)).unwrap(), z.clone());
                prop_assert_eq!(ar.parse_table_row(&ar.format_table_row(&z)).unwrap(), z);
            }
        }
    }

    #[test]
    fn reuse_matches_a_fresh_evaluation(seed: u64, n in 2usize..6) {
        let ar = arith(7, 3, Rounding::Truncate);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = random_value(&mut rng, &ar, 4, -2..=2);
        let terms: Vec<(Sign, GrossFloat)> = (0..n)
            .map(|i| {
                let v = if rng.gen_bool(0.5) { nearby(&mut rng, &ar, &base) } else { random_value(&mut rng, &ar, 4, -3..=3) };
                let s = if i % 2 == 1 { Sign::Minus } else { Sign::Plus };
                (s, v.abs())
            })
            .collect();
        match adaptive_sum(&ar, &terms, 2f64.powi(-8)) {
            Ok(out) => {
                let fresh = evaluate_at(&ar, &terms, &out.levels).unwrap();
                prop_assert_eq!(out.value, fresh);
                let mut prev = vec![0; n];
                for st in &out.steps {
                    prop_assert!(st.levels.iter().zip(&prev).all(|(a, b)| a >= b));
                    prev = st.levels.clone();
                }
            }
            Err(dynprec::PrecisionError::AccuracyExhausted { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn cancellation_shift_covers_shared_digits(m in 1usize..20, tail: u64, fmt in 0usize..3) {
        let ar = pick(fmt, Rounding::NearestEven);
        let w = ar.chunk_width();
        let total = (ar.max_section() + 1) * w;
        let m = m.min(total - 1);
        // Two digit strings agreeing in exactly m leading digits.
        let mut rng = ChaCha8Rng::seed_from_u64(tail);
        let mut a: Vec<char> = (0..total).map(|_| if rng.gen_bool(0.5) { '1' } else { '0' }).collect();
        a[0] = '1';
        let mut b = a.clone();
        b[m] = if a[m] == '1' { '0' } else { '1' };
        let s = |d: &[char]| format!("{}.{}", d[0], d[1..].iter().collect::<String>());
        let x = ar.from_binary_string(Sign::Plus, 0, &s(&a)).unwrap();
        let y = ar.from_binary_string(Sign::Plus, 0, &s(&b)).unwrap();
        let (_, rep) = ar.sub(&x, &y, ar.max_section(), &mut NoCount).unwrap();
        prop_assert!(rep.shift >= m as i64);
        let c = CancellationReport::detect(&ar, &rep);
        prop_assert_eq!(c.triggered, rep.shift >= c.threshold_digits);
    }

    #[test]
    fn horner_matches_exact_cubic(seed: u64) {
        let ar = arith(52, 4, Rounding::NearestEven);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<i64> = (0..4).map(|_| rng.gen_range(-50i64..=50)).collect();
        prop_assume!(coeffs[0] != 0);
        let p = Polynomial::from_integers(&ar, &coeffs).unwrap();
        let x = random_value(&mut rng, &ar, 1, -2..=2);
        // A one-chunk x and small integer coefficients never need more than
        // four chunks, so the gradual accumulator is exact.
        let got = horner_eval(&ar, &p, &x, 4, &mut NoCount).unwrap();
        prop_assert_eq!(ar.to_rational(&got), p.eval_exact(&ar, &ar.to_rational(&x)));
        let dp = p.derivative(&ar).unwrap();
        let dgot = dynprec::rootfind::horner_eval_derivative(&ar, &p, &x, 4, &mut NoCount).unwrap();
        prop_assert_eq!(ar.to_rational(&dgot), dp.eval_exact(&ar, &ar.to_rational(&x)));
    }

    #[test]
    fn decimal_input_rounds_like_the_oracle(n in -100000i64..100000, d in 1i64..10000, fmt in 0usize..3) {
        let ar = pick(fmt, Rounding::NearestEven);
        let r = rational(n, d);
        let x = ar.from_rational(&r, ar.max_section()).unwrap();
        let digits = ((ar.max_section() + 1) * ar.chunk_width()) as i32;
        let err = (ar.to_rational(&x) - &r).abs();
        if n != 0 {
            let rel = num_traits::ToPrimitive::to_f64(&(err / r.abs())).unwrap();
            prop_assert!(rel <= 2f64.powi(-digits), "{rel:e}");
        }
    }
}

#[test]
fn cost_model_matches_exhaustively() {
    for (t, big_t) in [(7, 4), (52, 4)] {
        let ar = arith(t, big_t, Rounding::NearestEven);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in 0..=big_t {
            for p in q..=big_t {
                let x = random_value(&mut rng, &ar, q + 1, 0..=0);
                let y = random_value(&mut rng, &ar, p + 1, 0..=0);
                for (a, b) in [(&x, &y), (&y, &x)] {
                    let mut c = OpCounter::new();
                    ar.mul(a, b, big_t, &mut c).unwrap();
                    assert_eq!((c.grossdigit_mults, c.grossdigit_adds), predict_mul_cost(q, p), "mul ({q},{p})");
                    let mut c = OpCounter::new();
                    ar.add(a, b, big_t, &mut c).unwrap();
                    assert_eq!(c.grossdigit_adds, predict_add_cost(q, p), "add ({q},{p})");
                }
            }
        }
    }
}

#[test]
fn literals_round_trip_for_other_bases() {
    let ar = Arith::new(dynprec::ArithConfig {
        base: 10,
        chunk_width: 4,
        ..dynprec::ArithConfig::binary(3, 2)
    })
    .unwrap();
    let x = ar.from_rational(&rational(-22, 7), 2).unwrap();
    let text = ar.to_literal(&x);
    assert_eq!(ar.parse_literal(&text).unwrap(), x);
}
