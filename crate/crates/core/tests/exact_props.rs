//! Properties of the exact coefficient recurrence.

use fibeuler::exact::{euler_transform_with, TransformOptions};
use fibeuler::{euler_transform, fibonacci, parse_bfile, product_expansion_oracle, ShiftParam};
use proptest::prelude::*;
use rug::Integer;

fn z(v: i64) -> ShiftParam {
    ShiftParam::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recurrence_matches_product(s in -1i64..=6, n in 0usize..80) {
        let fast = euler_transform(z(s), n).unwrap();
        let slow = product_expansion_oracle(z(s), n);
        prop_assert_eq!(fast.terms(), slow.terms());
    }

    #[test]
    fn prefix_is_stable(s in -1i64..=3, n in 1usize..150, m in 0usize..150) {
        let long = euler_transform(z(s), n + m).unwrap();
        let short = euler_transform(z(s), n).unwrap();
        prop_assert_eq!(&long.terms()[..=n], short.terms());
    }

    #[test]
    fn shift_is_additive_in_weights(s in -1i64..=3, n in 1usize..60) {
        // prod over z+2 equals the termwise product of the series for z+1 and z
        let a = euler_transform(z(s), n).unwrap();
        let b = euler_transform(z(s + 1), n).unwrap();
        let c = euler_transform(z(s + 2), n).unwrap();
        for k in 0..=n {
            let conv: Integer = (0..=k).map(|j| Integer::from(&a.terms()[j] * &b.terms()[k - j])).sum();
            prop_assert_eq!(&conv, &c.terms()[k]);
        }
    }
}

#[test]
fn first_term_after_one_is_the_weight() {
    for s in -1..=5 {
        let seq = euler_transform(z(s), 1).unwrap();
        assert_eq!(seq.terms()[1], fibonacci(s + 1).unwrap());
    }
}

#[test]
fn serial_and_parallel_agree() {
    let par = euler_transform_with(z(1), 1500, TransformOptions { parallel: true }).unwrap();
    let ser = euler_transform_with(z(1), 1500, TransformOptions { parallel: false }).unwrap();
    assert_eq!(par.terms(), ser.terms());
}

#[test]
fn terms_are_positive_and_nondecreasing_from_two() {
    for s in 0..=2 {
        let seq = euler_transform(z(s), 300).unwrap();
        assert!(seq.terms().iter().all(|a| *a > 0));
        assert!(seq.terms()[2..].windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn bfile_round_trip() {
    let seq = euler_transform(z(2), 120).unwrap();
    let parsed = parse_bfile(seq.to_bfile_string().as_bytes()).unwrap();
    assert_eq!(parsed.len(), 121);
    for (i, (idx, v)) in parsed.iter().enumerate() {
        assert_eq!(*idx, i as i64);
        assert_eq!(v, &seq.terms()[i]);
    }
}
