//! Property tests for the algebraic invariants of the convolution layer.

use proptest::collection::vec;
use proptest::prelude::*;

use maxplus::knapsack::{to_at_most, Semantics, SolutionArray};
use maxplus::maxconv::{
    conv1d_concave, conv1d_naive, conv_naive, conv_via_linearization, superadditive_check_naive,
    upper_bound_check_naive, ConvRequest,
};
use maxplus::mdarray::{linear_index, position_of, ExtInt, MDArray, SizeVec};

fn ext(v: Option<i64>) -> ExtInt {
    match v {
        Some(x) => ExtInt::Finite(x),
        None => ExtInt::NegInf,
    }
}

fn entry_strategy() -> impl Strategy<Value = ExtInt> {
    prop_oneof![
        9 => (-50i64..=50).prop_map(ExtInt::Finite),
        1 => Just(ExtInt::NegInf),
    ]
}

fn small_size() -> impl Strategy<Value = Vec<usize>> {
    prop_oneof![
        (1usize..=12).prop_map(|a| vec![a]),
        (1usize..=4, 1usize..=4).prop_map(|(a, b)| vec![a, b]),
        (1usize..=3, 1usize..=3, 1usize..=2).prop_map(|(a, b, c)| vec![a, b, c]),
    ]
}

fn array_pair() -> impl Strategy<Value = (MDArray, MDArray)> {
    small_size().prop_flat_map(|dims| {
        let size = SizeVec::new(dims).unwrap();
        let count = size.count();
        (
            vec(entry_strategy(), count),
            vec(entry_strategy(), count),
            Just(size),
        )
            .prop_map(|(a, b, size)| {
                (
                    MDArray::from_vec(size.clone(), a).unwrap(),
                    MDArray::from_vec(size, b).unwrap(),
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn linear_index_round_trips((dims, salt) in (small_size(), any::<u64>())) {
        let _ = salt;
        let size = SizeVec::new(dims).unwrap();
        for idx in 0..size.count() {
            let pos = position_of(idx, &size);
            prop_assert_eq!(linear_index(&pos, &size).unwrap(), idx);
        }
    }

    #[test]
    fn ext_int_neg_inf_is_absorbing(x in -1000i64..1000) {
        let ninf = ExtInt::NegInf;
        let fx = ExtInt::Finite(x);
        prop_assert_eq!(ninf.checked_add(fx).unwrap(), ninf);
        prop_assert_eq!(fx.checked_add(ninf).unwrap(), ninf);
        prop_assert_eq!(ninf.max(fx), fx);
        prop_assert_eq!(fx.max(ninf), fx);
    }

    #[test]
    fn conv_is_commutative((a, b) in array_pair()) {
        let ab = conv_naive(&ConvRequest::truncated(a.clone(), b.clone()).unwrap()).unwrap();
        let ba = conv_naive(&ConvRequest::truncated(b, a).unwrap()).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn conv_is_associative_on_truncated_outputs((a, b) in array_pair(), c_vals in vec(entry_strategy(), 256)) {
        let size = a.size().clone();
        let c = MDArray::from_vec(
            size.clone(),
            c_vals.into_iter().take(size.count()).collect::<Vec<_>>(),
        );
        prop_assume!(c.is_ok());
        let c = c.unwrap();
        let conv = |x: &MDArray, y: &MDArray| {
            conv_naive(&ConvRequest::truncated(x.clone(), y.clone()).unwrap()).unwrap()
        };
        prop_assert_eq!(conv(&conv(&a, &b), &c), conv(&a, &conv(&b, &c)));
    }

    #[test]
    fn conv_shift_equivariance((a, b) in array_pair(), s in -20i64..=20) {
        let plain = conv_naive(&ConvRequest::truncated(a.clone(), b.clone()).unwrap()).unwrap();
        let shifted = conv_naive(
            &ConvRequest::truncated(a.shifted(s).unwrap(), b.shifted(s).unwrap()).unwrap(),
        )
        .unwrap();
        prop_assert_eq!(shifted, plain.shifted(2 * s).unwrap());
    }

    #[test]
    fn linearization_equals_naive((a, b) in array_pair()) {
        let req = ConvRequest::truncated(a, b).unwrap();
        prop_assert_eq!(
            conv_via_linearization(&req, conv1d_naive).unwrap(),
            conv_naive(&req).unwrap()
        );
    }

    #[test]
    fn concave_conv_equals_naive(
        r_vals in vec(prop_oneof![4 => (-40i64..=40).prop_map(Some), 1 => Just(None)], 1..40),
        diffs in vec(-9i64..=9, 0..20),
        start in -20i64..=20,
        pads in (0usize..3, 0usize..3),
    ) {
        let r: Vec<ExtInt> = r_vals.into_iter().map(ext).collect();
        let mut sorted = diffs;
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut a = vec![ExtInt::NegInf; pads.0];
        let mut v = start;
        a.push(ExtInt::Finite(v));
        for d in sorted {
            v += d;
            a.push(ExtInt::Finite(v));
        }
        a.extend(std::iter::repeat_n(ExtInt::NegInf, pads.1));
        let out_len = r.len() + a.len() - 1;
        prop_assert_eq!(
            conv1d_concave(&r, &a, out_len).unwrap(),
            conv1d_naive(&r, &a, out_len).unwrap()
        );
    }

    #[test]
    fn superadditivity_is_the_self_upper_bound((a, _b) in array_pair()) {
        prop_assert_eq!(
            superadditive_check_naive(&a),
            upper_bound_check_naive(&a, &a, &a).unwrap()
        );
    }

    #[test]
    fn tight_upper_bound_always_holds((a, b) in array_pair()) {
        let c = conv_naive(&ConvRequest::truncated(a.clone(), b.clone()).unwrap()).unwrap();
        prop_assert!(upper_bound_check_naive(&a, &b, &c).unwrap());
    }

    #[test]
    fn to_at_most_is_monotone_and_idempotent((a, _b) in array_pair()) {
        let sol = SolutionArray { array: a, semantics: Semantics::ExactWeight };
        let once = to_at_most(&sol);
        prop_assert!(once.array.monotone_increasing());
        prop_assert_eq!(to_at_most(&once).array, once.array);
    }
}
