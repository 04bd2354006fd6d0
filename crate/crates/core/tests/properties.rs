use proptest::prelude::*;
use taut_core::quotient::quotient;
use taut_core::rational::frac;
use taut_core::taut::{generators, linear_arithmetic, Space, TautClass};
use taut_core::verify::{run, Caps, Suite};
use taut_core::Q;

fn space_strategy() -> impl Strategy<Value = Space> {
    prop_oneof![
        (4usize..=6).prop_map(|n| Space::numbered(0, n).unwrap()),
        (1usize..=3).prop_map(|n| Space::numbered(1, n).unwrap()),
        (0usize..=2).prop_map(|n| Space::numbered(2, n).unwrap()),
    ]
}

fn class_on(space: Space) -> impl Strategy<Value = TautClass> {
    let n = generators(&space).len();
    proptest::collection::vec((-4i64..=4, 1i64..=3), n).prop_map(move |cs| {
        let mut c = TautClass::zero(&space);
        for (k, (a, b)) in generators(&space).iter().zip(cs) {
            c.add_key(k, &frac(a, b)).unwrap();
        }
        c
    })
}

fn pair() -> impl Strategy<Value = (TautClass, TautClass, i64)> {
    space_strategy().prop_flat_map(|s| (class_on(s.clone()), class_on(s), -5i64..=5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduce_is_linear((u, v, c) in pair()) {
        let quo = quotient(u.space());
        let c = Q::from_integer(c.into());
        let lhs = quo.reduce(&linear_arithmetic(&u, &v, &c).unwrap()).unwrap();
        let rhs: Vec<Q> = quo.reduce(&u).unwrap().iter().zip(quo.reduce(&v).unwrap()).map(|(a, b)| a + &c * b).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_is_a_retraction((u, _, _) in pair()) {
        let quo = quotient(u.space());
        let coords = quo.reduce(&u).unwrap();
        let back = quo.class_from_coords(&coords);
        prop_assert!(quo.equal(&u, &back).unwrap());
        prop_assert_eq!(quo.reduce(&back).unwrap(), coords);
    }

    #[test]
    fn class_json_round_trips((u, _, _) in pair()) {
        let text = serde_json::to_string(&u.to_json()).unwrap();
        prop_assert_eq!(TautClass::from_json_str(&text).unwrap(), u);
    }
}

#[test]
fn randomized_suites_pass_for_other_seeds() {
    for seed in [1, 99] {
        for suite in [Suite::Relations, Suite::Euler] {
            let rep = run(suite, seed, &Caps::default());
            assert!(rep.passed(), "seed {seed}: {}", rep.summary());
        }
    }
}

#[test]
fn keel_suite_passes() {
    let rep = run(Suite::Keel, 0, &Caps::default());
    assert!(rep.passed(), "{}", rep.summary());
}
