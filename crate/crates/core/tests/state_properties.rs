use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use freeqg_core::freelimit::{catalan, circular_moment, semicircle_moment_single, semicircular_moment};
use freeqg_core::ncpoly::{lp_norm_with, GaussRational, NcPolynomial};
use freeqg_core::weingarten::{GeneratorWord, Letter, Model, Weingarten};

fn engine() -> &'static Weingarten {
    static E: OnceLock<Weingarten> = OnceLock::new();
    E.get_or_init(|| Weingarten::new(12))
}

fn letter_strategy(model: Model) -> BoxedStrategy<Letter> {
    let star = match model {
        Model::Orthogonal => Just(false).boxed(),
        Model::Unitary => any::<bool>().boxed(),
    };
    (1u32..=3, 1u32..=3, star)
        .prop_map(|(i, j, s)| if s { Letter::star(i, j) } else { Letter::new(i, j) })
        .boxed()
}

fn model_strategy() -> impl Strategy<Value = Model> {
    prop_oneof![Just(Model::Orthogonal), Just(Model::Unitary)]
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = GeneratorWord> {
    model_strategy().prop_flat_map(move |model| {
        prop::collection::vec(letter_strategy(model), 0..=max_len)
            .prop_map(move |letters| GeneratorWord::new(letters, model).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn odd_moments_vanish(w in word_strategy(7), n in 3u32..=6) {
        prop_assume!(w.len() % 2 == 1);
        prop_assert!(engine().haar_moment(&w, n).unwrap().is_zero());
    }

    #[test]
    fn transpose_symmetry(w in word_strategy(6), n in 3u32..=6) {
        let h = engine().haar_moment(&w, n).unwrap();
        prop_assert_eq!(h, engine().haar_moment(&w.transpose(), n).unwrap());
    }

    #[test]
    fn state_is_positive(w in word_strategy(3), n in 3u32..=8) {
        let ww = w.adjoint().concat(&w).unwrap();
        prop_assert!(!engine().haar_moment(&ww, n).unwrap().is_negative());
    }

    #[test]
    fn state_is_tracial(w in word_strategy(6), cut in 0usize..=6, n in 3u32..=6) {
        let cut = cut.min(w.len());
        let (a, b) = w.letters().split_at(cut);
        let rotated: Vec<Letter> = b.iter().chain(a).copied().collect();
        let r = GeneratorWord::new(rotated, w.model()).unwrap();
        prop_assert_eq!(engine().haar_moment(&w, n).unwrap(), engine().haar_moment(&r, n).unwrap());
    }

    #[test]
    fn contraction_identity(w in word_strategy(6), pos in 0usize..5, n in 3u32..=8) {
        prop_assume!(pos + 1 < w.len());
        let (x, y) = (w.letters()[pos], w.letters()[pos + 1]);
        prop_assume!(w.model() == Model::Orthogonal || x.color != y.color);
        let c = engine().unitarity_contraction(&w, n, pos).unwrap();
        prop_assert!(c.holds(), "{} != {}", c.sum, c.reduced);
    }

    #[test]
    fn polynomial_trace_property(
        a in word_strategy(3),
        b in word_strategy(3),
        n in 3u32..=5,
    ) {
        prop_assume!(a.model() == b.model());
        let model = a.model();
        let pa = NcPolynomial::monomial(model, a.letters().to_vec(), GaussRational::from_int(2)).unwrap();
        let pb = NcPolynomial::monomial(model, b.letters().to_vec(), GaussRational::i()).unwrap();
        let ab = pa.mul(&pb).unwrap().state_eval_with(engine(), Some(n)).unwrap();
        let ba = pb.mul(&pa).unwrap().state_eval_with(engine(), Some(n)).unwrap();
        prop_assert_eq!(ab, ba);
    }
}

#[test]
fn single_label_matches_semicircle_and_alternating_circular_is_catalan() {
    for k in 0..=16 {
        let w = vec![Letter::new(2, 3); k];
        assert_eq!(semicircular_moment(&w), semicircle_moment_single(k));
    }
    for m in 0..=8 {
        let w: Vec<Letter> = (0..2 * m)
            .map(|i| if i % 2 == 0 { Letter::new(1, 1) } else { Letter::star(1, 1) })
            .collect();
        assert_eq!(circular_moment(&w), catalan(m));
    }
}

fn suite() -> Vec<NcPolynomial> {
    let o = |t: &str| NcPolynomial::parse(t, Model::Orthogonal).unwrap();
    let u = |t: &str| NcPolynomial::parse(t, Model::Unitary).unwrap();
    vec![
        o("x[1,1]"),
        o("x[1,1] + x[1,2]"),
        o("x[1,1] - 1/2*x[2,2] + 2"),
        o("x[1,1]*x[2,2]"),
        o("x[1,2]*x[2,1] + i*x[1,1]"),
        u("v[1,1]"),
        u("v[1,1] + v*[2,2]"),
    ]
}

#[test]
fn holder_monotonicity_and_positivity() {
    let bits = 160;
    for base in suite() {
        for n in [3u32, 5] {
            let poly = base.scaled_generators(n);
            let max_m = 12 / (2 * poly.degree().max(1)) as u32;
            let mut prev = None;
            for m in 1..=max_m.min(6) {
                let v = lp_norm_with(engine(), &poly, 2 * m, Some(n), bits).unwrap();
                assert!(!v.moment.is_negative());
                if let Some(p) = &prev {
                    assert!(!v.value.certainly_lt(p), "{base} N={n} m={m}");
                }
                prev = Some(v.value);
            }
        }
    }
}

#[test]
fn finite_norms_approach_the_limit() {
    let bits = 160;
    for base in suite() {
        let max_p = (12 / (2 * base.degree().max(1)) * 2) as u32;
        for p in (2..=max_p.min(6)).step_by(2) {
            let limit = lp_norm_with(engine(), &base, p, None, bits).unwrap().moment;
            let gaps: Vec<BigRational> = [4u32, 8, 16]
                .iter()
                .map(|&n| {
                    let v = lp_norm_with(engine(), &base.scaled_generators(n), p, Some(n), bits).unwrap();
                    (v.moment - &limit).abs()
                })
                .collect();
            if gaps[0].is_zero() {
                assert!(gaps.iter().all(Zero::is_zero), "{base} p={p}");
            } else {
                assert!(gaps[2] < gaps[1] && gaps[1] < gaps[0], "{base} p={p}: {gaps:?}");
            }
        }
    }
}

#[test]
fn quartic_moment_closed_form() {
    for n in 2..=12u32 {
        let w = GeneratorWord::orthogonal(&[(1, 1); 4]).unwrap();
        let h = engine().haar_moment(&w, n).unwrap();
        assert_eq!(h * BigRational::from_integer(BigInt::from(n * n)), BigRational::new((2 * n).into(), (n + 1).into()));
    }
}
