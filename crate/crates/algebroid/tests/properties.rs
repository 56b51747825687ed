use algebroid::courant::{check_courant, standard_exact};
use algebroid::json::{CourantJson, LieJson};
use algebroid::symcalc::{parse_poly, print_poly, Mono};
use algebroid::{Chart, KForm, LieData, Poly, Rat, VField};
use num_rational::Ratio;
use proptest::prelude::*;

const N: usize = 3;

fn chart() -> Chart {
    Chart::numbered("R3", "x", N)
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..2, N), -4i64..=4), 0..4).prop_map(|terms| {
        Poly::from_terms(N, terms.into_iter().map(|(e, c)| (Mono(e), Rat::from_integer(c.into()))))
    })
}

fn vfield() -> impl Strategy<Value = VField> {
    prop::collection::vec(poly(), N).prop_map(|comps| VField::new(&chart(), comps).unwrap())
}

fn one_form() -> impl Strategy<Value = KForm> {
    prop::collection::vec(poly(), N).prop_map(|c| KForm::one_form(&chart(), &c))
}

fn two_form() -> impl Strategy<Value = KForm> {
    prop::collection::vec(poly(), 3).prop_map(|c| {
        let x = chart();
        let mut w = KForm::zero(&x, 2);
        for (idx, f) in [[0, 1], [0, 2], [1, 2]].into_iter().zip(c) {
            w.add_component(idx.to_vec(), f);
        }
        w
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn print_then_parse_is_identity(p in poly()) {
        let x = chart();
        let back: Poly = parse_poly(&print_poly(&p, &x), &x).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn d_squared_vanishes(f in poly(), a in one_form(), b in two_form()) {
        let x = chart();
        prop_assert!(KForm::function(&x, f).d().d().is_zero());
        prop_assert!(a.d().d().is_zero());
        prop_assert!(b.d().d().is_zero());
    }

    #[test]
    fn lie_derivative_of_functions(f in poly(), xi in vfield()) {
        let x = chart();
        let got = KForm::function(&x, f.clone()).lie(&xi).unwrap().as_function();
        // ξ(f) = Σ ξ_i ∂_i f
        let expected = (0..N).fold(Poly::zero(N), |acc, i| acc.add_ref(&xi.comps[i].mul_ref(&f.deriv(i))));
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn lie_and_contraction_commutator(xi in vfield(), eta in vfield(), w in two_form()) {
        // [L_ξ, ι_η] = ι_[ξ,η]
        let lhs = w.iota(&eta).unwrap().lie(&xi).unwrap().sub(&w.lie(&xi).unwrap().iota(&eta).unwrap()).unwrap();
        let rhs = w.iota(&xi.bracket(&eta).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exterior_derivative_is_a_derivation(f in poly(), a in one_form()) {
        let x = chart();
        let df = KForm::function(&x, f.clone()).d();
        let rhs = df.wedge(&a).unwrap().add(&a.d().scale(&f)).unwrap();
        prop_assert_eq!(a.scale(&f).d(), rhs);
    }
}

#[test]
fn json_round_trip() {
    let x = chart();
    let h = algebroid::symcalc::parse_form("x1*dx1^dx2^dx3", &x, 3).unwrap();
    let q = standard_exact(&x, &h).unwrap();
    let j = CourantJson::from_data(&q);
    let text = serde_json::to_string(&j).unwrap();
    let back: CourantJson = serde_json::from_str(&text).unwrap();
    assert!(back.to_data::<num_rational::BigRational>(&x).unwrap().same_structure(&q));

    let a = LieData::tangent(&x);
    let j = LieJson::from_data(&a);
    let back: LieJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
    assert!(back.to_data::<num_rational::BigRational>(&x).unwrap().same_structure(&a));
}

#[test]
fn machine_rationals_agree_with_big_rationals() {
    let x = Chart::numbered("R3", "x", 3);
    let h_big: KForm = algebroid::symcalc::parse_form("x2*dx1^dx2^dx3", &x, 3).unwrap();
    let h_small: algebroid::symcalc::KForm<Ratio<i64>> = algebroid::symcalc::parse_form("x2*dx1^dx2^dx3", &x, 3).unwrap();
    let big = check_courant(&standard_exact(&x, &h_big).unwrap(), 20, 0);
    let small = check_courant(&standard_exact(&x, &h_small).unwrap(), 20, 0);
    assert!(small.all_passed());
    assert_eq!(big, small);
}
