use algebroid::courant::{
    check_courant, check_courant_morphism, check_dirac, connection_shift, curvature, dotplus, graph_of_morphism,
    linear_combination, opposite, overline, standard_exact, twist, Connection, CourantExtension, DiracData,
};
use algebroid::linalg::{identity, vec_add, vec_scale};
use algebroid::sample::Sampler;
use algebroid::symcalc::parse_form;
use algebroid::{Chart, KForm, LieData, Poly, Rat, VField};

fn form(chart: &Chart, s: &str, k: usize) -> KForm {
    parse_form(s, chart, k).unwrap()
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Dorfman bracket on `T ⊕ Ω¹` computed with Cartan calculus directly.
fn dorfman(h: &KForm, x: &(VField, KForm), y: &(VField, KForm)) -> (VField, KForm) {
    let v = x.0.bracket(&y.0).unwrap();
    let w = y.1.lie(&x.0).unwrap().sub(&x.1.d().iota(&y.0).unwrap()).unwrap();
    let w = w.add(&h.iota(&x.0).unwrap().iota(&y.0).unwrap()).unwrap();
    (v, w)
}

fn split(chart: &Chart, s: &[Poly]) -> (VField, KForm) {
    let n = chart.dim();
    (VField::new(chart, s[..n].to_vec()).unwrap(), KForm::one_form(chart, &s[n..]))
}

#[test]
fn standard_bracket_matches_cartan_oracle() {
    let x = Chart::numbered("R3", "x", 3);
    let h = form(&x, "x1*dx1^dx2^dx3 + x2*dx1^dx2^dx3", 3);
    let q = standard_exact(&x, &h).unwrap();
    let mut smp = Sampler::new(7);
    for _ in 0..30 {
        let a: Vec<Poly> = smp.section(3, 6);
        let b: Vec<Poly> = smp.section(3, 6);
        let (v, w) = dorfman(&h, &split(&x, &a), &split(&x, &b));
        let got = split(&x, &q.bracket(&a, &b));
        assert_eq!(got.0, v);
        assert_eq!(got.1, w);
        let (sa, sb) = (split(&x, &a), split(&x, &b));
        let pairing = sa.1.iota(&sb.0).unwrap().add(&sb.1.iota(&sa.0).unwrap()).unwrap().as_function();
        assert_eq!(q.pair(&a, &b), pairing);
    }
}

#[test]
fn axiom_suite_on_standard_models() {
    for n in 1..=3 {
        let x = Chart::numbered(format!("R{n}"), "x", n);
        let mut hs = vec![KForm::zero(&x, 3)];
        if n == 3 {
            hs.push(form(&x, "dx1^dx2^dx3", 3));
            hs.push(form(&x, "x1*dx1^dx2^dx3 + x2*dx1^dx2^dx3", 3));
        }
        for h in hs {
            let rep = check_courant(&standard_exact(&x, &h).unwrap(), 20, 0);
            assert!(rep.all_passed(), "n={n}: {:?}", rep.failed_names());
        }
    }
    let x = Chart::numbered("R4", "x", 4);
    let q = twist(&standard_exact(&x, &KForm::zero(&x, 3)).unwrap(), &form(&x, "x4*dx1^dx2^dx3", 3)).unwrap();
    let rep = check_courant(&q, 10, 0);
    assert_eq!(rep.failed_names(), vec!["leibniz_identity"]);
    assert!(rep.get("leibniz_identity").unwrap().counterexample.as_deref().unwrap().starts_with("generators"));
}

#[test]
fn standard_examples() {
    let x = Chart::numbered("R3", "x", 3);
    let q = standard_exact(&x, &form(&x, "dx1^dx2^dx3", 3)).unwrap();
    let br = q.bracket(&q.basis(0), &q.basis(1));
    assert_eq!(br, q.basis(5));
    assert_eq!(q.pair(&q.basis(0), &q.basis(3)), Poly::one(3));
    let r1 = Chart::numbered("R", "x", 1);
    let q1 = standard_exact(&r1, &KForm::zero(&r1, 3)).unwrap();
    assert_eq!(q1.rank, 2);
    assert!(q1.structure.iter().flatten().flatten().all(|p| p.is_constant()));
}

#[test]
fn twist_and_opposite() {
    let x = Chart::numbered("R3", "x", 3);
    let h = form(&x, "x2*dx1^dx2^dx3", 3);
    let q0 = standard_exact(&x, &KForm::zero(&x, 3)).unwrap();
    let qh = standard_exact(&x, &h).unwrap();
    assert!(twist(&q0, &h).unwrap().same_structure(&qh));
    assert!(twist(&twist(&qh, &h).unwrap(), &h.neg()).unwrap().same_structure(&qh));
    assert!(opposite(&opposite(&qh)).same_structure(&qh));
    assert!(check_courant(&opposite(&q0), 20, 1).all_passed());
    let lhs = opposite(&twist(&q0, &h).unwrap());
    let rhs = twist(&opposite(&q0), &h.neg()).unwrap();
    assert!(lhs.same_structure(&rhs));
}

#[test]
fn overline_is_tangent() {
    let x = Chart::numbered("R3", "x", 3);
    let q = standard_exact(&x, &form(&x, "dx1^dx2^dx3", 3)).unwrap();
    let (a, _) = overline(&q).unwrap();
    assert!(a.same_structure(&LieData::tangent(&x)));
    let (b, _) = overline(&opposite(&q)).unwrap();
    assert!(b.same_structure(&a));
}

#[test]
fn combinations_add_twisting_forms() {
    let x = Chart::numbered("R3", "x", 3);
    let h1 = form(&x, "dx1^dx2^dx3", 3);
    let h2 = form(&x, "x1*dx1^dx2^dx3", 3);
    let q1 = standard_exact(&x, &h1).unwrap();
    let q2 = standard_exact(&x, &h2).unwrap();
    let sum = dotplus(&q1, &q2).unwrap();
    let target = standard_exact(&x, &h1.add(&h2).unwrap()).unwrap();
    assert_eq!(sum.courant().rank, 6);
    assert!(sum.courant().same_structure(&target));
    assert!(check_courant_morphism(sum.courant(), &target, &identity(3, 6)).all_passed());

    let neg = linear_combination(&[CourantExtension::exact(&q1).unwrap()], &[rat(-1)]).unwrap();
    assert!(neg.courant().same_structure(&standard_exact(&x, &h1.neg()).unwrap()));
    let one = linear_combination(&[CourantExtension::exact(&q2).unwrap()], &[rat(1)]).unwrap();
    assert!(one.courant().same_structure(&q2));
    assert!(check_courant(sum.courant(), 10, 0).all_passed());
}

#[test]
fn curvature_and_torsor_law() {
    let x = Chart::numbered("R3", "x", 3);
    let h = form(&x, "x1*dx1^dx2^dx3 + x2*dx1^dx2^dx3", 3);
    let q = standard_exact(&x, &h).unwrap();
    let nabla = Connection::from_splitting(&q).unwrap();
    assert_eq!(curvature(&q, &nabla).unwrap(), h);
    let mut smp = Sampler::new(11);
    for _ in 0..20 {
        let b: KForm = smp.form(&x, 2);
        let shifted = connection_shift(&q, &nabla, &b).unwrap();
        assert_eq!(curvature(&q, &shifted).unwrap(), h.add(&b.d()).unwrap());
        let back = connection_shift(&q, &shifted, &b.neg()).unwrap();
        assert_eq!(back.sections, nabla.sections);
    }
    let q0 = standard_exact(&x, &KForm::zero(&x, 3)).unwrap();
    let flat = Connection::from_splitting(&q0).unwrap();
    assert!(curvature(&q0, &flat).unwrap().is_zero());
    let b = form(&x, "x1*dx1^dx2", 2);
    assert!(connection_shift(&q0, &flat, &b).is_ok());
}

fn graph_generators(q: &algebroid::CourantData, b: &KForm) -> Vec<Vec<Poly>> {
    let x = &q.chart;
    (0..x.dim())
        .map(|i| vec_add(&q.basis(i), &q.coanchor_form(&b.iota(&VField::coord(x, i)).unwrap())))
        .collect()
}

#[test]
fn dirac_structures() {
    let x = Chart::numbered("R3", "x", 3);
    let q = standard_exact(&x, &KForm::zero(&x, 3)).unwrap();
    let forms = DiracData { support: vec![], generators: (3..6).map(|a| q.basis(a)).collect() };
    assert!(check_dirac(&q, &forms).unwrap().all_passed());

    let closed = DiracData { support: vec![], generators: graph_generators(&q, &form(&x, "dx1^dx2", 2)) };
    assert!(check_dirac(&q, &closed).unwrap().all_passed());

    let b = form(&x, "x3*dx1^dx2", 2);
    let open = DiracData { support: vec![], generators: graph_generators(&q, &b) };
    let rep = check_dirac(&q, &open).unwrap();
    assert_eq!(rep.failed_names(), vec!["bracket_closure"]);
    let oracle = b.d().iota(&VField::coord(&x, 0)).unwrap().iota(&VField::coord(&x, 1)).unwrap();
    let oracle = oracle.iota(&VField::coord(&x, 2)).unwrap().as_function();
    assert_eq!(oracle, Poly::one(3));
    assert_eq!(rep.get("bracket_closure").unwrap().counterexample.as_deref(), Some("⟨{k1,k2}, k3⟩ = 1"));

    let too_few = DiracData { support: vec![], generators: vec![q.basis(3)] };
    assert!(!check_dirac(&q, &too_few).unwrap().passed("maximality"));
    let dependent = DiracData { support: vec![], generators: vec![q.basis(3), q.basis(3), q.basis(4)] };
    assert!(check_dirac(&q, &dependent).is_err());
}

#[test]
fn supported_dirac_and_lift_independence() {
    let x = Chart::numbered("R2", "x", 2);
    let q = standard_exact(&x, &KForm::zero(&x, 3)).unwrap();
    let z = x.subspace(&[1]);
    let gens = vec![
        vec![Poly::one(1), Poly::zero(1), Poly::zero(1), Poly::zero(1)],
        vec![Poly::zero(1), Poly::zero(1), Poly::zero(1), Poly::one(1)],
    ];
    let k = DiracData { support: vec![1], generators: gens };
    assert_eq!(z.dim(), 1);
    let rep = check_dirac(&q, &k).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.failed_names());

    // a different lift, shifted by x2·q, gives the same restricted pairings
    let lifts = k.lifts(&q);
    let x2 = Poly::var(2, 1);
    let alt: Vec<Vec<Poly>> = lifts.iter().map(|l| vec_add(l, &vec_scale(&x2, &q.basis(0)))).collect();
    for i in 0..2 {
        for j in 0..2 {
            for l in 0..2 {
                let a = q.pair(&q.bracket(&lifts[i], &lifts[j]), &lifts[l]).restrict(&[0]);
                let b = q.pair(&q.bracket(&alt[i], &alt[j]), &lifts[l]).restrict(&[0]);
                assert_eq!(a, b);
            }
        }
    }

    let bad = DiracData { support: vec![1], generators: vec![
        vec![Poly::zero(1), Poly::one(1), Poly::zero(1), Poly::zero(1)],
        vec![Poly::zero(1), Poly::zero(1), Poly::one(1), Poly::zero(1)],
    ] };
    assert!(!check_dirac(&q, &bad).unwrap().passed("anchor_tangent"));
}

#[test]
fn graph_of_identity() {
    let x = Chart::numbered("R2", "x", 2);
    let q = standard_exact(&x, &KForm::zero(&x, 3)).unwrap();
    let (sum, d) = graph_of_morphism(&q, &q, &identity(2, 4)).unwrap();
    assert_eq!(d.generators.len(), 2);
    let rep = check_dirac(sum.courant(), &d).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.failed_names());
    // the coanchor diagonal maps to zero in the push-out
    let a = q.coanchor_of(&[Poly::one(2), Poly::zero(2)]);
    assert!(sum.project_tuple(&[a.clone(), a]).unwrap().iter().all(|p| p.is_zero()));
}
