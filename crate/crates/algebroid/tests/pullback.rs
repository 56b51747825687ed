use algebroid::courant::{
    check_courant, check_courant_morphism, check_dirac, connection_shift, standard_exact, Connection, CourantExtension,
    DiracData,
};
use algebroid::linalg::identity;
use algebroid::pullback::{
    check_c_plusplus, check_curvature_pullback, check_dirac_correspondence, check_twist_commute, conormal,
    courant_morphism_graph, f_plusplus, i_plusplus_dirac, pullback_connection, CourantMode,
};
use algebroid::symcalc::{parse_form, parse_poly};
use algebroid::{Chart, ChartMap, CourantData, KForm, Poly};

fn form(chart: &Chart, s: &str, k: usize) -> KForm {
    parse_form(s, chart, k).unwrap()
}

fn map(src: &Chart, tgt: &Chart, comps: &[&str]) -> ChartMap {
    ChartMap::new(src, tgt, comps.iter().map(|c| parse_poly(c, src).unwrap()).collect()).unwrap()
}

fn std0(chart: &Chart) -> CourantData {
    standard_exact(chart, &KForm::zero(chart, 3)).unwrap()
}

fn assert_courant(q: &CourantData) {
    let rep = check_courant(q, 8, 3);
    assert!(rep.all_passed(), "{:?}", rep.failed_names());
}

#[test]
fn identity_reproduces_source() {
    let x = Chart::numbered("R3", "x", 3);
    let q = standard_exact(&x, &form(&x, "x1*dx1^dx2^dx3", 3)).unwrap();
    let pres = f_plusplus(&ChartMap::identity(&x), &q, CourantMode::Identity).unwrap();
    assert!(pres.result.same_structure(&q));
    assert!(pres.check_relations().unwrap().all_passed());
}

#[test]
fn curve_in_the_plane() {
    let t = Chart::numbered("R1", "t", 1);
    let x = Chart::numbered("R2", "x", 2);
    let f = map(&t, &x, &["t1", "t1^2"]);
    let pres = f_plusplus(&f, &std0(&x), CourantMode::ExactSplit(None)).unwrap();
    assert_eq!(pres.result.rank, 2);
    assert!(pres.result.same_structure(&std0(&t)));
    assert!(pres.check_relations().unwrap().all_passed());
    assert_courant(&pres.result);
    // the inverse image of an exact algebroid is exact
    assert!(CourantExtension::exact(&pres.result).is_ok());
}

#[test]
fn coordinate_line_in_the_plane() {
    let z = Chart::numbered("R1", "x", 1);
    let x = Chart::numbered("R2", "x", 2);
    let i = map(&z, &x, &["x1", "0"]);
    let pres = f_plusplus(&i, &std0(&x), CourantMode::CoordinateEmbedding).unwrap();
    assert!(pres.result.same_structure(&std0(&z)));
    assert!(pres.check_relations().unwrap().all_passed());
}

#[test]
fn submersion_and_twisted_sources() {
    let y = Chart::numbered("R3", "y", 3);
    let x = Chart::numbered("R2", "x", 2);
    let p = map(&y, &x, &["y1", "y3"]);
    let pres = f_plusplus(&p, &std0(&x), CourantMode::CoordinateSubmersion).unwrap();
    assert_eq!(pres.result.rank, 6);
    assert_courant(&pres.result);
    assert!(pres.check_relations().unwrap().all_passed());

    let x3 = Chart::numbered("R3", "x", 3);
    let h = form(&x3, "x2*dx1^dx2^dx3", 3);
    let q = standard_exact(&x3, &h).unwrap();
    let f = map(&y, &x3, &["y1", "y2", "y3 + y1*y2"]);
    let pres = f_plusplus(&f, &q, CourantMode::ExactSplit(None)).unwrap();
    assert_courant(&pres.result);
    assert!(pres.check_relations().unwrap().all_passed());
    // f*(x2 dx1∧dx2∧dx3) = y2 dy1∧dy2∧dy3, expanded by hand
    let expected = standard_exact(&y, &form(&y, "y2*dy1^dy2^dy3", 3)).unwrap();
    assert!(pres.result.same_structure(&expected));
}

#[test]
fn twisting_commutes_with_inverse_image() {
    let y = Chart::numbered("R3", "y", 3);
    let x = Chart::numbered("R3", "x", 3);
    let f = map(&y, &x, &["y1", "y2", "y3 + y1*y2"]);
    let h = form(&x, "dx1^dx2^dx3", 3);
    for hh in [KForm::zero(&x, 3), h.clone()] {
        let rep = check_twist_commute(&f, &std0(&x), &hh, CourantMode::ExactSplit(None)).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.failed_names());
    }
    // from a surface every 3-form pulls back to zero
    let s = Chart::numbered("R2", "y", 2);
    let g = map(&s, &x, &["y1", "y2", "y1*y2"]);
    let h = form(&x, "x3*dx1^dx2^dx3 + dx1^dx2^dx3", 3);
    let rep = check_twist_commute(&g, &std0(&x), &h, CourantMode::ExactSplit(None)).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.failed_names());
    let a = f_plusplus(&g, &std0(&x), CourantMode::ExactSplit(None)).unwrap();
    let b = f_plusplus(&g, &standard_exact(&x, &h).unwrap(), CourantMode::ExactSplit(None)).unwrap();
    assert!(a.result.same_structure(&b.result));
}

#[test]
fn connections_and_curvature() {
    let t = Chart::numbered("R1", "t", 1);
    let x2 = Chart::numbered("R2", "x", 2);
    let f = map(&t, &x2, &["t1", "t1^2"]);
    let q = std0(&x2);
    let pres = f_plusplus(&f, &q, CourantMode::ExactSplit(None)).unwrap();
    let conn = Connection::from_splitting(&q).unwrap();
    let pulled = pullback_connection(&pres, &conn).unwrap();
    for (i, a) in pulled.sections.iter().enumerate() {
        for b in &pulled.sections[i..] {
            assert!(pres.result.pair(a, b).is_zero());
        }
    }

    let y = Chart::numbered("R3", "y", 3);
    let x = Chart::numbered("R3", "x", 3);
    let f = map(&y, &x, &["y1 + y2^2", "y2", "y3 + y1*y2"]);
    let h = form(&x, "x1*dx1^dx2^dx3", 3);
    let q = standard_exact(&x, &h).unwrap();
    let conn = Connection::from_splitting(&q).unwrap();
    let rep = check_curvature_pullback(&f, &q, &conn, CourantMode::ExactSplit(None)).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);
    let b = form(&x, "x3*dx1^dx2", 2);
    let shifted = connection_shift(&q, &conn, &b).unwrap();
    let rep = check_curvature_pullback(&f, &q, &shifted, CourantMode::ExactSplit(None)).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);
}

#[test]
fn conormal_generators() {
    let x = Chart::numbered("R2", "x", 2);
    let line = Chart::numbered("R1", "x", 1);
    let point = Chart::new("pt", vec![]).unwrap();
    assert_eq!(conormal(&map(&line, &x, &["x1", "0"])).unwrap(), vec![KForm::dx(&x, 1)]);
    assert!(conormal(&ChartMap::identity(&x)).unwrap().is_empty());
    let p = ChartMap::new(&point, &x, vec![Poly::zero(0), Poly::zero(0)]).unwrap();
    assert_eq!(conormal(&p).unwrap(), vec![KForm::dx(&x, 0), KForm::dx(&x, 1)]);
    assert!(conormal(&map(&line, &x, &["x1", "x1^2"])).is_err());
}

#[test]
fn dirac_structures_with_support() {
    let x = Chart::numbered("R2", "x", 2);
    let z = Chart::numbered("R1", "x", 1);
    let i = map(&z, &x, &["x1", "0"]);
    let q = std0(&x);
    let one = Poly::one(1);
    let zero = Poly::zero(1);
    // span{(∂1, 0), (0, dx2)} along {x2 = 0}
    let k = DiracData {
        support: vec![1],
        generators: vec![
            vec![one.clone(), zero.clone(), zero.clone(), zero.clone()],
            vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
        ],
    };
    let (pres, d) = i_plusplus_dirac(&i, &q, &k).unwrap();
    assert!(pres.result.same_structure(&std0(&z)));
    assert_eq!(d.generators, vec![vec![one.clone(), zero.clone()]]);
    let rep = check_dirac_correspondence(&i, &q, &k).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);

    // Z = X: the correspondence is the identity
    let t = DiracData { support: vec![], generators: vec![q.basis(0), q.basis(1)] };
    let rep = check_dirac_correspondence(&ChartMap::identity(&x), &q, &t).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);

    // K must contain the conormal directions
    let bad = DiracData { support: vec![1], generators: vec![k.generators[0].clone()] };
    assert!(i_plusplus_dirac(&i, &q, &bad).is_err());
}

#[test]
fn graphs_of_courant_morphisms() {
    let x = Chart::numbered("R1", "x", 1);
    let q = std0(&x);
    let g = courant_morphism_graph(&ChartMap::identity(&x), &q, &q, &identity(1, 2)).unwrap();
    assert_eq!(g.sum.courant().rank, 4);
    let rep = check_dirac(g.sum.courant(), &g.dirac).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);

    let y = Chart::numbered("R3", "y", 3);
    let x3 = Chart::numbered("R3", "x", 3);
    let f = map(&y, &x3, &["y1", "y2", "y3 + y1*y2"]);
    let h = form(&x3, "dx1^dx2^dx3", 3);
    let qx = standard_exact(&x3, &h).unwrap();
    let qy = standard_exact(&y, &f.pullback_form(&h).unwrap()).unwrap();
    let pres = f_plusplus(&f, &qx, CourantMode::detect(&f)).unwrap();
    assert!(check_courant_morphism(&qy, &pres.result, &identity(3, 6)).all_passed());
    let g = courant_morphism_graph(&f, &qy, &qx, &identity(3, 6)).unwrap();
    let rep = check_dirac(g.sum.courant(), &g.dirac).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);

    let wrong = courant_morphism_graph(&f, &std0(&y), &qx, &identity(3, 6));
    assert!(wrong.is_err());
}

#[test]
fn composition_of_submersions() {
    let w = Chart::numbered("R4", "w", 4);
    let y = Chart::numbered("R3", "y", 3);
    let x = Chart::numbered("R2", "x", 2);
    let g = map(&y, &x, &["y1", "y3"]);
    let f = map(&w, &y, &["w2", "w1", "w4"]);
    let q = standard_exact(&x, &KForm::zero(&x, 3)).unwrap();
    let inner = f_plusplus(&g, &q, CourantMode::CoordinateSubmersion).unwrap();
    let outer = f_plusplus(&f, &inner.result, CourantMode::CoordinateSubmersion).unwrap();
    let comp = f_plusplus(&g.compose(&f).unwrap(), &q, CourantMode::CoordinateSubmersion).unwrap();
    let rep = check_c_plusplus(&inner, &outer, &comp).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.checks);
}
