use algebroid::lie_algebroid::{
    baer_combination, c_plus, check_c_plus_assoc, check_c_plus_morphism, check_extension_pullback_linear,
    check_lie_algebroid, f_plus, f_plus_marked, quotient_by_marking, LieMode, MarkedLieData, OExtensionData,
};
use algebroid::symcalc::parse_poly;
use algebroid::{Chart, ChartMap, LieData, Poly, Rat};

fn p(chart: &Chart, s: &str) -> Poly {
    parse_poly(s, chart).unwrap()
}

fn map(src: &Chart, tgt: &Chart, comps: &[&str]) -> ChartMap {
    ChartMap::new(src, tgt, comps.iter().map(|c| p(src, c)).collect()).unwrap()
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// `T ⊕ O·c` on a chart with `[∂_i, ∂_j] = ω_ij c`.
fn twisted_extension(chart: &Chart, omega: &[(usize, usize, &str)]) -> LieData {
    let n = chart.dim();
    let r = n + 1;
    let mut anchor: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| Poly::from_i64(n, (i == j) as i64)).collect()).collect();
    anchor.push(vec![Poly::zero(n); n]);
    let mut st = vec![vec![vec![Poly::zero(n); r]; r]; r];
    for &(i, j, w) in omega {
        st[i][j][n] = p(chart, w);
        st[j][i][n] = -p(chart, w);
    }
    LieData::new(chart, anchor, st).unwrap()
}

#[test]
fn perturbed_rotation_algebra_fails_jacobi() {
    let pt = Chart::numbered("pt", "x", 0);
    let c = |v: i64| Poly::from_i64(0, v);
    // [e1,e2]=e3+e1, [e2,e3]=e1, [e3,e1]=e2 (the e1 term is the perturbation)
    let mut st = vec![vec![vec![c(0); 3]; 3]; 3];
    let table = [(0, 1, 2, 1), (0, 1, 0, 1), (1, 2, 0, 1), (2, 0, 1, 1)];
    for &(a, b, k, v) in &table {
        st[a][b][k] = c(v);
        st[b][a][k] = c(-v);
    }
    // brute-force jacobiator on (e1,e2,e3) from the constants
    let mut jac = [0i64; 3];
    let consts = |a: usize, b: usize, k: usize| -> i64 {
        table.iter().find_map(|&(x, y, z, v)| {
            if (x, y, z) == (a, b, k) { Some(v) } else if (y, x, z) == (a, b, k) { Some(-v) } else { None }
        }).unwrap_or(0)
    };
    for &(i, j, k) in &[(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        for m in 0..3 {
            for l in 0..3 {
                jac[l] += consts(j, k, m) * consts(i, m, l);
            }
        }
    }
    assert_ne!(jac, [0, 0, 0]);
    let a = LieData::new(&pt, vec![vec![]; 3], st).unwrap();
    let rep = check_lie_algebroid(&a, 10, 0);
    assert!(!rep.passed("jacobi"));
    assert!(rep.passed("antisymmetry"));

    let mut st2 = a.structure.clone();
    st2[0][1][0] = c(0);
    st2[1][0][0] = c(0);
    let so3 = LieData::new(&pt, vec![vec![]; 3], st2).unwrap();
    assert!(check_lie_algebroid(&so3, 10, 0).all_passed());
}

#[test]
fn parabola_pullback_of_tangent_plus_trivial() {
    let y = Chart::numbered("R", "t", 1);
    let x = Chart::numbered("R2", "x", 2);
    let f = map(&y, &x, &["t1", "t1^2"]);
    let a = twisted_extension(&x, &[]);
    let pb = f_plus(&f, &a, LieMode::TransitiveSplit(None)).unwrap();
    // solving df(ξ) = f*σ(q): ξ = g∂t forces q = (g, 2tg, h), free on (∂t,(1,2t,0)) and (0,(0,0,1))
    assert_eq!(pb.result.rank, 2);
    assert_eq!(pb.basis[0].1, vec![p(&y, "1"), p(&y, "2*t1"), Poly::zero(1)]);
    assert_eq!(pb.basis[1].1, vec![Poly::zero(1), Poly::zero(1), p(&y, "1")]);
    assert_eq!(pb.result.anchor, vec![vec![p(&y, "1")], vec![Poly::zero(1)]]);
    assert!(pb.result.structure.iter().flatten().flatten().all(|q| q.is_zero()));
    assert!(check_lie_algebroid(&pb.result, 100, 0).all_passed());
}

#[test]
fn embedding_and_submersion_modes() {
    let z = Chart::numbered("Z", "z", 1);
    let x = Chart::numbered("R2", "x", 2);
    let a = twisted_extension(&x, &[(0, 1, "x1")]);
    let i = map(&z, &x, &["z1", "0"]);
    let pb = f_plus(&i, &a, LieMode::CoordinateEmbedding).unwrap();
    assert_eq!(pb.result.rank, 2);
    assert!(check_lie_algebroid(&pb.result, 50, 1).all_passed());
    let split = f_plus(&i, &a, LieMode::TransitiveSplit(None)).unwrap();
    assert_eq!(split.result.rank, 2);

    let w = Chart::numbered("R3", "w", 3);
    let s = map(&w, &x, &["w3", "w1"]);
    let pb = f_plus(&s, &a, LieMode::CoordinateSubmersion).unwrap();
    assert_eq!(pb.result.rank, 4);
    assert!(check_lie_algebroid(&pb.result, 50, 2).all_passed());
    assert!(f_plus(&s, &a, LieMode::CoordinateEmbedding).is_err());
}

#[test]
fn c_plus_on_three_step_chain() {
    let r1 = Chart::numbered("R", "t", 1);
    let r2 = Chart::numbered("R2", "u", 2);
    let r3 = Chart::numbered("R3", "x", 3);
    let phi = map(&r2, &r3, &["u1", "u2", "u1*u2"]);
    let psi = map(&r1, &r2, &["t1", "t1^2"]);
    let a = LieData::tangent(&r3);
    let m = |f: &ChartMap| LieMode::detect(f);
    let p1 = f_plus(&phi, &a, m(&phi)).unwrap();
    let p2 = f_plus(&psi, &p1.result, m(&psi)).unwrap();
    let comp = phi.compose(&psi).unwrap();
    let q = f_plus(&comp, &a, m(&comp)).unwrap();
    let c = c_plus(&p1, &p2, &q).unwrap();
    assert!(check_c_plus_morphism(&p2.result, &q.result, &c, 50, 0).all_passed());
    assert!(q.result.same_structure(&LieData::tangent(&r1)));
}

#[test]
fn associativity_on_four_step_chain() {
    let r1 = Chart::numbered("R", "t", 1);
    let r2 = Chart::numbered("R2", "u", 2);
    let r3 = Chart::numbered("R3", "v", 3);
    let r4 = Chart::numbered("R4", "x", 4);
    let phi = map(&r3, &r4, &["v1", "v2", "v3", "v1*v2 + v3"]);
    let psi = map(&r2, &r3, &["u1", "u2", "u1*u2"]);
    let xi = map(&r1, &r2, &["t1", "t1^2"]);
    let t4 = LieData::tangent(&r4);
    let rep = check_c_plus_assoc(&phi, &psi, &xi, &t4, 50, 0).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.failed_names());
    let a = twisted_extension(&r4, &[]);
    let rep = check_c_plus_assoc(&phi, &psi, &xi, &a, 50, 0).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.failed_names());
    let b = twisted_extension(&r4, &[(0, 1, "x3"), (2, 3, "1")]);
    let rep = check_c_plus_assoc(&phi, &psi, &xi, &b, 20, 3).unwrap();
    assert!(rep.all_passed(), "{:?}", rep.failed_names());
}

#[test]
fn marked_pullback_and_quotients() {
    let y = Chart::numbered("R", "t", 1);
    let x = Chart::numbered("R2", "x", 2);
    let f = map(&y, &x, &["t1", "t1^2"]);
    let m = MarkedLieData::trivial(&LieData::tangent(&x), 1);
    let (pm, _) = f_plus_marked(&f, &m, LieMode::TransitiveSplit(None)).unwrap();
    assert_eq!(pm.marking, vec![Poly::zero(1), Poly::one(1)]);

    let pt = Chart::numbered("pt", "x", 0);
    let line = MarkedLieData::new(LieData::abelian(&pt, vec![vec![]]).unwrap(), vec![Poly::one(0)], 2).unwrap();
    let (q, _) = quotient_by_marking(&line).unwrap();
    assert_eq!(q.rank, 0);

    let a = twisted_extension(&x, &[(0, 1, "1")]);
    assert!(MarkedLieData::new(a.clone(), a.basis(0), 0).is_err());
}

#[test]
fn baer_combinations() {
    let x = Chart::numbered("R2", "x", 2);
    let b = LieData::tangent(&x);
    let a = twisted_extension(&x, &[(0, 1, "x1")]);
    let e = OExtensionData::from_marked(MarkedLieData::new(a.clone(), a.basis(2), 0).unwrap()).unwrap();
    let one = baer_combination(&[e.clone()], &[rat(1)]).unwrap();
    assert!(one.extension.marked.base.same_structure(&a));

    let diff = baer_combination(&[e.clone(), e.clone()], &[rat(1), rat(-1)]).unwrap();
    assert!(diff.extension.marked.base.same_structure(&MarkedLieData::trivial(&b, 0).base));

    let triv = OExtensionData::from_marked(MarkedLieData::trivial(&b, 0)).unwrap();
    let keep = baer_combination(&[e.clone(), triv], &[rat(1), rat(0)]).unwrap();
    assert!(keep.extension.marked.base.same_structure(&a));

    let twice = baer_combination(&[e.clone(), e], &[rat(1), rat(1)]).unwrap();
    assert_eq!(twice.extension.marked.base.structure[0][1][2], p(&x, "2*x1"));
}

#[test]
fn extension_pullback_is_linear() {
    let y = Chart::numbered("R", "t", 1);
    let x = Chart::numbered("R2", "x", 2);
    let f = map(&y, &x, &["t1", "t1^2"]);
    let mk = |w: &str| {
        let a = twisted_extension(&x, &[(0, 1, w)]);
        OExtensionData::from_marked(MarkedLieData::new(a.clone(), a.basis(2), 0).unwrap()).unwrap()
    };
    let (e1, e2) = (mk("x1"), mk("1 + x2"));
    for (l1, l2) in [(1, 0), (2, 3), (1, -1)] {
        let rep = check_extension_pullback_linear(&f, &e1, &e2, rat(l1), rat(l2)).unwrap();
        assert!(rep.all_passed(), "{:?}", rep.failed_names());
    }
    let t = OExtensionData::from_marked(MarkedLieData::trivial(&LieData::tangent(&x), 0)).unwrap();
    assert!(check_extension_pullback_linear(&f, &t, &t, rat(1), rat(1)).unwrap().all_passed());
}
