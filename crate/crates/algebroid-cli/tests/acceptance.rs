//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use algebroid::courant::{
    check_courant, check_courant_morphism, check_dirac, connection_shift, curvature, dotplus, linear_combination,
    opposite, standard_exact, twist, Connection, CourantExtension, DiracData,
};
use algebroid::descent::{check_cocycle, CoverData, DescentDatum};
use algebroid::linalg::{det, identity, mat_vec, vec_add};
use algebroid::lie_algebroid::{
    c_plus, check_c_plus_assoc, check_c_plus_morphism, check_extension_pullback_linear, f_plus, f_plus_marked, LieMode,
    MarkedLieData, OExtensionData,
};
use algebroid::pullback::{check_curvature_pullback, check_dirac_correspondence, check_twist_commute, CourantMode};
use algebroid::report::Report;
use algebroid::sample::Sampler;
use algebroid::symcalc::{parse_form, parse_poly};
use algebroid::transgression::{check_bracket_table, check_tau_linear, cour, tau};
use algebroid::{Chart, ChartMap, CourantData, KForm, LieData, Poly, Rat, VField};

type Outcome = Result<String, String>;

fn form(chart: &Chart, s: &str, k: usize) -> KForm {
    parse_form(s, chart, k).unwrap()
}

fn map(src: &Chart, tgt: &Chart, comps: &[&str]) -> ChartMap {
    ChartMap::new(src, tgt, comps.iter().map(|c| parse_poly(c, src).unwrap()).collect()).unwrap()
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

fn std_h(chart: &Chart, h: &str) -> CourantData {
    let h = if h == "0" { KForm::zero(chart, 3) } else { form(chart, h, 3) };
    standard_exact(chart, &h).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(rep: &Report, what: &str) -> Result<(), String> {
    ensure(rep.all_passed(), || format!("{what}: failed {:?}", rep.failed_names()))
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let t = Instant::now();
    let out = f();
    let dt = t.elapsed();
    ensure(dt <= limit, || format!("{what} took {dt:?}, limit {limit:?}"))?;
    Ok(out)
}

// T ⊕ O on `chart` with [∂_i, ∂_j] = ω_ij·e
fn extension(chart: &Chart, omega: &[(usize, usize, &str)]) -> LieData {
    let n = chart.dim();
    let r = n + 1;
    let mut anchor: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| Poly::from_i64(n, (i == j) as i64)).collect()).collect();
    anchor.push(vec![Poly::zero(n); n]);
    let mut st = vec![vec![vec![Poly::zero(n); r]; r]; r];
    for &(i, j, w) in omega {
        st[i][j][n] = parse_poly(w, chart).unwrap();
        st[j][i][n] = -parse_poly(w, chart).unwrap();
    }
    LieData::new(chart, anchor, st).unwrap()
}

fn axiom_suite() -> Outcome {
    let limit = Duration::from_secs(10);
    let mut count = 0;
    for n in 1..=3 {
        let x = Chart::numbered(format!("R{n}"), "x", n);
        // 3-forms vanish below dimension 3
        let hs: &[&str] = if n == 3 { &["0", "dx1^dx2^dx3", "x1*dx1^dx2^dx3 + x2*dx1^dx2^dx3"] } else { &["0"] };
        for h in hs {
            let q = std_h(&x, h);
            let rep = timed(limit, &format!("std(R{n}, {h})"), || check_courant(&q, 100, 0))?;
            passed(&rep, &format!("std(R{n}, {h})"))?;
            count += 1;
        }
    }
    let x = Chart::numbered("R4", "x", 4);
    let h = form(&x, "x1*dx2^dx3^dx4", 3);
    ensure(!h.d().is_zero(), || "test form is closed".into())?;
    let q = twist(&std_h(&x, "0"), &h).unwrap();
    let rep = timed(limit, "non-closed twist", || check_courant(&q, 100, 0))?;
    ensure(rep.failed_names() == ["leibniz_identity"], || format!("non-closed H failed {:?}", rep.failed_names()))?;
    Ok(format!("{count} standard models pass; dH ≠ 0 on R4 fails only leibniz_identity"))
}

fn tau_models() -> Vec<(String, CourantData)> {
    let r1 = Chart::numbered("R1", "x", 1);
    let r2 = Chart::numbered("R2", "x", 2);
    let r3 = Chart::numbered("R3", "x", 3);
    let e = |q: &CourantData| CourantExtension::exact(q).unwrap();
    let q3h = std_h(&r3, "dx1^dx2^dx3");
    let q3x = std_h(&r3, "x1*dx1^dx2^dx3");
    vec![
        ("std(R1)".into(), std_h(&r1, "0")),
        ("std(R2)".into(), std_h(&r2, "0")),
        ("std(R3, dx123)".into(), q3h.clone()),
        ("twist(std(R3), x1·dx123 + x3·dx123)".into(), twist(&std_h(&r3, "0"), &form(&r3, "x1*dx1^dx2^dx3 + x3*dx1^dx2^dx3", 3)).unwrap()),
        ("opposite(std(R3, dx123))".into(), opposite(&q3h)),
        ("std(R3, dx123) ∔ std(R3, x1·dx123)".into(), dotplus(&q3h, &q3x).unwrap().courant().clone()),
        ("2·std(R2) ∔ −1·std(R2)".into(), linear_combination(&[e(&std_h(&r2, "0")), e(&std_h(&r2, "0"))], &[rat(2), rat(-1)]).unwrap().courant().clone()),
    ]
}

fn transgression_round_trip() -> Outcome {
    let models = tau_models();
    for (name, q) in &models {
        let back = timed(Duration::from_secs(5), name, || tau(q).and_then(|m| cour(&m)))?.map_err(|e| format!("{name}: {e}"))?;
        ensure(back.same_structure(q), || format!("{name}: cour(tau(Q)) differs"))?;
    }
    Ok(format!("{} models reproduced exactly", models.len()))
}

fn bracket_table() -> Outcome {
    let models = tau_models();
    for (name, q) in &models {
        let m = tau(q).map_err(|e| e.to_string())?;
        let rep = check_bracket_table(&m).map_err(|e| format!("{name}: {e}"))?;
        passed(&rep, name)?;
        ensure(rep.passed("rule1_marking_central"), || format!("{name}: marking not central"))?;
    }
    Ok(format!("six rules and antisymmetry on {} models", models.len()))
}

fn twist_commutation() -> Outcome {
    let y = Chart::numbered("R3", "y", 3);
    let s = Chart::numbered("R2", "y", 2);
    let x = Chart::numbered("R3", "x", 3);
    let cases = [
        (map(&y, &x, &["y1", "y2", "y3 + y1*y2"]), "dx1^dx2^dx3"),
        (map(&y, &x, &["y1 + y2^2", "y2", "y3"]), "x1*dx1^dx2^dx3"),
        (map(&s, &x, &["y1", "y2", "y1*y2"]), "x3*dx1^dx2^dx3 + dx1^dx2^dx3"),
    ];
    let mut nonzero = 0;
    for (f, h) in &cases {
        let h = form(&x, h, 3);
        if !f.pullback_form(&h).unwrap().is_zero() {
            nonzero += 1;
        }
        let rep = timed(Duration::from_secs(30), "twist commutation", || {
            check_twist_commute(f, &std_h(&x, "0"), &h, CourantMode::ExactSplit(None))
        })?
        .map_err(|e| e.to_string())?;
        passed(&rep, &format!("f = {:?}", f.comps))?;
    }
    ensure(nonzero > 0, || "no case with f*H ≠ 0".into())?;
    Ok(format!("{} pairs, {nonzero} with f*H ≠ 0", cases.len()))
}

fn curvature_suite() -> Outcome {
    let x = Chart::numbered("R3", "x", 3);
    let h = form(&x, "x1*dx1^dx2^dx3 + x2*dx1^dx2^dx3", 3);
    let q = standard_exact(&x, &h).unwrap();
    let nabla = Connection::from_splitting(&q).map_err(|e| e.to_string())?;
    let c = curvature(&q, &nabla).map_err(|e| e.to_string())?;
    ensure(c == h, || "curvature of the coordinate connection is not H".into())?;
    let mut smp = Sampler::new(0);
    for t in 0..20 {
        let b: KForm = smp.form(&x, 2);
        let shifted = connection_shift(&q, &nabla, &b).map_err(|e| e.to_string())?;
        let lhs = curvature(&q, &shifted).map_err(|e| e.to_string())?;
        ensure(lhs == h.add(&b.d()).unwrap(), || format!("torsor law fails on sample {t}"))?;
    }
    let y3 = Chart::numbered("R3", "y", 3);
    let y2 = Chart::numbered("R2", "y", 2);
    let y1 = Chart::numbered("R1", "t", 1);
    let maps = [
        map(&y3, &x, &["y1 + y2^2", "y2", "y3 + y1*y2"]),
        map(&y2, &x, &["y1", "y2", "y1*y2"]),
        map(&y1, &x, &["t1", "t1^2", "t1^3"]),
    ];
    for f in &maps {
        for conn in [nabla.clone(), connection_shift(&q, &nabla, &form(&x, "x3*dx1^dx2", 2)).unwrap()] {
            let rep = check_curvature_pullback(f, &q, &conn, CourantMode::ExactSplit(None)).map_err(|e| e.to_string())?;
            passed(&rep, &format!("curvature pullback along {:?}", f.comps))?;
        }
    }
    Ok(format!("c(∇) = H, 20 torsor samples, {} nonlinear maps", maps.len()))
}

fn composition_coherence() -> Outcome {
    let r1 = Chart::numbered("R", "t", 1);
    let r2 = Chart::numbered("R2", "u", 2);
    let r3 = Chart::numbered("R3", "v", 3);
    let r4 = Chart::numbered("R4", "x", 4);
    let phi = map(&r3, &r4, &["v1", "v2", "v3", "v1*v2 + v3"]);
    let psi = map(&r2, &r3, &["u1", "u2", "u1*u2"]);
    let xi = map(&r1, &r2, &["t1", "t1^2"]);
    let det_mode = |f: &ChartMap| LieMode::detect(f);
    for (name, a) in [("T", LieData::tangent(&r4)), ("T⊕O", extension(&r4, &[]))] {
        let rep = check_c_plus_assoc(&phi, &psi, &xi, &a, 50, 0).map_err(|e| e.to_string())?;
        passed(&rep, &format!("associativity for {name}"))?;
        let p1 = f_plus(&phi, &a, det_mode(&phi)).map_err(|e| e.to_string())?;
        let p2 = f_plus(&psi, &p1.result, det_mode(&psi)).map_err(|e| e.to_string())?;
        let comp = phi.compose(&psi).unwrap();
        let q = f_plus(&comp, &a, det_mode(&comp)).map_err(|e| e.to_string())?;
        let c = c_plus(&p1, &p2, &q).map_err(|e| e.to_string())?;
        passed(&check_c_plus_morphism(&p2.result, &q.result, &c, 50, 0), &format!("c⁺ for {name}"))?;
    }
    // the marking of T⊕O is carried to the marking
    let a = extension(&r4, &[]);
    let m = MarkedLieData::new(a.clone(), a.basis(4), 0).map_err(|e| e.to_string())?;
    let (m1, p1) = f_plus_marked(&phi, &m, det_mode(&phi)).map_err(|e| e.to_string())?;
    let (m2, p2) = f_plus_marked(&psi, &m1, det_mode(&psi)).map_err(|e| e.to_string())?;
    let comp = phi.compose(&psi).unwrap();
    let (mq, q) = f_plus_marked(&comp, &m, det_mode(&comp)).map_err(|e| e.to_string())?;
    let c = c_plus(&p1, &p2, &q).map_err(|e| e.to_string())?;
    ensure(mat_vec(2, &c, &m2.marking) == mq.marking, || "c⁺ does not preserve the marking".into())?;
    Ok("associativity and c⁺ morphism checks on 50 sections for T and T⊕O; marking preserved".into())
}

fn graph_generators(q: &CourantData, b: &KForm) -> Vec<Vec<Poly>> {
    let x = &q.chart;
    (0..x.dim())
        .map(|i| vec_add(&q.basis(i), &q.coanchor_form(&b.iota(&VField::coord(x, i)).unwrap())))
        .collect()
}

fn dirac_suite() -> Outcome {
    let x = Chart::numbered("R3", "x", 3);
    let q = std_h(&x, "0");
    let closed = DiracData { support: vec![], generators: graph_generators(&q, &form(&x, "x1*dx2^dx3 + x2*dx1^dx3", 2)) };
    ensure(form(&x, "x1*dx2^dx3 + x2*dx1^dx3", 2).d().is_zero(), || "test form is not closed".into())?;
    passed(&check_dirac(&q, &closed).map_err(|e| e.to_string())?, "graph of closed B")?;
    let b = form(&x, "x3*dx1^dx2", 2);
    let rep = check_dirac(&q, &DiracData { support: vec![], generators: graph_generators(&q, &b) }).map_err(|e| e.to_string())?;
    ensure(rep.failed_names() == ["bracket_closure"], || format!("non-closed B failed {:?}", rep.failed_names()))?;
    // defect ι_{∂3} ι_{∂2} ι_{∂1} dB computed from the form
    let db = b.d();
    let defect = (0..3).fold(db, |w, i| w.iota(&VField::coord(&x, i)).unwrap()).as_function();
    let expected = format!("⟨{{k1,k2}}, k3⟩ = {}", algebroid::symcalc::print_poly(&defect, &x));
    let got = rep.get("bracket_closure").and_then(|c| c.counterexample.clone()).unwrap_or_default();
    ensure(got == expected, || format!("defect {got:?}, expected {expected:?}"))?;

    let z1 = Chart::numbered("R1", "x", 1);
    let x2 = Chart::numbered("R2", "x", 2);
    let z2 = Chart::numbered("R2", "x", 2);
    let o = |n: usize, v: i64| Poly::from_i64(n, v);
    let xv = |s: &str| parse_poly(s, &z2).unwrap();
    let cases = [
        (
            map(&z1, &x2, &["x1", "0"]),
            std_h(&x2, "0"),
            DiracData { support: vec![1], generators: vec![vec![o(1, 1), o(1, 0), o(1, 0), o(1, 0)], vec![o(1, 0), o(1, 0), o(1, 0), o(1, 1)]] },
        ),
        (ChartMap::identity(&x2), std_h(&x2, "0"), DiracData { support: vec![], generators: vec![std_h(&x2, "0").basis(2), std_h(&x2, "0").basis(3)] }),
        (
            map(&z2, &x, &["x1", "x2", "0"]),
            q.clone(),
            DiracData {
                support: vec![2],
                generators: vec![
                    vec![o(2, 1), o(2, 0), o(2, 0), o(2, 0), xv("x1"), o(2, 0)],
                    vec![o(2, 0), o(2, 1), o(2, 0), xv("-x1"), o(2, 0), o(2, 0)],
                    vec![o(2, 0), o(2, 0), o(2, 0), o(2, 0), o(2, 0), o(2, 1)],
                ],
            },
        ),
    ];
    for (k, (i, qq, d)) in cases.iter().enumerate() {
        let rep = check_dirac_correspondence(i, qq, d).map_err(|e| format!("case {}: {e}", k + 1))?;
        passed(&rep, &format!("i⁺⁺ case {}", k + 1))?;
        ensure(rep.passed("round_trip"), || format!("case {}: round trip", k + 1))?;
    }
    Ok(format!("closed B passes, non-closed B fails with defect ιιι dB = {}, {} i⁺⁺ round trips", algebroid::symcalc::print_poly(&defect, &x), cases.len()))
}

fn extension_linear_algebra() -> Outcome {
    let x = Chart::numbered("R3", "x", 3);
    let h1 = form(&x, "dx1^dx2^dx3", 3);
    let h2 = form(&x, "x2*dx1^dx2^dx3", 3);
    let e1 = CourantExtension::exact(&standard_exact(&x, &h1).unwrap()).map_err(|e| e.to_string())?;
    let e2 = CourantExtension::exact(&standard_exact(&x, &h2).unwrap()).map_err(|e| e.to_string())?;
    let sum = linear_combination(&[e1.clone(), e2.clone()], &[rat(1), rat(1)]).map_err(|e| e.to_string())?;
    let target = standard_exact(&x, &h1.add(&h2).unwrap()).unwrap();
    // the isomorphism sends the push-out basis to ∂_i, dx_i
    let iso = identity(3, 6);
    passed(&check_courant_morphism(sum.courant(), &target, &iso), "1·std(H) ∔ 1·std(H′) → std(H+H′)")?;
    let d = det(3, &iso);
    ensure(d.is_constant() && !d.is_zero(), || "not invertible".into())?;
    // compatible with the projections to T_X
    ensure(sum.courant().anchor == target.anchor, || "anchors differ".into())?;
    passed(&check_tau_linear(&e1, &e2, rat(1), rat(1)).map_err(|e| e.to_string())?, "τ-linearity")?;

    let y = Chart::numbered("R", "t", 1);
    let x2 = Chart::numbered("R2", "x", 2);
    let f = map(&y, &x2, &["t1", "t1^2"]);
    let mk = |w: &str| {
        let a = extension(&x2, &[(0, 1, w)]);
        OExtensionData::from_marked(MarkedLieData::new(a.clone(), a.basis(2), 0).unwrap()).unwrap()
    };
    let (a1, a2) = (mk("x1"), mk("1 + x2"));
    for (l1, l2) in [(1, 1), (2, -3)] {
        let rep = check_extension_pullback_linear(&f, &a1, &a2, rat(l1), rat(l2)).map_err(|e| e.to_string())?;
        passed(&rep, "Lie-side pullback linearity")?;
    }
    Ok("std(H) ∔ std(H′) ≅ std(H+H′), τ-linear, f⁺ linear on extensions of T_R2".into())
}

fn descent_suite() -> Outcome {
    let x = Chart::numbered("R2", "x", 2);
    let v = Chart::numbered("V", "y", 2);
    let phi = map(&v, &x, &["y1 + y2^2", "y2"]);
    let cover = CoverData::new(
        x.clone(),
        vec![ChartMap::identity(&x), phi.clone()],
        vec![algebroid::descent::Overlap { i: 0, j: 1, to_i: phi.clone(), to_j: ChartMap::identity(&v) }],
        vec![],
    )
    .map_err(|e| e.to_string())?;
    let lie = DescentDatum::restrict_global(cover.clone(), &extension(&x, &[(0, 1, "x1")])).map_err(|e| e.to_string())?;
    passed(&check_cocycle(&lie).map_err(|e| e.to_string())?, "restricted Lie datum")?;
    let q = std_h(&x, "0");
    let cd = DescentDatum::restrict_global(CoverData::trivial(&x, 3), &q).map_err(|e| e.to_string())?;
    passed(&check_cocycle(&cd).map_err(|e| e.to_string())?, "restricted Courant datum")?;

    // B-field gluing with one perturbed entry
    let p = |s: &str| parse_poly(s, &x).unwrap();
    let eb = |s: i64| -> Vec<Vec<Poly>> {
        let mut m = identity(2, 4);
        m[2][1] = p(&format!("{}*x1", -s));
        m[3][0] = p(&format!("{s}*x1"));
        m
    };
    let good = DescentDatum::new(CoverData::trivial(&x, 2), vec![q.clone(), q.clone()], vec![identity(2, 4), eb(1), eb(-1), identity(2, 4)]).unwrap();
    passed(&check_cocycle(&good).map_err(|e| e.to_string())?, "B-field gluing")?;
    let mut off = eb(-1);
    off[3][0] = p("-2*x1");
    let bad = DescentDatum::new(CoverData::trivial(&x, 2), vec![q.clone(), q], vec![identity(2, 4), eb(1), off, identity(2, 4)]).unwrap();
    let rep = check_cocycle(&bad).map_err(|e| e.to_string())?;
    let msg = rep.get("cocycle").and_then(|c| c.counterexample.clone()).unwrap_or_default();
    ensure(!rep.passed("cocycle") && msg.contains("triple (1,2,1)"), || format!("perturbation not caught: {msg:?}"))?;
    Ok(format!("global data pass; perturbation reported as \"{msg}\""))
}

fn jobs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("jobs")
}

fn run_all(out: &Path) -> Result<Vec<(String, i32, Vec<u8>)>, String> {
    let mut jobs: Vec<PathBuf> = std::fs::read_dir(jobs_dir())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    jobs.sort();
    let mut res = Vec::new();
    for job in jobs {
        let name = job.file_name().unwrap().to_string_lossy().to_string();
        let report = out.join(&name);
        let status = Command::new(env!("CARGO_BIN_EXE_algebroid"))
            .args(["--spec".as_ref(), job.as_os_str(), "--out".as_ref(), report.as_os_str(), "--seed".as_ref(), "0".as_ref()])
            .output()
            .map_err(|e| e.to_string())?
            .status;
        let bytes = std::fs::read(&report).map_err(|e| format!("{name}: {e}"))?;
        res.push((name, status.code().unwrap_or(-1), bytes));
    }
    Ok(res)
}

fn determinism(started: Instant) -> Outcome {
    let base = std::env::temp_dir().join(format!("algebroid-acceptance-{}", std::process::id()));
    let (a, b) = (base.join("a"), base.join("b"));
    for d in [&a, &b] {
        std::fs::create_dir_all(d).map_err(|e| e.to_string())?;
    }
    let first = run_all(&a)?;
    let second = run_all(&b)?;
    let _ = std::fs::remove_dir_all(&base);
    ensure(first == second, || "reports differ between runs".into())?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("suite took {elapsed:?}"))?;
    Ok(format!("{} CLI reports byte-identical across two runs; suite {:.1} s", first.len(), elapsed.as_secs_f64()))
}

fn main() {
    let started = Instant::now();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("axiom suite", Box::new(axiom_suite)),
        ("transgression round trip", Box::new(transgression_round_trip)),
        ("bracket-table conformance", Box::new(bracket_table)),
        ("twist commutation", Box::new(twist_commutation)),
        ("curvature", Box::new(curvature_suite)),
        ("composition coherence", Box::new(composition_coherence)),
        ("Dirac structures", Box::new(dirac_suite)),
        ("extension linear algebra", Box::new(extension_linear_algebra)),
        ("descent", Box::new(descent_suite)),
        ("determinism", Box::new(move || determinism(started))),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({dt:.2} s)", k + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {msg} ({dt:.2} s)", k + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
