//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach the output.

#[path = "support/jets.rs"]
mod jets;

use frontal_core::document::{parse_polynomial, GermDocument};
use frontal_core::frontal::{frontality, is_front, FrontalStatus};
use frontal_core::gallery::{
    curve_of_type, expected_class, folded_pleat, normal_form, random_a_perturbation, tangent_surface, CurveType,
    CATALOG,
};
use frontal_core::germs::JetMap;
use frontal_core::jetcalc::{q, Jet};
use frontal_core::openings::{is_versal_opening, ramification_jets};
use frontal_core::recognize::{recognize, RecognizeOptions, SingularityClass};
use proptest::test_runner::{Config, TestError, TestRunner};

const N: u32 = 12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn classify(f: &JetMap) -> Result<SingularityClass, String> {
    recognize(f, &RecognizeOptions::default())
        .map(|r| r.class)
        .map_err(|e| e.to_string())
}

fn nf(tag: &str, order: u32) -> JetMap {
    let (_, m) = CATALOG.iter().find(|(t, _)| *t == tag).expect("catalog tag");
    normal_form(tag, *m, order).expect("normal form")
}

fn catalog() -> Outcome {
    let mut forms: Vec<(String, JetMap, SingularityClass)> = CATALOG
        .iter()
        .map(|&(tag, _)| (tag.to_string(), nf(tag, N), expected_class(tag).unwrap()))
        .collect();
    forms.push(("FP c=1".into(), folded_pleat(&q(1, 1), N).unwrap(), SingularityClass::FoldedPleatClass));
    let mut bad = Vec::new();
    for (tag, f, want) in &forms {
        match classify(f) {
            Ok(c) if c == *want => {}
            other => bad.push(format!("{tag}: {other:?}")),
        }
    }
    if bad.is_empty() {
        Ok(format!("{} normal forms classify to their own class", forms.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn perturbations() -> Outcome {
    const SEEDS: u64 = 50;
    let mut bad = Vec::new();
    for &(tag, _) in CATALOG {
        let f = nf(tag, N);
        let want = expected_class(tag).unwrap();
        for seed in 0..SEEDS {
            let g = random_a_perturbation(&f, seed, 4).unwrap();
            match classify(&g) {
                Ok(c) if c == want => {}
                other => bad.push(format!("{tag} seed {seed}: {other:?}")),
            }
        }
    }
    let total = CATALOG.len() as u64 * SEEDS;
    if bad.is_empty() {
        Ok(format!("{total}/{total} perturbations of degree 4 agree"))
    } else {
        Err(format!("{} of {total} disagree: {}", bad.len(), bad.join("; ")))
    }
}

fn tangent_surfaces() -> Outcome {
    use SingularityClass::*;
    let table: &[(&[u32], SingularityClass)] = &[
        (&[1, 2, 3], CuspidalEdge),
        (&[1, 2, 4], FoldedUmbrella),
        (&[2, 3, 4], Swallowtail),
        (&[1, 3, 4], Mond),
        (&[1, 3, 5], Shcherbak),
        (&[3, 4, 5], CuspidalSwallowtail),
        (&[1, 2, 4, 5], OpenFoldedUmbrella),
        (&[2, 3, 4, 5], OpenSwallowtail),
        (&[1, 3, 4, 5], OpenMond),
    ];
    let mut bad = Vec::new();
    let mut count = 0;
    for (ty, want) in table {
        let base = CurveType::new(ty).unwrap();
        let curves = std::iter::once(base.clone()).chain((1..=10u64).map(|s| base.clone().randomized(s, 9)));
        for (i, ct) in curves.enumerate() {
            count += 1;
            let f = tangent_surface(&curve_of_type(&ct, N), N).unwrap();
            match classify(&f) {
                Ok(c) if c == *want => {}
                other => bad.push(format!("{ty:?} #{i}: {other:?}")),
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{count} tangent surfaces over 9 types"))
    } else {
        Err(bad.join("; "))
    }
}

fn mond_example() -> Outcome {
    let doc = GermDocument::new(&["u", "t"], &["t + u", "t^3 + 3*t^2*u", "t^4 + 4*t^3*u"]);
    let f = doc.to_germ(None, None).map_err(|e| e.to_string())?;
    let p = |s: &str| parse_polynomial(s, &doc.vars).unwrap().with_order(N);
    let fd = frontality(&f).map_err(|e| e.to_string())?;
    let minors: Vec<&Jet> = fd.minors.iter().map(|(_, d)| d).collect();
    let want_minors = [p("6*t*u"), p("12*t^2*u"), p("12*t^4*u")];
    if minors.iter().zip(&want_minors).any(|(a, b)| *a != b) {
        return Err(format!("minors {minors:?}"));
    }
    let lambda = fd.lambda().map_err(|e| e.to_string())?;
    if *lambda != p("6*t*u") {
        return Err(format!("lambda = {lambda}"));
    }
    let reduced = lambda.scale(&q(1, 6));
    if reduced != p("t*u") {
        return Err(format!("singular locus {reduced} = 0"));
    }
    let h: Vec<&Jet> = fd.pluecker.values().collect();
    let want_h = [p("1"), p("2*t"), p("2*t^3")];
    if h.len() != 3 || h.iter().zip(&want_h).any(|(a, b)| *a != b) {
        return Err(format!("Plücker coefficients {h:?}"));
    }
    Ok("minors 6tu, 12t²u, 12t⁴u; λ = 6·tu; h = (1, 2t, 2t³); locus tu = 0".into())
}

fn cone() -> Outcome {
    let doc = GermDocument::new(&["t1", "t2", "t3"], &["t1^3", "t1^2*t2", "t1*t2^2", "t2^3"]);
    let f = doc.to_germ(None, None).map_err(|e| e.to_string())?;
    let fd = frontality(&f).map_err(|e| e.to_string())?;
    if fd.status != FrontalStatus::DegenerateJacobiIdeal {
        return Err(format!("status {}", fd.status));
    }
    match recognize(&f, &RecognizeOptions::default()) {
        Err(e) => Ok(format!("DegenerateJacobiIdeal, recognition refused ({e})")),
        Ok(r) => Err(format!("recognition returned {}", r.class)),
    }
}

fn ramification() -> Outcome {
    let g = nf("cusp", N);
    let r = ramification_jets(&g.with_order(10), 10).map_err(|e| e.to_string())?;
    let vars = ["t1".to_string(), "t2".to_string()];
    let p = |s: &str| parse_polynomial(s, &vars).unwrap().with_order(10);
    let (u1, u2, t2) = (p("3/4*t2^4 + 1/2*t1*t2^2"), p("3/5*t2^5 + 1/3*t1*t2^3"), p("t2"));
    if !r.contains_jet(&u1) || !r.contains_jet(&u2) || r.contains_jet(&t2) {
        return Err(format!(
            "U1 in: {}, U2 in: {}, t2 in: {}",
            r.contains_jet(&u1),
            r.contains_jet(&u2),
            r.contains_jet(&t2)
        ));
    }
    let osw = is_versal_opening(&nf("OSW", N), &g, N).map_err(|e| e.to_string())?;
    let sw = is_versal_opening(&nf("SW", N), &g, N).map_err(|e| e.to_string())?;
    if !osw.versal || sw.versal || osw.order < 8 || sw.order < 8 {
        return Err(format!("OSW {osw:?}, SW {sw:?}"));
    }
    Ok(format!("U1, U2 in R_g, t2 not; OSW versal, SW not (N' = {})", osw.order))
}

fn front_split() -> Outcome {
    let cases = [
        ("CE", true),
        ("SW", true),
        ("MD", true),
        ("CL", true),
        ("FU", false),
        ("OFU", false),
        ("OSW", false),
        ("OMD", false),
        ("SB", false),
    ];
    let mut bad = Vec::new();
    for (tag, want) in cases {
        let f = nf(tag, N);
        let got = frontality(&f)
            .and_then(|fd| is_front(&f, &fd))
            .map_err(|e| e.to_string());
        if got != Ok(want) {
            bad.push(format!("{tag}: expected {want}, got {got:?}"));
        }
    }
    if bad.is_empty() {
        Ok("fronts CE SW MD CL; non-fronts FU OFU OSW OMD SB".into())
    } else {
        Err(bad.join("; "))
    }
}

fn truncation() -> Outcome {
    const LOW: u32 = 5;
    let mut bad = Vec::new();
    let (mut right, mut inconclusive) = (0, 0);
    for &(tag, _) in CATALOG {
        let want = expected_class(tag).unwrap();
        match classify(&nf(tag, LOW)) {
            Ok(c) if c == want => right += 1,
            Ok(SingularityClass::Inconclusive { .. }) => inconclusive += 1,
            other => bad.push(format!("{tag}: {other:?}")),
        }
    }
    if bad.is_empty() {
        Ok(format!("at N = {LOW}: {right} correct, {inconclusive} inconclusive, 0 wrong"))
    } else {
        Err(bad.join("; "))
    }
}

fn report<T: std::fmt::Debug>(name: &str, r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

fn properties() -> Outcome {
    let cases = 1000;
    let runner = || {
        TestRunner::new(Config {
            failure_persistence: None,
            ..Config::with_cases(cases)
        })
    };
    let j = || jets::jet(2, 0);
    report("ring", runner().run(&(j(), j(), j()), |(a, b, c)| jets::ring_axioms(&a, &b, &c)))?;
    report("compose/invert", runner().run(&jets::diffeo(), |s| jets::compose_invert(&s)))?;
    report("divide/mul", runner().run(&(j(), j()), |(a, d)| jets::divide_mul(&a, &d)))?;
    report("Leibniz", runner().run(&(j(), j(), 0usize..2), |(a, b, i)| jets::leibniz(&a, &b, i)))?;
    Ok(format!("4 properties x {cases} cases"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("normal-form catalog", catalog),
        ("perturbation invariance", perturbations),
        ("tangent-surface table", tangent_surfaces),
        ("Mond surface", mond_example),
        ("cone is not a frontal", cone),
        ("ramification and versality", ramification),
        ("front/non-front split", front_split),
        ("truncation honesty", truncation),
        ("jet-engine properties", properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
