//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//! Run with `cargo test -p flaglab-core --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use flaglab::constructions::{barycentric_subdivision, builtin, cross_polytope_boundary, stacked_cross_polytopal_sphere, walkup_sample};
use flaglab::field::PrimeField;
use flaglab::flags::{binomial, box_degrees, classical_vectors, flag_h};
use flaglab::graded::{dual_wlp_test, random_lsop, wlp_test, GradedModule};
use flaglab::verify::*;
use flaglab::{Complex, FieldSpec, Grading, Grouping};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn entry(name: &str) -> Instance {
    use CorpusEntry::*;
    let e = match name {
        "cp3" => CrossPolytope { d: 3 },
        "cp4" => CrossPolytope { d: 4 },
        "st33" => Stacked { d: 3, n: 3, seed: 0 },
        "st42" => Stacked { d: 4, n: 2, seed: 0 },
        "sd-tet" => Barycentric { of: Box::new(Builtin { name: "simplex_boundary:3".into() }) },
        "sd-torus" => Barycentric { of: Box::new(Builtin { name: "torus_7".into() }) },
        "sd-rp2" => Barycentric { of: Box::new(Builtin { name: "rp2_6".into() }) },
        "two-oct" => DisjointUnion { left: Box::new(CrossPolytope { d: 3 }), right: Box::new(CrossPolytope { d: 3 }) },
        "handle4" => Walkup { d: 4, sums: 2, handles: 1, seed: WALKUP4_SEED },
        "ball4" => MinusFacet { of: Box::new(CrossPolytope { d: 4 }) },
        other => panic!("unknown fixture {other}"),
    };
    e.build().expect("fixture builds")
}

/// `h_k = Σ_i (−1)^{k−i} C(d−i, k−i) f_{i−1}` straight from the f-vector.
fn h_from_f(c: &Complex) -> Vec<i64> {
    let f = c.f_vector();
    let d = f.len() - 1;
    (0..=d)
        .map(|k| {
            (0..=k)
                .map(|i| {
                    let s = if (k - i) % 2 == 0 { 1 } else { -1 };
                    s * binomial(d - i, k - i).unwrap() * f[i] as i64
                })
                .sum()
        })
        .collect()
}

fn expect_status(r: &VerificationReport, want: Status) -> Result<(), String> {
    if r.status == want {
        Ok(())
    } else {
        Err(format!(
            "{} on {} over {}: {} (wanted {want}); witness {:?}, note {:?}",
            r.theorem_id, r.instance.name, r.instance.field, r.status, r.witness, r.note
        ))
    }
}

fn computed_rows(r: &VerificationReport) -> Vec<Value> {
    r.numbers["modules"].as_array().cloned().unwrap_or_default().into_iter().filter(|m| m.get("skipped").is_none()).collect()
}

fn c1_cross_polytopes() -> Outcome {
    for d in 2..=6 {
        let (c, col) = cross_polytope_boundary(d);
        let g = Grading::new(&c, &col, &Grouping::identity(d)).map_err(|e| e.to_string())?;
        let h = flag_h(&c, &g).map_err(|e| e.to_string())?;
        ensure!(h.entries().count() == 1 << d, "d = {d}: table has {} entries", h.entries().count());
        if let Some((b, v)) = h.entries().find(|(_, v)| *v != 1) {
            return Err(format!("d = {d}: flag h at {b:?} is {v}"));
        }
        let expected: Vec<i64> = (0..=d).map(|i| binomial(d, i).unwrap()).collect();
        ensure!(h_from_f(&c) == expected, "d = {d}: f-vector oracle gives {:?}", h_from_f(&c));
        let cv = classical_vectors(&c, FieldSpec::Q).map_err(|e| e.to_string())?;
        ensure!(cv.h == expected, "d = {d}: classical h {:?}", cv.h);
    }
    Ok("d = 2..6 all-ones flag tables, classical h = binomials".into())
}

fn c2_stanley() -> Outcome {
    let mut n = 0;
    for name in ["cp3", "cp4", "st33", "sd-tet", "sd-torus"] {
        let inst = entry(name);
        let d = inst.d();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut groupings = vec![Grouping::identity(d)];
        for m in [2, d - 1] {
            groupings.push(Grouping::random(d, m, &mut rng));
        }
        let r = check_stanley_series(&inst, &groupings, d + 4, FieldSpec::Q, 7);
        expect_status(&r, Status::Verified)?;
        let rows = r.numbers["gradings"].as_array().unwrap();
        ensure!(rows.len() == 3, "{name}: only {} gradings compared", rows.len());
        n += rows.len();
    }
    Ok(format!("{n} (instance, grouping) series agree up to total degree d+4"))
}

const GRADED_CORPUS: [&str; 6] = ["cp3", "cp4", "st42", "two-oct", "sd-torus", "sd-rp2"];

fn graded_criterion(hdprime: bool) -> Outcome {
    let opts = CheckOptions { n_lsops: 3, seed: 11, ..CheckOptions::default() };
    let mut compared = 0;
    for name in GRADED_CORPUS {
        let inst = entry(name);
        for field in [FieldSpec::F2, FieldSpec::Q] {
            let r = if hdprime { check_flag_hdprime(&inst, field, &opts) } else { check_flag_schenzel(&inst, field, &opts) };
            expect_status(&r, Status::Verified)?;
            ensure!(r.numbers["lsops"] == 3, "{name}: {} l.s.o.p.'s", r.numbers["lsops"]);
            let rows = computed_rows(&r);
            ensure!(
                rows.iter().any(|m| m["grouping"].as_array().map(|a| a.len()) == Some(inst.d()) && m["a"].as_array().unwrap().iter().all(|x| x == 1)),
                "{name}: identity grading was not compared"
            );
            compared += rows.len();
            if name == "two-oct" {
                // two disjoint octahedra: h = (1,9,3,3), β̃ = (1,0,2), so
                // h' = (1,9,6,2) and h'' = (1,6,6,2)
                let want = if hdprime { "(1,6,6,2)" } else { "(1,9,6,2)" };
                ensure!(r.lhs.as_deref() == Some(want), "{name}: rank sums {:?}, wanted {want}", r.lhs);
                if hdprime {
                    // dim (Σ/ΘM)_b = C(a,b) β̃_{|b|−1}: one socle element in each color
                    let fine = rows.iter().find(|m| m["a"].as_array().unwrap().len() == 3).unwrap();
                    for s in fine["socle"].as_array().unwrap() {
                        let n: u64 = s["b"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum();
                        let want = if n == 1 { 1 } else { 0 };
                        ensure!(s["v"] == want || n == 3, "{name}: socle at {} is {}", s["b"], s["v"]);
                    }
                }
            }
        }
    }
    Ok(format!("{compared} module/grading tables over F2 and Q, 3 l.s.o.p.'s each"))
}

fn c5_vanishing() -> Outcome {
    let f = PrimeField::new(32003);
    let mut degrees = 0;
    let instances = build_corpus(&default_corpus()).map_err(|e| e.to_string())?;
    for inst in &instances {
        let Some(g) = inst.identity_grading() else { continue };
        if !inst.complex.is_pure() {
            continue;
        }
        let module = GradedModule::new(&inst.complex, &g);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let lsop = random_lsop(&f, &inst.complex, &g, &mut rng).map_err(|e| format!("{}: {e}", inst.name))?;
            lsop.verify(&f, &inst.complex, &g).map_err(|e| format!("{}: {e}", inst.name))?;
            // one coordinate above the box, plus the all-twos corner
            let mut outside: Vec<Vec<usize>> = Vec::new();
            for i in 0..g.a.len() {
                for mut b in box_degrees(&g.a) {
                    b[i] = g.a[i] + 1;
                    outside.push(b);
                }
            }
            outside.push(g.a.iter().map(|x| x + 1).collect());
            outside.sort();
            outside.dedup();
            for b in &outside {
                let q = module.quotient_dim(&f, &lsop, b);
                ensure!(q == 0, "{}: (M/ΘM)_{b:?} has dimension {q}", inst.name);
                degrees += 1;
            }
        }
    }
    Ok(format!("{degrees} slices outside the box vanish (3 verified l.s.o.p.'s per member)"))
}

fn c6_duality() -> Outcome {
    let opts = CheckOptions { seed: 3, ..CheckOptions::default() };
    for name in ["cp4", "st42", "handle4", "ball4"] {
        let inst = entry(name);
        let r = check_duality(&inst, FieldSpec::Q, &opts);
        expect_status(&r, Status::Verified)?;
        let algebra = r.numbers["gradings"].as_array().unwrap().iter().any(|g| g["sigma_quotient"].is_object());
        ensure!(algebra, "{name}: no algebraic cross-check ran");
    }
    let ball = entry("ball4");
    ensure!(check_duality(&ball, FieldSpec::Q, &opts).numbers["boundary_facets"] == 4, "B should have the 4 triangles of the removed facet as boundary");
    for name in ["sd-rp2", "two-oct"] {
        let r = check_duality(&entry(name), FieldSpec::Q, &opts);
        expect_status(&r, Status::HypothesisUnmet)?;
    }
    Ok("∂C*₄, ST(4,2), 1-handle member, B verified; sd(RP²) and 2×oct hypothesis-unmet".into())
}

fn c7_average() -> Outcome {
    let instances = build_corpus(&default_corpus()).map_err(|e| e.to_string())?;
    let mut identities = 0;
    for inst in &instances {
        for field in [FieldSpec::Q, FieldSpec::F2] {
            let r = check_average_identity(inst, field, &[], 1);
            if inst.coloring.is_some() && inst.d() >= 2 {
                expect_status(&r, Status::Verified)?;
                identities += r.numbers["identities"].as_array().unwrap().len();
            } else {
                expect_status(&r, Status::HypothesisUnmet)?;
            }
        }
    }
    Ok(format!("{identities} exact identities over Q and F2"))
}

fn g2_lhs_oracle(c: &Complex, betti: &[usize]) -> (i64, i64) {
    let h = h_from_f(c);
    let d = h.len() - 1;
    let b1 = betti.get(1).copied().unwrap_or(0) as i64;
    let b0 = betti.first().copied().unwrap_or(0) as i64;
    (2 * h[2] - (d as i64 - 1) * h[1], 4 * binomial(d, 2).unwrap() * (b1 - b0))
}

fn g2_equality(inst: &Instance) -> Result<(), String> {
    let r = check_g2(inst, FieldSpec::Q, 0);
    expect_status(&r, Status::Verified)?;
    let betti: Vec<usize> = serde_json::from_value(r.numbers["betti"].clone()).unwrap();
    let (l, rr) = g2_lhs_oracle(&inst.complex, &betti);
    ensure!(r.lhs == Some(l.to_string()) && r.rhs == Some(rr.to_string()), "{}: report {:?}/{:?}, oracle {l}/{rr}", inst.name, r.lhs, r.rhs);
    ensure!(l == rr, "{}: strict inequality {l} > {rr} on a Walkup member", inst.name);
    if inst.d() >= 5 {
        let s = check_stacked_link_criterion(inst, FieldSpec::Q, 0);
        expect_status(&s, Status::Verified)?;
        ensure!(s.numbers["all_links_stacked"] == true, "{}: some vertex link is not stacked", inst.name);
    }
    Ok(())
}

fn c8_g2() -> Outcome {
    let mut equalities = 0;
    for d in 4..=6 {
        let (c, col, t) = stacked_cross_polytopal_sphere(d, 2, 0);
        g2_equality(&Instance::new(format!("ST({d},2)"), c, Some(col), Some(t)))?;
        let (c, col, t) = walkup_sample(d, 1, 1, 0).map_err(|e| e.to_string())?;
        ensure!(t.handles() == 1, "d = {d}: handle sample has {} handles", t.handles());
        g2_equality(&Instance::new(format!("handle({d})"), c, Some(col), Some(t)))?;
        equalities += 2;
        for seed in 0..20u64 {
            let sums = 1 + (seed as usize % 2);
            let handles = (seed as usize / 2) % 2;
            let (c, col, t) = walkup_sample(d, sums, handles, 100 + seed).map_err(|e| e.to_string())?;
            g2_equality(&Instance::new(format!("walkup({d},{sums},{handles},{seed})"), c, Some(col), Some(t)))?;
            equalities += 1;
        }
    }
    // corpus-wide inequality
    let instances = build_corpus(&default_corpus()).map_err(|e| e.to_string())?;
    for inst in &instances {
        let r = check_g2(inst, FieldSpec::Q, 0);
        ensure!(r.status != Status::Violated && r.status != Status::Inconclusive, "{}: {}", inst.name, r.status);
    }
    // non-Walkup spheres: strict inequality, and for d ≥ 5 a non-stacked link
    let mut strict = Vec::new();
    for n in [4, 5] {
        let (c, col) = barycentric_subdivision(&builtin(&format!("simplex_boundary:{n}")).unwrap());
        let inst = Instance::new(format!("sd(∂Δ^{n})"), c, Some(col), None);
        let r = check_g2(&inst, FieldSpec::Q, 0);
        expect_status(&r, Status::Verified)?;
        let (l, rr) = g2_lhs_oracle(&inst.complex, &[0]);
        ensure!(l > rr && r.lhs == Some(l.to_string()), "{}: expected strict inequality, got {l} vs {rr}", inst.name);
        if inst.d() >= 5 {
            let s = check_stacked_link_criterion(&inst, FieldSpec::Q, 0);
            expect_status(&s, Status::Verified)?;
            ensure!(s.numbers["all_links_stacked"] == false, "{}: links reported stacked", inst.name);
        }
        strict.push(format!("{l}>{rr}"));
    }
    Ok(format!("{equalities} Walkup members with equality, strict on sd spheres ({})", strict.join(", ")))
}

fn c9_lbt() -> Outcome {
    let opts = CheckOptions { trials: 8, seed: 2, ..CheckOptions::default() };
    let instances = build_corpus(&default_corpus()).map_err(|e| e.to_string())?;
    let mut names = Vec::new();
    for inst in &instances {
        if inst.d() < 4 || inst.coloring.is_none() {
            continue;
        }
        let topo = inst.topology(FieldSpec::F32003);
        let closed = topo.class.has(flaglab::Label::ClosedHomologyManifold);
        let ball = inst.name == "cross-polytope:4-facet";
        if !closed && !ball {
            continue;
        }
        let r = check_lbt(inst, FieldSpec::F32003, 2, &opts);
        expect_status(&r, Status::Verified)?;
        let links = &r.numbers["links"];
        ensure!(links["links"] == links["certified"], "{}: {links}", inst.name);
        ensure!(!ball || r.numbers["module"] == "relative", "B was not checked on relative vectors");
        names.push(inst.name.clone());
    }
    ensure!(names.iter().any(|n| n == "cross-polytope:4-facet"), "B missing");
    Ok(format!("ℓ = 2 verified with certified links on {} members", names.len()))
}

fn c10_spheres() -> Outcome {
    let mut spheres: Vec<(String, Complex)> = vec![("cp3".into(), cross_polytope_boundary(3).0)];
    for n in 2..=4 {
        spheres.push((format!("ST(3,{n})"), stacked_cross_polytopal_sphere(3, n, 0).0));
    }
    for name in ["simplex_boundary:3", "cross_polytope:3", "bipyramid:5"] {
        spheres.push((format!("sd({name})"), barycentric_subdivision(&builtin(name).unwrap()).0));
    }
    for name in ["simplex_boundary:3", "bipyramid:5", "bipyramid:6"] {
        spheres.push((name.into(), builtin(name).unwrap()));
    }
    ensure!(spheres.len() == 10, "{} spheres", spheres.len());
    for i in 0..spheres.len() {
        let b = flaglab::reduced_betti(&spheres[i].1, FieldSpec::Q);
        ensure!(b.is_sphere(2), "{} is not a 2-sphere", spheres[i].0);
        for j in 0..i {
            ensure!(spheres[i].1 != spheres[j].1, "{} repeats {}", spheres[i].0, spheres[j].0);
        }
    }
    for (name, c) in &spheres {
        for field in [FieldSpec::F2, FieldSpec::F3, FieldSpec::F32003] {
            ensure!(wlp_test(c, field, 8, 0).passes, "{name}: WLP not certified over {field}");
            ensure!(dual_wlp_test(c, field, 8, 0).passes, "{name}: dual WLP not certified over {field}");
        }
    }
    Ok("10 spheres pass WLP and dual WLP over F2, F3, F32003".into())
}

fn c11_suite() -> Outcome {
    let instances = build_corpus(&default_corpus()).map_err(|e| e.to_string())?;
    let fields = [FieldSpec::Q, FieldSpec::F2, FieldSpec::F32003];
    let opts = CheckOptions::default();
    let first = run_suite(&instances, &Check::ALL, &fields, &opts);
    let counts = summarize(&first);
    if let Some(bad) = first.iter().find(|r| r.status == Status::Violated) {
        return Err(format!("violated: {} on {} over {}: {:?}", bad.theorem_id, bad.instance.name, bad.instance.field, bad.witness));
    }
    let again = run_suite(&instances, &Check::ALL, &fields, &opts);
    ensure!(first.len() == again.len(), "rerun produced {} reports, first run {}", again.len(), first.len());
    for (a, b) in first.iter().zip(&again) {
        ensure!(
            a.theorem_id == b.theorem_id && a.instance == b.instance && a.status == b.status,
            "rerun differs at {} on {}: {} vs {}",
            a.theorem_id,
            a.instance.name,
            a.status,
            b.status
        );
    }
    Ok(format!("{} reports {counts:?}, rerun status-identical", first.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 cross-polytope flag h", c1_cross_polytopes),
        ("2 Stanley series", c2_stanley),
        ("3 flag Schenzel", || graded_criterion(false)),
        ("4 flag h'' and socle", || graded_criterion(true)),
        ("5 vanishing outside the box", c5_vanishing),
        ("6 duality", c6_duality),
        ("7 averaging identity", c7_average),
        ("8 g2 and stacked links", c8_g2),
        ("9 lower bound at l = 2", c9_lbt),
        ("10 Lefschetz on 2-spheres", c10_spheres),
        ("11 master regression", c11_suite),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {name}: PASS ({secs:.1}s) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({secs:.1}s) {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
