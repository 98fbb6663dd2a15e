use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use brauer_core::azumaya::azumaya_report;
use brauer_core::cohomology::{group_cohomology, koszul_cochain_complex, ZrModule};
use brauer_core::elliptic::{all_curves, rational_torsion, verdict_ba, CurveField, CurveHandle};
use brauer_core::gln::{
    parse_det_element, recognize_phi_image, shifted_det_in_x11, DetRingElement, PhiImage, PhiRecognition,
};
use brauer_core::group_ring::{format_scalar, parse_base_ring, BaseRing};
use brauer_core::linalg::{group_invariants, smith_normal_form, FgAbGroup, IntMatrix, Presentation};
use brauer_core::torus::{bottom_row_cohomology, gln_bottom_row, UnitsComplexSpec};
use brauer_core::verdict::{evaluate, replay, Conclusion, Flags, SchemeInvariants, StackDescriptor, Tristate};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))?;
    Ok(t)
}

fn det_i128(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * det_i128(&minor)
        })
        .sum()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|last| {
            combinations(last, k - 1).into_iter().map(move |mut c| {
                c.push(last);
                c
            })
        })
        .collect()
}

/// `d_k = g_k / g_{k-1}` with `g_k` the gcd of all `k×k` minors.
fn minor_gcd_factors(m: &[Vec<i128>], rows: usize, cols: usize) -> Vec<i128> {
    let mut g = vec![1i128];
    for k in 1..=rows.min(cols) {
        let mut acc = 0i128;
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                acc = acc.gcd(&det_i128(&sub));
            }
        }
        if acc == 0 {
            break;
        }
        g.push(acc);
    }
    g.windows(2).map(|w| w[1] / w[0]).collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for case in 0..500 {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let m: Vec<Vec<i128>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-20..=20)).collect()).collect();
        let mat = IntMatrix::from_i64_rows_with_cols(
            &m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect::<Vec<_>>(),
            cols,
        );
        let f = smith_normal_form(&mat);
        let diag: Vec<BigInt> = f.diagonal().into_iter().filter(|d| *d != BigInt::from(0)).collect();
        let oracle: Vec<BigInt> = minor_gcd_factors(&m, rows, cols).into_iter().map(BigInt::from).collect();
        ensure(diag == oracle, || format!("case {case}: snf {diag:?} vs oracle {oracle:?}"))?;
        let ums = f.u.mul(&mat).and_then(|x| x.mul(&f.v)).map_err(|e| e.to_string())?;
        ensure(ums == f.s, || format!("case {case}: U*M*V != S"))?;
        for x in [&f.u, &f.v] {
            let d = x.determinant().map_err(|e| e.to_string())?;
            ensure(d == BigInt::from(1) || d == BigInt::from(-1), || format!("case {case}: det {d}"))?;
        }
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("500 matrices agree with the minor-gcd oracle in {:.2}s", t.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let trivial = |g: &str| ZrModule::trivial(g.parse::<FgAbGroup>().unwrap().presentation(), 2);
    let twist = ZrModule::new(
        Presentation::free(1),
        vec![IntMatrix::from_i64_rows(&[vec![-1]]), IntMatrix::identity(1)],
    )
    .map_err(|e| e.to_string())?;
    let cases = vec![
        ("Z", trivial("Z"), FgAbGroup::free(1)),
        ("Z/2", trivial("Z/2"), FgAbGroup::cyclic(2)),
        ("Z/12", trivial("Z/12"), FgAbGroup::cyclic(12)),
        ("Z^2", trivial("Z^2"), FgAbGroup::free(2)),
        ("Z twisted by t1 = -1", twist, FgAbGroup::cyclic(2)),
    ];
    for (name, m, expected) in cases {
        let c = koszul_cochain_complex(&m).map_err(|e| e.to_string())?;
        let d = c.differentials();
        let dd = d[0].then(&d[1]).map_err(|e| e.to_string())?;
        ensure(dd.is_zero(), || format!("{name}: d o d != 0"))?;
        let h = group_cohomology(&m).map_err(|e| e.to_string())?;
        ensure(h[2] == expected, || format!("{name}: H^2 = {}, expected {expected}", h[2]))?;
        // cokernel of the last map, computed directly from its matrix
        let target = m.underlying();
        let relations = d[1].matrix().transpose().vstack(target.relations()).map_err(|e| e.to_string())?;
        let coker = group_invariants(target.generators(), &relations);
        ensure(coker == expected, || format!("{name}: coker f2* = {coker}"))?;
    }
    Ok("H^2(Z^2, M) = coker f2* for Z, Z/2, Z/12, Z^2 and the sign twist; d o d = 0".into())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for k in 1..=3 {
        let spec = UnitsComplexSpec::new(FgAbGroup::free(1), FgAbGroup::free(k), 9).map_err(|e| e.to_string())?;
        let r = bottom_row_cohomology(&spec).map_err(|e| e.to_string())?;
        ensure(r.compositions_vanish && r.blocks_separate, || format!("k={k}: complex checks failed"))?;
        for p in 2..=8 {
            let e = r.e2(p).ok_or(format!("k={k}: no E2 at {p}"))?;
            ensure(e.is_trivial(), || format!("k={k} p={p}: E2 = {e}"))?;
        }
        ensure(r.e2(1) == Some(&FgAbGroup::free(k)), || format!("k={k}: E2^(1,0) = {:?}", r.e2(1)))?;
        ensure(r.degrees[1].character_part_vanishes, || format!("k={k}: d1 nonzero on M"))?;
        for p in [2, 4, 6] {
            let ok = r.closed_form_checks.iter().any(|c| c.degree == p && c.matches);
            ensure(ok, || format!("k={k}: closed form fails at p={p}"))?;
        }
    }
    let spec = UnitsComplexSpec::new(FgAbGroup::free(1), FgAbGroup::free(1), 9).map_err(|e| e.to_string())?;
    let torus = bottom_row_cohomology(&spec).map_err(|e| e.to_string())?;
    for n in 1..=3 {
        let g = gln_bottom_row(n, 9, FgAbGroup::free(1)).map_err(|e| e.to_string())?;
        for (a, b) in g.degrees.iter().zip(&torus.degrees) {
            ensure(a.differential == b.differential && a.e2 == b.e2, || format!("GL_{n} differs at p={}", a.degree))?;
        }
    }
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!(
        "E2^(p,0) = 0 for 2 <= p <= 8, E2^(1,0) = M with d1 = 0 on M, closed form at p = 2, 4, 6, GL_n rows match ({:.2}s)",
        t.as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut orientation = None;
    for n in 2..=8 {
        let r = azumaya_report(n, 3).map_err(|e| e.to_string())?;
        let o = r.identity.valid_orientation.ok_or(format!("n={n}: no unique orientation"))?;
        ensure(*orientation.get_or_insert(o) == o, || format!("n={n}: orientation changed"))?;
        ensure(!r.coboundary.is_empty() && r.coboundary.iter().all(|c| c.equals_transition), || {
            format!("n={n}: coboundary class is not [xi]")
        })?;
        ensure(r.torsion.iter().all(|c| c.n_torsion), || format!("n={n}: not certified n-torsion"))?;
        ensure(!r.triple_overlaps.is_empty() && r.triple_overlaps.iter().all(|c| c.consistent), || {
            format!("n={n}: triple overlap inconsistent")
        })?;
    }
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!(
        "identity holds for 2 <= n <= 8 only under {:?}; class [xi], n-torsion, triple overlaps ({:.2}s)",
        orientation.unwrap(),
        t.as_secs_f64()
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let bases: Vec<(BaseRing, Vec<i64>)> = vec![
        (BaseRing::Integers, vec![1, -1]),
        (parse_base_ring("Z/6").unwrap(), vec![1, 5]),
        (BaseRing::prime_field(5).unwrap(), vec![1, 2, 3, 4]),
    ];
    let mut cases = 0;
    for (base, units) in &bases {
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(-2..=2);
            let a = base.from_int(units[rng.gen_range(0..units.len())].into());
            let a_inv = base.inverse(&a).ok_or("unit without inverse")?;
            let w = DetRingElement::phi(base, n, &a, m).map_err(|e| e.to_string())?;
            let w_inv = DetRingElement::phi(base, n, &a_inv, -m).map_err(|e| e.to_string())?;
            let got = recognize_phi_image(&w, &w_inv).map_err(|e| e.to_string())?;
            let want = PhiRecognition::Image(PhiImage {
                a: format_scalar(base, &a),
                m,
            });
            ensure(got == want, || format!("{base} n={n}: {got:?} vs {want:?}"))?;
            cases += 1;
        }
    }
    let dual = parse_base_ring("Z[a]/(a^2)").unwrap();
    for n in 1..=3 {
        let plus = parse_det_element(&dual, n, "det + a").map_err(|e| e.to_string())?;
        let minus = parse_det_element(&dual, n, "det - a").map_err(|e| e.to_string())?;
        let sq = parse_det_element(&dual, n, "det^2").map_err(|e| e.to_string())?;
        ensure(plus.mul(&minus).map_err(|e| e.to_string())? == sq, || format!("n={n}: (det+a)(det-a) != det^2"))?;
        let inv = parse_det_element(&dual, n, "(det - a) / det^2").map_err(|e| e.to_string())?;
        let r = recognize_phi_image(&plus, &inv).map_err(|e| e.to_string())?;
        ensure(matches!(r, PhiRecognition::NotImage { .. }), || format!("n={n}: det + a recognized as {r:?}"))?;
    }
    for n in 1..=4 {
        let (deg, lead) = shifted_det_in_x11(&BaseRing::Integers, n).map_err(|e| e.to_string())?;
        ensure(deg == n as i64 && lead.is_one(), || format!("n={n}: degree {deg}, leading {lead}"))?;
    }
    Ok(format!(
        "{cases} round trips over Z, Z/6, F5; (det+a)(det-a) = det^2 and det+a not an image; shifted det monic for n <= 4"
    ))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut curves = 0;
    for p in [5u64, 7, 11, 13] {
        for h in all_curves(p) {
            let v = verdict_ba(&h).map_err(|e| e.to_string())?;
            let s = &v.torsion.structure;
            ensure(v.torsion.hasse_bound_holds == Some(true), || format!("{}: Hasse", h.equation()))?;
            ensure(s.certified && s.d2 % s.d1 == 0 && s.d1 * s.d2 == s.order, || {
                format!("F{p} {}: structure not certified", h.equation())
            })?;
            ensure(v.conclusion == Conclusion::BrNotEqual, || format!("F{p} {}: {:?}", h.equation(), v.conclusion))?;
            curves += 1;
        }
    }
    let q = |a, b| CurveHandle {
        field: CurveField::Rationals,
        a,
        b,
    };
    let v = verdict_ba(&q(-1, 0)).map_err(|e| e.to_string())?;
    ensure(v.conclusion == Conclusion::BrNotEqual, || "y^2 = x^3 - x".into())?;
    ensure(v.torsion.structure.group == "Z/2 + Z/2".parse().unwrap(), || "2-torsion of y^2 = x^3 - x".into())?;
    let v = verdict_ba(&q(0, 2)).map_err(|e| e.to_string())?;
    ensure(v.conclusion == Conclusion::BrEqualsBrPrime, || "y^2 = x^3 + 2".into())?;
    ensure(rational_torsion(0, 2).map_err(|e| e.to_string())?.certified, || "certificate".into())?;
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{curves} curves over F5, F7, F11, F13 give BrNotEqual; over Q, x^3 - x gives BrNotEqual and x^3 + 2 gives BrEquals ({:.2}s)",
        t.as_secs_f64()
    ))
}

fn criterion_7() -> Outcome {
    let finite_parts = ["0", "Z/2", "Z/5", "Z/2 + Z/4", "Z/3 + Z/3"];
    let units = SchemeInvariants::new(FgAbGroup::trivial(), FgAbGroup::cyclic(3), FgAbGroup::cyclic(6), Flags::default());
    let mut evaluated = Vec::new();
    for f in finite_parts {
        for rank in 0..=4 {
            let d = StackDescriptor::BDiscrete {
                finite_part: f.parse().unwrap(),
                rank,
            };
            let v = evaluate(&d, &units).map_err(|e| e.to_string())?;
            let want = if rank <= 1 {
                Conclusion::SBMIHolds
            } else {
                Conclusion::SBMIFails
            };
            ensure(v.conclusion == want, || format!("{}: {:?}", d.label(), v.conclusion))?;
            if rank == 2 && f == "0" {
                let model = v.br_prime_model.clone().ok_or("no model for rank 2")?;
                ensure(model == FgAbGroup::cyclic(3).direct_sum(&FgAbGroup::cyclic(6)), || format!("model {model}"))?;
            }
            evaluated.push((d, units.clone(), v));
        }
    }
    for flags in [Flags::default(), Flags { integral: Tristate::Yes, regular_codim1: Tristate::Yes, br_equals_br_prime: Tristate::Yes, ..Flags::default() }] {
        let s = SchemeInvariants::new(FgAbGroup::trivial(), FgAbGroup::trivial(), FgAbGroup::trivial(), flags);
        for n in 1..=4 {
            let d = StackDescriptor::BGLn { n };
            let v = evaluate(&d, &s).map_err(|e| e.to_string())?;
            ensure(v.conclusion == Conclusion::Unknown && v.unmet_hypothesis.as_deref() == Some("noetherian_normal"), || {
                format!("BGL_{n} without normality: {:?}", v.conclusion)
            })?;
            ensure(v.brauer_map_surjective().is_none() || flags.br_equals_br_prime == Tristate::No, || {
                format!("BGL_{n} guessed a Brauer verdict")
            })?;
            evaluated.push((d, s.clone(), v));
        }
    }
    let mut normal = SchemeInvariants::blank();
    normal.flags.noetherian_normal = Tristate::Yes;
    for d in [
        StackDescriptor::BGLn { n: 3 },
        StackDescriptor::BDiagonalizable { characters: "Z^2 + Z/3".parse().unwrap() },
        StackDescriptor::QuotientGoodModuli,
    ] {
        let v = evaluate(&d, &normal).map_err(|e| e.to_string())?;
        evaluated.push((d, normal.clone(), v));
    }
    for (d, s, v) in &evaluated {
        let r = replay(d, s, v).map_err(|e| format!("{}: {e}", d.label()))?;
        ensure(&r == v, || format!("{}: replay differs", d.label()))?;
    }
    Ok(format!(
        "rank 0/1 SBMIHolds, rank >= 2 SBMIFails with model Z/3 + Z/6, BGL_n without normality Unknown; {} traces replay",
        evaluated.len()
    ))
}

fn criterion_8() -> Outcome {
    let dir = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let module = dir.join("acceptance_module.json");
    let request = dir.join("acceptance_verdict.json");
    std::fs::write(&module, r#"{"group": "Z/12", "actions": [[[5]], [[7]]]}"#).map_err(|e| e.to_string())?;
    std::fs::write(
        &request,
        r#"{"schema": "brauer-input/1", "stack": {"kind": "BDiscrete", "rank": 2}, "base": {"br_prime": "Z/3", "units_torsion": "Z/6"}}"#,
    )
    .map_err(|e| e.to_string())?;
    let module = module.to_str().unwrap().to_string();
    let request = request.to_str().unwrap().to_string();
    let runs: Vec<Vec<String>> = vec![
        vec!["snf".into(), "--matrix".into(), "[[2,4],[6,8]]".into()],
        vec!["group-cohomology".into(), "--input".into(), module],
        vec!["torus-complex".into(), "--rank".into(), "2".into(), "--max-degree".into(), "5".into(), "--audit".into()],
        vec!["gln-bottom-row".into(), "--n".into(), "3".into()],
        vec!["azumaya".into(), "--n".into(), "3".into(), "--charts".into(), "3".into()],
        vec!["gln-units".into(), "--base".into(), "Z/6".into(), "--n".into(), "2".into(), "--w".into(), "5*det".into(), "--w-inv".into(), "5 / det".into()],
        vec!["elliptic".into(), "--field".into(), "11".into(), "--a".into(), "1".into(), "--b".into(), "3".into()],
        vec!["verdict".into(), "--input".into(), request],
    ];
    for args in &runs {
        let outputs: Vec<(Option<i32>, Vec<u8>)> = (0..3)
            .map(|_| {
                let out = Command::new(env!("CARGO_BIN_EXE_brauer")).args(args).output().expect("binary runs");
                (out.status.code(), out.stdout)
            })
            .collect();
        ensure(outputs[0].0 == Some(0), || format!("{}: exit {:?}", args[0], outputs[0].0))?;
        ensure(outputs.iter().all(|o| o == &outputs[0]), || format!("{}: outputs differ", args[0]))?;
    }
    Ok(format!("{} subcommands byte-identical over 3 runs", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("SNF oracle equivalence", criterion_1),
        ("Koszul correctness", criterion_2),
        ("bottom-row audit", criterion_3),
        ("Azumaya identity", criterion_4),
        ("GL_n units", criterion_5),
        ("elliptic verdicts", criterion_6),
        ("verdict engine", criterion_7),
        ("CLI determinism", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
