//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if
//! any criterion fails.

use std::collections::HashSet;
use std::f64::consts::{PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cadseq::dataset::{render_model, RenderConfig};
use cadseq::geometry::{
    build_mesh, normalize_model, plane_frame, prepare_for_tokenization, sample_mesh,
    solid_contains, Mesh,
};
use cadseq::metrics::{
    acc_cmd, chamfer, chamfer_brute_force, evaluate_corpus, EvalConfig, Prediction,
};
use cadseq::sequence::{
    BoolOp, CadModel, CurveCommand, ExtrudeCommand, Loop, Point2, SketchProfile, Step,
};
use cadseq::synth::{box_step, cylinder_step, random_corpus, unit_cube, SynthConfig};
use cadseq::tokenizer::{
    decode_model, dequantize_orientation, dequantize_position, dequantize_sketch, encode_model,
    quantize_orientation, quantize_position, quantize_sketch, DecodeError, OrientationIndex,
    PositionIndex, SketchAxis, SketchLevel, Token, TokenizedSequence,
};

/// Median self-CD of the unit cube stays under this. Calibrated from 400 pairs of
/// independent 2000-point samplings (seeds 2i, 2i+1): median 1.877, max 2.003.
const CUBE_SELF_CD_BOUND: f64 = 2.1;

/// Float slack on half-bin error bounds (the bounds are attained exactly at bin edges).
const ULP_SLACK: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn floor_bin(t: f64, bins: usize) -> usize {
    ((t * bins as f64).floor() as usize).min(bins - 1)
}

fn tokenizer_bijectivity() -> Outcome {
    let start = Instant::now();
    let mut seen = HashSet::new();
    for n in 0..729 {
        let i = OrientationIndex::new(n).map_err(|e| e.to_string())?;
        let (t, p, g) = dequantize_orientation(i);
        let oracle = floor_bin(t / PI, 9) * 81
            + floor_bin((p + PI) / TAU, 9) * 9
            + floor_bin((g + PI) / TAU, 9);
        ensure(oracle == n, || {
            format!("orientation {n} dequantizes into bin {oracle}")
        })?;
        let back = quantize_orientation(t, p, g).map_err(|e| e.to_string())?;
        ensure(back == i, || format!("orientation {n} -> {}", back.get()))?;
        seen.insert(i.bins());
    }
    ensure(seen.len() == 729, || {
        "orientation triples not distinct".into()
    })?;
    let mut seen = HashSet::new();
    for k in 0..46656 {
        let i = PositionIndex::new(k).map_err(|e| e.to_string())?;
        let [x, y, z] = dequantize_position(i);
        let oracle = floor_bin(z, 36) * 1296 + floor_bin(y, 36) * 36 + floor_bin(x, 36);
        ensure(oracle == k, || {
            format!("position {k} dequantizes into cell {oracle}")
        })?;
        let back = quantize_position([x, y, z]).map_err(|e| e.to_string())?;
        ensure(back == i, || format!("position {k} -> {}", back.get()))?;
        seen.insert(i.cells());
    }
    ensure(seen.len() == 46656, || {
        "position triples not distinct".into()
    })?;
    for axis in [SketchAxis::X, SketchAxis::Y] {
        for l in 0..128 {
            let level = SketchLevel::new(axis, l).map_err(|e| e.to_string())?;
            let v = dequantize_sketch(level);
            ensure(floor_bin(v, 128) == l, || format!("sketch {l} center {v}"))?;
            let back = quantize_sketch(v, axis).map_err(|e| e.to_string())?;
            ensure(back == level, || format!("sketch {l} -> {}", back.level()))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("729 + 46656 + 256 indices in {elapsed:.2?}"))
}

fn bounds(profile: &SketchProfile) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for l in &profile.loops {
        for c in &l.curves {
            for p in c.points() {
                lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
    }
    (lo, hi)
}

fn sketch_error(v: f64, back: f64, lo: f64, hi: f64) -> f64 {
    let ext = hi - lo;
    if ext == 0.0 {
        (back - lo).abs()
    } else {
        ((back - lo) / ext - (v - lo) / ext).abs()
    }
}

fn step_violations(a: &Step, b: &Step, out: &mut Vec<String>, tag: &str) {
    let (x, y) = (&a.extrude, &b.extrude);
    let angle = |name: &str, u: f64, v: f64, half: f64, out: &mut Vec<String>| {
        if (u - v).abs() > half + ULP_SLACK {
            out.push(format!("{tag} {name}: {u} vs {v}"));
        }
    };
    angle("theta", x.theta, y.theta, PI / 18.0, out);
    angle("phi", x.phi, y.phi, PI / 9.0, out);
    angle("gamma", x.gamma, y.gamma, PI / 9.0, out);
    for i in 0..3 {
        angle("origin", x.origin[i], y.origin[i], 1.0 / 72.0, out);
    }
    if (x.scale, x.e1, x.e2, x.bool_op, x.extent_type)
        != (y.scale, y.e1, y.e2, y.bool_op, y.extent_type)
    {
        out.push(format!("{tag} extrude scalars changed"));
    }
    let (lo, hi) = bounds(&a.profile);
    if a.profile.loops.len() != b.profile.loops.len() {
        out.push(format!("{tag} loop count"));
        return;
    }
    for (la, lb) in a.profile.loops.iter().zip(&b.profile.loops) {
        if la.curves.len() != lb.curves.len() {
            out.push(format!("{tag} curve count"));
            continue;
        }
        for (ca, cb) in la.curves.iter().zip(&lb.curves) {
            if ca.kind() != cb.kind() {
                out.push(format!("{tag} curve kind"));
                continue;
            }
            for (p, q) in ca.points().into_iter().zip(cb.points()) {
                let ex = sketch_error(p.x, q.x, lo.x, hi.x);
                let ey = sketch_error(p.y, q.y, lo.y, hi.y);
                if ex.max(ey) > 1.0 / 256.0 + ULP_SLACK {
                    out.push(format!("{tag} sketch point {p:?} vs {q:?}"));
                }
            }
        }
    }
}

fn round_trip_bound() -> Outcome {
    let corpus = random_corpus(1000, 2024, &SynthConfig::default());
    let mut violations = Vec::new();
    for (i, m) in corpus.iter().enumerate() {
        let reference = prepare_for_tokenization(m)
            .map_err(|e| format!("model {i}: {e}"))?
            .canonicalized();
        let tokens = encode_model(&reference).map_err(|e| format!("model {i}: {e}"))?;
        let back = decode_model(&tokens).map_err(|e| format!("model {i}: {e}"))?;
        if back.steps.len() != reference.steps.len() {
            violations.push(format!("model {i}: step count"));
            continue;
        }
        for (s, (a, b)) in reference.steps.iter().zip(&back.steps).enumerate() {
            step_violations(a, b, &mut violations, &format!("model {i} step {s}"));
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {}", violations.len(), violations[0])
    })?;
    Ok("1000 models, 0 violations".into())
}

fn grammar_robustness() -> Outcome {
    let corpus = random_corpus(200, 7, &SynthConfig::default());
    let (mut trials, mut detected) = (0usize, 0usize);
    let mut first_miss = None;
    for m in &corpus {
        let prepared = prepare_for_tokenization(m).map_err(|e| e.to_string())?;
        let t = encode_model(&prepared).map_err(|e| e.to_string())?;
        for (i, tok) in t.tokens.iter().enumerate() {
            if !matches!(tok, Token::Boundary(_)) {
                continue;
            }
            let mut tokens = t.tokens.clone();
            tokens.remove(i);
            trials += 1;
            match decode_model(&TokenizedSequence { tokens }) {
                Err(
                    DecodeError::GrammarViolation { .. } | DecodeError::IncompleteSequence { .. },
                ) => detected += 1,
                other => {
                    first_miss.get_or_insert(format!("deleting token {i} gave {other:?}"));
                }
            }
        }
    }
    ensure(detected == trials && trials > 0, || {
        format!(
            "{detected}/{trials} detected; {}",
            first_miss.unwrap_or_default()
        )
    })?;
    Ok(format!(
        "200 streams, {detected}/{trials} deletions detected"
    ))
}

/// Enclosed volume as a sum of signed tetrahedra against the origin.
fn mesh_volume(mesh: &Mesh) -> f64 {
    mesh.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| Vector3::from(mesh.vertices[i]));
            a.dot(&b.cross(&c)) / 6.0
        })
        .sum()
}

fn geometry_oracles() -> Outcome {
    let vol = |m: &CadModel| {
        build_mesh(m)
            .map(|mesh| mesh_volume(&mesh))
            .map_err(|e| e.to_string())
    };
    let cube = vol(&unit_cube())?;
    ensure((cube - 1.0).abs() <= 1e-6, || format!("cube volume {cube}"))?;

    let (r, h) = (0.5, 1.0);
    let cyl = vol(&CadModel::new(vec![cylinder_step(
        [0.5, 0.5],
        r,
        0.0,
        h,
        BoolOp::NewBody,
    )]))?;
    let exact = PI * r * r * h;
    let rel = (cyl - exact).abs() / exact;
    ensure(rel <= 0.002, || {
        format!("cylinder volume {cyl}, rel error {rel}")
    })?;

    let mut cavity = unit_cube();
    cavity
        .steps
        .push(box_step([0.25; 3], [0.5; 3], BoolOp::Cut));
    let mut corner = unit_cube();
    corner.steps.push(box_step([0.5; 3], [1.0; 3], BoolOp::Cut));
    for (name, m) in [("cavity", cavity), ("corner", corner)] {
        let v = vol(&m)?;
        ensure((v - 0.875).abs() <= 1e-6, || {
            format!("cube minus cube ({name}) volume {v}")
        })?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (t, p, g) = (
            rng.random_range(0.0..=PI),
            rng.random_range(-PI..=PI),
            rng.random_range(-PI..=PI),
        );
        let r = plane_frame(t, p, g).map_err(|e| e.to_string())?;
        let gram = r.transpose() * r;
        for i in 0..3 {
            for j in 0..3 {
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - id).abs());
            }
        }
        worst = worst.max((r.determinant() - 1.0).abs());
    }
    ensure(worst <= 1e-9, || format!("frame deviation {worst:e}"))?;
    Ok(format!(
        "cube {cube:.9}, cylinder rel {rel:.5}, cube-cube 0.875, frames max dev {worst:.1e}"
    ))
}

fn closest_on_triangle(
    p: Vector3<f64>,
    a: Vector3<f64>,
    b: Vector3<f64>,
    c: Vector3<f64>,
) -> Vector3<f64> {
    let (ab, ac, ap) = (b - a, c - a, p - a);
    let (d1, d2) = (ab.dot(&ap), ac.dot(&ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let (d3, d4) = (ab.dot(&bp), ac.dot(&bp));
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let (d5, d6) = (ab.dot(&cp), ac.dot(&cp));
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Generalized winding number of a closed triangle mesh around `p`.
fn winding_number(tris: &[[Vector3<f64>; 3]], p: Vector3<f64>) -> f64 {
    let total: f64 = tris
        .iter()
        .map(|[a, b, c]| {
            let (a, b, c) = (a - p, b - p, c - p);
            let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
            let num = a.dot(&b.cross(&c));
            let den = la * lb * lc + a.dot(&b) * lc + a.dot(&c) * lb + b.dot(&c) * la;
            2.0 * num.atan2(den)
        })
        .sum();
    total / (4.0 * PI)
}

fn membership_consistency() -> Outcome {
    let cfg = SynthConfig {
        max_steps: 2,
        ..SynthConfig::default()
    };
    let margin = 2.0 / 36.0;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut agree, mut total) = (0usize, 0usize);
    let mut first_miss = None;
    for (mi, m) in random_corpus(10, 99, &cfg).iter().enumerate() {
        let m = normalize_model(m).map_err(|e| e.to_string())?;
        let mesh = build_mesh(&m).map_err(|e| e.to_string())?;
        let tris: Vec<_> = (0..mesh.triangles.len())
            .map(|i| mesh.triangle(i))
            .collect();
        let boxes: Vec<_> = tris
            .iter()
            .map(|t| {
                let lo = t[0].inf(&t[1]).inf(&t[2]).add_scalar(-margin);
                let hi = t[0].sup(&t[1]).sup(&t[2]).add_scalar(margin);
                (lo, hi)
            })
            .collect();
        let mut accepted = 0;
        while accepted < 1000 {
            let p = Vector3::from_fn(|_, _| rng.random_range(-0.1..1.1));
            let near = tris.iter().zip(&boxes).any(|([a, b, c], (lo, hi))| {
                (0..3).all(|k| p[k] >= lo[k] && p[k] <= hi[k])
                    && (closest_on_triangle(p, *a, *b, *c) - p).norm() <= margin
            });
            if near {
                continue;
            }
            accepted += 1;
            total += 1;
            let oracle = winding_number(&tris, p) > 0.5;
            let got = solid_contains(&m, p.into()).map_err(|e| e.to_string())?;
            if got == oracle {
                agree += 1;
            } else {
                first_miss.get_or_insert(format!("model {mi} point {p:?}: contains {got}"));
            }
        }
    }
    ensure(agree == total, || {
        format!("{agree}/{total} agree; {}", first_miss.unwrap_or_default())
    })?;
    Ok(format!("10 models, {agree}/{total} points agree"))
}

fn random_cloud<R: Rng>(rng: &mut R, n: usize) -> Vec<[f64; 3]> {
    (0..n).map(|_| rng.random()).collect()
}

fn chamfer_correctness() -> Outcome {
    let a = chamfer(&[[0.0; 3]], &[[1.0, 0.0, 0.0]]).map_err(|e| e.to_string())?;
    let b = chamfer(&[[0.0; 3], [1.0, 0.0, 0.0]], &[[0.0; 3]]).map_err(|e| e.to_string())?;
    ensure(a == 2000.0 && b == 500.0, || {
        format!("hand cases gave {a}, {b}")
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (n, k) = (rng.random_range(1..=512), rng.random_range(1..=512));
        let p = random_cloud(&mut rng, n);
        let q = random_cloud(&mut rng, k);
        let fast = chamfer(&p, &q).map_err(|e| e.to_string())?;
        let slow = chamfer_brute_force(&p, &q).map_err(|e| e.to_string())?;
        worst = worst.max((fast - slow).abs() / slow.abs().max(f64::MIN_POSITIVE));
    }
    ensure(worst <= 1e-12, || {
        format!("max relative difference {worst:e}")
    })?;
    Ok(format!(
        "hand cases exact, 100 pairs max rel diff {worst:e}"
    ))
}

fn named(corpus: &[CadModel]) -> Vec<(String, CadModel)> {
    corpus
        .iter()
        .enumerate()
        .map(|(i, m)| (format!("m{i:04}"), m.clone()))
        .collect()
}

fn self_consistency() -> Outcome {
    let gts = named(&random_corpus(50, 5, &SynthConfig::default()));
    let preds: Vec<_> = gts
        .iter()
        .map(|(id, m)| (id.clone(), Prediction::Model(m.clone())))
        .collect();
    let r = evaluate_corpus(&preds, &gts, &EvalConfig::default()).map_err(|e| e.to_string())?;
    let median = r.median_cd.unwrap_or(f64::INFINITY);
    ensure(r.ir == 0.0, || format!("IR {}", r.ir))?;
    ensure(r.mean_acc_cmd == 100.0 && r.mean_acc_param == 100.0, || {
        format!("ACC_cmd {} ACC_param {}", r.mean_acc_cmd, r.mean_acc_param)
    })?;
    ensure(median < CUBE_SELF_CD_BOUND, || {
        format!("median CD {median} not below {CUBE_SELF_CD_BOUND}")
    })?;
    let planted: Vec<_> = preds
        .into_iter()
        .enumerate()
        .map(|(i, (id, p))| {
            if i % 5 == 0 {
                (id, Prediction::Unparseable("planted".into()))
            } else {
                (id, p)
            }
        })
        .collect();
    let r2 = evaluate_corpus(&planted, &gts, &EvalConfig::default()).map_err(|e| e.to_string())?;
    ensure(r2.ir == 20.0, || format!("planted IR {}", r2.ir))?;
    Ok(format!(
        "IR 0.00, ACC 100/100, median CD {median:.4} < {CUBE_SELF_CD_BOUND}; planted IR {:.2}",
        r2.ir
    ))
}

fn nonagon() -> CadModel {
    let corners: Vec<Point2> = (0..9)
        .map(|i| {
            let a = TAU * i as f64 / 9.0;
            Point2::new(0.5 + 0.4 * a.cos(), 0.5 + 0.4 * a.sin())
        })
        .collect();
    CadModel::new(vec![Step {
        profile: SketchProfile::new(vec![Loop::polygon(&corners)]),
        extrude: ExtrudeCommand {
            e1: 0.5,
            ..ExtrudeCommand::default()
        },
    }])
}

fn flip(m: &CadModel, which: &[usize]) -> CadModel {
    let mut out = m.clone();
    for &i in which {
        let c = &mut out.steps[0].profile.loops[0].curves[i];
        let (s, e) = (c.start(), c.end());
        let mid = Point2::new(
            (s.x + e.x) / 2.0 - (e.y - s.y) * 0.1,
            (s.y + e.y) / 2.0 + (e.x - s.x) * 0.1,
        );
        *c = CurveCommand::Arc {
            start: s,
            mid,
            end: e,
        };
    }
    out
}

fn acc_perturbation() -> Outcome {
    let gt = nonagon();
    let len = gt.curve_count() + gt.steps.len();
    ensure(len == 10, || format!("sequence length {len}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut trials = 0;
    for f in [0.1, 0.2, 0.5] {
        let k = (f * len as f64).round() as usize;
        let expected = 100.0 * (1.0 - f);
        for _ in 0..20 {
            let mut idx: Vec<usize> = (0..9).collect();
            for i in (1..idx.len()).rev() {
                idx.swap(i, rng.random_range(0..=i));
            }
            let pred = flip(&gt, &idx[..k]);
            let got = acc_cmd(Some(&pred), &gt);
            ensure(got == expected, || {
                format!("f={f}: ACC_cmd {got}, expected {expected}")
            })?;
            trials += 1;
        }
    }
    Ok(format!(
        "f in {{0.1, 0.2, 0.5}}, {trials} random flip sets exact"
    ))
}

fn renderer_determinism() -> Outcome {
    let cfg = RenderConfig::default();
    let cyl = CadModel::new(vec![cylinder_step(
        [0.5, 0.5],
        0.5,
        0.0,
        1.0,
        BoolOp::NewBody,
    )]);
    let goldens: [(&str, CadModel, &[u8]); 2] = [
        ("cube", unit_cube(), include_bytes!("golden/cube.png")),
        ("cylinder", cyl, include_bytes!("golden/cylinder.png")),
    ];
    let mut cube_shades = 0;
    for (name, m, golden) in goldens {
        let first = render_model(&m, &cfg).map_err(|e| e.to_string())?;
        let second = render_model(&m, &cfg).map_err(|e| e.to_string())?;
        let (a, b) = (
            first.to_png().map_err(|e| e.to_string())?,
            second.to_png().map_err(|e| e.to_string())?,
        );
        ensure(a == b, || format!("{name}: two runs differ"))?;
        ensure(a == golden, || format!("{name}: differs from golden image"))?;
        if name == "cube" {
            let shades: HashSet<u8> = first
                .pixels
                .iter()
                .copied()
                .filter(|&v| v != cfg.background)
                .collect();
            cube_shades = shades.len();
        }
    }
    ensure(cube_shades == 3, || {
        format!("cube shows {cube_shades} shades")
    })?;
    Ok("cube and cylinder match goldens, cube has 3 shades".into())
}

fn performance() -> Outcome {
    let mesh = build_mesh(&unit_cube()).map_err(|e| e.to_string())?;
    let p = sample_mesh(&mesh, 2000, 1)
        .map_err(|e| e.to_string())?
        .points;
    let q = sample_mesh(&mesh, 2000, 2)
        .map_err(|e| e.to_string())?
        .points;
    chamfer(&p, &q).map_err(|e| e.to_string())?;
    let mut times: Vec<Duration> = (0..7)
        .map(|_| {
            let t = Instant::now();
            let _ = chamfer(&p, &q);
            t.elapsed()
        })
        .collect();
    times.sort();
    let cd_time = times[times.len() / 2];
    ensure(cd_time < Duration::from_millis(10), || {
        format!("CD took {cd_time:?}")
    })?;

    let gts = named(&random_corpus(1000, 77, &SynthConfig::default()));
    let preds: Vec<_> = gts
        .iter()
        .map(|(id, m)| (id.clone(), Prediction::Model(m.clone())))
        .collect();
    let cfg = EvalConfig {
        threads: Some(4),
        ..EvalConfig::default()
    };
    let t = Instant::now();
    evaluate_corpus(&preds, &gts, &cfg).map_err(|e| e.to_string())?;
    let eval_time = t.elapsed();
    ensure(eval_time < Duration::from_secs(60), || {
        format!("evaluation took {eval_time:?}")
    })?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    Ok(format!(
        "2000x2000 CD {cd_time:.2?}; 1000-model eval {eval_time:.2?} (4 threads, {cores} core(s) available)"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("tokenizer bijectivity", tokenizer_bijectivity),
        ("round-trip error bound", round_trip_bound),
        ("grammar robustness", grammar_robustness),
        ("geometry oracles", geometry_oracles),
        ("membership/mesh consistency", membership_consistency),
        ("chamfer correctness", chamfer_correctness),
        ("metric self-consistency", self_consistency),
        ("ACC perturbation law", acc_perturbation),
        ("renderer determinism", renderer_determinism),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
