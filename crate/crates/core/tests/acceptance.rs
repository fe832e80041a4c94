//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Exits 0 regardless of outcome unless `--strict` is passed or
//! `BEAMSPLIT_ACCEPTANCE_STRICT` is set, in which case any failure exits 1.

use std::f64::consts::PI;
use std::time::Instant;

use beamsplit_core::angle::{classify_exact, AngleKind};
use beamsplit_core::engine::{check_two_mode, AngleSpec, EngineConfig, VerdictKind};
use beamsplit_core::exact::{is_cyclotomic, min_poly_unit_complex, parse_surd, QuadSurd};
use beamsplit_core::lie::{
    bch_basis_matrix_so3, bch_determinant_printed, bch_determinant_zeros, exact_closure, identify_so3_xyz,
    p_block_determinant, p_block_determinant_exact, p_block_matrix, closure, trivial_embedding,
};
use beamsplit_core::linalg::exp_skew;
use beamsplit_core::orbit::{all_embeddings, Embed};
use beamsplit_core::so3::{bch_orthogonal, exp_so3, log_so3};
use beamsplit_core::words::{covering_profile, identity_word_search, WordOptions};
use beamsplit_core::{RotationMatrix, SkewMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// BCH determinant against its closed form on a grid, and the location of its zeros.
fn bch_determinant() -> Outcome {
    let eps = 1e-3;
    let mut worst = 0.0f64;
    let mut worst_theta = 0.0;
    let mut points = 0;
    for k in 1..1000 {
        let theta = 2.0 * PI * k as f64 / 1000.0;
        if theta < eps || (theta - PI).abs() < eps || 2.0 * PI - theta < eps {
            continue;
        }
        let report = bch_basis_matrix_so3(theta).expect("interior θ");
        let err = (report.determinant - bch_determinant_printed(theta)).abs() / report.determinant.abs().max(1.0);
        points += 1;
        if err > worst {
            worst = err;
            worst_theta = theta;
        }
    }
    let zeros = bch_determinant_zeros(4000, 1e-12);
    let allowed = [0.0, PI / 2.0, PI];
    let stray: Vec<f64> = zeros.iter().copied().filter(|z| allowed.iter().all(|a| (z - a).abs() > 1e-9)).collect();
    let matches = worst <= 1e-8;
    let detail = format!(
        "{points} grid points, max rel. deviation {worst:.3e} at θ = {worst_theta:.4}; zeros found {:?}, outside {{0, π/2, π}}: {:?}",
        zeros.iter().map(|z| format!("{:.9}", z)).collect::<Vec<_>>(),
        stray.iter().map(|z| format!("{:.9}", z)).collect::<Vec<_>>()
    );
    outcome(matches && stray.is_empty(), detail)
}

/// P-block closed form against the assembled block; exact zeros.
fn p_block() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for n in 4..=10 {
        for _ in 0..100 {
            let theta: f64 = rng.random_range(1e-3..2.0 * PI - 1e-3);
            if (theta - PI).abs() < 1e-3 {
                continue;
            }
            let d = p_block_matrix(n, theta).expect("block").determinant();
            let c = p_block_determinant(n, theta);
            worst = worst.max((d - c).abs() / c.abs().max(1.0));
        }
    }
    let e = |s: &str| parse_surd(s).unwrap();
    let mut zero_ok = true;
    for n in 4..=10 {
        zero_ok &= p_block_determinant_exact(n, &e("1"), &e("0")).unwrap() == QuadSurd::from_int(0);
        zero_ok &= p_block_determinant_exact(n, &e("-1"), &e("0")).unwrap() == QuadSurd::from_int(0);
        for (c, s) in [("0", "1"), ("0", "-1"), ("1/2", "1/2*sqrt(3)"), ("-1/2", "1/2*sqrt(3)"), ("1/2*sqrt(2)", "-1/2*sqrt(2)")] {
            zero_ok &= p_block_determinant_exact(n, &e(c), &e(s)).unwrap() != QuadSurd::from_int(0);
        }
    }
    outcome(
        worst <= 1e-9 && zero_ok,
        format!("N = 4..10 × 100 θ, max rel. deviation {worst:.3e}; exact zeros at θ ∈ {{0, π}} only: {zero_ok}"),
    )
}

fn two_mode_sweep() -> Outcome {
    let config = EngineConfig::default();
    let excluded = [(0, 1), (1, 2), (1, 1), (3, 2)];
    let dense = [
        AngleSpec::rational_pi(1, 3),
        AngleSpec::rational_pi(1, 4),
        AngleSpec::rational_pi(1, 5),
        AngleSpec::rational_pi(2, 5),
        AngleSpec::exact_cos(QuadSurd::from_ratio(1, 3)),
    ];
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 3..=5 {
        for (p, q) in excluded {
            let spec = AngleSpec::rational_pi(p, q);
            let v = check_two_mode(&spec, n, &config).expect("check");
            checked += 1;
            let replay = v.certificate.replay(&config).expect("replay");
            if !v.is_not_universal() || !replay.is_consistent() {
                failures.push(format!("{spec} on {n}: {}", v.kind));
            }
        }
        for spec in &dense {
            let v = check_two_mode(spec, n, &config).expect("check");
            checked += 1;
            let replay = v.certificate.replay(&config).expect("replay");
            if v.kind != VerdictKind::Universal || !replay.is_consistent() || replay.replayed == 0 {
                failures.push(format!("{spec} on {n}: {} ({:?})", v.kind, replay.mismatches));
            }
        }
    }
    outcome(failures.is_empty(), format!("{checked} verdicts with replayed certificates; failures: {failures:?}"))
}

fn cyclotomic_classification() -> Outcome {
    let values = [
        "1/2*sqrt(2)",
        "-1/2*sqrt(2)",
        "1/2*sqrt(3)",
        "-1/2*sqrt(3)",
        "1/4+1/4*sqrt(5)",
        "-1/4+1/4*sqrt(5)",
        "1/4-1/4*sqrt(5)",
        "-1/4-1/4*sqrt(5)",
    ];
    let mut lines = Vec::new();
    let mut pass = true;
    for v in values {
        let c = parse_surd(v).unwrap();
        let kind = classify_exact(&c).expect("classify").kind;
        let c2 = c.clone() * c.clone();
        let product = c.clone() + (c2 - QuadSurd::from_int(1)) * QuadSurd::from_ratio(1, 2);
        let poly = min_poly_unit_complex(&product).expect("min poly");
        let cyclo = is_cyclotomic(&poly).expect("cyclotomic test");
        let product_kind = classify_exact(&product).expect("classify").kind;
        let ok = kind.is_rational()
            && product_kind == AngleKind::IrrationalPi
            && cyclo.is_none()
            && poly.degree() == Some(4);
        pass &= ok;
        lines.push(format!("{v} → {kind}, product angle {product_kind} (degree {:?})", poly.degree().unwrap_or(0)));
    }
    outcome(pass, lines.join("; "))
}

fn trivial_action() -> Outcome {
    let a = trivial_embedding(3, 0, 1, 2);
    let four = all_embeddings(&a, 4).expect("embeddings");
    let five = all_embeddings(&a, 5).expect("embeddings");
    let s4 = exact_closure(&four).expect("exact closure");
    let s5 = exact_closure(&five).expect("exact closure");
    let triple = identify_so3_xyz(&closure(&four).expect("closure"));
    let exact = triple.as_ref().and_then(|t| t.holds_exactly());
    outcome(
        four.len() == 4 && s4.dim() == 3 && exact == Some(true) && five.len() == 10 && s5.dim() == 6,
        format!(
            "so(4): {} embeddings, exact dim {}; triple relations exact: {:?}; so(5): {} embeddings, exact dim {}",
            four.len(),
            s4.dim(),
            exact,
            five.len(),
            s5.dim()
        ),
    )
}

fn identity_words() -> Outcome {
    let opts = WordOptions::default();
    let theta = 2.0 * PI / 5.0;
    let a = RotationMatrix::givens(3, 0, 1, theta);
    let b = RotationMatrix::givens(3, 1, 2, theta);
    let none = identity_word_search(&[a, b], 8, 1e-9, &opts).expect("search");
    let half = |k, l| {
        RotationMatrix::givens_exact(3, k, l, &QuadSurd::from_int(0), &QuadSurd::from_int(1)).expect("exact quarter turn")
    };
    let exact_hit = identity_word_search(&[half(0, 1), half(1, 2)], 8, 0.0, &opts).expect("search");
    let float_hit = identity_word_search(
        &[RotationMatrix::givens(3, 0, 1, PI / 2.0), RotationMatrix::givens(3, 1, 2, PI / 2.0)],
        8,
        1e-9,
        &opts,
    )
    .expect("search");
    let pass = none.is_none()
        && exact_hit.as_ref().is_some_and(|w| w.len() <= 8)
        && float_hit.as_ref().is_some_and(|w| w.len() <= 8);
    outcome(
        pass,
        format!(
            "2π/5 pair to length 8: {}; π/2 pair exact: {}, float: {}",
            none.map_or("no identity word".into(), |w| w.to_string()),
            exact_hit.map_or("none".into(), |w| w.to_string()),
            float_hit.map_or("none".into(), |w| w.to_string())
        ),
    )
}

fn random_skew(rng: &mut ChaCha8Rng, max_angle: f64) -> SkewMatrix {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            let angle = rng.random_range(0.0..max_angle);
            return SkewMatrix::from_coords(3, &v.map(|x| x / n * angle));
        }
    }
}

fn kernel_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut round = 0.0f64;
    for _ in 0..10_000 {
        let x = random_skew(&mut rng, PI - 0.1);
        let back = log_so3(&exp_so3(&x).unwrap()).expect("log");
        round = round.max((back.matrix() - x.matrix()).amax());
    }
    let mut group = 0.0f64;
    let mut branch = 0;
    for _ in 0..10_000 {
        let x = random_skew(&mut rng, PI - 0.1);
        let r = random_skew(&mut rng, 1.0);
        // Gram–Schmidt against X, rescaled to a random angle
        let proj = r.sub(&x.scale(r.inner(&x) / x.inner(&x)));
        let y = proj.scale(rng.random_range(0.0..PI - 0.1) / proj.norm());
        match bch_orthogonal(&x, &y) {
            Ok(z) => {
                let lhs = exp_so3(&z).unwrap();
                let rhs = exp_so3(&x).unwrap().mul(&exp_so3(&y).unwrap());
                group = group.max(lhs.distance_max(&rhs));
            }
            Err(_) => branch += 1,
        }
    }
    outcome(
        round < 1e-10 && group < 1e-9 && branch == 0,
        format!("exp/log max error {round:.3e}; BCH group identity max error {group:.3e}; branch rejections {branch}"),
    )
}

/// Seed and pinned regression values for the coverage criterion.
const COVERAGE_SEED: u64 = 20_240_515;
const COVERAGE_BASELINE_LEN10: f64 = 0.049027622041907;
const SUBGROUP_FLOOR: f64 = 2.976;

fn coverage() -> Outcome {
    let opts = WordOptions::default();
    let lengths = [4, 6, 8, 10];
    let theta = 2.0 * PI / 5.0;
    let pair = [RotationMatrix::givens(3, 0, 1, theta), RotationMatrix::givens(3, 1, 2, theta)];
    let dense = covering_profile(&pair, &lengths, 1000, COVERAGE_SEED, &opts).expect("coverage");
    let a = trivial_embedding(3, 0, 1, 2).scale(theta / 3f64.sqrt());
    let o = exp_skew(&a);
    let sub = [o.embed(4, &[0, 1, 2]).unwrap(), o.embed(4, &[1, 2, 3]).unwrap()];
    let trapped = covering_profile(&sub, &lengths, 1000, COVERAGE_SEED, &opts).expect("coverage");
    let radii: Vec<f64> = dense.iter().map(|r| r.covering_radius).collect();
    let floor: Vec<f64> = trapped.iter().map(|r| r.covering_radius).collect();
    let monotone = radii.windows(2).all(|w| w[1] <= w[0]);
    let baseline = rel_close(radii[3], COVERAGE_BASELINE_LEN10, 1e-12);
    let above = floor.iter().all(|r| *r >= SUBGROUP_FLOOR);
    outcome(
        monotone && baseline && above,
        format!(
            "radii at L = 4, 6, 8, 10: {:?} (baseline {COVERAGE_BASELINE_LEN10}); SO(3)-in-SO(4) radii {:?} (floor {SUBGROUP_FLOOR})",
            radii.iter().map(|r| format!("{r:.12}")).collect::<Vec<_>>(),
            floor.iter().map(|r| format!("{r:.12}")).collect::<Vec<_>>()
        ),
    )
}

fn main() {
    let strict = std::env::args().any(|a| a == "--strict") || std::env::var_os("BEAMSPLIT_ACCEPTANCE_STRICT").is_some();
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("BCH determinant oracle", bch_determinant),
        ("P-block induction oracle", p_block),
        ("two-mode universality sweep", two_mode_sweep),
        ("cyclotomic classification", cyclotomic_classification),
        ("trivial-action subgroup", trivial_action),
        ("identity-word oracle", identity_words),
        ("kernel round trips", kernel_round_trips),
        ("coverage monotonicity", coverage),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {} ({name}) [{secs:.2} s]: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if strict && failed > 0 {
        std::process::exit(1);
    }
}
