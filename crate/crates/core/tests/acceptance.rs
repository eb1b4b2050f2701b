//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria 1–9 run twice; criterion 10 compares the two transcripts byte
//! for byte. A criterion listed in `KNOWN_FAILURES` is reported as FAIL but
//! does not fail the process; any other FAIL does.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use curvfun::analysis::{self, Claim, SuiteConfig, Verdict};
use curvfun::divergence::{self, ConeDensities, Direction, Generator};
use curvfun::functionals::{homogeneity_degree, weighted_asa, Exponent, WeightIndex};
use curvfun::geometry::file::canonical_corpus;
use curvfun::geometry::{Mat3, SupportBody};
use curvfun::randpoly::{self, BoundaryDensity};
use curvfun::tolerances::Tolerances;
use curvfun::{RuleSpec, SampledBody};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The ω^0-normalized monotonicity statement is false for non-ellipsoids;
/// the numbers are printed with the criterion.
const KNOWN_FAILURES: [usize; 1] = [5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn corpus() -> Vec<SupportBody> {
    canonical_corpus().iter().map(|f| f.build().unwrap()).collect()
}

fn body(id: &str) -> SupportBody {
    canonical_corpus()
        .into_iter()
        .find(|f| f.id.as_deref() == Some(id))
        .unwrap()
        .build()
        .unwrap()
}

fn sample(body: &SupportBody) -> SampledBody {
    body.sample(&RuleSpec::default_for(body.dim()).unwrap().build().unwrap()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn omega(s: &SampledBody, index: &WeightIndex, p: Exponent) -> f64 {
    weighted_asa(s, index, p).unwrap().value
}

fn index(dim: usize, m: u32, k: f64, i: &[u32]) -> WeightIndex {
    WeightIndex::new(dim, m, k, i).unwrap()
}

fn sphere_area(dim: usize) -> f64 {
    if dim == 2 {
        2.0 * PI
    } else {
        4.0 * PI
    }
}

fn criterion_1() -> Outcome {
    let cases: Vec<(usize, WeightIndex, Exponent)> = vec![
        (2, index(2, 0, 0.0, &[]), Exponent::Finite(1.0)),
        (2, index(2, 0, 2.5, &[]), Exponent::Finite(-1.0)),
        (2, index(2, 1, 0.0, &[1]), Exponent::Finite(0.5)),
        (2, index(2, 2, 1.0, &[2]), Exponent::Finite(7.0)),
        (2, index(2, 3, -1.0, &[3]), Exponent::Infinity),
        (2, index(2, 1, 3.0, &[1]), Exponent::Finite(-5.0)),
        (3, index(3, 0, 0.0, &[]), Exponent::Finite(1.0)),
        (3, index(3, 1, 0.0, &[1, 0]), Exponent::Finite(2.0)),
        (3, index(3, 2, 1.0, &[0, 1]), Exponent::Finite(-1.0)),
        (3, index(3, 2, -2.0, &[2, 0]), Exponent::Finite(0.5)),
        (3, index(3, 4, 0.5, &[2, 1]), Exponent::Infinity),
        (3, index(3, 3, 1.5, &[1, 1]), Exponent::Finite(-7.0)),
    ];
    let balls = [sample(&body("ball2")), sample(&body("ball3"))];
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for (dim, idx, p) in &cases {
        let value = omega(&balls[dim - 2], idx, *p);
        let target = idx.combinatorial_constant() as f64 * sphere_area(*dim);
        worst = worst.max(rel(value, target));
        // p- and k-independence
        let other = omega(&balls[dim - 2], &idx.with_k(idx.k() + 1.25), Exponent::Finite(3.0));
        worst = worst.max(rel(other, value));
        writeln!(detail, "  n={dim} {idx} p={p}: {value:.15e} (target {target:.15e})").unwrap();
    }
    writeln!(detail, "  max relative deviation {worst:.3e} (tolerance 1e-10)").unwrap();
    Outcome {
        pass: worst <= 1e-10,
        detail,
    }
}

fn criterion_2() -> Outcome {
    let mut detail = String::new();
    let mut pass = true;
    for (axes, tol) in [(vec![2.0, 1.0], 1e-9), (vec![2.0, 1.0, 1.0], 1e-7)] {
        let n = axes.len();
        let s = sample(&SupportBody::ellipsoid_from_axes(&axes).unwrap());
        let product: f64 = axes.iter().product();
        let mut worst: f64 = 0.0;
        for p in [Exponent::Finite(-1.0), Exponent::Finite(0.0), Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(7.0), Exponent::Infinity] {
            let exponent = match p {
                Exponent::Finite(p) => (n as f64 - p) / (n as f64 + p),
                Exponent::Infinity => -1.0,
            };
            let target = sphere_area(n) * product.powf(exponent);
            let value = omega(&s, &WeightIndex::zero(n), p);
            worst = worst.max(rel(value, target));
            writeln!(detail, "  axes {axes:?} p={p}: {value:.15e} (closed form {target:.15e})").unwrap();
        }
        writeln!(detail, "  axes {axes:?}: max relative deviation {worst:.3e} (tolerance {tol:e})").unwrap();
        pass &= worst <= tol;
    }
    Outcome { pass, detail }
}

/// Haar-distributed orthogonal matrix from the QR factorization of a
/// Gaussian matrix (Box–Muller normals).
fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> Mat3 {
    let mut normal = || {
        let (u1, u2): (f64, f64) = (rng.random::<f64>().max(1e-300), rng.random());
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    };
    let g = DMatrix::from_fn(dim, dim, |_, _| normal());
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut m = Mat3::identity();
    for i in 0..dim {
        let sign = r[(i, i)].signum();
        for j in 0..dim {
            m[(j, i)] = q[(j, i)] * sign;
        }
    }
    m
}

fn criterion_3() -> Outcome {
    let mut detail = String::new();
    let bodies = [body("ellipse_2_1"), body("perturbed_circle_005"), body("perturbed_sphere_010")];
    let mut worst_h: f64 = 0.0;
    let mut worst_r: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for b in &bodies {
        let n = b.dim();
        let pairs: Vec<(WeightIndex, Exponent)> = if n == 2 {
            vec![
                (index(2, 0, 0.0, &[]), Exponent::Finite(1.0)),
                (index(2, 0, 1.0, &[]), Exponent::Finite(-1.0)),
                (index(2, 1, 0.0, &[1]), Exponent::Finite(2.0)),
                (index(2, 1, -0.5, &[1]), Exponent::Finite(0.5)),
                (index(2, 2, 1.0, &[2]), Exponent::Finite(7.0)),
                (index(2, 2, 2.0, &[2]), Exponent::Infinity),
            ]
        } else {
            vec![
                (index(3, 0, 0.0, &[]), Exponent::Finite(1.0)),
                (index(3, 0, 1.0, &[]), Exponent::Finite(-1.0)),
                (index(3, 1, 0.0, &[1, 0]), Exponent::Finite(2.0)),
                (index(3, 1, -0.5, &[1, 0]), Exponent::Finite(0.5)),
                (index(3, 2, 1.0, &[0, 1]), Exponent::Finite(7.0)),
                (index(3, 2, 2.0, &[0, 1]), Exponent::Infinity),
            ]
        };
        let base = sample(b);
        for a in [0.5, 2.0, 3.0] {
            let scaled = sample(&b.scaled(a).unwrap());
            for (idx, p) in &pairs {
                let q = homogeneity_degree(n, *p, idx.k()).unwrap();
                worst_h = worst_h.max(rel(omega(&scaled, idx, *p), a.powf(q) * omega(&base, idx, *p)));
            }
        }
        for _ in 0..5 {
            let rotated = sample(&b.rotated(&random_orthogonal(n, &mut rng)).unwrap());
            for (idx, p) in &pairs {
                worst_r = worst_r.max(rel(omega(&rotated, idx, *p), omega(&base, idx, *p)));
            }
        }
    }
    writeln!(detail, "  homogeneity: max relative deviation {worst_h:.3e} (tolerance 1e-8)").unwrap();
    writeln!(detail, "  rotation invariance: max relative deviation {worst_r:.3e} (tolerance 1e-8)").unwrap();
    Outcome {
        pass: worst_h <= 1e-8 && worst_r <= 1e-8,
        detail,
    }
}

fn criterion_4() -> Outcome {
    let config = SuiteConfig::default();
    let claims = [Claim::HolderThree, Claim::HolderVolume, Claim::KInterpolation];
    let mut detail = String::new();
    let mut pass = true;
    let mut totals = [0usize; 3];
    for b in corpus() {
        let suite = analysis::run_body(&b, &config).unwrap();
        let perturbed = b.label().starts_with("perturbed");
        for (c, claim) in claims.iter().enumerate() {
            let admissible: Vec<_> = suite
                .reports
                .iter()
                .filter(|r| r.claim == *claim && r.verdict != Verdict::Inadmissible)
                .collect();
            totals[c] += admissible.len();
            let violated = admissible.iter().filter(|r| r.verdict == Verdict::Violated).count();
            let mismatched = admissible.iter().filter(|r| !r.equality_matches()).count();
            let not_strict = if perturbed { admissible.iter().filter(|r| !r.strict).count() } else { 0 };
            let min_slack = admissible.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
            pass &= violated == 0 && mismatched == 0 && not_strict == 0;
            writeln!(
                detail,
                "  {:<22} {:<16} admissible {:>4} violated {violated} equality-class mismatches {mismatched} non-strict {not_strict} min slack {min_slack:+.3e}",
                b.label(),
                claim.to_string(),
                admissible.len()
            )
            .unwrap();
        }
    }
    for (claim, total) in claims.iter().zip(totals) {
        writeln!(detail, "  {claim}: {total} admissible combinations (at least 50 required)").unwrap();
        pass &= total >= 50;
    }
    Outcome { pass, detail }
}

fn criterion_5() -> Outcome {
    let tol = Tolerances::default();
    let grid = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let mut detail = String::new();
    let (mut first_ok, mut literal_ok, mut polar_ok) = (true, true, true);
    for b in corpus() {
        let s = sample(&b);
        let ellipsoid = analysis::petty_ratio_stats(&s, &tol).ellipsoid;
        for idx in analysis::suite_indices(b.dim()).unwrap() {
            let scan = analysis::monotonicity_scan(&s, &idx, &grid, &tol).unwrap();
            for form in &scan.forms {
                let monotone = form.steps.iter().all(|&st| st >= -1e-10);
                let constant = form.spread <= 1e-9;
                let ok = monotone && (!ellipsoid || constant);
                match form.claim {
                    Claim::MonotoneRatioPower => first_ok &= ok,
                    Claim::MonotoneVolumeNormalized => literal_ok &= ok,
                    _ => polar_ok &= ok,
                }
                if !ok || idx.is_zero() {
                    let worst = form.steps.iter().copied().fold(f64::INFINITY, f64::min);
                    writeln!(
                        detail,
                        "  {:<22} {idx} {:<28} worst step {worst:+.3e} spread {:.3e} {}",
                        b.label(),
                        form.claim.to_string(),
                        form.spread,
                        if ok { "ok" } else { "FAILS" }
                    )
                    .unwrap();
                }
            }
        }
    }
    writeln!(detail, "  (i)  (w^p/w^0)^((n+p)/p) non-decreasing, constant on ellipsoids: {}", verdict(first_ok)).unwrap();
    writeln!(detail, "  (ii) (w^p/w^0)^(n+p) non-increasing, constant on ellipsoids: {}", verdict(literal_ok)).unwrap();
    writeln!(detail, "  (ii) with w^inf in place of w^0 (limit s -> inf of the three-exponent inequality): {}", verdict(polar_ok)).unwrap();
    Outcome {
        pass: first_ok && literal_ok,
        detail,
    }
}

fn criterion_6() -> Outcome {
    let tol = Tolerances::default();
    let mut detail = String::new();
    let mut pass = true;
    for id in ["ball2", "ball3", "ellipse_2_1", "perturbed_circle_005"] {
        let s = sample(&body(id));
        let r = analysis::limit_p_infinity(&s, &WeightIndex::zero(s.dim()), &analysis::DEFAULT_INFINITY_SCHEDULE, &tol).unwrap();
        pass &= r.relative_error <= 1e-4;
        writeln!(
            detail,
            "  p->inf {id:<22} limit {:.10e} proof-form {:.10e} (rel {:.2e}) stated-form {:.10e} (rel {:.2e})",
            r.extrapolated, r.proof_form_target, r.relative_error, r.stated_form_target, r.stated_form_relative_error
        )
        .unwrap();
    }
    for id in ["ball2", "ball3", "ellipse_2_1", "ellipse_3_1", "ellipsoid_2_1_1"] {
        let b = body(id);
        let r = analysis::limit_p_zero(
            &b,
            &WeightIndex::zero(b.dim()),
            RuleSpec::default_for(b.dim()).unwrap(),
            &analysis::DEFAULT_ZERO_SCHEDULE,
            &tol,
        )
        .unwrap();
        pass &= r.relative_error <= 1e-4;
        writeln!(
            detail,
            "  p->0   polar of {id:<14} limit {:.10e} proof-form {:.10e} (rel {:.2e}) stated-form {:.10e} (rel {:.2e})",
            r.extrapolated, r.proof_form_target, r.relative_error, r.stated_form_target, r.stated_form_relative_error
        )
        .unwrap();
    }
    Outcome { pass, detail }
}

fn criterion_7() -> Outcome {
    let tol = Tolerances::default();
    let mut detail = String::new();
    let generators = [
        Generator::x_log_x(),
        Generator::neg_log(),
        Generator::sqrt(),
        Generator::power(-1.0),
        Generator::power(0.3),
        Generator::power(2.0),
        Generator::linear(2.0, 1.0),
    ];
    let (mut hellinger, mut duality, mut gibbs_ok, mut jensen_ok) = (0f64, 0f64, true, true);
    for b in corpus() {
        let s = sample(&b);
        let n = b.dim() as f64;
        let ellipsoid = analysis::petty_ratio_stats(&s, &tol).ellipsoid;
        for idx in analysis::suite_indices(b.dim()).unwrap() {
            let d = ConeDensities::new(&s, &idx).unwrap();
            for p in [-1.0, 0.5, 1.0, 2.0, 7.0, 20.0] {
                hellinger = hellinger.max(rel(divergence::hellinger(&d, p / (n + p)), omega(&s, &idx, Exponent::Finite(p))));
            }
            for g in &generators {
                let pq = divergence::f_divergence(&d, g, Direction::PQ).unwrap();
                let qp = divergence::f_divergence(&d, &g.adjoint(), Direction::QP).unwrap();
                let scale = d.p_mass() + d.q_mass();
                duality = duality.max((pq - qp).abs() / scale);
                let j = divergence::jensen_bound(&d, g).unwrap();
                let equality_expected = ellipsoid || g.shape() == divergence::Shape::Linear;
                let gap = j.gap.abs() / scale;
                let ok = j.holds && (!equality_expected || gap <= 1e-10) && (equality_expected || gap > 1e-10);
                if !ok {
                    writeln!(detail, "  Jensen {} on {} {idx}: lhs {:.6e} rhs {:.6e} relative gap {gap:.3e}", g.name(), b.label(), j.lhs, j.rhs).unwrap();
                }
                jensen_ok &= ok;
            }
            let kl = divergence::normalized_kl(&d, Direction::PQ);
            gibbs_ok &= kl >= -1e-12 && ((kl <= 1e-12) == ellipsoid);
        }
    }
    let e = sample(&body("ellipse_2_1"));
    let kl = divergence::kl_divergence(&ConeDensities::new(&e, &WeightIndex::zero(2)).unwrap(), Direction::PQ);
    let kl_err = rel(kl, -2.0 * PI * 2f64.ln());
    writeln!(detail, "  Hellinger-ASA identity: max relative deviation {hellinger:.3e} (tolerance 1e-10)").unwrap();
    writeln!(detail, "  adjoint duality: max relative deviation {duality:.3e} (tolerance 1e-10)").unwrap();
    writeln!(detail, "  KL(ellipse 2,1) = {kl:.15e}, relative deviation from -2 pi ln 2: {kl_err:.3e} (tolerance 1e-9)").unwrap();
    writeln!(detail, "  normalized KL >= 0 with equality exactly on ellipsoids: {}", verdict(gibbs_ok)).unwrap();
    writeln!(detail, "  Jensen bound in declared direction, equality on ellipsoids and linear generators: {}", verdict(jensen_ok)).unwrap();
    Outcome {
        pass: hellinger <= 1e-10 && duality <= 1e-10 && kl_err <= 1e-9 && gibbs_ok && jensen_ok,
        detail,
    }
}

fn criterion_8() -> Outcome {
    let mut detail = String::new();
    let mut worst: f64 = 0.0;
    for id in ["ellipse_3_1", "perturbed_circle_005", "perturbed_sphere_010"] {
        let b = body(id);
        let n = b.dim();
        let s = sample(&b);
        let rule = RuleSpec::default_for(n).unwrap();
        let idx = analysis::suite_indices(n).unwrap();
        for (i, p) in [(0, 1.0), (0, -1.0), (1, 2.0), (1, 0.5), (2, 7.0), (2, -7.0)] {
            let density = BoundaryDensity::new(&b, &idx[i], Exponent::Finite(p), rule).unwrap();
            let lhs = density.bookkeeping_integral(&s).unwrap();
            let w = omega(&s, &idx[i], Exponent::Finite(p));
            worst = worst.max(rel(lhs, w));
        }
        writeln!(detail, "  {id}: 6 (index, p) pairs checked").unwrap();
    }
    writeln!(detail, "  max relative deviation {worst:.3e} (tolerance 1e-9)").unwrap();
    Outcome {
        pass: worst <= 1e-9,
        detail,
    }
}

fn criterion_9() -> Outcome {
    let tol = Tolerances::default();
    let mut detail = String::new();
    let mut pass = true;
    let schedule = [1000, 2000, 4000];
    let disk = body("ball2");
    let uniform = BoundaryDensity::uniform(&disk, RuleSpec::default_for(2).unwrap()).unwrap();
    let mut scaled = Vec::new();
    for (j, &n) in schedule.iter().enumerate() {
        let e = randpoly::expected_deficit(&uniform, n, 10_000, 17 + j as u64).unwrap();
        writeln!(detail, "  disk uniform N={n}: N^2 deficit {:.6e} +- {:.2e}", e.scaled, e.scaled_std_error).unwrap();
        scaled.push((1.0 / n as f64, e.scaled, e.scaled_std_error));
    }
    let xs: Vec<f64> = scaled.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = scaled.iter().map(|s| s.1).collect();
    let sig: Vec<f64> = scaled.iter().map(|s| s.2).collect();
    let (limit, se) = randpoly::linear_intercept(&xs, &ys, &sig);
    let target = 4.0 * PI.powi(3);
    let err = rel(limit, target);
    pass &= err <= tol.monte_carlo;
    writeln!(detail, "  disk uniform: extrapolated {limit:.6e} +- {se:.2e}, target 4 pi^3 = {target:.6e}, relative error {err:.3e}").unwrap();

    let ellipse = body("ellipse_2_1");
    let r = randpoly::interpretation_check(&ellipse, &WeightIndex::zero(2), Exponent::Finite(1.0), &schedule, 10_000, 29, &tol).unwrap();
    for e in &r.estimates {
        writeln!(detail, "  ellipse p=1 N={}: N^2 deficit {:.6e} +- {:.2e}", e.n_points, e.scaled, e.scaled_std_error).unwrap();
    }
    writeln!(
        detail,
        "  ellipse p=1: extrapolated {:.6e} +- {:.2e}, target c_2 Z^2 w^1 = {:.6e}, relative error {:.3e}",
        r.extrapolated, r.extrapolated_std_error, r.target, r.relative_error
    )
    .unwrap();
    pass &= r.within_tolerance;
    Outcome { pass, detail }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run_all() -> (Vec<(usize, &'static str, Outcome)>, String) {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("ball law", criterion_1),
        ("ellipsoid closed form", criterion_2),
        ("homogeneity and rotation invariance", criterion_3),
        ("three-exponent, volume-ratio and k-interpolation inequalities", criterion_4),
        ("monotonicity in p", criterion_5),
        ("entropy-power limits", criterion_6),
        ("divergence algebra", criterion_7),
        ("density exponent bookkeeping", criterion_8),
        ("random polytope Monte Carlo", criterion_9),
    ];
    let mut transcript = String::new();
    let mut outcomes = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        writeln!(transcript, "criterion {} ({name}): {}\n{}", i + 1, verdict(o.pass), o.detail).unwrap();
        outcomes.push((i + 1, *name, o));
    }
    (outcomes, transcript)
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful for this target
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let start = Instant::now();
    let (first, transcript) = run_all();
    let mut unexpected = 0;
    for (i, name, o) in &first {
        let known = KNOWN_FAILURES.contains(i);
        println!(
            "criterion {i:>2} [{}] {name}{}",
            verdict(o.pass),
            if !o.pass && known { " (known failure: statement does not hold as written)" } else { "" }
        );
        print!("{}", o.detail);
        if !o.pass && !known {
            unexpected += 1;
        }
        if o.pass && known {
            println!("  note: listed as a known failure but passed");
        }
    }
    let (_, again) = run_all();
    let identical = transcript == again;
    println!("criterion 10 [{}] determinism: repeated run of criteria 1-9 is byte-identical", verdict(identical));
    if !identical {
        unexpected += 1;
    }
    println!("acceptance finished in {:.1} s; unexpected failures: {unexpected}", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
