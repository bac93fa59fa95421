//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use lplc::criteria::{self, Endpoint, VerdictKind};
use lplc::formulas::{p_prod, s_sum};
use lplc::hardy::{self, HardyForm};
use lplc::multidim;
use lplc::potdsl::{self, PotentialSource};
use lplc::quad::gauss_legendre;
use lplc::refsol::{self, L2Verdict};
use lplc::special::{self, BesselKind};
use lplc::symalg::{apply_tau, int, rat, to_f64, LogPoly, Rational};
use lplc::weyl::{self, SLProblem, WeylKind, WeylOptions};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

const SEED: u64 = 20_240_517;

const EXACT_BUDGET: Duration = Duration::from_secs(5);
const EULER_BUDGET: Duration = Duration::from_secs(10);
const HARDY_BUDGET: Duration = Duration::from_secs(30);

const EULER_DEPTH: f64 = 1e-12;
const HARDY_TOL: f64 = 1e-8;
const HARDY_GRID: usize = 2000;
const BESSEL_CLOSED_FORM_TOL: f64 = 1e-10;
const BESSEL_WRONSKIAN_TOL: f64 = 1e-9;
const BESSEL_RESIDUAL_TOL: f64 = 1e-7;
const REDUCTION_TOL: f64 = 1e-8;
const L2_GROWTH: f64 = 1e4;
const L2_RATIO: f64 = 0.95;
const RANDOM_CASES: usize = 1000;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn alphas() -> [Rational; 6] {
    [int(-3), int(-1), int(0), rat(1, 2), int(1), rat(3, 2)]
}

fn c1_lemma_a1() -> Outcome {
    let mut count = 0;
    for a in alphas() {
        for n in 1..=4 {
            let r = apply_tau(&a, &criteria::q_alpha_N(&a, n).map_err(err)?, &refsol::y_N(n).map_err(err)?);
            ensure(r.is_zero(), || format!("alpha {a}, N {n}: residual {r}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} exact zeros"))
}

fn c2_lemma_a2() -> Outcome {
    let mut count = 0;
    for a in alphas() {
        for n in 1..=3 {
            for e in [rat(1, 10), rat(1, 2), int(1)] {
                let q = lplc::formulas::q_alpha_n_eps(&a, n, &e);
                let r = apply_tau(&a, &q, &lplc::formulas::y_n_eps(n, &e));
                ensure(r.is_zero(), || format!("alpha {a}, N {n}, eps {e}: residual {r}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} exact zeros"))
}

fn c3_euler_exact() -> Outcome {
    let y0 = LogPoly::x_pow(rat(-1, 2));
    for k in -6..=3 {
        let a = rat(k, 2);
        let q = lplc::formulas::q_alpha_0_beta(&a, &int(0));
        ensure(apply_tau(&a, &q, &y0).is_zero(), || format!("y_0 at alpha {a}"))?;
    }
    // (α, β, root of the discriminant)
    let cases = [
        (int(0), rat(3, 4), int(1)),
        (int(-1), rat(5, 4), int(2)),
        (rat(1, 2), rat(5, 16), int(1)),
        (int(-3), int(6), int(1)),
        (int(1), rat(3, 16), rat(1, 2)),
        (int(1), rat(1, 4), int(0)),
    ];
    for (a, b, root) in &cases {
        let q = criteria::q_alpha_0_beta(a, b).map_err(err)?;
        let center = (int(1) - a) / int(2);
        let y1 = LogPoly::x_pow(&center + root / int(2));
        let g2 = &center - root / int(2);
        let y2 = if *root == int(0) { LogPoly::monomial(int(1), g2, &[(1, int(1))]) } else { LogPoly::x_pow(g2) };
        for (j, y) in [(1u8, y1), (2, y2)] {
            ensure(apply_tau(a, &q, &y).is_zero(), || format!("alpha {a}, beta {b}, j {j}"))?;
            let listed = refsol::euler_solution_poly(a, b, j).map_err(err)?;
            ensure(listed == Some(y), || format!("solution table, alpha {a}, beta {b}, j {j}"))?;
        }
    }
    Ok(format!("10 base cases, {} exponent pairs", cases.len()))
}

fn random_poly(rng: &mut ChaCha8Rng) -> LogPoly {
    let r = |rng: &mut ChaCha8Rng| rat(rng.gen_range(-12..=12), rng.gen_range(1..=6));
    (0..rng.gen_range(0..=5))
        .map(|_| {
            let mut c = r(rng);
            if c == int(0) {
                c = int(1);
            }
            let p = r(rng);
            let mut depths: Vec<u32> = (1..=4).filter(|_| rng.gen_bool(0.4)).collect();
            depths.dedup();
            let logs: Vec<(u32, Rational)> = depths.into_iter().map(|k| (k, r(rng))).collect();
            LogPoly::monomial(c, p, &logs)
        })
        .sum()
}

fn c4_derivative_identities() -> Outcome {
    let x_inv = LogPoly::x_pow(int(-1));
    for n in 1..=4u32 {
        let lower = LogPoly::ln_product(1, n - 1, &int(-1));
        ensure(LogPoly::ln_pow(n, int(1)).differentiate() == -(&x_inv * &lower), || format!("(ln_{n})'"))?;
        let rhs = (&(&x_inv * &lower) * &LogPoly::ln_pow(n, rat(-3, 2))).scale(&rat(1, 2));
        ensure(LogPoly::ln_pow(n, rat(-1, 2)).differentiate() == rhs, || format!("(ln_{n}^-1/2)'"))?;
        let half = LogPoly::ln_product(1, n, &rat(-1, 2));
        let rhs = (&(&x_inv * &half) * &s_sum(n)).scale(&rat(1, 2));
        ensure(half.differentiate() == rhs, || format!("product of ln^-1/2 to {n}"))?;
        ensure(p_prod(n).differentiate() == &(&x_inv * &p_prod(n)) * &s_sum(n), || format!("P_{n}'"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..RANDOM_CASES {
        let (a, b) = (random_poly(&mut rng), random_poly(&mut rng));
        let c = rat(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        let lin = (&a.scale(&c) + &b).differentiate();
        ensure(lin == &a.differentiate().scale(&c) + &b.differentiate(), || format!("linearity, pair {i}"))?;
        let prod = (&a * &b).differentiate();
        ensure(prod == &(&a.differentiate() * &b) + &(&a * &b.differentiate()), || format!("product rule, pair {i}"))?;
    }
    Ok(format!("16 identities, {RANDOM_CASES} random pairs"))
}

fn euler_cases() -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for a in [int(-1), int(0), int(1)] {
        let t = rat(3, 4) - &a / int(2);
        out.push((a.clone(), &t + rat(1, 4)));
        out.push((a, t - rat(1, 4)));
    }
    out
}

fn c5_euler_agreement() -> Outcome {
    let mut agree = 0;
    let mut deepest: f64 = 0.0;
    for (a, c) in euler_cases() {
        let q = PotentialSource::symbolic(LogPoly::monomial(c.clone(), &a - int(2), &[])).map_err(err)?;
        let prob = SLProblem::power_weight(to_f64(&a), &q, Endpoint::Zero).map_err(err)?;
        let r = weyl::classify_endpoint(&prob, Endpoint::Zero, &WeylOptions::default()).map_err(err)?;
        let exact = criteria::classify_euler(&a, &c).kind;
        let want = if exact.is_limit_point() { WeylKind::LimitPoint } else { WeylKind::LimitCircle };
        ensure(r.kind == want, || format!("zero, alpha {a}, c {c}: {:?} vs {exact:?}", r.kind))?;
        ensure(r.deepest_x <= EULER_DEPTH, || format!("zero, alpha {a}, c {c}: reached {:e}", r.deepest_x))?;
        deepest = deepest.max(r.deepest_x);
        agree += 1;

        let prob = SLProblem::power_weight(to_f64(&a), &q, Endpoint::Infinity).map_err(err)?;
        let r = weyl::classify_endpoint(&prob, Endpoint::Infinity, &WeylOptions::default()).map_err(err)?;
        let w = criteria::default_infinity_window(1).map_err(err)?;
        let analytic = criteria::limit_point_at_infinity(&q, &a, 1, 1.0, w, 256).map_err(err)?;
        ensure(analytic.kind == VerdictKind::LimitPoint && r.kind == WeylKind::LimitPoint, || {
            format!("infinity, alpha {a}, c {c}: {:?} vs {:?}", r.kind, analytic.kind)
        })?;
        agree += 1;
    }
    Ok(format!("{agree}/12 agree, deepest probe {deepest:.1e}"))
}

fn c6_log_refined() -> Outcome {
    let a = int(0);
    let q_lp = criteria::threshold_lp(&a, 1, &rat(1, 10)).map_err(err)?;
    let q_lc = criteria::threshold_lc(&a, 1, &rat(1, 4)).map_err(err)?;
    let mut notes = Vec::new();
    for (q, lp) in [(q_lp, true), (q_lc, false)] {
        let src = PotentialSource::symbolic(q).map_err(err)?;
        let analytic = criteria::classify_at_zero(&src, &a, &Default::default()).map_err(err)?.kind;
        let ok = if lp { analytic.is_limit_point() } else { analytic == VerdictKind::LimitCircle };
        ensure(ok, || format!("analytic route gave {analytic:?}"))?;
        let prob = SLProblem::power_weight(0.0, &src, Endpoint::Zero).map_err(err)?;
        let numeric = weyl::classify_endpoint(&prob, Endpoint::Zero, &WeylOptions::default()).map_err(err)?.kind;
        let opposite = if lp { WeylKind::LimitCircle } else { WeylKind::LimitPoint };
        ensure(numeric != opposite, || format!("numeric route gave the opposite class {numeric:?}"))?;
        notes.push(format!("{analytic:?}/{numeric:?}"));
    }
    Ok(notes.join(", "))
}

fn c7_hardy() -> Outcome {
    let mut worst = f64::INFINITY;
    for a in [-1, 0, 1] {
        let r = hardy::hardy_check(HardyForm::Power, &int(a), 0, 1.0, 1.0, 1e-6, HARDY_GRID).map_err(err)?;
        ensure(r.min_quotient >= -HARDY_TOL, || format!("power form alpha {a}: {}", r.min_quotient))?;
        worst = worst.min(r.min_quotient);
    }
    let refined =
        hardy::hardy_check(HardyForm::Refined, &int(0), 1, 1.0, std::f64::consts::E, 1e-6, HARDY_GRID).map_err(err)?;
    ensure(refined.pass, || format!("refined form: {}", refined.min_quotient))?;
    let v = hardy::hardy_potential(HardyForm::Power, &int(0), 0, &rat(1, 10));
    let f = hardy::assemble(0.0, &v, 1.0, 1.0, HARDY_GRID).map_err(err)?;
    let sharp = hardy::min_rayleigh(&f).map_err(err)?;
    ensure(sharp < 0.0, || format!("delta = 0.1 stays nonnegative: {sharp}"))?;
    Ok(format!("power min {worst:.3e}, refined {:.3e}, delta=0.1 gives {sharp:.3e}", refined.min_quotient))
}

fn c8_multidim() -> Outcome {
    let mut count = 0;
    for n in 2..=6u32 {
        for l in 0..=4u32 {
            for a in [int(-1), int(0), int(1), rat(3, 2)] {
                let ch = multidim::channel(n, l, &a).map_err(err)?;
                let (nr, lr) = (int(n as i64), int(l as i64));
                let g = ch.gamma_sq.clone().ok_or("gamma undefined")?;
                let lhs = (int(2) - &a) * (int(2) - &a) * g - (int(1) - &a) * (int(1) - &a);
                let rhs = (&nr - int(1)) * (&nr - int(3) + &a * int(2)) + &lr * (&lr + &nr - int(2)) * int(4);
                ensure(lhs == rhs, || format!("gamma identity n {n}, l {l}, alpha {a}"))?;
                let mut points = vec![a.clone()];
                points.extend(multidim::near_threshold(&ch));
                for p in points {
                    let c = multidim::channel(n, l, &p).map_err(err)?;
                    ensure(multidim::classify_channel(&c) == multidim::classify_by_threshold(&c), || {
                        format!("table vs threshold n {n}, l {l}, alpha {p}")
                    })?;
                    count += 1;
                }
                let defect = multidim::threshold_identity_defect(n, &a);
                ensure(defect == int(0), || format!("coefficient identity n {n}, alpha {a}: {defect}"))?;
            }
        }
    }
    Ok(format!("100 identities, {count} classifications"))
}

fn c9_bessel() -> Outcome {
    let mut worst_closed: f64 = 0.0;
    for i in 0..400 {
        let u = 0.1 + 9.9 * i as f64 / 399.0;
        let env = (2.0 / (std::f64::consts::PI * u)).sqrt();
        let j = special::bessel(0.5, BesselKind::J, u).map_err(err)?;
        // relative to the envelope, which stays meaningful at the zeros of sin
        let e = (j - env * u.sin()).abs() / env;
        ensure(e <= BESSEL_CLOSED_FORM_TOL, || format!("J_1/2({u}): {e:e}"))?;
        worst_closed = worst_closed.max(e);
    }
    for u in [0.1, 1.0, 5.0] {
        let exact = (2.0 / (std::f64::consts::PI * u)).sqrt() * u.sin();
        let e = ((special::bessel(0.5, BesselKind::J, u).map_err(err)? - exact) / exact).abs();
        ensure(e <= BESSEL_CLOSED_FORM_TOL, || format!("J_1/2({u}) relative: {e:e}"))?;
    }
    let mut worst_w: f64 = 0.0;
    for nu in [0.0, 1.0 / 3.0, 1.0, 2.5, 7.0] {
        for u in [0.2, 0.7, 1.5, 4.0, 9.0, 17.0] {
            let w = special::bessel(nu, BesselKind::J, u).map_err(err)?
                * special::bessel_derivative(nu, BesselKind::Y, u).map_err(err)?
                - special::bessel_derivative(nu, BesselKind::J, u).map_err(err)?
                    * special::bessel(nu, BesselKind::Y, u).map_err(err)?;
            let exact = 2.0 / (std::f64::consts::PI * u);
            let e = ((w - exact) / exact).abs();
            ensure(e <= BESSEL_WRONSKIAN_TOL, || format!("Wronskian nu {nu}, u {u}: {e:e}"))?;
            worst_w = worst_w.max(e);
        }
    }
    let tuples: [(Rational, f64, Complex64); 6] = [
        (int(0), 1.0 / 3.0, Complex64::new(1.0, 0.0)),
        (int(0), 1.0, Complex64::new(2.0, 0.0)),
        (rat(1, 2), 0.5, Complex64::new(0.0, 1.0)),
        (int(-1), 2.0, Complex64::new(1.0, 1.0)),
        (int(1), 0.0, Complex64::new(4.0, 0.0)),
        (rat(3, 2), 1.5, Complex64::new(-1.0, 0.5)),
    ];
    let mut worst_r: f64 = 0.0;
    for (beta, gamma, z) in tuples {
        let b = to_f64(&beta);
        let coupling = refsol::bessel_coupling(b, gamma);
        for j in [1u8, 2] {
            for x in [0.15, 0.4, 0.9, 1.7] {
                let f = |t: f64| refsol::bessel_solution(&beta, gamma, z, j, t);
                let y = f(x).map_err(err)?;
                let kinetic = refsol::residual_stencil(b, f, x, 1e-3 * x).map_err(err)?;
                let pot = y * coupling * x.powf(b - 2.0);
                let res = (kinetic + pot - z * y).norm() / (kinetic.norm() + pot.norm() + (z * y).norm());
                ensure(res <= BESSEL_RESIDUAL_TOL, || {
                    format!("beta {beta}, gamma {gamma}, z {z}, j {j}, x {x}: {res:e}")
                })?;
                worst_r = worst_r.max(res);
            }
        }
    }
    Ok(format!("closed form {worst_closed:.1e}, Wronskian {worst_w:.1e}, residual {worst_r:.1e}"))
}

fn gl_piece<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (x, w) = gauss_legendre(20);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(t, wt)| wt * f(c + h * t)).sum::<f64>() * h
}

/// `x^α W(y_N, ỹ_N)` with a sixth-order stencil for `ỹ'`; neighbouring values of
/// `ỹ` reuse the anchored integral plus short Gauss–Legendre pieces.
fn reduction_wronskian(a: i64, base: &LogPoly, anchor: f64, x: f64) -> Result<f64, String> {
    let y = base.compile();
    let dy = base.differentiate().compile();
    let yv = |t: f64| y.eval(t).unwrap_or(f64::NAN);
    let integrand = |t: f64| t.powi(-a as i32) / (yv(t) * yv(t));
    let big = refsol::y_tilde(&int(a), base, anchor, x).map_err(err)? / yv(x);
    let h = 1e-3 * x;
    let tilde = |k: f64| {
        let t = x + k * h;
        yv(t) * (big - gl_piece(integrand, x.min(t), x.max(t)) * k.signum())
    };
    let diff = |k: f64| tilde(k) - tilde(-k);
    let d = (45.0 * diff(1.0) - 9.0 * diff(2.0) + diff(3.0)) / (60.0 * h);
    Ok(x.powi(a as i32) * (yv(x) * d - dy.eval(x).map_err(err)? * tilde(0.0)))
}

fn c10_reduction_and_l2() -> Outcome {
    let mut worst: f64 = 0.0;
    for (a, n, anchor) in [(0i64, 1u32, 0.5), (1, 2, 0.3)] {
        let base = refsol::y_N(n).map_err(err)?;
        for x in criteria::geometric_grid(1e-3, 0.5 * anchor, 10) {
            let w = reduction_wronskian(a, &base, anchor, x)?;
            ensure((w + 1.0).abs() <= REDUCTION_TOL, || format!("alpha {a}, N {n}, x {x:e}: {w}"))?;
            worst = worst.max((w + 1.0).abs());
        }
    }
    for n in 1..=2 {
        let d = refsol::l2_near_zero(&refsol::y_N(n).map_err(err)?).map_err(err)?;
        let total: f64 = d.windows.iter().sum();
        ensure(d.verdict == L2Verdict::Diverges && total >= L2_GROWTH * d.windows[0], || {
            format!("y_{n}: {:?}", d.verdict)
        })?;
        let c = refsol::l2_near_zero(&refsol::y_N_eps(n, &rat(1, 2)).map_err(err)?).map_err(err)?;
        let w = &c.windows;
        let tail_ok = w.len() >= 7 && w[w.len() - 7..].windows(2).all(|p| p[1] / p[0] < L2_RATIO);
        ensure(c.verdict == L2Verdict::Converges && tail_ok, || format!("y_{n},1/2: {:?}", c.verdict))?;
    }
    Ok(format!("max |W + 1| = {worst:.1e}, L2 dichotomy for N = 1, 2"))
}

fn c11_parser() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    for i in 0..RANDOM_CASES {
        let p = random_poly(&mut rng);
        let back = potdsl::parse(&p.to_string()).map_err(err)?;
        ensure(back == p, || format!("round trip {i}: {p}"))?;
    }
    let mut formulas = 0;
    for a in [int(-1), int(0), rat(1, 2), int(1), rat(3, 2)] {
        for n in 1..=4 {
            for e in criteria::eps_ladder() {
                for q in [
                    criteria::threshold_lp(&a, n, &e).map_err(err)?,
                    criteria::threshold_lc(&a, n, &e).map_err(err)?,
                    criteria::q_alpha_N(&a, n).map_err(err)?,
                    criteria::q_alpha_N_eps(&a, n, &e).map_err(err)?,
                ] {
                    let back = potdsl::parse(&q.to_string()).map_err(err)?;
                    ensure(back == q && back.to_string() == q.to_string(), || format!("formula {q}"))?;
                    formulas += 1;
                }
            }
        }
    }
    Ok(format!("{RANDOM_CASES} round trips, {formulas} formulas"))
}

fn c12_reproducibility() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_lplc");
    let dir = tempfile::tempdir().map_err(err)?;
    let runs: [&[&str]; 9] = [
        &["classify", "--alpha", "0", "--q", "3/4 * x^-2", "--weyl"],
        &["classify", "--alpha", "-1", "--q", "x^-3", "--format", "text"],
        &["classify-euler", "--alpha", "1", "--c", "1/4", "--format", "csv"],
        &["verify", "--lemma", "A2", "--alpha", "1/2", "--max-N", "3", "--random-alphas", "2", "--seed", "3"],
        &["weyl", "--alpha", "1", "--q", "0", "--endpoint", "infinity", "--format", "csv"],
        &["hardy", "--alpha", "0", "--N", "1", "--gamma", "2.718281828459045", "--n-grid", "500"],
        &["multidim", "--n", "3", "--alpha", "1/2", "--format", "csv"],
        &[
            "solution", "--kind", "bessel", "--beta", "1/2", "--gamma", "0.5", "--z", "0,1", "--points", "6",
            "--format", "text",
        ],
        &["sweep", "--kind", "multidim", "--format", "csv"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let first = Command::new(bin).args(*args).output().map_err(err)?;
        ensure(first.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&first.stderr)))?;
        let path = dir.path().join(format!("report{i}"));
        std::fs::write(&path, &first.stdout).map_err(err)?;
        let second = Command::new(bin).arg("--config").arg(&path).output().map_err(err)?;
        ensure(second.status.success() && second.stdout == first.stdout, || format!("{args:?} differs on rerun"))?;
    }
    Ok(format!("{} reports reproduced", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 12] = [
        ("exact residuals of y_N", c1_lemma_a1, Some(EXACT_BUDGET)),
        ("exact residuals of y_N,eps", c2_lemma_a2, Some(EXACT_BUDGET)),
        ("exact Euler solutions", c3_euler_exact, None),
        ("derivative identities", c4_derivative_identities, None),
        ("Euler family analytic/numeric agreement", c5_euler_agreement, Some(EULER_BUDGET)),
        ("log-refined discrimination", c6_log_refined, None),
        ("Hardy checks", c7_hardy, Some(HARDY_BUDGET)),
        ("multidimensional identities", c8_multidim, None),
        ("Bessel oracle", c9_bessel, None),
        ("reduction of order and L2 dichotomy", c10_reduction_and_l2, None),
        ("parser round trips", c11_parser, None),
        ("report reproducibility", c12_reproducibility, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(b)) = (&result, budget) {
            if elapsed > *b {
                result = Err(format!("took {:.2} s, budget {:.0} s", elapsed.as_secs_f64(), b.as_secs_f64()));
            }
        }
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({:.2} s)", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({:.2} s)", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
