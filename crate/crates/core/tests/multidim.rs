use lplc::criteria::{self, ClassifyOptions};
use lplc::multidim::{self, channel, classify_by_threshold, classify_channel, RadialChannel};
use lplc::potdsl::{PotentialSource, Samples};
use lplc::refsol;
use lplc::symalg::{int, rat, to_f64, Rational};
use lplc::weyl::EndpointClass;
use num_complex::Complex64;

fn alphas() -> [Rational; 4] {
    [int(-1), int(0), int(1), rat(3, 2)]
}

fn grid() -> impl Iterator<Item = RadialChannel> {
    (2..=6).flat_map(|n| (0..=4).flat_map(move |l| alphas().into_iter().map(move |a| channel(n, l, &a).unwrap())))
}

#[test]
fn gamma_identity() {
    for ch in grid() {
        let (n, l) = (int(ch.n as i64), int(ch.ell as i64));
        let a = &ch.alpha;
        let lhs = (int(2) - a) * (int(2) - a) * ch.gamma_sq.clone().unwrap() - (int(1) - a) * (int(1) - a);
        let rhs = (&n - int(1)) * (&n - int(3) + a * int(2)) + &l * (&l + &n - int(2)) * int(4);
        assert_eq!(lhs, rhs, "n {}, l {}, alpha {a}", ch.n, ch.ell);
        assert_eq!(multidim::gamma_identity_defect(&ch), Some(int(0)));
        // Euler exponents of the channel differ by (2-α)γ_α
        let spread_sq = (int(1) - a) * (int(1) - a) + &ch.coupling * int(4);
        assert_eq!(spread_sq, (int(2) - a) * (int(2) - a) * ch.gamma_sq.clone().unwrap());
    }
}

#[test]
fn threshold_coefficient_identity() {
    for n in 2..=6 {
        for a in alphas() {
            assert_eq!(multidim::threshold_identity_defect(n, &a), int(0));
        }
    }
}

#[test]
fn table_and_threshold_agree() {
    let mut checked = 0;
    for ch in grid() {
        let mut points = vec![ch.alpha.clone()];
        points.extend(multidim::near_threshold(&ch));
        for a in points {
            let c = channel(ch.n, ch.ell, &a).unwrap();
            let table = classify_channel(&c);
            assert_eq!(table, classify_by_threshold(&c), "n {}, l {}, alpha {a}", c.n, c.ell);
            let euler = criteria::classify_euler(&a, &c.coupling).kind.is_limit_point();
            assert_eq!(table.class_at_zero == EndpointClass::LimitPoint, euler);
            checked += 1;
        }
    }
    assert_eq!(checked, 5 * 5 * 4 * 3);
}

#[test]
fn alpha_star_decreases_in_ell() {
    for n in 2..=6 {
        let stars: Vec<Rational> = (0..=6).map(|l| channel(n, l, &int(0)).unwrap().alpha_star).collect();
        assert!(stars.windows(2).all(|w| w[1] < w[0]), "n {n}");
        assert_eq!(stars[0], int(2) - rat(n as i64, 2));
    }
}

#[test]
fn channel_solutions_solve_the_radial_equation() {
    for ch in grid().filter(|c| c.ell <= 2) {
        let a = to_f64(&ch.alpha);
        let c = to_f64(&ch.coupling);
        for j in 0..2 {
            for x in [0.05, 0.2, 0.6] {
                let f = |t: f64| {
                    Ok(Complex64::new(
                        multidim::channel_solutions(&ch, t).map(|s| if j == 0 { s.0 } else { s.1 })?,
                        0.0,
                    ))
                };
                let y = f(x).unwrap();
                let kinetic = refsol::residual_stencil(a, f, x, 1e-3 * x).unwrap();
                let pot = y * c * x.powf(a - 2.0);
                let res = (kinetic + pot).norm();
                // natural size of each term, so channels with zero coupling still get a scale
                let size = kinetic.norm() + pot.norm() + y.norm() * x.powf(a - 2.0);
                assert!(res <= 1e-6 * size, "n {}, l {}, alpha {}, j {j}", ch.n, ch.ell, ch.alpha);
            }
        }
    }
}

#[test]
fn sampled_and_symbolic_sources_agree() {
    let opts = ClassifyOptions::default();
    for (n, l, a) in [(3, 1, int(0)), (2, 0, int(-1)), (4, 0, int(1))] {
        let ch = channel(n, l, &a).unwrap();
        let sym = PotentialSource::parse("x^-1").unwrap();
        let pts = criteria::geometric_grid(1e-13, 1e-2, 2000).into_iter().map(|x| (x, 1.0 / x)).collect();
        let sampled = PotentialSource::Sampled(Samples::new(pts).unwrap());
        let v1 = multidim::theorem41_check(&ch, &sym, &opts).unwrap();
        let v2 = multidim::theorem41_check(&ch, &sampled, &opts).unwrap();
        assert_eq!(v1.kind.is_limit_point(), v2.kind.is_limit_point(), "n {n}, l {l}, alpha {a}");
    }
}

#[test]
fn dimension_guard() {
    assert!(channel(1, 0, &int(0)).is_err());
    let ch = channel(3, 0, &int(2)).unwrap();
    assert!(ch.alpha_is_two());
    assert_eq!(classify_channel(&ch).class_at_zero, EndpointClass::LimitPoint);
}
