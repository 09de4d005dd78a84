use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use soliton_core::compact::{
    build_h, compute_c2, find_c1, g_series, g_series_summary, h_derivative, sign_changes,
    step2_coefficients, step2_term, CompactProfile, Endpoint, RootCertificate,
};
use soliton_core::poly::RationalPoly;
use soliton_core::RadialProfile;

/// (n, k, c1, c2) from a 40-digit bisection on h and c2 = e^{(n-k)c1} q(c1).
const ORACLE: [(usize, usize, f64, f64); 7] = [
    (2, 1, -0.527_619_519_896_962_8, 1.015_767_839_493_897_5),
    (3, 1, -0.682_016_132_578_584_7, -2.255_443_237_763_740_1),
    (3, 2, -0.735_303_690_619_011_9, -1.717_484_024_032_887_3),
    (4, 3, -0.845_390_686_283_416, 3.889_385_897_266_751),
    (5, 1, -0.806_450_517_701_806_4, -31.898_631_634_191_03),
    (5, 4, -0.907_582_846_036_172_9, -11.311_584_627_025_317),
    (8, 7, -0.976_647_194_035_140_5, 941.888_691_580_047_9),
];

fn all_pairs(max_n: usize) -> impl Iterator<Item = (usize, usize)> {
    (2..=max_n).flat_map(|n| (1..n).map(move |k| (n, k)))
}

#[test]
fn h_for_n2_k1() {
    let h = build_h(2, 1).unwrap();
    assert_eq!(h.p(), &RationalPoly::from_integers(&[2, -4, 3]));
    assert_eq!(h.q(), &RationalPoly::from_integers(&[2, 0, -1]));
    assert!(h.value_at_zero().is_zero());
}

#[test]
fn invalid_pairs_are_rejected() {
    assert!(build_h(2, 2).is_err());
    assert!(build_h(3, 0).is_err());
    assert!(find_c1(1, 1, 1e-12).is_err());
}

#[test]
fn derivatives_vanish_exactly_at_zero() {
    for (n, k) in all_pairs(8) {
        let h = build_h(n, k).unwrap();
        for i in 0..=n {
            assert!(h_derivative(&h, i).value_at_zero().is_zero(), "n={n} k={k} i={i}");
        }
        assert!(h_derivative(&h, n + 1).value_at_zero().is_positive());
    }
}

#[test]
fn small_case_derivatives() {
    let h = build_h(2, 1).unwrap();
    let d1 = h_derivative(&h, 1);
    // p₁ = 2p + p' = 6x² - 2x, q₁ = -2x
    assert_eq!(d1.p(), &RationalPoly::from_integers(&[0, -2, 6]));
    assert_eq!(d1.q(), &RationalPoly::from_integers(&[0, -2]));
    let d3 = h_derivative(&h, 3);
    assert!(d3.q().is_zero());
    for &x in &[0.0, 0.5, 1.0, 2.0, 5.0] {
        assert!(d3.eval(x) > 0.0, "x={x}");
    }
}

#[test]
fn order_n_plus_one_derivative_is_positive_on_samples() {
    for (n, k) in all_pairs(8) {
        let d = h_derivative(&build_h(n, k).unwrap(), n + 1);
        for i in 0..50 {
            let x = 5.0 * i as f64 / 49.0;
            assert!(d.eval(x) > 0.0, "n={n} k={k} x={x}");
        }
    }
}

#[test]
fn closed_sum_matches_derivative_coefficients() {
    for (n, k) in all_pairs(8) {
        let d = h_derivative(&build_h(n, k).unwrap(), n + 1);
        let closed = step2_coefficients(n, k).unwrap();
        for (i, c) in closed.iter().enumerate() {
            assert_eq!(&d.p().coeff(i), c, "n={n} k={k} i={i}");
            assert!(c.is_positive());
        }
    }
}

#[test]
fn step2_terms_are_integral_for_j_at_least_one() {
    let b = step2_term(3, 1, 0, 2);
    // C(4,2) 2² 4 (4-2) = 192
    assert_eq!(b, BigRational::from_integer(192.into()));
}

#[test]
fn sign_at_minus_one() {
    for (n, k) in all_pairs(8) {
        let h = build_h(n, k).unwrap();
        let v = h.eval(-1.0);
        let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(v.signum(), expected, "n={n} k={k}");
        let (nf, kf) = (n as f64, k as f64);
        assert!((-2.0 * kf).exp() * (nf + kf).powi(n as i32) > (nf - kf).powi(n as i32));
    }
}

#[test]
fn exactly_one_root_on_the_negative_unit_interval() {
    for (n, k) in all_pairs(8) {
        let h = build_h(n, k).unwrap();
        assert_eq!(sign_changes(&h, -1.0 + 1e-6, -1e-6, 10_000).len(), 1, "n={n} k={k}");
        assert!(sign_changes(&h, 1e-6, 20.0, 10_000).is_empty(), "n={n} k={k}");
    }
}

#[test]
fn bisection_oracle_reproduces_frozen_roots() {
    // plain bisection on the direct form, independent of the library root finder
    for &(n, k, c1, _) in &ORACLE {
        let h = build_h(n, k).unwrap();
        let f = |x: f64| {
            let (e, q) = h.parts(x);
            e - q
        };
        let (mut lo, mut hi) = (-0.999, -0.3);
        let flo = f(lo);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((0.5 * (lo + hi) - c1).abs() < 1e-12, "n={n} k={k}");
    }
}

#[test]
fn certificates_match_oracle() {
    for &(n, k, c1, c2) in &ORACLE {
        let cert = RootCertificate::compute(n, k).unwrap();
        assert!((cert.c1 - c1).abs() < 1e-12, "n={n} k={k}: {}", cert.c1);
        assert!(((cert.c2 - c2) / c2).abs() < 1e-10, "n={n} k={k}: {}", cert.c2);
        assert!(cert.bracket.0 <= cert.c1 && cert.c1 <= cert.bracket.1);
        cert.validate().unwrap();
    }
}

#[test]
fn smallest_certificate() {
    let c1 = find_c1(2, 1, 1e-12).unwrap();
    assert!((c1 + 0.5276).abs() < 5e-4);
    let (c2, r48, r49) = compute_c2(2, 1, c1).unwrap();
    assert!((c2 - c1.exp() * (2.0 - c1 * c1)).abs() < 1e-15);
    assert!((c2 - 1.016).abs() < 2e-3);
    assert_eq!(r48, 0.0);
    assert!(r49 < 1e-8);
}

#[test]
fn all_certificates_close_up() {
    for (n, k) in all_pairs(8) {
        let cert = RootCertificate::compute(n, k).unwrap();
        cert.validate().unwrap_or_else(|e| panic!("n={n} k={k}: {e}"));
        let (l, r) = cert.closure_defects();
        assert!(l < 1e-9 && r < 1e-9, "n={n} k={k}: {l:e} {r:e}");
    }
}

#[test]
fn residues() {
    let p = CompactProfile::new(2, 1).unwrap();
    assert!((p.residue_at(Endpoint::Left) - 1.0).abs() < 1e-6);
    assert!((p.residue_at(Endpoint::Right) + 1.0).abs() < 1e-6);
    let p = CompactProfile::new(4, 3).unwrap();
    assert!((p.residue_at(Endpoint::Left) - 1.0 / 3.0).abs() < 1e-6);
    assert!((p.residue_at(Endpoint::Right) + 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn largest_certificate_is_fast() {
    let start = std::time::Instant::now();
    RootCertificate::compute(8, 7).unwrap().validate().unwrap();
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn phi_prime_at_the_midpoint() {
    // direct evaluation of the closed form with the oracle constants
    for &(n, k, expected) in &[
        (2, 1, 0.467_325_877_8),
        (3, 1, 0.472_227_300_6),
        (3, 2, 1.557_424_464),
        (4, 3, 2.812_797_847),
    ] {
        let p = CompactProfile::new(n, k).unwrap();
        let v = p.phi_prime_of_phi(n as f64).unwrap();
        assert!((v - expected).abs() < 1e-9, "n={n} k={k}: {v}");
    }
}

#[test]
fn phi_prime_vanishes_at_the_ends_and_is_positive_inside() {
    for (n, k) in all_pairs(6) {
        let p = CompactProfile::new(n, k).unwrap();
        let (a, b) = p.phi_domain();
        assert_eq!(p.phi_prime_of_phi(a).unwrap(), 0.0);
        assert_eq!(p.phi_prime_of_phi(b).unwrap(), 0.0);
        assert!(p.phi_prime_of_phi(a - 1e-3).is_err());
        for i in 1..500 {
            let phi = a + (b - a) * i as f64 / 500.0;
            assert!(p.phi_prime_of_phi(phi).unwrap() > 0.0, "n={n} k={k} φ={phi}");
        }
        // linear vanishing with slope k at the left end and -k at the right
        let eps = 1e-9;
        let left = p.phi_prime_of_phi(a + eps).unwrap() / eps;
        let right = p.phi_prime_of_phi(b - eps).unwrap() / eps;
        assert!((left - k as f64).abs() < 1e-5 && (right - k as f64).abs() < 1e-5);
    }
}

#[test]
fn ode_residual_vanishes() {
    // Integrate dφ/dt = φ'(φ) from φ(0) = n and compare φ'' by differences.
    let p = CompactProfile::new(2, 1).unwrap();
    let s = p.state_at_phi(2.0).unwrap();
    let h = 1e-4;
    let up = p.state_near(&s, h).unwrap();
    let down = p.state_near(&s, -h).unwrap();
    let d2 = (up.phi1 - down.phi1) / (2.0 * h);
    let d3 = (up.phi2 - down.phi2) / (2.0 * h);
    assert!((d2 - s.phi2).abs() < 1e-5 * s.phi2.abs().max(1.0), "{d2} vs {}", s.phi2);
    assert!((d3 - s.phi3).abs() < 1e-5 * s.phi3.abs().max(1.0), "{d3} vs {}", s.phi3);
    let ode = s.phi2 / s.phi1 + (1.0 / s.phi + p.c1()) * s.phi1 - (2.0 - s.phi);
    assert!(ode.abs() < 1e-14);
}

#[test]
fn stationary_point_of_phi_prime() {
    for (n, k) in [(2, 1), (3, 2), (5, 3)] {
        let p = CompactProfile::new(n, k).unwrap();
        let (a, b) = p.phi_domain();
        let f = |x: f64| p.phi_second_of_phi(x).unwrap();
        let (mut lo, mut hi) = (a + 1e-3, b - 1e-3);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let phi = 0.5 * (lo + hi);
        let p1 = p.phi_prime_of_phi(phi).unwrap();
        let lhs = n as f64 - phi;
        let rhs = ((n as f64 - 1.0) / phi + p.c1()) * p1;
        assert!((lhs - rhs).abs() < 1e-9, "n={n} k={k}");
    }
}

#[test]
fn second_derivative_matches_differences_in_t() {
    let p = CompactProfile::new(2, 1).unwrap();
    // φ'' = dφ'/dt = (dφ'/dφ) φ'; difference in φ, then multiply
    for &phi in &[1.3, 2.0, 2.6] {
        let h = 1e-5;
        let dphi = (p.phi_prime_of_phi(phi + h).unwrap() - p.phi_prime_of_phi(phi - h).unwrap()) / (2.0 * h);
        let fd = dphi * p.phi_prime_of_phi(phi).unwrap();
        assert!((fd - p.phi_second_of_phi(phi).unwrap()).abs() < 1e-5);
        // and via the t parameterization
        let t = p.t_of_phi(phi).unwrap();
        let ht = 1e-4;
        let up = p.state_at_t(t + ht).unwrap();
        let down = p.state_at_t(t - ht).unwrap();
        let fd_t = (up.phi1 - down.phi1) / (2.0 * ht);
        assert!((fd_t - p.phi_second_of_phi(phi).unwrap()).abs() < 1e-5, "φ={phi}");
    }
}

#[test]
fn near_left_end_the_second_derivative_follows_the_first() {
    let p = CompactProfile::new(3, 1).unwrap();
    let a = 2.0;
    for &eps in &[1e-3, 1e-5, 1e-7] {
        let p1 = p.phi_prime_of_phi(a + eps).unwrap();
        let p2 = p.phi_second_of_phi(a + eps).unwrap();
        // φ' ≈ kε and φ'' ≈ k φ'
        assert!(p2 > 0.0 && (p2 / p1 - 1.0).abs() < 20.0 * eps, "ε={eps}: {}", p2 / p1);
    }
}

#[test]
fn t_of_phi_anchor_monotone_and_log_ends() {
    for (n, k) in [(2, 1), (3, 2), (4, 1), (8, 7)] {
        let p = CompactProfile::new(n, k).unwrap();
        let (a, b) = p.phi_domain();
        assert_eq!(p.t_of_phi(n as f64).unwrap(), 0.0);
        let ts: Vec<f64> = (1..=100)
            .map(|i| p.t_of_phi(a + (b - a) * i as f64 / 101.0).unwrap())
            .collect();
        assert!(ts.windows(2).all(|w| w[0] < w[1]), "n={n} k={k}");
        // t - (1/k) log(φ - a) converges at the left, t + (1/k) log(b - φ) at the right
        let kf = k as f64;
        let left = |e: f64| p.t_of_phi(a + e).unwrap() - e.ln() / kf;
        let right = |e: f64| p.t_of_phi(b - e).unwrap() + e.ln() / kf;
        assert!((left(1e-6) - left(1e-9)).abs() < 1e-5, "n={n} k={k}");
        assert!((right(1e-6) - right(1e-9)).abs() < 1e-5, "n={n} k={k}");
    }
}

#[test]
fn t_of_phi_against_plain_quadrature_away_from_poles() {
    // Simpson's rule on 1/φ' from n to n + k/2, where nothing is singular.
    let p = CompactProfile::new(3, 2).unwrap();
    let (lo, hi) = (3.0, 4.0);
    let m = 20_000;
    let h = (hi - lo) / m as f64;
    let f = |x: f64| 1.0 / p.phi_prime_of_phi(x).unwrap();
    let mut s = f(lo) + f(hi);
    for i in 1..m {
        s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let simpson = s * h / 3.0;
    assert!((simpson - p.t_of_phi(hi).unwrap()).abs() < 1e-10);
}

#[test]
fn inversion_round_trip() {
    let p = CompactProfile::new(3, 1).unwrap();
    for &t in &[-30.0, -5.0, -0.3, 0.0, 1.7, 12.0, 30.0] {
        let s = p.state_at(t).unwrap();
        assert!(s.phi1 > 0.0, "t={t}");
        if (2.0..=4.0).contains(&s.phi) && s.phi > 2.0 + 1e-9 && s.phi < 4.0 - 1e-9 {
            let back = p.t_of_phi(s.phi).unwrap();
            assert!((back - t).abs() < 1e-8 * (1.0 + t.abs()), "t={t}: {back}");
        }
    }
    // far out, φ - a ~ e^{kt} rounds away but φ' stays resolved
    let s = p.state_at(-60.0).unwrap();
    assert!(s.phi1 > 0.0 && s.phi1 < 1e-20);
}

#[test]
fn ricci_dichotomy() {
    for n in 2..=5 {
        let r = CompactProfile::new(n, 1).unwrap().ricci_positivity_report(2000).unwrap();
        assert!(r.first_positive() && r.second_positive(), "n={n}: {r:?}");
        for k in 2..n {
            let r = CompactProfile::new(n, k).unwrap().ricci_positivity_report(2000).unwrap();
            assert!(r.first_positive(), "n={n} k={k}");
            assert!(!r.second_positive(), "n={n} k={k}: {r:?}");
        }
    }
}

#[test]
fn g_series_has_one_sign_change() {
    for (n, k) in all_pairs(8) {
        let s = g_series_summary(n, k, n + 40).unwrap();
        assert!(s.leading_zero, "n={n} k={k}");
        assert!(s.positive_run >= 1, "n={n} k={k}");
        assert_eq!(s.sign_changes, 1, "n={n} k={k}");
    }
}

#[test]
fn g_series_matches_reflected_h() {
    // h(-y) e^{2ky} (-1)^{n+1} = n! Σ b_i yⁱ, compared numerically at small y
    for (n, k) in [(2, 1), (4, 3), (6, 2)] {
        let h = build_h(n, k).unwrap();
        let b: Vec<f64> = g_series(n, k, 80)
            .unwrap()
            .iter()
            .map(|c| soliton_core::poly::to_f64(c))
            .collect();
        let n_fact: f64 = (1..=n).map(|i| i as f64).product();
        for &y in &[0.1, 0.2] {
            let series = n_fact * b.iter().rev().fold(0.0, |acc, c| acc * y + c);
            let sign = if (n + 1) % 2 == 0 { 1.0 } else { -1.0 };
            let direct = sign * (2.0 * k as f64 * y).exp() * h.eval(-y);
            assert!((series - direct).abs() < 1e-12 * direct.abs().max(1e-300), "n={n} k={k} y={y}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_prime_positive_inside(n in 2usize..=6, k_off in 0usize..5, u in 0.001f64..0.999) {
        let k = 1 + k_off % (n - 1);
        let p = CompactProfile::new(n, k).unwrap();
        let (a, b) = p.phi_domain();
        let phi = a + (b - a) * u;
        prop_assert!(p.phi_prime_of_phi(phi).unwrap() > 0.0);
        let r = p.ricci_positivity_report(50).unwrap();
        prop_assert!(r.first_positive());
    }

    #[test]
    fn t_of_phi_is_increasing(u in 0.01f64..0.98, du in 0.001f64..0.01) {
        let p = CompactProfile::new(3, 2).unwrap();
        let (a, b) = p.phi_domain();
        let x = a + (b - a) * u;
        let y = a + (b - a) * (u + du);
        prop_assert!(p.t_of_phi(x).unwrap() < p.t_of_phi(y).unwrap());
    }
}

#[test]
fn distance_along_the_fiber() {
    let p = CompactProfile::new(2, 1).unwrap();
    // φ' ≈ k(φ - a) at the left end, so ρ ≈ 2√((φ - a)/k)
    let x = 1e-8;
    let rho = p.distance_of_phi(1.0 + x).unwrap();
    assert!((rho / (2.0 * x.sqrt()) - 1.0).abs() < 1e-6, "{rho}");
    // Simpson in φ between interior points
    let (lo, hi) = (1.3, 2.8);
    let m = 2000;
    let f = |s: f64| 1.0 / p.phi_prime_of_phi(s).unwrap().sqrt();
    let h = (hi - lo) / m as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..m {
        sum += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let simpson = sum * h / 3.0;
    let diff = p.distance_of_phi(hi).unwrap() - p.distance_of_phi(lo).unwrap();
    assert!((diff - simpson).abs() < 1e-9, "{diff} vs {simpson}");
    let full = p.distance_of_phi(3.0).unwrap();
    assert!(full > p.distance_of_phi(2.999).unwrap());
}
