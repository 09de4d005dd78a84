//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use soliton_core::compact::Endpoint;
use soliton_core::geometry::{
    curvature_frame, curvature_tensor_at, fd_curvature_tensor, holomorphy_ratio, log_radius, metric_field,
    metric_from_state, origin_curvature, ricci_from_state, sectional_curvature,
};
use soliton_core::profile::{series_coefficients, solve_phi_flat};
use soliton_core::verification::{
    check_asymptotics, check_positivity_profile, check_root_function, check_ricci_dichotomy, identity_defect,
    Perturbation, PerturbedProfile,
};
use soliton_core::{
    CompactProfile, GridSpec, OpenProfile, RadialProfile, Result, RootCertificate, TangentPair,
};

struct Outcome {
    passed: bool,
    summary: String,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into() }
    }
}

fn random_vec(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Random point with `log |z|² = t`.
fn random_point(rng: &mut StdRng, n: usize, t: f64) -> Vec<Complex64> {
    let z = random_vec(rng, n);
    let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let scale = (0.5 * t).exp() / norm;
    z.into_iter().map(|x| x * scale).collect()
}

fn cigar() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 0..100 {
        let t = -20.0 + 40.0 * i as f64 / 99.0;
        let exact = t.exp().ln_1p();
        let phi = solve_phi_flat(1, t, 1e-12)?;
        worst = worst.max(((phi - exact) / exact).abs());
    }
    Ok(Outcome::new(worst < 1e-10, format!("max relative error {worst:.2e} over 100 points")))
}

/// Minima of the three positivity quantities on `[-30, 30]`.
fn positivity<P: RadialProfile>(profile: &P) -> (bool, f64) {
    let r = check_positivity_profile(profile, &GridSpec::new(-30.0, 30.0, 601).unwrap());
    let margin = r
        .details
        .iter()
        .filter(|d| d.name.starts_with('('))
        .map(|d| d.margin)
        .fold(f64::INFINITY, f64::min);
    (r.passed, margin)
}

fn positivity_lemma() -> Result<Outcome> {
    let start = Instant::now();
    let mut ok = true;
    let mut margin = f64::INFINITY;
    for n in 1..=6 {
        let (passed, m) = positivity(&OpenProfile::flat(n)?);
        ok &= passed;
        margin = margin.min(m);
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome::new(
        ok && secs < 5.0,
        format!("smallest minimum {margin:.3e}, n = 1..6, {secs:.2} s"),
    ))
}

fn sectional() -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(1000);
    let mut worst = f64::INFINITY;
    let mut count = 0;
    let profiles = [OpenProfile::flat(2)?, OpenProfile::flat(3)?, OpenProfile::flat(4)?];
    while count < 1000 {
        let p = &profiles[count % 3];
        let n = p.dim();
        let t = rng.gen_range(-10.0..10.0);
        let pair = match TangentPair::new(random_vec(&mut rng, n), random_vec(&mut rng, n)) {
            Ok(pair) => pair,
            Err(_) => continue,
        };
        worst = worst.min(sectional_curvature(p, t, &pair)?);
        count += 1;
    }
    Ok(Outcome::new(worst > 0.0, format!("smallest sectional curvature {worst:.3e} over 1000 planes")))
}

fn curvature_oracle() -> Result<Outcome> {
    let mut rng = StdRng::seed_from_u64(4);
    let p = OpenProfile::flat(2)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let t = rng.gen_range(-3.0..3.0);
        let z = random_point(&mut rng, 2, t);
        let base = p.state_at(t)?;
        let fd = fd_curvature_tensor(metric_field(&p, base), &z, 1e-4)?;
        let closed = curvature_tensor_at(&p, &z)?;
        worst = worst.max(fd.max_difference(&closed) / closed.max_abs());
    }
    Ok(Outcome::new(worst < 1e-4, format!("max relative difference {worst:.2e} at 10 points")))
}

fn origin_limit() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut fit = 0.0f64;
    for n in 1..=3 {
        let a2 = -1.0 / (n as f64 + 1.0);
        let p = OpenProfile::flat(n)?;
        let at = curvature_frame(&p, -40.0)?.tensor();
        worst = worst.max(at.max_difference(&origin_curvature(n, a2)));
        // (φ - e^t)/e^{2t} at moderate t
        let x = (-12.0f64).exp();
        let fitted = (p.phi(-12.0)? - series_coefficients(n).0 * x) / (x * x);
        fit = fit.max((fitted - a2).abs());
    }
    Ok(Outcome::new(
        worst < 1e-3 && fit < 1e-3,
        format!("max difference {worst:.2e}, series fit off by {fit:.2e}"),
    ))
}

fn asymptotics() -> Result<Outcome> {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 1..=6 {
        let r = check_asymptotics(&OpenProfile::flat(n)?)?;
        ok &= r.passed;
        let failing: Vec<&str> = r.details.iter().filter(|d| !d.passed).map(|d| d.name.as_str()).collect();
        if !failing.is_empty() {
            notes.push(format!("n = {n}: {}", failing.join(", ")));
        }
    }
    let summary = if notes.is_empty() { "all windows met".to_string() } else { notes.join("; ") };
    Ok(Outcome::new(ok, summary))
}

fn print_asymptotic_values() -> Result<()> {
    for n in 1..=6 {
        let r = check_asymptotics(&OpenProfile::flat(n)?)?;
        for d in &r.details {
            let mark = if d.passed { "ok" } else { "FAIL" };
            println!("      n = {n} [{mark}] {}: {}", d.name, d.note);
        }
    }
    Ok(())
}

fn root_function() -> Result<Outcome> {
    let mut failed = Vec::new();
    let mut pairs = 0;
    for n in 2..=8 {
        for k in 1..n {
            pairs += 1;
            let r = check_root_function(n, k)?;
            for name in [
                "h^(i)(0) = 0, i ≤ n",
                "h^(n+1) > 0 on [0,5]",
                "sign h(-1) = (-1)^n",
                "one root in (-1,0)",
                "no root in (0,20] or [-20,-1]",
            ] {
                let d = r.detail(name).expect("detail present");
                if !d.passed {
                    failed.push(format!("({n},{k}) {name}"));
                }
            }
        }
    }
    let summary = if failed.is_empty() { format!("{pairs} pairs (n, k)") } else { failed.join("; ") };
    Ok(Outcome::new(failed.is_empty(), summary))
}

fn certificate() -> Result<Outcome> {
    let cert = RootCertificate::compute(2, 1)?;
    let p = CompactProfile::from_certificate(cert.clone());
    // (φ - 1)/φ' and (φ - 3)/φ' next to the poles
    let x = 1e-7;
    let near_left = x / p.phi_prime_of_phi(1.0 + x)?;
    let near_right = -x / p.phi_prime_of_phi(3.0 - x)?;
    let left = p.residue_at(Endpoint::Left);
    let right = p.residue_at(Endpoint::Right);
    let ok = (cert.c1 + 0.5276).abs() <= 5e-4
        && (cert.c2 - 1.016).abs() <= 2e-3
        && (left - 1.0).abs() < 1e-6
        && (right + 1.0).abs() < 1e-6
        && (near_left - 1.0).abs() < 1e-6
        && (near_right + 1.0).abs() < 1e-6;
    Ok(Outcome::new(
        ok,
        format!(
            "c1 = {:.6}, c2 = {:.6}, residues {left:.9}, {right:.9} (difference quotients {near_left:.9}, {near_right:.9})",
            cert.c1, cert.c2
        ),
    ))
}

fn ricci_dichotomy() -> Result<Outcome> {
    let mut failed = Vec::new();
    for n in 2..=5 {
        let r = check_ricci_dichotomy(&CompactProfile::new(n, 1)?, 2000)?;
        if !r.passed {
            failed.push(format!("({n},1)"));
        }
    }
    let mut indefinite = 0;
    for n in 3..=8 {
        for k in 2..n {
            let r = CompactProfile::new(n, k)?.ricci_positivity_report(2000)?;
            if r.second_positive() {
                failed.push(format!("({n},{k})"));
            } else {
                indefinite += 1;
            }
        }
    }
    let summary = if failed.is_empty() {
        format!("k = 1 positive for n = 2..5, k ≥ 2 indefinite in {indefinite} cases up to n = 8")
    } else {
        format!("unexpected sign for {}", failed.join(", "))
    };
    Ok(Outcome::new(failed.is_empty(), summary))
}

/// Worst relative and absolute defect of the Hessian identity and the
/// variance of the holomorphy ratio at 20 points.
fn identity_sample<P: RadialProfile>(profile: &P, t_lo: f64, t_hi: f64, seed: u64) -> Result<(f64, f64, f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = profile.dim();
    let shrinking = profile.kind().is_compact();
    let (mut rel, mut abs) = (0.0f64, 0.0f64);
    let mut ratios = Vec::new();
    for i in 0..20 {
        let t = t_lo + (t_hi - t_lo) * i as f64 / 19.0;
        let z = random_point(&mut rng, n, t);
        let s = profile.state_at(log_radius(&z)?)?;
        let mut target = ricci_from_state(&z, &s).matrix().clone();
        if shrinking {
            target -= metric_from_state(&z, &s).matrix();
        }
        let scale = target.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let d = identity_defect(profile, &z)?;
        rel = rel.max(d);
        abs = abs.max(d * scale);
        ratios.push(holomorphy_ratio(profile.kind(), &s));
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / ratios.len() as f64;
    Ok((rel, abs, var))
}

fn identity_holds(sample: (f64, f64, f64)) -> bool {
    sample.0 < 1e-5 && sample.1 < 1e-5 && sample.2 < 1e-10
}

fn describe(label: &str, s: (f64, f64, f64)) -> String {
    format!("{label}: defect {:.2e} relative, {:.2e} absolute, ratio variance {:.2e}", s.0, s.1, s.2)
}

fn soliton_identity() -> Result<Outcome> {
    let flat = identity_sample(&OpenProfile::flat(2)?, -8.0, 8.0, 10)?;
    let compact = identity_sample(&CompactProfile::new(2, 1)?, -4.0, 4.0, 11)?;
    Ok(Outcome::new(
        identity_holds(flat) && identity_holds(compact),
        format!("{}; {}", describe("flat n = 2", flat), describe("compact (2,1)", compact)),
    ))
}

fn negative_control() -> Result<Outcome> {
    let p = PerturbedProfile::new(OpenProfile::flat(2)?, Perturbation::Modulate(0.01));
    let (lemma_passed, margin) = positivity(&p);
    let identity = identity_sample(&p, -8.0, 8.0, 10)?;
    let fails_both = !lemma_passed && !identity_holds(identity);
    Ok(Outcome::new(
        fails_both,
        format!(
            "φ(1 + 0.01 sin t): positivity minimum {margin:.3e}, {}",
            describe("identity", identity)
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("cigar regression", cigar),
        ("positivity lemma", positivity_lemma),
        ("sectional positivity", sectional),
        ("curvature oracle", curvature_oracle),
        ("origin limit", origin_limit),
        ("asymptotics", asymptotics),
        ("root function exact suite", root_function),
        ("certificate regression", certificate),
        ("ricci dichotomy", ricci_dichotomy),
        ("soliton identity", soliton_identity),
        ("negative control", negative_control),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:>2} {name} ({:.2} s): {}",
            i + 1,
            clock.elapsed().as_secs_f64(),
            outcome.summary
        );
        if *name == "asymptotics" && !outcome.passed {
            let _ = print_asymptotic_values();
        }
        if !outcome.passed {
            failed.push(i + 1);
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s",
        criteria.len() - failed.len(),
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
