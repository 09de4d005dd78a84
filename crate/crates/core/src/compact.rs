//! Shrinking solitons on the compact bundles `M_k`.
//!
//! Here `φ` runs over `(n-k, n+k)` and satisfies
//!
//! ```text
//! φ''/φ' + ((n-1)/φ + c₁) φ' = n - φ,
//! ```
//!
//! whose first integral gives `φ' = -D(φ) / (c₁^{n+1} φ^{n-1})` with
//!
//! ```text
//! D(φ) = c₁ⁿ φⁿ + Σ_{j<n} (-1)^{n-j} (n!/j!) (1+c₁) c₁ʲ φʲ - c₂ e^{-c₁φ}.
//! ```
//!
//! The constants are pinned by requiring simple poles of `1/φ'` at both
//! endpoints, which reduces to `c₁` being the root in `(-1, 0)` of
//! `h(x) = e^{2kx} p(x) - q(x)`.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Result, SolitonError};
use crate::poly::{factorial, integer, pow_rational, to_f64, RationalPoly};
use crate::profile::{Normalization, ProfileState, RadialProfile, SolitonKind};
use crate::quadrature::{integrate, QuadratureOptions};

/// Number of Taylor terms of `h` kept for evaluation near the origin.
const TAYLOR_TERMS: usize = 80;
/// Below this `|x|` the Taylor form of `h` is used; it vanishes to order
/// `n + 1` at the origin and the direct form loses every digit there.
const TAYLOR_RADIUS: f64 = 0.25;

/// `h(x) = e^{rate·x} p(x) - q(x)` with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyExpPair {
    p: RationalPoly,
    q: RationalPoly,
    rate: BigRational,
    p_f64: Vec<f64>,
    q_f64: Vec<f64>,
    rate_f64: f64,
    taylor: OnceLock<Vec<f64>>,
}

impl PolyExpPair {
    pub fn new(p: RationalPoly, q: RationalPoly, rate: BigRational) -> Self {
        Self {
            p_f64: p.to_f64_coeffs(),
            q_f64: q.to_f64_coeffs(),
            rate_f64: to_f64(&rate),
            p,
            q,
            rate,
            taylor: OnceLock::new(),
        }
    }

    pub fn p(&self) -> &RationalPoly {
        &self.p
    }

    pub fn q(&self) -> &RationalPoly {
        &self.q
    }

    pub fn rate(&self) -> &BigRational {
        &self.rate
    }

    /// Next derivative: `(p, q) ↦ (rate·p + p', q')`.
    pub fn derivative(&self) -> Self {
        let p = &self.p.scale(&self.rate) + &self.p.derivative();
        Self::new(p, self.q.derivative(), self.rate.clone())
    }

    /// `h(0) = p(0) - q(0)`, exactly.
    pub fn value_at_zero(&self) -> BigRational {
        self.p.coeff(0) - self.q.coeff(0)
    }

    /// Exact Taylor coefficients `h^{(m)}(0)/m!` for `m < terms`.
    pub fn taylor_at_zero(&self, terms: usize) -> Vec<BigRational> {
        taylor_coefficients(&self.p, &self.q, &self.rate, terms)
    }

    /// Floating-point value, switching to the Taylor form near the origin.
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() <= TAYLOR_RADIUS {
            let taylor = self.taylor.get_or_init(|| {
                taylor_coefficients(&self.p, &self.q, &self.rate, TAYLOR_TERMS)
                    .iter()
                    .map(to_f64)
                    .collect()
            });
            return horner(taylor, x);
        }
        let (e, q) = self.parts(x);
        e - q
    }

    /// `(e^{rate·x} p(x), q(x))`, the two sides of `h(x) = 0`.
    pub fn parts(&self, x: f64) -> (f64, f64) {
        (
            (self.rate_f64 * x).exp() * horner(&self.p_f64, x),
            horner(&self.q_f64, x),
        )
    }

    /// Size of `h(x)` that rounding alone can produce, relative to `ε`.
    pub fn scale(&self, x: f64) -> f64 {
        let abs_p: Vec<f64> = self.p_f64.iter().map(|c| c.abs()).collect();
        let abs_q: Vec<f64> = self.q_f64.iter().map(|c| c.abs()).collect();
        (self.rate_f64 * x).exp() * horner(&abs_p, x.abs()) + horner(&abs_q, x.abs())
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn taylor_coefficients(
    p: &RationalPoly,
    q: &RationalPoly,
    rate: &BigRational,
    terms: usize,
) -> Vec<BigRational> {
    // e^{rx} = Σ r^m x^m / m!
    let mut exp_series = Vec::with_capacity(terms);
    let mut term = BigRational::one();
    for m in 0..terms {
        if m > 0 {
            term = term * rate / integer(m as i64);
        }
        exp_series.push(term.clone());
    }
    (0..terms)
        .map(|m| {
            let mut c = BigRational::zero();
            for (j, pj) in p.coeffs().iter().enumerate().take(m + 1) {
                c += pj * &exp_series[m - j];
            }
            c - q.coeff(m)
        })
        .collect()
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    SolitonKind::compact(n, k).map(|_| ())
}

/// `Σ_{j=0}^n (-1)^{n-j} (n!/j!) m^{j-1} (m - j) xʲ`, with `m = n ± k`.
fn endpoint_poly(n: usize, m: i64) -> RationalPoly {
    let n_fact = factorial(n as u32);
    let base = integer(m);
    RationalPoly::new(
        (0..=n)
            .map(|j| {
                let sign = if (n - j) % 2 == 0 { 1 } else { -1 };
                let ratio = BigRational::new(n_fact.clone(), factorial(j as u32));
                ratio * pow_rational(&base, j as i32 - 1) * integer(sign * (m - j as i64))
            })
            .collect(),
    )
}

/// The pair whose nonzero root in `(-1, 0)` is `c₁`.
pub fn build_h(n: usize, k: usize) -> Result<PolyExpPair> {
    check_nk(n, k)?;
    let (n_i, k_i) = (n as i64, k as i64);
    Ok(PolyExpPair::new(
        endpoint_poly(n, n_i + k_i),
        endpoint_poly(n, n_i - k_i),
        integer(2 * k_i),
    ))
}

/// `h^{(i)}` as an exact pair.
pub fn h_derivative(pair: &PolyExpPair, i: usize) -> PolyExpPair {
    (0..i).fold(pair.clone(), |acc, _| acc.derivative())
}

/// Brackets `(x_j, x_{j+1})` of a uniform scan where `h` changes sign.
/// Exact zeros at scan points count as a change.
pub fn sign_changes(pair: &PolyExpPair, lo: f64, hi: f64, samples: usize) -> Vec<(f64, f64)> {
    let samples = samples.max(2);
    let xs: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let mut out = Vec::new();
    let mut prev = (xs[0], pair.eval(xs[0]));
    for &x in &xs[1..] {
        let v = pair.eval(x);
        if prev.1 == 0.0 || (v != 0.0 && (v > 0.0) != (prev.1 > 0.0)) {
            out.push((prev.0, x));
        }
        prev = (x, v);
    }
    out
}

/// End guard on `(-1, 0)` for the root bracket.
pub const ROOT_GUARD: f64 = 1e-6;
/// Default density of the uniqueness scan.
pub const UNIQUENESS_SCAN: usize = 10_000;

/// The unique nonzero root of `h` in `(-1, 0)`.
pub fn find_c1(n: usize, k: usize, tol: f64) -> Result<f64> {
    Ok(find_c1_bracketed(n, k, tol, UNIQUENESS_SCAN)?.0)
}

fn find_c1_bracketed(n: usize, k: usize, tol: f64, scan: usize) -> Result<(f64, (f64, f64))> {
    let h = build_h(n, k)?;
    let changes = sign_changes(&h, -1.0 + ROOT_GUARD, -ROOT_GUARD, scan);
    let (mut lo, mut hi) = match changes.as_slice() {
        [one] => *one,
        [] => {
            return Err(SolitonError::Certificate(format!(
                "h has no sign change on (-1, 0) for n = {n}, k = {k}"
            )))
        }
        many => {
            return Err(SolitonError::Certificate(format!(
                "h changes sign {} times on (-1, 0) for n = {n}, k = {k}",
                many.len()
            )))
        }
    };
    let bracket = (lo, hi);
    let f_lo = h.eval(lo);
    if f_lo == 0.0 {
        return Ok((lo, bracket));
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let f_mid = h.eval(mid);
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let dh = h.derivative();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let f = h.eval(x);
        let next = x - f / dh.eval(x);
        if !(next >= lo && next <= hi) {
            break;
        }
        let step = (next - x).abs();
        x = next;
        if step <= 2.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    let residual = h.eval(x).abs();
    if residual > tol * h.scale(x) {
        return Err(SolitonError::NonConvergence {
            iterations: 50,
            context: format!("|h(c1)| = {residual:e} above tolerance for n = {n}, k = {k}"),
        });
    }
    Ok((x, bracket))
}

/// `c₂` from the left-pole condition, with the two relative residuals of the
/// left and right conditions.
pub fn compute_c2(n: usize, k: usize, c1: f64) -> Result<(f64, f64, f64)> {
    let h = build_h(n, k)?;
    let (right_lhs, left_lhs) = {
        let (e, q) = h.parts(c1);
        (e * (-(h.rate_f64) * c1).exp(), q)
    };
    let nk_minus = (n - k) as f64;
    let nk_plus = (n + k) as f64;
    let c2 = (nk_minus * c1).exp() * left_lhs;
    let residual_left_pole = relative(left_lhs, c2 * (-nk_minus * c1).exp());
    let residual_right_pole = relative(right_lhs, c2 * (-nk_plus * c1).exp());
    Ok((c2, residual_left_pole, residual_right_pole))
}

fn relative(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Left or right end of the `φ` interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Left,
    Right,
}

/// The constants `(c₁, c₂)` with the evidence that they are correct.
#[derive(Debug, Clone, PartialEq)]
pub struct RootCertificate {
    pub n: usize,
    pub k: usize,
    pub c1: f64,
    pub c2: f64,
    pub bracket: (f64, f64),
    pub residual_left_pole: f64,
    pub residual_right_pole: f64,
    pub residue_left: f64,
    pub residue_right: f64,
}

/// Acceptance thresholds for a certificate.
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const RESIDUE_TOL: f64 = 1e-6;
pub const CLOSURE_TOL: f64 = 1e-9;

impl RootCertificate {
    pub fn compute(n: usize, k: usize) -> Result<Self> {
        Self::compute_with(n, k, 1e-12, UNIQUENESS_SCAN)
    }

    pub fn compute_with(n: usize, k: usize, tol: f64, scan: usize) -> Result<Self> {
        let (c1, bracket) = find_c1_bracketed(n, k, tol, scan)?;
        let (c2, residual_left_pole, residual_right_pole) = compute_c2(n, k, c1)?;
        let den = Denominator::new(n, c1, c2);
        let a = (n - k) as f64;
        let b = (n + k) as f64;
        Ok(Self {
            n,
            k,
            c1,
            c2,
            bracket,
            residual_left_pole,
            residual_right_pole,
            residue_left: den.residue(a),
            residue_right: den.residue(b),
        })
    }

    pub fn kind(&self) -> SolitonKind {
        SolitonKind::CompactBundle { n: self.n, k: self.k }
    }

    pub fn endpoints(&self) -> (f64, f64) {
        ((self.n - self.k) as f64, (self.n + self.k) as f64)
    }

    /// `|D(n∓k)|` relative to the size of its terms.
    pub fn closure_defects(&self) -> (f64, f64) {
        let den = Denominator::new(self.n, self.c1, self.c2);
        let (a, b) = self.endpoints();
        (den.relative_value(a), den.relative_value(b))
    }

    /// Every invariant of the certificate, or the first that fails.
    pub fn validate(&self) -> Result<()> {
        let k = self.k as f64;
        let fail = |what: String| Err(SolitonError::Certificate(what));
        if !(self.c1 > -1.0 && self.c1 < 0.0) {
            return fail(format!("c1 = {} outside (-1, 0)", self.c1));
        }
        if self.residual_left_pole.abs() > RESIDUAL_TOL || self.residual_right_pole.abs() > RESIDUAL_TOL {
            return fail(format!(
                "pole-condition residuals {:e}, {:e} above {RESIDUAL_TOL:e}",
                self.residual_left_pole, self.residual_right_pole
            ));
        }
        if (self.residue_left - 1.0 / k).abs() > RESIDUE_TOL
            || (self.residue_right + 1.0 / k).abs() > RESIDUE_TOL
        {
            return fail(format!(
                "residues {}, {} differ from ±1/{}",
                self.residue_left, self.residue_right, self.k
            ));
        }
        let (l, r) = self.closure_defects();
        if l > CLOSURE_TOL || r > CLOSURE_TOL {
            return fail(format!("D at the endpoints is {l:e}, {r:e}"));
        }
        Ok(())
    }

    /// One `key = value` pair per line, floats at full precision.
    pub fn to_record(&self) -> String {
        format!(
            "n = {}\nk = {}\nc1 = {:?}\nc2 = {:?}\nbracket_lo = {:?}\nbracket_hi = {:?}\n\
             residual_left_pole = {:e}\nresidual_right_pole = {:e}\nresidue_left = {:?}\nresidue_right = {:?}\n",
            self.n,
            self.k,
            self.c1,
            self.c2,
            self.bracket.0,
            self.bracket.1,
            self.residual_left_pole,
            self.residual_right_pole,
            self.residue_left,
            self.residue_right,
        )
    }

    pub fn from_record(text: &str) -> Result<Self> {
        let mut fields = std::collections::HashMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SolitonError::Certificate(format!("malformed line {line:?}")))?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }
        let get = |key: &str| -> Result<&String> {
            fields
                .get(key)
                .ok_or_else(|| SolitonError::Certificate(format!("missing key {key}")))
        };
        let float = |key: &str| -> Result<f64> {
            get(key)?
                .parse()
                .map_err(|_| SolitonError::Certificate(format!("bad value for {key}")))
        };
        let int = |key: &str| -> Result<usize> {
            get(key)?
                .parse()
                .map_err(|_| SolitonError::Certificate(format!("bad value for {key}")))
        };
        Ok(Self {
            n: int("n")?,
            k: int("k")?,
            c1: float("c1")?,
            c2: float("c2")?,
            bracket: (float("bracket_lo")?, float("bracket_hi")?),
            residual_left_pole: float("residual_left_pole")?,
            residual_right_pole: float("residual_right_pole")?,
            residue_left: float("residue_left")?,
            residue_right: float("residue_right")?,
        })
    }
}

impl fmt::Display for RootCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_record())
    }
}

/// `D(φ) = P(φ) - c₂ e^{-c₁φ}` in floating point.
#[derive(Debug, Clone)]
struct Denominator {
    n: usize,
    c1: f64,
    c2: f64,
    poly: Vec<f64>,
}

impl Denominator {
    fn new(n: usize, c1: f64, c2: f64) -> Self {
        let mut poly = vec![0.0; n + 1];
        let mut ratio = 1.0; // n!/j!, built from j = n downwards
        for j in (0..n).rev() {
            ratio *= (j + 1) as f64;
            let sign = if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            poly[j] = sign * ratio * (1.0 + c1) * c1.powi(j as i32);
        }
        poly[n] = c1.powi(n as i32);
        Self { n, c1, c2, poly }
    }

    fn value(&self, phi: f64) -> f64 {
        horner(&self.poly, phi) - self.c2 * (-self.c1 * phi).exp()
    }

    fn relative_value(&self, phi: f64) -> f64 {
        let abs: Vec<f64> = self.poly.iter().map(|c| c.abs()).collect();
        let scale = horner(&abs, phi.abs()) + (self.c2 * (-self.c1 * phi).exp()).abs();
        self.value(phi).abs() / scale
    }

    fn derivative(&self, phi: f64) -> f64 {
        let dpoly: Vec<f64> = self
            .poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| j as f64 * c)
            .collect();
        horner(&dpoly, phi) + self.c1 * self.c2 * (-self.c1 * phi).exp()
    }

    /// Taylor coefficients of `D(e + ε)` in `ε`, with the constant term
    /// dropped because `D(e) = 0` at a certified endpoint.
    fn expansion(&self, e: f64, terms: usize) -> Vec<f64> {
        let exp_part = self.c2 * (-self.c1 * e).exp();
        let mut out = Vec::with_capacity(terms);
        let mut exp_factor = 1.0; // (-c₁)^m / m!
        for m in 1..=terms {
            exp_factor *= -self.c1 / m as f64;
            // P^{(m)}(e)/m! = Σ_j C(j, m) c_j e^{j-m}
            let mut poly_part = 0.0;
            for j in m..=self.n {
                poly_part += binomial(j, m) * self.poly[j] * e.powi((j - m) as i32);
            }
            out.push(poly_part - exp_part * exp_factor);
        }
        out
    }

    fn residue(&self, e: f64) -> f64 {
        -self.c1.powi(self.n as i32 + 1) * e.powi(self.n as i32 - 1) / self.derivative(e)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A point of the `φ` interval, carrying exact distances to both ends so that
/// values next to an endpoint keep full relative accuracy.
#[derive(Debug, Clone, Copy)]
struct Point {
    phi: f64,
    left: f64,
    right: f64,
}

/// Terms kept in the endpoint expansion of `D`.
const EXPANSION_TERMS: usize = 40;

/// The compact-case profile, parameterized by `φ ∈ (n-k, n+k)`.
#[derive(Debug, Clone)]
pub struct CompactProfile {
    cert: RootCertificate,
    den: Denominator,
    left_expansion: Vec<f64>,
    right_expansion: Vec<f64>,
    cut: f64,
}

impl CompactProfile {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let cert = RootCertificate::compute(n, k)?;
        cert.validate()?;
        Ok(Self::from_certificate(cert))
    }

    pub fn from_certificate(cert: RootCertificate) -> Self {
        let den = Denominator::new(cert.n, cert.c1, cert.c2);
        let (a, b) = cert.endpoints();
        Self {
            left_expansion: den.expansion(a, EXPANSION_TERMS),
            right_expansion: den.expansion(b, EXPANSION_TERMS),
            cut: (0.1f64).min(cert.k as f64 / 10.0),
            den,
            cert,
        }
    }

    pub fn certificate(&self) -> &RootCertificate {
        &self.cert
    }

    pub fn phi_domain(&self) -> (f64, f64) {
        self.cert.endpoints()
    }

    pub fn c1(&self) -> f64 {
        self.cert.c1
    }

    /// Half-width of the endpoint neighbourhoods treated by expansion.
    pub fn cut_width(&self) -> f64 {
        self.cut
    }

    fn point(&self, phi: f64) -> Result<Point> {
        let (a, b) = self.phi_domain();
        if !(phi >= a && phi <= b) {
            return Err(SolitonError::Domain(format!(
                "φ = {phi} outside [{a}, {b}]"
            )));
        }
        Ok(Point {
            phi,
            left: phi - a,
            right: b - phi,
        })
    }

    fn d_at(&self, p: Point) -> f64 {
        if p.left < self.cut {
            horner_shifted(&self.left_expansion, p.left)
        } else if p.right < self.cut {
            horner_shifted(&self.right_expansion, -p.right)
        } else {
            self.den.value(p.phi)
        }
    }

    fn phi1_at(&self, p: Point) -> f64 {
        if p.left == 0.0 || p.right == 0.0 {
            return 0.0;
        }
        let n = self.cert.n as i32;
        -self.d_at(p) / (self.cert.c1.powi(n + 1) * p.phi.powi(n - 1))
    }

    fn derivatives_at(&self, p: Point) -> (f64, f64, f64) {
        let m = (self.cert.n - 1) as f64;
        let nf = self.cert.n as f64;
        let c1 = self.cert.c1;
        let phi = p.phi;
        let p1 = self.phi1_at(p);
        let slope = m / phi + c1;
        let bracket = (nf - phi) - slope * p1;
        let p2 = p1 * bracket;
        let dbracket = -p1 + m * p1 * p1 / (phi * phi) - slope * p2;
        let p3 = p2 * bracket + p1 * dbracket;
        (p1, p2, p3)
    }

    /// Closed-form `φ'` as a function of `φ`; zero at both endpoints.
    pub fn phi_prime_of_phi(&self, phi: f64) -> Result<f64> {
        Ok(self.phi1_at(self.point(phi)?))
    }

    /// `φ'' = φ' ((n - φ) - ((n-1)/φ + c₁) φ')`.
    pub fn phi_second_of_phi(&self, phi: f64) -> Result<f64> {
        Ok(self.derivatives_at(self.point(phi)?).1)
    }

    /// `φ'''`, from differentiating the `φ''` relation once more in `t`.
    pub fn phi_third_of_phi(&self, phi: f64) -> Result<f64> {
        Ok(self.derivatives_at(self.point(phi)?).2)
    }

    /// Distance from the left end `φ = n - k`, `ρ = ∫ dσ/√φ'(σ)`.
    ///
    /// Each half is integrated in `u = √(σ - a)` or `u = √(b - σ)`, which
    /// removes the inverse square-root singularity at the endpoint.
    pub fn distance_of_phi(&self, phi: f64) -> Result<f64> {
        self.point(phi)?;
        let (a, b) = self.phi_domain();
        let mid = self.cert.n as f64;
        let width = b - a;
        let opts = QuadratureOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        };
        let left_half = |u: f64| -> Result<f64> {
            let left = u * u;
            Ok(2.0 * u / self.phi1_at(Point { phi: a + left, left, right: width - left }).sqrt())
        };
        let right_half = |u: f64| -> Result<f64> {
            let right = u * u;
            Ok(2.0 * u / self.phi1_at(Point { phi: b - right, left: width - right, right }).sqrt())
        };
        if phi <= mid {
            return Ok(integrate(left_half, 0.0, (phi - a).sqrt(), opts)?.value);
        }
        let half = integrate(left_half, 0.0, (mid - a).sqrt(), opts)?.value;
        Ok(half + integrate(right_half, (b - phi).sqrt(), (b - mid).sqrt(), opts)?.value)
    }

    /// Residue of `1/φ'` at an endpoint.
    pub fn residue_at(&self, end: Endpoint) -> f64 {
        match end {
            Endpoint::Left => self.cert.residue_left,
            Endpoint::Right => self.cert.residue_right,
        }
    }

    /// Smooth part of `1/φ'` after removing both poles.
    fn regular_part(&self, p: Point) -> f64 {
        let rl = self.cert.residue_left;
        let rr = self.cert.residue_right;
        1.0 / self.phi1_at(p) - rl / p.left + rr / p.right
    }

    /// `t(φ) = ∫_n^φ dσ/φ'(σ)`, anchored at `t(n) = 0`.
    pub fn t_of_phi(&self, phi: f64) -> Result<f64> {
        let p = self.point(phi)?;
        if p.left == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if p.right == 0.0 {
            return Ok(f64::INFINITY);
        }
        self.t_of_point(p)
    }

    fn t_of_point(&self, p: Point) -> Result<f64> {
        let n = self.cert.n as f64;
        let k = self.cert.k as f64;
        let (a, b) = self.phi_domain();
        let opts = QuadratureOptions {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        };
        let smooth = integrate(
            |s| {
                Ok(self.regular_part(Point {
                    phi: s,
                    left: s - a,
                    right: b - s,
                }))
            },
            n,
            p.phi,
            opts,
        )?
        .value;
        // both n - a and b - n equal k
        Ok(smooth
            + self.cert.residue_left * (p.left / k).ln()
            + self.cert.residue_right * (p.right / k).ln())
    }

    /// State at a profile value, with `t` from `t_of_phi`.
    pub fn state_at_phi(&self, phi: f64) -> Result<ProfileState> {
        let p = self.point(phi)?;
        let (phi1, phi2, phi3) = self.derivatives_at(p);
        Ok(ProfileState::from_derivatives(self.t_of_phi(phi)?, phi, phi1, phi2, phi3))
    }

    /// Point at logistic coordinate `y`, with `φ = (a + b)/2` at `y = 0`.
    fn point_at_y(&self, y: f64) -> Point {
        let (a, b) = self.phi_domain();
        let width = b - a;
        // σ(y) and σ(-y) without cancellation
        let left = width / (1.0 + (-y).exp());
        let right = width / (1.0 + y.exp());
        let phi = if y <= 0.0 { a + left } else { b - right };
        Point { phi, left, right }
    }

    /// Inverts `t_of_phi`; near the ends `φ` may round to an endpoint while
    /// `φ'` stays resolved.
    pub fn state_at_t(&self, t: f64) -> Result<ProfileState> {
        if !t.is_finite() {
            return Err(SolitonError::Range(format!("t = {t} is not finite")));
        }
        let k = self.cert.k as f64;
        let width = 2.0 * k;
        // t ≈ y/k far out on either side
        let mut y = k * t;
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for _ in 0..100 {
            let p = self.point_at_y(y);
            if p.left == 0.0 || p.right == 0.0 {
                return Err(SolitonError::Range(format!(
                    "t = {t} is beyond the resolvable range of the compact profile"
                )));
            }
            let f = self.t_of_point(p)? - t;
            let phi1 = self.phi1_at(p);
            let slope = p.left * p.right / (width * phi1);
            if f.abs() <= 1e-12 * (1.0 + t.abs()) || (f / slope).abs() <= 4.0 * f64::EPSILON * (1.0 + y.abs()) {
                let (phi1, phi2, phi3) = self.derivatives_at(p);
                return Ok(ProfileState::from_derivatives(t, p.phi, phi1, phi2, phi3));
            }
            if f > 0.0 {
                hi = hi.min(y);
            } else {
                lo = lo.max(y);
            }
            let mut next = y - f / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = if lo.is_finite() && hi.is_finite() {
                    0.5 * (lo + hi)
                } else if lo.is_finite() {
                    lo + 1.0
                } else {
                    hi - 1.0
                };
            }
            y = next;
        }
        Err(SolitonError::NonConvergence {
            iterations: 100,
            context: format!("inverting t(φ) at t = {t}"),
        })
    }

    /// Minima of the two Ricci quantities over interior samples.
    pub fn ricci_positivity_report(&self, samples: usize) -> Result<RicciPositivityReport> {
        let (a, b) = self.phi_domain();
        let offset = 1e-4;
        let samples = samples.max(2);
        let c1 = self.cert.c1;
        let mut report = RicciPositivityReport {
            samples,
            min_first: f64::INFINITY,
            argmin_first: a,
            min_second: f64::INFINITY,
            argmin_second: a,
        };
        for i in 0..samples {
            let phi = a + offset + (b - a - 2.0 * offset) * i as f64 / (samples - 1) as f64;
            let (p1, p2, _) = self.derivatives_at(self.point(phi)?);
            let first = phi + c1 * p1;
            let second = p1 + c1 * p2;
            if first < report.min_first {
                report.min_first = first;
                report.argmin_first = phi;
            }
            if second < report.min_second {
                report.min_second = second;
                report.argmin_second = phi;
            }
        }
        Ok(report)
    }
}

fn horner_shifted(expansion: &[f64], eps: f64) -> f64 {
    eps * horner(expansion, eps)
}

/// Sampled minima of `f' = φ + c₁φ'` and `f'' = φ' + c₁φ''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciPositivityReport {
    pub samples: usize,
    pub min_first: f64,
    pub argmin_first: f64,
    pub min_second: f64,
    pub argmin_second: f64,
}

impl RicciPositivityReport {
    pub fn first_positive(&self) -> bool {
        self.min_first > 0.0
    }

    pub fn second_positive(&self) -> bool {
        self.min_second > 0.0
    }
}

impl RadialProfile for CompactProfile {
    fn kind(&self) -> SolitonKind {
        self.cert.kind()
    }

    fn state_at(&self, t: f64) -> Result<ProfileState> {
        self.state_at_t(t)
    }

    /// Integrates `dφ/dt = φ'(φ)` from `base` with classical RK4, so nearby
    /// states differ from `base` by far less than the inversion tolerance.
    fn state_near(&self, base: &ProfileState, dt: f64) -> Result<ProfileState> {
        let steps = (dt.abs() / 1e-2).ceil().max(1.0) as usize;
        let h = dt / steps as f64;
        let (a, b) = self.phi_domain();
        let rate = |phi: f64| self.phi1_at(self.point(phi.clamp(a, b)).expect("clamped"));
        let mut phi = base.phi;
        for _ in 0..steps {
            let k1 = rate(phi);
            let k2 = rate(phi + 0.5 * h * k1);
            let k3 = rate(phi + 0.5 * h * k2);
            let k4 = rate(phi + h * k3);
            phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        let (phi1, phi2, phi3) = self.derivatives_at(self.point(phi.clamp(a, b))?);
        Ok(ProfileState::from_derivatives(base.t + dt, phi, phi1, phi2, phi3))
    }

    fn normalization(&self) -> Normalization {
        Normalization::Shrinking {
            c1: self.cert.c1,
            c2: self.cert.c2,
        }
    }

    fn integration_constant(&self) -> f64 {
        self.cert.c2
    }
}

/// Coefficients `b_i` of `g(y) = n! Σ b_i yⁱ` for `i ≤ order`, where
/// `h(-y) = (-1)^{n+1} e^{-2ky} g(y)`. The subtracted polynomial only touches
/// `i ≤ n`, where the two parts cancel exactly.
pub fn g_series(n: usize, k: usize, order: usize) -> Result<Vec<BigRational>> {
    check_nk(n, k)?;
    let two_k = integer(2 * k as i64);
    let m = integer((n - k) as i64);
    let plus = integer((n + k) as i64);
    Ok((0..=order)
        .map(|i| {
            let subtracted = if i <= n {
                pow_rational(&plus, i as i32 - 1) * integer((n + k) as i64 - i as i64)
                    / BigRational::from_integer(factorial(i as u32))
            } else {
                BigRational::zero()
            };
            (0..=n.min(i))
                .map(|j| {
                    let num = pow_rational(&two_k, (i - j) as i32)
                        * pow_rational(&m, j as i32 - 1)
                        * integer((n - k) as i64 - j as i64);
                    let den = BigRational::from_integer(
                        factorial((i - j) as u32) * factorial(j as u32),
                    );
                    num / den
                })
                .fold(BigRational::zero(), |acc, x| acc + x)
                - subtracted
        })
        .collect())
}

/// Sign pattern of the `g` coefficients from `i = n + 1` to `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct GSeriesSummary {
    /// `b_i = 0` for every `i ≤ n`.
    pub leading_zero: bool,
    /// Number of positive coefficients before the first negative one.
    pub positive_run: usize,
    /// Sign changes among `b_{n+1}, …, b_order`.
    pub sign_changes: usize,
    /// First `i` where `b_{i+1} ≥ b_i`, if any.
    pub first_increase: Option<usize>,
}

pub fn g_series_summary(n: usize, k: usize, order: usize) -> Result<GSeriesSummary> {
    let b = g_series(n, k, order)?;
    let leading_zero = b.iter().take(n + 1).all(Zero::is_zero);
    let tail = &b[n + 1..];
    let positive_run = tail.iter().take_while(|x| x.is_positive()).count();
    let signs: Vec<bool> = tail.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    let sign_changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    let first_increase = (n + 1..order).find(|&i| b[i + 1] >= b[i]);
    Ok(GSeriesSummary {
        leading_zero,
        positive_run,
        sign_changes,
        first_increase,
    })
}

/// `C_i`, the coefficients of `h^{(n+1)}(x) e^{-2kx}`, by the closed sum.
pub fn step2_coefficients(n: usize, k: usize) -> Result<Vec<BigRational>> {
    check_nk(n, k)?;
    Ok((0..=n)
        .map(|i| {
            let lead = BigRational::new(factorial(n as u32), factorial(i as u32))
                * pow_rational(&integer((n + k) as i64), i as i32);
            let sum = (0..=n - i)
                .map(|j| {
                    let sign = if (n - i - j) % 2 == 0 { 1 } else { -1 };
                    step2_term(n, k, i, j) * integer(sign)
                })
                .fold(BigRational::zero(), |acc, x| acc + x);
            lead * sum
        })
        .collect())
}

/// `B_j` for a fixed `i`: `C(n+1, j) (2k)^{n+1-j} (n+k)^{j-1} (n+k-i-j)`.
pub fn step2_term(n: usize, k: usize, i: usize, j: usize) -> BigRational {
    let binom = BigRational::from_integer(
        factorial((n + 1) as u32) / (factorial(j as u32) * factorial((n + 1 - j) as u32)),
    );
    binom
        * pow_rational(&integer(2 * k as i64), (n + 1 - j) as i32)
        * pow_rational(&integer((n + k) as i64), j as i32 - 1)
        * BigRational::from_integer(BigInt::from((n + k) as i64 - (i + j) as i64))
}
