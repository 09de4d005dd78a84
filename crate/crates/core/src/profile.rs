//! Radial profiles `φ(t) = u'(t)` for the flat-space and line-bundle solitons.
//!
//! Both open cases share the separated equation `φ^{n-1} e^φ dφ = e^{nt} dt`.
//! Writing `J(a, δ) = n ∫_a^{a+δ} s^{n-1} e^s ds`, the profile is the unique
//! `φ = a + δ` with `J(a, δ) = e^{nt}`, where `a = 0` on `ℂⁿ` and `a > 0` on
//! the bundle. All solving happens on `log J`, which never overflows and keeps
//! full relative accuracy as `δ → 0`.

use crate::error::{Result, SolitonError};
use crate::quadrature::{integrate, QuadratureOptions};

/// Which of the three rotationally symmetric geometries a profile lives on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolitonKind {
    /// Steady soliton on `ℂⁿ`.
    FlatSpace { n: usize },
    /// Steady soliton on the total space of the (anti)canonical bundle of
    /// `ℙⁿ⁻¹`, with `φ → a` on the zero section.
    CanonicalBundle { n: usize, a: f64 },
    /// Shrinking soliton on the compact bundle `M_k`.
    CompactBundle { n: usize, k: usize },
}

impl SolitonKind {
    pub fn flat(n: usize) -> Result<Self> {
        Self::FlatSpace { n }.validated()
    }

    pub fn bundle(n: usize, a: f64) -> Result<Self> {
        Self::CanonicalBundle { n, a }.validated()
    }

    pub fn compact(n: usize, k: usize) -> Result<Self> {
        Self::CompactBundle { n, k }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::FlatSpace { n } if n >= 1 => Ok(self),
            Self::FlatSpace { n } => Err(SolitonError::InvalidKind(format!(
                "flat space needs n >= 1, got n = {n}"
            ))),
            Self::CanonicalBundle { n, a } if n >= 2 && a > 0.0 && a.is_finite() => Ok(self),
            Self::CanonicalBundle { n, a } => Err(SolitonError::InvalidKind(format!(
                "canonical bundle needs n >= 2 and a > 0, got n = {n}, a = {a}"
            ))),
            Self::CompactBundle { n, k } if n >= 2 && k >= 1 && k < n => Ok(self),
            Self::CompactBundle { n, k } => Err(SolitonError::InvalidKind(format!(
                "compact bundle needs 1 <= k <= n - 1, got n = {n}, k = {k}"
            ))),
        }
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        match *self {
            Self::FlatSpace { n } | Self::CanonicalBundle { n, .. } | Self::CompactBundle { n, .. } => n,
        }
    }

    /// `lim φ` as `t → -∞`.
    pub fn phi_left_limit(&self) -> f64 {
        match *self {
            Self::FlatSpace { .. } => 0.0,
            Self::CanonicalBundle { a, .. } => a,
            Self::CompactBundle { n, k } => (n - k) as f64,
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, Self::CompactBundle { .. })
    }
}

/// Sampling description for sweeps and reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub newton_tol: f64,
    pub max_iter: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, samples: usize) -> Result<Self> {
        Self {
            lo,
            hi,
            samples,
            ..Self::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(SolitonError::InvalidGrid(format!(
                "need finite lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.samples < 2 {
            return Err(SolitonError::InvalidGrid(format!(
                "need at least 2 samples, got {}",
                self.samples
            )));
        }
        if !(self.newton_tol > 0.0) || self.max_iter == 0 {
            return Err(SolitonError::InvalidGrid(
                "tolerance and iteration cap must be positive".into(),
            ));
        }
        Ok(self)
    }

    /// Evenly spaced points, both endpoints included.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| {
                if i + 1 == self.samples {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.newton_tol,
            max_iter: self.max_iter,
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo: -20.0,
            hi: 20.0,
            samples: 401,
            newton_tol: 1e-12,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual allowed in `J(a, δ) = e^{nt}`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
        }
    }
}

/// Normalization of a realized profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// `α = 1` (holomorphy constant) and `β = 1` (dilation).
    Steady { alpha: f64, beta: f64 },
    /// Shrinking case constants from the root certificate.
    Shrinking { c1: f64, c2: f64 },
}

/// `φ` and its first three `t`-derivatives at one value of `t`, with the
/// three combinations that curvature depends on.
///
/// The combinations cancel to leading order as `t → -∞` on `ℂⁿ`, so profiles
/// that can supply them more accurately than the raw derivatives do so.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileState {
    pub t: f64,
    pub phi: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    /// `φ - φ'`
    pub gap: f64,
    /// `(φ')²/φ - φ''`
    pub mixed: f64,
    /// `(φ'')²/φ' - φ'''`
    pub radial: f64,
}

impl ProfileState {
    /// State with the combinations formed directly from the derivatives.
    pub fn from_derivatives(t: f64, phi: f64, phi1: f64, phi2: f64, phi3: f64) -> Self {
        Self {
            t,
            phi,
            phi1,
            phi2,
            phi3,
            gap: phi - phi1,
            mixed: phi1 * phi1 / phi - phi2,
            radial: phi2 * phi2 / phi1 - phi3,
        }
    }
}

/// A realized soliton profile.
pub trait RadialProfile {
    fn kind(&self) -> SolitonKind;

    fn dim(&self) -> usize {
        self.kind().dim()
    }

    fn state_at(&self, t: f64) -> Result<ProfileState>;

    /// State at `base.t + dt`. Implementations may integrate locally from
    /// `base` instead of solving from scratch; finite-difference oracles use
    /// this so that solver noise stays below the difference step.
    fn state_near(&self, base: &ProfileState, dt: f64) -> Result<ProfileState> {
        self.state_at(base.t + dt)
    }

    fn normalization(&self) -> Normalization;

    /// The additive constant `C` of the implicit relation.
    fn integration_constant(&self) -> f64;

    fn t_domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

// ---------------------------------------------------------------------------
// J(a, δ) and friends

/// `log J(a, δ)` together with `q = J / (x^n e^x)`, `x = a + δ`, and `1 - q`
/// (accurate as `x → 0` when `a = 0`).
#[derive(Debug, Clone, Copy)]
struct Increment {
    log_j: f64,
    q: f64,
    one_minus_q: f64,
}

const SERIES_DELTA_MAX: f64 = 40.0;

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

/// `Σ_{m≥0} δ^m / (m! (j + 1 + m))`
fn e_series(j: usize, delta: f64) -> f64 {
    let mut term = 1.0; // δ^m / m!
    let mut sum = 1.0 / (j + 1) as f64;
    for m in 1..2000 {
        term *= delta / m as f64;
        let add = term / (j + 1 + m) as f64;
        sum += add;
        if add <= sum * 1e-17 {
            break;
        }
    }
    sum
}

/// `Σ_{m≥1} δ^m / ((n + m) (m - 1)!)`
fn deficit_series(n: usize, delta: f64) -> f64 {
    let mut term = delta; // δ^m / (m - 1)!
    let mut sum = delta / (n + 1) as f64;
    for m in 2..2000 {
        term *= delta / (m - 1) as f64;
        let add = term / (n + m) as f64;
        sum += add;
        if add <= sum * 1e-17 {
            break;
        }
    }
    sum
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `P(x) = Σ_{k<n} (-1)^{n-1-k} (n!/k!) x^k`, so that `S(n, x) = e^x P(x)`.
fn alternating_poly(n: usize, x: f64) -> f64 {
    // Horner on coefficients c_k = (-1)^{n-1-k} n!/k!, from k = n-1 down.
    let mut acc = 0.0;
    let mut coeff = n as f64; // n!/(n-1)!
    for k in (0..n).rev() {
        acc = acc * x + coeff;
        // next coefficient c_{k-1} = -c_k * k
        coeff = -coeff * k as f64;
    }
    acc
}

/// `J(a, δ)` evaluated from `ln δ`.
fn increment(n: usize, a: f64, ln_delta: f64) -> Result<Increment> {
    let delta = ln_delta.exp();
    let x = a + delta;
    let nf = n as f64;
    if delta <= SERIES_DELTA_MAX.max(4.0 * nf) {
        // J = n e^a Σ_j C(n-1, j) a^{n-1-j} δ^{j+1} E_j(δ); every term positive.
        let terms: Vec<f64> = if a == 0.0 {
            vec![nf * ln_delta + e_series(n - 1, delta).ln()]
        } else {
            (0..n)
                .map(|j| {
                    binomial(n - 1, j).ln()
                        + (n - 1 - j) as f64 * a.ln()
                        + (j + 1) as f64 * ln_delta
                        + e_series(j, delta).ln()
                })
                .collect()
        };
        let log_sum = log_sum_exp(&terms);
        let log_j = nf.ln() + a + log_sum;
        let q = (nf.ln() - delta + log_sum - nf * x.ln()).exp();
        let one_minus_q = if a == 0.0 {
            (-delta).exp() * deficit_series(n, delta)
        } else {
            1.0 - q
        };
        Ok(Increment {
            log_j,
            q,
            one_minus_q,
        })
    } else {
        // J = e^x P(x) - e^a P(a), no cancellation once x is well above n.
        let bracket = alternating_poly(n, x) - (-delta).exp() * alternating_poly(n, a);
        if !(bracket > 0.0) {
            return Err(SolitonError::Range(format!(
                "closed-form increment lost positivity at x = {x} (n = {n})"
            )));
        }
        let q = bracket / x.powi(n as i32);
        Ok(Increment {
            log_j: x + bracket.ln(),
            q,
            one_minus_q: 1.0 - q,
        })
    }
}

/// `S(n, φ) = Σ_{k<n} (-1)^{n-k-1} (n!/k!) φ^k e^φ`, the left side of the
/// implicit relation. Evaluated as `S(n, 0) + J(0, φ)` so that small `φ`
/// keeps full accuracy.
pub fn implicit_lhs(n: usize, phi: f64) -> Result<f64> {
    Ok(flat_constant(n) + implicit_increment(n, phi)?)
}

/// `S(n, φ) - S(n, 0) = n ∫_0^φ s^{n-1} e^s ds`, free of the cancellation
/// that the alternating closed form suffers for small `φ`.
pub fn implicit_increment(n: usize, phi: f64) -> Result<f64> {
    if n == 0 {
        return Err(SolitonError::InvalidKind("n must be at least 1".into()));
    }
    if !(phi >= 0.0) || !phi.is_finite() {
        return Err(SolitonError::Domain(format!("need finite φ >= 0, got {phi}")));
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    let log_j = increment(n, 0.0, phi.ln())?.log_j;
    if log_j > f64::MAX.ln() {
        return Err(SolitonError::Range(format!(
            "increment overflows for n = {n}, φ = {phi}"
        )));
    }
    Ok(log_j.exp())
}

/// `S(n, 0) = (-1)^{n-1} n!`, the flat-space integration constant.
pub fn flat_constant(n: usize) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    if n % 2 == 1 {
        fact
    } else {
        -fact
    }
}

/// Bundle integration constant `C(a) = S(n, a)`.
pub fn bundle_constant(n: usize, a: f64) -> f64 {
    a.exp() * alternating_poly(n, a)
}

fn check_t(n: usize, t: f64) -> Result<()> {
    if !t.is_finite() || (n as f64 * t).abs() > 1e15 {
        return Err(SolitonError::Range(format!(
            "n·t outside log-space capacity (n = {n}, t = {t})"
        )));
    }
    Ok(())
}

/// Solves `J(a, δ) = e^{nt}` for `ln δ` by safeguarded Newton in `s = ln δ`.
fn solve_log_increment(n: usize, a: f64, t: f64, opts: SolverOptions) -> Result<f64> {
    check_t(n, t)?;
    let nf = n as f64;
    let target = nf * t;
    // A log-space residual is a relative residual on J, floored at one ulp of
    // the target.
    let tol = opts.tol.max(4.0 * f64::EPSILON * target.abs());
    let residual = |s: f64| -> Result<(f64, f64)> {
        let inc = increment(n, a, s)?;
        let x = a + s.exp();
        // d log J / ds = n δ / (x q)
        let slope = nf * (s - x.ln()).exp() / inc.q;
        Ok((inc.log_j - target, slope))
    };

    // φ grows like n t, so [·, n max(t, 1) + n²] brackets from above.
    let mut hi = (nf * t.max(1.0) + nf * nf).ln();
    let mut expand = 0;
    while residual(hi)?.0 < 0.0 {
        hi += 1.0;
        expand += 1;
        if expand > 200 {
            return Err(SolitonError::NonConvergence {
                iterations: expand,
                context: "could not bracket the profile from above".into(),
            });
        }
    }
    let guess = if a == 0.0 {
        t
    } else {
        target - (nf.ln() + a + (nf - 1.0) * a.ln())
    };
    let mut lo = guess.min(hi) - 1.0;
    expand = 0;
    while residual(lo)?.0 > 0.0 {
        lo -= 8.0 * (1.0 + expand as f64);
        expand += 1;
        if expand > 200 {
            return Err(SolitonError::NonConvergence {
                iterations: expand,
                context: "could not bracket the profile from below".into(),
            });
        }
    }

    let mut s = guess.clamp(lo, hi);
    let mut best = (f64::INFINITY, s);
    for _ in 0..opts.max_iter {
        let (f, slope) = residual(s)?;
        if f.abs() < best.0 {
            best = (f.abs(), s);
        }
        if f == 0.0 {
            return Ok(s);
        }
        if f > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let newton = s - f / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - s).abs();
        s = next;
        if step <= 2.0 * f64::EPSILON * (1.0 + s.abs()) || hi - lo <= 4.0 * f64::EPSILON * (1.0 + s.abs()) {
            let (f_final, _) = residual(s)?;
            let (f_best, s_best) = if f_final.abs() <= best.0 {
                (f_final.abs(), s)
            } else {
                best
            };
            if f_best <= tol {
                return Ok(s_best);
            }
            return Err(SolitonError::NonConvergence {
                iterations: opts.max_iter,
                context: format!("residual {f_best:e} above tolerance {:e}", opts.tol),
            });
        }
    }
    if best.0 <= tol {
        return Ok(best.1);
    }
    Err(SolitonError::NonConvergence {
        iterations: opts.max_iter,
        context: format!("implicit profile at t = {t}, best residual {:e}", best.0),
    })
}

/// Flat-space profile: the unique `φ > 0` with `S(n, φ) = e^{nt} + (-1)^{n-1} n!`.
pub fn solve_phi_flat(n: usize, t: f64, tol: f64) -> Result<f64> {
    solve_phi_flat_with(
        n,
        t,
        SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_phi_flat_with(n: usize, t: f64, opts: SolverOptions) -> Result<f64> {
    SolitonKind::flat(n)?;
    let s = solve_log_increment(n, 0.0, t, opts)?;
    let phi = s.exp();
    if phi == 0.0 {
        return Err(SolitonError::Range(format!("φ underflows at t = {t}")));
    }
    Ok(phi)
}

/// Bundle profile: the unique `φ > a` with `S(n, φ) = e^{nt} + S(n, a)`.
pub fn solve_phi_bundle(n: usize, a: f64, t: f64, tol: f64) -> Result<f64> {
    solve_phi_bundle_with(
        n,
        a,
        t,
        SolverOptions {
            tol,
            ..SolverOptions::default()
        },
    )
}

pub fn solve_phi_bundle_with(n: usize, a: f64, t: f64, opts: SolverOptions) -> Result<f64> {
    SolitonKind::bundle(n, a)?;
    let s = solve_log_increment(n, a, t, opts)?;
    Ok(a + s.exp())
}

/// `(φ', φ'', φ''')` for an open-case profile value `φ`.
///
/// `e^{nt}` is eliminated through the implicit relation, so the result is a
/// function of `φ` alone: `φ' = J/(φ^{n-1}e^φ) = φ q`, and with `d = 1 - q`,
///
/// ```text
/// φ''  = φ' (1 + (n-1) d - φ')
/// φ''' = φ'' (2 - n + 2(n-1) d - 2φ') + (n-1) φ' (1 - d)²
/// ```
///
/// which are the ODE recurrences rewritten so that nothing cancels as `t → -∞`.
pub fn phi_derivatives(kind: SolitonKind, phi: f64) -> Result<(f64, f64, f64)> {
    let kind = kind.validated()?;
    let (n, a) = match kind {
        SolitonKind::FlatSpace { n } => (n, 0.0),
        SolitonKind::CanonicalBundle { n, a } => (n, a),
        SolitonKind::CompactBundle { .. } => {
            return Err(SolitonError::InvalidKind(
                "compact profiles use the closed form in φ".into(),
            ))
        }
    };
    if !(phi > a) || !phi.is_finite() {
        return Err(SolitonError::Domain(format!(
            "profile value φ = {phi} must exceed its left limit {a}"
        )));
    }
    let inc = increment(n, a, (phi - a).ln())?;
    Ok(derivatives_from_ratio(n, phi, inc.q, inc.one_minus_q))
}

fn derivatives_from_ratio(n: usize, phi: f64, q: f64, d: f64) -> (f64, f64, f64) {
    let s = open_state(n, 0.0, phi, q, d);
    (s.phi1, s.phi2, s.phi3)
}

/// Full state from `φ`, `q` and `d = 1 - q`, with
///
/// ```text
/// φ - φ'           = φ d
/// (φ')²/φ - φ''    = φ' (φ' - n d)
/// (φ'')²/φ' - φ''' = φ' (n φ' - φ'² + (n-1)(1-d)(n d - 2φ'))
/// ```
fn open_state(n: usize, t: f64, phi: f64, q: f64, d: f64) -> ProfileState {
    let m = (n - 1) as f64;
    let nf = n as f64;
    let p1 = phi * q;
    let p2 = p1 * (1.0 + m * d - p1);
    let p3 = p2 * (1.0 - m + 2.0 * m * d - 2.0 * p1) + m * p1 * (1.0 - d) * (1.0 - d);
    ProfileState {
        t,
        phi,
        phi1: p1,
        phi2: p2,
        phi3: p3,
        gap: phi * d,
        mixed: p1 * (p1 - nf * d),
        radial: p1 * (nf * p1 - p1 * p1 + m * (1.0 - d) * (nf * d - 2.0 * p1)),
    }
}

/// Leading coefficients `(a₁, a₂)` of `φ = a₁ e^t + a₂ e^{2t} + …` on `ℂⁿ`.
///
/// From `J(0, φ) = φⁿ + n φ^{n+1}/(n+1) + O(φ^{n+2}) = e^{nt}`.
pub fn series_coefficients(n: usize) -> (f64, f64) {
    (1.0, -1.0 / (n as f64 + 1.0))
}

/// Flat-space or bundle profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenProfile {
    kind: SolitonKind,
    opts: SolverOptions,
}

impl OpenProfile {
    pub fn new(kind: SolitonKind) -> Result<Self> {
        Self::with_options(kind, SolverOptions::default())
    }

    pub fn flat(n: usize) -> Result<Self> {
        Self::new(SolitonKind::flat(n)?)
    }

    pub fn bundle(n: usize, a: f64) -> Result<Self> {
        Self::new(SolitonKind::bundle(n, a)?)
    }

    pub fn with_options(kind: SolitonKind, opts: SolverOptions) -> Result<Self> {
        let kind = kind.validated()?;
        if kind.is_compact() {
            return Err(SolitonError::InvalidKind(
                "use CompactProfile for the compact case".into(),
            ));
        }
        if !(opts.tol > 0.0) || opts.max_iter == 0 {
            return Err(SolitonError::InvalidGrid("solver options must be positive".into()));
        }
        Ok(Self { kind, opts })
    }

    pub fn options(&self) -> SolverOptions {
        self.opts
    }

    fn left_limit(&self) -> f64 {
        self.kind.phi_left_limit()
    }

    pub fn phi(&self, t: f64) -> Result<f64> {
        let n = self.kind.dim();
        let s = solve_log_increment(n, self.left_limit(), t, self.opts)?;
        let phi = self.left_limit() + s.exp();
        if phi <= 0.0 {
            return Err(SolitonError::Range(format!("φ underflows at t = {t}")));
        }
        Ok(phi)
    }

    /// State at a given profile value; `t` follows from the implicit relation.
    pub fn state_at_phi(&self, phi: f64) -> Result<ProfileState> {
        let n = self.kind.dim();
        let a = self.left_limit();
        if !(phi > a) {
            return Err(SolitonError::Domain(format!("φ = {phi} must exceed {a}")));
        }
        let inc = increment(n, a, (phi - a).ln())?;
        Ok(open_state(n, inc.log_j / n as f64, phi, inc.q, inc.one_minus_q))
    }

    /// Growth exponent `m` of `φ' ~ A e^{mt}` as `t → -∞`.
    fn tail_exponent(&self) -> f64 {
        match self.kind {
            SolitonKind::FlatSpace { .. } => 1.0,
            _ => self.kind.dim() as f64,
        }
    }
}

impl RadialProfile for OpenProfile {
    fn kind(&self) -> SolitonKind {
        self.kind
    }

    fn state_at(&self, t: f64) -> Result<ProfileState> {
        let n = self.kind.dim();
        let a = self.left_limit();
        let s = solve_log_increment(n, a, t, self.opts)?;
        let phi = a + s.exp();
        if phi <= 0.0 {
            return Err(SolitonError::Range(format!("φ underflows at t = {t}")));
        }
        let inc = increment(n, a, s)?;
        Ok(open_state(n, t, phi, inc.q, inc.one_minus_q))
    }

    fn normalization(&self) -> Normalization {
        Normalization::Steady {
            alpha: 1.0,
            beta: 1.0,
        }
    }

    fn integration_constant(&self) -> f64 {
        match self.kind {
            SolitonKind::CanonicalBundle { n, a } => bundle_constant(n, a),
            _ => flat_constant(self.kind.dim()),
        }
    }
}

/// Left cutoff below which the distance integral is taken analytically.
pub const DISTANCE_TAIL_CUTOFF: f64 = -40.0;

fn distance_quadrature() -> QuadratureOptions {
    QuadratureOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
    }
}

/// Distance from the origin (or zero section), `ρ(t) = ∫_{-∞}^t √φ'(τ) dτ`.
///
/// Below the cutoff `φ' ≈ A e^{mτ}` with `m = 1` on `ℂⁿ` and `m = n` on the
/// bundle, so the tail is `(2/m) √φ'(t₀)`.
pub fn distance(profile: &OpenProfile, t: f64) -> Result<f64> {
    Ok(distance_table(profile, &[t])?[0])
}

/// `ρ` at each of the sorted times `ts`, integrating each gap once.
pub fn distance_table(profile: &OpenProfile, ts: &[f64]) -> Result<Vec<f64>> {
    if ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(SolitonError::InvalidGrid("distance times must be sorted".into()));
    }
    let m = profile.tail_exponent();
    let tail = |t: f64| -> Result<f64> { Ok(2.0 / m * profile.state_at(t)?.phi1.sqrt()) };
    let integrand = |tau: f64| -> Result<f64> { Ok(profile.state_at(tau)?.phi1.sqrt()) };

    let mut out = Vec::with_capacity(ts.len());
    let mut acc: Option<(f64, f64)> = None; // (t, ρ(t)) of the last point above the cutoff
    for &t in ts {
        if t <= DISTANCE_TAIL_CUTOFF {
            out.push(tail(t)?);
            continue;
        }
        let (from, base) = match acc {
            Some(prev) => prev,
            None => (DISTANCE_TAIL_CUTOFF, tail(DISTANCE_TAIL_CUTOFF)?),
        };
        let rho = base + integrate(integrand, from, t, distance_quadrature())?.value;
        acc = Some((t, rho));
        out.push(rho);
    }
    Ok(out)
}
