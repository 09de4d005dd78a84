//! Metric, Ricci and full curvature of a rotationally symmetric Kähler metric
//! `g_{ij̄} = ∂_i ∂_j̄ u(log |z|²)`.
//!
//! Matrices store `G[i][j] = g_{ij̄}`. Closed forms are evaluated at the
//! symmetric point `P = (|z|, 0, …, 0)` and moved elsewhere by a unitary
//! change of coordinates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SolitonError};
use crate::profile::{distance, OpenProfile, ProfileState, RadialProfile, SolitonKind};

/// Conjugate-symmetric complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    entries: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Accepts a square matrix whose deviation from its adjoint is within
    /// `1e-12` of its largest entry.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(SolitonError::Domain("hermitian matrix must be square and nonempty".into()));
        }
        let scale = entries.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let defect = (&entries - entries.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if defect > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(SolitonError::Domain(format!("matrix is not hermitian (defect {defect:e})")));
        }
        Ok(Self { entries })
    }

    fn from_trusted(entries: DMatrix<Complex64>) -> Self {
        Self { entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_trusted(DMatrix::identity(n, n))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn determinant(&self) -> f64 {
        self.entries.clone().determinant().re
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues().first().is_some_and(|&l| l > 0.0)
    }

    /// Ratio of extreme eigenvalue magnitudes.
    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        let abs = ev.iter().map(|l| l.abs());
        abs.clone().fold(0.0, f64::max) / abs.fold(f64::INFINITY, f64::min)
    }

    /// `max |(self · other - I)_{ij}|`.
    pub fn identity_defect(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        (&self.entries * &other.entries - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// `tr(self · other)`.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        (&self.entries * &other.entries).trace().re
    }
}

/// `t = log |z|²`.
pub fn log_radius(z: &[Complex64]) -> Result<f64> {
    let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    if !(r2 > 0.0) || !r2.is_finite() {
        return Err(SolitonError::Domain("point must be nonzero and finite".into()));
    }
    Ok(r2.ln())
}

fn check_dim(n: usize, z: &[Complex64]) -> Result<()> {
    if z.len() != n {
        return Err(SolitonError::Domain(format!("expected a point of ℂ^{n}, got {} coordinates", z.len())));
    }
    Ok(())
}

/// `z̄_i z_j / |z|²`, the projector onto the radial line.
fn radial_projector(z: &[Complex64]) -> DMatrix<Complex64> {
    let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    DMatrix::from_fn(z.len(), z.len(), |i, j| z[i].conj() * z[j] / r2)
}

/// `g_{ij̄} = e^{-t} φ δ_ij + e^{-2t} z̄_i z_j (φ' - φ)`, assembled as
/// `e^{-t} (φ (δ - P) + φ' P)` so the radial eigenvalue keeps its accuracy
/// when `φ' ≪ φ`.
pub fn metric_from_state(z: &[Complex64], s: &ProfileState) -> HermitianMatrix {
    let p = radial_projector(z);
    let scale = (-s.t).exp();
    HermitianMatrix::from_trusted(DMatrix::from_fn(z.len(), z.len(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        (Complex64::from(delta) - p[(i, j)]) * (scale * s.phi) + p[(i, j)] * (scale * s.phi1)
    }))
}

/// Inverse of [`metric_from_state`]: `e^t φ^{-1} δ + z̄_i z_j (1/φ' - 1/φ)`,
/// assembled as `e^t ((δ - P)/φ + P/φ')`.
pub fn metric_inverse_from_state(z: &[Complex64], s: &ProfileState) -> HermitianMatrix {
    let p = radial_projector(z);
    let scale = s.t.exp();
    HermitianMatrix::from_trusted(DMatrix::from_fn(z.len(), z.len(), |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        (Complex64::from(delta) - p[(i, j)]) * (scale / s.phi) + p[(i, j)] * (scale / s.phi1)
    }))
}

fn state_at_point<P: RadialProfile + ?Sized>(profile: &P, z: &[Complex64]) -> Result<ProfileState> {
    check_dim(profile.dim(), z)?;
    profile.state_at(log_radius(z)?)
}

pub fn metric_at<P: RadialProfile + ?Sized>(profile: &P, z: &[Complex64]) -> Result<HermitianMatrix> {
    let s = state_at_point(profile, z)?;
    Ok(metric_from_state(z, &s))
}

pub fn metric_inverse<P: RadialProfile + ?Sized>(profile: &P, z: &[Complex64]) -> Result<HermitianMatrix> {
    let s = state_at_point(profile, z)?;
    if !(s.phi > 0.0 && s.phi1 > 0.0) {
        return Err(SolitonError::Domain(format!(
            "degenerate metric at t = {}: φ = {}, φ' = {}",
            s.t, s.phi, s.phi1
        )));
    }
    Ok(metric_inverse_from_state(z, &s))
}

/// Limit of the metric at the origin of `ℂⁿ`, where `e^{-t}φ → 1`.
pub fn origin_metric(kind: SolitonKind) -> Result<HermitianMatrix> {
    match kind.validated()? {
        SolitonKind::FlatSpace { n } => Ok(HermitianMatrix::identity(n)),
        _ => Err(SolitonError::Domain("only ℂⁿ has a smooth origin on this chart".into())),
    }
}

/// `det g = e^{-nt} φ^{n-1} φ'`.
pub fn det_from_state(n: usize, s: &ProfileState) -> f64 {
    let nf = n as f64;
    (-nf * s.t + (nf - 1.0) * s.phi.ln() + s.phi1.ln()).exp()
}

pub fn metric_det<P: RadialProfile + ?Sized>(profile: &P, t: f64) -> Result<f64> {
    Ok(det_from_state(profile.dim(), &profile.state_at(t)?))
}

/// `f = -log det g = nt - (n-1) log φ - log φ'`.
pub fn ricci_potential_raw(n: usize, s: &ProfileState) -> Result<f64> {
    if !(s.phi > 0.0 && s.phi1 > 0.0) {
        return Err(SolitonError::Domain(format!("log of non-positive profile value at t = {}", s.t)));
    }
    let nf = n as f64;
    Ok(nf * s.t - (nf - 1.0) * s.phi.ln() - s.phi1.ln())
}

/// `f(t) - f(0)`.
pub fn ricci_potential<P: RadialProfile + ?Sized>(profile: &P, t: f64) -> Result<f64> {
    let n = profile.dim();
    Ok(ricci_potential_raw(n, &profile.state_at(t)?)? - ricci_potential_raw(n, &profile.state_at(0.0)?)?)
}

/// `(f', f'')`, written in the combinations carried by the state:
/// `f' = n(φ-φ')/φ + mixed/φ'` and `f'' = (n-1) mixed/φ + radial/φ'`.
pub fn ricci_derivatives(n: usize, s: &ProfileState) -> (f64, f64) {
    let nf = n as f64;
    let f1 = nf * s.gap / s.phi + s.mixed / s.phi1;
    let f2 = (nf - 1.0) * s.mixed / s.phi + s.radial / s.phi1;
    (f1, f2)
}

/// `R_{ij̄} = e^{-t} f' δ + e^{-2t} z̄_i z_j (f'' - f')`.
pub fn ricci_from_state(z: &[Complex64], s: &ProfileState) -> HermitianMatrix {
    let n = z.len();
    let (f1, f2) = ricci_derivatives(n, s);
    let p = radial_projector(z);
    let scale = (-s.t).exp();
    HermitianMatrix::from_trusted(DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        (Complex64::from(delta) - p[(i, j)]) * (scale * f1) + p[(i, j)] * (scale * f2)
    }))
}

pub fn ricci_at<P: RadialProfile + ?Sized>(profile: &P, z: &[Complex64]) -> Result<HermitianMatrix> {
    let s = state_at_point(profile, z)?;
    Ok(ricci_from_state(z, &s))
}

/// The symmetric point `(e^{t/2}, 0, …, 0)`.
pub fn symmetric_point(n: usize, t: f64) -> Vec<Complex64> {
    let mut z = vec![Complex64::from(0.0); n];
    z[0] = Complex64::from((0.5 * t).exp());
    z
}

/// Ricci form at the symmetric point.
pub fn ricci_tensor<P: RadialProfile + ?Sized>(profile: &P, t: f64) -> Result<HermitianMatrix> {
    let s = profile.state_at(t)?;
    Ok(ricci_from_state(&symmetric_point(profile.dim(), t), &s))
}

/// `R = (n-1) f'/φ + f''/φ'`.
pub fn scalar_from_state(n: usize, s: &ProfileState) -> f64 {
    let (f1, f2) = ricci_derivatives(n, s);
    (n as f64 - 1.0) * f1 / s.phi + f2 / s.phi1
}

pub fn scalar_curvature<P: RadialProfile + ?Sized>(profile: &P, t: f64) -> Result<f64> {
    Ok(scalar_from_state(profile.dim(), &profile.state_at(t)?))
}

/// The constant that the soliton field's defining ratio must equal: `f'/u''`
/// in the steady cases and `(f' - u')/u''` in the shrinking case.
pub fn holomorphy_ratio(kind: SolitonKind, s: &ProfileState) -> f64 {
    let (f1, _) = ricci_derivatives(kind.dim(), s);
    if kind.is_compact() {
        (f1 - s.phi) / s.phi1
    } else {
        f1 / s.phi1
    }
}

/// `V^i = z_i f'/u''`.
pub fn soliton_vector_field<P: RadialProfile + ?Sized>(profile: &P, z: &[Complex64]) -> Result<Vec<Complex64>> {
    check_dim(profile.dim(), z)?;
    if z.iter().all(|c| c.norm_sqr() == 0.0) {
        return match profile.kind() {
            SolitonKind::FlatSpace { .. } => Ok(z.to_vec()),
            _ => Err(SolitonError::Domain("the origin is not a point of this chart".into())),
        };
    }
    let s = state_at_point(profile, z)?;
    let (f1, _) = ricci_derivatives(profile.dim(), &s);
    let ratio = f1 / s.phi1;
    Ok(z.iter().map(|c| c * ratio).collect())
}

/// The coefficients of the curvature tensor at the symmetric point.
///
/// With `δ_{ij1}` nonzero only when both indices are the radial one,
/// `δ_{ijkl1}` only when all four are, and `δ_{ij1̂}` only when `i = j` is
/// tangential,
///
/// ```text
/// R_{ij̄kl̄} = e^{-2t} { A (δ_ij δ_kl + δ_il δ_jk)
///            + B (δ_ij δ_kl1 + δ_il δ_jk1 + δ_jk δ_il1 + δ_kl δ_ij1)
///            + (C + D) δ_ijkl1
///            + E (δ_ij1̂ δ_kl1 + δ_il1̂ δ_jk1 + δ_jk1̂ δ_il1 + δ_kl1̂ δ_ij1) }
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureFrame {
    pub n: usize,
    pub t: f64,
    /// `φ - φ'`
    pub coeff_a: f64,
    /// `3φ' - 2φ - φ''`
    pub coeff_b: f64,
    /// `6φ'' - 11φ' - φ''' + 6φ`
    pub coeff_c: f64,
    /// `(φ' - φ'')² / φ'`
    pub coeff_d: f64,
    /// `(φ - φ')² / φ`
    pub coeff_e: f64,
    /// `e^{-2t}`
    pub prefactor: f64,
    /// `A + B + E = (φ')²/φ - φ''`
    pub mixed: f64,
    /// `2A + 4B + C + D = (φ'')²/φ' - φ'''`
    pub radial: f64,
}

impl CurvatureFrame {
    /// Coefficients recovered from the accurate combinations in `s`:
    /// `A + B + E = mixed` and `2A + 4B + C + D = radial`.
    pub fn from_state(n: usize, s: &ProfileState) -> Self {
        let a = s.gap;
        let e = a * a / s.phi;
        let b = s.mixed - a - e;
        let d = (b + 2.0 * a).powi(2) / s.phi1;
        let c = s.radial - 2.0 * a - 4.0 * b - d;
        Self {
            n,
            t: s.t,
            coeff_a: a,
            coeff_b: b,
            coeff_c: c,
            coeff_d: d,
            coeff_e: e,
            prefactor: (-2.0 * s.t).exp(),
            mixed: s.mixed,
            radial: s.radial,
        }
    }

    /// `R_{ij̄kl̄}` at the symmetric point; index 0 is the radial direction.
    ///
    /// Every component is `(δ_ij δ_kl + δ_il δ_jk)` times `A` when no index is
    /// radial and `A + B + E` when two are; the all-radial one is
    /// `2A + 4B + C + D`. Those sums are read from the carried combinations,
    /// since near a zero section they are far smaller than `A`.
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let radial = [i, j, k, l].iter().filter(|&&x| x == 0).count();
        if radial == 4 {
            return self.prefactor * self.radial;
        }
        let pattern = (i == j && k == l) as u8 as f64 + (i == l && j == k) as u8 as f64;
        let coeff = match radial {
            0 => self.coeff_a,
            2 => self.mixed,
            _ => 0.0,
        };
        self.prefactor * coeff * pattern
    }

    /// The same component summed term by term from the five coefficients.
    pub fn component_from_coefficients(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let d2 = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
        let d1 = |x: usize, y: usize| if x == 0 && y == 0 { 1.0 } else { 0.0 };
        let dh = |x: usize, y: usize| if x == y && x != 0 { 1.0 } else { 0.0 };
        let all = if i == 0 && j == 0 && k == 0 && l == 0 { 1.0 } else { 0.0 };
        let sum = self.coeff_a * (d2(i, j) * d2(k, l) + d2(i, l) * d2(j, k))
            + self.coeff_b * (d2(i, j) * d1(k, l) + d2(i, l) * d1(j, k) + d2(j, k) * d1(i, l) + d2(k, l) * d1(i, j))
            + (self.coeff_c + self.coeff_d) * all
            + self.coeff_e * (dh(i, j) * d1(k, l) + dh(i, l) * d1(j, k) + dh(j, k) * d1(i, l) + dh(k, l) * d1(i, j));
        self.prefactor * sum
    }

    /// Coefficient of `|v¹w̄¹ - w¹v̄¹|²` in the reduced numerator.
    pub fn radial_coefficient(&self) -> f64 {
        self.prefactor * self.radial
    }

    /// Coefficient of `|v¹w²|²` in the reduced numerator, before the factor 2.
    pub fn mixed_coefficient(&self) -> f64 {
        self.prefactor * self.mixed
    }

    pub fn tensor(&self) -> CurvatureTensor {
        let n = self.n;
        let mut data = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data.push(Complex64::from(self.component(i, j, k, l)));
                    }
                }
            }
        }
        CurvatureTensor { n, data }
    }
}

pub fn curvature_frame<P: RadialProfile + ?Sized>(profile: &P, t: f64) -> Result<CurvatureFrame> {
    Ok(CurvatureFrame::from_state(profile.dim(), &profile.state_at(t)?))
}

/// `R_{ij̄kl̄} = -a₂ (δ_ij δ_kl + δ_il δ_jk)`, the limit at the origin of `ℂⁿ`.
pub fn origin_curvature(n: usize, a2: f64) -> CurvatureTensor {
    let mut data = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = (i == j && k == l) as u8 as f64 + (i == l && j == k) as u8 as f64;
                    data.push(Complex64::from(-a2 * v));
                }
            }
        }
    }
    CurvatureTensor { n, data }
}

/// Dense `R_{ij̄kl̄}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    data: Vec<Complex64>,
}

impl CurvatureTensor {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n.pow(4));
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_difference(&self, other: &CurvatureTensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Components in coordinates `w = M z`:
    /// `R'_{ij̄kl̄} = Σ R_{ab̄cd̄} M_ai M̄_bj M_ck M̄_dl`.
    pub fn pull_back(&self, m: &DMatrix<Complex64>) -> CurvatureTensor {
        let n = self.n;
        // contract one index at a time
        let mut cur = self.data.clone();
        for slot in 0..4 {
            let mut next = vec![Complex64::from(0.0); cur.len()];
            let conj = slot % 2 == 1;
            let stride = n.pow(3 - slot as u32);
            for (idx, out) in next.iter_mut().enumerate() {
                let target = (idx / stride) % n;
                let base = idx - target * stride;
                let mut acc = Complex64::from(0.0);
                for a in 0..n {
                    let coef = if conj { m[(a, target)].conj() } else { m[(a, target)] };
                    acc += cur[base + a * stride] * coef;
                }
                *out = acc;
            }
            cur = next;
        }
        CurvatureTensor { n, data: cur }
    }
}

/// Unitary `U` whose first column is `z/|z|`.
pub fn unitary_frame(z: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let n = z.len();
    let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(SolitonError::Domain("point must be nonzero".into()));
    }
    let mut cols: Vec<DVector<Complex64>> = vec![DVector::from_iterator(n, z.iter().map(|c| c / norm))];
    for e in 0..n {
        if cols.len() == n {
            break;
        }
        let mut v = DVector::from_fn(n, |i, _| Complex64::from(if i == e { 1.0 } else { 0.0 }));
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let len = v.norm();
        if len > 1e-8 {
            cols.push(v / Complex64::from(len));
        }
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Full curvature tensor at an arbitrary nonzero point.
pub fn curvature_tensor_at<P: RadialProfile + ?Sized>(profile: &P, z: &[Complex64]) -> Result<CurvatureTensor> {
    let s = state_at_point(profile, z)?;
    let frame = CurvatureFrame::from_state(profile.dim(), &s);
    let u = unitary_frame(z)?;
    Ok(frame.tensor().pull_back(&u.adjoint()))
}

/// Two complex tangent vectors spanning a real 2-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentPair {
    v: Vec<Complex64>,
    w: Vec<Complex64>,
}

impl TangentPair {
    /// Rejects pairs with `max |v^i w̄^j - w^i v̄^j| < 1e-12 |v| |w|`.
    pub fn new(v: Vec<Complex64>, w: Vec<Complex64>) -> Result<Self> {
        if v.len() != w.len() || v.is_empty() {
            return Err(SolitonError::Domain("tangent vectors must have equal positive length".into()));
        }
        let pair = Self { v, w };
        let nv = pair.v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let nw = pair.w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let n = pair.v.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(pair.wedge(i, j).norm());
            }
        }
        if !(worst >= 1e-12 * nv * nw) || nv * nw == 0.0 {
            return Err(SolitonError::DegeneratePlane);
        }
        Ok(pair)
    }

    pub fn v(&self) -> &[Complex64] {
        &self.v
    }

    pub fn w(&self) -> &[Complex64] {
        &self.w
    }

    /// `v^i w̄^j - w^i v̄^j`.
    pub fn wedge(&self, i: usize, j: usize) -> Complex64 {
        self.v[i] * self.w[j].conj() - self.w[i] * self.v[j].conj()
    }

    /// The pair in coordinates `w = M z`.
    pub fn transformed(&self, m: &DMatrix<Complex64>) -> TangentPair {
        let apply = |x: &[Complex64]| -> Vec<Complex64> {
            (m * DVector::from_column_slice(x)).iter().copied().collect()
        };
        TangentPair {
            v: apply(&self.v),
            w: apply(&self.w),
        }
    }
}

/// `R_{ij̄kl̄} (v^i w̄^j - w^i v̄^j)(w^k v̄^l - v^k w̄^l)`.
pub fn sectional_numerator(r: &CurvatureTensor, pair: &TangentPair) -> f64 {
    let n = r.dim();
    let mut acc = Complex64::from(0.0);
    for i in 0..n {
        for j in 0..n {
            let a = pair.wedge(i, j);
            if a == Complex64::from(0.0) {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    acc += r.get(i, j, k, l) * a * pair.wedge(l, k).conj();
                }
            }
        }
    }
    acc.re
}

/// `‖X ∧ Y‖²` up to the constant factor of the area formula.
pub fn plane_area(g: &HermitianMatrix, pair: &TangentPair) -> f64 {
    let n = g.dim();
    let (v, w) = (pair.v(), pair.w());
    let mut acc = Complex64::from(0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let b_ik = v[i] * w[k] - w[i] * v[k];
                    let b_lj = v[l] * w[j] - w[l] * v[j];
                    let term = pair.wedge(i, j) * pair.wedge(l, k).conj() + b_ik * b_lj.conj();
                    acc += g.entry(i, l) * g.entry(k, j) * term;
                }
            }
        }
    }
    acc.re
}

/// `e^{-2t} { X |v¹w̄¹ - w¹v̄¹|² + 2 Y |v¹w²|² }` for a pair in normal form,
/// with `X = (φ'')²/φ' - φ'''` and `Y = (φ')²/φ - φ''`.
pub fn reduced_numerator(frame: &CurvatureFrame, v1: Complex64, w1: Complex64, w2: Complex64) -> f64 {
    let x = frame.radial_coefficient();
    let y = frame.mixed_coefficient();
    x * (v1 * w1.conj() - w1 * v1.conj()).norm_sqr() + 2.0 * y * (v1 * w2).norm_sqr()
}

/// Sectional curvature of the plane at the symmetric point with radius `t`.
pub fn sectional_curvature<P: RadialProfile + ?Sized>(profile: &P, t: f64, pair: &TangentPair) -> Result<f64> {
    let n = profile.dim();
    if pair.v().len() != n {
        return Err(SolitonError::Domain(format!("tangent vectors must live in ℂ^{n}")));
    }
    let s = profile.state_at(t)?;
    let z = symmetric_point(n, t);
    let r = CurvatureFrame::from_state(n, &s).tensor();
    let area = plane_area(&metric_from_state(&z, &s), pair);
    if !(area > 0.0) {
        return Err(SolitonError::DegeneratePlane);
    }
    Ok(sectional_numerator(&r, pair) / area)
}

/// Ball volume `(φⁿ - φ(-∞)ⁿ)/n`, up to the constant of the Euclidean
/// volume form.
pub fn ball_volume(profile: &OpenProfile, t: f64) -> Result<f64> {
    let n = profile.dim() as i32;
    let s = profile.state_at(t)?;
    let a = profile.kind().phi_left_limit();
    Ok((s.phi.powi(n) - a.powi(n)) / n as f64)
}

/// `V(t) / ρ(t)ⁿ`.
pub fn volume_growth(profile: &OpenProfile, t: f64) -> Result<f64> {
    let rho = distance(profile, t)?;
    Ok(ball_volume(profile, t)? / rho.powi(profile.dim() as i32))
}

/// `R(t) ρ(t)`.
pub fn curvature_decay(profile: &OpenProfile, t: f64) -> Result<f64> {
    Ok(scalar_curvature(profile, t)? * distance(profile, t)?)
}

/// `∂_k ∂_l̄ F` by centered differences in the real coordinates, where
/// `∂ = (∂_x - i∂_y)/2`:
/// `∂_k ∂_l̄ F = (F_{x_k x_l} + F_{y_k y_l} + i(F_{x_k y_l} - F_{y_k x_l}))/4`.
pub fn fd_complex_hessian<F>(mut f: F, z: &[Complex64], h: f64) -> Result<DMatrix<Complex64>>
where
    F: FnMut(&[Complex64]) -> Result<Complex64>,
{
    let n = z.len();
    let mut out = DMatrix::from_element(n, n, Complex64::from(0.0));
    let dirs = |k: usize| [(k, Complex64::from(1.0)), (k, Complex64::i())];
    let mut second = |a: (usize, Complex64), b: (usize, Complex64)| -> Result<Complex64> {
        let mut eval = |sa: f64, sb: f64| {
            let mut p = z.to_vec();
            p[a.0] += a.1 * (sa * h);
            p[b.0] += b.1 * (sb * h);
            f(&p)
        };
        Ok((eval(1.0, 1.0)? - eval(1.0, -1.0)? - eval(-1.0, 1.0)? + eval(-1.0, -1.0)?) / (4.0 * h * h))
    };
    for k in 0..n {
        for l in 0..n {
            let [xk, yk] = dirs(k);
            let [xl, yl] = dirs(l);
            let xx = second(xk, xl)?;
            let yy = second(yk, yl)?;
            let xy = second(xk, yl)?;
            let yx = second(yk, xl)?;
            out[(k, l)] = (xx + yy + Complex64::i() * (xy - yx)) / 4.0;
        }
    }
    Ok(out)
}

/// Fourth-order version of [`fd_complex_hessian`]: each real second
/// derivative is the product of two five-point first-derivative stencils.
pub fn fd_complex_hessian4<F>(mut f: F, z: &[Complex64], h: f64) -> Result<DMatrix<Complex64>>
where
    F: FnMut(&[Complex64]) -> Result<Complex64>,
{
    const W: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
    let n = z.len();
    let mut out = DMatrix::from_element(n, n, Complex64::from(0.0));
    let mut second = |a: (usize, Complex64), b: (usize, Complex64)| -> Result<Complex64> {
        let mut acc = Complex64::from(0.0);
        for &(sa, wa) in &W {
            for &(sb, wb) in &W {
                let mut p = z.to_vec();
                p[a.0] += a.1 * (sa * h);
                p[b.0] += b.1 * (sb * h);
                acc += f(&p)? * (wa * wb);
            }
        }
        Ok(acc / (h * h))
    };
    let one = Complex64::from(1.0);
    let i = Complex64::i();
    for k in 0..n {
        for l in 0..n {
            let xx = second((k, one), (l, one))?;
            let yy = second((k, i), (l, i))?;
            let xy = second((k, one), (l, i))?;
            let yx = second((k, i), (l, one))?;
            out[(k, l)] = (xx + yy + i * (xy - yx)) / 4.0;
        }
    }
    Ok(out)
}

/// `∂_k M` and `∂_l̄ M` of a matrix field by centered differences.
fn fd_first<F>(f: &mut F, z: &[Complex64], h: f64, k: usize) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)>
where
    F: FnMut(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let mut shifted = |d: Complex64| {
        let mut p = z.to_vec();
        p[k] += d;
        f(&p)
    };
    let dx = (shifted(Complex64::from(h))? - shifted(Complex64::from(-h))?) / Complex64::from(2.0 * h);
    let dy = (shifted(Complex64::new(0.0, h))? - shifted(Complex64::new(0.0, -h))?) / Complex64::from(2.0 * h);
    let half = Complex64::from(0.5);
    let i = Complex64::i();
    Ok(((&dx - &dy * i) * half, (&dx + &dy * i) * half))
}

/// Curvature from the general formula
/// `R_{ij̄kl̄} = -∂_k∂_l̄ g_{ij̄} + g^{pq̄} ∂_k g_{iq̄} ∂_l̄ g_{pj̄}`,
/// differencing the metric field `g`.
pub fn fd_curvature_tensor<F>(mut g: F, z: &[Complex64], h: f64) -> Result<CurvatureTensor>
where
    F: FnMut(&[Complex64]) -> Result<DMatrix<Complex64>>,
{
    let n = z.len();
    let g0 = g(z)?;
    let inv = g0
        .clone()
        .try_inverse()
        .ok_or_else(|| SolitonError::Domain("metric is singular".into()))?;
    let mut d = Vec::with_capacity(n);
    let mut dbar = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b) = fd_first(&mut g, z, h, k)?;
        d.push(a);
        dbar.push(b);
    }
    // second derivatives of each entry
    let mut hess = vec![vec![Complex64::from(0.0); n * n]; n * n];
    for i in 0..n {
        for j in 0..n {
            let m = fd_complex_hessian(|p| Ok(g(p)?[(i, j)]), z, h)?;
            for k in 0..n {
                for l in 0..n {
                    hess[i * n + j][k * n + l] = m[(k, l)];
                }
            }
        }
    }
    Ok(CurvatureTensor::from_fn(n, |i, j, k, l| {
        let mut acc = -hess[i * n + j][k * n + l];
        for p in 0..n {
            for q in 0..n {
                // g^{pq̄} = (G⁻¹)[q][p]
                acc += inv[(q, p)] * d[k][(i, q)] * dbar[l][(p, j)];
            }
        }
        acc
    }))
}

/// Metric field near a base state, for the difference oracles.
pub fn metric_field<'a, P: RadialProfile + ?Sized>(
    profile: &'a P,
    base: ProfileState,
) -> impl FnMut(&[Complex64]) -> Result<DMatrix<Complex64>> + 'a {
    move |p: &[Complex64]| {
        let s = profile.state_near(&base, log_radius(p)? - base.t)?;
        Ok(metric_from_state(p, &s).entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cigar_metric_and_inverse() {
        let p = OpenProfile::flat(1).unwrap();
        let z = [Complex64::from(1.0)];
        let g = metric_at(&p, &z).unwrap();
        assert!((g.entry(0, 0).re - 0.5).abs() < 1e-15);
        let inv = metric_inverse(&p, &z).unwrap();
        assert!((inv.entry(0, 0).re - 2.0).abs() < 1e-14);
        assert!((metric_det(&p, 0.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0].map(Complex64::from));
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn frame_is_unitary() {
        let z = [Complex64::new(0.3, -1.0), Complex64::new(0.0, 2.0), Complex64::new(-0.5, 0.1)];
        let u = unitary_frame(&z).unwrap();
        let defect = (&u.adjoint() * &u - DMatrix::identity(3, 3)).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(defect < 1e-14);
        let w = u.adjoint() * DVector::from_column_slice(&z);
        assert!(w[1].norm() < 1e-14 && w[2].norm() < 1e-14);
    }

    #[test]
    fn colinear_pair_is_degenerate() {
        let v = vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 0.0)];
        let w: Vec<Complex64> = v.iter().map(|c| c * 3.0).collect();
        assert_eq!(TangentPair::new(v, w), Err(SolitonError::DegeneratePlane));
    }
}
