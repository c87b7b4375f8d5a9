//! Periodic symbols, oscillatory integrals, and major-arc multipliers.
//!
//! The objects here live on the frequency side of the modulated operator:
//! the lattice symbol
//!
//! > m_{j,λ}(ξ) = Σ_y e(λ|y|^{2d} + ξ·y) K_j(y),
//!
//! its continuum companion Φ_{j,ν}(ξ) = ∫ e(ν|y|^{2d} + ξ·y) K_j(y) dy,
//! the major-arc assemblies 𝓛_{s,α,M}[·] built from complete Gauss sums and
//! scaled cutoffs, the auxiliary sharp multiplier over the rational
//! frequency set, the per-class pieces L^s and the resulting error term E,
//! and the frequency-band sums Φ̃_{ℓ,μ}.
//!
//! Inverse transforms throughout use the convention
//! 𝓕⁻¹[g](y) = ∫ e(−ξ·y) g(ξ) dξ on both the torus and the line.

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::arithmetic::{
    best_rational_approx, denominator_class, iw_set, major_arc_membership,
    nearest_rational_point, Modulation, RationalVector, ReducedRational,
    REAL_COMPARISON_SLACK,
};
use crate::error::{Error, Result};
use crate::expsum::{complete_sum, CompleteSumSpec};
use crate::kernels::{
    chi_sm_support_radius, cutoff_chi_sm, cutoff_chi_tilde_sm, cutoff_scale_exponent,
    dyadic_partition, dyadic_piece, CzKernel,
};
use crate::phase::{frac_f64, frac_mul_int, unit_phase, ChunkedSum};
use crate::quadrature::integrate_oscillatory;

/// Enumeration guard for the discrete symbol (~2^{(j+2)n} box points).
const MAX_SYMBOL_J: u32 = 14;

/// Evaluation budget per oscillatory integral.
const MAX_QUAD_EVALS: usize = 4_000_000;

/// Where a sampled multiplier value came from; each variant carries exactly
/// the parameters that are meaningful for its kind.
#[derive(Debug, Clone, Serialize)]
pub enum Provenance {
    Symbol { j: u32, lambda: f64 },
    Oscillatory { j: u32, nu: f64 },
    TruncatedOscillatory { j: u32, nu: f64, m_exp: f64 },
    Arc { s: u32, alpha: ReducedRational, m_exp: f64 },
    Sharp { s: u32, m_exp: f64 },
    Piece { s: u32, j: u32, lambda: f64, m_exp: f64 },
    ErrorTerm { j: u32, lambda: f64, m_exp: f64 },
    Band { l: i32, mu: f64, s: u32, m_exp: f64 },
}

/// A multiplier value tagged with its frequency and provenance, for export.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierSample {
    /// (re, im) of the sampled value.
    pub value: (f64, f64),
    pub xi: Vec<f64>,
    pub provenance: Provenance,
}

impl MultiplierSample {
    pub fn new(value: Complex64, xi: &[f64], provenance: Provenance) -> Self {
        MultiplierSample {
            value: (value.re, value.im),
            xi: xi.to_vec(),
            provenance,
        }
    }
}

/// |y|₂^{2d} as an exact integer.
fn norm_pow_2d(y: &[i64], d: u32) -> Result<i128> {
    let norm2: i128 = y.iter().map(|&v| (v as i128) * (v as i128)).sum();
    norm2.checked_pow(d).ok_or(Error::Overflow {
        what: "phase degree |y|^{2d}",
    })
}

/// (ξ·y) mod 1 with per-coordinate compensated products.
fn xi_dot_phase(xi: &[f64], y: &[i64]) -> f64 {
    let mut acc = 0.0;
    for (&c, &v) in xi.iter().zip(y) {
        acc += frac_mul_int(c, v as i128);
    }
    frac_f64(acc)
}

/// Visits the support box of K_j in (y, −y) pairs: `visit` receives each
/// unordered pair once through its representative with positive leading
/// nonzero coordinate.
fn for_each_support_pair<F: FnMut(&[i64], &[i64])>(
    j: u32,
    n: usize,
    mut visit: F,
) -> Result<()> {
    crate::kernels::for_each_support_point(j, n, |y| {
        let leading = y.iter().find(|&&v| v != 0).copied().unwrap_or(0);
        if leading > 0 {
            let neg: Vec<i64> = y.iter().map(|&v| -v).collect();
            visit(y, &neg);
        }
    })
}

/// The periodic symbol m_{j,λ}(ξ) = Σ_y e(λ|y|^{2d} + ξ·y) K_j(y) by exact
/// direct summation over the support of K_j.
///
/// Terms are accumulated in (y, −y) pairs, each pair summed before entering
/// the reduction tree; for an odd kernel at λ = 0, ξ = 0 every pair cancels
/// exactly, so the result is literally zero.
pub fn discrete_symbol(
    j: u32,
    lambda: &Modulation,
    xi: &[f64],
    kernel: &CzKernel,
    d: u32,
) -> Result<Complex64> {
    if xi.len() != kernel.dimension() {
        return Err(Error::DimensionMismatch {
            expected: kernel.dimension(),
            actual: xi.len(),
        });
    }
    if j > MAX_SYMBOL_J {
        return Err(Error::GuardExceeded {
            guard: "symbol enumeration",
            limit: MAX_SYMBOL_J as u128,
            requested: j as u128,
        });
    }
    if d < 1 {
        return Err(Error::InvalidParameter {
            what: "degree",
            details: "d must be ≥ 1".into(),
        });
    }
    let mut acc = ChunkedSum::new();
    let mut failure: Option<Error> = None;
    for_each_support_pair(j, kernel.dimension(), |y, neg| {
        if failure.is_some() {
            return;
        }
        let term = |point: &[i64]| -> Result<Complex64> {
            let k = dyadic_piece(kernel, j, point)?;
            if k == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let m = norm_pow_2d(point, d)?;
            let theta = lambda.phase_times(m) + xi_dot_phase(xi, point);
            Ok(k * unit_phase(theta))
        };
        match (term(y), term(neg)) {
            (Ok(a), Ok(b)) => acc.push(a + b),
            (Err(e), _) | (_, Err(e)) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(acc.finish()),
    }
}

/// Σ_y |K_j(y)| over the lattice: the triangle bound for the symbol.
pub fn symbol_triangle_bound(j: u32, kernel: &CzKernel) -> Result<f64> {
    crate::kernels::dyadic_l1_norm(kernel, j)
}

/// Radial integration endpoints of the j-th dyadic piece: [0, 4] for the
/// absorbing j = 1 piece, [2^{j−1}, 2^{j+1}] otherwise.
fn radial_support(j: u32) -> (f64, f64) {
    if j == 1 {
        (0.0, 4.0)
    } else {
        ((2.0f64).powi(j as i32 - 1), (2.0f64).powi(j as i32 + 1))
    }
}

/// The oscillatory integral Φ_{j,ν}(ξ) = ∫_{ℝⁿ} e(ν|y|^{2d} + ξ·y) K_j(y) dy
/// by radial–angular factorization and certified adaptive quadrature with
/// absolute error ≤ tol.
///
/// For n = 1 the odd symmetrization collapses the line integral to
/// ∫₀^∞ 2i·sin(2πξr)·ρ(r)Ω(1)ψ_j(r)·e(νr^{2d}) dr, whose integrand extends
/// continuously across the j = 1 kernel pole at r = 0.  For n = 2 the inner
/// angular integral is evaluated by the trapezoid rule (spectrally accurate
/// on the periodic smooth integrand) with the node count scaled to r|ξ|.
pub fn oscillatory_integral(
    j: u32,
    nu: f64,
    xi: &[f64],
    kernel: &CzKernel,
    d: u32,
    tol: f64,
) -> Result<Complex64> {
    let n = kernel.dimension();
    if xi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: xi.len(),
        });
    }
    if j < 1 || d < 1 {
        return Err(Error::InvalidParameter {
            what: "oscillatory integral",
            details: "need j ≥ 1 and d ≥ 1".into(),
        });
    }
    if n > 2 {
        return Err(Error::InvalidParameter {
            what: "oscillatory integral",
            details: "radial-angular evaluation covers n ≤ 2".into(),
        });
    }
    let (a, b) = radial_support(j);
    let xi_norm = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
    let cycles =
        nu.abs() * (b.powi(2 * d as i32) - a.powi(2 * d as i32)) + xi_norm * (b - a) + 1.0;
    if n == 1 {
        let omega = kernel.angular(&[1.0]);
        let xi0 = xi[0];
        let f = |r: f64| -> Complex64 {
            if r == 0.0 {
                // Removable singularity: 2i·sin(2πξr)·ρ(r) → 4πiξ·(rρ(r)).
                let c = 1e-9 * kernel.radial_profile(1e-9);
                return Complex64::new(0.0, 2.0 * std::f64::consts::TAU * xi0 * c)
                    * omega
                    * dyadic_partition(j, 0.0);
            }
            let radial = kernel.radial_profile(r) * omega * dyadic_partition(j, r);
            if radial == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let osc = unit_phase(frac_mul_real_pow(nu, r, d));
            let s = (std::f64::consts::TAU * xi0 * r).sin();
            Complex64::new(0.0, 2.0 * s * radial) * osc
        };
        let result = integrate_oscillatory(f, a, b, cycles, tol, MAX_QUAD_EVALS)?;
        Ok(result.value)
    } else {
        let xi0 = xi[0];
        let xi1 = xi[1];
        let f = |r: f64| -> Complex64 {
            let radial = kernel.radial_profile(r) * dyadic_partition(j, r) * r;
            if radial == 0.0 || r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            // Trapezoid over the circle; node count tracks the angular
            // oscillation r|ξ| and the smooth angular factor.
            let nodes = ((8.0 * r * xi_norm).ceil() as usize).max(64);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..nodes {
                let theta = std::f64::consts::TAU * (k as f64) / (nodes as f64);
                let omega = [theta.cos(), theta.sin()];
                let phase = frac_f64(r * (xi0 * omega[0] + xi1 * omega[1]));
                acc += kernel.angular(&omega) * unit_phase(phase);
            }
            acc *= std::f64::consts::TAU / (nodes as f64);
            let osc = unit_phase(frac_mul_real_pow(nu, r, d));
            radial * acc * osc
        };
        let result = integrate_oscillatory(f, a.max(1e-12), b, cycles, tol, MAX_QUAD_EVALS)?;
        Ok(result.value)
    }
}

/// (ν·r^{2d}) mod 1 for real r, reducing after the power to keep the
/// argument of sin/cos small.
fn frac_mul_real_pow(nu: f64, r: f64, d: u32) -> f64 {
    frac_f64(nu * r.powi(2 * d as i32))
}

/// The truncation threshold 2^{−2dj}·j^M.
pub fn phi_truncation_radius(j: u32, m_exp: f64, d: u32) -> f64 {
    (2.0f64).powi(-(2 * d as i32 * j as i32)) * (j as f64).powf(m_exp)
}

/// Φ_{j,ν,M}(ξ) = Φ_{j,ν}(ξ)·1_{|ν| ≤ 2^{−2dj}j^M}: the indicator is closed
/// (≤, matching the defining inequality literally) and short-circuits to an
/// exact zero before any quadrature runs.
pub fn truncated_phi(
    j: u32,
    nu: f64,
    xi: &[f64],
    m_exp: f64,
    kernel: &CzKernel,
    d: u32,
    tol: f64,
) -> Result<Complex64> {
    if nu.abs() > phi_truncation_radius(j, m_exp, d) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    oscillatory_integral(j, nu, xi, kernel, d, tol)
}

/// The major-arc multiplier
/// 𝓛_{s,α,M}[m](ξ) = Σ_{β ∈ (1/q)ℤⁿ} S(α, β)·m(ξ−β)·χ_{s,M}(ξ−β), α = a/q.
///
/// The χ_{s,M} supports have radius < 1/(2q), so the translates are
/// disjoint and at most one β survives for any ξ: the implementation
/// rounds q·ξ to locate it and evaluates that single term (first the
/// cutoff, so `m` and the Gauss sum are only computed when the term can be
/// nonzero).
pub fn arc_multiplier<F>(
    s: u32,
    alpha: &ReducedRational,
    m_exp: f64,
    m: F,
    xi: &[f64],
    d: u32,
) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    if denominator_class(alpha) != s {
        return Err(Error::PreconditionViolated(format!(
            "α = {alpha} has denominator class {}, not s = {s}",
            denominator_class(alpha)
        )));
    }
    let q = alpha.den();
    let beta = nearest_rational_point(xi, q)?;
    let u: Vec<f64> = xi
        .iter()
        .zip(&beta.nums)
        .map(|(&x, &b)| x - b as f64 / q as f64)
        .collect();
    let chi = cutoff_chi_sm(s, m_exp, &u)?;
    if chi == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let spec = CompleteSumSpec::new(alpha.num(), beta.nums.clone(), q, d)?;
    let gauss = complete_sum(&spec);
    Ok(gauss * m(&u)? * chi)
}

/// The auxiliary sharp multiplier
/// 𝓛♯_s[m](ξ) = Σ_{β ∈ 𝒰_{2^s} + ℤⁿ} m(ξ−β)·χ̃_s(ξ−β),
/// where 𝒰_{2^s} is the rational frequency set of order 2^s.
///
/// Distinct set elements are ≥ 2^{−2s} apart while the χ̃_s support radius
/// is ≤ 2^{−4s}, so again at most one term survives; the implementation
/// reduces ξ to the nearest periodized element.
pub fn sharp_multiplier<F>(s: u32, m: F, xi: &[f64], m_exp: f64) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    if s < 1 {
        return Err(Error::InvalidParameter {
            what: "class index",
            details: "s must be ≥ 1".into(),
        });
    }
    let order = 1i64
        .checked_shl(s)
        .filter(|&v| v >= 2)
        .ok_or(Error::Overflow {
            what: "frequency set order 2^s",
        })?;
    let set = iw_set(xi.len(), order, chi_sm_support_radius(s, m_exp)?)?;
    let (point, _) = set.nearest(xi)?;
    // Per-coordinate circle difference ξ − β reduced to [−1/2, 1/2).
    let u: Vec<f64> = xi
        .iter()
        .zip(&point)
        .map(|(&x, r)| {
            let t = x - r.value();
            t - t.round()
        })
        .collect();
    let chi = cutoff_chi_tilde_sm(s, m_exp, &u)?;
    if chi == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(m(&u)? * chi)
}

/// The arc window 2^{−4s·2^{s/(2M)}} around elements of 𝒜_s.
pub fn arc_window(s: u32, m_exp: f64) -> Result<f64> {
    Ok((2.0f64).powf(-cutoff_scale_exponent(s, m_exp)?))
}

/// Locates the unique α ∈ 𝒜_s with |λ − α| ≤ arc_window(s, M), if any.
///
/// The best rational approximant with denominator < 2^s is the only
/// candidate: any two distinct rationals with denominators < 2^s are at
/// distance > 2^{−2s} ≥ 2·window apart, so if the best one misses the
/// window (or lands in a lower class), no class-s rational can qualify.
pub fn locate_arc_alpha(
    s: u32,
    lambda: &Modulation,
    m_exp: f64,
) -> Result<Option<ReducedRational>> {
    let window = arc_window(s, m_exp)?;
    let max_den = (1i64 << s) - 1;
    let best = match lambda {
        Modulation::Rational(r) if r.den() <= max_den => r.fract(),
        _ => best_rational_approx(frac_f64(lambda.value()), max_den)?,
    };
    if denominator_class(&best) != s {
        return Ok(None);
    }
    let dist = (frac_f64(lambda.value()) - best.value()).abs();
    if dist <= window + REAL_COMPARISON_SLACK {
        Ok(Some(best))
    } else {
        Ok(None)
    }
}

/// The piece L^s_{j,λ,M}(ξ) = 𝓛_{s,α,M}[Φ_{j,λ−α,M}](ξ) for the unique
/// α ∈ 𝒜_s within the arc window of λ; zero when no such α exists (the
/// defining truncation annihilates the term for any choice of fallback α,
/// and 0 is the unique value independent of that arbitrary choice).
pub fn piece_l(
    s: u32,
    j: u32,
    lambda: &Modulation,
    m_exp: f64,
    xi: &[f64],
    kernel: &CzKernel,
    d: u32,
    tol: f64,
) -> Result<Complex64> {
    let alpha = match locate_arc_alpha(s, lambda, m_exp)? {
        Some(a) => a,
        None => return Ok(Complex64::new(0.0, 0.0)),
    };
    let nu = frac_f64(lambda.value()) - alpha.value();
    if nu.abs() > phi_truncation_radius(j, m_exp, d) {
        // The truncated Φ vanishes identically at this modulation offset.
        return Ok(Complex64::new(0.0, 0.0));
    }
    arc_multiplier(
        s,
        &alpha,
        m_exp,
        |u| truncated_phi(j, nu, u, m_exp, kernel, d, tol),
        xi,
        d,
    )
}

/// The error term E_{j,λ,M}(ξ) = m_{j,λ}(ξ)·1_{X_{j,M}}(λ) −
/// Σ_{s: 2^s ≤ j^M} L^s_{j,λ,M}(ξ).
pub fn error_term(
    j: u32,
    lambda: &Modulation,
    m_exp: f64,
    xi: &[f64],
    kernel: &CzKernel,
    d: u32,
    tol: f64,
) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    if major_arc_membership(lambda.value(), j, m_exp, d)?.is_some() {
        total += discrete_symbol(j, lambda, xi, kernel, d)?;
    }
    let jm = (j as f64).powf(m_exp);
    let mut s = 1u32;
    while (2.0f64).powi(s as i32) <= jm {
        total -= piece_l(s, j, lambda, m_exp, xi, kernel, d, tol)?;
        s += 1;
    }
    Ok(total)
}

/// Residual of the single-arc approximation
/// m_{j,λ}(ξ) ≈ S(a/q, b/q)·Φ_{j,λ−a/q}(ξ−b/q):
/// returns (|m − S·Φ|, qδ), the second component being the bound input the
/// approximation is linear in, so callers can fit the constant.
///
/// b carries the shared denominator q; preconditions (each refused by
/// name): q ≤ 2^{j−2}, δ ∈ (2^{−j}, 1), |λ−a/q| ≤ δ·2^{−(2d−1)j},
/// max_i |ξ_i−b_i/q| ≤ δ, and gcd(a, b, q) = 1.
#[allow(clippy::too_many_arguments)]
pub fn approx_residual(
    j: u32,
    lambda: &Modulation,
    xi: &[f64],
    a: i64,
    b: &RationalVector,
    delta: f64,
    kernel: &CzKernel,
    d: u32,
    tol: f64,
) -> Result<(f64, f64)> {
    let q = b.den;
    if xi.len() != b.dim() || xi.len() != kernel.dimension() {
        return Err(Error::DimensionMismatch {
            expected: kernel.dimension(),
            actual: xi.len(),
        });
    }
    if j < 2 || (q as u128) > (1u128 << (j - 2)) {
        return Err(Error::PreconditionViolated(format!(
            "modulus too large: need q ≤ 2^(j−2), got q = {q} at j = {j}"
        )));
    }
    let two_neg_j = (2.0f64).powi(-(j as i32));
    if !(delta > two_neg_j && delta < 1.0) {
        return Err(Error::PreconditionViolated(format!(
            "δ = {delta} outside the admissible interval (2^−{j}, 1)"
        )));
    }
    let lambda_dist = (lambda.value() - a as f64 / q as f64).abs();
    let lambda_bound = delta * (2.0f64).powi(-((2 * d - 1) as i32 * j as i32));
    if lambda_dist > lambda_bound + REAL_COMPARISON_SLACK {
        return Err(Error::PreconditionViolated(format!(
            "|λ − a/q| = {lambda_dist} exceeds δ·2^(−(2d−1)j) = {lambda_bound}"
        )));
    }
    let mut xi_dist = 0.0f64;
    for (&x, &bi) in xi.iter().zip(&b.nums) {
        xi_dist = xi_dist.max((x - bi as f64 / q as f64).abs());
    }
    if xi_dist > delta + REAL_COMPARISON_SLACK {
        return Err(Error::PreconditionViolated(format!(
            "max|ξ − b/q| = {xi_dist} exceeds δ = {delta}"
        )));
    }
    let mut g = a.gcd(&q);
    for &bi in &b.nums {
        g = g.gcd(&bi);
    }
    if g != 1 {
        return Err(Error::PreconditionViolated(format!(
            "not normalized: gcd(a, b, q) = {g} ≠ 1"
        )));
    }
    let m_val = discrete_symbol(j, lambda, xi, kernel, d)?;
    let spec = CompleteSumSpec::new(a, b.nums.clone(), q, d)?;
    let gauss = complete_sum(&spec);
    let nu = lambda.value() - a as f64 / q as f64;
    let u: Vec<f64> = xi
        .iter()
        .zip(&b.nums)
        .map(|(&x, &bi)| x - bi as f64 / q as f64)
        .collect();
    let phi = oscillatory_integral(j, nu, &u, kernel, d, tol)?;
    Ok(((m_val - gauss * phi).norm(), q as f64 * delta))
}

/// The band index set 𝒥_{ℓ,μ} = {j ≥ 1: 2^s ≤ j^M, 2^{ℓ−1} ≤ |μ|·2^{2dj} ≤
/// 2^{ℓ+1}}, enumerated directly from the two-sided inequality.  Empty for
/// μ = 0.  The window spans 1/d ≤ 1 in j, so the set never holds more than
/// two indices.
pub fn band_index_set(l: i32, mu: f64, s: u32, m_exp: f64, d: u32) -> Result<Vec<u32>> {
    if d < 1 {
        return Err(Error::InvalidParameter {
            what: "degree",
            details: "d must be ≥ 1".into(),
        });
    }
    if mu == 0.0 {
        return Ok(Vec::new());
    }
    let lo = (2.0f64).powi(l - 1);
    let hi = (2.0f64).powi(l + 1);
    let mut set = Vec::new();
    for j in 1u32..=512 {
        let scaled = mu.abs() * (2.0f64).powi(2 * d as i32 * j as i32);
        if scaled > hi {
            break;
        }
        if scaled >= lo && (2.0f64).powi(s as i32) <= (j as f64).powf(m_exp) {
            set.push(j);
        }
    }
    Ok(set)
}

/// The frequency-band multiplier Φ̃_{ℓ,μ}(ξ) = Σ_{j ∈ 𝒥_{ℓ,μ}} Φ_{j,μ}(ξ).
#[allow(clippy::too_many_arguments)]
pub fn band_multiplier(
    l: i32,
    mu: f64,
    s: u32,
    m_exp: f64,
    xi: &[f64],
    kernel: &CzKernel,
    d: u32,
    tol: f64,
) -> Result<Complex64> {
    let set = band_index_set(l, mu, s, m_exp, d)?;
    let mut total = Complex64::new(0.0, 0.0);
    for j in set {
        total += oscillatory_integral(j, mu, xi, kernel, d, tol)?;
    }
    Ok(total)
}

/// ℓ¹ gap of the low-frequency bands: Σ_j Σ_y |e(μ|y|^{2d}) − 1|·|K_j(y)|
/// over the lattice, where j runs over the indices with 2^s ≤ j^M and
/// |μ|·2^{2dj} ≤ 1.  By the inverse identity 𝓕⁻¹[Φ_{j,μ}](y) =
/// e(μ|y|^{2d})·K_j(y) this is exactly Σ_j ‖𝓕⁻¹[Φ_{j,μ}] − K_j‖₁ restricted
/// to lattice points, computed without quadrature.
pub fn low_frequency_gap(
    s: u32,
    m_exp: f64,
    mu: f64,
    kernel: &CzKernel,
    d: u32,
) -> Result<f64> {
    if mu == 0.0 {
        return Err(Error::InvalidParameter {
            what: "band frequency",
            details: "μ must be nonzero (the low-frequency range is unbounded at μ = 0)"
                .into(),
        });
    }
    if d < 1 {
        return Err(Error::InvalidParameter {
            what: "degree",
            details: "d must be ≥ 1".into(),
        });
    }
    // The low-frequency window must close within the enumeration budget.
    let j_top = ((1.0 / mu.abs()).log2() / (2.0 * d as f64)).floor();
    if j_top > MAX_SYMBOL_J as f64 {
        return Err(Error::GuardExceeded {
            guard: "low-frequency enumeration",
            limit: MAX_SYMBOL_J as u128,
            requested: j_top as u128,
        });
    }
    let mut total = 0.0f64;
    for j in 1u32..=MAX_SYMBOL_J {
        if (2.0f64).powi(s as i32) > (j as f64).powf(m_exp) {
            continue;
        }
        if mu.abs() * (2.0f64).powi(2 * d as i32 * j as i32) > 1.0 {
            break;
        }
        let mut terms = Vec::new();
        crate::kernels::for_each_support_point(j, kernel.dimension(), |y| {
            let k = dyadic_piece(kernel, j, y).unwrap_or(0.0);
            if k == 0.0 {
                return;
            }
            if let Ok(m) = norm_pow_2d(y, d) {
                let t = frac_mul_int(mu, m);
                terms.push(2.0 * (std::f64::consts::PI * t).sin().abs() * k.abs());
            }
        })?;
        total += crate::phase::pairwise_sum_f64(&terms);
    }
    Ok(total)
}
