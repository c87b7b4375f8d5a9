//! Complete Gauss-type exponential sums S(a/q, b/q) with exact rational
//! phases, incomplete Weyl sums over convex lattice regions with C¹
//! weights, and decay probes that fit the measured cancellation against
//! power-law and log-power windows.
//!
//! Throughout this module `log` means the natural logarithm.

use num_complex::Complex64;
use num_integer::Integer;

use crate::arithmetic::{convergents, ReducedRational};
use crate::decay::DecayTable;
use crate::error::{Error, Result};
use crate::phase::{frac_mul_int, frac_ratio, unit_phase, ChunkedSum};

/// Enumeration guard shared by complete and incomplete sums.
const MAX_SUM_POINTS: u128 = 100_000_000;

/// Specification of a complete sum
/// S(a/q, b/q) = q^{−n} Σ_{r ∈ [0,q)ⁿ} e((a|r|^{2d} + b·r)/q),
/// normalized so that gcd(a, b₁, …, bₙ, q) = 1.
#[derive(Debug, Clone)]
pub struct CompleteSumSpec {
    a: i64,
    b: Vec<i64>,
    q: i64,
    d: u32,
}

impl CompleteSumSpec {
    pub fn new(a: i64, b: Vec<i64>, q: i64, d: u32) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidParameter {
                what: "modulus",
                details: "q must be ≥ 1".into(),
            });
        }
        if d < 1 {
            return Err(Error::InvalidParameter {
                what: "degree",
                details: "d must be ≥ 1".into(),
            });
        }
        if b.is_empty() {
            return Err(Error::InvalidParameter {
                what: "linear coefficients",
                details: "dimension must be ≥ 1".into(),
            });
        }
        let mut g = a.gcd(&q);
        for &bi in &b {
            g = g.gcd(&bi);
        }
        if g != 1 {
            return Err(Error::PreconditionViolated(format!(
                "sum is not normalized: gcd(a, b, q) = {g} ≠ 1"
            )));
        }
        let total = (q as u128).checked_pow(b.len() as u32).unwrap_or(u128::MAX);
        if total > MAX_SUM_POINTS {
            return Err(Error::GuardExceeded {
                guard: "complete sum enumeration",
                limit: MAX_SUM_POINTS,
                requested: total,
            });
        }
        Ok(CompleteSumSpec { a, b, q, d })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn modulus(&self) -> i64 {
        self.q
    }
}

fn pow_mod(base: i128, exp: u32, modulus: i128) -> i128 {
    let mut r: i128 = 1 % modulus;
    let mut b = base.rem_euclid(modulus);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            r = (r * b).rem_euclid(modulus);
        }
        b = (b * b).rem_euclid(modulus);
        e >>= 1;
    }
    r
}

/// Evaluates the complete sum by direct enumeration with exact integer
/// phase reduction mod q; |result| ≤ 1 by construction (it is an average
/// of unit-modulus terms).
pub fn complete_sum(spec: &CompleteSumSpec) -> Complex64 {
    let n = spec.dim();
    let q = spec.q as i128;
    // e(t/q) table, exact rational arguments.
    let roots: Vec<Complex64> = (0..spec.q)
        .map(|t| unit_phase(frac_ratio(t as i128, q)))
        .collect();
    let a_red = (spec.a as i128).rem_euclid(q);
    let b_red: Vec<i128> = spec.b.iter().map(|&bi| (bi as i128).rem_euclid(q)).collect();
    let mut acc = ChunkedSum::new();
    let mut r = vec![0i64; n];
    loop {
        let norm2: i128 = r.iter().map(|&v| (v as i128) * (v as i128)).sum();
        let mut t = (a_red * pow_mod(norm2, spec.d, q)).rem_euclid(q);
        for (&bi, &ri) in b_red.iter().zip(&r) {
            t = (t + bi * ri as i128).rem_euclid(q);
        }
        acc.push(roots[t as usize]);
        let mut axis = n;
        loop {
            if axis == 0 {
                return acc.finish() / (spec.q as f64).powi(n as i32);
            }
            axis -= 1;
            r[axis] += 1;
            if r[axis] < spec.q {
                break;
            }
            r[axis] = 0;
        }
    }
}

/// Weight rules for incomplete sums: |φ| ≤ 1 with |∇φ(x)| ≤ (1+|x|)^{−1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightRule {
    One,
    /// φ(x) = 1/(1 + |x|₂).
    InverseRadial,
}

impl WeightRule {
    pub fn value(&self, x: &[i64]) -> f64 {
        match self {
            WeightRule::One => 1.0,
            WeightRule::InverseRadial => {
                let r2: f64 = x.iter().map(|&v| (v * v) as f64).sum();
                1.0 / (1.0 + r2.sqrt())
            }
        }
    }
}

/// A closed half-space {x : normal·x ≤ offset} with integer data, so
/// membership is exact integer arithmetic (rational coefficients clear
/// denominators into this form).
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub normal: Vec<i64>,
    pub offset: i64,
}

/// A convex region: a Euclidean ball bound intersected with half-spaces.
/// The ball comparison |x|² ≤ radius² is the one floating-point comparison
/// (squared integer norm against a squared f64 radius); half-spaces are
/// exact.
#[derive(Debug, Clone)]
pub struct ConvexRegion {
    pub ball_radius: f64,
    pub halfspaces: Vec<HalfSpace>,
}

impl ConvexRegion {
    pub fn ball(radius: f64) -> Self {
        ConvexRegion {
            ball_radius: radius,
            halfspaces: Vec::new(),
        }
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let norm2: i128 = x.iter().map(|&v| (v as i128) * (v as i128)).sum();
        if (norm2 as f64) > self.ball_radius * self.ball_radius {
            return false;
        }
        for hs in &self.halfspaces {
            let dot: i128 = hs
                .normal
                .iter()
                .zip(x)
                .map(|(&a, &b)| a as i128 * b as i128)
                .sum();
            if dot > hs.offset as i128 {
                return false;
            }
        }
        true
    }
}

/// Specification of an incomplete Weyl sum
/// S_R = Σ_{x ∈ ℤⁿ ∩ ω} e(P(ξ; x))·φ(x), P(ξ; x) = Σ_{1≤|α|≤D} ξ_α x^α.
#[derive(Debug, Clone)]
pub struct WeylSumSpec {
    pub dim: usize,
    pub degree: u32,
    /// (multi-index α, coefficient ξ_α) pairs.
    pub coeffs: Vec<(Vec<u32>, f64)>,
    pub radius: f64,
    pub weight: WeightRule,
    pub region: ConvexRegion,
}

impl WeylSumSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter {
                what: "dimension",
                details: "must be ≥ 1".into(),
            });
        }
        if !(self.radius >= 2.0) {
            return Err(Error::InvalidParameter {
                what: "radius",
                details: format!("R must be ≥ 2, got {}", self.radius),
            });
        }
        for (alpha, _) in &self.coeffs {
            if alpha.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: alpha.len(),
                });
            }
            let total: u32 = alpha.iter().sum();
            if total < 1 || total > self.degree {
                return Err(Error::InvalidParameter {
                    what: "multi-index",
                    details: format!("need 1 ≤ |α| ≤ {}, got |α| = {total}", self.degree),
                });
            }
        }
        if !self.region.ball_radius.is_finite() || self.region.ball_radius < 0.0 {
            return Err(Error::InvalidParameter {
                what: "region",
                details: "ball radius must be finite and nonnegative".into(),
            });
        }
        let side = 2 * (self.region.ball_radius.ceil() as u128) + 1;
        let total = side.checked_pow(self.dim as u32).unwrap_or(u128::MAX);
        if total > MAX_SUM_POINTS {
            return Err(Error::GuardExceeded {
                guard: "incomplete sum enumeration",
                limit: MAX_SUM_POINTS,
                requested: total,
            });
        }
        Ok(())
    }
}

fn monomial(x: &[i64], alpha: &[u32]) -> Result<i128> {
    let mut prod: i128 = 1;
    for (&xi, &ai) in x.iter().zip(alpha) {
        for _ in 0..ai {
            prod = prod.checked_mul(xi as i128).ok_or(Error::Overflow {
                what: "monomial value",
            })?;
        }
    }
    Ok(prod)
}

/// Direct evaluation of an incomplete Weyl sum with per-term phase
/// reduction mod 1 (exact in each coefficient-monomial product).
pub fn weyl_sum(spec: &WeylSumSpec) -> Result<Complex64> {
    spec.validate()?;
    let r_box = spec.region.ball_radius.ceil() as i64;
    let mut acc = ChunkedSum::new();
    let mut x = vec![-r_box; spec.dim];
    loop {
        if spec.region.contains(&x) {
            let mut theta = 0.0f64;
            for (alpha, xi) in &spec.coeffs {
                theta += frac_mul_int(*xi, monomial(&x, alpha)?);
            }
            let w = spec.weight.value(&x);
            acc.push(w * unit_phase(theta));
        }
        let mut axis = spec.dim;
        loop {
            if axis == 0 {
                return Ok(acc.finish());
            }
            axis -= 1;
            x[axis] += 1;
            if x[axis] <= r_box {
                break;
            }
            x[axis] = -r_box;
        }
    }
}

/// Number of lattice points in the region (for the triangle bound
/// |S_R| ≤ #(ℤⁿ∩ω)).
pub fn region_point_count(region: &ConvexRegion, dim: usize) -> Result<u64> {
    let r_box = region.ball_radius.ceil() as i64;
    let side = 2 * r_box as u128 + 1;
    let total = side.checked_pow(dim as u32).unwrap_or(u128::MAX);
    if total > MAX_SUM_POINTS {
        return Err(Error::GuardExceeded {
            guard: "incomplete sum enumeration",
            limit: MAX_SUM_POINTS,
            requested: total,
        });
    }
    let mut count = 0u64;
    let mut x = vec![-r_box; dim];
    loop {
        if region.contains(&x) {
            count += 1;
        }
        let mut axis = dim;
        loop {
            if axis == 0 {
                return Ok(count);
            }
            axis -= 1;
            x[axis] += 1;
            if x[axis] <= r_box {
                break;
            }
            x[axis] = -r_box;
        }
    }
}

/// Searches the continued-fraction convergents of ξ for a denominator in
/// the power window [R^ε, R^{order−ε}]; every convergent already satisfies
/// |ξ − a/q| ≤ 1/q².
pub fn power_window_admissible(
    xi: f64,
    order: u32,
    radius: f64,
    eps: f64,
) -> Result<Option<ReducedRational>> {
    if !(eps > 0.0) || order < 1 || !(radius >= 2.0) {
        return Err(Error::InvalidParameter {
            what: "power window",
            details: "need ε > 0, order ≥ 1, R ≥ 2".into(),
        });
    }
    let lo = radius.powf(eps);
    let hi = radius.powf(order as f64 - eps);
    let q_max = hi.min(2e9).floor() as i64;
    if q_max < 1 {
        return Ok(None);
    }
    let list = convergents(xi, q_max.min(1 << 31))?;
    Ok(list
        .into_iter()
        .find(|r| (r.den() as f64) >= lo && (r.den() as f64) <= hi))
}

/// Log-window variant: denominator in [(log R)^δ, R^order·(log R)^{−δ}]
/// (natural logarithm).
pub fn log_window_admissible(
    xi: f64,
    order: u32,
    radius: f64,
    delta: f64,
) -> Result<Option<ReducedRational>> {
    if !(delta > 0.0) || order < 1 || !(radius >= 2.0) {
        return Err(Error::InvalidParameter {
            what: "log window",
            details: "need δ > 0, order ≥ 1, R ≥ 2".into(),
        });
    }
    let lr = radius.ln();
    let lo = lr.powf(delta);
    let hi = radius.powf(order as f64) * lr.powf(-delta);
    let q_max = hi.min(2e9).floor() as i64;
    if q_max < 1 {
        return Ok(None);
    }
    let list = convergents(xi, q_max.min(1 << 31))?;
    Ok(list
        .into_iter()
        .find(|r| (r.den() as f64) >= lo && (r.den() as f64) <= hi))
}

fn probe_table<A, W>(
    xi: f64,
    order: &[u32],
    j_range: (u32, u32),
    weight: WeightRule,
    label: String,
    admissible: A,
    normalize: W,
) -> Result<DecayTable>
where
    A: Fn(f64) -> Result<Option<String>>,
    W: Fn(f64, f64) -> f64,
{
    let dim = order.len();
    if dim == 0 {
        return Err(Error::InvalidParameter {
            what: "multi-index",
            details: "order must have ≥ 1 component".into(),
        });
    }
    if j_range.0 > j_range.1 {
        return Err(Error::InvalidParameter {
            what: "j range",
            details: format!("empty range {}..={}", j_range.0, j_range.1),
        });
    }
    let degree: u32 = order.iter().sum();
    let mut table = DecayTable::new(label, "R");
    for j in j_range.0..=j_range.1 {
        let radius = (2.0f64).powi(j as i32);
        let spec = WeylSumSpec {
            dim,
            degree,
            coeffs: vec![(order.to_vec(), xi)],
            radius,
            weight,
            region: ConvexRegion::ball(radius),
        };
        let s = weyl_sum(&spec)?;
        let raw = s.norm();
        table.push(radius, raw, normalize(raw, radius), admissible(radius)?);
    }
    Ok(table)
}

/// Measures |S_R|/Rⁿ over R = 2^j with ω = ball(R) (c₀ = 1) and the given
/// weight, then fits a power law on the rows whose leading coefficient
/// admits a rational approximation with R^ε ≤ q ≤ R^{|α|−ε}; inadmissible
/// rows are flagged with the failing window, never dropped.
pub fn decay_probe_power(
    xi: f64,
    order: &[u32],
    j_range: (u32, u32),
    eps: f64,
    weight: WeightRule,
) -> Result<DecayTable> {
    let dim = order.len();
    let total: u32 = order.iter().sum();
    let mut table = probe_table(
        xi,
        order,
        j_range,
        weight,
        format!("power-window decay probe: ξ={xi}, |α|={total}, ε={eps}"),
        |radius| {
            Ok(match power_window_admissible(xi, total, radius, eps)? {
                Some(_) => None,
                None => Some(format!(
                    "no denominator in [R^{eps}, R^{}] at R={radius}",
                    total as f64 - eps
                )),
            })
        },
        |raw, radius| raw / radius.powi(dim as i32),
    )?;
    table.fit_power_law();
    Ok(table)
}

/// Log-window variant: the normalized column is |S_R|/Rⁿ·(log R)^γ and the
/// fit is a log-power law.  The window exponent δ is not pinned down by the
/// underlying estimate, so it is exposed as a caller parameter and echoed
/// in the table label.
pub fn decay_probe_log(
    xi: f64,
    order: &[u32],
    j_range: (u32, u32),
    gamma: f64,
    delta_window: f64,
    weight: WeightRule,
) -> Result<DecayTable> {
    let dim = order.len();
    let total: u32 = order.iter().sum();
    let mut table = probe_table(
        xi,
        order,
        j_range,
        weight,
        format!(
            "log-window decay probe: ξ={xi}, |α|={total}, γ={gamma}, δ_window={delta_window}"
        ),
        |radius| {
            Ok(match log_window_admissible(xi, total, radius, delta_window)? {
                Some(_) => None,
                None => Some(format!(
                    "no denominator in [(log R)^{delta_window}, R^{total}(log R)^-{delta_window}] at R={radius}"
                )),
            })
        },
        |raw, radius| raw / radius.powi(dim as i32) * radius.ln().powf(gamma),
    )?;
    table.fit_log_power_law();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::FitModel;

    fn spec1(a: i64, b: i64, q: i64, d: u32) -> CompleteSumSpec {
        CompleteSumSpec::new(a, vec![b], q, d).unwrap()
    }

    #[test]
    fn trivial_modulus_gives_one() {
        let s = complete_sum(&spec1(0, 1, 1, 1));
        assert_eq!(s, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn shared_factor_with_a_kills_the_sum() {
        // (a,q) = 2 > 1 while (a,b,q) = 1.
        let s = complete_sum(&spec1(2, 1, 4, 1));
        assert!(s.norm() < 1e-15, "{s}");
    }

    #[test]
    fn quarter_gauss_sum_value() {
        // q=4, a=1, b=0: (1 + i + 1 + i)/4 = (1+i)/2, modulus 2^{−1/2}.
        let s = complete_sum(&spec1(1, 0, 4, 1));
        assert!((s - Complex64::new(0.5, 0.5)).norm() < 1e-15);
        assert!((s.norm() - (0.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn vanishing_when_a_shares_a_factor() {
        // Sampled version of the exhaustive acceptance sweep.
        for d in [1u32, 2] {
            for q in 2i64..=24 {
                for a in 0..q {
                    if a.gcd(&q) == 1 {
                        continue;
                    }
                    for b in 0..q {
                        let mut g = a.gcd(&q);
                        g = g.gcd(&b);
                        if g != 1 {
                            continue;
                        }
                        let s = complete_sum(&spec1(a, b, q, d));
                        assert!(s.norm() < 1e-12, "a={a}, b={b}, q={q}, d={d}: {}", s.norm());
                    }
                }
            }
        }
    }

    #[test]
    fn normalization_bound_and_rejection() {
        assert!(CompleteSumSpec::new(2, vec![2], 4, 1).is_err());
        for (a, b, q, d) in [(1i64, 3i64, 7i64, 1u32), (5, 2, 9, 2), (3, 1, 16, 1)] {
            let s = complete_sum(&spec1(a, b, q, d));
            assert!(s.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn periodicity_in_a_and_b_is_exact() {
        for (a, b, q) in [(1i64, 2i64, 5i64), (3, 0, 8), (2, 3, 9)] {
            let s0 = complete_sum(&spec1(a, b, q, 1));
            let s1 = complete_sum(&spec1(a + q, b, q, 1));
            let s2 = complete_sum(&spec1(a, b + q, q, 1));
            assert_eq!(s0, s1);
            assert_eq!(s0, s2);
        }
    }

    #[test]
    fn gauss_modulus_for_doubly_even_q() {
        // Classical law: |S(a/q, 0)| = √(2/q) for q ≡ 0 (mod 4), (a,q)=1,
        // consistent with the direct q=4 value (1+i)/2 above.
        for q in (4i64..=64).step_by(4) {
            for a in 1..q {
                if a.gcd(&q) != 1 {
                    continue;
                }
                let s = complete_sum(&spec1(a, 0, q, 1));
                assert!(
                    (s.norm() - (2.0 / q as f64).sqrt()).abs() < 1e-10,
                    "a={a}, q={q}: got {}",
                    s.norm()
                );
            }
        }
    }

    #[test]
    fn two_dimensional_complete_sum_runs() {
        let spec = CompleteSumSpec::new(1, vec![0, 1], 3, 1).unwrap();
        let s = complete_sum(&spec);
        assert!(s.norm() <= 1.0 + 1e-12);
        // Oracle: direct double loop.
        let mut direct = Complex64::new(0.0, 0.0);
        for r1 in 0..3i64 {
            for r2 in 0..3i64 {
                let t = ((r1 * r1 + r2 * r2) + r2).rem_euclid(3);
                direct += unit_phase(t as f64 / 3.0);
            }
        }
        direct /= 9.0;
        assert!((s - direct).norm() < 1e-14);
    }

    #[test]
    fn zero_phase_counts_points() {
        let spec = WeylSumSpec {
            dim: 1,
            degree: 2,
            coeffs: vec![(vec![2], 0.0)],
            radius: 10.0,
            weight: WeightRule::One,
            region: ConvexRegion::ball(10.0),
        };
        let s = weyl_sum(&spec).unwrap();
        assert_eq!(s.re, 21.0); // 2⌊R⌋+1
        assert_eq!(s.im, 0.0);
    }

    #[test]
    fn inverse_radial_weight_matches_direct_sum() {
        let spec = WeylSumSpec {
            dim: 1,
            degree: 1,
            coeffs: vec![(vec![1], 0.0)],
            radius: 8.0,
            weight: WeightRule::InverseRadial,
            region: ConvexRegion::ball(8.0),
        };
        let s = weyl_sum(&spec).unwrap();
        let direct: f64 = (-8i64..=8).map(|x| 1.0 / (1.0 + (x.abs() as f64))).sum();
        assert!((s.re - direct).abs() < 1e-12);
    }

    #[test]
    fn alternating_pattern_from_half_integer_coefficient() {
        // ξ₂ = 1/2 on ω = [0, R]: e(x²/2) = (−1)^x, so S_R ∈ {0, 1}.
        for r in [8.0f64, 9.0, 16.0, 33.0] {
            let spec = WeylSumSpec {
                dim: 1,
                degree: 2,
                coeffs: vec![(vec![2], 0.5)],
                radius: r,
                weight: WeightRule::One,
                region: ConvexRegion {
                    ball_radius: r,
                    halfspaces: vec![HalfSpace {
                        normal: vec![-1],
                        offset: 0,
                    }],
                },
            };
            let s = weyl_sum(&spec).unwrap();
            let oracle: f64 = (0..=(r as i64)).map(|x| if x % 2 == 0 { 1.0 } else { -1.0 }).sum();
            assert!((s.re - oracle).abs() < 1e-12, "R={r}");
            assert!(s.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn triangle_bound_against_point_count() {
        let region = ConvexRegion::ball(12.0);
        let count = region_point_count(&region, 1).unwrap();
        assert_eq!(count, 25);
        let spec = WeylSumSpec {
            dim: 1,
            degree: 2,
            coeffs: vec![(vec![2], 0.377)],
            radius: 12.0,
            weight: WeightRule::One,
            region,
        };
        assert!(weyl_sum(&spec).unwrap().norm() <= count as f64);
    }

    #[test]
    fn weight_rules_respect_declared_bounds() {
        for x in [-100i64, -3, 0, 7, 50] {
            for w in [WeightRule::One, WeightRule::InverseRadial] {
                let v = w.value(&[x]);
                assert!((0.0..=1.0).contains(&v));
            }
            // Discrete gradient of the inverse-radial weight: the mean-value
            // bound |∇φ| ≤ (1+|x|)^{−1} transfers to unit steps.
            let w = WeightRule::InverseRadial;
            let step = (w.value(&[x + 1]) - w.value(&[x])).abs();
            let denom = 1.0 + (x.min(x + 1)).abs().min(x.abs()) as f64;
            assert!(step <= 1.0 / denom + 1e-12);
        }
    }

    #[test]
    fn golden_ratio_probe_decays() {
        // With the inverse-radial weight the tail contributions are summable,
        // so the normalized column decreases strictly row by row; the
        // unweighted column decreases only in aggregate (≈ R^{−1/2}).
        let golden = (5.0f64.sqrt() - 1.0) / 2.0;
        let table =
            decay_probe_power(golden, &[2], (5, 12), 0.5, WeightRule::InverseRadial).unwrap();
        for w in table.rows.windows(2) {
            assert!(
                w[1].normalized < w[0].normalized,
                "not decreasing at R={}",
                w[1].param
            );
        }
        for row in &table.rows {
            assert!(row.flag.is_none(), "golden-ratio row unexpectedly flagged");
        }
        let fit = table.fit.as_ref().expect("fit should exist");
        assert_eq!(fit.model, FitModel::PowerLaw);
        assert!(fit.exponent > 0.0, "decay exponent {}", fit.exponent);

        // Unweighted endpoint contrast: square-root cancellation predicts a
        // factor ≈ √(2¹²/2⁵) ≈ 11 between the first and last rows.
        let plain = decay_probe_power(golden, &[2], (5, 12), 0.5, WeightRule::One).unwrap();
        let first = plain.rows.first().unwrap().normalized;
        let last = plain.rows.last().unwrap().normalized;
        assert!(first / last >= 4.0, "endpoint ratio {}", first / last);
    }

    #[test]
    fn small_denominator_rows_are_flagged() {
        // ξ = 1/3: once R^ε > 3 no convergent fits the window.
        let table =
            decay_probe_power(1.0 / 3.0, &[2], (5, 10), 0.5, WeightRule::One).unwrap();
        assert!(
            table.rows.iter().all(|r| r.flag.is_some()),
            "q=3 should fail the window everywhere"
        );
    }

    #[test]
    fn log_probe_reports_window_and_fit() {
        let golden = (5.0f64.sqrt() - 1.0) / 2.0;
        let table =
            decay_probe_log(golden, &[2], (5, 9), 1.0, 1.0, WeightRule::InverseRadial).unwrap();
        assert!(table.rows.iter().all(|r| r.flag.is_none()));
        assert!(table.label.contains("δ_window=1"));
        let fit = table.fit.as_ref().expect("fit should exist");
        assert_eq!(fit.model, FitModel::LogPowerLaw);
        assert!(fit.exponent > 0.0);
        // Rational ξ with q=2: flagged for all large R.
        let table2 = decay_probe_log(0.5, &[2], (6, 10), 1.0, 1.0, WeightRule::One).unwrap();
        assert!(table2.rows.iter().all(|r| r.flag.is_some()));
    }
}
