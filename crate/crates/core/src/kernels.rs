//! Calderón–Zygmund kernels and their dyadic decomposition K = Σ_j K_j,
//! the smooth radial cutoffs (narrow profile: plateau |ξ| ≤ 1/4, support
//! |ξ| ≤ 1/2; wide profile: plateau |ξ| ≤ 1/2, support |ξ| ≤ 1) and their
//! arc-scale rescalings, and the band-limited mollifier used by kernel
//! comparison arguments.
//!
//! The dyadic piece is computed as the difference of products
//! K(x)·χ̃(|x|/2^{j+1}) − K(x)·χ̃(|x|/2^j), so the telescoping sum
//! Σ_{j≤J} K_j(x) collapses to K(x) up to one rounding per transition
//! piece (≤ a few ulp) on the region where the outer cutoff sits on its
//! plateau; away from transition radii the collapse is bitwise exact.

use crate::error::{Error, Result};
use crate::phase::pairwise_sum_f64;

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1, strictly increasing in between,
/// built from the standard exp(−1/t) gluing.
pub fn smooth_step(t: f64) -> f64 {
    fn g(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = g(t);
        a / (a + g(1.0 - t))
    }
}

/// The two radial cutoff profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffProfile {
    /// Plateau |ξ| ≤ 1/4, support |ξ| ≤ 1/2.
    Narrow,
    /// Plateau |ξ| ≤ 1/2, support |ξ| ≤ 1.
    Wide,
}

/// Profile value at radius r ≥ 0.  The narrow profile is the wide one
/// rescaled by 2, which makes narrow·wide = narrow exact on supports.
pub fn cutoff_radial(profile: CutoffProfile, r: f64) -> f64 {
    match profile {
        CutoffProfile::Wide => {
            if r <= 0.5 {
                1.0
            } else if r >= 1.0 {
                0.0
            } else {
                smooth_step(2.0 * (1.0 - r))
            }
        }
        CutoffProfile::Narrow => cutoff_radial(CutoffProfile::Wide, 2.0 * r),
    }
}

fn euclid_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Profile value at a point of ℝⁿ (radial in the Euclidean norm).
pub fn cutoff_at(profile: CutoffProfile, x: &[f64]) -> f64 {
    cutoff_radial(profile, euclid_norm(x))
}

/// The arc-scale exponent 4s·2^{s/(2M)}; the guard refuses parameters whose
/// raw scale s·2^{s/(2M)} leaves the f64 exponent range.
pub fn cutoff_scale_exponent(s: u32, m_exp: f64) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidParameter {
            what: "class index",
            details: "s must be ≥ 1".into(),
        });
    }
    if !(m_exp > 0.0) {
        return Err(Error::InvalidParameter {
            what: "M",
            details: format!("must be positive, got {m_exp}"),
        });
    }
    let raw = s as f64 * (2.0f64).powf(s as f64 / (2.0 * m_exp));
    if raw > 1024.0 {
        return Err(Error::GuardExceeded {
            guard: "cutoff scale exponent",
            limit: 1024,
            requested: raw.ceil() as u128,
        });
    }
    Ok(4.0 * raw)
}

/// Evaluates a scaled profile at 2^e·ξ in log space, so that no
/// intermediate scale factor is ever materialized as a float.
fn cutoff_scaled(profile: CutoffProfile, e: f64, xi: &[f64]) -> f64 {
    let r = euclid_norm(xi);
    if r == 0.0 {
        return 1.0;
    }
    let (plateau_log2, support_log2) = match profile {
        CutoffProfile::Narrow => (-2.0, -1.0),
        CutoffProfile::Wide => (-1.0, 0.0),
    };
    let a = e + r.log2();
    if a <= plateau_log2 {
        1.0
    } else if a >= support_log2 {
        0.0
    } else {
        cutoff_radial(profile, (2.0f64).powf(a))
    }
}

/// χ_{s,M}(ξ): the narrow profile at scale 2^{4s·2^{s/(2M)}}·ξ
/// (plateau radius 2^{−e}/4, support radius 2^{−e}/2 for e the scale
/// exponent).
pub fn cutoff_chi_sm(s: u32, m_exp: f64, xi: &[f64]) -> Result<f64> {
    let e = cutoff_scale_exponent(s, m_exp)?;
    Ok(cutoff_scaled(CutoffProfile::Narrow, e, xi))
}

/// χ̃_s(ξ): the wide profile at the same scale as [`cutoff_chi_sm`], so the
/// product identity χ·χ̃ = χ holds at every arc scale.
pub fn cutoff_chi_tilde_sm(s: u32, m_exp: f64, xi: &[f64]) -> Result<f64> {
    let e = cutoff_scale_exponent(s, m_exp)?;
    Ok(cutoff_scaled(CutoffProfile::Wide, e, xi))
}

/// Support radius of χ_{s,M} (half the plateau-to-zero scale).
pub fn chi_sm_support_radius(s: u32, m_exp: f64) -> Result<f64> {
    let e = cutoff_scale_exponent(s, m_exp)?;
    Ok((2.0f64).powf(-e - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum KernelForm {
    /// K(y) = 1/y in dimension 1.
    OddPower,
    /// K(x) = x_axis/|x|^{n+1} (axis is 1-based).
    Riesz { axis: usize },
    /// Riesz kernel times (1 − wide cutoff), vanishing for |x| ≤ 1/2.
    TruncatedRiesz { axis: usize },
}

/// A Calderón–Zygmund kernel given by an evaluation rule on ℝⁿ∖{0}, with
/// its size constant A (|K(x)| ≤ A·|x|^{−n}).
#[derive(Debug, Clone, Copy)]
pub struct CzKernel {
    n: usize,
    form: KernelForm,
    size_constant: f64,
}

impl CzKernel {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn size_constant(&self) -> f64 {
        self.size_constant
    }

    /// All built-in kernels change sign under x → −x.
    pub fn is_odd(&self) -> bool {
        true
    }

    /// Continuum evaluation rule; x must be nonzero.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = euclid_norm(x);
        match self.form {
            KernelForm::OddPower => 1.0 / x[0],
            KernelForm::Riesz { axis } => x[axis - 1] / r.powi(self.n as i32 + 1),
            KernelForm::TruncatedRiesz { axis } => {
                (1.0 - cutoff_radial(CutoffProfile::Wide, r)) * x[axis - 1]
                    / r.powi(self.n as i32 + 1)
            }
        }
    }

    pub fn eval_lattice(&self, x: &[i64]) -> f64 {
        let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        self.eval(&xf)
    }

    /// Radial factor ρ(r) in the factorization K(rω) = ρ(r)·Ω(ω).
    pub fn radial_profile(&self, r: f64) -> f64 {
        match self.form {
            KernelForm::OddPower | KernelForm::Riesz { .. } => r.powi(-(self.n as i32)),
            KernelForm::TruncatedRiesz { .. } => {
                (1.0 - cutoff_radial(CutoffProfile::Wide, r)) * r.powi(-(self.n as i32))
            }
        }
    }

    /// Angular factor Ω(ω) on the unit sphere.
    pub fn angular(&self, omega: &[f64]) -> f64 {
        match self.form {
            KernelForm::OddPower => omega[0],
            KernelForm::Riesz { axis } | KernelForm::TruncatedRiesz { axis } => omega[axis - 1],
        }
    }
}

/// Looks up a kernel by name: `odd_power` (n=1), `riesz_<axis>` (1-based
/// axis ≤ n), or `truncated_custom` (first-axis Riesz vanishing inside
/// radius 1/2).
pub fn builtin_kernel(name: &str, n: usize) -> Result<CzKernel> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            what: "dimension",
            details: "must be ≥ 1".into(),
        });
    }
    let form = if name == "odd_power" {
        if n != 1 {
            return Err(Error::InvalidParameter {
                what: "kernel",
                details: "odd_power is one-dimensional".into(),
            });
        }
        KernelForm::OddPower
    } else if let Some(axis_str) = name.strip_prefix("riesz_") {
        let axis: usize = axis_str.parse().map_err(|_| Error::InvalidParameter {
            what: "kernel",
            details: format!("bad axis in kernel name {name:?}"),
        })?;
        if axis < 1 || axis > n {
            return Err(Error::InvalidParameter {
                what: "kernel",
                details: format!("axis {axis} out of range for dimension {n}"),
            });
        }
        KernelForm::Riesz { axis }
    } else if name == "truncated_custom" {
        KernelForm::TruncatedRiesz { axis: 1 }
    } else {
        return Err(Error::InvalidParameter {
            what: "kernel",
            details: format!("unknown kernel name {name:?}"),
        });
    };
    Ok(CzKernel {
        n,
        form,
        size_constant: 1.0,
    })
}

/// The dyadic partition function ψ_j at radius r: the j = 1 piece absorbs
/// everything inside radius 4, ψ_j = χ̃(r/2^{j+1}) − χ̃(r/2^j) for j ≥ 2.
pub fn dyadic_partition(j: u32, r: f64) -> f64 {
    let outer = cutoff_radial(CutoffProfile::Wide, r / (2.0f64).powi(j as i32 + 1));
    if j == 1 {
        outer
    } else {
        outer - cutoff_radial(CutoffProfile::Wide, r / (2.0f64).powi(j as i32))
    }
}

fn dyadic_piece_from_radius(kernel: &CzKernel, j: u32, r: f64, x: &[f64]) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidParameter {
            what: "dyadic index",
            details: "j must be ≥ 1".into(),
        });
    }
    let outer = cutoff_radial(CutoffProfile::Wide, r / (2.0f64).powi(j as i32 + 1));
    if j == 1 {
        if r == 0.0 {
            return Err(Error::PreconditionViolated(
                "the j=1 dyadic piece is not defined at the origin (kernel pole)".into(),
            ));
        }
        return Ok(kernel.eval(x) * outer);
    }
    let inner = cutoff_radial(CutoffProfile::Wide, r / (2.0f64).powi(j as i32));
    if outer == inner {
        // Plateau or outside-support region (includes x = 0): the piece
        // vanishes identically without evaluating the kernel pole.
        return Ok(0.0);
    }
    // Difference of products: telescoping sums over j collapse exactly.
    let k = kernel.eval(x);
    Ok(k * outer - k * inner)
}

/// K_j at a lattice point: K(x)·ψ_j(x), zero off the dyadic annulus.
pub fn dyadic_piece(kernel: &CzKernel, j: u32, x: &[i64]) -> Result<f64> {
    if x.len() != kernel.n {
        return Err(Error::DimensionMismatch {
            expected: kernel.n,
            actual: x.len(),
        });
    }
    let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
    dyadic_piece_from_radius(kernel, j, euclid_norm(&xf), &xf)
}

/// K_j at a continuum point (used by quadrature and finite differences).
pub fn dyadic_piece_continuum(kernel: &CzKernel, j: u32, x: &[f64]) -> Result<f64> {
    if x.len() != kernel.n {
        return Err(Error::DimensionMismatch {
            expected: kernel.n,
            actual: x.len(),
        });
    }
    dyadic_piece_from_radius(kernel, j, euclid_norm(x), x)
}

/// Guard on lattice enumerations of dyadic supports.
const MAX_SUPPORT_POINTS: u128 = 1 << 26;

/// Visits every nonzero lattice point with |x|₂ ≤ 2^{j+1} (the K_j support
/// ball), in row-major order of the bounding box.
pub fn for_each_support_point<F: FnMut(&[i64])>(j: u32, n: usize, mut visit: F) -> Result<()> {
    if j == 0 || n == 0 {
        return Err(Error::InvalidParameter {
            what: "support enumeration",
            details: "need j ≥ 1 and n ≥ 1".into(),
        });
    }
    let radius: i64 = 1i64 << (j + 1);
    let side = 2 * radius as u128 + 1;
    let total = side.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > MAX_SUPPORT_POINTS {
        return Err(Error::GuardExceeded {
            guard: "support enumeration",
            limit: MAX_SUPPORT_POINTS,
            requested: total,
        });
    }
    let r2 = (radius as i128) * (radius as i128);
    let mut x = vec![-radius; n];
    loop {
        let norm2: i128 = x.iter().map(|&v| (v as i128) * (v as i128)).sum();
        if norm2 != 0 && norm2 <= r2 {
            visit(&x);
        }
        // Row-major odometer.
        let mut axis = n;
        loop {
            if axis == 0 {
                return Ok(());
            }
            axis -= 1;
            x[axis] += 1;
            if x[axis] <= radius {
                break;
            }
            x[axis] = -radius;
        }
    }
}

/// Σ_x |K_j(x)| over the lattice support (pairwise-summed).
pub fn dyadic_l1_norm(kernel: &CzKernel, j: u32) -> Result<f64> {
    let mut vals = Vec::new();
    for_each_support_point(j, kernel.n, |x| {
        vals.push(dyadic_piece(kernel, j, x).unwrap_or(0.0).abs());
    })?;
    Ok(pairwise_sum_f64(&vals))
}

/// Σ_{0<|y|₂≤2^J} |K(y)| for the truncated kernel.
pub fn truncated_l1_norm(kernel: &CzKernel, j_trunc: u32) -> Result<f64> {
    if j_trunc == 0 {
        return Err(Error::InvalidParameter {
            what: "truncation level",
            details: "J must be ≥ 1".into(),
        });
    }
    let mut vals = Vec::new();
    // Reuse the ball enumerator one level down: |y| ≤ 2^J = 2^{(J−1)+1}.
    for_each_support_point(j_trunc - 1, kernel.n, |x| {
        vals.push(kernel.eval_lattice(x).abs());
    })?;
    Ok(pairwise_sum_f64(&vals))
}

/// Σ |K(y)| over the annulus from_radius < |y|₂ ≤ to_radius: the ℓ¹ tail
/// that bounds what a truncation at from_radius discards against inputs
/// supported within reach of to_radius.
pub fn tail_l1_norm(kernel: &CzKernel, from_radius: f64, to_radius: f64) -> Result<f64> {
    if !(from_radius >= 0.0) || !(to_radius >= from_radius) {
        return Err(Error::InvalidParameter {
            what: "tail radii",
            details: "need 0 ≤ from ≤ to".into(),
        });
    }
    let r = to_radius.ceil() as i64;
    let side = (2 * r as u128 + 1).checked_pow(kernel.n as u32).unwrap_or(u128::MAX);
    if side > MAX_SUPPORT_POINTS {
        return Err(Error::GuardExceeded {
            guard: "support enumeration",
            limit: MAX_SUPPORT_POINTS,
            requested: side,
        });
    }
    let mut vals = Vec::new();
    let mut x = vec![-r; kernel.n];
    loop {
        let norm = euclid_norm(&x.iter().map(|&v| v as f64).collect::<Vec<_>>());
        if norm > from_radius && norm <= to_radius && norm > 0.0 {
            vals.push(kernel.eval_lattice(&x).abs());
        }
        let mut axis = kernel.n;
        loop {
            if axis == 0 {
                return Ok(pairwise_sum_f64(&vals));
            }
            axis -= 1;
            x[axis] += 1;
            if x[axis] <= r {
                break;
            }
            x[axis] = -r;
        }
    }
}

/// Normalized sinc: sin(πt)/(πt), with the series branch near t = 0.
pub fn sinc(t: f64) -> f64 {
    let u = std::f64::consts::PI * t;
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// The band-limited mollifier φ(x) = Π_i (3/16)·sinc⁴(x_i/8): nonnegative,
/// unit mass, and with spectrum supported per axis in |ξ| ≤ 1/4 (the square
/// of a Fejér-type profile).
pub fn mollifier_value(x: &[f64]) -> f64 {
    x.iter()
        .map(|&xi| {
            let s = sinc(xi / 8.0);
            (3.0 / 16.0) * s.powi(4)
        })
        .product()
}

/// φ_J(x) = 2^{−Jn}·φ(2^{−J}x).
pub fn mollifier_scaled(j_scale: u32, x: &[f64]) -> f64 {
    let scale = (2.0f64).powi(-(j_scale as i32));
    let scaled: Vec<f64> = x.iter().map(|&v| v * scale).collect();
    scale.powi(x.len() as i32) * mollifier_value(&scaled)
}

/// Recorded ceiling for max_x 2^{jn}·|K_j(x)| over built-in kernels
/// (measured ≈ 2.0 for the odd kernel, ≈ 2.9 for Riesz pieces).
pub const DYADIC_SIZE_BOUND: f64 = 4.0;

/// Recorded ceiling for max_x 2^{j(n+1)}·|∇K_j(x)| (finite differences on
/// the continuum rule; measured ≈ 30 across built-ins).
pub const DYADIC_GRADIENT_BOUND: f64 = 64.0;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn smooth_step_endpoints_and_monotonicity() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15); // symmetry point
        let mut prev = 0.0;
        for k in 0..=100 {
            let v = smooth_step(k as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn cutoff_plateaus_and_supports() {
        assert_eq!(cutoff_radial(CutoffProfile::Wide, 0.0), 1.0);
        assert_eq!(cutoff_radial(CutoffProfile::Wide, 0.5), 1.0);
        assert_eq!(cutoff_radial(CutoffProfile::Wide, 1.0), 0.0);
        assert_eq!(cutoff_radial(CutoffProfile::Narrow, 0.25), 1.0);
        assert_eq!(cutoff_radial(CutoffProfile::Narrow, 0.5), 0.0);
        // Product identity: narrow·wide = narrow (wide ≡ 1 on narrow's support).
        for k in 0..200 {
            let r = k as f64 / 100.0;
            let n = cutoff_radial(CutoffProfile::Narrow, r);
            let w = cutoff_radial(CutoffProfile::Wide, r);
            assert_eq!(n * w, n, "r={r}");
        }
    }

    #[test]
    fn scaled_cutoffs_match_direct_evaluation() {
        // At small s the scale fits in a float, so the log-space path can
        // be checked against the direct product.
        for s in 1..=3u32 {
            let e = cutoff_scale_exponent(s, 2.0).unwrap();
            let scale = (2.0f64).powf(e);
            for k in 1..50 {
                let xi = k as f64 * (2.0f64).powf(-e - 3.0);
                let direct = cutoff_radial(CutoffProfile::Narrow, scale * xi);
                let log_space = cutoff_chi_sm(s, 2.0, &[xi]).unwrap();
                assert!((direct - log_space).abs() < 1e-12, "s={s}, k={k}");
            }
        }
        assert_eq!(cutoff_chi_sm(2, 2.0, &[0.0]).unwrap(), 1.0);
        // Support: |ξ| at least half the scale reciprocal → 0.
        let r = chi_sm_support_radius(2, 2.0).unwrap();
        assert_eq!(cutoff_chi_sm(2, 2.0, &[r * 1.001]).unwrap(), 0.0);
        // Product nesting at arc scales, random ξ.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in 1..=3u32 {
            for _ in 0..1000 {
                let xi = [rng.gen::<f64>() * 2.0 - 1.0];
                let c = cutoff_chi_sm(s, 2.0, &xi).unwrap();
                let ct = cutoff_chi_tilde_sm(s, 2.0, &xi).unwrap();
                assert_eq!(c * ct, c);
            }
        }
    }

    #[test]
    fn cutoff_scale_guard_trips() {
        // s·2^{s/(2M)} beyond the f64 exponent range is refused.
        assert!(cutoff_scale_exponent(16, 1.0).is_err());
        assert!(cutoff_scale_exponent(12, 1.0).is_ok()); // 12·2^6 = 768
    }

    #[test]
    fn builtin_kernel_values() {
        let k = builtin_kernel("odd_power", 1).unwrap();
        assert_eq!(k.eval(&[2.0]), 0.5);
        let k2 = builtin_kernel("riesz_1", 2).unwrap();
        assert_eq!(k2.eval(&[1.0, 0.0]), 1.0);
        let kt = builtin_kernel("truncated_custom", 2).unwrap();
        assert_eq!(kt.eval(&[0.3, 0.0]), 0.0); // inside the removed core
        assert!((kt.eval(&[3.0, 0.0]) - 1.0 / 9.0).abs() < 1e-15);
        assert!(builtin_kernel("odd_power", 2).is_err());
        assert!(builtin_kernel("riesz_3", 2).is_err());
        assert!(builtin_kernel("nonsense", 1).is_err());
    }

    #[test]
    fn builtin_kernels_are_odd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k1 = builtin_kernel("odd_power", 1).unwrap();
        for _ in 0..1000 {
            let y = rng.gen_range(1..=100_000) as f64;
            assert_eq!(k1.eval(&[-y]), -k1.eval(&[y]));
        }
        let k2 = builtin_kernel("riesz_2", 2).unwrap();
        for _ in 0..1000 {
            let x = [rng.gen::<f64>() * 8.0 - 4.0, rng.gen::<f64>() * 8.0 - 4.0];
            if x[0] == 0.0 && x[1] == 0.0 {
                continue;
            }
            let neg = [-x[0], -x[1]];
            assert_eq!(k2.eval(&neg), -k2.eval(&x));
        }
    }

    #[test]
    fn size_bound_holds_on_lattice() {
        // |K(x)| ≤ A·|x|^{−n} with A = 1 for all built-ins, sampled.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for (name, n) in [("odd_power", 1), ("riesz_1", 2), ("truncated_custom", 2)] {
            let k = builtin_kernel(name, n).unwrap();
            for _ in 0..2000 {
                let x: Vec<i64> = (0..n).map(|_| rng.gen_range(-64..=64)).collect();
                if x.iter().all(|&v| v == 0) {
                    continue;
                }
                let r: f64 = x.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
                assert!(
                    k.eval_lattice(&x).abs() <= k.size_constant() * r.powi(-(n as i32)) + 1e-15,
                    "{name} at {x:?}"
                );
            }
        }
    }

    #[test]
    fn dyadic_piece_supports() {
        let k = builtin_kernel("odd_power", 1).unwrap();
        // Outside radius 2^{j+1} → exactly 0.
        assert_eq!(dyadic_piece(&k, 3, &[17]).unwrap(), 0.0);
        // Inside radius 2^{j−1} for j ≥ 2 → exactly 0.
        assert_eq!(dyadic_piece(&k, 4, &[7]).unwrap(), 0.0);
        // Origin: defined (0) for j ≥ 2, refused for j = 1.
        assert_eq!(dyadic_piece(&k, 2, &[0]).unwrap(), 0.0);
        assert!(dyadic_piece(&k, 1, &[0]).is_err());
        // j=1 absorbs the inner region: at |x|=1 it equals the full kernel.
        assert_eq!(dyadic_piece(&k, 1, &[1]).unwrap(), 1.0);
    }

    #[test]
    fn telescoping_collapses_at_lattice_points() {
        // Σ_{j≤J} K_j(x) = K(x) on 2 ≤ |x| ≤ 2^{J−1}: analytically exact;
        // in floating point one rounding per transition piece survives,
        // so the comparison is pinned at 4 ulp relative.
        let k = builtin_kernel("odd_power", 1).unwrap();
        let j_top = 10u32;
        for x in 2i64..=512 {
            let total: f64 = (1..=j_top)
                .map(|j| dyadic_piece(&k, j, &[x]).unwrap())
                .sum();
            let exact = k.eval_lattice(&[x]);
            assert!(
                (total - exact).abs() <= 4.0 * f64::EPSILON * exact.abs(),
                "x={x}: {total} vs {exact}"
            );
        }
        // Dyadic radii sit on cutoff plateaus: collapse is bitwise there.
        for &x in &[4i64, 8, 16, 64, 256] {
            let total: f64 = (1..=j_top)
                .map(|j| dyadic_piece(&k, j, &[x]).unwrap())
                .sum();
            assert_eq!(total, k.eval_lattice(&[x]), "x={x}");
        }
        let k2 = builtin_kernel("riesz_1", 2).unwrap();
        let j_top = 6u32;
        for &x in &[[2i64, 0], [3, 4], [10, -7], [16, 16], [0, 9]] {
            let total: f64 = (1..=j_top)
                .map(|j| dyadic_piece(&k2, j, &x).unwrap())
                .sum();
            let exact = k2.eval_lattice(&x);
            assert!(
                (total - exact).abs() <= 4.0 * f64::EPSILON * exact.abs(),
                "x={x:?}"
            );
        }
    }

    #[test]
    fn dyadic_size_and_gradient_bounds() {
        // n=1: exhaustive over the lattice support for j ≤ 14.
        let k = builtin_kernel("odd_power", 1).unwrap();
        let mut max_size: f64 = 0.0;
        for j in 1..=14u32 {
            let scale = (2.0f64).powi(j as i32);
            for_each_support_point(j, 1, |x| {
                let v = dyadic_piece(&k, j, x).unwrap().abs();
                max_size = max_size.max(scale * v);
            })
            .unwrap();
        }
        assert!(max_size <= DYADIC_SIZE_BOUND, "measured {max_size}");

        // n=2 Riesz: exhaustive for j ≤ 6, random annulus samples above.
        let k2 = builtin_kernel("riesz_1", 2).unwrap();
        let mut max_size2: f64 = 0.0;
        for j in 1..=6u32 {
            let scale = (4.0f64).powi(j as i32);
            for_each_support_point(j, 2, |x| {
                let v = dyadic_piece(&k2, j, x).unwrap().abs();
                max_size2 = max_size2.max(scale * v);
            })
            .unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for j in 7..=14u32 {
            let scale = (4.0f64).powi(j as i32);
            for _ in 0..4000 {
                let r = (2.0f64).powi(j as i32 - 1) * (1.0 + 3.0 * rng.gen::<f64>());
                let th = rng.gen::<f64>() * std::f64::consts::TAU;
                let x = [(r * th.cos()).round() as i64, (r * th.sin()).round() as i64];
                if x == [0, 0] {
                    continue;
                }
                let v = dyadic_piece(&k2, j, &x).unwrap().abs();
                max_size2 = max_size2.max(scale * v);
            }
        }
        assert!(max_size2 <= DYADIC_SIZE_BOUND, "measured {max_size2}");

        // Gradient by central differences on the continuum rule.
        let mut max_grad: f64 = 0.0;
        for j in 1..=14u32 {
            let scale = (2.0f64).powi(2 * j as i32);
            let h = (2.0f64).powi(j as i32) * 1e-6;
            for _ in 0..256 {
                let r = (2.0f64).powi(j as i32) * (0.5 + 3.5 * rng.gen::<f64>());
                let x = [r * if rng.gen::<bool>() { 1.0 } else { -1.0 }];
                let hi = dyadic_piece_continuum(&k, j, &[x[0] + h]).unwrap();
                let lo = dyadic_piece_continuum(&k, j, &[x[0] - h]).unwrap();
                max_grad = max_grad.max(scale * ((hi - lo) / (2.0 * h)).abs());
            }
        }
        assert!(max_grad <= DYADIC_GRADIENT_BOUND, "measured {max_grad}");
    }

    #[test]
    fn mean_zero_pieces() {
        // Odd kernel: summing in (x, −x) pairs gives exactly zero.
        let k = builtin_kernel("odd_power", 1).unwrap();
        for j in 1..=10u32 {
            let radius = 1i64 << (j + 1);
            let mut total = 0.0;
            for x in 1..=radius {
                total += dyadic_piece(&k, j, &[x]).unwrap();
                total += dyadic_piece(&k, j, &[-x]).unwrap();
            }
            assert_eq!(total, 0.0, "j={j}");
        }
        // Riesz pieces: near-zero mean under ordinary enumeration order.
        let k2 = builtin_kernel("riesz_1", 2).unwrap();
        for j in 1..=6u32 {
            let mut vals = Vec::new();
            for_each_support_point(j, 2, |x| {
                vals.push(dyadic_piece(&k2, j, x).unwrap());
            })
            .unwrap();
            assert!(pairwise_sum_f64(&vals).abs() <= 1e-10, "j={j}");
        }
    }

    #[test]
    fn support_enumeration_counts_and_guard() {
        let mut count = 0u64;
        for_each_support_point(2, 1, |_| count += 1).unwrap();
        assert_eq!(count, 16); // x ∈ [−8,8]∖{0}
        let mut count2 = 0u64;
        for_each_support_point(1, 2, |x| {
            assert!(x[0] * x[0] + x[1] * x[1] <= 16);
            count2 += 1;
        })
        .unwrap();
        assert_eq!(count2, 48); // |x|₂ ≤ 4 in ℤ², origin excluded: 49 − 1
        assert!(for_each_support_point(14, 2, |_| {}).is_err());
    }

    #[test]
    fn l1_norms_match_hand_sums() {
        let k = builtin_kernel("odd_power", 1).unwrap();
        // Truncated kernel at J=2: 2·(1 + 1/2 + 1/3 + 1/4).
        let direct = 2.0 * (1.0 + 0.5 + 1.0 / 3.0 + 0.25);
        assert!((truncated_l1_norm(&k, 2).unwrap() - direct).abs() < 1e-14);
        // Dyadic ℓ¹ norms stay uniformly bounded (CZ scaling).
        for j in 1..=12u32 {
            let norm = dyadic_l1_norm(&k, j).unwrap();
            assert!(norm > 0.0 && norm < 8.0, "j={j}: {norm}");
        }
        // Tail between radii 4 and 8: 2·(1/5+…+1/8).
        let tail = tail_l1_norm(&k, 4.0, 8.0).unwrap();
        let hand = 2.0 * (1.0 / 5.0 + 1.0 / 6.0 + 1.0 / 7.0 + 1.0 / 8.0);
        assert!((tail - hand).abs() < 1e-14);
    }

    #[test]
    fn mollifier_mass_positivity_and_bandlimit() {
        // Unit mass by composite Simpson on [−300, 300], h = 1/16.
        let h = 1.0 / 16.0;
        let n_panels = (600.0 / h) as usize;
        let mut acc = 0.0;
        for i in 0..n_panels {
            let a = -300.0 + i as f64 * h;
            let fa = mollifier_value(&[a]);
            let fm = mollifier_value(&[a + h / 2.0]);
            let fb = mollifier_value(&[a + h]);
            acc += h / 6.0 * (fa + 4.0 * fm + fb);
        }
        assert!((acc - 1.0).abs() < 1e-6, "mass {acc}");
        // Scaled version keeps unit mass: substitute u = 2^{−J}x.  The two
        // call paths may round sin() an ulp apart, so ask for ulp-scale
        // agreement rather than bitwise identity.
        let v = mollifier_scaled(2, &[8.0]);
        assert!((v - 0.25 * mollifier_value(&[2.0])).abs() < 1e-15);
        // Nonnegativity.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let x = [rng.gen::<f64>() * 600.0 - 300.0];
            assert!(mollifier_value(&x) >= 0.0);
        }
        // Band limit: DFT of half-integer samples vanishes for |ξ| ≥ 1/2.
        let n = 4096usize;
        let spacing = 0.5;
        let mut re = vec![0.0f64; n];
        for (i, slot) in re.iter_mut().enumerate() {
            let x = (i as f64 - n as f64 / 2.0) * spacing;
            *slot = mollifier_value(&[x]);
        }
        // Direct Goertzel-style checks at a few out-of-band frequencies.
        for &cycles_per_unit in &[0.5f64, 0.6, 0.75, 0.9] {
            let mut sum_re = 0.0;
            let mut sum_im = 0.0;
            for (i, &v) in re.iter().enumerate() {
                let x = (i as f64 - n as f64 / 2.0) * spacing;
                let th = std::f64::consts::TAU * cycles_per_unit * x;
                sum_re += v * th.cos();
                sum_im -= v * th.sin();
            }
            let mag = spacing * (sum_re * sum_re + sum_im * sum_im).sqrt();
            assert!(mag < 1e-8, "ξ={cycles_per_unit}: {mag}");
        }
        // In-band sanity: φ̂(0) = mass ≈ 1.
        let mass: f64 = re.iter().sum::<f64>() * spacing;
        assert!((mass - 1.0).abs() < 1e-6);
    }
}
