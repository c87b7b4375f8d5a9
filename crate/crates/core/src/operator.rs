//! Maximally modulated convolution operators on ℤⁿ and their diagnostics.
//!
//! The centre of the module is a certified evaluation of
//!
//! 𝒞f(x) = sup_λ |Σ_{0<|y|∞≤2^J} f(x−y) e(λ|y|^{2d}) K(y)|,
//!
//! where the phase |y|^{2d} = (y₁²+…+yₙ²)^d is an integer, so the supremum
//! over λ ∈ ℝ collapses exactly to λ ∈ [0,1).  For each output point the
//! inner sum is a trigonometric polynomial g_x(λ) = Σ_m c_m e(λm) with
//! integer frequencies; |g_x| is Lipschitz with constant
//! L = 2π·Σ_m |c_m|·|m−m̄| for any recentring m̄, which turns a coarse FFT
//! sample of g_x plus interval bisection into a proof that the returned
//! value is within an additive ε of the true supremum.
//!
//! Around it:
//! * a certified uniform λ-grid type whose spacing obeys the same
//!   Lipschitz budget (`lambda_grid`),
//! * the single-modulation convolution T_λ (`single_lambda_apply`),
//! * the variable-coefficient parabolic transform
//!   ℋ_v f(x) = Σ_{y≠0} f(x₁−y, x₂−v(x)y²)/y on a 2-torus
//!   (`variable_parabola`) together with its partial-Fourier identity,
//! * the composition kernel 𝒦♯ of a modulated single-scale operator with
//!   its adjoint (`ttstar_kernel`) and exhaustive scans for the pairs where
//!   it is large, each member carrying a Dirichlet rational certificate
//!   (`exceptional_set`),
//! * the dyadic chaining bound of Rademacher–Menshov type
//!   (`rademacher_menshov_rhs`), and
//! * empirical ‖op(f)‖_p/‖f‖_p measurements over seeded random inputs
//!   (`empirical_norm_ratio`, `norm_ratio_table`).

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{best_rational_approx, Modulation};
use crate::decay::DecayTable;
use crate::error::{Error, Result};
use crate::kernels::{dyadic_piece, for_each_support_point, CzKernel};
use crate::lattice::{lp_norm, BoxSupport, Domain, LatticeFunction};
use crate::phase::{frac_f64, frac_mul_int, frac_ratio, pairwise_sum_f64, unit_phase, ChunkedSum};

/// Hard cap on materialized λ-grids; `LambdaGrid::points_vec` refuses beyond it.
pub const MAX_GRID_POINTS: u64 = 1 << 22;
/// Largest coarse FFT used while certifying a per-point supremum.
const MAX_COARSE_FFT: usize = 1 << 21;
/// Per-point budget of exact phase-sum evaluations in the sup refinement.
const SUP_EVAL_BUDGET: u64 = 1 << 20;
/// Intervals narrower than 2^{−MAX_SPLIT_DEPTH} are not bisected further.
const MAX_SPLIT_DEPTH: i32 = 44;
/// Guard on lattice enumerations (truncation boxes, pair ranges, outputs).
const MAX_ENUM_POINTS: u128 = 1 << 26;
/// Largest phase degree accepted by the certified sup (shell labels in i64).
const MAX_PHASE_DEGREE: i128 = 1 << 60;
/// Scale cap for TT* kernel sums (the z-ball has ~2^{(j+1)n} points).
const MAX_TTSTAR_J: u32 = 12;
/// Scale cap for exhaustive pair scans with a constant modulation field.
const MAX_EXCEPTIONAL_J_CONSTANT: u32 = 8;
/// Scale cap for pair scans with a genuinely varying modulation field.
const MAX_EXCEPTIONAL_J_GENERAL: u32 = 6;

// ---------------------------------------------------------------------------
// Truncation geometry
// ---------------------------------------------------------------------------

/// Visits every nonzero point of the truncation box 0 < |y|∞ ≤ 2^{j_trunc}
/// in row-major order.
fn for_each_box_point<F: FnMut(&[i64])>(j_trunc: u32, n: usize, mut visit: F) -> Result<()> {
    if j_trunc == 0 || j_trunc > 30 || n == 0 {
        return Err(Error::InvalidParameter {
            what: "truncation box",
            details: format!("need 1 ≤ J ≤ 30 and n ≥ 1, got J = {j_trunc}, n = {n}"),
        });
    }
    let radius: i64 = 1i64 << j_trunc;
    let side = 2 * radius as u128 + 1;
    let total = side.checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > MAX_ENUM_POINTS {
        return Err(Error::GuardExceeded {
            guard: "truncation box enumeration",
            limit: MAX_ENUM_POINTS,
            requested: total,
        });
    }
    let mut y = vec![-radius; n];
    loop {
        if y.iter().any(|&c| c != 0) {
            visit(&y);
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                return Ok(());
            }
            axis -= 1;
            y[axis] += 1;
            if y[axis] <= radius {
                break;
            }
            y[axis] = -radius;
        }
    }
}

/// Largest phase value max_{0<|y|∞≤2^J} |y|^{2d} = (n·4^J)^d, checked in i128.
pub fn phase_degree_bound(j_trunc: u32, n: usize, d: u32) -> Result<i128> {
    if j_trunc == 0 || j_trunc > 30 || n == 0 || d == 0 {
        return Err(Error::InvalidParameter {
            what: "phase degree",
            details: format!("need 1 ≤ J ≤ 30, n ≥ 1, d ≥ 1, got J = {j_trunc}, n = {n}, d = {d}"),
        });
    }
    let base = (n as i128)
        .checked_mul(1i128 << (2 * j_trunc))
        .ok_or(Error::Overflow {
            what: "phase degree base",
        })?;
    let mut acc: i128 = 1;
    for _ in 0..d {
        acc = acc.checked_mul(base).ok_or(Error::Overflow {
            what: "phase degree bound",
        })?;
    }
    Ok(acc)
}

/// Flat list of truncation-box points with kernel values and phase shells:
/// entry i is the point `offsets[i·n..(i+1)·n]` with kernel value `kvals[i]`
/// and phase |y|^{2d} equal to `shell_ms[shell_of[i]]`; `shell_ms` ascends.
struct TruncationData {
    n: usize,
    offsets: Vec<i64>,
    kvals: Vec<f64>,
    shell_of: Vec<usize>,
    shell_ms: Vec<i64>,
}

fn truncation_data(kernel: &CzKernel, j_trunc: u32, d: u32) -> Result<TruncationData> {
    let n = kernel.dimension();
    let degree = phase_degree_bound(j_trunc, n, d)?;
    if degree > MAX_PHASE_DEGREE {
        return Err(Error::GuardExceeded {
            guard: "phase degree",
            limit: MAX_PHASE_DEGREE as u128,
            requested: degree as u128,
        });
    }
    let mut offsets = Vec::new();
    let mut kvals = Vec::new();
    let mut raw_ms: Vec<i64> = Vec::new();
    for_each_box_point(j_trunc, n, |y| {
        let k = kernel.eval_lattice(y);
        if k == 0.0 {
            return;
        }
        let norm2: i128 = y.iter().map(|&c| (c as i128) * (c as i128)).sum();
        let mut m: i128 = 1;
        for _ in 0..d {
            m *= norm2; // ≤ degree ≤ MAX_PHASE_DEGREE by the guard above
        }
        offsets.extend_from_slice(y);
        kvals.push(k);
        raw_ms.push(m as i64);
    })?;
    let mut shell_ms = raw_ms.clone();
    shell_ms.sort_unstable();
    shell_ms.dedup();
    let shell_of = raw_ms
        .iter()
        .map(|m| shell_ms.binary_search(m).expect("own value"))
        .collect();
    Ok(TruncationData {
        n,
        offsets,
        kvals,
        shell_of,
        shell_ms,
    })
}

// ---------------------------------------------------------------------------
// Certified λ-grid
// ---------------------------------------------------------------------------

/// A uniform grid on [0,1) fine enough that sampling |g(λ)| on it misses the
/// supremum of any admissible modulated sum by at most ε: the spacing h
/// satisfies h ≤ ε/(2π·D·B) where D bounds the integer phase and B the ℓ¹
/// mass of the truncated kernel, and 2π·D·B bounds the Lipschitz constant
/// of every λ ↦ |Σ f(x−y)e(λ|y|^{2d})K(y)| with ‖f‖_∞ ≤ 1.
#[derive(Debug, Clone)]
pub struct LambdaGrid {
    size: u64,
    degree_bound: i128,
    kernel_l1: f64,
    epsilon: f64,
}

impl LambdaGrid {
    /// Number of grid points k/size, k = 0..size.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Grid spacing h = 1/size.
    pub fn spacing(&self) -> f64 {
        1.0 / self.size as f64
    }

    /// The phase bound D = max |y|^{2d} over the truncation box.
    pub fn degree_bound(&self) -> i128 {
        self.degree_bound
    }

    /// The ℓ¹ mass B of the truncated kernel.
    pub fn kernel_l1(&self) -> f64 {
        self.kernel_l1
    }

    /// The sup-error target ε the spacing certifies.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The k-th grid point k/size ∈ [0,1).
    pub fn point(&self, k: u64) -> f64 {
        debug_assert!(k < self.size);
        k as f64 / self.size as f64
    }

    /// Materializes the grid, sorted ascending in [0,1); refuses grids whose
    /// size exceeds the materialization cap and reports the required size.
    pub fn points_vec(&self) -> Result<Vec<f64>> {
        if self.size > MAX_GRID_POINTS {
            return Err(Error::GuardExceeded {
                guard: "lambda grid materialization",
                limit: MAX_GRID_POINTS as u128,
                requested: self.size as u128,
            });
        }
        Ok((0..self.size).map(|k| self.point(k)).collect())
    }
}

/// Builds the certified grid for the kernel truncated to 0 < |y|∞ ≤ 2^{J}.
pub fn lambda_grid(kernel: &CzKernel, j_trunc: u32, d: u32, epsilon: f64) -> Result<LambdaGrid> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter {
            what: "grid tolerance",
            details: format!("ε must be positive and finite, got {epsilon}"),
        });
    }
    let degree_bound = phase_degree_bound(j_trunc, kernel.dimension(), d)?;
    let mut absvals = Vec::new();
    for_each_box_point(j_trunc, kernel.dimension(), |y| {
        absvals.push(kernel.eval_lattice(y).abs());
    })?;
    let kernel_l1 = pairwise_sum_f64(&absvals);
    let raw = (2.0 * PI * degree_bound as f64 * kernel_l1 / epsilon).ceil() + 1.0;
    if !(raw < 9.0e18) {
        return Err(Error::Overflow {
            what: "lambda grid size",
        });
    }
    let size = (raw as u64).max(1);
    Ok(LambdaGrid {
        size,
        degree_bound,
        kernel_l1,
        epsilon,
    })
}

// ---------------------------------------------------------------------------
// Certified supremum of |Σ c_m e(λm)| over λ ∈ [0,1)
// ---------------------------------------------------------------------------

/// Reusable FFT plans and buffers for the per-point sup certification.
struct SupScratch {
    planner: FftPlanner<f64>,
    buf: Vec<Complex64>,
    fft_scratch: Vec<Complex64>,
    nsq: Vec<f64>,
}

impl SupScratch {
    fn new() -> Self {
        SupScratch {
            planner: FftPlanner::new(),
            buf: Vec::new(),
            fft_scratch: Vec::new(),
            nsq: Vec::new(),
        }
    }
}

/// One dyadic λ-interval in the bisection queue, ordered by upper bound.
#[derive(Clone, Copy)]
struct SupInterval {
    ub: f64,
    lo: f64,
    width: f64,
    g_lo: f64,
    g_hi: f64,
}

impl PartialEq for SupInterval {
    fn eq(&self, other: &Self) -> bool {
        self.ub.total_cmp(&other.ub) == Ordering::Equal
    }
}
impl Eq for SupInterval {}
impl PartialOrd for SupInterval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SupInterval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub.total_cmp(&other.ub)
    }
}

/// |Σ_i cs[i]·e(t·ms[i])| with exact per-term phase reduction.
fn shell_modulus(ms: &[i64], cs: &[Complex64], t: f64) -> f64 {
    let mut sum = ChunkedSum::new();
    for (m, c) in ms.iter().zip(cs) {
        sum.push(c * unit_phase(frac_mul_int(t, *m as i128)));
    }
    sum.finish().norm()
}

/// Certified sup_{λ∈[0,1)} |Σ c_m e(λm)| for ascending integer shells m ≥ 0.
///
/// Returns a value v with sup − ε ≤ v ≤ sup + μ, where μ ≤ 1e−11·(1+Σ|c_m|)
/// absorbs the floating-point error of the coarse FFT samples.  Strategy:
/// factor out the |c|-weighted median frequency m̄ (|g| is unchanged and the
/// Lipschitz constant drops to L = 2π·Σ|c_m||m−m̄|), take FFT samples on a
/// power-of-two grid, then bisect only the intervals whose endpoint values
/// plus L·width/2 still challenge the running maximum.  Every discarded
/// interval carries the certificate ub ≤ LB + ε − μ, so the final maximum is
/// within ε of the true supremum.
fn certified_sup_modulus(
    ms: &[i64],
    cs: &[Complex64],
    eps: f64,
    scratch: &mut SupScratch,
) -> Result<f64> {
    debug_assert!(ms.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(ms.first().map_or(true, |&m| m >= 0));
    if ms.is_empty() {
        return Ok(0.0);
    }
    if ms.len() == 1 {
        // |c·e(λm)| = |c| for every λ; num_complex::norm is hypot, so a real
        // coefficient comes back with its absolute value bit-for-bit.
        return Ok(cs[0].norm());
    }
    let absc: Vec<f64> = cs.iter().map(|c| c.norm()).collect();
    let b1 = pairwise_sum_f64(&absc);
    let margin = 1e-11 * (1.0 + b1);
    if !(eps > 4.0 * margin) {
        return Err(Error::InvalidParameter {
            what: "sup tolerance",
            details: format!(
                "ε = {eps} is below the floating-point certification floor {:.3e}",
                4.0 * margin
            ),
        });
    }
    let eps_eff = eps - margin;

    // |c|-weighted median frequency minimizes Σ|c||m−m̄| over integer m̄.
    let mut acc = 0.0;
    let mut median = ms[0];
    for (m, a) in ms.iter().zip(&absc) {
        acc += a;
        if acc + acc >= b1 {
            median = *m;
            break;
        }
    }
    let lipschitz = 2.0
        * PI
        * pairwise_sum_f64(
            &ms.iter()
                .zip(&absc)
                .map(|(m, a)| a * (m - median).unsigned_abs() as f64)
                .collect::<Vec<_>>(),
        );

    let eval = |t: f64| shell_modulus(ms, cs, t);

    // Whole period within Lipschitz reach of a single sample.
    if lipschitz * 0.5 <= eps_eff {
        return Ok(eval(0.0));
    }

    // Coarse FFT pass: out[k] = Σ_m c_m e(km/G) = g(k/G), computed exactly
    // (up to fp) after folding shells into residues m mod G.
    let dmax = *ms.last().expect("nonempty") as i128;
    let base = 4 * (dmax.min(1 << 19) as usize + 1);
    let mut g = base.next_power_of_two().clamp(1024, MAX_COARSE_FFT);
    let (lb0, slack) = loop {
        scratch.buf.clear();
        scratch.buf.resize(g, Complex64::new(0.0, 0.0));
        for (m, c) in ms.iter().zip(cs) {
            scratch.buf[(*m as usize) % g] += c;
        }
        let plan = scratch.planner.plan_fft_inverse(g);
        scratch
            .fft_scratch
            .resize(plan.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
        plan.process_with_scratch(&mut scratch.buf, &mut scratch.fft_scratch);
        scratch.nsq.clear();
        scratch
            .nsq
            .extend(scratch.buf.iter().map(|v| v.norm_sqr()));
        let lb = scratch.nsq.iter().cloned().fold(0.0f64, f64::max).sqrt();
        let slack = lipschitz / (2.0 * g as f64);
        let cut = lb + eps_eff - slack;
        let survivors = if cut <= 0.0 {
            g
        } else {
            let cut_sq = cut * cut;
            (0..g)
                .filter(|&k| scratch.nsq[k].max(scratch.nsq[(k + 1) % g]) > cut_sq)
                .count()
        };
        if survivors <= 4096 || g == MAX_COARSE_FFT {
            if survivors > (1 << 18) {
                return Err(Error::GuardExceeded {
                    guard: "modulation sup refinement budget",
                    limit: SUP_EVAL_BUDGET as u128,
                    requested: (lipschitz / eps_eff).ceil() as u128,
                });
            }
            break (lb, slack);
        }
        g *= 2;
    };

    let mut lb = lb0;
    let mut heap: BinaryHeap<SupInterval> = BinaryHeap::new();
    let inv_g = 1.0 / g as f64;
    let cut = lb + eps_eff - slack;
    let cut_sq = if cut > 0.0 { cut * cut } else { -1.0 };
    for k in 0..g {
        let a = scratch.nsq[k];
        let b = scratch.nsq[(k + 1) % g];
        if a.max(b) > cut_sq {
            let g_lo = a.sqrt();
            let g_hi = b.sqrt();
            let ub = g_lo.max(g_hi) + slack;
            if ub > lb + eps_eff {
                heap.push(SupInterval {
                    ub,
                    lo: k as f64 * inv_g,
                    width: inv_g,
                    g_lo,
                    g_hi,
                });
            }
        }
    }

    let min_width = (2.0f64).powi(-MAX_SPLIT_DEPTH);
    let mut evals: u64 = 0;
    while let Some(top) = heap.pop() {
        if top.ub <= lb + eps_eff {
            break; // heap maximum certified: every remaining interval too
        }
        if top.width <= min_width {
            return Err(Error::ToleranceNotReached {
                requested: eps,
                achieved: top.ub - lb,
            });
        }
        if evals >= SUP_EVAL_BUDGET {
            return Err(Error::GuardExceeded {
                guard: "modulation sup refinement budget",
                limit: SUP_EVAL_BUDGET as u128,
                requested: (lipschitz / eps_eff).ceil() as u128,
            });
        }
        let half = top.width * 0.5;
        let mid = top.lo + half; // dyadic, exact
        let g_mid = eval(mid);
        evals += 1;
        if g_mid > lb {
            lb = g_mid;
        }
        let child_slack = lipschitz * half * 0.5;
        let left_ub = top.g_lo.max(g_mid) + child_slack;
        if left_ub > lb + eps_eff {
            heap.push(SupInterval {
                ub: left_ub,
                lo: top.lo,
                width: half,
                g_lo: top.g_lo,
                g_hi: g_mid,
            });
        }
        let right_ub = g_mid.max(top.g_hi) + child_slack;
        if right_ub > lb + eps_eff {
            heap.push(SupInterval {
                ub: right_ub,
                lo: mid,
                width: half,
                g_lo: g_mid,
                g_hi: top.g_hi,
            });
        }
    }
    Ok(lb)
}

// ---------------------------------------------------------------------------
// The maximal operator
// ---------------------------------------------------------------------------

/// 𝒞f(x) = sup_λ |Σ_{0<|y|∞≤2^J} f(x−y) e(λ|y|^{2d}) K(y)| within ε.
///
/// `f` must live on a box (finite support).  The output box is the Minkowski
/// expansion of the input box by the truncation radius; each value is real,
/// lies in [sup − ε, sup + μ] with μ the tiny fp margin of the certificate,
/// and the map is exactly translation-equivariant (the per-point shells only
/// depend on f around x).
pub fn carleson_apply(
    f: &LatticeFunction,
    kernel: &CzKernel,
    d: u32,
    j_trunc: u32,
    epsilon: f64,
) -> Result<LatticeFunction> {
    carleson_apply_offset(f, kernel, d, j_trunc, epsilon, 0)
}

/// `carleson_apply` with the λ-search window shifted to [k, k+1).
///
/// Every phase |y|^{2d} is an integer, so e((k+t)·m) = e(t·m) holds exactly
/// for integer k: the certified search runs on the fractional part alone and
/// the output is bitwise independent of `lambda_offset`.  The parameter
/// exists so callers can witness that periodicity end-to-end.
pub fn carleson_apply_offset(
    f: &LatticeFunction,
    kernel: &CzKernel,
    d: u32,
    j_trunc: u32,
    epsilon: f64,
    lambda_offset: i64,
) -> Result<LatticeFunction> {
    let _ = lambda_offset; // e(offset·m) = 1 exactly; see the doc comment
    let support = match f.domain() {
        Domain::Box(b) => b.clone(),
        Domain::Torus { .. } => {
            return Err(Error::InvalidParameter {
                what: "maximal operator input",
                details: "expects finitely supported input on a box; torus input would alias the truncation".into(),
            })
        }
    };
    if f.dim() != kernel.dimension() {
        return Err(Error::DimensionMismatch {
            expected: kernel.dimension(),
            actual: f.dim(),
        });
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter {
            what: "sup tolerance",
            details: format!("ε must be positive and finite, got {epsilon}"),
        });
    }
    let trunc = truncation_data(kernel, j_trunc, d)?;
    let n = trunc.n;
    let radius = 1i64 << j_trunc;

    let out_lo: Vec<i64> = support.lo.iter().map(|&l| l - radius).collect();
    let out_shape: Vec<usize> = support
        .shape
        .iter()
        .map(|&s| s + 2 * radius as usize)
        .collect();
    let total: usize = out_shape.iter().product();
    if total as u128 > MAX_ENUM_POINTS {
        return Err(Error::GuardExceeded {
            guard: "output enumeration",
            limit: MAX_ENUM_POINTS,
            requested: total as u128,
        });
    }

    let shells = trunc.shell_ms.len();
    let mut acc = vec![Complex64::new(0.0, 0.0); shells];
    let mut active_ms: Vec<i64> = Vec::with_capacity(shells);
    let mut active_cs: Vec<Complex64> = Vec::with_capacity(shells);
    let mut scratch = SupScratch::new();
    let mut values = Vec::with_capacity(total);
    let mut x = out_lo.clone();
    let mut coords = vec![0usize; n];
    let mut point = vec![0i64; n];
    let zero = Complex64::new(0.0, 0.0);
    for _ in 0..total {
        acc.fill(zero);
        for i in 0..trunc.kvals.len() {
            let off = &trunc.offsets[i * n..(i + 1) * n];
            for a in 0..n {
                point[a] = x[a] - off[a];
            }
            let v = f.get(&point);
            if v != zero {
                acc[trunc.shell_of[i]] += v * trunc.kvals[i];
            }
        }
        active_ms.clear();
        active_cs.clear();
        for (u, c) in acc.iter().enumerate() {
            if *c != zero {
                active_ms.push(trunc.shell_ms[u]);
                active_cs.push(*c);
            }
        }
        let sup = certified_sup_modulus(&active_ms, &active_cs, epsilon, &mut scratch)?;
        values.push(Complex64::new(sup, 0.0));
        for a in (0..n).rev() {
            coords[a] += 1;
            if coords[a] < out_shape[a] {
                x[a] = out_lo[a] + coords[a] as i64;
                break;
            }
            coords[a] = 0;
            x[a] = out_lo[a];
        }
    }
    LatticeFunction::new(
        Domain::Box(BoxSupport {
            lo: out_lo,
            shape: out_shape,
        }),
        values,
    )
}

/// T_λf(x) = Σ_{0<|y|∞≤2^J} f(x−y) e(λ|y|^{2d}) K(y): one fixed modulation.
///
/// Box input expands by the truncation radius; torus input wraps cyclically.
/// Rational modulations get exact phase reduction mod 1.
pub fn single_lambda_apply(
    f: &LatticeFunction,
    kernel: &CzKernel,
    d: u32,
    j_trunc: u32,
    lambda: &Modulation,
) -> Result<LatticeFunction> {
    if f.dim() != kernel.dimension() {
        return Err(Error::DimensionMismatch {
            expected: kernel.dimension(),
            actual: f.dim(),
        });
    }
    let trunc = truncation_data(kernel, j_trunc, d)?;
    let n = trunc.n;
    let radius = 1i64 << j_trunc;
    // Phases depend only on the shell, not on x: precompute per point.
    let factors: Vec<Complex64> = (0..trunc.kvals.len())
        .map(|i| {
            unit_phase(lambda.phase_times(trunc.shell_ms[trunc.shell_of[i]] as i128))
                * trunc.kvals[i]
        })
        .collect();
    let zero = Complex64::new(0.0, 0.0);
    let mut point = vec![0i64; n];
    let mut apply_at = |x: &[i64]| {
        let mut sum = ChunkedSum::new();
        for i in 0..factors.len() {
            let off = &trunc.offsets[i * n..(i + 1) * n];
            for a in 0..n {
                point[a] = x[a] - off[a];
            }
            let v = f.get(&point);
            if v != zero {
                sum.push(v * factors[i]);
            }
        }
        sum.finish()
    };
    match f.domain() {
        Domain::Box(b) => {
            let out_lo: Vec<i64> = b.lo.iter().map(|&l| l - radius).collect();
            let out_shape: Vec<usize> = b.shape.iter().map(|&s| s + 2 * radius as usize).collect();
            let total: usize = out_shape.iter().product();
            if total as u128 > MAX_ENUM_POINTS {
                return Err(Error::GuardExceeded {
                    guard: "output enumeration",
                    limit: MAX_ENUM_POINTS,
                    requested: total as u128,
                });
            }
            LatticeFunction::from_fn_box(&out_lo, &out_shape, |x| apply_at(x))
        }
        Domain::Torus { sizes } => {
            let sizes = sizes.clone();
            let mut xi = vec![0i64; n];
            LatticeFunction::from_fn_torus(&sizes, |coords| {
                for (a, &c) in coords.iter().enumerate() {
                    xi[a] = c as i64;
                }
                apply_at(&xi)
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Modulation fields
// ---------------------------------------------------------------------------

/// A real-valued field λ(x) (or integer coefficient field v(x)) on lattice
/// points: either a global constant or a table on a box/torus.
#[derive(Debug, Clone)]
pub struct ModulationField {
    data: FieldData,
}

#[derive(Debug, Clone)]
enum FieldData {
    Constant(f64),
    Table {
        lo: Vec<i64>,
        shape: Vec<usize>,
        torus: bool,
        values: Vec<f64>,
        x1_only: bool,
    },
}

impl ModulationField {
    /// The field λ ≡ c.
    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter {
                what: "modulation value",
                details: format!("must be finite, got {c}"),
            });
        }
        Ok(ModulationField {
            data: FieldData::Constant(c),
        })
    }

    /// Tabulates g over the box lo + [0,shape); undefined outside it.
    pub fn from_fn_box(
        lo: &[i64],
        shape: &[usize],
        mut g: impl FnMut(&[i64]) -> f64,
    ) -> Result<Self> {
        if lo.len() != shape.len() || lo.is_empty() {
            return Err(Error::InvalidParameter {
                what: "field domain",
                details: "lo and shape must agree and be nonempty".into(),
            });
        }
        let total: usize = shape.iter().product();
        if total == 0 || total as u128 > MAX_ENUM_POINTS {
            return Err(Error::InvalidParameter {
                what: "field domain",
                details: format!("table of {total} points refused"),
            });
        }
        let mut values = Vec::with_capacity(total);
        let mut coords = vec![0usize; shape.len()];
        let mut point = vec![0i64; shape.len()];
        for _ in 0..total {
            for (a, &c) in coords.iter().enumerate() {
                point[a] = lo[a] + c as i64;
            }
            let v = g(&point);
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    what: "modulation value",
                    details: format!("non-finite value at {point:?}"),
                });
            }
            values.push(v);
            for a in (0..shape.len()).rev() {
                coords[a] += 1;
                if coords[a] < shape[a] {
                    break;
                }
                coords[a] = 0;
            }
        }
        Ok(ModulationField {
            data: FieldData::Table {
                lo: lo.to_vec(),
                shape: shape.to_vec(),
                torus: false,
                values,
                x1_only: false,
            },
        })
    }

    /// Tabulates g over the torus ∏ ℤ/Nᵢ; evaluation wraps coordinates.
    pub fn from_fn_torus(sizes: &[usize], mut g: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParameter {
                what: "field domain",
                details: "torus sizes must be positive".into(),
            });
        }
        let total: usize = sizes.iter().product();
        if total as u128 > MAX_ENUM_POINTS {
            return Err(Error::InvalidParameter {
                what: "field domain",
                details: format!("table of {total} points refused"),
            });
        }
        let mut values = Vec::with_capacity(total);
        let mut coords = vec![0usize; sizes.len()];
        for _ in 0..total {
            let v = g(&coords);
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    what: "modulation value",
                    details: format!("non-finite value at {coords:?}"),
                });
            }
            values.push(v);
            for a in (0..sizes.len()).rev() {
                coords[a] += 1;
                if coords[a] < sizes[a] {
                    break;
                }
                coords[a] = 0;
            }
        }
        Ok(ModulationField {
            data: FieldData::Table {
                lo: vec![0; sizes.len()],
                shape: sizes.to_vec(),
                torus: true,
                values,
                x1_only: false,
            },
        })
    }

    /// Checks that the table only depends on the first coordinate and marks
    /// it so; errors if some row varies along another axis.
    pub fn marked_x1_only(mut self) -> Result<Self> {
        match &mut self.data {
            FieldData::Constant(_) => Ok(self),
            FieldData::Table {
                shape,
                values,
                x1_only,
                ..
            } => {
                let row: usize = shape[1..].iter().product();
                for (i, chunk) in values.chunks(row.max(1)).enumerate() {
                    if chunk.iter().any(|&v| v != chunk[0]) {
                        return Err(Error::InvalidParameter {
                            what: "field dependence",
                            details: format!("row x₁-index {i} varies along another axis"),
                        });
                    }
                }
                *x1_only = true;
                Ok(self)
            }
        }
    }

    /// Some(c) when the field is the global constant c.
    pub fn is_constant(&self) -> Option<f64> {
        match &self.data {
            FieldData::Constant(c) => Some(*c),
            FieldData::Table { .. } => None,
        }
    }

    /// Whether evaluation is known to depend only on x₁.
    pub fn depends_only_on_x1(&self) -> bool {
        match &self.data {
            FieldData::Constant(_) => true,
            FieldData::Table { x1_only, .. } => *x1_only,
        }
    }

    /// λ(x).  Box tables error outside their domain; torus tables wrap.
    pub fn value(&self, x: &[i64]) -> Result<f64> {
        match &self.data {
            FieldData::Constant(c) => Ok(*c),
            FieldData::Table {
                lo,
                shape,
                torus,
                values,
                ..
            } => {
                if x.len() != lo.len() {
                    return Err(Error::DimensionMismatch {
                        expected: lo.len(),
                        actual: x.len(),
                    });
                }
                let mut idx = 0usize;
                for a in 0..lo.len() {
                    let c = if *torus {
                        (x[a].rem_euclid(shape[a] as i64)) as usize
                    } else {
                        let rel = x[a] - lo[a];
                        if rel < 0 || rel >= shape[a] as i64 {
                            return Err(Error::PreconditionViolated(format!(
                                "modulation field not defined at {x:?}"
                            )));
                        }
                        rel as usize
                    };
                    idx = idx * shape[a] + c;
                }
                Ok(values[idx])
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Variable-coefficient parabolic transform
// ---------------------------------------------------------------------------

/// ℋ_v f(x) = Σ_{0<|y|≤2^J} f(x₁−y, x₂−v(x)·y²) / y on a 2-torus.
///
/// Both coordinate shifts wrap (the x₂ wrap is the load-bearing one); the
/// coefficient field must take integer values at every evaluation point.
pub fn variable_parabola(
    f: &LatticeFunction,
    v: &ModulationField,
    j_trunc: u32,
) -> Result<LatticeFunction> {
    let sizes = match f.domain() {
        Domain::Torus { sizes } if sizes.len() == 2 => sizes.clone(),
        Domain::Torus { sizes } => {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: sizes.len(),
            })
        }
        Domain::Box(_) => {
            return Err(Error::InvalidParameter {
                what: "parabolic transform input",
                details: "expects a two-dimensional torus so the parabolic shift wraps".into(),
            })
        }
    };
    if j_trunc == 0 || j_trunc > 30 {
        return Err(Error::InvalidParameter {
            what: "truncation level",
            details: format!("need 1 ≤ J ≤ 30, got {j_trunc}"),
        });
    }
    let radius = 1i64 << j_trunc;
    let n2 = sizes[1] as i128;
    let mut err: Option<Error> = None;
    let out = LatticeFunction::from_fn_torus(&sizes, |coords| {
        let x = [coords[0] as i64, coords[1] as i64];
        let vx = match v.value(&x) {
            Ok(val) => val,
            Err(e) => {
                if err.is_none() {
                    err = Some(e);
                }
                return Complex64::new(0.0, 0.0);
            }
        };
        if vx.fract() != 0.0 || vx.abs() > 9.0e15 {
            if err.is_none() {
                err = Some(Error::InvalidParameter {
                    what: "coefficient field",
                    details: format!("must be integer-valued, got {vx} at {x:?}"),
                });
            }
            return Complex64::new(0.0, 0.0);
        }
        let vi = vx as i128;
        let mut sum = ChunkedSum::new();
        for y in -radius..=radius {
            if y == 0 {
                continue;
            }
            let shift = ((x[1] as i128) - vi * (y as i128) * (y as i128)).rem_euclid(n2);
            let val = f.get(&[x[0] - y, shift as i64]);
            if val != Complex64::new(0.0, 0.0) {
                sum.push(val / y as f64);
            }
        }
        sum.finish()
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Largest deviation, over all rows x₁ and all discrete frequencies k₂, of
/// the partial-Fourier identity for an x₁-only coefficient field:
///
/// DFT₂[ℋ_v f](x₁, k₂) = Σ_{y≠0} DFT₂[f](x₁−y, k₂) · e(−(k₂/N₂)·v(x₁)·y²)/y,
///
/// where DFT₂ is the x₂-transform h(k₂) = Σ_{x₂} h(x₂) e(−x₂k₂/N₂).  All
/// twiddle phases are exact rationals, so the residual is pure fp noise.
pub fn parabola_partial_fourier_residual(
    f: &LatticeFunction,
    v: &ModulationField,
    j_trunc: u32,
) -> Result<f64> {
    if !v.depends_only_on_x1() {
        return Err(Error::PreconditionViolated(
            "partial-Fourier identity needs a coefficient field depending only on x₁".into(),
        ));
    }
    let sizes = match f.domain() {
        Domain::Torus { sizes } if sizes.len() == 2 => sizes.clone(),
        _ => {
            return Err(Error::InvalidParameter {
                what: "parabolic transform input",
                details: "expects a two-dimensional torus".into(),
            })
        }
    };
    let (n1, n2) = (sizes[0], sizes[1]);
    let h = variable_parabola(f, v, j_trunc)?;
    let radius = 1i64 << j_trunc;

    // Row DFTs with exact rational twiddles e(−x₂k₂/N₂).
    let dft_rows = |fun: &LatticeFunction| -> Vec<Complex64> {
        let mut table = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for x1 in 0..n1 {
            for k2 in 0..n2 {
                let mut sum = ChunkedSum::new();
                for x2 in 0..n2 {
                    let t = (-((x2 * k2) as i128)).rem_euclid(n2 as i128);
                    sum.push(fun.get(&[x1 as i64, x2 as i64]) * unit_phase(frac_ratio(t, n2 as i128)));
                }
                table[x1 * n2 + k2] = sum.finish();
            }
        }
        table
    };
    let fhat = dft_rows(f);
    let hhat = dft_rows(&h);

    let mut worst = 0.0f64;
    for x1 in 0..n1 {
        let vx = v.value(&[x1 as i64, 0])?;
        let vi = vx as i128;
        for k2 in 0..n2 {
            let mut rhs = ChunkedSum::new();
            for y in -radius..=radius {
                if y == 0 {
                    continue;
                }
                let row = (x1 as i64 - y).rem_euclid(n1 as i64) as usize;
                let t = (-(vi * (y as i128) * (y as i128) * (k2 as i128))).rem_euclid(n2 as i128);
                rhs.push(fhat[row * n2 + k2] * unit_phase(frac_ratio(t, n2 as i128)) / y as f64);
            }
            let dev = (hhat[x1 * n2 + k2] - rhs.finish()).norm();
            if dev > worst {
                worst = dev;
            }
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// TT* composition kernel
// ---------------------------------------------------------------------------

/// Σ_z e(λ(x)|z|^{2d} − λ(y)|y−x+z|^{2d}) K_j(z) conj(K_j(y−x+z)) 1_{B_j}(x−z),
/// the kernel of T_jT_j* for the single-scale modulated operator
/// T_jf(x) = e(λ(x)|x−u|^{2d}) K_j(x−u) 1_{B_j}(u) summed over u.
///
/// B_j is the closed Euclidean ball |w|₂ ≤ 2^j, tested in exact integer
/// arithmetic.  On the diagonal x = y the two phase reductions cancel
/// bit-for-bit, so the value is real and nonnegative exactly; outside
/// B_{j+2}×B_{j+2} every term vanishes and the value is exactly zero.
pub fn ttstar_kernel(
    j: u32,
    lambda: &ModulationField,
    x: &[i64],
    y: &[i64],
    kernel: &CzKernel,
    d: u32,
) -> Result<Complex64> {
    let n = kernel.dimension();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if x.len() != n { x.len() } else { y.len() },
        });
    }
    if j == 0 || d == 0 {
        return Err(Error::InvalidParameter {
            what: "scale parameters",
            details: format!("need j ≥ 1 and d ≥ 1, got j = {j}, d = {d}"),
        });
    }
    if j > MAX_TTSTAR_J {
        return Err(Error::GuardExceeded {
            guard: "ttstar scale",
            limit: MAX_TTSTAR_J as u128,
            requested: j as u128,
        });
    }
    // Phase magnitudes: |z|² ≤ n·4^{j+1}, raised to the d-th power.
    let base = (n as i128) * (1i128 << (2 * (j + 1)));
    let mut probe: i128 = 1;
    for _ in 0..d {
        probe = probe.checked_mul(base).ok_or(Error::Overflow {
            what: "ttstar phase degree",
        })?;
    }
    // Terms need |x−z| ≤ 2^j with |z| ≤ 2^{j+1}, and |y−(x−z)| ≤ 2^{j+1}:
    // beyond radius 3·2^j every term has a vanishing factor.
    let reach = 9i128 << (2 * j);
    let norm2 = |p: &[i64]| -> i128 { p.iter().map(|&c| (c as i128) * (c as i128)).sum() };
    if norm2(x) > reach || norm2(y) > reach {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let lx = lambda.value(x)?;
    let ly = lambda.value(y)?;
    ttstar_sum(j, lx, ly, x, y, kernel, d)
}

/// The z-sum of `ttstar_kernel` with the modulation values already fixed.
fn ttstar_sum(
    j: u32,
    lx: f64,
    ly: f64,
    x: &[i64],
    y: &[i64],
    kernel: &CzKernel,
    d: u32,
) -> Result<Complex64> {
    let n = kernel.dimension();
    let ball2 = 1i128 << (2 * j);
    let mut w = vec![0i64; n];
    let mut sum = ChunkedSum::new();
    for_each_support_point(j, n, |z| {
        let kz = dyadic_piece(kernel, j, z).unwrap_or(0.0);
        if kz == 0.0 {
            return;
        }
        let mut xz2: i128 = 0;
        for a in 0..n {
            let t = (x[a] - z[a]) as i128;
            xz2 += t * t;
            w[a] = y[a] - x[a] + z[a];
        }
        if xz2 > ball2 {
            return;
        }
        let kw = dyadic_piece(kernel, j, &w).unwrap_or(0.0);
        if kw == 0.0 {
            return;
        }
        let mz = phase_power(z, d);
        let mw = phase_power(&w, d);
        let theta = frac_f64(frac_mul_int(lx, mz) - frac_mul_int(ly, mw));
        sum.push(unit_phase(theta) * (kz * kw));
    })?;
    Ok(sum.finish())
}

/// |p|^{2d} = (Σ pᵢ²)^d as an exact integer.
fn phase_power(p: &[i64], d: u32) -> i128 {
    let norm2: i128 = p.iter().map(|&c| (c as i128) * (c as i128)).sum();
    let mut acc: i128 = 1;
    for _ in 0..d {
        acc *= norm2;
    }
    acc
}

// ---------------------------------------------------------------------------
// Exceptional pair sets
// ---------------------------------------------------------------------------

/// One pair (x,y) whose TT* kernel value clears the threshold, with the
/// Dirichlet rational certificate of the leading phase coefficient
/// θ = 2d·(x−y)·λ(y) attached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberRecord {
    pub x: i64,
    pub y: i64,
    /// |𝒦♯(x,y)|.
    pub modulus: f64,
    /// θ = 2d·(x−y)·λ(y), the coefficient probed for rational structure.
    pub theta: f64,
    /// Best rational approximant a/q of θ with q ≤ dirichlet_scale.
    pub approx_num: i64,
    pub approx_den: i64,
    pub approx_distance: f64,
    /// Set when the approximant denominator exceeds 2d·j^{δ₀}.
    pub flagged: bool,
}

/// All pairs (x,y) ∈ B_{j+2}×B_{j+2} with |𝒦♯_{j,λ}(x,y)| ≥ c₀·2^{−2jn}·j^{−2κ}
/// (one-dimensional exhaustive scan), plus the Dirichlet certificates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub j: u32,
    pub kappa: f64,
    pub c0: f64,
    pub delta0: f64,
    /// The membership threshold c₀·2^{−2jn}·j^{−2κ} (n = 1).
    pub threshold: f64,
    /// Pairs range over [−pair_radius, pair_radius] with pair_radius = 2^{j+2}.
    pub pair_radius: i64,
    /// Denominator cap Q = max(1, ⌊2^{j(2d−1)}·j^{−δ₀}⌋) of the certificates.
    pub dirichlet_scale: i64,
    pub cardinality: usize,
    pub members: Vec<MemberRecord>,
}

/// Exhaustively scans B_{j+2}×B_{j+2} ⊂ ℤ×ℤ for pairs where the TT* kernel
/// is at least c₀·2^{−2j}·j^{−2κ}, attaching to each member the best rational
/// approximant of θ = 2d·(x−y)·λ(y) with denominator at most
/// Q = max(1, ⌊2^{j(2d−1)}·j^{−δ₀}⌋) and flagging members whose denominator
/// exceeds 2d·j^{δ₀}.
///
/// A constant modulation admits a prefix-sum fast path (the z-sum depends on
/// x only through a sliding window) and scales to j ≤ 8; varying fields take
/// the direct per-pair sum and are capped at j ≤ 6.
pub fn exceptional_set(
    j: u32,
    lambda: &ModulationField,
    kappa: f64,
    c0: f64,
    delta0: f64,
    kernel: &CzKernel,
    d: u32,
) -> Result<ExceptionalSet> {
    if kernel.dimension() != 1 {
        return Err(Error::InvalidParameter {
            what: "pair scan dimension",
            details: "exhaustive pair enumeration is implemented for n = 1".into(),
        });
    }
    if j == 0 || d == 0 {
        return Err(Error::InvalidParameter {
            what: "scale parameters",
            details: format!("need j ≥ 1 and d ≥ 1, got j = {j}, d = {d}"),
        });
    }
    for (name, v) in [("κ", kappa), ("c₀", c0), ("δ₀", delta0)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter {
                what: "pair scan parameters",
                details: format!("{name} must be positive and finite, got {v}"),
            });
        }
    }
    let constant = lambda.is_constant();
    let j_cap = if constant.is_some() {
        MAX_EXCEPTIONAL_J_CONSTANT
    } else {
        MAX_EXCEPTIONAL_J_GENERAL
    };
    if j > j_cap {
        return Err(Error::GuardExceeded {
            guard: "pair scan scale",
            limit: j_cap as u128,
            requested: j as u128,
        });
    }
    let threshold = c0 * (2.0f64).powi(-2 * j as i32) * (j as f64).powf(-2.0 * kappa);
    let q_raw = (2.0f64).powi((j * (2 * d - 1)) as i32) * (j as f64).powf(-delta0);
    if !(q_raw < 1.0e15) {
        return Err(Error::GuardExceeded {
            guard: "dirichlet approximation scale",
            limit: 1 << 50,
            requested: q_raw as u128,
        });
    }
    let dirichlet_scale = (q_raw.floor() as i64).max(1);
    let q_limit = 2.0 * d as f64 * (j as f64).powf(delta0);

    let pair_radius = 1i64 << (j + 2);
    let zr = 1i64 << (j + 1);
    let bj = 1i64 << j;
    // Cached kernel piece over its support, indexed by z + zr.
    let kj: Vec<f64> = (-zr..=zr)
        .map(|z| dyadic_piece(kernel, j, &[z]).unwrap_or(0.0))
        .collect();
    let mpow: Vec<i128> = (-zr..=zr).map(|z| phase_power(&[z], d)).collect();

    let mut members: Vec<MemberRecord> = Vec::new();
    let mut push_member = |x: i64, y: i64, modulus: f64, lam_y: f64| -> Result<()> {
        let theta = 2.0 * d as f64 * (x - y) as f64 * lam_y;
        let approx = best_rational_approx(theta, dirichlet_scale)?;
        let dist = (theta - approx.value()).abs();
        members.push(MemberRecord {
            x,
            y,
            modulus,
            theta,
            approx_num: approx.num(),
            approx_den: approx.den(),
            approx_distance: dist,
            flagged: approx.den() as f64 > q_limit,
        });
        Ok(())
    };

    match constant {
        Some(lam) => {
            // t_z = e(λ(|z|^{2d} − |h+z|^{2d}))·K_j(z)·K_j(h+z) depends on the
            // pair only through h = y−x; the indicator restricts z to the
            // window [x−2^j, x+2^j], so prefix sums in z answer each pair.
            let mut pref = vec![Complex64::new(0.0, 0.0); (2 * zr + 2) as usize];
            for h in -2 * pair_radius..=2 * pair_radius {
                let mut any = false;
                for idx in 0..=(2 * zr) as usize {
                    let z = idx as i64 - zr;
                    let w = h + z;
                    let term = if w.abs() <= zr {
                        let t = kj[idx] * kj[(w + zr) as usize];
                        if t != 0.0 {
                            any = true;
                            let theta = frac_f64(
                                frac_mul_int(lam, mpow[idx]) - frac_mul_int(lam, mpow[(w + zr) as usize]),
                            );
                            unit_phase(theta) * t
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    pref[idx + 1] = pref[idx] + term;
                }
                if !any {
                    continue;
                }
                let x_lo = (-pair_radius).max(-pair_radius - h);
                let x_hi = pair_radius.min(pair_radius - h);
                for x in x_lo..=x_hi {
                    let w_lo = (x - bj).max(-zr);
                    let w_hi = (x + bj).min(zr);
                    if w_lo > w_hi {
                        continue;
                    }
                    let val = pref[(w_hi + zr + 1) as usize] - pref[(w_lo + zr) as usize];
                    let modulus = val.norm();
                    if modulus >= threshold {
                        push_member(x, x + h, modulus, lam)?;
                    }
                }
            }
        }
        None => {
            // Cache λ over the pair range once; then direct windowed z-sums.
            let lam: Vec<f64> = (-pair_radius..=pair_radius)
                .map(|x| lambda.value(&[x]))
                .collect::<Result<_>>()?;
            for x in -pair_radius..=pair_radius {
                let lx = lam[(x + pair_radius) as usize];
                let w_lo = (x - bj).max(-zr);
                let w_hi = (x + bj).min(zr);
                if w_lo > w_hi {
                    continue;
                }
                for y in -pair_radius..=pair_radius {
                    let ly = lam[(y + pair_radius) as usize];
                    let mut val = Complex64::new(0.0, 0.0);
                    for z in w_lo..=w_hi {
                        let kz = kj[(z + zr) as usize];
                        if kz == 0.0 {
                            continue;
                        }
                        let w = y - x + z;
                        if w.abs() > zr {
                            continue;
                        }
                        let kw = kj[(w + zr) as usize];
                        if kw == 0.0 {
                            continue;
                        }
                        let theta = frac_f64(
                            frac_mul_int(lx, mpow[(z + zr) as usize])
                                - frac_mul_int(ly, mpow[(w + zr) as usize]),
                        );
                        val += unit_phase(theta) * (kz * kw);
                    }
                    let modulus = val.norm();
                    if modulus >= threshold {
                        push_member(x, y, modulus, ly)?;
                    }
                }
            }
        }
    }
    members.sort_by(|a, b| (a.x, a.y).cmp(&(b.x, b.y)));
    Ok(ExceptionalSet {
        j,
        kappa,
        c0,
        delta0,
        threshold,
        pair_radius,
        dirichlet_scale,
        cardinality: members.len(),
        members,
    })
}

// ---------------------------------------------------------------------------
// Dyadic chaining bound
// ---------------------------------------------------------------------------

/// The Rademacher–Menshov chaining majorant for a sequence a₀,…,a_{2^s}:
///
/// |a_{j₀}| + 2^{1/r′} Σ_{l=0}^{s} ( Σ_{κ=0}^{2^{s−l}−1} |a_{κ2^l} − a_{(κ+1)2^l}|^r )^{1/r},
///
/// which dominates |a_j| for every 0 ≤ j ≤ 2^s (any index reaches any other
/// through at most two dyadic blocks per level).  `j` is validated and the
/// domination is what callers should test; the value itself does not depend
/// on it.
pub fn rademacher_menshov_rhs(a: &[Complex64], r: f64, j: usize, j0: usize) -> Result<f64> {
    if a.len() < 2 || !(a.len() - 1).is_power_of_two() {
        return Err(Error::InvalidParameter {
            what: "sequence length",
            details: format!("need 2^s + 1 entries, got {}", a.len()),
        });
    }
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::InvalidParameter {
            what: "chaining exponent",
            details: format!("need r ≥ 1, got {r}"),
        });
    }
    let top = a.len() - 1;
    if j > top || j0 > top {
        return Err(Error::InvalidParameter {
            what: "chaining index",
            details: format!("indices j = {j}, j₀ = {j0} must lie in 0..={top}"),
        });
    }
    let s = top.trailing_zeros();
    let factor = (2.0f64).powf(1.0 - 1.0 / r);
    let mut levels = Vec::with_capacity(s as usize + 1);
    for l in 0..=s {
        let step = 1usize << l;
        let blocks = top >> l;
        let powers: Vec<f64> = (0..blocks)
            .map(|k| (a[k * step] - a[(k + 1) * step]).norm().powf(r))
            .collect();
        levels.push(pairwise_sum_f64(&powers).powf(1.0 / r));
    }
    Ok(a[j0].norm() + factor * pairwise_sum_f64(&levels))
}

// ---------------------------------------------------------------------------
// Empirical norm ratios
// ---------------------------------------------------------------------------

/// Which operator the empirical norm measurement drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// The maximal operator 𝒞 with certified sup tolerance.
    Carleson,
    /// The fixed-modulation convolution T_λ.
    SingleLambda,
    /// The variable-coefficient parabolic transform ℋ_v.
    VariableParabola,
}

impl OperatorKind {
    /// Stable text name used in table labels and configuration files.
    pub fn label(self) -> &'static str {
        match self {
            OperatorKind::Carleson => "carleson-sup",
            OperatorKind::SingleLambda => "single-modulation",
            OperatorKind::VariableParabola => "variable-parabola",
        }
    }
}

/// Parameters shared by the norm-ratio measurements.
#[derive(Debug, Clone)]
pub struct NormRatioConfig {
    pub j_trunc: u32,
    pub d: u32,
    /// Sup tolerance for the maximal operator.
    pub epsilon: f64,
    /// Modulation for the single-λ operator.
    pub lambda: f64,
    /// Coefficient fields for ℋ_v draw integers uniformly in [−bound, bound].
    pub parabola_bound: i64,
}

impl Default for NormRatioConfig {
    fn default() -> Self {
        NormRatioConfig {
            j_trunc: 4,
            d: 1,
            epsilon: 1e-2,
            lambda: 0.618_033_988_749_894_9,
            parabola_bound: 8,
        }
    }
}

/// One standard complex Gaussian sample (re, im independent N(0,1)).
fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let ray = (-2.0 * u1.ln()).sqrt();
    Complex64::new(ray * (2.0 * PI * u2).cos(), ray * (2.0 * PI * u2).sin())
}

fn ratio_rng(kind: OperatorKind, n_side: usize, seed: u64) -> ChaCha8Rng {
    let kind_tag: u64 = match kind {
        OperatorKind::Carleson => 1,
        OperatorKind::SingleLambda => 2,
        OperatorKind::VariableParabola => 3,
    };
    ChaCha8Rng::seed_from_u64(
        seed ^ (n_side as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (kind_tag << 56),
    )
}

/// max over `trials` random inputs of ‖op(f)‖_p / ‖f‖_p.
///
/// Inputs are i.i.d. complex Gaussian: on the box [−N,N]ⁿ for the convolution
/// operators, on the N×N torus (together with a random integer coefficient
/// field) for the parabolic transform.  Deterministic under a fixed seed.
pub fn empirical_norm_ratio(
    kind: OperatorKind,
    kernel: &CzKernel,
    n_side: usize,
    p: f64,
    trials: u32,
    seed: u64,
    cfg: &NormRatioConfig,
) -> Result<f64> {
    if n_side < 2 || !n_side.is_power_of_two() {
        return Err(Error::InvalidParameter {
            what: "support size",
            details: format!("N must be a power of two ≥ 2, got {n_side}"),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter {
            what: "trial count",
            details: "need at least one trial".into(),
        });
    }
    let mut rng = ratio_rng(kind, n_side, seed);
    let mut best = 0.0f64;
    for _ in 0..trials {
        let (f, out) = match kind {
            OperatorKind::Carleson | OperatorKind::SingleLambda => {
                let n = kernel.dimension();
                let lo = vec![-(n_side as i64); n];
                let shape = vec![2 * n_side + 1; n];
                let f = LatticeFunction::from_fn_box(&lo, &shape, |_| complex_gaussian(&mut rng))?;
                let out = match kind {
                    OperatorKind::Carleson => {
                        carleson_apply(&f, kernel, cfg.d, cfg.j_trunc, cfg.epsilon)?
                    }
                    _ => single_lambda_apply(
                        &f,
                        kernel,
                        cfg.d,
                        cfg.j_trunc,
                        &Modulation::Real(cfg.lambda),
                    )?,
                };
                (f, out)
            }
            OperatorKind::VariableParabola => {
                let sizes = [n_side, n_side];
                let f = LatticeFunction::from_fn_torus(&sizes, |_| complex_gaussian(&mut rng))?;
                let b = cfg.parabola_bound.max(0);
                let v = ModulationField::from_fn_torus(&sizes, |_| {
                    rng.gen_range(-b..=b) as f64
                })?;
                let out = variable_parabola(&f, &v, cfg.j_trunc)?;
                (f, out)
            }
        };
        let denom = lp_norm(&f, p)?;
        if denom == 0.0 {
            continue;
        }
        let ratio = lp_norm(&out, p)? / denom;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Tabulates `empirical_norm_ratio` over support sizes.  The `raw` column is
/// the measured ratio; `normalized` is its growth factor against the previous
/// row (1.0 on the first row), i.e. the per-step norm growth as N doubles.
pub fn norm_ratio_table(
    kind: OperatorKind,
    kernel: &CzKernel,
    n_sides: &[usize],
    p: f64,
    trials: u32,
    seed: u64,
    cfg: &NormRatioConfig,
) -> Result<DecayTable> {
    let mut table = DecayTable::new(
        format!("{} empirical norm ratio, p = {p}", kind.label()),
        "support half-width N",
    );
    let mut prev: Option<f64> = None;
    for &n_side in n_sides {
        let ratio = empirical_norm_ratio(kind, kernel, n_side, p, trials, seed, cfg)?;
        let growth = match prev {
            Some(r) if r > 0.0 => ratio / r,
            _ => 1.0,
        };
        table.push(n_side as f64, ratio, growth, None);
        prev = Some(ratio);
    }
    table.fit_power_law();
    Ok(table)
}
