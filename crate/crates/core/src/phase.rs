//! Reduction of oscillatory phases mod 1 and deterministic summation.
//!
//! Phases of the form λ·m with an exact integer m (e.g. m = |y|^{2d}) are the
//! backbone of every modulated sum in this crate.  Evaluating e(λm) naively as
//! `exp(2πi·λ·m)` loses up to `|λm|·eps` absolute accuracy, which is fatal for
//! m ~ 2^50.  Instead we reduce λ·m mod 1 *first*, carrying the rounding error
//! of every product explicitly (Dekker/Knuth compensated arithmetic), so the
//! reduced phase is accurate to a couple of ulps regardless of the size of m.
//! Rational phases a·m/q are reduced in integer arithmetic and are exact.

use num_complex::Complex64;

/// Error-free sum: returns `(s, e)` with `s = fl(a+b)` and `s + e = a + b`
/// exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product: returns `(p, e)` with `p = fl(a·b)` and `p + e = a·b`
/// exactly (uses fused multiply-add).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Unevaluated double-length value `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    /// Normalizes an arbitrary pair into the `hi + lo` representation.
    #[inline]
    pub fn renorm(hi: f64, lo: f64) -> Dd {
        let (s, e) = two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        Dd::renorm(s, e + self.lo + other.lo)
    }

    /// Multiplies by an exact power of two (exact on both components).
    #[inline]
    pub fn scale_pow2(self, factor: f64) -> Dd {
        Dd {
            hi: self.hi * factor,
            lo: self.lo * factor,
        }
    }

    /// Reduces to the half-open interval `[0, 1)`, handling the carry where
    /// `lo` pushes the value across an integer.
    #[inline]
    pub fn frac(self) -> Dd {
        // hi − floor(hi) is exact: both operands share the scale of hi.
        let f = self.hi - self.hi.floor();
        let mut r = Dd::renorm(f, self.lo);
        if r.hi >= 1.0 {
            r = Dd::renorm(r.hi - 1.0, r.lo);
        } else if r.hi < 0.0 {
            r = Dd::renorm(r.hi + 1.0, r.lo);
        }
        r
    }

    /// Rounds to a single f64 in `[0, 1)` (assumes `frac` was applied).
    #[inline]
    pub fn to_unit_f64(self) -> f64 {
        let v = self.hi + self.lo;
        if v >= 1.0 {
            v - 1.0
        } else if v < 0.0 {
            v + 1.0
        } else {
            v
        }
    }
}

/// Fractional part of a plain f64, mapped into `[0, 1)`.
#[inline]
pub fn frac_f64(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// `x·m mod 1` for an exact integer `m`, accurate to ~1 ulp of the reduced
/// value.
///
/// The integer is split into 26-bit limbs and the product is accumulated by a
/// Horner recurrence entirely inside `[0, 1)`:  each limb product is captured
/// error-free by [`two_prod`], so the only losses are double-length roundings
/// (≈ 2^{−100} per limb).
pub fn frac_mul_int(x: f64, m: i128) -> f64 {
    if m == 0 || x == 0.0 {
        return 0.0;
    }
    let neg = m < 0;
    let mut mag = m.unsigned_abs();

    // Collect 26-bit limbs, least significant first.
    let mut limbs = [0u32; 5];
    let mut count = 0;
    while mag > 0 {
        limbs[count] = (mag & ((1 << 26) - 1)) as u32;
        mag >>= 26;
        count += 1;
    }

    // Only the fractional part of x matters mod 1; reducing first keeps the
    // limb products small.  The fractional part of an f64 is exact.
    let xf = x - x.floor();

    let mut acc = Dd::ZERO;
    for k in (0..count).rev() {
        acc = acc.scale_pow2((1u64 << 26) as f64).frac();
        let (p, e) = two_prod(xf, f64::from(limbs[k]));
        acc = acc.add(Dd::renorm(p, e)).frac();
    }
    let v = acc.to_unit_f64();
    if neg && v != 0.0 {
        1.0 - v
    } else {
        v
    }
}

/// `(t/q) mod 1` reduced exactly in integer arithmetic.
#[inline]
pub fn frac_ratio(t: i128, q: i128) -> f64 {
    debug_assert!(q > 0);
    let r = t.rem_euclid(q);
    (r as f64) / (q as f64)
}

/// The unit-modulus phase factor `e(θ) = exp(2πiθ)`.
///
/// The argument is reduced to `[0, 1)` before evaluating sin/cos, so large
/// integer parts cost no accuracy.
#[inline]
pub fn unit_phase(theta: f64) -> Complex64 {
    let t = frac_f64(theta);
    let (s, c) = (std::f64::consts::TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// Deterministic pairwise (tree) summation.
///
/// The reduction tree depends only on the slice length, never on thread
/// scheduling, so sums are reproducible bit-for-bit; the tree shape also keeps
/// the rounding error at O(log n) ulps instead of O(n).
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        let mut acc = Complex64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Streaming pairwise accumulator for sums too large to buffer whole:
/// terms fill a fixed-size chunk, each full chunk reduces by tree into a
/// partial, and the partials reduce by tree at the end.  The reduction
/// order depends only on the push sequence, so results are reproducible.
pub struct ChunkedSum {
    buf: Vec<Complex64>,
    partials: Vec<Complex64>,
}

impl ChunkedSum {
    const CHUNK: usize = 4096;

    pub fn new() -> Self {
        ChunkedSum {
            buf: Vec::with_capacity(Self::CHUNK),
            partials: Vec::new(),
        }
    }

    pub fn push(&mut self, v: Complex64) {
        self.buf.push(v);
        if self.buf.len() == Self::CHUNK {
            self.partials.push(pairwise_sum(&self.buf));
            self.buf.clear();
        }
    }

    pub fn finish(mut self) -> Complex64 {
        if !self.buf.is_empty() {
            self.partials.push(pairwise_sum(&self.buf));
        }
        pairwise_sum(&self.partials)
    }
}

impl Default for ChunkedSum {
    fn default() -> Self {
        Self::new()
    }
}

/// Real-valued variant of [`pairwise_sum`].
pub fn pairwise_sum_f64(values: &[f64]) -> f64 {
    const BASE: usize = 32;
    if values.len() <= BASE {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum_f64(&values[..mid]) + pairwise_sum_f64(&values[mid..])
}
