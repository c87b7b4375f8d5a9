//! Finitely supported and periodic functions on the integer lattice ℤⁿ.
//!
//! Two support models are provided: an axis-aligned box on ℤⁿ (the function
//! is identically zero outside the box by construction) and a torus
//! (ℤ/N₁ × … × ℤ/Nₙ).  Values are stored row-major.
//!
//! Transform conventions on the torus:
//!
//! ```text
//! forward:  F(k) = Σ_x f(x) e(−x·k/N)          (unnormalized)
//! inverse:  f(x) = (1/ΠNᵢ) Σ_k F(k) e(+x·k/N)
//! ```
//!
//! so `idft ∘ dft = id` and Parseval reads ‖F‖₂² = (ΠNᵢ)·‖f‖₂².  The FFT
//! path is backed by `rustfft`; `convolve_direct` keeps an O(N²) reference
//! path alive so the two routes can always be cross-checked.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::pairwise_sum_f64;

/// Total-size guard for transforms and padded convolutions (2^24 points).
const MAX_TOTAL_POINTS: usize = 1 << 24;

/// An axis-aligned box `[lo, lo+shape)` in ℤⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSupport {
    pub lo: Vec<i64>,
    pub shape: Vec<usize>,
}

/// Support model of a lattice function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Domain {
    /// Finite support inside a box of ℤⁿ; the function vanishes outside.
    Box(BoxSupport),
    /// Fully periodic function on ℤ/N₁ × … × ℤ/Nₙ.
    Torus { sizes: Vec<usize> },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Box(b) => b.shape.len(),
            Domain::Torus { sizes } => sizes.len(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        match self {
            Domain::Box(b) => &b.shape,
            Domain::Torus { sizes } => sizes,
        }
    }

    fn validate(&self) -> Result<()> {
        let shape = self.shape();
        if shape.is_empty() {
            return Err(Error::InvalidParameter {
                what: "domain",
                details: "dimension must be ≥ 1".into(),
            });
        }
        if shape.iter().any(|&s| s == 0) {
            return Err(Error::InvalidParameter {
                what: "domain",
                details: "all axis lengths must be positive".into(),
            });
        }
        if let Domain::Box(b) = self {
            if b.lo.len() != b.shape.len() {
                return Err(Error::DimensionMismatch {
                    expected: b.shape.len(),
                    actual: b.lo.len(),
                });
            }
        }
        let total: usize = shape.iter().product();
        if total > MAX_TOTAL_POINTS {
            return Err(Error::GuardExceeded {
                guard: "lattice total points",
                limit: MAX_TOTAL_POINTS as u128,
                requested: total as u128,
            });
        }
        Ok(())
    }
}

/// Row-major strides for a shape.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let n = shape.len();
    let mut s = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

/// A complex-valued function on the lattice with one of the two support
/// models.  Values are row-major over the box/torus coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction {
    domain: Domain,
    values: Vec<Complex64>,
}

impl LatticeFunction {
    /// Creates a function from a domain and a row-major value vector.
    pub fn new(domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        domain.validate()?;
        let total: usize = domain.shape().iter().product();
        if values.len() != total {
            return Err(Error::InvalidParameter {
                what: "values",
                details: format!("expected {total} values, got {}", values.len()),
            });
        }
        Ok(LatticeFunction { domain, values })
    }

    pub fn zeros(domain: Domain) -> Result<Self> {
        domain.validate()?;
        let total: usize = domain.shape().iter().product();
        Ok(LatticeFunction {
            domain,
            values: vec![Complex64::new(0.0, 0.0); total],
        })
    }

    /// Kronecker delta at `point` on a torus.
    pub fn delta_torus(sizes: &[usize], point: &[i64]) -> Result<Self> {
        let mut f = Self::zeros(Domain::Torus {
            sizes: sizes.to_vec(),
        })?;
        f.set(point, Complex64::new(1.0, 0.0))?;
        Ok(f)
    }

    /// Builds a function on a box by evaluating `g` at every lattice point.
    pub fn from_fn_box(
        lo: &[i64],
        shape: &[usize],
        mut g: impl FnMut(&[i64]) -> Complex64,
    ) -> Result<Self> {
        let domain = Domain::Box(BoxSupport {
            lo: lo.to_vec(),
            shape: shape.to_vec(),
        });
        domain.validate()?;
        let total: usize = shape.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut point = vec![0i64; shape.len()];
        let mut coords = vec![0usize; shape.len()];
        for _ in 0..total {
            for (k, c) in coords.iter().enumerate() {
                point[k] = lo[k] + *c as i64;
            }
            values.push(g(&point));
            // advance row-major odometer
            for k in (0..shape.len()).rev() {
                coords[k] += 1;
                if coords[k] < shape[k] {
                    break;
                }
                coords[k] = 0;
            }
        }
        Ok(LatticeFunction { domain, values })
    }

    /// Builds a torus function by evaluating `g` at coordinates in
    /// `[0,N₁)×…×[0,Nₙ)`.
    pub fn from_fn_torus(
        sizes: &[usize],
        mut g: impl FnMut(&[usize]) -> Complex64,
    ) -> Result<Self> {
        let domain = Domain::Torus {
            sizes: sizes.to_vec(),
        };
        domain.validate()?;
        let total: usize = sizes.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut coords = vec![0usize; sizes.len()];
        for _ in 0..total {
            values.push(g(&coords));
            for k in (0..sizes.len()).rev() {
                coords[k] += 1;
                if coords[k] < sizes[k] {
                    break;
                }
                coords[k] = 0;
            }
        }
        Ok(LatticeFunction { domain, values })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Flat index of a lattice point, or `None` when the point lies outside a
    /// box support.  Torus coordinates wrap.
    fn index_of(&self, point: &[i64]) -> Option<usize> {
        let shape = self.domain.shape();
        if point.len() != shape.len() {
            return None;
        }
        let st = strides(shape);
        let mut idx = 0usize;
        match &self.domain {
            Domain::Box(b) => {
                for k in 0..shape.len() {
                    let c = point[k] - b.lo[k];
                    if c < 0 || c as usize >= shape[k] {
                        return None;
                    }
                    idx += c as usize * st[k];
                }
            }
            Domain::Torus { sizes } => {
                for k in 0..shape.len() {
                    let c = point[k].rem_euclid(sizes[k] as i64) as usize;
                    idx += c * st[k];
                }
            }
        }
        Some(idx)
    }

    /// Value at a lattice point; identically zero outside a box support.
    pub fn get(&self, point: &[i64]) -> Complex64 {
        match self.index_of(point) {
            Some(i) => self.values[i],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Sets the value at a point; errors if the point lies outside a box.
    pub fn set(&mut self, point: &[i64], v: Complex64) -> Result<()> {
        match self.index_of(point) {
            Some(i) => {
                self.values[i] = v;
                Ok(())
            }
            None => Err(Error::InvalidParameter {
                what: "point",
                details: format!("{point:?} outside support"),
            }),
        }
    }

    /// Iterates `(point, value)` pairs in row-major order.
    pub fn iter_points(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        let shape = self.domain.shape().to_vec();
        let lo: Vec<i64> = match &self.domain {
            Domain::Box(b) => b.lo.clone(),
            Domain::Torus { .. } => vec![0; shape.len()],
        };
        let total: usize = shape.iter().product();
        let st = strides(&shape);
        (0..total).map(move |idx| {
            let mut point = vec![0i64; shape.len()];
            let mut rem = idx;
            for k in 0..shape.len() {
                point[k] = lo[k] + (rem / st[k]) as i64;
                rem %= st[k];
            }
            (point, self.values[idx])
        })
    }
}

/// A point on the dual torus: per-axis integer indices `k` with frequencies
/// `k/Nᵢ ∈ [0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusFrequency {
    pub indices: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl TorusFrequency {
    pub fn new(indices: Vec<usize>, sizes: Vec<usize>) -> Result<Self> {
        if indices.len() != sizes.len() {
            return Err(Error::DimensionMismatch {
                expected: sizes.len(),
                actual: indices.len(),
            });
        }
        if indices.iter().zip(&sizes).any(|(&k, &n)| n == 0 || k >= n) {
            return Err(Error::InvalidParameter {
                what: "frequency index",
                details: "index must satisfy 0 ≤ k < N on each axis".into(),
            });
        }
        Ok(TorusFrequency { indices, sizes })
    }

    /// Real frequencies `kᵢ/Nᵢ ∈ [0,1)`.
    pub fn frequencies(&self) -> Vec<f64> {
        self.indices
            .iter()
            .zip(&self.sizes)
            .map(|(&k, &n)| k as f64 / n as f64)
            .collect()
    }
}

thread_local! {
    static FFT_CACHE: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan_fft(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    FFT_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// Visits the base index of every 1-D line along `axis`.
fn for_each_line(shape: &[usize], st: &[usize], axis: usize, mut visit: impl FnMut(usize)) {
    let n = shape.len();
    let mut coords = vec![0usize; n];
    'lines: loop {
        let mut base = 0usize;
        for k in 0..n {
            if k != axis {
                base += coords[k] * st[k];
            }
        }
        visit(base);
        let mut k = n;
        loop {
            if k == 0 {
                break 'lines;
            }
            k -= 1;
            if k == axis {
                continue;
            }
            coords[k] += 1;
            if coords[k] < shape[k] {
                continue 'lines;
            }
            coords[k] = 0;
        }
    }
}

fn transform_in_place(values: &mut [Complex64], sizes: &[usize], forward: bool) {
    let st = strides(sizes);
    for axis in 0..sizes.len() {
        let len = sizes[axis];
        if len == 1 {
            continue;
        }
        let fft = plan_fft(len, forward);
        let stride = st[axis];
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for_each_line(sizes, &st, axis, |base| {
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = values[base + i * stride];
            }
            fft.process(&mut line);
            for (i, slot) in line.iter().enumerate() {
                values[base + i * stride] = *slot;
            }
        });
    }
}

/// Forward discrete Fourier transform on the torus:
/// `F(k) = Σ_x f(x) e(−x·k/N)` (unnormalized).
pub fn dft(f: &LatticeFunction) -> Result<LatticeFunction> {
    let sizes = match f.domain() {
        Domain::Torus { sizes } => sizes.clone(),
        Domain::Box(_) => {
            return Err(Error::InvalidParameter {
                what: "dft input",
                details: "transform requires a torus support".into(),
            })
        }
    };
    let mut values = f.values.clone();
    transform_in_place(&mut values, &sizes, true);
    LatticeFunction::new(Domain::Torus { sizes }, values)
}

/// Inverse transform: `f(x) = (1/ΠN) Σ_k F(k) e(+x·k/N)`; `idft ∘ dft = id`.
pub fn idft(f: &LatticeFunction) -> Result<LatticeFunction> {
    let sizes = match f.domain() {
        Domain::Torus { sizes } => sizes.clone(),
        Domain::Box(_) => {
            return Err(Error::InvalidParameter {
                what: "idft input",
                details: "transform requires a torus support".into(),
            })
        }
    };
    let mut values = f.values.clone();
    transform_in_place(&mut values, &sizes, false);
    let total: usize = sizes.iter().product();
    let scale = 1.0 / total as f64;
    for v in &mut values {
        *v *= scale;
    }
    LatticeFunction::new(Domain::Torus { sizes }, values)
}

/// ℓ^p norm for `1 ≤ p ≤ ∞` (`f64::INFINITY` for the sup norm).
pub fn lp_norm(f: &LatticeFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter {
            what: "p",
            details: format!("ℓ^p norm requires p ≥ 1, got {p}"),
        });
    }
    if p == f64::INFINITY {
        return Ok(f
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max));
    }
    let powers: Vec<f64> = f.values.iter().map(|v| v.norm().powf(p)).collect();
    Ok(pairwise_sum_f64(&powers).powf(1.0 / p))
}

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Exact convolution `(f*g)(x) = Σ_y f(y) g(x−y)` via the FFT path.
///
/// Two torus functions must share sizes (cyclic convolution).  Two box
/// functions are zero-padded, per axis, to the next power of two at least
/// twice the larger support length, so no wrap-around can occur; the result
/// is a box at `lo_f + lo_g` with shape `shape_f + shape_g − 1`.
pub fn convolve(f: &LatticeFunction, g: &LatticeFunction) -> Result<LatticeFunction> {
    match (f.domain(), g.domain()) {
        (Domain::Torus { sizes: a }, Domain::Torus { sizes: b }) => {
            if a != b {
                return Err(Error::InvalidParameter {
                    what: "convolve",
                    details: "torus sizes must agree".into(),
                });
            }
            let fa = dft(f)?;
            let fb = dft(g)?;
            let mut prod = fa.values;
            for (p, q) in prod.iter_mut().zip(&fb.values) {
                *p *= q;
            }
            idft(&LatticeFunction::new(
                Domain::Torus { sizes: a.clone() },
                prod,
            )?)
        }
        (Domain::Box(ba), Domain::Box(bb)) => {
            if ba.shape.len() != bb.shape.len() {
                return Err(Error::DimensionMismatch {
                    expected: ba.shape.len(),
                    actual: bb.shape.len(),
                });
            }
            let n = ba.shape.len();
            let mut pad = Vec::with_capacity(n);
            let mut out_shape = Vec::with_capacity(n);
            for k in 0..n {
                out_shape.push(ba.shape[k] + bb.shape[k] - 1);
                pad.push(next_pow2(2 * ba.shape[k].max(bb.shape[k])));
            }
            let total: usize = pad.iter().product();
            if total > MAX_TOTAL_POINTS {
                return Err(Error::GuardExceeded {
                    guard: "padded convolution points",
                    limit: MAX_TOTAL_POINTS as u128,
                    requested: total as u128,
                });
            }
            let embed = |src: &LatticeFunction, b: &BoxSupport| -> Result<LatticeFunction> {
                let mut t = LatticeFunction::zeros(Domain::Torus { sizes: pad.clone() })?;
                let src_st = strides(&b.shape);
                let dst_st = strides(&pad);
                for (idx, v) in src.values.iter().enumerate() {
                    let mut rem = idx;
                    let mut dst = 0usize;
                    for k in 0..n {
                        let c = rem / src_st[k];
                        rem %= src_st[k];
                        dst += c * dst_st[k];
                    }
                    t.values[dst] = *v;
                }
                Ok(t)
            };
            let tf = embed(f, ba)?;
            let tg = embed(g, bb)?;
            let cyc = convolve(&tf, &tg)?;
            // Extract [0, out_shape) from the padded torus.
            let out_lo: Vec<i64> = ba.lo.iter().zip(&bb.lo).map(|(a, b)| a + b).collect();
            let cyc_st = strides(&pad);
            let out_st = strides(&out_shape);
            let out_total: usize = out_shape.iter().product();
            let mut out_values = vec![Complex64::new(0.0, 0.0); out_total];
            for (idx, slot) in out_values.iter_mut().enumerate() {
                let mut rem = idx;
                let mut src = 0usize;
                for k in 0..n {
                    let c = rem / out_st[k];
                    rem %= out_st[k];
                    src += c * cyc_st[k];
                }
                *slot = cyc.values[src];
            }
            LatticeFunction::new(
                Domain::Box(BoxSupport {
                    lo: out_lo,
                    shape: out_shape,
                }),
                out_values,
            )
        }
        _ => Err(Error::InvalidParameter {
            what: "convolve",
            details: "operands must both be boxes or both tori".into(),
        }),
    }
}

/// Reference convolution by direct summation (O(N²)); kept as the oracle for
/// the FFT path.
pub fn convolve_direct(f: &LatticeFunction, g: &LatticeFunction) -> Result<LatticeFunction> {
    match (f.domain(), g.domain()) {
        (Domain::Torus { sizes: a }, Domain::Torus { sizes: b }) => {
            if a != b {
                return Err(Error::InvalidParameter {
                    what: "convolve",
                    details: "torus sizes must agree".into(),
                });
            }
            let sizes = a.clone();
            let points: Vec<(Vec<i64>, Complex64)> = f.iter_points().collect();
            LatticeFunction::from_fn_torus(&sizes, |coords| {
                let x: Vec<i64> = coords.iter().map(|&c| c as i64).collect();
                let mut acc = Complex64::new(0.0, 0.0);
                for (y, fy) in &points {
                    let shifted: Vec<i64> = x.iter().zip(y).map(|(xi, yi)| xi - yi).collect();
                    acc += fy * g.get(&shifted);
                }
                acc
            })
        }
        (Domain::Box(ba), Domain::Box(bb)) => {
            if ba.shape.len() != bb.shape.len() {
                return Err(Error::DimensionMismatch {
                    expected: ba.shape.len(),
                    actual: bb.shape.len(),
                });
            }
            let n = ba.shape.len();
            let out_lo: Vec<i64> = ba.lo.iter().zip(&bb.lo).map(|(a, b)| a + b).collect();
            let out_shape: Vec<usize> = ba
                .shape
                .iter()
                .zip(&bb.shape)
                .map(|(a, b)| a + b - 1)
                .collect();
            let f_points: Vec<(Vec<i64>, Complex64)> = f.iter_points().collect();
            let _ = n;
            LatticeFunction::from_fn_box(&out_lo, &out_shape, |x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (y, fy) in &f_points {
                    let shifted: Vec<i64> = x.iter().zip(y).map(|(xi, yi)| xi - yi).collect();
                    acc += fy * g.get(&shifted);
                }
                acc
            })
        }
        _ => Err(Error::InvalidParameter {
            what: "convolve",
            details: "operands must both be boxes or both tori".into(),
        }),
    }
}

/// Translation on the torus: `(τ_s f)(x) = f(x − s)`.
pub fn translate_torus(f: &LatticeFunction, shift: &[i64]) -> Result<LatticeFunction> {
    let sizes = match f.domain() {
        Domain::Torus { sizes } => sizes.clone(),
        Domain::Box(_) => {
            return Err(Error::InvalidParameter {
                what: "translate",
                details: "translation requires a torus support".into(),
            })
        }
    };
    if shift.len() != sizes.len() {
        return Err(Error::DimensionMismatch {
            expected: sizes.len(),
            actual: shift.len(),
        });
    }
    LatticeFunction::from_fn_torus(&sizes, |coords| {
        let point: Vec<i64> = coords
            .iter()
            .zip(shift)
            .map(|(&c, &s)| c as i64 - s)
            .collect();
        f.get(&point)
    })
}

/// Flat serialization record for a [`LatticeFunction`]: domain plus row-major
/// `(re, im)` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub dim: usize,
    pub domain: Domain,
    pub values: Vec<(f64, f64)>,
}

impl LatticeFunction {
    pub fn to_record(&self) -> LatticeRecord {
        LatticeRecord {
            dim: self.dim(),
            domain: self.domain.clone(),
            values: self.values.iter().map(|v| (v.re, v.im)).collect(),
        }
    }

    pub fn from_record(rec: &LatticeRecord) -> Result<Self> {
        if rec.domain.dim() != rec.dim {
            return Err(Error::DimensionMismatch {
                expected: rec.dim,
                actual: rec.domain.dim(),
            });
        }
        LatticeFunction::new(
            rec.domain.clone(),
            rec.values
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }
}
