//! The experiment implementations.  Each takes its parameter struct and
//! returns an [`Outcome`]; parameter ranges that produce no assertions at
//! all yield a vacuous (flagged) pass.

use std::f64::consts::TAU;

use modmax_core::arithmetic::{denominator_class, Modulation, RationalVector, ReducedRational};
use modmax_core::decay::DecayTable;
use modmax_core::expsum::{
    complete_sum, weyl_sum, CompleteSumSpec, ConvexRegion, WeightRule, WeylSumSpec,
};
use modmax_core::kernels::{builtin_kernel, chi_sm_support_radius, cutoff_chi_sm, tail_l1_norm};
use modmax_core::lattice::{idft, Domain, LatticeFunction};
use modmax_core::multiplier::{approx_residual, arc_multiplier, error_term, sharp_multiplier};
use modmax_core::operator::{
    exceptional_set, norm_ratio_table, parabola_partial_fourier_residual, rademacher_menshov_rhs,
    ModulationField, NormRatioConfig, OperatorKind,
};
use modmax_core::phase::unit_phase;
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::*;
use crate::error::{Error, Result};
use crate::plot::PlotStyle;
use crate::report::{Assertion, Outcome};

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let ray = (-2.0 * u1.ln()).sqrt();
    Complex64::new(ray * (TAU * u2).cos(), ray * (TAU * u2).sin())
}

/// Parses a modulation given as an integer, a fraction "a/b", or a decimal.
pub fn parse_modulation(text: &str) -> Result<Modulation> {
    let t = text.trim();
    if let Some((a, b)) = t.split_once('/') {
        let num: i64 = a.trim().parse().map_err(|_| Error::InvalidParameter {
            what: "modulation",
            details: format!("bad numerator in {t:?}"),
        })?;
        let den: i64 = b.trim().parse().map_err(|_| Error::InvalidParameter {
            what: "modulation",
            details: format!("bad denominator in {t:?}"),
        })?;
        return Ok(Modulation::Rational(ReducedRational::new(num, den)?));
    }
    if let Ok(k) = t.parse::<i64>() {
        return Ok(Modulation::Rational(ReducedRational::new(k, 1)?));
    }
    let v: f64 = t.parse().map_err(|_| Error::InvalidParameter {
        what: "modulation",
        details: format!("{t:?} is neither a fraction nor a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::InvalidParameter {
            what: "modulation",
            details: "must be finite".into(),
        });
    }
    Ok(Modulation::Real(v))
}

fn parse_kind(text: &str) -> Result<OperatorKind> {
    for kind in [
        OperatorKind::Carleson,
        OperatorKind::SingleLambda,
        OperatorKind::VariableParabola,
    ] {
        if kind.label() == text {
            return Ok(kind);
        }
    }
    Err(Error::InvalidParameter {
        what: "operator kind",
        details: format!(
            "{text:?}; choices: carleson-sup, single-modulation, variable-parabola"
        ),
    })
}

// -- gauss-vanishing ----------------------------------------------------------

pub fn gauss_vanishing(p: &GaussVanishingParams) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    for &d in &p.d_values {
        let mut table = DecayTable::new(
            format!("complete-sum max modulus on shared-factor sweep (d = {d})"),
            "q",
        );
        let mut checked = 0u64;
        let mut worst = 0.0f64;
        for q in 2..=p.q_max {
            let mut q_worst = 0.0f64;
            for a in 0..q {
                if a.gcd(&q) <= 1 {
                    continue;
                }
                for b in 0..q {
                    if a.gcd(&b).gcd(&q) != 1 {
                        continue;
                    }
                    let s = complete_sum(&CompleteSumSpec::new(a, vec![b], q, d)?);
                    q_worst = q_worst.max(s.norm());
                    checked += 1;
                }
            }
            table.push(q as f64, q_worst, q_worst, None);
        }
        worst = worst.max(
            table
                .rows
                .iter()
                .map(|r| r.raw)
                .fold(0.0f64, f64::max),
        );
        outcome.tables.push((table, PlotStyle::LogLinear));
        if checked > 0 {
            outcome.assertions.push(Assertion::new(
                format!("complete sums vanish (d = {d})"),
                worst < p.tolerance,
                format!("{checked} sums, max modulus {worst:.3e} vs tolerance {:.1e}", p.tolerance),
            ));
        }
    }
    Ok(outcome)
}

// -- weyl-decay ----------------------------------------------------------------

pub fn weyl_decay(p: &WeylDecayParams) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let mut table = DecayTable::new(
        format!("weyl sum |S_R|/R, quadratic coefficient {}", p.coefficient),
        "R",
    );
    let mut first = None;
    for &r in &p.radii {
        let spec = WeylSumSpec {
            dim: 1,
            degree: p.degree,
            coeffs: vec![(vec![p.degree], p.coefficient)],
            radius: r,
            weight: WeightRule::One,
            region: ConvexRegion::ball(r),
        };
        let ratio = weyl_sum(&spec)?.norm() / r;
        let base = *first.get_or_insert(ratio);
        table.push(r, ratio, ratio / base, None);
    }
    if table.rows.len() >= 2 {
        table.fit_power_law();
        let drop = table.rows.first().unwrap().raw / table.rows.last().unwrap().raw;
        outcome.assertions.push(Assertion::new(
            "normalized modulus drops across the radius sweep",
            drop >= p.min_drop,
            format!(
                "|S|/R fell {drop:.2}x from R = {} to R = {}, required {}x",
                p.radii.first().unwrap(),
                p.radii.last().unwrap(),
                p.min_drop
            ),
        ));
    }
    outcome.tables.push((table, PlotStyle::LogLog));
    Ok(outcome)
}

// -- multiplier-approx ------------------------------------------------------------

pub fn multiplier_approx(p: &MultiplierApproxParams) -> Result<Outcome> {
    let kernel = builtin_kernel(&p.kernel, 1)?;
    let mut outcome = Outcome::default();
    let mut table = DecayTable::new(
        "single-arc approximation constant (neighbor-center samples)",
        "j",
    );
    let mut first = None;
    for j in p.j_min..=p.j_max {
        let q_cap = p.q_cap.min(1i64 << (j.saturating_sub(2)).min(62));
        let mut c_j = 0.0f64;
        for q in 2..=q_cap {
            for a in (1..q).filter(|a| a.gcd(&q) == 1).take(2) {
                for b in [0i64, 1] {
                    for &w in &p.widths {
                        let bvec = RationalVector::new(vec![b], q)?;
                        let lambda = Modulation::Real(a as f64 / q as f64);
                        let delta = 1.0 / q as f64;
                        let xi = [(b + 1) as f64 / q as f64 - w * (2.0f64).powi(-(j as i32))];
                        let (residual, q_delta) =
                            approx_residual(j, &lambda, &xi, a, &bvec, delta, &kernel, 1, p.tol)?;
                        c_j = c_j.max(residual / q_delta);
                    }
                }
            }
        }
        let base = *first.get_or_insert(c_j);
        table.push(j as f64, c_j, c_j / base, None);
    }
    if table.rows.len() >= 2 {
        let max_c = table.rows.iter().map(|r| r.raw).fold(0.0f64, f64::max);
        let min_c = table.rows.iter().map(|r| r.raw).fold(f64::INFINITY, f64::min);
        outcome.assertions.push(Assertion::new(
            "fitted constant is scale-stable",
            min_c > 0.01 && max_c / min_c < p.spread_max,
            format!(
                "constants span [{min_c:.5}, {max_c:.5}], spread x{:.5} vs limit x{}",
                max_c / min_c,
                p.spread_max
            ),
        ));
    }
    outcome.tables.push((table, PlotStyle::LogLinear));
    Ok(outcome)
}

// -- error-decay --------------------------------------------------------------------

pub fn error_decay(p: &ErrorDecayParams) -> Result<Outcome> {
    let kernel = builtin_kernel(&p.kernel, 1)?;
    let mut outcome = Outcome::default();
    for lam_text in &p.lambdas {
        let lambda = parse_modulation(lam_text)?;
        let mut table = DecayTable::new(
            format!("error-term sup on {}-point grid, λ = {lam_text}", p.grid),
            "j",
        );
        for j in p.j_min..=p.j_max {
            let mut sup = 0.0f64;
            for k in 0..p.grid {
                let xi = [k as f64 / p.grid as f64];
                sup = sup.max(error_term(j, &lambda, p.m_exp, &xi, &kernel, 1, p.tol)?.norm());
            }
            table.push(j as f64, sup, sup, None);
        }
        if let Some(fit) = table.fit_exponential_in_param() {
            let (rate, r2) = (fit.exponent, fit.r_squared);
            outcome.assertions.push(Assertion::new(
                format!("error term decays log-linearly (λ = {lam_text})"),
                rate > p.min_rate && r2 > p.min_r_squared,
                format!("rate {rate:.3} (need > {}), R² {r2:.3} (need > {})", p.min_rate, p.min_r_squared),
            ));
        }
        outcome.tables.push((table, PlotStyle::LogLinear));
    }
    Ok(outcome)
}

// -- kernel-identity -----------------------------------------------------------------

/// Smooth test symbol oscillating ~0.2 cycles across the cutoff support.
fn test_symbol(w: f64, u: f64) -> Complex64 {
    Complex64::new((TAU * w * u).cos() + 0.5, (TAU * w * u).sin())
}

/// ∫ m(u)·χ_{s,M}(u)·e(uy) du by composite Simpson over the cutoff support.
fn continuum_side(s: u32, m_exp: f64, w: f64, y: i64, rad: f64) -> Result<Complex64> {
    let panels = 4096usize;
    let h = 2.0 * rad / panels as f64;
    let f = |u: f64| -> Result<Complex64> {
        let chi = cutoff_chi_sm(s, m_exp, &[u])?;
        if chi == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(test_symbol(w, u) * chi * unit_phase(u * y as f64))
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let a = -rad + i as f64 * h;
        acc += (f(a)? + f(a + h)? + 4.0 * f(a + 0.5 * h)?) * (h / 6.0);
    }
    Ok(acc)
}

/// Per-class sampled reduced rationals and the dual-grid size that keeps the
/// sampling aliasing of the compactly supported smooth symbol below 1e−7.
fn class_samples(s: u32) -> Result<(usize, &'static [(i64, i64)])> {
    match s {
        1 => Ok((1 << 16, &[(0, 1)])),
        2 => Ok((1 << 18, &[(1, 2), (1, 3), (2, 3)])),
        3 => Ok((1 << 21, &[(1, 4), (3, 5), (2, 7)])),
        _ => Err(Error::InvalidParameter {
            what: "denominator class",
            details: format!("sampled classes are 1..=3, got {s}"),
        }),
    }
}

pub fn kernel_identity(p: &KernelIdentityParams) -> Result<Outcome> {
    if p.y_max < 1 || p.y_max > 1 << 14 {
        return Err(Error::InvalidParameter {
            what: "y_max",
            details: "need 1 ≤ y_max ≤ 16384".into(),
        });
    }
    let mut outcome = Outcome::default();
    let mut table = DecayTable::new("lattice/continuum kernel-identity deviation", "s");
    for &s in &p.s_values {
        let (grid, alphas) = class_samples(s)?;
        let rad = chi_sm_support_radius(s, p.m_exp)?;
        let w = 0.2 / rad;
        let mut worst = 0.0f64;
        for &(num, den) in alphas {
            let alpha = ReducedRational::new(num, den)?;
            debug_assert_eq!(denominator_class(&alpha), s);
            let msym = |u: &[f64]| Ok(test_symbol(w, u[0]));
            let mut values = Vec::with_capacity(grid);
            for k in 0..grid {
                let xi = [k as f64 / grid as f64];
                values.push(arc_multiplier(s, &alpha, p.m_exp, msym, &xi, 1)?);
            }
            let dual = LatticeFunction::new(Domain::Torus { sizes: vec![grid] }, values)?;
            let lattice = idft(&dual)?;
            for y in -p.y_max..=p.y_max {
                let idx = y.rem_euclid(grid as i64);
                let got = lattice.get(&[idx]);
                let phase = unit_phase(alpha.times_int_mod1((y * y) as i128));
                let want = phase * continuum_side(s, p.m_exp, w, y, rad)?;
                worst = worst.max((got - want).norm());
            }
        }
        table.push(s as f64, worst, worst, None);
        outcome.assertions.push(Assertion::new(
            format!("kernel identity holds (s = {s})"),
            worst < p.tolerance,
            format!(
                "max deviation {worst:.3e} over |y| ≤ {} and {} sampled α, tolerance {:.1e}",
                p.y_max,
                alphas.len(),
                p.tolerance
            ),
        ));
        outcome.push_extra(&format!("dual_grid_s{s}"), grid);
    }
    outcome.tables.push((table, PlotStyle::LogLinear));
    Ok(outcome)
}

// -- factorization ---------------------------------------------------------------------

pub fn factorization(p: &FactorizationParams) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut table = DecayTable::new("arc-multiplier factorization deviation", "s");
    for &s in &p.s_values {
        let (_, alphas) = class_samples(s)?;
        let rad = chi_sm_support_radius(s, p.m_exp)?;
        let w = 0.2 / rad;
        let mut worst = 0.0f64;
        let mut checked = 0u64;
        for &(num, den) in alphas {
            let alpha = ReducedRational::new(num, den)?;
            let msym = |u: &[f64]| Ok(test_symbol(w, u[0]));
            let mone = |_: &[f64]| Ok(Complex64::new(1.0, 0.0));
            for i in 0..p.samples {
                // Bias most samples into and around the arcs: uniform ξ
                // almost always lands where every factor is exactly zero.
                let xi = if i % 10 < 3 {
                    rng.gen::<f64>()
                } else {
                    let b = rng.gen_range(0..den);
                    let u = (rng.gen::<f64>() - 0.5) * 4.4 * rad;
                    (b as f64 / den as f64 + u).rem_euclid(1.0)
                };
                let lhs = arc_multiplier(s, &alpha, p.m_exp, msym, &[xi], 1)?;
                let unit = arc_multiplier(s, &alpha, p.m_exp, mone, &[xi], 1)?;
                let sharp = sharp_multiplier(s, msym, &[xi], p.m_exp)?;
                worst = worst.max((lhs - unit * sharp).norm());
                checked += 1;
            }
        }
        table.push(s as f64, worst, worst, None);
        if checked > 0 {
            outcome.assertions.push(Assertion::new(
                format!("factorization is pointwise exact (s = {s})"),
                worst < p.tolerance,
                format!("{checked} samples, max deviation {worst:.3e}, tolerance {:.1e}", p.tolerance),
            ));
        }
    }
    outcome.tables.push((table, PlotStyle::LogLinear));
    Ok(outcome)
}

// -- carleson-norm ----------------------------------------------------------------------

pub fn carleson_norm(p: &CarlesonNormParams) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    if p.sizes.is_empty() {
        return Ok(outcome);
    }
    let kind = parse_kind(&p.kind)?;
    let kernel = builtin_kernel(&p.kernel, 1)?;
    let cfg = NormRatioConfig {
        j_trunc: p.j_trunc,
        d: p.d,
        epsilon: p.epsilon,
        lambda: p.lambda,
        parabola_bound: p.parabola_bound,
    };
    let table = norm_ratio_table(kind, &kernel, &p.sizes, p.p, p.trials, p.seed, &cfg)?;
    let growth_ok = table
        .rows
        .iter()
        .all(|r| r.normalized.is_finite() && r.normalized > 0.0);
    outcome.assertions.push(Assertion::new(
        "per-doubling growth factors are finite and positive",
        growth_ok,
        format!(
            "factors: {}",
            table
                .rows
                .iter()
                .map(|r| format!("N={}: {:.4}", r.param, r.normalized))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ));
    if p.verify_determinism {
        let again = norm_ratio_table(kind, &kernel, &p.sizes, p.p, p.trials, p.seed, &cfg)?;
        outcome.assertions.push(Assertion::new(
            "table reproduces byte-identically under the fixed seed",
            table.to_csv() == again.to_csv(),
            format!("{} CSV bytes", table.to_csv().len()),
        ));
    }
    // The ℓ¹ mass the truncation discards over the next three octaves: the
    // bound on how much any input supported there could still contribute.
    let from = (2.0f64).powi(p.j_trunc as i32);
    let to = from * 8.0;
    let tail = tail_l1_norm(&kernel, from, to)?;
    outcome.push_extra("truncation_tail_l1_from_radius", from);
    outcome.push_extra("truncation_tail_l1_to_radius", to);
    outcome.push_extra("truncation_tail_l1_bound", tail);
    outcome.tables.push((table, PlotStyle::LogLog));
    Ok(outcome)
}

// -- ttstar-scan ---------------------------------------------------------------------------

pub fn ttstar_scan(p: &TtstarScanParams) -> Result<Outcome> {
    let kernel = builtin_kernel(&p.kernel, 1)?;
    let lam = ModulationField::constant(p.lambda)?;
    let mut outcome = Outcome::default();
    let mut table = DecayTable::new("exceptional-set cardinality scan", "j");
    for j in p.j_min..=p.j_max {
        let set = exceptional_set(j, &lam, p.kappa, p.c0, p.delta0, &kernel, 1)?;
        let q_limit = 2.0 * (j as f64).powf(p.delta0);
        let mut certificates_ok = true;
        let mut flagged = 0usize;
        for m in &set.members {
            certificates_ok &= m.approx_den >= 1
                && m.approx_den <= set.dirichlet_scale
                && m.approx_distance <= 1.0 / (set.dirichlet_scale as f64 + 1.0) + 1e-12
                && m.flagged == ((m.approx_den as f64) > q_limit);
            flagged += m.flagged as usize;
        }
        let ratio = set.cardinality as f64 / (1u64 << j) as f64;
        table.push(j as f64, set.cardinality as f64, ratio, None);
        outcome.assertions.push(Assertion::new(
            format!("dirichlet certificates valid (j = {j})"),
            certificates_ok,
            format!(
                "{} members, {flagged} flagged, denominator scale {}, |E|/2^j = {ratio:.2}",
                set.cardinality, set.dirichlet_scale
            ),
        ));
        let mut export = set.clone();
        export.members.truncate(p.max_members);
        let mut rendered =
            serde_json::to_string_pretty(&export).expect("exceptional set serialize");
        rendered.push('\n');
        outcome
            .artifacts
            .push((format!("exceptional-set-j{j}.json"), rendered));
    }
    outcome.push_extra("max_members_per_export", p.max_members);
    outcome.tables.push((table, PlotStyle::LogLinear));
    Ok(outcome)
}

// -- parabola-fourier -------------------------------------------------------------------------

pub fn parabola_fourier(p: &ParabolaFourierParams) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    let mut table = DecayTable::new("parabolic partial-Fourier residual", "field");
    let mut worst = 0.0f64;
    for k in 0..p.fields {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed.wrapping_add(k));
        let f = LatticeFunction::from_fn_torus(&[p.n1, p.n2], |_| gaussian(&mut rng))?;
        let mut row = vec![0.0f64; p.n1];
        for r in row.iter_mut() {
            *r = rng.gen_range(-p.coeff_bound..=p.coeff_bound) as f64;
        }
        let v = ModulationField::from_fn_torus(&[p.n1, p.n2], |c| row[c[0]])?
            .marked_x1_only()?;
        let residual = parabola_partial_fourier_residual(&f, &v, p.j_trunc)?;
        worst = worst.max(residual);
        table.push(k as f64, residual, residual, None);
    }
    if p.fields > 0 {
        outcome.assertions.push(Assertion::new(
            "partial-Fourier reduction is an identity",
            worst < p.tolerance,
            format!(
                "max residual {worst:.3e} over {} seeded fields, tolerance {:.1e}",
                p.fields, p.tolerance
            ),
        ));
    }
    outcome.tables.push((table, PlotStyle::LogLinear));
    Ok(outcome)
}

// -- rademacher-menshov -------------------------------------------------------------------------

pub fn rademacher_menshov(p: &RademacherMenshovParams) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    if p.sequences == 0 || p.r_values.is_empty() || p.s_max == 0 {
        return Ok(outcome);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut violations = 0u64;
    let mut checked = 0u64;
    // Per dyadic depth s, the largest observed max|a_j|/majorant: how close
    // the chaining bound comes to being attained.
    let mut tightness = vec![0.0f64; p.s_max as usize + 1];
    for _ in 0..p.sequences {
        let s = rng.gen_range(1u32..=p.s_max);
        let len = (1usize << s) + 1;
        let a: Vec<Complex64> = (0..len).map(|_| gaussian(&mut rng) * p.amplitude).collect();
        let j0 = rng.gen_range(0..len);
        let peak = a.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
        for &r in &p.r_values {
            let rhs = rademacher_menshov_rhs(&a, r, 0, j0)?;
            if peak > rhs {
                violations += 1;
            }
            if rhs > 0.0 {
                tightness[s as usize] = tightness[s as usize].max(peak / rhs);
            }
            checked += 1;
        }
    }
    let mut table = DecayTable::new("chaining majorant tightness max|a|/majorant", "s");
    for (s, &t) in tightness.iter().enumerate().skip(1) {
        if t > 0.0 {
            table.push(s as f64, t, t, None);
        }
    }
    outcome.assertions.push(Assertion::new(
        "majorant dominates every sequence value",
        violations == 0,
        format!("{checked} instances, {violations} violations (zero tolerance)"),
    ));
    outcome.tables.push((table, PlotStyle::LogLinear));
    Ok(outcome)
}
