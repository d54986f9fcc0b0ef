//! Adaptive Gauss–Kronrod quadrature on finite, semi-infinite and doubly
//! infinite intervals.
//!
//! Infinite limits are mapped onto `(0, 1]` with `x = a + (1 - t) / t`,
//! `dx = dt / t²`, and the transformed integrand is refined by global
//! adaptive bisection with a 7/15-point Gauss–Kronrod pair. Nodes never sit
//! on an interval endpoint, so the singular point `t = 0` is never evaluated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default relative tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Default budget of integrand evaluations.
pub const DEFAULT_MAX_EVALS: u64 = 1_000_000;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: u64,
}

/// Symmetry the caller asserts about an integrand on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetry {
    #[default]
    None,
    /// `f(x) == f(-x)`; only the half line `[0, ∞)` is evaluated.
    Even,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: u64,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 0.0,
            max_evals: DEFAULT_MAX_EVALS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One Gauss–Kronrod 7/15 panel: `(kronrod, |kronrod - gauss|, ∫|f|)`.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).abs(), abs * half.abs())
}

impl Integrator {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Integrator {
            rel_tol,
            ..Integrator::default()
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 || self.abs_tol > 0.0) || self.rel_tol < 0.0 || self.abs_tol < 0.0
        {
            return Err(Error::domain(format!(
                "quadrature tolerances must be non-negative with one positive (rel {}, abs {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_evals < 15 {
            return Err(Error::domain("quadrature budget below one panel"));
        }
        Ok(())
    }

    /// Global adaptive bisection of `[a, b]`. `calls_per_eval` converts
    /// transformed-integrand calls into user-integrand calls.
    fn adapt<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        calls_per_eval: u64,
    ) -> Result<QuadratureResult> {
        self.check()?;
        let per_panel = 15 * calls_per_eval;
        let (value, error, abs) = gk15(&mut f, a, b);
        let mut evaluations = per_panel;
        let mut total = value;
        let mut total_err = error;
        let mut total_abs = abs;
        let mut heap = BinaryHeap::new();
        heap.push(Segment { a, b, value, error });

        loop {
            let target = self
                .abs_tol
                .max(self.rel_tol * total.abs())
                .max(50.0 * f64::EPSILON * total_abs);
            if !total.is_finite() {
                return Err(Error::Divergence {
                    partial: QuadratureResult {
                        value: total,
                        abs_error: f64::INFINITY,
                        evaluations,
                    },
                });
            }
            if total_err <= target {
                return Ok(QuadratureResult {
                    value: total,
                    abs_error: total_err,
                    evaluations,
                });
            }
            let worst = match heap.pop() {
                Some(s) => s,
                None => unreachable!("segment heap never drains"),
            };
            let mid = 0.5 * (worst.a + worst.b);
            if evaluations + 2 * per_panel > self.max_evals || mid <= worst.a || mid >= worst.b {
                heap.push(worst);
                return Err(Error::Divergence {
                    partial: QuadratureResult {
                        value: total,
                        abs_error: total_err,
                        evaluations,
                    },
                });
            }
            let (lv, le, la) = gk15(&mut f, worst.a, mid);
            let (rv, re, ra) = gk15(&mut f, mid, worst.b);
            evaluations += 2 * per_panel;
            total += lv + rv - worst.value;
            total_err += le + re - worst.error;
            // panel abs estimates are only used as a roundoff floor
            total_abs = total_abs.max(la + ra);
            heap.push(Segment {
                a: worst.a,
                b: mid,
                value: lv,
                error: le,
            });
            heap.push(Segment {
                a: mid,
                b: worst.b,
                value: rv,
                error: re,
            });
            // keep the running sums from drifting after many updates
            if heap.len() % 1024 == 0 {
                total = heap.iter().map(|s| s.value).sum();
                total_err = heap.iter().map(|s| s.error).sum();
            }
        }
    }

    /// `∫_a^b f`.
    pub fn interval<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<QuadratureResult> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("finite interval required"));
        }
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                abs_error: 0.0,
                evaluations: 1,
            });
        }
        if a > b {
            let r = self.adapt(&f, b, a, 1)?;
            return Ok(QuadratureResult {
                value: -r.value,
                ..r
            });
        }
        self.adapt(&f, a, b, 1)
    }

    /// `∫_a^∞ f`.
    pub fn upper_tail<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<QuadratureResult> {
        if !a.is_finite() {
            return Err(Error::domain("finite lower limit required"));
        }
        let g = |t: f64| {
            let fx = f(a + (1.0 - t) / t);
            if fx == 0.0 {
                0.0
            } else {
                fx / (t * t)
            }
        };
        self.adapt(g, 0.0, 1.0, 1)
    }

    /// `∫_{-∞}^{∞} f`.
    pub fn real_line<F: Fn(f64) -> f64>(
        &self,
        f: F,
        symmetry: Symmetry,
    ) -> Result<QuadratureResult> {
        match symmetry {
            Symmetry::Even => {
                let half = self.upper_tail(&f, 0.0)?;
                Ok(QuadratureResult {
                    value: 2.0 * half.value,
                    abs_error: 2.0 * half.abs_error,
                    evaluations: half.evaluations,
                })
            }
            Symmetry::None => {
                let g = |t: f64| {
                    let x = (1.0 - t) / t;
                    let fx = f(x) + f(-x);
                    if fx == 0.0 {
                        0.0
                    } else {
                        fx / (t * t)
                    }
                };
                self.adapt(g, 0.0, 1.0, 2)
            }
        }
    }
}

/// `∫_{-∞}^{∞} g` to relative tolerance `tol`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(
    g: F,
    tol: f64,
    symmetry: Symmetry,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    Integrator::with_rel_tol(tol).real_line(g, symmetry)
}

/// `∫_a^b g` to relative tolerance `tol`.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    g: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    Integrator::with_rel_tol(tol).interval(g, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pathological(y: f64) -> f64 {
        (1.0 + y.abs()).powi(3) * (-y.powi(4)).exp()
    }

    #[test]
    fn pathological_density_mass() {
        let r = integrate_real_line(pathological, 1e-10, Symmetry::Even).unwrap();
        assert!((r.value - 6.809611).abs() < 1e-5, "{}", r.value);
        assert!(r.abs_error >= 0.0);
        assert!(r.evaluations >= 1);
    }

    #[test]
    fn laplace_kernel() {
        let r = integrate_real_line(|y: f64| (-y.abs()).exp(), 1e-10, Symmetry::None).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn gaussian_kernel() {
        let r = integrate_real_line(|y: f64| (-0.5 * y * y).exp(), 1e-10, Symmetry::None).unwrap();
        assert!((r.value - (2.0 * PI).sqrt()).abs() < 1e-9);
        assert!((r.value - 2.506_628_3).abs() < 1e-7);
    }

    #[test]
    fn even_shortcut_matches_full_line() {
        let full = integrate_real_line(pathological, 1e-12, Symmetry::None).unwrap();
        let half = integrate_real_line(pathological, 1e-12, Symmetry::Even).unwrap();
        assert!((full.value - half.value).abs() <= full.abs_error + half.abs_error + 1e-12);
    }

    #[test]
    fn odd_integrand_converges_to_zero() {
        let r = integrate_real_line(|y: f64| y * (-y * y).exp(), 1e-10, Symmetry::None).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn finite_interval_and_reversal() {
        let r = integrate_interval(|x: f64| x.sin(), 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = integrate_interval(|x: f64| x.sin(), PI, 0.0, 1e-12).unwrap();
        assert!((r.value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn divergent_integrand_reports_partial() {
        let integrator = Integrator {
            max_evals: 10_000,
            ..Integrator::default()
        };
        let err = integrator.upper_tail(|x: f64| 1.0 / (1.0 + x), 0.0).unwrap_err();
        match err {
            Error::Divergence { partial } => assert!(partial.evaluations <= 10_000),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(matches!(
            integrate_real_line(|x: f64| (-x * x).exp(), 0.0, Symmetry::None),
            Err(Error::Domain(_))
        ));
    }
}
