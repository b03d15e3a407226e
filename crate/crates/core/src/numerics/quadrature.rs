//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands of a real
//! variable, with a rational map for the half line and a partition plus
//! Wynn-ε scheme for oscillatory tails.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

// 21-point Kronrod abscissae (positive half, last is the centre) and weights.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_478_905,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// 10-point Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and work limit for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions == 0 {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances rel={rel_tol}, abs={abs_tol}, max_subdivisions={max_subdivisions}"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2000,
        }
    }
}

/// Integral estimate with an error bound and the number of integrand calls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for i in 0..10 {
        let dx = half * XGK[i];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    (value, error)
}

/// Globally adaptive integration of `f` over `[a, b]`.
///
/// The panel error is the Kronrod–Gauss difference, which bounds the error of
/// the (more accurate) Kronrod value in practice.
pub fn integrate<F>(mut f: F, a: f64, b: f64, config: &QuadratureConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    let (value, error) = gk21(&mut f, a, b);
    let mut total = value;
    let mut total_err = error;
    let mut evaluations = 21;
    heap.push(Panel { a, b, value, error });
    let mut subdivisions = 1;
    while total_err > config.target(total) {
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: f64::INFINITY,
            });
        }
        if subdivisions >= config.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: total_err,
            });
        }
        let worst = heap.pop().expect("heap holds every panel");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = gk21(&mut f, worst.a, mid);
        let (v2, e2) = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        subdivisions += 1;
        total += v1 + v2 - worst.value;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        // re-sum to keep rounding drift out of the stopping test
        total_err = heap.iter().map(|p| p.error).sum();
    }
    let value: Complex64 = heap.iter().map(|p| p.value).sum();
    Ok(Estimate {
        value,
        error: total_err,
        evaluations,
    })
}

/// Integral of `f` over `[0, ∞)` through the map `x = t / (1 - t)`.
///
/// Suits integrands with algebraic or exponential decay; use
/// [`integrate_half_line_oscillatory`] for slowly decaying oscillations.
pub fn integrate_half_line<F>(mut f: F, config: &QuadratureConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    integrate(
        |t| {
            let s = 1.0 - t;
            f(t / s) / (s * s)
        },
        0.0,
        1.0,
        config,
    )
}

/// Integral of an oscillatory `f` over `[0, ∞)`.
///
/// The half line is cut into panels of length `half_period`; the partial sums
/// are accelerated with Wynn's ε algorithm until two successive
/// extrapolations agree within the tolerance.
pub fn integrate_half_line_oscillatory<F>(
    mut f: F,
    half_period: f64,
    config: &QuadratureConfig,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Complex64,
{
    if !(half_period > 0.0) || !half_period.is_finite() {
        return Err(Error::InvalidInput("half_period must be positive".into()));
    }
    let panel_cfg = QuadratureConfig {
        rel_tol: config.rel_tol * 0.1,
        abs_tol: config.abs_tol * 0.01,
        max_subdivisions: config.max_subdivisions,
    };
    let mut partial = Complex64::new(0.0, 0.0);
    let mut panel_err = 0.0;
    let mut evaluations = 0;
    let mut wynn = Wynn::default();
    let mut previous: Option<Complex64> = None;
    let max_panels = config.max_subdivisions.max(10);
    for k in 0..max_panels {
        let a = k as f64 * half_period;
        let est = integrate(&mut f, a, a + half_period, &panel_cfg)?;
        partial += est.value;
        panel_err += est.error;
        evaluations += est.evaluations;
        let extrapolated = wynn.push(partial);
        if let Some(prev) = previous {
            let change = (extrapolated - prev).norm();
            let bound = change + panel_err;
            if k >= 4 && change <= 0.5 * config.target(extrapolated) {
                return Ok(Estimate {
                    value: extrapolated,
                    error: bound,
                    evaluations,
                });
            }
        }
        previous = Some(extrapolated);
    }
    let estimate = previous.unwrap_or(partial);
    Err(Error::Accuracy {
        estimate,
        error_bound: f64::INFINITY,
    })
}

/// Wynn's ε algorithm, fed one partial sum at a time.
#[derive(Default)]
struct Wynn {
    // last diagonal of the ε table: row[j] = ε_j for the newest entry
    row: Vec<Complex64>,
}

impl Wynn {
    fn push(&mut self, s: Complex64) -> Complex64 {
        let mut new_row = Vec::with_capacity(self.row.len() + 1);
        new_row.push(s);
        let zero = Complex64::new(0.0, 0.0);
        for j in 0..self.row.len() {
            // ε_{j+1}^{(n)} = ε_{j-1}^{(n+1)} + 1/(ε_j^{(n+1)} - ε_j^{(n)})
            let below = if j == 0 { zero } else { self.row[j - 1] };
            let diff = new_row[j] - self.row[j];
            if diff.norm() == 0.0 {
                break;
            }
            new_row.push(below + 1.0 / diff);
        }
        self.row = new_row;
        // even columns hold the extrapolations; take the deepest one
        let last_even = (self.row.len() - 1) / 2 * 2;
        self.row[last_even]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(rel: f64) -> QuadratureConfig {
        QuadratureConfig::new(rel, 0.0, 500).unwrap()
    }

    #[test]
    fn kronrod_rule_is_exact_for_degree_31() {
        // single panel on [-1, 1]
        for n in 0..=31 {
            let mut f = |x: f64| Complex64::new(x.powi(n), 0.0);
            let (value, _) = gk21(&mut f, -1.0, 1.0);
            let exact = if n % 2 == 1 { 0.0 } else { 2.0 / (n as f64 + 1.0) };
            assert!((value.re - exact).abs() < 1e-14, "degree {n}: {}", value.re);
        }
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        let s: f64 = WG.iter().sum::<f64>() * 2.0;
        let k: f64 = WGK[..10].iter().sum::<f64>() * 2.0 + WGK[10];
        assert!((s - 2.0).abs() < 1e-15);
        assert!((k - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exponential_half_line() {
        let est = integrate_half_line(|x| Complex64::new((-x).exp(), 0.0), &cfg(1e-12)).unwrap();
        let err = (est.value.re - 1.0).abs();
        assert!(err < 1e-12);
        assert!(est.error >= err);
    }

    #[test]
    fn lorentzian_half_line() {
        let est = integrate_half_line(|x| Complex64::new(1.0 / (1.0 + x * x), 0.0), &cfg(1e-12)).unwrap();
        let err = (est.value.re - PI / 2.0).abs();
        assert!(err < 1e-12 * PI);
        assert!(est.error >= err);
    }

    #[test]
    fn sinc_half_line() {
        let sinc = |x: f64| Complex64::new(if x == 0.0 { 1.0 } else { x.sin() / x }, 0.0);
        let est = integrate_half_line_oscillatory(sinc, PI, &cfg(1e-10)).unwrap();
        let err = (est.value.re - PI / 2.0).abs();
        assert!(err < 1e-8, "error {err}");
        assert!(est.error >= err);
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^π e^{ix} dx = 2i
        let est = integrate(|x| Complex64::new(0.0, x).exp(), 0.0, PI, &cfg(1e-13)).unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let tight = QuadratureConfig::new(1e-15, 0.0, 2).unwrap();
        let r = integrate(|x| Complex64::new(x.abs().sqrt(), 0.0), -1.0, 1.0, &tight);
        match r {
            Err(Error::Accuracy { estimate, error_bound }) => {
                assert!((estimate.re - 4.0 / 3.0).abs() < 1e-2);
                assert!(error_bound > 0.0);
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::new(0.0, 0.0, 10).is_err());
        assert!(QuadratureConfig::new(1e-6, -1.0, 10).is_err());
        assert!(QuadratureConfig::new(1e-6, 0.0, 0).is_err());
    }
}
