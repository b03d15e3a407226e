//! Integer-order Bessel functions of complex argument.
//!
//! The first-kind functions come from Miller's backward recurrence on the
//! ratios `J_k / J_{k-1}`, normalized with the generating-function sum
//! `J_0 + 2 Σ (-si)^k J_k = exp(-i s z)` where `s = sign(Im z)`. Every term of
//! that sum carries the same exponential growth, so the normalization does not
//! cancel for large `|Im z|`.
//!
//! `K_0` and `K_1` use the ascending series for `|w| <= 2` and Steed's
//! continued fraction (CF2) beyond, valid in the closed right half plane.
//! Hankel functions in the upper half plane follow from
//! `H_m(z) = (2/π) i^{-(m+1)} K_m(-iz)`; the lower half plane uses
//! Schwarz reflection of `Y`.
//!
//! Scaled variants carry the usual exponential factors:
//!
//! | function | scaled value |
//! |----------|--------------|
//! | J, Y     | `exp(-|Im z|) · f(z)` |
//! | H⁽¹⁾     | `exp(-i z) · H(z)` |
//! | I        | `exp(-|Re z|) · I(z)` |
//! | K        | `exp(z) · K(z)` |

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Largest order accepted by the public evaluators.
pub const MAX_ORDER: i32 = 60;
const MAX_EXPONENT: f64 = 700.0;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Cylinder functions of one order at one argument, with z-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderValues {
    pub j: Complex64,
    pub y: Complex64,
    pub h1: Complex64,
    pub dj: Complex64,
    pub dy: Complex64,
    pub dh1: Complex64,
}

/// Modified Bessel functions of one order at one argument, with z-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedValues {
    pub i: Complex64,
    pub k: Complex64,
    pub di: Complex64,
    pub dk: Complex64,
}

fn check_order(order: i32) -> Result<()> {
    if order.abs() > MAX_ORDER {
        return Err(Error::InvalidInput(format!(
            "Bessel order {order} outside |m| <= {MAX_ORDER}"
        )));
    }
    Ok(())
}

fn check_arg(z: Complex64) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Range(format!("non-finite Bessel argument {z}")));
    }
    if z.norm() > 1e4 {
        return Err(Error::Range(format!("Bessel argument {z} too large")));
    }
    Ok(())
}

fn unscale(value: Complex64, exponent: Complex64, what: &str) -> Result<Complex64> {
    if exponent.re > MAX_EXPONENT {
        return Err(Error::Range(format!("{what} overflows (exponent {:.1})", exponent.re)));
    }
    let out = value * exponent.exp();
    if !out.re.is_finite() || !out.im.is_finite() {
        return Err(Error::Range(format!("{what} overflows")));
    }
    Ok(out)
}

fn sign_parity(m: i32) -> f64 {
    if m % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Ratios `r[k] = J_k(z) / J_{k-1}(z)` for `k = 1..=n`; `r[0]` is unused.
///
/// Backward recurrence from well above `max(n, |z|)`, so the ratios belong to
/// the minimal solution of the three-term recurrence.
pub fn j_ratios(z: Complex64, n: usize) -> Vec<Complex64> {
    let start = miller_start(z, n);
    let mut out = vec![ZERO; n + 1];
    let mut r = z / (2.0 * (start + 1) as f64);
    for k in (1..=start).rev() {
        r = ONE / (Complex64::new(2.0 * k as f64, 0.0) / z - r);
        if k <= n {
            out[k] = r;
        }
    }
    out
}

fn miller_start(z: Complex64, n: usize) -> usize {
    let a = z.norm();
    let base = (n as f64).max(a);
    (base + 25.0 + 8.0 * a.cbrt()).ceil() as usize
}

/// Scaled first-kind values `exp(-|Im z|) J_k(z)` for `k = 0..=n`.
pub fn j_scaled_seq(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n + 1];
    if z.norm() == 0.0 {
        out[0] = ONE;
        return out;
    }
    let start = miller_start(z, n);
    let ratios = j_ratios(z, start);
    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    // coefficient (-s i)^k
    let step = Complex64::new(0.0, -s);
    let mut coef = ONE;
    let mut product = ONE;
    let mut sum = ONE;
    let mut products = Vec::with_capacity(n + 1);
    products.push(ONE);
    for (k, ratio) in ratios.iter().enumerate().skip(1) {
        product *= ratio;
        coef *= step;
        if k <= n {
            products.push(product);
        }
        if product.norm() < 1e-300 {
            if k >= n {
                break;
            }
            continue;
        }
        sum += 2.0 * coef * product;
    }
    while products.len() < n + 1 {
        products.push(ZERO);
    }
    let j0 = Complex64::new(0.0, -s * z.re).exp() / sum;
    for (k, p) in products.into_iter().enumerate() {
        out[k] = j0 * p;
    }
    out
}

/// Scaled modified values `exp(-|Re w|) I_k(w)` for `k = 0..=n`.
pub fn i_scaled_seq(w: Complex64, n: usize) -> Vec<Complex64> {
    // I_k(w) = i^{-k} J_k(i w), and |Im(i w)| = |Re w|.
    let js = j_scaled_seq(I * w, n);
    let mut phase = ONE;
    js.into_iter()
        .map(|v| {
            let out = v * phase;
            phase *= -I;
            out
        })
        .collect()
}

/// Scaled `exp(w) K_0(w)` and `exp(w) K_1(w)` for `Re w >= 0`, `w != 0`.
fn k01_scaled(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() <= 2.0 {
        let (k0, k1) = k01_series(w);
        let e = w.exp();
        (k0 * e, k1 * e)
    } else {
        k01_steed(w)
    }
}

fn k01_series(w: Complex64) -> (Complex64, Complex64) {
    let q = w * w / 4.0;
    let log_term = (w / 2.0).ln() + EULER_GAMMA;
    // I_0, I_1 and the digamma-weighted sums
    let mut term0 = ONE; // (q^k)/(k!)^2
    let mut i0 = ONE;
    let mut sum0 = ZERO; // Σ H_k q^k/(k!)^2
    let mut harmonic = 0.0;
    let mut term1 = ONE; // q^k/(k!(k+1)!)
    let mut i1_core = ONE;
    // ψ(k+1)+ψ(k+2) = 2H_k + 1/(k+1) - 2γ
    let mut sum1 = Complex64::new(1.0 - 2.0 * EULER_GAMMA, 0.0);
    for k in 1..200 {
        let kf = k as f64;
        term0 *= q / (kf * kf);
        term1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += term0;
        sum0 += term0 * harmonic;
        i1_core += term1;
        sum1 += term1 * (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if term0.norm() < 1e-18 * i0.norm() && term1.norm() < 1e-18 * i1_core.norm() {
            break;
        }
    }
    let i1 = w / 2.0 * i1_core;
    let k0 = -log_term * i0 + sum0;
    let k1 = ONE / w + i1 * (w / 2.0).ln() - w / 4.0 * sum1;
    (k0, k1)
}

// Steed's algorithm for K_0, K_1 (continued fraction CF2), scaled by exp(w).
fn k01_steed(w: Complex64) -> (Complex64, Complex64) {
    let mut b = 2.0 * (ONE + w);
    let mut d = ONE / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = ZERO;
    let mut q2 = ONE;
    let a1 = 0.25;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = Complex64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = ONE + q * delh;
    for i in 1..100_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = ONE / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() && delh.norm() < 1e-17 * h.norm() {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * w)).sqrt() / s;
    let k1 = k0 * (w + 0.5 - h) / w;
    (k0, k1)
}

/// Scaled `exp(w) K_k(w)` for `k = 0..=n`, `Re w >= 0`, `w != 0`.
///
/// Forward recurrence; `K` is the dominant solution in increasing order.
pub fn k_scaled_seq(w: Complex64, n: usize) -> Vec<Complex64> {
    let (k0, k1) = k01_scaled(w);
    let mut out = Vec::with_capacity(n + 1);
    out.push(k0);
    if n >= 1 {
        out.push(k1);
    }
    for k in 1..n {
        let next = out[k - 1] + 2.0 * k as f64 / w * out[k];
        out.push(next);
    }
    out
}

/// Scaled Hankel values `exp(-iz) H⁽¹⁾_k(z)` for `k = 0..=n`, `Im z >= 0`, `z != 0`.
pub fn h1_scaled_seq(z: Complex64, n: usize) -> Vec<Complex64> {
    // H_k(z) = (2/π) i^{-(k+1)} K_k(-iz); exp(-iz) H = (2/π) i^{-(k+1)} exp(-iz) K(-iz)
    let ks = k_scaled_seq(-I * z, n);
    let mut phase = -I; // i^{-1}
    ks.into_iter()
        .map(|k| {
            let out = FRAC_2_PI * phase * k;
            phase *= -I;
            out
        })
        .collect()
}

/// Ratios `r[k] = H_k(z) / H_{k-1}(z)` for `k = 1..=n` (`Im z >= 0`); `r[0]` unused.
pub fn h1_ratios(z: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n + 1];
    if n == 0 {
        return out;
    }
    let base = h1_scaled_seq(z, 1);
    out[1] = base[1] / base[0];
    for k in 1..n {
        out[k + 1] = Complex64::new(2.0 * k as f64, 0.0) / z - ONE / out[k];
    }
    out
}

/// Logarithmic derivative `Z_m'(z)/Z_m(z)` from ratios `r[k] = Z_k/Z_{k-1}`,
/// valid for any cylinder function obeying the standard recurrences.
pub fn log_derivative(ratios: &[Complex64], m: usize, z: Complex64) -> Complex64 {
    if m == 0 {
        -ratios[1]
    } else {
        ONE / ratios[m] - m as f64 / z
    }
}

/// Scaled `J`, `Y`, `H⁽¹⁾` for `k = 0..=n`, with the exponential exponents that
/// undo the scaling: `J = Js · exp(ej)` etc.
struct CylinderSeq {
    j: Vec<Complex64>,
    y: Vec<Complex64>,
    h: Vec<Complex64>,
    // exp(ej) multiplies j and y, exp(eh) multiplies h
    ej: Complex64,
    eh: Complex64,
}

fn cylinder_seq(z: Complex64, n: usize) -> CylinderSeq {
    if z.im < 0.0 {
        // reflect: J(z̄) = conj J(z), Y(z̄) = conj Y(z)
        let up = cylinder_seq(z.conj(), n);
        let j: Vec<_> = up.j.iter().map(|v| v.conj()).collect();
        let y: Vec<_> = up.y.iter().map(|v| v.conj()).collect();
        // H = J + iY, both carrying exp(|Im z|); rescale to exp(iz) convention
        let ej = Complex64::new(z.im.abs(), 0.0);
        let eh = I * z;
        let shift = (ej - eh).exp();
        let h = j.iter().zip(&y).map(|(a, b)| (a + I * b) * shift).collect();
        return CylinderSeq { j, y, h, ej, eh };
    }
    let j = j_scaled_seq(z, n);
    let h = h1_scaled_seq(z, n);
    let ej = Complex64::new(z.im, 0.0);
    let eh = I * z;
    // Y = (H - J)/i, expressed with the exp(|Im z|) scaling of J.
    let shift = (eh - ej).exp();
    let y = j.iter().zip(&h).map(|(jv, hv)| (hv * shift - jv) / I).collect();
    CylinderSeq { j, y, h, ej, eh }
}

/// `J_m`, `Y_m`, `H⁽¹⁾_m` and their derivatives at complex `z`, `|m| <= 60`.
///
/// `Y` and `H⁽¹⁾` are singular at the origin and return a range error there;
/// the branch cut of `Y` and `H⁽¹⁾` is the negative real axis, approached
/// from above.
pub fn bessel_cyl(order: i32, z: Complex64) -> Result<CylinderValues> {
    check_order(order)?;
    check_arg(z)?;
    let m = order.unsigned_abs() as usize;
    if z.norm() == 0.0 {
        return Err(Error::Range("Y_m and H_m diverge at z = 0".into()));
    }
    let seq = cylinder_seq(z, m + 1);
    let j = unscale(seq.j[m], seq.ej, "J")?;
    let y = unscale(seq.y[m], seq.ej, "Y")?;
    let h = unscale(seq.h[m], seq.eh, "H")?;
    let deriv = |v: &[Complex64], e: Complex64| -> Result<Complex64> {
        // Z_m' = Z_{m-1} - (m/z) Z_m, Z_0' = -Z_1
        let scaled = if m == 0 {
            -v[1]
        } else {
            v[m - 1] - m as f64 / z * v[m]
        };
        unscale(scaled, e, "derivative")
    };
    let dj = deriv(&seq.j, seq.ej)?;
    let dy = deriv(&seq.y, seq.ej)?;
    let dh = deriv(&seq.h, seq.eh)?;
    let p = if order < 0 { sign_parity(order) } else { 1.0 };
    Ok(CylinderValues {
        j: j * p,
        y: y * p,
        h1: h * p,
        dj: dj * p,
        dy: dy * p,
        dh1: dh * p,
    })
}

/// `J_m(z)` alone; finite everywhere including the origin.
pub fn bessel_j(order: i32, z: Complex64) -> Result<Complex64> {
    check_order(order)?;
    check_arg(z)?;
    let m = order.unsigned_abs() as usize;
    let js = j_scaled_seq(z, m);
    let p = if order < 0 { sign_parity(order) } else { 1.0 };
    Ok(unscale(js[m], Complex64::new(z.im.abs(), 0.0), "J")? * p)
}

/// `I_m`, `K_m` and their derivatives at complex `z`, `|m| <= 60`.
///
/// `K_m` diverges at the origin (range error). Left of the imaginary axis `K`
/// is continued with `K_m(z e^{±iπ}) = (-1)^m K_m(z) ∓ iπ I_m(z)`.
pub fn bessel_mod(order: i32, z: Complex64) -> Result<ModifiedValues> {
    check_order(order)?;
    check_arg(z)?;
    let m = order.unsigned_abs() as usize;
    if z.norm() == 0.0 {
        return Err(Error::Range("K_m diverges at z = 0".into()));
    }
    let is = i_scaled_seq(z, m + 1);
    let ei = Complex64::new(z.re.abs(), 0.0);
    let (ks, ek) = if z.re >= 0.0 {
        (k_scaled_seq(z, m + 1), -z)
    } else {
        // z = w e^{±iπ} with Re w > 0
        let w = -z;
        let kw = k_scaled_seq(w, m + 1);
        let iw = i_scaled_seq(w, m + 1);
        let sign = if z.im >= 0.0 { -1.0 } else { 1.0 };
        // K(z) = (-1)^k K(w) + sign·iπ I(w); K(w) = kw·e^{-w}, I(w) = iw·e^{|Re w|}
        // rescale everything to exp(|Re w|) = exp(-Re z)... carry exponent |Re z|
        let ek = Complex64::new(w.re, 0.0);
        let shift = (-w - ek).exp();
        let vals = kw
            .iter()
            .zip(&iw)
            .enumerate()
            .map(|(k, (kv, iv))| sign_parity(k as i32) * kv * shift + sign * I * PI * iv)
            .collect();
        (vals, ek)
    };
    let i_val = unscale(is[m], ei, "I")?;
    let k_val = unscale(ks[m], ek, "K")?;
    let di = if m == 0 { is[1] } else { is[m - 1] - m as f64 / z * is[m] };
    let dk = if m == 0 { -ks[1] } else { -ks[m - 1] - m as f64 / z * ks[m] };
    Ok(ModifiedValues {
        i: i_val,
        k: k_val,
        di: unscale(di, ei, "I'")?,
        dk: unscale(dk, ek, "K'")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn origin_values() {
        assert_eq!(bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(bessel_j(1, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(bessel_cyl(0, c(0.0, 0.0)), Err(Error::Range(_))));
        assert!(matches!(bessel_mod(0, c(0.0, 0.0)), Err(Error::Range(_))));
    }

    #[test]
    fn k0_diverges_towards_origin() {
        let mut prev = 0.0;
        for x in [1.0, 1e-2, 1e-4, 1e-8] {
            let k = bessel_mod(0, c(x, 0.0)).unwrap().k.re;
            assert!(k > prev);
            prev = k;
        }
        assert!(prev > 18.0);
    }

    #[test]
    fn order_limit() {
        assert!(bessel_cyl(61, c(1.0, 0.0)).is_err());
        assert!(bessel_cyl(-60, c(1.0, 0.0)).is_ok());
    }

    // Reference values from a 30-digit mpmath evaluation.
    #[test]
    fn reference_values() {
        let cases: &[(i32, Complex64, Complex64, Complex64)] = &[
            // (m, z, J_m(z), Y_m(z))
            (0, c(1.0, 0.0), c(0.765_197_686_557_966_6, 0.0), c(0.088_256_964_215_676_96, 0.0)),
            (
                1,
                c(2.0, 1.0),
                c(0.790_623_392_553_428_3, -0.079_932_694_167_776_05),
                c(-0.016_315_437_820_472_5, 0.599_406_841_766_853_6),
            ),
            (
                5,
                c(0.3, -4.0),
                c(0.229_379_801_959_230_36, -0.455_911_568_429_679_9),
                c(-0.502_108_716_729_512_3, -0.314_892_556_010_018_8),
            ),
        ];
        for &(m, z, j, y) in cases {
            let v = bessel_cyl(m, z).unwrap();
            assert!(rel(v.j, j) < 1e-13, "J_{m}({z}) = {} vs {j}", v.j);
            assert!(rel(v.y, y) < 1e-13, "Y_{m}({z}) = {} vs {y}", v.y);
        }
    }

    #[test]
    fn negative_order_reflection() {
        let z = c(1.7, 0.4);
        let a = bessel_cyl(3, z).unwrap();
        let b = bessel_cyl(-3, z).unwrap();
        assert!(rel(b.j, -a.j) < 1e-15);
        assert!(rel(b.h1, -a.h1) < 1e-15);
        let ia = bessel_mod(3, z).unwrap();
        let ib = bessel_mod(-3, z).unwrap();
        assert_eq!(ia, ib);
    }

    #[test]
    fn ratios_match_values() {
        let z = c(0.7, 3.1);
        let r = j_ratios(z, 8);
        let h = h1_ratios(z, 8);
        for k in 1..=8 {
            let a = bessel_cyl(k, z).unwrap();
            let b = bessel_cyl(k - 1, z).unwrap();
            assert!(rel(r[k as usize], a.j / b.j) < 1e-13);
            assert!(rel(h[k as usize], a.h1 / b.h1) < 1e-12);
        }
    }
}
