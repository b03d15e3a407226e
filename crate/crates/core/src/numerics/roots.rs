//! Certified complex root finding: the argument principle counts zeros inside
//! a rectangle, quadrisection isolates a single zero, and Newton's method with
//! a central-difference derivative polishes it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootRegion {
    pub center: Complex64,
    pub half_width: f64,
    pub half_height: f64,
}

impl RootRegion {
    pub fn new(center: Complex64, half_width: f64, half_height: f64) -> Result<Self> {
        if !(half_width > 0.0) || !(half_height > 0.0) || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidInput(format!(
                "root region needs positive finite half sizes, got {half_width} x {half_height}"
            )));
        }
        Ok(Self {
            center,
            half_width,
            half_height,
        })
    }

    /// Rectangle from its real and imaginary extents.
    pub fn from_bounds(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        Self::new(
            Complex64::new(0.5 * (re.0 + re.1), 0.5 * (im.0 + im.1)),
            0.5 * (re.1 - re.0),
            0.5 * (im.1 - im.0),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z.re - self.center.re).abs() <= self.half_width && (z.im - self.center.im).abs() <= self.half_height
    }

    fn corners(&self) -> [Complex64; 4] {
        let (w, h) = (self.half_width, self.half_height);
        [
            self.center + Complex64::new(-w, -h),
            self.center + Complex64::new(w, -h),
            self.center + Complex64::new(w, h),
            self.center + Complex64::new(-w, h),
        ]
    }

    fn quadrants(&self) -> [RootRegion; 4] {
        let (w, h) = (0.5 * self.half_width, 0.5 * self.half_height);
        [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(sx, sy)| RootRegion {
            center: self.center + Complex64::new(sx * w, sy * h),
            half_width: w,
            half_height: h,
        })
    }

    fn size(&self) -> f64 {
        self.half_width.max(self.half_height)
    }
}

/// Winding count of `f` around the region boundary, plus the median `|f|`
/// seen on the boundary (the residual scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub count: i64,
    pub scale: f64,
}

const MAX_PHASE_STEP: f64 = PI / 6.0;
const MAX_BISECTIONS: u32 = 18;

/// Counts zeros minus poles of `f` inside `region` by tracking the phase of
/// `f` along the boundary. Each edge starts with 16 samples; a step is bisected
/// while the phase jump exceeds π/6.
pub fn winding_number<F>(f: &mut F, region: &RootRegion) -> Result<Winding>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let corners = region.corners();
    let mut total_phase = 0.0;
    let mut magnitudes = Vec::new();
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let n = 16;
        let mut prev_t = 0.0;
        let mut prev_v = checked(f, a)?;
        magnitudes.push(prev_v.norm());
        for i in 1..=n {
            let t = i as f64 / n as f64;
            let v = checked(f, a + (b - a) * t)?;
            total_phase += phase_between(f, a, b, prev_t, prev_v, t, v, 0, &mut magnitudes)?;
            magnitudes.push(v.norm());
            prev_t = t;
            prev_v = v;
        }
    }
    magnitudes.sort_by(f64::total_cmp);
    let scale = magnitudes[magnitudes.len() / 2];
    let turns = total_phase / (2.0 * PI);
    let count = turns.round();
    if (turns - count).abs() > 0.1 {
        return Err(Error::InvalidInput(format!(
            "winding number {turns:.3} is not close to an integer; a zero may lie on the boundary"
        )));
    }
    Ok(Winding {
        count: count as i64,
        scale,
    })
}

#[allow(clippy::too_many_arguments)]
fn phase_between<F>(
    f: &mut F,
    a: Complex64,
    b: Complex64,
    t0: f64,
    v0: Complex64,
    t1: f64,
    v1: Complex64,
    depth: u32,
    magnitudes: &mut Vec<f64>,
) -> Result<f64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let step = (v1 / v0).arg();
    if step.abs() <= MAX_PHASE_STEP {
        return Ok(step);
    }
    if depth >= MAX_BISECTIONS {
        return Err(Error::InvalidInput(
            "phase of f unresolved along the boundary; a zero may lie on it".into(),
        ));
    }
    let tm = 0.5 * (t0 + t1);
    let vm = checked(f, a + (b - a) * tm)?;
    magnitudes.push(vm.norm());
    Ok(phase_between(f, a, b, t0, v0, tm, vm, depth + 1, magnitudes)?
        + phase_between(f, a, b, tm, vm, t1, v1, depth + 1, magnitudes)?)
}

fn checked<F>(f: &mut F, z: Complex64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    let v = f(z)?;
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Range(format!("function value not finite at {z}")));
    }
    if v.norm() == 0.0 {
        return Err(Error::InvalidInput(format!("zero on the region boundary at {z}")));
    }
    Ok(v)
}

/// A certified root with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootReport {
    pub root: Complex64,
    /// `|f(root)| / scale`
    pub scaled_residual: f64,
    /// Median `|f|` on the boundary of the search region.
    pub scale: f64,
    pub newton_steps: usize,
}

/// Finds the single zero of `f` inside `region` with `|f(z)| / scale < tol`.
pub fn find_complex_root<F>(mut f: F, region: &RootRegion, tol: f64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    find_complex_root_report(&mut f, region, tol).map(|r| r.root)
}

/// As [`find_complex_root`], returning the residual diagnostics too.
pub fn find_complex_root_report<F>(f: &mut F, region: &RootRegion, tol: f64) -> Result<RootReport>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("root tolerance must be positive".into()));
    }
    let top = winding_number(f, region)?;
    match top.count {
        0 => return Err(Error::NoRootInRegion { winding: 0 }),
        1 => {}
        n => return Err(Error::MultipleRootsInRegion { winding: n }),
    }
    let scale = top.scale;

    // isolate: keep the quadrant that holds the zero while it stays countable
    let mut cell = *region;
    for _ in 0..12 {
        let mut next = None;
        for q in cell.quadrants() {
            match winding_number(f, &q) {
                Ok(w) if w.count == 1 => {
                    next = Some(q);
                    break;
                }
                Ok(_) => {}
                // zero on an internal edge: stop refining, the cell is small enough
                Err(_) => {
                    next = None;
                    break;
                }
            }
        }
        match next {
            Some(q) => cell = q,
            None => break,
        }
    }

    let mut z = cell.center;
    let mut fz = f(z)?;
    let mut steps = 0;
    let h0 = 1e-6 * cell.size().max(1e-8 * z.norm());
    for _ in 0..60 {
        if fz.norm() / scale < tol * 1e-3 {
            break;
        }
        let h = h0.max(1e-7 * (fz.norm() / scale).min(1.0) * cell.size());
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if d.norm() == 0.0 || !d.re.is_finite() {
            break;
        }
        let step = fz / d;
        let mut trial = z - step;
        // damp steps that leave the search region
        let mut damping = 1.0;
        while !region.contains(trial) && damping > 1e-6 {
            damping *= 0.5;
            trial = z - step * damping;
        }
        let ft = f(trial)?;
        steps += 1;
        let converged = (trial - z).norm() <= 1e-15 * trial.norm().max(1e-300);
        if ft.norm() <= fz.norm() || converged {
            z = trial;
            fz = ft;
        } else {
            break;
        }
        if converged {
            break;
        }
    }
    let scaled_residual = fz.norm() / scale;
    if scaled_residual < tol && region.contains(z) {
        Ok(RootReport {
            root: z,
            scaled_residual,
            scale,
            newton_steps: steps,
        })
    } else {
        Err(Error::RootNotConverged {
            best: z,
            residual: scaled_residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn finds_imaginary_unit() {
        let region = RootRegion::new(c(0.1, 0.9), 0.5, 0.5).unwrap();
        let z = find_complex_root(|z| Ok(z * z + 1.0), &region, 1e-12).unwrap();
        assert!((z - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn empty_region() {
        let region = RootRegion::new(c(5.0, 5.0), 0.1, 0.1).unwrap();
        let r = find_complex_root(|z| Ok(z * z + 1.0), &region, 1e-12);
        assert!(matches!(r, Err(Error::NoRootInRegion { winding: 0 })));
    }

    #[test]
    fn two_roots_rejected() {
        let region = RootRegion::new(c(0.0, 0.0), 2.0, 2.0).unwrap();
        let r = find_complex_root(|z| Ok(z * z + 1.0), &region, 1e-12);
        assert!(matches!(r, Err(Error::MultipleRootsInRegion { winding: 2 })));
    }

    #[test]
    fn winding_counts_cubic_roots() {
        let mut f = |z: Complex64| Ok((z - 0.5) * (z + c(0.3, 0.2)) * (z - c(0.0, 3.0)));
        let region = RootRegion::new(c(0.0, 0.0), 1.0, 1.0).unwrap();
        assert_eq!(winding_number(&mut f, &region).unwrap().count, 2);
    }

    #[test]
    fn transcendental_root() {
        // e^z = 2 has z = ln 2 + 2πik
        let region = RootRegion::new(c(0.5, 0.3), 1.0, 1.0).unwrap();
        let z = find_complex_root(|z| Ok(z.exp() - 2.0), &region, 1e-13).unwrap();
        assert!((z - c(2f64.ln(), 0.0)).norm() < 1e-13);
    }

    #[test]
    fn invalid_region() {
        assert!(RootRegion::new(c(0.0, 0.0), 0.0, 1.0).is_err());
        assert!(RootRegion::new(c(0.0, 0.0), 1.0, -1.0).is_err());
    }
}
