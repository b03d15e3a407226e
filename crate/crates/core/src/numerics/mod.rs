//! Special functions, certified complex root finding, adaptive quadrature and
//! least-squares fitting shared by the physics modules.

pub mod bessel;
pub mod lm;
pub mod quadrature;
pub mod roots;

pub use bessel::{bessel_cyl, bessel_mod, CylinderValues, ModifiedValues};
pub use quadrature::{integrate, integrate_half_line, integrate_half_line_oscillatory, Estimate, QuadratureConfig};
pub use roots::{find_complex_root, winding_number, RootRegion};
