// Predicted minimum enhancement for the bundled measured wire/crystal
// systems, next to the measured values.

use nvwire::coupling::{bundled_records, predict_table};
use nvwire::materials::DrudeParameters;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rows = predict_table(&bundled_records(), &DrudeParameters::silver_default())?;
    println!("diameter  height  measured      predicted(min)");
    for r in rows {
        println!(
            "{:6.0} nm {:5.0} nm  {:.1} +/- {:.1}   {:.3}",
            r.wire_diameter_nm,
            r.diamond_height_nm,
            r.measured_enhancement,
            r.measured_error,
            r.predicted_min_enhancement.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("table example");
}
