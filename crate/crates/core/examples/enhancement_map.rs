// Enhancement on a small diameter x distance grid, written as CSV with a
// metadata sidecar and read back.

use nvwire::coupling::{enhancement_map, linspace, EnhancementMap, MapMetadata, Orientation};
use nvwire::materials::DrudeParameters;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let metadata = MapMetadata {
        wavelength_nm: 700.0,
        eps1: 3.0,
        orientation: Orientation::Radial,
        drude: DrudeParameters::silver_default(),
    };
    let map = enhancement_map(&linspace(30.0, 80.0, 3), &linspace(5.0, 60.0, 4), metadata)?;
    print!("{}", map.to_csv());

    let dir = std::env::temp_dir().join(format!("nvwire-map-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("map.csv");
    map.write(&path)?;
    let back = EnhancementMap::parse(
        &std::fs::read_to_string(&path)?,
        &std::fs::read_to_string(EnhancementMap::sidecar_path(&path))?,
        "map.csv",
    )?;
    println!("round trip identical: {}", back.total == map.total);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("map example");
}
