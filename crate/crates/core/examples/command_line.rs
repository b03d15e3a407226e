// Driving the command-line front end from code, with a config file whose
// values are overridden by explicit flags.

use nvwire::cli::run;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("nvwire-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let cfg = dir.join("wire.cfg");
    std::fs::write(&cfg, "# silver wire in a dielectric\nradius-nm = 27.5\neps1 = 2.5\n")?;

    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["nvwire", "--config", cfg.to_str().ok_or("path")?, "mode", "--eps1", "3"];
    let code = run(args, &mut out, &mut err);
    print!("{}", String::from_utf8(out)?);
    println!("exit {code}");

    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(["nvwire", "enhance", "--diameter-nm", "55"], &mut out, &mut err);
    print!("{}", String::from_utf8(err)?);
    println!("exit {code}");
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("cli example");
}
