//! Regenerates the shipped testbed files from their constructors.

use wick_core::testbed::Testbed;

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "testbeds".into());
    for t in [Testbed::t11(), Testbed::g2(), Testbed::onesw()] {
        std::fs::write(format!("{dir}/{}.json", t.name), t.to_json() + "\n")?;
    }
    Ok(())
}
