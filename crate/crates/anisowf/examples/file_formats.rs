//! Writing and reading signals in the ANGB binary format, plus the CSV and
//! JSON mirrors used by the command line tool.

use anisowf::format::{read_signal, signal_csv, write_signal};
use anisowf::signal::hermite;
use anisowf::{estimate_wf, Grid, ScanConfig};

fn main() -> anisowf::Result<()> {
    let dir = std::env::temp_dir().join("anisowf-example");
    std::fs::create_dir_all(&dir).map_err(|e| anisowf::Error::io(&dir, e))?;
    let u = hermite(Grid::new(1, 1024, 12.0)?, 3);
    let path = dir.join("hermite3.angb");
    write_signal(&path, &u)?;
    let back = read_signal(&path)?;
    println!(
        "{}: {} bytes, identical after reading: {}",
        path.display(),
        std::fs::metadata(&path).map_or(0, |m| m.len()),
        back == u
    );
    println!("{}", signal_csv(&u).lines().take(3).collect::<Vec<_>>().join("\n"));
    let set = estimate_wf(&u, 1.0, &ScanConfig::default())?;
    let json = serde_json::to_string(&set).expect("serializable");
    println!("direction set JSON: {} bytes, {} classified", json.len(), set.classified().count());
    Ok(())
}
