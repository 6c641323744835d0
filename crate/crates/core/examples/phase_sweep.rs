//! Verdict map over a (mu2, p) grid at N = 3, mu1 = 0.

use cknkit::cli::{cmd_sweep_with_threads, Format, Grid, RunConfig};

fn main() -> cknkit::Result<()> {
    let config = RunConfig {
        mu2: Grid::Range {
            start: -0.24,
            stop: -0.02,
            count: 12,
        },
        p: Grid::Range {
            start: 2.0,
            stop: 20.0,
            count: 10,
        },
        formats: vec![Format::Csv],
        ..RunConfig::default()
    };
    let outcome = cmd_sweep_with_threads(&config, None)?;
    let csv = outcome.csv.unwrap_or_default();
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| cknkit::CknError::Io(e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (mu2, verdict) = (col("mu2"), col("verdict"));
    let mut current = String::new();
    for row in rdr.records() {
        let row = row.map_err(|e| cknkit::CknError::Io(e.to_string()))?;
        if row[mu2] != current {
            if !current.is_empty() {
                println!();
            }
            current = row[mu2].to_string();
            print!(
                "mu2 = {:>8.4}: ",
                current.parse::<f64>().unwrap_or(f64::NAN)
            );
        }
        let mark = match &row[verdict] {
            "Nonexistent" => 'X',
            "Inconclusive" => '.',
            _ => '?',
        };
        print!("{mark}");
    }
    println!("\nX = no positive solution, . = inconclusive; p from 2 to 20");
    Ok(())
}
