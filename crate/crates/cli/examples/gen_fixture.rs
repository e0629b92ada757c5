//! Regenerates the synthetic trace fixtures under `tests/fixtures`.
//!
//! Each genus gets a handful of jittered template poses, mapped into a
//! slightly oblique camera view in pixels with sub-pixel noise. A companion
//! rectification file holds the four board-corner correspondences per trial.
//!
//! ```text
//! cargo run -p freesnake-cli --example gen_fixture -- [OUT_DIR]
//! ```

use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freesnake::analysis::estimate_homography;
use freesnake::assembly::{genus_template_with, render_centerline, Genus, TemplateParams};
use freesnake::Point;
use freesnake_cli::io::{self, format_float};

const SEED: u64 = 0x5EED_F4EE;
const TRIALS_PER_GENUS: usize = 4;
const POINTS_PER_SEGMENT: usize = 120;

/// Board corners in meters and where an oblique camera sees them, in pixels.
const BOARD_M: [(f64, f64); 4] = [(-0.1, -0.3), (0.5, -0.3), (0.5, 0.3), (-0.1, 0.3)];
const BOARD_PX: [(f64, f64); 4] = [(112.0, 930.0), (1820.0, 905.0), (1700.0, 60.0), (230.0, 95.0)];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures"));
    fs::create_dir_all(&out)?;

    let board_m: Vec<Point> = BOARD_M.iter().map(|&(x, y)| Point::new(x, y)).collect();
    let board_px: Vec<Point> = BOARD_PX.iter().map(|&(x, y)| Point::new(x, y)).collect();
    let camera = estimate_homography(&board_m, &board_px)?;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for genus in Genus::TEMPLATED {
        let tag = genus.name().to_ascii_lowercase();
        let trace_path = out.join(format!("{tag}_traces.csv"));
        let rect_path = out.join(format!("{tag}_rectify.csv"));
        let mut traces = io::writer(&trace_path)?;
        let mut rect = io::writer(&rect_path)?;
        traces.write_record(io::TRACE_HEADER)?;
        rect.write_record(io::RECTIFY_HEADER)?;

        for t in 0..TRIALS_PER_GENUS {
            let id = format!("{tag}_{:02}", t + 1);
            let defaults = TemplateParams::default();
            let params = TemplateParams {
                total_length: defaults.total_length * rng.gen_range(0.95..1.05),
                kink_sweep: defaults.kink_sweep * rng.gen_range(0.85..1.15),
                midsection_sweep: defaults.midsection_sweep * rng.gen_range(0.85..1.15),
                coil_sweep: defaults.coil_sweep * rng.gen_range(0.85..1.15),
                ..defaults
            };
            let line = render_centerline(&genus_template_with(&genus, &params)?, POINTS_PER_SEGMENT)?;
            for (i, p) in line.points().iter().enumerate() {
                let px = camera.map_point(*p).expect("board view is finite");
                let x = px.x + rng.gen_range(-0.5..0.5);
                let y = px.y + rng.gen_range(-0.5..0.5);
                traces.write_record([id.as_str(), &i.to_string(), &format_float(x), &format_float(y)])?;
            }
            for (m, px) in board_m.iter().zip(&board_px) {
                rect.write_record([
                    id.as_str(),
                    &format_float(px.x),
                    &format_float(px.y),
                    &format_float(m.x),
                    &format_float(m.y),
                ])?;
            }
        }
        traces.flush()?;
        rect.flush()?;
        println!("wrote {}", trace_path.display());
    }
    Ok(())
}
