//! Reference fits with pinned quality floors.

use rinr_core::inr::{fit, CoordinateGrid, MlpArchitecture, TrainConfig};

/// Measured at 64.0 dB (best iterate at step 1502) when recorded; the floor leaves room for platform
/// libm differences.
const RAMP_FLOOR_DB: f64 = 35.0;

#[test]
fn smooth_ramp_reaches_floor() {
    let n = 32;
    let grid = CoordinateGrid::new(n, n).unwrap();
    let d = (n - 1) as f32;
    let target: Vec<f32> = (0..n * n)
        .flat_map(|i| {
            let (x, y) = ((i % n) as f32, (i / n) as f32);
            [x / d, y / d, 0.5 * (x + y) / (2.0 * d)]
        })
        .collect();
    let arch = MlpArchitecture::new(10, 30).unwrap();
    let cfg = TrainConfig::default().with_steps(2000).with_seed(1);
    let (_, report) = fit(&arch, &grid, &target, &cfg).unwrap();
    println!(
        "ramp 32x32 10x30: {:.2} dB (best step {})",
        report.final_psnr_db, report.best_step
    );
    assert!(
        report.final_psnr_db >= RAMP_FLOOR_DB,
        "{:.2} dB",
        report.final_psnr_db
    );
}
