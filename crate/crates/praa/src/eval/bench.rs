//! Runtime scalability of the imputation pass: wall-clock timings over
//! growing synthetic datasets and an ordinary least squares fit of time
//! against dataset size.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::dataset::generate_synthetic;
use crate::error::{Error, Result};
use crate::imputer::impute_dataset;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Dataset sizes (record counts), strictly increasing, at least 4.
    pub sizes: Vec<usize>,
    pub columns: usize,
    pub missing_rate: f64,
    /// Repeats per size; the median is reported. Minimum 3.
    pub repeats: usize,
    pub seed: u64,
    /// Worker threads while timing; 1 stabilizes measurements.
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![500, 1000, 2000, 4000],
            columns: 6,
            missing_rate: 0.1,
            repeats: 3,
            seed: 42,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchPoint {
    pub size: usize,
    pub median_seconds: f64,
    pub repeats: usize,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    /// Least-squares fit T = slope * D + intercept over (size, median).
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub warnings: Vec<String>,
}

impl BenchReport {
    /// One-line fit summary at 6 significant digits.
    pub fn summary(&self) -> String {
        format!(
            "fit: T = {:.5e} * D + {:.5e} (r2 = {:.6})",
            self.slope, self.intercept, self.r_squared
        )
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        writeln!(out, "size,median_seconds,repeats")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.size, p.median_seconds, p.repeats)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn median_time(times: &mut [f64]) -> f64 {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = times.len();
    if n % 2 == 1 {
        times[n / 2]
    } else {
        (times[n / 2 - 1] + times[n / 2]) / 2.0
    }
}

fn time_imputation(size: usize, config: &BenchConfig, repeats: usize) -> Result<f64> {
    let data = generate_synthetic(size, config.columns, config.missing_rate, config.seed)?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        let (imputed, _) = impute_dataset(&data)?;
        times.push(start.elapsed().as_secs_f64());
        std::hint::black_box(&imputed);
    }
    Ok(median_time(&mut times))
}

/// Ordinary least squares of y on x; returns (slope, intercept, r^2).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mean_x) * (xi - mean_x);
        sxy += (xi - mean_x) * (yi - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let fit = slope * xi + intercept;
        ss_res += (yi - fit) * (yi - fit);
        ss_tot += (yi - mean_y) * (yi - mean_y);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r_squared)
}

pub fn bench_scalability(config: &BenchConfig) -> Result<BenchReport> {
    if config.sizes.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "benchmark needs at least 4 sizes, got {}",
            config.sizes.len()
        )));
    }
    if !config.sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "benchmark sizes must be strictly increasing".into(),
        ));
    }
    let base_repeats = config.repeats.max(3);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.max(1))
        .build()
        .map_err(|e| Error::Stats(format!("thread pool: {e}")))?;

    let mut points = Vec::with_capacity(config.sizes.len());
    let mut warnings = Vec::new();
    for &size in &config.sizes {
        let mut repeats = base_repeats;
        let mut median = pool.install(|| time_imputation(size, config, repeats))?;
        if median < 1e-3 {
            // Too fast to time reliably; retry with more repeats.
            repeats = (base_repeats * 5).min(25);
            warnings.push(format!(
                "size {size}: median {median:.2e}s below 1 ms, rerunning with {repeats} repeats"
            ));
            median = pool.install(|| time_imputation(size, config, repeats))?;
        }
        points.push(BenchPoint {
            size,
            median_seconds: median,
            repeats,
        });
    }

    let x: Vec<f64> = points.iter().map(|p| p.size as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.median_seconds).collect();
    let (slope, intercept, r_squared) = linear_fit(&x, &y);
    Ok(BenchReport {
        points,
        slope,
        intercept,
        r_squared,
        warnings,
    })
}
