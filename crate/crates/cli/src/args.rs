//! Command-line surface. Flags mirror the pipeline configuration fields in
//! kebab-case; every subcommand validates the whole configuration before it
//! reads any input.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::failure::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "rainshape",
    version,
    about = "Shape modeling for contiguous rainfall regions in satellite passes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Extract rain regions and their radial functions from pass records
    Extract(ExtractArgs),
    /// Censoring-weighted functional PCA of the transformed radial curves
    Fpca(FpcaArgs),
    /// Truncated Fourier models, amplitudes, and modal axiality
    Fourier(FourierArgs),
    /// Reconstruction-error tables and overlay plot data
    Report(ReportArgs),
    /// Generate a synthetic corpus with a ground-truth ledger
    Synth(SynthArgs),
}

/// Shared pipeline knobs.
#[derive(Args, Clone, Debug)]
pub struct PipelineConfig {
    /// Smallest region kept, km^2
    #[arg(long, default_value_t = 200.0)]
    pub min_area_km2: f64,
    /// Largest region kept, km^2
    #[arg(long, default_value_t = 13500.0)]
    pub max_area_km2: f64,
    /// Rain-rate threshold defining a rainy cell (strictly above)
    #[arg(long, default_value_t = 0.0)]
    pub min_rain_rate: f64,
    /// Number of angular grid points per contour
    #[arg(long, default_value_t = 1000)]
    pub grid_m: usize,
    /// Fixed number of principal components; omit to cross-validate
    #[arg(long)]
    pub fpca_components: Option<usize>,
    /// Largest component count the cross-validation considers
    #[arg(long, default_value_t = 20)]
    pub max_components: usize,
    /// Truncated Fourier order
    #[arg(long, default_value_t = 6)]
    pub fourier_order: usize,
    /// Earth radius used by the local projection, km
    #[arg(long, default_value_t = 6371.0)]
    pub earth_radius_km: f64,
    /// Nominal grid cell size of the input passes, km
    #[arg(long, default_value_t = 5.0)]
    pub cell_size_km: f64,
    /// Recorded for provenance; the pipeline itself is deterministic
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, env = "RAINSHAPE_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
    /// Manifest column to group by for per-group eigenvalue tables
    #[arg(long)]
    pub group_key: Option<String>,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), Failure> {
        let err = |msg: String| Err(Failure::Config(msg));
        if !(self.min_area_km2.is_finite() && self.min_area_km2 > 0.0) {
            return err(format!("--min-area-km2 must be positive, got {}", self.min_area_km2));
        }
        if !(self.max_area_km2.is_finite() && self.max_area_km2 >= self.min_area_km2) {
            return err(format!(
                "--max-area-km2 must be at least --min-area-km2, got {} < {}",
                self.max_area_km2, self.min_area_km2
            ));
        }
        if !(self.min_rain_rate.is_finite() && self.min_rain_rate >= 0.0) {
            return err(format!(
                "--min-rain-rate must be non-negative, got {}",
                self.min_rain_rate
            ));
        }
        if self.grid_m < 4 {
            return err(format!("--grid-m must be at least 4, got {}", self.grid_m));
        }
        if self.max_components == 0 {
            return err("--max-components must be at least 1".into());
        }
        if 2 * self.fourier_order + 1 > self.grid_m {
            return err(format!(
                "--fourier-order {} needs 2d+1 <= --grid-m {}",
                self.fourier_order, self.grid_m
            ));
        }
        if !(self.earth_radius_km.is_finite() && self.earth_radius_km > 0.0) {
            return err(format!(
                "--earth-radius-km must be positive, got {}",
                self.earth_radius_km
            ));
        }
        if !(self.cell_size_km.is_finite() && self.cell_size_km > 0.0) {
            return err(format!(
                "--cell-size-km must be positive, got {}",
                self.cell_size_km
            ));
        }
        if let Some(key) = &self.group_key {
            if key != "group_key" {
                return err(format!("manifest has no grouping column named {key}"));
            }
        }
        Ok(())
    }

    pub fn manifest_path(&self, explicit: &Option<PathBuf>) -> PathBuf {
        explicit
            .clone()
            .unwrap_or_else(|| self.out_dir.join("manifest.csv"))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightScheme {
    /// Kaplan-Meier masses from the censored size distribution
    Km,
    /// One over the number of contours
    Uniform,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    /// Input pass records CSV
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub config: PipelineConfig,
}

#[derive(Args, Debug)]
pub struct FpcaArgs {
    /// Manifest path; defaults to <out-dir>/manifest.csv
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = WeightScheme::Km)]
    pub weights: WeightScheme,
    #[command(flatten)]
    pub config: PipelineConfig,
}

#[derive(Args, Debug)]
pub struct FourierArgs {
    /// Manifest path; defaults to <out-dir>/manifest.csv
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Choose each contour's order by the risk criterion instead of
    /// --fourier-order
    #[arg(long)]
    pub select_order: bool,
    /// Largest order the risk criterion considers
    #[arg(long, default_value_t = 12)]
    pub max_order: usize,
    /// Also render the modal axiality contour as SVG
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub config: PipelineConfig,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Manifest path; defaults to <out-dir>/manifest.csv
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Fourier orders for the error tables
    #[arg(long, value_delimiter = ',', default_values_t = vec![6, 9, 12])]
    pub orders: Vec<usize>,
    /// Symmetric-difference raster refinement relative to the cell size
    #[arg(long, default_value_t = 10.0)]
    pub raster_scale: f64,
    #[arg(long, value_enum, default_value_t = WeightScheme::Km)]
    pub weights: WeightScheme,
    #[command(flatten)]
    pub config: PipelineConfig,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// TOML file describing the synthetic corpus
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub config: PipelineConfig,
}

impl FourierArgs {
    pub fn validate(&self) -> Result<(), Failure> {
        self.config.validate()?;
        if 2 * self.max_order + 1 > self.config.grid_m {
            return Err(Failure::Config(format!(
                "--max-order {} needs 2d+1 <= --grid-m {}",
                self.max_order, self.config.grid_m
            )));
        }
        Ok(())
    }
}

impl ReportArgs {
    pub fn validate(&self) -> Result<(), Failure> {
        self.config.validate()?;
        if self.orders.is_empty() {
            return Err(Failure::Config("--orders must name at least one order".into()));
        }
        for &d in &self.orders {
            if 2 * d + 1 > self.config.grid_m {
                return Err(Failure::Config(format!(
                    "--orders entry {d} needs 2d+1 <= --grid-m {}",
                    self.config.grid_m
                )));
            }
        }
        if !(self.raster_scale.is_finite() && self.raster_scale >= 1.0) {
            return Err(Failure::Config(format!(
                "--raster-scale must be at least 1, got {}",
                self.raster_scale
            )));
        }
        Ok(())
    }
}
