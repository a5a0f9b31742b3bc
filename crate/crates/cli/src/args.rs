use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wrtlab::quadrature::QuadratureSpec;
use wrtlab::w0::{W0Kind, DEFAULT_TILT, HOLDER_ALPHA_MAX};

#[derive(Debug, Parser)]
#[command(
    name = "wrtlab",
    version,
    about = "Build and verify positive rotation-invariant weights W with a nonzero radial f in the kernel of P_W"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct W and write the weight document.
    Build(BuildArgs),
    /// Check P_W f = 0 and W >= 1/2 on sampled lines of a weight document.
    Verify(VerifyArgs),
    /// Parameter sweeps with CSV output.
    #[command(subcommand)]
    Sweeps(Sweep),
}

#[derive(Debug, Subcommand)]
pub enum Sweep {
    /// U0(s, r) on a product grid.
    U0(U0Args),
    /// Lemma 4 decay profile and Lemma 5 envelope constants.
    Bounds(BoundsArgs),
    /// Hoelder quotients of U0 over random pairs, at two sample sizes.
    Holder(HolderArgs),
    /// n translated copies of W and their phantoms.
    Multikernel(MultikernelArgs),
    /// Restriction of the 3D weight to the plane x_3 = sqrt(1 - delta^2).
    Slice(SliceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Tilted,
    Dyadic,
}

impl KindArg {
    pub fn kind(self, tilt: f64) -> W0Kind {
        match self {
            KindArg::Tilted => W0Kind::Tilted { strength: tilt },
            KindArg::Dyadic => W0Kind::Dyadic,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QuadArgs {
    /// Quadrature points per local wavelength.
    #[arg(long, default_value_t = 10)]
    pub ppw: u32,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, default_value_t = 8)]
    pub panel_order: u32,
    #[arg(long, default_value_t = 1e-12)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 8)]
    pub max_refinements: u32,
}

impl QuadArgs {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            points_per_wavelength: self.ppw,
            panel_order: self.panel_order,
            rel_tol: self.rel_tol,
            max_refinements: self.max_refinements,
            ..QuadratureSpec::default()
        }
    }
}

fn kmax_range() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32)
        .range(wrtlab::phantom::MIN_K_MAX as i64..=wrtlab::phantom::MAX_K_MAX as i64)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub dim: u32,
    #[arg(long, value_parser = kmax_range())]
    pub kmax: u32,
    #[arg(long)]
    pub out: PathBuf,
    /// Boundary weight used for r > delta0.
    #[arg(long, value_enum, default_value_t = KindArg::Tilted)]
    pub w0: KindArg,
    #[arg(long, default_value_t = DEFAULT_TILT)]
    pub tilt: f64,
    /// Radius R beyond which W = 1.
    #[arg(long, default_value_t = wrtlab::assembly::DEFAULT_OUTER_RADIUS)]
    pub outer_radius: f64,
    /// Largest eps tried for each local weight.
    #[arg(long, default_value_t = wrtlab::assembly::DEFAULT_EPS_START)]
    pub eps_start: f64,
    /// Skip the Lemma 4 / Lemma 5 fits.
    #[arg(long)]
    pub no_fit: bool,
    /// Record a multi-kernel configuration with this many centres.
    #[arg(long)]
    pub multikernel: Option<usize>,
    /// Record a slice configuration with this delta (needs --dim 3).
    #[arg(long)]
    pub slice: Option<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub weight: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub rays: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub report: PathBuf,
    /// Samples of W for the positivity check (0 skips it).
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Largest accepted |P_W f| / integral |W f|.
    #[arg(long, default_value_t = 1e-7)]
    pub threshold: f64,
    /// Largest accepted direct-vs-reduction gap in d = 3.
    #[arg(long, default_value_t = 1e-9)]
    pub agreement: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct U0Args {
    #[arg(long, value_parser = kmax_range(), default_value_t = 8)]
    pub kmax: u32,
    #[arg(long, value_enum, default_value_t = KindArg::Dyadic)]
    pub w0: KindArg,
    #[arg(long, default_value_t = DEFAULT_TILT)]
    pub tilt: f64,
    /// Lines, equispaced strictly inside (1/2, horizon).
    #[arg(long, default_value_t = 64)]
    pub r_points: usize,
    /// Axial samples on [0, 1].
    #[arg(long, default_value_t = 257)]
    pub s_points: usize,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long, value_parser = kmax_range(), default_value_t = 8)]
    pub kmax: u32,
    /// Size of the Lemma 4 r-grid.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Lines per annulus for the Lemma 5 items.
    #[arg(long, default_value_t = 24)]
    pub lemma5_points: usize,
    /// Lemma 4 rows (r, M, rho).
    #[arg(long)]
    pub csv: PathBuf,
    /// Lemma 5 rows (item, k, ratio).
    #[arg(long)]
    pub lemma5_csv: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Largest accepted max/median of rho.
    #[arg(long, default_value_t = 10.0)]
    pub max_over_median: f64,
    /// Largest accepted spread (max/min over k) of a Lemma 5 ratio.
    #[arg(long, default_value_t = 50.0)]
    pub max_spread: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

fn holder_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if a > 0.0 && a < HOLDER_ALPHA_MAX {
        Ok(a)
    } else {
        Err(format!("alpha must lie in (0, 1/16), got {a}"))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HolderArgs {
    #[arg(long, value_parser = kmax_range(), default_value_t = 8)]
    pub kmax: u32,
    #[arg(long, value_enum, default_value_t = KindArg::Dyadic)]
    pub w0: KindArg,
    #[arg(long, default_value_t = DEFAULT_TILT)]
    pub tilt: f64,
    #[arg(long, value_parser = holder_alpha, default_value_t = 1.0 / 32.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Factor of the refined sample size.
    #[arg(long, default_value_t = 4)]
    pub refine: usize,
    /// Table nodes in (1/2, horizon].
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Largest accepted ratio of the two maxima.
    #[arg(long, default_value_t = 2.0)]
    pub max_ratio: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MultikernelArgs {
    #[arg(long)]
    pub weight: PathBuf,
    /// Number of centres (defaults to the document's, else 3).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Lines per phantom f_i.
    #[arg(long, default_value_t = 20)]
    pub rays: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-7)]
    pub threshold: f64,
    /// Largest accepted gap |P_{W_n} f_i - P_W f(. - y_i)| in the translation identity.
    #[arg(long, default_value_t = 1e-12)]
    pub translation: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SliceArgs {
    #[arg(long)]
    pub weight: PathBuf,
    /// Slice parameter (defaults to the document's, else 0.25).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub rays: usize,
    /// Lines of the positivity grid.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-7)]
    pub threshold: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holder_alpha_bounds() {
        assert_eq!(holder_alpha("0.03125"), Ok(1.0 / 32.0));
        assert!(holder_alpha("0.0625").is_err());
        assert!(holder_alpha("0").is_err());
        assert!(holder_alpha("x").is_err());
    }

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from([
            "wrtlab", "build", "--dim", "3", "--kmax", "8", "--out", "w.json",
        ])
        .unwrap();
        let Command::Build(b) = cli.command else {
            panic!("expected build")
        };
        assert_eq!((b.dim, b.kmax, b.w0), (3, 8, KindArg::Tilted));
        assert!(Cli::try_parse_from([
            "wrtlab", "build", "--dim", "2", "--kmax", "3", "--out", "w"
        ])
        .is_err());
        let cli = Cli::try_parse_from(["wrtlab", "sweeps", "holder", "--csv", "h.csv"]).unwrap();
        let Command::Sweeps(Sweep::Holder(h)) = cli.command else {
            panic!("expected holder")
        };
        assert_eq!((h.alpha, h.pairs, h.refine), (1.0 / 32.0, 10_000, 4));
    }
}
