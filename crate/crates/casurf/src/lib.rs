//! Command-line driver for `casurf-core`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails or the
//! parameters are invalid, 2 for usage errors.

pub mod commands;
pub mod definition;
pub mod error;
pub mod export;
pub mod expr;
pub mod report;

use clap::{Args, Parser, Subcommand};
use commands::{CheckOptions, Tolerances};
use definition::{grid_center, IntegrationSetup, SurfaceDefinition};
use error::Result;
use export::Format;
use expr::{parse_domain, parse_grid, parse_list, real_arg, NumberList};
use report::CheckReport;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "casurf", version, about = "Constant-angle surfaces in homogeneous 3-spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the ambient frame, connection and curvature against finite differences.
    VerifyAmbient(VerifyArgs),
    /// Sample a surface definition and write it as CSV or OBJ.
    Generate(GenerateArgs),
    /// Measure constant-angle invariants of a surface definition or CSV grid.
    Check(CheckArgs),
    /// Integrate a constant-angle surface from its normal-angle data.
    Integrate(IntegrateArgs),
}

#[derive(Debug, Args)]
pub struct AmbientArgs {
    #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
    pub kappa: f64,
    #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
    pub tau: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Override every tolerance with one value.
    #[arg(long, value_parser = real_arg)]
    pub tol: Option<f64>,
    /// Write the key/value report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub ambient: AmbientArgs,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Node counts `NxM`; overrides the definition file.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,
    /// Parameter ranges `u0:u1,v0:v1`; overrides the definition file.
    #[arg(long, value_parser = parse_domain, allow_hyphen_values = true)]
    pub domain: Option<[(f64, f64); 2]>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Surface-definition file (TOML).
    #[arg(long)]
    pub def: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["def", "csv"]))]
pub struct CheckArgs {
    /// Surface-definition file (TOML).
    #[arg(long)]
    pub def: Option<PathBuf>,
    /// CSV grid written by `generate`; needs --kappa and --tau.
    #[arg(long, requires_all = ["kappa", "tau"])]
    pub csv: Option<PathBuf>,
    #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Expected angle; adds an `angle_target` check.
    #[arg(long, value_parser = real_arg)]
    pub theta: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[command(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub ambient: AmbientArgs,
    #[arg(long, value_parser = real_arg)]
    pub theta: f64,
    /// Coefficients of varphi(v), constant term first (at most three).
    #[arg(long, value_parser = parse_list, default_value = "0", allow_hyphen_values = true)]
    pub varphi: NumberList,
    /// Normal angle at the anchor.
    #[arg(long, value_parser = real_arg, default_value = "0", allow_hyphen_values = true)]
    pub phi0: f64,
    /// Point `x,y,z` at the anchor.
    #[arg(long, value_parser = parse_list, default_value = "0,0,0", allow_hyphen_values = true)]
    pub start: NumberList,
    /// Parameter point `u,v` carrying the initial data; defaults to the domain centre.
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    pub anchor: Option<NumberList>,
    /// Largest RK4 step.
    #[arg(long, value_parser = real_arg, default_value = "1e-3")]
    pub step: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[command(flatten)]
    pub report: ReportArgs,
}

pub const DEFAULT_INTEGRATE_GRID: (usize, usize) = (41, 41);
pub const DEFAULT_INTEGRATE_DOMAIN: [(f64, f64); 2] = [(-0.4, 0.4), (-0.4, 0.4)];

impl GridArgs {
    fn apply(&self, def: &mut SurfaceDefinition) {
        if let Some((nu, nv)) = self.grid {
            def.grid.nu = nu;
            def.grid.nv = nv;
        }
        if let Some([u, v]) = self.domain {
            def.grid.u = [u.0.into(), u.1.into()];
            def.grid.v = [v.0.into(), v.1.into()];
        }
    }
}

fn load_definition(path: &Path, grid: &GridArgs) -> Result<(SurfaceDefinition, PathBuf)> {
    let mut def = SurfaceDefinition::load(path)?;
    grid.apply(&mut def);
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((def, base))
}

fn finish(report: &CheckReport, args: &ReportArgs) -> Result<bool> {
    println!("{report}");
    if let Some(path) = &args.report {
        report.write(path)?;
    }
    Ok(report.passed())
}

fn exact_len<const N: usize>(v: &[f64], what: &str) -> Result<[f64; N]> {
    v.try_into()
        .map_err(|_| error::CliError::Definition(format!("{what} takes {N} numbers, got {}", v.len())))
}

impl IntegrateArgs {
    pub fn setup(&self) -> Result<IntegrationSetup> {
        let (nu, nv) = self.grid.grid.unwrap_or(DEFAULT_INTEGRATE_GRID);
        let [u, v] = self.grid.domain.unwrap_or(DEFAULT_INTEGRATE_DOMAIN);
        let grid = casurf_core::GridSpec::new(u, v, nu, nv)?;
        let varphi = casurf_core::Polynomial::from_slice(&self.varphi.0)
            .ok_or_else(|| error::CliError::Definition("varphi takes one to three coefficients".into()))?;
        let anchor = match &self.anchor {
            Some(a) => exact_len::<2>(&a.0, "--anchor").map(|[u, v]| (u, v))?,
            None => grid_center(&grid),
        };
        Ok(IntegrationSetup {
            params: casurf_core::AmbientParams::new(self.ambient.kappa, self.ambient.tau),
            theta: self.theta,
            varphi,
            phi0: self.phi0,
            start: casurf_core::AmbientPoint::from_array(exact_len::<3>(&self.start.0, "--start")?),
            anchor,
            step: self.step,
            grid,
        })
    }
}

/// Runs one command. `Ok(true)` means every check passed.
pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::VerifyAmbient(a) => {
            let params = casurf_core::AmbientParams::new(a.ambient.kappa, a.ambient.tau);
            let tol = Tolerances::from_override(a.report.tol);
            let report = commands::verify_ambient(params, a.samples as usize, a.seed, &tol)?;
            finish(&report, &a.report)
        }
        Command::Generate(a) => {
            let (def, base) = load_definition(&a.def, &a.grid)?;
            let built = def.build(&base)?;
            let surface = built.sample()?;
            export::write_file(&a.out, &export::render(&surface, a.format))?;
            println!(
                "wrote {} ({} nodes, {})",
                a.out.display(),
                surface.points().len(),
                match a.format {
                    Format::Csv => "csv",
                    Format::Obj => "obj",
                }
            );
            Ok(true)
        }
        Command::Check(a) => {
            let opts = CheckOptions {
                samples: a.samples as usize,
                tolerances: Tolerances::from_override(a.report.tol),
            };
            let mut built = match (&a.def, &a.csv) {
                (Some(path), _) => {
                    let (def, base) = load_definition(path, &a.grid)?;
                    def.build(&base)?
                }
                (None, Some(path)) => {
                    let params = casurf_core::AmbientParams::new(a.kappa.unwrap_or(0.0), a.tau.unwrap_or(0.0));
                    let surface = export::read_csv_grid(path, params)?;
                    definition::BuiltSurface {
                        family: definition::Family::GridFile,
                        params,
                        grid: *surface.spec(),
                        immersion: Box::new(surface),
                        sampled: true,
                        target_theta: None,
                    }
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            if a.theta.is_some() {
                built.target_theta = a.theta;
            }
            let report = commands::check_surface(&built, &opts)?;
            finish(&report, &a.report)
        }
        Command::Integrate(a) => {
            let setup = a.setup()?;
            let opts = CheckOptions {
                samples: a.samples as usize,
                tolerances: Tolerances::from_override(a.report.tol),
            };
            let (out, report) = commands::integrate(&setup, &opts)?;
            if let Some(path) = &a.out {
                export::write_file(path, &export::render(out.surface(), a.format))?;
            }
            finish(&report, &a.report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn integrate_defaults() {
        let cli = Cli::try_parse_from([
            "casurf",
            "integrate",
            "--kappa",
            "-1",
            "--tau",
            "0.5",
            "--theta",
            "pi/3",
        ])
        .unwrap();
        let Command::Integrate(a) = cli.command else { panic!() };
        let setup = a.setup().unwrap();
        assert_eq!(setup.anchor, (0.0, 0.0));
        assert_eq!(setup.grid.nu, DEFAULT_INTEGRATE_GRID.0);
        assert_eq!(setup.params.kappa, -1.0);
    }
}
