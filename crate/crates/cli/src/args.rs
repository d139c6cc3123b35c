use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndyn::builder::parse_complex;
use ndyn::planes::{ColorMode, DEFAULT_CONV_RADIUS, DEFAULT_INFINITY_RADIUS, DEFAULT_MAX_ITER};
use ndyn::poly::Complex;

#[derive(Debug, Parser)]
#[command(name = "ndyn", version, about = "Operators of iterative root-finding methods on z^d - c")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Instantiate a method, conjugate it and print its normal form.
    Build(MethodArgs),
    /// Fixed points, critical points and symmetry certificates of an operator.
    Analyze(MethodArgs),
    /// Stability regions of the strange fixed points 1 and -1 over the method's parameter.
    Stability(StabilityArgs),
    /// Render a dynamical plane to PPM with a metadata sidecar.
    Dynplane(DynplaneArgs),
    /// Render a parameter plane to PPM with a metadata sidecar.
    Paramplane(ParamplaneArgs),
    /// Run the built-in identity and property suites.
    Verify(VerifyArgs),
    /// List the built-in methods.
    Catalog,
}

/// Where the method comes from.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Catalog method name (see `ndyn catalog`).
    #[arg(long)]
    pub method: Option<String>,
    /// File holding a scheme in the DSL.
    #[arg(long, value_name = "PATH")]
    pub scheme_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MethodArgs {
    #[command(flatten)]
    pub source: Source,
    /// Parameter binding, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_binding, allow_hyphen_values = true)]
    pub params: Vec<(String, Complex)>,
    /// Degree of the polynomial z^d - c.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Constant of the polynomial z^d - c.
    #[arg(long, default_value = "1", value_parser = parse_complex_arg, allow_hyphen_values = true)]
    pub c: Complex,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "1", value_parser = parse_complex_arg, allow_hyphen_values = true)]
    pub c: Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Speed,
    Attractor,
}

impl From<ModeArg> for ColorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Speed => ColorMode::Speed,
            ModeArg::Attractor => ColorMode::Attractor,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    /// x_min,x_max,y_min,y_max
    #[arg(long, default_value = "-2,2,-2,2", value_parser = parse_window, allow_hyphen_values = true)]
    pub window: (f64, f64, f64, f64),
    /// WIDTHxHEIGHT
    #[arg(long, default_value = "400x400", value_parser = parse_res)]
    pub res: (usize, usize),
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: u32,
    #[arg(long, default_value_t = DEFAULT_CONV_RADIUS)]
    pub conv_radius: f64,
    #[arg(long, default_value_t = DEFAULT_INFINITY_RADIUS)]
    pub infinity_radius: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Speed)]
    pub mode: ModeArg,
    /// Worker threads; falls back to NDYN_THREADS.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output PPM path.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Sidecar path; defaults to the output path with extension `txt`.
    #[arg(long, value_name = "PATH")]
    pub sidecar: Option<PathBuf>,
    /// Known attracting point, repeatable.
    #[arg(long, value_parser = parse_complex_arg, allow_hyphen_values = true)]
    pub attractor: Vec<Complex>,
    /// Known attracting cycle as comma-separated points, repeatable.
    #[arg(long, value_parser = parse_cycle, allow_hyphen_values = true)]
    pub cycle: Vec<Vec<Complex>>,
}

#[derive(Debug, Clone, Args)]
pub struct DynplaneArgs {
    #[command(flatten)]
    pub method: MethodArgs,
    #[command(flatten)]
    pub render: RenderArgs,
    /// Iterate the method on z^d - c itself instead of its conjugated operator.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ParamplaneArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value = "1", value_parser = parse_complex_arg, allow_hyphen_values = true)]
    pub c: Complex,
    /// Which free critical pair to follow, in order of modulus.
    #[arg(long)]
    pub critical_index: Option<usize>,
    #[command(flatten)]
    pub render: RenderArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Random cases per suite.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

fn parse_complex_arg(s: &str) -> Result<Complex, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn parse_binding(s: &str) -> Result<(String, Complex), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(format!("empty parameter name in `{s}`"));
    }
    Ok((name.to_string(), parse_complex_arg(value)?))
}

fn parse_window(s: &str) -> Result<(f64, f64, f64, f64), String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x0, x1, y0, y1] => Ok((x0, x1, y0, y1)),
        _ => Err(format!("expected four comma-separated numbers, got {}", v.len())),
    }
}

fn parse_res(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WIDTHxHEIGHT, got `{s}`"))?;
    let dim = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((dim(w)?, dim(h)?))
}

fn parse_cycle(s: &str) -> Result<Vec<Complex>, String> {
    let pts: Vec<Complex> = s.split(',').map(parse_complex_arg).collect::<Result<_, _>>()?;
    if pts.len() < 2 {
        return Err("a cycle needs at least two points".into());
    }
    Ok(pts)
}
