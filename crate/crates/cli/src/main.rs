//! `sqrtlap` command-line tool.
//!
//! Exit status: 0 on success, 1 when an asserted inequality or identity
//! fails, 2 on a usage error or when the run cannot be completed.

mod commands;
mod expr;
mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sqrtlap::geometry::{
    build_domain, BcSpec, BoundaryCondition, Domain, DomainKind, DomainSpec, MetricSpec, MetricTag,
};

use report::{Format, Report};

#[derive(Parser, Debug)]
#[command(
    name = "sqrtlap",
    version,
    about = "Spectral square-root Laplacian toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Domain kind.
    #[arg(long, global = true, value_enum)]
    domain: Option<KindArg>,
    /// Length of an interval or circle.
    #[arg(long, global = true)]
    length: Option<f64>,
    /// Rectangle width.
    #[arg(long, global = true)]
    lx: Option<f64>,
    /// Rectangle height.
    #[arg(long, global = true)]
    ly: Option<f64>,
    /// Nodes per axis; one value is used for every axis.
    #[arg(long, global = true, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    /// Boundary data, one value or one per segment
    /// (`lower,upper` or `left,right,bottom,top`).
    #[arg(long, global = true, value_delimiter = ',', value_enum)]
    bc: Option<Vec<BcArg>>,
    /// Metric of an interval.
    #[arg(long, global = true, value_enum)]
    metric: Option<MetricArg>,
    /// JSON domain description; takes precedence over the inline flags.
    #[arg(long, global = true)]
    domain_file: Option<PathBuf>,
    /// Number of modes to compute.
    #[arg(long, global = true)]
    modes: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Interval,
    Circle,
    Rectangle,
    MaskedGrid,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BcArg {
    Dirichlet,
    Neumann,
    Periodic,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Flat,
    Exp2x,
    #[value(name = "one_plus_x2")]
    OnePlusX2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ScaleArg {
    Lambda,
    Radical,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InterfaceArg {
    Dirichlet,
    Neumann,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues, radicals and residuals.
    Spectrum,
    /// Eigenvalue counts and a fit of the Weyl constant.
    Weyl {
        /// Lower end of the fit window (in lambda).
        #[arg(long)]
        lambda_min: Option<f64>,
        /// Upper end of the fit window (in lambda).
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Use the closed-form spectrum of the domain up to `--lambda-max`.
        #[arg(long)]
        analytic: bool,
        /// Levels at which to report counts.
        #[arg(long, value_delimiter = ',')]
        level: Vec<f64>,
        #[arg(long, value_enum, default_value = "lambda")]
        scale: ScaleArg,
        /// Assert the fitted constant is within this relative distance of the prediction.
        #[arg(long)]
        expect_rel: Option<f64>,
    },
    /// Heat evolution `exp(-t sqrt(A)) f`.
    Heat {
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,1")]
        times: Vec<f64>,
        /// Initial data as an expression in x and y.
        #[arg(long, default_value = "1")]
        initial: String,
    },
    /// Wave evolution from rest.
    Wave {
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,1")]
        times: Vec<f64>,
        #[arg(long, default_value = "1")]
        initial: String,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// Rayleigh quotient of a field against the first eigenvalue.
    Rayleigh {
        /// Field as an expression in x and y.
        #[arg(long)]
        field: String,
    },
    /// Dirichlet or Neumann bracketing across node-aligned cuts.
    Bracket {
        /// Cut positions along `--cut-axis`.
        #[arg(long, value_delimiter = ',', required = true)]
        cut: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        cut_axis: usize,
        #[arg(long, value_enum, default_value = "dirichlet")]
        interface: InterfaceArg,
    },
    /// Nodal counts, Courant bound, tone identity and count ratios.
    Nodal {
        /// Mode whose nodal-domain tone is compared with its eigenvalue.
        #[arg(long)]
        tone_mode: Option<usize>,
        /// First mode of the ratio window.
        #[arg(long)]
        window_min: Option<usize>,
    },
    /// Green-formula and divergence-theorem residuals on random fields.
    Green {
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Christoffel symbols and the two divergence formulas on an interval.
    Diffgeo {
        /// Component of the vector field as an expression in x.
        #[arg(long, default_value = "sin(3*x) + x^2")]
        field: String,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Weyl { .. } => "weyl",
            Command::Heat { .. } => "heat",
            Command::Wave { .. } => "wave",
            Command::Rayleigh { .. } => "rayleigh",
            Command::Bracket { .. } => "bracket",
            Command::Nodal { .. } => "nodal",
            Command::Green { .. } => "green",
            Command::Diffgeo { .. } => "diffgeo",
        }
    }
}

/// Resolved inputs shared by every subcommand.
pub struct Ctx {
    pub command: &'static str,
    pub spec: DomainSpec,
    pub domain: Arc<Domain<f64>>,
    pub modes: Option<usize>,
    pub seed: u64,
    pub format: Format,
}

impl Ctx {
    /// Base configuration merged with subcommand parameters.
    pub fn config(&self, extra: serde_json::Value) -> serde_json::Value {
        let mut cfg = serde_json::json!({
            "command": self.command,
            "domain": self.spec,
            "modes": self.modes,
            "seed": self.seed,
            "format": match self.format { Format::Csv => "csv", Format::Json => "json" },
        });
        if let (Some(base), serde_json::Value::Object(more)) = (cfg.as_object_mut(), extra) {
            base.extend(more);
        }
        cfg
    }
}

fn inline_spec(c: &Common) -> Result<DomainSpec, String> {
    let kind = match c.domain.unwrap_or(KindArg::Interval) {
        KindArg::Interval => DomainKind::Interval,
        KindArg::Circle => DomainKind::Circle,
        KindArg::Rectangle => DomainKind::Rectangle,
        KindArg::MaskedGrid => return Err("masked-grid domains need --domain-file".into()),
    };
    let two_d = kind == DomainKind::Rectangle;
    let lengths = if two_d {
        vec![c.lx.unwrap_or(1.0), c.ly.unwrap_or(1.0)]
    } else {
        vec![c.length.unwrap_or(1.0)]
    };
    let grid = c
        .grid
        .clone()
        .unwrap_or_else(|| vec![if two_d { 32 } else { 200 }]);
    let conv = |b: &BcArg| match b {
        BcArg::Dirichlet => BoundaryCondition::Dirichlet,
        BcArg::Neumann => BoundaryCondition::Neumann,
        BcArg::Periodic => BoundaryCondition::Periodic,
    };
    let bc = match &c.bc {
        None if kind == DomainKind::Circle => BcSpec::Uniform(BoundaryCondition::Periodic),
        None => BcSpec::Uniform(BoundaryCondition::Dirichlet),
        Some(v) if v.len() == 1 => BcSpec::Uniform(conv(&v[0])),
        Some(v) => BcSpec::PerSegment(v.iter().map(conv).collect()),
    };
    let metric = c.metric.map(|m| {
        MetricSpec::Tag(match m {
            MetricArg::Flat => MetricTag::Flat,
            MetricArg::Exp2x => MetricTag::Exp2x,
            MetricArg::OnePlusX2 => MetricTag::OnePlusX2,
        })
    });
    Ok(DomainSpec {
        kind,
        lengths,
        grid,
        bc: Some(bc),
        metric,
        mask: None,
        origin: None,
    })
}

fn resolve_spec(c: &Common) -> Result<DomainSpec, String> {
    let Some(path) = &c.domain_file else {
        return inline_spec(c);
    };
    let inline_given = c.domain.is_some()
        || c.length.is_some()
        || c.lx.is_some()
        || c.ly.is_some()
        || c.grid.is_some()
        || c.bc.is_some()
        || c.metric.is_some();
    if inline_given {
        eprintln!("warning: --domain-file overrides the inline domain flags");
    }
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid domain file {}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<Report, String> {
    let spec = resolve_spec(&cli.common)?;
    let domain = build_domain::<f64>(&spec).map_err(|e| e.to_string())?;
    let ctx = Ctx {
        command: cli.command.name(),
        spec,
        domain,
        modes: cli.common.modes,
        seed: cli.common.seed,
        format: cli.common.format,
    };
    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Weyl {
            lambda_min,
            lambda_max,
            analytic,
            level,
            scale,
            expect_rel,
        } => commands::weyl(
            &ctx, lambda_min, lambda_max, analytic, &level, scale, expect_rel,
        ),
        Command::Heat { times, initial } => commands::heat(&ctx, &times, &initial),
        Command::Wave {
            times,
            initial,
            rho,
            tau,
        } => commands::wave(&ctx, &times, &initial, rho, tau),
        Command::Rayleigh { field } => commands::rayleigh(&ctx, &field),
        Command::Bracket {
            cut,
            cut_axis,
            interface,
        } => commands::bracket(&ctx, &cut, cut_axis, interface),
        Command::Nodal {
            tone_mode,
            window_min,
        } => commands::nodal(&ctx, tone_mode, window_min),
        Command::Green { pairs, tol } => commands::green(&ctx, pairs, tol),
        Command::Diffgeo { field, tol } => commands::diffgeo(&ctx, &field, tol),
    }
}

fn emit(report: &Report, format: Format, output: Option<&PathBuf>) -> Result<(), String> {
    let body = match format {
        Format::Csv => {
            eprint!("{}", report.diagnostics());
            report.to_csv()
        }
        Format::Json => report.to_json(),
    };
    match output {
        Some(path) => {
            fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("cannot write output: {e}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let format = cli.common.format;
    let output = cli.common.output.clone();
    let report = match run(cli) {
        Ok(r) => r,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(msg) = emit(&report, format, output.as_ref()) {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        for a in report.assertions.iter().filter(|a| !a.ok) {
            eprintln!("assertion failed: {} ({})", a.name, a.detail);
        }
        ExitCode::from(1)
    }
}
