#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fringelab::coherence_analysis::{
    coherence_at, coherence_length_from_wavelength, coherence_length_gaussian, visibility_curve, VisibilityModel,
};
use fringelab::interference_engine::{
    fringe_pattern_from_moments, fringe_spacing, visibility_statistics, BeamMoments, DoubleSlitGeometry, PathConfig,
    StatsRequest,
};
use fringelab::io::config::{parse_config, RunConfig, SourceKind};
use fringelab::io::svg::{write_line_plot, Series};
use fringelab::io::tables::{write_fringe_pattern, write_logic_trace, write_stats, write_visibility_curve, StatsRow};
use fringelab::spectral_model::{
    comb_spectrum, envelope_linewidth, linspace, load_spectrum_csv, write_spectrum_csv, ModeComb, PowerSpectrum,
};
use fringelab::timing_logic::{measure_delta_t, measure_interference_duration, simulate_run};
use fringelab::{Error, Result, SPEED_OF_LIGHT};

/// Coherence, double-slit and gate-timing simulator for multi-mode laser light.
#[derive(Parser, Debug)]
#[command(name = "fringelab", version)]
struct Cli {
    /// TOML run configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random draw (overrides simulation.seed).
    #[arg(long, global = true, env = "FRINGELAB_SEED")]
    seed: Option<u64>,
    /// Output directory (overrides output.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also render SVG plots of the CSV tables.
    #[arg(long, global = true)]
    svg: bool,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degree of coherence, coherence length and visibility curve of a source.
    Coherence(CoherenceArgs),
    /// Static double-slit pattern for the configured arms.
    Fringes(FringesArgs),
    /// Monte-Carlo statistics of transient fringes against mode count.
    Simulate(SimulateArgs),
    /// Detector and gate trace of one switch cycle.
    Timing(TimingArgs),
    /// Synthesize or inspect a spectrum CSV.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
}

#[derive(Args, Debug)]
struct CoherenceArgs {
    /// Gaussian line of this FWHM (nm) instead of the configured source.
    #[arg(long)]
    gaussian_fwhm_nm: Option<f64>,
    /// Centre wavelength (nm).
    #[arg(long)]
    lambda_nm: Option<f64>,
    /// Spectrum CSV (`wavelength_nm,power`) instead of the configured source.
    #[arg(long, conflicts_with = "gaussian_fwhm_nm")]
    spectrum_csv: Option<PathBuf>,
    /// Largest path difference of the curve (m); default depends on the source.
    #[arg(long)]
    dl_max_m: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    points: usize,
}

#[derive(Args, Debug)]
struct FringesArgs {
    /// Reference geometry and split ratio with equal arm lengths.
    #[arg(long)]
    paper_defaults: bool,
    /// Physical arm-length difference (m); overrides the configured paths.
    #[arg(long)]
    dl: Option<f64>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Mode counts to sweep (overrides simulation.mode_counts).
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<usize>>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    n_seeds: Option<usize>,
    /// Physical arm-length difference (m).
    #[arg(long)]
    dl: Option<f64>,
}

#[derive(Args, Debug)]
struct TimingArgs {
    /// Physical arm-length difference p₂ − p₁ (m).
    #[arg(long)]
    dl: Option<f64>,
    /// Fiber refractive index.
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    t_on: Option<f64>,
    #[arg(long)]
    t_off: Option<f64>,
    /// Treat the overlapping beams as mutually incoherent.
    #[arg(long)]
    no_fringes: bool,
}

#[derive(Subcommand, Debug)]
enum SpectrumCommand {
    /// Write the configured source as a sampled spectrum CSV.
    Synthesize {
        /// Display FWHM of each comb mode (Hz); default an eighth of the mode spacing.
        #[arg(long)]
        display_fwhm_hz: Option<f64>,
        #[arg(long, default_value_t = 8001)]
        points: usize,
    },
    /// Report power, centroid and envelope linewidth of a spectrum CSV.
    Inspect { path: PathBuf },
}

struct Context {
    config: RunConfig,
    out: PathBuf,
    svg: bool,
}

impl Context {
    fn output(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }

    fn plot(&self, name: &str, title: &str, x: &str, y: &str, series: &[Series<'_>]) -> Result<()> {
        if self.svg {
            let path = self.output(name)?;
            write_line_plot(&path, title, x, y, series)?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => parse_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.simulation.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output.directory = out.clone();
    }
    if cli.svg {
        config.output.svg = true;
    }
    if cli.print_config {
        print!("{}", config.to_toml());
        return Ok(ExitCode::SUCCESS);
    }
    let Some(command) = cli.command else {
        use clap::CommandFactory;
        eprintln!("{}", Cli::command().render_usage());
        eprintln!("a subcommand is required; see --help");
        return Ok(ExitCode::from(2));
    };
    let ctx = Context {
        out: config.output.directory.clone(),
        svg: config.output.svg,
        config,
    };
    match command {
        Command::Coherence(args) => coherence(&ctx, args)?,
        Command::Fringes(args) => fringes(&ctx, args)?,
        Command::Simulate(args) => simulate(&ctx, args)?,
        Command::Timing(args) => timing(&ctx, args)?,
        Command::Spectrum(cmd) => spectrum(&ctx, cmd)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn micrometres(m: f64) -> String {
    if m >= 1e-3 {
        format!("{:.4} mm", m * 1e3)
    } else {
        format!("{:.1} µm", m * 1e6)
    }
}

fn coherence(ctx: &Context, args: CoherenceArgs) -> Result<()> {
    let cfg = &ctx.config;
    let lambda = args.lambda_nm.unwrap_or(cfg.source.center_wavelength_nm) * 1e-9;
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("--lambda-nm must be positive".into()));
    }
    let csv = args.spectrum_csv.clone().or_else(|| match cfg.source.kind {
        SourceKind::Csv => cfg.source.spectrum_csv.clone(),
        _ => None,
    });
    let gaussian_nm = args.gaussian_fwhm_nm.or(match (cfg.source.kind, &csv) {
        (SourceKind::Gaussian, None) => Some(cfg.source.gaussian_fwhm_nm),
        _ => None,
    });

    let curve = if let Some(dlambda_nm) = gaussian_nm {
        let lc = coherence_length_from_wavelength(lambda, dlambda_nm * 1e-9)?;
        println!("source: Gaussian line, λ = {:.3} nm, δλ = {} nm", lambda * 1e9, dlambda_nm);
        println!("coherence length 0.624·λ²/δλ = {}", micrometres(lc.prefactored_m));
        println!("coherence length λ²/δλ       = {}", micrometres(lc.unprefactored_m));
        let fwhm_hz = SPEED_OF_LIGHT * dlambda_nm * 1e-9 / (lambda * lambda);
        let end = args.dl_max_m.unwrap_or(3.0 * lc.unprefactored_m);
        visibility_curve(VisibilityModel::Gaussian { fwhm_hz }, 0.0, end, args.points)?
    } else {
        let (spectrum, default_end) = match &csv {
            Some(path) => {
                let spectrum = load_spectrum_csv(path)?;
                let est = envelope_linewidth(&spectrum)?;
                let lc = coherence_length_gaussian(est.fwhm_hz)?;
                println!("source: {} ({} samples)", path.display(), spectrum.as_sampled().map_or(0, |s| s.len()));
                println!(
                    "envelope FWHM = {:.4} nm ({:.4e} Hz)",
                    est.fwhm_wavelength_m * 1e9,
                    est.fwhm_hz
                );
                println!("coherence length 0.624·c/δν = {}", micrometres(lc.prefactored_m));
                println!("coherence length c/δν       = {}", micrometres(lc.unprefactored_m));
                (spectrum, 3.0 * lc.unprefactored_m)
            }
            None => {
                let comb = cfg.comb()?;
                let period = 2.0 * comb.cavity_length() / comb.order() as f64;
                println!(
                    "source: {}-mode comb, mode spacing {:.4e} Hz, mode linewidth {:.4e} Hz",
                    comb.n_modes(),
                    comb.line_spacing(),
                    comb.mode_linewidth()
                );
                println!("revival period 2L/k = {}", micrometres(period));
                println!("first zero 2L/(kN)  = {}", micrometres(period / comb.n_modes() as f64));
                (comb_spectrum(&comb), 2.5 * period)
            }
        };
        let end = args.dl_max_m.unwrap_or(default_end);
        if !(end > 0.0) {
            return Err(Error::InvalidArgument("--dl-max-m must be positive".into()));
        }
        if args.points < 2 {
            return Err(Error::InvalidArgument("--points must be >= 2".into()));
        }
        let dl = linspace(0.0, end, args.points);
        let taus: Vec<f64> = dl.iter().map(|d| d / SPEED_OF_LIGHT).collect();
        let gamma = coherence_at(&spectrum, &taus)?;
        dl.into_iter().zip(gamma).map(|(d, g)| (d, g.norm())).collect()
    };

    let path = ctx.output("visibility_curve.csv")?;
    write_visibility_curve(&path, &curve)?;
    println!("wrote {}", path.display());
    ctx.plot(
        "visibility_curve.svg",
        "Fringe visibility against path difference",
        "path difference (m)",
        "|γ|",
        &[Series {
            label: "|γ|",
            points: &curve,
        }],
    )
}

/// Beam moments of the two arms in the long-time limit: powers `r`, `1−r`
/// and cross term `√(r(1−r))·γ(Δτ)`.
fn static_moments(spectrum: &PowerSpectrum, paths: &PathConfig) -> Result<BeamMoments> {
    let r = paths.split_ratio;
    let gamma = coherence_at(spectrum, &[paths.delay_difference()])?[0];
    Ok(BeamMoments {
        i1: r,
        i2: 1.0 - r,
        cross: gamma * (r * (1.0 - r)).sqrt(),
    })
}

fn fringes(ctx: &Context, args: FringesArgs) -> Result<()> {
    let cfg = &ctx.config;
    let (geometry, mut paths) = if args.paper_defaults {
        let reference = PathConfig::reference();
        let equal = PathConfig {
            long_path_m: reference.short_path_m,
            ..reference
        };
        (DoubleSlitGeometry::reference(), equal)
    } else {
        (cfg.geometry.clone(), cfg.paths.clone())
    };
    if let Some(dl) = args.dl {
        paths.long_path_m = paths.short_path_m + dl;
        paths.validate()?;
    }
    let spectrum = cfg.spectrum()?;
    let moments = static_moments(&spectrum, &paths)?;
    let pattern = fringe_pattern_from_moments(&geometry, &moments, (0.0, 1.0), paths.polarization_overlap)?;
    let expected = fringe_spacing(&geometry)?;
    println!("fringe spacing λd/w = {:.4} mm", expected * 1e3);
    match pattern.peak_spacing(&geometry) {
        Some(s) => println!("measured peak spacing = {:.4} mm", s * 1e3),
        None => println!("measured peak spacing: fewer than two maxima in the central lobe"),
    }
    println!("arm path difference = {} m, visibility = {:.4}", paths.long_path_m - paths.short_path_m, pattern.visibility);

    let path = ctx.output("fringes.csv")?;
    write_fringe_pattern(&path, &pattern)?;
    println!("wrote {}", path.display());
    let points: Vec<(f64, f64)> = pattern.x.iter().copied().zip(pattern.intensity.iter().copied()).collect();
    ctx.plot(
        "fringes.svg",
        "Double-slit intensity",
        "screen position (m)",
        "intensity (a.u.)",
        &[Series {
            label: "I(x)",
            points: &points,
        }],
    )
}

fn simulate(ctx: &Context, args: SimulateArgs) -> Result<()> {
    let cfg = &ctx.config;
    let mut paths = cfg.paths.clone();
    if let Some(dl) = args.dl {
        paths.long_path_m = paths.short_path_m + dl;
        paths.validate()?;
    }
    let modes = args.modes.unwrap_or_else(|| cfg.simulation.mode_counts.clone());
    if modes.is_empty() || modes.contains(&0) {
        return Err(Error::InvalidArgument("--modes needs positive mode counts".into()));
    }
    let mut probe = cfg.clone();
    probe.simulation.mode_counts = modes.clone();
    let request = StatsRequest {
        threshold: args.threshold.unwrap_or(cfg.simulation.threshold),
        window: cfg.simulation.window_s,
        duration: cfg.simulation.duration_s,
        dt: probe.time_step()?,
        n_seeds: args.n_seeds.unwrap_or(cfg.simulation.n_seeds),
        seed: cfg.simulation.seed,
    };
    println!(
        "delay n·Δp/c = {:.4} µs, window {:.3e} s, threshold {}, {} trials per N, seed {}",
        paths.delay_difference() * 1e6,
        request.window,
        request.threshold,
        request.n_seeds,
        request.seed
    );
    println!("{:>4} {:>12} {:>10} {:>14}", "N", "probability", "stderr", "mean dur (s)");
    let mut rows = Vec::with_capacity(modes.len());
    for &n in &modes {
        let comb = cfg.comb_with_modes(n)?;
        let stats = visibility_statistics(&comb, &paths, &cfg.geometry, &request)?;
        let row = StatsRow::from(&stats);
        println!(
            "{:>4} {:>12.4} {:>10.4} {:>14.4e}",
            row.n_modes, row.occurrence_probability, row.stderr, row.mean_duration_s
        );
        rows.push(row);
    }
    let path = ctx.output("stats.csv")?;
    write_stats(&path, &rows)?;
    println!("wrote {}", path.display());
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n_modes as f64, r.occurrence_probability)).collect();
    ctx.plot(
        "stats.svg",
        "Occurrence of transient fringes",
        "mode count N",
        "probability",
        &[Series {
            label: "P(V ≥ threshold)",
            points: &points,
        }],
    )
}

fn timing(ctx: &Context, args: TimingArgs) -> Result<()> {
    let mut schedule = ctx.config.schedule();
    if let Some(dl) = args.dl {
        schedule.paths.long_path_m = schedule.paths.short_path_m + dl;
    }
    if let Some(n) = args.n {
        schedule.paths.refractive_index = n;
    }
    if let Some(t) = args.t_on {
        schedule.t_on = t;
    }
    if let Some(t) = args.t_off {
        schedule.t_off = t;
    }
    let fringes = !args.no_fringes;
    let trace = simulate_run(&schedule, |_| fringes)?;
    let dl = schedule.paths.long_path_m - schedule.paths.short_path_m;
    println!("n = {}, p₂ − p₁ = {} m", schedule.paths.refractive_index, dl);
    println!("t1 = {:.4} µs, t2 = {:.4} µs", trace.t1 * 1e6, trace.t2 * 1e6);
    println!("Δt = n(p₂ − p₁)/c = {:.4} µs", trace.delta_t * 1e6);
    println!(
        "note: the originally reported calculated values are 29.3 µs (600 m) and 48.9 µs (1000 m), \
         ten times n(p₂ − p₁)/c for n = 1.4677; the formula is applied as written"
    );
    if trace.degenerate {
        println!("source pulse is shorter than Δt: the beams never overlap");
    }
    for (i, w) in measure_delta_t(&trace).iter().enumerate() {
        println!("AND window {}: {:.4} µs", i + 1, w * 1e6);
    }
    println!("XOR duration: {:.4} µs", measure_interference_duration(&trace) * 1e6);

    let path = ctx.output("trace.csv")?;
    write_logic_trace(&path, &trace)?;
    println!("wrote {}", path.display());
    if ctx.svg {
        let step = |pick: fn(&fringelab::timing_logic::LogicEvent) -> bool, offset: f64| {
            let mut pts = Vec::new();
            let mut level = 0.0;
            for e in &trace.events {
                pts.push((e.time, level + offset));
                level = if pick(e) { 1.0 } else { 0.0 };
                pts.push((e.time, level + offset));
            }
            pts
        };
        let and = step(|e| e.and_out, 0.0);
        let xor = step(|e| e.xor_out, 1.5);
        ctx.plot(
            "trace.svg",
            "Gate outputs",
            "time (s)",
            "level",
            &[
                Series { label: "AND", points: &and },
                Series { label: "XOR (+1.5)", points: &xor },
            ],
        )?;
    }
    Ok(())
}

fn spectrum(ctx: &Context, cmd: SpectrumCommand) -> Result<()> {
    match cmd {
        SpectrumCommand::Synthesize { display_fwhm_hz, points } => {
            let cfg = &ctx.config;
            if points < 2 {
                return Err(Error::InvalidArgument("--points must be >= 2".into()));
            }
            let sampled = match cfg.source.kind {
                SourceKind::Comb => {
                    let comb = cfg.comb()?;
                    let fwhm = display_fwhm_hz.unwrap_or(comb.line_spacing() / 8.0);
                    if !(fwhm > 0.0) {
                        return Err(Error::InvalidArgument("--display-fwhm-hz must be positive".into()));
                    }
                    let display = ModeComb::new(
                        comb.center_frequency(),
                        comb.cavity_length(),
                        comb.order(),
                        comb.amplitudes().to_vec(),
                        fwhm,
                    )?;
                    let lines = comb_spectrum(&display);
                    let half = 0.5 * comb.span() + 2.0 * comb.line_spacing().max(fwhm);
                    let nu0 = comb.center_frequency();
                    let grid = linspace(nu0 - half, nu0 + half, points);
                    PowerSpectrum::from(lines.as_lines().expect("comb is a line list").render(&grid)?)
                }
                _ => cfg.spectrum()?,
            };
            let path = ctx.output("spectrum.csv")?;
            write_spectrum_csv(&sampled, &path)?;
            println!("wrote {}", path.display());
            report_spectrum(&sampled);
            Ok(())
        }
        SpectrumCommand::Inspect { path } => {
            let spectrum = load_spectrum_csv(&path)?;
            report_spectrum(&spectrum);
            Ok(())
        }
    }
}

fn report_spectrum(spectrum: &PowerSpectrum) {
    let centroid = spectrum.centroid();
    println!("total power = {:.6e}", spectrum.total_power());
    println!("centroid = {:.4} nm", SPEED_OF_LIGHT / centroid * 1e9);
    match envelope_linewidth(spectrum) {
        Ok(est) => {
            println!(
                "envelope FWHM = {:.4} nm ({:.4e} Hz)",
                est.fwhm_wavelength_m * 1e9,
                est.fwhm_hz
            );
            if let Ok(lc) = coherence_length_gaussian(est.fwhm_hz) {
                println!(
                    "coherence length 0.624·c/δν = {}, c/δν = {}",
                    micrometres(lc.prefactored_m),
                    micrometres(lc.unprefactored_m)
                );
            }
        }
        Err(e) => println!("envelope FWHM unavailable: {e}"),
    }
}
