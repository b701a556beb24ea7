use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use warpfield::bend::{build_gl_curve, homotopy_curve, stage1_homotopy};
use warpfield::config::RunConfig;
use warpfield::curvature::curvature_certificate;
use warpfield::error::{Error, Result};
use warpfield::isotopy::gromov_lawson_isotopy;
use warpfield::path::MetricPath;
use warpfield::radial::{uniform, RadialProfile};
use warpfield::retract::{classify, deformation_retract};
use warpfield::suite;
use warpfield::surgery::{handle_curvature_certificate, surgery_j, surgery_j_inv, StdMetricDescriptor};
use warpfield::svg::{Plot, Series};
use warpfield::torpedo::{torpedo_profile, TorpedoSpec};

#[derive(Parser)]
#[command(name = "warpfield", version, about = "Certified torpedo metrics, Gromov-Lawson bends, isotopies and retracts")]
struct Cli {
    /// JSON run configuration; command-line flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Torpedo profile f_delta on [0, b] and its curvature certificate
    Torpedo {
        #[arg(long)]
        delta: f64,
        /// neck end; defaults to the cap delta*pi/2
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Bend curve for a tube of radius rho-bar and the homotopy back to the straight segment
    Bend {
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        rho_bar: f64,
        /// ambient tube profile (default: flat f = r on [0, rho-bar])
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Isotopy from a psc tube profile to torpedo form
    Isotopy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Classify an almost-standard profile and retract it to standard form
    Retract {
        #[arg(long)]
        input: PathBuf,
        /// defaults to the end of the profile's domain
        #[arg(long)]
        rho_std: Option<f64>,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        classify_json: Option<PathBuf>,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Surgery map on a standard-metric descriptor
    Surgery {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long)]
        out: Option<PathBuf>,
        /// certificate of the attached handle
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Run the property suite and print a summary table
    Verify {
        #[arg(long)]
        seed: Option<u64>,
        /// run a single check by number (1-8)
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        only: Option<u8>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Fwd,
    Inv,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

fn read_profile(path: &Path) -> Result<RadialProfile> {
    let f = File::open(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    RadialProfile::read_csv(BufReader::new(f))
}

fn write_path(path: &MetricPath, out: Option<&PathBuf>, cert: Option<&PathBuf>) -> Result<()> {
    if let Some(o) = out {
        path.write_csv(create(o)?)?;
    }
    if let Some(c) = cert {
        write_text(c, &serde_json::to_string_pretty(&path.summary()).expect("summary serializes"))?;
    }
    Ok(())
}

fn profile_series(label: &str, p: &RadialProfile) -> Series {
    let pts = uniform(0.0, p.r_max(), 400).into_iter().map(|r| (r, p.eval(r).map_or(f64::NAN, |j| j.f)));
    Series::new(label, pts.collect())
}

fn path_plot(title: &str, path: &MetricPath) -> Plot {
    let mut plot = Plot::new(title, "r", "f");
    let n = path.len();
    for k in [0, n / 4, n / 2, 3 * n / 4, n - 1] {
        let st = &path.steps[k];
        plot.series.push(profile_series(&format!("{} s={:.2}", st.stage, st.s), &st.profile));
    }
    plot
}

fn report(pass: bool, what: &str) -> ExitCode {
    println!("{what}: {}", if pass { "PASS" } else { "FAIL" });
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.cmd {
        Command::Torpedo { delta, b, n, out, cert, svg } => {
            let b = b.unwrap_or(delta * std::f64::consts::FRAC_PI_2);
            let spec = TorpedoSpec { delta, b, smoothing_width: cfg.smoothing_width };
            let prof = torpedo_profile(&spec)?;
            let c = curvature_certificate(&prof, n, cfg.grid_points, cfg.margin_for(n, Some(delta)))?;
            if let Some(o) = &out {
                prof.write_csv(create(o)?)?;
            }
            if let Some(o) = &cert {
                write_text(o, &c.to_json())?;
            }
            if let Some(o) = &svg {
                let mut plot = Plot::new(&format!("torpedo f_delta, delta = {delta}"), "r", "f");
                plot.equal_aspect = true;
                plot.series.push(profile_series("f_delta", &prof));
                plot.markers.push((delta * std::f64::consts::FRAC_PI_2, "delta*pi/2".into()));
                write_text(o, &plot.render())?;
            }
            println!("R_min = {} at r = {}", c.r_min, c.r_min_location);
            Ok(report(c.pass, "torpedo certificate"))
        }
        Command::Bend { p, q, delta, rho_bar, input, steps, out, path, cert, svg } => {
            if let Some(d) = delta {
                cfg.delta = d;
            }
            if let Some(s) = steps {
                cfg.steps = s;
            }
            cfg.validate()?;
            let amb = match &input {
                Some(i) => read_profile(i)?,
                None => RadialProfile::flat(rho_bar)?,
            };
            let margin = cfg.margin_for(p + q + 1, Some(cfg.delta));
            let (curve, curve_cert) = build_gl_curve(&amb, p, q, cfg.delta, margin)?;
            let homotopy = stage1_homotopy(&curve, &amb, p, q, cfg.steps, margin)?;
            if let Some(o) = &out {
                curve.write_csv(create(o)?)?;
            }
            write_path(&homotopy, path.as_ref(), cert.as_ref())?;
            if let Some(o) = &svg {
                let mut plot = Plot::new("bending curves gamma_s", "t", "r");
                plot.equal_aspect = true;
                for s in [0.25, 0.5, 0.75, 1.0] {
                    let g = homotopy_curve(&curve, s)?;
                    plot.series.push(Series::new(format!("s = {s}"), g.nodes().iter().map(|n| (n.t, n.r)).collect()));
                }
                write_text(o, &plot.render())?;
            }
            println!("curve R_min = {}; homotopy {} steps", curve_cert.r_min, homotopy.len());
            Ok(report(curve_cert.pass && homotopy.all_pass(), "bend certificates"))
        }
        Command::Isotopy { input, p, q, delta, steps, out, cert, svg } => {
            if let Some(d) = delta {
                cfg.delta = d;
            }
            if let Some(s) = steps {
                cfg.steps = s;
            }
            let amb = read_profile(&input)?;
            let path = gromov_lawson_isotopy(&amb, p, q, &cfg)?;
            write_path(&path, out.as_ref(), cert.as_ref())?;
            if let Some(o) = &svg {
                write_text(o, &path_plot("isotopy to torpedo form", &path).render())?;
            }
            let (s, r) = path.worst().unwrap_or((0.0, f64::NAN));
            println!("{} steps; worst R_min = {r} at s = {s}", path.len());
            Ok(report(path.all_pass(), "isotopy certificates"))
        }
        Command::Retract { input, rho_std, p, q, steps, out, classify_json, cert, svg } => {
            if let Some(s) = steps {
                cfg.steps = s;
            }
            let w = read_profile(&input)?;
            let rho_std = rho_std.unwrap_or(w.r_max());
            let c = classify(&w, rho_std, cfg.zero_tol)?;
            if let Some(o) = &classify_json {
                write_text(o, &serde_json::to_string_pretty(&c).expect("classification serializes"))?;
            }
            let path = deformation_retract(&w, rho_std, p, q, &cfg)?;
            write_path(&path, out.as_ref(), cert.as_ref())?;
            if let Some(o) = &svg {
                let mut plot = Plot::new(&format!("profile w (case {}) and its retraction", c.case_id), "r", "w");
                plot.series.push(profile_series("w", &w));
                plot.series.push(profile_series("endpoint", path.last().expect("path")).dashed());
                for (label, v) in [("rho'0", c.rho_p0), ("rho''0", c.rho_pp0), ("rho_std", Some(c.rho_std))] {
                    if let Some(v) = v {
                        plot.markers.push((v, label.into()));
                    }
                }
                write_text(o, &plot.render())?;
            }
            println!("case {} at rho_0 = {}; {} steps", c.case_id, c.rho_0, path.len());
            Ok(report(path.all_pass(), "retract certificates"))
        }
        Command::Surgery { input, direction, out, cert } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::Usage(format!("cannot read {}: {e}", input.display())))?;
            let d = StdMetricDescriptor::from_json(&text)?;
            let res = match direction {
                Direction::Fwd => surgery_j(&d)?,
                Direction::Inv => surgery_j_inv(&d)?,
            };
            // the handle on the side being produced: D^{q'+1} × S^{p'} in its own labels
            let (hp, hq) = (res.q, res.p);
            let n = hp + hq + 1;
            let h = handle_curvature_certificate(hp, hq, res.delta, res.delta, cfg.margin_for(n, Some(res.delta)))?;
            match &out {
                Some(o) => write_text(o, &res.to_json())?,
                None => println!("{}", res.to_json()),
            }
            if let Some(o) = &cert {
                write_text(o, &h.to_json())?;
            }
            Ok(report(h.pass, "handle certificate"))
        }
        Command::Verify { seed, only, json } => {
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.validate()?;
            let outcomes = match only {
                Some(id) => vec![suite::run_check(id, &cfg)],
                None => suite::run_all(&cfg),
            };
            println!("warpfield verify (seed {})", cfg.seed);
            for o in &outcomes {
                println!("{}", o.line());
            }
            if let Some(j) = &json {
                write_text(j, &serde_json::to_string_pretty(&outcomes).expect("outcomes serialize"))?;
            }
            let passed = outcomes.iter().filter(|o| o.pass).count();
            println!("{passed}/{} checks passed", outcomes.len());
            Ok(if passed == outcomes.len() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("WARPFIELD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Usage(format!("WARPFIELD_THREADS must be a positive integer (got {v:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Usage(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not errors
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match init_threads().and_then(|_| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_math_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
