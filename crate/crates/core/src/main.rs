use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};

use tumor_shape::contour::{trace_boundary_in, Representations};
use tumor_shape::pipeline::synthetic::{generate_cohort, write_cohort, CohortSpec};
use tumor_shape::pipeline::{
    aggregate_patients, build_report, extract_directory, fit_model, predict, read_clinical, read_slide_map,
    write_failures, write_report, FeatureTable, Model, PipelineError, ReportInputs, RunConfig,
};
use tumor_shape::raster::{fill_holes, segment_tissues_with, segment_tumors_with, HeatMap};
use tumor_shape::survival::{dichotomize, RiskGroup};

#[derive(Parser)]
#[command(name = "tumor-shape", version, about = "Tumor shape descriptors and survival models from heat maps")]
struct Cli {
    /// Flat `key = value` run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one heat map and list its tissues and tumors.
    Segment {
        heatmap: PathBuf,
        /// Write every tumor's representations as CSV files into this directory.
        #[arg(long)]
        dump_reps: Option<PathBuf>,
    },
    /// Compute per-tumor features for every `*.txt` heat map in a directory.
    Extract {
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Append the extended descriptors.
        #[arg(long)]
        extended: bool,
        /// Worker threads (0 for one per core).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Median primary-tumor features per patient.
    Aggregate {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "features.csv")]
        features: PathBuf,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Univariate Cox screening and a cross-validated lasso-Cox model.
    Fit {
        #[arg(long)]
        clinical: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value = "slides.csv")]
        map: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Risk scores and groups per patient.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value = "slides.csv")]
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tables and plots for a fitted model applied to a cohort.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "model.csv")]
        model: PathBuf,
        #[arg(long, default_value = "features.csv")]
        features: PathBuf,
        #[arg(long, default_value = "slides.csv")]
        map: PathBuf,
        #[arg(long, default_value = "clinical.csv")]
        clinical: PathBuf,
    },
    /// Write a synthetic cohort: heat maps, slide map and clinical table.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 120)]
        patients: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), PipelineError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| PipelineError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dump_reps(dir: &Path, stem: &str, reps: &Representations) -> Result<(), PipelineError> {
    let io = |p: &Path| {
        let path = p.display().to_string();
        move |source| PipelineError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut files: Vec<(&str, String)> = Vec::new();
    let points = |pts: &mut dyn Iterator<Item = (String, String)>| {
        let mut s = String::from("x,y\n");
        for (x, y) in pts {
            s.push_str(&format!("{x},{y}\n"));
        }
        s
    };
    files.push(("chain", points(&mut reps.chain.points().iter().map(|p| (p.x.to_string(), p.y.to_string())))));
    files.push(("hull", points(&mut reps.hull.points().iter().map(|p| (p.x.to_string(), p.y.to_string())))));
    files.push((
        "box",
        points(&mut reps.bounding_box.corners().iter().map(|p| (p.x.to_string(), p.y.to_string()))),
    ));
    let column = |name: &str, v: Vec<String>| format!("{name}\n{}\n", v.join("\n"));
    files.push(("chain_code", column("code", reps.chain_code.codes().iter().map(u8::to_string).collect())));
    files.push(("curvature", column("curvature", reps.curvature.values().iter().map(i8::to_string).collect())));
    let r = &reps.radial;
    let mut radial = String::from("raw,normalized,smoothed\n");
    for i in 0..r.raw.len() {
        radial.push_str(&format!("{},{},{}\n", r.raw[i], r.normalized[i], r.smoothed[i]));
    }
    files.push(("radial", radial));
    for (name, text) in files {
        let p = dir.join(format!("{stem}_{name}.csv"));
        std::fs::write(&p, text).map_err(io(&p))?;
    }
    Ok(())
}

fn segment(heatmap: &Path, dump: Option<&Path>, cfg: &RunConfig) -> Result<(), PipelineError> {
    let hm = HeatMap::read(heatmap)?;
    println!("tissue_id,tissue_area,tumor_id,tumor_area,holes");
    for (t, tissue) in segment_tissues_with(&hm, cfg.tissue_fraction).iter().enumerate() {
        let seg = segment_tumors_with(tissue, &hm, cfg.min_tumor_area);
        for (k, area) in seg.areas.iter().enumerate() {
            let id = k as u32 + 1;
            let holes = seg.holes_of(id).count();
            println!("{},{},{id},{area},{holes}", t + 1, tissue.count());
            if let Some(dir) = dump {
                let chain = trace_boundary_in(&fill_holes(&seg.tumor(id)), hm.height())
                    .map_err(|e| PipelineError::NoData(format!("tissue {} tumor {id}: {e}", t + 1)))?;
                let reps = Representations::from_chain(chain, cfg.smoothing_fraction)
                    .map_err(|e| PipelineError::NoData(format!("tissue {} tumor {id}: {e}", t + 1)))?;
                dump_reps(dir, &format!("tissue{}_tumor{id}", t + 1), &reps)?;
            }
        }
    }
    Ok(())
}

fn extract(dir: &Path, out: &Path, extended: bool, cfg: &RunConfig) -> Result<bool, PipelineError> {
    let batch = extract_directory(dir, cfg)?;
    let table = FeatureTable::from_batch(&batch, extended);
    table.write(out)?;
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    table.primary().write(&out.with_file_name(format!("{stem}_primary.csv")))?;
    write_failures(&out.with_file_name("errors.csv"), &batch.failures)?;
    info!(
        "{} files, {} unreadable, {} tumor rows",
        batch.n_files,
        batch.n_unreadable,
        table.rows.len()
    );
    if !batch.failures.is_empty() {
        warn!("{} failures listed in errors.csv", batch.failures.len());
    }
    Ok(!batch.all_failed())
}

fn run(cli: Cli) -> Result<bool, PipelineError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Segment { heatmap, dump_reps } => segment(&heatmap, dump_reps.as_deref(), &cfg)?,
        Command::Extract {
            dir,
            out,
            extended,
            threads,
        } => {
            if let Some(t) = threads {
                cfg.threads = t;
            }
            return extract(&dir, &out, extended, &cfg);
        }
        Command::Aggregate { map, features, out } => {
            let table = FeatureTable::read(&features)?;
            let patients = aggregate_patients(&table, &read_slide_map(&map)?)?;
            write_or_print(out.as_deref(), &patients.to_csv_string())?;
        }
        Command::Fit {
            clinical,
            features,
            map,
            out,
            seed,
        } => {
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let table = FeatureTable::read(&features)?;
            let fit = fit_model(&table, &read_slide_map(&map)?, &read_clinical(&clinical)?, &cfg)?;
            fit.write(&out)?;
            info!(
                "{} patients, lambda_1se {}, {} of {} features kept",
                fit.n_patients,
                fit.cv.lambda_1se,
                fit.model.active().count(),
                fit.model.terms.len()
            );
        }
        Command::Predict {
            model,
            features,
            map,
            out,
        } => {
            let model = Model::read(&model)?;
            let patients = aggregate_patients(&FeatureTable::read(&features)?, &read_slide_map(&map)?)?;
            let scores = predict(&model, &patients)?;
            let groups = dichotomize(&scores);
            let mut text = String::from("patient_id,risk_score,risk_group\n");
            for ((id, s), g) in patients.ids.iter().zip(&scores).zip(&groups) {
                let g = if *g == RiskGroup::High { "high" } else { "low" };
                text.push_str(&format!("{id},{s},{g}\n"));
            }
            write_or_print(out.as_deref(), &text)?;
        }
        Command::Report {
            out,
            model,
            features,
            map,
            clinical,
        } => {
            let inputs = ReportInputs::load(&model, &features, &map, &clinical)?;
            write_report(&build_report(&inputs)?, &out)?;
        }
        Command::Simulate { out, patients, seed } => {
            let spec = CohortSpec {
                n_patients: patients,
                seed,
                ..CohortSpec::default()
            };
            write_cohort(&generate_cohort(&spec), &out)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: every input file failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
