use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use fusionface::config::{load_config, RunConfig};
use fusionface::dataset::{load_dataset, load_image, load_landmarks, save_image, split, RawImage, Sample};
use fusionface::features::{lbp_map, BANK_ORIENTATIONS_DEG, BANK_WAVELENGTHS, NON_UNIFORM};
use fusionface::pipeline::{
    evaluate, load_model, predict, prepare, save_model, train_all, Extractor, FrameworkId, FusionModel,
};
use fusionface::preprocess::{crop_central_face, crop_lower_face, FaceGrid};
use fusionface::synthetic::{generate, write_dataset, SyntheticSpec};
use fusionface::{Error, Label};

const EXIT_CONFIG: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_TRAINING: u8 = 4;
const EXIT_MODEL: u8 = 5;

#[derive(Parser)]
#[command(name = "fusionface", version, about = "Train and run the four-framework fused face classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train all frameworks on the training split and write a model file.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the split and training seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Record `created = 0` so repeated runs produce identical files.
        #[arg(long)]
        reproducible: bool,
    },
    /// Print per-framework and fused recognition rates on the test split.
    Eval {
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Split seed; defaults to the one recorded in the model.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Classify one image and print the full voting trace.
    Predict {
        model: PathBuf,
        image: PathBuf,
        landmarks: PathBuf,
    },
    /// Dump the intermediate images of the feature pipeline.
    Inspect {
        image: PathBuf,
        landmarks: PathBuf,
        #[arg(long)]
        dump: PathBuf,
        /// Also write the 12 Gabor magnitude maps.
        #[arg(long)]
        gabor: bool,
    },
    /// Generate a labelled synthetic dataset with a matching config file.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    error: Error,
}

type CmdResult = std::result::Result<(), Failure>;

trait ExitWith<T> {
    fn exit_with(self, code: u8) -> std::result::Result<T, Failure>;
}

impl<T> ExitWith<T> for fusionface::Result<T> {
    fn exit_with(self, code: u8) -> std::result::Result<T, Failure> {
        self.map_err(|error| Failure { code, error })
    }
}

fn require_exists(path: &Path, what: &str) -> CmdResult {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_DATA,
            error: Error::InsufficientData(format!("{what} {} does not exist", path.display())),
        })
    }
}

fn load_run(config: &Path, seed: Option<u64>) -> std::result::Result<RunConfig, Failure> {
    let mut run = load_config(config).exit_with(EXIT_CONFIG)?;
    if let Some(seed) = seed {
        run.pipeline.split.seed = seed;
        run.pipeline.train.seed = seed;
    }
    require_exists(&run.data_dir, "data directory")?;
    require_exists(&run.manifest, "manifest")?;
    Ok(run)
}

fn load_input(image: &Path, landmarks: &Path) -> std::result::Result<Sample, Failure> {
    let img = load_image(image).exit_with(EXIT_DATA)?;
    let lm = load_landmarks(landmarks).exit_with(EXIT_DATA)?;
    let id = image.file_stem().map_or("input".into(), |s| s.to_string_lossy().into_owned());
    // the label is not used for prediction
    Ok(Sample::new(id, img, lm, Label::Female))
}

fn framework_summary(model: &FusionModel) -> String {
    let mut out = String::new();
    for fw in &model.frameworks {
        let dims = fw.pca.as_ref().map_or(String::new(), |p| format!(", pca {} -> {}", p.input_dim(), p.output_dim()));
        out.push_str(&format!(
            "{} weight {:.4} ({}{dims})\n",
            fw.id,
            model.weights[fw.id.index()],
            fw.classifier.kind()
        ));
    }
    out
}

fn cmd_train(config: &Path, seed: Option<u64>, out: &Path, reproducible: bool) -> CmdResult {
    let run = load_run(config, seed)?;
    let samples = load_dataset(&run.data_dir, &run.manifest).exit_with(EXIT_DATA)?;
    let (train, test) = split(&samples, |s| s.label, &run.pipeline.split).exit_with(EXIT_DATA)?;
    log::info!("training on {} samples, {} held for testing", train.len(), test.len());
    let model = train_all(&train, &run.pipeline).exit_with(EXIT_TRAINING)?;
    let created = if reproducible {
        0
    } else {
        SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
    };
    save_model(&model, out, created).exit_with(EXIT_DATA)?;
    print!("{}", framework_summary(&model));
    println!("model written to {}", out.display());
    Ok(())
}

fn cmd_eval(model_path: &Path, config: &Path, seed: Option<u64>, csv: Option<&Path>) -> CmdResult {
    let model = load_model(model_path).exit_with(EXIT_MODEL)?;
    let run = load_run(config, None)?;
    let mut spec = model.config.split;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    let samples = load_dataset(&run.data_dir, &run.manifest).exit_with(EXIT_DATA)?;
    let (_, test) = split(&samples, |s| s.label, &spec).exit_with(EXIT_DATA)?;
    let report = evaluate(&model, &test).exit_with(EXIT_DATA)?;
    print!("{}", report.to_table());
    if let Some(path) = csv {
        std::fs::write(path, report.to_csv())
            .map_err(|e| Error::io(path, e))
            .exit_with(EXIT_DATA)?;
    }
    Ok(())
}

fn cmd_predict(model_path: &Path, image: &Path, landmarks: &Path) -> CmdResult {
    let model = load_model(model_path).exit_with(EXIT_MODEL)?;
    let sample = load_input(image, landmarks)?;
    let p = predict(&model, &sample).exit_with(EXIT_DATA)?;
    println!("fused {} {}", p.fused, p.fused.name());
    for id in FrameworkId::ALL {
        let i = id.index();
        println!("framework {id} vote {} score {} weight {}", p.votes[i], p.scores[i], model.weights[i]);
    }
    println!("weighted_sum {}", p.weighted_sum);
    Ok(())
}

fn grid_image(grid: &FaceGrid, scale: f64) -> RawImage {
    let data = grid.values().iter().map(|v| (v * scale).round().clamp(0.0, 255.0) as u8).collect();
    RawImage::new(30, 30, 1, data).expect("grid is 30x30")
}

fn write_pgm(dir: &Path, name: &str, img: &RawImage) -> CmdResult {
    save_image(img, dir.join(name)).exit_with(EXIT_DATA)
}

fn cmd_inspect(image: &Path, landmarks: &Path, dump: &Path, gabor: bool) -> CmdResult {
    let sample = load_input(image, landmarks)?;
    std::fs::create_dir_all(dump)
        .map_err(|e| Error::io(dump, e))
        .exit_with(EXIT_DATA)?;
    let prepared = prepare(&sample);
    let central = crop_central_face(&prepared.image, &prepared.landmarks).exit_with(EXIT_DATA)?;
    let lower = crop_lower_face(&prepared.image, &prepared.landmarks).exit_with(EXIT_DATA)?;
    write_pgm(dump, "central.pgm", &central.into_raw())?;
    write_pgm(dump, "lower.pgm", &lower.into_raw())?;

    let extractor = Extractor::new(Default::default()).exit_with(EXIT_CONFIG)?;
    let grid = prepared.central_grid().exit_with(EXIT_DATA)?;
    let map = lbp_map(&grid, &extractor.config().lbp).exit_with(EXIT_DATA)?;
    let levels: Vec<u8> = map
        .to_feature()
        .iter()
        .map(|&c| (c * 255.0 / f64::from(NON_UNIFORM)).round() as u8)
        .collect();
    write_pgm(dump, "lbp.pgm", &RawImage::new(map.cols, map.rows, 1, levels).exit_with(EXIT_DATA)?)?;

    if gabor {
        let features = extractor.f2(&grid).exit_with(EXIT_DATA)?;
        let mut k = 0;
        for lambda in BANK_WAVELENGTHS {
            for theta in BANK_ORIENTATIONS_DEG {
                let values = features[k * 900..(k + 1) * 900].to_vec();
                let peak = values.iter().fold(0.0f64, |m, v| m.max(*v));
                let scale = if peak > 0.0 { 255.0 / peak } else { 0.0 };
                let grid = FaceGrid::new(values).exit_with(EXIT_DATA)?;
                write_pgm(dump, &format!("gabor_l{lambda}_t{theta}.pgm"), &grid_image(&grid, scale))?;
                k += 1;
            }
        }
    }
    println!("wrote intermediate images to {}", dump.display());
    Ok(())
}

fn cmd_synth(out: &Path, count: usize, seed: u64) -> CmdResult {
    let samples = generate(&SyntheticSpec {
        count,
        seed,
        ..SyntheticSpec::default()
    });
    write_dataset(out, &samples).exit_with(EXIT_DATA)?;
    let config = out.join("fusionface.conf");
    std::fs::write(&config, format!("data_dir = .\nmanifest = manifest.csv\nseed = {seed}\n"))
        .map_err(|e| Error::io(&config, e))
        .exit_with(EXIT_DATA)?;
    println!("wrote {count} samples and {}", config.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FUSIONFACE_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train {
            config,
            seed,
            out,
            reproducible,
        } => cmd_train(config, *seed, out, *reproducible),
        Command::Eval {
            model,
            config,
            seed,
            csv,
        } => cmd_eval(model, config, *seed, csv.as_deref()),
        Command::Predict {
            model,
            image,
            landmarks,
        } => cmd_predict(model, image, landmarks),
        Command::Inspect {
            image,
            landmarks,
            dump,
            gabor,
        } => cmd_inspect(image, landmarks, dump, *gabor),
        Command::Synth { out, count, seed } => cmd_synth(out, *count, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
