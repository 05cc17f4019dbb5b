//! Flat `key = value` run configuration with `#` comments.
//!
//! ```text
//! data_dir = faces          # relative paths resolve against the config file
//! manifest = faces/manifest.csv
//! seed = 42
//! mlp_epochs = 2000
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::features::GaborMagnitude;
use crate::pipeline::{PipelineConfig, WeightMode};
use crate::preprocess::OutlineFrame;
use crate::subspace::RetentionRule;

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub manifest: PathBuf,
    pub pipeline: PipelineConfig,
}

const KEYS: &[&str] = &[
    "data_dir",
    "manifest",
    "seed",
    "train_fraction",
    "stratified",
    "pca_energy",
    "pca_rule",
    "mlp_hidden",
    "mlp_learning_rate",
    "mlp_epochs",
    "mlp_init_scale",
    "svm_c",
    "svm_gamma",
    "svm_tol",
    "svm_max_passes",
    "lda_ridge",
    "gabor_magnitude",
    "outline_frame",
    "weight_mode",
    "weight_fraction",
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::UnsupportedConfig(format!("line {}: expected `key = value`", n + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::UnsupportedConfig(format!("line {}: unknown key `{key}`", n + 1)));
        }
        if pairs.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(Error::UnsupportedConfig(format!("line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(pairs)
}

struct Reader {
    pairs: BTreeMap<String, String>,
}

impl Reader {
    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.pairs.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::UnsupportedConfig(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    /// `auto` maps to `None`.
    fn get_auto(&self, key: &str) -> Result<Option<f64>> {
        match self.pairs.get(key).map(String::as_str) {
            None | Some("auto") => Ok(None),
            Some(_) => self.get(key, 0.0).map(Some),
        }
    }

    fn choice<T: Copy>(&self, key: &str, default: T, options: &[(&str, T)]) -> Result<T> {
        match self.pairs.get(key) {
            None => Ok(default),
            Some(v) => options.iter().find(|(name, _)| name == v).map(|&(_, t)| t).ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                Error::UnsupportedConfig(format!("`{key}` must be one of {}, got `{v}`", names.join("|")))
            }),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::UnsupportedConfig(format!("`{key}` must be positive, got {v}")))
    }
}

fn fraction(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::UnsupportedConfig(format!("`{key}` must lie in (0, 1), got {v}")))
    }
}

/// Parses configuration text; relative paths are joined onto `base`.
pub fn parse_config(text: &str, base: &Path) -> Result<RunConfig> {
    let r = Reader { pairs: parse_pairs(text)? };
    let d = PipelineConfig::default();
    let mut p = d;

    let seed = r.get("seed", d.split.seed)?;
    p.split.seed = seed;
    p.train.seed = seed;
    p.split.train_fraction = fraction("train_fraction", r.get("train_fraction", d.split.train_fraction)?)?;
    p.split.stratified = r.get("stratified", d.split.stratified)?;

    let energy = r.get("pca_energy", d.pca.energy)?;
    if !(energy > 0.0 && energy <= 1.0) {
        return Err(Error::UnsupportedConfig(format!("`pca_energy` must lie in (0, 1], got {energy}")));
    }
    p.pca.energy = energy;
    p.pca.rule = r.choice(
        "pca_rule",
        d.pca.rule,
        &[("cumulative", RetentionRule::Cumulative), ("individual", RetentionRule::Individual)],
    )?;

    p.train.mlp.hidden = r.get("mlp_hidden", d.train.mlp.hidden)?;
    if p.train.mlp.hidden == 0 {
        return Err(Error::UnsupportedConfig("`mlp_hidden` must be positive".into()));
    }
    p.train.mlp.learning_rate = positive("mlp_learning_rate", r.get("mlp_learning_rate", d.train.mlp.learning_rate)?)?;
    p.train.mlp.epochs = r.get("mlp_epochs", d.train.mlp.epochs)?;
    p.train.mlp.init_scale = r.get_auto("mlp_init_scale")?.map(|v| positive("mlp_init_scale", v)).transpose()?;

    p.train.svm.c = positive("svm_c", r.get("svm_c", d.train.svm.c)?)?;
    p.train.svm.gamma = positive("svm_gamma", r.get("svm_gamma", d.train.svm.gamma)?)?;
    p.train.svm.tol = positive("svm_tol", r.get("svm_tol", d.train.svm.tol)?)?;
    p.train.svm.max_passes = r.get("svm_max_passes", d.train.svm.max_passes)?;
    p.train.lda_ridge = r.get_auto("lda_ridge")?.map(|v| positive("lda_ridge", v)).transpose()?;

    p.extract.gabor.magnitude = r.choice(
        "gabor_magnitude",
        d.extract.gabor.magnitude,
        &[("quadrature", GaborMagnitude::Quadrature), ("odd_phase", GaborMagnitude::OddPhase)],
    )?;
    p.extract.outline_frame = r.choice(
        "outline_frame",
        d.extract.outline_frame,
        &[("crop_box", OutlineFrame::CropBox), ("raw", OutlineFrame::Raw)],
    )?;
    p.weight_mode = r.choice(
        "weight_mode",
        d.weight_mode,
        &[("holdout", WeightMode::Holdout), ("training", WeightMode::Training)],
    )?;
    p.weight_fraction = fraction("weight_fraction", r.get("weight_fraction", d.weight_fraction)?)?;

    let path = |key: &str| -> Result<PathBuf> {
        let v = r
            .pairs
            .get(key)
            .ok_or_else(|| Error::UnsupportedConfig(format!("missing required key `{key}`")))?;
        Ok(base.join(v))
    };
    let data_dir = path("data_dir")?;
    let manifest = match r.pairs.get("manifest") {
        Some(m) => base.join(m),
        None => data_dir.join("manifest.csv"),
    };
    Ok(RunConfig {
        data_dir,
        manifest,
        pipeline: p,
    })
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let text = "# run\ndata_dir = faces\nseed = 9   # both seeds\nsvm_c = 2.5\nmlp_init_scale = auto\nlda_ridge = 0.01\nweight_mode = training\n";
        let c = parse_config(text, Path::new("/cfg")).unwrap();
        assert_eq!(c.data_dir, PathBuf::from("/cfg/faces"));
        assert_eq!(c.manifest, PathBuf::from("/cfg/faces/manifest.csv"));
        assert_eq!((c.pipeline.split.seed, c.pipeline.train.seed), (9, 9));
        assert_eq!(c.pipeline.train.svm.c, 2.5);
        assert_eq!(c.pipeline.train.mlp.init_scale, None);
        assert_eq!(c.pipeline.train.lda_ridge, Some(0.01));
        assert_eq!(c.pipeline.weight_mode, WeightMode::Training);
        assert_eq!(c.pipeline.pca.energy, 0.999);
        assert_eq!(c.pipeline.train.mlp.epochs, 2000);
    }

    #[test]
    fn absolute_manifest_is_kept() {
        let c = parse_config("data_dir = d\nmanifest = /m.csv\n", Path::new("/cfg")).unwrap();
        assert_eq!(c.manifest, PathBuf::from("/m.csv"));
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "seed = 1\n",
            "data_dir = d\nbogus = 1\n",
            "data_dir = d\nseed = x\n",
            "data_dir = d\nsvm_c = -1\n",
            "data_dir = d\npca_energy = 1.5\n",
            "data_dir = d\nweight_mode = sometimes\n",
            "data_dir = d\ndata_dir = e\n",
            "data_dir\n",
        ] {
            assert!(matches!(parse_config(text, Path::new(".")), Err(Error::UnsupportedConfig(_))), "{text}");
        }
    }
}
