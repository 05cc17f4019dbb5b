//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fusionface::classifiers::{svm_train, MlpModel, SvmConfig};
use fusionface::config::load_config;
use fusionface::dataset::{load_dataset, split, Sample};
use fusionface::features::{
    lbp_map, transitions, uniform_label, GaborBank, GaborBankConfig, LbpConfig, BANK_ORIENTATIONS_DEG,
    BANK_WAVELENGTHS, NON_UNIFORM,
};
use fusionface::pipeline::{evaluate, fuse, train_all, weighted_sum, EvalReport, FrameworkId, PipelineConfig};
use fusionface::preprocess::{FaceGrid, GRID_SIZE};
use fusionface::subspace::{lda_direction, pca_fit, scatter_spectrum, scatters, PcaOptions, PcaSolver};
use fusionface::synthetic::{generate, SyntheticSpec};
use fusionface::Label;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let normal = rand_distr::StandardNormal;
    (0..n).map(|_| rng.sample::<f64, _>(normal)).collect()
}

fn label(positive: bool) -> Label {
    if positive {
        Label::Female
    } else {
        Label::Male
    }
}

fn train_and_score(samples: &[Sample], cfg: &PipelineConfig) -> fusionface::Result<EvalReport> {
    let (train, test) = split(samples, |s| s.label, &cfg.split)?;
    let model = train_all(&train, cfg)?;
    evaluate(&model, &test)
}

fn summary(r: &EvalReport) -> String {
    let mut parts: Vec<String> = FrameworkId::ALL
        .iter()
        .map(|&id| format!("{id} {:.1}%", 100.0 * r.framework(id).overall_rate()))
        .collect();
    parts.push(format!("fused {:.1}%", 100.0 * r.fusion().overall_rate()));
    parts.join(", ")
}

fn fei_headline() -> Outcome {
    let Ok(path) = std::env::var("FUSIONFACE_FEI_CONFIG") else {
        return Skip("set FUSIONFACE_FEI_CONFIG to a config pointing at FEI faces and landmarks".into());
    };
    let start = Instant::now();
    let result = load_config(&path).and_then(|run| {
        let samples = load_dataset(&run.data_dir, &run.manifest)?;
        train_and_score(&samples, &run.pipeline)
    });
    match result {
        Err(e) => Fail(format!("{path}: {e}")),
        Ok(r) => {
            let elapsed = start.elapsed();
            let fused = r.fusion().overall_rate();
            check(
                fused >= 0.85 && elapsed < Duration::from_secs(600),
                format!("{}; {:.1}s", summary(&r), elapsed.as_secs_f64()),
            )
        }
    }
}

fn synthetic_end_to_end() -> Outcome {
    let start = Instant::now();
    let samples = generate(&SyntheticSpec::default());
    let r = match train_and_score(&samples, &PipelineConfig::default()) {
        Ok(r) => r,
        Err(e) => return Fail(e.to_string()),
    };
    let elapsed = start.elapsed();
    let fused = r.fusion().overall_rate();
    let tracks = FrameworkId::ALL
        .iter()
        .all(|&id| fused >= r.framework(id).overall_rate() - 0.05 - 1e-12);
    check(
        fused >= 0.90 && tracks && elapsed < Duration::from_secs(120),
        format!("{}; {:.1}s", summary(&r), elapsed.as_secs_f64()),
    )
}

/// Direct transcription of the uniform-LBP definition for one pixel.
fn naive_lbp(g: &[f64], r: usize, c: usize) -> u8 {
    let at = |rr: isize, cc: isize| g[rr as usize * GRID_SIZE + cc as usize];
    let (r, c) = (r as isize, c as isize);
    let ring = [(0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1)];
    let bits: Vec<u8> = ring.iter().map(|&(dr, dc)| u8::from(at(r + dr, c + dc) >= at(r, c))).collect();
    let changes = (0..8).filter(|&p| bits[p] != bits[(p + 1) % 8]).count();
    if changes <= 2 {
        bits.iter().sum()
    } else {
        NON_UNIFORM
    }
}

fn lbp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    for trial in 0..100 {
        // coarse levels on half the grids so ties are exercised
        let levels = if trial % 2 == 0 { 4 } else { 256 };
        let values: Vec<f64> = (0..GRID_SIZE * GRID_SIZE)
            .map(|_| f64::from(rng.gen_range(0..levels)))
            .collect();
        let grid = FaceGrid::new(values.clone()).expect("30x30 grid");
        let map = lbp_map(&grid, &LbpConfig::default()).expect("default config");
        for r in 1..GRID_SIZE - 1 {
            for c in 1..GRID_SIZE - 1 {
                if map.get(r - 1, c - 1) != naive_lbp(&values, r, c) {
                    mismatches += 1;
                }
            }
        }
    }
    check(mismatches == 0, format!("{mismatches} mismatches over 100 grids"))
}

fn uniform_census() -> Outcome {
    let uniform = (0..=255u8).filter(|&p| transitions(p) <= 2).count();
    let to_nine = (0..=255u8).filter(|&p| uniform_label(p) == NON_UNIFORM).count();
    let uniform_labels_ok = (0..=255u8)
        .filter(|&p| transitions(p) <= 2)
        .all(|p| uniform_label(p) == p.count_ones() as u8);
    check(
        uniform == 58 && to_nine == 198 && uniform_labels_ok,
        format!("{uniform} uniform, {to_nine} labelled {NON_UNIFORM}"),
    )
}

fn pca_gram() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let scales: Vec<f64> = (0..15).map(|j| 1.0 / (1.0 + j as f64)).collect();
    let xs: Vec<Vec<f64>> = (0..40)
        .map(|_| gaussian(&mut rng, 15).iter().zip(&scales).map(|(v, s)| v * s).collect())
        .collect();
    let (gram, cov) = match (
        scatter_spectrum(&xs, PcaSolver::Gram),
        scatter_spectrum(&xs, PcaSolver::Covariance),
    ) {
        (Ok(g), Ok(c)) => (g, c),
        (Err(e), _) | (_, Err(e)) => return Fail(e.to_string()),
    };

    // independent reference: nalgebra on the covariance
    let mean: Vec<f64> = (0..15).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / 40.0).collect();
    let centered = DMatrix::from_fn(40, 15, |i, j| xs[i][j] - mean[j]);
    let mut reference: Vec<f64> = SymmetricEigen::new(centered.transpose() * &centered).eigenvalues.iter().copied().collect();
    reference.sort_by(|a, b| b.total_cmp(a));

    let mut worst_rel = 0.0f64;
    for (k, r) in reference.iter().enumerate() {
        for v in [gram.values.get(k), cov.values.get(k)] {
            let v = v.copied().unwrap_or(0.0);
            worst_rel = worst_rel.max((v - r).abs() / r.abs());
        }
    }
    let b = &gram.vectors;
    let mut ortho = 0.0f64;
    for i in 0..b.cols() {
        for j in 0..b.cols() {
            let d: f64 = (0..b.rows()).map(|r| b[(r, i)] * b[(r, j)]).sum();
            ortho = ortho.max((d - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let energy = match pca_fit(&xs, &PcaOptions { solver: PcaSolver::Gram, ..PcaOptions::default() }) {
        Ok(m) => m.retained_energy,
        Err(e) => return Fail(e.to_string()),
    };
    check(
        worst_rel <= 1e-7 && ortho <= 1e-8 && energy >= 0.999,
        format!("eigenvalue rel err {worst_rel:.2e}, orthonormality {ortho:.2e}, energy {energy:.6}"),
    )
}

fn gabor_selectivity() -> Outcome {
    let bank = match GaborBank::new(GaborBankConfig::default()) {
        Ok(b) => b,
        Err(e) => return Fail(e.to_string()),
    };
    let mut correct = 0;
    let mut misses = Vec::new();
    let mut k = 0;
    for lambda in BANK_WAVELENGTHS {
        for deg in BANK_ORIENTATIONS_DEG {
            let t = deg.to_radians();
            let grid = FaceGrid::from_fn(|row, col| {
                let u = col as f64 * t.cos() + row as f64 * t.sin();
                128.0 + 100.0 * (2.0 * PI * u / lambda).cos()
            });
            let means = bank.respond(&grid).expect("30x30 grid").mean_magnitudes();
            let best = (0..means.len()).max_by(|&a, &b| means[a].total_cmp(&means[b])).unwrap_or(0);
            if best == k {
                correct += 1;
            } else {
                misses.push(format!("l{lambda}/t{deg} -> filter {best}"));
            }
            k += 1;
        }
    }
    check(correct == 12, format!("{correct}/12 argmax correct{}", misses.iter().map(|m| format!(" {m}")).collect::<String>()))
}

/// Best dual objective over a lattice of the feasible set; α₃ follows from
/// the equality constraint.
fn lattice_dual(xs: &[f64; 3], ys: &[f64; 3], c: f64, gamma: f64, steps: usize) -> f64 {
    let k = |a: f64, b: f64| (-gamma * (a - b) * (a - b)).exp();
    let mut best = f64::NEG_INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            let a = [c * i as f64 / steps as f64, c * j as f64 / steps as f64, 0.0];
            let a3 = -(a[0] * ys[0] + a[1] * ys[1]) * ys[2];
            if !(0.0..=c).contains(&a3) {
                continue;
            }
            let a = [a[0], a[1], a3];
            let mut w: f64 = a.iter().sum();
            for p in 0..3 {
                for q in 0..3 {
                    w -= 0.5 * a[p] * a[q] * ys[p] * ys[q] * k(xs[p], xs[q]);
                }
            }
            best = best.max(w);
        }
    }
    best
}

fn svm_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_gap = 0.0f64;
    let mut feasible = true;
    for _ in 0..20 {
        let xs = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let first = rng.gen_bool(0.5);
        let ys = [first, !first, rng.gen_bool(0.5)].map(|b| if b { 1.0 } else { -1.0 });
        let c = rng.gen_range(0.5..5.0);
        let cfg = SvmConfig { c, tol: 1e-9, ..SvmConfig::default() };
        let points: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        let labels: Vec<Label> = ys.iter().map(|&y| label(y > 0.0)).collect();
        let m = match svm_train(&points, &labels, &cfg) {
            Ok(m) => m,
            Err(e) => return Fail(e.to_string()),
        };
        let oracle = lattice_dual(&xs, &ys, c, cfg.gamma, 1000);
        worst_gap = worst_gap.max((m.diagnostics.objective - oracle).abs());
        let sum: f64 = m.coefficients.iter().sum();
        feasible &= sum.abs() <= 1e-6 && m.alphas().iter().all(|&a| (0.0..=c).contains(&a));
    }
    let xor = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    let xor_labels = [true, true, false, false].map(label);
    let xor_ok = svm_train(&xor, &xor_labels, &SvmConfig::default()).is_ok_and(|m| {
        xor.iter()
            .zip(&xor_labels)
            .all(|(x, y)| m.predict(x).is_ok_and(|(p, _)| p == *y))
    });
    check(
        worst_gap <= 1e-3 && feasible && xor_ok,
        format!("max dual gap {worst_gap:.2e}, feasible {feasible}, xor {xor_ok}"),
    )
}

fn mlp_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = rng.gen_range(1..6);
        let h = rng.gen_range(1..6);
        let n = rng.gen_range(1..8);
        let model = MlpModel::random(d, h, Some(0.8), &mut rng);
        let xs: Vec<Vec<f64>> = (0..n).map(|_| gaussian(&mut rng, d)).collect();
        let targets: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let analytic = model.loss_and_gradient(&xs, &targets).1.flatten();
        let params = model.parameters();
        let eps = 1e-5;
        let mut probe = model.clone();
        let numeric: Vec<f64> = (0..params.len())
            .map(|i| {
                let mut p = params.clone();
                p[i] += eps;
                probe.set_parameters(&p).expect("same shape");
                let up = probe.loss_and_gradient(&xs, &targets).0;
                p[i] -= 2.0 * eps;
                probe.set_parameters(&p).expect("same shape");
                let down = probe.loss_and_gradient(&xs, &targets).0;
                (up - down) / (2.0 * eps)
            })
            .collect();
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale = analytic.iter().map(|a| a * a).sum::<f64>().sqrt() + numeric.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(diff / scale.max(1e-12));
    }
    check(worst < 1e-4, format!("max relative error {worst:.2e} over 100 probes"))
}

fn lda_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 1.0f64;
    for _ in 0..20 {
        let shift = [rng.gen_range(1.0..3.0), rng.gen_range(-2.0..2.0)];
        let mix = [[1.0, rng.gen_range(-0.6..0.6)], [0.0, rng.gen_range(0.4..1.5)]];
        let mut xs = Vec::new();
        let mut labels = Vec::new();
        for i in 0..60 {
            let z = gaussian(&mut rng, 2);
            let mut x = vec![mix[0][0] * z[0] + mix[0][1] * z[1], mix[1][1] * z[1]];
            let positive = i % 2 == 0;
            if positive {
                x[0] += shift[0];
                x[1] += shift[1];
            }
            xs.push(x);
            labels.push(label(positive));
        }
        let w = match scatters(&xs, &labels).and_then(|sp| lda_direction(&sp, 0.0)) {
            Ok(p) => p.direction,
            Err(e) => return Fail(e.to_string()),
        };

        let class_mean = |pos: bool| -> DVector<f64> {
            let rows: Vec<&Vec<f64>> = xs.iter().zip(&labels).filter(|(_, &l)| l == label(pos)).map(|(x, _)| x).collect();
            DVector::from_fn(2, |j, _| rows.iter().map(|x| x[j]).sum::<f64>() / rows.len() as f64)
        };
        let (mp, mm) = (class_mean(true), class_mean(false));
        let mut sw = DMatrix::zeros(2, 2);
        for (x, &l) in xs.iter().zip(&labels) {
            let m = if l == Label::Female { &mp } else { &mm };
            let v = DVector::from_column_slice(x) - m;
            sw += &v * v.transpose();
        }
        let Some(inv) = sw.try_inverse() else {
            return Fail("singular within-class scatter".into());
        };
        let reference = inv * (mp - mm);
        let w = DVector::from_column_slice(&w);
        worst = worst.min(w.dot(&reference) / (w.norm() * reference.norm()));
    }
    check(worst >= 1.0 - 1e-6, format!("min cosine {worst:.12}"))
}

fn fusion_arithmetic() -> Outcome {
    let votes = [true, true, false, false].map(label);
    let weights = [0.78, 0.86, 0.90, 0.86];
    let (Ok(sum), Ok(fused)) = (weighted_sum(&votes, &weights), fuse(&votes, &weights)) else {
        return Fail("fusion rejected four votes".into());
    };
    let tie = fuse(&votes, &[0.5, 0.5, 0.5, 0.5]);
    check(
        (sum + 0.12).abs() < 1e-12 && fused == Label::Male && tie.as_ref().is_ok_and(|&l| l == Label::Female),
        format!("sum {sum:.4} -> {fused:?}; tie -> {tie:?}"),
    )
}

fn reproducibility() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return Fail(e.to_string()),
    };
    let root = dir.path();
    let exe = env!("CARGO_BIN_EXE_fusionface");
    let run = |args: &[&str]| Command::new(exe).args(args).current_dir(root).output();
    let steps: [&[&str]; 5] = [
        &["synth", "--out", "data", "--count", "60", "--seed", "9"],
        &["train", "--config", "data/fusionface.conf", "--out", "a.model", "--reproducible", "--seed", "4"],
        &["train", "--config", "data/fusionface.conf", "--out", "b.model", "--reproducible", "--seed", "4"],
        &["eval", "a.model", "--config", "data/fusionface.conf"],
        &["eval", "b.model", "--config", "data/fusionface.conf"],
    ];
    let mut outputs = Vec::new();
    for args in steps {
        match run(args) {
            Ok(o) if o.status.success() => outputs.push(o.stdout),
            Ok(o) => return Fail(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr).trim())),
            Err(e) => return Fail(e.to_string()),
        }
    }
    let (a, b) = match (std::fs::read(root.join("a.model")), std::fs::read(root.join("b.model"))) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Fail("model files missing".into()),
    };
    check(
        a == b && outputs[3] == outputs[4],
        format!("model files identical {}, eval identical {}", a == b, outputs[3] == outputs[4]),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("FEI fused rate >= 85%", fei_headline),
        ("synthetic end-to-end", synthetic_end_to_end),
        ("LBP oracle equivalence", lbp_oracle),
        ("uniform-pattern census", uniform_census),
        ("PCA Gram trick", pca_gram),
        ("Gabor selectivity", gabor_selectivity),
        ("SVM dual and feasibility", svm_checks),
        ("MLP gradient check", mlp_gradient),
        ("LDA closed form", lda_closed_form),
        ("fusion arithmetic", fusion_arithmetic),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Pass(d) => println!("[PASS] {name}: {d}"),
            Skip(d) => println!("[SKIP] {name}: {d}"),
            Fail(d) => {
                failed += 1;
                println!("[FAIL] {name}: {d}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
