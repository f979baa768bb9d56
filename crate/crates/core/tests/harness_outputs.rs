use std::fs;
use std::path::Path;

use syncgrid::dcg::DcgModel;
use syncgrid::env::TraceRecord;
use syncgrid::graph::TopologyKind;
use syncgrid::harness::{self, csv, ExperimentConfig, Manifest};

const SHORT_TINY: &str = "preset = \"tiny\"
learner.max_env_steps = 900
learner.train_start = 100
learner.hidden = [16]
eval_every = 300
eval_episodes = 2
seeds = [0, 7, 9]
";

fn short_run(out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml(SHORT_TINY, None).unwrap();
    cfg.out_dir = out.to_path_buf();
    harness::run(&cfg).unwrap();
    cfg
}

#[test]
fn aggregate_matches_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_run(dir.path());
    let per_seed: Vec<Vec<csv::MetricsRow>> = cfg
        .seeds
        .iter()
        .map(|&s| csv::parse_metrics_csv(&fs::read_to_string(harness::metrics_path(dir.path(), s)).unwrap()).unwrap())
        .collect();
    for rows in &per_seed {
        assert!(rows.windows(2).all(|w| w[0].env_step < w[1].env_step));
        assert_eq!(rows.last().unwrap().env_step, 900);
    }

    let text = fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), csv::AGGREGATE_HEADER);
    let mut checkpoints = 0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let step = f[0] as usize;
        let mut train = Vec::new();
        let mut eval = Vec::new();
        for rows in &per_seed {
            let mut last = None;
            for r in rows {
                if r.env_step <= step {
                    last = Some(r);
                }
            }
            let r = last.unwrap();
            train.push(r.train_return);
            eval.push(r.eval_return_mean);
        }
        let n = train.len() as f64;
        let stats = |xs: &[f64]| {
            let m = xs.iter().sum::<f64>() / n;
            (m, (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).sqrt())
        };
        let (tm, ts) = stats(&train);
        let (em, es) = stats(&eval);
        assert_eq!(f[1] as usize, 3);
        for (got, want) in [(f[2], tm), (f[3], ts), (f[4], em), (f[5], es)] {
            assert!((got - want).abs() <= 1e-5 * (1.0 + want.abs()), "{line}: {got} vs {want}");
        }
        checkpoints += 1;
    }
    assert_eq!(checkpoints, 3);

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seeds"].as_array().unwrap().len(), 3);
    let manifest: Manifest = serde_json::from_str(
        &fs::read_to_string(harness::checkpoint_dir(dir.path(), 7).join("manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest.seed, 7);
    assert_eq!(manifest.step, 900);
    assert_eq!(manifest.config_hash, cfg.hash());
    let resolved = ExperimentConfig::from_toml(&fs::read_to_string(dir.path().join("config.toml")).unwrap(), Some("tiny")).unwrap();
    assert_eq!(resolved.hash(), cfg.hash());
}

#[test]
fn render_plays_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_run(dir.path());
    let mut frames = Vec::new();
    let mut trace = Vec::new();
    let records = harness::render(&harness::checkpoint_dir(dir.path(), 0), &cfg, 4, &mut frames, &mut trace).unwrap();
    let text = String::from_utf8(trace).unwrap();
    let parsed: Vec<TraceRecord> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(parsed, records);
    assert!(records.last().unwrap().done);
    assert!(records.len() <= cfg.env.max_steps);
    assert!(String::from_utf8(frames).unwrap().starts_with("step 0\n"));
}

#[test]
fn never_capturing_model_plays_until_the_step_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::preset("tiny").unwrap();
    let mut model = DcgModel::new(cfg.env.obs_len(), cfg.env.n_actions(), &[4], 0, 0.0).unwrap();
    let last = model.utility.biases_mut().len() - 1;
    // Stay is the unique best action everywhere.
    model.utility.biases_mut()[last][0] = 1.0;
    let manifest = Manifest {
        config_hash: cfg.hash(),
        step: 0,
        seed: 0,
        topology: TopologyKind::Empty,
        obs_dim: cfg.env.obs_len(),
        n_actions: cfg.env.n_actions(),
        hidden: vec![4],
    };
    harness::save_checkpoint(dir.path(), &model, &manifest).unwrap();
    let mut trace = Vec::new();
    let records = harness::render(dir.path(), &cfg, 1, &mut std::io::sink(), &mut trace).unwrap();
    assert_eq!(records.len(), cfg.env.max_steps);
    assert!(records.iter().all(|r| r.captures == 0 && r.joint_action.iter().all(|a| a == "Stay")));
    assert_eq!(String::from_utf8(trace).unwrap().lines().count(), cfg.env.max_steps);
}

#[test]
fn mismatched_checkpoint_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let tiny = ExperimentConfig::preset("tiny").unwrap();
    let model = DcgModel::new(tiny.env.obs_len(), tiny.env.n_actions(), &[4], 0, 1.0).unwrap();
    let manifest = Manifest {
        config_hash: tiny.hash(),
        step: 0,
        seed: 0,
        topology: TopologyKind::Full,
        obs_dim: tiny.env.obs_len(),
        n_actions: tiny.env.n_actions(),
        hidden: vec![4],
    };
    harness::save_checkpoint(dir.path(), &model, &manifest).unwrap();
    let desk = ExperimentConfig::preset("desk-2homo").unwrap();
    let err = harness::render(dir.path(), &desk, 0, &mut std::io::sink(), &mut std::io::sink()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let err = harness::render(&dir.path().join("missing"), &tiny, 0, &mut std::io::sink(), &mut std::io::sink()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}
