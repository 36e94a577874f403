use ddosflow::experiment::{evaluate_model, run_experiment, DataSource, ExperimentConfig, Preset};
use ddosflow::feature_select::correlation_matrix;
use ddosflow::flow_data::{
    bot_iot_layout, drop_columns, generate_synthetic_flows, parse_flow_csv, read_dataset,
    write_dataset, write_flow_csv, SynthesisSpec, ATTACK_LABEL, DEFAULT_DROP_COLUMNS, LABEL_COLUMN,
};
use ddosflow::neuralnet::Model;

fn spec(dupes: usize) -> SynthesisSpec {
    SynthesisSpec {
        attack_count: 800,
        benign_count: 40,
        feature_count: 12,
        planted_duplicate_pairs: dupes,
        class_separation: 6.0,
        seed: 17,
    }
}

#[test]
fn csv_to_dataset_file_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let ds = bot_iot_layout(&generate_synthetic_flows(&spec(2)).unwrap()).unwrap();
    let csv = dir.path().join("flows.csv");
    write_flow_csv(&ds, &csv).unwrap();

    let parsed = parse_flow_csv(&csv, LABEL_COLUMN, ATTACK_LABEL).unwrap();
    assert_eq!(parsed.matrix(), ds.matrix());
    assert_eq!(parsed.labels(), ds.labels());
    let cleaned = drop_columns(&parsed, &DEFAULT_DROP_COLUMNS, true).unwrap();
    assert_eq!(cleaned.feature_count(), 12);
    assert_eq!(drop_columns(&cleaned, &DEFAULT_DROP_COLUMNS, true).unwrap(), cleaned);

    let bin = dir.path().join("flows.ds");
    write_dataset(&cleaned, &bin).unwrap();
    let back = read_dataset(&bin).unwrap();
    assert_eq!(back, cleaned);
    assert_eq!(back.dropped_columns(), cleaned.dropped_columns());
}

#[test]
fn independent_features_stay_below_threshold() {
    let big = SynthesisSpec {
        attack_count: 20_000,
        benign_count: 500,
        feature_count: 30,
        planted_duplicate_pairs: 0,
        class_separation: 6.0,
        seed: 7,
    };
    let ds = generate_synthetic_flows(&big).unwrap();
    let m = correlation_matrix(&ds).unwrap();
    let mut worst = 0.0f64;
    for i in 0..m.size() {
        for j in 0..m.size() {
            if i != j {
                worst = worst.max(m.get(i, j).abs());
            }
        }
    }
    assert!(worst < 0.65, "max |r| {worst}");
}

#[test]
fn saved_model_scores_raw_rows() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate_synthetic_flows(&spec(2)).unwrap();
    let mut cfg = ExperimentConfig::preset(Preset::Fs1, 2);
    cfg.training.epochs = 5;
    let run = run_experiment(&cfg, &ds, DataSource::InMemory).unwrap();
    let path = dir.path().join("model.json");
    run.model.save(&path).unwrap();
    let model = Model::load(&path).unwrap();
    assert_eq!(model, run.model);

    let eval = evaluate_model(&model, &ds, DataSource::InMemory, None).unwrap();
    assert_eq!(eval.rows, 840);
    assert_eq!(eval.confusion.tp + eval.confusion.fp + eval.confusion.tn + eval.confusion.fn_, 840);
    assert!(eval.metrics.accuracy > 0.9);
}
