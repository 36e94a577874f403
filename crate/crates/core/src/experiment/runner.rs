use log::info;
use ndarray::ArrayView2;

use super::config::ExperimentConfig;
use super::report::{DataSource, DatasetSummary, EvaluationReport, ExperimentReport, REPORT_FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::evaluate::{confusion, metrics, time_phase, TrainTimings};
use crate::feature_select::SelectedFeatures;
use crate::flow_data::{drop_columns, stratified_split, FlowDataset};
use crate::neuralnet::{classify, predict, train, Model, ModelKind, Network};
use crate::preprocess::{apply_scaler, fit_scaler, smote_resample_traced, ScalerParams, SmoteOutcome};

/// A finished run: the report and the trained model it describes.
#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub model: Model,
}

struct Prepared {
    train: FlowDataset,
    test: FlowDataset,
    scaler: ScalerParams,
    selection: SelectedFeatures,
    smote_input_rows: usize,
    smote: SmoteOutcome,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(Error::in_stage(name))
}

fn prepare(cfg: &ExperimentConfig, ds: &FlowDataset) -> Result<Prepared> {
    let (mut train, test, smote_input_rows, mut outcome) = if cfg.smote_before_split {
        let out = stage("smote", smote_resample_traced(ds, &cfg.smote))?;
        let (train, test) = stage("split", stratified_split(&out.dataset, cfg.split, cfg.seed))?;
        (train, test, ds.row_count(), Some(out))
    } else {
        let (train, test) = stage("split", stratified_split(ds, cfg.split, cfg.seed))?;
        let n = train.row_count();
        (train, test, n, None)
    };

    let mut selection = None;
    if cfg.select_before_smote {
        selection = Some(stage("select", cfg.selector.apply(&train))?);
    }

    let resample = |train: &FlowDataset| stage("smote", smote_resample_traced(train, &cfg.smote));
    let scaler;
    if cfg.smote_on_scaled {
        scaler = stage("scale", fit_scaler(&train))?;
        train = stage("scale", apply_scaler(&scaler, &train))?;
        if outcome.is_none() {
            let out = resample(&train)?;
            train = out.dataset.clone();
            outcome = Some(out);
        }
    } else {
        if outcome.is_none() {
            let out = resample(&train)?;
            train = out.dataset.clone();
            outcome = Some(out);
        }
        scaler = stage("scale", fit_scaler(&train))?;
        train = stage("scale", apply_scaler(&scaler, &train))?;
    }

    let selection = match selection {
        Some(s) => s,
        None => stage("select", cfg.selector.apply(&train))?,
    };
    Ok(Prepared {
        train,
        test,
        scaler,
        selection,
        smote_input_rows,
        smote: outcome.expect("SMOTE runs on every path"),
    })
}

fn build_network(cfg: &ExperimentConfig, inputs: usize) -> Network {
    match cfg.classifier {
        ModelKind::Mlp => Network::mlp(inputs, &cfg.hidden_layers, cfg.seed),
        ModelKind::Lstm => Network::lstm(inputs, &cfg.hidden_layers, cfg.seed),
    }
}

/// drop, split, SMOTE on the training side, scale, select, train, and
/// score the held-out rows. Errors carry the name of the failing stage.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    ds: &FlowDataset,
    source: DataSource,
) -> Result<ExperimentRun> {
    stage("config", cfg.validate())?;
    let (rows_benign, rows_attack) = stage("input", ds.class_counts())?;

    let present: Vec<&str> = cfg
        .drop_columns
        .iter()
        .map(String::as_str)
        .filter(|n| ds.column(n).is_some())
        .collect();
    let ds = stage("drop", drop_columns(ds, &present, cfg.drop_string_columns))?;

    let (prepared, prep_time) = time_phase("preprocessing", || prepare(cfg, &ds));
    let p = prepared?;
    info!(
        "{}: {} training rows after SMOTE, {} features kept",
        cfg.name,
        p.train.row_count(),
        p.selection.len()
    );

    let inputs = p.selection.kept.clone();
    let model = stage(
        "train",
        Model::new(
            build_network(cfg, inputs.len()),
            inputs.clone(),
            p.scaler.clone(),
            p.selection.clone(),
            cfg.seed,
        ),
    )?;
    let (trained, train_time) = time_phase("training", || train(model, &p.train, &cfg.training));
    let (model, history) = stage("train", trained)?;

    let (scored, eval_time) = time_phase("evaluation", || -> Result<_> {
        let test_pred = predict(&model, &p.test, 0.5)?;
        let cm = confusion(&test_pred, p.test.require_labels()?)?;
        let train_sel = p.train.select_features(&inputs)?;
        let x = ArrayView2::from_shape((train_sel.row_count(), inputs.len()), train_sel.matrix())
            .map_err(|e| Error::ColumnMismatch(e.to_string()))?;
        let train_pred = classify(&model.predict_proba_scaled(x)?, 0.5);
        let train_cm = confusion(&train_pred, train_sel.require_labels()?)?;
        Ok((cm, train_cm))
    });
    let (cm, train_cm) = stage("evaluate", scored)?;

    let timings = TrainTimings {
        train_seconds: train_time.seconds,
        epoch_seconds: history.epochs.iter().map(|e| e.seconds).collect(),
    };
    let m = stage("evaluate", metrics(&cm, &timings))?;
    let train_accuracy = (train_cm.tp + train_cm.tn) as f64 / train_cm.total().max(1) as f64;

    let (train_benign, train_attack) = p.train.class_counts()?;
    let (test_benign, test_attack) = p.test.class_counts()?;
    let dataset = DatasetSummary {
        source,
        rows: ds.row_count(),
        attack_rows: rows_attack,
        benign_rows: rows_benign,
        feature_count: ds.feature_count(),
        dropped_columns: ds.dropped_columns().to_vec(),
        smote_input_rows: p.smote_input_rows,
        smote_output_rows: p.smote.dataset.row_count(),
        smote_synthetic_rows: p.smote.synthetic.len(),
        smote_k_used: p.smote.k_used,
        train_rows: p.train.row_count(),
        train_attack_rows: train_attack,
        train_benign_rows: train_benign,
        test_rows: p.test.row_count(),
        test_attack_rows: test_attack,
        test_benign_rows: test_benign,
    };
    let report = ExperimentReport {
        format_version: REPORT_FORMAT_VERSION,
        name: cfg.effective_name(),
        config: cfg.clone(),
        classifier: cfg.classifier,
        dataset,
        feature_count: inputs.len(),
        selection: p.selection,
        evaluation_split: "test".to_string(),
        confusion: cm,
        metrics: m,
        train_accuracy,
        history,
        timings: vec![prep_time, train_time, eval_time],
        model_path: None,
        notes: cfg.notes(),
    };
    Ok(ExperimentRun { report, model })
}

/// Scores `model` on every row of `ds`.
pub fn evaluate_model(
    model: &Model,
    ds: &FlowDataset,
    data: DataSource,
    model_path: Option<String>,
) -> Result<EvaluationReport> {
    let truth = ds.require_labels()?;
    let pred = predict(model, ds, 0.5)?;
    let cm = confusion(&pred, truth)?;
    let m = metrics(&cm, &TrainTimings::default())?;
    Ok(EvaluationReport {
        format_version: REPORT_FORMAT_VERSION,
        classifier: model.kind(),
        input_features: model.input_features.clone(),
        model_path,
        data,
        rows: ds.row_count(),
        evaluation_split: "supplied dataset (all rows)".to_string(),
        threshold: 0.5,
        confusion: cm,
        metrics: m,
        notes: vec![
            "precision, recall and f1 are 0 when their denominator is 0".to_string(),
            "training time fields are 0; no training happens during evaluation".to_string(),
        ],
    })
}
