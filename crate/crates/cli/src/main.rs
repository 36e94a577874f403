use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ddosflow::experiment::{
    compare, evaluate_model, run_experiment, DataSource, ExperimentConfig, ExperimentReport, Preset,
};
use ddosflow::feature_select::{correlation_filter, mi_rank_select};
use ddosflow::flow_data::{
    bot_iot_layout, drop_columns, generate_synthetic_flows, parse_flow_csv, read_dataset,
    write_dataset, write_flow_csv, SynthesisSpec, ATTACK_LABEL, LABEL_COLUMN,
};
use ddosflow::neuralnet::Model;
use ddosflow::Error;
use log::info;

const THREADS_VAR: &str = "NFDLM_THREADS";

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "ddosflow", version, about = "Flow-record DDoS detection with feature selection and small neural classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Correlation,
    Mi,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a flow CSV into a dataset file.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = LABEL_COLUMN)]
        label_column: String,
        /// Label value treated as the attack class.
        #[arg(long, default_value = ATTACK_LABEL)]
        positive: String,
        /// Comma-separated columns to remove.
        #[arg(long, value_delimiter = ',')]
        drop: Vec<String>,
        /// Also remove every non-numeric feature column.
        #[arg(long)]
        drop_strings: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic flow CSV with planted redundant features.
    Synth {
        #[arg(long, default_value_t = 20_000)]
        attack: usize,
        #[arg(long, default_value_t = 500)]
        benign: usize,
        #[arg(long, default_value_t = 30)]
        features: usize,
        #[arg(long, default_value_t = 5)]
        dupes: usize,
        #[arg(long, default_value_t = 6.0)]
        separation: f64,
        #[arg(long)]
        seed: u64,
        /// Omit the BoT-IoT bookkeeping columns (pkSeqID, stime, ltime, proto).
        #[arg(long)]
        plain: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a feature selector and write its report.
    Select {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long, default_value_t = 0.65)]
        threshold: f64,
        #[arg(long, default_value_t = 11)]
        top_k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a preset pipeline and save the model and report.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        preset: Preset,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        smote_before_split: bool,
        #[arg(long)]
        select_before_smote: bool,
        #[arg(long)]
        smote_on_scaled: bool,
        /// Overrides the preset; the run is then reported as custom.
        #[arg(long)]
        epochs: Option<usize>,
        /// Overrides the preset; the run is then reported as custom.
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        model_out: PathBuf,
        #[arg(long)]
        report_out: PathBuf,
    },
    /// Score a saved model on a dataset file.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        report_out: PathBuf,
    },
    /// Tabulate several run reports.
    Compare {
        #[arg(long, value_delimiter = ',', required = true)]
        reports: Vec<PathBuf>,
        /// Markdown table.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn run(command: Command) -> ddosflow::Result<()> {
    match command {
        Command::Ingest { input, label_column, positive, drop, drop_strings, out } => {
            let raw = parse_flow_csv(&input, &label_column, &positive)?;
            let ds = drop_columns(&raw, &drop, drop_strings)?;
            write_dataset(&ds, &out)?;
            let (benign, attack) = ds.class_counts()?;
            println!(
                "{} rows ({attack} attack, {benign} benign), {} features -> {}",
                ds.row_count(),
                ds.feature_count(),
                out.display()
            );
        }
        Command::Synth { attack, benign, features, dupes, separation, seed, plain, out } => {
            let spec = SynthesisSpec {
                attack_count: attack,
                benign_count: benign,
                feature_count: features,
                planted_duplicate_pairs: dupes,
                class_separation: separation,
                seed,
            };
            let mut ds = generate_synthetic_flows(&spec)?;
            if !plain {
                ds = bot_iot_layout(&ds)?;
            }
            write_flow_csv(&ds, &out)?;
            println!("{} rows -> {}", ds.row_count(), out.display());
        }
        Command::Select { data, method, threshold, top_k, out } => {
            let ds = read_dataset(&data)?;
            let sel = match method {
                Method::Correlation => correlation_filter(&ds, threshold)?,
                Method::Mi => mi_rank_select(&ds, top_k)?,
            };
            sel.save(&out)?;
            println!("kept {}: {}", sel.len(), sel.kept.join(","));
        }
        Command::Train {
            data,
            preset,
            seed,
            smote_before_split,
            select_before_smote,
            smote_on_scaled,
            epochs,
            batch_size,
            model_out,
            report_out,
        } => {
            let ds = read_dataset(&data)?;
            let mut cfg = ExperimentConfig::preset(preset, seed);
            cfg.smote_before_split = smote_before_split;
            cfg.select_before_smote = select_before_smote;
            cfg.smote_on_scaled = smote_on_scaled;
            if let Some(e) = epochs {
                cfg.training.epochs = e;
            }
            if let Some(b) = batch_size {
                cfg.training.batch_size = b;
            }
            info!("running {} ({})", preset, cfg.effective_name());
            let run = run_experiment(&cfg, &ds, DataSource::File { path: path_string(&data) })?;
            run.model.save(&model_out)?;
            let mut report = run.report;
            report.model_path = Some(path_string(&model_out));
            report.save(&report_out)?;
            println!(
                "{}: test accuracy {:.5}, {} features, {:.2}s training",
                report.name, report.metrics.accuracy, report.feature_count, report.metrics.train_seconds
            );
        }
        Command::Evaluate { model, data, report_out } => {
            let m = Model::load(&model)?;
            let ds = read_dataset(&data)?;
            let report = evaluate_model(
                &m,
                &ds,
                DataSource::File { path: path_string(&data) },
                Some(path_string(&model)),
            )?;
            report.save(&report_out)?;
            println!("accuracy {:.5} on {} rows", report.metrics.accuracy, report.rows);
        }
        Command::Compare { reports, out, json_out } => {
            let loaded = reports
                .iter()
                .map(ExperimentReport::load)
                .collect::<ddosflow::Result<Vec<_>>>()?;
            let table = compare(&loaded)?;
            table.save_markdown(&out)?;
            if let Some(path) = json_out {
                table.save_json(path)?;
            }
            print!("{}", table.to_markdown());
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err.root() {
        Error::Numeric(_) => EXIT_NUMERIC,
        Error::InvalidConfig(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_root_cause() {
        let staged = Error::Stage {
            stage: "train",
            source: Box::new(Error::Numeric("loss became NaN".into())),
        };
        assert_eq!(exit_code(&staged), EXIT_NUMERIC);
        assert_eq!(exit_code(&Error::InvalidConfig("k".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::MissingColumn("x".into())), EXIT_DATA);
        assert_eq!(exit_code(&Error::SingleClass), EXIT_DATA);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
