use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use colcat_core::arff::emit_arff;
use colcat_core::baselines::{BotParams, OpenMlParams};
use colcat_core::categorical::{infer_table, ColumnInference, LogisticModel, TypePosterior5};
use colcat_core::corpus::{AnnotatedCorpus, AnnotationFile, PreparedCorpus};
use colcat_core::evaluate::{cross_evaluate, evaluate_fixed, parse_methods, train_ptype_cat};
use colcat_core::inference::InferenceConfig;
use colcat_core::ingest::{read_table, DataTable};
use colcat_core::machines::{builtin_machines, MachineSet};
use colcat_core::synth::{generate, SynthConfig};
use colcat_core::types::{BaseType, DataType};
use colcat_core::Error;

/// Environment variable naming a model file, used when `--model` is absent.
const MODEL_ENV: &str = "COLCAT_MODEL";

#[derive(Parser)]
#[command(name = "colcat", version, about = "Infer column types and categorical values of delimited files")]
struct Cli {
    /// Field delimiter (a single ASCII character).
    #[arg(long, global = true, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,

    /// Worker threads; defaults to the number of logical processors.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArg {
    /// Classifier file; falls back to $COLCAT_MODEL, then the bundled model.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the predicted type and type posterior of every column.
    Infer {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArg,
        /// One JSON record per line instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Print the categorical values of one column.
    Values {
        file: PathBuf,
        #[arg(long)]
        column: String,
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        json: bool,
    },
    /// Write an ARFF data dictionary.
    Arff {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long)]
        relation: Option<String>,
        #[arg(long)]
        header_only: bool,
        #[command(flatten)]
        model: ModelArg,
    },
    /// Fit the classifier by nested cross-validation.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the cross-validation report; defaults to OUT with a
        /// `.cv.json` suffix.
        #[arg(long)]
        cv_report: Option<PathBuf>,
    },
    /// Score methods against an annotated corpus.
    Evaluate {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long, default_value = "ptype-cat,bot,openml,weka,unique")]
        methods: String,
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        report: PathBuf,
        /// Tune every method by nested cross-validation instead of using the
        /// given model and default baseline thresholds.
        #[arg(long)]
        cv: bool,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic annotated corpus.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 60)]
        datasets: usize,
        #[arg(long, default_value_t = SynthConfig::default().seed)]
        seed: u64,
    },
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    let s = if s == "\\t" { "\t" } else { s };
    match s.as_bytes() {
        [b] if b.is_ascii() => Ok(*b),
        _ => Err(format!("delimiter must be one ASCII character, got {s:?}")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

const USAGE: u8 = 1;
const DATA: u8 = 2;
const MODEL: u8 = 3;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Model(_) => MODEL,
            Error::Config(_) => USAGE,
            _ => DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn model_failure(e: Error) -> Failure {
    Failure {
        code: MODEL,
        message: e.to_string(),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: DATA,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn load_model(arg: &ModelArg) -> Result<LogisticModel, Failure> {
    let path = arg
        .model
        .clone()
        .or_else(|| std::env::var_os(MODEL_ENV).map(PathBuf::from));
    match path {
        Some(p) => LogisticModel::load(&p).map_err(model_failure),
        None => Ok(LogisticModel::bundled()),
    }
}

struct Session {
    delimiter: u8,
    machines: MachineSet,
    config: InferenceConfig,
}

impl Session {
    fn infer(&self, file: &Path, model: &ModelArg) -> Result<(DataTable, Vec<ColumnInference>), Failure> {
        let model = load_model(model)?;
        let table = read_table(file, self.delimiter, true)?;
        let inferences = infer_table(&table, &self.machines, &model, &self.config)?;
        Ok((table, inferences))
    }

    fn corpus(&self, dir: &Path, annotations: &Path) -> Result<PreparedCorpus, Failure> {
        let annotations = AnnotationFile::load(annotations)?;
        let corpus = AnnotatedCorpus::load(dir, &annotations, self.delimiter)?;
        Ok(PreparedCorpus::new(&corpus, self.machines.clone(), self.config)?)
    }
}

#[derive(Serialize)]
struct InferRecord<'a> {
    column: &'a str,
    posterior: TypePosterior5,
    predicted: DataType,
    base_type: BaseType,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<&'a str>>,
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    std::fs::write(path, text + "\n").map_err(|e| io_failure(path, e))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let session = Session {
        delimiter: cli.delimiter,
        machines: builtin_machines(),
        config: InferenceConfig::default(),
    };
    match cli.command {
        Command::Infer { file, model, json } => {
            let (_, inferences) = session.infer(&file, &model)?;
            for inf in &inferences {
                if json {
                    let record = InferRecord {
                        column: &inf.column,
                        posterior: inf.posterior5,
                        predicted: inf.predicted,
                        base_type: inf.base_type,
                        values: inf.values().map(|r| r.value_strings()),
                    };
                    println!("{}", serde_json::to_string(&record).map_err(Error::from)?);
                } else {
                    let p = inf.posterior5;
                    let probs: Vec<String> = DataType::ALL
                        .iter()
                        .map(|&t| format!("{t}={:.4}", p.get(t)))
                        .collect();
                    println!("{}\t{}\t{}", inf.column, inf.predicted, probs.join(" "));
                }
            }
        }
        Command::Values {
            file,
            column,
            model,
            json,
        } => {
            let (table, inferences) = session.infer(&file, &model)?;
            let index = table
                .columns()
                .iter()
                .position(|c| c.name() == column)
                .ok_or(Error::UnknownColumn(column.clone()))?;
            let inf = &inferences[index];
            if !inf.is_categorical() {
                log::warn!(
                    "column `{column}` is predicted {}; listing its clean entries under {}",
                    inf.predicted,
                    inf.base_type.as_str()
                );
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&inf.split).map_err(Error::from)?);
            } else {
                println!("values:");
                for v in &inf.split.values {
                    println!("  {}\tcount={}\tclean={:.4}", v.value, v.count, v.clean_posterior);
                }
                println!("excluded:");
                for v in &inf.split.excluded {
                    println!("  {}\tcount={}\t{}", v.value, v.count, v.label.as_str());
                }
            }
        }
        Command::Arff {
            file,
            output,
            relation,
            header_only,
            model,
        } => {
            let (table, inferences) = session.infer(&file, &model)?;
            let text = emit_arff(
                &table,
                relation.as_deref(),
                &inferences,
                session.machines.vocabulary(),
                header_only,
            )?;
            std::fs::write(&output, text).map_err(|e| io_failure(&output, e))?;
        }
        Command::Train {
            corpus,
            annotations,
            out,
            folds,
            seed,
            cv_report,
        } => {
            let prepared = session.corpus(&corpus, &annotations)?;
            let (model, report) = train_ptype_cat(&prepared, folds, seed)?;
            model.save(&out)?;
            let report_path = cv_report.unwrap_or_else(|| {
                let mut name = out.clone().into_os_string();
                name.push(".cv.json");
                PathBuf::from(name)
            });
            write_json(&report_path, &report)?;
            eprintln!(
                "mean outer test error {:.4}; wrote {} and {}",
                report.mean_test_error,
                out.display(),
                report_path.display()
            );
        }
        Command::Evaluate {
            corpus,
            annotations,
            methods,
            model,
            report,
            cv,
            folds,
            seed,
        } => {
            let methods = parse_methods(&methods)?;
            let prepared = session.corpus(&corpus, &annotations)?;
            let result = if cv {
                cross_evaluate(&prepared, &methods, folds, seed)?
            } else {
                let model = load_model(&model)?;
                evaluate_fixed(
                    &prepared,
                    &methods,
                    &model,
                    &BotParams::default(),
                    &OpenMlParams::default(),
                )
            };
            write_json(&report, &result)?;
            for m in &result.methods {
                let accuracy = m.types.as_ref().map_or("-".to_string(), |t| format!("{:.4}", t.accuracy));
                let jaccard = m
                    .values
                    .as_ref()
                    .map_or("-".to_string(), |v| format!("{:.4}", v.mean_jaccard));
                eprintln!("{}\ttype accuracy {accuracy}\tvalue jaccard {jaccard}", m.method);
            }
        }
        Command::Synth { out, datasets, seed } => {
            let corpus = generate(&SynthConfig { datasets, seed })?;
            corpus.write_to(&out)?;
            eprintln!("wrote {} columns in {} files", corpus.column_count(), corpus.datasets.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let threads = cli.threads;
    let outcome = match rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(Failure {
            code: USAGE,
            message: format!("cannot start worker pool: {e}"),
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
