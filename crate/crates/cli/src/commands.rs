use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use slavparse::corpus::{
    assemble_dataset, corpus_stats, split_manifest, AssembleOptions, Manifest, Section, SplitStrategy,
};
use slavparse::eval::{
    evaluate, published_scores, report_tables, LabelMode, ScoreRow, CROSS_VALIDATION,
};
use slavparse::model::{
    grid_search, model_scalar_width, predict, read_model, save_model, train_with, EpochLog, GridReport, ModelConfig,
    ParserModel, TrainingLog,
};
use slavparse::treebank::{read_conllu_file, read_conllx_file, write_conllu_file, MorphMapping, Treebank};
use slavparse::Scalar;

use crate::record::{beside, RunRecord};
use crate::{Cli, Command, DataArgs, Failure, ModelArgs, Precision, SplitArgs};

pub fn run(cli: Cli) -> Result<(), Failure> {
    let data_dir = cli.data_dir.as_deref();
    match cli.command {
        Command::Convert { input, mapping, output } => convert(&input, &mapping, &output),
        Command::Split { manifest, out, split: args } => split(&manifest, data_dir, &out, &args),
        Command::Stats { manifest, json } => stats(&manifest, data_dir, json),
        Command::Train { data, model, output, log } => train(&data, &model, data_dir, &output, log.as_deref()),
        Command::Grid { data, model, lstm_grid, mlp_grid, name, output, results } => {
            let name = name.unwrap_or_else(|| format!("jPTDP-{}", data.filter));
            grid(&data, &model, data_dir, &lstm_grid, &mlp_grid, &name, &output, results.as_deref())
        }
        Command::Predict { model, input, output } => predict_cmd(&model, &input, &output),
        Command::Eval { gold, pred, label_mode, results, test_set, model_name } => {
            eval(&gold, &pred, label_mode.into(), results.as_deref(), &test_set, &model_name)
        }
        Command::Report { results, grid, published, json } => report(&results, &grid, published, json.as_deref()),
    }
}

fn read_tb(path: &Path) -> anyhow::Result<Treebank> {
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    read_conllu_file(path, &label).with_context(|| format!("reading {}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> anyhow::Result<()> {
    let json = serde_json::to_string_pretty(value)?;
    fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))
}

fn load_manifest(path: &Path, data_dir: Option<&Path>) -> anyhow::Result<Manifest> {
    Manifest::load(path, data_dir).with_context(|| format!("loading manifest {}", path.display()))
}

fn convert(input: &Path, mapping: &Path, output: &Path) -> Result<(), Failure> {
    let mapping = MorphMapping::from_file(mapping).context("reading morphotag mapping")?;
    let label = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tb = read_conllx_file(input, &mapping, &label).with_context(|| format!("converting {}", input.display()))?;
    write_conllu_file(&tb, output).with_context(|| format!("writing {}", output.display()))?;
    eprintln!("{} sentences, {} tokens", tb.len(), tb.token_count());
    Ok(())
}

fn assemble_options(shuffle: bool, seed: u64) -> AssembleOptions {
    AssembleOptions {
        strategy: if shuffle { SplitStrategy::Shuffled { seed } } else { SplitStrategy::Contiguous },
        ..Default::default()
    }
}

fn split(manifest: &Path, data_dir: Option<&Path>, out: &Path, args: &SplitArgs) -> Result<(), Failure> {
    let m = load_manifest(manifest, data_dir)?;
    let written = split_manifest(&m, out, &assemble_options(args.shuffle, args.seed)).context("splitting")?;
    let (mut train, mut dev, mut test) = (0, 0, 0);
    for (label, result, _) in &written {
        let r = &result.report;
        let note = if r.train_only { "  (train only)" } else { "" };
        println!("{label:<20} {:>8} {:>8} {:>8}{note}", r.train_tokens, r.dev_tokens, r.test_tokens);
        (train, dev, test) = (train + r.train_tokens, dev + r.dev_tokens, test + r.test_tokens);
    }
    println!("{:<20} {train:>8} {dev:>8} {test:>8}", "total");
    Ok(())
}

fn stats(manifest: &Path, data_dir: Option<&Path>, json: bool) -> Result<(), Failure> {
    let m = load_manifest(manifest, data_dir)?;
    let s = corpus_stats(&m).context("counting tokens")?;
    if json {
        println!("{}", serde_json::to_string_pretty(&s).map_err(anyhow::Error::from)?);
    } else {
        print!("{s}");
    }
    for t in s.mismatches() {
        eprintln!(
            "warning: {} has {} tokens, manifest records {}",
            t.label,
            t.tokens,
            t.expected_tokens.unwrap_or_default()
        );
    }
    Ok(())
}

impl ModelArgs {
    fn config(&self) -> ModelConfig {
        ModelConfig {
            d_char: self.char_dim,
            d_word: self.word_dim,
            d_pos: self.pos_dim,
            d_lstm: self.lstm_dim,
            d_mlp: self.mlp_dim,
            epochs: self.epochs,
            seed: self.seed,
            word_dropout_alpha: self.word_dropout,
            learning_rate: self.learning_rate,
            gold_tag_prob: self.gold_tag_prob,
            ..Default::default()
        }
    }
}

/// Train and dev treebanks plus every file they were read from.
fn load_data(
    data: &DataArgs,
    seed: u64,
    data_dir: Option<&Path>,
) -> Result<(Treebank, Treebank, Vec<PathBuf>), Failure> {
    match &data.manifest {
        Some(path) => {
            let m = load_manifest(path, data_dir)?;
            let opts = assemble_options(data.shuffle_split, seed);
            let train = assemble_dataset(&m, Section::Train, data.filter, &opts).context("assembling training data")?;
            let dev = assemble_dataset(&m, Section::Dev, data.filter, &opts).context("assembling development data")?;
            let mut inputs = vec![path.clone()];
            for t in m.texts.iter().filter(|t| data.filter.matches(t.macro_area)) {
                inputs.extend(t.path.clone());
                if let Some(p) = &t.predefined {
                    inputs.extend([p.train.clone(), p.dev.clone(), p.test.clone()]);
                }
            }
            Ok((train, dev, inputs))
        }
        None if data.train_file.is_empty() => Err(Failure::Usage("give either --manifest or --train-file".into())),
        None => {
            let mut train = Treebank::default();
            for p in &data.train_file {
                train.extend(read_tb(p)?);
            }
            let mut dev = Treebank::default();
            for p in &data.dev_file {
                dev.extend(read_tb(p)?);
            }
            Ok((train, dev, data.train_file.iter().chain(&data.dev_file).cloned().collect()))
        }
    }
}

fn progress(prefix: &str, e: &EpochLog) {
    match e.dev {
        Some(r) => eprintln!(
            "{prefix}epoch {:>3}  loss {:.4}  dev UAS {:.2}  LAS {:.2}  UPOS {:.2}",
            e.epoch, e.mean_loss, r.uas, r.las, r.upos_acc
        ),
        None => eprintln!("{prefix}epoch {:>3}  loss {:.4}", e.epoch, e.mean_loss),
    }
}

fn train_typed<T: Scalar>(config: &ModelConfig, train: &Treebank, dev: &Treebank, output: &Path) -> anyhow::Result<TrainingLog> {
    let (model, log) = train_with::<T>(config, train, dev, |e| progress("", e))?;
    save_model(&model, output)?;
    Ok(log)
}

fn train(data: &DataArgs, args: &ModelArgs, data_dir: Option<&Path>, output: &Path, log_path: Option<&Path>) -> Result<(), Failure> {
    let config = args.config();
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let mut record = RunRecord::start(serde_json::to_value(&config).map_err(anyhow::Error::from)?, Some(config.seed));
    let (train, dev, inputs) = load_data(data, config.seed, data_dir)?;
    for p in &inputs {
        record.input(p)?;
    }
    eprintln!("training on {} sentences ({} tokens), dev {} sentences", train.len(), train.token_count(), dev.len());
    let log = match args.precision {
        Precision::F32 => train_typed::<f32>(&config, &train, &dev, output)?,
        Precision::F64 => train_typed::<f64>(&config, &train, &dev, output)?,
    };
    record.output(output);
    if let Some(p) = log_path {
        write_json(p, &log)?;
        record.output(p);
    }
    eprintln!("kept epoch {}", log.best_epoch);
    record.finish(&beside(output))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn grid_typed<T: Scalar>(
    name: &str,
    config: &ModelConfig,
    train: &Treebank,
    dev: &Treebank,
    lstm: &[usize],
    mlp: &[usize],
    output: &Path,
) -> anyhow::Result<GridReport> {
    let (report, best) = grid_search::<T>(name, config, train, dev, lstm, mlp, |l, m, e| progress(&format!("[{l}/{m}] "), e))?;
    save_model(&best, output)?;
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn grid(
    data: &DataArgs,
    args: &ModelArgs,
    data_dir: Option<&Path>,
    lstm: &[usize],
    mlp: &[usize],
    name: &str,
    output: &Path,
    results: Option<&Path>,
) -> Result<(), Failure> {
    let config = args.config();
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if lstm.is_empty() || mlp.is_empty() {
        return Err(Failure::Usage("grids must not be empty".into()));
    }
    let snapshot = serde_json::json!({ "base": config, "lstm_grid": lstm, "mlp_grid": mlp });
    let mut record = RunRecord::start(snapshot, Some(config.seed));
    let (train, dev, inputs) = load_data(data, config.seed, data_dir)?;
    for p in &inputs {
        record.input(p)?;
    }
    let report = match args.precision {
        Precision::F32 => grid_typed::<f32>(name, &config, &train, &dev, lstm, mlp, output)?,
        Precision::F64 => grid_typed::<f64>(name, &config, &train, &dev, lstm, mlp, output)?,
    };
    print!("{report}");
    record.output(output);
    if let Some(p) = results {
        write_json(p, &report)?;
        record.output(p);
    }
    record.finish(&beside(output))?;
    Ok(())
}

fn predict_typed<T: Scalar>(bytes: &[u8], input: &Treebank) -> anyhow::Result<Treebank> {
    let model: ParserModel<T> = read_model(bytes)?;
    Ok(predict(&model, input)?)
}

fn predict_cmd(model: &Path, input: &Path, output: &Path) -> Result<(), Failure> {
    let bytes = fs::read(model).with_context(|| format!("reading {}", model.display()))?;
    let tb = read_tb(input)?;
    let width = model_scalar_width(&bytes).with_context(|| format!("reading {}", model.display()))?;
    let pred = match width {
        4 => predict_typed::<f32>(&bytes, &tb),
        8 => predict_typed::<f64>(&bytes, &tb),
        w => Err(anyhow!("unsupported scalar width {w}")),
    }
    .with_context(|| format!("predicting with {}", model.display()))?;
    write_conllu_file(&pred, output).with_context(|| format!("writing {}", output.display()))?;
    Ok(())
}

fn eval(gold: &Path, pred: &Path, mode: LabelMode, results: Option<&Path>, test_set: &str, model: &str) -> Result<(), Failure> {
    let mut record = RunRecord::start(serde_json::json!({ "label_mode": mode }), None);
    record.input(gold)?;
    record.input(pred)?;
    let r = evaluate(&read_tb(gold)?, &read_tb(pred)?, mode).map_err(anyhow::Error::from)?;
    println!("{r}");
    if let Some(path) = results {
        let mut rows: Vec<ScoreRow> = if path.exists() { read_rows(path)? } else { Vec::new() };
        rows.push(ScoreRow::from_result(test_set, model, &r));
        write_json(path, &rows)?;
        record.output(path);
        record.finish(&beside(path))?;
    }
    Ok(())
}

fn read_rows(path: &Path) -> anyhow::Result<Vec<ScoreRow>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn report(results: &[PathBuf], grids: &[PathBuf], published: bool, json: Option<&Path>) -> Result<(), Failure> {
    if results.is_empty() && grids.is_empty() && !published {
        return Err(Failure::Usage("nothing to report: give --results, --grid, or --published".into()));
    }
    if !grids.is_empty() {
        let mut reports = Vec::new();
        for p in grids {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let r: GridReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            reports.push(r);
        }
        println!("Best development scores per model");
        let w = reports.iter().map(|r| r.model.len()).chain([5]).max().unwrap_or(5);
        println!("{:<w$}  {:>4}  {:>4}  {:>6}  {:>6}", "Model", "LSTM", "MLP", "LAS", "UAS");
        for r in &reports {
            if let Some(b) = r.rows.first() {
                println!("{:<w$}  {:>4}  {:>4}  {:>6.2}  {:>6.2}", r.model, b.d_lstm, b.d_mlp, b.dev_las, b.dev_uas);
            }
        }
        println!();
    }
    if !results.is_empty() {
        let mut rows = Vec::new();
        for p in results {
            rows.extend(read_rows(p)?);
        }
        let table = report_tables(&rows);
        println!("{table}");
        if let Some(p) = json {
            fs::write(p, table.to_json() + "\n").with_context(|| format!("writing {}", p.display()))?;
        }
    }
    if published {
        println!("Published development scores");
        println!("{:<9}  {:>4}  {:>4}  {:>6}  {:>6}", "Model", "LSTM", "MLP", "LAS", "UAS");
        for (m, l, h, las, uas) in CROSS_VALIDATION {
            println!("{m:<9}  {l:>4}  {h:>4}  {las:>6.2}  {uas:>6.2}");
        }
        println!();
        for t in published_scores() {
            println!("{}\n{}", t.title, report_tables(&t.rows));
        }
    }
    Ok(())
}
