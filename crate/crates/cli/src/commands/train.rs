use std::fs::File;
use std::io::BufReader;

use reqsynth::corpus::filter_corpus;
use reqsynth::recommender::{
    read_instances, reverse_engineer_training_set, task1_accuracy, task2_accuracy, train, write_instances,
};
use serde_json::json;

use super::load_corpus;
use crate::error::{CliError, CliResult};
use crate::records::load_templates;
use crate::run::RunDir;
use crate::{base_config, TrainArgs};

pub fn run(args: TrainArgs) -> CliResult<()> {
    let mut config = base_config(&args.common)?;
    if !args.corpus.is_empty() {
        config.paths.corpus = args.corpus;
    }
    if args.templates.is_some() {
        config.paths.templates = args.templates;
    }
    if let Some(epochs) = args.epochs {
        config.train.epochs = epochs;
    }
    let templates = load_templates(config.paths.templates.as_deref())?;
    if config.train.template_ids.is_empty() {
        config.train.template_ids = templates.iter().map(|t| t.id).collect();
    }
    let config = config.finish()?;

    let (instances, derived) = match &args.instances {
        Some(path) => {
            let file = File::open(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
            let instances = read_instances(BufReader::new(file))
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            (instances, None)
        }
        None => {
            let (requirements, _) = load_corpus(&config.paths.corpus)?;
            let kept = filter_corpus(requirements, &config.filter).kept;
            let derived = reverse_engineer_training_set(&kept, &templates, config.seed);
            (derived.instances.clone(), Some(derived))
        }
    };
    if instances.is_empty() {
        return Err(CliError::input("no training instances"));
    }

    let outcome = train(&instances, &config.train)?;
    let model = &outcome.model;
    let accuracy = |m| -> CliResult<(f64, f64)> {
        Ok((task1_accuracy(m, &instances)?, task2_accuracy(m, &instances)?))
    };
    let (model1, model2) = accuracy(Some(model))?;
    let (fallback1, fallback2) = accuracy(None)?;
    let last = outcome.final_losses();

    let run = RunDir::create(&config)?;
    run.write("model.json", model.to_json())?;
    let mut history = String::from("epoch,task1,task2\n");
    for h in &outcome.history {
        history.push_str(&format!("{},{},{}\n", h.epoch, h.task1, h.task2));
    }
    run.write("history.csv", history)?;
    if let Some(derived) = &derived {
        let mut buf = Vec::new();
        write_instances(&mut buf, &derived.instances)?;
        run.write("instances.jsonl", buf)?;
        run.write("skipped.json", serde_json::to_string_pretty(&derived.skipped).expect("serializes"))?;
    }
    let report = json!({
        "instances": instances.len(),
        "final_loss": { "task1": last.task1, "task2": last.task2 },
        "training_accuracy": {
            "task1": { "model": model1, "fallback": fallback1 },
            "task2": { "model": model2, "fallback": fallback2 },
        },
    });
    run.write("train_report.json", serde_json::to_string_pretty(&report).expect("serializes"))?;

    println!("instances: {}", instances.len());
    println!("final loss: task1 {:.6} task2 {:.6}", last.task1, last.task2);
    println!("task1 accuracy: model {model1:.4} fallback {fallback1:.4}");
    println!("task2 accuracy: model {model2:.4} fallback {fallback2:.4}");
    eprintln!("model: {}", run.file("model.json").display());
    Ok(())
}
