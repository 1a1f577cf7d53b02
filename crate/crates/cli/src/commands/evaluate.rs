use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use reqsynth::evaluation::{
    evaluate, holm_adjust, kfold_split, mann_whitney_one_tailed, AggregateScores, EvalSample, MetricReport,
    RunManifest, SampleScores,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::records::{read_jsonl, ReferenceRecord, SystemRecord};
use crate::run::RunDir;
use crate::{base_config, EvaluateArgs};

const METRICS: [&str; 5] = ["bleu2", "bleu3", "bleu4", "meteor", "nist"];

fn metric(s: &SampleScores, name: &str) -> f64 {
    match name {
        "bleu2" => s.bleu2,
        "bleu3" => s.bleu3,
        "bleu4" => s.bleu4,
        "meteor" => s.meteor,
        _ => s.nist,
    }
}

/// `name=path`, or a bare path named after its file stem.
fn parse_system(arg: &str) -> (String, PathBuf) {
    match arg.split_once('=') {
        Some((name, path)) if !name.is_empty() && !name.contains(['/', '\\']) => (name.to_string(), PathBuf::from(path)),
        _ => {
            let path = PathBuf::from(arg);
            let name = path.file_stem().map_or_else(|| "system".to_string(), |s| s.to_string_lossy().into_owned());
            (name, path)
        }
    }
}

fn samples_for(dataset: &[ReferenceRecord], system: &Path) -> CliResult<Vec<EvalSample>> {
    let records: Vec<SystemRecord> = read_jsonl(system)?;
    let mut by_id: BTreeMap<&str, &str> = BTreeMap::new();
    for r in &records {
        if by_id.insert(&r.id, &r.text).is_some() {
            return Err(CliError::input(format!("{}: duplicate id {}", system.display(), r.id)));
        }
    }
    let missing: Vec<&str> = dataset.iter().map(|d| d.id.as_str()).filter(|id| !by_id.contains_key(id)).collect();
    if !missing.is_empty() {
        let shown: Vec<&str> = missing.iter().take(5).copied().collect();
        return Err(CliError::input(format!(
            "{} lacks {} dataset id(s), e.g. {}",
            system.display(),
            missing.len(),
            shown.join(", ")
        )));
    }
    Ok(dataset
        .iter()
        .map(|d| EvalSample {
            id: d.id.clone(),
            candidate: by_id[d.id.as_str()].to_string(),
            references: std::iter::once(d.text.clone()).chain(d.references.iter().cloned()).collect(),
        })
        .collect())
}

#[derive(Serialize)]
struct StatRow {
    metric: &'static str,
    hypothesis: String,
    u_statistic: f64,
    p_value: f64,
    p_holm: f64,
    cohens_d: Option<f64>,
    exact: bool,
}

fn summary_row(out: &mut String, system: &str, fold: &str, n: usize, a: &AggregateScores) {
    out.push_str(&format!(
        "{system},{fold},{n},{:.2},{:.2},{:.2},{:.2},{:.4},{:.2}\n",
        a.bleu2 * 100.0,
        a.bleu3 * 100.0,
        a.bleu4 * 100.0,
        a.meteor * 100.0,
        a.nist,
        a.nist * 100.0
    ));
}

fn write_report(run: &RunDir, stem: &str, report: &MetricReport) -> CliResult<()> {
    run.write(&format!("{stem}.metrics.json"), report.to_json())?;
    run.write(&format!("{stem}.metrics.csv"), report.to_csv())?;
    Ok(())
}

pub fn run(args: EvaluateArgs) -> CliResult<()> {
    let mut config = base_config(&args.common)?;
    if args.k.is_some() {
        config.evaluate.k = args.k;
    }
    if let Some(kind) = args.sampler {
        config.sampler.kind = kind;
    }
    let config = config.finish()?;
    if args.system.len() > 2 {
        return Err(CliError::input("at most two systems can be compared"));
    }

    let dataset: Vec<ReferenceRecord> = read_jsonl(&args.dataset)?;
    let mut seen = BTreeSet::new();
    if let Some(dup) = dataset.iter().find(|d| !seen.insert(d.id.as_str())) {
        return Err(CliError::input(format!("{}: duplicate id {}", args.dataset.display(), dup.id)));
    }
    let mut systems: Vec<(String, Vec<EvalSample>)> = Vec::new();
    for arg in &args.system {
        let (mut name, path) = parse_system(arg);
        if systems.iter().any(|(n, _)| *n == name) {
            name = format!("{name}-{}", systems.len() + 1);
        }
        systems.push((name, samples_for(&dataset, &path)?));
    }

    let folds = match config.evaluate.k {
        Some(k) => {
            let ids: Vec<usize> = (0..dataset.len()).collect();
            Some(kfold_split(&ids, k, config.seed)?)
        }
        None => None,
    };

    let manifest = |system: &str, fold: Option<usize>| RunManifest {
        dataset: Some(args.dataset.display().to_string()),
        system: Some(system.to_string()),
        sampler: args.sampler.map(|s| s.to_string()),
        fold,
        seeds: [("run".to_string(), config.seed)].into_iter().collect(),
    };

    let run = RunDir::create(&config)?;
    let mut summary = String::from("system,fold,samples,bleu2,bleu3,bleu4,meteor,nist,nist_x100\n");
    let mut full_reports = Vec::new();
    for (name, samples) in &systems {
        let report = evaluate(samples, &config.metrics, manifest(name, None))?;
        write_report(&run, name, &report)?;
        summary_row(&mut summary, name, "all", samples.len(), &report.aggregate);
        if let Some(folds) = &folds {
            for fold in folds {
                let subset: Vec<EvalSample> = fold.test.iter().map(|&i| samples[i].clone()).collect();
                let report = evaluate(&subset, &config.metrics, manifest(name, Some(fold.index)))?;
                write_report(&run, &format!("{name}.fold{}", fold.index), &report)?;
                summary_row(&mut summary, name, &fold.index.to_string(), subset.len(), &report.aggregate);
            }
        }
        full_reports.push(report);
    }
    run.write("summary.csv", &summary)?;
    print!("{summary}");

    if let [a, b] = full_reports.as_slice() {
        let (na, nb) = (&systems[0].0, &systems[1].0);
        let mut rows = Vec::new();
        for m in METRICS {
            let xa: Vec<f64> = a.per_sample.iter().map(|s| metric(s, m)).collect();
            let xb: Vec<f64> = b.per_sample.iter().map(|s| metric(s, m)).collect();
            let r = mann_whitney_one_tailed(&xa, &xb)?;
            rows.push(StatRow {
                metric: m,
                hypothesis: format!("{na} > {nb}"),
                u_statistic: r.u_statistic,
                p_value: r.p_value,
                p_holm: r.p_holm,
                cohens_d: r.cohens_d,
                exact: r.exact,
            });
        }
        let adjusted = holm_adjust(&rows.iter().map(|r| r.p_value).collect::<Vec<_>>());
        for (row, p) in rows.iter_mut().zip(adjusted) {
            row.p_holm = p;
        }
        run.write("stats.json", serde_json::to_string_pretty(&rows).expect("serializes"))?;
        println!("metric,hypothesis,u,p,p_holm,cohens_d");
        for r in &rows {
            let d = r.cohens_d.map_or_else(|| "undefined".to_string(), |d| format!("{d:.4}"));
            println!("{},{},{},{:.6},{:.6},{d}", r.metric, r.hypothesis, r.u_statistic, r.p_value, r.p_holm);
        }
    }
    Ok(())
}
