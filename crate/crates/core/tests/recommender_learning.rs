use std::time::Instant;

use reqsynth::recommender::{
    recommend, task1_accuracy, task2_accuracy, train, ForcedChoice, RecommendationSource, TrainConfig, VariantOptions,
};
use reqsynth::synth::separable_training_set;
use reqsynth::templates::VariableTemplate;
use reqsynth::{FeatureToken, IsoRole, SrlTag};

#[test]
fn trained_model_beats_fallback_on_held_out_data() {
    let train_set = separable_training_set(600, 11);
    let held_out = separable_training_set(200, 12);
    let start = Instant::now();
    let outcome = train(&train_set, &TrainConfig::default()).unwrap();
    eprintln!("trained on {} instances in {:?}", train_set.len(), start.elapsed());
    let last = outcome.final_losses();
    eprintln!("final losses: task1 {} task2 {}", last.task1, last.task2);
    assert_eq!(last.task2, 0.0);

    let model = &outcome.model;
    let (m1, f1) = (task1_accuracy(Some(model), &held_out).unwrap(), task1_accuracy(None, &held_out).unwrap());
    let (m2, f2) = (task2_accuracy(Some(model), &held_out).unwrap(), task2_accuracy(None, &held_out).unwrap());
    eprintln!("task1 {m1} vs {f1}; task2 {m2} vs {f2}");
    assert!(m1 > f1 && m2 > f2);

    let tokens = FeatureToken::list([("Flight plan", IsoRole::Subject), ("UAV", IsoRole::Constraint)]).unwrap();
    assert_eq!(model.predict_tags(&tokens).unwrap(), [SrlTag::Arg0, SrlTag::ArgmBnf]);
    let rec = recommend(
        &VariableTemplate::reference_pair(),
        Some(model),
        &tokens,
        &ForcedChoice::default(),
        &VariantOptions::default(),
    )
    .unwrap();
    assert_eq!(rec.source, RecommendationSource::Model);
    assert_eq!(rec.variant.template_id, 1);
    assert_eq!(rec.variant.rendered, "[Arg2][Arg0]Flight plan[Arg0][shall][V][Arg1][ArgM-BNF]UAV[ArgM-BNF]");
}
