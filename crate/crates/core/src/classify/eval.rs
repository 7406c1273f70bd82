use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::backend::{ClassifyError, Classifier};
use super::label::AgencyLabel;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold set is empty")]
    EmptyGold,
    #[error("gold and predicted lengths differ ({gold} vs {predicted})")]
    LengthMismatch { gold: usize, predicted: usize },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Binary classifier scores. `confusion[gold][pred]`, index 0 = agentic,
/// 1 = communal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub n: usize,
    pub accuracy: f64,
    pub f1_macro: f64,
    pub f1_micro: f64,
    pub f1_weighted: f64,
    pub f1_agentic: f64,
    pub f1_communal: f64,
    pub confusion: [[u64; 2]; 2],
}

fn f1(tp: u64, fp: u64, fn_: u64) -> f64 {
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let p = ratio(tp, tp + fp);
    let r = ratio(tp, tp + fn_);
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

impl EvalMetrics {
    pub fn from_confusion(confusion: [[u64; 2]; 2]) -> Result<Self, EvalError> {
        let total: u64 = confusion.iter().flatten().sum();
        if total == 0 {
            return Err(EvalError::EmptyGold);
        }
        let per_class: Vec<f64> = (0..2)
            .map(|k| {
                let tp = confusion[k][k];
                let fp = confusion[1 - k][k];
                let fn_ = confusion[k][1 - k];
                f1(tp, fp, fn_)
            })
            .collect();
        let support: Vec<u64> = (0..2).map(|k| confusion[k][0] + confusion[k][1]).collect();
        let tp_sum = confusion[0][0] + confusion[1][1];
        let fp_sum = confusion[1][0] + confusion[0][1];
        let fn_sum = confusion[0][1] + confusion[1][0];
        Ok(EvalMetrics {
            n: total as usize,
            accuracy: tp_sum as f64 / total as f64,
            f1_macro: (per_class[0] + per_class[1]) / 2.0,
            f1_micro: f1(tp_sum, fp_sum, fn_sum),
            f1_weighted: (per_class[0] * support[0] as f64 + per_class[1] * support[1] as f64) / total as f64,
            f1_agentic: per_class[0],
            f1_communal: per_class[1],
            confusion,
        })
    }

    pub fn from_predictions(gold: &[AgencyLabel], predicted: &[AgencyLabel]) -> Result<Self, EvalError> {
        if gold.len() != predicted.len() {
            return Err(EvalError::LengthMismatch { gold: gold.len(), predicted: predicted.len() });
        }
        let mut confusion = [[0u64; 2]; 2];
        for (g, p) in gold.iter().zip(predicted) {
            confusion[g.index()][p.index()] += 1;
        }
        Self::from_confusion(confusion)
    }
}

pub fn eval_classifier(classifier: &Classifier, gold: &[(String, AgencyLabel)]) -> Result<EvalMetrics, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let texts: Vec<String> = gold.iter().map(|(t, _)| t.clone()).collect();
    let predicted: Vec<AgencyLabel> = classifier.classify_batch(&texts)?.into_iter().map(|c| c.label).collect();
    let labels: Vec<AgencyLabel> = gold.iter().map(|(_, l)| *l).collect();
    EvalMetrics::from_predictions(&labels, &predicted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn symmetric_confusion() {
        let m = EvalMetrics::from_confusion([[2, 1], [1, 2]]).unwrap();
        assert!(close(m.accuracy, 4.0 / 6.0));
        for v in [m.f1_agentic, m.f1_communal, m.f1_macro, m.f1_micro, m.f1_weighted] {
            assert!(close(v, 2.0 / 3.0));
        }
    }

    #[test]
    fn all_agentic_predictions() {
        use AgencyLabel::*;
        let m = EvalMetrics::from_predictions(&[Agentic, Agentic, Agentic, Communal], &[Agentic; 4]).unwrap();
        assert!(close(m.accuracy, 0.75));
        assert_eq!(m.f1_communal, 0.0);
        assert!(close(m.f1_macro, (6.0 / 7.0) / 2.0));
        assert!(close(m.f1_micro, 0.75));
        assert!(close(m.f1_weighted, 3.0 * (6.0 / 7.0) / 4.0));
    }

    #[test]
    fn perfect_and_empty() {
        let m = EvalMetrics::from_confusion([[3, 0], [0, 5]]).unwrap();
        assert_eq!((m.accuracy, m.f1_macro, m.f1_micro, m.f1_weighted), (1.0, 1.0, 1.0, 1.0));
        assert!(matches!(EvalMetrics::from_confusion([[0, 0], [0, 0]]), Err(EvalError::EmptyGold)));
        let c = Classifier::from_lexicon(crate::classify::Lexicon::seed(), AgencyLabel::Communal);
        assert!(matches!(eval_classifier(&c, &[]), Err(EvalError::EmptyGold)));
    }
}
