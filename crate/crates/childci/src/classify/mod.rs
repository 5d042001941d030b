//! Three-class probabilistic classifiers: a random forest and a
//! polynomial-kernel SVM behind one model type. Inputs are standardized
//! column-wise with training-set statistics held inside the model.

mod forest;
mod svm;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AgeGroup;

pub use forest::Tree;
pub use svm::SvmModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    RandomForest,
    SvmPoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfParams {
    pub n_estimators: usize,
    pub max_depth: usize,
}

impl Default for RfParams {
    fn default() -> Self {
        RfParams {
            n_estimators: 10,
            max_depth: 75,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Soft-margin regularization parameter.
    pub c: f64,
    pub degree: u32,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { c: 0.1, degree: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub rf: RfParams,
    #[serde(default)]
    pub svm: SvmParams,
    pub seed: u64,
}

impl ClassifierConfig {
    pub fn random_forest(seed: u64) -> Self {
        ClassifierConfig {
            kind: ClassifierKind::RandomForest,
            rf: RfParams::default(),
            svm: SvmParams::default(),
            seed,
        }
    }

    pub fn svm_poly(seed: u64) -> Self {
        ClassifierConfig {
            kind: ClassifierKind::SvmPoly,
            ..Self::random_forest(seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rf.n_estimators == 0 || self.rf.max_depth == 0 {
            return Err(Error::InvalidConfig(
                "random forest needs at least 1 estimator and depth 1".into(),
            ));
        }
        if self.svm.c <= 0.0 || self.svm.degree == 0 {
            return Err(Error::InvalidConfig(
                "svm needs c > 0 and degree >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Column-wise standardization fitted on training rows only; stds are floored
/// at machine epsilon so constant columns stay finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Array2<f64>) -> Self {
        let n = x.nrows() as f64;
        let d = x.ncols();
        let mut mean = vec![0.0; d];
        let mut std = vec![0.0; d];
        for j in 0..d {
            let col = x.column(j);
            let m = col.sum() / n;
            let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
            mean[j] = m;
            std[j] = var.sqrt().max(f64::EPSILON);
        }
        Standardizer { mean, std }
    }

    pub fn transform(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = x.clone();
        for mut row in out.rows_mut() {
            for j in 0..row.len() {
                row[j] = (row[j] - self.mean[j]) / self.std[j];
            }
        }
        out
    }

    pub fn transform_row(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| (v - self.mean[j]) / self.std[j])
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Fitted {
    Forest(Vec<Tree>),
    Svm(Box<SvmModel>),
    /// Training data held a single class; that class gets probability 1.
    SingleClass(AgeGroup),
}

/// A fitted model: configuration, standardization parameters and the fitted
/// estimator, serializable as versioned JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub version: u32,
    pub config: ClassifierConfig,
    pub standardizer: Standardizer,
    fitted: Fitted,
}

pub const MODEL_VERSION: u32 = 1;

/// Fits a classifier on raw (unstandardized) feature rows.
pub fn fit(x: &Array2<f64>, y: &[AgeGroup], config: &ClassifierConfig) -> Result<Model> {
    config.validate()?;
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            got: y.len(),
            expected: x.nrows(),
        });
    }
    if x.nrows() == 0 {
        return Err(Error::EmptyInput("training matrix"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig(
            "training matrix contains non-finite values".into(),
        ));
    }

    let standardizer = Standardizer::fit(x);
    let mut present: Vec<AgeGroup> = y.to_vec();
    present.sort_unstable();
    present.dedup();
    if present.len() == 1 {
        eprintln!(
            "warning: training labels hold the single class {}; fitting a degenerate model",
            present[0]
        );
        return Ok(Model {
            version: MODEL_VERSION,
            config: *config,
            standardizer,
            fitted: Fitted::SingleClass(present[0]),
        });
    }

    let xs = standardizer.transform(x);
    let fitted = match config.kind {
        ClassifierKind::RandomForest => Fitted::Forest(forest::fit(&xs, y, &config.rf, config.seed)),
        ClassifierKind::SvmPoly => Fitted::Svm(Box::new(svm::fit(&xs, y, &config.svm)?)),
    };
    Ok(Model {
        version: MODEL_VERSION,
        config: *config,
        standardizer,
        fitted,
    })
}

/// Class probabilities for one raw feature row: vote fractions for the
/// forest, a softmax over one-vs-rest decision values for the SVM.
pub fn predict_proba(model: &Model, row: ArrayView1<'_, f64>) -> Result<[f64; 3]> {
    if row.len() != model.standardizer.mean.len() {
        return Err(Error::DimensionMismatch {
            got: row.len(),
            expected: model.standardizer.mean.len(),
        });
    }
    let z = model.standardizer.transform_row(row);
    Ok(match &model.fitted {
        Fitted::SingleClass(class) => {
            let mut p = [0.0; 3];
            p[class.index()] = 1.0;
            p
        }
        Fitted::Forest(trees) => forest::predict_proba(trees, &z),
        Fitted::Svm(svm) => svm::predict_proba(svm, &z),
    })
}

impl Model {
    /// The age group with the highest probability (lowest index on ties).
    pub fn predict(&self, row: ArrayView1<'_, f64>) -> Result<AgeGroup> {
        let p = predict_proba(self, row)?;
        Ok(argmax_group(&p))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization")
    }

    pub fn from_json(text: &str) -> Result<Model> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Index of the maximum probability, ties to the lowest group index.
pub fn argmax_group(p: &[f64; 3]) -> AgeGroup {
    let mut best = 0;
    for i in 1..3 {
        if p[i] > p[best] {
            best = i;
        }
    }
    AgeGroup::from_index(best).unwrap()
}
