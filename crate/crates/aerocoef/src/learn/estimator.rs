//! Model families, hyper-parameter grids, fitting and persistence.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::data::TrainData;
use crate::learn::forest::ForestModel;
use crate::learn::gbt::GbtModel;
use crate::learn::knn::{KnnModel, KnnWeights};
use crate::learn::poly::PolyModel;
use crate::learn::svr::{SvrKernel, SvrModel};
use crate::learn::tree::TreeModel;

/// The eight regression families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Constant,
    Linear,
    Polynomial,
    Svr,
    Knn,
    Tree,
    Forest,
    Gbt,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Constant,
        Family::Linear,
        Family::Polynomial,
        Family::Svr,
        Family::Knn,
        Family::Tree,
        Family::Forest,
        Family::Gbt,
    ];
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Constant => "constant",
            Family::Linear => "linear",
            Family::Polynomial => "polynomial",
            Family::Svr => "svr",
            Family::Knn => "knn",
            Family::Tree => "tree",
            Family::Forest => "forest",
            Family::Gbt => "gbt",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Family::Constant),
            "linear" => Ok(Family::Linear),
            "polynomial" => Ok(Family::Polynomial),
            "svr" => Ok(Family::Svr),
            "knn" => Ok(Family::Knn),
            "tree" => Ok(Family::Tree),
            "forest" => Ok(Family::Forest),
            "gbt" => Ok(Family::Gbt),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// A family plus one hyper-parameter assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum EstimatorSpec {
    Constant,
    Linear,
    Polynomial { degree: usize },
    Svr { kernel: SvrKernel },
    Knn { neighbors: usize, weights: KnnWeights },
    Tree { max_depth: usize },
    Forest { max_depth: usize, n_trees: usize },
    Gbt { max_depth: usize },
}

impl EstimatorSpec {
    pub fn family(&self) -> Family {
        match self {
            EstimatorSpec::Constant => Family::Constant,
            EstimatorSpec::Linear => Family::Linear,
            EstimatorSpec::Polynomial { .. } => Family::Polynomial,
            EstimatorSpec::Svr { .. } => Family::Svr,
            EstimatorSpec::Knn { .. } => Family::Knn,
            EstimatorSpec::Tree { .. } => Family::Tree,
            EstimatorSpec::Forest { .. } => Family::Forest,
            EstimatorSpec::Gbt { .. } => Family::Gbt,
        }
    }

    /// The default hyper-parameter grid of a family, enumerated lowest
    /// complexity first (the cross-validation tie-break order).
    pub fn default_grid(family: Family) -> Vec<EstimatorSpec> {
        match family {
            Family::Constant => vec![EstimatorSpec::Constant],
            Family::Linear => vec![EstimatorSpec::Linear],
            Family::Polynomial => {
                (2..=5).map(|degree| EstimatorSpec::Polynomial { degree }).collect()
            }
            Family::Svr => [
                SvrKernel::Linear,
                SvrKernel::Polynomial,
                SvrKernel::Gaussian,
                SvrKernel::Sigmoid,
            ]
            .into_iter()
            .map(|kernel| EstimatorSpec::Svr { kernel })
            .collect(),
            Family::Knn => {
                let mut grid = Vec::new();
                let mut k = 1;
                while k <= 701 {
                    for weights in [KnnWeights::Uniform, KnnWeights::Distance] {
                        grid.push(EstimatorSpec::Knn { neighbors: k, weights });
                    }
                    k += 20;
                }
                grid
            }
            Family::Tree => (1..=10).map(|max_depth| EstimatorSpec::Tree { max_depth }).collect(),
            Family::Forest => {
                let mut grid = Vec::new();
                for max_depth in 1..=6 {
                    for n_trees in (100..=700).step_by(100) {
                        grid.push(EstimatorSpec::Forest { max_depth, n_trees });
                    }
                }
                grid
            }
            Family::Gbt => (1..=6).map(|max_depth| EstimatorSpec::Gbt { max_depth }).collect(),
        }
    }
}

impl std::fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorSpec::Constant => write!(f, "constant"),
            EstimatorSpec::Linear => write!(f, "linear"),
            EstimatorSpec::Polynomial { degree } => write!(f, "polynomial(degree={degree})"),
            EstimatorSpec::Svr { kernel } => write!(f, "svr(kernel={kernel:?})"),
            EstimatorSpec::Knn { neighbors, weights } => {
                write!(f, "knn(k={neighbors}, weights={weights:?})")
            }
            EstimatorSpec::Tree { max_depth } => write!(f, "tree(depth={max_depth})"),
            EstimatorSpec::Forest { max_depth, n_trees } => {
                write!(f, "forest(depth={max_depth}, trees={n_trees})")
            }
            EstimatorSpec::Gbt { max_depth } => write!(f, "gbt(depth={max_depth})"),
        }
    }
}

/// Fitted state of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "state", rename_all = "lowercase")]
pub enum FittedModel {
    Constant { value: f64 },
    Linear(PolyModel),
    Polynomial(PolyModel),
    Svr(SvrModel),
    Knn(KnnModel),
    Tree(TreeModel),
    Forest(ForestModel),
    Gbt(GbtModel),
}

/// A fitted estimator: spec, opaque state, and the feature ranges seen in
/// training (used to warn on extrapolation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedEstimator {
    pub spec: EstimatorSpec,
    pub model: FittedModel,
    /// (min, max) of angle of attack and Mach over the training rows.
    pub alpha_support: (f64, f64),
    pub mach_support: (f64, f64),
}

/// Fit a spec on training rows. Gradient boosting needs the validation set
/// for early stopping; randomized families consume only the provided seed.
pub fn fit(
    spec: &EstimatorSpec,
    train: &TrainData,
    val: Option<&TrainData>,
    seed: u64,
) -> Result<TrainedEstimator> {
    if train.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let model = match *spec {
        EstimatorSpec::Constant => FittedModel::Constant {
            value: train.y.iter().sum::<f64>() / train.len() as f64,
        },
        EstimatorSpec::Linear => FittedModel::Linear(PolyModel::fit(train, 1)?),
        EstimatorSpec::Polynomial { degree } => {
            FittedModel::Polynomial(PolyModel::fit(train, degree)?)
        }
        EstimatorSpec::Svr { kernel } => FittedModel::Svr(SvrModel::fit(train, kernel)?),
        EstimatorSpec::Knn { neighbors, weights } => {
            FittedModel::Knn(KnnModel::fit(train, neighbors, weights)?)
        }
        EstimatorSpec::Tree { max_depth } => {
            FittedModel::Tree(TreeModel::fit(&train.x, &train.y, max_depth)?)
        }
        EstimatorSpec::Forest { max_depth, n_trees } => {
            FittedModel::Forest(ForestModel::fit(&train.x, &train.y, max_depth, n_trees, seed)?)
        }
        EstimatorSpec::Gbt { max_depth } => {
            let val = val.ok_or_else(|| {
                Error::Invalid("gradient boosting requires a validation set".into())
            })?;
            FittedModel::Gbt(GbtModel::fit(train, val, max_depth)?)
        }
    };
    let mut alpha_support = (f64::INFINITY, f64::NEG_INFINITY);
    let mut mach_support = (f64::INFINITY, f64::NEG_INFINITY);
    for &[a, m] in &train.x {
        alpha_support = (alpha_support.0.min(a), alpha_support.1.max(a));
        mach_support = (mach_support.0.min(m), mach_support.1.max(m));
    }
    Ok(TrainedEstimator { spec: *spec, model, alpha_support, mach_support })
}

impl TrainedEstimator {
    pub fn predict_one(&self, row: [f64; 2]) -> f64 {
        match &self.model {
            FittedModel::Constant { value } => *value,
            FittedModel::Linear(m) | FittedModel::Polynomial(m) => m.predict_one(row),
            FittedModel::Svr(m) => m.predict_one(row),
            FittedModel::Knn(m) => m.predict_one(row),
            FittedModel::Tree(m) => m.predict_one(row),
            FittedModel::Forest(m) => m.predict_one(row),
            FittedModel::Gbt(m) => m.predict_one(row),
        }
    }

    /// Vectorized prediction; every output is checked finite.
    pub fn predict(&self, xs: &[[f64; 2]]) -> Result<Vec<f64>> {
        let out: Vec<f64> = xs.iter().map(|&r| self.predict_one(r)).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("prediction"));
        }
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Invalid(format!("model serialization failed: {e}")))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::ModelFormat { path: path.into(), msg: e.to_string() })
    }
}
