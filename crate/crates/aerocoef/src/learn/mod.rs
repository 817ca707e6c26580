//! Regression families, cross-validated selection, metrics, the repetition
//! harness and bound reports.

pub mod cv;
pub mod curves;
pub mod data;
pub mod estimator;
pub mod experiment;
pub mod forest;
pub mod gbt;
pub mod knn;
pub mod metrics;
pub mod poly;
pub mod svr;
pub mod tree;

pub use cv::{cv_select, CvRecord};
pub use curves::{prediction_curves, CurvePoint};
pub use data::TrainData;
pub use estimator::{fit, EstimatorSpec, Family, TrainedEstimator};
pub use experiment::{bound_report, run_experiment, BoundReport, ExperimentTable};
pub use metrics::{metrics, Metrics};
