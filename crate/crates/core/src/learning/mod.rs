//! Best-response training and the population learning loops.

mod abr;
mod config;
mod domain;
mod estimator;
mod population;
mod train;

pub use abr::{abr_q_learning, exact_best_response, train_against_row};
pub use config::{InitKind, NewRowInit, TrainConfig};
pub use domain::{Domain, BR_TIE_TOL};
pub use estimator::{update_payoff_estimator, PayoffEstimator};
pub use population::{PolicyKey, Population, PopulationInit, Slot};
pub use train::{neupl_adaptive, neupl_static, psro, EpisodeCounts, EpochReport, PsroIteration};
