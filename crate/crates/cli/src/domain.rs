use poplearn::games::{MarkovGame, MatrixGame};
use poplearn::learning::Domain;
use poplearn::Result;

use crate::config::PolicySpec;

/// Domains whose fixed policies can be named in a config.
pub trait ConfigDomain: Domain {
    fn policy(&self, spec: &PolicySpec) -> Result<Self::Policy>;
}

impl ConfigDomain for MatrixGame {
    fn policy(&self, spec: &PolicySpec) -> Result<Self::Policy> {
        spec.matrix_policy(self)
    }
}

impl ConfigDomain for MarkovGame {
    fn policy(&self, spec: &PolicySpec) -> Result<Self::Policy> {
        spec.tabular_policy()
    }
}
