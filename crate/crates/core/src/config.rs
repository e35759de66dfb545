//! Pipeline configuration: one document bundling every stage's parameters.
//!
//! All fields have defaults, so an empty config `{}` is valid. The CLI
//! loads it from `--config`, the `DARKSTORE_CONFIG` environment variable,
//! or built-in defaults, and threads the root seed through every stage.

use serde::{Deserialize, Serialize};

use crate::arrangement::{ArrangeParams, ProductSpec};
use crate::layout::{FixtureTemplate, LayoutParams, StoreSpec};
use crate::lod::LodParams;
use crate::planner::{PlannerParams, RobotModel};
use crate::scene::ScenarioRecord;
use crate::task_eval::Tolerances;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StoreConfig {
    pub width: f64,
    pub depth: f64,
}

impl Default for StoreConfig {
    fn default() -> Self {
        StoreConfig {
            width: 12.0,
            depth: 9.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub store: StoreConfig,
    pub scenario: ScenarioRecord,
    pub layout: LayoutParams,
    pub arrange: ArrangeParams,
    pub lod: LodParams,
    pub planner: PlannerParams,
    pub eval: Tolerances,
    /// Override the built-in fixture templates.
    pub templates: Option<Vec<FixtureTemplate>>,
    /// Override the built-in product catalog.
    pub products: Option<Vec<ProductSpec>>,
    /// Override the built-in robot model.
    pub robot: Option<RobotModel>,
}

impl GenConfig {
    /// Thread one root seed through every stage.
    pub fn with_seed(mut self, seed: u64) -> GenConfig {
        self.layout.seed = seed;
        self.arrange.seed = seed;
        self.lod.seed = seed;
        self.planner.seed = seed;
        self
    }

    pub fn root_seed(&self) -> u64 {
        self.layout.seed
    }

    pub fn store_spec(&self) -> Result<StoreSpec> {
        StoreSpec::rectangular(self.store.width, self.store.depth)
    }

    pub fn templates(&self) -> Vec<FixtureTemplate> {
        self.templates
            .clone()
            .unwrap_or_else(crate::catalog::default_templates)
    }

    pub fn products(&self) -> Vec<ProductSpec> {
        self.products
            .clone()
            .unwrap_or_else(crate::catalog::default_products)
    }

    pub fn robot(&self) -> RobotModel {
        self.robot
            .clone()
            .unwrap_or_else(crate::planner::model::default_model)
    }
}
