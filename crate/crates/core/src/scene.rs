//! Scene files, asset manifests, and scenario records.
//!
//! The scene file is the pipeline's interchange format: canonical JSON
//! (sorted keys, 17-significant-digit floats) so identical generation
//! inputs produce byte-identical files. The tensor field is not stored; it
//! reconstructs deterministically from the store walls and seeded fixtures
//! with the recorded parameters.

use serde::{Deserialize, Serialize};

use crate::arrangement::{Arrangement, ArrangeParams, ItemInstance, Lane};
use crate::geometry::Vec3;
use crate::layout::{
    FixturePlacement, FixtureTemplate, Layout, LayoutParams, Provenance, StoreSpec, TextureIds,
};
use crate::lod::TriMesh;
use crate::tensor_field::build_field;
use crate::{Error, Result};

/// Randomization axes toggled per testing scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioRecord {
    pub name: String,
    /// Randomized robot start pose within the task-relevant region.
    pub robot_position: bool,
    /// Randomized wall/floor/ceiling texture assignment.
    pub textures: bool,
    /// Per-trial store layouts.
    pub store_layout: bool,
    /// Per-trial shelf arrangements.
    pub shelf_arrangement: bool,
    /// Items drawn from other tasks' pools.
    pub unseen_task_items: bool,
    /// Items from outside every training pool.
    pub completely_unseen_items: bool,
}

impl Default for ScenarioRecord {
    fn default() -> Self {
        ScenarioRecord::in_domain()
    }
}

impl ScenarioRecord {
    pub fn in_domain() -> ScenarioRecord {
        ScenarioRecord {
            name: "in_domain".into(),
            robot_position: true,
            textures: false,
            store_layout: false,
            shelf_arrangement: false,
            unseen_task_items: false,
            completely_unseen_items: false,
        }
    }

    pub fn unseen_scenes() -> ScenarioRecord {
        ScenarioRecord {
            name: "unseen_scenes".into(),
            textures: true,
            store_layout: true,
            ..ScenarioRecord::in_domain()
        }
    }

    pub fn unseen_scenes_and_items() -> ScenarioRecord {
        ScenarioRecord {
            name: "unseen_scenes_and_items".into(),
            unseen_task_items: true,
            ..ScenarioRecord::unseen_scenes()
        }
    }

    pub fn by_name(name: &str) -> Result<ScenarioRecord> {
        match name {
            "in_domain" => Ok(ScenarioRecord::in_domain()),
            "unseen_scenes" => Ok(ScenarioRecord::unseen_scenes()),
            "unseen_scenes_and_items" => Ok(ScenarioRecord::unseen_scenes_and_items()),
            other => Err(Error::UnknownId(format!("scenario {other}"))),
        }
    }
}

/// Generation parameters recorded in the scene file so the tensor field and
/// downstream stages reproduce exactly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub layout: LayoutParams,
    pub arrange: ArrangeParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub schema_version: u32,
    pub root_seed: u64,
    pub scenario: ScenarioRecord,
    pub store: StoreSpec,
    pub textures: TextureIds,
    pub placements: Vec<FixturePlacement>,
    pub lanes: Vec<Lane>,
    pub items: Vec<ItemInstance>,
    /// Asset manifest file references.
    pub assets: Vec<String>,
    pub params: GenParams,
}

pub const SCHEMA_VERSION: u32 = 1;

impl SceneFile {
    pub fn from_layout(
        layout: &Layout,
        root_seed: u64,
        scenario: ScenarioRecord,
        params: GenParams,
    ) -> SceneFile {
        SceneFile {
            schema_version: SCHEMA_VERSION,
            root_seed,
            scenario,
            store: layout.store.clone(),
            textures: layout.textures.clone(),
            placements: layout.placements.clone(),
            lanes: Vec::new(),
            items: Vec::new(),
            assets: Vec::new(),
            params,
        }
    }

    pub fn set_arrangement(&mut self, arrangement: &Arrangement) {
        self.lanes = arrangement.lanes.clone();
        self.items = arrangement.items.clone();
    }

    /// Rebuild the in-memory layout; the tensor field is reconstructed from
    /// the walls and the placements recorded as seeded.
    pub fn to_layout(&self, templates: &[FixtureTemplate]) -> Result<Layout> {
        let seeded: Vec<FixturePlacement> = self
            .placements
            .iter()
            .filter(|p| p.provenance == Provenance::Seeded)
            .cloned()
            .collect();
        let lp = &self.params.layout;
        let mut polys = vec![crate::geometry::resample_polygon(
            &self.store.walls,
            lp.resample_max_edge,
        )?];
        for p in &seeded {
            let template = crate::layout::template_by_id(templates, &p.template_id)?;
            let poly = crate::geometry::Polygon::new(p.footprint(template).corners().to_vec())?;
            polys.push(crate::geometry::resample_polygon(&poly, lp.resample_max_edge)?);
        }
        let field = build_field(
            &polys,
            lp.decay,
            lp.grid_resolution,
            self.store.bounds(),
        )?;
        Ok(Layout {
            store: self.store.clone(),
            placements: self.placements.clone(),
            field,
            textures: self.textures.clone(),
        })
    }

    pub fn to_arrangement(&self, templates: &[FixtureTemplate]) -> Result<Arrangement> {
        Ok(Arrangement {
            layout: self.to_layout(templates)?,
            lanes: self.lanes.clone(),
            items: self.items.clone(),
        })
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        crate::canonical::to_canonical_string(self)
    }

    pub fn from_json(text: &str) -> Result<SceneFile> {
        let scene: SceneFile = serde_json::from_str(text)?;
        if scene.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported scene schema version {}",
                scene.schema_version
            )));
        }
        Ok(scene)
    }
}

// ---------------------------------------------------------------------------
// Asset manifest
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetRecord {
    pub id: String,
    pub category: String,
    /// Uniform scale applied to the source mesh (meters per unit).
    pub canonical_scale: f64,
    pub orientation_note: String,
    pub mesh_path: String,
    pub lod_mesh_path: Option<String>,
    /// Bounding dimensions after canonical scale.
    pub dims: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetManifest {
    pub assets: Vec<AssetRecord>,
}

impl AssetRecord {
    /// Manifest dims must match the scaled mesh bounding box within 2%.
    pub fn check_dims(&self, mesh: &TriMesh) -> Result<()> {
        let (lo, hi) = mesh.bounding_box();
        let extent = (hi - lo) * self.canonical_scale;
        for (got, want) in [
            (extent.x, self.dims.x),
            (extent.y, self.dims.y),
            (extent.z, self.dims.z),
        ] {
            let scale = want.abs().max(1e-9);
            if (got - want).abs() / scale > 0.02 {
                return Err(Error::InvalidParameter(format!(
                    "asset {}: mesh extent {got:.4} deviates from declared {want:.4}",
                    self.id
                )));
            }
        }
        Ok(())
    }
}

impl AssetManifest {
    pub fn to_canonical_json(&self) -> Result<String> {
        crate::canonical::to_canonical_string(self)
    }

    pub fn from_json(text: &str) -> Result<AssetManifest> {
        Ok(serde_json::from_str(text)?)
    }
}
