//! Fixture layout generation.
//!
//! Three stages: rejection-sampled seed fixtures (pallets, boxes, fridges),
//! a tensor field built from the store walls and seed footprints, then two
//! tensor-guided shelf placement passes (horizontal rows, vertical columns).
//! Every accepted placement keeps the store navigable: fixture fronts and
//! the door stay connected through corridors at least `passage_width` wide,
//! which [`validate_layout`] re-checks on the finished layout.

mod passes;
mod validate;

pub use passes::{place_pass, PassAxis, PassStats};
pub use validate::{validate_layout, LayoutReport, PassageGrid, Violation};

use serde::{Deserialize, Serialize};

use crate::geometry::{obb_inside_polygon, obb_overlap, Obb2, Polygon, Rect, Vec2};
use crate::tensor_field::{build_field, TensorField};
use crate::{rng::substream, Error, Result};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Store and fixtures
// ---------------------------------------------------------------------------

/// Door opening on the store wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoorSegment {
    pub a: Vec2,
    pub b: Vec2,
}

/// Store floor: rectangle dimensions, wall polygon, door openings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreSpec {
    pub width: f64,
    pub depth: f64,
    pub walls: Polygon,
    pub doors: Vec<DoorSegment>,
}

impl StoreSpec {
    /// Rectangular store with a 1.5 m door centered on the south wall.
    pub fn rectangular(width: f64, depth: f64) -> Result<StoreSpec> {
        if !(width > 0.0 && depth > 0.0) {
            return Err(Error::InvalidParameter(
                "store dimensions must be positive".into(),
            ));
        }
        Ok(StoreSpec {
            width,
            depth,
            walls: Polygon::rectangle(width, depth)?,
            doors: vec![DoorSegment {
                a: Vec2::new(width / 2.0 - 0.75, 0.0),
                b: Vec2::new(width / 2.0 + 0.75, 0.0),
            }],
        })
    }

    pub fn bounds(&self) -> Rect {
        let (lo, hi) = self.walls.bounding_box();
        Rect::new(lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixtureKind {
    Shelf,
    Fridge,
    Showcase,
    Pallet,
    Box,
}

impl FixtureKind {
    /// Shelf-like fixtures expose one aisle-facing side (local −y); pallets
    /// and boxes are accessible from every side.
    pub fn has_single_front(self) -> bool {
        matches!(self, FixtureKind::Shelf | FixtureKind::Fridge | FixtureKind::Showcase)
    }

    /// Kinds scattered during the seeding stage.
    pub fn is_seedable(self) -> bool {
        !matches!(self, FixtureKind::Shelf)
    }
}

/// One storage board of a fixture, in the fixture frame (front at −y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Board {
    pub index: usize,
    /// Board surface height above the floor.
    pub z: f64,
    /// Usable surface rectangle in the fixture frame.
    pub rect: Rect,
    /// Clear height to the next board above (headroom for the top board).
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureTemplate {
    pub id: String,
    pub kind: FixtureKind,
    /// Footprint half extents (x along the unit, y across its depth).
    pub half_extents: Vec2,
    pub height: f64,
    pub boards: Vec<Board>,
}

impl FixtureTemplate {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_extents.x > 0.0 && self.half_extents.y > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "template {}: footprint must be positive",
                self.id
            )));
        }
        let mut last_z = f64::NEG_INFINITY;
        for b in &self.boards {
            if b.z <= last_z {
                return Err(Error::InvalidParameter(format!(
                    "template {}: board heights must be strictly increasing",
                    self.id
                )));
            }
            if !(b.gap > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "template {}: board gaps must be positive",
                    self.id
                )));
            }
            last_z = b.z;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Seeded,
    HorizontalPass,
    VerticalPass,
}

/// A posed fixture instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixturePlacement {
    pub id: String,
    pub template_id: String,
    pub center: Vec2,
    pub yaw: f64,
    pub provenance: Provenance,
}

impl FixturePlacement {
    pub fn footprint(&self, template: &FixtureTemplate) -> Obb2 {
        Obb2 {
            center: self.center,
            half_extents: template.half_extents,
            yaw: self.yaw,
        }
    }

    /// World direction of the aisle-facing side (local −y).
    pub fn front_normal(&self) -> Vec2 {
        Vec2::new(0.0, -1.0).rotated(self.yaw)
    }

    /// World front-face segments: one for single-front kinds, all four
    /// sides otherwise.
    pub fn front_segments(&self, template: &FixtureTemplate) -> Vec<(Vec2, Vec2)> {
        let corners = self.footprint(template).corners();
        if template.kind.has_single_front() {
            // corners order: (-x,-y), (x,-y), (x,y), (-x,y); front is −y
            vec![(corners[0], corners[1])]
        } else {
            (0..4).map(|i| (corners[i], corners[(i + 1) % 4])).collect()
        }
    }
}

/// Fixture template lookup by id.
pub fn template_by_id<'a>(
    templates: &'a [FixtureTemplate],
    id: &str,
) -> Result<&'a FixtureTemplate> {
    templates
        .iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::UnknownId(id.to_string()))
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutParams {
    /// Minimum free corridor width for navigability.
    pub passage_width: f64,
    /// Probability of dropping an accepted shelf candidate.
    pub skip_prob: f64,
    /// Rejection-sampling attempts per seed fixture.
    pub max_attempts: usize,
    pub n_seed_fixtures: usize,
    /// How far the local field direction may deviate from the pass axis.
    pub angle_tol: f64,
    /// Maximum polygon edge length before field construction.
    pub resample_max_edge: f64,
    /// Exponential decay rate of basis tensor influence.
    pub decay: f64,
    /// Field grid resolution (also the placement scan lattice).
    pub grid_resolution: f64,
    /// Rebuild the field after the horizontal pass so the new shelves
    /// contribute basis tensors to the vertical pass.
    pub rebuild_field_between_passes: bool,
    /// Clearance between the backs of a back-to-back shelf pair.
    pub back_gap: f64,
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            passage_width: 1.2,
            skip_prob: 0.15,
            max_attempts: 100,
            n_seed_fixtures: 3,
            angle_tol: 15f64.to_radians(),
            resample_max_edge: 1.0,
            decay: 0.4,
            grid_resolution: 0.25,
            rebuild_field_between_passes: false,
            back_gap: 0.02,
            seed: 0,
        }
    }
}

/// Scene surface texture assignment (opaque ids into the texture pools).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextureIds {
    pub floor: String,
    pub wall: String,
    pub ceiling: String,
}

impl Default for TextureIds {
    fn default() -> Self {
        TextureIds {
            floor: "floor_00".into(),
            wall: "wall_00".into(),
            ceiling: "ceiling_00".into(),
        }
    }
}

/// Finished fixture layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub store: StoreSpec,
    pub placements: Vec<FixturePlacement>,
    pub field: TensorField,
    pub textures: TextureIds,
}

// ---------------------------------------------------------------------------
// Stage 1: seed fixtures
// ---------------------------------------------------------------------------

/// Rejection-sample `n_seed_fixtures` collision-free fixture poses.
///
/// Each accepted fixture keeps `passage_width` clearance from the walls and
/// from every other seed, and leaves the passage graph connected. Returns
/// fewer than requested only when the attempt budget runs out; zero
/// successes with a nonzero request is an error.
pub fn seed_fixtures(
    store: &StoreSpec,
    templates: &[FixtureTemplate],
    params: &LayoutParams,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<FixturePlacement>> {
    let seedable: Vec<&FixtureTemplate> = templates
        .iter()
        .filter(|t| t.kind.is_seedable())
        .collect();
    if params.n_seed_fixtures == 0 || seedable.is_empty() {
        return Ok(Vec::new());
    }

    let bounds = store.bounds();
    let pw = params.passage_width;
    let mut grid = PassageGrid::new(store, pw);
    let mut placements: Vec<FixturePlacement> = Vec::new();

    for _ in 0..params.n_seed_fixtures {
        for _ in 0..params.max_attempts {
            let template = seedable[rng.random_range(0..seedable.len())];
            let center = Vec2::new(
                rng.random_range(bounds.min.x..bounds.max.x),
                rng.random_range(bounds.min.y..bounds.max.y),
            );
            let yaw = match template.kind {
                FixtureKind::Fridge | FixtureKind::Showcase => {
                    [0.0, std::f64::consts::FRAC_PI_2][rng.random_range(0..2usize)]
                }
                _ => rng.random_range(0.0..std::f64::consts::TAU),
            };
            let candidate = FixturePlacement {
                id: format!("fix_{:03}", placements.len()),
                template_id: template.id.clone(),
                center,
                yaw,
                provenance: Provenance::Seeded,
            };
            let fp = candidate.footprint(template);
            if !obb_inside_polygon(&fp, &store.walls, pw) {
                continue;
            }
            let margin_fp = fp.inflated(pw / 2.0);
            let clash = placements.iter().any(|p| {
                let other = p
                    .footprint(template_by_id(templates, &p.template_id).expect("known id"))
                    .inflated(pw / 2.0);
                obb_overlap(&margin_fp, &other)
            });
            if clash {
                continue;
            }
            let undo = grid.add_footprint(&fp);
            placements.push(candidate);
            if grid.targets_reachable(store, templates, &placements) {
                break;
            }
            placements.pop();
            grid.rollback(undo);
        }
    }

    if placements.is_empty() {
        return Err(Error::SeedingFailed {
            attempts: params.max_attempts * params.n_seed_fixtures,
        });
    }
    Ok(placements)
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

/// Polygons feeding the tensor field: store walls plus seed footprints,
/// resampled to the configured edge length.
fn field_polygons(
    store: &StoreSpec,
    templates: &[FixtureTemplate],
    placements: &[FixturePlacement],
    max_edge: f64,
) -> Result<Vec<Polygon>> {
    let mut polys = vec![crate::geometry::resample_polygon(&store.walls, max_edge)?];
    for p in placements {
        let template = template_by_id(templates, &p.template_id)?;
        let poly = Polygon::new(p.footprint(template).corners().to_vec())?;
        polys.push(crate::geometry::resample_polygon(&poly, max_edge)?);
    }
    Ok(polys)
}

/// Run the full three-stage layout pipeline. Deterministic for a given
/// (store, templates, params) tuple including `params.seed`.
pub fn generate_layout(
    store: &StoreSpec,
    templates: &[FixtureTemplate],
    params: &LayoutParams,
) -> Result<Layout> {
    if templates.is_empty() {
        return Err(Error::InvalidParameter("no fixture templates".into()));
    }
    for t in templates {
        t.validate()?;
    }

    let mut seed_rng = substream(params.seed, "layout/seed");
    let mut placements = seed_fixtures(store, templates, params, &mut seed_rng)?;

    let polys = field_polygons(store, templates, &placements, params.resample_max_edge)?;
    let mut field = build_field(
        &polys,
        params.decay,
        params.grid_resolution,
        store.bounds(),
    )?;

    let mut pass_rng = substream(params.seed, "layout/pass/horizontal");
    place_pass(
        store,
        templates,
        &field,
        &mut placements,
        PassAxis::Horizontal,
        params,
        &mut pass_rng,
    );

    if params.rebuild_field_between_passes {
        let polys = field_polygons(store, templates, &placements, params.resample_max_edge)?;
        field = build_field(
            &polys,
            params.decay,
            params.grid_resolution,
            store.bounds(),
        )?;
    }

    let mut pass_rng = substream(params.seed, "layout/pass/vertical");
    place_pass(
        store,
        templates,
        &field,
        &mut placements,
        PassAxis::Vertical,
        params,
        &mut pass_rng,
    );

    let mut tex_rng = substream(params.seed, "layout/textures");
    let textures = TextureIds {
        floor: format!("floor_{:02}", tex_rng.random_range(0..26u32)),
        wall: format!("wall_{:02}", tex_rng.random_range(0..17u32)),
        ceiling: format!("ceiling_{:02}", tex_rng.random_range(0..15u32)),
    };

    Ok(Layout {
        store: store.clone(),
        placements,
        field,
        textures,
    })
}

#[cfg(test)]
mod tests;
