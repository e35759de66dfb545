//! Scene obstacles and configuration collision checking.
//!
//! Robot geometry is spheres, scene geometry is boxes: fixtures decompose
//! into boards and panels, items are boxed by their footprints, walls get a
//! box per polygon edge. A configuration collides when any robot sphere
//! clears a box by less than the inflation margin, or when the base
//! footprint leaves the store polygon.

use serde::{Deserialize, Serialize};

use crate::arrangement::{item_footprint, Arrangement, ProductSpec};
use crate::geometry::{sphere_obb_clearance, Obb2, Obb3, Polygon, Vec2, Vec3};
use crate::layout::{template_by_id, FixtureKind, FixtureTemplate, Layout};
use crate::Result;

use super::model::{fk, RobotModel};
use super::Config;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObstacles {
    /// Fixtures, walls, boards.
    pub static_boxes: Vec<Obb3>,
    /// Product items.
    pub dynamic_boxes: Vec<Obb3>,
    /// Collision inflation margin (meters).
    pub margin: f64,
    /// Store walls for base containment; `None` disables the check.
    pub bounds: Option<Polygon>,
}

impl SceneObstacles {
    pub fn empty(margin: f64) -> SceneObstacles {
        SceneObstacles {
            static_boxes: Vec::new(),
            dynamic_boxes: Vec::new(),
            margin,
            bounds: None,
        }
    }

    pub fn all_boxes(&self) -> impl Iterator<Item = &Obb3> {
        self.static_boxes.iter().chain(self.dynamic_boxes.iter())
    }

    /// Wall boxes: one slab per wall edge, pushed outward.
    fn wall_boxes(walls: &Polygon, height: f64) -> Vec<Obb3> {
        const THICKNESS: f64 = 0.1;
        walls
            .edges()
            .map(|(a, b)| {
                let mid = (a + b) * 0.5;
                let dir = b - a;
                let len = dir.norm();
                let yaw = dir.y.atan2(dir.x);
                // walls are counter-clockwise, so outward is to the right
                let outward = Vec2::new(dir.y / len, -dir.x / len);
                let center2 = mid + outward * (THICKNESS / 2.0);
                Obb3 {
                    center: Vec3::new(center2.x, center2.y, height / 2.0),
                    half_extents: Vec3::new(len / 2.0, THICKNESS / 2.0, height / 2.0),
                    yaw,
                }
            })
            .collect()
    }

    /// Fixture collision boxes in the world frame: boards, side and back
    /// panels for shelf-like kinds (plus a closed front for fridges and
    /// showcases), a single solid box for pallets and boxes.
    fn fixture_boxes(
        placement: &crate::layout::FixturePlacement,
        template: &FixtureTemplate,
    ) -> Vec<Obb3> {
        const PANEL: f64 = 0.02;
        const BOARD_THICKNESS: f64 = 0.03;
        let he = template.half_extents;
        let place = |local_center: Vec2, half: Vec2, z0: f64, z1: f64| {
            let world = placement.center + local_center.rotated(placement.yaw);
            Obb3 {
                center: Vec3::new(world.x, world.y, (z0 + z1) / 2.0),
                half_extents: Vec3::new(half.x, half.y, (z1 - z0) / 2.0),
                yaw: placement.yaw,
            }
        };
        if template.boards.is_empty() {
            return vec![place(Vec2::ZERO, he, 0.0, template.height)];
        }
        let mut boxes = Vec::new();
        for board in &template.boards {
            boxes.push(place(
                Vec2::ZERO,
                he,
                (board.z - BOARD_THICKNESS).max(0.0),
                board.z,
            ));
        }
        // side panels
        for sx in [-1.0, 1.0] {
            boxes.push(place(
                Vec2::new(sx * (he.x - PANEL / 2.0), 0.0),
                Vec2::new(PANEL / 2.0, he.y),
                0.0,
                template.height,
            ));
        }
        // back panel (front face is at local -y)
        boxes.push(place(
            Vec2::new(0.0, he.y - PANEL / 2.0),
            Vec2::new(he.x, PANEL / 2.0),
            0.0,
            template.height,
        ));
        if matches!(template.kind, FixtureKind::Fridge | FixtureKind::Showcase) {
            // closed glass door
            boxes.push(place(
                Vec2::new(0.0, -(he.y - PANEL / 2.0)),
                Vec2::new(he.x, PANEL / 2.0),
                0.0,
                template.height,
            ));
        }
        boxes
    }

    /// Build the obstacle set of a populated scene. Items listed in
    /// `exclude_items` (e.g. the grasp target) are left out.
    pub fn from_arrangement(
        arrangement: &Arrangement,
        templates: &[FixtureTemplate],
        catalog: &[ProductSpec],
        margin: f64,
        exclude_items: &[&str],
    ) -> Result<SceneObstacles> {
        let layout = &arrangement.layout;
        let mut static_boxes = Self::wall_boxes(&layout.store.walls, 3.0);
        for p in &layout.placements {
            let template = template_by_id(templates, &p.template_id)?;
            static_boxes.extend(Self::fixture_boxes(p, template));
        }
        let mut dynamic_boxes = Vec::new();
        for item in &arrangement.items {
            if exclude_items.contains(&item.id.as_str()) {
                continue;
            }
            let fp: Obb2 = item_footprint(item, catalog)?;
            let product = catalog
                .iter()
                .find(|pr| pr.id == item.product_id)
                .expect("item_footprint resolved the product");
            let z_lo = item.pose.position.z - product.dims.z / 2.0;
            dynamic_boxes.push(Obb3::from_footprint(&fp, z_lo, z_lo + product.dims.z)?);
        }
        Ok(SceneObstacles {
            static_boxes,
            dynamic_boxes,
            margin,
            bounds: Some(layout.store.walls.clone()),
        })
    }

    /// Layout-only obstacle set (no items).
    pub fn from_layout(
        layout: &Layout,
        templates: &[FixtureTemplate],
        margin: f64,
    ) -> Result<SceneObstacles> {
        let arrangement = Arrangement {
            layout: layout.clone(),
            lanes: Vec::new(),
            items: Vec::new(),
        };
        Self::from_arrangement(&arrangement, templates, &[], margin, &[])
    }

    /// Subset of boxes within `radius` of `center` (xy), preserving margin
    /// and bounds. Planners localize once per query.
    pub fn localized(&self, center: Vec2, radius: f64) -> SceneObstacles {
        let keep = |b: &&Obb3| {
            let d = (b.center.xy() - center).norm();
            d <= radius + b.half_extents.xy().norm()
        };
        SceneObstacles {
            static_boxes: self.static_boxes.iter().filter(keep).cloned().collect(),
            dynamic_boxes: self.dynamic_boxes.iter().filter(keep).cloned().collect(),
            margin: self.margin,
            bounds: self.bounds.clone(),
        }
    }
}

/// Precomputed AABBs for fast sphere-box rejection within one query.
pub(crate) struct CollisionIndex<'a> {
    boxes: Vec<&'a Obb3>,
    aabbs: Vec<(Vec3, Vec3)>,
    margin: f64,
    bounds: Option<&'a Polygon>,
}

impl<'a> CollisionIndex<'a> {
    pub fn new(scene: &'a SceneObstacles) -> CollisionIndex<'a> {
        let boxes: Vec<&Obb3> = scene.all_boxes().collect();
        let aabbs = boxes.iter().map(|b| b.aabb()).collect();
        CollisionIndex {
            boxes,
            aabbs,
            margin: scene.margin,
            bounds: scene.bounds.as_ref(),
        }
    }

    pub fn spheres_collide(&self, spheres: &[(Vec3, f64)]) -> bool {
        for &(c, r) in spheres {
            let reach = r + self.margin;
            for (b, (lo, hi)) in self.boxes.iter().zip(&self.aabbs) {
                if c.x + reach < lo.x
                    || c.x - reach > hi.x
                    || c.y + reach < lo.y
                    || c.y - reach > hi.y
                    || c.z + reach < lo.z
                    || c.z - reach > hi.z
                {
                    continue;
                }
                if sphere_obb_clearance(c, r, b) < self.margin {
                    return true;
                }
            }
        }
        false
    }

    pub fn base_escapes(&self, model: &RobotModel, q: &Config) -> bool {
        if let Some(walls) = self.bounds {
            let p = Vec2::new(q.base_x, q.base_y);
            if !walls.contains(p) || walls.boundary_distance(p) < model.base_radius {
                return true;
            }
        }
        false
    }

    pub fn config_collides(&self, model: &RobotModel, q: &Config) -> Result<bool> {
        if self.base_escapes(model, q) {
            return Ok(true);
        }
        let state = fk(model, q)?;
        Ok(self.spheres_collide(&state.world_spheres(model)))
    }
}

/// True when any robot collision sphere clears a scene box by less than
/// the margin, or the base footprint leaves the store polygon.
pub fn config_in_collision(model: &RobotModel, q: &Config, scene: &SceneObstacles) -> Result<bool> {
    CollisionIndex::new(scene).config_collides(model, q)
}
