//! Shelf-board product arrangement and depletion.
//!
//! Products go onto boards in lanes: front-to-back columns of one product at
//! a regular pitch, with small Gaussian pose jitter and vertical stacking.
//! Depletion draws a Poisson count per lane and removes items strictly from
//! the lane front (top of stack first within a slot), leaving the empty
//! space at the shelf front that accumulates over simulated days.

use serde::{Deserialize, Serialize};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::catalog::MeshFamily;
use crate::geometry::{Obb2, Obb3, Pose3, Quat, Rect, Vec2, Vec3};
use crate::layout::{template_by_id, FixturePlacement, FixtureTemplate, Layout};
use crate::rng::substream;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub id: String,
    pub category: String,
    /// Width (x), depth (y), height (z) of the item's bounding box.
    pub dims: Vec3,
    pub stackable: bool,
    pub max_stack: u32,
    /// Mesh file reference in the asset manifest.
    pub mesh: String,
    pub mesh_family: MeshFamily,
}

/// A board surface a given product can stand on, margins already applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoardSurface {
    pub placement_id: String,
    pub board_index: usize,
    /// Usable rectangle in the fixture frame (front at min-y).
    pub rect: Rect,
    /// Board surface height above the floor.
    pub z: f64,
    /// Vertical clearance: board gap minus the margin.
    pub clearance: f64,
}

/// Front-to-back column of one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lane {
    pub placement_id: String,
    pub board_index: usize,
    pub product_id: String,
    /// Lane center x in the fixture frame.
    pub anchor_x: f64,
    /// Slot center y positions, front (min-y) to back.
    pub slots: Vec<f64>,
    /// Stack count per slot.
    pub occupancy: Vec<u32>,
    /// Initial stack height.
    pub levels: u32,
    /// Board surface height (denormalized for pose reconstruction).
    pub z: f64,
}

impl Lane {
    pub fn stock(&self) -> u32 {
        self.occupancy.iter().sum()
    }

    /// Occupied slots must form a contiguous suffix: depletion eats from
    /// the front, so a stocked slot can never sit in front of an empty one
    /// behind it... i.e. once a slot is occupied, all deeper slots are too.
    pub fn suffix_invariant_holds(&self) -> bool {
        let mut seen_occupied = false;
        for &occ in &self.occupancy {
            if occ > 0 {
                seen_occupied = true;
            } else if seen_occupied {
                return false;
            }
        }
        true
    }
}

/// One posed product instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemInstance {
    pub id: String,
    pub product_id: String,
    pub pose: Pose3,
    pub lane: usize,
    pub slot: usize,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arrangement {
    pub layout: Layout,
    pub lanes: Vec<Lane>,
    pub items: Vec<ItemInstance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArrangeParams {
    /// Inter-item spacing within and between lanes.
    pub gap: f64,
    /// Std dev of positional jitter (meters).
    pub jitter_pos: f64,
    /// Std dev of yaw jitter (radians).
    pub jitter_yaw: f64,
    /// Poisson depletion rate, items per lane per day.
    pub depletion_rate: f64,
    /// Shrink applied to board rects and headroom.
    pub surface_margin: f64,
    pub seed: u64,
}

impl Default for ArrangeParams {
    fn default() -> Self {
        ArrangeParams {
            gap: 0.03,
            jitter_pos: 0.005,
            jitter_yaw: 3f64.to_radians(),
            depletion_rate: 0.35,
            surface_margin: 0.02,
            seed: 0,
        }
    }
}

// ---------------------------------------------------------------------------
// Surfaces
// ---------------------------------------------------------------------------

/// Boards of `template` that can hold `product`: vertical gap at least the
/// product height plus `margin`, usable rect shrunk by `margin`.
pub fn placement_surfaces(
    placement_id: &str,
    template: &FixtureTemplate,
    product: &ProductSpec,
    margin: f64,
) -> Vec<BoardSurface> {
    template
        .boards
        .iter()
        .filter(|b| b.gap >= product.dims.z + margin)
        .map(|b| BoardSurface {
            placement_id: placement_id.to_string(),
            board_index: b.index,
            rect: b.rect.shrunk(margin),
            z: b.z,
            clearance: b.gap - margin,
        })
        .filter(|s| !s.rect.is_empty())
        .collect()
}

/// World-frame volume over a board usable for placement checks.
pub fn board_world_volume(
    placement: &FixturePlacement,
    template: &FixtureTemplate,
    board_index: usize,
) -> Result<Obb3> {
    let board = template
        .boards
        .iter()
        .find(|b| b.index == board_index)
        .ok_or_else(|| Error::UnknownId(format!("{}#board{}", template.id, board_index)))?;
    let local_center = board.rect.center();
    let world_center = placement.center + local_center.rotated(placement.yaw);
    Obb3::new(
        Vec3::new(
            world_center.x,
            world_center.y,
            board.z + board.gap / 2.0,
        ),
        Vec3::new(
            board.rect.width() / 2.0,
            board.rect.height() / 2.0,
            board.gap / 2.0,
        ),
        placement.yaw,
    )
}

// ---------------------------------------------------------------------------
// Surface arrangement
// ---------------------------------------------------------------------------

fn fixture_to_world(placement: &FixturePlacement, local: Vec2) -> Vec2 {
    placement.center + local.rotated(placement.yaw)
}

/// Jitter constraint: the rotated footprint must stay inside its grid cell
/// shrunk to guarantee gap/2 separation from the neighbors, and inside the
/// usable rect.
fn jitter_ok(
    product: &ProductSpec,
    rect: &Rect,
    cell_center: Vec2,
    gap: f64,
    jx: f64,
    jy: f64,
    jyaw: f64,
) -> bool {
    let (s, c) = (jyaw.sin().abs(), jyaw.cos().abs());
    let half_x = product.dims.x / 2.0 * c + product.dims.y / 2.0 * s;
    let half_y = product.dims.x / 2.0 * s + product.dims.y / 2.0 * c;
    let cell_hx = product.dims.x / 2.0 + gap / 4.0;
    let cell_hy = product.dims.y / 2.0 + gap / 4.0;
    let x = cell_center.x + jx;
    let y = cell_center.y + jy;
    (x - cell_center.x).abs() + half_x <= cell_hx
        && (y - cell_center.y).abs() + half_y <= cell_hy
        && x - half_x >= rect.min.x
        && x + half_x <= rect.max.x
        && y - half_y >= rect.min.y
        && y + half_y <= rect.max.y
}

/// Fill one surface with lanes of `product`. Lanes run at pitch
/// `(width + gap)`, slots at pitch `(depth + gap)` from the front, stacks up
/// to `min(max_stack, floor(clearance / height))`. Poses get clipped
/// Gaussian jitter; slot occupancy starts full.
pub fn arrange_surface(
    surface: &BoardSurface,
    placement: &FixturePlacement,
    product: &ProductSpec,
    lane_index_base: usize,
    item_index_base: usize,
    params: &ArrangeParams,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Lane>, Vec<ItemInstance>)> {
    let g = params.gap;
    let (px, py, pz) = (product.dims.x, product.dims.y, product.dims.z);
    // epsilon guards the exact-multiple case against accumulated rounding
    let n_lanes = ((surface.rect.width() + 1e-9) / (px + g)).floor() as usize;
    let n_slots = ((surface.rect.height() + 1e-9) / (py + g)).floor() as usize;
    if n_lanes == 0 || n_slots == 0 || surface.clearance < pz {
        return Err(Error::DoesNotFit {
            product: product.id.clone(),
            reason: format!(
                "rect {:.2}x{:.2}, clearance {:.2}",
                surface.rect.width(),
                surface.rect.height(),
                surface.clearance
            ),
        });
    }
    let levels = product
        .max_stack
        .min((surface.clearance / pz).floor() as u32)
        .max(1);

    let pad_x = ((surface.rect.width() - (n_lanes as f64 * px + (n_lanes - 1) as f64 * g)) / 2.0)
        .max(0.0);
    let lane_x =
        |k: usize| surface.rect.min.x + pad_x + px / 2.0 + k as f64 * (px + g);
    let slot_y = |s: usize| surface.rect.min.y + py / 2.0 + s as f64 * (py + g);

    let pos_dist = Normal::new(0.0, params.jitter_pos.max(0.0)).expect("finite sigma");
    let yaw_dist = Normal::new(0.0, params.jitter_yaw.max(0.0)).expect("finite sigma");

    let mut lanes = Vec::with_capacity(n_lanes);
    let mut items = Vec::new();
    for k in 0..n_lanes {
        let slots: Vec<f64> = (0..n_slots).map(slot_y).collect();
        for (s, &sy) in slots.iter().enumerate() {
            for level in 0..levels {
                let cell = Vec2::new(lane_x(k), sy);
                let mut jitter = (0.0, 0.0, 0.0);
                if params.jitter_pos > 0.0 || params.jitter_yaw > 0.0 {
                    for _ in 0..20 {
                        let jx = pos_dist.sample(rng);
                        let jy = pos_dist.sample(rng);
                        let jyaw = yaw_dist.sample(rng);
                        if jitter_ok(product, &surface.rect, cell, g, jx, jy, jyaw) {
                            jitter = (jx, jy, jyaw);
                            break;
                        }
                    }
                }
                let local = Vec2::new(cell.x + jitter.0, cell.y + jitter.1);
                let world_xy = fixture_to_world(placement, local);
                let pose = Pose3 {
                    position: Vec3::new(
                        world_xy.x,
                        world_xy.y,
                        surface.z + pz / 2.0 + level as f64 * pz,
                    ),
                    rotation: Quat::from_rotation_z(placement.yaw + jitter.2),
                };
                items.push(ItemInstance {
                    id: format!("item_{:06}", item_index_base + items.len()),
                    product_id: product.id.clone(),
                    pose,
                    lane: lane_index_base + k,
                    slot: s,
                    level,
                });
            }
        }
        lanes.push(Lane {
            placement_id: surface.placement_id.clone(),
            board_index: surface.board_index,
            product_id: product.id.clone(),
            anchor_x: lane_x(k),
            slots,
            occupancy: vec![levels; n_slots],
            levels,
            z: surface.z,
        });
    }
    Ok((lanes, items))
}

// ---------------------------------------------------------------------------
// Store arrangement
// ---------------------------------------------------------------------------

/// Populate every board of every fixture.
///
/// One category per fixture (round-robin over a seed-shuffled category
/// list); boards are segmented into facing groups of one to three lanes
/// sharing a product. Deterministic under `params.seed`.
pub fn arrange_store(
    layout: &Layout,
    templates: &[FixtureTemplate],
    catalog: &[ProductSpec],
    params: &ArrangeParams,
) -> Result<Arrangement> {
    if catalog.is_empty() {
        return Err(Error::InvalidParameter("empty product catalog".into()));
    }
    let mut categories: Vec<&str> = {
        let mut cats: Vec<&str> = catalog.iter().map(|p| p.category.as_str()).collect();
        cats.sort_unstable();
        cats.dedup();
        cats
    };
    // seed-shuffled round-robin assignment
    let mut cat_rng = substream(params.seed, "arrange/categories");
    for i in (1..categories.len()).rev() {
        let j = cat_rng.random_range(0..=i);
        categories.swap(i, j);
    }

    let mut lanes = Vec::new();
    let mut items = Vec::new();
    let mut shelf_counter = 0usize;

    for placement in &layout.placements {
        let template = template_by_id(templates, &placement.template_id)?;
        if template.boards.is_empty() {
            continue;
        }
        let category = categories[shelf_counter % categories.len()];
        shelf_counter += 1;
        let mut rng = substream(
            params.seed,
            &format!("arrange/fixture/{}", placement.id),
        );

        for board in &template.boards {
            let rect = board.rect.shrunk(params.surface_margin);
            if rect.is_empty() {
                continue;
            }
            let clearance = board.gap - params.surface_margin;
            let fitting: Vec<&ProductSpec> = catalog
                .iter()
                .filter(|p| {
                    p.category == category
                        && clearance >= p.dims.z
                        && rect.height() >= p.dims.y + params.gap
                        && rect.width() >= p.dims.x + params.gap
                })
                .collect();
            if fitting.is_empty() {
                continue;
            }

            let mut cursor = rect.min.x;
            loop {
                let remaining = rect.max.x - cursor;
                let product = fitting[rng.random_range(0..fitting.len())];
                let pitch = product.dims.x + params.gap;
                let max_lanes = (remaining / pitch).floor() as usize;
                if max_lanes == 0 {
                    break;
                }
                let facings = (rng.random_range(1..=3usize)).min(max_lanes);
                let group_width = facings as f64 * pitch;
                let surface = BoardSurface {
                    placement_id: placement.id.clone(),
                    board_index: board.index,
                    rect: Rect::new(
                        Vec2::new(cursor, rect.min.y),
                        Vec2::new(cursor + group_width, rect.max.y),
                    ),
                    z: board.z,
                    clearance,
                };
                let (mut group_lanes, mut group_items) = arrange_surface(
                    &surface,
                    placement,
                    product,
                    lanes.len(),
                    items.len(),
                    params,
                    &mut rng,
                )?;
                lanes.append(&mut group_lanes);
                items.append(&mut group_items);
                cursor += group_width;
            }
        }
    }

    Ok(Arrangement {
        layout: layout.clone(),
        lanes,
        items,
    })
}

/// Item footprint as a planar box (for overlap checks and obstacles).
pub fn item_footprint(item: &ItemInstance, catalog: &[ProductSpec]) -> Result<Obb2> {
    let product = catalog
        .iter()
        .find(|p| p.id == item.product_id)
        .ok_or_else(|| Error::UnknownId(item.product_id.clone()))?;
    let yaw = crate::geometry::so3_log(item.pose.rotation).z;
    Obb2::new(
        item.pose.position.xy(),
        Vec2::new(product.dims.x / 2.0, product.dims.y / 2.0),
        yaw,
    )
}

// ---------------------------------------------------------------------------
// Depletion
// ---------------------------------------------------------------------------

/// Remove `Poisson(rate * days)` items per lane, strictly front-first and
/// top-of-stack-first within a slot. Surviving item poses are untouched.
pub fn deplete(
    arrangement: &Arrangement,
    days: f64,
    rate: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Arrangement> {
    if days < 0.0 || rate < 0.0 {
        return Err(Error::InvalidParameter(
            "depletion days and rate must be non-negative".into(),
        ));
    }
    let mean = rate * days;
    let mut out = arrangement.clone();
    if mean <= 0.0 {
        return Ok(out);
    }
    let poisson = Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let mut removed: std::collections::HashSet<(usize, usize, u32)> =
        std::collections::HashSet::new();
    for (lane_idx, lane) in out.lanes.iter_mut().enumerate() {
        let draw: f64 = poisson.sample(rng);
        let mut to_remove = (draw as u64).min(lane.stock() as u64);
        for slot in 0..lane.occupancy.len() {
            while to_remove > 0 && lane.occupancy[slot] > 0 {
                lane.occupancy[slot] -= 1;
                removed.insert((lane_idx, slot, lane.occupancy[slot]));
                to_remove -= 1;
            }
            if to_remove == 0 {
                break;
            }
        }
    }
    out.items
        .retain(|item| !removed.contains(&(item.lane, item.slot, item.level)));
    Ok(out)
}
