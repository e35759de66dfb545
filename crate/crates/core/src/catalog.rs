//! Built-in fixture templates and product catalog.
//!
//! The asset pack proper (meshes, textures) is external data; these tables
//! provide dimensionally plausible stand-ins so every pipeline stage runs
//! out of the box. All entries can be overridden through the config file.

use serde::{Deserialize, Serialize};

use crate::arrangement::ProductSpec;
use crate::geometry::{Rect, Vec2, Vec3};
use crate::layout::{Board, FixtureKind, FixtureTemplate};

/// Mesh family a product's synthetic geometry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFamily {
    BoxLike,
    Cylindrical,
    LShaped,
}

fn boards(count: usize, first_z: f64, pitch: f64, half: Vec2, top_gap: f64) -> Vec<Board> {
    // usable rect: side frames 0.05, back panel 0.04, front lip 0.02
    let rect = Rect::new(
        Vec2::new(-half.x + 0.05, -half.y + 0.02),
        Vec2::new(half.x - 0.05, half.y - 0.04),
    );
    (0..count)
        .map(|i| Board {
            index: i,
            z: first_z + i as f64 * pitch,
            rect,
            gap: if i + 1 == count { top_gap } else { pitch - 0.03 },
        })
        .collect()
}

/// The built-in fixture templates: three shelving units, two fridges, one
/// showcase, plus pallet and box seed obstacles.
pub fn default_templates() -> Vec<FixtureTemplate> {
    let shelf = |id: &str, hx: f64, hy: f64, height: f64, n: usize, first_z: f64, pitch: f64| {
        FixtureTemplate {
            id: id.into(),
            kind: FixtureKind::Shelf,
            half_extents: Vec2::new(hx, hy),
            height,
            boards: boards(n, first_z, pitch, Vec2::new(hx, hy), 0.45),
        }
    };
    vec![
        shelf("shelf_a", 1.0, 0.3, 1.8, 4, 0.15, 0.40),
        shelf("shelf_b", 0.9, 0.25, 2.0, 5, 0.12, 0.42),
        shelf("shelf_c", 1.2, 0.33, 1.6, 3, 0.18, 0.50),
        FixtureTemplate {
            id: "fridge_a".into(),
            kind: FixtureKind::Fridge,
            half_extents: Vec2::new(0.6, 0.4),
            height: 2.0,
            boards: boards(3, 0.30, 0.45, Vec2::new(0.6, 0.4), 0.40),
        },
        FixtureTemplate {
            id: "fridge_b".into(),
            kind: FixtureKind::Fridge,
            half_extents: Vec2::new(0.45, 0.38),
            height: 1.9,
            boards: boards(4, 0.25, 0.40, Vec2::new(0.45, 0.38), 0.35),
        },
        FixtureTemplate {
            id: "showcase_a".into(),
            kind: FixtureKind::Showcase,
            half_extents: Vec2::new(0.75, 0.4),
            height: 2.0,
            boards: boards(4, 0.25, 0.42, Vec2::new(0.75, 0.4), 0.35),
        },
        FixtureTemplate {
            id: "pallet_a".into(),
            kind: FixtureKind::Pallet,
            half_extents: Vec2::new(0.6, 0.4),
            height: 0.8,
            boards: vec![],
        },
        FixtureTemplate {
            id: "box_a".into(),
            kind: FixtureKind::Box,
            half_extents: Vec2::new(0.3, 0.25),
            height: 0.5,
            boards: vec![],
        },
    ]
}

/// Product entry: id, category, (width, depth, height) meters, stackable,
/// max stack, mesh family.
const PRODUCTS: &[(&str, &str, f64, f64, f64, bool, u32, MeshFamily)] = &[
    ("cereal_box", "breakfast", 0.08, 0.19, 0.28, false, 1, MeshFamily::BoxLike),
    ("honey_stars", "breakfast", 0.07, 0.18, 0.26, false, 1, MeshFamily::BoxLike),
    ("oat_pack", "breakfast", 0.10, 0.06, 0.20, true, 3, MeshFamily::BoxLike),
    ("soda_bottle", "beverages", 0.09, 0.09, 0.31, false, 1, MeshFamily::Cylindrical),
    ("cola_can", "beverages", 0.066, 0.066, 0.12, true, 3, MeshFamily::Cylindrical),
    ("water_bottle", "beverages", 0.075, 0.075, 0.27, false, 1, MeshFamily::Cylindrical),
    ("beer_can", "beverages", 0.066, 0.066, 0.15, true, 2, MeshFamily::Cylindrical),
    ("bean_tin", "canned", 0.075, 0.075, 0.11, true, 4, MeshFamily::Cylindrical),
    ("luncheon_meat", "canned", 0.10, 0.06, 0.09, true, 4, MeshFamily::BoxLike),
    ("tomato_tin", "canned", 0.08, 0.08, 0.11, true, 3, MeshFamily::Cylindrical),
    ("body_milk", "care", 0.07, 0.045, 0.21, false, 1, MeshFamily::Cylindrical),
    ("shampoo", "care", 0.065, 0.045, 0.23, false, 1, MeshFamily::Cylindrical),
    ("soap_bar", "care", 0.09, 0.06, 0.03, true, 6, MeshFamily::BoxLike),
    ("detergent", "household", 0.14, 0.09, 0.26, false, 1, MeshFamily::LShaped),
    ("stain_remover", "household", 0.09, 0.06, 0.24, false, 1, MeshFamily::Cylindrical),
    ("sponge_pack", "household", 0.12, 0.07, 0.10, true, 3, MeshFamily::BoxLike),
    ("milk_carton", "dairy", 0.07, 0.07, 0.24, false, 1, MeshFamily::BoxLike),
    ("yogurt_cup", "dairy", 0.075, 0.075, 0.09, true, 2, MeshFamily::Cylindrical),
    ("butter_pack", "dairy", 0.11, 0.06, 0.045, true, 4, MeshFamily::BoxLike),
    ("pasta_box", "pantry", 0.07, 0.04, 0.26, false, 1, MeshFamily::BoxLike),
    ("rice_bag", "pantry", 0.12, 0.07, 0.19, true, 2, MeshFamily::BoxLike),
    ("oil_bottle", "pantry", 0.08, 0.08, 0.28, false, 1, MeshFamily::LShaped),
    ("snack_bag", "snacks", 0.14, 0.06, 0.22, false, 1, MeshFamily::BoxLike),
    ("biscuit_roll", "snacks", 0.06, 0.06, 0.18, true, 2, MeshFamily::Cylindrical),
];

/// The built-in product catalog.
pub fn default_products() -> Vec<ProductSpec> {
    PRODUCTS
        .iter()
        .map(
            |&(id, category, x, y, z, stackable, max_stack, family)| ProductSpec {
                id: id.into(),
                category: category.into(),
                dims: Vec3::new(x, y, z),
                stackable,
                max_stack,
                mesh: format!("{id}.obj"),
                mesh_family: family,
            },
        )
        .collect()
}
