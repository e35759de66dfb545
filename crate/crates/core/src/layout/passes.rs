//! Tensor-guided shelf placement passes.
//!
//! The horizontal pass scans the field lattice row by row (bottom to top,
//! left to right) and plants shelves where the major field direction is
//! close to horizontal; the vertical pass scans column by column for
//! near-vertical directions. Back-to-back pairs are preferred when both
//! units fit; a single unit fronting the store center is the fallback.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{
    line_angle_distance, obb_inside_polygon, obb_overlap, Obb2, Vec2,
};
use crate::tensor_field::{major_direction, TensorField};

use super::{
    template_by_id, FixtureKind, FixturePlacement, FixtureTemplate, LayoutParams, PassageGrid,
    Provenance, StoreSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassAxis {
    Horizontal,
    Vertical,
}

impl PassAxis {
    fn angle(self) -> f64 {
        match self {
            PassAxis::Horizontal => 0.0,
            PassAxis::Vertical => std::f64::consts::FRAC_PI_2,
        }
    }

    fn provenance(self) -> Provenance {
        match self {
            PassAxis::Horizontal => Provenance::HorizontalPass,
            PassAxis::Vertical => Provenance::VerticalPass,
        }
    }
}

/// Counts of geometrically accepted candidates and those retained after
/// probabilistic skipping.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PassStats {
    pub accepted: usize,
    pub retained: usize,
}

/// Aisle-clearance zone in front of a shelf face.
fn front_zone(center: Vec2, yaw: f64, half_extents: Vec2, passage_width: f64) -> Obb2 {
    let normal = Vec2::new(0.0, -1.0).rotated(yaw);
    Obb2 {
        center: center + normal * (half_extents.y + passage_width / 2.0),
        half_extents: Vec2::new(half_extents.x, passage_width / 2.0),
        yaw,
    }
}

struct PassState<'a> {
    store: &'a StoreSpec,
    footprints: Vec<Obb2>,
    /// Clearance zones of already placed single-front fixtures.
    zones: Vec<Obb2>,
    grid: PassageGrid,
}

impl<'a> PassState<'a> {
    fn candidate_fits(&self, fp: &Obb2, zone: &Obb2) -> bool {
        if !obb_inside_polygon(fp, &self.store.walls, 0.0) {
            return false;
        }
        if !obb_inside_polygon(zone, &self.store.walls, 0.0) {
            return false;
        }
        for other in &self.footprints {
            if obb_overlap(fp, other) || obb_overlap(zone, other) {
                return false;
            }
        }
        // existing fronts must stay clear of the new unit
        self.zones.iter().all(|z| !obb_overlap(z, fp))
    }
}

/// One placement pass. Returns candidate statistics; a pass that places
/// nothing is legitimate.
pub fn place_pass(
    store: &StoreSpec,
    templates: &[FixtureTemplate],
    field: &TensorField,
    placements: &mut Vec<FixturePlacement>,
    axis: PassAxis,
    params: &LayoutParams,
    rng: &mut ChaCha8Rng,
) -> PassStats {
    let shelf_templates: Vec<&FixtureTemplate> = templates
        .iter()
        .filter(|t| t.kind == FixtureKind::Shelf)
        .collect();
    let mut stats = PassStats::default();
    if shelf_templates.is_empty() {
        return stats;
    }

    let mut state = PassState {
        store,
        footprints: Vec::new(),
        zones: Vec::new(),
        grid: PassageGrid::new(store, params.passage_width),
    };
    for p in placements.iter() {
        let template = template_by_id(templates, &p.template_id).expect("template resolves");
        let fp = p.footprint(template);
        state.grid.add_footprint(&fp);
        state.footprints.push(fp);
        if template.kind.has_single_front() {
            state.zones.push(front_zone(
                p.center,
                p.yaw,
                template.half_extents,
                params.passage_width,
            ));
        }
    }

    let store_center = store.bounds().center();
    let (nx, ny) = field.lattice_dims();
    let scan: Box<dyn Iterator<Item = (usize, usize)>> = match axis {
        PassAxis::Horizontal => Box::new((0..ny).flat_map(move |j| (0..nx).map(move |i| (i, j)))),
        PassAxis::Vertical => Box::new((0..nx).flat_map(move |i| (0..ny).map(move |j| (i, j)))),
    };

    for (i, j) in scan {
        let p = field.lattice_point(i, j);
        if !store.walls.contains(p) {
            continue;
        }
        let tensor = match field.eval(p) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let psi = match major_direction(&tensor) {
            Some(psi) => psi,
            None => continue,
        };
        if line_angle_distance(psi, axis.angle()) > params.angle_tol {
            continue;
        }

        let template = shelf_templates[rng.random_range(0..shelf_templates.len())];
        let he = template.half_extents;
        let normal = Vec2::new(-psi.sin(), psi.cos());
        let pw = params.passage_width;

        // preferred: back-to-back pair straddling the lattice point
        let offset = he.y + params.back_gap / 2.0;
        let pair = [
            (p + normal * -offset, psi, normal * -1.0),
            (p + normal * offset, psi + std::f64::consts::PI, normal),
        ];
        let pair_obbs: Vec<(Obb2, Obb2)> = pair
            .iter()
            .map(|(c, yaw, _)| {
                (
                    Obb2 {
                        center: *c,
                        half_extents: he,
                        yaw: *yaw,
                    },
                    front_zone(*c, *yaw, he, pw),
                )
            })
            .collect();

        let pair_fits = pair_obbs
            .iter()
            .all(|(fp, zone)| state.candidate_fits(fp, zone))
            && !obb_overlap(&pair_obbs[0].0, &pair_obbs[1].0);

        let mut chosen: Vec<(Vec2, f64, Obb2, Obb2)> = Vec::new();
        if pair_fits {
            for ((c, yaw, _), (fp, zone)) in pair.iter().zip(&pair_obbs) {
                chosen.push((*c, *yaw, *fp, *zone));
            }
        } else {
            // single unit: front toward the store center
            let to_center = store_center - p;
            let yaw = if Vec2::new(0.0, -1.0).rotated(psi).dot(to_center) >= 0.0 {
                psi
            } else {
                psi + std::f64::consts::PI
            };
            let fp = Obb2 {
                center: p,
                half_extents: he,
                yaw,
            };
            let zone = front_zone(p, yaw, he, pw);
            if state.candidate_fits(&fp, &zone) {
                chosen.push((p, yaw, fp, zone));
            }
        }
        if chosen.is_empty() {
            continue;
        }

        // tentative connectivity check over the whole candidate
        let mut undos = Vec::new();
        let base_id = placements.len();
        for (k, (c, yaw, fp, _)) in chosen.iter().enumerate() {
            undos.push(state.grid.add_footprint(fp));
            placements.push(FixturePlacement {
                id: format!("fix_{:03}", base_id + k),
                template_id: template.id.clone(),
                center: *c,
                yaw: *yaw,
                provenance: axis.provenance(),
            });
        }
        let connected = state.grid.targets_reachable(store, templates, placements);
        if !connected {
            for _ in 0..chosen.len() {
                placements.pop();
            }
            for undo in undos.into_iter().rev() {
                state.grid.rollback(undo);
            }
            continue;
        }

        stats.accepted += 1;
        if rng.random::<f64>() < params.skip_prob {
            for _ in 0..chosen.len() {
                placements.pop();
            }
            for undo in undos.into_iter().rev() {
                state.grid.rollback(undo);
            }
            continue;
        }

        stats.retained += 1;
        for (_, _, fp, zone) in chosen {
            state.footprints.push(fp);
            state.zones.push(zone);
        }
    }
    stats
}
