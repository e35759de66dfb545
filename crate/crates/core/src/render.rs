//! Top-down SVG drawings of scenes: wall polygon, fixtures colored by
//! kind, optional tensor-field glyph layer, optional item dots.
//!
//! Output is deterministic for identical input (fixed iteration order,
//! fixed float formatting).

use std::fmt::Write as _;

use crate::layout::{template_by_id, FixtureKind, FixtureTemplate};
use crate::scene::SceneFile;
use crate::tensor_field::{major_direction, TensorField};
use crate::Result;

#[derive(Debug, Clone, Copy, Default)]
pub struct RenderOptions {
    /// Draw a line glyph per lattice point along the major direction.
    pub glyphs: bool,
    /// Draw item footprint dots.
    pub items: bool,
}

fn fixture_fill(kind: FixtureKind) -> &'static str {
    match kind {
        FixtureKind::Shelf => "#8ba7d6",
        FixtureKind::Fridge => "#86cfcf",
        FixtureKind::Showcase => "#d6c08b",
        FixtureKind::Pallet => "#c09a6f",
        FixtureKind::Box => "#a9a9a9",
    }
}

fn f(x: f64) -> String {
    format!("{x:.4}")
}

/// Render a scene to an SVG 1.1 document. The `field` layer is optional
/// because scene files do not persist the tensor grid.
pub fn render_svg(
    scene: &SceneFile,
    templates: &[FixtureTemplate],
    field: Option<&TensorField>,
    options: &RenderOptions,
) -> Result<String> {
    let bounds = scene.store.bounds();
    let margin = 0.5;
    let min_x = bounds.min.x - margin;
    let min_y = bounds.min.y - margin;
    let width = bounds.width() + 2.0 * margin;
    let height = bounds.height() + 2.0 * margin;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">",
        f(min_x),
        f(min_y),
        f(width),
        f(height),
        (width * 60.0).round() as i64,
        (height * 60.0).round() as i64,
    );
    // world frame is y-up; flip into SVG's y-down space
    let _ = writeln!(
        svg,
        "<g transform=\"translate(0,{}) scale(1,-1)\">",
        f(min_y + height + min_y)
    );

    // walls
    let mut path = String::new();
    for (i, v) in scene.store.walls.vertices().iter().enumerate() {
        let _ = write!(
            path,
            "{}{} {}",
            if i == 0 { "M" } else { " L" },
            f(v.x),
            f(v.y)
        );
    }
    let _ = writeln!(
        svg,
        "<path class=\"walls\" d=\"{path} Z\" fill=\"#f7f5f0\" stroke=\"#222\" stroke-width=\"0.06\"/>"
    );
    for door in &scene.store.doors {
        let _ = writeln!(
            svg,
            "<line class=\"door\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#d04040\" stroke-width=\"0.1\"/>",
            f(door.a.x),
            f(door.a.y),
            f(door.b.x),
            f(door.b.y)
        );
    }

    // tensor glyph layer under the fixtures
    if options.glyphs {
        if let Some(field) = field {
            let (nx, ny) = field.lattice_dims();
            let half = field.resolution * 0.4;
            for j in 0..ny {
                for i in 0..nx {
                    let t = field.lattice_tensor(i, j);
                    let Some(psi) = major_direction(&t) else {
                        continue;
                    };
                    let p = field.lattice_point(i, j);
                    let (s, c) = psi.sin_cos();
                    let _ = writeln!(
                        svg,
                        "<line class=\"glyph\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#b5b5c8\" stroke-width=\"0.02\"/>",
                        f(p.x - c * half),
                        f(p.y - s * half),
                        f(p.x + c * half),
                        f(p.y + s * half)
                    );
                }
            }
        }
    }

    // fixtures as oriented rectangles with a front tick
    for placement in &scene.placements {
        let template = template_by_id(templates, &placement.template_id)?;
        let he = template.half_extents;
        let deg = placement.yaw.to_degrees();
        let _ = writeln!(
            svg,
            "<g class=\"fixture\" transform=\"translate({} {}) rotate({})\">",
            f(placement.center.x),
            f(placement.center.y),
            f(deg)
        );
        let _ = writeln!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#333\" stroke-width=\"0.03\"/>",
            f(-he.x),
            f(-he.y),
            f(2.0 * he.x),
            f(2.0 * he.y),
            fixture_fill(template.kind)
        );
        if template.kind.has_single_front() {
            let _ = writeln!(
                svg,
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#fff\" stroke-width=\"0.04\"/>",
                f(-he.x * 0.8),
                f(-he.y),
                f(he.x * 0.8),
                f(-he.y)
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    if options.items {
        for item in &scene.items {
            let _ = writeln!(
                svg,
                "<circle class=\"item\" cx=\"{}\" cy=\"{}\" r=\"0.015\" fill=\"#7a4a2a\"/>",
                f(item.pose.position.x),
                f(item.pose.position.y)
            );
        }
    }

    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}
