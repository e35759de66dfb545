use super::*;
use crate::catalog::default_templates;
use crate::tensor_field::{basis_from_edge, TensorField};

fn shelf_only() -> Vec<FixtureTemplate> {
    default_templates()
        .into_iter()
        .filter(|t| t.id == "shelf_a")
        .collect()
}

fn params(seed: u64) -> LayoutParams {
    LayoutParams {
        seed,
        ..LayoutParams::default()
    }
}

// -- seed_fixtures --

#[test]
fn zero_seeds_requested() {
    let store = StoreSpec::rectangular(10.0, 8.0).unwrap();
    let templates = default_templates();
    let mut rng = substream(1, "t");
    let p = LayoutParams {
        n_seed_fixtures: 0,
        ..params(1)
    };
    assert!(seed_fixtures(&store, &templates, &p, &mut rng)
        .unwrap()
        .is_empty());
}

#[test]
fn single_seed_lands_inside_walls() {
    let store = StoreSpec::rectangular(12.0, 10.0).unwrap();
    let templates = default_templates();
    let mut rng = substream(2, "t");
    let p = LayoutParams {
        n_seed_fixtures: 1,
        ..params(2)
    };
    let placed = seed_fixtures(&store, &templates, &p, &mut rng).unwrap();
    assert_eq!(placed.len(), 1);
    let t = template_by_id(&templates, &placed[0].template_id).unwrap();
    assert!(obb_inside_polygon(
        &placed[0].footprint(t),
        &store.walls,
        0.0
    ));
}

#[test]
fn seeds_keep_passage_margin_pairwise() {
    // exhaustive pairwise check oracle over many seeds
    let store = StoreSpec::rectangular(18.0, 14.0).unwrap();
    let templates = default_templates();
    for seed in 0..100u64 {
        let p = LayoutParams {
            n_seed_fixtures: 5,
            ..params(seed)
        };
        let mut rng = substream(seed, "layout/seed");
        let placed = seed_fixtures(&store, &templates, &p, &mut rng).unwrap();
        for i in 0..placed.len() {
            for j in (i + 1)..placed.len() {
                let ti = template_by_id(&templates, &placed[i].template_id).unwrap();
                let tj = template_by_id(&templates, &placed[j].template_id).unwrap();
                let a = placed[i].footprint(ti).inflated(p.passage_width / 2.0);
                let b = placed[j].footprint(tj).inflated(p.passage_width / 2.0);
                assert!(!obb_overlap(&a, &b), "seed {seed}: {i} vs {j}");
            }
        }
    }
}

#[test]
fn impossible_store_reports_seeding_failure() {
    // a 2x2 store cannot hold any seed fixture with passage margins
    let store = StoreSpec::rectangular(2.0, 2.0).unwrap();
    let templates = default_templates();
    let mut rng = substream(0, "t");
    let p = LayoutParams {
        n_seed_fixtures: 2,
        max_attempts: 20,
        ..params(0)
    };
    assert!(matches!(
        seed_fixtures(&store, &templates, &p, &mut rng),
        Err(crate::Error::SeedingFailed { .. })
    ));
}

// -- place_pass --

#[test]
fn degenerate_field_places_nothing() {
    // two cancelling bases at the same anchor: zero tensor everywhere
    let store = StoreSpec::rectangular(8.0, 6.0).unwrap();
    let h = basis_from_edge(Vec2::new(4.0, 3.0), Vec2::new(5.0, 3.0)).unwrap();
    let v = basis_from_edge(Vec2::new(4.0, 3.0), Vec2::new(4.0, 4.0)).unwrap();
    let field = TensorField::from_bases(vec![h, v], 0.4, 0.25, store.bounds()).unwrap();
    let templates = shelf_only();
    let mut placements = Vec::new();
    let mut rng = substream(3, "pass");
    let stats = place_pass(
        &store,
        &templates,
        &field,
        &mut placements,
        PassAxis::Horizontal,
        &params(3),
        &mut rng,
    );
    assert_eq!(placements.len(), 0);
    assert_eq!(stats.accepted, 0);
}

#[test]
fn horizontal_field_aligns_all_shelves() {
    // a single long horizontal wall dominates the field everywhere
    let store = StoreSpec::rectangular(10.0, 6.0).unwrap();
    let basis = basis_from_edge(Vec2::new(0.0, -2.0), Vec2::new(10.0, -2.0)).unwrap();
    let field = TensorField::from_bases(vec![basis], 0.05, 0.25, store.bounds()).unwrap();
    let templates = shelf_only();
    let p = params(0);
    for seed in 0..50u64 {
        let mut placements = Vec::new();
        let mut rng = substream(seed, "pass");
        place_pass(
            &store,
            &templates,
            &field,
            &mut placements,
            PassAxis::Horizontal,
            &p,
            &mut rng,
        );
        for pl in &placements {
            let dev = crate::geometry::line_angle_distance(pl.yaw, 0.0);
            assert!(dev <= p.angle_tol + 1e-9, "seed {seed}: yaw {}", pl.yaw);
        }
    }
}

#[test]
fn skip_probability_one_places_nothing() {
    let store = StoreSpec::rectangular(10.0, 6.0).unwrap();
    let basis = basis_from_edge(Vec2::new(0.0, -2.0), Vec2::new(10.0, -2.0)).unwrap();
    let field = TensorField::from_bases(vec![basis], 0.05, 0.25, store.bounds()).unwrap();
    let templates = shelf_only();
    let p = LayoutParams {
        skip_prob: 1.0,
        ..params(7)
    };
    let mut placements = Vec::new();
    let mut rng = substream(7, "pass");
    let stats = place_pass(
        &store,
        &templates,
        &field,
        &mut placements,
        PassAxis::Horizontal,
        &p,
        &mut rng,
    );
    assert_eq!(placements.len(), 0);
    assert!(stats.accepted > 0);
    assert_eq!(stats.retained, 0);
}

#[test]
fn skip_probability_is_binomial_consistent() {
    // chi-square on pooled (retained, skipped) counts, 1 dof, p > 0.01
    let store = StoreSpec::rectangular(10.0, 8.0).unwrap();
    let templates = shelf_only();
    for s in [0.25, 0.5] {
        let mut accepted = 0u64;
        let mut retained = 0u64;
        for seed in 0..60u64 {
            let p = LayoutParams {
                skip_prob: s,
                n_seed_fixtures: 0,
                ..params(seed)
            };
            let polys =
                vec![crate::geometry::resample_polygon(&store.walls, p.resample_max_edge).unwrap()];
            let field = build_field(&polys, p.decay, p.grid_resolution, store.bounds()).unwrap();
            let mut placements = Vec::new();
            let mut rng = substream(seed, "layout/pass/horizontal");
            let stats = place_pass(
                &store,
                &templates,
                &field,
                &mut placements,
                PassAxis::Horizontal,
                &p,
                &mut rng,
            );
            accepted += stats.accepted as u64;
            retained += stats.retained as u64;
        }
        let skipped = accepted - retained;
        let exp_retained = accepted as f64 * (1.0 - s);
        let exp_skipped = accepted as f64 * s;
        let chi2 = (retained as f64 - exp_retained).powi(2) / exp_retained
            + (skipped as f64 - exp_skipped).powi(2) / exp_skipped;
        // p > 0.01 for 1 dof means chi2 below 6.635
        assert!(
            chi2 < 6.635,
            "s={s}: accepted {accepted} retained {retained} chi2 {chi2}"
        );
    }
}

// -- generate_layout --

#[test]
fn tiny_store_feasibility_bound() {
    // 4x4 store, 2x0.6 shelf, passage 1.2: at most one back-to-back pair fits
    let store = StoreSpec::rectangular(4.0, 4.0).unwrap();
    let templates = shelf_only();
    for seed in 0..20u64 {
        let p = LayoutParams {
            n_seed_fixtures: 0,
            skip_prob: 0.0,
            ..params(seed)
        };
        let layout = generate_layout(&store, &templates, &p).unwrap();
        assert!(layout.placements.len() <= 2, "seed {seed}");
        let report = validate_layout(&layout, &templates, &p);
        assert!(report.ok, "seed {seed}: {:?}", report.violations);
    }
}

#[test]
fn same_seed_is_byte_identical() {
    let store = StoreSpec::rectangular(12.0, 9.0).unwrap();
    let templates = default_templates();
    let p = params(42);
    let a = generate_layout(&store, &templates, &p).unwrap();
    let b = generate_layout(&store, &templates, &p).unwrap();
    let ja = crate::canonical::to_canonical_string(&a).unwrap();
    let jb = crate::canonical::to_canonical_string(&b).unwrap();
    assert_eq!(ja, jb);
}

#[test]
fn generated_layouts_validate() {
    let store = StoreSpec::rectangular(20.0, 15.0).unwrap();
    let templates = default_templates();
    for seed in 0..5u64 {
        let p = params(seed);
        let layout = generate_layout(&store, &templates, &p).unwrap();
        assert!(
            !layout.placements.is_empty(),
            "seed {seed} placed nothing"
        );
        let report = validate_layout(&layout, &templates, &p);
        assert!(report.ok, "seed {seed}: {:?}", report.violations);
    }
}

#[test]
fn vertical_pass_appends_only() {
    let store = StoreSpec::rectangular(14.0, 11.0).unwrap();
    let templates = default_templates();
    let p = params(9);

    let mut seed_rng = substream(p.seed, "layout/seed");
    let mut placements = seed_fixtures(&store, &templates, &p, &mut seed_rng).unwrap();
    let polys = field_polygons(&store, &templates, &placements, p.resample_max_edge).unwrap();
    let field = build_field(&polys, p.decay, p.grid_resolution, store.bounds()).unwrap();

    let mut rng = substream(p.seed, "layout/pass/horizontal");
    place_pass(
        &store,
        &templates,
        &field,
        &mut placements,
        PassAxis::Horizontal,
        &p,
        &mut rng,
    );
    let after_horizontal = placements.clone();

    let mut rng = substream(p.seed, "layout/pass/vertical");
    place_pass(
        &store,
        &templates,
        &field,
        &mut placements,
        PassAxis::Vertical,
        &p,
        &mut rng,
    );
    assert_eq!(&placements[..after_horizontal.len()], &after_horizontal[..]);
}

// -- validate_layout --

#[test]
fn empty_layout_is_valid() {
    let store = StoreSpec::rectangular(8.0, 8.0).unwrap();
    let templates = default_templates();
    let p = params(0);
    let polys = vec![crate::geometry::resample_polygon(&store.walls, 1.0).unwrap()];
    let layout = Layout {
        store: store.clone(),
        placements: vec![],
        field: build_field(&polys, p.decay, p.grid_resolution, store.bounds()).unwrap(),
        textures: TextureIds::default(),
    };
    assert!(validate_layout(&layout, &templates, &p).ok);
}

fn manual_layout(store: &StoreSpec, placements: Vec<FixturePlacement>) -> Layout {
    let polys = vec![crate::geometry::resample_polygon(&store.walls, 1.0).unwrap()];
    Layout {
        store: store.clone(),
        placements,
        field: build_field(&polys, 0.4, 0.25, store.bounds()).unwrap(),
        textures: TextureIds::default(),
    }
}

fn shelf_at(id: &str, x: f64, y: f64, yaw: f64) -> FixturePlacement {
    FixturePlacement {
        id: id.into(),
        template_id: "shelf_a".into(),
        center: Vec2::new(x, y),
        yaw,
        provenance: Provenance::HorizontalPass,
    }
}

#[test]
fn overlapping_shelves_reported_with_both_ids() {
    let store = StoreSpec::rectangular(8.0, 8.0).unwrap();
    let templates = default_templates();
    let layout = manual_layout(
        &store,
        vec![shelf_at("fix_a", 4.0, 4.0, 0.0), shelf_at("fix_b", 4.5, 4.2, 0.3)],
    );
    let report = validate_layout(&layout, &templates, &params(0));
    assert!(!report.ok);
    assert!(report.violations.iter().any(|v| matches!(
        v,
        Violation::Overlap { a, b } if a == "fix_a" && b == "fix_b"
    )));
}

#[test]
fn blocked_front_face_is_disconnected() {
    // a long blocker leaves a 0.9 m slot in front of fix_a: too narrow for
    // the 1.2 m passage, so fix_a's front face is unreachable; flood-fill
    // oracle in the validator must flag exactly that fixture
    let store = StoreSpec::rectangular(8.0, 8.0).unwrap();
    let mut templates = default_templates();
    templates.push(FixtureTemplate {
        id: "blocker".into(),
        kind: FixtureKind::Box,
        half_extents: Vec2::new(3.9, 0.3),
        height: 1.0,
        boards: vec![],
    });
    let placements = vec![
        shelf_at("fix_a", 4.0, 4.0, 0.0), // front face at y = 3.7
        FixturePlacement {
            id: "fix_block".into(),
            template_id: "blocker".into(),
            center: Vec2::new(4.0, 2.5), // top edge at y = 2.8
            yaw: 0.0,
            provenance: Provenance::Seeded,
        },
    ];
    let layout = manual_layout(&store, placements);
    let report = validate_layout(&layout, &templates, &params(0));
    assert!(!report.ok);
    let disconnected = report.violations.iter().find_map(|v| match v {
        Violation::Disconnected { unreachable } => Some(unreachable),
        _ => None,
    });
    let unreachable = disconnected.expect("disconnected violation");
    assert!(unreachable.contains(&"fix_a".to_string()));
    assert!(!unreachable.contains(&"fix_block".to_string()));
}

#[test]
fn out_of_bounds_reported() {
    let store = StoreSpec::rectangular(8.0, 8.0).unwrap();
    let templates = default_templates();
    let layout = manual_layout(&store, vec![shelf_at("fix_a", 7.8, 4.0, 0.0)]);
    let report = validate_layout(&layout, &templates, &params(0));
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::OutOfBounds { id } if id == "fix_a")));
}
