//! Hand-constructed snapshot corpus for the task evaluator: 12 positive and
//! 12 negative cases covering every atomic task kind and every failure
//! criterion (undisturbed-items violations, failed placement, moving robot,
//! door angles, composite subtask failures).

use std::collections::BTreeMap;

use darkstore_core::arrangement::{arrange_store, ArrangeParams, Arrangement};
use darkstore_core::catalog::{default_products, default_templates};
use darkstore_core::geometry::{Obb3, Quat, Vec2, Vec3};
use darkstore_core::layout::{generate_layout, template_by_id, FixtureTemplate, LayoutParams, StoreSpec};
use darkstore_core::planner::Config;
use darkstore_core::task_eval::{
    eval_task, FailedCriterion, SceneState, TaskKind, TaskSpec, Tolerances,
};

const DOOR: &str = "showcase_door_1";

struct World {
    arrangement: Arrangement,
    templates: Vec<FixtureTemplate>,
    base: SceneState,
    /// (product, fixture, destination board, far-from-group xy, near xy)
    transfer: (String, String, usize, Vec2, Vec2),
    target_a: String,
    product_a: String,
    product_b: String,
    target_b: String,
    bystander: String,
}

fn build_world() -> World {
    let store = StoreSpec::rectangular(10.0, 8.0).unwrap();
    let templates = default_templates();
    let products = default_products();
    let layout = generate_layout(
        &store,
        &templates,
        &LayoutParams {
            seed: 6,
            ..LayoutParams::default()
        },
    )
    .unwrap();
    let arrangement = arrange_store(
        &layout,
        &templates,
        &products,
        &ArrangeParams {
            seed: 6,
            ..ArrangeParams::default()
        },
    )
    .unwrap();

    // a (product, fixture) pair with lanes on board X, an empty destination
    // board Y, and a point of Y's volume farther than the proximity radius
    // from every same-product lane front
    let tol = Tolerances::default();
    let transfer = arrangement
        .lanes
        .iter()
        .find_map(|lane| {
            let placement = arrangement
                .layout
                .placements
                .iter()
                .find(|p| p.id == lane.placement_id)?;
            let template = template_by_id(&templates, &placement.template_id).ok()?;
            let dest = template.boards.iter().map(|b| b.index).find(|&b| {
                b != lane.board_index
                    && !arrangement.lanes.iter().any(|o| {
                        o.placement_id == lane.placement_id
                            && o.board_index == b
                            && o.product_id == lane.product_id
                    })
            })?;
            // same-product lane fronts on the fixture (world xy)
            let fronts: Vec<Vec2> = arrangement
                .lanes
                .iter()
                .filter(|o| o.placement_id == lane.placement_id && o.product_id == lane.product_id)
                .map(|o| {
                    placement.center
                        + Vec2::new(o.anchor_x, *o.slots.first().unwrap()).rotated(placement.yaw)
                })
                .collect();
            let near = fronts[0];
            // scan the board for a point beyond the proximity radius
            let board = template.boards.iter().find(|b| b.index == dest)?;
            let far = (0..40).find_map(|k| {
                let x = board.rect.min.x
                    + board.rect.width() * (k as f64 + 0.5) / 40.0;
                let local = Vec2::new(x, board.rect.center().y);
                let world = placement.center + local.rotated(placement.yaw);
                if fronts.iter().all(|f| f.distance(world) > tol.proximity + 0.05) {
                    Some(world)
                } else {
                    None
                }
            })?;
            Some((
                lane.product_id.clone(),
                lane.placement_id.clone(),
                dest,
                far,
                near,
            ))
        })
        .expect("a transfer setup exists");

    let target_a = arrangement.items[0].id.clone();
    let product_a = arrangement.items[0].product_id.clone();
    let product_b = arrangement
        .items
        .iter()
        .map(|i| i.product_id.clone())
        .find(|p| *p != product_a && *p != transfer.0)
        .expect("a second product");
    let target_b = arrangement
        .items
        .iter()
        .find(|i| i.product_id == product_b)
        .unwrap()
        .id
        .clone();
    let bystander = arrangement
        .items
        .iter()
        .find(|i| {
            i.product_id != product_a && i.product_id != product_b && i.product_id != transfer.0
        })
        .unwrap()
        .id
        .clone();

    let mut door_angles = BTreeMap::new();
    door_angles.insert(DOOR.to_string(), 0.0);
    let base = SceneState {
        item_poses: arrangement
            .items
            .iter()
            .map(|i| (i.id.clone(), i.pose))
            .collect(),
        robot_config: Config::from_array([0.0; 11]),
        joint_velocities: [0.0; 11],
        door_angles,
        basket: Obb3::new(Vec3::new(1.2, 1.2, 0.4), Vec3::new(0.25, 0.2, 0.4), 0.0).unwrap(),
        timestamp: 0.0,
    };
    World {
        arrangement,
        templates,
        base,
        transfer,
        target_a,
        product_a,
        product_b,
        target_b,
        bystander,
    }
}

fn pick_task(product: &str) -> TaskSpec {
    TaskSpec {
        kind: TaskKind::PickToBasket {
            product_id: product.to_string(),
        },
        tolerances: Tolerances::default(),
    }
}

fn open_task() -> TaskSpec {
    TaskSpec {
        kind: TaskKind::OpenDoor {
            door_id: DOOR.into(),
        },
        tolerances: Tolerances::default(),
    }
}

fn close_task() -> TaskSpec {
    TaskSpec {
        kind: TaskKind::CloseDoor {
            door_id: DOOR.into(),
        },
        tolerances: Tolerances::default(),
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Expect {
    Success,
    Fail(&'static str),
}

fn criterion_name(c: &FailedCriterion) -> &'static str {
    match c {
        FailedCriterion::TargetNotPlaced => "target_not_placed",
        FailedCriterion::ItemsDisturbed { .. } => "items_disturbed",
        FailedCriterion::RobotMoving => "robot_moving",
        FailedCriterion::DoorAngle => "door_angle",
        FailedCriterion::Subtask { .. } => "subtask",
    }
}

/// Runs all 24 cases; returns (correct, total).
pub fn run_corpus() -> (usize, usize) {
    let w = build_world();
    let board_volume = |fixture: &str, board: usize| -> Obb3 {
        let placement = w
            .arrangement
            .layout
            .placements
            .iter()
            .find(|p| p.id == fixture)
            .unwrap();
        let template = template_by_id(&w.templates, &placement.template_id).unwrap();
        darkstore_core::arrangement::board_world_volume(placement, template, board).unwrap()
    };
    let (tp, tf, tb, far_xy, near_xy) = (
        w.transfer.0.clone(),
        w.transfer.1.clone(),
        w.transfer.2,
        w.transfer.3,
        w.transfer.4,
    );
    let transfer_item = w
        .arrangement
        .items
        .iter()
        .find(|i| i.product_id == tp)
        .unwrap()
        .id
        .clone();
    let dest_z = board_volume(&tf, tb).center.z;
    let transfer_task = |kind: &str| TaskSpec {
        kind: match kind {
            "floor" => TaskKind::PickFromFloor {
                product_id: tp.clone(),
                fixture_id: tf.clone(),
                board_index: tb,
            },
            _ => TaskKind::BoardToBoard {
                product_id: tp.clone(),
                fixture_id: tf.clone(),
                board_index: tb,
            },
        },
        tolerances: Tolerances::default(),
    };

    let with = |edits: &dyn Fn(&mut SceneState)| {
        let mut s = w.base.clone();
        edits(&mut s);
        s
    };
    let placed_a = with(&|s| {
        s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
    });
    let open_at = |deg: f64| {
        with(&|s| {
            *s.door_angles.get_mut(DOOR).unwrap() = deg.to_radians();
        })
    };
    let before_open = open_at(70.0);

    struct Case {
        name: &'static str,
        task: TaskSpec,
        snapshots: Vec<SceneState>,
        expect: Expect,
    }

    let mut cases: Vec<Case> = Vec::new();

    // ---- positives ----
    cases.push(Case {
        name: "pick product A to basket",
        task: pick_task(&w.product_a),
        snapshots: vec![w.base.clone(), placed_a.clone()],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "pick product B to basket",
        task: pick_task(&w.product_b),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&w.target_b).unwrap().position = s.basket.center;
            }),
        ],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "pick from floor onto the destination board",
        task: transfer_task("floor"),
        snapshots: vec![
            with(&|s| {
                s.item_poses.get_mut(&transfer_item).unwrap().position.z = 0.05;
            }),
            with(&|s| {
                s.item_poses.get_mut(&transfer_item).unwrap().position =
                    Vec3::new(near_xy.x, near_xy.y, dest_z);
            }),
        ],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "board to board near the group",
        task: transfer_task("board"),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&transfer_item).unwrap().position =
                    Vec3::new(near_xy.x, near_xy.y, dest_z);
            }),
        ],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "open door to 70 degrees",
        task: open_task(),
        snapshots: vec![w.base.clone(), open_at(70.0)],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "close door to 2 degrees",
        task: close_task(),
        snapshots: vec![before_open.clone(), open_at(2.0)],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "composite open then pick",
        task: TaskSpec {
            kind: TaskKind::Composite {
                subtasks: vec![open_task(), pick_task(&w.product_a)],
            },
            tolerances: Tolerances::default(),
        },
        snapshots: vec![
            w.base.clone(),
            open_at(70.0),
            with(&|s| {
                *s.door_angles.get_mut(DOOR).unwrap() = 70f64.to_radians();
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
            }),
        ],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "pick with sub-tolerance bystander jitter",
        task: pick_task(&w.product_a),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
                s.item_poses.get_mut(&w.bystander).unwrap().position.x += 0.002;
            }),
        ],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "board to board with rotated target",
        task: transfer_task("board"),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                let pose = s.item_poses.get_mut(&transfer_item).unwrap();
                pose.position = Vec3::new(near_xy.x, near_xy.y, dest_z);
                pose.rotation = Quat::from_rotation_z(0.5) * pose.rotation;
            }),
        ],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "open door exactly at the threshold",
        task: open_task(),
        snapshots: vec![w.base.clone(), open_at(60.0)],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "close door exactly at the threshold",
        task: close_task(),
        snapshots: vec![before_open.clone(), open_at(5.0)],
        expect: Expect::Success,
    });
    cases.push(Case {
        name: "composite open, pick, close",
        task: TaskSpec {
            kind: TaskKind::Composite {
                subtasks: vec![open_task(), pick_task(&w.product_a), close_task()],
            },
            tolerances: Tolerances::default(),
        },
        snapshots: vec![
            w.base.clone(),
            open_at(70.0),
            with(&|s| {
                *s.door_angles.get_mut(DOOR).unwrap() = 70f64.to_radians();
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
            }),
            with(&|s| {
                *s.door_angles.get_mut(DOOR).unwrap() = 2f64.to_radians();
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
            }),
        ],
        expect: Expect::Success,
    });

    // ---- negatives ----
    cases.push(Case {
        name: "pick never places the item",
        task: pick_task(&w.product_a),
        snapshots: vec![w.base.clone(), w.base.clone()],
        expect: Expect::Fail("target_not_placed"),
    });
    cases.push(Case {
        name: "pick knocks a nearby item",
        task: pick_task(&w.product_a),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
                s.item_poses.get_mut(&w.bystander).unwrap().position.x += 0.10;
            }),
        ],
        expect: Expect::Fail("items_disturbed"),
    });
    cases.push(Case {
        name: "pick finishes while still moving",
        task: pick_task(&w.product_a),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
                s.joint_velocities[0] = 0.5;
            }),
        ],
        expect: Expect::Fail("robot_moving"),
    });
    cases.push(Case {
        name: "door opened only halfway",
        task: open_task(),
        snapshots: vec![w.base.clone(), open_at(50.0)],
        expect: Expect::Fail("door_angle"),
    });
    cases.push(Case {
        name: "door left ajar when closing",
        task: close_task(),
        snapshots: vec![before_open.clone(), open_at(20.0)],
        expect: Expect::Fail("door_angle"),
    });
    cases.push(Case {
        name: "composite fails at the first subtask",
        task: TaskSpec {
            kind: TaskKind::Composite {
                subtasks: vec![open_task(), pick_task(&w.product_a)],
            },
            tolerances: Tolerances::default(),
        },
        snapshots: vec![
            w.base.clone(),
            w.base.clone(), // door never opened
            placed_a.clone(),
        ],
        expect: Expect::Fail("subtask"),
    });
    cases.push(Case {
        name: "floor pick leaves the item on the floor",
        task: transfer_task("floor"),
        snapshots: vec![
            with(&|s| {
                s.item_poses.get_mut(&transfer_item).unwrap().position.z = 0.05;
            }),
            with(&|s| {
                s.item_poses.get_mut(&transfer_item).unwrap().position.z = 0.05;
            }),
        ],
        expect: Expect::Fail("target_not_placed"),
    });
    cases.push(Case {
        name: "board transfer lands far from the group",
        task: transfer_task("board"),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&transfer_item).unwrap().position =
                    Vec3::new(far_xy.x, far_xy.y, dest_z);
            }),
        ],
        expect: Expect::Fail("target_not_placed"),
    });
    cases.push(Case {
        name: "pick rotates a nearby item",
        task: pick_task(&w.product_a),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
                let pose = s.item_poses.get_mut(&w.bystander).unwrap();
                pose.rotation = Quat::from_rotation_z(10f64.to_radians()) * pose.rotation;
            }),
        ],
        expect: Expect::Fail("items_disturbed"),
    });
    cases.push(Case {
        name: "door just below the open threshold",
        task: open_task(),
        snapshots: vec![w.base.clone(), open_at(59.0)],
        expect: Expect::Fail("door_angle"),
    });
    cases.push(Case {
        name: "composite fails at the second subtask",
        task: TaskSpec {
            kind: TaskKind::Composite {
                subtasks: vec![open_task(), pick_task(&w.product_a)],
            },
            tolerances: Tolerances::default(),
        },
        snapshots: vec![
            w.base.clone(),
            open_at(70.0),
            open_at(70.0), // item never picked
        ],
        expect: Expect::Fail("subtask"),
    });
    cases.push(Case {
        name: "pick with residual torso velocity",
        task: pick_task(&w.product_a),
        snapshots: vec![
            w.base.clone(),
            with(&|s| {
                s.item_poses.get_mut(&w.target_a).unwrap().position = s.basket.center;
                s.joint_velocities[3] = 0.02;
            }),
        ],
        expect: Expect::Fail("robot_moving"),
    });

    let total = cases.len();
    let mut correct = 0;
    for case in &cases {
        let report = eval_task(&case.task, &case.snapshots, &w.arrangement, &w.templates)
            .unwrap_or_else(|e| panic!("case '{}' errored: {e}", case.name));
        let ok = match case.expect {
            Expect::Success => report.success,
            Expect::Fail(kind) => {
                !report.success
                    && report
                        .failed
                        .first()
                        .map(|c| criterion_name(c) == kind)
                        .unwrap_or(false)
            }
        };
        if ok {
            correct += 1;
        } else {
            eprintln!(
                "corpus case '{}' misclassified: expected {:?}, got success={} failed={:?}",
                case.name, case.expect, report.success, report.failed
            );
        }
    }
    (correct, total)
}
