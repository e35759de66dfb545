//! RRT-Connect in the 8-D manipulation space (base frozen).
//!
//! Bidirectional tree growth with greedy connect, shortcut smoothing, and
//! densification to the joint resolution. Joint axes are normalized by
//! their densification resolution so prismatic and revolute components mix
//! in one metric.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::collision::{CollisionIndex, SceneObstacles};
use super::model::RobotModel;
use super::{
    config_lerp, densify_path, steps_between, component_resolution, Config, PlanFailure,
    PlannerParams, SegMethod, Segment, Trajectory, MANIP_DOF,
};

struct Node {
    manip: [f64; MANIP_DOF],
    parent: Option<usize>,
}

struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn new(root: [f64; MANIP_DOF]) -> Tree {
        Tree {
            nodes: vec![Node {
                manip: root,
                parent: None,
            }],
        }
    }

    fn nearest(&self, target: &[f64; MANIP_DOF], weights: &[f64; MANIP_DOF]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, n) in self.nodes.iter().enumerate() {
            let d = weighted_dist(&n.manip, target, weights);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn path_to_root(&self, mut idx: usize) -> Vec<[f64; MANIP_DOF]> {
        let mut out = Vec::new();
        loop {
            out.push(self.nodes[idx].manip);
            match self.nodes[idx].parent {
                Some(p) => idx = p,
                None => break,
            }
        }
        out
    }
}

/// Distance in resolution-normalized units.
fn weighted_dist(a: &[f64; MANIP_DOF], b: &[f64; MANIP_DOF], weights: &[f64; MANIP_DOF]) -> f64 {
    let mut acc = 0.0;
    for i in 0..MANIP_DOF {
        let d = (a[i] - b[i]) / weights[i];
        acc += d * d;
    }
    acc.sqrt()
}

enum Extend {
    Trapped,
    /// Node index of the step just added.
    Advanced(usize),
    /// Node index at (or bitwise equal to) the target.
    Reached(usize),
}

struct Growth<'a> {
    model: &'a RobotModel,
    index: CollisionIndex<'a>,
    base: Config,
    params: &'a PlannerParams,
    weights: [f64; MANIP_DOF],
}

impl<'a> Growth<'a> {
    fn config(&self, m: [f64; MANIP_DOF]) -> Config {
        self.base.with_manip(m)
    }

    fn manip_free(&self, m: [f64; MANIP_DOF]) -> bool {
        matches!(self.index.config_collides(self.model, &self.config(m)), Ok(false))
    }

    /// Straight densified edge between manipulation configs, all waypoints
    /// collision-free.
    fn edge_free(&self, a: [f64; MANIP_DOF], b: [f64; MANIP_DOF]) -> bool {
        let qa = self.config(a);
        let qb = self.config(b);
        let res = component_resolution(self.params);
        let steps = steps_between(&qa, &qb, &res);
        for k in 1..=steps {
            let q = config_lerp(&qa, &qb, k as f64 / steps as f64);
            if !matches!(self.index.config_collides(self.model, &q), Ok(false)) {
                return false;
            }
        }
        true
    }

    fn extend(&self, tree: &mut Tree, target: &[f64; MANIP_DOF]) -> Extend {
        let near_idx = tree.nearest(target, &self.weights);
        let near = tree.nodes[near_idx].manip;
        let dist = weighted_dist(&near, target, &self.weights);
        if dist < 1e-12 {
            return Extend::Reached(near_idx);
        }
        let step = self.params.rrt_eta.min(dist);
        let reaches = step >= dist - 1e-12;
        let mut new = *target;
        if !reaches {
            for i in 0..MANIP_DOF {
                new[i] = near[i] + (target[i] - near[i]) * (step / dist);
            }
        }
        if !self.edge_free(near, new) {
            return Extend::Trapped;
        }
        tree.nodes.push(Node {
            manip: new,
            parent: Some(near_idx),
        });
        let idx = tree.nodes.len() - 1;
        if reaches {
            Extend::Reached(idx)
        } else {
            Extend::Advanced(idx)
        }
    }

    /// Greedily step toward `target`; the meeting node index on success.
    fn connect(&self, tree: &mut Tree, target: &[f64; MANIP_DOF]) -> Option<usize> {
        loop {
            match self.extend(tree, target) {
                Extend::Trapped => return None,
                Extend::Reached(idx) => return Some(idx),
                Extend::Advanced(_) => {}
            }
        }
    }
}

/// Bidirectional RRT-Connect between two manipulation configurations with
/// the base frozen at `q_start`'s pose. The returned path is shortcut
/// smoothed and densified; reproducible for a fixed `rng`.
pub fn plan_rrt_connect(
    model: &RobotModel,
    q_start: &Config,
    q_goal: &Config,
    scene: &SceneObstacles,
    params: &PlannerParams,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory, PlanFailure> {
    let base_delta = (q_start.base_x - q_goal.base_x).abs()
        + (q_start.base_y - q_goal.base_y).abs()
        + crate::geometry::wrap_angle(q_start.base_yaw - q_goal.base_yaw).abs();
    if base_delta > 1e-9 {
        return Err(PlanFailure::InvalidQuery {
            reason: "rrt connect plans with a frozen base".into(),
        });
    }
    if model.check_limits(q_start).is_err() || model.check_limits(q_goal).is_err() {
        return Err(PlanFailure::InvalidQuery {
            reason: "endpoint out of joint limits".into(),
        });
    }

    let local = scene.localized(
        crate::geometry::Vec2::new(q_start.base_x, q_start.base_y),
        2.5,
    );
    let res = component_resolution(params);
    let mut weights = [0.0; MANIP_DOF];
    weights[0] = res[3];
    for i in 1..MANIP_DOF {
        weights[i] = res[4 + i - 1];
    }
    let growth = Growth {
        model,
        index: CollisionIndex::new(&local),
        base: *q_start,
        params,
        weights,
    };

    let start_m = q_start.manip();
    let goal_m = q_goal.manip();
    if !growth.manip_free(start_m) || !growth.manip_free(goal_m) {
        return Err(PlanFailure::InvalidQuery {
            reason: "endpoint in collision".into(),
        });
    }
    if weighted_dist(&start_m, &goal_m, &weights) < 1e-12 {
        return Ok(Trajectory::single(*q_start, true, params.dt, SegMethod::RrtConnect));
    }

    let mut tree_a = Tree::new(start_m);
    let mut tree_b = Tree::new(goal_m);
    let mut swapped = false;
    let (lo, hi) = model.manip_limits();

    let mut result_path: Option<Vec<[f64; MANIP_DOF]>> = None;
    for _ in 0..params.rrt_max_iters {
        let mut sample = [0.0; MANIP_DOF];
        for i in 0..MANIP_DOF {
            sample[i] = rng.random_range(lo[i]..hi[i]);
        }
        match growth.extend(&mut tree_a, &sample) {
            Extend::Trapped => {}
            Extend::Advanced(a_idx) | Extend::Reached(a_idx) => {
                let new = tree_a.nodes[a_idx].manip;
                if let Some(b_idx) = growth.connect(&mut tree_b, &new) {
                    let mut forward = tree_a.path_to_root(a_idx);
                    forward.reverse();
                    let backward = tree_b.path_to_root(b_idx);
                    let mut path = forward;
                    path.extend(backward.into_iter().skip(1));
                    if swapped {
                        path.reverse();
                    }
                    result_path = Some(path);
                    break;
                }
            }
        }
        std::mem::swap(&mut tree_a, &mut tree_b);
        swapped = !swapped;
    }

    let mut path = match result_path {
        Some(p) => p,
        None => return Err(PlanFailure::Timeout),
    };

    // shortcut smoothing
    for _ in 0..params.shortcut_attempts {
        if path.len() < 3 {
            break;
        }
        let i = rng.random_range(0..path.len() - 2);
        let j = rng.random_range(i + 2..path.len());
        if growth.edge_free(path[i], path[j]) {
            path.drain(i + 1..j);
        }
    }

    let configs: Vec<Config> = path.iter().map(|m| q_start.with_manip(*m)).collect();
    let waypoints = densify_path(&configs, params);
    let n_wp = waypoints.len();
    Ok(Trajectory {
        gripper: vec![true; n_wp],
        waypoints,
        dt: params.dt,
        segments: vec![Segment {
            anchor_index: 0,
            method: SegMethod::RrtConnect,
            start_waypoint: 0,
            end_waypoint: n_wp - 1,
        }],
    })
}
