use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ProcessError;
use crate::graph::{MultiGraph, Vertex};

/// Which half-edges of the chosen edge `e = {v, u}` still count towards the
/// preferential weight `d_w + alpha` of the new endpoint `w`. The kept
/// endpoint is `v`, the dropped one `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewireConvention {
    /// Only the half-edge at `u` is removed; `v` keeps its half-edge.
    /// Leaves the multigraph law invariant.
    #[default]
    Detached,
    /// Both half-edges of `e` are removed. Not invariant.
    Removed,
    /// Degrees are taken before any removal. Also leaves the law invariant.
    Kept,
}

/// One rewiring move with the default [`RewireConvention::Detached`] weights.
pub fn rewiring_step<R: Rng + ?Sized>(
    g: &mut MultiGraph,
    alpha: f64,
    rng: &mut R,
) -> Result<(), ProcessError> {
    rewiring_step_with(g, alpha, RewireConvention::Detached, rng)
}

/// A uniform edge `e` and a uniform endpoint `v` of `e` are chosen; `e` is
/// replaced by `{v, w}` with `w` drawn proportional to `d'_w + alpha`, where
/// `d'` are the degrees under `convention`.
pub fn rewiring_step_with<R: Rng + ?Sized>(
    g: &mut MultiGraph,
    alpha: f64,
    convention: RewireConvention,
    rng: &mut R,
) -> Result<(), ProcessError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ProcessError::InvalidConfig(format!(
            "rewiring needs a finite alpha > 0, got {alpha}"
        )));
    }
    let m = g.edge_count();
    if m == 0 {
        return Err(ProcessError::EmptyGraph);
    }
    let e = rng.random_range(0..m);
    let side = rng.random_range(0..2usize);
    // half-edge positions: 2e is the first endpoint, 2e + 1 the second
    let kept_pos = 2 * e + side;
    let dropped_pos = 2 * e + 1 - side;
    let v = endpoint(g, kept_pos);

    let mut excluded = match convention {
        RewireConvention::Detached => vec![dropped_pos],
        RewireConvention::Removed => vec![kept_pos, dropped_pos],
        RewireConvention::Kept => vec![],
    };
    excluded.sort_unstable();
    let stubs = 2 * m - excluded.len();
    let n = g.n();
    let fresh = alpha * n as f64;
    let u = rng.random::<f64>() * (stubs as f64 + fresh);
    let w = if u < fresh {
        ((u / alpha) as usize).min(n - 1) as Vertex
    } else {
        let mut pos = rng.random_range(0..stubs);
        for &x in &excluded {
            if pos >= x {
                pos += 1;
            }
        }
        endpoint(g, pos)
    };
    g.replace_edge(e, v, w)?;
    Ok(())
}

fn endpoint(g: &MultiGraph, pos: usize) -> Vertex {
    let (a, b) = g.edges()[pos / 2];
    if pos.is_multiple_of(2) {
        a
    } else {
        b
    }
}
