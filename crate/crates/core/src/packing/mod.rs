//! Circle packings: the radius solver and layout for finite disk
//! triangulations, closed-form packings tangent to a line, the canopy
//! packing, nerve extraction, validation, and symmetry detection.

mod canopy;
mod layout;
mod line;
mod nerve;
mod solver;
mod symmetry;

use serde::{Deserialize, Serialize};

use crate::graphs::{GraphError, VertexId};

pub use canopy::{canopy_pack, canopy_radius, canopy_heights, CanopyPacking};
pub use layout::{layout, layout_with_tol};
pub use line::{line_pack, log_add, LineMode, LineTangentPacking};
pub use nerve::{nerve, validate_packing, ValidationReport};
pub use solver::{angle_at, angle_sum, solve_radii, uniform_boundary, SolveResult, SolverOptions};
pub use symmetry::{bisector, detect_reflection, match_isometry, randomize_pose, IsometryKind, IsometrySpec, Pose};

/// Default geometric validation tolerance (relative).
pub const GEOMETRY_TOL: f64 = 1e-8;
/// Default symmetry matching tolerance (relative).
pub const SYMMETRY_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn distance(&self, other: &Circle) -> f64 {
        (self.cx - other.cx).hypot(self.cy - other.cy)
    }
}

/// Circle per vertex id, with the tolerance the packing was produced at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CirclePacking {
    pub circles: Vec<Circle>,
    pub tolerance: f64,
    /// Ordinate of a horizontal line every circle is tangent to, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<f64>,
}

impl CirclePacking {
    pub fn new(circles: Vec<Circle>, tolerance: f64) -> Self {
        CirclePacking { circles, tolerance, line: None }
    }

    pub fn len(&self) -> usize {
        self.circles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.circles.is_empty()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.circles.iter().map(|c| c.r).collect()
    }

    pub fn circle(&self, v: VertexId) -> &Circle {
        &self.circles[v as usize]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PackingError {
    #[error("triangulation is not a disk (the outer face walk is not a simple cycle)")]
    NotDisk,
    #[error("boundary radii: {0}")]
    BoundaryMismatch(String),
    #[error("solver did not converge in {iterations} sweeps; residual {residual:.3e} (history {history:?})")]
    NoConvergence { iterations: usize, residual: f64, history: Vec<f64> },
    #[error("layout is inconsistent at face {face:?}: position error {error:.3e}")]
    LayoutInconsistent { face: [VertexId; 3], error: f64 },
    #[error("{} overlapping pairs, first {:?}", pairs.len(), pairs.first())]
    Overlap { pairs: Vec<(VertexId, VertexId, f64)> },
    #[error("tangency abscissae at depth {depth} are not representable in f64; use log mode")]
    PrecisionExhausted { depth: i32 },
    #[error("no circle is centered at the origin")]
    NoOriginCircle,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
