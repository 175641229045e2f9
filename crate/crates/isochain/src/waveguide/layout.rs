//! Right-angle guides on the plane.
//!
//! Corners are the sites of the chain and the straight pieces between
//! consecutive corners carry the couplings. A guide with `N` segments has
//! `N + 1` corners and a terminal arm on each end, so it is made of
//! `N + 2` straight pieces. The first arm runs along `+x` into the first
//! corner, which sits at the origin.

use serde::{Deserialize, Serialize};

use super::{DesignError, GuideParams};

/// Length of each terminal arm in units of the width.
pub const ARM_WIDTHS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Turn {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pattern {
    /// `L R L R …`
    Zigzag,
    /// `L L R R L L …`
    Meander,
    /// One turn per corner.
    Custom(Vec<Turn>),
}

impl Pattern {
    pub fn turns(&self, corners: usize) -> Vec<Turn> {
        match self {
            Self::Zigzag => (0..corners).map(|i| if i % 2 == 0 { Turn::Left } else { Turn::Right }).collect(),
            Self::Meander => (0..corners).map(|i| if i % 4 < 2 { Turn::Left } else { Turn::Right }).collect(),
            Self::Custom(t) => t.clone(),
        }
    }

    fn alternate(&self) -> Option<Self> {
        match self {
            Self::Zigzag => Some(Self::Meander),
            Self::Meander => Some(Self::Zigzag),
            Self::Custom(_) => None,
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x1 && y > self.y0 && y < self.y1
    }

    /// Open rectangles overlapping or closed ones touching.
    fn meets(&self, other: &Rect, tol: f64) -> bool {
        self.x0 < other.x1 + tol && other.x0 < self.x1 + tol && self.y0 < other.y1 + tol && other.y0 < self.y1 + tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuideGeometry {
    pub width: f64,
    /// Corner-to-corner centerline lengths `d_1..d_N`.
    pub segments: Vec<f64>,
    /// One turn per corner.
    pub turns: Vec<Turn>,
    /// Terminal arm length, measured from the end corner.
    pub arms: f64,
    /// Centerline vertices: arm start, corners, arm end.
    pub vertices: Vec<[f64; 2]>,
}

fn rotate(dir: [i32; 2], turn: Turn) -> [i32; 2] {
    match turn {
        Turn::Left => [-dir[1], dir[0]],
        Turn::Right => [dir[1], -dir[0]],
    }
}

impl GuideGeometry {
    /// Builds the centerline without validating it.
    pub fn trace(segments: &[f64], turns: &[Turn], width: f64, arms: f64) -> Result<Self, DesignError> {
        if turns.len() != segments.len() + 1 {
            return Err(DesignError::TurnCount { expected: segments.len() + 1, got: turns.len() });
        }
        if !(width > 0.0) || !(arms > 0.0) || segments.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(DesignError::InvalidParams("segments, width and arms must be positive".into()));
        }
        let mut vertices = vec![[-arms, 0.0], [0.0, 0.0]];
        let mut dir = [1, 0];
        let mut at = [0.0, 0.0];
        for (i, &turn) in turns.iter().enumerate() {
            dir = rotate(dir, turn);
            let len = if i < segments.len() { segments[i] } else { arms };
            at = [at[0] + len * dir[0] as f64, at[1] + len * dir[1] as f64];
            vertices.push(at);
        }
        Ok(Self { width, segments: segments.to_vec(), turns: turns.to_vec(), arms, vertices })
    }

    pub fn corners(&self) -> &[[f64; 2]] {
        &self.vertices[1..self.vertices.len() - 1]
    }

    /// The straight pieces inflated by `L/2` on each side. Pieces extend
    /// `L/2` past every corner, which fills the corner square; the free
    /// arm ends are cut flush.
    pub fn pieces(&self) -> Vec<Rect> {
        let half = 0.5 * self.width;
        let last = self.vertices.len() - 2;
        (0..=last)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[i + 1]);
                let ext_a = if i == 0 { 0.0 } else { half };
                let ext_b = if i == last { 0.0 } else { half };
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let (ux, uy) = (dx.signum() * (dx != 0.0) as i32 as f64, dy.signum() * (dy != 0.0) as i32 as f64);
                let a = [a[0] - ux * ext_a, a[1] - uy * ext_a];
                let b = [b[0] + ux * ext_b, b[1] + uy * ext_b];
                let (wx, wy) = if ux != 0.0 { (0.0, half) } else { (half, 0.0) };
                Rect {
                    x0: a[0].min(b[0]) - wx,
                    x1: a[0].max(b[0]) + wx,
                    y0: a[1].min(b[1]) - wy,
                    y1: a[1].max(b[1]) + wy,
                }
            })
            .collect()
    }

    /// The first pair of non-adjacent pieces whose outlines meet, counting
    /// pieces from the first arm as 0.
    pub fn first_intersection(&self) -> Option<(usize, usize)> {
        let pieces = self.pieces();
        let tol = 1e-9 * self.width;
        for i in 0..pieces.len() {
            for j in i + 2..pieces.len() {
                if pieces[i].meets(&pieces[j], tol) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        match self.first_intersection() {
            Some((first, second)) => Err(DesignError::SelfIntersection { first, second }),
            None => Ok(()),
        }
    }

    /// Closed outline with mitred corners, counter-clockwise or clockwise
    /// depending on the turns; the first point is not repeated.
    pub fn outline(&self) -> Vec<[f64; 2]> {
        let half = 0.5 * self.width;
        let v = &self.vertices;
        let unit = |a: [f64; 2], b: [f64; 2]| {
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = (dx * dx + dy * dy).sqrt();
            [dx / len, dy / len]
        };
        // left normals of each piece
        let normals: Vec<[f64; 2]> = v.windows(2).map(|w| unit(w[0], w[1])).map(|u| [-u[1], u[0]]).collect();
        let offset = |side: f64| -> Vec<[f64; 2]> {
            let mut pts = Vec::with_capacity(v.len());
            for i in 0..v.len() {
                let n = if i == 0 {
                    normals[0]
                } else if i == v.len() - 1 {
                    normals[i - 1]
                } else {
                    // right angle: the mitre vector is the sum of the normals
                    [normals[i - 1][0] + normals[i][0], normals[i - 1][1] + normals[i][1]]
                };
                pts.push([v[i][0] + side * half * n[0], v[i][1] + side * half * n[1]]);
            }
            pts
        };
        let mut outline = offset(1.0);
        outline.extend(offset(-1.0).into_iter().rev());
        outline
    }

    /// Bounding box of the outline.
    pub fn bounds(&self) -> Rect {
        self.pieces().iter().fold(
            Rect { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY },
            |b, r| Rect { x0: b.x0.min(r.x0), x1: b.x1.max(r.x1), y0: b.y0.min(r.y0), y1: b.y1.max(r.y1) },
        )
    }
}

/// Lays out `segments` with the turns of `pattern` and terminal arms of
/// `8L`. A built-in pattern that self-intersects is retried with the other
/// built-in pattern; the error reports the requested pattern's collision.
pub fn layout_geometry(segments: &[f64], pattern: &Pattern, params: &GuideParams) -> Result<GuideGeometry, DesignError> {
    params.validate()?;
    if let Some((index, &d)) = segments.iter().enumerate().find(|(_, d)| **d < params.d_min * (1.0 - 1e-12)) {
        return Err(DesignError::SegmentTooShort { index: index + 1, length: d, d_min: params.d_min });
    }
    let arms = ARM_WIDTHS * params.width;
    let geometry = GuideGeometry::trace(segments, &pattern.turns(segments.len() + 1), params.width, arms)?;
    let err = match geometry.validate() {
        Ok(()) => return Ok(geometry),
        Err(e) => e,
    };
    if let Some(other) = pattern.alternate() {
        let retry = GuideGeometry::trace(segments, &other.turns(segments.len() + 1), params.width, arms)?;
        if retry.validate().is_ok() {
            return Ok(retry);
        }
    }
    Err(err)
}
