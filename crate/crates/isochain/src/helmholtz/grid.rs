use std::collections::VecDeque;
use std::io::Write;

use super::FdError;

/// Smallest number of grid steps across the guide width.
pub const MIN_STEPS_PER_WIDTH: usize = 8;

const MASK_MAGIC: &[u8; 8] = b"LFMASK01";

/// Interior nodes of a Dirichlet problem on a square lattice.
///
/// Node `(i, j)` sits at `origin + (i h, j h)`; `j` counts rows upward.
/// Nodes outside the mask carry the boundary value zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDomain {
    h: f64,
    width: f64,
    cols: usize,
    rows: usize,
    origin: [f64; 2],
    mask: Vec<bool>,
    /// Unknown number of each node, `usize::MAX` outside the mask.
    index: Vec<usize>,
    /// Node of each unknown.
    nodes: Vec<(usize, usize)>,
}

impl GridDomain {
    /// `mask` is row-major with `rows` rows of `cols` nodes, bottom row
    /// first.
    pub fn new(
        mask: Vec<bool>,
        cols: usize,
        rows: usize,
        h: f64,
        width: f64,
        origin: [f64; 2],
    ) -> Result<Self, FdError> {
        if mask.len() != cols * rows {
            return Err(FdError::MaskShape { len: mask.len(), cols, rows });
        }
        steps_per_width(h, width)?;
        let mut index = vec![usize::MAX; mask.len()];
        let mut nodes = Vec::new();
        for j in 0..rows {
            for i in 0..cols {
                if mask[j * cols + i] {
                    index[j * cols + i] = nodes.len();
                    nodes.push((i, j));
                }
            }
        }
        if nodes.is_empty() {
            return Err(FdError::EmptyDomain);
        }
        let domain = Self { h, width, cols, rows, origin, mask, index, nodes };
        let reached = domain.component_size(0);
        if reached != domain.nodes.len() {
            return Err(FdError::Disconnected { reached, total: domain.nodes.len() });
        }
        Ok(domain)
    }

    /// A `length × width` rectangle with its lower-left corner at the
    /// origin; `length` is rounded to the grid.
    pub fn strip(length: f64, width: f64, h: f64) -> Result<Self, FdError> {
        let m = steps_per_width(h, width)?;
        let k = (length / h).round() as usize;
        if k < 2 {
            return Err(FdError::EmptyDomain);
        }
        let (cols, rows) = (k - 1, m - 1);
        Self::new(vec![true; cols * rows], cols, rows, h, width, [h, h])
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Position of node `(0, 0)`.
    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    /// Unknown nearest to a point, if that node is interior.
    pub fn unknown_at(&self, x: f64, y: f64) -> Option<usize> {
        let i = ((x - self.origin[0]) / self.h).round();
        let j = ((y - self.origin[1]) / self.h).round();
        (i >= 0.0 && j >= 0.0).then(|| self.unknown(i as usize, j as usize)).flatten()
    }

    pub fn unknowns(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i < self.cols && j < self.rows && self.mask[j * self.cols + i]
    }

    /// Unknown number of node `(i, j)`, if interior.
    pub fn unknown(&self, i: usize, j: usize) -> Option<usize> {
        if i < self.cols && j < self.rows {
            let u = self.index[j * self.cols + i];
            (u != usize::MAX).then_some(u)
        } else {
            None
        }
    }

    pub fn node(&self, unknown: usize) -> (usize, usize) {
        self.nodes[unknown]
    }

    pub fn position(&self, unknown: usize) -> [f64; 2] {
        let (i, j) = self.nodes[unknown];
        [self.origin[0] + i as f64 * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Interior neighbours of an unknown.
    pub fn neighbours(&self, unknown: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.nodes[unknown];
        let steps: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];
        steps.into_iter().filter_map(move |(di, dj)| {
            let (a, b) = (i as isize + di, j as isize + dj);
            (a >= 0 && b >= 0).then(|| self.unknown(a as usize, b as usize)).flatten()
        })
    }

    fn component_size(&self, start: usize) -> usize {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 0;
        while let Some(u) = queue.pop_front() {
            count += 1;
            for v in self.neighbours(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        count
    }

    /// `#` for interior and `.` for exterior nodes, top row first.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity((self.cols + 1) * self.rows);
        for j in (0..self.rows).rev() {
            for i in 0..self.cols {
                out.push(if self.mask[j * self.cols + i] { '#' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    /// Header `LFMASK01`, `u32` rows and `u32` cols (little-endian), then
    /// the mask row-major from the top row, eight nodes per byte with the
    /// first node in the least significant bit.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MASK_MAGIC)?;
        w.write_all(&(self.rows as u32).to_le_bytes())?;
        w.write_all(&(self.cols as u32).to_le_bytes())?;
        let mut byte = 0u8;
        let mut filled = 0;
        for j in (0..self.rows).rev() {
            for i in 0..self.cols {
                if self.mask[j * self.cols + i] {
                    byte |= 1 << filled;
                }
                filled += 1;
                if filled == 8 {
                    w.write_all(&[byte])?;
                    (byte, filled) = (0, 0);
                }
            }
        }
        if filled > 0 {
            w.write_all(&[byte])?;
        }
        Ok(())
    }

    /// Reads the mask written by [`GridDomain::write_binary`] back as
    /// `(rows, cols, mask)`, with the mask bottom row first.
    pub fn read_binary(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>), FdError> {
        if bytes.len() < 16 || &bytes[..8] != MASK_MAGIC {
            return Err(FdError::BadMask("missing LFMASK01 header".into()));
        }
        let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let body = &bytes[16..];
        if body.len() != (rows * cols).div_ceil(8) {
            return Err(FdError::BadMask(format!("expected {} mask bytes, got {}", (rows * cols).div_ceil(8), body.len())));
        }
        let mut mask = vec![false; rows * cols];
        for (k, top_down) in (0..rows).rev().flat_map(|j| (0..cols).map(move |i| (i, j))).enumerate() {
            let (i, j) = top_down;
            mask[j * cols + i] = body[k / 8] >> (k % 8) & 1 == 1;
        }
        Ok((rows, cols, mask))
    }

    /// The binary mask followed by one little-endian `f64` per interior
    /// node, in the same node order.
    pub fn write_binary_field<W: Write>(&self, values: &[f64], mut w: W) -> Result<(), FdError> {
        if values.len() != self.unknowns() {
            return Err(FdError::FieldLength { expected: self.unknowns(), got: values.len() });
        }
        self.write_binary(&mut w)?;
        for j in (0..self.rows).rev() {
            for i in 0..self.cols {
                if let Some(u) = self.unknown(i, j) {
                    w.write_all(&values[u].to_le_bytes())?;
                }
            }
        }
        Ok(())
    }
}

/// `m = L/h`, which must be an integer of at least 8.
pub fn steps_per_width(h: f64, width: f64) -> Result<usize, FdError> {
    if !(h > 0.0 && width > 0.0 && h.is_finite() && width.is_finite()) {
        return Err(FdError::Resolution { h, width });
    }
    let m = (width / h).round();
    if (m * h - width).abs() > 1e-9 * width || m < 1.0 {
        return Err(FdError::Resolution { h, width });
    }
    let m = m as usize;
    if m < MIN_STEPS_PER_WIDTH {
        return Err(FdError::ResolutionTooCoarse { steps: m });
    }
    Ok(m)
}

/// `(2/h²)(1 − cos(πh/L))`, the lowest transverse level of the discrete
/// strip and the threshold of the continuous spectrum on the grid.
pub fn discrete_threshold(h: f64, width: f64) -> f64 {
    2.0 / (h * h) * (1.0 - (std::f64::consts::PI * h / width).cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_counts() {
        let d = GridDomain::strip(4.0, 1.0, 1.0 / 8.0).unwrap();
        assert_eq!((d.cols(), d.rows(), d.unknowns()), (31, 7, 217));
    }

    #[test]
    fn resolution_checks() {
        assert!(matches!(GridDomain::strip(4.0, 1.0, 1.0 / 7.0), Err(FdError::ResolutionTooCoarse { steps: 7 })));
        assert!(matches!(steps_per_width(0.3, 1.0), Err(FdError::Resolution { .. })));
        assert_eq!(steps_per_width(0.05, 1.0).unwrap(), 20);
    }

    #[test]
    fn disconnected_mask_rejected() {
        let mask = vec![true, false, true];
        let err = GridDomain::new(mask, 3, 1, 0.125, 1.0, [0.0, 0.0]).unwrap_err();
        assert!(matches!(err, FdError::Disconnected { reached: 1, total: 2 }));
        assert!(matches!(GridDomain::new(vec![false; 4], 2, 2, 0.125, 1.0, [0.0; 2]), Err(FdError::EmptyDomain)));
    }

    #[test]
    fn text_and_binary_round_trip() {
        let mask = vec![true, true, true, true, false, false, true, false, false];
        let d = GridDomain::new(mask.clone(), 3, 3, 0.125, 1.0, [0.0, 0.0]).unwrap();
        assert_eq!(d.to_text(), "#..\n#..\n###\n");
        let mut buf = Vec::new();
        d.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"LFMASK01");
        assert_eq!(buf.len(), 16 + 2);
        // top row "#.." is the first three bits
        assert_eq!(buf[16] & 0b111, 0b001);
        let (rows, cols, back) = GridDomain::read_binary(&buf).unwrap();
        assert_eq!((rows, cols), (3, 3));
        assert_eq!(back, mask);
    }

    #[test]
    fn field_export_length() {
        let d = GridDomain::strip(2.0, 1.0, 0.125).unwrap();
        let mut buf = Vec::new();
        d.write_binary_field(&vec![1.5; d.unknowns()], &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + (d.cols() * d.rows()).div_ceil(8) + 8 * d.unknowns());
        assert!(d.write_binary_field(&[1.0], &mut Vec::new()).is_err());
    }

    #[test]
    fn threshold_tends_to_continuum() {
        let pi2 = std::f64::consts::PI.powi(2);
        let coarse = discrete_threshold(0.1, 1.0);
        let fine = discrete_threshold(0.025, 1.0);
        assert!(coarse < fine && fine < pi2);
        assert!((pi2 - fine) / pi2 < 1e-3);
    }
}
