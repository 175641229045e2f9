//! Geometry files: JSON for round trips and SVG for drawing.

use serde::{Deserialize, Serialize};

use super::{DesignError, GuideGeometry, Turn};

pub const GEOMETRY_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryFile {
    schema_version: u32,
    width: f64,
    segments: Vec<f64>,
    turns: Vec<Turn>,
    vertices: Vec<[f64; 2]>,
    arms: f64,
}

pub fn geometry_to_json(geometry: &GuideGeometry) -> String {
    let file = GeometryFile {
        schema_version: GEOMETRY_SCHEMA_VERSION,
        width: geometry.width,
        segments: geometry.segments.clone(),
        turns: geometry.turns.clone(),
        vertices: geometry.vertices.clone(),
        arms: geometry.arms,
    };
    serde_json::to_string_pretty(&file).expect("geometry serializes")
}

/// Parses and re-validates a geometry. The vertices are retraced from the
/// segments and turns and must match the stored ones.
pub fn geometry_from_json(text: &str) -> Result<GuideGeometry, DesignError> {
    let file: GeometryFile = serde_json::from_str(text).map_err(|e| DesignError::BadGeometry(e.to_string()))?;
    if file.schema_version != GEOMETRY_SCHEMA_VERSION {
        return Err(DesignError::BadGeometry(format!("unsupported schema_version {}", file.schema_version)));
    }
    let geometry = GuideGeometry::trace(&file.segments, &file.turns, file.width, file.arms)?;
    let tol = 1e-9 * file.width;
    let same = geometry.vertices.len() == file.vertices.len()
        && geometry.vertices.iter().zip(&file.vertices).all(|(a, b)| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol);
    if !same {
        return Err(DesignError::BadGeometry("vertices do not match segments and turns".into()));
    }
    geometry.validate()?;
    Ok(GuideGeometry { vertices: file.vertices, ..geometry })
}

/// The outline as one filled path, one unit per width, `y` pointing up.
pub fn outline_to_svg(geometry: &GuideGeometry) -> String {
    let b = geometry.bounds();
    let pad = 0.5 * geometry.width;
    let (w, h) = (b.x1 - b.x0 + 2.0 * pad, b.y1 - b.y0 + 2.0 * pad);
    let scale = 1.0 / geometry.width;
    let mut d = String::new();
    for (i, p) in geometry.outline().iter().enumerate() {
        d.push_str(if i == 0 { "M " } else { " L " });
        d.push_str(&format!("{:?} {:?}", p[0] * scale, p[1] * scale));
    }
    d.push_str(" Z");
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:?} {:?} {:?} {:?}\">\n",
            "  <g transform=\"scale(1,-1)\">\n",
            "    <path d=\"{}\" fill=\"black\" stroke=\"none\"/>\n",
            "  </g>\n",
            "</svg>\n"
        ),
        (b.x0 - pad) * scale,
        -(b.y1 + pad) * scale,
        w * scale,
        h * scale,
        d
    )
}

/// Reads back the outline polygon of [`outline_to_svg`], in units of the
/// width.
pub fn outline_from_svg(svg: &str) -> Result<Vec<[f64; 2]>, DesignError> {
    let bad = |m: &str| DesignError::BadGeometry(m.to_string());
    let start = svg.find(" d=\"").ok_or_else(|| bad("no path data"))? + 4;
    let end = svg[start..].find('"').ok_or_else(|| bad("unterminated path data"))? + start;
    let mut points = Vec::new();
    let mut tokens = svg[start..end].split_whitespace();
    while let Some(cmd) = tokens.next() {
        match cmd {
            "M" | "L" => {
                let mut num = || -> Result<f64, DesignError> {
                    tokens.next().ok_or_else(|| bad("missing coordinate"))?.parse().map_err(|_| bad("bad coordinate"))
                };
                points.push([num()?, num()?]);
            }
            "Z" => break,
            other => return Err(bad(&format!("unexpected path command {other}"))),
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::{layout_geometry, GuideParams, Pattern};

    fn sample() -> GuideGeometry {
        layout_geometry(&[2.3, 1.7, 3.1], &Pattern::Meander, &GuideParams::default()).unwrap()
    }

    #[test]
    fn json_round_trip() {
        let g = sample();
        let text = geometry_to_json(&g);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["turns"][0], "L");
        assert_eq!(geometry_from_json(&text).unwrap(), g);
    }

    #[test]
    fn json_rejects_tampering() {
        let g = sample();
        let mut v: serde_json::Value = serde_json::from_str(&geometry_to_json(&g)).unwrap();
        v["vertices"][2][0] = serde_json::json!(99.0);
        assert!(geometry_from_json(&v.to_string()).is_err());
        let mut v: serde_json::Value = serde_json::from_str(&geometry_to_json(&g)).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(geometry_from_json(&v.to_string()).is_err());
        // a spiral that overlaps itself
        let spiral = GuideGeometry::trace(&[1.5, 1.5], &[Turn::Left; 3], 1.0, 8.0).unwrap();
        assert!(matches!(geometry_from_json(&geometry_to_json(&spiral)), Err(DesignError::SelfIntersection { .. })));
    }

    #[test]
    fn svg_round_trip() {
        let g = sample();
        let svg = outline_to_svg(&g);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("stroke=\"none\""));
        assert_eq!(outline_from_svg(&svg).unwrap(), g.outline());
    }
}
