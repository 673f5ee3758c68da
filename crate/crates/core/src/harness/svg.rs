use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::maze::{AgentTrace, MazeMap, Segment};
use crate::strategies::{Cell, SugarField};

const SCALE: f64 = 4.0;

fn line(out: &mut String, s: &Segment, class: &str) {
    let _ = writeln!(
        out,
        r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        s.a.x, s.a.y, s.b.x, s.b.y
    );
}

/// Draws the map, the sugar layout (every cell that started with sugar,
/// merged into horizontal runs), start, goal and one agent's path.
pub fn trajectory_svg(
    map: &MazeMap,
    trace: &AgentTrace,
    sugar: Option<&SugarField>,
) -> Result<String> {
    if trace.positions.is_empty() {
        return Err(Error::Render("trace has no positions".into()));
    }
    let (w, h) = (map.width(), map.height());
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {w} {h}">"#,
        w * SCALE,
        h * SCALE
    );
    out.push_str(
        "<style>line{stroke:black;stroke-width:1}.bound{stroke-width:2}\
         rect{fill:#bbbbbb}polyline{fill:none;stroke:blue;stroke-width:0.6}</style>\n",
    );
    if let Some(field) = sugar {
        let size = field.cell_size();
        for r in 0..field.rows() {
            let row = &field.cells()[r * field.cols()..(r + 1) * field.cols()];
            let mut c = 0;
            while c < row.len() {
                if row[c] == Cell::Empty {
                    c += 1;
                    continue;
                }
                let start = c;
                while c < row.len() && row[c] != Cell::Empty {
                    c += 1;
                }
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{size}"/>"#,
                    start as f64 * size,
                    r as f64 * size,
                    (c - start) as f64 * size
                );
            }
        }
    }
    for b in map.bounds() {
        line(&mut out, &b, "bound");
    }
    for wall in map.walls() {
        line(&mut out, wall, "wall");
    }
    let (s, g) = (map.start(), map.goal());
    let _ = writeln!(
        out,
        r#"<circle cx="{}" cy="{}" r="2" fill="red"/>"#,
        s.x, s.y
    );
    let _ = writeln!(
        out,
        r#"<circle cx="{}" cy="{}" r="{}" fill="green"/>"#,
        g.x,
        g.y,
        map.goal_radius()
    );
    out.push_str(r#"<polyline points=""#);
    for (i, p) in trace.positions.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", p.x, p.y);
    }
    out.push_str("\"/>\n</svg>\n");
    Ok(out)
}

pub fn write_trajectory(
    path: &Path,
    map: &MazeMap,
    trace: &AgentTrace,
    sugar: Option<&SugarField>,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, trajectory_svg(map, trace, sugar)?)?;
    Ok(())
}
