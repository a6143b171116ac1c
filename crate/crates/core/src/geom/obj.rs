use std::io::{self, Write};

use super::Mesh;

/// A named mesh to be written as one OBJ object.
pub struct ObjObject<'a> {
    pub name: String,
    pub mesh: &'a Mesh,
}

/// Writes Wavefront OBJ text with positions, UVs and normals.
pub fn write_obj<W: Write>(out: &mut W, objects: &[ObjObject<'_>]) -> io::Result<()> {
    writeln!(out, "# soyfield mesh export")?;
    let mut base = 1usize;
    for obj in objects {
        let m = obj.mesh;
        writeln!(out, "o {}", obj.name)?;
        for p in &m.positions {
            writeln!(out, "v {} {} {}", p.x, p.y, p.z)?;
        }
        for t in &m.uvs {
            writeln!(out, "vt {} {}", t.x, t.y)?;
        }
        for n in &m.normals {
            writeln!(out, "vn {} {} {}", n.x, n.y, n.z)?;
        }
        for t in &m.triangles {
            let [a, b, c] = t.map(|i| i as usize + base);
            writeln!(out, "f {a}/{a}/{a} {b}/{b}/{b} {c}/{c}/{c}")?;
        }
        base += m.vertex_count();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{cylinder, MaterialSlot, Tessellation};
    use crate::lsys::OrganLabel;
    use glam::DVec3;

    #[test]
    fn indices_are_offset_per_object() {
        let c = cylinder(DVec3::ZERO, DVec3::Z * 0.01, 0.002, &Tessellation::default(), OrganLabel::Stem, MaterialSlot::stem())
            .unwrap();
        let mut buf = Vec::new();
        write_obj(
            &mut buf,
            &[ObjObject { name: "a".into(), mesh: &c }, ObjObject { name: "b".into(), mesh: &c }],
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches("\no ").count(), 2);
        let max_index: usize = text
            .lines()
            .filter(|l| l.starts_with("f "))
            .flat_map(|l| l[2..].split(' ').map(|v| v.split('/').next().unwrap().parse::<usize>().unwrap()))
            .max()
            .unwrap();
        assert_eq!(max_index, 2 * c.vertex_count());
    }
}
