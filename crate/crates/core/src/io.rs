//! CSV and legacy VTK output.

use std::io::Write;

use crate::aps2d::ScalarField2D;
use crate::conditions::{ConditionReport, Verdict};
use crate::error::{Error, Result};
use crate::fem3d::{deviation, Displacement3D};

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// `x1,x2,u` per node.
pub fn write_field_csv(field: &ScalarField2D, mut w: impl Write) -> Result<()> {
    writeln!(w, "x1,x2,u").map_err(io_err)?;
    for (k, v) in field.values.iter().enumerate() {
        let (x1, x2) = field.coords(k);
        writeln!(w, "{x1},{x2},{v:.17e}").map_err(io_err)?;
    }
    Ok(())
}

/// Legacy ASCII structured points with the field as point scalars.
pub fn write_field_vtk(field: &ScalarField2D, mut w: impl Write) -> Result<()> {
    let body = format!(
        "# vtk DataFile Version 3.0\nanti-plane shear field\nASCII\nDATASET STRUCTURED_POINTS\n\
         DIMENSIONS {} {} 1\nORIGIN 0 0 0\nSPACING {} {} 1\nPOINT_DATA {}\nSCALARS u double 1\nLOOKUP_TABLE default\n",
        field.nx,
        field.ny,
        field.hx(),
        field.hy(),
        field.values.len()
    );
    w.write_all(body.as_bytes()).map_err(io_err)?;
    for v in &field.values {
        writeln!(w, "{v:.17e}").map_err(io_err)?;
    }
    Ok(())
}

/// Legacy ASCII unstructured grid of hexahedra with the displacement and
/// `u_δ` as point data.
pub fn write_displacement_vtk(disp: &Displacement3D, mut w: impl Write) -> Result<()> {
    let mesh = disp.mesh;
    let np = mesh.node_count();
    let ne = mesh.element_count();
    writeln!(
        w,
        "# vtk DataFile Version 3.0\nthree-dimensional equilibrium\nASCII\nDATASET UNSTRUCTURED_GRID\nPOINTS {np} double"
    )
    .map_err(io_err)?;
    for k in 0..np {
        let x = mesh.coords(k);
        writeln!(w, "{} {} {}", x[0], x[1], x[2]).map_err(io_err)?;
    }
    writeln!(w, "CELLS {ne} {}", 9 * ne).map_err(io_err)?;
    for e in 0..ne {
        let c = mesh.element(e);
        // VTK_HEXAHEDRON winds the bottom face, then the top face
        writeln!(w, "8 {} {} {} {} {} {} {} {}", c[0], c[1], c[3], c[2], c[4], c[5], c[7], c[6])
            .map_err(io_err)?;
    }
    writeln!(w, "CELL_TYPES {ne}").map_err(io_err)?;
    for _ in 0..ne {
        writeln!(w, "12").map_err(io_err)?;
    }
    writeln!(w, "POINT_DATA {np}\nVECTORS displacement double").map_err(io_err)?;
    for u in &disp.u {
        writeln!(w, "{:.17e} {:.17e} {:.17e}", u[0], u[1], u[2]).map_err(io_err)?;
    }
    writeln!(w, "SCALARS u_delta double 1\nLOOKUP_TABLE default").map_err(io_err)?;
    for d in deviation(disp) {
        writeln!(w, "{d:.17e}").map_err(io_err)?;
    }
    Ok(())
}

/// `x1,x2,u_delta` on the node layer `x3 = 0.5`; needs an odd number of
/// nodes per edge.
pub fn write_slice_csv(disp: &Displacement3D, mut w: impl Write) -> Result<()> {
    let n = disp.mesh.n;
    if n % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "no node layer at x3 = 0.5 with {n} nodes per edge"
        )));
    }
    let dev = deviation(disp);
    writeln!(w, "x1,x2,u_delta").map_err(io_err)?;
    let k = (n - 1) / 2;
    for j in 0..n {
        for i in 0..n {
            let node = disp.mesh.node(i, j, k);
            let x = disp.mesh.coords(node);
            writeln!(w, "{},{},{:.17e}", x[0], x[1], dev[node]).map_err(io_err)?;
        }
    }
    Ok(())
}

fn verdict_fields(v: &Verdict) -> (String, String, String) {
    match v {
        Verdict::Pass => ("pass".into(), String::new(), String::new()),
        Verdict::Fail(w) | Verdict::Inconclusive(w) => {
            (v.tag().into(), format!("{}", w.at), format!("{:e}", w.value))
        }
        Verdict::NotApplicable(why) => ("n/a".into(), String::new(), why.replace(',', ";")),
    }
}

/// One row per condition: `model,condition,verdict,at,value`.
pub fn write_report_csv(report: &ConditionReport, header: bool, mut w: impl Write) -> Result<()> {
    if header {
        writeln!(w, "model,condition,verdict,at,value").map_err(io_err)?;
    }
    let model = report.model.replace(',', ";");
    for (name, v) in report.rows() {
        let (tag, at, value) = verdict_fields(v);
        writeln!(w, "{model},{name},{tag},{at},{value}").map_err(io_err)?;
    }
    if let Some(b) = report.k1.b {
        writeln!(w, "{model},k1-b,value,,{b}").map_err(io_err)?;
    }
    if let Some(r) = report.reference {
        writeln!(w, "{model},residual-stress,value,,{:e}", r.residual_stress).map_err(io_err)?;
        writeln!(w, "{model},shear-modulus,value,,{}", r.shear_modulus).map_err(io_err)?;
    }
    Ok(())
}
