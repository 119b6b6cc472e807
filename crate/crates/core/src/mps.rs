//! Fixed-layout MPS export.
//!
//! Fields start at the classic fixed-format columns. Names longer than eight
//! characters push the following fields right; names never contain spaces so
//! whitespace-delimited readers parse the output unambiguously.

use std::fmt::Write;

use crate::model::{Integrality, MipModel, Sense};

const OBJ_ROW: &str = "COST";

fn num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn field_line(out: &mut String, f1: &str, f2: &str, f3: &str, f4: &str) {
    // Columns 2-3, 5-12, 15-22, 25-36.
    let mut line = format!(" {f1:<2} {f2:<8}  {f3:<8}  {f4}");
    while line.ends_with(' ') {
        line.pop();
    }
    out.push_str(&line);
    out.push('\n');
}

pub fn export_mps(model: &MipModel) -> String {
    let mut out = String::new();
    let name: String = model
        .name
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    let _ = writeln!(out, "NAME          {}", if name.is_empty() { "JRA" } else { &name });

    out.push_str("ROWS\n");
    field_line(&mut out, "N", OBJ_ROW, "", "");
    for c in &model.constraints {
        let kind = match c.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        field_line(&mut out, kind, &c.name, "", "");
    }

    // Column-major coefficient lists, rows in constraint order.
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (r, c) in model.constraints.iter().enumerate() {
        for &(v, coef) in &c.terms {
            if coef != 0.0 {
                columns[v].push((r, coef));
            }
        }
    }
    let mut obj = vec![0.0; model.num_vars()];
    for &(v, coef) in &model.objective {
        obj[v] += coef;
    }

    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0usize;
    for var in &model.variables {
        let is_int = var.integrality != Integrality::Continuous;
        if is_int != in_int {
            let tag = if is_int { "'INTORG'" } else { "'INTEND'" };
            field_line(&mut out, "", &format!("M{marker:07}"), "'MARKER'", &format!("          {tag}"));
            marker += 1;
            in_int = is_int;
        }
        let col = var.kind.name();
        if obj[var.id] != 0.0 {
            field_line(&mut out, "", &col, OBJ_ROW, &num(obj[var.id]));
        }
        for &(r, coef) in &columns[var.id] {
            field_line(&mut out, "", &col, &model.constraints[r].name, &num(coef));
        }
        if obj[var.id] == 0.0 && columns[var.id].is_empty() {
            // Keep otherwise empty columns visible to readers.
            field_line(&mut out, "", &col, OBJ_ROW, "0");
        }
    }
    if in_int {
        field_line(&mut out, "", &format!("M{marker:07}"), "'MARKER'", "          'INTEND'");
    }

    out.push_str("RHS\n");
    for c in &model.constraints {
        if c.rhs != 0.0 {
            field_line(&mut out, "", "RHS", &c.name, &num(c.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for var in &model.variables {
        let col = var.kind.name();
        if var.lo == var.hi {
            field_line(&mut out, "FX", "BND", &col, &num(var.lo));
            continue;
        }
        if var.lo == f64::NEG_INFINITY {
            field_line(&mut out, "MI", "BND", &col, "");
        } else if var.lo != 0.0 {
            field_line(&mut out, "LO", "BND", &col, &num(var.lo));
        }
        if var.hi.is_finite() {
            field_line(&mut out, "UP", "BND", &col, &num(var.hi));
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_cost_matrix, generate_random_instance};
    use crate::model::{build_model, ModelOptions};

    #[test]
    fn skeleton_and_determinism() {
        let inst = generate_random_instance(1, &[], 1, 0).unwrap();
        let cost = build_cost_matrix(&inst).unwrap();
        let m = build_model(&inst, &cost, &ModelOptions::default()).unwrap();
        let text = export_mps(&m);
        let pos: Vec<usize> = ["ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"]
            .iter()
            .map(|s| text.find(&format!("{s}\n")).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains(" N  COST"));
        assert!(text.contains("'INTORG'") && text.contains("'INTEND'"));
        assert_eq!(text, export_mps(&m));
        // g4 fixing of the stop-start edge appears as a fixed bound.
        assert!(text.contains(" FX BND       x_0_1"));
    }

    #[test]
    fn every_row_and_column_is_written() {
        let inst = generate_random_instance(4, &[2, 1], 5, 3).unwrap();
        let cost = build_cost_matrix(&inst).unwrap();
        let m = build_model(&inst, &cost, &ModelOptions::for_instance(&inst)).unwrap();
        let text = export_mps(&m);
        let rows = text.split("COLUMNS\n").next().unwrap();
        assert_eq!(rows.lines().count(), 2 + 1 + m.constraints.len());
        for v in &m.variables {
            assert!(text.contains(&format!(" {} ", v.kind.name())), "{}", v.kind.name());
        }
        assert!(text.contains("C3_MTZ_0_1"));
        assert!(text.contains("G1_OUT_3"));
    }

    #[test]
    fn numbers_are_compact() {
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-1.0), "-1");
        assert_eq!(num(0.5), "0.5");
    }
}
