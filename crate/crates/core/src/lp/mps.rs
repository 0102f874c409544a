//! Free-format MPS export.
//!
//! Layout: `NAME`, `ROWS` (objective row `COST` first, then `L`/`E`/`G`
//! rows named `R<k>`), `COLUMNS` (one `var row value` triple per line,
//! grouped by variable and emitted in variable order), `RHS`, `BOUNDS`
//! (`LO`/`UP`/`PL` per variable), `ENDATA`. Variables are named `X<k>`, so
//! files load into any MPS reader regardless of the LP's own labels.

use std::fmt::Write as _;

use super::{LinearProgram, Relation};

pub fn write_mps(lp: &LinearProgram, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {name}");
    out.push_str("ROWS\n N COST\n");
    for (r, row) in lp.rows.iter().enumerate() {
        let tag = match row.relation {
            Relation::Le => 'L',
            Relation::Eq => 'E',
            Relation::Ge => 'G',
        };
        let _ = writeln!(out, " {tag} R{r}");
    }

    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_vars()];
    for (r, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            columns[j].push((r, a));
        }
    }
    out.push_str("COLUMNS\n");
    for (j, col) in columns.iter().enumerate() {
        if lp.cost[j] != 0.0 {
            let _ = writeln!(out, " X{j} COST {:e}", lp.cost[j]);
        }
        for &(r, a) in col {
            let _ = writeln!(out, " X{j} R{r} {a:e}");
        }
    }
    out.push_str("RHS\n");
    for (r, row) in lp.rows.iter().enumerate() {
        if row.rhs != 0.0 {
            let _ = writeln!(out, " RHS R{r} {:e}", row.rhs);
        }
    }
    out.push_str("BOUNDS\n");
    for j in 0..lp.num_vars() {
        if lp.lower[j] != 0.0 {
            let _ = writeln!(out, " LO BND X{j} {:e}", lp.lower[j]);
        }
        if lp.upper[j].is_finite() {
            let _ = writeln!(out, " UP BND X{j} {:e}", lp.upper[j]);
        }
    }
    out.push_str("ENDATA\n");
    out
}
