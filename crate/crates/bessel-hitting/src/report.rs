//! CSV and JSON encodings of experiment tables.
//!
//! Both encodings carry the full metadata record ahead of the data and both
//! preserve every f64 bit-exactly: CSV prints 17 significant digits (the
//! shortest width that always round-trips a double), JSON uses serde_json's
//! shortest-round-trip formatting. The same table therefore decodes to
//! identical numeric values from either format.

use std::fmt::Write as _;

use crate::experiment::Table;

/// 17-significant-digit scientific notation; round-trips every f64.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with `# key = value` metadata lines, then a header row, then data.
pub fn to_csv(table: &Table) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# artifact = {}", table.meta.artifact);
    let _ = writeln!(out, "# experiment = {}", table.meta.experiment);
    let _ = writeln!(out, "# seed = {}", table.meta.seed);
    for (key, value) in &table.meta.config {
        let _ = writeln!(out, "# {key} = {value}");
    }
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Pretty-printed JSON of the whole table (meta, columns, rows).
pub fn to_json(table: &Table) -> String {
    serde_json::to_string_pretty(table).expect("tables are plain data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{RunMeta, Table};

    fn gnarly_table() -> Table {
        Table {
            meta: RunMeta {
                artifact: "bessel-hitting test".into(),
                experiment: "unit".into(),
                seed: 99,
                config: vec![("gamma".into(), "0.95".into())],
            },
            columns: vec!["a".into(), "b".into(), "c".into()],
            rows: vec![
                vec![0.1, 1.0 / 3.0, 1e-300],
                vec![-123456.789e12, 2.0_f64.powi(-52), std::f64::consts::PI],
            ],
        }
    }

    #[test]
    fn csv_and_json_round_trip_to_identical_bits() {
        let table = gnarly_table();
        let csv = to_csv(&table);
        let json = to_json(&table);

        let csv_rows: Vec<Vec<f64>> = csv
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("a,"))
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let json_rows: Vec<Vec<f64>> = parsed["rows"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect())
            .collect();

        for (i, row) in table.rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(v.to_bits(), csv_rows[i][j].to_bits(), "csv cell ({i},{j})");
                assert_eq!(v.to_bits(), json_rows[i][j].to_bits(), "json cell ({i},{j})");
            }
        }
    }

    #[test]
    fn csv_carries_metadata_then_header() {
        let csv = to_csv(&gnarly_table());
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# artifact ="));
        assert!(csv.lines().any(|l| l == "# seed = 99"));
        assert!(csv.lines().any(|l| l == "# gamma = 0.95"));
        assert!(csv.lines().any(|l| l == "a,b,c"));
    }

    #[test]
    fn experiment_tables_encode_identically_across_formats() {
        let cfg = crate::experiment::ExperimentConfig {
            deltas: vec![2.5],
            replications: 50,
            seed: 5,
            ..Default::default()
        };
        let table = crate::experiment::run_steps_vs_dim(&cfg).unwrap();
        let csv1 = to_csv(&table);
        let csv2 = to_csv(&crate::experiment::run_steps_vs_dim(&cfg).unwrap());
        assert_eq!(csv1, csv2, "table encoding is not reproducible");
    }
}
