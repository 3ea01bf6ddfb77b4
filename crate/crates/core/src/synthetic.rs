//! Seeded synthetic datasets: Friedman #1 with extra noise columns, a
//! CHANGE-style class-metrics table and a NASA-style module-metrics table.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::ingest::{Cell, Column, ColumnKind, Dataset, RawTable, TargetKind};
use crate::matrix::Matrix;
use crate::rng::SeedStream;

fn normal(rng: &mut crate::rng::Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Friedman #1: `10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5 + noise`
/// over uniform features, followed by `noise_features` irrelevant columns.
pub fn friedman(n: usize, noise_features: usize, noise_sd: f64, seed: u64) -> Dataset {
    let p = 5 + noise_features;
    let mut rng = SeedStream::new(seed).child("friedman").rng();
    let mut x = Matrix::zeros(n, p);
    let mut y = Vec::with_capacity(n);
    for r in 0..n {
        for c in 0..p {
            x.set(r, c, rng.gen::<f64>());
        }
        let v = |c: usize| x.get(r, c);
        let signal = 10.0 * (PI * v(0) * v(1)).sin() + 20.0 * (v(2) - 0.5).powi(2) + 10.0 * v(3) + 5.0 * v(4);
        y.push(signal + noise_sd * normal(&mut rng));
    }
    let names = (0..p)
        .map(|c| if c < 5 { format!("x{}", c + 1) } else { format!("noise{}", c - 4) })
        .collect();
    Dataset::from_parts(format!("friedman{n}"), x, names, y, TargetKind::Change)
}

/// The GA benchmark: 5 informative and 15 noise features.
pub fn ga_benchmark(n: usize, seed: u64) -> Dataset {
    friedman(n, 15, 1.0, seed)
}

/// Object-oriented class metrics with a CHANGE target (lines changed).
/// Column names follow the Li and Henry metric suite.
pub fn change_table(n: usize, seed: u64) -> RawTable {
    let mut rng = SeedStream::new(seed).child("change").rng();
    let names = ["DIT", "NOC", "MPC", "RFC", "LCOM", "DAC", "WMC", "NOM", "SIZE1", "SIZE2", "CHANGE"];
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let dit = rng.gen_range(0..6) as f64;
        let noc = if rng.gen_bool(0.7) { 0.0 } else { rng.gen_range(1..8) as f64 };
        let nom = rng.gen_range(2..40) as f64;
        let wmc = (nom * rng.gen_range(1.0..3.0)).round();
        let mpc = (nom * rng.gen_range(0.5..4.0)).round();
        let rfc = nom + mpc;
        let lcom = (nom * nom * rng.gen_range(0.0..0.5)).round();
        let dac = rng.gen_range(0..6) as f64;
        let size2 = nom + rng.gen_range(1..25) as f64;
        let size1 = (wmc * rng.gen_range(5.0..12.0) + size2).round();
        let change = (0.25 * size1 + 1.5 * wmc + 0.8 * mpc - 2.0 * dit + 4.0 * normal(&mut rng))
            .max(0.0)
            .round();
        let vals = [dit, noc, mpc, rfc, lcom, dac, wmc, nom, size1, size2, change];
        rows.push(vals.iter().map(|&v| Cell::Number(v)).collect());
    }
    RawTable {
        name: format!("change{n}"),
        columns: names
            .iter()
            .map(|s| Column {
                name: s.to_string(),
                kind: ColumnKind::Numeric,
            })
            .collect(),
        rows,
    }
}

/// Module-level static metrics in the PROMISE NASA layout, including the
/// Halstead volume, cyclomatic complexity and LOC columns an MI target is
/// computed from, and a nominal defect label.
pub fn nasa_table(n: usize, seed: u64) -> RawTable {
    let mut rng = SeedStream::new(seed).child("nasa").rng();
    let names = [
        "LOC_BLANK",
        "BRANCH_COUNT",
        "LOC_CODE_AND_COMMENT",
        "LOC_COMMENTS",
        "CYCLOMATIC_COMPLEXITY",
        "DESIGN_COMPLEXITY",
        "ESSENTIAL_COMPLEXITY",
        "LOC_EXECUTABLE",
        "HALSTEAD_CONTENT",
        "HALSTEAD_DIFFICULTY",
        "HALSTEAD_EFFORT",
        "HALSTEAD_LENGTH",
        "HALSTEAD_VOLUME",
        "NUM_OPERANDS",
        "NUM_OPERATORS",
        "NUM_UNIQUE_OPERANDS",
        "NUM_UNIQUE_OPERATORS",
        "LOC_TOTAL",
    ];
    let mut columns: Vec<Column> = names
        .iter()
        .map(|s| Column {
            name: s.to_string(),
            kind: ColumnKind::Numeric,
        })
        .collect();
    columns.push(Column {
        name: "defects".into(),
        kind: ColumnKind::Nominal(vec!["false".into(), "true".into()]),
    });
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let loc_exec = (rng.gen::<f64>().powi(2) * 180.0 + 3.0).round();
        let cc = (1.0 + loc_exec / rng.gen_range(6.0..14.0)).round();
        let u_ops = rng.gen_range(5..30) as f64;
        let u_opnds = (3.0 + loc_exec * rng.gen_range(0.2..0.8)).round();
        let n_ops = (loc_exec * rng.gen_range(2.0..4.0)).round();
        let n_opnds = (loc_exec * rng.gen_range(1.5..3.0)).round();
        let length = n_ops + n_opnds;
        let volume = length * (u_ops + u_opnds).log2();
        let difficulty = u_ops / 2.0 * n_opnds / u_opnds;
        let effort = difficulty * volume;
        let content = volume / difficulty;
        let comments = (loc_exec * rng.gen_range(0.0..0.4)).round();
        let blank = (loc_exec * rng.gen_range(0.05..0.2)).round();
        let code_comment = rng.gen_range(0..3) as f64;
        let total = loc_exec + comments + blank + code_comment;
        let ess = (cc * rng.gen_range(0.1..0.6)).round().max(1.0);
        let design = (cc * rng.gen_range(0.4..0.9)).round().max(1.0);
        let branch = 2.0 * (cc - 1.0);
        let vals = [
            blank,
            branch,
            code_comment,
            comments,
            cc,
            design,
            ess,
            loc_exec,
            content,
            difficulty,
            effort,
            length,
            volume,
            n_opnds,
            n_ops,
            u_opnds,
            u_ops,
            total,
        ];
        let mut row: Vec<Cell> = vals.iter().map(|&v| Cell::Number(v)).collect();
        let defect = rng.gen_bool((cc / 40.0).min(0.8));
        row.push(Cell::Label(if defect { "true" } else { "false" }.into()));
        rows.push(row);
    }
    RawTable {
        name: format!("nasa{n}"),
        columns,
        rows,
    }
}

fn cell_text(c: &Cell) -> String {
    match c {
        Cell::Number(v) => {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                format!("{}", *v as i64)
            } else {
                format!("{v:.6}")
            }
        }
        Cell::Label(s) => s.clone(),
        Cell::Missing => "?".into(),
    }
}

pub fn table_to_csv(t: &RawTable) -> String {
    let mut s = t.columns.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",");
    s.push('\n');
    for row in &t.rows {
        s.push_str(&row.iter().map(cell_text).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

pub fn table_to_arff(t: &RawTable) -> String {
    let mut s = format!("@relation {}\n\n", t.name);
    for c in &t.columns {
        match &c.kind {
            ColumnKind::Numeric => {
                let _ = writeln!(s, "@attribute {} numeric", c.name);
            }
            ColumnKind::Nominal(vals) => {
                let _ = writeln!(s, "@attribute {} {{{}}}", c.name, vals.join(","));
            }
        }
    }
    s.push_str("\n@data\n");
    for row in &t.rows {
        s.push_str(&row.iter().map(cell_text).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

/// Dataset view of a numeric raw table whose last column is the target.
pub fn dataset_from_table(t: &RawTable) -> Dataset {
    let p = t.n_cols() - 1;
    let n = t.n_rows();
    let mut x = Matrix::zeros(n, p);
    let mut y = Vec::with_capacity(n);
    for (r, row) in t.rows.iter().enumerate() {
        for c in 0..p {
            x.set(r, c, row[c].as_number().unwrap_or(f64::NAN));
        }
        y.push(row[p].as_number().unwrap_or(f64::NAN));
    }
    let names = t.columns[..p].iter().map(|c| c.name.clone()).collect();
    Dataset::from_parts(t.name.clone(), x, names, y, TargetKind::Change)
}
