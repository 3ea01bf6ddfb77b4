//! Writes the bundled synthetic benchmark suite into a directory.
//!
//! cargo run -p maintix-core --example gen_suite -- crates/cli/data

use std::path::PathBuf;

use maintix::synthetic::{change_table, nasa_table, table_to_arff, table_to_csv};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("change_a.csv"), table_to_csv(&change_table(40, 1)))?;
    std::fs::write(dir.join("change_b.csv"), table_to_csv(&change_table(71, 2)))?;
    let mut modules = nasa_table(200, 3);
    modules.name = "modules".into();
    std::fs::write(dir.join("modules.arff"), table_to_arff(&modules))?;
    Ok(())
}
