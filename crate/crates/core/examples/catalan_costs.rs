//! Dyck-path bookkeeping behind the direct kernel expansion, and how its
//! cost compares with the tree traversal.

use smatpi::combinatorics::{
    area_cost, catalan, catalan_triangle, enumerate_dyck_paths, s_total, s_triangle_row,
    smatpi_cost_estimate, tsmatpi_cost_model,
};

fn main() -> smatpi::Result<()> {
    println!("Dyck paths of size 3 and their area costs:");
    for p in enumerate_dyck_paths(3)? {
        println!("  {p}  cost {}", area_cost(&p));
    }

    println!("\nCatalan's triangle T(n, k):");
    for n in 0..=6 {
        let row: Vec<String> = (0..=n)
            .map(|k| catalan_triangle(n, k).map(|t| t.to_string()))
            .collect::<Result<_, _>>()?;
        println!(
            "  n={n}: {}  (C_{} = {})",
            row.join(" "),
            n + 1,
            catalan(n + 1)?
        );
    }

    println!("\nArea triangle S(n, k) and its row sums S_(n+1):");
    for n in 1..=6 {
        let row = s_triangle_row(n)?;
        println!(
            "  n={n}: {row:?}  sum {} = S_{} = {}",
            row.iter().sum::<u64>(),
            n + 1,
            s_total(n + 1)?
        );
    }

    println!("\n  dk   direct expansion   tree traversal");
    for dk in [4u32, 6, 8, 10, 12, 14] {
        println!(
            "  {dk:>2}   {:>16}   {:>14}",
            smatpi_cost_estimate(dk)?,
            tsmatpi_cost_model(dk)?
        );
    }
    Ok(())
}
