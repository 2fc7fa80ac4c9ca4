//! Runs the kernel recurrence over formal factors and lists the diagrams of
//! each kernel term; their number follows the Catalan numbers.

use smatpi::combinatorics::{catalan, catalan_triangle};
use smatpi::kernels::symbolic::{kernel_expansion, Factor};

fn show(monomial: &[Factor]) -> String {
    monomial
        .iter()
        .filter(|f| !matches!(f, Factor::A(_)))
        .map(|f| match f {
            Factor::F(a, b) => format!("F{a}{b}"),
            Factor::Shaded(a, b) => format!("(F{a}{b}-1)"),
            Factor::A(_) => unreachable!(),
        })
        .collect::<Vec<_>>()
        .join("·")
}

fn main() -> smatpi::Result<()> {
    for k in 2..=4 {
        println!("M({k},0) = A-chain × [");
        for (m, c) in kernel_expansion(k).total.terms() {
            println!("    {c:+} {}", show(m));
        }
        println!("]");
    }
    println!("\n  k   terms   C_(k-1)   by last-column box");
    for k in 2..=8u32 {
        let e = kernel_expansion(k as usize);
        let cols: Vec<String> = e
            .by_column
            .iter()
            .enumerate()
            .map(|(j, c)| {
                format!(
                    "{}/{}",
                    c.term_count(),
                    catalan_triangle(k - 2, j as u32).unwrap()
                )
            })
            .collect();
        println!(
            "{k:>3}  {:>6}  {:>8}   {}",
            e.total.term_count(),
            catalan(k - 1)?,
            cols.join(" ")
        );
    }
    Ok(())
}
