//! Minimal nonnegative solutions of small Diophantine systems, and the
//! witness test on linear sets.

use ocnsep::semilinear::{
    linear_witness_check, n_witness, solve_nonneg, DioRow, DioSystem, LinearSet, Relation, SolverBudget,
};

fn show(title: &str, rows: Vec<DioRow>) -> Result<(), Box<dyn std::error::Error>> {
    let n = rows[0].coeffs.len();
    let sol = solve_nonneg(&DioSystem::new(n, rows)?, &SolverBudget::default())?;
    println!("{title}\n  bases:   {:?}\n  periods: {:?}", sol.bases, sol.periods);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let row = |coeffs: &[i64], rel, rhs| DioRow { coeffs: coeffs.to_vec(), rel, rhs };
    show("2x = 3y", vec![row(&[2, -3], Relation::Eq, 0)])?;
    show("x + y = 2", vec![row(&[1, 1], Relation::Eq, 2)])?;
    show("x - 2y >= 1", vec![row(&[1, -2], Relation::Ge, 1)])?;
    show("x + y + z = 3, x >= z", vec![row(&[1, 1, 1], Relation::Eq, 3), row(&[1, 0, -1], Relation::Ge, 0)])?;

    // (m, m', x): both leading coordinates grow, the third is even
    let l = LinearSet::new(vec![1, 0, 2], vec![vec![1, 0, 2], vec![0, 1, 0]])?;
    println!("\n{l:?}\n  witnesses for every n: {}", linear_witness_check(&l)?);
    for n in [1, 2, 5] {
        if let Some((v, mult)) = n_witness(&l, n) {
            println!("  {n}-witness {v:?} at multiplicities {mult:?}");
        }
    }
    let odd = LinearSet::new(vec![1, 1, 1], vec![vec![1, 0, 2], vec![0, 1, 2]])?;
    println!("{odd:?}\n  witnesses for every n: {}", linear_witness_check(&odd)?);
    Ok(())
}
