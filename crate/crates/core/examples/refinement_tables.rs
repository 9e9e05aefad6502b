//! Prints the refinement tables of both manufactured examples.
//!
//! `cargo run --release -p fkac --example refinement_tables`

use fkac::harness::{coupled_study, format_tables, spatial_study, temporal_study, RateTable, TauRule};
use fkac::problems::ProblemFamily;
use fkac::SchemeOrder;

fn main() -> fkac::Result<()> {
    let alphas = [0.2, 0.5, 0.8];
    let q = SchemeOrder::new;
    let taus = [0.1, 0.05, 0.025, 0.0125, 1.0 / 160.0];
    let ex1 = ProblemFamily::Example1;
    let ex2 = ProblemFamily::Example2;

    let inv = |steps: &[u32]| steps.iter().map(|&s| 1.0 / s as f64).collect::<Vec<f64>>();
    let spatial = |family: &ProblemFamily, order: usize, steps: &[u32]| -> fkac::Result<Vec<RateTable>> {
        let order = q(order)?;
        spatial_study(family, order, &alphas, &inv(steps), TauRule::balanced(order))
    };

    let studies: Vec<(&str, Vec<RateTable>)> = vec![
        ("example 1", temporal_study(&ex1, q(1)?, &alphas, 1e-3, &taus[..4])?),
        ("example 1", spatial(&ex1, 1, &[2, 4, 8, 10])?),
        ("example 1", spatial(&ex1, 2, &[10, 20, 40, 80])?),
        ("example 1", temporal_study(&ex1, q(3)?, &alphas, 1e-3, &taus)?),
        ("example 2", temporal_study(&ex2, q(1)?, &alphas, 1e-3, &taus[..4])?),
        ("example 2", spatial(&ex2, 1, &[2, 4, 8, 10])?),
        ("example 2", temporal_study(&ex2, q(2)?, &alphas, 1e-3, &taus)?),
        ("example 2", spatial(&ex2, 2, &[10, 20, 40, 80])?),
        ("example 2", temporal_study(&ex2, q(3)?, &alphas, 1e-3, &taus)?),
        ("example 2", spatial(&ex2, 3, &[8, 16, 32, 64, 128])?),
        ("example 2", coupled_study(&ex2, q(4)?, &alphas, &inv(&[10, 20, 40, 80, 160]), TauRule { c: 1.0, p: 1.0 })?),
    ];
    for (name, tables) in studies {
        println!("== {name}");
        print!("{}", format_tables(&tables));
    }
    Ok(())
}
