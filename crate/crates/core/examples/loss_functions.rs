//! Point-forecast losses per tenor: MAE, ME, MASE, the asymmetric MME pair
//! and directional accuracy.

use curvecast::evaluation::{mae, mase, mase_denominators, mcpdc, me, mme, MmeMode, SignTieRule};
use nalgebra::DMatrix;

fn main() -> curvecast::Result<()> {
    let realized = DMatrix::from_row_slice(4, 2, &[0.010, -0.004, -0.020, 0.006, 0.004, 0.0, 0.015, -0.010]);
    let forecast = DMatrix::from_row_slice(4, 2, &[0.006, -0.001, -0.012, 0.002, -0.002, 0.001, 0.010, -0.004]);
    let errors = &realized - &forecast;

    // the scale comes from the one-step changes of an in-sample series
    let history = DMatrix::from_row_slice(5, 2, &[0.01, 0.00, -0.01, 0.01, 0.02, -0.01, 0.00, 0.00, 0.01, 0.02]);
    let tenors = vec!["CL1".to_string(), "CL2".to_string()];
    let scale = mase_denominators(&history, &tenors)?;

    let rows = [
        ("MAE", mae(&errors)?),
        ("ME", me(&errors)?),
        ("MASE", mase(&errors, &scale)?),
        ("MME(U)", mme(&errors, MmeMode::Under)?),
        ("MME(O)", mme(&errors, MmeMode::Over)?),
        ("MCPDC", mcpdc(&forecast, &realized, SignTieRule::default())?),
    ];
    println!("{:>7} {:>9} {:>9} {:>9}", "", "CL1", "CL2", "Overall");
    for (name, s) in rows {
        println!("{:>7} {:>9.5} {:>9.5} {:>9.5}", name, s.per_tenor[0], s.per_tenor[1], s.overall);
    }
    Ok(())
}
