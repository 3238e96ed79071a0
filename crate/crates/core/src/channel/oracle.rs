use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::model::{ModelParams, ParticleOperator};
use crate::single_atom::{propagate_oracle, AtomGibbs, JointDensityMatrix};
use crate::Result;

/// `L_α(A)` straight from its definition: `A ⊗ ρ_β^{1−α}`, exact block
/// propagation over `τ`, left multiplication by `1 ⊗ ρ_β^α`, partial trace.
pub fn channel_oracle(op: &ParticleOperator, alpha: f64, params: &ModelParams) -> Result<ParticleOperator> {
    let gibbs = AtomGibbs::new(params);
    let to_complex = |m: Matrix2<f64>| m.map(|v| Complex64::new(v, 0.0));
    let joint = JointDensityMatrix::product(op, &to_complex(gibbs.power(1.0 - alpha)));
    let evolved = propagate_oracle(&joint, params.tau, params)?;
    let left = gibbs.power(alpha);
    // Tr_atom[(1 ⊗ D) M] = D_00 M_00 + D_11 M_11 for diagonal D.
    let mut out = evolved.block(0, 0).scale(Complex64::new(left[(0, 0)], 0.0));
    *out.coeffs_mut() += evolved.block(1, 1).coeffs() * Complex64::new(left[(1, 1)], 0.0);
    Ok(out)
}
