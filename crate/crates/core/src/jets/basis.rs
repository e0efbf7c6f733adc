//! The q-harmonic polynomial basis: one integral-equation solve per
//! harmonic incident. At q = 0 every member collapses to its incident.

use std::sync::Arc;

use crate::error::Result;
use crate::jets::solid_harmonics;
use crate::lse::{solve_field, FieldSolution, Incident, KernelOperator};

#[derive(Clone)]
pub struct QHarmonicBasis {
    pub degree: usize,
    fields: Vec<FieldSolution>,
}

/// Solve for all (L+1)^2 members; the LU factorization is shared across
/// the incidents.
pub fn q_harmonic_basis(op: &Arc<KernelOperator>, degree: usize) -> Result<QHarmonicBasis> {
    let harmonics = solid_harmonics(degree)?;
    let fields = harmonics
        .members()
        .iter()
        .map(|p| solve_field(op, Incident::Polynomial(p.clone())))
        .collect::<Result<Vec<_>>>()?;
    Ok(QHarmonicBasis { degree, fields })
}

impl QHarmonicBasis {
    pub fn fields(&self) -> &[FieldSolution] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn kernel(&self) -> &Arc<KernelOperator> {
        self.fields[0].kernel()
    }
}
