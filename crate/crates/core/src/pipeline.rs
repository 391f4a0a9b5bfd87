//! One-shot construction of every canonical object for a Lagrangian on a
//! lattice, in dependency order.

use std::sync::Arc;

use crate::dconn::{canonical_dconnection, DConnection, SasakiMetric};
use crate::error::Result;
use crate::frac::Lattice;
use crate::kahler::{build_almost_complex, AlmostComplex};
use crate::lagrange::{
    hessian_metric_with_tolerance, semi_spray, HessianMetric, Lagrangian, SemiSpray,
};
use crate::nconn::{canonical_nconnection, nonholonomy, AdaptedFrame, NonholonomyData};

/// Nodes at least this many cells away from either end of every axis count
/// as interior.
pub const INTERIOR_MARGIN: usize = 2;

#[derive(Debug, Clone)]
pub struct CanonicalGeometry {
    pub lagrangian: Lagrangian,
    pub lattice: Arc<Lattice>,
    pub metric: Arc<HessianMetric>,
    pub spray: SemiSpray,
    pub frame: AdaptedFrame,
    pub nonholonomy: NonholonomyData,
    pub dconnection: DConnection,
    pub sasaki: SasakiMetric,
    pub complex: AlmostComplex,
}

impl CanonicalGeometry {
    pub fn build(
        lagrangian: &Lagrangian,
        lattice: &Arc<Lattice>,
        regularity_tolerance: f64,
    ) -> Result<Self> {
        let metric = Arc::new(hessian_metric_with_tolerance(
            lagrangian,
            lattice,
            regularity_tolerance,
        )?);
        let spray = semi_spray(lagrangian, &metric)?;
        let nconn = canonical_nconnection(&spray, lattice, lagrangian.alpha())?;
        let frame = AdaptedFrame::new(Arc::new(nconn));
        let nonholonomy = nonholonomy(&frame)?;
        let dconnection = canonical_dconnection(&metric, &frame)?;
        Ok(Self {
            lagrangian: lagrangian.clone(),
            lattice: lattice.clone(),
            sasaki: SasakiMetric::new(metric.clone()),
            complex: build_almost_complex(&frame),
            metric,
            spray,
            frame,
            nonholonomy,
            dconnection,
        })
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        self.lattice.interior_nodes(INTERIOR_MARGIN)
    }
}
