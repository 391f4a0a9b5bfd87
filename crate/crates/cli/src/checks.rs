//! Named verification checks behind a common trait, selected at runtime.

use std::cell::OnceCell;

use frakgeo_core::dconn::{
    metricity_residual, structure_equation_residuals, torsion_forms, TorsionForms,
};
use frakgeo_core::frac::{worse, FractionalOrder, GridField, PowerField, Scalar};
use frakgeo_core::kahler::{
    cartan_forms, closure_checks, compatibility_check, finsler_mode, probe_residual, SymplecticData,
};
use frakgeo_core::lagrange::{contract_spray, grid_hessian, grid_spray, grid_spray_brackets};
use frakgeo_core::nconn::commutator_residual;
use frakgeo_core::pipeline::CanonicalGeometry;
use frakgeo_core::special::gamma;
use frakgeo_core::Result;

use crate::config::Job;
use crate::report::{CheckRecord, Severity};

/// Everything a check may read, with expensive shared pieces built on first
/// use.
pub struct CheckContext<'a> {
    pub job: &'a Job,
    pub alpha: FractionalOrder,
    pub geometry: &'a CanonicalGeometry,
    pub nodes: Vec<usize>,
    pub symbolic_capable: bool,
    symplectic: OnceCell<SymplecticData>,
    torsion: OnceCell<TorsionForms>,
    lattice_spray: OnceCell<Vec<GridField>>,
}

impl<'a> CheckContext<'a> {
    pub fn new(job: &'a Job, geometry: &'a CanonicalGeometry, symbolic_capable: bool) -> Self {
        Self {
            job,
            alpha: geometry.lagrangian.alpha(),
            geometry,
            nodes: geometry.interior_nodes(),
            symbolic_capable,
            symplectic: OnceCell::new(),
            torsion: OnceCell::new(),
            lattice_spray: OnceCell::new(),
        }
    }

    pub fn symbolic_tolerance(&self) -> f64 {
        self.job.tolerances.symbolic
    }

    /// Tolerance for results that depend on lattice derivatives.
    pub fn grid_tolerance(&self) -> f64 {
        if self.alpha.is_integer() {
            self.job.tolerances.grid
        } else {
            self.job.tolerances.fractional
        }
    }

    /// Identities that need the Leibniz rule hold exactly at fractional
    /// order only when the N-connection vanishes identically.
    pub fn leibniz_severity(&self) -> Severity {
        if self.symbolic_capable {
            Severity::Hard
        } else {
            Severity::SoftWhenFractional
        }
    }

    pub fn record(
        &self,
        name: &str,
        residual: f64,
        tolerance: f64,
        severity: Severity,
        detail: impl Into<String>,
    ) -> CheckRecord {
        CheckRecord::measured(
            name,
            self.alpha.value(),
            residual,
            tolerance,
            severity,
            self.nodes.len(),
            detail,
        )
    }

    fn symplectic(&self) -> Result<&SymplecticData> {
        if let Some(sd) = self.symplectic.get() {
            return Ok(sd);
        }
        let g = self.geometry;
        let sd = cartan_forms(&g.lagrangian, &g.metric, &g.frame)?;
        Ok(self.symplectic.get_or_init(|| sd))
    }

    fn torsion(&self) -> Result<&TorsionForms> {
        if let Some(t) = self.torsion.get() {
            return Ok(t);
        }
        let g = self.geometry;
        let t = torsion_forms(&g.dconnection, &g.frame, &g.nonholonomy)?;
        Ok(self.torsion.get_or_init(|| t))
    }

    fn lattice_spray(&self) -> Result<&[GridField]> {
        if let Some(s) = self.lattice_spray.get() {
            return Ok(s);
        }
        let s = grid_spray(&self.geometry.lagrangian, &self.geometry.lattice)?;
        Ok(self.lattice_spray.get_or_init(|| s))
    }

    fn max_diff(&self, a: &Scalar, b: &Scalar) -> Result<f64> {
        a.sub(b)?.max_abs_over(&self.geometry.lattice, &self.nodes)
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>>;
}

/// Checks in dependency order, looked up by name.
pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { checks: Vec::new() }
    }

    pub fn register(&mut self, check: Box<dyn Check>) {
        self.checks.retain(|c| c.name() != check.name());
        self.checks.push(check);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.iter().map(|c| c.name())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Check> {
        self.checks.iter().map(|c| c.as_ref())
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(HessianCheck));
        r.register(Box::new(SprayCheck));
        r.register(Box::new(NConnectionCheck));
        r.register(Box::new(DConnectionCheck));
        r.register(Box::new(TorsionCheck));
        r.register(Box::new(StructureCheck));
        r.register(Box::new(SymplecticCheck));
        r.register(Box::new(CompatibilityCheck));
        r.register(Box::new(FinslerCheck));
        r
    }
}

pub struct HessianCheck;

impl Check for HessianCheck {
    fn name(&self) -> &'static str {
        "hessian"
    }

    fn description(&self) -> &'static str {
        "symmetry and lattice inverse of the Hessian metric, power rule vs lattice derivatives"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let g = ctx.geometry;
        let metric = &g.metric;
        let n = metric.n();
        let det = format!("min |det g| = {:.6e}", metric.det_min());
        let lattice_g = grid_hessian(&g.lagrangian, &g.lattice)?;
        let mut route: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                route = worse(
                    route,
                    lattice_g[i][j]
                        .sub(metric.lower_grid(i, j))?
                        .max_abs_over(&ctx.nodes),
                );
            }
        }
        Ok(vec![
            ctx.record(
                "hessian/inverse",
                metric.inverse_residual(),
                ctx.symbolic_tolerance(),
                Severity::Hard,
                det,
            ),
            ctx.record(
                "hessian/symmetry",
                metric.symmetry_defect(),
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "",
            ),
            ctx.record(
                "hessian/lattice_route",
                route,
                ctx.grid_tolerance(),
                Severity::SoftWhenFractional,
                "power rule vs lattice derivatives of the sampled density",
            ),
        ])
    }
}

pub struct SprayCheck;

impl Check for SprayCheck {
    fn name(&self) -> &'static str {
        "spray"
    }

    fn description(&self) -> &'static str {
        "semi-spray from symbolic brackets vs a purely lattice-derived spray"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let spray = &ctx.geometry.spray;
        let lattice = ctx.lattice_spray()?;
        let mut worst: f64 = 0.0;
        for (k, gk) in lattice.iter().enumerate() {
            worst = worse(
                worst,
                ctx.max_diff(spray.coeff(k), &Scalar::Grid(gk.clone()))?,
            );
        }
        Ok(vec![ctx.record(
            "spray/lattice_route",
            worst,
            ctx.grid_tolerance(),
            Severity::SoftWhenFractional,
            "",
        )])
    }
}

pub struct NConnectionCheck;

impl Check for NConnectionCheck {
    fn name(&self) -> &'static str {
        "nconnection"
    }

    fn description(&self) -> &'static str {
        "frame/coframe duality, lattice-route N-connection, frame commutators"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let g = ctx.geometry;
        let n = g.frame.n();
        let chart = g.lattice.chart().clone();
        let nc = g.frame.nconnection();
        let duality = g.frame.duality_residual(&ctx.nodes)?;

        // lattice brackets against the regular metric: the lattice Hessian
        // degenerates on the velocity terminal face at fractional order
        let brackets: Vec<Scalar> = grid_spray_brackets(&g.lagrangian, &g.lattice)?
            .into_iter()
            .map(Scalar::Grid)
            .collect();
        let lattice_spray = contract_spray(&g.metric, &brackets)?;
        let mut route: f64 = 0.0;
        for (a, ga) in lattice_spray.iter().enumerate() {
            let ga = ga.to_grid(&g.lattice)?;
            for j in 0..n {
                let nj = ga.caputo_partial(chart.y_axis(j), ctx.alpha)?;
                route = worse(route, ctx.max_diff(nc.coeff(a, j), &Scalar::Grid(nj))?);
            }
        }

        let mut exps = vec![0.0; chart.dim()];
        exps[chart.x_axis(0)] = 1.0;
        exps[chart.y_axis(n - 1)] = 1.0;
        let probe = PowerField::monomial(chart.clone(), 1.0, exps)?;
        let commutator = commutator_residual(&g.frame, &g.nonholonomy, &probe, &ctx.nodes)?;

        Ok(vec![
            ctx.record(
                "nconnection/duality",
                duality,
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "",
            ),
            ctx.record(
                "nconnection/lattice_route",
                route,
                ctx.grid_tolerance(),
                Severity::SoftWhenFractional,
                format!("max |N| = {:.6e}", nc.max_abs_over(&ctx.nodes)?),
            ),
            ctx.record(
                "nconnection/commutator",
                commutator,
                ctx.grid_tolerance(),
                ctx.leibniz_severity(),
                format!("probe {probe}"),
            ),
        ])
    }
}

pub struct DConnectionCheck;

impl Check for DConnectionCheck {
    fn name(&self) -> &'static str {
        "dconnection"
    }

    fn description(&self) -> &'static str {
        "index symmetry and metricity of the canonical d-connection"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let g = ctx.geometry;
        let sym = g.dconnection.symmetry_defect(&g.lattice, &ctx.nodes)?;
        let m = metricity_residual(&g.dconnection, &g.sasaki, &g.frame, &ctx.nodes)?;
        Ok(vec![
            ctx.record(
                "dconnection/symmetry",
                sym,
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "",
            ),
            ctx.record(
                "dconnection/metricity",
                m.max(),
                ctx.symbolic_tolerance(),
                Severity::Hard,
                format!(
                    "hh {:.3e}, vh {:.3e}, hv {:.3e}, vv {:.3e}",
                    m.hh, m.vh, m.hv, m.vv
                ),
            ),
        ])
    }
}

pub struct TorsionCheck;

impl Check for TorsionCheck {
    fn name(&self) -> &'static str {
        "torsion"
    }

    fn description(&self) -> &'static str {
        "shape of the torsion 2-forms and frame commutators on velocity coordinates"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let g = ctx.geometry;
        let n = g.frame.n();
        let chart = g.lattice.chart().clone();
        let t = ctx.torsion()?;
        let mut pure: f64 = 0.0;
        for form in &t.horizontal {
            for (idx, c) in form.components() {
                if idx.iter().all(|&i| i < n) {
                    pure = worse(pure, c.max_abs_over(&g.lattice, &ctx.nodes)?);
                }
            }
        }
        // yᵅ/Γ(α+1) has unit Caputo derivative, so [e_i, e_j] of it is −Ω^a_{ij}
        let a_val = ctx.alpha.value();
        let scale = 1.0 / gamma(a_val + 1.0)?;
        let mut omega: f64 = 0.0;
        for a in 0..n {
            let mut exps = vec![0.0; chart.dim()];
            exps[chart.y_axis(a)] = a_val;
            let y = Scalar::Power(PowerField::monomial(chart.clone(), scale, exps)?);
            let first = g.frame.apply_all(&y)?;
            for i in 0..n {
                for j in (i + 1)..n {
                    let ij = g.frame.apply(i, &first[j])?;
                    let ji = g.frame.apply(j, &first[i])?;
                    let bracket = ij.sub(&ji)?;
                    omega = worse(
                        omega,
                        ctx.max_diff(&bracket, &g.nonholonomy.omega(a, i, j).scale(-1.0))?,
                    );
                }
            }
        }
        Ok(vec![
            ctx.record(
                "torsion/horizontal_pure",
                pure,
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "",
            ),
            ctx.record(
                "torsion/omega_commutator",
                omega,
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "",
            ),
        ])
    }
}

pub struct StructureCheck;

impl Check for StructureCheck {
    fn name(&self) -> &'static str {
        "structure"
    }

    fn description(&self) -> &'static str {
        "first two structure equations against the torsion forms; curvature 2-forms"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let g = ctx.geometry;
        let t = ctx.torsion()?;
        let (h, v, curvature) =
            structure_equation_residuals(&g.dconnection, &g.frame, t, &ctx.nodes)?;
        let detail = format!(
            "max |R| = {:.6e}",
            curvature.max_abs_over(&g.lattice, &ctx.nodes)?
        );
        Ok(vec![
            ctx.record(
                "structure/horizontal",
                h,
                ctx.grid_tolerance(),
                ctx.leibniz_severity(),
                detail.clone(),
            ),
            ctx.record(
                "structure/vertical",
                v,
                ctx.grid_tolerance(),
                ctx.leibniz_severity(),
                detail,
            ),
        ])
    }
}

pub struct SymplecticCheck;

impl Check for SymplecticCheck {
    fn name(&self) -> &'static str {
        "symplectic"
    }

    fn description(&self) -> &'static str {
        "theta(X,Y) = g(JX,Y), d(omega) = theta, d(theta) = 0 and its three identities"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let g = ctx.geometry;
        let sd = ctx.symplectic()?;
        let probe = probe_residual(
            sd,
            &g.sasaki,
            &g.complex,
            &g.lattice,
            &ctx.nodes,
            ctx.job.seed,
            20,
            100,
        )?;
        let c = closure_checks(sd, &g.metric, &g.frame, &g.nonholonomy, &ctx.nodes)?;
        let (tol, sev) = (ctx.grid_tolerance(), ctx.leibniz_severity());
        Ok(vec![
            ctx.record(
                "symplectic/probe",
                probe,
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "20 nodes x 100 pairs",
            ),
            ctx.record(
                "symplectic/domega_theta",
                c.domega_minus_theta,
                tol,
                sev,
                "",
            ),
            ctx.record("symplectic/dtheta_direct", c.dtheta_direct, tol, sev, ""),
            ctx.record(
                "symplectic/dtheta_expansion",
                c.dtheta_expansion,
                tol,
                sev,
                "",
            ),
            ctx.record("symplectic/cyclic", c.cyclic, tol, sev, ""),
            ctx.record("symplectic/g_parallel", c.g_parallel, tol, sev, ""),
            ctx.record(
                "symplectic/vertical_symmetry",
                c.vertical_symmetry,
                tol,
                sev,
                "",
            ),
        ])
    }
}

pub struct CompatibilityCheck;

impl Check for CompatibilityCheck {
    fn name(&self) -> &'static str {
        "compatibility"
    }

    fn description(&self) -> &'static str {
        "Dg = 0 and DJ = 0 for the canonical d-connection"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        let g = ctx.geometry;
        let r = compatibility_check(&g.dconnection, &g.sasaki, &g.frame, &g.complex, &ctx.nodes)?;
        Ok(vec![
            ctx.record(
                "compatibility/metricity",
                r.metricity.max(),
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "",
            ),
            ctx.record(
                "compatibility/dj",
                r.dj,
                ctx.symbolic_tolerance(),
                Severity::Hard,
                "",
            ),
        ])
    }
}

pub struct FinslerCheck;

impl Check for FinslerCheck {
    fn name(&self) -> &'static str {
        "finsler"
    }

    fn description(&self) -> &'static str {
        "Euler 2-homogeneity of a density flagged as a squared Finsler function (integer order)"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Vec<CheckRecord>> {
        if !ctx.job.finsler {
            return Ok(Vec::new());
        }
        let g = ctx.geometry;
        let r = finsler_mode(&g.lagrangian, &g.lattice, &ctx.nodes)?;
        Ok(vec![ctx.record(
            "finsler/homogeneity",
            r.homogeneity_residual,
            ctx.symbolic_tolerance(),
            Severity::Hard,
            "evaluated at alpha = 1",
        )])
    }
}
