//! Almost complex structure, Cartan forms `ω`, `θ`, and the closure and
//! compatibility checks of the almost Kähler model.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dconn::{
    metricity_residual, DConnection, MetricDerivatives, MetricityResidual, SasakiMetric,
};
use crate::error::Result;
use crate::frac::{
    worse, Basis, FormField, FractionalOrder, GridField, Lattice, PowerField, Scalar,
};
use crate::lagrange::{HessianMetric, Lagrangian};
use crate::nconn::{AdaptedFrame, NonholonomyData};

/// `J(e_i) = −e_{n+i}`, `J(e_{n+i}) = e_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlmostComplex {
    n: usize,
}

impl AlmostComplex {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// Matrix in the adapted frame; column `β` holds `J(e_β)`.
    pub fn adapted_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(n + i, i)] = -1.0;
            j[(i, n + i)] = 1.0;
        }
        j
    }

    /// `max |J² + I|`.
    pub fn square_residual(&self) -> f64 {
        let j = self.adapted_matrix();
        (&j * &j + DMatrix::identity(2 * self.n, 2 * self.n)).amax()
    }

    /// Matrix on the coordinate frame `∂̲_u` at a node.
    pub fn coordinate_matrix_at(&self, frame: &AdaptedFrame, node: usize) -> Result<DMatrix<f64>> {
        Ok(frame.frame_matrix_at(node)? * self.adapted_matrix() * frame.coframe_matrix_at(node)?)
    }
}

pub fn build_almost_complex(frame: &AdaptedFrame) -> AlmostComplex {
    AlmostComplex::new(frame.n())
}

/// `ω = ½ ∂̲_{yⁱ}L e^i`, `θ = g_ij e^{n+i} ∧ e^j` and their exterior
/// derivatives, all in the adapted coframe.
#[derive(Debug, Clone)]
pub struct SymplecticData {
    pub omega: FormField,
    pub theta: FormField,
    pub d_omega: FormField,
    pub d_theta: FormField,
}

pub fn cartan_forms(
    lag: &Lagrangian,
    metric: &HessianMetric,
    frame: &AdaptedFrame,
) -> Result<SymplecticData> {
    let n = lag.n();
    let chart = lag.chart().clone();
    let mut omega = FormField::zero(chart.clone(), 1, Basis::Adapted);
    for i in 0..n {
        omega.add_to(
            &[i],
            &Scalar::Power(lag.partial(chart.y_axis(i))?.scale(0.5)),
        )?;
    }
    let mut theta = FormField::zero(chart, 2, Basis::Adapted);
    for i in 0..n {
        for j in 0..n {
            theta.add_to(&[n + i, j], &metric.lower_scalar(i, j))?;
        }
    }
    let d_omega = frame.exterior_derivative(&omega)?;
    let d_theta = frame.exterior_derivative(&theta)?;
    Ok(SymplecticData {
        omega,
        theta,
        d_omega,
        d_theta,
    })
}

/// `max |θ(X, Y) − g(JX, Y)|` over random adapted-frame vector pairs at
/// randomly chosen nodes.
#[allow(clippy::too_many_arguments)]
pub fn probe_residual(
    sd: &SymplecticData,
    gm: &SasakiMetric,
    j: &AlmostComplex,
    lattice: &Lattice,
    nodes: &[usize],
    seed: u64,
    node_samples: usize,
    pairs: usize,
) -> Result<f64> {
    if nodes.is_empty() {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 * gm.n();
    let jm = j.adapted_matrix();
    let mut worst: f64 = 0.0;
    for _ in 0..node_samples {
        let node = nodes[rng.gen_range(0..nodes.len())];
        for _ in 0..pairs {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let jx = &jm * DMatrix::from_column_slice(dim, 1, &x);
            let lhs = sd.theta.eval2_at(lattice, node, &x, &y)?;
            let rhs = gm.eval_adapted(node, jx.as_slice(), &y);
            worst = worse(worst, (lhs - rhs).abs());
        }
    }
    Ok(worst)
}

/// Closure residuals of the almost symplectic structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureReport {
    /// `max |dω − θ|`
    pub domega_minus_theta: f64,
    /// `max |dθ|`, computed through the coordinate coframe
    pub dtheta_direct: f64,
    /// `max |dθ|`, assembled from the three-term expansion
    pub dtheta_expansion: f64,
    /// `max |g_{si}Ω^s_{jk} + g_{sj}Ω^s_{ki} + g_{sk}Ω^s_{ij}|`
    pub cyclic: f64,
    /// `max |g_{ij‖k} − g_{ik‖j}|`
    pub g_parallel: f64,
    /// `max |∂̲_{y^k} g_ij − ∂̲_{y^j} g_ik|`
    pub vertical_symmetry: f64,
}

impl ClosureReport {
    pub fn max(&self) -> f64 {
        [
            self.domega_minus_theta,
            self.dtheta_direct,
            self.dtheta_expansion,
            self.cyclic,
            self.g_parallel,
            self.vertical_symmetry,
        ]
        .into_iter()
        .fold(0.0, worse)
    }
}

/// The three coefficient families of `dθ` in the adapted coframe.
#[derive(Debug, Clone)]
pub struct DThetaExpansion {
    /// `cyclic[(i, j, k)]`, `i < j < k`
    pub cyclic: Vec<((usize, usize, usize), Scalar)>,
    /// `g_{ij‖k} − g_{ik‖j}` for all `i` and `j < k`
    pub g_parallel: Vec<((usize, usize, usize), Scalar)>,
    /// `∂̲_{y^k} g_ij − ∂̲_{y^i} g_kj` for `k < i` and all `j`
    pub vertical: Vec<((usize, usize, usize), Scalar)>,
}

impl DThetaExpansion {
    /// Assemble the 3-form `Σ cyclic e^i∧e^j∧e^k + Σ g_par e^{n+i}∧e^j∧e^k
    /// + Σ vertical e^{n+k}∧e^{n+i}∧e^j`.
    pub fn to_form(&self, metric: &HessianMetric) -> Result<FormField> {
        let n = metric.n();
        let chart = metric.lattice().chart().clone();
        let mut form = FormField::zero(chart, 3, Basis::Adapted);
        for ((i, j, k), c) in &self.cyclic {
            form.add_to(&[*i, *j, *k], c)?;
        }
        for ((i, j, k), c) in &self.g_parallel {
            form.add_to(&[n + i, *j, *k], c)?;
        }
        for ((k, i, j), c) in &self.vertical {
            form.add_to(&[n + k, n + i, *j], c)?;
        }
        Ok(form)
    }
}

pub fn dtheta_expansion(
    metric: &HessianMetric,
    frame: &AdaptedFrame,
    nh: &NonholonomyData,
) -> Result<DThetaExpansion> {
    let n = metric.n();
    let dg = MetricDerivatives::new(metric, frame)?;
    let g = |i: usize, j: usize| metric.lower_scalar(i, j);
    let chart = frame.chart().clone();

    let mut cyclic = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut acc = Scalar::zero(chart.clone());
                for s in 0..n {
                    acc = acc.add(&g(s, i).mul(nh.omega(s, j, k))?)?;
                    acc = acc.add(&g(s, j).mul(nh.omega(s, k, i))?)?;
                    acc = acc.add(&g(s, k).mul(nh.omega(s, i, j))?)?;
                }
                cyclic.push(((i, j, k), acc));
            }
        }
    }

    // g_{ij‖k} = e_k g_ij − B^s_{ik} g_sj − B^s_{jk} g_is
    let parallel = |i: usize, j: usize, k: usize| -> Result<Scalar> {
        let mut acc = dg.get(k, i, j).clone();
        for s in 0..n {
            acc = acc.sub(&nh.b(s, i, k).mul(&g(s, j))?)?;
            acc = acc.sub(&nh.b(s, j, k).mul(&g(i, s))?)?;
        }
        Ok(acc)
    };
    let mut g_parallel = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in (j + 1)..n {
                g_parallel.push(((i, j, k), parallel(i, j, k)?.sub(&parallel(i, k, j)?)?));
            }
        }
    }

    let mut vertical = Vec::new();
    for k in 0..n {
        for i in (k + 1)..n {
            for j in 0..n {
                vertical.push(((k, i, j), dg.get(n + k, i, j).sub(dg.get(n + i, k, j))?));
            }
        }
    }
    Ok(DThetaExpansion {
        cyclic,
        g_parallel,
        vertical,
    })
}

fn max_over(
    items: &[((usize, usize, usize), Scalar)],
    lattice: &Arc<Lattice>,
    nodes: &[usize],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (_, c) in items {
        worst = worse(worst, c.max_abs_over(lattice, nodes)?);
    }
    Ok(worst)
}

pub fn closure_checks(
    sd: &SymplecticData,
    metric: &HessianMetric,
    frame: &AdaptedFrame,
    nh: &NonholonomyData,
    nodes: &[usize],
) -> Result<ClosureReport> {
    let lattice = frame.lattice().clone();
    let expansion = dtheta_expansion(metric, frame, nh)?;
    let exp_form = expansion.to_form(metric)?;
    Ok(ClosureReport {
        domega_minus_theta: sd.d_omega.sub(&sd.theta)?.max_abs_over(&lattice, nodes)?,
        dtheta_direct: sd.d_theta.max_abs_over(&lattice, nodes)?,
        dtheta_expansion: exp_form.max_abs_over(&lattice, nodes)?,
        cyclic: max_over(&expansion.cyclic, &lattice, nodes)?,
        g_parallel: max_over(&expansion.g_parallel, &lattice, nodes)?,
        vertical_symmetry: max_over(&expansion.vertical, &lattice, nodes)?,
    })
}

/// Metricity of the d-connection and the residual of `DJ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatibilityReport {
    pub metricity: MetricityResidual,
    pub dj: f64,
}

/// `(D_γ J)^α_β = Γ^α_{δγ} J^δ_β − J^α_δ Γ^δ_{βγ}` (J is constant in the
/// adapted frame), maximised over indices and nodes.
pub fn dj_residual(
    d: &DConnection,
    j: &AlmostComplex,
    lattice: &Arc<Lattice>,
    nodes: &[usize],
) -> Result<f64> {
    let dim = 2 * d.n();
    let jm = j.adapted_matrix();
    let mut worst: f64 = 0.0;
    for gamma in 0..dim {
        for alpha in 0..dim {
            for beta in 0..dim {
                let mut r = Scalar::zero(lattice.chart().clone());
                for delta in 0..dim {
                    if jm[(delta, beta)] != 0.0 {
                        r = r.add(&d.gamma(alpha, delta, gamma).scale(jm[(delta, beta)]))?;
                    }
                    if jm[(alpha, delta)] != 0.0 {
                        r = r.sub(&d.gamma(delta, beta, gamma).scale(jm[(alpha, delta)]))?;
                    }
                }
                worst = worse(worst, r.max_abs_over(lattice, nodes)?);
            }
        }
    }
    Ok(worst)
}

pub fn compatibility_check(
    d: &DConnection,
    gm: &SasakiMetric,
    frame: &AdaptedFrame,
    j: &AlmostComplex,
    nodes: &[usize],
) -> Result<CompatibilityReport> {
    Ok(CompatibilityReport {
        metricity: metricity_residual(d, gm, frame, nodes)?,
        dj: dj_residual(d, j, frame.lattice(), nodes)?,
    })
}

/// Euler 2-homogeneity residual of a Finsler-flagged density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinslerReport {
    /// `max |yⁱ ∂_{yⁱ}L − 2L|` at the integer order
    pub homogeneity_residual: f64,
}

/// Homogeneity is checked at `α = 1` only; the fractional analogue is not
/// an identity of the Caputo calculus.
pub fn finsler_mode(
    lag: &Lagrangian,
    lattice: &Arc<Lattice>,
    nodes: &[usize],
) -> Result<FinslerReport> {
    let defect = lag
        .with_alpha(FractionalOrder::ONE)
        .euler_homogeneity_defect()?;
    let residual = if defect.is_zero() {
        0.0
    } else {
        defect.sample(lattice)?.max_abs_over(nodes)
    };
    Ok(FinslerReport {
        homogeneity_residual: residual,
    })
}

/// Same residual for a density only known on the lattice, using the
/// lattice derivative along each velocity axis.
pub fn grid_homogeneity_residual(density: &GridField, nodes: &[usize]) -> Result<f64> {
    let lattice = density.lattice().clone();
    let chart = lattice.chart().clone();
    let mut acc = density.scale(-2.0);
    for i in 0..chart.n() {
        let axis = chart.y_axis(i);
        let y = PowerField::coordinate(chart.clone(), axis).sample(&lattice)?;
        acc = acc.add(&y.mul(&density.caputo_partial(axis, FractionalOrder::ONE)?)?)?;
    }
    Ok(acc.max_abs_over(nodes))
}
