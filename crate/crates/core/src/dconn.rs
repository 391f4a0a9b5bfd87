//! Sasaki d-metric, the canonical metrical d-connection, torsion and
//! curvature 2-forms.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::frac::{wedge, worse, Basis, ChartSpec, FormField, Lattice, Scalar};
use crate::lagrange::HessianMetric;
use crate::nconn::{AdaptedFrame, NonholonomyData};

/// `g = g_ij e^i ⊗ e^j + g_ab e^a ⊗ e^b` with both blocks equal to the
/// Hessian metric.
#[derive(Debug, Clone)]
pub struct SasakiMetric {
    metric: Arc<HessianMetric>,
}

impl SasakiMetric {
    pub fn new(metric: Arc<HessianMetric>) -> Self {
        Self { metric }
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn hessian(&self) -> &Arc<HessianMetric> {
        &self.metric
    }

    /// Block-diagonal matrix in the adapted frame at a node.
    pub fn adapted_matrix_at(&self, node: usize) -> DMatrix<f64> {
        let n = self.n();
        let g = self.metric.lower_at(node);
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&g);
        m.view_mut((n, n), (n, n)).copy_from(&g);
        m
    }

    /// `g(X, Y)` for adapted-frame components.
    pub fn eval_adapted(&self, node: usize, x: &[f64], y: &[f64]) -> f64 {
        let m = self.adapted_matrix_at(node);
        let (x, y) = (
            DMatrix::from_column_slice(x.len(), 1, x),
            DMatrix::from_column_slice(y.len(), 1, y),
        );
        (x.transpose() * m * y)[(0, 0)]
    }

    /// Components on `du ⊗ du`, from expanding the adapted coframe.
    pub fn coordinate_matrix_at(&self, frame: &AdaptedFrame, node: usize) -> Result<DMatrix<f64>> {
        let p = frame.coframe_matrix_at(node)?;
        Ok(p.transpose() * self.adapted_matrix_at(node) * p)
    }
}

/// Frame derivatives `e_β g_ij` of the Hessian metric, `β = 0..2n`.
#[derive(Debug, Clone)]
pub struct MetricDerivatives {
    /// `d[β][i][j] = e_β g_ij`
    d: Vec<Vec<Vec<Scalar>>>,
}

impl MetricDerivatives {
    pub fn new(metric: &HessianMetric, frame: &AdaptedFrame) -> Result<Self> {
        let n = metric.n();
        let chart = frame.chart().clone();
        let mut d = vec![vec![vec![Scalar::zero(chart); n]; n]; 2 * n];
        for i in 0..n {
            for j in i..n {
                let all = frame.apply_all(&metric.lower_scalar(i, j))?;
                for (beta, v) in all.into_iter().enumerate() {
                    d[beta][j][i] = v.clone();
                    d[beta][i][j] = v;
                }
            }
        }
        Ok(Self { d })
    }

    pub fn get(&self, beta: usize, i: usize, j: usize) -> &Scalar {
        &self.d[beta][i][j]
    }
}

/// Canonical d-connection `D = (L̂^i_{jk}, Ĉ^a_{bc})`, acting with the same
/// coefficients on horizontal and vertical indices under `i ↔ n + i`.
#[derive(Debug, Clone)]
pub struct DConnection {
    chart: Arc<ChartSpec>,
    /// `lhat[i][j][k] = L̂^i_{jk}`
    lhat: Vec<Vec<Vec<Scalar>>>,
    /// `chat[a][b][c] = Ĉ^a_{bc}`
    chat: Vec<Vec<Vec<Scalar>>>,
}

impl DConnection {
    pub fn n(&self) -> usize {
        self.lhat.len()
    }

    pub fn lhat(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.lhat[i][j][k]
    }

    pub fn chat(&self, a: usize, b: usize, c: usize) -> &Scalar {
        &self.chat[a][b][c]
    }

    /// Copy with every `L̂` component replaced by `f(L̂)`.
    pub fn map_lhat(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Self> {
        let lhat = self
            .lhat
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(&f).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            lhat,
            ..self.clone()
        })
    }

    /// `Γ^α_{βγ}` over frame indices, defined by `D_{e_γ} e_β = Γ^α_{βγ} e_α`.
    pub fn gamma(&self, alpha: usize, beta: usize, gamma: usize) -> Scalar {
        let n = self.n();
        if (alpha < n) != (beta < n) {
            return Scalar::zero(self.chart.clone());
        }
        let (a, b) = (alpha % n, beta % n);
        if gamma < n {
            self.lhat[a][b][gamma].clone()
        } else {
            self.chat[a][b][gamma - n].clone()
        }
    }

    /// `max |L̂^i_{jk} − L̂^i_{kj}|` and the same for `Ĉ`.
    pub fn symmetry_defect(&self, lattice: &Arc<Lattice>, nodes: &[usize]) -> Result<f64> {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let l = self.lhat[i][j][k].sub(&self.lhat[i][k][j])?;
                    let c = self.chat[i][j][k].sub(&self.chat[i][k][j])?;
                    worst = worse(
                        worse(worst, l.max_abs_over(lattice, nodes)?),
                        c.max_abs_over(lattice, nodes)?,
                    );
                }
            }
        }
        Ok(worst)
    }

    /// Connection 1-forms `Γ^i_j = L̂^i_{jk} e^k + Ĉ^i_{jc} e^{n+c}` (adapted).
    pub fn connection_forms(&self) -> Result<Vec<Vec<FormField>>> {
        let n = self.n();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let mut form = FormField::zero(self.chart.clone(), 1, Basis::Adapted);
                for k in 0..n {
                    form.add_to(&[k], &self.lhat[i][j][k])?;
                    form.add_to(&[n + k], &self.chat[i][j][k])?;
                }
                row.push(form);
            }
            out.push(row);
        }
        Ok(out)
    }
}

/// `L̂^i_{jk} = ½ g^{ir}(e_k g_jr + e_j g_kr − e_r g_jk)` and
/// `Ĉ^a_{bc} = ½ g^{ad}(e_c g_bd + e_b g_cd − e_d g_bc)` (vertical `e`).
pub fn canonical_dconnection(metric: &HessianMetric, frame: &AdaptedFrame) -> Result<DConnection> {
    let n = metric.n();
    let chart = frame.chart().clone();
    let dg = MetricDerivatives::new(metric, frame)?;
    let zero = Scalar::zero(chart.clone());
    let mut lhat = vec![vec![vec![zero.clone(); n]; n]; n];
    let mut chat = vec![vec![vec![zero; n]; n]; n];
    for j in 0..n {
        for k in j..n {
            // lowered Christoffel combinations, one per r
            let low_h: Vec<Scalar> = (0..n)
                .map(|r| dg.get(k, j, r).add(dg.get(j, k, r))?.sub(dg.get(r, j, k)))
                .collect::<Result<_>>()?;
            let low_v: Vec<Scalar> = (0..n)
                .map(|d| {
                    dg.get(n + k, j, d)
                        .add(dg.get(n + j, k, d))?
                        .sub(dg.get(n + d, j, k))
                })
                .collect::<Result<_>>()?;
            for i in 0..n {
                let mut lh = Scalar::zero(chart.clone());
                let mut cv = Scalar::zero(chart.clone());
                for r in 0..n {
                    let up = Scalar::Grid(metric.upper(i, r).clone());
                    if !low_h[r].is_exact_zero() {
                        lh = lh.add(&up.mul(&low_h[r])?)?;
                    }
                    if !low_v[r].is_exact_zero() {
                        cv = cv.add(&up.mul(&low_v[r])?)?;
                    }
                }
                let (lh, cv) = (lh.scale(0.5), cv.scale(0.5));
                lhat[i][k][j] = lh.clone();
                lhat[i][j][k] = lh;
                chat[i][k][j] = cv.clone();
                chat[i][j][k] = cv;
            }
        }
    }
    Ok(DConnection { chart, lhat, chat })
}

/// Maxima of the four h/v parts of the covariant derivative of the d-metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricityResidual {
    /// `D_k g_ij` (horizontal block along horizontal directions)
    pub hh: f64,
    /// `D_k g_ab`
    pub vh: f64,
    /// `D_c g_ij`
    pub hv: f64,
    /// `D_c g_ab`
    pub vv: f64,
}

impl MetricityResidual {
    pub fn max(&self) -> f64 {
        worse(worse(self.hh, self.vh), worse(self.hv, self.vv))
    }
}

/// `e_γ g_ij − Γ^r_{iγ} g_rj − Γ^r_{jγ} g_ir` for both blocks and both
/// direction types, maximised over the nodes.
pub fn metricity_residual(
    d: &DConnection,
    gm: &SasakiMetric,
    frame: &AdaptedFrame,
    nodes: &[usize],
) -> Result<MetricityResidual> {
    let n = d.n();
    let metric = gm.hessian();
    let lattice = frame.lattice().clone();
    let dg = MetricDerivatives::new(metric, frame)?;
    let mut parts = [0.0f64; 4];
    for (slot, (block, vertical_dir)) in [(0, false), (n, false), (0, true), (n, true)]
        .into_iter()
        .enumerate()
    {
        for dir in 0..n {
            let gamma = if vertical_dir { n + dir } else { dir };
            for i in 0..n {
                for j in i..n {
                    let mut r = dg.get(gamma, i, j).clone();
                    for s in 0..n {
                        let a = d.gamma(block + s, block + i, gamma);
                        let b = d.gamma(block + s, block + j, gamma);
                        r = r.sub(&a.mul(&metric.lower_scalar(s, j))?)?;
                        r = r.sub(&b.mul(&metric.lower_scalar(i, s))?)?;
                    }
                    parts[slot] = worse(parts[slot], r.max_abs_over(&lattice, nodes)?);
                }
            }
        }
    }
    Ok(MetricityResidual {
        hh: parts[0],
        vh: parts[1],
        hv: parts[2],
        vv: parts[3],
    })
}

/// Torsion 2-forms in the adapted coframe.
#[derive(Debug, Clone)]
pub struct TorsionForms {
    pub horizontal: Vec<FormField>,
    pub vertical: Vec<FormField>,
}

/// `T^i = Ĉ^i_{jc} e^j ∧ e^c` and
/// `T^a = −½ Ω^a_{ij} e^i ∧ e^j + (∂̲_b N^a_i − L̂^a_{bi}) e^i ∧ e^b`.
pub fn torsion_forms(
    d: &DConnection,
    frame: &AdaptedFrame,
    nh: &NonholonomyData,
) -> Result<TorsionForms> {
    let n = d.n();
    let chart = frame.chart().clone();
    let mut horizontal = Vec::with_capacity(n);
    let mut vertical = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = FormField::zero(chart.clone(), 2, Basis::Adapted);
        for j in 0..n {
            for c in 0..n {
                t.add_to(&[j, n + c], d.chat(i, j, c))?;
            }
        }
        horizontal.push(t);
    }
    for a in 0..n {
        let mut t = FormField::zero(chart.clone(), 2, Basis::Adapted);
        for i in 0..n {
            for j in (i + 1)..n {
                t.add_to(&[i, j], &nh.omega(a, i, j).scale(-1.0))?;
            }
            for b in 0..n {
                t.add_to(&[i, n + b], &nh.w_mixed(a, i, b).sub(d.lhat(a, b, i))?)?;
            }
        }
        vertical.push(t);
    }
    Ok(TorsionForms {
        horizontal,
        vertical,
    })
}

/// Curvature 2-forms `R^i_j`.
#[derive(Debug, Clone)]
pub struct CurvatureForms {
    pub r: Vec<Vec<FormField>>,
}

impl CurvatureForms {
    pub fn max_abs_over(&self, lattice: &Arc<Lattice>, nodes: &[usize]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for f in self.r.iter().flatten() {
            worst = worse(worst, f.max_abs_over(lattice, nodes)?);
        }
        Ok(worst)
    }
}

/// Residuals of `d e^i − e^k ∧ Γ^i_k = −T^i` and
/// `d e^a − e^b ∧ Γ^a_b = −T^a`, plus `R^i_j = −(dΓ^i_j − Γ^k_j ∧ Γ^i_k)`.
pub fn structure_equation_residuals(
    d: &DConnection,
    frame: &AdaptedFrame,
    t: &TorsionForms,
    nodes: &[usize],
) -> Result<(f64, f64, CurvatureForms)> {
    let n = d.n();
    let chart = frame.chart().clone();
    let lattice = frame.lattice().clone();
    let gamma = d.connection_forms()?;
    let mut res = [0.0f64; 2];
    for (slot, offset) in [0, n].into_iter().enumerate() {
        for i in 0..n {
            let e = FormField::covector(chart.clone(), offset + i, Basis::Adapted);
            let mut lhs = frame.exterior_derivative(&e)?;
            for k in 0..n {
                let ek = FormField::covector(chart.clone(), offset + k, Basis::Adapted);
                lhs = lhs.sub(&wedge(&ek, &gamma[i][k])?)?;
            }
            let torsion = if slot == 0 {
                &t.horizontal[i]
            } else {
                &t.vertical[i]
            };
            res[slot] = worse(res[slot], lhs.add(torsion)?.max_abs_over(&lattice, nodes)?);
        }
    }
    let mut r = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut curv = frame.exterior_derivative(&gamma[i][j])?;
            for k in 0..n {
                curv = curv.sub(&wedge(&gamma[k][j], &gamma[i][k])?)?;
            }
            row.push(curv.scale(-1.0));
        }
        r.push(row);
    }
    Ok((res[0], res[1], CurvatureForms { r }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::{FractionalOrder, PowerField};
    use crate::lagrange::{hessian_metric, semi_spray, Lagrangian};
    use crate::nconn::{canonical_nconnection, nonholonomy};

    struct Fixture {
        lattice: Arc<Lattice>,
        metric: Arc<HessianMetric>,
        frame: AdaptedFrame,
        d: DConnection,
        nh: NonholonomyData,
    }

    fn build(n: usize, terms: Vec<(f64, Vec<f64>)>, alpha: f64, points: usize) -> Fixture {
        let chart = Arc::new(ChartSpec::origin(n).unwrap());
        let lattice = Arc::new(Lattice::uniform(chart.clone(), 1.0, points).unwrap());
        let alpha = FractionalOrder::new(alpha).unwrap();
        let lag =
            Lagrangian::new(PowerField::from_terms(chart, terms).unwrap(), alpha, false).unwrap();
        let metric = Arc::new(hessian_metric(&lag, &lattice).unwrap());
        let spray = semi_spray(&lag, &metric).unwrap();
        let frame = AdaptedFrame::new(Arc::new(
            canonical_nconnection(&spray, &lattice, alpha).unwrap(),
        ));
        let d = canonical_dconnection(&metric, &frame).unwrap();
        let nh = nonholonomy(&frame).unwrap();
        Fixture {
            lattice,
            metric,
            frame,
            d,
            nh,
        }
    }

    fn warped() -> Fixture {
        build(1, vec![(1.0, vec![0., 2.]), (1.0, vec![1., 2.])], 1.0, 24)
    }

    #[test]
    fn flat_connection_vanishes() {
        let f = build(
            2,
            vec![(1.0, vec![0., 0., 2., 0.]), (1.0, vec![0., 0., 0., 2.])],
            1.0,
            5,
        );
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    assert!(f.d.lhat(i, j, k).is_exact_zero());
                    assert!(f.d.chat(i, j, k).is_exact_zero());
                }
            }
        }
        let t = torsion_forms(&f.d, &f.frame, &f.nh).unwrap();
        assert!(t
            .horizontal
            .iter()
            .chain(&t.vertical)
            .all(|x| x.components().next().is_none()));
        let nodes: Vec<usize> = (0..f.lattice.node_count()).collect();
        let (r1, r2, curv) = structure_equation_residuals(&f.d, &f.frame, &t, &nodes).unwrap();
        assert!(r1 <= 1e-10 && r2 <= 1e-10);
        assert!(curv.max_abs_over(&f.lattice, &nodes).unwrap() <= 1e-10);
    }

    #[test]
    fn warped_horizontal_coefficient() {
        let f = warped();
        for node in f.lattice.interior_nodes(2) {
            let x = f.lattice.coords(node)[0];
            let got = f.d.lhat(0, 0, 0).value_at(&f.lattice, node).unwrap();
            assert!((got - 0.5 / (1.0 + x)).abs() < 1e-6, "{got}");
            assert!(f.d.chat(0, 0, 0).is_exact_zero());
        }
    }

    #[test]
    fn metricity_holds_and_perturbation_is_detected() {
        let f = warped();
        let gm = SasakiMetric::new(f.metric.clone());
        let nodes = f.lattice.interior_nodes(2);
        assert!(
            metricity_residual(&f.d, &gm, &f.frame, &nodes)
                .unwrap()
                .max()
                < 1e-10
        );
        let bent = f.d.map_lhat(|s| Ok(s.scale(1.1))).unwrap();
        assert!(
            metricity_residual(&bent, &gm, &f.frame, &nodes)
                .unwrap()
                .max()
                > 1e-2
        );
    }

    #[test]
    fn sasaki_blocks_and_coordinate_expansion() {
        let f = warped();
        let gm = SasakiMetric::new(f.metric.clone());
        let node = f.lattice.interior_nodes(3)[7];
        let g = f.metric.lower_grid(0, 0).get(node);
        assert_eq!(gm.eval_adapted(node, &[1.0, 0.0], &[1.0, 0.0]), g);
        assert_eq!(gm.eval_adapted(node, &[0.0, 1.0], &[0.0, 1.0]), g);
        let c = gm.coordinate_matrix_at(&f.frame, node).unwrap();
        let nn = f
            .frame
            .nconnection()
            .coeff(0, 0)
            .value_at(&f.lattice, node)
            .unwrap();
        assert!((c[(0, 0)] - (g + g * nn * nn)).abs() < 1e-12);
        assert!((c[(0, 1)] - g * nn).abs() < 1e-12);
    }

    #[test]
    fn structure_equations_match_torsion() {
        let f = warped();
        let t = torsion_forms(&f.d, &f.frame, &f.nh).unwrap();
        let nodes = f.lattice.interior_nodes(2);
        let (r1, r2, _) = structure_equation_residuals(&f.d, &f.frame, &t, &nodes).unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10, "{r1} {r2}");
    }
}
