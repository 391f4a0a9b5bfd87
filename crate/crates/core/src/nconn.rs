//! Canonical N-connection, N-adapted frames and coframes, and nonholonomy
//! coefficients.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{GeoError, Result};
use crate::frac::{
    exterior_derivative, wedge, worse, Basis, ChartSpec, FormField, FractionalOrder, Lattice,
    PowerField, Scalar,
};
use crate::lagrange::SemiSpray;

/// N-connection coefficients `N^a_j` on a lattice, with their partials along
/// every chart axis cached.
#[derive(Debug, Clone)]
pub struct NConnection {
    lattice: Arc<Lattice>,
    alpha: FractionalOrder,
    /// `coeffs[a][j] = N^a_j`
    coeffs: Vec<Vec<Scalar>>,
    /// `partials[a][j][axis] = ∂̲_axis N^a_j`
    partials: Vec<Vec<Vec<Scalar>>>,
}

impl NConnection {
    pub fn new(
        lattice: Arc<Lattice>,
        alpha: FractionalOrder,
        coeffs: Vec<Vec<Scalar>>,
    ) -> Result<Self> {
        let chart = lattice.chart().clone();
        let n = chart.n();
        if coeffs.len() != n || coeffs.iter().any(|row| row.len() != n) {
            return Err(GeoError::Domain(format!(
                "N-connection needs {n}×{n} coefficients"
            )));
        }
        let mut partials = Vec::with_capacity(n);
        for row in &coeffs {
            let mut prow = Vec::with_capacity(n);
            for c in row {
                prow.push(
                    (0..chart.dim())
                        .map(|axis| c.caputo(axis, alpha))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            partials.push(prow);
        }
        Ok(Self {
            lattice,
            alpha,
            coeffs,
            partials,
        })
    }

    /// Identically vanishing connection.
    pub fn zero(lattice: Arc<Lattice>, alpha: FractionalOrder) -> Result<Self> {
        let chart = lattice.chart().clone();
        let n = chart.n();
        Self::new(lattice, alpha, vec![vec![Scalar::zero(chart); n]; n])
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        self.lattice.chart()
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn coeff(&self, a: usize, j: usize) -> &Scalar {
        &self.coeffs[a][j]
    }

    pub fn partial(&self, a: usize, j: usize, axis: usize) -> &Scalar {
        &self.partials[a][j][axis]
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().flatten().all(Scalar::is_exact_zero)
    }

    /// `max |N^a_j|` over the given nodes.
    pub fn max_abs_over(&self, nodes: &[usize]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for c in self.coeffs.iter().flatten() {
            worst = worse(worst, c.max_abs_over(&self.lattice, nodes)?);
        }
        Ok(worst)
    }
}

/// `N^a_j = ∂̲_{yʲ} Gᵃ` on the lattice.
pub fn canonical_nconnection(
    spray: &SemiSpray,
    lattice: &Arc<Lattice>,
    alpha: FractionalOrder,
) -> Result<NConnection> {
    let chart = lattice.chart().clone();
    let n = chart.n();
    let mut coeffs = Vec::with_capacity(n);
    for a in 0..n {
        let row = (0..n)
            .map(|j| spray.coeff(a).caputo(chart.y_axis(j), alpha))
            .collect::<Result<Vec<_>>>()?;
        coeffs.push(row);
    }
    NConnection::new(lattice.clone(), alpha, coeffs)
}

/// The N-adapted frame `e_j = ∂̲_j − N^a_j ∂̲_a`, `e_b = ∂̲_b` and its dual
/// coframe `e^j = dx^j`, `e^b = dy^b + N^b_k dx^k`.
///
/// Frame indices run over `0..2n`: `j < n` horizontal, `n + b` vertical.
#[derive(Debug, Clone)]
pub struct AdaptedFrame {
    nconn: Arc<NConnection>,
}

impl AdaptedFrame {
    pub fn new(nconn: Arc<NConnection>) -> Self {
        Self { nconn }
    }

    pub fn nconnection(&self) -> &Arc<NConnection> {
        &self.nconn
    }

    pub fn chart(&self) -> &Arc<ChartSpec> {
        self.nconn.chart()
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        self.nconn.lattice()
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.nconn.alpha
    }

    pub fn n(&self) -> usize {
        self.nconn.n()
    }

    /// Apply frame vector `which` to a field whose partials along every axis
    /// are already known.
    pub fn apply_with_partials(&self, which: usize, partials: &[Scalar]) -> Result<Scalar> {
        let n = self.n();
        if which >= n {
            return Ok(partials[which].clone());
        }
        let mut acc = partials[which].clone();
        for a in 0..n {
            let da = &partials[n + a];
            if da.is_exact_zero() {
                continue;
            }
            acc = acc.sub(&self.nconn.coeffs[a][which].mul(da)?)?;
        }
        Ok(acc)
    }

    /// `e_which f`.
    pub fn apply(&self, which: usize, f: &Scalar) -> Result<Scalar> {
        let n = self.n();
        let alpha = self.alpha();
        if which >= n {
            return f.caputo(which, alpha);
        }
        let partials = self.partials_of(f)?;
        self.apply_with_partials(which, &partials)
    }

    /// Every frame derivative `e_β f`, `β = 0..2n`.
    pub fn apply_all(&self, f: &Scalar) -> Result<Vec<Scalar>> {
        let partials = self.partials_of(f)?;
        (0..2 * self.n())
            .map(|b| self.apply_with_partials(b, &partials))
            .collect()
    }

    fn partials_of(&self, f: &Scalar) -> Result<Vec<Scalar>> {
        let alpha = self.alpha();
        (0..2 * self.n())
            .map(|axis| f.caputo(axis, alpha))
            .collect()
    }

    /// Coordinate components of frame vector `which` at a node (columns of
    /// the frame matrix).
    pub fn frame_matrix_at(&self, node: usize) -> Result<DMatrix<f64>> {
        let n = self.n();
        let mut m = DMatrix::identity(2 * n, 2 * n);
        for j in 0..n {
            for a in 0..n {
                m[(n + a, j)] = -self.nconn.coeffs[a][j].value_at(self.lattice(), node)?;
            }
        }
        Ok(m)
    }

    /// Coordinate components of coframe covector `which` at a node (rows of
    /// the coframe matrix).
    pub fn coframe_matrix_at(&self, node: usize) -> Result<DMatrix<f64>> {
        let n = self.n();
        let mut m = DMatrix::identity(2 * n, 2 * n);
        for b in 0..n {
            for k in 0..n {
                m[(n + b, k)] = self.nconn.coeffs[b][k].value_at(self.lattice(), node)?;
            }
        }
        Ok(m)
    }

    /// `max |⟨e^β, e_γ⟩ − δ^β_γ|` over the nodes.
    pub fn duality_residual(&self, nodes: &[usize]) -> Result<f64> {
        let dim = 2 * self.n();
        let mut worst: f64 = 0.0;
        for &node in nodes {
            let pairing = self.coframe_matrix_at(node)? * self.frame_matrix_at(node)?;
            worst = worse(worst, (pairing - DMatrix::identity(dim, dim)).amax());
        }
        Ok(worst)
    }

    /// Adapted-basis image of the coordinate covector `du^axis`.
    fn coordinate_covector_in_adapted(&self, axis: usize) -> Result<FormField> {
        let chart = self.chart().clone();
        let n = self.n();
        let mut form = FormField::covector(chart, axis, Basis::Adapted);
        if axis >= n {
            // dy^a = e^a − N^a_k e^k
            for k in 0..n {
                form.add_to(&[k], &self.nconn.coeffs[axis - n][k].scale(-1.0))?;
            }
        }
        Ok(form)
    }

    /// Coordinate-basis image of the adapted covector `e^axis`.
    fn adapted_covector_in_coordinate(&self, axis: usize) -> Result<FormField> {
        let chart = self.chart().clone();
        let n = self.n();
        let mut form = FormField::covector(chart, axis, Basis::Coordinate);
        if axis >= n {
            for k in 0..n {
                form.add_to(&[k], &self.nconn.coeffs[axis - n][k])?;
            }
        }
        Ok(form)
    }

    fn rebase(&self, form: &FormField, target: Basis) -> Result<FormField> {
        let chart = self.chart().clone();
        let mut out = FormField::zero(chart.clone(), form.degree(), target);
        for (idx, c) in form.components() {
            let mut term = FormField::function(chart.clone(), c.clone(), target);
            for &axis in idx {
                let image = match target {
                    Basis::Adapted => self.coordinate_covector_in_adapted(axis)?,
                    Basis::Coordinate => self.adapted_covector_in_coordinate(axis)?,
                };
                term = wedge(&term, &image)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Re-express a form in the adapted coframe.
    pub fn to_adapted(&self, form: &FormField) -> Result<FormField> {
        match form.basis() {
            Basis::Adapted => Ok(form.clone()),
            Basis::Coordinate => self.rebase(form, Basis::Adapted),
        }
    }

    /// Re-express a form in the coordinate coframe.
    pub fn to_coordinate(&self, form: &FormField) -> Result<FormField> {
        match form.basis() {
            Basis::Coordinate => Ok(form.clone()),
            Basis::Adapted => self.rebase(form, Basis::Coordinate),
        }
    }

    /// Exterior derivative of an adapted-basis form: expand in coordinates,
    /// differentiate there, and convert back.
    pub fn exterior_derivative(&self, form: &FormField) -> Result<FormField> {
        let coord = self.to_coordinate(form)?;
        self.to_adapted(&exterior_derivative(&coord, self.alpha())?)
    }
}

/// Nonholonomy coefficients of the adapted frame.
///
/// `[e_i, e_j] = W^a_{ij} e_a` with `W^a_{ij} = Ω^a_{ji}`,
/// `Ω^a_{ij} = e_i N^a_j − e_j N^a_i`, and `[e_i, e_b] = W^a_{ib} e_a` with
/// `W^a_{ib} = ∂̲_b N^a_i`.
#[derive(Debug, Clone)]
pub struct NonholonomyData {
    /// `omega[a][i][j] = Ω^a_{ij}`
    omega: Vec<Vec<Vec<Scalar>>>,
    /// `mixed[a][i][b] = ∂̲_{y^b} N^a_i`
    mixed: Vec<Vec<Vec<Scalar>>>,
}

impl NonholonomyData {
    pub fn omega(&self, a: usize, i: usize, j: usize) -> &Scalar {
        &self.omega[a][i][j]
    }

    /// `W^a_{ib} = ∂̲_b N^a_i`.
    pub fn w_mixed(&self, a: usize, i: usize, b: usize) -> &Scalar {
        &self.mixed[a][i][b]
    }

    /// `B^s_{ik} = ∂̲_{yⁱ} N^s_k`.
    pub fn b(&self, s: usize, i: usize, k: usize) -> &Scalar {
        &self.mixed[s][k][i]
    }

    /// Structure function `W^γ_{αβ}` over frame indices `0..2n`, as the
    /// vertical component `γ = n + a`; horizontal components vanish.
    pub fn w(&self, a: usize, alpha: usize, beta: usize, n: usize) -> Scalar {
        match (alpha < n, beta < n) {
            (true, true) => self.omega[a][beta][alpha].clone(),
            (true, false) => self.mixed[a][alpha][beta - n].clone(),
            (false, true) => self.mixed[a][beta][alpha - n].scale(-1.0),
            (false, false) => self.omega[a][0][0].scale(0.0),
        }
    }

    /// `max |Ω^a_{ij} + Ω^a_{ji}|` (zero by construction).
    pub fn antisymmetry_defect(&self, lattice: &Arc<Lattice>, nodes: &[usize]) -> Result<f64> {
        let n = self.omega.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let s = self.omega[a][i][j].add(&self.omega[a][j][i])?;
                    worst = worse(worst, s.max_abs_over(lattice, nodes)?);
                }
            }
        }
        Ok(worst)
    }
}

pub fn nonholonomy(frame: &AdaptedFrame) -> Result<NonholonomyData> {
    let n = frame.n();
    let nc = frame.nconnection();
    let chart = frame.chart().clone();
    // e_i N^a_j for all a, i, j
    let mut hderiv = vec![vec![Vec::with_capacity(n); n]; n];
    for a in 0..n {
        for j in 0..n {
            let partials: Vec<Scalar> = (0..2 * n)
                .map(|axis| nc.partial(a, j, axis).clone())
                .collect();
            for i in 0..n {
                hderiv[a][j].push(frame.apply_with_partials(i, &partials)?);
            }
        }
    }
    let mut omega = vec![vec![vec![Scalar::zero(chart.clone()); n]; n]; n];
    let mut mixed = vec![vec![Vec::with_capacity(n); n]; n];
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    // Ω^a_{ij} = e_i N^a_j − e_j N^a_i
                    omega[a][i][j] = hderiv[a][j][i].sub(&hderiv[a][i][j])?;
                }
            }
            for b in 0..n {
                mixed[a][i].push(nc.partial(a, i, chart.y_axis(b)).clone());
            }
        }
    }
    Ok(NonholonomyData { omega, mixed })
}

/// `max |[e_α, e_β] f − W^γ_{αβ} e_γ f|` over all frame pairs and nodes.
pub fn commutator_residual(
    frame: &AdaptedFrame,
    nh: &NonholonomyData,
    probe: &PowerField,
    nodes: &[usize],
) -> Result<f64> {
    let n = frame.n();
    let lattice = frame.lattice().clone();
    let f = Scalar::Power(probe.clone());
    let first = frame.apply_all(&f)?;
    let second: Vec<Vec<Scalar>> = first
        .iter()
        .map(|g| frame.apply_all(g))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for alpha in 0..2 * n {
        for beta in (alpha + 1)..2 * n {
            // second[β][α] = e_α (e_β f)
            let mut r = second[beta][alpha].sub(&second[alpha][beta])?;
            for a in 0..n {
                r = r.sub(&nh.w(a, alpha, beta, n).mul(&first[n + a])?)?;
            }
            worst = worse(worst, r.max_abs_over(&lattice, nodes)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::GridField;

    fn setup(n: usize, points: usize) -> (Arc<ChartSpec>, Arc<Lattice>) {
        let chart = Arc::new(ChartSpec::origin(n).unwrap());
        let lat = Arc::new(Lattice::uniform(chart.clone(), 1.0, points).unwrap());
        (chart, lat)
    }

    fn grid(lat: &Arc<Lattice>, f: impl Fn(&[f64]) -> f64) -> Scalar {
        Scalar::Grid(GridField::from_fn(lat.clone(), f))
    }

    #[test]
    fn zero_connection_gives_plain_partials() {
        let (chart, lat) = setup(1, 9);
        let frame = AdaptedFrame::new(Arc::new(
            NConnection::zero(lat.clone(), FractionalOrder::ONE).unwrap(),
        ));
        let f = Scalar::Power(PowerField::monomial(chart, 1.0, vec![2.0, 1.0]).unwrap());
        let e0 = frame.apply(0, &f).unwrap();
        let d0 = f.caputo(0, FractionalOrder::ONE).unwrap();
        assert!(e0.sub(&d0).unwrap().is_exact_zero());
        let c = Scalar::constant(lat.chart().clone(), 3.0);
        assert!(frame
            .apply_all(&c)
            .unwrap()
            .iter()
            .all(Scalar::is_exact_zero));
    }

    #[test]
    fn horizontal_frame_on_velocity_coordinate() {
        let (chart, lat) = setup(1, 9);
        let n11 = grid(&lat, |u| u[1] / (2.0 * (1.0 + u[0])));
        let nc =
            NConnection::new(lat.clone(), FractionalOrder::ONE, vec![vec![n11.clone()]]).unwrap();
        let frame = AdaptedFrame::new(Arc::new(nc));
        let y = Scalar::Power(PowerField::coordinate(chart, 1));
        let e1y = frame.apply(0, &y).unwrap();
        let all: Vec<usize> = (0..lat.node_count()).collect();
        assert!(e1y.add(&n11).unwrap().max_abs_over(&lat, &all).unwrap() < 1e-14);
    }

    #[test]
    fn duality_and_rebasing_round_trip() {
        let (chart, lat) = setup(2, 5);
        let nc = NConnection::new(
            lat.clone(),
            FractionalOrder::ONE,
            vec![
                vec![grid(&lat, |u| u[0] * u[2]), grid(&lat, |u| 1.0 + u[3])],
                vec![
                    grid(&lat, |u| u[1] - u[2]),
                    grid(&lat, |u| 0.5 * u[0] * u[0]),
                ],
            ],
        )
        .unwrap();
        let frame = AdaptedFrame::new(Arc::new(nc));
        let all: Vec<usize> = (0..lat.node_count()).collect();
        assert!(frame.duality_residual(&all).unwrap() < 1e-12);

        let mut form = FormField::zero(chart.clone(), 2, Basis::Adapted);
        form.set(&[2, 0], grid(&lat, |u| u[0] + u[3])).unwrap();
        form.set(&[3, 1], Scalar::constant(chart.clone(), 2.0))
            .unwrap();
        form.set(&[0, 1], grid(&lat, |u| u[2])).unwrap();
        let back = frame
            .to_adapted(&frame.to_coordinate(&form).unwrap())
            .unwrap();
        assert!(back.sub(&form).unwrap().max_abs_over(&lat, &all).unwrap() < 1e-12);
    }

    #[test]
    fn flat_nonholonomy_vanishes() {
        let (_, lat) = setup(2, 5);
        let frame = AdaptedFrame::new(Arc::new(
            NConnection::zero(lat, FractionalOrder::ONE).unwrap(),
        ));
        let nh = nonholonomy(&frame).unwrap();
        for a in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(nh.omega(a, i, j).is_exact_zero());
                    assert!(nh.b(a, i, j).is_exact_zero());
                }
            }
        }
    }

    #[test]
    fn commutator_identity_for_polynomial_connection() {
        let (chart, lat) = setup(2, 12);
        let nc = NConnection::new(
            lat.clone(),
            FractionalOrder::ONE,
            vec![
                vec![grid(&lat, |u| u[0] * u[2]), grid(&lat, |u| u[3] * u[3])],
                vec![grid(&lat, |u| u[1] * u[2]), grid(&lat, |u| u[0] + u[3])],
            ],
        )
        .unwrap();
        let frame = AdaptedFrame::new(Arc::new(nc));
        let nh = nonholonomy(&frame).unwrap();
        let probe = PowerField::monomial(chart, 1.0, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let r = commutator_residual(&frame, &nh, &probe, &lat.interior_nodes(2)).unwrap();
        assert!(r < 1e-9, "{r}");
        assert!(
            nh.antisymmetry_defect(&lat, &lat.interior_nodes(2))
                .unwrap()
                == 0.0
        );
    }
}
