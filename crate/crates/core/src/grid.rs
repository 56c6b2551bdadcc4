//! Graded radial meshes and the quadrature primitives every integral formula
//! of the solver is evaluated with.
//!
//! Two primitives cover all needs:
//!
//! * plain cumulative trapezoid integrals `F(r) = int_{r0}^{r} f`,
//! * exponentially weighted kernel integrals
//!   `r^{1-d} int_0^r r1^{d-1} e^{W(r1) - W(r)} f(r1) dr1` (and the analogous
//!   temperature kernels with powers `d-3`, `d-2`).
//!
//! The kernel weights are always evaluated as `exp` of a non-positive
//! difference; the exponents `W`, `Z` grow quadratically, so forming the two
//! exponentials separately would overflow long before the default truncation
//! radii. Kernel cells integrate the monomial weight `r1^k` exactly against a
//! linear interpolant of the weighted samples, which keeps the rule
//! second-order on graded meshes and makes it exact for constant forcing —
//! that exactness is relied on by the pressureless cavitating limit.

use std::sync::Arc;

use crate::{Error, Scalar};

/// Mesh family: from the origin (smooth case) or from a positive inner
/// radius (cavitating case, where the origin is unreachable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind<S> {
    FromZero,
    FromRmin { r_min: S },
}

/// Strictly increasing radial mesh, graded toward the inner end.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<S> {
    nodes: Vec<S>,
    kind: GridKind<S>,
}

impl<S: Scalar> RadialGrid<S> {
    /// Power-law graded mesh on `[0, r_max]`: `r_i = r_max * (i/n)^grading`.
    ///
    /// With `grading = 2` (the default used by the solvers) the first cell is
    /// `r_max / n^2`, well under the `1e-4 * r_max` target for `n >= 100`.
    pub fn from_zero(r_max: S, n_cells: usize, grading: S) -> Result<Arc<Self>, Error> {
        if !(r_max > S::zero()) || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!("r_max = {} must be positive", r_max)));
        }
        if n_cells < 8 {
            return Err(Error::InvalidGrid(format!("n_cells = {} too small", n_cells)));
        }
        if !(grading >= S::one()) {
            return Err(Error::InvalidGrid(format!("grading = {} must be >= 1", grading)));
        }
        let n = S::of_usize(n_cells);
        let mut nodes = Vec::with_capacity(n_cells + 1);
        nodes.push(S::zero());
        for i in 1..n_cells {
            nodes.push(r_max * (S::of_usize(i) / n).powf(grading));
        }
        nodes.push(r_max);
        Self::finish(nodes, GridKind::FromZero)
    }

    /// Two-block mesh for the cavitating case: log-uniform on
    /// `[r_min, anchor]` (the anchor radius lands exactly on a node) and
    /// power-law graded on `[anchor, r_max]`.
    ///
    /// The log-uniform inner block keeps the relative spacing `h/r` constant,
    /// which is what the near-origin power-law density profile needs for an
    /// accurate log-log slope.
    pub fn from_rmin(
        r_min: S,
        anchor: S,
        r_max: S,
        n_cells: usize,
        grading: S,
    ) -> Result<Arc<Self>, Error> {
        if !(S::zero() < r_min && r_min < anchor && anchor < r_max) {
            return Err(Error::InvalidGrid(format!(
                "need 0 < r_min < anchor < r_max, got {}, {}, {}",
                r_min, anchor, r_max,
            )));
        }
        if n_cells < 32 {
            return Err(Error::InvalidGrid(format!("n_cells = {} too small", n_cells)));
        }
        if !(grading >= S::one()) {
            return Err(Error::InvalidGrid(format!("grading = {} must be >= 1", grading)));
        }
        let n_inner = (n_cells / 3).max(16);
        let n_outer = n_cells - n_inner;
        let mut nodes = Vec::with_capacity(n_cells + 1);
        let log_ratio = (anchor / r_min).ln();
        nodes.push(r_min);
        for i in 1..n_inner {
            let t = S::of_usize(i) / S::of_usize(n_inner);
            nodes.push(r_min * (log_ratio * t).exp());
        }
        nodes.push(anchor);
        let span = r_max - anchor;
        for j in 1..n_outer {
            let t = S::of_usize(j) / S::of_usize(n_outer);
            nodes.push(anchor + span * t.powf(grading));
        }
        nodes.push(r_max);
        Self::finish(nodes, GridKind::FromRmin { r_min })
    }

    /// Wrap an explicit node list (e.g. radii read back from a profile
    /// file); the kind is inferred from the first node.
    pub fn from_nodes(nodes: Vec<S>) -> Result<Arc<Self>, Error> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes".into()));
        }
        let kind = if nodes[0] == S::zero() {
            GridKind::FromZero
        } else if nodes[0] > S::zero() {
            GridKind::FromRmin { r_min: nodes[0] }
        } else {
            return Err(Error::InvalidGrid(format!("negative first node {}", nodes[0])));
        };
        Self::finish(nodes, kind)
    }

    fn finish(nodes: Vec<S>, kind: GridKind<S>) -> Result<Arc<Self>, Error> {
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidGrid(format!(
                    "nodes not strictly increasing near r = {}",
                    w[0]
                )));
            }
        }
        Ok(Arc::new(RadialGrid { nodes, kind }))
    }

    pub fn nodes(&self) -> &[S] {
        &self.nodes
    }

    /// Number of nodes (cells + 1).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn kind(&self) -> GridKind<S> {
        self.kind
    }

    pub fn starts_at_zero(&self) -> bool {
        matches!(self.kind, GridKind::FromZero)
    }

    pub fn r_first(&self) -> S {
        self.nodes[0]
    }

    pub fn r_max(&self) -> S {
        *self.nodes.last().unwrap()
    }

    pub fn max_spacing(&self) -> S {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(S::zero(), |a, h| a.max(h))
    }

    /// Index of a node holding exactly `r` (bitwise), if any.
    pub fn find_node(&self, r: S) -> Option<usize> {
        let idx = self.nodes.partition_point(|&x| x < r);
        (idx < self.nodes.len() && self.nodes[idx] == r).then_some(idx)
    }
}

/// Samples aligned with the nodes of a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<S> {
    grid: Arc<RadialGrid<S>>,
    values: Vec<S>,
}

impl<S: Scalar> GridFunction<S> {
    pub fn new(grid: Arc<RadialGrid<S>>, values: Vec<S>) -> Result<Self, Error> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values on a {}-node grid",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn constant(grid: Arc<RadialGrid<S>>, value: S) -> Self {
        let n = grid.len();
        GridFunction {
            grid,
            values: vec![value; n],
        }
    }

    pub fn from_fn(grid: Arc<RadialGrid<S>>, f: impl Fn(S) -> S) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid<S>> {
        &self.grid
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Check every sample is finite; names the offending node otherwise.
    pub fn check_finite(&self, field: &'static str) -> Result<(), Error> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(node) => Err(Error::NonFinite { field, node }),
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }
}

fn require_same_grid<S: Scalar>(a: &GridFunction<S>, b: &GridFunction<S>) -> Result<(), Error> {
    if a.same_grid(b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Composite-trapezoid cumulative integral `F(r_i) = int_{r_0}^{r_i} f`,
/// second-order accurate in the max spacing; `F(r_0) = 0`.
///
/// Integrands with removable singularities at the axis must carry their
/// analytic limit in the `r = 0` sample.
pub fn cumulative_integral<S: Scalar>(f: &GridFunction<S>) -> Result<GridFunction<S>, Error> {
    cumulative_integral_seeded(f, S::zero())
}

/// [`cumulative_integral`] with an analytic seed value at the first node,
/// used on `from_rmin` grids to account for the unmeshed `[0, r_min]` piece.
pub fn cumulative_integral_seeded<S: Scalar>(
    f: &GridFunction<S>,
    seed: S,
) -> Result<GridFunction<S>, Error> {
    f.check_finite("cumulative integrand")?;
    let r = f.grid().nodes();
    let v = f.values();
    let half = S::lit(0.5);
    let mut out = Vec::with_capacity(v.len());
    let mut acc = seed;
    out.push(acc);
    for i in 0..v.len() - 1 {
        acc = acc + half * (r[i + 1] - r[i]) * (v[i] + v[i + 1]);
        out.push(acc);
    }
    GridFunction::new(f.grid().clone(), out)
}

/// Cell weights of the kernel rule on `[a, a+h]`: the monomial weight `r^k`
/// is integrated exactly against an interpolant of the weighted samples that
/// is linear in `r^2`, i.e.
/// `int r^k g dr ~= A g(a) + B g(a+h)` with
/// `A = int r^k (b^2 - r^2)/(b^2 - a^2) dr`, `B = int r^k (r^2 - a^2)/(b^2 - a^2) dr`.
///
/// The kernel integrands vary through the integrating-factor exponents,
/// which grow like `r^2` out of the axis; interpolating in `r^2` captures
/// that leading variation exactly on the strongly graded first cells, where
/// the relative cell width is order one. On thin cells the rule coincides
/// with the ordinary product trapezoid to second order. `A + B` equals the
/// exact monomial integral, so constant integrands are integrated exactly.
///
/// Expanded binomially about `a`; every term is non-negative, so there is no
/// cancellation for thin far-out cells.
fn kernel_cell_weights<S: Scalar>(a: S, h: S, k: u32) -> (S, S) {
    // Binomial sums over C(k,j) a^{k-j} h^j with hat-moment denominators.
    let mut s12 = S::zero(); // 1/((j+1)(j+2))
    let mut s23 = S::zero(); // 1/((j+2)(j+3))
    let mut s2 = S::zero(); // 1/(j+2)
    let mut s3 = S::zero(); // 1/(j+3)
    let mut binom = 1u64; // C(k, j)
    for j in 0..=k {
        let term = S::from_u64(binom).unwrap() * a.powi((k - j) as i32) * h.powi(j as i32);
        let jp1 = S::from_u32(j + 1).unwrap();
        let jp2 = S::from_u32(j + 2).unwrap();
        let jp3 = S::from_u32(j + 3).unwrap();
        s12 = s12 + term / (jp1 * jp2);
        s23 = s23 + term / (jp2 * jp3);
        s2 = s2 + term / jp2;
        s3 = s3 + term / jp3;
        if j < k {
            binom = binom * (k - j) as u64 / (j + 1) as u64;
        }
    }
    let denom = S::lit(2.0) * a + h;
    let wa = h * s12 + h * h * s23 / denom;
    let wb = (S::lit(2.0) * a * h * s2 + h * h * s3) / denom;
    (wa, wb)
}

/// Third moment `int_a^b r^k (r^2 - a^2)(b^2 - r^2) dr` of a cell: the
/// integral multiplying the interpolant curvature in the end-corrected cell
/// rule. Binomially expanded about `a`; all terms non-negative.
fn kernel_cell_curvature_moment<S: Scalar>(a: S, h: S, k: u32) -> S {
    let mut t1 = S::zero(); // 1/((j+2)(j+3))
    let mut t2 = S::zero(); // 1/((j+3)(j+4))
    let mut t3 = S::zero(); // 1/((j+4)(j+5))
    let mut binom = 1u64;
    for j in 0..=k {
        let term = S::from_u64(binom).unwrap() * a.powi((k - j) as i32) * h.powi(j as i32);
        let jp2 = S::from_u32(j + 2).unwrap();
        let jp3 = S::from_u32(j + 3).unwrap();
        let jp4 = S::from_u32(j + 4).unwrap();
        let jp5 = S::from_u32(j + 5).unwrap();
        t1 = t1 + term / (jp2 * jp3);
        t2 = t2 + term / (jp3 * jp4);
        t3 = t3 + term / (jp4 * jp5);
        if j < k {
            binom = binom * (k - j) as u64 / (j + 1) as u64;
        }
    }
    let two = S::lit(2.0);
    let four = S::lit(4.0);
    h * h * h * ((four * a * a + two * a * h) * t1 + (four * a + h) * h * t2 + h * h * t3)
}

/// Curvature (second derivative with respect to `r^2`) of cell-frame kernel
/// samples, estimated from divided differences of up to four neighbors.
/// Zero whenever the samples are linear in `r^2`, so the corrected rule
/// keeps every exactness property of the base rule.
fn sigma_curvature<S: Scalar>(r: &[S], g: impl Fn(usize) -> Option<S>, i: usize) -> S {
    let dd = |j1: usize, j2: usize, j3: usize| -> Option<S> {
        let (g1, g2, g3) = (g(j1)?, g(j2)?, g(j3)?);
        let d12 = (r[j2] - r[j1]) * (r[j2] + r[j1]);
        let d23 = (r[j3] - r[j2]) * (r[j3] + r[j2]);
        let d13 = (r[j3] - r[j1]) * (r[j3] + r[j1]);
        Some(((g3 - g2) / d23 - (g2 - g1) / d12) / d13)
    };
    let left = if i > 0 { dd(i - 1, i, i + 1) } else { None };
    let right = if i + 2 < r.len() { dd(i, i + 1, i + 2) } else { None };
    // g'' ~ 2 * divided difference; average the two one-sided estimates.
    match (left, right) {
        (Some(l), Some(rr)) => l + rr,
        (Some(l), None) => S::lit(2.0) * l,
        (None, Some(rr)) => S::lit(2.0) * rr,
        (None, None) => S::zero(),
    }
}

/// Weighted kernel scan: returns `J_i = int_{0}^{r_i} r1^k
/// e^{W(r1) - W(r_i)} f(r1) dr1` for every node, in one forward pass.
///
/// `seed` is the analytic value of `J` at the first node (zero on `from_zero`
/// grids). `w` must be non-decreasing so that every exponential argument is
/// non-positive. Each cell integrates the monomial weight exactly against an
/// interpolant of the weighted samples that is linear in `r^2`, plus a local
/// curvature correction estimated from the neighboring samples; the
/// correction decays with the cube of the cell width, so the composite rule
/// is better than second order wherever the integrand is smooth, and it
/// vanishes identically for constant forcing.
pub fn kernel_scan<S: Scalar>(
    f: &GridFunction<S>,
    w: &GridFunction<S>,
    power: u32,
    seed: S,
) -> Result<Vec<S>, Error> {
    require_same_grid(f, w)?;
    f.check_finite("kernel integrand")?;
    w.check_finite("kernel exponent")?;
    let r = f.grid().nodes();
    let fv = f.values();
    let wv = w.values();
    let n = r.len();
    let half = S::lit(0.5);
    // exponent gap above which a neighbor is useless for slope estimation
    let cap = S::one();
    let mut out = Vec::with_capacity(n);
    let mut acc = seed;
    out.push(acc);
    for i in 0..n - 1 {
        let dw = wv[i + 1] - wv[i];
        if dw < S::zero() {
            return Err(Error::DecreasingExponent { node: i + 1 });
        }
        let damp = (-dw).exp();
        let (wa, wb) = kernel_cell_weights(r[i], r[i + 1] - r[i], power);
        let mut cell = wa * damp * fv[i] + wb * fv[i + 1];
        // samples transported to the cell-end frame
        let g = |j: usize| -> Option<S> {
            if j >= n {
                return None;
            }
            let arg = wv[j] - wv[i + 1];
            (arg <= cap).then(|| arg.exp() * fv[j])
        };
        let curv = sigma_curvature(r, g, i);
        cell = cell - half * curv * kernel_cell_curvature_moment(r[i], r[i + 1] - r[i], power);
        acc = damp * acc + cell;
        out.push(acc);
    }
    Ok(out)
}

/// Weighted kernel scan of `e^{Z(r1)-Z(r)} - 1` against `r1^k`:
/// `K_i = int_0^{r_i} r1^k [e^{Z(r1) - Z(r_i)} - 1] dr1`.
///
/// The `-1` part is integrated analytically (`int_0^r r1^k = r^{k+1}/(k+1)`),
/// so small differences are produced by `expm1` and never by subtracting two
/// near-equal integrals. This is the homogeneous-term split the temperature
/// derivative needs at small radii. Cells carry the same curvature
/// correction as [`kernel_scan`], and the constant shift drops out of the
/// curvature estimate, so both scans of one kernel stay mutually consistent.
pub fn expm1_kernel_scan<S: Scalar>(
    z: &GridFunction<S>,
    power: u32,
    seed: S,
) -> Result<Vec<S>, Error> {
    z.check_finite("kernel exponent")?;
    let r = z.grid().nodes();
    let zv = z.values();
    let n = r.len();
    let kp1 = S::from_u32(power + 1).unwrap();
    let half = S::lit(0.5);
    let cap = S::one();
    let mut out = Vec::with_capacity(n);
    let mut acc = seed;
    out.push(acc);
    for i in 0..n - 1 {
        let dz = zv[i + 1] - zv[i];
        if dz < S::zero() {
            return Err(Error::DecreasingExponent { node: i + 1 });
        }
        let damp = (-dz).exp();
        let em1 = (-dz).exp_m1();
        let whole = r[i].powi((power + 1) as i32) / kp1;
        let (wa, _) = kernel_cell_weights(r[i], r[i + 1] - r[i], power);
        let g = |j: usize| -> Option<S> {
            if j >= n {
                return None;
            }
            let arg = zv[j] - zv[i + 1];
            (arg <= cap).then(|| arg.exp_m1())
        };
        let curv = sigma_curvature(r, g, i);
        // K_{i+1} = e^{-dz} K_i + (e^{-dz} - 1) int_0^{r_i} r1^k
        //           + corrected cell contribution of expm1(Z - Z_{i+1}).
        let cell = wa * em1
            - half * curv * kernel_cell_curvature_moment(r[i], r[i + 1] - r[i], power);
        acc = damp * acc + em1 * whole + cell;
        out.push(acc);
    }
    Ok(out)
}

/// Velocity-kernel value at one node:
/// `r^{1-d} int_0^r r1^{d-1} e^{W(r1) - W(r)} f(r1) dr1`.
///
/// At `r = 0` the limit is zero (the integral behaves like `f(0) r / d`).
/// For all nodes at once prefer [`scan_kernel_u`]; the value here is the
/// scan's, so both entry points share one quadrature semantic.
pub fn kernel_integral<S: Scalar>(
    r_index: usize,
    f: &GridFunction<S>,
    w: &GridFunction<S>,
    d: u32,
) -> Result<S, Error> {
    check_index(r_index, f)?;
    Ok(scan_kernel_u(f, w, d, S::zero())?[r_index])
}

/// Temperature-kernel value at one node:
/// `r^{2-d} int_0^r r1^{power} e^{Z(r1) - Z(r)} f(r1) dr1`, `power` being
/// `d-3` for the homogeneous term and `d-2` for the forcing term.
///
/// At `r = 0` the homogeneous variant tends to `f(0)/(d-2)` (so that the
/// usual `(d-2)` prefactor reproduces `f(0)`), the forcing variant to zero.
pub fn kernel_integral_theta<S: Scalar>(
    r_index: usize,
    f: &GridFunction<S>,
    z: &GridFunction<S>,
    d: u32,
    power: u32,
) -> Result<S, Error> {
    check_index(r_index, f)?;
    Ok(scan_kernel_theta(f, z, d, power, S::zero())?[r_index])
}

fn check_index<S: Scalar>(r_index: usize, f: &GridFunction<S>) -> Result<(), Error> {
    if r_index >= f.len() {
        return Err(Error::InvalidInput(format!("node index {} out of range", r_index)));
    }
    Ok(())
}

/// All-node velocity kernel `r^{1-d} int_0^r r1^{d-1} e^{W1 - W} f`, with the
/// axis limit zero on `from_zero` grids.
pub fn scan_kernel_u<S: Scalar>(
    f: &GridFunction<S>,
    w: &GridFunction<S>,
    d: u32,
    seed: S,
) -> Result<Vec<S>, Error> {
    let raw = kernel_scan(f, w, d - 1, seed)?;
    let r = f.grid().nodes();
    Ok(raw
        .into_iter()
        .zip(r)
        .map(|(j, &ri)| {
            if ri == S::zero() {
                S::zero()
            } else {
                ri.powi(1 - d as i32) * j
            }
        })
        .collect())
}

/// All-node temperature kernel `r^{2-d} int_0^r r1^{power} e^{Z1 - Z} f`.
pub fn scan_kernel_theta<S: Scalar>(
    f: &GridFunction<S>,
    z: &GridFunction<S>,
    d: u32,
    power: u32,
    seed: S,
) -> Result<Vec<S>, Error> {
    debug_assert!(power == d - 3 || power == d - 2);
    let raw = kernel_scan(f, z, power, seed)?;
    let r = f.grid().nodes();
    let f0 = f.values()[0];
    Ok(raw
        .into_iter()
        .zip(r)
        .map(|(j, &ri)| {
            if ri == S::zero() {
                if power == d - 3 {
                    f0 / S::from_u32(d - 2).unwrap()
                } else {
                    S::zero()
                }
            } else {
                ri.powi(2 - d as i32) * j
            }
        })
        .collect())
}

/// Deviation of the homogeneous temperature weight from one:
/// `(d-2) r^{2-d} int_0^r r1^{d-3} [e^{Z1 - Z} - 1] dr1`, which equals
/// `(d-2) r^{2-d} int_0^r r1^{d-3} e^{Z1-Z} dr1 - 1` without cancellation.
pub fn scan_theta_weight_defect<S: Scalar>(
    z: &GridFunction<S>,
    d: u32,
    seed: S,
) -> Result<Vec<S>, Error> {
    let raw = expm1_kernel_scan(z, d - 3, seed)?;
    let r = z.grid().nodes();
    let dm2 = S::from_u32(d - 2).unwrap();
    Ok(raw
        .into_iter()
        .zip(r)
        .map(|(k, &ri)| {
            if ri == S::zero() {
                S::zero()
            } else {
                dm2 * ri.powi(2 - d as i32) * k
            }
        })
        .collect())
}
