//! Spectral curve R(x,z), the companion matrix Ĉ_z, the matrix function
//! D̂(z,x) built from diagonal node data, and the rational Lax operator
//! L̂(z) = −D̂₀⁻¹D̂₁ with its rank-one residues.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::sample;
use crate::scalar::{Scalar, C64};

/// Ones on the superdiagonal, z⁻¹ in the (N,1) corner.
pub fn cz_matrix<S: Scalar>(z: &S, n: usize) -> Result<SquareMatrix<S>> {
    if z.is_zero() {
        return Err(Error::InvalidInput("Ĉ_z needs z ≠ 0".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let mut c = SquareMatrix::zeros(n);
    for i in 0..n - 1 {
        c[(i, i + 1)] = S::one();
    }
    c[(n - 1, 0)] = c[(n - 1, 0)].clone() + S::one() / z.clone();
    Ok(c)
}

/// det(1 − Ĉ_z A) by direct elimination; equals 1 − det A / z.
pub fn det_one_minus_cz_a<S: Scalar>(z: &S, a: &[S]) -> Result<S> {
    let n = a.len();
    let m = SquareMatrix::identity(n).sub(&cz_matrix(z, n)?.mul(&SquareMatrix::diag(a)));
    Ok(m.det())
}

/// Node data at one sample point x: Ẑ_i for i = 0..r and Ŷ′_i(x) for i = 0..r+1, all diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalData<S> {
    pub z_hat: Vec<Vec<S>>,
    pub y_prime: Vec<Vec<S>>,
}

impl<S: Scalar> DiagonalData<S> {
    pub fn new(z_hat: Vec<Vec<S>>, y_prime: Vec<Vec<S>>) -> Result<Self> {
        let n = z_hat.first().map(|v| v.len()).unwrap_or(0);
        if n == 0 || y_prime.len() != z_hat.len() + 1 || z_hat.iter().chain(&y_prime).any(|v| v.len() != n) {
            return Err(Error::InvalidInput("need r+1 Ẑ_i and r+2 Ŷ′_i diagonals of a common size N ≥ 1".into()));
        }
        if z_hat.iter().flatten().any(|v| v.is_zero()) {
            return Err(Error::InvalidInput("all entries of Ẑ_i must be nonzero".into()));
        }
        Ok(DiagonalData { z_hat, y_prime })
    }

    pub fn n(&self) -> usize {
        self.z_hat[0].len()
    }

    pub fn r(&self) -> usize {
        self.z_hat.len() - 1
    }

    /// z_i = det Ẑ_i.
    pub fn node_dets(&self) -> Vec<S> {
        self.z_hat.iter().map(|v| prod(v)).collect()
    }

    /// Y′_i = det Ŷ′_i.
    pub fn y_dets(&self) -> Vec<S> {
        self.y_prime.iter().map(|v| prod(v)).collect()
    }

    /// Λ̂_i = Ẑ_i Ŷ′_{i+1} (Ŷ′_i)⁻¹ entrywise.
    pub fn lambda(&self, i: usize) -> Result<Vec<S>> {
        (0..self.n())
            .map(|w| {
                let d = &self.y_prime[i][w];
                if d.is_zero() {
                    return Err(Error::Pole(format!("Ŷ′_{i} has a vanishing entry at ω = {w}")));
                }
                Ok(self.z_hat[i][w].clone() * self.y_prime[i + 1][w].clone() / d.clone())
            })
            .collect()
    }
}

fn prod<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::one(), |a, b| a * b.clone())
}

/// D̂(z,x) = Ŷ′₀(x) Π_{i=0→r} (1 − Ĉ_z Λ̂_i(x)), factors ordered left to right.
pub fn build_d<S: Scalar>(z: &S, data: &DiagonalData<S>) -> Result<SquareMatrix<S>> {
    let n = data.n();
    let c = cz_matrix(z, n)?;
    let one = SquareMatrix::identity(n);
    let mut d = SquareMatrix::diag(&data.y_prime[0]);
    for i in 0..=data.r() {
        d = d.mul(&one.sub(&c.mul(&SquareMatrix::diag(&data.lambda(i)?))));
    }
    Ok(d)
}

/// R(x,z) = Y′₀ Π_{i=0}^{r} (1 − z⁻¹ z_i Y′_{i+1}/Y′_i) from scalar samples Y′_0..Y′_{r+1}.
pub fn spectral_curve<S: Scalar>(z: &S, y: &[S], zs: &[S]) -> Result<S> {
    if y.len() != zs.len() + 1 || zs.is_empty() {
        return Err(Error::InvalidInput(format!("need r+2 samples Y′_i for r+1 nodes, got {} and {}", y.len(), zs.len())));
    }
    if z.is_zero() {
        return Err(Error::InvalidInput("R(x,z) needs z ≠ 0".into()));
    }
    let mut r = y[0].clone();
    for i in 0..zs.len() {
        if y[i].is_zero() {
            return Err(Error::Pole(format!("Y′_{i} vanishes")));
        }
        r = r * (S::one() - zs[i].clone() * y[i + 1].clone() / (y[i].clone() * z.clone()));
    }
    Ok(r)
}

/// Rational-case data where D̂(z,x) = D̂₀(z) x + D̂₁(z) with D̂₀ = Π(1 − Ĉ_zẐ_i) and
/// D̂₁ = Σ_{s=0}^{r+1} [Π_{i<s}(−Ĉ_zẐ_i)] B̂_s for constant diagonals B̂_s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearData {
    pub z_hat: Vec<Vec<C64>>,
    pub b: Vec<Vec<C64>>,
}

/// Largest accepted condition number of D̂₀ away from the poles.
pub const MAX_COND: f64 = 1e12;

/// The Lax operator at one spectral point.
#[derive(Clone, Debug)]
pub struct LaxAt {
    pub d0: SquareMatrix<C64>,
    pub d1: SquareMatrix<C64>,
    pub l: SquareMatrix<C64>,
    pub cond: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Residue {
    pub pole: C64,
    /// −adj D̂₀(z_k) D̂₁(z_k) / (det D̂₀)′(z_k).
    pub matrix: Vec<Vec<C64>>,
    /// Max entry deviation from the Richardson limit of (z − z_k) L̂(z).
    pub richardson_deviation: f64,
    /// σ₂/σ₁ of the residue (0 for N = 1).
    pub rank_ratio: f64,
    pub rank: usize,
}

fn rows(m: &SquareMatrix<C64>) -> Vec<Vec<C64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m[(i, j)]).collect()).collect()
}

impl LinearData {
    pub fn new(z_hat: Vec<Vec<C64>>, b: Vec<Vec<C64>>) -> Result<Self> {
        let d = LinearData { z_hat, b };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.z_hat.first().map(|v| v.len()).unwrap_or(0);
        if n == 0 || self.b.len() != self.z_hat.len() + 1 || self.z_hat.iter().chain(&self.b).any(|v| v.len() != n) {
            return Err(Error::InvalidInput("need r+1 Ẑ_i and r+2 B̂_s diagonals of a common size N ≥ 1".into()));
        }
        if self.z_hat.iter().flatten().any(|v| v.norm() == 0.0) {
            return Err(Error::InvalidInput("all entries of Ẑ_i must be nonzero".into()));
        }
        let p = self.poles();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if (p[i] - p[j]).norm() <= 1e-12 * p[i].norm().max(p[j].norm()) {
                    return Err(Error::Singular(format!("poles z_{i} and z_{j} coalesce")));
                }
            }
        }
        Ok(())
    }

    /// Random data with node determinants pairwise separated by at least 0.2.
    pub fn random(rng: &mut impl Rng, n: usize, r: usize) -> Self {
        loop {
            let z_hat: Vec<Vec<C64>> =
                (0..=r).map(|_| (0..n).map(|_| sample::complex_annulus(rng, 0.6, 1.6)).collect()).collect();
            let b = (0..r + 2).map(|_| (0..n).map(|_| sample::complex(rng, 1.0)).collect()).collect();
            let d = LinearData { z_hat, b };
            let p = d.poles();
            let ok = (0..p.len()).all(|i| p[i].norm() > 0.2 && (i + 1..p.len()).all(|j| (p[i] - p[j]).norm() > 0.2));
            if ok {
                return d;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.z_hat[0].len()
    }

    pub fn r(&self) -> usize {
        self.z_hat.len() - 1
    }

    /// z_i = det Ẑ_i, i = 0..r.
    pub fn poles(&self) -> Vec<C64> {
        self.z_hat.iter().map(|v| v.iter().product()).collect()
    }

    fn factor(&self, c: &SquareMatrix<C64>, i: usize) -> SquareMatrix<C64> {
        c.mul(&SquareMatrix::diag(&self.z_hat[i]))
    }

    pub fn d0(&self, z: C64) -> Result<SquareMatrix<C64>> {
        let n = self.n();
        let c = cz_matrix(&z, n)?;
        let one = SquareMatrix::identity(n);
        Ok((0..=self.r()).fold(one.clone(), |acc, i| acc.mul(&one.sub(&self.factor(&c, i)))))
    }

    pub fn d1(&self, z: C64) -> Result<SquareMatrix<C64>> {
        let n = self.n();
        let c = cz_matrix(&z, n)?;
        let mut prefix = SquareMatrix::<C64>::identity(n);
        let mut d1 = SquareMatrix::zeros(n);
        for s in 0..self.b.len() {
            d1 = d1.add(&prefix.mul(&SquareMatrix::diag(&self.b[s])));
            if s <= self.r() {
                prefix = prefix.mul(&self.factor(&c, s).scale(&C64::new(-1.0, 0.0)));
            }
        }
        Ok(d1)
    }

    /// D̂(z,x) = D̂₀x + D̂₁.
    pub fn d(&self, z: C64, x: C64) -> Result<SquareMatrix<C64>> {
        Ok(self.d0(z)?.scale(&x).add(&self.d1(z)?))
    }

    /// R(x,z) = det D̂(z,x).
    pub fn curve(&self, z: C64, x: C64) -> Result<C64> {
        Ok(self.d(z, x)?.det())
    }

    /// det D̂₀(z) = Π(1 − z_i/z).
    pub fn det_d0(&self, z: C64) -> C64 {
        self.poles().iter().map(|zi| 1.0 - zi / z).product()
    }

    fn near_pole(&self, z: C64) -> Option<usize> {
        self.poles().iter().position(|zi| (z - zi).norm() <= 1e-12 * zi.norm().max(1.0))
    }

    pub fn lax(&self, z: C64) -> Result<LaxAt> {
        if let Some(k) = self.near_pole(z) {
            return Err(Error::Pole(format!("z = {z} is the pole z_{k} of L̂")));
        }
        let d0 = self.d0(z)?;
        let d1 = self.d1(z)?;
        let (inv, cond) = d0.inverse_checked(MAX_COND)?;
        let l = inv.mul(&d1).scale(&C64::new(-1.0, 0.0));
        Ok(LaxAt { d0, d1, l, cond })
    }

    /// Residues at z_0..z_r with a Richardson cross-check and the σ₂/σ₁ rank test.
    pub fn residues(&self) -> Result<Vec<Residue>> {
        let poles = self.poles();
        let n = self.n();
        let mut out = Vec::with_capacity(poles.len());
        for (k, &zk) in poles.iter().enumerate() {
            let slope: C64 = poles.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, zi)| 1.0 - zi / zk).product::<C64>() / zk;
            let res = self.d0(zk)?.adjugate().mul(&self.d1(zk)?).scale(&(-1.0 / slope));

            let gap = poles
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, zi)| (zi - zk).norm())
                .fold(zk.norm(), f64::min);
            let h = C64::from_polar(gap * 1e-3, 0.7);
            let g = |t: C64| -> Result<SquareMatrix<C64>> { Ok(self.lax(zk + t)?.l.scale(&t)) };
            let (g1, g2, g4) = (g(h)?, g(h / 2.0)?, g(h / 4.0)?);
            let two = C64::new(2.0, 0.0);
            let r1 = g2.scale(&two).sub(&g1);
            let r2 = g4.scale(&two).sub(&g2);
            let lim = r2.scale(&C64::new(4.0 / 3.0, 0.0)).sub(&r1.scale(&C64::new(1.0 / 3.0, 0.0)));
            let dev = lim.sub(&res).frobenius() / res.frobenius().max(1e-300);

            let sv = res.singular_values();
            let ratio = if n == 1 { 0.0 } else { sv[1] / sv[0] };
            let rank = sv.iter().filter(|&&s| s > 1e-10 * sv[0]).count();
            out.push(Residue { pole: zk, matrix: rows(&res), richardson_deviation: dev, rank_ratio: ratio, rank });
        }
        Ok(out)
    }

    /// The constant term L̂(∞): Ĉ_∞ is nilpotent, so D̂₀(∞) is unipotent.
    pub fn lax_at_infinity(&self) -> SquareMatrix<C64> {
        let n = self.n();
        let mut c = SquareMatrix::<C64>::zeros(n);
        for i in 0..n.saturating_sub(1) {
            c[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        let one = SquareMatrix::identity(n);
        let neg = C64::new(-1.0, 0.0);
        let d0 = (0..=self.r()).fold(one.clone(), |acc, i| acc.mul(&one.sub(&self.factor(&c, i))));
        let mut prefix = one.clone();
        let mut d1 = SquareMatrix::zeros(n);
        for s in 0..self.b.len() {
            d1 = d1.add(&prefix.mul(&SquareMatrix::diag(&self.b[s])));
            if s <= self.r() {
                prefix = prefix.mul(&self.factor(&c, s).scale(&neg));
            }
        }
        let inv = d0.inverse_checked(f64::INFINITY).expect("unipotent").0;
        inv.mul(&d1).scale(&neg)
    }

    /// f = L̂ − Σ Res_k/(z − z_k) should be analytic inside the circle |w − center| = radius even when
    /// the circle encloses a pole; returns the relative gap between f(at) and its Cauchy integral.
    pub fn cauchy_reconstruction_residual(&self, center: C64, radius: f64, at: C64, samples: usize) -> Result<f64> {
        if (at - center).norm() >= radius {
            return Err(Error::InvalidInput("evaluation point must lie inside the circle".into()));
        }
        let residues: Vec<(C64, SquareMatrix<C64>)> = self
            .residues()?
            .into_iter()
            .map(|r| (r.pole, SquareMatrix::from_fn(self.n(), |i, j| r.matrix[i][j])))
            .collect();
        let f = |w: C64| -> Result<SquareMatrix<C64>> {
            let mut m = self.lax(w)?.l;
            for (zk, rk) in &residues {
                m = m.sub(&rk.scale(&(1.0 / (w - zk))));
            }
            Ok(m)
        };
        // (1/2πi)∮ f(w)/(w − at) dw with w = center + ρe^{iθ}, dw = iρe^{iθ}dθ.
        let mut acc = SquareMatrix::zeros(self.n());
        for k in 0..samples {
            let e = C64::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64);
            let w = center + e;
            acc = acc.add(&f(w)?.scale(&(e / (w - at))));
        }
        acc = acc.scale(&C64::new(1.0 / samples as f64, 0.0));
        let direct = f(at)?;
        Ok(acc.sub(&direct).frobenius() / direct.frobenius().max(1.0))
    }

    /// Roots x of R(x,z) = det(xD̂₀ + D̂₁), from interpolation of the degree-N polynomial in x.
    pub fn curve_points(&self, z: C64) -> Result<Vec<C64>> {
        let n = self.n();
        let nodes: Vec<C64> = (0..=n).map(|k| C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / (n + 1) as f64)).collect();
        let vals: Vec<C64> = nodes.iter().map(|&x| self.curve(z, x)).collect::<Result<_>>()?;
        // Discrete Fourier inversion on the unit circle gives the monomial coefficients.
        let coef: Vec<C64> = (0..=n)
            .map(|j| {
                nodes.iter().zip(&vals).map(|(x, v)| v * x.powu(j as u32).conj()).sum::<C64>() / (n + 1) as f64
            })
            .collect();
        let lead = coef[n];
        if lead.norm() <= 1e-14 * coef.iter().map(|c| c.norm()).fold(0.0, f64::max) {
            return Err(Error::Numerical(format!("R(x,z) degenerates in x at z = {z}")));
        }
        let comp = SquareMatrix::from_fn(n, |i, j| {
            if i == 0 {
                -coef[n - 1 - j] / lead
            } else if j + 1 == i {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(comp.eigenvalues())
    }

    /// |det(x − L̂(z))| at each curve point over z, relative to Π(|x| + |λ_i|) with λ the spectrum of L̂.
    pub fn curve_check_residuals(&self, z: C64) -> Result<Vec<f64>> {
        let l = self.lax(z)?.l;
        let ev = l.eigenvalues();
        let n = self.n();
        self.curve_points(z)?
            .into_iter()
            .map(|x| {
                let m = SquareMatrix::identity(n).scale(&x).sub(&l);
                let scale: f64 = ev.iter().map(|e| x.norm() + e.norm()).product::<f64>().max(1e-300);
                Ok(m.det().norm() / scale)
            })
            .collect()
    }

    /// |det(x − L̂) − R(x,z)/det D̂₀(z)| relative.
    pub fn charpoly_residual(&self, z: C64, x: C64) -> Result<f64> {
        let l = self.lax(z)?.l;
        let lhs = SquareMatrix::identity(self.n()).scale(&x).sub(&l).det();
        let rhs = self.curve(z, x)? / self.det_d0(z);
        Ok((lhs - rhs).norm() / rhs.norm().max(1.0))
    }
}

/// Summary consumed by the CLI.
#[derive(Clone, Debug, Serialize)]
pub struct LaxReport {
    pub poles: Vec<C64>,
    pub residue_ranks: Vec<usize>,
    pub rank_ratios: Vec<f64>,
    pub richardson_deviations: Vec<f64>,
    pub curve_check_residuals: Vec<f64>,
}

pub fn lax_report(data: &LinearData, sample_z: &[C64]) -> Result<LaxReport> {
    data.validate()?;
    let res = data.residues()?;
    let mut curve = Vec::new();
    for &z in sample_z {
        curve.extend(data.curve_check_residuals(z)?);
    }
    Ok(LaxReport {
        poles: data.poles(),
        residue_ranks: res.iter().map(|r| r.rank).collect(),
        rank_ratios: res.iter().map(|r| r.rank_ratio).collect(),
        richardson_deviations: res.iter().map(|r| r.richardson_deviation).collect(),
        curve_check_residuals: curve,
    })
}
