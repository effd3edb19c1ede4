//! Tabulated criteria for fast search over `(T1, T2)` within one `(n, r, l)` cell.
//!
//! On the z scale the Fisher blocks factor as
//! `H_k = (τ P⁰_k, P¹_k/(4τ²), P²_k/(2√τ))` where `P_k` integrates
//! `(a², b², ab)·nφ·P(Bin(n−1, Φ) ≤ k−1)` with `a = z − λ`, `b = 1 − z² + zλ`,
//! so one table per `n` serves every prior draw. The duration blocks depend
//! on the draw and are tabulated per cell. Lookups use cubic Hermite
//! interpolation with exact slopes.

use crate::design::prior::PriorSample;
use crate::lifetime::LogNormalParams;
use crate::numerics::{ln_binomial, std_normal_hazard, std_normal_ln_sf, std_normal_pdf, Z_TRUNCATION};

const GRID_H: f64 = 0.02;

const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Position of `z` relative to the grid starting at `-Z_TRUNCATION`.
#[derive(Debug, Clone, Copy)]
enum Locus {
    Below,
    /// Panel index and Hermite weights for `(y0, m0, y1, m1)`.
    Inside(usize, [f64; 4]),
}

fn locate(z: f64) -> Locus {
    let s = (z + Z_TRUNCATION) / GRID_H;
    if s.is_nan() || s <= 0.0 {
        return Locus::Below;
    }
    let j = s.floor();
    let t = s - j;
    let t2 = t * t;
    let t3 = t2 * t;
    Locus::Inside(
        j as usize,
        [
            2.0 * t3 - 3.0 * t2 + 1.0,
            (t3 - 2.0 * t2 + t) * GRID_H,
            -2.0 * t3 + 3.0 * t2,
            (t3 - t2) * GRID_H,
        ],
    )
}

fn node(j: usize) -> f64 {
    -Z_TRUNCATION + j as f64 * GRID_H
}

fn gl_nodes(panel: usize) -> [f64; 5] {
    let mid = node(panel) + 0.5 * GRID_H;
    GL_X.map(|x| mid + 0.5 * GRID_H * x)
}

/// Hermite data on nodes `0..len`; beyond the last node the last value holds.
#[derive(Debug, Clone, Default)]
struct Curve {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Curve {
    #[inline]
    fn at(&self, locus: Locus) -> f64 {
        match locus {
            Locus::Below => self.values[0],
            Locus::Inside(j, w) => {
                if j + 1 >= self.values.len() {
                    *self.values.last().expect("nonempty curve")
                } else {
                    w[0] * self.values[j] + w[1] * self.slopes[j] + w[2] * self.values[j + 1] + w[3] * self.slopes[j + 1]
                }
            }
        }
    }
}

/// `P(Bin(m, p) = j)` for `j = 0..=m`, from `ln p` and `ln(1 − p)`.
fn binomial_pmf(m: usize, ln_p: f64, ln_q: f64, ln_choose: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.extend((0..=m).map(|j| (ln_choose[j] + j as f64 * ln_p + (m - j) as f64 * ln_q).exp()));
}

/// Order-statistic weights at `z` for all ranks `k = 1..=n`.
struct RankWeights {
    n: usize,
    choose_n: Vec<f64>,
    choose_n1: Vec<f64>,
    pmf: Vec<f64>,
    tails: Vec<f64>,
}

impl RankWeights {
    fn new(n: usize) -> Self {
        Self {
            n,
            choose_n: (0..=n).map(|j| ln_binomial(n, j)).collect(),
            choose_n1: (0..n).map(|j| ln_binomial(n - 1, j)).collect(),
            pmf: Vec::with_capacity(n + 1),
            tails: vec![0.0; n],
        }
    }

    /// `b[k−1] = P(Bin(n−1, Φ(z)) ≤ k−1)`.
    fn density_weights(&mut self, z: f64, b: &mut [f64]) {
        binomial_pmf(self.n - 1, std_normal_ln_sf(-z), std_normal_ln_sf(z), &self.choose_n1, &mut self.pmf);
        let mut acc = 0.0;
        for k in 0..self.n {
            if k < self.n - 1 {
                acc += self.pmf[k];
                b[k] = acc.min(1.0);
            } else {
                b[k] = 1.0;
            }
        }
    }

    /// `s[k−1] = P(Bin(n, Φ(z)) ≤ k−1) = 1 − F_{k:n}` and
    /// `c[k−1] = Σ_{i≤k} F_{i:n}`; upper tails summed directly to avoid cancellation.
    fn survival_and_counts(&mut self, z: f64, s: &mut [f64], c: &mut [f64]) {
        binomial_pmf(self.n, std_normal_ln_sf(-z), std_normal_ln_sf(z), &self.choose_n, &mut self.pmf);
        let mut lower = 0.0;
        for k in 0..self.n {
            lower += self.pmf[k];
            s[k] = lower.min(1.0);
        }
        let mut upper = 0.0;
        for i in (1..=self.n).rev() {
            upper += self.pmf[i];
            self.tails[i - 1] = upper;
        }
        let mut acc = 0.0;
        for k in 0..self.n {
            acc += self.tails[k];
            c[k] = acc;
        }
    }
}

/// Hazard-gradient factors `(a², b², ab)` at `z`.
fn hazard_factors(z: f64) -> [f64; 3] {
    let lam = std_normal_hazard(z);
    let a = z - lam;
    let b = 1.0 - z * z + z * lam;
    [a * a, b * b, a * b]
}

/// Draw-independent tables for sample size `n`, all ranks.
#[derive(Debug, Clone)]
pub struct RankTables {
    n: usize,
    fisher: Vec<[Curve; 3]>,
    count: Vec<Curve>,
    ext_len: usize,
    /// `S_k` at extended-grid nodes, `[j * n + k − 1]`.
    surv_node: Vec<f64>,
    /// `S_k` at Gauss nodes of each extended panel, `[(p * 5 + g) * n + k − 1]`.
    surv_gauss: Vec<f64>,
}

impl RankTables {
    /// Tables for `n` units whose duration grid reaches `z_max`.
    pub fn new(n: usize, z_max: f64) -> Self {
        assert!(n >= 1);
        let core_len = ((2.0 * Z_TRUNCATION) / GRID_H).round() as usize + 1;
        let ext_len = (((z_max.max(Z_TRUNCATION) + Z_TRUNCATION) / GRID_H).ceil() as usize + 1).max(core_len);
        let mut w = RankWeights::new(n);
        let nf = n as f64;

        let mut fisher: Vec<[Curve; 3]> = (0..n).map(|_| Default::default()).collect();
        let mut count: Vec<Curve> = (0..n).map(|_| Default::default()).collect();
        let mut b = vec![0.0; n];
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut sum = vec![[0.0; 3]; n];

        let integrand = |z: f64, w: &mut RankWeights, b: &mut [f64]| {
            w.density_weights(z, b);
            (nf * std_normal_pdf(z), hazard_factors(z))
        };

        for j in 0..core_len {
            let z = node(j);
            let (dens, h) = integrand(z, &mut w, &mut b);
            w.survival_and_counts(z, &mut s, &mut c);
            for k in 0..n {
                let g = dens * b[k];
                for comp in 0..3 {
                    fisher[k][comp].values.push(sum[k][comp]);
                    fisher[k][comp].slopes.push(g * h[comp]);
                }
                count[k].values.push(c[k]);
                count[k].slopes.push(g);
            }
            if j + 1 < core_len {
                for (zg, wg) in gl_nodes(j).into_iter().zip(GL_W) {
                    let (dens, h) = integrand(zg, &mut w, &mut b);
                    for k in 0..n {
                        let g = 0.5 * GRID_H * wg * dens * b[k];
                        for comp in 0..3 {
                            sum[k][comp] += g * h[comp];
                        }
                    }
                }
            }
        }

        let mut surv_node = Vec::with_capacity(ext_len * n);
        let mut surv_gauss = Vec::with_capacity(ext_len.saturating_sub(1) * 5 * n);
        for j in 0..ext_len {
            w.survival_and_counts(node(j), &mut s, &mut c);
            surv_node.extend_from_slice(&s);
            if j + 1 < ext_len {
                for zg in gl_nodes(j) {
                    w.survival_and_counts(zg, &mut s, &mut c);
                    surv_gauss.extend_from_slice(&s);
                }
            }
        }

        Self { n, fisher, count, ext_len, surv_node, surv_gauss }
    }

    /// Tables sized for every draw of `sample`.
    pub fn for_sample(n: usize, sample: &PriorSample) -> Self {
        let z_max = sample
            .draws()
            .iter()
            .map(|d| d.z_upper_for_moments())
            .fold(Z_TRUNCATION, f64::max);
        Self::new(n, z_max)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unscaled `P_k` at `z`.
    fn fisher_at(&self, k: usize, locus: Locus) -> [f64; 3] {
        match locus {
            Locus::Below => [0.0; 3],
            _ => {
                let f = &self.fisher[k - 1];
                [f[0].at(locus), f[1].at(locus), f[2].at(locus)]
            }
        }
    }

    fn count_at(&self, k: usize, locus: Locus) -> f64 {
        match locus {
            Locus::Below => 0.0,
            _ => self.count[k - 1].at(locus),
        }
    }

    /// `C_k` prefix table for one draw on the extended grid.
    fn duration_curve(&self, k: usize, params: LogNormalParams) -> Curve {
        let scale = 1.0 / params.tau().sqrt();
        let len = (((params.z_upper_for_moments() + Z_TRUNCATION) / GRID_H).ceil() as usize + 1).min(self.ext_len);
        let mut values = Vec::with_capacity(len);
        let mut slopes = Vec::with_capacity(len);
        let mut acc = params.time_at(-Z_TRUNCATION);
        for j in 0..len {
            let z = node(j);
            values.push(acc);
            slopes.push(self.surv_node[j * self.n + k - 1] * params.time_at(z) * scale);
            if j + 1 < len {
                let mut panel = 0.0;
                for (g, (zg, wg)) in gl_nodes(j).into_iter().zip(GL_W).enumerate() {
                    panel += wg * self.surv_gauss[(j * 5 + g) * self.n + k - 1] * params.time_at(zg);
                }
                acc += 0.5 * GRID_H * scale * panel;
            }
        }
        Curve { values, slopes }
    }
}

/// Criteria at one `(T1, T2)` from the tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub psi: f64,
    pub psi_fail: f64,
    pub psi_dur: f64,
    /// True if some draw has a nonpositive Fisher determinant.
    pub degenerate: bool,
}

struct DrawCell {
    mu: f64,
    sqrt_tau: f64,
    ln_4tau: f64,
    info_l: [f64; 3],
    mean_l: f64,
    c_l: Curve,
    c_r: Curve,
}

/// Tabulated criteria for a fixed `(n, r, l)` and prior sample.
pub struct CellSurface<'a> {
    tables: &'a RankTables,
    r: usize,
    l: usize,
    draws: Vec<DrawCell>,
}

impl<'a> CellSurface<'a> {
    pub fn new(tables: &'a RankTables, r: usize, l: usize, sample: &PriorSample) -> Self {
        assert!(1 <= l && l < r && r <= tables.n);
        let top = locate(Z_TRUNCATION);
        let info_l = tables.fisher_at(l, top);
        let draws = sample
            .draws()
            .iter()
            .map(|&d| {
                let c_l = tables.duration_curve(l, d);
                let mean_l = *c_l.values.last().expect("nonempty");
                DrawCell {
                    mu: d.mu(),
                    sqrt_tau: d.tau().sqrt(),
                    ln_4tau: (4.0 * d.tau()).ln(),
                    info_l,
                    mean_l,
                    c_l,
                    c_r: tables.duration_curve(r, d),
                }
            })
            .collect();
        Self { tables, r, l, draws }
    }

    /// Mean of `E[X_{l:n}]` over draws: `c_f·l + c_t·` this bounds the cost
    /// of every `(T1, T2)` from below.
    pub fn mean_floor_duration(&self) -> f64 {
        self.draws.iter().map(|d| d.mean_l).sum::<f64>() / self.draws.len() as f64
    }

    pub fn evaluate(&self, t1: f64, t2: f64) -> SurfacePoint {
        let t = self.tables;
        let (n, r, l) = (t.n, self.r, self.l);
        let (lt1, lt2) = (t1.ln(), t2.ln());
        let mut psi = 0.0;
        let mut fail = 0.0;
        let mut dur = 0.0;
        let mut degenerate = false;
        for d in &self.draws {
            let z1 = d.sqrt_tau * (lt1 - d.mu);
            let z2 = d.sqrt_tau * (lt2 - d.mu);
            let a = locate(z1);
            let b = locate(z2);

            let pn1 = t.fisher_at(n, a);
            let pr1 = t.fisher_at(r, a);
            let pr2 = t.fisher_at(r, b);
            let pl2 = t.fisher_at(l, b);
            let p: [f64; 3] = std::array::from_fn(|c| d.info_l[c] + pn1[c] + pr2[c] - pl2[c] - pr1[c]);
            let det = p[0] * p[1] - p[2] * p[2];
            if det > 0.0 {
                psi += det.ln() - d.ln_4tau;
            } else {
                degenerate = true;
            }

            fail += l as f64 + t.count_at(n, a) + t.count_at(r, b) - t.count_at(l, b) - t.count_at(r, a);

            let c = |curve: &Curve, locus: Locus, z: f64| match locus {
                Locus::Below => (d.mu + z / d.sqrt_tau).exp(),
                _ => curve.at(locus),
            };
            dur += d.mean_l + t1 + c(&d.c_r, b, z2) - c(&d.c_l, b, z2) - c(&d.c_r, a, z1);
        }
        let m = self.draws.len() as f64;
        SurfacePoint { psi: psi / m, psi_fail: fail / m, psi_dur: dur / m, degenerate }
    }
}
