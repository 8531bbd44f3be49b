//! Essential spectral radius and the family comparison harness.
//!
//! The essential spectral radius ρ of a consensus matrix is the largest
//! eigenvalue modulus after removing one copy of the consensus eigenvalue 1
//! (and is defined as 1 when the unit eigenvalue is not simple). It governs
//! the asymptotic convergence rate: the disagreement decays like ρᵗ.
//!
//! Three evaluation paths are available, and every report records which one
//! ran:
//!
//! * `KroneckerClosedForm` — for a block Kronecker strategy with seed `A`,
//!   ρ(M) = ρ(A)^(1/k) without ever forming `M`.
//! * `CirculantDFT` — a Cayley matrix over an abelian group has eigenvalues
//!   `λ_χ = Σ_g π(g) χ(g)` over the group characters, a multidimensional
//!   DFT of the generator.
//! * `NumericQR` — the dense eigensolver of [`crate::matlin`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::AbelianGroup;
use crate::matlin::{eigenvalues_with_caps, Matrix, Spectrum};
use crate::strategies::{
    deadbeat_seed, uniform_generator, validate_consensus_with_caps, Family, GeneratorMap, Strategy,
    UNIT_CLUSTER_TOL,
};
use crate::Caps;

/// Which evaluation path produced a spectrum report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumMethod {
    #[serde(rename = "kronecker_closed_form")]
    KroneckerClosedForm,
    #[serde(rename = "circulant_dft")]
    CirculantDFT,
    #[serde(rename = "numeric_qr")]
    NumericQR,
}

impl std::fmt::Display for SpectrumMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SpectrumMethod::KroneckerClosedForm => "kronecker_closed_form",
            SpectrumMethod::CirculantDFT => "circulant_dft",
            SpectrumMethod::NumericQR => "numeric_qr",
        };
        f.write_str(s)
    }
}

/// Essential spectral radius with provenance.
///
/// `eigenvalues` holds the full spectrum for the paths that compute one
/// (`NumericQR`, `CirculantDFT`) and is empty for the closed form, which
/// only determines ρ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(with = "complex_pairs")]
    pub eigenvalues: Vec<Complex64>,
    pub ess_radius: f64,
    pub method: SpectrumMethod,
    /// True when the unit eigenvalue is not simple, which forces ρ = 1.
    pub dim_ker_flag: bool,
}

/// Essential spectral radius of a multiset of eigenvalues: drop one
/// instance nearest to 1 (when within the cluster tolerance) and take the
/// largest remaining modulus; a repeated unit eigenvalue forces (1, true).
pub fn ess_radius_of_eigenvalues(eigs: &[Complex64]) -> (f64, bool) {
    let unit_count = eigs
        .iter()
        .filter(|z| (*z - 1.0).norm() <= UNIT_CLUSTER_TOL)
        .count();
    if unit_count > 1 {
        return (1.0, true);
    }
    let nearest = eigs
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (*a - 1.0).norm().total_cmp(&(*b - 1.0).norm()))
        .map(|(i, z)| (i, (z - 1.0).norm()));
    let skip = match nearest {
        Some((i, d)) if d <= UNIT_CLUSTER_TOL => Some(i),
        _ => None,
    };
    let rho = eigs
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max);
    (rho, false)
}

/// Essential spectral radius by the numeric eigensolver.
pub fn essential_spectral_radius(m: &Matrix) -> Result<SpectrumReport> {
    essential_spectral_radius_with_caps(m, &Caps::default())
}

pub fn essential_spectral_radius_with_caps(m: &Matrix, caps: &Caps) -> Result<SpectrumReport> {
    let spectrum = eigenvalues_with_caps(m, caps)?;
    let (ess_radius, dim_ker_flag) = ess_radius_of_eigenvalues(&spectrum.eigenvalues);
    Ok(SpectrumReport {
        eigenvalues: spectrum.eigenvalues,
        ess_radius,
        method: SpectrumMethod::NumericQR,
        dim_ker_flag,
    })
}

/// ρ of the block Kronecker strategy built from seed `a` with exponent `k`,
/// namely ρ(a)^(1/k), computed without forming the large matrix.
///
/// The seed must pass the consensus checks; otherwise the closed form does
/// not apply and a domain error is returned.
pub fn kron_ess_radius(a: &Matrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("exponent k must be ≥ 1".into()));
    }
    let caps = Caps::default();
    let report = validate_consensus_with_caps(a, None, &caps)?;
    if let Some(reason) = report.first_failure() {
        return Err(Error::Domain(format!(
            "closed form needs a valid seed: {reason}"
        )));
    }
    let spec = essential_spectral_radius_with_caps(a, &caps)?;
    Ok(spec.ess_radius.powf(1.0 / k as f64))
}

/// Full spectrum of the Cayley matrix generated by `pi` over
/// `Z_{d₁} × … × Z_{dm}`: for every group element `m⃗`, the character sum
/// `λ_m⃗ = Σ_g π(g) · exp(2πi Σ_j m_j g_j / d_j)`.
pub fn cayley_spectrum_dft(group_dims: &[usize], pi: &GeneratorMap) -> Result<Spectrum> {
    let group = AbelianGroup::new(group_dims)?;
    let mut support: Vec<(Vec<usize>, f64)> = Vec::new();
    for (g, w) in pi {
        support.push((group.canonicalize(g)?, *w));
    }
    let order = group.order();
    let tau = std::f64::consts::TAU;
    let mut eigenvalues = Vec::with_capacity(order);
    for idx in 0..order {
        let chi = group.element_at(idx);
        let mut lambda = Complex64::new(0.0, 0.0);
        for (g, w) in &support {
            let phase: f64 = chi
                .iter()
                .zip(g)
                .zip(group.dims())
                .map(|((m, gj), d)| tau * (*m as f64) * (*gj as f64) / (*d as f64))
                .sum();
            lambda += Complex64::from_polar(*w, phase);
        }
        eigenvalues.push(lambda);
    }
    // The character formula is exact; report the trace defect as residual.
    let diag: f64 = support
        .iter()
        .filter(|(g, _)| g.iter().all(|x| *x == 0))
        .map(|(_, w)| w)
        .sum();
    let sum: Complex64 = eigenvalues.iter().sum();
    let residual = (sum - diag * order as f64).norm();
    Ok(Spectrum {
        eigenvalues,
        residual,
    })
}

/// Essential spectral radius of a Cayley strategy via the character sum.
pub fn cayley_ess_radius(group_dims: &[usize], pi: &GeneratorMap) -> Result<SpectrumReport> {
    let spectrum = cayley_spectrum_dft(group_dims, pi)?;
    let (ess_radius, dim_ker_flag) = ess_radius_of_eigenvalues(&spectrum.eigenvalues);
    Ok(SpectrumReport {
        eigenvalues: spectrum.eigenvalues,
        ess_radius,
        method: SpectrumMethod::CirculantDFT,
        dim_ker_flag,
    })
}

/// Spectrum report for a strategy, using the cheapest exact path: the
/// Kronecker closed form when a seed is attached, the numeric eigensolver
/// otherwise. Cayley strategies built in-process should prefer
/// [`cayley_ess_radius`], which keeps the generator and uses the DFT.
pub fn strategy_spectrum(s: &Strategy) -> Result<SpectrumReport> {
    strategy_spectrum_with_caps(s, &Caps::default())
}

pub fn strategy_spectrum_with_caps(s: &Strategy, caps: &Caps) -> Result<SpectrumReport> {
    if s.family() == Family::BlockKronecker {
        if let (Some(seed), Some(k)) = (s.seed(), s.k()) {
            let rho = kron_ess_radius(seed, k)?;
            return Ok(SpectrumReport {
                eigenvalues: Vec::new(),
                ess_radius: rho,
                method: SpectrumMethod::KroneckerClosedForm,
                dim_ker_flag: false,
            });
        }
    }
    essential_spectral_radius_with_caps(s.matrix(), caps)
}

/// Greedy multiset matching of two spectra: every value in `a` must pair
/// with a distinct value in `b` within `tol`.
pub fn multisets_match(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for za in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .min_by(|(_, x), (_, y)| (za - *x).norm().total_cmp(&(za - *y).norm()));
        match best {
            Some((i, zb)) if (za - zb).norm() <= tol => used[i] = true,
            _ => return false,
        }
    }
    true
}

/// One row of the family comparison table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub family: String,
    pub n_agents: usize,
    pub n: usize,
    pub k: usize,
    pub nu: usize,
    pub ess_radius: f64,
    pub method: SpectrumMethod,
    /// `(1 - ρ) · N^(2/(ν-1))` for the Cayley rows: stays bounded as N
    /// grows, witnessing how close ρ is forced to 1 by the degree budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cayley_witness: Option<f64>,
    /// Leading closed-form cost of the deadbeat strategy at the requested γ.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deadbeat_lqr_cost: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Comparison {
    pub gamma: f64,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    /// CSV with columns `family,N,n,k,nu,ess_radius,method`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,N,n,k,nu,ess_radius,method\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.family, r.n_agents, r.n, r.k, r.nu, r.ess_radius, r.method
            ));
        }
        out
    }
}

/// Symmetric window of `n` integer offsets centred at 0, the matched-degree
/// connection set used for the Cayley column of the comparison.
pub fn centered_window(n: usize) -> Vec<Vec<i64>> {
    let lo = -((n as i64 - 1) / 2);
    (0..n as i64).map(|j| vec![lo + j]).collect()
}

/// Compares strategy families of equal in-degree `n` on `N = n^k` agents
/// for each `k` in `k_range`.
///
/// Rows per `k`: the deadbeat block Kronecker strategy (ρ = 0), a general
/// block Kronecker strategy from `general_seed` (default `(I + 2·𝟙𝟙ᵀ/n)/3`,
/// which has ρ = 1/3), and the Cayley strategy on `Z_N` with the uniform
/// generator over [`centered_window`]`(n)`.
pub fn compare_families(
    n: usize,
    k_range: &[usize],
    gamma: f64,
    general_seed: Option<&Matrix>,
) -> Result<Comparison> {
    if n < 2 {
        return Err(Error::Domain("family comparison needs n ≥ 2".into()));
    }
    let default_seed = Matrix::identity(n)
        .scale(1.0 / 3.0)
        .add(&deadbeat_seed(n).scale(2.0 / 3.0))
        .expect("same shape");
    let seed = general_seed.unwrap_or(&default_seed);
    let window = centered_window(n);
    let pi = uniform_generator(&window);

    let rows: Result<Vec<Vec<ComparisonRow>>> = k_range
        .par_iter()
        .map(|&k| {
            let n_agents = n
                .checked_pow(k as u32)
                .ok_or_else(|| Error::Size(format!("{n}^{k} overflows")))?;
            let deadbeat = ComparisonRow {
                family: "kronecker_deadbeat".into(),
                n_agents,
                n,
                k,
                nu: n,
                ess_radius: kron_ess_radius(&deadbeat_seed(n), k)?,
                method: SpectrumMethod::KroneckerClosedForm,
                cayley_witness: None,
                deadbeat_lqr_cost: Some(crate::lqr::j_closed_form_deadbeat(n, k, gamma)),
            };
            let general = ComparisonRow {
                family: "kronecker_general".into(),
                n_agents,
                n,
                k,
                nu: n,
                ess_radius: kron_ess_radius(seed, k)?,
                method: SpectrumMethod::KroneckerClosedForm,
                cayley_witness: None,
                deadbeat_lqr_cost: None,
            };
            let cayley_report = cayley_ess_radius(&[n_agents], &pi)?;
            let rho = cayley_report.ess_radius;
            let witness_exp = 2.0 / (n as f64 - 1.0);
            let cayley = ComparisonRow {
                family: "cayley".into(),
                n_agents,
                n,
                k,
                nu: n,
                ess_radius: rho,
                method: cayley_report.method,
                cayley_witness: Some((1.0 - rho) * (n_agents as f64).powf(witness_exp)),
                deadbeat_lqr_cost: None,
            };
            Ok(vec![deadbeat, general, cayley])
        })
        .collect();
    Ok(Comparison {
        gamma,
        rows: rows?.into_iter().flatten().collect(),
    })
}

/// Serialize complex numbers as `[re, im]` pairs for stable JSON output.
mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategies::{block_kron_strategy, random_normal_seed, random_symmetric_seed};
    use rand::Rng;
    use std::f64::consts::PI;

    fn circulant_third() -> GeneratorMap {
        uniform_generator(&[vec![-1], vec![0], vec![1]])
    }

    #[test]
    fn deadbeat_radius_is_zero() {
        let report = essential_spectral_radius(&deadbeat_seed(4)).unwrap();
        assert!(report.ess_radius < 1e-12);
        assert!(!report.dim_ker_flag);
        assert_eq!(report.method, SpectrumMethod::NumericQR);
    }

    #[test]
    fn identity_flags_repeated_unit_eigenvalue() {
        let report = essential_spectral_radius(&Matrix::identity(3)).unwrap();
        assert!(report.dim_ker_flag);
        assert_eq!(report.ess_radius, 1.0);
    }

    #[test]
    fn circulant_window_radius_at_nine() {
        let s = crate::strategies::cayley_strategy(&[9], &circulant_third()).unwrap();
        let numeric = essential_spectral_radius(s.matrix()).unwrap();
        let expect = (1.0 + 2.0 * (2.0 * PI / 9.0).cos()) / 3.0;
        assert!(
            (numeric.ess_radius - expect).abs() < 1e-10,
            "{}",
            numeric.ess_radius
        );
        assert!((expect - 0.8440).abs() < 1e-4);
    }

    #[test]
    fn kron_radius_closed_form() {
        assert!(kron_ess_radius(&deadbeat_seed(3), 5).unwrap() < 1e-12);

        let a = Matrix::from_rows(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]]);
        let rho = kron_ess_radius(&a, 3).unwrap();
        assert!((rho - 3.0_f64.powf(-1.0 / 3.0)).abs() < 1e-12);
        assert!((rho - 0.69336).abs() < 1e-5);
        // cross-check against the numeric radius of the 8x8 matrix
        let m = block_kron_strategy(&a, 3).unwrap();
        let numeric = essential_spectral_radius(m.matrix()).unwrap();
        assert!((rho - numeric.ess_radius).abs() < 1e-7);

        assert!((kron_ess_radius(&a, 1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!(kron_ess_radius(&Matrix::identity(2), 2).is_err());
    }

    #[test]
    fn closed_form_matches_numeric_for_random_seeds() {
        let mut rng = crate::rng::seeded(61);
        for _ in 0..6 {
            let (n, k) = ([(2usize, 4usize), (2, 3), (3, 3), (3, 2)])[rng.random_range(0..4usize)];
            let a = random_normal_seed(n, &mut rng, 0.85);
            let closed = kron_ess_radius(&a, k).unwrap();
            let m = block_kron_strategy(&a, k).unwrap();
            let numeric = essential_spectral_radius(m.matrix()).unwrap();
            assert!(
                (closed - numeric.ess_radius).abs() < 1e-7,
                "n={n} k={k}: {closed} vs {}",
                numeric.ess_radius
            );
        }
    }

    #[test]
    fn dft_closed_forms() {
        // uniform window on Z_N: λ_m = (1 + 2 cos(2π m / N)) / 3
        let n = 11;
        let spec = cayley_spectrum_dft(&[n], &circulant_third()).unwrap();
        for (m, z) in spec.eigenvalues.iter().enumerate() {
            let expect = (1.0 + 2.0 * (2.0 * PI * m as f64 / n as f64).cos()) / 3.0;
            assert!((z.re - expect).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        assert!(spec.residual < 1e-9);

        // identity generator: all eigenvalues 1
        let mut pi = GeneratorMap::new();
        pi.insert(vec![0], 1.0);
        let spec = cayley_spectrum_dft(&[6], &pi).unwrap();
        assert!(spec.eigenvalues.iter().all(|z| (z - 1.0).norm() < 1e-12));

        // torus generator: λ_(p,q) = (1 + e^{2πip/3} + e^{2πiq/3}) / 3
        let pi = uniform_generator(&[vec![0, 0], vec![1, 0], vec![0, 1]]);
        let spec = cayley_spectrum_dft(&[3, 3], &pi).unwrap();
        for (idx, z) in spec.eigenvalues.iter().enumerate() {
            let (p, q) = (idx / 3, idx % 3);
            let expect = (Complex64::new(1.0, 0.0)
                + Complex64::from_polar(1.0, 2.0 * PI * p as f64 / 3.0)
                + Complex64::from_polar(1.0, 2.0 * PI * q as f64 / 3.0))
                / 3.0;
            assert!((z - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_matches_numeric_qr() {
        for dims in [vec![5usize], vec![9], vec![27], vec![3, 3]] {
            let pi = if dims.len() == 1 {
                circulant_third()
            } else {
                uniform_generator(&[vec![0, 0], vec![1, 0], vec![0, 1]])
            };
            let dft = cayley_spectrum_dft(&dims, &pi).unwrap();
            let s = crate::strategies::cayley_strategy(&dims, &pi).unwrap();
            let qr = crate::matlin::eigenvalues(s.matrix()).unwrap();
            assert!(
                multisets_match(&dft.eigenvalues, &qr.eigenvalues, 1e-7),
                "multiset mismatch for {dims:?}"
            );
        }
    }

    #[test]
    fn validated_strategies_stay_inside_unit_disc() {
        let mut rng = crate::rng::seeded(77);
        for _ in 0..5 {
            let a = random_symmetric_seed(3, &mut rng, -0.6, 0.6);
            let s = block_kron_strategy(&a, 2).unwrap();
            let rho = strategy_spectrum(&s).unwrap().ess_radius;
            assert!((0.0..1.0).contains(&rho));
        }
    }

    #[test]
    fn strategy_dispatch_uses_closed_form_for_kronecker() {
        let s = block_kron_strategy(&deadbeat_seed(3), 4).unwrap();
        let report = strategy_spectrum(&s).unwrap();
        assert_eq!(report.method, SpectrumMethod::KroneckerClosedForm);
        assert_eq!(report.ess_radius, 0.0);
        assert!(report.eigenvalues.is_empty());

        let c = crate::strategies::cayley_strategy(&[5], &circulant_third()).unwrap();
        let report = strategy_spectrum(&c).unwrap();
        assert_eq!(report.method, SpectrumMethod::NumericQR);
    }

    #[test]
    fn comparison_table() {
        let cmp = compare_families(3, &[2, 3, 4], 0.0, None).unwrap();
        assert_eq!(cmp.rows.len(), 9);
        for k in [2usize, 3, 4] {
            let deadbeat = cmp
                .rows
                .iter()
                .find(|r| r.family == "kronecker_deadbeat" && r.k == k)
                .unwrap();
            let cayley = cmp
                .rows
                .iter()
                .find(|r| r.family == "cayley" && r.k == k)
                .unwrap();
            assert_eq!(deadbeat.ess_radius, 0.0);
            assert!(deadbeat.ess_radius < cayley.ess_radius);
            assert!(cayley.cayley_witness.unwrap() > 0.0);
        }
        // ρ for the Z_81 window
        let c81 = cmp
            .rows
            .iter()
            .find(|r| r.family == "cayley" && r.k == 4)
            .unwrap();
        let expect = (1.0 + 2.0 * (2.0 * PI / 81.0).cos()) / 3.0;
        assert!((c81.ess_radius - expect).abs() < 1e-12);
        assert!((expect - 0.99799).abs() < 1e-5);

        let csv = cmp.to_csv();
        assert!(csv.starts_with("family,N,n,k,nu,ess_radius,method\n"));
        assert_eq!(csv.lines().count(), 10);
        assert!(csv.contains("kronecker_deadbeat,81,3,4,3,0,kronecker_closed_form"));
    }

    // finite-sample scaling consistency: (1-ρ)·N is bounded and in fact
    // decreasing over N = 9, 27, 81, 243 for the degree-3 window on Z_N
    #[test]
    fn cayley_witness_trend() {
        let mut witnesses = Vec::new();
        for n_agents in [9usize, 27, 81, 243] {
            let rho = cayley_ess_radius(&[n_agents], &circulant_third())
                .unwrap()
                .ess_radius;
            witnesses.push((1.0 - rho) * n_agents as f64);
        }
        for w in &witnesses {
            assert!(*w > 0.0 && *w <= witnesses[0] + 1e-12);
        }
        for pair in witnesses.windows(2) {
            assert!(pair[1] <= pair[0], "witness not monotone: {witnesses:?}");
        }
    }

    // ρ(M) = ρ(A)^(1/k) behaves like 1 - μ/k for growing k: the
    // log-log slope of (1 - ρ) against k is -1 within 20%.
    #[test]
    fn large_k_trend() {
        let a = Matrix::from_rows(&[&[2.0 / 3.0, 1.0 / 3.0], &[1.0 / 3.0, 2.0 / 3.0]]);
        let pts: Vec<(f64, f64)> = [2usize, 3, 4, 5]
            .iter()
            .map(|&k| {
                let rho = kron_ess_radius(&a, k).unwrap();
                ((k as f64).ln(), (1.0 - rho).ln())
            })
            .collect();
        let slope = least_squares_slope(&pts);
        assert!(
            (slope - (-1.0)).abs() <= 0.2,
            "fitted slope {slope} outside 20% of -1"
        );
    }

    fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
        let my = pts.iter().map(|(_, y)| y).sum::<f64>() / n;
        let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
        num / den
    }

    #[test]
    fn multiset_matcher() {
        let a = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let b = vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 1e-9)];
        assert!(multisets_match(&a, &b, 1e-8));
        assert!(!multisets_match(&a, &b, 1e-10));
        assert!(!multisets_match(&a, &b[..1], 1e-3));
    }

    #[test]
    fn report_serializes_complex_pairs() {
        let report = essential_spectral_radius(&deadbeat_seed(2)).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"eigenvalues\":[["));
        let back: SpectrumReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.eigenvalues.len(), 2);
    }
}
