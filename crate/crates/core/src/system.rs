//! The detector system: Hamiltonian, coupling operators, an orthonormal
//! Hermitian operator basis, Heisenberg-picture coefficients u_AB(t) and the
//! Bohr-frequency eigenoperator decomposition.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigendecompose, matrix_exponential, ComplexMatrix, HermitianSpectrum, RealMatrix, C64, I, ONE, ZERO,
};

/// Tolerance for Hermiticity of user-supplied operators (Frobenius-relative).
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Maximum accepted reconstruction residual of σ_A(t) from the basis.
pub const CLOSURE_TOL: f64 = 1e-8;

fn check_hermitian(m: &ComplexMatrix, what: &str) -> Result<()> {
    let residual = m.hermiticity_residual();
    let scale = m.frobenius_norm().max(1.0);
    if residual > HERMITIAN_TOL * scale {
        return Err(Error::Validation {
            path: what.to_string(),
            reason: format!("not Hermitian (residual {residual:.3e})"),
        });
    }
    Ok(())
}

/// Finite-dimensional system with Hermitian Hamiltonian and labeled
/// Hermitian coupling operators.
#[derive(Clone, Debug)]
pub struct SystemModel {
    hamiltonian: ComplexMatrix,
    couplings: Vec<ComplexMatrix>,
    labels: Vec<String>,
    spectrum: HermitianSpectrum,
}

impl SystemModel {
    pub fn new(hamiltonian: ComplexMatrix, couplings: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        if !hamiltonian.is_square() {
            return Err(Error::DimensionMismatch("hamiltonian must be square".into()));
        }
        let d = hamiltonian.rows();
        check_hermitian(&hamiltonian, "hamiltonian")?;
        if couplings.is_empty() {
            return Err(Error::InvalidInput("at least one coupling operator is required".into()));
        }
        if labels.len() != couplings.len() {
            return Err(Error::InvalidInput(format!("{} labels for {} couplings", labels.len(), couplings.len())));
        }
        for (c, l) in couplings.iter().zip(&labels) {
            if c.rows() != d || c.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "coupling {l} is {}x{}, expected {d}x{d}",
                    c.rows(),
                    c.cols()
                )));
            }
            check_hermitian(c, &format!("coupling {l}"))?;
        }
        let hamiltonian = hamiltonian.hermitian_part();
        let couplings: Vec<_> = couplings.iter().map(|c| c.hermitian_part()).collect();
        let spectrum = hermitian_eigendecompose(&hamiltonian)?;
        Ok(Self { hamiltonian, couplings, labels, spectrum })
    }

    /// Convenience constructor with labels "A0", "A1", ...
    pub fn unlabeled(hamiltonian: ComplexMatrix, couplings: Vec<ComplexMatrix>) -> Result<Self> {
        let labels = (0..couplings.len()).map(|i| format!("A{i}")).collect();
        Self::new(hamiltonian, couplings, labels)
    }

    pub fn dimension(&self) -> usize {
        self.hamiltonian.rows()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn couplings(&self) -> &[ComplexMatrix] {
        &self.couplings
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        &self.spectrum
    }

    /// e^{iHt}.
    pub fn free_propagator(&self, t: f64) -> ComplexMatrix {
        self.spectrum.reconstruct_with(|e| C64::from_polar(1.0, e * t))
    }

    /// e^{iHt} X e^{−iHt}.
    pub fn heisenberg(&self, x: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let u = self.free_propagator(t);
        u.matmul(x).matmul(&u.adjoint())
    }

    /// Largest |E_m − E_n|.
    pub fn max_bohr_frequency(&self) -> f64 {
        self.spectrum.max() - self.spectrum.min()
    }
}

/// Orthonormal Hermitian operators under Tr(X†Y).
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    elements: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl OperatorBasis {
    /// Validates Hermiticity and orthonormality (within 1e-12).
    pub fn new(elements: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        if elements.is_empty() || elements.len() != labels.len() {
            return Err(Error::InvalidInput("basis needs one label per element".into()));
        }
        let d = elements[0].rows();
        for (e, l) in elements.iter().zip(&labels) {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimensionMismatch(format!("basis element {l}")));
            }
            check_hermitian(e, &format!("basis element {l}"))?;
        }
        for i in 0..elements.len() {
            for j in 0..elements.len() {
                let g = elements[i].hs_inner(&elements[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).norm() > 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "basis is not orthonormal: <{},{}> = {g}",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(Self { elements, labels })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.elements[0].rows()
    }

    /// Real coordinates Tr(σ_B X) of a Hermitian operator (complex in general).
    pub fn coordinates(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.elements.iter().map(|b| b.hs_inner(x)).collect()
    }

    /// Σ_B c_B σ_B.
    pub fn synthesize(&self, coords: &[C64]) -> ComplexMatrix {
        let d = self.dimension();
        let mut out = ComplexMatrix::zeros(d, d);
        for (c, b) in coords.iter().zip(&self.elements) {
            if *c != ZERO {
                out += &b.scale(*c);
            }
        }
        out
    }

    /// Gram matrix Tr(σ_i† σ_j).
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |i, j| self.elements[i].hs_inner(&self.elements[j]))
    }
}

/// Normalized identity, symmetric and antisymmetric off-diagonal generators,
/// then diagonal generalized Gell-Mann matrices. For d = 2 this is
/// {I, σx, σy, σz}/√2.
pub fn default_basis(model: &SystemModel) -> OperatorBasis {
    gell_mann_basis(model.dimension())
}

pub fn gell_mann_basis(d: usize) -> OperatorBasis {
    let mut elements = Vec::with_capacity(d * d);
    let mut labels = Vec::with_capacity(d * d);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    elements.push(ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt()));
    labels.push("I".to_string());
    for j in 0..d {
        for k in j + 1..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = C64::new(r2, 0.0);
            s[(k, j)] = C64::new(r2, 0.0);
            elements.push(s);
            labels.push(if d == 2 { "X".into() } else { format!("S{j}{k}") });
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = C64::new(0.0, -r2);
            a[(k, j)] = C64::new(0.0, r2);
            elements.push(a);
            labels.push(if d == 2 { "Y".into() } else { format!("A{j}{k}") });
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![ZERO; d];
        for x in diag.iter_mut().take(l) {
            *x = C64::new(norm, 0.0);
        }
        diag[l] = C64::new(-(l as f64) * norm, 0.0);
        elements.push(ComplexMatrix::diagonal(&diag));
        labels.push(if d == 2 { "Z".into() } else { format!("D{l}") });
    }
    OperatorBasis { elements, labels }
}

fn closure_residual(exact: &ComplexMatrix, rebuilt: &ComplexMatrix) -> f64 {
    (exact - rebuilt).frobenius_norm() / exact.frobenius_norm().max(1.0)
}

/// u_AB(t) = Tr(σ_B e^{iHt} σ_A e^{−iHt}) for the couplings σ_A (rows) and
/// basis elements σ_B (columns), computed by conjugation with matrix
/// exponentials. Fails with `ClosureViolation` if the basis cannot
/// reconstruct σ_A(t).
pub fn heisenberg_u(model: &SystemModel, basis: &OperatorBasis, t: f64) -> Result<RealMatrix> {
    operator_u(model, basis, model.couplings(), t)
}

/// Same as [`heisenberg_u`] with the basis elements themselves as rows: the
/// real matrix of free evolution on the operator space.
pub fn basis_propagator(model: &SystemModel, basis: &OperatorBasis, t: f64) -> Result<RealMatrix> {
    operator_u(model, basis, basis.elements(), t)
}

fn operator_u(model: &SystemModel, basis: &OperatorBasis, ops: &[ComplexMatrix], t: f64) -> Result<RealMatrix> {
    if basis.dimension() != model.dimension() {
        return Err(Error::DimensionMismatch("basis and model dimensions differ".into()));
    }
    let u = matrix_exponential(model.hamiltonian(), I * t)?;
    let ud = u.adjoint();
    let mut out = RealMatrix::zeros(ops.len(), basis.len());
    for (a, op) in ops.iter().enumerate() {
        let evolved = u.matmul(op).matmul(&ud);
        let coords = basis.coordinates(&evolved);
        let mut real = Vec::with_capacity(coords.len());
        for (b, c) in coords.iter().enumerate() {
            if c.im.abs() > 1e-10 * op.frobenius_norm().max(1.0) {
                return Err(Error::InvalidInput(format!("u coefficient ({a},{b}) has imaginary part {:.3e}", c.im)));
            }
            out[(a, b)] = c.re;
            real.push(C64::new(c.re, 0.0));
        }
        let residual = closure_residual(&evolved, &basis.synthesize(&real));
        if residual > CLOSURE_TOL {
            return Err(Error::ClosureViolation(residual));
        }
    }
    Ok(out)
}

/// Result of [`closure_check`].
#[derive(Clone, Debug)]
pub struct ClosureReport {
    pub max_residual: f64,
    pub passed: bool,
    /// Set when no sample times were given.
    pub vacuous: bool,
}

/// Largest reconstruction residual of σ_A(t) over the sample times.
pub fn closure_check(model: &SystemModel, basis: &OperatorBasis, sample_times: &[f64]) -> ClosureReport {
    let mut max_residual = 0.0f64;
    for &t in sample_times {
        let u = model.free_propagator(t);
        for op in model.couplings() {
            let evolved = u.matmul(op).matmul(&u.adjoint());
            let coords = basis.coordinates(&evolved);
            let rebuilt = basis.synthesize(&coords);
            max_residual = max_residual.max(closure_residual(&evolved, &rebuilt));
        }
    }
    ClosureReport { max_residual, passed: max_residual < CLOSURE_TOL, vacuous: sample_times.is_empty() }
}

/// One Bohr-frequency sector of a coupling operator.
#[derive(Clone, Debug)]
pub struct Eigenoperator {
    pub coupling: usize,
    pub frequency: f64,
    pub operator: ComplexMatrix,
}

/// Eigenoperators A(ω) = Σ_{E_n − E_m = ω} Π_m A Π_n for every coupling, so
/// that [H, A(ω)] = −ω A(ω) and e^{iHt} A(ω) e^{−iHt} = e^{−iωt} A(ω).
#[derive(Clone, Debug)]
pub struct EigenoperatorSet {
    pub frequencies: Vec<f64>,
    pub sectors: Vec<Eigenoperator>,
    pub n_couplings: usize,
}

impl EigenoperatorSet {
    /// Sectors belonging to one coupling.
    pub fn for_coupling(&self, a: usize) -> impl Iterator<Item = &Eigenoperator> {
        self.sectors.iter().filter(move |s| s.coupling == a)
    }
}

/// Clusters the Bohr frequencies of H (merge tolerance `gap_tol`) and
/// returns (cluster representative, cluster id per (m, n) pair).
fn bohr_clusters(energies: &[f64], gap_tol: f64) -> (Vec<f64>, Vec<usize>) {
    let d = energies.len();
    let mut pairs: Vec<(f64, usize)> = Vec::with_capacity(d * d);
    for m in 0..d {
        for n in 0..d {
            pairs.push((energies[n] - energies[m], m * d + n));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reps = Vec::new();
    let mut ids = vec![0; d * d];
    let mut members: Vec<f64> = Vec::new();
    for (k, &(w, idx)) in pairs.iter().enumerate() {
        if k > 0 && w - pairs[k - 1].0 > gap_tol {
            reps.push(members.iter().sum::<f64>() / members.len() as f64);
            members.clear();
        }
        members.push(w);
        ids[idx] = reps.len();
    }
    reps.push(members.iter().sum::<f64>() / members.len() as f64);
    // snap the exact-zero cluster
    for r in reps.iter_mut() {
        if r.abs() <= gap_tol {
            *r = 0.0;
        }
    }
    (reps, ids)
}

/// Default merge tolerance: 1e-9 times the spectral range.
pub fn default_gap_tol(model: &SystemModel) -> f64 {
    (1e-9 * model.max_bohr_frequency()).max(1e-14)
}

pub fn eigenoperator_decompose(model: &SystemModel) -> EigenoperatorSet {
    eigenoperator_decompose_with(model, default_gap_tol(model))
}

pub fn eigenoperator_decompose_with(model: &SystemModel, gap_tol: f64) -> EigenoperatorSet {
    let spec = model.spectrum();
    let v = &spec.eigenvectors;
    let d = model.dimension();
    let (reps, ids) = bohr_clusters(&spec.eigenvalues, gap_tol);
    let mut sectors = Vec::new();
    let mut used = vec![false; reps.len()];
    for (a, op) in model.couplings().iter().enumerate() {
        let rotated = v.adjoint().matmul(op).matmul(v);
        let scale = op.frobenius_norm();
        for (c, &w) in reps.iter().enumerate() {
            let masked = ComplexMatrix::from_fn(d, d, |m, n| if ids[m * d + n] == c { rotated[(m, n)] } else { ZERO });
            if masked.frobenius_norm() <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
                continue;
            }
            used[c] = true;
            sectors.push(Eigenoperator { coupling: a, frequency: w, operator: v.matmul(&masked).matmul(&v.adjoint()) });
        }
    }
    let frequencies = reps.iter().zip(&used).filter(|(_, &u)| u).map(|(&w, _)| w).collect();
    EigenoperatorSet { frequencies, sectors, n_couplings: model.couplings().len() }
}

/// Precomputed Bohr-phase expansion u_AB(s) = Re Σ_k c_{AB,k} e^{iω_k s} of
/// the coefficients of [`heisenberg_u`], for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct HeisenbergTable {
    n_ops: usize,
    n_basis: usize,
    frequencies: Vec<f64>,
    /// coefficient for (op a, basis b, frequency k) at [(a*n_basis + b)*nf + k]
    coeffs: Vec<C64>,
}

impl HeisenbergTable {
    pub fn new(model: &SystemModel, basis: &OperatorBasis) -> Self {
        Self::for_operators(model, basis, model.couplings())
    }

    pub fn for_operators(model: &SystemModel, basis: &OperatorBasis, ops: &[ComplexMatrix]) -> Self {
        let spec = model.spectrum();
        let v = &spec.eigenvectors;
        let d = model.dimension();
        let e = &spec.eigenvalues;
        // e^{iHs} X e^{−iHs} has (m,n) entry X_mn e^{i(E_m − E_n)s} in the eigenbasis
        let (reps, ids) = bohr_clusters(e, default_gap_tol(model));
        // frequency of pair (m,n) here is E_m − E_n = −(E_n − E_m)
        let frequencies: Vec<f64> = reps.iter().map(|w| -w).collect();
        let nf = frequencies.len();
        let rotated_basis: Vec<ComplexMatrix> =
            basis.elements().iter().map(|b| v.adjoint().matmul(b).matmul(v)).collect();
        let mut coeffs = vec![ZERO; ops.len() * basis.len() * nf];
        for (a, op) in ops.iter().enumerate() {
            let ra = v.adjoint().matmul(op).matmul(v);
            for (b, rb) in rotated_basis.iter().enumerate() {
                let base = (a * basis.len() + b) * nf;
                // Tr(σ_B X(s)) = Σ_mn (σ_B)_nm X_mn e^{i(E_m−E_n)s}
                for m in 0..d {
                    for n in 0..d {
                        let c = rb[(n, m)] * ra[(m, n)];
                        if c != ZERO {
                            coeffs[base + ids[m * d + n]] += c;
                        }
                    }
                }
            }
        }
        Self { n_ops: ops.len(), n_basis: basis.len(), frequencies, coeffs }
    }

    pub fn n_ops(&self) -> usize {
        self.n_ops
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Complex Bohr coefficients; the full sum Σ_k c_k e^{iω_k s} is real.
    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    /// Writes u_AB(s) into `out` (row-major, n_ops × n_basis).
    pub fn eval_into(&self, s: f64, phases: &mut Vec<C64>, out: &mut [f64]) {
        phases.clear();
        phases.extend(self.frequencies.iter().map(|w| C64::from_polar(1.0, w * s)));
        let nf = self.frequencies.len();
        for (idx, o) in out.iter_mut().enumerate() {
            let c = &self.coeffs[idx * nf..(idx + 1) * nf];
            let mut acc = 0.0;
            for (ck, pk) in c.iter().zip(phases.iter()) {
                acc += ck.re * pk.re - ck.im * pk.im;
            }
            *o = acc;
        }
    }

    pub fn eval(&self, s: f64) -> RealMatrix {
        let mut out = RealMatrix::zeros(self.n_ops, self.n_basis);
        let mut phases = Vec::new();
        let mut buf = vec![0.0; self.n_ops * self.n_basis];
        self.eval_into(s, &mut phases, &mut buf);
        for a in 0..self.n_ops {
            for b in 0..self.n_basis {
                out[(a, b)] = buf[a * self.n_basis + b];
            }
        }
        out
    }
}

/// Pauli matrices, used throughout tests and built-in models.
pub fn pauli() -> [ComplexMatrix; 3] {
    [
        ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]),
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("2x2"),
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]),
    ]
}

/// Qubit with H = (ω₀/2)σ_z coupled through σ_x.
pub fn driven_qubit(omega0: f64) -> SystemModel {
    let [sx, _, sz] = pauli();
    SystemModel::new(sz.scale_real(0.5 * omega0), vec![sx], vec!["x".into()]).expect("valid qubit model")
}

/// Qubit with H = 0 coupled through σ_x.
pub fn static_qubit() -> SystemModel {
    let [sx, _, _] = pauli();
    SystemModel::new(ComplexMatrix::zeros(2, 2), vec![sx], vec!["x".into()]).expect("valid qubit model")
}

/// Qutrit with H = diag(0, 1, 3), a ladder-type coupling and a second
/// coupling mixing a diagonal part with the |0⟩⟨2| transition.
pub fn qutrit_model() -> SystemModel {
    let h = ComplexMatrix::diagonal(&[ZERO, ONE, C64::new(3.0, 0.0)]);
    let s2 = std::f64::consts::SQRT_2;
    let a1 = ComplexMatrix::from_real(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, s2], &[0.0, s2, 0.0]]);
    let a2 = ComplexMatrix::from_rows(&[
        vec![C64::new(0.5, 0.0), ZERO, C64::new(0.0, -0.7)],
        vec![ZERO, C64::new(-0.3, 0.0), ZERO],
        vec![C64::new(0.0, 0.7), ZERO, C64::new(0.2, 0.0)],
    ])
    .expect("3x3");
    SystemModel::new(h, vec![a1, a2], vec!["ladder".into(), "mixed".into()]).expect("valid qutrit model")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_basis_is_scaled_pauli() {
        let b = gell_mann_basis(2);
        let [sx, sy, sz] = pauli();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let want = [ComplexMatrix::identity(2), sx, sy, sz];
        for (e, w) in b.elements().iter().zip(&want) {
            assert!((e - &w.scale_real(r)).max_abs() < 1e-15);
        }
        assert_eq!(b.labels(), &["I", "X", "Y", "Z"]);
    }

    #[test]
    fn rejects_non_hermitian_coupling() {
        let bad = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let r = SystemModel::unlabeled(ComplexMatrix::zeros(2, 2), vec![bad]);
        assert!(matches!(r, Err(Error::Validation { .. })));
    }

    #[test]
    fn table_matches_exponential_route() {
        let m = qutrit_model();
        let b = default_basis(&m);
        let table = HeisenbergTable::new(&m, &b);
        for t in [0.0, 0.3, 2.9, -1.7] {
            let direct = heisenberg_u(&m, &b, t).unwrap();
            assert!(table.eval(t).max_abs_diff(&direct) < 1e-12);
        }
    }

    #[test]
    fn eigenoperator_frequencies_for_qutrit() {
        let m = qutrit_model();
        let set = eigenoperator_decompose(&m);
        let want = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        assert_eq!(set.frequencies.len(), 7);
        for (w, x) in set.frequencies.iter().zip(want) {
            assert!((w - x).abs() < 1e-12);
        }
    }
}
