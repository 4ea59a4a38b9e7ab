use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular or too ill-conditioned (condition estimate {cond:.3e})")]
    SingularMatrix { cond: f64 },
    #[error("det(g + I) vanishes; the Cayley transform is undefined")]
    CayleySingular,
    #[error("Hermitian part is not positive definite (smallest pivot {pivot:.3e})")]
    NotPositiveReal { pivot: f64 },
    #[error("matrix is not symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },
    #[error("blocks (P, Q) do not define an element of Sp(n,C) ∩ SU(n,n) (residual {residual:.3e})")]
    NotInS { residual: f64 },
    #[error("matrix is not in the Lie algebra (residual {residual:.3e})")]
    NotInLie { residual: f64 },
    #[error("Gaussian integral diverges: real part of the quadratic form is not positive definite (pivot {pivot:.3e})")]
    DivergentIntegral { pivot: f64 },
    #[error("kernel composition is numerically degenerate (pivot {pivot:.3e}); use quadrature")]
    DegenerateComposition { pivot: f64 },
    #[error("element has no P+ Kc P- decomposition: det(D) = 0")]
    NoDecomposition,
    #[error("point leaves the domain: I - Y conj(Y) is not positive definite")]
    DomainViolation,
    #[error("kernels are not related by a scalar of modulus one (scalar {re:.6} {im:+.6}i)")]
    NotUnimodular { re: f64, im: f64 },
    #[error("phase of c_n is ambiguous: det(I + k) < 0 and det P is real")]
    AmbiguousPhase,
    #[error("heat flow is singular: I - 4tS is not invertible")]
    HeatFlowSingular,
    #[error("star-exponential series did not converge (last term {last_term:.3e}, partial sum {partial:.3e})")]
    NonConvergent { last_term: f64, partial: f64 },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("bad input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
