"""Dense complex Hermitian linear algebra for small quantum states.

Provides the state containers (density operators, pure states, binary
POVMs), spectral matrix functions, trace-norm/fidelity/entropy metrics,
the optimal binary (Helstrom) measurement, and the Bernoulli model of a
SWAP-test fidelity estimate.

All objects are immutable after construction and all functions are pure;
random number generators are always explicit arguments.  Entropies are in
bits (log base 2) throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Validation tolerances for Hermiticity / positivity / normalization.
HERM_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10

# Eigenvalues below this floor are clamped before taking a matrix log;
# needed because iterative solvers take log of rank-deficient mixtures.
LOG_FLOOR = 1e-12

# |eigenvalue| <= this counts as zero when building the Helstrom projector
# (zero modes are deterministically assigned to the second POVM element).
HELSTROM_TIE_TOL = 1e-12


class ValidationError(ValueError):
    """An input violates a structural precondition (shape, Hermiticity, ...)."""


class NumericalError(ArithmeticError):
    """A computation left its numerically valid regime."""


def _as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def hermitize(m: np.ndarray) -> np.ndarray:
    """Symmetrize (M + M†)/2 to suppress round-off drift before eigensolves."""
    return 0.5 * (m + m.conj().T)


def check_hermitian(m: np.ndarray, tol: float = HERM_TOL, name: str = "matrix") -> np.ndarray:
    a = _as_complex_matrix(m, name)
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ValidationError(f"{name} is not Hermitian (max deviation {dev:.3e} > {tol:.0e})")
    return hermitize(a)


@dataclass(frozen=True)
class DensityOperator:
    """A d x d Hermitian, positive-semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        a = check_hermitian(self.matrix, name="density operator")
        lo = float(np.min(np.linalg.eigvalsh(a)))
        if lo < -PSD_TOL:
            raise ValidationError(f"density operator has negative eigenvalue {lo:.3e}")
        tr = float(np.real(np.trace(a)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density operator trace {tr} is not 1")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_vector(cls, amplitudes) -> "DensityOperator":
        """Rank-1 projector |psi><psi| onto a (normalized) state vector."""
        v = np.asarray(amplitudes, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise ValidationError("cannot build a projector from the zero vector")
        v = v / n
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class PureState:
    """A normalized complex state vector."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).ravel()
        n = float(np.linalg.norm(v))
        if abs(n - 1.0) > HERM_TOL:
            raise ValidationError(f"pure state norm {n} deviates from 1")
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class BinaryPOVM:
    """Two positive operators pi0, pi1 with pi0 + pi1 = identity."""

    pi0: np.ndarray
    pi1: np.ndarray

    def __post_init__(self):
        a = check_hermitian(self.pi0, name="pi0")
        b = check_hermitian(self.pi1, name="pi1")
        if a.shape != b.shape:
            raise ValidationError("POVM elements must share one dimension")
        for name, m in (("pi0", a), ("pi1", b)):
            lo = float(np.min(np.linalg.eigvalsh(m)))
            if lo < -PSD_TOL:
                raise ValidationError(f"POVM element {name} has negative eigenvalue {lo:.3e}")
        dev = np.max(np.abs(a + b - np.eye(a.shape[0])))
        if dev > HERM_TOL:
            raise ValidationError(f"POVM completeness violated by {dev:.3e}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "pi0", a)
        object.__setattr__(self, "pi1", b)

    @property
    def dim(self) -> int:
        return self.pi0.shape[0]


def trace_norm(a) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    m = check_hermitian(a)
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def matrix_function(a, f: Callable[[np.ndarray], np.ndarray], *,
                    domain_floor: float | None = None) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    Eigenvalues in [-PSD_TOL, domain_floor) are clamped up to domain_floor
    when one is given; anything below -PSD_TOL raises, so round-off noise is
    tolerated but genuinely invalid inputs are not.
    """
    m = check_hermitian(a)
    w, v = np.linalg.eigh(m)
    if domain_floor is not None:
        if w[0] < -PSD_TOL:
            raise NumericalError(
                f"eigenvalue {w[0]:.3e} below the domain of the requested function")
        w = np.maximum(w, domain_floor)
    return (v * f(w)) @ v.conj().T


def matrix_sqrt(a) -> np.ndarray:
    return matrix_function(a, np.sqrt, domain_floor=0.0)


def matrix_log(a) -> np.ndarray:
    """Natural matrix logarithm with the LOG_FLOOR clamp on tiny eigenvalues."""
    return matrix_function(a, np.log, domain_floor=LOG_FLOOR)


def matrix_exp(a) -> np.ndarray:
    return matrix_function(a, np.exp)


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Quantum fidelity F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1.

    Equals |<psi|phi>| when both states are pure.  Eigenvalues at relative
    round-off scale are zeroed before the final square root, which would
    otherwise amplify them to sqrt(eps).
    """
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch {rho.dim} != {sigma.dim}")
    s = matrix_sqrt(rho.matrix)
    w = np.clip(np.linalg.eigvalsh(hermitize(s @ sigma.matrix @ s)), 0.0, None)
    if w.size and w[-1] > 0:
        w[w < w[-1] * 1e-14] = 0.0
    return float(np.clip(np.sum(np.sqrt(w)), 0.0, 1.0))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """S(rho) = -Tr[rho log2 rho] in bits, with 0 log 0 := 0."""
    w = rho.eigenvalues()
    w = w[w > 0.0]
    return float(-np.sum(w * np.log2(w)))


def entropy_from_eigenvalues(w: np.ndarray) -> float:
    """Shannon entropy (bits) of a nonnegative spectrum, 0 log 0 := 0."""
    w = np.asarray(w, dtype=float)
    w = w[w > 0.0]
    return float(-np.sum(w * np.log2(w)))


def helstrom_povm(rho0: DensityOperator, rho1: DensityOperator,
                  p0: float = 0.5, p1: float = 0.5) -> BinaryPOVM:
    """Optimal two-outcome measurement for discriminating rho0 vs rho1.

    pi0 projects onto the strictly positive eigenspace of p0*rho0 - p1*rho1;
    eigenvalues with magnitude <= HELSTROM_TIE_TOL go to pi1.
    """
    if rho0.dim != rho1.dim:
        raise ValidationError(f"dimension mismatch {rho0.dim} != {rho1.dim}")
    if p0 < 0 or p1 < 0 or abs(p0 + p1 - 1.0) > TRACE_TOL:
        raise ValidationError(f"priors ({p0}, {p1}) must be nonnegative and sum to 1")
    gamma = hermitize(p0 * rho0.matrix - p1 * rho1.matrix)
    w, v = np.linalg.eigh(gamma)
    pos = v[:, w > HELSTROM_TIE_TOL]
    pi0 = pos @ pos.conj().T
    return BinaryPOVM(pi0, np.eye(rho0.dim) - pi0)


def helstrom_risk(rho0: DensityOperator, rho1: DensityOperator) -> float:
    """Minimum equal-prior discrimination error (1 - ||rho0 - rho1||_1 / 2) / 2."""
    if rho0.dim != rho1.dim:
        raise ValidationError(f"dimension mismatch {rho0.dim} != {rho1.dim}")
    return 0.5 * (1.0 - 0.5 * trace_norm(rho0.matrix - rho1.matrix))


def swap_test_estimate(f: float, shots: int, rng: np.random.Generator) -> float:
    """Shot-noisy fidelity estimate: mean of `shots` Bernoulli(f) outcomes.

    The estimator has mean f and variance f(1-f)/shots.
    """
    if shots < 1:
        raise ValidationError(f"shot count must be >= 1, got {shots}")
    if not 0.0 <= f <= 1.0:
        raise ValidationError(f"fidelity {f} outside [0, 1]")
    return float(rng.binomial(shots, f)) / shots


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    """Trace out all subsystems of a bipartite (or multipartite) matrix but one.

    `dims` lists the local dimensions whose product is the matrix size;
    `keep` is the index of the subsystem to retain.
    """
    dims = tuple(int(d) for d in dims)
    a = _as_complex_matrix(m)
    if a.shape[0] != int(np.prod(dims)):
        raise ValidationError(f"matrix size {a.shape[0]} does not match dims {dims}")
    n = len(dims)
    t = a.reshape(dims + dims)
    for axis in reversed([i for i in range(n) if i != keep]):
        t = np.trace(t, axis1=axis, axis2=axis + n)
        n -= 1
    return t
