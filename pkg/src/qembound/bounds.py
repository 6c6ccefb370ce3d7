"""Risk and information quantities controlling accuracy and generalization.

Covers the spectral generalization bound B and its kernel-spectrum twin,
Renyi mutual informations of the classical-quantum joint state, Bayes and
approximation errors for the linear loss, the Rademacher training budget,
pretty-good-measurement bounds, and the purity/rank relaxations.

Information quantities are in bits; only the log(1/delta) term of the
training budget uses the natural logarithm, following the usual
statistical-learning convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import (
    Embedding,
    LabeledEnsemble,
    average_state,
    class_average,
    ensemble_amplitudes,
    _weighted_state_sum,
)
from .linalg import (
    BinaryPOVM,
    DensityOperator,
    NumericalError,
    ValidationError,
    PSD_TOL,
    entropy_from_eigenvalues,
    fidelity,
    helstrom_povm,
    hermitize,
    matrix_function,
    trace_norm,
    von_neumann_entropy,
)

# Kernel eigenvalues in [KERNEL_CLIP, 0) are treated as round-off and
# clipped to zero; anything below KERNEL_CLIP is a real inconsistency.
# Magnitudes below KERNEL_ZERO_TOL are also zeroed: a rank-d kernel held in
# an n >> d matrix acquires O(n) spurious eigenvalues at round-off scale,
# and each would otherwise leak sqrt(eps) into the bound.
KERNEL_CLIP = -1e-8
KERNEL_ZERO_TOL = 1e-12
RANK_TOL = 1e-10


def second_moment(e: Embedding, ens: LabeledEnsemble) -> np.ndarray:
    """Weighted second-moment operator sum_x P(x) rho(x)^2."""
    amps = ensemble_amplitudes(e, ens)
    if amps is not None:
        # pure states square to themselves
        return _weighted_state_sum(e, ens, ens.px())
    out = np.zeros((e.dim, e.dim), dtype=complex)
    for w, x in zip(ens.px(), ens.xs):
        if w > 0:
            m = e.density(x).matrix
            out += w * (m @ m)
    return hermitize(out)


def _trace_sqrt_squared(m: np.ndarray) -> float:
    w = np.clip(np.linalg.eigvalsh(hermitize(m)), 0.0, None)
    w = np.where(w < KERNEL_ZERO_TOL, 0.0, w)  # keep the two B routes consistent
    return float(np.sum(np.sqrt(w)) ** 2)


def gen_bound_B(e: Embedding, ens: LabeledEnsemble) -> float:
    """Generalization bound (Tr sqrt(sum_x P(x) rho(x)^2))^2, always >= 1."""
    return _trace_sqrt_squared(second_moment(e, ens))


@dataclass(frozen=True)
class KernelMatrix:
    """Normalized kernel K[x, y] = p(x) <psi(x)|psi(y)> of a pure ensemble."""

    entries: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.entries, dtype=complex)
        p = np.asarray(self.weights, dtype=float)
        if k.ndim != 2 or k.shape[0] != k.shape[1] or p.shape != (k.shape[0],):
            raise ValidationError("kernel entries must be square and match the weights")
        if np.any(p <= 0):
            raise ValidationError("kernel weights must be strictly positive")
        if np.max(np.abs(np.diag(k) - p)) > PSD_TOL:
            raise ValidationError("kernel diagonal must equal the input weights")
        if abs(np.real(np.trace(k)) - 1.0) > PSD_TOL:
            raise ValidationError("kernel trace must be 1")
        k.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "entries", k)
        object.__setattr__(self, "weights", p)

    @classmethod
    def from_embedding(cls, e: Embedding, ens: LabeledEnsemble) -> "KernelMatrix":
        amps = ensemble_amplitudes(e, ens)
        if amps is None:
            raise ValidationError("kernel construction needs a pure-state embedding")
        p = ens.px()
        keep = p > 0
        gram = amps[keep].conj() @ amps[keep].T
        return cls(p[keep, None] * gram, p[keep])

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Spectrum, computed from the Hermitian similarity partner of K."""
        s = np.sqrt(self.weights)
        sym = hermitize((self.entries / self.weights[:, None]) * np.outer(s, s))
        return np.linalg.eigvalsh(sym)


def kernel_bound_B(k: KernelMatrix) -> float:
    """(sum_k sqrt(eta_k))^2 over the kernel eigenvalues."""
    eta = k.eigenvalues()
    if eta.min(initial=0.0) < KERNEL_CLIP:
        raise NumericalError(
            f"kernel eigenvalue {eta.min():.3e} below the round-off tolerance")
    eta = np.where(eta < KERNEL_ZERO_TOL, 0.0, eta)
    return float(np.sum(np.sqrt(eta)) ** 2)


def almost_diagonal_expansion(k: KernelMatrix) -> float:
    """Perturbative Tr sqrt(K) for kernels with small off-diagonal overlaps.

    Returns sqrt-root-entropy term minus the quadratic overlap correction;
    the truncation error is fourth order in the overlaps.
    """
    p = k.weights
    sp = np.sqrt(p)
    f = np.abs(k.entries) / p[:, None]
    np.fill_diagonal(f, 0.0)
    corr = 0.25 * float(np.sum(np.outer(sp, sp) / (sp[:, None] + sp[None, :]) * f ** 2))
    return float(np.sum(sp)) - corr


def _alpha_moment(e: Embedding, ens: LabeledEnsemble, w: np.ndarray,
                  alpha: float) -> np.ndarray:
    """sum over inputs of w(x) rho(x)^alpha."""
    amps = ensemble_amplitudes(e, ens)
    if amps is not None:
        return _weighted_state_sum(e, ens, w)
    out = np.zeros((e.dim, e.dim), dtype=complex)
    for wi, x in zip(w, ens.xs):
        if wi > 0:
            out += wi * matrix_function(e.density(x).matrix,
                                        lambda v: np.power(v, alpha), domain_floor=0.0)
    return hermitize(out)


def _trace_alpha_root(m: np.ndarray, alpha: float) -> float:
    w = np.clip(np.linalg.eigvalsh(hermitize(m)), 0.0, None)
    w = np.where(w < KERNEL_ZERO_TOL, 0.0, w)
    return float(np.sum(np.power(w, 1.0 / alpha)))


def renyi_mutual_information(ens: LabeledEnsemble, e: Embedding, alpha: float) -> float:
    """I_alpha(X:Q) in bits for the state sum_x P(x) |x><x| (x) rho(x)."""
    if alpha <= 0:
        raise ValidationError(f"Renyi order must be positive, got {alpha}")
    px = ens.px()
    if alpha == 1.0:
        hx = entropy_from_eigenvalues(px)
        hq = von_neumann_entropy(average_state(e, ens))
        block = [w * np.clip(e.density(x).eigenvalues(), 0.0, None)
                 for w, x in zip(px, ens.xs) if w > 0]
        hxq = entropy_from_eigenvalues(np.concatenate(block))
        return hx + hq - hxq
    t = _trace_alpha_root(_alpha_moment(e, ens, px, alpha), alpha)
    return alpha / (alpha - 1.0) * math.log2(t)


def conditional_renyi_mi(ens: LabeledEnsemble, e: Embedding, alpha: float) -> float:
    """I_alpha(X:Q|C) in bits, in its closed classical-quantum form."""
    if alpha <= 0 or alpha == 1.0:
        raise ValidationError(f"conditional Renyi order must be positive and != 1, got {alpha}")
    total = 0.0
    for c, pc in enumerate(ens.pc()):
        m = _alpha_moment(e, ens, ens.x_given_c(c), alpha)
        total += pc * _trace_alpha_root(m, alpha)
    return alpha / (alpha - 1.0) * math.log2(total)


def _validate_povm(povm, dim: int) -> list[np.ndarray]:
    if isinstance(povm, BinaryPOVM):
        elements = [povm.pi0, povm.pi1]
    else:
        elements = [np.asarray(p, dtype=complex) for p in povm]
        total = np.zeros((dim, dim), dtype=complex)
        for p in elements:
            if p.shape != (dim, dim):
                raise ValidationError("POVM element shape does not match the embedding")
            lo = float(np.min(np.linalg.eigvalsh(hermitize(p))))
            if lo < -PSD_TOL:
                raise ValidationError(f"POVM element has negative eigenvalue {lo:.3e}")
            total += p
        if np.max(np.abs(total - np.eye(dim))) > PSD_TOL:
            raise ValidationError("POVM elements do not sum to the identity")
    if elements[0].shape[0] != dim:
        raise ValidationError("POVM dimension does not match the embedding")
    return [np.asarray(p) for p in elements]


def risk(e: Embedding, ens: LabeledEnsemble, povm) -> float:
    """Average linear-loss classification error 1 - sum_c P(c) Tr[Pi_c rho_c]."""
    elements = _validate_povm(povm, e.dim)
    if len(elements) < ens.n_classes:
        raise ValidationError("POVM has fewer outcomes than there are classes")
    acc = 0.0
    for c, pc in enumerate(ens.pc()):
        acc += pc * float(np.real(np.trace(elements[c] @ class_average(e, ens, c).matrix)))
    return float(np.clip(1.0 - acc, 0.0, 1.0))


def bayes_risk(ens: LabeledEnsemble) -> float:
    """Minimum classification error 1 - sum_x max_c P(c, x) of the ensemble."""
    return float(1.0 - np.sum(np.max(ens.joint, axis=0)))


def delta_total_variation(ens: LabeledEnsemble) -> float:
    """Delta = (1/2) sum_x |P(x|0) - P(x|1)| for binary ensembles."""
    if ens.n_classes != 2:
        raise ValidationError("total-variation distance needs exactly two classes")
    return 0.5 * float(np.sum(np.abs(ens.x_given_c(0) - ens.x_given_c(1))))


def _require_equal_binary_priors(ens: LabeledEnsemble, tol: float = 1e-9):
    if ens.n_classes != 2:
        raise ValidationError("this quantity is defined for binary ensembles")
    if abs(ens.pc()[0] - 0.5) > tol:
        raise ValidationError("this closed form assumes equal class priors")


def approximation_error(e: Embedding, ens: LabeledEnsemble) -> float:
    """A = Delta - ||rho_0 - rho_1||_1 / 2 for equal-prior binary problems."""
    _require_equal_binary_priors(ens)
    delta = delta_total_variation(ens)
    tn = trace_norm(class_average(e, ens, 0).matrix - class_average(e, ens, 1).matrix)
    a = delta - 0.5 * tn
    if a < -1e-9:
        raise NumericalError(f"approximation error {a:.3e} fell below 0")
    return float(min(max(a, 0.0), delta))


def holevo_information(e: Embedding, ens: LabeledEnsemble) -> float:
    """I(C:Q) = S(rho_bar) - sum_c P(c) S(rho_c) in bits."""
    s_bar = von_neumann_entropy(average_state(e, ens))
    s_cond = sum(pc * von_neumann_entropy(class_average(e, ens, c))
                 for c, pc in enumerate(ens.pc()))
    return s_bar - s_cond


def risk_info_bounds(e: Embedding, ens: LabeledEnsemble) -> tuple[float, float]:
    """Two information upper bounds on the optimal-measurement risk.

    Returns the Chernoff-style overlap bound Tr[sqrt(rho_0) sqrt(rho_1)]/2
    (binary) and the mutual-information bound 1 - 2^I(C:Q)/N_C.
    """
    if ens.n_classes != 2:
        raise ValidationError("the overlap bound is defined for binary ensembles")
    r0 = matrix_function(class_average(e, ens, 0).matrix, np.sqrt, domain_floor=0.0)
    r1 = matrix_function(class_average(e, ens, 1).matrix, np.sqrt, domain_floor=0.0)
    chernoff = 0.5 * float(np.real(np.trace(r0 @ r1)))
    mi_bound = 1.0 - 2.0 ** holevo_information(e, ens) / ens.n_classes
    return chernoff, mi_bound


def rademacher_budget(b: float, t: int, n_classes: int, delta: float) -> tuple[float, float]:
    """Rademacher complexity bound and the total generalization budget.

    The budget is 2 sqrt(B/T) + sqrt(2 ln(1/delta) / T); the complexity
    bound is sqrt(B/T)/2 for two classes and sqrt(N_C B / T) otherwise.
    """
    if t < 1:
        raise ValidationError(f"training-set size must be >= 1, got {t}")
    if not 0.0 < delta <= 1.0:
        raise ValidationError(f"confidence level delta={delta} outside (0, 1]")
    if b < 1.0 - 1e-9:
        raise ValidationError(f"generalization bound {b} below its minimum 1")
    complexity = (0.5 * math.sqrt(b / t) if n_classes == 2
                  else math.sqrt(n_classes * b / t))
    budget = 2.0 * math.sqrt(b / t) + math.sqrt(2.0 * math.log(1.0 / delta) / t)
    return complexity, budget


def fidelity_matrix(e: Embedding, ens: LabeledEnsemble) -> np.ndarray:
    """Pairwise fidelities F(rho(x), rho(y)) over the distinct inputs."""
    amps = ensemble_amplitudes(e, ens)
    if amps is not None:
        return np.abs(amps.conj() @ amps.T)
    n = ens.n_inputs
    states = [e.density(x) for x in ens.xs]
    out = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = fidelity(states[i], states[j])
    return out


def pgm_approx_bound(e: Embedding, ens: LabeledEnsemble, n_copies: int = 1) -> float:
    """Pretty-good-measurement bound on the approximation error for N copies.

    sum over x != y and classes c != b(y) of P(c) sqrt(P(x|c) P(y|c)) F^N,
    where b(y) picks the class with the largest posterior at y (ties go to
    the smaller class index).
    """
    if n_copies < 1:
        raise ValidationError("copy count must be >= 1")
    f = fidelity_matrix(e, ens) ** n_copies
    np.fill_diagonal(f, 0.0)
    b = np.argmax(ens.c_given_x(), axis=0)
    pc = ens.pc()
    total = 0.0
    for c, p in enumerate(pc):
        cond = ens.x_given_c(c)
        w = np.sqrt(np.outer(cond, cond))
        mask = (b[None, :] != c)  # rows x, cols y with c != b(y)
        total += p * float(np.sum(w * f * mask))
    return total


def purity_rank_bound(e: Embedding, ens: LabeledEnsemble) -> tuple[list[float], float]:
    """Per-class purity/rank relaxations of B_c, and their combination.

    Each bound is Tr[s_c] + sqrt((r_c^2 - r_c)(Tr[s_c]^2 - Tr[s_c^2])) with
    s_c the class-conditional second moment; the combination
    (sum_c sqrt(P(c) bound_c))^2 upper-bounds the generalization bound.
    """
    per_class = []
    for c in range(ens.n_classes):
        s_c = _alpha_moment(e, ens, ens.x_given_c(c), 2.0)
        w = np.clip(np.linalg.eigvalsh(s_c), 0.0, None)
        tr = float(np.sum(w))
        tr2 = float(np.sum(w ** 2))
        r = int(np.sum(w > RANK_TOL))
        per_class.append(tr + math.sqrt(max((r * r - r) * (tr * tr - tr2), 0.0)))
    combined = float(sum(math.sqrt(pc * bc)
                         for pc, bc in zip(ens.pc(), per_class)) ** 2)
    return per_class, combined


def multiclass_pgm_training_bound(
        class_states: Sequence[tuple[int, DensityOperator]]) -> float:
    """PGM bound on the empirical training error from pairwise fidelities.

    Input is one (sample count, mixture state) pair per class; the bound is
    sum over ordered class pairs of sqrt(T_c T_c') / T * F(rho_c, rho_c').
    """
    if len(class_states) < 2:
        raise ValidationError("need at least two classes")
    counts = np.array([t for t, _ in class_states], dtype=float)
    total = counts.sum()
    out = 0.0
    for i, (ti, rho_i) in enumerate(class_states):
        for j, (tj, rho_j) in enumerate(class_states):
            if i != j:
                out += math.sqrt(ti * tj) / total * fidelity(rho_i, rho_j)
    return out


@dataclass(frozen=True)
class RiskReport:
    """Bundle of the accuracy/generalization numbers for one embedding."""

    risk: float
    bayes_risk: float
    delta: float
    approx_error: float
    gen_bound_B: float
    budget: float
    T: int
    delta_confidence: float

    def __post_init__(self):
        if not 0.0 <= self.risk <= 1.0:
            raise ValidationError(f"risk {self.risk} outside [0, 1]")
        if not -1e-9 <= self.approx_error <= self.delta + 1e-9:
            raise ValidationError(
                f"approximation error {self.approx_error} outside [0, {self.delta}]")
        if self.gen_bound_B < 1.0 - 1e-9:
            raise ValidationError(f"generalization bound {self.gen_bound_B} below 1")

    def to_json_dict(self) -> dict:
        return {
            "risk": self.risk,
            "bayes_risk": self.bayes_risk,
            "delta": self.delta,
            "approx_error": self.approx_error,
            "gen_bound_B": self.gen_bound_B,
            "budget": self.budget,
            "T": self.T,
            "delta_confidence": self.delta_confidence,
        }


def risk_report(e: Embedding, ens: LabeledEnsemble, t: int,
                delta_confidence: float = 0.05) -> RiskReport:
    """Evaluate the full report for a binary equal-prior ensemble."""
    _require_equal_binary_priors(ens)
    rho0 = class_average(e, ens, 0)
    rho1 = class_average(e, ens, 1)
    povm = helstrom_povm(rho0, rho1)
    r = risk(e, ens, povm)
    b = gen_bound_B(e, ens)
    _, budget = rademacher_budget(max(b, 1.0), t, ens.n_classes, delta_confidence)
    return RiskReport(
        risk=r,
        bayes_risk=bayes_risk(ens),
        delta=delta_total_variation(ens),
        approx_error=approximation_error(e, ens),
        gen_bound_B=b,
        budget=budget,
        T=t,
        delta_confidence=delta_confidence,
    )
