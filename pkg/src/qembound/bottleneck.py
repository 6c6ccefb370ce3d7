"""Information-bottleneck objective, fixed-point solvers, and VQIB training.

The Lagrangian trades compression of the inputs against class information
with a multiplier beta.  Two self-consistent solvers tabulate the optimal
embedding point by point (mixed states, or pure states through a power
iteration); the variational route instead trains the weights of a layered
reuploading circuit on an empirical sample by derivative-free simplex
minimization, exactly in the purity form the single-qubit case allows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .embeddings import LabeledEnsemble, ReuploadingEmbedding
from .linalg import (
    DensityOperator,
    NumericalError,
    ValidationError,
    LOG_FLOOR,
    entropy_from_eigenvalues,
    hermitize,
)

_PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


@dataclass(frozen=True)
class IBConfig:
    """Knobs of the fixed-point solvers."""

    beta: float
    iterations: int = 1000
    mode: str = "mixed"
    seed: int = 0
    init_scale: float = 1e-3  # symmetry-breaking perturbation of the start

    def __post_init__(self):
        if self.beta < 0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")
        if self.iterations < 1:
            raise ValidationError("iteration budget must be >= 1")
        if self.mode not in ("pure", "mixed"):
            raise ValidationError(f"mode must be 'pure' or 'mixed', got {self.mode!r}")


@dataclass
class IBSolution:
    """Tabulated embedding plus the per-checkpoint metric trajectory."""

    states: np.ndarray            # (n_inputs, d, d) density matrices
    checkpoints: list             # (iteration, lagrangian, risk, bound) tuples
    residual: float               # trace-norm change of the final sweep
    config: IBConfig

    def density(self, j: int) -> DensityOperator:
        return DensityOperator(self.states[j])

    def bloch_table(self) -> np.ndarray | None:
        """(n, 3) Bloch vectors when the states are single-qubit, else None."""
        if self.states.shape[1] != 2:
            return None
        return np.stack([
            np.real(np.einsum("zij,ji->z", self.states, _PAULI[0])),
            np.real(np.einsum("zij,ji->z", self.states, _PAULI[1])),
            np.real(np.einsum("zij,ji->z", self.states, _PAULI[2])),
        ], axis=1)

    def to_json_dict(self) -> dict:
        bloch = self.bloch_table()
        out = {
            "beta": self.config.beta,
            "mode": self.config.mode,
            "iterations": self.config.iterations,
            "seed": self.config.seed,
            "residual": self.residual,
            "trajectory": [
                {"iteration": it, "lagrangian": lag, "risk": r, "gen_bound_B": b}
                for it, lag, r, b in self.checkpoints
            ],
        }
        if bloch is not None:
            out["bloch"] = bloch.tolist()
        else:
            out["states_re"] = self.states.real.tolist()
            out["states_im"] = self.states.imag.tolist()
        return out


def _batch_entropies(states: np.ndarray) -> np.ndarray:
    w = np.clip(np.linalg.eigvalsh(states), 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, -w * np.log2(np.where(w > 0, w, 1.0)), 0.0)
    return terms.sum(axis=-1)


def _class_mixtures(states: np.ndarray, ens: LabeledEnsemble) -> np.ndarray:
    """rho_c = sum_x P(x|c) rho(x) for every class, shape (N_C, d, d)."""
    cond = ens.joint / ens.pc()[:, None]
    return np.einsum("cz,zij->cij", cond, states)


def ib_lagrangian(states: np.ndarray, ens: LabeledEnsemble, beta: float) -> float:
    """(1-beta) S[rho_bar] - sum_x P(x) S[rho(x)] + beta sum_c P(c) S[rho_c].

    Equals I(X:Q) - beta I(C:Q) of the classical-quantum joint state; the
    multiplier and embedding-independent terms of the variational form are
    dropped.
    """
    states = np.asarray(states, dtype=complex)
    px = ens.px()
    rho_bar = np.einsum("z,zij->ij", px, states)
    s_x = _batch_entropies(states)
    rho_c = _class_mixtures(states, ens)
    s_c = _batch_entropies(rho_c)
    return float((1.0 - beta) * _batch_entropies(rho_bar[None])[0]
                 - np.dot(px, s_x) + beta * np.dot(ens.pc(), s_c))


def _batch_logm(states: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(states)
    w = np.maximum(w, LOG_FLOOR)
    return np.einsum("...ij,...j,...kj->...ik", v, np.log(w), v.conj())


def hermitize_batch(ms: np.ndarray) -> np.ndarray:
    return 0.5 * (ms + np.conj(np.swapaxes(ms, -1, -2)))


def _normalized_exp(ms: np.ndarray) -> np.ndarray:
    """exp of a batch of Hermitian matrices, renormalized to unit trace."""
    w, v = np.linalg.eigh(ms)
    w = w - w.max(axis=-1, keepdims=True)  # scale out the multiplier
    e = np.exp(w)
    out = np.einsum("...ij,...j,...kj->...ik", v, e, v.conj())
    tr = np.real(np.einsum("...ii", out))
    if np.any(tr < 1e-300):
        raise NumericalError("fixed-point update produced a vanishing state")
    return out / tr[..., None, None]


def _risk_and_bound(states: np.ndarray, ens: LabeledEnsemble) -> tuple[float, float]:
    rho_c = _class_mixtures(states, ens)
    pc = ens.pc()
    if ens.n_classes == 2:
        # optimal-measurement risk (1 - ||p0 rho_0 - p1 rho_1||_1) / 2
        lam = np.linalg.eigvalsh(hermitize(pc[0] * rho_c[0] - pc[1] * rho_c[1]))
        r = float(np.clip(0.5 * (1.0 - np.abs(lam).sum()), 0.0, 1.0))
    else:
        r = float("nan")
    m2 = np.einsum("z,zij,zjk->ik", ens.px(), states, states)
    w = np.clip(np.linalg.eigvalsh(hermitize(m2)), 0.0, None)
    return r, float(np.sum(np.sqrt(w)) ** 2)


def _ib_exponent(states: np.ndarray, ens: LabeledEnsemble, beta: float) -> np.ndarray:
    """Per-input exponent (1-beta) log rho_bar + beta sum_c P(c|z) log rho_c."""
    rho_c = _class_mixtures(states, ens)
    rho_bar = np.einsum("c,cij->ij", ens.pc(), rho_c)
    log_c = _batch_logm(rho_c)
    log_bar = _batch_logm(rho_bar[None])[0]
    post = ens.c_given_x()  # (N_C, n)
    return ((1.0 - beta) * log_bar[None, :, :]
            + beta * np.einsum("cz,cij->zij", post, log_c))


def _init_mixed(ens: LabeledEnsemble, dim: int, rng: np.random.Generator,
                scale: float) -> np.ndarray:
    """Maximally mixed start plus a small traceless Hermitian kick per input."""
    n = ens.n_inputs
    a = rng.standard_normal((n, dim, dim)) + 1j * rng.standard_normal((n, dim, dim))
    h = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
    tr = np.real(np.einsum("zii->z", h)) / dim
    h -= tr[:, None, None] * np.eye(dim)
    states = np.tile(np.eye(dim, dtype=complex) / dim, (n, 1, 1)) + scale * h
    # pull anything that left the PSD cone back inside
    w, v = np.linalg.eigh(states)
    w = np.maximum(w, LOG_FLOOR)
    w /= w.sum(axis=-1, keepdims=True)
    return np.einsum("zij,zj,zkj->zik", v, w, v.conj())


def ib_iterate_mixed(ens: LabeledEnsemble, config: IBConfig, dim: int = 2,
                     checkpoint_every: int = 100) -> IBSolution:
    """Solve the mixed-state self-consistency equation by Jacobi sweeps.

    Every sweep rebuilds the class mixtures from the frozen table, then
    replaces all states at once with the normalized exponential update.
    """
    if config.mode != "mixed":
        raise ValidationError("config.mode must be 'mixed' for this solver")
    rng = np.random.default_rng(config.seed)
    states = _init_mixed(ens, dim, rng, config.init_scale)
    checkpoints = []
    residual = 0.0
    for it in range(1, config.iterations + 1):
        new = _normalized_exp(_ib_exponent(states, ens, config.beta))
        if it == config.iterations:
            diff = new - states
            residual = float(np.max(np.abs(np.linalg.eigvalsh(
                hermitize_batch(diff))).sum(axis=-1)))
        states = new
        if it % checkpoint_every == 0 or it == config.iterations:
            r, b = _risk_and_bound(states, ens)
            checkpoints.append((it, ib_lagrangian(states, ens, config.beta), r, b))
    return IBSolution(states=states, checkpoints=checkpoints,
                      residual=residual, config=config)


def ib_iterate_pure(ens: LabeledEnsemble, config: IBConfig, dim: int = 2,
                    checkpoint_every: int = 100) -> IBSolution:
    """Pure-state power iteration of the self-consistency equation.

    Each sweep applies the exponential of the frozen per-input exponent to
    every state vector and renormalizes; vectors that collapse are
    restarted from a fresh Haar-random state.
    """
    if config.mode != "pure":
        raise ValidationError("config.mode must be 'pure' for this solver")
    rng = np.random.default_rng(config.seed)

    def haar(n):
        v = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
        return v / np.linalg.norm(v, axis=1, keepdims=True)

    vecs = haar(ens.n_inputs)
    checkpoints = []
    residual = 0.0
    for it in range(1, config.iterations + 1):
        states = np.einsum("zi,zj->zij", vecs, vecs.conj())
        w, v = np.linalg.eigh(_ib_exponent(states, ens, config.beta))
        w = w - w.max(axis=-1, keepdims=True)
        op = np.einsum("zij,zj,zkj->zik", v, np.exp(w), v.conj())
        new = np.einsum("zij,zj->zi", op, vecs)
        norms = np.linalg.norm(new, axis=1)
        dead = norms < 1e-150
        if np.any(dead):
            new[dead] = haar(int(dead.sum()))
            norms[dead] = 1.0
        new = new / norms[:, None]
        if it == config.iterations:
            overlap = np.abs(np.einsum("zi,zi->z", new.conj(), vecs))
            residual = float(np.max(2.0 * np.sqrt(np.clip(1.0 - overlap ** 2, 0.0, None))))
        vecs = new
        if it % checkpoint_every == 0 or it == config.iterations:
            states = np.einsum("zi,zj->zij", vecs, vecs.conj())
            r, b = _risk_and_bound(states, ens)
            checkpoints.append((it, ib_lagrangian(states, ens, config.beta), r, b))
    states = np.einsum("zi,zj->zij", vecs, vecs.conj())
    return IBSolution(states=states, checkpoints=checkpoints,
                      residual=residual, config=config)


# ---------------------------------------------------------------------------
# Variational route: empirical Lagrangian of the reuploading circuit
# ---------------------------------------------------------------------------

def entropy_from_purity(p: float) -> float:
    """Single-qubit entropy in bits as a function of the purity Tr[rho^2]."""
    if p < 0.5 - 1e-10 or p > 1.0 + 1e-10:
        raise NumericalError(f"purity {p} outside [1/2, 1]")
    p = min(max(p, 0.5), 1.0)
    root = np.sqrt(2.0 * p - 1.0)
    return entropy_from_eigenvalues(np.array([(1.0 + root) / 2, (1.0 - root) / 2]))


def _pair_purities(states: np.ndarray, labels: np.ndarray) -> tuple[float, dict]:
    f2 = np.abs(states @ states.conj().T) ** 2
    t = len(labels)
    iu = np.triu_indices(t, k=1)
    p_tot = (t + 2.0 * float(f2[iu].sum())) / t ** 2
    per_class = {}
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        sub = f2[np.ix_(idx, idx)]
        tc = len(idx)
        iuc = np.triu_indices(tc, k=1)
        per_class[int(c)] = (tc + 2.0 * float(sub[iuc].sum())) / tc ** 2
    return p_tot, per_class


def vqib_loss(weights, xs: np.ndarray, labels: np.ndarray, beta: float) -> float:
    """Empirical IB Lagrangian of the reuploading embedding, via purities.

    (1-beta) s(P_tot) + beta sum_c (T_c/T) s(P_c), where the purities come
    from the pairwise squared fidelities of the embedded training states.
    """
    labels = np.asarray(labels)
    if np.any(np.bincount(labels) < 1):
        raise ValidationError("every class needs at least one training point")
    e = weights if isinstance(weights, ReuploadingEmbedding) \
        else ReuploadingEmbedding(np.asarray(weights, dtype=float))
    states = e.amplitudes_batch(np.asarray(xs, dtype=float))
    p_tot, per_class = _pair_purities(states, labels)
    t = len(labels)
    out = (1.0 - beta) * entropy_from_purity(p_tot)
    for c, pc in per_class.items():
        tc = int(np.sum(labels == c))
        out += beta * (tc / t) * entropy_from_purity(pc)
    return float(out)


@dataclass(frozen=True)
class SimplexConfig:
    """Schedule of the derivative-free simplex minimization.

    Runs one simplex search from the all-zeros start, then `restarts`
    further searches seeded from the best point so far; the first restart
    uses a small axis-aligned simplex (polish), later ones use random
    directions at alternating scales to hop between basins.
    """

    max_evals: int = 5000
    initial_step: float = 0.5
    polish_step: float = 0.1
    restarts: int = 1
    hop_step: float = 2.0
    xatol: float = 1e-8
    fatol: float = 1e-12


@dataclass
class VQIBResult:
    embedding: ReuploadingEmbedding
    loss: float
    stage_losses: list
    n_evals: int
    converged: bool


def vqib_train(xs: np.ndarray, labels: np.ndarray, beta: float, layers: int,
               config: SimplexConfig | None = None, seed: int = 0) -> VQIBResult:
    """Minimize the empirical IB Lagrangian over the reuploading weights.

    Starts from all-zero weights (the constant embedding).  Restarts beyond
    the first polish use seeded random simplex directions, which is what
    lets the search leave the shallow basins near the origin.
    """
    if layers < 1:
        raise ValidationError("need at least one circuit layer")
    config = config or SimplexConfig()
    xs = np.asarray(xs, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_par = layers * 2 * (xs.shape[1] + 1)
    rng = np.random.default_rng(seed)

    def objective(flat):
        return vqib_loss(flat.reshape(layers, 2, xs.shape[1] + 1), xs, labels, beta)

    def run(x0, step, dirs):
        simplex = np.vstack([x0] + [x0 + step * dirs[i] for i in range(n_par)])
        return minimize(objective, x0, method="Nelder-Mead",
                        options=dict(initial_simplex=simplex,
                                     maxfev=config.max_evals,
                                     maxiter=config.max_evals,
                                     xatol=config.xatol, fatol=config.fatol))

    best = run(np.zeros(n_par), config.initial_step, np.eye(n_par))
    stage_losses = [float(best.fun)]
    evals = int(best.nfev)
    converged = bool(best.success)
    for stage in range(config.restarts):
        if stage == 0:
            step, dirs = config.polish_step, np.eye(n_par)
        else:
            dirs = rng.standard_normal((n_par, n_par))
            dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
            step = config.hop_step if stage % 2 else config.polish_step
        res = run(best.x, step, dirs)
        evals += int(res.nfev)
        stage_losses.append(float(res.fun))
        if res.fun < best.fun:
            best = res
            converged = bool(res.success)
    weights = best.x.reshape(layers, 2, xs.shape[1] + 1)
    return VQIBResult(embedding=ReuploadingEmbedding(weights),
                      loss=float(best.fun), stage_losses=stage_losses,
                      n_evals=evals, converged=converged)
