"""Maps from classical inputs to quantum states, and labeled input ensembles.

Embedding descriptors are immutable; evaluation is pure.  The supported
kinds are the constant state, basis (index-table) encoding, the
single-qubit angle encoding repeated over qubits, the layered data
reuploading circuit, and the tensor-copy / depolarizing wrappers.

Angle-encoded inputs are expected to be rescaled to [0, 2*pi] by the
caller; no rescaling happens here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linalg import (
    DensityOperator,
    ValidationError,
    TRACE_TOL,
    hermitize,
)

RANK_TOL = 1e-10


def _as_input(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


class Embedding:
    """Base descriptor for a map from inputs x to density operators."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def amplitudes(self, x) -> np.ndarray | None:
        """State vector of the embedded state when it is pure, else None."""
        return None

    def density(self, x) -> DensityOperator:
        v = self.amplitudes(x)
        if v is None:
            raise NotImplementedError
        return DensityOperator.from_vector(v)

    def to_json_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantEmbedding(Embedding):
    """Every input maps to the same fixed state."""

    state: DensityOperator

    @property
    def dim(self) -> int:
        return self.state.dim

    def amplitudes(self, x):
        w, v = np.linalg.eigh(self.state.matrix)
        if w[-1] < 1.0 - RANK_TOL:
            return None
        return v[:, -1]

    def density(self, x) -> DensityOperator:
        return self.state

    def to_json_dict(self) -> dict:
        m = self.state.matrix
        return {"kind": "constant",
                "matrix_re": m.real.tolist(), "matrix_im": m.imag.tolist()}


@dataclass(frozen=True)
class BasisEmbedding(Embedding):
    """Each known input maps to its own computational basis vector."""

    inputs: tuple
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        keys = [tuple(_as_input(x)) for x in self.inputs]
        if len(set(keys)) != len(keys):
            raise ValidationError("basis embedding inputs must be distinct")
        object.__setattr__(self, "inputs", tuple(keys))
        object.__setattr__(self, "_index", {k: i for i, k in enumerate(keys)})

    @classmethod
    def from_inputs(cls, xs: Iterable) -> "BasisEmbedding":
        return cls(tuple(tuple(_as_input(x)) for x in xs))

    @property
    def dim(self) -> int:
        return len(self.inputs)

    def index_of(self, x) -> int:
        key = tuple(_as_input(x))
        try:
            return self._index[key]
        except KeyError:
            raise ValidationError(f"input {key} not in the basis-encoding table") from None

    def amplitudes(self, x):
        v = np.zeros(self.dim, dtype=complex)
        v[self.index_of(x)] = 1.0
        return v

    def to_json_dict(self) -> dict:
        return {"kind": "basis", "inputs": [list(k) for k in self.inputs]}


@dataclass(frozen=True)
class AngleEmbedding(Embedding):
    """|psi(x)> = cos(x/2)|0> + sin(x/2)|1>, tensored over n_qubits copies."""

    n_qubits: int = 1

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("angle encoding needs n_qubits >= 1")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def amplitudes(self, x):
        xv = _as_input(x)
        if xv.size != 1:
            raise ValidationError("angle encoding takes a scalar input")
        t = float(xv[0])
        v = np.array([np.cos(t / 2), np.sin(t / 2)], dtype=complex)
        out = v
        for _ in range(self.n_qubits - 1):
            out = np.kron(out, v)
        return out

    def to_json_dict(self) -> dict:
        return {"kind": "angle", "n_qubits": self.n_qubits}


def _rotation_y(theta: np.ndarray, states: np.ndarray) -> np.ndarray:
    # exp(i theta sigma_y) = [[cos, sin], [-sin, cos]]
    a = np.cos(theta) * states[:, 0] + np.sin(theta) * states[:, 1]
    b = -np.sin(theta) * states[:, 0] + np.cos(theta) * states[:, 1]
    return np.stack([a, b], axis=1)


def _rotation_z(theta: np.ndarray, states: np.ndarray) -> np.ndarray:
    # exp(i theta sigma_z) = diag(e^{i theta}, e^{-i theta})
    phase = np.exp(1j * theta)
    return np.stack([phase * states[:, 0], np.conj(phase) * states[:, 1]], axis=1)


@dataclass(frozen=True)
class ReuploadingEmbedding(Embedding):
    """Layered single-qubit circuit of alternating y/z rotations.

    Each layer applies exp(i (w_y . x + b_y) sigma_y) followed by
    exp(i (w_z . x + b_z) sigma_z) to the running state, starting from |0>.
    Weights have shape (layers, 2, input_dim + 1) with axis 1 ordered
    (y, z) and the last axis ordered (bias, coefficients...).  The +i sign
    convention in the rotations is deliberate and matters for portability
    of trained weights.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 3 or w.shape[1] != 2 or w.shape[2] < 2:
            raise ValidationError(
                f"reuploading weights must have shape (layers, 2, input_dim + 1), got {w.shape}")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def zeros(cls, layers: int, input_dim: int) -> "ReuploadingEmbedding":
        return cls(np.zeros((layers, 2, input_dim + 1)))

    @property
    def layers(self) -> int:
        return self.weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.weights.shape[2] - 1

    @property
    def dim(self) -> int:
        return 2

    def amplitudes(self, x):
        return self.amplitudes_batch(np.reshape(_as_input(x), (1, -1)))[0]

    def amplitudes_batch(self, xs: np.ndarray) -> np.ndarray:
        """Embed a whole (n, input_dim) batch; returns (n, 2) state vectors."""
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.input_dim:
            raise ValidationError(
                f"expected inputs of shape (n, {self.input_dim}), got {xs.shape}")
        states = np.zeros((xs.shape[0], 2), dtype=complex)
        states[:, 0] = 1.0
        for layer in self.weights:
            states = _rotation_y(xs @ layer[0, 1:] + layer[0, 0], states)
            states = _rotation_z(xs @ layer[1, 1:] + layer[1, 0], states)
        return states

    def to_json_dict(self) -> dict:
        return {"kind": "reuploading", "weights": self.weights.tolist()}


@dataclass(frozen=True)
class NCopiesEmbedding(Embedding):
    """Tensor power of an inner embedding: x maps to `copies` copies of rho(x)."""

    inner: Embedding
    copies: int

    def __post_init__(self):
        if self.copies < 1:
            raise ValidationError("copy count must be >= 1")

    @property
    def dim(self) -> int:
        return self.inner.dim ** self.copies

    def amplitudes(self, x):
        v = self.inner.amplitudes(x)
        if v is None:
            return None
        out = v
        for _ in range(self.copies - 1):
            out = np.kron(out, v)
        return out

    def density(self, x) -> DensityOperator:
        v = self.amplitudes(x)
        if v is not None:
            return DensityOperator.from_vector(v)
        m = self.inner.density(x).matrix
        out = m
        for _ in range(self.copies - 1):
            out = np.kron(out, m)
        return DensityOperator(out)

    def to_json_dict(self) -> dict:
        return {"kind": "n_copies", "copies": self.copies,
                "inner": self.inner.to_json_dict()}


@dataclass(frozen=True)
class DepolarizedEmbedding(Embedding):
    """Mixes the inner state with the maximally mixed one: (1-eps) rho + eps I/d."""

    inner: Embedding
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"noise strength {self.epsilon} outside [0, 1]")

    @property
    def dim(self) -> int:
        return self.inner.dim

    def amplitudes(self, x):
        if self.epsilon == 0.0:
            return self.inner.amplitudes(x)
        return None

    def density(self, x) -> DensityOperator:
        d = self.dim
        m = self.inner.density(x).matrix
        return DensityOperator((1.0 - self.epsilon) * m
                               + self.epsilon * np.eye(d, dtype=complex) / d)

    def to_json_dict(self) -> dict:
        return {"kind": "depolarized", "epsilon": float(self.epsilon),
                "inner": self.inner.to_json_dict()}


def embedding_from_json(data: dict) -> Embedding:
    """Rebuild an embedding descriptor from its JSON dictionary form."""
    kind = data.get("kind")
    if kind == "constant":
        m = np.asarray(data["matrix_re"], dtype=float) \
            + 1j * np.asarray(data["matrix_im"], dtype=float)
        return ConstantEmbedding(DensityOperator(m))
    if kind == "basis":
        return BasisEmbedding.from_inputs(data["inputs"])
    if kind == "angle":
        return AngleEmbedding(int(data["n_qubits"]))
    if kind == "reuploading":
        return ReuploadingEmbedding(np.asarray(data["weights"], dtype=float))
    if kind == "n_copies":
        return NCopiesEmbedding(embedding_from_json(data["inner"]), int(data["copies"]))
    if kind == "depolarized":
        return DepolarizedEmbedding(embedding_from_json(data["inner"]),
                                    float(data["epsilon"]))
    raise ValidationError(f"unknown embedding kind {kind!r}")


def embed(e: Embedding, x) -> DensityOperator:
    """Evaluate the embedding at one input."""
    return e.density(x)


class LabeledEnsemble:
    """A finite joint distribution over (class, input) pairs.

    Points sharing the same input (one per class, as on a discretized grid)
    are grouped, so marginals and conditionals are read off a dense joint
    matrix P[c, j] over distinct inputs.
    """

    def __init__(self, classes, xs, weights):
        classes = np.asarray(classes, dtype=int)
        weights = np.asarray(weights, dtype=float)
        xs = np.asarray(xs, dtype=float)
        if xs.ndim == 1:
            xs = xs[:, None]
        if not (len(classes) == len(weights) == xs.shape[0]):
            raise ValidationError("classes, xs and weights must have equal length")
        if np.any(weights < 0):
            raise ValidationError("weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > TRACE_TOL:
            raise ValidationError(f"weights sum to {total}, expected 1")
        if classes.min(initial=0) < 0:
            raise ValidationError("class labels must be nonnegative integers")
        n_classes = int(classes.max()) + 1 if len(classes) else 0

        # group points by exact input value, keeping first-occurrence order
        index: dict[tuple, int] = {}
        for row in map(tuple, xs):
            if row not in index:
                index[row] = len(index)
        uniq = np.array(list(index.keys()), dtype=float).reshape(len(index), xs.shape[1])
        joint = np.zeros((n_classes, len(index)))
        for c, row, w in zip(classes, map(tuple, xs), weights):
            joint[c, index[row]] += w

        pc = joint.sum(axis=1)
        if np.any(pc <= 0):
            raise ValidationError("every class must carry positive probability")

        self.xs = uniq
        self.joint = joint
        self.xs.setflags(write=False)
        self.joint.setflags(write=False)

    @classmethod
    def from_points(cls, points: Sequence[tuple]) -> "LabeledEnsemble":
        """Build from an iterable of (class, input, weight) triples."""
        cs, xs, ws = zip(*points)
        return cls(cs, np.asarray(xs, dtype=float), ws)

    @property
    def n_classes(self) -> int:
        return self.joint.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.joint.shape[1]

    @property
    def input_dim(self) -> int:
        return self.xs.shape[1]

    def px(self) -> np.ndarray:
        """Input marginal P(x)."""
        return self.joint.sum(axis=0)

    def pc(self) -> np.ndarray:
        """Class marginal P(c)."""
        return self.joint.sum(axis=1)

    def x_given_c(self, c: int) -> np.ndarray:
        """Conditional P(x | c) over the distinct-input axis."""
        if not 0 <= c < self.n_classes:
            raise ValidationError(f"class {c} out of range")
        return self.joint[c] / self.joint[c].sum()

    def c_given_x(self) -> np.ndarray:
        """Posterior matrix P(c | x); columns with P(x) = 0 are left at zero."""
        px = self.px()
        out = np.zeros_like(self.joint)
        mask = px > 0
        out[:, mask] = self.joint[:, mask] / px[mask]
        return out

    def with_inputs(self, new_xs) -> "LabeledEnsemble":
        """Same joint distribution over a transformed set of inputs."""
        new_xs = np.asarray(new_xs, dtype=float)
        if new_xs.ndim == 1:
            new_xs = new_xs[:, None]
        if new_xs.shape[0] != self.n_inputs:
            raise ValidationError("replacement inputs must match the support size")
        classes = np.repeat(np.arange(self.n_classes), self.n_inputs)
        xs = np.tile(new_xs, (self.n_classes, 1))
        weights = self.joint.reshape(-1)
        keep = weights > 0
        # zero-weight (class, x) cells are dropped; marginals are unchanged
        return LabeledEnsemble(classes[keep], xs[keep], weights[keep])


def ensemble_amplitudes(e: Embedding, ens: LabeledEnsemble) -> np.ndarray | None:
    """State vectors for every distinct input, or None if any state is mixed."""
    rows = []
    for x in ens.xs:
        v = e.amplitudes(x)
        if v is None:
            return None
        rows.append(v)
    return np.asarray(rows)


def _weighted_state_sum(e: Embedding, ens: LabeledEnsemble, w: np.ndarray) -> np.ndarray:
    amps = ensemble_amplitudes(e, ens)
    if amps is not None:
        return hermitize((amps * w[:, None]).T @ amps.conj())
    out = np.zeros((e.dim, e.dim), dtype=complex)
    for wi, x in zip(w, ens.xs):
        if wi > 0:
            out += wi * e.density(x).matrix
    return hermitize(out)


def class_average(e: Embedding, ens: LabeledEnsemble, c: int) -> DensityOperator:
    """Class-conditional mixture rho_c = sum_x P(x|c) rho(x)."""
    return DensityOperator(_weighted_state_sum(e, ens, ens.x_given_c(c)))


def average_state(e: Embedding, ens: LabeledEnsemble) -> DensityOperator:
    """Input-averaged state rho_bar = sum_x P(x) rho(x)."""
    return DensityOperator(_weighted_state_sum(e, ens, ens.px()))


def embedding_purity_stats(e: Embedding, ens: LabeledEnsemble, c: int) -> tuple[float, int]:
    """Purity Tr[rho_c^2] and rank (eigenvalues above RANK_TOL) of rho_c."""
    rho_c = class_average(e, ens, c)
    rank = int(np.sum(rho_c.eigenvalues() > RANK_TOL))
    return rho_c.purity(), rank
