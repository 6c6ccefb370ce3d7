import numpy as np
import pytest

from qembound import DensityOperator, LabeledEnsemble


def random_hermitian(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


def random_density(rng, dim, rank=None):
    """Random mixed state, optionally rank-limited."""
    rank = rank or dim
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    m = a @ a.conj().T
    return DensityOperator(m / np.real(np.trace(m)))


def random_pure_vector(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


class TablePure:
    """Embedding over integer-keyed inputs with given state vectors."""

    def __init__(self, vectors):
        self.vectors = np.asarray(vectors, dtype=complex)

    @property
    def dim(self):
        return self.vectors.shape[1]

    def amplitudes(self, x):
        return self.vectors[int(np.atleast_1d(x)[0])]

    def density(self, x):
        return DensityOperator.from_vector(self.amplitudes(x))


class TableMixed:
    """Embedding over integer-keyed inputs with given density operators."""

    def __init__(self, states):
        self.states = list(states)

    @property
    def dim(self):
        return self.states[0].dim

    def amplitudes(self, x):
        return None

    def density(self, x):
        return self.states[int(np.atleast_1d(x)[0])]


def random_binary_ensemble(rng, n_inputs):
    """Equal-prior binary ensemble over integer inputs 0..n-1."""
    cond = rng.dirichlet(np.ones(n_inputs), size=2)
    classes = np.repeat([0, 1], n_inputs)
    xs = np.tile(np.arange(n_inputs, dtype=float), 2)[:, None]
    weights = 0.5 * np.concatenate([cond[0], cond[1]])
    return LabeledEnsemble(classes, xs, weights)


def random_pure_table(rng, n_inputs, dim):
    v = rng.standard_normal((n_inputs, dim)) + 1j * rng.standard_normal((n_inputs, dim))
    return TablePure(v / np.linalg.norm(v, axis=1, keepdims=True))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
