"""Embedding constructors, ensemble mixtures, and JSON round-tripping."""

import numpy as np
import pytest

from qembound import (
    AngleEmbedding,
    BasisEmbedding,
    ConstantEmbedding,
    DensityOperator,
    DepolarizedEmbedding,
    LabeledEnsemble,
    NCopiesEmbedding,
    ReuploadingEmbedding,
    ValidationError,
    class_average,
    embed,
    embedding_from_json,
    embedding_purity_stats,
    fidelity,
)

from conftest import random_density, random_pure_vector


def uniform_pair_ensemble():
    return LabeledEnsemble([0, 1], np.array([[0.0], [1.0]]), [0.5, 0.5])


class TestLabeledEnsemble:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            LabeledEnsemble([0, 1], [[0.0], [1.0]], [0.4, 0.4])

    def test_every_class_needs_mass(self):
        with pytest.raises(ValidationError):
            LabeledEnsemble([0, 2], [[0.0], [1.0]], [0.5, 0.5])

    def test_shared_inputs_are_grouped(self):
        ens = LabeledEnsemble([0, 1, 0], [[0.0], [0.0], [1.0]], [0.3, 0.3, 0.4])
        assert ens.n_inputs == 2
        assert ens.px() == pytest.approx([0.6, 0.4])
        assert ens.pc() == pytest.approx([0.7, 0.3])
        post = ens.c_given_x()
        assert post[:, 0] == pytest.approx([0.5, 0.5])

    def test_conditionals_normalize(self):
        ens = LabeledEnsemble([0, 0, 1], [[0.0], [1.0], [2.0]], [0.2, 0.2, 0.6])
        assert ens.x_given_c(0).sum() == pytest.approx(1.0)
        assert ens.x_given_c(1) == pytest.approx([0.0, 0.0, 1.0])


class TestAngleEmbedding:
    def test_zero_angle_gives_ground_state(self):
        rho = embed(AngleEmbedding(1), 0.0)
        np.testing.assert_allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-12)

    def test_copy_count_sets_dimension(self):
        assert AngleEmbedding(3).dim == 8

    def test_overlap_is_cosine_of_half_difference(self, rng):
        e = AngleEmbedding(1)
        for _ in range(10):
            x, y = rng.uniform(0, 2 * np.pi, 2)
            f = fidelity(embed(e, x), embed(e, y))
            assert f == pytest.approx(abs(np.cos((x - y) / 2)), abs=1e-12)


class TestReuploading:
    def test_zero_weights_give_ground_state_everywhere(self, rng):
        e = ReuploadingEmbedding.zeros(layers=3, input_dim=2)
        for _ in range(5):
            rho = embed(e, rng.standard_normal(2))
            np.testing.assert_allclose(rho.matrix, np.diag([1.0, 0.0]), atol=1e-12)

    def test_quarter_turn_matches_hand_multiplied_matrices(self):
        # one layer, y-angle pi/4, z-angle 0: state = exp(i pi/4 sigma_y)|0>
        w = np.zeros((1, 2, 2))
        w[0, 0, 0] = np.pi / 4
        e = ReuploadingEmbedding(w)
        sy = np.array([[0.0, -1j], [1j, 0.0]])
        ry = np.cos(np.pi / 4) * np.eye(2) + 1j * np.sin(np.pi / 4) * sy
        expected = ry @ np.array([1.0, 0.0])
        got = e.amplitudes(np.array([0.0]))
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_layer_composition_matches_matrix_products(self, rng):
        # generic two-layer circuit against explicitly multiplied 2x2 matrices
        w = rng.standard_normal((2, 2, 4))
        e = ReuploadingEmbedding(w)
        x = rng.standard_normal(3)
        sy = np.array([[0.0, -1j], [1j, 0.0]])
        sz = np.diag([1.0, -1.0]).astype(complex)
        state = np.array([1.0, 0.0], dtype=complex)
        for layer in w:
            ty = layer[0, 1:] @ x + layer[0, 0]
            tz = layer[1, 1:] @ x + layer[1, 0]
            ry = np.cos(ty) * np.eye(2) + 1j * np.sin(ty) * sy
            rz = np.cos(tz) * np.eye(2) + 1j * np.sin(tz) * sz
            state = rz @ (ry @ state)
        np.testing.assert_allclose(e.amplitudes(x), state, atol=1e-12)

    def test_output_is_always_pure(self, rng):
        e = ReuploadingEmbedding(rng.standard_normal((4, 2, 3)))
        for _ in range(10):
            assert embed(e, rng.standard_normal(2)).purity() == pytest.approx(1.0, abs=1e-10)


class TestBasisEmbedding:
    def test_maps_inputs_to_basis_vectors(self):
        e = BasisEmbedding.from_inputs([[0.0], [1.0], [2.0]])
        np.testing.assert_allclose(embed(e, 1.0).matrix, np.diag([0.0, 1.0, 0.0]), atol=1e-15)

    def test_unseen_input_raises(self):
        e = BasisEmbedding.from_inputs([[0.0], [1.0]])
        with pytest.raises(ValidationError):
            embed(e, 2.0)


class TestWrappers:
    def test_depolarized_identity_at_zero_noise(self, rng):
        inner = AngleEmbedding(1)
        e = DepolarizedEmbedding(inner, 0.0)
        x = rng.uniform(0, 2 * np.pi)
        np.testing.assert_allclose(embed(e, x).matrix, embed(inner, x).matrix, atol=1e-15)

    def test_depolarized_full_noise_is_maximally_mixed(self, rng):
        e = DepolarizedEmbedding(AngleEmbedding(1), 1.0)
        np.testing.assert_allclose(embed(e, rng.uniform(0, 6)).matrix, np.eye(2) / 2, atol=1e-15)

    def test_copies_multiply_fidelities(self, rng):
        inner = AngleEmbedding(1)
        e = NCopiesEmbedding(inner, 3)
        assert e.dim == 8
        for _ in range(10):
            x, y = rng.uniform(0, 2 * np.pi, 2)
            f1 = fidelity(embed(inner, x), embed(inner, y))
            f3 = fidelity(embed(e, x), embed(e, y))
            assert f3 == pytest.approx(f1 ** 3, abs=1e-9)

    def test_copies_of_mixed_states(self, rng):
        inner = DepolarizedEmbedding(AngleEmbedding(1), 0.25)
        e = NCopiesEmbedding(inner, 2)
        x, y = rng.uniform(0, 2 * np.pi, 2)
        f1 = fidelity(embed(inner, x), embed(inner, y))
        assert fidelity(embed(e, x), embed(e, y)) == pytest.approx(f1 ** 2, abs=1e-9)


class TestClassAverage:
    def test_single_point_class(self):
        ens = uniform_pair_ensemble()
        e = AngleEmbedding(1)
        np.testing.assert_allclose(class_average(e, ens, 0).matrix,
                                   embed(e, 0.0).matrix, atol=1e-12)

    def test_two_orthogonal_points_give_maximally_mixed(self):
        ens = LabeledEnsemble([0, 0], [[0.0], [np.pi]], [0.5, 0.5])
        rho = class_average(AngleEmbedding(1), ens, 0)
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)

    def test_matches_direct_accumulation_on_gaussian_grid(self):
        from qembound import gaussian_ensemble

        data = gaussian_ensemble(grid_n=120)
        ens = data.angle_ensemble()
        e = AngleEmbedding(1)
        for c in (0, 1):
            expected = np.zeros((2, 2), dtype=complex)
            for w, x in zip(ens.x_given_c(c), ens.xs):
                expected += w * embed(e, x).matrix
            np.testing.assert_allclose(class_average(e, ens, c).matrix, expected, atol=1e-12)

    def test_mixture_is_valid_density_operator(self, rng):
        # random mixed-state embedding table through the dense path
        states = [random_density(rng, 3) for _ in range(4)]
        e = BasisLikeMixed(states)
        w = rng.dirichlet(np.ones(4))
        ens = LabeledEnsemble([0, 0, 1, 1], np.arange(4.0)[:, None], w / w.sum())
        rho = class_average(e, ens, 0)
        assert isinstance(rho, DensityOperator)


class BasisLikeMixed:
    """Test helper: a mixed-state table embedding over integer inputs."""

    def __init__(self, states):
        self.states = states

    @property
    def dim(self):
        return self.states[0].dim

    def amplitudes(self, x):
        return None

    def density(self, x):
        return self.states[int(np.atleast_1d(x)[0])]


class TestPurityStats:
    def test_constant_embedding(self, rng):
        state = random_density(rng, 3, rank=2)
        e = ConstantEmbedding(state)
        ens = uniform_pair_ensemble()
        purity, rank = embedding_purity_stats(e, ens, 0)
        assert purity == pytest.approx(state.purity(), abs=1e-12)
        assert rank == 2

    def test_two_orthogonal_points(self):
        ens = LabeledEnsemble([0, 0, 1], [[0.0], [np.pi], [1.0]], [0.25, 0.25, 0.5])
        purity, rank = embedding_purity_stats(AngleEmbedding(1), ens, 0)
        assert purity == pytest.approx(0.5)
        assert rank == 2

    def test_fidelity_sum_form_for_pure_ensembles(self, rng):
        # purity of the class mixture equals the double sum of squared
        # pairwise fidelities weighted by the conditional distribution
        e = AngleEmbedding(1)
        xs = rng.uniform(0, 2 * np.pi, 6)
        w = rng.dirichlet(np.ones(6))
        ens = LabeledEnsemble(np.zeros(6, dtype=int).tolist() + [1],
                              np.concatenate([xs, [9.0]])[:, None],
                              np.concatenate([w * 0.5, [0.5]]))
        purity, _ = embedding_purity_stats(e, ens, 0)
        cond = ens.x_given_c(0)
        states = [embed(e, x) for x in ens.xs]
        expected = 0.0
        for i in range(ens.n_inputs):
            for j in range(ens.n_inputs):
                expected += cond[i] * cond[j] * fidelity(states[i], states[j]) ** 2
        assert purity == pytest.approx(expected, abs=1e-10)


class TestSerialization:
    def test_round_trip_all_kinds(self, rng):
        kinds = [
            ConstantEmbedding(random_density(rng, 2)),
            BasisEmbedding.from_inputs([[0.0], [1.0], [2.5]]),
            AngleEmbedding(2),
            ReuploadingEmbedding(rng.standard_normal((2, 2, 3))),
            NCopiesEmbedding(AngleEmbedding(1), 3),
            DepolarizedEmbedding(AngleEmbedding(1), 0.3),
        ]
        for e in kinds:
            back = embedding_from_json(e.to_json_dict())
            assert back.dim == e.dim
            x = [0.0] if not isinstance(e, ReuploadingEmbedding) else [0.0, 0.0]
            np.testing.assert_allclose(embed(back, x).matrix, embed(e, x).matrix, atol=1e-12)

    def test_descriptors_validate_against_schema(self, rng):
        jsonschema = pytest.importorskip("jsonschema")
        import json
        from pathlib import Path
        import qembound

        schema = json.loads((Path(qembound.__file__).parent
                             / "schemas" / "embedding.schema.json").read_text())
        for e in (AngleEmbedding(1),
                  ReuploadingEmbedding(rng.standard_normal((1, 2, 3))),
                  DepolarizedEmbedding(NCopiesEmbedding(AngleEmbedding(1), 2), 0.1)):
            jsonschema.validate(e.to_json_dict(), schema)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            embedding_from_json({"kind": "mystery"})
