import json

import numpy as np
import pytest

from qitransfer import linalg, states
from qitransfer.exceptions import (
    DimensionError,
    NormalizationError,
    StateFormatError,
    UnphysicalStateError,
)
from qitransfer.random_states import (
    classical_mixture,
    haar_pure_state,
    random_channel,
    random_qubit,
)


def _trace_inner(rho, ops):
    return np.real([np.trace(rho @ op) for op in ops])


class TestQubit:
    def test_ground_state(self):
        np.testing.assert_allclose(states.qubit_from_bloch(0, 0, 1).rho, np.diag([1, 0]))

    def test_maximally_mixed(self):
        np.testing.assert_allclose(states.qubit_from_bloch(0, 0, 0).rho, np.eye(2) / 2)

    def test_trace_inner_product_round_trip(self):
        rho = states.qubit_from_bloch(0.3, -0.4, 0.5).rho
        got = _trace_inner(rho, states.PAULIS[1:])
        np.testing.assert_allclose(got, [0.3, -0.4, 0.5], atol=1e-15)
        np.testing.assert_allclose(states.to_bloch(rho), [0.3, -0.4, 0.5], atol=1e-15)

    def test_outside_ball(self):
        with pytest.raises(UnphysicalStateError):
            states.qubit_from_bloch(0.8, 0.8, 0)

    def test_c0_exact(self):
        with pytest.raises(UnphysicalStateError):
            states.PauliVector([0.9, 0, 0, 0])

    def test_immutable(self):
        rho = states.qubit_from_bloch(0, 0, 1)
        with pytest.raises(ValueError):
            rho.rho[0, 0] = 0.5


class TestDensityState:
    def test_rejects_non_psd(self):
        with pytest.raises(UnphysicalStateError) as info:
            states.DensityState(np.diag([1.5, -0.5]))
        assert info.value.min_eigenvalue == pytest.approx(-0.5)

    def test_rejects_trace(self):
        with pytest.raises(UnphysicalStateError):
            states.DensityState(np.eye(2))

    def test_rejects_non_hermitian(self):
        with pytest.raises(UnphysicalStateError):
            states.DensityState([[0.5, 0.1], [0.0, 0.5]])

    def test_rejects_three_qubits(self):
        with pytest.raises(DimensionError):
            states.DensityState(np.eye(8) / 8)

    def test_tiny_negative_eigenvalue_accepted_not_clipped(self):
        rho = np.diag([1 + 5e-9, -5e-9])
        st = states.DensityState(rho)
        assert st.rho[1, 1].real == pytest.approx(-5e-9)


class TestChannelCorrelation:
    def test_uncorrelated(self):
        r = np.zeros((4, 4))
        r[0, 0] = 1
        np.testing.assert_allclose(states.channel_from_correlation(r).rho, np.eye(4) / 4)

    def test_werner_printed_matrix(self):
        x = 0.5
        rho = states.channel_from_correlation(np.diag([1, x, -x, x])).rho
        np.testing.assert_allclose(rho, states.werner(x).rho, atol=1e-15)

    def test_product_is_outer_product(self, rng):
        for _ in range(20):
            a = random_qubit(rng)
            b = random_qubit(rng)
            r = states.correlation_from_channel(states.product_state(a, b)).r
            va = np.concatenate([[1], states.to_bloch(a)])
            vb = np.concatenate([[1], states.to_bloch(b)])
            np.testing.assert_allclose(r, np.outer(va, vb), atol=1e-14)

    def test_maximally_mixed_to_correlation(self):
        r = states.correlation_from_channel(np.eye(4) / 4).r
        want = np.zeros((4, 4))
        want[0, 0] = 1
        np.testing.assert_allclose(r, want, atol=1e-15)

    def test_bell_correlation_direct_trace(self):
        b = states.bell_vector(0, 0)
        rho = np.outer(b, b.conj())
        direct = np.array(
            [[np.real(np.trace(rho @ np.kron(p, q))) for q in states.PAULIS] for p in states.PAULIS]
        )
        np.testing.assert_allclose(direct, np.diag([1, 1, -1, 1]), atol=1e-15)
        np.testing.assert_allclose(states.correlation_from_channel(rho).r, direct, atol=1e-15)

    @pytest.mark.parametrize("x", [0.0, 0.2, 1 / 3, 0.5, 1.0])
    def test_werner_correlation(self, x):
        r = states.correlation_from_channel(states.werner(x)).r
        np.testing.assert_allclose(r, np.diag([1, x, -x, x]), atol=1e-15)

    def test_round_trip_random(self, rng):
        for _ in range(1000):
            rho = random_channel(rng)
            r = states.correlation_from_channel(rho)
            back = states.channel_from_correlation(r)
            assert np.max(np.abs(back.rho - rho.rho)) < 1e-9
            direct = np.real(
                [[np.trace(rho.rho @ np.kron(p, q)) for q in states.PAULIS] for p in states.PAULIS]
            )
            assert np.max(np.abs(r.r - direct)) < 1e-9

    def test_non_psd_channel_rejected(self):
        with pytest.raises(UnphysicalStateError) as info:
            states.CorrelationMatrix(np.diag([1, 1, 1, 1]))
        assert info.value.min_eigenvalue == pytest.approx(-0.5)

    def test_entries_out_of_range(self):
        r = np.eye(4)
        r[1, 1] = 1.5
        with pytest.raises(UnphysicalStateError):
            states.CorrelationMatrix(r)


class TestWerner:
    def test_zero_is_maximally_mixed(self):
        np.testing.assert_allclose(states.werner(0).rho, np.eye(4) / 4)

    def test_one_is_pure(self):
        assert states.werner(1).purity() == pytest.approx(1.0, abs=1e-14)

    def test_spectrum(self):
        lam = np.linalg.eigvalsh(states.werner(0.5).rho)
        np.testing.assert_allclose(lam, [0.125] * 3 + [0.625], atol=1e-15)

    def test_marginals_on_grid(self):
        for x in np.linspace(0, 1, 101):
            rho = states.werner(x).rho
            for keep in (0, 1):
                assert np.max(np.abs(linalg.partial_trace(rho, keep) - np.eye(2) / 2)) < 1e-12

    @pytest.mark.parametrize("x", [-0.01, 1.01])
    def test_out_of_range(self, x):
        with pytest.raises(ValueError):
            states.werner(x)


class TestSecurityForm:
    @pytest.mark.parametrize("x", np.linspace(0, 1, 11))
    def test_werner(self, x):
        assert states.is_security_form(states.werner(x))

    def test_biased_product(self):
        rho = states.product_state(states.qubit_from_bloch(0, 0, 1), np.eye(2) / 2)
        assert not states.is_security_form(rho)

    def test_projected_random(self, rng):
        made = 0
        for _ in range(50):
            try:
                rho = states.to_security_form(random_channel(rng))
            except UnphysicalStateError:
                continue
            made += 1
            assert states.is_security_form(rho)
        assert made > 10


class TestPseudoMixture:
    def test_product_single_term(self, rng):
        for _ in range(50):
            rho = states.product_state(random_qubit(rng), random_qubit(rng))
            pm = states.pseudo_mixture(rho)
            assert len(pm) == 1 and len(pm.terms) == 1
            assert pm.terms[0].p == pytest.approx(1.0, abs=1e-12)
            assert pm.terms[0].physical_a and pm.terms[0].physical_b

    def test_werner_half(self):
        pm = states.pseudo_mixture(states.werner(0.5))
        assert len(pm) == 4
        assert np.sum(pm.weights) == pytest.approx(1.0, abs=1e-9)
        assert np.max(np.abs(pm.rebuild() - states.werner(0.5).rho)) < 1e-10
        # the three x-valued singular directions have no identity component
        assert len(pm.raw_terms) == 3

    def test_werner_half_strict(self):
        with pytest.raises(NormalizationError):
            states.pseudo_mixture(states.werner(0.5), strict=True)

    def test_bell_state_degenerate_rotation(self):
        b = states.bell_vector(0, 0)
        rho = np.outer(b, b.conj())
        pm = states.pseudo_mixture(rho, strict=True)
        assert len(pm.terms) == 4
        assert np.sum(pm.weights) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(pm.rebuild() - rho)) < 1e-10
        # the factors of an entangled state cannot all be physical
        assert not all(t.physical_a and t.physical_b for t in pm.terms)

    def test_negative_weights_occur(self, rng):
        found = False
        for _ in range(200):
            pm = states.pseudo_mixture(random_channel(rng))
            if np.any(pm.weights < -1e-6):
                found = True
                break
        assert found

    def test_random_rebuild_and_weights(self, rng):
        for _ in range(300):
            rho = random_channel(rng)
            pm = states.pseudo_mixture(rho)
            assert np.max(np.abs(pm.rebuild() - rho.rho)) < 1e-10
            if not pm.raw_terms:
                assert np.sum(pm.weights) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("rank", [1, 2, 3])
    def test_truncation(self, rng, rank):
        rho = classical_mixture(rng, rank)
        pm = states.pseudo_mixture(rho)
        assert len(pm) == rank
        assert np.max(np.abs(pm.rebuild() - rho.rho)) < 1e-10


class TestJson:
    @pytest.mark.parametrize(
        "obj",
        [
            {"kind": "pauli", "c": [1, 0.1, 0.2, 0.3]},
            {"kind": "werner", "x": 0.25},
            {"kind": "correlation", "r": np.diag([1, 0.3, -0.3, 0.3]).tolist()},
            {"kind": "dense", "re": (np.eye(4) / 4).tolist(), "im": np.zeros((4, 4)).tolist()},
        ],
    )
    def test_round_trip(self, obj):
        st = states.loads_state(json.dumps(obj))
        again = states.state_from_dict(json.loads(json.dumps(states.state_to_dict(st, "dense"))))
        assert np.max(np.abs(again.rho - st.rho)) < 1e-15
        again = states.state_from_dict(states.state_to_dict(st))
        assert np.max(np.abs(again.rho - st.rho)) < 1e-12

    def test_random_pure_dense_round_trip(self, rng):
        st = haar_pure_state(rng, 2)
        back = states.loads_state(json.dumps(states.state_to_dict(st, "dense")))
        assert np.array_equal(back.rho, st.rho)

    def test_bad_json_reports_line(self):
        with pytest.raises(StateFormatError) as info:
            states.loads_state('{\n"kind": "werner",\n x}')
        assert info.value.line == 3

    @pytest.mark.parametrize(
        "obj, field",
        [
            ({"kind": "pauli"}, "c"),
            ({"kind": "pauli", "c": [1, 0, 0]}, "c"),
            ({"kind": "correlation", "r": [[1, 0], [0, 1]]}, "r"),
            ({"kind": "werner", "x": "a"}, "x"),
            ({"kind": "mystery"}, "kind"),
            ({"c": [1, 0, 0, 0]}, "kind"),
        ],
    )
    def test_structural_errors(self, obj, field):
        with pytest.raises(StateFormatError) as info:
            states.state_from_dict(obj)
        assert info.value.field == field

    @pytest.mark.parametrize(
        "obj",
        [
            {"kind": "pauli", "c": [1, 1, 1, 0]},
            {"kind": "werner", "x": 2},
            {"kind": "correlation", "r": np.eye(4).tolist()},
            {"kind": "dense", "re": np.diag([2.0, -1.0]).tolist()},
        ],
    )
    def test_physics_errors(self, obj):
        with pytest.raises(UnphysicalStateError):
            states.state_from_dict(obj)
