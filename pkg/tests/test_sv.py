import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groverlab import sv
from groverlab.analytic import make_model, success_prob
from groverlab.errors import DimensionError, NormDriftError, ParameterError, SizeLimitError

# chi-square 0.999 quantile at 3 degrees of freedom (scipy.stats.chi2.ppf(0.999, 3))
CHI2_3_999 = 16.266236196238129


def random_state(m, rng):
    v = rng.standard_normal(1 << m) + 1j * rng.standard_normal(1 << m)
    return sv.from_amplitudes(v, normalize=True)


def plane_states(oracle):
    """|A> and |B> as explicit vectors."""
    mask = oracle.mask
    A = mask / math.sqrt(mask.sum())
    B = (~mask) / math.sqrt((~mask).sum())
    return sv.StateVector(A.astype(complex)), sv.StateVector(B.astype(complex))


class TestUniformState:
    @pytest.mark.parametrize("n,value", [(1, 1 / math.sqrt(2)), (2, 0.5), (3, 1 / (2 * math.sqrt(2)))])
    def test_values(self, n, value):
        np.testing.assert_allclose(sv.uniform_state(n).amps, value, atol=1e-15)

    @pytest.mark.parametrize("n", [0, 25])
    def test_limits(self, n):
        with pytest.raises(SizeLimitError):
            sv.uniform_state(n)


class TestPhaseOracle:
    def test_marks_last(self):
        o = sv.OracleSpec(2, {3})
        out = sv.apply_phase_oracle(sv.uniform_state(2), o)
        np.testing.assert_allclose(out.amps, [0.5, 0.5, 0.5, -0.5])
        assert o.queries == 1

    def test_empty_is_identity(self, rng):
        s = random_state(3, rng)
        np.testing.assert_array_equal(sv.apply_phase_oracle(s, sv.OracleSpec(3)).amps, s.amps)

    def test_all_marked_flips_sign(self):
        out = sv.apply_phase_oracle(sv.uniform_state(2), sv.OracleSpec(2, range(4)))
        np.testing.assert_allclose(out.amps, -0.5)

    def test_acts_on_low_qubits(self):
        # 3-qubit state, oracle on 2 low qubits marks x=1: indices 1 and 5
        out = sv.apply_phase_oracle(sv.uniform_state(3), sv.OracleSpec(2, {1}))
        signs = np.sign(out.amps.real)
        assert list(np.flatnonzero(signs < 0)) == [1, 5]

    def test_does_not_mutate_input(self):
        s = sv.uniform_state(2)
        sv.apply_phase_oracle(s, sv.OracleSpec(2, {0}))
        np.testing.assert_allclose(s.amps, 0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            sv.apply_phase_oracle(sv.uniform_state(2), sv.OracleSpec(3, {0}))

    def test_marked_range_checked(self):
        with pytest.raises(ParameterError):
            sv.OracleSpec(2, {4})

    def test_counter_monotone(self):
        o = sv.OracleSpec(2, {1})
        with pytest.raises(ParameterError):
            o.charge(-1)
        s = sv.uniform_state(2)
        for i in range(5):
            s = sv.apply_phase_oracle(s, o)
            assert o.queries == i + 1


class TestDiffusion:
    def test_inversion_about_mean(self):
        out = sv.apply_diffusion(sv.StateVector(np.array([0.5, 0.5, 0.5, -0.5])), 2)
        np.testing.assert_allclose(out.amps, [0, 0, 0, 1], atol=1e-15)

    @pytest.mark.parametrize("n", [1, 3, 6])
    def test_uniform_fixed_point(self, n):
        s = sv.uniform_state(n)
        np.testing.assert_allclose(sv.apply_diffusion(s, n).amps, s.amps, atol=1e-15)

    @pytest.mark.parametrize("x0", range(4))
    def test_one_hot(self, x0):
        # 2 * (1/4) - x_i
        expected = np.full(4, 0.5)
        expected[x0] = -0.5
        np.testing.assert_allclose(sv.apply_diffusion(sv.basis_state(2, x0), 2).amps, expected, atol=1e-15)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 3), st.integers(0, 2**32 - 1))
    def test_matches_hadamard_composition(self, n, extra, seed):
        """-H Z_0 H through the generic gate path equals inversion about the mean."""
        s = random_state(n + extra, np.random.default_rng(seed))
        generic = sv.hadamard_layer(sv.apply_zero_phase(sv.hadamard_layer(s, n), n), n)
        np.testing.assert_allclose(sv.apply_diffusion(s, n).amps, -generic.amps, atol=1e-9)

    def test_equals_reflection_matrix(self, rng):
        n = 4
        h = np.full(1 << n, 1 / 4)
        R = 2 * np.outer(h, h) - np.eye(1 << n)
        s = random_state(n, rng)
        np.testing.assert_allclose(sv.apply_diffusion(s, n).amps, R @ s.amps, atol=1e-12)


class TestGroverIteration:
    def test_n2_single_step(self):
        o = sv.OracleSpec(2, {3})
        out = sv.apply_grover_iteration(sv.uniform_state(2), o)
        np.testing.assert_allclose(out.amps, [0, 0, 0, 1], atol=1e-15)

    def test_unmarked_fixed(self):
        s = sv.uniform_state(4)
        out = sv.apply_grover_iteration(s, sv.OracleSpec(4))
        np.testing.assert_allclose(out.amps, s.amps, atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 9), st.data())
    def test_amplitude_formula(self, n, data):
        N = 1 << n
        marked = data.draw(st.sets(st.integers(0, N - 1), min_size=1, max_size=N - 1)) if N > 1 else {0}
        if len(marked) == N:
            return
        k = data.draw(st.integers(0, 40))
        o = sv.OracleSpec(n, marked)
        s = sv.uniform_state(n)
        for _ in range(k):
            s = sv.apply_grover_iteration(s, o)
        theta = make_model(n, len(marked)).theta_a
        a = len(marked)
        expected = np.where(o.mask, math.sin((2 * k + 1) * theta) / math.sqrt(a),
                            math.cos((2 * k + 1) * theta) / math.sqrt(N - a))
        np.testing.assert_allclose(s.amps, expected, atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 8), st.data())
    def test_plane_closure(self, n, data):
        """One iteration moves any in-plane state by exactly 2 theta, staying in the plane."""
        N = 1 << n
        marked = data.draw(st.sets(st.integers(0, N - 1), min_size=1, max_size=N - 1))
        phi = data.draw(st.floats(0, 2 * math.pi))
        o = sv.OracleSpec(n, marked)
        A, B = plane_states(o)
        s = sv.StateVector(math.sin(phi) * A.amps + math.cos(phi) * B.amps)
        out = sv.apply_grover_iteration(s, o)
        theta = make_model(n, len(marked)).theta_a
        ca = sv.inner_product(A, out)
        cb = sv.inner_product(B, out)
        assert abs(ca) ** 2 + abs(cb) ** 2 == pytest.approx(1.0, abs=1e-9)
        assert ca == pytest.approx(math.sin(phi + 2 * theta), abs=1e-9)
        assert cb == pytest.approx(math.cos(phi + 2 * theta), abs=1e-9)

    @pytest.mark.parametrize("n,a", [(3, 1), (5, 2), (8, 3), (10, 1)])
    def test_matches_closed_form(self, n, a):
        o = sv.OracleSpec(n, range(a))
        model = make_model(n, a)
        s = sv.uniform_state(n)
        for k in range(60):
            assert sv.project_marked_mass(s, o) == pytest.approx(success_prob(model, k), abs=1e-9)
            s = sv.apply_grover_iteration(s, o)


def dft_matrix(t):
    T = 1 << t
    j = np.arange(T)
    return np.exp(2j * np.pi * np.outer(j, j) / T) / math.sqrt(T)


class TestQFT:
    @pytest.mark.parametrize("t", range(1, 9))
    def test_against_matrix(self, t, rng):
        s = random_state(t, rng)
        F = dft_matrix(t)
        np.testing.assert_allclose(sv.qft(s, t).amps, F @ s.amps, atol=1e-9)
        np.testing.assert_allclose(sv.inverse_qft(s, t).amps, F.conj().T @ s.amps, atol=1e-9)
        np.testing.assert_allclose(F.conj().T @ F, np.eye(1 << t), atol=1e-9)

    def test_zero_to_uniform(self):
        out = sv.qft(sv.basis_state(5, 0), 5)
        np.testing.assert_allclose(out.amps, sv.uniform_state(5).amps, atol=1e-12)

    def test_roundtrip(self, rng):
        s = random_state(7, rng)
        back = sv.inverse_qft(sv.qft(s, 7), 7)
        assert sv.norm_diff(back, s) <= 1e-9

    def test_one_qubit_is_hadamard(self, rng):
        s = random_state(1, rng)
        np.testing.assert_allclose(sv.qft(s, 1).amps, sv.hadamard_matrix(1) @ s.amps, atol=1e-12)

    def test_sub_register(self, rng):
        """QFT on qubits 2..4 of a 6-qubit state = I (x) F (x) I."""
        s = random_state(6, rng)
        full = np.kron(np.kron(np.eye(2), dft_matrix(3)), np.eye(4))
        np.testing.assert_allclose(sv.qft(s, 3, offset=2).amps, full @ s.amps, atol=1e-9)

    def test_range_checked(self):
        with pytest.raises(DimensionError):
            sv.qft(sv.uniform_state(3), 3, offset=1)


class TestControlledPower:
    def _setup(self):
        # target: 2 qubits with G = Grover iteration for marked {3}; control qubit 2
        o = sv.OracleSpec(2, {1})
        op = lambda arr: sv.diffuse_blocks(o.phase(arr), 2)  # noqa: E731
        return o, op

    def test_control_zero_unchanged(self, rng):
        _, op = self._setup()
        target = random_state(2, rng).amps
        state = sv.StateVector(np.kron([1, 0], target))
        out = sv.controlled_power(op, 2, state, control=2, n=2)
        np.testing.assert_allclose(out.amps, state.amps, atol=1e-15)

    @pytest.mark.parametrize("j", [0, 1, 2])
    def test_eigenvector_phase(self, j):
        o, op = self._setup()
        theta = math.pi / 6
        A = o.mask.astype(complex)
        B = (~o.mask) / math.sqrt(3)
        plus = (A + 1j * B) / math.sqrt(2)
        state = sv.StateVector(np.kron([0, 1], plus))
        out = sv.controlled_power(op, j, state, control=2, n=2)
        phase = np.exp(2j * theta * (1 << j))
        np.testing.assert_allclose(out.amps, phase * state.amps, atol=1e-12)

    def test_counts_applications(self):
        o, op = self._setup()
        state = sv.StateVector(np.kron([1, 1], sv.uniform_state(2).amps) / math.sqrt(2))
        sv.controlled_power(op, 3, state, control=2, n=2)
        assert o.queries == 8

    def test_control_range(self):
        _, op = self._setup()
        with pytest.raises(DimensionError):
            sv.controlled_power(op, 0, sv.uniform_state(3), control=1, n=2)


class TestMeasure:
    def test_one_hot(self, rng):
        s = sv.basis_state(4, 11)
        assert all(sv.measure(s, rng) == 11 for _ in range(50))

    def test_uniform_chi_square(self):
        rng = np.random.default_rng(2024)
        s = sv.uniform_state(2)
        draws = np.array([sv.measure(s, rng) for _ in range(10_000)])
        counts = np.bincount(draws, minlength=4)
        chi2 = float(((counts - 2500) ** 2 / 2500).sum())
        assert chi2 < CHI2_3_999

    def test_chi_square_constant(self):
        stats = pytest.importorskip("scipy.stats")
        assert stats.chi2.ppf(0.999, 3) == pytest.approx(CHI2_3_999, rel=1e-12)

    def test_grover_state_frequency(self):
        o = sv.OracleSpec(10, {77})
        s = sv.uniform_state(10)
        for _ in range(25):
            s = sv.apply_grover_iteration(s, o)
        p = success_prob(make_model(10, 1), 25)
        rng = np.random.default_rng(99)
        hits = sum(sv.measure(s, rng) == 77 for _ in range(10_000))
        se = math.sqrt(p * (1 - p) / 10_000)
        assert abs(hits / 10_000 - p) <= 3 * se + 1e-4

    def test_deterministic_given_seed(self):
        s = sv.uniform_state(6)
        a = [sv.measure(s, np.random.default_rng(5)) for _ in range(3)]
        assert len(set(a)) == 1

    def test_norm_drift(self, rng):
        with pytest.raises(NormDriftError):
            sv.measure(sv.StateVector(np.array([1.0, 0.01])), rng)


class TestMetrics:
    def test_self(self, rng):
        s = random_state(4, rng)
        assert sv.inner_product(s, s) == pytest.approx(1.0)
        assert sv.norm_diff(s, s) == 0.0

    def test_orthogonal(self):
        assert sv.norm_diff(sv.basis_state(3, 1), sv.basis_state(3, 6)) == pytest.approx(math.sqrt(2))

    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_single_flip_distance(self, n):
        h = sv.uniform_state(n)
        zr = sv.apply_phase_oracle(h, sv.OracleSpec(n, {1}))
        assert sv.norm_diff(zr, h) == pytest.approx(2 / math.sqrt(1 << n), abs=1e-12)

    def test_conjugate_linear(self):
        x = sv.StateVector(np.array([1j, 0]))
        y = sv.StateVector(np.array([1, 0]))
        assert sv.inner_product(x, y) == pytest.approx(-1j)

    def test_marked_mass(self):
        assert sv.project_marked_mass(sv.uniform_state(3), sv.OracleSpec(3, {0, 5})) == pytest.approx(0.25)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            sv.norm_diff(sv.uniform_state(2), sv.uniform_state(3))


class TestBitflipOracle:
    @pytest.mark.parametrize("marked", [{0}, {2, 5}, set(range(8))])
    def test_phase_kickback(self, marked, rng):
        """O_f on |x>|-> equals Z_f |x> (x) |->."""
        n = 3
        o = sv.OracleSpec(n, marked)
        x = random_state(n, rng)
        minus = np.array([1, -1]) / math.sqrt(2)
        joint = sv.StateVector(np.kron(minus, x.amps))
        out = sv.apply_bitflip_oracle(joint, o, target=n)
        expected = np.kron(minus, sv.apply_phase_oracle(x, sv.OracleSpec(n, marked)).amps)
        np.testing.assert_allclose(out.amps, expected, atol=1e-12)

    def test_flips_target(self):
        o = sv.OracleSpec(2, {2})
        out = sv.apply_bitflip_oracle(sv.basis_state(3, 2), o, target=2)
        assert np.argmax(np.abs(out.amps)) == 6
        out = sv.apply_bitflip_oracle(sv.basis_state(3, 1), o, target=2)
        assert np.argmax(np.abs(out.amps)) == 1

    def test_target_inside_input_rejected(self):
        with pytest.raises(DimensionError):
            sv.apply_bitflip_oracle(sv.uniform_state(3), sv.OracleSpec(2, {1}), target=1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_norm_preserved(n, seed):
    rng = np.random.default_rng(seed)
    s = random_state(n, rng)
    o = sv.OracleSpec(n, rng.choice(1 << n, size=max(1, (1 << n) // 3), replace=False))
    ops = [
        lambda x: sv.apply_phase_oracle(x, o),
        lambda x: sv.apply_diffusion(x, n),
        lambda x: sv.apply_grover_iteration(x, o),
        lambda x: sv.hadamard_layer(x, n),
        lambda x: sv.apply_zero_phase(x, n),
        lambda x: sv.qft(x, n),
        lambda x: sv.inverse_qft(x, n),
    ]
    for op in ops:
        s = op(s)
        assert s.norm() == pytest.approx(1.0, abs=1e-9)


def test_dump_roundtrip(rng):
    s = random_state(3, rng)
    text = sv.dump_state(s)
    assert text.startswith("[[")
    back = sv.load_state(text)
    np.testing.assert_array_equal(back.amps, s.amps)


def test_state_length_checked():
    with pytest.raises(DimensionError):
        sv.StateVector(np.ones(3))
