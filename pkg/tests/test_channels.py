"""Kraus channels: construction guards, named noise models, twirling."""

import math

import numpy as np
import pytest

from conftest import rand_density, rand_state, rand_unitary
from qecdesk.channels import (
    KrausChannel,
    MAX_KRAUS_OPS,
    PauliChannel,
    bit_flip,
    channel_from_unitary,
    clifford_twirl,
    collective_rotation,
    collective_spin,
    cyclic_shift,
    depolarizing,
    gaussian_shift,
    gaussian_shift_probabilities,
    identity_channel,
    parse_channel_spec,
    remix_labels,
    rotation_group,
    tensor_channels,
    tensor_independent,
    twirl,
)
from qecdesk.hilbert import DensityOperator, LinearOperator, StateVector, basis_state

SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def rand_channel(rng, d, env=3):
    """Random channel by tracing a random environment out of a random unitary."""
    u = LinearOperator((env, d), (env, d), rand_unitary(rng, env * d))
    init = StateVector((env,), np.eye(env)[0].astype(complex))
    basis = [StateVector((env,), np.eye(env)[i].astype(complex)) for i in range(env)]
    return channel_from_unitary(u, init, basis)


def test_channel_rejects_incomplete_operator_sum():
    with pytest.raises(ValueError):
        KrausChannel((2,), (("0", 0.5 * np.eye(2)),))
    with pytest.raises(ValueError):
        KrausChannel((2,), (("0", np.eye(2)), ("1", 0.1 * SIGMA["X"])))


def test_channel_rejects_duplicate_labels_and_bad_shapes():
    a = math.sqrt(0.5) * np.eye(2)
    with pytest.raises(ValueError):
        KrausChannel((2,), (("0", a), ("0", a)))
    with pytest.raises(ValueError):
        KrausChannel((2,), (("0", np.eye(3)),))
    with pytest.raises(ValueError):
        KrausChannel((2,), (("0", np.eye(2)),), bad_labels=frozenset({"zz"}))


def test_channel_operator_lookup():
    ch = bit_flip(0.25)
    assert ch.labels() == ["0", "x"]
    assert np.allclose(ch.operator("x"), 0.5 * SIGMA["X"])
    with pytest.raises(KeyError):
        ch.operator("q")


def test_apply_preserves_trace_and_positivity():
    rng = np.random.default_rng(10)
    for _ in range(25):
        d = int(rng.integers(2, 5))
        ch = rand_channel(rng, d)
        rho = DensityOperator((d,), rand_density(rng, d))
        out = ch.apply(rho)
        assert abs(np.trace(out.matrix) - 1.0) < 1e-10
        out.check_positive()


def test_depolarizing_action_formula():
    rng = np.random.default_rng(11)
    for p in (0.0, 0.1, 0.5, 1.0):
        ch = depolarizing(p)
        rho = rand_density(rng, 2)
        kick = sum(SIGMA[u] @ rho @ SIGMA[u] for u in "XYZ")
        want = (1 - 3 * p / 4) * rho + (p / 4) * kick
        assert np.allclose(ch.apply_matrix(rho), want, atol=1e-12)


def test_depolarizing_half_on_ground_state():
    out = depolarizing(0.5).apply(basis_state((2,), 0).density())
    assert np.allclose(out.matrix, np.diag([0.75, 0.25]), atol=1e-12)


def test_depolarizing_labels_and_guards():
    assert depolarizing(0.3).labels() == ["0", "1", "x", "y", "z"]
    with pytest.raises(ValueError):
        depolarizing(1.5)
    with pytest.raises(ValueError):
        bit_flip(-0.1)


def test_cyclic_shift_matrix():
    s = cyclic_shift(7, 2)
    v = np.zeros(7)
    v[6] = 1.0
    assert np.allclose(s @ v, np.eye(7)[1])  # 6+2 wraps to 1
    assert np.allclose(s.conj().T @ s, np.eye(7))


def test_gaussian_shift_probabilities_against_direct_sum():
    # independent oracle: renormalized e^(-k^2) weights
    K = 20
    z = math.fsum(math.exp(-k * k) for k in range(-K, K + 1))
    probs = gaussian_shift_probabilities(K)
    assert abs(math.fsum(probs.values()) - 1.0) < 1e-14
    for k in range(-K, K + 1):
        assert probs[k] == pytest.approx(math.exp(-k * k) / z, abs=1e-15)
        assert probs[k] == probs[-k]
    # reported four-digit values
    assert abs(probs[0] - 0.5641) < 1e-4
    assert abs(probs[1] - 0.2075) < 1e-4
    assert abs(probs[2] - 0.0103) < 1e-4
    # and the frozen ten-digit ones
    assert probs[0] == pytest.approx(0.5641312262, abs=1e-10)
    assert probs[1] == pytest.approx(0.2075322802, abs=1e-10)
    assert probs[2] == pytest.approx(0.0103324238, abs=1e-10)


def test_gaussian_shift_channel_matches_probabilities():
    ch = gaussian_shift(7, 20)
    probs = gaussian_shift_probabilities(20)
    assert len(ch.ops) == 41
    for k in (-2, -1, 0, 1, 2):
        a = ch.operator(str(k))
        assert np.allclose(a, math.sqrt(probs[k]) * cyclic_shift(7, k), atol=1e-15)
    # truncation point barely matters: K=5 already reproduces the four digits
    short = gaussian_shift_probabilities(5)
    assert abs(short[0] - 0.5641) < 1e-4


def test_collective_spin_eigenvalues():
    jz = collective_spin("Z", 3)
    w = np.linalg.eigvalsh(jz.matrix)
    assert np.allclose(sorted(w), [-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5])


def test_collective_rotation_is_unitary_and_symmetric():
    rng = np.random.default_rng(12)
    for _ in range(5):
        v = tuple(rng.normal(size=3))
        (label, u), = collective_rotation(v).ops
        assert label == "rot"
        assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-10)
        # commutes with the total-spin operators' Casimir
        j2 = sum(collective_spin(a).matrix @ collective_spin(a).matrix for a in "XYZ")
        assert np.allclose(u @ j2, j2 @ u, atol=1e-9)


def test_channel_from_unitary_completeness():
    rng = np.random.default_rng(13)
    ch = rand_channel(rng, 4, env=4)
    total = sum(a.conj().T @ a for _, a in ch.ops)
    assert np.allclose(total, np.eye(4), atol=1e-10)
    assert ch.labels() == ["0", "1", "2", "3"]


def test_channel_from_unitary_cnot_dephases():
    # copying the system bit into the environment kills the off-diagonals
    cnot = np.eye(4)[[0, 1, 3, 2]]  # control = system (second factor)
    u = LinearOperator((2, 2), (2, 2), cnot[[0, 2, 1, 3]][:, [0, 2, 1, 3]])
    init = basis_state((2,), 0)
    basis = [basis_state((2,), i) for i in range(2)]
    ch = channel_from_unitary(u, init, basis)
    plus = 0.5 * np.ones((2, 2))
    assert np.allclose(ch.apply_matrix(plus), np.diag([0.5, 0.5]), atol=1e-12)


def test_tensor_channels_labels_and_action():
    rep = tensor_independent(bit_flip(0.5), 3)
    assert len(rep.ops) == 8
    assert set(rep.labels()) == {
        "000", "00x", "0x0", "0xx", "x00", "x0x", "xx0", "xxx"
    }
    a = rep.operator("x0x")
    assert np.allclose(a, (0.5 ** 1.5) * np.kron(np.kron(SIGMA["X"], SIGMA["I"]), SIGMA["X"]))


def test_tensor_channels_multichar_labels_use_commas():
    two = tensor_channels(gaussian_shift(3, 2), bit_flip(0.5))
    assert "0,x" in two.labels()
    assert "-1,0" in two.labels()


def test_tensor_bad_labels_propagate():
    marked = KrausChannel((2,), bit_flip(0.5).ops, bad_labels=frozenset({"x"}))
    pair = tensor_channels(marked, bit_flip(0.5))
    assert pair.bad_labels == {"x0", "xx"}


def test_tensor_independent_operator_cap():
    with pytest.raises(ValueError):
        tensor_independent(depolarizing(0.5), 6)  # 5^6 > 4096
    assert len(tensor_independent(depolarizing(0.5), 5).ops) == 5 ** 5 <= MAX_KRAUS_OPS


def test_remix_labels_is_invisible():
    rng = np.random.default_rng(14)
    ch = depolarizing(0.3)
    u = rand_unitary(rng, len(ch.ops))
    mixed = remix_labels(ch, u)
    assert mixed.labels() == [f"m{i}" for i in range(5)]
    rho = rand_density(rng, 2)
    assert np.allclose(mixed.apply_matrix(rho), ch.apply_matrix(rho), atol=1e-10)
    with pytest.raises(ValueError):
        remix_labels(ch, np.eye(4))


def test_pauli_channel_guards():
    with pytest.raises(ValueError):
        PauliChannel(1, {"I": 0.5, "X": 0.2})
    with pytest.raises(ValueError):
        PauliChannel(1, {"I": 1.5, "X": -0.5})
    ch = PauliChannel(2, {"II": 0.9, "XZ": 0.1})
    assert ch.probability("XZ") == pytest.approx(0.1)
    assert ch.probability("-XZ") == pytest.approx(0.1)  # phases are dropped
    assert ch.probability("ZZ") == 0.0


def test_pauli_channel_round_trip_through_kraus():
    ch = PauliChannel(1, {"I": 0.7, "X": 0.1, "Y": 0.05, "Z": 0.15})
    back = twirl(ch.as_kraus())
    for u in "IXYZ":
        assert back.probability(u) == pytest.approx(ch.probability(u), abs=1e-12)


def test_twirl_fixes_depolarizing():
    for p in (0.0, 0.12, 0.5, 1.0):
        t = twirl(depolarizing(p))
        assert t.probability("I") == pytest.approx(1 - 3 * p / 4, abs=1e-12)
        for u in "XYZ":
            assert t.probability(u) == pytest.approx(p / 4, abs=1e-12)


def test_twirl_of_z_rotation():
    theta = 0.9
    u = np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])
    ch = KrausChannel((2,), (("rot", u),))
    t = twirl(ch)
    assert t.probability("I") == pytest.approx(math.cos(theta / 2) ** 2, abs=1e-12)
    assert t.probability("Z") == pytest.approx(math.sin(theta / 2) ** 2, abs=1e-12)
    assert t.probability("X") == pytest.approx(0.0, abs=1e-12)
    assert t.probability("Y") == pytest.approx(0.0, abs=1e-12)


def test_twirl_of_reset_channel_is_uniform():
    # reset-to-|0>: operators |0><0| and |0><1|
    ops = (
        ("keep", np.array([[1, 0], [0, 0]], dtype=complex)),
        ("drop", np.array([[0, 1], [0, 0]], dtype=complex)),
    )
    t = twirl(KrausChannel((2,), ops))
    for u in "IXYZ":
        assert t.probability(u) == pytest.approx(0.25, abs=1e-12)


def test_twirl_matches_conjugation_average_oracle():
    """The Pauli shadow equals the average of conjugations by I/X/Y/Z.

    sum_w (1/4) sigma_w ch(sigma_w rho sigma_w) sigma_w applied to a basis of
    matrices must reproduce the twirled channel's action exactly.
    """
    rng = np.random.default_rng(15)
    for _ in range(5):
        ch = rand_channel(rng, 2)
        t = twirl(ch).as_kraus()
        for m in (SIGMA["I"] / 2, SIGMA["X"], SIGMA["Y"], SIGMA["Z"],
                  rand_density(rng, 2)):
            avg = sum(
                SIGMA[w] @ ch.apply_matrix(SIGMA[w] @ m @ SIGMA[w]) @ SIGMA[w]
                for w in "IXYZ"
            ) / 4.0
            assert np.allclose(t.apply_matrix(m), avg, atol=1e-10)


def test_twirl_probabilities_sum_to_one_on_random_channels():
    rng = np.random.default_rng(16)
    for _ in range(40):
        t = twirl(rand_channel(rng, 2, env=int(rng.integers(2, 5))))
        assert math.fsum(t.probs.values()) == pytest.approx(1.0, abs=1e-10)


def test_twirl_is_invariant_under_label_remix():
    rng = np.random.default_rng(17)
    ch = rand_channel(rng, 2)
    u = rand_unitary(rng, len(ch.ops))
    t1 = twirl(ch)
    t2 = twirl(remix_labels(ch, u))
    for w in "IXYZ":
        assert t1.probability(w) == pytest.approx(t2.probability(w), abs=1e-10)


def test_rotation_group_has_24_unitaries():
    group = rotation_group()
    assert len(group) == 24
    for m in group:
        assert np.allclose(m.conj().T @ m, np.eye(2), atol=1e-10)


def test_clifford_twirl_gives_depolarizing():
    pch = PauliChannel(1, {"I": 0.8, "X": 0.15, "Y": 0.03, "Z": 0.02})
    out = clifford_twirl(pch)
    s = 0.2
    want = depolarizing(4 * s / 3)
    rng = np.random.default_rng(18)
    rho = rand_density(rng, 2)
    assert np.allclose(out.apply_matrix(rho), want.apply_matrix(rho), atol=1e-10)
    t = twirl(out)
    for u in "XYZ":
        assert t.probability(u) == pytest.approx(s / 3, abs=1e-12)


def test_clifford_twirl_heavy_noise_falls_back_to_kicks():
    pch = PauliChannel(1, {"I": 0.1, "X": 0.9})
    out = clifford_twirl(pch)
    t = twirl(out)
    for u in "XYZ":
        assert t.probability(u) == pytest.approx(0.3, abs=1e-12)
    assert t.probability("I") == pytest.approx(0.1, abs=1e-12)


def test_identity_channel_is_identity():
    ch = identity_channel((2, 2))
    rng = np.random.default_rng(19)
    rho = rand_density(rng, 4)
    assert np.allclose(ch.apply_matrix(rho), rho)


def test_parse_channel_spec_forms():
    assert parse_channel_spec("depolarizing p=0.1").labels() == ["0", "1", "x", "y", "z"]
    assert parse_channel_spec("bitflip p=0.25").labels() == ["0", "x"]
    assert len(parse_channel_spec("gaussian7 K=3").ops) == 7
    assert parse_channel_spec("collective vx=0.1 vy=0.0 vz=0.2").dims == (2, 2, 2)
    rep = parse_channel_spec("independent n=3 bitflip p=0.5")
    assert rep.dims == (2, 2, 2)
    assert len(rep.ops) == 8
    for bad in ("", "wat p=1", "depolarizing", "depolarizing q=1",
                "independent bitflip p=0.5", "bitflip p=oops"):
        with pytest.raises((ValueError, KeyError)):
            parse_channel_spec(bad)
