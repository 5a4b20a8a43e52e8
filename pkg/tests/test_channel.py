import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qchan import channel as C
from qchan import linalg as L
from qchan.errors import ChannelFormatError, CptpError, ValidationError

from conftest import rng_of, seeds


def test_depolarizing_is_cptp():
    for p in (0.0, 0.25, 0.5, 1.0):
        ok, defect = C.validate_cptp(C.depolarizing(2, p))
        assert ok and defect < 1e-10


def test_fully_depolarizing_output(rng):
    rho = L.random_density(2, rng)
    assert np.allclose(C.apply(C.depolarizing(2, 1.0), rho), np.eye(2) / 2)


def test_choi_of_identity_is_phi():
    phi = L.pure_state(L.maximally_entangled(2))
    assert np.allclose(C.choi(C.identity(2)), phi)
    assert np.allclose(C.choi(C.depolarizing(2, 1.0)), np.eye(4) / 4)


def test_ancilla_is_left_factor(rng):
    X = C.unitary(C.PAULI["X"])
    rho = L.random_density(4, rng)
    expected = np.kron(np.eye(2), C.PAULI["X"]) @ rho @ np.kron(np.eye(2), C.PAULI["X"])
    assert np.allclose(C.apply_extended(X, rho), expected)


@given(seeds, st.integers(1, 3), st.integers(1, 4))
def test_random_channels_preserve_states(seed, d, m):
    rng = rng_of(seed)
    ch = C.random_channel(d, m, rng)
    assert C.cptp_defect(ch) < 1e-10
    psi = L.random_pure(d * d, rng)
    out = C.apply_extended(ch, L.pure_state(psi))
    assert np.allclose(out, C.apply_extended_pure(ch, psi))
    lam = np.linalg.eigvalsh(out)
    assert lam.min() > -1e-12 and np.isclose(lam.sum(), 1)


@given(seeds)
def test_serialization_round_trip(seed):
    ch = C.random_channel(2, 3, rng_of(seed))
    back = C.parse_channel(C.serialize_channel(ch))
    assert back == ch


def test_parse_rejects_non_square_location():
    doc = {"dim_in": 2, "dim_out": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0]]]]}
    with pytest.raises(ChannelFormatError) as err:
        C.parse_channel(json.dumps(doc))
    assert err.value.location == "kraus[0], row 1"


def test_parse_rejects_bad_json_and_fields():
    with pytest.raises(ChannelFormatError):
        C.parse_channel("{")
    with pytest.raises(ChannelFormatError):
        C.parse_channel(json.dumps({"dim_in": 2, "kraus": []}))
    with pytest.raises(ChannelFormatError):
        C.parse_channel(json.dumps({"dim_in": 2, "dim_out": 2, "kraus": [[[["a", 0], [0, 0]], [[0, 0], [1, 0]]]]}))


def test_cptp_violation_and_force():
    doc = json.dumps({"dim_in": 2, "dim_out": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [0.5, 0]]]]})
    with pytest.raises(CptpError) as err:
        C.parse_channel(doc)
    assert np.isclose(err.value.defect, 0.75)
    ch = C.parse_channel(doc, force=True)
    assert np.isclose(ch.defect, 0.75)


def test_presets():
    assert C.from_preset("identity:3").dim_in == 3
    assert len(C.from_preset("depolarizing:2:0.5")) == 4
    assert C.from_preset("depolarizing:0.5") == C.depolarizing(2, 0.5)
    assert len(C.from_preset("amplitude-damping:0.3")) == 2
    assert C.from_preset("unitary:X") == C.unitary(C.PAULI["X"], "unitary:X")
    for bad in ("bogus:1", "depolarizing:2:x", "amplitude-damping"):
        with pytest.raises(ChannelFormatError):
            C.from_preset(bad)
    with pytest.raises(ValidationError):
        C.from_preset("depolarizing:2:1.5")


def test_require_pair_dimension_mismatch():
    with pytest.raises(ValidationError):
        C.require_pair(C.identity(2), C.identity(3))


def test_weyl_depolarizing_d3(rng):
    ch = C.depolarizing(3, 1.0)
    assert C.cptp_defect(ch) < 1e-10
    assert np.allclose(C.apply(ch, L.random_density(3, rng)), np.eye(3) / 3)


def test_state_documents(tmp_path, rng):
    rho = L.random_density(3, rng)
    assert np.allclose(C.parse_state(C.serialize_state(rho)), rho)
    vec = json.dumps({"vector": [[1, 0], [0, 1]]})
    assert np.allclose(C.parse_state(vec), L.pure_state([1, 1j]))
