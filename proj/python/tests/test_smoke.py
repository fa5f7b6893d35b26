import json

import numpy as np
import pytest

import dyadic


def test_round_trip_and_parseval():
    rng = np.random.default_rng(0)
    sig = rng.standard_normal((8, 4))
    coeffs = dyadic.haar_forward(sig)
    assert coeffs.shape == sig.shape
    np.testing.assert_allclose(dyadic.haar_inverse(coeffs), sig, atol=1e-12)
    assert np.sum(coeffs**2) == pytest.approx(np.mean(sig**2), rel=1e-12)


def test_constant_signal_has_one_coefficient():
    coeffs = dyadic.haar_forward(np.full((4, 4), 3.0))
    assert coeffs[0, 0] == pytest.approx(3.0)
    assert np.count_nonzero(np.abs(coeffs) > 1e-14) == 1


def test_norms_of_zero():
    z = np.zeros((4, 4))
    assert dyadic.bmo_norm(z) == 0.0
    assert dyadic.product_bmo_norm(z) == 0.0
    assert dyadic.lmo_norm(z) == 0.0


def test_single_coefficient_product_bmo():
    c = np.zeros((4, 4))
    c[1, 1] = 2.0  # h_{T x T}
    assert dyadic.product_bmo_norm(c) == pytest.approx(4.0)


def test_paraproduct_against_constant():
    rng = np.random.default_rng(1)
    phi = rng.standard_normal((4, 4))
    phi[0, :] = 0.0
    phi[:, 0] = 0.0
    one = np.zeros((4, 4))
    one[0, 0] = 1.0
    np.testing.assert_allclose(dyadic.pi_main(phi, one), phi, atol=1e-12)
    assert dyadic.paraproduct_opnorm(phi) >= np.linalg.norm(phi) - 1e-12


def test_commutator_of_constant_symbol_vanishes():
    rng = np.random.default_rng(2)
    phi = np.zeros((4, 4))
    phi[0, 0] = 1.5
    out, _ = dyadic.iterated_commutator(phi, rng.standard_normal((4, 4)), [0, 1])
    assert np.max(np.abs(out)) < 1e-12


def test_experiment_is_deterministic():
    cfg = json.dumps({"experiment": "equivalence", "depths": [2], "ensemble": 3, "budget": 5, "seed": 4})
    a = dyadic.run_experiment(cfg)
    b = dyadic.run_experiment(cfg)
    assert a == b
    lines = a[0].splitlines()
    assert lines[0].startswith("config_hash,seed,")
    assert len(lines) == 4
    assert all(line.startswith(dyadic.config_hash(cfg) + ",4,") for line in lines[1:])


def test_bad_config():
    with pytest.raises(ValueError, match="budget"):
        dyadic.run_experiment(json.dumps({"budget": -1}))
    with pytest.raises(ValueError, match="line 2"):
        dyadic.run_experiment('{\n "seed": }')
