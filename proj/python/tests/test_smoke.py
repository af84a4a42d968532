import json

import numpy as np
import pytest

import chacs


def instance(n=64, k=3, lam=2, seed=4):
    d = chacs.Dictionary(n)
    c = chacs.sample_sparse_coefficients(n, k, "gaussian", seed)
    params, init = chacs.HenonParams(), chacs.PlanarState(0.25, 0.25)
    scale = chacs.choose_scale(d, c.alpha, params, init)
    sig = chacs.synthesize_signal(d, c.alpha, scale)
    return d, c, sig, chacs.measure(params, init, sig, lam)


def test_first_iterates():
    traj = chacs.run_master(chacs.HenonParams(), chacs.PlanarState(0.25, 0.25), 2)
    assert traj.shape == (3, 2)
    np.testing.assert_allclose(traj[1], [1.1625, 0.075], rtol=1e-15)
    np.testing.assert_allclose(traj[2], [-0.81696875, 0.34875], rtol=1e-14)


def test_dictionary_is_orthonormal():
    atoms = np.asarray(chacs.Dictionary(64).atoms)
    assert np.abs(atoms.T @ atoms - np.eye(64)).max() < 1e-10


def test_sync_error_vanishes():
    err = chacs.sync_error(chacs.HenonParams(), chacs.PlanarState(0.25, 0.25), chacs.PlanarState(0, 0), 4, 1000)
    assert max(err[500:]) < 1e-8


def test_zero_residual_and_jacobian_shape():
    d, c, _, rec = instance()
    zbar, jac = chacs.run_excited_slave(rec, c.alpha, d, jacobian=True)
    assert np.abs(np.asarray(zbar) - np.asarray(rec.z)).max() < 1e-12
    assert np.asarray(jac).shape == (rec.m, 64)


def test_reconstruction_recovers_small_k():
    d, c, sig, rec = instance()
    best = min(
        chacs.relative_error(sig.samples, chacs.synthesize_signal(d, chacs.irnls_reconstruct(rec, d, seed=s).alpha_hat, sig.scale).samples)
        for s in range(5)
    )
    assert best < 1e-4


def test_record_json_round_trip():
    _, _, _, rec = instance()
    back = chacs.MeasurementRecord.from_json(rec.to_json())
    assert back.z == rec.z
    assert json.loads(rec.to_json())["lambda"] == 2


def test_rancs_trial_and_sweep():
    s = chacs.TrialSettings()
    assert chacs.run_rancs_trial(s, 5, 2, 64, "gaussian", 1).err < 1e-6
    s.n = 32
    a = chacs.run_sweep("chacs", s, ks=[2], realizations=2, seed=3)
    b = chacs.run_sweep("chacs", s, ks=[2], realizations=2, seed=3)
    assert a == b
    assert a[0].splitlines()[0].startswith("method,distribution,lambda,K,L")


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        chacs.Dictionary(7)
    with pytest.raises(chacs.DimensionMismatch):
        chacs.analyze_signal(chacs.Dictionary(8), [0.0] * 3)
    with pytest.raises(chacs.ScalingFailure):
        chacs.choose_scale(chacs.Dictionary(16), [0.0, 0.0, 1.0] + [0.0] * 13, chacs.HenonParams(), chacs.PlanarState(5, 5))
    with pytest.raises(RuntimeError):
        chacs.run_master(chacs.HenonParams(), chacs.PlanarState(3, 0), 100)
