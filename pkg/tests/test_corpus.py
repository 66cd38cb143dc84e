import math

import pytest

from data.models import load_model
from engine.config_loader import AnalysisConfig
from engine.search import VerdictStatus, analyze
from kinetics.cfrm import cf_rm_transform
from linalg.rational import in_column_space
from linalg.sign_compat import signs_match
from network.matrices import stoichiometric_matrix
from verification.checks import check_witness

_TOL = 1e-6

_HECK_MU = ("-0.062895375", "-0.262273058", "0.1", "0.291558477", "1.194680148")
_HECK_SIGMA = (-1, -1, 1, 1, 1)
_HECK_C2 = (16.40466123, 4.334651228, 9.508331945, 2.954105867, 0.434310288)
_HECK_C1 = (15.40466123, 3.334651228, 10.50833194, 3.954105867, 1.434310288)

_DEFONE_MU = (1, 0, 1)
_DEFONE_SIGMA = (3, 0, 2)
_DEFONE_KAPPA = (1, 2, 2, 1, 1)
_DEFONE_C2 = (1.745930121, 1, 1.163953414)
_DEFONE_C1 = (4.745930121, 1, 3.163953414)
_DEFONE_K = (0.701485619, 1.145521219, 1.718281828, 0.859140914, 0.859140914)

_LN4 = "1.386294361"
_NDK_KAPPA = (2, 1, 1, 1)

_ANDERIES_RATIO = 0.01 / -1.62

_MULTISTATIONARY = ("heck-carbon", "anderies", "defone-cutpair")


def _assert_close(actual, expected, tol=_TOL):
    assert len(actual) == len(expected)
    for a, e in zip(actual, expected):
        assert abs(a - e) <= tol, (actual, expected)


def _analyze(name, **kwargs):
    loaded = load_model(name)
    return loaded, analyze(loaded.system, preferred_orientation=loaded.orientation, **kwargs)


# ============================================================
# YEAST
# ============================================================

def test_ermog_yeast_is_monostationary():
    _, verdict = _analyze("ermog-yeast", config=AnalysisConfig(run_prechecks=False))
    assert verdict.status is VerdictStatus.MONOSTATIONARY
    assert verdict.witness is None
    assert verdict.stats.signatures == 0
    assert verdict.exit_code == 0


# ============================================================
# HECK
# ============================================================

def test_heck_carbon_is_multistationary():
    _, verdict = _analyze("heck-carbon")
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    report = verdict.verification
    assert report.passed
    assert report.residual_c_star <= _TOL and report.residual_c_double_star <= _TOL


def test_heck_carbon_with_published_mu():
    _, verdict = _analyze("heck-carbon", mu_hint=_HECK_MU, sigma=_HECK_SIGMA)
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    witness = verdict.witness
    assert witness.sigma == _HECK_SIGMA
    _assert_close(witness.c_double_star, _HECK_C2)
    _assert_close(witness.c_star, _HECK_C1)
    assert verdict.verification.passed


# ============================================================
# DEFICIENCY ONE
# ============================================================

def test_defone_cutpair_with_published_witness():
    loaded, verdict = _analyze(
        "defone-cutpair", mu_hint=_DEFONE_MU, sigma=_DEFONE_SIGMA, kappa=_DEFONE_KAPPA
    )
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    witness = verdict.witness
    _assert_close(witness.c_double_star, _DEFONE_C2)
    _assert_close(witness.c_star, _DEFONE_C1)
    _assert_close(witness.k, _DEFONE_K)
    assert abs(witness.k[1] - 1.145521219) <= _TOL

    report = check_witness(
        loaded.system.with_rates(witness.k), witness.c_star, witness.c_double_star,
        sigma=witness.sigma,
    )
    assert report.residual_c_star <= 1e-9
    assert report.residual_c_double_star <= 1e-9


def test_defone_cutpair_free_search():
    _, verdict = _analyze("defone-cutpair")
    assert verdict.status is VerdictStatus.MULTISTATIONARY


# ============================================================
# NDK PIPELINE
# ============================================================

def test_ndk_defone_after_cf_rm():
    original = load_model("ndk-defone").system
    transformed, _ = cf_rm_transform(original)

    verdict = analyze(transformed, mu_hint=[_LN4], sigma=[3], kappa=_NDK_KAPPA)
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    witness = verdict.witness
    assert abs(float(witness.mu[0]) - math.log(4)) <= 1e-9
    _assert_close(witness.c_double_star, (1.0,), 1e-9)
    _assert_close(witness.c_star, (4.0,), 1e-9)

    free = analyze(transformed)
    assert free.status is VerdictStatus.MULTISTATIONARY


def test_ndk_defone_supplied_kappa_fixes_mu_without_hint():
    transformed, _ = cf_rm_transform(load_model("ndk-defone").system)

    verdict = analyze(transformed, sigma=[3], kappa=_NDK_KAPPA)
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    assert not verdict.signature.hinted
    witness = verdict.witness
    assert abs(float(witness.mu[0]) - math.log(4)) <= 1e-9
    _assert_close(witness.c_double_star, (1.0,), 1e-9)
    _assert_close(witness.c_star, (4.0,), 1e-9)
    _assert_close(witness.k, _NDK_KAPPA, 1e-8)
    assert verdict.verification.residual_c_double_star <= 1e-9

    report = check_witness(transformed.with_rates(_NDK_KAPPA), [4.0], [1.0], sigma=[3])
    assert report.residual_c_double_star == 0.0


@pytest.mark.parametrize("which", ["original", "transformed"])
def test_ndk_defone_exact_equilibria(which):
    original = load_model("ndk-defone").system
    system = original if which == "original" else cf_rm_transform(original)[0]
    report = check_witness(system.with_rates(_NDK_KAPPA), [4.0], [1.0], sigma=[3])
    assert report.residual_c_double_star == 0.0
    assert report.residual_c_star <= 1e-12
    assert report.passed


# ============================================================
# ANDERIES
# ============================================================

def test_anderies_signature():
    loaded, verdict = _analyze("anderies")
    assert verdict.status is VerdictStatus.MULTISTATIONARY
    mu = verdict.signature.mu
    assert (mu[0] < 0, mu[1] > 0, mu[2] > 0) == (True, True, True)
    assert abs(float(mu[0] / mu[1]) - _ANDERIES_RATIO) <= 1e-9

    N = stoichiometric_matrix(loaded.system.network)
    sigma = verdict.witness.sigma
    assert signs_match(mu, sigma)
    assert in_column_space(N, sigma)

    branch = verdict.branch
    assert [loaded.system.network.reactions[j].id for j in branch.classes.partition.p0] == ["R3"]


# ============================================================
# WITNESSES
# ============================================================

@pytest.mark.parametrize("name", _MULTISTATIONARY)
def test_every_emitted_witness_passes_the_check(name):
    loaded, verdict = _analyze(name)
    witness = verdict.witness
    report = check_witness(
        loaded.system.with_rates(witness.k), witness.c_star, witness.c_double_star,
        sigma=witness.sigma,
    )
    assert report.passed
    assert all(c > 0 for c in witness.c_star + witness.c_double_star)
