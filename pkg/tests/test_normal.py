"""Normal quantile, CDF, and density against scipy and frozen values."""

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

from copulamix.errors import DomainError
from copulamix.normal import norm_cdf, norm_pdf, norm_ppf


def test_ppf_matches_scipy_across_the_open_interval():
    p = np.concatenate([
        np.linspace(1e-12, 1e-3, 50),
        np.linspace(1e-3, 1 - 1e-3, 200),
        np.linspace(1 - 1e-3, 1 - 1e-12, 50),
    ])
    err = np.abs(norm_ppf(p) - scipy.stats.norm.ppf(p))
    assert err.max() < 1e-12


def test_ppf_frozen_value():
    # z for a two-sided 95% interval
    assert norm_ppf(0.975) == pytest.approx(1.9599639845400538, abs=1e-14)


def test_cdf_and_pdf_match_scipy():
    x = np.linspace(-8.0, 8.0, 321)
    assert np.abs(norm_cdf(x) - scipy.stats.norm.cdf(x)).max() < 1e-14
    assert np.abs(norm_pdf(x) - scipy.stats.norm.pdf(x)).max() < 1e-14


def test_ppf_rejects_endpoints_and_outside():
    for p in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(DomainError):
            norm_ppf(p)


def test_cdf_ppf_round_trip():
    p = np.linspace(1e-8, 1 - 1e-8, 1001)
    assert np.abs(norm_cdf(norm_ppf(p)) - p).max() < 1e-12


@given(st.floats(min_value=1e-4, max_value=0.5))
def test_ppf_is_odd_around_half(p):
    # below 1e-4 the quantity 1 - p itself rounds away more than the
    # tolerance, so the identity is only meaningful on this range
    assert norm_ppf(1.0 - p) == pytest.approx(-norm_ppf(p), abs=1e-12)


@given(st.floats(min_value=1e-10, max_value=0.5 - 1e-12),
       st.floats(min_value=1e-12, max_value=0.49))
def test_ppf_is_increasing(p, gap):
    q = min(p + gap, 1 - 1e-10)
    assert norm_ppf(p) < norm_ppf(q)
