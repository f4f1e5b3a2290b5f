"""Shared fixtures and independent oracles for the test suite.

Everything runs in rotational-constant units (B = 1), so the revival period
is pi and the 0-1 transition sits at 2.  The coupling is 0.2 B = 0.1 omega01
throughout, which puts the ground doublet at 1.8 and 2.2.  Heavy propagation
runs are session-scoped and reused by the unit tests and the acceptance
suite alike.
"""

import numpy as np
import pytest

import rotpolariton as rp

B = 1.0
G = 0.2 * B                      # coupling, 0.1 omega01
TAU = np.pi / B                  # bare revival period
W01 = 2.0 * B
SQRT3INV = 1.0 / np.sqrt(3.0)

# bandwidths for the analytic-vs-exact sweep, in units of g
SWEEP_BW = (0.1, 0.25, 0.5, 0.75, 1.0)


def unit_params(**over):
    kw = dict(rot_const=B, dipole=1.0, cavity_freq=W01, coupling=G,
              j_max=8, n_max=4)
    kw.update(over)
    return rp.SystemParams(**kw)


# ------------------------------------------------------------- oracles
#
# Two oracles that share no code with the package internals: cos theta
# matrix elements from Gauss-Legendre quadrature over normalized Legendre
# polynomials, and the closed-form spectral area of a Gaussian envelope.

def cos_matrix_quadrature(j_max):
    """<j' 0|cos theta|j 0> by quadrature, no recursion relations."""
    x, w = np.polynomial.legendre.leggauss(2 * j_max + 4)
    # orthonormal m = 0 polar functions on [-1, 1]: sqrt((2j+1)/2) P_j(x)
    pj = np.stack([np.sqrt((2 * j + 1) / 2.0)
                   * np.polynomial.legendre.Legendre.basis(j)(x)
                   for j in range(j_max + 1)])
    return np.einsum("ik,k,jk->ij", pj, w * x, pj)


def gaussian_area_closed_form(spec, omega, dipole=1.0):
    """Full-window spectral area of a Gaussian-envelope field.

    integral of dipole * E(t) exp(-i omega t) dt for the infinite window;
    the factories pad to +-7 tau0, so the truncation error is ~1e-11 of
    the area.  Works for the single-carrier and shared-envelope kinds.
    """
    if hasattr(spec, "components"):
        carriers = spec.components
    else:
        carriers = [(spec.omega0, spec.phi0)]
    pref = dipole * spec.e0 * np.sqrt(2.0 * np.pi) * spec.tau0 / 2.0
    tot = 0.0 + 0.0j
    for (w0, ph) in carriers:
        tot += pref * (np.exp(1j * ph) * np.exp(-spec.tau0 ** 2 * (omega - w0) ** 2 / 2.0)
                       + np.exp(-1j * ph) * np.exp(-spec.tau0 ** 2 * (omega + w0) ** 2 / 2.0))
    return tot


# ------------------------------------------------------------ parameters

@pytest.fixture(scope="session")
def p_cavity():
    return unit_params()


@pytest.fixture(scope="session")
def p_bare():
    return unit_params(cavity_freq=0.0, coupling=0.0, n_max=0)


# --------------------------------------------------------- heavy runs

@pytest.fixture(scope="session")
def bare_kick(p_bare):
    """Quarter-area kick on the uncoupled molecule, bandwidth 0.1 g."""
    fld = rp.gaussian_for_area(p_bare, rp.KICK_AREA, tau0=1.0 / (0.1 * G),
                               omega0=p_bare.omega01)
    return rp.kick_response(p_bare, fld, dressed=False)


@pytest.fixture(scope="session")
def cavity_kick(p_cavity):
    """Same kick with the cavity coupled: the doublet blocks the transfer."""
    fld = rp.gaussian_for_area(p_cavity, rp.KICK_AREA, tau0=1.0 / (0.1 * G),
                               omega0=p_cavity.omega01)
    return rp.kick_response(p_cavity, fld, dressed=True)


@pytest.fixture(scope="session")
def broadband_kick(p_cavity):
    """Broadband resonant kick (bandwidth g) with a spectroscopy-grade trace.

    The 80 tau window makes the bin width g/8, which puts both doublet
    lines (9 g and 11 g) exactly on the frequency grid.
    """
    fld = rp.gaussian_for_area(p_cavity, rp.KICK_AREA, tau0=1.0 / G,
                               omega0=p_cavity.omega01)
    return rp.kick_response(p_cavity, fld, trace_window=80.0 * TAU,
                            n_trace=32768, keep_spectrum=True)


@pytest.fixture(scope="session")
def designed(p_cavity):
    """Two-color pulse with the upper-carrier phase solved at 0.1 g."""
    return rp.design_composite(p_cavity, bandwidth=0.1 * G)


@pytest.fixture(scope="session")
def composite_exact(p_cavity, designed):
    fld, _report = designed
    return rp.composite_response(p_cavity, fld)


@pytest.fixture(scope="session")
def magnus_sweep(p_cavity):
    """Exact vs first-order composite response as the bandwidth grows.

    Carrier phases are solved once at 0.1 g and held fixed while the
    envelope widens, so only the envelope bandwidth varies along the sweep.
    """
    bws = [b * G for b in SWEEP_BW]
    return rp.scan_composite_bandwidth(p_cavity, bws, reference_bandwidth=0.1 * G,
                                       n_trace=8192)


@pytest.fixture(scope="session")
def oracle_result(p_cavity):
    bas = rp.build_dressed_basis(p_cavity)
    cos_op = rp.dressed_cos_matrix(p_cavity)
    return rp.orientation_max_oracle(cos_op, bas.energies, bas.labels)
