"""System definition: units, parameters, bases, and Hamiltonians.

A single polar linear molecule (rigid rotor, M = 0 manifold) couples to one
cavity mode near-resonant with its 0-1 rotational line.  Everything internal
runs in Hartree atomic units with hbar = 1, so energies double as angular
frequencies.  Inputs are accepted in wavenumbers (rotational constant, cavity
frequency) and Debye (permanent dipole).

Conventions fixed here and relied on everywhere else:

* product basis states are (rotor J, photon n) ordered lexicographically in
  (n, J), i.e. all J for n = 0, then n = 1, ...
* the light-matter coupling strength ``g`` is the vacuum Rabi element on the
  0-1 line; the full-Hamiltonian coupling prefactor is ``g / mu01`` so the
  cavity sees the complete dipole ladder, not just the lowest rung.
* dressed (polariton) doublets are the symmetric/antisymmetric combinations
  (|J=0, n+1> +- |J=1, n>)/sqrt(2) with energies w_c (n+1) +- g sqrt(n+1)
  above the dressed ground state |0;0> = |J=0, n=0>.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonResonantCavity, UnknownUnit

__all__ = [
    "HARTREE_PER_CM1",
    "AU_PER_DEBYE",
    "convert_units",
    "SystemParams",
    "ocs_params",
    "OperatorMatrix",
    "ProductBasis",
    "DressedBasis",
    "cos_theta_elements",
    "build_product_basis",
    "build_full_hamiltonian",
    "build_dressed_basis",
    "build_dressed_hamiltonian",
    "dressed_cos_matrix",
    "doublet_energies",
    "mu_tilde_ground",
    "mu_tilde_doublet",
    "project_to_dressed",
]

# CODATA: 1 Hartree = 219474.6313632 cm^-1, 1 e*a0 = 2.5417464519 Debye.
HARTREE_PER_CM1 = 1.0 / 219474.6313632
AU_PER_DEBYE = 1.0 / 2.5417464519

# unit name -> (dimension, factor to atomic units)
_UNITS = {
    "cm-1": ("energy", HARTREE_PER_CM1),
    "au": ("energy", 1.0),
    "debye": ("dipole", AU_PER_DEBYE),
    "au-dipole": ("dipole", 1.0),
}


def convert_units(value, from_unit, to_unit):
    """Convert a scalar between supported units of the same dimension.

    Supported names: 'cm-1' and 'au' for energy/angular frequency,
    'debye' and 'au-dipole' for dipole moments.  Raises UnknownUnit for
    anything else, ValueError when the dimensions do not match.
    """
    try:
        dim_from, fac_from = _UNITS[from_unit]
    except KeyError:
        raise UnknownUnit(f"unknown unit {from_unit!r}") from None
    try:
        dim_to, fac_to = _UNITS[to_unit]
    except KeyError:
        raise UnknownUnit(f"unknown unit {to_unit!r}") from None
    if dim_from != dim_to:
        raise ValueError(f"cannot convert {from_unit!r} ({dim_from}) to {to_unit!r} ({dim_to})")
    return value * fac_from / fac_to


@dataclass(frozen=True)
class SystemParams:
    """Molecule plus cavity parameters, all in atomic units.

    rot_const  rotational constant B
    dipole     permanent dipole mu
    cavity_freq  cavity mode frequency w_c
    coupling   vacuum Rabi coupling g on the 0-1 line
    j_max      rotor truncation (inclusive)
    n_max      photon truncation (inclusive)
    """

    rot_const: float
    dipole: float
    cavity_freq: float
    coupling: float
    j_max: int = 8
    n_max: int = 4

    def __post_init__(self):
        if self.rot_const <= 0 or self.dipole <= 0:
            raise ValueError("rot_const and dipole must be positive")
        if self.cavity_freq < 0 or self.coupling < 0:
            raise ValueError("cavity_freq and coupling must be nonnegative")
        if self.j_max < 1 or self.n_max < 0:
            raise ValueError("need j_max >= 1 and n_max >= 0")

    @property
    def omega01(self):
        """Bare 0-1 rotational transition frequency, 2B."""
        return 2.0 * self.rot_const

    @property
    def mu01(self):
        """0-1 dipole matrix element, mu/sqrt(3)."""
        return self.dipole / np.sqrt(3.0)

    @property
    def revival_time(self):
        """Bare-molecule orientation period pi/B."""
        return np.pi / self.rot_const

    def is_resonant(self, rtol=1e-9):
        return abs(self.cavity_freq - self.omega01) <= rtol * self.omega01


def ocs_params(coupling_ratio=0.1, j_max=8, n_max=4, cavity=True):
    """OCS molecule in a resonant cavity; coupling_ratio is g / omega01."""
    b = convert_units(0.20286, "cm-1", "au")
    mu = convert_units(0.715, "debye", "au-dipole")
    omega01 = 2.0 * b
    g = coupling_ratio * omega01 if cavity else 0.0
    return SystemParams(
        rot_const=b,
        dipole=mu,
        cavity_freq=omega01 if cavity else 0.0,
        coupling=g,
        j_max=j_max,
        n_max=n_max if cavity else 0,
    )


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense operator with a basis tag so mismatched algebra fails loudly."""

    matrix: np.ndarray
    basis: str
    label: str = ""

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("OperatorMatrix must be square")
        m = np.array(m, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def hermiticity_defect(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


@dataclass(frozen=True)
class ProductBasis:
    """Rotor x photon basis, index = n * (j_max + 1) + j."""

    j_max: int
    n_max: int

    @cached_property
    def states(self):
        return tuple((j, n) for n in range(self.n_max + 1) for j in range(self.j_max + 1))

    @property
    def dim(self):
        return (self.j_max + 1) * (self.n_max + 1)

    def index(self, j, n):
        if not (0 <= j <= self.j_max and 0 <= n <= self.n_max):
            raise ValueError(f"state (j={j}, n={n}) outside basis")
        return n * (self.j_max + 1) + j


def build_product_basis(j_max, n_max):
    return ProductBasis(j_max=j_max, n_max=n_max)


def cos_theta_elements(j_max):
    """cos(theta) in the M = 0 rotor basis, truncated at j_max.

    Only |dJ| = 1 elements survive; <J|cos|J+1> = (J+1)/sqrt((2J+1)(2J+3)).
    """
    n = j_max + 1
    m = np.zeros((n, n))
    j = np.arange(j_max)
    off = (j + 1) / np.sqrt((2 * j + 1) * (2 * j + 3))
    m[j, j + 1] = off
    m[j + 1, j] = off
    return OperatorMatrix(m, basis="rotor", label="cos_theta")


def _photon_number(n_max):
    return np.diag(np.arange(n_max + 1, dtype=float))


def _photon_x(n_max):
    """a + a^dagger on the truncated photon ladder."""
    m = np.zeros((n_max + 1, n_max + 1))
    n = np.arange(n_max)
    m[n, n + 1] = np.sqrt(n + 1.0)
    m[n + 1, n] = np.sqrt(n + 1.0)
    return m


def build_full_hamiltonian(params):
    """Drift and drive operators in the product basis.

    Returns (h0, v) where

        h0 = B J(J+1) + w_c a^dag a - (g / mu01) (mu cos theta)(a + a^dag)
        v  = (mu cos theta) x 1

    and the total Hamiltonian under a field E(t) is h0 - E(t) v.  The
    light-matter term keeps both rotating and counter-rotating parts.
    """
    jdim = params.j_max + 1
    ndim = params.n_max + 1
    jvals = np.arange(jdim, dtype=float)
    rotor_h = np.diag(params.rot_const * jvals * (jvals + 1.0))
    mucos = params.dipole * cos_theta_elements(params.j_max).matrix.real

    h0 = np.kron(np.eye(ndim), rotor_h) + np.kron(params.cavity_freq * _photon_number(params.n_max), np.eye(jdim))
    if params.coupling != 0.0:
        lam = params.coupling / params.mu01
        h0 = h0 - lam * np.kron(_photon_x(params.n_max), mucos)
    v = np.kron(np.eye(ndim), mucos)
    return (
        OperatorMatrix(h0, basis="product", label="drift"),
        OperatorMatrix(v, basis="product", label="mu_cos_theta"),
    )


def doublet_energies(params, n):
    """Energies of the n-th polariton doublet (upper, lower) above |0;0>."""
    wc, g = params.cavity_freq, params.coupling
    return (wc * (n + 1) + g * np.sqrt(n + 1.0), wc * (n + 1) - g * np.sqrt(n + 1.0))


def mu_tilde_ground(params):
    """|transition dipole| between |0;0> and either |+-;0> state."""
    return params.mu01 / np.sqrt(2.0)


def mu_tilde_doublet(params):
    """|transition dipole| between adjacent doublets; sign follows the upper state."""
    return params.mu01 / 2.0


@dataclass(frozen=True)
class DressedBasis:
    """Polariton eigenbasis of the resonant Jaynes-Cummings block structure.

    Ordering: |0;0>, then (+;n, -;n) for n = 0 .. n_max-1, then the lone
    |J=1, n_max> edge state left unpaired by the photon truncation.  The
    transform's columns are the dressed states expressed over the two-level
    rotor product basis (j in {0,1}, lexicographic (n, j) indexing).
    """

    n_max: int
    labels: tuple
    energies: np.ndarray
    transform: np.ndarray

    def __post_init__(self):
        e = np.array(self.energies, dtype=float)
        u = np.array(self.transform, dtype=complex)
        e.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "transform", u)

    @property
    def dim(self):
        return 2 * (self.n_max + 1)

    def index(self, label):
        return self.labels.index(label)


def build_dressed_basis(params, rtol=1e-9):
    """Construct the dressed basis; requires the cavity on resonance."""
    if not params.is_resonant(rtol=rtol):
        raise NonResonantCavity(
            f"cavity at {params.cavity_freq:g} au vs 0-1 line {params.omega01:g} au "
            f"(tolerance {rtol:g} relative)"
        )
    n_max = params.n_max
    if n_max < 1:
        raise ValueError("dressed basis needs n_max >= 1")
    dim = 2 * (n_max + 1)

    def pidx(j, n):
        return 2 * n + j

    u = np.zeros((dim, dim))
    labels = ["0;0"]
    energies = [0.0]
    u[pidx(0, 0), 0] = 1.0
    col = 1
    s = 1.0 / np.sqrt(2.0)
    for n in range(n_max):
        up, lo = doublet_energies(params, n)
        u[pidx(0, n + 1), col] = s
        u[pidx(1, n), col] = s
        labels.append(f"+;{n}")
        energies.append(up)
        col += 1
        u[pidx(0, n + 1), col] = s
        u[pidx(1, n), col] = -s
        labels.append(f"-;{n}")
        energies.append(lo)
        col += 1
    # photon-truncation edge state |J=1, n_max> has no |J=0, n_max+1> partner
    u[pidx(1, n_max), col] = 1.0
    labels.append("edge")
    energies.append(params.omega01 + n_max * params.cavity_freq)
    return DressedBasis(n_max=n_max, labels=tuple(labels), energies=np.array(energies), transform=u)


def _two_level_drive(params):
    """(mu cos theta) x 1 on the two-level rotor product space, (n, j) order."""
    cos2 = cos_theta_elements(1).matrix.real
    return np.kron(np.eye(params.n_max + 1), params.dipole * cos2)


def build_dressed_hamiltonian(params, rtol=1e-9):
    """Drift (diagonal) and drive operators in the dressed basis.

    The drift keeps only the rotating part of the light-matter coupling, so
    its eigenvalues are exactly the doublet energies.  The drive is the
    two-level rotor dipole conjugated into the dressed frame; its nonzero
    elements are +-mu01/sqrt(2) between |0;0> and |+-;0> and +-mu01/2 between
    adjacent doublets, the sign following the upper doublet's parity.
    """
    basis = build_dressed_basis(params, rtol=rtol)
    u = basis.transform
    v = u.conj().T @ _two_level_drive(params) @ u
    v = 0.5 * (v + v.conj().T)
    return (
        OperatorMatrix(np.diag(basis.energies), basis="dressed", label="drift"),
        OperatorMatrix(v, basis="dressed", label="mu_cos_theta"),
        basis,
    )


def dressed_cos_matrix(params, rtol=1e-9):
    """Bare cos(theta) observable conjugated into the dressed basis."""
    basis = build_dressed_basis(params, rtol=rtol)
    u = basis.transform
    cos2 = np.kron(np.eye(params.n_max + 1), cos_theta_elements(1).matrix.real)
    m = u.conj().T @ cos2 @ u
    return OperatorMatrix(0.5 * (m + m.conj().T), basis="dressed", label="cos_theta")


def project_to_dressed(amplitudes, params, basis=None, photon_parity=True):
    """Project product-basis amplitudes (full j_max ladder) onto dressed states.

    The full Hamiltonian carries the coupling with a minus sign while the
    dressed ladder uses the plus-sign convention; the two frames differ by the
    photon parity (-1)^n, which this projection absorbs (photon_parity=True).
    Weight in J >= 2 rotor states is dropped, so the result can have norm < 1.
    """
    if basis is None:
        basis = build_dressed_basis(params)
    amps = np.asarray(amplitudes, dtype=complex)
    pb = build_product_basis(params.j_max, params.n_max)
    if amps.shape[-1] != pb.dim:
        raise ValueError("amplitude length does not match the product basis")
    two = np.zeros(amps.shape[:-1] + (2 * (params.n_max + 1),), dtype=complex)
    for n in range(params.n_max + 1):
        for j in (0, 1):
            phase = (-1.0) ** n if photon_parity else 1.0
            two[..., 2 * n + j] = phase * amps[..., pb.index(j, n)]
    return two @ basis.transform.conj()


def embed_dressed_vectors(params, basis=None, photon_parity=True):
    """Dressed-state column vectors written over the full product basis.

    Columns follow basis.labels; the photon-parity gauge matches
    project_to_dressed, so conj(emb).T @ psi reproduces that projection.
    """
    if basis is None:
        basis = build_dressed_basis(params)
    pb = build_product_basis(params.j_max, params.n_max)
    emb = np.zeros((pb.dim, basis.dim))
    for n in range(params.n_max + 1):
        phase = (-1.0) ** n if photon_parity else 1.0
        for j in (0, 1):
            # the resonant transform is real by construction
            emb[pb.index(j, n), :] = phase * basis.transform[2 * n + j, :].real
    return emb


def adiabatic_dressed_vectors(params, basis=None):
    """Exact eigenvectors of the static full Hamiltonian, one per dressed label.

    Each column is the eigenvector of h0 (counter-rotating coupling included)
    with the largest overlap onto the corresponding dressed state, with its
    phase aligned to that overlap.  Returns (vectors, energies, basis).  The
    matching must be injective; a collision means the couplings are too strong
    for the dressed labels to identify polaritons.
    """
    if basis is None:
        basis = build_dressed_basis(params)
    h0, _ = build_full_hamiltonian(params)
    evals, evecs = np.linalg.eigh(h0.matrix)
    emb = embed_dressed_vectors(params, basis)
    overlaps = np.abs(evecs.conj().T @ emb)
    picks = np.argmax(overlaps, axis=0)
    if len(set(picks.tolist())) != basis.dim:
        raise ValueError("dressed-to-exact eigenvector matching is not injective")
    vectors = np.empty((evecs.shape[0], basis.dim), dtype=complex)
    for k, i in enumerate(picks):
        ov = np.vdot(evecs[:, i], emb[:, k])
        vectors[:, k] = evecs[:, i] * (ov / abs(ov))
    return vectors, evals[picks].copy(), basis
