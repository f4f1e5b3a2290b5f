"""Orientation traces, Fourier spectra, revival detection, and bound oracles.

The orientation signal is the expectation of cos(theta).  Post-pulse dynamics
under a diagonal drift are evaluated in closed form from a single snapshot, so
long traces cost one phase matrix rather than a propagation.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import optimize, signal

from .errors import BasisMismatch, NoRevivalFound, WindowTooShort
from .model import OperatorMatrix

__all__ = [
    "TimeSeries",
    "Spectrum",
    "orientation",
    "expectation_series",
    "orientation_trace",
    "spectrum",
    "spectrum_peaks",
    "dressed_populations_phases",
    "revival_period",
    "orientation_max_oracle",
]


@dataclass(frozen=True)
class TimeSeries:
    """Real scalar signal on a strictly increasing time grid."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or v.shape != t.shape or t.size < 2:
            raise ValueError("need matching 1d times and values, length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    @property
    def window(self):
        return float(self.times[-1] - self.times[0])

    def is_uniform(self, rtol=1e-9):
        d = np.diff(self.times)
        return bool(np.all(np.abs(d - d[0]) <= rtol * abs(d[0])))


@dataclass(frozen=True)
class Spectrum:
    """One-sided magnitude spectrum on an angular-frequency grid."""

    omega: np.ndarray
    amplitude: np.ndarray
    label: str = ""
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        w = np.array(self.omega, dtype=float)
        a = np.array(self.amplitude, dtype=float)
        if w.ndim != 1 or a.shape != w.shape:
            raise ValueError("omega and amplitude must be matching 1d arrays")
        w.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "amplitude", a)

    @property
    def domega(self):
        return float(self.omega[1] - self.omega[0])

    def amplitude_at(self, omega0):
        """Amplitude at the bin nearest omega0."""
        return float(self.amplitude[int(np.argmin(np.abs(self.omega - omega0)))])


def _check_op(state, op):
    if isinstance(op, OperatorMatrix):
        if op.basis != state.basis:
            raise BasisMismatch(f"operator basis {op.basis!r} vs state basis {state.basis!r}")
        m = op.matrix
    else:
        m = np.asarray(op, dtype=complex)
    if m.shape != (state.dim, state.dim):
        raise BasisMismatch("operator and state dimensions disagree")
    return m


def orientation(state, cos_op):
    """<cos theta> for a single state; phases matter, so schrodinger only."""
    if state.picture != "schrodinger":
        raise ValueError("orientation needs a schrodinger-picture state")
    m = _check_op(state, cos_op)
    val = np.vdot(state.amplitudes, m @ state.amplitudes)
    return float(val.real)


def expectation_series(traj, op, label=""):
    """Expectation value of a (tagged) operator along a sampled trajectory."""
    if traj.picture != "schrodinger":
        raise ValueError("expectation_series needs a schrodinger-picture trajectory")
    if isinstance(op, OperatorMatrix):
        if op.basis != traj.basis:
            raise BasisMismatch(f"operator basis {op.basis!r} vs trajectory basis {traj.basis!r}")
        m = op.matrix
    else:
        m = np.asarray(op, dtype=complex)
    vals = np.einsum("ti,ij,tj->t", traj.states.conj(), m, traj.states)
    return TimeSeries(traj.times, vals.real, label=label)


def orientation_trace(state, energies, cos_op, times, label=""):
    """<cos theta>(t) under free evolution from one snapshot.

    Valid once the drift is diagonal in the state's basis (the drive is over);
    each sample costs a phase vector, not a propagation step.
    """
    if state.picture != "schrodinger":
        raise ValueError("orientation_trace needs a schrodinger-picture snapshot")
    m = _check_op(state, cos_op)
    energies = np.asarray(energies, dtype=float)
    if energies.shape != (state.dim,):
        raise BasisMismatch("energies length does not match the state")
    times = np.asarray(times, dtype=float)
    phases = np.exp(-1j * np.outer(times - state.time, energies))
    states = phases * state.amplitudes[None, :]
    vals = np.einsum("ti,ij,tj->t", states.conj(), m, states)
    return TimeSeries(times, vals.real, label=label)


def spectrum(series, min_window=None, subtract_mean=True, label=""):
    """One-sided magnitude spectrum dt * |rfft| of a uniform time series.

    The bin spacing is 2 pi / window; pass min_window to insist on enough
    resolution (WindowTooShort otherwise).
    """
    if not series.is_uniform():
        raise ValueError("spectrum needs a uniformly sampled series")
    if min_window is not None and series.window < min_window * (1 - 1e-12):
        raise WindowTooShort(
            f"window {series.window:g} shorter than required {min_window:g}"
        )
    x = series.values - series.values.mean() if subtract_mean else series.values
    dt = series.window / (series.times.size - 1)
    amp = dt * np.abs(np.fft.rfft(x))
    omega = 2.0 * np.pi * np.fft.rfftfreq(series.times.size, d=dt)
    return Spectrum(omega, amp, label=label or series.label,
                    meta={"dt": dt, "window": series.window, "n": series.times.size})


def spectrum_peaks(spec, rel_height=0.05, min_separation=None):
    """Local maxima above rel_height * global max; returns (omegas, heights).

    min_separation is an angular-frequency distance floor between peaks.
    """
    if spec.amplitude.size < 3:
        return np.array([]), np.array([])
    floor = rel_height * float(np.max(spec.amplitude))
    distance = None
    if min_separation is not None:
        distance = max(1, int(round(min_separation / spec.domega)))
    idx, _ = signal.find_peaks(spec.amplitude, height=floor, distance=distance)
    return spec.omega[idx], spec.amplitude[idx]


def dressed_populations_phases(state, ground_label="0;0"):
    """Per-label populations and phases relative to the ground amplitude.

    Phases are reported in the state's own picture.  If the ground amplitude
    is negligible the raw phases are returned instead.
    """
    if state.labels is None:
        raise ValueError("state has no labels")
    amps = state.amplitudes
    ref = 0.0
    if ground_label in state.labels:
        a0 = amps[state.labels.index(ground_label)]
        if abs(a0) > 1e-12:
            ref = np.angle(a0)
    out = {}
    for lab, a in zip(state.labels, amps):
        pop = float(abs(a) ** 2)
        ph = float(np.angle(a) - ref) if abs(a) > 1e-12 else 0.0
        out[lab] = {"population": pop, "phase": float(np.mod(ph + np.pi, 2 * np.pi) - np.pi)}
    return out


def _lagged_pearson(x):
    """Pearson correlation of x[:-l] with x[l:] for every lag l, via FFT."""
    n = x.size
    m = np.arange(n, 0, -1, dtype=float)  # overlap length per lag 0..n-1
    # cross sums by autocorrelation
    nfft = int(2 ** np.ceil(np.log2(2 * n)))
    fx = np.fft.rfft(x, nfft)
    sxy = np.fft.irfft(fx * fx.conj(), nfft)[:n]
    cs = np.concatenate([[0.0], np.cumsum(x)])
    cs2 = np.concatenate([[0.0], np.cumsum(x * x)])
    # prefix x[:n-l] and suffix x[l:] moments
    lags = np.arange(n)
    s1 = cs[n - lags]
    s1sq = cs2[n - lags]
    s2 = cs[n] - cs[lags]
    s2sq = cs2[n] - cs2[lags]
    cov = sxy - s1 * s2 / m
    var1 = s1sq - s1 * s1 / m
    var2 = s2sq - s2 * s2 / m
    denom = np.sqrt(np.maximum(var1, 0.0) * np.maximum(var2, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(denom > 0, cov / np.maximum(denom, 1e-300), 0.0)
    return np.clip(r, -1.0, 1.0)


def revival_period(series, threshold=0.999, min_lag=None):
    """Time shift after which the signal repeats.

    Computes the lag-by-lag Pearson correlation of the series with its shifted
    self, skips the trivial neighborhood of zero lag, and returns the best lag
    inside the first contiguous run with correlation >= threshold, refined by
    a parabola through the three samples around the maximum.  Raises
    NoRevivalFound when the signal never decorrelates or never recurs.
    """
    if not series.is_uniform():
        raise ValueError("revival_period needs a uniformly sampled series")
    x = series.values - series.values.mean()
    if float(np.max(np.abs(x))) == 0.0:
        raise NoRevivalFound("series is constant")
    dt = series.window / (series.times.size - 1)
    r = _lagged_pearson(x)
    n = x.size
    max_lag = (2 * n) // 3  # keep at least a third of the samples overlapping
    start = 1 if min_lag is None else max(1, int(np.ceil(min_lag / dt)))
    below = np.nonzero(r[start:max_lag] < threshold)[0]
    if below.size == 0:
        raise NoRevivalFound("signal never decorrelates below the threshold; window too short?")
    lo = start + below[0]
    above = np.nonzero(r[lo:max_lag] >= threshold)[0]
    if above.size == 0:
        raise NoRevivalFound("no recurrence above the threshold inside the window")
    run_start = lo + above[0]
    run_end = run_start
    while run_end + 1 < max_lag and r[run_end + 1] >= threshold:
        run_end += 1
    seg = r[run_start:run_end + 1]
    m = run_start + int(np.argmax(seg))
    if 0 < m < n - 1:
        rm1, r0, rp1 = r[m - 1], r[m], r[m + 1]
        denom = rm1 - 2.0 * r0 + rp1
        delta = 0.5 * (rm1 - rp1) / denom if denom < 0 else 0.0
    else:
        delta = 0.0
    return float((m + delta) * dt)


def _float_gcd(values, rtol=1e-9):
    """Approximate positive gcd of floats; 0 when they are incommensurate."""
    vals = [abs(v) for v in values if abs(v) > 0]
    if not vals:
        return 0.0
    tol = rtol * max(vals)
    g = vals[0]
    for v in vals[1:]:
        a, b = max(g, v), min(g, v)
        while b > tol:
            a, b = b, a % b
        g = a
        if g < tol:
            return 0.0
    return g


def orientation_max_oracle(cos_op, energies, labels, states=("0;0", "+;0", "-;0"),
                           n_pop=101, n_phase=64, n_time=2048, refine_tol=1e-4):
    """Brute-force bound on <cos theta> over superpositions of a few states.

    Scans the population simplex (n_pop points per axis) crossed with phase
    grids (n_phase per free phase), polishes the best grid point with
    Nelder-Mead, and reports when within the common recurrence period of the
    restricted energies the bound is attained.  Returns a dict with keys
    max, grid_max, populations, phases, time, refined_gain.
    """
    labels = tuple(labels)
    idx = [labels.index(s) for s in states]
    m = cos_op.matrix if isinstance(cos_op, OperatorMatrix) else np.asarray(cos_op, dtype=complex)
    sub = m[np.ix_(idx, idx)]
    en = np.asarray(energies, dtype=float)[idx]
    k = len(idx)
    if k not in (2, 3):
        raise ValueError("oracle supports two- or three-state subspaces")

    grid = np.linspace(0.0, 1.0, n_pop)
    phi = np.linspace(0.0, 2.0 * np.pi, n_phase, endpoint=False)
    if k == 2:
        # single coherence: populations (p, 1-p) and one relative phase
        cp = np.stack([np.sqrt(grid), np.sqrt(1.0 - grid)], axis=1)
        e = np.stack([np.ones(n_phase, dtype=complex), np.exp(1j * phi)], axis=1)
        kmat = np.real(np.einsum("bj,jk,bk->bjk", e.conj(), sub, e))
        vals = np.einsum("aj,ak,bjk->ab", cp, cp, kmat)
        a, b = np.unravel_index(np.argmax(vals), vals.shape)
        best_val = float(vals[a, b])

        def negf(x):
            u, a1 = x
            c = np.array([np.cos(u), np.sin(u) * np.exp(1j * a1)])
            return -float(np.real(np.vdot(c, sub @ c)))

        u0 = np.arccos(np.sqrt(np.clip(grid[a], 0.0, 1.0)))
        res = optimize.minimize(negf, x0=[u0, float(phi[b])], method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000})
        refined = float(-res.fun)
        u, a1 = res.x
        p_ref = np.array([np.cos(u) ** 2, np.sin(u) ** 2])
        phi_ref = np.mod(np.array([a1]), 2.0 * np.pi)
    else:
        # populations on the simplex, first phase gauged to zero
        pops = [(p0, p1, 1.0 - p0 - p1)
                for p0 in grid for p1 in grid if p0 + p1 <= 1.0 + 1e-12]
        pops = np.clip(np.array(pops), 0.0, 1.0)
        cp = np.sqrt(pops)  # (np, 3) real
        cpout = np.einsum("aj,ak->ajk", cp, cp)

        e2 = np.exp(1j * phi)
        best_val = -np.inf
        best_pop = None
        best_phi = None
        for p1 in phi:
            e = np.stack([np.ones_like(e2), np.full(e2.shape, np.exp(1j * p1)), e2], axis=1)
            kmat = np.real(np.einsum("bj,jk,bk->bjk", e.conj(), sub, e))
            vals = np.einsum("ajk,bjk->ab", cpout, kmat)
            a, b = np.unravel_index(np.argmax(vals), vals.shape)
            if vals[a, b] > best_val:
                best_val = float(vals[a, b])
                best_pop = pops[a]
                best_phi = (float(p1), float(phi[b]))

        def negf(x):
            u, v, a1, a2 = x
            p = np.array([np.cos(u) ** 2,
                          np.sin(u) ** 2 * np.cos(v) ** 2,
                          np.sin(u) ** 2 * np.sin(v) ** 2])
            c = np.sqrt(p) * np.exp(1j * np.array([0.0, a1, a2]))
            return -float(np.real(np.vdot(c, sub @ c)))

        p0, pp, pm = best_pop
        u0 = np.arccos(np.sqrt(np.clip(p0, 0.0, 1.0)))
        su = np.sin(u0)
        v0 = 0.25 * np.pi if su < 1e-9 else np.arccos(np.sqrt(np.clip(pp, 0.0, 1.0)) / su)
        res = optimize.minimize(negf, x0=[u0, v0, best_phi[0], best_phi[1]],
                                method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000})
        refined = float(-res.fun)
        u, v, a1, a2 = res.x
        p_ref = np.array([np.cos(u) ** 2,
                          np.sin(u) ** 2 * np.cos(v) ** 2,
                          np.sin(u) ** 2 * np.sin(v) ** 2])
        phi_ref = np.mod(np.array([a1, a2]), 2.0 * np.pi)

    # when the bound recurs: scan one common period of the level splittings
    c_opt = np.sqrt(p_ref) * np.exp(1j * np.concatenate([[0.0], phi_ref]))
    dE = en - en[0]
    g = _float_gcd(dE[1:])
    t_period = 2.0 * np.pi / g if g > 0 else 2.0 * np.pi / max(np.min(np.abs(dE[dE != 0])), 1e-300)
    ts = np.linspace(0.0, t_period, n_time, endpoint=False)
    phases = np.exp(-1j * np.outer(ts, dE))
    cs = phases * c_opt[None, :]
    vals_t = np.einsum("ti,ij,tj->t", cs.conj(), sub, cs).real
    it = int(np.argmax(vals_t))
    if 0 < it < n_time - 1:
        vm1, v0t, vp1 = vals_t[it - 1], vals_t[it], vals_t[it + 1]
        den = vm1 - 2.0 * v0t + vp1
        dly = 0.5 * (vm1 - vp1) / den if den < 0 else 0.0
    else:
        dly = 0.0
    t_max = float((it + dly) * (ts[1] - ts[0]))

    return {
        "max": refined,
        "grid_max": best_val,
        "populations": tuple(float(p) for p in p_ref),
        "phases": tuple(float(p) for p in phi_ref),
        "time": t_max,
        "period": float(t_period),
        "refined_gain": refined - best_val,
        "states": tuple(states),
    }
