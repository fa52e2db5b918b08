"""Single-photon scattering between two semi-infinite coupled-resonator waveguides.

Waveguide ``l`` (``l`` in ``a``, ``b``) is a tight-binding chain with hopping
``xi_l`` and cavity detuning ``delta_l``; its site 0 couples with strength
``g_l`` to atomic level ``|l>``, and the two atomic levels are linked by the
non-Hermitian two-level model :class:`~nonrecip.atom.EffectiveTwoLevel`.

``s_{l'l}`` is the amplitude for a photon incident in waveguide ``l`` to
leave through ``l'``; the flow ``i_{l'l}`` rescales ``|s_{l'l}|^2`` by the
ratio of group velocities ``xi sin k``. Energies and rates are in units of
the atomic decay rate.

Two independent routes produce the S-matrix: :func:`scattering_matrix`
evaluates the closed-form expressions and :func:`boundary_solve` solves the
site-0 and atom equations as a linear system.
"""
import cmath
import dataclasses
import io
import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .atom import EffectiveTwoLevel
from .dynamics import format_float, parallel_map, _json_float
from .errors import (
    BandEdgeError,
    DomainError,
    InvalidInputError,
    NoHalfMaxError,
    NoPropagatingModeError,
    PoleError,
)

__all__ = [
    "WaveguideSystem",
    "ScatteringQuery",
    "ScatteringResult",
    "FlowMatrix",
    "FwhmResult",
    "FlowSweep",
    "dispersion",
    "solve_k",
    "channel_wavenumbers",
    "scattering_matrix",
    "boundary_solve",
    "boundary_residuals",
    "scattering_flows",
    "required_jba",
    "unit_flow_sin_k",
    "half_max_k",
    "half_max_k_numeric",
    "sweep_k",
]

POLE_TOL = 1e-300
BAND_EDGE_TOL = 1e-12
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WaveguideSystem:
    xi_a: float
    xi_b: float
    delta_a: float = 0.0
    delta_b: float = 0.0
    g_a: float = 0.0
    g_b: float = 0.0
    atom: EffectiveTwoLevel = field(default_factory=EffectiveTwoLevel)

    def __post_init__(self):
        for name in ("xi_a", "xi_b", "delta_a", "delta_b", "g_a", "g_b"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InvalidInputError(f"{name} must be a finite real number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.xi_a <= 0.0 or self.xi_b <= 0.0:
            raise InvalidInputError("hopping xi_a, xi_b must be positive")
        if self.g_a < 0.0 or self.g_b < 0.0:
            raise InvalidInputError("couplings g_a, g_b must be non-negative")
        if not isinstance(self.atom, EffectiveTwoLevel):
            raise InvalidInputError("atom must be an EffectiveTwoLevel")

    def hopping(self, l):
        return self.xi_a if l == "a" else self.xi_b

    def detuning(self, l):
        return self.delta_a if l == "a" else self.delta_b

    @classmethod
    def symmetric(cls, xi, g, atom, delta=0.0):
        """Identical waveguides: ``xi_a = xi_b``, ``g_a = g_b``, ``delta_a = delta_b``."""
        return cls(xi_a=xi, xi_b=xi, delta_a=delta, delta_b=delta, g_a=g, g_b=g, atom=atom)

    @classmethod
    def optimal(cls, eta, gamma=1.0):
        """Perfect one-way point: ``xi = eta gamma``, ``g^2 = gamma xi``,
        ``|j_ba| = 2 gamma``, ``j_ab = 0``, no detunings."""
        if not eta > 0.0:
            raise InvalidInputError(f"eta must be positive, got {eta}")
        xi = eta * gamma
        atom = EffectiveTwoLevel(gamma_eff_a=gamma, gamma_eff_b=gamma, j_ab=0j, j_ba=2.0 * gamma)
        return cls.symmetric(xi, math.sqrt(gamma * xi), atom)

    def to_dict(self):
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "atom"}
        d["atom"] = self.atom.to_dict()
        return d

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise InvalidInputError("waveguide system must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"unknown waveguide field(s): {', '.join(unknown)}")
        kwargs = dict(data)
        if "atom" in kwargs:
            if not isinstance(kwargs["atom"], dict):
                raise InvalidInputError("atom must be a JSON object")
            kwargs["atom"] = EffectiveTwoLevel.from_dict(kwargs["atom"])
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise InvalidInputError(str(exc)) from exc


@dataclass(frozen=True)
class ScatteringQuery:
    """Wave number ``k`` in (0, pi) of the photon in the ``incident`` waveguide."""

    k: float
    incident: str = "a"

    def __post_init__(self):
        object.__setattr__(self, "k", float(self.k))
        if not 0.0 < self.k < math.pi:
            raise InvalidInputError(f"k must lie strictly inside (0, pi), got {self.k}")
        if self.incident not in ("a", "b"):
            raise InvalidInputError(f"incident must be 'a' or 'b', got {self.incident!r}")


@dataclass(frozen=True)
class ScatteringResult:
    s_aa: complex
    s_ab: complex
    s_ba: complex
    s_bb: complex
    j_prime_ab: complex
    j_prime_ba: complex
    delta_bar_a: complex
    delta_bar_b: complex
    d: complex
    energy: float
    k_a: float
    k_b: float

    def matrix(self):
        return np.array([[self.s_aa, self.s_ab], [self.s_ba, self.s_bb]])

    def to_dict(self):
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out[f.name] = [v.real, v.imag] if isinstance(v, complex) else v
        return out


@dataclass(frozen=True)
class FlowMatrix:
    i_aa: float
    i_ab: float
    i_ba: float
    i_bb: float

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if not getattr(self, f.name) >= 0.0:
                raise InvalidInputError(f"{f.name} must be non-negative")


@dataclass(frozen=True)
class FwhmResult:
    k_half: float
    delta_k: float
    eta: float
    analytic: bool

    @property
    def sin_k_half(self):
        return math.sin(self.k_half)

    @property
    def delta_k_over_pi(self):
        return self.delta_k / math.pi

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["sin_k_half"] = self.sin_k_half
        d["delta_k_over_pi"] = self.delta_k_over_pi
        return d


def dispersion(k, xi, delta):
    """Band energy ``delta - 2 xi cos k`` for ``0 < k < pi``."""
    if not 0.0 < k < math.pi:
        raise InvalidInputError(f"k must lie strictly inside (0, pi), got {k}")
    return delta - 2.0 * xi * math.cos(k)


def solve_k(energy, xi, delta):
    """Inverse of :func:`dispersion`; raises if ``energy`` is outside the band."""
    c = (delta - energy) / (2.0 * xi)
    if not -1.0 < c < 1.0:
        raise NoPropagatingModeError(
            f"energy {energy} outside band [{delta - 2 * xi}, {delta + 2 * xi}]"
        )
    return math.acos(c)


def channel_wavenumbers(sys, q):
    """Common energy and the wave numbers ``(E, k_a, k_b)`` in both waveguides."""
    inc = q.incident
    other = "b" if inc == "a" else "a"
    energy = dispersion(q.k, sys.hopping(inc), sys.detuning(inc))
    if sys.xi_a == sys.xi_b and sys.delta_a == sys.delta_b:
        return energy, q.k, q.k
    k_other = solve_k(energy, sys.hopping(other), sys.detuning(other))
    if inc == "a":
        return energy, q.k, k_other
    return energy, k_other, q.k


def _atom_denominators(atom, energy):
    ea = energy - atom.delta_a + 1j * atom.gamma_eff_a
    eb = energy - atom.delta_b + 1j * atom.gamma_eff_b
    return ea, eb, ea * eb - atom.j_ab * atom.j_ba


def scattering_matrix(sys, q):
    """Closed-form S-matrix at the energy fixed by ``q``.

    With ``Q = (E - da + iGa)(E - db + iGb) - j_ab j_ba`` the atom dresses
    the waveguide ends with ``J'_ab = j_ab g_a g_b / Q``,
    ``J'_ba = j_ba g_a g_b / Q``, ``Dbar_a = (E - db + iGb) g_a^2 / Q`` and
    ``Dbar_b = (E - da + iGa) g_b^2 / Q``.

    Raises
    ------
    PoleError
        If ``|Q|`` or the S-matrix denominator ``|D|`` is below 1e-300.
    """
    atom = sys.atom
    energy, k_a, k_b = channel_wavenumbers(sys, q)
    ea, eb, qden = _atom_denominators(atom, energy)
    if abs(qden) < POLE_TOL:
        raise PoleError(f"atomic resonance denominator vanishes at E={energy}")
    gg = sys.g_a * sys.g_b
    jp_ab = atom.j_ab * gg / qden
    jp_ba = atom.j_ba * gg / qden
    dbar_a = eb * sys.g_a ** 2 / qden
    dbar_b = ea * sys.g_b ** 2 / qden

    out_a = sys.xi_a * cmath.exp(-1j * k_a) + dbar_a
    in_a = sys.xi_a * cmath.exp(1j * k_a) + dbar_a
    out_b = sys.xi_b * cmath.exp(-1j * k_b) + dbar_b
    in_b = sys.xi_b * cmath.exp(1j * k_b) + dbar_b
    cross = jp_ab * jp_ba
    d = out_a * out_b - cross
    if abs(d) < POLE_TOL:
        raise PoleError(f"scattering denominator vanishes at E={energy}")
    return ScatteringResult(
        s_aa=(cross - in_a * out_b) / d,
        s_ab=2j * jp_ab * sys.xi_b * math.sin(k_b) / d,
        s_ba=2j * jp_ba * sys.xi_a * math.sin(k_a) / d,
        s_bb=(cross - out_a * in_b) / d,
        j_prime_ab=jp_ab,
        j_prime_ba=jp_ba,
        delta_bar_a=dbar_a,
        delta_bar_b=dbar_b,
        d=d,
        energy=energy,
        k_a=k_a,
        k_b=k_b,
    )


def _plane_waves(k, s_out, incident_here, j):
    """Site amplitude ``u(j)`` of the plane-wave ansatz."""
    u = s_out * cmath.exp(1j * k * j)
    if incident_here:
        u += cmath.exp(-1j * k * j)
    return u


def boundary_solve(sys, energy, k_a, k_b):
    """S-matrix and atom amplitudes from a direct linear solve.

    For each incident channel the unknowns ``(s_aa or s_ab, s_ba or s_bb,
    A, B)`` satisfy the site-0 equations of both waveguides and the two
    atom equations, with ``u_l(0)`` and ``u_l(1)`` taken from the plane-wave
    ansatz. Returns ``(S, amplitudes)`` where ``S[l', l]`` follows the
    ``s_{l'l}`` convention and ``amplitudes[l] = (A, B)``.
    """
    atom = sys.atom
    ks = {"a": k_a, "b": k_b}
    smat = np.zeros((2, 2), dtype=np.complex128)
    amps = {}
    for col, inc in enumerate("ab"):
        # unknown order: s_a, s_b, A, B
        m = np.zeros((4, 4), dtype=np.complex128)
        rhs = np.zeros(4, dtype=np.complex128)
        for row, l in enumerate("ab"):
            xi, dl, k = sys.hopping(l), sys.detuning(l), ks[l]
            g = sys.g_a if l == "a" else sys.g_b
            # (delta_l - E) u(0) - xi u(1) + g_l X = 0
            m[row, row] = (dl - energy) - xi * cmath.exp(1j * k)
            m[row, 2 + row] = g
            if l == inc:
                rhs[row] = -((dl - energy) - xi * cmath.exp(-1j * k))
        # (da - iGa - E) A + g_a u_a(0) + j_ab B = 0, and likewise for B
        m[2, 0] = sys.g_a
        m[2, 2] = atom.delta_a - 1j * atom.gamma_eff_a - energy
        m[2, 3] = atom.j_ab
        m[3, 1] = sys.g_b
        m[3, 3] = atom.delta_b - 1j * atom.gamma_eff_b - energy
        m[3, 2] = atom.j_ba
        if inc == "a":
            rhs[2] = -sys.g_a
        else:
            rhs[3] = -sys.g_b
        x = np.linalg.solve(m, rhs)
        smat[:, col] = x[:2]
        amps[inc] = (complex(x[2]), complex(x[3]))
    return smat, amps


def boundary_residuals(sys, res):
    """Largest residual of the stationary equations for ``res``.

    Atom amplitudes are recovered from the two atom equations; the residuals
    of the two site-0 equations and of the bulk equation at sites 1 and 2 of
    both waveguides are then evaluated for both incident channels.
    """
    atom = sys.atom
    energy = res.energy
    ks = {"a": res.k_a, "b": res.k_b}
    s = {("a", "a"): res.s_aa, ("b", "a"): res.s_ba, ("a", "b"): res.s_ab, ("b", "b"): res.s_bb}
    worst = 0.0
    for inc in "ab":
        u = {
            l: [_plane_waves(ks[l], s[(l, inc)], l == inc, j) for j in range(4)]
            for l in "ab"
        }
        m = np.array(
            [
                [energy - atom.delta_a + 1j * atom.gamma_eff_a, -atom.j_ab],
                [-atom.j_ba, energy - atom.delta_b + 1j * atom.gamma_eff_b],
            ]
        )
        amp_a, amp_b = np.linalg.solve(m, [sys.g_a * u["a"][0], sys.g_b * u["b"][0]])
        resid = [
            (atom.delta_a - 1j * atom.gamma_eff_a - energy) * amp_a + sys.g_a * u["a"][0] + atom.j_ab * amp_b,
            (atom.delta_b - 1j * atom.gamma_eff_b - energy) * amp_b + sys.g_b * u["b"][0] + atom.j_ba * amp_a,
            (sys.delta_a - energy) * u["a"][0] - sys.xi_a * u["a"][1] + sys.g_a * amp_a,
            (sys.delta_b - energy) * u["b"][0] - sys.xi_b * u["b"][1] + sys.g_b * amp_b,
        ]
        for l in "ab":
            xi, dl = sys.hopping(l), sys.detuning(l)
            for j in (1, 2):
                resid.append((dl - energy) * u[l][j] - xi * (u[l][j + 1] + u[l][j - 1]))
        worst = max(worst, max(abs(r) for r in resid))
    return worst


def scattering_flows(res, sys, q):
    """Group-velocity-normalised flows ``i_{l'l}``.

    Raises
    ------
    BandEdgeError
        If ``sin k`` is below 1e-12 in either waveguide.
    """
    _, k_a, k_b = channel_wavenumbers(sys, q)
    sin_a, sin_b = math.sin(k_a), math.sin(k_b)
    if sin_a < BAND_EDGE_TOL or sin_b < BAND_EDGE_TOL:
        raise BandEdgeError("group velocity vanishes at the band edge")
    v_a = sys.xi_a * sin_a
    v_b = sys.xi_b * sin_b
    return FlowMatrix(
        i_aa=abs(res.s_aa) ** 2,
        i_ab=abs(res.s_ab) ** 2 * v_a / v_b,
        i_ba=abs(res.s_ba) ** 2 * v_b / v_a,
        i_bb=abs(res.s_bb) ** 2,
    )


def required_jba(g, gamma, xi):
    """``|j_ba|`` giving unit forward flow at ``|sin k| = 1`` (with ``j_ab = 0``)."""
    den = 2.0 * g * g * xi
    if den == 0.0:
        raise DomainError("required_jba needs g > 0 and xi > 0")
    return (g * g + gamma * xi) ** 2 / den


def _quadratic_roots(a, b, c):
    """``(plus, minus)`` roots of ``a s^2 + b s + c``, ``plus`` carrying ``+sqrt``.

    Uses the cancellation-free pairing ``q/a`` and ``c/q``. ``plus`` is None
    for a vanishing leading coefficient; both are None without real roots.
    """
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None, None
    root = math.sqrt(disc)
    if b <= 0.0:
        qv = 0.5 * (-b + root)
        plus = qv / a if a != 0.0 else None
        minus = c / qv if qv != 0.0 else None
    else:
        qv = -0.5 * (b + root)
        minus = qv / a if a != 0.0 else None
        plus = c / qv if qv != 0.0 else None
    return plus, minus


def unit_flow_sin_k(jba_abs, g, gamma, xi):
    """Values of ``|sin k|`` in (0, 1] where the forward flow reaches 1.

    Identical waveguides, no detunings, ``j_ab = 0`` and equal atomic decay
    ``gamma`` are assumed. Roots of
    ``4(g^2-xi^2)xi^2 s^2 + 2(gamma-|j_ba|) g^2 xi s
    + g^4 + 4(xi^2-g^2)xi^2 + gamma^2 xi^2 = 0``.
    """
    g2 = g * g
    a = 4.0 * (g2 - xi * xi) * xi * xi
    b = 2.0 * (gamma - jba_abs) * g2 * xi
    c = g2 * g2 + 4.0 * (xi * xi - g2) * xi * xi + gamma * gamma * xi * xi
    roots = [r for r in _quadratic_roots(a, b, c) if r is not None and 0.0 < r <= 1.0 + 1e-12]
    return tuple(sorted(min(r, 1.0) for r in roots))


def half_max_k(eta):
    """Closed-form half-maximum wave number at the optimal one-way point.

    Solves ``2(1-eta)eta s^2 + (1-2 sqrt2) s + 1 - 2(1-eta)eta = 0`` for
    ``s = |sin k_half|``, preferring the ``+sqrt`` root when it lies in
    (0, 1]. At ``eta = 1`` the equation is linear.
    """
    eta = float(eta)
    if not (math.isfinite(eta) and eta > 0.0):
        raise InvalidInputError(f"eta must be positive, got {eta}")
    a = 2.0 * (1.0 - eta) * eta
    b = 1.0 - 2.0 * SQRT2
    c = 1.0 - a
    plus, minus = _quadratic_roots(a, b, c)
    if plus is not None and 0.0 < plus <= 1.0:
        s = plus
    elif minus is not None and 0.0 < minus <= 1.0:
        s = minus
    else:
        raise NoHalfMaxError(f"no half-maximum root in (0, 1] for eta={eta}")
    k_half = math.asin(s)
    return FwhmResult(k_half=k_half, delta_k=math.pi - 2.0 * k_half, eta=eta, analytic=True)


def half_max_k_numeric(eta, xtol=1e-13):
    """Half-maximum wave number by bisection on the computed forward flow."""
    sys = WaveguideSystem.optimal(float(eta))

    def excess(k):
        q = ScatteringQuery(k, "a")
        return scattering_flows(scattering_matrix(sys, q), sys, q).i_ba - 0.5

    lo, hi = 1e-6, math.pi / 2.0
    if excess(lo) >= 0.0 or excess(hi) <= 0.0:
        raise NoHalfMaxError(f"half maximum not bracketed in (0, pi/2) for eta={eta}")
    k_half = optimize.bisect(excess, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=400)
    return FwhmResult(k_half=k_half, delta_k=math.pi - 2.0 * k_half, eta=float(eta), analytic=False)


@dataclass(frozen=True)
class FlowSweep:
    k_values: tuple
    flows: tuple
    results: tuple
    incident: str

    def column(self, name):
        return np.array([getattr(f, name) for f in self.flows])

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "i_aa", "i_ab", "i_ba", "i_bb"])
        for k, f in zip(self.k_values, self.flows):
            writer.writerow([format_float(v) for v in (k, f.i_aa, f.i_ab, f.i_ba, f.i_bb)])
        return buf.getvalue()

    def to_dict(self, verbose=False):
        rows = []
        for k, f, r in zip(self.k_values, self.flows, self.results):
            row = {"k": k}
            row.update({name: _json_float(getattr(f, name)) for name in ("i_aa", "i_ab", "i_ba", "i_bb")})
            if verbose:
                row["scattering"] = r.to_dict()
            rows.append(row)
        return {"incident": self.incident, "rows": rows}

    def to_json(self, verbose=False):
        return json.dumps(self.to_dict(verbose), indent=2)


def k_grid(count):
    """Open grid ``pi (j+1)/(count+1)``, symmetric about pi/2."""
    if count < 3:
        raise InvalidInputError(f"k grid needs >= 3 points, got {count}")
    return tuple(math.pi * (j + 1) / (count + 1) for j in range(count))


def sweep_k(sys, k_count, incident="a", workers=None):
    """Flows over an open wave-number grid of the incident waveguide.

    Grid points at which the other waveguide has no propagating mode are
    dropped.
    """

    def point(k):
        q = ScatteringQuery(k, incident)
        try:
            res = scattering_matrix(sys, q)
        except NoPropagatingModeError:
            return None
        return k, scattering_flows(res, sys, q), res

    rows = [r for r in parallel_map(point, k_grid(int(k_count)), workers) if r is not None]
    return FlowSweep(
        k_values=tuple(r[0] for r in rows),
        flows=tuple(r[1] for r in rows),
        results=tuple(r[2] for r in rows),
        incident=incident,
    )
