"""Driven cyclic three-level atom and its adiabatically eliminated two-level model.

Basis order is ``(|a>, |b>, |c>)`` everywhere. Rates, detunings and decays
are dimensionless (units of the direct drive rate ``omega_ab``).

The three drive phases enter only through the loop flux
``phi = phi_ab + phi_cb + phi_ca`` once the states are locally rephased,
so :func:`build_full_hamiltonian` works in that gauge-reduced form.
"""
import cmath
import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .operators import as_operator

__all__ = [
    "CyclicAtomParams",
    "EffectiveTwoLevel",
    "wrap_phase",
    "build_full_hamiltonian",
    "adiabatic_eliminate",
    "adiabatic_c_amplitude",
    "build_effective_hamiltonian",
    "coherent_dissipative_coupling",
]

LOOP_TOL = 1e-12


def wrap_phase(phi):
    """Map an angle onto (-pi, pi]."""
    w = math.remainder(float(phi), 2.0 * math.pi)
    return math.pi if w == -math.pi else w


def _check_finite(**values):
    for name, v in values.items():
        if isinstance(v, complex):
            ok = math.isfinite(v.real) and math.isfinite(v.imag)
        else:
            ok = math.isfinite(v)
        if not ok:
            raise InvalidInputError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class CyclicAtomParams:
    """Drive rates, phases, detunings and decay rates of the cyclic atom.

    ``delta_ca`` never enters the gauge-reduced Hamiltonian; it is kept so
    the closed-loop condition ``delta_ab = delta_cb - delta_ca`` can be
    checked at construction.
    """

    omega_ab: float = 1.0
    omega_cb: float = 10.0
    omega_ca: float = 10.0
    phi_ab: float = 0.0
    phi_cb: float = 0.0
    phi_ca: float = 0.0
    delta_ab: float = 0.0
    delta_cb: float = 0.0
    delta_ca: float = 0.0
    gamma_a: float = 0.1
    gamma_b: float = 0.1
    gamma_c: float = 100.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InvalidInputError(f"{f.name} must be a real number, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        _check_finite(**dataclasses.asdict(self))
        for name in ("omega_ab", "omega_cb", "omega_ca", "gamma_a", "gamma_b", "gamma_c"):
            if getattr(self, name) < 0.0:
                raise InvalidInputError(f"{name} must be non-negative, got {getattr(self, name)}")
        mismatch = self.delta_ab - (self.delta_cb - self.delta_ca)
        if abs(mismatch) > LOOP_TOL:
            raise InvalidInputError(
                "closed-loop condition delta_ab = delta_cb - delta_ca violated "
                f"by {mismatch:.3e}"
            )

    @property
    def flux(self):
        """Synthetic flux, wrapped to (-pi, pi]."""
        return wrap_phase(self.phi_ab + self.phi_cb + self.phi_ca)

    def with_flux(self, phi):
        """Copy with ``phi_ab`` shifted so the loop flux equals ``phi``."""
        return dataclasses.replace(self, phi_ab=float(phi) - self.phi_cb - self.phi_ca)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        """Build from a mapping; unknown keys are rejected."""
        if not isinstance(data, dict):
            raise InvalidInputError("parameter object must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"unknown parameter field(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class EffectiveTwoLevel:
    """Non-Hermitian two-level model ``[[da - i Ga, j_ab], [j_ba, db - i Gb]]``."""

    delta_a: float = 0.0
    delta_b: float = 0.0
    gamma_eff_a: float = 0.0
    gamma_eff_b: float = 0.0
    j_ab: complex = 0j
    j_ba: complex = 0j

    def __post_init__(self):
        for name in ("delta_a", "delta_b", "gamma_eff_a", "gamma_eff_b"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("j_ab", "j_ba"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        _check_finite(**dataclasses.asdict(self))

    def to_dict(self):
        d = dataclasses.asdict(self)
        for name in ("j_ab", "j_ba"):
            d[name] = [d[name].real, d[name].imag]
        return d

    @classmethod
    def from_dict(cls, data):
        """Inverse of :meth:`to_dict`; couplings are ``[re, im]`` pairs or reals."""
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InvalidInputError(f"unknown atom field(s): {', '.join(unknown)}")
        kwargs = dict(data)
        for name in ("j_ab", "j_ba"):
            if name in kwargs:
                v = kwargs[name]
                if isinstance(v, (list, tuple)):
                    if len(v) != 2:
                        raise InvalidInputError(f"{name} must be [re, im]")
                    v = complex(float(v[0]), float(v[1]))
                kwargs[name] = v
        return cls(**kwargs)


def build_full_hamiltonian(p):
    """3x3 non-Hermitian Hamiltonian in the gauge-reduced form.

    Diagonal ``(delta_ab - i gamma_a, -i gamma_b, delta_cb - i gamma_c)``;
    ``H[a,b] = omega_ab e^{i phi}`` with the conjugate phase at ``H[b,a]``,
    and real couplings ``omega_ca`` (a-c) and ``omega_cb`` (b-c).
    """
    ph = cmath.exp(1j * p.flux)
    h = np.array(
        [
            [p.delta_ab - 1j * p.gamma_a, p.omega_ab * ph, p.omega_ca],
            [p.omega_ab * ph.conjugate(), -1j * p.gamma_b, p.omega_cb],
            [p.omega_ca, p.omega_cb, p.delta_cb - 1j * p.gamma_c],
        ],
        dtype=np.complex128,
    )
    return as_operator(h)


def _reservoir_denominator(p):
    den = p.gamma_c ** 2 + p.delta_cb ** 2
    if p.gamma_c == 0.0:
        raise DomainError("adiabatic elimination requires gamma_c > 0")
    return den


def adiabatic_eliminate(p):
    """Eliminate the fast-decaying level ``|c>``.

    Returns the effective detunings, decay rates and the flux-dependent
    couplings; the shared dissipative term ``-i omega_ca omega_cb
    (gamma_c - i delta_cb) / (gamma_c^2 + delta_cb^2)`` adds to the coherent
    ``omega_ab e^{+-i phi}``.
    """
    den = _reservoir_denominator(p)
    dissipative = -1j * p.omega_ca * p.omega_cb * (p.gamma_c - 1j * p.delta_cb) / den
    ph = cmath.exp(1j * p.flux)
    return EffectiveTwoLevel(
        delta_a=p.delta_ab - p.omega_ca ** 2 * p.delta_cb / den,
        delta_b=-p.omega_cb ** 2 * p.delta_cb / den,
        gamma_eff_a=p.gamma_a + p.omega_ca ** 2 * p.gamma_c / den,
        gamma_eff_b=p.gamma_b + p.omega_cb ** 2 * p.gamma_c / den,
        j_ab=p.omega_ab * ph + dissipative,
        j_ba=p.omega_ab * ph.conjugate() + dissipative,
    )


def adiabatic_c_amplitude(p, a, b):
    """Slaved amplitude of ``|c>`` given the ``|a>`` and ``|b>`` amplitudes."""
    den = complex(p.gamma_c, p.delta_cb)
    if den == 0:
        raise DomainError("gamma_c and delta_cb both vanish; |c> cannot be eliminated")
    return (-1j * p.omega_ca * complex(a) - 1j * p.omega_cb * complex(b)) / den


def build_effective_hamiltonian(e):
    return as_operator(
        [
            [e.delta_a - 1j * e.gamma_eff_a, e.j_ab],
            [e.j_ba, e.delta_b - 1j * e.gamma_eff_b],
        ]
    )


def coherent_dissipative_coupling(omega, gamma):
    """Two levels coupled both coherently (``omega``) and through a shared
    reservoir (``gamma``), with no detuning or local decay."""
    omega = complex(omega)
    return EffectiveTwoLevel(j_ab=omega - 1j * gamma, j_ba=omega.conjugate() - 1j * gamma)
