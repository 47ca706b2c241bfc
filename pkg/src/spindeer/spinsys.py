"""Spin sites, secular dipolar couplings and the static ZZ Hamiltonian.

All sites are treated as effective two-level systems with Z = sigma_z / 2,
so the interaction Hamiltonian is a sum of A_ij * Z_i Z_j terms that is
diagonal in the computational basis.  Coupling amplitudes keep the sign of
(1 - 3 cos^2 theta); the analysis layer reports magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .constants import K_DD, MAGIC_ANGLE_DEG, mhz, to_mhz

Z_DIAG = np.array([0.5, -0.5])


class SpinKind(Enum):
    NV = "NV"
    DB = "DB"
    LABEL = "LABEL"


@dataclass(frozen=True)
class SpinSite:
    """A two-level spin with fixed geometry and decoherence times.

    ``larmor`` is the angular transition frequency (rad/us) of the site's
    free term.  It only enters the finite-width drive model (carrier
    frequencies and detunings) and the thermal occupation factor; free
    evolution happens in the rotating frame where it has been removed.
    """

    name: str
    kind: SpinKind
    larmor: float
    t1: float
    t2: float
    position: np.ndarray | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("site name must be non-empty")
        if self.t1 <= 0.0 or self.t2 <= 0.0:
            raise ValueError(f"site {self.name!r}: T1 and T2 must be positive")
        if self.t2 > 2.0 * self.t1:
            raise ValueError(
                f"site {self.name!r}: T2 = {self.t2} exceeds 2*T1 = {2.0 * self.t1}"
            )
        if self.position is not None:
            pos = np.array(self.position, dtype=float)
            if pos.shape != (3,):
                raise ValueError(f"site {self.name!r}: position must be a 3-vector")
            pos.flags.writeable = False
            object.__setattr__(self, "position", pos)


@dataclass(frozen=True)
class SpinSystem:
    """An ordered collection of spin sites plus their ZZ coupling table.

    ``couplings[i, j]`` is the signed angular ZZ amplitude (rad/us) between
    sites i and j.  Entries come from the stored geometry unless they were
    explicitly overridden at build time (see :func:`build_system`).
    """

    sites: tuple[SpinSite, ...]
    field_direction: np.ndarray
    couplings: np.ndarray
    overridden: frozenset[frozenset[str]] = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.sites)
        names = [s.name for s in self.sites]
        if len(set(names)) != n:
            raise ValueError(f"duplicate site names: {names}")
        if sum(1 for s in self.sites if s.kind is SpinKind.NV) != 1:
            raise ValueError("exactly one NV site is required")
        fdir = np.array(self.field_direction, dtype=float)
        norm = np.linalg.norm(fdir)
        if fdir.shape != (3,) or norm == 0.0:
            raise ValueError("field_direction must be a nonzero 3-vector")
        fdir = fdir / norm
        fdir.flags.writeable = False
        object.__setattr__(self, "field_direction", fdir)
        coup = np.array(self.couplings, dtype=float)
        if coup.shape != (n, n):
            raise ValueError(f"coupling table must be {n}x{n}")
        if not np.allclose(coup, coup.T, atol=0.0):
            raise ValueError("coupling table must be symmetric")
        if np.any(np.diag(coup) != 0.0):
            raise ValueError("coupling table diagonal must be zero")
        coup.flags.writeable = False
        object.__setattr__(self, "couplings", coup)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dim(self) -> int:
        return 2 ** len(self.sites)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.sites)

    @property
    def nv_index(self) -> int:
        return next(i for i, s in enumerate(self.sites) if s.kind is SpinKind.NV)

    def index(self, name: str) -> int:
        for i, s in enumerate(self.sites):
            if s.name == name:
                return i
        raise KeyError(f"no site named {name!r}")

    def site(self, name: str) -> SpinSite:
        return self.sites[self.index(name)]

    def coupling(self, a: str, b: str) -> float:
        """Signed ZZ amplitude (rad/us) between the named sites."""
        return float(self.couplings[self.index(a), self.index(b)])

    def pair_geometry(self, a: str, b: str) -> tuple[float, float] | None:
        """(distance nm, angle-to-field deg) for a pair, if positions exist."""
        pa, pb = self.site(a).position, self.site(b).position
        if pa is None or pb is None:
            return None
        rel = pa - pb
        d = float(np.linalg.norm(rel))
        cos_theta = abs(float(np.dot(rel, self.field_direction)) / d)
        cos_theta = min(cos_theta, 1.0)
        return d, math.degrees(math.acos(cos_theta))

    def pairs(self):
        """Yield (i, j, name_i, name_j) for every unordered site pair."""
        for i in range(self.n_sites):
            for j in range(i + 1, self.n_sites):
                yield i, j, self.sites[i].name, self.sites[j].name


def dipolar_coupling(d: float, theta: float) -> float:
    """Secular ZZ dipolar amplitude for separation ``d`` (nm) at ``theta`` deg.

    Returns k_dd / d^3 * (1 - 3 cos^2 theta) in rad/us, negative below the
    magic angle.
    """
    if d <= 0.0:
        raise ValueError(f"distance must be positive, got {d}")
    cos_theta = math.cos(math.radians(theta))
    return K_DD / d**3 * (1.0 - 3.0 * cos_theta**2)


def coupling_from_positions(
    p_i: Sequence[float],
    p_j: Sequence[float],
    field_direction: Sequence[float] = (0.0, 0.0, 1.0),
) -> float:
    """Secular ZZ amplitude (rad/us) between two sites given by position."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    rel = p_i - p_j
    d = float(np.linalg.norm(rel))
    if d == 0.0:
        raise ValueError("coincident positions have no dipolar coupling")
    fdir = np.asarray(field_direction, dtype=float)
    fdir = fdir / np.linalg.norm(fdir)
    cos_theta = float(np.dot(rel, fdir)) / d
    return K_DD / d**3 * (1.0 - 3.0 * cos_theta**2)


def _parse_pair_key(key: str, names: Sequence[str]) -> tuple[str, str]:
    parts = key.split("-")
    if len(parts) != 2 or parts[0] not in names or parts[1] not in names:
        raise ValueError(
            f"coupling override key {key!r} must be '<site>-<site>' with known site names"
        )
    if parts[0] == parts[1]:
        raise ValueError(f"coupling override key {key!r} pairs a site with itself")
    return parts[0], parts[1]


def build_system(config: Mapping) -> SpinSystem:
    """Assemble a :class:`SpinSystem` from a parsed system description.

    ``config`` mirrors the ``system`` block of an experiment configuration:
    a ``sites`` list (each entry: name, kind, larmor_mhz, t1_us, t2_us and
    optionally position), an optional ``field_direction`` and an optional
    ``coupling_overrides_mhz`` table of ``"A-B" -> signed MHz`` entries.
    Overrides win over geometry; pairs without positions must be overridden.
    """
    entries = config.get("sites")
    if not entries or not 3 <= len(entries) <= 4:
        raise ValueError("system must list 3 sites (direct) or 4 sites (hybrid)")
    sites = []
    for entry in entries:
        kind = SpinKind(entry["kind"])
        pos = entry.get("position")
        sites.append(
            SpinSite(
                name=entry["name"],
                kind=kind,
                larmor=mhz(float(entry["larmor_mhz"])),
                t1=float(entry["t1_us"]),
                t2=float(entry["t2_us"]),
                position=None if pos is None else np.asarray(pos, dtype=float),
            )
        )
    names = [s.name for s in sites]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate site names: {names}")

    fdir = np.asarray(config.get("field_direction", (0.0, 0.0, 1.0)), dtype=float)
    fdir = fdir / np.linalg.norm(fdir)

    overrides = {}
    for key, value in (config.get("coupling_overrides_mhz") or {}).items():
        a, b = _parse_pair_key(key, names)
        overrides[frozenset((a, b))] = mhz(float(value))

    n = len(sites)
    coup = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            pair = frozenset((names[i], names[j]))
            if pair in overrides:
                value = overrides[pair]
            else:
                pi, pj = sites[i].position, sites[j].position
                if pi is None or pj is None:
                    raise ValueError(
                        f"pair {names[i]}-{names[j]} has no positions and no override"
                    )
                value = coupling_from_positions(pi, pj, fdir)
            coup[i, j] = coup[j, i] = value

    return SpinSystem(
        sites=tuple(sites),
        field_direction=fdir,
        couplings=coup,
        overridden=frozenset(overrides),
    )


def secular_diagonal(sys: SpinSystem) -> np.ndarray:
    """Diagonal of the ZZ interaction Hamiltonian over the site tensor product.

    Basis ordering: site 0 is the most significant bit; bit value 0 is the
    Z = +1/2 (ground) state.
    """
    n = sys.n_sites
    diag = np.zeros(sys.dim)
    z_bits = np.empty((n, sys.dim))
    idx = np.arange(sys.dim)
    for k in range(n):
        bits = (idx >> (n - 1 - k)) & 1
        z_bits[k] = 0.5 - bits
    for i in range(n):
        for j in range(i + 1, n):
            a = sys.couplings[i, j]
            if a != 0.0:
                diag += a * z_bits[i] * z_bits[j]
    return diag


def secular_hamiltonian(sys: SpinSystem) -> np.ndarray:
    """Full ZZ interaction Hamiltonian sum_{i<j} A_ij Z_i Z_j (rad/us).

    Hermitian and diagonal in the computational basis.
    """
    return np.diag(secular_diagonal(sys))


def near_magic_angle(theta_deg: float, tol_deg: float = 1.0) -> bool:
    """Whether an angle sits within ``tol_deg`` of the magic angle."""
    return abs(theta_deg - MAGIC_ANGLE_DEG) < tol_deg


def coupling_table(sys: SpinSystem) -> list[dict]:
    """Per-pair rows: names, distance/angle where known, amplitude in MHz."""
    rows = []
    for i, j, a, b in sys.pairs():
        geom = sys.pair_geometry(a, b)
        rows.append(
            {
                "pair": f"{a}-{b}",
                "d_nm": None if geom is None else geom[0],
                "theta_deg": None if geom is None else geom[1],
                "a_mhz": to_mhz(sys.couplings[i, j]),
                "overridden": frozenset((a, b)) in sys.overridden,
                "near_magic": geom is not None and near_magic_angle(geom[1]),
            }
        )
    return rows
