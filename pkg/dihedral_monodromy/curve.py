"""Combinatorial model of the hyperelliptic double cover and its local systems.

Branch points 1 .. 2g+2 sit on the real axis and cut C_k joins 2k-1 to 2k. The complement of
the cuts is trivialised separately on the upper sheet U and the lower sheet D; crossing C_k
from U to D multiplies a section by the passing transformation P_k on the left.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .constants import (
    MIN_GENUS,
    MIN_IDENTITY_CUTS,
    MIN_N,
    PRESET_IRR,
    PRESET_SPAN,
    PRESET_SPAN_BC_EQUAL,
    PRESETS,
)
from .exactmath import CycMatrix, CycScalar
from .heisenberg import (
    DihedralElement,
    a_element,
    alpha_element,
    dh_generate,
    identity,
    sigma,
)
from .logger import Logger
from .reps import CharOrbit, p_matrix, r_matrix, w_u_matrix

logger = Logger("curve")

IDENTITY = "Identity"
REFLECTION = "Reflection"
ROTATION = "Rotation"

DOWN = "U->D"
UP = "D->U"


class ConfigError(ValueError):
    """Invalid genus, n, preset, orbit or config file."""


def cut_of(point: int) -> int:
    """Index k of the cut C_k = [2k-1, 2k] ending at a branch point."""
    return (point + 1) // 2


def validate_parameters(g: int, n: int) -> None:
    if g < MIN_GENUS:
        raise ConfigError(
            f"genus must be >= {MIN_GENUS} so that two cuts carry the identity (got g={g})"
        )
    if n < MIN_N or n % 2 == 0:
        raise ConfigError(f"n must be odd and >= {MIN_N} (got n={n})")


@dataclass(frozen=True)
class BranchConfig:
    """
    Passing transformations P_1 .. P_(g+1), one per cut.

    Attributes:
        g: Genus of the curve
        n: Order of the Heisenberg group
        passing: Group elements, passing[k-1] belongs to cut C_k
        preset_name: Preset label, None for custom configs
    """

    g: int
    n: int
    passing: Tuple[DihedralElement, ...]
    preset_name: Optional[str] = None

    @property
    def num_points(self) -> int:
        return 2 * self.g + 2

    def cut(self, k: int) -> DihedralElement:
        return self.passing[k - 1]

    def identity_cuts(self) -> List[int]:
        return [k for k, P in enumerate(self.passing, start=1) if P.is_identity()]

    def to_json(self) -> Dict[str, Any]:
        data = {"g": self.g, "n": self.n, "passing": [P.to_json() for P in self.passing]}
        if self.preset_name:
            data["preset"] = self.preset_name
        return data


_PRESET_PREFIXES = {
    PRESET_IRR: lambda n: [
        sigma(n),
        a_element(n) * sigma(n),
        alpha_element(n) * sigma(n),
        a_element(n),
        alpha_element(n),
    ],
    PRESET_SPAN: lambda n: [
        a_element(n),
        alpha_element(n),
        a_element(n) * sigma(n),
        alpha_element(n) * sigma(n),
        sigma(n),
    ],
    PRESET_SPAN_BC_EQUAL: lambda n: [
        a_element(n),
        alpha_element(n),
        identity(n),
        a_element(n) * sigma(n),
        alpha_element(n) * sigma(n),
        sigma(n),
    ],
}


def preset_passing(g: int, n: int, preset: str) -> BranchConfig:
    """Group-level config of a preset, padded with identity cuts up to g+1."""
    validate_parameters(g, n)
    if preset not in _PRESET_PREFIXES:
        raise ConfigError(f"Unknown preset {preset!r}; expected one of {', '.join(PRESETS)}")
    prefix = _PRESET_PREFIXES[preset](n)
    passing = prefix + [identity(n)] * (g + 1 - len(prefix))
    return BranchConfig(g, n, tuple(passing), preset)


def preset_config(
    g: int, n: int, preset: str, u: Optional[CharOrbit] = None
) -> Tuple[BranchConfig, List[CycMatrix]]:
    """
    Preset passing transformations and their images in the local system of `u`.

    Args:
        g: Genus, at least 6
        n: Odd order, at least 3
        preset: "irr", "span" or "span-bc-equal"
        u: Character orbit; None returns the group-level config only

    Returns:
        (config, per-cut matrices); the list is empty when u is None

    Raises:
        ConfigError: On g < 6, even n or an unknown preset
    """
    config = preset_passing(g, n, preset)
    if u is None:
        return config, []
    if preset == PRESET_SPAN_BC_EQUAL and u.b != u.c:
        logger.warning(f"Preset {preset} is meant for b = c, got u = ({u.b},{u.c})")
    return config, local_system(config, u).cut_matrices


def config_from_passing(
    g: int, n: int, passing: Sequence[DihedralElement], name: Optional[str] = None
) -> BranchConfig:
    """Custom config; fewer than two identity cuts only triggers a warning."""
    validate_parameters(g, n)
    if len(passing) != g + 1:
        raise ConfigError(f"Expected {g + 1} passing transformations, got {len(passing)}")
    for P in passing:
        if P.n != n:
            raise ConfigError(f"Passing transformation {P} is not in DH_{n}")
    config = BranchConfig(g, n, tuple(passing), name)
    if len(config.identity_cuts()) < MIN_IDENTITY_CUTS:
        logger.warning(
            f"Config has {len(config.identity_cuts())} identity cuts; "
            f"the spanning and irreducibility arguments expect at least {MIN_IDENTITY_CUTS}"
        )
    return config


def config_from_json(source: Union[str, Dict[str, Any]]) -> BranchConfig:
    """
    Load {g, n, preset} or {g, n, passing: [{eps, lambda, a, alpha}, ...]}.

    Args:
        source: Parsed JSON object or a path to a JSON file
    """
    try:
        if isinstance(source, str):
            if not os.path.exists(source):
                raise ConfigError(f"Config file not found: {source}")
            with open(source, "r", encoding="utf-8") as f:
                data = json.load(f)
        else:
            data = source
        g, n = int(data["g"]), int(data["n"])
        if "preset" in data and "passing" not in data:
            return preset_passing(g, n, data["preset"])
        passing = [DihedralElement.from_json(n, item) for item in data["passing"]]
        return config_from_passing(g, n, passing, data.get("preset"))
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        logger.error(f"Malformed config: {str(e)}")
        raise ConfigError(f"Malformed config: {str(e)}") from e


@dataclass(frozen=True)
class LoopSpec:
    """
    Canonical loop L_ij around branch points i < j.

    It leaves U by crossing the cut of i next to i, runs above the real axis on D and comes
    back to U through the cut of j next to j. Events are (quarter position, cut, direction).
    """

    i: int
    j: int
    events: Tuple[Tuple[int, int, str], ...] = field(compare=False, default=())

    @property
    def key(self) -> Tuple[int, int]:
        return (self.i, self.j)

    def __repr__(self) -> str:
        return f"L({self.i},{self.j})"


def _event_position(point: int) -> int:
    # crossings happen inside the cut: right of an odd point, left of an even one
    return 4 * point + 1 if point % 2 else 4 * point - 1


def canonical_loop(g: int, i: int, j: int) -> LoopSpec:
    if not 1 <= i < j <= 2 * g + 2:
        raise ValueError(f"Need 1 <= i < j <= {2 * g + 2}, got ({i}, {j})")
    events = (
        (_event_position(i), cut_of(i), DOWN),
        (_event_position(j), cut_of(j), UP),
    )
    return LoopSpec(i, j, events)


def all_loops(g: int) -> List[LoopSpec]:
    N = 2 * g + 2
    return [canonical_loop(g, i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]


def loop_group_monodromy(config: BranchConfig, i: int, j: int) -> DihedralElement:
    """Monodromy of L_ij in DH_n: each event multiplies on the left."""
    loop = canonical_loop(config.g, i, j)
    current = identity(config.n)
    for _, k, direction in loop.events:
        P = config.cut(k)
        current = (P if direction == DOWN else P.inverse()) * current
    return current


@dataclass(frozen=True)
class MonodromyClass:
    """
    Trichotomy of a loop monodromy in the local system.

    Attributes:
        kind: Identity, Reflection (P^k R) or Rotation (P^k, k != 0)
        matrix: The monodromy matrix
        power: k in P^k R or P^k
    """

    kind: str
    matrix: CycMatrix
    power: int = 0


def classify_matrix(M: CycMatrix) -> MonodromyClass:
    """Classify a local-system matrix as I, P^k R or P^k."""
    n = M.n
    if M.nrows == 1:
        if not M.is_identity():
            raise ValueError(f"Rank-one monodromy {M} is not trivial")
        return MonodromyClass(IDENTITY, M)
    for k in range(n):
        if M == p_matrix(n, k):
            return MonodromyClass(IDENTITY if k == 0 else ROTATION, M, k)
        if M == p_matrix(n, k) @ r_matrix(n):
            return MonodromyClass(REFLECTION, M, k)
    raise ValueError(f"Matrix {M} is neither P^k nor P^k R")


@dataclass(frozen=True)
class FixedSpace:
    """Vectors w with M w = w: the whole plane, a line, or nothing."""

    kind: str
    vectors: Tuple[Tuple[CycScalar, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)


def fixed_vector(mc: MonodromyClass) -> FixedSpace:
    """
    Fixed vectors of a monodromy.

    Identity gives the whole space, a reflection P^k R gives the line spanned by
    (1 + M) v+ = (1, gamma^-k), a rotation gives none.
    """
    n = mc.matrix.n
    one, zero = CycScalar.one(n), CycScalar.zero(n)
    if mc.kind == IDENTITY:
        size = mc.matrix.nrows
        vectors = tuple(tuple(one if a == b else zero for b in range(size)) for a in range(size))
        return FixedSpace("plane" if size == 2 else "line", vectors)
    if mc.kind == REFLECTION:
        return FixedSpace("line", ((one, CycScalar.zeta_power(n, -mc.power)),))
    return FixedSpace("none", ())


def image_subgroup(config: BranchConfig) -> List[DihedralElement]:
    """Subgroup of DH_n generated by all loop monodromies."""
    gens = {
        loop_group_monodromy(config, i, j)
        for i in range(1, config.num_points + 1)
        for j in range(i + 1, config.num_points + 1)
    }
    return dh_generate(sorted(gens, key=lambda x: (x.eps, x.lam, x.a, x.alpha)))


@dataclass(frozen=True)
class LocalSystem:
    """
    The coefficient system of one orbit: W_u for nontrivial u, the constant rank-one system
    for the trivial orbit.

    Attributes:
        config: Group-level config
        u: Character orbit
        cut_matrices: Image of P_k in GL(W), index k-1
        form: Invariant symmetric pairing on W
    """

    config: BranchConfig
    u: CharOrbit
    cut_matrices: List[CycMatrix] = field(hash=False)
    form: CycMatrix = field(hash=False)

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def g(self) -> int:
        return self.config.g

    @property
    def rank(self) -> int:
        return self.form.nrows

    def cut_matrix(self, k: int) -> CycMatrix:
        return self.cut_matrices[k - 1]

    def monodromy(self, i: int, j: int) -> MonodromyClass:
        return loop_monodromy(self.config, self.u, i, j)

    def d_value(self, i: int, v: Sequence[CycScalar]) -> List[CycScalar]:
        """Value on the D-half of v L_ij, whose U-value is v."""
        return self.cut_matrix(cut_of(i)).apply(list(v))

    def pair(self, x: Sequence[CycScalar], y: Sequence[CycScalar]) -> CycScalar:
        total = CycScalar.zero(self.n)
        for a, xa in enumerate(x):
            if xa.is_zero():
                continue
            for b, yb in enumerate(y):
                q = self.form[a, b]
                if not q.is_zero() and not yb.is_zero():
                    total = total + xa * q * yb
        return total


def local_system(config: BranchConfig, u: CharOrbit) -> LocalSystem:
    if u.n != config.n:
        raise ConfigError(f"Orbit {u} does not belong to n={config.n}")
    if u.is_trivial:
        one = CycMatrix.identity(config.n, 1)
        return LocalSystem(config, u, [one] * (config.g + 1), one)
    matrices = [w_u_matrix(u, P) for P in config.passing]
    return LocalSystem(config, u, matrices, r_matrix(config.n))


def loop_monodromy(config: BranchConfig, u: CharOrbit, i: int, j: int) -> MonodromyClass:
    """
    Monodromy M_ij of L_ij in the local system of u, classified by the trichotomy.

    Crossing U->D at cut k multiplies by P_k on the left, D->U by P_k^-1.
    """
    element = loop_group_monodromy(config, i, j)
    if u.is_trivial:
        return MonodromyClass(IDENTITY, CycMatrix.identity(config.n, 1))
    return classify_matrix(w_u_matrix(u, element))
