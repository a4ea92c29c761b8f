"""The finite Heisenberg group H_n and the dihedral Heisenberg group mu_2 x| H_n.

Elements are stored as exponents mod n: lam is the exponent of the central root of unity
gamma, a the translation, alpha the exponent of the character k -> gamma^k.
"""

from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Tuple

import numpy as np

from .exactmath import FieldMismatchError
from .logger import Logger

logger = Logger("heisenberg")


@dataclass(frozen=True)
class HeisenbergElement:
    n: int
    lam: int
    a: int
    alpha: int

    def __post_init__(self):
        object.__setattr__(self, "lam", self.lam % self.n)
        object.__setattr__(self, "a", self.a % self.n)
        object.__setattr__(self, "alpha", self.alpha % self.n)

    def __mul__(self, other: "HeisenbergElement") -> "HeisenbergElement":
        if other.n != self.n:
            raise FieldMismatchError(f"H_{self.n} and H_{other.n} elements do not multiply")
        return HeisenbergElement(
            self.n,
            self.lam + other.lam + other.alpha * self.a,
            self.a + other.a,
            self.alpha + other.alpha,
        )

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(self.n, self.alpha * self.a - self.lam, -self.a, -self.alpha)

    def twisted(self, eps: int) -> "HeisenbergElement":
        """Image under the involution (lam, a, alpha) -> (lam, eps*a, eps*alpha)."""
        return HeisenbergElement(self.n, self.lam, eps * self.a, eps * self.alpha)

    def is_central(self) -> bool:
        return self.a == 0 and self.alpha == 0


@dataclass(frozen=True)
class DihedralElement:
    """
    Element (eps, h) of the dihedral Heisenberg group.

    Attributes:
        eps: +1 or -1
        h: Heisenberg part
    """

    eps: int
    h: HeisenbergElement

    def __post_init__(self):
        if self.eps not in (1, -1):
            raise ValueError(f"eps must be +1 or -1, got {self.eps}")

    @classmethod
    def of(cls, n: int, eps: int, lam: int, a: int, alpha: int) -> "DihedralElement":
        return cls(eps, HeisenbergElement(n, lam, a, alpha))

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def lam(self) -> int:
        return self.h.lam

    @property
    def a(self) -> int:
        return self.h.a

    @property
    def alpha(self) -> int:
        return self.h.alpha

    def __mul__(self, other: "DihedralElement") -> "DihedralElement":
        return dh_mul(self, other)

    def inverse(self) -> "DihedralElement":
        return DihedralElement(self.eps, self.h.inverse().twisted(self.eps))

    def __pow__(self, exponent: int) -> "DihedralElement":
        base = self if exponent >= 0 else self.inverse()
        result = identity(self.n)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def is_identity(self) -> bool:
        return self.eps == 1 and self.lam == 0 and self.a == 0 and self.alpha == 0

    def to_json(self) -> Dict[str, int]:
        return {"eps": self.eps, "lambda": self.lam, "a": self.a, "alpha": self.alpha}

    @classmethod
    def from_json(cls, n: int, data: Dict[str, Any]) -> "DihedralElement":
        return cls.of(n, int(data["eps"]), int(data["lambda"]), int(data["a"]), int(data["alpha"]))

    def __repr__(self) -> str:
        return f"DH{self.n}({self.eps:+d}; {self.lam}, {self.a}, {self.alpha})"


def identity(n: int) -> DihedralElement:
    return DihedralElement.of(n, 1, 0, 0, 0)


def sigma(n: int) -> DihedralElement:
    return DihedralElement.of(n, -1, 0, 0, 0)


def a_element(n: int) -> DihedralElement:
    return DihedralElement.of(n, 1, 0, 1, 0)


def alpha_element(n: int) -> DihedralElement:
    return DihedralElement.of(n, 1, 0, 0, 1)


def central(n: int, lam: int = 1) -> DihedralElement:
    return DihedralElement.of(n, 1, lam, 0, 0)


def standard_generators(n: int) -> Dict[str, DihedralElement]:
    return {"sigma": sigma(n), "a": a_element(n), "alpha": alpha_element(n)}


def dh_mul(x: DihedralElement, y: DihedralElement) -> DihedralElement:
    """
    Product in the dihedral Heisenberg group.

    (eps, h) * (eps', h') = (eps*eps', h * eps(h')), so in exponents the central part picks up
    eps * alpha' * a.

    Raises:
        FieldMismatchError: If x and y have different n
    """
    if x.n != y.n:
        raise FieldMismatchError(f"DH_{x.n} and DH_{y.n} elements do not multiply")
    return DihedralElement(x.eps * y.eps, x.h * y.h.twisted(x.eps))


def dh_generate(gens: Iterable[DihedralElement]) -> List[DihedralElement]:
    """
    Subgroup generated by `gens`, listed in breadth-first order from the identity.

    Args:
        gens: Nonempty collection of elements of one group

    Returns:
        Every element of the subgroup exactly once
    """
    gens = list(gens)
    if not gens:
        raise ValueError("dh_generate needs at least one generator")
    n = gens[0].n
    start = identity(n)
    seen = {start}
    elements = [start]
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = dh_mul(x, g)
            if y not in seen:
                seen.add(y)
                elements.append(y)
                queue.append(y)
    logger.debug(f"Generated subgroup of order {len(elements)} from {len(gens)} generators")
    return elements


def dh_quotient_abelianized(x: DihedralElement) -> Tuple[int, int, int]:
    """Drops the central coordinate: (eps, lam, a, alpha) -> (eps, a, alpha)."""
    return (x.eps, x.a, x.alpha)


def quotient_mul(n: int, x: Tuple[int, int, int], y: Tuple[int, int, int]) -> Tuple[int, int, int]:
    """Product in mu_2 x| (Z/n x Z/n)."""
    eps, a, k = x
    eps2, a2, k2 = y
    return (eps * eps2, (a + eps * a2) % n, (k + eps * k2) % n)


def normal_form(x: DihedralElement) -> Tuple[int, int, int, int]:
    """
    Exponents (m, a, k, s) with x = z^m * a^a * alpha^k * sigma^s, z = [a, alpha] central.
    """
    return ((x.lam - x.alpha * x.a) % x.n, x.a, x.alpha, 0 if x.eps == 1 else 1)


def from_normal_form(n: int, m: int, a: int, k: int, s: int) -> DihedralElement:
    x = central(n, m) * (a_element(n) ** a) * (alpha_element(n) ** k)
    return x * sigma(n) if s % 2 else x


def random_element(n: int, rng: np.random.Generator) -> DihedralElement:
    eps = 1 if rng.integers(0, 2) == 0 else -1
    lam, a, alpha = (int(v) for v in rng.integers(0, n, size=3))
    return DihedralElement.of(n, eps, lam, a, alpha)


def all_elements(n: int) -> List[DihedralElement]:
    return [
        DihedralElement.of(n, eps, lam, a, alpha)
        for eps in (1, -1)
        for lam in range(n)
        for a in range(n)
        for alpha in range(n)
    ]
