"""Built-in fixtures: the three concrete lattice/cone pairs used throughout.

* running: Z^3 with q(l) = (l1^2 - l2^2 - l3^2)/2 and the tetrahedral cone
  cut out by l3 >= 0, l1 - l2 - 2 l3 >= 0, 2 l2 + 2 l3 - l1 >= 0 (union its
  negative).  The walls are oriented so that <v, w_i> equals the defining
  linear forms; the bounding hyperplanes are those of (0 0 1), (1 1 2),
  (1 2 2).
* appell-lerch: the signature (1,1) lattice with Gram ((1,1),(1,0)) and the
  quadrant cone, tetrahedral and cubical at once.
* control-posdef: the positive definite one-dimensional lattice with Gram
  (2); empty cubical wall set, so the series is the classical theta.
"""

from __future__ import annotations

from functools import lru_cache

from .cone import SignPolynomial, WallSet, face_indicator
from .quadspace import Lattice
from .theta import JacobiPoint

PRESET_NAMES = ("running", "appell-lerch", "control-posdef")


@lru_cache(maxsize=None)
def running_example() -> tuple[Lattice, WallSet, SignPolynomial]:
    lattice = Lattice.from_gram([[1, 0, 0], [0, -1, 0], [0, 0, -1]])
    wall_set = WallSet.make(lattice.space,
                            [[0, 0, -1], [1, 1, 2], [-1, -2, -2]],
                            "tetrahedral")
    return lattice, wall_set, face_indicator(wall_set)


@lru_cache(maxsize=None)
def appell_lerch() -> tuple[Lattice, WallSet, SignPolynomial]:
    lattice = Lattice.from_gram([[1, 1], [1, 0]])
    wall_set = WallSet.make(lattice.space, [[0, 1], [1, -1]], "cubical",
                            pairs=[(0, 1)])
    return lattice, wall_set, face_indicator(wall_set)


@lru_cache(maxsize=None)
def control_posdef() -> tuple[Lattice, WallSet, SignPolynomial]:
    lattice = Lattice.from_gram([[2]])
    wall_set = WallSet.make(lattice.space, [], "cubical")
    return lattice, wall_set, face_indicator(wall_set)


def preset(name: str) -> tuple[Lattice, WallSet, SignPolynomial]:
    if name == "running":
        return running_example()
    if name == "appell-lerch":
        return appell_lerch()
    if name == "control-posdef":
        return control_posdef()
    raise ValueError(f"unknown preset {name!r}; expected one of {PRESET_NAMES}")


def preset_point(name: str) -> JacobiPoint:
    """A generic Jacobi point off the singular set for each preset."""
    if name == "running":
        return JacobiPoint.make(1j, [0.21 + 0.35j, 0.05 + 0.10j, -0.11 + 0.15j])
    if name == "appell-lerch":
        return JacobiPoint.make(1j, [0.13 + 0.31j, -0.21 + 0.12j])
    if name == "control-posdef":
        return JacobiPoint.make(1j, [0.17 + 0.23j])
    raise ValueError(f"unknown preset {name!r}")
