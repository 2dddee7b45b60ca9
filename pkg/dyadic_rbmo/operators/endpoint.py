"""
Scalar L∞ -> RBMO_Σ endpoint split.

For an atom Q with parent Q̂, Tf - <Tf>_Q̂ on Q is split as A - c + B + D:
the local part over alpha B_Q, the parent average of the local part over
alpha B_Q̂, the annulus alpha B_Q̂ minus alpha B_Q, and the far part with its
parent average removed.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict

import numpy as np

from .discrete import DiscreteOperator, apply
from ..core.filtration import Filtration
from ..core.measure import FieldLike, field_values
from config.constants import ERROR_ROOT_HAS_NO_PARENT, ERROR_ZERO_NORM


@dataclass(frozen=True)
class EndpointTerms:
    """The four terms, the left-hand side they bound and the ratio LHS / ||f||_inf."""

    I: float
    II: float
    III: float
    IV: float
    lhs: float
    total: float
    norm_inf: float
    ratio: float
    split_exact: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class EndpointRegions:
    """Support masks of the split around an atom."""

    atom: np.ndarray
    parent: np.ndarray
    local: np.ndarray
    parent_local: np.ndarray
    annulus: np.ndarray
    far: np.ndarray
    split_exact: bool


def endpoint_regions(F: Filtration, atom: int) -> EndpointRegions:
    """
    Raises:
        ValueError: If the atom has no parent
    """
    if atom not in F.sigma_parent:
        raise ValueError(ERROR_ROOT_HAS_NO_PARENT)
    lattice = F.lattice
    alpha = lattice.params.alpha
    parent = F.sigma_parent[atom]
    size = F.measure.size

    inside = np.zeros(size, dtype=bool)
    inside[lattice.cube(atom).members] = True
    parent_inside = np.zeros(size, dtype=bool)
    parent_inside[lattice.cube(parent).members] = True

    local = lattice.ball_mask(atom, alpha)
    parent_local = lattice.ball_mask(parent, alpha)
    return EndpointRegions(
        atom=inside,
        parent=parent_inside,
        local=local,
        parent_local=parent_local,
        annulus=parent_local & ~local,
        far=~parent_local,
        split_exact=bool(np.all(parent_local[local])),
    )


def _average(values: np.ndarray, weights: np.ndarray, mask: np.ndarray) -> float:
    return float(np.dot(values[mask], weights[mask]) / weights[mask].sum())


def _mean_square_root(values: np.ndarray, weights: np.ndarray, mask: np.ndarray) -> float:
    return float(np.sqrt(_average(np.abs(values) ** 2, weights, mask)))


def endpoint_terms(T: DiscreteOperator, F: Filtration, f: FieldLike, atom: int) -> EndpointTerms:
    """
    Compute the four terms on ``atom`` as root mean squares over the atom.

    Raises:
        ValueError: If the atom has no parent or f vanishes identically
    """
    mu = F.measure
    values = field_values(f, mu)
    norm_inf = float(np.max(np.abs(values)))
    if norm_inf == 0:
        raise ValueError(ERROR_ZERO_NORM)
    regions = endpoint_regions(F, atom)
    w = mu.weights

    image = apply(T, values)
    local = apply(T, np.where(regions.local, values, 0.0))
    parent_local = apply(T, np.where(regions.parent_local, values, 0.0))
    annulus = apply(T, np.where(regions.annulus, values, 0.0))
    far = apply(T, np.where(regions.far, values, 0.0))

    lhs = _mean_square_root(image - _average(image, w, regions.parent), w, regions.atom)
    term_i = _mean_square_root(local, w, regions.atom)
    term_ii = abs(_average(parent_local, w, regions.parent))
    term_iii = _mean_square_root(annulus, w, regions.atom)
    term_iv = _mean_square_root(far - _average(far, w, regions.parent), w, regions.atom)
    total = term_i + term_ii + term_iii + term_iv
    return EndpointTerms(term_i, term_ii, term_iii, term_iv, lhs, total, norm_inf, lhs / norm_inf, regions.split_exact)
