"""Exact analysis of weights on finite rings: ideal lattices, orthogonality
matrices, the extension criterion and a brute-force oracle."""

__version__ = "0.1.0"

from .rings import (  # noqa: E402
    FiniteRing, GaloisField, MatrixRing, ProductRing, ResidueRing, RingElement, RingMismatchError,
    RingSpecError, TableRing, TruncatedPolyRing, build_ring, element_arith, orbit_partition,
    validate_table_ring,
)
from .ideals import Ideal, IdealLattice, all_ideals, annihilator, classify_ring, mobius, principal_ideals, socle  # noqa: E402
from .weights import (  # noqa: E402
    NotBiInvariant, Weight, WeightError, builtin_weight, correlate, e_right, eps_left, extend_to_tuples,
    make_weight, symmetry_groups,
)
from .orthogonality import (  # noqa: E402
    CriterionVerdict, NotPrincipalIdealRing, OrthMatrix, build_matrix, criterion, det_exact, det_factorized,
    det_poly_in_w0, diagonal_factors, triangularity,
)
from .oracle import (  # noqa: E402
    CounterexamplePair, LinearCode, MonomialMap, build_counterexample, enumerate_codes, is_extendable,
    null_vector_integer, oracle_extension_property,
)
