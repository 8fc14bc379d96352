"""Automorphism groups of finite relational structures: enumeration, censuses
and finite checks of the typical-group results."""

from .automorphism import (
    AutProfile,
    automorphism_group,
    canonical_form,
    fixed_structure_count,
    profile,
    unlabelled_count,
)
from .census import CensusKey, CensusReport, Predicate, ratio_table, run_census
from .groups import (
    GroupClass,
    OrbitStats,
    Permutation,
    PermGroup,
    are_isomorphic,
    classify,
    close,
    fixed_points,
    has_fixed_point,
    orbit_stats,
    subgroups_of_sym,
    support,
)
from .structures import (
    Structure,
    Vocabulary,
    decode,
    encode,
    enumerate_structures,
    find_isomorphisms,
    induced_substructure,
    is_isomorphism,
    sample_structure,
)
from .theory import (
    BetaParams,
    beta,
    beta_gap,
    is_full,
    membership_S,
    predict,
    verify_lemma_suite,
)

__version__ = "0.1.0"
