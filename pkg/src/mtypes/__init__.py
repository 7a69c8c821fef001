"""Final coalgebras of polynomial functors on finite data: rational trees,
proto-coalgebras, truncations, indexed signatures and sheaves of trees."""

from .coalgebra import (
    Coalgebra,
    CoalgebraError,
    TreeHandle,
    bisimilar,
    check_coalgebra_morphism,
    enumerate_paths,
    lift_path,
    minimize,
    relabel,
)
from .indexed import IndexedSignature, chi, equaliser_characterization, fibre_coherent, reindex
from .presheaf import (
    FiniteCategory,
    Presheaf,
    PresheafMorphism,
    natural_tree,
    natural_tree_pool,
    restrict_tree,
    underlying_map,
)
from .proto import ProtoCoalgebra, coh
from .sheaf import CompatibleFamily, Site, glue, sheaf_check
from .signature import PfElement, Signature, SignatureError, SignatureMorphism, apply_functor
from .trees import CUT, Node, pathset_member, truncate, truncate_tree

__version__ = "0.1.0"

__all__ = [
    "CUT", "Coalgebra", "CoalgebraError", "CompatibleFamily", "FiniteCategory", "IndexedSignature", "Node",
    "PfElement", "Presheaf", "PresheafMorphism", "ProtoCoalgebra", "Signature", "SignatureError",
    "SignatureMorphism", "Site", "TreeHandle", "apply_functor", "bisimilar", "check_coalgebra_morphism", "chi",
    "coh", "enumerate_paths", "equaliser_characterization", "fibre_coherent", "glue", "lift_path", "minimize",
    "natural_tree", "natural_tree_pool", "pathset_member", "reindex", "relabel", "restrict_tree", "sheaf_check",
    "truncate", "truncate_tree", "underlying_map",
]
