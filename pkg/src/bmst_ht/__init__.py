"""Multiple-rate HT-coset codes and their block Markov superposition transmission."""

__version__ = "0.1.0"

from .bmst import BasicCode, BmstConfig, basic_encode, bmst_encode, make_interleavers
from .channel import BerCurve, BmstSystem, HtSystem, genie_bound, simulate_ber
from .coset import HtCode, encode, map_decode_oracle, rm_permutation, siso_decode
from .decoder import WindowConfig, sw_decode
from .design import biawgn_capacity, design_table, required_memory, shannon_limit
from .hadamard import CapabilityError, exact_extrinsic, fht, hadamard_matrix, siso_fht
from .weights import Iowef, NumericError, iowef, required_ebn0, union_bound_ber

__all__ = [
    "BasicCode", "BerCurve", "BmstConfig", "BmstSystem", "CapabilityError", "HtCode", "HtSystem",
    "Iowef", "NumericError", "WindowConfig", "basic_encode", "biawgn_capacity", "bmst_encode",
    "design_table", "encode", "exact_extrinsic", "fht", "genie_bound", "hadamard_matrix", "iowef",
    "make_interleavers", "map_decode_oracle", "required_ebn0", "required_memory", "rm_permutation",
    "shannon_limit", "simulate_ber", "siso_decode", "siso_fht", "sw_decode", "union_bound_ber",
]
