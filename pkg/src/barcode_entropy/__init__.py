"""Barcodes of action-filtered F2 complexes and barcode-entropy estimates."""

from .barcode import (
    Bar,
    Barcode,
    MonotoneMap,
    bar_type_census,
    count_long_bars,
    count_prefix_bars,
    dim_at,
    format_barcode,
    parse_barcode,
    rank_between,
    reparametrize,
    shift,
    truncate,
)
from .complex import (
    FilteredComplex,
    endpoint_conservation_check,
    format_complex,
    oracle_barcode,
    parse_complex,
    planted_barcode_complex,
    reduce,
    split_at,
    validate,
)
from .distances import bottleneck, interleaving
from .entropy import (
    EntropyReport,
    FamilyMember,
    ScalingFamily,
    barcode_entropy,
    growth_rate,
    limsup_rate,
    positive_part_entropy,
)
from .errors import InvariantError, ParseError, PipelineError
from .families import profile_family, spectrum_family
from .geometry import crofton_lines, intersection_bound_check, tomograph_census
from .reparam import ConvexProfile, action_of_length, check_bilipschitz, scaled_profile
from .spectra import (
    ChordSpectrum,
    GapModel,
    complex_from_spectrum,
    exp_spectrum,
    schottky_spectrum,
    torus_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "Bar",
    "Barcode",
    "ChordSpectrum",
    "ConvexProfile",
    "EntropyReport",
    "FamilyMember",
    "FilteredComplex",
    "GapModel",
    "InvariantError",
    "MonotoneMap",
    "ParseError",
    "PipelineError",
    "ScalingFamily",
    "action_of_length",
    "bar_type_census",
    "barcode_entropy",
    "bottleneck",
    "check_bilipschitz",
    "complex_from_spectrum",
    "count_long_bars",
    "count_prefix_bars",
    "crofton_lines",
    "dim_at",
    "endpoint_conservation_check",
    "exp_spectrum",
    "format_barcode",
    "format_complex",
    "growth_rate",
    "interleaving",
    "intersection_bound_check",
    "limsup_rate",
    "oracle_barcode",
    "parse_barcode",
    "parse_complex",
    "planted_barcode_complex",
    "positive_part_entropy",
    "profile_family",
    "rank_between",
    "reduce",
    "reparametrize",
    "scaled_profile",
    "schottky_spectrum",
    "shift",
    "spectrum_family",
    "split_at",
    "tomograph_census",
    "torus_spectrum",
    "truncate",
    "validate",
]
