"""Builders for entropy families from chord spectra.

``spectrum_family`` truncates one module (the complex of the whole
spectrum) at increasing lengths.  ``profile_family`` realizes the scaling
family ``s -> s H`` for a convex profile: at scale ``s`` the chords up to
length ``s T`` are pushed through the action map of ``s h`` and the result
is truncated at ``s B``.
"""

from __future__ import annotations

import numpy as np

from .complex import FilteredComplex, reduce
from .entropy import FamilyMember, ScalingFamily
from .reparam import ConvexProfile, action_of_length, scaled_profile
from .spectra import TRIVIAL, ChordSpectrum, GapModel, complex_from_spectrum


def sublevel(cx: FilteredComplex, bound: float) -> FilteredComplex:
    """Subcomplex spanned by generators of action <= bound."""
    keep = [g for g in cx.ids if cx.action(g) <= bound]
    return FilteredComplex(((g, cx.action(g)) for g in keep), {g: cx.boundary(g) for g in keep})


def spectrum_family(
    spectrum: ChordSpectrum,
    levels,
    model: GapModel = TRIVIAL,
    zero_action_count: int = 0,
    name: str = "spectrum",
) -> ScalingFamily:
    levels = [float(t) for t in levels]
    if levels and max(levels) > spectrum.cutoff:
        raise ValueError(f"level {max(levels)} exceeds the spectrum cutoff {spectrum.cutoff}")
    barcode = reduce(complex_from_spectrum(spectrum, model, zero_action_count))
    return ScalingFamily.truncations(barcode, levels, name)


def profile_family(
    spectrum: ChordSpectrum,
    profile: ConvexProfile,
    scales,
    model: GapModel = TRIVIAL,
    zero_action_count: int = 0,
    name: str = "profile",
) -> ScalingFamily:
    """Members carry complexes in action units; they are reduced on demand."""
    scales = [float(s) for s in scales]
    if scales and max(scales) * profile.T > spectrum.cutoff:
        raise ValueError(f"scale {max(scales)} needs chords up to {max(scales) * profile.T}, "
                         f"beyond the spectrum cutoff {spectrum.cutoff}")
    base = complex_from_spectrum(spectrum, model, zero_action_count)
    members = []
    for s in scales:
        prof = scaled_profile(profile, s)
        sub = sublevel(base, prof.T)
        lengths = np.array([sub.action(g) for g in sub.ids])
        acts = np.asarray(action_of_length(prof, lengths), dtype=float).reshape(-1)
        cx = sub.with_actions(dict(zip(sub.ids, acts.tolist())))
        members.append(FamilyMember(f"{name}@s={s:g}", s * profile.T, prof.B, complex=cx))
    return ScalingFamily(tuple(members), "sT")
