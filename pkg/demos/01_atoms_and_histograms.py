"""
Atoms, uniform histograms and discrete divergences
==================================================

A family of sets cuts its ground universe into atoms: maximal groups of
elements that no set in the family tells apart. Every set is a union of
atoms, so a set can be written as a histogram over them.
"""

from setembed import SetFamily, augment, compute_atoms
from setembed.histograms import damped_kl, discrete_js, histogram_entropy, uniform_histogram

fam = SetFamily.from_dict({"AB": {"A", "B"}, "BC": {"B", "C"}, "B": {"B"}})
part = compute_atoms(fam)
for atom, row in zip(part.atoms, part.membership):
    inside = [s.name for s, m in zip(fam.sets, row) if m]
    print(sorted(atom), "is inside", inside)

# %%
# The uniform distribution on a set puts weight V(atom) / V(set) on each of
# its atoms. Volumes default to one per element.
hists = {s.name: uniform_histogram(s, part, fam.universe) for s in fam.sets}
for name, h in hists.items():
    print(name, h.weights, "entropy", round(histogram_entropy(h), 4))

# %%
# Plain KL is infinite whenever the second set misses part of the first.
# The damped variant adds epsilon inside the log, so it stays finite.
print("damped KL(AB : B)", damped_kl(hists["AB"], hists["B"]))
print("damped KL(B : AB)", damped_kl(hists["B"], hists["AB"]))
print("JS(AB, BC)", discrete_js(hists["AB"], hists["BC"]))

# %%
# Adding pairwise intersections, unions and differences never changes the
# atoms, only the number of sets that are built from them.
big = augment(fam, "full")
print(len(fam), "->", len(big), "sets;", big.names)
print("same atoms:", compute_atoms(big).atom_set() == part.atom_set())
