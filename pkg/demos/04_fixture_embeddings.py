"""
Embedding the bundled families in the plane
===========================================

Each bundled family is fitted with the default settings (Monte Carlo JS
between Gaussians, discrete JS between sets, two dimensions) and drawn as
one ellipse per set. SVG files land next to this script in ``out/``.
"""

from pathlib import Path

import numpy as np

from setembed import EmbeddingConfig, fit
from setembed.familyfile import fixture_names, load_fixture
from setembed.gaussian import entropy
from setembed.plot import render_svg

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)
config = EmbeddingConfig(iterations=1000)

fits = {}
for name in fixture_names():
    spec = load_fixture(name)
    fam = spec.to_family()
    emb, report = fit(fam, config)
    labels = ["".join(sorted(s.members)) for s in fam.sets]
    (out / f"{name}.svg").write_text(render_svg(emb, labels, spec.colors))
    print(f"{name}: stress {report.initial_stress:.4f} -> {report.final_stress:.4f}, scale {report.scale:.3f}")
    fits[name] = (labels, emb, fam.volumes())

# %%
# Bigger sets get bigger ellipses: with the shared per-axis log-scale, the
# entropy of each Gaussian is an increasing function of its set's volume.
for name, (labels, emb, volumes) in fits.items():
    print(name)
    for label, g, v in sorted(zip(labels, emb, volumes), key=lambda t: t[2]):
        print(f"   {label:<8} volume {v:g}  entropy {entropy(g):.3f}  mean {np.round(g.mean, 2)}")
