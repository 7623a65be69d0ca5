"""
Two centroids of a pair of diagonal Gaussians
=============================================

Averaging the moments of two Gaussians gives a wide blob covering both.
Averaging their natural parameters (precisions) gives a narrower one that
sits closer to the sharper input.
"""

import numpy as np

from setembed import DiagGaussian
from setembed.gaussian import e_centroid, entropy, kl_gaussian, m_centroid

wide = DiagGaussian(np.array([0.0, 0.0]), np.array([2.0, 1.0]))
sharp = DiagGaussian(np.array([3.0, 1.0]), np.array([0.5, 0.5]))

m = m_centroid(wide, sharp)
e = e_centroid(wide, sharp)
print("moment average    mean", m.mean, "sigma", m.sigma.round(4))
print("precision average mean", e.mean.round(4), "sigma", e.sigma.round(4))

# %%
# The precision average is never wider than the moment average, on any axis.
print("e-variance <= m-variance:", bool(np.all(e.variance <= m.variance)))

# %%
# Closed-form KL is asymmetric: covering a sharp Gaussian with a wide one is
# cheap, the reverse is not.
print("KL(sharp : wide) =", round(kl_gaussian(sharp, wide), 4))
print("KL(wide : sharp) =", round(kl_gaussian(wide, sharp), 4))
print("entropies", round(entropy(wide), 4), round(entropy(sharp), 4))
