"""Embed families of finite sets into diagonal Gaussian distributions.

Set size maps to entropy and set overlap to divergence between the
embedded Gaussians.
"""

from .familyfile import FamilySpec, format_family, load_family, load_fixture, parse_family
from .gaussian import DiagGaussian, e_centroid, entropy, kl_gaussian, log_density, m_centroid, mixture_density
from .histograms import AtomHistogram, damped_kl, discrete_js, extended_kl, histogram_entropy, uniform_histogram
from .mc import MCConfig, NoiseBlock, mc_js, mc_js_gradient, mc_kl_to_mixture, noise_block
from .optimizer import EmbeddingConfig, EmbeddingState, StressReport, fit, with_seed
from .plot import render_svg
from .sets import AtomicPartition, GroundUniverse, SetFamily, SubsetRef, atoms_equivalent, augment, compute_atoms, set_volume

__version__ = "0.1.0"
