"""Stochastic recursive gradient descent ascent for nonconvex-strongly-concave minimax problems."""

try:
    from ._version import __version__
except ImportError:
    # Source checkout without a hatch-vcs build
    __version__ = "0.0.0+unknown"
