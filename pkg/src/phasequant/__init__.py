"""Numerical toolkit for phase/modulus quantization on the positive discrete series.

Modules
-------
specfun
    Log-Gamma and modified Bessel functions with policy-driven evaluation.
repalg
    Truncated number-basis matrices of the K generators and algebra checks.
phaseops
    Self-adjoint cos/sin phase operators, diagonal identities, spectra.
bgstates
    Barut-Girardello coherent states: moments, completeness, k-bound scan.
fockreal
    Bosonic realizations: Holstein-Primakoff, Dirac/Susskind-Glogower,
    squared boson, two-mode, and standard-coherent-state expectations.
nfm
    Classical interference observables and the quantum reconstruction pipeline.
cli
    Command-line driver with reproducible CSV/JSON outputs.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
