"""Pulse-level geometric and dynamical gates for singlet-triplet qubits.

The package works in internal units where the magnetic gradient ``h = 1``,
time is measured in ``t0 = 1/h`` and ``hbar = 1``.  Physical conversions
(``h/2pi = 1 GHz``) only happen at the command-line boundary and in
:class:`stgeo.noise.NoiseSpectrum.from_hz`.
"""

__version__ = "0.1.0"
