"""Steady-state laser as photon condensation into a collective ground level.

Three layers, mirroring the physics:

* :mod:`lasercond.spectrum` -- exact invariant-block spectra of N resonant
  two-level molecules coupled to a single boson mode, plus the closed-form
  ground-state photon statistics and the evenly spaced level ladder.
* :mod:`lasercond.thermal` -- Dicke multiplet degeneracies and thermal
  averages of the molecular energy m and of r(r+1).
* :mod:`lasercond.condensation` -- the pumped, bath-coupled steady state of
  the 2r+1 level ladder: occupations, amplification factor, chemical
  potential, condensate split, and the pump threshold.

:mod:`lasercond.cli` exposes the ``lasercond`` command with ``spectrum``,
``thermal``, ``steady-state``, ``sweep`` and ``threshold`` subcommands.
"""

__version__ = "0.1.0"
