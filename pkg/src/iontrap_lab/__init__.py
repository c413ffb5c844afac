"""Trapped-ion physics toolkit.

Submodules
----------
trapcore   single-ion trap stability, trajectories, band structure
crystal    ion-chain equilibrium positions and normal modes
hilbert    dense spin/boson operator algebra and time-dependent programs
drive      laser-ion interaction Hamiltonian builders
magnus     closed-form drive analytics (displacements, phases, couplings)
gatesim    entangling-gate construction and validation
openlab    open-system engine and chemistry experiments
cli        batch command-line front end
"""

__version__ = "0.1.0"
