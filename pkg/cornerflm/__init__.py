"""Corner free energies of integrable 2D lattice models via the finite lattice method."""

__version__ = "1.0.0"
