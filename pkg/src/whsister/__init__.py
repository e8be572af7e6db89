"""A-polynomials of Dehn fillings of the Whitehead sister link via Ptolemy equations."""

__version__ = "0.1.0"
