"""Link dimensioning and call-blocking analysis for meshed LTE eNBs."""

__version__ = "0.1.0"
