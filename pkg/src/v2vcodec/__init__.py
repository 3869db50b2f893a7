"""V2V safety-message codec stack and Monte Carlo link simulator."""

__version__ = "0.1.0"
