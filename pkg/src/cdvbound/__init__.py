"""Colin de Verdiere type bounds for graphs embedded on surfaces."""

__version__ = "0.1.0"
