"""Two-operator downlink throughput: dedicated bands vs pooled spectrum."""

__version__ = "0.1.0"
