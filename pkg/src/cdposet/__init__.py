"""Flag vectors, cd-indices and recursive partition certificates for graded posets."""

__version__ = "0.1.0"
