# Affinity Network Simulator Package
__version__ = "1.0.0"
