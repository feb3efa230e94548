"""ergoswitch - ergotropy and daemonic work extraction from quantum-switched channels."""

__version__ = "0.1.0"
