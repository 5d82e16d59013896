"""
penalty-cert-mcp
Optimality certificates for nonsmooth constrained problems via exact penalty functions
"""

__version__ = "0.1.0"
