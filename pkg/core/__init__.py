# core/__init__.py
"""
lca-toolkit core: lambda-bracket calculus, cohomology, 2-term structures and extensions
"""

__version__ = "1.0.0"
