"""
Algorithms of the decaygraph pipeline, one module per stage.
"""

__version__ = "0.1.0"
