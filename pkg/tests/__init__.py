"""
Tests for the decaygraph edge persistence and decay pipeline.
"""
