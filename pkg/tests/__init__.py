"""
Tests for the circulant and block circulant spectral toolkit.
"""
