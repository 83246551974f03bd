"""
Test package for gradord.
"""
