"""
Test package for spinnet
"""
