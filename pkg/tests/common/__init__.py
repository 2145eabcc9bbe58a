"""
Common tests package for spinnet
"""
