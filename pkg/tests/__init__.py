"""
cscoh Tests
Test suite for the cscoh cohomology engine
"""
