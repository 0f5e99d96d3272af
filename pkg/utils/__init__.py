"""
Shared helpers and the exception hierarchy of the covert_aoi project.
"""
