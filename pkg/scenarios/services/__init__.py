"""
Services for the scenarios app.
"""
